//! Envelope velocity of the fast alpha = 5 breather: the carrier oscillates
//! at frequency ~alpha^3 while the envelope slides at beta^2 - 3 alpha^2
//! = -74. The run report's env_position column captures the envelope; a line
//! fit through it recovers the group velocity.
//!
//!     cargo run --release --example breather_velocity

use mkdv::experiment::{parse_config, run_experiment};

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn main() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/breather_velocity.toml"
    );
    let text = std::fs::read_to_string(path).expect("bundled config exists");
    let config = parse_config(&text).unwrap();
    let expected = {
        let alpha = config.alpha.unwrap();
        let beta = config.beta;
        beta * beta - 3.0 * alpha * alpha
    };
    println!(
        "breather alpha = {}, beta = {}: expected envelope velocity {expected}",
        config.alpha.unwrap(),
        config.beta
    );
    println!(
        "spectral run: N = {}, dt = {}, T = {}, sampling every {} steps",
        config.node_count, config.dt, config.t_final, config.sample_stride
    );

    let report = run_experiment(&config).unwrap();
    let grid = config.grid().unwrap();

    // unwrap the periodic positions by accumulating minimum-image increments
    let mut times = Vec::new();
    let mut unwrapped = Vec::new();
    let mut acc = report.rows[0].record.env_position;
    for (k, row) in report.rows.iter().enumerate() {
        if k > 0 {
            let prev = report.rows[k - 1].record.env_position;
            acc += grid.periodic_distance(prev, row.record.env_position);
        }
        times.push(row.record.t);
        unwrapped.push(acc);
    }
    let velocity = fit_slope(&times, &unwrapped);
    println!(
        "\nmeasured envelope velocity {velocity:+.3} ({:.3}% from {expected})",
        100.0 * (velocity - expected).abs() / expected.abs()
    );
    for k in [0, report.rows.len() / 2, report.rows.len() - 1] {
        println!(
            "  t = {:5.2}: wrapped position {:+8.3}, unwrapped {:+9.3}",
            times[k], report.rows[k].record.env_position, unwrapped[k]
        );
    }
    println!("\ncoarsening dt to 1e-2 drags the measured velocity tens of percent off:");
    println!("the implicit-midpoint phase error grows with (dt * carrier frequency)^2");
}
