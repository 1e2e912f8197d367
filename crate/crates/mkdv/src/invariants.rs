//! Conserved quantities of the mKdV flow.
//!
//! Continuum invariants:
//!
//! ```text
//!     I(u) = integral u dx            (mass)
//!     ||u||^2 = integral u^2 dx       (L2 norm)
//!     E(u) = integral (u^4 - u_x^2) dx  (energy)
//! ```
//!
//! Discrete counterparts on a periodic grid, with `<a,b> = dx sum a_n b_n`:
//!
//! ```text
//!     L1 = dx sum U_n
//!     L2 = dx sum U_n^2
//!     L3 = dx sum U_n^4 - dx sum ((U_{n+1} - U_n)/dx)^2
//! ```
//!
//! The schemes preserve different members of this family exactly (up to
//! fixed-point tolerance); `drift_report` quantifies what a run actually did,
//! including the first sudden jump of `L3`, the signature of a regime change.

use crate::error::Error;
use crate::exact::ExactSolutionSpec;
use crate::grid::PeriodicGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantTriple {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl InvariantTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.l3]
    }
}

/// Discrete invariants of a grid field. The gradient part of `L3` uses the
/// forward difference with periodic wrap, so `L3` carries an `O(dx^2)` bias
/// relative to the continuum energy; `L1`/`L2` are trapezoid sums and converge
/// spectrally for smooth periodic data.
pub fn discrete_invariants(u: &[f64], grid: &PeriodicGrid) -> InvariantTriple {
    assert_eq!(u.len(), grid.node_count(), "field length must match grid");
    let dx = grid.spacing();
    let n = u.len();
    let (mut s1, mut s2, mut s4, mut sg) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let v = u[i];
        s1 += v;
        s2 += v * v;
        s4 += v * v * v * v;
        let d = (u[(i + 1) % n] - v) / dx;
        sg += d * d;
    }
    InvariantTriple {
        l1: dx * s1,
        l2: dx * s2,
        l3: dx * s4 - dx * sg,
    }
}

/// Continuum invariants of a closed-form solution by periodic trapezoid
/// quadrature over `[-half_length, half_length)` with `quad_n` nodes, using
/// the analytic spatial derivative for the energy.
#[derive(Debug, Clone, Copy)]
pub struct ContinuumInvariants {
    pub values: InvariantTriple,
    /// `max(|u(-L)|, |u(L)|)` at evaluation time; a large value means the
    /// quadrature domain truncates the solution.
    pub tail_magnitude: f64,
}

impl ContinuumInvariants {
    pub fn domain_truncation_suspect(&self) -> bool {
        self.tail_magnitude > 1e-8
    }
}

pub fn continuum_invariants(
    spec: &ExactSolutionSpec,
    t: f64,
    quad_n: usize,
    half_length: f64,
) -> Result<ContinuumInvariants, Error> {
    if quad_n < 16 {
        return Err(Error::Diagnostics(format!(
            "quadrature needs at least 16 nodes, got {quad_n}"
        )));
    }
    if !(half_length.is_finite() && half_length > 0.0) {
        return Err(Error::Diagnostics(format!(
            "quadrature half length must be positive, got {half_length}"
        )));
    }
    let dx = 2.0 * half_length / quad_n as f64;
    let (mut s1, mut s2, mut s4, mut sgrad) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..quad_n {
        let x = -half_length + i as f64 * dx;
        let v = spec.eval(x, t);
        let d = spec.eval_dx(x, t);
        s1 += v;
        s2 += v * v;
        s4 += v * v * v * v;
        sgrad += d * d;
    }
    let tail = spec
        .eval(-half_length, t)
        .abs()
        .max(spec.eval(half_length, t).abs());
    Ok(ContinuumInvariants {
        values: InvariantTriple {
            l1: dx * s1,
            l2: dx * s2,
            l3: dx * (s4 - sgrad),
        },
        tail_magnitude: tail,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftReport {
    /// Max absolute deviation of each invariant from its first sample.
    pub max_drift: [f64; 3],
    /// First index `k > 0` with `|L3_k - L3_{k-1}|` above the jump threshold.
    pub l3_jump_index: Option<usize>,
    /// Absolute threshold that was applied.
    pub l3_jump_threshold: f64,
}

/// Scans an invariant time series. `relative_jump_threshold` is multiplied by
/// `|L3|` of the first sample to form the absolute jump threshold
/// (default 0.05).
pub fn drift_report(
    series: &[InvariantTriple],
    relative_jump_threshold: Option<f64>,
) -> DriftReport {
    let rel = relative_jump_threshold.unwrap_or(0.05);
    if series.is_empty() {
        return DriftReport {
            max_drift: [0.0; 3],
            l3_jump_index: None,
            l3_jump_threshold: 0.0,
        };
    }
    let first = series[0];
    let threshold = rel * first.l3.abs();
    let mut max_drift = [0.0f64; 3];
    let mut jump = None;
    for (k, s) in series.iter().enumerate() {
        let dev = [
            (s.l1 - first.l1).abs(),
            (s.l2 - first.l2).abs(),
            (s.l3 - first.l3).abs(),
        ];
        for i in 0..3 {
            max_drift[i] = max_drift[i].max(dev[i]);
        }
        if k > 0 && jump.is_none() {
            let step = (s.l3 - series[k - 1].l3).abs();
            if step > threshold && step > 0.0 {
                jump = Some(k);
            }
        }
    }
    DriftReport {
        max_drift,
        l3_jump_index: jump,
        l3_jump_threshold: threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: f64, n: usize) -> PeriodicGrid {
        PeriodicGrid::new(l, n).unwrap()
    }

    #[test]
    fn zero_field_has_zero_invariants() {
        let g = grid(40.0, 256);
        let inv = discrete_invariants(&vec![0.0; 256], &g);
        assert_eq!(inv.as_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn constant_field_matches_closed_form() {
        let g = grid(40.0, 256);
        let c = 0.7;
        let inv = discrete_invariants(&vec![c; 256], &g);
        assert!((inv.l1 - 80.0 * c).abs() < 1e-12);
        assert!((inv.l2 - 80.0 * c * c).abs() < 1e-12);
        assert!((inv.l3 - 80.0 * c.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn soliton_invariants_near_analytic_values() {
        // I = pi, ||u||^2 = 2 beta, E = (2/3) beta^3 for the beta = 1 soliton.
        // L1 and L2 are spectrally accurate; L3 carries the known forward-difference
        // bias + (dx^2/12) * integral(u_xx^2) = (dx^2/12)(14/15).
        let g = grid(40.0, 4096);
        let spec = ExactSolutionSpec::soliton(1.0).unwrap();
        let u = spec.sample(&g, 0.0);
        let inv = discrete_invariants(&u, &g);
        assert!((inv.l1 - std::f64::consts::PI).abs() < 1e-6, "l1 = {}", inv.l1);
        assert!((inv.l2 - 2.0).abs() < 1e-6, "l2 = {}", inv.l2);
        let dx = g.spacing();
        let expected_l3 = 2.0 / 3.0 + dx * dx / 12.0 * (14.0 / 15.0);
        assert!(
            (inv.l3 - expected_l3).abs() < 1e-7,
            "l3 = {}, sharpened expectation {}",
            inv.l3,
            expected_l3
        );
    }

    #[test]
    fn l3_bias_is_second_order() {
        let spec = ExactSolutionSpec::soliton(1.0).unwrap();
        let mut errors = Vec::new();
        for &n in &[1024usize, 2048, 4096] {
            let g = grid(40.0, n);
            let u = spec.sample(&g, 0.0);
            errors.push((discrete_invariants(&u, &g).l3 - 2.0 / 3.0).abs());
        }
        for w in errors.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!(slope > 1.9 && slope < 2.1, "errors {errors:?}");
        }
    }

    #[test]
    fn power_of_two_scaling_is_exact_and_l3_splits() {
        // scaling by powers of two commutes exactly with the sums; the two parts
        // of L3 scale as c^4 and c^2, which pins the split algebraically
        let g = grid(40.0, 512);
        let spec = ExactSolutionSpec::double_pole(1.0).unwrap();
        let u: Vec<f64> = spec.sample(&g, 1.0);
        let u2: Vec<f64> = u.iter().map(|v| 2.0 * v).collect();
        let u4: Vec<f64> = u.iter().map(|v| 4.0 * v).collect();
        let i1 = discrete_invariants(&u, &g);
        let i2 = discrete_invariants(&u2, &g);
        let i4 = discrete_invariants(&u4, &g);
        assert_eq!(i2.l1, 2.0 * i1.l1);
        assert_eq!(i2.l2, 4.0 * i1.l2);
        let quartic = (i2.l3 - 4.0 * i1.l3) / 12.0;
        let gradient = quartic - i1.l3;
        let predicted = 256.0 * quartic - 16.0 * gradient;
        let scale = (256.0 * quartic).abs().max((16.0 * gradient).abs());
        assert!(
            (i4.l3 - predicted).abs() <= 1e-12 * scale,
            "l3(4U) = {}, predicted {predicted}",
            i4.l3
        );
    }

    #[test]
    fn continuum_soliton_values() {
        let spec = ExactSolutionSpec::soliton(1.0).unwrap();
        let ci = continuum_invariants(&spec, 0.0, 1 << 14, 40.0).unwrap();
        assert!((ci.values.l1 - std::f64::consts::PI).abs() < 1e-8);
        assert!((ci.values.l2 - 2.0).abs() < 1e-8);
        assert!((ci.values.l3 - 2.0 / 3.0).abs() < 1e-8);
        assert!(!ci.domain_truncation_suspect());
    }

    #[test]
    fn continuum_double_pole_is_time_invariant() {
        // the humps sit near x = t at beta = 1, so the t = 50 evaluation needs a
        // wider quadrature domain than the solver's [-40, 40)
        let spec = ExactSolutionSpec::double_pole(1.0).unwrap();
        let a = continuum_invariants(&spec, 0.0, 1 << 15, 100.0).unwrap();
        let b = continuum_invariants(&spec, 50.0, 1 << 15, 100.0).unwrap();
        for (x, y) in a.values.as_array().iter().zip(b.values.as_array()) {
            assert!((x - y).abs() < 1e-6, "{:?} vs {:?}", a.values, b.values);
        }
        assert!(!b.domain_truncation_suspect());
        // the solver-sized domain truncates at t = 50 and must say so
        let c = continuum_invariants(&spec, 50.0, 1 << 15, 40.0).unwrap();
        assert!(c.domain_truncation_suspect());
    }

    #[test]
    fn drift_report_flags_l3_jump() {
        let mk = |l3: f64| InvariantTriple { l1: 1.0, l2: 2.0, l3 };
        let series = vec![mk(1.0), mk(1.001), mk(1.002), mk(0.7), mk(0.69)];
        let r = drift_report(&series, None);
        assert_eq!(r.l3_jump_index, Some(3));
        assert!((r.max_drift[2] - 0.31).abs() < 1e-12);
        assert_eq!(r.max_drift[0], 0.0);
        // tighter threshold trips earlier, looser not at all
        let tight = drift_report(&series, Some(0.0005));
        assert_eq!(tight.l3_jump_index, Some(1));
        let loose = drift_report(&series, Some(0.5));
        assert_eq!(loose.l3_jump_index, None);
    }

    #[test]
    fn drift_report_on_flat_series_is_quiet() {
        let mk = |l3: f64| InvariantTriple { l1: 0.0, l2: 0.0, l3 };
        let series = vec![mk(0.0); 10];
        let r = drift_report(&series, None);
        assert_eq!(r.l3_jump_index, None);
        assert_eq!(r.max_drift, [0.0; 3]);
        assert_eq!(drift_report(&[], None).l3_jump_index, None);
    }
}
