//! Pseudospectral discretization on the periodic grid.
//!
//! Coefficients follow the interpolant `u(x) = sum_j c_j exp(i w_j x)` with
//! `w_j = pi j / L` and signed indices `j in [-N/2, N/2)` stored in DFT bin
//! order. Because the first node sits at `x = -L` rather than 0, the
//! coefficients pick up the alternating phase `(-1)^j` relative to a raw DFT:
//! `c_j = (-1)^j DFT_j / N`. A real cosine `cos(w_1 x)` therefore lands on
//! `c_{+1} = c_{-1} = 1/2` with no sign flip.
//!
//! Odd-order derivatives zero the unpaired Nyquist mode, which keeps real
//! fields real and freezes that mode under the flow; for resolved data it
//! carries no content.
//!
//! The time stepper is implicit midpoint with the cubic term evaluated
//! pseudospectrally at the state average (cube of the average). The linear
//! dispersion is inverted exactly bin by bin, so the fixed point iterates
//! only on the nonlinearity; in the linear limit one step is the Cayley
//! rotation `(1 + i dt w^3/2) / (1 - i dt w^3/2)` per bin.

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::Error;
use crate::grid::PeriodicGrid;

type C64 = Complex<f64>;

pub struct SpectralTransform {
    grid: PeriodicGrid,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    /// Signed frequency `pi j / L` per bin.
    omega: Vec<f64>,
    /// Same, with the Nyquist bin zeroed; used for odd derivative orders.
    omega_odd: Vec<f64>,
}

impl SpectralTransform {
    pub fn new(grid: &PeriodicGrid) -> Result<Self, Error> {
        let n = grid.node_count();
        if !n.is_power_of_two() {
            return Err(Error::InvalidScheme(format!(
                "spectral transform needs a power-of-two node count, got {n}"
            )));
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let half = (n / 2) as i64;
        let omega: Vec<f64> = (0..n)
            .map(|bin| {
                let j = signed_index_for(bin, n);
                std::f64::consts::PI * j as f64 / grid.half_length()
            })
            .collect();
        let mut omega_odd = omega.clone();
        omega_odd[half as usize] = 0.0;
        Ok(Self {
            grid: grid.clone(),
            fft,
            ifft,
            omega,
            omega_odd,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn node_count(&self) -> usize {
        self.grid.node_count()
    }

    /// Signed mode index of a DFT bin: `bin` for the lower half, `bin - N`
    /// for the upper half.
    pub fn signed_index(&self, bin: usize) -> i64 {
        signed_index_for(bin, self.grid.node_count())
    }

    /// Bin holding signed mode `j`.
    pub fn bin_for(&self, j: i64) -> usize {
        let n = self.grid.node_count() as i64;
        let half = n / 2;
        assert!(
            (-half..half).contains(&j),
            "mode {j} outside [-{half}, {half})"
        );
        crate::grid::wrap_index(j, self.grid.node_count())
    }

    pub fn frequency(&self, bin: usize) -> f64 {
        self.omega[bin]
    }

    /// Interpolant coefficients of physical samples, bin order.
    pub fn forward(&self, u: &[f64]) -> Vec<C64> {
        let n = self.node_count();
        assert_eq!(u.len(), n);
        let mut buf: Vec<C64> = u.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.fft.process(&mut buf);
        let scale = 1.0 / n as f64;
        for (bin, c) in buf.iter_mut().enumerate() {
            let sign = if bin % 2 == 0 { scale } else { -scale };
            *c *= sign;
        }
        buf
    }

    /// Physical samples of the interpolant (real part; the imaginary part of
    /// a conjugate-symmetric spectrum is rounding noise).
    pub fn inverse(&self, coeffs: &[C64]) -> Vec<f64> {
        let n = self.node_count();
        assert_eq!(coeffs.len(), n);
        let mut buf: Vec<C64> = coeffs
            .iter()
            .enumerate()
            .map(|(bin, &c)| if bin % 2 == 0 { c } else { -c })
            .collect();
        self.ifft.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    /// Coefficients of the `order`-th spectral derivative. Odd orders zero
    /// the Nyquist mode.
    pub fn derivative(&self, coeffs: &[C64], order: u32) -> Vec<C64> {
        let n = self.node_count();
        assert_eq!(coeffs.len(), n);
        let omega = if order % 2 == 1 {
            &self.omega_odd
        } else {
            &self.omega
        };
        coeffs
            .iter()
            .zip(omega)
            .map(|(&c, &w)| c * C64::new(0.0, w).powu(order))
            .collect()
    }
}

fn signed_index_for(bin: usize, n: usize) -> i64 {
    let half = n / 2;
    if bin < half {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

#[derive(Debug, Clone)]
pub struct SpectralSchemeConfig {
    pub dt: f64,
    /// Fixed-point stop: max modulus of successive coefficient differences.
    pub fp_tol: f64,
    pub fp_max_iter: u32,
    /// Two-thirds truncation of the cubic term's spectrum. Off by default;
    /// the invariant-preserving behavior does not rely on it.
    pub dealias: bool,
}

impl SpectralSchemeConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            fp_tol: 1e-12,
            fp_max_iter: 100,
            dealias: false,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidScheme(format!(
                "time step must be positive and finite, got {}",
                self.dt
            )));
        }
        if !(self.fp_tol.is_finite() && self.fp_tol > 0.0) {
            return Err(Error::InvalidScheme(format!(
                "fixed-point tolerance must be positive, got {}",
                self.fp_tol
            )));
        }
        if self.fp_max_iter == 0 {
            return Err(Error::InvalidScheme(
                "fixed-point iteration cap must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralStepInfo {
    pub fp_iters: u32,
    pub converged: bool,
}

pub struct SpectralSolver {
    transform: SpectralTransform,
    config: SpectralSchemeConfig,
    /// `1 + i dt w^3 / 2` per bin (Nyquist zeroed with the odd-order rule).
    cayley_num: Vec<C64>,
    /// `1 - i dt w^3 / 2` per bin.
    cayley_den: Vec<C64>,
    /// 1 inside the kept band, 0 outside; all ones when dealiasing is off.
    dealias_mask: Vec<f64>,
}

impl SpectralSolver {
    pub fn new(grid: &PeriodicGrid, config: SpectralSchemeConfig) -> Result<Self, Error> {
        config.validate()?;
        let transform = SpectralTransform::new(grid)?;
        let n = grid.node_count();
        let mut cayley_num = Vec::with_capacity(n);
        let mut cayley_den = Vec::with_capacity(n);
        for bin in 0..n {
            let w = transform.omega_odd[bin];
            let half_angle = 0.5 * config.dt * w * w * w;
            cayley_num.push(C64::new(1.0, half_angle));
            cayley_den.push(C64::new(1.0, -half_angle));
        }
        let keep = n as i64 / 3;
        let dealias_mask: Vec<f64> = (0..n)
            .map(|bin| {
                if !config.dealias || signed_index_for(bin, n).abs() <= keep {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Self {
            transform,
            config,
            cayley_num,
            cayley_den,
            dealias_mask,
        })
    }

    pub fn transform(&self) -> &SpectralTransform {
        &self.transform
    }

    pub fn config(&self) -> &SpectralSchemeConfig {
        &self.config
    }

    /// Semi-discrete right-hand side in coefficient space:
    /// `i w^3 c - 2 i w F[(IF c)^3]`, with the odd-order Nyquist rule on both
    /// terms and optional dealiasing of the cubic spectrum.
    pub fn rhs(&self, coeffs: &[C64]) -> Vec<C64> {
        let cubic = self.cubic_spectrum(coeffs);
        let n = self.transform.node_count();
        (0..n)
            .map(|bin| {
                let w = self.transform.omega_odd[bin];
                let lin = C64::new(0.0, w * w * w) * coeffs[bin];
                let nl = C64::new(0.0, -2.0 * w) * cubic[bin];
                lin + nl
            })
            .collect()
    }

    fn cubic_spectrum(&self, coeffs: &[C64]) -> Vec<C64> {
        let u = self.transform.inverse(coeffs);
        let cubes: Vec<f64> = u.iter().map(|&v| v * v * v).collect();
        let mut out = self.transform.forward(&cubes);
        for (c, &m) in out.iter_mut().zip(&self.dealias_mask) {
            *c *= m;
        }
        out
    }

    /// One implicit midpoint step in coefficient space.
    pub fn step(&self, coeffs: &[C64]) -> (Vec<C64>, SpectralStepInfo) {
        let n = self.transform.node_count();
        assert_eq!(coeffs.len(), n);
        let dt = self.config.dt;
        // exact Cayley part of the update, fixed over the iteration
        let lin: Vec<C64> = (0..n)
            .map(|bin| coeffs[bin] * self.cayley_num[bin] / self.cayley_den[bin])
            .collect();
        let mut w: Vec<C64> = coeffs.to_vec();
        let mut fp_iters = 0;
        let mut converged = false;
        while fp_iters < self.config.fp_max_iter {
            fp_iters += 1;
            let mid: Vec<C64> = coeffs
                .iter()
                .zip(&w)
                .map(|(&a, &b)| (a + b) * 0.5)
                .collect();
            let cubic = self.cubic_spectrum(&mid);
            let mut diff = 0.0f64;
            let mut w_next = Vec::with_capacity(n);
            for bin in 0..n {
                let omega = self.transform.omega_odd[bin];
                let nl = C64::new(0.0, -2.0 * dt * omega) * cubic[bin];
                let next = lin[bin] + nl / self.cayley_den[bin];
                diff = diff.max((next - w[bin]).norm());
                w_next.push(next);
            }
            w = w_next;
            if diff <= self.config.fp_tol {
                converged = true;
                break;
            }
        }
        (w, SpectralStepInfo { fp_iters, converged })
    }

    /// Coefficients of physical initial data.
    pub fn initial_coefficients(&self, u0: &[f64]) -> Vec<C64> {
        self.transform.forward(u0)
    }

    /// Physical samples of a coefficient state.
    pub fn physical_state(&self, coeffs: &[C64]) -> Vec<f64> {
        self.transform.inverse(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactSolutionSpec;
    use crate::invariants::discrete_invariants;

    const L: f64 = 40.0;

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(L, n).unwrap()
    }

    fn rand_field(n: usize, seed: u64) -> Vec<f64> {
        let mut state = seed;
        (0..n)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn rejects_non_power_of_two() {
        let g = PeriodicGrid::new(L, 48).unwrap();
        assert!(SpectralTransform::new(&g).is_err());
        assert!(SpectralTransform::new(&grid(64)).is_ok());
    }

    #[test]
    fn cosine_lands_on_plus_half_in_both_bins() {
        let g = grid(64);
        let t = SpectralTransform::new(&g).unwrap();
        let u: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| (std::f64::consts::PI * x / L).cos())
            .collect();
        let c = t.forward(&u);
        let plus = c[t.bin_for(1)];
        let minus = c[t.bin_for(-1)];
        assert!((plus - C64::new(0.5, 0.0)).norm() <= 1e-13, "c(+1) = {plus}");
        assert!(
            (minus - C64::new(0.5, 0.0)).norm() <= 1e-13,
            "c(-1) = {minus}"
        );
        for bin in 0..64 {
            if bin == t.bin_for(1) || bin == t.bin_for(-1) {
                continue;
            }
            assert!(c[bin].norm() <= 1e-13, "stray content in bin {bin}");
        }
    }

    #[test]
    fn signed_index_layout() {
        let t = SpectralTransform::new(&grid(8)).unwrap();
        let indices: Vec<i64> = (0..8).map(|b| t.signed_index(b)).collect();
        assert_eq!(indices, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(t.bin_for(-1), 7);
        assert_eq!(t.bin_for(3), 3);
        assert_eq!(t.bin_for(-4), 4);
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid(256);
        let t = SpectralTransform::new(&g).unwrap();
        let u = rand_field(256, 0xF00D);
        let back = t.inverse(&t.forward(&u));
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn forward_matches_direct_summation() {
        let g = grid(128);
        let t = SpectralTransform::new(&g).unwrap();
        let u = rand_field(128, 0xBEEF);
        let fast = t.forward(&u);
        let n = 128usize;
        for bin in 0..n {
            let j = t.signed_index(bin);
            let mut acc = C64::new(0.0, 0.0);
            for (k, &v) in u.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / n as f64;
                acc += C64::new(ang.cos(), ang.sin()) * v;
            }
            let sign = if (j.rem_euclid(2)) == 0 { 1.0 } else { -1.0 };
            let direct = acc * sign / n as f64;
            assert!(
                (fast[bin] - direct).norm() <= 1e-11,
                "bin {bin}: {} vs {direct}",
                fast[bin]
            );
        }
    }

    #[test]
    fn derivative_matches_analytic_sine() {
        let g = grid(128);
        let t = SpectralTransform::new(&g).unwrap();
        let w2 = 2.0 * std::f64::consts::PI / L;
        let u: Vec<f64> = g.nodes().iter().map(|&x| (w2 * x).sin()).collect();
        let d1 = t.inverse(&t.derivative(&t.forward(&u), 1));
        let d3 = t.inverse(&t.derivative(&t.forward(&u), 3));
        for (i, &x) in g.nodes().iter().enumerate() {
            let expect1 = w2 * (w2 * x).cos();
            let expect3 = -w2.powi(3) * (w2 * x).cos();
            assert!((d1[i] - expect1).abs() <= 1e-10, "first derivative at {x}");
            assert!((d3[i] - expect3).abs() <= 1e-10, "third derivative at {x}");
        }
    }

    #[test]
    fn odd_derivatives_kill_the_nyquist_mode() {
        let g = grid(32);
        let t = SpectralTransform::new(&g).unwrap();
        // pure Nyquist content alternates sign at the nodes
        let u: Vec<f64> = (0..32).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let c = t.forward(&u);
        let d1 = t.derivative(&c, 1);
        assert!(d1.iter().all(|v| v.norm() == 0.0), "odd order keeps Nyquist");
        let d2 = t.derivative(&c, 2);
        let nyq = t.bin_for(-16);
        assert!(d2[nyq].norm() > 0.0, "even order should keep Nyquist");
    }

    #[test]
    fn parseval_identity() {
        let g = grid(256);
        let t = SpectralTransform::new(&g).unwrap();
        let u = rand_field(256, 0xCAFE);
        let c = t.forward(&u);
        let physical: f64 = g.spacing() * u.iter().map(|&v| v * v).sum::<f64>();
        let spectral: f64 = 2.0 * L * c.iter().map(|v| v.norm_sqr()).sum::<f64>();
        assert!(
            (physical - spectral).abs() <= 1e-12 * physical.abs().max(1.0),
            "{physical} vs {spectral}"
        );
    }

    #[test]
    fn rhs_mean_mode_is_exactly_zero() {
        let g = grid(128);
        let solver = SpectralSolver::new(&g, SpectralSchemeConfig::new(1e-3)).unwrap();
        let u = rand_field(128, 0xABBA);
        let rhs = solver.rhs(&solver.initial_coefficients(&u));
        assert_eq!(rhs[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn linear_limit_is_the_cayley_rotation() {
        let g = grid(64);
        let dt = 1e-3;
        let solver = SpectralSolver::new(&g, SpectralSchemeConfig::new(dt)).unwrap();
        let t = solver.transform();
        // tiny amplitude makes the cubic term negligible
        let u: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| {
                1e-9 * ((std::f64::consts::PI * x / L).cos()
                    + 0.5 * (3.0 * std::f64::consts::PI * x / L).sin())
            })
            .collect();
        let c0 = solver.initial_coefficients(&u);
        let (c1, info) = solver.step(&c0);
        assert!(info.converged);
        for bin in 0..64 {
            if c0[bin].norm() < 1e-15 {
                continue;
            }
            let w = t.frequency(bin);
            let half_angle = 0.5 * dt * w * w * w;
            let expect = c0[bin] * C64::new(1.0, half_angle) / C64::new(1.0, -half_angle);
            let rel = (c1[bin] - expect).norm() / expect.norm();
            assert!(rel <= 1e-6, "bin {bin}: relative deviation {rel}");
        }
    }

    #[test]
    fn band_limited_step_conserves_squared_sum_to_rounding() {
        // modes up to N/8 keep the quartic pairing alias-free, so one step
        // moves the squared sum only at rounding level
        let g = grid(256);
        let t = SpectralTransform::new(&g).unwrap();
        let mut c0 = vec![C64::new(0.0, 0.0); 256];
        for j in 1..=32i64 {
            let amp = 0.3 / j as f64;
            c0[t.bin_for(j)] = C64::new(amp, 0.2 * amp);
            c0[t.bin_for(-j)] = C64::new(amp, -0.2 * amp);
        }
        let mut config = SpectralSchemeConfig::new(1e-3);
        config.fp_tol = 1e-14;
        let solver = SpectralSolver::new(&g, config).unwrap();
        let (c1, info) = solver.step(&c0);
        assert!(info.converged);
        let before: f64 = c0.iter().map(|v| v.norm_sqr()).sum();
        let after: f64 = c1.iter().map(|v| v.norm_sqr()).sum();
        assert!(
            (after - before).abs() <= 1e-12 * before,
            "squared sum moved: {before} -> {after}"
        );
    }

    #[test]
    fn resolved_soliton_step_conserves_squared_sum() {
        let g = grid(512);
        let spec = ExactSolutionSpec::soliton(1.0).unwrap();
        let u0 = spec.sample(&g, 0.0);
        let mut config = SpectralSchemeConfig::new(1e-3);
        config.fp_tol = 1e-14;
        let solver = SpectralSolver::new(&g, config).unwrap();
        let c0 = solver.initial_coefficients(&u0);
        let (c1, info) = solver.step(&c0);
        assert!(info.converged);
        let before = discrete_invariants(&u0, &g).l2;
        let after = discrete_invariants(&solver.physical_state(&c1), &g).l2;
        assert!(
            (after - before).abs() <= 1e-12,
            "squared sum drifted {before} -> {after}"
        );
    }

    #[test]
    fn short_run_tracks_the_soliton_spectrally() {
        let g = grid(512);
        let dt = 1e-3;
        let spec = ExactSolutionSpec::soliton(1.0).unwrap();
        let solver = SpectralSolver::new(&g, SpectralSchemeConfig::new(dt)).unwrap();
        let mut c = solver.initial_coefficients(&spec.sample(&g, 0.0));
        let steps = 100;
        for _ in 0..steps {
            let (next, info) = solver.step(&c);
            assert!(info.converged);
            c = next;
        }
        let numeric = solver.physical_state(&c);
        let exact = spec.sample(&g, dt * steps as f64);
        let err = numeric
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        // spatial error is spectrally small; the O(dt^2) phase error of the
        // midpoint rule dominates
        assert!(err <= 1e-6, "error after {steps} steps: {err}");
    }

    #[test]
    fn dealias_mask_truncates_the_cubic_band() {
        let g = grid(64);
        let mut config = SpectralSchemeConfig::new(1e-3);
        config.dealias = true;
        let solver = SpectralSolver::new(&g, config).unwrap();
        let t = solver.transform();
        let u = rand_field(64, 0xD0D0);
        let rhs = solver.rhs(&solver.initial_coefficients(&u));
        let c = solver.initial_coefficients(&u);
        // outside the kept band the rhs must be purely dispersive
        for bin in 0..64 {
            let j = t.signed_index(bin);
            if j.abs() <= 64 / 3 || j == -32 {
                continue;
            }
            let w = t.frequency(bin);
            let lin = C64::new(0.0, w * w * w) * c[bin];
            assert!(
                (rhs[bin] - lin).norm() <= 1e-14,
                "mode {j} retains cubic content after dealiasing"
            );
        }
    }

    #[test]
    fn rejects_degenerate_configs() {
        let g = grid(64);
        assert!(SpectralSolver::new(&g, SpectralSchemeConfig::new(0.0)).is_err());
        let mut bad = SpectralSchemeConfig::new(1e-3);
        bad.fp_max_iter = 0;
        assert!(SpectralSolver::new(&g, bad).is_err());
    }
}
