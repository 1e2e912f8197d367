//! Circulant difference operators on the periodic grid.
//!
//! All operators are represented by their stencil, a list of
//! `(offset, coefficient)` pairs applied with periodic index wrap; the stencil
//! is the first row of the corresponding circulant matrix read at offsets
//! `j - i`. Corner entries of the matrix picture are exactly the wrapped
//! stencil taps, so no separate boundary handling exists anywhere.
//!
//! Identities the schemes rely on (checked in tests):
//! `D1_MINUS = -transpose(D1_PLUS)`, `D2_CENTRAL = D1_PLUS D1_MINUS` (symmetric),
//! `D3_CENTRAL = D1_CENTRAL D2_CENTRAL` (antisymmetric, applied literally as
//! that composition).

use crate::error::Error;
use crate::grid::PeriodicGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    D1Plus,
    D1Minus,
    D1Central,
    D2Central,
    D3Central,
}

#[derive(Debug, Clone)]
pub struct FdOperator {
    kind: OperatorKind,
    node_count: usize,
    spacing: f64,
    stencil: Vec<(i64, f64)>,
}

impl FdOperator {
    pub fn new(kind: OperatorKind, grid: &PeriodicGrid) -> Result<Self, Error> {
        let n = grid.node_count();
        let dx = grid.spacing();
        if kind == OperatorKind::D3Central && n < 5 {
            return Err(Error::InvalidScheme(format!(
                "third-derivative stencil spans 5 nodes, grid has {n}"
            )));
        }
        let stencil = match kind {
            OperatorKind::D1Plus => vec![(0, -1.0 / dx), (1, 1.0 / dx)],
            OperatorKind::D1Minus => vec![(-1, -1.0 / dx), (0, 1.0 / dx)],
            OperatorKind::D1Central => vec![(-1, -0.5 / dx), (1, 0.5 / dx)],
            OperatorKind::D2Central => {
                let s = 1.0 / (dx * dx);
                vec![(-1, s), (0, -2.0 * s), (1, s)]
            }
            OperatorKind::D3Central => {
                let s = 1.0 / (dx * dx * dx);
                vec![(-2, -0.5 * s), (-1, s), (1, -s), (2, 0.5 * s)]
            }
        };
        Ok(Self {
            kind,
            node_count: n,
            spacing: dx,
            stencil,
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Fused stencil coefficients, sufficient to reconstruct the dense matrix.
    pub fn stencil(&self) -> &[(i64, f64)] {
        &self.stencil
    }

    /// Applies the operator. The third derivative is computed literally as
    /// `D1_CENTRAL(D2_CENTRAL(u))` so the composition identity holds bitwise.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.node_count);
        assert_eq!(out.len(), self.node_count);
        if self.kind == OperatorKind::D3Central {
            let dx = self.spacing;
            let mut tmp = vec![0.0; self.node_count];
            apply_stencil(
                &[(-1, 1.0 / (dx * dx)), (0, -2.0 / (dx * dx)), (1, 1.0 / (dx * dx))],
                u,
                &mut tmp,
            );
            apply_stencil(&[(-1, -0.5 / dx), (1, 0.5 / dx)], &tmp, out);
        } else {
            apply_stencil(&self.stencil, u, out);
        }
    }

    pub fn apply_vec(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.node_count];
        self.apply(u, &mut out);
        out
    }

    /// Dense circulant reconstruction from the stencil, row by row.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.node_count;
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for &(off, c) in &self.stencil {
                m[i][crate::grid::wrap_index(i as i64 + off, n)] += c;
            }
        }
        m
    }

    /// Circulant eigenvalues `lambda_j = sum_k c_k exp(2 pi i j k / N)` in DFT
    /// bin order, used to diagonalize shifted solves.
    pub fn eigenvalues(&self) -> Vec<num_complex::Complex<f64>> {
        let n = self.node_count;
        (0..n)
            .map(|j| {
                let mut acc = num_complex::Complex::new(0.0, 0.0);
                for &(off, c) in &self.stencil {
                    let ang = 2.0 * std::f64::consts::PI * j as f64 * off as f64 / n as f64;
                    acc += num_complex::Complex::new(ang.cos(), ang.sin()) * c;
                }
                acc
            })
            .collect()
    }
}

fn apply_stencil(stencil: &[(i64, f64)], u: &[f64], out: &mut [f64]) {
    let n = u.len();
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(off, c) in stencil {
            acc += c * u[crate::grid::wrap_index(i as i64 + off, n)];
        }
        *o = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [OperatorKind; 5] = [
        OperatorKind::D1Plus,
        OperatorKind::D1Minus,
        OperatorKind::D1Central,
        OperatorKind::D2Central,
        OperatorKind::D3Central,
    ];

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(40.0, n).unwrap()
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

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn constants_are_annihilated() {
        let g = grid(64);
        let c = vec![1.37; 64];
        for kind in ALL {
            let op = FdOperator::new(kind, &g).unwrap();
            let out = op.apply_vec(&c);
            for v in out {
                assert_eq!(v, 0.0, "{kind:?} does not kill constants");
            }
        }
    }

    #[test]
    fn first_derivative_is_second_order() {
        let f = |x: f64| (std::f64::consts::PI * x / 40.0).sin();
        let fp = |x: f64| (std::f64::consts::PI / 40.0) * (std::f64::consts::PI * x / 40.0).cos();
        let mut errs = Vec::new();
        for &n in &[128usize, 256, 512] {
            let g = grid(n);
            let op = FdOperator::new(OperatorKind::D1Central, &g).unwrap();
            let u: Vec<f64> = g.nodes().iter().map(|&x| f(x)).collect();
            let d = op.apply_vec(&u);
            let err = g
                .nodes()
                .iter()
                .zip(&d)
                .map(|(&x, &v)| (v - fp(x)).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((1.9..2.1).contains(&slope), "errors {errs:?}");
        }
    }

    #[test]
    fn symmetry_structure() {
        let g = grid(128);
        let u = rand_field(128, 0xDEADBEEF);
        let v = rand_field(128, 0xC0FFEE11);
        let scale = 128.0 / g.spacing().powi(3);
        let d1c = FdOperator::new(OperatorKind::D1Central, &g).unwrap();
        let d2 = FdOperator::new(OperatorKind::D2Central, &g).unwrap();
        let d3 = FdOperator::new(OperatorKind::D3Central, &g).unwrap();
        // antisymmetric: <A u, v> = -<u, A v>
        for op in [&d1c, &d3] {
            let lhs = dot(&op.apply_vec(&u), &v);
            let rhs = dot(&u, &op.apply_vec(&v));
            assert!(
                (lhs + rhs).abs() <= 1e-12 * scale,
                "{:?} not antisymmetric: {lhs} vs {rhs}",
                op.kind()
            );
        }
        // symmetric: <A u, v> = <u, A v>
        let lhs = dot(&d2.apply_vec(&u), &v);
        let rhs = dot(&u, &d2.apply_vec(&v));
        assert!((lhs - rhs).abs() <= 1e-12 * scale);
        // D1_MINUS = -transpose(D1_PLUS)
        let dp = FdOperator::new(OperatorKind::D1Plus, &g).unwrap();
        let dm = FdOperator::new(OperatorKind::D1Minus, &g).unwrap();
        let lhs = dot(&dp.apply_vec(&u), &v);
        let rhs = dot(&u, &dm.apply_vec(&v));
        assert!((lhs + rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn third_derivative_is_composition_bitwise() {
        let g = grid(96);
        let u = rand_field(96, 0x12345678);
        let d3 = FdOperator::new(OperatorKind::D3Central, &g).unwrap();
        let d2 = FdOperator::new(OperatorKind::D2Central, &g).unwrap();
        let d1c = FdOperator::new(OperatorKind::D1Central, &g).unwrap();
        let composed = d1c.apply_vec(&d2.apply_vec(&u));
        assert_eq!(d3.apply_vec(&u), composed);
    }

    #[test]
    fn second_derivative_is_plus_minus_product() {
        let g = grid(96);
        let u = rand_field(96, 0x87654321);
        let d2 = FdOperator::new(OperatorKind::D2Central, &g).unwrap();
        let dp = FdOperator::new(OperatorKind::D1Plus, &g).unwrap();
        let dm = FdOperator::new(OperatorKind::D1Minus, &g).unwrap();
        let fused = d2.apply_vec(&u);
        let composed = dp.apply_vec(&dm.apply_vec(&u));
        let scale = 1.0 / g.spacing().powi(2);
        for (a, b) in fused.iter().zip(&composed) {
            assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn dense_reconstruction_matches_application() {
        let g = PeriodicGrid::new(3.0, 8).unwrap();
        let u = rand_field(8, 0xABCDEF01);
        for kind in ALL {
            let op = FdOperator::new(kind, &g).unwrap();
            let m = op.to_dense();
            let direct = op.apply_vec(&u);
            for i in 0..8 {
                let mv: f64 = (0..8).map(|j| m[i][j] * u[j]).sum();
                assert!(
                    (mv - direct[i]).abs() <= 1e-12 / g.spacing().powi(3),
                    "{kind:?} row {i}: {mv} vs {}",
                    direct[i]
                );
            }
        }
    }

    #[test]
    fn dense_corners_wrap() {
        let g = PeriodicGrid::new(3.0, 6).unwrap();
        let dx = g.spacing();
        let dp = FdOperator::new(OperatorKind::D1Plus, &g).unwrap().to_dense();
        // last row wraps to the first column
        assert_eq!(dp[5][0], 1.0 / dx);
        assert_eq!(dp[5][5], -1.0 / dx);
        assert_eq!(dp[0][1], 1.0 / dx);
    }

    #[test]
    fn eigenvalues_match_dense_action_on_fourier_vector() {
        use num_complex::Complex;
        let g = grid(32);
        let op = FdOperator::new(OperatorKind::D3Central, &g).unwrap();
        let eig = op.eigenvalues();
        let n = 32;
        for j in [1usize, 5, 16] {
            // complex exponential vector, applied through the real stencil twice
            let re: Vec<f64> = (0..n)
                .map(|k| (2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64).cos())
                .collect();
            let im: Vec<f64> = (0..n)
                .map(|k| (2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64).sin())
                .collect();
            let are = op.apply_vec(&re);
            let aim = op.apply_vec(&im);
            for k in 0..n {
                let v = Complex::new(re[k], im[k]);
                let av = Complex::new(are[k], aim[k]);
                let diff = (av - eig[j] * v).norm();
                assert!(diff <= 1e-9, "bin {j} node {k}: residual {diff}");
            }
        }
    }

    #[test]
    fn tiny_grid_rejected_for_third_derivative() {
        let g = PeriodicGrid::new(1.0, 4).unwrap();
        assert!(FdOperator::new(OperatorKind::D3Central, &g).is_err());
        assert!(FdOperator::new(OperatorKind::D1Central, &g).is_ok());
    }
}
