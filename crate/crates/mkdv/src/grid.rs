//! Uniform periodic grid on `[-L, L)`.
//!
//! All solvers and diagnostics share this discretisation: `N` nodes
//! `x_n = -L + n*dx` with spacing `dx = 2L/N`. The right endpoint is excluded;
//! periodic wrap-around identifies `x_N` with `x_0`.

use crate::error::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid {
    half_length: f64,
    node_count: usize,
    spacing: f64,
    nodes: Vec<f64>,
}

impl PeriodicGrid {
    /// Builds the grid. `half_length` is `L`; `node_count` must be even and at
    /// least 4 so the widest difference stencil (5 points) fits without
    /// self-overlap after one wrap.
    pub fn new(half_length: f64, node_count: usize) -> Result<Self, Error> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive and finite, got {half_length}"
            )));
        }
        if node_count < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 nodes, got {node_count}"
            )));
        }
        if node_count % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "node count must be even, got {node_count}"
            )));
        }
        let spacing = 2.0 * half_length / node_count as f64;
        let nodes = (0..node_count)
            .map(|n| -half_length + n as f64 * spacing)
            .collect();
        Ok(Self {
            half_length,
            node_count,
            spacing,
            nodes,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, n: usize) -> f64 {
        self.nodes[n]
    }

    /// Periodic index reduction into `0..node_count`.
    pub fn wrap(&self, n: i64) -> usize {
        wrap_index(n, self.node_count)
    }

    /// Shortest signed distance from `a` to `b` under periodic identification.
    pub fn periodic_distance(&self, a: f64, b: f64) -> f64 {
        let period = 2.0 * self.half_length;
        let mut d = (b - a) % period;
        if d > self.half_length {
            d -= period;
        } else if d < -self.half_length {
            d += period;
        }
        d
    }
}

/// `n mod node_count` with a nonnegative result, also for negative `n`.
pub fn wrap_index(n: i64, node_count: usize) -> usize {
    let m = node_count as i64;
    (((n % m) + m) % m) as usize
}
