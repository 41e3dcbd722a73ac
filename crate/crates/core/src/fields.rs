//! Periodic Cartesian grid storage and finite-difference stencil operators.
//!
//! Cells are addressed x-fastest: `idx = x + n * (y + n * z)`. The grid is
//! uniform with the same cell count per direction and is always periodic.
//! Inside the kernel all stencil arithmetic uses lattice units (dx = dt = 1);
//! the physical spacing is tracked by [`crate::analysis::UnitConverter`].

use crate::error::{Error, Result};
use crate::lattice::QuadratureDescriptor;

/// A uniform periodic Cartesian grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub dim: usize,
    /// Cells per direction.
    pub n: usize,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!("unsupported grid dimension {dim}")));
        }
        if n < 4 {
            return Err(Error::Config(format!(
                "grid needs at least 4 cells per direction, got {n}"
            )));
        }
        Ok(Self { dim, n })
    }

    /// Total cell count `n^dim`.
    pub fn cells(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Number of x-contiguous rows (`n^(dim-1)`).
    pub fn rows(&self) -> usize {
        self.n.pow(self.dim as u32 - 1)
    }

    pub fn index(&self, coords: [usize; 3]) -> usize {
        match self.dim {
            1 => coords[0],
            2 => coords[0] + self.n * coords[1],
            _ => coords[0] + self.n * (coords[1] + self.n * coords[2]),
        }
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        match self.dim {
            1 => [idx, 0, 0],
            2 => [idx % self.n, idx / self.n, 0],
            _ => [
                idx % self.n,
                (idx / self.n) % self.n,
                idx / (self.n * self.n),
            ],
        }
    }

    /// Periodic neighbor of cell `c` shifted by `offset` (components in
    /// {-1, 0, 1}): component-wise `(c + offset) mod n`.
    pub fn neighbor(&self, c: usize, offset: [i32; 3]) -> usize {
        let p = self.coords(c);
        let n = self.n as i32;
        let mut q = [0usize; 3];
        for a in 0..self.dim {
            q[a] = (p[a] as i32 + offset[a]).rem_euclid(n) as usize;
        }
        self.index(q)
    }
}

/// One value per cell.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            data: vec![0.0; grid.cells()],
        }
    }

    /// Mean value, accumulated relative to the first entry so that uniform
    /// fields produce their value exactly.
    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let pivot = self.data[0];
        let sum: f64 = self.data.iter().map(|v| v - pivot).sum();
        pivot + sum / self.data.len() as f64
    }
}

/// One d-vector per cell, stored as one array per component.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub comp: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            comp: vec![vec![0.0; grid.cells()]; grid.dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.comp.len()
    }

    pub fn at(&self, c: usize) -> [f64; 3] {
        let mut v = [0.0; 3];
        for (a, comp) in self.comp.iter().enumerate() {
            v[a] = comp[c];
        }
        v
    }
}

/// Per-cell populations on a double-buffered grid, stored per direction.
///
/// A step consumes `curr` and fills `next`, then the buffers are swapped.
#[derive(Debug)]
pub struct PopulationField {
    pub q: usize,
    pub cells: usize,
    pub curr: Vec<Vec<f64>>,
    pub next: Vec<Vec<f64>>,
}

impl PopulationField {
    pub fn zeros(grid: &Grid, q: usize) -> Self {
        let cells = grid.cells();
        Self {
            q,
            cells,
            curr: vec![vec![0.0; cells]; q],
            next: vec![vec![0.0; cells]; q],
        }
    }

    pub fn swap(&mut self) {
        std::mem::swap(&mut self.curr, &mut self.next);
    }

    /// Populations of one cell in direction order.
    pub fn cell(&self, c: usize) -> Vec<f64> {
        self.curr.iter().map(|f| f[c]).collect()
    }
}

/// Central-difference gradient of `phi` at cell `c` with spacing `dx`:
/// component `a` is `(phi(c + e_a) - phi(c - e_a)) / (2 dx)`.
pub fn central_gradient(phi: &ScalarField, grid: &Grid, c: usize, dx: f64) -> [f64; 3] {
    let mut g = [0.0; 3];
    for a in 0..grid.dim {
        let mut plus = [0i32; 3];
        plus[a] = 1;
        let mut minus = [0i32; 3];
        minus[a] = -1;
        let fp = phi.data[grid.neighbor(c, plus)];
        let fm = phi.data[grid.neighbor(c, minus)];
        g[a] = (fp - fm) / (2.0 * dx);
    }
    g
}

/// Quadrature rule `sum_i w_i * phi(c - xi_i)` over the stencil offsets.
///
/// Equals `(phi + w_side * lap_h(phi))(c)` where `lap_h` is the discrete
/// Laplacian on the same offsets; both evaluation routes are the same
/// linear stencil.
pub fn quadrature_integral(
    phi: &ScalarField,
    grid: &Grid,
    c: usize,
    quad: &QuadratureDescriptor,
) -> f64 {
    let mut acc = quad.w_center * phi.data[c];
    for off in &quad.offsets[1..] {
        let sample = grid.neighbor(c, [-off[0], -off[1], -off[2]]);
        acc += quad.w_side * phi.data[sample];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_quadrature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn neighbor_wraps_periodically() {
        let g = Grid::new(2, 8).unwrap();
        let c = g.index([0, 0, 0]);
        assert_eq!(g.neighbor(c, [-1, 0, 0]), g.index([7, 0, 0]));
        let c = g.index([7, 3, 0]);
        assert_eq!(g.neighbor(c, [1, 1, 0]), g.index([0, 4, 0]));
        for c in 0..g.cells() {
            assert_eq!(g.neighbor(c, [0, 0, 0]), c);
        }
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(matches!(Grid::new(0, 8), Err(Error::Config(_))));
        assert!(matches!(Grid::new(4, 8), Err(Error::Config(_))));
        assert!(matches!(Grid::new(2, 3), Err(Error::Config(_))));
    }

    #[test]
    fn index_coords_roundtrip() {
        for dim in 1..=3 {
            let g = Grid::new(dim, 5).unwrap();
            for c in 0..g.cells() {
                assert_eq!(g.index(g.coords(c)), c);
            }
        }
    }

    #[test]
    fn central_gradient_examples() {
        let g = Grid::new(2, 8).unwrap();
        let mut phi = ScalarField::zeros(&g);
        let c = g.index([4, 4, 0]);
        phi.data[g.neighbor(c, [1, 0, 0])] = 0.8;
        phi.data[g.neighbor(c, [-1, 0, 0])] = 0.2;
        let grad = central_gradient(&phi, &g, c, 1.0);
        assert!((grad[0] - 0.3).abs() <= 1e-15);

        // Constant field has zero gradient, exactly.
        let constant = ScalarField {
            data: vec![0.7; g.cells()],
        };
        for c in 0..g.cells() {
            assert_eq!(central_gradient(&constant, &g, c, 1.0), [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn central_gradient_exact_on_affine_fields() {
        // phi = a + b*x with dyadic coefficients: interior differences are
        // exact in floating point, so the slope is recovered exactly.
        let g = Grid::new(1, 16).unwrap();
        let (a, b) = (0.5, 0.25);
        let phi = ScalarField {
            data: (0..16).map(|x| a + b * x as f64).collect(),
        };
        for x in 1..15 {
            let grad = central_gradient(&phi, &g, x, 1.0);
            assert_eq!(grad[0], b);
        }
    }

    #[test]
    fn gradient_of_periodic_field_telescopes_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in 1..=3 {
            let g = Grid::new(dim, 8).unwrap();
            let phi = ScalarField {
                data: (0..g.cells()).map(|_| rng.gen_range(0.0..1.0)).collect(),
            };
            for a in 0..dim {
                let total: f64 = (0..g.cells())
                    .map(|c| central_gradient(&phi, &g, c, 1.0)[a])
                    .sum();
                assert!(total.abs() <= 1e-12, "dim {dim} axis {a}: {total}");
            }
        }
    }

    #[test]
    fn quadrature_examples() {
        // Uniform field integrates to itself.
        let g = Grid::new(2, 8).unwrap();
        let q = make_quadrature(2).unwrap();
        let phi = ScalarField {
            data: vec![0.6; g.cells()],
        };
        for c in 0..g.cells() {
            assert!((quadrature_integral(&phi, &g, c, q) - 0.6).abs() <= 1e-15);
        }

        // 1D neighborhood (0.2, 0.5, 0.9): weighted sum gives 0.525 and the
        // Laplacian form agrees.
        let g = Grid::new(1, 8).unwrap();
        let q = make_quadrature(1).unwrap();
        let mut phi = ScalarField::zeros(&g);
        phi.data[3] = 0.2;
        phi.data[4] = 0.5;
        phi.data[5] = 0.9;
        let direct = quadrature_integral(&phi, &g, 4, q);
        assert!((direct - 0.525).abs() <= 1e-15);
        let lap = 0.2 + 0.9 - 2.0 * 0.5;
        let via_identity = 0.5 + 0.25 * lap;
        assert!((direct - via_identity).abs() <= 1e-15);
    }

    #[test]
    fn quadrature_weighted_sum_matches_laplacian_form_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dims in 1..=3usize {
            let g = Grid::new(dims, 6).unwrap();
            let q = make_quadrature(dims).unwrap();
            let phi = ScalarField {
                data: (0..g.cells()).map(|_| rng.gen_range(0.1..0.9)).collect(),
            };
            for c in 0..g.cells() {
                let direct = quadrature_integral(&phi, &g, c, q);
                let mut lap = -2.0 * dims as f64 * phi.data[c];
                for off in &q.offsets[1..] {
                    lap += phi.data[g.neighbor(c, *off)];
                }
                let identity = phi.data[c] + q.w_side * lap;
                assert!(
                    (direct - identity).abs() <= 1e-15,
                    "dims {dims} cell {c}: {direct} vs {identity}"
                );
            }
        }
    }

    #[test]
    fn population_field_swap() {
        let g = Grid::new(2, 4).unwrap();
        let mut pop = PopulationField::zeros(&g, 9);
        pop.curr[3][5] = 1.5;
        pop.swap();
        assert_eq!(pop.next[3][5], 1.5);
        assert_eq!(pop.curr[3][5], 0.0);
    }
}
