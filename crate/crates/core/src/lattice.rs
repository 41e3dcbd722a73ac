//! Discrete velocity sets and void-fraction quadrature stencils.
//!
//! The flow stencils are D1Q3, D2Q9 and D3Q27. Directions are ordered
//! rest first, then axis-aligned pairs, then diagonal pairs, with each
//! direction immediately followed by its opposite:
//!
//! ```text
//! D2Q9:  0:(0,0)  1:(1,0) 2:(-1,0) 3:(0,1) 4:(0,-1)
//!        5:(1,1)  6:(-1,-1) 7:(1,-1) 8:(-1,1)
//! ```
//!
//! so population dumps are comparable across implementations.
//!
//! The quadrature stencils (D1Q3, D2Q5, D3Q7) integrate the void fraction
//! over a cell using the rest point plus the 2d axis-aligned unit offsets;
//! diagonal offsets are not used. Their weights are not the velocity-set
//! weights: (1/2, 1/4) in 1D, (1/3, 1/6) in 2D and (1/6, 5/36) in 3D.

use crate::error::{Error, Result};
use crate::CS2;
use num_rational::Ratio;
use std::sync::OnceLock;

type Frac = Ratio<i64>;

/// An immutable discrete velocity set.
///
/// Velocities are integer vectors in lattice units (dx = dt = 1); the
/// trailing components of `xi` are zero when `dim < 3`. Weights are kept
/// both as exact rationals (for the moment identities) and as `f64` (for
/// the kernel).
#[derive(Debug)]
pub struct LatticeDescriptor {
    pub dim: usize,
    pub q: usize,
    pub xi: Vec<[i32; 3]>,
    pub xi_f: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub weights_exact: Vec<Frac>,
    /// Index of the direction opposite to each direction.
    pub opposite: Vec<usize>,
    pub cs2: f64,
}

impl LatticeDescriptor {
    fn new(dim: usize, dirs: Vec<([i32; 3], Frac)>) -> Self {
        let q = dirs.len();
        let xi: Vec<[i32; 3]> = dirs.iter().map(|(v, _)| *v).collect();
        let xi_f = xi
            .iter()
            .map(|v| [v[0] as f64, v[1] as f64, v[2] as f64])
            .collect();
        let weights_exact: Vec<Frac> = dirs.iter().map(|(_, w)| *w).collect();
        let weights = weights_exact
            .iter()
            .map(|w| *w.numer() as f64 / *w.denom() as f64)
            .collect();
        let opposite = (0..q)
            .map(|i| {
                let neg = [-xi[i][0], -xi[i][1], -xi[i][2]];
                xi.iter().position(|v| *v == neg).expect("opposite direction")
            })
            .collect();
        Self {
            dim,
            q,
            xi,
            xi_f,
            weights,
            weights_exact,
            opposite,
            cs2: CS2,
        }
    }
}

fn frac(n: i64, d: i64) -> Frac {
    Frac::new(n, d)
}

fn d1q3() -> LatticeDescriptor {
    // The third-order Gauss-Hermite rule on three abscissae: weights
    // (2/3, 1/6, 1/6) with cs^2 = 1/3.
    let dirs = vec![
        ([0, 0, 0], frac(2, 3)),
        ([1, 0, 0], frac(1, 6)),
        ([-1, 0, 0], frac(1, 6)),
    ];
    LatticeDescriptor::new(1, dirs)
}

fn d2q9() -> LatticeDescriptor {
    let mut dirs = vec![([0, 0, 0], frac(4, 9))];
    for &(x, y) in &[(1, 0), (0, 1)] {
        dirs.push(([x, y, 0], frac(1, 9)));
        dirs.push(([-x, -y, 0], frac(1, 9)));
    }
    for &(x, y) in &[(1, 1), (1, -1)] {
        dirs.push(([x, y, 0], frac(1, 36)));
        dirs.push(([-x, -y, 0], frac(1, 36)));
    }
    LatticeDescriptor::new(2, dirs)
}

fn d3q27() -> LatticeDescriptor {
    let mut dirs = vec![([0, 0, 0], frac(8, 27))];
    for &v in &[[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
        dirs.push((v, frac(2, 27)));
        dirs.push(([-v[0], -v[1], -v[2]], frac(2, 27)));
    }
    for &v in &[
        [1, 1, 0],
        [1, -1, 0],
        [1, 0, 1],
        [1, 0, -1],
        [0, 1, 1],
        [0, 1, -1],
    ] {
        dirs.push((v, frac(1, 54)));
        dirs.push(([-v[0], -v[1], -v[2]], frac(1, 54)));
    }
    for &v in &[[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]] {
        dirs.push((v, frac(1, 216)));
        dirs.push(([-v[0], -v[1], -v[2]], frac(1, 216)));
    }
    LatticeDescriptor::new(3, dirs)
}

/// Returns the flow stencil for the given spatial dimension:
/// D1Q3, D2Q9 or D3Q27.
pub fn make_lattice(dim: usize) -> Result<&'static LatticeDescriptor> {
    static D1: OnceLock<LatticeDescriptor> = OnceLock::new();
    static D2: OnceLock<LatticeDescriptor> = OnceLock::new();
    static D3: OnceLock<LatticeDescriptor> = OnceLock::new();
    match dim {
        1 => Ok(D1.get_or_init(d1q3)),
        2 => Ok(D2.get_or_init(d2q9)),
        3 => Ok(D3.get_or_init(d3q27)),
        _ => Err(Error::Config(format!(
            "unsupported lattice dimension {dim}, expected 1, 2 or 3"
        ))),
    }
}

/// Quadrature stencil for integrating the void fraction over a cell.
///
/// Holds the rest offset plus the `2 * dims` axis-aligned unit offsets.
/// The rule evaluates `sum_i w_i * phi(x - xi_i)`, which equals
/// `phi + w_side * lap_h(phi)` with `lap_h` the discrete Laplacian on the
/// same offsets.
#[derive(Debug)]
pub struct QuadratureDescriptor {
    /// Number of directions in which the void fraction varies.
    pub dims: usize,
    /// Point count: 3, 5 or 7.
    pub n_points: usize,
    pub offsets: Vec<[i32; 3]>,
    pub w_center: f64,
    pub w_side: f64,
    pub w_center_exact: Frac,
    pub w_side_exact: Frac,
}

/// Returns the quadrature stencil matching the number of directions in
/// which the void fraction varies: D1Q3, D2Q5 or D3Q7.
pub fn make_quadrature(variation_dims: usize) -> Result<&'static QuadratureDescriptor> {
    static Q1: OnceLock<QuadratureDescriptor> = OnceLock::new();
    static Q2: OnceLock<QuadratureDescriptor> = OnceLock::new();
    static Q3: OnceLock<QuadratureDescriptor> = OnceLock::new();
    let build = |dims: usize, w0: Frac, ws: Frac| {
        let mut offsets = vec![[0, 0, 0]];
        for axis in 0..dims {
            for sign in [1, -1] {
                let mut v = [0, 0, 0];
                v[axis] = sign;
                offsets.push(v);
            }
        }
        QuadratureDescriptor {
            dims,
            n_points: offsets.len(),
            offsets,
            w_center: *w0.numer() as f64 / *w0.denom() as f64,
            w_side: *ws.numer() as f64 / *ws.denom() as f64,
            w_center_exact: w0,
            w_side_exact: ws,
        }
    };
    match variation_dims {
        1 => Ok(Q1.get_or_init(|| build(1, frac(1, 2), frac(1, 4)))),
        2 => Ok(Q2.get_or_init(|| build(2, frac(1, 3), frac(1, 6)))),
        3 => Ok(Q3.get_or_init(|| build(3, frac(1, 6), frac(5, 36)))),
        _ => Err(Error::Config(format!(
            "unsupported void-fraction variation count {variation_dims}, expected 1, 2 or 3"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_moment_identities(lat: &LatticeDescriptor) {
        // Exact rational checks.
        let zero = frac(0, 1);
        let one = frac(1, 1);
        let cs2 = frac(1, 3);
        let sum: Frac = lat.weights_exact.iter().sum();
        assert_eq!(sum, one, "weights must sum to one");
        for a in 0..3 {
            let m1: Frac = (0..lat.q)
                .map(|i| lat.weights_exact[i] * frac(lat.xi[i][a] as i64, 1))
                .sum();
            assert_eq!(m1, zero, "first moment must vanish");
            for b in 0..3 {
                let m2: Frac = (0..lat.q)
                    .map(|i| {
                        lat.weights_exact[i] * frac((lat.xi[i][a] * lat.xi[i][b]) as i64, 1)
                    })
                    .sum();
                let expect = if a == b && a < lat.dim { cs2 } else { zero };
                assert_eq!(m2, expect, "second moment must be cs2 * delta");
                for c in 0..3 {
                    let m3: Frac = (0..lat.q)
                        .map(|i| {
                            lat.weights_exact[i]
                                * frac((lat.xi[i][a] * lat.xi[i][b] * lat.xi[i][c]) as i64, 1)
                        })
                        .sum();
                    assert_eq!(m3, zero, "third moment must vanish");
                }
            }
        }
        // Floating-point views agree with the identities to 1e-15.
        let w_sum: f64 = lat.weights.iter().sum();
        assert!((w_sum - 1.0).abs() <= 1e-15);
        for a in 0..3 {
            for b in 0..3 {
                let m2: f64 = (0..lat.q)
                    .map(|i| lat.weights[i] * lat.xi_f[i][a] * lat.xi_f[i][b])
                    .sum();
                let expect = if a == b && a < lat.dim { CS2 } else { 0.0 };
                assert!((m2 - expect).abs() <= 1e-15);
            }
        }
        // Every direction has its opposite, stored pairwise.
        for i in 0..lat.q {
            let j = lat.opposite[i];
            assert_eq!(lat.xi[j][0], -lat.xi[i][0]);
            assert_eq!(lat.xi[j][1], -lat.xi[i][1]);
            assert_eq!(lat.xi[j][2], -lat.xi[i][2]);
            assert_eq!(lat.opposite[j], i);
        }
    }

    #[test]
    fn d2q9_parameters() {
        let lat = make_lattice(2).unwrap();
        assert_eq!(lat.q, 9);
        assert_eq!(lat.weights_exact[0], frac(4, 9));
        for i in 1..5 {
            assert_eq!(lat.weights_exact[i], frac(1, 9));
            assert_eq!(lat.xi[i][0].abs() + lat.xi[i][1].abs(), 1);
        }
        for i in 5..9 {
            assert_eq!(lat.weights_exact[i], frac(1, 36));
            assert_eq!(lat.xi[i][0].abs() + lat.xi[i][1].abs(), 2);
        }
        assert_moment_identities(lat);
    }

    #[test]
    fn d3q27_parameters() {
        let lat = make_lattice(3).unwrap();
        assert_eq!(lat.q, 27);
        assert_eq!(lat.weights_exact[0], frac(8, 27));
        for i in 0..27 {
            let class: i32 = lat.xi[i].iter().map(|v| v.abs()).sum();
            let expect = match class {
                0 => frac(8, 27),
                1 => frac(2, 27),
                2 => frac(1, 54),
                3 => frac(1, 216),
                _ => unreachable!(),
            };
            assert_eq!(lat.weights_exact[i], expect);
        }
        assert_moment_identities(lat);
    }

    #[test]
    fn d1q3_parameters() {
        let lat = make_lattice(1).unwrap();
        assert_eq!(lat.q, 3);
        assert_eq!(lat.weights_exact[0], frac(2, 3));
        assert_eq!(lat.weights_exact[1], frac(1, 6));
        assert_eq!(lat.weights_exact[2], frac(1, 6));
        assert!((lat.cs2 - 1.0 / 3.0).abs() == 0.0);
        assert_moment_identities(lat);
    }

    #[test]
    fn unsupported_dimension_is_config_error() {
        assert!(matches!(make_lattice(0), Err(Error::Config(_))));
        assert!(matches!(make_lattice(4), Err(Error::Config(_))));
        assert!(matches!(make_quadrature(0), Err(Error::Config(_))));
        assert!(matches!(make_quadrature(4), Err(Error::Config(_))));
    }

    #[test]
    fn quadrature_weights_per_dimension() {
        let expect = [
            (1, 3, frac(1, 2), frac(1, 4)),
            (2, 5, frac(1, 3), frac(1, 6)),
            (3, 7, frac(1, 6), frac(5, 36)),
        ];
        for (dims, n, w0, ws) in expect {
            let q = make_quadrature(dims).unwrap();
            assert_eq!(q.n_points, n);
            assert_eq!(q.w_center_exact, w0);
            assert_eq!(q.w_side_exact, ws);
            // Uniform fields integrate to themselves: weights sum to one, exactly.
            let total = q.w_center_exact + frac((n - 1) as i64, 1) * q.w_side_exact;
            assert_eq!(total, frac(1, 1));
            // No diagonal offsets.
            for off in &q.offsets {
                assert!(off.iter().map(|v| v.abs()).sum::<i32>() <= 1);
            }
        }
    }

    #[test]
    fn quadrature_of_squared_radius_matches_laplacian_identity() {
        // phi(x) = |x|^2 on a unit-spaced grid has discrete Laplacian 2d,
        // so the rule must produce phi(c) + w_side * 2d, exactly (all values
        // are small integers scaled by dyadic weights except 1/3-family
        // weights, which still combine exactly here because the Laplacian
        // contribution is an integer).
        for dims in 1..=3 {
            let q = make_quadrature(dims).unwrap();
            let center = [3i32, -2, 1];
            let phi = |p: [i32; 3]| -> f64 {
                (0..dims).map(|a| (p[a] * p[a]) as f64).sum()
            };
            let mut acc = 0.0;
            for (k, off) in q.offsets.iter().enumerate() {
                let sample = [
                    center[0] - off[0],
                    center[1] - off[1],
                    center[2] - off[2],
                ];
                let w = if k == 0 { q.w_center } else { q.w_side };
                acc += w * phi(sample);
            }
            let expect = phi(center) + q.w_side * (2 * dims) as f64;
            assert!(
                (acc - expect).abs() <= 1e-13,
                "dims={dims}: {acc} vs {expect}"
            );
        }
    }
}
