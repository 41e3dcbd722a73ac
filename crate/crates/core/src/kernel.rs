//! The consistent VANSE lattice Boltzmann scheme: equilibrium, moments,
//! Guo forcing with pressure correction, BGK collision and streaming.
//!
//! A step runs the pipeline
//!
//! 1. void fraction `phi(., t)` evaluated on the grid (by the caller),
//! 2. `grad phi` by central differences and the cell volume integral `Phi`
//!    by quadrature,
//! 3. effective density `rho = m0 / Phi`, pressure correction force
//!    `F_pc = rho * cs2 * grad phi`, total force, velocity with the
//!    half-step force shift,
//! 4. BGK collision with the equilibrium built from the zeroth population
//!    moment, plus the Guo forcing term,
//! 5. streaming with periodic wrap and a buffer swap.
//!
//! The collision arithmetic is fixed (64-bit floats, accumulation in
//! direction-index order) so that trajectories are bitwise reproducible
//! for any worker count. The normative per-direction update is
//!
//! ```text
//! t1   = xi . u                    t2  = xi . (pref * F)
//! feq  = w * m0 * ((1 - 1.5 u.u) + 3 t1 + 4.5 t1^2)
//! omg  = w * (3 t2 - 3 * (u . pref * F) + 9 t1 t2)
//! f   <- f + (feq - f) * (dt / tau) + omg
//! ```
//!
//! with `pref = 1 - dt / (2 tau)` and the velocity evaluated as
//! `u = m1 * (1/m0) + 0.5 * F * (1/m0)`.

use crate::error::{Error, Result};
use crate::fields::{Grid, PopulationField, ScalarField, VectorField, quadrature_integral};
use crate::lattice::{make_quadrature, LatticeDescriptor, QuadratureDescriptor};
use crate::CS2;
use rayon::prelude::*;

/// Scheme variant: the consistent scheme integrates the void fraction over
/// the cell (quadrature) when forming the effective density; the legacy
/// comparison variant divides by the local void fraction instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeVariant {
    Consistent,
    Legacy,
}

impl SchemeVariant {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeVariant::Consistent => "consistent",
            SchemeVariant::Legacy => "legacy",
        }
    }
}

/// Collision parameters. `dt` is 1 in lattice units.
#[derive(Debug, Clone, Copy)]
pub struct SchemeConfig {
    pub tau: f64,
    pub dt: f64,
    pub variant: SchemeVariant,
    /// Number of directions in which the void fraction varies; selects the
    /// quadrature stencil (D1Q3, D2Q5 or D3Q7).
    pub variation_dims: usize,
}

impl SchemeConfig {
    pub fn new(tau: f64, variant: SchemeVariant, variation_dims: usize) -> Result<Self> {
        if !(tau > 0.5) {
            return Err(Error::Config(format!(
                "relaxation time must exceed 0.5 for positive viscosity, got {tau}"
            )));
        }
        if !(1..=3).contains(&variation_dims) {
            return Err(Error::Config(format!(
                "variation_dims must be 1, 2 or 3, got {variation_dims}"
            )));
        }
        Ok(Self {
            tau,
            dt: 1.0,
            variant,
            variation_dims,
        })
    }

    /// Kinematic viscosity in lattice units, `(tau - dt/2) * cs2`.
    pub fn nu_lattice(&self) -> f64 {
        (self.tau - 0.5 * self.dt) * CS2
    }

    pub fn quadrature(&self) -> &'static QuadratureDescriptor {
        make_quadrature(self.variation_dims).expect("validated at construction")
    }
}

/// Second-order truncated Maxwell equilibrium with the zeroth moment `m0`
/// in place of the density-void product:
/// `w_i m0 (1 + xi.u/cs2 + ((xi.u)^2 - cs2 |u|^2) / (2 cs4))`.
pub fn equilibrium(i: usize, m0: f64, u: [f64; 3], lat: &LatticeDescriptor) -> f64 {
    let xi = lat.xi_f[i];
    let t1 = xi[0] * u[0] + xi[1] * u[1] + xi[2] * u[2];
    let uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    lat.weights[i] * m0 * (1.0 + t1 / CS2 + (t1 * t1 - CS2 * uu) / (2.0 * CS2 * CS2))
}

/// Guo forcing term
/// `(1 - dt/(2 tau)) w_i (xi/cs2 + ((xi.u) xi - cs2 u)/cs4) . F`.
pub fn guo_forcing_term(
    i: usize,
    u: [f64; 3],
    force: [f64; 3],
    cfg: &SchemeConfig,
    lat: &LatticeDescriptor,
) -> f64 {
    let xi = lat.xi_f[i];
    let pref = 1.0 - cfg.dt / (2.0 * cfg.tau);
    let t1 = xi[0] * u[0] + xi[1] * u[1] + xi[2] * u[2];
    let xif = xi[0] * force[0] + xi[1] * force[1] + xi[2] * force[2];
    let uf = u[0] * force[0] + u[1] * force[1] + u[2] * force[2];
    pref * lat.weights[i] * (xif / CS2 + (t1 * xif - CS2 * uf) / (CS2 * CS2))
}

/// Pressure correction force `rho * cs2 * grad phi` (lattice units).
pub fn pressure_correction_force(rho: f64, grad_phi: [f64; 3]) -> [f64; 3] {
    [
        rho * CS2 * grad_phi[0],
        rho * CS2 * grad_phi[1],
        rho * CS2 * grad_phi[2],
    ]
}

/// Effective density and velocity from one cell's populations:
/// `rho = m0 / Phi` and `u = m1/m0 + (dt/2) F/m0`.
///
/// `step` and `cell` only feed the breakdown diagnostics.
pub fn macro_from_populations(
    f: &[f64],
    cap_phi: f64,
    force: [f64; 3],
    cfg: &SchemeConfig,
    lat: &LatticeDescriptor,
    step: u64,
    cell: usize,
) -> Result<(f64, [f64; 3])> {
    let mut m0 = 0.0;
    let mut m1 = [0.0; 3];
    for i in 0..lat.q {
        m0 += f[i];
        m1[0] += lat.xi_f[i][0] * f[i];
        m1[1] += lat.xi_f[i][1] * f[i];
        m1[2] += lat.xi_f[i][2] * f[i];
    }
    if !(m0 > 0.0) || !m0.is_finite() || !(cap_phi > 0.0) {
        return Err(Error::NumericalBreakdown {
            step,
            cell,
            detail: format!("zeroth moment {m0}, cell volume integral {cap_phi}"),
        });
    }
    let rho = m0 / cap_phi;
    let half_dt = 0.5 * cfg.dt;
    let u = [
        m1[0] / m0 + half_dt * force[0] / m0,
        m1[1] / m0 + half_dt * force[1] / m0,
        m1[2] / m0 + half_dt * force[2] / m0,
    ];
    Ok((rho, u))
}

/// Cell volume integral of the void fraction: quadrature for the
/// consistent variant, the local value for the legacy variant.
pub fn cell_void_integral(
    phi: &ScalarField,
    grid: &Grid,
    c: usize,
    cfg: &SchemeConfig,
) -> f64 {
    match cfg.variant {
        SchemeVariant::Consistent => quadrature_integral(phi, grid, c, cfg.quadrature()),
        SchemeVariant::Legacy => phi.data[c],
    }
}

/// Analytic equilibrium moments for a given zeroth moment and velocity.
///
/// `m2` carries the full second-rank tensor; `m3_diag` holds the fully
/// diagonal third-moment components `m0 * u_a` (the off-diagonal components
/// of the discrete third moment carry additional `cs2`-symmetrized terms
/// and are checked separately in tests).
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumMoments {
    pub m0: f64,
    pub m1: [f64; 3],
    pub m2: [[f64; 3]; 3],
    pub m3_diag: [f64; 3],
}

pub fn equilibrium_moments(m0: f64, u: [f64; 3], lat: &LatticeDescriptor) -> EquilibriumMoments {
    let mut m2 = [[0.0; 3]; 3];
    for a in 0..lat.dim {
        for b in 0..lat.dim {
            m2[a][b] = m0 * u[a] * u[b];
        }
        m2[a][a] += m0 * CS2;
    }
    EquilibriumMoments {
        m0,
        m1: [m0 * u[0], m0 * u[1], m0 * u[2]],
        m2,
        m3_diag: [m0 * u[0], m0 * u[1], m0 * u[2]],
    }
}

/// Outcome of population initialization.
#[derive(Debug, Clone, Copy)]
pub struct InitReport {
    /// Cells with a void fraction below 0.01 (outside the validated regime).
    pub near_vacuum_cells: usize,
}

/// Seeds the populations at equilibrium: `f_i = equilibrium(i, rho0 *
/// moment(c), u(c))`, where `moment` is the void-fraction weight assigned
/// to the cell (the local value or its cell integral, depending on the
/// caller's density definition). From the first step onward the zeroth
/// moment comes from the populations themselves.
pub fn initialize_populations(
    pop: &mut PopulationField,
    grid: &Grid,
    lat: &LatticeDescriptor,
    moment: &ScalarField,
    u_lat: &VectorField,
    rho0: f64,
) -> Result<InitReport> {
    let mut near_vacuum = 0usize;
    for c in 0..grid.cells() {
        let p = moment.data[c];
        if !(p > 0.0) {
            return Err(Error::Config(format!(
                "void fraction must be positive everywhere, got {p} at cell {c}"
            )));
        }
        if p < 0.01 {
            near_vacuum += 1;
        }
        let u = u_lat.at(c);
        for i in 0..lat.q {
            pop.curr[i][c] = equilibrium(i, rho0 * p, u, lat);
        }
    }
    Ok(InitReport {
        near_vacuum_cells: near_vacuum,
    })
}

/// Everything a step needs besides the populations. `force_ext` is the
/// external (manufactured) force density in lattice units; the pressure
/// correction force is assembled internally from `phi`.
pub struct StepContext<'a> {
    pub grid: &'a Grid,
    pub lat: &'a LatticeDescriptor,
    pub cfg: &'a SchemeConfig,
    pub phi: &'a ScalarField,
    pub force_ext: &'a VectorField,
    pub step: u64,
}

/// Grids smaller than this run the sweeps serially; the per-cell results do
/// not depend on the choice.
pub const PARALLEL_THRESHOLD: usize = 2048;

/// One lattice Boltzmann step: fused macro evaluation and in-place BGK
/// collision with forcing, then streaming into the next buffer and a swap.
pub fn collide_and_stream(
    pop: &mut PopulationField,
    ctx: &StepContext,
    pool: Option<&rayon::ThreadPool>,
) -> Result<()> {
    debug_assert_eq!(pop.q, ctx.lat.q);
    debug_assert_eq!(pop.cells, ctx.grid.cells());
    collide_in_place(pop, ctx, pool)?;
    stream(pop, ctx, pool);
    pop.swap();
    Ok(())
}

/// Scans all populations for non-finite values. Used at sampling cadence;
/// cheaper per-cell breakdown checks run every step inside the collision.
pub fn scan_populations(pop: &PopulationField, step: u64) -> Result<()> {
    for (i, dir) in pop.curr.iter().enumerate() {
        for (c, &v) in dir.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NumericalBreakdown {
                    step,
                    cell: c,
                    detail: format!("population {i} is {v}"),
                });
            }
        }
    }
    Ok(())
}

struct PassParams {
    n: usize,
    omega: f64,
    pref: f64,
    w0q: f64,
    wsq: f64,
    variation_dims: usize,
    consistent: bool,
}

fn collide_in_place(
    pop: &mut PopulationField,
    ctx: &StepContext,
    pool: Option<&rayon::ThreadPool>,
) -> Result<()> {
    let grid = ctx.grid;
    let n = grid.n;
    let quad = ctx.cfg.quadrature();
    let params = PassParams {
        n,
        omega: ctx.cfg.dt / ctx.cfg.tau,
        pref: 1.0 - ctx.cfg.dt / (2.0 * ctx.cfg.tau),
        w0q: quad.w_center,
        wsq: quad.w_side,
        variation_dims: ctx.cfg.variation_dims,
        consistent: ctx.cfg.variant == SchemeVariant::Consistent,
    };
    let bad = match (grid.dim, ctx.lat.q) {
        (1, 3) => run_collide::<1, 3>(pop, ctx, &params, pool),
        (2, 9) => run_collide::<2, 9>(pop, ctx, &params, pool),
        (3, 27) => run_collide::<3, 27>(pop, ctx, &params, pool),
        (d, q) => {
            return Err(Error::Config(format!(
                "no kernel for dimension {d} with {q} directions"
            )))
        }
    };
    match bad {
        None => Ok(()),
        Some(cell) => Err(Error::NumericalBreakdown {
            step: ctx.step,
            cell,
            detail: "non-positive or non-finite zeroth moment or cell volume integral".into(),
        }),
    }
}

fn run_collide<const D: usize, const Q: usize>(
    pop: &mut PopulationField,
    ctx: &StepContext,
    params: &PassParams,
    pool: Option<&rayon::ThreadPool>,
) -> Option<usize> {
    let n = ctx.grid.n;
    let rows = ctx.grid.rows();
    let mut xi = [[0.0f64; 3]; Q];
    let mut w = [0.0f64; Q];
    for i in 0..Q {
        xi[i] = ctx.lat.xi_f[i];
        w[i] = ctx.lat.weights[i];
    }
    let phi = ctx.phi.data.as_slice();
    let mut fext: [&[f64]; 3] = [&[], &[], &[]];
    for a in 0..D {
        fext[a] = ctx.force_ext.comp[a].as_slice();
    }

    let parallel = pool.is_some() && pop.cells >= PARALLEL_THRESHOLD;
    if !parallel {
        let mut dirs: Vec<&mut [f64]> = pop.curr.iter_mut().map(|v| v.as_mut_slice()).collect();
        return collide_rows::<D, Q>(&mut dirs, 0, rows, phi, &fext, &xi, &w, params);
    }

    let pool = pool.unwrap();
    let threads = pool.current_num_threads().max(1);
    let rows_per_chunk = rows.div_ceil(threads * 4).max(1);
    // Split every direction buffer at the same row boundaries so each chunk
    // owns a disjoint cell range across all directions.
    let mut chunks: Vec<(usize, Vec<&mut [f64]>)> = Vec::new();
    let mut remaining: Vec<&mut [f64]> = pop.curr.iter_mut().map(|v| v.as_mut_slice()).collect();
    let mut row0 = 0;
    while row0 < rows {
        let take = rows_per_chunk.min(rows - row0);
        let mut head = Vec::with_capacity(Q);
        let mut tail = Vec::with_capacity(Q);
        for slice in remaining.drain(..) {
            let (h, t) = slice.split_at_mut(take * n);
            head.push(h);
            tail.push(t);
        }
        remaining = tail;
        chunks.push((row0, head));
        row0 += take;
    }
    pool.install(|| {
        chunks
            .into_par_iter()
            .map(|(row0, mut dirs)| {
                let chunk_rows = dirs[0].len() / params.n;
                collide_rows::<D, Q>(
                    &mut dirs, row0, chunk_rows, phi, &fext, &xi, &w, &xp, &xm, params,
                )
            })
            .reduce(|| None, |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            })
    })
}

/// One cell: moments, effective density, total force, velocity, then BGK
/// collision with forcing, written back in place. `rowv` holds the current
/// row of every direction buffer; all slices have length n so the indexing
/// stays check-free in the hot loop.
#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn update_cell<const D: usize, const Q: usize>(
    rowv: &mut [&mut [f64]; Q],
    x: usize,
    phic: f64,
    pxp: f64,
    pxm: f64,
    pyp: f64,
    pym: f64,
    pzp: f64,
    pzm: f64,
    fe: [f64; 3],
    xi: &[[f64; 3]; Q],
    w: &[f64; Q],
    p: &PassParams,
    bad: &mut Option<usize>,
    ca: usize,
) {
    // Zeroth and first moments, accumulated in direction order.
    let mut m0 = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    let mut mz = 0.0;
    for i in 0..Q {
        let fi = rowv[i][x];
        m0 += fi;
        mx += xi[i][0] * fi;
        if D >= 2 {
            my += xi[i][1] * fi;
        }
        if D >= 3 {
            mz += xi[i][2] * fi;
        }
    }

    let gx = 0.5 * (pxp - pxm);
    let gy = if D >= 2 { 0.5 * (pyp - pym) } else { 0.0 };
    let gz = if D >= 3 { 0.5 * (pzp - pzm) } else { 0.0 };

    let cap = if p.consistent {
        let mut acc = p.w0q * phic + p.wsq * (pxm + pxp);
        if p.variation_dims >= 2 {
            acc += p.wsq * (pym + pyp);
        }
        if p.variation_dims >= 3 {
            acc += p.wsq * (pzm + pzp);
        }
        acc
    } else {
        phic
    };

    let rho = m0 / cap;
    if !(m0 > 0.0 && cap > 0.0) || !rho.is_finite() {
        if bad.is_none() {
            *bad = Some(ca);
        }
    }

    let fx = fe[0] + rho * CS2 * gx;
    let fy = if D >= 2 { fe[1] + rho * CS2 * gy } else { 0.0 };
    let fz = if D >= 3 { fe[2] + rho * CS2 * gz } else { 0.0 };

    let inv_m0 = 1.0 / m0;
    let ux = mx * inv_m0 + 0.5 * fx * inv_m0;
    let uy = if D >= 2 { my * inv_m0 + 0.5 * fy * inv_m0 } else { 0.0 };
    let uz = if D >= 3 { mz * inv_m0 + 0.5 * fz * inv_m0 } else { 0.0 };

    let uu = match D {
        1 => ux * ux,
        2 => ux * ux + uy * uy,
        _ => ux * ux + uy * uy + uz * uz,
    };
    let base = 1.0 - 1.5 * uu;
    let fpx = p.pref * fx;
    let fpy = p.pref * fy;
    let fpz = p.pref * fz;
    let ufp = match D {
        1 => ux * fpx,
        2 => ux * fpx + uy * fpy,
        _ => ux * fpx + uy * fpy + uz * fpz,
    };

    for i in 0..Q {
        let t1 = match D {
            1 => xi[i][0] * ux,
            2 => xi[i][0] * ux + xi[i][1] * uy,
            _ => xi[i][0] * ux + xi[i][1] * uy + xi[i][2] * uz,
        };
        let t2 = match D {
            1 => xi[i][0] * fpx,
            2 => xi[i][0] * fpx + xi[i][1] * fpy,
            _ => xi[i][0] * fpx + xi[i][1] * fpy + xi[i][2] * fpz,
        };
        let feq = w[i] * m0 * (base + 3.0 * t1 + 4.5 * t1 * t1);
        let omg = w[i] * (3.0 * t2 - 3.0 * ufp + 9.0 * t1 * t2);
        let fi = rowv[i][x];
        rowv[i][x] = fi + (feq - fi) * p.omega + omg;
    }
}

/// Macro evaluation plus in-place collision for a contiguous row range.
/// Returns the lowest cell index with a broken state, if any.
#[allow(clippy::too_many_arguments)]
fn collide_rows<const D: usize, const Q: usize>(
    dirs: &mut [&mut [f64]],
    row0: usize,
    rows: usize,
    phi: &[f64],
    fext: &[&[f64]; 3],
    xi: &[[f64; 3]; Q],
    w: &[f64; Q],
    p: &PassParams,
) -> Option<usize> {
    let n = p.n;
    let dirs: &mut [&mut [f64]; Q] = dirs.try_into().expect("direction count");
    let mut bad: Option<usize> = None;
    for r in 0..rows {
        let abs_row = row0 + r;
        let (y, z) = (abs_row % n, abs_row / n);
        let base = r * n;
        let abs_base = abs_row * n;
        let phi_row = &phi[abs_base..abs_base + n];
        let (phi_yp, phi_ym) = if D >= 2 {
            let yp = if y + 1 == n { 0 } else { y + 1 };
            let ym = if y == 0 { n - 1 } else { y - 1 };
            (
                &phi[(yp + n * z) * n..(yp + n * z) * n + n],
                &phi[(ym + n * z) * n..(ym + n * z) * n + n],
            )
        } else {
            (phi_row, phi_row)
        };
        let (phi_zp, phi_zm) = if D >= 3 {
            let zp = if z + 1 == n { 0 } else { z + 1 };
            let zm = if z == 0 { n - 1 } else { z - 1 };
            (
                &phi[(y + n * zp) * n..(y + n * zp) * n + n],
                &phi[(y + n * zm) * n..(y + n * zm) * n + n],
            )
        } else {
            (phi_row, phi_row)
        };
        let fx_row = &fext[0][abs_base..abs_base + n];
        let fy_row = if D >= 2 {
            &fext[1][abs_base..abs_base + n]
        } else {
            fx_row
        };
        let fz_row = if D >= 3 {
            &fext[2][abs_base..abs_base + n]
        } else {
            fx_row
        };
        let mut rowv: [&mut [f64]; Q] = dirs.each_mut().map(|s| &mut s[base..base + n]);

        let fe_at = |x: usize| -> [f64; 3] {
            [
                fx_row[x],
                if D >= 2 { fy_row[x] } else { 0.0 },
                if D >= 3 { fz_row[x] } else { 0.0 },
            ]
        };

        update_cell::<D, Q>(
            &mut rowv,
            0,
            phi_row[0],
            phi_row[1],
            phi_row[n - 1],
            phi_yp[0],
            phi_ym[0],
            phi_zp[0],
            phi_zm[0],
            fe_at(0),
            xi,
            w,
            p,
            &mut bad,
            abs_base,
        );
        for x in 1..n - 1 {
            update_cell::<D, Q>(
                &mut rowv,
                x,
                phi_row[x],
                phi_row[x + 1],
                phi_row[x - 1],
                phi_yp[x],
                phi_ym[x],
                phi_zp[x],
                phi_zm[x],
                fe_at(x),
                xi,
                w,
                p,
                &mut bad,
                abs_base + x,
            );
        }
        update_cell::<D, Q>(
            &mut rowv,
            n - 1,
            phi_row[n - 1],
            phi_row[0],
            phi_row[n - 2],
            phi_yp[n - 1],
            phi_ym[n - 1],
            phi_zp[n - 1],
            phi_zm[n - 1],
            fe_at(n - 1),
            xi,
            w,
            p,
            &mut bad,
            abs_base + n - 1,
        );
    }
    bad
}

/// Streaming: `next(c + xi_i, i) = curr(c, i)` with periodic wrap,
/// implemented as row rotations (pure copies, hence a permutation of the
/// population values).
fn stream(pop: &mut PopulationField, ctx: &StepContext, pool: Option<&rayon::ThreadPool>) {
    let grid = ctx.grid;
    let n = grid.n;
    let rows = grid.rows();
    let lat = ctx.lat;

    let run_dir = |i: usize, curr: &Vec<f64>, next: &mut Vec<f64>| {
        let off = lat.xi[i];
        let ni = n as i32;
        for tr in 0..rows {
            let (y, z) = (tr % n, tr / n);
            let sy = if grid.dim >= 2 {
                (y as i32 - off[1]).rem_euclid(ni) as usize
            } else {
                y
            };
            let sz = if grid.dim >= 3 {
                (z as i32 - off[2]).rem_euclid(ni) as usize
            } else {
                z
            };
            let sr = sy + n * sz;
            let dst = &mut next[tr * n..tr * n + n];
            let src = &curr[sr * n..sr * n + n];
            match off[0] {
                0 => dst.copy_from_slice(src),
                1 => {
                    dst[1..].copy_from_slice(&src[..n - 1]);
                    dst[0] = src[n - 1];
                }
                _ => {
                    dst[..n - 1].copy_from_slice(&src[1..]);
                    dst[n - 1] = src[0];
                }
            }
        }
    };

    let parallel = pool.is_some() && pop.cells >= PARALLEL_THRESHOLD;
    if parallel {
        let pool = pool.unwrap();
        pool.install(|| {
            pop.curr
                .par_iter()
                .zip(pop.next.par_iter_mut())
                .enumerate()
                .for_each(|(i, (curr, next))| run_dir(i, curr, next));
        });
    } else {
        for (i, (curr, next)) in pop.curr.iter().zip(pop.next.iter_mut()).enumerate() {
            run_dir(i, curr, next);
        }
    }
}

/// Sum of all populations over the whole grid, in fixed order (direction
/// major, then cell). Used by conservation checks.
pub fn global_mass(pop: &PopulationField) -> f64 {
    let mut total = 0.0;
    for dir in &pop.curr {
        for &v in dir {
            total += v;
        }
    }
    total
}
