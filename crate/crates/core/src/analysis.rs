//! Error norms against analytic solutions, steady-state detection,
//! experimental orders of convergence and unit conversion.

use crate::error::{Error, Result};
use crate::CS2;
use std::fmt;

/// Reference physical setup shared by all validation cases: a periodic box
/// of 2 m per direction, unit density and a kinematic viscosity of 0.1.
pub const DOMAIN_LENGTH: f64 = 2.0;
pub const NU_PHYS: f64 = 0.1;
pub const RHO_PHYS: f64 = 1.0;

/// Conversion factors between physical and lattice unit systems under
/// diffusive scaling (dt ~ dx^2 with the relaxation time held fixed).
#[derive(Debug, Clone, Copy)]
pub struct UnitConverter {
    pub n: usize,
    pub tau: f64,
    /// Physical cell spacing (m).
    pub dx: f64,
    /// Physical time step (s).
    pub dt: f64,
    /// Physical density (kg/m^3).
    pub rho: f64,
    /// Velocity factor dx/dt (m/s per lattice unit).
    pub c_u: f64,
    /// Viscosity factor dx^2/dt.
    pub c_nu: f64,
    /// Pressure factor rho * (dx/dt)^2.
    pub c_p: f64,
    /// Force density factor rho * dx/dt^2.
    pub c_f: f64,
}

/// Builds the converter for `n` cells per direction at relaxation time
/// `tau`: `dx = 2/n` and `dt = (tau - 1/2) cs2 dx^2 / nu`.
pub fn make_converter(n: usize, tau: f64) -> Result<UnitConverter> {
    if n < 4 {
        return Err(Error::Config(format!("resolution must be at least 4, got {n}")));
    }
    if !(tau > 0.5) {
        return Err(Error::Config(format!(
            "relaxation time must exceed 0.5, got {tau}"
        )));
    }
    let dx = DOMAIN_LENGTH / n as f64;
    let nu_lat = (tau - 0.5) * CS2;
    let dt = nu_lat * dx * dx / NU_PHYS;
    let c_u = dx / dt;
    Ok(UnitConverter {
        n,
        tau,
        dx,
        dt,
        rho: RHO_PHYS,
        c_u,
        c_nu: dx * dx / dt,
        c_p: RHO_PHYS * c_u * c_u,
        c_f: RHO_PHYS * dx / (dt * dt),
    })
}

impl UnitConverter {
    pub fn velocity_to_lattice(&self, v: f64) -> f64 {
        v / self.c_u
    }
    pub fn velocity_to_physical(&self, v: f64) -> f64 {
        v * self.c_u
    }
    pub fn force_to_lattice(&self, f: f64) -> f64 {
        f / self.c_f
    }
    pub fn force_to_physical(&self, f: f64) -> f64 {
        f * self.c_f
    }
    pub fn pressure_to_physical(&self, p: f64) -> f64 {
        p * self.c_p
    }
    pub fn pressure_to_lattice(&self, p: f64) -> f64 {
        p / self.c_p
    }
}

/// Nodal L1 (mean absolute), L2 (root mean square) and Linf (maximum)
/// deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl Norms {
    pub fn get(&self, norm: NormKind) -> f64 {
        match norm {
            NormKind::L1 => self.l1,
            NormKind::L2 => self.l2,
            NormKind::Linf => self.linf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::Linf];

    pub fn name(&self) -> &'static str {
        match self {
            NormKind::L1 => "L1",
            NormKind::L2 => "L2",
            NormKind::Linf => "Linf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Velocity,
    Pressure,
}

impl Quantity {
    pub const ALL: [Quantity; 2] = [Quantity::Velocity, Quantity::Pressure];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Velocity => "velocity",
            Quantity::Pressure => "pressure",
        }
    }
}

/// Nodal error norms between a simulated and an exact scalar field.
pub fn error_norms(sim: &[f64], exact: &[f64]) -> Result<Norms> {
    if sim.len() != exact.len() || sim.is_empty() {
        return Err(Error::Usage(format!(
            "field shapes do not match: {} vs {}",
            sim.len(),
            exact.len()
        )));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut max = 0.0f64;
    for (s, e) in sim.iter().zip(exact) {
        let d = (s - e).abs();
        sum += d;
        sum_sq += d * d;
        max = max.max(d);
    }
    let count = sim.len() as f64;
    Ok(Norms {
        l1: sum / count,
        l2: (sum_sq / count).sqrt(),
        linf: max,
    })
}

/// Nodal error norms for a vector quantity; the per-node deviation is the
/// Euclidean norm of the component differences.
pub fn error_norms_vec(sim: &[&[f64]], exact: &[&[f64]]) -> Result<Norms> {
    if sim.len() != exact.len() || sim.is_empty() {
        return Err(Error::Usage("component counts do not match".into()));
    }
    let cells = sim[0].len();
    for comp in sim.iter().chain(exact.iter()) {
        if comp.len() != cells || cells == 0 {
            return Err(Error::Usage("field shapes do not match".into()));
        }
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut max = 0.0f64;
    for c in 0..cells {
        let mut dev_sq = 0.0;
        for (s, e) in sim.iter().zip(exact) {
            let d = s[c] - e[c];
            dev_sq += d * d;
        }
        let dev = dev_sq.sqrt();
        sum += dev;
        sum_sq += dev_sq;
        max = max.max(dev);
    }
    let count = cells as f64;
    Ok(Norms {
        l1: sum / count,
        l2: (sum_sq / count).sqrt(),
        linf: max,
    })
}

/// Experimental order of convergence `log(e_coarse/e_fine) / log(ratio)`.
/// Returns `None` when either error is non-positive (undefined order).
pub fn eoc(e_coarse: f64, e_fine: f64, ratio: f64) -> Option<f64> {
    if !(e_coarse > 0.0) || !(e_fine > 0.0) || !(ratio > 1.0) {
        return None;
    }
    Some((e_coarse / e_fine).ln() / ratio.ln())
}

/// True when, over the trailing `window` samples, the relative spread of
/// every tracked norm stays within `tol`. Each history entry holds one
/// sample of all tracked norms.
pub fn steady_detector(history: &[Vec<f64>], window: usize, tol: f64) -> bool {
    let window = window.max(2);
    if history.len() < window {
        return false;
    }
    let tail = &history[history.len() - window..];
    let tracked = tail[0].len();
    for k in 0..tracked {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for sample in tail {
            lo = lo.min(sample[k]);
            hi = hi.max(sample[k]);
        }
        let scale = tail[window - 1][k].abs().max(1e-300);
        if (hi - lo) / scale > tol {
            return false;
        }
    }
    true
}

/// Error norms of one finished run.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub case: String,
    pub n: usize,
    /// Simulated physical time at which the norms were evaluated (s).
    pub t_eval: f64,
    pub steps: u64,
    pub velocity: Norms,
    pub pressure: Norms,
}

impl ErrorReport {
    pub fn norms(&self, q: Quantity) -> &Norms {
        match q {
            Quantity::Velocity => &self.velocity,
            Quantity::Pressure => &self.pressure,
        }
    }
}

/// Errors across a resolution ladder with pairwise convergence orders.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub case: String,
    pub reports: Vec<ErrorReport>,
}

impl ConvergenceTable {
    pub fn new(case: &str, reports: Vec<ErrorReport>) -> Self {
        Self {
            case: case.to_string(),
            reports,
        }
    }

    /// Pairwise order between resolution `i-1` and `i` (None for i = 0 or
    /// undefined errors).
    pub fn pairwise_eoc(&self, i: usize, q: Quantity, norm: NormKind) -> Option<f64> {
        if i == 0 || i >= self.reports.len() {
            return None;
        }
        let coarse = &self.reports[i - 1];
        let fine = &self.reports[i];
        let ratio = fine.n as f64 / coarse.n as f64;
        eoc(coarse.norms(q).get(norm), fine.norms(q).get(norm), ratio)
    }

    /// Mean of the defined pairwise orders for one quantity and norm.
    pub fn mean_eoc(&self, q: Quantity, norm: NormKind) -> Option<f64> {
        let orders: Vec<f64> = (1..self.reports.len())
            .filter_map(|i| self.pairwise_eoc(i, q, norm))
            .collect();
        if orders.is_empty() {
            None
        } else {
            Some(orders.iter().sum::<f64>() / orders.len() as f64)
        }
    }
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV rows (case, n, quantity, norm, value, eoc); the eoc column is empty
/// for single runs and for the first resolution of a ladder.
pub fn report_csv(report: &ErrorReport) -> String {
    let mut out = String::from("case,n,quantity,norm,value,eoc\n");
    for q in Quantity::ALL {
        for norm in NormKind::ALL {
            out.push_str(&format!(
                "{},{},{},{},{},\n",
                report.case,
                report.n,
                q.name(),
                norm.name(),
                fmt_value(report.norms(q).get(norm))
            ));
        }
    }
    out
}

pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut out = String::from("case,n,quantity,norm,value,eoc\n");
    for (i, report) in table.reports.iter().enumerate() {
        for q in Quantity::ALL {
            for norm in NormKind::ALL {
                let eoc_col = table
                    .pairwise_eoc(i, q, norm)
                    .map(fmt_value)
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    report.case,
                    report.n,
                    q.name(),
                    norm.name(),
                    fmt_value(report.norms(q).get(norm)),
                    eoc_col
                ));
            }
        }
    }
    out
}

impl fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case {}", self.case)?;
        writeln!(
            f,
            "{:>6} {:>10} {:>6} {:>14} {:>8}",
            "n", "quantity", "norm", "value", "eoc"
        )?;
        for (i, report) in self.reports.iter().enumerate() {
            for q in Quantity::ALL {
                for norm in NormKind::ALL {
                    let eoc_col = self
                        .pairwise_eoc(i, q, norm)
                        .map(|v| format!("{v:8.3}"))
                        .unwrap_or_else(|| format!("{:>8}", "-"));
                    writeln!(
                        f,
                        "{:>6} {:>10} {:>6} {:>14.6e} {}",
                        report.n,
                        q.name(),
                        norm.name(),
                        report.norms(q).get(norm),
                        eoc_col
                    )?;
                }
            }
        }
        Ok(())
    }
}
