//! Run orchestration: configuration, the run loop with steady-state
//! detection, report/snapshot output and the convergence-study driver.

use crate::analysis::{
    convergence_csv, report_csv, steady_detector, ConvergenceTable, ErrorReport,
};
use crate::error::{Error, Result};
use crate::kernel::SchemeVariant;
use crate::mms::MmsCase;
use crate::sim::{SimParams, Simulation};
use crate::snapshot::{write_snapshot_csv, write_snapshot_vtk};
use std::fs;
use std::path::PathBuf;

/// Effective configuration of one run or study. Defaults follow the
/// reference setup; the CLI layers file and flag overrides on top.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: MmsCase,
    pub n: usize,
    /// Resolution ladder for convergence studies (strictly increasing).
    pub resolutions: Vec<usize>,
    /// Relaxation time; `None` picks the case default (0.53 stationary,
    /// 0.5075 transient).
    pub tau: Option<f64>,
    pub variant: SchemeVariant,
    pub out_dir: Option<PathBuf>,
    /// Write `snapshot_<step>.csv/.vtk` every this many steps; step 0
    /// dumps the analytic initial condition.
    pub snapshot_every: Option<u64>,
    pub workers: Option<usize>,
    /// Norm sampling (and progress logging) cadence in steps.
    pub sample_every: u64,
    /// Steady-state detection window in steps (stationary cases).
    pub steady_window_steps: u64,
    /// Relative tolerance for the steady-state detector.
    pub steady_tol: f64,
    /// Evaluation time for transient cases (s); one traveling-wave period
    /// by default.
    pub t_end_transient: f64,
    /// Hard cap for stationary cases (s).
    pub t_cap_stationary: f64,
    pub quiet: bool,
    /// Run the resolutions of a study concurrently (sequential by default
    /// for memory predictability).
    pub parallel_resolutions: bool,
}

impl RunConfig {
    pub fn new(case: MmsCase, n: usize) -> Self {
        let resolutions = case.default_resolutions();
        Self {
            case,
            n,
            resolutions,
            tau: None,
            variant: SchemeVariant::Consistent,
            out_dir: None,
            snapshot_every: None,
            workers: None,
            sample_every: 1000,
            steady_window_steps: 1000,
            steady_tol: 1e-6,
            t_end_transient: 4.0,
            t_cap_stationary: 10.0,
            quiet: false,
            parallel_resolutions: false,
        }
    }

    pub fn effective_tau(&self) -> f64 {
        self.tau.unwrap_or_else(|| self.case.default_tau())
    }

    fn sim_params(&self, n: usize) -> SimParams {
        SimParams {
            case: self.case.clone(),
            n,
            tau: self.effective_tau(),
            variant: self.variant,
            variation_dims: None,
            workers: self.workers,
        }
    }

    fn ensure_out_dir(&self) -> Result<Option<PathBuf>> {
        match &self.out_dir {
            None => Ok(None),
            Some(dir) => {
                fs::create_dir_all(dir)?;
                Ok(Some(dir.clone()))
            }
        }
    }
}

fn manifest_text(cfg: &RunConfig, reports: &[&ErrorReport]) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(&format!("{k} = {v}\n"));
    };
    push("case", cfg.case.name());
    push("scheme", cfg.variant.name().to_string());
    push("tau", format!("{}", cfg.effective_tau()));
    push("variation_dims", format!("{}", cfg.case.variation_dims()));
    push("domain_m", format!("{}", crate::analysis::DOMAIN_LENGTH));
    push("rho_phys", format!("{}", crate::analysis::RHO_PHYS));
    push("nu_phys", format!("{}", crate::analysis::NU_PHYS));
    push("sample_every_steps", format!("{}", cfg.sample_every));
    push("steady_window_steps", format!("{}", cfg.steady_window_steps));
    push("steady_tol", format!("{}", cfg.steady_tol));
    push("t_end_transient_s", format!("{}", cfg.t_end_transient));
    push("t_cap_stationary_s", format!("{}", cfg.t_cap_stationary));
    push(
        "snapshot_every_steps",
        cfg.snapshot_every
            .map(|v| v.to_string())
            .unwrap_or_else(|| "off".into()),
    );
    push(
        "workers",
        cfg.workers
            .map(|v| v.to_string())
            .unwrap_or_else(|| "auto".into()),
    );
    for rep in reports {
        push(
            &format!("run_n{}", rep.n),
            format!(
                "steps={} t_eval_s={:.9e} dt_s={:.9e}",
                rep.steps,
                rep.t_eval,
                if rep.steps > 0 {
                    rep.t_eval / rep.steps as f64
                } else {
                    0.0
                }
            ),
        );
    }
    out
}

/// Runs one case at one resolution: initialize, march, detect steadiness
/// (stationary) or stop at the evaluation time (transient), write the
/// error report and optional snapshots.
pub fn run_single(cfg: &RunConfig) -> Result<ErrorReport> {
    let report = run_to_report(cfg, cfg.n)?;
    if let Some(dir) = cfg.ensure_out_dir()? {
        fs::write(dir.join("errors.csv"), report_csv(&report))?;
        fs::write(dir.join("manifest.txt"), manifest_text(cfg, &[&report]))?;
    }
    Ok(report)
}

fn run_to_report(cfg: &RunConfig, n: usize) -> Result<ErrorReport> {
    let mut sim = Simulation::new(cfg.sim_params(n))?;
    if sim.init_report.near_vacuum_cells > 0 && !cfg.quiet {
        eprintln!(
            "warning: {} cells start below phi = 0.01, outside the validated regime",
            sim.init_report.near_vacuum_cells
        );
    }
    let transient = cfg.case.transient();
    let t_end = if transient {
        cfg.t_end_transient
    } else {
        cfg.t_cap_stationary
    };
    let steps_end = (t_end / sim.conv.dt).round() as u64;
    let window_samples = (cfg.steady_window_steps / cfg.sample_every.max(1)).max(1) as usize + 1;

    let snapshot_dir = if cfg.snapshot_every.is_some() {
        cfg.ensure_out_dir()?
    } else {
        None
    };
    let write_snaps = |sim: &mut Simulation, step: u64| -> Result<()> {
        if let (Some(every), Some(dir)) = (cfg.snapshot_every, snapshot_dir.as_ref()) {
            if step % every == 0 {
                let snap = if step == 0 {
                    sim.initial_snapshot()
                } else {
                    sim.state_snapshot()?
                };
                write_snapshot_csv(&dir.join(format!("snapshot_{step}.csv")), &snap)?;
                write_snapshot_vtk(&dir.join(format!("snapshot_{step}.vtk")), &snap)?;
            }
        }
        Ok(())
    };

    let mut history: Vec<Vec<f64>> = Vec::new();
    let mut final_report: Option<ErrorReport> = None;
    for step in 0..=steps_end {
        write_snaps(&mut sim, step)?;
        let sampled = step % cfg.sample_every == 0 || step == steps_end;
        if sampled {
            sim.scan()?;
            let report = sim.error_report()?;
            if !cfg.quiet {
                println!(
                    "[{} n={}] step {:>8} t={:.6e}s vel L2 {:.6e} p L2 {:.6e}",
                    report.case,
                    n,
                    step,
                    report.t_eval,
                    report.velocity.l2,
                    report.pressure.l2
                );
            }
            history.push(Simulation::tracked_norms(&report));
            let steady = !transient
                && steady_detector(&history, window_samples, cfg.steady_tol);
            if steady || step == steps_end {
                final_report = Some(report);
                break;
            }
        }
        sim.advance()?;
    }
    Ok(final_report.expect("loop always produces a report"))
}

/// Runs the configured resolution ladder with the same relaxation time
/// (diffusive scaling) and assembles the convergence table. Failed
/// resolutions are reported and skipped; the first failure is returned
/// after the table is written.
pub fn run_convergence(cfg: &RunConfig) -> Result<ConvergenceTable> {
    let resolutions = &cfg.resolutions;
    if resolutions.len() < 3 {
        return Err(Error::Usage(format!(
            "a convergence study needs at least 3 resolutions, got {}",
            resolutions.len()
        )));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage(
            "resolutions must be strictly increasing".into(),
        ));
    }

    let mut results: Vec<(usize, Result<ErrorReport>)> = Vec::new();
    if cfg.parallel_resolutions {
        let outcomes: Vec<(usize, Result<ErrorReport>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = resolutions
                .iter()
                .map(|&n| scope.spawn(move || (n, run_to_report(cfg, n))))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        results.extend(outcomes);
    } else {
        for &n in resolutions {
            results.push((n, run_to_report(cfg, n)));
        }
    }

    let mut reports = Vec::new();
    let mut first_error = None;
    for (n, outcome) in results {
        match outcome {
            Ok(report) => reports.push(report),
            Err(err) => {
                eprintln!("resolution n={n} failed: {err}");
                if first_error.is_none() {
                    first_error = Some(err);
                }
            }
        }
    }
    let table = ConvergenceTable::new(&cfg.case.name(), reports);

    if let Some(dir) = cfg.ensure_out_dir()? {
        fs::write(dir.join("convergence.csv"), convergence_csv(&table))?;
        let refs: Vec<&ErrorReport> = table.reports.iter().collect();
        fs::write(dir.join("manifest.txt"), manifest_text(cfg, &refs))?;
    }
    if !cfg.quiet {
        println!("{table}");
    }
    match first_error {
        Some(err) => Err(err),
        None => Ok(table),
    }
}
