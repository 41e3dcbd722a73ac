//! Development probe: small convergence studies with timing.

use std::time::Instant;
use vanse_core::analysis::{NormKind, Quantity};
use vanse_core::app::{run_convergence, RunConfig};
use vanse_core::kernel::SchemeVariant;
use vanse_core::mms::MmsCase;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let case_id = args.first().map(String::as_str).unwrap_or("tran1d");
    let resolutions: Vec<usize> = args
        .get(1)
        .map(|s| s.split(',').map(|v| v.parse().unwrap()).collect())
        .unwrap_or_else(|| vec![16, 32, 64]);
    let variant = match args.get(2).map(String::as_str) {
        Some("legacy") => SchemeVariant::Legacy,
        _ => SchemeVariant::Consistent,
    };

    let case = MmsCase::from_id(case_id, false).unwrap();
    let mut cfg = RunConfig::new(case, resolutions[0]);
    cfg.resolutions = resolutions;
    cfg.variant = variant;
    cfg.quiet = std::env::var("PROBE_VERBOSE").is_err();

    let start = Instant::now();
    let table = run_convergence(&cfg).unwrap();
    println!("{table}");
    for q in Quantity::ALL {
        for norm in NormKind::ALL {
            println!(
                "mean eoc {} {}: {:?}",
                q.name(),
                norm.name(),
                table.mean_eoc(q, norm)
            );
        }
    }
    println!("elapsed: {:.1?}", start.elapsed());
}
