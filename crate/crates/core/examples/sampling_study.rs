//! Desk-scale version of the Wishart sampling study: draws covariances under
//! each dimension scheme, decomposes them, and prints the summary statistics.
//!
//! Run: cargo run --release --example sampling_study -- [draws-per-scheme] [seed]

use std::time::Instant;

use gausspid::experiments::{run_scheme, summarize, SchemeId};
use gausspid::SolverConfig;

fn main() -> gausspid::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(2024);
    let cfg = SolverConfig::default();

    let start = Instant::now();
    let mut rows = Vec::new();
    for scheme in SchemeId::ALL {
        let records = run_scheme(scheme, n, seed, &cfg)?;
        let unconverged = records.iter().filter(|r| !r.all_converged()).count();
        let slowest = records.iter().map(|r| r.solve_ms[0].max(r.solve_ms[1])).fold(0.0, f64::max);
        println!("{scheme}: {n} draws, {unconverged} not converged, slowest solve {slowest:.1} ms");
        rows.extend(records.iter().map(|r| r.to_row(true)));
    }
    let stats = summarize(&rows)?;
    println!();
    println!("non-negative decompositions: {:.4}", stats.nonnegative_fraction);
    if let Some(f) = stats.scalar_m_one_sided_fraction {
        println!("d_M = 1 with one-sided unique information: {f:.4} of {}", stats.scalar_m_count);
    }
    if let Some(f) = stats.vector_m_both_unique_fraction {
        println!("d_M > 1 with unique information in both sources: {f:.4} of {}", stats.vector_m_count);
    }
    for (scheme, s) in &stats.per_scheme {
        let med = |b: Option<gausspid::experiments::BoxStats>| b.map_or(f64::NAN, |b| b.median);
        println!(
            "{scheme}: median UI_X {:.3}  UI_Y {:.3}  RI {:.3}  SI {:.3}  both unique {:.3}",
            med(s.ui_x_bar),
            med(s.ui_y_bar),
            med(s.ri_bar),
            med(s.si_bar),
            s.both_unique_fraction.unwrap_or(f64::NAN)
        );
    }
    println!("\nelapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
