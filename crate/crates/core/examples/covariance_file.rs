//! Loads a covariance matrix from disk, decomposes it, and writes the same
//! JSON report the `gausspid compute` command produces.
//!
//! Run: cargo run --example covariance_file -- path/to/cov.csv dM,dX,dY

use std::path::PathBuf;

use gausspid::cli::cmd_compute;
use gausspid::io::load_system;
use gausspid::report::Units;
use gausspid::{Dims, SolverConfig};

fn main() -> gausspid::Result<()> {
    let mut args = std::env::args().skip(1);
    let (path, dims) = match (args.next(), args.next()) {
        (Some(p), d) => (PathBuf::from(p), d.map(|d| d.parse::<Dims>()).transpose()?),
        (None, _) => {
            let p = std::env::temp_dir().join("gausspid_counterexample.csv");
            std::fs::write(&p, "1,0,1,0\n0,1,0,1\n1,0,2,0\n0,1,0,2\n")?;
            (p, Some(Dims::new(2, 1, 1)))
        }
    };
    let sys = load_system(&path, dims)?;
    let (report, converged) = cmd_compute(&sys, &SolverConfig::default(), Units::Bits)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if !converged {
        eprintln!("solver did not converge in at least one direction");
    }
    Ok(())
}
