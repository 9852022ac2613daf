//! Two sources that each see a different coordinate of `M`: the MMI
//! decomposition reports only redundancy and synergy, while the
//! deficiency-based decomposition attributes everything to unique information.
//!
//! Run: cargo run --example counterexample

use gausspid::{check_degraded, delta_hat_pid, fixtures, mmi_pid, SolverConfig};

fn main() -> gausspid::Result<()> {
    let sys = fixtures::counterexample();
    println!("Σ =\n{}", sys.sigma());

    let mmi = mmi_pid(&sys)?;
    let dh = delta_hat_pid(&sys, &SolverConfig::default())?;
    println!("{:>10} {:>10} {:>10} {:>10} {:>10}", "", "UI_X", "UI_Y", "RI", "SI");
    for a in [&mmi, &dh.atoms] {
        println!("{:>10} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", a.label.to_string(), a.ui_x, a.ui_y, a.ri, a.si);
    }

    let wc = gausspid::whiten(&gausspid::channel_form(&sys)?)?;
    let report = check_degraded(&wc);
    println!("\nX sufficient for Y: {}  Y sufficient for X: {}", report.x_over_y, report.y_over_x);
    println!("deficiency of X for Y: {:.6}", dh.y_from_x.delta_hat);
    println!("deficiency of Y for X: {:.6}", dh.x_from_y.delta_hat);
    Ok(())
}
