//! MMI and deficiency-based decompositions of a random system, with the
//! normalized atoms and their position in the decomposition simplex.
//!
//! Run: cargo run --release --example decompositions -- [seed]

use gausspid::pid::NonnegativityVerdict;
use gausspid::{delta_hat_pid, fixtures, mmi_pid, normalize, simplex_coords, Dims, PidAtoms, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn print(a: &PidAtoms) -> gausspid::Result<()> {
    let n = normalize(a)?;
    let p = simplex_coords(&n);
    println!(
        "{:<9} UI_X {:.4}  UI_Y {:.4}  RI {:.4}  SI {:.4}  | normalized {:.3?}  simplex ({:.3}, {:.3}, {:.3})  non-negative {}",
        a.label.to_string(),
        a.ui_x,
        a.ui_y,
        a.ri,
        a.si,
        n.as_array(),
        p[0],
        p[1],
        p[2],
        NonnegativityVerdict::of(a).all()
    );
    Ok(())
}

fn main() -> gausspid::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for dims in [Dims::new(1, 3, 2), Dims::new(3, 2, 5), Dims::new(6, 3, 4)] {
        let sys = fixtures::wishart_system(&mut rng, dims);
        let dh = delta_hat_pid(&sys, &SolverConfig::default())?;
        println!("{dims}: I(M;X,Y) = {:.4} nats", dh.atoms.total_mi);
        print(&mmi_pid(&sys)?)?;
        print(&dh.atoms)?;
    }
    Ok(())
}
