//! Builds and solves the convex deficiency surrogate for one direction and
//! prints the solver diagnostics.
//!
//! Run: cargo run --release --example deficiency_solver -- [dM] [dX] [dY] [seed]

use gausspid::deficiency::{build_program, evaluate_delta_hat, evaluate_reduced_objective, sigma_hat, solve_program};
use gausspid::linalg::min_eigenvalue;
use gausspid::{channel_form, fixtures, whiten, Dims, Direction, Matrix, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gausspid::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let get = |i: usize, d: usize| args.get(i).copied().unwrap_or(d);
    let dims = Dims::new(get(0, 4), get(1, 5), get(2, 6));
    let mut rng = ChaCha8Rng::seed_from_u64(get(3, 11) as u64);
    let sys = fixtures::wishart_system(&mut rng, dims);
    let wc = whiten(&channel_form(&sys)?)?;
    let cfg = SolverConfig::default();

    for dir in [Direction::XOverY, Direction::YOverX] {
        let spec = build_program(&wc, dir)?;
        let (rows, cols) = spec.variable_shape();
        let sol = solve_program(&spec, &cfg)?;
        let sigma = sigma_hat(&sol.t_hat, &wc, dir, &cfg)?;
        let delta = evaluate_delta_hat(&sol.t_hat, &sigma, &wc, dir)?;
        let reduced = evaluate_reduced_objective(&sol.t_hat, &wc, dir);
        println!("{dir:?} on {dims}: T is {rows}x{cols}");
        println!("  method {:?}, {} iterations, converged {}", sol.method, sol.iterations, sol.converged);
        println!("  objective {:.6e} (at T = 0: {:.6e})", sol.objective, spec.objective(&Matrix::zeros(rows, cols)));
        println!("  smallest LMI eigenvalue {:.3e}, smallest eigenvalue of Σ̂_T {:.3e}", sol.lmi_min_eig, min_eigenvalue(&sigma));
        println!("  deficiency {delta:.6}, reduced objective {:.6}", reduced.value);
    }
    Ok(())
}
