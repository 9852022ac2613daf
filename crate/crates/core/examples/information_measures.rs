//! Mutual information of a Gaussian system and the Gaussian KL divergence,
//! including the identity `I(M; X) = E_M KL(P_{X|M} ‖ P_X)`.
//!
//! Run: cargo run --example information_measures -- [seed]

use gausspid::{channel_form, fixtures, kl_mvn, mutual_information, Dims, Source};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gausspid::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = fixtures::wishart_system(&mut rng, Dims::new(3, 2, 4));

    let ix = mutual_information(&sys, Source::X)?;
    let iy = mutual_information(&sys, Source::Y)?;
    let ixy = mutual_information(&sys, Source::XY)?;
    println!("I(M;X) = {ix:.6}  I(M;Y) = {iy:.6}  I(M;X,Y) = {ixy:.6} nats");

    let cf = channel_form(&sys)?;
    let marginal = &cf.h_x * &cf.sigma_m * cf.h_x.transpose() + &cf.sigma_x_given_m;
    let zero = DVector::zeros(cf.h_x.nrows());
    let inv = marginal.clone().try_inverse().expect("marginal is PD");
    let averaged = kl_mvn(&zero, &cf.sigma_x_given_m, &zero, &marginal)?
        + 0.5 * (inv * &cf.h_x * &cf.sigma_m * cf.h_x.transpose()).trace();
    println!("E_M KL(P_X|M ‖ P_X) = {averaged:.6}  (difference {:.1e})", (averaged - ix).abs());

    let one = |v: f64| gausspid::Matrix::from_element(1, 1, v);
    let kl = kl_mvn(&DVector::from_element(1, 0.0), &one(1.0), &DVector::from_element(1, 1.0), &one(2.0))?;
    println!("KL(N(0,1) ‖ N(1,2)) = {kl:.6}");
    Ok(())
}
