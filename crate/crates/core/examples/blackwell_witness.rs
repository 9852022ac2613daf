//! Blackwell sufficiency between the two channels and the garbling map that
//! witnesses it.
//!
//! Run: cargo run --example blackwell_witness

use gausspid::fixtures;
use gausspid::linalg::spectral_norm;
use gausspid::{check_degraded, degradation_witness, Direction, Matrix, WhitenedChannels};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(name: &str, wc: &WhitenedChannels) -> gausspid::Result<()> {
    let r = check_degraded(wc);
    println!("{name}: X over Y {} (margin {:.3e}), Y over X {} (margin {:.3e})", r.x_over_y, r.margin_x_over_y, r.y_over_x, r.margin_y_over_x);
    for dir in [Direction::XOverY, Direction::YOverX] {
        if r.holds(dir) {
            let t = degradation_witness(wc, dir)?;
            println!("  witness for {dir:?}: {}x{}, spectral norm {:.4}", t.nrows(), t.ncols(), spectral_norm(&t));
        }
    }
    Ok(())
}

fn main() -> gausspid::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    show("degraded", &fixtures::degraded_channels(&mut rng, 4, 3, 2))?;
    show("split", &fixtures::split_channels(&mut rng, 4, 2, 2))?;

    let gain = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    let same = WhitenedChannels::from_parts(Matrix::identity(2, 2), gain.clone(), gain)?;
    show("identical", &same)?;
    Ok(())
}
