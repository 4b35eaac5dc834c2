//! Times the m-, t- and w-products on random cubes.
//!
//! Run with `cargo run --release --example product_timing [pmax]`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wten::lifting::max_levels;
use wten::timing::measure;
use wten::{m_product, t_product, w_product, ModeTransform, Tensor3};

fn main() -> wten::Result<()> {
    let pmax: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(128);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    println!(
        "{:>5} {:>12} {:>12} {:>12}",
        "p", "m (ms)", "t (ms)", "w (ms)"
    );
    let mut p = 8;
    while p <= pmax {
        let a = Tensor3::random(p, p, p, &mut rng);
        let b = Tensor3::random(p, p, p, &mut rng);
        let dct = ModeTransform::dct(p);
        let reps = if p >= 128 { 3 } else { 10 };
        let (tm, _) = measure(reps, || m_product(&a, &b, &dct))?;
        let (tt, _) = measure(reps, || t_product(&a, &b))?;
        let (tw, _) = measure(reps, || w_product(&a, &b, max_levels(p)))?;
        println!(
            "{p:>5} {:>12.3} {:>12.3} {:>12.3}",
            tm.median() * 1e3,
            tt.median() * 1e3,
            tw.median() * 1e3
        );
        p *= 2;
    }
    Ok(())
}
