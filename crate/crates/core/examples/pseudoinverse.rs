//! The Moore-Penrose inverse under the w-product: the four Penrose
//! conditions, and a pair for which `(A ⋆ B)† ≠ B† ⋆ A†`.
//!
//! Run with `cargo run --example pseudoinverse`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wten::fixtures::{nonreversal_a, nonreversal_b};
use wten::{pinv_w, w_product, w_product_chain, Tensor3, DEFAULT_PINV_TOL};

fn main() -> wten::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let levels = 2;
    let a = Tensor3::random_signed(9, 5, 8, &mut rng);
    let x = pinv_w(&a, levels, DEFAULT_PINV_TOL)?;
    let ax = w_product(&a, &x, levels)?;
    let xa = w_product(&x, &a, levels)?;

    println!("A is {:?}, A† is {:?}", a.shape(), x.shape());
    let checks = [
        (
            "A ⋆ A† ⋆ A = A",
            w_product_chain(&[&a, &x, &a], levels)?.relative_distance(&a),
        ),
        (
            "A† ⋆ A ⋆ A† = A†",
            w_product_chain(&[&x, &a, &x], levels)?.relative_distance(&x),
        ),
        ("(A ⋆ A†)ᵀ = A ⋆ A†", ax.transpose().relative_distance(&ax)),
        ("(A† ⋆ A)ᵀ = A† ⋆ A", xa.transpose().relative_distance(&xa)),
    ];
    for (law, err) in checks {
        println!("  {law:<22} relative error {err:.2e}");
    }

    let (a, b) = (nonreversal_a(), nonreversal_b());
    let c = pinv_w(&w_product(&a, &b, 1)?, 1, DEFAULT_PINV_TOL)?;
    let d = w_product(
        &pinv_w(&b, 1, DEFAULT_PINV_TOL)?,
        &pinv_w(&a, 1, DEFAULT_PINV_TOL)?,
        1,
    )?;
    for k in 1..=2 {
        println!("(A⋆B)†({k}) =\n{}", c.frontal_slice(k)?);
        println!("B†⋆A†({k}) =\n{}", d.frontal_slice(k)?);
    }
    println!("‖(A⋆B)† − B†⋆A†‖ = {:.4}", c.distance(&d));
    Ok(())
}
