//! Identity, inverse, transpose and orthogonal tensors under the
//! w-product.
//!
//! Run with `cargo run --example tensor_algebra`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wten::{identity_tensor, inverse_tensor, orthogonal_tensor, w_product, Matrix, Tensor3};

fn main() -> wten::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, p, levels) = (4, 8, 3);

    let id = identity_tensor(n, p, levels)?;
    println!("identity tensor, first two slices:");
    println!("{:.2}\n", id.frontal_slice(1)?);
    println!("{:.2}", id.frontal_slice(2)?);

    // Diagonally dominant, hence invertible in every wavelet slice.
    let a = Tensor3::random_signed(n, n, p, &mut rng).add(&id.scale(2.0 * n as f64))?;
    let a_inv = inverse_tensor(&a, levels)?;
    let err = w_product(&a, &a_inv, levels)?.relative_distance(&id);
    println!("‖A ⋆ A⁻¹ − I‖ / ‖I‖ = {err:.2e}");

    let b = Tensor3::random_signed(n, 3, p, &mut rng);
    let lhs = w_product(&a, &b, levels)?.transpose();
    let rhs = w_product(&b.transpose(), &a.transpose(), levels)?;
    println!("‖(A ⋆ B)ᵀ − Bᵀ ⋆ Aᵀ‖ = {:.2e}", lhs.distance(&rhs));

    let (c, s) = (0.6, 0.8);
    let q = Matrix::from_rows(&[
        [c, -s, 0.0, 0.0],
        [s, c, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);
    let qt = orthogonal_tensor(&q, p, levels)?;
    let err = w_product(&qt.transpose(), &qt, levels)?.relative_distance(&id);
    println!("‖Qᵀ ⋆ Q − I‖ / ‖I‖ = {err:.2e}");
    println!(
        "Tr(A) = {:.4}, Tr(Aᵀ) = {:.4}",
        a.trace()?,
        a.transpose().trace()?
    );
    Ok(())
}
