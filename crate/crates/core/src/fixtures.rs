//! Small hand-checkable tensors used by the examples and test suites.

use crate::matrix::Matrix;
use crate::tensor::Tensor3;

fn stack(slices: &[&[[f64; 3]]]) -> Tensor3 {
    let mats: Vec<Matrix> = slices.iter().map(|s| Matrix::from_rows(s)).collect();
    Tensor3::from_slices(&mats).expect("fixture shapes")
}

fn stack2(slices: &[&[[f64; 2]]]) -> Tensor3 {
    let mats: Vec<Matrix> = slices.iter().map(|s| Matrix::from_rows(s)).collect();
    Tensor3::from_slices(&mats).expect("fixture shapes")
}

/// 2×3×4 tensor whose two-level w-product with [`dyadic_b`] stays in the
/// dyadic rationals, so every intermediate is exact in `f64`.
pub fn dyadic_a() -> Tensor3 {
    stack(&[
        &[[3.0, 0.0, 2.0], [3.0, 3.0, 0.0]],
        &[[2.0, 0.0, 0.0], [1.0, 1.0, 1.0]],
        &[[0.0, 1.0, 4.0], [3.0, 3.0, 2.0]],
        &[[3.0, 0.0, 5.0], [2.0, 2.0, 5.0]],
    ])
}

/// 3×2×4 right-hand factor for [`dyadic_a`].
pub fn dyadic_b() -> Tensor3 {
    stack2(&[
        &[[1.0, 3.0], [1.0, 2.0], [3.0, 1.0]],
        &[[5.0, 0.0], [0.0, 0.0], [0.0, 3.0]],
        &[[3.0, 4.0], [0.0, 4.0], [5.0, 0.0]],
        &[[5.0, 5.0], [5.0, 4.0], [5.0, 3.0]],
    ])
}

/// 2×3×2 rank-deficient tensor for which `(a ⋆ b)† ≠ b† ⋆ a†` with
/// [`nonreversal_b`].
pub fn nonreversal_a() -> Tensor3 {
    stack(&[
        &[[0.0, 1.0, 1.0], [0.0, 0.0, 1.0]],
        &[[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]],
    ])
}

/// 3×2×2 right-hand factor for [`nonreversal_a`].
pub fn nonreversal_b() -> Tensor3 {
    stack2(&[
        &[[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]],
        &[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
    ])
}
