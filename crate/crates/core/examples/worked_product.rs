//! Walks through a two-level w-product on a pair of small tensors whose
//! intermediates are all exact dyadic rationals.
//!
//! Run with `cargo run --example worked_product`.

use wten::fixtures::{dyadic_a, dyadic_b};
use wten::{face_product, forward_w, inverse_w, w_product, BlockTag, Tensor3, WaveletPyramid};

fn show(label: &str, t: &Tensor3) {
    for k in 1..=t.p() {
        println!("{label}({k}) =\n{}", t.frontal_slice(k).unwrap());
    }
}

fn show_pyramid(name: &str, pyr: &WaveletPyramid) {
    for tag in pyr.tags() {
        let label = match tag {
            BlockTag::Smooth => format!("{name}_s{}", pyr.levels()),
            BlockTag::Detail(j) => format!("{name}_d{j}"),
        };
        show(&label, pyr.block(tag));
    }
}

fn main() -> wten::Result<()> {
    let a = dyadic_a();
    let b = dyadic_b();
    let levels = 2;

    let wa = forward_w(&a, levels)?;
    let wb = forward_w(&b, levels)?;
    show_pyramid("A", &wa);
    show_pyramid("B", &wb);

    // Multiply matching wavelet-domain slices.
    let wc = face_product(&wa, &wb)?;
    show_pyramid("C", &wc);

    let c = inverse_w(&wc)?;
    show("C", &c);

    // Same thing in one call.
    assert_eq!(c, w_product(&a, &b, levels)?);
    println!("w_product agrees with the step-by-step computation");
    Ok(())
}
