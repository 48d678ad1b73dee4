//! Cartan frames in `M_n(F)`: validity, conjugacy, the normalizer witness
//! and counting over finite fields.

use hamlat::locmatrix::{
    conjugate_cartans, conjugation_maps, count_cartans, is_cartan, lemma2_witness, CartanFrame, Gf2,
    Gf3, Matrix, Q,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let diag = CartanFrame::<Q>::diagonal(2);
    let unipotent = CartanFrame::new(vec![
        Matrix::from_i64_rows(&[&[1, -1], &[0, 0]])?,
        Matrix::from_i64_rows(&[&[0, 1], &[0, 1]])?,
    ])?;
    println!("frame valid: {}", is_cartan(unipotent.idempotents()).valid);

    let x = conjugate_cartans(&diag, &unipotent)?;
    println!("x with x⁻¹ e_i x = f_i:\n{x}");
    println!("verified: {}", conjugation_maps(&x, &diag, &unipotent));

    let w = lemma2_witness::<Gf2>(2, 2)?;
    println!("witness in M_4(GF(2)):\n{}", w.x);
    println!("action {:?}, passed: {}", w.action, w.passed());

    for count in [count_cartans::<Gf2>(2)?, count_cartans::<Gf3>(2)?] {
        println!(
            "M_{}(GF({})): {} frames enumerated, formula {}",
            count.m, count.q, count.enumerated, count.formula
        );
    }
    Ok(())
}
