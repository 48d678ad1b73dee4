//! `H_n ⊗ H_m ≅ H_nm`: pure tensors, cover ranks and the exhaustive check.

use hamlat::hamming::{HElement, OrthogonalCover, StandardSpace};
use hamlat::tensor::{rank_via_cover, tensor_element, tensor_space_iso};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x: HElement = "10".parse()?;
    let y: HElement = "011".parse()?;
    let t = tensor_element(&x, &y);
    println!("{x} ⊗ {y} = {t}, rank {} = {} · {}", t.rank(), x.rank(), y.rank());

    let left = OrthogonalCover::atoms(StandardSpace::new(2)?);
    let right = OrthogonalCover::new(vec!["110".parse()?, "001".parse()?])?;
    let z: HElement = "110110".parse()?;
    println!("rank of {z} through covers: {}", rank_via_cover(&z, &left, &right)?);

    for (n, m) in [(2, 3), (3, 4), (4, 4)] {
        let r = tensor_space_iso(n, m)?;
        println!(
            "H_{n} ⊗ H_{m}: {} pure tensors, {} pairs, isomorphism: {}",
            r.pure_tensors_checked,
            r.pairs_checked,
            r.passed()
        );
    }
    Ok(())
}
