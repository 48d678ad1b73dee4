//! Ranks, distances and orthogonal covers in the standard spaces `H_n`.

use hamlat::hamming::{check_rank_axioms_exhaustive, distance, orthogonal_cover, HElement, StandardSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a: HElement = "110100".parse()?;
    let b: HElement = "011100".parse()?;
    println!("r({a}) = {}, r({b}) = {}", a.rank(), b.rank());
    println!("a + b = {}, a * b = {}", a.add(&b)?, a.mul(&b)?);
    println!("d(a, b) = {}", distance(&a, &b)?);

    let cover = orthogonal_cover(&[a.clone(), b.clone()])?;
    println!("orthogonal cover generated by a and b:");
    for m in cover.members() {
        println!("  {m}  rank {}", m.rank());
    }
    println!("a decomposes as members {:?}", cover.decompose(&a)?.unwrap_or_default());

    for n in 1..=6 {
        let report = check_rank_axioms_exhaustive(StandardSpace::new(n)?)?;
        println!("H_{n}: {} orthogonal pairs, axioms hold: {}", report.pairs_checked, report.passed());
    }
    Ok(())
}
