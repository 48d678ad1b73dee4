//! Tensor products of diagonal frames realize the retensored Hamming space.

use hamlat::locmatrix::{steinitz_of_algebra_chain, theorem4_check, Q};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for primes in [&[2u64][..], &[2, 3], &[2, 2, 3]] {
        let r = theorem4_check::<Q>(primes)?;
        println!(
            "primes {:?}: N = {}, {} elements checked, st(A) = {} = st(H) = {}: {}",
            r.primes, r.size, r.elements_checked, r.st_algebra, r.st_space, r.passed()
        );
    }
    println!("st of M_2 ⊂ M_6 ⊂ M_30: {}", steinitz_of_algebra_chain(&[2, 6, 30])?);
    Ok(())
}
