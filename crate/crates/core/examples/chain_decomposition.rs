//! Chains of standard spaces: complement factorization, prime
//! decomposition, re-tensoring and the isomorphism test.

use hamlat::chains::{
    decompose_chain, factor_complement, iso_test, retensor, steinitz_of_chain, verify_retensor,
    ChainSpace, Embedding, IsoOutcome,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let e = Embedding::random(2, 6, &mut rng)?;
    println!("random embedding H_2 -> H_6: blocks {:?}", e.blocks());
    let f = factor_complement(&e)?;
    println!("complement generators:");
    for g in &f.generators {
        println!("  {g}");
    }
    println!("pairing {:?}, verified: {}", f.pairing, f.verify().passed());

    let chain = ChainSpace::canonical(&[2, 6, 12, 60])?;
    let d = decompose_chain(&chain);
    println!("sizes {:?} -> primes {:?} per level {:?}", chain.sizes(), d.primes, d.per_level);
    println!("st = {}", steinitz_of_chain(&chain));

    let small = ChainSpace::canonical(&[2, 4, 12])?;
    let r = retensor(&small)?;
    println!("atom map of {:?}: {:?}", small.sizes(), r.atom_map);
    println!("re-tensoring verified: {}", verify_retensor(&small, &r)?.passed());

    let (a, b) = (ChainSpace::canonical(&[2, 6])?, ChainSpace::canonical(&[3, 6])?);
    match iso_test(&a, &b)? {
        IsoOutcome::IsomorphicTruncations { bijection } => println!("[2,6] ~ [3,6] via {bijection:?}"),
        other => println!("[2,6] vs [3,6]: {other:?}"),
    }
    Ok(())
}
