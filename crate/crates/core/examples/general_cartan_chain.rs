//! A chain of Cartan subalgebras whose union is not conjugate to the
//! diagonal one, and the exhaustive check over `GL_4(GF(2))`.

use hamlat::locmatrix::{build_theorem3_chain, verify_theorem3, Gf2, VerifyMode, DEFAULT_BUDGET};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes = std::env::args().nth(1).unwrap_or_else(|| "2,4".into());
    let sizes: Vec<usize> = sizes.split(',').map(str::parse).collect::<Result<_, _>>()?;
    let chain = build_theorem3_chain::<Gf2>(&sizes)?;
    for check in &chain.checks {
        println!(
            "level {}: frame valid {}, contains lower {}, intersection dim {}",
            check.level, check.frame_valid, check.contains_lower, check.intersection_dim
        );
    }
    let level = sizes.len() - 1;
    let report = verify_theorem3(&chain, level, VerifyMode::Exhaustive, DEFAULT_BUDGET)?;
    println!(
        "{} candidates, {} invertible: in span {}, moves {}, normalizes then moves {}",
        report.candidates,
        report.invertible,
        report.tallies.in_span,
        report.tallies.moves_at_k,
        report.tallies.normalizes_then_moves
    );
    println!("violations: {}", report.violations);
    Ok(())
}
