//! Periodic sequences as elements of `H(u)`, and the pseudorank of
//! eventually periodic ones.

use hamlat::periodic::{steinitz_truncation_check, EventuallyPeriodicSequence, PeriodicSequence};
use hamlat::steinitz::SteinitzNumber;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a: PeriodicSequence = "011011".parse()?;
    let b: PeriodicSequence = "10".parse()?;
    println!("{a}: period {}, rank {}", a.period(), a.rank());
    println!("{a} + {b} = {} (period {})", a.add(&b)?, a.add(&b)?.period());
    println!("{a} * {b} = {}", a.mul(&b)?);

    let u: SteinitzNumber = "2*3^inf".parse()?;
    println!("{a} in H({u}): {}", a.is_u_periodic(&u));
    println!("{b} in H({u}): {}", b.is_u_periodic(&u));
    println!("{} in H({u}): {}", a.add(&b)?, a.add(&b)?.is_u_periodic(&u));

    let e: EventuallyPeriodicSequence = "111:10".parse()?;
    println!("{e}: pseudorank {}, null: {}", e.besicovitch_pseudorank(), e.is_null());

    let report = steinitz_truncation_check(&u, &[2, 3, 6, 9, 18])?;
    println!("truncation {} divides {u}: {}", report.truncated, report.divides_u);
    Ok(())
}
