//! Arithmetic on Steinitz numbers: products, lcms, divisibility.

use hamlat::steinitz::SteinitzNumber;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a: SteinitzNumber = "2^3*3".parse()?;
    let b: SteinitzNumber = "3^inf*5".parse()?;
    println!("a = {a}, b = {b}");
    println!("a * b   = {}", a.mul(&b));
    println!("lcm     = {}", a.lcm(&b));
    println!("gcd     = {}", a.gcd(&b));
    println!("a | a*b = {}", a.divides(&a.mul(&b)));

    let twelve = SteinitzNumber::from_natural(12)?;
    println!("12 = {twelve}, finite value {}", twelve.to_natural()?);
    // infinite exponents have no natural value
    println!("b finite? {}", b.is_finite());
    Ok(())
}
