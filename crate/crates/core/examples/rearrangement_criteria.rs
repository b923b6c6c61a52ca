//! Decreasing rearrangements of step data and the Lorentz and
//! Marcinkiewicz functionals built on them.

use wolffkit::rearrangement::{lorentz_functional, marcinkiewicz_check, rearrange, PowerHead, SampledFunction};
use wolffkit::NFunction;

fn main() -> wolffkit::Result<()> {
    let f = SampledFunction::new(vec![(1.0, 0.75), (4.0, 0.25)])?;
    let prof = rearrange(&f);
    println!("two-step data: f*(0.5) = {}, f**(0.5) = {}", prof.f_star(0.5), prof.f_star_star(0.5));
    for lambda in [0.5, 2.0, 5.0] {
        println!("  |{{f > {lambda}}}| = {} and |{{f* > {lambda}}}| = {}", f.distribution(lambda), prof.level_length(lambda));
    }

    let g = NFunction::power(2.0)?;
    let n = 3;
    let rep = lorentz_functional(&f, &g, n)?;
    println!("\nLorentz functional, bounded data: {:.6} ({})", rep.value, rep.verdict.as_str());

    // f*(t) = t^{-p/n} sits exactly on the borderline
    let tail = SampledFunction::with_head(
        Vec::new(),
        Some(PowerHead {
            coefficient: 1.0,
            exponent: 2.0 / 3.0,
            extent: 1.0,
        }),
    )?;
    let rep = lorentz_functional(&tail, &g, n)?;
    println!("Lorentz functional, t^(-2/3) head: {} ({})", rep.value, rep.verdict.as_str());

    let rep = marcinkiewicz_check(&f, &g, n, 0.5)?;
    println!("Marcinkiewicz sup, theta = 0.5: {:.6} ({})", rep.value, rep.verdict.as_str());
    Ok(())
}
