//! Wolff energies: infinite for a point mass below the critical exponent,
//! finite above it and for bounded densities.

use wolffkit::measure::{AmbientSpace, RadonMeasure};
use wolffkit::wolff::{hedberg_wolff_energy, WolffOptions};
use wolffkit::NFunction;

fn main() -> wolffkit::Result<()> {
    let opts = WolffOptions::default();
    let s3 = AmbientSpace::new(3)?;
    let s2 = AmbientSpace::new(2)?;
    let cases = [
        ("delta, n = 3, p = 2", RadonMeasure::dirac(s3), NFunction::power(2.0)?, 1.0),
        ("delta, n = 2, p = 3", RadonMeasure::dirac(s2), NFunction::power(3.0)?, 1.0),
        (
            "unit density on B(0, 1), n = 3, p = 2",
            RadonMeasure::uniform_ball(s3, 1.0, s3.omega_n())?,
            NFunction::power(2.0)?,
            0.5,
        ),
        (
            "same density, zygmund(2, 1)",
            RadonMeasure::uniform_ball(s3, 1.0, s3.omega_n())?,
            NFunction::zygmund(2.0, 1.0)?,
            0.5,
        ),
    ];
    for (label, m, f, r) in &cases {
        let e = hedberg_wolff_energy(m, f, *r, &opts)?;
        println!("{label:<40} R = {r:<4} energy {:<22} {}", e.value, e.status.as_str());
    }
    Ok(())
}
