//! Radial fundamental solutions against their closed forms, plus the
//! weak-form residual and the fitted pole exponent.

use std::f64::consts::PI;

use wolffkit::measure::{AmbientSpace, RadonMeasure};
use wolffkit::radial::{default_bumps, default_fit_range, fit_asymptotics, solve_radial, verify_weak_form};
use wolffkit::NFunction;

fn main() -> wolffkit::Result<()> {
    let sp = AmbientSpace::new(3)?;
    let f = NFunction::power(2.0)?;
    let sol = solve_radial(&f, &RadonMeasure::dirac(sp), 1.0)?;
    println!("{:>6} {:>16} {:>16}", "r", "u(r)", "(1/r - 1)/(8 pi)");
    for r in [0.01, 0.1, 0.25, 0.5, 0.9] {
        println!("{:>6} {:>16.10} {:>16.10}", r, sol.value(r)?, (1.0 / r - 1.0) / (8.0 * PI));
    }
    let weak = verify_weak_form(&sol, &default_bumps(1.0, 20), 1e-7)?;
    println!("max weak-form residual over 20 bumps: {:.2e}", weak.max_residual);

    for (label, f) in [
        ("power(1.5)", NFunction::power(1.5)?),
        ("power(2)", NFunction::power(2.0)?),
        ("zygmund(2, 1)", NFunction::zygmund(2.0, 1.0)?),
    ] {
        let sol = solve_radial(&f, &RadonMeasure::dirac(sp), 1.0)?;
        let fit = fit_asymptotics(&sol, default_fit_range(&f))?;
        match fit.log_exponent {
            Some(l) => println!("{label:<14} exponent {:+.4}, log exponent {:+.4}", fit.exponent, l),
            None => println!("{label:<14} exponent {:+.4}", fit.exponent),
        }
    }
    Ok(())
}
