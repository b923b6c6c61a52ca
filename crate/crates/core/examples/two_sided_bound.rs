//! Ratios of the solution to its Wolff-potential bounds on mollified point
//! masses of shrinking width.

use wolffkit::measure::AmbientSpace;
use wolffkit::radial::{mollified_dirac, solve_radial, verify_two_sided_bound};
use wolffkit::wolff::WolffOptions;
use wolffkit::NFunction;

fn main() -> wolffkit::Result<()> {
    let opts = WolffOptions::default();
    let sp = AmbientSpace::new(3)?;
    for (label, f) in [("power(2)", NFunction::power(2.0)?), ("zygmund(2, 1)", NFunction::zygmund(2.0, 1.0)?)] {
        println!("{label}");
        for eps in [1e-3, 1e-2, 1e-1] {
            let sol = solve_radial(&f, &mollified_dirac(sp, eps)?, 1.0)?;
            let rep = verify_two_sided_bound(&sol, &[0.0, 0.1, 0.3], &[0.025, 0.05, 0.1], &opts)?;
            let up = rep.up_range().unwrap_or((f64::NAN, f64::NAN));
            let fmt = |r: Option<(f64, f64)>| match r {
                Some((lo, hi)) => format!("[{lo:.3}, {hi:.3}]"),
                None => "none applicable".into(),
            };
            println!(
                "  eps = {eps:<6} u(0) = {:<10.4} upper ratio in [{:.3}, {:.3}], lower ratio {}",
                sol.value(0.0)?,
                up.0,
                up.1,
                fmt(rep.low_range())
            );
        }
    }
    Ok(())
}
