//! Which (F, n) pairs give a bounded fundamental solution.

use wolffkit::measure::AmbientSpace;
use wolffkit::radial::check_int_div;
use wolffkit::NFunction;

fn main() -> wolffkit::Result<()> {
    let cases = [
        ("power(3)", NFunction::power(3.0)?, 2),
        ("power(2)", NFunction::power(2.0)?, 3),
        ("power(3)", NFunction::power(3.0)?, 3),
        ("power(4)", NFunction::power(4.0)?, 3),
        ("zygmund(2, 1)", NFunction::zygmund(2.0, 1.0)?, 3),
        ("zygmund(3, 2)", NFunction::zygmund(3.0, 2.0)?, 3),
    ];
    for (label, f, n) in cases {
        match check_int_div(&f, &AmbientSpace::new(n)?) {
            Ok(rep) => {
                let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
                println!(
                    "{label:<14} n = {n}: {:<9}  last dyadic terms {:.3e} / {:.3e}",
                    if rep.bounded { "bounded" } else { "unbounded" },
                    last(&rep.kernel_terms),
                    last(&rep.conjugate_terms)
                );
            }
            // logarithmic borderline: the dyadic tails decay too slowly to classify
            Err(e) => println!("{label:<14} n = {n}: {e}"),
        }
    }
    Ok(())
}
