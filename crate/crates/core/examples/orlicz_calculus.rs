//! Values, indices, inverse and conjugate of a few N-functions.

use wolffkit::orlicz::log_grid;
use wolffkit::NFunction;

fn main() -> wolffkit::Result<()> {
    let families = [
        ("power(2)", NFunction::power(2.0)?),
        ("power(3)", NFunction::power(3.0)?),
        ("zygmund(2, 1)", NFunction::zygmund(2.0, 1.0)?),
        ("zygmund(2, -1)", NFunction::zygmund(2.0, -1.0)?),
        ("power(2) * zygmund(1.5, 1)", NFunction::product(NFunction::power(2.0)?, NFunction::zygmund(1.5, 1.0)?)?),
    ];
    println!("{:<28} {:>8} {:>8} {:>12} {:>12} {:>12}", "family", "i_G", "s_G", "G(2)", "g^-1(1)", "G~(1)");
    for (name, f) in &families {
        let ix = f.indices();
        println!(
            "{:<28} {:>8.4} {:>8.4} {:>12.6} {:>12.6} {:>12.6}",
            name,
            ix.i_g,
            ix.s_g,
            f.value(2.0)?,
            f.inverse_deriv(1.0)?,
            f.conjugate(1.0)?
        );
    }

    let f = &families[2].1;
    let eq = f.check_equivalences(&log_grid(1e-4, 1e4, 200))?;
    println!("\nzygmund(2, 1) on [1e-4, 1e4]:");
    println!("  t g(t) / G(t)      in [{:.4}, {:.4}]", eq.tg_over_g.min, eq.tg_over_g.max);
    println!("  G~(g(t)) / G(t)    in [{:.4}, {:.4}]", eq.conjugate_over_g.min, eq.conjugate_over_g.max);
    println!("  g^-1(2y) / g^-1(y) in [{:.4}, {:.4}]", eq.inverse_doubling.min, eq.inverse_doubling.max);

    let t = 0.7;
    let s = f.deriv(t)?;
    println!("  Young gap at s = g(t): {:e}", f.young_gap(t, s)?);
    println!("  Young gap at s = 2 g(t): {:e}", f.young_gap(t, 2.0 * s)?);
    Ok(())
}
