//! Closed-ball masses for atoms, radial densities and a cell grid.

use wolffkit::measure::{AmbientSpace, Atom, RadialProfile, RadonMeasure};

fn main() -> wolffkit::Result<()> {
    let sp = AmbientSpace::new(3)?;
    let atoms = RadonMeasure::atoms(
        sp,
        vec![
            Atom { x: vec![0.0, 0.0, 0.0], mass: 1.0 },
            Atom { x: vec![0.5, 0.0, 0.0], mass: 2.0 },
        ],
    )?;
    let ball = RadonMeasure::uniform_ball(sp, 0.5, 1.0)?;
    let shell = RadonMeasure::radial(
        sp,
        RadialProfile::Annulus {
            density: 1.0,
            inner: 0.2,
            outer: 0.4,
        },
    )?;
    let grid = ball.grid_from_radial(0.05, 0.55)?;

    let x = [0.3, 0.1, 0.0];
    println!("mu(B(x, r)) at x = {x:?}");
    println!("{:>6} {:>10} {:>12} {:>12} {:>12} {:>10}", "r", "atoms", "ball", "annulus", "grid", "grid err");
    for r in [0.05, 0.1, 0.2, 0.3, 0.5, 1.0] {
        let (g, bound) = grid.ball_mass_with_bound(&x, r)?;
        println!(
            "{:>6} {:>10} {:>12.6} {:>12.6} {:>12.6} {:>10.2e}",
            r,
            atoms.ball_mass(&x, r)?,
            ball.ball_mass(&x, r)?,
            shell.ball_mass(&x, r)?,
            g,
            bound
        );
    }
    println!("total masses: {} {} {:.6} {:.6}", atoms.total_mass(), ball.total_mass(), shell.total_mass(), grid.total_mass());
    Ok(())
}
