//! Wolff potentials of a point mass: finite off the atom, divergent on it,
//! and the dyadic sum next to the integral.

use wolffkit::measure::{AmbientSpace, RadonMeasure};
use wolffkit::wolff::{continuity_scan, cube_points, dyadic_wolff, wolff_potential, WolffOptions};
use wolffkit::NFunction;

fn main() -> wolffkit::Result<()> {
    let opts = WolffOptions::default();
    let f = NFunction::power(2.0)?;
    let sp = AmbientSpace::new(3)?;
    let delta = RadonMeasure::dirac(sp);

    let x0 = [0.1, 0.0, 0.0];
    let w = wolff_potential(&delta, &f, &x0, 0.2, &opts)?;
    println!("W(x0, 0.2), |x0| = 0.1: {} ({}, error {:.1e}, {} panels)", w.value, w.status.as_str(), w.error, w.panels);
    println!("dyadic sum, K = 30:     {}", dyadic_wolff(&delta, &f, &x0, 0.2, 30)?);

    let w = wolff_potential(&delta, &f, &[0.0; 3], 0.2, &opts)?;
    println!("W(0, 0.2):              {} ({})", w.value, w.status.as_str());

    let planar = wolff_potential(
        &RadonMeasure::dirac(AmbientSpace::new(2)?),
        &NFunction::power(3.0)?,
        &[0.0, 0.0],
        1.0,
        &opts,
    )?;
    println!("n = 2, p = 3, W(0, 1):  {} (2/sqrt 3 = {})", planar.value, 2.0 / 3f64.sqrt());

    let ball = RadonMeasure::uniform_ball(sp, 1.0, sp.omega_n())?;
    let pts = cube_points(&[0.0; 3], 0.5, 5);
    println!("\ncontinuity scan of the unit-density ball:");
    for r in [0.4, 0.2, 0.1, 0.05] {
        let s = continuity_scan(&ball, &f, &pts, r, &opts)?;
        println!("  r = {r:<5} sup W = {:.6e}  majorant {:.6e}", s.sup, sp.omega_n() * r * r / 4.0);
    }
    Ok(())
}
