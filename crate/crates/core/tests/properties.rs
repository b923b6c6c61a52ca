use proptest::prelude::*;

use wolffkit::measure::{AmbientSpace, Atom, RadialProfile, RadonMeasure};
use wolffkit::radial::solve_radial;
use wolffkit::rearrangement::{rearrange, SampledFunction};
use wolffkit::wolff::{dyadic_wolff, wolff_potential, WolffOptions};
use wolffkit::NFunction;

fn family() -> impl Strategy<Value = NFunction> {
    prop_oneof![
        (1.2f64..5.0).prop_map(|p| NFunction::power(p).unwrap()),
        (1.5f64..4.0, -1.0f64..2.0).prop_map(|(p, a)| NFunction::zygmund(p, a).unwrap()),
    ]
}

fn atoms(n: usize) -> impl Strategy<Value = Vec<Atom>> {
    prop::collection::vec(
        (prop::collection::vec(-1.0f64..1.0, n), 0.1f64..2.0).prop_map(|(x, mass)| Atom { x, mass }),
        1..5,
    )
}

// dyadic-rational widths keep every partial sum exact
fn steps() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..10.0, (1u32..64).prop_map(|k| k as f64 / 64.0)), 1..12)
}

fn sp(n: usize) -> AmbientSpace {
    AmbientSpace::new(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn young_gap_is_nonnegative(f in family(), lt in -6.0f64..6.0, ls in -6.0f64..6.0) {
        let (t, s) = (10f64.powf(lt), 10f64.powf(ls));
        let gap = f.young_gap(t, s).unwrap();
        prop_assert!(gap >= -1e-12 * (1.0 + f.value(t).unwrap() + f.conjugate(s).unwrap()));
    }

    #[test]
    fn inverse_round_trip(f in family(), lt in -6.0f64..6.0) {
        let t = 10f64.powf(lt);
        let back = f.inverse_deriv(f.deriv(t).unwrap()).unwrap();
        prop_assert!((back - t).abs() <= 1e-9 * t);
    }

    #[test]
    fn index_sandwich(f in family(), lt in -7.0f64..7.0) {
        let t = 10f64.powf(lt);
        let ix = f.indices();
        let r = t * f.deriv(t).unwrap() / f.value(t).unwrap();
        prop_assert!(r >= ix.i_g * (1.0 - 1e-9) && r <= ix.s_g * (1.0 + 1e-9), "{r} not in [{}, {}]", ix.i_g, ix.s_g);
    }

    #[test]
    fn power_comparison(f in family(), lt in 0.0f64..4.0, lam in 1.0f64..20.0) {
        // G(λt) lies between λ^{i_G} G(t) and λ^{s_G} G(t) for λ ≥ 1
        let t = 10f64.powf(lt - 2.0);
        let ix = f.indices();
        let g = f.value(t).unwrap();
        let gl = f.value(lam * t).unwrap();
        prop_assert!(gl >= lam.powf(ix.i_g) * g * (1.0 - 1e-8));
        prop_assert!(gl <= lam.powf(ix.s_g) * g * (1.0 + 1e-8));
    }

    #[test]
    fn ball_mass_is_monotone(n in 2usize..4, d in 0.0f64..1.0, r1 in 0.0f64..1.5, dr in 0.0f64..1.0) {
        let m = RadonMeasure::radial(sp(n), RadialProfile::Annulus { density: 1.0, inner: 0.2, outer: 0.6 }).unwrap();
        let mut x = vec![0.0; n];
        x[0] = d;
        let a = m.ball_mass(&x, r1).unwrap();
        let b = m.ball_mass(&x, r1 + dr).unwrap();
        prop_assert!(b >= a - 1e-12);
        prop_assert!(b <= m.total_mass() * (1.0 + 1e-9));
    }

    #[test]
    fn atom_masses_add(a in atoms(3), b in atoms(3), x in prop::collection::vec(-1.0f64..1.0, 3), r in 0.0f64..2.0) {
        let ma = RadonMeasure::atoms(sp(3), a.clone()).unwrap();
        let mb = RadonMeasure::atoms(sp(3), b.clone()).unwrap();
        let both = RadonMeasure::atoms(sp(3), a.into_iter().chain(b).collect()).unwrap();
        let lhs = both.ball_mass(&x, r).unwrap();
        let rhs = ma.ball_mass(&x, r).unwrap() + mb.ball_mass(&x, r).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn equimeasurable(s in steps(), lambda in 0.0f64..10.0) {
        let f = SampledFunction::new(s).unwrap();
        let prof = rearrange(&f);
        prop_assert_eq!(f.distribution(lambda), prof.level_length(lambda));
    }

    #[test]
    fn maximal_function_dominates(s in steps(), t in 0.001f64..12.0) {
        let f = SampledFunction::new(s).unwrap();
        let prof = rearrange(&f);
        prop_assert!(prof.f_star_star(t) >= prof.f_star(t) * (1.0 - 1e-12));
        prop_assert!(prof.f_star_star(t * 1.5) <= prof.f_star_star(t) * (1.0 + 1e-12));
        prop_assert!(prof.integral_to(t * 1.5) >= prof.integral_to(t) * (1.0 - 1e-12));
    }

    #[test]
    fn rearrangement_keeps_integral(s in steps()) {
        let f = SampledFunction::new(s).unwrap();
        let prof = rearrange(&f);
        let total = prof.total_measure();
        prop_assert!((prof.integral_to(total) - f.integral()).abs() <= 1e-12 * (1.0 + f.integral()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wolff_monotone_in_radius(f in family(), a in atoms(3), r1 in 0.05f64..1.0, dr in 0.0f64..1.0) {
        let opts = WolffOptions::default();
        let m = RadonMeasure::atoms(sp(3), a).unwrap();
        let x = [0.31, -0.17, 0.05];
        let w1 = wolff_potential(&m, &f, &x, r1, &opts).unwrap();
        let w2 = wolff_potential(&m, &f, &x, r1 + dr, &opts).unwrap();
        prop_assert!(w2.value >= w1.value * (1.0 - 1e-8));
    }

    #[test]
    fn wolff_monotone_in_measure(f in family(), a in atoms(3), b in atoms(3)) {
        let opts = WolffOptions::default();
        let x = [0.31, -0.17, 0.05];
        let small = RadonMeasure::atoms(sp(3), a.clone()).unwrap();
        let big = RadonMeasure::atoms(sp(3), a.into_iter().chain(b).collect()).unwrap();
        let ws = wolff_potential(&small, &f, &x, 0.8, &opts).unwrap();
        let wb = wolff_potential(&big, &f, &x, 0.8, &opts).unwrap();
        prop_assert!(wb.value >= ws.value * (1.0 - 1e-8));
    }

    #[test]
    fn doubling_the_measure(f in family(), d in 0.05f64..0.5) {
        let opts = WolffOptions::default();
        let m = RadonMeasure::uniform_ball(sp(3), 0.3, 1.0).unwrap();
        let m2 = m.scaled(2.0).unwrap();
        let x = [d, 0.0, 0.0];
        let w = wolff_potential(&m, &f, &x, 0.5, &opts).unwrap().value;
        let w2 = wolff_potential(&m2, &f, &x, 0.5, &opts).unwrap().value;
        let c = f.inverse_doubling_constant();
        prop_assert!(w2 <= c * w * (1.0 + 1e-7), "{w2} > {c} * {w}");
        prop_assert!(w2 >= w * (1.0 - 1e-9));
        if let Some(p) = f.power_exponent() {
            prop_assert!((w2 - 2f64.powf(1.0 / (p - 1.0)) * w).abs() <= 1e-7 * w2);
        }
    }

    #[test]
    fn dyadic_sum_is_comparable(f in family(), a in atoms(3)) {
        // on [R_{k+1}, R_k] the integrand sits between the dyadic terms at
        // neighbouring radii, up to g⁻¹(2^{n-1} y) ≤ c^{n-1} g⁻¹(y)
        let opts = WolffOptions::default();
        let m = RadonMeasure::atoms(sp(3), a).unwrap();
        let x = [0.31, -0.17, 0.05];
        let c2 = f.inverse_doubling_constant().powi(2);
        let w = wolff_potential(&m, &f, &x, 0.6, &opts).unwrap().value;
        let w_double = wolff_potential(&m, &f, &x, 1.2, &opts).unwrap().value;
        let d = dyadic_wolff(&m, &f, &x, 0.6, 40).unwrap();
        prop_assert!(w <= c2 * d * (1.0 + 1e-9), "W = {w}, dyadic = {d}");
        prop_assert!(d <= 0.5 * c2 * w_double * (1.0 + 1e-9), "W(2R) = {w_double}, dyadic = {d}");
    }

    #[test]
    fn comparison_principle(f in family(), n in 2usize..4, m1 in 0.1f64..1.0, extra in 0.0f64..1.0, r in 0.0f64..0.95) {
        let small = RadonMeasure::uniform_ball(sp(n), 0.2, m1).unwrap();
        let big = RadonMeasure::uniform_ball(sp(n), 0.2, m1 + extra).unwrap();
        let u1 = solve_radial(&f, &small, 1.0).unwrap().value(r).unwrap();
        let u2 = solve_radial(&f, &big, 1.0).unwrap().value(r).unwrap();
        prop_assert!(u2 >= u1 * (1.0 - 1e-9));
    }
}
