//! Exact radial solutions of `-div(g(|Du|) Du/|Du|) = μ` in `B(0, R_out)`
//! with `u = 0` on the boundary, for measures radially symmetric about 0.
//!
//! For such data the flux through `∂B(0, r)` equals the enclosed mass, so
//! `-u'(r) = g⁻¹(μ(B̄(0, r)) / (nω_n r^{n-1}))` and `u` is one quadrature away.

use nalgebra::{DMatrix, DVector};

use crate::dyadic::{classify_tail, integrate_to_origin, DyadicOptions, Status, TailVerdict};
use crate::error::{domain, Error, Result};
use crate::measure::{AmbientSpace, MeasureKind, RadialProfile, RadonMeasure};
use crate::orlicz::{log_grid, NFunction};
use crate::quadrature::{adaptive, adaptive_with_breaks, QuadOptions};
use crate::wolff::{kernel, wolff_potential, Trap, WolffOptions};

/// Radial solution `u(r)` for a measure supported in `B̄(0, R_out)`.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    f: NFunction,
    m: RadonMeasure,
    r_out: f64,
    breaks: Vec<f64>,
}

const PROFILE_QUAD: QuadOptions = QuadOptions {
    abs_tol: 0.0,
    rel_tol: 1e-13,
    max_intervals: 200,
};

/// Builds the radial solution for `m` on `B(0, r_out)`.
pub fn solve_radial(f: &NFunction, m: &RadonMeasure, r_out: f64) -> Result<RadialSolution> {
    if !(r_out > 0.0 && r_out.is_finite()) {
        return Err(domain(format!(
            "outer radius must be positive, got {r_out}"
        )));
    }
    let extent = m.radial_extent().ok_or_else(|| {
        domain("the radial solver needs a measure radially symmetric about the origin")
    })?;
    if extent > r_out {
        return Err(domain(format!(
            "measure support radius {extent} exceeds R_out = {r_out}"
        )));
    }
    let origin = vec![0.0; m.space().n()];
    let breaks = m.jump_radii(&origin);
    Ok(RadialSolution {
        f: f.clone(),
        m: m.clone(),
        r_out,
        breaks,
    })
}

impl RadialSolution {
    pub fn nfunction(&self) -> &NFunction {
        &self.f
    }

    pub fn measure(&self) -> &RadonMeasure {
        &self.m
    }

    pub fn space(&self) -> &AmbientSpace {
        self.m.space()
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    /// `μ(B̄(0, r))`.
    pub fn center_mass(&self, r: f64) -> Result<f64> {
        self.m.ball_mass(&vec![0.0; self.space().n()], r)
    }

    /// `v(r) = -u'(r) = g⁻¹(μ(B̄(0, r)) / (nω_n r^{n-1}))`.
    pub fn gradient(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(domain(format!("gradient needs r > 0, got {r}")));
        }
        let sp = self.space();
        let flux = self.center_mass(r)? / (sp.surface() * r.powi(sp.n() as i32 - 1));
        kernel(&self.f, flux)
    }

    fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let trap = Trap::new();
        let v = |s: f64| trap.eval(self.gradient(s));
        // geometric panels keep the 1/s-type growth near a resolved
        let mut cuts: Vec<f64> = self
            .breaks
            .iter()
            .copied()
            .filter(|&c| c > a && c < b)
            .collect();
        let mut t = 2.0 * a;
        while t < b {
            cuts.push(t);
            t *= 2.0;
        }
        let q = adaptive_with_breaks(&v, a, b, &cuts, &PROFILE_QUAD);
        trap.check()?;
        if !q.value.is_finite() {
            return Err(Error::Numerical(format!(
                "u quadrature on [{a:e}, {b:e}] is not finite"
            )));
        }
        Ok(q.value)
    }

    /// `u(r)` for `r ∈ [0, R_out]`; `u(0)` may be `+∞`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(domain(format!("u evaluated at negative radius {r}")));
        }
        if r >= self.r_out {
            return Ok(0.0);
        }
        if r > 0.0 {
            return self.integrate(r, self.r_out);
        }
        self.value_at_origin()
    }

    fn value_at_origin(&self) -> Result<f64> {
        if self.m.is_zero() {
            return Ok(0.0);
        }
        let trap = Trap::new();
        let v = |s: f64| trap.eval(self.gradient(s));
        let origin = vec![0.0; self.space().n()];
        let empty = self.m.empty_radius(&origin);
        let opts = DyadicOptions {
            tol: 1e-11,
            ..Default::default()
        };
        let out = integrate_to_origin(&v, self.r_out, &self.breaks, |lo| lo <= empty, &opts)?;
        trap.check()?;
        match out.status {
            Status::Converged => Ok(out.value),
            Status::Diverges => Ok(f64::INFINITY),
            Status::Undecided => Err(Error::Undecided(format!(
                "u(0): {}",
                out.diagnostic
                    .unwrap_or_else(|| "dyadic tail undecided".into())
            ))),
        }
    }

    /// `u` at several radii, accumulated from the outside in.
    pub fn profile(&self, radii: &[f64]) -> Result<Vec<f64>> {
        let mut order: Vec<usize> = (0..radii.len()).collect();
        order.sort_by(|&i, &j| radii[j].total_cmp(&radii[i]));
        let mut out = vec![0.0; radii.len()];
        let mut prev_r = self.r_out;
        let mut acc = 0.0;
        for i in order {
            let r = radii[i];
            if r >= self.r_out {
                out[i] = 0.0;
                continue;
            }
            if r == 0.0 {
                out[i] = self.value(0.0)?;
                continue;
            }
            acc += self.integrate(r, prev_r)?;
            prev_r = r;
            out[i] = acc;
        }
        Ok(out)
    }

    /// `∫ φ dμ` for a radial test function.
    fn integrate_against_measure(
        &self,
        phi: &dyn Fn(f64) -> f64,
        support: (f64, f64),
    ) -> Result<f64> {
        let sp = *self.space();
        match self.m.kind() {
            MeasureKind::Atoms(atoms) => Ok(atoms.iter().map(|a| a.mass * phi(0.0)).sum()),
            MeasureKind::Radial { profile, .. } => {
                let w = |s: f64| {
                    phi(s) * profile.density(&sp, s) * sp.surface() * s.powi(sp.n() as i32 - 1)
                };
                let q = adaptive_with_breaks(
                    &w,
                    support.0,
                    support.1,
                    &profile.breakpoints(),
                    &WEAK_QUAD,
                );
                Ok(q.value)
            }
            MeasureKind::Grid(_) => Err(domain("grid measures are not radial")),
        }
    }
}

const WEAK_QUAD: QuadOptions = QuadOptions {
    abs_tol: 1e-15,
    rel_tol: 1e-11,
    max_intervals: 400,
};

/// Radial bump `exp(-1/(1-t²))` on `(a, b)`, `t` the affine coordinate.
/// With `a = 0` and `centered` the bump is `ψ(r/b)`, smooth through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
    pub centered: bool,
}

impl Bump {
    fn coord(&self, r: f64) -> (f64, f64) {
        if self.centered {
            (r / self.b, 1.0 / self.b)
        } else {
            let w = self.b - self.a;
            ((2.0 * r - self.a - self.b) / w, 2.0 / w)
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let (t, _) = self.coord(r);
        if t.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - t * t)).exp()
        }
    }

    pub fn deriv(&self, r: f64) -> f64 {
        let (t, dt) = self.coord(r);
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - t * t;
        (-1.0 / q).exp() * (-2.0 * t / (q * q)) * dt
    }

    fn support(&self) -> (f64, f64) {
        if self.centered {
            (0.0, self.b)
        } else {
            (self.a, self.b)
        }
    }
}

/// Default family: `count` bumps, alternating centered balls and annuli
/// spread over `(0, R_out)`.
pub fn default_bumps(r_out: f64, count: usize) -> Vec<Bump> {
    (0..count)
        .map(|i| {
            let s = (i / 2) as f64 / count.div_ceil(2) as f64;
            if i % 2 == 0 {
                Bump {
                    a: 0.0,
                    b: r_out * (0.1 + 0.85 * s),
                    centered: true,
                }
            } else {
                let a = r_out * (0.01 + 0.8 * s);
                Bump {
                    a,
                    b: a + r_out * 0.15,
                    centered: false,
                }
            }
        })
        .collect()
}

/// Weak-form residuals of a radial solution.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakFormReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub worst: Bump,
}

/// Checks `-∫ g(v) φ' nω_n r^{n-1} dr = ∫ φ dμ` for each bump; fails when
/// a residual exceeds `tol · (1 + ∫ φ dμ)`.
pub fn verify_weak_form(sol: &RadialSolution, bumps: &[Bump], tol: f64) -> Result<WeakFormReport> {
    if bumps.is_empty() {
        return Err(domain("weak form check needs at least one test function"));
    }
    let sp = *sol.space();
    let mut residuals = Vec::with_capacity(bumps.len());
    let mut worst = (0.0f64, bumps[0], 0.0f64);
    for bump in bumps {
        let (lo, hi) = bump.support();
        if hi > sol.r_out() {
            return Err(domain(format!(
                "test function support ({lo}, {hi}) leaves B(0, R_out)"
            )));
        }
        let trap = Trap::new();
        let flux = |r: f64| {
            if r <= 0.0 {
                return 0.0;
            }
            let dphi = bump.deriv(r);
            if dphi == 0.0 {
                return 0.0;
            }
            let g = trap.eval(sol.gradient(r).and_then(|v| sol.f.deriv(v)));
            g * dphi * sp.surface() * r.powi(sp.n() as i32 - 1)
        };
        let lhs = -adaptive_with_breaks(&flux, lo, hi, &sol.breaks, &WEAK_QUAD).value;
        trap.check()?;
        let rhs = sol.integrate_against_measure(&|r| bump.value(r), (lo, hi))?;
        let res = (lhs - rhs).abs();
        residuals.push(res);
        let scaled = res / (1.0 + rhs.abs());
        if scaled >= worst.0 {
            worst = (scaled, *bump, res);
        }
    }
    if worst.0 > tol {
        return Err(Error::Verification(format!(
            "weak-form residual {:e} exceeds tolerance {tol:e} for the bump on ({}, {})",
            worst.2, worst.1.a, worst.1.b
        )));
    }
    Ok(WeakFormReport {
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
        worst: worst.1,
    })
}

/// One probe of the two-sided estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub probe: f64,
    pub radius: f64,
    pub u: f64,
    pub inf: f64,
    pub wolff: f64,
    /// `u / (W - R)`, reported only when `W ≥ 2R`.
    pub ratio_low: Option<f64>,
    /// `u / (inf + W + R)`.
    pub ratio_up: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    fn range(vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
        vals.fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    /// `(min, max)` of the applicable lower ratios.
    pub fn low_range(&self) -> Option<(f64, f64)> {
        Self::range(self.rows.iter().filter_map(|r| r.ratio_low))
    }

    /// `(min, max)` of the finite upper ratios.
    pub fn up_range(&self) -> Option<(f64, f64)> {
        Self::range(
            self.rows
                .iter()
                .filter_map(|r| r.ratio_up)
                .filter(|v| *v > 0.0),
        )
    }

    pub fn skipped(&self) -> usize {
        self.rows.iter().filter(|r| r.skipped.is_some()).count()
    }
}

/// Two-sided estimate `C_L(W - R) ≤ u(x) ≤ C_U(inf_{B(x,R)} u + W + R)` at
/// radial probes `x e₁` for every radius in `radii`.
pub fn verify_two_sided_bound(
    sol: &RadialSolution,
    probes: &[f64],
    radii: &[f64],
    opts: &WolffOptions,
) -> Result<BoundReport> {
    let n = sol.space().n();
    let mut rows = Vec::new();
    for &x in probes {
        if !(x >= 0.0 && x < sol.r_out()) {
            return Err(domain(format!("probe {x} outside [0, R_out)")));
        }
        let u = sol.value(x)?;
        for &radius in radii {
            let mut row = BoundRow {
                probe: x,
                radius,
                u,
                inf: f64::NAN,
                wolff: f64::NAN,
                ratio_low: None,
                ratio_up: None,
                skipped: None,
            };
            if !u.is_finite() {
                row.skipped = Some("u diverges at the probe".into());
                rows.push(row);
                continue;
            }
            let inf = sol.value((x + radius).min(sol.r_out()))?;
            let mut point = vec![0.0; n];
            point[0] = x;
            let w = wolff_potential(sol.measure(), sol.nfunction(), &point, radius, opts)?;
            row.inf = inf;
            row.wolff = w.value;
            if w.status != Status::Converged {
                row.skipped = Some(format!("potential {}", w.status));
                rows.push(row);
                continue;
            }
            row.ratio_up = Some(u / (inf + w.value + radius));
            if w.value >= 2.0 * radius {
                row.ratio_low = Some(u / (w.value - radius));
            }
            rows.push(row);
        }
    }
    Ok(BoundReport { rows })
}

/// Fitted power (and log) exponents of `u` near the pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit {
    pub exponent: f64,
    pub log_exponent: Option<f64>,
    pub range: (f64, f64),
    pub rms_residual: f64,
}

/// Fitting window for [`fit_asymptotics`]. Power laws settle by `1e-2`; the
/// `log log` correction of the Zygmund family decays like `1/log(1/r)`, so its
/// window sits far closer to the pole.
pub fn default_fit_range(f: &NFunction) -> (f64, f64) {
    if f.zygmund_parameters().is_some() {
        (1e-30, 1e-24)
    } else {
        (1e-4, 1e-2)
    }
}

/// Least-squares fit of `ln u` against `ln r` (plus `ln ln(e + 1/r)` for the
/// Zygmund family) on a log grid of `range`.
pub fn fit_asymptotics(sol: &RadialSolution, range: (f64, f64)) -> Result<AsymptoticFit> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && hi < sol.r_out()) {
        return Err(domain(format!(
            "fit range ({lo}, {hi}) must lie inside (0, R_out)"
        )));
    }
    if sol.value(0.0)?.is_finite() {
        return Err(domain(
            "u is bounded at the origin, there is no singular exponent to fit",
        ));
    }
    let with_log = sol.nfunction().zygmund_parameters().is_some();
    let radii = log_grid(lo, hi, 41);
    let us = sol.profile(&radii)?;
    let cols = if with_log { 3 } else { 2 };
    let mut a = DMatrix::<f64>::zeros(radii.len(), cols);
    let mut y = DVector::<f64>::zeros(radii.len());
    for (i, (&r, &u)) in radii.iter().zip(&us).enumerate() {
        a[(i, 0)] = 1.0;
        a[(i, 1)] = r.ln();
        if with_log {
            a[(i, 2)] = (std::f64::consts::E + 1.0 / r).ln().ln();
        }
        y[i] = u.ln();
    }
    let svd = a.clone().svd(true, true);
    let coef = svd
        .solve(&y, 1e-14)
        .map_err(|e| Error::Numerical(format!("least squares failed: {e}")))?;
    let resid = &a * &coef - &y;
    Ok(AsymptoticFit {
        exponent: coef[1],
        log_exponent: with_log.then(|| coef[2]),
        range,
        rms_residual: (resid.norm_squared() / radii.len() as f64).sqrt(),
    })
}

/// Decision on `∫₀ g⁻¹(s^{1-n}) ds < ∞`, cross-checked against
/// `∫^∞ G̃(t)/t^{1+n'} dt < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntDivReport {
    pub bounded: bool,
    pub kernel_terms: Vec<f64>,
    pub conjugate_terms: Vec<f64>,
}

fn verdict_name(v: TailVerdict) -> &'static str {
    match v {
        TailVerdict::Convergent => "convergent",
        TailVerdict::Divergent => "divergent",
        TailVerdict::Undetermined => "undetermined",
    }
}

/// Dyadic-tail decision of whether the fundamental solution is bounded.
pub fn check_int_div(f: &NFunction, space: &AmbientSpace) -> Result<IntDivReport> {
    let n = space.n() as f64;
    let q = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-10,
        max_intervals: 100,
    };
    // keep s^{1-n} below ~1e250
    let depth = ((250.0 * 10f64.ln() / ((n - 1.0) * 2f64.ln())) as usize).min(400);
    let trap = Trap::new();
    let mut kernel_terms = Vec::with_capacity(depth);
    for k in 0..depth {
        let hi = 2f64.powi(-(k as i32));
        let h = |s: f64| trap.eval(kernel(f, s.powf(1.0 - n)));
        let c = adaptive(&h, 0.5 * hi, hi, &q).value;
        if !c.is_finite() {
            break;
        }
        kernel_terms.push(c);
    }
    let np = space.n_prime();
    let mut conjugate_terms = Vec::with_capacity(200);
    for k in 0..200 {
        let lo = 2f64.powi(k);
        let h = |t: f64| trap.eval(f.conjugate(t)) / t.powf(1.0 + np);
        let c = adaptive(&h, lo, 2.0 * lo, &q).value;
        if !c.is_finite() {
            break;
        }
        conjugate_terms.push(c);
    }
    trap.check()?;
    let a = classify_tail(&kernel_terms);
    let b = classify_tail(&conjugate_terms);
    if a == TailVerdict::Undetermined || b == TailVerdict::Undetermined {
        return Err(Error::Undecided(format!(
            "kernel tail {}, conjugate tail {}",
            verdict_name(a),
            verdict_name(b)
        )));
    }
    if a != b {
        return Err(Error::Inconsistent(format!(
            "∫₀ g⁻¹(s^(1-n)) ds is {} but ∫^∞ G̃(t)/t^(1+n') dt is {}",
            verdict_name(a),
            verdict_name(b)
        )));
    }
    Ok(IntDivReport {
        bounded: a == TailVerdict::Convergent,
        kernel_terms,
        conjugate_terms,
    })
}

/// Uniform density of unit mass on `B(0, eps)`, the mollified Dirac.
pub fn mollified_dirac(space: AmbientSpace, eps: f64) -> Result<RadonMeasure> {
    RadonMeasure::uniform_ball(space, eps, 1.0)
}

/// Uniform density of unit mass on the annulus `inner ≤ |x| ≤ outer`.
pub fn unit_annulus(space: AmbientSpace, inner: f64, outer: f64) -> Result<RadonMeasure> {
    let w = space.omega_n();
    let k = space.n() as i32;
    let density = 1.0 / (w * (outer.powi(k) - inner.powi(k)));
    RadonMeasure::radial(
        space,
        RadialProfile::Annulus {
            density,
            inner,
            outer,
        },
    )
}
