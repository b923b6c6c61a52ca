//! Density and oscillation criteria: the Morrey-type density bound
//! `μ(B(x, r)) ≤ c r^{n-1} g(r^{θ-1})` and the Hölder-type oscillation bound
//! `sup_B u - inf_B u ≲ r^θ` on radial solutions.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::measure::{morrey_target, RadonMeasure};
use crate::orlicz::NFunction;
use crate::radial::RadialSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
        }
    }
}

/// Value of a criterion functional with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion: String,
    /// Functional value or sup constant, `+∞` when unbounded.
    pub value: f64,
    pub verdict: Verdict,
    /// Parameter where the extremum is attained.
    pub witness: Option<f64>,
    /// Max/min of the sampled ratios, where meaningful.
    pub spread: Option<f64>,
    pub detail: Option<String>,
}

impl CriterionReport {
    pub fn new(criterion: &str, value: f64, verdict: Verdict) -> Self {
        CriterionReport {
            criterion: criterion.to_string(),
            value,
            verdict,
            witness: None,
            spread: None,
            detail: None,
        }
    }
}

/// `c* = max μ(B̄(x, r)) / (r^{n-1} g(r^{θ-1}))` over the samples; satisfied
/// when `c* ≤ threshold`. The witness is the radius of the maximizing sample.
pub fn morrey_density_check(
    m: &RadonMeasure,
    f: &NFunction,
    theta: f64,
    samples: &[(Vec<f64>, f64)],
    threshold: f64,
) -> Result<CriterionReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    let n = m.space().n();
    let mut best = 0.0f64;
    let mut witness = None;
    let mut lo = f64::INFINITY;
    for (x, r) in samples {
        if !(*r > 0.0 && *r < 1.0) {
            return Err(domain(format!("sample radius {r} must lie in (0, 1)")));
        }
        let c = m.ball_mass(x, *r)? / morrey_target(f, theta, n, *r)?;
        if c > best || witness.is_none() {
            best = best.max(c);
            witness = Some(*r);
        }
        if c > 0.0 {
            lo = lo.min(c);
        }
    }
    let verdict = if best <= threshold {
        Verdict::Satisfied
    } else {
        Verdict::Violated
    };
    let mut rep = CriterionReport::new("morrey", best, verdict);
    rep.witness = witness;
    rep.spread = lo.is_finite().then(|| best / lo);
    Ok(rep)
}

/// One ball of the oscillation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationSample {
    pub center: f64,
    pub radius: f64,
    pub sup: f64,
    pub inf: f64,
    pub ratio: f64,
}

/// `(sup_B u - inf_B u)/r^θ` on balls `B(x₀ e₁, r)`, with sup and inf read
/// off the monotone profile at the radial ends of the ball. Satisfied when
/// every ratio is finite and at most `threshold`.
pub fn hoelder_sup_inf_check(
    sol: &RadialSolution,
    theta: f64,
    centers: &[f64],
    radii: &[f64],
    threshold: f64,
) -> Result<(CriterionReport, Vec<OscillationSample>)> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    let mut samples = Vec::new();
    for &x in centers {
        for &r in radii {
            if !(r > 0.0) {
                return Err(domain(format!(
                    "oscillation radius must be positive, got {r}"
                )));
            }
            let near = (x - r).max(0.0);
            let far = (x + r).min(sol.r_out());
            let sup = sol.value(near)?;
            let inf = sol.value(far)?;
            let ratio = if sup.is_infinite() {
                f64::INFINITY
            } else {
                (sup - inf) / r.powf(theta)
            };
            samples.push(OscillationSample {
                center: x,
                radius: r,
                sup,
                inf,
                ratio,
            });
        }
    }
    let max = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let min = samples
        .iter()
        .map(|s| s.ratio)
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let witness = samples.iter().find(|s| s.ratio == max).map(|s| s.radius);
    let verdict = if max.is_finite() && max <= threshold {
        Verdict::Satisfied
    } else {
        Verdict::Violated
    };
    let mut rep = CriterionReport::new("hoelder", max, verdict);
    rep.witness = witness;
    rep.spread = (min.is_finite() && max.is_finite()).then(|| max / min);
    if max.is_infinite() {
        rep.detail = Some("u is unbounded inside a probed ball".into());
    }
    Ok((rep, samples))
}
