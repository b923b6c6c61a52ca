//! Dyadic decomposition of integrals of the form `∫₀^R h(r) dr` whose integrand
//! may blow up at the origin, together with the tail classifier that decides
//! convergence or divergence from the sequence of panel contributions.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{adaptive_with_breaks, QuadOptions};

/// Radii `R_k = 2^{1-k} R` for `k = 0..=depth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicLadder {
    radius: f64,
    depth: usize,
}

impl DyadicLadder {
    pub fn new(radius: f64, depth: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain(format!(
                "ladder radius must be positive, got {radius}"
            )));
        }
        Ok(DyadicLadder { radius, depth })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `R_k`; exact in binary floating point.
    pub fn radius(&self, k: usize) -> f64 {
        self.radius * 2f64.powi(1 - k as i32)
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.depth).map(move |k| self.radius(k))
    }
}

/// Convergence status shared by every dyadic computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    Diverges,
    Undecided,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Diverges => "diverges",
            Status::Undecided => "undecided",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict of [`classify_tail`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailVerdict {
    Convergent,
    Divergent,
    Undetermined,
}

/// Classifies the series `Σ c_k` from its terms.
///
/// Geometric decay or growth is read off the mean log-ratio of the second half
/// of the terms. When the ratio is within 2% of one, the terms are regressed on
/// `ln k`: slopes above -1.05 count as divergent (harmonic or slower), slopes
/// below -1.2 as convergent. The band in between is reported as undetermined.
pub fn classify_tail(terms: &[f64]) -> TailVerdict {
    if terms.len() < 8 {
        return TailVerdict::Undetermined;
    }
    let start = terms.len() / 2;
    let tail = &terms[start..];
    if tail.iter().all(|&c| c == 0.0) {
        return TailVerdict::Convergent;
    }
    if tail.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return TailVerdict::Undetermined;
    }
    let mut log_ratio = 0.0;
    let mut count = 0usize;
    for w in tail.windows(2) {
        if w[0] > 0.0 && w[1] > 0.0 {
            log_ratio += (w[1] / w[0]).ln();
            count += 1;
        }
    }
    if count < 3 {
        return TailVerdict::Undetermined;
    }
    let q = (log_ratio / count as f64).exp();
    if q < 0.98 {
        return TailVerdict::Convergent;
    }
    if q > 1.02 {
        return TailVerdict::Divergent;
    }
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0.0)
        .map(|(i, c)| (((start + i + 1) as f64).ln(), c.ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    if slope > -1.05 {
        TailVerdict::Divergent
    } else if slope < -1.2 {
        TailVerdict::Convergent
    } else {
        TailVerdict::Undetermined
    }
}

/// Knobs of [`integrate_to_origin`].
#[derive(Debug, Clone, Copy)]
pub struct DyadicOptions {
    /// Relative tolerance on the integral.
    pub tol: f64,
    /// Partial sums above this, with 64 non-decreasing panels, mean divergence.
    pub divergence_threshold: f64,
    /// Subinterval budget of the adaptive rule inside one panel.
    pub panel_budget: usize,
    /// Hard cap on the number of panels.
    pub max_panels: usize,
}

impl Default for DyadicOptions {
    fn default() -> Self {
        DyadicOptions {
            tol: 1e-9,
            divergence_threshold: 1e12,
            panel_budget: 200,
            max_panels: 1100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicOutcome {
    pub value: f64,
    pub error: f64,
    pub status: Status,
    pub panels: usize,
    pub diagnostic: Option<String>,
}

/// Integrates `h` over `(0, top]` panel by panel on `[R_{k+1}, R_k]`.
///
/// `vanishes_below(r)` must return true only if `h ≡ 0` on `(0, r]`; it lets
/// the loop stop exactly once a ball around the evaluation point is empty.
pub fn integrate_to_origin<H, Z>(
    h: &H,
    top: f64,
    breaks: &[f64],
    vanishes_below: Z,
    opts: &DyadicOptions,
) -> Result<DyadicOutcome>
where
    H: Fn(f64) -> f64,
    Z: Fn(f64) -> bool,
{
    let ladder = DyadicLadder::new(top, opts.max_panels)?;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut contribs: Vec<f64> = Vec::new();
    let mut nondecreasing = 0usize;
    let mut budget_hit = false;

    let finish = |value: f64, error: f64, status, panels, diagnostic| {
        Ok(DyadicOutcome {
            value,
            error,
            status,
            panels,
            diagnostic,
        })
    };

    if vanishes_below(top) {
        return finish(0.0, 0.0, Status::Converged, 0, None);
    }

    for k in 1..=opts.max_panels {
        let hi = ladder.radius(k);
        let lo = ladder.radius(k + 1);
        if lo <= f64::MIN_POSITIVE * 1e10 {
            break;
        }
        let qopts = QuadOptions {
            abs_tol: 0.01 * opts.tol * total,
            rel_tol: 0.1 * opts.tol,
            max_intervals: opts.panel_budget,
        };
        let q = adaptive_with_breaks(h, lo, hi, breaks, &qopts);
        if !q.value.is_finite() {
            // the integrand left the representable range, judge by the trend so far
            return Ok(from_trend(
                total,
                error,
                &contribs,
                k - 1,
                "integrand overflowed",
            ));
        }
        if !q.converged {
            budget_hit = true;
        }
        let c = q.value.max(0.0);
        if let Some(&prev) = contribs.last() {
            if c >= prev {
                nondecreasing += 1;
            } else {
                nondecreasing = 0;
            }
        }
        contribs.push(c);
        total += c;
        error += q.error;

        if vanishes_below(lo) {
            let status = if budget_hit {
                Status::Undecided
            } else {
                Status::Converged
            };
            let diag = budget_hit.then(|| "panel quadrature budget exhausted".to_string());
            return finish(total, error, status, k, diag);
        }
        if nondecreasing >= 64 && total > opts.divergence_threshold {
            return finish(f64::INFINITY, f64::INFINITY, Status::Diverges, k, None);
        }
        let n = contribs.len();
        if n >= 3 {
            let (a, b, cc) = (contribs[n - 3], contribs[n - 2], contribs[n - 1]);
            let small = [a, b, cc].iter().all(|&x| x <= opts.tol * total);
            if small && cc <= b && b <= a {
                let q = if b > 0.0 { cc / b } else { 0.0 };
                let tail = if q < 1.0 {
                    cc * q / (1.0 - q)
                } else {
                    f64::INFINITY
                };
                if tail <= opts.tol * total {
                    let value = total + tail;
                    let err = error + tail;
                    let status = if budget_hit || err > opts.tol * value.max(f64::MIN_POSITIVE) {
                        Status::Undecided
                    } else {
                        Status::Converged
                    };
                    let diag = budget_hit.then(|| "panel quadrature budget exhausted".to_string());
                    return finish(value, err, status, k, diag);
                }
            }
        }
    }
    let panels = contribs.len();
    Ok(from_trend(
        total,
        error,
        &contribs,
        panels,
        "panel depth exhausted",
    ))
}

fn from_trend(total: f64, error: f64, contribs: &[f64], panels: usize, why: &str) -> DyadicOutcome {
    match classify_tail(contribs) {
        TailVerdict::Divergent => DyadicOutcome {
            value: f64::INFINITY,
            error: f64::INFINITY,
            status: Status::Diverges,
            panels,
            diagnostic: Some(format!("{why}; tail classified divergent")),
        },
        TailVerdict::Convergent => {
            let n = contribs.len();
            let q = if n >= 2 && contribs[n - 2] > 0.0 {
                contribs[n - 1] / contribs[n - 2]
            } else {
                0.0
            };
            let tail = if q < 1.0 {
                contribs[n - 1] * q / (1.0 - q)
            } else {
                f64::INFINITY
            };
            DyadicOutcome {
                value: total + tail,
                error: error + tail,
                status: Status::Undecided,
                panels,
                diagnostic: Some(format!(
                    "{why}; tail classified convergent but not resolved to tolerance"
                )),
            }
        }
        TailVerdict::Undetermined => DyadicOutcome {
            value: total,
            error: f64::INFINITY,
            status: Status::Undecided,
            panels,
            diagnostic: Some(format!("{why}; tail not classifiable")),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ladder_halves_exactly() {
        let l = DyadicLadder::new(0.3, 10).unwrap();
        assert_eq!(l.radius(1), 0.3);
        for k in 0..10 {
            assert_eq!(l.radius(k), 2.0 * l.radius(k + 1));
        }
        assert_eq!(l.radii().count(), 11);
        assert!(DyadicLadder::new(-1.0, 3).is_err());
    }

    #[test]
    fn classifier_reads_geometric_and_harmonic_series() {
        let geo: Vec<f64> = (0..60).map(|k| 0.7f64.powi(k)).collect();
        assert_eq!(classify_tail(&geo), TailVerdict::Convergent);
        let grow: Vec<f64> = (0..60).map(|k| 1.5f64.powi(k)).collect();
        assert_eq!(classify_tail(&grow), TailVerdict::Divergent);
        let flat = vec![0.4; 200];
        assert_eq!(classify_tail(&flat), TailVerdict::Divergent);
        let harmonic: Vec<f64> = (1..400).map(|k| 1.0 / k as f64).collect();
        assert_eq!(classify_tail(&harmonic), TailVerdict::Divergent);
        let p2: Vec<f64> = (1..400).map(|k| (k as f64).powi(-2)).collect();
        assert_eq!(classify_tail(&p2), TailVerdict::Convergent);
        let borderline: Vec<f64> = (1..400).map(|k| (k as f64).powf(-1.1)).collect();
        assert_eq!(classify_tail(&borderline), TailVerdict::Undetermined);
    }

    #[test]
    fn integrable_power_singularity_converges() {
        // ∫₀¹ s^{-1/2} ds = 2
        let out = integrate_to_origin(
            &|s: f64| s.powf(-0.5),
            1.0,
            &[],
            |_| false,
            &DyadicOptions::default(),
        )
        .unwrap();
        assert_eq!(out.status, Status::Converged);
        assert_relative_eq!(out.value, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn strong_singularity_diverges() {
        let out = integrate_to_origin(
            &|s: f64| s.powi(-2),
            1.0,
            &[],
            |_| false,
            &DyadicOptions::default(),
        )
        .unwrap();
        assert_eq!(out.status, Status::Diverges);
        assert!(out.value.is_infinite());
    }

    #[test]
    fn logarithmic_singularity_diverges() {
        let out = integrate_to_origin(
            &|s: f64| 1.0 / s,
            1.0,
            &[],
            |_| false,
            &DyadicOptions::default(),
        )
        .unwrap();
        assert_eq!(out.status, Status::Diverges);
    }

    #[test]
    fn empty_ball_stops_exactly() {
        // integrand supported on [0.1, 0.2]
        let h = |s: f64| if s >= 0.1 { 1.0 } else { 0.0 };
        let out =
            integrate_to_origin(&h, 0.2, &[0.1], |r| r <= 0.1, &DyadicOptions::default()).unwrap();
        assert_eq!(out.status, Status::Converged);
        assert_relative_eq!(out.value, 0.1, max_relative = 1e-14);
        assert_eq!(out.panels, 1);
    }
}
