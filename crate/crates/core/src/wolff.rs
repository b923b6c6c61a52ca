//! The generalized Wolff potential
//!
//! ```text
//! W(x₀, R) = ∫₀^R g⁻¹( μ(B̄(x₀, r)) / r^{n-1} ) dr
//! ```
//!
//! its dyadic surrogate, the Hedberg–Wolff energy `∫ W(x, R) dμ(x)` and a
//! sup-scan used for the continuity criterion.

use std::cell::RefCell;

use rayon::prelude::*;

use crate::dyadic::{integrate_to_origin, DyadicLadder, DyadicOptions, DyadicOutcome, Status};
use crate::error::{domain, Error, Result};
use crate::measure::{MeasureKind, RadonMeasure};
use crate::orlicz::NFunction;
use crate::quadrature::{adaptive_with_breaks, QuadOptions};

pub type WolffOptions = DyadicOptions;

/// Value of a potential (or energy) with its convergence status.
#[derive(Debug, Clone, PartialEq)]
pub struct WolffResult {
    /// `+∞` when the status is [`Status::Diverges`].
    pub value: f64,
    pub status: Status,
    pub error: f64,
    pub panels: usize,
    pub diagnostic: Option<String>,
}

impl WolffResult {
    pub fn zero() -> Self {
        WolffResult {
            value: 0.0,
            status: Status::Converged,
            error: 0.0,
            panels: 0,
            diagnostic: None,
        }
    }

    fn diverges(panels: usize, why: impl Into<String>) -> Self {
        WolffResult {
            value: f64::INFINITY,
            status: Status::Diverges,
            error: f64::INFINITY,
            panels,
            diagnostic: Some(why.into()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.status != Status::Diverges && self.value.is_finite()
    }
}

impl From<DyadicOutcome> for WolffResult {
    fn from(o: DyadicOutcome) -> Self {
        WolffResult {
            value: o.value,
            status: o.status,
            error: o.error,
            panels: o.panels,
            diagnostic: o.diagnostic,
        }
    }
}

/// `g⁻¹(y)` where running past the f64 range reads as `+∞`.
pub(crate) fn kernel(f: &NFunction, y: f64) -> Result<f64> {
    match f.inverse_deriv(y) {
        Err(Error::Overflow(_)) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Wraps a fallible integrand so quadrature sees NaN on failure and the first
/// error is kept for the caller.
pub(crate) struct Trap {
    err: RefCell<Option<Error>>,
}

impl Trap {
    pub(crate) fn new() -> Self {
        Trap {
            err: RefCell::new(None),
        }
    }

    pub(crate) fn eval(&self, v: Result<f64>) -> f64 {
        match v {
            Ok(v) => v,
            Err(e) => {
                self.err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    pub(crate) fn check(self) -> Result<()> {
        match self.err.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// `W^μ_G(x₀, R)` by dyadic panels `[R_{k+1}, R_k]` with adaptive
/// Gauss–Kronrod on each panel and jump radii as breakpoints.
pub fn wolff_potential(
    m: &RadonMeasure,
    f: &NFunction,
    x0: &[f64],
    radius: f64,
    opts: &WolffOptions,
) -> Result<WolffResult> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(domain(format!(
            "potential radius must be positive, got {radius}"
        )));
    }
    m.ball_mass(x0, 0.0)?;
    if m.is_zero() {
        return Ok(WolffResult::zero());
    }
    let n = m.space().n() as i32;
    let trap = Trap::new();
    let h = |r: f64| {
        trap.eval(
            m.ball_mass(x0, r)
                .and_then(|mass| kernel(f, mass / r.powi(n - 1))),
        )
    };
    let empty = m.empty_radius(x0);
    let breaks = m.jump_radii(x0);
    let out = integrate_to_origin(&h, radius, &breaks, |lo| lo <= empty, opts)?;
    trap.check()?;
    Ok(out.into())
}

/// `Σ_{k=1}^{K} (R_k - R_{k+1}) g⁻¹(μ(B̄(x₀, R_k))/R_k^{n-1})`.
pub fn dyadic_wolff(
    m: &RadonMeasure,
    f: &NFunction,
    x0: &[f64],
    radius: f64,
    depth: usize,
) -> Result<f64> {
    if depth < 1 {
        return Err(domain("dyadic depth must be at least 1"));
    }
    let ladder = DyadicLadder::new(radius, depth + 1)?;
    let n = m.space().n() as i32;
    let mut sum = 0.0;
    for k in 1..=depth {
        let rk = ladder.radius(k);
        let mass = m.ball_mass(x0, rk)?;
        sum += (rk - ladder.radius(k + 1)) * kernel(f, mass / rk.powi(n - 1))?;
    }
    Ok(sum)
}

/// Combines per-node potentials `(weight, W)` in the given order.
fn weighted_sum(parts: &[(f64, WolffResult)]) -> WolffResult {
    let mut out = WolffResult::zero();
    for (w, r) in parts {
        out.panels += r.panels;
        if r.status == Status::Diverges && *w > 0.0 {
            return WolffResult::diverges(
                out.panels,
                r.diagnostic
                    .clone()
                    .unwrap_or_else(|| "a node potential diverges".into()),
            );
        }
        if r.status == Status::Undecided {
            out.status = Status::Undecided;
            out.diagnostic = r.diagnostic.clone();
        }
        out.value += w * r.value;
        out.error += w * r.error;
    }
    out
}

/// Hedberg–Wolff energy `∫ W^μ_G(x, R) dμ(x)`.
pub fn hedberg_wolff_energy(
    m: &RadonMeasure,
    f: &NFunction,
    radius: f64,
    opts: &WolffOptions,
) -> Result<WolffResult> {
    match m.kind() {
        MeasureKind::Atoms(atoms) => {
            let parts = atoms
                .iter()
                .map(|a| Ok((a.mass, wolff_potential(m, f, &a.x, radius, opts)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(weighted_sum(&parts))
        }
        MeasureKind::Grid(g) => {
            let n = g.origin.len();
            let vol = g.h.powi(n as i32);
            let centers: Vec<(f64, Vec<f64>)> = g
                .values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v > 0.0)
                .map(|(i, v)| {
                    let mut idx = i;
                    let mut c = vec![0.0; n];
                    for a in (0..n).rev() {
                        let k = idx % g.shape[a];
                        idx /= g.shape[a];
                        c[a] = g.origin[a] + (k as f64 + 0.5) * g.h;
                    }
                    (v * vol, c)
                })
                .collect();
            let parts = centers
                .par_iter()
                .map(|(w, c)| Ok((*w, wolff_potential(m, f, c, radius, opts)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(weighted_sum(&parts))
        }
        MeasureKind::Radial { center, profile } => {
            let space = *m.space();
            let mut x = center.clone();
            let trap = Trap::new();
            let worst: RefCell<Option<WolffResult>> = RefCell::new(None);
            let integrand = |s: f64| {
                let weight =
                    profile.density(&space, s) * space.surface() * s.powi(space.n() as i32 - 1);
                if weight == 0.0 {
                    return 0.0;
                }
                let mut y = x.clone();
                y[0] += s;
                let w = trap.eval(wolff_potential(m, f, &y, radius, opts).map(|w| {
                    if w.status != Status::Converged {
                        worst.borrow_mut().get_or_insert(w.clone());
                    }
                    w.value
                }));
                weight * w
            };
            let q = adaptive_with_breaks(
                &integrand,
                0.0,
                profile.outer_radius(),
                &profile.breakpoints(),
                &QuadOptions {
                    abs_tol: 0.0,
                    rel_tol: 1e-7,
                    max_intervals: 64,
                },
            );
            trap.check()?;
            x.clear();
            if let Some(w) = worst.into_inner() {
                if w.status == Status::Diverges {
                    return Ok(WolffResult::diverges(
                        q.intervals,
                        "potential diverges on the support",
                    ));
                }
                return Ok(WolffResult {
                    value: q.value,
                    status: Status::Undecided,
                    error: q.error,
                    panels: q.intervals,
                    diagnostic: w.diagnostic,
                });
            }
            Ok(WolffResult {
                value: q.value,
                status: if q.converged {
                    Status::Converged
                } else {
                    Status::Undecided
                },
                error: q.error,
                panels: q.intervals,
                diagnostic: (!q.converged).then(|| "energy quadrature budget exhausted".into()),
            })
        }
    }
}

/// Outcome of [`continuity_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// `sup_x W(x, r)` over the sample points, `+∞` if any diverges.
    pub sup: f64,
    pub witness: Vec<f64>,
    pub status: Status,
}

/// `sup_x W^μ_G(x, r)` over `points`, evaluated in parallel and reduced in
/// point order.
pub fn continuity_scan(
    m: &RadonMeasure,
    f: &NFunction,
    points: &[Vec<f64>],
    r: f64,
    opts: &WolffOptions,
) -> Result<ScanResult> {
    let values = points
        .par_iter()
        .map(|x| wolff_potential(m, f, x, r, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ScanResult {
        sup: 0.0,
        witness: points.first().cloned().unwrap_or_default(),
        status: Status::Converged,
    };
    for (x, w) in points.iter().zip(&values) {
        if w.status == Status::Diverges {
            return Ok(ScanResult {
                sup: f64::INFINITY,
                witness: x.clone(),
                status: Status::Diverges,
            });
        }
        if w.status == Status::Undecided {
            out.status = Status::Undecided;
        }
        if w.value > out.sup {
            out.sup = w.value;
            out.witness = x.clone();
        }
    }
    Ok(out)
}

/// Cell-centered lattice of `per_axis^n` points on the cube of half-width
/// `half_width` about `center`.
pub fn cube_points(center: &[f64], half_width: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let n = center.len();
    let total = per_axis.pow(n as u32);
    let h = 2.0 * half_width / per_axis as f64;
    (0..total)
        .map(|mut i| {
            let mut p = vec![0.0; n];
            for a in (0..n).rev() {
                let k = i % per_axis;
                i /= per_axis;
                p[a] = center[a] - half_width + (k as f64 + 0.5) * h;
            }
            p
        })
        .collect()
}
