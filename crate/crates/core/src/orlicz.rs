//! N-functions and their calculus: evaluation of `G` and `g = G'`, monotone
//! inversion of `g`, the Young conjugate, growth indices and the structural
//! equivalences that hold for doubling N-functions.
//!
//! An [`NFunction`] is immutable once built. Its growth indices are computed
//! at construction and construction fails when the function is not doubling
//! (`i_G ≤ 1` or `s_G = ∞`).

use serde::Serialize;

use crate::error::{domain, Error, Result};

const E: f64 = std::f64::consts::E;

/// Inputs with magnitude below this are treated as zero.
pub const TINY: f64 = 1e-300;

/// Log grid used for the indices of families without a closed form.
pub const INDEX_GRID: (f64, f64, usize) = (1e-8, 1e8, 4096);

/// `points` logarithmically spaced values on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `G(t) = t^p`.
    Power { p: f64 },
    /// `G(t) = t^p log^α(e + t)`.
    Zygmund { p: f64, alpha: f64 },
    /// `G = G₁·G₂`.
    Product(Box<NFunction>, Box<NFunction>),
    /// `G = G_outer ∘ G_inner`.
    Composition {
        outer: Box<NFunction>,
        inner: Box<NFunction>,
    },
    /// Sampled `(t, G(t), g(t))` on a log grid.
    Table(LogTable),
}

/// Growth indices `i_G = inf t g/G`, `s_G = sup t g/G` and the grid they were
/// taken on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexReport {
    pub i_g: f64,
    pub s_g: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub delta2: bool,
    pub nabla2: bool,
}

impl IndexReport {
    fn new(i_g: f64, s_g: f64, t_min: f64, t_max: f64, points: usize) -> Self {
        IndexReport {
            i_g,
            s_g,
            t_min,
            t_max,
            points,
            delta2: s_g.is_finite(),
            nabla2: i_g > 1.0,
        }
    }
}

/// Closed interval `[min, max]` of a sampled ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub min: f64,
    pub max: f64,
}

impl Bracket {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        values.fold(
            Bracket {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            },
            |b, v| Bracket {
                min: b.min.min(v),
                max: b.max.max(v),
            },
        )
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.min - slack && v <= self.max + slack
    }
}

/// Ratio brackets of the three equivalences `g(t)t ≃ G(t)`,
/// `G̃(g(t)) ≃ G(t)` and `g⁻¹(2y) ≲ g⁻¹(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub tg_over_g: Bracket,
    pub conjugate_over_g: Bracket,
    pub inverse_doubling: Bracket,
}

/// An N-function together with its cached growth indices.
#[derive(Debug, Clone, PartialEq)]
pub struct NFunction {
    family: Family,
    indices: IndexReport,
}

impl NFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(domain(format!("power exponent must exceed 1, got {p}")));
        }
        Ok(NFunction {
            family: Family::Power { p },
            indices: IndexReport::new(p, p, INDEX_GRID.0, INDEX_GRID.1, 1),
        })
    }

    pub fn zygmund(p: f64, alpha: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite() && alpha.is_finite()) {
            return Err(domain(format!(
                "zygmund needs p > 1 and finite alpha, got p={p}, alpha={alpha}"
            )));
        }
        Self::from_family(Family::Zygmund { p, alpha })
    }

    pub fn product(a: NFunction, b: NFunction) -> Result<Self> {
        Self::from_family(Family::Product(Box::new(a), Box::new(b)))
    }

    pub fn composition(outer: NFunction, inner: NFunction) -> Result<Self> {
        Self::from_family(Family::Composition {
            outer: Box::new(outer),
            inner: Box::new(inner),
        })
    }

    /// Builds a tabulated N-function from `(t, G(t), g(t))` rows.
    pub fn table(points: &[[f64; 3]]) -> Result<Self> {
        Self::from_family(Family::Table(LogTable::new(points)?))
    }

    fn from_family(family: Family) -> Result<Self> {
        let mut f = NFunction {
            family,
            indices: IndexReport::new(f64::NAN, f64::NAN, 0.0, 0.0, 0),
        };
        let grid = match &f.family {
            Family::Table(tab) => tab.t.clone(),
            _ => log_grid(INDEX_GRID.0, INDEX_GRID.1, INDEX_GRID.2),
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &t in &grid {
            let r = t * f.deriv(t)? / f.value(t)?;
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::Structural(format!(
                    "t g(t)/G(t) not finite and positive at t = {t:e}"
                )));
            }
            lo = lo.min(r);
            hi = hi.max(r);
        }
        f.indices = IndexReport::new(lo, hi, grid[0], grid[grid.len() - 1], grid.len());
        if !(f.indices.delta2 && f.indices.nabla2) {
            return Err(Error::NotDoubling { i_g: lo, s_g: hi });
        }
        Ok(f)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `Some(p)` for the pure power `t^p`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            Family::Power { p } => Some(p),
            _ => None,
        }
    }

    /// `Some((p, α))` for the Zygmund family.
    pub fn zygmund_parameters(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Zygmund { p, alpha } => Some((p, alpha)),
            _ => None,
        }
    }

    pub fn indices(&self) -> &IndexReport {
        &self.indices
    }

    /// Constant `c = 2^{1/(i_G-1)}` with `g⁻¹(2y) ≤ c g⁻¹(y)`.
    pub fn inverse_doubling_constant(&self) -> f64 {
        2f64.powf(1.0 / (self.indices.i_g - 1.0))
    }

    /// `G(t)`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(domain(format!("G evaluated at negative argument {t}")));
        }
        if t <= TINY {
            return Ok(0.0);
        }
        Ok(match &self.family {
            Family::Power { p } => t.powf(*p),
            Family::Zygmund { p, alpha } => t.powf(*p) * (E + t).ln().powf(*alpha),
            Family::Product(a, b) => a.value(t)? * b.value(t)?,
            Family::Composition { outer, inner } => outer.value(inner.value(t)?)?,
            Family::Table(tab) => tab.big_g(t)?,
        })
    }

    /// `g(t) = G'(t)`.
    pub fn deriv(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(domain(format!("g evaluated at negative argument {t}")));
        }
        if t <= TINY {
            return Ok(0.0);
        }
        Ok(match &self.family {
            Family::Power { p } => p * t.powf(p - 1.0),
            Family::Zygmund { p, alpha } => {
                let l = (E + t).ln();
                p * t.powf(p - 1.0) * l.powf(*alpha)
                    + alpha * t.powf(*p) * l.powf(alpha - 1.0) / (E + t)
            }
            Family::Product(a, b) => a.deriv(t)? * b.value(t)? + a.value(t)? * b.deriv(t)?,
            Family::Composition { outer, inner } => {
                outer.deriv(inner.value(t)?)? * inner.deriv(t)?
            }
            Family::Table(tab) => tab.small_g(t)?,
        })
    }

    /// `g⁻¹(y)`: the unique `t` with `g(t) = y`.
    pub fn inverse_deriv(&self, y: f64) -> Result<f64> {
        if y < 0.0 || y.is_nan() {
            return Err(domain(format!("g⁻¹ evaluated at negative argument {y}")));
        }
        if y <= TINY {
            return Ok(0.0);
        }
        if y.is_infinite() {
            return Err(Error::Overflow("g⁻¹ of an infinite argument".into()));
        }
        match &self.family {
            Family::Power { p } => {
                let t = (y / p).powf(1.0 / (p - 1.0));
                if t.is_finite() {
                    Ok(t)
                } else {
                    Err(Error::Overflow(format!("g⁻¹({y:e}) exceeds the f64 range")))
                }
            }
            Family::Table(tab) => {
                let (g_lo, g_hi) = (tab.small_g(tab.t_min())?, tab.small_g(tab.t_max())?);
                if y < g_lo {
                    return Err(Error::Extrapolation {
                        what: "g⁻¹ argument",
                        value: y,
                        lo: g_lo,
                        hi: g_hi,
                    });
                }
                if y > g_hi {
                    return Err(Error::Overflow(format!(
                        "g⁻¹({y:e}) beyond the table maximum g = {g_hi:e}"
                    )));
                }
                bisect(|t| self.deriv(t), y, tab.t_min(), tab.t_max())
            }
            _ => {
                let (lo, hi) = self.bracket(y)?;
                bisect(|t| self.deriv(t), y, lo, hi)
            }
        }
    }

    // [lo, hi] with g(lo) < y ≤ g(hi), grown or shrunk geometrically from 1.
    fn bracket(&self, y: f64) -> Result<(f64, f64)> {
        let mut hi = 1.0;
        if self.deriv(hi)? >= y {
            loop {
                let lo = 0.5 * hi;
                if lo <= TINY {
                    return Ok((0.0, hi));
                }
                if self.deriv(lo)? < y {
                    return Ok((lo, hi));
                }
                hi = lo;
            }
        }
        loop {
            let lo = hi;
            hi *= 2.0;
            let g = self.deriv(hi)?;
            if hi > 1e300 || !g.is_finite() {
                return Err(Error::Overflow(format!(
                    "g⁻¹({y:e}): g does not reach the target before t = {hi:e}"
                )));
            }
            if g >= y {
                return Ok((lo, hi));
            }
        }
    }

    /// Young conjugate `G̃(s) = sup_t (st - G(t)) = s t* - G(t*)`, `t* = g⁻¹(s)`.
    pub fn conjugate(&self, s: f64) -> Result<f64> {
        if s < 0.0 || s.is_nan() {
            return Err(domain(format!(
                "conjugate evaluated at negative argument {s}"
            )));
        }
        if s <= TINY {
            return Ok(0.0);
        }
        let t = self.inverse_deriv(s)?;
        Ok((s * t - self.value(t)?).max(0.0))
    }

    /// `G(t) + G̃(s) - ts`, nonnegative by Young's inequality.
    pub fn young_gap(&self, t: f64, s: f64) -> Result<f64> {
        Ok(self.value(t)? + self.conjugate(s)? - t * s)
    }

    /// Samples the three structural equivalences over `grid`. The inverse
    /// doubling ratio is taken at `y = g(t)`.
    pub fn check_equivalences(&self, grid: &[f64]) -> Result<EquivalenceReport> {
        let mut tg = Vec::with_capacity(grid.len());
        let mut conj = Vec::with_capacity(grid.len());
        let mut dbl = Vec::with_capacity(grid.len());
        for &t in grid {
            if !(t > 0.0) {
                return Err(domain(format!(
                    "equivalence grid must be positive, got {t}"
                )));
            }
            let big = self.value(t)?;
            let small = self.deriv(t)?;
            tg.push(t * small / big);
            conj.push(self.conjugate(small)? / big);
            dbl.push(self.inverse_deriv(2.0 * small)? / self.inverse_deriv(small)?);
        }
        for (name, vals) in [("t g/G", &tg), ("G̃(g)/G", &conj), ("g⁻¹(2y)/g⁻¹(y)", &dbl)] {
            if let Some((i, v)) = vals
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v >= 1e-12 && **v <= 1e12))
            {
                return Err(Error::Equivalence(format!(
                    "{name} = {v:e} at t = {:e}",
                    grid[i]
                )));
            }
        }
        Ok(EquivalenceReport {
            tg_over_g: Bracket::of(tg.into_iter()),
            conjugate_over_g: Bracket::of(conj.into_iter()),
            inverse_doubling: Bracket::of(dbl.into_iter()),
        })
    }
}

/// Bisection for `g(t) = y` on a bracket with `g(lo) ≤ y ≤ g(hi)`; stops at
/// relative width 1e-12 or after 200 halvings.
fn bisect(g: impl Fn(f64) -> Result<f64>, y: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Tabulated N-function: monotone cubic (PCHIP) interpolation of `ln G` and
/// `ln g` against `ln t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTable {
    t: Vec<f64>,
    log_t: Vec<f64>,
    big: Pchip,
    small: Pchip,
}

impl LogTable {
    fn new(points: &[[f64; 3]]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Structural("table needs at least two rows".into()));
        }
        for (i, row) in points.iter().enumerate() {
            if !row.iter().all(|v| v.is_finite() && *v > 0.0) {
                return Err(Error::Structural(format!(
                    "row {i} must be finite and positive: {row:?}"
                )));
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            let ([t0, g0, d0], [t1, g1, d1]) = (w[0], w[1]);
            if t1 <= t0 {
                return Err(Error::Structural(format!(
                    "t not increasing at row {}",
                    i + 1
                )));
            }
            if g1 <= g0 {
                return Err(Error::Structural(format!(
                    "G not increasing at row {}",
                    i + 1
                )));
            }
            if d1 < d0 {
                return Err(Error::Structural(format!(
                    "g decreasing at row {} (G not convex)",
                    i + 1
                )));
            }
            // convexity: chord slope sits between the endpoint derivatives
            let chord = (g1 - g0) / (t1 - t0);
            let slack = 1e-9 * chord;
            if chord < d0 - slack || chord > d1 + slack {
                return Err(Error::Structural(format!(
                    "chord slope {chord:e} outside [g(t{i}), g(t{})] = [{d0:e}, {d1:e}]",
                    i + 1
                )));
            }
        }
        let t: Vec<f64> = points.iter().map(|r| r[0]).collect();
        let log_t: Vec<f64> = t.iter().map(|v| v.ln()).collect();
        let big = Pchip::new(
            &log_t,
            &points.iter().map(|r| r[1].ln()).collect::<Vec<_>>(),
        );
        let small = Pchip::new(
            &log_t,
            &points.iter().map(|r| r[2].ln()).collect::<Vec<_>>(),
        );
        Ok(LogTable {
            t,
            log_t,
            big,
            small,
        })
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn t_max(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    fn check(&self, what: &'static str, t: f64) -> Result<f64> {
        // rounding of exp(ln t) must not push table endpoints outside
        let x = t
            .ln()
            .clamp(self.log_t[0], self.log_t[self.log_t.len() - 1]);
        if t < self.t_min() * (1.0 - 1e-12) || t > self.t_max() * (1.0 + 1e-12) {
            return Err(Error::Extrapolation {
                what,
                value: t,
                lo: self.t_min(),
                hi: self.t_max(),
            });
        }
        Ok(x)
    }

    fn big_g(&self, t: f64) -> Result<f64> {
        let x = self.check("G argument", t)?;
        Ok(self.big.eval(x).exp())
    }

    fn small_g(&self, t: f64) -> Result<f64> {
        let x = self.check("g argument", t)?;
        Ok(self.small.eval(x).exp())
    }
}

/// Fritsch–Butland monotone piecewise cubic Hermite interpolant.
#[derive(Debug, Clone, PartialEq)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
            return Pchip {
                x: x.to_vec(),
                y: y.to_vec(),
                d,
            };
        }
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Pchip {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        let k = self
            .x
            .partition_point(|&v| v <= x)
            .saturating_sub(1)
            .min(n - 2);
        let h = self.x[k + 1] - self.x[k];
        let s = (x - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn zyg() -> NFunction {
        NFunction::zygmund(2.0, 1.0).unwrap()
    }

    #[test]
    fn power_evaluations() {
        let f = NFunction::power(2.0).unwrap();
        assert_eq!(f.value(3.0).unwrap(), 9.0);
        assert_eq!(f.value(0.0).unwrap(), 0.0);
        assert_eq!(f.deriv(3.0).unwrap(), 6.0);
        assert_eq!(NFunction::power(3.0).unwrap().deriv(2.0).unwrap(), 12.0);
        assert_relative_eq!(f.inverse_deriv(4.0).unwrap(), 2.0, max_relative = 1e-15);
        assert!(f.value(-1.0).is_err());
        assert!(NFunction::power(1.0).is_err());
    }

    #[test]
    fn zygmund_evaluations() {
        // independent evaluations: 1·ln(e+1) and 2 ln(e+1) + 1/(e+1)
        let l = (E + 1.0).ln();
        assert_relative_eq!(zyg().value(1.0).unwrap(), l, max_relative = 1e-15);
        assert_relative_eq!(l, 1.313_261_687_518_223_2, max_relative = 1e-15);
        let g1 = 2.0 * l + 1.0 / (E + 1.0);
        assert_relative_eq!(zyg().deriv(1.0).unwrap(), g1, max_relative = 1e-15);
        assert_relative_eq!(g1, 2.895_464_796_406_441, max_relative = 1e-12);
        assert_relative_eq!(zyg().inverse_deriv(g1).unwrap(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn derivative_matches_central_difference() {
        for f in [
            zyg(),
            NFunction::zygmund(2.0, -1.0).unwrap(),
            NFunction::power(1.5).unwrap(),
        ] {
            for &t in &[1e-3, 0.5, 2.0, 40.0] {
                let h = 1e-5 * t;
                let fd = (f.value(t + h).unwrap() - f.value(t - h).unwrap()) / (2.0 * h);
                assert_relative_eq!(f.deriv(t).unwrap(), fd, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn inverse_of_zero_is_zero() {
        for f in [zyg(), NFunction::power(3.0).unwrap()] {
            assert_eq!(f.inverse_deriv(0.0).unwrap(), 0.0);
            assert_eq!(f.conjugate(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn conjugate_examples() {
        let p2 = NFunction::power(2.0).unwrap();
        assert_relative_eq!(p2.conjugate(2.0).unwrap(), 1.0, max_relative = 1e-14);
        let p3 = NFunction::power(3.0).unwrap();
        assert_relative_eq!(p3.conjugate(3.0).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn young_gap_examples() {
        let p2 = NFunction::power(2.0).unwrap();
        assert_relative_eq!(p2.young_gap(1.0, 2.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(p2.young_gap(1.0, 0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(p2.young_gap(2.0, 2.0).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn indices_of_powers_are_exact() {
        for p in [1.5, 3.0] {
            let r = *NFunction::power(p).unwrap().indices();
            assert!((r.i_g - p).abs() < 1e-9 && (r.s_g - p).abs() < 1e-9);
            assert!(r.delta2 && r.nabla2);
        }
    }

    #[test]
    fn zygmund_indices_match_grid_oracle() {
        // t g/G = 2 + t/((e+t) ln(e+t)) for Zygmund(2, 1)
        let grid = log_grid(1e-8, 1e8, 4096);
        let extra = |t: f64| t / ((E + t) * (E + t).ln());
        let max = grid.iter().map(|&t| extra(t)).fold(0.0, f64::max);
        let min = grid.iter().map(|&t| extra(t)).fold(f64::INFINITY, f64::min);
        let r = zyg().indices().to_owned();
        assert_relative_eq!(r.s_g, 2.0 + max, max_relative = 1e-9);
        assert_relative_eq!(r.i_g, 2.0 + min, max_relative = 1e-9);
        assert!(r.i_g - 2.0 < 1e-7);
    }

    #[test]
    fn equivalence_brackets() {
        let p2 = NFunction::power(2.0).unwrap();
        let grid = log_grid(1e-6, 1e6, 50);
        let rep = p2.check_equivalences(&grid).unwrap();
        assert!((rep.tg_over_g.min - 2.0).abs() < 1e-12 && (rep.tg_over_g.max - 2.0).abs() < 1e-12);
        for p in [1.5, 2.5, 4.0] {
            let rep = NFunction::power(p)
                .unwrap()
                .check_equivalences(&grid)
                .unwrap();
            let expect = 2f64.powf(1.0 / (p - 1.0));
            assert_relative_eq!(rep.inverse_doubling.min, expect, max_relative = 1e-12);
            assert_relative_eq!(rep.inverse_doubling.max, expect, max_relative = 1e-12);
        }
        let rep = zyg().check_equivalences(&grid).unwrap();
        assert!(rep.conjugate_over_g.min > 0.1 && rep.conjugate_over_g.max < 10.0);
        assert!(rep.inverse_doubling.max <= zyg().inverse_doubling_constant());
    }

    #[test]
    fn equivalence_grid_must_be_positive() {
        assert!(zyg().check_equivalences(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn product_and_composition_compose_derivatives() {
        let p2 = NFunction::power(2.0).unwrap();
        let prod = NFunction::product(p2.clone(), zyg()).unwrap();
        let t = 1.7;
        let expect = 2.0 * t * zyg().value(t).unwrap() + t * t * zyg().deriv(t).unwrap();
        assert_relative_eq!(prod.deriv(t).unwrap(), expect, max_relative = 1e-14);
        let comp = NFunction::composition(p2.clone(), p2).unwrap();
        assert_relative_eq!(comp.value(t).unwrap(), t.powi(4), max_relative = 1e-14);
        assert!((comp.indices().i_g - 4.0).abs() < 1e-9);
    }

    fn power_table(p: f64) -> Vec<[f64; 3]> {
        log_grid(1e-3, 1e3, 61)
            .into_iter()
            .map(|t| [t, t.powf(p), p * t.powf(p - 1.0)])
            .collect()
    }

    #[test]
    fn table_reproduces_power_law() {
        let tab = NFunction::table(&power_table(2.5)).unwrap();
        // power laws are straight lines in log-log, which PCHIP keeps exactly
        assert_relative_eq!(
            tab.value(3.3).unwrap(),
            3.3f64.powf(2.5),
            max_relative = 1e-10
        );
        assert_relative_eq!(
            tab.deriv(0.02).unwrap(),
            2.5 * 0.02f64.powf(1.5),
            max_relative = 1e-10
        );
        let y = 2.5 * 7f64.powf(1.5);
        assert_relative_eq!(tab.inverse_deriv(y).unwrap(), 7.0, max_relative = 1e-10);
        assert!((tab.indices().i_g - 2.5).abs() < 1e-9);
    }

    #[test]
    fn table_rejects_extrapolation_and_bad_shapes() {
        let tab = NFunction::table(&power_table(2.0)).unwrap();
        assert!(matches!(tab.deriv(5e3), Err(Error::Extrapolation { .. })));
        assert!(matches!(tab.inverse_deriv(1e9), Err(Error::Overflow(_))));
        let mut bad = power_table(2.0);
        bad[10][2] = bad[9][2] * 0.5;
        assert!(matches!(NFunction::table(&bad), Err(Error::Structural(_))));
        let mut concave = power_table(2.0);
        concave[20][1] *= 1.5;
        assert!(NFunction::table(&concave).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let f = zyg();
        assert!(matches!(
            f.inverse_deriv(f64::INFINITY),
            Err(Error::Overflow(_))
        ));
        assert!(matches!(f.inverse_deriv(1e305), Err(Error::Overflow(_))));
    }
}
