//! Nonnegative finite measures on ℝⁿ and the ball-mass queries `μ(B̄(x, r))`
//! the potentials are built from.
//!
//! Balls are closed: an atom at distance exactly `r` from the query point is
//! counted. Atomic and centered radial queries are exact (closed forms);
//! off-center radial and grid queries return an error bound alongside the
//! value.

use std::f64::consts::PI;

use statrs::function::beta::beta_reg;

use crate::error::{domain, Error, Result};
use crate::orlicz::{NFunction, TINY};
use crate::quadrature::gk15;

/// Ambient space ℝⁿ with `n ≥ 2` and the unit-ball volume `ω_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientSpace {
    n: usize,
    omega_n: f64,
}

impl AmbientSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("dimension must be at least 2, got {n}")));
        }
        Ok(AmbientSpace {
            n,
            omega_n: unit_ball_volume(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega_n(&self) -> f64 {
        self.omega_n
    }

    /// Surface area `nω_n` of the unit sphere.
    pub fn surface(&self) -> f64 {
        self.n as f64 * self.omega_n
    }

    /// Conjugate Sobolev exponent `n' = n/(n-1)`.
    pub fn n_prime(&self) -> f64 {
        self.n as f64 / (self.n as f64 - 1.0)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(domain(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.n
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(domain("point has non-finite coordinates"));
        }
        Ok(())
    }
}

/// `ω_n = π^{n/2}/Γ(n/2 + 1)` via `ω_n = 2π/n · ω_{n-2}`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// A point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub x: Vec<f64>,
    pub mass: f64,
}

/// Radial density profiles `ρ(s)`, all with bounded support.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `ρ = density` on `[0, radius]`.
    Uniform { density: f64, radius: f64 },
    /// `ρ = density` on `[inner, outer]`.
    Annulus {
        density: f64,
        inner: f64,
        outer: f64,
    },
    /// `ρ = coefficient · s^exponent` on `(0, radius]`, `exponent > -n`.
    Power {
        coefficient: f64,
        exponent: f64,
        radius: f64,
    },
    /// Shell-wise constant: `values[i]` on `[edges[i], edges[i+1])`, `edges[0] = 0`.
    Shells { edges: Vec<f64>, values: Vec<f64> },
    /// Density whose centered ball mass is `r^{n-1} g(r^{θ-1})` up to `radius`.
    Morrey {
        nfunction: NFunction,
        theta: f64,
        radius: f64,
    },
}

impl RadialProfile {
    pub fn outer_radius(&self) -> f64 {
        match self {
            RadialProfile::Uniform { radius, .. }
            | RadialProfile::Power { radius, .. }
            | RadialProfile::Morrey { radius, .. } => *radius,
            RadialProfile::Annulus { outer, .. } => *outer,
            RadialProfile::Shells { edges, .. } => edges[edges.len() - 1],
        }
    }

    /// Radii where `ρ` is discontinuous (including the outer radius).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialProfile::Annulus { inner, outer, .. } => vec![*inner, *outer],
            RadialProfile::Shells { edges, .. } => edges[1..].to_vec(),
            other => vec![other.outer_radius()],
        }
    }

    fn validate(&self, space: &AmbientSpace) -> Result<()> {
        let bad = |msg: String| Err(Error::Structural(msg));
        let fin = |v: f64| v.is_finite();
        match self {
            RadialProfile::Uniform { density, radius } => {
                if !(fin(*density) && *density >= 0.0 && fin(*radius) && *radius > 0.0) {
                    return bad(format!(
                        "uniform profile needs density ≥ 0 and radius > 0, got {density}, {radius}"
                    ));
                }
            }
            RadialProfile::Annulus {
                density,
                inner,
                outer,
            } => {
                if !(fin(*density)
                    && *density >= 0.0
                    && *inner >= 0.0
                    && fin(*outer)
                    && outer > inner)
                {
                    return bad(format!("annulus needs density ≥ 0 and 0 ≤ inner < outer, got {density}, {inner}, {outer}"));
                }
            }
            RadialProfile::Power {
                coefficient,
                exponent,
                radius,
            } => {
                if !(fin(*coefficient) && *coefficient >= 0.0 && fin(*radius) && *radius > 0.0) {
                    return bad("power profile needs coefficient ≥ 0 and radius > 0".into());
                }
                if !(*exponent > -(space.n as f64)) {
                    return bad(format!(
                        "power profile exponent {exponent} not locally integrable in dimension {}",
                        space.n
                    ));
                }
            }
            RadialProfile::Shells { edges, values } => {
                if edges.len() != values.len() + 1 || values.is_empty() {
                    return bad("shell profile needs one more edge than values".into());
                }
                if edges[0] != 0.0 || edges.windows(2).any(|w| !(w[1] > w[0] && fin(w[1]))) {
                    return bad("shell edges must start at 0 and increase strictly".into());
                }
                if values.iter().any(|v| !(fin(*v) && *v >= 0.0)) {
                    return bad("shell values must be finite and nonnegative".into());
                }
            }
            RadialProfile::Morrey { theta, radius, .. } => {
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(domain(format!("theta must lie in (0, 1), got {theta}")));
                }
                if !(fin(*radius) && *radius > 0.0) {
                    return bad("morrey profile needs a positive radius".into());
                }
            }
        }
        Ok(())
    }

    /// `ρ(s)`.
    pub fn density(&self, space: &AmbientSpace, s: f64) -> f64 {
        if s < 0.0 || s > self.outer_radius() {
            return 0.0;
        }
        match self {
            RadialProfile::Uniform { density, .. } => *density,
            RadialProfile::Annulus { density, inner, .. } => {
                if s >= *inner {
                    *density
                } else {
                    0.0
                }
            }
            RadialProfile::Power {
                coefficient,
                exponent,
                ..
            } => {
                if s <= 0.0 {
                    if *exponent < 0.0 {
                        f64::INFINITY
                    } else if *exponent == 0.0 {
                        *coefficient
                    } else {
                        0.0
                    }
                } else {
                    coefficient * s.powf(*exponent)
                }
            }
            RadialProfile::Shells { edges, values } => {
                let i = edges.partition_point(|&e| e <= s).saturating_sub(1);
                values[i.min(values.len() - 1)]
            }
            RadialProfile::Morrey {
                nfunction, theta, ..
            } => {
                if s <= TINY {
                    return 0.0;
                }
                let h = 1e-4 * s;
                let t = |r: f64| morrey_target(nfunction, *theta, space.n, r).unwrap_or(f64::NAN);
                let dt = (t(s + h) - t(s - h)) / (2.0 * h);
                dt / (space.surface() * s.powi(space.n as i32 - 1))
            }
        }
    }

    /// Mass of the centered closed ball of radius `r`, in closed form.
    pub fn center_mass(&self, space: &AmbientSpace, r: f64) -> f64 {
        let n = space.n as i32;
        let w = space.omega_n;
        match self {
            RadialProfile::Uniform { density, radius } => density * w * r.min(*radius).powi(n),
            RadialProfile::Annulus {
                density,
                inner,
                outer,
            } => {
                let hi = r.min(*outer);
                if hi <= *inner {
                    0.0
                } else {
                    density * w * (hi.powi(n) - inner.powi(n))
                }
            }
            RadialProfile::Power {
                coefficient,
                exponent,
                radius,
            } => {
                let e = exponent + space.n as f64;
                space.surface() * coefficient * r.min(*radius).powf(e) / e
            }
            RadialProfile::Shells { edges, values } => values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let hi = r.min(edges[i + 1]);
                    if hi <= edges[i] {
                        0.0
                    } else {
                        v * w * (hi.powi(n) - edges[i].powi(n))
                    }
                })
                .sum(),
            RadialProfile::Morrey {
                nfunction,
                theta,
                radius,
            } => morrey_target(nfunction, *theta, space.n, r.min(*radius)).unwrap_or(f64::NAN),
        }
    }
}

/// `r^{n-1} g(r^{θ-1})`, the Morrey density gauge.
pub fn morrey_target(f: &NFunction, theta: f64, n: usize, r: f64) -> Result<f64> {
    if r <= TINY {
        return Ok(0.0);
    }
    let g = f.deriv(r.powf(theta - 1.0))?;
    Ok(r.powi(n as i32 - 1) * g)
}

/// Axis-aligned cell grid with a constant density per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub origin: Vec<f64>,
    pub h: f64,
    pub shape: Vec<usize>,
    /// Row-major, last axis fastest.
    pub values: Vec<f64>,
}

impl Grid {
    fn validate(&self, space: &AmbientSpace) -> Result<()> {
        if self.origin.len() != space.n || self.shape.len() != space.n {
            return Err(Error::Structural(
                "grid origin and shape must have n entries".into(),
            ));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Structural(format!(
                "grid spacing must be positive, got {}",
                self.h
            )));
        }
        let cells: usize = self.shape.iter().product();
        if cells != self.values.len() {
            return Err(Error::Structural(format!(
                "grid shape holds {cells} cells but {} values were given",
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Structural(
                "grid values must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }

    fn cell_volume(&self) -> f64 {
        self.h.powi(self.origin.len() as i32)
    }

    /// Lower corner of the cell with flat index `i`.
    fn corner(&self, mut i: usize, out: &mut [f64]) {
        for axis in (0..self.shape.len()).rev() {
            let k = i % self.shape[axis];
            i /= self.shape[axis];
            out[axis] = self.origin[axis] + k as f64 * self.h;
        }
    }

    fn ball_mass(&self, x: &[f64], r: f64) -> (f64, f64) {
        let n = self.origin.len();
        let vol = self.cell_volume();
        let sub = 4usize;
        let samples = sub.pow(n as u32);
        let mut corner = vec![0.0; n];
        let mut point = vec![0.0; n];
        let mut mass = 0.0;
        let mut straddle = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            self.corner(i, &mut corner);
            let (mut near, mut far) = (0.0, 0.0);
            for a in 0..n {
                let (lo, hi) = (corner[a], corner[a] + self.h);
                let d_near = if x[a] < lo {
                    lo - x[a]
                } else if x[a] > hi {
                    x[a] - hi
                } else {
                    0.0
                };
                let d_far = (x[a] - lo).abs().max((x[a] - hi).abs());
                near += d_near * d_near;
                far += d_far * d_far;
            }
            let cell = v * vol;
            if far.sqrt() <= r {
                mass += cell;
            } else if near.sqrt() <= r {
                let mut inside = 0usize;
                for s in 0..samples {
                    let mut idx = s;
                    for a in 0..n {
                        let k = idx % sub;
                        idx /= sub;
                        point[a] = corner[a] + (k as f64 + 0.5) * self.h / sub as f64;
                    }
                    if distance(&point, x) <= r {
                        inside += 1;
                    }
                }
                mass += cell * inside as f64 / samples as f64;
                straddle += cell;
            }
        }
        (mass, straddle / samples as f64)
    }

    /// Distances from `x` to every subsample node of a nonzero cell; the
    /// sampled ball mass is a step function of `r` jumping only there.
    /// Empty when there are more than `GRID_JUMP_LIMIT` nodes.
    fn jump_radii(&self, x: &[f64]) -> Vec<f64> {
        let n = self.origin.len();
        let sub = 4usize;
        let samples = sub.pow(n as u32);
        let live = self.values.iter().filter(|v| **v > 0.0).count();
        if live * samples > GRID_JUMP_LIMIT {
            return Vec::new();
        }
        let mut corner = vec![0.0; n];
        let mut point = vec![0.0; n];
        let mut out = Vec::with_capacity(live * samples);
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            self.corner(i, &mut corner);
            for s in 0..samples {
                let mut idx = s;
                for a in 0..n {
                    let k = idx % sub;
                    idx /= sub;
                    point[a] = corner[a] + (k as f64 + 0.5) * self.h / sub as f64;
                }
                out.push(distance(&point, x));
            }
        }
        out
    }
}

const GRID_JUMP_LIMIT: usize = 1 << 18;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    Atoms(Vec<Atom>),
    Radial {
        center: Vec<f64>,
        profile: RadialProfile,
    },
    Grid(Grid),
}

/// A finite nonnegative measure with cached total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonMeasure {
    space: AmbientSpace,
    kind: MeasureKind,
    total: f64,
}

/// Panels of the composite rule used for off-center radial masses.
const SHELL_PANELS: usize = 64;

impl RadonMeasure {
    pub fn new(space: AmbientSpace, kind: MeasureKind) -> Result<Self> {
        match &kind {
            MeasureKind::Atoms(atoms) => {
                for a in atoms {
                    space.check_point(&a.x)?;
                    if !(a.mass.is_finite() && a.mass > 0.0) {
                        return Err(Error::Structural(format!(
                            "atom mass must be positive, got {}",
                            a.mass
                        )));
                    }
                }
            }
            MeasureKind::Radial { center, profile } => {
                space.check_point(center)?;
                profile.validate(&space)?;
            }
            MeasureKind::Grid(g) => g.validate(&space)?,
        }
        let total = match &kind {
            MeasureKind::Atoms(atoms) => atoms.iter().map(|a| a.mass).fold(0.0, |s, m| s + m),
            MeasureKind::Radial { profile, .. } => {
                profile.center_mass(&space, profile.outer_radius())
            }
            MeasureKind::Grid(g) => g.values.iter().sum::<f64>() * g.cell_volume(),
        };
        if !(total.is_finite() && total >= 0.0) {
            return Err(Error::Structural(format!(
                "total mass must be finite, got {total}"
            )));
        }
        if let MeasureKind::Radial {
            profile: RadialProfile::Morrey { radius, .. },
            ..
        } = &kind
        {
            check_morrey_monotone(&space, &kind, *radius)?;
        }
        Ok(RadonMeasure { space, kind, total })
    }

    /// The zero measure.
    pub fn zero(space: AmbientSpace) -> Self {
        RadonMeasure {
            space,
            kind: MeasureKind::Atoms(Vec::new()),
            total: 0.0,
        }
    }

    /// Unit Dirac mass at the origin.
    pub fn dirac(space: AmbientSpace) -> Self {
        Self::atoms(
            space,
            vec![Atom {
                x: vec![0.0; space.n],
                mass: 1.0,
            }],
        )
        .expect("origin is a valid point")
    }

    pub fn atoms(space: AmbientSpace, atoms: Vec<Atom>) -> Result<Self> {
        Self::new(space, MeasureKind::Atoms(atoms))
    }

    pub fn radial(space: AmbientSpace, profile: RadialProfile) -> Result<Self> {
        Self::new(
            space,
            MeasureKind::Radial {
                center: vec![0.0; space.n],
                profile,
            },
        )
    }

    /// Uniform density on `B(0, radius)` with the given total mass.
    pub fn uniform_ball(space: AmbientSpace, radius: f64, mass: f64) -> Result<Self> {
        let density = mass / (space.omega_n * radius.powi(space.n as i32));
        Self::radial(space, RadialProfile::Uniform { density, radius })
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn is_zero(&self) -> bool {
        self.total == 0.0
    }

    /// Outer radius of the support seen from the origin for measures
    /// radially symmetric about 0, `None` otherwise.
    pub fn radial_extent(&self) -> Option<f64> {
        match &self.kind {
            MeasureKind::Atoms(atoms) => {
                if atoms.iter().all(|a| a.x.iter().all(|&c| c == 0.0)) {
                    Some(0.0)
                } else {
                    None
                }
            }
            MeasureKind::Radial { center, profile } => center
                .iter()
                .all(|&c| c == 0.0)
                .then(|| profile.outer_radius()),
            MeasureKind::Grid(_) => None,
        }
    }

    /// `μ(B̄(x, r))`.
    pub fn ball_mass(&self, x: &[f64], r: f64) -> Result<f64> {
        self.ball_mass_with_bound(x, r).map(|(m, _)| m)
    }

    /// `μ(B̄(x, r))` with an absolute error bound (zero for exact queries).
    pub fn ball_mass_with_bound(&self, x: &[f64], r: f64) -> Result<(f64, f64)> {
        if r < 0.0 || r.is_nan() {
            return Err(domain(format!("ball radius must be nonnegative, got {r}")));
        }
        self.space.check_point(x)?;
        Ok(match &self.kind {
            MeasureKind::Atoms(atoms) => {
                let m = atoms
                    .iter()
                    .filter(|a| distance(&a.x, x) <= r)
                    .map(|a| a.mass)
                    .fold(0.0, |s, m| s + m);
                (m, 0.0)
            }
            MeasureKind::Radial { center, profile } => {
                let (m, e) = self.radial_ball_mass(profile, distance(center, x), r);
                (m.clamp(0.0, self.total), e)
            }
            MeasureKind::Grid(g) => g.ball_mass(x, r),
        })
    }

    /// Ball mass for a radial profile queried at distance `d` from its center.
    pub fn radial_ball_mass(&self, profile: &RadialProfile, d: f64, r: f64) -> (f64, f64) {
        let sp = &self.space;
        let outer = profile.outer_radius();
        if d <= 1e-15 * (r + outer) {
            return (profile.center_mass(sp, r), 0.0);
        }
        if d - r >= outer {
            return (0.0, 0.0);
        }
        let inner = if r > d {
            profile.center_mass(sp, (r - d).min(outer))
        } else {
            0.0
        };
        let a = (r - d).abs();
        let b = (r + d).min(outer);
        if b <= a {
            return (inner, 0.0);
        }
        let n = sp.n;
        let surface = sp.surface();
        let shell = |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            let kappa = ((s * s + d * d - r * r) / (2.0 * s * d)).clamp(-1.0, 1.0);
            profile.density(sp, s) * surface * s.powi(n as i32 - 1) * cap_fraction(n, kappa)
        };
        let mut cuts: Vec<f64> = profile
            .breakpoints()
            .into_iter()
            .filter(|&c| c > a && c < b)
            .collect();
        cuts.sort_by(f64::total_cmp);
        let mut lo = a;
        let mut value = 0.0;
        let mut err = 0.0;
        for hi in cuts.into_iter().chain(std::iter::once(b)) {
            // s = lo + (hi - lo)(1 - cos φ)/2 removes square-root endpoint behavior
            let half = 0.5 * (hi - lo);
            let mapped = |phi: f64| shell(lo + half * (1.0 - phi.cos())) * half * phi.sin();
            let h = PI / SHELL_PANELS as f64;
            for k in 0..SHELL_PANELS {
                let est = gk15(&mapped, k as f64 * h, (k + 1) as f64 * h);
                value += est.value;
                err += (est.value - est.gauss).abs();
            }
            lo = hi;
        }
        (inner + value, err)
    }

    /// Radii at which `r ↦ μ(B̄(x, r))` jumps or has a kink.
    pub fn jump_radii(&self, x: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = match &self.kind {
            MeasureKind::Atoms(atoms) => atoms.iter().map(|a| distance(&a.x, x)).collect(),
            MeasureKind::Radial { center, profile } => {
                let d = distance(center, x);
                profile
                    .breakpoints()
                    .into_iter()
                    .flat_map(|b| [(d - b).abs(), d + b])
                    .collect()
            }
            MeasureKind::Grid(g) => g.jump_radii(x),
        };
        out.retain(|r| *r > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Smallest `r` with `μ(B̄(x, r)) > 0` is at least this value.
    pub fn empty_radius(&self, x: &[f64]) -> f64 {
        match &self.kind {
            MeasureKind::Atoms(atoms) => atoms
                .iter()
                .map(|a| distance(&a.x, x))
                .fold(f64::INFINITY, f64::min),
            MeasureKind::Radial { center, profile } => {
                let d = distance(center, x);
                let inner = match profile {
                    RadialProfile::Annulus { inner, .. } => *inner,
                    _ => 0.0,
                };
                if d < inner {
                    inner - d
                } else {
                    (d - profile.outer_radius()).max(0.0)
                }
            }
            MeasureKind::Grid(g) => {
                let mut near = 0.0;
                for a in 0..g.origin.len() {
                    let lo = g.origin[a];
                    let hi = lo + g.shape[a] as f64 * g.h;
                    let dd = if x[a] < lo {
                        lo - x[a]
                    } else if x[a] > hi {
                        x[a] - hi
                    } else {
                        0.0
                    };
                    near += dd * dd;
                }
                near.sqrt()
            }
        }
    }

    /// `factor · μ`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(domain(format!(
                "scale factor must be nonnegative, got {factor}"
            )));
        }
        if factor == 0.0 {
            return Ok(Self::zero(self.space));
        }
        let kind = match &self.kind {
            MeasureKind::Atoms(atoms) => MeasureKind::Atoms(
                atoms
                    .iter()
                    .map(|a| Atom {
                        x: a.x.clone(),
                        mass: a.mass * factor,
                    })
                    .collect(),
            ),
            MeasureKind::Radial { center, profile } => {
                let profile = match profile {
                    RadialProfile::Uniform { density, radius } => RadialProfile::Uniform {
                        density: density * factor,
                        radius: *radius,
                    },
                    RadialProfile::Annulus {
                        density,
                        inner,
                        outer,
                    } => RadialProfile::Annulus {
                        density: density * factor,
                        inner: *inner,
                        outer: *outer,
                    },
                    RadialProfile::Power {
                        coefficient,
                        exponent,
                        radius,
                    } => RadialProfile::Power {
                        coefficient: coefficient * factor,
                        exponent: *exponent,
                        radius: *radius,
                    },
                    RadialProfile::Shells { edges, values } => RadialProfile::Shells {
                        edges: edges.clone(),
                        values: values.iter().map(|v| v * factor).collect(),
                    },
                    RadialProfile::Morrey { .. } => {
                        return Err(domain(
                            "morrey measures are fixed by their gauge and cannot be rescaled",
                        ))
                    }
                };
                MeasureKind::Radial {
                    center: center.clone(),
                    profile,
                }
            }
            MeasureKind::Grid(g) => MeasureKind::Grid(Grid {
                values: g.values.iter().map(|v| v * factor).collect(),
                ..g.clone()
            }),
        };
        Self::new(self.space, kind)
    }

    /// Cell-center sampling of a radial measure on the cube `[-half_width, half_width]ⁿ`.
    pub fn grid_from_radial(&self, h: f64, half_width: f64) -> Result<Self> {
        let MeasureKind::Radial { center, profile } = &self.kind else {
            return Err(domain("grid sampling needs a radial measure"));
        };
        let n = self.space.n;
        let per_axis = (2.0 * half_width / h).round() as usize;
        if per_axis == 0 {
            return Err(domain("grid spacing exceeds the sampled region"));
        }
        let origin: Vec<f64> = center.iter().map(|c| c - half_width).collect();
        let shape = vec![per_axis; n];
        let cells = per_axis.pow(n as u32);
        let mut grid = Grid {
            origin,
            h,
            shape,
            values: Vec::with_capacity(cells),
        };
        let mut corner = vec![0.0; n];
        for i in 0..cells {
            grid.corner(i, &mut corner);
            let mid: Vec<f64> = corner.iter().map(|c| c + 0.5 * h).collect();
            grid.values
                .push(profile.density(&self.space, distance(&mid, center)));
        }
        Self::new(self.space, MeasureKind::Grid(grid))
    }
}

/// Fraction of the sphere `|y| = s` lying in the ball, given the cosine
/// threshold `κ`: the part with `cos φ ≥ κ`.
pub fn cap_fraction(n: usize, kappa: f64) -> f64 {
    if kappa <= -1.0 {
        return 1.0;
    }
    if kappa >= 1.0 {
        return 0.0;
    }
    match n {
        2 => kappa.acos() / PI,
        3 => 0.5 * (1.0 - kappa),
        _ => {
            let a = 0.5 * (n as f64 - 1.0);
            beta_reg(a, a, 0.5 * (1.0 - kappa))
        }
    }
}

fn check_morrey_monotone(space: &AmbientSpace, kind: &MeasureKind, radius: f64) -> Result<()> {
    let MeasureKind::Radial { profile, .. } = kind else {
        return Ok(());
    };
    let mut prev = 0.0;
    for s in crate::orlicz::log_grid(1e-8 * radius, radius, 400) {
        let m = profile.center_mass(space, s);
        if !(m.is_finite() && m >= prev) {
            return Err(Error::Structural(format!(
                "r^(n-1) g(r^(θ-1)) is not nondecreasing near r = {s:e}, no nonnegative density realizes it"
            )));
        }
        prev = m;
    }
    Ok(())
}

/// Radial measure on `B(0, outer_radius)` whose centered ball masses equal
/// `r^{n-1} g(r^{θ-1})`.
pub fn construct_morrey_measure(
    f: &NFunction,
    theta: f64,
    space: AmbientSpace,
    outer_radius: f64,
) -> Result<RadonMeasure> {
    RadonMeasure::radial(
        space,
        RadialProfile::Morrey {
            nfunction: f.clone(),
            theta,
            radius: outer_radius,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, QuadOptions};
    use approx::assert_relative_eq;

    fn sp(n: usize) -> AmbientSpace {
        AmbientSpace::new(n).unwrap()
    }

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, max_relative = 1e-15);
        assert!(AmbientSpace::new(1).is_err());
    }

    #[test]
    fn dirac_closed_ball() {
        let m = RadonMeasure::dirac(sp(2));
        let x = [0.3, 0.0];
        assert_eq!(m.ball_mass(&x, 0.2).unwrap(), 0.0);
        assert_eq!(m.ball_mass(&x, 0.4).unwrap(), 1.0);
        assert_eq!(m.ball_mass(&x, 0.3).unwrap(), 1.0);
        assert!(m.ball_mass(&x, -1.0).is_err());
    }

    #[test]
    fn centered_radial_masses() {
        let disk = RadonMeasure::radial(
            sp(2),
            RadialProfile::Uniform {
                density: 1.0,
                radius: 1.0,
            },
        )
        .unwrap();
        assert_relative_eq!(
            disk.ball_mass(&[0.0, 0.0], 0.5).unwrap(),
            PI * 0.25,
            max_relative = 1e-15
        );
        let lin = RadonMeasure::radial(
            sp(3),
            RadialProfile::Power {
                coefficient: 1.0,
                exponent: 1.0,
                radius: 1.0,
            },
        )
        .unwrap();
        assert_relative_eq!(
            lin.ball_mass(&[0.0; 3], 1.0).unwrap(),
            PI,
            max_relative = 1e-14
        );
    }

    // lens volume of two intersecting balls in ℝ³
    fn lens(r1: f64, r2: f64, d: f64) -> f64 {
        if d >= r1 + r2 {
            return 0.0;
        }
        if d <= (r1 - r2).abs() {
            return 4.0 / 3.0 * PI * r1.min(r2).powi(3);
        }
        PI * (r1 + r2 - d).powi(2) * (d * d + 2.0 * d * (r1 + r2) - 3.0 * (r1 - r2).powi(2))
            / (12.0 * d)
    }

    // intersection area of two disks
    fn disk_overlap(r1: f64, r2: f64, d: f64) -> f64 {
        if d >= r1 + r2 {
            return 0.0;
        }
        if d <= (r1 - r2).abs() {
            return PI * r1.min(r2).powi(2);
        }
        let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
        let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
        r1 * r1 * a1 + r2 * r2 * a2
            - 0.5 * ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).sqrt()
    }

    #[test]
    fn off_center_uniform_matches_lens_volumes() {
        let ball = RadonMeasure::radial(
            sp(3),
            RadialProfile::Uniform {
                density: 1.0,
                radius: 1.0,
            },
        )
        .unwrap();
        let disk = RadonMeasure::radial(
            sp(2),
            RadialProfile::Uniform {
                density: 1.0,
                radius: 1.0,
            },
        )
        .unwrap();
        for &(d, r) in &[
            (0.3, 0.2),
            (0.5, 0.7),
            (0.9, 0.4),
            (1.2, 0.5),
            (0.2, 1.5),
            (0.6, 0.6),
        ] {
            let (m, e) = ball.ball_mass_with_bound(&[d, 0.0, 0.0], r).unwrap();
            assert_relative_eq!(m, lens(1.0, r, d), max_relative = 1e-9, epsilon = 1e-14);
            assert!(e < 1e-8);
            let (m, _) = disk.ball_mass_with_bound(&[0.0, d], r).unwrap();
            assert_relative_eq!(
                m,
                disk_overlap(1.0, r, d),
                max_relative = 1e-8,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn cap_fraction_in_four_dimensions_agrees_with_direct_integral() {
        // density of cos φ on S³ is (2/π) sqrt(1 - x²)
        for &k in &[-0.7, -0.1, 0.0, 0.4, 0.9] {
            let direct = adaptive(
                &|x: f64| 2.0 / PI * (1.0 - x * x).max(0.0).sqrt(),
                k,
                1.0,
                &QuadOptions::default(),
            );
            assert_relative_eq!(cap_fraction(4, k), direct.value, max_relative = 1e-9);
        }
        assert_eq!(cap_fraction(5, -1.0), 1.0);
        assert_eq!(cap_fraction(5, 1.0), 0.0);
    }

    #[test]
    fn off_center_four_dimensional_ball_inside_support() {
        let m = RadonMeasure::radial(
            sp(4),
            RadialProfile::Uniform {
                density: 2.0,
                radius: 1.0,
            },
        )
        .unwrap();
        let got = m.ball_mass(&[0.3, 0.0, 0.0, 0.0], 0.5).unwrap();
        assert_relative_eq!(
            got,
            2.0 * unit_ball_volume(4) * 0.5f64.powi(4),
            max_relative = 1e-9
        );
    }

    #[test]
    fn morrey_measure_reconstructs_target() {
        let f = NFunction::power(2.0).unwrap();
        let m = construct_morrey_measure(&f, 0.5, sp(3), 1.0).unwrap();
        let MeasureKind::Radial { profile, .. } = m.kind() else {
            panic!()
        };
        for r in [1e-3, 1e-2, 0.1, 0.5] {
            let target = 2.0 * f64::powf(r, 1.5);
            assert_relative_eq!(
                m.ball_mass(&[0.0; 3], r).unwrap(),
                target,
                max_relative = 1e-14
            );
            // independent reconstruction from the finite-difference density
            let q = adaptive(
                &|s: f64| profile.density(m.space(), s) * m.space().surface() * s * s,
                0.0,
                r,
                &QuadOptions {
                    rel_tol: 1e-10,
                    max_intervals: 2000,
                    ..Default::default()
                },
            );
            assert_relative_eq!(q.value, target, max_relative = 1e-6);
        }
        assert!(construct_morrey_measure(&f, 1.0, sp(3), 1.0).is_err());
        // exponent n - p + θ(p - 1) < 0: the gauge decreases, no density exists
        assert!(
            construct_morrey_measure(&NFunction::power(4.0).unwrap(), 0.1, sp(2), 1.0).is_err()
        );
    }

    #[test]
    fn grid_reproduces_uniform_density_within_bound() {
        let m = RadonMeasure::radial(
            sp(2),
            RadialProfile::Uniform {
                density: 1.0,
                radius: 3.0,
            },
        )
        .unwrap();
        let g = m.grid_from_radial(0.05, 1.0).unwrap();
        for &(x, r) in &[([0.0, 0.0], 0.5), ([0.1, -0.2], 0.6), ([0.33, 0.1], 0.21)] {
            let (got, bound) = g.ball_mass_with_bound(&x, r).unwrap();
            let exact = PI * r * r;
            assert!((got - exact).abs() <= bound, "{got} vs {exact} ± {bound}");
        }
        assert_relative_eq!(g.total_mass(), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn jump_radii_and_empty_radius() {
        let atoms = RadonMeasure::atoms(
            sp(2),
            vec![
                Atom {
                    x: vec![1.0, 0.0],
                    mass: 1.0,
                },
                Atom {
                    x: vec![0.0, 2.0],
                    mass: 0.5,
                },
            ],
        )
        .unwrap();
        assert_eq!(atoms.jump_radii(&[0.0, 0.0]), vec![1.0, 2.0]);
        assert_eq!(atoms.empty_radius(&[0.0, 0.0]), 1.0);
        let ann = RadonMeasure::radial(
            sp(3),
            RadialProfile::Annulus {
                density: 1.0,
                inner: 0.5,
                outer: 1.0,
            },
        )
        .unwrap();
        assert_eq!(ann.empty_radius(&[0.0; 3]), 0.5);
        assert_eq!(ann.ball_mass(&[0.0; 3], 0.5).unwrap(), 0.0);
    }

    #[test]
    fn scaling_doubles_masses() {
        let m = RadonMeasure::uniform_ball(sp(3), 0.5, 1.0).unwrap();
        let m2 = m.scaled(2.0).unwrap();
        let x = [0.2, 0.1, 0.0];
        assert_relative_eq!(
            m2.ball_mass(&x, 0.3).unwrap(),
            2.0 * m.ball_mass(&x, 0.3).unwrap(),
            max_relative = 1e-13
        );
        assert_relative_eq!(m.total_mass(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn structural_errors() {
        assert!(RadonMeasure::atoms(
            sp(2),
            vec![Atom {
                x: vec![0.0, 0.0],
                mass: -1.0
            }]
        )
        .is_err());
        assert!(RadonMeasure::atoms(
            sp(2),
            vec![Atom {
                x: vec![0.0],
                mass: 1.0
            }]
        )
        .is_err());
        assert!(RadonMeasure::radial(
            sp(2),
            RadialProfile::Power {
                coefficient: 1.0,
                exponent: -2.5,
                radius: 1.0
            }
        )
        .is_err());
    }
}
