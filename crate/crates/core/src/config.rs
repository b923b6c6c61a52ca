//! JSON run configuration and its conversion into library objects.
//!
//! Every instance may carry its own `n` and `nfunction`; missing ones fall
//! back to the top-level defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measure::{AmbientSpace, Atom, Grid, MeasureKind, RadialProfile, RadonMeasure};
use crate::orlicz::NFunction;
use crate::rearrangement::{PowerHead, SampledFunction};

pub const SCHEMA: &str = "wolffkit-report/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum NFunctionSpec {
    Power {
        p: f64,
    },
    Zygmund {
        p: f64,
        alpha: f64,
    },
    Table {
        points: Vec<[f64; 3]>,
    },
    Product {
        factors: Vec<NFunctionSpec>,
    },
    Composition {
        outer: Box<NFunctionSpec>,
        inner: Box<NFunctionSpec>,
    },
}

impl NFunctionSpec {
    pub fn build(&self) -> Result<NFunction> {
        match self {
            NFunctionSpec::Power { p } => NFunction::power(*p),
            NFunctionSpec::Zygmund { p, alpha } => NFunction::zygmund(*p, *alpha),
            NFunctionSpec::Table { points } => NFunction::table(points),
            NFunctionSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::Domain("product needs at least one factor".into()))?
                    .build()?;
                it.try_fold(first, |acc, f| NFunction::product(acc, f.build()?))
            }
            NFunctionSpec::Composition { outer, inner } => {
                NFunction::composition(outer.build()?, inner.build()?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub x: Vec<f64>,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Values {
    Inline(Vec<f64>),
    File(PathBuf),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    Zero,
    Atoms {
        atoms: Vec<AtomSpec>,
    },
    Radial {
        #[serde(default)]
        center: Option<Vec<f64>>,
        profile: String,
        #[serde(default)]
        params: Value,
    },
    Grid {
        origin: Vec<f64>,
        h: f64,
        shape: Vec<usize>,
        values: Values,
    },
}

fn param(params: &Value, key: &str) -> Result<f64> {
    params.get(key).and_then(Value::as_f64).ok_or_else(|| {
        Error::Domain(format!(
            "radial profile parameter '{key}' missing or not a number"
        ))
    })
}

fn param_or(params: &Value, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v.as_f64().ok_or_else(|| {
            Error::Domain(format!("radial profile parameter '{key}' is not a number"))
        }),
    }
}

fn param_list(params: &Value, key: &str) -> Result<Vec<f64>> {
    params
        .get(key)
        .and_then(Value::as_array)
        .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
        .ok_or_else(|| {
            Error::Domain(format!(
                "radial profile parameter '{key}' must be a list of numbers"
            ))
        })
}

/// Reads whitespace, comma or newline separated numbers.
pub fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
        for field in rec.iter().flat_map(|f| f.split_whitespace()) {
            out.push(
                field
                    .parse()
                    .map_err(|e| Error::Domain(format!("{}: '{field}': {e}", path.display())))?,
            );
        }
    }
    Ok(out)
}

impl MeasureSpec {
    /// `base` resolves relative value-file paths; `f` feeds Morrey profiles.
    pub fn build(&self, space: AmbientSpace, f: &NFunction, base: &Path) -> Result<RadonMeasure> {
        match self {
            MeasureSpec::Zero => Ok(RadonMeasure::zero(space)),
            MeasureSpec::Atoms { atoms } => RadonMeasure::atoms(
                space,
                atoms
                    .iter()
                    .map(|a| Atom {
                        x: a.x.clone(),
                        mass: a.mass,
                    })
                    .collect(),
            ),
            MeasureSpec::Radial {
                center,
                profile,
                params,
            } => {
                let n = space.n() as i32;
                let w = space.omega_n();
                let profile = match profile.as_str() {
                    "uniform" => {
                        let radius = param(params, "radius")?;
                        let density = match params.get("mass") {
                            Some(_) => param(params, "mass")? / (w * radius.powi(n)),
                            None => param_or(params, "density", 1.0)?,
                        };
                        RadialProfile::Uniform { density, radius }
                    }
                    "annulus" => {
                        let inner = param(params, "inner")?;
                        let outer = param(params, "outer")?;
                        let density = match params.get("mass") {
                            Some(_) => param(params, "mass")? / (w * (outer.powi(n) - inner.powi(n))),
                            None => param_or(params, "density", 1.0)?,
                        };
                        RadialProfile::Annulus { density, inner, outer }
                    }
                    "power" => RadialProfile::Power {
                        coefficient: param_or(params, "coefficient", 1.0)?,
                        exponent: param(params, "exponent")?,
                        radius: param(params, "radius")?,
                    },
                    "table" | "shells" => RadialProfile::Shells {
                        edges: param_list(params, "edges")?,
                        values: param_list(params, "values")?,
                    },
                    "morrey" => RadialProfile::Morrey {
                        nfunction: f.clone(),
                        theta: param(params, "theta")?,
                        radius: param_or(params, "radius", 1.0)?,
                    },
                    other => {
                        return Err(Error::Domain(format!(
                            "unknown radial profile '{other}' (expected uniform, annulus, power, table or morrey)"
                        )))
                    }
                };
                let center = center.clone().unwrap_or_else(|| vec![0.0; space.n()]);
                RadonMeasure::new(space, MeasureKind::Radial { center, profile })
            }
            MeasureSpec::Grid {
                origin,
                h,
                shape,
                values,
            } => {
                let values = match values {
                    Values::Inline(v) => v.clone(),
                    Values::File(p) => read_numbers(&base.join(p))?,
                };
                RadonMeasure::new(
                    space,
                    MeasureKind::Grid(Grid {
                        origin: origin.clone(),
                        h: *h,
                        shape: shape.clone(),
                        values,
                    }),
                )
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    /// Only `"power"` is recognized.
    pub tail: String,
    /// `f*(t) ~ t^{exponent}` near 0, so `exponent ∈ (-1, 0)`.
    pub exponent: f64,
    #[serde(default = "one")]
    pub coefficient: f64,
    #[serde(default = "one")]
    pub extent: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum StepsSpec {
    Inline(Vec<(f64, f64)>),
    File(PathBuf),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    #[serde(default)]
    pub steps: Option<StepsSpec>,
    #[serde(default)]
    pub tail: Option<TailSpec>,
}

impl FunctionSpec {
    pub fn build(&self, base: &Path) -> Result<SampledFunction> {
        let steps = match &self.steps {
            None => Vec::new(),
            Some(StepsSpec::Inline(v)) => v.clone(),
            Some(StepsSpec::File(p)) => {
                let nums = read_numbers(&base.join(p))?;
                if nums.len() % 2 != 0 {
                    return Err(Error::Domain(format!(
                        "{}: expected (value, measure) pairs",
                        p.display()
                    )));
                }
                nums.chunks(2).map(|c| (c[0], c[1])).collect()
            }
        };
        let head = match &self.tail {
            None => None,
            Some(t) if t.tail == "power" => Some(PowerHead {
                coefficient: t.coefficient,
                exponent: -t.exponent,
                extent: t.extent,
            }),
            Some(t) => {
                return Err(Error::Domain(format!(
                    "unknown tail descriptor '{}'",
                    t.tail
                )))
            }
        };
        SampledFunction::with_head(steps, head)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PotentialInstance {
    pub id: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub nfunction: Option<NFunctionSpec>,
    pub measure: MeasureSpec,
    pub x0: Vec<Vec<f64>>,
    #[serde(rename = "R")]
    pub radius: Vec<f64>,
    #[serde(default)]
    pub expect: Option<String>,
    #[serde(default)]
    pub value: Option<f64>,
    #[serde(default)]
    pub value_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OracleInstance {
    pub id: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub nfunction: Option<NFunctionSpec>,
    pub measure: MeasureSpec,
    #[serde(rename = "R_out")]
    pub r_out: f64,
    #[serde(default)]
    pub probes: Vec<f64>,
    #[serde(default)]
    pub bumps: Option<usize>,
    #[serde(default)]
    pub weak_tol: Option<f64>,
    #[serde(default)]
    pub fit: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundInstance {
    pub id: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub nfunction: Option<NFunctionSpec>,
    pub measure: MeasureSpec,
    #[serde(rename = "R_out")]
    pub r_out: f64,
    pub probes: Vec<f64>,
    #[serde(rename = "R_sweep")]
    pub r_sweep: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub x: Vec<f64>,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CriterionKind {
    Lorentz {
        function: FunctionSpec,
    },
    Marcinkiewicz {
        function: FunctionSpec,
        theta: f64,
    },
    Morrey {
        measure: MeasureSpec,
        theta: f64,
        samples: Vec<SampleSpec>,
        #[serde(default)]
        threshold: Option<f64>,
    },
    Hoelder {
        measure: MeasureSpec,
        #[serde(rename = "R_out")]
        r_out: f64,
        theta: f64,
        centers: Vec<f64>,
        radii: Vec<f64>,
        #[serde(default)]
        threshold: Option<f64>,
        #[serde(default)]
        max_spread: Option<f64>,
    },
    IntDiv {},
    HedbergWolff {
        measure: MeasureSpec,
        #[serde(rename = "R")]
        radius: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CriterionInstance {
    pub id: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub nfunction: Option<NFunctionSpec>,
    #[serde(flatten)]
    pub kind: CriterionKind,
    #[serde(default)]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EnergyInstance {
    pub id: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub nfunction: Option<NFunctionSpec>,
    pub measure: MeasureSpec,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default)]
    pub expect: Option<String>,
    #[serde(default)]
    pub value: Option<f64>,
    #[serde(default)]
    pub value_tol: Option<f64>,
}

/// Top-level run configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub nfunction: Option<NFunctionSpec>,
    #[serde(default)]
    pub tol: Option<f64>,
    /// Accepted `[min, max]` for the two-sided bound ratios.
    #[serde(default)]
    pub bracket: Option<[f64; 2]>,
    #[serde(default)]
    pub potential: Vec<PotentialInstance>,
    #[serde(default)]
    pub oracle: Vec<OracleInstance>,
    #[serde(default)]
    pub bounds: Vec<BoundInstance>,
    #[serde(default)]
    pub criteria: Vec<CriterionInstance>,
    #[serde(default)]
    pub hedberg_wolff: Vec<EnergyInstance>,
}

/// Parse failure with its source position.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line > 0 {
            write!(
                f,
                "config error at line {}, column {}: {}",
                self.line, self.column, self.message
            )
        } else {
            write!(f, "config error: {}", self.message)
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|message| ConfigError {
            line: 0,
            column: 0,
            message,
        })?;
        Ok(cfg)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if let Some(s) = &self.schema {
            if s != "wolffkit/1" {
                return Err(format!("unsupported schema '{s}', expected 'wolffkit/1'"));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("tol must be positive, got {t}"));
            }
        }
        if let Some([lo, hi]) = self.bracket {
            if !(lo > 0.0 && hi > lo) {
                return Err(format!(
                    "bracket must satisfy 0 < min < max, got [{lo}, {hi}]"
                ));
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        let all = self
            .potential
            .iter()
            .map(|i| (&i.id, i.n, i.nfunction.is_some()))
            .chain(
                self.oracle
                    .iter()
                    .map(|i| (&i.id, i.n, i.nfunction.is_some())),
            )
            .chain(
                self.bounds
                    .iter()
                    .map(|i| (&i.id, i.n, i.nfunction.is_some())),
            )
            .chain(
                self.criteria
                    .iter()
                    .map(|i| (&i.id, i.n, i.nfunction.is_some())),
            )
            .chain(
                self.hedberg_wolff
                    .iter()
                    .map(|i| (&i.id, i.n, i.nfunction.is_some())),
            );
        for (id, n, has_f) in all {
            if !ids.insert(id.clone()) {
                return Err(format!("duplicate instance id '{id}'"));
            }
            if n.or(self.n).is_none() {
                return Err(format!(
                    "instance '{id}' has no dimension n and no default is set"
                ));
            }
            if !has_f && self.nfunction.is_none() {
                return Err(format!(
                    "instance '{id}' has no nfunction and no default is set"
                ));
            }
        }
        for c in &self.criteria {
            if let CriterionKind::Morrey {
                threshold: Some(t), ..
            }
            | CriterionKind::Hoelder {
                threshold: Some(t), ..
            } = &c.kind
            {
                if !(*t > 0.0) {
                    return Err(format!("instance '{}': threshold must be positive", c.id));
                }
            }
        }
        for o in &self.oracle {
            if let Some(t) = o.weak_tol {
                if !(t > 0.0) {
                    return Err(format!("instance '{}': weak_tol must be positive", o.id));
                }
            }
        }
        Ok(())
    }

    /// Dimension of an instance, falling back to the default.
    pub fn space(&self, n: Option<usize>) -> Result<AmbientSpace> {
        AmbientSpace::new(n.or(self.n).unwrap_or(0))
    }

    pub fn nfunction(&self, spec: &Option<NFunctionSpec>) -> Result<NFunction> {
        spec.as_ref()
            .or(self.nfunction.as_ref())
            .ok_or_else(|| Error::Domain("no nfunction".into()))?
            .build()
    }
}
