//! Scenario files: one TOML document per run. Every length carries a unit
//! (`m`, `km`, `cm`, `mm` or `R`) and is normalized so that the range is 1.

use std::path::Path;

use serde::Deserialize;
use vmgame_core::discrete::{GridSpec, DEFAULT_ENTRY_BUDGET};
use vmgame_core::geometry::equilateral_verifiers;
use vmgame_core::mixed::DEFAULT_ALPHA_STEP;
use vmgame_core::optimize::OptimizerSettings;
use vmgame_core::region::DEFAULT_RASTER_STEP;
use vmgame_core::vm::{DistanceBounds, IDEAL_DELTA};
use vmgame_core::{Claim, Point, UtilityCriterion, VerifierConfig};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    range: String,
    verifiers: VerifiersFile,
    delta: Option<String>,
    criterion: Option<CriterionName>,
    alpha_step: Option<f64>,
    grid: Option<GridFile>,
    #[serde(default)]
    optimizer: OptimizerFile,
    classify: Option<ClassifyFile>,
    region: Option<RegionFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifiersFile {
    positions: Option<Vec<[String; 2]>>,
    equilateral: Option<EquilateralFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquilateralFile {
    edge: String,
    center: Option<[String; 2]>,
    #[serde(default)]
    alpha: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
enum CriterionName {
    MaximumDeception,
    DeceptionArea,
    DeceptionShape,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    side: Option<String>,
    points_per_edge: Option<usize>,
    step: Option<String>,
    max_entries: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizerFile {
    restarts: Option<usize>,
    max_iters: Option<usize>,
    step_tolerance: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyFile {
    bounds: Option<Vec<String>>,
    true_position: Option<[String; 2]>,
    fake_position: Option<[String; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionFile {
    true_position: [String; 2],
    step: Option<String>,
}

/// Physical scale of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    /// Metres per range unit, when the range was given physically.
    pub metres_per_range: Option<f64>,
}

impl Scale {
    /// Converts a length with unit into range units.
    pub fn length(&self, text: &str, what: &str) -> Result<f64, CliError> {
        let (value, unit) = split_unit(text)
            .ok_or_else(|| invalid(format!("{what}: cannot parse length {text:?}")))?;
        if !value.is_finite() {
            return Err(invalid(format!("{what}: length must be finite")));
        }
        if unit == "R" {
            return Ok(value);
        }
        let metres = value
            * metre_factor(unit)
                .ok_or_else(|| invalid(format!("{what}: unknown unit {unit:?}")))?;
        match self.metres_per_range {
            Some(m) => Ok(metres / m),
            None => Err(invalid(format!(
                "{what}: physical length needs a physical range"
            ))),
        }
    }

    fn point(&self, xy: &[String; 2], what: &str) -> Result<Point, CliError> {
        Ok(Point::new(
            self.length(&xy[0], what)?,
            self.length(&xy[1], what)?,
        )?)
    }
}

fn metre_factor(unit: &str) -> Option<f64> {
    match unit {
        "m" => Some(1.0),
        "km" => Some(1e3),
        "cm" => Some(1e-2),
        "mm" => Some(1e-3),
        _ => None,
    }
}

fn split_unit(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let at = text.rfind(|c: char| c.is_ascii_digit() || c == '.')? + 1;
    let (number, unit) = text.split_at(at);
    let unit = unit.trim();
    if unit.is_empty() {
        return None;
    }
    Some((number.trim().parse().ok()?, unit))
}

fn invalid(message: String) -> CliError {
    CliError::Scenario(message)
}

/// What `classify` should examine.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifyInput {
    Bounds(DistanceBounds),
    Claim(Claim),
}

#[derive(Debug, Clone)]
pub struct GridInput {
    pub spec: GridSpec,
    pub budget: u128,
}

/// A validated scenario in range units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub scale: Scale,
    pub config: VerifierConfig,
    /// Edge length when the verifiers were given as an equilateral triangle.
    pub equilateral_edge: Option<f64>,
    pub delta: f64,
    pub criterion: UtilityCriterion,
    pub alpha_step: f64,
    pub grid: Option<GridInput>,
    pub optimizer: OptimizerSettings,
    pub classify: Option<ClassifyInput>,
    pub region: Option<(Point, f64)>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Scenario::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        let scale = match split_unit(&file.range) {
            Some((1.0, "R")) => Scale {
                metres_per_range: None,
            },
            Some((_, "R")) => return Err(invalid("range in R units must be 1 R".into())),
            Some((r, unit)) => {
                let m = r * metre_factor(unit)
                    .ok_or_else(|| invalid(format!("range: unknown unit {unit:?}")))?;
                if !(m.is_finite() && m > 0.0) {
                    return Err(invalid("range must be positive".into()));
                }
                Scale {
                    metres_per_range: Some(m),
                }
            }
            None => {
                return Err(invalid(format!(
                    "range: cannot parse length {:?}",
                    file.range
                )))
            }
        };

        let (config, equilateral_edge) =
            match (&file.verifiers.positions, &file.verifiers.equilateral) {
                (Some(points), None) => {
                    let points = points
                        .iter()
                        .map(|xy| scale.point(xy, "verifier position"))
                        .collect::<Result<Vec<_>, _>>()?;
                    (VerifierConfig::new(points, 1.0)?, None)
                }
                (None, Some(eq)) => {
                    let edge = scale.length(&eq.edge, "edge")?;
                    let center = match &eq.center {
                        Some(c) => scale.point(c, "center")?,
                        None => Point::ORIGIN,
                    };
                    (
                        equilateral_verifiers(center, edge, eq.alpha, 1.0)?,
                        Some(edge),
                    )
                }
                _ => {
                    return Err(invalid(
                        "verifiers: give exactly one of positions or equilateral".into(),
                    ))
                }
            };

        let delta = match &file.delta {
            Some(d) => scale.length(d, "delta")?,
            None => IDEAL_DELTA,
        };
        if delta < 0.0 {
            return Err(invalid("delta must be non-negative".into()));
        }
        let criterion = match file.criterion {
            None | Some(CriterionName::MaximumDeception) => UtilityCriterion::MaximumDeception,
            Some(CriterionName::DeceptionArea) => UtilityCriterion::DeceptionArea,
            Some(CriterionName::DeceptionShape) => UtilityCriterion::DeceptionShape,
        };
        let alpha_step = file.alpha_step.unwrap_or(DEFAULT_ALPHA_STEP);
        if !(alpha_step.is_finite() && alpha_step > 0.0) {
            return Err(invalid("alpha_step must be positive".into()));
        }

        let grid = file
            .grid
            .as_ref()
            .map(|g| grid_input(g, &scale))
            .transpose()?;

        let defaults = OptimizerSettings::default();
        let optimizer = OptimizerSettings {
            restarts: file.optimizer.restarts.unwrap_or(defaults.restarts),
            max_iters: file.optimizer.max_iters.unwrap_or(defaults.max_iters),
            step_tolerance: file
                .optimizer
                .step_tolerance
                .unwrap_or(defaults.step_tolerance),
            seed: file.optimizer.seed.unwrap_or(defaults.seed),
        };
        optimizer.validate()?;

        let classify = match &file.classify {
            None => None,
            Some(c) => Some(match (&c.bounds, &c.true_position, &c.fake_position) {
                (Some(b), None, None) => {
                    let bounds = b
                        .iter()
                        .map(|s| scale.length(s, "bound"))
                        .collect::<Result<Vec<_>, _>>()?;
                    ClassifyInput::Bounds(DistanceBounds::new(bounds)?)
                }
                (None, Some(u), Some(p)) => ClassifyInput::Claim(Claim::new(
                    scale.point(u, "true position")?,
                    scale.point(p, "fake position")?,
                )),
                _ => {
                    return Err(invalid(
                        "classify: give either bounds or both true_position and fake_position"
                            .into(),
                    ))
                }
            }),
        };

        let region = match &file.region {
            None => None,
            Some(r) => {
                let step = match &r.step {
                    Some(s) => scale.length(s, "region step")?,
                    None => DEFAULT_RASTER_STEP,
                };
                if !(step.is_finite() && step > 0.0) {
                    return Err(invalid("region step must be positive".into()));
                }
                Some((scale.point(&r.true_position, "true position")?, step))
            }
        };

        Ok(Scenario {
            scale,
            config,
            equilateral_edge,
            delta,
            criterion,
            alpha_step,
            grid,
            optimizer,
            classify,
            region,
        })
    }
}

fn grid_input(g: &GridFile, scale: &Scale) -> Result<GridInput, CliError> {
    let side = match &g.side {
        Some(s) => scale.length(s, "grid side")?,
        None => 1.0,
    };
    let spec = match (g.points_per_edge, &g.step) {
        (Some(n), None) => GridSpec::with_points(side, n)?,
        (None, Some(step)) => GridSpec::with_step(side, scale.length(step, "grid step")?)?,
        _ => {
            return Err(invalid(
                "grid: give exactly one of points_per_edge or step".into(),
            ))
        }
    };
    let budget = match g.max_entries {
        None => DEFAULT_ENTRY_BUDGET,
        Some(b) if b.is_finite() && b >= 0.0 => b as u128,
        Some(_) => return Err(invalid("grid: max_entries must be non-negative".into())),
    };
    Ok(GridInput { spec, budget })
}
