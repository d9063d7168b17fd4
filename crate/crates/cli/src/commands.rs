use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use vmgame_core::discrete::{
    build_matrix, complexity_report, solve_minmax, ComplexityReport, GridSpec, PayoffMatrix,
};
use vmgame_core::geometry::distance;
use vmgame_core::mixed::{
    best_adversary_parameters, symmetry_reduction_check, VerifierMixedStrategy,
};
use vmgame_core::pure::max_deception;
use vmgame_core::region::{payoff, rasterize_region, BoundingBox, DEFAULT_RASTER_STEP};
use vmgame_core::vm::{classify, DistanceBounds};
use vmgame_core::UtilityCriterion;

use crate::error::CliError;
use crate::files;
use crate::report::*;
use crate::scenario::{ClassifyInput, Scenario};

/// Probability below which a verifier action is left out of the support.
const SUPPORT_THRESHOLD: f64 = 1e-9;

/// How a command finished. Every status still carries a payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
    OverBudget,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotConverged => 4,
            Status::OverBudget => 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub status: Status,
}

impl Output {
    fn json<T: serde::Serialize>(report: &T, converged: bool) -> Output {
        Output {
            text: to_json(report),
            status: if converged {
                Status::Ok
            } else {
                Status::NotConverged
            },
        }
    }
}

fn metres(s: &Scenario, value: f64) -> Option<f64> {
    s.scale.metres_per_range.map(|m| value * m)
}

fn missing(section: &str) -> CliError {
    CliError::Scenario(format!("this command needs a [{section}] section"))
}

pub fn classify_cmd(s: &Scenario) -> Result<Output, CliError> {
    let input = s.classify.as_ref().ok_or_else(|| missing("classify"))?;
    let (bounds, deception) = match input {
        ClassifyInput::Bounds(b) => (b.clone(), None),
        ClassifyInput::Claim(claim) => {
            // Bounds can only be enlarged: the node answers each verifier
            // as if it were at the fake position whenever that is farther.
            let forged = s
                .config
                .verifiers()
                .iter()
                .map(|&v| distance(claim.fake_position, v).max(distance(claim.true_position, v)))
                .collect();
            let gain = payoff(&s.config, claim, s.criterion, DEFAULT_RASTER_STEP);
            (DistanceBounds::new(forged)?, Some(gain))
        }
    };
    let (label, estimate) = classify(&s.config, &bounds, s.delta)?;
    let report = ClassifyReport {
        schema_version: SCHEMA_VERSION,
        label: label.to_string(),
        estimate: [estimate.position.x(), estimate.position.y()],
        residual: estimate.residual,
        bounds: bounds.as_slice().to_vec(),
        deception,
        deception_m: deception
            .filter(|_| s.criterion == UtilityCriterion::MaximumDeception)
            .and_then(|d| metres(s, d)),
    };
    Ok(Output::json(&report, true))
}

pub fn region_cmd(s: &Scenario) -> Result<Output, CliError> {
    let (u, step) = s.region.ok_or_else(|| missing("region"))?;
    let bbox = BoundingBox::range_intersection(&s.config)?;
    let raster = rasterize_region(&s.config, u, bbox, step)?;
    let mut text = Vec::new();
    files::write_raster(&raster, &mut text).expect("writing to memory");
    Ok(Output {
        text: String::from_utf8(text).expect("csv output is utf-8"),
        status: Status::Ok,
    })
}

pub fn maxmin_cmd(s: &Scenario) -> Result<Output, CliError> {
    let sol = max_deception(&s.config, &s.optimizer)?;
    let report = MaxminReport {
        schema_version: SCHEMA_VERSION,
        value: sol.value,
        true_position: Polar {
            rho: sol.u_polar.rho(),
            theta: sol.u_polar.theta(),
        },
        fake_position: Polar {
            rho: sol.p_polar.rho(),
            theta: sol.p_polar.theta(),
        },
        delta_theta: sol.delta_theta(),
        orthocenter: [sol.orthocenter.x(), sol.orthocenter.y()],
        axis: sol.axis,
        converged: sol.converged,
        seed: s.optimizer.seed,
        value_m: metres(s, sol.value),
    };
    Ok(Output::json(&report, sol.converged))
}

fn complexity_json(grid: &GridSpec, c: &ComplexityReport) -> ComplexityJson {
    ComplexityJson {
        schema_version: SCHEMA_VERSION,
        points_per_edge: grid.points_per_edge(),
        points: c.points,
        adversary_actions: c.adversary_actions,
        verifier_triples: c.verifier_triples,
        matrix_entries: c.matrix_entries,
        squared_adversary_actions: c.squared_adversary_actions,
        squared_verifier_triples: c.squared_verifier_triples,
        budget: c.budget,
        within_budget: c.within_budget,
    }
}

pub fn complexity_cmd(s: &Scenario) -> Result<Output, CliError> {
    let grid = s.grid.as_ref().ok_or_else(|| missing("grid"))?;
    let c = complexity_report(&grid.spec, grid.budget);
    Ok(Output::json(&complexity_json(&grid.spec, &c), true))
}

fn solve_report(
    matrix: &PayoffMatrix,
    verifiers: Option<&dyn Fn(usize) -> Vec<[f64; 2]>>,
) -> Result<LpReport, CliError> {
    let result = solve_minmax(matrix)?;
    let support = result
        .support(SUPPORT_THRESHOLD)
        .into_iter()
        .map(|action| SupportEntry {
            action,
            probability: result.verifier_mixed[action],
            verifiers: verifiers.map(|f| f(action)),
        })
        .collect();
    Ok(LpReport {
        schema_version: SCHEMA_VERSION,
        value: result.value,
        adversary_actions: matrix.rows(),
        verifier_actions: matrix.cols(),
        positive_entries: matrix.positive_entries(),
        support,
        complexity: None,
    })
}

pub fn lp_cmd(
    s: &Scenario,
    matrix_in: Option<&Path>,
    matrix_out: Option<&Path>,
) -> Result<Output, CliError> {
    if let Some(path) = matrix_in {
        let file = File::open(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let matrix = files::read_matrix(file, path)?;
        return Ok(Output::json(&solve_report(&matrix, None)?, true));
    }
    let grid = s.grid.as_ref().ok_or_else(|| missing("grid"))?;
    let c = complexity_report(&grid.spec, grid.budget);
    let complexity = complexity_json(&grid.spec, &c);
    if !c.within_budget {
        return Ok(Output {
            text: to_json(&complexity),
            status: Status::OverBudget,
        });
    }
    let (actions, matrix) = build_matrix(&grid.spec, 1.0, s.criterion)?;
    if let Some(path) = matrix_out {
        let io_error = |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = File::create(path).map_err(io_error)?;
        files::write_matrix(&matrix, BufWriter::new(file)).map_err(|e| io_error(e.into()))?;
    }
    let positions = |action: usize| {
        actions.verifier[action]
            .iter()
            .map(|&i| [actions.points[i].x(), actions.points[i].y()])
            .collect()
    };
    let mut report = solve_report(&matrix, Some(&positions))?;
    report.complexity = Some(complexity);
    Ok(Output::json(&report, true))
}

pub fn mixed_cmd(s: &Scenario) -> Result<Output, CliError> {
    let edge = s
        .equilateral_edge
        .ok_or_else(|| CliError::Scenario("mixed needs equilateral verifiers".into()))?;
    let verifier = VerifierMixedStrategy::uniform(edge, 1.0);
    let eq = best_adversary_parameters(&verifier, &s.optimizer, s.alpha_step)?;
    let symmetric = symmetry_reduction_check(&eq.strategy, &verifier, s.alpha_step)?;
    let report = MixedReport {
        schema_version: SCHEMA_VERSION,
        expected_utility: eq.expected_utility,
        rho_u: eq.strategy.rho_u,
        rho_p: eq.strategy.rho_p,
        delta_theta: eq.strategy.delta_theta,
        integration_step: eq.integration_step,
        edge,
        converged: eq.converged,
        symmetry_reduction_holds: symmetric,
        seed: s.optimizer.seed,
        expected_utility_m: metres(s, eq.expected_utility),
    };
    Ok(Output::json(&report, eq.converged))
}
