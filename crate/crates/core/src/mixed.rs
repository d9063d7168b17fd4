//! The mixed-strategy game around a fixed orthocenter.
//!
//! The verifiers keep an equilateral triangle centred at the origin and
//! randomize only its rotation `α`. The malicious node plays a claim given
//! in polar form around the same centre, `U = (ρ_U, θ_U)` and
//! `P = (ρ_P, θ_U + Δθ)`, with `θ_U` uniform. Rotating the triangle by `α`
//! is the same as rotating the claim by `-α`, and a uniform `θ_U` is
//! absorbed by a uniform `α`, so `θ_U` is pinned to zero inside the
//! integral.

use core::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::float;
use crate::geometry::{equilateral_verifiers, Point};
use crate::optimize::{multi_start, OptimizerSettings, Problem};
use crate::region::{Claim, ClaimChecker};
use crate::vm::VerifierConfig;

/// Rotation period of an equilateral triangle.
pub const SECTOR: f64 = TAU / 3.0;

/// Default quadrature step in radians.
pub const DEFAULT_ALPHA_STEP: f64 = 1e-3;

/// Agreement required between the one-sector and full-circle integrals,
/// relative to the range.
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;

/// Draws per restart when looking for a start with positive utility.
const START_ATTEMPTS: usize = 20_000;

/// Distribution of the triangle's rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaDensity {
    /// Uniform over `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Always the same rotation: a pure strategy.
    PointMass(f64),
}

impl AlphaDensity {
    /// Uniform over one symmetry sector, `[0, 2π/3]`.
    pub fn canonical() -> AlphaDensity {
        AlphaDensity::Uniform {
            lo: 0.0,
            hi: SECTOR,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AlphaDensity::Uniform { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::NonFinite("alpha bounds"));
                }
                if hi <= lo {
                    return Err(Error::InvalidDensity("uniform support is empty"));
                }
                Ok(())
            }
            AlphaDensity::PointMass(a) if !a.is_finite() => Err(Error::NonFinite("alpha")),
            AlphaDensity::PointMass(_) => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifierMixedStrategy {
    pub alpha_density: AlphaDensity,
    pub edge: f64,
    pub range: f64,
}

impl VerifierMixedStrategy {
    /// Uniform rotation over one sector with the given edge.
    pub fn uniform(edge: f64, range: f64) -> VerifierMixedStrategy {
        VerifierMixedStrategy {
            alpha_density: AlphaDensity::canonical(),
            edge,
            range,
        }
    }

    /// The triangle at rotation zero.
    pub fn base_config(&self) -> Result<VerifierConfig> {
        self.alpha_density.validate()?;
        equilateral_verifiers(Point::ORIGIN, self.edge, 0.0, self.range)
    }
}

/// Claim parameters; `θ_U` is uniform over the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryMixedStrategy {
    pub rho_u: f64,
    pub rho_p: f64,
    /// `θ_P − θ_U` in `(−π, π]`.
    pub delta_theta: f64,
}

impl AdversaryMixedStrategy {
    pub fn new(rho_u: f64, rho_p: f64, delta_theta: f64) -> Result<AdversaryMixedStrategy> {
        if !rho_u.is_finite() || !rho_p.is_finite() || !delta_theta.is_finite() {
            return Err(Error::NonFinite("claim parameters"));
        }
        if rho_u < 0.0 {
            return Err(Error::Negative("rho_u"));
        }
        if rho_p < 0.0 {
            return Err(Error::Negative("rho_p"));
        }
        Ok(AdversaryMixedStrategy {
            rho_u,
            rho_p,
            delta_theta: signed_angle(delta_theta),
        })
    }

    /// The claim for a given `θ_U`.
    pub fn claim(&self, theta_u: f64) -> Claim {
        let at =
            |rho: f64, theta: f64| Point::raw(rho * float::cos(theta), rho * float::sin(theta));
        Claim::new(
            at(self.rho_u, theta_u),
            at(self.rho_p, theta_u + self.delta_theta),
        )
    }
}

fn signed_angle(a: f64) -> f64 {
    let w = float::wrap(a, TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport {
    pub expected_utility: f64,
    pub strategy: AdversaryMixedStrategy,
    pub integration_step: f64,
    /// Whether any restart met the step tolerance.
    pub converged: bool,
}

/// Midpoint nodes covering `[lo, hi]` with cell width at most `step`.
fn midpoints(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let cells = float::ceil((hi - lo) / step).max(1.0) as usize;
    let h = (hi - lo) / cells as f64;
    (0..cells).map(move |k| lo + (k as f64 + 0.5) * h)
}

/// Evaluates expected utilities against a fixed verifier strategy.
struct Integrator<'a> {
    checker: ClaimChecker<'a>,
    density: AlphaDensity,
    step: f64,
}

impl Integrator<'_> {
    fn value(&self, adversary: &AdversaryMixedStrategy, theta_u: f64) -> f64 {
        let claim = adversary.claim(theta_u);
        let gain = claim.deception();
        if gain == 0.0 {
            return 0.0;
        }
        let admitted = |alpha: f64| {
            let turned = claim.map(|p| p.rotate_about(Point::ORIGIN, -alpha));
            self.checker.admits(&turned)
        };
        match self.density {
            AlphaDensity::PointMass(a) => {
                if admitted(a) {
                    gain
                } else {
                    0.0
                }
            }
            AlphaDensity::Uniform { lo, hi } => {
                let (mut hits, mut nodes) = (0usize, 0usize);
                for alpha in midpoints(lo, hi, self.step) {
                    nodes += 1;
                    hits += admitted(alpha) as usize;
                }
                gain * hits as f64 / nodes as f64
            }
        }
    }
}

fn check_step(alpha_step: f64) -> Result<()> {
    if !alpha_step.is_finite() {
        return Err(Error::NonFinite("alpha step"));
    }
    if alpha_step <= 0.0 {
        return Err(Error::NonPositive("alpha step"));
    }
    Ok(())
}

/// Expected deception of the claim with `θ_U = 0` against the rotation
/// density, by midpoint quadrature.
pub fn expected_utility(
    adversary: &AdversaryMixedStrategy,
    verifier: &VerifierMixedStrategy,
    alpha_step: f64,
) -> Result<f64> {
    expected_utility_at(adversary, verifier, alpha_step, 0.0)
}

/// [`expected_utility`] with an explicit `θ_U`.
pub fn expected_utility_at(
    adversary: &AdversaryMixedStrategy,
    verifier: &VerifierMixedStrategy,
    alpha_step: f64,
    theta_u: f64,
) -> Result<f64> {
    check_step(alpha_step)?;
    let config = verifier.base_config()?;
    let integrator = Integrator {
        checker: ClaimChecker::new(&config),
        density: verifier.alpha_density,
        step: alpha_step,
    };
    Ok(integrator.value(adversary, theta_u))
}

struct ParameterProblem<'a> {
    integrator: Integrator<'a>,
    range: f64,
}

fn strategy_of(x: &[f64; 3]) -> AdversaryMixedStrategy {
    AdversaryMixedStrategy {
        rho_u: x[0],
        rho_p: x[1],
        delta_theta: x[2],
    }
}

impl Problem<3> for ParameterProblem<'_> {
    fn value(&self, x: &[f64; 3]) -> f64 {
        self.integrator.value(&strategy_of(x), 0.0)
    }

    fn feasible(&self, x: &[f64; 3]) -> bool {
        (0.0..=self.range).contains(&x[0]) && (0.0..=self.range).contains(&x[1]) && x[2].is_finite()
    }

    fn normalize(&self, x: [f64; 3]) -> [f64; 3] {
        [x[0], x[1], signed_angle(x[2])]
    }
}

/// Maximizes the expected utility over `(ρ_U, ρ_P, Δθ)` with both radii in
/// `[0, R]`.
pub fn best_adversary_parameters(
    verifier: &VerifierMixedStrategy,
    settings: &OptimizerSettings,
    alpha_step: f64,
) -> Result<EquilibriumReport> {
    check_step(alpha_step)?;
    settings.validate()?;
    let config = verifier.base_config()?;
    let r = verifier.range;
    let problem = ParameterProblem {
        integrator: Integrator {
            checker: ClaimChecker::new(&config),
            density: verifier.alpha_density,
            step: alpha_step,
        },
        range: r,
    };
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
        for _ in 0..START_ATTEMPTS {
            let x = [
                rng.gen_range(0.0..r),
                rng.gen_range(0.0..r),
                rng.gen_range(-PI..PI),
            ];
            if problem.value(&x) > 0.0 {
                return Some(x);
            }
        }
        None
    };
    let run = multi_start(
        &problem,
        settings,
        0.05 * r,
        settings.step_tolerance * r,
        sample,
    )?;
    Ok(EquilibriumReport {
        expected_utility: run.best.value,
        strategy: strategy_of(&problem.normalize(run.best.point)),
        integration_step: alpha_step,
        converged: run.converged,
    })
}

/// Whether integrating over one sector gives the same value as the full
/// circle. Needs the uniform sector density; the full-circle integral uses
/// the same cell width so both share their nodes modulo `2π/3`.
pub fn symmetry_reduction_check(
    adversary: &AdversaryMixedStrategy,
    verifier: &VerifierMixedStrategy,
    alpha_step: f64,
) -> Result<bool> {
    check_step(alpha_step)?;
    match verifier.alpha_density {
        AlphaDensity::Uniform { lo, hi } if lo == 0.0 && hi == SECTOR => {}
        _ => {
            return Err(Error::InvalidDensity(
                "symmetry check needs the uniform sector density",
            ))
        }
    }
    let sector = expected_utility(adversary, verifier, alpha_step)?;
    let cells = float::ceil(SECTOR / alpha_step).max(1.0);
    let full_step = TAU / (3.0 * cells);
    let full = VerifierMixedStrategy {
        alpha_density: AlphaDensity::Uniform { lo: 0.0, hi: TAU },
        ..*verifier
    };
    // Nudge the step below the exact cell width so rounding cannot add a cell.
    let whole = expected_utility(adversary, &full, full_step * (1.0 + 1e-12))?;
    Ok((sector - whole).abs() <= SYMMETRY_TOLERANCE * verifier.range)
}
