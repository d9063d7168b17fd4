//! Pure-strategy analysis of the three-verifier game.
//!
//! For every admissible verifier triangle the malicious node has a claim
//! with positive deception ([`theorem1_witness`]), and for every claim the
//! verifiers have a placement that annihilates it
//! ([`verifier_best_response`]). Together these rule out a pure
//! equilibrium ([`no_pure_equilibrium_check`]). [`max_deception`] computes
//! the malicious node's best response to a fixed triangle.

use core::f64::consts::{FRAC_PI_3, PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::float;
use crate::geometry::{distance, equilateral_verifiers, to_polar, Point, PolarPoint, Triangle};
use crate::optimize::{multi_start, OptimizerSettings, Problem};
use crate::region::{payoff, BoundingBox, Claim, ClaimChecker, UtilityCriterion};
use crate::vm::VerifierConfig;

/// Relative slack when checking the pairwise-distance hypothesis.
const HYPOTHESIS_SLACK: f64 = 1e-9;
/// Rejection-sampling attempts per restart when looking for a feasible claim.
const START_ATTEMPTS: usize = 200_000;
/// Relative tolerance for recognising an equilateral triangle.
const EQUILATERAL_TOLERANCE: f64 = 1e-9;

/// Best claim found against a fixed verifier triangle, in polar
/// coordinates around the triangle's orthocenter. The polar axis points
/// from the orthocenter toward the first verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxminSolution {
    pub u_polar: PolarPoint,
    pub p_polar: PolarPoint,
    /// Maximum deception.
    pub value: f64,
    /// The claim in Cartesian coordinates.
    pub claim: Claim,
    pub orthocenter: Point,
    /// Direction of the polar axis.
    pub axis: f64,
    /// Whether any restart met the step tolerance.
    pub converged: bool,
}

impl MaxminSolution {
    /// Angular offset of the fake position from the true one, in `(-π, π]`.
    pub fn delta_theta(&self) -> f64 {
        let d = float::wrap(self.p_polar.theta() - self.u_polar.theta(), TAU);
        if d > PI {
            d - TAU
        } else {
            d
        }
    }
}

fn three_verifiers(config: &VerifierConfig) -> Result<Triangle> {
    if config.len() != 3 {
        return Err(Error::NotThreeVerifiers(config.len()));
    }
    config.verification_triangle()
}

fn check_pairwise_within_range(config: &VerifierConfig) -> Result<()> {
    let d = config.max_pairwise_distance();
    if d > config.range() * (1.0 + HYPOTHESIS_SLACK) {
        return Err(Error::VerifiersTooFar {
            distance: d,
            range: config.range(),
        });
    }
    Ok(())
}

/// A claim with positive deception against `config`.
///
/// The true position is the foot of the altitude from the verifier facing
/// the longest edge; the fake position lies further along that altitude,
/// halfway to the nearest range limit.
pub fn theorem1_witness(config: &VerifierConfig) -> Result<Claim> {
    three_verifiers(config)?;
    check_pairwise_within_range(config)?;
    let v = config.verifiers();
    let r = config.range();
    let opposite_len = |i: usize| distance(v[(i + 1) % 3], v[(i + 2) % 3]);
    let i = (0..3)
        .max_by(|&a, &b| opposite_len(a).total_cmp(&opposite_len(b)))
        .unwrap_or(0);
    let (apex, s, e) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
    let edge = e - s;
    let t = (apex - s).dot(edge) / edge.norm_squared();
    let foot = s + edge * t;
    let height = distance(apex, foot);
    let dir = (foot - apex) * (1.0 / height);

    // Largest extension keeping the fake position in range of all three.
    let to_s = distance(foot, s);
    let to_e = distance(foot, e);
    let limit = (r - height)
        .min(float::sqrt((r * r - to_s * to_s).max(0.0)))
        .min(float::sqrt((r * r - to_e * to_e).max(0.0)));
    Ok(Claim::new(foot, foot + dir * (0.5 * limit)))
}

/// The equilateral edge-`range` triangle centred on the claim's true
/// position. It leaves no plausible fake position for that node.
pub fn verifier_best_response(claim: &Claim, range: f64) -> Result<VerifierConfig> {
    equilateral_verifiers(claim.true_position, range, 0.0, range)
}

struct DeceptionProblem<'a> {
    checker: ClaimChecker<'a>,
}

fn claim_of(x: &[f64; 4]) -> Claim {
    Claim::new(Point::raw(x[0], x[1]), Point::raw(x[2], x[3]))
}

impl Problem<4> for DeceptionProblem<'_> {
    fn value(&self, x: &[f64; 4]) -> f64 {
        claim_of(x).deception()
    }

    fn feasible(&self, x: &[f64; 4]) -> bool {
        self.checker.admits(&claim_of(x))
    }

    fn ascent(&self, x: &[f64; 4]) -> Option<[f64; 4]> {
        let (dx, dy) = (x[0] - x[2], x[1] - x[3]);
        Some([dx, dy, -dx, -dy])
    }
}

fn is_equilateral(t: &Triangle) -> bool {
    let [a, b, c] = t.vertices();
    let (ab, bc, ca) = (distance(a, b), distance(b, c), distance(c, a));
    let longest = ab.max(bc).max(ca);
    let shortest = ab.min(bc).min(ca);
    longest - shortest <= EQUILATERAL_TOLERANCE * longest
}

/// Maps a claim into the sector `θ_U ∈ [0, π/3]` using the symmetries of
/// an equilateral triangle centred at `pole` with a vertex at angle `axis`.
fn fold_into_sector(claim: Claim, pole: Point, axis: f64) -> Claim {
    let theta = to_polar(claim.true_position, pole, axis).theta();
    let turns = float::floor(theta / (TAU / 3.0));
    let rotated = claim.map(|p| p.rotate_about(pole, -turns * TAU / 3.0));
    let theta = to_polar(rotated.true_position, pole, axis).theta();
    if theta > FRAC_PI_3 {
        rotated.map(|p| p.reflect_across(pole, axis + FRAC_PI_3))
    } else {
        rotated
    }
}

/// The malicious node's best pure response to a fixed three-verifier
/// configuration: maximize the deception over plausible claims.
pub fn max_deception(
    config: &VerifierConfig,
    settings: &OptimizerSettings,
) -> Result<MaxminSolution> {
    settings.validate()?;
    let triangle = three_verifiers(config)?;
    let r = config.range();
    let problem = DeceptionProblem {
        checker: ClaimChecker::new(config),
    };
    let bbox = BoundingBox::range_intersection(config)?;
    let (lo, hi) = (bbox.min(), bbox.max());
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
        for _ in 0..START_ATTEMPTS {
            let mut draw =
                || Point::raw(rng.gen_range(lo.x()..hi.x()), rng.gen_range(lo.y()..hi.y()));
            let claim = Claim::new(draw(), draw());
            if problem.checker.admits(&claim) {
                let (u, p) = (claim.true_position, claim.fake_position);
                return Some([u.x(), u.y(), p.x(), p.y()]);
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

    let pole = triangle.orthocenter();
    let first = config.verifiers()[0];
    let axis = if distance(first, pole) > 0.0 {
        let d = first - pole;
        float::atan2(d.y(), d.x())
    } else {
        0.0
    };
    let mut claim = claim_of(&run.best.point);
    if is_equilateral(&triangle) {
        let folded = fold_into_sector(claim, pole, axis);
        // Keep the folded copy only if it survived rounding.
        if problem.checker.admits(&folded) {
            claim = folded;
        }
    }
    Ok(MaxminSolution {
        u_polar: to_polar(claim.true_position, pole, axis),
        p_polar: to_polar(claim.fake_position, pole, axis),
        value: claim.deception(),
        claim,
        orthocenter: pole,
        axis,
        converged: run.converged,
    })
}

/// Confirms the best-response cycle that rules out a pure equilibrium: the
/// malicious node gains against `config`, and the verifiers' reply to that
/// claim brings the gain back to zero.
pub fn no_pure_equilibrium_check(
    config: &VerifierConfig,
    settings: &OptimizerSettings,
) -> Result<bool> {
    let solution = max_deception(config, settings)?;
    if solution.value <= 0.0 {
        return Ok(false);
    }
    let reply = verifier_best_response(&solution.claim, config.range())?;
    let after = payoff(
        &reply,
        &solution.claim,
        UtilityCriterion::MaximumDeception,
        1.0,
    );
    Ok(after == 0.0)
}
