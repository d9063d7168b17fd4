//! The Verifiable Multilateration pipeline: distance bounds from round-trip
//! times, least-squares position estimation, and the two incremental tests
//! (delta consistency, then point-in-triangle) that label a position.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::geometry::{distance, Point, Triangle};

/// Seed grid resolution per axis for the estimator.
const SEED_GRID: usize = 41;
/// Number of grid local minima refined by Levenberg-Marquardt.
const SEED_COUNT: usize = 6;
/// Iteration cap per seed.
pub const MAX_ESTIMATION_ITERS: usize = 200;
/// Step-size convergence threshold, relative to the range.
pub const STEP_TOLERANCE: f64 = 1e-12;

/// Default delta for the ideal, noise-free setting, relative to the range.
pub const IDEAL_DELTA: f64 = 1e-6;

/// Trusted verifier positions and their common signal range.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifierConfig {
    verifiers: Vec<Point>,
    range: f64,
}

impl VerifierConfig {
    pub fn new(verifiers: Vec<Point>, range: f64) -> Result<VerifierConfig> {
        if !range.is_finite() {
            return Err(Error::NonFinite("range"));
        }
        if range <= 0.0 {
            return Err(Error::NonPositive("range"));
        }
        if verifiers.len() < 3 {
            return Err(Error::TooFewVerifiers(verifiers.len()));
        }
        for (i, a) in verifiers.iter().enumerate() {
            if !a.x().is_finite() || !a.y().is_finite() {
                return Err(Error::NonFinite("verifier position"));
            }
            for (j, b) in verifiers.iter().enumerate().skip(i + 1) {
                if a == b {
                    return Err(Error::DuplicateVerifier {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(VerifierConfig { verifiers, range })
    }

    pub fn verifiers(&self) -> &[Point] {
        &self.verifiers
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn len(&self) -> usize {
        self.verifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verifiers.is_empty()
    }

    pub fn triangle(&self, i: usize, j: usize, k: usize) -> Result<Triangle> {
        Triangle::new(self.verifiers[i], self.verifiers[j], self.verifiers[k])
    }

    /// Every non-degenerate verification triangle over all verifier triplets.
    pub fn triangles(&self) -> Vec<Triangle> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if let Ok(t) = self.triangle(i, j, k) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// The single triangle of a three-verifier configuration.
    pub fn verification_triangle(&self) -> Result<Triangle> {
        if self.len() != 3 {
            return Err(Error::NotThreeVerifiers(self.len()));
        }
        self.triangle(0, 1, 2)
    }

    pub fn max_pairwise_distance(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.verifiers.iter().enumerate() {
            for b in &self.verifiers[i + 1..] {
                best = best.max(distance(*a, *b));
            }
        }
        best
    }

    /// Applies `f` to every verifier position, keeping the range.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Result<VerifierConfig> {
        VerifierConfig::new(self.verifiers.iter().map(|&p| f(p)).collect(), self.range)
    }

    /// Uniform scaling of positions and range about the origin.
    pub fn scaled(&self, k: f64) -> Result<VerifierConfig> {
        VerifierConfig::new(
            self.verifiers.iter().map(|&p| p * k).collect(),
            self.range * k,
        )
    }

    /// Axis-aligned box containing every verifier, inflated by the range.
    fn search_box(&self) -> (Point, Point) {
        let mut lo = self.verifiers[0];
        let mut hi = lo;
        for p in &self.verifiers {
            lo = Point::raw(lo.x().min(p.x()), lo.y().min(p.y()));
            hi = Point::raw(hi.x().max(p.x()), hi.y().max(p.y()));
        }
        let r = Point::raw(self.range, self.range);
        (lo - r, hi + r)
    }
}

/// One distance bound per verifier.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceBounds(Vec<f64>);

impl DistanceBounds {
    pub fn new(bounds: Vec<f64>) -> Result<DistanceBounds> {
        for &b in &bounds {
            if !b.is_finite() {
                return Err(Error::NonFinite("distance bound"));
            }
            if b < 0.0 {
                return Err(Error::Negative("distance bound"));
            }
        }
        Ok(DistanceBounds(bounds))
    }

    /// Bounds measured from round-trip times.
    pub fn from_round_trip_times(taus: &[f64], signal_speed: f64) -> Result<DistanceBounds> {
        let bounds = taus
            .iter()
            .map(|&t| derive_bound(t, signal_speed))
            .collect::<Result<Vec<_>>>()?;
        Ok(DistanceBounds(bounds))
    }

    /// Honest, noise-free bounds for a node at `position`.
    pub fn exact(config: &VerifierConfig, position: Point) -> DistanceBounds {
        DistanceBounds(
            config
                .verifiers()
                .iter()
                .map(|&v| distance(v, position))
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, k: f64) -> DistanceBounds {
        DistanceBounds(self.0.iter().map(|b| b * k).collect())
    }
}

/// Distance bound from a challenge round-trip time: half the round trip
/// at the signal speed, with zero processing delay.
pub fn derive_bound(tau: f64, signal_speed: f64) -> Result<f64> {
    if !tau.is_finite() || !signal_speed.is_finite() {
        return Err(Error::NonFinite("round-trip time or signal speed"));
    }
    if tau < 0.0 {
        return Err(Error::Negative("round-trip time"));
    }
    if signal_speed <= 0.0 {
        return Err(Error::NonPositive("signal speed"));
    }
    Ok(signal_speed * tau / 2.0)
}

/// A least-squares position estimate and its sum of squared errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub position: Point,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Robust,
    Malicious,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Robust => "Robust",
            Outcome::Malicious => "Malicious",
            Outcome::Unknown => "Unknown",
        })
    }
}

fn sum_squared_error(verifiers: &[Point], bounds: &[f64], x: Point) -> f64 {
    verifiers
        .iter()
        .zip(bounds)
        .map(|(&v, &b)| {
            let r = b - distance(x, v);
            r * r
        })
        .sum()
}

struct Refined {
    position: Point,
    residual: f64,
    converged: bool,
}

/// Levenberg-Marquardt on the 2-D range residuals, starting at `start`.
fn refine(verifiers: &[Point], bounds: &[f64], start: Point, tol: f64) -> Refined {
    let mut x = start;
    let mut err = sum_squared_error(verifiers, bounds, x);
    let mut lambda = 1e-3;
    for _ in 0..MAX_ESTIMATION_ITERS {
        if err == 0.0 {
            return Refined {
                position: x,
                residual: err,
                converged: true,
            };
        }
        // J_i = -(x - v_i)/|x - v_i| is the derivative of r_i = b_i - |x - v_i|.
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&v, &b) in verifiers.iter().zip(bounds) {
            let d = x - v;
            let n = d.norm();
            let (ux, uy) = if n > 0.0 {
                (d.x() / n, d.y() / n)
            } else {
                (1.0, 0.0)
            };
            let (jx, jy) = (-ux, -uy);
            let r = b - n;
            a11 += jx * jx;
            a12 += jx * jy;
            a22 += jy * jy;
            g1 += jx * r;
            g2 += jy * r;
            // Residual curvature r * d2r, d2r = -(I - u u^T) / n; skipped at the cusp.
            if n > 1e3 * tol {
                let k = -r / n;
                a11 += k * (1.0 - ux * ux);
                a12 -= k * ux * uy;
                a22 += k * (1.0 - uy * uy);
            }
        }
        let scale = verifiers.len() as f64 / 2.0;
        // Inner loop adjusts damping until the step is accepted or too small.
        loop {
            let (m11, m22) = (a11 + lambda * scale, a22 + lambda * scale);
            let det = m11 * m22 - a12 * a12;
            if !(m11 > 0.0 && det > 0.0) {
                lambda *= 10.0;
                continue;
            }
            let step = Point::raw(-(m22 * g1 - a12 * g2) / det, -(m11 * g2 - a12 * g1) / det);
            let step_norm = step.norm();
            if !step_norm.is_finite() {
                lambda *= 10.0;
                if lambda > 1e16 {
                    return Refined {
                        position: x,
                        residual: err,
                        converged: true,
                    };
                }
                continue;
            }
            if step_norm < tol {
                return Refined {
                    position: x,
                    residual: err,
                    converged: true,
                };
            }
            let candidate = x + step;
            let cand_err = sum_squared_error(verifiers, bounds, candidate);
            if cand_err < err {
                x = candidate;
                err = cand_err;
                lambda = (lambda / 3.0).max(1e-12);
                break;
            }
            lambda *= 4.0;
        }
    }
    Refined {
        position: x,
        residual: err,
        converged: false,
    }
}

/// The position minimizing the sum of squared range errors.
///
/// A coarse grid over the verifiers' bounding box (inflated by the range)
/// provides seeds; the best grid-local minima are refined by damped
/// Newton (Levenberg-Marquardt). Deterministic for fixed inputs.
pub fn estimate_position(config: &VerifierConfig, bounds: &DistanceBounds) -> Result<Estimate> {
    if bounds.len() != config.len() {
        return Err(Error::BoundCountMismatch {
            verifiers: config.len(),
            bounds: bounds.len(),
        });
    }
    let verifiers = config.verifiers();
    let b = bounds.as_slice();
    let (lo, hi) = config.search_box();
    let (dx, dy) = (
        (hi.x() - lo.x()) / (SEED_GRID - 1) as f64,
        (hi.y() - lo.y()) / (SEED_GRID - 1) as f64,
    );
    let at = |i: usize, j: usize| Point::raw(lo.x() + i as f64 * dx, lo.y() + j as f64 * dy);
    let mut values = Vec::with_capacity(SEED_GRID * SEED_GRID);
    for j in 0..SEED_GRID {
        for i in 0..SEED_GRID {
            values.push(sum_squared_error(verifiers, b, at(i, j)));
        }
    }
    let value = |i: usize, j: usize| values[j * SEED_GRID + i];
    let mut seeds: Vec<(f64, usize, usize)> = Vec::new();
    for j in 0..SEED_GRID {
        for i in 0..SEED_GRID {
            let v = value(i, j);
            let mut is_min = true;
            'nb: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ni < 0 || nj < 0 {
                        continue;
                    }
                    let (ni, nj) = (ni as usize, nj as usize);
                    if ni >= SEED_GRID || nj >= SEED_GRID {
                        continue;
                    }
                    // Strict on one side so plateaus still yield a seed.
                    let w = value(ni, nj);
                    if w < v || (w == v && (nj, ni) < (j, i)) {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push((v, i, j));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.2, a.1).cmp(&(b.2, b.1))));
    seeds.truncate(SEED_COUNT);

    let tol = STEP_TOLERANCE * config.range();
    let mut best: Option<Refined> = None;
    for &(_, i, j) in &seeds {
        let r = refine(verifiers, b, at(i, j), tol);
        if !r.converged {
            continue;
        }
        if best.as_ref().is_none_or(|cur| r.residual < cur.residual) {
            best = Some(r);
        }
    }
    match best {
        Some(r) => Ok(Estimate {
            position: r.position,
            residual: r.residual,
        }),
        None => Err(Error::EstimationDidNotConverge {
            iterations: MAX_ESTIMATION_ITERS,
        }),
    }
}

/// Runs the delta test and the point-in-triangle test on `bounds`.
///
/// Malicious when some bound disagrees with the estimate by more than
/// `delta`; Robust when the estimate lies in at least one verification
/// triangle; Unknown otherwise, including estimates outside every
/// verifier's range.
pub fn classify(
    config: &VerifierConfig,
    bounds: &DistanceBounds,
    delta: f64,
) -> Result<(Outcome, Estimate)> {
    if !delta.is_finite() {
        return Err(Error::NonFinite("delta"));
    }
    if delta < 0.0 {
        return Err(Error::Negative("delta"));
    }
    let estimate = estimate_position(config, bounds)?;
    let p = estimate.position;
    let inconsistent = config
        .verifiers()
        .iter()
        .zip(bounds.as_slice())
        .any(|(&v, &b)| (b - distance(p, v)).abs() > delta);
    if inconsistent {
        return Ok((Outcome::Malicious, estimate));
    }
    let in_some_range = config
        .verifiers()
        .iter()
        .any(|&v| distance(p, v) <= config.range());
    let in_triangle = config.triangles().iter().any(|t| t.contains(p));
    let outcome = if in_some_range && in_triangle {
        Outcome::Robust
    } else {
        Outcome::Unknown
    };
    Ok((outcome, estimate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::equilateral_verifiers;
    use alloc::vec;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y).unwrap()
    }

    fn unit_config() -> VerifierConfig {
        equilateral_verifiers(Point::ORIGIN, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn bound_from_round_trip() {
        assert_eq!(derive_bound(0.0, 3e8).unwrap(), 0.0);
        assert!((derive_bound(2e-8, 3e8).unwrap() - 3.0).abs() < 1e-12);
        let a = derive_bound(1e-7, 2e8).unwrap();
        let b = derive_bound(2e-7, 2e8).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
        assert_eq!(
            derive_bound(-1.0, 1.0),
            Err(Error::Negative("round-trip time"))
        );
        assert_eq!(
            derive_bound(1.0, 0.0),
            Err(Error::NonPositive("signal speed"))
        );
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            VerifierConfig::new(vec![pt(0.0, 0.0), pt(1.0, 0.0)], 1.0),
            Err(Error::TooFewVerifiers(2))
        );
        assert_eq!(
            VerifierConfig::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 0.0)], 1.0),
            Err(Error::DuplicateVerifier {
                first: 0,
                second: 2
            })
        );
        assert!(VerifierConfig::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)], 0.0).is_err());
    }

    #[test]
    fn bounds_validation() {
        assert!(DistanceBounds::new(vec![1.0, -0.1, 1.0]).is_err());
        let cfg = unit_config();
        let short = DistanceBounds::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(
            estimate_position(&cfg, &short),
            Err(Error::BoundCountMismatch {
                verifiers: 3,
                bounds: 2
            })
        );
    }

    #[test]
    fn centroid_recovered_exactly() {
        let cfg = unit_config();
        let est = estimate_position(&cfg, &DistanceBounds::exact(&cfg, Point::ORIGIN)).unwrap();
        assert!(est.position.norm() < 1e-9);
        assert!(est.residual < 1e-10);
    }

    #[test]
    fn exterior_point_recovered() {
        let cfg = unit_config();
        // Beyond the edge opposite the first verifier, within every range.
        let p = pt(-0.35, 0.05);
        assert!(cfg.verifiers().iter().all(|&v| distance(v, p) < 1.0));
        let est = estimate_position(&cfg, &DistanceBounds::exact(&cfg, p)).unwrap();
        assert!(distance(est.position, p) < 1e-9);
        assert!(est.residual < 1e-16);
    }

    #[test]
    fn enlarged_bound_leaves_residual() {
        let cfg = unit_config();
        let mut b = DistanceBounds::exact(&cfg, pt(0.05, 0.02)).0;
        b[0] += 0.2;
        let est = estimate_position(&cfg, &DistanceBounds(b)).unwrap();
        assert!(est.residual > 1e-6);
    }

    #[test]
    fn classification_examples() {
        let cfg = unit_config();
        let (label, _) =
            classify(&cfg, &DistanceBounds::exact(&cfg, pt(0.02, -0.05)), 1e-6).unwrap();
        assert_eq!(label, Outcome::Robust);

        let (label, est) =
            classify(&cfg, &DistanceBounds::exact(&cfg, pt(-0.35, 0.05)), 1e-6).unwrap();
        assert_eq!(label, Outcome::Unknown);
        assert!(distance(est.position, pt(-0.35, 0.05)) < 1e-6);

        let mut b = DistanceBounds::exact(&cfg, Point::ORIGIN).0;
        b[0] *= 1.1;
        let (label, _) = classify(&cfg, &DistanceBounds(b), 1e-3).unwrap();
        assert_eq!(label, Outcome::Malicious);
    }

    #[test]
    fn negative_delta_rejected() {
        let cfg = unit_config();
        let b = DistanceBounds::exact(&cfg, Point::ORIGIN);
        assert_eq!(
            classify(&cfg, &b, -1.0).unwrap_err(),
            Error::Negative("delta")
        );
    }

    #[test]
    fn more_than_three_verifiers_use_every_triplet() {
        // The estimate sits in the triangle (1,2,3) but not in (0,1,2).
        let cfg = VerifierConfig::new(
            vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.5, 0.8), pt(1.4, 0.9)],
            2.0,
        )
        .unwrap();
        let node = pt(1.05, 0.6);
        assert!(!cfg.triangle(0, 1, 2).unwrap().contains(node));
        let (label, _) = classify(&cfg, &DistanceBounds::exact(&cfg, node), 1e-6).unwrap();
        assert_eq!(label, Outcome::Robust);
    }
}
