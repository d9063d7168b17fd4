//! Multi-start feasible ascent used by the pure and mixed analyses.
//!
//! Each restart starts from a feasible point and repeatedly tries the
//! problem's ascent direction, the coordinate directions and a few random
//! directions. A trial that leaves the feasible set is pulled back by
//! bisection toward the current iterate. The step halves whenever no trial
//! improves, and a restart converges once the step drops below tolerance.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::float;

/// Bisection rounds used to pull an infeasible trial back into the set.
const PROJECTION_ROUNDS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub max_iters: usize,
    /// Step tolerance relative to the range.
    pub step_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            restarts: 64,
            max_iters: 500,
            step_tolerance: 1e-6,
            seed: 42,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::NonPositive("restarts"));
        }
        if self.max_iters == 0 {
            return Err(Error::NonPositive("max_iters"));
        }
        if !self.step_tolerance.is_finite() {
            return Err(Error::NonFinite("step_tolerance"));
        }
        if self.step_tolerance <= 0.0 {
            return Err(Error::NonPositive("step_tolerance"));
        }
        Ok(())
    }

    /// Deterministic random stream for one restart.
    pub fn rng_for(&self, restart: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(restart as u64);
        rng
    }
}

/// A maximization problem over `N` real variables.
pub trait Problem<const N: usize> {
    fn value(&self, x: &[f64; N]) -> f64;

    fn feasible(&self, x: &[f64; N]) -> bool;

    /// An ascent direction at `x`, if one is cheaply available.
    fn ascent(&self, _x: &[f64; N]) -> Option<[f64; N]> {
        None
    }

    /// Maps a point to its canonical representative (angle wrapping, ...).
    fn normalize(&self, x: [f64; N]) -> [f64; N] {
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOptimum<const N: usize> {
    pub point: [f64; N],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn unit<const N: usize>(mut d: [f64; N]) -> Option<[f64; N]> {
    let n = float::sqrt(d.iter().map(|v| v * v).sum());
    if !(n.is_finite() && n > 0.0) {
        return None;
    }
    d.iter_mut().for_each(|v| *v /= n);
    Some(d)
}

fn offset<const N: usize>(x: &[f64; N], d: &[f64; N], t: f64) -> [f64; N] {
    let mut y = *x;
    for k in 0..N {
        y[k] += t * d[k];
    }
    y
}

fn lerp<const N: usize>(a: &[f64; N], b: &[f64; N], t: f64) -> [f64; N] {
    let mut y = *a;
    for k in 0..N {
        y[k] += t * (b[k] - a[k]);
    }
    y
}

/// Bisects the segment from feasible `from` to infeasible `to` for the
/// largest feasible fraction found.
fn last_feasible<const N: usize, P: Problem<N>>(
    problem: &P,
    from: &[f64; N],
    to: &[f64; N],
) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..PROJECTION_ROUNDS {
        let mid = 0.5 * (lo + hi);
        if problem.feasible(&lerp(from, to, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Local ascent from a feasible `start`.
pub fn ascend<const N: usize, P: Problem<N>>(
    problem: &P,
    start: [f64; N],
    initial_step: f64,
    tolerance: f64,
    max_iters: usize,
    rng: &mut impl Rng,
) -> LocalOptimum<N> {
    let mut x = start;
    let mut fx = problem.value(&x);
    let mut step = initial_step;
    let max_step = initial_step * 4.0;
    // Last accepted displacement; following it lets iterates slide along
    // an active constraint instead of jamming against it.
    let mut momentum: Option<[f64; N]> = None;

    for iter in 0..max_iters {
        let mut directions: Vec<[f64; N]> = [problem.ascent(&x).and_then(unit), momentum]
            .into_iter()
            .flatten()
            .collect();
        while directions.len() < N + 2 {
            let mut d = [0.0; N];
            d.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
            if let Some(d) = unit(d) {
                directions.push(d);
            }
        }
        let coordinate = (0..2 * N).map(|k| {
            let mut d = [0.0; N];
            d[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            d
        });

        let mut best: Option<([f64; N], f64)> = None;
        let consider = |y: [f64; N], best: &mut Option<([f64; N], f64)>| {
            let y = problem.normalize(y);
            let fy = problem.value(&y);
            if fy > best.map_or(fx, |b| b.1) {
                *best = Some((y, fy));
            }
        };
        for d in directions.iter().copied().chain(coordinate) {
            let y = offset(&x, &d, step);
            if problem.feasible(&y) {
                consider(y, &mut best);
                continue;
            }
            let lo = last_feasible(problem, &x, &y);
            if lo > 0.0 {
                consider(lerp(&x, &y, lo), &mut best);
                consider(lerp(&x, &y, 0.5 * lo), &mut best);
            }
            // Pulling back toward an interior anchor instead lands near
            // the boundary point closest to the trial, so iterates can
            // slide along an active constraint.
            let back = last_feasible(problem, &start, &y);
            if back > 0.0 {
                consider(lerp(&start, &y, back), &mut best);
            }
        }

        match best {
            Some((y, fy)) => {
                let mut moved = [0.0; N];
                for k in 0..N {
                    moved[k] = y[k] - x[k];
                }
                momentum = unit(moved);
                x = y;
                fx = fy;
                step = (step * 2.0).min(max_step);
            }
            None => {
                momentum = None;
                step *= 0.5;
                if step < tolerance {
                    return LocalOptimum {
                        point: x,
                        value: fx,
                        iterations: iter + 1,
                        converged: true,
                    };
                }
            }
        }
    }
    LocalOptimum {
        point: x,
        value: fx,
        iterations: max_iters,
        converged: false,
    }
}

/// Outcome of a multi-start run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiStart<const N: usize> {
    pub best: LocalOptimum<N>,
    /// Restart that produced `best`.
    pub restart: usize,
    /// Whether any restart met the step tolerance.
    pub converged: bool,
}

/// Runs `settings.restarts` independent ascents. `sample_start` draws a
/// feasible starting point or gives up with `None`. Ties keep the lowest
/// restart index.
pub fn multi_start<const N: usize, P: Problem<N>>(
    problem: &P,
    settings: &OptimizerSettings,
    initial_step: f64,
    tolerance: f64,
    mut sample_start: impl FnMut(&mut ChaCha8Rng) -> Option<[f64; N]>,
) -> Result<MultiStart<N>> {
    settings.validate()?;
    let mut result: Option<MultiStart<N>> = None;
    let mut any_converged = false;
    for restart in 0..settings.restarts {
        let mut rng = settings.rng_for(restart);
        let Some(start) = sample_start(&mut rng) else {
            continue;
        };
        let local = ascend(
            problem,
            start,
            initial_step,
            tolerance,
            settings.max_iters,
            &mut rng,
        );
        any_converged |= local.converged;
        if result.as_ref().is_none_or(|r| local.value > r.best.value) {
            result = Some(MultiStart {
                best: local,
                restart,
                converged: false,
            });
        }
    }
    let mut result = result.ok_or(Error::NoFeasibleStart)?;
    result.converged = any_converged;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maximize x + y inside the unit disk; optimum sqrt(2).
    struct Disk;

    impl Problem<2> for Disk {
        fn value(&self, x: &[f64; 2]) -> f64 {
            x[0] + x[1]
        }
        fn feasible(&self, x: &[f64; 2]) -> bool {
            x[0] * x[0] + x[1] * x[1] < 1.0
        }
    }

    #[test]
    fn finds_boundary_optimum() {
        let settings = OptimizerSettings {
            restarts: 4,
            ..OptimizerSettings::default()
        };
        let r = multi_start(&Disk, &settings, 0.1, 1e-9, |rng| {
            Some([rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)])
        })
        .unwrap();
        assert!(r.converged);
        assert!((r.best.value - 2f64.sqrt()).abs() < 1e-6, "{:?}", r);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let settings = OptimizerSettings {
            restarts: 3,
            ..OptimizerSettings::default()
        };
        let run = || {
            multi_start(&Disk, &settings, 0.1, 1e-6, |rng| {
                Some([rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)])
            })
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn no_start_is_an_error() {
        let r = multi_start(&Disk, &OptimizerSettings::default(), 0.1, 1e-6, |_| None);
        assert_eq!(r.unwrap_err(), Error::NoFeasibleStart);
    }

    #[test]
    fn settings_validation() {
        let bad = OptimizerSettings {
            restarts: 0,
            ..OptimizerSettings::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerSettings {
            step_tolerance: 0.0,
            ..OptimizerSettings::default()
        };
        assert!(bad.validate().is_err());
    }
}
