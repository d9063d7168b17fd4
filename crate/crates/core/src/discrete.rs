//! The grid-discretized finite game.
//!
//! Both players pick positions from a square grid: the verifiers choose an
//! unordered triple of grid points, the malicious node an ordered pair
//! `(U, P)` of distinct points. The verifiers' minmax mixed strategy is
//! the solution of a linear program over the payoff matrix.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float;
use crate::geometry::{distance, Point, Triangle};
use crate::lp::{solve_zero_sum, GameSolution};
use crate::region::{
    count_components, payoff, rasterize_region, BoundingBox, Claim, PlausibilityTest,
    UtilityCriterion,
};
use crate::vm::VerifierConfig;

/// Default cap on payoff-matrix entries before a grid counts as intractable.
pub const DEFAULT_ENTRY_BUDGET: u128 = 100_000_000;

/// Raster step for area/shape entries, relative to the range.
const REGION_RASTER_STEP: f64 = 1.0 / 50.0;

/// A square grid of `points_per_edge²` points with spacing `step`, anchored
/// at `origin` (its lower-left corner).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    side: f64,
    step: f64,
    points_per_edge: usize,
    origin: Point,
}

impl GridSpec {
    /// Grid over a square of the given side, `points_per_edge` per edge;
    /// the step is `side / points_per_edge`.
    pub fn with_points(side: f64, points_per_edge: usize) -> Result<GridSpec> {
        if !side.is_finite() {
            return Err(Error::NonFinite("grid side"));
        }
        if side <= 0.0 {
            return Err(Error::NonPositive("grid side"));
        }
        if points_per_edge < 2 {
            return Err(Error::NonPositive("points per edge beyond one"));
        }
        Ok(GridSpec {
            side,
            step: side / points_per_edge as f64,
            points_per_edge,
            origin: Point::ORIGIN,
        })
    }

    /// Grid with `⌈side/step⌉` points per edge.
    pub fn with_step(side: f64, step: f64) -> Result<GridSpec> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::NonPositive("grid step"));
        }
        let n = float::ceil(side / step - 1e-9);
        let mut grid = GridSpec::with_points(side, n as usize)?;
        grid.step = step;
        Ok(grid)
    }

    pub fn at(self, origin: Point) -> GridSpec {
        GridSpec { origin, ..self }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points_per_edge(&self) -> usize {
        self.points_per_edge
    }

    /// `|S_d|`.
    pub fn point_count(&self) -> usize {
        self.points_per_edge * self.points_per_edge
    }

    /// Grid points in row-major order.
    pub fn points(&self) -> Vec<Point> {
        let n = self.points_per_edge;
        (0..n * n)
            .map(|k| {
                let (i, j) = (k % n, k / n);
                self.origin + Point::raw(i as f64 * self.step, j as f64 * self.step)
            })
            .collect()
    }
}

/// Indices into [`GridSpec::points`].
pub type Triple = [usize; 3];
pub type Pair = [usize; 2];

/// Both players' action sets for a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSets {
    pub points: Vec<Point>,
    /// Non-degenerate triples with every pairwise distance within range.
    pub verifier: Vec<Triple>,
    /// Ordered pairs `(U, P)` of distinct points.
    pub adversary: Vec<Pair>,
}

pub fn enumerate_actions(grid: &GridSpec, range: f64) -> Result<ActionSets> {
    if !range.is_finite() || range <= 0.0 {
        return Err(Error::NonPositive("range"));
    }
    let points = grid.points();
    let n = points.len();
    let reach = range * (1.0 + 1e-12);
    let mut verifier = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if distance(points[i], points[j]) > reach {
                continue;
            }
            for k in j + 1..n {
                if distance(points[i], points[k]) > reach || distance(points[j], points[k]) > reach
                {
                    continue;
                }
                if Triangle::new(points[i], points[j], points[k]).is_ok() {
                    verifier.push([i, j, k]);
                }
            }
        }
    }
    let mut adversary = Vec::with_capacity(n * n.saturating_sub(1));
    for u in 0..n {
        for p in 0..n {
            if u != p {
                adversary.push([u, p]);
            }
        }
    }
    Ok(ActionSets {
        points,
        verifier,
        adversary,
    })
}

/// Malicious-node payoffs: one row per adversary action, one column per
/// verifier action. Entries are non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<PayoffMatrix> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGame);
        }
        if entries.len() != rows * cols {
            return Err(Error::EmptyGame);
        }
        for &e in &entries {
            if !e.is_finite() {
                return Err(Error::NonFinite("payoff entry"));
            }
            if e < 0.0 {
                return Err(Error::Negative("payoff entry"));
            }
        }
        Ok(PayoffMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn positive_entries(&self) -> usize {
        self.entries.iter().filter(|&&e| e > 0.0).count()
    }
}

fn config_of(actions: &ActionSets, triple: &Triple, range: f64) -> Result<VerifierConfig> {
    VerifierConfig::new(triple.iter().map(|&i| actions.points[i]).collect(), range)
}

/// Payoff matrix for already-enumerated actions.
pub fn build_matrix_for(
    actions: &ActionSets,
    range: f64,
    criterion: UtilityCriterion,
) -> Result<PayoffMatrix> {
    let (rows, cols) = (actions.adversary.len(), actions.verifier.len());
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyGame);
    }
    let mut entries = alloc::vec![0.0; rows * cols];
    for (c, triple) in actions.verifier.iter().enumerate() {
        let config = config_of(actions, triple, range)?;
        match criterion {
            UtilityCriterion::MaximumDeception => {
                for (r, &[u, p]) in actions.adversary.iter().enumerate() {
                    let claim = Claim::new(actions.points[u], actions.points[p]);
                    entries[r * cols + c] = payoff(&config, &claim, criterion, range);
                }
            }
            UtilityCriterion::DeceptionArea | UtilityCriterion::DeceptionShape => {
                // The region depends on U only; rasterize once per U.
                let bbox = BoundingBox::range_intersection(&config)?;
                let step = (REGION_RASTER_STEP * range)
                    .min(bbox.width())
                    .min(bbox.height());
                let mut cache: Vec<Option<f64>> = alloc::vec![None; actions.points.len()];
                for (r, &[u, p]) in actions.adversary.iter().enumerate() {
                    let test = PlausibilityTest::new(&config, actions.points[u]);
                    if !test.admits(actions.points[p]) {
                        continue;
                    }
                    let value = match cache[u] {
                        Some(v) => v,
                        None => {
                            let raster = rasterize_region(&config, actions.points[u], bbox, step)?;
                            let v = if criterion == UtilityCriterion::DeceptionArea {
                                raster.area()
                            } else {
                                count_components(&raster) as f64
                            };
                            cache[u] = Some(v);
                            v
                        }
                    };
                    entries[r * cols + c] = value;
                }
            }
        }
    }
    PayoffMatrix::new(rows, cols, entries)
}

/// Enumerates the grid's actions and fills the payoff matrix.
pub fn build_matrix(
    grid: &GridSpec,
    range: f64,
    criterion: UtilityCriterion,
) -> Result<(ActionSets, PayoffMatrix)> {
    let actions = enumerate_actions(grid, range)?;
    let matrix = build_matrix_for(&actions, range, criterion)?;
    Ok((actions, matrix))
}

/// The verifiers' minmax strategy and the game value.
#[derive(Debug, Clone, PartialEq)]
pub struct MinmaxResult {
    pub value: f64,
    /// Probability of each verifier action.
    pub verifier_mixed: Vec<f64>,
    /// The malicious node's optimal mixture, from the LP duals.
    pub adversary_mixed: Vec<f64>,
}

impl MinmaxResult {
    /// Verifier actions played with probability above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.verifier_mixed
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > threshold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Minimizes `u` subject to `Σ_i p(i) u_m(j, i) <= u` for every adversary
/// action `j`, `p >= 0`, `Σ p = 1`.
pub fn solve_minmax(matrix: &PayoffMatrix) -> Result<MinmaxResult> {
    let GameSolution {
        value,
        column_strategy,
        row_strategy,
    } = solve_zero_sum(matrix.rows, matrix.cols, &matrix.entries)?;
    Ok(MinmaxResult {
        value,
        verifier_mixed: column_strategy,
        adversary_mixed: row_strategy,
    })
}

/// Action and matrix sizes for a grid, computed before anything is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityReport {
    pub points: u128,
    pub adversary_actions: u128,
    /// Unordered triples before the feasibility filter.
    pub verifier_triples: u128,
    pub matrix_entries: u128,
    pub profiles: u128,
    /// The same counts with positions drawn from `S_d × S_d`
    /// (`|S_d|²(|S_d|²−1)` and `C(|S_d|², 3)`), saturating.
    pub squared_adversary_actions: u128,
    pub squared_verifier_triples: u128,
    pub budget: u128,
    pub within_budget: bool,
}

fn choose3(n: u128) -> u128 {
    if n < 3 {
        return 0;
    }
    n.saturating_mul(n - 1).saturating_mul(n - 2) / 6
}

pub fn complexity_report(grid: &GridSpec, budget: u128) -> ComplexityReport {
    let s = grid.point_count() as u128;
    let adversary = s * s.saturating_sub(1);
    let triples = choose3(s);
    let entries = adversary.saturating_mul(triples);
    let s2 = s.saturating_mul(s);
    ComplexityReport {
        points: s,
        adversary_actions: adversary,
        verifier_triples: triples,
        matrix_entries: entries,
        profiles: entries,
        squared_adversary_actions: s2.saturating_mul(s2.saturating_sub(1)),
        squared_verifier_triples: choose3(s2),
        budget,
        within_budget: entries <= budget,
    }
}
