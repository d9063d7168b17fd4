//! The attacker's side of the model: which fake positions a node can claim
//! without being caught, and what each claim is worth.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float;
use crate::geometry::{distance, distance_squared, Point, Triangle};
use crate::vm::VerifierConfig;

/// A malicious action: the node really sits at `true_position` and
/// pretends to be at `fake_position`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Claim {
    pub true_position: Point,
    pub fake_position: Point,
}

impl Claim {
    pub fn new(true_position: Point, fake_position: Point) -> Claim {
        Claim {
            true_position,
            fake_position,
        }
    }

    /// Distance between the true and the pretended position.
    pub fn deception(&self) -> f64 {
        distance(self.true_position, self.fake_position)
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Claim {
        Claim::new(f(self.true_position), f(self.fake_position))
    }
}

/// How the players value an Unknown verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum UtilityCriterion {
    /// Distance between the true and the fake position.
    #[default]
    MaximumDeception,
    /// Area of the plausible falsification region.
    DeceptionArea,
    /// Number of 4-connected components of that region.
    DeceptionShape,
}

/// Axis-aligned rectangle with positive width and height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    min: Point,
    max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Result<BoundingBox> {
        if !(max.x() > min.x() && max.y() > min.y()) {
            return Err(Error::EmptyBoundingBox);
        }
        Ok(BoundingBox { min, max })
    }

    /// The box containing the intersection of every verifier's range disk.
    /// Every plausible fake position lies inside it.
    pub fn range_intersection(config: &VerifierConfig) -> Result<BoundingBox> {
        let r = config.range();
        let (mut lo_x, mut lo_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (mut hi_x, mut hi_y) = (f64::INFINITY, f64::INFINITY);
        for v in config.verifiers() {
            lo_x = lo_x.max(v.x() - r);
            lo_y = lo_y.max(v.y() - r);
            hi_x = hi_x.min(v.x() + r);
            hi_y = hi_y.min(v.y() + r);
        }
        BoundingBox::new(Point::raw(lo_x, lo_y), Point::raw(hi_x, hi_y))
    }

    pub fn min(&self) -> Point {
        self.min
    }

    pub fn max(&self) -> Point {
        self.max
    }

    pub fn width(&self) -> f64 {
        self.max.x() - self.min.x()
    }

    pub fn height(&self) -> f64 {
        self.max.y() - self.min.y()
    }
}

/// Plausibility checks for a fixed configuration and true position, with
/// the per-verifier quantities precomputed.
#[derive(Debug, Clone)]
pub struct PlausibilityTest<'a> {
    verifiers: &'a [Point],
    true_sq: Vec<f64>,
    range_sq: f64,
    triangles: Vec<Triangle>,
    reachable: bool,
}

impl<'a> PlausibilityTest<'a> {
    pub fn new(config: &'a VerifierConfig, true_position: Point) -> PlausibilityTest<'a> {
        let range_sq = config.range() * config.range();
        let true_sq: Vec<f64> = config
            .verifiers()
            .iter()
            .map(|&v| distance_squared(v, true_position))
            .collect();
        let reachable = true_sq.iter().all(|&d| d < range_sq);
        PlausibilityTest {
            verifiers: config.verifiers(),
            true_sq,
            range_sq,
            triangles: config.triangles(),
            reachable,
        }
    }

    /// Whether the true position can answer every verifier at all.
    pub fn reachable(&self) -> bool {
        self.reachable
    }

    /// Whether `fake` is a plausible falsification of the true position.
    pub fn admits(&self, fake: Point) -> bool {
        if !self.reachable {
            return false;
        }
        let bounds_ok = self.verifiers.iter().zip(&self.true_sq).all(|(&v, &du)| {
            let dp = distance_squared(v, fake);
            dp < self.range_sq && dp > du
        });
        bounds_ok && !self.triangles.iter().any(|t| t.contains(fake))
    }
}

/// Plausibility of arbitrary claims against one configuration.
#[derive(Debug, Clone)]
pub struct ClaimChecker<'a> {
    verifiers: &'a [Point],
    range_sq: f64,
    triangles: Vec<Triangle>,
}

impl<'a> ClaimChecker<'a> {
    pub fn new(config: &'a VerifierConfig) -> ClaimChecker<'a> {
        ClaimChecker {
            verifiers: config.verifiers(),
            range_sq: config.range() * config.range(),
            triangles: config.triangles(),
        }
    }

    pub fn admits(&self, claim: &Claim) -> bool {
        let (u, p) = (claim.true_position, claim.fake_position);
        self.verifiers.iter().all(|&v| {
            let du = distance_squared(v, u);
            let dp = distance_squared(v, p);
            du < self.range_sq && dp < self.range_sq && dp > du
        }) && !self.triangles.iter().any(|t| t.contains(p))
    }
}

/// Whether the claim survives VM as Unknown: every forged bound is a strict
/// enlargement that stays within range, the true position is reachable by
/// every verifier, and the fake position lies outside every verification
/// triangle.
pub fn is_plausible(config: &VerifierConfig, claim: &Claim) -> bool {
    ClaimChecker::new(config).admits(claim)
}

/// Default raster step for region-valued payoffs, relative to the range.
pub const DEFAULT_RASTER_STEP: f64 = 1.0 / 200.0;

/// Malicious-node utility of `claim`. Implausible claims are worth zero
/// under every criterion; the verifiers receive the negation.
pub fn payoff(
    config: &VerifierConfig,
    claim: &Claim,
    criterion: UtilityCriterion,
    raster_step: f64,
) -> f64 {
    let test = PlausibilityTest::new(config, claim.true_position);
    if !test.admits(claim.fake_position) {
        return 0.0;
    }
    match criterion {
        UtilityCriterion::MaximumDeception => claim.deception(),
        UtilityCriterion::DeceptionArea | UtilityCriterion::DeceptionShape => {
            let raster = BoundingBox::range_intersection(config).and_then(|bbox| {
                let step = raster_step.min(bbox.width()).min(bbox.height());
                rasterize_with(&test, bbox, step)
            });
            match (criterion, raster) {
                (UtilityCriterion::DeceptionArea, Ok(r)) => r.area(),
                (_, Ok(r)) => count_components(&r) as f64,
                (_, Err(_)) => 0.0,
            }
        }
    }
}

/// Verifier utility under the zero-sum assumption.
pub fn verifier_payoff(
    config: &VerifierConfig,
    claim: &Claim,
    criterion: UtilityCriterion,
    raster_step: f64,
) -> f64 {
    -payoff(config, claim, criterion, raster_step)
}

/// Cell-centre sampling of the plausible falsification region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRaster {
    origin: Point,
    step: f64,
    columns: usize,
    rows: usize,
    cells: Vec<bool>,
}

impl RegionRaster {
    pub fn new(
        origin: Point,
        step: f64,
        columns: usize,
        rows: usize,
        cells: Vec<bool>,
    ) -> Result<RegionRaster> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::NonPositive("raster step"));
        }
        if cells.len() != columns * rows {
            return Err(Error::EmptyBoundingBox);
        }
        Ok(RegionRaster {
            origin,
            step,
            columns,
            rows,
            cells,
        })
    }

    /// Lower-left corner of the rasterized box.
    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn get(&self, column: usize, row: usize) -> bool {
        self.cells[row * self.columns + column]
    }

    pub fn cell_center(&self, column: usize, row: usize) -> Point {
        self.origin
            + Point::raw(
                (column as f64 + 0.5) * self.step,
                (row as f64 + 0.5) * self.step,
            )
    }

    /// Cells in row-major order (rows bottom to top): centre and flag.
    pub fn iter(&self) -> impl Iterator<Item = (Point, bool)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (0..self.columns).map(move |c| (self.cell_center(c, r), self.get(c, r)))
        })
    }

    pub fn plausible_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.plausible_count() == 0
    }

    /// Cell-counting area estimate.
    pub fn area(&self) -> f64 {
        self.plausible_count() as f64 * self.step * self.step
    }
}

fn rasterize_with(
    test: &PlausibilityTest<'_>,
    bbox: BoundingBox,
    step: f64,
) -> Result<RegionRaster> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::NonPositive("raster step"));
    }
    let extent = bbox.width().min(bbox.height());
    if step > extent {
        return Err(Error::StepExceedsExtent { step, extent });
    }
    let columns = float::ceil(bbox.width() / step - 1e-9) as usize;
    let rows = float::ceil(bbox.height() / step - 1e-9) as usize;
    let mut cells = vec![false; columns * rows];
    if test.reachable() {
        for r in 0..rows {
            let y = bbox.min().y() + (r as f64 + 0.5) * step;
            for c in 0..columns {
                let x = bbox.min().x() + (c as f64 + 0.5) * step;
                cells[r * columns + c] = test.admits(Point::raw(x, y));
            }
        }
    }
    Ok(RegionRaster {
        origin: bbox.min(),
        step,
        columns,
        rows,
        cells,
    })
}

/// Marks each cell of `bbox` whose centre is a plausible fake position for
/// a node truly at `true_position`.
pub fn rasterize_region(
    config: &VerifierConfig,
    true_position: Point,
    bbox: BoundingBox,
    step: f64,
) -> Result<RegionRaster> {
    rasterize_with(&PlausibilityTest::new(config, true_position), bbox, step)
}

/// Number of 4-connected components of plausible cells.
pub fn count_components(raster: &RegionRaster) -> usize {
    let (w, h) = (raster.columns, raster.rows);
    let mut seen = vec![false; w * h];
    let mut stack = Vec::new();
    let mut count = 0;
    for start in 0..w * h {
        if !raster.cells[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (c, r) = (idx % w, idx / w);
            let mut visit = |n: usize| {
                if raster.cells[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if c > 0 {
                visit(idx - 1);
            }
            if c + 1 < w {
                visit(idx + 1);
            }
            if r > 0 {
                visit(idx - w);
            }
            if r + 1 < h {
                visit(idx + w);
            }
        }
    }
    count
}
