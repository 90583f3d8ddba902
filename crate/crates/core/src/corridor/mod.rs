//! Rectilinear corridors.
//!
//! A path corridor is a polygon with edges `e_0 .. e_{2k-1}`; for `j` in
//! `1..k` the edges `e_j` and `e_{2k-j}` are parallel and bound arm `j`, while
//! `e_0` and `e_k` are the two caps. A cycle corridor is an outer polygon with
//! a nested inner polygon of the same edge count, arm `i` being bounded by the
//! `i`-th edge of each.
//!
//! Each arm owns a slab: the rectangle spanned by the union of its two edges'
//! projections and the gap between their lines. Corridor cells covered by a
//! single slab belong to that arm; cells covered by two consecutive slabs form
//! the bend between them.

mod check;
mod chords;
mod partition;
mod shape;
mod split;
pub mod synth;

pub use check::{check_corridor, Clause, ClauseViolation, CorridorInput};
pub use chords::{enumerate_long_chords, CapExceeded, ChordSides, LongChord};
pub use partition::{nice_partition, PartitionError, SkewedPlacement, Subcorridor};
pub use shape::{classify_shape, is_acute, ShapeClass};
pub use split::{split_into_lu, DeletionPlan, SplitError, SplitMode, SplitOutcome};

use thiserror::Error;

use crate::geom::{Orientation, Rect};
use crate::polygon::{inside2, rasterize, CellSet, Point, Polygon, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorridorKind {
    Path,
    Cycle,
}

/// A perpendicular segment joining the two edges of an arm, at doubled
/// coordinate `at2` along the arm and spanning the gap between the lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Witness {
    pub at2: i64,
    pub from: i64,
    pub to: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arm {
    /// Direction of the two defining edges.
    pub orientation: Orientation,
    /// `e_j` for paths, the outer edge for cycles.
    pub first: Segment,
    /// `e_{2k-j}` for paths, the inner edge for cycles.
    pub second: Segment,
    pub slab: Rect,
    pub witness: Witness,
}

impl Arm {
    pub fn thickness(&self) -> i64 {
        (self.first.level() - self.second.level()).abs()
    }

    /// Cell rows (horizontal arm) or columns (vertical arm) of the slab.
    pub fn lines(&self) -> std::ops::Range<i64> {
        let (a, b) = (self.first.level(), self.second.level());
        a.min(b)..a.max(b)
    }

    pub fn edge_projections(&self) -> ((i64, i64), (i64, i64)) {
        (self.first.span(), self.second.span())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorridorError {
    #[error("polygon is not rectilinear")]
    NotRectilinear,
    #[error("polygon leaves the knapsack [0,{0}]^2")]
    OutsideKnapsack(i64),
    #[error("no labelling pairs the edges into arms")]
    NoLabelling,
    #[error("cell ({0},{1}) is covered by no arm slab")]
    UncoveredCell(i64, i64),
    #[error("cell ({0},{1}) is covered by non-consecutive arm slabs")]
    TangledCell(i64, i64),
    #[error("inner and outer polygons differ in edge count")]
    EdgeCountMismatch,
    #[error("cycle corridor needs an even number of arms, at least 4; got {0}")]
    BadCycleParity(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corridor {
    pub kind: CorridorKind,
    pub outer: Polygon,
    pub inner: Option<Polygon>,
    pub side: i64,
    pub arms: Vec<Arm>,
    cells: CellSet,
}

/// Where a corridor cell belongs before any cut is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellOwner {
    Arm(usize),
    /// Bend between arm `a` and the next arm (cyclically for cycles).
    Bend(usize),
}

impl Corridor {
    /// A box corridor: one arm along the longer side of `r`.
    pub fn from_rect(r: &Rect, side: i64) -> Result<Corridor, CorridorError> {
        Corridor::from_path_polygon(&Polygon::from_rect(r), side)
    }

    /// Builds a path corridor from a polygon, trying every cyclic start and
    /// keeping the labelling with the thinnest arms. Thinness and length
    /// bounds are not enforced here; see [`check_corridor`].
    pub fn from_path_polygon(poly: &Polygon, side: i64) -> Result<Corridor, CorridorError> {
        if !poly.is_rectilinear() {
            return Err(CorridorError::NotRectilinear);
        }
        check_bounds(poly, side)?;
        let n = poly.len();
        let mut best: Option<(i64, i64, usize, Vec<Arm>)> = None;
        for start in 0..n {
            let p = poly.rotated(start);
            if let Ok(arms) = path_arms(&p) {
                let max_t = arms.iter().map(Arm::thickness).max().unwrap_or(0);
                let sum_t: i64 = arms.iter().map(Arm::thickness).sum();
                if best
                    .as_ref()
                    .is_none_or(|(m, s, _, _)| (max_t, sum_t) < (*m, *s))
                {
                    best = Some((max_t, sum_t, start, arms));
                }
            }
        }
        let (_, _, start, arms) = best.ok_or(CorridorError::NoLabelling)?;
        Corridor::assemble(CorridorKind::Path, poly.rotated(start), None, side, arms)
    }

    /// Path corridor with the labelling exactly as given.
    pub fn from_labelled_path(poly: &Polygon, side: i64) -> Result<Corridor, CorridorError> {
        if !poly.is_rectilinear() {
            return Err(CorridorError::NotRectilinear);
        }
        check_bounds(poly, side)?;
        let arms = path_arms(poly).map_err(|_| CorridorError::NoLabelling)?;
        Corridor::assemble(CorridorKind::Path, poly.clone(), None, side, arms)
    }

    /// Cycle corridor; the inner polygon's vertex order is aligned to the
    /// outer one automatically.
    pub fn from_cycle(
        outer: &Polygon,
        inner: &Polygon,
        side: i64,
    ) -> Result<Corridor, CorridorError> {
        if !outer.is_rectilinear() || !inner.is_rectilinear() {
            return Err(CorridorError::NotRectilinear);
        }
        if outer.len() != inner.len() {
            return Err(CorridorError::EdgeCountMismatch);
        }
        check_bounds(outer, side)?;
        let s = outer.len();
        if s < 4 || s % 2 == 1 {
            return Err(CorridorError::BadCycleParity(s));
        }
        let candidates = [inner.clone(), inner.reversed()];
        for cand in &candidates {
            for start in 0..s {
                let inn = cand.rotated(start);
                if let Ok(arms) = cycle_arms(outer, &inn) {
                    return Corridor::assemble(
                        CorridorKind::Cycle,
                        outer.clone(),
                        Some(inn),
                        side,
                        arms,
                    );
                }
            }
        }
        Err(CorridorError::NoLabelling)
    }

    fn assemble(
        kind: CorridorKind,
        outer: Polygon,
        inner: Option<Polygon>,
        side: i64,
        arms: Vec<Arm>,
    ) -> Result<Corridor, CorridorError> {
        let cells = match &inner {
            Some(inn) => rasterize(&[&outer, inn], side),
            None => rasterize(&[&outer], side),
        };
        let c = Corridor {
            kind,
            outer,
            inner,
            side,
            arms,
            cells,
        };
        for (x, y) in c.cells.iter() {
            c.owner_of(x, y)?;
        }
        Ok(c)
    }

    pub fn cells(&self) -> &CellSet {
        &self.cells
    }

    pub fn area(&self) -> i64 {
        self.cells.len() as i64
    }

    /// Number of arms, written `s(C)`.
    pub fn subcorridor_count(&self) -> usize {
        self.arms.len()
    }

    pub fn is_cycle(&self) -> bool {
        self.kind == CorridorKind::Cycle
    }

    /// Index of the arm following `a`, if any.
    pub fn next_arm(&self, a: usize) -> Option<usize> {
        let s = self.arms.len();
        if a + 1 < s {
            Some(a + 1)
        } else if self.is_cycle() {
            Some(0)
        } else {
            None
        }
    }

    pub fn owner_of(&self, x: i64, y: i64) -> Result<CellOwner, CorridorError> {
        let hits: Vec<usize> = (0..self.arms.len())
            .filter(|&a| self.arms[a].slab.contains_cell(x, y))
            .collect();
        match hits.as_slice() {
            [a] => Ok(CellOwner::Arm(*a)),
            [a, b] => {
                if self.next_arm(*a) == Some(*b) {
                    Ok(CellOwner::Bend(*a))
                } else if self.next_arm(*b) == Some(*a) {
                    Ok(CellOwner::Bend(*b))
                } else {
                    Err(CorridorError::TangledCell(x, y))
                }
            }
            [] => Err(CorridorError::UncoveredCell(x, y)),
            _ => Err(CorridorError::TangledCell(x, y)),
        }
    }

    /// Corridor cells inside the bend after arm `a`.
    pub fn bend_cells(&self, a: usize) -> CellSet {
        let mut out = CellSet::new(self.side);
        if let Some(b) = self.next_arm(a) {
            if let Some(q) = self.arms[a].slab.intersection(&self.arms[b].slab) {
                for (x, y) in q.cells() {
                    if self.cells.contains(x, y) {
                        out.insert(x, y);
                    }
                }
            }
        }
        out
    }

    /// Path caps `e_0` and `e_k`.
    pub fn caps(&self) -> Option<(Segment, Segment)> {
        match self.kind {
            CorridorKind::Path => {
                let k = self.outer.len() / 2;
                Some((self.outer.edge(0), self.outer.edge(k)))
            }
            CorridorKind::Cycle => None,
        }
    }

    /// One polygon per line, `x,y` pairs separated by spaces; a cycle's
    /// inner polygon follows on its own line prefixed with `hole`.
    pub fn dump(&self) -> String {
        let fmt = |p: &Polygon| {
            p.vertices
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = format!("poly {}\n", fmt(&self.outer));
        if let Some(inner) = &self.inner {
            s.push_str(&format!("hole {}\n", fmt(inner)));
        }
        s
    }
}

fn check_bounds(poly: &Polygon, side: i64) -> Result<(), CorridorError> {
    if poly
        .vertices
        .iter()
        .any(|p| p.x < 0 || p.y < 0 || p.x > side || p.y > side)
    {
        return Err(CorridorError::OutsideKnapsack(side));
    }
    Ok(())
}

/// Why a single edge pair fails to form an arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PairFault {
    NotParallel,
    NoOverlap,
    NoWitness,
}

pub(crate) fn path_arms(poly: &Polygon) -> Result<Vec<Arm>, (usize, PairFault)> {
    let n = poly.len();
    let k = n / 2;
    let edges: Vec<Segment> = poly.edges().collect();
    let mut arms = Vec::with_capacity(k - 1);
    for j in 1..k {
        let others: Vec<Segment> = (0..n)
            .filter(|&i| i != j && i != n - j)
            .map(|i| edges[i])
            .collect();
        let arm = make_arm(edges[j], edges[n - j], &others).map_err(|f| (j, f))?;
        arms.push(arm);
    }
    Ok(arms)
}

pub(crate) fn cycle_arms(outer: &Polygon, inner: &Polygon) -> Result<Vec<Arm>, (usize, PairFault)> {
    let oe: Vec<Segment> = outer.edges().collect();
    let ie: Vec<Segment> = inner.edges().collect();
    let mut arms = Vec::with_capacity(oe.len());
    for i in 0..oe.len() {
        let others: Vec<Segment> = oe
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, e)| *e)
            .chain(
                ie.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, e)| *e),
            )
            .collect();
        arms.push(make_arm(oe[i], ie[i], &others).map_err(|f| (i, f))?);
    }
    Ok(arms)
}

pub(crate) fn make_arm(
    first: Segment,
    second: Segment,
    others: &[Segment],
) -> Result<Arm, PairFault> {
    if first.is_horizontal() != second.is_horizontal() || first.level() == second.level() {
        return Err(PairFault::NotParallel);
    }
    let (a0, a1) = first.span();
    let (b0, b1) = second.span();
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    if lo >= hi {
        return Err(PairFault::NoOverlap);
    }
    let horizontal = first.is_horizontal();
    let (l1, l2) = (first.level(), second.level());
    // integral positions first, then half-integral ones
    let positions = ((lo + 1)..hi)
        .map(|c| 2 * c)
        .chain((lo..hi).map(|c| 2 * c + 1));
    for at2 in positions {
        let hit = others
            .iter()
            .any(|e| witness_meets(horizontal, at2, l1, l2, e));
        if !hit {
            let orientation = if horizontal {
                Orientation::Horizontal
            } else {
                Orientation::Vertical
            };
            let (s0, s1) = (a0.min(b0), a1.max(b1));
            let (t0, t1) = (l1.min(l2), l1.max(l2));
            let slab = if horizontal {
                Rect::new(s0, t0, s1 - s0, t1 - t0)
            } else {
                Rect::new(t0, s0, t1 - t0, s1 - s0)
            };
            return Ok(Arm {
                orientation,
                first,
                second,
                slab,
                witness: Witness {
                    at2,
                    from: l1,
                    to: l2,
                },
            });
        }
    }
    Err(PairFault::NoWitness)
}

/// Does the witness perpendicular to an arm (horizontal arm: a vertical
/// witness at doubled x = `at2`) touch edge `e`?
fn witness_meets(arm_horizontal: bool, at2: i64, l1: i64, l2: i64, e: &Segment) -> bool {
    let (w0, w1) = (2 * l1.min(l2), 2 * l1.max(l2));
    // swap axes so the witness is vertical
    let (ea, eb) = if arm_horizontal {
        (e.a, e.b)
    } else {
        (Point::new(e.a.y, e.a.x), Point::new(e.b.y, e.b.x))
    };
    let (x0, x1) = (2 * ea.x.min(eb.x), 2 * ea.x.max(eb.x));
    let (y0, y1) = (2 * ea.y.min(eb.y), 2 * ea.y.max(eb.y));
    x0 <= at2 && at2 <= x1 && y0 <= w1 && w0 <= y1
}

/// Is the doubled-coordinate point inside the closed corridor region?
pub(crate) fn closed_contains2(c: &Corridor, px2: i64, py2: i64) -> bool {
    if c.outer.on_boundary2(px2, py2) {
        return true;
    }
    if let Some(inner) = &c.inner {
        if inner.on_boundary2(px2, py2) {
            return true;
        }
        return inside2(&[&c.outer, inner], px2, py2);
    }
    inside2(&[&c.outer], px2, py2)
}
