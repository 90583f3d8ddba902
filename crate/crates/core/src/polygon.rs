//! Rectilinear polygons on the integer grid and sets of unit cells.
//!
//! A cell `(x, y)` is the unit square `[x, x+1) x [y, y+1)`. Point-in-polygon
//! tests use doubled coordinates so that cell centres stay integral.

use std::collections::HashMap;
use std::fmt;

use crate::geom::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Point {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// Axis-parallel segment between two grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Segment {
        Segment { a, b }
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.y == self.b.y
    }

    pub fn is_vertical(&self) -> bool {
        self.a.x == self.b.x
    }

    pub fn len(&self) -> i64 {
        (self.a.x - self.b.x).abs() + (self.a.y - self.b.y).abs()
    }

    pub fn is_empty(&self) -> bool {
        self.a == self.b
    }

    /// The fixed coordinate: y for horizontal segments, x for vertical ones.
    pub fn level(&self) -> i64 {
        if self.is_horizontal() {
            self.a.y
        } else {
            self.a.x
        }
    }

    /// Extent along the segment's own direction, as `(lo, hi)`.
    pub fn span(&self) -> (i64, i64) {
        if self.is_horizontal() {
            (self.a.x.min(self.b.x), self.a.x.max(self.b.x))
        } else {
            (self.a.y.min(self.b.y), self.a.y.max(self.b.y))
        }
    }

    /// Doubled-coordinate containment, endpoints included.
    pub fn contains2(&self, px2: i64, py2: i64) -> bool {
        let (x0, x1) = (2 * self.a.x.min(self.b.x), 2 * self.a.x.max(self.b.x));
        let (y0, y1) = (2 * self.a.y.min(self.b.y), 2 * self.a.y.max(self.b.y));
        px2 >= x0 && px2 <= x1 && py2 >= y0 && py2 <= y1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Polygon {
        Polygon { vertices }
    }

    pub fn from_rect(r: &Rect) -> Polygon {
        Polygon::new(vec![
            Point::new(r.x, r.y),
            Point::new(r.x2(), r.y),
            Point::new(r.x2(), r.y2()),
            Point::new(r.x, r.y2()),
        ])
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `j` runs from vertex `j` to vertex `j + 1`.
    pub fn edge(&self, j: usize) -> Segment {
        let n = self.vertices.len();
        Segment::new(self.vertices[j % n], self.vertices[(j + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.vertices.len()).map(move |j| self.edge(j))
    }

    /// Twice the signed area; positive for counter-clockwise order.
    pub fn signed_area2(&self) -> i64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
                p.x * q.y - q.x * p.y
            })
            .sum()
    }

    pub fn area(&self) -> i64 {
        self.signed_area2().abs() / 2
    }

    /// Every edge axis-parallel, non-degenerate, and consecutive edges turn.
    pub fn is_rectilinear(&self) -> bool {
        let n = self.vertices.len();
        if n < 4 || n % 2 == 1 {
            return false;
        }
        (0..n).all(|j| {
            let e = self.edge(j);
            let f = self.edge(j + 1);
            !e.is_empty()
                && (e.is_horizontal() != e.is_vertical())
                && e.is_horizontal() != f.is_horizontal()
        })
    }

    pub fn bbox(&self) -> Rect {
        let x0 = self.vertices.iter().map(|p| p.x).min().unwrap_or(0);
        let x1 = self.vertices.iter().map(|p| p.x).max().unwrap_or(0);
        let y0 = self.vertices.iter().map(|p| p.y).min().unwrap_or(0);
        let y1 = self.vertices.iter().map(|p| p.y).max().unwrap_or(0);
        Rect::new(x0, y0, x1 - x0, y1 - y0)
    }

    /// Rotates the vertex list so that vertex `start` comes first.
    pub fn rotated(&self, start: usize) -> Polygon {
        let n = self.vertices.len();
        Polygon::new((0..n).map(|i| self.vertices[(start + i) % n]).collect())
    }

    pub fn reversed(&self) -> Polygon {
        let mut v = self.vertices.clone();
        v.reverse();
        Polygon::new(v)
    }

    pub fn on_boundary2(&self, px2: i64, py2: i64) -> bool {
        self.edges().any(|e| e.contains2(px2, py2))
    }
}

/// Even-odd containment of a doubled-coordinate point that lies on no edge.
pub fn inside2(polys: &[&Polygon], px2: i64, py2: i64) -> bool {
    let mut inside = false;
    for poly in polys {
        for e in poly.edges() {
            if !e.is_vertical() {
                continue;
            }
            let x2 = 2 * e.a.x;
            let (y0, y1) = (2 * e.a.y.min(e.b.y), 2 * e.a.y.max(e.b.y));
            if x2 > px2 && py2 >= y0 && py2 < y1 {
                inside = !inside;
            }
        }
    }
    inside
}

/// A set of unit cells inside `[0, side)^2`, stored as a bitmap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellSet {
    side: i64,
    words: Vec<u64>,
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellSet({} cells)", self.len())
    }
}

impl CellSet {
    pub fn new(side: i64) -> CellSet {
        let bits = (side.max(0) * side.max(0)) as usize;
        CellSet {
            side,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn from_rect(side: i64, r: &Rect) -> CellSet {
        let mut s = CellSet::new(side);
        for (x, y) in r.cells() {
            s.insert(x, y);
        }
        s
    }

    pub fn side(&self) -> i64 {
        self.side
    }

    fn index(&self, x: i64, y: i64) -> Option<usize> {
        (x >= 0 && y >= 0 && x < self.side && y < self.side).then(|| (y * self.side + x) as usize)
    }

    pub fn insert(&mut self, x: i64, y: i64) {
        let i = self.index(x, y).expect("cell outside the grid");
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, x: i64, y: i64) {
        if let Some(i) = self.index(x, y) {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        match self.index(x, y) {
            Some(i) => self.words[i / 64] >> (i % 64) & 1 == 1,
            None => false,
        }
    }

    pub fn contains_rect(&self, r: &Rect) -> bool {
        r.cells().all(|(x, y)| self.contains(x, y))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let side = self.side;
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| {
                let i = (wi * 64 + b) as i64;
                (i % side, i / side)
            })
        })
    }

    pub fn union_with(&mut self, other: &CellSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &CellSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &CellSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        let mut s = self.clone();
        s.subtract(other);
        s
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn bbox(&self) -> Option<Rect> {
        let mut it = self.iter();
        let (fx, fy) = it.next()?;
        let (mut x0, mut x1, mut y0, mut y1) = (fx, fx, fy, fy);
        for (x, y) in it {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        Some(Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
    }
}

/// Cells whose centres lie inside the region bounded by `polys` (even-odd,
/// so a cycle corridor passes its outer and inner boundary together).
pub fn rasterize(polys: &[&Polygon], side: i64) -> CellSet {
    let mut cells = CellSet::new(side);
    for y in 0..side {
        let cy2 = 2 * y + 1;
        let mut xs: Vec<i64> = polys
            .iter()
            .flat_map(|p| p.edges())
            .filter(|e| e.is_vertical())
            .filter(|e| {
                let (y0, y1) = (2 * e.a.y.min(e.b.y), 2 * e.a.y.max(e.b.y));
                cy2 > y0 && cy2 < y1
            })
            .map(|e| e.a.x)
            .collect();
        xs.sort_unstable();
        for pair in xs.chunks(2) {
            if let [a, b] = pair {
                for x in (*a).max(0)..(*b).min(side) {
                    cells.insert(x, y);
                }
            }
        }
    }
    cells
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OutlineError {
    #[error("cell set is empty")]
    Empty,
    #[error("cell set is not a single simply connected region")]
    NotSimple,
}

/// Traces the boundary of a 4-connected, hole-free cell set into a
/// counter-clockwise rectilinear polygon with collinear vertices merged.
pub fn outline(cells: &CellSet) -> Result<Polygon, OutlineError> {
    if cells.is_empty() {
        return Err(OutlineError::Empty);
    }
    let mut next: HashMap<Point, Vec<Point>> = HashMap::new();
    let mut edge_count = 0usize;
    for (x, y) in cells.iter() {
        let mut add = |a: Point, b: Point| {
            next.entry(a).or_default().push(b);
            edge_count += 1;
        };
        if !cells.contains(x, y - 1) {
            add(Point::new(x, y), Point::new(x + 1, y));
        }
        if !cells.contains(x + 1, y) {
            add(Point::new(x + 1, y), Point::new(x + 1, y + 1));
        }
        if !cells.contains(x, y + 1) {
            add(Point::new(x + 1, y + 1), Point::new(x, y + 1));
        }
        if !cells.contains(x - 1, y) {
            add(Point::new(x, y + 1), Point::new(x, y));
        }
    }
    if next.values().any(|v| v.len() != 1) {
        return Err(OutlineError::NotSimple);
    }
    let start = *next.keys().min().unwrap();
    let mut path = vec![start];
    let mut cur = next[&start][0];
    while cur != start {
        path.push(cur);
        cur = next[&cur][0];
        if path.len() > edge_count {
            return Err(OutlineError::NotSimple);
        }
    }
    if path.len() != edge_count {
        return Err(OutlineError::NotSimple);
    }
    let n = path.len();
    let corners: Vec<Point> = (0..n)
        .filter(|&i| {
            let (p, q, r) = (path[(i + n - 1) % n], path[i], path[(i + 1) % n]);
            (q.x - p.x) * (r.y - q.y) != (q.y - p.y) * (r.x - q.x)
        })
        .map(|i| path[i])
        .collect();
    Ok(Polygon::new(corners))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_shape() -> Polygon {
        Polygon::new(vec![
            Point::new(0, 0),
            Point::new(6, 0),
            Point::new(6, 2),
            Point::new(2, 2),
            Point::new(2, 5),
            Point::new(0, 5),
        ])
    }

    #[test]
    fn l_shape_raster_matches_area() {
        let p = l_shape();
        assert!(p.is_rectilinear());
        assert_eq!(p.area(), 12 + 6);
        let cells = rasterize(&[&p], 8);
        assert_eq!(cells.len() as i64, p.area());
        assert!(cells.contains(5, 1));
        assert!(!cells.contains(3, 3));
    }

    #[test]
    fn outline_round_trip() {
        let p = l_shape();
        let cells = rasterize(&[&p], 8);
        let q = outline(&cells).unwrap();
        assert_eq!(q.area(), p.area());
        assert!(q.signed_area2() > 0);
        assert_eq!(q.len(), 6);
        assert_eq!(rasterize(&[&q], 8), cells);
    }

    #[test]
    fn ring_raster() {
        let outer = Polygon::from_rect(&Rect::new(0, 0, 6, 6));
        let inner = Polygon::from_rect(&Rect::new(1, 1, 4, 4));
        let cells = rasterize(&[&outer, &inner], 6);
        assert_eq!(cells.len(), 36 - 16);
        assert!(outline(&cells).is_err());
    }

    #[test]
    fn cell_set_ops() {
        let a = CellSet::from_rect(5, &Rect::new(0, 0, 3, 3));
        let b = CellSet::from_rect(5, &Rect::new(2, 2, 3, 3));
        assert_eq!(a.intersection(&b).len(), 1);
        assert_eq!(a.union(&b).len(), 17);
        assert!(a.intersection(&b).is_subset(&a));
        assert_eq!(a.bbox(), Some(Rect::new(0, 0, 3, 3)));
    }
}
