use std::collections::{HashSet, VecDeque};

use super::{closed_contains2, Corridor};
use crate::geom::Orientation;
use crate::polygon::{CellSet, Point, Segment};

/// A polyline crossing a path corridor from cap to cap with one straight
/// segment per arm. `depth[j]` is the distance of segment `j` from the
/// arm's first edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LongChord {
    pub depth: Vec<i64>,
    pub points: Vec<Point>,
}

impl LongChord {
    pub fn segments(&self) -> Vec<Segment> {
        self.points
            .windows(2)
            .map(|w| Segment::new(w[0], w[1]))
            .collect()
    }

    /// Unit steps along the chord, keyed as in [`ChordSides`] walls.
    fn unit_walls(&self) -> HashSet<(i64, i64, bool)> {
        let mut walls = HashSet::new();
        for s in self.segments() {
            if s.is_horizontal() {
                let (x0, x1) = s.span();
                for x in x0..x1 {
                    walls.insert((x, s.a.y, true));
                }
            } else {
                let (y0, y1) = s.span();
                for y in y0..y1 {
                    walls.insert((s.a.x, y, false));
                }
            }
        }
        walls
    }
}

/// More long chords exist than the cap allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapExceeded {
    pub cap: usize,
}

fn chord_from_depth(c: &Corridor, depth: &[i64]) -> Option<LongChord> {
    let (cap0, cap1) = c.caps()?;
    let offs: Vec<i64> = c
        .arms
        .iter()
        .zip(depth)
        .map(|(arm, &d)| {
            let (f, g) = (arm.first.level(), arm.second.level());
            f + d * (g - f).signum()
        })
        .collect();
    let s = offs.len();
    let at = |j: usize, along: i64| match c.arms[j].orientation {
        Orientation::Horizontal => Point::new(along, offs[j]),
        Orientation::Vertical => Point::new(offs[j], along),
    };
    let mut points = vec![at(0, cap0.level())];
    for j in 0..s - 1 {
        points.push(at(j, offs[j + 1]));
    }
    points.push(at(s - 1, cap1.level()));
    let inside = points.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        let steps = 2 * ((a.x - b.x).abs() + (a.y - b.y).abs());
        let (dx, dy) = ((b.x - a.x).signum(), (b.y - a.y).signum());
        (0..=steps).all(|t| closed_contains2(c, 2 * a.x + t * dx, 2 * a.y + t * dy))
    });
    inside.then(|| LongChord {
        depth: depth.to_vec(),
        points,
    })
}

/// Streams the long chords of a path corridor: first the chord along the
/// second edges, then the one along the first edges, then every other valid
/// depth vector in lexicographic order. After `cap` chords, a final
/// `Err(CapExceeded)` is yielded if any further chord exists.
pub fn enumerate_long_chords(
    corridor: &Corridor,
    cap: usize,
) -> impl Iterator<Item = Result<LongChord, CapExceeded>> + '_ {
    let thick: Vec<i64> = corridor.arms.iter().map(|a| a.thickness()).collect();
    let left: Vec<i64> = thick.clone();
    let right: Vec<i64> = vec![0; thick.len()];
    let specials = [left.clone(), right.clone()];
    let special_iter = specials
        .into_iter()
        .filter_map(move |d| chord_from_depth(corridor, &d));
    let mut odometer = Some(vec![0i64; thick.len()]);
    let rest = std::iter::from_fn(move || {
        while let Some(d) = odometer.take() {
            let mut next = d.clone();
            let mut i = next.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if next[i] < thick[i] {
                    next[i] += 1;
                    for v in next.iter_mut().skip(i + 1) {
                        *v = 0;
                    }
                    odometer = Some(next.clone());
                    break;
                }
            }
            if d == left || d == right {
                continue;
            }
            if let Some(ch) = chord_from_depth(corridor, &d) {
                return Some(ch);
            }
        }
        None
    });
    let mut all = special_iter.chain(rest);
    let mut yielded = 0usize;
    let mut done = false;
    std::iter::from_fn(move || {
        if done || corridor.caps().is_none() {
            return None;
        }
        let next = all.next();
        match next {
            None => {
                done = true;
                None
            }
            Some(ch) if yielded < cap => {
                yielded += 1;
                Some(Ok(ch))
            }
            Some(_) => {
                done = true;
                Some(Err(CapExceeded { cap }))
            }
        }
    })
}

/// Long chords of a corridor together with the cells on the side of each
/// chord that faces the first edges.
#[derive(Debug, Clone)]
pub struct ChordSides {
    pub chords: Vec<LongChord>,
    pub sides: Vec<CellSet>,
    /// False when the cap cut the enumeration short.
    pub complete: bool,
}

impl ChordSides {
    pub fn build(corridor: &Corridor, cap: usize) -> ChordSides {
        let mut chords = Vec::new();
        let mut complete = true;
        for r in enumerate_long_chords(corridor, cap) {
            match r {
                Ok(c) => chords.push(c),
                Err(_) => complete = false,
            }
        }
        let sides = chords.iter().map(|ch| first_side(corridor, ch)).collect();
        ChordSides {
            chords,
            sides,
            complete,
        }
    }
}

/// Flood fill from the stretches of the first edges that the chord does not
/// run along, with the chord acting as a wall.
pub fn first_side(corridor: &Corridor, chord: &LongChord) -> CellSet {
    let cells = corridor.cells();
    let walls = chord.unit_walls();
    let mut side = CellSet::new(corridor.side);
    let mut queue = VecDeque::new();
    for arm in &corridor.arms {
        let e = arm.first;
        let (lo, hi) = e.span();
        for t in lo..hi {
            let (key, a, b) = if e.is_horizontal() {
                ((t, e.a.y, true), (t, e.a.y), (t, e.a.y - 1))
            } else {
                ((e.a.x, t, false), (e.a.x, t), (e.a.x - 1, t))
            };
            if walls.contains(&key) {
                continue;
            }
            for (x, y) in [a, b] {
                if cells.contains(x, y) && !side.contains(x, y) {
                    side.insert(x, y);
                    queue.push_back((x, y));
                }
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        let moves = [
            ((x + 1, y), (x + 1, y, false)),
            ((x - 1, y), (x, y, false)),
            ((x, y + 1), (x, y + 1, true)),
            ((x, y - 1), (x, y, true)),
        ];
        for ((nx, ny), wall) in moves {
            if cells.contains(nx, ny) && !side.contains(nx, ny) && !walls.contains(&wall) {
                side.insert(nx, ny);
                queue.push_back((nx, ny));
            }
        }
    }
    side
}
