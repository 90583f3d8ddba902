//! Synthetic corridors and item layouts for tests and benchmarks.

use rand::Rng;

use super::{CellOwner, Corridor, SkewedPlacement};
use crate::geom::{Item, ItemId, Orientation, Rect};
use crate::polygon::{outline, CellSet, Point, Polygon};

/// Outer and inner boundary of a rectangular ring whose corners are cut by
/// staircases, giving `s = 4 + 2 * steps` pieces. Steps are spread over the
/// four corners round robin; each step is `step` long and the ring is
/// `thickness` thick. The outer rectangle is `[lo, hi]^2`.
pub fn staircase_ring(s: usize, lo: i64, hi: i64, step: i64, thickness: i64) -> (Polygon, Polygon) {
    assert!(s >= 4 && s % 2 == 0, "ring needs an even piece count >= 4");
    let steps = (s - 4) / 2;
    let mut per_corner = [0usize; 4];
    for i in 0..steps {
        per_corner[i % 4] += 1;
    }
    let outer = ring_outline(lo, hi, step, &per_corner);
    let inner = offset_inward(&outer, thickness);
    (outer, inner)
}

/// Counter-clockwise outline starting at the bottom-left corner. A corner
/// with `c` steps is replaced by a staircase cutting `c * step` off both
/// sides.
fn ring_outline(lo: i64, hi: i64, step: i64, per_corner: &[usize; 4]) -> Polygon {
    // corner positions and the two directions leaving them, counter-clockwise:
    // bottom-left, bottom-right, top-right, top-left
    let corners = [(lo, lo), (hi, lo), (hi, hi), (lo, hi)];
    let incoming = [(0, -1), (1, 0), (0, 1), (-1, 0)];
    let outgoing = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut v = Vec::new();
    for k in 0..4 {
        let (cx, cy) = corners[k];
        let c = per_corner[k] as i64;
        if c == 0 {
            v.push(Point::new(cx, cy));
            continue;
        }
        let (ix, iy) = incoming[k];
        let (ox, oy) = outgoing[k];
        // start where the incoming side is cut, then alternate outgoing/incoming steps
        let mut x = cx - ix * c * step;
        let mut y = cy - iy * c * step;
        v.push(Point::new(x, y));
        for _ in 0..c {
            x += ox * step;
            y += oy * step;
            v.push(Point::new(x, y));
            x += ix * step;
            y += iy * step;
            v.push(Point::new(x, y));
        }
    }
    Polygon::new(v)
}

/// Shifts every edge of a counter-clockwise rectilinear polygon to its left
/// by `t` and intersects consecutive shifted lines.
pub fn offset_inward(poly: &Polygon, t: i64) -> Polygon {
    let n = poly.len();
    let shifted: Vec<(bool, i64)> = (0..n)
        .map(|j| {
            let e = poly.edge(j);
            if e.is_horizontal() {
                // moving +x the interior is above
                let dir = (e.b.x - e.a.x).signum();
                (true, e.a.y + dir * t)
            } else {
                let dir = (e.b.y - e.a.y).signum();
                (false, e.a.x - dir * t)
            }
        })
        .collect();
    let v = (0..n)
        .map(|j| {
            let prev = shifted[(j + n - 1) % n];
            let cur = shifted[j];
            match (prev.0, cur.0) {
                (true, false) => Point::new(cur.1, prev.1),
                (false, true) => Point::new(prev.1, cur.1),
                _ => unreachable!("rectilinear edges alternate"),
            }
        })
        .collect();
    Polygon::new(v)
}

/// Places up to `per_piece` items of length `len` and thickness 1 along each
/// arm, inside cells that no other arm's slab covers. Items are laid along
/// the lines of the arm from its first edge inwards, several per line when
/// they fit.
pub fn fill_arms(
    corridor: &Corridor,
    per_piece: usize,
    len: i64,
    first_id: ItemId,
) -> Vec<SkewedPlacement> {
    let mut out = Vec::new();
    let mut id = first_id;
    for (a, arm) in corridor.arms.iter().enumerate() {
        let mut placed = 0;
        for line in arm.lines() {
            let own = |t: i64| {
                let (x, y) = match arm.orientation {
                    Orientation::Horizontal => (t, line),
                    Orientation::Vertical => (line, t),
                };
                corridor.cells().contains(x, y) && corridor.owner_of(x, y) == Ok(CellOwner::Arm(a))
            };
            let (s0, s1) = match arm.orientation {
                Orientation::Horizontal => (arm.slab.x, arm.slab.x2()),
                Orientation::Vertical => (arm.slab.y, arm.slab.y2()),
            };
            let mut t = s0;
            while t + len <= s1 && placed < per_piece {
                if (t..t + len).all(own) {
                    let rect = match arm.orientation {
                        Orientation::Horizontal => Rect::new(t, line, len, 1),
                        Orientation::Vertical => Rect::new(line, t, 1, len),
                    };
                    out.push(SkewedPlacement {
                        id,
                        rect,
                        orientation: arm.orientation,
                        profit: 1,
                    });
                    id += 1;
                    placed += 1;
                    t += len;
                } else {
                    t += 1;
                }
            }
        }
    }
    out
}

/// Shapes produced by [`random_path_corridor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathShape {
    Box,
    L,
    U,
    Z,
}

/// A random thin path corridor with up to three arms inside `[0, side]^2`,
/// built as a union of arm rectangles and then mirrored or transposed at
/// random.
pub fn random_path_corridor<R: Rng>(rng: &mut R, side: i64, max_arms: usize) -> Corridor {
    loop {
        let shape = match rng.gen_range(1..=max_arms.clamp(1, 3)) {
            1 => PathShape::Box,
            2 => PathShape::L,
            _ => {
                if rng.gen_bool(0.5) {
                    PathShape::U
                } else {
                    PathShape::Z
                }
            }
        };
        let rects = shape_rects(rng, shape, side);
        let Some(rects) = rects else { continue };
        let (mx, my, tr) = (rng.gen_bool(0.5), rng.gen_bool(0.5), rng.gen_bool(0.5));
        let mut cells = CellSet::new(side);
        for r in &rects {
            for (x, y) in r.cells() {
                let (mut x, mut y) = (x, y);
                if mx {
                    x = side - 1 - x;
                }
                if my {
                    y = side - 1 - y;
                }
                if tr {
                    std::mem::swap(&mut x, &mut y);
                }
                cells.insert(x, y);
            }
        }
        let Ok(poly) = outline(&cells) else { continue };
        let want = match shape {
            PathShape::Box => 1,
            PathShape::L => 2,
            _ => 3,
        };
        if let Ok(c) = Corridor::from_path_polygon(&poly, side) {
            if c.subcorridor_count() == want && c.area() == cells.len() as i64 {
                return c;
            }
        }
    }
}

/// A random coloring instance for the corridor DP: a path corridor with up
/// to `max_arms` arms in a knapsack of side 6..=`max_side`, up to
/// `max_items` thin items and up to `max_gamma` colors. Items are 1 or 2
/// units thick and colors are drawn uniformly.
pub fn random_dp_instance<R: Rng>(
    rng: &mut R,
    max_side: i64,
    max_arms: usize,
    max_items: usize,
    max_gamma: u32,
) -> (Corridor, Vec<(Item, u32)>, u32) {
    let side = rng.gen_range(6..=max_side.max(6));
    let corridor = random_path_corridor(rng, side, max_arms);
    let gamma = rng.gen_range(1..=max_gamma.max(1));
    let n = rng.gen_range(1..=max_items.max(1));
    let items = (0..n)
        .map(|i| {
            let long = rng.gen_range(2..=side / 2 + 2);
            let thick = if rng.gen_bool(0.8) { 1 } else { 2 };
            let it = if rng.gen_bool(0.5) {
                Item::new(i as ItemId, long, thick, 1)
            } else {
                Item::new(i as ItemId, thick, long, 1)
            };
            (it, rng.gen_range(1..=gamma))
        })
        .collect();
    (corridor, items, gamma)
}

fn shape_rects<R: Rng>(rng: &mut R, shape: PathShape, side: i64) -> Option<Vec<Rect>> {
    let t = rng.gen_range(1..=3i64);
    let t2 = rng.gen_range(1..=3i64);
    let t3 = rng.gen_range(1..=3i64);
    if t2 + t3 + 1 > side || t + 2 > side {
        return None;
    }
    match shape {
        PathShape::Box => {
            let len = rng.gen_range(2..=side);
            let x = rng.gen_range(0..=side - len);
            let y = rng.gen_range(0..=side - t);
            Some(vec![Rect::new(x, y, len, t)])
        }
        PathShape::L => {
            let w = rng.gen_range(t2 + 1..=side);
            let h = rng.gen_range(t + 1..=side);
            Some(vec![Rect::new(0, 0, w, t), Rect::new(0, 0, t2, h)])
        }
        PathShape::U => {
            let w = rng.gen_range(t2 + t3 + 1..=side);
            let h1 = rng.gen_range(t + 1..=side);
            let h2 = rng.gen_range(t + 1..=side);
            Some(vec![
                Rect::new(0, 0, w, t),
                Rect::new(0, 0, t2, h1),
                Rect::new(w - t3, 0, t3, h2),
            ])
        }
        PathShape::Z => {
            // left arm rises to the middle arm, right arm rises from its far end
            let h1 = rng.gen_range(t + 1..=side - 1);
            let w = rng.gen_range(t2 + t3 + 1..=side);
            let top = h1 + rng.gen_range(1..=side - h1);
            if top > side {
                return None;
            }
            Some(vec![
                Rect::new(0, 0, t2, h1),
                Rect::new(0, h1 - t, w, t),
                Rect::new(w - t3, h1 - t, t3, top - (h1 - t)),
            ])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corridor::{nice_partition, CorridorKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rings_have_requested_piece_counts() {
        for s in [4, 6, 8, 10, 12, 14, 16] {
            let (outer, inner) = staircase_ring(s, 8, 248, 40, 2);
            assert_eq!(outer.len(), s);
            assert!(outer.signed_area2() > 0);
            let c = Corridor::from_cycle(&outer, &inner, 256).unwrap();
            assert_eq!(c.kind, CorridorKind::Cycle);
            assert_eq!(c.subcorridor_count(), s);
            let items = fill_arms(&c, 2, 33, 0);
            assert_eq!(items.len(), 2 * s);
            let pieces = nice_partition(&c, &items).unwrap();
            assert_eq!(pieces.iter().map(|p| p.area()).sum::<i64>(), c.area());
        }
    }

    #[test]
    fn random_paths_are_corridors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c = random_path_corridor(&mut rng, 12, 3);
            assert!(c.subcorridor_count() <= 3);
            assert!(nice_partition(&c, &[]).is_ok());
        }
    }
}
