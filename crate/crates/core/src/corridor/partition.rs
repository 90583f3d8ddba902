use thiserror::Error;

use super::{CellOwner, Corridor};
use crate::geom::{ItemId, Orientation, Rect};
use crate::polygon::{outline, CellSet, OutlineError, Polygon};

/// A placed skewed item with its orientation label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewedPlacement {
    pub id: ItemId,
    pub rect: Rect,
    pub orientation: Orientation,
    pub profit: u64,
}

/// One piece of a nice partition: the arm it grew from plus its share of the
/// neighbouring bends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subcorridor {
    pub arm: usize,
    pub orientation: Orientation,
    pub cells: CellSet,
}

impl Subcorridor {
    pub fn area(&self) -> i64 {
        self.cells.len() as i64
    }

    /// Extent `[lo, hi)` of the piece along its arm on one row (horizontal
    /// piece) or column (vertical piece).
    pub fn line_interval(&self, line: i64) -> Option<(i64, i64)> {
        let side = self.cells.side();
        let at = |t: i64| match self.orientation {
            Orientation::Horizontal => self.cells.contains(t, line),
            Orientation::Vertical => self.cells.contains(line, t),
        };
        let lo = (0..side).find(|&t| at(t))?;
        let hi = (lo..side).find(|&t| !at(t)).unwrap_or(side);
        Some((lo, hi))
    }

    pub fn outline(&self) -> Result<Polygon, OutlineError> {
        outline(&self.cells)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("item {0} is not inside the corridor")]
    ItemOutside(ItemId),
    #[error("item {0} overlaps another item")]
    Overlap(ItemId),
    #[error("item {0} cannot be separated from items of the other orientation")]
    Inseparable(ItemId),
}

/// Splits the corridor into one piece per arm so that every item lies in a
/// single piece and no piece mixes horizontal and vertical items.
///
/// Inside each bend the cut is a monotone staircase: columns are scanned
/// from the far side of the horizontal arm towards it, and the vertical arm
/// keeps, in each column, everything from the lowest vertical item cell seen
/// so far up to its own side.
pub fn nice_partition(
    corridor: &Corridor,
    items: &[SkewedPlacement],
) -> Result<Vec<Subcorridor>, PartitionError> {
    let side = corridor.side;
    let mut occupant: Vec<Option<usize>> = vec![None; (side * side) as usize];
    for (i, it) in items.iter().enumerate() {
        for (x, y) in it.rect.cells() {
            if !corridor.cells().contains(x, y) {
                return Err(PartitionError::ItemOutside(it.id));
            }
            let slot = &mut occupant[(y * side + x) as usize];
            if slot.is_some() {
                return Err(PartitionError::Overlap(it.id));
            }
            *slot = Some(i);
        }
    }
    let occ = |x: i64, y: i64| occupant[(y * side + x) as usize];

    let s = corridor.subcorridor_count();
    let mut pieces: Vec<Subcorridor> = corridor
        .arms
        .iter()
        .enumerate()
        .map(|(a, arm)| Subcorridor {
            arm: a,
            orientation: arm.orientation,
            cells: CellSet::new(side),
        })
        .collect();
    for (x, y) in corridor.cells().iter() {
        if let Ok(CellOwner::Arm(a)) = corridor.owner_of(x, y) {
            pieces[a].cells.insert(x, y);
        }
    }

    for a in 0..s {
        let Some(b) = corridor.next_arm(a) else {
            continue;
        };
        let Some(q) = corridor.arms[a].slab.intersection(&corridor.arms[b].slab) else {
            continue;
        };
        let (h, v) = match corridor.arms[a].orientation {
            Orientation::Horizontal => (a, b),
            Orientation::Vertical => (b, a),
        };
        let hs = corridor.arms[h].slab;
        let vs = corridor.arms[v].slab;
        let h_forward = hs.x2() > q.x2() || hs.x == q.x && hs.x2() == q.x2();
        let v_forward = vs.y2() > q.y2() || vs.y == q.y && vs.y2() == q.y2();
        let gx = |c: i64| if h_forward { q.x + c } else { q.x2() - 1 - c };
        let gy = |r: i64| if v_forward { q.y + r } else { q.y2() - 1 - r };

        let mut lowest = vec![q.h; q.w as usize];
        for c in 0..q.w {
            for r in 0..q.h {
                let (x, y) = (gx(c), gy(r));
                if let Some(i) = occ(x, y) {
                    if items[i].orientation == Orientation::Vertical {
                        lowest[c as usize] = lowest[c as usize].min(r);
                    }
                }
            }
        }
        let mut cut = vec![0; q.w as usize];
        let mut run = q.h;
        for c in (0..q.w).rev() {
            run = run.min(lowest[c as usize]);
            cut[c as usize] = run;
        }
        for c in 0..q.w {
            for r in 0..q.h {
                let (x, y) = (gx(c), gy(r));
                if !corridor.cells().contains(x, y) {
                    continue;
                }
                if r >= cut[c as usize] {
                    if let Some(i) = occ(x, y) {
                        if items[i].orientation == Orientation::Horizontal {
                            return Err(PartitionError::Inseparable(items[i].id));
                        }
                    }
                    pieces[v].cells.insert(x, y);
                } else {
                    pieces[h].cells.insert(x, y);
                }
            }
        }
    }

    for it in items {
        let mut home = None;
        for (x, y) in it.rect.cells() {
            let p = pieces.iter().position(|p| p.cells.contains(x, y));
            match (home, p) {
                (None, Some(p)) => home = Some(p),
                (Some(h), Some(p)) if h == p => {}
                _ => return Err(PartitionError::Inseparable(it.id)),
            }
        }
    }
    for piece in &pieces {
        let mut seen: Option<Orientation> = None;
        for it in items {
            let (x, y) = (it.rect.x, it.rect.y);
            if piece.cells.contains(x, y) {
                match seen {
                    None => seen = Some(it.orientation),
                    Some(o) if o == it.orientation => {}
                    Some(_) => return Err(PartitionError::Inseparable(it.id)),
                }
            }
        }
    }
    Ok(pieces)
}

/// Index of the piece holding each item, in item order.
pub fn piece_of_items(pieces: &[Subcorridor], items: &[SkewedPlacement]) -> Vec<Option<usize>> {
    items
        .iter()
        .map(|it| {
            pieces
                .iter()
                .position(|p| p.cells.contains(it.rect.x, it.rect.y))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{Point, Polygon};

    fn l_corridor() -> Corridor {
        // horizontal arm [0,12)x[0,2), vertical arm [0,2)x[0,10)
        let p = Polygon::new(vec![
            Point::new(0, 0),
            Point::new(12, 0),
            Point::new(12, 2),
            Point::new(2, 2),
            Point::new(2, 10),
            Point::new(0, 10),
        ]);
        Corridor::from_path_polygon(&p, 12).unwrap()
    }

    fn hor(id: ItemId, x: i64, y: i64, w: i64) -> SkewedPlacement {
        SkewedPlacement {
            id,
            rect: Rect::new(x, y, w, 1),
            orientation: Orientation::Horizontal,
            profit: 1,
        }
    }

    fn ver(id: ItemId, x: i64, y: i64, h: i64) -> SkewedPlacement {
        SkewedPlacement {
            id,
            rect: Rect::new(x, y, 1, h),
            orientation: Orientation::Vertical,
            profit: 1,
        }
    }

    #[test]
    fn empty_l_splits_at_bend() {
        let c = l_corridor();
        let pieces = nice_partition(&c, &[]).unwrap();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].area() + pieces[1].area(), c.area());
        assert!(pieces[0].cells.is_disjoint(&pieces[1].cells));
    }

    #[test]
    fn horizontal_item_into_bend() {
        let c = l_corridor();
        let items = [hor(1, 0, 0, 9), ver(2, 1, 1, 9)];
        let pieces = nice_partition(&c, &items).unwrap();
        let homes = piece_of_items(&pieces, &items);
        assert_eq!(
            pieces[homes[0].unwrap()].orientation,
            Orientation::Horizontal
        );
        assert_eq!(pieces[homes[1].unwrap()].orientation, Orientation::Vertical);
        assert_ne!(homes[0], homes[1]);
    }

    #[test]
    fn crossing_items_are_inseparable() {
        let c = l_corridor();
        // vertical item reaches the bottom row at x=1, horizontal item passes under it at x=0
        let items = [ver(2, 1, 0, 9), hor(1, 0, 1, 1)];
        let err = nice_partition(&c, &items);
        assert!(err.is_err());
    }

    #[test]
    fn outside_item_rejected() {
        let c = l_corridor();
        assert_eq!(
            nice_partition(&c, &[hor(1, 3, 3, 5)]),
            Err(PartitionError::ItemOutside(1))
        );
    }
}
