use thiserror::Error;

use crate::corridor::{Corridor, SkewedPlacement, Subcorridor};
use crate::eps::Eps;
use crate::geom::{Item, ItemId, Orientation, Rect};
use crate::packers::{column_pack, steinberg, BoxRegion, NicePacking};

/// Slices to put into one piece: `(length, count)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceLoad {
    pub piece: usize,
    pub slices: Vec<(i64, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacedSlice {
    pub piece: usize,
    pub length: i64,
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaceError {
    #[error("piece {piece} cannot hold its slices")]
    Overfull { piece: usize },
    #[error("only path corridors with at most three pieces are supported")]
    Unsupported,
}

/// Packs unit slices into the pieces of a path corridor with at most three
/// pieces. Inside a piece, slices go longest first onto the lines starting
/// at the longer defining edge; each line is filled from the end that
/// faces the corridor's outer cap (the first cap for the first piece, the
/// last cap for the last one). The middle piece of a three-piece corridor
/// is placed last and filled from its low end.
pub fn pack_slices_nicely(
    corridor: &Corridor,
    pieces: &[Subcorridor],
    loads: &[PieceLoad],
) -> Result<Vec<PlacedSlice>, PlaceError> {
    let s = corridor.subcorridor_count();
    if corridor.is_cycle() || s > 3 || pieces.len() != s {
        return Err(PlaceError::Unsupported);
    }
    let caps = corridor.caps().ok_or(PlaceError::Unsupported)?;
    let mut order: Vec<&PieceLoad> = loads.iter().collect();
    // end pieces first
    order.sort_by_key(|l| (s == 3 && l.piece == 1, l.piece));
    let mut out = Vec::new();
    for load in order {
        let piece = &pieces[load.piece];
        let arm = &corridor.arms[piece.arm];
        let mut lines: Vec<i64> = arm.lines().collect();
        let first_long = arm.first.len() >= arm.second.len();
        let start = if first_long {
            arm.first.level()
        } else {
            arm.second.level()
        };
        lines.sort_by_key(|&l| (2 * l + 1 - 2 * start).abs());
        let cap_level = if load.piece == 0 {
            Some(caps.0.level())
        } else if load.piece + 1 == s {
            Some(caps.1.level())
        } else {
            None
        };
        // free run on each line, consumed from the pushed end
        let mut runs: Vec<(i64, i64, i64)> = lines
            .iter()
            .filter_map(|&l| piece.line_interval(l).map(|(lo, hi)| (l, lo, hi)))
            .collect();
        let mut lengths: Vec<i64> = load
            .slices
            .iter()
            .flat_map(|&(len, c)| std::iter::repeat_n(len, c))
            .collect();
        lengths.sort_by(|a, b| b.cmp(a));
        for len in lengths {
            let Some(run) = runs.iter_mut().find(|(_, lo, hi)| hi - lo >= len) else {
                return Err(PlaceError::Overfull { piece: load.piece });
            };
            let (line, lo, hi) = *run;
            let to_high = cap_level.is_some_and(|c| 2 * c > lo + hi);
            let at = if to_high {
                run.2 = hi - len;
                hi - len
            } else {
                run.1 = lo + len;
                lo
            };
            let rect = match piece.orientation {
                Orientation::Horizontal => Rect::new(at, line, len, 1),
                Orientation::Vertical => Rect::new(line, at, 1, len),
            };
            out.push(PlacedSlice {
                piece: load.piece,
                length: len,
                rect,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcorridorBoxes {
    /// The stripe of lines whose items were removed.
    pub stripe: Option<usize>,
    pub boxes: Vec<NicePacking>,
    pub dropped: Vec<ItemId>,
}

/// Turns the items of one piece into boxes with nice packings. The piece is
/// cut across its lines into `1/eps` stripes and the items touching the
/// cheapest stripe are removed. The piece is then split into steps (runs of
/// lines with the same extent); each remaining item joins the step of its
/// first line and every step is repacked into stacks, or by Steinberg's
/// packer when the stacks leave items out.
pub fn partition_subcorridor(
    piece: &Subcorridor,
    items: &[SkewedPlacement],
    eps: Eps,
) -> SubcorridorBoxes {
    let line_of = |r: &Rect| match piece.orientation {
        Orientation::Horizontal => (r.y, r.h),
        Orientation::Vertical => (r.x, r.w),
    };
    let lines: Vec<i64> = {
        let mut v: Vec<i64> = piece
            .cells
            .iter()
            .map(|(x, y)| match piece.orientation {
                Orientation::Horizontal => y,
                Orientation::Vertical => x,
            })
            .collect();
        v.sort();
        v.dedup();
        v
    };
    if lines.is_empty() || items.is_empty() {
        return SubcorridorBoxes {
            stripe: None,
            boxes: Vec::new(),
            dropped: items.iter().map(|p| p.id).collect(),
        };
    }
    let (l0, l1) = (lines[0], lines[lines.len() - 1] + 1);
    let m = eps.inv() as i64;
    let t = l1 - l0;
    let bound = |k: i64| l0 + k * t / m;
    let touches = |k: i64, r: &Rect| {
        let (a, len) = line_of(r);
        a < bound(k + 1) && bound(k) < a + len
    };
    let stripe_profit: Vec<u64> = (0..m)
        .map(|k| {
            items
                .iter()
                .filter(|p| touches(k, &p.rect))
                .map(|p| p.profit)
                .sum()
        })
        .collect();
    let stripe = (0..m as usize)
        .min_by_key(|&k| (stripe_profit[k], k))
        .unwrap();
    let mut dropped: Vec<ItemId> = Vec::new();
    let mut kept: Vec<&SkewedPlacement> = Vec::new();
    for p in items {
        if touches(stripe as i64, &p.rect) {
            dropped.push(p.id);
        } else {
            kept.push(p);
        }
    }

    // steps of equal extent
    let mut steps: Vec<(i64, i64, (i64, i64))> = Vec::new();
    for &l in &lines {
        let iv = piece.line_interval(l).expect("line has cells");
        match steps.last_mut() {
            Some((_, end, prev)) if *end == l && *prev == iv => *end = l + 1,
            _ => steps.push((l, l + 1, iv)),
        }
    }
    let mut boxes = Vec::new();
    for &(a, b, (lo, hi)) in &steps {
        let members: Vec<Item> = kept
            .iter()
            .filter(|p| (a..b).contains(&line_of(&p.rect).0))
            .map(|p| Item::new(p.id, p.rect.w, p.rect.h, p.profit))
            .collect();
        if members.is_empty() {
            continue;
        }
        let region = match piece.orientation {
            Orientation::Horizontal => BoxRegion::new(lo, a, hi - lo, b - a),
            Orientation::Vertical => BoxRegion::new(a, lo, b - a, hi - lo),
        };
        let (stacks, left) = column_pack(&members, region, piece.orientation);
        if left.is_empty() {
            boxes.extend(stacks);
        } else if let Ok(p) = steinberg(&members, region) {
            boxes.push(p);
        } else {
            boxes.extend(stacks);
            dropped.extend(left);
        }
    }
    dropped.sort();
    SubcorridorBoxes {
        stripe: Some(stripe),
        boxes,
        dropped,
    }
}
