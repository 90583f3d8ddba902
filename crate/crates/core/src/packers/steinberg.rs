//! Packing a set of rectangles that satisfies Steinberg's condition
//!
//! `2 a(I) <= w h - (2 w_max - w)+ (2 h_max - h)+`
//!
//! into a `w x h` box. The search runs a portfolio of constructive packers
//! (global MaxRects under three scoring rules, bottom-left skyline,
//! recursive vertical and horizontal splits at area prefixes) on the
//! instance and its transpose, and finishes with an exhaustive search when
//! the instance is small.

use thiserror::Error;

use super::{BoxRegion, Layout, NicePacking};
use crate::exact::{pack_all, Grid, Piece};
use crate::geom::{Item, ItemId, Placement, Rect};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteinbergError {
    #[error("item {item} is wider than the box")]
    TooWide { item: ItemId },
    #[error("item {item} is taller than the box")]
    TooTall { item: ItemId },
    #[error("2 a(I) = {twice_area} exceeds w h - (2 w_max - w)+ (2 h_max - h)+ = {bound}")]
    AreaBound { twice_area: i128, bound: i128 },
    #[error("no packing found for an instance that meets the condition")]
    Unpacked,
}

/// Checks the three inequalities of the condition, reporting the first one
/// violated.
pub fn steinberg_condition(items: &[Item], w: i64, h: i64) -> Result<(), SteinbergError> {
    if let Some(it) = items.iter().find(|it| it.width > w) {
        return Err(SteinbergError::TooWide { item: it.id });
    }
    if let Some(it) = items.iter().find(|it| it.height > h) {
        return Err(SteinbergError::TooTall { item: it.id });
    }
    let twice_area: i128 = 2 * items.iter().map(|it| it.area() as i128).sum::<i128>();
    let wmax = items.iter().map(|it| it.width).max().unwrap_or(0) as i128;
    let hmax = items.iter().map(|it| it.height).max().unwrap_or(0) as i128;
    let (w, h) = (w as i128, h as i128);
    let bound = w * h - (2 * wmax - w).max(0) * (2 * hmax - h).max(0);
    if twice_area > bound {
        return Err(SteinbergError::AreaBound { twice_area, bound });
    }
    Ok(())
}

/// Packs all of `items` into `region`. Instances that break the condition
/// are still attempted; the condition error is returned only when no
/// packing is found.
pub fn steinberg(items: &[Item], region: BoxRegion) -> Result<NicePacking, SteinbergError> {
    let cond = steinberg_condition(items, region.w, region.h);
    if matches!(
        cond,
        Err(SteinbergError::TooWide { .. } | SteinbergError::TooTall { .. })
    ) {
        return Err(cond.unwrap_err());
    }
    let rects: Vec<R> = items
        .iter()
        .map(|it| R {
            id: it.id,
            w: it.width,
            h: it.height,
        })
        .collect();
    match solve(&rects, region.w, region.h, 2) {
        Some(spots) => {
            let mut placements: Vec<Placement> = spots
                .into_iter()
                .map(|(id, x, y)| Placement::new(id, region.x + x, region.y + y))
                .collect();
            placements.sort_by_key(|p| p.item);
            Ok(NicePacking {
                region,
                layout: Layout::Free,
                placements,
            })
        }
        None => Err(cond.err().unwrap_or(SteinbergError::Unpacked)),
    }
}

#[derive(Debug, Clone, Copy)]
struct R {
    id: ItemId,
    w: i64,
    h: i64,
}

type Spots = Vec<(ItemId, i64, i64)>;

fn solve(items: &[R], w: i64, h: i64, depth: u32) -> Option<Spots> {
    if items.is_empty() {
        return Some(Vec::new());
    }
    if items.iter().any(|r| r.w > w || r.h > h) {
        return None;
    }
    let area: i64 = items.iter().map(|r| r.w * r.h).sum();
    if area > w * h {
        return None;
    }
    if let Some(s) = heuristics(items, w, h) {
        return Some(s);
    }
    let flipped: Vec<R> = items
        .iter()
        .map(|r| R {
            id: r.id,
            w: r.h,
            h: r.w,
        })
        .collect();
    if let Some(s) = heuristics(&flipped, h, w) {
        return Some(s.into_iter().map(|(id, x, y)| (id, y, x)).collect());
    }
    if depth > 0 {
        if let Some(s) = split(items, w, h, depth) {
            return Some(s);
        }
        if let Some(s) = split(&flipped, h, w, depth) {
            return Some(s.into_iter().map(|(id, x, y)| (id, y, x)).collect());
        }
    }
    exhaustive(items, w, h)
}

fn heuristics(items: &[R], w: i64, h: i64) -> Option<Spots> {
    let mut orders: Vec<Vec<R>> = Vec::new();
    let keys: [fn(&R) -> (i64, i64); 4] = [
        |r: &R| (r.w * r.h, r.h),
        |r: &R| (r.h, r.w),
        |r: &R| (r.w, r.h),
        |r: &R| (r.w.max(r.h), r.w.min(r.h)),
    ];
    for key in keys {
        let mut v = items.to_vec();
        v.sort_by(|a, b| key(b).cmp(&key(a)).then(a.id.cmp(&b.id)));
        orders.push(v);
    }
    for rule in [Rule::ShortSide, Rule::Area, Rule::BottomLeft] {
        if let Some(s) = maxrects(&orders[0], w, h, rule) {
            return Some(s);
        }
    }
    orders.iter().find_map(|o| skyline(o, w, h))
}

#[derive(Clone, Copy)]
enum Rule {
    ShortSide,
    Area,
    BottomLeft,
}

/// Global MaxRects: at every step the best (item, free rectangle) pair under
/// `rule` is placed at the free rectangle's bottom-left corner.
fn maxrects(items: &[R], w: i64, h: i64, rule: Rule) -> Option<Spots> {
    let mut free = vec![Rect::new(0, 0, w, h)];
    let mut left: Vec<R> = items.to_vec();
    let mut out = Vec::with_capacity(items.len());
    while !left.is_empty() {
        let mut best: Option<((i64, i64), usize, Rect)> = None;
        for (i, r) in left.iter().enumerate() {
            for f in &free {
                if r.w > f.w || r.h > f.h {
                    continue;
                }
                let (dw, dh) = (f.w - r.w, f.h - r.h);
                let score = match rule {
                    Rule::ShortSide => (dw.min(dh), dw.max(dh)),
                    Rule::Area => (f.area() - r.w * r.h, dw.min(dh)),
                    Rule::BottomLeft => (f.y + r.h, f.x),
                };
                if best.is_none_or(|(s, bi, _)| (score, i) < (s, bi)) {
                    best = Some((score, i, Rect::new(f.x, f.y, r.w, r.h)));
                }
            }
        }
        let (_, i, placed) = best?;
        out.push((left[i].id, placed.x, placed.y));
        left.remove(i);
        let mut next = Vec::with_capacity(free.len() + 4);
        for f in free {
            if f.intersection(&placed).is_none() {
                next.push(f);
                continue;
            }
            if placed.x > f.x {
                next.push(Rect::new(f.x, f.y, placed.x - f.x, f.h));
            }
            if placed.x2() < f.x2() {
                next.push(Rect::new(placed.x2(), f.y, f.x2() - placed.x2(), f.h));
            }
            if placed.y > f.y {
                next.push(Rect::new(f.x, f.y, f.w, placed.y - f.y));
            }
            if placed.y2() < f.y2() {
                next.push(Rect::new(f.x, placed.y2(), f.w, f.y2() - placed.y2()));
            }
        }
        next.sort_by_key(|r| (r.x, r.y, std::cmp::Reverse(r.w), std::cmp::Reverse(r.h)));
        next.dedup();
        free = next
            .iter()
            .enumerate()
            .filter(|(i, r)| {
                !next
                    .iter()
                    .enumerate()
                    .any(|(j, o)| j != *i && o.contains_rect(r))
            })
            .map(|(_, r)| *r)
            .collect();
    }
    Some(out)
}

/// Bottom-left skyline: each item goes where its bottom is lowest, then
/// leftmost; space under overhangs is lost.
fn skyline(items: &[R], w: i64, h: i64) -> Option<Spots> {
    let mut sky = vec![0i64; w as usize];
    let mut out = Vec::with_capacity(items.len());
    for r in items {
        let mut best: Option<(i64, i64)> = None;
        for x in 0..=(w - r.w) {
            let y = sky[x as usize..(x + r.w) as usize]
                .iter()
                .copied()
                .max()
                .unwrap_or(0);
            if y + r.h <= h && best.is_none_or(|(by, bx)| (y, x) < (by, bx)) {
                best = Some((y, x));
            }
        }
        let (y, x) = best?;
        for s in &mut sky[x as usize..(x + r.w) as usize] {
            *s = y + r.h;
        }
        out.push((r.id, x, y));
    }
    Some(out)
}

/// Cuts the box vertically: the widest items, up to an area prefix, go left
/// and the rest go right, both packed recursively.
fn split(items: &[R], w: i64, h: i64, depth: u32) -> Option<Spots> {
    if w < 2 || items.len() < 2 {
        return None;
    }
    let mut v = items.to_vec();
    v.sort_by(|a, b| b.w.cmp(&a.w).then(b.h.cmp(&a.h)).then(a.id.cmp(&b.id)));
    let mut prefix = 0i64;
    for m in 1..v.len() {
        prefix += v[m - 1].w * v[m - 1].h;
        let needed = ((2 * prefix + h - 1) / h).max(v[0].w);
        for u1 in [needed, (w + 1) / 2, w - v[m].w] {
            if u1 < v[0].w || u1 >= w || w - u1 < v[m..].iter().map(|r| r.w).max().unwrap_or(0) {
                continue;
            }
            let Some(a) = solve(&v[..m], u1, h, depth - 1) else {
                continue;
            };
            let Some(b) = solve(&v[m..], w - u1, h, depth - 1) else {
                continue;
            };
            let mut s = a;
            s.extend(b.into_iter().map(|(id, x, y)| (id, x + u1, y)));
            return Some(s);
        }
    }
    None
}

fn exhaustive(items: &[R], w: i64, h: i64) -> Option<Spots> {
    if items.len() > 12 || w > 128 || w * h > 16_384 {
        return None;
    }
    let mut sorted = items.to_vec();
    sorted.sort_by(|a, b| (b.w * b.h).cmp(&(a.w * a.h)).then(a.id.cmp(&b.id)));
    let pieces: Vec<Piece> = sorted
        .iter()
        .map(|r| Piece {
            id: r.id,
            dims: vec![(r.w, r.h, false)],
        })
        .collect();
    let mut grid = Grid::open(w, h);
    let mut budget = 2_000_000u64;
    match pack_all(&mut grid, &pieces, &mut budget) {
        Ok(Some(ps)) => Some(ps.into_iter().map(|p| (p.item, p.x, p.y)).collect()),
        _ => None,
    }
}
