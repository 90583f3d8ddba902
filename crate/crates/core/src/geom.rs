//! Items, placements and packings inside an `N x N` knapsack, all in integer
//! grid units. Rectangles are half-open, so two rectangles sharing only an edge
//! do not intersect.

use std::collections::{HashMap, HashSet};

pub type ItemId = u32;

/// Direction of the long side of a skewed item, or of the defining edges of a
/// corridor piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Item {
    pub id: ItemId,
    pub width: i64,
    pub height: i64,
    pub profit: u64,
}

impl Item {
    pub fn new(id: ItemId, width: i64, height: i64, profit: u64) -> Item {
        Item {
            id,
            width,
            height,
            profit,
        }
    }

    pub fn area(&self) -> i64 {
        self.width * self.height
    }

    /// Footprint size, swapping sides when rotated.
    pub fn dims(&self, rotated: bool) -> (i64, i64) {
        if rotated {
            (self.height, self.width)
        } else {
            (self.width, self.height)
        }
    }
}

/// `[x, x + w) x [y, y + h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    pub fn new(x: i64, y: i64, w: i64, h: i64) -> Rect {
        Rect { x, y, w, h }
    }

    pub fn x2(&self) -> i64 {
        self.x + self.w
    }

    pub fn y2(&self) -> i64 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }

    pub fn is_empty(&self) -> bool {
        self.w <= 0 || self.h <= 0
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x >= self.x && other.y >= self.y && other.x2() <= self.x2() && other.y2() <= self.y2()
    }

    pub fn contains_cell(&self, cx: i64, cy: i64) -> bool {
        cx >= self.x && cx < self.x2() && cy >= self.y && cy < self.y2()
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let x = self.x.max(other.x);
        let y = self.y.max(other.y);
        let x2 = self.x2().min(other.x2());
        let y2 = self.y2().min(other.y2());
        (x < x2 && y < y2).then(|| Rect::new(x, y, x2 - x, y2 - y))
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (self.y..self.y2()).flat_map(move |y| (self.x..self.x2()).map(move |x| (x, y)))
    }
}

/// True iff the open interiors share a point.
pub fn rects_intersect(a: &Rect, b: &Rect) -> bool {
    a.x < b.x2() && b.x < a.x2() && a.y < b.y2() && b.y < a.y2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub item: ItemId,
    pub x: i64,
    pub y: i64,
    pub rotated: bool,
}

impl Placement {
    pub fn new(item: ItemId, x: i64, y: i64) -> Placement {
        Placement {
            item,
            x,
            y,
            rotated: false,
        }
    }

    pub fn rect(&self, item: &Item) -> Rect {
        let (w, h) = item.dims(self.rotated);
        Rect::new(self.x, self.y, w, h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Packing {
    pub side: i64,
    pub placements: Vec<Placement>,
}

impl Packing {
    pub fn new(side: i64) -> Packing {
        Packing {
            side,
            placements: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn profit(&self, items: &[Item]) -> u64 {
        let by_id = index_items(items);
        self.placements
            .iter()
            .filter_map(|p| by_id.get(&p.item))
            .map(|it| it.profit)
            .sum()
    }

    pub fn item_ids(&self) -> Vec<ItemId> {
        self.placements.iter().map(|p| p.item).collect()
    }

    /// Placed rectangles paired with their items, skipping unknown ids.
    pub fn rects<'a>(&'a self, items: &'a [Item]) -> Vec<(Item, Rect)> {
        let by_id = index_items(items);
        self.placements
            .iter()
            .filter_map(|p| by_id.get(&p.item).map(|it| (**it, p.rect(it))))
            .collect()
    }
}

pub fn index_items(items: &[Item]) -> HashMap<ItemId, &Item> {
    items.iter().map(|it| (it.id, it)).collect()
}

pub fn total_area(items: &[Item]) -> i64 {
    items.iter().map(Item::area).sum()
}

pub fn total_profit(items: &[Item]) -> u64 {
    items.iter().map(|it| it.profit).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Overlap,
    OutOfBounds,
    Duplicate,
    UnknownItem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub items: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

pub fn validate_packing(items: &[Item], packing: &Packing) -> ValidationReport {
    validate_in(
        items,
        &packing.placements,
        &Rect::new(0, 0, packing.side, packing.side),
    )
}

/// Same checks as [`validate_packing`] against an arbitrary container.
pub fn validate_in(items: &[Item], placements: &[Placement], bounds: &Rect) -> ValidationReport {
    let by_id = index_items(items);
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    let mut placed: Vec<(ItemId, Rect)> = Vec::new();
    for p in placements {
        let Some(item) = by_id.get(&p.item) else {
            violations.push(Violation {
                kind: ViolationKind::UnknownItem,
                items: vec![p.item],
            });
            continue;
        };
        if !seen.insert(p.item) {
            violations.push(Violation {
                kind: ViolationKind::Duplicate,
                items: vec![p.item],
            });
            continue;
        }
        let r = p.rect(item);
        if !bounds.contains_rect(&r) {
            violations.push(Violation {
                kind: ViolationKind::OutOfBounds,
                items: vec![p.item],
            });
        }
        placed.push((p.item, r));
    }
    // sweep by x so the pair scan stays cheap on large packings
    placed.sort_by_key(|(id, r)| (r.x, *id));
    for i in 0..placed.len() {
        for j in i + 1..placed.len() {
            if placed[j].1.x >= placed[i].1.x2() {
                break;
            }
            if rects_intersect(&placed[i].1, &placed[j].1) {
                let (a, b) = (placed[i].0.min(placed[j].0), placed[i].0.max(placed[j].0));
                violations.push(Violation {
                    kind: ViolationKind::Overlap,
                    items: vec![a, b],
                });
            }
        }
    }
    ValidationReport { violations }
}
