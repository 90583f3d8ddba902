//! Shelf, stack and box packers used by the rest of the pipeline. All
//! placements are absolute: a packer working in a [`BoxRegion`] emits
//! coordinates inside that region.

mod steinberg;
mod strips;

use thiserror::Error;

pub use steinberg::{steinberg, steinberg_condition, SteinbergError};
pub use strips::{strip_remove_repack, StripRepack};

use crate::eps::Eps;
use crate::geom::{validate_in, Item, ItemId, Orientation, Placement, Rect, ValidationReport};

/// An axis-parallel container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoxRegion {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl BoxRegion {
    pub fn new(x: i64, y: i64, w: i64, h: i64) -> BoxRegion {
        assert!(w >= 1 && h >= 1, "box must have positive size");
        BoxRegion { x, y, w, h }
    }

    pub fn at_origin(w: i64, h: i64) -> BoxRegion {
        BoxRegion::new(0, 0, w, h)
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.w, self.h)
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Stacked along one axis: on top of each other for horizontal items,
    /// side by side for vertical ones.
    Stacked(Orientation),
    Shelves,
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicePacking {
    pub region: BoxRegion,
    pub layout: Layout,
    pub placements: Vec<Placement>,
}

impl NicePacking {
    pub fn empty(region: BoxRegion, layout: Layout) -> NicePacking {
        NicePacking {
            region,
            layout,
            placements: Vec::new(),
        }
    }

    pub fn item_ids(&self) -> Vec<ItemId> {
        self.placements.iter().map(|p| p.item).collect()
    }

    pub fn validate(&self, items: &[Item]) -> ValidationReport {
        validate_in(items, &self.placements, &self.region.rect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackError {
    #[error("items {0:?} are larger than the packer allows")]
    TooLarge(Vec<ItemId>),
    #[error("stack overflows the box by {deficit}")]
    Overflow { deficit: i64 },
}

/// Next Fit Decreasing Height into `region`. Items are taken by
/// non-increasing height (ties by id) and placed left to right on shelves;
/// a new shelf opens on top of the previous one when the next item does not
/// fit, and packing stops at the first shelf that does not fit.
///
/// Requires every side to be at most an `eps` fraction of the matching box
/// side; then the packed area is at least `min(a(I), (1 - 2 eps) w h)`.
pub fn nfdh(items: &[Item], region: BoxRegion, eps: Eps) -> Result<NicePacking, PackError> {
    let m = eps.inv() as i64;
    let big: Vec<ItemId> = items
        .iter()
        .filter(|it| it.width * m > region.w || it.height * m > region.h)
        .map(|it| it.id)
        .collect();
    if !big.is_empty() {
        return Err(PackError::TooLarge(big));
    }
    Ok(nfdh_unchecked(items, region))
}

/// NFDH without the size precondition; items wider or taller than the box
/// are skipped.
pub fn nfdh_unchecked(items: &[Item], region: BoxRegion) -> NicePacking {
    let mut order: Vec<&Item> = items
        .iter()
        .filter(|it| it.width <= region.w && it.height <= region.h)
        .collect();
    order.sort_by(|a, b| b.height.cmp(&a.height).then(a.id.cmp(&b.id)));
    let mut out = NicePacking::empty(region, Layout::Shelves);
    let (mut shelf_y, mut shelf_h, mut x) = (0i64, 0i64, 0i64);
    for it in order {
        if x + it.width > region.w {
            shelf_y += shelf_h;
            shelf_h = 0;
            x = 0;
        }
        if shelf_h == 0 && shelf_y + it.height > region.h {
            break;
        }
        if shelf_h == 0 {
            shelf_h = it.height;
        }
        out.placements
            .push(Placement::new(it.id, region.x + x, region.y + shelf_y));
        x += it.width;
    }
    out
}

/// Items sorted for stacking: non-increasing long side, ties by id.
pub fn stack_order(items: &[Item], orientation: Orientation) -> Vec<Item> {
    let mut v = items.to_vec();
    match orientation {
        Orientation::Horizontal => v.sort_by(|a, b| b.width.cmp(&a.width).then(a.id.cmp(&b.id))),
        Orientation::Vertical => v.sort_by(|a, b| b.height.cmp(&a.height).then(a.id.cmp(&b.id))),
    }
    v
}

/// Stacks horizontal items bottom to top against the left edge, or vertical
/// items left to right against the bottom edge, longest first.
pub fn stack_pack(
    items: &[Item],
    region: BoxRegion,
    orientation: Orientation,
) -> Result<NicePacking, PackError> {
    let too_long: Vec<ItemId> = items
        .iter()
        .filter(|it| match orientation {
            Orientation::Horizontal => it.width > region.w,
            Orientation::Vertical => it.height > region.h,
        })
        .map(|it| it.id)
        .collect();
    if !too_long.is_empty() {
        return Err(PackError::TooLarge(too_long));
    }
    let (extent, room) = match orientation {
        Orientation::Horizontal => (items.iter().map(|it| it.height).sum::<i64>(), region.h),
        Orientation::Vertical => (items.iter().map(|it| it.width).sum::<i64>(), region.w),
    };
    if extent > room {
        return Err(PackError::Overflow {
            deficit: extent - room,
        });
    }
    let mut out = NicePacking::empty(region, Layout::Stacked(orientation));
    let mut at = 0;
    for it in stack_order(items, orientation) {
        let p = match orientation {
            Orientation::Horizontal => Placement::new(it.id, region.x, region.y + at),
            Orientation::Vertical => Placement::new(it.id, region.x + at, region.y),
        };
        out.placements.push(p);
        at += match orientation {
            Orientation::Horizontal => it.height,
            Orientation::Vertical => it.width,
        };
    }
    Ok(out)
}

/// First fit decreasing into full-length stacks: horizontal items go into
/// full-height columns ordered by non-increasing width, each column as wide
/// as its first item; vertical items go into full-width rows the same way.
/// Returns one nice packing per stack and the items that found no room.
pub fn column_pack(
    items: &[Item],
    region: BoxRegion,
    orientation: Orientation,
) -> (Vec<NicePacking>, Vec<ItemId>) {
    if orientation == Orientation::Horizontal {
        return columns(items, region);
    }
    let flip = |it: &Item| Item::new(it.id, it.height, it.width, it.profit);
    let t: Vec<Item> = items.iter().map(flip).collect();
    let (cols, left) = columns(&t, BoxRegion::new(region.y, region.x, region.h, region.w));
    let rows = cols
        .into_iter()
        .map(|c| NicePacking {
            region: BoxRegion::new(c.region.y, c.region.x, c.region.h, c.region.w),
            layout: Layout::Stacked(Orientation::Vertical),
            placements: c
                .placements
                .iter()
                .map(|p| Placement::new(p.item, p.y, p.x))
                .collect(),
        })
        .collect();
    (rows, left)
}

fn columns(items: &[Item], region: BoxRegion) -> (Vec<NicePacking>, Vec<ItemId>) {
    let (w, h) = (region.w, region.h);
    let mut order = items.to_vec();
    order.sort_by(|a, b| {
        b.width
            .cmp(&a.width)
            .then(b.height.cmp(&a.height))
            .then(a.id.cmp(&b.id))
    });
    let mut cols: Vec<(NicePacking, i64)> = Vec::new();
    let mut next_x = 0;
    let mut left = Vec::new();
    for it in order {
        if let Some((col, used)) = cols.iter_mut().find(|(_, used)| used + it.height <= h) {
            col.placements
                .push(Placement::new(it.id, col.region.x, region.y + *used));
            *used += it.height;
            continue;
        }
        if next_x + it.width <= w && it.height <= h {
            let mut col = NicePacking::empty(
                BoxRegion::new(region.x + next_x, region.y, it.width, h),
                Layout::Stacked(Orientation::Horizontal),
            );
            col.placements
                .push(Placement::new(it.id, region.x + next_x, region.y));
            cols.push((col, it.height));
            next_x += it.width;
        } else {
            left.push(it.id);
        }
    }
    (cols.into_iter().map(|(c, _)| c).collect(), left)
}
