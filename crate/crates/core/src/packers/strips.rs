use super::{column_pack, nfdh_unchecked, BoxRegion, Layout, NicePacking, PackError};
use crate::eps::Eps;
use crate::geom::{index_items, Item, ItemId, Orientation, Placement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripRepack {
    /// Index of the dropped strip, counted from the bottom (or left).
    pub strip: Option<usize>,
    pub boxes: Vec<BoxRegion>,
    pub packings: Vec<NicePacking>,
    /// Items of the dropped strip, then items the repacking could not place.
    pub dropped: Vec<ItemId>,
}

impl StripRepack {
    pub fn kept(&self) -> impl Iterator<Item = &Placement> {
        self.packings.iter().flat_map(|p| &p.placements)
    }
}

/// Cuts `region` into `1/eps` strips parallel to its long side, drops every
/// item touching the least profitable strip and repacks the rest into
/// columns of stacked items (or NFDH shelves when those keep more profit).
///
/// Items must be thin: short side at most `eps^4` times the short side of
/// the box.
pub fn strip_remove_repack(
    region: BoxRegion,
    items: &[Item],
    placed: &[Placement],
    eps: Eps,
) -> Result<StripRepack, PackError> {
    let by_id = index_items(items);
    let m = eps.inv() as i64;
    let short = region.w.min(region.h);
    let thick: Vec<ItemId> = placed
        .iter()
        .filter(|p| {
            let it = by_id[&p.item];
            it.width.min(it.height) * m.pow(4) > short
        })
        .map(|p| p.item)
        .collect();
    if !thick.is_empty() {
        return Err(PackError::TooLarge(thick));
    }
    if placed.is_empty() {
        return Ok(StripRepack {
            strip: None,
            boxes: Vec::new(),
            packings: Vec::new(),
            dropped: Vec::new(),
        });
    }

    // work with horizontal strips; a tall box is handled transposed
    let transpose = region.h > region.w;
    let (bw, bh) = if transpose {
        (region.h, region.w)
    } else {
        (region.w, region.h)
    };
    let local: Vec<(Item, i64, i64)> = placed
        .iter()
        .map(|p| {
            let it = *by_id[&p.item];
            let (x, y) = (p.x - region.x, p.y - region.y);
            if transpose {
                (Item::new(it.id, it.height, it.width, it.profit), y, x)
            } else {
                (it, x, y)
            }
        })
        .collect();

    let bound = |k: i64| k * bh / m;
    let mut strip_profit = vec![0u64; m as usize];
    let touches = |k: i64, y: i64, h: i64| y < bound(k + 1) && bound(k) < y + h;
    for (it, _, y) in &local {
        for k in 0..m {
            if touches(k, *y, it.height) {
                strip_profit[k as usize] += it.profit;
            }
        }
    }
    let strip = (0..m as usize)
        .min_by_key(|&k| (strip_profit[k], k))
        .unwrap();
    let mut dropped: Vec<ItemId> = Vec::new();
    let mut rest: Vec<Item> = Vec::new();
    for (it, _, y) in &local {
        if touches(strip as i64, *y, it.height) {
            dropped.push(it.id);
        } else {
            rest.push(*it);
        }
    }

    let (cols, col_left) =
        column_pack(&rest, BoxRegion::at_origin(bw, bh), Orientation::Horizontal);
    let shelves = nfdh_unchecked(&rest, BoxRegion::at_origin(bw, bh));
    let profit = |ps: &[Placement]| {
        ps.iter()
            .map(|p| rest.iter().find(|it| it.id == p.item).unwrap().profit)
            .sum::<u64>()
    };
    let col_profit: u64 = cols.iter().map(|c| profit(&c.placements)).sum();
    let (mut packings, left) = if profit(&shelves.placements) > col_profit {
        let placed_ids: Vec<ItemId> = shelves.item_ids();
        let left: Vec<ItemId> = rest
            .iter()
            .map(|it| it.id)
            .filter(|id| !placed_ids.contains(id))
            .collect();
        (vec![shelves], left)
    } else {
        (cols, col_left)
    };
    dropped.extend(left);

    for p in &mut packings {
        let r = p.region;
        if transpose {
            p.region = BoxRegion::new(region.x + r.y, region.y + r.x, r.h, r.w);
            p.layout = match p.layout {
                Layout::Stacked(o) => Layout::Stacked(o.flip()),
                l => l,
            };
            for pl in &mut p.placements {
                let (x, y) = (pl.y, pl.x);
                pl.x = region.x + x;
                pl.y = region.y + y;
            }
        } else {
            p.region = BoxRegion::new(region.x + r.x, region.y + r.y, r.w, r.h);
            for pl in &mut p.placements {
                pl.x += region.x;
                pl.y += region.y;
            }
        }
    }
    let boxes = packings.iter().map(|p| p.region).collect();
    Ok(StripRepack {
        strip: Some(strip),
        boxes,
        packings,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{validate_in, Rect};

    fn eps4() -> Eps {
        Eps::from_inverse(4).unwrap()
    }

    #[test]
    fn empty_box() {
        let r = strip_remove_repack(BoxRegion::at_origin(256, 256), &[], &[], eps4()).unwrap();
        assert!(r.boxes.is_empty() && r.dropped.is_empty());
    }

    #[test]
    fn loaded_strip_is_kept() {
        let items: Vec<Item> = (0..10).map(|i| Item::new(i, 100, 1, 5)).collect();
        let placed: Vec<Placement> = (0..10).map(|i| Placement::new(i as u32, 0, i)).collect();
        let r =
            strip_remove_repack(BoxRegion::at_origin(256, 256), &items, &placed, eps4()).unwrap();
        assert_eq!(r.strip, Some(1));
        assert!(r.dropped.is_empty());
        let kept: Vec<Placement> = r.kept().copied().collect();
        assert_eq!(kept.len(), 10);
        assert!(validate_in(&items, &kept, &Rect::new(0, 0, 256, 256)).valid());
    }

    #[test]
    fn uniform_strips_lose_one_quarter() {
        // 8 unit-height items in each 64-row strip
        let mut items = Vec::new();
        let mut placed = Vec::new();
        for k in 0..4 {
            for j in 0..8 {
                let id = (k * 8 + j) as u32;
                items.push(Item::new(id, 200, 1, 1));
                placed.push(Placement::new(id, 0, k * 64 + j * 2));
            }
        }
        let r =
            strip_remove_repack(BoxRegion::at_origin(256, 256), &items, &placed, eps4()).unwrap();
        assert_eq!(r.dropped.len(), 8);
        assert_eq!(r.kept().count(), 24);
    }

    #[test]
    fn tall_box_is_transposed() {
        let items: Vec<Item> = (0..6).map(|i| Item::new(i, 1, 100, 1)).collect();
        let region = BoxRegion::new(5, 0, 256, 300);
        let placed_t: Vec<Placement> = (0..6)
            .map(|i| Placement::new(i as u32, 5 + 60 * (i % 4) as i64, 0))
            .collect();
        let r = strip_remove_repack(region, &items, &placed_t, eps4()).unwrap();
        let kept: Vec<Placement> = r.kept().copied().collect();
        assert!(validate_in(&items, &kept, &region.rect()).valid());
        assert_eq!(kept.len() + r.dropped.len(), 6);
        assert!(r
            .packings
            .iter()
            .all(|p| p.layout == Layout::Stacked(Orientation::Vertical)));
    }
}
