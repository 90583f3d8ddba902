use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::floor_u64;
use crate::eps::Eps;
use crate::geom::{Item, ItemId, Orientation};

/// Slices of group `group` at level `level` placed in container `container`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountKey {
    pub level: u32,
    pub group: usize,
    pub container: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCount {
    /// The estimate is `multiple * eps / containers` times the group total.
    pub multiple: u64,
    pub estimate: BigRational,
    /// `floor(estimate)`.
    pub count: u64,
}

/// Rounds every container's count down to a multiple of
/// `eps / containers` times the total of its `(level, group)` over all
/// containers.
pub fn guess_box_counts(
    true_counts: &BTreeMap<CountKey, u64>,
    eps: Eps,
    containers: usize,
) -> BTreeMap<CountKey, BoxCount> {
    let mut totals: BTreeMap<(u32, usize), u64> = BTreeMap::new();
    for (k, &c) in true_counts {
        *totals.entry((k.level, k.group)).or_default() += c;
    }
    let steps = containers.max(1) as u128 * eps.inv() as u128;
    true_counts
        .iter()
        .map(|(k, &c)| {
            let total = totals[&(k.level, k.group)];
            let bc = if total == 0 {
                BoxCount {
                    multiple: 0,
                    estimate: BigRational::zero(),
                    count: 0,
                }
            } else {
                let multiple = (c as u128 * steps / total as u128) as u64;
                let estimate = BigRational::new(
                    BigInt::from(multiple) * BigInt::from(total),
                    BigInt::from(steps),
                );
                let count = floor_u64(&estimate);
                BoxCount {
                    multiple,
                    estimate,
                    count,
                }
            };
            (*k, bc)
        })
        .collect()
}

/// A box reserved for the items of one level: items at most `length` long
/// are stacked up to `capacity` along their short side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceBox {
    pub length: i64,
    pub capacity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SliceAssignment {
    /// `(item, box, offset)`: the item starts `offset` units into the stack.
    pub assigned: Vec<(ItemId, usize, i64)>,
    /// Items split across two boxes by the fractional fill.
    pub dropped: Vec<ItemId>,
    /// Items that found no room at all.
    pub unplaced: Vec<ItemId>,
    /// Number of items in the fractional fill, counting split items by the
    /// share that fit.
    pub fractional: BigRational,
}

/// Fills boxes by increasing length with items by increasing long side,
/// splitting an item across consecutive boxes when a box runs out. Split
/// items are then dropped, which loses at most one item per box.
pub fn slices_to_items(
    items: &[Item],
    orientation: Orientation,
    boxes: &[SliceBox],
) -> SliceAssignment {
    let dims = |it: &Item| match orientation {
        Orientation::Horizontal => (it.width, it.height),
        Orientation::Vertical => (it.height, it.width),
    };
    let mut order: Vec<&Item> = items.iter().collect();
    order.sort_by_key(|it| (dims(it).0, it.id));
    let mut by_len: Vec<usize> = (0..boxes.len()).collect();
    by_len.sort_by_key(|&b| (boxes[b].length, b));

    let mut out = SliceAssignment {
        fractional: BigRational::zero(),
        ..Default::default()
    };
    let (mut bi, mut used) = (0usize, 0i64);
    for it in order {
        let (len, thick) = dims(it);
        while bi < by_len.len()
            && (len > boxes[by_len[bi]].length || used >= boxes[by_len[bi]].capacity)
        {
            bi += 1;
            used = 0;
        }
        if bi == by_len.len() {
            out.unplaced.push(it.id);
            continue;
        }
        let b = by_len[bi];
        if used + thick <= boxes[b].capacity {
            out.assigned.push((it.id, b, used));
            used += thick;
            out.fractional += BigRational::from_integer(1.into());
            continue;
        }
        // split: the rest spills into the following boxes, all long enough
        let mut rest = thick;
        let mut share = 0;
        while rest > 0 && bi < by_len.len() {
            let room = boxes[by_len[bi]].capacity - used;
            let take = room.min(rest);
            share += take;
            rest -= take;
            used += take;
            if used >= boxes[by_len[bi]].capacity {
                bi += 1;
                used = 0;
            }
        }
        out.fractional += BigRational::new(share.into(), thick.into());
        out.dropped.push(it.id);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_container_keeps_count() {
        let key = CountKey {
            level: 0,
            group: 1,
            container: 0,
        };
        let counts = BTreeMap::from([(key, 7u64)]);
        let g = guess_box_counts(&counts, Eps::from_inverse(2).unwrap(), 1);
        assert_eq!(g[&key].multiple, 2);
        assert_eq!(g[&key].estimate, BigRational::from_integer(7.into()));
        assert_eq!(g[&key].count, 7);
    }

    #[test]
    fn zero_counts_stay_zero() {
        let key = CountKey {
            level: 1,
            group: 2,
            container: 3,
        };
        let g = guess_box_counts(
            &BTreeMap::from([(key, 0u64)]),
            Eps::from_inverse(4).unwrap(),
            4,
        );
        assert_eq!(g[&key].count, 0);
    }

    #[test]
    fn exact_capacity_assigns_everything() {
        let items: Vec<Item> = (0..4).map(|i| Item::new(i, 10 + i as i64, 2, 1)).collect();
        let a = slices_to_items(
            &items,
            Orientation::Horizontal,
            &[SliceBox {
                length: 20,
                capacity: 8,
            }],
        );
        assert_eq!(a.assigned.len(), 4);
        assert!(a.dropped.is_empty() && a.unplaced.is_empty());
    }

    #[test]
    fn straddling_item_is_dropped() {
        let items: Vec<Item> = (0..3).map(|i| Item::new(i, 10, 2, 1)).collect();
        let boxes = [
            SliceBox {
                length: 10,
                capacity: 3,
            },
            SliceBox {
                length: 10,
                capacity: 3,
            },
        ];
        let a = slices_to_items(&items, Orientation::Horizontal, &boxes);
        assert_eq!(a.dropped, vec![1]);
        assert_eq!(a.assigned, vec![(0, 0, 0), (2, 1, 1)]);
        assert_eq!(a.fractional, BigRational::from_integer(3.into()));
    }

    #[test]
    fn zero_capacity_assigns_nothing() {
        let items = [Item::new(0, 3, 1, 1)];
        let a = slices_to_items(
            &items,
            Orientation::Horizontal,
            &[SliceBox {
                length: 5,
                capacity: 0,
            }],
        );
        assert!(a.assigned.is_empty());
        assert_eq!(a.unplaced, vec![0]);
    }
}
