//! Counting skewed items through unit-thickness slices: dimension classes,
//! profit estimates encoded as a short bit string, slices and linear
//! grouping, per-container count rounding, slice placement and the
//! conversion back to whole items.

mod boxes;
mod place;

pub use boxes::{guess_box_counts, slices_to_items, BoxCount, CountKey, SliceAssignment, SliceBox};
pub use place::{
    pack_slices_nicely, partition_subcorridor, PieceLoad, PlaceError, PlacedSlice, SubcorridorBoxes,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::classify::{Classification, Label};
use crate::eps::Eps;
use crate::geom::{Item, ItemId, Orientation};

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Level of a length: the `l` with `(1 + eps)^l <= len < (1 + eps)^(l + 1)`.
pub fn level_of(len: i64, eps: Eps) -> u32 {
    assert!(len >= 1, "lengths are positive");
    let m = eps.inv() as i64;
    // (m + 1)^l <= len * m^l
    let (mut up, mut down) = (big(m + 1), big(m));
    let mut l = 0;
    while up <= big(len) * &down {
        l += 1;
        up *= m + 1;
        down *= m;
    }
    l
}

/// `floor(log_{1+eps} n)`, the largest level a length `<= n` can have.
pub fn level_count(n: i64, eps: Eps) -> u32 {
    level_of(n.max(1), eps)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionClass {
    pub orientation: Orientation,
    pub level: u32,
    /// Sorted by id.
    pub members: Vec<ItemId>,
}

/// Groups horizontal items by height level and vertical items by width
/// level. Classes are sorted by orientation, then level.
pub fn group_by_dimension(
    items: &[Item],
    classes: &Classification,
    eps: Eps,
) -> Vec<DimensionClass> {
    let mut out: Vec<DimensionClass> = Vec::new();
    for it in items {
        let (orientation, len) = match classes.label(it.id) {
            Some(Label::Horizontal) => (Orientation::Horizontal, it.height),
            Some(Label::Vertical) => (Orientation::Vertical, it.width),
            _ => continue,
        };
        let level = level_of(len, eps);
        match out
            .iter_mut()
            .find(|c| c.orientation == orientation && c.level == level)
        {
            Some(c) => c.members.push(it.id),
            None => out.push(DimensionClass {
                orientation,
                level,
                members: vec![it.id],
            }),
        }
    }
    for c in &mut out {
        c.members.sort();
    }
    out.sort_by_key(|c| (c.orientation, c.level));
    out
}

/// Per-level counts rounded down to multiples of `eps |OPT'| / (4 F)`,
/// with `F = floor(log_{1+eps} N)`, written in unary: `k` zeros then a one
/// for every level `0..=F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimateCode {
    pub bits: Vec<bool>,
    /// `eps |OPT'| / (4 F)`.
    pub unit: BigRational,
}

impl EstimateCode {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The multipliers `k`, one per level.
    pub fn decode(&self) -> Vec<u64> {
        let mut ks = Vec::new();
        let mut run = 0;
        for &b in &self.bits {
            if b {
                ks.push(run);
                run = 0;
            } else {
                run += 1;
            }
        }
        ks
    }

    pub fn estimates(&self) -> Vec<BigRational> {
        self.decode()
            .into_iter()
            .map(|k| BigRational::from_integer(BigInt::from(k)) * &self.unit)
            .collect()
    }
}

/// Encodes per-level counts (index = level) of one orientation. The counts
/// must sum to at most `opt`.
pub fn encode_estimates(counts: &[u64], opt: u64, eps: Eps, n: i64) -> EstimateCode {
    let f = level_count(n, eps).max(1) as u64;
    let m = eps.inv();
    let levels = f as usize + 1;
    assert!(
        counts.len() <= levels,
        "more levels than log_(1+eps) N allows"
    );
    assert!(counts.iter().sum::<u64>() <= opt, "counts exceed |OPT'|");
    let unit = if opt == 0 {
        BigRational::one()
    } else {
        BigRational::new(BigInt::from(opt), BigInt::from(4 * f * m))
    };
    let mut bits = Vec::new();
    for l in 0..levels {
        let c = counts.get(l).copied().unwrap_or(0);
        // largest k with k * unit <= c
        let k = if opt == 0 {
            0
        } else {
            (c as u128 * 4 * f as u128 * m as u128 / opt as u128) as u64
        };
        bits.extend(std::iter::repeat_n(false, k as usize));
        bits.push(true);
    }
    EstimateCode { bits, unit }
}

/// A unit-thickness piece of a skewed item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    pub parent: ItemId,
    /// Position of the slice inside its parent, from 0.
    pub index: i64,
    pub orientation: Orientation,
    pub level: u32,
    pub length: i64,
    pub profit: BigRational,
}

/// `(1 + eps)^-level`.
pub fn slice_profit(level: u32, eps: Eps) -> BigRational {
    let m = eps.inv() as i64;
    BigRational::new(big(m).pow(level), big(m + 1).pow(level))
}

/// Takes the `ceil(estimate / (1 + eps))` items of the class with the
/// smallest long side (ties by id) and cuts each into unit slices along its
/// short side.
pub fn build_slices(
    class: &DimensionClass,
    items: &[Item],
    estimate: &BigRational,
    eps: Eps,
) -> Vec<Slice> {
    let m = eps.inv() as i64;
    let scaled = estimate * BigRational::new(big(m), big(m + 1));
    let take = scaled.ceil().to_integer().to_usize().unwrap_or(0);
    let mut members: Vec<&Item> = class
        .members
        .iter()
        .filter_map(|id| items.iter().find(|it| it.id == *id))
        .collect();
    let horizontal = class.orientation == Orientation::Horizontal;
    let long = move |it: &Item| if horizontal { it.width } else { it.height };
    let short = move |it: &Item| if horizontal { it.height } else { it.width };
    members.sort_by_key(|it| (long(it), it.id));
    let profit = slice_profit(class.level, eps);
    members
        .into_iter()
        .take(take)
        .flat_map(|it| {
            let profit = profit.clone();
            (0..short(it)).map(move |index| Slice {
                parent: it.id,
                index,
                orientation: class.orientation,
                level: class.level,
                length: long(it),
                profit: profit.clone(),
            })
        })
        .collect()
}

/// One kept group after linear grouping: every member is treated as if it
/// had the group's largest length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceClass {
    pub level: u32,
    /// Group index; 0 is the dropped group of longest slices.
    pub group: usize,
    pub rounded_length: i64,
    pub members: Vec<Slice>,
}

impl SliceClass {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearGrouping {
    pub group_size: usize,
    /// Every group in order, before rounding.
    pub groups: Vec<Vec<Slice>>,
    pub classes: Vec<SliceClass>,
    pub dropped: Vec<Slice>,
}

/// Sorts slices by non-increasing length (ties by parent and index), cuts
/// them into groups of `ceil(n / (1/eps + 1))`, drops the first group and
/// rounds every other group up to its longest member.
pub fn linear_grouping(slices: &[Slice], eps: Eps) -> LinearGrouping {
    let mut sorted = slices.to_vec();
    sorted.sort_by(|a, b| {
        b.length
            .cmp(&a.length)
            .then(a.parent.cmp(&b.parent))
            .then(a.index.cmp(&b.index))
    });
    if sorted.is_empty() {
        return LinearGrouping {
            group_size: 0,
            groups: Vec::new(),
            classes: Vec::new(),
            dropped: Vec::new(),
        };
    }
    let g = sorted.len().div_ceil(eps.inv() as usize + 1);
    let groups: Vec<Vec<Slice>> = sorted.chunks(g).map(|c| c.to_vec()).collect();
    let classes = groups
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, grp)| SliceClass {
            level: grp[0].level,
            group: j,
            rounded_length: grp[0].length,
            members: grp.clone(),
        })
        .collect();
    LinearGrouping {
        group_size: g,
        dropped: groups[0].clone(),
        groups,
        classes,
    }
}

/// `a / b` as an exact fraction, for callers comparing profits.
pub fn fraction(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b.max(1)))
}

/// Rounds a non-negative `v` down to the nearest integer.
pub fn floor_u64(v: &BigRational) -> u64 {
    v.floor().to_integer().to_u64().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_items, ThresholdPair};

    fn eps(m: u64) -> Eps {
        Eps::from_inverse(m).unwrap()
    }

    #[test]
    fn levels_at_eps_one() {
        let ls: Vec<u32> = [1, 2, 3, 4].iter().map(|&h| level_of(h, eps(1))).collect();
        assert_eq!(ls, vec![0, 1, 1, 2]);
        assert_eq!(level_of(1, eps(2)), 0);
        // 1.5^6 = 11.39, 1.5^7 = 17.09
        assert_eq!(level_count(16, eps(2)), 6);
    }

    #[test]
    fn grouping_keeps_skewed_only() {
        let pair = ThresholdPair::new(
            BigRational::new(1.into(), 5.into()),
            BigRational::new(1.into(), 20.into()),
        );
        let items = [
            Item::new(1, 30, 3, 1),
            Item::new(2, 30, 2, 1),
            Item::new(3, 3, 3, 1),
            Item::new(4, 2, 40, 1),
        ];
        let cl = classify_items(&items, &pair, 100);
        let g = group_by_dimension(&items, &cl, eps(1));
        assert_eq!(g.len(), 2);
        assert_eq!(
            g[0],
            DimensionClass {
                orientation: Orientation::Horizontal,
                level: 1,
                members: vec![1, 2]
            }
        );
        assert_eq!(
            g[1],
            DimensionClass {
                orientation: Orientation::Vertical,
                level: 1,
                members: vec![4]
            }
        );
    }

    #[test]
    fn full_level_estimate() {
        let code = encode_estimates(&[8], 8, eps(2), 16);
        // F = 6, so k = 8 * 4 * 6 * 2 / 8
        assert_eq!(code.decode(), vec![48, 0, 0, 0, 0, 0, 0]);
        assert_eq!(code.len(), 48 + 7);
        let zeros = encode_estimates(&[0, 0], 8, eps(2), 16);
        assert!(zeros.bits.iter().all(|&b| b));
    }

    #[test]
    fn slices_from_one_item() {
        let class = DimensionClass {
            orientation: Orientation::Horizontal,
            level: 0,
            members: vec![7],
        };
        let s = build_slices(
            &class,
            &[Item::new(7, 9, 3, 1)],
            &BigRational::from_integer(2.into()),
            eps(1),
        );
        assert_eq!(s.len(), 3);
        assert!(s
            .iter()
            .all(|x| x.profit == BigRational::one() && x.length == 9));
        assert!(build_slices(
            &class,
            &[Item::new(7, 9, 3, 1)],
            &BigRational::from_integer(0.into()),
            eps(1)
        )
        .is_empty());
    }

    #[test]
    fn narrowest_item_first() {
        let class = DimensionClass {
            orientation: Orientation::Horizontal,
            level: 0,
            members: vec![1, 2],
        };
        let items = [Item::new(1, 7, 1, 1), Item::new(2, 4, 1, 1)];
        let s = build_slices(&class, &items, &BigRational::one(), eps(1));
        assert_eq!(s.iter().map(|x| x.parent).collect::<Vec<_>>(), vec![2]);
    }

    fn unit_slices(lengths: &[i64]) -> Vec<Slice> {
        lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| Slice {
                parent: i as ItemId,
                index: 0,
                orientation: Orientation::Horizontal,
                level: 0,
                length: l,
                profit: BigRational::one(),
            })
            .collect()
    }

    #[test]
    fn grouping_ten_to_one() {
        let lg = linear_grouping(&unit_slices(&[10, 9, 8, 7, 6, 5, 4, 3, 2, 1]), eps(2));
        assert_eq!(lg.group_size, 4);
        assert_eq!(
            lg.dropped.iter().map(|s| s.length).collect::<Vec<_>>(),
            vec![10, 9, 8, 7]
        );
        let lens: Vec<(i64, usize)> = lg
            .classes
            .iter()
            .map(|c| (c.rounded_length, c.count()))
            .collect();
        assert_eq!(lens, vec![(6, 4), (2, 2)]);
    }

    #[test]
    fn single_slice_is_dropped() {
        let lg = linear_grouping(&unit_slices(&[5]), eps(2));
        assert!(lg.classes.is_empty());
        assert_eq!(lg.dropped.len(), 1);
    }
}
