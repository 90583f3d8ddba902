//! Color coding and the long-chord dynamic program that packs one item of
//! every color into a path corridor.

mod solve;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use solve::{base_case_enumerate, solve_corridor, DpCaps, DpReport, DpResult};

use crate::geom::{Item, ItemId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("budget exceeded after {work} steps")]
    BudgetExceeded { work: u64 },
    #[error("k = {k} is above the supported maximum {max}")]
    TooManyColors { k: usize, max: usize },
    #[error("the dynamic program handles path corridors only")]
    NotPath,
}

/// Colors `1..=gamma` for a set of items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub gamma: u32,
    pub seed: Option<u64>,
    pub colors: BTreeMap<ItemId, u32>,
}

impl Coloring {
    pub fn color(&self, id: ItemId) -> Option<u32> {
        self.colors.get(&id).copied()
    }

    /// True iff the items carry pairwise distinct colors.
    pub fn is_rainbow(&self, ids: &[ItemId]) -> bool {
        let mut seen = 0u64;
        ids.iter().all(|id| match self.color(*id) {
            Some(c) if seen >> c & 1 == 0 => {
                seen |= 1 << c;
                true
            }
            _ => false,
        })
    }

    /// Items paired with their colors, in input order.
    pub fn apply(&self, items: &[Item]) -> Vec<(Item, u32)> {
        items
            .iter()
            .filter_map(|it| self.color(it.id).map(|c| (*it, c)))
            .collect()
    }
}

/// Independent uniform colors, reproducible from the seed.
pub fn color_items(items: &[Item], gamma: u32, seed: u64) -> Coloring {
    assert!(gamma >= 1, "need at least one color");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<ItemId> = items.iter().map(|it| it.id).collect();
    ids.sort();
    let colors = ids
        .into_iter()
        .map(|id| (id, rng.gen_range(1..=gamma)))
        .collect();
    Coloring {
        gamma,
        seed: Some(seed),
        colors,
    }
}

/// Colorings of `0..n` such that every `k`-subset is rainbow under at least
/// one of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringFamily {
    pub n: usize,
    pub k: usize,
    /// `members[f][e]` is the color of element `e` under coloring `f`.
    pub members: Vec<Vec<u32>>,
}

impl ColoringFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn covers(&self, subset: &[usize]) -> bool {
        self.members.iter().any(|f| {
            let mut seen = 0u64;
            subset.iter().all(|&e| {
                let bit = 1u64 << f[e];
                let fresh = seen & bit == 0;
                seen |= bit;
                fresh
            })
        })
    }

    /// Colors the items in id order with member `f`.
    pub fn coloring(&self, f: usize, items: &[Item]) -> Coloring {
        let mut ids: Vec<ItemId> = items.iter().map(|it| it.id).collect();
        ids.sort();
        let colors = ids
            .into_iter()
            .zip(&self.members[f])
            .map(|(id, &c)| (id, c))
            .collect();
        Coloring {
            gamma: self.k as u32,
            seed: None,
            colors,
        }
    }
}

pub const DEFAULT_MAX_K: usize = 6;

/// Builds a family greedily: each new coloring starts from an uncovered
/// subset, absorbs every further uncovered subset that can still be made
/// rainbow, and colors untouched elements 1. `budget` bounds the number of
/// subset checks.
pub fn coloring_family(n: usize, k: usize, budget: u64) -> Result<ColoringFamily, DpError> {
    if k > DEFAULT_MAX_K {
        return Err(DpError::TooManyColors {
            k,
            max: DEFAULT_MAX_K,
        });
    }
    if k == 0 || k > n {
        return Ok(ColoringFamily {
            n,
            k,
            members: vec![vec![1; n]],
        });
    }
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        subsets.push(cur.clone());
        if subsets.len() as u64 > budget {
            return Err(DpError::BudgetExceeded {
                work: subsets.len() as u64,
            });
        }
        // next k-combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }

    let mut work = 0u64;
    let mut uncovered = vec![true; subsets.len()];
    let mut members = Vec::new();
    while let Some(start) = uncovered.iter().position(|&u| u) {
        let mut color = vec![0u32; n];
        let mut used = 0u64;
        for (c, &e) in subsets[start].iter().enumerate() {
            color[e] = c as u32 + 1;
            used |= 1 << (c + 1);
        }
        for (si, s) in subsets.iter().enumerate() {
            if !uncovered[si] || si == start {
                continue;
            }
            work += 1;
            if work > budget {
                return Err(DpError::BudgetExceeded { work });
            }
            // colored members must be distinct; fresh colors for the rest
            let mut seen = 0u64;
            let mut ok = true;
            let mut fresh = Vec::new();
            for &e in s {
                if color[e] == 0 {
                    fresh.push(e);
                } else if seen >> color[e] & 1 == 1 {
                    ok = false;
                    break;
                } else {
                    seen |= 1 << color[e];
                }
            }
            let free: Vec<u32> = (1..=k as u32)
                .filter(|c| (seen | used) >> c & 1 == 0)
                .collect();
            let spare: Vec<u32> = (1..=k as u32).filter(|c| seen >> c & 1 == 0).collect();
            if !ok || spare.len() < fresh.len() {
                continue;
            }
            // prefer colors not yet handed out so later subsets stay feasible
            let mut pool = free.clone();
            pool.extend(spare.iter().filter(|c| !free.contains(c)));
            for (e, c) in fresh.iter().zip(pool) {
                color[*e] = c;
                used |= 1 << c;
            }
        }
        for c in color.iter_mut() {
            if *c == 0 {
                *c = 1;
            }
        }
        let fam = ColoringFamily {
            n,
            k,
            members: vec![color.clone()],
        };
        for (si, s) in subsets.iter().enumerate() {
            if uncovered[si] && fam.covers(s) {
                uncovered[si] = false;
            }
        }
        members.push(color);
    }
    Ok(ColoringFamily { n, k, members })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    #[test]
    fn same_seed_same_colors() {
        let items: Vec<Item> = (0..20).map(|i| Item::new(i, 1, 1, 1)).collect();
        assert_eq!(color_items(&items, 3, 9), color_items(&items, 3, 9));
        let one = color_items(&items, 1, 4);
        assert!(one.colors.values().all(|&c| c == 1));
    }

    #[test]
    fn family_covers_pairs_of_four() {
        let fam = coloring_family(4, 2, 10_000).unwrap();
        assert!(all_subsets(4, 2).iter().all(|s| fam.covers(s)));
    }

    #[test]
    fn family_edge_cases() {
        assert_eq!(coloring_family(5, 1, 100).unwrap().len(), 1);
        let fam = coloring_family(4, 4, 100).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(fam.covers(&[0, 1, 2, 3]));
        assert!(matches!(
            coloring_family(9, 7, 100),
            Err(DpError::TooManyColors { .. })
        ));
        assert!(matches!(
            coloring_family(30, 5, 10),
            Err(DpError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn family_covers_small_cases() {
        for n in 1..=8 {
            for k in 1..=4.min(n) {
                let fam = coloring_family(n, k, 1_000_000).unwrap();
                for s in all_subsets(n, k) {
                    assert!(fam.covers(&s), "n={n} k={k} {s:?}");
                }
            }
        }
    }
}
