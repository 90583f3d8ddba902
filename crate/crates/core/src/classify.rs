//! Item classes relative to a pair of thresholds `large > small`:
//! small, large, horizontal, vertical and intermediate. Thresholds are exact
//! rationals and scale with the knapsack side `N`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::eps::{Eps, EpsError};
use crate::geom::{Item, ItemId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdPair {
    pub large: BigRational,
    pub small: BigRational,
}

impl ThresholdPair {
    pub fn new(large: BigRational, small: BigRational) -> ThresholdPair {
        ThresholdPair { large, small }
    }

    /// `small <= eps^2 * large`
    pub fn is_separated(&self, eps: Eps) -> bool {
        let e = eps.to_big();
        self.small <= &e * &e * &self.large
    }
}

/// `side <= t * n`, by cross-multiplication.
pub fn le_fraction(side: i64, t: &BigRational, n: i64) -> bool {
    BigInt::from(side) * t.denom() <= t.numer() * BigInt::from(n)
}

/// The rule producing the next threshold of the chain from the current one:
/// `next = eps^power * current`. The default power is 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainRule {
    pub power: u32,
}

impl Default for ChainRule {
    fn default() -> Self {
        ChainRule { power: 3 }
    }
}

impl ChainRule {
    pub fn next(&self, eps: Eps, current: &BigRational) -> BigRational {
        let mut v = current.clone();
        for _ in 0..self.power {
            v /= BigInt::from(eps.inv());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Small,
    Large,
    Horizontal,
    Vertical,
    Intermediate,
}

impl Label {
    pub fn is_skewed(self) -> bool {
        matches!(self, Label::Horizontal | Label::Vertical)
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Small => "small",
            Label::Large => "large",
            Label::Horizontal => "horizontal",
            Label::Vertical => "vertical",
            Label::Intermediate => "intermediate",
        }
    }
}

pub fn label_item(item: &Item, pair: &ThresholdPair, n: i64) -> Label {
    let w_small = le_fraction(item.width, &pair.small, n);
    let h_small = le_fraction(item.height, &pair.small, n);
    let w_large = !le_fraction(item.width, &pair.large, n);
    let h_large = !le_fraction(item.height, &pair.large, n);
    match (w_small, h_small, w_large, h_large) {
        (true, true, _, _) => Label::Small,
        (_, _, true, true) => Label::Large,
        (_, true, true, _) => Label::Horizontal,
        (true, _, _, true) => Label::Vertical,
        _ => Label::Intermediate,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub pair: ThresholdPair,
    pub side: i64,
    /// In input order.
    pub labels: Vec<(ItemId, Label)>,
}

impl Classification {
    pub fn label(&self, id: ItemId) -> Option<Label> {
        self.labels.iter().find(|(i, _)| *i == id).map(|(_, l)| *l)
    }

    pub fn with_label(&self, label: Label) -> Vec<ItemId> {
        self.labels
            .iter()
            .filter(|(_, l)| *l == label)
            .map(|(i, _)| *i)
            .collect()
    }

    pub fn skewed(&self) -> Vec<ItemId> {
        self.labels
            .iter()
            .filter(|(_, l)| l.is_skewed())
            .map(|(i, _)| *i)
            .collect()
    }
}

pub fn classify_items(items: &[Item], pair: &ThresholdPair, n: i64) -> Classification {
    Classification {
        pair: pair.clone(),
        side: n,
        labels: items
            .iter()
            .map(|it| (it.id, label_item(it, pair, n)))
            .collect(),
    }
}

/// The `2/eps` consecutive pairs of the chain `eps, rule(eps), rule(rule(eps)), ...`.
pub fn candidate_threshold_pairs(eps: Eps) -> Result<Vec<ThresholdPair>, EpsError> {
    candidate_threshold_pairs_with(eps, ChainRule::default())
}

pub fn candidate_threshold_pairs_with(
    eps: Eps,
    rule: ChainRule,
) -> Result<Vec<ThresholdPair>, EpsError> {
    let eps = eps.at_most_half()?;
    let count = 2 * eps.inv() as usize;
    let mut chain = vec![eps.to_big()];
    for i in 0..count {
        let next = rule.next(eps, &chain[i]);
        chain.push(next);
    }
    Ok(chain
        .windows(2)
        .map(|w| ThresholdPair::new(w[0].clone(), w[1].clone()))
        .collect())
}

/// Total weight of items that are intermediate under `pair`.
pub fn intermediate_weight(items: &[Item], pair: &ThresholdPair, n: i64, weighted: bool) -> u64 {
    items
        .iter()
        .filter(|it| label_item(it, pair, n) == Label::Intermediate)
        .map(|it| if weighted { it.profit } else { 1 })
        .sum()
}

/// Picks the candidate pair with the fewest intermediate items (or least
/// intermediate profit when `weighted`), lowest index on ties. Returns the
/// index into `candidate_threshold_pairs` together with the pair.
pub fn select_threshold_pair(
    opt_items: &[Item],
    eps: Eps,
    n: i64,
    weighted: bool,
) -> Result<(usize, ThresholdPair), EpsError> {
    select_threshold_pair_with(opt_items, eps, n, weighted, ChainRule::default())
}

pub fn select_threshold_pair_with(
    opt_items: &[Item],
    eps: Eps,
    n: i64,
    weighted: bool,
    rule: ChainRule,
) -> Result<(usize, ThresholdPair), EpsError> {
    let pairs = candidate_threshold_pairs_with(eps, rule)?;
    let (idx, weight) = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| (i, intermediate_weight(opt_items, p, n, weighted)))
        .min_by_key(|&(i, w)| (w, i))
        .expect("at least one candidate pair");
    let total: u64 = opt_items
        .iter()
        .map(|it| if weighted { it.profit } else { 1 })
        .sum();
    // averaging over 2/eps pairs, each item hits at most two bands
    assert!(
        weight * eps.inv() <= total,
        "no candidate pair keeps the intermediate weight within eps: {weight} of {total}"
    );
    Ok((idx, pairs.into_iter().nth(idx).unwrap()))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(l: (i64, i64), s: (i64, i64)) -> ThresholdPair {
        ThresholdPair::new(ratio(l.0, l.1), ratio(s.0, s.1))
    }

    #[test]
    fn labels_at_fixed_thresholds() {
        let p = pair((1, 5), (1, 20));
        assert_eq!(
            label_item(&Item::new(1, 30, 3, 1), &p, 100),
            Label::Horizontal
        );
        assert_eq!(label_item(&Item::new(2, 3, 3, 1), &p, 100), Label::Small);
        assert_eq!(
            label_item(&Item::new(3, 10, 10, 1), &p, 100),
            Label::Intermediate
        );
        assert_eq!(
            label_item(&Item::new(4, 3, 30, 1), &p, 100),
            Label::Vertical
        );
        assert_eq!(label_item(&Item::new(5, 21, 21, 1), &p, 100), Label::Large);
        // boundaries: exactly eps_small*N is small, exactly eps_large*N is not large
        assert_eq!(label_item(&Item::new(6, 5, 5, 1), &p, 100), Label::Small);
        assert_eq!(
            label_item(&Item::new(7, 20, 1, 1), &p, 100),
            Label::Intermediate
        );
    }

    #[test]
    fn half_chain() {
        let pairs = candidate_threshold_pairs(Eps::from_inverse(2).unwrap()).unwrap();
        assert_eq!(pairs.len(), 4);
        assert_eq!(pairs[0], pair((1, 2), (1, 16)));
        assert_eq!(pairs[1], pair((1, 16), (1, 128)));
        assert_eq!(pairs[3].small, ratio(1, 8192));
    }

    #[test]
    fn quarter_chain_decreases() {
        let eps = Eps::from_inverse(4).unwrap();
        let pairs = candidate_threshold_pairs(eps).unwrap();
        assert_eq!(pairs.len(), 8);
        for w in pairs.windows(2) {
            assert!(w[1].large < w[0].large);
            assert_eq!(w[0].small, w[1].large);
        }
        assert!(pairs.iter().all(|p| p.is_separated(eps)));
    }

    #[test]
    fn rejects_large_eps() {
        assert!(candidate_threshold_pairs(Eps::from_inverse(1).unwrap()).is_err());
    }

    #[test]
    fn unit_item_picks_first_small_pair() {
        let eps = Eps::from_inverse(2).unwrap();
        let (idx, p) = select_threshold_pair(&[Item::new(1, 1, 1, 1)], eps, 16, false).unwrap();
        // 1 <= 16/16 so the item is small under the first pair already
        assert_eq!(idx, 0);
        assert_eq!(label_item(&Item::new(1, 1, 1, 1), &p, 16), Label::Small);
    }

    #[test]
    fn selector_avoids_populated_band() {
        let eps = Eps::from_inverse(2).unwrap();
        // band of pair 0 at N=64 is (4, 32]; fill it
        let items: Vec<Item> = (0..6).map(|i| Item::new(i, 5 + i as i64, 5, 1)).collect();
        let (idx, _) = select_threshold_pair(&items, eps, 64, false).unwrap();
        assert_ne!(idx, 0);
    }
}
