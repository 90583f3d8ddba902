//! Exhaustive solvers for tiny instances.
//!
//! Both solvers share one feasibility search: repeatedly take the lowest,
//! then leftmost, unresolved cell and either put the bottom-left corner of a
//! remaining item there or declare the cell empty. Every packing corresponds
//! to exactly one branch of that search, so it is complete without
//! enumerating coordinates explicitly.

use thiserror::Error;

use crate::geom::{Item, ItemId, Packing, Placement, Rect};
use crate::polygon::CellSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    pub max_items: usize,
    pub max_side: i64,
    pub allow_rotation: bool,
    /// Search nodes allowed before giving up.
    pub node_budget: u64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            max_items: 10,
            max_side: 16,
            allow_rotation: false,
            node_budget: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("search space of about {estimate} nodes is over budget")]
    BudgetRefused { estimate: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub profit: u64,
    pub packing: Packing,
}

/// Blocked-cell bitmap, at most 128 columns wide.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    w: i64,
    h: i64,
    rows: Vec<u128>,
    free: i64,
}

impl Grid {
    pub(crate) fn open(w: i64, h: i64) -> Grid {
        assert!((1..=128).contains(&w), "grid too wide");
        Grid {
            w,
            h,
            rows: vec![0; h.max(0) as usize],
            free: w * h,
        }
    }

    /// Grid over `[0, side)^2` where only `cells` are free.
    pub(crate) fn from_cells(cells: &CellSet) -> Grid {
        let side = cells.side();
        let mut g = Grid::open(side, side);
        for row in g.rows.iter_mut() {
            *row = Self::span(0, side);
        }
        g.free = 0;
        for (x, y) in cells.iter() {
            g.rows[y as usize] &= !(1u128 << x);
            g.free += 1;
        }
        g
    }

    fn span(x: i64, w: i64) -> u128 {
        if w >= 128 {
            u128::MAX
        } else {
            ((1u128 << w) - 1) << x
        }
    }

    pub(crate) fn block(&mut self, r: &Rect) {
        let m = Self::span(r.x, r.w);
        for row in &mut self.rows[r.y as usize..r.y2() as usize] {
            *row |= m;
        }
        self.free -= r.area();
    }

    fn unblock(&mut self, r: &Rect) {
        let m = Self::span(r.x, r.w);
        for row in &mut self.rows[r.y as usize..r.y2() as usize] {
            *row &= !m;
        }
        self.free += r.area();
    }
}

/// An item to place, with its allowed footprints.
#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub id: ItemId,
    pub dims: Vec<(i64, i64, bool)>,
}

impl Piece {
    pub(crate) fn of(item: &Item, rotate: bool) -> Piece {
        let mut dims = vec![(item.width, item.height, false)];
        if rotate && item.width != item.height {
            dims.push((item.height, item.width, true));
        }
        Piece { id: item.id, dims }
    }

    fn area(&self) -> i64 {
        self.dims[0].0 * self.dims[0].1
    }
}

pub(crate) struct OutOfBudget;

/// Places every piece in the free cells of `grid`, or proves it impossible.
///
/// Items are placed one at a time at every position where they fit. The
/// next item is always one with the fewest positions left, a branch dies as
/// soon as some item has none, and copies of the same item are placed in
/// increasing position order.
pub(crate) fn pack_all(
    grid: &mut Grid,
    pieces: &[Piece],
    budget: &mut u64,
) -> Result<Option<Vec<Placement>>, OutOfBudget> {
    let need: i64 = pieces.iter().map(Piece::area).sum();
    if need > grid.free {
        return Ok(None);
    }
    if pieces
        .iter()
        .any(|p| p.dims.iter().all(|&(w, h, _)| w > grid.w || h > grid.h))
    {
        return Ok(None);
    }
    let mut kinds: Vec<Kind> = Vec::new();
    for p in pieces {
        match kinds.iter_mut().find(|k| k.dims == p.dims) {
            Some(k) => k.ids.push(p.id),
            None => kinds.push(Kind {
                dims: p.dims.clone(),
                ids: vec![p.id],
                placed: 0,
                last: None,
            }),
        }
    }
    let mut out = Vec::with_capacity(pieces.len());
    let found = search(grid, &mut kinds, &mut out, need, budget)?;
    Ok(found.then_some(out))
}

/// Identical pieces, placed in id order.
struct Kind {
    dims: Vec<(i64, i64, bool)>,
    ids: Vec<ItemId>,
    placed: usize,
    /// Position key `(footprint, y, x)` of the last copy placed.
    last: Option<(usize, i64, i64)>,
}

impl Kind {
    fn left(&self) -> usize {
        self.ids.len() - self.placed
    }
}

/// Positions `(footprint, y, x)` where a copy of `kind` fits, after its
/// last placed copy.
fn positions(grid: &Grid, kind: &Kind) -> Vec<(usize, i64, i64)> {
    let mut out = Vec::new();
    let full = Grid::span(0, grid.w);
    for (d, &(w, h, _)) in kind.dims.iter().enumerate() {
        if w > grid.w || h > grid.h {
            continue;
        }
        let last_x = grid.w - w;
        for y in 0..=grid.h - h {
            let blocked = grid.rows[y as usize..(y + h) as usize]
                .iter()
                .fold(0u128, |acc, r| acc | r);
            let open = !blocked & full;
            // bit x survives when columns x..x+w are all open
            let mut starts = open;
            for k in 1..w {
                starts &= open >> k;
            }
            starts &= Grid::span(0, last_x + 1);
            while starts != 0 {
                let x = starts.trailing_zeros() as i64;
                starts &= starts - 1;
                let key = (d, y, x);
                if kind.last.is_none_or(|l| key > l) {
                    out.push(key);
                }
            }
        }
    }
    out
}

fn search(
    grid: &mut Grid,
    kinds: &mut [Kind],
    out: &mut Vec<Placement>,
    need: i64,
    budget: &mut u64,
) -> Result<bool, OutOfBudget> {
    if need == 0 {
        return Ok(true);
    }
    if *budget == 0 {
        return Err(OutOfBudget);
    }
    *budget -= 1;
    if need > grid.free {
        return Ok(false);
    }
    let mut best: Option<(usize, Vec<(usize, i64, i64)>)> = None;
    for (k, kind) in kinds.iter().enumerate() {
        if kind.left() == 0 {
            continue;
        }
        let ps = positions(grid, kind);
        if ps.is_empty() {
            return Ok(false);
        }
        if best.as_ref().is_none_or(|(_, b)| ps.len() < b.len()) {
            best = Some((k, ps));
        }
    }
    let (k, ps) = best.expect("some piece is left while area is needed");
    for key in ps {
        let (d, y, x) = key;
        let (w, h, rotated) = kinds[k].dims[d];
        let r = Rect::new(x, y, w, h);
        grid.block(&r);
        let prev = kinds[k].last.replace(key);
        let id = kinds[k].ids[kinds[k].placed];
        kinds[k].placed += 1;
        out.push(Placement {
            item: id,
            x,
            y,
            rotated,
        });
        if search(grid, kinds, out, need - w * h, budget)? {
            return Ok(true);
        }
        out.pop();
        kinds[k].placed -= 1;
        kinds[k].last = prev;
        grid.unblock(&r);
    }
    Ok(false)
}

fn estimate(n: usize, side: i64, rotate: bool) -> u128 {
    let per_item = (side * side) as u128 * if rotate { 2 } else { 1 } + 1;
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(per_item))
}

/// Maximum-profit packing into `[0, side)^2`. Among optimal subsets the one
/// with the lexicographically smallest sorted id list wins, and its witness
/// is the first one the search meets; both choices depend only on the
/// profit ranking, so scaling all profits keeps the witness.
pub fn optimal_pack(
    items: &[Item],
    side: i64,
    config: &ExactConfig,
) -> Result<ExactSolution, ExactError> {
    if items.len() > config.max_items || side > config.max_side || side > 128 {
        return Err(ExactError::BudgetRefused {
            estimate: estimate(items.len(), side, config.allow_rotation),
        });
    }
    let mut sorted: Vec<Item> = items.to_vec();
    sorted.sort_by_key(|it| it.id);
    let pieces: Vec<Piece> = sorted
        .iter()
        .map(|it| Piece::of(it, config.allow_rotation))
        .collect();
    let n = sorted.len();
    let fits_alone = |i: usize| {
        pieces[i]
            .dims
            .iter()
            .any(|&(w, h, _)| w <= side && h <= side)
    };
    let usable: u32 = (0..n).filter(|&i| fits_alone(i)).fold(0, |m, i| m | 1 << i);

    let mut subsets: Vec<u32> = (0u32..1 << n).filter(|s| s & !usable == 0).collect();
    let profit_of = |s: u32| {
        (0..n)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| sorted[i].profit)
            .sum::<u64>()
    };
    let ids_of = |s: u32| {
        (0..n)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| sorted[i].id)
            .collect::<Vec<_>>()
    };
    subsets.sort_by(|&a, &b| {
        profit_of(b)
            .cmp(&profit_of(a))
            .then_with(|| ids_of(a).cmp(&ids_of(b)))
    });

    let mut budget = config.node_budget;
    let mut infeasible: Vec<u32> = Vec::new();
    for s in subsets {
        if infeasible.iter().any(|&bad| bad & s == bad) {
            continue;
        }
        let chosen: Vec<Piece> = (0..n)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| pieces[i].clone())
            .collect();
        let mut grid = Grid::open(side, side);
        match pack_all(&mut grid, &chosen, &mut budget) {
            Ok(Some(mut placements)) => {
                placements.sort_by_key(|p| p.item);
                return Ok(ExactSolution {
                    profit: profit_of(s),
                    packing: Packing { side, placements },
                });
            }
            Ok(None) => infeasible.push(s),
            Err(OutOfBudget) => {
                return Err(ExactError::BudgetRefused {
                    estimate: estimate(n, side, config.allow_rotation),
                })
            }
        }
    }
    unreachable!("the empty subset is always feasible")
}

/// Whether one item of each color `1..=gamma` can be packed inside `region`.
/// Returns a witness on success.
pub fn rainbow_feasible(
    items: &[(Item, u32)],
    region: &CellSet,
    gamma: u32,
    config: &ExactConfig,
) -> Result<Option<Vec<Placement>>, ExactError> {
    if gamma == 0 {
        return Ok(Some(Vec::new()));
    }
    if items.len() > config.max_items || region.side() > config.max_side || region.side() > 128 {
        return Err(ExactError::BudgetRefused {
            estimate: estimate(gamma as usize, region.side(), config.allow_rotation),
        });
    }
    let by_color: Vec<Vec<&Item>> = (1..=gamma)
        .map(|c| {
            let mut v: Vec<&Item> = items
                .iter()
                .filter(|(_, col)| *col == c)
                .map(|(it, _)| it)
                .collect();
            v.sort_by_key(|it| it.id);
            v
        })
        .collect();
    if by_color.iter().any(|v| v.is_empty()) {
        return Ok(None);
    }
    let free = region.len() as i64;
    let mut budget = config.node_budget;
    let mut pick = vec![0usize; by_color.len()];
    loop {
        let chosen: Vec<&Item> = pick
            .iter()
            .enumerate()
            .map(|(c, &i)| by_color[c][i])
            .collect();
        if chosen.iter().map(|it| it.area()).sum::<i64>() <= free {
            let pieces: Vec<Piece> = chosen
                .iter()
                .map(|it| Piece::of(it, config.allow_rotation))
                .collect();
            let mut grid = Grid::from_cells(region);
            match pack_all(&mut grid, &pieces, &mut budget) {
                Ok(Some(mut w)) => {
                    w.sort_by_key(|p| p.item);
                    return Ok(Some(w));
                }
                Ok(None) => {}
                Err(OutOfBudget) => {
                    return Err(ExactError::BudgetRefused {
                        estimate: estimate(gamma as usize, region.side(), config.allow_rotation),
                    })
                }
            }
        }
        // next combination, last color fastest
        let mut c = pick.len();
        loop {
            if c == 0 {
                return Ok(None);
            }
            c -= 1;
            pick[c] += 1;
            if pick[c] < by_color[c].len() {
                break;
            }
            pick[c] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::validate_packing;

    #[test]
    fn knapsack_sized_item() {
        let sol = optimal_pack(&[Item::new(1, 5, 5, 7)], 5, &ExactConfig::default()).unwrap();
        assert_eq!(sol.profit, 7);
        assert_eq!(sol.packing.placements, vec![Placement::new(1, 0, 0)]);
    }

    #[test]
    fn domino_pair_fills_two_by_two() {
        let items = [Item::new(1, 2, 1, 1), Item::new(2, 1, 2, 1)];
        let sol = optimal_pack(&items, 2, &ExactConfig::default()).unwrap();
        // a 2x1 and a 1x2 cover 4 cells only if they overlap, so one is left out
        assert_eq!(sol.profit, 1);
        let cfg = ExactConfig {
            allow_rotation: true,
            ..Default::default()
        };
        assert_eq!(optimal_pack(&items, 2, &cfg).unwrap().profit, 2);
        let sq = [Item::new(1, 2, 1, 1), Item::new(2, 2, 1, 1)];
        assert_eq!(
            optimal_pack(&sq, 2, &ExactConfig::default())
                .unwrap()
                .profit,
            2
        );
    }

    #[test]
    fn oversized_item_gives_zero() {
        let sol = optimal_pack(&[Item::new(1, 6, 1, 3)], 5, &ExactConfig::default()).unwrap();
        assert_eq!(sol.profit, 0);
        assert!(sol.packing.placements.is_empty());
    }

    #[test]
    fn rotation_helps_when_allowed() {
        let items = [
            Item::new(1, 4, 1, 1),
            Item::new(2, 4, 1, 1),
            Item::new(3, 1, 3, 5),
        ];
        let side = 4;
        let fixed = optimal_pack(&items, side, &ExactConfig::default()).unwrap();
        let cfg = ExactConfig {
            allow_rotation: true,
            ..Default::default()
        };
        let rot = optimal_pack(&items, side, &cfg).unwrap();
        assert!(rot.profit >= fixed.profit);
        assert!(validate_packing(&items, &rot.packing).valid());
    }

    #[test]
    fn refuses_large_instances() {
        let items: Vec<Item> = (0..11).map(|i| Item::new(i, 1, 1, 1)).collect();
        assert!(matches!(
            optimal_pack(&items, 4, &ExactConfig::default()),
            Err(ExactError::BudgetRefused { .. })
        ));
    }

    #[test]
    fn rainbow_basics() {
        let region = CellSet::from_rect(4, &Rect::new(0, 0, 4, 1));
        let cfg = ExactConfig::default();
        assert_eq!(
            rainbow_feasible(&[], &region, 0, &cfg).unwrap(),
            Some(vec![])
        );
        let one = [(Item::new(1, 3, 1, 1), 1)];
        assert!(rainbow_feasible(&one, &region, 1, &cfg).unwrap().is_some());
        let same = [(Item::new(1, 1, 1, 1), 1), (Item::new(2, 1, 1, 1), 1)];
        assert!(rainbow_feasible(&same, &region, 2, &cfg).unwrap().is_none());
        let end_to_end = [(Item::new(1, 1, 1, 1), 1), (Item::new(2, 3, 1, 1), 2)];
        let w = rainbow_feasible(&end_to_end, &region, 2, &cfg)
            .unwrap()
            .unwrap();
        assert_eq!(w.len(), 2);
    }
}
