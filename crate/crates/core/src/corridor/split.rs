use thiserror::Error;

use super::partition::piece_of_items;
use super::shape::shape_of;
use super::{
    classify_shape, is_acute, nice_partition, Corridor, CorridorError, PartitionError, ShapeClass,
    SkewedPlacement, Subcorridor,
};
use crate::polygon::{outline, OutlineError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    /// Try every admissible relabelling and offset, keep the cheapest.
    EnumerateOffsets,
    /// Relabel from the cheapest piece as in the counting argument.
    Derandomized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionPlan {
    /// Deleted piece indices, ascending.
    pub deleted: Vec<usize>,
    /// Which case of the analysis produced the plan.
    pub rule: &'static str,
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub pieces: Vec<Subcorridor>,
    pub plan: DeletionPlan,
    pub corridors: Vec<Corridor>,
    pub shapes: Vec<ShapeClass>,
    pub retained: Vec<SkewedPlacement>,
    pub deleted: Vec<SkewedPlacement>,
}

impl SplitOutcome {
    pub fn deleted_profit(&self) -> u64 {
        self.deleted.iter().map(|p| p.profit).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("cycle corridor with an odd number of pieces ({0})")]
    OddCycle(usize),
    #[error("no two consecutive acute pieces in a 10-piece cycle")]
    NoAcutePair,
    #[error("retained run has no simple outline: {0}")]
    Outline(#[from] OutlineError),
    #[error("retained run is not a corridor: {0}")]
    Corridor(#[from] CorridorError),
}

/// Deletes pieces so that every maximal run of retained pieces is a box, an
/// L or a U, and rebuilds each run as its own corridor.
pub fn split_into_lu(
    corridor: &Corridor,
    items: &[SkewedPlacement],
    mode: SplitMode,
) -> Result<SplitOutcome, SplitError> {
    let pieces = nice_partition(corridor, items)?;
    let homes = piece_of_items(&pieces, items);
    let s = pieces.len();
    let mut costs = vec![0u64; s];
    for (it, h) in items.iter().zip(&homes) {
        costs[h.expect("partition places every item")] += it.profit;
    }
    let acute: Vec<bool> = corridor.arms.iter().map(is_acute).collect();
    let plan = if corridor.is_cycle() {
        plan_cycle(&costs, &acute, mode)?
    } else {
        let shape = classify_shape(corridor, &pieces);
        if shape.is_box_l_or_u() {
            DeletionPlan {
                deleted: vec![],
                rule: "already box, L or U",
            }
        } else {
            let order: Vec<usize> = (0..s).collect();
            DeletionPlan {
                deleted: cheapest_mod3(&order, &costs).1,
                rule: "path, every third piece",
            }
        }
    };

    let mut is_deleted = vec![false; s];
    for &d in &plan.deleted {
        is_deleted[d] = true;
    }
    let (mut retained, mut deleted) = (Vec::new(), Vec::new());
    for (it, h) in items.iter().zip(&homes) {
        if is_deleted[h.unwrap()] {
            deleted.push(*it);
        } else {
            retained.push(*it);
        }
    }

    let corridors = if plan.deleted.is_empty() && !corridor.is_cycle() {
        vec![corridor.clone()]
    } else {
        runs(s, corridor.is_cycle(), &is_deleted)
            .into_iter()
            .map(|run| rebuild_run(corridor, &pieces, &run, &is_deleted))
            .collect::<Result<Vec<_>, _>>()?
    };
    let shapes = corridors.iter().map(shape_of).collect();
    Ok(SplitOutcome {
        pieces,
        plan,
        corridors,
        shapes,
        retained,
        deleted,
    })
}

/// Of the three residue classes of `order` positions (1-based, mod 3), the
/// cheapest; lowest residue wins ties. Returns (cost, deleted pieces).
fn cheapest_mod3(order: &[usize], costs: &[u64]) -> (u64, Vec<usize>) {
    (1..=3)
        .map(|alpha| {
            let mut set: Vec<usize> = order
                .iter()
                .enumerate()
                .filter(|(i, _)| (i + 1) % 3 == alpha % 3)
                .map(|(_, &p)| p)
                .collect();
            set.sort_unstable();
            (set.iter().map(|&p| costs[p]).sum::<u64>(), set)
        })
        .min_by_key(|(c, _)| *c)
        .unwrap()
}

fn argmin(costs: &[u64]) -> usize {
    (0..costs.len()).min_by_key(|&i| (costs[i], i)).unwrap()
}

/// Pieces relabelled so that `P_1` is piece `start`.
fn relabel(s: usize, start: usize) -> Vec<usize> {
    (0..s).map(|i| (start + i) % s).collect()
}

fn plan_cycle(costs: &[u64], acute: &[bool], mode: SplitMode) -> Result<DeletionPlan, SplitError> {
    let s = costs.len();
    if s % 2 == 1 || s < 4 {
        return Err(SplitError::OddCycle(s));
    }
    let cost_of = |set: &[usize]| set.iter().map(|&p| costs[p]).sum::<u64>();
    let starts: Vec<usize> = match mode {
        SplitMode::Derandomized => vec![argmin(costs)],
        SplitMode::EnumerateOffsets => (0..s).collect(),
    };
    let mut best: Option<(u64, Vec<usize>, &'static str)> = None;
    let mut consider = |set: Vec<usize>, rule: &'static str| {
        let c = cost_of(&set);
        if best.as_ref().is_none_or(|(bc, _, _)| c < *bc) {
            best = Some((c, set, rule));
        }
    };
    if s == 4 {
        for &p in &starts {
            consider(vec![p], "cycle of 4, cheapest piece");
        }
    } else if s >= 16 {
        for &p in &starts {
            let rest: Vec<usize> = relabel(s, p).into_iter().skip(1).collect();
            let (_, mut set) = cheapest_mod3(&rest, costs);
            set.push(p);
            set.sort_unstable();
            consider(set, "cheapest piece, then path rule");
        }
    } else if s % 3 == 0 {
        let (_, set) = cheapest_mod3(&relabel(s, 0), costs);
        consider(set, "cycle, every third piece");
    } else if s % 3 == 2 {
        for &p in &starts {
            let order = relabel(s, p);
            for alpha in 1..=3usize {
                let mut set: Vec<usize> = order
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (i + 1) % 3 == alpha % 3)
                    .map(|(_, &q)| q)
                    .collect();
                if alpha == 3 {
                    set.push(order[0]);
                }
                set.sort_unstable();
                consider(set, "cheapest piece doubled into the third class");
            }
        }
    } else {
        // the runs through P_s, P_1 have length three, so both must be acute
        let admissible: Vec<usize> = (0..s)
            .filter(|&p| acute[p] && acute[(p + s - 1) % s])
            .collect();
        if admissible.is_empty() {
            return Err(SplitError::NoAcutePair);
        }
        let tried: Vec<usize> = match mode {
            SplitMode::Derandomized => vec![admissible[0]],
            SplitMode::EnumerateOffsets => admissible,
        };
        for p in tried {
            let (_, set) = cheapest_mod3(&relabel(s, p), costs);
            consider(set, "cycle of 10, relabelled at an acute pair");
        }
    }
    let (_, deleted, rule) = best.unwrap();
    Ok(DeletionPlan { deleted, rule })
}

/// Maximal runs of retained pieces in corridor order.
fn runs(s: usize, cyclic: bool, deleted: &[bool]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if cyclic {
        let Some(first_del) = (0..s).find(|&i| deleted[i]) else {
            return vec![(0..s).collect()];
        };
        let mut cur = Vec::new();
        for i in 1..=s {
            let p = (first_del + i) % s;
            if deleted[p] {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            } else {
                cur.push(p);
            }
        }
    } else {
        let mut cur = Vec::new();
        for p in 0..s {
            if deleted[p] {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            } else {
                cur.push(p);
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

/// The run's cells, grown by each deleted neighbour's share of the shared
/// bend so the run ends in straight caps, traced into a path corridor.
fn rebuild_run(
    corridor: &Corridor,
    pieces: &[Subcorridor],
    run: &[usize],
    deleted: &[bool],
) -> Result<Corridor, SplitError> {
    let s = pieces.len();
    let mut cells = pieces[run[0]].cells.clone();
    for &p in &run[1..] {
        cells.union_with(&pieces[p].cells);
    }
    let first = run[0];
    let last = *run.last().unwrap();
    let prev = if first > 0 {
        Some(first - 1)
    } else {
        corridor.is_cycle().then(|| s - 1)
    };
    if let Some(d) = prev.filter(|&d| deleted[d]) {
        cells.union_with(&corridor.bend_cells(d).intersection(&pieces[d].cells));
    }
    if let Some(d) = corridor.next_arm(last).filter(|&d| deleted[d]) {
        cells.union_with(&corridor.bend_cells(last).intersection(&pieces[d].cells));
    }
    let poly = outline(&cells)?;
    Ok(Corridor::from_path_polygon(&poly, corridor.side)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod3_picks_cheapest_class() {
        let costs = [5, 1, 5, 5, 1, 5];
        let order: Vec<usize> = (0..6).collect();
        assert_eq!(cheapest_mod3(&order, &costs), (2, vec![1, 4]));
    }

    #[test]
    fn cycle_plans_on_uniform_costs() {
        for (s, expect) in [(4, 1), (6, 2), (8, 3), (10, 3), (12, 4), (14, 5), (16, 6)] {
            let costs = vec![1u64; s];
            let acute = vec![true; s];
            let plan = plan_cycle(&costs, &acute, SplitMode::Derandomized).unwrap();
            assert_eq!(plan.deleted.len(), expect, "s = {s}");
            let r = runs(s, true, &{
                let mut d = vec![false; s];
                plan.deleted.iter().for_each(|&p| d[p] = true);
                d
            });
            assert!(r.iter().all(|run| run.len() <= 3), "s = {s}: {r:?}");
        }
    }

    #[test]
    fn odd_cycle_rejected() {
        assert_eq!(
            plan_cycle(&[1; 5], &[true; 5], SplitMode::Derandomized),
            Err(SplitError::OddCycle(5))
        );
    }

    #[test]
    fn ten_cycle_needs_acute_pair() {
        let acute = [
            true, false, true, false, true, false, true, false, true, false,
        ];
        assert_eq!(
            plan_cycle(&[1; 10], &acute, SplitMode::Derandomized),
            Err(SplitError::NoAcutePair)
        );
    }

    #[test]
    fn path_runs() {
        assert_eq!(
            runs(5, false, &[false, true, false, false, true]),
            vec![vec![0], vec![2, 3]]
        );
        assert_eq!(
            runs(6, true, &[false, true, false, false, true, false]),
            vec![vec![2, 3], vec![5, 0]]
        );
    }
}
