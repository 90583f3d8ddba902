//! End-to-end run: reference solution, thresholds, classification,
//! corridor boxes, splitting, then either the coloring DP (few skewed items)
//! or the slice pipeline (many), and finally large and small items.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use geoknap::classify::{classify_items, select_threshold_pair, Classification, Label};
use geoknap::corridor::{nice_partition, split_into_lu, Corridor, SkewedPlacement, SplitMode};
use geoknap::dp::{
    color_items, coloring_family, solve_corridor, Coloring, DpCaps, DpError, DpResult,
    DEFAULT_MAX_K,
};
use geoknap::exact::{optimal_pack, ExactConfig};
use geoknap::geom::{index_items, rects_intersect, validate_packing, Orientation};
use geoknap::packers::{nfdh_unchecked, BoxRegion, Layout, NicePacking};
use geoknap::slices::{
    build_slices, encode_estimates, group_by_dimension, level_count, linear_grouping,
    partition_subcorridor, slices_to_items, SliceBox,
};
use geoknap::{Eps, Item, ItemId, Packing, Placement, Rect};
use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// Pick by comparing the number of skewed reference items with the
    /// threshold.
    Auto,
    Small,
    Large,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Auto => "auto",
            Branch::Small => "small",
            Branch::Large => "large",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub eps: Eps,
    pub seed: u64,
    pub caps: DpCaps,
    pub branch: Branch,
    /// The slice pipeline runs when the skewed reference items outnumber
    /// `threshold_constant * log2 N`.
    pub threshold_constant: f64,
    pub exact: ExactConfig,
    /// Random colorings tried per corridor when the color count is too big
    /// for a covering family.
    pub color_trials: u64,
    /// Subset checks allowed when building a covering family.
    pub family_budget: u64,
    /// Candidate items per corridor handed to the DP.
    pub max_candidates: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            eps: Eps::from_inverse(2).unwrap(),
            seed: 0,
            caps: DpCaps::default(),
            branch: Branch::Auto,
            threshold_constant: 1.0,
            exact: ExactConfig::default(),
            color_trials: 64,
            family_budget: 200_000,
            max_candidates: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageEntry {
    pub stage: &'static str,
    pub items: usize,
    pub profit: u64,
    pub note: String,
}

impl fmt::Display for StageEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} items {:>4}  profit {:>6}",
            self.stage, self.items, self.profit
        )?;
        if !self.note.is_empty() {
            write!(f, "  {}", self.note)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub packing: Packing,
    pub profit: u64,
    pub reference_profit: u64,
    /// The branch that ran, never `Auto`.
    pub branch: Branch,
    pub labels: Vec<(ItemId, Label)>,
    pub corridors: Vec<Corridor>,
    pub ledger: Vec<StageEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Budget,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("stage {stage}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub kind: FailureKind,
    pub message: String,
}

fn invalid(stage: &'static str, e: impl fmt::Display) -> PipelineError {
    PipelineError {
        stage,
        kind: FailureKind::Invalid,
        message: e.to_string(),
    }
}

fn budget(stage: &'static str, e: impl fmt::Display) -> PipelineError {
    PipelineError {
        stage,
        kind: FailureKind::Budget,
        message: e.to_string(),
    }
}

pub fn branch_threshold(side: i64, constant: f64) -> f64 {
    constant * (side.max(2) as f64).log2()
}

struct Ledger {
    entries: Vec<StageEntry>,
    profit_of: HashMap<ItemId, u64>,
}

impl Ledger {
    fn add(
        &mut self,
        stage: &'static str,
        ids: impl IntoIterator<Item = ItemId>,
        note: impl Into<String>,
    ) {
        let ids: Vec<ItemId> = ids.into_iter().collect();
        let profit = ids.iter().map(|id| self.profit_of[id]).sum();
        self.entries.push(StageEntry {
            stage,
            items: ids.len(),
            profit,
            note: note.into(),
        });
    }
}

pub fn run_pipeline(inst: &Instance, cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    let side = inst.side;
    let eps = cfg.eps;
    let mut ledger = Ledger {
        entries: Vec::new(),
        profit_of: inst.items.iter().map(|it| (it.id, it.profit)).collect(),
    };

    // reference solution; rotated items are swapped for the rest of the run
    let exact_cfg = ExactConfig {
        allow_rotation: inst.rotate,
        ..cfg.exact
    };
    let (reference, how) = match optimal_pack(&inst.items, side, &exact_cfg) {
        Ok(sol) => (sol.packing, "exact optimum"),
        Err(_) => {
            let shelves = nfdh_unchecked(&inst.items, BoxRegion::at_origin(side, side));
            (
                Packing {
                    side,
                    placements: shelves.placements,
                },
                "shelves, instance too large for the exact search",
            )
        }
    };
    let rotated: HashSet<ItemId> = reference
        .placements
        .iter()
        .filter(|p| p.rotated)
        .map(|p| p.item)
        .collect();
    let work: Vec<Item> = inst
        .items
        .iter()
        .map(|it| {
            if rotated.contains(&it.id) {
                Item::new(it.id, it.height, it.width, it.profit)
            } else {
                *it
            }
        })
        .collect();
    let by_id = index_items(&work);
    let ref_places: Vec<Placement> = reference
        .placements
        .iter()
        .map(|p| Placement::new(p.item, p.x, p.y))
        .collect();
    ledger.add("reference", ref_places.iter().map(|p| p.item), how);
    let reference_profit = ref_places.iter().map(|p| by_id[&p.item].profit).sum();

    let ref_items: Vec<Item> = ref_places.iter().map(|p| *by_id[&p.item]).collect();
    let (pair_index, pair) = select_threshold_pair(
        &ref_items,
        eps.at_most_half().map_err(|e| invalid("thresholds", e))?,
        side,
        inst.weighted,
    )
    .map_err(|e| invalid("thresholds", e))?;
    let classes = classify_items(&work, &pair, side);
    let label = |id: ItemId| classes.label(id).expect("every item is labelled");
    ledger.add(
        "thresholds",
        [],
        format!(
            "pair {pair_index}: large {} small {}",
            pair.large, pair.small
        ),
    );

    let mut skewed: Vec<SkewedPlacement> = Vec::new();
    let (mut large, mut small, mut dropped_mid) = (Vec::new(), Vec::new(), Vec::new());
    for p in &ref_places {
        let it = by_id[&p.item];
        match label(p.item) {
            Label::Horizontal | Label::Vertical => skewed.push(SkewedPlacement {
                id: p.item,
                rect: p.rect(it),
                orientation: if label(p.item) == Label::Horizontal {
                    Orientation::Horizontal
                } else {
                    Orientation::Vertical
                },
                profit: it.profit,
            }),
            Label::Large => large.push(*p),
            Label::Small => small.push(p.item),
            Label::Intermediate => dropped_mid.push(p.item),
        }
    }
    ledger.add("skewed", skewed.iter().map(|p| p.id), "");
    ledger.add("intermediate", dropped_mid.iter().copied(), "dropped");

    let others: Vec<Rect> = ref_places
        .iter()
        .filter(|p| !skewed.iter().any(|s| s.id == p.item))
        .map(|p| p.rect(by_id[&p.item]))
        .collect();
    let boxes = corridor_boxes(&skewed, &others);
    let mut corridors: Vec<(Corridor, Vec<SkewedPlacement>)> = Vec::new();
    let mut split_lost = Vec::new();
    for (r, its) in boxes {
        let c = Corridor::from_rect(&r, side).map_err(|e| invalid("corridors", e))?;
        let out =
            split_into_lu(&c, &its, SplitMode::Derandomized).map_err(|e| invalid("split", e))?;
        split_lost.extend(out.deleted.iter().map(|p| p.id));
        for k in out.corridors {
            let mine: Vec<SkewedPlacement> = out
                .retained
                .iter()
                .filter(|p| k.cells().contains_rect(&p.rect))
                .copied()
                .collect();
            corridors.push((k, mine));
        }
    }
    ledger.add(
        "corridors",
        corridors
            .iter()
            .flat_map(|(_, its)| its.iter().map(|p| p.id)),
        format!("{} boxes", corridors.len()),
    );
    ledger.add("split", split_lost, "deleted");

    let threshold = branch_threshold(side, cfg.threshold_constant);
    let branch = match cfg.branch {
        Branch::Auto if skewed.len() as f64 > threshold => Branch::Large,
        Branch::Auto => Branch::Small,
        b => b,
    };
    let mut placements = match branch {
        Branch::Large => {
            large_branch(&work, &classes, &skewed, &corridors, side, eps, &mut ledger)?
        }
        _ => small_branch(&work, &classes, &ref_places, &corridors, cfg, &mut ledger)?,
    };

    ledger.add(
        "large",
        large.iter().map(|p| p.item),
        "kept where the reference put them",
    );
    placements.extend(large);
    let filled = fill_small(&work, &classes, &mut placements, side);
    ledger.add("small", filled, format!("{} in the reference", small.len()));

    placements.sort_by_key(|p| p.item);
    for p in &mut placements {
        p.rotated = rotated.contains(&p.item);
    }
    let packing = Packing { side, placements };
    let report = validate_packing(&inst.items, &packing);
    if !report.valid() {
        return Err(invalid("validate", format!("{:?}", report.violations)));
    }
    let profit = packing.profit(&inst.items);
    ledger.add(
        "output",
        packing.item_ids(),
        format!("branch {}", branch.name()),
    );
    Ok(PipelineRun {
        packing,
        profit,
        reference_profit,
        branch,
        labels: classes.labels.clone(),
        corridors: corridors.into_iter().map(|(c, _)| c).collect(),
        ledger: ledger.entries,
    })
}

/// One box per skewed item, merged with same-orientation neighbours whose
/// long sides overlap while the bounding box stays at most half as thick as
/// it is long and meets nothing else.
pub fn corridor_boxes(
    skewed: &[SkewedPlacement],
    others: &[Rect],
) -> Vec<(Rect, Vec<SkewedPlacement>)> {
    let mut groups: Vec<(Rect, Orientation, Vec<SkewedPlacement>)> = skewed
        .iter()
        .map(|p| (p.rect, p.orientation, vec![*p]))
        .collect();
    loop {
        let mut merge = None;
        'search: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let (a, b) = (groups[i].0, groups[j].0);
                if groups[i].1 != groups[j].1 {
                    continue;
                }
                let bb = Rect::new(
                    a.x.min(b.x),
                    a.y.min(b.y),
                    a.x2().max(b.x2()) - a.x.min(b.x),
                    a.y2().max(b.y2()) - a.y.min(b.y),
                );
                let (long, thick, overlap) = match groups[i].1 {
                    Orientation::Horizontal => (bb.w, bb.h, a.x < b.x2() && b.x < a.x2()),
                    Orientation::Vertical => (bb.h, bb.w, a.y < b.y2() && b.y < a.y2()),
                };
                if !overlap || 2 * thick > long {
                    continue;
                }
                let blocked = groups
                    .iter()
                    .enumerate()
                    .any(|(k, g)| k != i && k != j && rects_intersect(&bb, &g.0))
                    || others.iter().any(|r| rects_intersect(&bb, r));
                if !blocked {
                    merge = Some((i, j, bb));
                    break 'search;
                }
            }
        }
        let Some((i, j, bb)) = merge else { break };
        let gj = groups.remove(j);
        groups[i].0 = bb;
        groups[i].2.extend(gj.2);
    }
    groups
        .into_iter()
        .map(|(r, _, mut its)| {
            its.sort_by_key(|p| p.id);
            (r, its)
        })
        .collect()
}

/// Every corridor asks the DP for as many items as the reference put there,
/// choosing among its own items and skewed items the reference left out.
fn small_branch(
    work: &[Item],
    classes: &Classification,
    ref_places: &[Placement],
    corridors: &[(Corridor, Vec<SkewedPlacement>)],
    cfg: &PipelineConfig,
    ledger: &mut Ledger,
) -> Result<Vec<Placement>, PipelineError> {
    let in_reference: HashSet<ItemId> = ref_places.iter().map(|p| p.item).collect();
    let mut pool: Vec<Item> = work
        .iter()
        .filter(|it| {
            !in_reference.contains(&it.id) && classes.label(it.id).is_some_and(Label::is_skewed)
        })
        .copied()
        .collect();
    pool.sort_by(|a, b| b.profit.cmp(&a.profit).then(a.id.cmp(&b.id)));
    let by_id = index_items(work);
    let mut used: HashSet<ItemId> = HashSet::new();
    let mut out = Vec::new();
    let (mut solved, mut fallback, mut colorings) = (0, 0, 0u64);
    for (c, own) in corridors {
        let gamma = own.len();
        if gamma == 0 {
            continue;
        }
        let bb = c.outer.bbox();
        let floor = own.iter().map(|p| p.profit).min().unwrap_or(0);
        let mut cands: Vec<Item> = own.iter().map(|p| *by_id[&p.id]).collect();
        for it in &pool {
            if cands.len() >= cfg.max_candidates.max(gamma) {
                break;
            }
            if !used.contains(&it.id) && it.profit >= floor && it.width <= bb.w && it.height <= bb.h
            {
                cands.push(*it);
            }
        }
        let tries: Vec<Coloring> = if gamma <= DEFAULT_MAX_K {
            match coloring_family(cands.len(), gamma, cfg.family_budget) {
                Ok(fam) => (0..fam.len()).map(|f| fam.coloring(f, &cands)).collect(),
                Err(_) => random_colorings(&cands, gamma, cfg),
            }
        } else {
            random_colorings(&cands, gamma, cfg)
        };
        let mut found = None;
        for col in tries {
            colorings += 1;
            match solve_corridor(c, &col.apply(&cands), gamma as u32, &cfg.caps) {
                Ok(rep) => {
                    if let DpResult::Success(ps) = rep.result {
                        found = Some(ps);
                        break;
                    }
                }
                Err(e @ DpError::BudgetExceeded { .. }) => return Err(budget("dp", e)),
                Err(e) => return Err(invalid("dp", e)),
            }
        }
        let ps = match found {
            Some(ps) => {
                solved += 1;
                ps
            }
            None => {
                fallback += 1;
                own.iter()
                    .map(|p| Placement::new(p.id, p.rect.x, p.rect.y))
                    .collect()
            }
        };
        used.extend(ps.iter().map(|p| p.item));
        out.extend(ps);
    }
    ledger.add(
        "dp",
        out.iter().map(|p| p.item),
        format!("{solved} corridors solved, {fallback} kept as in the reference, {colorings} colorings tried"),
    );
    Ok(out)
}

fn random_colorings(cands: &[Item], gamma: usize, cfg: &PipelineConfig) -> Vec<Coloring> {
    (0..cfg.color_trials)
        .map(|t| color_items(cands, gamma as u32, cfg.seed.wrapping_add(t)))
        .collect()
}

/// Slices decide how many items of every height (width) level to keep; the
/// corridors are cut into boxes and the kept items are assigned to the
/// stacked boxes, or the boxes keep their own items when that is better.
fn large_branch(
    work: &[Item],
    classes: &Classification,
    skewed: &[SkewedPlacement],
    corridors: &[(Corridor, Vec<SkewedPlacement>)],
    side: i64,
    eps: Eps,
    ledger: &mut Ledger,
) -> Result<Vec<Placement>, PipelineError> {
    let by_id = index_items(work);
    let opt_items: Vec<Item> = skewed.iter().map(|p| *by_id[&p.id]).collect();
    let dims = group_by_dimension(&opt_items, classes, eps);
    let levels = level_count(side, eps).max(1) as usize + 1;
    let mut selected: HashMap<Orientation, BTreeSet<ItemId>> = HashMap::new();
    let (mut code_bits, mut grouped_out) = (0, 0);
    for o in [Orientation::Horizontal, Orientation::Vertical] {
        let mut counts = vec![0u64; levels];
        for d in dims.iter().filter(|d| d.orientation == o) {
            counts[d.level as usize] += d.members.len() as u64;
        }
        let code = encode_estimates(&counts, skewed.len() as u64, eps, side);
        code_bits += code.len();
        let est = code.estimates();
        for d in dims.iter().filter(|d| d.orientation == o) {
            let slices = build_slices(d, work, &est[d.level as usize], eps);
            grouped_out += linear_grouping(&slices, eps).dropped.len();
            selected
                .entry(o)
                .or_default()
                .extend(slices.iter().map(|s| s.parent));
        }
    }
    ledger.add(
        "estimates",
        selected.values().flatten().copied(),
        format!("{code_bits} code bits, {grouped_out} slices in dropped groups"),
    );

    let mut packings: Vec<NicePacking> = Vec::new();
    let mut lost = Vec::new();
    for (c, its) in corridors {
        if its.is_empty() {
            continue;
        }
        let pieces = nice_partition(c, its).map_err(|e| invalid("boxes", e))?;
        for piece in &pieces {
            let mine: Vec<SkewedPlacement> = its
                .iter()
                .filter(|p| piece.cells.contains_rect(&p.rect))
                .copied()
                .collect();
            if mine.is_empty() {
                continue;
            }
            let res = partition_subcorridor(piece, &mine, eps);
            lost.extend(res.dropped);
            packings.extend(res.boxes);
        }
    }
    ledger.add(
        "boxes",
        packings.iter().flat_map(|p| p.item_ids()),
        format!("{} boxes, {} items lost", packings.len(), lost.len()),
    );

    let profit = |ps: &[Placement]| ps.iter().map(|p| by_id[&p.item].profit).sum::<u64>();
    let mut out = Vec::new();
    let mut notes = Vec::new();
    for o in [Orientation::Horizontal, Orientation::Vertical] {
        let stacked: Vec<&NicePacking> = packings
            .iter()
            .filter(|p| p.layout == Layout::Stacked(o))
            .collect();
        let own: Vec<Placement> = stacked
            .iter()
            .flat_map(|p| p.placements.iter().copied())
            .collect();
        let sboxes: Vec<SliceBox> = stacked
            .iter()
            .map(|p| match o {
                Orientation::Horizontal => SliceBox {
                    length: p.region.w,
                    capacity: p.region.h,
                },
                Orientation::Vertical => SliceBox {
                    length: p.region.h,
                    capacity: p.region.w,
                },
            })
            .collect();
        let cands: Vec<Item> = selected
            .get(&o)
            .into_iter()
            .flatten()
            .map(|id| *by_id[id])
            .collect();
        let a = slices_to_items(&cands, o, &sboxes);
        let assigned: Vec<Placement> = a
            .assigned
            .iter()
            .map(|&(id, b, off)| {
                let r: BoxRegion = stacked[b].region;
                match o {
                    Orientation::Horizontal => Placement::new(id, r.x, r.y + off),
                    Orientation::Vertical => Placement::new(id, r.x + off, r.y),
                }
            })
            .collect();
        let name = if o == Orientation::Horizontal {
            "horizontal"
        } else {
            "vertical"
        };
        if profit(&assigned) > profit(&own) {
            notes.push(format!("{name}: slice assignment"));
            out.extend(assigned);
        } else {
            notes.push(format!("{name}: box contents"));
            out.extend(own);
        }
    }
    for p in packings
        .iter()
        .filter(|p| !matches!(p.layout, Layout::Stacked(_)))
    {
        out.extend(p.placements.iter().copied());
    }
    ledger.add("assignment", out.iter().map(|p| p.item), notes.join(", "));
    Ok(out)
}

/// Bottom-left first fit of small items into the cells nothing covers.
fn fill_small(
    work: &[Item],
    classes: &Classification,
    placements: &mut Vec<Placement>,
    side: i64,
) -> Vec<ItemId> {
    if side > 512 {
        return Vec::new();
    }
    let by_id = index_items(work);
    let n = side as usize;
    let mut taken = vec![false; n * n];
    let mark = |r: &Rect, taken: &mut Vec<bool>| {
        for (x, y) in r.cells() {
            taken[y as usize * n + x as usize] = true;
        }
    };
    for p in placements.iter() {
        mark(&p.rect(by_id[&p.item]), &mut taken);
    }
    let placed: HashSet<ItemId> = placements.iter().map(|p| p.item).collect();
    let mut todo: Vec<&Item> = work
        .iter()
        .filter(|it| !placed.contains(&it.id) && classes.label(it.id) == Some(Label::Small))
        .collect();
    todo.sort_by(|a, b| {
        b.profit
            .cmp(&a.profit)
            .then(a.area().cmp(&b.area()))
            .then(a.id.cmp(&b.id))
    });
    let mut out = Vec::new();
    for it in todo {
        let spot = (0..=side - it.height)
            .flat_map(|y| (0..=side - it.width).map(move |x| (x, y)))
            .find(|&(x, y)| {
                Rect::new(x, y, it.width, it.height)
                    .cells()
                    .all(|(cx, cy)| !taken[cy as usize * n + cx as usize])
            });
        if let Some((x, y)) = spot {
            let p = Placement::new(it.id, x, y);
            mark(&p.rect(it), &mut taken);
            placements.push(p);
            out.push(it.id);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(side: i64, dims: &[(i64, i64)]) -> Instance {
        Instance::new(
            side,
            dims.iter()
                .enumerate()
                .map(|(i, &(w, h))| Item::new(i as u32, w, h, 1))
                .collect(),
        )
    }

    #[test]
    fn knapsack_sized_item_is_packed() {
        let run = run_pipeline(&inst(8, &[(8, 8)]), &PipelineConfig::default()).unwrap();
        assert_eq!(run.profit, 1);
        assert_eq!(run.packing.placements, vec![Placement::new(0, 0, 0)]);
    }

    #[test]
    fn both_branches_pack_skewed_items() {
        let i = inst(16, &[(12, 1), (10, 1), (9, 1), (1, 12), (1, 10), (14, 1)]);
        for branch in [Branch::Small, Branch::Large] {
            let cfg = PipelineConfig {
                branch,
                ..Default::default()
            };
            let run = run_pipeline(&i, &cfg).unwrap();
            assert_eq!(run.branch, branch);
            assert!(
                2 * run.profit >= run.reference_profit,
                "{branch:?}: {} of {}",
                run.profit,
                run.reference_profit
            );
            assert!(validate_packing(&i.items, &run.packing).valid());
        }
    }

    #[test]
    fn stacked_items_share_a_box() {
        let skewed: Vec<SkewedPlacement> = (0..3)
            .map(|k| SkewedPlacement {
                id: k,
                rect: Rect::new(0, k as i64, 10, 1),
                orientation: Orientation::Horizontal,
                profit: 1,
            })
            .collect();
        let boxes = corridor_boxes(&skewed, &[]);
        assert_eq!(boxes.len(), 1);
        assert_eq!(boxes[0].0, Rect::new(0, 0, 10, 3));
        // a blocker keeps the boxes apart
        let boxes = corridor_boxes(&skewed, &[Rect::new(9, 1, 1, 1)]);
        assert!(boxes.len() > 1);
    }

    #[test]
    fn runs_are_deterministic() {
        let i = inst(16, &[(12, 1), (10, 1), (1, 9), (1, 12), (3, 3)]);
        let a = run_pipeline(&i, &PipelineConfig::default()).unwrap();
        let b = run_pipeline(&i, &PipelineConfig::default()).unwrap();
        assert_eq!(a.packing, b.packing);
        assert_eq!(a.ledger, b.ledger);
    }
}
