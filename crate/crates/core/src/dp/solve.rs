use std::collections::HashMap;

use super::DpError;
use crate::corridor::{ChordSides, Corridor, CorridorKind};
use crate::exact::{pack_all, Grid, OutOfBudget, Piece};
use crate::geom::{Item, ItemId, Placement, Rect};
use crate::polygon::CellSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpCaps {
    /// Long chords enumerated per corridor.
    pub chord_cap: usize,
    /// Items allowed to cross the middle chord of a cell.
    pub boundary_cap: usize,
    /// Cells evaluated before giving up.
    pub cell_budget: u64,
    /// Search nodes shared by all base cases.
    pub base_budget: u64,
    pub trace: bool,
}

impl Default for DpCaps {
    fn default() -> Self {
        DpCaps {
            chord_cap: 4096,
            boundary_cap: 8,
            cell_budget: 200_000,
            base_budget: 5_000_000,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpResult {
    Success(Vec<Placement>),
    Fail,
}

impl DpResult {
    pub fn is_success(&self) -> bool {
        matches!(self, DpResult::Success(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpReport {
    pub result: DpResult,
    pub cells: u64,
    pub chords: usize,
    /// One line per evaluated cell when tracing is on.
    pub trace: Vec<String>,
}

/// Whether one item of every color in `colors` (a bit mask) fits into the
/// free cells, by exhaustive search.
pub fn base_case_enumerate(
    free: &CellSet,
    items: &[(Item, u32)],
    colors: u32,
    budget: &mut u64,
) -> Result<Option<Vec<Placement>>, DpError> {
    if colors == 0 {
        return Ok(Some(Vec::new()));
    }
    let wanted: Vec<u32> = (0..32).filter(|c| colors >> c & 1 == 1).collect();
    let by_color: Vec<Vec<&Item>> = wanted
        .iter()
        .map(|&c| {
            items
                .iter()
                .filter(|(_, col)| *col == c)
                .map(|(it, _)| it)
                .collect()
        })
        .collect();
    if by_color.iter().any(|v| v.is_empty()) {
        return Ok(None);
    }
    let room = free.len() as i64;
    let mut pick = vec![0usize; wanted.len()];
    loop {
        let chosen: Vec<&Item> = pick
            .iter()
            .enumerate()
            .map(|(c, &i)| by_color[c][i])
            .collect();
        if chosen.iter().map(|it| it.area()).sum::<i64>() <= room {
            let pieces: Vec<Piece> = chosen.iter().map(|it| Piece::of(it, false)).collect();
            let mut grid = Grid::from_cells(free);
            match pack_all(&mut grid, &pieces, budget) {
                Ok(Some(p)) => return Ok(Some(p)),
                Ok(None) => {}
                Err(OutOfBudget) => return Err(DpError::BudgetExceeded { work: 0 }),
            }
        }
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

type Key = (usize, usize, Vec<Placement>, u32);

struct Solver<'a> {
    items: Vec<(Item, u32)>,
    by_id: HashMap<ItemId, Item>,
    sides: &'a ChordSides,
    caps: DpCaps,
    memo: HashMap<Key, Option<Vec<Placement>>>,
    cells: u64,
    base_budget: u64,
    trace: Vec<String>,
    min_area: Vec<i64>,
}

/// Rows of a cell set as bit masks.
fn rows_of(cells: &CellSet) -> Vec<u128> {
    let mut rows = vec![0u128; cells.side() as usize];
    for (x, y) in cells.iter() {
        rows[y as usize] |= 1 << x;
    }
    rows
}

fn span(x: i64, w: i64) -> u128 {
    ((1u128 << w) - 1) << x
}

fn cells_of(side: i64, r: &Rect) -> CellSet {
    CellSet::from_rect(side, r)
}

impl Solver<'_> {
    fn rect(&self, p: &Placement) -> Rect {
        p.rect(&self.by_id[&p.item])
    }

    fn region(&self, a: usize, b: usize) -> CellSet {
        self.sides.sides[b].difference(&self.sides.sides[a])
    }

    fn strictly_between(&self, a: usize, c: usize, b: usize) -> bool {
        let s = &self.sides.sides;
        let (la, lc, lb) = (s[a].len(), s[c].len(), s[b].len());
        la < lc && lc < lb && s[a].is_subset(&s[c]) && s[c].is_subset(&s[b])
    }

    fn need(&self, colors: u32) -> i64 {
        (1..32)
            .filter(|c| colors >> c & 1 == 1)
            .map(|c| self.min_area[c as usize])
            .sum()
    }

    fn solve(
        &mut self,
        a: usize,
        b: usize,
        boundary: &[Placement],
        colors: u32,
    ) -> Result<Option<Vec<Placement>>, DpError> {
        let region = self.region(a, b);
        let mut bnd: Vec<Placement> = boundary
            .iter()
            .filter(|p| {
                let r = self.rect(p);
                let hit = r.cells().any(|(x, y)| region.contains(x, y));
                hit
            })
            .copied()
            .collect();
        bnd.sort();
        let key = (a, b, bnd.clone(), colors);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        self.cells += 1;
        if self.cells > self.caps.cell_budget {
            return Err(DpError::BudgetExceeded { work: self.cells });
        }
        let mut free = region.clone();
        for p in &bnd {
            free.subtract(&cells_of(free.side(), &self.rect(p)));
        }
        let res = self.evaluate(a, b, &bnd, colors, &free)?;
        if self.caps.trace {
            let ids: Vec<ItemId> = bnd.iter().map(|p| p.item).collect();
            let verdict = if res.is_some() { "success" } else { "fail" };
            self.trace.push(format!(
                "cell {a} {b} boundary={ids:?} colors={colors:#b} -> {verdict}"
            ));
        }
        self.memo.insert(key, res.clone());
        Ok(res)
    }

    fn evaluate(
        &mut self,
        a: usize,
        b: usize,
        bnd: &[Placement],
        colors: u32,
        free: &CellSet,
    ) -> Result<Option<Vec<Placement>>, DpError> {
        if colors == 0 {
            return Ok(Some(Vec::new()));
        }
        if self.need(colors) > free.len() as i64 {
            return Ok(None);
        }
        let base = &self.sides.chords[a].depth;
        let mut middle: Vec<usize> = (0..self.sides.chords.len())
            .filter(|&c| self.strictly_between(a, c, b))
            .collect();
        middle.sort_by_key(|&c| {
            let off: i64 = self.sides.chords[c]
                .depth
                .iter()
                .zip(base)
                .map(|(x, y)| (x - y).abs())
                .sum();
            (off, c)
        });
        if middle.is_empty() {
            let items: Vec<(Item, u32)> = self
                .items
                .iter()
                .filter(|(_, c)| colors >> c & 1 == 1)
                .copied()
                .collect();
            let mut budget = self.base_budget;
            let r = base_case_enumerate(free, &items, colors, &mut budget);
            self.base_budget = budget;
            return r.map_err(|_| DpError::BudgetExceeded { work: self.cells });
        }
        let conclusive = colors.count_ones() as usize <= self.caps.boundary_cap;
        for c in middle {
            if let Some(sol) = self.split_at(a, b, c, bnd, colors, free)? {
                return Ok(Some(sol));
            }
            if conclusive {
                // every packing splits along c with at most |colors| items crossing it
                return Ok(None);
            }
        }
        Ok(None)
    }

    /// Tries every set of crossing items for middle chord `c` and every way
    /// to share the remaining colors between the two sides.
    fn split_at(
        &mut self,
        a: usize,
        b: usize,
        c: usize,
        bnd: &[Placement],
        colors: u32,
        free: &CellSet,
    ) -> Result<Option<Vec<Placement>>, DpError> {
        let side_c = &self.sides.sides[c];
        let free_rows = rows_of(free);
        let side_rows = rows_of(side_c);
        let n = free.side();
        let mut cands: Vec<(Placement, u32, Rect)> = Vec::new();
        for &(it, col) in &self.items {
            if colors >> col & 1 == 0 {
                continue;
            }
            for y in 0..=n - it.height {
                for x in 0..=n - it.width {
                    let m = span(x, it.width);
                    let rows = y as usize..(y + it.height) as usize;
                    if !free_rows[rows.clone()].iter().all(|r| r & m == m) {
                        continue;
                    }
                    let inside = side_rows[rows.clone()].iter().any(|r| r & m != 0);
                    let outside = side_rows[rows].iter().any(|r| !r & m != 0);
                    if inside && outside {
                        cands.push((
                            Placement::new(it.id, x, y),
                            col,
                            Rect::new(x, y, it.width, it.height),
                        ));
                    }
                }
            }
        }
        let left_free = free.intersection(side_c);
        let right_free = free.difference(side_c);
        let mut chosen: Vec<usize> = Vec::new();
        self.crossing_sets(
            a,
            b,
            c,
            bnd,
            colors,
            &cands,
            0,
            0,
            &mut chosen,
            &left_free,
            &right_free,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn crossing_sets(
        &mut self,
        a: usize,
        b: usize,
        c: usize,
        bnd: &[Placement],
        colors: u32,
        cands: &[(Placement, u32, Rect)],
        from: usize,
        used: u32,
        chosen: &mut Vec<usize>,
        left_free: &CellSet,
        right_free: &CellSet,
    ) -> Result<Option<Vec<Placement>>, DpError> {
        if let Some(sol) = self.try_sides(
            a,
            b,
            c,
            bnd,
            colors & !used,
            cands,
            chosen,
            left_free,
            right_free,
        )? {
            return Ok(Some(sol));
        }
        if chosen.len() >= self.caps.boundary_cap {
            return Ok(None);
        }
        for i in from..cands.len() {
            let (_, col, r) = cands[i];
            if used >> col & 1 == 1
                || chosen
                    .iter()
                    .any(|&j| cands[j].2.intersection(&r).is_some())
            {
                continue;
            }
            chosen.push(i);
            let res = self.crossing_sets(
                a,
                b,
                c,
                bnd,
                colors,
                cands,
                i + 1,
                used | 1 << col,
                chosen,
                left_free,
                right_free,
            );
            chosen.pop();
            if let Some(sol) = res? {
                return Ok(Some(sol));
            }
        }
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn try_sides(
        &mut self,
        a: usize,
        b: usize,
        c: usize,
        bnd: &[Placement],
        rest: u32,
        cands: &[(Placement, u32, Rect)],
        chosen: &[usize],
        left_free: &CellSet,
        right_free: &CellSet,
    ) -> Result<Option<Vec<Placement>>, DpError> {
        let side = left_free.side();
        let mut lf = left_free.clone();
        let mut rf = right_free.clone();
        for &i in chosen {
            let cells = cells_of(side, &cands[i].2);
            lf.subtract(&cells);
            rf.subtract(&cells);
        }
        let (room_l, room_r) = (lf.len() as i64, rf.len() as i64);
        let mut boundary: Vec<Placement> = bnd.to_vec();
        boundary.extend(chosen.iter().map(|&i| cands[i].0));
        // enumerate subsets of `rest` for the first-edge side
        let mut sub = rest;
        loop {
            let other = rest & !sub;
            if self.need(sub) <= room_l && self.need(other) <= room_r {
                if let Some(l) = self.solve(a, c, &boundary, sub)? {
                    if let Some(r) = self.solve(c, b, &boundary, other)? {
                        let mut sol: Vec<Placement> = chosen.iter().map(|&i| cands[i].0).collect();
                        sol.extend(l);
                        sol.extend(r);
                        return Ok(Some(sol));
                    }
                }
            }
            if sub == 0 {
                return Ok(None);
            }
            sub = (sub - 1) & rest;
        }
    }
}

/// Decides whether one item of each color `1..=gamma` can be packed into a
/// path corridor, recursing over pairs of non-crossing long chords from the
/// pair of boundary chords. Complete whenever `boundary_cap >= gamma`.
pub fn solve_corridor(
    corridor: &Corridor,
    items: &[(Item, u32)],
    gamma: u32,
    caps: &DpCaps,
) -> Result<DpReport, DpError> {
    if corridor.kind != CorridorKind::Path {
        return Err(DpError::NotPath);
    }
    assert!(gamma < 31, "at most 30 colors");
    if gamma == 0 {
        return Ok(DpReport {
            result: DpResult::Success(Vec::new()),
            cells: 0,
            chords: 0,
            trace: Vec::new(),
        });
    }
    let sides = ChordSides::build(corridor, caps.chord_cap);
    let all = corridor.cells();
    let root_a = sides.sides.iter().position(|s| s.is_empty());
    let root_b = sides.sides.iter().position(|s| s == all);
    let (Some(a), Some(b)) = (root_a, root_b) else {
        return Ok(DpReport {
            result: DpResult::Fail,
            cells: 0,
            chords: sides.chords.len(),
            trace: Vec::new(),
        });
    };
    let items: Vec<(Item, u32)> = items
        .iter()
        .filter(|(_, c)| (1..=gamma).contains(c))
        .copied()
        .collect();
    let mut min_area = vec![i64::MAX / 4; 32];
    for (it, c) in &items {
        min_area[*c as usize] = min_area[*c as usize].min(it.area());
    }
    let mut solver = Solver {
        by_id: items.iter().map(|(it, _)| (it.id, *it)).collect(),
        items,
        sides: &sides,
        caps: *caps,
        memo: HashMap::new(),
        cells: 0,
        base_budget: caps.base_budget,
        trace: Vec::new(),
        min_area,
    };
    let colors = ((1u32 << (gamma + 1)) - 1) & !1;
    let res = solver.solve(a, b, &[], colors)?;
    let result = match res {
        Some(mut p) => {
            p.sort_by_key(|p| p.item);
            DpResult::Success(p)
        }
        None => DpResult::Fail,
    };
    Ok(DpReport {
        result,
        cells: solver.cells,
        chords: sides.chords.len(),
        trace: solver.trace,
    })
}
