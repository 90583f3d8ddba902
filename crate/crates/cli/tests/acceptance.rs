//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use geoknap::corridor::synth::{fill_arms, random_dp_instance, staircase_ring};
use geoknap::corridor::{split_into_lu, Corridor, SplitMode};
use geoknap::dp::{color_items, coloring_family, solve_corridor, DpCaps, DpError, DpResult};
use geoknap::exact::{optimal_pack, rainbow_feasible, ExactConfig};
use geoknap::geom::{validate_packing, Orientation, Placement};
use geoknap::packers::{nfdh, nfdh_unchecked, steinberg, BoxRegion};
use geoknap::slices::{encode_estimates, level_count, linear_grouping, slice_profit, Slice};
use geoknap::{Eps, Item, Packing};
use geoknap_cli::{bench, run_pipeline, skewed_batch, Branch, Instance, PipelineConfig};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nfdh_area_bound() -> Outcome {
    let started = Instant::now();
    let mut r = rng(1);
    for trial in 0..1000u64 {
        let m: i64 = if trial % 2 == 0 { 4 } else { 10 };
        let w = r.gen_range(m..=200);
        let h = r.gen_range(m..=200);
        let n = r.gen_range(0..=150);
        let items: Vec<Item> = (0..n)
            .map(|i| Item::new(i, r.gen_range(1..=w / m), r.gen_range(1..=h / m), 1))
            .collect();
        let p = nfdh(
            &items,
            BoxRegion::at_origin(w, h),
            Eps::from_inverse(m as u64).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        ensure(p.validate(&items).valid(), || {
            format!("trial {trial}: invalid packing")
        })?;
        let packed: i64 = p
            .placements
            .iter()
            .map(|pl| items[pl.item as usize].area())
            .sum();
        let total: i64 = items.iter().map(Item::area).sum();
        ensure(packed * m >= (total * m).min((m - 2) * w * h), || {
            format!("trial {trial}: packed {packed} of {total} in {w}x{h}, eps 1/{m}")
        })?;
    }
    let t = started.elapsed();
    ensure(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("1000 instances in {:.2?}", t))
}

fn linear_grouping_rounds() -> Outcome {
    let mut r = rng(2);
    for trial in 0..500 {
        let m = r.gen_range(1..=10u64);
        let eps = Eps::from_inverse(m).unwrap();
        let level = r.gen_range(0..6);
        let n = r.gen_range(0..300);
        let slices: Vec<Slice> = (0..n)
            .map(|i| Slice {
                parent: i,
                index: 0,
                orientation: Orientation::Horizontal,
                level,
                length: r.gen_range(1..=64),
                profit: slice_profit(level, eps),
            })
            .collect();
        let g = linear_grouping(&slices, eps);
        let distinct: BTreeSet<i64> = g.classes.iter().map(|c| c.rounded_length).collect();
        ensure(distinct.len() as u64 <= m, || {
            format!("trial {trial}: {} lengths for eps 1/{m}", distinct.len())
        })?;
        let profit = |s: &[Slice]| s.iter().map(|s| s.profit.clone()).sum::<BigRational>();
        let total = profit(&slices);
        let group_worth = g
            .groups
            .iter()
            .map(|grp| profit(grp))
            .max()
            .unwrap_or_default();
        let allowance = total * BigRational::new(1.into(), (m as i64).into()) + group_worth;
        ensure(profit(&g.dropped) <= allowance, || {
            format!("trial {trial}: dropped too much")
        })?;
        for c in &g.classes {
            let prev_min = g.groups[c.group - 1]
                .iter()
                .map(|s| s.length)
                .min()
                .unwrap();
            ensure(c.rounded_length <= prev_min, || {
                format!("trial {trial}: class {} not dominated", c.group)
            })?;
            ensure(
                c.members.iter().all(|s| s.length <= c.rounded_length),
                || format!("trial {trial}: rounded down"),
            )?;
        }
        let kept: usize = g.classes.iter().map(|c| c.count()).sum();
        ensure(kept + g.dropped.len() == slices.len(), || {
            format!("trial {trial}: slices lost")
        })?;
    }
    Ok("500 multisets".into())
}

fn estimate_encoding() -> Outcome {
    let mut r = rng(3);
    let mut cases = 0;
    for n in [16i64, 64, 256] {
        for _ in 0..300 {
            let m = r.gen_range(1..=8u64);
            let eps = Eps::from_inverse(m).unwrap();
            let f = level_count(n, eps).max(1) as usize;
            let draw =
                |r: &mut ChaCha8Rng| -> Vec<u64> { (0..=f).map(|_| r.gen_range(0..50)).collect() };
            let horizontal = draw(&mut r);
            let vertical = draw(&mut r);
            let opt = horizontal.iter().chain(&vertical).sum::<u64>() + r.gen_range(0..30);
            let mut under = BigRational::default();
            for counts in [&horizontal, &vertical] {
                let code = encode_estimates(counts, opt, eps, n);
                let bound = 4 * f as u64 * m + f as u64 + 1;
                ensure(code.len() as u64 <= bound, || {
                    format!("N {n}, eps 1/{m}: {} bits > {bound}", code.len())
                })?;
                let ks = code.decode();
                ensure(ks.len() == f + 1, || {
                    format!("N {n}: decoded {} levels", ks.len())
                })?;
                // unary re-encoding of the decoded multipliers gives back the bits
                let again: Vec<bool> = ks
                    .iter()
                    .flat_map(|&k| std::iter::repeat_n(false, k as usize).chain([true]))
                    .collect();
                ensure(again == code.bits, || format!("N {n}: round trip"))?;
                for (e, &c) in code.estimates().iter().zip(counts.iter()) {
                    let c = BigRational::from_integer(c.into());
                    ensure(e <= &c, || format!("N {n}: estimate above count"))?;
                    under += c - e;
                }
            }
            let allowance = BigRational::new(opt.into(), m.into());
            ensure(under <= allowance, || {
                format!("N {n}, eps 1/{m}: underestimate {under} > {allowance}")
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} count vectors"))
}

fn dp_matches_oracle() -> Outcome {
    let started = Instant::now();
    let caps = DpCaps::default();
    let (mut finished, mut feasible) = (0, 0);
    for seed in 0..200u64 {
        let (corridor, items, gamma) = random_dp_instance(&mut rng(seed), 12, 3, 8, 4);
        let oracle = rainbow_feasible(&items, corridor.cells(), gamma, &ExactConfig::default())
            .map_err(|e| format!("seed {seed}: oracle {e}"))?;
        match solve_corridor(&corridor, &items, gamma, &caps) {
            Err(DpError::BudgetExceeded { .. }) => continue,
            Err(e) => return Err(format!("seed {seed}: {e}")),
            Ok(rep) => {
                finished += 1;
                ensure(rep.result.is_success() == oracle.is_some(), || {
                    format!("seed {seed}: verdicts differ")
                })?;
                if let DpResult::Success(p) = &rep.result {
                    feasible += 1;
                    witness_ok(&corridor, &items, gamma, p)
                        .map_err(|e| format!("seed {seed}: {e}"))?;
                }
            }
        }
    }
    ensure(finished * 100 >= 95 * 200, || {
        format!("only {finished} of 200 terminated")
    })?;
    let t = started.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!(
        "{finished}/200 terminated, all agree, {feasible} feasible, {t:.2?}"
    ))
}

fn witness_ok(
    corridor: &Corridor,
    items: &[(Item, u32)],
    gamma: u32,
    placements: &[Placement],
) -> Result<(), String> {
    let mut colors = BTreeSet::new();
    let mut rects = Vec::new();
    for p in placements {
        let (it, c) = items
            .iter()
            .find(|(it, _)| it.id == p.item)
            .ok_or("unknown item")?;
        let r = p.rect(it);
        ensure(corridor.cells().contains_rect(&r), || {
            format!("item {} leaves the corridor", it.id)
        })?;
        ensure(colors.insert(*c), || format!("color {c} twice"))?;
        rects.push(r);
    }
    ensure(colors == (1..=gamma).collect(), || "colors missing".into())?;
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            ensure(rects[i].intersection(&rects[j]).is_none(), || {
                "overlap".into()
            })?;
        }
    }
    Ok(())
}

fn split_retention() -> Outcome {
    let bounds = [
        (4usize, 1u64, 4u64),
        (6, 1, 3),
        (8, 3, 8),
        (10, 1, 3),
        (12, 1, 3),
        (14, 5, 14),
        (16, 3, 8),
    ];
    let mut lost_fractions = Vec::new();
    for (s, num, den) in bounds {
        let (outer, inner) = staircase_ring(s, 8, 248, 40, 2);
        let c = Corridor::from_cycle(&outer, &inner, 256).map_err(|e| format!("s = {s}: {e}"))?;
        let items = fill_arms(&c, 2, 33, 0);
        let out = split_into_lu(&c, &items, SplitMode::Derandomized)
            .map_err(|e| format!("s = {s}: {e}"))?;
        let lost = out.deleted.len() as u64;
        ensure(lost * den <= num * items.len() as u64, || {
            format!("s = {s}: lost {lost} of {}", items.len())
        })?;
        ensure(out.shapes.iter().all(|sh| sh.is_box_l_or_u()), || {
            format!("s = {s}: {:?}", out.shapes)
        })?;
        lost_fractions.push(format!("s{s} {lost}/{}", items.len()));
    }
    Ok(lost_fractions.join(", "))
}

fn coloring() -> Outcome {
    let items: Vec<Item> = (0..3).map(|i| Item::new(i, 1, 1, 1)).collect();
    let trials = 100_000u64;
    let hits = (0..trials)
        .filter(|&s| color_items(&items, 3, s).is_rainbow(&[0, 1, 2]))
        .count();
    let rate = hits as f64 / trials as f64;
    ensure((rate - 2.0 / 9.0).abs() <= 0.02, || {
        format!("rainbow rate {rate:.4}")
    })?;
    let mut families = 0;
    for n in 1..=8usize {
        for k in 1..=4usize.min(n) {
            let fam = coloring_family(n, k, 1_000_000).map_err(|e| e.to_string())?;
            for mask in 0u32..1 << n {
                if mask.count_ones() as usize == k {
                    let subset: Vec<usize> = (0..n).filter(|&e| mask >> e & 1 == 1).collect();
                    ensure(fam.covers(&subset), || {
                        format!("n {n} k {k}: {subset:?} uncovered")
                    })?;
                }
            }
            families += 1;
        }
    }
    Ok(format!(
        "rainbow rate {rate:.4} vs 0.2222, {families} families cover"
    ))
}

fn skewed_bench() -> Outcome {
    let batch = skewed_batch(0, 50, 16, 8);
    let cfg = PipelineConfig::default();
    let report = bench(&batch, &cfg, &[0]);
    print!("{}", report.render(false));
    ensure(report.failures() == 0, || {
        format!("{} rows failed", report.failures())
    })?;
    for row in &report.rows {
        ensure(2 * row.profit >= row.optimum, || {
            format!("{}: {} vs optimum {}", row.id, row.profit, row.optimum)
        })?;
    }
    for (id, inst) in &batch {
        for branch in [Branch::Auto, Branch::Small, Branch::Large] {
            let run = run_pipeline(
                inst,
                &PipelineConfig {
                    branch,
                    ..cfg.clone()
                },
            )
            .map_err(|e| format!("{id}: {e}"))?;
            ensure(validate_packing(&inst.items, &run.packing).valid(), || {
                format!("{id}: invalid packing")
            })?;
            ensure(run.packing.profit(&inst.items) == run.profit, || {
                format!("{id}: profit mismatch")
            })?;
        }
    }
    Ok(format!(
        "max ratio {:.3}, mean {:.3}",
        report.max_ratio().unwrap_or(1.0),
        report.mean_ratio().unwrap_or(1.0)
    ))
}

fn profit(items: &[Item], placements: &[Placement]) -> u64 {
    placements
        .iter()
        .map(|p| {
            items
                .iter()
                .find(|it| it.id == p.item)
                .map_or(0, |it| it.profit)
        })
        .sum()
}

fn exact_consistency() -> Outcome {
    let mut r = rng(8);
    let cfg = ExactConfig::default();
    let mut compared = 0;
    for trial in 0..150 {
        let side = r.gen_range(2..=8i64);
        let n = r.gen_range(0..=7u32);
        let items: Vec<Item> = (0..n)
            .map(|i| {
                Item::new(
                    i + 1,
                    r.gen_range(1..=side),
                    r.gen_range(1..=side),
                    r.gen_range(1..=20),
                )
            })
            .collect();
        let sol = optimal_pack(&items, side, &cfg).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(validate_packing(&items, &sol.packing).valid(), || {
            format!("trial {trial}: invalid optimum")
        })?;
        let region = BoxRegion::at_origin(side, side);
        let mut others = vec![profit(&items, &nfdh_unchecked(&items, region).placements)];
        if let Ok(p) = steinberg(&items, region) {
            others.push(profit(&items, &p.placements));
        }
        let run = run_pipeline(
            &Instance::new(side, items.clone()),
            &PipelineConfig::default(),
        )
        .map_err(|e| format!("trial {trial}: {e}"))?;
        others.push(run.profit);
        ensure(others.iter().all(|&o| o <= sol.profit), || {
            format!("trial {trial}: {others:?} beat {}", sol.profit)
        })?;
        for k in [2u64, 3, 7] {
            let scaled: Vec<Item> = items
                .iter()
                .map(|it| Item {
                    profit: k * it.profit,
                    ..*it
                })
                .collect();
            let s2 =
                optimal_pack(&scaled, side, &cfg).map_err(|e| format!("trial {trial}: {e}"))?;
            ensure(
                s2.profit == k * sol.profit && s2.packing == sol.packing,
                || format!("trial {trial}: scaling by {k}"),
            )?;
        }
        compared += 1;
    }
    // skewed benchmark instances too
    for (id, inst) in skewed_batch(0, 50, 16, 8) {
        let sol = optimal_pack(&inst.items, inst.side, &cfg).map_err(|e| format!("{id}: {e}"))?;
        let run =
            run_pipeline(&inst, &PipelineConfig::default()).map_err(|e| format!("{id}: {e}"))?;
        ensure(run.profit <= sol.profit, || {
            format!("{id}: pipeline beat the optimum")
        })?;
        let packing = Packing {
            side: inst.side,
            placements: nfdh_unchecked(&inst.items, BoxRegion::at_origin(16, 16)).placements,
        };
        ensure(packing.profit(&inst.items) <= sol.profit, || {
            format!("{id}: shelves beat the optimum")
        })?;
        compared += 1;
    }
    Ok(format!("{compared} instances"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("nfdh area bound", nfdh_area_bound),
        ("linear grouping", linear_grouping_rounds),
        ("estimate encoding", estimate_encoding),
        ("dp against rainbow oracle", dp_matches_oracle),
        ("split into L and U", split_retention),
        ("color coding", coloring),
        ("skewed benchmark ratio", skewed_bench),
        ("exact oracle consistency", exact_consistency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
