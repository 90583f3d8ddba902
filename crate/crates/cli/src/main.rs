use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geoknap::classify::Label;
use geoknap::corridor::synth::fill_arms;
use geoknap::corridor::{split_into_lu, Corridor, SplitMode};
use geoknap::dp::{color_items, solve_corridor, DpCaps, DpError, DpResult};
use geoknap::exact::{optimal_pack, ExactConfig, ExactError};
use geoknap::geom::{validate_in, validate_packing};
use geoknap::packers::{nfdh, steinberg, BoxRegion};
use geoknap::{Eps, ItemId, Packing, Rect};
use geoknap_cli::pipeline::FailureKind;
use geoknap_cli::{
    bench, load_dir, parse_caps, parse_corridors, parse_instance, parse_packing, render_corridors,
    render_packing, run_pipeline, skewed_batch, write_packing, Branch, Instance, PipelineConfig,
};

#[derive(Parser)]
#[command(
    name = "geoknap",
    version,
    about = "Two-dimensional geometric knapsack toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Auto,
    Small,
    Large,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Derandomized,
    Enumerate,
}

#[derive(Args, Clone)]
struct Common {
    /// Accuracy as `1/m`, e.g. `1/4`.
    #[arg(long, default_value = "1/2")]
    eps: Eps,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// DP caps, e.g. `chords=4096,boundary=8,cells=200000,base=5000000`.
    #[arg(long, value_parser = parse_caps, default_value = "")]
    caps: DpCaps,
    /// Allow 90 degree rotations even if the instance does not say so.
    #[arg(long)]
    rotate: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on an instance.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "auto")]
        branch: BranchArg,
        /// Constant c in the branch threshold c * log2 N.
        #[arg(long, default_value_t = 1.0)]
        threshold_constant: f64,
        /// Print the per-stage ledger to stderr.
        #[arg(long)]
        ledger: bool,
    },
    /// Optimal packing by exhaustive search.
    Exact {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = ExactConfig::default().node_budget)]
        budget: u64,
    },
    /// Shelf packing into the whole knapsack; every item side must be at most eps N.
    Nfdh {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Pack all items into the knapsack if the area condition holds.
    Steinberg {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Color the items and ask whether one of each color fits in each corridor.
    Dp {
        instance: PathBuf,
        #[arg(long)]
        corridor: PathBuf,
        #[arg(long, default_value_t = 2)]
        gamma: u32,
        /// Print the cell log of the dynamic program.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Cut corridors into boxes, L and U corridors, filled with synthetic items.
    SplitLu {
        #[arg(long)]
        corridor: PathBuf,
        #[arg(long)]
        side: i64,
        /// Items placed along each piece.
        #[arg(long, default_value_t = 2)]
        per_piece: usize,
        /// Length of each synthetic item.
        #[arg(long, default_value_t = 4)]
        length: i64,
        #[arg(long, value_enum, default_value = "derandomized")]
        mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the pipeline with the exact optimum on a batch of instances.
    Bench {
        /// Directory of `*.txt` instances.
        dir: Option<PathBuf>,
        /// Generate this many skewed instances instead of reading a directory.
        #[arg(long)]
        generate: Option<usize>,
        #[arg(long, default_value_t = 16)]
        side: i64,
        #[arg(long, default_value_t = 8)]
        max_items: usize,
        /// Pipeline seeds, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        /// Include wall times in the report.
        #[arg(long)]
        times: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Draw a packing, or a corridor file, as SVG.
    Render {
        instance: Option<PathBuf>,
        packing: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["instance", "packing"])]
        corridor: Option<PathBuf>,
        #[arg(long, requires = "corridor")]
        side: Option<i64>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn verdict(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn budget(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        return std::io::read_to_string(std::io::stdin()).map_err(|e| input(format!("stdin: {e}")));
    }
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load(path: &Path, common: &Common) -> Result<Instance, Failure> {
    let mut inst =
        parse_instance(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    inst.rotate |= common.rotate;
    Ok(inst)
}

fn load_corridors(path: &Path, side: i64) -> Result<Vec<Corridor>, Failure> {
    parse_corridors(&read(path)?, side).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Validates, then prints, a packing.
fn emit(
    inst: &Instance,
    packing: &Packing,
    labels: &[(ItemId, Label)],
    format: Format,
) -> Result<(), Failure> {
    let report = validate_packing(&inst.items, packing);
    if !report.valid() {
        return Err(verdict(format!(
            "refusing to write an invalid packing: {report:?}"
        )));
    }
    if !inst.rotate && packing.placements.iter().any(|p| p.rotated) {
        return Err(verdict(
            "refusing to write a rotated placement for an instance without rotation",
        ));
    }
    match format {
        Format::Text => print!("{}", write_packing(packing)),
        Format::Svg => print!("{}", render_packing(&inst.items, packing, labels)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            instance,
            common,
            branch,
            threshold_constant,
            ledger,
        } => {
            let inst = load(&instance, &common)?;
            let cfg = PipelineConfig {
                eps: common.eps,
                seed: common.seed,
                caps: common.caps,
                branch: match branch {
                    BranchArg::Auto => Branch::Auto,
                    BranchArg::Small => Branch::Small,
                    BranchArg::Large => Branch::Large,
                },
                threshold_constant,
                ..PipelineConfig::default()
            };
            let run = run_pipeline(&inst, &cfg).map_err(|e| match e.kind {
                FailureKind::Budget => budget(e.to_string()),
                FailureKind::Invalid => verdict(e.to_string()),
            })?;
            if ledger {
                for entry in &run.ledger {
                    eprintln!("{entry}");
                }
            }
            eprintln!(
                "profit {} reference {} branch {}",
                run.profit,
                run.reference_profit,
                run.branch.name()
            );
            emit(&inst, &run.packing, &run.labels, common.format)
        }
        Command::Exact {
            instance,
            common,
            budget: nodes,
        } => {
            let inst = load(&instance, &common)?;
            let cfg = ExactConfig {
                allow_rotation: inst.rotate,
                node_budget: nodes,
                ..ExactConfig::default()
            };
            let sol = optimal_pack(&inst.items, inst.side, &cfg)
                .map_err(|e: ExactError| budget(e.to_string()))?;
            eprintln!("profit {}", sol.profit);
            emit(&inst, &sol.packing, &[], common.format)
        }
        Command::Nfdh { instance, common } => {
            let inst = load(&instance, &common)?;
            let nice = nfdh(
                &inst.items,
                BoxRegion::at_origin(inst.side, inst.side),
                common.eps,
            )
            .map_err(|e| verdict(e.to_string()))?;
            let packing = Packing {
                side: inst.side,
                placements: nice.placements,
            };
            eprintln!("profit {}", packing.profit(&inst.items));
            emit(&inst, &packing, &[], common.format)
        }
        Command::Steinberg { instance, common } => {
            let inst = load(&instance, &common)?;
            let nice = steinberg(&inst.items, BoxRegion::at_origin(inst.side, inst.side))
                .map_err(|e| verdict(e.to_string()))?;
            let packing = Packing {
                side: inst.side,
                placements: nice.placements,
            };
            emit(&inst, &packing, &[], common.format)
        }
        Command::Dp {
            instance,
            corridor,
            gamma,
            trace,
            common,
        } => {
            let inst = load(&instance, &common)?;
            let corridors = load_corridors(&corridor, inst.side)?;
            let coloring = color_items(&inst.items, gamma, common.seed);
            let colored: Vec<_> = inst
                .items
                .iter()
                .map(|it| (*it, coloring.color(it.id).unwrap_or(0)))
                .collect();
            let caps = DpCaps {
                trace,
                ..common.caps
            };
            let mut all = true;
            for (k, c) in corridors.iter().enumerate() {
                let report = solve_corridor(c, &colored, gamma, &caps).map_err(|e| match e {
                    DpError::BudgetExceeded { .. } => budget(format!("corridor {k}: {e}")),
                    _ => verdict(format!("corridor {k}: {e}")),
                })?;
                for line in &report.trace {
                    eprintln!("{line}");
                }
                match report.result {
                    DpResult::Success(placements) => {
                        let inside = c.cells();
                        let fits = validate_in(
                            &inst.items,
                            &placements,
                            &Rect::new(0, 0, inst.side, inst.side),
                        )
                        .valid()
                            && placements.iter().all(|p| {
                                let it = inst
                                    .items
                                    .iter()
                                    .find(|it| it.id == p.item)
                                    .expect("witness uses known items");
                                let hit = p.rect(it).cells().all(|(x, y)| inside.contains(x, y));
                                hit
                            });
                        if !fits {
                            return Err(verdict(format!(
                                "corridor {k}: witness does not validate"
                            )));
                        }
                        println!("corridor {k} success cells {}", report.cells);
                        for p in &placements {
                            println!("{} {} {}", p.item, p.x, p.y);
                        }
                    }
                    DpResult::Fail => {
                        all = false;
                        println!("corridor {k} fail cells {}", report.cells);
                    }
                }
            }
            if all {
                Ok(())
            } else {
                Err(verdict("no rainbow set fits in some corridor"))
            }
        }
        Command::SplitLu {
            corridor,
            side,
            per_piece,
            length,
            mode,
            common,
        } => {
            let corridors = load_corridors(&corridor, side)?;
            let mode = match mode {
                ModeArg::Derandomized => SplitMode::Derandomized,
                ModeArg::Enumerate => SplitMode::EnumerateOffsets,
            };
            let mut out = Vec::new();
            for (k, c) in corridors.iter().enumerate() {
                let items = fill_arms(c, per_piece, length, 0);
                let total: u64 = items.iter().map(|p| p.profit).sum();
                let split = split_into_lu(c, &items, mode)
                    .map_err(|e| verdict(format!("corridor {k}: {e}")))?;
                let shapes: Vec<String> = split.shapes.iter().map(|s| format!("{s:?}")).collect();
                eprintln!(
                    "corridor {k}: pieces {} deleted {:?} ({}) profit lost {}/{} shapes {}",
                    split.pieces.len(),
                    split.plan.deleted,
                    split.plan.rule,
                    split.deleted_profit(),
                    total,
                    shapes.join(" ")
                );
                out.extend(split.corridors);
            }
            match common.format {
                Format::Text => out.iter().for_each(|c| print!("{}", c.dump())),
                Format::Svg => print!("{}", render_corridors(side, &out)),
            }
            Ok(())
        }
        Command::Bench {
            dir,
            generate,
            side,
            max_items,
            seeds,
            times,
            common,
        } => {
            let batch = match (dir, generate) {
                (_, Some(k)) => skewed_batch(common.seed, k, side, max_items),
                (Some(dir), None) => load_dir(&dir).map_err(|e| input(e.to_string()))?,
                (None, None) => return Err(input("give an instance directory or --generate")),
            };
            let cfg = PipelineConfig {
                eps: common.eps,
                caps: common.caps,
                ..PipelineConfig::default()
            };
            let report = bench(&batch, &cfg, &seeds);
            print!("{}", report.render(times));
            if report.failures() > 0 {
                Err(verdict(format!("{} rows failed", report.failures())))
            } else {
                Ok(())
            }
        }
        Command::Render {
            instance,
            packing,
            corridor,
            side,
        } => {
            if let Some(path) = corridor {
                let side = side.ok_or_else(|| input("--side is required with --corridor"))?;
                print!("{}", render_corridors(side, &load_corridors(&path, side)?));
                return Ok(());
            }
            let (Some(ip), Some(pp)) = (instance, packing) else {
                return Err(input("give an instance and a packing, or --corridor"));
            };
            let inst =
                parse_instance(&read(&ip)?).map_err(|e| input(format!("{}: {e}", ip.display())))?;
            let packing =
                parse_packing(&read(&pp)?).map_err(|e| input(format!("{}: {e}", pp.display())))?;
            if packing.side != inst.side {
                return Err(input("packing and instance sides differ"));
            }
            emit(
                &Instance {
                    rotate: true,
                    ..inst
                },
                &packing,
                &[],
                Format::Svg,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
