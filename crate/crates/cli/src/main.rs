use std::fs;
use std::path::{Path, PathBuf};

use aero_core::ea::{run_ea, EaParams};
use aero_core::export::{export_schedule, schedule_doc, ExportFormat};
use aero_core::generator::{instance_statistics, write_batch_stats, BatchKind, Generator, GeneratorConfig};
use aero_core::harness::{run_benchmark, write_results, BenchConfig, BenchRow, RunSummary};
use aero_core::io::{load_instance, save_batch};
use aero_core::rng::run_seed;
use aero_core::{decode, Penalties, ShiftMode};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aero", version, about = "Aircraft maintenance staff scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a batch of instances with a shared catalog and roster.
    Generate(GenerateArgs),
    /// Solve one instance with repeated seeded runs.
    Solve(SolveArgs),
    /// Run every instance of a batch directory and write a results table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Batch {
    /// Long turnaround windows.
    A,
    /// Tight turnaround windows.
    B,
    /// Default settings; pair with --factor.
    Custom,
    /// Three aircraft and six packages, for quick end-to-end checks.
    Smoke,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    batch: Batch,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Turnaround factor; overrides the preset.
    #[arg(long)]
    factor: Option<f64>,
    /// Number of aircraft per instance; overrides the preset.
    #[arg(long)]
    aircraft: Option<usize>,
    /// Each technician works one shift block instead of one per day.
    #[arg(long)]
    single_shift: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long)]
    roster: PathBuf,
    #[arg(long, default_value_t = 1500)]
    pop: usize,
    #[arg(long, default_value_t = 200_000)]
    evals: usize,
    #[arg(long, default_value_t = 2)]
    ks: usize,
    #[arg(long, default_value_t = 2)]
    kr: usize,
    /// Penalty per uncovered staff slot.
    #[arg(long, default_value_t = 1.0)]
    wp: f64,
    /// Penalty per late aircraft.
    #[arg(long, default_value_t = 10.0)]
    lp: f64,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep searching after a zero-penalty schedule is found.
    #[arg(long)]
    full_budget: bool,
    #[arg(long)]
    single_shift: bool,
    /// Also write each best schedule as a text Gantt chart, e.g. `gantt:15`.
    #[arg(long)]
    gantt: Option<ExportFormat>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long)]
    batch: PathBuf,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// JSON solver parameters; missing fields take their defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    single_shift: bool,
    /// Optional JSON report with every run.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn shift_mode(single: bool) -> ShiftMode {
    if single {
        ShiftMode::Single
    } else {
        ShiftMode::Daily
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    let (name, mut config) = match args.batch {
        Batch::A => ("a", GeneratorConfig::preset(BatchKind::Slack)),
        Batch::B => ("b", GeneratorConfig::preset(BatchKind::Tight)),
        Batch::Smoke => ("smoke", GeneratorConfig::preset(BatchKind::Smoke)),
        Batch::Custom => {
            if args.factor.is_none() {
                bail!("--batch custom needs --factor");
            }
            ("custom", GeneratorConfig::default())
        }
    };
    if let Some(f) = args.factor {
        config.turnaround_factor = f;
    }
    if let Some(n) = args.aircraft {
        config.n_aircraft = n;
    }
    config.shift_mode = shift_mode(args.single_shift);
    let generator = Generator::new(config.with_seed(args.seed))?;
    let batch = generator.generate_batch(args.count)?;
    save_batch(&args.out, &batch)?;
    let stats = instance_statistics(&batch)?;
    let stats_path = args.out.join("batch_stats.csv");
    let file = fs::File::create(&stats_path).with_context(|| format!("creating {}", stats_path.display()))?;
    write_batch_stats(&[(name, &stats)], file)?;
    println!(
        "wrote {} instances to {}: {:.1}% of turnaround needed, {:.2} packages per aircraft",
        batch.len(),
        args.out.display(),
        100.0 * stats.ratio,
        stats.avg_wps_per_aircraft
    );
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let instance = load_instance(&args.instance, &args.catalog, &args.roster, shift_mode(args.single_shift))?;
    let id = args
        .instance
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string();
    let penalties = Penalties { wp: args.wp, lp: args.lp };
    let base = EaParams {
        pop_size: args.pop,
        eval_budget: args.evals,
        ks: args.ks,
        kr: args.kr,
        penalties,
        stop_at_zero: !args.full_budget,
        ..EaParams::default()
    };
    base.validate()?;
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let mut runs = Vec::with_capacity(args.runs);
    for r in 0..args.runs {
        let params = EaParams {
            seed: run_seed(args.seed, &id, r),
            ..base.clone()
        };
        let result = run_ea(&instance, &params)?;
        let schedule = decode(&result.best.chromosome, &instance)?;
        let summary = RunSummary::from_result(r, &result);
        let doc = serde_json::json!({
            "run": summary,
            "schedule": schedule_doc(&schedule, &instance, &penalties),
        });
        write_file(&args.out.join(format!("run_{r}.json")), &serde_json::to_vec_pretty(&doc)?)?;
        if let Some(format) = args.gantt {
            let chart = export_schedule(&schedule, &instance, &penalties, format)?;
            write_file(&args.out.join(format!("run_{r}.{}", format.extension())), &chart)?;
        }
        println!(
            "run {r}: fitness {} (uncovered {}, late {}) last improvement at evaluation {}",
            summary.fitness, summary.uncovered, summary.late, summary.last_improvement
        );
        runs.push(summary);
    }

    let row = BenchRow::from_runs(id, runs);
    let mut table = Vec::new();
    write_results(std::slice::from_ref(&row), &mut table)?;
    write_file(&args.out.join("summary.csv"), &table)?;
    print!("{}", String::from_utf8_lossy(&table));
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let params: EaParams = match &args.params {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => EaParams::default(),
    };
    let config = BenchConfig {
        params,
        repeats: args.repeats,
        workers: args.workers,
        master_seed: args.seed,
        shift_mode: shift_mode(args.single_shift),
    };
    let report = run_benchmark(&args.batch, &config)?;
    let file = fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_results(&report.rows, file)?;
    if let Some(path) = &args.report {
        write_file(path, &serde_json::to_vec_pretty(&report)?)?;
    }
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("{}: {}", row.instance, row.error.as_deref().unwrap_or_default());
    }
    let s = &report.summary;
    println!(
        "{} instances ({} failed): best = 0 on {:.0}%, every run = 0 on {:.0}%, mean avg {:.2}, mean % evals {:.1}",
        s.instances,
        s.failed,
        100.0 * s.best_zero_fraction,
        100.0 * s.all_zero_fraction,
        s.mean_avg,
        s.mean_pct_evals
    );
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => generate(args),
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
    }
}
