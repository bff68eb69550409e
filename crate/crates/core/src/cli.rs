//! Command-line front end. The binary only forwards to [`run`].
//!
//! Exit codes: 0 success, 2 input error, 3 budget exceeded, 4 internal
//! inconsistency.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::{apply_reward_scheme, generate_instance, latin_hypercube, materialize, RewardScheme};
use crate::heuristics::{
    binary_search_feasible, capacity_sweep, default_factors, pareto_indices, FeasibleOptions,
};
use crate::io::{
    csv_string, emit, exact_record, read_instance, result_record, to_json_pretty, write_instance, write_text,
};
use crate::model::{format_rational, parse_rational, Instance, NormalizationReport};
use crate::oracle::exact_gmkp;
use crate::pipeline::{run_algorithm, run_best, SolveOptions, SolveResult, Variant};
use crate::subset_select::parse_d_set;

/// Default output directory, used when `--out` is absent.
pub const OUT_DIR_ENV: &str = "GMKP_OUT_DIR";
pub const MANIFEST_SCHEMA: &str = "gmkp-manifest/1";
pub const SWEEP_SCHEMA: &str = "gmkp-sweep/1";
pub const BENCH_SCHEMA: &str = "gmkp-bench/1";
pub const SUMMARY_SCHEMA: &str = "gmkp-bench-summary/1";
pub const PERCENTILES: [u32; 5] = [50, 75, 90, 95, 99];
/// Default node budget of the exact selection step.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Parser)]
#[command(name = "gmkp", version, about = "Multiple knapsack with grouped items: solvers, heuristics and instance generation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random instances and a manifest.
    Generate(GenerateArgs),
    /// Run one algorithm on an instance.
    Solve(SolveArgs),
    /// Binary-search the aggregate capacity for a capacity-feasible solution.
    Feasible(FeasibleArgs),
    /// Solve at several aggregate capacities and mark the Pareto frontier.
    Sweep(SweepArgs),
    /// Solve an instance exactly (small instances only).
    Exact(ExactArgs),
    /// Run algorithms on every instance of a directory.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub capacity: u64,
    /// Reward scheme: R0, R1, R2, R3 or R3:SEED.
    #[arg(long, default_value = "R0")]
    pub reward_scheme: String,
    /// Upper limit on the number of knapsacks.
    #[arg(long)]
    pub max_knapsacks: Option<usize>,
    /// Upper limit on the load ratio.
    #[arg(long)]
    pub max_load: Option<String>,
    /// Output directory; defaults to $GMKP_OUT_DIR.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct AlgoArgs {
    /// lp, kp, 2mkp, 3mkp, mkpd, Qmkp (e.g. 100mkp), mkp-prime or best.
    #[arg(long, default_value = "3mkp")]
    pub algo: String,
    /// Threshold list for mkpd, e.g. 100/2,100/3.
    #[arg(long)]
    pub d_set: Option<String>,
    /// Search nodes allowed for the exact selection step; exit code 3 when
    /// exhausted.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long)]
    pub swap_opt: bool,
    /// Right-hand side of the aggregate capacity row.
    #[arg(long)]
    pub total_capacity: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeasibleArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long)]
    pub no_swap_opt: bool,
    /// Stop after this many probes and return the best feasible one.
    #[arg(long)]
    pub step_budget: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Comma-separated factors; defaults to 0.75..1.25 in steps of 0.05.
    #[arg(long)]
    pub factors: Option<String>,
    #[arg(long)]
    pub no_swap_opt: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    pub instance: PathBuf,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory holding instance files.
    pub dir: PathBuf,
    /// Comma-separated algorithm list.
    #[arg(long, default_value = "lp,kp,2mkp,3mkp,100mkp")]
    pub algos: String,
    #[arg(long)]
    pub swap_opt: bool,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    /// Per-run CSV; defaults to $GMKP_OUT_DIR/bench.csv, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Percentile CSV; defaults to $GMKP_OUT_DIR/bench_summary.csv.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// Parsed `--algo`: one variant or the best-of driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Algo {
    Single(Variant),
    Best(Vec<Variant>),
}

impl Algo {
    pub fn parse(name: &str, d_set: Option<&str>) -> Result<Algo> {
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "best" => Ok(Algo::Best(Variant::study_set())),
            "mkpd" => {
                let d = d_set.ok_or_else(|| Error::InvalidArgument("mkpd needs --d-set".into()))?;
                Ok(Algo::Single(Variant::MkpD(parse_d_set(d)?)))
            }
            _ => Ok(Algo::Single(lower.parse()?)),
        }
    }

    pub fn run(&self, instance: &Instance, options: &SolveOptions) -> Result<SolveResult> {
        match self {
            Algo::Single(v) => run_algorithm(instance, v, options),
            Algo::Best(vs) => run_best(instance, vs, options),
        }
    }

    fn single(&self, command: &str) -> Result<&Variant> {
        match self {
            Algo::Single(v) => Ok(v),
            Algo::Best(_) => Err(Error::InvalidArgument(format!("{command} needs a single algorithm, not best"))),
        }
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Generate(a) => cmd_generate(a).map(|_| ()),
        Command::Solve(a) => cmd_solve(a),
        Command::Feasible(a) => cmd_feasible(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn default_out(explicit: Option<&PathBuf>, file_name: &str) -> Option<PathBuf> {
    explicit
        .cloned()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(file_name)))
}

fn load_normalized(path: &Path) -> Result<(Instance, NormalizationReport)> {
    let raw = read_instance(path)?;
    let (inst, report) = raw.normalize()?;
    inst.ensure_valid()?;
    Ok((inst, report))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
    pub m: usize,
    pub capacity: u64,
    pub w_split: u64,
    pub w_min: u64,
    pub w_mode: u64,
    pub r_load: String,
    pub r_conc: String,
    pub reward_scheme: String,
    pub items: usize,
    pub groups: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub seed: u64,
    pub count: usize,
    pub reward_scheme: String,
    pub instances: Vec<ManifestEntry>,
}

/// Writes `inst_<seed>_<index>.json` files and `manifest.json`; returns the
/// written instance paths.
pub fn cmd_generate(args: &GenerateArgs) -> Result<Vec<PathBuf>> {
    let dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .ok_or_else(|| Error::InvalidArgument(format!("generate needs --out or ${OUT_DIR_ENV}")))?;
    if args.count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let scheme: RewardScheme = args.reward_scheme.parse()?;
    let max_load = args.max_load.as_deref().map(parse_rational).transpose()?;
    let points = latin_hypercube(args.count, args.seed);
    let mut seeds = ChaCha8Rng::seed_from_u64(args.seed);
    seeds.set_stream(1);

    let mut entries = Vec::with_capacity(args.count);
    let mut paths = Vec::with_capacity(args.count);
    for (index, point) in points.into_iter().enumerate() {
        let mut params = materialize(point, args.capacity, seeds.next_u64());
        if let Some(max_m) = args.max_knapsacks {
            params.m = params.m.min(max_m.max(2));
        }
        if let Some(max) = max_load {
            params.r_load = params.r_load.min(max);
        }
        let base = generate_instance(&params)?;
        let scheme_here = match scheme {
            RewardScheme::R3 { seed } => RewardScheme::R3 { seed: seed ^ params.seed },
            other => other,
        };
        let inst = apply_reward_scheme(&base, scheme_here);
        let file = format!("inst_{}_{index}.json", args.seed);
        let path = dir.join(&file);
        write_instance(&path, &inst)?;
        entries.push(ManifestEntry {
            file,
            seed: params.seed,
            m: params.m,
            capacity: params.capacity,
            w_split: params.w_split,
            w_min: params.w_min,
            w_mode: params.w_mode,
            r_load: format_rational(&params.r_load),
            r_conc: format_rational(&params.r_conc),
            reward_scheme: scheme_here.to_string(),
            items: inst.num_items(),
            groups: inst.num_groups(),
        });
        paths.push(path);
    }
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        seed: args.seed,
        count: args.count,
        reward_scheme: scheme.tag().into(),
        instances: entries,
    };
    write_text(&dir.join("manifest.json"), &to_json_pretty(&manifest))?;
    Ok(paths)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let (inst, report) = load_normalized(&args.instance)?;
    let algo = Algo::parse(&args.algo.algo, args.algo.d_set.as_deref())?;
    let options = SolveOptions {
        swap_opt: args.swap_opt,
        total_capacity: args.total_capacity,
        node_budget: Some(args.algo.node_budget),
    };
    let result = algo.run(&inst, &options)?;
    let record = result_record(&inst, &result, &report);
    let out = default_out(args.out.as_ref(), &format!("{}_{}.json", stem(&args.instance), result.algorithm));
    emit(out.as_deref(), &to_json_pretty(&record))
}

pub fn cmd_feasible(args: &FeasibleArgs) -> Result<()> {
    let (inst, report) = load_normalized(&args.instance)?;
    let algo = Algo::parse(&args.algo.algo, args.algo.d_set.as_deref())?;
    let variant = algo.single("feasible")?;
    let options = FeasibleOptions {
        swap_opt: !args.no_swap_opt,
        step_budget: args.step_budget,
        node_budget: Some(args.algo.node_budget),
    };
    let outcome = binary_search_feasible(&inst, variant, &options)?;
    if outcome.result.max_exceeded() > 0 {
        return Err(Error::Inconsistent("binary search returned an infeasible solution".into()));
    }
    let mut record = result_record(&inst, &outcome.result, &report);
    record.algorithm = format!("feasible({})", variant.name());
    record.warnings.extend(outcome.warning);
    let out = default_out(args.out.as_ref(), &format!("{}_feasible.json", stem(&args.instance)));
    emit(out.as_deref(), &to_json_pretty(&record))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub schema: String,
    pub factor: String,
    pub total_capacity: u64,
    pub reward: Option<u64>,
    pub max_exceeded: Option<i64>,
    pub dominated: Option<bool>,
    pub error: String,
}

pub fn parse_factors(list: &str) -> Result<Vec<crate::model::Rational>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(parse_rational).collect()
}

pub fn sweep_rows(inst: &Instance, variant: &Variant, factors: &[crate::model::Rational], options: &SolveOptions) -> Result<Vec<SweepRow>> {
    let points = capacity_sweep(inst, variant, factors, options)?;
    let ok: Vec<(usize, (u64, i64))> = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.outcome.as_ref().ok().map(|r| (i, (r.reward(), r.max_exceeded()))))
        .collect();
    let coords: Vec<(u64, i64)> = ok.iter().map(|&(_, c)| c).collect();
    let mut on_frontier = vec![false; points.len()];
    for k in pareto_indices(&coords) {
        on_frontier[ok[k].0] = true;
    }
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (reward, max_exceeded, dominated, error) = match &p.outcome {
                Ok(r) => (Some(r.reward()), Some(r.max_exceeded()), Some(!on_frontier[i]), String::new()),
                Err(e) => (None, None, None, e.to_string()),
            };
            SweepRow {
                schema: SWEEP_SCHEMA.into(),
                factor: format_rational(&p.factor),
                total_capacity: p.total_capacity,
                reward,
                max_exceeded,
                dominated,
                error,
            }
        })
        .collect())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let (inst, _) = load_normalized(&args.instance)?;
    let algo = Algo::parse(&args.algo.algo, args.algo.d_set.as_deref())?;
    let variant = algo.single("sweep")?;
    let factors = match &args.factors {
        Some(list) => parse_factors(list)?,
        None => default_factors(),
    };
    let options = SolveOptions {
        swap_opt: !args.no_swap_opt,
        total_capacity: None,
        node_budget: Some(args.algo.node_budget),
    };
    let rows = sweep_rows(&inst, variant, &factors, &options)?;
    let out = default_out(args.out.as_ref(), &format!("{}_sweep.csv", stem(&args.instance)));
    emit(out.as_deref(), &csv_string(&rows)?)
}

pub fn cmd_exact(args: &ExactArgs) -> Result<()> {
    let (inst, report) = load_normalized(&args.instance)?;
    let exact = exact_gmkp(&inst, args.budget)?;
    let out = default_out(args.out.as_ref(), &format!("{}_exact.json", stem(&args.instance)));
    emit(out.as_deref(), &to_json_pretty(&exact_record(&inst, &exact, &report)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub schema: String,
    pub instance: String,
    pub algo: String,
    pub reward: Option<u64>,
    pub max_exceeded: Option<i64>,
    pub max_exceeded_ratio: Option<String>,
    pub time_ms: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub schema: String,
    pub algo: String,
    pub metric: String,
    pub count: usize,
    pub p50: Option<f64>,
    pub p75: Option<f64>,
    pub p90: Option<f64>,
    pub p95: Option<f64>,
    pub p99: Option<f64>,
}

/// Nearest-rank percentile of sorted data.
pub fn percentile(sorted: &[f64], p: u32) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (p as usize * sorted.len()).div_ceil(100).max(1);
    Some(sorted[rank - 1])
}

/// Instance files of `dir` in name order, skipping the manifest.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != "manifest.json"))
        .collect();
    files.sort();
    Ok(files)
}

fn bench_one(path: &Path, algos: &[(String, Algo)], options: &SolveOptions) -> Vec<BenchRow> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let loaded = load_normalized(path);
    algos
        .iter()
        .map(|(label, algo)| {
            let outcome = loaded.as_ref().map_err(|e| e.to_string()).and_then(|(inst, _)| {
                let start = Instant::now();
                algo.run(inst, options)
                    .map(|r| (r.reward(), r.max_exceeded(), format_rational(&crate::model::exceeded_ratio(inst, r.max_exceeded())), start.elapsed()))
                    .map_err(|e| e.to_string())
            });
            match outcome {
                Ok((reward, exc, ratio, t)) => BenchRow {
                    schema: BENCH_SCHEMA.into(),
                    instance: name.clone(),
                    algo: label.clone(),
                    reward: Some(reward),
                    max_exceeded: Some(exc),
                    max_exceeded_ratio: Some(ratio),
                    time_ms: Some(t.as_secs_f64() * 1000.0),
                    error: String::new(),
                },
                Err(e) => BenchRow {
                    schema: BENCH_SCHEMA.into(),
                    instance: name.clone(),
                    algo: label.clone(),
                    reward: None,
                    max_exceeded: None,
                    max_exceeded_ratio: None,
                    time_ms: None,
                    error: e,
                },
            }
        })
        .collect()
}

/// Runs every algorithm on every instance with `workers` threads. Rows come
/// back in (instance, algorithm) order regardless of scheduling.
pub fn bench_rows(files: &[PathBuf], algos: &[(String, Algo)], options: &SolveOptions, workers: usize) -> Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    let nested: Vec<Vec<BenchRow>> = pool.install(|| files.par_iter().map(|f| bench_one(f, algos, options)).collect());
    Ok(nested.into_iter().flatten().collect())
}

pub fn summarize(rows: &[BenchRow], algos: &[String]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for algo in algos {
        let mine: Vec<&BenchRow> = rows.iter().filter(|r| &r.algo == algo && r.error.is_empty()).collect();
        let metrics: [(&str, Vec<f64>); 3] = [
            ("reward", mine.iter().filter_map(|r| r.reward.map(|x| x as f64)).collect()),
            ("max_exceeded", mine.iter().filter_map(|r| r.max_exceeded.map(|x| x as f64)).collect()),
            ("time_ms", mine.iter().filter_map(|r| r.time_ms).collect()),
        ];
        for (metric, mut values) in metrics {
            values.sort_by(f64::total_cmp);
            let p: Vec<Option<f64>> = PERCENTILES.iter().map(|&q| percentile(&values, q)).collect();
            out.push(SummaryRow {
                schema: SUMMARY_SCHEMA.into(),
                algo: algo.clone(),
                metric: metric.into(),
                count: values.len(),
                p50: p[0],
                p75: p[1],
                p90: p[2],
                p95: p[3],
                p99: p[4],
            });
        }
    }
    out
}

pub fn parse_algo_list(list: &str) -> Result<Vec<(String, Algo)>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Ok((s.to_ascii_lowercase(), Algo::parse(s, None)?)))
        .collect()
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let algos = parse_algo_list(&args.algos)?;
    if algos.is_empty() {
        return Err(Error::InvalidArgument("empty algorithm list".into()));
    }
    let files = instance_files(&args.dir)?;
    let options = SolveOptions {
        swap_opt: args.swap_opt,
        total_capacity: None,
        node_budget: Some(args.node_budget),
    };
    let rows = bench_rows(&files, &algos, &options, args.workers)?;
    let labels: Vec<String> = algos.iter().map(|(l, _)| l.clone()).collect();
    let summary = summarize(&rows, &labels);
    emit(default_out(args.out.as_ref(), "bench.csv").as_deref(), &csv_string(&rows)?)?;
    if let Some(p) = default_out(args.summary.as_ref(), "bench_summary.csv") {
        write_text(&p, &csv_string(&summary)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_percentiles() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile(&v, 50), Some(5.0));
        assert_eq!(percentile(&v, 90), Some(9.0));
        assert_eq!(percentile(&v, 99), Some(10.0));
        assert_eq!(percentile(&[], 50), None);
        assert_eq!(percentile(&[3.0], 1), Some(3.0));
    }

    #[test]
    fn algo_names() {
        assert_eq!(Algo::parse("best", None).unwrap(), Algo::Best(Variant::study_set()));
        assert_eq!(Algo::parse("3MKP", None).unwrap(), Algo::Single(Variant::ThreeMkp));
        assert!(Algo::parse("mkpd", None).is_err());
        match Algo::parse("mkpd", Some("100/2,100/3")).unwrap() {
            Algo::Single(Variant::MkpD(d)) => assert_eq!(d.len(), 2),
            other => panic!("{other:?}"),
        }
        assert!(Algo::parse("nope", None).is_err());
    }

    #[test]
    fn hundred_mkp_d_set_matches_named_variant() {
        let list: Vec<String> = (2..=100).map(|q| format!("100/{q}")).collect();
        let inst = Instance::with_weight_rewards(vec![100, 100], vec![vec![40, 35], vec![60], vec![30, 30, 30]]);
        let Algo::Single(d) = Algo::parse("mkpd", Some(&list.join(","))).unwrap() else {
            panic!()
        };
        let q = Variant::MkpQ { max_q: 100 };
        assert_eq!(d.thresholds(&inst), q.thresholds(&inst));
        let a = run_algorithm(&inst, &d, &SolveOptions::default()).unwrap();
        let b = run_algorithm(&inst, &q, &SolveOptions::default()).unwrap();
        assert_eq!(a.selection, b.selection);
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
