mod algo;
mod bench;

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mina_core::exact::{ExactConfig, ExactError, ExactMode};
use mina_core::instance::{format_cost, generate_random, parse_assignment, parse_cost, parse_instance, GenParams};
use mina_core::preprocess::RestartConfig;
use mina_core::report::{SolveConfig, SolveError};
use mina_core::seed::derive_seed;
use mina_core::{verify, Instance, Rational};
use serde::Serialize;

use algo::Algo;

#[derive(Parser)]
#[command(name = "mina", version, about = "Min-max interface activation for multi-interface networks")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed (decimal or 0x-prefixed hex)
    #[arg(long, global = true, default_value = "0xC0FFEE", value_parser = parse_seed)]
    seed: u64,

    /// Independent restart-wrapped runs of a randomized algorithm
    #[arg(long, global = true, default_value_t = 1)]
    trials: usize,

    /// Report format on standard output
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    out: OutFormat,

    /// Largest Σ|λ(v)| the exact oracle will enumerate
    #[arg(long, global = true, default_value_t = 24)]
    budget: usize,

    /// Search strategy of the exact oracle
    #[arg(long, global = true, value_enum, default_value_t = ExactStrategy::Plain)]
    exact_mode: ExactStrategy,

    /// Minimum number of runs per preprocessing guess
    #[arg(long, global = true, default_value_t = 3)]
    restarts_floor: usize,

    /// Run the 1/k threshold rounding on every preprocessing guess
    #[arg(long, global = true)]
    preprocess: bool,

    /// Worker threads for `bench`
    #[arg(long, global = true, env = "MINA_THREADS")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactStrategy {
    Plain,
    Bnb,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VerifyMode {
    Covering,
    Connecting,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print its report
    Solve {
        instance: PathBuf,
        /// coverage:k, coverage:logm, coverage:exact, connectivity:logm2 or connectivity:exact
        #[arg(long)]
        algo: Algo,
        /// Also write the JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the assignment (`active` lines) here
        #[arg(long)]
        assignment: Option<PathBuf>,
    },
    /// Check an assignment against an instance
    Verify {
        instance: PathBuf,
        assignment: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMode::Covering)]
        mode: VerifyMode,
    },
    /// Generate a random instance
    Gen {
        #[command(flatten)]
        params: GenArgs,
        /// Output file instead of standard output
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run algorithms over a batch and write one CSV row per instance and algorithm
    Bench {
        /// Directory of instance files
        #[arg(long, conflicts_with = "count")]
        dir: Option<PathBuf>,
        /// Number of generated instances
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        params: GenArgs,
        /// Comma-separated algorithms
        #[arg(long, value_delimiter = ',', default_value = "coverage:k,coverage:logm")]
        algos: Vec<Algo>,
        /// CSV file instead of standard output
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value = "0.1", value_parser = parse_cost_arg)]
    cost_lo: Rational,
    #[arg(long, default_value = "1", value_parser = parse_cost_arg)]
    cost_hi: Rational,
    #[arg(long, default_value_t = 0)]
    groups: usize,
    #[arg(long, default_value_t = 0)]
    group_size: usize,
}

impl GenArgs {
    fn params(&self, seed: u64) -> GenParams {
        GenParams {
            n: self.n,
            k: self.k,
            edge_density: self.density,
            cost_lo: self.cost_lo,
            cost_hi: self.cost_hi,
            num_groups: self.groups,
            group_size: self.group_size,
            seed,
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

fn parse_cost_arg(s: &str) -> Result<Rational, String> {
    parse_cost(s).ok_or_else(|| format!("invalid cost `{s}`"))
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }

    fn other(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)?;
    parse_instance(&text)
        .with_context(|| format!("cannot parse {}", path.display()))
        .map_err(Failure::input)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::input)
}

fn print(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::other(e.into()))
}

fn solve_config(g: &Global) -> SolveConfig {
    SolveConfig {
        seed: g.seed,
        trials: g.trials,
        restarts: RestartConfig {
            floor: g.restarts_floor,
        },
        exact: ExactConfig {
            budget: g.budget,
            mode: match g.exact_mode {
                ExactStrategy::Plain => ExactMode::Plain,
                ExactStrategy::Bnb => ExactMode::BranchAndBound,
            },
        },
        preprocess: g.preprocess,
        ..SolveConfig::default()
    }
}

fn is_infeasible(e: &SolveError) -> bool {
    matches!(
        e,
        SolveError::NoGuess
            | SolveError::LpInfeasible
            | SolveError::GroupsSplit
            | SolveError::Exact(ExactError::Infeasible)
    )
}

fn cmd_solve(
    g: &Global,
    path: &Path,
    algo: Algo,
    report_path: Option<&Path>,
    assignment_path: Option<&Path>,
) -> CmdResult {
    let inst = read_instance(path)?;
    let outcome = algo.run(&inst, &solve_config(g)).map_err(|e| Failure {
        code: if is_infeasible(&e) { 3 } else { 1 },
        error: anyhow!(e).context(format!("{algo} failed on {}", path.display())),
    })?;
    let json = outcome.report.to_json() + "\n";
    if let Some(p) = report_path {
        write_file(p, &json)?;
    }
    if let (Some(p), Some(a)) = (assignment_path, &outcome.assignment) {
        write_file(p, &a.to_text(&inst))?;
    }
    match g.out {
        OutFormat::Json => print(&json)?,
        OutFormat::Text => print(&outcome.report.to_text())?,
    }
    Ok(if outcome.assignment.is_some() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{algo}: no verified assignment found");
        ExitCode::from(3)
    })
}

#[derive(Serialize)]
struct SplitDiagnosis {
    group: usize,
    parts: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct Diagnosis {
    mode: VerifyMode,
    ok: bool,
    covered: usize,
    edges: usize,
    uncovered: Vec<[String; 2]>,
    split_groups: Vec<SplitDiagnosis>,
    max_cost: String,
    per_vertex: Vec<String>,
}

fn cmd_verify(g: &Global, inst_path: &Path, a_path: &Path, mode: VerifyMode) -> CmdResult {
    let inst = read_instance(inst_path)?;
    let text = fs::read_to_string(a_path)
        .with_context(|| format!("cannot read {}", a_path.display()))
        .map_err(Failure::input)?;
    let a = parse_assignment(&inst, &text)
        .with_context(|| format!("cannot parse {}", a_path.display()))
        .map_err(Failure::input)?;
    let err = |e: verify::VerifyError| Failure::input(e.into());
    let label = |v: usize| inst.vertex_label(v).to_string();
    let cover = verify::is_covering(&inst, &a).map_err(err)?;
    let connect = verify::is_connecting(&inst, &a).map_err(err)?;
    let costs = verify::max_cost(&inst, &a).map_err(err)?;
    let diagnosis = Diagnosis {
        mode,
        ok: match mode {
            VerifyMode::Covering => cover.covering,
            VerifyMode::Connecting => connect.connecting,
        },
        covered: inst.m() - cover.uncovered.len(),
        edges: inst.m(),
        uncovered: cover
            .uncovered
            .iter()
            .map(|&e| {
                let (u, v) = inst.edges()[e];
                [label(u), label(v)]
            })
            .collect(),
        split_groups: connect
            .split
            .iter()
            .map(|s| SplitDiagnosis {
                group: s.group,
                parts: s.parts.iter().map(|p| p.iter().map(|&v| label(v)).collect()).collect(),
            })
            .collect(),
        max_cost: format_cost(&costs.max),
        per_vertex: costs.per_vertex.iter().map(format_cost).collect(),
    };
    match g.out {
        OutFormat::Json => print(&(serde_json::to_string_pretty(&diagnosis).unwrap() + "\n"))?,
        OutFormat::Text => {
            let mut out = format!(
                "mode: {}\nok: {}\ncovered: {}/{}\nmax_cost: {}\n",
                serde_json::to_value(mode).unwrap().as_str().unwrap(),
                diagnosis.ok,
                diagnosis.covered,
                diagnosis.edges,
                diagnosis.max_cost
            );
            for [u, v] in &diagnosis.uncovered {
                out += &format!("uncovered: {u} {v}\n");
            }
            for s in &diagnosis.split_groups {
                out += &format!("split group {}: {:?}\n", s.group, s.parts);
            }
            print(&out)?;
        }
    }
    Ok(if diagnosis.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_gen(g: &Global, params: &GenArgs, output: Option<&Path>) -> CmdResult {
    let inst = generate_random(&params.params(g.seed)).map_err(|e| Failure::input(e.into()))?;
    let text = inst.to_text();
    match output {
        Some(p) => write_file(p, &text)?,
        None => print(&text)?,
    }
    Ok(ExitCode::SUCCESS)
}

/// Generated instance `i` uses the first seed `derive_seed(seed, [i, attempt])`
/// the generator accepts.
fn generated_batch(seed: u64, count: usize, params: &GenArgs) -> Result<Vec<(String, Instance)>, Failure> {
    (0..count)
        .map(|i| {
            (0..100u64)
                .find_map(|attempt| {
                    generate_random(&params.params(derive_seed(seed, &[i as u64, attempt]))).ok()
                })
                .map(|inst| (format!("gen-{i}"), inst))
                .ok_or_else(|| Failure::input(anyhow!("generator parameters rejected 100 draws for instance {i}")))
        })
        .collect()
}

fn directory_batch(dir: &Path) -> Result<Vec<(String, Instance)>, Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))
        .map_err(Failure::input)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            read_instance(p).map(|inst| (name, inst))
        })
        .collect()
}

fn cmd_bench(
    g: &Global,
    dir: Option<&Path>,
    count: Option<usize>,
    params: &GenArgs,
    algos: &[Algo],
    csv_path: Option<&Path>,
) -> CmdResult {
    let instances = match (dir, count) {
        (Some(d), _) => directory_batch(d)?,
        (None, Some(c)) => generated_batch(g.seed, c, params)?,
        (None, None) => return Err(Failure::input(anyhow!("bench needs --dir or --count"))),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = g.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Failure::other(e.into()))?;
    let config = solve_config(g);
    let rows = pool.install(|| bench::run(&instances, algos, &config));
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf).map_err(|e| Failure::other(e.into()))?;
    let text = String::from_utf8(buf).expect("CSV is UTF-8");
    match csv_path {
        Some(p) => write_file(p, &text)?,
        None => print(&text)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Solve {
            instance,
            algo,
            report,
            assignment,
        } => cmd_solve(g, instance, *algo, report.as_deref(), assignment.as_deref()),
        Command::Verify {
            instance,
            assignment,
            mode,
        } => cmd_verify(g, instance, assignment, *mode),
        Command::Gen { params, output } => cmd_gen(g, params, output.as_deref()),
        Command::Bench {
            dir,
            count,
            params,
            algos,
            csv,
        } => cmd_bench(g, dir.as_deref(), *count, params, algos, csv.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
