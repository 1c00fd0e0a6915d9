//! Command-line surface. Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::benchmark::{generate, BenchmarkSpec, KARATE_EDGES, KARATE_FACTIONS};
use crate::error::{Error, Result};
use crate::graph::{load_graph_file, DirectedMode};
use crate::io::{fmt_real, read_partition_file, write_partition};
use crate::partition::{partition_distance, ComMode};
use crate::pipeline::{run_pipeline, run_scores, write_score_files, PipelineConfig, Threshold};

#[derive(Debug, Parser)]
#[command(
    name = "multistep",
    version,
    about = "Multi-step community detection: coarse clustering, criticality scoring, local refinement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline and write partitions, scores and report.json
    Detect(DetectArgs),
    /// Stop after scoring; write coarse.csv and scores.csv
    Scores(DetectArgs),
    /// Print the partition distance between two `node,community` files
    Distance { first: PathBuf, second: PathBuf },
    /// Write a planted-partition benchmark graph and its truth partition
    GenerateBenchmark(BenchmarkArgs),
    /// Write the bundled karate club edge list and faction split
    Fixtures {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Edge list: `src dst [weight]` per line, `#` comments
    #[arg(long)]
    input: PathBuf,
    /// auto | on | off
    #[arg(long, default_value = "auto")]
    directed: DirectedMode,
    /// Weight of H1 in H = alpha H1 + (2 - alpha) H2, in [0, 2]
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Nodes with H below this value are critical
    #[arg(long, default_value_t = 0.0, conflicts_with = "critical_fraction")]
    threshold: f64,
    /// Mark this share of lowest-scoring nodes as critical instead of using --threshold
    #[arg(long)]
    critical_fraction: Option<f64>,
    /// full | pos | neg
    #[arg(long, default_value = "full")]
    com_mode: ComMode,
    /// Groups of queued nodes larger than this become new communities (`inf` disables)
    #[arg(long, default_value = "2", value_parser = parse_limit)]
    min_new_community: usize,
    /// Cut the coarse dendrogram at this many communities instead of peak modularity
    #[arg(long)]
    communities: Option<usize>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write trace.csv with every removal and assignment
    #[arg(long)]
    trace: bool,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    groups: usize,
    #[arg(long)]
    avg_degree: f64,
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_limit(s: &str) -> std::result::Result<usize, String> {
    if s == "inf" {
        return Ok(usize::MAX);
    }
    s.parse().map_err(|_| format!("expected a non-negative integer or `inf`, got `{s}`"))
}

impl DetectArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            alpha: self.alpha,
            threshold: match self.critical_fraction {
                Some(f) => Threshold::Fraction(f),
                None => Threshold::Absolute(self.threshold),
            },
            com_mode: self.com_mode,
            min_new_community: self.min_new_community,
            directed: self.directed,
            communities: self.communities,
            emit: Some(self.out.clone()),
            trace: self.trace,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::file(path, e))
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Detect(args) => {
            let cfg = args.config();
            let g = load_graph_file(&args.input, cfg.directed)?;
            let report = run_pipeline(&g, &cfg)?;
            writeln!(
                stdout,
                "critical {} | distance {} | modularity {} -> {}",
                report.critical_count,
                fmt_real(report.distance),
                fmt_real(report.modularity_coarse),
                fmt_real(report.modularity_refined)
            )?;
        }
        Command::Scores(args) => {
            let cfg = args.config();
            let g = load_graph_file(&args.input, cfg.directed)?;
            let report = run_scores(&g, &cfg)?;
            write_score_files(&g, &report, &args.out).map_err(|e| e.in_stage("output"))?;
            writeln!(stdout, "critical {}", report.critical.len())?;
        }
        Command::Distance { first, second } => {
            let a = read_partition_file(&first)?;
            let b = read_partition_file(&second)?;
            let aligned = a.align(&b)?;
            let d = partition_distance(&a.partition, &aligned)?;
            writeln!(stdout, "{}", fmt_real(d))?;
        }
        Command::GenerateBenchmark(args) => {
            let spec = BenchmarkSpec {
                n: args.n,
                groups: args.groups,
                avg_degree: args.avg_degree,
                mu: args.mu,
                seed: args.seed,
            };
            let (g, truth) = generate(&spec)?;
            fs::create_dir_all(&args.out).map_err(|e| Error::file(&args.out, e))?;
            let mut edges = String::new();
            for e in g.edges() {
                edges.push_str(g.label(e.src));
                edges.push('\t');
                edges.push_str(g.label(e.dst));
                edges.push('\n');
            }
            write_file(&args.out.join("benchmark.tsv"), &edges)?;
            let path = args.out.join("truth.csv");
            let file = fs::File::create(&path).map_err(|e| Error::file(&path, e))?;
            write_partition(&g, &truth, file)?;
        }
        Command::Fixtures { out } => {
            fs::create_dir_all(&out).map_err(|e| Error::file(&out, e))?;
            write_file(&out.join("karate.tsv"), KARATE_EDGES)?;
            write_file(&out.join("karate_factions.csv"), KARATE_FACTIONS)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

pub fn cli_main() -> i32 {
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    run_cli(std::env::args_os(), &mut stdout, &mut stderr)
}
