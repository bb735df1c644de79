use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bethemix::analysis::constants::{CEILING_GUARD, C_TOLERANCE};
use bethemix::analysis::{solve_c, LemmaId, SamplerConfig, VerifyConfig};
use bethemix::experiments::{
    contraction_table, emit, parse_list, run_decay, run_oracle_check, run_suite, threshold_table, to_csv, to_json,
    ExperimentConfig, OracleConfig, OutputFormat, SuiteConfig, EXIT_FAILURE, EXIT_OK, EXIT_USAGE,
};
use bethemix::messages::{ArithmeticMode, Message, Rational, Scalar, ScalarWire};
use bethemix::seed;
use bethemix::tree::{build_complete_tree, root_child_messages, root_marginal, BoundaryCondition, TreeFile};
use bethemix::{Error, Result};

#[derive(Parser)]
#[command(name = "bethemix", version, about = "Message recursions for q-colorings of b-ary trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = |s: &str| s.parse::<OutputFormat>().map_err(|e| e.to_string()))]
    format: OutputFormat,
}

fn mode_parser(s: &str) -> std::result::Result<ArithmeticMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A comma list or inclusive range of integers.
#[derive(Clone, Debug)]
struct List(Vec<usize>);

fn list_parser(s: &str) -> std::result::Result<List, String> {
    parse_list(s).map(List).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Compare the recursion with brute-force enumeration on random instances.
    OracleCheck {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
        /// Largest tree depth drawn.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Number of random instances.
        #[arg(long, alias = "instances", default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "rational", value_parser = mode_parser)]
        mode: ArithmeticMode,
        /// Largest number of free vertices enumerated.
        #[arg(long, default_value_t = 12)]
        cap: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Randomized verification of the message bounds.
    Verify {
        /// Lemma labels, comma separated.
        #[arg(long, value_delimiter = ',', required_unless_present = "all")]
        lemma: Vec<String>,
        /// Every lemma, skipping (q, b) outside its regime.
        #[arg(long, conflicts_with = "lemma")]
        all: bool,
        #[arg(long, default_value = "4", value_parser = list_parser)]
        q: List,
        #[arg(long, default_value = "2", value_parser = list_parser)]
        b: List,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "float", value_parser = mode_parser)]
        mode: ArithmeticMode,
        #[arg(long, default_value_t = 0.25)]
        p_edge: f64,
        #[command(flatten)]
        output: Output,
    },
    /// kappa at q = threshold_q(b) and its neighbours.
    ContractionTable {
        /// A value, comma list, or inclusive range such as 2..50.
        #[arg(long, default_value = "2..20", value_parser = list_parser)]
        b: List,
        #[command(flatten)]
        output: Output,
    },
    /// threshold_q(b), the smallest contracting q, and g(b).
    Threshold {
        #[arg(long, default_value = "2..20", value_parser = list_parser)]
        b: List,
        #[command(flatten)]
        output: Output,
    },
    /// Influence of a boundary change on the root versus distance.
    Decay {
        #[arg(long, default_value_t = 5)]
        q: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Defaults to 3..depth.
        #[arg(long, value_parser = list_parser)]
        distances: Option<List>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "float", value_parser = mode_parser)]
        mode: ArithmeticMode,
        #[arg(long, default_value_t = 1)]
        delta_size: usize,
        /// Use identical boundaries on both sides.
        #[arg(long)]
        control: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Solve c = exp(1/c) by bisection.
    SolveC {
        #[arg(long, default_value_t = C_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Write a complete tree with one randomly pinned level as a tree file.
    GenTree {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Level to pin; defaults to the leaves.
        #[arg(long)]
        pin_level: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Root marginal and root-child messages of a tree file.
    Marginal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "rational", value_parser = mode_parser)]
        mode: ArithmeticMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_json<T: Serialize>(value: &T, output: &Output) -> Result<()> {
    match output.format {
        OutputFormat::Json => emit(&to_json(value)?, output.out.as_deref()),
        OutputFormat::Csv => Err(Error::Parse("this command only writes json".into())),
    }
}

#[derive(Serialize)]
struct SolveCReport {
    c: f64,
    tolerance: f64,
    residual: f64,
    ceiling_guard: f64,
}

#[derive(Serialize)]
struct MarginalReport {
    q: usize,
    mode: ArithmeticMode,
    root_marginal: Vec<ScalarWire>,
    root_child_messages: Vec<Message<f64>>,
}

fn marginal_report<S: Scalar>(file: &TreeFile, mode: ArithmeticMode) -> Result<MarginalReport> {
    let (tree, bc) = file.to_instance()?;
    let p: Vec<S> = root_marginal(&tree, &bc, file.q)?;
    let kids: Vec<Message<S>> = root_child_messages(&tree, &bc, file.q)?;
    Ok(MarginalReport {
        q: file.q,
        mode,
        root_marginal: p.iter().map(Scalar::to_wire).collect(),
        root_child_messages: kids.iter().map(Message::to_f64).collect(),
    })
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::OracleCheck {
            q,
            b,
            depth,
            samples,
            seed,
            mode,
            cap,
            inject_fault,
            output,
        } => {
            let report = run_oracle_check(&OracleConfig {
                q,
                b,
                max_depth: depth,
                instances: samples,
                seed,
                mode,
                cap,
                inject_fault,
                ..Default::default()
            })?;
            write_json(&report, &output)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Verify {
            lemma,
            all,
            q,
            b,
            samples,
            seed,
            mode,
            p_edge,
            output,
        } => {
            let lemmas = if all {
                LemmaId::ALL.to_vec()
            } else {
                lemma.iter().map(|s| s.parse()).collect::<Result<Vec<LemmaId>>>()?
            };
            if !(0.0..=1.0).contains(&p_edge) {
                return Err(Error::Domain(format!("p_edge must lie in [0, 1], got {p_edge}")));
            }
            let report = run_suite(&SuiteConfig {
                lemmas,
                qs: q.0,
                bs: b.0,
                skip_unsupported: all,
                verify: VerifyConfig {
                    samples,
                    seed,
                    mode,
                    sampler: SamplerConfig {
                        p_edge,
                        ..Default::default()
                    },
                    ..Default::default()
                },
            })?;
            let text = match output.format {
                OutputFormat::Json => to_json(&report)?,
                OutputFormat::Csv => to_csv(&report.summary_rows())?,
            };
            emit(&text, output.out.as_deref())?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::ContractionTable { b, output } => {
            let rows = contraction_table(&b.0)?;
            let text = match output.format {
                OutputFormat::Json => to_json(&rows)?,
                OutputFormat::Csv => to_csv(&rows.iter().map(|r| &r.record).collect::<Vec<_>>())?,
            };
            emit(&text, output.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Threshold { b, output } => {
            let rows = threshold_table(&b.0)?;
            let text = match output.format {
                OutputFormat::Json => to_json(&rows)?,
                OutputFormat::Csv => to_csv(&rows)?,
            };
            emit(&text, output.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Decay {
            q,
            b,
            depth,
            distances,
            trials,
            seed,
            mode,
            delta_size,
            control,
            output,
        } => {
            let report = run_decay(&ExperimentConfig {
                q,
                b,
                depth,
                distances: distances.map(|d| d.0).unwrap_or_else(|| (3.min(depth)..=depth).collect()),
                trials,
                master_seed: seed,
                mode,
                delta_size,
                control,
                ..Default::default()
            })?;
            let text = match output.format {
                OutputFormat::Json => to_json(&report)?,
                OutputFormat::Csv => to_csv(&report.records)?,
            };
            emit(&text, output.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::SolveC { tolerance, output } => {
            let c = solve_c(tolerance)?;
            write_json(
                &SolveCReport {
                    c,
                    tolerance,
                    residual: c - (1.0 / c).exp(),
                    ceiling_guard: CEILING_GUARD,
                },
                &output,
            )?;
            Ok(EXIT_OK)
        }
        Command::GenTree {
            q,
            b,
            depth,
            pin_level,
            seed,
            out,
        } => {
            use rand::Rng;
            let tree = build_complete_tree(b, depth)?;
            let level = pin_level.unwrap_or(depth);
            if level > depth {
                return Err(Error::Domain(format!("pin level {level} below depth {depth}")));
            }
            let mut rng = seed::stream(seed, seed::label_id("gen-tree"));
            let mut bc = BoundaryCondition::default();
            for v in tree.nodes_at_depth(level) {
                bc.pin(v, rng.random_range(1..=q));
            }
            bc.validate(&tree, q)?;
            emit(&TreeFile::from_instance(&tree, &bc, q).to_json_string()?, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Marginal { input, mode, out } => {
            let file = TreeFile::from_json_str(&std::fs::read_to_string(&input)?)?;
            let report = match mode {
                ArithmeticMode::Rational => marginal_report::<Rational>(&file, mode)?,
                ArithmeticMode::Float => marginal_report::<f64>(&file, mode)?,
            };
            emit(&to_json(&report)?, out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code as u8)
}
