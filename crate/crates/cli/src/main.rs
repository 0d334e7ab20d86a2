use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use kout::connectivity::{analyze, ConnectivityReport};
use kout::graph::io::{read_edge_list, write_kout_edge_list, write_type_sidecar};
use kout::montecarlo::{run, write_outputs, ExperimentSpec};
use kout::oracle::enumerate_cuts;
use kout::theory::TheoryInputs;
use kout::{generate, Error, GraphParams, Seed, TheoryReport};

/// Inhomogeneous random K-out graphs: generation, connectivity analysis,
/// closed-form theory and Monte Carlo sweeps.
#[derive(Parser)]
#[command(name = "kout", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one graph and write its edge list (plus a `.types` sidecar).
    Generate(GenerateArgs),
    /// Print a connectivity report row for an edge-list file.
    Analyze(AnalyzeArgs),
    /// Evaluate closed-form quantities.
    Theory(TheoryArgs),
    /// Run a spec file and write CSV results.
    Sweep(SweepArgs),
    /// List every node subset with size in [lo, hi] and whether it is a cut.
    Cuts(CutsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Probability of the light type (one selection).
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Selections made by heavy nodes.
    #[arg(long = "K")]
    choices: Option<usize>,
    /// General r-type model: type probabilities (overrides --mu/--K).
    #[arg(long, value_delimiter = ',', requires = "type_choices")]
    type_probs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', requires = "type_probs")]
    type_choices: Option<Vec<usize>>,
    /// Master seed; required.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Output edge-list path; the sidecar goes to `<out>.types`. Standard
    /// output when absent (no sidecar).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge-list file, or `-` for standard input.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    k: Vec<usize>,
    /// Also compute the vertex connectivity.
    #[arg(long)]
    kappa: bool,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "K")]
    choices: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Giant-component bound sizes.
    #[arg(long = "M", value_delimiter = ',')]
    m: Vec<usize>,
    /// Erdos-Renyi mean degree for the giant-fraction comparison.
    #[arg(long)]
    er_c: Option<f64>,
    /// Print `key,value` CSV instead of `key = value` lines.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct SweepArgs {
    spec: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct CutsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    lo: usize,
    #[arg(long)]
    hi: usize,
    /// Only list subsets that are cuts.
    #[arg(long)]
    only_cuts: bool,
}

fn open(path: &Path) -> anyhow::Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(f)))
}

fn cmd_generate(a: GenerateArgs) -> anyhow::Result<()> {
    let params = match (a.type_probs, a.type_choices) {
        (Some(p), Some(c)) => GraphParams::new(a.n, p, c)?,
        _ => {
            let k = a
                .choices
                .ok_or_else(|| Error::Config("--K is required (or --type-probs/--type-choices)".into()))?;
            GraphParams::two_type(a.n, a.mu, k)?
        }
    };
    let master = a
        .seed
        .ok_or_else(|| Error::Config("--seed is required; randomness only enters through it".into()))?;
    let g = generate(&params, Seed::new(master, a.stream));
    match a.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path).with_context(|| path.display().to_string())?);
            write_kout_edge_list(&mut w, &g)?;
            w.flush()?;
            let mut side = path.clone().into_os_string();
            side.push(".types");
            let mut w = BufWriter::new(File::create(&side)?);
            write_type_sidecar(&mut w, &g)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_kout_edge_list(&mut w, &g)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_analyze(a: AnalyzeArgs) -> anyhow::Result<()> {
    let (header, graph) = read_edge_list(open(&a.input)?)?;
    let report = analyze(&graph, &a.k, a.kappa)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", ConnectivityReport::csv_header(&a.k).join(","))?;
    writeln!(out, "{}", report.csv_record(header.seed).join(","))?;
    Ok(())
}

fn cmd_theory(a: TheoryArgs) -> anyhow::Result<()> {
    let report = TheoryReport::evaluate(&TheoryInputs {
        n: a.n,
        mu: a.mu,
        choices: a.choices,
        k: a.k,
        m_values: a.m,
        er_c: a.er_c,
    })?;
    let mut out = io::stdout().lock();
    if a.csv {
        writeln!(out, "key,value")?;
    }
    let entries = report.entries();
    let width = entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in entries {
        if a.csv {
            writeln!(out, "{k},{v}")?;
        } else {
            writeln!(out, "{k:<width$} = {v}")?;
        }
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> anyhow::Result<()> {
    let spec = ExperimentSpec::from_file(&a.spec)?;
    let result = run(&spec, a.workers)?;
    let path = write_outputs(&result, &a.out_dir)?;
    eprintln!("wrote {} (spec sha256 {})", path.display(), result.spec_digest);
    Ok(())
}

fn cmd_cuts(a: CutsArgs) -> anyhow::Result<()> {
    let (_, graph) = read_edge_list(open(&a.input)?)?;
    let records = enumerate_cuts(&graph, a.lo, a.hi)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "size,is_cut,subset")?;
    for r in records.iter().filter(|r| r.is_cut || !a.only_cuts) {
        let subset: Vec<String> = r.subset.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{},{},{}", r.size, r.is_cut, subset.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Domain(_) | Error::SizeGuard { .. } | Error::Parse { .. }) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Analyze(a) => cmd_analyze(a),
        Cmd::Theory(a) => cmd_theory(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Cuts(a) => cmd_cuts(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
