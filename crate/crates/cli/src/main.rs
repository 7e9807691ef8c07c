//! `sunrot`: command-line front end for rotation-set computations.

mod human;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use sunrot::cover_graph::CoveringGraph;
use sunrot::io::{parse_point, read_map};
use sunrot::oracle::simulate;
use sunrot::partition::{build_partition, BasicPartition};
use sunrot::periodic::{periodic_from_jtail, periodic_from_loop, verify_witness, PeriodicWitness};
use sunrot::pl_map::validate;
use sunrot::rational::{fmt_rational, parse_rational};
use sunrot::report;
use sunrot::rotation_set::{assemble, component_interval, synthesize_loop, AssembleOptions};
use sunrot::{Error, PLMap, Rational};

#[derive(Parser, Debug)]
#[command(name = "sunrot", version, about = "Exact rotation sets of degree-one PL maps on lifted sun graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Height cap for tower expansion.
    #[arg(long = "h-max", global = true, default_value_t = sunrot::cover_graph::DEFAULT_H_MAX)]
    h_max: usize,
    /// Target width for the line rotation enclosure.
    #[arg(long, global = true, default_value = "1/1000000000")]
    tol: String,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled estimates.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a map file.
    Validate { input: PathBuf },
    /// Print the basic partition.
    Partition { input: PathBuf },
    /// Build the covering graph.
    Covgraph {
        input: PathBuf,
        /// Write the graph in DOT format to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Compute the rotation set.
    Rotset { input: PathBuf },
    /// Find a periodic point with a given rotation number.
    Periodic {
        input: PathBuf,
        #[arg(long)]
        rho: String,
    },
    /// Simulate an orbit exactly.
    Orbit {
        input: PathBuf,
        /// Start point: `R:x`, `B:i,t,m` or JSON.
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

/// Failures with their exit status.
enum Failure {
    Invalid(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Core(Error::Validation(_) | Error::Domain(_)) => 1,
            Failure::Core(Error::Internal { .. }) => 2,
            Failure::Core(Error::Schema(_) | Error::Io(_)) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Invalid(m) => format!("validate: {m}"),
            Failure::Core(e @ Error::Internal { .. }) => e.to_string(),
            Failure::Core(e @ (Error::Schema(_) | Error::Io(_))) => format!("input: {e}"),
            Failure::Core(e) => format!("{e}"),
        }
    }
}

struct Loaded {
    map: PLMap,
    part: BasicPartition,
}

fn load(input: &PathBuf) -> Result<Loaded, Failure> {
    let spec = read_map(input)?;
    let check = validate(&spec);
    if let Some(v) = check.first() {
        let witness = v.witness.as_ref().map(|w| format!(" at {w}")).unwrap_or_default();
        return Err(Failure::Invalid(format!("{:?}: {}{witness}", v.kind, v.message)));
    }
    let map = PLMap::new(&spec)?;
    let part = build_partition(&map);
    Ok(Loaded { map, part })
}

fn emit(json: bool, value: &Value, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
    } else {
        print!("{}", text());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    if c.h_max == 0 {
        return Err(Error::Domain("--h-max must be at least 1".into()).into());
    }
    let tol = parse_rational(&c.tol).map_err(|e| Error::Domain(format!("--tol: {e}")))?;
    if tol <= Rational::from_integer(0.into()) {
        return Err(Error::Domain("--tol must be positive".into()).into());
    }
    let opts = AssembleOptions { tol, seed: c.seed };
    match &cli.command {
        Command::Validate { input } => {
            let spec = read_map(input)?;
            let r = validate(&spec);
            emit(c.json, &report::validation_json(&r), || human::validation(&r));
            if !r.passed() {
                return Err(Failure::Invalid(format!("{} violation(s)", r.violations.len())));
            }
        }
        Command::Partition { input } => {
            let l = load(input)?;
            emit(c.json, &report::partition_json(&l.part), || human::partition(&l.part));
        }
        Command::Covgraph { input, dot } => {
            let l = load(input)?;
            let g = CoveringGraph::build(&l.map, &l.part, c.h_max);
            if let Some(path) = dot {
                std::fs::write(path, g.to_dot(&l.part)).map_err(Error::from)?;
            }
            emit(c.json, &report::graph_json(&g, &l.part), || human::graph(&g, &l.part));
        }
        Command::Rotset { input } => {
            let l = load(input)?;
            let g = CoveringGraph::build(&l.map, &l.part, c.h_max);
            let r = assemble(&l.map, &l.part, &g, &opts);
            emit(c.json, &report::rotation_json(&r, &l.part, &g), || human::rotation(&r, &l.part, &g));
        }
        Command::Periodic { input, rho } => {
            let l = load(input)?;
            let r = parse_rational(rho).map_err(|e| Error::Domain(format!("--rho: {e}")))?;
            let g = CoveringGraph::build(&l.map, &l.part, c.h_max);
            let w = find_periodic(&l, &g, &r)?;
            let check = verify_witness(&l.map, &w);
            emit(c.json, &report::witness_json(&w, &check), || human::witness(&w, &check));
        }
        Command::Orbit { input, x, steps } => {
            let l = load(input)?;
            let start = parse_point(x)?;
            if !l.map.shape().contains(&start) {
                return Err(Error::Domain(format!("start point {start} is not on the graph")).into());
            }
            let rec = simulate(&l.map, &l.part, &start, *steps);
            emit(c.json, &report::orbit_json(&rec), || human::orbit(&rec));
        }
    }
    Ok(())
}

/// A witness from the first component whose interval contains `r`, else from
/// a lasso tail with that value.
fn find_periodic(l: &Loaded, g: &CoveringGraph, r: &Rational) -> Result<PeriodicWitness, Failure> {
    for scc in g.components() {
        let ci = component_interval(g, scc);
        if &ci.lo <= r && r <= &ci.hi {
            let lp = synthesize_loop(g, scc, &ci, r)?;
            return Ok(periodic_from_loop(&l.map, &l.part, g, &lp)?);
        }
    }
    for t in &g.towers {
        if let Some(lp) = g.lasso_loop(t) {
            let cycle: Vec<_> = lp[..lp.len() - 1].iter().map(|&v| g.vertices[v].host).collect();
            if &sunrot::rotation_set::j_path_rho(&l.part, &cycle) == r {
                return Ok(periodic_from_jtail(&l.map, &l.part, g, t)?);
            }
        }
    }
    Err(Error::Domain(format!("no loop or tail of the covering graph has rotation number {}", fmt_rational(r))).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
