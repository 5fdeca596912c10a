use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use valq::characters::{generic_character, CharacterOptions};
use valq::classical::{ClassicalSeed, GraphLimits};
use valq::exchange::{ExchangeData, MutationSeq};
use valq::harness::{self, HarnessOptions, Status, Target, VerificationReport, CHECKS, IMPLIED};
use valq::laurent::cluster_names;
use valq::quantum::QuantumSeed;
use valq::Error;

/// Exact quantum cluster algebras of acyclic valued quivers.
#[derive(Parser)]
#[command(name = "valq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the exchange graph.
    Seeds,
    /// Mutate the initial seed along --seq and print the cluster.
    Mutate,
    /// Generic quantum character of the rigid representation of dimension --dim.
    Char,
    /// Run one verification suite.
    Verify {
        /// One of the names listed by `verify-all`.
        check: String,
    },
    /// Run every suite and print a summary table.
    VerifyAll,
}

#[derive(Args)]
struct Common {
    /// JSON file {"B": [[..]], "D": [..], "Lambda0": [[..]]}.
    #[arg(long, global = true, conflicts_with = "type")]
    matrix: Option<PathBuf>,
    /// Built-in matrix: A2, B2, C2, G2, A3, B3, W3.
    #[arg(long = "type", global = true)]
    r#type: Option<String>,
    /// 1-based mutation directions, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    seq: Vec<usize>,
    /// Dimension vector, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    dim: Vec<i64>,
    /// Interpolation primes.
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Vec<u64>,
    /// Validation prime (default: next prime after those used).
    #[arg(long, global = true)]
    held_out: Option<u64>,
    /// Exchange-graph depth; by default the graph is deepened until it closes
    /// or its variables grow too large.
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    #[arg(long, global = true)]
    max_seeds: Option<usize>,
    /// Only variables within this many mutations enter character-based suites.
    #[arg(long, global = true)]
    char_depth: Option<usize>,
    /// Bound on enumerated subspace tuples.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    rng_seed: u64,
    /// 1-based sink or source vertex for reflection suites.
    #[arg(long, global = true)]
    source: Option<usize>,
    /// Include degree-2 cluster monomials in the counting suite.
    #[arg(long, global = true)]
    monomials: bool,
    #[arg(long, global = true)]
    json: bool,
    /// Print the exchange graph in Graphviz format (seeds).
    #[arg(long, global = true)]
    dot: bool,
}

impl Common {
    fn target(&self) -> Result<(String, ExchangeData), Error> {
        match (&self.matrix, &self.r#type) {
            (Some(path), _) => Ok((path.display().to_string(), harness::load_matrix_file(path)?)),
            (None, Some(name)) => Ok((name.to_uppercase(), harness::named(name)?)),
            (None, None) => Err(Error::Input("one of --matrix or --type is required".into())),
        }
    }

    fn limits(&self) -> GraphLimits {
        let base = HarnessOptions::default().limits;
        GraphLimits {
            max_seeds: self.max_seeds.unwrap_or(base.max_seeds),
            max_depth: self.max_depth.unwrap_or(base.max_depth),
            allow_truncated: true,
        }
    }

    fn char_opts(&self) -> CharacterOptions {
        let mut o = CharacterOptions::default();
        if !self.primes.is_empty() {
            o.primes = self.primes.clone();
        }
        o.held_out = self.held_out;
        o.rng_seed = self.rng_seed;
        if let Some(c) = self.cap {
            o.cap = c;
        }
        o
    }

    fn harness_opts(&self, n: usize) -> Result<HarnessOptions, Error> {
        let source = match self.source {
            Some(k) if k == 0 || k > n => return Err(Error::IndexOutOfRange { index: k, n }),
            Some(k) => Some(k - 1),
            None => None,
        };
        Ok(HarnessOptions {
            limits: self.limits(),
            chars: self.char_opts(),
            source,
            char_depth: self.char_depth,
            monomials: self.monomials,
            auto_depth: self.max_depth.is_none(),
            ..HarnessOptions::default()
        })
    }
}

enum Outcome {
    Pass,
    Fail,
}

/// Print a line; a closed pipe (e.g. `| head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn print_json(v: &serde_json::Value) {
    say!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn seeds(c: &Common) -> Result<Outcome, Error> {
    let (_, e) = c.target()?;
    let (g, _) = harness::explore(&e, c.limits(), c.max_depth.is_none())?;
    if c.dot {
        say!("{}", g.to_dot().trim_end());
    } else if c.json {
        let mut v = g.to_json();
        v["seeds"] = json!(g.len());
        print_json(&v);
    } else {
        say!("{} seeds{}", g.len(), if g.is_finite() { "" } else { " (truncated)" });
        for (id, node) in g.nodes().iter().enumerate() {
            let path: Vec<String> = node.path.iter().map(|k| (k + 1).to_string()).collect();
            say!("{id:>4}  [{}]  {}", path.join(","), node.key.join(" | "));
        }
    }
    Ok(Outcome::Pass)
}

fn mutate(c: &Common) -> Result<Outcome, Error> {
    let (_, e) = c.target()?;
    let seq = MutationSeq::from_one_based(&c.seq, e.rank())?;
    let classical = ClassicalSeed::initial(&e).mutate_seq(seq.directions())?;
    let quantum = QuantumSeed::initial(&e).mutate_seq(seq.directions())?;
    let names = cluster_names(e.rank());
    let vars: Vec<String> = classical.cluster().iter().map(|x| x.render(&names)).collect();
    let qvars: Vec<String> = quantum.cluster().iter().map(|x| x.render()).collect();
    let ex = classical.exchange();
    if c.json {
        print_json(&json!({
            "seq": c.seq,
            "Btilde": ex.btilde().to_rows(),
            "Lambda": ex.lambda().to_rows(),
            "variables": vars,
            "quantum": qvars,
        }));
    } else {
        say!("Btilde = {:?}", ex.btilde().to_rows());
        for (i, (x, qx)) in vars.iter().zip(&qvars).enumerate() {
            say!("x{} = {x}", i + 1);
            say!("X{} = {qx}", i + 1);
        }
    }
    Ok(Outcome::Pass)
}

fn character(c: &Common) -> Result<Outcome, Error> {
    let (_, e) = c.target()?;
    if c.dim.len() != e.rank() {
        return Err(Error::Input(format!("--dim needs {} entries", e.rank())));
    }
    let t = generic_character(&e, &c.dim, &c.char_opts())?;
    if c.json {
        print_json(&t.to_json());
    } else {
        let j = t.to_json();
        say!("v    = {:?}", t.v);
        say!("F    = {}", j["F"].as_str().unwrap_or_default());
        say!("g    = {:?}", t.g);
        say!("d    = {:?}", t.d);
        say!("x_v  = {}", j["x_v"].as_str().unwrap_or_default());
        say!("X_v  = {}", t.quantum.render());
        say!("held-out prime {} consistent", t.held_out);
    }
    Ok(Outcome::Pass)
}

fn emit(reports: &[VerificationReport], json: bool) -> Outcome {
    if json {
        print_json(&serde_json::to_value(reports).expect("serializable"));
    } else {
        for r in reports {
            say!("{}", r.line());
            if let Some(cx) = &r.counterexample {
                say!("    counterexample: {cx}");
            }
        }
    }
    if reports.iter().any(|r| r.status == Status::Fail) {
        Outcome::Fail
    } else {
        Outcome::Pass
    }
}

fn verify(c: &Common, check: Option<&str>) -> Result<Outcome, Error> {
    if let Some(name) = check {
        if !CHECKS.contains(&name) {
            return Err(Error::Input(format!("unknown check {name:?}; known: {}", CHECKS.join(", "))));
        }
    }
    let (name, e) = c.target()?;
    let opts = c.harness_opts(e.rank())?;
    let t = Target::new(&name, e, &opts)?;
    let reports = match check {
        Some(check) => vec![harness::verify(check, &t, &opts)?],
        None => harness::verify_all(&t, &opts)?,
    };
    let outcome = emit(&reports, c.json);
    if check.is_none() && !c.json {
        for (name, consequence) in IMPLIED {
            if reports.iter().any(|r| r.check == *name && r.status == Status::Pass) {
                say!("{name} also gives {consequence}");
            }
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match &cli.command {
        Command::Seeds => seeds(c),
        Command::Mutate => mutate(c),
        Command::Char => character(c),
        Command::Verify { check } => verify(c, Some(check)),
        Command::VerifyAll => verify(c, None),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:?}: {err}");
            ExitCode::from(2)
        }
    }
}
