use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use prefnet::cpnet::OrderingAnswer;
use prefnet::verify::{self, SuiteSizes};
use prefnet::{
    parse_model, print_model, search_cpr_with, search_lp_with, Answer, Consistency, ConstraintSet, CpNet,
    DominanceTester, DtOptions, Error, GeneratorConfig, Model, ModelDocument, ModelKind, Outcome, SolverOptions,
    VariableSet, DEFAULT_OUTCOME_LIMIT,
};

#[derive(Parser)]
#[command(name = "prefnet", version, about = "Reasoning over CP-nets, CPR-nets and LP-trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model file.
    Check { file: PathBuf },
    /// Print the most preferred outcome.
    Optimal { file: PathBuf },
    /// Does --o1 dominate --o2 in a CP-net?
    Dominance {
        file: PathBuf,
        #[arg(long)]
        o1: String,
        #[arg(long)]
        o2: String,
        /// Answer by exhaustive search of the flip graph.
        #[arg(long)]
        oracle: bool,
        /// Print an improving flip sequence from --o2 to --o1.
        #[arg(long)]
        witness: bool,
        /// Maximum number of recursive calls.
        #[arg(long, default_value_t = prefnet::solvers::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Compare two outcomes.
    Order {
        file: PathBuf,
        #[arg(long)]
        o1: String,
        #[arg(long)]
        o2: String,
    },
    /// Most preferred outcome satisfying the constraints.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Level::Gac)]
        consistency: Level,
        /// Print the search trace before the result.
        #[arg(long)]
        trace: bool,
    },
    /// List all outcomes, best first.
    Enumerate {
        file: PathBuf,
        #[arg(long, default_value_t = 4096)]
        limit: u128,
    },
    /// Generate a random model.
    Gen {
        #[arg(long, default_value = "cpnet")]
        kind: ModelKind,
        #[arg(long, default_value_t = 4)]
        vars: usize,
        #[arg(long, default_value_t = 2)]
        domain: usize,
        #[arg(long, default_value_t = 2)]
        max_parents: usize,
        #[arg(long, default_value_t = 0)]
        constraints: usize,
        #[arg(long, default_value_t = 0.0)]
        tightness: f64,
        /// Probability that a CP-net row is partial.
        #[arg(long, default_value_t = 0.0)]
        partial_rows: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the randomized oracle suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = Scale::Full)]
        scale: Scale,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    None,
    Fc,
    Gac,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Quick,
    Full,
}

/// A failed command and its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExhausted(_) | Error::TooManyOutcomes { .. } => 4,
            Error::InvalidConfig(_) | Error::EqualOutcomes => 2,
            _ => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Report = std::result::Result<String, Failure>;

fn load(path: &Path) -> std::result::Result<ModelDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| Failure {
        code: 3,
        message: format!("{}: {e}", path.display()),
    })
}

/// Bindings given on the command line are usage errors, not model errors.
fn outcome(vars: &VariableSet, scope: &[prefnet::VarId], text: &str) -> std::result::Result<Outcome, Failure> {
    vars.parse_assignment(text)
        .and_then(|pa| Outcome::new(scope, pa))
        .map_err(|e| Failure::usage(format!("bad outcome `{text}`: {e}")))
}

fn lines(vars: &VariableSet, outcomes: &[Outcome]) -> String {
    outcomes.iter().fold(String::new(), |mut s, o| {
        let _ = writeln!(s, "{}", vars.format(o));
        s
    })
}

fn check(file: &Path) -> Report {
    let doc = load(file)?;
    let vars = doc.model.vars();
    let mut out = format!("ok: {} over {} variables", doc.model.kind(), vars.len());
    if let Some(cs) = &doc.constraints {
        let _ = write!(out, ", {} constraints", cs.constraints().len());
    }
    out.push('\n');
    Ok(out)
}

fn optimal(file: &Path) -> Report {
    let doc = load(file)?;
    let vars = Arc::clone(doc.model.vars());
    let best = match &doc.model {
        Model::CpNet(net) => net.forward_sweep()?,
        Model::CprNet(net) => search_cpr_with(net, &ConstraintSet::empty(Arc::clone(&vars)), SolverOptions::default())?
            .outcome
            .expect("no constraints"),
        Model::LpTree(tree) => tree.optimum(),
    };
    Ok(format!("{}\n", vars.format(&best)))
}

fn cpnet_of(doc: &ModelDocument) -> std::result::Result<&CpNet, Failure> {
    match &doc.model {
        Model::CpNet(net) => Ok(net),
        Model::CprNet(net) => Ok(net.base()),
        Model::LpTree(_) => Err(Failure::usage("dominance needs a cpnet or cprnet")),
    }
}

fn dominance(file: &Path, o1: &str, o2: &str, oracle: bool, witness: bool, budget: u64) -> Report {
    let doc = load(file)?;
    let net = cpnet_of(&doc)?;
    let vars = net.vars();
    let a = outcome(vars, net.scope(), o1)?;
    let b = outcome(vars, net.scope(), o2)?;
    if a == b {
        return Err(Failure::usage("the two outcomes are equal"));
    }
    let (answer, path) = if oracle {
        let count = vars.product_size(net.scope());
        if count > DEFAULT_OUTCOME_LIMIT {
            return Err(Error::TooManyOutcomes {
                count,
                limit: DEFAULT_OUTCOME_LIMIT,
            }
            .into());
        }
        match net.shortest_flip_sequence(&a, &b) {
            Some(p) => (Answer::Yes, Some(p)),
            None => (Answer::No, None),
        }
    } else {
        let options = DtOptions {
            budget,
            ..DtOptions::default()
        };
        let v = DominanceTester::new(net, options).test(&a, &b)?;
        (v.answer, v.witness)
    };
    let mut out = format!("{answer}\n");
    if let (true, Some(p)) = (witness, path) {
        out.push_str(&lines(vars, &p));
    }
    Ok(out)
}

fn order(file: &Path, o1: &str, o2: &str) -> Report {
    let doc = load(file)?;
    let vars = Arc::clone(doc.model.vars());
    let scope: Vec<_> = match &doc.model {
        Model::CpNet(n) => n.scope().to_vec(),
        Model::CprNet(n) => n.scope().to_vec(),
        Model::LpTree(t) => t.scope().to_vec(),
    };
    let a = outcome(&vars, &scope, o1)?;
    let b = outcome(&vars, &scope, o2)?;
    let answer = match &doc.model {
        Model::CpNet(net) => match net.ordering_query(&a, &b)? {
            OrderingAnswer::NotPreferred => "not-preferred".to_string(),
            OrderingAnswer::Unknown => "unknown".to_string(),
        },
        Model::CprNet(net) => net.compare(&a, &b).map_err(|_| Failure::usage("the two outcomes are equal"))?.to_string(),
        Model::LpTree(tree) => tree.compare(&a, &b).map_err(|_| Failure::usage("the two outcomes are equal"))?.to_string(),
    };
    Ok(format!("{answer}\n"))
}

fn solve(file: &Path, level: Level, trace: bool) -> Report {
    let doc = load(file)?;
    let cs = doc
        .constraints
        .as_ref()
        .ok_or_else(|| Failure::usage("solve needs a [constraints] section"))?;
    let options = SolverOptions {
        consistency: match level {
            Level::None => Consistency::None,
            Level::Fc => Consistency::ForwardChecking,
            Level::Gac => Consistency::Gac,
        },
    };
    let result = match &doc.model {
        Model::CprNet(net) => search_cpr_with(net, cs, options)?,
        Model::LpTree(tree) => search_lp_with(tree, cs, options)?,
        Model::CpNet(_) => return Err(Failure::usage("solve needs a cprnet or lptree")),
    };
    let vars = doc.model.vars();
    let mut out = String::new();
    if trace {
        for e in &result.trace {
            let _ = writeln!(out, "{}", e.describe(vars));
        }
    }
    match &result.outcome {
        Some(o) => {
            let _ = writeln!(out, "{}", vars.format(o));
        }
        None => out.push_str("infeasible\n"),
    }
    Ok(out)
}

fn enumerate(file: &Path, limit: u128) -> Report {
    let doc = load(file)?;
    let all = match &doc.model {
        Model::CprNet(net) => net.total_order(limit)?,
        Model::LpTree(tree) => tree.total_order(limit)?,
        Model::CpNet(_) => return Err(Failure::usage("a cpnet does not define a total order; use a cprnet or lptree")),
    };
    Ok(lines(doc.model.vars(), &all))
}

fn selftest(scale: Scale, seed: u64) -> std::result::Result<(String, bool), Failure> {
    let sizes = match scale {
        Scale::Full => SuiteSizes {
            seed,
            ..SuiteSizes::default()
        },
        Scale::Quick => SuiteSizes {
            dominance: 24,
            optimization: 40,
            adjacency: 40,
            reduction: 40,
            seed,
        },
    };
    let reports = verify::run_all(&sizes)?;
    let mut out = String::new();
    let mut ok = true;
    for r in &reports {
        let _ = writeln!(out, "{} {}", if r.passed() { "pass" } else { "FAIL" }, r.summary());
        for f in &r.failures {
            let _ = writeln!(out, "  {f}");
        }
        ok &= r.passed();
    }
    Ok((out, ok))
}

fn run(cli: Cli) -> std::result::Result<(String, u8), Failure> {
    let out = match cli.command {
        Command::Check { file } => check(&file)?,
        Command::Optimal { file } => optimal(&file)?,
        Command::Dominance {
            file,
            o1,
            o2,
            oracle,
            witness,
            budget,
        } => dominance(&file, &o1, &o2, oracle, witness, budget)?,
        Command::Order { file, o1, o2 } => order(&file, &o1, &o2)?,
        Command::Solve {
            file,
            consistency,
            trace,
        } => solve(&file, consistency, trace)?,
        Command::Enumerate { file, limit } => enumerate(&file, limit)?,
        Command::Gen {
            kind,
            vars,
            domain,
            max_parents,
            constraints,
            tightness,
            partial_rows,
            seed,
            output,
        } => {
            let cfg = GeneratorConfig {
                kind,
                var_count: vars,
                domain_size: domain,
                max_parents,
                constraint_count: constraints,
                tightness,
                partial_rows,
                seed,
            };
            let text = print_model(&prefnet::generate(&cfg)?);
            match output {
                Some(path) => {
                    std::fs::write(&path, text)
                        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
                    String::new()
                }
                None => text,
            }
        }
        Command::Selftest { scale, seed } => {
            let (out, ok) = selftest(scale, seed)?;
            return Ok((out, if ok { 0 } else { 1 }));
        }
    };
    Ok((out, 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
