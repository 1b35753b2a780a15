//! The `idlearn` command line.
//!
//! Every subcommand writes its result to stdout (JSON or CSV) and, on
//! failure, a JSON error object to stderr with a documented exit code.

mod schemas;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::admg::{Admg, AdmgDoc, Assignment, Symbol, VarSet};
use crate::estimand::{EstimandDoc, EstimandError};
use crate::fixtures;
use crate::generate;
use crate::identify::{identify, CausalQuery, Identification, QueryDoc, TraceEntry};
use crate::jsonfmt;
use crate::learn::{learn, DistHandle, LearnConfig, LearnError, LearnedInterventional};
use crate::oracle::random::{random_net, CptShape};
use crate::oracle::{CausalBayesNet, OracleError};
use crate::rng::{seeded, RNG_ALGORITHM};
use crate::samples::SampleSet;
use crate::verify::{compare_to_oracle, estimate_tv, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_IDENTIFIABLE: i32 = 2;
pub const EXIT_POSITIVITY: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Largest sample count derived from the accuracy budget without `--m`.
const MAX_DERIVED_SAMPLES: f64 = 1e8;

#[derive(Debug, Parser)]
#[command(name = "idlearn", version, about = "Identify, learn and sample interventional distributions on ADMGs")]
#[command(after_long_help = schemas::ALL)]
struct Cli {
    /// worker threads for counting and verification (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile P_x(y) into an estimand, or report the hedge (exit 2)
    #[command(after_long_help = schemas::IDENTIFY)]
    Identify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        query: PathBuf,
    },
    /// Exact interventional table of a causal Bayes net
    #[command(after_long_help = schemas::ORACLE)]
    Oracle {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        query: PathBuf,
    },
    /// Draw observational samples from a causal Bayes net as CSV
    #[command(after_long_help = schemas::SIMULATE)]
    Simulate {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn P_x(V ∖ X) from samples
    #[command(after_long_help = schemas::LEARN)]
    Learn(LearnArgs),
    /// Evaluate a learned model at one assignment of V ∖ X
    #[command(after_long_help = schemas::EVAL)]
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// JSON object {"name": value, ...} or a path to one
        #[arg(long)]
        point: String,
    },
    /// Draw samples from a learned model as CSV
    #[command(after_long_help = schemas::SAMPLE)]
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        m: usize,
        /// comma-separated subset of the targets to keep
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a learned model with the net that generated its data
    #[command(after_long_help = schemas::VERIFY)]
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        net: PathBuf,
        /// must match the model's intervention when given
        #[arg(long)]
        query: Option<PathBuf>,
        /// also run the sampling TV estimator with this seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.02)]
        tv_epsilon: f64,
        #[arg(long, default_value_t = 0.01)]
        tv_delta: f64,
    },
    /// Run a worked example end to end: example1 or example2
    #[command(after_long_help = schemas::DEMO)]
    Demo {
        example: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        m: usize,
    },
}

#[derive(Debug, Args)]
struct LearnArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    /// observational samples as CSV
    #[arg(long, conflicts_with = "net")]
    samples: Option<PathBuf>,
    /// draw the samples from this net instead (needs --seed)
    #[arg(long, requires = "seed")]
    net: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// sample count; overrides the accuracy budget
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    query: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code and machine-readable kind.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub detail: Option<Value>,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            kind: "input",
            message: message.into(),
            detail: None,
        }
    }

    fn to_json(&self) -> String {
        let mut obj = json!({ "kind": self.kind, "message": self.message, "exit_code": self.code });
        if let Some(d) = &self.detail {
            obj["detail"] = d.clone();
        }
        jsonfmt::to_string(&json!({ "error": obj }))
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        let (code, kind) = match &e {
            LearnError::NotIdentifiable(_) => (EXIT_NOT_IDENTIFIABLE, "not_identifiable"),
            LearnError::PositivityViolation(_) => (EXIT_POSITIVITY, "positivity_violation"),
            _ => (EXIT_INPUT, "input"),
        };
        CliError {
            code,
            kind,
            message: e.to_string(),
            detail: None,
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Learn(l) => l.into(),
            other => CliError::input(other.to_string()),
        }
    }
}

macro_rules! input_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::input(e.to_string())
            }
        })*
    };
}

input_errors!(
    crate::admg::AdmgError,
    crate::identify::IdentifyError,
    OracleError,
    crate::samples::SampleError,
    crate::table::TableError,
    std::io::Error
);

impl From<EstimandError> for CliError {
    fn from(e: EstimandError) -> Self {
        match e {
            EstimandError::ZeroConditioningEvent(_) => CliError {
                code: EXIT_POSITIVITY,
                kind: "positivity_violation",
                message: e.to_string(),
                detail: None,
            },
            other => CliError::input(other.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{rendered}");
            } else {
                let err = CliError::input(rendered.trim_end().to_string());
                let _ = writeln!(stderr, "{}", err.to_json());
            }
            return code;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(CliError::input("--threads must be positive")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, &mut buf)),
            Err(e) => Err(CliError::input(e.to_string())),
        },
        None => dispatch(cli.command, &mut buf),
    };
    let _ = stdout.write_all(&buf);
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.code
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn emit(stdout: &mut dyn Write, value: &impl Serialize) -> CliResult {
    writeln!(stdout, "{}", jsonfmt::to_string_pretty(value))?;
    Ok(())
}

fn write_out(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> CliResult {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn load_graph(path: &Path) -> Result<Admg, CliError> {
    Ok(Admg::from_json(&read(path)?)?)
}

fn load_net(path: &Path) -> Result<CausalBayesNet, CliError> {
    Ok(CausalBayesNet::from_json(&read(path)?)?)
}

fn load_query(path: &Path, g: &Admg) -> Result<CausalQuery, CliError> {
    Ok(QueryDoc::from_json(&read(path)?)?.into_query(g)?)
}

fn load_model(path: &Path) -> Result<LearnedInterventional, CliError> {
    Ok(LearnedInterventional::from_json(&read(path)?)?)
}

fn trace_json(g: &Admg, trace: &[TraceEntry]) -> Value {
    trace
        .iter()
        .map(|t| json!({ "step": t.step.id(), "depth": t.depth, "call": t.describe(g) }))
        .collect()
}

fn set_names(g: &Admg, s: VarSet) -> Vec<String> {
    s.iter().map(|v| g.name(v).to_string()).collect()
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CliResult {
    match command {
        Command::Identify { graph, query } => cmd_identify(&graph, &query, stdout),
        Command::Oracle { net, query } => cmd_oracle(&net, &query, stdout),
        Command::Simulate { net, seed, m, out } => {
            let net = load_net(&net)?;
            let s = net.sample_observational(seed, m);
            let mut buf = Vec::new();
            s.write_csv(net.observable_names(), &mut buf)?;
            write_out(&out, stdout, &buf)
        }
        Command::Learn(args) => cmd_learn(args, stdout),
        Command::Eval { model, point } => cmd_eval(&model, &point, stdout),
        Command::Sample {
            model,
            seed,
            m,
            targets,
            out,
        } => {
            let li = load_model(&model)?;
            let g = li.graph();
            let t = match targets {
                None => li.targets(),
                Some(names) => {
                    let mut t = VarSet::EMPTY;
                    for n in &names {
                        let v = g.var(n).ok_or_else(|| CliError::input(format!("unknown variable `{n}`")))?;
                        if !li.targets().contains(v) {
                            return Err(CliError::input(format!("`{n}` is not a target of the model")));
                        }
                        t.insert(v);
                    }
                    t
                }
            };
            let s = generate::sample_marginal(&li, t, seed, m);
            let mut buf = Vec::new();
            s.write_csv(&set_names(g, t), &mut buf)?;
            write_out(&out, stdout, &buf)
        }
        Command::Verify {
            model,
            net,
            query,
            seed,
            tv_epsilon,
            tv_delta,
        } => cmd_verify(&model, &net, query.as_deref(), seed, tv_epsilon, tv_delta, stdout),
        Command::Demo { example, seed, m } => cmd_demo(&example, seed, m, stdout),
    }
}

fn cmd_identify(graph: &Path, query: &Path, stdout: &mut dyn Write) -> CliResult {
    let g = load_graph(graph)?;
    let q = load_query(query, &g)?;
    match identify(&g, q.x.domain(), q.y)? {
        Identification::Identified { estimand, trace } => {
            let doc = EstimandDoc::from_estimand(&estimand, g.names());
            emit(
                stdout,
                &json!({
                    "identifiable": true,
                    "formula": doc.formula,
                    "latex": doc.latex,
                    "estimand": doc,
                    "trace": trace_json(&g, &trace),
                }),
            )
        }
        Identification::Hedge(w) => {
            let report = json!({
                "identifiable": false,
                "hedge": {
                    "root": set_names(&g, w.root),
                    "graph": set_names(&g, w.graph),
                    "intervened": set_names(&g, w.x),
                },
                "trace": trace_json(&g, &w.trace),
            });
            emit(stdout, &report)?;
            Err(CliError {
                code: EXIT_NOT_IDENTIFIABLE,
                kind: "not_identifiable",
                message: format!("P_x({}) is not identifiable", g.format_set(q.y)),
                detail: Some(report),
            })
        }
    }
}

fn table_json(g: &Admg, t: &crate::table::PmfTable) -> Value {
    t.iter()
        .map(|(cfg, p)| {
            let a: serde_json::Map<String, Value> = t
                .vars()
                .iter()
                .zip(&cfg)
                .map(|(v, s)| (g.name(*v).to_string(), json!(s)))
                .collect();
            json!({ "assignment": a, "p": p })
        })
        .collect()
}

fn cmd_oracle(net: &Path, query: &Path, stdout: &mut dyn Write) -> CliResult {
    let net = load_net(net)?;
    let g = net.latent_project()?;
    let q = load_query(query, &g)?;
    let table = net.exact_interventional(&q.x)?.marginalize(q.y);
    emit(
        stdout,
        &json!({
            "intervene": crate::identify::QueryDoc::from_query(&q).intervene,
            "targets": set_names(&g, q.y),
            "table": table_json(&g, &table),
        }),
    )
}

fn intervention_for_learning(q: &CausalQuery) -> Result<Assignment, CliError> {
    if q.y != q.graph.vars().difference(q.x.domain()) {
        return Err(CliError::input(
            "learning needs every non-intervened variable as a target (omit `targets`)",
        ));
    }
    Ok(q.x.clone())
}

fn cmd_learn(args: LearnArgs, stdout: &mut dyn Write) -> CliResult {
    let config = LearnConfig {
        epsilon: args.epsilon,
        delta: args.delta,
        alpha: args.alpha,
        seed: args.seed,
    };
    let (g, samples) = match (&args.samples, &args.net) {
        (Some(path), None) => {
            let g = load_graph(args.graph.as_deref().ok_or_else(|| CliError::input("--samples needs --graph"))?)?;
            let file = fs::File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            let s = SampleSet::read_csv(g.names(), g.cardinalities(), file)?;
            (g, s)
        }
        (None, Some(path)) => {
            let net = load_net(path)?;
            let g = net.latent_project()?;
            if let Some(gp) = &args.graph {
                if load_graph(gp)? != g {
                    return Err(CliError::input("--graph differs from the projection of --net"));
                }
            }
            let seed = args.seed.ok_or_else(|| CliError::input("--net needs --seed"))?;
            let m = match args.m {
                Some(m) => m,
                None => {
                    let q = load_query(&args.query, &g)?;
                    let part = crate::learn::relative_partition(&g, q.x.domain());
                    let b = crate::learn::Budget::new(&g, &part, config.epsilon, config.delta, config.alpha);
                    if b.m_required > MAX_DERIVED_SAMPLES {
                        return Err(CliError::input(format!(
                            "the accuracy budget asks for {:.3e} samples; pass --m",
                            b.m_required
                        )));
                    }
                    b.m_required as usize
                }
            };
            (g, net.sample_observational(seed, m))
        }
        _ => return Err(CliError::input("give exactly one of --samples or --net")),
    };
    let q = load_query(&args.query, &g)?;
    let x = intervention_for_learning(&q)?;
    let li = learn(DistHandle::Samples(&samples), &g, &x, &config)?;
    write_out(&args.out, stdout, format!("{}\n", li.to_json()).as_bytes())
}

fn parse_point(li: &LearnedInterventional, text: &str) -> Result<Assignment, CliError> {
    let body = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        read(Path::new(text))?
    };
    let obj: serde_json::Map<String, Value> =
        serde_json::from_str(&body).map_err(|e| CliError::input(format!("malformed point: {e}")))?;
    let g = li.graph();
    let mut a = Assignment::empty();
    for (name, value) in obj {
        let v = g.var(&name).ok_or_else(|| CliError::input(format!("unknown variable `{name}`")))?;
        let s = value
            .as_u64()
            .filter(|s| (*s as usize) < g.cardinality(v))
            .ok_or_else(|| CliError::input(format!("bad value for `{name}`")))?;
        a.set(v, s as Symbol);
    }
    // intervened coordinates may be repeated if they agree with the model
    for (v, s) in a.restrict(li.intervention().domain()).iter() {
        if li.intervention().get(v) != Some(s) {
            return Err(CliError::input(format!("`{}` is fixed by the intervention", g.name(v))));
        }
    }
    Ok(a.restrict(li.targets()))
}

fn cmd_eval(model: &Path, point: &str, stdout: &mut dyn Write) -> CliResult {
    let li = load_model(model)?;
    let y = parse_point(&li, point)?;
    let p = li.evaluate_point(&y)?;
    emit(stdout, &json!({ "probability": p }))
}

fn cmd_verify(
    model: &Path,
    net: &Path,
    query: Option<&Path>,
    seed: Option<u64>,
    tv_epsilon: f64,
    tv_delta: f64,
    stdout: &mut dyn Write,
) -> CliResult {
    let li = load_model(model)?;
    let net = load_net(net)?;
    if let Some(qp) = query {
        let q = load_query(qp, li.graph())?;
        if q.x != *li.intervention() {
            return Err(CliError::input("query intervention differs from the model's"));
        }
    }
    let report = compare_to_oracle(&li, &net)?;
    let mut out = serde_json::to_value(&report).map_err(|e| CliError::input(e.to_string()))?;
    if let Some(seed) = seed {
        let truth = net.exact_interventional(li.intervention())?.marginalize(li.targets());
        let sampler = crate::verify::TableSampler::new(&truth);
        let learned = li.full_table()?;
        let est = estimate_tv(
            |r| sampler.draw(r),
            |i| truth.probs()[*i],
            |i| learned.probs()[*i],
            tv_epsilon,
            tv_delta,
            seed,
        )?;
        out["sampled_tv"] = json!({ "estimate": est.estimate, "samples": est.samples, "tolerance": 4.0 * tv_epsilon });
    }
    emit(stdout, &out)
}

fn cmd_demo(example: &str, seed: u64, m: usize, stdout: &mut dyn Write) -> CliResult {
    let (g, x_names, y_names): (Admg, &[&str], &[&str]) = match example {
        "example1" => (fixtures::front_door(), &["X"], &["Z1", "Z2", "Y"]),
        "example2" => (fixtures::confounded_chain(), &["W", "R", "X"], &["Y"]),
        other => return Err(CliError::input(format!("unknown example `{other}` (example1 or example2)"))),
    };
    let net = random_net(&g, &CptShape::default(), &mut seeded(seed));
    let x_set = g.var_set(x_names)?;
    let y_set = g.var_set(y_names)?;
    let Identification::Identified { estimand, trace } = identify(&g, x_set, y_set)? else {
        return Err(CliError::input("example unexpectedly not identifiable"));
    };
    let doc = EstimandDoc::from_estimand(&estimand, g.names());
    let obs = net.exact_observational()?;
    let x = Assignment::from_pairs(x_set.iter().map(|v| (v, 1 as Symbol)));
    let got = estimand.full_table(&obs, &x)?;
    let truth = net.exact_interventional(&x)?.marginalize(y_set);
    let exact_error = got.table.max_abs_diff(&truth)?;

    let samples = net.sample_observational(seed.wrapping_add(1), m);
    let li = learn(
        DistHandle::Samples(&samples),
        &g,
        &x,
        &LearnConfig {
            seed: Some(seed.wrapping_add(1)),
            ..LearnConfig::default()
        },
    )?;
    let report = compare_to_oracle(&li, &net)?;
    emit(
        stdout,
        &json!({
            "example": example,
            "graph": AdmgDoc::from_admg(&g),
            "query": { "intervene": set_names(&g, x_set), "targets": set_names(&g, y_set), "value": 1 },
            "formula": doc.formula,
            "latex": doc.latex,
            "trace": trace_json(&g, &trace),
            "estimand_vs_oracle_max_error": exact_error,
            "learned": {
                "samples": m,
                "rng": RNG_ALGORITHM,
                "factors": li.factors().iter().map(|f| json!({
                    "target": g.name(f.table.target()),
                    "kind": f.kind,
                    "given": set_names(&g, f.table.given_set()),
                })).collect::<Vec<_>>(),
                "report": report,
            },
        }),
    )
}

#[cfg(test)]
mod tests;
