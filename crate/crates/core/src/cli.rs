//! The `overlap` command line.
//!
//! Exit codes: 0 success, 1 invalid input or failed operation, 2 malformed
//! input, 3 contradiction found by `falsify`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::axioms::{check_axioms, equivalent};
use crate::genfn::{Builtin, ProbeConfig, UnaryFn};
use crate::pair::{overlap_grid, validate_pair, GeneratorPair, PairError, Validity};
use crate::report::{digest, fmt_g17, RunConfig, RunReport};
use crate::spec_file::{descriptor_from_value, PairSpec, SpecError};
use crate::transform::{collision_falsifier, CollisionVerdict, FalsifierConfig, TransformOp, Transformed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONTRADICTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "overlap", version, about = "Overlap functions from additive generator pairs")]
pub struct Cli {
    /// Grid points per axis for probes and the axiom oracle.
    #[arg(long, global = true, default_value_t = 257)]
    pub grid_n: usize,
    /// Equality and jump tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomized batches.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Write the JSON run report here.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Suppress the human-readable summary.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the generator conditions and the overlap axioms.
    Validate { spec: PathBuf },
    /// Apply a transform and write the resulting pair spec.
    Transform {
        spec: PathBuf,
        /// One of affine_outer, shift, normalize, conjugated_outer,
        /// inner_composition, inner_composition_conjugate.
        #[arg(long)]
        op: String,
        /// Comma-separated `name=value` list, e.g. `k=2,b=3`.
        #[arg(long, default_value = "")]
        params: String,
        /// Defaults to `<stem>.transformed.json` next to the input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for sum collisions that rule out regenerating the overlap
    /// function from a new θ.
    Falsify {
        spec: PathBuf,
        /// A JSON descriptor, a path to one, or a catalog name.
        #[arg(long)]
        theta_new: String,
        /// Anchor point `x,y` tried first; repeatable.
        #[arg(long = "at", value_parser = parse_point)]
        at: Vec<(f64, f64)>,
        /// Sum-table grid size per axis.
        #[arg(long, default_value_t = 64)]
        probes: usize,
    },
    /// Write O on an n × n grid as CSV.
    GridExport {
        spec: PathBuf,
        #[arg(long, default_value_t = 101)]
        n: usize,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in generator functions.
    Catalog,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(x)?, num(y)?))
}

fn parse_params(s: &str) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected name=value, got {part:?}"))?;
        let v = v.trim().parse::<f64>().map_err(|e| format!("{part:?}: {e}"))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            return Err(format!("parameter {k:?} given twice"));
        }
    }
    Ok(out)
}

struct Failure {
    exit: i32,
    code: &'static str,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { exit: EXIT_PARSE, code: "ParseError", message: message.into() }
    }
}

fn pair_code(e: &PairError) -> &'static str {
    match e {
        PairError::Range { .. } => "RangeError",
        _ => "PairError",
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        let message = e.to_string();
        match e {
            SpecError::Parse(_) => Failure::parse(message),
            SpecError::Pair(p) => Failure { exit: EXIT_FAIL, code: pair_code(&p), message },
            SpecError::Transform { source, .. } => Failure { exit: EXIT_FAIL, code: source.code(), message },
        }
    }
}

struct Session {
    cfg: ProbeConfig,
    grid_n: usize,
    tol: f64,
    quiet: bool,
    report: RunReport,
}

impl Session {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn load(&mut self, path: &Path) -> Result<(GeneratorPair, Vec<Transformed>), Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))?;
        self.report.input_digest = Some(digest(&bytes));
        let text = String::from_utf8(bytes).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
        let spec = PairSpec::from_json(&text)?;
        let (pair, steps) = spec.build(&self.cfg)?;
        self.report.set("pair", json!({"orientation": pair.orientation(), "anchor": pair.anchor()}));
        if !steps.is_empty() {
            let chain: Vec<Value> = spec
                .transforms
                .iter()
                .zip(&steps)
                .map(|(op, t)| json!({"op": op, "anchor": t.pair.anchor(), "notes": t.notes}))
                .collect();
            self.report.set("chain", chain);
        }
        Ok((pair, steps))
    }
}

fn verdict_word(v: Validity) -> &'static str {
    match v {
        Validity::Valid => "valid",
        Validity::Invalid => "invalid",
        Validity::Inconclusive => "inconclusive",
    }
}

fn validate(s: &mut Session, spec: &Path) -> Result<i32, Failure> {
    let (pair, _) = s.load(spec)?;
    let validation = validate_pair(&pair, &s.cfg);
    let axioms = check_axioms(&pair, s.grid_n, s.tol);
    for (key, r) in &validation.conditions {
        s.say(format!("{key}: {:?}", r.verdict));
        for w in &r.witnesses {
            let pts: Vec<String> = w.points.iter().map(|(x, v)| format!("({x}, {v})")).collect();
            s.say(format!("  witness: {} {}", w.description, pts.join(", ")));
        }
    }
    for (key, e) in &axioms.axioms {
        s.say(format!("{key}: {:?}", e.verdict));
        for w in &e.witnesses {
            let pts: Vec<String> = w.points.iter().map(|p| format!("O({}, {}) = {}", p.x, p.y, p.value)).collect();
            s.say(format!("  witness: {} {}", w.description, pts.join(", ")));
        }
    }
    let ok = validation.is_valid() && axioms.all_pass();
    s.say(format!("pair: {}; axioms: {:?}", verdict_word(validation.overall), axioms.overall));
    s.report.set("verdict", if ok { "valid" } else { verdict_word(validation.overall) });
    s.report.set("validation", &validation);
    s.report.set("axioms", &axioms);
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn default_out(spec: &Path) -> PathBuf {
    let stem = spec.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "pair".into());
    spec.with_file_name(format!("{stem}.transformed.json"))
}

fn transform(s: &mut Session, spec: &Path, op: &str, params: &str, out: Option<&Path>) -> Result<i32, Failure> {
    let params = parse_params(params).map_err(Failure::parse)?;
    let (input, _) = s.load(spec)?;
    let fail = |e: crate::transform::TransformError| Failure { exit: EXIT_FAIL, code: e.code(), message: e.to_string() };
    let op = TransformOp::from_parts(op, &params).map_err(fail)?;
    s.report.set("op", op);
    let t = op.apply(&input, &s.cfg).map_err(fail)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| default_out(spec));
    fs::write(&out, PairSpec::of_pair(&t.pair).to_json() + "\n")
        .map_err(|e| Failure { exit: EXIT_FAIL, code: "Io", message: format!("cannot write {}: {e}", out.display()) })?;
    let eq = equivalent(&t.pair, &input, s.grid_n, s.tol);

    for note in &t.notes {
        s.say(format!("note: {note}"));
    }
    s.say(format!("wrote {}", out.display()));
    s.say(format!(
        "anchor {} -> {}; pair {}; equivalence {} (max deviation {:e})",
        input.anchor(),
        t.pair.anchor(),
        verdict_word(t.validation.overall),
        if eq.is_equal() { "equal" } else { "differs" },
        eq.max_dev()
    ));
    s.report.set("output", out.display().to_string());
    s.report.set("anchor", t.pair.anchor());
    s.report.set("orientation", t.pair.orientation());
    s.report.set("notes", &t.notes);
    if let Some(h) = &t.h {
        s.report.set("h", h);
    }
    s.report.set("validation", &t.validation);
    s.report.set("equivalence", &eq);
    Ok(if eq.is_equal() { EXIT_OK } else { EXIT_FAIL })
}

fn theta_new_descriptor(arg: &str) -> Result<UnaryFn, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| Failure::parse(format!("cannot read {arg}: {e}")))?
    } else {
        json!({"kind": arg}).to_string()
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::parse(format!("--theta-new: {e}")))?;
    descriptor_from_value(&v).map_err(|e| Failure::parse(format!("--theta-new: {e}")))
}

fn falsify(s: &mut Session, spec: &Path, theta_new: &str, at: &[(f64, f64)], probes: usize) -> Result<i32, Failure> {
    let theta_new = theta_new_descriptor(theta_new)?;
    let (pair, _) = s.load(spec)?;
    let mut cfg = FalsifierConfig { probes, ..Default::default() };
    if !at.is_empty() {
        cfg.anchors = at.to_vec();
    }
    s.report.set("falsifier", &cfg);
    s.report.set("theta_new", &theta_new);
    let verdict = collision_falsifier(pair.theta(), &theta_new, &cfg)
        .map_err(|e| Failure { exit: EXIT_FAIL, code: e.code(), message: e.to_string() })?;
    match &verdict {
        CollisionVerdict::Consistent => s.say("consistent: no collision found"),
        CollisionVerdict::Contradiction { x1, y1, x2, y2, lhs_sum, rhs_sum_1, rhs_sum_2 } => {
            s.say(format!("contradiction: theta_new sums at ({x1}, {y1}) and ({x2}, {y2}) both equal {lhs_sum}"));
            s.say(format!("  theta sums differ: {rhs_sum_1} vs {rhs_sum_2}"));
        }
    }
    s.report.set("verdict", &verdict);
    Ok(if verdict.is_contradiction() { EXIT_CONTRADICTION } else { EXIT_OK })
}

fn grid_export(s: &mut Session, spec: &Path, n: usize, out: Option<&Path>) -> Result<i32, Failure> {
    if n < 2 {
        return Err(Failure::parse(format!("--n must be at least 2, got {n}")));
    }
    let (pair, _) = s.load(spec)?;
    let grid =
        overlap_grid(&pair, n).map_err(|e| Failure { exit: EXIT_FAIL, code: pair_code(&e), message: e.to_string() })?;
    let mut csv = String::from("x,y,value\n");
    for (i, row) in grid.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            csv.push_str(&format!("{},{},{}\n", fmt_g17(grid.xs[i]), fmt_g17(grid.xs[j]), fmt_g17(*v)));
        }
    }
    s.report.set("n", n);
    s.report.set("rows", n * n);
    s.report.set("csv_digest", digest(csv.as_bytes()));
    match out {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| Failure {
                exit: EXIT_FAIL,
                code: "Io",
                message: format!("cannot write {}: {e}", path.display()),
            })?;
            s.report.set("output", path.display().to_string());
            s.say(format!("wrote {} rows to {}", n * n, path.display()));
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes()).ok();
        }
    }
    Ok(EXIT_OK)
}

fn catalog(s: &mut Session) -> Result<i32, Failure> {
    let entries: Vec<Value> = Builtin::examples()
        .into_iter()
        .map(|b| json!({"name": b.name(), "summary": b.summary(), "domain": b.natural_domain(), "example": b}))
        .collect();
    for b in Builtin::examples() {
        s.say(format!("{:<20} {}", b.name(), b.summary()));
    }
    s.report.set("builtins", entries);
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let start = Instant::now();
    let cfg = ProbeConfig { n: cli.grid_n, tol: cli.tol, ..ProbeConfig::default() };
    let name = match &cli.command {
        Command::Validate { .. } => "validate",
        Command::Transform { .. } => "transform",
        Command::Falsify { .. } => "falsify",
        Command::GridExport { .. } => "grid-export",
        Command::Catalog => "catalog",
    };
    let config = RunConfig { grid_n: cli.grid_n, tol: cli.tol, seed: cli.seed, probe: cfg };
    let quiet = cli.quiet || matches!(cli.command, Command::GridExport { out: None, .. });
    let mut s = Session { cfg, grid_n: cli.grid_n, tol: cli.tol, quiet, report: RunReport::new(name, config) };

    let outcome = if cli.grid_n < 2 || !(cli.tol > 0.0) {
        Err(Failure::parse(format!("need --grid-n >= 2 and --tol > 0, got {} and {}", cli.grid_n, cli.tol)))
    } else {
        match &cli.command {
            Command::Validate { spec } => validate(&mut s, spec),
            Command::Transform { spec, op, params, out } => transform(&mut s, spec, op, params, out.as_deref()),
            Command::Falsify { spec, theta_new, at, probes } => falsify(&mut s, spec, theta_new, at, *probes),
            Command::GridExport { spec, n, out } => grid_export(&mut s, spec, *n, out.as_deref()),
            Command::Catalog => catalog(&mut s),
        }
    };
    let exit = match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error [{}]: {}", f.code, f.message);
            s.report.set("error", json!({"code": f.code, "message": f.message}));
            f.exit
        }
    };
    s.report.exit_code = exit;
    s.report.timing_ms = start.elapsed().as_millis() as u64;
    if let Some(path) = &cli.report {
        if let Err(e) = fs::write(path, s.report.to_json() + "\n") {
            eprintln!("error [Io]: cannot write report {}: {e}", path.display());
            return exit.max(EXIT_FAIL);
        }
    }
    exit
}

pub fn main() -> i32 {
    run(Cli::parse())
}
