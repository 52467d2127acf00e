use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use orbitfin::bounds::{
    classify_quotient, exceeds_support, factor_through, is_s_bounded, join_s_bounded, SupportBound,
};
use orbitfin::language::{syntactic_language, Word};
use orbitfin::monoid::{catalog_names, quotient_names, NominalMonoid};
use orbitfin::nominal::{OrbitFiniteSet, ProductSet};
use orbitfin::prolimit::{
    aperiodicity_family, build_stage, clopen_of_language, language_of_clopen, satisfies_all, satisfies_explicit,
    DistanceOracle, Equation, Scope,
};
use orbitfin::regression::{run_all, DEFAULT_SEED};
use orbitfin::{Budget, Error as LibError};

use crate::document::{parse_term, parse_word, serialize_monoid, Document, Object, ParseError, Resolver};

#[derive(Debug, Parser)]
#[command(name = "orbitfin", version, about = "Orbit-finite nominal monoids and data languages")]
pub struct Cli {
    /// Search node cap shared by all enumerations of one invocation.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_LIMIT)]
    pub budget: u64,
    /// Orbit cap for exhaustive monoid enumeration.
    #[arg(long, global = true, default_value_t = 2)]
    pub max_orbits: usize,
    /// Dimension cap for exhaustive monoid enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    pub max_dim: usize,
    /// Seed for randomized property checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonReport,
}

/// Definition files and names. Arguments naming existing files are loaded
/// as documents; the rest are operands.
#[derive(Debug, Args)]
pub struct Operands {
    pub args: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BoundArg {
    /// Support bound: `first-letter`, a bound or map name, or `const a b …`.
    #[arg(long, default_value = "first-letter")]
    pub bound: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Preserving,
    Reflecting,
    Msr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Catalog,
    Exhaustive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the monoid laws of definition files or catalog monoids.
    Validate(Operands),
    /// List the orbits of a set, a monoid, or the product of two.
    Orbits(Operands),
    /// Decide membership of a word: `member LANG "a b b a"`.
    Member(Operands),
    /// Compute the syntactic monoid of a language.
    Syntactic(Operands),
    /// Decide aperiodicity, directly and through explicit equations.
    Aperiodic(Operands),
    /// Check an explicit equation: `proeq MONOID "(a)^w a = (a)^w"`.
    Proeq {
        #[command(flatten)]
        operands: Operands,
        #[command(flatten)]
        bound: BoundArg,
    },
    /// Classify a surjective morphism.
    ClassifyQuotient {
        #[command(flatten)]
        operands: Operands,
        /// Exit 1 unless the quotient has this property.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Search an s-bounded lift of a map through a quotient: `factor MAP MORPHISM`.
    Factor {
        #[command(flatten)]
        operands: Operands,
        #[command(flatten)]
        bound: BoundArg,
    },
    /// Join two s-bounded maps: `join MAP MAP`.
    Join {
        #[command(flatten)]
        operands: Operands,
        #[command(flatten)]
        bound: BoundArg,
        /// Also look for an element with support larger than this.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Separation distance of two words: `dist "a b" "b a"`.
    Dist {
        #[command(flatten)]
        operands: Operands,
        #[command(flatten)]
        bound: BoundArg,
        #[arg(long, value_enum, default_value_t = ScopeArg::Exhaustive)]
        scope: ScopeArg,
    },
    /// Build a truncation stage from maps: `stage MAP MAP …`.
    Stage {
        #[command(flatten)]
        operands: Operands,
        #[command(flatten)]
        bound: BoundArg,
        /// Report the clopen of this language at the stage.
        #[arg(long)]
        language: Option<String>,
    },
    /// Run every regression criterion.
    #[command(visible_alias = "demo-paper")]
    Demo,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] LibError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(LibError::BudgetExhausted { .. }) => 3,
            _ => 2,
        }
    }
}

type CResult<T> = std::result::Result<T, CliError>;

fn input<T>(r: std::result::Result<T, String>) -> CResult<T> {
    r.map_err(CliError::Input)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Refuted,
    InputError,
    BudgetExhausted,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Holds => 0,
            Status::Refuted => 1,
            Status::InputError => 2,
            Status::BudgetExhausted => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub exit_code: i32,
    pub lines: Vec<String>,
    pub data: Value,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let mut s = self.lines.join("\n");
                s.push('\n');
                s
            }
            Format::JsonReport => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
        }
    }
}

/// Documents loaded from the command line, searched last to first.
#[derive(Default)]
pub struct Env {
    docs: Vec<(PathBuf, Document)>,
}

impl Resolver for Env {
    fn lookup(&self, name: &str) -> Option<&Object> {
        self.docs.iter().rev().find_map(|(_, d)| d.get(name))
    }
}

impl Env {
    /// Loads file arguments and returns the remaining operands.
    pub fn load(args: &[String]) -> CResult<(Env, Vec<String>)> {
        let mut env = Env::default();
        let mut rest = Vec::new();
        for a in args {
            let p = Path::new(a);
            if p.is_file() {
                let text = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: a.clone(), source })?;
                let doc = Document::parse(&text).map_err(|source| CliError::Parse { path: a.clone(), source })?;
                env.docs.push((p.to_path_buf(), doc));
            } else {
                rest.push(a.clone());
            }
        }
        Ok((env, rest))
    }

    fn word(&self, text: &str) -> CResult<Word> {
        match self.lookup(text) {
            Some(Object::Word(w)) => Ok(w.clone()),
            _ => parse_word(text).map_err(|e| CliError::Input(format!("word `{text}`: {}", e.message))),
        }
    }

    fn bound(&self, spec: &str) -> CResult<SupportBound> {
        if let Some(rest) = spec.strip_prefix("const") {
            let w = parse_word(rest).map_err(|e| CliError::Input(format!("bound `{spec}`: {}", e.message)))?;
            return Ok(SupportBound::Constant(w.support()));
        }
        input(Resolver::bound(self, spec))
    }

    /// A monoid that must satisfy the monoid laws.
    fn valid_monoid(&self, name: &str) -> CResult<Arc<NominalMonoid>> {
        let m = input(self.monoid(name))?;
        let r = m.validate();
        match r.witness() {
            Some(w) if !r.is_valid() => Err(CliError::Input(format!("`{name}` is not a monoid: {w}"))),
            _ => Ok(m),
        }
    }
}

fn operands<'a>(rest: &'a [String], n: usize, usage: &str) -> CResult<&'a [String]> {
    if rest.len() == n {
        Ok(rest)
    } else {
        Err(CliError::Input(format!("expected {n} operand(s): {usage}")))
    }
}

struct Out {
    lines: Vec<String>,
    data: serde_json::Map<String, Value>,
}

impl Out {
    fn new() -> Self {
        Out { lines: Vec::new(), data: serde_json::Map::new() }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn set(&mut self, key: &str, v: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict(b: bool) -> Status {
    if b {
        Status::Holds
    } else {
        Status::Refuted
    }
}

fn orbit_lines(out: &mut Out, set: &OrbitFiniteSet) {
    let mut rows = Vec::new();
    for (i, o) in set.orbits().iter().enumerate() {
        let rep = set.show(&set.rep(i));
        out.line(format!("  {i}: {} dim {} |G| = {}  rep {rep}", o.label(), o.dim(), o.group_order()));
        rows.push(json!({"index": i, "label": o.label(), "dim": o.dim(), "group_order": o.group_order(), "rep": rep}));
    }
    out.set("orbits", rows);
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate(_) => "validate",
        Command::Orbits(_) => "orbits",
        Command::Member(_) => "member",
        Command::Syntactic(_) => "syntactic",
        Command::Aperiodic(_) => "aperiodic",
        Command::Proeq { .. } => "proeq",
        Command::ClassifyQuotient { .. } => "classify-quotient",
        Command::Factor { .. } => "factor",
        Command::Join { .. } => "join",
        Command::Dist { .. } => "dist",
        Command::Stage { .. } => "stage",
        Command::Demo => "demo",
    }
}

/// Runs a parsed command line and builds its report.
pub fn run(cli: &Cli) -> Report {
    let mut out = Out::new();
    let status = match execute(cli, &mut out) {
        Ok(s) => s,
        Err(e) => {
            out.line(format!("error: {e}"));
            out.set("error", e.to_string());
            if e.exit_code() == 3 {
                Status::BudgetExhausted
            } else {
                Status::InputError
            }
        }
    };
    Report {
        command: command_name(&cli.command).into(),
        status,
        exit_code: status.exit_code(),
        lines: out.lines,
        data: Value::Object(out.data),
    }
}

fn execute(cli: &Cli, out: &mut Out) -> CResult<Status> {
    let budget = Budget::new(cli.budget);
    let b = &budget;
    match &cli.command {
        Command::Validate(ops) => {
            let (env, rest) = Env::load(&ops.args)?;
            let mut targets: Vec<(String, Arc<NominalMonoid>)> = Vec::new();
            for (path, doc) in &env.docs {
                for (d, m) in doc.monoids() {
                    targets.push((format!("{}:{} {}", path.display(), d.line, d.name), m.clone()));
                }
            }
            for name in &rest {
                targets.push((name.clone(), input(env.monoid(name))?));
            }
            if env.docs.is_empty() && rest.is_empty() {
                for name in catalog_names() {
                    targets.push((name.to_string(), input(env.monoid(name))?));
                }
            }
            let mut all = true;
            let mut rows = Vec::new();
            for (what, m) in &targets {
                let r = m.validate();
                let ok = r.is_valid();
                all &= ok;
                let witness = r.witness();
                match &witness {
                    Some(w) if !ok => out.line(format!("{what}: invalid: {w}")),
                    _ => out.line(format!("{what}: valid ({} orbits)", m.orbit_count())),
                }
                rows.push(json!({"target": what, "valid": ok, "witness": if ok { None } else { witness }}));
            }
            out.set("monoids", rows);
            Ok(verdict(all))
        }
        Command::Orbits(ops) => {
            let (env, rest) = Env::load(&ops.args)?;
            let set = match rest.as_slice() {
                [x] => input(env.set(x))?,
                [x, y] => {
                    let p = ProductSet::new(input(env.set(x))?, input(env.set(y))?)?;
                    p.set().clone()
                }
                _ => return Err(CliError::Input("expected one or two set or monoid names".into())),
            };
            out.line(format!("{} orbits, bound {}", set.orbit_count(), set.bound()));
            out.set("orbit_count", set.orbit_count());
            orbit_lines(out, &set);
            Ok(Status::Holds)
        }
        Command::Member(ops) => {
            let (env, rest) = Env::load(&ops.args)?;
            let [l, w] = operands(&rest, 2, "member LANGUAGE WORD")? else { unreachable!() };
            let l = input(env.language(l))?;
            let w = env.word(w)?;
            let value = l.h0().eval(w.letters())?;
            let member = l.member(&w)?;
            let shown = w.show(l.alphabet());
            out.line(format!("{shown} ↦ {}", l.monoid().show(&value)));
            out.line(format!("{shown} {} {}", if member { "∈" } else { "∉" }, l.name()));
            out.set("member", member);
            out.set("value", l.monoid().show(&value));
            Ok(verdict(member))
        }
        Command::Syntactic(ops) => {
            let (env, rest) = Env::load(&ops.args)?;
            let [l] = operands(&rest, 1, "syntactic LANGUAGE")? else { unreachable!() };
            let l = input(env.language(l))?;
            let (syn, s) = syntactic_language(&l, b)?;
            let m = s.monoid();
            out.line(format!("syntactic monoid of {}: {} orbits, bound {}", l.name(), m.orbit_count(), m.carrier().bound()));
            out.set("orbit_count", m.orbit_count());
            orbit_lines(out, m.carrier());
            let accepting: Vec<String> = syn.predicate().reps().map(|x| m.show(x)).collect();
            out.line(format!("accepting: {}", accepting.join(", ")));
            out.set("accepting", accepting);
            let text = serialize_monoid(m);
            out.lines.extend(text.lines().map(String::from));
            out.set("definition", text);
            Ok(Status::Holds)
        }
        Command::Aperiodic(ops) => {
            let (env, rest) = Env::load(&ops.args)?;
            let [name] = operands(&rest, 1, "aperiodic MONOID")? else { unreachable!() };
            let m = env.valid_monoid(name)?;
            let direct = m.is_aperiodic();
            let r = satisfies_all(&m, &aperiodicity_family(&m)?, b)?;
            out.line(format!("{}: aperiodic {}, x^ω·x = x^ω holds {}", m.name(), yes(direct), yes(r.holds)));
            if let Some(x) = m.aperiodicity_witness() {
                let e = m.omega_power(&x);
                out.line(format!("witness: m = {}, m^ω = {}, m^ω·m = {}", m.show(&x), m.show(&e), m.show(&m.multiply(&e, &x)?)));
            }
            if let Some(c) = &r.counterexample {
                out.line(format!("counterexample: {c}"));
            }
            out.set("aperiodic", direct);
            out.set("equations", &r);
            if direct != r.holds {
                return Err(CliError::Input("direct check and equations disagree".into()));
            }
            Ok(verdict(direct))
        }
        Command::Proeq { operands: ops, bound } => {
            let (env, rest) = Env::load(&ops.args)?;
            let [name, eq] = operands(&rest, 2, "proeq MONOID EQUATION")? else { unreachable!() };
            let m = env.valid_monoid(name)?;
            let equation = match env.lookup(eq) {
                Some(Object::Equation { equation, .. }) => equation.clone(),
                _ => {
                    let (lhs, rhs) = eq
                        .split_once('=')
                        .ok_or_else(|| CliError::Input(format!("`{eq}` is neither an equation name nor `lhs = rhs`")))?;
                    let term = |t: &str| parse_term(t).map_err(|e| CliError::Input(format!("term `{t}`: {}", e.message)));
                    Equation {
                        alphabet: Arc::new(OrbitFiniteSet::atoms()),
                        bound: env.bound(&bound.bound)?,
                        lhs: term(lhs)?,
                        rhs: term(rhs)?,
                    }
                }
            };
            let r = satisfies_explicit(&m, &equation, b)?;
            out.line(format!("{}: {equation} {} ({} maps checked)", m.name(), if r.holds { "holds" } else { "fails" }, r.morphisms_checked));
            if let Some(c) = &r.counterexample {
                out.line(format!("counterexample: {c}"));
            }
            out.set("report", &r);
            Ok(verdict(r.holds))
        }
        Command::ClassifyQuotient { operands: ops, expect } => {
            let (env, rest) = Env::load(&ops.args)?;
            let [name] = operands(&rest, 1, "classify-quotient MORPHISM")? else { unreachable!() };
            let e = input(env.morphism(name))?;
            let c = classify_quotient(&e, b)?;
            let labels: Vec<&str> =
                c.reflecting_orbits.iter().map(|&o| e.dom().carrier().orbits()[o].label()).collect();
            out.line(format!("{name}: {} ↠ {}", e.dom().name(), e.cod().name()));
            out.line(format!(
                "preserving={} reflecting={} msr={}",
                yes(c.support_preserving),
                yes(c.support_reflecting),
                yes(c.msr)
            ));
            out.line(format!("R_e = {{{}}}", labels.join(", ")));
            match &c.certificate {
                Some(orbits) => {
                    let l: Vec<&str> = orbits.iter().map(|&o| e.dom().carrier().orbits()[o].label()).collect();
                    out.line(format!("certificate submonoid: {{{}}}", l.join(", ")));
                }
                None => out.line(format!("no certificate; {} orbit subsets examined", c.subsets_examined)),
            }
            if let Some(w) = &c.witness {
                out.line(format!("witness: {w}"));
            }
            out.set("class", &c);
            Ok(match expect {
                None => Status::Holds,
                Some(Expect::Preserving) => verdict(c.support_preserving),
                Some(Expect::Reflecting) => verdict(c.support_reflecting),
                Some(Expect::Msr) => verdict(c.msr),
            })
        }
        Command::Factor { operands: ops, bound } => {
            let (env, rest) = Env::load(&ops.args)?;
            let [h, e] = operands(&rest, 2, "factor MAP MORPHISM")? else { unreachable!() };
            let h = input(env.map(h))?;
            let e = input(env.morphism(e))?;
            let s = env.bound(&bound.bound)?;
            match factor_through(&h, &e, &s, b)? {
                Some(lift) => {
                    out.line(format!("lift: {lift}"));
                    out.set("lift", lift.to_string());
                    Ok(Status::Holds)
                }
                None => {
                    out.line(format!("no s-bounded map into {} lifts {h} (s: {s})", e.dom().name()));
                    out.set("lift", Value::Null);
                    Ok(Status::Refuted)
                }
            }
        }
        Command::Join { operands: ops, bound, k } => {
            let (env, rest) = Env::load(&ops.args)?;
            let [h1, h2] = operands(&rest, 2, "join MAP MAP")? else { unreachable!() };
            let (h1, h2) = (input(env.map(h1))?, input(env.map(h2))?);
            let s = env.bound(&bound.bound)?;
            let j = join_s_bounded(&h1, &h2, &s, b)?;
            let m = j.map.monoid();
            out.line(format!("join: {} orbits, bound {}, s-bounded {}", m.orbit_count(), m.carrier().bound(), yes(j.report.bounded)));
            orbit_lines(out, m.carrier());
            if let Some(w) = &j.report.witness {
                out.line(format!("witness: {w}"));
            }
            out.set("bounded", j.report.bounded);
            if let Some(k) = k {
                let x = exceeds_support(&j.map, *k, b)?;
                match &x {
                    Some(x) => out.line(format!("{} has support of size {} > {k}", m.show(x), x.support_size())),
                    None => out.line(format!("every element has support of size ≤ {k}")),
                }
                out.set("exceeds", x.map(|x| m.show(&x)));
                let one = is_s_bounded(&j.map, &s, b)?;
                out.set("rechecked", one.bounded);
            }
            Ok(verdict(j.report.bounded))
        }
        Command::Dist { operands: ops, bound, scope } => {
            let (env, rest) = Env::load(&ops.args)?;
            let [v, w] = operands(&rest, 2, "dist WORD WORD")? else { unreachable!() };
            let (v, w) = (env.word(v)?, env.word(w)?);
            let s = env.bound(&bound.bound)?;
            let scope = match scope {
                ScopeArg::Catalog => Scope::Catalog,
                ScopeArg::Exhaustive => Scope::Exhaustive { max_orbits: cli.max_orbits, max_dim: cli.max_dim },
            };
            let alphabet = Arc::new(OrbitFiniteSet::atoms());
            let d = DistanceOracle::new(&alphabet, &s, scope, b)?.distance(&v, &w)?;
            out.line(format!("d_s({}, {}) = {d}", v.show(&alphabet), w.show(&alphabet)));
            if let Some(c) = &d.certificate {
                out.line(format!("separated by {} ({} orbits): {} ≠ {}", c.morphism, c.orbits, c.left, c.right));
            }
            out.set("distance", &d);
            out.set("value", d.value());
            Ok(Status::Holds)
        }
        Command::Stage { operands: ops, bound, language } => {
            let (env, rest) = Env::load(&ops.args)?;
            if rest.is_empty() {
                return Err(CliError::Input("expected at least one map: stage MAP …".into()));
            }
            let maps = rest.iter().map(|n| input(env.map(n))).collect::<CResult<Vec<_>>>()?;
            let s = env.bound(&bound.bound)?;
            let stage = build_stage(maps[0].alphabet().clone(), s, maps, b)?;
            let m = stage.monoid();
            out.line(format!("stage of {}: {} orbits, bound {}", rest.join(", "), m.orbit_count(), m.carrier().bound()));
            out.set("orbit_count", m.orbit_count());
            orbit_lines(out, m.carrier());
            if let Some(name) = language {
                let l = input(env.language(name))?;
                let c = clopen_of_language(&stage, &l, b)?;
                let back = language_of_clopen(&stage, &c)?;
                let round = clopen_of_language(&stage, &back, b)? == c;
                let reps: Vec<String> = c.reps().map(|x| m.show(x)).collect();
                out.line(format!("clopen of {}: {}", l.name(), reps.join(", ")));
                out.line(format!("round trip {}", if round { "exact" } else { "differs" }));
                out.set("clopen", reps);
                out.set("round_trip", round);
                return Ok(verdict(round));
            }
            Ok(Status::Holds)
        }
        Command::Demo => {
            out.line(format!("seed {}", cli.seed));
            let results = run_all(cli.seed);
            for r in &results {
                out.lines.extend(r.to_string().lines().map(String::from));
            }
            let passed = results.iter().filter(|r| r.passed).count();
            out.line(format!("{passed}/{} criteria pass", results.len()));
            out.set("seed", cli.seed);
            out.set("criteria", &results);
            Ok(verdict(passed == results.len()))
        }
    }
}

/// Names accepted wherever a catalog object is expected.
pub fn builtin_names() -> Vec<&'static str> {
    catalog_names().iter().chain(quotient_names()).copied().collect()
}
