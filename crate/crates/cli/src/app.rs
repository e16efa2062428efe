//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use finspace::complex::{homology, is_gamma_point, order_complex, HomologyProfile};
use finspace::error::Error as CoreError;
use finspace::generators;
use finspace::homotopy::{
    are_homotopy_equivalent, brute_force_homotopy_equivalent, contractible_height1,
};
use finspace::limits::Limits;
use finspace::maps::{enumerate_monotone, has_fpp, MonotoneMap};
use finspace::poset::Poset;
use finspace::reduction::{core, standard_sequence, DismantlingTrace, RemovalPolicy};
use finspace::topology::{
    alexandroff_topology, compact_open_subbasis, families_equal, generate_topology,
    specialization_order,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::document::{emit_json, emit_poset, load, DocumentError, PosetDocument};
use crate::dot::emit_dot;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "finspace",
    version,
    about = "Finite spaces as posets: cores, homotopy type, homology"
)]
struct Cli {
    /// Maximum number of monotone maps enumerated for one function space.
    #[arg(long, global = true, value_name = "N")]
    max_enum: Option<usize>,
    /// Seed for random generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Use the document's basepoint.
    #[arg(long, global = true)]
    pointed: bool,
    /// JSON reports instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a generated poset as a document.
    Gen {
        family: Family,
        /// Family parameters, e.g. `fence 6`, `khalimsky -1 3`, `random 8 0.3`.
        #[arg(allow_negative_numbers = true)]
        params: Vec<String>,
    },
    /// Reduce to the core one beat point at a time.
    Core { file: PathBuf },
    /// Run the alternating bulk D/U sequence.
    Dismantle {
        file: PathBuf,
        /// Defaults to 2|P| + 4.
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Decide homotopy equivalence by comparing cores.
    HomotopyEq {
        first: PathBuf,
        second: PathBuf,
        /// Also run the brute-force search over maps in both directions.
        #[arg(long)]
        oracle: bool,
    },
    /// Is the core a single point?
    Contractible { file: PathBuf },
    /// Integral homology of the order complex.
    Homology { file: PathBuf },
    /// Size and homotopy classes of C(X, Y); Y defaults to X.
    FunctionSpace {
        domain: PathBuf,
        codomain: Option<PathBuf>,
    },
    /// Link-based classification of one point, or of every point.
    Gamma {
        file: PathBuf,
        label: Option<String>,
    },
    /// Search for a fixed-point-free monotone self-map.
    Fpp { file: PathBuf },
    /// Compare the compact-open and Alexandroff topologies on C(X, Y).
    TopologyCheck {
        domain: PathBuf,
        codomain: Option<PathBuf>,
    },
    /// Hasse diagram in Graphviz DOT.
    Dot {
        file: PathBuf,
        /// Gray out the points removed on the way to the core.
        #[arg(long)]
        core: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Chain,
    Antichain,
    Fence,
    Crown,
    Khalimsky,
    Spider,
    Random,
    RandomHeight1,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Core(#[from] CoreError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::GuardExceeded { .. })
            | CliError::Document(DocumentError::Invalid(CoreError::GuardExceeded { .. })) => {
                EXIT_GUARD
            }
            _ => EXIT_INPUT,
        }
    }
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Loaded {
    name: String,
    poset: Poset,
    basepoint: Option<usize>,
}

struct Ctx {
    limits: Limits,
    seed: u64,
    pointed: bool,
    json: bool,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<Loaded, CliError> {
        let doc = load(path)?;
        let (poset, base) = doc.to_poset()?;
        if self.pointed && base.is_none() {
            return Err(CliError::Usage(format!(
                "{}: --pointed needs a `base` line",
                path.display()
            )));
        }
        Ok(Loaded {
            name: doc.name,
            poset,
            basepoint: if self.pointed { base } else { None },
        })
    }
}

/// A report with fields in insertion order.
struct Report {
    fields: Vec<(&'static str, Value)>,
    summary: String,
    code: i32,
}

impl Report {
    fn new(summary: String) -> Self {
        Report {
            fields: Vec::new(),
            summary,
            code: EXIT_OK,
        }
    }

    fn field(mut self, key: &'static str, v: impl Into<Value>) -> Self {
        self.fields.push((key, v.into()));
        self
    }

    fn negative_if(mut self, cond: bool) -> Self {
        if cond {
            self.code = EXIT_NEGATIVE;
        }
        self
    }

    fn render(&self, json: bool) -> String {
        if json {
            let mut m = Map::new();
            for (k, v) in &self.fields {
                m.insert(k.to_string(), v.clone());
            }
            return serde_json::to_string_pretty(&Value::Object(m)).expect("report serializes")
                + "\n";
        }
        let mut out = String::new();
        for (k, v) in &self.fields {
            match v {
                Value::Array(items) if items.iter().any(|i| i.is_object()) => {
                    out.push_str(&format!("{k}:\n"));
                    for i in items {
                        out.push_str(&format!("  - {}\n", inline(i)));
                    }
                }
                _ => out.push_str(&format!("{k}: {}\n", inline(v))),
            }
        }
        out
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => format!(
            "[{}]",
            items.iter().map(inline).collect::<Vec<_>>().join(", ")
        ),
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", inline(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn labels(p: &Poset, ids: impl IntoIterator<Item = usize>) -> Vec<String> {
    ids.into_iter().map(|x| p.label(x).to_string()).collect()
}

fn map_value(domain: &Poset, codomain: &Poset, f: &MonotoneMap) -> Value {
    Value::Array(
        (0..domain.len())
            .map(|x| json!([domain.label(x), codomain.label(f.apply(x))]))
            .collect(),
    )
}

fn trace_steps(t: &DismantlingTrace) -> Value {
    let p = &t.start;
    Value::Array(
        t.steps
            .iter()
            .map(|s| {
                json!({
                    "kind": serde_json::to_value(s.kind).expect("step kind serializes"),
                    "removed": labels(p, s.removed.ones()),
                    "targets": s.targets.iter()
                        .filter(|(x, _)| s.removed.contains(*x))
                        .map(|&(x, y)| json!([p.label(x), p.label(y)]))
                        .collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn groups_value(h: &HomologyProfile) -> Value {
    serde_json::to_value(&h.groups).expect("homology serializes")
}

fn betti_line(h: &HomologyProfile) -> String {
    h.groups
        .iter()
        .map(|g| {
            let mut s = g.betti.to_string();
            for t in &g.torsion {
                s.push_str(&format!("+Z/{t}"));
            }
            s
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_num<T: std::str::FromStr>(params: &[String], i: usize, what: &str) -> Result<T, CliError> {
    params
        .get(i)
        .ok_or_else(|| CliError::Usage(format!("missing parameter `{what}`")))?
        .parse()
        .map_err(|_| CliError::Usage(format!("parameter `{what}` is not a valid number")))
}

fn expect_params(params: &[String], n: usize, usage: &str) -> Result<(), CliError> {
    if params.len() == n {
        Ok(())
    } else {
        Err(CliError::Usage(format!("usage: gen {usage}")))
    }
}

fn generate(
    ctx: &Ctx,
    family: Family,
    params: &[String],
) -> Result<(String, Poset, Option<usize>), CliError> {
    Ok(match family {
        Family::Chain | Family::Antichain | Family::Fence | Family::Crown => {
            expect_params(params, 1, "<family> N")?;
            let n: usize = parse_num(params, 0, "N")?;
            let (stem, p) = match family {
                Family::Chain => ("chain", generators::chain(n)),
                Family::Antichain => ("antichain", generators::antichain(n)),
                Family::Fence => ("fence", generators::fence(n)?),
                _ => ("crown", generators::crown(n)?),
            };
            (format!("{stem}{n}"), p, None)
        }
        Family::Khalimsky => {
            expect_params(params, 2, "khalimsky A B")?;
            let a: i64 = parse_num(params, 0, "A")?;
            let b: i64 = parse_num(params, 1, "B")?;
            (
                format!("khalimsky{a}_{b}"),
                generators::khalimsky_interval(a, b)?,
                None,
            )
        }
        Family::Spider => {
            let legs = (0..params.len())
                .map(|i| parse_num(params, i, "leg length"))
                .collect::<Result<Vec<usize>, _>>()?;
            let s = generators::spider(&legs)?;
            let name = format!(
                "spider{}",
                legs.iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join("-")
            );
            (name, s.poset, Some(s.basepoint))
        }
        Family::Random | Family::RandomHeight1 => {
            expect_params(params, 2, "random N P")?;
            let n: usize = parse_num(params, 0, "N")?;
            let prob: f64 = parse_num(params, 1, "P")?;
            let p = if matches!(family, Family::Random) {
                generators::random_poset(n, prob, ctx.seed)?
            } else {
                generators::random_height_one(n, prob, ctx.seed)?
            };
            (format!("random{n}s{}", ctx.seed), p, None)
        }
    })
}

fn dispatch(ctx: &Ctx, command: Command) -> Result<(Report, Option<String>), CliError> {
    let limits = &ctx.limits;
    let report = match command {
        Command::Gen { family, params } => {
            let (name, p, base) = generate(ctx, family, &params)?;
            let doc = PosetDocument::from_poset(&name, &p, base);
            let text = if ctx.json {
                emit_json(&doc)
            } else {
                emit_poset(&doc)?
            };
            let summary = format!(
                "{name}: {}, {}",
                plural(p.len(), "element"),
                plural(p.covers().len(), "cover")
            );
            return Ok((Report::new(summary), Some(text)));
        }
        Command::Dot {
            file,
            core: with_core,
        } => {
            let l = ctx.load(&file)?;
            let trace =
                with_core.then(|| core(&l.poset, l.basepoint, RemovalPolicy::default()).trace);
            let dot = emit_dot(&l.name, &l.poset, trace.as_ref());
            let text = if ctx.json {
                serde_json::to_string_pretty(&json!({ "dot": dot })).expect("serializes") + "\n"
            } else {
                dot
            };
            let summary = format!(
                "{}: {}, {}",
                l.name,
                plural(l.poset.len(), "node"),
                plural(l.poset.covers().len(), "edge")
            );
            return Ok((Report::new(summary), Some(text)));
        }
        Command::Core { file } => {
            let l = ctx.load(&file)?;
            let c = core(&l.poset, l.basepoint, RemovalPolicy::default());
            let summary = format!(
                "{}: core has {} of {} points after {} removals",
                l.name,
                c.poset.len(),
                l.poset.len(),
                c.trace.steps.len()
            );
            Report::new(summary)
                .field("name", l.name.clone())
                .field("size", l.poset.len())
                .field(
                    "basepoint",
                    l.basepoint.map(|b| l.poset.label(b).to_string()),
                )
                .field("removals", c.trace.steps.len())
                .field("steps", trace_steps(&c.trace))
                .field("core_size", c.poset.len())
                .field("core", labels(&l.poset, c.elements.iter().copied()))
        }
        Command::Dismantle { file, max_rounds } => {
            let l = ctx.load(&file)?;
            let rounds = max_rounds.unwrap_or(2 * l.poset.len() + 4);
            let s = standard_sequence(&l.poset, l.basepoint, rounds)?;
            let (fin, _) = s.trace.final_poset();
            let c = core(&l.poset, l.basepoint, RemovalPolicy::default());
            let matches = finspace::homotopy::are_isomorphic(&fin, &c.poset).is_some();
            let summary = format!(
                "{}: {} after {} rounds, {} left",
                l.name,
                if s.stabilized {
                    "stabilized"
                } else {
                    "round limit reached"
                },
                s.rounds_run,
                plural(fin.len(), "point")
            );
            let mut r = Report::new(summary)
                .field("name", l.name.clone())
                .field("stabilized", s.stabilized)
                .field("rounds_run", s.rounds_run)
                .field("effective_rounds", s.effective_rounds)
                .field("steps", trace_steps(&s.trace))
                .field("final_size", fin.len())
                .field("final", labels(&l.poset, s.trace.final_set.ones()))
                .field("isomorphic_to_core", matches);
            if !s.stabilized {
                r.code = EXIT_GUARD;
            }
            r
        }
        Command::HomotopyEq {
            first,
            second,
            oracle,
        } => {
            let a = ctx.load(&first)?;
            let b = ctx.load(&second)?;
            let ev = are_homotopy_equivalent(&a.poset, a.basepoint, &b.poset, b.basepoint);
            let iso = ev.iso.as_ref().map(|w| {
                Value::Array(
                    (0..ev.core_p.poset.len())
                        .map(|x| {
                            json!([
                                a.poset.label(ev.core_p.elements[x]),
                                b.poset.label(ev.core_q.elements[w.mapping[x]])
                            ])
                        })
                        .collect(),
                )
            });
            let oracle_verdict = if oracle {
                Some(brute_force_homotopy_equivalent(&a.poset, &b.poset, limits)?)
            } else {
                None
            };
            let summary = format!(
                "{} and {} are {}homotopy equivalent (cores of size {} and {})",
                a.name,
                b.name,
                if ev.equivalent { "" } else { "not " },
                ev.core_p.poset.len(),
                ev.core_q.poset.len()
            );
            Report::new(summary)
                .field("first", a.name.clone())
                .field("second", b.name.clone())
                .field("equivalent", ev.equivalent)
                .field(
                    "core_sizes",
                    json!([ev.core_p.poset.len(), ev.core_q.poset.len()]),
                )
                .field(
                    "first_core",
                    labels(&a.poset, ev.core_p.elements.iter().copied()),
                )
                .field(
                    "second_core",
                    labels(&b.poset, ev.core_q.elements.iter().copied()),
                )
                .field("isomorphism", iso.unwrap_or(Value::Null))
                .field("oracle", oracle_verdict)
                .negative_if(!ev.equivalent)
        }
        Command::Contractible { file } => {
            let l = ctx.load(&file)?;
            let c = core(&l.poset, l.basepoint, RemovalPolicy::default());
            let contractible = c.poset.len() == 1;
            let height_one = match contractible_height1(&l.poset) {
                Ok(v) => Some(v),
                Err(CoreError::HeightExceeded(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let summary = format!(
                "{} is {}contractible (core size {})",
                l.name,
                if contractible { "" } else { "not " },
                c.poset.len()
            );
            Report::new(summary)
                .field("name", l.name.clone())
                .field("contractible", contractible)
                .field("core_size", c.poset.len())
                .field("height", l.poset.height().ok())
                .field("height_one_criterion", height_one)
                .negative_if(!contractible)
        }
        Command::Homology { file } => {
            let l = ctx.load(&file)?;
            let k = order_complex(&l.poset, limits)?;
            let h = homology(&k, false, limits)?;
            let hr = homology(&k, true, limits)?;
            let summary = format!(
                "{}: betti ({}), reduced ({})",
                l.name,
                betti_line(&h),
                betti_line(&hr)
            );
            Report::new(summary)
                .field("name", l.name.clone())
                .field("f_vector", k.f_vector())
                .field("euler_characteristic", k.euler_characteristic())
                .field("betti", betti_line(&h))
                .field("reduced_betti", betti_line(&hr))
                .field("homology", groups_value(&h))
                .field("reduced_homology", groups_value(&hr))
                .field("acyclic", hr.is_acyclic())
        }
        Command::FunctionSpace { domain, codomain } => {
            let x = ctx.load(&domain)?;
            let y = match &codomain {
                Some(path) => Some(ctx.load(path)?),
                None => None,
            };
            let yp = y.as_ref().map_or(&x.poset, |l| &l.poset);
            let c = enumerate_monotone(&x.poset, yp, limits)?;
            let classes = c.homotopy_classes();
            let mut sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            let id_class = y.is_none().then(|| {
                let id = c
                    .index_of(&MonotoneMap::identity(&x.poset))
                    .expect("identity is monotone");
                classes.iter().find(|k| k.contains(&id)).map_or(0, Vec::len)
            });
            let summary = format!(
                "C({}, {}): {} maps in {} classes",
                x.name,
                y.as_ref().map_or(&x.name, |l| &l.name),
                c.len(),
                classes.len()
            );
            Report::new(summary)
                .field("domain_size", x.poset.len())
                .field("codomain_size", yp.len())
                .field("maps", c.len())
                .field("classes", classes.len())
                .field("class_sizes", sizes)
                .field("id_class_size", id_class)
        }
        Command::Gamma { file, label } => {
            let l = ctx.load(&file)?;
            let points: Vec<usize> = match &label {
                Some(s) => vec![l
                    .poset
                    .index_of(s)
                    .ok_or_else(|| CoreError::UnknownLabel(s.clone()))?],
                None => (0..l.poset.len()).collect(),
            };
            let mut rows = Vec::new();
            let mut negative = false;
            for &x in &points {
                let r = is_gamma_point(&l.poset, x, limits);
                negative |= r.verdict == finspace::complex::GammaVerdict::No;
                rows.push(json!({
                    "point": l.poset.label(x),
                    "verdict": serde_json::to_value(r.verdict).expect("verdict serializes"),
                    "link_size": r.link_size,
                    "link_core_size": r.link_core_size,
                }));
            }
            let summary = match &label {
                Some(s) => format!("{}: {}", s, rows[0]["verdict"].as_str().unwrap_or("?")),
                None => format!("{}: classified {} points", l.name, rows.len()),
            };
            Report::new(summary)
                .field("name", l.name.clone())
                .field("points", rows)
                .negative_if(label.is_some() && negative)
        }
        Command::Fpp { file } => {
            let l = ctx.load(&file)?;
            let r = has_fpp(&l.poset, limits)?;
            let summary = format!(
                "{} {} the fixed point property",
                l.name,
                if r.has_fpp { "has" } else { "lacks" }
            );
            Report::new(summary)
                .field("name", l.name.clone())
                .field("has_fpp", r.has_fpp)
                .field(
                    "witness",
                    r.witness
                        .as_ref()
                        .map_or(Value::Null, |w| map_value(&l.poset, &l.poset, w)),
                )
                .negative_if(!r.has_fpp)
        }
        Command::TopologyCheck { domain, codomain } => {
            let x = ctx.load(&domain)?;
            let y = match &codomain {
                Some(path) => Some(ctx.load(path)?),
                None => None,
            };
            let yp = y.as_ref().map_or(&x.poset, |l| &l.poset);
            let c = enumerate_monotone(&x.poset, yp, limits)?;
            let alex = alexandroff_topology(c.order()?, limits)?;
            let sub = compact_open_subbasis(&c);
            let generated = generate_topology(&sub, limits)?;
            let equal = families_equal(&generated, &alex);
            let spec = specialization_order(&alexandroff_topology(&x.poset, limits)?)?;
            let round_trip = (0..x.poset.len())
                .all(|a| (0..x.poset.len()).all(|b| spec.leq(a, b) == x.poset.leq(a, b)));
            let summary = format!(
                "C({}, {}): compact-open {} Alexandroff ({} open sets)",
                x.name,
                y.as_ref().map_or(&x.name, |l| &l.name),
                if equal { "equals" } else { "differs from" },
                alex.len()
            );
            Report::new(summary)
                .field("maps", c.len())
                .field("subbasis_size", sub.len())
                .field("generated_size", generated.len())
                .field("alexandroff_size", alex.len())
                .field("compact_open_equals_alexandroff", equal)
                .field("specialization_round_trip", round_trip)
                .negative_if(!(equal && round_trip))
        }
    };
    Ok((report, None))
}

/// Runs one command line (including the program name) in-process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Outcome {
                code,
                stdout,
                stderr,
            };
        }
    };
    let mut limits = Limits::default();
    if let Some(n) = cli.max_enum {
        limits.max_maps = n;
    }
    let ctx = Ctx {
        limits,
        seed: cli.seed,
        pointed: cli.pointed,
        json: cli.json,
    };
    match dispatch(&ctx, cli.command) {
        Ok((report, raw)) => Outcome {
            code: report.code,
            stdout: raw.unwrap_or_else(|| report.render(ctx.json)),
            stderr: format!("{}\n", report.summary),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
