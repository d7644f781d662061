//! Subcommand execution.

use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use hclosed_core::compactify::{end_extension, one_point_extension, projective_witness_sym, EndExtension};
use hclosed_core::defset::DefSet;
use hclosed_core::ends::SymFilter;
use hclosed_core::extension::{projective_witness, star_and_kappa_finite, theta_quotient, Extension};
use hclosed_core::finite::{CompactWitness, CoverCompactMethod, FinitePretop, FiniteTopology, Subset};
use hclosed_core::maps::{
    f_sharp, is_continuous, is_perfect, is_strongly_irreducible, is_theta_continuous, is_w_theta_continuous, ContinuityMethod,
    ContinuityWitness, FiniteMap, PerfectMethod, PerfectWitness,
};
use hclosed_core::oracle::{self, OracleConfig};
use hclosed_core::regularization::{filter_tower, hset_check_finite, partial_regularization, phc_status, theta_of_topology, HsetMethod, PhcMethod};
use hclosed_core::symbolic::{builtin, SymbolicPretop};

use crate::error::CliError;
use crate::model::{parse_model, Item, Loc, Model, ModelDocument, Object, VicinityDecl};

#[derive(Parser, Debug)]
#[command(name = "hclosed", version, about = "Finite and symbolic pretopologies: checks, closures and constructions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Model file (`.pt`).
    #[arg(short = 'f', long = "file")]
    pub file: Option<String>,
    /// Declaration to work on; `construct projective` takes it twice.
    #[arg(long)]
    pub space: Vec<String>,
    #[arg(long)]
    pub map: Option<String>,
    /// Set literal, e.g. `{1 3}` or `grid(G; cols>0)`.
    #[arg(long)]
    pub set: Option<String>,
    /// Which characterization to evaluate.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub iterations: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and resolve a model file.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Print the normalized document.
        #[arg(long)]
        print: bool,
    },
    /// adh, inh, cl-theta, regularize, limits, tower, ends.
    Compute {
        op: String,
        #[command(flatten)]
        common: Common,
    },
    /// hausdorff, topological, regular, compact, compact-set, cover-compact, quasi-phc, phc, h-closed, h-set.
    Check {
        property: String,
        #[command(flatten)]
        common: Common,
    },
    /// continuous, perfect, strongly-irreducible, w-theta-continuous, theta-continuous, surjective, image, preimage, f-sharp.
    Map {
        property: String,
        #[command(flatten)]
        common: Common,
    },
    /// regularize, restrict, theta-quotient, strict, simple, kappa, one-point, projective.
    Construct {
        kind: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the property batteries over enumerated finite spaces.
    Oracle {
        #[arg(long, default_value_t = 3)]
        max_points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Restrict to these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Describe a built-in symbolic space or run one operation on it.
    Builtin {
        name: String,
        #[arg(long)]
        compute: Option<String>,
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
    },
}

/// What a command found. `holds` is `Some(false)` when a checked property fails.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub witness: Option<Value>,
    pub text: String,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub command: String,
    pub subject: Option<String>,
    pub file: Option<String>,
    pub set: Option<String>,
    pub method: Option<String>,
    pub iterations: Option<usize>,
    pub engine: String,
}

/// The `--json` report. Field order is fixed by declaration order.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub result: Value,
    pub witness: Value,
    pub elapsed_ms: u64,
    pub provenance: Provenance,
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn plain(result: Value, text: impl Into<String>) -> Outcome {
    Outcome { result, witness: None, text: text.into(), holds: None }
}

fn verdict(holds: bool, witness: Option<(Value, String)>) -> Outcome {
    let (witness, text) = match witness {
        Some((w, t)) if !holds => (Some(w), format!("false\nwitness: {t}")),
        _ => (None, holds.to_string()),
    };
    Outcome { result: Value::Bool(holds), witness, text, holds: Some(holds) }
}

fn names(x: &FinitePretop, s: Subset) -> Value {
    json!(x.names_of(s))
}

fn finite_set(x: &FinitePretop, s: Subset) -> (Value, String) {
    (names(x, s), x.fmt_set(s))
}

fn set_outcome(x: &FinitePretop, s: Subset) -> Outcome {
    let (v, t) = finite_set(x, s);
    plain(v, t)
}

fn defset_outcome(s: &DefSet) -> Outcome {
    plain(Value::String(s.to_string()), s.to_string())
}

fn load(common: &Common) -> Result<Model, CliError> {
    match &common.file {
        None => Ok(Model::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), msg: e.to_string() })?;
            Model::resolve(&parse_model(&text)?)
        }
    }
}

fn read_document(common: &Common) -> Result<ModelDocument, CliError> {
    let Some(path) = &common.file else { return usage("validate needs -f FILE") };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), msg: e.to_string() })?;
    parse_model(&text)
}

fn one_space(common: &Common) -> Result<&str, CliError> {
    match common.space.as_slice() {
        [s] => Ok(s),
        [] => usage("--space NAME is required"),
        _ => usage("give --space once"),
    }
}

fn need_set(common: &Common) -> Result<&str, CliError> {
    common.set.as_deref().ok_or_else(|| CliError::Usage("--set LITERAL is required".into()))
}

fn method<T: Copy>(given: Option<&str>, options: &[(&str, T)]) -> Result<T, CliError> {
    match given {
        None => Ok(options[0].1),
        Some(m) => options.iter().find(|(n, _)| *n == m).map(|(_, v)| *v).ok_or_else(|| {
            let known: Vec<_> = options.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!("unknown method `{m}`; expected one of {}", known.join(", ")))
        }),
    }
}

const CONTINUITY: [(&str, ContinuityMethod); 5] = [
    ("vicinity", ContinuityMethod::Vicinity),
    ("limit", ContinuityMethod::Limit),
    ("adh-filter", ContinuityMethod::AdhFilter),
    ("adh-set", ContinuityMethod::AdhSet),
    ("inh", ContinuityMethod::Inh),
];
const PERFECT: [(&str, PerfectMethod); 3] =
    [("definition", PerfectMethod::Definition), ("adh-inequality", PerfectMethod::AdhInequality), ("a-and-b", PerfectMethod::AAndB)];
const COVER: [(&str, CoverCompactMethod); 3] = [
    ("cover", CoverCompactMethod::Cover),
    ("filter-refines", CoverCompactMethod::FilterRefines),
    ("vicinity-separation", CoverCompactMethod::VicinitySeparation),
];
const PHC: [(&str, PhcMethod); 4] = [
    ("rpi-compact", PhcMethod::RpiCompact),
    ("adh-cover", PhcMethod::AdhCover),
    ("inherent-filter", PhcMethod::InherentFilter),
    ("tower-adh", PhcMethod::TowerAdh),
];
const HSET: [(&str, HsetMethod); 3] =
    [("open-filter", HsetMethod::OpenFilter), ("open-ultrafilter", HsetMethod::OpenUltrafilter), ("theta-adh", HsetMethod::ThetaAdh)];

/// A space-like declaration.
enum Subject {
    Finite { x: FinitePretop, topology: Option<FiniteTopology> },
    Symbolic(SymbolicPretop),
}

fn subject(model: &Model, name: &str) -> Result<Subject, CliError> {
    match model.get(name)? {
        Object::Builtin(s) => Ok(Subject::Symbolic(s.clone())),
        Object::Topology(t) => Ok(Subject::Finite { x: t.to_pretop(), topology: Some(t.clone()) }),
        _ => Ok(Subject::Finite { x: model.finite(name, Loc::default())?, topology: None }),
    }
}

fn iterate(n: usize, mut s: Subset, f: impl Fn(Subset) -> Subset) -> Subset {
    for _ in 0..n {
        s = f(s);
    }
    s
}

fn compute_finite(model: &Model, name: &str, x: &FinitePretop, topology: Option<&FiniteTopology>, op: &str, c: &Common) -> Result<Outcome, CliError> {
    let set = || model.finite_set(need_set(c)?, x);
    match op {
        "adh" => Ok(set_outcome(x, iterate(c.iterations, set()?, |s| x.adh(s)))),
        "inh" => Ok(set_outcome(x, iterate(c.iterations, set()?, |s| x.inh(s)))),
        "cl-theta" => {
            // θ-closure is adherence in the partial regularization, or in θ(τ) for a topology
            let r = match topology {
                Some(t) => theta_of_topology(t).theta,
                None => partial_regularization(x),
            };
            Ok(set_outcome(x, iterate(c.iterations, set()?, |s| r.adh(s))))
        }
        "limits" => {
            let k = set()?;
            if k == 0 {
                return Err(hclosed_core::Error::EmptyKernel.into());
            }
            Ok(set_outcome(x, x.limits(k)))
        }
        "regularize" => {
            let r = iterate_space(c.iterations, x);
            Ok(space_outcome(&format!("{name}_r"), &r, json!({ "vicinities": vicinity_json(&r) })))
        }
        "tower" => {
            let t = filter_tower(x, set()?)?;
            let levels: Vec<String> = t.levels.iter().map(|&l| x.fmt_set(l)).collect();
            let result = json!({
                "levels": t.levels.iter().map(|&l| names(x, l)).collect::<Vec<_>>(),
                "stabilized_at": t.stabilized_at,
                "limit": names(x, t.limit),
                "open": t.open,
                "inherent": t.inherent,
            });
            let text = format!(
                "levels: {}\nstabilized at: {}\nlimit: {}\nopen: {}\ninherent: {}",
                levels.join(" "),
                t.stabilized_at,
                x.fmt_set(t.limit),
                t.open,
                t.inherent
            );
            Ok(plain(result, text))
        }
        _ => usage(format!("unknown operation `{op}` for a finite space; expected adh, inh, cl-theta, limits, regularize or tower")),
    }
}

fn iterate_space(n: usize, x: &FinitePretop) -> FinitePretop {
    (0..n).fold(x.clone(), |acc, _| partial_regularization(&acc))
}

fn vicinity_json(x: &FinitePretop) -> Value {
    let map: serde_json::Map<String, Value> = (0..x.len()).map(|p| (x.names()[p].clone(), names(x, x.vicinity(p)))).collect();
    Value::Object(map)
}

/// The declaration printing `x` in model syntax.
pub fn space_item(name: &str, x: &FinitePretop) -> Item {
    let vicinities = (0..x.len())
        .filter(|&p| x.vicinity(p) != 1 << p)
        .map(|p| VicinityDecl {
            point: x.names()[p].clone(),
            set: x.names_of(x.vicinity(p)).into_iter().map(String::from).collect(),
            loc: Loc::default(),
        })
        .collect();
    Item::Space { name: name.to_string(), points: x.names().to_vec(), vicinities, loc: Loc::default() }
}

fn space_outcome(name: &str, x: &FinitePretop, mut result: Value) -> Outcome {
    let doc = ModelDocument { items: vec![space_item(name, x)] }.to_string();
    result["document"] = Value::String(doc.clone());
    plain(result, doc.trim_end().to_string())
}

fn compute_symbolic(model: &Model, x: &SymbolicPretop, op: &str, c: &Common) -> Result<Outcome, CliError> {
    let set = || model.parse_set(need_set(c)?, x.schema());
    match op {
        "adh" => {
            let s = (0..c.iterations).try_fold(set()?, |s, _| x.adh(&s))?;
            Ok(defset_outcome(&s))
        }
        "inh" => {
            let s = (0..c.iterations).try_fold(set()?, |s, _| x.inh(&s))?;
            Ok(defset_outcome(&s))
        }
        "cl-theta" => Ok(defset_outcome(&x.cl_theta(&set()?, c.iterations)?)),
        "regularize" => {
            let r = (0..c.iterations).try_fold(x.clone(), |acc, _| acc.regularize())?;
            let lines = r.describe();
            Ok(plain(json!(lines), lines.join("\n")))
        }
        "ends" => {
            let reports = x.end_reports()?;
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| json!({ "end": r.label, "converging": r.converging.to_string(), "failing": r.failing.to_string() }))
                .collect();
            let text: Vec<String> =
                reports.iter().map(|r| format!("{}: converging {}, failing {}", r.label, r.converging, r.failing)).collect();
            Ok(plain(Value::Array(rows), text.join("\n")))
        }
        _ => usage(format!("unknown operation `{op}` for a symbolic space; expected adh, inh, cl-theta, regularize or ends")),
    }
}

fn compact_witness(x: &FinitePretop, w: &CompactWitness) -> (Value, String) {
    match w {
        CompactWitness::Kernel(k) => (json!({ "kernel": names(x, *k) }), format!("filter of {}", x.fmt_set(*k))),
        CompactWitness::Cover(c) => {
            let sets: Vec<String> = c.iter().map(|&s| x.fmt_set(s)).collect();
            (json!({ "cover": c.iter().map(|&s| names(x, s)).collect::<Vec<_>>() }), format!("cover {}", sets.join(" ")))
        }
    }
}

fn check_finite(model: &Model, x: &FinitePretop, topology: Option<&FiniteTopology>, prop: &str, c: &Common) -> Result<Outcome, CliError> {
    let set = || model.finite_set(need_set(c)?, x);
    let m = c.method.as_deref();
    let point = |p: usize| (json!(x.names()[p]), x.names()[p].clone());
    Ok(match prop {
        "hausdorff" => {
            let v = x.is_hausdorff();
            verdict(
                v.holds,
                v.witness.map(|(a, b)| {
                    let (a, b) = (&x.names()[a], &x.names()[b]);
                    (json!([a, b]), format!("({a}, {b})"))
                }),
            )
        }
        "topological" => {
            let v = x.is_topological();
            verdict(v.holds, v.witness.map(|s| finite_set(x, s)))
        }
        "regular" => {
            let v = x.is_regular();
            verdict(v.holds, v.witness.map(point))
        }
        "compact" | "compact-set" => {
            let a = if prop == "compact" { x.full() } else { set()? };
            let v = x.compact_at(a, a, method(m, &[("filter", hclosed_core::finite::CompactMethod::Filter), ("cover", hclosed_core::finite::CompactMethod::Cover)])?)?;
            verdict(v.holds, v.witness.as_ref().map(|w| compact_witness(x, w)))
        }
        "cover-compact" => verdict(x.is_cover_compact(set()?, method(m, &COVER)?), None),
        "quasi-phc" => verdict(phc_status(x, method(m, &PHC)?).quasi_phc, None),
        "phc" => {
            let s = phc_status(x, method(m, &PHC)?);
            let mut o = verdict(s.phc, None);
            o.result = json!({ "phc": s.phc, "quasi_phc": s.quasi_phc, "hausdorff": s.hausdorff });
            if !s.phc {
                let why = if s.quasi_phc { "not Hausdorff" } else { "not quasi-PHC" };
                o.witness = Some(json!(why));
                o.text = format!("false\nwitness: {why}");
            }
            o
        }
        "h-closed" => {
            let r = match topology {
                Some(t) => theta_of_topology(t).theta,
                None => partial_regularization(x),
            };
            let v = r.compact_at(r.full(), r.full(), hclosed_core::finite::CompactMethod::Filter)?;
            verdict(v.holds, v.witness.as_ref().map(|w| compact_witness(x, w)))
        }
        "h-set" => {
            let Some(t) = topology else { return usage("h-set needs a topology declaration") };
            verdict(hset_check_finite(t, set()?, method(m, &HSET)?)?, None)
        }
        _ => return usage(format!("unknown property `{prop}`")),
    })
}

fn check_symbolic(model: &Model, x: &SymbolicPretop, prop: &str, c: &Common) -> Result<Outcome, CliError> {
    let schema = x.schema();
    Ok(match prop {
        "hausdorff" => {
            let v = x.is_hausdorff()?;
            verdict(
                v.holds,
                v.witness.map(|(a, b)| {
                    let (a, b) = (schema.point_name(a), schema.point_name(b));
                    (json!([a, b]), format!("({a}, {b})"))
                }),
            )
        }
        "compact" | "h-closed" => {
            let v = if prop == "compact" { x.is_compact()? } else { x.regularize()?.is_compact()? };
            verdict(v.holds, v.witness.map(|w| (json!(w.label), format!("end {}", w.label))))
        }
        "h-set" | "compact-set" => {
            let a = model.parse_set(need_set(c)?, schema)?;
            let space = if prop == "h-set" { x.regularize()? } else { x.clone() };
            let v = space.compact_at(&SymFilter::Principal(a.clone()), &a)?;
            verdict(v.holds, v.witness.map(|w| (json!(w.to_string()), w.to_string())))
        }
        _ => return usage(format!("unknown property `{prop}` for a symbolic space; expected hausdorff, compact, h-closed, h-set or compact-set")),
    })
}

fn continuity_witness(x: &FinitePretop, y: &FinitePretop, w: &ContinuityWitness) -> (Value, String) {
    match w {
        ContinuityWitness::Limit { kernel, point } => (
            json!({ "kernel": names(x, *kernel), "point": x.names()[*point] }),
            format!("filter of {} converges to {} but its image does not", x.fmt_set(*kernel), x.names()[*point]),
        ),
        ContinuityWitness::Adherence(s) => (json!({ "adherence": names(x, *s) }), format!("adherence of {}", x.fmt_set(*s))),
        ContinuityWitness::Inherence(s) => (json!({ "inherence": names(y, *s) }), format!("inherence of {}", y.fmt_set(*s))),
        ContinuityWitness::Vicinity { point, vicinity } => (
            json!({ "point": x.names()[*point], "vicinity": names(y, *vicinity) }),
            format!("image of M({}) is not inside {}", x.names()[*point], y.fmt_set(*vicinity)),
        ),
    }
}

fn perfect_witness(x: &FinitePretop, y: &FinitePretop, w: &PerfectWitness) -> (Value, String) {
    match w {
        PerfectWitness::Convergent { kernel, point, meshing } => (
            json!({ "kernel": names(y, *kernel), "point": y.names()[*point], "meshing": names(x, *meshing) }),
            format!(
                "filter of {} converges to {}; the preimage filter is not compact at its fiber ({} meshes)",
                y.fmt_set(*kernel),
                y.names()[*point],
                x.fmt_set(*meshing)
            ),
        ),
        PerfectWitness::Adherence(s) => (json!({ "adherence": names(x, *s) }), format!("adherence of the image of {}", x.fmt_set(*s))),
        PerfectWitness::Fiber(p) => (json!({ "fiber": y.names()[*p] }), format!("fiber over {} is not cover-compact", y.names()[*p])),
    }
}

fn run_map(model: &Model, prop: &str, c: &Common) -> Result<Outcome, CliError> {
    let Some(name) = c.map.as_deref() else { return usage("--map NAME is required") };
    let Object::Map { map, source, target } = model.get(name)? else {
        return Err(CliError::Resolution { loc: Loc::default(), msg: format!("`{name}` is not a map") });
    };
    let x = model.finite(source, Loc::default())?;
    let y = model.finite(target, Loc::default())?;
    let m = c.method.as_deref();
    let f: &FiniteMap = map;
    Ok(match prop {
        "continuous" => {
            let v = is_continuous(&x, &y, f, method(m, &CONTINUITY)?)?;
            verdict(v.holds, v.witness.as_ref().map(|w| continuity_witness(&x, &y, w)))
        }
        "perfect" => {
            let r = is_perfect(&x, &y, f, method(m, &PERFECT)?)?;
            let mut o = verdict(r.holds, r.witness.as_ref().map(|w| perfect_witness(&x, &y, w)));
            if r.condition_a.is_some() {
                o.result = json!({ "holds": r.holds, "condition_a": r.condition_a, "condition_b": r.condition_b });
            }
            o
        }
        "strongly-irreducible" => {
            let v = is_strongly_irreducible(&x, f);
            verdict(
                v.holds,
                v.witness.map(|(a, b)| (json!([names(&x, a), names(&x, b)]), format!("({}, {})", x.fmt_set(a), x.fmt_set(b)))),
            )
        }
        "w-theta-continuous" => verdict(is_w_theta_continuous(&x, &y, f), None),
        "theta-continuous" => match (model.get(source)?, model.get(target)?) {
            (Object::Topology(s), Object::Topology(t)) => verdict(is_theta_continuous(s, t, f), None),
            _ => return usage("theta-continuous needs a map between topology declarations"),
        },
        "surjective" => {
            let missing = (0..y.len()).find(|&q| f.fiber(q) == 0);
            verdict(missing.is_none(), missing.map(|q| (json!(y.names()[q]), format!("{} has an empty fiber", y.names()[q]))))
        }
        "image" => set_outcome(&y, f.image(model.finite_set(need_set(c)?, &x)?)),
        "preimage" => set_outcome(&x, f.preimage(model.finite_set(need_set(c)?, &y)?)),
        "f-sharp" => set_outcome(&y, f_sharp(f, model.finite_set(need_set(c)?, &x)?)),
        _ => return usage(format!("unknown map property `{prop}`")),
    })
}

fn extension_of<'a>(model: &'a Model, name: &str) -> Result<&'a Extension, CliError> {
    match model.get(name)? {
        Object::Extension { ext, .. } => Ok(ext),
        o => Err(CliError::Resolution { loc: Loc::default(), msg: format!("`{name}` is a {}, not an extension", o.kind()) }),
    }
}

fn end_extension_outcome(ex: &EndExtension) -> Result<Outcome, CliError> {
    let added: Vec<Value> = ex.added.iter().map(|a| json!({ "point": a.name, "absorbs": a.label })).collect();
    let compact = ex.is_compact()?;
    let hausdorff = ex.hausdorff()?;
    let mut text: Vec<String> = ex.added.iter().map(|a| format!("{} absorbs {}", a.name, a.label)).collect();
    text.push(format!("compact: {compact}"));
    text.push(format!("hausdorff: {}", hausdorff.holds));
    text.extend(ex.space.describe());
    let witness = hausdorff.witness.map(|(a, b)| json!([a, b]));
    Ok(Outcome {
        result: json!({ "added": added, "compact": compact, "hausdorff": hausdorff.holds, "rules": ex.space.describe() }),
        witness,
        text: text.join("\n"),
        holds: None,
    })
}

fn construct(model: &Model, kind: &str, c: &Common) -> Result<Outcome, CliError> {
    match kind {
        "regularize" => {
            let name = one_space(c)?;
            match subject(model, name)? {
                Subject::Finite { x, .. } => Ok(space_outcome(&format!("{name}_r"), &iterate_space(c.iterations, &x), json!({}))),
                Subject::Symbolic(s) => compute_symbolic(model, &s, "regularize", c),
            }
        }
        "restrict" => {
            let name = one_space(c)?;
            match subject(model, name)? {
                Subject::Finite { x, .. } => {
                    let a = model.finite_set(need_set(c)?, &x)?;
                    Ok(space_outcome(&format!("{name}_sub"), &x.restrict(a)?, json!({})))
                }
                Subject::Symbolic(s) => {
                    let a = model.parse_set(need_set(c)?, s.schema())?;
                    let lines = s.restrict(&a)?.describe();
                    Ok(plain(json!(lines), lines.join("\n")))
                }
            }
        }
        "theta-quotient" => {
            let Some(name) = c.map.as_deref() else { return usage("--map NAME is required") };
            let Object::Map { map, source, target } = model.get(name)? else {
                return usage(format!("`{name}` is not a map"));
            };
            let x = model.finite(source, Loc::default())?;
            let y = model.finite(target, Loc::default())?;
            let q = theta_quotient(&x, map, y.names().to_vec())?;
            let report = serde_json::to_value(&q.report).expect("report serializes");
            let mut o = space_outcome(&format!("{target}_theta"), &q.space, json!({ "report": report }));
            let r = &q.report;
            o.text.push_str(&format!(
                "\nfibers cover-compact: {}\nsource compact: {}\nsource hausdorff: {}\nlemma agrees: {}\nstrongly irreducible: {}\nw-theta-continuous: {}\nquotient hausdorff: {}\nquotient quasi-PHC: {}",
                r.fibers_cover_compact, r.source_compact, r.source_hausdorff, r.lemma_agrees, r.strongly_irreducible, r.w_theta_continuous, r.quotient_hausdorff, r.quotient_quasi_phc
            ));
            Ok(o)
        }
        "strict" | "simple" => {
            let name = one_space(c)?;
            let e = extension_of(model, name)?;
            let s = if kind == "strict" { e.strict() } else { e.simple() };
            Ok(space_outcome(&format!("{name}_{kind}"), &s, json!({})))
        }
        "kappa" | "one-point" => {
            let name = one_space(c)?;
            match subject(model, name)? {
                Subject::Symbolic(s) => end_extension_outcome(&if kind == "kappa" { end_extension(&s)? } else { one_point_extension(&s)? }),
                Subject::Finite { x, .. } => {
                    if kind == "one-point" {
                        return usage("one-point needs a symbolic space");
                    }
                    let k = star_and_kappa_finite(&x);
                    let mut o = space_outcome(&format!("{name}_kappa"), &k.kappa, json!({ "note": k.note }));
                    o.text.push_str(&format!("\n# {}", k.note));
                    Ok(o)
                }
            }
        }
        "projective" => match c.space.as_slice() {
            [small, large] => {
                let (a, b) = (extension_of(model, small)?, extension_of(model, large)?);
                let w = projective_witness(a, b)?;
                let pairs = w.as_ref().map(|f| {
                    let (xs, xl) = (a.space(), b.space());
                    (0..xl.len()).map(|p| (xl.names()[p].clone(), xs.names()[f.apply(p)].clone(), Loc::default())).collect::<Vec<_>>()
                });
                let witness_doc = pairs.map(|pairs| {
                    ModelDocument { items: vec![Item::Map { name: "p".into(), source: large.clone(), target: small.clone(), pairs, loc: Loc::default() }] }
                        .to_string()
                });
                let holds = witness_doc.is_some();
                let text = match &witness_doc {
                    Some(d) => format!("true\n{}", d.trim_end()),
                    None => "false".into(),
                };
                Ok(Outcome { result: json!({ "leq": holds, "map": witness_doc }), witness: None, text, holds: Some(holds) })
            }
            [name] => {
                let Subject::Symbolic(s) = subject(model, name)? else {
                    return usage("projective takes two extensions, or one symbolic space");
                };
                let one = one_point_extension(&s)?;
                let ends = end_extension(&s)?;
                let w = projective_witness_sym(&one, &ends)?;
                let lines = w.map(|m| m.describe());
                let text = match &lines {
                    Some(l) => format!("one-point <= end extension\n{}", l.join("\n")),
                    None => "no coordinate-affine map from the end extension onto the one-point extension".into(),
                };
                Ok(Outcome { result: json!({ "leq": lines.is_some(), "map": lines }), witness: None, text, holds: Some(lines.is_some()) })
            }
            _ => usage("projective takes --space SMALLER --space LARGER"),
        },
        _ => usage(format!("unknown construction `{kind}`")),
    }
}

fn validate(common: &Common, print: bool) -> Result<Outcome, CliError> {
    let doc = read_document(common)?;
    let model = Model::resolve(&doc)?;
    let rows: Vec<Value> = model.order.iter().map(|n| json!({ "name": n, "kind": model.objects[n].kind() })).collect();
    let mut text: Vec<String> = model
        .order
        .iter()
        .map(|n| match &model.objects[n] {
            Object::Space(x) => format!("space {n}: {x}"),
            Object::Topology(t) => format!("topology {n}: {} points, {} open sets", t.names().len(), t.opens().len()),
            Object::Map { source, target, .. } => format!("map {n}: {source} -> {target}"),
            Object::Extension { space, ext } => format!("extension {n}: {space} over {}", ext.space().fmt_set(ext.base())),
            Object::Builtin(s) => format!("builtin {n}: {} rules", s.rules().len()),
            Object::Set(l) => format!("set {n} = {l}"),
        })
        .collect();
    let mut result = json!({ "declarations": rows });
    if print {
        text = vec![doc.to_string().trim_end().to_string()];
        result["document"] = Value::String(doc.to_string());
    }
    Ok(plain(result, text.join("\n")))
}

fn run_oracle(max_points: usize, seed: u64, workers: usize, suites: Vec<String>) -> Result<Outcome, CliError> {
    if let Some(s) = suites.iter().find(|s| !oracle::suite_names().contains(&s.as_str())) {
        return usage(format!("unknown suite `{s}`; expected one of {}", oracle::suite_names().join(", ")));
    }
    let cfg = OracleConfig { max_points, seed, workers, suites, ..Default::default() };
    let r = oracle::run(&cfg)?;
    let mut text: Vec<String> = r
        .suites
        .iter()
        .map(|s| {
            let status = if s.passed() { "pass" } else { "FAIL" };
            let mut line = format!("{}: {status} ({} checks, {} failures)", s.name, s.checks, s.failures);
            if let Some(w) = &s.first_counterexample {
                line.push_str(&format!("; first: {w}"));
            }
            line
        })
        .collect();
    let failed = r.suites.iter().filter(|s| !s.passed()).count();
    text.push(format!("{}/{} suites pass", r.suites.len() - failed, r.suites.len()));
    let witness = r.suites.iter().find(|s| !s.passed()).map(|s| json!({ "suite": s.name, "counterexample": s.first_counterexample }));
    Ok(Outcome { result: serde_json::to_value(&r).expect("summary serializes"), witness, text: text.join("\n"), holds: Some(r.all_pass) })
}

fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Validate { common, print } => validate(common, *print),
        Command::Compute { op, common } => {
            let model = load(common)?;
            match subject(&model, one_space(common)?)? {
                Subject::Finite { x, topology } => compute_finite(&model, one_space(common)?, &x, topology.as_ref(), op, common),
                Subject::Symbolic(s) => compute_symbolic(&model, &s, op, common),
            }
        }
        Command::Check { property, common } => {
            let model = load(common)?;
            match subject(&model, one_space(common)?)? {
                Subject::Finite { x, topology } => check_finite(&model, &x, topology.as_ref(), property, common),
                Subject::Symbolic(s) => check_symbolic(&model, &s, property, common),
            }
        }
        Command::Map { property, common } => run_map(&load(common)?, property, common),
        Command::Construct { kind, common } => construct(&load(common)?, kind, common),
        Command::Oracle { max_points, seed, workers, suites } => run_oracle(*max_points, *seed, *workers, suites.clone()),
        Command::Builtin { name, compute, check, set, method, iterations } => {
            let s = builtin(name).map_err(|e| CliError::Usage(e.to_string()))?;
            let model = Model::default();
            let common = Common { set: set.clone(), method: method.clone(), iterations: *iterations, ..Default::default() };
            match (compute, check) {
                (Some(_), Some(_)) => usage("give --compute or --check, not both"),
                (Some(op), None) => compute_symbolic(&model, &s, op, &common),
                (None, Some(prop)) => check_symbolic(&model, &s, prop, &common),
                (None, None) => {
                    let lines = s.describe();
                    Ok(plain(json!(lines), lines.join("\n")))
                }
            }
        }
    }
}

fn provenance(command: &Command) -> Provenance {
    let engine = format!("hclosed {}", env!("CARGO_PKG_VERSION"));
    let base = |name: &str, c: &Common| Provenance {
        command: name.to_string(),
        subject: c.space.first().cloned().or_else(|| c.map.clone()).map(|s| if c.space.len() > 1 { c.space.join(",") } else { s }),
        file: c.file.clone(),
        set: c.set.clone(),
        method: c.method.clone(),
        iterations: Some(c.iterations),
        engine: engine.clone(),
    };
    match command {
        Command::Validate { common, .. } => base("validate", common),
        Command::Compute { op, common } => base(&format!("compute {op}"), common),
        Command::Check { property, common } => base(&format!("check {property}"), common),
        Command::Map { property, common } => base(&format!("map {property}"), common),
        Command::Construct { kind, common } => base(&format!("construct {kind}"), common),
        Command::Oracle { max_points, seed, .. } => Provenance {
            command: format!("oracle max_points={max_points} seed={seed}"),
            subject: None,
            file: None,
            set: None,
            method: None,
            iterations: None,
            engine,
        },
        Command::Builtin { name, compute, check, set, method, iterations } => Provenance {
            command: match (compute, check) {
                (Some(op), _) => format!("builtin compute {op}"),
                (_, Some(p)) => format!("builtin check {p}"),
                _ => "builtin describe".into(),
            },
            subject: Some(name.clone()),
            file: None,
            set: set.clone(),
            method: method.clone(),
            iterations: Some(*iterations),
            engine,
        },
    }
}

/// Runs a parsed command line; returns the text to print and the exit code.
pub fn execute(cli: &Cli) -> (String, u8) {
    let start = Instant::now();
    let outcome = dispatch(&cli.command);
    let elapsed_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(o) => {
            let code = if o.holds == Some(false) { 1 } else { 0 };
            let out = if cli.json {
                let report = Report { result: o.result, witness: o.witness.unwrap_or(Value::Null), elapsed_ms, provenance: provenance(&cli.command) };
                serde_json::to_string_pretty(&report).expect("report serializes")
            } else {
                o.text
            };
            (out, code)
        }
        Err(e) => {
            let out = if cli.json {
                let report = Report {
                    result: json!({ "error": e.to_string(), "exit_code": e.exit_code() }),
                    witness: Value::Null,
                    elapsed_ms,
                    provenance: provenance(&cli.command),
                };
                serde_json::to_string_pretty(&report).expect("report serializes")
            } else {
                format!("error: {e}")
            };
            (out, e.exit_code())
        }
    }
}
