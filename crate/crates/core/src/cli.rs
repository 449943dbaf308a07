//! Command-line front end. Every command produces a [`RunReport`]; the human
//! rendering is derived from the same JSON payload.

use crate::algebra::{
    find_frobenius_form, nakayama_automorphism, check_nakayama_identity, parse_algebra_spec, verify_frobenius, AlgebraError, AlgebraMorphism,
    BoundQuiverAlgebra, Elem, FrobeniusForm,
};
use crate::bimod::{bruteforce_scydim, describe_morphism, BimodError, DEFAULT_DIM_CAP};
use crate::classify::{scydim, sweep, CyValue, Row, SweepPattern};
use crate::exactlin::Field;
use crate::families::{
    construct_family, expected_resolution_term, parse_family, symmetric_frobenius_form, witness_inner_element, FamilyBundle, FamilyError,
    FamilySpec, ProjectiveBimodulePattern,
};
use crate::morph::{
    is_inner, preserves_radical_chain, stable_hom_cyclic, stably_inner_certificate, transporter, left_annihilator, InnerResult, RightIdeal,
    VerdictStatus,
};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("audit failure: {0}")]
    Audit(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Audit(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Degenerate | AlgebraError::NotMultiplicative(_) => CliError::Audit(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Algebra(a) => a.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BimodError> for CliError {
    fn from(e: BimodError) -> Self {
        match e {
            BimodError::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            BimodError::Inconsistent(_) => CliError::Audit(e.to_string()),
            BimodError::Algebra(a) => a.into(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "stablecy", version, about = "Stable Calabi-Yau dimensions of self-injective algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Ground field: a prime p, or 0 / Q for the rationals.
    #[arg(long, visible_alias = "char", global = true, default_value = "2")]
    pub field: String,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Omit timings so that reruns are byte-identical.
    #[arg(long, global = true)]
    pub stable_output: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_DIM_CAP)]
    pub dim_cap: usize,
    #[arg(long, global = true, default_value_t = 8)]
    pub max_degree: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an algebra from a family shorthand or a description file.
    Construct { input: String },
    /// Closed-form stable Calabi-Yau dimension of a type, or a sweep.
    Scydim {
        #[arg(required_unless_present = "sweep")]
        r#type: Option<String>,
        /// Sweep pattern: A2, D2, D3, E2, nonstd, A1, D1.
        #[arg(long)]
        sweep: Option<String>,
        /// Range of n, e.g. `1..5` or `2,4,6`.
        #[arg(long, default_value = "1..5")]
        n: String,
        #[arg(long, default_value = "1..8")]
        r: String,
        /// Characteristics for a sweep; defaults to the chosen field.
        #[arg(long)]
        chars: Option<String>,
    },
    /// Brute-force syzygies and compare with the classifier.
    Verify { family: String },
    /// Stable homs between cyclic modules A/I and A/J.
    StableHom {
        algebra: String,
        /// Generators of the right ideal I, separated by `;`.
        #[arg(long = "I")]
        i: String,
        #[arg(long = "J")]
        j: String,
    },
    /// Certify whether an automorphism is (stably) inner.
    Certify {
        algebra: String,
        /// Generator images such as `t -> t + t^3`, separated by `;`.
        #[arg(long)]
        map: String,
    },
    /// Nakayama automorphism of the chosen Frobenius form.
    Nakayama { algebra: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub version: String,
    pub seed: u64,
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    pub results: Value,
    pub audits: Vec<Audit>,
}

impl RunReport {
    pub fn failed_audits(&self) -> Vec<&Audit> {
        self.audits.iter().filter(|a| !a.passed).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("stablecy {} | {} | field {} | seed {}\n", self.version, self.command.join(" "), self.field, self.seed);
        render_value(&self.results, 0, &mut out);
        if let Some(t) = &self.timings {
            for (k, v) in t {
                out.push_str(&format!("time {k}: {v:.3}s\n"));
            }
        }
        for a in &self.audits {
            out.push_str(&format!("[{}] {}: {}\n", if a.passed { "ok" } else { "FAIL" }, a.name, a.detail));
        }
        out
    }
}

fn render_value(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || x.as_array().is_some_and(|a| a.iter().any(|e| e.is_object() || e.is_array())) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_value(x, depth + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x)));
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                out.push_str(&format!("{pad}- [{i}]\n"));
                render_value(x, depth + 1, out);
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar_text(x))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar_text).collect::<Vec<_>>().join(", ")),
        Value::Null => "-".into(),
        x => x.to_string(),
    }
}

struct Ctx {
    field: Field,
    seed: u64,
    dim_cap: usize,
    max_degree: usize,
    audits: Vec<Audit>,
    timings: BTreeMap<String, f64>,
}

impl Ctx {
    fn audit(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.audits.push(Audit { name: name.into(), passed, detail: detail.into() });
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let t0 = Instant::now();
        let r = f(self);
        self.timings.insert(label.into(), t0.elapsed().as_secs_f64());
        r
    }
}

/// An algebra with a Frobenius form, plus family data when it came from a shorthand.
struct Loaded {
    algebra: BoundQuiverAlgebra,
    eps: FrobeniusForm,
    bundle: Option<FamilyBundle>,
}

/// A description file may declare its own field; it then overrides `--field` for the run.
fn load(input: &str, ctx: &mut Ctx) -> Result<Loaded, CliError> {
    if let Ok(spec) = parse_family(input) {
        let b = construct_family(&spec, ctx.field)?;
        return Ok(Loaded { algebra: b.algebra.clone(), eps: b.eps.clone(), bundle: Some(b) });
    }
    let text = std::fs::read_to_string(input).map_err(|e| CliError::Usage(format!("'{input}' is neither a family shorthand nor a readable file: {e}")))?;
    let algebra = parse_algebra_spec(&text, ctx.field)?.build()?;
    ctx.field = algebra.field();
    let eps = symmetric_frobenius_form(&algebra)
        .or_else(|| find_frobenius_form(&algebra, ctx.seed, 64))
        .ok_or_else(|| CliError::Usage("no nondegenerate Frobenius form found; the algebra may not be self-injective".into()))?;
    Ok(Loaded { algebra, eps, bundle: None })
}

fn parse_list(a: &BoundQuiverAlgebra, s: &str) -> Result<Vec<Elem>, CliError> {
    s.split(';').map(str::trim).filter(|x| !x.is_empty()).map(|x| Ok(a.parse_elem(x)?)).collect()
}

/// Inclusive ranges `a..b` or comma lists.
fn parse_range(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad range '{s}'"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn morphism_json(a: &BoundQuiverAlgebra, phi: &AlgebraMorphism) -> Value {
    json!(describe_morphism(a, phi))
}

fn cmd_construct(input: &str, ctx: &mut Ctx) -> Result<Value, CliError> {
    let l = ctx.timed("construct", |c| load(input, c))?;
    let a = &l.algebra;
    ctx.audit("associativity", a.check_associativity(), "structure constants");
    let frob = verify_frobenius(a, &l.eps);
    ctx.audit("frobenius", frob.is_ok(), "Gram matrix of the form is invertible");
    let nu = nakayama_automorphism(a, &l.eps)?;
    ctx.audit("nakayama-identity", check_nakayama_identity(a, &l.eps, &nu), "ε(ab) = ε(bν̃(a)) on the basis");
    ctx.audit("nakayama-homomorphism", nu.check_homomorphism(a).is_ok() && nu.is_bijective(), "ν̃ is an automorphism");
    let mut out = json!({
        "input": input,
        "dim": a.dim(),
        "vertices": a.num_vertices(),
        "arrows": a.quiver().arrows.len(),
        "loewy_length": a.loewy_length(),
        "basis_by_length": a.basis_length_profile(),
        "frobenius": frob.is_ok(),
        "symmetric": l.eps.is_symmetric(a),
        "nakayama": morphism_json(a, &nu),
    });
    if let Some(b) = &l.bundle {
        ctx.audit("sigma-automorphism", b.sigma.check_homomorphism(a).is_ok() && b.sigma.is_bijective(), "σ preserves the relations");
        out["family"] = json!(b.spec.to_string());
        out["period"] = json!(b.period);
        out["sigma"] = morphism_json(a, &b.sigma);
        if let FamilySpec::Type(t) = b.spec {
            if t.standard && t.torsion == 2 {
                out["notes"] = json!(["vertex and arrow indices of σ reduced to residues in [1, r] and [1, 2r]"]);
            }
        }
    }
    Ok(out)
}

fn cmd_scydim(ty: Option<&str>, sweep_pat: Option<&str>, n: &str, r: &str, chars: Option<&str>, ctx: &mut Ctx) -> Result<Value, CliError> {
    let p = ctx.field.characteristic();
    if let Some(pat) = sweep_pat {
        let pattern = SweepPattern::parse(pat).ok_or_else(|| CliError::Usage(format!("unknown sweep pattern '{pat}'")))?;
        let ns: Vec<u32> = parse_range(n)?.into_iter().map(|x| x as u32).collect();
        let rs = parse_range(r)?;
        let cs: Vec<u32> = match chars {
            Some(c) => parse_range(c)?.into_iter().map(|x| x as u32).collect(),
            None => vec![p],
        };
        let rows = ctx.timed("sweep", |_| sweep(pattern, ns, rs, &cs));
        let errors: Vec<String> = rows.iter().filter_map(|row| row.error.as_ref().map(|e| format!("{} p={}: {e}", row.type_name, row.p))).collect();
        ctx.audit("sweep-rows", errors.is_empty(), if errors.is_empty() { format!("{} rows classified and audited", rows.len()) } else { errors.join("; ") });
        return Ok(json!({ "pattern": pat, "rows": rows }));
    }
    let ty = ty.ok_or_else(|| CliError::Usage("missing type".into()))?;
    let t = match parse_family(ty)? {
        FamilySpec::Type(t) => t,
        other => return Err(CliError::Usage(format!("{other} is not covered by the classification"))),
    };
    let res = scydim(&t, p).map_err(|e| CliError::Usage(e.to_string()))?;
    ctx.audit("congruence", true, res.checks.join("; "));
    Ok(json!({
        "type": t.to_string(),
        "char": p,
        "value": res.value.to_string(),
        "result": res,
    }))
}

/// How the brute-force value relates to the classifier.
fn adjudicate(classifier: Option<CyValue>, confirmed: Option<usize>, refuted: &[usize], inconclusive: &[usize], max_degree: usize) -> (&'static str, String) {
    match (classifier, confirmed) {
        (None, Some(b)) => ("brute-force only", format!("brute force gives {b}; no closed form applies")),
        (None, None) => ("undetermined", format!("no confirmation up to degree {}", max_degree + 1)),
        (Some(CyValue::Infinite), Some(b)) => ("contradiction", format!("classifier Infinite, brute force confirmed {b}")),
        (Some(CyValue::Infinite), None) => ("consistent", "classifier Infinite, no confirmation found".into()),
        (Some(CyValue::Finite(c)), _) if refuted.contains(&(c as usize)) => ("contradiction", format!("classifier Finite({c}) but degree {c} refuted")),
        (Some(CyValue::Finite(c)), Some(b)) if b as u64 == c => ("agreement", format!("both give {c}")),
        (Some(CyValue::Finite(c)), Some(b)) if (b as u64) < c => ("contradiction", format!("brute force confirmed {b} below classifier Finite({c})")),
        (Some(CyValue::Finite(c)), Some(b)) => ("consistent", format!("classifier Finite({c}); brute force first confirmed {b}, {c} inconclusive")),
        (Some(CyValue::Finite(c)), None) if c as usize > max_degree || inconclusive.contains(&(c as usize)) => {
            ("consistent", format!("classifier Finite({c}) not reached decisively"))
        }
        (Some(CyValue::Finite(c)), None) => ("contradiction", format!("classifier Finite({c}) but degree {c} was not confirmed")),
    }
}

fn cmd_verify(family: &str, ctx: &mut Ctx) -> Result<Value, CliError> {
    let spec = parse_family(family)?;
    let bundle = ctx.timed("construct", |c| construct_family(&spec, c.field))?;
    let a = &bundle.algebra;
    let p = ctx.field.characteristic();
    let (seed, cap, maxd) = (ctx.seed, ctx.dim_cap, ctx.max_degree);
    let bf = ctx.timed("bruteforce", |_| bruteforce_scydim(&bundle, maxd, cap, seed))?;

    let mut patterns = Vec::new();
    let mut mismatches = Vec::new();
    for row in &bf.trace {
        let got = ProjectiveBimodulePattern::new(
            row.cover_pattern.iter().flat_map(|(v, u, c)| std::iter::repeat_n((v.clone(), u.clone()), *c)).collect(),
        );
        let verdict = match expected_resolution_term(&spec, row.degree) {
            Ok(want) if want == got => "match".to_string(),
            Ok(want) => {
                mismatches.push(row.degree);
                format!("mismatch: expected {want}")
            }
            Err(e) => format!("n/a ({e})"),
        };
        patterns.push(json!({ "degree": row.degree, "cover": got.to_string(), "pattern": verdict }));
    }
    ctx.audit("resolution-pattern", mismatches.is_empty(), if mismatches.is_empty() { "covers match the expected terms".to_string() } else { format!("degrees {mismatches:?} differ") });

    let classified = match spec {
        FamilySpec::Type(t) => Some(scydim(&t, p).map_err(|e| CliError::Usage(e.to_string()))?),
        FamilySpec::Truncated(_) => None,
    };
    let (verdict, detail) = adjudicate(classified.as_ref().map(|c| c.value), bf.confirmed, &bf.refuted, &bf.inconclusive, maxd);
    ctx.audit("adjudication", verdict != "contradiction", detail.clone());

    let mut out = json!({
        "family": spec.to_string(),
        "dim": a.dim(),
        "max_degree": maxd,
        "trace": bf.trace,
        "patterns": patterns,
        "bruteforce": { "confirmed": bf.confirmed, "refuted": bf.refuted, "inconclusive": bf.inconclusive, "seed": bf.seed },
        "classifier": classified.as_ref().map(|c| json!({ "value": c.value.to_string(), "row": c.row, "l": c.solution_l, "flags": c.flags })),
        "adjudication": { "verdict": verdict, "detail": detail },
    });
    if let Some(c) = classified.as_ref().filter(|c| c.row == Row::ATorsionTwo) {
        if let (CyValue::Finite(_), Some(l)) = (c.value, c.solution_l) {
            match witness_inner_element(&bundle, l) {
                Ok(w) => {
                    ctx.audit("inner-witness", true, format!("conjugation by the witness equals ν̃σ^{l}"));
                    out["witness"] = json!({ "l": l, "element": a.display_elem(&w) });
                }
                Err(e) => ctx.audit("inner-witness", false, e.to_string()),
            }
        }
    }
    Ok(out)
}

fn cmd_stable_hom(algebra: &str, i: &str, j: &str, ctx: &mut Ctx) -> Result<Value, CliError> {
    let l = load(algebra, ctx)?;
    let a = &l.algebra;
    let ii = RightIdeal::generated(a, parse_list(a, i)?);
    let jj = RightIdeal::generated(a, parse_list(a, j)?);
    ctx.audit("ideals-closed", ii.is_closed(a) && jj.is_closed(a), "I and J are right ideals");
    let h = stable_hom_cyclic(a, &ii, &jj);
    let reps_ok = h.representatives.iter().all(|c| ii.span.basis().iter().all(|x| jj.span.contains(&a.mul(c, x))));
    ctx.audit("representatives", reps_ok, "each representative c satisfies c·I ⊆ J");
    Ok(json!({
        "algebra": algebra,
        "dim_I": ii.span.dim(),
        "dim_J": jj.span.dim(),
        "dim_transporter": transporter(a, &ii, &jj).dim(),
        "dim_annihilator": left_annihilator(a, &ii).dim(),
        "dim": h.dim,
        "representatives": h.representatives.iter().map(|c| a.display_elem(c)).collect::<Vec<_>>(),
    }))
}

/// Parses `label -> image; …`; vertices are fixed unless `e_v` is mapped.
fn parse_map(a: &BoundQuiverAlgebra, s: &str) -> Result<AlgebraMorphism, CliError> {
    let q = a.quiver();
    let mut arrows: Vec<Elem> = (0..q.arrows.len()).map(|i| a.arrow_elem(i)).collect();
    let mut vertices: Vec<Elem> = (0..a.num_vertices()).map(|v| a.vertex_elem(v)).collect();
    for item in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        let (lhs, rhs) = item.split_once("->").ok_or_else(|| CliError::Usage(format!("expected 'generator -> image' in '{item}'")))?;
        let (lhs, img) = (lhs.trim(), a.parse_elem(rhs.trim())?);
        if let Some(k) = q.arrow_index(lhs) {
            arrows[k] = img;
        } else if let Some(v) = lhs.strip_prefix("e_").and_then(|v| q.vertex_index(v)) {
            vertices[v] = img;
        } else {
            return Err(CliError::Usage(format!("unknown generator '{lhs}'")));
        }
    }
    let phi = AlgebraMorphism::from_generators(a, &vertices, &arrows).map_err(|e| CliError::Usage(format!("not an algebra homomorphism: {e}")))?;
    if !phi.is_bijective() {
        return Err(CliError::Usage("not an automorphism: the map is not bijective".into()));
    }
    Ok(phi)
}

fn lattice_position(s: VerdictStatus) -> &'static str {
    match s {
        VerdictStatus::ConfirmedInner => "inner",
        VerdictStatus::ConfirmedInnerModuloSocle => "inner modulo socle",
        VerdictStatus::ConfirmedByTruncatedPolyCriterion => "stably inner",
        VerdictStatus::RefutedByLoopTest | VerdictStatus::RefutedByTruncatedPolyCriterion => "not stably inner",
        VerdictStatus::Inconclusive => "undetermined",
    }
}

fn cmd_certify(algebra: &str, map: &str, ctx: &mut Ctx) -> Result<Value, CliError> {
    let l = load(algebra, ctx)?;
    let a = &l.algebra;
    let phi = parse_map(a, map)?;
    ctx.audit("homomorphism", phi.check_homomorphism(a).is_ok(), "φ respects the relations");
    let seed = ctx.seed;
    let v = ctx.timed("certify", |_| stably_inner_certificate(a, &phi, seed));
    let chain = preserves_radical_chain(a, &phi);
    ctx.audit("radical-chain", !v.status.is_confirmed() || chain, "confirmed verdicts preserve every power of the radical");
    Ok(json!({
        "algebra": algebra,
        "map": morphism_json(a, &phi),
        "status": v.status,
        "lattice_position": lattice_position(v.status),
        "witness": v.witness,
        "preserves_radical_chain": chain,
    }))
}

fn cmd_nakayama(algebra: &str, ctx: &mut Ctx) -> Result<Value, CliError> {
    let l = load(algebra, ctx)?;
    let a = &l.algebra;
    let nu = nakayama_automorphism(a, &l.eps)?;
    ctx.audit("nakayama-identity", check_nakayama_identity(a, &l.eps, &nu), "ε(ab) = ε(bν̃(a)) on the basis");
    let mut order = None;
    let mut pw = nu.clone();
    for k in 1..=64 {
        if pw.is_identity() {
            order = Some(k);
            break;
        }
        pw = pw.compose(&nu);
    }
    let inner = match is_inner(a, &nu, ctx.seed) {
        InnerResult::Inner(w) => json!({ "inner": true, "element": a.display_elem(&w) }),
        InnerResult::NotInner => json!({ "inner": false }),
        InnerResult::Inconclusive => json!({ "inner": "inconclusive" }),
    };
    Ok(json!({
        "algebra": algebra,
        "symmetric": l.eps.is_symmetric(a),
        "nakayama": morphism_json(a, &nu),
        "vertex_permutation": nu.vertex_permutation(a).map(|p| p.iter().map(|&v| a.quiver().vertices[v].clone()).collect::<Vec<_>>()),
        "order": order,
        "inner": inner,
    }))
}

/// Runs a parsed command; `Err` carries errors that abort before a report exists.
pub fn execute(cli: &Cli, argv: &[String]) -> Result<RunReport, CliError> {
    let field = Field::parse(&cli.field).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut ctx = Ctx { field, seed: cli.seed, dim_cap: cli.dim_cap, max_degree: cli.max_degree, audits: vec![], timings: BTreeMap::new() };
    let results = match &cli.command {
        Command::Construct { input } => cmd_construct(input, &mut ctx)?,
        Command::Scydim { r#type, sweep, n, r, chars } => cmd_scydim(r#type.as_deref(), sweep.as_deref(), n, r, chars.as_deref(), &mut ctx)?,
        Command::Verify { family } => cmd_verify(family, &mut ctx)?,
        Command::StableHom { algebra, i, j } => cmd_stable_hom(algebra, i, j, &mut ctx)?,
        Command::Certify { algebra, map } => cmd_certify(algebra, map, &mut ctx)?,
        Command::Nakayama { algebra } => cmd_nakayama(algebra, &mut ctx)?,
    };
    Ok(RunReport {
        command: argv.to_vec(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: ctx.seed,
        field: ctx.field.to_string(),
        timings: (!cli.stable_output).then_some(ctx.timings),
        results,
        audits: ctx.audits,
    })
}

/// Parses `argv` (without the program name), runs, and returns the exit code
/// together with the text to print on stdout and stderr.
pub fn run(argv: &[String]) -> (i32, String, String) {
    let full = std::iter::once("stablecy".to_string()).chain(argv.iter().cloned());
    let cli = match Cli::try_parse_from(full) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, if code == 0 { e.to_string() } else { String::new() }, if code == 0 { String::new() } else { e.to_string() });
        }
    };
    match execute(&cli, argv) {
        Ok(rep) => {
            let body = if cli.json { rep.to_json() + "\n" } else { rep.render_text() };
            let failed = rep.failed_audits();
            if failed.is_empty() {
                (0, body, String::new())
            } else {
                let names: Vec<&str> = failed.iter().map(|a| a.name.as_str()).collect();
                (2, body, format!("error: failed audits: {}\n", names.join(", ")))
            }
        }
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        // Quoted segments keep their spaces.
        let mut out = Vec::new();
        let mut cur = String::new();
        let mut quoted = false;
        for ch in s.chars() {
            match ch {
                '"' => quoted = !quoted,
                ' ' if !quoted => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
        out
    }

    fn json_of(s: &str) -> (i32, Value) {
        let (code, out, err) = run(&args(&format!("{s} --json --stable-output")));
        let v = serde_json::from_str(&out).unwrap_or_else(|_| json!({ "stderr": err }));
        (code, v)
    }

    #[test]
    fn construct_trunc4() {
        let (code, v) = json_of("construct trunc:4");
        assert_eq!(code, 0);
        assert_eq!(v["results"]["dim"], 4);
        assert_eq!(v["results"]["loewy_length"], 4);
        assert_eq!(v["results"]["symmetric"], true);
    }

    #[test]
    fn scydim_examples() {
        assert_eq!(json_of("scydim D6:nonstd").1["results"]["value"], "Finite(5)");
        assert_eq!(json_of("scydim D4:r=1:t=3").1["results"]["value"], "Infinite");
        assert_eq!(json_of("scydim A5:r=1:t=2").1["results"]["value"], "Infinite");
        assert_eq!(json_of("scydim trunc:3").0, 1);
    }

    #[test]
    fn stable_hom_and_certify() {
        assert_eq!(json_of("stable-hom trunc:4 --I t^2 --J t").1["results"]["dim"], 1);
        let (code, v) = json_of("certify trunc:5 --map \"t -> t + t^3\"");
        assert_eq!(code, 0);
        assert_eq!(v["results"]["status"], "ConfirmedByTruncatedPolyCriterion");
        let (code, v) = json_of("certify trunc:5 --map \"t -> t^2\"");
        assert_eq!(code, 1);
        assert!(v["stderr"].as_str().unwrap().contains("not an automorphism"));
    }

    #[test]
    fn verify_trunc2_and_exit_codes() {
        let (code, v) = json_of("verify trunc:2 --char 2 --max-degree 2");
        assert_eq!(code, 0);
        assert_eq!(v["results"]["bruteforce"]["confirmed"], 0);
        assert_eq!(json_of("verify A5:r=2:t=2 --dim-cap 10").0, 3);
        assert_eq!(json_of("frobnicate").0, 1);
    }

    #[test]
    fn stable_output_is_reproducible() {
        let a = run(&args("verify D6:nonstd --max-degree 7 --json --stable-output"));
        let b = run(&args("verify D6:nonstd --max-degree 7 --json --stable-output"));
        assert_eq!(a.0, 0, "{}", a.2);
        assert_eq!(a.1, b.1);
        assert!(!a.1.contains("timings"));
    }

    #[test]
    fn adjudication_cases() {
        assert_eq!(adjudicate(Some(CyValue::Finite(4)), Some(4), &[], &[], 6).0, "agreement");
        assert_eq!(adjudicate(Some(CyValue::Finite(4)), Some(2), &[], &[], 6).0, "contradiction");
        assert_eq!(adjudicate(Some(CyValue::Finite(14)), None, &[4], &[], 6).0, "consistent");
        assert_eq!(adjudicate(Some(CyValue::Finite(4)), None, &[4], &[], 6).0, "contradiction");
        assert_eq!(adjudicate(Some(CyValue::Infinite), Some(3), &[], &[], 6).0, "contradiction");
    }

    #[test]
    fn description_file_field_wins() {
        let path = std::env::temp_dir().join(format!("stablecy-cyc-{}.quiver", std::process::id()));
        std::fs::write(&path, "field 3\nvertex 1\nvertex 2\narrow a: 1 -> 2\narrow b: 2 -> 1\nrelation: a b a\nrelation: b a b\n").unwrap();
        let (code, v) = json_of(&format!("construct {} --field 2", path.display()));
        std::fs::remove_file(&path).ok();
        assert_eq!(code, 0);
        assert_eq!(v["field"], "F_3");
        assert_eq!(v["results"]["dim"], 6);
        assert_eq!(v["results"]["symmetric"], true);
    }
}
