//! Command implementations. Each returns whether the command succeeded;
//! errors carry their exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use weakhopf::actions::{invariant_subalgebra, verify_module_algebra};
use weakhopf::constructors::{groupoid_algebra, validate_groupoid};
use weakhopf::linalg::{Tolerance, Vector};
use weakhopf::reconstruct::reconstruct;
use weakhopf::rep::fusion_table;
use weakhopf::report::Report;
use weakhopf::wha::{
    canonical_grouplike, counital_subalgebras, dual_wha, haar_integral, haar_properties, modular_and_kac_check,
    solve_antipode, verify_antipode_properties, verify_cstar, verify_weak_bialgebra, WhaData,
};

use crate::canonical;
use crate::docs::{Document, InputError};
use crate::examples;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{}: {0}", .0.kind())]
    Domain(#[from] weakhopf::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Input(_) | CliError::Usage(_) => 2,
        }
    }
}

pub type CliResult = Result<bool, CliError>;

/// Options shared by every command.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub tol: Tolerance,
    pub seed: u64,
    pub json: bool,
    pub out: Option<PathBuf>,
}

impl Ctx {
    fn emit(&self, text: &str, value: Value) {
        if self.json {
            print!("{}", canonical::to_string(&value));
        } else {
            print!("{text}");
        }
    }

    /// Writes a document to `-o`, or to stdout when no path is given.
    /// Returns a note for the human-readable summary.
    fn write_doc(&self, doc: &Document, path: Option<&Path>) -> Result<Option<String>, CliError> {
        let text = doc.to_text();
        match path {
            Some(p) => {
                std::fs::write(p, text).map_err(|source| InputError::Io { path: p.to_path_buf(), source })?;
                Ok(Some(format!("wrote {} document to {}\n", doc.kind(), p.display())))
            }
            None => {
                print!("{text}");
                Ok(None)
            }
        }
    }
}

fn load(path: &Path) -> Result<Document, CliError> {
    Ok(Document::load(path)?)
}

fn load_wha(path: &Path) -> Result<WhaData, CliError> {
    match load(path)? {
        Document::Wha(w) => Ok(w),
        other => Err(CliError::Usage(format!("{}: expected a wha document, found {}", path.display(), other.kind()))),
    }
}

fn with_antipode(w: WhaData, tol: Tolerance) -> Result<WhaData, CliError> {
    if w.antipode().is_some() {
        Ok(w)
    } else {
        Ok(solve_antipode(&w, tol)?)
    }
}

fn checks_json(r: &Report) -> Value {
    Value::Array(
        r.checks
            .iter()
            .map(|c| json!({"name": c.name, "residual": c.residual, "threshold": c.threshold, "passed": c.passed}))
            .collect(),
    )
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// A real number with at most 12 decimals and no trailing zeros.
fn short(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// `c₁·e₁ + c₂·e₂ + …` over the basis labels, dropping negligible terms.
pub fn element_text(labels: &[String], v: &Vector) -> String {
    let cut = 1e-12 * v.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut terms = Vec::new();
    for (z, l) in v.iter().zip(labels) {
        if z.norm() <= cut {
            continue;
        }
        let coef = if z.im.abs() <= cut {
            short(z.re)
        } else if z.re.abs() <= cut {
            format!("{}i", short(z.im))
        } else {
            format!("({}{}{}i)", short(z.re), if z.im < 0.0 { "-" } else { "+" }, short(z.im.abs()))
        };
        terms.push(match coef.as_str() {
            "1" => l.clone(),
            "-1" => format!("-{l}"),
            _ => format!("{coef}·{l}"),
        });
    }
    if terms.is_empty() {
        return "0".into();
    }
    terms.join(" + ").replace("+ -", "- ")
}

fn vector_json(v: &Vector) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

// ---- verify ----

pub fn verify(ctx: &Ctx, path: &Path) -> CliResult {
    match load(path)? {
        Document::Wha(w) => verify_wha(ctx, w),
        Document::Groupoid(g) => {
            let rep = validate_groupoid(&g);
            let mut text =
                format!("groupoid: {} objects, {} morphisms, {} identities\n", rep.objects, rep.morphisms, rep.units());
            for v in &rep.violations {
                let _ = writeln!(text, "violation: {v}");
            }
            let _ = writeln!(text, "valid: {}", yes_no(rep.valid()));
            ctx.emit(
                &text,
                json!({"kind": "groupoid", "objects": rep.objects, "morphisms": rep.morphisms, "identities": rep.units(), "violations": rep.violations, "passed": rep.valid()}),
            );
            Ok(rep.valid())
        }
        Document::Action(x) => {
            let m = verify_module_algebra(&x, ctx.tol);
            let inv = invariant_subalgebra(&x, ctx.tol)?;
            let ok = m.passed();
            let text = format!(
                "action of a {}-dimensional algebra on a {}-dimensional algebra\n{}faithful: {}\ninvariant subalgebra: dim {}\n",
                x.wha.dim(),
                x.algebra.dim(),
                m.report,
                yes_no(m.faithful),
                inv.dim()
            );
            ctx.emit(
                &text,
                json!({"kind": "action", "passed": ok, "faithful": m.faithful, "invariant_dim": inv.dim(), "checks": checks_json(&m.report)}),
            );
            Ok(ok)
        }
        Document::Inclusion(doc) => {
            let inc = doc.build(ctx.tol)?;
            let r = inc.check(ctx.tol)?;
            let ok = r.passed();
            let text = format!(
                "inclusion: dim N = {}, dim M = {}, quasibasis of size {}\n{}",
                inc.n.dim(),
                inc.m.dim(),
                inc.quasibasis.len(),
                r
            );
            ctx.emit(
                &text,
                json!({"kind": "inclusion", "passed": ok, "dim_n": inc.n.dim(), "dim_m": inc.m.dim(), "quasibasis_size": inc.quasibasis.len(), "checks": checks_json(&r)}),
            );
            Ok(ok)
        }
    }
}

fn verify_wha(ctx: &Ctx, w: WhaData) -> CliResult {
    let tol = ctx.tol;
    let mut report = Report::new();
    let vr = verify_weak_bialgebra(&w, tol);
    report.merge("weak bialgebra", vr.report.clone());
    let (full, antipode) = if w.antipode().is_some() {
        (Some(w.clone()), "given")
    } else {
        match solve_antipode(&w, tol) {
            Ok(s) => (Some(s), "solved"),
            Err(e) => {
                report.flag(format!("antipode exists ({})", e.kind()), false);
                (None, "none")
            }
        }
    };
    if let Some(a) = &full {
        report.merge("antipode", verify_antipode_properties(a, tol)?);
        if a.star_matrix().is_some() {
            report.merge("C*", verify_cstar(a, tol)?);
        }
    }
    let ok = report.passed();
    let mut text = format!("weak Hopf algebra of dimension {} (antipode {antipode})\n{report}", w.dim());
    let _ = writeln!(text, "Δ(1) = 1⊗1: {}", yes_no(vr.unital_coproduct));
    let _ = writeln!(text, "ε multiplicative: {}", yes_no(vr.multiplicative_counit));
    let _ = writeln!(text, "is bialgebra: {}", yes_no(vr.is_bialgebra()));
    let _ = writeln!(text, "all checks passed: {}", yes_no(ok));
    ctx.emit(
        &text,
        json!({
            "kind": "wha",
            "dim": w.dim(),
            "antipode": antipode,
            "unital_coproduct": vr.unital_coproduct,
            "multiplicative_counit": vr.multiplicative_counit,
            "is_bialgebra": vr.is_bialgebra(),
            "passed": ok,
            "checks": checks_json(&report),
        }),
    );
    Ok(ok)
}

// ---- compute ----

pub fn haar(ctx: &Ctx, path: &Path) -> CliResult {
    let a = with_antipode(load_wha(path)?, ctx.tol)?;
    let h = haar_integral(&a, ctx.tol)?;
    let r = haar_properties(&a, &h, ctx.tol)?;
    let text = format!("h = {}\n{}", element_text(a.labels(), &h), r);
    ctx.emit(&text, json!({"haar": vector_json(&h), "passed": r.passed(), "checks": checks_json(&r)}));
    Ok(r.passed())
}

pub fn dual(ctx: &Ctx, path: &Path) -> CliResult {
    let a = with_antipode(load_wha(path)?, ctx.tol)?;
    let d = Document::Wha(dual_wha(&a)?);
    if let Some(note) = ctx.write_doc(&d, ctx.out.as_deref())? {
        print!("{note}");
    }
    Ok(true)
}

pub fn grouplike(ctx: &Ctx, path: &Path) -> CliResult {
    let a = with_antipode(load_wha(path)?, ctx.tol)?;
    let g = canonical_grouplike(&a, ctx.seed, ctx.tol)?;
    let kac = modular_and_kac_check(&a, ctx.seed, ctx.tol)?;
    let ok = g.report.passed() && kac.report.passed() && kac.consistent();
    let l = a.labels();
    let text = format!(
        "g_L = {}\ng_R = {}\ng = {}\ng⁻¹ = {}\n{}{}weak Kac: {}\nĥ tracial: {}\n",
        element_text(l, &g.g_l),
        element_text(l, &g.g_r),
        element_text(l, &g.g),
        element_text(l, &g.g_inv),
        g.report,
        kac.report,
        yes_no(kac.is_weak_kac),
        yes_no(kac.hat_h_tracial)
    );
    let mut checks = g.report.clone();
    checks.merge("modular", kac.report.clone());
    ctx.emit(
        &text,
        json!({
            "g_l": vector_json(&g.g_l),
            "g_r": vector_json(&g.g_r),
            "g": vector_json(&g.g),
            "g_inv": vector_json(&g.g_inv),
            "is_weak_kac": kac.is_weak_kac,
            "hat_h_tracial": kac.hat_h_tracial,
            "passed": ok,
            "checks": checks_json(&checks),
        }),
    );
    Ok(ok)
}

pub fn fusion(ctx: &Ctx, path: &Path) -> CliResult {
    let a = with_antipode(load_wha(path)?, ctx.tol)?;
    let t = fusion_table(&a, ctx.tol)?;
    let mut rules = Vec::new();
    let plural = |n: usize, one: &str, many: &str| format!("{n} {}", if n == 1 { one } else { many });
    let mut text = format!("{}, {}\n", plural(t.len(), "sector", "sectors"), plural(t.vacua.len(), "vacuum", "vacua"));
    for p in 0..t.len() {
        let _ = writeln!(
            text,
            "sector {}: dim {}, conjugate {}, left vacuum {}, right vacuum {}",
            t.labels[p], t.dims[p], t.labels[t.conjugates[p]], t.labels[t.left_vacuum[p]], t.labels[t.right_vacuum[p]]
        );
    }
    for p in 0..t.len() {
        for q in 0..t.len() {
            let mut terms = Vec::new();
            for r in 0..t.len() {
                let n = t.fusion[p][q][r];
                if n > 0 {
                    rules.push(json!([p, q, r, n]));
                    terms.push(if n == 1 { t.labels[r].clone() } else { format!("{n}·{}", t.labels[r]) });
                }
            }
            let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" ⊕ ") };
            let _ = writeln!(text, "{} ⊠ {} = {}", t.labels[p], t.labels[q], rhs);
        }
    }
    let _ = write!(text, "{}", t.report);
    let mut table = Map::new();
    table.insert("kind".into(), json!("sectors"));
    table.insert("version".into(), json!(crate::docs::VERSION));
    table.insert("labels".into(), json!(t.labels));
    table.insert("dims".into(), json!(t.dims));
    table.insert("conjugates".into(), json!(t.conjugates));
    table.insert("vacua".into(), json!(t.vacua));
    table.insert("left_vacuum".into(), json!(t.left_vacuum));
    table.insert("right_vacuum".into(), json!(t.right_vacuum));
    table.insert("fusion".into(), Value::Array(rules));
    let table = Value::Object(table);
    if let Some(p) = &ctx.out {
        std::fs::write(p, canonical::to_string(&table)).map_err(|source| InputError::Io { path: p.clone(), source })?;
        let _ = writeln!(text, "wrote sector table to {}", p.display());
    }
    let mut out = table.clone();
    out["passed"] = json!(t.report.passed());
    out["checks"] = checks_json(&t.report);
    ctx.emit(&text, out);
    Ok(t.report.passed())
}

pub fn subalgebras(ctx: &Ctx, path: &Path) -> CliResult {
    let a = load_wha(path)?;
    let s = counital_subalgebras(&a, ctx.tol);
    let l = a.labels();
    let mut text = String::new();
    for (name, sp) in [("A^L", &s.left), ("A^R", &s.right)] {
        let _ = writeln!(text, "{name}: dim {}", sp.dim());
        for v in &sp.basis {
            let _ = writeln!(text, "  {}", element_text(l, v));
        }
    }
    let _ = write!(text, "{}", s.report);
    ctx.emit(
        &text,
        json!({
            "left": s.left.basis.iter().map(vector_json).collect::<Vec<_>>(),
            "right": s.right.basis.iter().map(vector_json).collect::<Vec<_>>(),
            "passed": s.report.passed(),
            "checks": checks_json(&s.report),
        }),
    );
    Ok(s.report.passed())
}

// ---- groupoid ----

pub fn groupoid(ctx: &Ctx, path: &Path) -> CliResult {
    let g = match load(path)? {
        Document::Groupoid(g) => g,
        other => {
            return Err(CliError::Usage(format!(
                "{}: expected a groupoid document, found {}",
                path.display(),
                other.kind()
            )))
        }
    };
    let rep = validate_groupoid(&g);
    let mut text = format!("{} objects, {} morphisms\n", rep.objects, rep.morphisms);
    if !rep.valid() {
        for v in &rep.violations {
            let _ = writeln!(text, "violation: {v}");
        }
        if ctx.json {
            print!("{}", canonical::to_string(&json!({"passed": false, "violations": rep.violations})));
        } else {
            eprint!("{text}");
        }
        return Ok(false);
    }
    let a = groupoid_algebra(&g)?;
    let _ = writeln!(text, "groupoid algebra of dimension {}", a.dim());
    let doc = Document::Wha(a);
    match &ctx.out {
        Some(p) => {
            let note = ctx.write_doc(&doc, Some(p))?.unwrap_or_default();
            text.push_str(&note);
            ctx.emit(&text, json!({"passed": true, "objects": rep.objects, "morphisms": rep.morphisms, "dim": rep.morphisms, "output": p.display().to_string()}));
        }
        None => {
            ctx.write_doc(&doc, None)?;
            eprint!("{text}");
        }
    }
    Ok(true)
}

// ---- reconstruct ----

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn reconstruct_cmd(ctx: &Ctx, path: &Path) -> CliResult {
    let doc = match load(path)? {
        Document::Inclusion(d) => d,
        other => {
            return Err(CliError::Usage(format!(
                "{}: expected an inclusion document, found {}",
                path.display(),
                other.kind()
            )))
        }
    };
    let inc = doc.build(ctx.tol)?;
    let r = match reconstruct(&inc, ctx.tol) {
        Ok(r) => r,
        Err(e) => {
            let text = format!("{}: {}\n", e.kind(), e);
            if ctx.json {
                print!(
                    "{}",
                    canonical::to_string(&json!({"passed": false, "error": e.kind(), "message": e.to_string()}))
                );
            } else {
                print!("{text}");
            }
            return Ok(false);
        }
    };
    let d = &r.tower.derived;
    let (a, b) = (r.extracted.a.dim(), r.extracted.b.dim());
    let mut text = String::new();
    let _ = writeln!(
        text,
        "derived tower: dim N'∩M = {}, dim N'∩M₂ = {}, dim N'∩M₃ = {}",
        d.n_m.len(),
        d.n_m2.len(),
        d.n_m3.len()
    );
    let _ = writeln!(text, "               dim M'∩M₂ = {}, dim M'∩M₃ = {}", d.m_m2.len(), d.m_m3.len());
    let _ = writeln!(text, "dim A = {a}, dim B = {b}");
    for (i, s) in r.rigidity.sectors.iter().enumerate() {
        let _ = writeln!(text, "sector {i}: multiplicity {}, d = {}", s.multiplicity, short(s.dim));
    }
    let _ = writeln!(text, "co-opposite coproduct: {}", yes_no(r.co_opposite));
    let _ = writeln!(text, "invariant subalgebra: dim {}", r.invariants.basis.len());
    let _ = writeln!(text, "regular: {}", yes_no(r.regularity.regular));
    let _ = write!(text, "{}", r.report);
    if let Some(p) = &ctx.out {
        let wp = with_suffix(p, ".wha.json");
        let ap = with_suffix(p, ".action.json");
        text.push_str(&ctx.write_doc(&Document::Wha(r.wha().clone()), Some(&wp))?.unwrap_or_default());
        text.push_str(&ctx.write_doc(&Document::Action(r.action.clone()), Some(&ap))?.unwrap_or_default());
    }
    let ok = r.report.passed();
    ctx.emit(
        &text,
        json!({
            "derived_tower": {
                "n_m": d.n_m.len(), "n_m2": d.n_m2.len(), "n_m3": d.n_m3.len(),
                "m_m2": d.m_m2.len(), "m_m3": d.m_m3.len(),
            },
            "dim_a": a,
            "dim_b": b,
            "sectors": r.rigidity.sectors.iter().map(|s| json!({"multiplicity": s.multiplicity, "d": s.dim})).collect::<Vec<_>>(),
            "co_opposite": r.co_opposite,
            "invariant_dim": r.invariants.basis.len(),
            "regular": r.regularity.regular,
            "passed": ok,
            "checks": checks_json(&r.report),
        }),
    );
    Ok(ok)
}

// ---- example ----

pub fn example(ctx: &Ctx, name: Option<&str>) -> CliResult {
    let Some(name) = name else {
        for n in examples::NAMES {
            println!("{n}");
        }
        return Ok(true);
    };
    let doc = examples::example(name, ctx.tol)
        .ok_or_else(|| CliError::Usage(format!("unknown example \"{name}\"; run `weakhopf example` for the list")))??;
    if let Some(note) = ctx.write_doc(&doc, ctx.out.as_deref())? {
        print!("{note}");
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements_print_as_linear_combinations() {
        let labels = vec!["e".to_string(), "g".to_string()];
        let h = Vector::from_vec(vec![weakhopf::linalg::c64(0.5, 0.0), weakhopf::linalg::c64(0.5, 0.0)]);
        assert_eq!(element_text(&labels, &h), "0.5·e + 0.5·g");
        let x = Vector::from_vec(vec![weakhopf::linalg::c64(1.0, 0.0), weakhopf::linalg::c64(-1.0, 0.0)]);
        assert_eq!(element_text(&labels, &x), "e - g");
        let z = Vector::from_vec(vec![weakhopf::linalg::c64(0.0, 2.0), weakhopf::linalg::c64(1.0, -0.5)]);
        assert_eq!(element_text(&labels, &z), "2i·e + (1-0.5i)·g");
    }
}
