//! Reading and writing the four document kinds.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use weakhopf::actions::ActionData;
use weakhopf::algebra::FdAlgebra;
use weakhopf::constructors::{GroupoidData, Morphism};
use weakhopf::linalg::{c64, Mat, Tensor3, Tolerance, Vector, C64};
use weakhopf::reconstruct::InclusionData;
use weakhopf::wha::WhaData;

use crate::canonical;

pub const VERSION: u64 = 1;

/// A document that does not match its schema, with the offending field.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {msg}")]
    Syntax { path: PathBuf, line: usize, column: usize, msg: String },
    #[error("{field}: {msg}")]
    Schema { field: String, msg: String },
}

type R<T> = std::result::Result<T, InputError>;

fn bad<T>(field: &str, msg: impl Into<String>) -> R<T> {
    Err(InputError::Schema { field: field.to_string(), msg: msg.into() })
}

fn sub(field: &str, key: &str) -> String {
    if field.is_empty() {
        key.to_string()
    } else {
        format!("{field}.{key}")
    }
}

fn idx(field: &str, i: usize) -> String {
    format!("{field}[{i}]")
}

/// An inclusion as stored on disk; [`InclusionDoc::build`] validates it.
#[derive(Debug, Clone)]
pub struct InclusionDoc {
    pub m: FdAlgebra,
    pub n_basis: Vec<Vector>,
    pub expectation: Mat,
    pub quasibasis: Option<Vec<Vector>>,
}

impl InclusionDoc {
    pub fn build(&self, tol: Tolerance) -> weakhopf::Result<InclusionData> {
        InclusionData::new(self.m.clone(), &self.n_basis, self.expectation.clone(), self.quasibasis.clone(), tol)
    }

    pub fn from_inclusion(inc: &InclusionData) -> Self {
        InclusionDoc {
            m: inc.m.clone(),
            n_basis: inc.n_basis(),
            expectation: inc.expectation.clone(),
            quasibasis: Some(inc.quasibasis.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Document {
    Wha(WhaData),
    Groupoid(GroupoidData),
    Action(ActionData),
    Inclusion(InclusionDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Wha(_) => "wha",
            Document::Groupoid(_) => "groupoid",
            Document::Action(_) => "action",
            Document::Inclusion(_) => "inclusion",
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Document::Wha(w) => wha_to_value(w),
            Document::Groupoid(g) => groupoid_to_value(g),
            Document::Action(a) => action_to_value(a),
            Document::Inclusion(i) => inclusion_to_value(i),
        }
    }

    pub fn to_text(&self) -> String {
        canonical::to_string(&self.to_value())
    }

    /// `base` resolves relative paths inside the document.
    pub fn from_value(v: &Value, base: &Path) -> R<Document> {
        let obj = object("", v)?;
        let kind = string("kind", get(obj, "", "kind")?)?;
        let version = uint("version", get(obj, "", "version")?)?;
        if version != VERSION as usize {
            return bad("version", format!("unsupported version {version}, expected {VERSION}"));
        }
        match kind.as_str() {
            "wha" => wha_from_value(obj, "").map(Document::Wha),
            "groupoid" => groupoid_from_value(obj).map(Document::Groupoid),
            "action" => action_from_value(obj, base).map(Document::Action),
            "inclusion" => inclusion_from_value(obj).map(Document::Inclusion),
            other => bad("kind", format!("unknown kind \"{other}\"")),
        }
    }

    pub fn from_text(text: &str, path: &Path) -> R<Document> {
        let v: Value = serde_json::from_str(text).map_err(|e| InputError::Syntax {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            msg: {
                let m = e.to_string();
                m.rsplit_once(" at line ").map_or(m.clone(), |(head, _)| head.to_string())
            },
        })?;
        Document::from_value(&v, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn load(path: &Path) -> R<Document> {
        let text =
            std::fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_path_buf(), source })?;
        Document::from_text(&text, path)
    }
}

// ---- encoding ----

fn num(x: f64) -> Value {
    json!(x)
}

fn cplx(z: C64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn vector_value(v: &Vector) -> Value {
    Value::Array(v.iter().map(|z| cplx(*z)).collect())
}

fn matrix_value(m: &Mat) -> Value {
    Value::Array((0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| cplx(m[(r, c)])).collect())).collect())
}

fn tensor_value(t: &Tensor3) -> Value {
    Value::Array(t.triples().into_iter().map(|(i, j, k, z)| json!([i, j, k, num(z.re), num(z.im)])).collect())
}

fn algebra_fields(a: &FdAlgebra, out: &mut Map<String, Value>) {
    out.insert("dim".into(), json!(a.dim()));
    out.insert("mult".into(), tensor_value(a.mult()));
    out.insert("unit".into(), vector_value(a.unit()));
    if let Some(s) = a.star_matrix() {
        out.insert("star".into(), matrix_value(s));
    }
}

fn header(kind: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kind".into(), json!(kind));
    m.insert("version".into(), json!(VERSION));
    m
}

pub fn wha_to_value(w: &WhaData) -> Value {
    let mut m = header("wha");
    algebra_fields(w.algebra(), &mut m);
    m.insert("basis_labels".into(), json!(w.labels()));
    m.insert("comult".into(), tensor_value(w.comult()));
    m.insert("counit".into(), vector_value(w.counit()));
    if let Some(s) = w.antipode() {
        m.insert("antipode".into(), matrix_value(s));
    }
    Value::Object(m)
}

fn groupoid_to_value(g: &GroupoidData) -> Value {
    let mut m = header("groupoid");
    m.insert("objects".into(), json!(g.objects));
    m.insert(
        "morphisms".into(),
        Value::Array(g.morphisms.iter().map(|f| json!({"id": f.id, "src": f.src, "tgt": f.tgt})).collect()),
    );
    m.insert("compose".into(), Value::Array(g.compose.iter().map(|(a, b, c)| json!([a, b, c])).collect()));
    m.insert("inverse".into(), Value::Array(g.inverse.iter().map(|(a, b)| json!([a, b])).collect()));
    Value::Object(m)
}

fn action_to_value(x: &ActionData) -> Value {
    let mut m = header("action");
    m.insert("wha".into(), wha_to_value(&x.wha));
    let mut alg = Map::new();
    algebra_fields(&x.algebra, &mut alg);
    m.insert("algebra".into(), Value::Object(alg));
    m.insert("act".into(), tensor_value(&x.act));
    Value::Object(m)
}

fn inclusion_to_value(i: &InclusionDoc) -> Value {
    let mut m = header("inclusion");
    let mut alg = Map::new();
    algebra_fields(&i.m, &mut alg);
    m.insert("M".into(), Value::Object(alg));
    m.insert("N_basis".into(), Value::Array(i.n_basis.iter().map(vector_value).collect()));
    m.insert("E".into(), matrix_value(&i.expectation));
    if let Some(q) = &i.quasibasis {
        m.insert("quasibasis".into(), Value::Array(q.iter().map(vector_value).collect()));
    }
    Value::Object(m)
}

// ---- decoding ----

fn object<'a>(field: &str, v: &'a Value) -> R<&'a Map<String, Value>> {
    v.as_object().map_or_else(|| bad(if field.is_empty() { "document" } else { field }, "expected an object"), Ok)
}

fn get<'a>(obj: &'a Map<String, Value>, field: &str, key: &str) -> R<&'a Value> {
    obj.get(key).map_or_else(|| bad(&sub(field, key), "missing field"), Ok)
}

fn only_keys(obj: &Map<String, Value>, field: &str, allowed: &[&str]) -> R<()> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return bad(&sub(field, k), "unknown field");
        }
    }
    Ok(())
}

fn array<'a>(field: &str, v: &'a Value) -> R<&'a Vec<Value>> {
    v.as_array().map_or_else(|| bad(field, "expected an array"), Ok)
}

fn string(field: &str, v: &Value) -> R<String> {
    v.as_str().map(str::to_string).map_or_else(|| bad(field, "expected a string"), Ok)
}

fn uint(field: &str, v: &Value) -> R<usize> {
    v.as_u64().map(|u| u as usize).map_or_else(|| bad(field, "expected a non-negative integer"), Ok)
}

fn float(field: &str, v: &Value) -> R<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => bad(field, "expected a finite number"),
    }
}

fn cplx_from(field: &str, v: &Value) -> R<C64> {
    let a = array(field, v)?;
    if a.len() != 2 {
        return bad(field, format!("expected [re, im], got {} entries", a.len()));
    }
    Ok(c64(float(&idx(field, 0), &a[0])?, float(&idx(field, 1), &a[1])?))
}

fn vector_from(field: &str, v: &Value, len: usize) -> R<Vector> {
    let a = array(field, v)?;
    if a.len() != len {
        return bad(field, format!("expected {len} entries, got {}", a.len()));
    }
    let mut out = Vector::zeros(len);
    for (i, x) in a.iter().enumerate() {
        out[i] = cplx_from(&idx(field, i), x)?;
    }
    Ok(out)
}

fn matrix_from(field: &str, v: &Value, rows: usize, cols: usize) -> R<Mat> {
    let a = array(field, v)?;
    if a.len() != rows {
        return bad(field, format!("expected {rows} rows, got {}", a.len()));
    }
    let mut out = Mat::zeros(rows, cols);
    for (r, row) in a.iter().enumerate() {
        let row = vector_from(&idx(field, r), row, cols)?;
        for c in 0..cols {
            out[(r, c)] = row[c];
        }
    }
    Ok(out)
}

fn tensor_from(field: &str, v: &Value, dims: [usize; 3]) -> R<Tensor3> {
    let a = array(field, v)?;
    let mut t = Tensor3::zeros(dims[0], dims[1], dims[2]);
    for (n, e) in a.iter().enumerate() {
        let f = idx(field, n);
        let e = array(&f, e)?;
        if e.len() != 5 {
            return bad(&f, format!("expected [i, j, k, re, im], got {} entries", e.len()));
        }
        let mut ijk = [0usize; 3];
        for p in 0..3 {
            ijk[p] = uint(&idx(&f, p), &e[p])?;
            if ijk[p] >= dims[p] {
                return bad(&idx(&f, p), format!("index {} out of range (bound {})", ijk[p], dims[p]));
            }
        }
        let z = c64(float(&idx(&f, 3), &e[3])?, float(&idx(&f, 4), &e[4])?);
        t.add(ijk[0], ijk[1], ijk[2], z);
    }
    Ok(t)
}

fn algebra_from(obj: &Map<String, Value>, field: &str) -> R<FdAlgebra> {
    let d = uint(&sub(field, "dim"), get(obj, field, "dim")?)?;
    if d == 0 {
        return bad(&sub(field, "dim"), "dimension must be positive");
    }
    let mult = tensor_from(&sub(field, "mult"), get(obj, field, "mult")?, [d, d, d])?;
    let unit = vector_from(&sub(field, "unit"), get(obj, field, "unit")?, d)?;
    let star = match obj.get("star") {
        None | Some(Value::Null) => None,
        Some(s) => Some(matrix_from(&sub(field, "star"), s, d, d)?),
    };
    FdAlgebra::new(mult, unit, star).or_else(|e| bad(if field.is_empty() { "mult" } else { field }, e.to_string()))
}

fn wha_from_value(obj: &Map<String, Value>, field: &str) -> R<WhaData> {
    only_keys(
        obj,
        field,
        &["kind", "version", "dim", "basis_labels", "mult", "unit", "comult", "counit", "antipode", "star"],
    )?;
    let alg = algebra_from(obj, field)?;
    let d = alg.dim();
    let labels_field = sub(field, "basis_labels");
    let labels = array(&labels_field, get(obj, field, "basis_labels")?)?
        .iter()
        .enumerate()
        .map(|(i, l)| string(&idx(&labels_field, i), l))
        .collect::<R<Vec<_>>>()?;
    if labels.len() != d {
        return bad(&labels_field, format!("expected {d} labels, got {}", labels.len()));
    }
    let comult = tensor_from(&sub(field, "comult"), get(obj, field, "comult")?, [d, d, d])?;
    let counit = vector_from(&sub(field, "counit"), get(obj, field, "counit")?, d)?;
    let antipode = match obj.get("antipode") {
        None | Some(Value::Null) => None,
        Some(s) => Some(matrix_from(&sub(field, "antipode"), s, d, d)?),
    };
    WhaData::from_algebra(Some(labels), alg, comult, counit, antipode)
        .or_else(|e| bad(if field.is_empty() { "comult" } else { field }, e.to_string()))
}

fn groupoid_from_value(obj: &Map<String, Value>) -> R<GroupoidData> {
    only_keys(obj, "", &["kind", "version", "objects", "morphisms", "compose", "inverse"])?;
    let objects = array("objects", get(obj, "", "objects")?)?
        .iter()
        .enumerate()
        .map(|(i, o)| string(&idx("objects", i), o))
        .collect::<R<Vec<_>>>()?;
    let mut morphisms = Vec::new();
    for (i, m) in array("morphisms", get(obj, "", "morphisms")?)?.iter().enumerate() {
        let f = idx("morphisms", i);
        let mo = object(&f, m)?;
        only_keys(mo, &f, &["id", "src", "tgt"])?;
        morphisms.push(Morphism {
            id: string(&sub(&f, "id"), get(mo, &f, "id")?)?,
            src: string(&sub(&f, "src"), get(mo, &f, "src")?)?,
            tgt: string(&sub(&f, "tgt"), get(mo, &f, "tgt")?)?,
        });
    }
    let names = |field: &str, n: usize| -> R<Vec<Vec<String>>> {
        array(field, get(obj, "", field)?)?
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let f = idx(field, i);
                let row = array(&f, row)?;
                if row.len() != n {
                    return bad(&f, format!("expected {n} names, got {}", row.len()));
                }
                row.iter().enumerate().map(|(j, s)| string(&idx(&f, j), s)).collect()
            })
            .collect()
    };
    let compose = names("compose", 3)?.into_iter().map(|r| (r[0].clone(), r[1].clone(), r[2].clone())).collect();
    let inverse = names("inverse", 2)?.into_iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    Ok(GroupoidData { objects, morphisms, compose, inverse })
}

fn action_from_value(obj: &Map<String, Value>, base: &Path) -> R<ActionData> {
    only_keys(obj, "", &["kind", "version", "wha", "algebra", "act"])?;
    let wha = match get(obj, "", "wha")? {
        Value::String(p) => match Document::load(&base.join(p))? {
            Document::Wha(w) => w,
            other => return bad("wha", format!("{p} holds a {} document", other.kind())),
        },
        v => wha_from_value(object("wha", v)?, "wha")?,
    };
    let alg_obj = object("algebra", get(obj, "", "algebra")?)?;
    only_keys(alg_obj, "algebra", &["dim", "mult", "unit", "star"])?;
    let alg = algebra_from(alg_obj, "algebra")?;
    let act = tensor_from("act", get(obj, "", "act")?, [wha.dim(), alg.dim(), alg.dim()])?;
    ActionData::new(wha, alg, act).or_else(|e| bad("act", e.to_string()))
}

fn inclusion_from_value(obj: &Map<String, Value>) -> R<InclusionDoc> {
    only_keys(obj, "", &["kind", "version", "M", "N_basis", "E", "quasibasis"])?;
    let m_obj = object("M", get(obj, "", "M")?)?;
    only_keys(m_obj, "M", &["dim", "mult", "unit", "star"])?;
    let m = algebra_from(m_obj, "M")?;
    let d = m.dim();
    let vectors = |field: &str, v: &Value| -> R<Vec<Vector>> {
        array(field, v)?.iter().enumerate().map(|(i, x)| vector_from(&idx(field, i), x, d)).collect()
    };
    let n_basis = vectors("N_basis", get(obj, "", "N_basis")?)?;
    let expectation = matrix_from("E", get(obj, "", "E")?, d, d)?;
    let quasibasis = match obj.get("quasibasis") {
        None | Some(Value::Null) => None,
        Some(q) => Some(vectors("quasibasis", q)?),
    };
    Ok(InclusionDoc { m, n_basis, expectation, quasibasis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use weakhopf::constructors::fixtures;

    fn round_trip(doc: &Document) {
        let text = doc.to_text();
        let back = Document::from_text(&text, Path::new("mem.json")).unwrap();
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn fixtures_round_trip_bit_exactly() {
        for (_, a) in fixtures::all() {
            round_trip(&Document::Wha(a));
        }
        round_trip(&Document::Groupoid(GroupoidData::pair(2)));
        let x = weakhopf::actions::weyl_action(&fixtures::kp2()).unwrap();
        round_trip(&Document::Action(x));
        let inc = weakhopf::reconstruct::diagonal_in_matrix(2, Tolerance::default()).unwrap();
        round_trip(&Document::Inclusion(InclusionDoc::from_inclusion(&inc)));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let mut v = wha_to_value(&fixtures::kz2());
        v["comult"][0] = json!([0, 0, 7, 1.0, 0.0]);
        let e = Document::from_value(&v, Path::new(".")).unwrap_err();
        assert_eq!(e.to_string(), "comult[0][2]: index 7 out of range (bound 2)");
        let mut v = wha_to_value(&fixtures::kz2());
        v.as_object_mut().unwrap().remove("counit");
        assert_eq!(Document::from_value(&v, Path::new(".")).unwrap_err().to_string(), "counit: missing field");
    }

    #[test]
    fn syntax_errors_carry_the_position() {
        let e = Document::from_text("{\n  \"kind\": \"wha\",\n  oops\n}", Path::new("x.json")).unwrap_err();
        assert!(matches!(e, InputError::Syntax { line: 3, .. }), "{e}");
    }
}
