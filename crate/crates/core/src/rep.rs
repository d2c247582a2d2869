//! Representations: irreducible decomposition, the `Δ(1)`-truncated
//! monoidal product, the trivial representation and sector tables.

use std::cmp::Ordering;
use std::fmt;

use crate::algebra::{Subspace, Wedderburn, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::linalg::{
    columns, herm_apply, herm_eig, intersect, max_abs, null_space, quotient_basis, Mat, Tolerance, Vector, C64, ZERO,
};
use crate::report::Report;
use crate::wha::{haar_integral, Element, WhaData};

/// A finite-dimensional left module, given by the matrices `ρ(e_i)` and an
/// inner product `⟨v, w⟩ = v* G w`.
#[derive(Debug, Clone)]
pub struct ModuleRep {
    parent: WhaData,
    space_dim: usize,
    action: Vec<Mat>,
    inner: Mat,
}

fn same_parent(a: &WhaData, b: &WhaData) -> bool {
    a.dim() == b.dim()
        && a.mult().max_abs_diff(b.mult()) < 1e-12
        && a.comult().max_abs_diff(b.comult()) < 1e-12
        && crate::linalg::max_abs_vec(&(a.counit() - b.counit())) < 1e-12
}

/// Orthonormal basis (Euclidean) of the column space of `p`.
fn range_basis(p: &Mat, tol: Tolerance) -> Mat {
    let (r, c) = p.shape();
    if r == 0 || c == 0 {
        return Mat::zeros(r, 0);
    }
    let svd = p.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let smax = svd.singular_values.max();
    let cut = tol.rank().threshold(smax);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > cut).collect();
    Mat::from_fn(r, keep.len(), |i, j| u[(i, keep[j])])
}

/// `x ↦ x·(x* G x)^{-1/2}`, making the columns of `x` orthonormal for `G`.
fn g_orthonormal(x: &Mat, g: &Mat, tol: Tolerance) -> Result<Mat> {
    if x.ncols() == 0 {
        return Ok(x.clone());
    }
    let m = x.adjoint() * g * x;
    let inv_sqrt = herm_apply(&m, tol, |t| if t > 0.0 { 1.0 / t.sqrt() } else { 0.0 })?;
    Ok(x * inv_sqrt)
}

impl ModuleRep {
    /// Validated constructor; the inner product defaults to the identity.
    pub fn new(parent: &WhaData, action: Vec<Mat>, inner: Option<Mat>, tol: Tolerance) -> Result<Self> {
        let rep = ModuleRep::new_unchecked(parent, action, inner)?;
        let r = rep.check(tol);
        match r.first_failure() {
            None => Ok(rep),
            Some(c) => Err(Error::NotARepresentation(format!("{} (residual {:.3e})", c.name, c.residual))),
        }
    }

    /// Shape-checked constructor without axiom checks.
    pub fn new_unchecked(parent: &WhaData, action: Vec<Mat>, inner: Option<Mat>) -> Result<Self> {
        if action.len() != parent.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} action matrices for an algebra of dimension {}",
                action.len(),
                parent.dim()
            )));
        }
        let d = action.first().map(|m| m.nrows()).unwrap_or(0);
        if action.iter().any(|m| m.shape() != (d, d)) {
            return Err(Error::DimensionMismatch("action matrices must be square of equal size".into()));
        }
        let inner = inner.unwrap_or_else(|| Mat::identity(d, d));
        if inner.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!("inner product has shape {:?}", inner.shape())));
        }
        Ok(ModuleRep { parent: parent.clone(), space_dim: d, action, inner })
    }

    /// The left regular representation with inner product `τ(x*y)`,
    /// `τ` the regular trace (identity when there is no star).
    pub fn regular(parent: &WhaData) -> Self {
        let alg = parent.algebra();
        let n = parent.dim();
        let action = (0..n).map(|i| alg.basis_left(i).clone()).collect();
        let inner = match alg.star_matrix() {
            Some(sigma) => {
                let tau = alg.regular_trace();
                Mat::from_fn(n, n, |i, j| {
                    let xi = sigma.column(i).into_owned();
                    tau.dot(&alg.mul(&xi, &parent.basis(j)))
                })
            }
            None => Mat::identity(n, n),
        };
        ModuleRep { parent: parent.clone(), space_dim: n, action, inner }
    }

    pub fn zero(parent: &WhaData) -> Self {
        ModuleRep {
            parent: parent.clone(),
            space_dim: 0,
            action: vec![Mat::zeros(0, 0); parent.dim()],
            inner: Mat::zeros(0, 0),
        }
    }

    pub fn parent(&self) -> &WhaData {
        &self.parent
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn action(&self, i: usize) -> &Mat {
        &self.action[i]
    }

    pub fn actions(&self) -> &[Mat] {
        &self.action
    }

    pub fn inner(&self) -> &Mat {
        &self.inner
    }

    /// `ρ(x)` for an arbitrary element.
    pub fn apply(&self, x: &Element) -> Mat {
        let d = self.space_dim;
        let mut m = Mat::zeros(d, d);
        for (i, c) in x.iter().enumerate() {
            if *c != ZERO {
                m += &self.action[i] * *c;
            }
        }
        m
    }

    /// Checks multiplicativity, `ρ(1) = id`, positivity of the inner
    /// product and, when the parent has a star, `ρ(a*) = ρ(a)†`.
    pub fn check(&self, tol: Tolerance) -> Report {
        let a = &self.parent;
        let d = self.space_dim;
        let n = a.dim();
        let norm = self.action.iter().map(max_abs).fold(1.0, f64::max);
        let thr = tol.threshold(a.scale() * norm * norm * (d.max(1) as f64));
        let mut r = Report::new();
        let mut mult: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = &self.action[i] * &self.action[j];
                let rhs = self.apply(&a.mul(&a.basis(i), &a.basis(j)));
                mult = mult.max(max_abs(&(lhs - rhs)));
            }
        }
        r.record("ρ multiplicative", mult, thr);
        r.record("ρ(1) = id", max_abs(&(self.apply(a.unit()) - Mat::identity(d, d))), thr);
        r.record("inner product Hermitian", max_abs(&(&self.inner - self.inner.adjoint())), thr);
        let min_eig = if d == 0 {
            1.0
        } else {
            herm_eig(&((&self.inner + self.inner.adjoint()) * C64::new(0.5, 0.0)), tol)
                .map(|(v, _)| v.last().copied().unwrap_or(1.0))
                .unwrap_or(f64::NEG_INFINITY)
        };
        r.flag("inner product positive", min_eig > tol.threshold(max_abs(&self.inner)));
        if let Some(sigma) = a.star_matrix() {
            let mut star: f64 = 0.0;
            for i in 0..n {
                let rs = self.apply(&sigma.column(i).into_owned());
                let lhs = &self.inner * rs;
                let rhs = self.action[i].adjoint() * &self.inner;
                star = star.max(max_abs(&(lhs - rhs)));
            }
            r.record("ρ(a*) = ρ(a)†", star, thr);
        }
        r
    }

    /// An equivalent representation whose inner product is the identity.
    pub fn to_orthonormal(&self, tol: Tolerance) -> Result<ModuleRep> {
        if self.space_dim == 0 {
            return Ok(self.clone());
        }
        let sqrt = herm_apply(&self.inner, tol, |t| t.max(0.0).sqrt())?;
        let inv = herm_apply(&self.inner, tol, |t| if t > 0.0 { 1.0 / t.sqrt() } else { 0.0 })?;
        let action = self.action.iter().map(|m| &sqrt * m * &inv).collect();
        Ok(ModuleRep {
            parent: self.parent.clone(),
            space_dim: self.space_dim,
            action,
            inner: Mat::identity(self.space_dim, self.space_dim),
        })
    }

    pub fn direct_sum(&self, other: &ModuleRep) -> Result<ModuleRep> {
        if !same_parent(&self.parent, &other.parent) {
            return Err(Error::ParentMismatch);
        }
        let (p, q) = (self.space_dim, other.space_dim);
        let blockdiag = |x: &Mat, y: &Mat| {
            let mut m = Mat::zeros(p + q, p + q);
            m.view_mut((0, 0), (p, p)).copy_from(x);
            m.view_mut((p, p), (q, q)).copy_from(y);
            m
        };
        let action = self.action.iter().zip(&other.action).map(|(x, y)| blockdiag(x, y)).collect();
        Ok(ModuleRep {
            parent: self.parent.clone(),
            space_dim: p + q,
            action,
            inner: blockdiag(&self.inner, &other.inner),
        })
    }

    /// Restriction to an invariant subspace spanned by the orthonormal
    /// columns of `b`.
    fn restrict(&self, b: &Mat) -> ModuleRep {
        let action = self.action.iter().map(|m| b.adjoint() * m * b).collect();
        ModuleRep { parent: self.parent.clone(), space_dim: b.ncols(), action, inner: b.adjoint() * &self.inner * b }
    }
}

/// Basis of `Hom_A(V, W)`; each column is a column-major `dim W × dim V`
/// intertwiner.
pub fn intertwiners(v: &ModuleRep, w: &ModuleRep, tol: Tolerance) -> Result<Mat> {
    if !same_parent(&v.parent, &w.parent) {
        return Err(Error::ParentMismatch);
    }
    let (dv, dw) = (v.space_dim, w.space_dim);
    let m = dv * dw;
    if m == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let n = v.parent.dim();
    let mut sys = Mat::zeros(n * m, m);
    let iv = Mat::identity(dv, dv);
    let iw = Mat::identity(dw, dw);
    for i in 0..n {
        let block = v.action[i].transpose().kronecker(&iw) - iv.kronecker(&w.action[i]);
        sys.view_mut((i * m, 0), (m, m)).copy_from(&block);
    }
    Ok(null_space(&sys, tol.rank()))
}

pub fn hom_dim(v: &ModuleRep, w: &ModuleRep, tol: Tolerance) -> Result<usize> {
    Ok(intertwiners(v, w, tol)?.ncols())
}

/// An irreducible representation attached to one simple block.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub rep: ModuleRep,
    /// `χ(e_i) = tr π(e_i)`.
    pub character: Vec<C64>,
    /// Spectrum of `π(h)` for the Haar integral `h`, descending; empty if
    /// no Haar integral exists.
    pub haar_spectrum: Vec<f64>,
    block: usize,
}

/// All irreducible representations together with the matrix units used
/// to build them.
#[derive(Debug, Clone)]
pub struct IrrepSet {
    pub irreps: Vec<Irrep>,
    wedderburn: Wedderburn,
}

impl IrrepSet {
    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn wedderburn(&self) -> &Wedderburn {
        &self.wedderburn
    }

    /// The matrix unit `e_11` of the block carrying irrep `r`.
    pub fn minimal_projection(&self, r: usize) -> &Vector {
        self.wedderburn.blocks[self.irreps[r].block].unit(0, 0)
    }

    /// The matrix unit `e_ij` of the block carrying irrep `r`.
    pub fn unit(&self, r: usize, i: usize, j: usize) -> &Vector {
        self.wedderburn.blocks[self.irreps[r].block].unit(i, j)
    }
}

fn cmp_f64_desc(a: &[f64], b: &[f64]) -> Ordering {
    let q = |x: f64| (x * 1e8).round() as i64;
    for (x, y) in a.iter().zip(b) {
        match q(*y).cmp(&q(*x)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    b.len().cmp(&a.len())
}

/// Irreducible representations labelled `r0, r1, …`, ordered by dimension,
/// then by the spectrum of `π(h)` (larger first), then by character
/// (larger first).
pub fn irreps(a: &WhaData, tol: Tolerance) -> Result<IrrepSet> {
    let w = a.algebra().wedderburn(DEFAULT_SEED, tol)?;
    let h = if a.star_matrix().is_some() && a.antipode().is_some() { haar_integral(a, tol).ok() } else { None };
    let n = a.dim();
    let mut out = Vec::new();
    for (r, b) in w.blocks.iter().enumerate() {
        let action: Vec<Mat> = (0..n).map(|i| w.block_matrix(r, &a.basis(i))).collect();
        let inner = Mat::identity(b.size, b.size);
        let rep = ModuleRep::new_unchecked(a, action, Some(inner))?;
        let character = rep.action.iter().map(|m| m.trace()).collect();
        let haar_spectrum = match &h {
            Some(h) => {
                let m = rep.apply(h);
                let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
                herm_eig(&herm, tol).map(|(v, _)| v).unwrap_or_default()
            }
            None => Vec::new(),
        };
        out.push(Irrep { label: String::new(), dim: b.size, rep, character, haar_spectrum, block: r });
    }
    let q = |z: &C64| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64);
    out.sort_by(|x, y| {
        x.dim.cmp(&y.dim).then_with(|| cmp_f64_desc(&x.haar_spectrum, &y.haar_spectrum)).then_with(|| {
            let cx: Vec<_> = x.character.iter().map(q).collect();
            let cy: Vec<_> = y.character.iter().map(q).collect();
            cy.cmp(&cx)
        })
    });
    for (i, irr) in out.iter_mut().enumerate() {
        irr.label = format!("r{i}");
    }
    Ok(IrrepSet { irreps: out, wedderburn: w })
}

/// One isotypic component of a decomposition.
#[derive(Debug, Clone)]
pub struct Component {
    pub label: String,
    pub irrep: usize,
    pub multiplicity: usize,
    /// Isometries `w_k : ℂ^{d_r} → V` intertwining `π_r` with `ρ`, with
    /// `w_k† G w_l = δ_kl` for the inner product `G` of `V`.
    pub isometries: Vec<Mat>,
}

/// Splits `V ≅ ⊕_r m_r V_r` with explicit isometries.
pub fn decompose_irreps(a: &WhaData, v: &ModuleRep, tol: Tolerance) -> Result<Vec<Component>> {
    if !same_parent(a, &v.parent) {
        return Err(Error::ParentMismatch);
    }
    if let Some(c) = v.check(tol).first_failure() {
        return Err(Error::NotARepresentation(format!("{} (residual {:.3e})", c.name, c.residual)));
    }
    if v.space_dim == 0 {
        return Ok(Vec::new());
    }
    let set = irreps(a, tol)?;
    decompose_with(&set, v, tol)
}

/// [`decompose_irreps`] against a precomputed irrep set.
pub fn decompose_with(set: &IrrepSet, v: &ModuleRep, tol: Tolerance) -> Result<Vec<Component>> {
    let mut out = Vec::new();
    for (r, irr) in set.irreps.iter().enumerate() {
        let p = v.apply(set.minimal_projection(r));
        let x = g_orthonormal(&range_basis(&p, tol), &v.inner, tol)?;
        if x.ncols() == 0 {
            continue;
        }
        let isometries = (0..x.ncols())
            .map(|k| {
                let xk = x.column(k).into_owned();
                let cols: Vec<Vector> = (0..irr.dim).map(|j| v.apply(set.unit(r, j, 0)) * &xk).collect();
                Mat::from_columns(&cols)
            })
            .collect();
        out.push(Component { label: irr.label.clone(), irrep: r, multiplicity: x.ncols(), isometries });
    }
    Ok(out)
}

/// `Σ w w† G − id` over all isometries of a decomposition.
pub fn completeness_residual(v: &ModuleRep, parts: &[Component]) -> f64 {
    let d = v.space_dim;
    let mut sum = Mat::zeros(d, d);
    for c in parts {
        for w in &c.isometries {
            sum += w * w.adjoint() * &v.inner;
        }
    }
    max_abs(&(sum - Mat::identity(d, d)))
}

/// The trivial representation `a▷l = πL(al)` on `A^L`, with inner product
/// `(l₁, l₂) = ε(l₁* l₂)` when `A` has a star.
pub fn trivial_rep(a: &WhaData, tol: Tolerance) -> Result<ModuleRep> {
    let n = a.dim();
    let left = Subspace::new(n, &columns(a.pi_l()), tol);
    let b = left.matrix();
    let alg = a.algebra();
    let action = (0..n).map(|i| b.adjoint() * a.pi_l() * alg.basis_left(i) * &b).collect();
    let inner = match a.star_matrix() {
        Some(_) => {
            let k = left.dim();
            let mut g = Mat::zeros(k, k);
            for p in 0..k {
                let sp = a.star(&left.basis[p])?;
                for q in 0..k {
                    g[(p, q)] = a.counit_of(&a.mul(&sp, &left.basis[q]));
                }
            }
            Some(g)
        }
        None => None,
    };
    ModuleRep::new(a, action, inner, tol)
}

struct TensorSpace {
    full: Vec<Mat>,
    embedding: Mat,
    projection: Mat,
}

fn tensor_space(v: &ModuleRep, w: &ModuleRep, tol: Tolerance) -> Result<TensorSpace> {
    if !same_parent(&v.parent, &w.parent) {
        return Err(Error::ParentMismatch);
    }
    let a = &v.parent;
    let n = a.dim();
    let d = v.space_dim * w.space_dim;
    let mut full = vec![Mat::zeros(d, d); n];
    for (i, j, k, c) in a.comult().triples() {
        full[i] += v.action[j].kronecker(&w.action[k]) * c;
    }
    let mut projection = Mat::zeros(d, d);
    for (i, u) in a.unit().iter().enumerate() {
        if *u != ZERO {
            projection += &full[i] * *u;
        }
    }
    let embedding = range_basis(&projection, tol);
    Ok(TensorSpace { full, embedding, projection })
}

/// `V⊠W`: the image of `(ρ_V⊗ρ_W)Δ(1)` in `V⊗W`, acted on through `Δ`.
pub fn tensor_module(v: &ModuleRep, w: &ModuleRep, tol: Tolerance) -> Result<ModuleRep> {
    let t = tensor_space(v, w, tol)?;
    let inner = v.inner.kronecker(&w.inner);
    let big = ModuleRep { parent: v.parent.clone(), space_dim: inner.nrows(), action: t.full, inner };
    Ok(big.restrict(&t.embedding))
}

/// Comparison of `V⊠W` with the balanced product `V⊗_L W`.
#[derive(Debug, Clone, Copy)]
pub struct BalancedProduct {
    pub image_dim: usize,
    pub quotient_dim: usize,
    /// How far `Δ(1)` is from killing the balancing relations.
    pub annihilation: f64,
}

impl BalancedProduct {
    pub fn matches(&self, tol: Tolerance) -> bool {
        self.image_dim == self.quotient_dim && self.annihilation <= tol.rank().threshold(1.0)
    }
}

/// Computes `V⊗W / span{s(l)v⊗w − v⊗lw : l ∈ A^L}` and compares it with
/// the image of `Δ(1)`.
pub fn balanced_product(v: &ModuleRep, w: &ModuleRep, tol: Tolerance) -> Result<BalancedProduct> {
    let t = tensor_space(v, w, tol)?;
    let a = &v.parent;
    let (dv, dw) = (v.space_dim, w.space_dim);
    let d = dv * dw;
    let left = Subspace::new(a.dim(), &columns(a.pi_l()), tol);
    let s = a.source_matrix();
    let mut relations = Vec::new();
    let mut annihilation: f64 = 0.0;
    for l in &left.basis {
        let rel = v.apply(&(&s * l)).kronecker(&Mat::identity(dw, dw)) - Mat::identity(dv, dv).kronecker(&w.apply(l));
        annihilation = annihilation.max(max_abs(&(&t.projection * &rel)));
        relations.extend(columns(&rel));
    }
    let span: Vec<Vector> = (0..d).map(|i| crate::linalg::unit_vector(d, i)).collect();
    let q = quotient_basis(d, &span, &relations, tol);
    Ok(BalancedProduct { image_dim: t.embedding.ncols(), quotient_dim: q.dim(), annihilation })
}

/// Checks that `l⊗v ↦ lv` and `v⊗l ↦ s(l)v` restrict to unitary
/// intertwiners `U⊠V → V` and `V⊠U → V`.
pub fn unit_maps(v: &ModuleRep, tol: Tolerance) -> Result<Report> {
    let a = &v.parent;
    let n = a.dim();
    let left = Subspace::new(n, &columns(a.pi_l()), tol);
    let u = trivial_rep(a, tol)?;
    let s = a.source_matrix();
    let d = v.space_dim;
    let mut r = Report::new();
    for (name, first_u) in [("U⊠V → V", true), ("V⊠U → V", false)] {
        let (x, y) = if first_u { (&u, v) } else { (v, &u) };
        let t = tensor_space(x, y, tol)?;
        let prod = tensor_module(x, y, tol)?;
        let mut phi = Mat::zeros(d, u.space_dim * d);
        for (p, l) in left.basis.iter().enumerate() {
            let act = if first_u { v.apply(l) } else { v.apply(&(&s * l)) };
            for q in 0..d {
                let col = if first_u { p * d + q } else { q * u.space_dim + p };
                phi.set_column(col, &act.column(q));
            }
        }
        let phi = phi * &t.embedding;
        let mut inter: f64 = 0.0;
        for i in 0..n {
            inter = inter.max(max_abs(&(&phi * prod.action(i) - v.action(i) * &phi)));
        }
        let thr = tol.rank().threshold(1.0);
        r.record(format!("{name} intertwines"), inter, thr);
        r.flag(format!("{name} bijective"), phi.shape() == (d, d) && crate::linalg::rank(&phi, tol.rank()) == d);
        r.record(format!("{name} unitary"), max_abs(&(phi.adjoint() * &v.inner * &phi - &prod.inner)), thr);
    }
    Ok(r)
}

/// Fusion data of the representation category.
#[derive(Debug, Clone)]
pub struct SectorTable {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    /// `fusion[p][q][r] = N_{pq}^r`.
    pub fusion: Vec<Vec<Vec<usize>>>,
    pub conjugates: Vec<usize>,
    pub vacua: Vec<usize>,
    pub left_vacuum: Vec<usize>,
    pub right_vacuum: Vec<usize>,
    pub report: Report,
}

impl SectorTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn product_dim(&self, p: usize, q: usize) -> usize {
        self.fusion[p][q].iter().zip(&self.dims).map(|(m, d)| m * d).sum()
    }
}

impl fmt::Display for SectorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sectors: {}", self.labels.join(" "))?;
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        writeln!(f, "dims: {}", dims.join(" "))?;
        let vac: Vec<&str> = self.vacua.iter().map(|&v| self.labels[v].as_str()).collect();
        writeln!(f, "vacua: {}", vac.join(" "))?;
        for p in 0..self.len() {
            writeln!(
                f,
                "{}: conj {} left {} right {}",
                self.labels[p],
                self.labels[self.conjugates[p]],
                self.labels[self.left_vacuum[p]],
                self.labels[self.right_vacuum[p]]
            )?;
        }
        for p in 0..self.len() {
            for q in 0..self.len() {
                let terms: Vec<String> = (0..self.len())
                    .filter(|&r| self.fusion[p][q][r] > 0)
                    .map(|r| match self.fusion[p][q][r] {
                        1 => self.labels[r].clone(),
                        m => format!("{m}·{}", self.labels[r]),
                    })
                    .collect();
                let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                writeln!(f, "{} ⊠ {} = {}", self.labels[p], self.labels[q], rhs)?;
            }
        }
        Ok(())
    }
}

fn unique_vacuum(vacua: &[usize], r: usize, fusion: &[Vec<Vec<usize>>], dims: &[usize], left: bool) -> Result<usize> {
    let hits: Vec<usize> = vacua
        .iter()
        .copied()
        .filter(|&mu| {
            let row = if left { &fusion[mu][r] } else { &fusion[r][mu] };
            row[r] == 1 && row.iter().zip(dims).map(|(m, d)| m * d).sum::<usize>() == dims[r]
        })
        .collect();
    match hits.as_slice() {
        [mu] => Ok(*mu),
        [] => Err(Error::VacuumAssignmentFailure(format!(
            "no {} vacuum for sector r{r}",
            if left { "left" } else { "right" }
        ))),
        _ => Err(Error::VacuumAssignmentFailure(format!(
            "{} {} vacua for sector r{r}",
            hits.len(),
            if left { "left" } else { "right" }
        ))),
    }
}

/// Builds the full sector table and checks the sector rules: products of
/// sectors with mismatched vacua vanish, constituents inherit the outer
/// vacua, conjugation swaps vacua, and vacuum connectivity is transitive.
pub fn fusion_table(a: &WhaData, tol: Tolerance) -> Result<SectorTable> {
    let set = irreps(a, tol)?;
    let k = set.len();
    let u = trivial_rep(a, tol)?;
    let reps: Vec<&ModuleRep> = set.irreps.iter().map(|i| &i.rep).collect();
    let dims: Vec<usize> = set.irreps.iter().map(|i| i.dim).collect();
    let labels: Vec<String> = set.irreps.iter().map(|i| i.label.clone()).collect();
    let mut report = Report::new();

    let mut vacua = Vec::new();
    let mut vac_mult_ok = true;
    for r in 0..k {
        let m = hom_dim(reps[r], &u, tol)?;
        if m > 0 {
            vacua.push(r);
            vac_mult_ok &= m == 1;
        }
    }
    report.flag("vacua occur once in U", vac_mult_ok);

    let mut fusion = vec![vec![vec![0usize; k]; k]; k];
    let mut dim_ok = true;
    for p in 0..k {
        for q in 0..k {
            let prod = tensor_module(reps[p], reps[q], tol)?;
            for r in 0..k {
                fusion[p][q][r] = hom_dim(reps[r], &prod, tol)?;
            }
            let total: usize = fusion[p][q].iter().zip(&dims).map(|(m, d)| m * d).sum();
            dim_ok &= total == prod.space_dim() && prod.space_dim() <= dims[p] * dims[q];
        }
    }
    report.flag("dim(p⊠q) ≤ d_p d_q and fully decomposed", dim_ok);

    let mut assoc = true;
    for p in 0..k {
        for q in 0..k {
            for r in 0..k {
                for t in 0..k {
                    let lhs: usize = (0..k).map(|s| fusion[p][q][s] * fusion[s][r][t]).sum();
                    let rhs: usize = (0..k).map(|s| fusion[q][r][s] * fusion[p][s][t]).sum();
                    assoc &= lhs == rhs;
                }
            }
        }
    }
    report.flag("fusion associative", assoc);

    let mut unit_ok = true;
    for r in 0..k {
        for prod in [tensor_module(&u, reps[r], tol)?, tensor_module(reps[r], &u, tol)?] {
            unit_ok &= prod.space_dim() == dims[r] && hom_dim(&prod, reps[r], tol)? == 1;
        }
    }
    report.flag("U⊠V ≅ V ≅ V⊠U", unit_ok);

    let left_vacuum: Vec<usize> =
        (0..k).map(|r| unique_vacuum(&vacua, r, &fusion, &dims, true)).collect::<Result<_>>()?;
    let right_vacuum: Vec<usize> =
        (0..k).map(|r| unique_vacuum(&vacua, r, &fusion, &dims, false)).collect::<Result<_>>()?;

    let mut conjugates = Vec::with_capacity(k);
    let mut conj_unique = true;
    for r in 0..k {
        let cands: Vec<usize> = (0..k).filter(|&s| fusion[r][s][left_vacuum[r]] > 0).collect();
        conj_unique &= cands.len() == 1;
        conjugates.push(*cands.first().ok_or(Error::NoConjugate(r))?);
    }
    report.flag("conjugate unique", conj_unique);
    report.flag("conjugation involutive", (0..k).all(|r| conjugates[conjugates[r]] == r));
    report.flag("vacua self-conjugate", vacua.iter().all(|&v| conjugates[v] == v));

    let mut b1 = true;
    let mut b2 = true;
    for p in 0..k {
        for q in 0..k {
            if right_vacuum[p] != left_vacuum[q] {
                b1 &= fusion[p][q].iter().all(|&m| m == 0);
            } else {
                for r in 0..k {
                    if fusion[p][q][r] > 0 {
                        b2 &= left_vacuum[r] == left_vacuum[p] && right_vacuum[r] == right_vacuum[q];
                    }
                }
            }
        }
    }
    report.flag("p⊠q = 0 when p^R ≠ q^L", b1);
    report.flag("constituents of p⊠q have vacua (p^L, q^R)", b2);
    report.flag(
        "conjugation swaps vacua",
        (0..k).all(|r| left_vacuum[conjugates[r]] == right_vacuum[r] && right_vacuum[conjugates[r]] == left_vacuum[r]),
    );
    let pairs: std::collections::BTreeSet<(usize, usize)> = (0..k).map(|r| (left_vacuum[r], right_vacuum[r])).collect();
    let transitive = pairs
        .iter()
        .all(|&(mu, nu)| pairs.iter().filter(|&&(_, m2)| m2 == mu).all(|&(lambda, _)| pairs.contains(&(lambda, nu))));
    report.flag("vacuum connectivity transitive", transitive);

    Ok(SectorTable { labels, dims, fusion, conjugates, vacua, left_vacuum, right_vacuum, report })
}

/// Three equivalent characterisations of connectedness.
#[derive(Debug, Clone, Copy)]
pub struct Purity {
    pub pure: bool,
    pub vacua: usize,
    /// `dim Z^L = dim(A^L ∩ Center A)`.
    pub center_left_dim: usize,
    pub trivial_irreducible: bool,
}

impl Purity {
    pub fn consistent(&self) -> bool {
        self.pure == self.trivial_irreducible
            && self.pure == (self.center_left_dim == 1)
            && self.vacua == self.center_left_dim
    }
}

pub fn check_purity(a: &WhaData, tol: Tolerance) -> Result<Purity> {
    let u = trivial_rep(a, tol)?;
    let end_u = hom_dim(&u, &u, tol)?;
    let parts = decompose_irreps(a, &u, tol)?;
    let vacua = parts.len();
    let left = Subspace::new(a.dim(), &columns(a.pi_l()), tol);
    let center = a.algebra().center(tol);
    let z = intersect(&left.basis, &center, tol).len();
    Ok(Purity { pure: end_u == 1, vacua, center_left_dim: z, trivial_irreducible: end_u == 1 && u.space_dim() > 0 })
}

/// `dim End(U)`, equal to `dim Z^L` for a C*-weak Hopf algebra.
pub fn trivial_endomorphisms(a: &WhaData, tol: Tolerance) -> Result<usize> {
    let u = trivial_rep(a, tol)?;
    hom_dim(&u, &u, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::fixtures::{kp2, kp2_kz2, kp3, ks3, kz2, kz2_kz2};
    use crate::linalg::ONE;
    use crate::wha::dual_wha;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn regular_reps_decompose() {
        let a = kp2();
        let v = ModuleRep::regular(&a);
        assert!(v.check(t()).passed());
        let parts = decompose_irreps(&a, &v, t()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!((parts[0].multiplicity, parts[0].isometries[0].ncols()), (2, 2));
        assert!(completeness_residual(&v, &parts) < 1e-9);

        let z = kz2();
        let parts = decompose_irreps(&z, &ModuleRep::regular(&z), t()).unwrap();
        assert_eq!(parts.iter().map(|c| c.multiplicity).collect::<Vec<_>>(), vec![1, 1]);
        // trivial first: π(h) = 1 on it
        let set = irreps(&z, t()).unwrap();
        assert!((set.irreps[0].character[1] - ONE).norm() < 1e-9);
        assert!((set.irreps[1].character[1] + ONE).norm() < 1e-9);
    }

    #[test]
    fn zero_rep_is_empty() {
        let a = kp2();
        assert!(decompose_irreps(&a, &ModuleRep::zero(&a), t()).unwrap().is_empty());
    }

    #[test]
    fn broken_rep_rejected() {
        let a = kz2();
        let action = vec![Mat::identity(1, 1), Mat::from_element(1, 1, crate::linalg::re(2.0))];
        assert!(matches!(ModuleRep::new(&a, action, None, t()), Err(Error::NotARepresentation(_))));
    }

    #[test]
    fn trivial_reps() {
        let a = kp2();
        let u = trivial_rep(&a, t()).unwrap();
        assert_eq!(u.space_dim(), 2);
        assert_eq!(hom_dim(&u, &u, t()).unwrap(), 1);
        assert_eq!(trivial_rep(&kz2(), t()).unwrap().space_dim(), 1);
        let u2 = trivial_rep(&kz2_kz2(), t()).unwrap();
        assert_eq!(u2.space_dim(), 2);
        assert_eq!(decompose_irreps(&kz2_kz2(), &u2, t()).unwrap().len(), 2);
    }

    #[test]
    fn truncated_products() {
        let a = kp2();
        let set = irreps(&a, t()).unwrap();
        let v = &set.irreps[0].rep;
        let vv = tensor_module(v, v, t()).unwrap();
        assert_eq!(vv.space_dim(), 2);
        assert_eq!(hom_dim(&vv, v, t()).unwrap(), 1);

        let z = kz2();
        let set = irreps(&z, t()).unwrap();
        let sign = &set.irreps[1].rep;
        let ss = tensor_module(sign, sign, t()).unwrap();
        assert_eq!(hom_dim(&ss, &set.irreps[0].rep, t()).unwrap(), 1);
    }

    #[test]
    fn mismatched_parents_rejected() {
        let v = ModuleRep::regular(&kz2());
        let w = ModuleRep::regular(&kp2());
        assert!(matches!(tensor_module(&v, &w, t()), Err(Error::ParentMismatch)));
    }

    #[test]
    fn source_map_matches_antipode_on_left_subalgebra() {
        for a in [kp2(), kz2_kz2(), ks3(), dual_wha(&kp2()).unwrap(), dual_wha(&kp3()).unwrap()] {
            let s = a.source_matrix();
            let ap = a.antipode().unwrap();
            for l in columns(a.pi_l()) {
                assert!(crate::linalg::max_abs_vec(&(&s * &l - ap * &l)) < 1e-9);
            }
        }
    }

    #[test]
    fn balanced_product_agrees_with_image() {
        for a in [kp2(), kz2_kz2(), ks3(), kp2_kz2(), dual_wha(&kp2()).unwrap()] {
            let set = irreps(&a, t()).unwrap();
            let u = trivial_rep(&a, t()).unwrap();
            let mut reps: Vec<ModuleRep> = set.irreps.iter().map(|i| i.rep.clone()).collect();
            reps.push(u);
            for v in &reps {
                for w in &reps {
                    let b = balanced_product(v, w, t()).unwrap();
                    assert!(b.matches(t()), "{b:?}");
                }
            }
        }
    }

    #[test]
    fn unit_maps_are_unitary() {
        for a in [kp2(), kz2_kz2(), ks3(), dual_wha(&kp2()).unwrap()] {
            for irr in irreps(&a, t()).unwrap().irreps {
                let r = unit_maps(&irr.rep, t()).unwrap();
                assert!(r.passed(), "{r}");
            }
        }
    }

    #[test]
    fn sector_tables() {
        let z = fusion_table(&kz2(), t()).unwrap();
        assert!(z.report.passed(), "{}", z.report);
        assert_eq!((z.len(), z.vacua.len()), (2, 1));
        assert_eq!(z.fusion[1][1], vec![1, 0]);

        let p = fusion_table(&kp2(), t()).unwrap();
        assert!(p.report.passed(), "{}", p.report);
        assert_eq!((p.len(), p.dims[0], p.vacua.clone()), (1, 2, vec![0]));
        assert_eq!(p.fusion[0][0], vec![1]);

        let d = fusion_table(&kz2_kz2(), t()).unwrap();
        assert!(d.report.passed(), "{}", d.report);
        assert_eq!((d.len(), d.vacua.len()), (4, 2));
        let cross =
            (0..4).flat_map(|p| (0..4).map(move |q| (p, q))).filter(|&(p, q)| d.right_vacuum[p] != d.left_vacuum[q]);
        assert!(cross.clone().count() > 0);
        for (p, q) in cross {
            assert_eq!(d.product_dim(p, q), 0);
        }

        let s3 = fusion_table(&ks3(), t()).unwrap();
        assert!(s3.report.passed(), "{}", s3.report);
        assert_eq!(s3.dims, vec![1, 1, 2]);
        // standard ⊠ standard = 1 + sign + standard
        assert_eq!(s3.fusion[2][2], vec![1, 1, 1]);
    }

    #[test]
    fn purity() {
        let p = check_purity(&kp2(), t()).unwrap();
        assert!(p.pure && p.vacua == 1 && p.consistent());
        assert!(check_purity(&kz2(), t()).unwrap().pure);
        let d = check_purity(&kz2_kz2(), t()).unwrap();
        assert!(!d.pure && d.vacua == 2 && d.consistent());
    }

    #[test]
    fn dual_groupoid_sectors() {
        let d = dual_wha(&kp2()).unwrap();
        let s = fusion_table(&d, t()).unwrap();
        assert!(s.report.passed(), "{s}\n{}", s.report);
    }
}
