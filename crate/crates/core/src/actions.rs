//! Module algebras over a weak Hopf algebra: axiom checks, invariants,
//! crossed products, Galois and regularity tests.

use crate::algebra::{FdAlgebra, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{
    columns, from_columns, intersect, max_abs, max_abs_vec, null_space, orthonormalize, quotient_basis, rank,
    solve_linear, unit_vector, Mat, Quotient, Tensor3, Tolerance, Vector, C64, ONE, ZERO,
};
use crate::report::Report;
use crate::wha::{dual_wha, haar_integral, Element, WhaData};

/// A left action of a weak Hopf algebra on a finite-dimensional algebra.
///
/// `act[i][j][k]` is the coefficient of `m_k` in `e_i ▷ m_j`.
#[derive(Debug, Clone)]
pub struct ActionData {
    pub wha: WhaData,
    pub algebra: FdAlgebra,
    pub act: Tensor3,
}

impl ActionData {
    pub fn new(wha: WhaData, algebra: FdAlgebra, act: Tensor3) -> Result<Self> {
        let (n, m) = (wha.dim(), algebra.dim());
        if act.dims() != [n, m, m] {
            return Err(Error::DimensionMismatch(format!(
                "action tensor has shape {:?}, expected {:?}",
                act.dims(),
                [n, m, m]
            )));
        }
        Ok(ActionData { wha, algebra, act })
    }

    pub fn module_dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Matrix of `m ↦ e_i ▷ m`.
    pub fn action_matrix(&self, i: usize) -> Mat {
        self.act.slice(i).transpose()
    }

    /// Matrix of `m ↦ x ▷ m`.
    pub fn apply(&self, x: &Element) -> Mat {
        let m = self.module_dim();
        let mut out = Mat::zeros(m, m);
        for (i, c) in x.iter().enumerate() {
            if *c != ZERO {
                out += self.action_matrix(i) * *c;
            }
        }
        out
    }

    pub fn act_on(&self, x: &Element, m: &Vector) -> Vector {
        self.apply(x) * m
    }

    fn scale(&self) -> f64 {
        let a = 1.0 + self.act.max_abs();
        self.wha.scale() * a * a * (1.0 + self.algebra.mult().max_abs())
    }
}

/// The dual acting on `A` by `φ ▷ a = φ ⇀ a = a₍₁₎⟨φ, a₍₂₎⟩`.
pub fn weyl_action(a: &WhaData) -> Result<ActionData> {
    let dual = dual_wha(a)?;
    let n = a.dim();
    let mut act = Tensor3::zeros(n, n, n);
    for (j, k, i, c) in a.comult().triples() {
        act.set(i, j, k, c);
    }
    ActionData::new(dual, a.algebra().clone(), act)
}

/// `A` acting on `A^L` by `a ▷ l = πL(al)`.
pub fn trivial_action(a: &WhaData, tol: Tolerance) -> Result<ActionData> {
    let left = Subspace::new(a.dim(), &columns(a.pi_l()), tol);
    let (sub, emb) = a.algebra().subalgebra(&left.basis, tol)?;
    let k = sub.dim();
    let mut act = Tensor3::zeros(a.dim(), k, k);
    for i in 0..a.dim() {
        let m = emb.adjoint() * a.pi_l() * a.algebra().basis_left(i) * &emb;
        for j in 0..k {
            for l in 0..k {
                act.set(i, j, l, m[(l, j)]);
            }
        }
    }
    ActionData::new(a.clone(), sub, act)
}

/// Outcome of [`verify_module_algebra`].
#[derive(Debug, Clone)]
pub struct ModuleAlgebraReport {
    pub report: Report,
    /// `a ▷ M = 0 ⇒ a = 0`.
    pub faithful: bool,
}

impl ModuleAlgebraReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Which element acts on `m*` in the star compatibility rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarRule {
    /// `(a▷m)* = S(a)*▷m*`.
    AntipodeThenStar,
    /// `(a▷m)* = S(a)▷m*`, which is not a valid rule.
    AntipodeOnly,
}

/// Residual of the star compatibility rule over `a ∈ {e_i, i·e_i}`.
pub fn star_rule_residual(x: &ActionData, rule: StarRule) -> Result<f64> {
    let s = x.wha.require_antipode()?;
    let sigma_a = x.wha.require_star()?;
    let sigma_m = x.algebra.star_matrix().ok_or(Error::MissingStar)?;
    let mk = x.module_dim();
    let mut worst: f64 = 0.0;
    for i in 0..x.wha.dim() {
        for phase in [ONE, C64::new(0.0, 1.0)] {
            let a = x.wha.basis(i) * phase;
            let sa = s * &a;
            let acting = match rule {
                StarRule::AntipodeThenStar => sigma_a * sa.conjugate(),
                StarRule::AntipodeOnly => sa,
            };
            let ra = x.apply(&a);
            let rs = x.apply(&acting);
            for p in 0..mk {
                let lhs = sigma_m * (&ra * unit_vector(mk, p)).conjugate();
                let rhs = &rs * sigma_m.column(p);
                worst = worst.max(max_abs_vec(&(lhs - rhs)));
            }
        }
    }
    Ok(worst)
}

/// Checks the module-algebra axioms: (1) module, (2) unital algebra,
/// (3) multiplication is a module map, (4) unit is a module map,
/// (5) C*-algebra, (6) continuity, (7) star compatibility.
pub fn verify_module_algebra(x: &ActionData, tol: Tolerance) -> ModuleAlgebraReport {
    let a = &x.wha;
    let m = &x.algebra;
    let (n, mk) = (a.dim(), m.dim());
    let thr = tol.threshold(x.scale());
    let mut r = Report::new();
    let mats: Vec<Mat> = (0..n).map(|i| x.action_matrix(i)).collect();

    let mut module: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let ab = x.apply(&a.mul(&a.basis(i), &a.basis(j)));
            module = module.max(max_abs(&(&mats[i] * &mats[j] - ab)));
        }
    }
    r.record("(1) a▷(b▷m) = ab▷m", module, thr);
    r.record("(1) 1▷m = m", max_abs(&(x.apply(a.unit()) - Mat::identity(mk, mk))), thr);
    r.record("(2) M associative", m.associativity_residual(), thr);
    r.record("(2) M unital", m.unit_residual(), thr);

    let mut mult: f64 = 0.0;
    for i in 0..n {
        let d = a.comult().slice(i);
        for p in 0..mk {
            for q in 0..mk {
                let lhs = &mats[i] * m.mul(&m.basis(p), &m.basis(q));
                let mut rhs = Vector::zeros(mk);
                for j in 0..n {
                    for k in 0..n {
                        let c = d[(j, k)];
                        if c != ZERO {
                            rhs += m.mul(&mats[j].column(p).into_owned(), &mats[k].column(q).into_owned()) * c;
                        }
                    }
                }
                mult = mult.max(max_abs_vec(&(lhs - rhs)));
            }
        }
    }
    r.record("(3) a▷(mm') = (a₍₁₎▷m)(a₍₂₎▷m')", mult, thr);

    let mut unit: f64 = 0.0;
    for i in 0..n {
        let pl = a.pi_l().column(i).into_owned();
        unit = unit.max(max_abs_vec(&(&mats[i] * m.unit() - x.apply(&pl) * m.unit())));
    }
    r.record("(4) a▷1 = πL(a)▷1", unit, thr);

    match m.star_residuals() {
        Ok(s) => {
            r.record("(5) M star axioms", s.iter().cloned().fold(0.0, f64::max), thr);
            r.flag("(5) M trace form positive", trace_form_positive(m, tol));
        }
        Err(_) => {
            r.flag("(5) M star axioms", false);
        }
    }
    // linear maps between finite-dimensional spaces
    r.flag("(6) continuity", true);
    match star_rule_residual(x, StarRule::AntipodeThenStar) {
        Ok(res) => r.record("(7) (a▷m)* = S(a)*▷m*", res, thr),
        Err(_) => r.flag("(7) (a▷m)* = S(a)*▷m*", false),
    };

    let mut stacked = Mat::zeros(mk * mk, n);
    for (i, mi) in mats.iter().enumerate() {
        stacked.set_column(i, &Vector::from_column_slice(mi.as_slice()));
    }
    let faithful = rank(&stacked, tol.rank()) == n;
    ModuleAlgebraReport { report: r, faithful }
}

fn trace_form_positive(m: &FdAlgebra, tol: Tolerance) -> bool {
    let Some(sigma) = m.star_matrix() else { return false };
    let d = m.dim();
    let tau = m.regular_trace();
    let g = Mat::from_fn(d, d, |i, j| tau.dot(&m.mul(&sigma.column(i).into_owned(), &m.basis(j))));
    let herm = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    crate::linalg::herm_eig(&herm, tol)
        .map(|(v, _)| v.last().copied().unwrap_or(0.0) > tol.threshold(max_abs(&g)))
        .unwrap_or(false)
}

/// The invariant subalgebra `M^A = {n : a▷n = πL(a)▷n}`.
#[derive(Debug, Clone)]
pub struct Invariants {
    /// Orthonormal basis in the coordinates of `M`.
    pub basis: Vec<Vector>,
    /// Subalgebra closure and `h▷M = M^A`.
    pub report: Report,
}

impl Invariants {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn invariant_subalgebra(x: &ActionData, tol: Tolerance) -> Result<Invariants> {
    let a = &x.wha;
    let (n, mk) = (a.dim(), x.module_dim());
    let mut stacked = Mat::zeros(n * mk, mk);
    for i in 0..n {
        let pl = a.pi_l().column(i).into_owned();
        let d = x.action_matrix(i) - x.apply(&pl);
        stacked.view_mut((i * mk, 0), (mk, mk)).copy_from(&d);
    }
    let basis = orthonormalize(&columns(&null_space(&stacked, tol.rank())), tol.rank());
    let inv = Subspace::new(mk, &basis, tol);
    let thr = tol.rank().threshold(1.0);
    let mut r = Report::new();
    let m = &x.algebra;
    r.record("1 ∈ M^A", inv.distance(m.unit()), thr);
    let mut closed: f64 = 0.0;
    for p in &basis {
        for q in &basis {
            closed = closed.max(inv.distance(&m.mul(p, q)));
        }
        if m.has_star() {
            closed = closed.max(inv.distance(&m.star(p)?));
        }
    }
    r.record("M^A closed under product and star", closed, thr);
    if a.star_matrix().is_some() && a.antipode().is_some() {
        let h = haar_integral(a, tol)?;
        let image = Subspace::new(mk, &columns(&x.apply(&h)), tol);
        r.record("h▷M = M^A", image.distance_to(&inv), thr);
    }
    Ok(Invariants { basis, report: r })
}

/// `M ⋊ A` realised on the quotient `M⊗A / span{m·l⊗a − m⊗la}`.
#[derive(Debug, Clone)]
pub struct CrossedProduct {
    pub algebra: FdAlgebra,
    pub quotient: Quotient,
    /// Column `p` is `m_p ⋊ 1`.
    pub embed_m: Mat,
    /// Column `i` is `1 ⋊ e_i`.
    pub embed_a: Mat,
    pub report: Report,
}

impl CrossedProduct {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Coordinates of `m ⋊ a`.
    pub fn element(&self, m: &Vector, a: &Element) -> Vector {
        self.quotient.project(&m.kronecker(a))
    }
}

/// Left multiplication operators on the ambient space `M⊗A`.
struct AmbientProduct {
    left: Vec<Mat>,
}

impl AmbientProduct {
    fn build(x: &ActionData) -> Self {
        let a = &x.wha;
        let m = &x.algebra;
        let (n, mk) = (a.dim(), m.dim());
        let mats: Vec<Mat> = (0..n).map(|i| x.action_matrix(i)).collect();
        let comult = a.comult().triples();
        let mut left = Vec::with_capacity(mk * n);
        for p in 0..mk {
            let lp = m.basis_left(p);
            for i in 0..n {
                let mut b = Mat::zeros(mk * n, mk * n);
                for &(ii, j, k, c) in &comult {
                    if ii == i {
                        b += (lp * &mats[j]).kronecker(a.algebra().basis_left(k)) * c;
                    }
                }
                left.push(b);
            }
        }
        AmbientProduct { left }
    }

    fn left_of(&self, x: &Vector) -> Mat {
        let d = x.len();
        let mut out = Mat::zeros(d, d);
        for (u, c) in x.iter().enumerate() {
            if *c != ZERO {
                out += &self.left[u] * *c;
            }
        }
        out
    }
}

/// Builds `M ⋊ A` with `(m⋊a)(m'⋊a') = m(a₍₁₎▷m') ⋊ a₍₂₎a'` and
/// `(m⋊a)* = (a₍₁₎*▷m*) ⋊ a₍₂₎*`, and checks it.
pub fn crossed_product(x: &ActionData, tol: Tolerance) -> Result<CrossedProduct> {
    let a = &x.wha;
    let m = &x.algebra;
    let (n, mk) = (a.dim(), m.dim());
    let d = n * mk;
    let left = Subspace::new(n, &columns(a.pi_l()), tol);
    let mut relations = Vec::new();
    for l in &left.basis {
        let l1 = x.act_on(l, m.unit());
        let la = a.algebra().left_matrix(l);
        for p in 0..mk {
            let ml = m.mul(&m.basis(p), &l1);
            for i in 0..n {
                relations.push(ml.kronecker(&a.basis(i)) - m.basis(p).kronecker(&la.column(i).into_owned()));
            }
        }
    }
    let span: Vec<Vector> = (0..d).map(|u| unit_vector(d, u)).collect();
    let quotient = quotient_basis(d, &span, &relations, tol);
    let q = quotient.dim();
    if q == 0 {
        return Err(Error::QuotientDegenerate);
    }
    let amb = AmbientProduct::build(x);
    let lifts: Vec<Vector> = quotient.basis.clone();
    let mut mult = Tensor3::zeros(q, q, q);
    for (b1, x1) in lifts.iter().enumerate() {
        let l = quotient.coords.clone() * amb.left_of(x1);
        for (b2, x2) in lifts.iter().enumerate() {
            let v = &l * x2;
            for c in 0..q {
                mult.set(b1, b2, c, v[c]);
            }
        }
    }
    let unit = quotient.project(&m.unit().kronecker(a.unit()));

    let star = match (m.star_matrix(), a.star_matrix()) {
        (Some(sm), Some(sa)) => {
            let mats: Vec<Mat> = (0..n).map(|i| x.action_matrix(i)).collect();
            let mut amb_star = Mat::zeros(d, d);
            for (i, j, k, c) in a.comult().triples() {
                let rho = {
                    let mut r = Mat::zeros(mk, mk);
                    for (jj, z) in sa.column(j).iter().enumerate() {
                        if *z != ZERO {
                            r += &mats[jj] * *z;
                        }
                    }
                    r
                };
                let ek = sa.column(k).into_owned();
                for p in 0..mk {
                    let v = (&rho * sm.column(p)).kronecker(&ek) * c;
                    let u = p * n + i;
                    let mut col = amb_star.column_mut(u);
                    col += v;
                }
            }
            let cols: Vec<Vector> = lifts.iter().map(|xl| quotient.project(&(&amb_star * xl.conjugate()))).collect();
            Some(Mat::from_columns(&cols))
        }
        _ => None,
    };
    let algebra = FdAlgebra::new(mult, unit, star)?;
    let embed_m =
        Mat::from_columns(&(0..mk).map(|p| quotient.project(&m.basis(p).kronecker(a.unit()))).collect::<Vec<_>>());
    let embed_a =
        Mat::from_columns(&(0..n).map(|i| quotient.project(&m.unit().kronecker(&a.basis(i)))).collect::<Vec<_>>());
    let mut cp = CrossedProduct { algebra, quotient, embed_m, embed_a, report: Report::new() };
    cp.report = check_crossed_product(x, &cp, &amb, &relations, tol)?;
    Ok(cp)
}

fn check_crossed_product(
    x: &ActionData,
    cp: &CrossedProduct,
    amb: &AmbientProduct,
    relations: &[Vector],
    tol: Tolerance,
) -> Result<Report> {
    let a = &x.wha;
    let m = &x.algebra;
    let (n, mk) = (a.dim(), m.dim());
    let c = &cp.algebra;
    let thr = tol.threshold(x.scale() * x.scale());
    let mut r = Report::new();

    let coords = &cp.quotient.coords;
    let mut descend: f64 = 0.0;
    let rel_mat = from_columns(relations, n * mk);
    for rel in relations {
        descend = descend.max(max_abs(&(coords * amb.left_of(rel))));
    }
    for l in &amb.left {
        descend = descend.max(max_abs(&(coords * l * &rel_mat)));
    }
    r.record("product descends to the quotient", descend, thr);
    r.record("associative", c.associativity_residual(), thr);
    r.record("unital", c.unit_residual(), thr);
    if c.has_star() {
        r.record("star axioms", c.star_residuals()?.iter().cloned().fold(0.0, f64::max), thr);
    }

    let mut hom_m: f64 = 0.0;
    for p in 0..mk {
        for q in 0..mk {
            let lhs = c.mul(&cp.embed_m.column(p).into_owned(), &cp.embed_m.column(q).into_owned());
            let rhs = &cp.embed_m * m.mul(&m.basis(p), &m.basis(q));
            hom_m = hom_m.max(max_abs_vec(&(lhs - rhs)));
        }
    }
    r.record("M ↪ M⋊A multiplicative", hom_m, thr);
    let mut hom_a: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = c.mul(&cp.embed_a.column(i).into_owned(), &cp.embed_a.column(j).into_owned());
            let rhs = &cp.embed_a * a.mul(&a.basis(i), &a.basis(j));
            hom_a = hom_a.max(max_abs_vec(&(lhs - rhs)));
        }
    }
    r.record("A ↪ M⋊A multiplicative", hom_a, thr);
    r.flag("M ↪ M⋊A injective", rank(&cp.embed_m, tol.rank()) == mk);
    r.flag("A ↪ M⋊A injective", rank(&cp.embed_a, tol.rank()) == n);
    r.record(
        "embeddings unital",
        max_abs_vec(&(&cp.embed_m * m.unit() - c.unit())).max(max_abs_vec(&(&cp.embed_a * a.unit() - c.unit()))),
        thr,
    );

    let mut split: f64 = 0.0;
    for p in 0..mk {
        for i in 0..n {
            let lhs = c.mul(&cp.embed_m.column(p).into_owned(), &cp.embed_a.column(i).into_owned());
            let rhs = cp.element(&m.basis(p), &a.basis(i));
            split = split.max(max_abs_vec(&(lhs - rhs)));
        }
    }
    r.record("(m⋊1)(1⋊a) = m⋊a", split, thr);

    if a.star_matrix().is_some() && a.antipode().is_some() && c.has_star() {
        let mut star_m: f64 = 0.0;
        let sm = m.star_matrix().expect("checked above");
        for p in 0..mk {
            let lhs = c.star(&cp.embed_m.column(p).into_owned())?;
            star_m = star_m.max(max_abs_vec(&(lhs - &cp.embed_m * sm.column(p))));
        }
        r.record("M ↪ M⋊A star-preserving", star_m, thr);
        let h = haar_integral(a, tol)?;
        let hc = &cp.embed_a * &h;
        let eh = x.apply(&h);
        let mut jones: f64 = 0.0;
        for p in 0..mk {
            let mp = cp.embed_m.column(p).into_owned();
            let lhs = c.mul3(&hc, &mp, &hc);
            let rhs = c.mul(&(&cp.embed_m * eh.column(p)), &hc);
            jones = jones.max(max_abs_vec(&(lhs - rhs)));
        }
        r.record("hmh = (h▷m)h", jones, thr);
    }
    Ok(r)
}

/// Whether `span(M h M) = M ⋊ A`.
#[derive(Debug, Clone, Copy)]
pub struct GaloisCheck {
    pub galois: bool,
    pub span_dim: usize,
    pub crossed_dim: usize,
}

/// Tests whether `M ⋊ A` is the basic construction of `M^A ⊂ M` with
/// Jones projection `h`, i.e. whether the products `m h m'` span it.
pub fn galois_check(x: &ActionData, cp: &CrossedProduct, tol: Tolerance) -> Result<GaloisCheck> {
    let h = haar_integral(&x.wha, tol)?;
    let hc = &cp.embed_a * &h;
    let c = &cp.algebra;
    let ms = columns(&cp.embed_m);
    let mut words = Vec::with_capacity(ms.len() * ms.len());
    for p in &ms {
        let ph = c.mul(p, &hc);
        for q in &ms {
            words.push(c.mul(&ph, q));
        }
    }
    let span_dim = orthonormalize(&words, tol.rank()).len();
    Ok(GaloisCheck { galois: span_dim == c.dim(), span_dim, crossed_dim: c.dim() })
}

/// Outcome of [`regularity_report`].
#[derive(Debug, Clone)]
pub struct Regularity {
    /// Minimality, basic construction and finite index.
    pub conditions: Report,
    /// The five relative commutant and center identities. Asserted only
    /// for regular actions.
    pub commutants: Report,
    /// The dual acting on `M ⋊ A` through the second tensor factor.
    pub dual_action: Option<ModuleAlgebraReport>,
    /// `M` is exactly the invariant subalgebra of the dual action.
    pub dual_invariants: Option<f64>,
    pub regular: bool,
}

fn subspace_check(r: &mut Report, name: &str, ambient: usize, lhs: &[Vector], rhs: &[Vector], tol: Tolerance) {
    let a = Subspace::new(ambient, lhs, tol);
    let b = Subspace::new(ambient, rhs, tol);
    r.record(name, a.distance_to(&b), tol.rank().threshold(1.0));
}

/// Quasibasis for `E = h▷(·)`: `T` with `Σ T_pq m_p E(m_q m) = m` for all
/// `m`. Returns `None` if no solution exists.
pub fn quasibasis_for_action(x: &ActionData, tol: Tolerance) -> Result<Option<Mat>> {
    let h = haar_integral(&x.wha, tol)?;
    let e = x.apply(&h);
    let m = &x.algebra;
    let mk = m.dim();
    let mut sys = Mat::zeros(mk * mk, mk * mk);
    let mut rhs = Mat::zeros(mk * mk, 1);
    for r in 0..mk {
        for p in 0..mk {
            for q in 0..mk {
                let v = m.mul(&m.basis(p), &(&e * m.mul(&m.basis(q), &m.basis(r))));
                for s in 0..mk {
                    sys[(r * mk + s, p + q * mk)] = v[s];
                }
            }
        }
        rhs[(r * mk + r, 0)] = ONE;
    }
    match solve_linear(&sys, &rhs, tol) {
        Ok(sol) => Ok(Some(Mat::from_column_slice(mk, mk, sol.particular.as_slice()))),
        Err(Error::InconsistentSystem { .. }) => Ok(None),
        Err(err) => Err(err),
    }
}

/// Minimality, basic construction and finite index, followed by the
/// relative commutants of `M^A ⊂ M ⊂ M⋊A` and the dual action.
pub fn regularity_report(x: &ActionData, cp: &CrossedProduct, tol: Tolerance) -> Result<Regularity> {
    let a = &x.wha;
    let m = &x.algebra;
    let (n, mk) = (a.dim(), m.dim());
    let thr = tol.rank().threshold(1.0);
    let inv = invariant_subalgebra(x, tol)?;
    let left = Subspace::new(n, &columns(a.pi_l()), tol);
    let right = Subspace::new(n, &columns(a.pi_r()), tol);
    let center_a = a.algebra().center(tol);
    let to_m = |l: &Vector| x.act_on(l, m.unit());

    let mut cond = Report::new();
    let rel = m.commutant(&inv.basis, None, tol);
    let al_image: Vec<Vector> = left.basis.iter().map(to_m).collect();
    subspace_check(&mut cond, "(M^A)'∩M = A^L▷1", mk, &rel, &al_image, tol);
    cond.flag("l ↦ l▷1 injective", orthonormalize(&al_image, tol.rank()).len() == left.dim());

    let g = galois_check(x, cp, tol)?;
    cond.flag("span(M h M) = M⋊A", g.galois);
    let h = haar_integral(a, tol)?;
    let c = &cp.algebra;
    let hc = &cp.embed_a * &h;
    let eh = x.apply(&h);
    let mut jones: f64 = 0.0;
    for p in 0..mk {
        let mp = cp.embed_m.column(p).into_owned();
        let lhs = c.mul3(&hc, &mp, &hc);
        jones = jones.max(max_abs_vec(&(lhs - c.mul(&(&cp.embed_m * eh.column(p)), &hc))));
    }
    cond.record("h m h = E(m) h", jones, tol.threshold(x.scale() * x.scale()));
    cond.flag("finite index: quasibasis exists", quasibasis_for_action(x, tol)?.is_some());
    let regular = cond.passed();

    let mut comm = Report::new();
    let q = cp.dim();
    let im = columns(&cp.embed_m);
    let ia: Vec<Vector> = (0..n).map(|i| cp.embed_a.column(i).into_owned()).collect();
    let inv_in_c: Vec<Vector> = inv.basis.iter().map(|v| &cp.embed_m * v).collect();
    let ar_in_c: Vec<Vector> = right.basis.iter().map(|r| &cp.embed_a * r).collect();
    subspace_check(&mut comm, "M'∩(M⋊A) = A^R", q, &c.commutant(&im, None, tol), &ar_in_c, tol);
    subspace_check(&mut comm, "(M^A)'∩(M⋊A) = A", q, &c.commutant(&inv_in_c, None, tol), &ia, tol);
    let center_n = m.commutant(&inv.basis, Some(&inv.basis), tol);
    let zl: Vec<Vector> = intersect(&left.basis, &center_a, tol).iter().map(to_m).collect();
    subspace_check(&mut comm, "Center M^A = A^L∩Center A", mk, &center_n, &zl, tol);
    let lr: Vec<Vector> = intersect(&left.basis, &right.basis, tol).iter().map(to_m).collect();
    subspace_check(&mut comm, "Center M = A^L∩A^R", mk, &m.center(tol), &lr, tol);
    let zr: Vec<Vector> = intersect(&right.basis, &center_a, tol).iter().map(|v| &cp.embed_a * v).collect();
    subspace_check(&mut comm, "Center(M⋊A) = A^R∩Center A", q, &c.center(tol), &zr, tol);

    let (dual_action, dual_invariants) = match dual_on_crossed_product(x, cp) {
        Ok(dx) => {
            let rep = verify_module_algebra(&dx, tol);
            let dinv = invariant_subalgebra(&dx, tol)?;
            let dist = Subspace::new(q, &dinv.basis, tol).distance_to(&Subspace::new(q, &im, tol));
            (Some(rep), Some(dist))
        }
        Err(_) => (None, None),
    };
    if let Some(d) = dual_invariants {
        comm.record("invariants of the dual action = M", d, thr);
    }
    Ok(Regularity { conditions: cond, commutants: comm, dual_action, dual_invariants, regular })
}

/// `φ ▸ (m⋊a) = m ⋊ (φ⇀a)`.
pub fn dual_on_crossed_product(x: &ActionData, cp: &CrossedProduct) -> Result<ActionData> {
    let a = &x.wha;
    let dual = dual_wha(a)?;
    let (n, mk) = (a.dim(), x.module_dim());
    let q = cp.dim();
    let mut act = Tensor3::zeros(n, q, q);
    for phi in 0..n {
        // φ ⇀ e_i = Σ_k c[i][k][φ] e_k
        let mut arrow = Mat::zeros(n, n);
        for (i, k, l, c) in a.comult().triples() {
            if l == phi {
                arrow[(k, i)] += c;
            }
        }
        let big = Mat::identity(mk, mk).kronecker(&arrow);
        for (b, xl) in cp.quotient.basis.iter().enumerate() {
            let v = cp.quotient.project(&(&big * xl));
            for k in 0..q {
                act.set(phi, b, k, v[k]);
            }
        }
    }
    ActionData::new(dual, cp.algebra.clone(), act)
}
