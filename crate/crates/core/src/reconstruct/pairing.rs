//! The pairing between `A = End(ῑ∘ι) ≅ N'∩M₂` and `B = End(ι∘ῑ) ≅ M'∩M₃`
//! and the weak Hopf structures it induces.

use super::amp::{cell_algebra, cell_coords, Amp};
use super::rigidity::{Rigidity, M_OBJ};
use crate::algebra::{FdAlgebra, DEFAULT_SEED};
use crate::linalg::{herm_apply, max_abs, max_abs_vec, Mat, Tensor3, Tolerance, Vector, C64, ONE, ZERO};
use crate::report::Report;
use crate::wha::{dual_wha, verify_cstar, WhaData};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `⟨b, a⟩ = tr_M Ψ_{123}(U₂₃U₁₂ a z₁ b z₃)` for `b ∈ End(ι∘ῑ)`,
/// `a ∈ End(ῑ∘ι)` on Frobenius-orthonormal bases.
#[derive(Debug, Clone)]
pub struct PairingData {
    /// Basis of `A = End(ῑ∘ι)`, the algebra acting on `M`.
    pub a_basis: Vec<Mat>,
    /// Basis of `B = End(ι∘ῑ)`.
    pub b_basis: Vec<Mat>,
    pub a_alg: FdAlgebra,
    pub b_alg: FdAlgebra,
    pub z: Mat,
    /// Entry `(α, β)` is `⟨b_β, a_α⟩`.
    pub matrix: Mat,
    /// `𝓕(a_α)` in coordinates of `B`.
    pub fourier: Vec<Vector>,
    /// `max |⟨b, a⟩ − tr_M Ψ₁₂(𝓕(a)b)|`.
    pub fourier_agreement: f64,
    /// Smallest singular value of the pairing matrix.
    pub min_singular: f64,
}

/// `K` with `f(X) = Tr(K X)` for a linear functional on `n×n` matrices.
fn density(n: usize, f: impl Fn(&Mat) -> C64) -> Mat {
    let mut k = Mat::zeros(n, n);
    let mut e = Mat::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            e[(p, q)] = ONE;
            k[(q, p)] = f(&e);
            e[(p, q)] = ZERO;
        }
    }
    k
}

fn trace_prod(k: &Mat, x: &Mat) -> C64 {
    // Tr(K X) without forming the product
    k.transpose().dot(x)
}

/// Embeddings into `End(ι∘ῑ∘ι)` and the auxiliary 2-cells.
struct Triple {
    u12: Mat,
    u23: Mat,
    z1: Mat,
    z3: Mat,
    iota: Amp,
}

impl Triple {
    fn new(rig: &Rigidity, z: &Mat) -> Self {
        let s = &rig.setting;
        let cat = &s.cat;
        let iota = s.iota.clone();
        let u12 = &rig.r_bar * rig.r_bar.adjoint();
        let u23 = cat.hor(&cat.one(&iota), &(&rig.r * rig.r.adjoint()), &iota);
        let z1 = cat.hor(z, &cat.one(&s.ji()), &iota);
        let ii = s.ii();
        let z3 = cat.hor(&cat.one(&ii), z, &ii);
        Triple { u12, u23, z1, z3, iota }
    }

    fn embed(&self, rig: &Rigidity, b: &Mat) -> Mat {
        let cat = &rig.setting.cat;
        cat.hor(&cat.one(&self.iota), b, &self.iota)
    }
}

/// Builds the pairing for a Hermitian invertible central `z ∈ End ι` and
/// checks it against the Fourier form `tr_M Ψ₁₂(𝓕(b)a)`.
pub fn build_pairing(rig: &Rigidity, z: &Mat, tol: Tolerance) -> Result<PairingData> {
    let s = &rig.setting;
    let cat = &s.cat;
    let (ii, ji) = (s.ii(), s.ji());
    let b_basis = cat.hom(&ii, &ii, tol)?;
    let a_basis = cat.hom(&ji, &ji, tol)?;
    if a_basis.len() != b_basis.len() {
        return Err(Error::DegeneratePairing(0.0));
    }
    let a_alg = cell_algebra(&a_basis, &cat.one(&ji), tol)?;
    let b_alg = cell_algebra(&b_basis, &cat.one(&ii), tol)?;
    let t = Triple::new(rig, z);
    // tr_M Ψ₁, tr_M Ψ₁₂ and tr_M Ψ₁₂₃ as densities
    let dm = cat.objs[M_OBJ].dim;
    let k1 = density(dm, |t| rig.tr_m(&rig.psi1(t)));
    let k12 = rig.trace_out_iota_bar_dual(&k1, &s.iota);
    let k123 = rig.trace_out_iota_dual(&k12, &ii);
    let r = a_basis.len();
    let mut matrix = Mat::zeros(r, r);
    let mut fourier = Vec::with_capacity(r);
    let mut agreement: f64 = 0.0;
    let k12t = k12.transpose();
    for (alpha, a) in a_basis.iter().enumerate() {
        let aa = t.embed(rig, a);
        let left = &t.z3 * &k123 * &t.u23 * &t.u12 * &aa * &t.z1;
        let f = rig.psi3(&(&t.u23 * &t.u12 * &t.z1 * &aa * &t.z3));
        for (beta, b) in b_basis.iter().enumerate() {
            let ansatz = trace_prod(&left, b);
            let via_f = k12t.dot(&(&f * b));
            matrix[(alpha, beta)] = ansatz;
            agreement = agreement.max((ansatz - via_f).norm());
        }
        fourier.push(cell_coords(&b_basis, &f, tol)?);
    }
    let sv = matrix.clone().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if smin <= tol.rank().threshold(smax) {
        return Err(Error::DegeneratePairing(smin));
    }
    Ok(PairingData {
        a_basis,
        b_basis,
        a_alg,
        b_alg,
        z: z.clone(),
        matrix,
        fourier,
        fourier_agreement: agreement,
        min_singular: smin,
    })
}

/// Both weak Hopf algebras with the checks of the reconstruction.
#[derive(Debug, Clone)]
pub struct Extracted {
    /// `A = End(ῑ∘ι)` with `⟨b⊗b', Δa⟩ = ⟨bb', a⟩`; this is the one acting on `M`.
    pub a: WhaData,
    /// `B = End(ι∘ῑ)` with `⟨Δb, a⊗a'⟩ = ⟨b, aa'⟩`.
    pub b: WhaData,
    pub report: Report,
    pub fork: ForkReport,
}

/// The equivalent forms of multiplicativity of the coproducts.
#[derive(Debug, Clone, PartialEq)]
pub struct ForkReport {
    /// `max ‖a∘f − f∘(a₍₁₎⊗a₍₂₎)‖` over the basis of `A`.
    pub fork_residual: f64,
    /// `‖Σ u_i* z₁⁻² U₂₃ u_i − 1‖`.
    pub quasibasis_residual: f64,
    pub delta_a_residual: f64,
    pub delta_b_residual: f64,
    pub threshold: f64,
}

impl ForkReport {
    /// All four statements hold or all four fail.
    pub fn consistent(&self) -> bool {
        let v = [self.fork_residual, self.quasibasis_residual, self.delta_a_residual, self.delta_b_residual]
            .map(|x| x <= self.threshold);
        v.iter().all(|&b| b) || v.iter().all(|&b| !b)
    }

    pub fn holds(&self) -> bool {
        [self.fork_residual, self.quasibasis_residual, self.delta_a_residual, self.delta_b_residual]
            .iter()
            .all(|&x| x <= self.threshold)
    }
}

fn star_matrix(alg: &FdAlgebra) -> Result<Mat> {
    alg.star_matrix().cloned().ok_or(Error::MissingStar)
}

/// Reads off `Δ`, `ε`, `S` on both algebras from the pairing and checks
/// the axioms (i)–(ix), the C*-structure, the fork rule and
/// `S²|_{A^L} = id`.
pub fn extract_wha(rig: &Rigidity, p: &PairingData, tol: Tolerance) -> Result<Extracted> {
    let r = p.a_basis.len();
    // rows of P index the first slot B, columns the second slot A
    let pt = p.matrix.transpose();
    let pm = &pt;
    let (first, second) = (&p.b_alg, &p.a_alg);
    let pinv = pm.clone().try_inverse().ok_or(Error::DegeneratePairing(p.min_singular))?;
    let pinv_t = pinv.transpose();
    let (sa, sb) = (star_matrix(first)?, star_matrix(second)?);
    let (ma, mb) = (first.mult(), second.mult());

    let mut comult_a = Tensor3::zeros(r, r, r);
    let mut comult_b = Tensor3::zeros(r, r, r);
    for al in 0..r {
        // X_α[β][β'] = ⟨a_α, b_β b_β'⟩
        let x = Mat::from_fn(r, r, |b1, b2| (0..r).map(|k| mb.get(b1, b2, k) * pm[(al, k)]).sum());
        let d = &pinv_t * x * &pinv;
        for g in 0..r {
            for h in 0..r {
                comult_a.set(al, g, h, d[(g, h)]);
            }
        }
    }
    for be in 0..r {
        // Y_β[α][α'] = ⟨a_α a_α', b_β⟩
        let y = Mat::from_fn(r, r, |a1, a2| (0..r).map(|k| ma.get(a1, a2, k) * pm[(k, be)]).sum());
        let e = &pinv * y * &pinv_t;
        for g in 0..r {
            for h in 0..r {
                comult_b.set(be, g, h, e[(g, h)]);
            }
        }
    }
    comult_a.chop(1e-13);
    comult_b.chop(1e-13);
    let counit_a = pm * second.unit();
    let counit_b = pm.transpose() * first.unit();
    let pconj_inv = pm.map(|c| c.conj()).try_inverse().ok_or(Error::DegeneratePairing(p.min_singular))?;
    let s_a = &sa * pconj_inv.transpose() * (pm * &sb).transpose();
    let s_b = &sb * &pconj_inv * (sa.transpose() * pm);
    let labels = |c: char| (0..r).map(|i| format!("{c}{i}")).collect::<Vec<_>>();
    let b = WhaData::from_algebra(Some(labels('b')), first.clone(), comult_a, counit_a, Some(s_a))?;
    let a = WhaData::from_algebra(Some(labels('a')), second.clone(), comult_b, counit_b, Some(s_b))?;

    let mut report = Report::new();
    report.record("pairing: Ansatz = Fourier form", p.fourier_agreement, tol.rank().threshold(1.0));
    report.merge("A", reconstruction_axioms(&a, tol)?);
    report.merge("B", reconstruction_axioms(&b, tol)?);
    report.merge("A", verify_cstar(&a, tol)?);
    report.merge("B", verify_cstar(&b, tol)?);
    report.record("A: S²|_{A^L} = id", s2_on_counital(&a), tol.rank().threshold(a.scale()));
    report.record("B: S²|_{B^L} = id", s2_on_counital(&b), tol.rank().threshold(b.scale()));
    report.record(
        "B ≅ dual(A) via the pairing",
        duality_residual(&a, &b, &p.matrix)?,
        tol.rank().threshold(a.scale().powi(2)),
    );
    report.record(
        "ε_B(b) = tr_M(R̄*(z⊗ῑ) b (z⊗ῑ)R̄)",
        counit_formula_residual(rig, p, &b),
        tol.rank().threshold(b.scale()),
    );
    let fork = fork_report(rig, p, &a, &b, tol)?;
    report.record("fork rule ⇔ quasibasis identity ⇔ Δ multiplicative", if fork.consistent() { 0.0 } else { 1.0 }, 0.5);
    Ok(Extracted { a, b, report, fork })
}

/// `b_β ↦ ⟨b_β, ·⟩` as a map `B → A*` intertwining every structure map.
pub(crate) fn duality_residual(a: &WhaData, b: &WhaData, pairing: &Mat) -> Result<f64> {
    let dual = dual_wha(a)?;
    let n = b.dim();
    let t = pairing;
    let tb = |x: &Vector| t * x;
    let mut res: f64 = 0.0;
    for i in 0..n {
        let bi = b.basis(i);
        for j in 0..n {
            let bj = b.basis(j);
            res = res.max(max_abs_vec(&(dual.mul(&tb(&bi), &tb(&bj)) - tb(&b.mul(&bi, &bj)))));
        }
        res = res.max(max_abs(&(dual.coproduct(&tb(&bi)) - t * b.coproduct(&bi) * t.transpose())));
        res = res.max((dual.counit_of(&tb(&bi)) - b.counit_of(&bi)).norm());
        res = res.max(max_abs_vec(&(dual.apply_antipode(&tb(&bi))? - tb(&b.apply_antipode(&bi)?))));
        res = res.max(max_abs_vec(&(dual.star(&tb(&bi))? - tb(&b.star(&bi)?))));
    }
    res = res.max(max_abs_vec(&(dual.unit() - tb(b.unit()))));
    Ok(res)
}

/// Closed form of the counit of `B = End(ι∘ῑ)`.
fn counit_formula_residual(rig: &Rigidity, p: &PairingData, b: &WhaData) -> f64 {
    let s = &rig.setting;
    let cat = &s.cat;
    let zz = cat.hor(&p.z, &cat.one(&s.iota_bar), &s.iota);
    let mut res: f64 = 0.0;
    for (i, x) in p.b_basis.iter().enumerate() {
        let v = rig.tr_m(&(rig.r_bar.adjoint() * &zz * x * &zz * &rig.r_bar));
        res = res.max((v - b.counit()[i]).norm());
    }
    res
}

fn s2_on_counital(w: &WhaData) -> f64 {
    let s = match w.antipode() {
        Some(s) => s,
        None => return f64::INFINITY,
    };
    max_abs(&(s * s * w.pi_l() - w.pi_l()))
}

/// Axioms (i)–(ix) of the reconstruction for one weak Hopf algebra.
pub fn reconstruction_axioms(w: &WhaData, tol: Tolerance) -> Result<Report> {
    let n = w.dim();
    let c = w.comult();
    let s = w.require_antipode()?.clone();
    let star = w.require_star()?.clone();
    let thr = tol.rank().threshold(w.scale().powi(3));
    let deltas: Vec<Mat> = (0..n).map(|i| c.slice(i)).collect();
    let mut r = Report::new();

    let mut res: f64 = 0.0;
    for i in 0..n {
        for p in 0..n {
            for q in 0..n {
                for t in 0..n {
                    let (mut lhs, mut rhs) = (ZERO, ZERO);
                    for m in 0..n {
                        lhs += c.get(i, m, t) * c.get(m, p, q);
                        rhs += c.get(i, p, m) * c.get(m, q, t);
                    }
                    res = res.max((lhs - rhs).norm());
                }
            }
        }
    }
    r.record("(i) coassociativity", res, thr);

    let eps = w.counit();
    let mut res: f64 = 0.0;
    for (i, d) in deltas.iter().enumerate() {
        let e = w.basis(i);
        res = res.max(crate::linalg::max_abs_vec(&(d.transpose() * eps - &e)));
        res = res.max(crate::linalg::max_abs_vec(&(d * eps - e)));
    }
    r.record("(ii) counit", res, thr);

    let mut res: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = &s * w.mul(&w.basis(i), &w.basis(j));
            let rhs = w.mul(&s.column(j).into_owned(), &s.column(i).into_owned());
            res = res.max(crate::linalg::max_abs_vec(&(lhs - rhs)));
        }
    }
    r.record("(iii) S antimultiplicative", res, thr);

    let mut res: f64 = 0.0;
    for (i, d) in deltas.iter().enumerate() {
        let lhs = w.coproduct(&s.column(i).into_owned());
        let rhs = &s * d.transpose() * s.transpose();
        res = res.max(max_abs(&(lhs - rhs)));
    }
    r.record("(iv) Δ∘S = (S⊗S)∘Δ^op", res, thr);

    let conj = |m: &Mat| m.map(|z| z.conj());
    // x ↦ S(x)* is antilinear with matrix star·conj(S); applying it twice
    let t = &star * conj(&s);
    let res = max_abs(&(&t * conj(&t) - Mat::identity(n, n)));
    r.record("(v) *∘S∘*∘S = id", res, thr);

    let mut res: f64 = 0.0;
    for (i, d) in deltas.iter().enumerate() {
        let lhs = w.coproduct(&star.column(i).into_owned());
        let rhs = &star * conj(d) * star.transpose();
        res = res.max(max_abs(&(lhs - rhs)));
    }
    r.record("(vi) Δ(a*) = Δ(a)*", res, thr);

    r.record("(vii) Δ multiplicative", delta_multiplicativity(w, tol), thr);

    // (viii): a₍₁₎ ⊗ a₍₂₎S(a₍₃₎) = 1₍₁₎a ⊗ 1₍₂₎
    let one = w.delta_one();
    let prods: Vec<Vec<Vector>> =
        (0..n).map(|q| (0..n).map(|t| w.mul(&w.basis(q), &s.column(t).into_owned())).collect()).collect();
    let mut res: f64 = 0.0;
    for (i, d) in deltas.iter().enumerate() {
        let mut lhs = Mat::zeros(n, n);
        for p in 0..n {
            for m in 0..n {
                let cpm = d[(p, m)];
                if cpm == ZERO {
                    continue;
                }
                let dm = &deltas[m];
                for q in 0..n {
                    for t in 0..n {
                        let v = dm[(q, t)];
                        if v == ZERO {
                            continue;
                        }
                        let prod = &prods[q][t];
                        for k in 0..n {
                            lhs[(p, k)] += cpm * v * prod[k];
                        }
                    }
                }
            }
        }
        let ai = w.basis(i);
        let mut rhs = Mat::zeros(n, n);
        for p in 0..n {
            let pa = w.mul(&w.basis(p), &ai);
            for k in 0..n {
                for q in 0..n {
                    rhs[(q, k)] += one[(p, k)] * pa[q];
                }
            }
        }
        res = res.max(max_abs(&(lhs - rhs)));
    }
    r.record("(viii) a₍₁₎⊗a₍₂₎S(a₍₃₎) = 1₍₁₎a⊗1₍₂₎", res, thr);

    let ef = w.counit_form();
    let mut res: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = ef[(i, j)];
            let mut rhs = ZERO;
            for p in 0..n {
                for q in 0..n {
                    let o = one[(p, q)];
                    if o != ZERO {
                        rhs += o * ef[(i, q)] * ef[(p, j)];
                    }
                }
            }
            res = res.max((lhs - rhs).norm());
        }
    }
    r.record("(ix) ε(aa') = ε(a1₍₂₎)ε(1₍₁₎a')", res, thr);
    Ok(r)
}

/// `max ‖Δ(x g) − Δ(x)Δ(g)‖` over the basis `x` and a generating set `g`
/// of the algebra containing `1`; by induction on words in the generators
/// this is multiplicativity on all of `A`.
pub fn delta_multiplicativity(w: &WhaData, tol: Tolerance) -> f64 {
    let n = w.dim();
    let alg = w.algebra();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let x = Vector::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let mut gens = vec![w.unit().clone(), x.clone()];
    if let Ok(xs) = alg.star(&x) {
        gens.push(xs);
    }
    let generated = alg.generated_subalgebra(&gens[1..], tol).map(|b| b.len()).unwrap_or(0);
    if generated != n {
        gens = (0..n).map(|i| w.basis(i)).collect();
    }
    let deltas: Vec<Mat> = (0..n).map(|i| w.comult().slice(i)).collect();
    let gen_deltas: Vec<Mat> = gens.iter().map(|g| w.coproduct(g)).collect();
    let mut res: f64 = 0.0;
    for (i, di) in deltas.iter().enumerate() {
        for (g, dg) in gens.iter().zip(&gen_deltas) {
            let lhs = w.coproduct(&w.mul(&w.basis(i), g));
            res = res.max(max_abs(&(lhs - w.tensor_mul(di, dg))));
        }
    }
    res
}

/// Fork rule, the quasibasis identity and multiplicativity of both coproducts.
pub fn fork_report(rig: &Rigidity, p: &PairingData, a: &WhaData, b: &WhaData, tol: Tolerance) -> Result<ForkReport> {
    let s = &rig.setting;
    let cat = &s.cat;
    let iota = &s.iota;
    let iota_bar = &s.iota_bar;
    let ii = s.ii();
    let ji = s.ji();
    let z = &p.z;
    let zinv = z.clone().try_inverse().ok_or(Error::NotPositive { min_eigenvalue: 0.0 })?;

    // basis of B orthonormal for tr_M Ψ₁₂(x*y)
    let r = p.b_basis.len();
    let gram = Mat::from_fn(r, r, |i, j| rig.tr_m(&rig.psi12(&(p.b_basis[i].adjoint() * &p.b_basis[j]))));
    let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
    let g_inv_half = herm_apply(&gram, tol, |v| 1.0 / v.max(1e-300).sqrt())?;
    let t = Triple::new(rig, z);
    let z1_inv2 = cat.hor(&(&zinv * &zinv), &cat.one(&ji), iota);
    let mut q = Mat::zeros(ii.width(cat), ii.width(cat));
    for i in 0..r {
        let mut u = Mat::zeros(q.nrows(), q.ncols());
        for j in 0..r {
            u += &p.b_basis[j] * g_inv_half[(j, i)];
        }
        q += u.adjoint() * &z1_inv2 * &t.u23 * &u;
    }
    let one3 = cat.one(&s.iji());
    let quasibasis_residual = max_abs(&(q - &one3));

    // fork f = ῑ ⊗ (R̄*∘(z⁻¹⊗ῑ)) ⊗ ι
    let g = rig.r_bar.adjoint() * cat.hor(&zinv, &cat.one(iota_bar), iota);
    let g_iota = cat.hor(&g, &cat.one(iota), &ii);
    let f = cat.hor(&cat.one(iota_bar), &g_iota, iota_bar);
    let comult = a.comult();
    let mut fork: f64 = 0.0;
    for (be, bm) in p.a_basis.iter().enumerate() {
        let lhs = bm * &f;
        let mut dd = Mat::zeros(f.ncols(), f.ncols());
        for g1 in 0..r {
            let mut inner = Mat::zeros(p.a_basis[0].nrows(), p.a_basis[0].ncols());
            let mut any = false;
            for g2 in 0..r {
                let c = comult.get(be, g1, g2);
                if c.norm() > 1e-14 {
                    inner += &p.a_basis[g2] * c;
                    any = true;
                }
            }
            if any {
                dd += cat.hor(&p.a_basis[g1], &inner, &ji);
            }
        }
        fork = fork.max(max_abs(&(lhs - &f * dd)));
    }
    Ok(ForkReport {
        fork_residual: fork,
        quasibasis_residual,
        delta_a_residual: delta_multiplicativity(a, tol),
        delta_b_residual: delta_multiplicativity(b, tol),
        threshold: tol.rank().threshold(a.scale().max(b.scale()).powi(3)),
    })
}
