use crate::algebra::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{columns, herm_eig, max_abs, max_abs_vec, solve_linear, Mat, Tolerance, C64};
use crate::report::Report;

use super::{dual_wha, Element, Functional, WhaData};

/// Checks the C*-structure: star axioms, `Δ(a*) = Δ(a)*`,
/// `conj ε(a) = ε(a*)`, `S(S(a*)*) = a`, and positivity of the regular
/// trace form `(a, b) ↦ Tr(L_{a*b})`.
pub fn verify_cstar(a: &WhaData, tol: Tolerance) -> Result<Report> {
    let sigma = a.require_star()?;
    let n = a.dim();
    let scale = a.scale();
    let thr = tol.threshold(scale * scale);
    let mut r = Report::new();
    let [inv, anti, unit] = a.algebra().star_residuals()?;
    r.record("star involutive", inv, thr);
    r.record("star antimultiplicative", anti, thr);
    r.record("1* = 1", unit, thr);

    let mut delta: f64 = 0.0;
    for i in 0..n {
        let lhs = a.coproduct(&sigma.column(i).into_owned());
        let rhs = sigma * a.comult().slice(i).conjugate() * sigma.transpose();
        delta = delta.max(max_abs(&(lhs - rhs)));
    }
    r.record("Δ star-preserving", delta, thr);
    let eps = a.counit();
    r.record("conj ε(a) = ε(a*)", max_abs_vec(&(sigma.transpose() * eps - eps.conjugate())), thr);

    if let Some(s) = a.antipode() {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let e = a.basis(i);
            let x = a.star(&(s * a.star(&e)?))?;
            worst = worst.max(max_abs_vec(&(s * x - e)));
        }
        r.record("S(a*)* = S⁻¹(a)", worst, thr);
    }

    let t = a.algebra().regular_trace();
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        let li = a.algebra().left_matrix(&a.star(&a.basis(i))?);
        let row = li.transpose() * &t;
        for j in 0..n {
            g[(i, j)] = row[j];
        }
    }
    r.record("trace form Hermitian", max_abs(&(&g - g.adjoint())), thr);
    let ok = match herm_eig(&g, tol.rank()) {
        Ok((vals, _)) => vals.last().map(|&m| m > tol.rank().threshold(vals[0])).unwrap_or(true),
        Err(_) => false,
    };
    r.flag("trace form positive definite", ok);
    Ok(r)
}

/// The unique `h` with `ah = πL(a)h`, `ha = hπR(a)` and `πL(h) = 1 = πR(h)`.
pub fn haar_integral(a: &WhaData, tol: Tolerance) -> Result<Element> {
    let n = a.dim();
    let alg = a.algebra();
    let rows = 2 * n * n + 2 * n;
    let mut sys = Mat::zeros(rows, n);
    let mut rhs = Mat::zeros(rows, 1);
    for i in 0..n {
        let e = a.basis(i);
        let (pl, pr) = a.counital_projections(&e);
        let l = alg.basis_left(i) - alg.left_matrix(&pl);
        let r = alg.right_matrix(&e) - alg.right_matrix(&pr);
        sys.view_mut((i * n, 0), (n, n)).copy_from(&l);
        sys.view_mut((n * n + i * n, 0), (n, n)).copy_from(&r);
    }
    sys.view_mut((2 * n * n, 0), (n, n)).copy_from(a.pi_l());
    sys.view_mut((2 * n * n + n, 0), (n, n)).copy_from(a.pi_r());
    for k in 0..n {
        rhs[(2 * n * n + k, 0)] = a.unit()[k];
        rhs[(2 * n * n + n + k, 0)] = a.unit()[k];
    }
    let sol = match solve_linear(&sys, &rhs, tol) {
        Ok(s) => s,
        Err(Error::InconsistentSystem { residual }) => {
            return Err(Error::NoHaar(format!("defining equations inconsistent (residual {residual:.3e})")))
        }
        Err(e) => return Err(e),
    };
    if !sol.is_unique() {
        return Err(Error::NonUniqueHaar(sol.null_space.ncols() + 1));
    }
    let mut h = sol.particular.column(0).into_owned();
    for z in h.iter_mut() {
        if z.norm() < 1e-15 {
            *z = C64::new(0.0, 0.0);
        }
    }
    Ok(h)
}

fn image_of(m: &Mat, tol: Tolerance) -> Subspace {
    Subspace::new(m.nrows(), &columns(m), tol)
}

/// Verifies the listed properties of the Haar integral `h` of `a`.
pub fn haar_properties(a: &WhaData, h: &Element, tol: Tolerance) -> Result<Report> {
    let s = a.require_antipode()?;
    let n = a.dim();
    let alg = a.algebra();
    let hat = dual_wha(a)?;
    let thr = tol.threshold(a.scale().powi(3));
    let mut r = Report::new();
    r.record("h = h²", max_abs_vec(&(a.mul(h, h) - h)), thr);
    r.record("h = h*", max_abs_vec(&(a.star(h)? - h)), thr);
    r.record("h = S(h)", max_abs_vec(&(s * h - h)), thr);

    let hh = a.coproduct(h);
    let (mut left_inv, mut right_inv): (f64, f64) = (0.0, 0.0);
    for i in 0..n {
        let e = a.basis(i);
        let se = s * &e;
        let la = alg.basis_left(i);
        let ra = alg.right_matrix(&e);
        // h₍₁₎⊗a h₍₂₎ = S(a)h₍₁₎⊗h₍₂₎
        right_inv = right_inv.max(max_abs(&(&hh * la.transpose() - alg.left_matrix(&se) * &hh)));
        // h₍₁₎a⊗h₍₂₎ = h₍₁₎⊗h₍₂₎S(a)
        left_inv = left_inv.max(max_abs(&(&ra * &hh - &hh * alg.right_matrix(&se).transpose())));
    }
    r.record("h₍₁₎⊗ah₍₂₎ = S(a)h₍₁₎⊗h₍₂₎", right_inv, thr);
    r.record("h₍₁₎a⊗h₍₂₎ = h₍₁₎⊗h₍₂₎S(a)", left_inv, thr);

    // Sampled on dual basis triples, the invariance identities reduce to
    // the matrix identities below (⟨φψ, h⟩ = φᵀ Δ(h) ψ).
    let mut rightinv: f64 = 0.0;
    let mut leftinv: f64 = 0.0;
    for i in 0..n {
        let e = a.basis(i);
        let se = s * &e;
        for p in 0..n {
            for q in 0..n {
                let phi = hat.basis(p);
                let psi = hat.basis(q);
                let pair = |x: &Functional, y: &Functional| -> C64 { hat.mul(x, y).dot(h) };
                let l1 = pair(&phi, &super::sweedler_act(a, super::Side::Right, &e, &psi));
                let r1 = pair(&super::sweedler_act(a, super::Side::Right, &se, &phi), &psi);
                rightinv = rightinv.max((l1 - r1).norm());
                let l2 = pair(&super::sweedler_act(a, super::Side::Left, &e, &phi), &psi);
                let r2 = pair(&phi, &super::sweedler_act(a, super::Side::Left, &se, &psi));
                leftinv = leftinv.max((l2 - r2).norm());
            }
        }
    }
    r.record("right invariance", rightinv, thr);
    r.record("left invariance", leftinv, thr);

    let to_left = alg.right_matrix(h).transpose();
    let to_right = alg.left_matrix(h).transpose();
    let sub_thr = tol.rank().threshold(1.0);
    r.record("h⇀Â = Â^L", image_of(&to_left, tol).distance_to(&image_of(hat.pi_l(), tol)), sub_thr);
    r.record("Â↼h = Â^R", image_of(&to_right, tol).distance_to(&image_of(hat.pi_r(), tol)), sub_thr);
    r.record("φ ↦ h⇀φ idempotent", max_abs(&(&to_left * &to_left - &to_left)), thr);
    r.record("φ ↦ φ↼h idempotent", max_abs(&(&to_right * &to_right - &to_right)), thr);

    let mut g = Mat::zeros(n, n);
    for p in 0..n {
        let ps = hat.star(&hat.basis(p))?;
        for q in 0..n {
            g[(p, q)] = hat.mul(&ps, &hat.basis(q)).dot(h);
        }
    }
    r.record("Haar form Hermitian", max_abs(&(&g - g.adjoint())), thr);
    let ok = match herm_eig(&g, tol.rank()) {
        Ok((vals, _)) => vals.last().map(|&m| m > tol.rank().threshold(vals[0])).unwrap_or(true),
        Err(_) => false,
    };
    r.flag("Haar form positive definite", ok);
    Ok(r)
}

/// `g_L = (ĥ⇀h)^{1/2}`, `g_R = (h↼ĥ)^{1/2}`, `g = g_L g_R⁻¹` with checks.
#[derive(Debug, Clone)]
pub struct Grouplike {
    pub g_l: Element,
    pub g_r: Element,
    pub g: Element,
    pub g_inv: Element,
    pub report: Report,
}

/// Computes the canonical grouplike element and verifies its properties.
pub fn canonical_grouplike(a: &WhaData, seed: u64, tol: Tolerance) -> Result<Grouplike> {
    let s = a.require_antipode()?;
    let n = a.dim();
    let h = haar_integral(a, tol)?;
    let hat = dual_wha(a)?;
    let hat_h = haar_integral(&hat, tol)?;
    let wed = a.algebra().wedderburn(seed, tol)?;
    let lhs = super::sweedler_act_on_algebra(a, &hat_h, &h);
    let rhs = super::functional_arrow_right(a, &h, &hat_h);
    let floor = tol.rank().threshold(1.0);
    for x in [&lhs, &rhs] {
        let m = wed.min_eigenvalue(x, tol.rank())?;
        if m <= floor {
            return Err(Error::NotPositive { min_eigenvalue: m });
        }
    }
    let g_l = wed.sqrt(&lhs, tol.rank())?;
    let g_r = wed.sqrt(&rhs, tol.rank())?;
    let g_r_inv = wed.inverse(&g_r, tol)?;
    let g = a.mul(&g_l, &g_r_inv);
    let g_inv = wed.inverse(&g, tol)?;

    let thr = tol.threshold(a.scale().powi(2) * (1.0 + g.norm() * g_inv.norm()));
    let mut r = Report::new();
    let herm = max_abs_vec(&(a.star(&g)? - &g));
    r.record("g Hermitian", herm, thr);
    let gmin = wed.min_eigenvalue(&((&g + a.star(&g)?) * C64::new(0.5, 0.0)), tol.rank())?;
    r.flag("g positive invertible", gmin > floor);
    let s2 = s * s;
    let mut conj: f64 = 0.0;
    for i in 0..n {
        let e = a.basis(i);
        let lhs = a.mul(&a.mul(&g, &e), &g_inv);
        conj = conj.max(max_abs_vec(&(lhs - &s2 * &e)));
    }
    r.record("g a g⁻¹ = S²(a)", conj, thr);
    let tg = wed.block_traces(&g);
    let tgi = wed.block_traces(&g_inv);
    let trace_gap = tg.iter().zip(&tgi).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    r.record("tr_r g = tr_r g⁻¹", trace_gap, thr);
    let dg = a.coproduct(&g);
    let gg = &g * g.transpose();
    let d1 = a.delta_one();
    r.record("Δ(g) = (g⊗g)Δ(1)", max_abs(&(&dg - a.tensor_mul(&gg, &d1))), thr);
    r.record("Δ(g) = Δ(1)(g⊗g)", max_abs(&(&dg - a.tensor_mul(&d1, &gg))), thr);
    if !r.ok("g positive invertible") {
        return Err(Error::NotPositive { min_eigenvalue: gmin });
    }
    Ok(Grouplike { g_l, g_r, g, g_inv, report: r })
}

/// `max |⟨ĥ, ab⟩ − ⟨ĥ, b k a k⁻¹⟩|` over basis pairs.
pub fn modular_residual(a: &WhaData, hat_h: &Functional, k: &Element, k_inv: &Element) -> f64 {
    let n = a.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let ai = a.basis(i);
        let kak = a.mul(&a.mul(k, &ai), k_inv);
        for j in 0..n {
            let b = a.basis(j);
            let lhs = hat_h.dot(&a.mul(&ai, &b));
            let rhs = hat_h.dot(&a.mul(&b, &kak));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// Modular identity of the dual Haar state and the weak Kac criterion.
#[derive(Debug, Clone)]
pub struct KacReport {
    pub report: Report,
    /// `S² = id`.
    pub is_weak_kac: bool,
    /// `⟨ĥ, ab⟩ = ⟨ĥ, ba⟩`.
    pub hat_h_tracial: bool,
}

impl KacReport {
    /// Weak Kac and traciality agree.
    pub fn consistent(&self) -> bool {
        self.is_weak_kac == self.hat_h_tracial
    }
}

pub fn modular_and_kac_check(a: &WhaData, seed: u64, tol: Tolerance) -> Result<KacReport> {
    let s = a.require_antipode()?;
    let n = a.dim();
    let gl = canonical_grouplike(a, seed, tol)?;
    let hat_h = haar_integral(&dual_wha(a)?, tol)?;
    let wed = a.algebra().wedderburn(seed, tol)?;
    let k = a.mul(&gl.g_l, &gl.g_r);
    let k_inv = wed.inverse(&k, tol)?;
    let thr = tol.rank().threshold(a.scale().powi(2));
    let mut r = Report::new();
    r.record("modular identity", modular_residual(a, &hat_h, &k, &k_inv), thr);
    let s2 = max_abs(&(s * s - Mat::identity(n, n)));
    let one = a.unit().clone();
    let trace = modular_residual(a, &hat_h, &one, &one);
    let is_weak_kac = s2 <= tol.threshold(a.scale());
    let hat_h_tracial = trace <= thr;
    r.record("S² = id", s2, tol.threshold(a.scale()));
    r.record("ĥ tracial", trace, thr);
    r.flag("weak Kac ⇔ ĥ tracial", is_weak_kac == hat_h_tracial);
    Ok(KacReport { report: r, is_weak_kac, hat_h_tracial })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{kp2, kz2};
    use super::*;
    use crate::algebra::DEFAULT_SEED;
    use crate::linalg::{re, Vector};

    #[test]
    fn cstar_checks() {
        let t = Tolerance::default();
        assert!(verify_cstar(&kp2(), t).unwrap().passed());
        assert!(verify_cstar(&kz2(), t).unwrap().passed());
        let bad = kp2().with_star(Some(Mat::identity(4, 4))).unwrap();
        let r = verify_cstar(&bad, t).unwrap();
        assert!(!r.ok("Δ star-preserving") || !r.ok("star antimultiplicative"));
    }

    #[test]
    fn haar_of_fixtures() {
        let t = Tolerance::default();
        let h = haar_integral(&kz2(), t).unwrap();
        assert!((h - Vector::from_vec(vec![re(0.5), re(0.5)])).norm() < 1e-12);
        let a = kp2();
        let h = haar_integral(&a, t).unwrap();
        assert!((&h - Vector::from_element(4, re(0.5))).norm() < 1e-12);
        let r = haar_properties(&a, &h, t).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn grouplike_of_fixtures() {
        let t = Tolerance::default();
        let z = canonical_grouplike(&kz2(), DEFAULT_SEED, t).unwrap();
        assert!(z.report.passed(), "{}", z.report);
        assert!((z.g_l - Vector::from_vec(vec![re(0.5f64.sqrt()), re(0.0)])).norm() < 1e-10);
        assert!((z.g - kz2().unit()).norm() < 1e-10);
        let a = kp2();
        let p = canonical_grouplike(&a, DEFAULT_SEED, t).unwrap();
        assert!((p.g - a.unit()).norm() < 1e-10);
        let k = modular_and_kac_check(&a, DEFAULT_SEED, t).unwrap();
        assert!(k.report.passed() && k.is_weak_kac && k.consistent());
    }
}
