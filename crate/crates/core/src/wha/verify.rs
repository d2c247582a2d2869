use crate::linalg::{max_abs, Mat, Tolerance};
use crate::report::Report;

use super::WhaData;

/// Weak bialgebra axiom residuals plus the two bialgebra degeneration flags.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub report: Report,
    /// `Δ(1) = 1⊗1`.
    pub unital_coproduct: bool,
    /// `ε(ab) = ε(a)ε(b)`.
    pub multiplicative_counit: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    /// Either degeneration condition turns a weak bialgebra into a bialgebra.
    pub fn is_bialgebra(&self) -> bool {
        self.passed() && (self.unital_coproduct || self.multiplicative_counit)
    }
}

/// Checks axioms 1a–3c over all basis elements.
pub fn verify_weak_bialgebra(a: &WhaData, tol: Tolerance) -> VerificationReport {
    let n = a.dim();
    let alg = a.algebra();
    let c = a.comult();
    let scale = a.scale();
    let thr = tol.threshold(scale * scale * scale);
    let mut r = Report::new();

    r.record("1a associativity", alg.associativity_residual(), thr);
    r.record("1b unit", alg.unit_residual(), thr);

    // 2a: (Δ⊗id)Δ = (id⊗Δ)Δ
    let mut coassoc: f64 = 0.0;
    for i in 0..n {
        for p in 0..n {
            for q in 0..n {
                for s in 0..n {
                    let mut lhs = crate::linalg::ZERO;
                    let mut rhs = crate::linalg::ZERO;
                    for m in 0..n {
                        lhs += c.get(i, m, s) * c.get(m, p, q);
                        rhs += c.get(i, p, m) * c.get(m, q, s);
                    }
                    coassoc = coassoc.max((lhs - rhs).norm());
                }
            }
        }
    }
    r.record("2a coassociativity", coassoc, thr);

    // 2b: (ε⊗id)Δ = id = (id⊗ε)Δ
    let eps = a.counit();
    let mut counit: f64 = 0.0;
    for i in 0..n {
        let ci = c.slice(i);
        let left = ci.transpose() * eps;
        let right = &ci * eps;
        let e = a.basis(i);
        counit = counit.max(crate::linalg::max_abs_vec(&(left - &e))).max(crate::linalg::max_abs_vec(&(right - e)));
    }
    r.record("2b counit", counit, thr);

    // 3a: Δ(e_i e_j) = Δ(e_i)Δ(e_j)
    let deltas: Vec<Mat> = (0..n).map(|i| c.slice(i)).collect();
    let mut multiplicative: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let prod = a.mul(&a.basis(i), &a.basis(j));
            let lhs = a.coproduct(&prod);
            let rhs = a.tensor_mul(&deltas[i], &deltas[j]);
            multiplicative = multiplicative.max(max_abs(&(lhs - rhs)));
        }
    }
    r.record("3a multiplicative coproduct", multiplicative, thr);

    // 3b: ε(ab₍₁₎)ε(b₍₂₎c) = ε(abc) = ε(ab₍₂₎)ε(b₍₁₎c)
    let e = a.counit_form();
    let (mut w1, mut w2): (f64, f64) = (0.0, 0.0);
    for b in 0..n {
        // ε(e_a e_b e_c) = Σ_k mult[a][b][k] E_kc
        let mut abc = Mat::zeros(n, n);
        for aa in 0..n {
            for k in 0..n {
                let m = a.mult().get(aa, b, k);
                if m != crate::linalg::ZERO {
                    for cc in 0..n {
                        abc[(aa, cc)] += m * e[(k, cc)];
                    }
                }
            }
        }
        let first = &e * &deltas[b] * &e;
        let second = &e * deltas[b].transpose() * &e;
        w1 = w1.max(max_abs(&(first - &abc)));
        w2 = w2.max(max_abs(&(second - abc)));
    }
    r.record("3b weakly multiplicative counit (i)", w1, thr);
    r.record("3b weakly multiplicative counit (ii)", w2, thr);

    // 3c: (Δ(1)⊗1)(1⊗Δ(1)) = (Δ⊗id)Δ(1) = (1⊗Δ(1))(Δ(1)⊗1)
    let d = a.delta_one();
    let (mut u1, mut u2): (f64, f64) = (0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mut mid = crate::linalg::ZERO;
                for j in 0..n {
                    mid += d[(j, z)] * c.get(j, x, y);
                }
                let mut first = crate::linalg::ZERO;
                let mut second = crate::linalg::ZERO;
                for b in 0..n {
                    let dxb = d[(x, b)];
                    if dxb == crate::linalg::ZERO {
                        continue;
                    }
                    for cc in 0..n {
                        let dcz = d[(cc, z)];
                        if dcz == crate::linalg::ZERO {
                            continue;
                        }
                        first += dxb * dcz * a.mult().get(b, cc, y);
                        second += dxb * dcz * a.mult().get(cc, b, y);
                    }
                }
                u1 = u1.max((first - mid).norm());
                u2 = u2.max((second - mid).norm());
            }
        }
    }
    r.record("3c weakly comultiplicative unit (i)", u1, thr);
    r.record("3c weakly comultiplicative unit (ii)", u2, thr);

    let one = a.unit();
    let one_one = one * one.transpose();
    let unital_coproduct = max_abs(&(&d - one_one)) <= thr;
    let eps_outer = eps * eps.transpose();
    let multiplicative_counit = max_abs(&(e - eps_outer)) <= thr;

    VerificationReport { report: r, unital_coproduct, multiplicative_counit }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{kp2, kz2};
    use super::*;
    use crate::linalg::{Vector, ONE, ZERO};

    #[test]
    fn kp2_is_weak_not_bialgebra() {
        let r = verify_weak_bialgebra(&kp2(), Tolerance::default());
        assert!(r.passed(), "{}", r.report);
        assert!(!r.unital_coproduct);
        assert!(!r.is_bialgebra());
    }

    #[test]
    fn kz2_is_bialgebra() {
        let r = verify_weak_bialgebra(&kz2(), Tolerance::default());
        assert!(r.passed());
        assert!(r.unital_coproduct && r.multiplicative_counit);
    }

    #[test]
    fn corrupted_counit_breaks_counit_law() {
        let a = kp2().with_counit(Vector::from_vec(vec![ONE, ZERO, ONE, ONE])).unwrap();
        let r = verify_weak_bialgebra(&a, Tolerance::default());
        let c = r.report.get("2b counit").unwrap();
        assert!(!c.passed);
        assert!((c.residual - 1.0).abs() < 1e-12);
    }
}
