use crate::algebra::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{columns, max_abs, max_abs_vec, solve_linear, AffineSolution, Mat, Tolerance, Vector, ONE, ZERO};
use crate::report::Report;

use super::WhaData;

/// Convolution `f∗g = m∘(f⊗g)∘Δ` of two linear endomaps.
pub fn convolve(a: &WhaData, f: &Mat, g: &Mat) -> Mat {
    let n = a.dim();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        let t = f * a.comult().slice(i) * g.transpose();
        out.set_column(i, &a.multiply_tensor(&t));
    }
    out
}

/// Nonzero comultiplication entries `(i, j, k, c_ijk)`.
fn comult_entries(a: &WhaData) -> Vec<(usize, usize, usize, crate::linalg::C64)> {
    a.comult().triples()
}

/// Rows expressing `σ ∗ g` linearly in the entries of `σ` (column-major,
/// index `m + j·n` for `σ_{mj}`).
fn left_factor_rows(a: &WhaData, g: &Mat, out: &mut Mat, row0: usize) {
    let n = a.dim();
    let alg = a.algebra();
    for (i, j, k, c) in comult_entries(a) {
        let gk = g.column(k).into_owned();
        for m in 0..n {
            let prod = alg.basis_left(m) * &gk;
            for r in 0..n {
                if prod[r] != ZERO {
                    out[(row0 + i * n + r, m + j * n)] += c * prod[r];
                }
            }
        }
    }
}

/// Rows expressing `f ∗ σ` linearly in the entries of `σ`.
fn right_factor_rows(a: &WhaData, f: &Mat, out: &mut Mat, row0: usize) {
    let n = a.dim();
    let alg = a.algebra();
    for (i, j, k, c) in comult_entries(a) {
        let fj = alg.left_matrix(&f.column(j).into_owned());
        for m in 0..n {
            for r in 0..n {
                let v = fj[(r, m)];
                if v != ZERO {
                    out[(row0 + i * n + r, m + k * n)] += c * v;
                }
            }
        }
    }
}

fn vec_cols(m: &Mat) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

/// Solves `σ ∗ g = target` for `σ`.
pub fn solve_left_convolution(a: &WhaData, g: &Mat, target: &Mat, tol: Tolerance) -> Result<AffineSolution> {
    let n = a.dim();
    let mut sys = Mat::zeros(n * n, n * n);
    left_factor_rows(a, g, &mut sys, 0);
    let rhs = vec_cols(target);
    solve_linear(&sys, &Mat::from_column_slice(n * n, 1, rhs.as_slice()), tol)
}

/// Finds the antipode from `id∗S = πL`, `S∗id = πR`, `S∗πL = S`, solved
/// as one linear system. Returns a copy of `a` carrying `S`.
pub fn solve_antipode(a: &WhaData, tol: Tolerance) -> Result<WhaData> {
    let n = a.dim();
    let nn = n * n;
    let id = Mat::identity(n, n);
    let mut sys = Mat::zeros(3 * nn, nn);
    right_factor_rows(a, &id, &mut sys, 0);
    left_factor_rows(a, &id, &mut sys, nn);
    left_factor_rows(a, a.pi_l(), &mut sys, 2 * nn);
    for i in 0..n {
        for r in 0..n {
            sys[(2 * nn + i * n + r, r + i * n)] -= ONE;
        }
    }
    let mut rhs = Mat::zeros(3 * nn, 1);
    for i in 0..n {
        for r in 0..n {
            rhs[(i * n + r, 0)] = a.pi_l()[(r, i)];
            rhs[(nn + i * n + r, 0)] = a.pi_r()[(r, i)];
        }
    }
    let sol = match solve_linear(&sys, &rhs, tol) {
        Ok(s) => s,
        Err(Error::InconsistentSystem { residual }) => {
            return Err(Error::NoAntipode(format!("antipode equations inconsistent (residual {residual:.3e})")))
        }
        Err(e) => return Err(e),
    };
    if !sol.is_unique() {
        return Err(Error::NonUniqueAntipode(sol.null_space.ncols()));
    }
    let mut s = Mat::from_column_slice(n, n, sol.particular.as_slice());
    for z in s.iter_mut() {
        if z.norm() < 1e-14 {
            *z = ZERO;
        }
    }
    let res = antipode_axiom_residuals(a, &s);
    let thr = tol.threshold(a.scale() * a.scale());
    if let Some(worst) = res.iter().cloned().reduce(f64::max) {
        if worst > thr.max(tol.rank().threshold(1.0)) {
            return Err(Error::NoAntipode(format!("solution violates the axioms (residual {worst:.3e})")));
        }
    }
    a.with_antipode(Some(s))
}

/// Residuals of `id∗S = πL`, `S∗id = πR` and `S∗πL = S`.
pub fn antipode_axiom_residuals(a: &WhaData, s: &Mat) -> [f64; 3] {
    let n = a.dim();
    let id = Mat::identity(n, n);
    [
        max_abs(&(convolve(a, &id, s) - a.pi_l())),
        max_abs(&(convolve(a, s, &id) - a.pi_r())),
        max_abs(&(convolve(a, s, a.pi_l()) - s)),
    ]
}

/// Checks the standard antipode properties: the three axioms, anti-
/// multiplicativity, anti-comultiplicativity, `S(1) = 1`, `ε∘S = ε`,
/// `S(A^L) = A^R`, `S(A^R) = A^L` and invertibility.
pub fn verify_antipode_properties(a: &WhaData, tol: Tolerance) -> Result<Report> {
    let s = a.require_antipode()?;
    let n = a.dim();
    let scale = a.scale();
    let thr = tol.threshold(scale * scale * scale);
    let mut r = Report::new();
    let [ax1, ax2, ax3] = antipode_axiom_residuals(a, s);
    r.record("id∗S = πL", ax1, thr);
    r.record("S∗id = πR", ax2, thr);
    r.record("S∗πL = S", ax3, thr);

    let mut anti: f64 = 0.0;
    for i in 0..n {
        let si = s.column(i).into_owned();
        for j in 0..n {
            let sj = s.column(j).into_owned();
            let lhs = s * a.mul(&a.basis(i), &a.basis(j));
            anti = anti.max(max_abs_vec(&(lhs - a.mul(&sj, &si))));
        }
    }
    r.record("S antimultiplicative", anti, thr);

    let mut anticomult: f64 = 0.0;
    for i in 0..n {
        let lhs = s * a.comult().slice(i) * s.transpose();
        let rhs = a.coproduct(&s.column(i).into_owned()).transpose();
        anticomult = anticomult.max(max_abs(&(lhs - rhs)));
    }
    r.record("S anticomultiplicative", anticomult, thr);
    r.record("S(1) = 1", max_abs_vec(&(s * a.unit() - a.unit())), thr);
    r.record("ε∘S = ε", max_abs_vec(&(s.transpose() * a.counit() - a.counit())), thr);

    let left = Subspace::new(n, &columns(a.pi_l()), tol);
    let right = Subspace::new(n, &columns(a.pi_r()), tol);
    let s_left = Subspace::new(n, &left.basis.iter().map(|x| s * x).collect::<Vec<_>>(), tol);
    let s_right = Subspace::new(n, &right.basis.iter().map(|x| s * x).collect::<Vec<_>>(), tol);
    let sub_thr = tol.rank().threshold(1.0);
    r.record("S(A^L) = A^R", s_left.distance_to(&right), sub_thr);
    r.record("S(A^R) = A^L", s_right.distance_to(&left), sub_thr);

    let sv = s.clone().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    r.flag("S invertible", smin > tol.threshold(smax));
    Ok(r)
}
