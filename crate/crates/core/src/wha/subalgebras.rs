use crate::algebra::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{columns, max_abs, null_space, vectorize, Mat, Tolerance, Vector};
use crate::report::Report;

use super::{Element, WhaData};

/// The counital subalgebras `A^L = πL(A)` and `A^R = πR(A)`.
#[derive(Debug, Clone)]
pub struct CounitalSubalgebras {
    pub left: Subspace,
    pub right: Subspace,
    /// Agreement of the three equivalent characterisations, closure and
    /// commutation checks.
    pub report: Report,
}

fn image(m: &Mat, tol: Tolerance) -> Subspace {
    Subspace::new(m.nrows(), &columns(m), tol)
}

fn kernel_subspace(stacked: &Mat, n: usize, tol: Tolerance) -> Subspace {
    Subspace::new(n, &columns(&null_space(stacked, tol.rank())), tol)
}

fn stack2(x: &Vector, y: &Vector) -> Vector {
    Vector::from_iterator(x.len() + y.len(), x.iter().chain(y.iter()).cloned())
}

fn is_unital_subalgebra(a: &WhaData, s: &Subspace) -> f64 {
    let mut worst = s.distance(a.unit());
    for x in &s.basis {
        for y in &s.basis {
            worst = worst.max(s.distance(&a.mul(x, y)));
        }
    }
    worst
}

/// Computes `A^L`, `A^R` and checks them against the alternative
/// characterisations:
/// (1) `Δ(l) = (l⊗1)Δ(1) = Δ(1)(l⊗1)`, (2) `(ε⊗id)(Δ(1)(l⊗1)) = l`,
/// (3) `l = (f⊗id)Δ(1)` for some functional `f`, and the mirrored
/// conditions for `A^R`.
pub fn counital_subalgebras(a: &WhaData, tol: Tolerance) -> CounitalSubalgebras {
    let n = a.dim();
    let left = image(a.pi_l(), tol);
    let right = image(a.pi_r(), tol);
    let d = a.delta_one();
    let eps = a.counit();
    let alg = a.algebra();

    let mut l2 = Mat::zeros(n, n);
    let mut r2 = Mat::zeros(n, n);
    let mut l1_cols = Mat::zeros(2 * n * n, n);
    let mut r1_cols = Mat::zeros(2 * n * n, n);
    for i in 0..n {
        let ci = a.comult().slice(i);
        let li = alg.basis_left(i);
        let ri = alg.right_matrix(&a.basis(i));
        // (e_i⊗1)D = L_i D, D(e_i⊗1) = R_i D, (1⊗e_i)D = D L_iᵀ, D(1⊗e_i) = D R_iᵀ
        let lt = stack2(&vectorize(&(&ci - li * &d)), &vectorize(&(&ci - &ri * &d)));
        let rt = stack2(&vectorize(&(&ci - &d * li.transpose())), &vectorize(&(&ci - &d * ri.transpose())));
        l1_cols.set_column(i, &lt);
        r1_cols.set_column(i, &rt);
        // (ε⊗id)(T) = Tᵀε, (id⊗ε)(T) = Tε
        let lx = (&ri * &d).transpose() * eps - a.basis(i);
        let rx = (&d * li.transpose()) * eps - a.basis(i);
        l2.set_column(i, &lx);
        r2.set_column(i, &rx);
    }
    let left1 = kernel_subspace(&l1_cols, n, tol);
    let right1 = kernel_subspace(&r1_cols, n, tol);
    let left2 = kernel_subspace(&l2, n, tol);
    let right2 = kernel_subspace(&r2, n, tol);
    let left3 = image(&d.transpose(), tol);
    let right3 = image(&d, tol);

    let thr = tol.rank().threshold(1.0);
    let mut report = Report::new();
    report.record("A^L characterisation (1)", left.distance_to(&left1), thr);
    report.record("A^L characterisation (2)", left.distance_to(&left2), thr);
    report.record("A^L characterisation (3)", left.distance_to(&left3), thr);
    report.record("A^R characterisation (1)", right.distance_to(&right1), thr);
    report.record("A^R characterisation (2)", right.distance_to(&right2), thr);
    report.record("A^R characterisation (3)", right.distance_to(&right3), thr);
    report.record("A^L unital subalgebra", is_unital_subalgebra(a, &left), thr);
    report.record("A^R unital subalgebra", is_unital_subalgebra(a, &right), thr);
    let mut comm: f64 = 0.0;
    for x in &left.basis {
        for y in &right.basis {
            comm = comm.max(crate::linalg::max_abs_vec(&alg.commutator(x, y)));
        }
    }
    report.record("A^L and A^R commute", comm, thr);
    // Δ(1) ∈ A^R⊗A^L
    let pr = right.matrix() * right.matrix().adjoint();
    let pl = left.matrix() * left.matrix().adjoint();
    report.record("Δ(1) in A^R⊗A^L", max_abs(&(&d - &pr * &d * pl.transpose())), thr);
    let pl2 = a.pi_l() * a.pi_l();
    let pr2 = a.pi_r() * a.pi_r();
    report.record("πL idempotent", max_abs(&(pl2 - a.pi_l())), thr);
    report.record("πR idempotent", max_abs(&(pr2 - a.pi_r())), thr);

    CounitalSubalgebras { left, right, report }
}

/// `(t(l), s(l))` for `l ∈ A^L`, with `t` the inclusion and
/// `s(l) = 1₍₁₎ε(1₍₂₎l)`.
pub fn source_target_maps(a: &WhaData, l: &Element, tol: Tolerance) -> Result<(Element, Element)> {
    let left = image(a.pi_l(), tol);
    let dist = left.distance(l);
    if dist > tol.threshold(l.norm()) {
        return Err(Error::NotInSubalgebra { distance: dist });
    }
    Ok((l.clone(), a.source_matrix() * l))
}
