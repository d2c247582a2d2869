//! Unital inclusions `N ⊂ M` with a conditional expectation and a quasibasis.

use crate::actions::{invariant_subalgebra, ActionData};
use crate::algebra::{FdAlgebra, DEFAULT_SEED};
use crate::linalg::{herm_apply, herm_eig, psd_sqrt, rank, Mat, Tolerance, Vector, C64};
use crate::report::Report;
use crate::wha::haar_integral;
use crate::{Error, Result};

/// `N ⊂ M` with `E: M → N` and a quasibasis `{u_i}`:
/// `Σ u_i E(u_i* m) = m = Σ E(m u_i) u_i*`.
#[derive(Debug, Clone)]
pub struct InclusionData {
    pub m: FdAlgebra,
    /// `N` on an orthonormal basis.
    pub n: FdAlgebra,
    /// Columns are the basis of `N` in the coordinates of `M`.
    pub embedding: Mat,
    /// `E` as a map `M → M` with range `N`.
    pub expectation: Mat,
    pub quasibasis: Vec<Vector>,
    /// Faithful trace on `N` (weight 1 on minimal projections).
    n_trace: Vector,
}

impl InclusionData {
    /// Validates the subalgebra and the expectation; a missing quasibasis is
    /// built from the frame operator.
    pub fn new(
        m: FdAlgebra,
        n_spanning: &[Vector],
        expectation: Mat,
        quasibasis: Option<Vec<Vector>>,
        tol: Tolerance,
    ) -> Result<Self> {
        if !m.has_star() {
            return Err(Error::MissingStar);
        }
        let d = m.dim();
        if expectation.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "expectation has shape {:?} for an algebra of dimension {d}",
                expectation.shape()
            )));
        }
        if n_spanning.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch("subalgebra vectors have the wrong length".into()));
        }
        let (n, embedding) = m.subalgebra(n_spanning, tol)?;
        let wed = n.wedderburn(DEFAULT_SEED, tol)?;
        let n_trace =
            Vector::from_iterator(n.dim(), (0..n.dim()).map(|i| wed.block_traces(&n.basis(i)).iter().sum::<C64>()));
        let mut inc = InclusionData { m, n, embedding, expectation, quasibasis: Vec::new(), n_trace };
        let r = inc.check_expectation(tol)?;
        if let Some(c) = r.first_failure() {
            return Err(Error::InvalidInput(format!(
                "conditional expectation: {} (residual {:.3e})",
                c.name, c.residual
            )));
        }
        inc.quasibasis = match quasibasis {
            Some(q) => {
                if q.iter().any(|v| v.len() != d) {
                    return Err(Error::DimensionMismatch("quasibasis vectors have the wrong length".into()));
                }
                let res = inc.quasibasis_residual(&q);
                if !tol.rank().accepts(res, 1.0) {
                    return Err(Error::NoFiniteIndex(format!("supplied quasibasis fails (residual {res:.3e})")));
                }
                q
            }
            None => frame_quasibasis(&inc, tol)?,
        };
        Ok(inc)
    }

    pub fn expect(&self, x: &Vector) -> Vector {
        &self.expectation * x
    }

    /// Coordinates in `N` of an element of `N`.
    pub fn to_n(&self, x: &Vector) -> Vector {
        self.embedding.adjoint() * x
    }

    pub fn from_n(&self, y: &Vector) -> Vector {
        &self.embedding * y
    }

    pub fn n_basis(&self) -> Vec<Vector> {
        (0..self.n.dim()).map(|i| self.embedding.column(i).into_owned()).collect()
    }

    /// The faithful state-like functional `φ = τ_N ∘ E` on `M`.
    pub fn phi(&self, x: &Vector) -> C64 {
        self.n_trace.dot(&self.to_n(&self.expect(x)))
    }

    /// Gram matrix `φ(e_i* e_j)` of the basis of `M`.
    pub fn gram(&self) -> Result<Mat> {
        let d = self.m.dim();
        let stars: Vec<Vector> = (0..d).map(|i| self.m.star(&self.m.basis(i))).collect::<Result<_>>()?;
        Ok(Mat::from_fn(d, d, |i, j| self.phi(&self.m.mul(&stars[i], &self.m.basis(j)))))
    }

    /// Watatani index `Σ u_i u_i*`.
    pub fn index(&self) -> Result<Vector> {
        let mut s = Vector::zeros(self.m.dim());
        for u in &self.quasibasis {
            s += self.m.mul(u, &self.m.star(u)?);
        }
        Ok(s)
    }

    /// `max_m ‖Σ u E(u* m) − m‖` and the mirrored identity over the basis.
    pub fn quasibasis_residual(&self, q: &[Vector]) -> f64 {
        let m = &self.m;
        let mut worst: f64 = 0.0;
        for i in 0..m.dim() {
            let x = m.basis(i);
            let mut l = -x.clone();
            let mut r = -x.clone();
            for u in q {
                let us = match m.star(u) {
                    Ok(v) => v,
                    Err(_) => return f64::INFINITY,
                };
                l += m.mul(u, &self.expect(&m.mul(&us, &x)));
                r += m.mul(&self.expect(&m.mul(&x, u)), &us);
            }
            worst = worst.max(l.norm()).max(r.norm());
        }
        worst
    }

    fn check_expectation(&self, tol: Tolerance) -> Result<Report> {
        let m = &self.m;
        let e = &self.expectation;
        let p_n = &self.embedding * self.embedding.adjoint();
        let scale = 1.0 + e.norm();
        let thr = tol.rank().threshold(scale);
        let mut r = Report::new();
        r.record("1 ∈ N", (&p_n * m.unit() - m.unit()).norm(), thr);
        r.record("E idempotent", (e * e - e).norm(), thr);
        let d = m.dim();
        let id = Mat::identity(d, d);
        r.record("E maps into N", ((&id - &p_n) * e).norm(), thr);
        r.record("E fixes N", ((e - &id) * &p_n).norm(), thr);
        let nb = self.n_basis();
        let mut bimod: f64 = 0.0;
        for a in &nb {
            for b in &nb {
                for i in 0..d {
                    let x = m.basis(i);
                    let lhs = self.expect(&m.mul3(a, &x, b));
                    let rhs = m.mul3(a, &self.expect(&x), b);
                    bimod = bimod.max((lhs - rhs).norm());
                }
            }
        }
        r.record("E N-bimodular", bimod, thr);
        let mut neg: f64 = 0.0;
        let wed = self.n.wedderburn(DEFAULT_SEED, tol)?;
        for i in 0..d {
            let x = m.basis(i);
            let y = self.to_n(&self.expect(&m.mul(&m.star(&x)?, &x)));
            neg = neg.max(-wed.min_eigenvalue(&((&y + self.n.star(&y)?) * crate::linalg::re(0.5)), tol)?);
        }
        r.record("E(x*x) ≥ 0 on the basis", neg.max(0.0), thr);
        let g = self.gram()?;
        let herm = (&g - g.adjoint()).norm();
        let gh = (&g + g.adjoint()) * crate::linalg::re(0.5);
        let (vals, _) = herm_eig(&gh, tol)?;
        let min = vals.last().copied().unwrap_or(0.0);
        r.record("τ_N∘E faithful", if min > thr { herm } else { 1.0 + min.abs() }, thr);
        Ok(r)
    }

    pub fn check(&self, tol: Tolerance) -> Result<Report> {
        let mut r = self.check_expectation(tol)?;
        r.record(
            "quasibasis Σ u E(u* m) = m = Σ E(m u) u*",
            self.quasibasis_residual(&self.quasibasis),
            tol.rank().threshold(1.0),
        );
        Ok(r)
    }
}

/// `Θ^{-1/2} x_j` for a generating family `{x_j}` of `M_N`, where
/// `Θ = Σ θ_{x_j, x_j}` is the frame operator.
pub fn frame_quasibasis(inc: &InclusionData, tol: Tolerance) -> Result<Vec<Vector>> {
    let m = &inc.m;
    let d = m.dim();
    let nb = inc.n_basis();
    // greedy generating set of M as a right N-module
    let mut gens: Vec<Vector> = Vec::new();
    let mut spanned: Vec<Vector> = Vec::new();
    let mut candidates = vec![m.unit().clone()];
    candidates.extend((0..d).map(|i| m.basis(i)));
    for x in candidates {
        let mut trial = spanned.clone();
        trial.extend(nb.iter().map(|n| m.mul(&x, n)));
        let mat = Mat::from_columns(&trial);
        if rank(&mat, tol.rank()) > rank_of(&spanned, tol) {
            spanned = trial;
            gens.push(x);
        }
        if rank_of(&spanned, tol) == d {
            break;
        }
    }
    if rank_of(&spanned, tol) < d {
        return Err(Error::NoFiniteIndex("M is not generated as a right N-module".into()));
    }
    let mut theta = Mat::zeros(d, d);
    for x in &gens {
        theta += m.left_matrix(x) * &inc.expectation * m.left_matrix(&m.star(x)?);
    }
    let g = inc.gram()?;
    let g = (&g + g.adjoint()) * crate::linalg::re(0.5);
    let g_half = psd_sqrt(&g, tol)?;
    let g_inv_half = herm_apply(&g, tol, |v| 1.0 / v.max(1e-300).sqrt())?;
    let h = &g_half * &theta * &g_inv_half;
    let h = (&h + h.adjoint()) * crate::linalg::re(0.5);
    let (vals, _) = herm_eig(&h, tol)?;
    let (max, min) = (vals[0], *vals.last().unwrap());
    if min <= tol.rank().threshold(max) {
        return Err(Error::NoFiniteIndex(format!("frame operator is singular (smallest eigenvalue {min:.3e})")));
    }
    let h_inv_half = herm_apply(&h, tol, |v| 1.0 / v.sqrt())?;
    let t = &g_inv_half * h_inv_half * &g_half;
    let q: Vec<Vector> = gens.iter().map(|x| &t * x).collect();
    let res = inc.quasibasis_residual(&q);
    if !tol.rank().accepts(res, 1.0) {
        return Err(Error::NoFiniteIndex(format!("frame quasibasis fails (residual {res:.3e})")));
    }
    Ok(q)
}

fn rank_of(vs: &[Vector], tol: Tolerance) -> usize {
    if vs.is_empty() {
        0
    } else {
        rank(&Mat::from_columns(vs), tol.rank())
    }
}

/// Multiplicities `Λ[ν][μ]` of the simple summand `ν` of `N` in the simple
/// summand `μ` of `M`.
pub fn inclusion_matrix(m: &FdAlgebra, n: &FdAlgebra, embedding: &Mat, tol: Tolerance) -> Result<Vec<Vec<usize>>> {
    let wm = m.wedderburn(DEFAULT_SEED, tol)?;
    let wn = n.wedderburn(DEFAULT_SEED, tol)?;
    Ok(wn
        .blocks
        .iter()
        .map(|b| {
            let q = embedding * b.unit(0, 0);
            wm.block_traces(&q).iter().map(|t| t.re.round().max(0.0) as usize).collect()
        })
        .collect())
}

/// Weights on the minimal projections of `M` of the Markov trace: the
/// Perron eigenvector of `ΛᵀΛ`. `None` when the inclusion graph is
/// disconnected.
pub fn markov_weights(lambda: &[Vec<usize>], tol: Tolerance) -> Result<Option<Vec<f64>>> {
    let nn = lambda.len();
    let nm = lambda.first().map(|r| r.len()).unwrap_or(0);
    if nn == 0 || nm == 0 {
        return Ok(None);
    }
    // connectivity of the bipartite graph
    let mut seen_m = vec![false; nm];
    let mut seen_n = vec![false; nn];
    let mut stack = vec![(true, 0usize)];
    seen_m[0] = true;
    while let Some((is_m, i)) = stack.pop() {
        if is_m {
            for (nu, row) in lambda.iter().enumerate() {
                if row[i] > 0 && !seen_n[nu] {
                    seen_n[nu] = true;
                    stack.push((false, nu));
                }
            }
        } else {
            for mu in 0..nm {
                if lambda[i][mu] > 0 && !seen_m[mu] {
                    seen_m[mu] = true;
                    stack.push((true, mu));
                }
            }
        }
    }
    if seen_m.iter().chain(&seen_n).any(|s| !s) {
        return Ok(None);
    }
    let l = Mat::from_fn(nn, nm, |i, j| C64::new(lambda[i][j] as f64, 0.0));
    let (_, vecs) = herm_eig(&(l.transpose() * &l), tol)?;
    let v = vecs.column(0);
    let sign = if v.iter().map(|z| z.re).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let w: Vec<f64> = v.iter().map(|z| sign * z.re).collect();
    if w.iter().any(|&x| x <= 0.0) {
        return Ok(None);
    }
    Ok(Some(w))
}

/// The trace-preserving expectation for the Markov trace when the
/// inclusion is connected, otherwise for the trace with weight 1 on every
/// minimal projection; `weights` overrides both.
pub fn find_expectation(
    m: &FdAlgebra,
    n_spanning: &[Vector],
    weights: Option<&[f64]>,
    tol: Tolerance,
) -> Result<InclusionData> {
    if !m.has_star() {
        return Err(Error::MissingStar);
    }
    let (n, emb) = m.subalgebra(n_spanning, tol)?;
    let wm = m.wedderburn(DEFAULT_SEED, tol)?;
    let w: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != wm.block_count() || w.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidInput(format!("expected {} positive trace weights", wm.block_count())));
            }
            w.to_vec()
        }
        None => {
            let lambda = inclusion_matrix(m, &n, &emb, tol)?;
            markov_weights(&lambda, tol)?.unwrap_or_else(|| vec![1.0; wm.block_count()])
        }
    };
    let d = m.dim();
    let tau = |x: &Vector| -> C64 { wm.block_traces(x).iter().zip(&w).map(|(t, wt)| t * *wt).sum() };
    let stars: Vec<Vector> = (0..d).map(|i| m.star(&m.basis(i))).collect::<Result<_>>()?;
    let g = Mat::from_fn(d, d, |i, j| tau(&m.mul(&stars[i], &m.basis(j))));
    let small = emb.adjoint() * &g * &emb;
    let inv = small.try_inverse().ok_or_else(|| Error::NoFiniteIndex("trace is degenerate on N".into()))?;
    let e = &emb * inv * emb.adjoint() * &g;
    InclusionData::new(m.clone(), &crate::linalg::columns(&emb), e, None, tol)
}

/// `M^A ⊂ M` for an action, with `E = h ▷ (·)` for the Haar integral `h`.
pub fn inclusion_from_action(x: &ActionData, tol: Tolerance) -> Result<InclusionData> {
    let inv = invariant_subalgebra(x, tol)?;
    let h = haar_integral(&x.wha, tol)?;
    let e = x.apply(&h);
    InclusionData::new(x.algebra.clone(), &inv.basis, e, None, tol)
}

/// `diag(ℂⁿ) ⊂ M_n` with the trace-preserving expectation.
pub fn diagonal_in_matrix(n: usize, tol: Tolerance) -> Result<InclusionData> {
    let m = FdAlgebra::matrix_algebra(n);
    let diag: Vec<Vector> = (0..n).map(|i| crate::linalg::unit_vector(n * n, i * n + i)).collect();
    find_expectation(&m, &diag, None, tol)
}

/// `ℂ1 ⊂ M` with the trace-preserving expectation.
pub fn scalars_in(m: &FdAlgebra, tol: Tolerance) -> Result<InclusionData> {
    find_expectation(m, &[m.unit().clone()], None, tol)
}

/// `ℂH ⊂ ℂG` for a group algebra on its group-element basis; `elems` are the
/// basis indices of `H`, and `E` drops the coefficients outside `H`.
pub fn subgroup_inclusion(group_algebra: &FdAlgebra, elems: &[usize], tol: Tolerance) -> Result<InclusionData> {
    let d = group_algebra.dim();
    if elems.iter().any(|&i| i >= d) {
        return Err(Error::InvalidInput("subgroup element out of range".into()));
    }
    let mut e = Mat::zeros(d, d);
    for &i in elems {
        e[(i, i)] = C64::new(1.0, 0.0);
    }
    let span: Vec<Vector> = elems.iter().map(|&i| group_algebra.basis(i)).collect();
    InclusionData::new(group_algebra.clone(), &span, e, None, tol)
}
