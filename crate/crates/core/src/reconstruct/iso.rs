//! Isomorphism search between small weak Hopf algebras.

use crate::algebra::DEFAULT_SEED;
use crate::linalg::{max_abs, max_abs_vec, Mat, Tolerance, Vector};
use crate::wha::{dual_wha, WhaData};
use crate::{Error, Result};

/// Largest deviation of `f: A → B` from a *-WHA morphism.
pub fn morphism_residual(a: &WhaData, b: &WhaData, f: &Mat) -> Result<f64> {
    let n = a.dim();
    if f.shape() != (b.dim(), n) {
        return Err(Error::DimensionMismatch(format!("map has shape {:?}", f.shape())));
    }
    let mut res = max_abs_vec(&(f * a.unit() - b.unit()));
    for i in 0..n {
        let x = a.basis(i);
        let fx = f * &x;
        for j in 0..n {
            let y = a.basis(j);
            res = res.max(max_abs_vec(&(b.mul(&fx, &(f * &y)) - f * a.mul(&x, &y))));
        }
        res = res.max(max_abs(&(b.coproduct(&fx) - f * a.coproduct(&x) * f.transpose())));
        res = res.max((b.counit_of(&fx) - a.counit_of(&x)).norm());
        res = res.max(max_abs_vec(&(b.apply_antipode(&fx)? - f * a.apply_antipode(&x)?)));
        if a.star_matrix().is_some() && b.star_matrix().is_some() {
            res = res.max(max_abs_vec(&(b.star(&fx)? - f * a.star(&x)?)));
        }
    }
    Ok(res)
}

/// Minimal idempotents of a commutative C*-algebra as columns, and the
/// structure maps in that basis.
struct IdempotentForm {
    basis: Mat,
    /// `Δ(p_i)` coefficients on `p_j ⊗ p_k`.
    delta: Vec<Mat>,
    counit: Vector,
    /// `S(p_i) = p_{antipode[i]}`.
    antipode: Vec<usize>,
}

fn idempotent_form(w: &WhaData, tol: Tolerance) -> Result<IdempotentForm> {
    let n = w.dim();
    let wed = w.algebra().wedderburn(DEFAULT_SEED, tol)?;
    if wed.sizes().iter().any(|&s| s != 1) {
        return Err(Error::Unsupported("algebra is not commutative".into()));
    }
    let cols: Vec<Vector> = wed.central_projections();
    let basis = Mat::from_columns(&cols);
    let inv = basis.clone().try_inverse().ok_or_else(|| Error::InvalidInput("idempotents are not a basis".into()))?;
    let delta: Vec<Mat> = cols.iter().map(|p| &inv * w.coproduct(p) * inv.transpose()).collect();
    let counit = basis.transpose() * w.counit();
    let s = w.require_antipode()?;
    let mut antipode = Vec::with_capacity(n);
    for p in &cols {
        let c = &inv * (s * p);
        let k = (0..n)
            .find(|&k| (c[k] - crate::linalg::ONE).norm() < 1e-6)
            .ok_or_else(|| Error::InvalidInput("antipode does not permute the minimal idempotents".into()))?;
        antipode.push(k);
    }
    Ok(IdempotentForm { basis, delta, counit, antipode })
}

fn close(x: crate::linalg::C64, y: crate::linalg::C64, eps: f64) -> bool {
    (x - y).norm() <= eps
}

fn extend(a: &IdempotentForm, b: &IdempotentForm, sigma: &mut Vec<usize>, used: &mut [bool], eps: f64) -> bool {
    let n = used.len();
    let i = sigma.len();
    if i == n {
        return true;
    }
    for t in 0..n {
        if used[t] || !close(a.counit[i], b.counit[t], eps) {
            continue;
        }
        sigma.push(t);
        used[t] = true;
        let ok = consistent(a, b, sigma, eps);
        if ok && extend(a, b, sigma, used, eps) {
            return true;
        }
        sigma.pop();
        used[t] = false;
    }
    false
}

/// Every structure coefficient among assigned idempotents matches.
fn consistent(a: &IdempotentForm, b: &IdempotentForm, sigma: &[usize], eps: f64) -> bool {
    let i = sigma.len() - 1;
    let assigned = |k: usize| k < sigma.len();
    if assigned(a.antipode[i]) && sigma[a.antipode[i]] != b.antipode[sigma[i]] {
        return false;
    }
    for p in 0..sigma.len() {
        if a.antipode[p] == i && b.antipode[sigma[p]] != sigma[i] {
            return false;
        }
        for q in 0..sigma.len() {
            for r in 0..sigma.len() {
                if p != i && q != i && r != i {
                    continue;
                }
                if !close(a.delta[p][(q, r)], b.delta[sigma[p]][(sigma[q], sigma[r])], eps) {
                    return false;
                }
            }
        }
    }
    true
}

fn commutative_iso(a: &WhaData, b: &WhaData, tol: Tolerance) -> Result<Option<Mat>> {
    let fa = idempotent_form(a, tol)?;
    let fb = idempotent_form(b, tol)?;
    let n = a.dim();
    let eps = tol.rank().threshold(a.scale().max(b.scale()));
    let mut sigma = Vec::with_capacity(n);
    let mut used = vec![false; n];
    if !extend(&fa, &fb, &mut sigma, &mut used, eps) {
        return Ok(None);
    }
    // p_i ↦ p'_{σ(i)}
    let mut perm = Mat::zeros(n, n);
    for (i, &t) in sigma.iter().enumerate() {
        perm[(t, i)] = crate::linalg::ONE;
    }
    let inv = fa.basis.clone().try_inverse().ok_or_else(|| Error::InvalidInput("singular idempotent basis".into()))?;
    Ok(Some(&fb.basis * perm * inv))
}

/// A *-WHA isomorphism `A → B` as a matrix, `None` if there is none.
/// Decided exactly when `A` or its dual is commutative.
pub fn find_isomorphism(a: &WhaData, b: &WhaData, tol: Tolerance) -> Result<Option<Mat>> {
    if a.dim() != b.dim() {
        return Ok(None);
    }
    let f = if a.algebra().is_commutative(tol) {
        if !b.algebra().is_commutative(tol) {
            return Ok(None);
        }
        commutative_iso(a, b, tol)?
    } else {
        let (da, db) = (dual_wha(a)?, dual_wha(b)?);
        if !da.algebra().is_commutative(tol) {
            return Err(Error::Unsupported("neither the algebra nor its dual is commutative".into()));
        }
        if !db.algebra().is_commutative(tol) {
            return Ok(None);
        }
        // g: A* → B* gives f = (g⁻¹)ᵀ
        match commutative_iso(&da, &db, tol)? {
            Some(g) => {
                Some(g.try_inverse().ok_or_else(|| Error::InvalidInput("singular dual map".into()))?.transpose())
            }
            None => None,
        }
    };
    match f {
        Some(f) if tol.rank().accepts(morphism_residual(a, b, &f)?, a.scale().max(b.scale()).powi(2)) => Ok(Some(f)),
        Some(_) => Ok(None),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::fixtures;

    #[test]
    fn fixtures_are_isomorphic_to_themselves() {
        let tol = Tolerance::default();
        for (name, a) in fixtures::all() {
            let f = find_isomorphism(&a, &a, tol).unwrap();
            assert!(f.is_some(), "{name}");
        }
    }

    #[test]
    fn distinct_fixtures_are_not_isomorphic() {
        let tol = Tolerance::default();
        let d = dual_wha(&fixtures::kp2()).unwrap();
        assert!(find_isomorphism(&fixtures::kz2_kz2(), &d, tol).unwrap().is_none());
    }
}
