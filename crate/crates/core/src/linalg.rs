//! Dense complex linear algebra with explicit tolerance control.
//!
//! Everything here is double precision complex. Approximate comparisons are
//! relative to the largest operand norm plus an absolute floor, see
//! [`Tolerance::threshold`].

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = Complex64::new(0.0, 0.0);
pub const ONE: C64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    Complex64::new(x, 0.0)
}

/// Relative and absolute tolerances used by every approximate check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps_rel: f64,
    pub eps_abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps_rel: 1e-9, eps_abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(eps_rel: f64, eps_abs: f64) -> Result<Self> {
        if !(eps_rel > 0.0 && eps_rel.is_finite()) || !(eps_abs > 0.0 && eps_abs.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive and finite (got {eps_rel}, {eps_abs})"
            )));
        }
        Ok(Tolerance { eps_rel, eps_abs })
    }

    /// Tolerance with the given relative part and the default absolute floor.
    pub fn relative(eps_rel: f64) -> Self {
        Tolerance { eps_rel, eps_abs: Tolerance::default().eps_abs.min(eps_rel) }
    }

    /// Acceptance threshold for a residual measured against quantities of
    /// size `scale`.
    #[inline]
    pub fn threshold(&self, scale: f64) -> f64 {
        self.eps_rel * scale + self.eps_abs
    }

    #[inline]
    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.threshold(scale)
    }

    /// A looser tolerance for rank decisions on vectors that went through
    /// several products (never tighter than `1e-8` relative).
    pub fn rank(&self) -> Tolerance {
        Tolerance { eps_rel: self.eps_rel.max(1e-8), eps_abs: self.eps_abs.max(1e-11) }
    }
}

/// Dense order-3 tensor, row-major in `(i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        Tensor3 { dims: [n1, n2, n3], data: vec![ZERO; n1 * n2 * n3] }
    }

    pub fn from_data(dims: [usize; 3], data: Vec<C64>) -> Result<Self> {
        if data.len() != dims[0] * dims[1] * dims[2] {
            return Err(Error::DimensionMismatch(format!(
                "tensor of shape {dims:?} needs {} entries, got {}",
                dims[0] * dims[1] * dims[2],
                data.len()
            )));
        }
        Ok(Tensor3 { dims, data })
    }

    /// Builds a tensor from sparse `(i, j, k, value)` entries; repeated
    /// indices accumulate.
    pub fn from_triples(
        dims: [usize; 3],
        entries: impl IntoIterator<Item = (usize, usize, usize, C64)>,
    ) -> Result<Self> {
        let mut t = Tensor3::zeros(dims[0], dims[1], dims[2]);
        for (i, j, k, v) in entries {
            if i >= dims[0] || j >= dims[1] || k >= dims[2] {
                return Err(Error::DimensionMismatch(format!("index ({i}, {j}, {k}) out of range for shape {dims:?}")));
            }
            t.add(i, j, k, v);
        }
        Ok(t)
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: C64) {
        let o = self.offset(i, j, k);
        self.data[o] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, v: C64) {
        let o = self.offset(i, j, k);
        self.data[o] += v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Nonzero entries in index order.
    pub fn triples(&self) -> Vec<(usize, usize, usize, C64)> {
        let mut out = Vec::new();
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                for k in 0..self.dims[2] {
                    let v = self.get(i, j, k);
                    if v != ZERO {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    /// The `n2 × n3` matrix obtained by fixing the first index.
    pub fn slice(&self, i: usize) -> Mat {
        Mat::from_fn(self.dims[1], self.dims[2], |j, k| self.get(i, j, k))
    }

    /// Swaps the last two indices; this is the flip map on the output of a
    /// comultiplication tensor.
    pub fn flip_last(&self) -> Tensor3 {
        let [a, b, c] = self.dims;
        let mut t = Tensor3::zeros(a, c, b);
        for i in 0..a {
            for j in 0..b {
                for k in 0..c {
                    t.set(i, k, j, self.get(i, j, k));
                }
            }
        }
        t
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Zeroes entries whose modulus is below `cutoff`.
    pub fn chop(&mut self, cutoff: f64) {
        for z in &mut self.data {
            if z.norm() < cutoff {
                *z = ZERO;
            }
        }
    }
}

/// Solution set `{particular + null_space · y}` of a linear system.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    /// One column per right-hand side.
    pub particular: Mat,
    /// Orthonormal basis of the null space, one column per vector.
    pub null_space: Mat,
}

impl AffineSolution {
    pub fn is_unique(&self) -> bool {
        self.null_space.ncols() == 0
    }
}

fn padded_svd(a: &Mat) -> SVD<C64, nalgebra::Dyn, nalgebra::Dyn> {
    let (m, n) = a.shape();
    if m >= n {
        SVD::new(a.clone(), true, true)
    } else {
        let mut p = Mat::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        SVD::new(p, true, true)
    }
}

/// Solves `A X = B` in the least-squares sense, returning the minimum-norm
/// particular solution together with an orthonormal null-space basis.
///
/// Fails with [`Error::InconsistentSystem`] when the residual exceeds
/// `eps_rel·‖A‖·‖X‖ + eps_rel·‖B‖ + eps_abs`.
pub fn solve_linear(a: &Mat, b: &Mat, tol: Tolerance) -> Result<AffineSolution> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!("matrix has {} rows, right-hand side {}", a.nrows(), b.nrows())));
    }
    if !a.iter().chain(b.iter()).all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite entries in linear system".into()));
    }
    let n = a.ncols();
    if n == 0 {
        let residual = b.norm();
        if residual > tol.eps_abs {
            return Err(Error::InconsistentSystem { residual });
        }
        return Ok(AffineSolution { particular: Mat::zeros(0, b.ncols()), null_space: Mat::zeros(0, 0) });
    }
    let svd = padded_svd(a);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol.eps_rel * smax + tol.eps_abs;
    let mut b_pad = Mat::zeros(u.nrows(), b.ncols());
    b_pad.view_mut((0, 0), (b.nrows(), b.ncols())).copy_from(b);
    let utb = u.adjoint() * &b_pad;
    let mut x = Mat::zeros(n, b.ncols());
    let mut null_cols = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        let v_row = vt.row(r);
        if s > cut {
            for col in 0..b.ncols() {
                let coef = utb[(r, col)] / s;
                for i in 0..n {
                    x[(i, col)] += v_row[i].conj() * coef;
                }
            }
        } else {
            null_cols.push(v_row.adjoint());
        }
    }
    let residual = (a * &x - b).norm();
    let allowed = tol.eps_rel * (a.norm() * x.norm() + b.norm()) + tol.eps_abs;
    if residual > allowed {
        return Err(Error::InconsistentSystem { residual });
    }
    let null_space = if null_cols.is_empty() { Mat::zeros(n, 0) } else { Mat::from_columns(&null_cols) };
    Ok(AffineSolution { particular: x, null_space })
}

/// Orthonormal basis of the null space of `a`.
pub fn null_space(a: &Mat, tol: Tolerance) -> Mat {
    let n = a.ncols();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return Mat::identity(n, n);
    }
    let svd = padded_svd(a);
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol.eps_rel * smax + tol.eps_abs;
    let cols: Vec<Vector> =
        svd.singular_values.iter().enumerate().filter(|(_, &s)| s <= cut).map(|(r, _)| vt.row(r).adjoint()).collect();
    if cols.is_empty() {
        Mat::zeros(n, 0)
    } else {
        Mat::from_columns(&cols)
    }
}

/// Numerical rank (singular values above `eps_rel·σ_max + eps_abs`).
pub fn rank(a: &Mat, tol: Tolerance) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let s = a.clone().singular_values();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let cut = tol.eps_rel * smax + tol.eps_abs;
    s.iter().filter(|&&x| x > cut).count()
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub fn herm_eig(h: &Mat, tol: Tolerance) -> Result<(Vec<f64>, Mat)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", h.nrows(), h.ncols())));
    }
    let defect = (h - h.adjoint()).norm();
    if defect > tol.threshold(h.norm()) {
        return Err(Error::NotHermitian { defect });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let sym = (h + h.adjoint()) * re(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors =
        Mat::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    Ok((values, vectors))
}

/// Applies a real function to a Hermitian matrix through its spectrum.
pub fn herm_apply(h: &Mat, tol: Tolerance, f: impl Fn(f64) -> f64) -> Result<Mat> {
    let (vals, u) = herm_eig(h, tol)?;
    let d = Mat::from_diagonal(&Vector::from_iterator(vals.len(), vals.iter().map(|&v| re(f(v)))));
    Ok(&u * d * u.adjoint())
}

/// Positive square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-eps_rel·‖H‖ - eps_abs, 0)` are clamped to zero.
pub fn psd_sqrt(h: &Mat, tol: Tolerance) -> Result<Mat> {
    let (vals, u) = herm_eig(h, tol)?;
    let floor = -tol.threshold(h.norm());
    if let Some(&min) = vals.last() {
        if min < floor {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
    }
    let d = Mat::from_diagonal(&Vector::from_iterator(vals.len(), vals.iter().map(|&v| re(v.max(0.0).sqrt()))));
    Ok(&u * d * u.adjoint())
}

/// Orthonormalises `vectors` in order (modified Gram–Schmidt, two passes),
/// dropping vectors whose remainder is below the tolerance relative to
/// their original norm. Deterministic for identical inputs.
pub fn orthonormalize<'a>(vectors: impl IntoIterator<Item = &'a Vector>, tol: Tolerance) -> Vec<Vector> {
    extend_orthonormal(&[], vectors, tol)
}

/// Gram–Schmidt continuation of an existing orthonormal family; only the
/// new vectors are returned.
pub fn extend_orthonormal<'a>(
    existing: &[Vector],
    vectors: impl IntoIterator<Item = &'a Vector>,
    tol: Tolerance,
) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let n0 = v.norm();
        if n0 <= tol.eps_abs {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in existing.iter().chain(basis.iter()) {
                let coef = q.dotc(&r);
                r.axpy(-coef, q, ONE);
            }
        }
        let nr = r.norm();
        if nr > tol.threshold(n0) {
            basis.push(r / re(nr));
        }
    }
    basis
}

/// Columns of a matrix as owned vectors.
pub fn columns(m: &Mat) -> Vec<Vector> {
    (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
}

pub fn from_columns(vs: &[Vector], nrows: usize) -> Mat {
    if vs.is_empty() {
        Mat::zeros(nrows, 0)
    } else {
        Mat::from_columns(vs)
    }
}

/// Distance from `v` to the span of an orthonormal family.
pub fn distance_to_span(basis: &[Vector], v: &Vector) -> f64 {
    let mut r = v.clone();
    for q in basis {
        let coef = q.dotc(&r);
        r.axpy(-coef, q, ONE);
    }
    r.norm()
}

/// Largest distance between unit vectors of one orthonormal family and the
/// span of the other, in both directions. Zero iff the spans coincide; a
/// dimension mismatch reports `1.0`.
pub fn subspace_distance(a: &[Vector], b: &[Vector]) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    let d1 = a.iter().map(|v| distance_to_span(b, v)).fold(0.0, f64::max);
    let d2 = b.iter().map(|v| distance_to_span(a, v)).fold(0.0, f64::max);
    d1.max(d2)
}

/// Orthonormal basis of the intersection of two subspaces given by
/// orthonormal families.
pub fn intersect(a: &[Vector], b: &[Vector], tol: Tolerance) -> Vec<Vector> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a[0].len();
    // x = A y = B w  <=>  [A, -B] (y, w) = 0
    let mut m = Mat::zeros(n, a.len() + b.len());
    for (j, v) in a.iter().enumerate() {
        m.set_column(j, v);
    }
    for (j, v) in b.iter().enumerate() {
        m.set_column(a.len() + j, &(-v));
    }
    let ns = null_space(&m, tol.rank());
    let amat = from_columns(a, n);
    let vs: Vec<Vector> = columns(&ns).iter().map(|c| &amat * c.rows(0, a.len())).collect();
    orthonormalize(&vs, tol.rank())
}

/// A quotient space `span(vectors) / span(relations)` realised as the
/// orthogonal complement of the relations inside the span.
#[derive(Debug, Clone)]
pub struct Quotient {
    /// Orthonormal representatives, one per quotient dimension.
    pub basis: Vec<Vector>,
    /// Ambient idempotent onto the span of the representatives; it
    /// annihilates the relation span.
    pub projection: Mat,
    /// Coordinates in the quotient basis of an ambient vector.
    pub coords: Mat,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, v: &Vector) -> Vector {
        &self.coords * v
    }

    pub fn lift(&self, q: &Vector) -> Vector {
        let mut out = Vector::zeros(self.coords.ncols());
        for (i, b) in self.basis.iter().enumerate() {
            out.axpy(q[i], b, ONE);
        }
        out
    }
}

/// Builds a deterministic basis of `span(vectors) / span(relations)`.
pub fn quotient_basis(ambient_dim: usize, vectors: &[Vector], relations: &[Vector], tol: Tolerance) -> Quotient {
    let rel = orthonormalize(relations, tol.rank());
    let basis = extend_orthonormal(&rel, vectors, tol.rank());
    let q = from_columns(&basis, ambient_dim);
    Quotient { projection: &q * q.adjoint(), coords: q.adjoint(), basis }
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Unit coordinate vector.
pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = ONE;
    v
}

/// `M ↦ vec(M)` in column-major order.
pub fn vectorize(m: &Mat) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &Vector, nrows: usize, ncols: usize) -> Mat {
    Mat::from_column_slice(nrows, ncols, v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Mat {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| re(rows[i][j]))
    }

    #[test]
    fn identity_system_has_unique_solution() {
        let a = Mat::identity(3, 3);
        let b = Mat::from_column_slice(3, 1, &[ONE, ZERO, ZERO]);
        let s = solve_linear(&a, &b, Tolerance::default()).unwrap();
        assert!((&s.particular - &b).norm() < 1e-14);
        assert!(s.is_unique());
    }

    #[test]
    fn zero_system_has_full_null_space() {
        let a = Mat::zeros(2, 2);
        let b = Mat::zeros(2, 1);
        let s = solve_linear(&a, &b, Tolerance::default()).unwrap();
        assert_eq!(s.null_space.ncols(), 2);
    }

    #[test]
    fn underdetermined_row() {
        let a = mat(&[&[1.0, 1.0]]);
        let b = mat(&[&[2.0]]);
        let s = solve_linear(&a, &b, Tolerance::default()).unwrap();
        assert!((s.particular[(0, 0)] - ONE).norm() < 1e-12);
        assert!((s.particular[(1, 0)] - ONE).norm() < 1e-12);
        assert_eq!(s.null_space.ncols(), 1);
        let v = s.null_space.column(0);
        let r = 1.0 / 2f64.sqrt();
        // spanned by (1, -1)/sqrt 2 up to phase
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert!((v[0].norm() - r).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_system_is_reported() {
        let a = Mat::zeros(1, 1);
        let b = mat(&[&[1.0]]);
        assert!(matches!(solve_linear(&a, &b, Tolerance::default()), Err(Error::InconsistentSystem { .. })));
    }

    #[test]
    fn eig_of_diagonal_and_swap() {
        let (v, u) = herm_eig(&mat(&[&[3.0, 0.0], &[0.0, 1.0]]), Tolerance::default()).unwrap();
        assert_eq!(v, vec![3.0, 1.0]);
        assert!((u.adjoint() * &u - Mat::identity(2, 2)).norm() < 1e-12);
        let h = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let (v, u) = herm_eig(&h, Tolerance::default()).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
        let r = 1.0 / 2f64.sqrt();
        assert!((u[(0, 0)].norm() - r).abs() < 1e-12);
        let recon = &u * Mat::from_diagonal(&Vector::from_vec(vec![re(v[0]), re(v[1])])) * u.adjoint();
        assert!((recon - h).norm() < 1e-12);
    }

    #[test]
    fn degenerate_eig_accepts_any_unitary() {
        let h = mat(&[&[2.0, 0.0], &[0.0, 2.0]]);
        let (v, u) = herm_eig(&h, Tolerance::default()).unwrap();
        assert_eq!(v, vec![2.0, 2.0]);
        assert!((u.adjoint() * &u - Mat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = mat(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&h, Tolerance::default()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let t = Tolerance::default();
        assert!((psd_sqrt(&Mat::identity(3, 3), t).unwrap() - Mat::identity(3, 3)).norm() < 1e-12);
        let s = psd_sqrt(&mat(&[&[4.0, 0.0], &[0.0, 9.0]]), t).unwrap();
        assert!((s - mat(&[&[2.0, 0.0], &[0.0, 3.0]])).norm() < 1e-12);
        let h = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = psd_sqrt(&h, t).unwrap();
        assert!((&s * &s - &h).norm() < 1e-12);
        let (ev, _) = herm_eig(&s, t).unwrap();
        assert!((ev[0] - 3f64.sqrt()).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
        assert!(matches!(psd_sqrt(&mat(&[&[-1.0]]), t), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn quotient_examples() {
        let t = Tolerance::default();
        let e = [unit_vector(2, 0), unit_vector(2, 1)];
        let q = quotient_basis(2, &e, &[], t);
        assert_eq!(q.dim(), 2);
        assert!((&q.projection - Mat::identity(2, 2)).norm() < 1e-12);
        let rel = [&e[0] - &e[1]];
        let q = quotient_basis(2, &e, &rel, t);
        assert_eq!(q.dim(), 1);
        assert!((&q.projection * &q.projection - &q.projection).norm() < 1e-12);
        assert!((&q.projection * &rel[0]).norm() < 1e-12);
        let q = quotient_basis(2, &e, &e, t);
        assert_eq!(q.dim(), 0);
        let again = quotient_basis(2, &e, &rel, t);
        assert_eq!(again.basis, quotient_basis(2, &e, &rel, t).basis);
    }

    #[test]
    fn tensor_flip_and_triples() {
        let t = Tensor3::from_triples([1, 2, 3], vec![(0, 1, 2, ONE), (0, 0, 1, re(2.0))]).unwrap();
        let f = t.flip_last();
        assert_eq!(f.dims(), [1, 3, 2]);
        assert_eq!(f.get(0, 2, 1), ONE);
        assert_eq!(t.triples().len(), 2);
        assert!(Tensor3::from_triples([1, 1, 1], vec![(0, 0, 1, ONE)]).is_err());
    }
}
