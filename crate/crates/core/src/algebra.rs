//! Finite-dimensional associative algebras given by structure constants,
//! optionally with a star operation, and their block decomposition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, columns, extend_orthonormal, from_columns, herm_eig, null_space, orthonormalize, re, Mat, Tensor3,
    Tolerance, Vector, C64, ONE, ZERO,
};

/// Seed used for spectral splitting when the caller has no preference.
pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

/// An associative unital algebra `e_i e_j = Σ_k mult[i][j][k] e_k`.
///
/// The star, when present, is stored as a matrix `Σ` with `x* = Σ·conj(x)`.
#[derive(Debug, Clone)]
pub struct FdAlgebra {
    dim: usize,
    mult: Tensor3,
    unit: Vector,
    star: Option<Mat>,
    left: Vec<Mat>,
}

impl FdAlgebra {
    pub fn new(mult: Tensor3, unit: Vector, star: Option<Mat>) -> Result<Self> {
        let [a, b, c] = mult.dims();
        if a != b || b != c {
            return Err(Error::DimensionMismatch(format!("multiplication tensor has shape {:?}", mult.dims())));
        }
        if unit.len() != a {
            return Err(Error::DimensionMismatch(format!("unit has length {} in dimension {a}", unit.len())));
        }
        if let Some(s) = &star {
            if s.shape() != (a, a) {
                return Err(Error::DimensionMismatch(format!("star matrix has shape {:?}", s.shape())));
            }
        }
        if !mult.is_finite() {
            return Err(Error::InvalidInput("non-finite structure constants".into()));
        }
        let left = (0..a).map(|i| mult.slice(i).transpose()).collect();
        Ok(FdAlgebra { dim: a, mult, unit, star, left })
    }

    /// The algebra spanned by a Frobenius-orthonormal family of square
    /// matrices closed under products (and adjoints, if `with_star`).
    pub fn from_matrix_basis(basis: &[Mat], with_star: bool, tol: Tolerance) -> Result<Self> {
        let d = basis.len();
        if d == 0 {
            return Err(Error::InvalidInput("empty matrix basis".into()));
        }
        let n = basis[0].nrows();
        let coords = |m: &Mat| -> Result<Vector> {
            let v = Vector::from_iterator(d, basis.iter().map(|b| b.dotc(m)));
            let mut back = Mat::zeros(n, n);
            for (i, b) in basis.iter().enumerate() {
                back += b * v[i];
            }
            let dist = (&back - m).norm();
            if dist > tol.rank().threshold(m.norm()) {
                return Err(Error::NotInSubalgebra { distance: dist });
            }
            Ok(v)
        };
        let mut mult = Tensor3::zeros(d, d, d);
        for i in 0..d {
            for j in 0..d {
                let v = coords(&(&basis[i] * &basis[j]))?;
                for k in 0..d {
                    mult.set(i, j, k, v[k]);
                }
            }
        }
        mult.chop(1e-14);
        let unit = coords(&Mat::identity(n, n))?;
        let star = if with_star {
            let cols: Vec<Vector> = basis.iter().map(|b| coords(&b.adjoint())).collect::<Result<_>>()?;
            Some(Mat::from_columns(&cols))
        } else {
            None
        };
        FdAlgebra::new(mult, unit, star)
    }

    /// Full matrix algebra `M_n` on its matrix-unit basis `e_{ij}` (index `i·n+j`).
    pub fn matrix_algebra(n: usize) -> Self {
        let d = n * n;
        let mut mult = Tensor3::zeros(d, d, d);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    mult.set(i * n + j, j * n + k, i * n + k, ONE);
                }
            }
        }
        let mut unit = Vector::zeros(d);
        let mut star = Mat::zeros(d, d);
        for i in 0..n {
            unit[i * n + i] = ONE;
            for j in 0..n {
                star[(j * n + i, i * n + j)] = ONE;
            }
        }
        FdAlgebra::new(mult, unit, Some(star)).expect("well-formed matrix algebra")
    }

    /// Direct sum `⊕ M_{n_r}` with matrix units of each block in order.
    pub fn multi_matrix(sizes: &[usize]) -> Self {
        let parts: Vec<FdAlgebra> = sizes.iter().map(|&n| FdAlgebra::matrix_algebra(n)).collect();
        parts.iter().skip(1).fold(parts[0].clone(), |acc, p| acc.direct_sum(p))
    }

    pub fn direct_sum(&self, other: &FdAlgebra) -> FdAlgebra {
        let (n, m) = (self.dim, other.dim);
        let mut mult = Tensor3::zeros(n + m, n + m, n + m);
        for (i, j, k, v) in self.mult.triples() {
            mult.set(i, j, k, v);
        }
        for (i, j, k, v) in other.mult.triples() {
            mult.set(n + i, n + j, n + k, v);
        }
        let unit = Vector::from_iterator(n + m, self.unit.iter().chain(other.unit.iter()).cloned());
        let star = match (&self.star, &other.star) {
            (Some(a), Some(b)) => {
                let mut s = Mat::zeros(n + m, n + m);
                s.view_mut((0, 0), (n, n)).copy_from(a);
                s.view_mut((n, n), (m, m)).copy_from(b);
                Some(s)
            }
            _ => None,
        };
        FdAlgebra::new(mult, unit, star).expect("direct sum of well-formed algebras")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mult(&self) -> &Tensor3 {
        &self.mult
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn star_matrix(&self) -> Option<&Mat> {
        self.star.as_ref()
    }

    pub fn has_star(&self) -> bool {
        self.star.is_some()
    }

    pub fn with_star(mut self, star: Option<Mat>) -> Result<Self> {
        if let Some(s) = &star {
            if s.shape() != (self.dim, self.dim) {
                return Err(Error::DimensionMismatch(format!("star matrix has shape {:?}", s.shape())));
            }
        }
        self.star = star;
        Ok(self)
    }

    pub fn basis(&self, i: usize) -> Vector {
        linalg::unit_vector(self.dim, i)
    }

    /// Left multiplication by the basis element `e_i`.
    pub fn basis_left(&self, i: usize) -> &Mat {
        &self.left[i]
    }

    pub fn left_matrix(&self, x: &Vector) -> Mat {
        let mut l = Mat::zeros(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if *xi != ZERO {
                l += &self.left[i] * *xi;
            }
        }
        l
    }

    pub fn right_matrix(&self, x: &Vector) -> Mat {
        let mut r = Mat::zeros(self.dim, self.dim);
        for (j, xj) in x.iter().enumerate() {
            if *xj != ZERO {
                for i in 0..self.dim {
                    let col = self.left[i].column(j);
                    for k in 0..self.dim {
                        r[(k, i)] += col[k] * *xj;
                    }
                }
            }
        }
        r
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for (i, xi) in x.iter().enumerate() {
            if *xi != ZERO {
                out += &self.left[i] * y * *xi;
            }
        }
        out
    }

    pub fn mul3(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        self.mul(&self.mul(x, y), z)
    }

    pub fn star(&self, x: &Vector) -> Result<Vector> {
        let s = self.star.as_ref().ok_or(Error::MissingStar)?;
        Ok(s * x.conjugate())
    }

    pub fn commutator(&self, x: &Vector, y: &Vector) -> Vector {
        self.mul(x, y) - self.mul(y, x)
    }

    /// Coefficient vector `t` of the trace `τ(x) = Tr(L_x) = tᵀx`.
    pub fn regular_trace(&self) -> Vector {
        Vector::from_iterator(self.dim, self.left.iter().map(|l| l.trace()))
    }

    /// `max |(e_i e_j) e_k − e_i (e_j e_k)|` over basis triples.
    pub fn associativity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                // L_{e_i e_j} − L_i L_j
                let eij = self.mult.slice(i).row(j).transpose();
                let lhs = self.left_matrix(&eij);
                let rhs = &self.left[i] * &self.left[j];
                worst = worst.max(linalg::max_abs(&(lhs - rhs)));
            }
        }
        worst
    }

    /// `max |1·e_i − e_i|, |e_i·1 − e_i|`.
    pub fn unit_residual(&self) -> f64 {
        let l1 = self.left_matrix(&self.unit);
        let r1 = self.right_matrix(&self.unit);
        let id = Mat::identity(self.dim, self.dim);
        linalg::max_abs(&(l1 - &id)).max(linalg::max_abs(&(r1 - id)))
    }

    /// Residuals of the star axioms: involution, antimultiplicativity and
    /// `1* = 1`, in that order.
    pub fn star_residuals(&self) -> Result<[f64; 3]> {
        let s = self.star.as_ref().ok_or(Error::MissingStar)?;
        let inv = linalg::max_abs(&(s * s.conjugate() - Mat::identity(self.dim, self.dim)));
        let mut anti: f64 = 0.0;
        for i in 0..self.dim {
            let ei_star = self.star(&self.basis(i))?;
            for j in 0..self.dim {
                let ej_star = self.star(&self.basis(j))?;
                let lhs = self.star(&self.mul(&self.basis(i), &self.basis(j)))?;
                let rhs = self.mul(&ej_star, &ei_star);
                anti = anti.max(linalg::max_abs_vec(&(lhs - rhs)));
            }
        }
        let unit = linalg::max_abs_vec(&(self.star(&self.unit)? - &self.unit));
        Ok([inv, anti, unit])
    }

    pub fn is_commutative(&self, tol: Tolerance) -> bool {
        let scale = self.mult.max_abs();
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let d = self.commutator(&self.basis(i), &self.basis(j));
                linalg::max_abs_vec(&d) <= tol.threshold(scale)
            })
        })
    }

    /// Orthonormal basis of `{x ∈ span(within) : [s, x] = 0 for all s}`;
    /// `within = None` means the whole algebra.
    pub fn commutant(&self, elements: &[Vector], within: Option<&[Vector]>, tol: Tolerance) -> Vec<Vector> {
        let w = match within {
            Some(w) => from_columns(&orthonormalize(w, tol.rank()), self.dim),
            None => Mat::identity(self.dim, self.dim),
        };
        if w.ncols() == 0 {
            return Vec::new();
        }
        let blocks: Vec<Mat> = elements.iter().map(|s| (self.left_matrix(s) - self.right_matrix(s)) * &w).collect();
        if blocks.is_empty() {
            return columns(&w);
        }
        let mut stacked = Mat::zeros(self.dim * blocks.len(), w.ncols());
        for (b, m) in blocks.iter().enumerate() {
            stacked.view_mut((b * self.dim, 0), (self.dim, w.ncols())).copy_from(m);
        }
        let ns = null_space(&stacked, tol.rank());
        let vs: Vec<Vector> = columns(&ns).iter().map(|y| &w * y).collect();
        orthonormalize(&vs, tol.rank())
    }

    pub fn center(&self, tol: Tolerance) -> Vec<Vector> {
        let basis: Vec<Vector> = (0..self.dim).map(|i| self.basis(i)).collect();
        self.commutant(&basis, None, tol)
    }

    /// Orthonormal basis of the unital subalgebra generated by `gens`.
    pub fn generated_subalgebra(&self, gens: &[Vector], tol: Tolerance) -> Result<Vec<Vector>> {
        let t = tol.rank();
        let mut seeds = vec![self.unit.clone()];
        seeds.extend(gens.iter().cloned());
        let mut basis = orthonormalize(&seeds, t);
        let max_rounds = self.dim + 2;
        for _ in 0..max_rounds {
            let mut products = Vec::new();
            for x in &basis {
                for y in &basis {
                    products.push(self.mul(x, y));
                }
            }
            let new = extend_orthonormal(&basis, &products, t);
            if new.is_empty() {
                return Ok(basis);
            }
            basis.extend(new);
        }
        Err(Error::GenerationOverflow(max_rounds))
    }

    /// Restriction to the subalgebra spanned by `spanning`. Returns the
    /// subalgebra on an orthonormal basis together with the embedding
    /// matrix whose columns are those basis vectors.
    pub fn subalgebra(&self, spanning: &[Vector], tol: Tolerance) -> Result<(FdAlgebra, Mat)> {
        let q = orthonormalize(spanning, tol.rank());
        if q.is_empty() {
            return Err(Error::InvalidInput("empty subalgebra".into()));
        }
        let qm = from_columns(&q, self.dim);
        let d = q.len();
        let coords = |v: &Vector| -> Result<Vector> {
            let c = qm.adjoint() * v;
            let dist = (&qm * &c - v).norm();
            if dist > tol.rank().threshold(v.norm()) {
                return Err(Error::NotInSubalgebra { distance: dist });
            }
            Ok(c)
        };
        let mut mult = Tensor3::zeros(d, d, d);
        for i in 0..d {
            for j in 0..d {
                let c = coords(&self.mul(&q[i], &q[j]))?;
                for k in 0..d {
                    mult.set(i, j, k, c[k]);
                }
            }
        }
        let unit = coords(&self.unit)?;
        let star = match &self.star {
            Some(_) => {
                let cols: Vec<Vector> = q.iter().map(|x| coords(&self.star(x)?)).collect::<Result<_>>()?;
                Some(Mat::from_columns(&cols))
            }
            None => None,
        };
        Ok((FdAlgebra::new(mult, unit, star)?, qm))
    }

    /// Block decomposition of a C*-algebra into full matrix algebras.
    pub fn wedderburn(&self, seed: u64, tol: Tolerance) -> Result<Wedderburn> {
        if self.star.is_none() {
            return Err(Error::MissingStar);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut last = Error::SpectralSplitting("no attempt made".into());
        for _ in 0..8 {
            match self.try_wedderburn(&mut rng, tol) {
                Ok(w) => return Ok(w),
                Err(e @ Error::SpectralSplitting(_)) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(last)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> Vector {
        Vector::from_iterator(self.dim, (0..self.dim).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
    }

    fn hermitian_part(&self, x: &Vector) -> Result<Vector> {
        Ok((x + self.star(x)?) * re(0.5))
    }

    fn try_wedderburn(&self, rng: &mut ChaCha8Rng, tol: Tolerance) -> Result<Wedderburn> {
        let calc = FunctionalCalculus::new(self, tol)?;
        let center = self.center(tol);
        let mut c = Vector::zeros(self.dim);
        for z in &center {
            c += z * c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let h = self.hermitian_part(&c)?;
        let (clusters, _) = calc.spectral_projections(&h, &self.unit, None)?;
        if clusters.len() != center.len() {
            return Err(Error::SpectralSplitting(format!(
                "{} spectral clusters for a center of dimension {}",
                clusters.len(),
                center.len()
            )));
        }
        let t = self.regular_trace();
        let mut blocks = Vec::new();
        for p in clusters {
            let block_dim = linalg::rank(&self.left_matrix(&p), tol.rank());
            let n = (block_dim as f64).sqrt().round() as usize;
            if n * n != block_dim || n == 0 {
                return Err(Error::SpectralSplitting(format!("block of dimension {block_dim} is not a square")));
            }
            blocks.push(self.matrix_units(&calc, &p, n, &t, rng, tol)?);
        }
        blocks.sort_by(|a, b| {
            a.size.cmp(&b.size).then_with(|| {
                let ka: Vec<i64> =
                    a.central.iter().flat_map(|z| [(z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64]).collect();
                let kb: Vec<i64> =
                    b.central.iter().flat_map(|z| [(z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64]).collect();
                kb.cmp(&ka)
            })
        });
        let total: usize = blocks.iter().map(|b| b.size * b.size).sum();
        if total != self.dim {
            return Err(Error::SpectralSplitting(format!("blocks cover {total} of {} dimensions", self.dim)));
        }
        Ok(Wedderburn { dim: self.dim, blocks })
    }

    fn matrix_units(
        &self,
        calc: &FunctionalCalculus,
        p: &Vector,
        n: usize,
        t: &Vector,
        rng: &mut ChaCha8Rng,
        tol: Tolerance,
    ) -> Result<Block> {
        let mut q = vec![p.clone()];
        if n > 1 {
            let k = self.mul(p, &self.hermitian_part(&self.random_element(rng))?);
            let (proj, _) = calc.spectral_projections(&k, p, Some(p))?;
            if proj.len() != n {
                return Err(Error::SpectralSplitting(format!(
                    "{} minimal projections in a block of size {n}",
                    proj.len()
                )));
            }
            q = proj;
        }
        let tau = |x: &Vector| -> C64 { t.dot(x) };
        let tau1 = tau(&q[0]);
        let mut col = vec![q[0].clone()];
        for qi in q.iter().skip(1) {
            let r = self.random_element(rng);
            let x = self.mul3(qi, &r, &q[0]);
            let lam = tau(&self.mul(&self.star(&x)?, &x)) / tau1;
            if lam.re <= tol.rank().threshold(1.0).sqrt() {
                return Err(Error::SpectralSplitting("degenerate off-diagonal matrix unit".into()));
            }
            col.push(x / re(lam.re.sqrt()));
        }
        let mut units = vec![Vector::zeros(self.dim); n * n];
        for i in 0..n {
            for j in 0..n {
                units[i * n + j] = self.mul(&col[i], &self.star(&col[j])?);
            }
        }
        let mut coef = Mat::zeros(n * n, self.dim);
        for i in 0..n {
            for j in 0..n {
                let f = self.left_matrix(&units[j * n + i]).transpose() * t / tau1;
                coef.set_row(i * n + j, &f.transpose());
            }
        }
        Ok(Block { size: n, central: p.clone(), units, coef })
    }
}

/// Functional calculus for Hermitian elements through the left regular
/// representation, made self-adjoint by the regular trace inner product.
struct FunctionalCalculus<'a> {
    alg: &'a FdAlgebra,
    g_half: Mat,
    g_inv_half: Mat,
    tol: Tolerance,
}

impl<'a> FunctionalCalculus<'a> {
    fn new(alg: &'a FdAlgebra, tol: Tolerance) -> Result<Self> {
        let t = alg.regular_trace();
        let n = alg.dim;
        let mut g = Mat::zeros(n, n);
        for i in 0..n {
            let ei_star = alg.star(&alg.basis(i))?;
            let li = alg.left_matrix(&ei_star);
            // τ(e_i* e_j) = tᵀ L_{e_i*} e_j
            let row = li.transpose() * &t;
            for j in 0..n {
                g[(i, j)] = row[j];
            }
        }
        let (vals, u) = herm_eig(&g, tol.rank())?;
        let min = vals.last().cloned().unwrap_or(1.0);
        if min <= tol.rank().threshold(vals[0]) {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let sq = Mat::from_diagonal(&Vector::from_iterator(n, vals.iter().map(|v| re(v.sqrt()))));
        let isq = Mat::from_diagonal(&Vector::from_iterator(n, vals.iter().map(|v| re(1.0 / v.sqrt()))));
        Ok(FunctionalCalculus { alg, g_half: &u * sq * u.adjoint(), g_inv_half: &u * isq * u.adjoint(), tol })
    }

    /// Spectral projections `χ_c(h)·apply_to` for the distinct eigenvalue
    /// clusters `c` of `h`, in ascending order. When `support` is given, the
    /// spectrum is computed on `support·A` (other clusters are shifted to
    /// zero and dropped).
    fn spectral_projections(
        &self,
        h: &Vector,
        apply_to: &Vector,
        support: Option<&Vector>,
    ) -> Result<(Vec<Vector>, Vec<f64>)> {
        let lh = self.alg.left_matrix(h);
        let mut lt = &self.g_half * lh * &self.g_inv_half;
        let shift = match support {
            Some(p) => {
                let s = 2.0 * lt.norm() + 1.0;
                lt += &self.g_half * self.alg.left_matrix(p) * &self.g_inv_half * re(s);
                s
            }
            None => 0.0,
        };
        let lt = (&lt + lt.adjoint()) * re(0.5);
        let (vals, u) = herm_eig(&lt, self.tol.rank())?;
        let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let gap = 1e-6 * scale;
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        // ascending order
        for i in (0..vals.len()).rev() {
            if support.is_some() && vals[i] < 0.5 * shift {
                continue;
            }
            match clusters.last_mut() {
                Some(c) if (vals[i] - vals[*c.last().unwrap()]).abs() <= gap => c.push(i),
                _ => clusters.push(vec![i]),
            }
        }
        let min_gap = clusters
            .windows(2)
            .map(|w| (vals[w[1][0]] - vals[*w[0].last().unwrap()]).abs())
            .fold(f64::INFINITY, f64::min);
        if clusters.len() > 1 && min_gap < 1e-4 * scale {
            return Err(Error::SpectralSplitting(format!("eigenvalue gap {min_gap:.2e} too small")));
        }
        let x = &self.g_half * apply_to;
        let mut out = Vec::new();
        let mut means = Vec::new();
        for c in &clusters {
            let mut p = Mat::zeros(vals.len(), vals.len());
            for &i in c {
                let col = u.column(i);
                p += col * col.adjoint();
            }
            out.push(&self.g_inv_half * (p * &x));
            means.push(c.iter().map(|&i| vals[i]).sum::<f64>() / c.len() as f64 - shift);
        }
        Ok((out, means))
    }
}

/// One simple summand `M_n` with its matrix units.
#[derive(Debug, Clone)]
pub struct Block {
    pub size: usize,
    /// Minimal central projection.
    pub central: Vector,
    /// Matrix units `e_{ij}`, stored at index `i·size + j`.
    pub units: Vec<Vector>,
    /// Row `i·size + j` is the functional `x ↦ π(x)_{ij}`.
    coef: Mat,
}

impl Block {
    pub fn unit(&self, i: usize, j: usize) -> &Vector {
        &self.units[i * self.size + j]
    }
}

/// Decomposition `A ≅ ⊕_r M_{n_r}` with explicit matrix units.
#[derive(Debug, Clone)]
pub struct Wedderburn {
    dim: usize,
    pub blocks: Vec<Block>,
}

impl Wedderburn {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Image of `x` in block `r`.
    pub fn block_matrix(&self, r: usize, x: &Vector) -> Mat {
        let b = &self.blocks[r];
        let v = &b.coef * x;
        Mat::from_fn(b.size, b.size, |i, j| v[i * b.size + j])
    }

    pub fn represent(&self, x: &Vector) -> Vec<Mat> {
        (0..self.blocks.len()).map(|r| self.block_matrix(r, x)).collect()
    }

    /// The faithful representation on `⊕ ℂ^{n_r}` as one block-diagonal matrix.
    pub fn faithful(&self, x: &Vector) -> Mat {
        let total: usize = self.sizes().iter().sum();
        let mut m = Mat::zeros(total, total);
        let mut off = 0;
        for (r, b) in self.blocks.iter().enumerate() {
            m.view_mut((off, off), (b.size, b.size)).copy_from(&self.block_matrix(r, x));
            off += b.size;
        }
        m
    }

    pub fn assemble(&self, mats: &[Mat]) -> Vector {
        let mut x = Vector::zeros(self.dim);
        for (b, m) in self.blocks.iter().zip(mats) {
            for i in 0..b.size {
                for j in 0..b.size {
                    if m[(i, j)] != ZERO {
                        x.axpy(m[(i, j)], b.unit(i, j), ONE);
                    }
                }
            }
        }
        x
    }

    /// Applies a matrix function block by block.
    pub fn map(&self, x: &Vector, f: impl Fn(&Mat) -> Result<Mat>) -> Result<Vector> {
        let mats: Vec<Mat> = self.represent(x).iter().map(f).collect::<Result<_>>()?;
        Ok(self.assemble(&mats))
    }

    /// Smallest eigenvalue of a Hermitian element over all blocks.
    pub fn min_eigenvalue(&self, x: &Vector, tol: Tolerance) -> Result<f64> {
        let mut min = f64::INFINITY;
        for m in self.represent(x) {
            let (vals, _) = herm_eig(&m, tol)?;
            if let Some(&v) = vals.last() {
                min = min.min(v);
            }
        }
        Ok(min)
    }

    pub fn spectrum(&self, x: &Vector, tol: Tolerance) -> Result<Vec<Vec<f64>>> {
        self.represent(x).iter().map(|m| herm_eig(m, tol).map(|(v, _)| v)).collect()
    }

    pub fn sqrt(&self, x: &Vector, tol: Tolerance) -> Result<Vector> {
        self.map(x, |m| linalg::psd_sqrt(m, tol))
    }

    /// Inverse of an element; fails when some block is singular relative
    /// to the tolerance.
    pub fn inverse(&self, x: &Vector, tol: Tolerance) -> Result<Vector> {
        self.map(x, |m| {
            let s = m.clone().singular_values();
            let (smin, smax) = (s.min(), s.max());
            if smin <= tol.threshold(smax) {
                return Err(Error::NotPositive { min_eigenvalue: smin });
            }
            m.clone().try_inverse().ok_or(Error::NotPositive { min_eigenvalue: smin })
        })
    }

    /// Traces `tr π_r(x)` per block.
    pub fn block_traces(&self, x: &Vector) -> Vec<C64> {
        self.represent(x).iter().map(|m| m.trace()).collect()
    }

    /// Minimal central projections in block order.
    pub fn central_projections(&self) -> Vec<Vector> {
        self.blocks.iter().map(|b| b.central.clone()).collect()
    }
}

/// A subspace with an orthonormal basis, used for membership tests.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub basis: Vec<Vector>,
    ambient: usize,
}

impl Subspace {
    pub fn new(ambient: usize, spanning: &[Vector], tol: Tolerance) -> Self {
        Subspace { basis: orthonormalize(spanning, tol.rank()), ambient }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn matrix(&self) -> Mat {
        from_columns(&self.basis, self.ambient)
    }

    pub fn project(&self, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.ambient);
        for q in &self.basis {
            out.axpy(q.dotc(v), q, ONE);
        }
        out
    }

    pub fn distance(&self, v: &Vector) -> f64 {
        linalg::distance_to_span(&self.basis, v)
    }

    pub fn contains(&self, v: &Vector, tol: Tolerance) -> bool {
        self.distance(v) <= tol.threshold(v.norm())
    }

    /// Zero iff both spans coincide.
    pub fn distance_to(&self, other: &Subspace) -> f64 {
        linalg::subspace_distance(&self.basis, &other.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_algebra_is_associative_with_star() {
        let m = FdAlgebra::matrix_algebra(3);
        assert!(m.associativity_residual() < 1e-14);
        assert!(m.unit_residual() < 1e-14);
        let s = m.star_residuals().unwrap();
        assert!(s.iter().all(|&r| r < 1e-14));
        assert_eq!(m.center(Tolerance::default()).len(), 1);
    }

    #[test]
    fn wedderburn_of_multi_matrix() {
        let a = FdAlgebra::multi_matrix(&[2, 1, 3]);
        let w = a.wedderburn(DEFAULT_SEED, Tolerance::default()).unwrap();
        assert_eq!(w.sizes(), vec![1, 2, 3]);
        let x = Vector::from_iterator(a.dim(), (0..a.dim()).map(|i| c64(i as f64, 1.0 - i as f64)));
        let y = Vector::from_iterator(a.dim(), (0..a.dim()).map(|i| c64(0.5 * i as f64, 2.0)));
        let px = w.represent(&x);
        let py = w.represent(&y);
        let pxy = w.represent(&a.mul(&x, &y));
        for r in 0..3 {
            assert!((&px[r] * &py[r] - &pxy[r]).norm() < 1e-9);
        }
        assert!((w.assemble(&px) - &x).norm() < 1e-9);
        let xs = w.represent(&a.star(&x).unwrap());
        for r in 0..3 {
            assert!((px[r].adjoint() - &xs[r]).norm() < 1e-9);
        }
    }

    #[test]
    fn sqrt_and_inverse_through_blocks() {
        let a = FdAlgebra::matrix_algebra(2);
        let t = Tolerance::default();
        let w = a.wedderburn(7, t).unwrap();
        // [[2,1],[1,2]]
        let x = Vector::from_vec(vec![re(2.0), ONE, ONE, re(2.0)]);
        let s = w.sqrt(&x, t).unwrap();
        assert!((a.mul(&s, &s) - &x).norm() < 1e-9);
        let inv = w.inverse(&x, t).unwrap();
        assert!((a.mul(&inv, &x) - a.unit()).norm() < 1e-9);
    }

    #[test]
    fn generated_and_sub_algebra() {
        let a = FdAlgebra::matrix_algebra(2);
        let t = Tolerance::default();
        let e11 = a.basis(0);
        let gen = a.generated_subalgebra(&[e11], t).unwrap();
        assert_eq!(gen.len(), 2);
        let (sub, emb) = a.subalgebra(&gen, t).unwrap();
        assert_eq!(sub.dim(), 2);
        assert_eq!(emb.shape(), (4, 2));
        assert!(sub.is_commutative(t));
        let e12 = a.basis(1);
        let all = a.generated_subalgebra(&[e12.clone(), a.star(&e12).unwrap()], t).unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn commutant_of_diagonal_is_diagonal() {
        let a = FdAlgebra::matrix_algebra(2);
        let c = a.commutant(&[a.basis(0)], None, Tolerance::default());
        assert_eq!(c.len(), 2);
    }
}
