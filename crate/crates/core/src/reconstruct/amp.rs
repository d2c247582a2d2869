//! Amplimorphisms between finite-dimensional C*-algebras.
//!
//! A 1-cell `α: X → Y` of size `p` is a (possibly non-unital)
//! *-homomorphism `X → M_p ⊗ Y`, stored through its values on the matrix
//! units of `X`. Elements of `M_p ⊗ Y` are `p·D_Y` square matrices whose
//! `D_Y × D_Y` blocks lie in the faithful representation of `Y`. 2-cells
//! are rectangular matrices of the same kind. For a composite `β∘α` the
//! block index of `α` is the outer one.

use crate::algebra::{FdAlgebra, Wedderburn, DEFAULT_SEED};
use crate::linalg::{null_space, Mat, Tensor3, Tolerance, Vector, C64, ONE, ZERO};
use crate::{Error, Result};

/// A C*-algebra together with its faithful block-diagonal representation.
#[derive(Debug, Clone)]
pub struct Obj {
    pub alg: FdAlgebra,
    pub wed: Wedderburn,
    /// Size of the faithful representation.
    pub dim: usize,
    offsets: Vec<usize>,
    /// Matrix-unit positions `(row, col)` in block order.
    units: Vec<(usize, usize)>,
    unit_elems: Vec<Vector>,
}

impl Obj {
    pub fn new(alg: FdAlgebra, tol: Tolerance) -> Result<Self> {
        let wed = alg.wedderburn(DEFAULT_SEED, tol)?;
        let mut offsets = Vec::new();
        let mut units = Vec::new();
        let mut unit_elems = Vec::new();
        let mut off = 0;
        for b in &wed.blocks {
            offsets.push(off);
            for i in 0..b.size {
                for j in 0..b.size {
                    units.push((off + i, off + j));
                    unit_elems.push(b.unit(i, j).clone());
                }
            }
            off += b.size;
        }
        Ok(Obj { alg, wed, dim: off, offsets, units, unit_elems })
    }

    pub fn rep(&self, x: &Vector) -> Mat {
        self.wed.faithful(x)
    }

    /// Inverse of [`Obj::rep`]; entries outside the diagonal blocks are ignored.
    pub fn elem(&self, t: &Mat) -> Vector {
        let mut x = Vector::zeros(self.alg.dim());
        for (pos, u) in self.units.iter().zip(&self.unit_elems) {
            let c = t[*pos];
            if c != ZERO {
                x.axpy(c, u, ONE);
            }
        }
        x
    }

    pub fn units(&self) -> &[(usize, usize)] {
        &self.units
    }

    pub fn identity(&self) -> Mat {
        Mat::identity(self.dim, self.dim)
    }

    /// Minimal central projections as matrices.
    pub fn central_projections(&self) -> Vec<Mat> {
        self.wed
            .blocks
            .iter()
            .zip(&self.offsets)
            .map(|(b, &off)| {
                let mut p = Mat::zeros(self.dim, self.dim);
                for i in 0..b.size {
                    p[(off + i, off + i)] = ONE;
                }
                p
            })
            .collect()
    }

    /// Trace on the center taking the value 1 on every minimal central
    /// projection.
    pub fn center_trace(&self, c: &Mat) -> C64 {
        let mut s = ZERO;
        for (b, &off) in self.wed.blocks.iter().zip(&self.offsets) {
            let mut t = ZERO;
            for i in 0..b.size {
                t += c[(off + i, off + i)];
            }
            s += t / b.size as f64;
        }
        s
    }

    /// Coefficients `c_μ` of a central element `Σ c_μ P_μ`.
    pub fn central_coefficients(&self, c: &Mat) -> Vec<C64> {
        self.wed
            .blocks
            .iter()
            .zip(&self.offsets)
            .map(|(b, &off)| (0..b.size).map(|i| c[(off + i, off + i)]).sum::<C64>() / b.size as f64)
            .collect()
    }
}

/// A 1-cell between two objects of a [`Cat`].
#[derive(Debug, Clone)]
pub struct Amp {
    pub src: usize,
    pub tgt: usize,
    pub size: usize,
    images: Vec<Mat>,
}

impl Amp {
    /// Side length of the 2-cell matrices on this 1-cell.
    pub fn width(&self, cat: &Cat) -> usize {
        self.size * cat.objs[self.tgt].dim
    }
}

/// The objects together with the operations on 1- and 2-cells.
#[derive(Debug, Clone)]
pub struct Cat {
    pub objs: Vec<Obj>,
}

impl Cat {
    pub fn identity(&self, o: usize) -> Amp {
        let ob = &self.objs[o];
        let images = ob
            .units
            .iter()
            .map(|&(r, c)| {
                let mut m = Mat::zeros(ob.dim, ob.dim);
                m[(r, c)] = ONE;
                m
            })
            .collect();
        Amp { src: o, tgt: o, size: 1, images }
    }

    /// The 1-cell determined by its values `f(x) ∈ M_p ⊗ Y` on elements of `X`.
    pub fn amp_from(&self, src: usize, tgt: usize, size: usize, f: impl Fn(&Vector) -> Mat) -> Amp {
        let images = self.objs[src].unit_elems.iter().map(f).collect();
        Amp { src, tgt, size, images }
    }

    /// `α(x)` for `x` given in the faithful representation of the source.
    pub fn eval(&self, a: &Amp, t: &Mat) -> Mat {
        let w = a.width(self);
        let mut out = Mat::zeros(w, w);
        for (pos, img) in self.objs[a.src].units.iter().zip(&a.images) {
            let c = t[*pos];
            if c != ZERO {
                out += img * c;
            }
        }
        out
    }

    pub fn eval_elem(&self, a: &Amp, x: &Vector) -> Mat {
        self.eval(a, &self.objs[a.src].rep(x))
    }

    /// `α` applied to every `D_X × D_X` block of a rectangular matrix.
    pub fn eval_blocks(&self, a: &Amp, t: &Mat) -> Mat {
        let d = self.objs[a.src].dim;
        let (r, s) = (t.nrows() / d, t.ncols() / d);
        let w = a.width(self);
        let mut out = Mat::zeros(r * w, s * w);
        for i in 0..r {
            for j in 0..s {
                let blk = t.view((i * d, j * d), (d, d)).into_owned();
                if blk.iter().all(|z| *z == ZERO) {
                    continue;
                }
                out.view_mut((i * w, j * w), (w, w)).copy_from(&self.eval(a, &blk));
            }
        }
        out
    }

    /// The unit `α(1)`, which is the identity 2-cell on `α`.
    pub fn one(&self, a: &Amp) -> Mat {
        let d = self.objs[a.src].dim;
        self.eval(a, &Mat::identity(d, d))
    }

    /// `outer ∘ inner`.
    pub fn compose(&self, inner: &Amp, outer: &Amp) -> Amp {
        assert_eq!(inner.tgt, outer.src, "composable 1-cells");
        let images = inner.images.iter().map(|m| self.eval_blocks(outer, m)).collect();
        Amp { src: inner.src, tgt: outer.tgt, size: inner.size * outer.size, images }
    }

    /// Subobject `x ↦ P α(x) P` for a projection `P ∈ End α`.
    pub fn compress(&self, a: &Amp, p: &Mat) -> Amp {
        let images = a.images.iter().map(|m| p * m * p).collect();
        Amp { src: a.src, tgt: a.tgt, size: a.size, images }
    }

    /// Horizontal product `s ⊗ t` of `s: β → β'` (outer) and `t: α → α'`
    /// (inner), where `outer` is `β`: `(1 ⊗ s)·β(t)`.
    pub fn hor(&self, s: &Mat, t: &Mat, outer: &Amp) -> Mat {
        let d = self.objs[outer.src].dim;
        let p_out = t.nrows() / d;
        let left = Mat::identity(p_out, p_out).kronecker(s);
        left * self.eval_blocks(outer, t)
    }

    /// Frobenius-orthonormal basis of `Hom(α, β)`.
    pub fn hom(&self, a: &Amp, b: &Amp, tol: Tolerance) -> Result<Vec<Mat>> {
        if a.src != b.src || a.tgt != b.tgt {
            return Err(Error::DimensionMismatch("1-cells with different endpoints".into()));
        }
        let y = &self.objs[a.tgt];
        let (wa, wb) = (a.width(self), b.width(self));
        let mut params = Vec::new();
        for i in 0..b.size {
            for j in 0..a.size {
                for &(r, c) in &y.units {
                    params.push((i * y.dim + r, j * y.dim + c));
                }
            }
        }
        let a1 = self.one(a);
        let b1 = self.one(b);
        let block = wb * wa;
        let gens = a.images.len();
        let mut sys = Mat::zeros((gens + 1) * block, params.len());
        for (col, &(r, c)) in params.iter().enumerate() {
            // t = E_rc: residuals t α(g) − β(g) t and t − β(1) t α(1)
            for (g, (ag, bg)) in a.images.iter().zip(&b.images).enumerate() {
                let mut res = Mat::zeros(wb, wa);
                res.row_mut(r).copy_from(&ag.row(c));
                let bc = bg.column(r).into_owned();
                for q in 0..wb {
                    res[(q, c)] -= bc[q];
                }
                sys.view_mut((g * block, col), (block, 1)).copy_from_slice(res.as_slice());
            }
            let mut res = Mat::zeros(wb, wa);
            res[(r, c)] = ONE;
            res -= b1.column(r) * a1.row(c);
            sys.view_mut((gens * block, col), (block, 1)).copy_from_slice(res.as_slice());
        }
        let ns = null_space(&sys, tol.rank());
        Ok((0..ns.ncols())
            .map(|k| {
                let mut m = Mat::zeros(wb, wa);
                for (p, &(r, c)) in params.iter().enumerate() {
                    m[(r, c)] = ns[(p, k)];
                }
                m
            })
            .collect())
    }
}

/// The algebra spanned by a Frobenius-orthonormal basis of 2-cells closed
/// under products and adjoints, with unit `one`.
pub fn cell_algebra(basis: &[Mat], one: &Mat, tol: Tolerance) -> Result<FdAlgebra> {
    let d = basis.len();
    if d == 0 {
        return Err(Error::InvalidInput("empty 2-cell space".into()));
    }
    let mut mult = Tensor3::zeros(d, d, d);
    for i in 0..d {
        for j in 0..d {
            let c = cell_coords(basis, &(&basis[i] * &basis[j]), tol)?;
            for k in 0..d {
                mult.set(i, j, k, c[k]);
            }
        }
    }
    mult.chop(1e-14);
    let unit = cell_coords(basis, one, tol)?;
    let cols: Vec<Vector> = basis.iter().map(|b| cell_coords(basis, &b.adjoint(), tol)).collect::<Result<_>>()?;
    FdAlgebra::new(mult, unit, Some(Mat::from_columns(&cols)))
}

/// Coordinates of `x` in an orthonormal family, failing if `x` is not in its span.
pub fn cell_coords(basis: &[Mat], x: &Mat, tol: Tolerance) -> Result<Vector> {
    let v = Vector::from_iterator(basis.len(), basis.iter().map(|b| b.dotc(x)));
    let mut back = Mat::zeros(x.nrows(), x.ncols());
    for (b, c) in basis.iter().zip(v.iter()) {
        back += b * *c;
    }
    let dist = (&back - x).norm();
    if dist > tol.rank().threshold(x.norm()) {
        return Err(Error::NotInSubalgebra { distance: dist });
    }
    Ok(v)
}

pub fn cell_from_coords(basis: &[Mat], c: &Vector) -> Mat {
    let mut m = Mat::zeros(basis[0].nrows(), basis[0].ncols());
    for (b, z) in basis.iter().zip(c.iter()) {
        m += b * *z;
    }
    m
}
