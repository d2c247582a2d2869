//! The Jones tower `N ⊂ M ⊂ M₂ ⊂ M₃` and its derived tower.

use super::inclusion::InclusionData;
use crate::algebra::{FdAlgebra, DEFAULT_SEED};
use crate::linalg::{
    columns, max_abs, max_abs_vec, orthonormalize, psd_sqrt, rank, vectorize, Mat, Tolerance, Vector, C64,
};
use crate::report::Report;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One basic construction `A ⊂ B ⊂ C = ⟨B, e⟩`, realized on the GNS space
/// of `B` for `φ = τ_A∘E`.
#[derive(Debug, Clone)]
pub struct BasicConstruction {
    /// Frobenius-orthonormal basis of `C` as operators on the space of `B`.
    pub operators: Vec<Mat>,
    /// Columns are the basis of `B` in the coordinates of `C`.
    pub embedding: Mat,
    /// The Jones projection in the coordinates of `C`.
    pub jones: Vector,
    /// `E_C: C → B`, coordinates of `C` to coordinates of `B`.
    pub dual_expectation: Mat,
    pub report: Report,
}

impl BasicConstruction {
    pub fn dim(&self) -> usize {
        self.operators.len()
    }

    /// `C` with structure constants in the operator basis.
    pub fn algebra(&self, tol: Tolerance) -> Result<FdAlgebra> {
        FdAlgebra::from_matrix_basis(&self.operators, true, tol)
    }

    pub fn operator(&self, x: &Vector) -> Mat {
        let n = self.operators[0].nrows();
        let mut t = Mat::zeros(n, n);
        for (b, c) in self.operators.iter().zip(x.iter()) {
            t += b * *c;
        }
        t
    }

    pub fn coords(&self, t: &Mat) -> Vector {
        coords_in(&self.operators, t)
    }

    /// Orthonormal coordinates of `{x ∈ C : [x, g] = 0 for all g}`.
    pub fn commutant(&self, gens: &[Vector], tol: Tolerance) -> Vec<Vector> {
        let d = self.dim();
        let n = self.operators[0].nrows();
        if gens.is_empty() {
            return (0..d).map(|i| crate::linalg::unit_vector(d, i)).collect();
        }
        let g_ops: Vec<Mat> = gens.iter().map(|g| self.operator(g)).collect();
        let mut sys = Mat::zeros(gens.len() * n * n, d);
        for (c, b) in self.operators.iter().enumerate() {
            for (k, g) in g_ops.iter().enumerate() {
                let comm = b * g - g * b;
                sys.view_mut((k * n * n, c), (n * n, 1)).copy_from_slice(comm.as_slice());
            }
        }
        let ns = crate::linalg::null_space(&sys, tol.rank());
        orthonormalize(&columns(&ns), tol.rank())
    }

    pub fn embed(&self, x: &Vector) -> Vector {
        &self.embedding * x
    }

    /// `E_C` as a map `C → C` with range `B`.
    pub fn expectation_in_c(&self) -> Mat {
        &self.embedding * &self.dual_expectation
    }
}

fn coords_in(basis: &[Mat], t: &Mat) -> Vector {
    Vector::from_iterator(basis.len(), basis.iter().map(|b| b.dotc(t)))
}

/// Basic construction of `inc`: `M` acts by left multiplication, `e` is `E`
/// itself, `C` is spanned by `x e u_j*` and `E_C(x e y) = (Ind E)⁻¹xy`.
pub fn basic_construction(inc: &InclusionData, tol: Tolerance) -> Result<BasicConstruction> {
    let m = &inc.m;
    let d = m.dim();
    let w = psd_sqrt(&inc.gram()?, tol)?;
    let w_inv = w.clone().try_inverse().ok_or(Error::NotPositive { min_eigenvalue: 0.0 })?;
    let twist = |t: &Mat| &w * t * &w_inv;
    let left: Vec<Mat> = (0..d).map(|i| twist(m.basis_left(i))).collect();
    let lt = |x: &Vector| twist(&m.left_matrix(x));
    let e = twist(&inc.expectation);
    let stars: Vec<Vector> = inc.quasibasis.iter().map(|u| m.star(u)).collect::<Result<_>>()?;

    let mut words = Vec::with_capacity(d * stars.len());
    for l in &left {
        let le = l * &e;
        for us in &stars {
            words.push(&le * lt(us));
        }
    }
    let vecs: Vec<Vector> = words.iter().map(vectorize).collect();
    let onb = orthonormalize(&vecs, tol.rank());
    if onb.is_empty() {
        return Err(Error::InvalidInput("empty basic construction".into()));
    }
    let operators: Vec<Mat> = onb.iter().map(|v| Mat::from_column_slice(d, d, v.as_slice())).collect();
    let embedding = Mat::from_columns(&left.iter().map(|l| coords_in(&operators, l)).collect::<Vec<_>>());
    let jones = coords_in(&operators, &e);

    // E_C(T) = Σ_ij u_i E(u_i* T₀u_j) Ind⁻¹ u_j*, T₀ the untwisted operator
    let ind = inc.index()?;
    let ind_inv = m
        .left_matrix(&ind)
        .try_inverse()
        .map(|l| l * m.unit())
        .ok_or_else(|| Error::NoFiniteIndex("Ind E is not invertible".into()))?;
    let k = stars.len();
    // R(Ind⁻¹u_j*)·E and L(u_i*), so the sum becomes matrix products
    let re: Vec<Mat> = stars.iter().map(|us| m.right_matrix(&m.mul(&ind_inv, us)) * &inc.expectation).collect();
    let l_star: Vec<Mat> = stars.iter().map(|us| m.left_matrix(us)).collect();
    let l_u: Vec<Mat> = inc.quasibasis.iter().map(|u| m.left_matrix(u)).collect();
    let u_cols = Mat::from_columns(&inc.quasibasis);
    let mut dual_expectation = Mat::zeros(d, operators.len());
    for (c, op) in operators.iter().enumerate() {
        let y = &w_inv * op * &w * &u_cols;
        let mut acc = Vector::zeros(d);
        for i in 0..k {
            let z = &l_star[i] * &y;
            let mut inner = Vector::zeros(d);
            for (j, rj) in re.iter().enumerate() {
                inner += rj * z.column(j);
            }
            acc += &l_u[i] * inner;
        }
        dual_expectation.set_column(c, &acc);
    }

    let mut report = Report::new();
    let thr = tol.rank().threshold(1.0);
    let mut res: f64 = 0.0;
    for (i, l) in left.iter().enumerate() {
        let lhs = &e * l * &e;
        let rhs = lt(&inc.expect(&m.basis(i))) * &e;
        res = res.max(max_abs(&(lhs - rhs)));
    }
    report.record("e m e = E(m) e", res, thr);
    report.record("e = e² = e*", max_abs(&(&e * &e - &e)).max(max_abs(&(e.adjoint() - &e))), thr);
    let mut res: f64 = 0.0;
    for (k, word) in words.iter().enumerate() {
        let (i, j) = (k / stars.len(), k % stars.len());
        let got = &dual_expectation * coords_in(&operators, word);
        let want = m.mul(&ind_inv, &m.mul(&m.basis(i), &stars[j]));
        res = res.max(max_abs_vec(&(got - want)));
    }
    report.record("E_C(x e y) = (Ind E)⁻¹ x y", res, thr);
    let ind_rank = rank(&Mat::from_columns(&words.iter().map(vectorize).collect::<Vec<_>>()), tol.rank());
    report.flag("dim C = rank of the quasibasis words", ind_rank == operators.len());
    Ok(BasicConstruction { operators, embedding, jones, dual_expectation, report })
}

/// `N ⊂ M ⊂ M₂ ⊂ M₃`. `M₂` acts on the space of `M` and `M₃` on the space
/// of `M₂`.
#[derive(Debug, Clone)]
pub struct TowerData {
    pub inclusion: InclusionData,
    pub m2: BasicConstruction,
    /// `M₂` with structure constants.
    pub m2_algebra: FdAlgebra,
    /// `M ⊂ M₂` with `E₂`.
    pub upper: InclusionData,
    pub m3: BasicConstruction,
    pub derived: DerivedTower,
    pub report: Report,
}

/// Relative commutants, each an orthonormal family in the coordinates of
/// the ambient algebra.
#[derive(Debug, Clone)]
pub struct DerivedTower {
    /// `N'∩M` in `M`.
    pub n_m: Vec<Vector>,
    /// `N'∩M₂` in `M₂`.
    pub n_m2: Vec<Vector>,
    /// `N'∩M₃` in `M₃`.
    pub n_m3: Vec<Vector>,
    /// `M'∩M₂` in `M₂`.
    pub m_m2: Vec<Vector>,
    /// `M'∩M₃` in `M₃`.
    pub m_m3: Vec<Vector>,
}

impl DerivedTower {
    /// `(dim N'∩M, dim N'∩M₂, dim N'∩M₃)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n_m.len(), self.n_m2.len(), self.n_m3.len())
    }
}

impl TowerData {
    /// `N` in the coordinates of `M₂`.
    pub fn n_in_m2(&self) -> Vec<Vector> {
        self.inclusion.n_basis().iter().map(|x| self.m2.embed(x)).collect()
    }

    /// Elements of `M₂` in the coordinates of `M₃`.
    pub fn m2_in_m3(&self, xs: &[Vector]) -> Vec<Vector> {
        xs.iter().map(|x| self.m3.embed(x)).collect()
    }

    pub fn n_m2_algebra(&self, tol: Tolerance) -> Result<FdAlgebra> {
        Ok(self.m2_algebra.subalgebra(&self.derived.n_m2, tol)?.0)
    }

    pub fn m_m3_algebra(&self, tol: Tolerance) -> Result<FdAlgebra> {
        let ops: Vec<Mat> = self.derived.m_m3.iter().map(|x| self.m3.operator(x)).collect();
        FdAlgebra::from_matrix_basis(&ops, true, tol)
    }
}

/// A pseudo-random `x` with `x*`, which generate a C*-algebra generically;
/// the full basis if they do not.
fn generators(alg: &FdAlgebra, tol: Tolerance) -> Vec<Vector> {
    let n = alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let x = Vector::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    if let Ok(xs) = alg.star(&x) {
        let gens = vec![x, xs];
        if matches!(alg.generated_subalgebra(&gens, tol), Ok(b) if b.len() == n) {
            return gens;
        }
    }
    (0..n).map(|i| alg.basis(i)).collect()
}

/// Two basic constructions and the derived tower.
pub fn jones_tower(inc: &InclusionData, tol: Tolerance) -> Result<TowerData> {
    let m2 = basic_construction(inc, tol)?;
    let m2_algebra = m2.algebra(tol)?;
    let m_in_m2 = columns(&m2.embedding);
    let upper = InclusionData::new(m2_algebra.clone(), &m_in_m2, m2.expectation_in_c(), None, tol)?;
    let m3 = basic_construction(&upper, tol)?;

    let n_gens: Vec<Vector> = generators(&inc.n, tol).iter().map(|y| inc.from_n(y)).collect();
    let m_gens = generators(&inc.m, tol);
    let n_in_m2: Vec<Vector> = n_gens.iter().map(|x| m2.embed(x)).collect();
    let n_in_m3: Vec<Vector> = n_in_m2.iter().map(|x| m3.embed(x)).collect();
    let m_in_m3: Vec<Vector> = m_gens.iter().map(|x| m3.embed(&m2.embed(x))).collect();
    let derived = DerivedTower {
        n_m: inc.m.commutant(&n_gens, None, tol),
        n_m2: m2_algebra.commutant(&n_in_m2, None, tol),
        n_m3: m3.commutant(&n_in_m3, tol),
        m_m2: m2_algebra.commutant(&m_in_m2, None, tol),
        m_m3: m3.commutant(&m_in_m3, tol),
    };
    let mut report = Report::new();
    report.merge("M₂", m2.report.clone());
    report.merge("M₃", m3.report.clone());
    let e2 = m3.operator(&m3.jones);
    let mut res: f64 = 0.0;
    for x in &m_in_m3 {
        let xo = m3.operator(x);
        res = res.max(max_abs(&(&e2 * &xo - &xo * &e2)));
    }
    report.record("e₂ ∈ M'∩M₃", res, tol.rank().threshold(1.0));
    Ok(TowerData { inclusion: inc.clone(), m2, m2_algebra, upper, m3, derived, report })
}

/// Certificate of the span test `(N'∩M₂) e₂ (N'∩M₂) = N'∩M₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct Depth2Certificate {
    pub spanned: usize,
    pub relative_commutant: usize,
    pub holds: bool,
}

/// The derived tower is a basic construction with Jones projection `e₂`.
pub fn depth2_check(t: &TowerData, tol: Tolerance) -> Depth2Certificate {
    let m3 = &t.m3;
    let a: Vec<Mat> = t.m2_in_m3(&t.derived.n_m2).iter().map(|x| m3.operator(x)).collect();
    let e2 = m3.operator(&m3.jones);
    // the products lie in N'∩M₃; compare ranks inside it
    let target: Vec<Mat> = t.derived.n_m3.iter().map(|x| m3.operator(x)).collect();
    let mut proj = Mat::zeros(target.len(), a.len() * a.len());
    let mut col = 0;
    for x in &a {
        let xe = x * &e2;
        for y in &a {
            proj.set_column(col, &coords_in(&target, &(&xe * y)));
            col += 1;
        }
    }
    let spanned = rank(&proj, tol.rank());
    Depth2Certificate { spanned, relative_commutant: target.len(), holds: spanned == target.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::inclusion::{diagonal_in_matrix, scalars_in};

    #[test]
    fn diagonal_in_m2_derived_tower() {
        let tol = Tolerance::default();
        let t = jones_tower(&diagonal_in_matrix(2, tol).unwrap(), tol).unwrap();
        assert!(t.report.passed(), "{}", t.report);
        assert_eq!(t.m2.dim(), 8);
        assert_eq!(t.derived.dims(), (2, 4, 8));
        assert!(depth2_check(&t, tol).holds);
    }

    #[test]
    fn scalars_in_m2_derived_tower() {
        let tol = Tolerance::default();
        let t = jones_tower(&scalars_in(&FdAlgebra::matrix_algebra(2), tol).unwrap(), tol).unwrap();
        assert!(t.report.passed(), "{}", t.report);
        assert_eq!(t.derived.dims(), (4, 16, 64));
        assert!(depth2_check(&t, tol).holds);
    }

    #[test]
    fn identity_inclusion_is_trivial() {
        let tol = Tolerance::default();
        let m = FdAlgebra::matrix_algebra(2);
        let all: Vec<Vector> = (0..4).map(|i| m.basis(i)).collect();
        let inc = InclusionData::new(m, &all, Mat::identity(4, 4), None, tol).unwrap();
        let b = basic_construction(&inc, tol).unwrap();
        assert_eq!(b.dim(), 4);
        let alg = b.algebra(tol).unwrap();
        assert!(max_abs_vec(&(&b.jones - alg.unit())) < 1e-9);
    }

    fn label(w: &crate::wha::WhaData, name: &str) -> usize {
        w.labels().iter().position(|l| l == name).unwrap()
    }

    #[test]
    fn normal_subgroup_is_depth_two() {
        let tol = Tolerance::default();
        let s3 = crate::constructors::fixtures::ks3();
        let z3 = [label(&s3, "p123"), label(&s3, "p231"), label(&s3, "p312")];
        let inc = crate::reconstruct::inclusion::subgroup_inclusion(s3.algebra(), &z3, tol).unwrap();
        let t = jones_tower(&inc, tol).unwrap();
        assert!(t.report.passed(), "{}", t.report);
        assert!(depth2_check(&t, tol).holds);
    }

    #[test]
    fn non_normal_subgroup_is_not_depth_two() {
        let tol = Tolerance::default();
        let s3 = crate::constructors::fixtures::ks3();
        let inc = crate::reconstruct::inclusion::subgroup_inclusion(
            s3.algebra(),
            &[label(&s3, "p123"), label(&s3, "p213")],
            tol,
        )
        .unwrap();
        let t = jones_tower(&inc, tol).unwrap();
        assert!(t.report.passed(), "{}", t.report);
        let c = depth2_check(&t, tol);
        assert!(!c.holds, "{c:?}");
    }
}
