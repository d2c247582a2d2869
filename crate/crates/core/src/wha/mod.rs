//! Weak bialgebras and weak Hopf algebras given by structure constants.
//!
//! Elements are coordinate vectors in the basis `e_i`; functionals are
//! coordinate vectors in the dual basis, paired with elements by the
//! bilinear `⟨φ, a⟩ = Σ φ_i a_i`. Elements of `A⊗A` are `n×n` matrices
//! `T` with `T_{jk}` the coefficient of `e_j⊗e_k`.

mod antipode;
mod cstar;
mod dual;
mod subalgebras;
mod verify;

pub use antipode::{
    antipode_axiom_residuals, convolve, solve_antipode, solve_left_convolution, verify_antipode_properties,
};
pub use cstar::{
    canonical_grouplike, haar_integral, haar_properties, modular_and_kac_check, modular_residual, verify_cstar,
    Grouplike, KacReport,
};
pub use dual::{dual_wha, functional_arrow_left, functional_arrow_right, sweedler_act, sweedler_act_on_algebra, Side};
pub use subalgebras::{counital_subalgebras, source_target_maps, CounitalSubalgebras};
pub use verify::{verify_weak_bialgebra, VerificationReport};

use crate::algebra::FdAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Tensor3, Vector, C64, ZERO};

/// Coordinates of an element.
pub type Element = Vector;
/// Coordinates of a functional in the dual basis.
pub type Functional = Vector;

/// A finite-dimensional weak bialgebra, optionally with antipode and star.
#[derive(Debug, Clone)]
pub struct WhaData {
    labels: Vec<String>,
    alg: FdAlgebra,
    comult: Tensor3,
    counit: Vector,
    antipode: Option<Mat>,
    pi_l: Mat,
    pi_r: Mat,
}

impl WhaData {
    /// Assembles a weak bialgebra from its structure constants. Only shapes
    /// are checked here; axioms are checked by [`verify_weak_bialgebra`].
    pub fn new(
        labels: Option<Vec<String>>,
        mult: Tensor3,
        unit: Vector,
        comult: Tensor3,
        counit: Vector,
        antipode: Option<Mat>,
        star: Option<Mat>,
    ) -> Result<Self> {
        let alg = FdAlgebra::new(mult, unit, star)?;
        WhaData::from_algebra(labels, alg, comult, counit, antipode)
    }

    pub fn from_algebra(
        labels: Option<Vec<String>>,
        alg: FdAlgebra,
        comult: Tensor3,
        counit: Vector,
        antipode: Option<Mat>,
    ) -> Result<Self> {
        let n = alg.dim();
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if comult.dims() != [n, n, n] {
            return Err(Error::DimensionMismatch(format!("comultiplication tensor has shape {:?}", comult.dims())));
        }
        if counit.len() != n {
            return Err(Error::DimensionMismatch(format!("counit has length {} in dimension {n}", counit.len())));
        }
        if let Some(s) = &antipode {
            if s.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!("antipode matrix has shape {:?}", s.shape())));
            }
        }
        if !comult.is_finite() || counit.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite structure constants".into()));
        }
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(l) => {
                return Err(Error::DimensionMismatch(format!("{} labels for dimension {n}", l.len())));
            }
            None => (0..n).map(|i| format!("e{i}")).collect(),
        };
        let mut w = WhaData { labels, alg, comult, counit, antipode, pi_l: Mat::zeros(0, 0), pi_r: Mat::zeros(0, 0) };
        w.pi_l = w.compute_pi_l();
        w.pi_r = w.compute_pi_r();
        Ok(w)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.alg
    }

    pub fn mult(&self) -> &Tensor3 {
        self.alg.mult()
    }

    pub fn unit(&self) -> &Vector {
        self.alg.unit()
    }

    pub fn comult(&self) -> &Tensor3 {
        &self.comult
    }

    pub fn counit(&self) -> &Vector {
        &self.counit
    }

    pub fn antipode(&self) -> Option<&Mat> {
        self.antipode.as_ref()
    }

    pub fn star_matrix(&self) -> Option<&Mat> {
        self.alg.star_matrix()
    }

    pub fn require_antipode(&self) -> Result<&Mat> {
        self.antipode.as_ref().ok_or(Error::MissingAntipode)
    }

    pub fn with_antipode(&self, antipode: Option<Mat>) -> Result<WhaData> {
        WhaData::from_algebra(
            Some(self.labels.clone()),
            self.alg.clone(),
            self.comult.clone(),
            self.counit.clone(),
            antipode,
        )
    }

    pub fn with_star(&self, star: Option<Mat>) -> Result<WhaData> {
        let alg = self.alg.clone().with_star(star)?;
        WhaData::from_algebra(
            Some(self.labels.clone()),
            alg,
            self.comult.clone(),
            self.counit.clone(),
            self.antipode.clone(),
        )
    }

    pub fn with_counit(&self, counit: Vector) -> Result<WhaData> {
        WhaData::from_algebra(
            Some(self.labels.clone()),
            self.alg.clone(),
            self.comult.clone(),
            counit,
            self.antipode.clone(),
        )
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<WhaData> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} labels for dimension {}", labels.len(), self.dim())));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn basis(&self, i: usize) -> Element {
        self.alg.basis(i)
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        self.alg.mul(x, y)
    }

    pub fn star(&self, x: &Element) -> Result<Element> {
        self.alg.star(x)
    }

    pub fn apply_antipode(&self, x: &Element) -> Result<Element> {
        Ok(self.require_antipode()? * x)
    }

    pub fn counit_of(&self, x: &Element) -> C64 {
        self.counit.dot(x)
    }

    /// `Δ(x)` as an `n×n` coefficient matrix.
    pub fn coproduct(&self, x: &Element) -> Mat {
        let n = self.dim();
        let mut t = Mat::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if *xi != ZERO {
                t += self.comult.slice(i) * *xi;
            }
        }
        t
    }

    pub fn delta_one(&self) -> Mat {
        self.coproduct(self.unit())
    }

    /// Product in `A⊗A`.
    pub fn tensor_mul(&self, t: &Mat, u: &Mat) -> Mat {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for j in 0..n {
            // W_j = Σ_k t_jk L_kᵀ
            let mut w = Mat::zeros(n, n);
            let mut any = false;
            for k in 0..n {
                let c = t[(j, k)];
                if c != ZERO {
                    w += self.alg.basis_left(k).transpose() * c;
                    any = true;
                }
            }
            if any {
                out += self.alg.basis_left(j) * u * w;
            }
        }
        out
    }

    /// `m(T) = Σ T_{jk} e_j e_k`.
    pub fn multiply_tensor(&self, t: &Mat) -> Element {
        let n = self.dim();
        let mut out = Vector::zeros(n);
        for j in 0..n {
            let l = self.alg.basis_left(j);
            for k in 0..n {
                let c = t[(j, k)];
                if c != ZERO {
                    out.axpy(c, &l.column(k).into_owned(), crate::linalg::ONE);
                }
            }
        }
        out
    }

    /// Matrix `E_{ab} = ε(e_a e_b)`.
    pub fn counit_form(&self) -> Mat {
        let n = self.dim();
        let mut e = Mat::zeros(n, n);
        for a in 0..n {
            let row = self.alg.basis_left(a).transpose() * &self.counit;
            for b in 0..n {
                e[(a, b)] = row[b];
            }
        }
        e
    }

    fn compute_pi_l(&self) -> Mat {
        // πL(e_i) = Σ_{jk} D_jk ε(e_j e_i) e_k
        let d = self.delta_one();
        let e = self.counit_form();
        d.transpose() * e
    }

    fn compute_pi_r(&self) -> Mat {
        // πR(e_i) = Σ_{jk} D_jk e_j ε(e_i e_k)
        let d = self.delta_one();
        let e = self.counit_form();
        d * e.transpose()
    }

    /// Matrix of `πL(a) = ε(1₍₁₎a)1₍₂₎`.
    pub fn pi_l(&self) -> &Mat {
        &self.pi_l
    }

    /// Matrix of `πR(a) = 1₍₁₎ε(a1₍₂₎)`.
    pub fn pi_r(&self) -> &Mat {
        &self.pi_r
    }

    /// `(πL(a), πR(a))`.
    pub fn counital_projections(&self, a: &Element) -> (Element, Element) {
        (&self.pi_l * a, &self.pi_r * a)
    }

    /// Matrix of the source map `s(l) = 1₍₁₎ε(1₍₂₎l)` on all of `A`.
    pub fn source_matrix(&self) -> Mat {
        self.delta_one() * self.counit_form()
    }

    /// Matrix of `a ↦ a*` composed with nothing else is conjugate-linear;
    /// this returns `Σ` such that `x* = Σ conj(x)`.
    pub fn require_star(&self) -> Result<&Mat> {
        self.alg.star_matrix().ok_or(Error::MissingStar)
    }

    /// Largest entry of the structure tensors, used to scale thresholds.
    pub fn scale(&self) -> f64 {
        let m = self.mult().max_abs().max(self.comult.max_abs());
        let u = crate::linalg::max_abs_vec(self.unit()).max(crate::linalg::max_abs_vec(&self.counit));
        1f64.max(m).max(u)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::linalg::ONE;

    /// Group algebra of ℤ/2 on the basis (e, g).
    pub fn kz2() -> WhaData {
        let mult =
            Tensor3::from_triples([2, 2, 2], vec![(0, 0, 0, ONE), (0, 1, 1, ONE), (1, 0, 1, ONE), (1, 1, 0, ONE)])
                .unwrap();
        let comult = Tensor3::from_triples([2, 2, 2], vec![(0, 0, 0, ONE), (1, 1, 1, ONE)]).unwrap();
        let id = Mat::identity(2, 2);
        WhaData::new(
            Some(vec!["e".into(), "g".into()]),
            mult,
            Vector::from_vec(vec![ONE, ZERO]),
            comult,
            Vector::from_vec(vec![ONE, ONE]),
            Some(id.clone()),
            Some(id),
        )
        .unwrap()
    }

    /// Pair groupoid algebra on two objects, basis e11, e12, e21, e22.
    pub fn kp2() -> WhaData {
        let idx = |u: usize, v: usize| u * 2 + v;
        let mut m = Vec::new();
        let mut c = Vec::new();
        let mut s = Mat::zeros(4, 4);
        for u in 0..2 {
            for v in 0..2 {
                c.push((idx(u, v), idx(u, v), idx(u, v), ONE));
                s[(idx(v, u), idx(u, v))] = ONE;
                for w in 0..2 {
                    m.push((idx(u, v), idx(v, w), idx(u, w), ONE));
                }
            }
        }
        WhaData::new(
            Some(vec!["e11".into(), "e12".into(), "e21".into(), "e22".into()]),
            Tensor3::from_triples([4, 4, 4], m).unwrap(),
            Vector::from_vec(vec![ONE, ZERO, ZERO, ONE]),
            Tensor3::from_triples([4, 4, 4], c).unwrap(),
            Vector::from_element(4, ONE),
            Some(s.clone()),
            Some(s),
        )
        .unwrap()
    }
}
