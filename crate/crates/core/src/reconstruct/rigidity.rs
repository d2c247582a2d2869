//! The 1-cells `ι: N → M`, `ῑ: M → N` of an inclusion, standard solutions
//! of the conjugate equations and the standard left inverses `Ψ`.

use super::amp::{cell_algebra, cell_from_coords, Amp, Cat, Obj};
use super::inclusion::InclusionData;
use crate::algebra::DEFAULT_SEED;
use crate::linalg::{max_abs, Mat, Tolerance, Vector, C64};
use crate::report::Report;
use crate::{Error, Result};

/// Index of `N` among the objects.
pub const N_OBJ: usize = 0;
/// Index of `M` among the objects.
pub const M_OBJ: usize = 1;

/// `ι` and `ῑ(m) = [E(u_i* m u_j)]_{ij}` together with the solution
/// `R̄ = (u_i*)_i`, `R = (E(u_i*))_i` coming from the quasibasis.
#[derive(Debug, Clone)]
pub struct Setting {
    pub cat: Cat,
    pub iota: Amp,
    pub iota_bar: Amp,
    pub inclusion: InclusionData,
    pub r: Mat,
    pub r_bar: Mat,
}

impl Setting {
    pub fn new(inc: &InclusionData, tol: Tolerance) -> Result<Self> {
        let n_obj = Obj::new(inc.n.clone(), tol)?;
        let m_obj = Obj::new(inc.m.clone(), tol)?;
        let cat = Cat { objs: vec![n_obj, m_obj] };
        let (dn, dm) = (cat.objs[N_OBJ].dim, cat.objs[M_OBJ].dim);
        let m = &inc.m;
        let q = &inc.quasibasis;
        let k = q.len();
        let qs: Vec<Vector> = q.iter().map(|u| m.star(u)).collect::<Result<_>>()?;
        let iota = cat.amp_from(N_OBJ, M_OBJ, 1, |y| cat.objs[M_OBJ].rep(&inc.from_n(y)));
        let iota_bar = cat.amp_from(M_OBJ, N_OBJ, k, |x| {
            let mut out = Mat::zeros(k * dn, k * dn);
            for i in 0..k {
                for j in 0..k {
                    let e = inc.to_n(&inc.expect(&m.mul3(&qs[i], x, &q[j])));
                    out.view_mut((i * dn, j * dn), (dn, dn)).copy_from(&cat.objs[N_OBJ].rep(&e));
                }
            }
            out
        });
        let mut r_bar = Mat::zeros(k * dm, dm);
        let mut r = Mat::zeros(k * dn, dn);
        for i in 0..k {
            r_bar.view_mut((i * dm, 0), (dm, dm)).copy_from(&cat.objs[M_OBJ].rep(&qs[i]));
            let e = inc.to_n(&inc.expect(&qs[i]));
            r.view_mut((i * dn, 0), (dn, dn)).copy_from(&cat.objs[N_OBJ].rep(&e));
        }
        Ok(Setting { cat, iota, iota_bar, inclusion: inc.clone(), r, r_bar })
    }

    /// Size of the quasibasis, i.e. the size of `ῑ`.
    pub fn k(&self) -> usize {
        self.iota_bar.size
    }

    pub fn id_m(&self) -> Amp {
        self.cat.identity(M_OBJ)
    }

    pub fn id_n(&self) -> Amp {
        self.cat.identity(N_OBJ)
    }

    /// `ι∘ῑ: M → M`.
    pub fn ii(&self) -> Amp {
        self.cat.compose(&self.iota_bar, &self.iota)
    }

    /// `ῑ∘ι: N → N`.
    pub fn ji(&self) -> Amp {
        self.cat.compose(&self.iota, &self.iota_bar)
    }

    /// `ι∘ῑ∘ι: N → M`.
    pub fn iji(&self) -> Amp {
        self.cat.compose(&self.ji(), &self.iota)
    }
}

/// Residuals of the two conjugate equations for `x: X → Y`, `x̄: Y → X`,
/// `R: id_X → x̄∘x`, `R̄: id_Y → x∘x̄`.
pub fn conjugate_residuals(cat: &Cat, x: &Amp, xbar: &Amp, r: &Mat, r_bar: &Mat) -> [f64; 2] {
    let x1 = cat.one(x);
    let xb1 = cat.one(xbar);
    let xxb = cat.compose(xbar, x);
    let e1 = cat.hor(&r_bar.adjoint(), &x1, &xxb) * cat.hor(&x1, r, x);
    let id_src = cat.identity(x.src);
    let e2 = cat.hor(&xb1, &r_bar.adjoint(), xbar) * cat.hor(r, &xb1, &id_src);
    [max_abs(&(e1 - &x1)), max_abs(&(e2 - &xb1))]
}

/// One irreducible summand `ι_a` of `ι`.
#[derive(Debug, Clone)]
pub struct Sector {
    /// Multiplicity `m_a` of `ι_a` in `ι`.
    pub multiplicity: usize,
    /// `d_a` with `R̄_a*R̄_a = d_a P_{a^L}` and `R_a*R_a = d_a P_{a^R}`.
    pub dim: f64,
    /// Summand of `M` on which `R̄_a*R̄_a` lives.
    pub left_vacuum: usize,
    /// Summand of `N` on which `R_a*R_a` lives.
    pub right_vacuum: usize,
    /// Minimal central projection of `End ι` belonging to the sector.
    pub central: Mat,
}

/// Standard `R`, `R̄` for `ι` assembled from sector solutions.
#[derive(Debug, Clone)]
pub struct Rigidity {
    pub setting: Setting,
    pub sectors: Vec<Sector>,
    pub r: Mat,
    pub r_bar: Mat,
    /// Frobenius-orthonormal basis of `End ι ≅ N'∩M`.
    pub end_iota: Vec<Mat>,
    pub report: Report,
}

fn mat_units(cat_basis: &[Mat], wed: &crate::algebra::Wedderburn) -> Vec<Vec<Mat>> {
    wed.blocks.iter().map(|b| b.units.iter().map(|u| cell_from_coords(cat_basis, u)).collect()).collect()
}

fn scale_of_projection_multiple(x: &Mat) -> f64 {
    // x = s·P for a projection P: s = tr(x²)/tr(x)
    let t = x.trace().re;
    if t.abs() < 1e-300 {
        0.0
    } else {
        (x * x).trace().re / t
    }
}

/// Decomposes `ι = ⊕ ι_a`, solves the conjugate equations on each sector
/// with balanced norms and assembles `R̄ = Σ (w_ai ⊗ w̄_ai) R̄_a`,
/// `R = Σ (w̄_ai ⊗ w_ai) R_a`.
pub fn standard_rigidity(setting: &Setting, tol: Tolerance) -> Result<Rigidity> {
    let cat = &setting.cat;
    let (iota, iota_bar) = (&setting.iota, &setting.iota_bar);
    let thr = tol.rank().threshold(1.0);
    let mut report = Report::new();
    let [c1, c2] = conjugate_residuals(cat, iota, iota_bar, &setting.r, &setting.r_bar);
    report.record("quasibasis solution of the conjugate equations", c1.max(c2), thr);

    let end_iota = cat.hom(iota, iota, tol)?;
    let end_bar = cat.hom(iota_bar, iota_bar, tol)?;
    let alg = cell_algebra(&end_iota, &cat.one(iota), tol)?;
    let alg_bar = cell_algebra(&end_bar, &cat.one(iota_bar), tol)?;
    let wed = alg.wedderburn(DEFAULT_SEED, tol)?;
    let wed_bar = alg_bar.wedderburn(DEFAULT_SEED, tol)?;
    let units = mat_units(&end_iota, &wed);
    let units_bar = mat_units(&end_bar, &wed_bar);
    let id_m = setting.id_m();
    let id_n = setting.id_n();

    let (dm, dn) = (cat.objs[M_OBJ].dim, cat.objs[N_OBJ].dim);
    let k = setting.k();
    let mut r_bar = Mat::zeros(k * dm, dm);
    let mut r = Mat::zeros(k * dn, dn);
    let mut sectors = Vec::new();
    let mut used = vec![false; wed_bar.block_count()];
    for (a, block) in wed.blocks.iter().enumerate() {
        let ma = block.size;
        let e11 = &units[a][0];
        let iota_a = cat.compress(iota, e11);
        let mut found = None;
        for (b, bb) in wed_bar.blocks.iter().enumerate() {
            if used[b] || bb.size != ma {
                continue;
            }
            let bar_a = cat.compress(iota_bar, &units_bar[b][0]);
            let xs = cat.hom(&id_m, &cat.compose(&bar_a, &iota_a), tol)?;
            let ys = cat.hom(&id_n, &cat.compose(&iota_a, &bar_a), tol)?;
            if xs.len() == 1 && ys.len() == 1 {
                found = Some((b, bar_a, xs[0].clone(), ys[0].clone()));
                break;
            }
        }
        let (b, bar_a, x, y) = found.ok_or(Error::NoConjugate(a))?;
        used[b] = true;
        let one_a = cat.one(&iota_a);
        let one_ba = cat.one(&bar_a);
        let iab = cat.compose(&bar_a, &iota_a);
        let p1 = cat.hor(&x.adjoint(), &one_a, &iab) * cat.hor(&one_a, &y, &iota_a);
        let c = one_a.dotc(&p1) / one_a.dotc(&one_a);
        let p2 = cat.hor(&one_ba, &x.adjoint(), &bar_a) * cat.hor(&y, &one_ba, &id_n);
        let c_bar = one_ba.dotc(&p2) / one_ba.dotc(&one_ba);
        report.record(
            format!("sector {a}: both conjugate equations give the same constant"),
            (c - c_bar).norm(),
            thr * (1.0 + c.norm()),
        );
        let xx = x.adjoint() * &x;
        let yy = y.adjoint() * &y;
        let (sx, sy) = (scale_of_projection_multiple(&xx), scale_of_projection_multiple(&yy));
        if c.norm() < thr || sx <= 0.0 || sy <= 0.0 {
            return Err(Error::NoConjugate(a));
        }
        let lambda = (sy / (sx * c.norm_sqr())).powf(0.25);
        let ra_bar = &x * C64::new(lambda, 0.0);
        let ra = &y / (c * lambda);
        let d_left = lambda * lambda * sx;
        let d_right = sy / (lambda * lambda * c.norm_sqr());
        report.record(format!("sector {a}: ‖R̄_a‖² = ‖R_a‖²"), (d_left - d_right).abs(), thr * d_left);
        let left_vacuum = argmax(&cat.objs[M_OBJ].central_coefficients(&xx));
        let right_vacuum = argmax(&cat.objs[N_OBJ].central_coefficients(&yy));
        for i in 0..ma {
            let w = &units[a][i * ma];
            let wb = &units_bar[b][i * ma];
            r_bar += cat.hor(w, wb, &iota_a) * &ra_bar;
            r += cat.hor(wb, w, &bar_a) * &ra;
        }
        let mut central = Mat::zeros(dm, dm);
        for i in 0..ma {
            central += &units[a][i * ma + i];
        }
        sectors.push(Sector { multiplicity: ma, dim: d_left, left_vacuum, right_vacuum, central });
    }
    let [s1, s2] = conjugate_residuals(cat, iota, iota_bar, &r, &r_bar);
    report.record("standard solution of the conjugate equations", s1.max(s2), thr);
    let rig = Rigidity { setting: setting.clone(), sectors, r, r_bar, end_iota, report };
    Ok(rig)
}

fn argmax(v: &[C64]) -> usize {
    v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(i, _)| i).unwrap_or(0)
}

/// How the central element `z ∈ End ι` is read off from `tr_a z⁻² = d_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZNormalization {
    /// `tr_a` is the matrix trace on the multiplicity space: `z_a = √(m_a/d_a)`.
    MatrixTrace,
    /// `tr_a` is normalised on the multiplicity space: `z_a = 1/√d_a`.
    NormalizedTrace,
}

impl Rigidity {
    fn cat(&self) -> &Cat {
        &self.setting.cat
    }

    /// `Ψ_ι(t) = R̄*(t ⊗ ῑ)R̄ ∈ End id_M`.
    pub fn psi1(&self, t: &Mat) -> Mat {
        let s = &self.setting;
        let one_bar = self.cat().one(&s.iota_bar);
        self.r_bar.adjoint() * self.cat().hor(t, &one_bar, &s.iota) * &self.r_bar
    }

    /// `Φ_ι(t) = R*(ῑ ⊗ t)R ∈ End id_N`.
    pub fn phi1(&self, t: &Mat) -> Mat {
        let s = &self.setting;
        let one_bar = self.cat().one(&s.iota_bar);
        self.r.adjoint() * self.cat().hor(&one_bar, t, &s.iota_bar) * &self.r
    }

    /// `tr_M ∘ Ψ_ι` and `tr_N ∘ Φ_ι` agree on `End ι`.
    pub fn trace_agreement(&self) -> f64 {
        let s = &self.setting;
        self.end_iota
            .iter()
            .map(|t| {
                (self.cat().objs[M_OBJ].center_trace(&self.psi1(t))
                    - self.cat().objs[N_OBJ].center_trace(&self.phi1(t)))
                .norm()
            })
            .fold(0.0, f64::max)
            .max(if s.k() == 0 { 1.0 } else { 0.0 })
    }

    /// Partial trace over an innermost `ι`: `End(X∘ι) → End X`.
    pub fn trace_out_iota(&self, x: &Mat, outer: &Amp) -> Mat {
        let cat = self.cat();
        let s = &self.setting;
        let lift = cat.hor(&cat.one(outer), &self.r_bar, outer);
        let xi = cat.compose(&s.iota, outer);
        lift.adjoint() * cat.hor(x, &cat.one(&s.iota_bar), &xi) * lift
    }

    /// Partial trace over an innermost `ῑ`: `End(X∘ῑ) → End X`.
    pub fn trace_out_iota_bar(&self, y: &Mat, outer: &Amp) -> Mat {
        let cat = self.cat();
        let lift = cat.hor(&cat.one(outer), &self.r, outer);
        lift.adjoint() * y * lift
    }

    /// `K'` with `Tr(K Ψ(x)) = Tr(K' x)` for `Ψ = trace_out_iota(·, outer)`.
    pub fn trace_out_iota_dual(&self, k: &Mat, outer: &Amp) -> Mat {
        let cat = self.cat();
        let s = &self.setting;
        let lift = cat.hor(&cat.one(outer), &self.r_bar, outer);
        let xi = cat.compose(&s.iota, outer);
        let c = cat.eval_blocks(&xi, &cat.one(&s.iota_bar));
        let q = c * &lift * k * lift.adjoint();
        let w = outer.width(cat);
        let mut out = Mat::zeros(w, w);
        for b in 0..q.nrows() / w {
            out += q.view((b * w, b * w), (w, w));
        }
        out
    }

    /// `K'` with `Tr(K Ψ(y)) = Tr(K' y)` for `Ψ = trace_out_iota_bar(·, outer)`.
    pub fn trace_out_iota_bar_dual(&self, k: &Mat, outer: &Amp) -> Mat {
        let cat = self.cat();
        let lift = cat.hor(&cat.one(outer), &self.r, outer);
        &lift * k * lift.adjoint()
    }

    /// `Ψ_{12}: End(ι∘ῑ) → End id_M`.
    pub fn psi12(&self, y: &Mat) -> Mat {
        let inner = self.trace_out_iota_bar(y, &self.setting.iota);
        self.psi1(&inner)
    }

    /// `Ψ_3: End(ι∘ῑ∘ι) → End(ι∘ῑ)`.
    pub fn psi3(&self, x: &Mat) -> Mat {
        self.trace_out_iota(x, &self.setting.ii())
    }

    /// `Ψ_{123}: End(ι∘ῑ∘ι) → End id_M`.
    pub fn psi123(&self, x: &Mat) -> Mat {
        self.psi12(&self.psi3(x))
    }

    pub fn tr_m(&self, c: &Mat) -> C64 {
        self.cat().objs[M_OBJ].center_trace(c)
    }

    /// The central `z ∈ End ι` with `z|_a = z_a` read off from `tr_a z⁻² = d_a`.
    pub fn solve_z(&self, norm: ZNormalization) -> Mat {
        let dm = self.cat().objs[M_OBJ].dim;
        let mut z = Mat::zeros(dm, dm);
        for s in &self.sectors {
            let za = match norm {
                ZNormalization::MatrixTrace => (s.multiplicity as f64 / s.dim).sqrt(),
                ZNormalization::NormalizedTrace => 1.0 / s.dim.sqrt(),
            };
            z += &s.central * C64::new(za, 0.0);
        }
        z
    }

    /// `tr_a z⁻²` per sector, with the matrix trace on the multiplicity space.
    pub fn z_traces(&self, z: &Mat) -> Result<Vec<f64>> {
        let zinv = z.clone().try_inverse().ok_or(Error::NotPositive { min_eigenvalue: 0.0 })?;
        let z2 = &zinv * &zinv;
        Ok(self
            .sectors
            .iter()
            .map(|s| {
                // tr_a over the multiplicity space: divide the ambient trace by the rank of e_11
                let ambient = (&s.central * &z2).trace().re;
                let rank_e11 = s.central.trace().re / s.multiplicity as f64;
                ambient / rank_e11
            })
            .collect())
    }
}

/// Checks of the standard traces: `tr_M Ψ = tr_N Φ` on `End ι` and the
/// sector formula `Ψ_ι(t) = Σ_a Tr_a(t) d_a P_{a^L}`.
pub fn standard_traces(rig: &Rigidity, tol: Tolerance) -> Report {
    let mut r = Report::new();
    let thr = tol.rank().threshold(1.0);
    r.record("tr_M Ψ_ι = tr_N Φ_ι on End ι", rig.trace_agreement(), thr);
    let cat = &rig.setting.cat;
    let pm = cat.objs[M_OBJ].central_projections();
    let mut worst: f64 = 0.0;
    for t in &rig.end_iota {
        let mut expect = Mat::zeros(pm[0].nrows(), pm[0].ncols());
        for s in &rig.sectors {
            let rank_e11 = s.central.trace().re / s.multiplicity as f64;
            let tr_a = (&s.central * t).trace() / rank_e11;
            expect += &pm[s.left_vacuum] * (tr_a * s.dim);
        }
        worst = worst.max(max_abs(&(rig.psi1(t) - expect)));
    }
    r.record("Ψ_ι(t) = Σ_a Tr_a(t) d_a P_{a^L}", worst, thr);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FdAlgebra;
    use crate::reconstruct::inclusion::{diagonal_in_matrix, scalars_in};

    #[test]
    fn quasibasis_gives_a_solution() {
        let tol = Tolerance::default();
        let inc = diagonal_in_matrix(2, tol).unwrap();
        let s = Setting::new(&inc, tol).unwrap();
        let [a, b] = conjugate_residuals(&s.cat, &s.iota, &s.iota_bar, &s.r, &s.r_bar);
        assert!(a < 1e-9 && b < 1e-9, "{a} {b}");
    }

    #[test]
    fn diagonal_inclusion_has_two_sectors_of_dimension_one() {
        let tol = Tolerance::default();
        let inc = diagonal_in_matrix(2, tol).unwrap();
        let rig = standard_rigidity(&Setting::new(&inc, tol).unwrap(), tol).unwrap();
        assert!(rig.report.passed(), "{}", rig.report);
        assert_eq!(rig.sectors.len(), 2);
        for s in &rig.sectors {
            assert_eq!(s.multiplicity, 1);
            assert!((s.dim - 1.0).abs() < 1e-9);
        }
        assert!(standard_traces(&rig, tol).passed());
    }

    #[test]
    fn scalars_in_m2_have_one_sector_of_multiplicity_two() {
        let tol = Tolerance::default();
        let inc = scalars_in(&FdAlgebra::matrix_algebra(2), tol).unwrap();
        let rig = standard_rigidity(&Setting::new(&inc, tol).unwrap(), tol).unwrap();
        assert!(rig.report.passed(), "{}", rig.report);
        assert_eq!(rig.sectors.len(), 1);
        assert_eq!(rig.sectors[0].multiplicity, 2);
        assert!((rig.sectors[0].dim - 1.0).abs() < 1e-9);
        let one = Mat::identity(2, 2);
        assert!((rig.tr_m(&rig.psi1(&one)).re - 2.0).abs() < 1e-9);
        assert!(standard_traces(&rig, tol).passed());
    }

    #[test]
    fn trace_densities_match_direct_evaluation() {
        let tol = Tolerance::default();
        let inc = diagonal_in_matrix(2, tol).unwrap();
        let rig = standard_rigidity(&Setting::new(&inc, tol).unwrap(), tol).unwrap();
        let s = &rig.setting;
        let (ii, iji) = (s.ii(), s.iji());
        let w = ii.width(&s.cat);
        let k = Mat::from_fn(w, w, |i, j| C64::new((i + 2 * j) as f64, (i * j % 3) as f64));
        let x =
            Mat::from_fn(iji.width(&s.cat), iji.width(&s.cat), |i, j| C64::new((i * j) as f64 * 0.1, 1.0 - j as f64));
        let direct = (&k * rig.psi3(&x)).trace();
        let dual = (rig.trace_out_iota_dual(&k, &ii) * &x).trace();
        assert!((direct - dual).norm() < 1e-9, "{direct} {dual}");
        let y = Mat::from_fn(w, w, |i, j| C64::new(i as f64 - j as f64, 0.5));
        let k1 = Mat::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, j as f64));
        let direct = (&k1 * rig.trace_out_iota_bar(&y, &s.iota)).trace();
        let dual = (rig.trace_out_iota_bar_dual(&k1, &s.iota) * &y).trace();
        assert!((direct - dual).norm() < 1e-9, "{direct} {dual}");
    }
}
