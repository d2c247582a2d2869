//! Reconstruction of a C*-weak Hopf algebra from a depth-2 inclusion.

pub mod amp;
pub mod inclusion;
pub mod iso;
pub mod pairing;
pub mod rigidity;
pub mod tower;

pub use inclusion::{
    diagonal_in_matrix, find_expectation, frame_quasibasis, inclusion_from_action, inclusion_matrix, markov_weights,
    scalars_in, subgroup_inclusion, InclusionData,
};
pub use iso::{find_isomorphism, morphism_residual};
pub use pairing::{build_pairing, extract_wha, reconstruction_axioms, Extracted, ForkReport, PairingData};
pub use rigidity::{standard_rigidity, standard_traces, Rigidity, Sector, Setting, ZNormalization};
pub use tower::{
    basic_construction, depth2_check, jones_tower, BasicConstruction, Depth2Certificate, DerivedTower, TowerData,
};

use crate::actions::{
    crossed_product, invariant_subalgebra, regularity_report, verify_module_algebra, ActionData, Invariants,
    ModuleAlgebraReport, Regularity,
};
use crate::algebra::Subspace;
use crate::linalg::{columns, Mat, Tensor3, Tolerance};
use crate::report::Report;
use crate::wha::WhaData;
use crate::{Error, Result};
use amp::cell_coords;
use rigidity::N_OBJ;

/// Everything produced by [`reconstruct`].
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub tower: TowerData,
    pub depth2: Depth2Certificate,
    pub rigidity: Rigidity,
    pub z: Mat,
    pub pairing: PairingData,
    pub extracted: Extracted,
    /// `A ≅ N'∩M₂` acting on `M`.
    pub action: ActionData,
    /// The action needed the co-opposite coproduct of `A`.
    pub co_opposite: bool,
    pub module: ModuleAlgebraReport,
    pub invariants: Invariants,
    pub regularity: Regularity,
    pub report: Report,
}

impl Reconstruction {
    /// The reconstructed symmetry, with the coproduct that acts on `M`.
    pub fn wha(&self) -> &WhaData {
        &self.action.wha
    }
}

/// `a ▷ m = Σ_ij v_i* a_ij E_R(v_j m)` for `a = [a_ij] ∈ End(ῑ∘ι)`, where
/// `R̄ = (v_i)_i` and `E_R(x) = R* ῑ(x) R` come from the solution used by the
/// pairing. The quasibasis solution gives `Σ_ij u_i a_ij E(u_j* m)`.
pub fn action_on_m(rig: &Rigidity, a: &WhaData, a_basis: &[Mat]) -> Result<ActionData> {
    let setting = &rig.setting;
    let inc = &setting.inclusion;
    let m = &inc.m;
    let d = m.dim();
    let k = setting.k();
    let cat = &setting.cat;
    let (nobj, mobj) = (&cat.objs[N_OBJ], &cat.objs[rigidity::M_OBJ]);
    let (dn, dm) = (nobj.dim, mobj.dim);
    let v: Vec<_> = (0..k).map(|i| mobj.elem(&rig.r_bar.view((i * dm, 0), (dm, dm)).into_owned())).collect();
    let vs: Vec<_> = v.iter().map(|x| m.star(x)).collect::<Result<_>>()?;
    let mut act = Tensor3::zeros(a.dim(), d, d);
    for j in 0..d {
        let x = m.basis(j);
        let ev: Vec<_> = v
            .iter()
            .map(|vj| {
                let e = rig.r.adjoint() * cat.eval_elem(&setting.iota_bar, &m.mul(vj, &x)) * &rig.r;
                inc.from_n(&nobj.elem(&e))
            })
            .collect();
        for (i, ai) in a_basis.iter().enumerate() {
            let mut out = crate::linalg::Vector::zeros(d);
            for (r, vr) in vs.iter().enumerate() {
                for (c, e) in ev.iter().enumerate() {
                    let block = ai.view((r * dn, c * dn), (dn, dn)).into_owned();
                    let n = inc.from_n(&nobj.elem(&block));
                    out += m.mul3(vr, &n, e);
                }
            }
            for (p, val) in out.iter().enumerate() {
                act.set(i, j, p, *val);
            }
        }
    }
    ActionData::new(a.clone(), m.clone(), act)
}

/// The same algebra with `Δ^cop` and `S⁻¹`.
pub fn co_opposite(w: &WhaData) -> Result<WhaData> {
    let s_inv = w
        .require_antipode()?
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("antipode is not invertible".into()))?;
    WhaData::from_algebra(
        Some(w.labels().to_vec()),
        w.algebra().clone(),
        w.comult().flip_last(),
        w.counit().clone(),
        Some(s_inv),
    )
}

fn first_axiom_failure(r: &Report) -> Option<Error> {
    r.first_failure().map(|c| Error::AxiomViolation { axiom: c.name.clone(), residual: c.residual })
}

/// Tower, depth 2, rigidity, pairing and extraction, followed by the action
/// of `A ≅ N'∩M₂` on `M` and its regularity.
pub fn reconstruct(inc: &InclusionData, tol: Tolerance) -> Result<Reconstruction> {
    let tower = jones_tower(inc, tol)?;
    let depth2 = depth2_check(&tower, tol);
    if !depth2.holds {
        return Err(Error::NotDepth2(format!(
            "(N'∩M₂)e₂(N'∩M₂) spans {} of the {} dimensions of N'∩M₃",
            depth2.spanned, depth2.relative_commutant
        )));
    }
    let mut report = Report::new();
    report.merge("tower", tower.report.clone());
    let setting = Setting::new(inc, tol)?;
    let rig = standard_rigidity(&setting, tol)?;
    report.merge("rigidity", rig.report.clone());
    report.merge("traces", standard_traces(&rig, tol));
    let z = rig.solve_z(ZNormalization::MatrixTrace);
    let pairing = build_pairing(&rig, &z, tol)?;
    let extracted = extract_wha(&rig, &pairing, tol)?;
    if let Some(e) = first_axiom_failure(&extracted.report) {
        return Err(e);
    }
    report.merge("extract", extracted.report.clone());
    let (da, db) = (extracted.a.dim(), extracted.b.dim());
    report.flag("dim A = dim N'∩M₂", da == tower.derived.n_m2.len());
    report.flag("dim B = dim M'∩M₃", db == tower.derived.m_m3.len());

    // A^L is the image of End ι ≅ N'∩M under t ↦ ῑ⊗t
    let cat = &setting.cat;
    let end_iota = cat.hom(&setting.iota, &setting.iota, tol)?;
    let image: Vec<_> = end_iota
        .iter()
        .map(|t| cell_coords(&pairing.a_basis, &cat.hor(&cat.one(&setting.iota_bar), t, &setting.iota_bar), tol))
        .collect::<Result<_>>()?;
    let a = &extracted.a;
    let al = Subspace::new(da, &columns(a.pi_l()), tol);
    let ar = Subspace::new(da, &columns(a.pi_r()), tol);
    let img = Subspace::new(da, &image, tol);
    report.flag("dim A^L = dim N'∩M", al.dim() == tower.derived.n_m.len());
    report.record(
        "image of N'∩M = A^L or A^R",
        img.distance_to(&al).min(img.distance_to(&ar)),
        tol.rank().threshold(1.0),
    );

    let mut action = action_on_m(&rig, a, &pairing.a_basis)?;
    let mut module = verify_module_algebra(&action, tol);
    let mut co_op = false;
    if !module.passed() {
        let alt = ActionData::new(co_opposite(a)?, action.algebra.clone(), action.act.clone())?;
        let alt_module = verify_module_algebra(&alt, tol);
        if alt_module.passed() {
            action = alt;
            module = alt_module;
            co_op = true;
        }
    }
    report.merge("action", module.report.clone());
    let invariants = invariant_subalgebra(&action, tol)?;
    let n_sub = Subspace::new(inc.m.dim(), &inc.n_basis(), tol);
    let inv_sub = Subspace::new(inc.m.dim(), &invariants.basis, tol);
    report.record("M^A = N", inv_sub.distance_to(&n_sub), tol.rank().threshold(1.0));
    let cp = crossed_product(&action, tol)?;
    let regularity = regularity_report(&action, &cp, tol)?;
    report.merge("regularity", regularity.conditions.clone());
    Ok(Reconstruction {
        tower,
        depth2,
        rigidity: rig,
        z,
        pairing,
        extracted,
        action,
        co_opposite: co_op,
        module,
        invariants,
        regularity,
        report,
    })
}
