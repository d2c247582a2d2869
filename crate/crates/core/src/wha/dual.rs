use crate::error::{Error, Result};
use crate::linalg::Tensor3;

use super::{Element, Functional, WhaData};

/// The dual weak bialgebra on the dual basis `δ_i`.
///
/// Products and coproducts are transposed, unit and counit swap, the
/// antipode is transposed, and the star is `⟨φ*, a⟩ = conj⟨φ, S(a)*⟩`.
pub fn dual_wha(a: &WhaData) -> Result<WhaData> {
    let n = a.dim();
    let mut mult = Tensor3::zeros(n, n, n);
    for (k, i, j, v) in a.comult().triples() {
        mult.set(i, j, k, v);
    }
    let mut comult = Tensor3::zeros(n, n, n);
    for (j, k, i, v) in a.mult().triples() {
        comult.set(i, j, k, v);
    }
    let antipode = a.antipode().map(|s| s.transpose());
    let star = match (a.star_matrix(), a.antipode()) {
        (Some(sigma), Some(s)) => Some((sigma.conjugate() * s).transpose()),
        (Some(_), None) => return Err(Error::MissingAntipode),
        (None, _) => None,
    };
    let labels = a.labels().iter().map(|l| format!("δ_{l}")).collect();
    WhaData::new(Some(labels), mult, a.counit().clone(), comult, a.unit().clone(), antipode, star)
}

/// Direction of a Sweedler arrow acting on functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `b ⇀ φ`, with `⟨b⇀φ, a⟩ = ⟨φ, ab⟩`.
    Left,
    /// `φ ↼ a`, with `⟨φ↼a, b⟩ = ⟨φ, ab⟩`.
    Right,
}

/// Action of an element on a functional by a Sweedler arrow.
pub fn sweedler_act(a: &WhaData, side: Side, x: &Element, phi: &Functional) -> Functional {
    match side {
        Side::Left => a.algebra().right_matrix(x).transpose() * phi,
        Side::Right => a.algebra().left_matrix(x).transpose() * phi,
    }
}

/// `φ ⇀ a = a₍₁₎⟨φ, a₍₂₎⟩`.
pub fn sweedler_act_on_algebra(a: &WhaData, phi: &Functional, x: &Element) -> Element {
    a.coproduct(x) * phi
}

/// Alias of [`sweedler_act_on_algebra`].
pub fn functional_arrow_left(a: &WhaData, phi: &Functional, x: &Element) -> Element {
    sweedler_act_on_algebra(a, phi, x)
}

/// `a ↼ φ = ⟨φ, a₍₁₎⟩a₍₂₎`.
pub fn functional_arrow_right(a: &WhaData, x: &Element, phi: &Functional) -> Element {
    a.coproduct(x).transpose() * phi
}
