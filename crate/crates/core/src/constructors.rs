//! Groupoid algebras, direct sums and the built-in fixtures.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Tensor3, Vector, ONE};
use crate::wha::WhaData;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// A finite groupoid given by its full composition and inverse tables.
///
/// `compose` lists `(g, h, gh)` for every pair with `src(g) = tgt(h)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupoidData {
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    pub compose: Vec<(String, String, String)>,
    pub inverse: Vec<(String, String)>,
}

/// Outcome of [`validate_groupoid`]; `violations` is empty iff valid.
#[derive(Debug, Clone)]
pub struct GroupoidReport {
    pub objects: usize,
    pub morphisms: usize,
    /// Identity morphism per object, in object order, where found.
    pub identities: Vec<Option<String>>,
    pub violations: Vec<String>,
}

impl GroupoidReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn units(&self) -> usize {
        self.identities.iter().filter(|i| i.is_some()).count()
    }
}

impl GroupoidData {
    /// A group as a one-object groupoid; `table[i][j]` is the index of
    /// `g_i g_j`.
    pub fn group(names: &[&str], table: &[Vec<usize>]) -> Self {
        let obj = "*".to_string();
        let morphisms =
            names.iter().map(|n| Morphism { id: n.to_string(), src: obj.clone(), tgt: obj.clone() }).collect();
        let mut compose = Vec::new();
        let mut inverse = Vec::new();
        let e = (0..names.len()).find(|&i| (0..names.len()).all(|j| table[i][j] == j)).unwrap_or(0);
        for i in 0..names.len() {
            for j in 0..names.len() {
                compose.push((names[i].to_string(), names[j].to_string(), names[table[i][j]].to_string()));
                if table[i][j] == e {
                    inverse.push((names[i].to_string(), names[j].to_string()));
                }
            }
        }
        GroupoidData { objects: vec![obj], morphisms, compose, inverse }
    }

    /// The cyclic group ℤ/n with elements `e, g, g2, …`.
    pub fn cyclic(n: usize) -> Self {
        let names: Vec<String> = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{i}"),
            })
            .collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        GroupoidData::group(&refs, &table)
    }

    /// The symmetric group on three letters, elements named by the image
    /// of `(1, 2, 3)`; products compose right to left.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let names: Vec<String> = perms.iter().map(|p| format!("p{}{}{}", p[0] + 1, p[1] + 1, p[2] + 1)).collect();
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table: Vec<Vec<usize>> =
            perms.iter().map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        GroupoidData::group(&refs, &table)
    }

    /// The pair groupoid on `n` objects `1..=n`; the morphism `v → u` is
    /// named `e{u}{v}` (separated by `_` when `n > 9`).
    pub fn pair(n: usize) -> Self {
        let objects: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let name = |u: usize, v: usize| if n > 9 { format!("e{u}_{v}") } else { format!("e{u}{v}") };
        let mut morphisms = Vec::new();
        let mut compose = Vec::new();
        let mut inverse = Vec::new();
        for u in 1..=n {
            for v in 1..=n {
                morphisms.push(Morphism { id: name(u, v), src: v.to_string(), tgt: u.to_string() });
                inverse.push((name(u, v), name(v, u)));
                for w in 1..=n {
                    compose.push((name(u, v), name(v, w), name(u, w)));
                }
            }
        }
        GroupoidData { objects, morphisms, compose, inverse }
    }

    /// Disjoint union; ids of the second groupoid get the suffix `'`.
    pub fn disjoint_union(&self, other: &GroupoidData) -> GroupoidData {
        let p = |s: &String| format!("{s}'");
        let mut out = self.clone();
        out.objects.extend(other.objects.iter().map(p));
        out.morphisms.extend(other.morphisms.iter().map(|m| Morphism { id: p(&m.id), src: p(&m.src), tgt: p(&m.tgt) }));
        out.compose.extend(other.compose.iter().map(|(a, b, c)| (p(a), p(b), p(c))));
        out.inverse.extend(other.inverse.iter().map(|(a, b)| (p(a), p(b))));
        out
    }
}

/// Exhaustively checks the groupoid axioms.
pub fn validate_groupoid(g: &GroupoidData) -> GroupoidReport {
    let mut v = Vec::new();
    let objects: HashSet<&str> = g.objects.iter().map(|s| s.as_str()).collect();
    if objects.len() != g.objects.len() {
        v.push("duplicate object id".to_string());
    }
    let mut by_id: HashMap<&str, &Morphism> = HashMap::new();
    for m in &g.morphisms {
        if by_id.insert(m.id.as_str(), m).is_some() {
            v.push(format!("duplicate morphism id {}", m.id));
        }
        if !objects.contains(m.src.as_str()) || !objects.contains(m.tgt.as_str()) {
            v.push(format!("morphism {} has an unknown endpoint", m.id));
        }
    }
    let mut table: HashMap<(&str, &str), &str> = HashMap::new();
    for (a, b, c) in &g.compose {
        let (ma, mb, mc) = match (by_id.get(a.as_str()), by_id.get(b.as_str()), by_id.get(c.as_str())) {
            (Some(x), Some(y), Some(z)) => (x, y, z),
            _ => {
                v.push(format!("composition ({a}, {b}) = {c} names an unknown morphism"));
                continue;
            }
        };
        if ma.src != mb.tgt {
            v.push(format!("composition ({a}, {b}) given for non-composable pair"));
        }
        if mc.src != mb.src || mc.tgt != ma.tgt {
            v.push(format!("composition ({a}, {b}) = {c} has wrong endpoints"));
        }
        if table.insert((a.as_str(), b.as_str()), c.as_str()).is_some() {
            v.push(format!("composition ({a}, {b}) listed twice"));
        }
    }
    for a in &g.morphisms {
        for b in &g.morphisms {
            if a.src == b.tgt && !table.contains_key(&(a.id.as_str(), b.id.as_str())) {
                v.push(format!("composition ({}, {}) missing", a.id, b.id));
            }
        }
    }
    if v.is_empty() {
        'assoc: for a in &g.morphisms {
            for b in &g.morphisms {
                if a.src != b.tgt {
                    continue;
                }
                for c in &g.morphisms {
                    if b.src != c.tgt {
                        continue;
                    }
                    let ab = table[&(a.id.as_str(), b.id.as_str())];
                    let bc = table[&(b.id.as_str(), c.id.as_str())];
                    let l = table[&(ab, c.id.as_str())];
                    let r = table[&(a.id.as_str(), bc)];
                    if l != r {
                        v.push(format!("associativity fails on the triple ({}, {}, {})", a.id, b.id, c.id));
                        break 'assoc;
                    }
                }
            }
        }
    }
    let mut identities = Vec::new();
    for o in &g.objects {
        let id = g.morphisms.iter().find(|e| {
            e.src == *o
                && e.tgt == *o
                && g.morphisms.iter().all(|m| {
                    (m.tgt != *o || table.get(&(e.id.as_str(), m.id.as_str())) == Some(&m.id.as_str()))
                        && (m.src != *o || table.get(&(m.id.as_str(), e.id.as_str())) == Some(&m.id.as_str()))
                })
        });
        if id.is_none() {
            v.push(format!("object {o} has no identity morphism"));
        }
        identities.push(id.map(|m| m.id.clone()));
    }
    let ident: HashMap<&str, &str> =
        g.objects.iter().zip(&identities).filter_map(|(o, i)| i.as_ref().map(|i| (o.as_str(), i.as_str()))).collect();
    let inv: HashMap<&str, &str> = g.inverse.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    for m in &g.morphisms {
        match inv.get(m.id.as_str()) {
            None => v.push(format!("morphism {} has no inverse", m.id)),
            Some(mi) => {
                let left = table.get(&(*mi, m.id.as_str()));
                let right = table.get(&(m.id.as_str(), *mi));
                if left.is_none() || left != ident.get(m.src.as_str()) {
                    v.push(format!("{mi}·{} is not the identity of {}", m.id, m.src));
                }
                if right.is_none() || right != ident.get(m.tgt.as_str()) {
                    v.push(format!("{}·{mi} is not the identity of {}", m.id, m.tgt));
                }
            }
        }
    }
    // a self-inverse morphism on a loop reports the same failure twice
    v.dedup();
    GroupoidReport { objects: g.objects.len(), morphisms: g.morphisms.len(), identities, violations: v }
}

/// The groupoid algebra `KG` with `Δ(g) = g⊗g`, `ε(g) = 1`,
/// `S(g) = g⁻¹ = g*`. Basis ordered by (target, source, id).
pub fn groupoid_algebra(g: &GroupoidData) -> Result<WhaData> {
    let rep = validate_groupoid(g);
    if let Some(first) = rep.violations.first() {
        return Err(Error::InvalidGroupoid(first.clone()));
    }
    if g.morphisms.is_empty() {
        return Err(Error::InvalidGroupoid("no morphisms".into()));
    }
    let pos: HashMap<&str, usize> = g.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    let mut order: Vec<&Morphism> = g.morphisms.iter().collect();
    order.sort_by(|a, b| {
        (pos[a.tgt.as_str()], pos[a.src.as_str()], &a.id).cmp(&(pos[b.tgt.as_str()], pos[b.src.as_str()], &b.id))
    });
    let index: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, m)| (m.id.as_str(), i)).collect();
    let n = order.len();
    let mut mult = Tensor3::zeros(n, n, n);
    for (a, b, c) in &g.compose {
        mult.set(index[a.as_str()], index[b.as_str()], index[c.as_str()], ONE);
    }
    let mut comult = Tensor3::zeros(n, n, n);
    let mut unit = Vector::zeros(n);
    for i in 0..n {
        comult.set(i, i, i, ONE);
    }
    for id in rep.identities.iter().flatten() {
        unit[index[id.as_str()]] = ONE;
    }
    let mut s = Mat::zeros(n, n);
    for (a, b) in &g.inverse {
        s[(index[b.as_str()], index[a.as_str()])] = ONE;
    }
    let labels = order.iter().map(|m| m.id.clone()).collect();
    WhaData::new(Some(labels), mult, unit, comult, Vector::from_element(n, ONE), Some(s.clone()), Some(s))
}

/// Block-diagonal direct sum of two weak bialgebras.
pub fn direct_sum(a: &WhaData, b: &WhaData) -> Result<WhaData> {
    let (n, m) = (a.dim(), b.dim());
    let alg = a.algebra().direct_sum(b.algebra());
    let mut comult = Tensor3::zeros(n + m, n + m, n + m);
    for (i, j, k, v) in a.comult().triples() {
        comult.set(i, j, k, v);
    }
    for (i, j, k, v) in b.comult().triples() {
        comult.set(n + i, n + j, n + k, v);
    }
    let counit = Vector::from_iterator(n + m, a.counit().iter().chain(b.counit().iter()).cloned());
    let antipode = match (a.antipode(), b.antipode()) {
        (Some(x), Some(y)) => {
            let mut s = Mat::zeros(n + m, n + m);
            s.view_mut((0, 0), (n, n)).copy_from(x);
            s.view_mut((n, n), (m, m)).copy_from(y);
            Some(s)
        }
        _ => None,
    };
    let mut labels: Vec<String> = a.labels().to_vec();
    labels.extend(b.labels().iter().map(|l| format!("{l}'")));
    WhaData::from_algebra(Some(labels), alg, comult, counit, antipode)
}

/// Direct sum of a nonempty list.
pub fn direct_sum_all(parts: &[WhaData]) -> Result<WhaData> {
    let (first, rest) = parts.split_first().ok_or_else(|| Error::InvalidInput("direct sum of nothing".into()))?;
    rest.iter().try_fold(first.clone(), |acc, p| direct_sum(&acc, p))
}

/// Built-in weak Hopf algebras used throughout the tests and the CLI.
pub mod fixtures {
    use super::*;

    pub fn kz2() -> WhaData {
        groupoid_algebra(&GroupoidData::cyclic(2)).expect("valid group")
    }

    pub fn kp2() -> WhaData {
        groupoid_algebra(&GroupoidData::pair(2)).expect("valid groupoid")
    }

    pub fn kp3() -> WhaData {
        groupoid_algebra(&GroupoidData::pair(3)).expect("valid groupoid")
    }

    pub fn ks3() -> WhaData {
        groupoid_algebra(&GroupoidData::symmetric3()).expect("valid group")
    }

    pub fn kz2_kz2() -> WhaData {
        direct_sum(&kz2(), &kz2()).expect("direct sum")
    }

    pub fn kp2_kz2() -> WhaData {
        direct_sum(&kp2(), &kz2()).expect("direct sum")
    }

    /// `(name, algebra)` for every built-in fixture.
    pub fn all() -> Vec<(&'static str, WhaData)> {
        vec![("KZ2", kz2()), ("KP2", kp2()), ("KZ2+KZ2", kz2_kz2()), ("KS3", ks3()), ("KP3", kp3())]
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::linalg::Tolerance;
    use crate::wha::{counital_subalgebras, verify_antipode_properties, verify_cstar, verify_weak_bialgebra};

    #[test]
    fn pair_groupoid_is_valid() {
        let r = validate_groupoid(&GroupoidData::pair(2));
        assert!(r.valid(), "{:?}", r.violations);
        assert_eq!((r.morphisms, r.units()), (4, 2));
        let s3 = validate_groupoid(&GroupoidData::symmetric3());
        assert!(s3.valid());
        assert_eq!(s3.morphisms, 6);
    }

    #[test]
    fn broken_associativity_names_a_triple() {
        let mut g = GroupoidData::cyclic(3);
        // swap one product: g·g = e instead of g2
        for c in g.compose.iter_mut() {
            if c.0 == "g" && c.1 == "g" {
                c.2 = "e".into();
            }
        }
        let r = validate_groupoid(&g);
        assert!(r.violations.iter().any(|v| v.contains("associativity") && v.contains("triple")), "{:?}", r.violations);
        assert!(matches!(groupoid_algebra(&g), Err(Error::InvalidGroupoid(_))));
    }

    #[test]
    fn groupoid_algebras_pass_all_checks() {
        let t = Tolerance::default();
        for (name, a) in all().into_iter().chain([("KP2+KZ2", kp2_kz2())]) {
            assert!(verify_weak_bialgebra(&a, t).passed(), "{name}");
            assert!(verify_antipode_properties(&a, t).unwrap().passed(), "{name}");
            assert!(verify_cstar(&a, t).unwrap().passed(), "{name}");
        }
    }

    #[test]
    fn counital_dimensions() {
        let t = Tolerance::default();
        assert_eq!(counital_subalgebras(&kp2(), t).left.dim(), 2);
        assert_eq!(counital_subalgebras(&kz2_kz2(), t).left.dim(), 2);
        assert_eq!(counital_subalgebras(&kp2_kz2(), t).left.dim(), 3);
        assert_eq!(counital_subalgebras(&kp3(), t).left.dim(), 3);
        let r = verify_weak_bialgebra(&kz2(), t);
        assert!(r.unital_coproduct && r.multiplicative_counit);
        let union = groupoid_algebra(&GroupoidData::cyclic(2).disjoint_union(&GroupoidData::cyclic(2))).unwrap();
        assert_eq!(union.dim(), 4);
        assert_eq!(counital_subalgebras(&union, t).left.dim(), 2);
    }

    #[test]
    fn kp2_basis_is_matrix_units() {
        let a = kp2();
        assert_eq!(a.labels(), &["e11", "e12", "e21", "e22"]);
        // e12 e21 = e11
        assert_eq!(a.mul(&a.basis(1), &a.basis(2)), a.basis(0));
    }

    #[test]
    fn empty_direct_sum_rejected() {
        assert!(direct_sum_all(&[]).is_err());
        assert_eq!(kp2_kz2().dim(), 6);
    }
}
