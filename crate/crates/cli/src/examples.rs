//! Built-in documents, available through `weakhopf example <name>`.

use weakhopf::actions::{trivial_action, weyl_action};
use weakhopf::constructors::{fixtures, GroupoidData};
use weakhopf::linalg::Tolerance;
use weakhopf::reconstruct::{diagonal_in_matrix, inclusion_from_action, scalars_in, subgroup_inclusion};
use weakhopf::wha::WhaData;

use crate::docs::{Document, InclusionDoc};

pub const NAMES: &[&str] = &[
    "kz2",
    "kp2",
    "kp3",
    "ks3",
    "kz2_kz2",
    "kp2_kz2",
    "z2.gpd",
    "z3.gpd",
    "s3.gpd",
    "pair2.gpd",
    "pair3.gpd",
    "weyl-kp2.action",
    "trivial-kz2.action",
    "diag-in-m2.incl",
    "scalars-in-m2.incl",
    "identity-m2.incl",
    "z2-in-s3.incl",
    "z3-in-s3.incl",
    "weyl-kp2.incl",
];

fn s3_subgroup(names: &[&str], tol: Tolerance) -> weakhopf::Result<InclusionDoc> {
    let s3 = fixtures::ks3();
    let label = |n: &str| s3.labels().iter().position(|l| l == n).expect("S3 label");
    let elems: Vec<usize> = names.iter().map(|n| label(n)).collect();
    Ok(InclusionDoc::from_inclusion(&subgroup_inclusion(s3.algebra(), &elems, tol)?))
}

fn identity(n: usize, tol: Tolerance) -> weakhopf::Result<InclusionDoc> {
    let m = weakhopf::algebra::FdAlgebra::matrix_algebra(n);
    let all: Vec<_> = (0..m.dim()).map(|i| m.basis(i)).collect();
    let d = m.dim();
    let inc = weakhopf::reconstruct::InclusionData::new(m, &all, weakhopf::linalg::Mat::identity(d, d), None, tol)?;
    Ok(InclusionDoc::from_inclusion(&inc))
}

fn wha(w: WhaData) -> weakhopf::Result<Document> {
    Ok(Document::Wha(w))
}

/// `None` for an unknown name.
pub fn example(name: &str, tol: Tolerance) -> Option<weakhopf::Result<Document>> {
    let doc = match name {
        "kz2" => wha(fixtures::kz2()),
        "kp2" => wha(fixtures::kp2()),
        "kp3" => wha(fixtures::kp3()),
        "ks3" => wha(fixtures::ks3()),
        "kz2_kz2" => wha(fixtures::kz2_kz2()),
        "kp2_kz2" => wha(fixtures::kp2_kz2()),
        "z2.gpd" => Ok(Document::Groupoid(GroupoidData::cyclic(2))),
        "z3.gpd" => Ok(Document::Groupoid(GroupoidData::cyclic(3))),
        "s3.gpd" => Ok(Document::Groupoid(GroupoidData::symmetric3())),
        "pair2.gpd" => Ok(Document::Groupoid(GroupoidData::pair(2))),
        "pair3.gpd" => Ok(Document::Groupoid(GroupoidData::pair(3))),
        "weyl-kp2.action" => weyl_action(&fixtures::kp2()).map(Document::Action),
        "trivial-kz2.action" => trivial_action(&fixtures::kz2(), tol).map(Document::Action),
        "diag-in-m2.incl" => diagonal_in_matrix(2, tol).map(|i| Document::Inclusion(InclusionDoc::from_inclusion(&i))),
        "scalars-in-m2.incl" => scalars_in(&weakhopf::algebra::FdAlgebra::matrix_algebra(2), tol)
            .map(|i| Document::Inclusion(InclusionDoc::from_inclusion(&i))),
        "identity-m2.incl" => identity(2, tol).map(Document::Inclusion),
        "z2-in-s3.incl" => s3_subgroup(&["p123", "p213"], tol).map(Document::Inclusion),
        "z3-in-s3.incl" => s3_subgroup(&["p123", "p231", "p312"], tol).map(Document::Inclusion),
        "weyl-kp2.incl" => weyl_action(&fixtures::kp2())
            .and_then(|x| inclusion_from_action(&x, tol))
            .map(|i| Document::Inclusion(InclusionDoc::from_inclusion(&i))),
        _ => return None,
    };
    Some(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_example_builds() {
        let tol = Tolerance::default();
        for name in NAMES {
            let doc = example(name, tol).expect("listed").unwrap();
            let suffix = name.rsplit_once('.').map(|(_, s)| s).unwrap_or("wha");
            let kind = match suffix {
                "gpd" => "groupoid",
                "incl" => "inclusion",
                k => k,
            };
            assert_eq!(doc.kind(), kind, "{name}");
        }
        assert!(example("nope", tol).is_none());
    }
}
