//! Randomised invariants over groupoid algebras and random elements.

use proptest::prelude::*;
use weakhopf::constructors::{groupoid_algebra, GroupoidData};
use weakhopf::linalg::{c64, max_abs, max_abs_vec, Tolerance, Vector};
use weakhopf::rep::irreps;
use weakhopf::wha::{dual_wha, haar_integral, verify_antipode_properties, verify_weak_bialgebra, WhaData};

#[derive(Debug, Clone, Copy)]
enum Piece {
    Cyclic(usize),
    Pair(usize),
    S3,
}

impl Piece {
    fn build(self) -> GroupoidData {
        match self {
            Piece::Cyclic(n) => GroupoidData::cyclic(n),
            Piece::Pair(n) => GroupoidData::pair(n),
            Piece::S3 => GroupoidData::symmetric3(),
        }
    }

    /// Number of irreps of the groupoid algebra.
    fn sectors(self) -> usize {
        match self {
            Piece::Cyclic(n) => n,
            Piece::Pair(_) => 1,
            Piece::S3 => 3,
        }
    }
}

fn piece() -> impl Strategy<Value = Piece> {
    prop_oneof![(1usize..=4).prop_map(Piece::Cyclic), (1usize..=3).prop_map(Piece::Pair), Just(Piece::S3)]
}

fn groupoid(pieces: &[Piece]) -> GroupoidData {
    let mut g = pieces[0].build();
    for p in &pieces[1..] {
        g = g.disjoint_union(&p.build());
    }
    g
}

fn element(a: &WhaData, coeffs: &[(f64, f64)]) -> Vector {
    Vector::from_iterator(
        a.dim(),
        (0..a.dim()).map(|i| {
            let (re, im) = coeffs[i % coeffs.len()];
            c64(re, im)
        }),
    )
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)
}

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn groupoid_algebras_are_weak_hopf(pieces in prop::collection::vec(piece(), 1..3)) {
        let a = groupoid_algebra(&groupoid(&pieces)).unwrap();
        let wba = verify_weak_bialgebra(&a, tol());
        prop_assert!(wba.passed(), "{}", wba.report);
        let s = verify_antipode_properties(&a, tol()).unwrap();
        prop_assert!(s.passed(), "{}", s);
    }

    #[test]
    fn haar_integral_is_a_projection(pieces in prop::collection::vec(piece(), 1..3)) {
        let a = groupoid_algebra(&groupoid(&pieces)).unwrap();
        let h = haar_integral(&a, tol()).unwrap();
        prop_assert!(max_abs_vec(&(a.mul(&h, &h) - &h)) < 1e-9);
        prop_assert!(max_abs_vec(&(a.star(&h).unwrap() - &h)) < 1e-9);
    }

    #[test]
    fn double_dual_is_the_identity(pieces in prop::collection::vec(piece(), 1..3)) {
        let a = groupoid_algebra(&groupoid(&pieces)).unwrap();
        let dd = dual_wha(&dual_wha(&a).unwrap()).unwrap();
        prop_assert!(max_abs(&(a.require_antipode().unwrap() - dd.require_antipode().unwrap())) < 1e-12);
        for i in 0..a.dim() {
            let x = a.basis(i);
            prop_assert!(max_abs(&(a.coproduct(&x) - dd.coproduct(&x))) < 1e-12);
            for j in 0..a.dim() {
                let y = a.basis(j);
                prop_assert!(max_abs_vec(&(a.mul(&x, &y) - dd.mul(&x, &y))) < 1e-12);
            }
        }
    }

    #[test]
    fn irreps_account_for_the_whole_algebra(pieces in prop::collection::vec(piece(), 1..3)) {
        let a = groupoid_algebra(&groupoid(&pieces)).unwrap();
        let set = irreps(&a, tol()).unwrap();
        let expected: usize = pieces.iter().map(|p| p.sectors()).sum();
        prop_assert_eq!(set.len(), expected);
        let total: usize = set.irreps.iter().map(|r| r.dim * r.dim).sum();
        prop_assert_eq!(total, a.dim());
    }

    #[test]
    fn structure_maps_respect_products(pieces in prop::collection::vec(piece(), 1..3), cx in coeffs(), cy in coeffs()) {
        let a = groupoid_algebra(&groupoid(&pieces)).unwrap();
        let (x, y) = (element(&a, &cx), element(&a, &cy));
        let xy = a.mul(&x, &y);
        // Δ(xy) = Δ(x)Δ(y)
        prop_assert!(max_abs(&(a.coproduct(&xy) - a.tensor_mul(&a.coproduct(&x), &a.coproduct(&y)))) < 1e-9);
        // S(xy) = S(y)S(x)
        let s = |z: &Vector| a.apply_antipode(z).unwrap();
        prop_assert!(max_abs_vec(&(s(&xy) - a.mul(&s(&y), &s(&x)))) < 1e-9);
        // (xy)* = y*x*
        let st = |z: &Vector| a.star(z).unwrap();
        prop_assert!(max_abs_vec(&(st(&xy) - a.mul(&st(&y), &st(&x)))) < 1e-9);
        // π^L(x) lies in A^L: π^L∘π^L = π^L
        let (l, _) = a.counital_projections(&x);
        let (ll, _) = a.counital_projections(&l);
        prop_assert!(max_abs_vec(&(ll - &l)) < 1e-9);
    }
}
