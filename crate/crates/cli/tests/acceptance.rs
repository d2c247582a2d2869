//! Acceptance suite: one PASS/FAIL line per primary criterion, measured
//! against the fixed tolerances of each criterion. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use weakhopf::actions::{crossed_product, galois_check, regularity_report, trivial_action, weyl_action, ActionData};
use weakhopf::algebra::DEFAULT_SEED;
use weakhopf::constructors::{fixtures, groupoid_algebra, GroupoidData};
use weakhopf::linalg::{Mat, Tensor3, Tolerance, C64};
use weakhopf::reconstruct::{
    diagonal_in_matrix, find_isomorphism, inclusion_from_action, reconstruct, scalars_in, subgroup_inclusion,
    InclusionData, Reconstruction,
};
use weakhopf::rep::{fusion_table, irreps, tensor_module};
use weakhopf::report::Report;
use weakhopf::wha::{
    canonical_grouplike, dual_wha, haar_integral, haar_properties, modular_and_kac_check, verify_antipode_properties,
    verify_cstar, verify_weak_bialgebra, WhaData,
};
use weakhopf::Error;
use weakhopf_cli::docs::Document;
use weakhopf_cli::examples;

type Outcome = Result<String, String>;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Fails with `msg` unless `ok`.
fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_report(what: &str, r: &Report, bound: f64) -> Result<f64, String> {
    if let Some(c) = r.first_failure() {
        return Err(format!("{what}: {} failed (residual {:.3e})", c.name, c.residual));
    }
    let m = r.max_residual();
    ensure(m <= bound, || format!("{what}: max residual {m:.3e} > {bound:e}"))?;
    Ok(m)
}

fn named(r: &Report, name: &str) -> Result<f64, String> {
    r.get(name).map(|c| c.residual).ok_or_else(|| format!("no check named {name:?}"))
}

fn dense(t: &Tensor3) -> Vec<Vec<Vec<C64>>> {
    let [a, b, c] = t.dims();
    (0..a).map(|i| (0..b).map(|j| (0..c).map(|k| t.get(i, j, k)).collect()).collect()).collect()
}

fn tensor_gap(x: &Tensor3, y: &Tensor3) -> f64 {
    if x.dims() != y.dims() {
        return f64::INFINITY;
    }
    let (x, y) = (dense(x), dense(y));
    let mut worst: f64 = 0.0;
    for (a, b) in x.iter().flatten().flatten().zip(y.iter().flatten().flatten()) {
        worst = worst.max((a - b).norm());
    }
    worst
}

fn mat_gap(x: &Mat, y: &Mat) -> f64 {
    if x.shape() != y.shape() {
        return f64::INFINITY;
    }
    (x - y).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn fixture_list() -> Vec<(&'static str, WhaData)> {
    vec![
        ("KZ2", fixtures::kz2()),
        ("KP2", fixtures::kp2()),
        ("KZ2⊕KZ2", fixtures::kz2_kz2()),
        ("K[S3]", fixtures::ks3()),
        ("KP3", fixtures::kp3()),
    ]
}

// ---------------------------------------------------------------------------
// Dense complex Gaussian elimination, independent of the library's solvers.

/// Solves the (possibly overdetermined) system `rows · x = rhs`; `None` if it
/// is inconsistent or the solution is not unique.
fn gauss_solve(mut rows: Vec<Vec<C64>>, mut rhs: Vec<C64>) -> Option<Vec<C64>> {
    let n = rows.first()?.len();
    let scale = rows.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    let eps = 1e-11 * scale;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let best = (r..rows.len()).max_by(|&a, &b| rows[a][c].norm().total_cmp(&rows[b][c].norm()))?;
        if rows[best][c].norm() <= eps {
            return None;
        }
        rows.swap(r, best);
        rhs.swap(r, best);
        let p = rows[r][c];
        for k in 0..rows.len() {
            if k != r {
                let f = rows[k][c] / p;
                if f.norm() > 0.0 {
                    for j in c..n {
                        let v = rows[r][j];
                        rows[k][j] -= f * v;
                    }
                    let v = rhs[r];
                    rhs[k] -= f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rhs[r..].iter().any(|z| z.norm() > 1e-9 * scale) {
        return None;
    }
    Some((0..n).map(|i| rhs[i] / rows[i][pivots[i]]).collect())
}

/// The Haar integral from its defining linear system, built directly from
/// the structure tensors: `x h = π^L(x) h`, `h x = h π^R(x)`, `π^L(h) = 1`.
fn haar_oracle(a: &WhaData) -> Option<Vec<C64>> {
    let n = a.dim();
    let m = dense(a.mult());
    let d = dense(a.comult());
    let eps: Vec<C64> = a.counit().iter().copied().collect();
    let one: Vec<C64> = a.unit().iter().copied().collect();
    let zero = C64::new(0.0, 0.0);
    let mul = |x: &[C64], y: &[C64]| -> Vec<C64> {
        let mut out = vec![zero; n];
        for i in 0..n {
            for j in 0..n {
                let c = x[i] * y[j];
                if c.norm() > 0.0 {
                    for k in 0..n {
                        out[k] += c * m[i][j][k];
                    }
                }
            }
        }
        out
    };
    let basis = |i: usize| -> Vec<C64> { (0..n).map(|k| if k == i { C64::new(1.0, 0.0) } else { zero }).collect() };
    let counit = |x: &[C64]| x.iter().zip(&eps).map(|(p, q)| p * q).sum::<C64>();
    // Δ(1) = Σ_i 1_i Δ(e_i)
    let mut d1 = vec![vec![zero; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                d1[j][k] += one[i] * d[i][j][k];
            }
        }
    }
    // π^L(x) = ε(1₍₁₎x)1₍₂₎, π^R(x) = 1₍₁₎ε(x1₍₂₎)
    let pi_l = |x: &[C64]| -> Vec<C64> {
        let mut out = vec![zero; n];
        for j in 0..n {
            for k in 0..n {
                if d1[j][k].norm() > 0.0 {
                    out[k] += d1[j][k] * counit(&mul(&basis(j), x));
                }
            }
        }
        out
    };
    let pi_r = |x: &[C64]| -> Vec<C64> {
        let mut out = vec![zero; n];
        for j in 0..n {
            for k in 0..n {
                if d1[j][k].norm() > 0.0 {
                    out[j] += d1[j][k] * counit(&mul(x, &basis(k)));
                }
            }
        }
        out
    };
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        let e = basis(i);
        let (l, r) = (pi_l(&e), pi_r(&e));
        // coefficient of h_j in (e_i h - π^L(e_i) h) and (h e_i - h π^R(e_i))
        let left: Vec<Vec<C64>> = (0..n)
            .map(|j| {
                let b = basis(j);
                mul(&e, &b).iter().zip(mul(&l, &b)).map(|(p, q)| p - q).collect()
            })
            .collect();
        let right: Vec<Vec<C64>> = (0..n)
            .map(|j| {
                let b = basis(j);
                mul(&b, &e).iter().zip(mul(&b, &r)).map(|(p, q)| p - q).collect()
            })
            .collect();
        for sys in [left, right] {
            for k in 0..n {
                rows.push((0..n).map(|j| sys[j][k]).collect());
                rhs.push(zero);
            }
        }
    }
    let pl: Vec<Vec<C64>> = (0..n).map(|j| pi_l(&basis(j))).collect();
    for k in 0..n {
        rows.push((0..n).map(|j| pl[j][k]).collect());
        rhs.push(one[k]);
    }
    gauss_solve(rows, rhs)
}

// ---------------------------------------------------------------------------
// Criteria.

fn axiom_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, a) in fixture_list() {
        let t = tol();
        worst = worst.max(check_report(&format!("{name} WBA"), &verify_weak_bialgebra(&a, t).report, 1e-9)?);
        let s = verify_antipode_properties(&a, t).map_err(|e| format!("{name}: {e}"))?;
        worst = worst.max(check_report(&format!("{name} antipode"), &s, 1e-9)?);
        let c = verify_cstar(&a, t).map_err(|e| format!("{name}: {e}"))?;
        worst = worst.max(check_report(&format!("{name} C*"), &c, 1e-9)?);
    }
    Ok(format!("5 fixtures, max residual {worst:.2e}"))
}

fn haar() -> Outcome {
    let half = C64::new(0.5, 0.0);
    let expected = [("KZ2", fixtures::kz2(), vec![half; 2]), ("KP2", fixtures::kp2(), vec![half; 4])];
    let mut worst_value: f64 = 0.0;
    for (name, a, closed_form) in expected {
        let h = haar_integral(&a, tol()).map_err(|e| format!("{name}: {e}"))?;
        let oracle = haar_oracle(&a).ok_or_else(|| format!("{name}: oracle system has no unique solution"))?;
        for i in 0..a.dim() {
            worst_value = worst_value.max((h[i] - oracle[i]).norm()).max((h[i] - closed_form[i]).norm());
        }
    }
    ensure(worst_value <= 1e-10, || format!("Haar values off by {worst_value:.3e}"))?;
    let mut worst_prop: f64 = 0.0;
    for (name, a) in fixture_list() {
        let h = haar_integral(&a, tol()).map_err(|e| format!("{name}: {e}"))?;
        if let Some(o) = haar_oracle(&a) {
            let gap = (0..a.dim()).map(|i| (h[i] - o[i]).norm()).fold(0.0, f64::max);
            ensure(gap <= 1e-10, || format!("{name}: Haar differs from the oracle by {gap:.3e}"))?;
        } else {
            return Err(format!("{name}: oracle system has no unique solution"));
        }
        let r = haar_properties(&a, &h, tol()).map_err(|e| format!("{name}: {e}"))?;
        worst_prop = worst_prop.max(check_report(&format!("{name} Haar"), &r, 1e-8)?);
    }
    Ok(format!("values within {worst_value:.1e} of oracle and closed form; properties max {worst_prop:.2e}"))
}

fn duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, a) in fixture_list() {
        let dd = dual_wha(&dual_wha(&a).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let gaps = [
            tensor_gap(a.mult(), dd.mult()),
            tensor_gap(a.comult(), dd.comult()),
            mat_gap(
                &Mat::from_column_slice(a.dim(), 1, a.unit().as_slice()),
                &Mat::from_column_slice(dd.dim(), 1, dd.unit().as_slice()),
            ),
            mat_gap(
                &Mat::from_column_slice(a.dim(), 1, a.counit().as_slice()),
                &Mat::from_column_slice(dd.dim(), 1, dd.counit().as_slice()),
            ),
            mat_gap(a.require_antipode().unwrap(), dd.require_antipode().map_err(|e| e.to_string())?),
            mat_gap(a.require_star().unwrap(), dd.require_star().map_err(|e| e.to_string())?),
        ];
        let g = gaps.iter().cloned().fold(0.0, f64::max);
        ensure(g <= 1e-9, || format!("{name}: dual(dual) differs by {g:.3e}"))?;
        worst = worst.max(g);
    }
    let groupoids = [
        GroupoidData::cyclic(2),
        GroupoidData::cyclic(3),
        GroupoidData::symmetric3(),
        GroupoidData::pair(2),
        GroupoidData::pair(3),
        GroupoidData::pair(2).disjoint_union(&GroupoidData::cyclic(2)),
    ];
    for g in &groupoids {
        let d = dual_wha(&groupoid_algebra(g).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let m = dense(d.mult());
        let n = d.dim();
        let mut comm: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    comm = comm.max((m[i][j][k] - m[j][i][k]).norm());
                }
            }
        }
        ensure(comm <= 1e-12, || format!("dual of a {n}-dim groupoid algebra is not commutative ({comm:.3e})"))?;
    }
    Ok(format!("dual(dual) max gap {worst:.2e}; {} groupoid duals commutative", groupoids.len()))
}

fn grouplike() -> Outcome {
    let mut worst_mod: f64 = 0.0;
    for (name, a) in fixture_list() {
        let n = a.dim();
        let gl = canonical_grouplike(&a, DEFAULT_SEED, tol()).map_err(|e| format!("{name}: {e}"))?;
        let g_gap = (0..n).map(|i| (gl.g[i] - a.unit()[i]).norm()).fold(0.0, f64::max);
        ensure(g_gap <= 1e-9, || format!("{name}: g differs from 1 by {g_gap:.3e}"))?;
        let s = a.require_antipode().unwrap();
        let s2 = mat_gap(&(s * s), &Mat::identity(n, n));
        ensure(s2 <= 1e-9, || format!("{name}: S² differs from id by {s2:.3e}"))?;
        let k = modular_and_kac_check(&a, DEFAULT_SEED, tol()).map_err(|e| format!("{name}: {e}"))?;
        let modular = named(&k.report, "modular identity")?;
        ensure(modular <= 1e-8, || format!("{name}: modular residual {modular:.3e}"))?;
        worst_mod = worst_mod.max(modular);
        // both sides recomputed here: S² = id, and ĥ(xy) = ĥ(yx) on the basis
        let hat_h = haar_integral(&dual_wha(&a).map_err(|e| e.to_string())?, tol()).map_err(|e| e.to_string())?;
        let mut trace_gap: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (a.basis(i), a.basis(j));
                trace_gap = trace_gap.max((hat_h.dot(&a.mul(&x, &y)) - hat_h.dot(&a.mul(&y, &x))).norm());
            }
        }
        let (kac, tracial) = (s2 <= 1e-9, trace_gap <= 1e-8);
        ensure(kac == k.is_weak_kac && tracial == k.hat_h_tracial, || {
            format!("{name}: Kac/tracial flags disagree with recomputation")
        })?;
        ensure(!kac || tracial, || format!("{name}: weak Kac but ĥ not tracial"))?;
        ensure(!tracial || kac, || format!("{name}: ĥ tracial but not weak Kac"))?;
    }
    Ok(format!("S² = id, g = 1 on 5 fixtures; modular max {worst_mod:.2e}; Kac ⇔ tracial (all fixtures Kac)"))
}

fn fusion() -> Outcome {
    let kp2 = fixtures::kp2();
    let t = fusion_table(&kp2, tol()).map_err(|e| e.to_string())?;
    ensure(t.len() == 1, || format!("KP2 has {} sectors", t.len()))?;
    ensure(t.fusion[0][0][0] == 1, || format!("N_pp^p = {}", t.fusion[0][0][0]))?;
    let vv = tensor_module(
        &irreps(&kp2, tol()).map_err(|e| e.to_string())?.irreps[0].rep,
        &irreps(&kp2, tol()).unwrap().irreps[0].rep,
        tol(),
    )
    .map_err(|e| e.to_string())?;
    let (d, dvv) = (t.dims[0], vv.space_dim());
    ensure(dvv == 2 && d * d == 4, || format!("dim V⊠V = {dvv}, d² = {}", d * d))?;

    let mut worst_round: f64 = 0.0;
    for (name, a) in fixture_list() {
        let t = fusion_table(&a, tol()).map_err(|e| format!("{name}: {e}"))?;
        let set = irreps(&a, tol()).map_err(|e| format!("{name}: {e}"))?;
        let k = set.len();
        // N_pq^r = tr_{p⊠q}(e_r), with e_r a minimal projection of sector r
        let mut n = vec![vec![vec![0i64; k]; k]; k];
        for p in 0..k {
            for q in 0..k {
                let prod = tensor_module(&set.irreps[p].rep, &set.irreps[q].rep, tol()).map_err(|e| e.to_string())?;
                for r in 0..k {
                    let x = prod.apply(set.minimal_projection(r)).trace();
                    let rounded = x.re.round();
                    worst_round = worst_round.max((x - C64::new(rounded, 0.0)).norm());
                    n[p][q][r] = rounded as i64;
                    ensure(n[p][q][r] as usize == t.fusion[p][q][r], || format!("{name}: N[{p}][{q}][{r}] mismatch"))?;
                }
            }
        }
        for p in 0..k {
            for q in 0..k {
                for r in 0..k {
                    for s in 0..k {
                        let lhs: i64 = (0..k).map(|x| n[p][q][x] * n[x][r][s]).sum();
                        let rhs: i64 = (0..k).map(|x| n[q][r][x] * n[p][x][s]).sum();
                        ensure(lhs == rhs, || format!("{name}: (N_p N_q) associativity fails at {p},{q},{r},{s}"))?;
                    }
                }
            }
        }
    }
    ensure(worst_round <= 1e-6, || format!("pre-rounding residual {worst_round:.3e}"))?;

    let t = fusion_table(&fixtures::kz2_kz2(), tol()).map_err(|e| e.to_string())?;
    for b in [
        "p⊠q = 0 when p^R ≠ q^L",
        "constituents of p⊠q have vacua (p^L, q^R)",
        "conjugation swaps vacua",
        "vacuum connectivity transitive",
    ] {
        ensure(t.report.ok(b), || format!("KZ2⊕KZ2: {b}"))?;
    }
    // the bullets must be exercised: two vacua, so some products vanish
    let vanishing =
        (0..t.len()).flat_map(|p| (0..t.len()).map(move |q| (p, q))).filter(|&(p, q)| t.product_dim(p, q) == 0).count();
    ensure(t.vacua.len() == 2 && vanishing > 0, || "KZ2⊕KZ2 should have two vacua and vanishing products".into())?;
    Ok(format!("KP2: 1 sector, N = 1, dim V⊠V = 2 < 4; integrality max {worst_round:.1e}; KZ2⊕KZ2 sector rules hold"))
}

fn actions() -> Outcome {
    let kp2 = weyl_action(&fixtures::kp2()).map_err(|e| e.to_string())?;
    let cp = crossed_product(&kp2, tol()).map_err(|e| e.to_string())?;
    let sizes = cp.algebra.wedderburn(DEFAULT_SEED, tol()).map_err(|e| e.to_string())?.sizes();
    ensure(cp.dim() == 8 && sizes == vec![2, 2], || format!("KP2⋊Â has dim {} and blocks {sizes:?}", cp.dim()))?;
    let hmh = named(&cp.report, "hmh = (h▷m)h")?;
    ensure(hmh <= 1e-9, || format!("hmh residual {hmh:.3e}"))?;

    let mut worst_comm: f64 = 0.0;
    let mut regular = Vec::new();
    for (name, a) in fixture_list() {
        let x = weyl_action(&a).map_err(|e| e.to_string())?;
        let cp = crossed_product(&x, tol()).map_err(|e| format!("{name}: {e}"))?;
        let g = galois_check(&x, &cp, tol()).map_err(|e| e.to_string())?;
        ensure(g.galois, || format!("{name}: Weyl action not Galois ({} of {})", g.span_dim, g.crossed_dim))?;
        let reg = regularity_report(&x, &cp, tol()).map_err(|e| e.to_string())?;
        if !reg.regular {
            continue;
        }
        regular.push(name);
        let five = [
            "M'∩(M⋊A) = A^R",
            "(M^A)'∩(M⋊A) = A",
            "Center M^A = A^L∩Center A",
            "Center M = A^L∩A^R",
            "Center(M⋊A) = A^R∩Center A",
        ];
        for c in five {
            let r = named(&reg.commutants, c)?;
            ensure(r <= 1e-8, || format!("{name}: {c} residual {r:.3e}"))?;
            worst_comm = worst_comm.max(r);
        }
    }
    ensure(regular.contains(&"KP2") && regular.contains(&"KP3"), || {
        format!("Weyl actions of the pair groupoids not regular: {regular:?}")
    })?;
    let triv: ActionData = trivial_action(&fixtures::kz2(), tol()).map_err(|e| e.to_string())?;
    let cp = crossed_product(&triv, tol()).map_err(|e| e.to_string())?;
    let g = galois_check(&triv, &cp, tol()).map_err(|e| e.to_string())?;
    ensure(!g.galois, || "trivial KZ2 action reported Galois".into())?;
    Ok(format!(
        "KP2⋊Â ≅ M₂⊕M₂, hmh {hmh:.1e}; Weyl Galois, trivial not; commutants on regular [{}] max {worst_comm:.2e}",
        regular.join(", ")
    ))
}

struct Reconstructions {
    diag: Reconstruction,
    others: Vec<(&'static str, Reconstruction)>,
    /// Built-in WHA, reconstruction of `A^L ⊂ A`.
    weyl: Vec<(&'static str, WhaData, Result<Reconstruction, Error>)>,
    non_normal: Result<Reconstruction, Error>,
}

fn s3_subgroup(names: &[&str]) -> InclusionData {
    let s3 = fixtures::ks3();
    let idx: Vec<usize> = names.iter().map(|n| s3.labels().iter().position(|l| l == n).unwrap()).collect();
    subgroup_inclusion(s3.algebra(), &idx, tol()).unwrap()
}

fn run_reconstructions() -> Reconstructions {
    let t = tol();
    std::thread::scope(|s| {
        let mut builtins = fixtures::all();
        builtins.push(("KP2+KZ2", fixtures::kp2_kz2()));
        let weyl: Vec<_> = builtins
            .into_iter()
            .map(|(name, a)| {
                s.spawn(move || {
                    let r =
                        weyl_action(&a).and_then(|x| inclusion_from_action(&x, t)).and_then(|inc| reconstruct(&inc, t));
                    (name, a, r)
                })
            })
            .collect();
        let diag = s.spawn(move || reconstruct(&diagonal_in_matrix(2, t).unwrap(), t).expect("diag(ℂ²) ⊂ M₂"));
        let others = s.spawn(move || {
            let m2 = weakhopf::algebra::FdAlgebra::matrix_algebra(2);
            let all: Vec<_> = (0..4).map(|i| m2.basis(i)).collect();
            let identity = InclusionData::new(m2.clone(), &all, Mat::identity(4, 4), None, t).unwrap();
            vec![
                ("ℂ ⊂ M₂", reconstruct(&scalars_in(&m2, t).unwrap(), t).expect("ℂ ⊂ M₂")),
                ("M₂ ⊂ M₂", reconstruct(&identity, t).expect("M₂ ⊂ M₂")),
                ("ℂZ3 ⊂ ℂS3", reconstruct(&s3_subgroup(&["p123", "p231", "p312"]), t).expect("ℂZ3 ⊂ ℂS3")),
            ]
        });
        let non_normal = reconstruct(&s3_subgroup(&["p123", "p213"]), t);
        Reconstructions {
            diag: diag.join().unwrap(),
            others: others.join().unwrap(),
            weyl: weyl.into_iter().map(|h| h.join().unwrap()).collect(),
            non_normal,
        }
    })
}

fn full_suite(w: &WhaData) -> Result<f64, String> {
    let t = tol();
    let mut m = check_report("WBA", &verify_weak_bialgebra(w, t).report, 1e-9)?;
    m = m.max(check_report("antipode", &verify_antipode_properties(w, t).map_err(|e| e.to_string())?, 1e-9)?);
    m = m.max(check_report("C*", &verify_cstar(w, t).map_err(|e| e.to_string())?, 1e-9)?);
    Ok(m)
}

fn round_trip(rs: &Reconstructions) -> Outcome {
    let mut problems = Vec::new();
    let r = &rs.diag;
    let w = r.wha();
    if w.dim() != 4 {
        problems.push(format!("diag: dim {}", w.dim()));
    }
    if let Err(e) = full_suite(w) {
        problems.push(format!("diag: {e}"));
    }
    match find_isomorphism(w, &dual_wha(&fixtures::kp2()).unwrap(), tol()) {
        Ok(Some(_)) => {}
        _ => problems.push("diag: not isomorphic to dual(KP2)".into()),
    }
    if !r.report.ok("extract/A: S²|_{A^L} = id") {
        problems.push("diag: S²|_{A^L} ≠ id".into());
    }
    if r.tower.derived.dims() != (2, 4, 8) {
        problems.push(format!("diag: tower dims {:?}", r.tower.derived.dims()));
    }
    let mut closed = Vec::new();
    for (name, a, rec) in &rs.weyl {
        match rec {
            Ok(rec) => {
                let d = dual_wha(a).unwrap();
                match find_isomorphism(rec.wha(), &d, tol()) {
                    Ok(Some(_)) => closed.push(*name),
                    _ => problems.push(format!(
                        "{name}: A^L ⊂ A gives dim {} (dim N'∩M₂ = {}), dual(A) has dim {}",
                        rec.wha().dim(),
                        rec.tower.derived.n_m2.len(),
                        d.dim()
                    )),
                }
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    match &rs.non_normal {
        Err(Error::NotDepth2(_)) => {}
        Err(e) => problems.push(format!("ℂZ2 ⊂ ℂS3: unexpected error {e}")),
        Ok(_) => problems.push("ℂZ2 ⊂ ℂS3: reconstructed".into()),
    }
    if problems.is_empty() {
        Ok(format!("diag ≅ dual(KP2), tower (2,4,8); A^L ⊂ A closes for {}; ℂZ2 ⊂ ℂS3 NotDepth2", closed.join(", ")))
    } else {
        Err(format!("closes for [{}]; {}", closed.join(", "), problems.join("; ")))
    }
}

fn internal_consistency(rs: &Reconstructions) -> Outcome {
    let mut all: Vec<(&str, &Reconstruction)> = vec![("diag(ℂ²) ⊂ M₂", &rs.diag)];
    all.extend(rs.others.iter().map(|(n, r)| (*n, r)));
    all.extend(rs.weyl.iter().filter_map(|(n, _, r)| r.as_ref().ok().map(|r| (*n, r))));
    let (mut pairing, mut traces): (f64, f64) = (0.0, 0.0);
    for (name, r) in &all {
        let p = named(&r.report, "extract/pairing: Ansatz = Fourier form")?;
        ensure(p <= 1e-8, || format!("{name}: Ansatz vs Fourier {p:.3e}"))?;
        ensure(r.extracted.fork.consistent() && r.extracted.fork.holds(), || {
            format!("{name}: fork-rule equivalence {:?}", r.extracted.fork)
        })?;
        let t = named(&r.report, "traces/tr_M Ψ_ι = tr_N Φ_ι on End ι")?;
        ensure(t <= 1e-9, || format!("{name}: trace identity {t:.3e}"))?;
        pairing = pairing.max(p);
        traces = traces.max(t);
    }
    Ok(format!(
        "{} depth-2 inclusions; pairing max {pairing:.1e}, traces max {traces:.1e}, fork rule consistent",
        all.len()
    ))
}

// ---------------------------------------------------------------------------
// CLI.

fn cli_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_weakhopf"))
        .args(args)
        .current_dir(cli_dir().join("fixtures"))
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into(),
        String::from_utf8_lossy(&out.stderr).into(),
    )
}

fn cli() -> Outcome {
    // replay every golden transcript
    let mut golden: Vec<PathBuf> =
        std::fs::read_dir(cli_dir().join("golden")).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    golden.sort();
    ensure(!golden.is_empty(), || "no golden transcripts".into())?;
    let mut commands = std::collections::BTreeSet::new();
    for path in &golden {
        let want = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let header = want.lines().next().and_then(|l| l.strip_prefix("$ weakhopf ")).ok_or("bad transcript header")?;
        let args: Vec<&str> = header.split(' ').collect();
        commands.insert(args.iter().take(2).find(|a| !a.starts_with('-')).map(|s| s.to_string()).unwrap_or_default());
        let (code, out, err) = run_cli(&args);
        let got = format!("$ weakhopf {header}\nexit: {code}\n--- stdout\n{out}--- stderr\n{err}");
        ensure(got == want, || format!("transcript {} differs", path.display()))?;
    }
    for c in ["verify", "compute", "groupoid", "reconstruct"] {
        ensure(commands.contains(c), || format!("no golden transcript for {c}"))?;
    }

    // canonical text round-trips through the reader
    let mut docs = 0;
    for name in examples::NAMES {
        let doc = examples::example(name, tol()).unwrap().map_err(|e| e.to_string())?;
        let text = doc.to_text();
        let again = Document::from_text(&text, Path::new(".")).map_err(|e| format!("{name}: {e}"))?.to_text();
        ensure(again == text, || format!("{name}: text changes on re-reading"))?;
        docs += 1;
    }

    let contract: [(&[&str], i32); 6] = [
        (&["verify", "kp2.wha.json"], 0),
        (&["groupoid", "broken-assoc.gpd.json"], 1),
        (&["reconstruct", "z2-in-s3.incl.json"], 1),
        (&["verify", "corrupted.wha.json"], 2),
        (&["verify", "misnamed.wha.json"], 2),
        (&["verify", "does-not-exist.json"], 2),
    ];
    for (args, code) in contract {
        let (got, _, _) = run_cli(args);
        ensure(got == code, || format!("`weakhopf {}` exited {got}, expected {code}", args.join(" ")))?;
    }
    Ok(format!("{} golden transcripts replayed; {docs} documents round-trip; exit codes 0/1/2 honored", golden.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    // the reconstructions are the slow part; start them first
    let rec = std::thread::spawn(run_reconstructions);
    let mut lines: Vec<(&str, Outcome)> = vec![
        ("Axiom suite", axiom_suite()),
        ("Haar", haar()),
        ("Duality", duality()),
        ("Grouplike", grouplike()),
        ("Fusion", fusion()),
        ("Actions", actions()),
    ];
    let rs = rec.join().expect("reconstructions");
    lines.push(("Reconstruction round trip", round_trip(&rs)));
    lines.push(("Reconstruction internal consistency", internal_consistency(&rs)));
    lines.push(("CLI", cli()));

    let width = lines.iter().map(|(n, _)| n.chars().count()).max().unwrap_or(0);
    let mut failed = 0;
    println!();
    for (name, outcome) in &lines {
        let pad = " ".repeat(width - name.chars().count());
        match outcome {
            Ok(detail) => println!("PASS  {name}{pad}  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}{pad}  {detail}");
            }
        }
    }
    println!("\nacceptance: {} passed, {failed} failed ({:.1} s)", lines.len() - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
