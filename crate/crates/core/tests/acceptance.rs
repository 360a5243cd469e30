//! Acceptance criteria 1–7. Each prints one PASS/FAIL line; the test fails
//! if any criterion fails.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cayley_lattice::classify::{classify, verify_certificate, Certificate};
use cayley_lattice::cohomology::{h_n_with, sha2, sha2_with, Method};
use cayley_lattice::constructions::*;
use cayley_lattice::glattice::{close_group, permutation_matrix, signed_permutation_matrix};
use cayley_lattice::intmat::{int, IntMatrix};
use cayley_lattice::resolutions::{
    pgl_odd_outer_resolution, rank_le2_resolution, sign_perm_resolution, Shape,
};
use cayley_lattice::rootdata::{char_lattice, intermediate_from_types, DynkinType, NamedGroup};
use cayley_lattice::{AbelianInvariants, FinGroup, GLattice, DEFAULT_MAX_CELLS};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

/// `Ш²` of the zero group over `(Z/3)²` for `([A₂, A₂], diag)`.
const CRITERION_7_SHA2: &[i64] = &[];
const CRITERION_7_GROUP_ORDER: usize = 9;

fn perm_group(points: usize, gens: &[Vec<usize>]) -> Arc<FinGroup> {
    let mats: Vec<IntMatrix> = gens
        .iter()
        .map(|g| {
            let mut p: Vec<usize> = (0..points).collect();
            p[..g.len()].copy_from_slice(g);
            permutation_matrix(&p)
        })
        .collect();
    Arc::new(close_group(&mats, 64).unwrap())
}

fn cycle(offset: usize, len: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..offset + len).collect();
    for i in 0..len {
        p[offset + i] = offset + (i + 1) % len;
    }
    p
}

fn swap(a: usize, b: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..=a.max(b)).collect();
    p.swap(a, b);
    p
}

fn klein() -> Arc<FinGroup> {
    perm_group(4, &[swap(0, 1), vec![0, 1, 3, 2]])
}

fn quaternion() -> Arc<FinGroup> {
    // left multiplication by i and j on the basis 1, i, j, k
    let i = signed_permutation_matrix(&[1, 0, 3, 2], &[1, -1, 1, -1]);
    let j = signed_permutation_matrix(&[2, 3, 0, 1], &[1, 1, -1, -1]);
    Arc::new(close_group(&[i, j], 64).unwrap())
}

/// Groups of order at most 16 used by the cohomology properties.
fn group_suite() -> Vec<(String, Arc<FinGroup>)> {
    let mut out = Vec::new();
    for n in 2..=16 {
        out.push((format!("C{n}"), perm_group(n, &[cycle(0, n)])));
    }
    for n in 3..=8 {
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        out.push((format!("D{n}"), perm_group(n, &[cycle(0, n), refl])));
    }
    out.push(("C2^2".into(), klein()));
    out.push((
        "C2^3".into(),
        perm_group(6, &[swap(0, 1), swap(2, 3), swap(4, 5)]),
    ));
    out.push((
        "C2^4".into(),
        perm_group(8, &[swap(0, 1), swap(2, 3), swap(4, 5), swap(6, 7)]),
    ));
    out.push(("C4xC2".into(), perm_group(6, &[cycle(0, 4), swap(4, 5)])));
    out.push(("C4xC4".into(), perm_group(8, &[cycle(0, 4), cycle(4, 4)])));
    out.push(("C8xC2".into(), perm_group(10, &[cycle(0, 8), swap(8, 9)])));
    out.push(("C3xC3".into(), perm_group(6, &[cycle(0, 3), cycle(3, 3)])));
    out.push((
        "C6xC2".into(),
        perm_group(7, &[cycle(0, 2), cycle(2, 3), swap(5, 6)]),
    ));
    out.push((
        "C4xC2xC2".into(),
        perm_group(8, &[cycle(0, 4), swap(4, 5), swap(6, 7)]),
    ));
    out.push(("A4".into(), perm_group(4, &[cycle(0, 3), vec![1, 0, 3, 2]])));
    out.push((
        "D4xC2".into(),
        perm_group(6, &[cycle(0, 4), vec![0, 3, 2, 1], swap(4, 5)]),
    ));
    out.push(("Q8".into(), quaternion()));
    out
}

fn run(n: usize, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default())
    });
    let t = start.elapsed();
    let (ok, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    // straight to the handle so the line survives output capture
    let line = format!("criterion {n}: {}  {detail} [{}]\n", if ok { "PASS" } else { "FAIL" }, secs(t));
    let _ = std::io::stderr().write_all(line.as_bytes());
    ok
}

fn secs(t: Duration) -> String {
    format!("{:.2}s", t.as_secs_f64())
}

fn criterion_1() -> Outcome {
    let j = j_gamma(klein());
    ensure!(j.rank() == 3, "rank J_Γ = {}", j.rank());
    let s = sha2(j.group(), &j).map_err(e)?;
    ensure!(
        s.factors_i64() == [2] && s.free_rank == 0,
        "Ш²(Γ, J_Γ) = {s}"
    );
    Ok("rank 3, Ш² = Z/2".into())
}

fn criterion_2() -> Outcome {
    let mut analyzed = 0;
    for spec in common::section2_grid() {
        if spec.check_hypotheses().is_err() {
            continue;
        }
        let lat = section2_lattice(&spec).map_err(e)?;
        ensure!(lat.index() == int(2), "{spec:?}: index {}", lat.index());
        let r = analyze_section2(&spec).map_err(e)?;
        ensure!(r.orbit_sums_to_zero, "{spec:?}: orbit sum");
        ensure!(
            r.l0_iso_j_gamma && r.l0_map.is_injective(),
            "{spec:?}: L₀ ≇ J_Γ"
        );
        ensure!(r.decomposition_ok, "{spec:?}: decomposition");
        ensure!(
            r.rank_l1 == r.rank_formula,
            "{spec:?}: rank {} ≠ {}",
            r.rank_l1,
            r.rank_formula
        );
        ensure!(
            r.sha2.factors_i64() == [2] && r.sha2.free_rank == 0,
            "{spec:?}: Ш² = {}",
            r.sha2
        );
        analyzed += 1;
    }
    ensure!(analyzed >= 10, "only {analyzed} specs");
    Ok(format!("{analyzed} specs"))
}

fn criterion_3() -> Outcome {
    let grid = common::lnu_grid();
    for spec in &grid {
        let l = l_nu(spec).map_err(e)?;
        ensure!(
            l.index_over_q() == int(spec.d as i64),
            "{spec:?}: index {}",
            l.index_over_q()
        );
        let r = verify_lemma_3_6(spec).map_err(e)?;
        ensure!(r.all_ok(), "{spec:?}: quotient {r:?}");
        let lam = lambda_and_n(spec).map_err(e)?;
        ensure!(lam.phi_image_ok, "{spec:?}: φ(L) ≠ N");
        ensure!(lam.quotient_ok(spec.r()), "{spec:?}: Λ/N");
    }
    Ok(format!("{} specs", grid.len()))
}

fn criterion_4() -> Outcome {
    let mut count = 0;
    for n in [3, 5, 7] {
        let (left, dual) = pgl_odd_outer_resolution(n).map_err(e)?;
        ensure!(left.shape == Shape::Left, "n = {n}: shape");
        left.check().map_err(|m| format!("n = {n}: {m}"))?;
        ensure!(
            left.p.rank() == 2 * n + 1,
            "n = {n}: rank M = {}",
            left.p.rank()
        );
        ensure!(
            left.p_prime.rank() == n + 2,
            "n = {n}: rank M′ = {}",
            left.p_prime.rank()
        );
        ensure!(
            dual.shape == Shape::Right && dual.lattice.rank() == n - 1,
            "n = {n}: dual"
        );
        dual.check().map_err(|m| format!("n = {n} dual: {m}"))?;
        count += 2;
    }
    let mut signed = Vec::new();
    for n in 1..=4 {
        signed.push((
            format!("Q(B{n})"),
            intermediate_from_types(&[DynkinType::b(n)], &[]).map_err(e)?,
        ));
    }
    for n in 2..=4 {
        signed.push((
            format!("X(SO{})", 2 * n),
            char_lattice(NamedGroup::SO(2 * n)).map_err(e)?,
        ));
    }
    for (name, lat) in signed {
        let r =
            sign_perm_resolution(&lat.lattice().map_err(e)?).map_err(|x| format!("{name}: {x}"))?;
        r.check().map_err(|m| format!("{name}: {m}"))?;
        count += 1;
    }
    let rank2 = [
        ("Q(G2)", DynkinType::g2(), vec![]),
        ("P(A2)", DynkinType::a(2), vec![vec![1]]),
        ("P(B2)", DynkinType::b(2), vec![vec![1]]),
        ("P(C2)", DynkinType::c(2), vec![vec![1]]),
        ("Q(C2)", DynkinType::c(2), vec![]),
    ];
    for (name, t, s) in rank2 {
        let lat = intermediate_from_types(&[t], &s)
            .map_err(e)?
            .lattice()
            .map_err(e)?;
        let r = rank_le2_resolution(&lat).map_err(|x| format!("{name}: {x}"))?;
        r.check().map_err(|m| format!("{name}: {m}"))?;
        count += 1;
    }
    Ok(format!("{count} resolutions verified"))
}

fn criterion_5() -> Outcome {
    let (mut instances, mut sha, mut cited) = (0, 0, 0);
    for f in common::grid() {
        for gens in common::subgroups(&f) {
            let v = classify(&f, &gens).map_err(|x| format!("{f:?} {gens:?}: {x}"))?;
            ensure!(
                v.is_quasi_permutation() == common::oracle(&f, &gens),
                "{f:?} {gens:?}: verdict differs from oracle"
            );
            let report = verify_certificate(&v);
            ensure!(report.ok, "{f:?} {gens:?}: {:?}", report.log);
            match &v.certificate {
                Certificate::NegativeSha { witness, .. } => {
                    ensure!(witness.is_nonzero(), "{f:?} {gens:?}: zero witness");
                    sha += 1;
                }
                Certificate::NegativeByReduction { .. } => cited += 1,
                _ => {}
            }
            instances += 1;
        }
    }
    let a1 = DynkinType::a(1);
    let a2 = DynkinType::a(2);
    let b1 = DynkinType::b(1);
    let so4 = classify(&[a1, a1], &[vec![1, 1]]).map_err(e)?;
    let so4_block = matches!(&so4.certificate, Certificate::PositiveResolution { .. })
        || matches!(&so4.certificate, Certificate::PositiveDecomposition { blocks } if blocks.len() == 1);
    ensure!(
        so4.is_quasi_permutation() && so4_block,
        "([A1,A1], diag) is not a single SO4 block"
    );
    ensure!(
        !classify(&[a2, a2], &[vec![1, 1]])
            .map_err(e)?
            .is_quasi_permutation(),
        "([A2,A2], diag) is QP"
    );
    let so6 = char_lattice(NamedGroup::SO(6)).map_err(e)?;
    ensure!(so6.types() == [DynkinType::d(3)], "X(SO6) types");
    ensure!(
        classify(&[DynkinType::d(3)], &[vec![2]])
            .map_err(e)?
            .is_quasi_permutation(),
        "X(SO6) not QP"
    );
    ensure!(
        !classify(&[b1, b1, b1, b1], &[vec![1, 1, 1, 1]])
            .map_err(e)?
            .is_quasi_permutation(),
        "B1^4 is QP"
    );
    Ok(format!(
        "{instances} instances match the oracle; {sha} Ш² witnesses, {cited} cited leaves"
    ))
}

fn additivity_pool(g: &Arc<FinGroup>) -> Vec<GLattice> {
    let j = j_gamma(g.clone());
    let mut pool = vec![
        GLattice::trivial(g.clone(), 1),
        GLattice::natural(g.clone()),
        j.dual(),
        j,
    ];
    let subs = g.all_subgroups();
    for h in subs
        .iter()
        .filter(|h| h.len() > 1 && h.len() < g.order())
        .take(3)
    {
        pool.push(GLattice::cosets(g.clone(), h));
    }
    pool
}

fn criterion_6() -> Outcome {
    let mut modules = 0;
    for (name, g) in group_suite() {
        for h in g.all_subgroups() {
            let m = GLattice::cosets(g.clone(), &h);
            let s = sha2(&g, &m).map_err(|x| format!("{name}: {x}"))?;
            ensure!(
                s.is_trivial(),
                "{name}, |H| = {}: Ш²(Z[Γ/H]) = {s}",
                h.len()
            );
            modules += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let groups = [
        klein(),
        perm_group(6, &[cycle(0, 3), cycle(3, 3)]),
        perm_group(4, &[cycle(0, 4), vec![0, 3, 2, 1]]),
        quaternion(),
    ];
    let pools: Vec<Vec<GLattice>> = groups.iter().map(additivity_pool).collect();
    let mut nonzero = 0;
    for _ in 0..50 {
        let k = rng.gen_range(0..groups.len());
        let parts: Vec<GLattice> = (0..rng.gen_range(2..=3))
            .map(|_| pools[k].choose(&mut rng).unwrap().clone())
            .collect();
        let sum = GLattice::direct_sum_all(&parts).map_err(e)?;
        let whole = sha2(&groups[k], &sum).map_err(e)?;
        let mut expected = AbelianInvariants::default();
        for p in &parts {
            expected = expected.direct_sum(&sha2(&groups[k], p).map_err(e)?);
        }
        ensure!(whole == expected, "Ш²(⊕) = {whole}, ⊕Ш² = {expected}");
        nonzero += usize::from(!whole.is_trivial());
    }

    let cases = elementary_abelian_cases()?;
    for (name, g, l) in &cases {
        for degree in [1, 2] {
            let bar = h_n_with(g, l, degree, Some(Method::Bar), DEFAULT_MAX_CELLS)
                .map_err(|x| format!("{name}: {x}"))?;
            let per = h_n_with(
                g,
                l,
                degree,
                Some(Method::PeriodicTensor),
                DEFAULT_MAX_CELLS,
            )
            .map_err(|x| format!("{name}: {x}"))?;
            ensure!(
                bar.group == per.group,
                "{name}: H^{degree} bar {} vs periodic {}",
                bar.group,
                per.group
            );
        }
    }
    Ok(format!(
        "{modules} permutation modules, 50 sums ({nonzero} with nonzero Ш²), {} bar/periodic comparisons",
        cases.len()
    ))
}

/// Elementary abelian cases from criteria 1–5 and 7: `(name, Γ, L)`.
fn elementary_abelian_cases() -> Result<Vec<(String, Arc<FinGroup>, GLattice)>, String> {
    let mut out = Vec::new();
    let k = klein();
    out.push(("J_Γ".into(), k.clone(), j_gamma(k)));
    for spec in common::section2_grid() {
        let Ok(part) = partition(&spec) else { continue };
        if spec.check_hypotheses().is_err() {
            continue;
        }
        let emb = klein_embedding(&spec, &part).map_err(e)?;
        let lat = section2_lattice(&spec).map_err(e)?;
        let g = Arc::new(close_group(&emb.j[..2], 8).map_err(e)?);
        let l = GLattice::natural(g.clone())
            .invariant_sublattice(&lat.l_basis)
            .map_err(e)?;
        out.push((format!("{spec:?}"), g, l));
    }
    for spec in common::lnu_grid() {
        let p = (2..=spec.d).find(|p| spec.d % p == 0).unwrap();
        let gens = elementary_abelian_subgroup(&spec, p).map_err(e)?;
        if gens.is_empty() {
            continue;
        }
        let l = l_nu(&spec)
            .map_err(e)?
            .lattice_over(&gens, 1 << 12)
            .map_err(e)?;
        let g = l.group().clone();
        if g.elementary_abelian().is_some() && g.order() <= 16 {
            out.push((format!("{spec:?}"), g, l));
        }
    }
    for f in common::grid() {
        for gens in common::subgroups(&f) {
            let v = classify(&f, &gens).map_err(e)?;
            let w = match &v.certificate {
                Certificate::NegativeSha { witness, .. } => witness,
                Certificate::NegativeByReduction { leaf, .. } => match &leaf.probe {
                    Some(p) => p,
                    None => continue,
                },
                _ => continue,
            };
            let l = intermediate_from_types(&w.types, &w.s_generators)
                .map_err(e)?
                .lattice_over(&w.gamma, 64)
                .map_err(e)?;
            let g = l.group().clone();
            if g.elementary_abelian().is_some() {
                out.push((format!("{f:?} {gens:?}"), g, l));
            }
        }
    }
    Ok(out)
}

fn criterion_7() -> Outcome {
    let a2 = DynkinType::a(2);
    let v = classify(&[a2, a2], &[vec![1, 1]]).map_err(e)?;
    ensure!(!v.is_quasi_permutation(), "verdict is QP");
    let Certificate::NegativeByReduction { leaf, .. } = &v.certificate else {
        return Err("expected a reduction certificate".into());
    };
    let probe = leaf.probe.as_ref().ok_or("no probe recorded")?;
    ensure!(
        probe.group_order == CRITERION_7_GROUP_ORDER,
        "group order {}",
        probe.group_order
    );
    let l = intermediate_from_types(&probe.types, &probe.s_generators)
        .map_err(e)?
        .lattice_over(&probe.gamma, 64)
        .map_err(e)?;
    ensure!(
        l.rank() == 4 && l.group().elementary_abelian() == Some((3, 2)),
        "not a rank-4 (Z/3)² lattice"
    );
    let crossed = sha2(l.group(), &l).map_err(e)?;
    let bar = sha2_with(l.group(), &l, Method::Bar, DEFAULT_MAX_CELLS).map_err(e)?;
    ensure!(
        crossed == bar && crossed == probe.sha2,
        "engines disagree: {crossed} / {bar} / {}",
        probe.sha2
    );
    ensure!(
        crossed.factors_i64() == CRITERION_7_SHA2 && crossed.free_rank == 0,
        "Ш² = {crossed}, recorded {CRITERION_7_SHA2:?}"
    );
    Ok(format!(
        "Ш² = {crossed} over (Z/3)², verdict not QP via the cyclic-diagonal leaf"
    ))
}

#[test]
fn acceptance() {
    let criteria: [fn() -> Outcome; 7] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
    ];
    let results: Vec<bool> = criteria
        .iter()
        .enumerate()
        .map(|(i, f)| run(i + 1, *f))
        .collect();
    let failed: Vec<usize> = (1..=7).filter(|&i| !results[i - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
