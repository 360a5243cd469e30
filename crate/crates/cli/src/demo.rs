//! Reference checks replayed by `cayley demo-paper`.

use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use cayley_lattice::classify::{classify, verify_certificate, BlockTag, Certificate, Verdict};
use cayley_lattice::cohomology::sha2;
use cayley_lattice::constructions::*;
use cayley_lattice::glattice::{close_group, permutation_matrix};
use cayley_lattice::intmat::{int, Int, IntMatrix};
use cayley_lattice::json::{to_document, ResolutionDoc};
use cayley_lattice::resolutions::{
    block_resolution, pgl_odd_outer_resolution, rank_le2_resolution, sign_perm_resolution,
    signed_basis_search,
};
use cayley_lattice::rootdata::{char_lattice, intermediate_from_types, DynkinType, NamedGroup};
use cayley_lattice::{AbelianInvariants, Error, FinGroup, GLattice};

type Outcome = Result<String, String>;

struct Check {
    group: &'static str,
    name: &'static str,
    run: Box<dyn Fn() -> Outcome>,
}

#[derive(Serialize)]
struct CheckResult {
    group: &'static str,
    name: &'static str,
    passed: bool,
    detail: String,
    seconds: f64,
}

#[derive(Serialize)]
struct Report {
    passed: bool,
    seed: u64,
    checks: Vec<CheckResult>,
}

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

fn check(group: &'static str, name: &'static str, run: impl Fn() -> Outcome + 'static) -> Check {
    Check {
        group,
        name,
        run: Box::new(run),
    }
}

pub fn run(json: bool, filter: Option<&str>, seed: u64) -> Result<u8, Error> {
    let selected: Vec<Check> = checks(seed)
        .into_iter()
        .filter(|c| filter.is_none_or(|f| c.group.starts_with(f) || c.name.starts_with(f)))
        .collect();
    if selected.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no check matches {:?}",
            filter.unwrap_or_default()
        )));
    }
    let mut results = Vec::new();
    for c in &selected {
        let start = Instant::now();
        let outcome = (c.run)();
        let seconds = start.elapsed().as_secs_f64();
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if !json {
            crate::write_out(&format!(
                "{} {}/{}: {detail}\n",
                if passed { "PASS" } else { "FAIL" },
                c.group,
                c.name
            ));
        }
        results.push(CheckResult {
            group: c.group,
            name: c.name,
            passed,
            detail,
            seconds,
        });
    }
    let passed = results.iter().all(|r| r.passed);
    if json {
        crate::write_out(&to_document(&Report {
            passed,
            seed,
            checks: results,
        })?);
    } else {
        let failed = results.iter().filter(|r| !r.passed).count();
        crate::write_out(&format!("{} checks, {failed} failed\n", results.len()));
    }
    Ok(if passed { 0 } else { 3 })
}

fn klein() -> Result<Arc<FinGroup>, String> {
    let a = permutation_matrix(&[1, 0, 2, 3]);
    let b = permutation_matrix(&[0, 1, 3, 2]);
    Ok(Arc::new(close_group(&[a, b], 8).map_err(e)?))
}

fn lattice(t: DynkinType, s: &[Vec<i64>]) -> Result<GLattice, String> {
    intermediate_from_types(&[t], s)
        .map_err(e)?
        .lattice()
        .map_err(e)
}

fn verdict(f: &[DynkinType], s: &[Vec<i64>]) -> Result<Verdict, String> {
    let v = classify(f, s).map_err(e)?;
    let r = verify_certificate(&v);
    ensure!(r.ok, "certificate rejected: {:?}", r.log);
    Ok(v)
}

fn checks(seed: u64) -> Vec<Check> {
    let a = DynkinType::a;
    let b = DynkinType::b;
    let c = DynkinType::c;
    let d = DynkinType::d;
    vec![
        // root data
        check("rootdata", "a2-index-and-weyl-order", move || {
            let l = intermediate_from_types(&[a(2)], &[]).map_err(e)?;
            ensure!(
                l.index_in_p() == int(3) && l.weyl_order() == 6,
                "[P:Q] = {}, |W| = {}",
                l.index_in_p(),
                l.weyl_order()
            );
            Ok("[P:Q] = 3, |W| = 6".into())
        }),
        check("rootdata", "d3-fundamental-group", move || {
            let l = intermediate_from_types(&[d(3)], &[]).map_err(e)?;
            let p = intermediate_from_types(&[d(3)], &[vec![1]]).map_err(e)?;
            let rows: Vec<Vec<Int>> = (0..l.basis.rows())
                .map(|i| p.coordinates(l.basis.row(i)).ok_or("Q ⊄ P"))
                .collect::<Result<_, _>>()?;
            let q = IntMatrix::from_rows(rows, p.rank());
            let info = p.lattice().map_err(e)?.quotient_by(&q).map_err(e)?;
            ensure!(
                info.invariants.factors_i64() == [4] && info.invariants.free_rank == 0,
                "P/Q = {}",
                info.invariants
            );
            Ok("P/Q = Z/4".into())
        }),
        check("rootdata", "so6-indices", move || {
            let l = char_lattice(NamedGroup::SO(6)).map_err(e)?;
            ensure!(l.types() == [d(3)], "types {:?}", l.types());
            ensure!(
                l.index_over_q() == int(2) && l.index_in_p() == int(2),
                "[L:Q] = {}, [P:L] = {}",
                l.index_over_q(),
                l.index_in_p()
            );
            Ok("[P:L] = [L:Q] = 2".into())
        }),
        check("rootdata", "so4-is-the-a1-pair", move || {
            let so4 = char_lattice(NamedGroup::SO(4)).map_err(e)?;
            let pair = intermediate_from_types(&[a(1), a(1)], &[vec![1, 1]]).map_err(e)?;
            ensure!(
                so4.index_over_q() == pair.index_over_q() && so4.index_in_p() == pair.index_in_p(),
                "indices differ"
            );
            for l in [&so4, &pair] {
                ensure!(
                    signed_basis_search(&l.lattice().map_err(e)?).is_some(),
                    "no signed basis"
                );
            }
            let v = verdict(&so4.types(), &so4.s_generators)?;
            let Certificate::PositiveDecomposition { blocks } = &v.certificate else {
                return Err("not a decomposition".into());
            };
            ensure!(
                blocks.len() == 1 && blocks[0].kind == BlockTag::So4Pair,
                "not one SO4 block"
            );
            Ok("X(SO4) is the SO4 block of [A1, A1]".into())
        }),
        check("rootdata", "so7-signed-basis", move || {
            let l = char_lattice(NamedGroup::SO(7)).map_err(e)?;
            ensure!(
                l.types() == [b(3)] && l.index_over_q() == int(1),
                "not Q(B3)"
            );
            ensure!(
                l.lattice().map_err(e)?.is_sign_permutation().is_some(),
                "no signed-permutation witness"
            );
            Ok("Q(B3), coordinate basis is signed-permutation".into())
        }),
        // J_Γ
        check("jgamma", "klein-rank-and-sha2", move || {
            let j = j_gamma(klein()?);
            let s = sha2(j.group(), &j).map_err(e)?;
            ensure!(
                j.rank() == 3 && s.factors_i64() == [2] && s.free_rank == 0,
                "rank {}, Ш² = {s}",
                j.rank()
            );
            Ok("rank 3, Ш² = Z/2".into())
        }),
        // one-vector construction
        check("section2", "b2-b1", move || {
            let spec =
                Section2Spec::new(vec![BdFactor::b(2), BdFactor::b(1)], vec![]).map_err(e)?;
            let lat = section2_lattice(&spec).map_err(e)?;
            ensure!(
                lat.rank() == 3 && lat.index() == int(2),
                "rank {}, index {}",
                lat.rank(),
                lat.index()
            );
            let r = analyze_section2(&spec).map_err(e)?;
            ensure!(r.all_ok(), "analysis failed");
            ensure!(r.rank_l1 == 3 && r.complements.is_empty(), "L₁ ≠ L₀");
            let p = partition(&spec).map_err(e)?;
            let emb = klein_embedding(&spec, &p).map_err(e)?;
            let [j1, j2, j3] = [&emb.j[0], &emb.j[1], &emb.j[2]];
            ensure!(j1 != j2 && j2 != j3 && j1 != j3, "involutions coincide");
            ensure!(
                j1.mul(j1) == IntMatrix::identity(j1.rows()) && &j1.mul(j2) == j3,
                "not a Klein four-group"
            );
            Ok("rank 3, [L:L′] = 2, L₁ = L₀, Ш² = Z/2".into())
        }),
        check("section2", "b1-a3", move || {
            let spec = Section2Spec::new(vec![BdFactor::b(1)], vec![2]).map_err(e)?;
            let lat = section2_lattice(&spec).map_err(e)?;
            ensure!(
                lat.rank() == 4 && lat.index() == int(2),
                "rank {}, index {}",
                lat.rank(),
                lat.index()
            );
            let r = analyze_section2(&spec).map_err(e)?;
            ensure!(r.all_ok(), "analysis failed");
            ensure!(!r.partition.unions[0].is_empty(), "U₁ empty");
            Ok("rank 4, [L:L′] = 2, Ш² = Z/2".into())
        }),
        check("section2", "d3-b1-partition", move || {
            let spec =
                Section2Spec::new(vec![BdFactor::d(3), BdFactor::b(1)], vec![]).map_err(e)?;
            let p = partition(&spec).map_err(e)?;
            ensure!(p.unions.iter().all(|u| !u.is_empty()), "some U_κ empty");
            ensure!(
                p.parts[0].iter().all(|s| s.len() == 1),
                "S₁ not split 1+1+1"
            );
            ensure!(p.satisfies_parity(&spec), "parity");
            Ok("all U_κ nonempty".into())
        }),
        check("section2", "grid", move || {
            let mut n = 0;
            for spec in Section2Spec::enumerate(6) {
                if spec.check_hypotheses().is_ok() {
                    let r = analyze_section2(&spec).map_err(e)?;
                    ensure!(
                        r.all_ok() && section2_lattice(&spec).map_err(e)?.index() == int(2),
                        "{spec:?}"
                    );
                    n += 1;
                }
            }
            Ok(format!("{n} specs of rank ≤ 6, all with Ш² = Z/2"))
        }),
        // L_ν
        check("lnu", "p-a2", move || {
            let l = l_nu(&LnuSpec::trivial_nu(vec![3], 3).map_err(e)?).map_err(e)?;
            let p = intermediate_from_types(&[a(2)], &[vec![1]]).map_err(e)?;
            ensure!(l.basis == p.basis, "L ≠ P(A2)");
            Ok("L = P(A2)".into())
        }),
        check("lnu", "lambda-2-2", move || {
            let spec = LnuSpec::trivial_nu(vec![2, 2], 2).map_err(e)?;
            let lam = lambda_and_n(&spec).map_err(e)?;
            ensure!(lam.quotient_ok(2), "Λ/N = {}", lam.quotient.invariants);
            Ok("Λ₄(2)/N = Z".into())
        }),
        check("lnu", "phi-3-3", move || {
            let lam = lambda_and_n(&LnuSpec::trivial_nu(vec![3, 3], 3).map_err(e)?).map_err(e)?;
            ensure!(lam.phi_image_ok, "φ(L) ≠ N");
            Ok("φ(L) = N".into())
        }),
        check("lnu", "subgroup-3-3", move || {
            let spec = LnuSpec::trivial_nu(vec![3, 3], 3).map_err(e)?;
            let gens = elementary_abelian_subgroup(&spec, 3).map_err(e)?;
            let g = close_group(&gens, 64).map_err(e)?;
            ensure!(
                g.elementary_abelian() == Some((3, 2)),
                "order {}",
                g.order()
            );
            Ok("(Z/3)²".into())
        }),
        check("lnu", "grid", move || {
            let grid = LnuSpec::enumerate(8);
            for spec in &grid {
                ensure!(
                    l_nu(spec).map_err(e)?.index_over_q() == int(spec.d as i64),
                    "{spec:?}: index"
                );
                ensure!(
                    verify_lemma_3_6(spec).map_err(e)?.all_ok(),
                    "{spec:?}: quotient"
                );
                let lam = lambda_and_n(spec).map_err(e)?;
                ensure!(
                    lam.phi_image_ok && lam.quotient_ok(spec.r()),
                    "{spec:?}: Λ/N"
                );
            }
            Ok(format!("{} specs with Σn ≤ 8", grid.len()))
        }),
        // resolutions
        check("resolutions", "pgl-odd", move || {
            for n in [3, 5, 7] {
                let (left, dual) = pgl_odd_outer_resolution(n).map_err(e)?;
                left.check().map_err(|m| format!("n = {n}: {m}"))?;
                dual.check().map_err(|m| format!("n = {n} dual: {m}"))?;
                ensure!(
                    left.p.rank() == 2 * n + 1 && left.p_prime.rank() == n + 2,
                    "n = {n}: ranks"
                );
            }
            Ok("n = 3, 5, 7: ranks 2n+1 and n+2, duals verify".into())
        }),
        check("resolutions", "signed", move || {
            let mut lats = vec![
                lattice(b(1), &[])?,
                lattice(b(2), &[])?,
                lattice(b(3), &[])?,
                lattice(b(4), &[])?,
            ];
            for m in [4, 6, 8] {
                lats.push(
                    char_lattice(NamedGroup::SO(m))
                        .map_err(e)?
                        .lattice()
                        .map_err(e)?,
                );
            }
            for l in &lats {
                sign_perm_resolution(l).map_err(e)?.check()?;
            }
            Ok("Q(B1..B4), X(SO4), X(SO6), X(SO8)".into())
        }),
        check("resolutions", "rank-two", move || {
            for (t, s) in [
                (DynkinType::g2(), vec![]),
                (b(2), vec![]),
                (a(2), vec![vec![1]]),
                (b(2), vec![vec![1]]),
                (c(2), vec![]),
            ] {
                rank_le2_resolution(&lattice(t, &s)?).map_err(e)?.check()?;
            }
            Ok("Q(G2), Q(B2), P(A2), P(B2), Q(C2)".into())
        }),
        check("resolutions", "block-dispatch", move || {
            for (t, s) in [(a(2), vec![]), (a(2), vec![vec![1]]), (d(3), vec![vec![2]])] {
                let r =
                    block_resolution(&intermediate_from_types(&[t], &s).map_err(e)?).map_err(e)?;
                r.check()?;
            }
            Ok("Q(A2), P(A2), X(SO6)".into())
        }),
        // classification
        check("classify", "so4-pair", move || {
            let v = verdict(&[a(1), a(1)], &[vec![1, 1]])?;
            let Certificate::PositiveDecomposition { blocks } = &v.certificate else {
                return Err("not a decomposition".into());
            };
            ensure!(
                blocks.len() == 1
                    && blocks[0].kind == BlockTag::So4Pair
                    && blocks[0].indices == [0, 1],
                "blocks"
            );
            Ok("quasi-permutation, one SO4 block".into())
        }),
        check("classify", "a2-a2-diagonal", move || {
            let v = verdict(&[a(2), a(2)], &[vec![1, 1]])?;
            ensure!(!v.is_quasi_permutation(), "classified quasi-permutation");
            Ok("not quasi-permutation".into())
        }),
        check("classify", "g2", move || {
            ensure!(
                verdict(&[DynkinType::g2()], &[])?.is_quasi_permutation(),
                "not quasi-permutation"
            );
            Ok("quasi-permutation".into())
        }),
        check("classify", "b2-b1-certificate", move || {
            let v = verdict(&[b(2), b(1)], &[vec![1, 1]])?;
            let Certificate::NegativeSha { witness, .. } = &v.certificate else {
                return Err("no Ш² witness".into());
            };
            ensure!(witness.sha2.factors_i64() == [2], "Ш² = {}", witness.sha2);
            Ok("verified, Ш² = Z/2".into())
        }),
        check("classify", "tampered-certificate", move || {
            let mut v = verdict(&[a(1), a(1)], &[vec![1, 1]])?;
            let Certificate::PositiveDecomposition { blocks } = &mut v.certificate else {
                return Err("not a decomposition".into());
            };
            let r: &mut ResolutionDoc = &mut blocks[0].resolution;
            let x = r.pi.get(0, 0) + Int::from(1);
            r.pi.set(0, 0, x);
            ensure!(!verify_certificate(&v).ok, "tampered π accepted");
            Ok("tampered π rejected".into())
        }),
        // cohomology
        check("cohomology", "additivity", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = klein()?;
            let j = j_gamma(g.clone());
            let pool = [
                GLattice::trivial(g.clone(), 1),
                GLattice::natural(g.clone()),
                j.dual(),
                j,
            ];
            for _ in 0..10 {
                let parts: Vec<GLattice> = (0..rng.gen_range(2..=3))
                    .map(|_| pool.choose(&mut rng).unwrap().clone())
                    .collect();
                let whole = sha2(&g, &GLattice::direct_sum_all(&parts).map_err(e)?).map_err(e)?;
                let mut sum = AbelianInvariants::default();
                for p in &parts {
                    sum = sum.direct_sum(&sha2(&g, p).map_err(e)?);
                }
                ensure!(whole == sum, "Ш²(⊕) = {whole}, ⊕Ш² = {sum}");
            }
            Ok("10 random sums".into())
        }),
    ]
}
