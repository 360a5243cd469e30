//! Independent checking of classification certificates.
//!
//! Everything is rebuilt from the recorded factors and subgroup: resolutions
//! are re-verified and compared against freshly built block lattices,
//! reduction traces are replayed, and every `Ш²` is recomputed.

use serde::{Deserialize, Serialize};

use crate::json::ResolutionDoc;
use crate::rootdata::{intermediate_from_types, DynkinType, Family};

use super::atoms::{atom_allowed, is_so4_pair, ResidueGroup};
use super::witness::unit_spec;
use super::{
    atom_group, is_quasi_permutation, pairs_of, BlockTag, Budget, Certificate, Claim, Reason,
    Status, Step, Verdict,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    /// The conclusion follows from computation alone, with no cited leaf.
    pub machine_verified: bool,
    pub log: Vec<String>,
}

type Check = std::result::Result<(), String>;

pub fn verify_certificate(v: &Verdict) -> VerifyReport {
    verify_certificate_with(v, &Budget::default())
}

pub fn verify_certificate_with(v: &Verdict, budget: &Budget) -> VerifyReport {
    let mut log = Vec::new();
    let result = run(v, budget, &mut log);
    let cited = matches!(v.certificate, Certificate::NegativeByReduction { .. });
    match result {
        Ok(()) => {
            log.push(if cited {
                "ok (ends in a cited leaf)".into()
            } else {
                "ok".into()
            });
            VerifyReport {
                ok: true,
                machine_verified: !cited,
                log,
            }
        }
        Err(e) => {
            log.push(format!("rejected: {e}"));
            VerifyReport {
                ok: false,
                machine_verified: false,
                log,
            }
        }
    }
}

fn run(v: &Verdict, budget: &Budget, log: &mut Vec<String>) -> Check {
    let (atoms, s) = atom_group(&v.factors, &v.subgroup).map_err(|e| format!("input: {e}"))?;
    log.push(format!("input: {} atoms, |S| = {}", atoms.len(), s.order()));
    match (&v.certificate, v.status) {
        (Certificate::PositiveResolution { resolution }, Status::QuasiPermutation) => {
            if atoms.len() != 1 || v.factors.len() != 1 {
                return Err("a single resolution needs a single one-atom factor".into());
            }
            check_resolution(resolution, &s, budget)?;
            log.push("resolution verified".into());
            Ok(())
        }
        (Certificate::PositiveDecomposition { blocks }, Status::QuasiPermutation) => {
            let mut covered = vec![false; atoms.len()];
            for (k, b) in blocks.iter().enumerate() {
                let ctx = |e: String| format!("block {k}: {e}");
                if b.atoms.is_empty() || b.atoms.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ctx("atoms must be strictly increasing".into()));
                }
                for &a in &b.atoms {
                    if a >= atoms.len() || std::mem::replace(&mut covered[a], true) {
                        return Err(ctx(format!("atom {a} is out of range or repeated")));
                    }
                }
                if !s.splits(&b.atoms) {
                    return Err(ctx("S does not split along the block".into()));
                }
                let sub = s.restrict(&b.atoms);
                let mut indices: Vec<usize> = b.atoms.iter().map(|&a| atoms[a].factor).collect();
                indices.dedup();
                if b.indices != indices || b.types != sub.types {
                    return Err(ctx("factor indices or types do not match the input".into()));
                }
                let recorded = ResidueGroup::generated(&b.types, &b.s_generators, usize::MAX)
                    .map_err(|e| ctx(e.to_string()))?;
                if recorded != sub {
                    return Err(ctx("recorded subgroup differs from S ∩ F_B".into()));
                }
                let pair = is_so4_pair(&sub.types, &sub);
                if (b.kind == BlockTag::So4Pair) != pair {
                    return Err(ctx("block kind does not match".into()));
                }
                if b.kind == BlockTag::Simple
                    && (b.atoms.len() != 1 || !atom_allowed(sub.types[0], &sub))
                {
                    return Err(ctx("simple block is not a positive-list atom".into()));
                }
                check_resolution(&b.resolution, &sub, budget).map_err(ctx)?;
                log.push(format!(
                    "block {k} ({:?}, atoms {:?}) verified",
                    b.kind, b.atoms
                ));
            }
            if covered.iter().any(|c| !c) {
                return Err("blocks do not cover every atom".into());
            }
            Ok(())
        }
        (Certificate::NegativeSha { trace, witness }, Status::NotQuasiPermutation) => {
            let cur = replay(trace, s, log)?;
            let recorded =
                ResidueGroup::generated(&witness.types, &witness.s_generators, usize::MAX)
                    .map_err(|e| e.to_string())?;
            if witness.types != cur.types || recorded != cur {
                return Err("witness lattice is not the lattice reached by the trace".into());
            }
            if !witness.is_nonzero() {
                return Err("recorded Ш² is zero".into());
            }
            witness.recheck(budget)?;
            log.push(format!(
                "Ш² over a subgroup of order {} recomputed: {}",
                witness.group_order, witness.sha2
            ));
            Ok(())
        }
        (Certificate::NegativeByReduction { trace, leaf }, Status::NotQuasiPermutation) => {
            let cur = replay(trace, s, log)?;
            let last = trace.last();
            let ok = match leaf.claim {
                Claim::OffListAtom => cur.types.len() == 1 && !atom_allowed(cur.types[0], &cur),
                Claim::CyclicDiagonal => matches!(last, Some(Step::CyclicDiagonal { .. })),
                Claim::RankOneAtoms => cur.types.iter().all(|t| t.rank() == 1),
                Claim::OneVector => true,
            };
            if !ok {
                return Err(format!(
                    "leaf claim {:?} does not apply to the reached lattice",
                    leaf.claim
                ));
            }
            if is_quasi_permutation(&cur).map_err(|e| e.to_string())? {
                return Err("the reached lattice is quasi-permutation".into());
            }
            if let Some(p) = &leaf.probe {
                if p.types != cur.types {
                    return Err("probe is over a different lattice".into());
                }
                p.recheck(budget)?;
                log.push(format!(
                    "probe Ш² over a subgroup of order {} recomputed: {}",
                    p.group_order, p.sha2
                ));
            }
            log.push(format!("cited leaf: {}", leaf.claim.statement()));
            Ok(())
        }
        (_, status) => Err(format!("certificate kind does not match status {status:?}")),
    }
}

/// Rebuilds the block lattice and compares it with the resolution's.
fn check_resolution(doc: &ResolutionDoc, s: &ResidueGroup, budget: &Budget) -> Check {
    let lat = intermediate_from_types(&s.types, &s.generators()).map_err(|e| e.to_string())?;
    if doc.group_generators != lat.weyl_generators() {
        return Err("group generators are not the simple reflections".into());
    }
    let cap = (lat.weyl_order() as usize)
        .saturating_add(1)
        .max(budget.max_group_order);
    let res = doc.to_resolution(cap).map_err(|e| e.to_string())?;
    let expected = lat.lattice().map_err(|e| e.to_string())?;
    if res.lattice.generator_actions() != expected.generator_actions() {
        return Err("resolved lattice differs from the block lattice".into());
    }
    res.check()
}

/// Replays a trace from `s`, returning the lattice it ends at.
fn replay(
    trace: &[Step],
    mut cur: ResidueGroup,
    log: &mut Vec<String>,
) -> std::result::Result<ResidueGroup, String> {
    for (k, step) in trace.iter().enumerate() {
        let ctx = |e: &str| format!("step {k}: {e}");
        match step {
            Step::Restrict { atoms, reason } => {
                if atoms.is_empty()
                    || atoms.windows(2).any(|w| w[0] >= w[1])
                    || atoms.iter().any(|&a| a >= cur.types.len())
                {
                    return Err(ctx("bad atom list"));
                }
                match reason {
                    Reason::Split if !cur.splits(atoms) => return Err(ctx("not a splitting set")),
                    Reason::Projection if atoms.len() != 1 => {
                        return Err(ctx("projection to more than one atom"))
                    }
                    _ => {}
                }
                cur = cur.restrict(atoms);
                log.push(format!("step {k}: restrict to {atoms:?} ({reason:?})"));
            }
            Step::OneVector { units, spec } => {
                let mut seen = vec![false; cur.types.len()];
                for u in units {
                    for &a in &u.atoms {
                        if a >= seen.len() || std::mem::replace(&mut seen[a], true) {
                            return Err(ctx("units overlap or are out of range"));
                        }
                    }
                }
                if seen.iter().any(|x| !x) {
                    return Err(ctx("units do not cover the lattice"));
                }
                if unit_spec(units).ok().as_ref() != Some(spec) || spec.check_hypotheses().is_err()
                {
                    return Err(ctx("one-vector spec does not match its units"));
                }
                log.push(format!(
                    "step {k}: one-vector form over {} units",
                    units.len()
                ));
            }
            Step::CyclicDiagonal { spec } => {
                if spec.n_list.len() != cur.types.len() {
                    return Err(ctx("wrong number of factors"));
                }
                for (t, &n) in cur.types.iter().zip(&spec.n_list) {
                    let matches = match t.family {
                        Family::A => t.n + 1 == n,
                        Family::D => t.n == 3 && n == 4,
                        _ => false,
                    };
                    if !matches || n < 3 {
                        return Err(ctx(&format!("{t} is not A_{}", n - 1)));
                    }
                }
                let g: Vec<i64> = spec
                    .nu_list
                    .iter()
                    .zip(&spec.n_list)
                    .map(|(&nu, &n)| (nu * n / spec.d) as i64)
                    .collect();
                let expected = ResidueGroup::generated(&cur.types, &[g], usize::MAX)
                    .map_err(|e| e.to_string())?;
                if expected != cur || cur.order() != spec.d {
                    return Err(ctx("S is not the cyclic diagonal subgroup of the spec"));
                }
                log.push(format!(
                    "step {k}: S is cyclic diagonal of order {}",
                    spec.d
                ));
            }
            Step::RankOnePairs { pairs, consistent } => {
                if cur.types.iter().any(|t: &DynkinType| t.rank() != 1) {
                    return Err(ctx("pairs over atoms of higher rank"));
                }
                let m = pairs_of(&cur);
                if &m.pairs != pairs || m.consistent != *consistent {
                    return Err(ctx("pair conditions differ"));
                }
                log.push(format!("step {k}: {} pair conditions", pairs.len()));
            }
        }
    }
    Ok(cur)
}
