//! JSON conventions shared by every document the crate emits.
//!
//! Integers of absolute value at most `2^53 − 1` are plain numbers, larger
//! ones decimal strings. Matrices are arrays of rows.

use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::glattice::{close_group, GLattice, PermutationWitness};
use crate::intmat::{AbelianInvariants, Int, IntMatrix};
use crate::resolutions::{PositiveResolution, Shape};

/// `2^53 − 1`.
pub const MAX_SAFE_INTEGER: i64 = (1 << 53) - 1;

pub fn int_to_value(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) if v.unsigned_abs() <= MAX_SAFE_INTEGER as u64 => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn int_from_value(v: &Value) -> std::result::Result<Int, String> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) if i.unsigned_abs() <= MAX_SAFE_INTEGER as u64 => Ok(Int::from(i)),
            _ => Err(format!(
                "number {n} is not an exactly representable integer"
            )),
        },
        Value::String(s) => {
            let x: Int = s
                .parse()
                .map_err(|_| format!("{s:?} is not a decimal integer"))?;
            if x.abs() <= Int::from(MAX_SAFE_INTEGER) {
                return Err(format!("{s:?} must be written as a number"));
            }
            Ok(x)
        }
        other => Err(format!("expected an integer, found {other}")),
    }
}

struct IntRef<'a>(&'a Int);

impl Serialize for IntRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        int_to_value(self.0).serialize(s)
    }
}

struct RowRef<'a>(&'a [Int]);

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in self.0 {
            seq.serialize_element(&IntRef(x))?;
        }
        seq.end()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows()))?;
        for i in 0..self.rows() {
            seq.serialize_element(&RowRef(self.row(i)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Value>> = Vec::deserialize(d)?;
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        let mut out = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(de::Error::custom(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            out.push(
                r.iter()
                    .map(int_from_value)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| de::Error::custom(format!("row {i}: {e}")))?,
            );
        }
        Ok(IntMatrix::from_rows(out, cols))
    }
}

#[derive(Serialize, Deserialize)]
struct InvariantsDoc {
    factors: Vec<Value>,
    free_rank: usize,
}

impl Serialize for AbelianInvariants {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InvariantsDoc {
            factors: self.factors.iter().map(int_to_value).collect(),
            free_rank: self.free_rank,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbelianInvariants {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = InvariantsDoc::deserialize(d)?;
        let factors = doc
            .factors
            .iter()
            .map(int_from_value)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(de::Error::custom)?;
        Ok(AbelianInvariants {
            factors,
            free_rank: doc.free_rank,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub basis: IntMatrix,
    pub generator_permutations: Vec<Vec<usize>>,
}

/// A resolution as data: the group by its generating matrices and every
/// module by the images of those generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionDoc {
    pub shape: Shape,
    pub group_generators: Vec<IntMatrix>,
    pub lattice: Vec<IntMatrix>,
    pub p: Vec<IntMatrix>,
    pub p_prime: Vec<IntMatrix>,
    pub iota: IntMatrix,
    pub pi: IntMatrix,
    pub p_witness: WitnessDoc,
    pub p_prime_witness: WitnessDoc,
}

fn witness_doc(w: &PermutationWitness) -> WitnessDoc {
    WitnessDoc {
        basis: w.basis.clone(),
        generator_permutations: w.generator_permutations.clone(),
    }
}

fn witness_from(w: &WitnessDoc) -> PermutationWitness {
    PermutationWitness {
        basis: w.basis.clone(),
        generator_permutations: w.generator_permutations.clone(),
    }
}

/// Module from generator images. The trivial group has no generators, so its
/// rank comes from the shapes of the maps instead.
fn module(
    group: &Arc<crate::FinGroup>,
    images: &[IntMatrix],
    rank_hint: usize,
) -> Result<GLattice> {
    if images.is_empty() {
        return Ok(GLattice::trivial(group.clone(), rank_hint));
    }
    GLattice::from_generator_images(group.clone(), images.to_vec())
}

impl ResolutionDoc {
    pub fn from_resolution(r: &PositiveResolution) -> ResolutionDoc {
        ResolutionDoc {
            shape: r.shape,
            group_generators: r.lattice.group().generator_matrices(),
            lattice: r.lattice.generator_actions().to_vec(),
            p: r.p.generator_actions().to_vec(),
            p_prime: r.p_prime.generator_actions().to_vec(),
            iota: r.iota.clone(),
            pi: r.pi.clone(),
            p_witness: witness_doc(&r.p_witness),
            p_prime_witness: witness_doc(&r.p_prime_witness),
        }
    }

    /// Rebuilds the resolution; the group is closed under `cap`.
    pub fn to_resolution(&self, cap: usize) -> Result<PositiveResolution> {
        let dim = self
            .group_generators
            .first()
            .map(IntMatrix::rows)
            .unwrap_or(0);
        let group = Arc::new(if self.group_generators.is_empty() {
            crate::FinGroup::trivial(dim)
        } else {
            close_group(&self.group_generators, cap)?
        });
        let (l_rank, p_rank, pp_rank) = match self.shape {
            Shape::Right => (self.iota.rows(), self.iota.cols(), self.pi.cols()),
            Shape::Left => (self.pi.cols(), self.pi.rows(), self.iota.rows()),
        };
        Ok(PositiveResolution {
            shape: self.shape,
            lattice: module(&group, &self.lattice, l_rank)?,
            p: module(&group, &self.p, p_rank)?,
            p_prime: module(&group, &self.p_prime, pp_rank)?,
            iota: self.iota.clone(),
            pi: self.pi.clone(),
            p_witness: witness_from(&self.p_witness),
            p_prime_witness: witness_from(&self.p_prime_witness),
        })
    }
}

/// Serializes with stable field order and a trailing newline.
pub fn to_document<T: Serialize>(value: &T) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_document<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("line {} column {}: {e}", e.line(), e.column())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::ints;

    #[test]
    fn i64_min_is_not_a_number() {
        let x = Int::from(i64::MIN);
        assert_eq!(int_to_value(&x), Value::String(x.to_string()));
        assert!(int_from_value(&serde_json::json!(i64::MIN)).is_err());
    }

    #[test]
    fn big_entries_become_strings() {
        let big = Int::from(MAX_SAFE_INTEGER + 1);
        let m = IntMatrix::from_rows(vec![vec![Int::from(-3), big.clone()]], 2);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, format!("[[-3,\"{big}\"]]"));
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let edge = IntMatrix::from_rows(vec![ints(&[MAX_SAFE_INTEGER])], 1);
        assert_eq!(
            serde_json::to_string(&edge).unwrap(),
            format!("[[{MAX_SAFE_INTEGER}]]")
        );
    }

    #[test]
    fn rejects_lossy_forms() {
        assert!(serde_json::from_str::<IntMatrix>("[[1.5]]").is_err());
        assert!(serde_json::from_str::<IntMatrix>("[[\"7\"]]").is_err());
        assert!(serde_json::from_str::<IntMatrix>("[[1,2],[3]]").is_err());
    }

    #[test]
    fn resolution_round_trip() {
        let lat =
            crate::rootdata::intermediate_from_types(&[crate::rootdata::DynkinType::b(2)], &[])
                .unwrap();
        let r = crate::resolutions::block_resolution(&lat).unwrap();
        let doc = ResolutionDoc::from_resolution(&r);
        let text = to_document(&doc).unwrap();
        let back: ResolutionDoc = from_document(&text).unwrap();
        assert_eq!(back, doc);
        assert!(back.to_resolution(1000).unwrap().verify());
    }
}
