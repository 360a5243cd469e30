//! Group-spec documents:
//! `{"factors":[{"family":"A","n":2},...],"subgroup":[[1,1],...]}` or a
//! named group `{"group":"SO","param":7}`. Lattice sources for `sha2` and
//! `cohomology` may add `"gamma"`, generators of a subgroup of the Weyl
//! group as ambient matrices.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use cayley_lattice::json::from_document;
use cayley_lattice::rootdata::{char_lattice, DynkinType, Family, NamedGroup};
use cayley_lattice::{Error, IntMatrix};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    family: String,
    #[serde(default)]
    n: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpecDoc {
    #[serde(default)]
    factors: Option<Vec<FactorDoc>>,
    #[serde(default)]
    subgroup: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    group: Option<String>,
    #[serde(default)]
    param: Option<usize>,
    #[serde(default)]
    gamma: Option<Vec<IntMatrix>>,
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub factors: Vec<DynkinType>,
    pub subgroup: Vec<Vec<i64>>,
    pub gamma: Option<Vec<IntMatrix>>,
}

fn invalid(msg: String) -> Error {
    Error::InvalidInput(msg)
}

/// Reads a file, or stdin for `None` and `-`.
pub fn read_input(path: Option<&Path>) -> Result<String, Error> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text =
                std::fs::read_to_string(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| invalid(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

pub fn parse_group_spec(text: &str, allow_gamma: bool) -> Result<GroupSpec, Error> {
    let doc: GroupSpecDoc = from_document(text)?;
    if doc.gamma.is_some() && !allow_gamma {
        return Err(invalid("gamma: not accepted by this command".into()));
    }
    match (doc.factors, doc.group) {
        (Some(_), Some(_)) => Err(invalid("give either factors or group, not both".into())),
        (None, None) => Err(invalid("missing field: factors (or group)".into())),
        (None, Some(name)) => {
            if doc.subgroup.is_some() {
                return Err(invalid("subgroup: not allowed with a named group".into()));
            }
            let param = doc
                .param
                .ok_or_else(|| invalid("param: required with group".into()))?;
            let lat = char_lattice(
                NamedGroup::parse(&name, param).map_err(|e| invalid(format!("group: {e}")))?,
            )
            .map_err(|e| invalid(format!("group: {e}")))?;
            Ok(GroupSpec {
                factors: lat.types(),
                subgroup: lat.s_generators.clone(),
                gamma: doc.gamma,
            })
        }
        (Some(list), None) => {
            if doc.param.is_some() {
                return Err(invalid("param: only allowed with group".into()));
            }
            if list.is_empty() {
                return Err(invalid("factors: empty list".into()));
            }
            let mut factors = Vec::with_capacity(list.len());
            for (i, f) in list.iter().enumerate() {
                let family = Family::parse(&f.family)
                    .map_err(|e| invalid(format!("factors[{i}].family: {e}")))?;
                let n = match (family, f.n) {
                    (Family::G2, n) => n.unwrap_or(2),
                    (_, Some(n)) => n,
                    (_, None) => return Err(invalid(format!("factors[{i}].n: missing"))),
                };
                factors.push(
                    DynkinType::new(family, n)
                        .map_err(|e| invalid(format!("factors[{i}]: {e}")))?,
                );
            }
            let subgroup = doc.subgroup.unwrap_or_default();
            for (i, g) in subgroup.iter().enumerate() {
                if g.len() != factors.len() {
                    return Err(invalid(format!(
                        "subgroup[{i}]: {} residues for {} factors",
                        g.len(),
                        factors.len()
                    )));
                }
            }
            Ok(GroupSpec {
                factors,
                subgroup,
                gamma: doc.gamma,
            })
        }
    }
}

/// Comma-separated type list such as `B2,B1,A3`.
pub fn parse_types(items: &[String]) -> Result<Vec<DynkinType>, Error> {
    items.iter().map(|s| s.parse::<DynkinType>()).collect()
}

/// Residue tuple such as `1,0,2`.
pub fn parse_residues(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| invalid(format!("residue {x:?} in {s:?} is not an integer")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_list() {
        let g = parse_group_spec(
            r#"{"factors":[{"family":"A","n":1},{"family":"G2"}],"subgroup":[[1,0]]}"#,
            false,
        )
        .unwrap();
        assert_eq!(g.factors, vec![DynkinType::a(1), DynkinType::g2()]);
        assert_eq!(g.subgroup, vec![vec![1, 0]]);
    }

    #[test]
    fn named_group() {
        let g = parse_group_spec(r#"{"group":"SO","param":7}"#, false).unwrap();
        assert_eq!(g.factors, vec![DynkinType::b(3)]);
        let g = parse_group_spec(r#"{"group":"SO","param":6}"#, false).unwrap();
        assert_eq!(
            (g.factors, g.subgroup),
            (vec![DynkinType::d(3)], vec![vec![2]])
        );
    }

    #[test]
    fn errors_carry_context() {
        let e = parse_group_spec(
            r#"{"factors":[{"family":"A","n":1},{"family":"X","n":2}]}"#,
            false,
        )
        .unwrap_err();
        assert!(e.to_string().contains("factors[1].family"), "{e}");
        let e = parse_group_spec(
            r#"{"factors":[{"family":"A","n":1}],"subgroup":[[1,1]]}"#,
            false,
        )
        .unwrap_err();
        assert!(e.to_string().contains("subgroup[0]"), "{e}");
        let e = parse_group_spec("{\n  \"factors\": 3\n}", false).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e =
            parse_group_spec(r#"{"factors":[{"family":"A","n":1}],"extra":1}"#, false).unwrap_err();
        assert!(e.to_string().contains("extra"), "{e}");
    }
}
