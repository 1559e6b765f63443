//! JSON file formats. Cycle notation in files is 1-based; everything else
//! in the crate is 0-based.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, FiniteAlgebra, Operation, TermCircuit};
use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpFile {
    pub name: String,
    pub arity: usize,
    pub table: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub size: usize,
    pub ops: Vec<OpFile>,
}

impl From<&FiniteAlgebra> for AlgebraFile {
    fn from(alg: &FiniteAlgebra) -> Self {
        let alg = alg.materialized();
        AlgebraFile {
            size: alg.size(),
            ops: alg
                .ops()
                .iter()
                .map(|op| OpFile {
                    name: op.name().to_string(),
                    arity: op.arity(),
                    table: op.table().expect("materialized").to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<AlgebraFile> for FiniteAlgebra {
    type Error = Error;

    fn try_from(f: AlgebraFile) -> Result<Self> {
        let ops = f
            .ops
            .into_iter()
            .map(|op| Operation::from_table(op.name, op.arity, op.table))
            .collect();
        FiniteAlgebra::new(f.size, ops)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: Vec<String>,
}

impl From<&PermGroup> for GroupFile {
    fn from(g: &PermGroup) -> Self {
        GroupFile {
            degree: g.degree(),
            generators: g
                .canonical_generators()
                .iter()
                .map(ToString::to_string)
                .collect(),
        }
    }
}

impl TryFrom<GroupFile> for PermGroup {
    type Error = Error;

    fn try_from(f: GroupFile) -> Result<Self> {
        if f.generators.is_empty() {
            return Ok(PermGroup::trivial(f.degree));
        }
        let gens = f
            .generators
            .iter()
            .map(|s| Permutation::parse_cycles(s, f.degree))
            .collect::<Result<Vec<_>>>()?;
        PermGroup::generate(gens)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TuplesFile {
    Wrapped { tuples: Vec<Vec<Elem>> },
    Bare(Vec<Vec<Elem>>),
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    serde_json::from_str::<AlgebraFile>(text)?.try_into()
}

pub fn algebra_to_json(alg: &FiniteAlgebra) -> String {
    serde_json::to_string(&AlgebraFile::from(alg)).expect("serializable")
}

pub fn parse_group(text: &str) -> Result<PermGroup> {
    serde_json::from_str::<GroupFile>(text)?.try_into()
}

pub fn group_to_json(g: &PermGroup) -> String {
    serde_json::to_string(&GroupFile::from(g)).expect("serializable")
}

/// `{"tuples": [[...], ...]}` or a bare list of tuples.
pub fn parse_tuples(text: &str) -> Result<Vec<Vec<Elem>>> {
    Ok(match serde_json::from_str::<TuplesFile>(text)? {
        TuplesFile::Wrapped { tuples } | TuplesFile::Bare(tuples) => tuples,
    })
}

pub fn parse_circuit(text: &str) -> Result<TermCircuit> {
    Ok(serde_json::from_str(text)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read(path)?)?)
}

pub fn read_algebra(path: &Path) -> Result<FiniteAlgebra> {
    parse_algebra(&read(path)?)
}

pub fn read_group(path: &Path) -> Result<PermGroup> {
    parse_group(&read(path)?)
}

pub fn read_tuples(path: &Path) -> Result<Vec<Vec<Elem>>> {
    parse_tuples(&read(path)?)
}

pub fn read_circuit(path: &Path) -> Result<TermCircuit> {
    parse_circuit(&read(path)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;
    use crate::perm::wreath_product;

    #[test]
    fn algebra_round_trip() {
        for alg in [
            fixtures::semilattice(),
            fixtures::minority(),
            fixtures::projection(),
        ] {
            let text = algebra_to_json(&alg);
            assert_eq!(parse_algebra(&text).unwrap(), alg);
        }
        let text = r#"{"size":2,"ops":[{"name":"f0","arity":2,"table":[0,0,0,1]}]}"#;
        assert_eq!(algebra_to_json(&parse_algebra(text).unwrap()), text);
    }

    #[test]
    fn algebra_rejects_bad_tables() {
        assert!(
            parse_algebra(r#"{"size":2,"ops":[{"name":"f","arity":2,"table":[0,1]}]}"#).is_err()
        );
        assert!(
            parse_algebra(r#"{"size":2,"ops":[{"name":"f","arity":1,"table":[0,2]}]}"#).is_err()
        );
        assert!(matches!(parse_algebra("{"), Err(Error::Json(_))));
    }

    #[test]
    fn group_round_trip() {
        let groups = [
            PermGroup::symmetric(4),
            PermGroup::cyclic(5),
            PermGroup::trivial(3),
            PermGroup::dihedral(5),
            wreath_product(&PermGroup::cyclic(2), &PermGroup::cyclic(2)),
        ];
        for g in groups {
            let back = parse_group(&group_to_json(&g)).unwrap();
            assert_eq!(back.degree(), g.degree());
            assert_eq!(back.elements().unwrap(), g.elements().unwrap());
            assert_eq!(group_to_json(&back), group_to_json(&g));
        }
        let g = parse_group(r#"{"degree":3,"generators":["(1 2 3)","(1 2)"]}"#).unwrap();
        assert_eq!(g.order().unwrap(), 6);
        assert!(parse_group(r#"{"degree":3,"generators":["(1 4)"]}"#).is_err());
    }

    #[test]
    fn tuples_forms() {
        assert_eq!(
            parse_tuples(r#"{"tuples":[[0,1]]}"#).unwrap(),
            vec![vec![0, 1]]
        );
        assert_eq!(
            parse_tuples("[[1,0],[0,0]]").unwrap(),
            vec![vec![1, 0], vec![0, 0]]
        );
        assert!(parse_tuples("[]").unwrap().is_empty());
    }

    #[test]
    fn circuit_round_trip() {
        let c = TermCircuit::basic_op("meet", 2).minor(&[1, 0], 2).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_circuit(&text).unwrap(), c);
    }
}
