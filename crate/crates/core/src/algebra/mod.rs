//! Finite algebras given by operation tables, together with term circuits
//! and subpower generation.

mod circuit;
mod subpower;

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

pub use circuit::{BoundCircuit, CircuitBuilder, Node, TermCircuit};
pub use subpower::{
    generate_subpower, Budget, Closure, ClosureStats, GeneratedSubpower, DEFAULT_TUPLE_BUDGET,
};

/// An element of the universe `{0..size-1}`.
pub type Elem = u32;

type ComputedFn = dyn Fn(&[Elem]) -> Elem + Send + Sync;

/// How an operation produces its values.
#[derive(Clone)]
pub enum OpTable {
    /// Row-major table of length `size^arity`.
    Table(Arc<[Elem]>),
    /// Values computed on demand, for operations too large to materialize.
    Computed(Arc<ComputedFn>),
}

impl fmt::Debug for OpTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpTable::Table(t) => write!(f, "Table(len {})", t.len()),
            OpTable::Computed(_) => write!(f, "Computed"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Operation {
    name: String,
    arity: usize,
    table: OpTable,
}

impl Operation {
    pub fn from_table(name: impl Into<String>, arity: usize, table: Vec<Elem>) -> Self {
        Operation {
            name: name.into(),
            arity,
            table: OpTable::Table(table.into()),
        }
    }

    /// An operation whose values come from `f`; `f` must return values in range.
    pub fn computed(
        name: impl Into<String>,
        arity: usize,
        f: impl Fn(&[Elem]) -> Elem + Send + Sync + 'static,
    ) -> Self {
        Operation {
            name: name.into(),
            arity,
            table: OpTable::Computed(Arc::new(f)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The materialized table, if there is one.
    pub fn table(&self) -> Option<&[Elem]> {
        match &self.table {
            OpTable::Table(t) => Some(t),
            OpTable::Computed(_) => None,
        }
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.table, OpTable::Table(_))
    }
}

/// An algebra on `{0..size-1}` with named finitary operations.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    size: usize,
    ops: Vec<Operation>,
    by_name: FxHashMap<String, usize>,
}

impl FiniteAlgebra {
    /// Validates table lengths, entry ranges and name uniqueness.
    pub fn new(size: usize, ops: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidAlgebra("universe must be nonempty".into()));
        }
        if size > Elem::MAX as usize {
            return Err(Error::InvalidAlgebra(format!(
                "universe size {size} too large"
            )));
        }
        let mut by_name = FxHashMap::default();
        for (i, op) in ops.iter().enumerate() {
            if by_name.insert(op.name.clone(), i).is_some() {
                return Err(Error::InvalidAlgebra(format!(
                    "duplicate operation name `{}`",
                    op.name
                )));
            }
            if let Some(table) = op.table() {
                let expected = checked_pow(size, op.arity).ok_or_else(|| {
                    Error::InvalidAlgebra(format!("table of `{}` is too large", op.name))
                })?;
                if table.len() != expected {
                    return Err(Error::InvalidAlgebra(format!(
                        "table of `{}` has length {}, expected {expected}",
                        op.name,
                        table.len()
                    )));
                }
                if let Some(bad) = table.iter().find(|&&v| v as usize >= size) {
                    return Err(Error::InvalidAlgebra(format!(
                        "table of `{}` contains {bad}, outside 0..{size}",
                        op.name
                    )));
                }
            }
        }
        Ok(FiniteAlgebra { size, ops, by_name })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, index: usize) -> &Operation {
        &self.ops[index]
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Largest operation arity (0 without operations).
    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|o| o.arity).max().unwrap_or(0)
    }

    /// Row index of `args` in a table: `Σ aᵢ·size^(arity−1−i)`.
    #[inline]
    pub fn row_index(&self, args: &[Elem]) -> usize {
        args.iter()
            .fold(0usize, |acc, &a| acc * self.size + a as usize)
    }

    /// Applies operation `op` to `args` (length must equal the arity).
    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let op = &self.ops[op];
        debug_assert_eq!(args.len(), op.arity);
        match &op.table {
            OpTable::Table(t) => t[self.row_index(args)],
            OpTable::Computed(f) => f(args),
        }
    }

    /// Applies the operation named `name`.
    pub fn apply_named(&self, name: &str, args: &[Elem]) -> Result<Elem> {
        let idx = self
            .op_index(name)
            .ok_or_else(|| Error::UnknownOp(name.to_string()))?;
        let arity = self.ops[idx].arity;
        if args.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: args.len(),
            });
        }
        if let Some(bad) = args.iter().find(|&&a| a as usize >= self.size) {
            return Err(Error::Invalid(format!("argument {bad} outside universe")));
        }
        Ok(self.apply(idx, args))
    }

    /// Same algebra with every operation stored as a table.
    pub fn materialized(&self) -> FiniteAlgebra {
        let ops = self
            .ops
            .iter()
            .map(|op| match &op.table {
                OpTable::Table(_) => op.clone(),
                OpTable::Computed(f) => {
                    let table = TupleIter::new(self.size, op.arity).map(|t| f(&t)).collect();
                    Operation::from_table(op.name.clone(), op.arity, table)
                }
            })
            .collect();
        FiniteAlgebra {
            size: self.size,
            ops,
            by_name: self.by_name.clone(),
        }
    }

    /// The input size `‖A‖ = Σ size^arity`.
    pub fn norm(&self) -> u128 {
        self.ops
            .iter()
            .map(|op| (self.size as u128).pow(op.arity as u32))
            .sum()
    }

    /// Whether `f(x, …, x) = x` for every operation and element.
    pub fn is_idempotent(&self) -> bool {
        let mut args = Vec::new();
        (0..self.ops.len()).all(|i| {
            let arity = self.ops[i].arity;
            (0..self.size as Elem).all(|x| {
                args.clear();
                args.resize(arity, x);
                self.apply(i, &args) == x
            })
        })
    }
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.ops.len() == other.ops.len()
            && self
                .ops
                .iter()
                .zip(&other.ops)
                .enumerate()
                .all(|(i, (a, b))| {
                    a.name == b.name
                        && a.arity == b.arity
                        && match (a.table(), b.table()) {
                            (Some(x), Some(y)) => x == y,
                            _ => TupleIter::new(self.size, a.arity)
                                .all(|t| self.apply(i, &t) == other.apply(i, &t)),
                        }
                })
    }
}

/// `‖A‖`, see [`FiniteAlgebra::norm`].
pub fn algebra_norm(alg: &FiniteAlgebra) -> u128 {
    alg.norm()
}

/// See [`FiniteAlgebra::is_idempotent`].
pub fn idempotence_check(alg: &FiniteAlgebra) -> bool {
    alg.is_idempotent()
}

/// `result[i] = t[sigma[i]]`, the tuple `t^σ`.
pub fn apply_tuple_action<T: Copy>(t: &[T], sigma: &[usize]) -> Result<Vec<T>> {
    sigma
        .iter()
        .map(|&s| {
            t.get(s).copied().ok_or_else(|| {
                Error::Invalid(format!("index {s} out of range for a {}-tuple", t.len()))
            })
        })
        .collect()
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Lexicographic enumeration of `{0..size-1}^len`.
#[derive(Clone, Debug)]
pub struct TupleIter {
    size: Elem,
    current: Option<Vec<Elem>>,
}

impl TupleIter {
    pub fn new(size: usize, len: usize) -> Self {
        TupleIter {
            size: size as Elem,
            current: if size == 0 && len > 0 {
                None
            } else {
                Some(vec![0; len])
            },
        }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        for i in (0..next.len()).rev() {
            next[i] += 1;
            if next[i] < self.size {
                self.current = Some(next);
                return Some(out);
            }
            next[i] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// `({0,1}, ∧)`.
    pub fn semilattice() -> FiniteAlgebra {
        FiniteAlgebra::new(2, vec![Operation::from_table("meet", 2, vec![0, 0, 0, 1])]).unwrap()
    }

    /// `({0,1}, x+y+z mod 2)`.
    pub fn minority() -> FiniteAlgebra {
        let table = TupleIter::new(2, 3)
            .map(|t| (t[0] + t[1] + t[2]) % 2)
            .collect();
        FiniteAlgebra::new(2, vec![Operation::from_table("m", 3, table)]).unwrap()
    }

    /// `({0,1}, p(x) = x)`.
    pub fn projection() -> FiniteAlgebra {
        FiniteAlgebra::new(2, vec![Operation::from_table("p", 1, vec![0, 1])]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn validation() {
        assert!(FiniteAlgebra::new(2, vec![Operation::from_table("f", 2, vec![0, 1, 1])]).is_err());
        assert!(FiniteAlgebra::new(2, vec![Operation::from_table("f", 1, vec![0, 2])]).is_err());
        assert!(FiniteAlgebra::new(
            2,
            vec![
                Operation::from_table("f", 1, vec![0, 1]),
                Operation::from_table("f", 1, vec![1, 0])
            ]
        )
        .is_err());
        assert!(FiniteAlgebra::new(0, vec![]).is_err());
        let nullary = FiniteAlgebra::new(3, vec![Operation::from_table("c", 0, vec![2])]).unwrap();
        assert_eq!(nullary.apply(0, &[]), 2);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(algebra_norm(&semilattice()), 4);
        assert_eq!(algebra_norm(&FiniteAlgebra::new(5, vec![]).unwrap()), 0);
        assert_eq!(algebra_norm(&minority()), 8);
    }

    #[test]
    fn idempotence_examples() {
        assert!(idempotence_check(&semilattice()));
        assert!(idempotence_check(&minority()));
        let constant =
            FiniteAlgebra::new(2, vec![Operation::from_table("c", 1, vec![0, 0])]).unwrap();
        assert!(!idempotence_check(&constant));
    }

    #[test]
    fn tuple_action() {
        assert_eq!(
            apply_tuple_action(&[7, 8, 9], &[0, 1, 2]).unwrap(),
            vec![7, 8, 9]
        );
        assert_eq!(apply_tuple_action(&[7, 8], &[1, 0]).unwrap(), vec![8, 7]);
        assert!(apply_tuple_action(&[7, 8], &[2]).is_err());
    }

    #[test]
    fn tuple_iter_is_lexicographic() {
        let all: Vec<_> = TupleIter::new(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(TupleIter::new(3, 0).count(), 1);
        assert_eq!(TupleIter::new(3, 4).count(), 81);
    }

    #[test]
    fn computed_ops_match_tables() {
        let alg = FiniteAlgebra::new(
            3,
            vec![Operation::computed("f", 2, |a: &[Elem]| {
                (2 * a[0] + 2 * a[1]) % 3
            })],
        )
        .unwrap();
        let mat = alg.materialized();
        assert!(mat.op(0).is_materialized());
        assert_eq!(alg, mat);
        assert_eq!(mat.apply_named("f", &[1, 2]).unwrap(), 0);
        assert!(mat.apply_named("g", &[1, 2]).is_err());
    }
}
