use std::ops::Range;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{Elem, FiniteAlgebra};
use crate::error::{Error, Result};

/// A circuit node: an input variable or a basic operation applied to
/// earlier nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Var(usize),
    Gate { op: String, args: Vec<usize> },
}

/// A term as a DAG. Children always precede their parents, so the node list
/// is a topological order and the circuit is acyclic by construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RawCircuit", try_from = "RawCircuit")]
pub struct TermCircuit {
    inputs: usize,
    nodes: Vec<Node>,
    output: usize,
}

impl TermCircuit {
    /// Checks the structural invariants (variable range, child order, output).
    pub fn new(inputs: usize, nodes: Vec<Node>, output: usize) -> Result<Self> {
        if output >= nodes.len() {
            return Err(Error::InvalidCircuit(format!(
                "output {output} out of range for {} nodes",
                nodes.len()
            )));
        }
        for (i, node) in nodes.iter().enumerate() {
            match node {
                Node::Var(v) if *v >= inputs => {
                    return Err(Error::InvalidCircuit(format!(
                        "node {i} reads variable {v} of a {inputs}-ary circuit"
                    )))
                }
                Node::Gate { args, .. } => {
                    if let Some(a) = args.iter().find(|&&a| a >= i) {
                        return Err(Error::InvalidCircuit(format!(
                            "node {i} refers to node {a}, which is not earlier"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(TermCircuit {
            inputs,
            nodes,
            output,
        })
    }

    pub(crate) fn from_parts_unchecked(inputs: usize, nodes: Vec<Node>, output: usize) -> Self {
        debug_assert!(TermCircuit::new(inputs, nodes.clone(), output).is_ok());
        TermCircuit {
            inputs,
            nodes,
            output,
        }
    }

    /// The projection `p_i^n`.
    pub fn projection(inputs: usize, i: usize) -> Result<Self> {
        TermCircuit::new(inputs, vec![Node::Var(i)], 0)
    }

    /// `op(x₀, …, x_{arity−1})`.
    pub fn basic_op(op: &str, arity: usize) -> Self {
        let mut nodes: Vec<Node> = (0..arity).map(Node::Var).collect();
        nodes.push(Node::Gate {
            op: op.to_string(),
            args: (0..arity).collect(),
        });
        TermCircuit {
            inputs: arity,
            output: arity,
            nodes,
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of gates on the longest input-to-output path.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Gate { args, .. } = node {
                depth[i] = 1 + args.iter().map(|&a| depth[a]).max().unwrap_or(0);
            }
        }
        depth[self.output]
    }

    /// Resolves operation names against `alg`, checking arities.
    pub fn bind<'a>(&'a self, alg: &'a FiniteAlgebra) -> Result<BoundCircuit<'a>> {
        let mut steps = Vec::with_capacity(self.nodes.len());
        let mut pool = Vec::new();
        for node in &self.nodes {
            match node {
                Node::Var(v) => steps.push(Step::Var(*v)),
                Node::Gate { op, args } => {
                    let idx = alg
                        .op_index(op)
                        .ok_or_else(|| Error::UnknownOp(op.clone()))?;
                    let arity = alg.op(idx).arity();
                    if arity != args.len() {
                        return Err(Error::ArityMismatch {
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    let start = pool.len();
                    pool.extend_from_slice(args);
                    steps.push(Step::Gate {
                        op: idx,
                        args: start..pool.len(),
                    });
                }
            }
        }
        Ok(BoundCircuit {
            alg,
            inputs: self.inputs,
            steps,
            pool,
            output: self.output,
        })
    }

    /// Value of the term at `args`.
    pub fn evaluate(&self, alg: &FiniteAlgebra, args: &[Elem]) -> Result<Elem> {
        if args.len() != self.inputs {
            return Err(Error::ArityMismatch {
                expected: self.inputs,
                found: args.len(),
            });
        }
        if let Some(bad) = args.iter().find(|&&a| a as usize >= alg.size()) {
            return Err(Error::Invalid(format!("argument {bad} outside universe")));
        }
        Ok(self.bind(alg)?.eval(args))
    }

    /// The minor along `map: [inputs] → [arity]`: variable `i` is rewired
    /// to variable `map[i]` of a new `arity`-ary circuit, so the result at
    /// `x̄` equals this circuit at `(x_{map[0]}, …, x_{map[n−1]})`.
    pub fn minor(&self, map: &[usize], arity: usize) -> Result<TermCircuit> {
        if map.len() != self.inputs {
            return Err(Error::ArityMismatch {
                expected: self.inputs,
                found: map.len(),
            });
        }
        if let Some(bad) = map.iter().find(|&&m| m >= arity) {
            return Err(Error::Invalid(format!(
                "minor map image {bad} out of range 0..{arity}"
            )));
        }
        let nodes = self
            .nodes
            .iter()
            .map(|node| match node {
                Node::Var(v) => Node::Var(map[*v]),
                gate => gate.clone(),
            })
            .collect();
        Ok(TermCircuit {
            inputs: arity,
            nodes,
            output: self.output,
        })
    }

    /// `outer(inner₀(x̄), …, inner_{k−1}(x̄))`; all inner circuits share one arity.
    pub fn compose(outer: &TermCircuit, inner: &[TermCircuit]) -> Result<TermCircuit> {
        if inner.len() != outer.inputs {
            return Err(Error::ArityMismatch {
                expected: outer.inputs,
                found: inner.len(),
            });
        }
        let arity = inner.first().map_or(0, |c| c.inputs);
        if let Some(c) = inner.iter().find(|c| c.inputs != arity) {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: c.inputs,
            });
        }
        let mut b = CircuitBuilder::new(arity);
        let vars: Vec<usize> = (0..arity).map(|i| b.var(i)).collect();
        let roots: Vec<usize> = inner.iter().map(|c| b.embed(c, &vars)).collect();
        let out = b.embed(outer, &roots);
        Ok(b.finish(out))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum RawNode {
    Var { var: usize },
    Gate { op: String, args: Vec<usize> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    inputs: usize,
    nodes: Vec<RawNode>,
    output: usize,
}

impl From<TermCircuit> for RawCircuit {
    fn from(c: TermCircuit) -> Self {
        RawCircuit {
            inputs: c.inputs,
            output: c.output,
            nodes: c
                .nodes
                .into_iter()
                .map(|n| match n {
                    Node::Var(var) => RawNode::Var { var },
                    Node::Gate { op, args } => RawNode::Gate { op, args },
                })
                .collect(),
        }
    }
}

impl TryFrom<RawCircuit> for TermCircuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        let nodes = raw
            .nodes
            .into_iter()
            .map(|n| match n {
                RawNode::Var { var } => Node::Var(var),
                RawNode::Gate { op, args } => Node::Gate { op, args },
            })
            .collect();
        TermCircuit::new(raw.inputs, nodes, raw.output)
    }
}

#[derive(Clone, Debug)]
enum Step {
    Var(usize),
    Gate { op: usize, args: Range<usize> },
}

/// A circuit with operation names resolved, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct BoundCircuit<'a> {
    alg: &'a FiniteAlgebra,
    inputs: usize,
    steps: Vec<Step>,
    pool: Vec<usize>,
    output: usize,
}

impl BoundCircuit<'_> {
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Evaluates at `args`, reusing `scratch` between calls. Arguments are
    /// trusted to be in range.
    pub fn eval_with(&self, args: &[Elem], scratch: &mut Vec<Elem>) -> Elem {
        scratch.clear();
        let mut buf: Vec<Elem> = Vec::new();
        for step in &self.steps {
            let v = match step {
                Step::Var(i) => args[*i],
                Step::Gate { op, args: range } => {
                    buf.clear();
                    buf.extend(self.pool[range.clone()].iter().map(|&a| scratch[a]));
                    self.alg.apply(*op, &buf)
                }
            };
            scratch.push(v);
        }
        scratch[self.output]
    }

    pub fn eval(&self, args: &[Elem]) -> Elem {
        self.eval_with(args, &mut Vec::with_capacity(self.steps.len()))
    }

    /// Evaluates on the rows of a matrix given by its columns: entry `r` of
    /// the result is the value at `(columns[0][r], …, columns[n−1][r])`.
    pub fn eval_columns(&self, columns: &[Vec<Elem>]) -> Vec<Elem> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut values: Vec<Vec<Elem>> = Vec::with_capacity(self.steps.len());
        let mut buf = Vec::new();
        for step in &self.steps {
            let col = match step {
                Step::Var(i) => columns[*i].clone(),
                Step::Gate { op, args } => (0..rows)
                    .map(|r| {
                        buf.clear();
                        buf.extend(self.pool[args.clone()].iter().map(|&a| values[a][r]));
                        self.alg.apply(*op, &buf)
                    })
                    .collect(),
            };
            values.push(col);
        }
        values.swap_remove(self.output)
    }
}

/// Incremental, hash-consed circuit construction: structurally identical
/// nodes are stored once, so repeated sub-terms are shared.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    inputs: usize,
    nodes: Vec<Node>,
    dedup: FxHashMap<Node, usize>,
}

impl CircuitBuilder {
    pub fn new(inputs: usize) -> Self {
        CircuitBuilder {
            inputs,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn intern(&mut self, node: Node) -> usize {
        if let Some(&i) = self.dedup.get(&node) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(node.clone());
        self.dedup.insert(node, i);
        i
    }

    pub fn var(&mut self, i: usize) -> usize {
        assert!(i < self.inputs, "variable {i} out of range");
        self.intern(Node::Var(i))
    }

    pub fn gate(&mut self, op: &str, args: Vec<usize>) -> usize {
        assert!(args.iter().all(|&a| a < self.nodes.len()));
        self.intern(Node::Gate {
            op: op.to_string(),
            args,
        })
    }

    /// Copies `c` into the builder with variable `j` replaced by node
    /// `inputs[j]`; returns the node of `c`'s output.
    pub fn embed(&mut self, c: &TermCircuit, inputs: &[usize]) -> usize {
        assert_eq!(inputs.len(), c.inputs);
        let mut map = Vec::with_capacity(c.nodes.len());
        for node in &c.nodes {
            let id = match node {
                Node::Var(v) => inputs[*v],
                Node::Gate { op, args } => {
                    let args = args.iter().map(|&a| map[a]).collect();
                    self.intern(Node::Gate {
                        op: op.clone(),
                        args,
                    })
                }
            };
            map.push(id);
        }
        map[c.output]
    }

    /// Values of every node at `args`.
    pub fn eval_nodes(&self, alg: &FiniteAlgebra, args: &[Elem]) -> Result<Vec<Elem>> {
        let mut values = Vec::with_capacity(self.nodes.len());
        let mut buf = Vec::new();
        for node in &self.nodes {
            let v = match node {
                Node::Var(i) => args[*i],
                Node::Gate { op, args: children } => {
                    let idx = alg
                        .op_index(op)
                        .ok_or_else(|| Error::UnknownOp(op.clone()))?;
                    buf.clear();
                    buf.extend(children.iter().map(|&a| values[a]));
                    alg.apply(idx, &buf)
                }
            };
            values.push(v);
        }
        Ok(values)
    }

    /// The circuit computing node `output`, with unreachable nodes removed.
    pub fn finish(&self, output: usize) -> TermCircuit {
        let mut needed = vec![false; output + 1];
        needed[output] = true;
        for i in (0..=output).rev() {
            if needed[i] {
                if let Node::Gate { args, .. } = &self.nodes[i] {
                    for &a in args {
                        needed[a] = true;
                    }
                }
            }
        }
        let mut renumber = vec![usize::MAX; output + 1];
        let mut nodes = Vec::new();
        for i in 0..=output {
            if !needed[i] {
                continue;
            }
            renumber[i] = nodes.len();
            nodes.push(match &self.nodes[i] {
                Node::Var(v) => Node::Var(*v),
                Node::Gate { op, args } => Node::Gate {
                    op: op.clone(),
                    args: args.iter().map(|&a| renumber[a]).collect(),
                },
            });
        }
        let out = renumber[output];
        TermCircuit::from_parts_unchecked(self.inputs, nodes, out)
    }
}
