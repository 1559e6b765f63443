//! Closure of a set of tuples in `A^m` under the coordinatewise basic
//! operations.
//!
//! Rounds are semi-naive: round `r` only applies operations to argument
//! lists that use at least one tuple first found in round `r − 1`. Work is
//! split into items `(op, first argument)` that may run in parallel; their
//! outputs are merged sequentially in item order, so the resulting tuple
//! numbering and provenance are independent of the thread count.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering as AtomicOrdering};

use super::{Elem, FiniteAlgebra, Node, TermCircuit};
use crate::error::{Error, Result};

/// Default cap on the number of tuples in one closure.
pub const DEFAULT_TUPLE_BUDGET: usize = 5_000_000;

/// Cap on stored tuple entries (tuples times tuple length), about 512 MiB.
pub const DEFAULT_CELL_BUDGET: usize = 1 << 27;

const BATCH: usize = 64;
/// Operation applications between checks of the shared work counter.
const WORK_STRIDE: u64 = 1024;
const PAR_THRESHOLD: u64 = 1 << 14;

/// Predicate that stops a closure once some tuple satisfies it.
type Goal<'a> = dyn Fn(&[Elem]) -> bool + Sync + 'a;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClosureStats {
    pub generated: usize,
    pub rounds: usize,
    pub combinations: u64,
}

#[derive(Clone, Copy, Debug)]
enum Origin {
    Generator(u32),
    Op { op: u32, args: u32 },
}

#[derive(Clone, Debug)]
enum KeyIndex {
    Packed(FxHashMap<u128, u32>),
    /// Hash to the newest tuple with that hash; `next` chains older ones.
    Wide {
        heads: FxHashMap<u64, u32>,
        next: Vec<u32>,
    },
}

const NO_TUPLE: u32 = u32::MAX;

fn wide_hash(t: &[Elem]) -> u64 {
    use std::hash::{BuildHasher, BuildHasherDefault};
    BuildHasherDefault::<rustc_hash::FxHasher>::default().hash_one(t)
}

/// Tuples of a fixed length stored in one flat arena, numbered by insertion.
#[derive(Clone, Debug)]
struct TupleSet {
    m: usize,
    radix: u128,
    data: Vec<Elem>,
    count: usize,
    index: KeyIndex,
}

impl TupleSet {
    fn new(size: usize, m: usize) -> Self {
        let fits = (size as u128).checked_pow(m as u32).is_some();
        TupleSet {
            m,
            radix: size as u128,
            data: Vec::new(),
            count: 0,
            index: if fits {
                KeyIndex::Packed(FxHashMap::default())
            } else {
                KeyIndex::Wide {
                    heads: FxHashMap::default(),
                    next: Vec::new(),
                }
            },
        }
    }

    fn len(&self) -> usize {
        self.count
    }

    fn get(&self, i: usize) -> &[Elem] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    fn pack(&self, t: &[Elem]) -> u128 {
        t.iter().fold(0u128, |acc, &x| acc * self.radix + x as u128)
    }

    fn find(&self, t: &[Elem]) -> Option<u32> {
        match &self.index {
            KeyIndex::Packed(map) => map.get(&self.pack(t)).copied(),
            KeyIndex::Wide { heads, next } => {
                let mut id = heads.get(&wide_hash(t)).copied().unwrap_or(NO_TUPLE);
                while id != NO_TUPLE {
                    if self.get(id as usize) == t {
                        return Some(id);
                    }
                    id = next[id as usize];
                }
                None
            }
        }
    }

    /// Inserts `t` if absent; returns whether it was new.
    fn insert(&mut self, t: &[Elem]) -> bool {
        let id = self.count as u32;
        let new = match &mut self.index {
            KeyIndex::Packed(map) => {
                let key = t.iter().fold(0u128, |acc, &x| acc * self.radix + x as u128);
                match map.entry(key) {
                    std::collections::hash_map::Entry::Occupied(_) => false,
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(id);
                        true
                    }
                }
            }
            KeyIndex::Wide { .. } => {
                if self.find(t).is_some() {
                    false
                } else {
                    let KeyIndex::Wide { heads, next } = &mut self.index else {
                        unreachable!()
                    };
                    let head = heads.entry(wide_hash(t)).or_insert(NO_TUPLE);
                    next.push(*head);
                    *head = id;
                    true
                }
            }
        };
        if new {
            self.data.extend_from_slice(t);
            self.count += 1;
        }
        new
    }
}

/// Limits on one closure run: stored tuples and operation applications.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub tuples: usize,
    pub combinations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from(DEFAULT_TUPLE_BUDGET)
    }
}

impl From<usize> for Budget {
    /// A tuple cap with unlimited work.
    fn from(tuples: usize) -> Self {
        Budget {
            tuples,
            combinations: u64::MAX,
        }
    }
}

/// New tuples produced by one work item, deduplicated locally.
struct Batch {
    tuples: TupleSet,
    args: Vec<u32>,
    combinations: u64,
}

/// Configurable closure run.
pub struct Closure<'a> {
    alg: &'a FiniteAlgebra,
    power: usize,
    generators: Vec<Vec<Elem>>,
    provenance: bool,
    budget: Budget,
    parallel: bool,
}

impl<'a> Closure<'a> {
    /// Closure of `generators` in `alg^power`.
    pub fn new(alg: &'a FiniteAlgebra, power: usize, generators: Vec<Vec<Elem>>) -> Result<Self> {
        for g in &generators {
            if g.len() != power {
                return Err(Error::ArityMismatch {
                    expected: power,
                    found: g.len(),
                });
            }
            if let Some(x) = g.iter().find(|&&x| x as usize >= alg.size()) {
                return Err(Error::Invalid(format!(
                    "generator entry {x} outside universe"
                )));
            }
        }
        Ok(Closure {
            alg,
            power,
            generators,
            provenance: false,
            budget: Budget::default(),
            parallel: true,
        })
    }

    pub fn provenance(mut self, on: bool) -> Self {
        self.provenance = on;
        self
    }

    pub fn budget(mut self, budget: impl Into<Budget>) -> Self {
        self.budget = budget.into();
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    /// Computes the full closure.
    pub fn run(self) -> Result<GeneratedSubpower> {
        self.run_inner(None).map(|(g, _)| g)
    }

    /// Stops as soon as a tuple satisfying `goal` is generated and returns
    /// its index; `None` means the whole closure was searched.
    pub fn run_until<F>(self, goal: F) -> Result<(GeneratedSubpower, Option<usize>)>
    where
        F: Fn(&[Elem]) -> bool + Sync,
    {
        self.run_inner(Some(&goal))
    }

    fn run_inner(
        self,
        goal: Option<&Goal<'_>>,
    ) -> Result<(GeneratedSubpower, Option<usize>)> {
        let alg = self.alg;
        let m = self.power;
        let mut set = TupleSet::new(alg.size(), m);
        let mut origins: Vec<Origin> = Vec::new();
        let mut pool: Vec<u32> = Vec::new();
        let mut stats = ClosureStats::default();
        let mut hit = None;
        let limit = self
            .budget
            .tuples
            .min(DEFAULT_CELL_BUDGET / m.max(1))
            .max(1);
        let work_limit = self.budget.combinations;

        macro_rules! finish {
            ($complete:expr) => {{
                stats.generated = set.len();
                return Ok((
                    GeneratedSubpower {
                        power: m,
                        inputs: self.generators.len(),
                        set,
                        origins: self.provenance.then_some((origins, pool)),
                        op_names: alg.ops().iter().map(|o| o.name().to_string()).collect(),
                        op_arities: alg.ops().iter().map(|o| o.arity()).collect(),
                        stats,
                        complete: $complete,
                    },
                    hit,
                ));
            }};
        }

        for (j, g) in self.generators.iter().enumerate() {
            if set.insert(g) {
                if self.provenance {
                    origins.push(Origin::Generator(j as u32));
                }
                if goal.is_some_and(|f| f(g)) {
                    hit = Some(set.len() - 1);
                    finish!(false);
                }
            }
        }
        if set.len() > limit {
            return Err(Error::Budget {
                limit,
                generated: set.len(),
                rounds: 0,
            });
        }

        let mut old_end = 0usize;
        loop {
            let cur_end = set.len();
            let first = stats.rounds == 0;
            if !first && old_end == cur_end {
                break;
            }
            stats.rounds += 1;

            let mut items: Vec<(usize, usize)> = Vec::new();
            for (op, o) in alg.ops().iter().enumerate() {
                match o.arity() {
                    0 => {
                        if first {
                            items.push((op, 0));
                        }
                    }
                    1 => items.extend((old_end..cur_end).map(|i| (op, i))),
                    _ => items.extend((0..cur_end).map(|i| (op, i))),
                }
            }

            for chunk in items.chunks(BATCH) {
                let work: u64 = chunk
                    .iter()
                    .map(|&(op, _)| {
                        (cur_end as u64).saturating_pow(alg.op(op).arity().saturating_sub(1) as u32)
                    })
                    .sum();
                // Buffered tuples are capped by the remaining budget; a
                // truncated chunk is rerun after merging what it produced.
                loop {
                    let buffered = AtomicUsize::new(0);
                    let truncated = AtomicBool::new(false);
                    let exhausted = AtomicBool::new(false);
                    let applied = AtomicU64::new(stats.combinations);
                    let worker = Worker {
                        alg,
                        set: &set,
                        old_end,
                        cur_end,
                        room: limit - set.len(),
                        buffered: &buffered,
                        truncated: &truncated,
                        applied: &applied,
                        work_limit,
                        exhausted: &exhausted,
                    };
                    let batches: Vec<Batch> = if self.parallel && work >= PAR_THRESHOLD {
                        chunk
                            .par_iter()
                            .map(|&(op, i0)| worker.run(op, i0))
                            .collect()
                    } else {
                        chunk.iter().map(|&(op, i0)| worker.run(op, i0)).collect()
                    };
                    for (b, &(op, _)) in batches.iter().zip(chunk) {
                        stats.combinations += b.combinations;
                        let k = alg.op(op).arity();
                        for c in 0..b.tuples.len() {
                            let t = b.tuples.get(c);
                            if !set.insert(t) {
                                continue;
                            }
                            if self.provenance {
                                origins.push(Origin::Op {
                                    op: op as u32,
                                    args: pool.len() as u32,
                                });
                                pool.extend_from_slice(&b.args[c * k..(c + 1) * k]);
                            }
                            if set.len() > limit {
                                return Err(Error::Budget {
                                    limit,
                                    generated: set.len(),
                                    rounds: stats.rounds,
                                });
                            }
                            if goal.is_some_and(|f| f(t)) {
                                hit = Some(set.len() - 1);
                                finish!(false);
                            }
                        }
                    }
                    if exhausted.load(AtomicOrdering::Relaxed) || stats.combinations > work_limit {
                        return Err(Error::WorkBudget {
                            limit: work_limit,
                            generated: set.len(),
                            rounds: stats.rounds,
                        });
                    }
                    if !truncated.load(AtomicOrdering::Relaxed) {
                        break;
                    }
                }
            }
            old_end = cur_end;
        }
        finish!(true)
    }
}

/// Read-only view used by the work items of one round.
struct Worker<'s> {
    alg: &'s FiniteAlgebra,
    set: &'s TupleSet,
    old_end: usize,
    cur_end: usize,
    room: usize,
    buffered: &'s AtomicUsize,
    truncated: &'s AtomicBool,
    applied: &'s AtomicU64,
    work_limit: u64,
    exhausted: &'s AtomicBool,
}

struct ItemState<'b> {
    op: usize,
    k: usize,
    table: Option<&'b [Elem]>,
    weights: Vec<usize>,
    idx: Vec<u32>,
    partial: Vec<usize>,
    out: Vec<Elem>,
    scratch: Vec<Elem>,
    batch: Batch,
}

impl Worker<'_> {
    /// All argument lists starting with `i0` (for arity ≥ 1) that touch the
    /// previous round's new tuples.
    fn run(&self, op: usize, i0: usize) -> Batch {
        let o = self.alg.op(op);
        let k = o.arity();
        let m = self.set.m;
        let size = self.alg.size();
        let mut st = ItemState {
            op,
            k,
            table: o.table(),
            weights: (0..k).map(|p| size.pow((k - 1 - p) as u32)).collect(),
            idx: vec![0; k],
            partial: vec![0; k * m],
            out: vec![0; m],
            scratch: vec![0; k],
            batch: Batch {
                tuples: TupleSet::new(size, m),
                args: Vec::new(),
                combinations: 0,
            },
        };
        if k == 0 {
            let v = self.alg.apply(op, &[]);
            st.out.iter_mut().for_each(|x| *x = v);
            self.emit(&mut st);
            return st.batch;
        }
        st.idx[0] = i0 as u32;
        let t0 = self.set.get(i0);
        let w0 = st.weights[0];
        for (p, &x) in st.partial[..m].iter_mut().zip(t0) {
            *p = x as usize * w0;
        }
        if k == 1 {
            self.leaf(&mut st);
        } else {
            self.descend(&mut st, 1, i0 < self.old_end);
        }
        st.batch
    }

    fn descend(&self, st: &mut ItemState, p: usize, need_new: bool) {
        let m = self.set.m;
        let last = p + 1 == st.k;
        let lo = if last && need_new { self.old_end } else { 0 };
        for i in lo..self.cur_end {
            if self.truncated.load(AtomicOrdering::Relaxed) {
                return;
            }
            st.idx[p] = i as u32;
            let t = self.set.get(i);
            let w = st.weights[p];
            let (prev, cur) = st.partial.split_at_mut(p * m);
            let prev = &prev[(p - 1) * m..];
            for r in 0..m {
                cur[r] = prev[r] + t[r] as usize * w;
            }
            if last {
                self.leaf(st);
            } else {
                self.descend(st, p + 1, need_new && i < self.old_end);
            }
        }
    }

    fn leaf(&self, st: &mut ItemState) {
        let m = self.set.m;
        st.batch.combinations += 1;
        if st.batch.combinations.is_multiple_of(WORK_STRIDE)
            && self.applied.fetch_add(WORK_STRIDE, AtomicOrdering::Relaxed) + WORK_STRIDE
                > self.work_limit
        {
            self.exhausted.store(true, AtomicOrdering::Relaxed);
            self.truncated.store(true, AtomicOrdering::Relaxed);
        }
        match st.table {
            Some(table) => {
                let base = (st.k - 1) * m;
                for r in 0..m {
                    st.out[r] = table[st.partial[base + r]];
                }
            }
            None => {
                for r in 0..m {
                    for p in 0..st.k {
                        st.scratch[p] = self.set.get(st.idx[p] as usize)[r];
                    }
                    st.out[r] = self.alg.apply(st.op, &st.scratch);
                }
            }
        }
        self.emit(st);
    }

    fn emit(&self, st: &mut ItemState) {
        if self.set.find(&st.out).is_some() || !st.batch.tuples.insert(&st.out) {
            return;
        }
        st.batch.args.extend_from_slice(&st.idx);
        if self.buffered.fetch_add(1, AtomicOrdering::Relaxed) >= self.room {
            self.truncated.store(true, AtomicOrdering::Relaxed);
        }
    }
}

/// The closure together with optional provenance.
#[derive(Clone, Debug)]
pub struct GeneratedSubpower {
    power: usize,
    inputs: usize,
    set: TupleSet,
    origins: Option<(Vec<Origin>, Vec<u32>)>,
    op_names: Vec<String>,
    op_arities: Vec<usize>,
    stats: ClosureStats,
    complete: bool,
}

impl GeneratedSubpower {
    pub fn power(&self) -> usize {
        self.power
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.len() == 0
    }

    pub fn tuple(&self, i: usize) -> &[Elem] {
        self.set.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Elem]> + '_ {
        (0..self.len()).map(|i| self.set.get(i))
    }

    pub fn index_of(&self, t: &[Elem]) -> Option<usize> {
        if t.len() != self.power {
            return None;
        }
        self.set.find(t).map(|i| i as usize)
    }

    pub fn contains(&self, t: &[Elem]) -> bool {
        self.index_of(t).is_some()
    }

    pub fn stats(&self) -> ClosureStats {
        self.stats
    }

    /// False when the run stopped early at a goal tuple.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn has_provenance(&self) -> bool {
        self.origins.is_some()
    }

    /// Circuit over the generators computing tuple `i` coordinatewise.
    /// `None` without provenance.
    pub fn circuit(&self, i: usize) -> Option<TermCircuit> {
        let (origins, pool) = self.origins.as_ref()?;
        let args_of = |op: u32, off: u32| {
            let k = self.op_arities[op as usize];
            &pool[off as usize..off as usize + k]
        };
        let mut needed = vec![false; i + 1];
        needed[i] = true;
        for j in (0..=i).rev() {
            if needed[j] {
                if let Origin::Op { op, args } = origins[j] {
                    for &a in args_of(op, args) {
                        needed[a as usize] = true;
                    }
                }
            }
        }
        let mut renumber = vec![usize::MAX; i + 1];
        let mut nodes = Vec::new();
        for j in 0..=i {
            if !needed[j] {
                continue;
            }
            renumber[j] = nodes.len();
            nodes.push(match origins[j] {
                Origin::Generator(g) => Node::Var(g as usize),
                Origin::Op { op, args } => Node::Gate {
                    op: self.op_names[op as usize].clone(),
                    args: args_of(op, args)
                        .iter()
                        .map(|&a| renumber[a as usize])
                        .collect(),
                },
            });
        }
        Some(TermCircuit::from_parts_unchecked(
            self.inputs,
            nodes,
            renumber[i],
        ))
    }
}

/// Closure of `generators` in `alg^m`, where `m` is the common generator
/// length. `budget` defaults to [`DEFAULT_TUPLE_BUDGET`].
pub fn generate_subpower(
    alg: &FiniteAlgebra,
    generators: &[Vec<Elem>],
    with_provenance: bool,
    budget: Option<usize>,
) -> Result<GeneratedSubpower> {
    let power = generators.first().map_or(0, Vec::len);
    Closure::new(alg, power, generators.to_vec())?
        .provenance(with_provenance)
        .budget(budget.unwrap_or(DEFAULT_TUPLE_BUDGET))
        .run()
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{Operation, TupleIter};
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn as_set(g: &GeneratedSubpower) -> BTreeSet<Vec<Elem>> {
        g.iter().map(<[Elem]>::to_vec).collect()
    }

    /// Naive fixpoint: apply every op to every argument list until stable.
    fn naive(alg: &FiniteAlgebra, gens: &[Vec<Elem>]) -> BTreeSet<Vec<Elem>> {
        let m = gens[0].len();
        let mut s: BTreeSet<Vec<Elem>> = gens.iter().cloned().collect();
        loop {
            let cur: Vec<Vec<Elem>> = s.iter().cloned().collect();
            let mut grew = false;
            for (op, o) in alg.ops().iter().enumerate() {
                for choice in TupleIter::new(cur.len(), o.arity()) {
                    let t: Vec<Elem> = (0..m)
                        .map(|r| {
                            let args: Vec<Elem> =
                                choice.iter().map(|&c| cur[c as usize][r]).collect();
                            alg.apply(op, &args)
                        })
                        .collect();
                    grew |= s.insert(t);
                }
            }
            if !grew {
                return s;
            }
        }
    }

    #[test]
    fn work_budget_stops_closure() {
        let gens = vec![
            vec![0, 1, 1, 0, 1],
            vec![1, 1, 0, 0, 0],
            vec![0, 0, 1, 1, 1],
        ];
        let full = generate_subpower(&minority(), &gens, false, None).unwrap();
        let err = Closure::new(&minority(), 5, gens.clone())
            .unwrap()
            .budget(Budget {
                tuples: 1000,
                combinations: 1,
            })
            .run()
            .unwrap_err();
        assert!(matches!(err, Error::WorkBudget { limit: 1, .. }));
        assert_eq!(err.exit_code(), 3);
        let ample = Budget {
            tuples: 1000,
            combinations: full.stats().combinations,
        };
        let again = Closure::new(&minority(), 5, gens)
            .unwrap()
            .budget(ample)
            .run()
            .unwrap();
        assert_eq!(again.len(), full.len());
    }

    #[test]
    fn wide_keys_match_packed() {
        let alg = minority();
        let short = vec![
            vec![0, 1, 1, 0, 1],
            vec![1, 1, 0, 0, 0],
            vec![0, 0, 1, 1, 1],
        ];
        let long: Vec<Vec<Elem>> = short
            .iter()
            .map(|g| g.iter().copied().cycle().take(130).collect())
            .collect();
        let a = generate_subpower(&alg, &short, false, None).unwrap();
        let b = generate_subpower(&alg, &long, false, None).unwrap();
        assert_eq!(a.len(), b.len());
        for t in b.iter() {
            assert!(a.contains(&t[..5]));
            assert_eq!(b.index_of(t), Some(b.iter().position(|u| u == t).unwrap()));
        }
    }

    #[test]
    fn semilattice_example() {
        let g = generate_subpower(&semilattice(), &[vec![0, 1], vec![1, 0]], true, None).unwrap();
        let expect: BTreeSet<Vec<Elem>> =
            [vec![0, 1], vec![1, 0], vec![0, 0]].into_iter().collect();
        assert_eq!(as_set(&g), expect);
        assert!(g.is_complete());
        let c = g.circuit(g.index_of(&[0, 0]).unwrap()).unwrap();
        assert_eq!(c.evaluate(&semilattice(), &[0, 1]).unwrap(), 0);
    }

    #[test]
    fn minority_example() {
        let g = generate_subpower(&minority(), &[vec![0, 1], vec![1, 0]], false, None).unwrap();
        let expect: BTreeSet<Vec<Elem>> = [vec![0, 1], vec![1, 0]].into_iter().collect();
        assert_eq!(as_set(&g), expect);
        assert!(g.circuit(0).is_none());
    }

    #[test]
    fn idempotent_constant_is_closed() {
        let g = generate_subpower(&semilattice(), &[vec![1, 1, 1]], false, None).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn budget_is_an_error() {
        let gens: Vec<Vec<Elem>> = (0..4)
            .map(|i| TupleIter::new(2, 4).map(|t| t[i]).collect())
            .collect();
        let err = generate_subpower(&semilattice(), &gens, false, Some(5)).unwrap_err();
        assert!(matches!(err, Error::Budget { limit: 5, .. }));
    }

    #[test]
    fn nullary_and_computed_ops() {
        let alg = FiniteAlgebra::new(
            3,
            vec![
                Operation::from_table("c", 0, vec![2]),
                Operation::computed("s", 1, |a: &[Elem]| (a[0] + 1) % 3),
            ],
        )
        .unwrap();
        let g = generate_subpower(&alg, &[vec![0, 1]], true, None).unwrap();
        let expect: BTreeSet<Vec<Elem>> = [
            vec![0, 1],
            vec![1, 2],
            vec![2, 0],
            vec![2, 2],
            vec![0, 0],
            vec![1, 1],
        ]
        .into_iter()
        .collect();
        assert_eq!(as_set(&g), expect);
        for i in 0..g.len() {
            let c = g.circuit(i).unwrap();
            for r in 0..2 {
                assert_eq!(c.evaluate(&alg, &[[0, 1][r]]).unwrap(), g.tuple(i)[r]);
            }
        }
    }

    #[test]
    fn goal_stops_early() {
        let (g, hit) = Closure::new(&semilattice(), 2, vec![vec![0, 1], vec![1, 0]])
            .unwrap()
            .run_until(|t| t == [0, 0])
            .unwrap();
        assert_eq!(g.tuple(hit.unwrap()), &[0, 0]);
        let (_, none) = Closure::new(&minority(), 2, vec![vec![0, 1], vec![1, 0]])
            .unwrap()
            .run_until(|t| t[0] == t[1])
            .unwrap();
        assert!(none.is_none());
    }

    fn random_algebra() -> impl Strategy<Value = FiniteAlgebra> {
        (
            prop::collection::vec(0u32..3, 9),
            prop::collection::vec(0u32..3, 27),
        )
            .prop_map(|(f, g)| {
                FiniteAlgebra::new(
                    3,
                    vec![
                        Operation::from_table("f", 2, f),
                        Operation::from_table("g", 3, g),
                    ],
                )
                .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn matches_naive_and_order_independent(
            alg in random_algebra(),
            gens in prop::collection::vec(prop::collection::vec(0u32..3, 3), 1..4),
        ) {
            let g = generate_subpower(&alg, &gens, true, None).unwrap();
            prop_assert_eq!(as_set(&g), naive(&alg, &gens));
            let mut rev = gens.clone();
            rev.reverse();
            let h = generate_subpower(&alg, &rev, false, None).unwrap();
            prop_assert_eq!(as_set(&g), as_set(&h));
            for i in 0..g.len() {
                let bound = g.circuit(i).unwrap();
                let cols: Vec<Vec<Elem>> = gens.clone();
                let vals = bound.bind(&alg).unwrap().eval_columns(&cols);
                prop_assert_eq!(vals.as_slice(), g.tuple(i));
            }
        }

        #[test]
        fn parallel_is_deterministic(
            alg in random_algebra(),
            gens in prop::collection::vec(prop::collection::vec(0u32..3, 4), 2..4),
        ) {
            let a = Closure::new(&alg, 4, gens.clone()).unwrap().provenance(true).parallel(true).run().unwrap();
            let b = Closure::new(&alg, 4, gens).unwrap().provenance(true).parallel(false).run().unwrap();
            prop_assert_eq!(a.len(), b.len());
            for i in 0..a.len() {
                prop_assert_eq!(a.tuple(i), b.tuple(i));
                prop_assert_eq!(a.circuit(i), b.circuit(i));
            }
        }
    }
}
