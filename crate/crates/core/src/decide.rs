//! Decision procedures for `Σ_G`: local checks, the local-global reductions
//! for regular groups and products of regular groups, the clone-enumeration
//! oracle, and the comparator for cyclic loop conditions.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    apply_tuple_action, checked_pow, Budget, Closure, ClosureStats, Elem, FiniteAlgebra,
    TermCircuit, TupleIter, DEFAULT_TUPLE_BUDGET,
};
use crate::construct::{self, Scope};
use crate::error::{Error, Result};
use crate::perm::{permutation_orbits, prime_factors, radical, PermGroup, Permutation};

/// Largest `|A|ⁿ` for which `auto` runs the brute-force oracle.
pub const DEFAULT_BRUTE_DIMENSION: usize = 512;
/// Largest `|A|ⁿ` for which `auto` runs `exhaustive-local`.
pub const DEFAULT_LOCAL_DIMENSION: usize = 4096;

/// An algebra together with the group whose degree is the term arity.
#[derive(Clone, Debug)]
pub struct GTermInstance {
    alg: FiniteAlgebra,
    group: PermGroup,
}

impl GTermInstance {
    /// Fails if the group cannot be enumerated within its cap.
    pub fn new(alg: FiniteAlgebra, group: PermGroup) -> Result<Self> {
        group.elements()?;
        Ok(GTermInstance { alg, group })
    }

    pub fn alg(&self) -> &FiniteAlgebra {
        &self.alg
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn arity(&self) -> usize {
        self.group.degree()
    }

    pub(crate) fn elements(&self) -> &[Permutation] {
        self.group
            .elements()
            .expect("enumerated in GTermInstance::new")
    }

    /// `|A|ⁿ`, if it fits in a `usize`.
    pub fn power_size(&self) -> Option<usize> {
        checked_pow(self.alg.size(), self.arity())
    }

    pub(crate) fn with_group(&self, group: PermGroup) -> Result<GTermInstance> {
        GTermInstance::new(self.alg.clone(), group)
    }
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub tuple_budget: usize,
    /// Cap on operation applications per closure.
    pub work_budget: u64,
    pub want_witness: bool,
    pub brute_dimension: usize,
    pub local_dimension: usize,
}

impl DecideOptions {
    pub fn budget(&self) -> Budget {
        Budget {
            tuples: self.tuple_budget,
            combinations: self.work_budget,
        }
    }
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            tuple_budget: DEFAULT_TUPLE_BUDGET,
            work_budget: u64::MAX,
            want_witness: true,
            brute_dimension: DEFAULT_BRUTE_DIMENSION,
            local_dimension: DEFAULT_LOCAL_DIMENSION,
        }
    }
}

/// The method that produced a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "fixpoint")]
    Fixpoint,
    #[serde(rename = "local-global-regular")]
    Regular,
    #[serde(rename = "local-global-product")]
    Product,
    #[serde(rename = "nilpotent-reduction")]
    NilpotentReduction,
    #[serde(rename = "brute-force")]
    BruteForce,
    #[serde(rename = "exhaustive-local")]
    ExhaustiveLocal,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fixpoint => "fixpoint",
            Method::Regular => "local-global-regular",
            Method::Product => "local-global-product",
            Method::NilpotentReduction => "nilpotent-reduction",
            Method::BruteForce => "brute-force",
            Method::ExhaustiveLocal => "exhaustive-local",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The method requested by a caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Regular,
    Product,
    Brute,
    ExhaustiveLocal,
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => MethodChoice::Auto,
            "regular" => MethodChoice::Regular,
            "product" => MethodChoice::Product,
            "brute" => MethodChoice::Brute,
            "exhaustive-local" => MethodChoice::ExhaustiveLocal,
            other => return Err(Error::Invalid(format!("unknown method `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionStats {
    pub generated_tuples: u64,
    pub closure_iterations: u64,
    pub closures: u64,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub satisfied: bool,
    pub method: Method,
    pub witness: Option<TermCircuit>,
    pub stats: DecisionStats,
    pub notes: Vec<String>,
}

/// Thread-safe accumulator for closure statistics.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    generated: AtomicU64,
    rounds: AtomicU64,
    closures: AtomicU64,
}

impl Tally {
    pub(crate) fn add(&self, s: &ClosureStats) {
        self.generated
            .fetch_add(s.generated as u64, Ordering::Relaxed);
        self.rounds.fetch_add(s.rounds as u64, Ordering::Relaxed);
        self.closures.fetch_add(1, Ordering::Relaxed);
    }

    fn stats(&self, start: Instant) -> DecisionStats {
        DecisionStats {
            generated_tuples: self.generated.load(Ordering::Relaxed),
            closure_iterations: self.rounds.load(Ordering::Relaxed),
            closures: self.closures.load(Ordering::Relaxed),
            wall_time_ms: start.elapsed().as_millis() as u64,
        }
    }
}

/// A term certified on the tuple set `tuples`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalWitness {
    pub tuples: Vec<Vec<Elem>>,
    pub circuit: TermCircuit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalOutcome {
    pub satisfied: bool,
    pub witness: Option<LocalWitness>,
    pub stats: ClosureStats,
}

fn validate_tuples(inst: &GTermInstance, tuples: &[Vec<Elem>]) -> Result<()> {
    let n = inst.arity();
    for t in tuples {
        if t.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: t.len(),
            });
        }
        if let Some(x) = t.iter().find(|&&x| x as usize >= inst.alg.size()) {
            return Err(Error::Invalid(format!("tuple entry {x} outside universe")));
        }
    }
    Ok(())
}

fn find_root(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Whether some term is `G`-invariant on `tuples`. Complete: the answer is
/// "no" exactly when no tuple of the closure of the matrix columns is
/// constant on every block `{ā^π : π ∈ G}`.
pub fn check_local(
    inst: &GTermInstance,
    tuples: &[Vec<Elem>],
    want_witness: bool,
    budget: impl Into<Budget>,
) -> Result<LocalOutcome> {
    validate_tuples(inst, tuples)?;
    let n = inst.arity();
    let elements = inst.elements();

    let mut row_index: FxHashMap<Vec<Elem>, usize> = FxHashMap::default();
    let mut rows: Vec<Vec<Elem>> = Vec::new();
    let mut parent: Vec<usize> = Vec::new();
    for a in tuples {
        let mut base = None;
        for pi in elements {
            let row = apply_tuple_action(a, pi.images())?;
            let r = *row_index.entry(row.clone()).or_insert_with(|| {
                rows.push(row);
                parent.push(parent.len());
                parent.len() - 1
            });
            match base {
                None => base = Some(r),
                Some(b) => {
                    let (x, y) = (find_root(&mut parent, b), find_root(&mut parent, r));
                    parent[y] = x;
                }
            }
        }
    }
    let reps: Vec<usize> = (0..rows.len()).map(|r| find_root(&mut parent, r)).collect();
    let generators: Vec<Vec<Elem>> = (0..n)
        .map(|i| rows.iter().map(|row| row[i]).collect())
        .collect();

    let (closure, hit) = Closure::new(&inst.alg, rows.len(), generators)?
        .provenance(want_witness)
        .budget(budget)
        .run_until(|u| reps.iter().enumerate().all(|(r, &rep)| u[r] == u[rep]))?;
    let witness = match (hit, want_witness) {
        (Some(i), true) => Some(LocalWitness {
            tuples: tuples.to_vec(),
            circuit: closure.circuit(i).expect("provenance was recorded"),
        }),
        _ => None,
    };
    Ok(LocalOutcome {
        satisfied: hit.is_some(),
        witness,
        stats: closure.stats(),
    })
}

/// Checks `t(ā^π) = t(ā)` for all `ā` in `tuples` and all `π` in the group.
pub fn verify_witness(
    inst: &GTermInstance,
    circuit: &TermCircuit,
    tuples: &[Vec<Elem>],
) -> Result<()> {
    construct::verify_invariance(
        &inst.alg,
        &inst.group,
        circuit,
        &Scope::Tuples(tuples.to_vec()),
    )
}

/// Invariance on all of `Aⁿ`.
pub fn verify_witness_global(inst: &GTermInstance, circuit: &TermCircuit) -> Result<()> {
    construct::verify_invariance(&inst.alg, &inst.group, circuit, &Scope::Global)
}

/// A point fixed by the whole group, if any.
pub fn common_fixpoint(group: &PermGroup) -> Option<usize> {
    group.orbits().fixpoints.first().copied()
}

fn fixpoint_report(inst: &GTermInstance, point: usize, start: Instant) -> Result<DecisionReport> {
    Ok(DecisionReport {
        satisfied: true,
        method: Method::Fixpoint,
        witness: Some(TermCircuit::projection(inst.arity(), point)?),
        stats: Tally::default().stats(start),
        notes: vec![format!("point {} is fixed by every element", point + 1)],
    })
}

/// Representatives of the orbits of `G` acting on `Aⁿ`, in lexicographic order.
pub(crate) fn tuple_orbit_representatives(inst: &GTermInstance) -> Result<Vec<Vec<Elem>>> {
    let size = inst.alg.size();
    let n = inst.arity();
    let total = inst
        .power_size()
        .ok_or_else(|| Error::Invalid("|A|^n overflows".into()))?;
    let mut seen = vec![false; total];
    let mut reps = Vec::new();
    let index = |t: &[Elem]| t.iter().fold(0usize, |acc, &x| acc * size + x as usize);
    for a in TupleIter::new(size, n) {
        let i = index(&a);
        if seen[i] {
            continue;
        }
        for pi in inst.elements() {
            let b = apply_tuple_action(&a, pi.images())?;
            seen[index(&b)] = true;
        }
        reps.push(a);
    }
    Ok(reps)
}

/// Runs `check` on each item in parallel; returns the first failing item found
/// (not necessarily the first in order), or the first error.
fn find_failure<T: Send + Sync>(
    items: impl IntoParallelIterator<Item = T>,
    check: impl Fn(&T) -> Result<bool> + Sync,
) -> Result<Option<T>> {
    let found = items
        .into_par_iter()
        .find_map_any(|item| match check(&item) {
            Ok(true) => None,
            Ok(false) => Some(Ok(item)),
            Err(e) => Some(Err(e)),
        });
    found.transpose()
}

/// Complete for regular groups: every singleton must pass.
pub fn decide_regular(inst: &GTermInstance, opts: &DecideOptions) -> Result<DecisionReport> {
    let start = Instant::now();
    if !inst.group.is_regular()? {
        return Err(Error::NotRegular);
    }
    let tally = Tally::default();
    let reps = tuple_orbit_representatives(inst)?;
    let failure = find_failure(reps, |a| {
        let out = check_local(inst, std::slice::from_ref(a), false, opts.budget())?;
        tally.add(&out.stats);
        Ok(out.satisfied)
    })?;
    let mut notes = Vec::new();
    let witness = match &failure {
        Some(a) => {
            notes.push(format!("no term is invariant on the single tuple {a:?}"));
            None
        }
        None if opts.want_witness => {
            let c = construct::witness_regular_tallied(
                inst,
                &Scope::Global,
                opts.tuple_budget,
                &tally,
            )?;
            Some(c)
        }
        None => None,
    };
    Ok(DecisionReport {
        satisfied: failure.is_none(),
        method: Method::Regular,
        witness,
        stats: tally.stats(start),
        notes,
    })
}

/// Splits `G` into its orbit restrictions when they are all regular and
/// `G` is their full direct product.
pub fn regular_product_decomposition(group: &PermGroup) -> Result<Option<Vec<Vec<usize>>>> {
    let orbits = group.orbits().orbits;
    let mut product = 1usize;
    for orbit in &orbits {
        let restricted = group.restrict_to(orbit)?;
        if !restricted.is_regular()? {
            return Ok(None);
        }
        product = product.saturating_mul(restricted.order()?);
    }
    Ok((product == group.order()?).then_some(orbits))
}

/// All `r`-element subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (r <= n).then(|| (0..r).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let c = current.as_mut().unwrap();
        let mut i = r;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if c[i] < n - r + i {
                c[i] += 1;
                for j in i + 1..r {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Complete for direct products of `r` regular groups: every `r`-subset must
/// pass (all of `Aⁿ` when `|A|ⁿ < r`).
pub fn decide_product_regular(
    inst: &GTermInstance,
    opts: &DecideOptions,
) -> Result<DecisionReport> {
    let start = Instant::now();
    let blocks = regular_product_decomposition(&inst.group)?.ok_or(Error::NoDecomposition)?;
    let r = blocks.len();
    let all: Vec<Vec<Elem>> = TupleIter::new(inst.alg.size(), inst.arity()).collect();
    let tally = Tally::default();
    let k = r.min(all.len());
    let failure = find_failure(combinations(all.len(), k).par_bridge(), |subset| {
        let f: Vec<Vec<Elem>> = subset.iter().map(|&i| all[i].clone()).collect();
        let out = check_local(inst, &f, false, opts.budget())?;
        tally.add(&out.stats);
        Ok(out.satisfied)
    })?;
    let mut notes = vec![format!("{r} regular factors on orbits {blocks:?}")];
    if let Some(subset) = &failure {
        let f: Vec<&Vec<Elem>> = subset.iter().map(|&i| &all[i]).collect();
        notes.push(format!("fails on {f:?}"));
        notes.push("the failing set reported is the first found by parallel search, not necessarily the least".into());
    }
    let witness = if failure.is_none() && opts.want_witness {
        let out = check_local(inst, &all, true, opts.budget())?;
        tally.add(&out.stats);
        Some(
            out.witness
                .ok_or_else(|| {
                    Error::Verification("local-global decision and global check disagree".into())
                })?
                .circuit,
        )
    } else {
        None
    };
    Ok(DecisionReport {
        satisfied: failure.is_none(),
        method: Method::Product,
        witness,
        stats: tally.stats(start),
        notes,
    })
}

/// The ground-truth oracle: enumerates the `n`-ary clone as a subpower of
/// `A^{Aⁿ}` and looks for a `G`-invariant table.
pub fn decide_brute_force(inst: &GTermInstance, opts: &DecideOptions) -> Result<DecisionReport> {
    let start = Instant::now();
    let size = inst.alg.size();
    let n = inst.arity();
    let dim = inst
        .power_size()
        .filter(|&d| d <= opts.tuple_budget)
        .ok_or(Error::Budget {
            limit: opts.tuple_budget,
            generated: 0,
            rounds: 0,
        })?;
    let points: Vec<Vec<Elem>> = TupleIter::new(size, n).collect();
    let index = |t: &[Elem]| t.iter().fold(0usize, |acc, &x| acc * size + x as usize);
    let moves: Vec<Vec<usize>> = inst
        .group
        .generators()
        .iter()
        .map(|pi| {
            points
                .iter()
                .map(|a| index(&apply_tuple_action(a, pi.images()).expect("degree checked")))
                .collect()
        })
        .collect();
    let projections: Vec<Vec<Elem>> = (0..n)
        .map(|i| points.iter().map(|a| a[i]).collect())
        .collect();
    let (closure, hit) = Closure::new(&inst.alg, dim, projections)?
        .provenance(opts.want_witness)
        .budget(opts.budget())
        .run_until(|u| {
            moves
                .iter()
                .all(|mv| mv.iter().enumerate().all(|(i, &j)| u[i] == u[j]))
        })?;
    let tally = Tally::default();
    tally.add(&closure.stats());
    let mut notes = Vec::new();
    if hit.is_none() {
        notes.push(format!(
            "the {n}-ary clone has {} operations, none invariant",
            closure.len()
        ));
    }
    Ok(DecisionReport {
        satisfied: hit.is_some(),
        method: Method::BruteForce,
        witness: hit
            .filter(|_| opts.want_witness)
            .and_then(|i| closure.circuit(i)),
        stats: tally.stats(start),
        notes,
    })
}

/// `check_local` on `F = Aⁿ`; complete for every group.
pub fn decide_exhaustive_local(
    inst: &GTermInstance,
    opts: &DecideOptions,
) -> Result<DecisionReport> {
    let start = Instant::now();
    let all: Vec<Vec<Elem>> = TupleIter::new(inst.alg.size(), inst.arity()).collect();
    let out = check_local(inst, &all, opts.want_witness, opts.budget())?;
    let tally = Tally::default();
    tally.add(&out.stats);
    Ok(DecisionReport {
        satisfied: out.satisfied,
        method: Method::ExhaustiveLocal,
        witness: out.witness.map(|w| w.circuit),
        stats: tally.stats(start),
        notes: Vec::new(),
    })
}

/// Regular nilpotent `G` of composite order: `Σ_G` holds iff `Σ_{Z_p}` holds
/// for every prime `p` dividing `|G|`.
fn decide_nilpotent(
    inst: &GTermInstance,
    primes: &[usize],
    opts: &DecideOptions,
) -> Result<DecisionReport> {
    let start = Instant::now();
    let tally = Tally::default();
    let mut notes = vec![format!("reduced to cyclic groups of orders {primes:?}")];
    let sub = DecideOptions {
        want_witness: false,
        ..opts.clone()
    };
    let mut satisfied = true;
    for &p in primes {
        let cyclic = inst.with_group(PermGroup::cyclic(p))?;
        let r = decide_regular(&cyclic, &sub)?;
        tally
            .generated
            .fetch_add(r.stats.generated_tuples, Ordering::Relaxed);
        tally
            .rounds
            .fetch_add(r.stats.closure_iterations, Ordering::Relaxed);
        tally
            .closures
            .fetch_add(r.stats.closures, Ordering::Relaxed);
        if !r.satisfied {
            notes.push(format!("no Z_{p}-term"));
            satisfied = false;
            break;
        }
    }
    let witness = if satisfied && opts.want_witness {
        Some(construct::witness_regular_tallied(
            inst,
            &Scope::Global,
            opts.tuple_budget,
            &tally,
        )?)
    } else {
        None
    };
    Ok(DecisionReport {
        satisfied,
        method: Method::NilpotentReduction,
        witness,
        stats: tally.stats(start),
        notes,
    })
}

/// Dispatches to a complete method and re-verifies any witness on all of `Aⁿ`.
pub fn decide(
    inst: &GTermInstance,
    choice: MethodChoice,
    opts: &DecideOptions,
) -> Result<DecisionReport> {
    let report = match choice {
        MethodChoice::Auto => decide_auto(inst, opts)?,
        MethodChoice::Regular => decide_regular(inst, opts)?,
        MethodChoice::Product => decide_product_regular(inst, opts)?,
        MethodChoice::Brute => decide_brute_force(inst, opts)?,
        MethodChoice::ExhaustiveLocal => decide_exhaustive_local(inst, opts)?,
    };
    if let Some(w) = &report.witness {
        verify_witness_global(inst, w)?;
    }
    Ok(report)
}

fn decide_auto(inst: &GTermInstance, opts: &DecideOptions) -> Result<DecisionReport> {
    let start = Instant::now();
    if let Some(point) = common_fixpoint(&inst.group) {
        return fixpoint_report(inst, point, start);
    }
    if inst.group.is_regular()? {
        let order = inst.group.order()?;
        if !opts.want_witness && !crate::perm::is_prime(order) {
            if let Ok(primes) = construct::reduce_nilpotent(&inst.group) {
                return decide_nilpotent(inst, &primes, opts);
            }
        }
        return decide_regular(inst, opts);
    }
    if regular_product_decomposition(&inst.group)?.is_some() {
        return decide_product_regular(inst, opts);
    }
    let dim = inst.power_size().unwrap_or(usize::MAX);
    if dim <= opts.brute_dimension {
        return decide_brute_force(inst, opts);
    }
    if dim <= opts.local_dimension {
        return decide_exhaustive_local(inst, opts);
    }
    Err(Error::NoMethod(format!(
        "group is neither regular nor a product of regular groups, and |A|^n = {} exceeds {}",
        if dim == usize::MAX {
            "overflow".to_string()
        } else {
            dim.to_string()
        },
        opts.local_dimension
    )))
}

/// How one orbit of `π` is matched by an orbit of `ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitMatch {
    pub orbit: Vec<usize>,
    pub length: usize,
    pub radical: usize,
    /// Length of a `ρ`-orbit whose radical divides `radical`.
    pub matched_by: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub holds: bool,
    pub orbits: Vec<OrbitMatch>,
}

/// `Σ_⟨π⟩ ≥ Σ_⟨ρ⟩` with a per-orbit justification: every orbit length `n`
/// of `π` needs an orbit length `m` of `ρ` with `rad(m) | rad(n)`.
pub fn compare_cyclic_explained(pi: &Permutation, rho: &Permutation) -> Comparison {
    let mut rho_lengths = permutation_orbits(rho).lengths();
    rho_lengths.sort_unstable();
    rho_lengths.dedup();
    let orbits: Vec<OrbitMatch> = permutation_orbits(pi)
        .orbits
        .into_iter()
        .map(|orbit| {
            let length = orbit.len();
            let rad = radical(length).expect("orbits are nonempty");
            let matched_by = rho_lengths
                .iter()
                .copied()
                .find(|&m| rad.is_multiple_of(radical(m).expect("orbits are nonempty")));
            OrbitMatch {
                orbit,
                length,
                radical: rad,
                matched_by,
            }
        })
        .collect();
    Comparison {
        holds: orbits.iter().all(|o| o.matched_by.is_some()),
        orbits,
    }
}

pub fn compare_cyclic(pi: &Permutation, rho: &Permutation) -> bool {
    compare_cyclic_explained(pi, rho).holds
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeDecomposition {
    /// `π` has a fixpoint, so `Σ_⟨π⟩` is trivial.
    pub trivial: bool,
    pub profiles: Vec<Permutation>,
}

/// One cycle of each length in `primes`, on consecutive points.
fn prime_profile(primes: &[usize]) -> Permutation {
    let mut images = Vec::new();
    for &q in primes {
        let base = images.len();
        images.extend((0..q).map(|i| base + (i + 1) % q));
    }
    Permutation::from_images(images).expect("disjoint cycles")
}

/// The `≤`-maximal permutations with orbits of distinct prime lengths that lie
/// below `Σ_⟨π⟩`; `Σ_⟨π⟩` is their join.
pub fn prime_orbit_decomposition(pi: &Permutation) -> PrimeDecomposition {
    if !pi.fixpoints().is_empty() {
        return PrimeDecomposition {
            trivial: true,
            profiles: Vec::new(),
        };
    }
    let mut primes: Vec<usize> = pi
        .cycle_lengths()
        .into_iter()
        .flat_map(prime_factors)
        .collect();
    primes.sort_unstable();
    primes.dedup();
    let below: Vec<Permutation> = (1u64..1 << primes.len())
        .map(|mask| {
            let subset: Vec<usize> = (0..primes.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| primes[i])
                .collect();
            prime_profile(&subset)
        })
        .filter(|rho| compare_cyclic(pi, rho))
        .collect();
    let mut profiles: Vec<Permutation> = Vec::new();
    for rho in &below {
        let dominated = below
            .iter()
            .any(|other| compare_cyclic(other, rho) && !compare_cyclic(rho, other));
        let duplicate = profiles
            .iter()
            .any(|kept| compare_cyclic(kept, rho) && compare_cyclic(rho, kept));
        if !dominated && !duplicate {
            profiles.push(rho.clone());
        }
    }
    profiles.sort_by_key(|p| (p.degree(), p.cycle_lengths()));
    PrimeDecomposition {
        trivial: false,
        profiles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;
    use crate::algebra::Operation;
    use crate::perm::direct_product;

    fn inst(alg: FiniteAlgebra, g: PermGroup) -> GTermInstance {
        GTermInstance::new(alg, g).unwrap()
    }

    fn cyc(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    fn opts() -> DecideOptions {
        DecideOptions::default()
    }

    #[test]
    fn check_local_examples() {
        let s2 = PermGroup::symmetric(2);
        let out = check_local(&inst(semilattice(), s2.clone()), &[vec![0, 1]], true, 1000).unwrap();
        let w = out.witness.unwrap();
        assert_eq!(
            w.circuit.evaluate(&semilattice(), &[0, 1]).unwrap(),
            w.circuit.evaluate(&semilattice(), &[1, 0]).unwrap()
        );
        let out = check_local(&inst(minority(), s2.clone()), &[vec![0, 1]], true, 1000).unwrap();
        assert!(!out.satisfied && out.witness.is_none());
        let out = check_local(
            &inst(semilattice(), PermGroup::cyclic(3)),
            &[vec![1, 1, 1], vec![0, 0, 0]],
            true,
            1000,
        )
        .unwrap();
        assert_eq!(
            out.witness.unwrap().circuit,
            TermCircuit::projection(3, 0).unwrap()
        );
        let out = check_local(&inst(minority(), s2), &[], true, 1000).unwrap();
        assert_eq!(
            out.witness.unwrap().circuit,
            TermCircuit::projection(2, 0).unwrap()
        );
    }

    #[test]
    fn check_local_rejects_bad_tuples() {
        let i = inst(semilattice(), PermGroup::symmetric(2));
        assert!(check_local(&i, &[vec![0]], false, 100).is_err());
        assert!(check_local(&i, &[vec![0, 2]], false, 100).is_err());
    }

    #[test]
    fn regular_examples() {
        let r = decide_regular(&inst(semilattice(), PermGroup::cyclic(2)), &opts()).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.method, Method::Regular);
        assert!(
            !decide_regular(&inst(minority(), PermGroup::cyclic(2)), &opts())
                .unwrap()
                .satisfied
        );
        let r = decide_regular(&inst(minority(), PermGroup::cyclic(3)), &opts()).unwrap();
        assert!(r.satisfied);
        verify_witness_global(&inst(minority(), PermGroup::cyclic(3)), &r.witness.unwrap())
            .unwrap();
        assert_eq!(
            decide_regular(&inst(semilattice(), PermGroup::symmetric(3)), &opts()).unwrap_err(),
            Error::NotRegular
        );
    }

    #[test]
    fn product_examples() {
        let z2z2 = direct_product(&PermGroup::cyclic(2), &PermGroup::cyclic(2));
        let r = decide_product_regular(&inst(minority(), z2z2), &opts()).unwrap();
        assert!(!r.satisfied);
        let z2z3 = direct_product(&PermGroup::cyclic(2), &PermGroup::cyclic(3));
        let i = inst(semilattice(), z2z3);
        let r = decide_product_regular(&i, &opts()).unwrap();
        assert!(r.satisfied);
        verify_witness_global(&i, &r.witness.unwrap()).unwrap();
        let subdirect =
            PermGroup::generate(vec![cyc("(1 2)(3 4)", 6), cyc("(1 2)(5 6)", 6)]).unwrap();
        assert_eq!(regular_product_decomposition(&subdirect).unwrap(), None);
        assert_eq!(
            decide_product_regular(&inst(semilattice(), subdirect), &opts()).unwrap_err(),
            Error::NoDecomposition
        );
    }

    #[test]
    fn brute_force_examples() {
        let r = decide_brute_force(&inst(semilattice(), PermGroup::symmetric(3)), &opts()).unwrap();
        assert!(r.satisfied);
        let r = decide_brute_force(&inst(projection(), PermGroup::cyclic(3)), &opts()).unwrap();
        assert!(!r.satisfied);
        let g = PermGroup::generate(vec![cyc("(2 3)", 3)]).unwrap();
        let r = decide(&inst(projection(), g), MethodChoice::Auto, &opts()).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.method, Method::Fixpoint);
        assert_eq!(r.witness.unwrap(), TermCircuit::projection(3, 0).unwrap());
    }

    #[test]
    fn auto_examples() {
        // x+y+z mod 2 is fully symmetric
        let r = decide(
            &inst(minority(), PermGroup::symmetric(3)),
            MethodChoice::Auto,
            &opts(),
        )
        .unwrap();
        assert!(r.satisfied);
        assert_eq!(r.method, Method::BruteForce);
        let r = decide(
            &inst(minority(), PermGroup::symmetric(2)),
            MethodChoice::Auto,
            &opts(),
        )
        .unwrap();
        assert!(!r.satisfied);
        let f: Vec<Elem> = TupleIter::new(3, 2)
            .map(|t| (2 * t[0] + 2 * t[1]) % 3)
            .collect();
        let alg = FiniteAlgebra::new(3, vec![Operation::from_table("f", 2, f)]).unwrap();
        let r = decide(
            &inst(alg, PermGroup::cyclic(2)),
            MethodChoice::Auto,
            &opts(),
        )
        .unwrap();
        assert!(r.satisfied);
        let r = decide(
            &inst(semilattice(), PermGroup::symmetric(3)),
            MethodChoice::ExhaustiveLocal,
            &opts(),
        )
        .unwrap();
        assert!(r.satisfied);
        let quick = DecideOptions {
            want_witness: false,
            ..opts()
        };
        let r = decide(
            &inst(minority(), PermGroup::cyclic(6)),
            MethodChoice::Auto,
            &quick,
        )
        .unwrap();
        assert_eq!(r.method, Method::NilpotentReduction);
        assert!(!r.satisfied);
    }

    #[test]
    fn report_json_keys() {
        let r = decide(
            &inst(semilattice(), PermGroup::cyclic(2)),
            MethodChoice::Auto,
            &opts(),
        )
        .unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["satisfied"], true);
        assert_eq!(v["method"], "local-global-regular");
        assert!(v["stats"]["generated_tuples"].is_u64());
    }

    #[test]
    fn compare_examples() {
        let p = cyc("(1 2 3)(4 5)", 6);
        assert!(compare_cyclic(&p, &p));
        let e = compare_cyclic_explained(&p, &cyc("(1 2 3 4 5 6)", 6));
        assert!(!e.holds);
        assert_eq!(
            e.orbits
                .iter()
                .find(|o| o.matched_by.is_none())
                .unwrap()
                .length,
            3
        );
        assert!(compare_cyclic(&cyc("(1 2 3 4)", 4), &cyc("(1 2)", 2)));
    }

    #[test]
    fn decomposition_examples() {
        let d = prime_orbit_decomposition(&cyc("(1 2 3 4 5)", 5));
        assert_eq!(d.profiles, vec![cyc("(1 2 3 4 5)", 5)]);
        let d = prime_orbit_decomposition(&cyc("(1 2 3 4 5 6)", 6));
        assert_eq!(d.profiles, vec![cyc("(1 2)", 2), cyc("(1 2 3)", 3)]);
        let d = prime_orbit_decomposition(&cyc("(1 2)(3 4)", 4));
        assert_eq!(d.profiles, vec![cyc("(1 2)", 2)]);
        assert!(prime_orbit_decomposition(&cyc("(1 2)", 3)).trivial);
    }

    #[test]
    fn combinations_enumerate() {
        let all: Vec<Vec<usize>> = combinations(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(combinations(2, 3).count(), 0);
        assert_eq!(combinations(3, 0).count(), 1);
    }
}
