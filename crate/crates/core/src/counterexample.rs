//! Idempotent algebras `A_k` that have symmetric terms on every `k`-element
//! set of tuples but no global `G`-term, together with a checkable
//! certificate (an invariant relation `Q`) for the latter.
//!
//! Encoding of the universe `({0..k} × N) ∪ Z_p` with `N = {0..n−1}`:
//! `(i, a) ↦ i·n + a` and `j ∈ Z_p ↦ (k+1)·n + j`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::algebra::{checked_pow, Budget, Elem, FiniteAlgebra, Operation, TupleIter};
use crate::decide::{self, DecideOptions, GTermInstance, MethodChoice};
use crate::error::{Error, Result};
use crate::perm::{permutation_orbits, prime_factors, PermGroup, Permutation};

/// Tables with more entries than this are evaluated on demand.
pub const LAZY_TABLE_THRESHOLD: usize = 10_000_000;
/// Default cap on `(k+1)·|A|ⁿ`.
pub const DEFAULT_TABLE_CAP: usize = 1_000_000_000;
/// Table evaluations allowed in [`cross_check_small`] when the budget
/// leaves work unlimited; divided by `|A|ⁿ` to cap operation applications.
pub const DEFAULT_CROSS_CHECK_CELLS: u64 = 1_000_000_000;
/// Cap on `|Z_p^I| = p^{(k+1)p}` for the brute-force search for `R`.
pub const DEFAULT_INDEX_CAP: usize = 1 << 24;

#[derive(Clone, Debug)]
pub struct CounterexampleSpec {
    group: PermGroup,
    alpha_given: Permutation,
    alpha: Permutation,
    fixpoint: usize,
    orbit_length: usize,
    p: usize,
    k: usize,
}

impl CounterexampleSpec {
    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    /// The permutation as supplied.
    pub fn alpha_given(&self) -> &Permutation {
        &self.alpha_given
    }

    /// The power of the supplied permutation whose non-trivial orbits have length `p`.
    pub fn alpha(&self) -> &Permutation {
        &self.alpha
    }

    pub fn fixpoint(&self) -> usize {
        self.fixpoint
    }

    /// Common length of the supplied permutation's non-trivial orbits.
    pub fn orbit_length(&self) -> usize {
        self.orbit_length
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `(k+1)·n + p`.
    pub fn universe_size(&self) -> usize {
        (self.k + 1) * self.degree() + self.p
    }
}

/// One fixpoint, all other orbits of one common length `ℓ ≥ 2`; returns
/// `(fixpoint, ℓ)`.
fn alpha_shape(alpha: &Permutation) -> std::result::Result<(usize, usize), String> {
    let fix = alpha.fixpoints();
    if fix.len() != 1 {
        return Err(format!(
            "{alpha} has {} fixpoints, expected exactly one",
            fix.len()
        ));
    }
    let mut lengths: Vec<usize> = permutation_orbits(alpha)
        .lengths()
        .into_iter()
        .filter(|&l| l > 1)
        .collect();
    lengths.dedup();
    match lengths.as_slice() {
        [l] => Ok((fix[0], *l)),
        _ => Err(format!(
            "non-trivial orbits of {alpha} have unequal lengths {lengths:?}"
        )),
    }
}

/// Validates the hypotheses and replaces `alpha` by `alpha^{ℓ/p}` for the
/// least prime `p` dividing the orbit length `ℓ`.
pub fn build_spec(group: &PermGroup, alpha: &Permutation, k: usize) -> Result<CounterexampleSpec> {
    if alpha.degree() != group.degree() {
        return Err(Error::DegreeMismatch(alpha.degree(), group.degree()));
    }
    if let Some(&f) = group.orbits().fixpoints.first() {
        return Err(Error::Hypothesis(format!(
            "the group fixes point {}",
            f + 1
        )));
    }
    if !group.contains(alpha)? {
        return Err(Error::Hypothesis(format!("{alpha} is not in the group")));
    }
    let (fixpoint, orbit_length) = alpha_shape(alpha).map_err(Error::Hypothesis)?;
    let p = prime_factors(orbit_length)[0];
    let effective = alpha.pow((orbit_length / p) as i64);
    debug_assert_eq!(group.degree() % p, 1 % p);
    Ok(CounterexampleSpec {
        group: group.clone(),
        alpha_given: alpha.clone(),
        alpha: effective,
        fixpoint,
        orbit_length,
        p,
        k,
    })
}

/// Which defining rule determines a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Sum,
    Constant,
    Orbit(usize),
    Else,
}

/// The rule set of `f_0..f_k`, shared by tables and on-demand evaluation.
#[derive(Clone, Debug)]
pub struct Rules {
    n: usize,
    k: usize,
    p: usize,
    alpha: Vec<usize>,
}

impl Rules {
    fn new(spec: &CounterexampleSpec) -> Self {
        Rules {
            n: spec.degree(),
            k: spec.k,
            p: spec.p,
            alpha: spec.alpha.images().to_vec(),
        }
    }

    fn zp_base(&self) -> Elem {
        ((self.k + 1) * self.n) as Elem
    }

    pub fn encode_pair(&self, i: usize, a: usize) -> Elem {
        (i * self.n + a) as Elem
    }

    pub fn encode_zp(&self, j: usize) -> Elem {
        self.zp_base() + j as Elem
    }

    /// `j` with `a = α^j(t̄)` for the transversal element `t̄` of `a`'s orbit,
    /// the transversal being the lexicographically least orbit element.
    pub fn orbit_position(&self, a: &[usize]) -> usize {
        let mut cur = a.to_vec();
        let mut best = a.to_vec();
        let mut best_s = 0;
        for s in 1..self.p {
            for x in cur.iter_mut() {
                *x = self.alpha[*x];
            }
            if cur < best {
                best.clone_from(&cur);
                best_s = s;
            }
        }
        // best = α^{best_s}(a), so a = α^{p − best_s}(best)
        (self.p - best_s) % self.p
    }

    /// The first rule that applies to `f_i(args)`.
    pub fn rule(&self, i: usize, args: &[Elem]) -> Rule {
        let base = self.zp_base();
        let mut first: Option<Elem> = None;
        let mut constant = true;
        let mut in_block = true;
        for &x in args {
            if x >= base {
                continue;
            }
            match first {
                None => first = Some(x),
                Some(f) if f != x => constant = false,
                _ => {}
            }
            if x as usize / self.n != i {
                in_block = false;
            }
        }
        match first {
            None => Rule::Sum,
            Some(_) if constant => Rule::Constant,
            Some(_) if in_block => {
                let a: Vec<usize> = args
                    .iter()
                    .filter(|&&x| x < base)
                    .map(|&x| x as usize % self.n)
                    .collect();
                Rule::Orbit(self.orbit_position(&a))
            }
            Some(_) => Rule::Else,
        }
    }

    pub fn eval(&self, i: usize, args: &[Elem]) -> Elem {
        let base = self.zp_base();
        match self.rule(i, args) {
            Rule::Sum => {
                let s: usize = args.iter().map(|&x| (x - base) as usize).sum();
                base + (s % self.p) as Elem
            }
            Rule::Constant => *args.iter().find(|&&x| x < base).expect("an N-entry"),
            Rule::Orbit(j) => base + j as Elem,
            Rule::Else => base,
        }
    }

    /// The transversal `T_m`: least element of each `α`-orbit of
    /// non-constant tuples in `N^m`.
    pub fn transversal(&self, m: usize) -> Vec<Vec<usize>> {
        TupleIter::new(self.n, m)
            .map(|t| t.into_iter().map(|x| x as usize).collect::<Vec<usize>>())
            .filter(|t| t.iter().any(|&x| x != t[0]) && self.orbit_position(t) == 0)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct CounterexampleAlgebra {
    spec: CounterexampleSpec,
    rules: Arc<Rules>,
    alg: FiniteAlgebra,
}

impl CounterexampleAlgebra {
    pub fn spec(&self) -> &CounterexampleSpec {
        &self.spec
    }

    pub fn alg(&self) -> &FiniteAlgebra {
        &self.alg
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    /// Whether some `ā ∈ F` hits rule (3) for `f_i`.
    pub fn triggers_orbit_rule(&self, i: usize, a: &[Elem]) -> bool {
        matches!(self.rules.rule(i, a), Rule::Orbit(_))
    }
}

/// The algebra `(A_k; f_0, …, f_k)`; tables are materialized in parallel up to
/// [`LAZY_TABLE_THRESHOLD`] entries per operation.
pub fn build_algebra(spec: &CounterexampleSpec, table_cap: usize) -> Result<CounterexampleAlgebra> {
    let n = spec.degree();
    let size = spec.universe_size();
    let rows = checked_pow(size, n);
    let entries = rows.and_then(|r| r.checked_mul(spec.k + 1));
    let entries = match entries {
        Some(e) if e <= table_cap => e,
        _ => {
            return Err(Error::Budget {
                limit: table_cap,
                generated: entries.unwrap_or(usize::MAX),
                rounds: 0,
            })
        }
    };
    let rows = rows.expect("checked above");
    let rules = Arc::new(Rules::new(spec));
    let lazy = entries / (spec.k + 1) > LAZY_TABLE_THRESHOLD;
    let ops = (0..=spec.k)
        .map(|i| {
            let name = format!("f{i}");
            if lazy {
                let r = Arc::clone(&rules);
                Operation::computed(name, n, move |args: &[Elem]| r.eval(i, args))
            } else {
                let table: Vec<Elem> = (0..rows)
                    .into_par_iter()
                    .map_init(
                        || vec![0 as Elem; n],
                        |buf, mut row| {
                            for x in buf.iter_mut().rev() {
                                *x = (row % size) as Elem;
                                row /= size;
                            }
                            rules.eval(i, buf)
                        },
                    )
                    .collect();
                Operation::from_table(name, n, table)
            }
        })
        .collect();
    let alg = FiniteAlgebra::new(size, ops)?;
    Ok(CounterexampleAlgebra {
        spec: spec.clone(),
        rules,
        alg,
    })
}

/// The relation `Q = R ∪ {q(a)}` over the index set `I = {0..k} × Z_p`,
/// coordinate `(i, j)` at position `i·p + j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QCertificate {
    pub k: usize,
    pub p: usize,
    /// Elements of `R`, encoded in the universe.
    pub r: Vec<Vec<Elem>>,
    /// `q[a]` for each point `a`.
    pub q: Vec<Vec<Elem>>,
}

impl QCertificate {
    pub fn index_len(&self) -> usize {
        (self.k + 1) * self.p
    }

    /// `R` followed by the `q(a)`.
    pub fn relation(&self) -> Vec<Vec<Elem>> {
        self.r.iter().chain(&self.q).cloned().collect()
    }
}

/// Finds `R` by brute force over `Z_p^I` and builds the `q(a)`.
pub fn build_certificate(calg: &CounterexampleAlgebra, index_cap: usize) -> Result<QCertificate> {
    let spec = &calg.spec;
    let (k, p, n) = (spec.k, spec.p, spec.degree());
    let len = (k + 1) * p;
    let space = checked_pow(p, len)
        .filter(|&s| s <= index_cap)
        .ok_or(Error::Budget {
            limit: index_cap,
            generated: 0,
            rounds: 0,
        })?;
    let in_r = |y: &[Elem]| {
        (0..p).all(|j| {
            let col = |j: usize| (0..=k).map(|l| y[l * p + j] as usize).sum::<usize>();
            col((j + 1) % p) % p == (1 + col(j)) % p
        })
    };
    let rules = &calg.rules;
    let r: Vec<Vec<Elem>> = TupleIter::new(p, len)
        .take(space)
        .filter(|y| in_r(y))
        .map(|y| y.into_iter().map(|x| rules.encode_zp(x as usize)).collect())
        .collect();
    let q = (0..n)
        .map(|a| {
            let mut out = Vec::with_capacity(len);
            for i in 0..=k {
                let mut x = a;
                for _ in 0..p {
                    out.push(rules.encode_pair(i, x));
                    x = spec.alpha.apply(x);
                }
            }
            out
        })
        .collect();
    Ok(QCertificate { k, p, r, q })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn block_constant(y: &[Elem], p: usize) -> bool {
    y.chunks(p)
        .all(|block| block.iter().all(|&x| x == block[0]))
}

/// (a) every `f_i` preserves `Q`, by evaluation on all `|Q|ⁿ` argument lists.
fn check_preserves(calg: &CounterexampleAlgebra, cert: &QCertificate) -> CheckResult {
    let q = cert.relation();
    let members: FxHashSet<&[Elem]> = q.iter().map(Vec::as_slice).collect();
    let n = calg.spec.degree();
    let len = cert.index_len();
    let alg = &calg.alg;
    let failure = (0..alg.ops().len()).find_map(|op| {
        (0..q.len()).into_par_iter().find_map_any(|first| {
            let mut args = vec![0 as Elem; n];
            let mut out = vec![0 as Elem; len];
            for rest in TupleIter::new(q.len(), n - 1) {
                let cols: Vec<&Vec<Elem>> = std::iter::once(first)
                    .chain(rest.iter().map(|&c| c as usize))
                    .map(|c| &q[c])
                    .collect();
                for (r, o) in out.iter_mut().enumerate() {
                    for (a, col) in args.iter_mut().zip(&cols) {
                        *a = col[r];
                    }
                    *o = alg.apply(op, &args);
                }
                if !members.contains(out.as_slice()) {
                    return Some(format!("f{op} maps Q-tuples outside Q: {out:?}"));
                }
            }
            None
        })
    });
    CheckResult {
        name: "preserves-q".into(),
        passed: failure.is_none(),
        detail: failure.unwrap_or_else(|| {
            format!(
                "{} operations on all {}^{n} argument lists",
                alg.ops().len(),
                q.len()
            )
        }),
    }
}

/// Runs the four certificate checks.
pub fn verify_certificate(calg: &CounterexampleAlgebra, cert: &QCertificate) -> CertificateReport {
    let spec = &calg.spec;
    let p = spec.p;
    let mut checks = vec![check_preserves(calg, cert)];

    let constant_r = cert.r.iter().find(|y| block_constant(y, p));
    checks.push(CheckResult {
        name: "r-not-block-constant".into(),
        passed: !cert.r.is_empty() && constant_r.is_none(),
        detail: match constant_r {
            _ if cert.r.is_empty() => "R is empty".into(),
            Some(y) => format!("{y:?} is block-constant"),
            None => format!("|R| = {}, none block-constant", cert.r.len()),
        },
    });

    let constant_q: Vec<usize> = (0..spec.degree())
        .filter(|&a| block_constant(&cert.q[a], p))
        .collect();
    checks.push(CheckResult {
        name: "q-constant-only-at-fixpoint".into(),
        passed: constant_q == [spec.fixpoint],
        detail: format!(
            "block-constant q(a) for a in {:?}; fixpoint {}",
            constant_q.iter().map(|a| a + 1).collect::<Vec<_>>(),
            spec.fixpoint + 1
        ),
    });

    let moved = spec.group.elements().ok().and_then(|elements| {
        elements.iter().find_map(|pi| {
            let image = pi.apply(spec.fixpoint);
            if image == spec.fixpoint {
                return None;
            }
            let conj = pi
                .compose_unchecked(&spec.alpha)
                .compose_unchecked(&pi.inverse());
            match alpha_shape(&conj) {
                Ok((f, l))
                    if f == image && l == p && spec.group.contains(&conj).unwrap_or(false) =>
                {
                    Some(format!(
                        "{pi} moves {} to {}; {conj} fixes {}",
                        spec.fixpoint + 1,
                        image + 1,
                        image + 1
                    ))
                }
                _ => None,
            }
        })
    });
    checks.push(CheckResult {
        name: "conjugate-moves-fixpoint".into(),
        passed: moved.is_some(),
        detail: moved
            .unwrap_or_else(|| "no element moves the fixpoint with a valid conjugate".into()),
    });

    CertificateReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

/// An `f_i` that no tuple of `F` sends through rule (3), checked to be
/// invariant under all `n!` argument permutations on `F`. Returns `i`.
pub fn verify_local_symmetric(calg: &CounterexampleAlgebra, tuples: &[Vec<Elem>]) -> Result<usize> {
    let spec = &calg.spec;
    let n = spec.degree();
    if tuples.len() > spec.k {
        return Err(Error::Invalid(format!(
            "|F| = {} exceeds k = {}",
            tuples.len(),
            spec.k
        )));
    }
    for t in tuples {
        if t.len() != n || t.iter().any(|&x| x as usize >= calg.alg.size()) {
            return Err(Error::Invalid(format!("{t:?} is not in A^{n}")));
        }
    }
    let i = (0..=spec.k)
        .find(|&i| tuples.iter().all(|t| !calg.triggers_orbit_rule(i, t)))
        .ok_or_else(|| Error::Verification("every operation is hit by rule (3)".into()))?;
    let sym = PermGroup::symmetric(n).with_cap(usize::MAX);
    let mut acted = vec![0; n];
    for t in tuples {
        let v = calg.alg.apply(i, t);
        for pi in sym.elements()? {
            for (j, x) in acted.iter_mut().enumerate() {
                *x = t[pi.apply(j)];
            }
            if calg.alg.apply(i, &acted) != v {
                return Err(Error::Verification(format!(
                    "f{i} is not symmetric at {t:?}"
                )));
            }
        }
    }
    Ok(i)
}

/// A random tuple that sends `f_i` through rule (3).
pub fn random_orbit_tuple(calg: &CounterexampleAlgebra, i: usize, rng: &mut impl Rng) -> Vec<Elem> {
    let spec = &calg.spec;
    let n = spec.degree();
    let rules = &calg.rules;
    loop {
        let m = rng.gen_range(2..=n);
        let mut positions: Vec<usize> = (0..n).collect();
        positions.shuffle(rng);
        let mut t: Vec<Elem> = (0..n)
            .map(|_| rules.encode_zp(rng.gen_range(0..spec.p)))
            .collect();
        let points: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
        if points.iter().all(|&a| a == points[0]) {
            continue;
        }
        for (&pos, &a) in positions.iter().zip(&points) {
            t[pos] = rules.encode_pair(i, a);
        }
        return t;
    }
}

/// `count` random `k`-element tuple sets; about half of the tuples trigger
/// rule (3) for some operation.
pub fn sample_tuple_sets(
    calg: &CounterexampleAlgebra,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<Vec<Vec<Elem>>> {
    let spec = &calg.spec;
    let size = calg.alg.size();
    (0..count)
        .map(|_| {
            (0..spec.k)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        random_orbit_tuple(calg, rng.gen_range(0..=spec.k), rng)
                    } else {
                        (0..spec.degree())
                            .map(|_| rng.gen_range(0..size) as Elem)
                            .collect()
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub attempted: bool,
    /// `Some(true)` when an independent complete method found no `G`-term.
    pub no_global_term: Option<bool>,
    pub trivial_group_satisfied: bool,
    pub alpha_group_satisfied: bool,
    pub note: String,
}

/// Independent confirmation by `exhaustive-local` where the budget allows,
/// plus sanity decisions for the trivial group and `⟨α⟩`. Unlimited work in
/// `budget` is replaced by [`DEFAULT_CROSS_CHECK_CELLS`]` / |A|ⁿ`.
pub fn cross_check_small(
    calg: &CounterexampleAlgebra,
    budget: Budget,
    max_dimension: usize,
) -> Result<CrossCheck> {
    let spec = &calg.spec;
    let n = spec.degree();
    let dim = checked_pow(calg.alg.size(), n).unwrap_or(usize::MAX);
    let work_budget = match budget.combinations {
        u64::MAX => (DEFAULT_CROSS_CHECK_CELLS / dim as u64).max(1),
        w => w,
    };
    let opts = DecideOptions {
        tuple_budget: budget.tuples,
        work_budget,
        want_witness: false,
        ..DecideOptions::default()
    };
    let trivial = GTermInstance::new(calg.alg.clone(), PermGroup::trivial(n))?;
    let trivial_group_satisfied = decide::decide(&trivial, MethodChoice::Auto, &opts)?.satisfied;
    let cyclic = GTermInstance::new(
        calg.alg.clone(),
        PermGroup::generate(vec![spec.alpha.clone()])?,
    )?;
    let alpha_group_satisfied = decide::decide(&cyclic, MethodChoice::Auto, &opts)?.satisfied;

    let (attempted, no_global_term, note) = if dim > max_dimension {
        (
            false,
            None,
            format!("|A|^n = {dim} exceeds {max_dimension}; certificate-only verification"),
        )
    } else {
        let inst = GTermInstance::new(calg.alg.clone(), spec.group.clone())?;
        match decide::decide(&inst, MethodChoice::ExhaustiveLocal, &opts) {
            Ok(r) => (
                true,
                Some(!r.satisfied),
                format!("exhaustive-local over {dim} tuples"),
            ),
            Err(e @ (Error::Budget { .. } | Error::WorkBudget { .. })) => {
                (true, None, format!("exhaustive-local stopped: {e}"))
            }
            Err(e) => return Err(e),
        }
    };
    Ok(CrossCheck {
        attempted,
        no_global_term,
        trivial_group_satisfied,
        alpha_group_satisfied,
        note,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub degree: usize,
    pub generators: Vec<String>,
    pub alpha: String,
    pub alpha_effective: String,
    pub fixpoint: usize,
    pub orbit_length: usize,
    pub p: usize,
    pub k: usize,
    pub universe_size: usize,
    pub encoding: Encoding,
    /// `T_m` for `m = 2..n` with 1-based points, when small enough to list.
    pub transversal: Option<BTreeMap<usize, Vec<Vec<usize>>>>,
    pub certificate: QCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Encoding {
    pub pair: String,
    pub zp_offset: usize,
}

/// Sidecar description from which a third party can rebuild and re-verify.
pub fn metadata(calg: &CounterexampleAlgebra, cert: &QCertificate) -> Metadata {
    let spec = &calg.spec;
    let n = spec.degree();
    let listable = (2..=n).try_fold(0usize, |acc, m| {
        checked_pow(n, m).and_then(|c| acc.checked_add(c))
    });
    let transversal = listable.filter(|&c| c <= 100_000).map(|_| {
        (2..=n)
            .map(|m| {
                let t = calg.rules.transversal(m);
                (
                    m,
                    t.into_iter()
                        .map(|v| v.into_iter().map(|a| a + 1).collect())
                        .collect(),
                )
            })
            .collect()
    });
    Metadata {
        degree: n,
        generators: spec
            .group
            .canonical_generators()
            .iter()
            .map(ToString::to_string)
            .collect(),
        alpha: spec.alpha_given.to_string(),
        alpha_effective: spec.alpha.to_string(),
        fixpoint: spec.fixpoint + 1,
        orbit_length: spec.orbit_length,
        p: spec.p,
        k: spec.k,
        universe_size: spec.universe_size(),
        encoding: Encoding {
            pair: "(i, a) -> i*n + (a-1) for a in 1..n".into(),
            zp_offset: (spec.k + 1) * n,
        },
        transversal,
        certificate: cert.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyc(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    fn sym3(k: usize) -> CounterexampleAlgebra {
        let spec = build_spec(&PermGroup::symmetric(3), &cyc("(2 3)", 3), k).unwrap();
        build_algebra(&spec, DEFAULT_TABLE_CAP).unwrap()
    }

    #[test]
    fn spec_examples() {
        let s = build_spec(&PermGroup::symmetric(3), &cyc("(2 3)", 3), 1).unwrap();
        assert_eq!((s.p(), s.fixpoint()), (2, 0));
        let d5 = PermGroup::generate(vec![cyc("(1 2 3 4 5)", 5), cyc("(2 5)(3 4)", 5)]).unwrap();
        assert_eq!(build_spec(&d5, &cyc("(2 5)(3 4)", 5), 0).unwrap().p(), 2);
        let s2 = PermGroup::symmetric(2);
        for a in s2.elements().unwrap() {
            assert!(matches!(build_spec(&s2, a, 1), Err(Error::Hypothesis(_))));
        }
        let s4 = PermGroup::symmetric(4);
        let s = build_spec(&s4, &cyc("(2 3 4)", 4), 0).unwrap();
        assert_eq!(s.p(), 3);
        let s5 = PermGroup::symmetric(5);
        let s = build_spec(&s5, &cyc("(2 3 4 5)", 5), 0).unwrap();
        assert_eq!((s.orbit_length(), s.p()), (4, 2));
        assert_eq!(s.alpha(), &cyc("(2 4)(3 5)", 5));
        assert!(build_spec(&s4, &cyc("(1 2)", 4), 0).is_err());
        assert!(build_spec(&PermGroup::cyclic(3), &cyc("(2 3)", 3), 0).is_err());
    }

    #[test]
    fn algebra_examples() {
        let c = sym3(1);
        assert_eq!(c.alg().size(), 8);
        assert!(c.alg().is_idempotent());
        let r = c.rules();
        // f0((0,2),(0,3),(0,2)) with 1-based points
        let args = [
            r.encode_pair(0, 1),
            r.encode_pair(0, 2),
            r.encode_pair(0, 1),
        ];
        assert_eq!(c.alg().apply(0, &args), r.encode_zp(0));
        let args = [
            r.encode_pair(0, 2),
            r.encode_pair(0, 1),
            r.encode_pair(0, 2),
        ];
        assert_eq!(c.alg().apply(0, &args), r.encode_zp(1));
        // rule (2) wins over rule (3) on constant N-parts
        let args = [r.encode_pair(0, 1), r.encode_zp(1), r.encode_pair(0, 1)];
        assert_eq!(c.alg().apply(0, &args), r.encode_pair(0, 1));
        assert_eq!(
            c.alg()
                .apply(1, &[r.encode_zp(1), r.encode_zp(1), r.encode_zp(0)]),
            r.encode_zp(0)
        );
    }

    #[test]
    fn transversal_is_sound() {
        let c = sym3(0);
        let r = c.rules();
        for m in 1..=3 {
            let t = r.transversal(m);
            let mut seen = FxHashSet::default();
            for rep in &t {
                let mut x = rep.clone();
                for _ in 0..r.p {
                    assert!(seen.insert(x.clone()), "{x:?} reached twice");
                    x = x.iter().map(|&a| r.alpha[a]).collect();
                }
            }
            let non_constant = TupleIter::new(3, m)
                .filter(|v| v.iter().any(|&x| x != v[0]))
                .count();
            assert_eq!(seen.len(), non_constant);
        }
    }

    #[test]
    fn certificate_examples() {
        let c = sym3(0);
        let cert = build_certificate(&c, DEFAULT_INDEX_CAP).unwrap();
        let z = |j| c.rules().encode_zp(j);
        assert_eq!(cert.r, vec![vec![z(0), z(1)], vec![z(1), z(0)]]);
        let report = verify_certificate(&c, &cert);
        assert!(report.passed, "{report:?}");
        assert_eq!(report.checks.len(), 4);
        // q(α(a)) is q(a) shifted within each block
        let c = sym3(2);
        let cert = build_certificate(&c, DEFAULT_INDEX_CAP).unwrap();
        let alpha = c.spec().alpha();
        for a in 0..3 {
            let shifted = &cert.q[alpha.apply(a)];
            for i in 0..3 {
                for j in 0..2 {
                    assert_eq!(shifted[i * 2 + j], cert.q[a][i * 2 + (j + 1) % 2]);
                }
            }
        }
        assert!(verify_certificate(&c, &cert).passed);
    }

    #[test]
    fn corrupted_table_fails_preservation() {
        let c = sym3(0);
        let cert = build_certificate(&c, DEFAULT_INDEX_CAP).unwrap();
        let r = c.rules();
        let row = c.alg().row_index(&[
            r.encode_pair(0, 1),
            r.encode_pair(0, 2),
            r.encode_pair(0, 1),
        ]);
        let mut table = c.alg().op(0).table().unwrap().to_vec();
        table[row] = r.encode_zp(1);
        let broken = CounterexampleAlgebra {
            alg: FiniteAlgebra::new(c.alg().size(), vec![Operation::from_table("f0", 3, table)])
                .unwrap(),
            ..c
        };
        let report = verify_certificate(&broken, &cert);
        assert!(!report.checks[0].passed);
    }

    #[test]
    fn local_symmetric_examples() {
        let c = sym3(2);
        let r = c.rules();
        let hit0 = vec![r.encode_pair(0, 1), r.encode_pair(0, 2), r.encode_zp(0)];
        let hit1 = vec![r.encode_pair(1, 0), r.encode_zp(1), r.encode_pair(1, 2)];
        assert!(c.triggers_orbit_rule(0, &hit0) && c.triggers_orbit_rule(1, &hit1));
        assert_eq!(verify_local_symmetric(&c, &[hit0, hit1]).unwrap(), 2);
        let constants = vec![vec![r.encode_pair(2, 2); 3]];
        assert_eq!(verify_local_symmetric(&c, &constants).unwrap(), 0);
        let c1 = sym3(1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in sample_tuple_sets(&c1, 200, &mut rng) {
            verify_local_symmetric(&c1, &f).unwrap();
        }
        let t = random_orbit_tuple(&c1, 1, &mut rng);
        assert!(c1.triggers_orbit_rule(1, &t));
    }

    #[test]
    fn lazy_and_table_agree() {
        let c = sym3(0);
        let rules = c.rules().clone();
        let lazy = FiniteAlgebra::new(
            c.alg().size(),
            vec![Operation::computed("f0", 3, move |a: &[Elem]| {
                rules.eval(0, a)
            })],
        )
        .unwrap();
        assert_eq!(&lazy, c.alg());
    }
}
