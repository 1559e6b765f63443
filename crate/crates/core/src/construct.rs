//! Term constructions: the inductive witness for regular groups and the
//! combinators that move terms between groups.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::algebra::{CircuitBuilder, Elem, FiniteAlgebra, TermCircuit, TupleIter};
use crate::decide::{check_local, GTermInstance, Tally};
use crate::error::{Error, Result};
use crate::perm::{prime_factors, wreath_product, PermGroup, Permutation};

/// Where a witness must be invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    /// All of `Aⁿ`.
    Global,
    Tuples(Vec<Vec<Elem>>),
}

impl Scope {
    fn tuples(&self, size: usize, n: usize) -> Vec<Vec<Elem>> {
        match self {
            Scope::Global => TupleIter::new(size, n).collect(),
            Scope::Tuples(t) => t.clone(),
        }
    }
}

/// Checks `c(ā^π) = c(ā)` for every `ā` in `scope` and `π` in `group`.
/// The global scope is closed under the group, so generators suffice there.
pub fn verify_invariance(
    alg: &FiniteAlgebra,
    group: &PermGroup,
    circuit: &TermCircuit,
    scope: &Scope,
) -> Result<()> {
    let n = group.degree();
    if circuit.inputs() != n {
        return Err(Error::Verification(format!(
            "circuit has {} inputs, group degree is {n}",
            circuit.inputs()
        )));
    }
    let perms: &[Permutation] = match scope {
        Scope::Global => group.generators(),
        Scope::Tuples(_) => group.elements()?,
    };
    let bound = circuit.bind(alg)?;
    let mut scratch = Vec::new();
    let mut acted = vec![0; n];
    for a in scope.tuples(alg.size(), n) {
        if a.len() != n || a.iter().any(|&x| x as usize >= alg.size()) {
            return Err(Error::Invalid(format!("scope tuple {a:?} is not in A^{n}")));
        }
        let v = bound.eval_with(&a, &mut scratch);
        for pi in perms {
            for (i, x) in acted.iter_mut().enumerate() {
                *x = a[pi.apply(i)];
            }
            if bound.eval_with(&acted, &mut scratch) != v {
                return Err(Error::Verification(format!(
                    "value changes under {pi} at {a:?}"
                )));
            }
        }
    }
    Ok(())
}

/// A `G`-term on `scope` for regular `G`, built one tuple at a time: when
/// `t` is not yet invariant on `b̄`, it is replaced by
/// `s((t^{π_p}(x̄))_p)` where `s` is invariant on the single tuple
/// `(t^{π_p}(b̄))_p` and `π_p` is the element sending point 0 to `p`.
pub fn witness_regular(inst: &GTermInstance, scope: &Scope, budget: usize) -> Result<TermCircuit> {
    witness_regular_tallied(inst, scope, budget, &Tally::default())
}

pub(crate) fn witness_regular_tallied(
    inst: &GTermInstance,
    scope: &Scope,
    budget: usize,
    tally: &Tally,
) -> Result<TermCircuit> {
    let group = inst.group();
    if !group.is_regular()? {
        return Err(Error::NotRegular);
    }
    let alg = inst.alg();
    let n = inst.arity();
    let mut by_point: Vec<Option<&Permutation>> = vec![None; n];
    for e in group.elements()? {
        by_point[e.apply(0)] = Some(e);
    }
    let by_point: Vec<&Permutation> = by_point.into_iter().map(|e| e.expect("regular")).collect();
    let tuples = scope.tuples(alg.size(), n);

    let mut cache: FxHashMap<Vec<Elem>, TermCircuit> = FxHashMap::default();
    let mut singleton = |d: &[Elem]| -> Result<TermCircuit> {
        if let Some(c) = cache.get(d) {
            return Ok(c.clone());
        }
        let out = check_local(inst, &[d.to_vec()], true, budget)?;
        tally.add(&out.stats);
        let c = out
            .witness
            .ok_or_else(|| {
                Error::Hypothesis(format!("no term is invariant on the single tuple {d:?}"))
            })?
            .circuit;
        cache.insert(d.to_vec(), c.clone());
        Ok(c)
    };

    let mut b = CircuitBuilder::new(n);
    let vars: Vec<usize> = (0..n).map(|i| b.var(i)).collect();
    let mut max_s = 1usize;
    // fam[p] is the node of t^{π_p}
    let mut fam: Vec<usize> = match tuples.first() {
        None => vec![vars[0]; n],
        Some(first) => {
            let s = singleton(first)?;
            max_s = s.len();
            by_point
                .iter()
                .map(|pi| {
                    let inputs: Vec<usize> = (0..n).map(|i| vars[pi.apply(i)]).collect();
                    b.embed(&s, &inputs)
                })
                .collect()
        }
    };
    let mut steps = 0usize;
    for t in tuples.iter().skip(1) {
        let values = b.eval_nodes(alg, t)?;
        let d: Vec<Elem> = fam.iter().map(|&node| values[node]).collect();
        if d.iter().all(|&x| x == d[0]) {
            continue;
        }
        let s = singleton(&d)?;
        max_s = max_s.max(s.len());
        steps += 1;
        fam = by_point
            .iter()
            .map(|pi| {
                let inputs: Vec<usize> = (0..n).map(|p| fam[pi.apply(p)]).collect();
                b.embed(&s, &inputs)
            })
            .collect();
    }
    let circuit = b.finish(fam[0]);
    let bound = n + (steps + 1) * n * max_s;
    assert!(
        circuit.len() <= bound,
        "witness has {} nodes, more than {bound}",
        circuit.len()
    );
    verify_invariance(alg, group, &circuit, scope)?;
    Ok(circuit)
}

/// The witness from a local check on all of `Aⁿ`; complete for any group.
pub fn witness_exhaustive(inst: &GTermInstance, budget: usize) -> Result<TermCircuit> {
    let all: Vec<Vec<Elem>> = TupleIter::new(inst.alg().size(), inst.arity()).collect();
    let out = check_local(inst, &all, true, budget)?;
    let circuit = out.witness.ok_or(Error::NoWitness)?.circuit;
    verify_invariance(inst.alg(), inst.group(), &circuit, &Scope::Global)?;
    Ok(circuit)
}

/// `t_H(t_G(x_{·,0}), …, t_G(x_{·,m−1}))`, with variable `(a, b)` at
/// position `a + b·|X|` as in [`wreath_product`].
pub fn wreath_compose(tg: &TermCircuit, th: &TermCircuit) -> TermCircuit {
    let dx = tg.inputs();
    let dy = th.inputs();
    let mut b = CircuitBuilder::new(dx * dy);
    let fibres: Vec<usize> = (0..dy)
        .map(|fibre| {
            let inputs: Vec<usize> = (0..dx).map(|a| b.var(a + fibre * dx)).collect();
            b.embed(tg, &inputs)
        })
        .collect();
    let out = b.embed(th, &fibres);
    b.finish(out)
}

/// [`wreath_compose`] followed by verification against `G ≀ H` on `scope`.
pub fn wreath_compose_checked(
    alg: &FiniteAlgebra,
    tg: &TermCircuit,
    g: &PermGroup,
    th: &TermCircuit,
    h: &PermGroup,
    scope: &Scope,
) -> Result<TermCircuit> {
    let out = wreath_compose(tg, th);
    verify_invariance(alg, &wreath_product(g, h), &out, scope)?;
    Ok(out)
}

/// The minor `t^α` of a `G`-term, which is an `H`-term when
/// `h(π)∘α = α∘π` for all `π ∈ G` and `h` is onto `H`.
pub fn quotient_term(
    t: &TermCircuit,
    alpha: &[usize],
    g: &PermGroup,
    h_group: &PermGroup,
    h: impl Fn(&Permutation) -> Result<Permutation>,
) -> Result<TermCircuit> {
    let m = h_group.degree();
    if alpha.len() != g.degree() || t.inputs() != g.degree() {
        return Err(Error::DegreeMismatch(alpha.len(), g.degree()));
    }
    let mut image = BTreeSet::new();
    for pi in g.elements()? {
        let hp = h(pi)?;
        if hp.degree() != m {
            return Err(Error::DegreeMismatch(hp.degree(), m));
        }
        if let Some(i) = (0..alpha.len()).find(|&i| hp.apply(alpha[i]) != alpha[pi.apply(i)]) {
            return Err(Error::Intertwining {
                element: pi.to_string(),
                point: i + 1,
            });
        }
        if !h_group.contains(&hp)? {
            return Err(Error::Invalid(format!(
                "h({pi}) = {hp} is not in the target group"
            )));
        }
        image.insert(hp);
    }
    if image.len() != h_group.order()? {
        return Err(Error::Invalid("h is not onto the target group".into()));
    }
    t.minor(alpha, m)
}

/// A `G`-term plus `extra` dummy variables, which is a `(G × H)`-term for any
/// `H` on the new points.
pub fn pad_term(t: &TermCircuit, extra: usize) -> Result<TermCircuit> {
    let map: Vec<usize> = (0..t.inputs()).collect();
    t.minor(&map, t.inputs() + extra)
}

/// `c₂(c₂ₙ(x̄), c₂ₙ(x̄ reversed))` with `c₂(x, y) = c₂ₙ(x,…,x,y,…,y)`,
/// verified against the dihedral group on `scope`.
pub fn dihedral_term(alg: &FiniteAlgebra, c2n: &TermCircuit, scope: &Scope) -> Result<TermCircuit> {
    let len = c2n.inputs();
    if len == 0 || !len.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "expected an even arity, found {len}"
        )));
    }
    let half = len / 2;
    let c2 = c2n.minor(
        &(0..len).map(|i| usize::from(i >= half)).collect::<Vec<_>>(),
        2,
    )?;
    let reversed = c2n.minor(&(0..len).map(|i| len - 1 - i).collect::<Vec<_>>(), len)?;
    let out = TermCircuit::compose(&c2, &[c2n.clone(), reversed])?;
    verify_invariance(alg, &PermGroup::dihedral(len), &out, scope)?;
    Ok(out)
}

/// `f_K(f_N((x_{νκ₁})_{ν∈N}), …, f_N((x_{νκ_q})_{ν∈N}))` for regular `G`
/// with every element uniquely `ν∘κ`. Variable `x_π` is the point `π(0)`;
/// `f_N` reads `N`'s elements in sorted order and `f_K` follows `k_list`.
pub fn product_regular_term(
    alg: &FiniteAlgebra,
    f_n: &TermCircuit,
    f_k: &TermCircuit,
    g: &PermGroup,
    n_sub: &PermGroup,
    k_list: &[Permutation],
    scope: &Scope,
) -> Result<TermCircuit> {
    if !g.is_regular()? {
        return Err(Error::NotRegular);
    }
    let degree = g.degree();
    let n_elems = n_sub.elements()?;
    if n_sub.degree() != degree || f_n.inputs() != n_elems.len() || f_k.inputs() != k_list.len() {
        return Err(Error::Factorization(
            "arities do not match |N| and |K|".into(),
        ));
    }
    let mut seen = BTreeSet::new();
    for nu in n_elems {
        for kappa in k_list {
            let p = nu.compose(kappa)?;
            if !g.contains(&p)? {
                return Err(Error::Factorization(format!("{nu}∘{kappa} is not in G")));
            }
            if !seen.insert(p.clone()) {
                return Err(Error::Factorization(format!("{p} has two factorizations")));
            }
        }
    }
    if seen.len() != g.order()? {
        return Err(Error::Factorization(format!(
            "{} of {} elements factor",
            seen.len(),
            g.order()?
        )));
    }
    let mut b = CircuitBuilder::new(degree);
    let inner: Vec<usize> = k_list
        .iter()
        .map(|kappa| {
            let inputs: Vec<usize> = n_elems
                .iter()
                .map(|nu| b.var(nu.apply(kappa.apply(0))))
                .collect();
            b.embed(f_n, &inputs)
        })
        .collect();
    let out = b.embed(f_k, &inner);
    let circuit = b.finish(out);
    verify_invariance(alg, g, &circuit, scope)?;
    Ok(circuit)
}

/// The prime divisors of `|G|` for regular nilpotent `G`. Nilpotence is
/// tested by checking that, for every prime `p`, the elements of `p`-power
/// order form a subgroup, and that these subgroups' orders multiply to `|G|`.
pub fn reduce_nilpotent(group: &PermGroup) -> Result<Vec<usize>> {
    if !group.is_regular()? {
        return Err(Error::NotRegular);
    }
    let elements = group.elements()?;
    let primes = prime_factors(elements.len());
    let mut product = 1usize;
    for &p in &primes {
        let sylow: BTreeSet<&Permutation> = elements
            .iter()
            .filter(|e| prime_factors(e.order()).iter().all(|&q| q == p))
            .collect();
        for a in &sylow {
            for b in &sylow {
                if !sylow.contains(&a.compose_unchecked(b)) {
                    return Err(Error::NotNilpotent);
                }
            }
        }
        product *= sylow.len();
    }
    if product != elements.len() {
        return Err(Error::NotNilpotent);
    }
    Ok(primes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;
    use crate::perm::regular_group;

    fn inst(alg: FiniteAlgebra, g: PermGroup) -> GTermInstance {
        GTermInstance::new(alg, g).unwrap()
    }

    fn meet_chain(n: usize) -> TermCircuit {
        let mut b = CircuitBuilder::new(n);
        let mut acc = b.var(0);
        for i in 1..n {
            let v = b.var(i);
            acc = b.gate("meet", vec![acc, v]);
        }
        b.finish(acc)
    }

    #[test]
    fn regular_witness_examples() {
        let i = inst(semilattice(), PermGroup::cyclic(2));
        let one = witness_regular(&i, &Scope::Tuples(vec![vec![0, 1]]), 1000).unwrap();
        let direct = check_local(&i, &[vec![0, 1]], true, 1000)
            .unwrap()
            .witness
            .unwrap()
            .circuit;
        assert_eq!(one, direct);
        let global = witness_regular(&i, &Scope::Global, 1000).unwrap();
        for t in TupleIter::new(2, 2) {
            assert_eq!(global.evaluate(&semilattice(), &t).unwrap(), t[0] & t[1]);
        }
        let z3 = inst(minority(), PermGroup::cyclic(3));
        let c = witness_regular(&z3, &Scope::Global, 1000).unwrap();
        verify_invariance(&minority(), &PermGroup::cyclic(3), &c, &Scope::Global).unwrap();
        let z2 = inst(minority(), PermGroup::cyclic(2));
        assert!(matches!(
            witness_regular(&z2, &Scope::Global, 1000),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn exhaustive_examples() {
        let c = witness_exhaustive(&inst(semilattice(), PermGroup::symmetric(2)), 1000).unwrap();
        for t in TupleIter::new(2, 2) {
            assert_eq!(c.evaluate(&semilattice(), &t).unwrap(), t[0] & t[1]);
        }
        let c = witness_exhaustive(&inst(minority(), PermGroup::cyclic(3)), 1000).unwrap();
        for t in TupleIter::new(2, 3) {
            assert_eq!(
                c.evaluate(&minority(), &t).unwrap(),
                (t[0] + t[1] + t[2]) % 2
            );
        }
        assert_eq!(
            witness_exhaustive(&inst(projection(), PermGroup::cyclic(2)), 1000).unwrap_err(),
            Error::NoWitness
        );
    }

    #[test]
    fn wreath_examples() {
        let alg = semilattice();
        let z2 = PermGroup::cyclic(2);
        let m = meet_chain(2);
        let w = wreath_compose_checked(&alg, &m, &z2, &m, &z2, &Scope::Global).unwrap();
        assert_eq!(w.inputs(), 4);
        let id = TermCircuit::projection(1, 0).unwrap();
        let w = wreath_compose(&id, &m);
        for t in TupleIter::new(2, 2) {
            assert_eq!(w.evaluate(&alg, &t).unwrap(), m.evaluate(&alg, &t).unwrap());
        }
        let mt = TermCircuit::basic_op("m", 3);
        let z3 = PermGroup::cyclic(3);
        let w = wreath_compose(&mt, &mt);
        let g_term = w
            .minor(&(0..9).map(|i| i % 3).collect::<Vec<_>>(), 3)
            .unwrap();
        let h_term = w
            .minor(&(0..9).map(|i| i / 3).collect::<Vec<_>>(), 3)
            .unwrap();
        verify_invariance(&minority(), &z3, &g_term, &Scope::Global).unwrap();
        verify_invariance(&minority(), &z3, &h_term, &Scope::Global).unwrap();
    }

    #[test]
    fn quotient_examples() {
        let alg = semilattice();
        let z6 = PermGroup::cyclic(6);
        let z3 = PermGroup::cyclic(3);
        let t = meet_chain(6);
        let same =
            quotient_term(&t, &(0..6).collect::<Vec<_>>(), &z6, &z6, |p| Ok(p.clone())).unwrap();
        assert_eq!(same, t);
        let shift3 = Permutation::cyclic_shift(3);
        let shift6 = Permutation::cyclic_shift(6);
        let h = |p: &Permutation| {
            let j = (0..6).find(|&j| shift6.pow(j) == *p).unwrap();
            Ok(shift3.pow(j % 3))
        };
        let alpha: Vec<usize> = (0..6).map(|i| i % 3).collect();
        let q = quotient_term(&t, &alpha, &z6, &z3, h).unwrap();
        verify_invariance(&alg, &z3, &q, &Scope::Global).unwrap();
        let bad = quotient_term(&t, &alpha, &z6, &z3, |_| Ok(shift3.clone()));
        assert!(matches!(bad, Err(Error::Intertwining { .. })));
        let padded = pad_term(&meet_chain(2), 1).unwrap();
        let g = crate::perm::direct_product(&PermGroup::cyclic(2), &PermGroup::trivial(1));
        verify_invariance(&alg, &g, &padded, &Scope::Global).unwrap();
    }

    #[test]
    fn dihedral_examples() {
        let alg = semilattice();
        let out = dihedral_term(&alg, &meet_chain(4), &Scope::Global).unwrap();
        verify_invariance(&alg, &PermGroup::cyclic(4), &out, &Scope::Global).unwrap();
        let out = dihedral_term(&alg, &meet_chain(2), &Scope::Global).unwrap();
        verify_invariance(&alg, &PermGroup::cyclic(2), &out, &Scope::Global).unwrap();
        let not_cyclic = TermCircuit::projection(4, 0).unwrap();
        assert!(matches!(
            dihedral_term(&alg, &not_cyclic, &Scope::Global),
            Err(Error::Verification(_))
        ));
    }

    #[test]
    fn product_regular_examples() {
        let alg = semilattice();
        let z6 = PermGroup::cyclic(6);
        let shift = Permutation::cyclic_shift(6);
        let n_sub = PermGroup::generate(vec![shift.pow(3)]).unwrap();
        let k_list = vec![shift.pow(0), shift.pow(2), shift.pow(4)];
        let out = product_regular_term(
            &alg,
            &meet_chain(2),
            &meet_chain(3),
            &z6,
            &n_sub,
            &k_list,
            &Scope::Global,
        )
        .unwrap();
        assert_eq!(out.inputs(), 6);
        let trivial = PermGroup::trivial(6);
        let all: Vec<Permutation> = (0..6).map(|j| shift.pow(j)).collect();
        let c6 = meet_chain(6);
        let out = product_regular_term(
            &alg,
            &TermCircuit::projection(1, 0).unwrap(),
            &c6,
            &z6,
            &trivial,
            &all,
            &Scope::Global,
        )
        .unwrap();
        for t in TupleIter::new(2, 6) {
            assert_eq!(
                out.evaluate(&alg, &t).unwrap(),
                c6.evaluate(&alg, &t).unwrap()
            );
        }
        let out = product_regular_term(
            &alg,
            &c6,
            &TermCircuit::projection(1, 0).unwrap(),
            &z6,
            &z6,
            &[shift.pow(0)],
            &Scope::Global,
        )
        .unwrap();
        assert_eq!(out.len(), c6.len());
        let bad = product_regular_term(
            &alg,
            &meet_chain(2),
            &meet_chain(3),
            &z6,
            &n_sub,
            &[shift.pow(0), shift.pow(3), shift.pow(2)],
            &Scope::Global,
        );
        assert!(matches!(bad, Err(Error::Factorization(_))));
    }

    #[test]
    fn nilpotent_examples() {
        assert_eq!(
            reduce_nilpotent(&PermGroup::cyclic(12)).unwrap(),
            vec![2, 3]
        );
        assert_eq!(reduce_nilpotent(&PermGroup::cyclic(5)).unwrap(), vec![5]);
        let s3 = regular_group(&PermGroup::symmetric(3)).unwrap();
        assert_eq!(reduce_nilpotent(&s3).unwrap_err(), Error::NotNilpotent);
        assert_eq!(
            reduce_nilpotent(&PermGroup::symmetric(3)).unwrap_err(),
            Error::NotRegular
        );
    }
}
