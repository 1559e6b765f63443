use gterm_core::algebra::{Elem, FiniteAlgebra, Operation, TermCircuit};
use gterm_core::construct::{self, Scope};
use gterm_core::decide::{self, DecideOptions, GTermInstance};
use gterm_core::perm::{PermGroup, Permutation};
use gterm_core::Error;
use proptest::prelude::*;
use proptest::sample::subsequence;

fn opts() -> DecideOptions {
    DecideOptions {
        want_witness: false,
        ..DecideOptions::default()
    }
}

fn group_of(gens: Vec<Permutation>, n: usize) -> PermGroup {
    let gens: Vec<Permutation> = gens.into_iter().filter(|g| !g.is_identity()).collect();
    if gens.is_empty() {
        PermGroup::trivial(n)
    } else {
        PermGroup::generate(gens).unwrap()
    }
}

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn binary_algebra(size: usize) -> impl Strategy<Value = FiniteAlgebra> {
    prop::collection::vec(0..size as Elem, size * size).prop_map(move |t| {
        FiniteAlgebra::new(size, vec![Operation::from_table("f", 2, t)]).unwrap()
    })
}

fn satisfied(alg: &FiniteAlgebra, g: &PermGroup) -> bool {
    let inst = GTermInstance::new(alg.clone(), g.clone()).unwrap();
    decide::decide_brute_force(&inst, &opts())
        .unwrap()
        .satisfied
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subgroup_inherits_terms(
        alg in binary_algebra(2),
        gens in prop::collection::vec(perm(3), 1..3),
        keep in any::<prop::sample::Index>(),
    ) {
        let g = group_of(gens.clone(), 3);
        let h = group_of(vec![gens[keep.index(gens.len())].clone()], 3);
        if satisfied(&alg, &g) {
            prop_assert!(satisfied(&alg, &h));
        }
    }

    #[test]
    fn conjugate_groups_agree(
        alg in binary_algebra(2),
        gens in prop::collection::vec(perm(3), 1..3),
        sigma in perm(3),
    ) {
        let g = group_of(gens, 3);
        let c = g.conjugate(&sigma).unwrap();
        prop_assert_eq!(satisfied(&alg, &g), satisfied(&alg, &c));
    }

    #[test]
    fn local_check_is_antitone(
        alg in binary_algebra(3),
        gen in perm(3),
        tuples in prop::collection::vec(prop::collection::vec(0..3 as Elem, 3), 1..8),
        pick in any::<prop::sample::Index>(),
    ) {
        let inst = GTermInstance::new(alg, group_of(vec![gen], 3)).unwrap();
        let small = &tuples[..1 + pick.index(tuples.len())];
        let big = decide::check_local(&inst, &tuples, false, 1_000_000usize).unwrap();
        let sub = decide::check_local(&inst, small, false, 1_000_000usize).unwrap();
        if big.satisfied {
            prop_assert!(sub.satisfied);
        }
    }

    #[test]
    fn local_witness_holds_on_its_tuples(
        alg in binary_algebra(3),
        gen in perm(3),
        tuples in subsequence((0..27u32).collect::<Vec<_>>(), 1..6),
    ) {
        let tuples: Vec<Vec<Elem>> = tuples.iter().map(|&r| vec![r % 3, r / 3 % 3, r / 9]).collect();
        let inst = GTermInstance::new(alg, group_of(vec![gen], 3)).unwrap();
        let out = decide::check_local(&inst, &tuples, true, 1_000_000usize).unwrap();
        if let Some(w) = out.witness {
            prop_assert!(decide::verify_witness(&inst, &w.circuit, &tuples).is_ok());
        }
    }
}

fn meet_chain(n: usize) -> (FiniteAlgebra, TermCircuit) {
    let alg =
        FiniteAlgebra::new(2, vec![Operation::from_table("meet", 2, vec![0, 0, 0, 1])]).unwrap();
    let meet = TermCircuit::basic_op("meet", 2);
    let mut t = TermCircuit::projection(n, 0).unwrap();
    for i in 1..n {
        t = TermCircuit::compose(&meet, &[t, TermCircuit::projection(n, i).unwrap()]).unwrap();
    }
    (alg, t)
}

/// The rotation of `Z4` acts on `{0,1,0,1}` as the swap of `Z2`.
fn parity_map(pi: &Permutation) -> Result<Permutation, Error> {
    Permutation::from_images(if pi.apply(0).is_multiple_of(2) {
        vec![0, 1]
    } else {
        vec![1, 0]
    })
}

#[test]
fn quotient_of_cyclic_term_is_invariant() {
    let (alg, t) = meet_chain(4);
    let (z4, z2) = (PermGroup::cyclic(4), PermGroup::cyclic(2));
    let q = construct::quotient_term(&t, &[0, 1, 0, 1], &z4, &z2, parity_map).unwrap();
    construct::verify_invariance(&alg, &z2, &q, &Scope::Global).unwrap();
}

#[test]
fn quotient_rejects_broken_homomorphism() {
    let (_, t) = meet_chain(4);
    let (z4, z2) = (PermGroup::cyclic(4), PermGroup::cyclic(2));
    let identity = |_: &Permutation| Permutation::from_images(vec![0, 1]);
    let err = construct::quotient_term(&t, &[0, 1, 0, 1], &z4, &z2, identity).unwrap_err();
    assert!(matches!(err, Error::Intertwining { .. }), "{err}");
    let bad_alpha = construct::quotient_term(&t, &[0, 0, 1, 1], &z4, &z2, parity_map).unwrap_err();
    assert!(
        matches!(bad_alpha, Error::Intertwining { .. }),
        "{bad_alpha}"
    );
}

#[test]
fn quotient_rejects_non_surjective_map() {
    let (_, t) = meet_chain(4);
    let z4 = PermGroup::cyclic(4);
    let identity = |_: &Permutation| Permutation::from_images(vec![0, 1]);
    let err = construct::quotient_term(&t, &[0, 0, 0, 0], &z4, &PermGroup::cyclic(2), identity)
        .unwrap_err();
    assert!(matches!(err, Error::Invalid(_)), "{err}");
}
