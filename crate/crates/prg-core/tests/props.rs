//! Property tests for the core algebraic invariants.

use proptest::prelude::*;

use prg_core::{
    canonical_dt_run, cdt_depth, text, witness_search, witness_search_decoupled, BitString,
    BooleanFn, DnfFormula, DtOracle, Literal, PartialWitness, Restriction, RunOutcome,
    StagePattern, Term, VarSet,
};

fn restriction(n: usize) -> impl Strategy<Value = Restriction> {
    proptest::collection::vec(0u8..3, n).prop_map(move |cells| {
        let mut r = Restriction::all_star(n);
        for (i, c) in cells.into_iter().enumerate() {
            match c {
                0 => r.assign(i, false),
                1 => r.assign(i, true),
                _ => {}
            }
        }
        r
    })
}

fn bits(n: usize) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|v| BitString::from_bools(&v))
}

fn varset(n: usize) -> impl Strategy<Value = VarSet> {
    proptest::collection::vec(any::<bool>(), n).prop_map(move |v| {
        VarSet::from_indices(n, (0..n).filter(|&i| v[i])).unwrap()
    })
}

fn term(n: usize, max_width: usize) -> impl Strategy<Value = Term> {
    proptest::collection::btree_set(0..n, 1..=max_width.min(n)).prop_flat_map(move |vars| {
        let vars: Vec<usize> = vars.into_iter().collect();
        proptest::collection::vec(any::<bool>(), vars.len()).prop_map(move |negs| {
            Term::new(
                vars.iter()
                    .zip(&negs)
                    .map(|(&var, &negated)| Literal { var, negated })
                    .collect(),
            )
            .unwrap()
        })
    })
}

fn dnf(n: usize, max_terms: usize, max_width: usize) -> impl Strategy<Value = DnfFormula> {
    proptest::collection::vec(term(n, max_width), 1..=max_terms)
        .prop_map(move |terms| DnfFormula::new(n, terms).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn compose_is_associative(a in restriction(24), b in restriction(24), c in restriction(24)) {
        let left = a.compose(&b.compose(&c).unwrap()).unwrap();
        let right = a.compose(&b).unwrap().compose(&c).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn merge_by_set_is_masked_composition(
        lambda in varset(18),
        rho in restriction(18),
        sigma in restriction(18),
    ) {
        let merged = Restriction::merge_by_set(&lambda, &rho, &sigma).unwrap();
        let masked = sigma
            .masked_to(&lambda)
            .compose(&rho.masked_to(&lambda.complement()))
            .unwrap();
        prop_assert_eq!(merged, masked);
    }

    #[test]
    fn restrict_then_eval_equals_compose_then_eval(
        f in dnf(8, 5, 3),
        rho in restriction(8),
        y in bits(8),
    ) {
        let restricted = f.restrict(&rho).unwrap();
        let composed = rho.complete_with(&y).unwrap();
        prop_assert_eq!(restricted.eval(&y), f.eval(&composed));
        prop_assert!(restricted.width() <= f.width());
        prop_assert!(restricted.term_count() <= f.term_count());
    }

    #[test]
    fn canonical_run_is_sound(
        f in dnf(9, 5, 3),
        rho in restriction(9),
        alpha in bits(9),
    ) {
        let t = canonical_dt_run(&f, &rho, &mut &alpha).unwrap();
        prop_assert!(t.check_invariants());
        let completed = rho.complete_with(&alpha).unwrap();
        prop_assert_eq!(t.outcome, RunOutcome::Decided(f.eval(&completed)));
    }

    #[test]
    fn cdt_dominates_exact_depth(f in dnf(8, 4, 3), rho in restriction(8)) {
        let mut dt = DtOracle::default();
        let cdt = cdt_depth(&f, &rho, 16).unwrap();
        let exact = dt.depth_of_restricted(&f, &rho).unwrap();
        prop_assert!(cdt >= exact, "CDT {} < DT {}", cdt, exact);
    }

    #[test]
    fn coupled_searcher_equals_decoupled(
        f in dnf(8, 4, 3),
        rho in restriction(8),
        y in bits(8),
        positions in proptest::collection::btree_set(0usize..3, 1..=2),
        responses in proptest::collection::vec(any::<bool>(), 2),
    ) {
        let positions: Vec<usize> = positions.into_iter().collect();
        let responses = responses[..positions.len()].to_vec();
        let pw = PartialWitness::new(vec![StagePattern::new(positions, responses).unwrap()])
            .unwrap();
        let z = rho.complete_with(&y).unwrap();
        prop_assert_eq!(
            witness_search(&f, &rho, &pw, &y),
            witness_search_decoupled(&f, &z, &pw)
        );
    }

    #[test]
    fn dnf_text_roundtrip(f in dnf(10, 6, 4)) {
        let written = text::write_dnf(&f);
        prop_assert_eq!(text::parse_dnf(&written).unwrap(), f);
    }

    #[test]
    fn restriction_string_roundtrip(rho in restriction(20)) {
        let s = rho.to_string();
        prop_assert_eq!(s.parse::<Restriction>().unwrap(), rho);
    }

    #[test]
    fn optimal_tree_text_roundtrip(f in dnf(6, 4, 3)) {
        use prg_core::{DecisionTree, TruthTable};
        let (table, support) = TruthTable::of_restricted(&f, &Restriction::all_star(6));
        let mut dt = DtOracle::default();
        let tree = dt.optimal_tree(&table, &support).unwrap();
        let text_form = tree.to_text();
        prop_assert_eq!(DecisionTree::from_text(&text_form).unwrap(), tree);
    }
}
