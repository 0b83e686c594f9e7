mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use proptest::prelude::*;

use hmloc::infer::infer_type;
use hmloc::solve::constrain;
use hmloc::source::{FileId, Location};
use hmloc::surface::{parse_source, print_term, Item};
use hmloc::types::{Constraint, Context, InferenceState, Prim, Provenance, Type};
use hmloc::unify::{unify_state, validate_flow};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn provenance_monoid(a in any::<u64>()) {
        let mut r = rng(a);
        let (p, q, s) = (random_prov(&mut r, 2), random_prov(&mut r, 2), random_prov(&mut r, 2));
        let e = Provenance::empty();
        prop_assert_eq!(p.concat(&q).concat(&s), p.concat(&q.concat(&s)));
        prop_assert_eq!(e.concat(&p), p.clone());
        prop_assert_eq!(p.concat(&e), p.clone());
    }

    #[test]
    fn provenance_rev(a in any::<u64>()) {
        let mut r = rng(a);
        let (p, q) = (random_prov(&mut r, 2), random_prov(&mut r, 2));
        prop_assert_eq!(p.rev().rev(), p.clone());
        prop_assert_eq!(p.concat(&q).rev(), q.rev().concat(&p.rev()));
        prop_assert_eq!(Provenance::empty().rev(), Provenance::empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn printed_terms_reparse(seed in any::<u64>()) {
        let t = TermGen::new(seed).term(5, &mut Vec::new());
        let src = format!("let it = {}\n", print_term(&t));
        let p = parse_source(&src, FileId(0)).unwrap();
        let Item::Let { value, .. } = &p.items[0] else { panic!() };
        prop_assert!(value.same_shape(&t), "{}", src);
    }
}

/// Whether the subtyping-style pipeline reports any error for `t`.
fn flags_error(t: &hmloc::surface::Term) -> bool {
    let mut st = InferenceState::new();
    infer_type(&mut st, 0, &mut Context::new(), t).unwrap();
    !unify_state(&mut st).is_empty()
}

#[test]
fn agrees_with_equality_unification() {
    let (mut n, mut rejected) = (0, 0);
    for seed in 0..10_000u64 {
        let t = TermGen::new(seed).term(5, &mut Vec::new());
        assert!(depth(&t) <= 5);
        let hm = hm_accepts(&t);
        assert_eq!(!flags_error(&t), hm, "seed {seed}: {}", print_term(&t));
        n += 1;
        rejected += usize::from(!hm);
    }
    assert_eq!(n, 10_000);
    assert!(rejected > 1_000 && rejected < 9_000, "{rejected}");
}

#[test]
fn search_finds_shortest_flows() {
    let mut flows = 0;
    for seed in 0..1_000u64 {
        let mut g = random_bound_graph(seed);
        let errors = unify_state(&mut g.state);
        for e in &errors {
            assert!(validate_flow(&e.flow, &g.state), "seed {seed}: {:?}", e.flow);
            let ends: Vec<Location> = e.key.0.iter().map(|(o, _)| {
                let (f, s, t) = o.unwrap();
                Location::new(FileId(f), s as usize, t as usize)
            }).collect();
            let min = exhaustive_min(&g, ends[0], ends[1]).unwrap();
            assert_eq!(e.flow.len(), min, "seed {seed}: {:?}", e.flow);
            flows += 1;
        }
        // every incompatible pair in one component is reported
        let mut want = 0;
        let cs: Vec<(&Location, &(_, Prim))> = g.concrete.iter().collect();
        for (i, (la, (_, pa))) in cs.iter().enumerate() {
            for (lb, (_, pb)) in &cs[i + 1..] {
                if pa != pb && exhaustive_min(&g, **la, **lb).is_some() {
                    want += 1;
                }
            }
        }
        assert_eq!(errors.len(), want, "seed {seed}");
    }
    assert!(flows > 500, "{flows}");
}

fn loc(i: usize) -> Provenance {
    Provenance::loc(Location::new(FileId(0), i, i + 1))
}

#[test]
fn cyclic_bounds_terminate() {
    let start = Instant::now();
    let mut st = InferenceState::new();
    let (a, b) = (st.fresh_var(0), st.fresh_var(0));
    let var = |v| Type::var(v, Provenance::empty());
    constrain(&mut st, Constraint::new(var(a), var(b)));
    constrain(&mut st, Constraint::new(var(b), var(a)));
    constrain(&mut st, Constraint::new(Type::prim(Prim::Int, loc(1)), var(a)));
    constrain(&mut st, Constraint::new(Type::prim(Prim::Bool, loc(2)), var(b)));
    assert_eq!(unify_state(&mut st).len(), 1);
    assert!(start.elapsed() < Duration::from_millis(100));

    let start = Instant::now();
    assert!(check("let rec f x = f").errors.is_empty());
    assert!(start.elapsed() < Duration::from_millis(100));
}

#[test]
fn erasure_preserves_graph_and_errors() {
    for (name, src) in corpus() {
        let (a, b) = (check_named(&name, &src, false), check_named(&name, &src, true));
        assert_eq!(format!("{:?}", a.state.reset_graph()), format!("{:?}", b.state.reset_graph()), "{name}");
        assert_eq!(a.state.errors.len(), b.state.errors.len(), "{name}");
    }
}

#[test]
fn classification_levels() {
    let levels: HashMap<String, usize> = corpus()
        .into_iter()
        .map(|(n, s)| {
            let lv = check_named(&n, &s, false).errors[0].level;
            (n, lv)
        })
        .collect();
    assert_eq!([levels["level0"], levels["confluence"], levels["divergence"], levels["level2"]], [0, 1, 1, 2]);
}
