//! Subtype constraint solving with provenance tracking and level extrusion.

use std::collections::HashSet;
use std::rc::Rc;

use crate::types::{
    lvl, Constraint, Ctor, DataFlow, Frame, Hypotheses, InferenceState, LinkProv, Provenance, Relation, Side, SolveError, Type, VarId,
    Variance,
};

/// Solve `q` against the current bounds, recording collisions in
/// `state.errors`.
pub fn constrain(state: &mut InferenceState, q: Constraint) {
    let mut hyps = Hypotheses::new();
    constrain_with(state, q, &mut hyps);
}

/// Like [`constrain`] but sharing an existing hypothesis set.
pub fn constrain_with(state: &mut InferenceState, q: Constraint, hyps: &mut Hypotheses) {
    go(state, q.lhs, q.rhs, hyps, false);
}

fn go(state: &mut InferenceState, lhs: Type, rhs: Type, hyps: &mut Hypotheses, via_var: bool) {
    // C-CACHE
    if hyps.contains(&lhs, &rhs) {
        return;
    }
    // C-REFL
    if lhs.reset_eq(&rhs) {
        return;
    }
    // C-R-EXTR / C-L-EXTR
    if let Some(a) = lhs.as_var() {
        let la = state.level(a);
        if lvl(&rhs, state).unwrap_or(0) > la {
            extrude(std::slice::from_ref(&rhs), state, la, &mut HashSet::new());
        }
    }
    if let Some(b) = rhs.as_var() {
        let lb = state.level(b);
        if lvl(&lhs, state).unwrap_or(0) > lb {
            extrude(std::slice::from_ref(&lhs), state, lb, &mut HashSet::new());
        }
    }
    let (p0, p1) = (lhs.prov().clone(), rhs.prov().clone());
    match (lhs.as_var(), rhs.as_var()) {
        // C-VAR-LR: α gains upper bound α′ and α′ lower bound α, both with
        // the whole provenance p0·p1.
        (Some(a), Some(b)) => {
            let lower = snapshot(state, a, Side::Lower);
            let link = LinkProv::new(&p0, &p1);
            state.add_bound(a, Side::Upper, rhs.with_prov(link.prov.clone()), link.split);
            state.add_bound(b, Side::Lower, lhs.with_prov(link.prov.clone()), link.split);
            hyps.insert(&lhs, &rhs);
            for (t, split) in lower {
                let (q0, q1) = split_prov(t.prov(), split);
                go(state, t.with_prov(q0), rhs.with_prov(q1.concat(&p1)), hyps, true);
            }
        }
        // C-VAR-L
        (Some(a), None) => {
            let lower = snapshot(state, a, Side::Lower);
            let link = LinkProv::new(&p0, &p1);
            state.add_bound(a, Side::Upper, rhs.with_prov(link.prov.clone()), link.split);
            hyps.insert(&lhs, &rhs);
            for (t, split) in lower {
                let (q0, q1) = split_prov(t.prov(), split);
                go(state, t.with_prov(q0), rhs.with_prov(q1.concat(&p1)), hyps, true);
            }
        }
        // C-VAR-R
        (None, Some(b)) => {
            let upper = snapshot(state, b, Side::Upper);
            let link = LinkProv::new(&p0, &p1);
            state.add_bound(b, Side::Lower, lhs.with_prov(link.prov.clone()), link.split);
            hyps.insert(&lhs, &rhs);
            for (t, split) in upper {
                let (q0, q1) = split_prov(t.prov(), split);
                go(state, lhs.with_prov(p0.concat(&q0)), t.with_prov(q1), hyps, true);
            }
        }
        // C-SUB / C-ERROR
        (None, None) => match sub_constraints(&lhs, &rhs) {
            Ok(qs) => {
                for q in qs {
                    go(state, q.lhs, q.rhs, hyps, via_var);
                }
            }
            Err(link) => state.errors.push(SolveError { lhs, rhs, link, via_var }),
        },
    }
}

fn snapshot(state: &InferenceState, v: VarId, side: Side) -> Vec<(Type, usize)> {
    state
        .bounds(v, side)
        .map(|bs| bs.iter().map(|b| (b.ty.clone(), b.split)).collect())
        .unwrap_or_default()
}

fn split_prov(p: &Provenance, at: usize) -> (Provenance, Provenance) {
    let (a, b) = p.frames().split_at(at.min(p.len()));
    (Provenance::from_frames(a.to_vec()), Provenance::from_frames(b.to_vec()))
}

/// Frame recording that a flow passed through argument `arg` of the
/// constructor types related by `rel`.
fn ctor_frame(ctor: Ctor, arg: usize, from: &Type, rel: Relation, to: &Type) -> Provenance {
    let mut z = DataFlow::single(from.with_prov(Provenance::empty()));
    z.push(rel, to.with_prov(Provenance::empty()));
    let inner = Provenance::from_frames(vec![Frame::Flow(Rc::new(z))]);
    Provenance::from_frames(vec![Frame::Ctor { ctor, arg: arg as u8, inner }])
}

/// Decompose a constraint between two non-variable types. Mismatched heads
/// yield the concatenated provenance of both sides.
pub fn sub_constraints(lhs: &Type, rhs: &Type) -> Result<Vec<Constraint>, LinkProv> {
    let (p0, p1) = (lhs.prov(), rhs.prov());
    match (lhs, rhs) {
        (Type::Ctor(c, xs, _), Type::Ctor(d, ys, _)) if c == d && xs.len() == ys.len() => {
            let mut out = Vec::with_capacity(xs.len());
            for (k, (x, y)) in xs.iter().zip(ys.iter()).enumerate() {
                let link = LinkProv::new(p0, p1);
                out.push(match c.variance(k) {
                    Variance::Covariant => {
                        let f = ctor_frame(*c, k, lhs, Relation::Forward(link), rhs);
                        Constraint::new(x.append(&f), y.clone())
                    }
                    Variance::Contravariant => {
                        let f = ctor_frame(*c, k, rhs, Relation::Backward(link.rev()), lhs);
                        Constraint::new(y.append(&f), x.clone())
                    }
                });
            }
            Ok(out)
        }
        (Type::Prim(a, _), Type::Prim(b, _)) if a == b => Ok(Vec::new()),
        _ => Err(LinkProv::new(p0, p1)),
    }
}

/// Lower the level of every variable reachable from `ts` (through bounds and
/// constructor arguments) to at most `level`.
pub fn extrude(ts: &[Type], state: &mut InferenceState, level: u32, seen: &mut HashSet<VarId>) {
    let mut work: Vec<Type> = ts.iter().rev().cloned().collect();
    while let Some(t) = work.pop() {
        match &t {
            Type::Var(v, _) => {
                if seen.contains(v) || state.level(*v) <= level {
                    continue;
                }
                seen.insert(*v);
                state.set_level(*v, level);
                for side in [Side::Upper, Side::Lower] {
                    for (b, _) in snapshot(state, *v, side).into_iter().rev() {
                        work.push(b);
                    }
                }
            }
            Type::Ctor(_, args, _) => {
                if lvl(&t, state).unwrap_or(0) > level {
                    work.extend(args.iter().rev().cloned());
                }
            }
            Type::Prim(..) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{FileId, Location};
    use crate::types::Prim;

    fn l(i: usize) -> Provenance {
        Provenance::loc(Location::new(FileId(0), i, i + 1))
    }

    fn int(p: Provenance) -> Type {
        Type::prim(Prim::Int, p)
    }

    fn boolean(p: Provenance) -> Type {
        Type::prim(Prim::Bool, p)
    }

    #[test]
    fn int_through_var_into_bool() {
        let mut st = InferenceState::new();
        let a = st.fresh_var(0);
        constrain(&mut st, Constraint::new(int(l(1)), Type::var(a, l(0))));
        assert!(st.errors.is_empty());
        constrain(&mut st, Constraint::new(Type::var(a, l(0)), boolean(l(5))));
        assert_eq!(st.errors.len(), 1);
        let e = &st.errors[0];
        assert!(e.via_var);
        let locs: Vec<_> = e.link.prov.outer_locations().map(|x| x.start).collect();
        assert_eq!(locs, vec![1, 0, 5]);
        assert_eq!((e.lhs.reset(), e.rhs.reset()), (int(Provenance::empty()), boolean(Provenance::empty())));
    }

    #[test]
    fn reflexive_and_cached() {
        let mut st = InferenceState::new();
        constrain(&mut st, Constraint::new(int(l(0)), int(l(1))));
        assert!(st.errors.is_empty());
        let a = st.fresh_var(0);
        let mut hyps = Hypotheses::new();
        constrain_with(&mut st, Constraint::new(int(l(0)), Type::var(a, l(1))), &mut hyps);
        constrain_with(&mut st, Constraint::new(int(l(2)), Type::var(a, l(3))), &mut hyps);
        assert_eq!(st.bounds(a, Side::Lower).unwrap().len(), 1);
    }

    #[test]
    fn product_decomposition() {
        let pair = |a: Type, b: Type, p| Type::ctor(Ctor::pair(), vec![a, b], p);
        let lhs = pair(int(l(0)), boolean(l(1)), l(2));
        let rhs = pair(int(l(3)), int(l(4)), l(5));
        let qs = sub_constraints(&lhs, &rhs).unwrap();
        assert_eq!(qs.len(), 2);
        let Frame::Ctor { ctor, arg: 0, inner } = &qs[0].lhs.prov().frames()[1] else { panic!() };
        assert_eq!(*ctor, Ctor::pair());
        let mut locs = Vec::new();
        inner.all_locations(&mut locs);
        assert_eq!(locs.iter().map(|x| x.start).collect::<Vec<_>>(), vec![2, 5]);
        let mut st = InferenceState::new();
        constrain(&mut st, Constraint::new(lhs, rhs));
        assert_eq!(st.errors.len(), 1);
        assert!(!st.errors[0].via_var);
    }

    #[test]
    fn function_parameter_flips() {
        let f = Type::fun(int(l(0)), int(l(1)), l(2));
        let g = Type::fun(boolean(l(3)), int(l(4)), l(5));
        let qs = sub_constraints(&f, &g).unwrap();
        assert!(qs[0].lhs.reset_eq(&boolean(Provenance::empty())));
        let Frame::Ctor { inner, .. } = &qs[0].lhs.prov().frames()[1] else { panic!() };
        let Frame::Flow(z) = &inner.frames()[0] else { panic!() };
        assert!(z.first().reset_eq(&g) && z.last().reset_eq(&f));
        assert!(matches!(z.links[0].0, Relation::Backward(_)));
        let mut locs = Vec::new();
        inner.all_locations(&mut locs);
        assert_eq!(locs.iter().map(|x| x.start).collect::<Vec<_>>(), vec![5, 2]);
        assert!(sub_constraints(&int(l(0)), &f).is_err());
    }

    #[test]
    fn cyclic_bounds_terminate() {
        let mut st = InferenceState::new();
        let (a, b) = (st.fresh_var(0), st.fresh_var(0));
        let va = Type::var(a, Provenance::empty());
        let vb = Type::var(b, Provenance::empty());
        constrain(&mut st, Constraint::new(va.clone(), vb.clone()));
        constrain(&mut st, Constraint::new(vb.clone(), va.clone()));
        constrain(&mut st, Constraint::new(int(l(0)), va));
        constrain(&mut st, Constraint::new(boolean(l(1)), vb));
        assert!(st.errors.is_empty());
        assert_eq!(st.bounds(a, Side::Lower).unwrap().len(), 3);
    }

    #[test]
    fn extrusion_lowers_reachable_levels() {
        let mut st = InferenceState::new();
        let x = st.fresh_var(1);
        let y = st.fresh_var(2);
        let r = st.fresh_var(3);
        let target = Type::fun(Type::var(y, l(0)), Type::var(r, l(1)), Provenance::empty());
        constrain(&mut st, Constraint::new(Type::var(x, l(2)), target));
        assert_eq!((st.level(y), st.level(r)), (1, 1));
        extrude(&[int(l(0))], &mut st, 0, &mut HashSet::new());
        assert_eq!(st.level(x), 1);
    }
}
