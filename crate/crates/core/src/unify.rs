//! Data-flow tracking unification over the bound graph left by inference.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::rc::Rc;

use crate::source::Location;
use crate::types::{Bound, DataFlow, InferenceState, LinkProv, Provenance, Relation, Side, Type, VarId};

/// One erroneous flow between two incompatible concrete types.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowError {
    pub flow: DataFlow,
    pub level: usize,
    pub key: DedupKey,
}

impl FlowError {
    pub fn lhs(&self) -> &Type {
        self.flow.first()
    }

    pub fn rhs(&self) -> &Type {
        self.flow.last()
    }

    fn sort_key(&self) -> (Option<(u32, u32, u32)>, &DedupKey) {
        (origin(self.lhs(), self.flow.links.first().map(|l| &l.0), true), &self.key)
    }
}

/// The two endpoints, each as its reset type and origin location, in
/// location order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DedupKey(pub [(Option<LocKey>, String); 2]);

/// `(file, start, end)` of a location.
pub type LocKey = (u32, u32, u32);

fn loc_key(l: Location) -> LocKey {
    (l.file.0, l.start, l.end)
}

/// Where an endpoint's type originates: the far end of its own provenance,
/// seen from the flow.
fn origin(t: &Type, rel: Option<&Relation>, at_start: bool) -> Option<(u32, u32, u32)> {
    let mut locs = t.prov().outer_locations();
    let last = match rel {
        Some(Relation::Forward(_)) => !at_start,
        Some(Relation::Backward(_)) => at_start,
        _ => false,
    };
    if last { locs.last() } else { locs.next() }.map(loc_key)
}

impl DedupKey {
    fn of(flow: &DataFlow) -> DedupKey {
        let (a, b) = (flow.first(), flow.last());
        let ea = (origin(a, flow.links.first().map(|l| &l.0), true), format!("{:?}", a.reset()));
        let eb = (origin(b, flow.links.last().map(|l| &l.0), false), format!("{:?}", b.reset()));
        DedupKey(if eb < ea { [eb, ea] } else { [ea, eb] })
    }
}

/// Graph identity of a flow endpoint. Concrete types are distinguished by the
/// locations they bring themselves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Var(VarId),
    Concrete(Type, Vec<Location>),
}

fn node(t: &Type) -> Node {
    match t.as_var() {
        Some(v) => Node::Var(v),
        None => Node::Concrete(t.reset(), t.prov().outer_locations().collect()),
    }
}

/// Make variable-to-variable bounds symmetric: `α <: β` is recorded both as
/// an upper bound of `α` and a lower bound of `β`.
pub fn saturate(state: &mut InferenceState) {
    let vars: Vec<VarId> = state.var_ids().collect();
    for v in vars {
        for (side, other) in [(Side::Upper, Side::Lower), (Side::Lower, Side::Upper)] {
            let bounds: Vec<Bound> = state.bounds(v, side).map(|b| b.to_vec()).unwrap_or_default();
            for b in bounds {
                if let Some(w) = b.ty.as_var() {
                    let me = Type::var(v, b.ty.prov().clone());
                    state.add_bound(w, other, me, b.split);
                }
            }
        }
    }
}

/// The endpoint as it appears in a flow: a concrete bound keeps only its own
/// part of the link provenance, a variable keeps none.
fn endpoint(t: &Type, own: &[crate::types::Frame]) -> Type {
    if t.is_var() {
        t.with_prov(Provenance::empty())
    } else {
        t.with_prov(Provenance::from_frames(own.to_vec()))
    }
}

/// Single-link flows for the bounds of `v`, oriented to end at `v`.
fn into_var(state: &InferenceState, v: VarId) -> Vec<DataFlow> {
    let me = Type::var(v, Provenance::empty());
    let mut out = Vec::new();
    for b in state.bounds(v, Side::Lower).unwrap_or(&[]) {
        let link = b.link();
        let mut f = DataFlow::single(endpoint(&b.ty, link.left()));
        f.push(Relation::Forward(link), me.clone());
        out.push(f);
    }
    for b in state.bounds(v, Side::Upper).unwrap_or(&[]) {
        let link = b.link();
        let mut f = DataFlow::single(endpoint(&b.ty, link.right()));
        f.push(Relation::Backward(link.rev()), me.clone());
        out.push(f);
    }
    out
}

fn join(a: &DataFlow, b: &DataFlow) -> DataFlow {
    let mut out = a.clone();
    out.links.extend(b.links.iter().cloned());
    out
}

struct Search<'a> {
    state: &'a InferenceState,
    queue: BinaryHeap<Reverse<(usize, u64)>>,
    pending: HashMap<u64, DataFlow>,
    seq: u64,
    cache: HashSet<(Node, Node)>,
    /// Flows discovered through constructor arguments, oriented to end at
    /// their variable.
    extra: HashMap<VarId, Vec<(DataFlow, DataFlow)>>,
    found: Vec<FlowError>,
    keys: HashSet<DedupKey>,
}

impl<'a> Search<'a> {
    fn push(&mut self, z: DataFlow) {
        let (a, b) = (node(z.first()), node(z.last()));
        if self.cache.contains(&(a.clone(), b.clone())) || self.cache.contains(&(b, a)) {
            return;
        }
        self.queue.push(Reverse((z.len(), self.seq)));
        self.pending.insert(self.seq, z);
        self.seq += 1;
    }

    /// Flows ending at `v`: its bounds first, then constructor-argument flows.
    fn edges_into(&self, v: VarId) -> Vec<DataFlow> {
        let mut out = into_var(self.state, v);
        out.extend(self.extra.get(&v).into_iter().flatten().map(|(f, _)| f.clone()));
        out
    }

    /// [`Self::edges_into`] read away from `v`.
    fn edges_from(&self, v: VarId) -> Vec<DataFlow> {
        let mut out: Vec<DataFlow> = into_var(self.state, v).iter().map(DataFlow::rev).collect();
        out.extend(self.extra.get(&v).into_iter().flatten().map(|(_, r)| r.clone()));
        out
    }

    fn run(&mut self) {
        while let Some(Reverse((_, id))) = self.queue.pop() {
            let z = self.pending.remove(&id).expect("queued flow");
            self.step(z);
        }
    }

    fn step(&mut self, z: DataFlow) {
        if let [(Relation::Ctor { .. }, _)] = z.links.as_slice() {
            let r = z.rev();
            for (f, g) in [(&z, &r), (&r, &z)] {
                if let Some(v) = f.last().as_var() {
                    self.extra.entry(v).or_default().push((f.clone(), g.clone()));
                }
            }
        }
        let (a, b) = (node(z.first()), node(z.last()));
        // U-CACHE
        if self.cache.contains(&(a.clone(), b.clone())) || self.cache.contains(&(b.clone(), a.clone())) {
            return;
        }
        self.cache.insert((a, b));
        // U-REFL
        if z.first().reset_eq(z.last()) {
            return;
        }
        // U-VAR-L
        if let Some(v) = z.first().as_var() {
            for e in self.edges_into(v) {
                self.push(join(&e, &z));
            }
            return;
        }
        // U-VAR-R
        if let Some(v) = z.last().as_var() {
            for e in self.edges_from(v) {
                self.push(join(&z, &e));
            }
            return;
        }
        match ctor_args(z.first(), z.last()) {
            // U-SUB
            Some(pairs) => {
                let inner = Rc::new(z.clone());
                for (k, (x, y)) in pairs.into_iter().enumerate() {
                    let Type::Ctor(c, ..) = z.first() else { unreachable!() };
                    let mut f = DataFlow::single(x);
                    f.push(Relation::Ctor { ctor: *c, arg: k as u8, inner: inner.clone() }, y);
                    self.push(f);
                }
            }
            // U-ERROR
            None => {
                let err = flow_error(z);
                if self.keys.insert(err.key.clone()) {
                    self.found.push(err);
                }
            }
        }
    }
}

fn ctor_args(a: &Type, b: &Type) -> Option<Vec<(Type, Type)>> {
    match (a, b) {
        (Type::Ctor(c, xs, _), Type::Ctor(d, ys, _)) if c == d && xs.len() == ys.len() => {
            Some(xs.iter().cloned().zip(ys.iter().cloned()).collect())
        }
        _ => None,
    }
}

/// Whether the endpoint at one end of `flow` is a value flowing in, as
/// opposed to a position expecting one.
fn is_source(flow: &DataFlow, at_start: bool) -> bool {
    let rel = if at_start { flow.links.first() } else { flow.links.last() };
    match rel.map(|l| &l.0) {
        Some(Relation::Forward(_)) => at_start,
        Some(Relation::Backward(_)) => !at_start,
        _ => true,
    }
}

/// Pick the reading direction: sources lead level-0 flows, sinks lead other
/// mixed flows, and the earlier origin leads otherwise.
fn orient(flow: DataFlow, level: usize) -> DataFlow {
    let (a, b) = (is_source(&flow, true), is_source(&flow, false));
    let flip = if a != b {
        if level == 0 { b } else { a }
    } else {
        let oa = origin(flow.first(), flow.links.first().map(|l| &l.0), true);
        let ob = origin(flow.last(), flow.links.last().map(|l| &l.0), false);
        let last = (u32::MAX, 0, 0);
        ob.unwrap_or(last) < oa.unwrap_or(last)
    };
    if flip { flow.rev() } else { flow }
}

fn flow_error(flow: DataFlow) -> FlowError {
    let level = classify_level(&flow);
    let key = DedupKey::of(&flow);
    FlowError { flow: orient(flow, level), level, key }
}

/// Equate the endpoints of `z`, returning every error reached from it.
pub fn unify_flow(z: DataFlow, state: &InferenceState) -> Vec<FlowError> {
    let mut s = Search::new(state);
    s.push(z);
    s.run();
    s.found
}

impl<'a> Search<'a> {
    fn new(state: &'a InferenceState) -> Self {
        Search {
            state,
            queue: BinaryHeap::new(),
            pending: HashMap::new(),
            seq: 0,
            cache: HashSet::new(),
            extra: HashMap::new(),
            found: Vec::new(),
            keys: HashSet::new(),
        }
    }
}

/// Collisions recorded directly by the solver, outside any variable's
/// bounds, as single-link flows.
fn direct_errors(state: &InferenceState) -> Vec<FlowError> {
    state
        .errors
        .iter()
        .filter(|e| !e.via_var)
        .map(|e| {
            let mut f = DataFlow::single(endpoint(&e.lhs, e.link.left()));
            f.push(Relation::Forward(e.link.clone()), endpoint(&e.rhs, e.link.right()));
            flow_error(f)
        })
        .collect()
}

/// Saturate, then search the whole bound graph shortest-first. One flow is
/// kept per [`DedupKey`]; the result is sorted by first endpoint location.
pub fn unify_state(state: &mut InferenceState) -> Vec<FlowError> {
    saturate(state);
    let state: &InferenceState = state;
    let mut s = Search::new(state);
    for v in state.var_ids() {
        let me = Type::var(v, Provenance::empty());
        for b in state.bounds(v, Side::Lower).unwrap_or(&[]) {
            let link = b.link();
            let mut f = DataFlow::single(endpoint(&b.ty, link.left()));
            f.push(Relation::Forward(link), me.clone());
            s.push(f);
        }
        for b in state.bounds(v, Side::Upper).unwrap_or(&[]) {
            let link = b.link();
            let mut f = DataFlow::single(me.clone());
            f.push(Relation::Forward(link.clone()), endpoint(&b.ty, link.right()));
            s.push(f);
        }
    }
    s.run();
    let mut out = s.found;
    for e in direct_errors(state) {
        if !out.iter().any(|o| o.key == e.key) {
            out.push(e);
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out
}

fn recorded_error(state: &InferenceState, lhs: &Type, rhs: &Type, link: &LinkProv) -> bool {
    state.errors.iter().any(|e| &e.link == link && e.lhs.reset_eq(lhs) && e.rhs.reset_eq(rhs))
}

/// Whether every link of `z` is backed by the state.
pub fn validate_flow(z: &DataFlow, state: &InferenceState) -> bool {
    let mut prev = z.first();
    for (rel, t) in &z.links {
        let ok = match rel {
            Relation::Forward(p) => state.has_constraint(prev, t, p) || recorded_error(state, prev, t, p),
            Relation::Backward(p) => state.has_constraint(t, prev, &p.rev()),
            Relation::Ctor { ctor, arg, inner } => {
                let arg_of = |x: &Type| match x {
                    Type::Ctor(c, args, _) if c == ctor => args.get(*arg as usize).cloned(),
                    _ => None,
                };
                validate_flow(inner, state)
                    && arg_of(inner.first()).is_some_and(|a| a.reset_eq(prev))
                    && arg_of(inner.last()).is_some_and(|a| a.reset_eq(t))
            }
        };
        if !ok {
            return false;
        }
        prev = t;
    }
    true
}

/// Number of direction changes among the outer directed links.
pub fn classify_level(z: &DataFlow) -> usize {
    let dirs: Vec<bool> = z
        .links
        .iter()
        .filter_map(|(r, _)| match r {
            Relation::Forward(_) => Some(true),
            Relation::Backward(_) => Some(false),
            Relation::Ctor { .. } => None,
        })
        .collect();
    dirs.windows(2).filter(|w| w[0] != w[1]).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::constrain;
    use crate::source::FileId;
    use crate::types::{Constraint, Ctor, Prim};

    fn l(i: usize) -> Provenance {
        Provenance::loc(Location::new(FileId(0), i, i + 1))
    }

    fn prim(p: Prim, i: usize) -> Type {
        Type::prim(p, l(i))
    }

    fn sub(st: &mut InferenceState, a: Type, b: Type) {
        constrain(st, Constraint::new(a, b));
    }

    #[test]
    fn confluence_is_level_one() {
        let mut st = InferenceState::new();
        let a = st.fresh_var(0);
        sub(&mut st, prim(Prim::Int, 1), Type::var(a, l(0)));
        sub(&mut st, prim(Prim::Str, 2), Type::var(a, l(0)));
        let errs = unify_state(&mut st);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].level, 1);
        assert!(validate_flow(&errs[0].flow, &st));
        assert!(errs[0].lhs().reset_eq(&prim(Prim::Int, 0)));
    }

    #[test]
    fn reversal_twice_is_level_two() {
        let mut st = InferenceState::new();
        let (x, ite) = (st.fresh_var(0), st.fresh_var(0));
        sub(&mut st, prim(Prim::Int, 1), Type::var(ite, l(2)));
        sub(&mut st, Type::var(x, l(3)), Type::var(ite, l(2)));
        sub(&mut st, Type::var(x, l(3)), prim(Prim::Bool, 4));
        let errs = unify_state(&mut st);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].level, 2);
        assert!(validate_flow(&errs[0].flow, &st));
    }

    #[test]
    fn no_collision() {
        let mut st = InferenceState::new();
        let a = st.fresh_var(0);
        sub(&mut st, prim(Prim::Int, 1), Type::var(a, l(0)));
        assert!(unify_state(&mut st).is_empty());
        assert!(unify_state(&mut InferenceState::new()).is_empty());
    }

    #[test]
    fn forward_chain_is_level_zero() {
        let mut st = InferenceState::new();
        let a = st.fresh_var(0);
        sub(&mut st, prim(Prim::Int, 1), Type::var(a, l(0)));
        sub(&mut st, Type::var(a, l(0)), prim(Prim::Bool, 2));
        let errs = unify_state(&mut st);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].level, 0);
        assert_eq!(st.errors.len(), 1);
    }

    #[test]
    fn nested_argument_error() {
        let mut st = InferenceState::new();
        let (y, a1, b1, b2) = (st.fresh_var(0), st.fresh_var(0), st.fresh_var(0), st.fresh_var(0));
        let pair = |x: Type, z: Type, i| Type::ctor(Ctor::pair(), vec![x, z], l(i));
        sub(&mut st, prim(Prim::Bool, 1), Type::var(a1, l(2)));
        sub(&mut st, pair(Type::var(a1, l(2)), Type::var(b1, l(3)), 4), Type::var(y, l(5)));
        sub(&mut st, pair(prim(Prim::Str, 6), Type::var(b2, l(7)), 8), Type::var(y, l(5)));
        let errs = unify_state(&mut st);
        assert_eq!(errs.len(), 1);
        let e = &errs[0];
        assert!(validate_flow(&e.flow, &st));
        assert!(e.flow.links.iter().any(|(r, _)| matches!(r, Relation::Ctor { ctor, arg: 0, .. } if *ctor == Ctor::pair())));
        assert!(e.lhs().reset_eq(&prim(Prim::Bool, 0)) && e.rhs().reset_eq(&prim(Prim::Str, 0)));
    }

    #[test]
    fn argument_flows_chain_through_variables() {
        let mut st = InferenceState::new();
        let (z, u, w) = (st.fresh_var(0), st.fresh_var(0), st.fresh_var(0));
        let pair = |x: Type, i| Type::ctor(Ctor::pair(), vec![x, prim(Prim::Int, 9)], l(i));
        let vz = Type::var(z, l(0));
        sub(&mut st, pair(vz.clone(), 1), Type::var(u, l(2)));
        sub(&mut st, pair(prim(Prim::Int, 3), 4), Type::var(u, l(2)));
        sub(&mut st, pair(vz, 5), Type::var(w, l(6)));
        sub(&mut st, pair(prim(Prim::Bool, 7), 8), Type::var(w, l(6)));
        let errs = unify_state(&mut st);
        assert_eq!(errs.len(), 1);
        assert!(validate_flow(&errs[0].flow, &st));
    }

    #[test]
    fn cycles_terminate() {
        let mut st = InferenceState::new();
        let (a, b) = (st.fresh_var(0), st.fresh_var(0));
        sub(&mut st, Type::var(a, l(0)), Type::var(b, l(1)));
        sub(&mut st, Type::var(b, l(1)), Type::var(a, l(0)));
        sub(&mut st, prim(Prim::Int, 2), Type::var(a, l(0)));
        sub(&mut st, prim(Prim::Bool, 3), Type::var(b, l(1)));
        let errs = unify_state(&mut st);
        assert_eq!(errs.len(), 1, "{errs:#?}");
    }

    #[test]
    fn saturate_is_idempotent() {
        let mut st = InferenceState::new();
        let (a, b) = (st.fresh_var(0), st.fresh_var(0));
        st.add_bound(a, Side::Upper, Type::var(b, l(0).concat(&l(1))), 1);
        saturate(&mut st);
        let once = st.reset_graph();
        assert_eq!(st.bounds(b, Side::Lower).unwrap().len(), 1);
        saturate(&mut st);
        assert_eq!(once, st.reset_graph());
    }

    #[test]
    fn fabricated_link_rejected() {
        let mut st = InferenceState::new();
        let a = st.fresh_var(0);
        sub(&mut st, prim(Prim::Int, 1), Type::var(a, l(0)));
        let good = into_var(&st, a).remove(0);
        assert!(validate_flow(&good, &st));
        let mut bad = good.clone();
        bad.push(Relation::Forward(LinkProv::new(&l(0), &l(7))), prim(Prim::Bool, 7));
        assert!(!validate_flow(&bad, &st));
    }

    #[test]
    fn levels() {
        let t = prim(Prim::Int, 0);
        let fwd = Relation::Forward(LinkProv::new(&l(0), &l(1)));
        let bwd = Relation::Backward(LinkProv::new(&l(0), &l(1)));
        let mut z = DataFlow::single(t.clone());
        z.push(fwd.clone(), t.clone());
        assert_eq!(classify_level(&z), 0);
        z.push(bwd, t.clone());
        assert_eq!(classify_level(&z), 1);
        z.push(fwd, t);
        assert_eq!(classify_level(&z), 2);
    }
}
