//! Provenances, provenance-annotated types, data flows, and the inference state.

use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::source::Location;

/// Type constructors. Every constructor is variant in each argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ctor {
    /// `a -> b`
    Fun,
    /// `a * b * ...` with the given arity (at least 2).
    Tuple(u8),
    /// `(a, b) either`
    Sum,
    /// `a list`
    List,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Ctor {
    pub fn arity(self) -> usize {
        match self {
            Ctor::Fun | Ctor::Sum => 2,
            Ctor::Tuple(n) => n as usize,
            Ctor::List => 1,
        }
    }

    pub fn variance(self, arg: usize) -> Variance {
        match (self, arg) {
            (Ctor::Fun, 0) => Variance::Contravariant,
            _ => Variance::Covariant,
        }
    }

    pub fn pair() -> Ctor {
        Ctor::Tuple(2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prim {
    Unit,
    Int,
    Bool,
    Str,
    Float,
}

impl Prim {
    pub fn name(self) -> &'static str {
        match self {
            Prim::Unit => "unit",
            Prim::Int => "int",
            Prim::Bool => "bool",
            Prim::Str => "string",
            Prim::Float => "float",
        }
    }
}

/// One element of a provenance sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Loc(Location),
    /// A flow carried through argument `arg` of a constructor.
    Ctor { ctor: Ctor, arg: u8, inner: Provenance },
    /// An embedded data flow.
    Flow(Rc<DataFlow>),
}

/// A flattened, epsilon-free sequence of frames; the empty sequence is epsilon.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Provenance(Rc<[Frame]>);

impl Provenance {
    pub fn empty() -> Self {
        Provenance::default()
    }

    pub fn loc(l: Location) -> Self {
        Provenance(Rc::from(vec![Frame::Loc(l)]))
    }

    pub fn from_frames(frames: Vec<Frame>) -> Self {
        Provenance(Rc::from(frames))
    }

    /// Wrap `inner` in a constructor frame. An empty inner provenance still
    /// records that the flow passed through the constructor.
    pub fn ctor(ctor: Ctor, arg: usize, inner: Provenance) -> Self {
        Provenance::from_frames(vec![Frame::Ctor { ctor, arg: arg as u8, inner }])
    }

    pub fn frames(&self) -> &[Frame] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Provenance) -> Provenance {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Provenance(Rc::from(v))
    }

    /// Reverse the frame order, recursively reversing nested provenances.
    pub fn rev(&self) -> Provenance {
        let v: Vec<Frame> = self
            .0
            .iter()
            .rev()
            .map(|f| match f {
                Frame::Loc(l) => Frame::Loc(*l),
                Frame::Ctor { ctor, arg, inner } => Frame::Ctor { ctor: *ctor, arg: *arg, inner: inner.rev() },
                Frame::Flow(z) => Frame::Flow(Rc::new(z.rev())),
            })
            .collect();
        Provenance(Rc::from(v))
    }

    /// Top-level source locations, skipping constructor and flow frames.
    pub fn outer_locations(&self) -> impl Iterator<Item = Location> + '_ {
        self.0.iter().filter_map(|f| match f {
            Frame::Loc(l) => Some(*l),
            _ => None,
        })
    }

    /// Every location, including those nested inside frames, in order.
    pub fn all_locations(&self, out: &mut Vec<Location>) {
        for f in self.0.iter() {
            match f {
                Frame::Loc(l) => out.push(*l),
                Frame::Ctor { inner, .. } => inner.all_locations(out),
                Frame::Flow(z) => z.all_locations(out),
            }
        }
    }
}

impl fmt::Debug for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        for (i, fr) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            match fr {
                Frame::Loc(l) => write!(f, "{l:?}")?,
                Frame::Ctor { ctor, arg, inner } => write!(f, "<{inner:?}>{arg}{ctor:?}")?,
                Frame::Flow(z) => write!(f, "[{z:?}]")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Var(VarId, Provenance),
    Prim(Prim, Provenance),
    Ctor(Ctor, Rc<[Type]>, Provenance),
}

impl Type {
    pub fn var(v: VarId, p: Provenance) -> Type {
        Type::Var(v, p)
    }

    pub fn prim(p: Prim, prov: Provenance) -> Type {
        Type::Prim(p, prov)
    }

    pub fn ctor(c: Ctor, args: Vec<Type>, prov: Provenance) -> Type {
        assert_eq!(args.len(), c.arity(), "arity mismatch for {c:?}");
        Type::Ctor(c, Rc::from(args), prov)
    }

    pub fn fun(arg: Type, res: Type, prov: Provenance) -> Type {
        Type::ctor(Ctor::Fun, vec![arg, res], prov)
    }

    pub fn prov(&self) -> &Provenance {
        match self {
            Type::Var(_, p) | Type::Prim(_, p) | Type::Ctor(_, _, p) => p,
        }
    }

    pub fn with_prov(&self, p: Provenance) -> Type {
        match self {
            Type::Var(v, _) => Type::Var(*v, p),
            Type::Prim(x, _) => Type::Prim(*x, p),
            Type::Ctor(c, a, _) => Type::Ctor(*c, a.clone(), p),
        }
    }

    /// `τ^{p·q}` written `τ^p · q`.
    pub fn append(&self, q: &Provenance) -> Type {
        self.with_prov(self.prov().concat(q))
    }

    /// `τ^{q·p}` written `q · τ^p`.
    pub fn prepend(&self, q: &Provenance) -> Type {
        self.with_prov(q.concat(self.prov()))
    }

    pub fn as_var(&self) -> Option<VarId> {
        match self {
            Type::Var(v, _) => Some(*v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Type::Var(..))
    }

    /// Replace every provenance by epsilon.
    pub fn reset(&self) -> Type {
        match self {
            Type::Var(v, _) => Type::Var(*v, Provenance::empty()),
            Type::Prim(p, _) => Type::Prim(*p, Provenance::empty()),
            Type::Ctor(c, args, _) => {
                Type::Ctor(*c, args.iter().map(Type::reset).collect::<Vec<_>>().into(), Provenance::empty())
            }
        }
    }

    pub fn reset_eq(&self, other: &Type) -> bool {
        match (self, other) {
            (Type::Var(a, _), Type::Var(b, _)) => a == b,
            (Type::Prim(a, _), Type::Prim(b, _)) => a == b,
            (Type::Ctor(c, xs, _), Type::Ctor(d, ys, _)) => {
                c == d && xs.iter().zip(ys.iter()).all(|(x, y)| x.reset_eq(y))
            }
            _ => false,
        }
    }

    /// Head symbol, ignoring arguments and provenance.
    pub fn head(&self) -> Head {
        match self {
            Type::Var(v, _) => Head::Var(*v),
            Type::Prim(p, _) => Head::Prim(*p),
            Type::Ctor(c, _, _) => Head::Ctor(*c),
        }
    }

    pub fn free_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Type::Var(v, _) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Type::Prim(..) => {}
            Type::Ctor(_, args, _) => args.iter().for_each(|a| a.free_vars(out)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Var(VarId),
    Prim(Prim),
    Ctor(Ctor),
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sup = |f: &mut fmt::Formatter<'_>, p: &Provenance| {
            if p.is_empty() {
                Ok(())
            } else {
                write!(f, "^{{{p:?}}}")
            }
        };
        match self {
            Type::Var(v, p) => {
                write!(f, "α{}", v.0)?;
                sup(f, p)
            }
            Type::Prim(x, p) => {
                write!(f, "{}", x.name())?;
                sup(f, p)
            }
            Type::Ctor(c, args, p) => {
                write!(f, "{c:?}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a:?}")?;
                }
                write!(f, ")")?;
                sup(f, p)
            }
        }
    }
}

/// `lhs <: rhs`: a value of type `lhs` flows into a context expecting `rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub lhs: Type,
    pub rhs: Type,
}

impl Constraint {
    pub fn new(lhs: Type, rhs: Type) -> Self {
        Constraint { lhs, rhs }
    }

    pub fn reset(&self) -> (Type, Type) {
        (self.lhs.reset(), self.rhs.reset())
    }
}

/// Provenance of one directed link. The first `split` frames describe the
/// left endpoint's side of the flow, the rest the right endpoint's side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkProv {
    pub prov: Provenance,
    pub split: usize,
}

impl LinkProv {
    pub fn new(left: &Provenance, right: &Provenance) -> Self {
        LinkProv { prov: left.concat(right), split: left.len() }
    }

    pub fn left(&self) -> &[Frame] {
        &self.prov.frames()[..self.split]
    }

    pub fn right(&self) -> &[Frame] {
        &self.prov.frames()[self.split..]
    }

    pub fn rev(&self) -> LinkProv {
        LinkProv { prov: self.prov.rev(), split: self.prov.len() - self.split }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `τ <:ᵖ τ'`
    Forward(LinkProv),
    /// `τ :>ᵖ τ'`, valid when `τ' <:^{rev p} τ` is recorded.
    Backward(LinkProv),
    /// `τ ∼⟨Z⟩ τ'`: argument `arg` of the constructor types ending `inner`.
    Ctor { ctor: Ctor, arg: u8, inner: Rc<DataFlow> },
}

impl Relation {
    pub fn is_directed(&self) -> bool {
        !matches!(self, Relation::Ctor { .. })
    }

    fn rev(&self) -> Relation {
        match self {
            Relation::Forward(p) => Relation::Backward(p.rev()),
            Relation::Backward(p) => Relation::Forward(p.rev()),
            Relation::Ctor { ctor, arg, inner } => Relation::Ctor { ctor: *ctor, arg: *arg, inner: Rc::new(inner.rev()) },
        }
    }
}

/// A chain `τ0 • τ1 • ... • τn`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DataFlow {
    pub start: Type,
    pub links: Vec<(Relation, Type)>,
}

impl DataFlow {
    pub fn single(start: Type) -> Self {
        DataFlow { start, links: Vec::new() }
    }

    pub fn first(&self) -> &Type {
        &self.start
    }

    pub fn last(&self) -> &Type {
        self.links.last().map_or(&self.start, |(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn types(&self) -> impl Iterator<Item = &Type> {
        std::iter::once(&self.start).chain(self.links.iter().map(|(_, t)| t))
    }

    pub fn push(&mut self, rel: Relation, t: Type) {
        self.links.push((rel, t));
    }

    /// Add a link in front: `t • self`.
    pub fn push_front(&mut self, t: Type, rel: Relation) {
        let old = std::mem::replace(&mut self.start, t);
        self.links.insert(0, (rel, old));
    }

    /// The same flow read from the other end.
    pub fn rev(&self) -> DataFlow {
        let types: Vec<&Type> = self.types().collect();
        let mut out = DataFlow::single(types[types.len() - 1].clone());
        for i in (0..self.links.len()).rev() {
            out.push(self.links[i].0.rev(), types[i].clone());
        }
        out
    }

    pub fn all_locations(&self, out: &mut Vec<Location>) {
        for t in self.types() {
            t.prov().all_locations(out);
        }
        for (r, _) in &self.links {
            match r {
                Relation::Forward(p) | Relation::Backward(p) => p.prov.all_locations(out),
                Relation::Ctor { inner, .. } => inner.all_locations(out),
            }
        }
    }
}

impl fmt::Debug for DataFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.start.reset())?;
        for (r, t) in &self.links {
            match r {
                Relation::Forward(_) => write!(f, " <: ")?,
                Relation::Backward(_) => write!(f, " :> ")?,
                Relation::Ctor { ctor, arg, inner } => write!(f, " ~<{inner:?}>{arg}{ctor:?} ")?,
            }
            write!(f, "{:?}", t.reset())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// One stored bound. For an upper bound `α <: τ` the entry's type is `τ` with
/// the full constraint provenance; `split` marks where `α`'s part ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bound {
    pub ty: Type,
    pub split: usize,
}

impl Bound {
    pub fn link(&self) -> LinkProv {
        LinkProv { prov: self.ty.prov().clone(), split: self.split }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VarInfo {
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
    pub level: u32,
}

/// A type collision recorded while solving (`err p`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveError {
    pub lhs: Type,
    pub rhs: Type,
    pub link: LinkProv,
    /// Whether the collision was reached through a type variable's bounds.
    pub via_var: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("unknown type variable α{0}")]
    UnknownVar(u32),
}

#[derive(Clone, Debug, Default)]
pub struct InferenceState {
    vars: Vec<VarInfo>,
    pub errors: Vec<SolveError>,
    /// When set, every provenance created by inference is epsilon.
    pub erase_provenance: bool,
}

impl InferenceState {
    pub fn new() -> Self {
        InferenceState::default()
    }

    pub fn fresh_var(&mut self, level: u32) -> VarId {
        let id = VarId(self.vars.len() as u32);
        self.vars.push(VarInfo { level, ..VarInfo::default() });
        id
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len() as u32).map(VarId)
    }

    pub fn info(&self, v: VarId) -> Result<&VarInfo, StateError> {
        self.vars.get(v.0 as usize).ok_or(StateError::UnknownVar(v.0))
    }

    fn info_mut(&mut self, v: VarId) -> &mut VarInfo {
        &mut self.vars[v.0 as usize]
    }

    pub fn level(&self, v: VarId) -> u32 {
        self.vars[v.0 as usize].level
    }

    pub fn set_level(&mut self, v: VarId, level: u32) {
        self.info_mut(v).level = level;
    }

    pub fn bounds(&self, v: VarId, side: Side) -> Result<&[Bound], StateError> {
        let info = self.info(v)?;
        Ok(match side {
            Side::Lower => &info.lower,
            Side::Upper => &info.upper,
        })
    }

    /// Append `t` (whose provenance already includes the variable side) to a
    /// bound list. Returns false when a reset-equal bound was already present.
    pub fn add_bound(&mut self, v: VarId, side: Side, t: Type, split: usize) -> bool {
        let info = self.info_mut(v);
        let list = match side {
            Side::Lower => &mut info.lower,
            Side::Upper => &mut info.upper,
        };
        if list.iter().any(|b| b.ty.reset_eq(&t)) {
            return false;
        }
        list.push(Bound { ty: t, split });
        true
    }

    /// Whether `lhs <:^{prov} rhs` is recorded as a bound.
    pub fn has_constraint(&self, lhs: &Type, rhs: &Type, link: &LinkProv) -> bool {
        let matches = |b: &Bound, other: &Type| {
            b.ty.reset_eq(other) && b.ty.prov() == &link.prov && b.split == link.split
        };
        if let Some(v) = lhs.as_var() {
            if let Ok(ub) = self.bounds(v, Side::Upper) {
                if ub.iter().any(|b| matches(b, rhs)) {
                    return true;
                }
            }
        }
        if let Some(v) = rhs.as_var() {
            if let Ok(lb) = self.bounds(v, Side::Lower) {
                if lb.iter().any(|b| matches(b, lhs)) {
                    return true;
                }
            }
        }
        false
    }

    /// The bound graph with all provenances erased, in insertion order.
    pub fn reset_graph(&self) -> Vec<(Vec<Type>, Vec<Type>, u32)> {
        self.vars
            .iter()
            .map(|i| {
                (
                    i.lower.iter().map(|b| b.ty.reset()).collect(),
                    i.upper.iter().map(|b| b.ty.reset()).collect(),
                    i.level,
                )
            })
            .collect()
    }

    pub fn prov(&self, l: Location) -> Provenance {
        if self.erase_provenance {
            Provenance::empty()
        } else {
            Provenance::loc(l)
        }
    }
}

/// Level of a type: primitives are 0, constructors the max over arguments.
pub fn lvl(t: &Type, state: &InferenceState) -> Result<u32, StateError> {
    Ok(match t {
        Type::Var(v, _) => state.info(*v)?.level,
        Type::Prim(..) => 0,
        Type::Ctor(_, args, _) => {
            let mut m = 0;
            for a in args.iter() {
                m = m.max(lvl(a, state)?);
            }
            m
        }
    })
}

/// Provenance-erased constraints already under consideration.
#[derive(Clone, Debug, Default)]
pub struct Hypotheses(HashSet<(Type, Type)>);

impl Hypotheses {
    pub fn new() -> Self {
        Hypotheses::default()
    }

    pub fn contains(&self, lhs: &Type, rhs: &Type) -> bool {
        self.0.contains(&(lhs.reset(), rhs.reset()))
    }

    pub fn contains_either(&self, a: &Type, b: &Type) -> bool {
        let (a, b) = (a.reset(), b.reset());
        self.0.contains(&(a.clone(), b.clone())) || self.0.contains(&(b, a))
    }

    pub fn insert(&mut self, lhs: &Type, rhs: &Type) {
        self.0.insert((lhs.reset(), rhs.reset()));
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Variable renaming used for instantiation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(pub Vec<(VarId, VarId)>);

impl Substitution {
    pub fn get(&self, v: VarId) -> Option<VarId> {
        self.0.iter().find(|(a, _)| *a == v).map(|(_, b)| *b)
    }

    pub fn insert(&mut self, from: VarId, to: VarId) {
        self.0.push((from, to));
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rename domain variables inside `t`, keeping provenances.
    pub fn apply(&self, t: &Type) -> Type {
        match t {
            Type::Var(v, p) => Type::Var(self.get(*v).unwrap_or(*v), p.clone()),
            Type::Prim(..) => t.clone(),
            Type::Ctor(c, args, p) => {
                Type::Ctor(*c, args.iter().map(|a| self.apply(a)).collect::<Vec<_>>().into(), p.clone())
            }
        }
    }
}

/// A context entry: monomorphic variable or type generalized above a level.
#[derive(Clone, Debug)]
pub enum Scheme {
    Mono(Type),
    Poly(u32, Type),
}

#[derive(Clone, Debug, Default)]
pub struct Context(Vec<(String, Scheme)>);

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn push(&mut self, name: impl Into<String>, s: Scheme) {
        self.0.push((name.into(), s));
    }

    pub fn pop(&mut self) {
        self.0.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&Scheme> {
        self.0.iter().rev().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn truncate(&mut self, n: usize) {
        self.0.truncate(n)
    }
}
