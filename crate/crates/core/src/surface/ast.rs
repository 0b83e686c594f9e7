use crate::source::Location;

/// A binding occurrence with its own location.
#[derive(Clone, Debug, PartialEq)]
pub struct Binder {
    pub name: String,
    pub loc: Location,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub kind: TermKind,
    pub loc: Location,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TermKind {
    Var(String),
    Unit,
    Int(i64),
    Bool(bool),
    /// Original literal text, e.g. `1.5`.
    Float(String),
    Str(String),
    /// Primitive integer addition with its own typing rule.
    Plus(Box<Term>, Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    Lam(Binder, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// Tuple of two or more components.
    Tuple(Vec<Term>),
    /// Component `index` (0-based) of an `arity`-tuple.
    Proj { index: u8, arity: u8, tuple: Box<Term> },
    /// `Left e` (`right == false`) or `Right e`.
    Inj { right: bool, value: Box<Term> },
    Case { scrutinee: Box<Term>, left: (Binder, Box<Term>), right: (Binder, Box<Term>) },
    /// `match e with [] -> nil | h :: t -> cons`.
    ListCase { scrutinee: Box<Term>, nil: Box<Term>, head: Binder, tail: Binder, cons: Box<Term> },
    Let { rec: bool, binder: Binder, value: Box<Term>, body: Box<Term> },
}

impl Term {
    pub fn new(kind: TermKind, loc: Location) -> Self {
        Term { kind, loc }
    }

    /// Direct subterms in evaluation order.
    pub fn children(&self) -> Vec<&Term> {
        use TermKind::*;
        match &self.kind {
            Var(_) | Unit | Int(_) | Bool(_) | Float(_) | Str(_) => vec![],
            Plus(a, b) | App(a, b) => vec![a, b],
            If(a, b, c) => vec![a, b, c],
            Lam(_, b) => vec![b],
            Tuple(xs) => xs.iter().collect(),
            Proj { tuple, .. } => vec![tuple],
            Inj { value, .. } => vec![value],
            Case { scrutinee, left, right } => vec![scrutinee, &left.1, &right.1],
            ListCase { scrutinee, nil, cons, .. } => vec![scrutinee, nil, cons],
            Let { value, body, .. } => vec![value, body],
        }
    }

    /// Structural equality ignoring every location.
    pub fn same_shape(&self, other: &Term) -> bool {
        use TermKind::*;
        let b = |x: &Binder, y: &Binder| x.name == y.name;
        let ok = match (&self.kind, &other.kind) {
            (Var(a), Var(b)) => a == b,
            (Unit, Unit) => true,
            (Int(a), Int(b)) => a == b,
            (Bool(a), Bool(b)) => a == b,
            (Float(a), Float(b)) => a == b,
            (Str(a), Str(b)) => a == b,
            (Plus(..), Plus(..)) | (If(..), If(..)) | (App(..), App(..)) => true,
            (Lam(x, _), Lam(y, _)) => b(x, y),
            (Tuple(xs), Tuple(ys)) => xs.len() == ys.len(),
            (Proj { index: i, arity: n, .. }, Proj { index: j, arity: m, .. }) => i == j && n == m,
            (Inj { right: r1, .. }, Inj { right: r2, .. }) => r1 == r2,
            (Case { left: l1, right: r1, .. }, Case { left: l2, right: r2, .. }) => b(&l1.0, &l2.0) && b(&r1.0, &r2.0),
            (ListCase { head: h1, tail: t1, .. }, ListCase { head: h2, tail: t2, .. }) => b(h1, h2) && b(t1, t2),
            (Let { rec: r1, binder: x, .. }, Let { rec: r2, binder: y, .. }) => r1 == r2 && b(x, y),
            _ => false,
        };
        ok && {
            let (xs, ys) = (self.children(), other.children());
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.same_shape(y))
        }
    }
}

/// A type written in a `val` declaration.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeExpr {
    pub kind: TypeExprKind,
    pub loc: Location,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeExprKind {
    /// `int`, `bool`, `string`, `float`, `unit`.
    Named(String),
    Var(String),
    Fun(Box<TypeExpr>, Box<TypeExpr>),
    Tuple(Vec<TypeExpr>),
    List(Box<TypeExpr>),
    Either(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn same_shape(&self, other: &TypeExpr) -> bool {
        use TypeExprKind::*;
        match (&self.kind, &other.kind) {
            (Named(a), Named(b)) | (Var(a), Var(b)) => a == b,
            (Fun(a, b), Fun(c, d)) | (Either(a, b), Either(c, d)) => a.same_shape(c) && b.same_shape(d),
            (Tuple(xs), Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.same_shape(y)),
            (List(a), List(b)) => a.same_shape(b),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Val { name: Binder, ty: TypeExpr, loc: Location },
    Let { rec: bool, binder: Binder, value: Term, loc: Location },
}

impl Item {
    pub fn same_shape(&self, other: &Item) -> bool {
        match (self, other) {
            (Item::Val { name: a, ty: s, .. }, Item::Val { name: b, ty: t, .. }) => a.name == b.name && s.same_shape(t),
            (Item::Let { rec: r1, binder: a, value: v, .. }, Item::Let { rec: r2, binder: b, value: w, .. }) => {
                r1 == r2 && a.name == b.name && v.same_shape(w)
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub items: Vec<Item>,
}

impl Program {
    pub fn same_shape(&self, other: &Program) -> bool {
        self.items.len() == other.items.len() && self.items.iter().zip(&other.items).all(|(a, b)| a.same_shape(b))
    }

    pub fn extend(&mut self, other: Program) {
        self.items.extend(other.items);
    }
}
