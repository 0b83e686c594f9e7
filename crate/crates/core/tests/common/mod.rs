#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hmloc::driver::{check_sources, render, Checked, Format, RunConfig};
use hmloc::prelude::DEFAULT_PRELUDE;
use hmloc::report::Mode;
use hmloc::source::{FileId, Location};
use hmloc::surface::{Binder, Term, TermKind};
use hmloc::types::{Ctor, InferenceState, Prim, Provenance, Side, Type, VarId};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// `(name, source)` for every corpus program, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "src").then(|| {
                let name = p.file_stem().unwrap().to_string_lossy().into_owned();
                (name, std::fs::read_to_string(&p).unwrap())
            })
        })
        .collect();
    out.sort();
    out
}

pub fn check_named(name: &str, src: &str, erase: bool) -> Checked {
    let file = format!("corpus/{name}.src");
    check_sources(DEFAULT_PRELUDE, &[(file, src.to_string())], erase).unwrap_or_else(|(e, _)| panic!("{name}: {e}"))
}

pub fn check(src: &str) -> Checked {
    check_sources(DEFAULT_PRELUDE, &[("t.ml".into(), src.into())], false).unwrap_or_else(|(e, _)| panic!("{e}"))
}

pub fn render_as(c: &Checked, mode: Mode, format: Format) -> String {
    let cfg = RunConfig { inputs: vec![], prelude: None, mode, format, color: false, max_errors: None };
    render(c, &cfg)
}

/// Expected first headline of each corpus program.
pub const HEADLINES: &[(&str, &str, &str)] = &[
    ("intro", "float", "string"),
    ("linalg", "float", "int"),
    ("level0", "int", "bool"),
    ("confluence", "int", "string"),
    ("divergence", "int", "bool"),
    ("level2", "bool", "int"),
    ("extrusion", "string", "int"),
    ("easy1", "string", "int"),
    ("easy2", "string", "int"),
    ("easy3", "(_, _) either", "string"),
    ("medium1", "int", "_ -> _ list -> _ list"),
    ("medium4", "_ * _ * _", "_ -> _"),
    ("hard3", "_ list", "_ * _"),
];

// ---------------------------------------------------------------------------
// Random closed terms over unit, int, bool, variables, functions,
// application, conditionals, pairs, projections, injections, case and `#+`.

pub struct TermGen {
    rng: ChaCha8Rng,
    next_loc: usize,
    next_name: usize,
}

impl TermGen {
    pub fn new(seed: u64) -> Self {
        TermGen { rng: ChaCha8Rng::seed_from_u64(seed), next_loc: 0, next_name: 0 }
    }

    fn loc(&mut self) -> Location {
        self.next_loc += 1;
        Location::new(FileId(0), self.next_loc, self.next_loc + 1)
    }

    fn binder(&mut self) -> Binder {
        self.next_name += 1;
        Binder { name: format!("x{}", self.next_name), loc: self.loc() }
    }

    fn leaf(&mut self, scope: &[String]) -> TermKind {
        match self.rng.gen_range(0..6) {
            0 => TermKind::Unit,
            1 => TermKind::Int(self.rng.gen_range(0..10)),
            2 => TermKind::Bool(self.rng.gen()),
            _ if !scope.is_empty() => TermKind::Var(scope[self.rng.gen_range(0..scope.len())].clone()),
            _ => TermKind::Int(1),
        }
    }

    pub fn term(&mut self, depth: usize, scope: &mut Vec<String>) -> Term {
        let kind = if depth <= 1 || self.rng.gen_range(0..5) == 0 {
            self.leaf(scope)
        } else {
            let d = depth - 1;
            let sub = |g: &mut Self, scope: &mut Vec<String>| Box::new(g.term(d, scope));
            match self.rng.gen_range(0..9) {
                0 => {
                    let x = self.binder();
                    scope.push(x.name.clone());
                    let body = sub(self, scope);
                    scope.pop();
                    TermKind::Lam(x, body)
                }
                1 | 2 => TermKind::App(sub(self, scope), sub(self, scope)),
                3 => TermKind::If(sub(self, scope), sub(self, scope), sub(self, scope)),
                4 => TermKind::Tuple(vec![*sub(self, scope), *sub(self, scope)]),
                5 => TermKind::Proj { index: self.rng.gen_range(0..2), arity: 2, tuple: sub(self, scope) },
                6 => TermKind::Inj { right: self.rng.gen(), value: sub(self, scope) },
                7 => {
                    let s = sub(self, scope);
                    let x = self.binder();
                    scope.push(x.name.clone());
                    let l = sub(self, scope);
                    scope.pop();
                    let y = self.binder();
                    scope.push(y.name.clone());
                    let r = sub(self, scope);
                    scope.pop();
                    TermKind::Case { scrutinee: s, left: (x, l), right: (y, r) }
                }
                _ => TermKind::Plus(sub(self, scope), sub(self, scope)),
            }
        };
        Term::new(kind, self.loc())
    }
}

pub fn depth(t: &Term) -> usize {
    1 + t.children().iter().map(|c| depth(c)).max().unwrap_or(0)
}

// ---------------------------------------------------------------------------
// Equality unifier: union-find over a node arena, no occurs check, nodes are
// linked before their arguments are unified.

#[derive(Clone)]
enum Node {
    Var,
    Con(&'static str, Vec<usize>),
}

#[derive(Default)]
pub struct Equational {
    nodes: Vec<Node>,
    parent: Vec<usize>,
}

impl Equational {
    fn fresh(&mut self) -> usize {
        self.con_or_var(Node::Var)
    }

    fn con(&mut self, head: &'static str, args: Vec<usize>) -> usize {
        self.con_or_var(Node::Con(head, args))
    }

    fn con_or_var(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn unify(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return true;
        }
        match (self.nodes[a].clone(), self.nodes[b].clone()) {
            (Node::Var, _) => {
                self.parent[a] = b;
                true
            }
            (_, Node::Var) => {
                self.parent[b] = a;
                true
            }
            (Node::Con(h1, xs), Node::Con(h2, ys)) => {
                if h1 != h2 || xs.len() != ys.len() {
                    return false;
                }
                self.parent[a] = b;
                xs.into_iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
        }
    }

    fn infer(&mut self, t: &Term, env: &mut Vec<(String, usize)>) -> Option<usize> {
        Some(match &t.kind {
            TermKind::Unit => self.con("unit", vec![]),
            TermKind::Int(_) => self.con("int", vec![]),
            TermKind::Bool(_) => self.con("bool", vec![]),
            TermKind::Var(x) => env.iter().rev().find(|(n, _)| n == x)?.1,
            TermKind::Lam(x, body) => {
                let a = self.fresh();
                env.push((x.name.clone(), a));
                let r = self.infer(body, env);
                env.pop();
                self.con("->", vec![a, r?])
            }
            TermKind::App(f, a) => {
                let (tf, ta) = (self.infer(f, env)?, self.infer(a, env)?);
                let r = self.fresh();
                let want = self.con("->", vec![ta, r]);
                self.unify(tf, want).then_some(r)?
            }
            TermKind::If(c, a, b) => {
                let (tc, ta, tb) = (self.infer(c, env)?, self.infer(a, env)?, self.infer(b, env)?);
                let bool_ = self.con("bool", vec![]);
                (self.unify(tc, bool_) && self.unify(ta, tb)).then_some(ta)?
            }
            TermKind::Tuple(xs) => {
                let ts = xs.iter().map(|x| self.infer(x, env)).collect::<Option<Vec<_>>>()?;
                self.con("*", ts)
            }
            TermKind::Proj { index, arity, tuple } => {
                let t = self.infer(tuple, env)?;
                let parts: Vec<usize> = (0..*arity).map(|_| self.fresh()).collect();
                let want = self.con("*", parts.clone());
                self.unify(t, want).then_some(parts[*index as usize])?
            }
            TermKind::Inj { right, value } => {
                let t = self.infer(value, env)?;
                let other = self.fresh();
                let args = if *right { vec![other, t] } else { vec![t, other] };
                self.con("either", args)
            }
            TermKind::Case { scrutinee, left, right } => {
                let t0 = self.infer(scrutinee, env)?;
                let (a, b) = (self.fresh(), self.fresh());
                let want = self.con("either", vec![a, b]);
                if !self.unify(t0, want) {
                    return None;
                }
                env.push((left.0.name.clone(), a));
                let t1 = self.infer(&left.1, env);
                env.pop();
                env.push((right.0.name.clone(), b));
                let t2 = self.infer(&right.1, env);
                env.pop();
                let (t1, t2) = (t1?, t2?);
                self.unify(t1, t2).then_some(t1)?
            }
            TermKind::Plus(a, b) => {
                let (ta, tb) = (self.infer(a, env)?, self.infer(b, env)?);
                let int = self.con("int", vec![]);
                (self.unify(ta, int) && self.unify(tb, int)).then_some(int)?
            }
            _ => panic!("unsupported form"),
        })
    }
}

/// Whether plain equality unification accepts the closed term `t`.
pub fn hm_accepts(t: &Term) -> bool {
    Equational::default().infer(t, &mut Vec::new()).is_some()
}

// ---------------------------------------------------------------------------
// Random bound graphs and exhaustive shortest paths.

pub struct BoundGraph {
    pub state: InferenceState,
    /// Origin location of each concrete bound: its variable and type.
    pub concrete: HashMap<Location, (VarId, Prim)>,
}

pub fn random_bound_graph(seed: u64) -> BoundGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = InferenceState::new();
    let n = rng.gen_range(1..=8);
    let vars: Vec<VarId> = (0..n).map(|_| state.fresh_var(0)).collect();
    let mut concrete = HashMap::new();
    let mut next = 0;
    for &v in &vars {
        for _ in 0..rng.gen_range(0..=3) {
            let side = if rng.gen() { Side::Lower } else { Side::Upper };
            if rng.gen_bool(0.4) {
                let p = [Prim::Int, Prim::Bool, Prim::Str][rng.gen_range(0..3)];
                next += 1;
                let l = Location::new(FileId(0), next, next + 1);
                let split = if side == Side::Lower { 1 } else { 0 };
                if state.add_bound(v, side, Type::prim(p, Provenance::loc(l)), split) {
                    concrete.insert(l, (v, p));
                }
            } else {
                let w = vars[rng.gen_range(0..n)];
                if w != v {
                    state.add_bound(v, side, Type::var(w, Provenance::empty()), 0);
                }
            }
        }
    }
    BoundGraph { state, concrete }
}

/// Length of the shortest flow between the concrete bounds at `a` and `b`,
/// found by enumerating every simple path through variables.
pub fn exhaustive_min(g: &BoundGraph, a: Location, b: Location) -> Option<usize> {
    let mut adj: HashMap<VarId, HashSet<VarId>> = HashMap::new();
    for v in g.state.var_ids() {
        for side in [Side::Lower, Side::Upper] {
            for bd in g.state.bounds(v, side).unwrap() {
                if let Some(w) = bd.ty.as_var() {
                    adj.entry(v).or_default().insert(w);
                    adj.entry(w).or_default().insert(v);
                }
            }
        }
    }
    let (from, to) = (g.concrete[&a].0, g.concrete[&b].0);
    fn walk(v: VarId, to: VarId, adj: &HashMap<VarId, HashSet<VarId>>, seen: &mut Vec<VarId>, best: &mut Option<usize>) {
        if v == to {
            let len = seen.len() - 1;
            *best = Some(best.map_or(len, |b| b.min(len)));
            return;
        }
        for &w in adj.get(&v).into_iter().flatten() {
            if !seen.contains(&w) {
                seen.push(w);
                walk(w, to, adj, seen, best);
                seen.pop();
            }
        }
    }
    let mut best = None;
    walk(from, to, &adj, &mut vec![from], &mut best);
    best.map(|d| d + 2)
}

// ---------------------------------------------------------------------------
// Random provenances.

pub fn random_prov(rng: &mut ChaCha8Rng, depth: usize) -> Provenance {
    let mut frames = Vec::new();
    for _ in 0..rng.gen_range(0..4) {
        if depth > 0 && rng.gen_bool(0.3) {
            let ctor = [Ctor::Fun, Ctor::pair(), Ctor::Sum, Ctor::List][rng.gen_range(0..4)];
            let arg = rng.gen_range(0..ctor.arity());
            frames.push(Provenance::ctor(ctor, arg, random_prov(rng, depth - 1)));
        } else {
            let s = rng.gen_range(0..50);
            frames.push(Provenance::loc(Location::new(FileId(0), s, s + 1)));
        }
    }
    frames.iter().fold(Provenance::empty(), |acc, p| acc.concat(p))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
