//! Algorithmic type inference with let-polymorphism.

use std::collections::HashMap;

use thiserror::Error;

use crate::solve::constrain;
use crate::source::Location;
use crate::surface::{Item, Program, Term, TermKind, TypeExpr, TypeExprKind};
use crate::types::{
    Constraint, Context, Ctor, InferenceState, Prim, Provenance, Scheme, Side, Substitution, Type, VarId,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("unbound variable `{name}`")]
pub struct ScopeError {
    pub name: String,
    pub loc: Location,
}

fn cons(state: &mut InferenceState, lhs: Type, rhs: Type) {
    constrain(state, Constraint::new(lhs, rhs));
}

fn fresh(state: &mut InferenceState, level: u32, p: Provenance) -> Type {
    let v = state.fresh_var(level);
    Type::var(v, p)
}

/// Infer the type of `e` at polymorphism level `level`.
pub fn infer_type(state: &mut InferenceState, level: u32, ctx: &mut Context, e: &Term) -> Result<Type, ScopeError> {
    let here = state.prov(e.loc);
    Ok(match &e.kind {
        TermKind::Unit => Type::prim(Prim::Unit, here),
        TermKind::Int(_) => Type::prim(Prim::Int, here),
        TermKind::Bool(_) => Type::prim(Prim::Bool, here),
        TermKind::Float(_) => Type::prim(Prim::Float, here),
        TermKind::Str(_) => Type::prim(Prim::Str, here),
        TermKind::Var(x) => {
            let scheme = ctx
                .lookup(x)
                .cloned()
                .ok_or_else(|| ScopeError { name: x.clone(), loc: e.loc })?;
            match scheme {
                Scheme::Mono(t) => t.append(&here),
                Scheme::Poly(j, t) => {
                    let mut s = Substitution::default();
                    let t2 = freshen(&t, &mut s, j, level, state);
                    ty_subst(&s, state);
                    t2.append(&here)
                }
            }
        }
        TermKind::Plus(a, b) => {
            let ta = infer_type(state, level, ctx, a)?;
            cons(state, ta, Type::prim(Prim::Int, here.clone()));
            let tb = infer_type(state, level, ctx, b)?;
            cons(state, tb, Type::prim(Prim::Int, here.clone()));
            Type::prim(Prim::Int, here)
        }
        TermKind::Lam(x, body) => {
            let a = fresh(state, level, state.prov(x.loc));
            ctx.push(x.name.clone(), Scheme::Mono(a.clone()));
            let tb = infer_type(state, level, ctx, body);
            ctx.pop();
            Type::fun(a, tb?, here)
        }
        TermKind::App(f, arg) => {
            let tf = infer_type(state, level, ctx, f)?;
            let ta = infer_type(state, level, ctx, arg)?;
            let r = fresh(state, level, here);
            cons(state, tf, Type::fun(ta, r.clone(), Provenance::empty()));
            r
        }
        TermKind::If(c, a, b) => {
            let r = fresh(state, level, here.clone());
            let tc = infer_type(state, level, ctx, c)?;
            let ta = infer_type(state, level, ctx, a)?;
            let tb = infer_type(state, level, ctx, b)?;
            cons(state, tc, Type::prim(Prim::Bool, state.prov(c.loc)));
            cons(state, ta, r.clone());
            cons(state, tb, r.clone());
            r
        }
        TermKind::Tuple(xs) => {
            let mut ts = Vec::with_capacity(xs.len());
            for x in xs {
                ts.push(infer_type(state, level, ctx, x)?);
            }
            Type::ctor(Ctor::Tuple(ts.len() as u8), ts, here)
        }
        TermKind::Proj { index, arity, tuple } => {
            let t = infer_type(state, level, ctx, tuple)?;
            let parts: Vec<Type> = (0..*arity).map(|_| fresh(state, level, here.clone())).collect();
            let result = parts[*index as usize].clone();
            cons(state, t, Type::ctor(Ctor::Tuple(*arity), parts, here));
            result
        }
        TermKind::Inj { right, value } => {
            let t = infer_type(state, level, ctx, value)?;
            let other = fresh(state, level, here.clone());
            let args = if *right { vec![other, t] } else { vec![t, other] };
            Type::ctor(Ctor::Sum, args, here)
        }
        TermKind::Case { scrutinee, left, right } => {
            let a = fresh(state, level, state.prov(left.0.loc));
            let b = fresh(state, level, state.prov(right.0.loc));
            let r = fresh(state, level, here.clone());
            let t0 = infer_type(state, level, ctx, scrutinee)?;
            ctx.push(left.0.name.clone(), Scheme::Mono(a.clone()));
            let t1 = infer_type(state, level, ctx, &left.1);
            ctx.pop();
            let t1 = t1?;
            ctx.push(right.0.name.clone(), Scheme::Mono(b.clone()));
            let t2 = infer_type(state, level, ctx, &right.1);
            ctx.pop();
            let t2 = t2?;
            cons(state, t0, Type::ctor(Ctor::Sum, vec![a, b], here));
            cons(state, t1, r.clone());
            cons(state, t2, r.clone());
            r
        }
        TermKind::ListCase { scrutinee, nil, head, tail, cons: body } => {
            let h = fresh(state, level, state.prov(head.loc));
            let tl = fresh(state, level, state.prov(tail.loc));
            let r = fresh(state, level, here.clone());
            let t0 = infer_type(state, level, ctx, scrutinee)?;
            let t1 = infer_type(state, level, ctx, nil)?;
            ctx.push(head.name.clone(), Scheme::Mono(h.clone()));
            ctx.push(tail.name.clone(), Scheme::Mono(tl.clone()));
            let t2 = infer_type(state, level, ctx, body);
            ctx.pop();
            ctx.pop();
            let t2 = t2?;
            cons(state, t0.clone(), Type::ctor(Ctor::List, vec![h], here));
            cons(state, t0, tl);
            cons(state, t1, r.clone());
            cons(state, t2, r.clone());
            r
        }
        TermKind::Let { rec, binder, value, body } => {
            let n = ctx.len();
            bind_let(state, level, ctx, *rec, &binder.name, binder.loc, value)?;
            let t = infer_type(state, level, ctx, body);
            ctx.truncate(n);
            t?
        }
    })
}

/// Type `value` one level deeper and bind `name` as a polymorphic scheme.
/// The body of the `let` is checked in the state produced by the value.
fn bind_let(
    state: &mut InferenceState,
    level: u32,
    ctx: &mut Context,
    rec: bool,
    name: &str,
    loc: Location,
    value: &Term,
) -> Result<(), ScopeError> {
    if rec {
        let a = fresh(state, level + 1, Provenance::empty());
        ctx.push(name, Scheme::Mono(a.clone()));
        let t = infer_type(state, level + 1, ctx, value);
        ctx.pop();
        let target = a.with_prov(state.prov(loc));
        cons(state, t?, target);
        ctx.push(name, Scheme::Poly(level, a));
    } else {
        let t = infer_type(state, level + 1, ctx, value)?;
        ctx.push(name, Scheme::Poly(level, t));
    }
    Ok(())
}

/// Replace every variable above `level` by a fresh one at `at`, also
/// covering variables reachable only through bounds. Provenances are kept.
pub fn freshen(t: &Type, s: &mut Substitution, level: u32, at: u32, state: &mut InferenceState) -> Type {
    match t {
        Type::Var(v, p) => {
            if let Some(b) = s.get(*v) {
                return Type::Var(b, p.clone());
            }
            if state.level(*v) <= level {
                return t.clone();
            }
            let b = state.fresh_var(at);
            s.insert(*v, b);
            for side in [Side::Lower, Side::Upper] {
                let bounds: Vec<Type> = state.bounds(*v, side).map(|bs| bs.iter().map(|b| b.ty.clone()).collect()).unwrap_or_default();
                for bt in bounds {
                    freshen(&bt, s, level, at, state);
                }
            }
            Type::Var(b, p.clone())
        }
        Type::Prim(..) => t.clone(),
        Type::Ctor(c, args, p) => {
            let args: Vec<Type> = args.iter().map(|a| freshen(a, s, level, at, state)).collect();
            Type::ctor(*c, args, p.clone())
        }
    }
}

/// Copy the bounds of every variable in the domain of `s` onto its image,
/// renaming through `s`, by issuing the copied constraints.
pub fn ty_subst(s: &Substitution, state: &mut InferenceState) {
    let mut todo: Vec<(Type, Type)> = Vec::new();
    for &(from, to) in &s.0 {
        let (lower, upper) = match state.info(from) {
            Ok(i) => (i.lower.clone(), i.upper.clone()),
            Err(_) => continue,
        };
        for b in upper {
            let link = b.link();
            let lhs = Type::var(to, Provenance::from_frames(link.left().to_vec()));
            let rhs = s.apply(&b.ty).with_prov(Provenance::from_frames(link.right().to_vec()));
            todo.push((lhs, rhs));
        }
        for b in lower {
            let link = b.link();
            let lhs = s.apply(&b.ty).with_prov(Provenance::from_frames(link.left().to_vec()));
            let rhs = Type::var(to, Provenance::from_frames(link.right().to_vec()));
            todo.push((lhs, rhs));
        }
    }
    for (lhs, rhs) in todo {
        cons(state, lhs, rhs);
    }
}

/// Convert a declared type. Type variables with the same name share one
/// inference variable created at `level`.
pub fn type_of_expr(te: &TypeExpr, state: &mut InferenceState, level: u32, vars: &mut HashMap<String, VarId>) -> Type {
    let p = state.prov(te.loc);
    match &te.kind {
        TypeExprKind::Named(n) => {
            let prim = match n.as_str() {
                "int" => Prim::Int,
                "bool" => Prim::Bool,
                "string" => Prim::Str,
                "float" => Prim::Float,
                _ => Prim::Unit,
            };
            Type::prim(prim, p)
        }
        TypeExprKind::Var(v) => {
            let id = *vars.entry(v.clone()).or_insert_with(|| state.fresh_var(level));
            Type::var(id, p)
        }
        TypeExprKind::Fun(a, b) => {
            let a = type_of_expr(a, state, level, vars);
            let b = type_of_expr(b, state, level, vars);
            Type::fun(a, b, p)
        }
        TypeExprKind::Tuple(xs) => {
            let ts = xs.iter().map(|x| type_of_expr(x, state, level, vars)).collect::<Vec<_>>();
            Type::ctor(Ctor::Tuple(ts.len() as u8), ts, p)
        }
        TypeExprKind::List(a) => {
            let a = type_of_expr(a, state, level, vars);
            Type::ctor(Ctor::List, vec![a], p)
        }
        TypeExprKind::Either(a, b) => {
            let a = type_of_expr(a, state, level, vars);
            let b = type_of_expr(b, state, level, vars);
            Type::ctor(Ctor::Sum, vec![a, b], p)
        }
    }
}

/// Check the items of a program in order at level 0, extending `ctx`.
pub fn infer_program(state: &mut InferenceState, ctx: &mut Context, program: &Program) -> Result<(), ScopeError> {
    for item in &program.items {
        match item {
            Item::Val { name, ty, .. } => {
                let t = type_of_expr(ty, state, 1, &mut HashMap::new());
                ctx.push(name.name.clone(), Scheme::Poly(0, t));
            }
            Item::Let { rec, binder, value, .. } => {
                bind_let(state, 0, ctx, *rec, &binder.name, binder.loc, value)?;
            }
        }
    }
    Ok(())
}
