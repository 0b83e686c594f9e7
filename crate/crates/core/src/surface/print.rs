//! Printing back to parseable source. Output is fully parenthesized, so
//! parsing it again yields a term of the same shape.

use super::ast::{Item, Program, Term, TermKind, TypeExpr, TypeExprKind};

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for item in &p.items {
        match item {
            Item::Val { name, ty, .. } => {
                out.push_str(&format!("val {} : {}\n", var_name(&name.name), print_type(ty)));
            }
            Item::Let { rec, binder, value, .. } => {
                let rec = if *rec { "rec " } else { "" };
                out.push_str(&format!("let {rec}{} = {}\n", var_name(&binder.name), print_term(value)));
            }
        }
    }
    out
}

fn var_name(name: &str) -> String {
    match name.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        Some(op) => format!("( {op} )"),
        None => name.to_string(),
    }
}

fn escape(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn atomic(t: &Term) -> bool {
    matches!(
        t.kind,
        TermKind::Var(_) | TermKind::Unit | TermKind::Int(_) | TermKind::Bool(_) | TermKind::Float(_) | TermKind::Str(_) | TermKind::Tuple(_)
    )
}

fn paren(t: &Term) -> String {
    if atomic(t) {
        print_term(t)
    } else {
        format!("({})", print_term(t))
    }
}

pub fn print_term(t: &Term) -> String {
    match &t.kind {
        TermKind::Var(x) => var_name(x),
        TermKind::Unit => "()".into(),
        TermKind::Int(n) => n.to_string(),
        TermKind::Bool(b) => b.to_string(),
        TermKind::Float(s) => s.clone(),
        TermKind::Str(s) => escape(s),
        TermKind::Plus(a, b) => format!("{} #+ {}", paren(a), paren(b)),
        TermKind::If(c, a, b) => format!("if {} then {} else {}", paren(c), paren(a), paren(b)),
        TermKind::Lam(x, body) => format!("fun {} -> {}", x.name, paren(body)),
        TermKind::App(f, a) => format!("{} {}", paren(f), paren(a)),
        TermKind::Tuple(xs) => format!("({})", xs.iter().map(paren).collect::<Vec<_>>().join(", ")),
        TermKind::Proj { index, arity, tuple } => format!("#{}/{} {}", index + 1, arity, paren(tuple)),
        TermKind::Inj { right, value } => format!("{} {}", if *right { "Right" } else { "Left" }, paren(value)),
        TermKind::Case { scrutinee, left, right } => format!(
            "match {} with Left {} -> {} | Right {} -> {}",
            paren(scrutinee),
            left.0.name,
            paren(&left.1),
            right.0.name,
            paren(&right.1)
        ),
        TermKind::ListCase { scrutinee, nil, head, tail, cons } => format!(
            "match {} with [] -> {} | {} :: {} -> {}",
            paren(scrutinee),
            paren(nil),
            head.name,
            tail.name,
            paren(cons)
        ),
        TermKind::Let { rec, binder, value, body } => format!(
            "let {}{} = {} in {}",
            if *rec { "rec " } else { "" },
            var_name(&binder.name),
            paren(value),
            paren(body)
        ),
    }
}

pub fn print_type(t: &TypeExpr) -> String {
    let wrap = |t: &TypeExpr| match t.kind {
        TypeExprKind::Fun(..) | TypeExprKind::Tuple(_) => format!("({})", print_type(t)),
        _ => print_type(t),
    };
    match &t.kind {
        TypeExprKind::Named(n) => n.clone(),
        TypeExprKind::Var(v) => format!("'{v}"),
        TypeExprKind::Fun(a, b) => format!("{} -> {}", wrap(a), print_type(b)),
        TypeExprKind::Tuple(xs) => xs.iter().map(wrap).collect::<Vec<_>>().join(" * "),
        TypeExprKind::List(a) => format!("{} list", wrap(a)),
        TypeExprKind::Either(a, b) => format!("({}, {}) either", print_type(a), print_type(b)),
    }
}
