//! Recursive-descent parser. Tuple patterns, list literals, operators, and
//! `match` are desugared into the core term forms here.

use crate::source::{FileId, Location};

use super::ast::{Binder, Item, Program, Term, TermKind, TypeExpr, TypeExprKind};
use super::lexer::{Tok, Token};
use super::SyntaxError;

#[derive(Clone, Debug)]
enum Pat {
    Var(Binder),
    Wild(Location),
    Unit(Location),
    Int(i64, Location),
    Nil(Location),
    Tuple(Vec<Pat>, Location),
    Cons(Box<Pat>, Box<Pat>, Location),
    Inj(bool, Box<Pat>, Location),
}

impl Pat {
    fn loc(&self) -> Location {
        match self {
            Pat::Var(b) => b.loc,
            Pat::Wild(l) | Pat::Unit(l) | Pat::Int(_, l) | Pat::Nil(l) | Pat::Tuple(_, l) | Pat::Cons(_, _, l) | Pat::Inj(_, _, l) => *l,
        }
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    eof: Location,
    fresh: u32,
}

type PResult<T> = Result<T, SyntaxError>;

/// Parse a token sequence into a program. Stops at the first error.
pub fn parse_program(toks: &[Token], file: FileId, src_len: usize) -> Result<Program, SyntaxError> {
    let mut p = Parser { toks, pos: 0, eof: Location::new(file, src_len, src_len), fresh: 0 };
    p.program()
}

fn binop_level(t: &Tok) -> Option<(u8, bool)> {
    // (precedence, right-associative)
    let op = match t {
        Tok::Eq => "=",
        Tok::Op(s) => s.as_str(),
        _ => return None,
    };
    Some(match op {
        "||" => (0, true),
        "&&" => (1, true),
        "=" | "<" | ">" | "<=" | ">=" | "<>" | "==" | "!=" => (2, false),
        "@" | "^" => (3, true),
        "::" => (4, true),
        "+" | "-" | "+." | "-." | "#+" => (5, false),
        "*" | "/" | "mod" | "*." | "/." => (6, false),
        _ => return None,
    })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        self.toks.get(self.pos).map_or(&Tok::Eof, |t| &t.tok)
    }

    fn peek_at(&self, n: usize) -> &Tok {
        self.toks.get(self.pos + n).map_or(&Tok::Eof, |t| &t.tok)
    }

    fn loc(&self) -> Location {
        self.toks.get(self.pos).map_or(self.eof, |t| t.loc)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks.get(self.pos).cloned().unwrap_or(Token { tok: Tok::Eof, loc: self.eof });
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let found = self.peek().describe();
        Err(SyntaxError {
            loc: self.loc(),
            message: format!("unexpected {found}"),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, t: Tok) -> PResult<Location> {
        if self.peek() == &t {
            Ok(self.bump().loc)
        } else {
            self.error(&[&t.describe()])
        }
    }

    fn fresh(&mut self, loc: Location) -> Binder {
        self.fresh += 1;
        Binder { name: format!("${}", self.fresh), loc }
    }

    // ---------------------------------------------------------------- items

    fn program(&mut self) -> PResult<Program> {
        let mut items = Vec::new();
        loop {
            while self.eat(&Tok::SemiSemi) || self.eat(&Tok::Semi) {}
            match self.peek() {
                Tok::Eof => break,
                Tok::Val => items.push(self.val_item()?),
                Tok::Let => self.let_item(&mut items)?,
                _ => return self.error(&["`let`", "`val`"]),
            }
        }
        Ok(Program { items })
    }

    fn val_item(&mut self) -> PResult<Item> {
        let start = self.expect(Tok::Val)?;
        let name = self.value_name()?;
        self.expect(Tok::Colon)?;
        let ty = self.type_expr()?;
        Ok(Item::Val { name, loc: start.to(ty.loc), ty })
    }

    /// `x`, `List.map`, `(+)`, `( *. )`, or `[]`.
    fn value_name(&mut self) -> PResult<Binder> {
        let start = self.loc();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Binder { name: s, loc: start })
            }
            Tok::LBracket if self.peek_at(1) == &Tok::RBracket => {
                self.bump();
                let end = self.bump().loc;
                Ok(Binder { name: "[]".into(), loc: start.to(end) })
            }
            Tok::LParen => {
                self.bump();
                let op = match self.bump().tok {
                    Tok::Op(s) => s,
                    Tok::Eq => "=".into(),
                    _ => {
                        self.pos -= 1;
                        return self.error(&["operator"]);
                    }
                };
                let end = self.expect(Tok::RParen)?;
                Ok(Binder { name: format!("({op})"), loc: start.to(end) })
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn let_item(&mut self, items: &mut Vec<Item>) -> PResult<()> {
        let start = self.expect(Tok::Let)?;
        // `let name: type` declares a value like `val`.
        let save = self.pos;
        if let Ok(name) = self.value_name() {
            if self.eat(&Tok::Colon) {
                let ty = self.type_expr()?;
                items.push(Item::Val { name, loc: start.to(ty.loc), ty });
                return Ok(());
            }
        }
        self.pos = save;
        let rec = self.eat(&Tok::Rec);
        let (pat, value) = self.let_binding(rec)?;
        if self.eat(&Tok::In) {
            let body = self.expr()?;
            let term = self.let_pattern(rec, pat, value, body);
            let loc = start.to(term.loc);
            items.push(Item::Let { rec: false, binder: Binder { name: "_".into(), loc }, value: term, loc });
            return Ok(());
        }
        match pat {
            Pat::Var(binder) => {
                let loc = start.to(value.loc);
                items.push(Item::Let { rec, binder, value, loc });
            }
            Pat::Wild(l) | Pat::Unit(l) => {
                let loc = start.to(value.loc);
                items.push(Item::Let { rec, binder: Binder { name: "_".into(), loc: l }, value, loc });
            }
            Pat::Tuple(parts, ploc) => {
                let tmp = self.fresh(ploc);
                let loc = start.to(value.loc);
                items.push(Item::Let { rec: false, binder: tmp.clone(), value, loc });
                let n = parts.len() as u8;
                for (i, part) in parts.into_iter().enumerate() {
                    let proj = proj(i as u8, n, Term::new(TermKind::Var(tmp.name.clone()), ploc), part.loc());
                    match part {
                        Pat::Var(b) => items.push(Item::Let { rec: false, binder: b, value: proj, loc }),
                        Pat::Wild(_) => {}
                        _ => return Err(SyntaxError::new(ploc, "nested patterns are not supported at top level")),
                    }
                }
            }
            other => return Err(SyntaxError::new(other.loc(), "unsupported pattern in let binding")),
        }
        Ok(())
    }

    /// `pat params* = expr` after `let [rec]`; params become lambdas.
    fn let_binding(&mut self, rec: bool) -> PResult<(Pat, Term)> {
        let pat = if rec { Pat::Var(self.value_name()?) } else { self.pattern()? };
        let mut params = Vec::new();
        while !matches!(self.peek(), Tok::Eq) {
            if matches!(pat, Pat::Var(_)) {
                params.push(self.atom_pattern()?);
            } else {
                return self.error(&["`=`"]);
            }
        }
        self.expect(Tok::Eq)?;
        let body = self.expr()?;
        Ok((pat, self.lambdas(params, body)))
    }

    fn lambdas(&mut self, params: Vec<Pat>, body: Term) -> Term {
        params.into_iter().rev().fold(body, |body, p| self.lambda(p, body))
    }

    fn lambda(&mut self, p: Pat, body: Term) -> Term {
        let loc = p.loc().to(body.loc);
        match p {
            Pat::Var(b) => Term::new(TermKind::Lam(b, Box::new(body)), loc),
            Pat::Wild(l) | Pat::Unit(l) => Term::new(TermKind::Lam(Binder { name: "_".into(), loc: l }, Box::new(body)), loc),
            other => {
                let ploc = other.loc();
                let tmp = self.fresh(ploc);
                let var = Term::new(TermKind::Var(tmp.name.clone()), ploc);
                let inner = self.let_pattern(false, other, var, body);
                Term::new(TermKind::Lam(tmp, Box::new(inner)), loc)
            }
        }
    }

    /// `let pat = value in body`.
    fn let_pattern(&mut self, rec: bool, pat: Pat, value: Term, body: Term) -> Term {
        let loc = value.loc.to(body.loc);
        let mk = |binder: Binder, value: Term, body: Term| {
            let loc = binder.loc.to(body.loc).to(value.loc);
            Term::new(TermKind::Let { rec, binder, value: Box::new(value), body: Box::new(body) }, loc)
        };
        match pat {
            Pat::Var(b) => mk(b, value, body),
            Pat::Wild(l) | Pat::Unit(l) | Pat::Int(_, l) | Pat::Nil(l) | Pat::Cons(_, _, l) | Pat::Inj(_, _, l) => {
                mk(Binder { name: "_".into(), loc: l }, value, body)
            }
            Pat::Tuple(parts, ploc) => {
                let tmp = self.fresh(ploc);
                let n = parts.len() as u8;
                let mut inner = body;
                for (i, part) in parts.into_iter().enumerate().rev() {
                    let var = Term::new(TermKind::Var(tmp.name.clone()), ploc);
                    let pl = part.loc();
                    inner = self.let_pattern(false, part, proj(i as u8, n, var, pl), inner);
                }
                let t = mk(tmp, value, inner);
                Term { loc: t.loc.to(loc), ..t }
            }
        }
    }

    // ------------------------------------------------------------- patterns

    fn pattern(&mut self) -> PResult<Pat> {
        let first = self.cons_pattern()?;
        if self.peek() != &Tok::Comma {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(&Tok::Comma) {
            parts.push(self.cons_pattern()?);
        }
        let loc = parts[0].loc().to(parts[parts.len() - 1].loc());
        Ok(Pat::Tuple(parts, loc))
    }

    fn cons_pattern(&mut self) -> PResult<Pat> {
        let head = self.atom_pattern()?;
        if matches!(self.peek(), Tok::Op(s) if s == "::") {
            self.bump();
            let tail = self.cons_pattern()?;
            let loc = head.loc().to(tail.loc());
            return Ok(Pat::Cons(Box::new(head), Box::new(tail), loc));
        }
        Ok(head)
    }

    fn atom_pattern(&mut self) -> PResult<Pat> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Pat::Var(Binder { name: s, loc }))
            }
            Tok::Underscore => {
                self.bump();
                Ok(Pat::Wild(loc))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Pat::Int(n, loc))
            }
            Tok::LBracket => {
                self.bump();
                let end = self.expect(Tok::RBracket)?;
                Ok(Pat::Nil(loc.to(end)))
            }
            Tok::Upper(c) if c == "Left" || c == "Right" => {
                self.bump();
                let inner = self.atom_pattern()?;
                let l = loc.to(inner.loc());
                Ok(Pat::Inj(c == "Right", Box::new(inner), l))
            }
            Tok::LParen => {
                self.bump();
                if self.peek() == &Tok::RParen {
                    let end = self.bump().loc;
                    return Ok(Pat::Unit(loc.to(end)));
                }
                let p = self.pattern()?;
                let end = self.expect(Tok::RParen)?;
                Ok(match p {
                    Pat::Tuple(parts, _) => Pat::Tuple(parts, loc.to(end)),
                    other => other,
                })
            }
            _ => self.error(&["pattern"]),
        }
    }

    // ---------------------------------------------------------- expressions

    fn expr(&mut self) -> PResult<Term> {
        let first = self.expr_nt()?;
        if self.peek() != &Tok::Comma {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(&Tok::Comma) {
            parts.push(self.expr_nt()?);
        }
        let loc = parts[0].loc.to(parts[parts.len() - 1].loc);
        Ok(Term::new(TermKind::Tuple(parts), loc))
    }

    /// An expression without a top-level comma.
    fn expr_nt(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Let | Tok::Fun | Tok::If | Tok::Match => self.prefix_form(),
            _ => self.binary(0),
        }
    }

    fn prefix_form(&mut self) -> PResult<Term> {
        let start = self.loc();
        match self.peek() {
            Tok::Let => {
                self.bump();
                let rec = self.eat(&Tok::Rec);
                let (pat, value) = self.let_binding(rec)?;
                self.expect(Tok::In)?;
                let body = self.expr_nt()?;
                let t = self.let_pattern(rec, pat, value, body);
                Ok(Term { loc: start.to(t.loc), ..t })
            }
            Tok::Fun => {
                self.bump();
                let mut params = vec![self.atom_pattern()?];
                while self.peek() != &Tok::Arrow {
                    params.push(self.atom_pattern()?);
                }
                self.expect(Tok::Arrow)?;
                let body = self.expr_nt()?;
                let t = self.lambdas(params, body);
                Ok(Term { loc: start.to(t.loc), ..t })
            }
            Tok::If => {
                self.bump();
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let a = self.expr_nt()?;
                self.expect(Tok::Else)?;
                let b = self.expr_nt()?;
                let loc = start.to(b.loc);
                Ok(Term::new(TermKind::If(Box::new(c), Box::new(a), Box::new(b)), loc))
            }
            Tok::Match => {
                self.bump();
                let scrut = self.expr()?;
                self.expect(Tok::With)?;
                let mut arms = Vec::new();
                self.eat(&Tok::Bar);
                loop {
                    let p = self.pattern()?;
                    self.expect(Tok::Arrow)?;
                    let body = self.expr_nt()?;
                    arms.push((p, body));
                    if !self.eat(&Tok::Bar) {
                        break;
                    }
                }
                let loc = start.to(arms.last().unwrap().1.loc);
                self.desugar_match(scrut, arms, loc)
            }
            _ => self.error(&["expression"]),
        }
    }

    fn binary(&mut self, min: u8) -> PResult<Term> {
        let mut lhs = self.operand()?;
        while let Some((prec, right)) = binop_level(self.peek()) {
            if prec < min {
                break;
            }
            let op_tok = self.bump();
            let op = match op_tok.tok {
                Tok::Eq => "=".to_string(),
                Tok::Op(s) => s,
                _ => unreachable!(),
            };
            let rhs = self.binary(if right { prec } else { prec + 1 })?;
            lhs = binop(&op, op_tok.loc, lhs, rhs);
        }
        Ok(lhs)
    }

    fn operand(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Let | Tok::Fun | Tok::If | Tok::Match => self.prefix_form(),
            _ => self.application(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Int(_) | Tok::Float(_) | Tok::Str(_) | Tok::True | Tok::False | Tok::LParen | Tok::LBracket | Tok::Upper(_) | Tok::Proj(..)
        )
    }

    fn application(&mut self) -> PResult<Term> {
        let mut head = self.app_arg()?;
        while self.starts_atom() {
            let arg = self.app_arg()?;
            let loc = head.loc.to(arg.loc);
            head = Term::new(TermKind::App(Box::new(head), Box::new(arg)), loc);
        }
        Ok(head)
    }

    /// An atom, or a constructor/projection applied to one.
    fn app_arg(&mut self) -> PResult<Term> {
        let start = self.loc();
        match self.peek().clone() {
            Tok::Upper(c) if c == "Left" || c == "Right" => {
                self.bump();
                let v = self.app_arg()?;
                let loc = start.to(v.loc);
                Ok(Term::new(TermKind::Inj { right: c == "Right", value: Box::new(v) }, loc))
            }
            Tok::Proj(k, n) => {
                self.bump();
                let v = self.app_arg()?;
                let loc = start.to(v.loc);
                Ok(Term::new(TermKind::Proj { index: k - 1, arity: n, tuple: Box::new(v) }, loc))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Term> {
        let loc = self.loc();
        let kind = match self.peek().clone() {
            Tok::Ident(s) => TermKind::Var(s),
            Tok::Int(n) => TermKind::Int(n),
            Tok::Float(s) => TermKind::Float(s),
            Tok::Str(s) => TermKind::Str(s),
            Tok::True => TermKind::Bool(true),
            Tok::False => TermKind::Bool(false),
            Tok::LParen => {
                self.bump();
                if self.peek() == &Tok::RParen {
                    let end = self.bump().loc;
                    return Ok(Term::new(TermKind::Unit, loc.to(end)));
                }
                let is_op = matches!(self.peek(), Tok::Op(_)) && self.peek_at(1) == &Tok::RParen
                    || self.peek() == &Tok::Eq && self.peek_at(1) == &Tok::RParen;
                if is_op {
                    self.pos -= 1;
                    let b = self.value_name()?;
                    return Ok(Term::new(TermKind::Var(b.name), b.loc));
                }
                let e = self.expr()?;
                let end = self.expect(Tok::RParen)?;
                // Parentheses widen tuples to include the delimiters.
                return Ok(match e.kind {
                    TermKind::Tuple(_) => Term { loc: loc.to(end), ..e },
                    _ => e,
                });
            }
            Tok::LBracket => {
                self.bump();
                let mut elems = Vec::new();
                if self.peek() != &Tok::RBracket {
                    elems.push(self.expr_nt()?);
                    while self.eat(&Tok::Semi) {
                        if self.peek() == &Tok::RBracket {
                            break;
                        }
                        elems.push(self.expr_nt()?);
                    }
                }
                let end = self.expect(Tok::RBracket)?;
                let whole = loc.to(end);
                let nil_loc = if elems.is_empty() { whole } else { end };
                let mut list = Term::new(TermKind::Var("[]".into()), nil_loc);
                for e in elems.into_iter().rev() {
                    list = binop("::", whole, e, list);
                }
                return Ok(list);
            }
            _ => return self.error(&["expression"]),
        };
        self.bump();
        Ok(Term::new(kind, loc))
    }

    fn desugar_match(&mut self, scrut: Term, arms: Vec<(Pat, Term)>, loc: Location) -> PResult<Term> {
        let is_inj = arms.iter().any(|(p, _)| matches!(p, Pat::Inj(..)));
        let is_list = arms.iter().any(|(p, _)| matches!(p, Pat::Nil(_) | Pat::Cons(..)));
        if is_inj {
            let mut left = None;
            let mut right = None;
            for (p, body) in arms {
                let Pat::Inj(r, inner, _) = p else {
                    return Err(SyntaxError::new(p.loc(), "expected `Left` or `Right` pattern"));
                };
                let b = self.simple_binder(*inner)?;
                let slot = if r { &mut right } else { &mut left };
                if slot.is_none() {
                    *slot = Some((b, Box::new(body)));
                }
            }
            let (Some(left), Some(right)) = (left, right) else {
                return Err(SyntaxError::new(loc, "match on either needs both `Left` and `Right` arms"));
            };
            return Ok(Term::new(TermKind::Case { scrutinee: Box::new(scrut), left, right }, loc));
        }
        if is_list {
            let mut nil = None;
            let mut conses = Vec::new();
            for (p, body) in arms {
                match p {
                    Pat::Nil(_) => {
                        if nil.is_none() {
                            nil = Some(body)
                        }
                    }
                    Pat::Cons(h, t, _) => conses.push((*h, *t, body)),
                    Pat::Var(_) | Pat::Wild(_) => conses.push((Pat::Wild(p.loc()), p, body)),
                    other => return Err(SyntaxError::new(other.loc(), "unsupported list pattern")),
                }
            }
            let Some(nil) = nil else {
                return Err(SyntaxError::new(loc, "list match needs a `[]` arm"));
            };
            if conses.is_empty() {
                return Err(SyntaxError::new(loc, "list match needs a `::` arm"));
            }
            let (h0, t0, _) = &conses[0];
            let head = match h0 {
                Pat::Var(b) => b.clone(),
                other => self.fresh(other.loc()),
            };
            let tail = match t0 {
                Pat::Var(b) => b.clone(),
                other => self.fresh(other.loc()),
            };
            let cons = self.cons_arms(&head, &tail, conses)?;
            return Ok(Term::new(
                TermKind::ListCase { scrutinee: Box::new(scrut), nil: Box::new(nil), head, tail, cons: Box::new(cons) },
                loc,
            ));
        }
        if let Some((p, body)) = arms.into_iter().next() {
            let t = self.let_pattern(false, p, scrut, body);
            return Ok(Term { loc, ..t });
        }
        Err(SyntaxError::new(loc, "empty match"))
    }

    /// Chain the `h :: t` arms; literal heads become equality tests.
    fn cons_arms(&mut self, head: &Binder, tail: &Binder, arms: Vec<(Pat, Pat, Term)>) -> PResult<Term> {
        let mut rest: Option<Term> = None;
        for (h, t, body) in arms.into_iter().rev() {
            let body = self.rebind(t, tail, body)?;
            let term = match h {
                Pat::Int(n, l) => {
                    let test = binop("=", l, Term::new(TermKind::Var(head.name.clone()), l), Term::new(TermKind::Int(n), l));
                    let otherwise = rest.take().unwrap_or_else(|| body.clone());
                    let loc = l.to(body.loc).to(otherwise.loc);
                    Term::new(TermKind::If(Box::new(test), Box::new(body), Box::new(otherwise)), loc)
                }
                other => self.rebind(other, head, body)?,
            };
            rest = Some(term);
        }
        Ok(rest.expect("at least one arm"))
    }

    /// Bind `pat` to the value of `source` around `body`.
    fn rebind(&mut self, pat: Pat, source: &Binder, body: Term) -> PResult<Term> {
        match pat {
            Pat::Var(b) if b.name == source.name && b.loc == source.loc => Ok(body),
            Pat::Wild(_) => Ok(body),
            Pat::Var(b) => {
                let v = Term::new(TermKind::Var(source.name.clone()), b.loc);
                Ok(self.let_pattern(false, Pat::Var(b), v, body))
            }
            other => Err(SyntaxError::new(other.loc(), "unsupported pattern in list arm")),
        }
    }

    fn simple_binder(&mut self, p: Pat) -> PResult<Binder> {
        match p {
            Pat::Var(b) => Ok(b),
            Pat::Wild(l) | Pat::Unit(l) => Ok(Binder { name: "_".into(), loc: l }),
            other => Err(SyntaxError::new(other.loc(), "expected a variable pattern")),
        }
    }

    // ---------------------------------------------------------------- types

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let lhs = self.tuple_type()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.type_expr()?;
            let loc = lhs.loc.to(rhs.loc);
            return Ok(TypeExpr { kind: TypeExprKind::Fun(Box::new(lhs), Box::new(rhs)), loc });
        }
        Ok(lhs)
    }

    fn tuple_type(&mut self) -> PResult<TypeExpr> {
        let first = self.app_type()?;
        if !matches!(self.peek(), Tok::Op(s) if s == "*") {
            return Ok(first);
        }
        let mut parts = vec![first];
        while matches!(self.peek(), Tok::Op(s) if s == "*") {
            self.bump();
            parts.push(self.app_type()?);
        }
        let loc = parts[0].loc.to(parts[parts.len() - 1].loc);
        Ok(TypeExpr { kind: TypeExprKind::Tuple(parts), loc })
    }

    fn app_type(&mut self) -> PResult<TypeExpr> {
        let start = self.loc();
        let mut args: Vec<TypeExpr> = match self.peek().clone() {
            Tok::TyVar(v) => {
                self.bump();
                vec![TypeExpr { kind: TypeExprKind::Var(v), loc: start }]
            }
            Tok::Ident(n) if matches!(n.as_str(), "int" | "bool" | "string" | "float" | "unit") => {
                self.bump();
                vec![TypeExpr { kind: TypeExprKind::Named(n), loc: start }]
            }
            Tok::LParen => {
                self.bump();
                let mut xs = vec![self.type_expr()?];
                while self.eat(&Tok::Comma) {
                    xs.push(self.type_expr()?);
                }
                let end = self.expect(Tok::RParen)?;
                if xs.len() == 1 {
                    let mut t = xs.pop().unwrap();
                    // Keep the parenthesized span for carets.
                    t.loc = start.to(end);
                    vec![t]
                } else {
                    xs
                }
            }
            _ => return self.error(&["type"]),
        };
        loop {
            match self.peek().clone() {
                Tok::Ident(n) if n == "list" && args.len() == 1 => {
                    let end = self.bump().loc;
                    let a = args.pop().unwrap();
                    args.push(TypeExpr { loc: start.to(end), kind: TypeExprKind::List(Box::new(a)) });
                }
                Tok::Ident(n) if n == "either" && args.len() == 2 => {
                    let end = self.bump().loc;
                    let b = args.pop().unwrap();
                    let a = args.pop().unwrap();
                    args.push(TypeExpr { loc: start.to(end), kind: TypeExprKind::Either(Box::new(a), Box::new(b)) });
                }
                _ => break,
            }
        }
        if args.len() != 1 {
            return self.error(&["`either`"]);
        }
        Ok(args.pop().unwrap())
    }
}

fn proj(index: u8, arity: u8, tuple: Term, loc: Location) -> Term {
    Term::new(TermKind::Proj { index, arity, tuple: Box::new(tuple) }, loc)
}

/// `a op b`, with `#+` mapping to primitive addition and every other operator
/// applied as a curried function `(op) a b`.
fn binop(op: &str, op_loc: Location, a: Term, b: Term) -> Term {
    let loc = a.loc.to(b.loc).to(op_loc);
    if op == "#+" {
        return Term::new(TermKind::Plus(Box::new(a), Box::new(b)), loc);
    }
    let f = Term::new(TermKind::Var(format!("({op})")), op_loc);
    let inner_loc = a.loc.to(op_loc);
    let partial = Term::new(TermKind::App(Box::new(f), Box::new(a)), inner_loc);
    Term::new(TermKind::App(Box::new(partial), Box::new(b)), loc)
}
