//! Rendering unification errors as flow-based reports.

use std::collections::HashMap;

use serde::Serialize;

use crate::source::{Location, SourceMap};
use crate::types::{Ctor, DataFlow, Frame, Relation, Type, VarId};
use crate::unify::FlowError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Compact,
    Verbose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    #[serde(rename = "comes from")]
    ComesFrom,
    #[serde(rename = "is assumed for")]
    AssumedFor,
}

impl Role {
    pub fn text(self) -> &'static str {
        match self {
            Role::ComesFrom => "comes from",
            Role::AssumedFor => "is assumed for",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arrow {
    Forward,
    Backward,
    HopForward,
    HopBackward,
}

impl Arrow {
    pub fn text(self) -> &'static str {
        match self {
            Arrow::Forward => "--->",
            Arrow::Backward => "<---",
            Arrow::HopForward => "~~~>",
            Arrow::HopBackward => "<~~~",
        }
    }

    fn is_hop(self) -> bool {
        matches!(self, Arrow::HopForward | Arrow::HopBackward)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub ty: String,
    pub role: Role,
    pub depth: usize,
    pub locations: Vec<Location>,
}

/// Segments in display order; `arrows[i]` connects segment `i` to `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderPlan {
    pub headline: (String, String),
    pub level: usize,
    pub segments: Vec<Segment>,
    pub arrows: Vec<Arrow>,
}

struct RawSeg {
    ty: Type,
    on_path: Option<u8>,
    depth: usize,
    locs: Vec<Location>,
}

struct Builder {
    verbose: bool,
    segs: Vec<RawSeg>,
    arrows: Vec<Arrow>,
}

impl Builder {
    fn open(&mut self, ty: &Type, on_path: Option<u8>, depth: usize) {
        self.segs.push(RawSeg { ty: ty.clone(), on_path, depth, locs: Vec::new() });
    }

    fn loc(&mut self, l: Location) {
        let seg = self.segs.last_mut().expect("open segment");
        if seg.locs.last() != Some(&l) {
            seg.locs.push(l);
        }
    }

    fn chain(&mut self, z: &DataFlow, depth: usize, on_path: Option<u8>) {
        let types: Vec<&Type> = z.types().collect();
        for (i, t) in types.iter().enumerate() {
            let incoming = i.checked_sub(1).map(|j| &z.links[j].0);
            if let Some(rel) = incoming {
                match rel {
                    Relation::Forward(_) => self.arrows.push(Arrow::Forward),
                    Relation::Backward(_) => self.arrows.push(Arrow::Backward),
                    Relation::Ctor { arg, inner, .. } => {
                        let hop = match inner.links.first() {
                            Some((Relation::Backward(_), _)) => Arrow::HopBackward,
                            _ => Arrow::HopForward,
                        };
                        self.arrows.push(hop);
                        if self.verbose {
                            self.chain(inner, depth + 1, Some(*arg));
                            self.arrows.push(hop);
                        }
                    }
                }
            }
            self.open(t, on_path, depth);
            if let Some(Relation::Forward(p) | Relation::Backward(p)) = incoming {
                let back = matches!(incoming, Some(Relation::Backward(_)));
                self.frames(p.right(), depth, back);
            }
            if let Some((rel @ (Relation::Forward(p) | Relation::Backward(p)), _)) = z.links.get(i) {
                self.frames(p.left(), depth, matches!(rel, Relation::Backward(_)));
            }
        }
    }

    fn frames(&mut self, frames: &[Frame], depth: usize, back: bool) {
        for f in frames {
            match f {
                Frame::Loc(l) => self.loc(*l),
                Frame::Ctor { ctor, arg, inner } if self.verbose && *ctor != Ctor::Fun => {
                    let hop = if back { Arrow::HopBackward } else { Arrow::HopForward };
                    match inner.frames() {
                        [Frame::Flow(z)] => {
                            self.arrows.push(hop);
                            self.chain(z, depth + 1, Some(*arg));
                            self.arrows.push(hop);
                            let exit = match z.last() {
                                Type::Ctor(_, args, _) => args.get(*arg as usize).cloned(),
                                _ => None,
                            };
                            let exit = exit.unwrap_or_else(|| z.last().clone());
                            self.open(&exit, None, depth);
                        }
                        _ => {
                            let mut locs = Vec::new();
                            inner.all_locations(&mut locs);
                            locs.into_iter().for_each(|l| self.loc(l));
                        }
                    }
                }
                Frame::Ctor { .. } => {}
                Frame::Flow(z) if self.verbose => {
                    let mut locs = Vec::new();
                    z.all_locations(&mut locs);
                    locs.into_iter().for_each(|l| self.loc(l));
                }
                Frame::Flow(_) => {}
            }
        }
    }

    fn remove(&mut self, seg: usize, arrow: usize) {
        self.segs.remove(seg);
        self.arrows.remove(arrow);
    }

    /// Fold variables inside a same-direction run into the run's source.
    fn merge_runs(&mut self) {
        let mut i = 1;
        while i + 1 < self.segs.len() {
            let (a, b) = (self.arrows[i - 1], self.arrows[i]);
            let same_depth = self.segs[i - 1].depth == self.segs[i].depth && self.segs[i].depth == self.segs[i + 1].depth;
            if self.segs[i].ty.is_var() && a == b && !a.is_hop() && same_depth {
                let locs = std::mem::take(&mut self.segs[i].locs);
                if a == Arrow::Forward {
                    for l in locs {
                        if self.segs[i - 1].locs.last() != Some(&l) {
                            self.segs[i - 1].locs.push(l);
                        }
                    }
                } else {
                    let next = &mut self.segs[i + 1].locs;
                    let mut merged = locs;
                    for l in next.drain(..) {
                        if merged.last() != Some(&l) {
                            merged.push(l);
                        }
                    }
                    *next = merged;
                }
                self.remove(i, i);
            } else {
                i += 1;
            }
        }
    }

    /// Drop location-less segments that only repeat a neighbour's type.
    fn drop_echoes(&mut self) {
        let mut i = 0;
        while i < self.segs.len() {
            let empty = self.segs[i].locs.is_empty();
            let echo = |j: usize| {
                self.segs.get(j).is_some_and(|s| s.depth == self.segs[i].depth && s.ty.reset_eq(&self.segs[i].ty))
            };
            if empty && i + 1 < self.segs.len() && echo(i + 1) && !self.arrows[i].is_hop() {
                self.remove(i, i);
            } else if empty && i > 0 && echo(i - 1) && !self.arrows[i - 1].is_hop() {
                self.remove(i, i - 1);
            } else {
                i += 1;
            }
        }
    }
}

/// Display names for variables on the flow path, in order of appearance.
#[derive(Default)]
struct Names(HashMap<VarId, String>);

impl Names {
    fn get(&mut self, v: VarId) -> String {
        let n = self.0.len();
        self.0
            .entry(v)
            .or_insert_with(|| {
                let letter = (b'a' + (n % 26) as u8) as char;
                if n < 26 {
                    format!("?{letter}")
                } else {
                    format!("?{letter}{}", n / 26)
                }
            })
            .clone()
    }
}

/// Surface syntax for `t`. Variables print as `_` unless they are the type
/// itself or the argument on the flow path.
fn show(t: &Type, names: &mut Names, on_path: Option<u8>, named: bool) -> String {
    match t {
        Type::Var(v, _) if named => names.get(*v),
        Type::Var(..) => "_".into(),
        Type::Prim(p, _) => p.name().into(),
        Type::Ctor(c, args, _) => {
            let mut parts: Vec<(String, bool)> = Vec::with_capacity(args.len());
            for (k, a) in args.iter().enumerate() {
                let s = show(a, names, None, on_path == Some(k as u8));
                let compound = matches!(a, Type::Ctor(Ctor::Fun | Ctor::Tuple(_), ..));
                parts.push((s, compound));
            }
            let wrap = |(s, c): &(String, bool)| if *c { format!("({s})") } else { s.clone() };
            match c {
                Ctor::Fun => {
                    let left = match &args[0] {
                        Type::Ctor(Ctor::Fun, ..) => format!("({})", parts[0].0),
                        _ => parts[0].0.clone(),
                    };
                    format!("{left} -> {}", parts[1].0)
                }
                Ctor::Tuple(_) => parts.iter().map(wrap).collect::<Vec<_>>().join(" * "),
                Ctor::List => format!("{} list", wrap(&parts[0])),
                Ctor::Sum => format!("({}, {}) either", parts[0].0, parts[1].0),
            }
        }
    }
}

pub fn plan_report(fe: &FlowError, mode: Mode) -> RenderPlan {
    let mut b = Builder { verbose: mode == Mode::Verbose, segs: Vec::new(), arrows: Vec::new() };
    b.chain(&fe.flow, 0, None);
    b.merge_runs();
    b.drop_echoes();
    let mut names = Names::default();
    let segments = b
        .segs
        .iter()
        .map(|s| Segment {
            ty: show(&s.ty, &mut names, s.on_path, true),
            role: if s.ty.is_var() { Role::AssumedFor } else { Role::ComesFrom },
            depth: s.depth,
            locations: s.locs.clone(),
        })
        .collect();
    let mut scratch = Names::default();
    let headline = (show(fe.lhs(), &mut scratch, None, false), show(fe.rhs(), &mut scratch, None, false));
    RenderPlan { headline, level: fe.level, segments, arrows: b.arrows }
}

/// `(int) ---> (?a) <--- (string)`
pub fn flow_summary(plan: &RenderPlan) -> String {
    let mut out = String::new();
    for (i, s) in plan.segments.iter().enumerate() {
        if i > 0 {
            out.push(' ');
            out.push_str(plan.arrows[i - 1].text());
            out.push(' ');
        }
        out.push('(');
        out.push_str(&s.ty);
        out.push(')');
    }
    out
}

/// Whether the summary line is printed in text reports.
pub fn shows_summary(plan: &RenderPlan) -> bool {
    plan.segments.len() >= 3
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Style {
    pub color: bool,
}

impl Style {
    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

pub fn render_text(plan: &RenderPlan, sources: &SourceMap, style: Style) -> String {
    let mut out = String::new();
    let mut line = |s: &str| {
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&format!(
        "{} Type `{}` does not match `{}`",
        style.paint("1;31", "[ERROR]"),
        plan.headline.0,
        plan.headline.1
    ));
    line("");
    if shows_summary(plan) {
        line(&flow_summary(plan));
        line("");
    }
    for (i, seg) in plan.segments.iter().enumerate() {
        let ind = "  ".repeat(seg.depth);
        let next = plan.arrows.get(i).copied();
        line(&format!("{ind}● ({}) {}", seg.ty, seg.role.text()));
        let mut rows = Vec::new();
        for l in &seg.locations {
            if let Ok(ex) = sources.span_lookup(*l) {
                let (text, carets) = ex.lines();
                rows.push(text);
                rows.push(style.paint("31", &carets));
            }
        }
        for (r, row) in rows.iter().enumerate() {
            let gutter = match next {
                Some(Arrow::Forward) => "| ",
                Some(Arrow::Backward) if r == 0 => "▲ ",
                Some(Arrow::Backward) => "| ",
                _ => "  ",
            };
            line(&format!("{ind}{gutter}{row}"));
        }
        match next {
            Some(Arrow::Forward) => line(&format!("{ind}▼")),
            Some(Arrow::Backward) => line(&format!("{ind}|")),
            Some(_) => line(""),
            None => {}
        }
    }
    out
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    format: u32,
    errors: Vec<JsonError<'a>>,
}

#[derive(Serialize)]
struct JsonError<'a> {
    headline: JsonHeadline<'a>,
    level: usize,
    summary: String,
    segments: Vec<JsonSegment<'a>>,
}

#[derive(Serialize)]
struct JsonHeadline<'a> {
    lhs: &'a str,
    rhs: &'a str,
}

#[derive(Serialize)]
struct JsonSegment<'a> {
    #[serde(rename = "type")]
    ty: &'a str,
    role: Role,
    depth: usize,
    locations: Vec<JsonLocation<'a>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonLocation<'a> {
    file: &'a str,
    start_line: usize,
    start_col: usize,
    end_line: usize,
    end_col: usize,
    builtin: bool,
}

/// A single versioned document holding every plan.
pub fn render_json(plans: &[RenderPlan], sources: &SourceMap) -> String {
    let errors = plans
        .iter()
        .map(|p| JsonError {
            headline: JsonHeadline { lhs: &p.headline.0, rhs: &p.headline.1 },
            level: p.level,
            summary: flow_summary(p),
            segments: p
                .segments
                .iter()
                .map(|s| JsonSegment {
                    ty: &s.ty,
                    role: s.role,
                    depth: s.depth,
                    locations: s
                        .locations
                        .iter()
                        .filter_map(|l| {
                            let f = sources.file(l.file).ok()?;
                            let (start_line, start_col, end_line, end_col) = sources.line_cols(*l).ok()?;
                            Some(JsonLocation {
                                file: &f.name,
                                start_line,
                                start_col,
                                end_line,
                                end_col,
                                builtin: f.builtin,
                            })
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect();
    serde_json::to_string(&JsonDoc { format: 1, errors }).expect("serializable report")
}
