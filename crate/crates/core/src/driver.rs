//! The checking pipeline: prelude, parse, infer, unify, render.

use std::io::{self, Write};
use std::path::PathBuf;

use thiserror::Error;

use crate::infer::{infer_program, ScopeError};
use crate::prelude::{load_prelude, PreludeError, DEFAULT_PRELUDE};
use crate::report::{plan_report, render_json, render_text, Mode, RenderPlan, Style};
use crate::source::{Location, SourceMap};
use crate::surface::{parse_source, Program, SyntaxError};
use crate::types::{Context, InferenceState};
use crate::unify::{unify_state, FlowError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub prelude: Option<PathBuf>,
    pub mode: Mode,
    pub format: Format,
    pub color: bool,
    pub max_errors: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("{0}")]
    Prelude(#[from] PreludeError),
    #[error("syntax error: {0}")]
    Syntax(SyntaxError),
    #[error("{0}")]
    Scope(ScopeError),
}

impl CheckError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CheckError::Prelude(_) => 3,
            CheckError::Syntax(_) | CheckError::Scope(_) => 2,
        }
    }

    fn loc(&self) -> Option<Location> {
        match self {
            CheckError::Syntax(e) => Some(e.loc),
            CheckError::Scope(e) => Some(e.loc),
            CheckError::Prelude(PreludeError::Syntax(e)) => Some(e.loc),
            CheckError::Prelude(_) => None,
        }
    }
}

/// Everything left after a successful run of the pipeline.
pub struct Checked {
    pub sources: SourceMap,
    pub state: InferenceState,
    pub errors: Vec<FlowError>,
}

impl Checked {
    pub fn plans(&self, mode: Mode) -> Vec<RenderPlan> {
        self.errors.iter().map(|e| plan_report(e, mode)).collect()
    }
}

/// Check in-memory `(name, text)` files against `prelude`.
pub fn check_sources(prelude: &str, files: &[(String, String)], erase: bool) -> Result<Checked, (CheckError, SourceMap)> {
    let mut sources = SourceMap::new();
    let mut state = InferenceState::new();
    state.erase_provenance = erase;
    let mut ctx = Context::new();
    if let Err(e) = load_prelude(prelude, &mut sources, &mut state, &mut ctx) {
        return Err((e.into(), sources));
    }
    let mut program = Program::default();
    for (name, text) in files {
        let id = sources.add_file(name.clone(), text.clone(), false);
        match parse_source(text, id) {
            Ok(p) => program.extend(p),
            Err(e) => return Err((CheckError::Syntax(e), sources)),
        }
    }
    if let Err(e) = infer_program(&mut state, &mut ctx, &program) {
        return Err((CheckError::Scope(e), sources));
    }
    let errors = unify_state(&mut state);
    Ok(Checked { sources, state, errors })
}

fn describe(e: &CheckError, sources: &SourceMap) -> String {
    match e.loc().and_then(|l| Some((sources.file(l.file).ok()?, sources.line_cols(l).ok()?))) {
        Some((f, (line, col, ..))) => format!("{}:{line}:{col}: {e}", f.name),
        None => e.to_string(),
    }
}

/// Render `checked` per `config`.
pub fn render(checked: &Checked, config: &RunConfig) -> String {
    let mut plans = checked.plans(config.mode);
    let hidden = match config.max_errors {
        Some(n) if plans.len() > n => plans.len() - n,
        _ => 0,
    };
    plans.truncate(plans.len() - hidden);
    match config.format {
        Format::Json => format!("{}\n", render_json(&plans, &checked.sources)),
        Format::Text => {
            let style = Style { color: config.color };
            let mut out = plans.iter().map(|p| render_text(p, &checked.sources, style)).collect::<Vec<_>>().join("\n");
            if hidden > 0 {
                let s = if hidden == 1 { "" } else { "s" };
                out.push_str(&format!("\n… {hidden} more error{s}\n"));
            }
            out
        }
    }
}

/// Run the whole pipeline, writing diagnostics to `out`; returns the exit
/// code.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    let prelude = match &config.prelude {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                writeln!(out, "error: cannot read prelude {}: {e}", p.display())?;
                return Ok(3);
            }
        },
        None => DEFAULT_PRELUDE.to_string(),
    };
    let mut files = Vec::new();
    for p in &config.inputs {
        match std::fs::read_to_string(p) {
            Ok(t) => files.push((p.display().to_string(), t)),
            Err(e) => {
                writeln!(out, "error: cannot read {}: {e}", p.display())?;
                return Ok(3);
            }
        }
    }
    match check_sources(&prelude, &files, false) {
        Ok(checked) => {
            out.write_all(render(&checked, config).as_bytes())?;
            Ok(if checked.errors.is_empty() { 0 } else { 1 })
        }
        Err((e, sources)) => {
            writeln!(out, "error: {}", describe(&e, &sources))?;
            Ok(e.exit_code())
        }
    }
}
