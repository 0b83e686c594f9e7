//! Library signatures available to every program.

use thiserror::Error;

use crate::infer::infer_program;
use crate::source::{FileId, SourceMap};
use crate::surface::{parse_source, Item, SyntaxError};
use crate::types::{Context, InferenceState};

pub const DEFAULT_PRELUDE: &str = include_str!("../prelude/prelude.ml");

#[derive(Debug, Error)]
pub enum PreludeError {
    #[error("prelude: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("prelude: only signatures are allowed, found a definition of `{0}`")]
    Definition(String),
    #[error("prelude: unbound variable `{0}`")]
    Scope(String),
}

/// Parse `text` as a builtin file of signatures and install each one as a
/// polymorphic binding at level 0.
pub fn load_prelude(
    text: &str,
    sources: &mut SourceMap,
    state: &mut InferenceState,
    ctx: &mut Context,
) -> Result<FileId, PreludeError> {
    let file = sources.add_file("prelude", text, true);
    let program = parse_source(text, file)?;
    if let Some(Item::Let { binder, .. }) = program.items.iter().find(|i| matches!(i, Item::Let { .. })) {
        return Err(PreludeError::Definition(binder.name.clone()));
    }
    infer_program(state, ctx, &program).map_err(|e| PreludeError::Scope(e.name))?;
    Ok(file)
}
