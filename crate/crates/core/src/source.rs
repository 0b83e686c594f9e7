//! Source files, byte-offset locations, and excerpt rendering.

use std::fmt;

use thiserror::Error;

/// Index of a loaded file inside a [`SourceMap`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FileId(pub u32);

/// A half-open byte range `[start, end)` inside one file.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub file: FileId,
    pub start: u32,
    pub end: u32,
}

impl Location {
    pub fn new(file: FileId, start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Location { file, start: start as u32, end: end as u32 }
    }

    /// Smallest location covering both `self` and `other` (same file).
    pub fn to(self, other: Location) -> Location {
        debug_assert_eq!(self.file, other.file);
        Location { file: self.file, start: self.start.min(other.start), end: self.end.max(other.end) }
    }

    pub fn contains(self, other: Location) -> bool {
        self.file == other.file && self.start <= other.start && other.end <= self.end
    }

    pub fn len(self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(self) -> bool {
        self.start == self.end
    }
}

impl fmt::Debug for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}:{}..{}", self.file.0, self.start, self.end)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SourceError {
    #[error("unknown file id {0}")]
    UnknownFile(u32),
}

#[derive(Debug, Clone)]
pub struct SourceFile {
    pub name: String,
    pub text: String,
    /// Prelude files render their lines with a `lib.` label.
    pub builtin: bool,
    /// Ordinal used in `<n>.<line>` labels; 0 for builtin files.
    pub ordinal: u32,
    line_starts: Vec<usize>,
}

impl SourceFile {
    fn new(name: String, text: String, builtin: bool, ordinal: u32) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        SourceFile { name, text, builtin, ordinal, line_starts }
    }

    /// 0-based line index containing byte `offset`.
    pub fn line_index(&self, offset: usize) -> usize {
        match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    pub fn line_text(&self, line: usize) -> &str {
        let start = self.line_starts[line];
        let end = self.line_starts.get(line + 1).map_or(self.text.len(), |&e| e - 1);
        self.text[start..end].trim_end_matches('\r')
    }

    /// 1-based (line, column) of a byte offset; columns count characters.
    pub fn line_col(&self, offset: usize) -> (usize, usize) {
        let line = self.line_index(offset);
        let start = self.line_starts[line];
        let col = self.text[start..offset].chars().count();
        (line + 1, col + 1)
    }
}

/// One rendered location: a labelled source line plus caret columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excerpt {
    /// `1.4` for user files, `lib.` for builtin ones.
    pub label: String,
    pub text: String,
    /// 0-based character column where the carets start.
    pub caret_col: usize,
    pub caret_len: usize,
    /// The span continues past the end of the shown line.
    pub continues: bool,
}

impl Excerpt {
    /// Two lines: `- <label> <text>` and the caret row aligned under it.
    pub fn lines(&self) -> (String, String) {
        let head = format!("- {} ", self.label);
        let mut text = self.text.clone();
        if self.continues {
            text.push_str(" ...");
        }
        let first = format!("{head}{text}");
        let pad = head.chars().count() + self.caret_col;
        let carets = format!("{}{}", " ".repeat(pad), "^".repeat(self.caret_len.max(1)));
        (first.trim_end().to_string(), carets)
    }
}

#[derive(Debug, Default, Clone)]
pub struct SourceMap {
    files: Vec<SourceFile>,
}

impl SourceMap {
    pub fn new() -> Self {
        SourceMap::default()
    }

    pub fn add_file(&mut self, name: impl Into<String>, text: impl Into<String>, builtin: bool) -> FileId {
        let ordinal = if builtin { 0 } else { self.files.iter().filter(|f| !f.builtin).count() as u32 + 1 };
        let id = FileId(self.files.len() as u32);
        self.files.push(SourceFile::new(name.into(), text.into(), builtin, ordinal));
        id
    }

    pub fn file(&self, id: FileId) -> Result<&SourceFile, SourceError> {
        self.files.get(id.0 as usize).ok_or(SourceError::UnknownFile(id.0))
    }

    pub fn is_builtin(&self, loc: Location) -> bool {
        self.file(loc.file).map(|f| f.builtin).unwrap_or(false)
    }

    pub fn snippet(&self, loc: Location) -> Result<&str, SourceError> {
        let f = self.file(loc.file)?;
        Ok(&f.text[loc.start as usize..loc.end as usize])
    }

    /// 1-based (start line, start col, end line, end col); the end column is inclusive.
    pub fn line_cols(&self, loc: Location) -> Result<(usize, usize, usize, usize), SourceError> {
        let f = self.file(loc.file)?;
        let (sl, sc) = f.line_col(loc.start as usize);
        let last = if loc.end > loc.start { loc.end as usize - 1 } else { loc.start as usize };
        let (el, ec) = f.line_col(last);
        Ok((sl, sc, el, ec))
    }

    /// Render the first line of `loc` with carets under the covered columns.
    pub fn span_lookup(&self, loc: Location) -> Result<Excerpt, SourceError> {
        let f = self.file(loc.file)?;
        let start = loc.start as usize;
        let line = f.line_index(start);
        let text = f.line_text(line);
        let (_, col) = f.line_col(start);
        let end_line = f.line_index((loc.end as usize).max(start + 1) - 1);
        let continues = end_line > line;
        let line_chars = text.chars().count();
        let caret_len = if continues {
            line_chars.saturating_sub(col - 1)
        } else {
            f.text[start..loc.end as usize].chars().count()
        };
        let label = if f.builtin { "lib.".to_string() } else { format!("{}.{}", f.ordinal, line + 1) };
        Ok(Excerpt { label, text: text.to_string(), caret_col: col - 1, caret_len, continues })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carets_cover_columns() {
        let mut sm = SourceMap::new();
        let f = sm.add_file("a.ml", "let abc = xyz 1", false);
        let ex = sm.span_lookup(Location::new(f, 10, 13)).unwrap();
        assert_eq!(ex.label, "1.1");
        let (row, carets) = ex.lines();
        assert_eq!(row, "- 1.1 let abc = xyz 1");
        assert_eq!(carets, "                ^^^");
        // columns 11..13, 1-based
        assert_eq!(sm.line_cols(Location::new(f, 10, 13)).unwrap(), (1, 11, 1, 13));
    }

    #[test]
    fn builtin_label_and_multiline() {
        let mut sm = SourceMap::new();
        let p = sm.add_file("prelude", "val (+): int -> int -> int\n", true);
        let ex = sm.span_lookup(Location::new(p, 23, 26)).unwrap();
        assert_eq!(ex.lines().0, "- lib. val (+): int -> int -> int");
        assert_eq!(ex.lines().1, format!("{}^^^", " ".repeat(30)));
        let u = sm.add_file("b.ml", "match x with\n| A -> 1\n", false);
        let ex = sm.span_lookup(Location::new(u, 0, 20)).unwrap();
        assert!(ex.continues);
        assert_eq!(ex.lines().0, "- 1.1 match x with ...");
        assert_eq!(ex.caret_len, 12);
    }

    #[test]
    fn unknown_file() {
        let sm = SourceMap::new();
        assert_eq!(sm.span_lookup(Location::new(FileId(3), 0, 0)), Err(SourceError::UnknownFile(3)));
    }
}
