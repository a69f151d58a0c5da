use std::fmt;

use serde::Serialize;

/// Byte range into a source text, end-exclusive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

/// Machine-readable diagnostic category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    Lex,
    Parse,
    DuplicateHole,
    Layout,
    Alias,
    WellFormed,
    Unbound,
    Arity,
    Sort,
    Termination,
    InvalidVc,
    UnknownVc,
    Unsupported,
    Hole,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Lex => "LEX",
            Code::Parse => "PARSE",
            Code::DuplicateHole => "DUPLICATE_HOLE",
            Code::Layout => "LAYOUT",
            Code::Alias => "ALIAS",
            Code::WellFormed => "WELL_FORMED",
            Code::Unbound => "UNBOUND",
            Code::Arity => "ARITY",
            Code::Sort => "SORT",
            Code::Termination => "TERMINATION",
            Code::InvalidVc => "INVALID_VC",
            Code::UnknownVc => "UNKNOWN_VC",
            Code::Unsupported => "UNSUPPORTED",
            Code::Hole => "HOLE",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    /// `None` for diagnostics without a source location (e.g. a built-in alias).
    pub span: Option<Span>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, span: impl Into<Option<Span>>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            span: span.into(),
            message: message.into(),
        }
    }

    pub fn at(mut self, span: Span) -> Self {
        if self.span.is_none() {
            self.span = Some(span);
        }
        self
    }

    pub fn locate(&self, file: &str, source: &str) -> LocatedDiagnostic {
        let span = self.span.unwrap_or_default();
        let (line, col) = line_col(source, span.start);
        let (end_line, end_col) = line_col(source, span.end);
        LocatedDiagnostic {
            severity: self.severity,
            code: self.code,
            span: SourceSpan {
                file: file.to_string(),
                line,
                col,
                end_line,
                end_col,
            },
            message: self.message.clone(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]: {}", self.severity, self.code, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// 1-based line/column position range; end-exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocatedDiagnostic {
    pub severity: Severity,
    pub code: Code,
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for LocatedDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}[{}]: {}",
            self.span.file, self.span.line, self.span.col, self.severity, self.code, self.message
        )
    }
}

/// 1-based (line, column) of a byte offset; columns count characters.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let mut line = 1;
    let mut line_start = 0;
    for (i, b) in source.bytes().enumerate() {
        if i >= offset {
            break;
        }
        if b == b'\n' {
            line += 1;
            line_start = i + 1;
        }
    }
    let col = source[line_start..offset].chars().count() + 1;
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_counts_from_one() {
        let src = "ab\ncd";
        assert_eq!(line_col(src, 0), (1, 1));
        assert_eq!(line_col(src, 2), (1, 3));
        assert_eq!(line_col(src, 3), (2, 1));
        assert_eq!(line_col(src, 5), (2, 3));
    }

    #[test]
    fn located_diagnostic_display() {
        let d = Diagnostic::error(Code::Unbound, Span::new(3, 4), "unbound variable `w`");
        let l = d.locate("a.lqh", "f =\n w");
        assert_eq!(l.to_string(), "a.lqh:1:4: error[UNBOUND]: unbound variable `w`");
    }
}
