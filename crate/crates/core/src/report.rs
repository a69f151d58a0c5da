//! The `lqh/1` JSON payload shared by the CLI and the service.

use serde::Serialize;

use crate::diagnostic::Span;
use crate::diagnostic::{line_col, LocatedDiagnostic, SourceSpan};
use crate::session::{Analysis, HoleReport};

pub const SCHEMA: &str = "lqh/1";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_source: Option<String>,
    pub diagnostics: Vec<LocatedDiagnostic>,
    pub holes: Vec<HoleJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HoleJson {
    pub id: String,
    pub span: SourceSpan,
    pub raw_type: String,
    pub simplified_type: String,
    pub env: Vec<Binding>,
    pub facts: Vec<String>,
    pub actions: Vec<ActionJson>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Binding {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionJson {
    pub kind: &'static str,
    pub message: String,
    pub edit_preview: Option<String>,
}

pub fn source_span(file: &str, source: &str, span: Span) -> SourceSpan {
    let (line, col) = line_col(source, span.start);
    let (end_line, end_col) = line_col(source, span.end);
    SourceSpan {
        file: file.to_string(),
        line,
        col,
        end_line,
        end_col,
    }
}

pub fn hole_json(file: &str, source: &str, h: &HoleReport) -> HoleJson {
    HoleJson {
        id: h.site.name.clone(),
        span: source_span(file, source, h.site.span),
        raw_type: h.goal.raw.to_string(),
        simplified_type: h.goal.simplified.to_string(),
        env: h
            .goal
            .env
            .iter()
            .map(|(n, t)| Binding {
                name: n.clone(),
                ty: t.to_string(),
            })
            .collect(),
        facts: h.goal.facts.iter().map(|p| p.to_string()).collect(),
        actions: h
            .actions
            .iter()
            .map(|a| ActionJson {
                kind: a.action.kind.tag(),
                message: a.action.message.clone(),
                edit_preview: a.preview.clone(),
            })
            .collect(),
        message: h.message.clone(),
    }
}

/// Report for `a`; hole diagnostics are included when `with_holes`.
pub fn report(file: &str, a: &Analysis, with_holes: bool) -> Report {
    Report {
        schema: SCHEMA,
        new_source: None,
        diagnostics: a
            .diagnostics(with_holes)
            .iter()
            .map(|d| d.locate(file, &a.source))
            .collect(),
        holes: a.holes.iter().map(|h| hole_json(file, &a.source, h)).collect(),
    }
}

/// Structural check of a payload against the published schema.
pub fn validate(v: &serde_json::Value) -> Result<(), String> {
    use serde_json::Value as J;
    fn obj<'a>(v: &'a J, at: &str) -> Result<&'a serde_json::Map<String, J>, String> {
        v.as_object().ok_or_else(|| format!("{at}: expected object"))
    }
    fn field<'a>(m: &'a serde_json::Map<String, J>, k: &str, at: &str) -> Result<&'a J, String> {
        m.get(k).ok_or_else(|| format!("{at}: missing `{k}`"))
    }
    fn string(v: &J, at: &str) -> Result<(), String> {
        v.is_string()
            .then_some(())
            .ok_or_else(|| format!("{at}: expected string"))
    }
    fn array<'a>(v: &'a J, at: &str) -> Result<&'a Vec<J>, String> {
        v.as_array().ok_or_else(|| format!("{at}: expected array"))
    }
    fn span(v: &J, at: &str) -> Result<(), String> {
        let m = obj(v, at)?;
        string(field(m, "file", at)?, at)?;
        for k in ["line", "col", "end_line", "end_col"] {
            let n = field(m, k, at)?
                .as_u64()
                .ok_or_else(|| format!("{at}.{k}: expected integer"))?;
            if n == 0 {
                return Err(format!("{at}.{k}: positions are 1-based"));
            }
        }
        Ok(())
    }
    let top = obj(v, "$")?;
    if field(top, "schema", "$")? != SCHEMA {
        return Err("$.schema: expected \"lqh/1\"".into());
    }
    if let Some(s) = top.get("new_source") {
        string(s, "$.new_source")?;
    }
    for (i, d) in array(field(top, "diagnostics", "$")?, "$.diagnostics")?
        .iter()
        .enumerate()
    {
        let at = format!("$.diagnostics[{i}]");
        let m = obj(d, &at)?;
        let sev = field(m, "severity", &at)?.as_str().unwrap_or_default();
        if !["error", "warning", "info"].contains(&sev) {
            return Err(format!("{at}.severity: bad value"));
        }
        string(field(m, "code", &at)?, &at)?;
        string(field(m, "message", &at)?, &at)?;
        span(field(m, "span", &at)?, &format!("{at}.span"))?;
    }
    for (i, h) in array(field(top, "holes", "$")?, "$.holes")?.iter().enumerate() {
        let at = format!("$.holes[{i}]");
        let m = obj(h, &at)?;
        for k in ["id", "raw_type", "simplified_type", "message"] {
            string(field(m, k, &at)?, &format!("{at}.{k}"))?;
        }
        span(field(m, "span", &at)?, &format!("{at}.span"))?;
        for (j, b) in array(field(m, "env", &at)?, &at)?.iter().enumerate() {
            let at = format!("{at}.env[{j}]");
            let b = obj(b, &at)?;
            string(field(b, "name", &at)?, &at)?;
            string(field(b, "type", &at)?, &at)?;
        }
        for f in array(field(m, "facts", &at)?, &at)? {
            string(f, &format!("{at}.facts"))?;
        }
        for (j, a) in array(field(m, "actions", &at)?, &at)?.iter().enumerate() {
            let at = format!("{at}.actions[{j}]");
            let a = obj(a, &at)?;
            let kind = field(a, "kind", &at)?.as_str().unwrap_or_default();
            if !["fill_unit", "split", "fill_expr", "unfold_view"].contains(&kind) {
                return Err(format!("{at}.kind: bad value"));
            }
            string(field(a, "message", &at)?, &at)?;
            let p = field(a, "edit_preview", &at)?;
            if !(p.is_null() || p.is_string()) {
                return Err(format!("{at}.edit_preview: expected string or null"));
            }
        }
    }
    Ok(())
}
