use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::checker::DeclInfo;
use crate::diagnostic::{Diagnostic, Span};
use crate::logic::Sort;
use crate::surface::{holes_of, parse_expr, print_pattern, PatKind, Pattern, Program};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replacement {
    pub span: Span,
    /// The text the span covered when the edit was computed.
    pub original: String,
    pub text: String,
}

/// Non-overlapping textual replacements plus the hole renumbering they make.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Edit {
    pub replacements: Vec<Replacement>,
    pub renames: BTreeMap<String, String>,
    /// Holes the edit creates, by their final names.
    pub created: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("no hole named `{0}`")]
    UnknownHole(String),
    #[error("hole `{0}` is not the whole right-hand side of a clause")]
    NotAtRoot(String),
    #[error("cannot split on `{var}`: {reason}")]
    NotSplittable { var: String, reason: String },
    #[error("cannot parse `{text}`: {diag}")]
    BadExpr { text: String, diag: Diagnostic },
    #[error("edit is stale: expected `{expected}` at {start}..{end}")]
    Stale { expected: String, start: usize, end: usize },
    #[error("edit replacements overlap")]
    Overlap,
}

/// Splices `edit` into `src`, refusing if any span no longer holds the
/// text it was computed against.
pub fn apply_edit(src: &str, edit: &Edit) -> Result<String, EditError> {
    let mut reps: Vec<&Replacement> = edit.replacements.iter().collect();
    reps.sort_by_key(|r| r.span.start);
    for w in reps.windows(2) {
        if w[0].span.end > w[1].span.start {
            return Err(EditError::Overlap);
        }
    }
    let mut out = String::with_capacity(src.len());
    let mut at = 0;
    for r in reps {
        let stale = || EditError::Stale {
            expected: r.original.clone(),
            start: r.span.start,
            end: r.span.end,
        };
        if src.get(r.span.start..r.span.end) != Some(r.original.as_str()) {
            return Err(stale());
        }
        out.push_str(&src[at..r.span.start]);
        out.push_str(&r.text);
        at = r.span.end;
    }
    out.push_str(&src[at..]);
    Ok(out)
}

/// Replaces hole `hole` by `text`, parenthesized when the hole is nested.
pub fn fill(src: &str, prog: &Program, hole: &str, text: &str) -> Result<Edit, EditError> {
    let site = prog.hole(hole).ok_or_else(|| EditError::UnknownHole(hole.into()))?;
    let text = text.trim();
    let e = parse_expr(text).map_err(|diag| EditError::BadExpr {
        text: text.to_string(),
        diag,
    })?;
    let text = if site.at_root() || e.is_atomic() {
        text.to_string()
    } else {
        format!("({text})")
    };
    Ok(Edit {
        replacements: vec![Replacement {
            span: site.span,
            original: src[site.span.start..site.span.end].to_string(),
            text,
        }],
        renames: BTreeMap::new(),
        created: Vec::new(),
    })
}

/// What each new branch of a split gets as its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Hole,
    Unit,
}

/// Replaces the clause whose body is `hole` by a `[]` clause and a cons
/// clause on parameter `var`, then renumbers all holes `_0, _1, ...` in
/// source order. `fills` chooses the body of the nil and cons branch.
pub fn case_split(
    src: &str,
    prog: &Program,
    decls: &BTreeMap<String, DeclInfo>,
    hole: &str,
    var: &str,
    fills: [Branch; 2],
) -> Result<Edit, EditError> {
    let site = prog.hole(hole).ok_or_else(|| EditError::UnknownHole(hole.into()))?;
    if !site.at_root() {
        return Err(EditError::NotAtRoot(hole.into()));
    }
    let no = |reason: &str| EditError::NotSplittable {
        var: var.to_string(),
        reason: reason.to_string(),
    };
    let decl = prog.decl(&site.decl).ok_or_else(|| no("unknown declaration"))?;
    let info = decls.get(&decl.name).ok_or_else(|| no("its signature did not check"))?;
    let clause = &decl.clauses[site.clause];
    let mut pats: Vec<PatKind> = clause.pats.iter().map(|p| p.kind.clone()).collect();
    let k = pats.len();
    let pos = match pats.iter().position(|p| *p == PatKind::Var(var.into())) {
        Some(i) => i,
        None => {
            let j = info.params.iter().position(|p| p == var);
            match j {
                Some(j) if j >= k => {
                    for p in &info.params[k..=j] {
                        pats.push(PatKind::Var(p.clone()));
                    }
                    j
                }
                Some(_) => return Err(no("it is already matched by a pattern")),
                None => return Err(no("it is not a parameter of this clause")),
            }
        }
    };
    let sort = info
        .resolved
        .split_params()
        .0
        .get(pos)
        .and_then(|(_, t)| t.base_type())
        .and_then(|b| b.sort());
    if !matches!(sort, Some(Sort::List(_))) {
        return Err(no("it is not a list"));
    }
    let mut avoid: BTreeSet<String> = pats
        .iter()
        .flat_map(|p| {
            Pattern::new(p.clone())
                .bound_names()
                .into_iter()
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .collect();
    avoid.extend(info.params.iter().cloned());
    avoid.extend(prog.decls.iter().map(|d| d.name.clone()));
    let (h, t) = fresh_pair(&avoid);

    // final numbering over the whole program
    let mut order: Vec<Option<String>> = Vec::new(); // None marks a fresh hole
    for s in holes_of(prog) {
        if s.name == hole {
            for f in fills {
                if f == Branch::Hole {
                    order.push(None);
                }
            }
        } else {
            order.push(Some(s.name.clone()));
        }
    }
    let mut renames = BTreeMap::new();
    let mut created = Vec::new();
    for (i, o) in order.iter().enumerate() {
        let new = format!("_{i}");
        match o {
            Some(old) => {
                renames.insert(old.clone(), new);
            }
            None => created.push(new),
        }
    }

    let mut replacements = Vec::new();
    let mut next_new = created.iter();
    let mut lines = Vec::new();
    for (ctor, fill) in [PatKind::Nil, PatKind::Cons(h, t)].into_iter().zip(fills) {
        let mut ps = pats.clone();
        ps[pos] = ctor;
        let mut line = decl.name.clone();
        for p in ps {
            line.push(' ');
            line.push_str(&print_pattern(&Pattern::new(p)));
        }
        let body = match fill {
            Branch::Hole => next_new.next().cloned().unwrap_or_default(),
            Branch::Unit => "()".to_string(),
        };
        line.push_str(" = ");
        line.push_str(&body);
        lines.push(line);
    }
    replacements.push(Replacement {
        span: clause.span,
        original: src[clause.span.start..clause.span.end].to_string(),
        text: lines.join("\n"),
    });
    for s in holes_of(prog) {
        if let Some(new) = renames.get(&s.name) {
            if *new != s.name {
                replacements.push(Replacement {
                    span: s.span,
                    original: s.name.clone(),
                    text: new.clone(),
                });
            }
        }
    }
    renames.retain(|k, v| k != v);
    Ok(Edit {
        replacements,
        renames,
        created,
    })
}

fn fresh_pair(avoid: &BTreeSet<String>) -> (String, String) {
    for i in 0.. {
        for b in ["y", "z", "w"] {
            let (h, t) = if i == 0 {
                (b.to_string(), format!("{b}s"))
            } else {
                (format!("{b}{i}"), format!("{b}s{i}"))
            };
            if !avoid.contains(&h) && !avoid.contains(&t) {
                return (h, t);
            }
        }
    }
    unreachable!()
}
