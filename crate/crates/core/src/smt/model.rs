use std::collections::BTreeMap;
use std::fmt;

use crate::surface::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExp {
    Atom(String),
    List(Vec<SExp>),
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExp::Atom(a) => f.write_str(a),
            SExp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses a sequence of s-expressions, skipping `;` comments.
pub fn parse_sexps(src: &str) -> Option<Vec<SExp>> {
    let mut stack: Vec<Vec<SExp>> = vec![vec![]];
    let mut chars = src.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            ';' => {
                for d in chars.by_ref() {
                    if d == '\n' {
                        break;
                    }
                }
            }
            '(' => stack.push(vec![]),
            ')' => {
                let done = stack.pop()?;
                stack.last_mut()?.push(SExp::List(done));
            }
            '|' => {
                let mut s = String::from("|");
                for d in chars.by_ref() {
                    s.push(d);
                    if d == '|' {
                        break;
                    }
                }
                stack.last_mut()?.push(SExp::Atom(s));
            }
            '"' => {
                let mut s = String::from("\"");
                while let Some(d) = chars.next() {
                    s.push(d);
                    if d == '"' {
                        if chars.peek() == Some(&'"') {
                            s.push(chars.next().unwrap());
                        } else {
                            break;
                        }
                    }
                }
                stack.last_mut()?.push(SExp::Atom(s));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' || d == ';' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                stack.last_mut()?.push(SExp::Atom(s));
            }
        }
    }
    if stack.len() == 1 {
        stack.pop()
    } else {
        None
    }
}

/// Whether `src` holds one complete s-expression (balanced parentheses).
pub fn is_complete(src: &str) -> bool {
    let mut depth = 0i64;
    let mut seen = false;
    let mut in_bar = false;
    let mut in_str = false;
    let mut in_comment = false;
    for c in src.chars() {
        if in_comment {
            in_comment = c != '\n';
            continue;
        }
        if in_bar {
            in_bar = c != '|';
            continue;
        }
        if in_str {
            in_str = c != '"';
            continue;
        }
        match c {
            ';' => in_comment = true,
            '|' => in_bar = true,
            '"' => in_str = true,
            '(' => {
                depth += 1;
                seen = true;
            }
            ')' => depth -= 1,
            _ => {}
        }
    }
    seen && depth <= 0
}

/// Assignment of source variables to ground values.
pub type Model = BTreeMap<String, Value>;

fn value(e: &SExp) -> Option<Value> {
    match e {
        SExp::Atom(a) => {
            if let Ok(n) = a.parse::<i64>() {
                return Some(Value::Int(n));
            }
            match a.as_str() {
                "true" => Some(Value::Bool(true)),
                "false" => Some(Value::Bool(false)),
                "unit" => Some(Value::Unit),
                "nil" => Some(Value::List(vec![])),
                // opaque elements, e.g. `s.a!val!0`
                a if a.contains("!val!") => Some(Value::Atom(a.replace("s.", "").replace("!val!", "#"))),
                _ => None,
            }
        }
        SExp::List(xs) => match xs.as_slice() {
            [SExp::Atom(m), x] if m == "-" => match value(x)? {
                Value::Int(n) => Some(Value::Int(-n)),
                _ => None,
            },
            [SExp::Atom(a), x, _] if a == "as" => value(x),
            [SExp::Atom(c), h, t] if c == "cons" => {
                let h = value(h)?;
                match value(t)? {
                    Value::List(mut rest) => {
                        rest.insert(0, h);
                        Some(Value::List(rest))
                    }
                    _ => None,
                }
            }
            _ => None,
        },
    }
}

/// Extracts constant definitions from a `(get-model)` response, mapping SMT
/// symbols back through `symbols`. Unparseable entries are skipped.
pub fn parse_model(text: &str, symbols: &BTreeMap<String, String>) -> Option<Model> {
    let sexps = parse_sexps(text)?;
    let items = match sexps.as_slice() {
        [SExp::List(items)] => items.clone(),
        _ => return None,
    };
    let mut out = Model::new();
    for it in &items {
        let SExp::List(parts) = it else { continue };
        match parts.as_slice() {
            [SExp::Atom(d), SExp::Atom(name), SExp::List(args), _sort, body]
                if d == "define-fun" && args.is_empty() =>
            {
                let Some(src) = symbols.get(name) else {
                    continue;
                };
                if let Some(v) = value(body) {
                    out.insert(src.clone(), v);
                }
            }
            _ => {}
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_z3_model_with_noise() {
        let text = r#"(
  ;; universe for s.a:
  ;;   s.a!val!0
  (declare-fun s.a!val!0 () s.a)
  (forall ((x s.a)) (= x s.a!val!0))
  (define-fun x () Int
    1)
  (define-fun y () Int
    (- 3))
  (define-fun xs () (List s.a)
    (cons s.a!val!0 (as nil (List s.a))))
  (define-fun |x'| () Bool true)
  (define-fun len.s.a ((x!0 (List s.a))) Int
    2)
)"#;
        let syms: BTreeMap<String, String> = [
            ("x".to_string(), "x".to_string()),
            ("y".to_string(), "y".to_string()),
            ("xs".to_string(), "xs".to_string()),
            ("|x'|".to_string(), "x'".to_string()),
        ]
        .into();
        let m = parse_model(text, &syms).unwrap();
        assert_eq!(m["x"], Value::Int(1));
        assert_eq!(m["y"], Value::Int(-3));
        assert_eq!(m["xs"], Value::List(vec![Value::Atom("a#0".into())]));
        assert_eq!(m["x'"], Value::Bool(true));
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn completeness() {
        assert!(is_complete("(model (define-fun x () Int 1))"));
        assert!(!is_complete("(model (define-fun x () Int"));
        assert!(!is_complete("sat"));
        assert!(parse_model("garbage (", &BTreeMap::new()).is_none());
    }
}
