use std::collections::{BTreeMap, HashSet};

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use crate::diagnostic::{Code, Diagnostic, Span};
use crate::logic::{BaseType, BinOp, Pred, RType, Refinement};

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    /// Offset used for errors at the end of the item.
    eof: usize,
}

enum Item {
    Alias(AliasDecl),
    Sig(String, RType, Span),
    Clause(String, Clause),
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], eof: usize) -> Self {
        Parser { toks, pos: 0, eof }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.toks
            .get(self.pos)
            .map(|t| t.span)
            .unwrap_or(Span::new(self.eof, self.eof))
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            self.toks.first().map(|t| t.span.start).unwrap_or(self.eof)
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        let found = match self.peek() {
            Some(t) => format!("found {t}"),
            None => "found end of item".to_string(),
        };
        Err(Diagnostic::error(
            Code::Parse,
            self.span(),
            format!("expected {what}, {found}"),
        ))
    }

    fn expect(&mut self, tok: &Tok) -> PResult<Span> {
        if self.peek() == Some(tok) {
            Ok(self.bump().unwrap().span)
        } else {
            self.error(&tok.to_string())
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(Tok::Ident(x)) => {
                let x = x.clone();
                let s = self.bump().unwrap().span;
                Ok((x, s))
            }
            _ => self.error("an identifier"),
        }
    }

    // ---- items ----

    fn item(&mut self) -> PResult<Item> {
        let start = self.span().start;
        match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Type), _) => {
                self.bump();
                let (name, _) = self.ident()?;
                if !name.starts_with(char::is_uppercase) {
                    return Err(Diagnostic::error(
                        Code::Parse,
                        Span::new(start, self.prev_end()),
                        format!("type alias name `{name}` must start with an uppercase letter"),
                    ));
                }
                self.expect(&Tok::Equals)?;
                let def = self.rtype()?;
                self.finish()?;
                Ok(Item::Alias(AliasDecl {
                    name,
                    def,
                    span: Span::new(start, self.prev_end()),
                }))
            }
            (Some(Tok::Ident(_)), Some(Tok::DColon)) => {
                let (name, _) = self.ident()?;
                self.bump();
                let t = self.rtype()?;
                self.finish()?;
                Ok(Item::Sig(name, t, Span::new(start, self.prev_end())))
            }
            (Some(Tok::Ident(_)), _) => {
                let (name, _) = self.ident()?;
                let mut pats = Vec::new();
                while self.peek() != Some(&Tok::Equals) && !self.at_end() {
                    pats.push(self.pattern()?);
                }
                self.expect(&Tok::Equals)?;
                let body = self.expr()?;
                self.finish()?;
                check_distinct(&pats)?;
                Ok(Item::Clause(
                    name,
                    Clause {
                        pats,
                        body,
                        span: Span::new(start, self.prev_end()),
                    },
                ))
            }
            _ => self.error("a type alias, signature or clause"),
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.error("end of item (continuation lines must be indented)")
        }
    }

    // ---- types ----

    fn rtype(&mut self) -> PResult<RType> {
        let binder = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Ident(x)), Some(Tok::Colon)) if x.starts_with(char::is_lowercase) => {
                let x = x.clone();
                self.pos += 2;
                Some(x)
            }
            _ => None,
        };
        let dom = self.btype()?;
        if self.eat(&Tok::Arrow) {
            let cod = self.rtype()?;
            Ok(RType::Fun {
                binder,
                dom: Box::new(dom),
                cod: Box::new(cod),
            })
        } else if binder.is_some() {
            self.error("`->` after a named parameter")
        } else {
            Ok(dom)
        }
    }

    fn btype(&mut self) -> PResult<RType> {
        match self.peek() {
            Some(Tok::LBrace) => {
                self.bump();
                let binder = match self.peek() {
                    Some(Tok::Underscore) => {
                        self.bump();
                        "_".to_string()
                    }
                    _ => self.ident()?.0,
                };
                self.expect(&Tok::Colon)?;
                let base = self.base()?;
                self.expect(&Tok::Bar)?;
                let pred = self.pred()?;
                self.expect(&Tok::RBrace)?;
                Ok(RType::Base {
                    base,
                    refinement: Some(Refinement { binder, pred }),
                })
            }
            Some(Tok::LParen) if self.peek_at(1) != Some(&Tok::RParen) => {
                self.bump();
                let t = self.rtype()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => Ok(RType::base(self.base()?)),
        }
    }

    fn base(&mut self) -> PResult<BaseType> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.bump();
                self.expect(&Tok::RParen)?;
                Ok(BaseType::Unit)
            }
            Some(Tok::LBracket) => {
                self.bump();
                let e = self.base()?;
                self.expect(&Tok::RBracket)?;
                Ok(BaseType::list(e))
            }
            Some(Tok::Underscore) => {
                self.bump();
                Ok(BaseType::Infer)
            }
            Some(Tok::Ident(x)) => {
                self.bump();
                Ok(match x.as_str() {
                    "Int" => BaseType::Int,
                    "Bool" => BaseType::Bool,
                    _ if x.starts_with(char::is_lowercase) => BaseType::TyVar(x),
                    _ => BaseType::Alias(x),
                })
            }
            _ => self.error("a base type"),
        }
    }

    fn pred(&mut self) -> PResult<Pred> {
        let e = self.expr()?;
        match e.to_pred() {
            Some(p) => Ok(p),
            None => Err(Diagnostic::error(
                Code::Parse,
                e.span,
                "holes and `?` are not allowed inside refinements",
            )),
        }
    }

    // ---- patterns ----

    fn pat_name(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Underscore) => {
                self.bump();
                Ok("_".into())
            }
            Some(Tok::Ident(x)) if x.starts_with(char::is_lowercase) => {
                let x = x.clone();
                self.bump();
                Ok(x)
            }
            _ => self.error("a variable or `_`"),
        }
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let start = self.span().start;
        let kind = match self.peek().cloned() {
            Some(Tok::Underscore) => {
                self.bump();
                PatKind::Wildcard
            }
            Some(Tok::Ident(x)) if x.starts_with(char::is_lowercase) => {
                self.bump();
                PatKind::Var(x)
            }
            Some(Tok::Int(n)) => {
                self.bump();
                PatKind::Int(n)
            }
            Some(Tok::LBracket) => {
                self.bump();
                self.expect(&Tok::RBracket)?;
                PatKind::Nil
            }
            Some(Tok::LParen) => {
                self.bump();
                let kind = match (self.peek().cloned(), self.peek_at(1)) {
                    (Some(Tok::Minus), Some(Tok::Int(n))) => {
                        let n = -*n;
                        self.pos += 2;
                        PatKind::Int(n)
                    }
                    (Some(Tok::LBracket), _) | (Some(Tok::LParen), _) => {
                        return Err(Diagnostic::error(
                            Code::Parse,
                            self.span(),
                            "nested patterns are not supported",
                        ))
                    }
                    _ => {
                        let h = self.pat_name()?;
                        if self.eat(&Tok::Colon) {
                            let t = self.pat_name()?;
                            PatKind::Cons(h, t)
                        } else if h == "_" {
                            PatKind::Wildcard
                        } else {
                            PatKind::Var(h)
                        }
                    }
                };
                self.expect(&Tok::RParen)?;
                kind
            }
            _ => return self.error("a pattern"),
        };
        Ok(Pattern {
            kind,
            span: Span::new(start, self.prev_end()),
        })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(0)
    }

    fn binop(&self) -> Option<(Option<BinOp>, u8, bool, bool)> {
        // (op, level, right-assoc, non-assoc); `None` op means `?` or `:`
        let op = match self.peek()? {
            Tok::Question => return Some((None, 1, false, false)),
            Tok::Colon => return Some((None, 6, true, false)),
            Tok::FatArrow => BinOp::Implies,
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Mod => BinOp::Mod,
            _ => return None,
        };
        let (level, assoc) = op.fixity();
        use crate::logic::pred::Assoc;
        Some((Some(op), level, assoc == Assoc::Right, assoc == Assoc::Non))
    }

    fn binary(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.prefix()?;
        while let Some((op, level, right, non)) = self.binop() {
            if level < min {
                break;
            }
            let tok = self.peek().cloned();
            self.bump();
            let rhs = self.binary(if right { level } else { level + 1 })?;
            let span = lhs.span.join(rhs.span);
            let kind = match (op, tok) {
                (Some(op), _) => ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                (None, Some(Tok::Colon)) => ExprKind::Cons(Box::new(lhs), Box::new(rhs)),
                (None, _) => ExprKind::Proof(Box::new(lhs), Box::new(rhs)),
            };
            lhs = Expr::new(kind, span);
            if non {
                if let Some((_, l2, _, _)) = self.binop() {
                    if l2 == level {
                        return Err(Diagnostic::error(
                            Code::Parse,
                            self.span(),
                            "comparison operators do not chain; add parentheses",
                        ));
                    }
                }
            }
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        match self.peek() {
            Some(Tok::If) => {
                self.bump();
                let c = self.expr()?;
                self.expect(&Tok::Then)?;
                let t = self.expr()?;
                self.expect(&Tok::Else)?;
                let e = self.expr()?;
                let span = Span::new(start, e.span.end);
                Ok(Expr::new(ExprKind::If(Box::new(c), Box::new(t), Box::new(e)), span))
            }
            Some(Tok::Minus) => {
                self.bump();
                if let Some(Tok::Int(n)) = self.peek() {
                    let n = -*n;
                    self.bump();
                    return Ok(Expr::new(ExprKind::Int(n), Span::new(start, self.prev_end())));
                }
                let e = self.app()?;
                let span = Span::new(start, e.span.end);
                let zero = Expr::new(ExprKind::Int(0), Span::new(start, start + 1));
                Ok(Expr::new(
                    ExprKind::Binary(BinOp::Sub, Box::new(zero), Box::new(e)),
                    span,
                ))
            }
            Some(Tok::Not) => {
                self.bump();
                let e = self.atom()?;
                let span = Span::new(start, e.span.end);
                Ok(Expr::new(ExprKind::Not(Box::new(e)), span))
            }
            _ => self.app(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Int(_) | Tok::True | Tok::False | Tok::Ident(_) | Tok::Hole(_) | Tok::LParen | Tok::LBracket)
        )
    }

    fn app(&mut self) -> PResult<Expr> {
        if let Some(Tok::Ident(f)) = self.peek() {
            let f = f.clone();
            let head = self.bump().unwrap().span;
            let mut args = Vec::new();
            while self.starts_atom() {
                args.push(self.atom()?);
            }
            if args.is_empty() {
                return Ok(Expr::new(ExprKind::Var(f), head));
            }
            let span = Span::new(head.start, self.prev_end());
            return Ok(Expr::new(ExprKind::App(f, args), span));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        let kind = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.bump();
                ExprKind::Int(n)
            }
            Some(Tok::True) => {
                self.bump();
                ExprKind::Bool(true)
            }
            Some(Tok::False) => {
                self.bump();
                ExprKind::Bool(false)
            }
            Some(Tok::Ident(x)) => {
                self.bump();
                ExprKind::Var(x)
            }
            Some(Tok::Hole(h)) => {
                self.bump();
                ExprKind::Hole(h)
            }
            Some(Tok::LParen) => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    ExprKind::Unit
                } else {
                    let mut e = self.expr()?;
                    self.expect(&Tok::RParen)?;
                    e.span = Span::new(start, self.prev_end());
                    return Ok(e);
                }
            }
            Some(Tok::LBracket) => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if self.eat(&Tok::RBracket) {
                            break;
                        }
                        self.expect(&Tok::Comma)?;
                    }
                }
                let end = self.prev_end();
                let mut acc = Expr::new(ExprKind::Nil, Span::new(end - 1, end));
                for it in items.into_iter().rev() {
                    let s = Span::new(it.span.start, end);
                    acc = Expr::new(ExprKind::Cons(Box::new(it), Box::new(acc)), s);
                }
                if let ExprKind::Nil = acc.kind {
                    acc.span = Span::new(start, end);
                }
                return Ok(acc);
            }
            Some(Tok::Underscore) => {
                return Err(Diagnostic::error(
                    Code::Parse,
                    self.span(),
                    "`_` is only allowed in patterns and types; name holes like `_0`",
                ))
            }
            _ => return self.error("an expression"),
        };
        Ok(Expr::new(kind, Span::new(start, self.prev_end())))
    }
}

fn check_distinct(pats: &[Pattern]) -> PResult<()> {
    let mut seen = HashSet::new();
    for p in pats {
        for n in p.bound_names() {
            if !seen.insert(n) {
                return Err(Diagnostic::error(
                    Code::Parse,
                    p.span,
                    format!("`{n}` is bound more than once in this clause"),
                ));
            }
        }
    }
    Ok(())
}

/// Splits tokens into top-level items; each item starts at column 1.
fn items(toks: &[Token]) -> (Vec<&[Token]>, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let mut start = 0;
    if let Some(first) = toks.first() {
        if !first.line_start {
            errs.push(Diagnostic::error(
                Code::Layout,
                first.span,
                "top-level items must start at column 1",
            ));
        }
    }
    for i in 1..=toks.len() {
        if i == toks.len() || toks[i].line_start {
            if i > start {
                out.push(&toks[start..i]);
            }
            start = i;
        }
    }
    (out, errs)
}

pub fn parse_program(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let toks = lex(src).map_err(|d| vec![d])?;
    let (chunks, mut errs) = items(&toks);
    if !errs.is_empty() {
        return Err(errs);
    }
    let mut prog = Program::default();
    let mut seen_sig: BTreeMap<String, Span> = BTreeMap::new();
    let mut open: Option<usize> = None; // index into prog.decls accepting clauses
    let mut closed: HashSet<String> = HashSet::new();
    for chunk in chunks {
        let eof = chunk.last().map(|t| t.span.end).unwrap_or(0);
        let mut p = Parser::new(chunk, eof);
        match p.item() {
            Err(d) => errs.push(d),
            Ok(Item::Alias(a)) => {
                if prog.aliases.iter().any(|b| b.name == a.name) {
                    errs.push(Diagnostic::error(
                        Code::Alias,
                        a.span,
                        format!("type alias `{}` is defined twice", a.name),
                    ));
                }
                prog.aliases.push(a);
                if let Some(i) = open.take() {
                    closed.insert(prog.decls[i].name.clone());
                }
            }
            Ok(Item::Sig(name, sig, span)) => {
                if let Some(i) = open.take() {
                    closed.insert(prog.decls[i].name.clone());
                }
                if seen_sig.contains_key(&name) {
                    errs.push(Diagnostic::error(
                        Code::Parse,
                        span,
                        format!("duplicate signature for `{name}`"),
                    ));
                    continue;
                }
                seen_sig.insert(name.clone(), span);
                prog.decls.push(Decl {
                    name,
                    sig,
                    sig_span: span,
                    clauses: vec![],
                });
                open = Some(prog.decls.len() - 1);
            }
            Ok(Item::Clause(name, clause)) => match open {
                Some(i) if prog.decls[i].name == name => {
                    let d = &mut prog.decls[i];
                    if let Some(first) = d.clauses.first() {
                        if first.pats.len() != clause.pats.len() {
                            errs.push(Diagnostic::error(
                                Code::Arity,
                                clause.span,
                                format!(
                                    "clauses of `{name}` have different numbers of arguments ({} and {})",
                                    first.pats.len(),
                                    clause.pats.len()
                                ),
                            ));
                        }
                    }
                    d.clauses.push(clause);
                }
                _ => {
                    let msg = if closed.contains(&name) {
                        format!("clauses of `{name}` must be contiguous and follow its signature")
                    } else {
                        format!("clause for `{name}` has no preceding type signature")
                    };
                    errs.push(Diagnostic::error(Code::Parse, clause.span, msg));
                }
            },
        }
    }
    for d in &prog.decls {
        if d.clauses.is_empty() {
            errs.push(Diagnostic::error(
                Code::Parse,
                d.sig_span,
                format!("`{}` has a type signature but no definition", d.name),
            ));
        }
    }
    let mut holes = HashSet::new();
    for h in holes_of(&prog) {
        if !holes.insert(h.name.clone()) {
            errs.push(Diagnostic::error(
                Code::DuplicateHole,
                h.span,
                format!("hole `{}` occurs more than once", h.name),
            ));
        }
    }
    if errs.is_empty() {
        Ok(prog)
    } else {
        errs.sort_by_key(|d| d.span.map(|s| s.start));
        Err(errs)
    }
}

/// Parses a standalone expression, as used by hole filling.
pub fn parse_expr(src: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser::new(&toks, src.len());
    let e = p.expr()?;
    if !p.at_end() {
        return p.error("end of expression");
    }
    Ok(e)
}

pub fn parse_type(src: &str) -> Result<RType, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser::new(&toks, src.len());
    let t = p.rtype()?;
    if !p.at_end() {
        return p.error("end of type");
    }
    Ok(t)
}

pub fn parse_pred(src: &str) -> Result<Pred, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser::new(&toks, src.len());
    let t = p.pred()?;
    if !p.at_end() {
        return p.error("end of predicate");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ODD_ADD: &str = "type EvenInt = { v:Int | v mod 2 == 0 }
type OddInt = { v:Int | v mod 2 == 1 }

oddAdd :: OddInt -> OddInt -> EvenInt
oddAdd x y = x + y
";

    #[test]
    fn parses_odd_add() {
        let p = parse_program(ODD_ADD).unwrap();
        assert_eq!(p.aliases.len(), 2);
        assert_eq!(p.decls.len(), 1);
        assert_eq!(p.decls[0].clauses.len(), 1);
        assert_eq!(p.aliases[1].def.to_string(), "{ v:Int | v mod 2 == 1 }");
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_program("").unwrap(), Program::default());
        assert_eq!(parse_program("-- nothing\n\n").unwrap(), Program::default());
    }

    #[test]
    fn single_hole_body() {
        let p = parse_program("f :: Int -> Int\nf x = _0").unwrap();
        assert_eq!(p.decls[0].clauses[0].body.kind, ExprKind::Hole("_0".into()));
    }

    #[test]
    fn sample_signatures() {
        let p =
            parse_program("sumOdd :: x : OddInt -> y : EvenInt -> { _:Proof | (x + y) mod 2 == 1 }\nsumOdd _ _ = ()")
                .unwrap();
        assert_eq!(
            p.decls[0].sig.to_string(),
            "x:OddInt -> y:EvenInt -> { _:Proof | (x + y) mod 2 == 1 }"
        );
        let q = parse_program(
            "listLength :: xs:_ -> { v : Nat | v == len xs }\nlistLength []     = _0\nlistLength (y:ys) = 1 + _1",
        )
        .unwrap();
        assert_eq!(q.decls[0].clauses.len(), 2);
        assert_eq!(
            q.decls[0].clauses[1].pats[0].kind,
            PatKind::Cons("y".into(), "ys".into())
        );
    }

    #[test]
    fn rejects_duplicate_holes_and_layout() {
        let e = parse_program("f :: Int -> Int\nf x = _0 + _0").unwrap_err();
        assert_eq!(e[0].code, Code::DuplicateHole);
        let e = parse_program("  f :: Int").unwrap_err();
        assert_eq!(e[0].code, Code::Layout);
    }

    #[test]
    fn clause_ordering_errors() {
        let e = parse_program("g x = x").unwrap_err();
        assert!(e[0].message.contains("no preceding type signature"));
        let e = parse_program("f :: Int -> Int\nf x = x\ng :: Int\ng = 1\nf y = y").unwrap_err();
        assert!(e[0].message.contains("contiguous"));
    }

    #[test]
    fn precedence() {
        let e = parse_expr("1 + 2 * x == y && not b").unwrap();
        assert_eq!(e.to_pred().unwrap().to_string(), "1 + 2 * x == y && not b");
        let e = parse_expr("a - (b - c)").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary(BinOp::Sub, _, _)));
        assert!(parse_expr("a == b == c").is_err());
        let e = parse_expr("[1, 2]").unwrap();
        assert_eq!(e.to_pred().unwrap().to_string(), "(1:(2:[]))");
        let e = parse_expr("f x ? g y ? h").unwrap();
        assert!(matches!(e.kind, ExprKind::Proof(..)));
    }

    #[test]
    fn negative_literals() {
        assert_eq!(parse_expr("-3").unwrap().kind, ExprKind::Int(-3));
        assert_eq!(
            parse_expr("x + (-3)").unwrap().to_pred().unwrap(),
            Pred::add(Pred::var("x"), Pred::Int(-3))
        );
    }
}
