//! Invariants of the hole engine and the checker beyond the acceptance set.

mod common;

use common::{corpus, corpus_files, session};
use lqh::diagnostic::Code;
use lqh::holes::ActionKind;
use lqh::report::report;
use lqh::session::OpError;
use lqh::surface::{evaluate, parse_program, PatKind, Value};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn analysis_is_deterministic() {
    let mut s1 = session();
    let mut s2 = session();
    for (name, src) in corpus_files() {
        let a = serde_json::to_string(&report(&name, &s1.analyze(&src), true)).unwrap();
        let b = serde_json::to_string(&report(&name, &s2.analyze(&src), true)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

/// Clauses whose span contains an error diagnostic.
fn clause_has_error(a: &lqh::session::Analysis, decl: &str, clause: usize) -> bool {
    let prog = a.program.as_ref().unwrap();
    let span = prog.decl(decl).unwrap().clauses[clause].span;
    a.diagnostics(false)
        .iter()
        .any(|d| d.span.is_some_and(|s| span.contains(s)))
}

#[test]
fn fill_unit_certificate_implies_clause_accepts() {
    let mut s = session();
    let mut certified = 0;
    for (name, src) in corpus_files() {
        let a = s.analyze(&src);
        for h in &a.holes {
            if !h.actions.iter().any(|r| r.action.kind == ActionKind::FillUnit) {
                continue;
            }
            certified += 1;
            let o = s.fill(&src, &h.site.name, "()").unwrap();
            assert!(
                !clause_has_error(&o.analysis, &h.site.decl, h.site.clause),
                "{name} {}: {:?}",
                h.site.name,
                o.analysis.diagnostics(false)
            );
        }
    }
    assert!(certified >= 1);
}

/// `try_unit` agrees with rechecking after filling `()`, on generated goals.
#[test]
fn fill_unit_agrees_with_recheck_on_generated_goals() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut s = session();
    let (mut yes, mut no) = (0, 0);
    for i in 0..100 {
        let k = rng.random_range(-3..=3);
        let c = rng.random_range(-3..=3);
        let pre = ["x >= 0", "x > y", "x == y + 1", "x mod 2 == 1", "true"][rng.random_range(0..5)];
        let ops = ["==", ">=", "<=", ">", "/="];
        let op = ops[rng.random_range(0..ops.len())];
        let src = format!(
            "lemma{i} :: x:Int -> y:{{ v:Int | v >= {k} }} -> {{ _:Proof | {pre} => x + y {op} x + {c} }}\nlemma{i} x y = _0\n"
        );
        let a = s.analyze(&src);
        let offered = a
            .hole("_0")
            .unwrap()
            .actions
            .iter()
            .any(|r| r.action.kind == ActionKind::FillUnit);
        let filled = s.fill(&src, "_0", "()").unwrap();
        assert_eq!(offered, filled.analysis.accepted(), "{src}");
        if offered {
            yes += 1;
        } else {
            no += 1;
        }
        match s.fill_unit(&src, "_0") {
            Ok(o) => assert!(offered && o.analysis.accepted()),
            Err(OpError::NotApplicable(_)) => assert!(!offered),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(yes > 5 && no > 5, "unbalanced sample: {yes} valid, {no} not");
}

#[test]
fn case_split_is_conservative() {
    let mut s = session();
    let src = corpus("list_length_proof.lqh");
    let before = parse_program(&src).unwrap();
    let o = s.split(&src, "_0", Some("xs"), false).unwrap();
    let after = o.analysis.program.as_ref().unwrap();
    let sigs = |p: &lqh::surface::Program| {
        p.decls
            .iter()
            .map(|d| (d.name.clone(), d.sig.clone()))
            .collect::<Vec<_>>()
    };
    assert_eq!(sigs(&before), sigs(after));
    let d = after.decl("listLengthProof").unwrap();
    let shapes: Vec<_> = d
        .clauses
        .iter()
        .map(|c| matches!(c.pats[0].kind, PatKind::Nil))
        .collect();
    assert_eq!(shapes, [true, false]);
    assert!(matches!(d.clauses[1].pats[0].kind, PatKind::Cons(..)));
    let holes: Vec<_> = o.analysis.holes.iter().map(|h| h.site.name.clone()).collect();
    assert_eq!(holes, o.edit.created);
    // with auto-unit only the cons branch keeps a hole
    let o = s.split(&src, "_0", Some("xs"), true).unwrap();
    assert!(o.source.contains("listLengthProof [] = ()"));
    assert_eq!(o.analysis.holes.len(), 1);
    assert_eq!(o.analysis.holes[0].site.name, "_0");
}

#[test]
fn split_preconditions() {
    let mut s = session();
    let split = corpus("list_length_proof_split.lqh");
    assert!(matches!(
        s.split(&split, "_1", Some("xs"), false),
        Err(OpError::NotApplicable(_))
    ));
    assert!(matches!(
        s.split(&split, "_7", Some("xs"), false),
        Err(OpError::UnknownHole(_))
    ));
    let nested = corpus("list_length_holes.lqh");
    assert!(matches!(
        s.split(&nested, "_1", Some("ys"), false),
        Err(OpError::NotApplicable(_))
    ));
}

#[test]
fn goal_fidelity_for_intrinsic_holes() {
    let mut s = session();
    let src = corpus("list_length_holes.lqh");
    let o = s.fill(&src, "_0", "0").unwrap();
    assert!(o.analysis.diagnostics(false).is_empty());
    let o = s.fill(&o.source, "_1", "listLength ys").unwrap();
    assert!(o.analysis.accepted(), "{:?}", o.analysis.diagnostics(true));
    let bad = s.fill(&src, "_0", "1").unwrap();
    let codes: Vec<_> = bad.analysis.diagnostics(false).iter().map(|d| d.code).collect();
    assert_eq!(codes, [Code::InvalidVc]);
}

#[test]
fn bad_fill_leaves_source_alone() {
    let mut s = session();
    let src = corpus("list_length_proof_split.lqh");
    assert!(matches!(s.fill(&src, "_1", "1 +"), Err(OpError::BadExpr(_))));
}

#[test]
fn every_edit_reparses() {
    let mut s = session();
    for (name, src) in corpus_files() {
        let a = s.analyze(&src);
        for h in &a.holes {
            for r in &h.actions {
                let o = match &r.action.kind {
                    ActionKind::CaseSplit { var, .. } => s.split(&src, &h.site.name, Some(var), false),
                    ActionKind::FillUnit => s.fill_unit(&src, &h.site.name),
                    ActionKind::FillExpr { text } => s.fill(&src, &h.site.name, text),
                    ActionKind::UnfoldView { .. } => continue,
                };
                let o = o.unwrap_or_else(|e| panic!("{name} {}: {e}", h.site.name));
                assert!(o.analysis.parse_errors.is_empty(), "{name}: {}", o.source);
            }
        }
    }
}

#[test]
fn proof_combinator_returns_left_operand() {
    let p = parse_program(&corpus("sum_to.lqh")).unwrap();
    let xs = Value::List(vec![Value::Int(4), Value::Int(5)]);
    assert_eq!(evaluate(&p, "countAgain", vec![xs.clone()]).unwrap(), Value::Unit);
    assert_eq!(evaluate(&p, "count", vec![xs.clone()]).unwrap(), Value::Int(2));
    assert_eq!(evaluate(&p, "total", vec![xs]).unwrap(), Value::Int(9));
}

#[test]
fn unrefined_hole_goal_is_trivial() {
    let mut s = session();
    let a = s.analyze("f :: Int -> Int\nf x = _0\n");
    let h = a.hole("_0").unwrap();
    assert_eq!(h.goal.raw.to_string(), "{ v:Int | true }");
    assert_eq!(h.goal.simplified.to_string(), "{ v:Int | true }");
}
