mod common;

use std::sync::Arc;

use common::*;
use scleq::ordering::OrderResult;
use scleq::rewriting::{build_conv, reduction_chain_application, refutation, rewrite_inference, LeafSource, RewriteStep};
use scleq::terms::{Clause, Closure, Position, Subst};
use scleq::trail::Trail;

const INTRO: &str = "sig f/1 g/1 h/1 a/0 b/0 c/0 d/0; precedence d < c < b < a < g < h < f;";

#[test]
fn normalize_examples() {
    let (s, cfg) = sig_of("sig f/1 a/0 b/0 c/0 d/0; precedence d < c < b < a < f;");
    let t = |x: &str| term(&s, x);
    let r = build_conv([(t("a"), t("b"), ())], &cfg);
    let (nf, trace) = r.normalize(&t("f(a)"));
    assert_eq!(nf, t("f(b)"));
    assert_eq!(trace.len(), 1);
    assert_eq!(trace[0].1, Position(vec![1]));
    let empty = build_conv(Vec::<(_, _, ())>::new(), &cfg);
    assert_eq!(empty.normalize(&t("f(a)")), (t("f(a)"), vec![]));
    let conv = build_conv([(t("c"), t("d"), ()), (t("a"), t("b"), ()), (t("b"), t("d"), ())], &cfg);
    let (nf, trace) = conv.normalize(&t("f(a)"));
    assert_eq!(nf, t("f(d)"));
    assert_eq!(trace.len(), 1);
    let rule = &conv.rules()[trace[0].0];
    assert_eq!((rule.lhs.clone(), rule.rhs.clone()), (t("a"), t("d")));
}

#[test]
fn ground_inference() {
    let (s, cfg) = sig_of("sig f/1 a/0 b/0 c/0; precedence c < b < a < f;");
    let i1 = Arc::new(RewriteStep::leaf(lit(&s, "a = b"), clause(&s, "c = b"), Subst::new(), LeafSource::Trail(0)));
    let i2 = Arc::new(RewriteStep::leaf(lit(&s, "f(a) != f(b)"), clause(&s, "a = c"), Subst::new(), LeafSource::Target));
    let r = rewrite_inference(&i1, &i2, &Position(vec![1, 1]), &cfg).unwrap();
    assert_eq!(r.ground_literal(), lit(&s, "f(b) != f(b)"));
    assert!(same_clause(&r.rest, &clause(&s, "c = b | a = c")));
    assert!(Arc::ptr_eq(&r.premises.as_ref().unwrap().0, &i1));
    assert_eq!(r.position, Some(Position(vec![1, 1])));
}

#[test]
fn intro_inference_rewrites_f_side() {
    let (s, cfg) = sig_of(INTRO);
    let sigma = Subst::from_pairs([(0, term(&s, "a"))]);
    let c2 = clause(&s, "f(X0) = g(X0) | h(X0) != g(X0)");
    let c3 = clause(&s, "f(X0) != h(X0) | f(X0) != g(X0)");
    let i1 = Arc::new(RewriteStep::leaf_from_closure(&Closure::new(c2, sigma.clone()), 0, LeafSource::Trail(1)));
    let i2 = Arc::new(RewriteStep::leaf_from_closure(&Closure::new(c3, sigma), 0, LeafSource::Target));
    let r = rewrite_inference(&i1, &i2, &Position(vec![1]), &cfg).unwrap();
    assert_eq!(r.ground_literal(), lit(&s, "g(a) != h(a)"));
    assert!(same_clause(&r.clause(), &clause(&s, "g(X0) != h(X0) | h(X0) != g(X0) | f(X0) != g(X0)")));
}

#[test]
fn inference_below_variable() {
    let (s, cfg) = sig_of("sig f/1 g/1 h/1 a/0 b/0 c/0 d/0; precedence d < c < b < a < g < h < f;");
    let i1 = Arc::new(RewriteStep::leaf(lit(&s, "a = b"), Clause::empty(), Subst::new(), LeafSource::Trail(0)));
    let c1 = clause(&s, "f(X0) = h(b) | X0 != g(a)");
    let i2 = Arc::new(RewriteStep::leaf_from_closure(
        &Closure::new(c1, Subst::from_pairs([(0, term(&s, "g(a)"))])),
        0,
        LeafSource::Target,
    ));
    let r = rewrite_inference(&i1, &i2, &Position(vec![1, 1, 1]), &cfg).unwrap();
    assert_eq!(r.ground_literal(), lit(&s, "f(g(b)) = h(b)"));
    // x becomes g(x') and the unifier then binds x' to a
    assert_eq!(r.clause(), clause(&s, "f(g(b)) = h(b) | g(a) != g(a)"));
    assert!(r.grounding.is_empty());
}

#[test]
fn chain_reduces_to_smaller_equation() {
    let (s, cfg) = sig_of("sig a/0 b/0 c/0 d/0;");
    let mut tr = Trail::new(cfg.clone());
    push(&mut tr, lit(&s, "c = d"), false);
    push(&mut tr, lit(&s, "a = b"), false);
    let target = RewriteStep::leaf(lit(&s, "a = c"), clause(&s, "a != b"), Subst::new(), LeafSource::Target);
    let ch = reduction_chain_application(&leaves(&tr), target, &cfg).unwrap();
    assert_eq!(ch.last().ground_literal(), lit(&s, "b = d"));
    assert!(ch.is_well_formed());
    // irreducible target
    let target = RewriteStep::leaf(lit(&s, "b = d"), Clause::empty(), Subst::new(), LeafSource::Target);
    let ch = reduction_chain_application(&leaves(&tr), target, &cfg).unwrap();
    assert_eq!(ch.len(), 1);
}

#[test]
fn chain_joins_congruent_sides() {
    let (s, cfg) = sig_of("sig f/1 a/0 b/0;");
    let mut tr = Trail::new(cfg.clone());
    push(&mut tr, lit(&s, "a = b"), false);
    let target = RewriteStep::leaf(lit(&s, "f(a) = f(b)"), Clause::empty(), Subst::new(), LeafSource::Target);
    let ch = reduction_chain_application(&leaves(&tr), target, &cfg).unwrap();
    assert_eq!(ch.last().ground_literal(), lit(&s, "f(b) = f(b)"));
}

#[test]
fn intro_refutation_chain() {
    let (s, cfg) = sig_of(INTRO);
    let mut tr = Trail::new(cfg.clone());
    push(&mut tr, lit(&s, "h(a) = g(a)"), true);
    push(&mut tr, lit(&s, "f(a) = g(a)"), true);
    let c3 = Closure::new(clause(&s, "f(X0) != h(X0) | f(X0) != g(X0)"), Subst::from_pairs([(0, term(&s, "a"))]));
    let ch = refutation(&leaves(&tr), RewriteStep::leaf_from_closure(&c3, 0, LeafSource::Target), &cfg).unwrap();
    let last = ch.last();
    assert!(last.ground_literal().is_trivially_false());
    assert!(same_clause(
        &last.ground_clause(),
        &clause(&s, "g(a) != g(a) | f(a) != g(a) | f(a) != g(a) | h(a) != g(a)")
    ));
    assert_eq!(ch.len(), 5);
    assert!(ch.is_well_formed());
    // the final step is below the conflict under the trail ordering
    let beta = term(&s, "f(f(a))");
    assert_eq!(tr.gamma_star_compare_clauses(&last.ground_clause(), &c3.ground(), &beta), OrderResult::Lt);
}

#[test]
fn refutation_of_reflexive_inequation_is_a_leaf() {
    let (s, cfg) = sig_of("sig a/0 b/0;");
    let target = RewriteStep::leaf(lit(&s, "a != a"), Clause::empty(), Subst::new(), LeafSource::Target);
    let ch = refutation(&[], target, &cfg).unwrap();
    assert_eq!(ch.len(), 1);
}

#[test]
fn refutation_requires_false_target() {
    let (s, cfg) = sig_of("sig a/0 b/0;");
    let target = RewriteStep::leaf(lit(&s, "a != b"), Clause::empty(), Subst::new(), LeafSource::Target);
    assert!(refutation(&[], target, &cfg).is_err());
}
