mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scleq::calculus::{ProverState, RuleName, Status};
use scleq::frontend::Problem;
use scleq::ordering::OrderResult;
use scleq::search::{find_conflict, find_scripted_decision, initial_state, replay, run, SearchConfig};
use scleq::terms::{Closure, Subst};
use scleq::trail::{EntryKind, TrailEntry};

fn decide(st: &mut ProverState, s: &scleq::terms::Signature, l: &str) {
    let c = find_scripted_decision(st, &lit(s, l)).unwrap();
    st.decide(c.clause, &c.subst, c.lit).unwrap();
}

fn intro_conflict() -> (Problem, ProverState) {
    let p = problem("intro.scl");
    let mut st = initial_state(&p, &SearchConfig::default()).unwrap();
    decide(&mut st, &p.sig, "h(a) = g(a)");
    decide(&mut st, &p.sig, "f(a) = g(a)");
    let a = Subst::from_pairs([(0, term(&p.sig, "a"))]);
    st.conflict(2, &a).unwrap();
    (p, st)
}

#[test]
fn intro_decisions_and_conflict() {
    let (p, st) = intro_conflict();
    assert_eq!(st.level, 2);
    assert!(st.trail.entries().iter().all(|e| e.kind == EntryKind::Decision));
    let j = &st.trail.entries()[0].justification;
    assert_eq!(j.ground(), clause(&p.sig, "h(a) = g(a) | h(a) != g(a)"));
    let Status::Conflict(d) = &st.status else { panic!() };
    assert_eq!(d.ground(), clause(&p.sig, "f(a) != h(a) | f(a) != g(a)"));
}

#[test]
fn failed_guards_leave_the_state_unchanged() {
    let (p, mut st) = intro_conflict();
    let before = st.clone();
    assert!(st.skip().is_err());
    assert!(st.factorize(0, 1).is_err());
    assert!(st.equality_resolution(0).is_err());
    assert!(st.decide(0, &Subst::new(), 0).is_err());
    assert!(st.grow(term(&p.sig, "f(f(f(a)))")).is_err());
    assert!(st.restart().is_err());
    assert_eq!(st, before);
}

#[test]
fn decide_guards() {
    let p = problem("intro.scl");
    let mut st = initial_state(&p, &SearchConfig::default()).unwrap();
    decide(&mut st, &p.sig, "h(a) = g(a)");
    let a = Subst::from_pairs([(0, term(&p.sig, "a"))]);
    // already true
    assert!(st.decide(0, &a, 0).is_err());
    // no false instance yet
    assert!(st.conflict(2, &a).is_err());
    // grounding above β
    let big = Subst::from_pairs([(0, term(&p.sig, "f(f(f(a)))"))]);
    assert!(st.decide(1, &big, 0).is_err());
}

#[test]
fn explore_and_resolve_intro() {
    let (_, mut st) = intro_conflict();
    let (steps, ok) = st.explore_candidates(0).unwrap();
    assert_eq!(ok.len(), 2);
    let smallest = ok[0];
    let app = st.explore_refutation(0, None).unwrap();
    assert_eq!(app.step, Some(smallest));
    let Status::Conflict(d) = &st.status else { panic!() };
    assert_eq!(d.ground(), steps[smallest].ground_clause());
    // a non-qualifying step is rejected
    let (_, mut st2) = intro_conflict();
    let (steps2, ok2) = st2.explore_candidates(0).unwrap();
    let bad = (0..steps2.len()).find(|i| !ok2.contains(i)).unwrap();
    let before = st2.clone();
    assert!(st2.explore_refutation(0, Some(bad)).is_err());
    assert_eq!(st2, before);
}

#[test]
fn bottom_only_at_level_zero() {
    let p = problem("refutation.scl");
    let r = run(&p, &SearchConfig::default()).unwrap();
    assert_eq!(r.state.status, Status::Bottom);
    let last = r.trace.last().unwrap();
    assert_eq!(last.rule, RuleName::Conflict);
    assert_eq!(r.state.level, 0);
}

#[test]
fn grow_and_restart() {
    let p = problem("chain3.scl");
    let r = run(&p, &SearchConfig::default()).unwrap();
    let mut st = r.state.clone();
    assert!(!st.trail.is_empty());
    let old = st.beta.clone();
    assert!(st.grow(old.clone()).is_err());
    let f = p.sig.lookup("f").map(|f| scleq::terms::Term::app(f, vec![old.clone()]));
    if let Some(bigger) = f {
        st.grow(bigger.clone()).unwrap();
        assert!(st.trail.is_empty());
        assert_eq!(st.level, 0);
        assert_eq!(st.beta, bigger);
    }
    let mut st = r.state.clone();
    st.restart().unwrap();
    assert!(st.trail.is_empty());
    assert_eq!(st.beta, old);
    let mut init = initial_state(&p, &SearchConfig::default()).unwrap();
    let copy = init.clone();
    init.restart().unwrap();
    assert_eq!(init, copy);
}

#[test]
fn audit_reports_reducible_entry() {
    let (s, cfg) = sig_of("sig f/1 a/0 b/0 c/0;");
    let n = vec![clause(&s, "a = b"), clause(&s, "f(a) = c")];
    let mut st = ProverState::new(s.clone(), cfg, n, term(&s, "f(f(a))")).unwrap();
    assert!(st.check_sound_state().is_empty());
    for (i, l) in ["a = b", "f(a) = c"].iter().enumerate() {
        st.trail.push_unchecked(TrailEntry {
            literal: lit(&s, l),
            level: 0,
            justification: Closure::new(clause(&s, l), Subst::new()),
            kind: EntryKind::Propagated,
        });
        let v = st.check_sound_state();
        if i == 0 {
            assert!(v.is_empty(), "{v:?}");
        } else {
            assert!(v.iter().any(|x| x.item == 2), "{v:?}");
        }
    }
}

#[test]
fn audit_reports_conflict_that_is_not_false() {
    let (s, cfg) = sig_of("sig f/1 a/0 b/0 c/0;");
    let n = vec![clause(&s, "a = b | a = c")];
    let mut st = ProverState::new(s.clone(), cfg, n, term(&s, "f(f(a))")).unwrap();
    st.status = Status::Conflict(Closure::new(st.clauses[0].clause.clone(), Subst::new()));
    let v = st.check_sound_state();
    assert!(v.iter().any(|x| x.item == 5), "{v:?}");
}

/// Each conflict-resolution step other than Skip and Backtrack makes the conflict smaller.
fn check_descent(p: &Problem, cfg: &SearchConfig) {
    let r = run(p, cfg).unwrap();
    let mut st = initial_state(p, cfg).unwrap();
    for app in &r.trace {
        let before = match &st.status {
            Status::Conflict(d) => Some(d.ground()),
            _ => None,
        };
        st.apply(app).unwrap();
        if matches!(app.rule, RuleName::ExploreRefutation | RuleName::Factorize | RuleName::EqualityResolution) {
            let after = match &st.status {
                Status::Conflict(d) => d.ground(),
                _ => continue,
            };
            let b = before.unwrap();
            assert_eq!(st.trail.gamma_star_compare_clauses(&after, &b, &st.beta), OrderResult::Lt, "{:?}", app.rule);
        }
        if app.rule == RuleName::Backtrack {
            assert!(find_conflict(&st).is_none(), "false instance right after Backtrack");
        }
    }
}

#[test]
fn conflict_resolution_descends() {
    for name in ["intro.scl", "saturation.scl", "pair.scl", "below_var.scl"] {
        check_descent(&problem(name), &SearchConfig::default());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        check_descent(&random_problem(&mut rng, 10), &SearchConfig::default());
    }
}

#[test]
fn replayed_prefixes_are_sound() {
    let p = problem("intro.scl");
    let r = run(&p, &SearchConfig::default()).unwrap();
    for k in 0..=r.trace.len() {
        let mut st = replay(&p, &SearchConfig::default(), &r.trace[..k]).unwrap();
        assert!(st.check_sound_state().is_empty(), "after {k} steps");
    }
}
