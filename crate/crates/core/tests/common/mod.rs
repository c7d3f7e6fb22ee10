#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use scleq::calculus::ProverState;
use scleq::frontend::{parse_clause, parse_literal, parse_native, parse_term, Problem};
use scleq::oracle::{cc_entails, ground_sat, GroundProblem};
use scleq::ordering::{enumerate_ground_terms_below, KboConfig};
use scleq::search::{run, RunResult, SearchConfig};
use scleq::terms::{ground_instances_over, Clause, Literal, Signature, Term};
use scleq::trail::{EntryKind, Trail, TrailEntry, TruthValue};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn problem(name: &str) -> Problem {
    let path = repo_root().join("problems").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_native(&text).unwrap()
}

pub fn term(sig: &Signature, s: &str) -> Term {
    parse_term(s, sig).unwrap()
}

pub fn lit(sig: &Signature, s: &str) -> Literal {
    parse_literal(s, sig).unwrap()
}

pub fn clause(sig: &Signature, s: &str) -> Clause {
    parse_clause(s, sig).unwrap()
}

pub fn show<T: scleq::terms::Pretty + ?Sized>(sig: &Signature, x: &T) -> String {
    sig.show(x).to_string()
}

pub fn run_default(p: &Problem) -> RunResult {
    run(p, &SearchConfig::default()).unwrap()
}

/// Clauses equal as multisets of literals modulo symmetry and variable renaming.
pub fn same_clause(a: &Clause, b: &Clause) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    fn go(a: &Clause, b: &Clause, i: usize, ren: &mut Vec<(u32, u32)>, used: &mut Vec<bool>) -> bool {
        if i == a.len() {
            return true;
        }
        for j in 0..b.len() {
            if used[j] {
                continue;
            }
            for cand in [a.lits[i].clone(), a.lits[i].flipped()] {
                if cand.positive != b.lits[j].positive {
                    continue;
                }
                let mut r = ren.clone();
                if rename_eq(&cand.lhs, &b.lits[j].lhs, &mut r) && rename_eq(&cand.rhs, &b.lits[j].rhs, &mut r) {
                    used[j] = true;
                    let saved = std::mem::replace(ren, r);
                    if go(a, b, i + 1, ren, used) {
                        return true;
                    }
                    *ren = saved;
                    used[j] = false;
                }
            }
        }
        false
    }
    go(a, b, 0, &mut Vec::new(), &mut used)
}

fn rename_eq(s: &Term, t: &Term, ren: &mut Vec<(u32, u32)>) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => match ren.iter().find(|(a, b)| a == x || b == y) {
            Some((a, b)) => a == x && b == y,
            None => {
                ren.push((*x, *y));
                true
            }
        },
        (Term::App(f, xs), Term::App(g, ys)) => f == g && xs.iter().zip(ys.iter()).all(|(a, b)| rename_eq(a, b, ren)),
        _ => false,
    }
}

pub fn same_clause_set(a: &[Clause], b: &[Clause]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|c| match (0..b.len()).find(|&j| !used[j] && same_clause(c, &b[j])) {
        Some(j) => {
            used[j] = true;
            true
        }
        None => false,
    })
}

// ---------------------------------------------------------------------------
// random problems

/// Small signatures with their bounds, each with at most `max_terms` ground terms below the bound.
pub fn random_signature<R: Rng>(rng: &mut R, max_terms: usize) -> (Signature, KboConfig, Term) {
    loop {
        let mut sig = Signature::new();
        let n_fun = rng.gen_range(0..=2usize);
        let n_const = rng.gen_range(2..=4usize);
        for i in 0..n_fun {
            let ar = if i == 0 { 1 } else { rng.gen_range(1..=2) };
            sig.add(["f", "g"][i], ar).unwrap();
        }
        for i in 0..n_const {
            sig.add(["a", "b", "c", "d"][i], 0).unwrap();
        }
        let cfg = KboConfig::default_for(&sig);
        let beta = if n_fun == 0 {
            // any non-constant bound; use the widest constant-only universe
            let mut s2 = sig.clone();
            let mut c2 = cfg.clone();
            let b = scleq::search::default_beta(&mut s2, &mut c2).unwrap();
            let u = enumerate_ground_terms_below(&b, &s2, &c2).unwrap();
            if u.len() <= max_terms {
                return (s2, c2, b);
            }
            continue;
        } else {
            let all = enumerate_ground_terms_below(&bound_tower(&sig), &sig, &cfg).unwrap();
            if all.len() < 2 {
                continue;
            }
            let k = rng.gen_range(1..all.len().min(max_terms + 1));
            all[k].clone()
        };
        let u = enumerate_ground_terms_below(&beta, &sig, &cfg).unwrap();
        if !u.is_empty() && u.len() <= max_terms {
            return (sig, cfg, beta);
        }
    }
}

fn bound_tower(sig: &Signature) -> Term {
    let f = sig.lookup("f").unwrap();
    let a = sig.constants().next().unwrap();
    let mut t = Term::constant(a);
    for _ in 0..3 {
        t = Term::app(f, vec![t]);
    }
    t
}

pub fn random_term<R: Rng>(rng: &mut R, sig: &Signature, depth: usize, nvars: u32) -> Term {
    if nvars > 0 && rng.gen_bool(0.3) {
        return Term::var(rng.gen_range(0..nvars));
    }
    let funs: Vec<_> = sig.functions().filter(|&s| !sig.name(s).starts_with('$')).collect();
    let consts: Vec<_> = sig.constants().collect();
    if depth == 0 || funs.is_empty() || rng.gen_bool(0.6) {
        return Term::constant(*consts.choose(rng).unwrap());
    }
    let f = *funs.choose(rng).unwrap();
    let args = (0..sig.arity(f)).map(|_| random_term(rng, sig, depth - 1, nvars)).collect();
    Term::app(f, args)
}

pub fn random_literal<R: Rng>(rng: &mut R, sig: &Signature, nvars: u32) -> Literal {
    loop {
        let s = random_term(rng, sig, 2, nvars);
        let t = random_term(rng, sig, 2, nvars);
        if s != t {
            return if rng.gen_bool(0.5) { Literal::eq(s, t) } else { Literal::neq(s, t) };
        }
    }
}

/// A random problem with universe at most `max_terms` ground terms below its bound.
pub fn random_problem<R: Rng>(rng: &mut R, max_terms: usize) -> Problem {
    let (sig, cfg, beta) = random_signature(rng, max_terms);
    let n = rng.gen_range(3..=8);
    let clauses = (0..n)
        .map(|_| {
            let nvars = rng.gen_range(0..=2);
            let k = rng.gen_range(1..=3);
            Clause::new((0..k).map(|_| random_literal(rng, &sig, nvars)).collect()).normalize_vars()
        })
        .collect();
    Problem { sig, cfg, clauses, beta: Some(beta), decisions: Vec::new() }
}

/// Ground instances below the bound of all problem clauses.
pub fn ground_below(p: &Problem, sig: &Signature, cfg: &KboConfig, beta: &Term) -> Vec<Clause> {
    let u = enumerate_ground_terms_below(beta, sig, cfg).unwrap();
    p.clauses.iter().flat_map(|c| ground_instances_over(c, beta, &u, cfg)).map(|g| g.ground()).collect()
}

/// Whether the ground instances of `p` below β are satisfiable.
pub fn satisfiable_below(p: &Problem, st: &ProverState) -> bool {
    let g = ground_below(p, &st.sig, &st.cfg, &st.beta);
    ground_sat(&GroundProblem { clauses: g, universe: st.universe().to_vec() }).unwrap().is_some()
}

/// Every ground instance below β is satisfied by the trail, by congruence closure.
pub fn trail_satisfies(p: &Problem, st: &ProverState) -> bool {
    let lits: Vec<Literal> = st.trail.literals().cloned().collect();
    ground_below(p, &st.sig, &st.cfg, &st.beta).iter().all(|c| c.lits.iter().any(|l| cc_entails(&lits, l)))
}

// ---------------------------------------------------------------------------
// random trails

/// Pushes random undefined irreducible literals over `universe`.
pub fn random_trail<R: Rng>(rng: &mut R, cfg: &KboConfig, universe: &[Term], len: usize) -> Trail {
    let mut tr = Trail::new(cfg.clone());
    let mut level = 0;
    let mut tries = 0;
    while tr.len() < len && tries < 200 {
        tries += 1;
        let s = universe.choose(rng).unwrap().clone();
        let t = universe.choose(rng).unwrap().clone();
        if s == t {
            continue;
        }
        let l = if rng.gen_bool(0.6) { Literal::eq(s, t) } else { Literal::neq(s, t) };
        if tr.value_of(&l) != TruthValue::Undefined {
            continue;
        }
        let decision = rng.gen_bool(0.4);
        let (kind, lvl, just) = if decision {
            (EntryKind::Decision, level + 1, Clause::new(vec![l.clone(), l.complement()]))
        } else {
            (EntryKind::Propagated, level, Clause::new(vec![l.clone()]))
        };
        let e = TrailEntry { literal: l, level: lvl, justification: scleq::terms::Closure::new(just, Default::default()), kind };
        if tr.push(e).is_ok() {
            level = lvl;
        }
    }
    tr
}

/// All literals `s # t` over `universe`, both polarities.
pub fn all_literals(universe: &[Term]) -> Vec<Literal> {
    let mut out = Vec::new();
    for s in universe {
        for t in universe {
            out.push(Literal::eq(s.clone(), t.clone()));
            out.push(Literal::neq(s.clone(), t.clone()));
        }
    }
    out
}

/// Signature and ordering from a native header such as `sig f/1 a/0; precedence a < f;`.
pub fn sig_of(header: &str) -> (Signature, KboConfig) {
    let p = parse_native(header).unwrap();
    (p.sig, p.cfg)
}

/// Appends `l` to the trail, as a decision opening a new level or as a propagated unit.
pub fn push(tr: &mut Trail, l: Literal, decision: bool) {
    let level = tr.current_level() + decision as usize;
    let (kind, just) = if decision {
        (EntryKind::Decision, Clause::new(vec![l.clone(), l.complement()]))
    } else {
        (EntryKind::Propagated, Clause::new(vec![l.clone()]))
    };
    tr.push(TrailEntry { literal: l, level, justification: scleq::terms::Closure::new(just, Default::default()), kind })
        .unwrap();
}

/// Trail leaves in the form used by refutations.
pub fn leaves(tr: &Trail) -> Vec<std::sync::Arc<scleq::rewriting::RewriteStep>> {
    use scleq::rewriting::{LeafSource, RewriteStep};
    tr.entries()
        .iter()
        .enumerate()
        .map(|(i, e)| std::sync::Arc::new(RewriteStep::leaf_from_closure(&e.justification, 0, LeafSource::Trail(i))))
        .collect()
}
