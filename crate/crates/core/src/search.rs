//! Regular-run driver: candidate discovery, conflict resolution,
//! simplification and the bound-growing policy.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::calculus::{for_each_grounding, ProverState, RuleApplication, RuleError, RuleName, Status, Violation};
use crate::frontend::Problem;
use crate::ordering::{ground_literal_cmp, kbo_compare, literal_below, KboConfig, OrderError, OrderResult};
use crate::terms::{match_into, Clause, Literal, Signature, Subst, Sym, Term};
use crate::trail::TruthValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("scripted decision {0} is not available")]
    ScriptedDecision(String),
    #[error("no conflict resolution rule applies")]
    ResolutionStuck,
    #[error("learned clause {0} was learned before")]
    RepeatedLearnedClause(String),
    #[error("stuck state has an undefined ground literal below β")]
    BadStuckState,
    #[error("replay diverged at step {0}: {1}")]
    Replay(usize, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Heuristic {
    /// Clause literal with the most decidable instances, smallest pushed literal first.
    Default,
    /// Literals to decide in order, then [`Heuristic::Default`].
    Scripted(Vec<Literal>),
    /// Uniform choice among all candidates.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Initial bound; defaults to the problem's, then to [`default_beta`].
    pub beta: Option<Term>,
    /// Number of Grow applications allowed.
    pub grow_limit: usize,
    /// Number of calculus rule applications allowed.
    pub max_steps: usize,
    pub heuristic: Heuristic,
    /// Run the soundness audit after every rule application.
    pub audit: bool,
    /// Keep a snapshot of each learning step for redundancy checks.
    pub record_learning: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            beta: None,
            grow_limit: 0,
            max_steps: 100_000,
            heuristic: Heuristic::Default,
            audit: false,
            record_learning: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Unsatisfiable,
    BoundedModel,
    ResourceOut,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Unsatisfiable => "Unsatisfiable",
            Verdict::BoundedModel => "BoundedModel",
            Verdict::ResourceOut => "ResourceOut",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub verdict: Verdict,
    pub trace: Vec<RuleApplication>,
    /// Final state: the bounded model's trail and β for [`Verdict::BoundedModel`].
    pub state: ProverState,
    /// Audit findings, tagged with the index of the offending trace entry.
    pub violations: Vec<(usize, Violation)>,
}

/// A ground instance of a clause literal, with the literal it would push.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub clause: usize,
    pub subst: Subst,
    pub lit: usize,
    /// Normal form of the instance under the trail's rewrite system.
    pub pushed: Literal,
}

/// Highest function symbol in the precedence, if any.
fn max_function(sig: &Signature, cfg: &KboConfig) -> Option<Sym> {
    cfg.precedence().into_iter().rev().find(|&s| sig.arity(s) > 0)
}

/// `f(f(c))` for the greatest function symbol `f` and the greatest constant
/// `c`. Signatures without function symbols get a hidden unary symbol
/// `$beta` below everything else and the bound `$beta(c)` for the least constant `c`.
pub fn default_beta(sig: &mut Signature, cfg: &mut KboConfig) -> Result<Term, OrderError> {
    let prec = cfg.precedence();
    let consts: Vec<Sym> = prec.iter().copied().filter(|&s| sig.arity(s) == 0).collect();
    let (Some(&cmin), Some(&cmax)) = (consts.first(), consts.last()) else { return Err(OrderError::NoConstant) };
    match max_function(sig, cfg) {
        Some(f) => {
            let n = sig.arity(f);
            let wrap = |t: Term| Term::app(f, vec![t; n]);
            Ok(wrap(wrap(Term::constant(cmax))))
        }
        None => {
            let b = hidden_beta_symbol(sig, cfg);
            Ok(Term::app(b, vec![Term::constant(cmin)]))
        }
    }
}

fn hidden_beta_symbol(sig: &mut Signature, cfg: &mut KboConfig) -> Sym {
    if let Some(s) = sig.lookup("$beta") {
        return s;
    }
    let s = sig.add("$beta", 1).expect("fresh symbol");
    cfg.push_symbol(1, true);
    s
}

/// The next bound: `beta` wrapped in the greatest function symbol.
pub fn grown_beta(beta: &Term, sig: &Signature, cfg: &KboConfig) -> Term {
    let f = max_function(sig, cfg).expect("a bound exists only with a function symbol");
    Term::app(f, vec![beta.clone(); sig.arity(f)])
}

/// Ground terms below β that are irreducible by the current trail.
fn irreducible_universe(st: &ProverState) -> Vec<Term> {
    let conv = st.trail.conv();
    st.universe().iter().filter(|t| conv.is_irreducible(t)).cloned().collect()
}

fn pushed_literal(st: &ProverState, l: &Literal) -> Literal {
    let conv = st.trail.conv();
    Literal { positive: l.positive, lhs: conv.normal_form(&l.lhs), rhs: conv.normal_form(&l.rhs) }
}

/// First clause (by id) with a β-false instance under an irreducible grounding.
pub fn find_conflict(st: &ProverState) -> Option<(usize, Subst)> {
    if st.status != Status::Top {
        return None;
    }
    let n = st.trail.len();
    st.active_ids().into_iter().find_map(|id| st.false_instance_at(n, &st.clauses[id].clause, true).map(|s| (id, s)))
}

/// All Propagate candidates.
pub fn propagation_candidates(st: &ProverState) -> Vec<Candidate> {
    let mut out = Vec::new();
    if st.status != Status::Top {
        return out;
    }
    let terms = irreducible_universe(st);
    for id in st.active_ids() {
        let c = &st.clauses[id].clause;
        for li in 0..c.len() {
            for_each_grounding(
                c,
                &terms,
                |l| literal_below(l, &st.beta, &st.cfg) && st.trail.value_of(l) != TruthValue::True,
                |s| {
                    let g = c.apply(s);
                    let lg = &g.lits[li];
                    let ok = st.trail.value_of(lg) == TruthValue::Undefined
                        && g.lits.iter().all(|k| k == lg || st.trail.value_of(k) == TruthValue::False);
                    if ok {
                        out.push(Candidate { clause: id, subst: s.clone(), lit: li, pushed: pushed_literal(st, lg) });
                    }
                    false
                },
            );
        }
    }
    out
}

/// The Propagate candidate pushing the smallest literal.
pub fn find_propagation(st: &ProverState) -> Option<Candidate> {
    propagation_candidates(st).into_iter().min_by(|a, b| {
        ground_literal_cmp(&a.pushed, &b.pushed, &st.cfg).then(a.clause.cmp(&b.clause)).then(a.lit.cmp(&b.lit))
    })
}

/// All Decide candidates.
pub fn decision_candidates(st: &ProverState) -> Vec<Candidate> {
    let mut out = Vec::new();
    if st.status != Status::Top {
        return out;
    }
    let terms = irreducible_universe(st);
    for id in st.active_ids() {
        let c = &st.clauses[id].clause;
        for li in 0..c.len() {
            for_each_grounding(
                c,
                &terms,
                |l| literal_below(l, &st.beta, &st.cfg),
                |s| {
                    let g = c.apply(s);
                    let lg = &g.lits[li];
                    let ok = st.trail.value_of(lg) == TruthValue::Undefined
                        && g.lits.iter().enumerate().any(|(j, k)| j != li && st.trail.value_of(k) != TruthValue::False);
                    if ok {
                        out.push(Candidate { clause: id, subst: s.clone(), lit: li, pushed: pushed_literal(st, lg) });
                    }
                    false
                },
            );
        }
    }
    out
}

fn by_pushed(st: &ProverState) -> impl Fn(&&Candidate, &&Candidate) -> Ordering + '_ {
    |a, b| ground_literal_cmp(&a.pushed, &b.pushed, &st.cfg).then(a.clause.cmp(&b.clause)).then(a.lit.cmp(&b.lit))
}

/// Default decision: the clause literal with the most candidate instances,
/// then the smallest pushed literal.
pub fn find_decision(st: &ProverState) -> Option<Candidate> {
    let cands = decision_candidates(st);
    let mut counts: Vec<((usize, usize), usize)> = Vec::new();
    for c in &cands {
        match counts.iter_mut().find(|(k, _)| *k == (c.clause, c.lit)) {
            Some((_, n)) => *n += 1,
            None => counts.push(((c.clause, c.lit), 1)),
        }
    }
    let best = counts.iter().map(|(_, n)| *n).max()?;
    cands
        .iter()
        .filter(|c| counts.iter().any(|(k, n)| *k == (c.clause, c.lit) && *n == best))
        .min_by(by_pushed(st))
        .cloned()
}

/// Decision pushing `want` (modulo symmetry), or deciding an instance equal to it.
pub fn find_scripted_decision(st: &ProverState, want: &Literal) -> Option<Candidate> {
    let cands = decision_candidates(st);
    let hit = |l: &Literal| l.same_modulo_symmetry(want);
    let exact = cands.iter().filter(|c| hit(&c.pushed)).min_by(by_pushed(st));
    exact
        .or_else(|| {
            cands
                .iter()
                .filter(|c| hit(&st.clauses[c.clause].clause.lits[c.lit].apply(&c.subst)))
                .min_by(by_pushed(st))
        })
        .cloned()
}

/// Guarded stuck-state check: no instance below β has an undefined literal
/// that Decide or Propagate could still pick up.
pub fn is_stuck_shape(st: &ProverState) -> bool {
    let mut ok = true;
    for id in st.active_ids() {
        let c = &st.clauses[id].clause;
        for_each_grounding(
            c,
            st.universe(),
            |l| literal_below(l, &st.beta, &st.cfg),
            |s| {
                if c.apply(s).lits.iter().any(|l| st.trail.value_of(l) == TruthValue::Undefined) {
                    ok = false;
                }
                !ok
            },
        );
        if !ok {
            break;
        }
    }
    ok
}

/// Applies the conflict-resolution rules until the state is ⊤ or ⊥.
pub fn resolve_conflict(st: &mut ProverState, trace: &mut Vec<RuleApplication>, mut audit: impl FnMut(&mut ProverState, usize)) -> Result<(), SearchError> {
    while let Status::Conflict(d) = st.status.clone() {
        let g = d.ground();
        let n = g.len();
        let mut app = None;
        'f: for i in 0..n {
            for j in i + 1..n {
                if g.lits[i] == g.lits[j] || g.lits[i] == g.lits[j].flipped() {
                    if let Ok(a) = st.factorize(i, j) {
                        app = Some(a);
                        break 'f;
                    }
                }
            }
        }
        if app.is_none() {
            app = (0..n).filter(|&i| g.lits[i].is_trivially_false()).find_map(|i| st.equality_resolution(i).ok());
        }
        if app.is_none() {
            app = st.skip().ok();
        }
        if app.is_none() {
            app = st.backtrack().ok();
        }
        if app.is_none() {
            if let Some(m) = st.trail.max_literal(&g, &st.beta) {
                app = st.explore_refutation(m, None).ok();
            }
        }
        let Some(app) = app else { return Err(SearchError::ResolutionStuck) };
        trace.push(app);
        audit(st, trace.len() - 1);
    }
    Ok(())
}

/// `l` rewritten to normal form by the positive units `(lhs, rhs)`, each strictly decreasing.
fn rewrite_term(t: &Term, units: &[(Term, Term)]) -> Term {
    let mut cur = t.clone();
    loop {
        let next = rewrite_once(&cur, units);
        match next {
            Some(n) => cur = n,
            None => return cur,
        }
    }
}

fn rewrite_once(t: &Term, units: &[(Term, Term)]) -> Option<Term> {
    if let Term::App(f, args) = t {
        for (i, a) in args.iter().enumerate() {
            if let Some(n) = rewrite_once(a, units) {
                let mut v = args.to_vec();
                v[i] = n;
                return Some(Term::app(*f, v));
            }
        }
    }
    for (l, r) in units {
        let mut s = Subst::new();
        if match_into(l, t, &mut s) {
            return Some(r.apply(&s));
        }
    }
    None
}

fn is_instance_modulo_symmetry(pattern: &Literal, target: &Literal) -> bool {
    [pattern.clone(), pattern.flipped()].iter().any(|p| {
        let mut s = Subst::new();
        crate::terms::match_literal_into(p, target, &mut s)
    })
}

/// Multiset `c·σ ⊆ d` modulo symmetry of literals, for some `σ`.
fn subsumes(c: &Clause, d: &Clause) -> bool {
    fn go(c: &Clause, d: &Clause, i: usize, s: &Subst, used: &mut Vec<bool>) -> bool {
        if i == c.len() {
            return true;
        }
        for j in 0..d.len() {
            if used[j] {
                continue;
            }
            for p in [c.lits[i].clone(), c.lits[i].flipped()] {
                let mut s2 = s.clone();
                if crate::terms::match_literal_into(&p, &d.lits[j], &mut s2) {
                    used[j] = true;
                    if go(c, d, i + 1, &s2, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
        }
        false
    }
    c.len() <= d.len() && go(c, d, 0, &Subst::new(), &mut vec![false; d.len()])
}

fn dedup_literals(c: &Clause) -> Clause {
    let mut out: Vec<Literal> = Vec::new();
    for l in &c.lits {
        if !out.iter().any(|k| k.same_modulo_symmetry(l)) {
            out.push(l.clone());
        }
    }
    Clause::new(out)
}

fn is_tautology(c: &Clause) -> bool {
    c.lits.iter().any(|l| l.is_trivially_true())
        || c.lits.iter().any(|l| c.lits.iter().any(|k| k.same_modulo_symmetry(&l.complement())))
}

/// One simplified version of `c` given the unit clauses, `None` if unchanged.
fn simplify_clause(c: &Clause, rules: &[(Term, Term)], units: &[Literal], cfg: &KboConfig) -> Option<Clause> {
    let _ = cfg;
    let rewritten = Clause::new(
        c.lits
            .iter()
            .map(|l| Literal { positive: l.positive, lhs: rewrite_term(&l.lhs, rules), rhs: rewrite_term(&l.rhs, rules) })
            .collect(),
    );
    let mut lits: Vec<Literal> = rewritten.lits.iter().filter(|l| !l.is_trivially_false()).cloned().collect();
    if lits.len() > 1 || c.len() > 1 {
        lits.retain(|l| !units.iter().any(|u| is_instance_modulo_symmetry(&u.complement(), l)));
    }
    let out = dedup_literals(&Clause::new(lits));
    if out == *c {
        None
    } else {
        Some(out)
    }
}

/// Unit rewriting, unit subsumption resolution, tautology and subsumption
/// deletion over the active clauses. Restarts when a clause that is not
/// ground below β was rewritten.
pub fn simplify(st: &mut ProverState, trace: &mut Vec<RuleApplication>) -> Result<(), SearchError> {
    if st.status != Status::Top {
        return Ok(());
    }
    let mut restart = false;
    loop {
        let mut changed = false;
        let ids = st.active_ids();
        // tautologies
        for &id in &ids {
            if is_tautology(&st.clauses[id].clause) {
                trace.push(st.delete_clause(id)?);
                changed = true;
            }
        }
        let ids = st.active_ids();
        for &id in &ids {
            let units: Vec<(usize, Literal)> = st
                .active_ids()
                .into_iter()
                .filter(|&u| u != id && st.clauses[u].clause.len() == 1)
                .map(|u| (u, st.clauses[u].clause.lits[0].clone()))
                .collect();
            let mut rules = Vec::new();
            for (_, u) in units.iter().filter(|(_, u)| u.positive) {
                for (l, r) in [(&u.lhs, &u.rhs), (&u.rhs, &u.lhs)] {
                    if kbo_compare(l, r, &st.cfg) == OrderResult::Gt {
                        rules.push((l.clone(), r.clone()));
                    }
                }
            }
            let lits: Vec<Literal> = units.iter().map(|(_, u)| u.clone()).collect();
            let c = st.clauses[id].clause.clone();
            if let Some(new) = simplify_clause(&c, &rules, &lits, &st.cfg) {
                if !c.is_ground() || !crate::ordering::clause_below(&c, &st.beta, &st.cfg) {
                    restart = true;
                }
                if is_tautology(&new) {
                    trace.push(st.delete_clause(id)?);
                } else {
                    trace.push(st.replace_clause(id, new)?);
                }
                changed = true;
            }
        }
        // strict subsumption
        let ids = st.active_ids();
        for &d in &ids {
            let dc = st.clauses[d].clause.clone();
            let sub = ids.iter().any(|&c| c != d && st.clauses[c].active && {
                let cc = &st.clauses[c].clause;
                cc.len() < dc.len() && subsumes(cc, &dc)
            });
            if sub {
                trace.push(st.delete_clause(d)?);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if restart && !st.trail.is_empty() {
        trace.push(st.restart()?);
    }
    Ok(())
}

/// Sets up the initial state of a run.
pub fn initial_state(problem: &Problem, cfg: &SearchConfig) -> Result<ProverState, SearchError> {
    let mut sig = problem.sig.clone();
    let mut kbo = problem.cfg.clone();
    let beta = match cfg.beta.clone().or_else(|| problem.beta.clone()) {
        Some(b) => b,
        None => default_beta(&mut sig, &mut kbo)?,
    };
    let mut st = ProverState::new(sig, kbo, problem.clauses.clone(), beta)?;
    if cfg.record_learning {
        st.learn_records = Some(Vec::new());
    }
    Ok(st)
}

/// Runs the prover on `problem`.
pub fn run(problem: &Problem, cfg: &SearchConfig) -> Result<RunResult, SearchError> {
    let mut st = initial_state(problem, cfg)?;
    let mut trace: Vec<RuleApplication> = Vec::new();
    let mut violations: Vec<(usize, Violation)> = Vec::new();
    let mut script: Vec<Literal> = match &cfg.heuristic {
        Heuristic::Scripted(s) => s.clone(),
        _ => problem.decisions.clone(),
    };
    script.reverse();
    let mut rng = match cfg.heuristic {
        Heuristic::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut grows = 0;
    let mut learned_seen: Vec<Clause> = Vec::new();
    let audit_on = cfg.audit;
    let audit = |st: &mut ProverState, i: usize, violations: &mut Vec<(usize, Violation)>| {
        if audit_on {
            violations.extend(st.check_sound_state().into_iter().map(|v| (i, v)));
        }
    };
    let steps = |trace: &[RuleApplication]| {
        trace.iter().filter(|a| !matches!(a.rule, RuleName::Simplify | RuleName::Delete)).count()
    };
    let verdict = loop {
        if st.status == Status::Bottom {
            break Verdict::Unsatisfiable;
        }
        if steps(&trace) >= cfg.max_steps {
            break Verdict::ResourceOut;
        }
        if let Some((id, s)) = find_conflict(&st) {
            trace.push(st.conflict(id, &s)?);
            audit(&mut st, trace.len() - 1, &mut violations);
            if st.is_conflict() {
                let before = st.clauses.len();
                resolve_conflict(&mut st, &mut trace, |st, i| audit(st, i, &mut violations))?;
                if st.clauses.len() > before {
                    let l = dedup_literals(&st.clauses[before].clause).normalize_vars();
                    if learned_seen.iter().any(|k| k.same_multiset_modulo_symmetry(&l)) {
                        return Err(SearchError::RepeatedLearnedClause(st.sig.show(&l).to_string()));
                    }
                    learned_seen.push(l);
                    simplify(&mut st, &mut trace)?;
                }
            }
            continue;
        }
        if let Some(c) = find_propagation(&st) {
            trace.push(st.propagate(c.clause, &c.subst, c.lit)?);
            audit(&mut st, trace.len() - 1, &mut violations);
            continue;
        }
        let choice = if let Some(want) = script.pop() {
            match find_scripted_decision(&st, &want) {
                Some(c) => Some(c),
                None => return Err(SearchError::ScriptedDecision(st.sig.show(&want).to_string())),
            }
        } else if let Some(rng) = rng.as_mut() {
            let cands = decision_candidates(&st);
            if cands.is_empty() {
                None
            } else {
                let k = rng.gen_range(0..cands.len());
                Some(cands[k].clone())
            }
        } else {
            find_decision(&st)
        };
        if let Some(c) = choice {
            trace.push(st.decide(c.clause, &c.subst, c.lit)?);
            audit(&mut st, trace.len() - 1, &mut violations);
            continue;
        }
        if audit_on && !is_stuck_shape(&st) {
            return Err(SearchError::BadStuckState);
        }
        if grows < cfg.grow_limit {
            let b = grown_beta(&st.beta, &st.sig, &st.cfg);
            trace.push(st.grow(b)?);
            grows += 1;
            continue;
        }
        break Verdict::BoundedModel;
    };
    Ok(RunResult { verdict, trace, state: st, violations })
}

/// Applies `trace` to the initial state of `problem`.
pub fn replay(problem: &Problem, cfg: &SearchConfig, trace: &[RuleApplication]) -> Result<ProverState, SearchError> {
    let mut st = initial_state(problem, cfg)?;
    for (i, app) in trace.iter().enumerate() {
        let got = st.apply(app).map_err(|e| SearchError::Replay(i, e.to_string()))?;
        if got.rule != app.rule {
            return Err(SearchError::Replay(i, "rule mismatch".into()));
        }
    }
    Ok(st)
}
