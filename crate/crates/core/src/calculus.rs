//! Prover state and the transition rules, each a guarded operation that
//! leaves the state untouched when a premise fails.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::oracle::{ground_entails, OracleError};
use crate::ordering::{clause_below, enumerate_ground_terms_below, kbo_compare, literal_below, KboConfig, OrderError, OrderResult};
use crate::rewriting::{reduction_chain_application, refutation, LeafSource, RewriteError, RewriteStep};
use crate::terms::{ground_instances_over, mgu_literals, mgu_pair, Clause, Closure, Literal, Pretty, Signature, Subst, Term};
use crate::trail::{EntryKind, Trail, TrailEntry, TrailError, TruthValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule {rule} not applicable: {reason}")]
    Guard { rule: RuleName, reason: String },
    #[error("no clause with id {0}")]
    NoSuchClause(usize),
    #[error(transparent)]
    Trail(#[from] TrailError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

fn guard<T>(rule: RuleName, reason: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::Guard { rule, reason: reason.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleName {
    Propagate,
    Decide,
    Conflict,
    Skip,
    ExploreRefutation,
    Factorize,
    EqualityResolution,
    Backtrack,
    Grow,
    Restart,
    /// Clause replaced by simplification.
    Simplify,
    /// Clause deleted by simplification.
    Delete,
}

impl RuleName {
    pub const ALL: [RuleName; 12] = [
        RuleName::Propagate,
        RuleName::Decide,
        RuleName::Conflict,
        RuleName::Skip,
        RuleName::ExploreRefutation,
        RuleName::Factorize,
        RuleName::EqualityResolution,
        RuleName::Backtrack,
        RuleName::Grow,
        RuleName::Restart,
        RuleName::Simplify,
        RuleName::Delete,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleName::Propagate => "Propagate",
            RuleName::Decide => "Decide",
            RuleName::Conflict => "Conflict",
            RuleName::Skip => "Skip",
            RuleName::ExploreRefutation => "Explore-Refutation",
            RuleName::Factorize => "Factorize",
            RuleName::EqualityResolution => "Equality-Resolution",
            RuleName::Backtrack => "Backtrack",
            RuleName::Grow => "Grow",
            RuleName::Restart => "Restart",
            RuleName::Simplify => "Simplify",
            RuleName::Delete => "Delete",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleName> {
        RuleName::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One recorded rule application with enough parameters to replay it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: RuleName,
    pub clause: Option<usize>,
    pub subst: Subst,
    /// Literal indices: the chosen literal, or the two merged by Factorize.
    pub lits: Vec<usize>,
    /// Chosen refutation step for Explore-Refutation.
    pub step: Option<usize>,
    /// New bound for Grow.
    pub beta: Option<Term>,
    /// Replacement clause for Simplify.
    pub replacement: Option<Clause>,
    /// Human-readable outcome, not needed for replay.
    pub outcome: Option<String>,
}

impl RuleApplication {
    pub fn new(rule: RuleName) -> Self {
        RuleApplication {
            rule,
            clause: None,
            subst: Subst::new(),
            lits: Vec::new(),
            step: None,
            beta: None,
            replacement: None,
            outcome: None,
        }
    }
}

impl Pretty for RuleApplication {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule={} clause=", self.rule)?;
        match self.clause {
            Some(c) => write!(f, "{c}")?,
            None => write!(f, "-")?,
        }
        write!(f, " subst=")?;
        self.subst.pretty(sig, f)?;
        if !self.lits.is_empty() {
            let l: Vec<String> = self.lits.iter().map(|i| i.to_string()).collect();
            write!(f, " lit={}", l.join(","))?;
        }
        if let Some(s) = self.step {
            write!(f, " step={s}")?;
        }
        if let Some(b) = &self.beta {
            write!(f, " beta=")?;
            b.pretty(sig, f)?;
        }
        if let Some(c) = &self.replacement {
            write!(f, " new=")?;
            c.pretty(sig, f)?;
        }
        if let Some(o) = &self.outcome {
            write!(f, " {o}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Top,
    Bottom,
    Conflict(Closure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseOrigin {
    Input,
    Learned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseRecord {
    pub clause: Clause,
    pub origin: ClauseOrigin,
    pub active: bool,
    /// Ground instance the clause was learned from, kept until the clause is rewritten.
    pub witness: Option<Clause>,
}

/// Snapshot taken when a clause is learned.
#[derive(Debug, Clone)]
pub struct LearnRecord {
    pub clause_id: usize,
    pub instance: Closure,
    /// Trail in the conflict state right before Backtrack.
    pub trail: Trail,
    pub beta: Term,
    /// Clauses of N and U before learning.
    pub pool: Vec<Clause>,
}

/// A violated soundness condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub item: u8,
    pub message: String,
}

/// The state (trail; N; U; β; k; D) plus bookkeeping for regular runs.
#[derive(Debug, Clone)]
pub struct ProverState {
    pub sig: Signature,
    pub cfg: KboConfig,
    /// The input clauses as given.
    pub n0: Vec<Clause>,
    /// N and U with stable ids; learned clauses are appended.
    pub clauses: Vec<ClauseRecord>,
    pub trail: Trail,
    pub beta: Term,
    pub level: usize,
    pub status: Status,
    universe: Vec<Term>,
    pub last_rule: Option<RuleName>,
    pub conflict_after_decide: bool,
    pub skipped: bool,
    pub learn_records: Option<Vec<LearnRecord>>,
    audit_cache: HashMap<Clause, bool>,
}

impl PartialEq for ProverState {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
            && self.trail == other.trail
            && self.beta == other.beta
            && self.level == other.level
            && self.status == other.status
    }
}

impl ProverState {
    pub fn new(sig: Signature, cfg: KboConfig, clauses: Vec<Clause>, beta: Term) -> Result<ProverState, OrderError> {
        let universe = enumerate_ground_terms_below(&beta, &sig, &cfg)?;
        let clauses: Vec<Clause> = clauses.into_iter().map(|c| c.normalize_vars()).collect();
        Ok(ProverState {
            trail: Trail::new(cfg.clone()),
            sig,
            cfg,
            n0: clauses.clone(),
            clauses: clauses
                .into_iter()
                .map(|clause| ClauseRecord { clause, origin: ClauseOrigin::Input, active: true, witness: None })
                .collect(),
            beta,
            level: 0,
            status: Status::Top,
            universe,
            last_rule: None,
            conflict_after_decide: false,
            skipped: false,
            learn_records: None,
            audit_cache: HashMap::new(),
        })
    }

    /// Ground terms below β, ascending.
    pub fn universe(&self) -> &[Term] {
        &self.universe
    }

    pub fn clause(&self, id: usize) -> Result<&Clause, RuleError> {
        match self.clauses.get(id) {
            Some(r) if r.active => Ok(&r.clause),
            _ => Err(RuleError::NoSuchClause(id)),
        }
    }

    /// Ids of active clauses, N before U.
    pub fn active_ids(&self) -> Vec<usize> {
        (0..self.clauses.len()).filter(|&i| self.clauses[i].active).collect()
    }

    pub fn active_clauses(&self) -> Vec<Clause> {
        self.clauses.iter().filter(|r| r.active).map(|r| r.clause.clone()).collect()
    }

    pub fn learned_clauses(&self) -> Vec<Clause> {
        self.clauses.iter().filter(|r| r.active && r.origin == ClauseOrigin::Learned).map(|r| r.clause.clone()).collect()
    }

    pub fn is_conflict(&self) -> bool {
        matches!(self.status, Status::Conflict(_))
    }

    fn conflict_closure(&self, rule: RuleName) -> Result<Closure, RuleError> {
        match &self.status {
            Status::Conflict(c) => Ok(c.clone()),
            _ => guard(rule, "no conflict clause"),
        }
    }

    fn require_top(&self, rule: RuleName) -> Result<(), RuleError> {
        if self.status != Status::Top {
            return guard(rule, "state is not ⊤");
        }
        Ok(())
    }

    fn grounding_for(&self, rule: RuleName, c: &Clause, sigma: &Subst) -> Result<Subst, RuleError> {
        let vars = c.vars();
        let s = sigma.restrict(&vars);
        if vars.iter().any(|v| s.get(*v).map(|t| !t.is_ground()).unwrap_or(true)) {
            return guard(rule, "substitution is not a grounding of the clause");
        }
        Ok(s)
    }

    /// Every term in the range of `sigma` is irreducible by the trail's rewrite system.
    pub fn is_irreducible_grounding(&self, sigma: &Subst) -> bool {
        let conv = self.trail.conv();
        sigma.iter().all(|(_, t)| conv.is_irreducible(t))
    }

    /// Leaf rewrite steps for every trail entry.
    pub fn trail_leaves(&self) -> Vec<Arc<RewriteStep>> {
        self.trail
            .entries()
            .iter()
            .enumerate()
            .map(|(i, e)| Arc::new(RewriteStep::leaf_from_closure(&e.justification, 0, LeafSource::Trail(i))))
            .collect()
    }

    fn finish(&mut self, app: &RuleApplication) {
        self.last_rule = Some(app.rule);
    }

    fn show<T: Pretty + ?Sized>(&self, x: &T) -> String {
        self.sig.show(x).to_string()
    }

    // -----------------------------------------------------------------------
    // rules

    /// Propagates literal `li` of clause `id` under `sigma`, reduced to normal form.
    pub fn propagate(&mut self, id: usize, sigma: &Subst, li: usize) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::Propagate;
        self.require_top(R)?;
        let c = self.clause(id)?.clone();
        let sigma = self.grounding_for(R, &c, sigma)?;
        if li >= c.len() {
            return guard(R, "literal index out of range");
        }
        let l = &c.lits[li];
        let lg = l.apply(&sigma);
        let mut copies = vec![l.clone()];
        let mut c0 = Vec::new();
        for (j, k) in c.lits.iter().enumerate() {
            if j == li {
                continue;
            }
            if k.apply(&sigma) == lg {
                copies.push(k.clone());
            } else {
                c0.push(k.clone());
            }
        }
        let mu = mgu_literals(&copies).ok_or(RuleError::Guard { rule: R, reason: "copies of the literal do not unify".into() })?;
        let c0 = Clause::new(c0);
        if !self.trail.is_beta_false(&c0.apply(&sigma), &self.beta) {
            return guard(R, "rest of the clause is not false");
        }
        if self.trail.beta_value_of(&lg, &self.beta) != TruthValue::Undefined {
            return guard(R, "literal is not β-undefined");
        }
        let whole = Clause::with_first(l.clone(), &c0);
        if !clause_below(&whole.apply(&sigma), &self.beta, &self.cfg) {
            return guard(R, "clause instance is not below β");
        }
        if !self.is_irreducible_grounding(&sigma) {
            return guard(R, "grounding is reducible");
        }
        let target = RewriteStep::leaf(l.apply(&mu), c0.apply(&mu), sigma.clone(), LeafSource::Target);
        let chain = reduction_chain_application(&self.trail_leaves(), target, &self.cfg)?;
        let last = chain.last();
        let lit = last.ground_literal();
        let just = last.closure();
        let just = Closure::new(just.clause.clone(), just.grounding.restrict(&just.clause.vars()));
        self.trail.push(TrailEntry { literal: lit.clone(), level: self.level, justification: just, kind: EntryKind::Propagated })?;
        let mut app = RuleApplication::new(R);
        app.clause = Some(id);
        app.subst = sigma;
        app.lits = vec![li];
        app.outcome = Some(format!("→ {}", self.show(&lit)));
        self.finish(&app);
        Ok(app)
    }

    /// Decides literal `li` of clause `id` under `sigma`, reduced to normal form.
    pub fn decide(&mut self, id: usize, sigma: &Subst, li: usize) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::Decide;
        self.require_top(R)?;
        let c = self.clause(id)?.clone();
        let sigma = self.grounding_for(R, &c, sigma)?;
        if li >= c.len() {
            return guard(R, "literal index out of range");
        }
        let l = c.lits[li].clone();
        let c0 = c.without(li);
        if self.trail.beta_clause_value(&c0.apply(&sigma), &self.beta) == TruthValue::False {
            return guard(R, "rest of the clause is false");
        }
        if self.trail.beta_value_of(&l.apply(&sigma), &self.beta) != TruthValue::Undefined {
            return guard(R, "literal is not β-undefined");
        }
        if !clause_below(&c.apply(&sigma), &self.beta, &self.cfg) {
            return guard(R, "clause instance is not below β");
        }
        if !self.is_irreducible_grounding(&sigma) {
            return guard(R, "grounding is reducible");
        }
        let target = RewriteStep::leaf(l, c0, sigma.clone(), LeafSource::Target);
        let chain = reduction_chain_application(&self.trail_leaves(), target, &self.cfg)?;
        let last = chain.last();
        let lit = last.ground_literal();
        let taut = Clause::new(vec![last.literal.clone(), last.literal.complement()]);
        let grounding = last.grounding.restrict(&taut.vars());
        self.trail.push(TrailEntry {
            literal: lit.clone(),
            level: self.level + 1,
            justification: Closure::new(taut, grounding),
            kind: EntryKind::Decision,
        })?;
        self.level += 1;
        let mut app = RuleApplication::new(R);
        app.clause = Some(id);
        app.subst = sigma;
        app.lits = vec![li];
        app.outcome = Some(format!("→ {}", self.show(&lit)));
        self.finish(&app);
        Ok(app)
    }

    /// Marks clause `id` under `sigma` as conflict, or derives ⊥ at level 0.
    pub fn conflict(&mut self, id: usize, sigma: &Subst) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::Conflict;
        self.require_top(R)?;
        let c = self.clause(id)?.clone();
        let sigma = self.grounding_for(R, &c, sigma)?;
        let g = c.apply(&sigma);
        if !self.trail.is_beta_false(&g, &self.beta) {
            return guard(R, "clause instance is not β-false");
        }
        if !self.is_irreducible_grounding(&sigma) {
            return guard(R, "grounding is reducible");
        }
        let lvl = self.trail.clause_level(&g)?;
        let mut app = RuleApplication::new(R);
        app.clause = Some(id);
        app.subst = sigma.clone();
        if lvl == 0 {
            self.status = Status::Bottom;
            app.outcome = Some("level=0 → ⊥".into());
        } else {
            self.status = Status::Conflict(Closure::new(c, sigma));
            app.outcome = Some(format!("level={lvl}"));
        }
        self.conflict_after_decide = self.last_rule == Some(RuleName::Decide);
        self.skipped = false;
        self.finish(&app);
        Ok(app)
    }

    /// Sets the conflict closure, collapsing to ⊥ when it no longer depends on decisions.
    fn set_conflict(&mut self, c: Closure) -> Result<bool, RuleError> {
        let g = c.ground();
        if g.is_empty() || self.trail.clause_level(&g)? == 0 {
            self.status = Status::Bottom;
            Ok(true)
        } else {
            self.status = Status::Conflict(c);
            Ok(false)
        }
    }

    /// Removes the rightmost trail entry when the conflict does not depend on it.
    pub fn skip(&mut self) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::Skip;
        let d = self.conflict_closure(R)?;
        let n = self.trail.len();
        if n < 2 {
            return guard(R, "trail has fewer than two entries");
        }
        let g = d.ground();
        let still_false = g.lits.iter().all(|l| literal_below(l, &self.beta, &self.cfg) && self.trail.value_at(n - 1, l) == TruthValue::False);
        if !still_false {
            return guard(R, "conflict clause depends on the rightmost entry");
        }
        self.trail.pop_to(n - 1)?;
        self.level = self.trail.current_level();
        self.skipped = true;
        let app = RuleApplication::new(R);
        self.finish(&app);
        Ok(app)
    }

    /// Refutation of the strictly maximal conflict literal `li`; returns the
    /// chain steps that qualify as new conflict clauses, smallest first.
    pub fn explore_candidates(&self, li: usize) -> Result<(Vec<Arc<RewriteStep>>, Vec<usize>), RuleError> {
        const R: RuleName = RuleName::ExploreRefutation;
        let d = self.conflict_closure(R)?;
        if li >= d.clause.len() {
            return guard(R, "literal index out of range");
        }
        let g = d.ground();
        let lg = &g.lits[li];
        for (j, k) in g.lits.iter().enumerate() {
            if j != li && self.trail.gamma_star_cmp(k, lg, &self.beta) != std::cmp::Ordering::Less {
                return guard(R, "literal is not strictly maximal");
            }
        }
        if self.trail.defining_index(lg)? != Some(self.trail.len() - 1) {
            return guard(R, "rightmost entry is not the defining literal");
        }
        let target = RewriteStep::leaf(d.clause.lits[li].clone(), d.clause.without(li), d.grounding.clone(), LeafSource::Target);
        let chain = refutation(&self.trail_leaves(), target, &self.cfg)?;
        let mut ok: Vec<usize> = (0..chain.steps.len())
            .filter(|&j| {
                let c = chain.steps[j].ground_clause();
                self.trail.is_beta_false(&c, &self.beta)
                    && self.trail.gamma_star_compare_clauses(&c, &g, &self.beta) == OrderResult::Lt
            })
            .collect();
        ok.sort_by(|&a, &b| {
            let (ca, cb) = (chain.steps[a].ground_clause(), chain.steps[b].ground_clause());
            match self.trail.gamma_star_compare_clauses(&ca, &cb, &self.beta) {
                OrderResult::Lt => std::cmp::Ordering::Less,
                OrderResult::Gt => std::cmp::Ordering::Greater,
                _ => a.cmp(&b),
            }
        });
        Ok((chain.steps, ok))
    }

    /// Replaces the conflict by a clause from the refutation of literal `li`;
    /// `step` picks a chain step, defaulting to the smallest qualifying one.
    pub fn explore_refutation(&mut self, li: usize, step: Option<usize>) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::ExploreRefutation;
        let (steps, ok) = self.explore_candidates(li)?;
        let j = match step {
            Some(j) if ok.contains(&j) => j,
            Some(_) => return guard(R, "chosen step does not qualify"),
            None => match ok.first() {
                Some(&j) => j,
                None => return guard(R, "no refutation step qualifies"),
            },
        };
        let s = &steps[j];
        let clause = s.clause();
        let closure = Closure::new(clause.clone(), s.grounding.restrict(&clause.vars()));
        let bottom = self.set_conflict(closure.clone())?;
        let mut app = RuleApplication::new(R);
        app.lits = vec![li];
        app.step = Some(j);
        app.outcome = Some(if bottom { "→ ⊥".into() } else { format!("→ {}", self.show(&closure)) });
        self.finish(&app);
        Ok(app)
    }

    /// Merges conflict literals `i` and `j` whose instances coincide.
    pub fn factorize(&mut self, i: usize, j: usize) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::Factorize;
        let d = self.conflict_closure(R)?;
        let n = d.clause.len();
        if i == j || i >= n || j >= n {
            return guard(R, "bad literal indices");
        }
        let l = &d.clause.lits[i];
        let (gl, gk) = (l.apply(&d.grounding), d.clause.lits[j].apply(&d.grounding));
        let k = if gl == gk {
            d.clause.lits[j].clone()
        } else if gl == gk.flipped() {
            d.clause.lits[j].flipped()
        } else {
            return guard(R, "literal instances differ");
        };
        let mu = mgu_literals(&[l.clone(), k]).ok_or(RuleError::Guard { rule: R, reason: "literals do not unify".into() })?;
        let clause = d.clause.without(j).apply(&mu);
        let closure = Closure::new(clause.clone(), d.grounding.restrict(&clause.vars()));
        let bottom = self.set_conflict(closure.clone())?;
        let mut app = RuleApplication::new(R);
        app.lits = vec![i, j];
        app.outcome = Some(if bottom { "→ ⊥".into() } else { format!("→ {}", self.show(&closure)) });
        self.finish(&app);
        Ok(app)
    }

    /// Removes conflict literal `i`, an inequation whose sides coincide under the grounding.
    pub fn equality_resolution(&mut self, i: usize) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::EqualityResolution;
        let d = self.conflict_closure(R)?;
        if i >= d.clause.len() {
            return guard(R, "literal index out of range");
        }
        let l = &d.clause.lits[i];
        if l.positive || l.lhs.apply(&d.grounding) != l.rhs.apply(&d.grounding) {
            return guard(R, "literal is not a reflexive inequation");
        }
        let mu = mgu_pair(&l.lhs, &l.rhs).ok_or(RuleError::Guard { rule: R, reason: "sides do not unify".into() })?;
        let clause = d.clause.without(i).apply(&mu);
        let closure = Closure::new(clause.clone(), d.grounding.restrict(&clause.vars()));
        let bottom = self.set_conflict(closure.clone())?;
        let mut app = RuleApplication::new(R);
        app.lits = vec![i];
        app.outcome = Some(if bottom { "→ ⊥".into() } else { format!("→ {}", self.show(&closure)) });
        self.finish(&app);
        Ok(app)
    }

    /// Grounding making `c` β-false in the first `n` trail entries, if any.
    pub fn false_instance_at(&self, n: usize, c: &Clause, irreducible: bool) -> Option<Subst> {
        let terms: Vec<Term> = if irreducible {
            let conv = self.trail.conv_at(n);
            self.universe.iter().filter(|t| conv.is_irreducible(t)).cloned().collect()
        } else {
            self.universe.clone()
        };
        let full = n == self.trail.len();
        let mut found = None;
        for_each_grounding(
            c,
            &terms,
            |l| {
                literal_below(l, &self.beta, &self.cfg)
                    && if full { self.trail.value_of(l) } else { self.trail.value_at(n, l) } == TruthValue::False
            },
            |s| {
                found = Some(s.clone());
                true
            },
        );
        found
    }

    /// Learns the conflict clause and backjumps to the shortest prefix in
    /// which it has a false instance, minus the entry that made it false.
    pub fn backtrack(&mut self) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::Backtrack;
        let d = self.conflict_closure(R)?;
        let g = d.ground();
        let k = self.level;
        let Some(m) = self.trail.max_literal(&g, &self.beta) else { return guard(R, "empty conflict clause") };
        if self.trail.level_of(&g.lits[m])? != k {
            return guard(R, "maximal literal is not of the current level");
        }
        for (i, l) in g.lits.iter().enumerate() {
            if i != m && self.trail.level_of(l)? >= k {
                return guard(R, "rest of the clause is not below the current level");
            }
        }
        if self.conflict_after_decide && !self.skipped {
            let last = self.trail.last().expect("conflict at positive level has a trail");
            let comp = last.literal.complement();
            if !last.is_decision() || !g.lits.iter().any(|l| l.same_modulo_symmetry(&comp)) {
                return guard(R, "conflict after a decision must contain the decision's complement");
            }
        } else if !self.skipped {
            return guard(R, "no Skip since the conflict");
        }
        let learned = d.clause.normalize_vars();
        let mut n = None;
        for p in 0..=self.trail.len() {
            if self.false_instance_at(p, &learned, false).is_some() {
                n = Some(p);
                break;
            }
        }
        let n = match n {
            Some(0) | None => return guard(R, "learned clause has no false instance after a trail entry"),
            Some(n) => n,
        };
        let kentry = &self.trail.entries()[n - 1];
        let j = kentry.level;
        let i = usize::from(kentry.is_decision());
        let record = self.learn_records.as_ref().map(|_| LearnRecord {
            clause_id: self.clauses.len(),
            instance: d.clone(),
            trail: self.trail.clone(),
            beta: self.beta.clone(),
            pool: self.active_clauses(),
        });
        self.trail.pop_to(n - 1)?;
        self.level = j - i;
        let id = self.clauses.len();
        self.clauses.push(ClauseRecord { clause: learned.clone(), origin: ClauseOrigin::Learned, active: true, witness: Some(g) });
        if let (Some(r), Some(rs)) = (record, self.learn_records.as_mut()) {
            rs.push(r);
        }
        self.status = Status::Top;
        self.skipped = false;
        self.conflict_after_decide = false;
        let mut app = RuleApplication::new(R);
        app.clause = Some(id);
        app.outcome = Some(format!("→ learned {} level={}", self.show(&learned), self.level));
        self.finish(&app);
        Ok(app)
    }

    /// Empties the trail and raises the bound to `beta`.
    pub fn grow(&mut self, beta: Term) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::Grow;
        self.require_top(R)?;
        if !beta.is_ground() || kbo_compare(&self.beta, &beta, &self.cfg) != OrderResult::Lt {
            return guard(R, "new bound is not above the current one");
        }
        self.universe = enumerate_ground_terms_below(&beta, &self.sig, &self.cfg)?;
        self.beta = beta.clone();
        self.trail.clear();
        self.level = 0;
        let mut app = RuleApplication::new(R);
        app.beta = Some(beta);
        self.finish(&app);
        Ok(app)
    }

    pub fn restart(&mut self) -> Result<RuleApplication, RuleError> {
        const R: RuleName = RuleName::Restart;
        self.require_top(R)?;
        self.trail.clear();
        self.level = 0;
        let app = RuleApplication::new(R);
        self.finish(&app);
        Ok(app)
    }

    /// Replaces clause `id` by a simplified version.
    pub fn replace_clause(&mut self, id: usize, clause: Clause) -> Result<RuleApplication, RuleError> {
        self.clause(id)?;
        let clause = clause.normalize_vars();
        let rec = &mut self.clauses[id];
        rec.clause = clause.clone();
        rec.witness = None;
        let mut app = RuleApplication::new(RuleName::Simplify);
        app.clause = Some(id);
        app.replacement = Some(clause);
        Ok(app)
    }

    pub fn delete_clause(&mut self, id: usize) -> Result<RuleApplication, RuleError> {
        self.clause(id)?;
        self.clauses[id].active = false;
        let mut app = RuleApplication::new(RuleName::Delete);
        app.clause = Some(id);
        Ok(app)
    }

    /// Applies a recorded rule application.
    pub fn apply(&mut self, app: &RuleApplication) -> Result<RuleApplication, RuleError> {
        let lit = |k: usize| app.lits.get(k).copied().unwrap_or(0);
        let id = app.clause.unwrap_or(usize::MAX);
        match app.rule {
            RuleName::Propagate => self.propagate(id, &app.subst, lit(0)),
            RuleName::Decide => self.decide(id, &app.subst, lit(0)),
            RuleName::Conflict => self.conflict(id, &app.subst),
            RuleName::Skip => self.skip(),
            RuleName::ExploreRefutation => self.explore_refutation(lit(0), app.step),
            RuleName::Factorize => self.factorize(lit(0), lit(1)),
            RuleName::EqualityResolution => self.equality_resolution(lit(0)),
            RuleName::Backtrack => self.backtrack(),
            RuleName::Grow => match &app.beta {
                Some(b) => self.grow(b.clone()),
                None => guard(RuleName::Grow, "missing bound"),
            },
            RuleName::Restart => self.restart(),
            RuleName::Simplify => match &app.replacement {
                Some(c) => self.replace_clause(id, c.clone()),
                None => guard(RuleName::Simplify, "missing replacement"),
            },
            RuleName::Delete => self.delete_clause(id),
        }
    }

    // -----------------------------------------------------------------------
    // soundness audit

    fn entailment_pool(&self) -> Vec<Clause> {
        let mut seen = BTreeSet::new();
        let mut pool = Vec::new();
        for c in self.n0.iter().chain(self.clauses.iter().filter(|r| r.active).map(|r| &r.clause)) {
            if seen.insert(c.clone()) {
                pool.push(c.clone());
            }
        }
        pool
    }

    /// Whether a ground clause follows from ground instances below β of `pool`.
    fn entailed(&mut self, pool: &[Clause], instances: &mut Option<Vec<Clause>>, g: &Clause) -> Result<bool, OracleError> {
        if let Some(&b) = self.audit_cache.get(g) {
            return Ok(b);
        }
        if g.lits.iter().any(|l| l.is_trivially_true())
            || pool.iter().any(|c| is_instance_of(g, c))
        {
            self.audit_cache.insert(g.clone(), true);
            return Ok(true);
        }
        let inst = instances.get_or_insert_with(|| {
            let mut v = Vec::new();
            for c in pool {
                for i in ground_instances_over(c, &self.beta, &self.universe, &self.cfg) {
                    v.push(i.ground());
                }
            }
            v
        });
        let b = ground_entails(inst, g)?;
        self.audit_cache.insert(g.clone(), b);
        Ok(b)
    }

    /// Checks the soundness conditions; an empty result means the state is sound.
    pub fn check_sound_state(&mut self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut v = |item: u8, message: String| out.push(Violation { item, message });
        let pool = self.entailment_pool();
        let mut instances = None;
        let entries: Vec<TrailEntry> = self.trail.entries().to_vec();
        let beta = self.beta.clone();
        // 1: consistency
        let conv = self.trail.conv();
        for e in entries.iter().filter(|e| !e.literal.positive) {
            if conv.normal_form(&e.literal.lhs) == conv.normal_form(&e.literal.rhs) {
                v(1, format!("trail entails both {} and its complement", self.show(&e.literal)));
            }
        }
        for (i, e) in entries.iter().enumerate() {
            let item = if e.is_decision() { 3 } else { 2 };
            let l = &e.literal;
            let shown = self.show(l);
            if self.trail.value_at(i, l) != TruthValue::Undefined {
                v(item, format!("{shown} was defined before it was added"));
            }
            let c = self.trail.conv_at(i);
            if !c.is_irreducible(&l.lhs) || !c.is_irreducible(&l.rhs) {
                v(item, format!("{shown} is reducible by its prefix"));
            }
            let j = &e.justification;
            let jg = j.ground();
            if jg.lits.first() != Some(l) {
                v(item, format!("justification of {shown} does not start with it"));
                continue;
            }
            if !clause_below(&jg, &beta, &self.cfg) {
                v(item, format!("justification of {shown} is not below β"));
            }
            if e.is_decision() {
                if jg.len() != 2 || jg.lits[1] != l.complement() {
                    v(3, format!("decision {shown} is not justified by a tautology"));
                }
            } else {
                let rest = Clause::new(jg.lits[1..].to_vec());
                let false_before = rest
                    .lits
                    .iter()
                    .all(|k| literal_below(k, &beta, &self.cfg) && self.trail.value_at(i, k) == TruthValue::False);
                if !false_before {
                    v(2, format!("justification rest of {shown} is not false in its prefix"));
                }
                match self.entailed(&pool, &mut instances, &jg) {
                    Ok(true) => {}
                    Ok(false) => v(2, format!("justification of {shown} is not entailed")),
                    Err(e) => v(2, format!("oracle failed on justification of {shown}: {e}")),
                }
            }
        }
        // 4: learned clauses at their learn-time instance
        let learned: Vec<(usize, Clause)> = self
            .clauses
            .iter()
            .enumerate()
            .filter(|(_, r)| r.active && r.origin == ClauseOrigin::Learned)
            .filter_map(|(i, r)| r.witness.clone().map(|w| (i, w)))
            .collect();
        for (id, w) in learned {
            let prev: Vec<Clause> = self.n0.iter().cloned().chain((0..id).filter(|&i| self.clauses[i].active).map(|i| self.clauses[i].clause.clone())).collect();
            let mut prev_inst = None;
            match self.entailed(&prev, &mut prev_inst, &w) {
                Ok(true) => {}
                Ok(false) => v(4, format!("learned clause {id} is not entailed")),
                Err(e) => v(4, format!("oracle failed on learned clause {id}: {e}")),
            }
        }
        // 5: conflict clause
        if let Status::Conflict(d) = self.status.clone() {
            let g = d.ground();
            if !self.trail.is_beta_false(&g, &beta) {
                v(5, format!("conflict clause {} is not β-false", self.show(&g)));
            }
            match self.entailed(&pool, &mut instances, &g) {
                Ok(true) => {}
                Ok(false) => v(5, format!("conflict clause {} is not entailed", self.show(&g))),
                Err(e) => v(5, format!("oracle failed on conflict clause: {e}")),
            }
        }
        out
    }
}

/// Whether ground clause `g` is an instance of `c` with the same literal count.
fn is_instance_of(g: &Clause, c: &Clause) -> bool {
    if g.len() != c.len() {
        return false;
    }
    let mut used = vec![false; g.len()];
    fn go(c: &Clause, g: &Clause, i: usize, s: &Subst, used: &mut Vec<bool>) -> bool {
        if i == c.len() {
            return true;
        }
        for j in 0..g.len() {
            if used[j] {
                continue;
            }
            for cand in [c.lits[i].clone(), c.lits[i].flipped()] {
                let mut s2 = s.clone();
                if crate::terms::match_literal_into(&cand, &g.lits[j], &mut s2) {
                    used[j] = true;
                    if go(c, g, i + 1, &s2, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
        }
        false
    }
    go(c, g, 0, &Subst::new(), &mut used)
}

/// Depth-first enumeration of groundings of `c` over `terms`. `accept` is
/// called on each literal instance as soon as its variables are bound and
/// prunes the branch when it returns false; `visit` stops the search when
/// it returns true.
pub fn for_each_grounding(
    c: &Clause,
    terms: &[Term],
    mut accept: impl FnMut(&Literal) -> bool,
    mut visit: impl FnMut(&Subst) -> bool,
) {
    let order = c.vars_in_order();
    // literals grouped by the depth at which they become ground
    let mut at_depth: Vec<Vec<usize>> = vec![Vec::new(); order.len() + 1];
    for (i, l) in c.lits.iter().enumerate() {
        let d = l.vars().iter().map(|v| order.iter().position(|w| w == v).unwrap() + 1).max().unwrap_or(0);
        at_depth[d].push(i);
    }
    let mut s = Subst::new();
    fn go(
        c: &Clause,
        terms: &[Term],
        order: &[u32],
        at_depth: &[Vec<usize>],
        d: usize,
        s: &mut Subst,
        accept: &mut dyn FnMut(&Literal) -> bool,
        visit: &mut dyn FnMut(&Subst) -> bool,
    ) -> bool {
        for &i in &at_depth[d] {
            if !accept(&c.lits[i].apply(s)) {
                return false;
            }
        }
        if d == order.len() {
            return visit(s);
        }
        for t in terms {
            s.bind(order[d], t.clone());
            if go(c, terms, order, at_depth, d + 1, s, accept, visit) {
                return true;
            }
        }
        s.remove(order[d]);
        false
    }
    go(c, terms, &order, &at_depth, 0, &mut s, &mut accept, &mut visit);
}
