//! Ground rewrite systems, normalization, rewrite steps and inferences, and
//! the reduction chains and refutations built from them.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ordering::{ground_cmp, KboConfig};
use crate::terms::{match_term, mgu_pair, Clause, Closure, Literal, Position, Pretty, Signature, Subst, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("left premise of a rewrite inference must be a positive equation")]
    NotAnEquation,
    #[error("left premise is not oriented: the rewritten side is not the strictly larger one")]
    WrongOrientation,
    #[error("subterm at position {0} does not match the left premise")]
    Mismatch(Position),
    #[error("position {0} does not exist in the rewritten literal")]
    InvalidPosition(Position),
    #[error("target literal is not false in the trail")]
    NotFalse,
    #[error("internal rewriting error: {0}")]
    Internal(String),
}

/// Payload carried by each rule of a [`Trs`], updated whenever a rule's side
/// is rewritten during completion.
pub trait Justify: Clone {
    /// Justification of the equation obtained by rewriting `term` (one side of
    /// the equation justified by `self`) at `pos` with the rule justified by `by`.
    fn rewritten(&self, term: &Term, pos: &Position, by: &Self, cfg: &KboConfig) -> Result<Self, RewriteError>;
}

/// Set of trail indices an equation was derived from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance(pub BTreeSet<usize>);

impl Provenance {
    pub fn single(i: usize) -> Provenance {
        Provenance(BTreeSet::from([i]))
    }
}

impl Justify for Provenance {
    fn rewritten(&self, _: &Term, _: &Position, by: &Self, _: &KboConfig) -> Result<Self, RewriteError> {
        Ok(Provenance(self.0.union(&by.0).copied().collect()))
    }
}

impl Justify for () {
    fn rewritten(&self, _: &Term, _: &Position, _: &Self, _: &KboConfig) -> Result<Self, RewriteError> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule<P> {
    pub lhs: Term,
    pub rhs: Term,
    pub proof: P,
}

/// A ground rewrite system kept interreduced, hence convergent.
#[derive(Debug, Clone)]
pub struct Trs<P = Provenance> {
    rules: Vec<Rule<P>>,
    index: HashMap<Term, usize>,
}

impl<P> Default for Trs<P> {
    fn default() -> Self {
        Trs { rules: Vec::new(), index: HashMap::new() }
    }
}

/// One applied rule instance: rule index and the position it was applied at.
pub type TraceStep = (usize, Position);

impl<P: Justify> Trs<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rules(&self) -> &[Rule<P>] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn reindex(&mut self) {
        self.index = self.rules.iter().enumerate().map(|(i, r)| (r.lhs.clone(), i)).collect();
    }

    pub fn rule_for(&self, lhs: &Term) -> Option<&Rule<P>> {
        self.index.get(lhs).map(|&i| &self.rules[i])
    }

    /// Innermost normalization; returns the normal form and the applied steps,
    /// positions relative to the term as it was at the time of each step.
    pub fn normalize(&self, t: &Term) -> (Term, Vec<TraceStep>) {
        let mut trace = Vec::new();
        let mut path = Vec::new();
        let nf = self.norm_rec(t, &mut path, &mut trace);
        (nf, trace)
    }

    pub fn normal_form(&self, t: &Term) -> Term {
        if self.rules.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, a) => {
                let args: Vec<Term> = a.iter().map(|u| self.normal_form(u)).collect();
                let t2 = if args.as_slice() == &a[..] { t.clone() } else { Term::app(*f, args) };
                match self.index.get(&t2) {
                    Some(&i) => self.normal_form(&self.rules[i].rhs),
                    None => t2,
                }
            }
        }
    }

    pub fn is_irreducible(&self, t: &Term) -> bool {
        if self.index.contains_key(t) {
            return false;
        }
        t.args().iter().all(|u| self.is_irreducible(u))
    }

    fn norm_rec(&self, t: &Term, path: &mut Vec<usize>, trace: &mut Vec<TraceStep>) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, a) => {
                let mut args = Vec::with_capacity(a.len());
                for (i, u) in a.iter().enumerate() {
                    path.push(i + 1);
                    args.push(self.norm_rec(u, path, trace));
                    path.pop();
                }
                let t2 = Term::app(*f, args);
                match self.index.get(&t2) {
                    Some(&i) => {
                        trace.push((i, Position(path.clone())));
                        let rhs = self.rules[i].rhs.clone();
                        self.norm_rec(&rhs, path, trace)
                    }
                    None => t2,
                }
            }
        }
    }

    /// Normalizes `t`, threading the justification of the equation `t` is a side of.
    pub fn normalize_justified(&self, t: &Term, proof: P, cfg: &KboConfig) -> Result<(Term, P), RewriteError> {
        let (_, trace) = self.normalize(t);
        let mut cur = t.clone();
        let mut proof = proof;
        for (i, pos) in trace {
            let rule = &self.rules[i];
            proof = proof.rewritten(&cur, &pos, &rule.proof, cfg)?;
            cur = cur.replace_at(&pos, rule.rhs.clone()).map_err(|e| RewriteError::Internal(e.to_string()))?;
        }
        Ok((cur, proof))
    }

    /// Adds `s = t` and restores an interreduced system by ground completion.
    pub fn add_equation(&mut self, s: Term, t: Term, proof: P, cfg: &KboConfig) -> Result<(), RewriteError> {
        let mut queue = VecDeque::from([(s, t, proof)]);
        while let Some((s, t, p)) = queue.pop_front() {
            if s == t {
                continue;
            }
            let (s1, p) = self.normalize_justified(&s, p, cfg)?;
            if s1 == t {
                continue;
            }
            let (t1, p) = self.normalize_justified(&t, p, cfg)?;
            if s1 == t1 {
                continue;
            }
            let (l, r) = match ground_cmp(&s1, &t1, cfg) {
                Ordering::Greater => (s1, t1),
                _ => (t1, s1),
            };
            let old = std::mem::take(&mut self.rules);
            for rule in old {
                if rule.lhs.contains(&l) {
                    queue.push_back((rule.lhs, rule.rhs, rule.proof));
                } else {
                    self.rules.push(rule);
                }
            }
            self.rules.push(Rule { lhs: l.clone(), rhs: r, proof: p });
            self.reindex();
            for i in 0..self.rules.len() {
                if self.rules[i].rhs.contains(&l) {
                    let rhs = self.rules[i].rhs.clone();
                    let proof = self.rules[i].proof.clone();
                    let (nr, np) = self.normalize_justified(&rhs, proof, cfg)?;
                    self.rules[i].rhs = nr;
                    self.rules[i].proof = np;
                }
            }
        }
        Ok(())
    }
}

/// Builds a convergent system from ground equations by orientation and interreduction.
pub fn build_conv<P: Justify>(equations: impl IntoIterator<Item = (Term, Term, P)>, cfg: &KboConfig) -> Trs<P> {
    let mut trs = Trs::new();
    for (s, t, p) in equations {
        trs.add_equation(s, t, p, cfg).expect("provenance payloads cannot fail");
    }
    trs
}

// ---------------------------------------------------------------------------
// rewrite steps

/// Where a leaf step comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafSource {
    /// Index of a trail entry.
    Trail(usize),
    /// The literal being reduced or refuted.
    Target,
}

/// Five-tuple proof node: rewrite literal and clause under a grounding, plus
/// the two premises and the position for inner steps.
#[derive(Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub literal: Literal,
    /// The clause without the rewrite literal.
    pub rest: Clause,
    pub grounding: Subst,
    pub premises: Option<(Arc<RewriteStep>, Arc<RewriteStep>)>,
    pub position: Option<Position>,
    pub leaf: Option<LeafSource>,
}

impl fmt::Debug for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?}, {:?}", self.literal, self.clause(), self.grounding)?;
        if let Some(p) = &self.position {
            write!(f, ", p={p}")?;
        }
        write!(f, ")")
    }
}

impl RewriteStep {
    pub fn leaf(literal: Literal, rest: Clause, grounding: Subst, source: LeafSource) -> RewriteStep {
        RewriteStep { literal, rest, grounding, premises: None, position: None, leaf: Some(source) }
    }

    /// Leaf for literal `i` of a closure.
    pub fn leaf_from_closure(c: &Closure, i: usize, source: LeafSource) -> RewriteStep {
        RewriteStep::leaf(c.clause.lits[i].clone(), c.clause.without(i), c.grounding.clone(), source)
    }

    pub fn is_leaf(&self) -> bool {
        self.premises.is_none()
    }

    /// The full clause, rewrite literal first.
    pub fn clause(&self) -> Clause {
        Clause::with_first(self.literal.clone(), &self.rest)
    }

    pub fn closure(&self) -> Closure {
        Closure::new(self.clause(), self.grounding.clone())
    }

    pub fn ground_literal(&self) -> Literal {
        self.literal.apply(&self.grounding)
    }

    pub fn ground_rest(&self) -> Clause {
        self.rest.apply(&self.grounding)
    }

    pub fn ground_clause(&self) -> Clause {
        self.clause().apply(&self.grounding)
    }

    fn max_var(&self) -> u32 {
        let mut m = self.literal.max_var().max(self.rest.max_var());
        for (v, t) in self.grounding.iter() {
            m = m.max(Some(v)).max(t.max_var());
        }
        m.map(|v| v + 1).unwrap_or(0)
    }
}

impl Pretty for RewriteStep {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        self.literal.pretty(sig, f)?;
        write!(f, ")·")?;
        self.grounding.pretty(sig, f)?;
        write!(f, " in ")?;
        self.clause().pretty(sig, f)?;
        if let Some(p) = &self.position {
            write!(f, " at {p}")?;
        }
        Ok(())
    }
}

impl Justify for Arc<RewriteStep> {
    fn rewritten(&self, term: &Term, pos: &Position, by: &Self, cfg: &KboConfig) -> Result<Self, RewriteError> {
        let g = self.ground_literal();
        let side = if g.lhs == *term {
            1
        } else if g.rhs == *term {
            2
        } else {
            return Err(RewriteError::Internal("rewritten term is not a side of its justification".into()));
        };
        let p = Position::prefixed(side, pos);
        rewrite_inference(by, self, &p, cfg).map(Arc::new)
    }
}

/// Linear term with the shape of `ground` along `path`: symbols on the path,
/// fresh variables everywhere else and at the end of the path.
fn shape_along(ground: &Term, path: &[usize], next: &mut u32) -> Option<Term> {
    match path.split_first() {
        None => {
            let v = *next;
            *next += 1;
            Some(Term::Var(v))
        }
        Some((&i, rest)) => {
            let Term::App(f, args) = ground else { return None };
            if i == 0 || i > args.len() {
                return None;
            }
            let mut out = Vec::with_capacity(args.len());
            for j in 1..=args.len() {
                if j == i {
                    out.push(shape_along(&args[j - 1], rest, next)?);
                } else {
                    out.push(Term::Var(*next));
                    *next += 1;
                }
            }
            Some(Term::app(*f, out))
        }
    }
}

/// Rewrites the rewrite literal of `i2` at literal position `p` with the
/// equation of `i1`. Either side of `i1`'s equation may be the one matching;
/// it must be the strictly larger side of the ground equation.
pub fn rewrite_inference(
    i1: &Arc<RewriteStep>,
    i2: &Arc<RewriteStep>,
    p: &Position,
    cfg: &KboConfig,
) -> Result<RewriteStep, RewriteError> {
    if !i1.literal.positive {
        return Err(RewriteError::NotAnEquation);
    }
    let target_ground = i2.ground_literal();
    let target = target_ground.subterm_at(p).ok_or_else(|| RewriteError::InvalidPosition(p.clone()))?.clone();

    // rename the left premise apart
    let off = i2.max_var();
    let lit1 = i1.literal.shift_vars(off);
    let rest1 = i1.rest.shift_vars(off);
    let sigma1 = i1.grounding.shift_vars(off);
    let g1 = lit1.apply(&sigma1);
    let (l1, r1) = if g1.lhs == target {
        if ground_cmp(&g1.rhs, &g1.lhs, cfg) != Ordering::Less {
            return Err(RewriteError::WrongOrientation);
        }
        (lit1.lhs.clone(), lit1.rhs.clone())
    } else if g1.rhs == target {
        if ground_cmp(&g1.lhs, &g1.rhs, cfg) != Ordering::Less {
            return Err(RewriteError::WrongOrientation);
        }
        (lit1.rhs.clone(), lit1.lhs.clone())
    } else {
        return Err(RewriteError::Mismatch(p.clone()));
    };

    let mut fresh = off + i1.max_var();
    let mut lit2 = i2.literal.clone();
    let mut rest2 = i2.rest.clone();
    let mut sigma2 = i2.grounding.clone();
    if lit2.subterm_at(p).is_none() {
        // p lies below a variable occurrence: instantiate that variable just
        // enough for p to exist
        let mut k = p.0.len();
        while k > 0 && lit2.subterm_at(&Position(p.0[..k].to_vec())).is_none() {
            k -= 1;
        }
        let q1 = Position(p.0[..k].to_vec());
        let Some(Term::Var(x)) = lit2.subterm_at(&q1).cloned() else {
            return Err(RewriteError::Mismatch(p.clone()));
        };
        let gx = sigma2.get(x).cloned().ok_or_else(|| RewriteError::Internal("grounding misses a variable".into()))?;
        let shape = shape_along(&gx, &p.0[k..], &mut fresh).ok_or_else(|| RewriteError::Mismatch(p.clone()))?;
        let rho = match_term(&shape, &gx).ok_or_else(|| RewriteError::Internal("shape does not match".into()))?;
        let delta = Subst::from_pairs([(x, shape)]);
        lit2 = lit2.apply(&delta);
        rest2 = rest2.apply(&delta);
        sigma2.remove(x);
        sigma2 = sigma2.union(&rho);
    }
    let sub = lit2.subterm_at(p).ok_or_else(|| RewriteError::InvalidPosition(p.clone()))?.clone();
    let mu = mgu_pair(&sub, &l1).ok_or_else(|| RewriteError::Mismatch(p.clone()))?;
    let lit3 = lit2.replace_at(p, r1).map_err(|_| RewriteError::InvalidPosition(p.clone()))?.apply(&mu);
    let rest3 = rest1.apply(&mu).concat(&rest2.apply(&mu));
    let theta = sigma1.union(&sigma2);

    // rename the conclusion to small variable indices
    let whole = Clause::with_first(lit3, &rest3);
    let order = whole.vars_in_order();
    let mut ren = Subst::new();
    let mut grounding = Subst::new();
    for (i, v) in order.iter().enumerate() {
        ren.bind(*v, Term::Var(i as u32));
        let g = Term::Var(*v).apply(&mu).apply(&theta);
        if !g.is_ground() {
            return Err(RewriteError::Internal("conclusion grounding is not ground".into()));
        }
        grounding.bind(i as u32, g);
    }
    let whole = whole.apply(&ren);
    let literal = whole.lits[0].clone();
    let rest = whole.without(0);
    Ok(RewriteStep {
        literal,
        rest,
        grounding,
        premises: Some((i1.clone(), i2.clone())),
        position: Some(p.clone()),
        leaf: None,
    })
}

// ---------------------------------------------------------------------------
// chains

/// A sequence of rewrite steps in which every inner step's premises occur earlier.
#[derive(Debug, Clone)]
pub struct ReductionChain {
    pub steps: Vec<Arc<RewriteStep>>,
}

impl ReductionChain {
    /// Collects every step the final step depends on: the target leaf first,
    /// then trail leaves, then inner steps with premises before conclusions.
    pub fn from_final(last: Arc<RewriteStep>) -> ReductionChain {
        let mut post = Vec::new();
        let mut seen = HashSet::new();
        fn go(s: &Arc<RewriteStep>, seen: &mut HashSet<*const RewriteStep>, out: &mut Vec<Arc<RewriteStep>>) {
            if !seen.insert(Arc::as_ptr(s)) {
                return;
            }
            if let Some((a, b)) = &s.premises {
                go(a, seen, out);
                go(b, seen, out);
            }
            out.push(s.clone());
        }
        go(&last, &mut seen, &mut post);
        let mut steps: Vec<Arc<RewriteStep>> =
            post.iter().filter(|s| s.leaf == Some(LeafSource::Target)).cloned().collect();
        let mut trail_leaves: Vec<Arc<RewriteStep>> =
            post.iter().filter(|s| matches!(s.leaf, Some(LeafSource::Trail(_)))).cloned().collect();
        trail_leaves.sort_by_key(|s| match s.leaf {
            Some(LeafSource::Trail(i)) => i,
            _ => 0,
        });
        steps.extend(trail_leaves);
        steps.extend(post.iter().filter(|s| !s.is_leaf()).cloned());
        ReductionChain { steps }
    }

    pub fn last(&self) -> &Arc<RewriteStep> {
        self.steps.last().expect("chains are never empty")
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Index of a step in this chain, by identity.
    pub fn index_of(&self, s: &Arc<RewriteStep>) -> Option<usize> {
        self.steps.iter().position(|t| Arc::ptr_eq(t, s))
    }

    /// Every inner step's premises occur earlier in the chain.
    pub fn is_well_formed(&self) -> bool {
        self.steps.iter().enumerate().all(|(i, s)| match &s.premises {
            None => true,
            Some((a, b)) => {
                self.steps[..i].iter().any(|t| Arc::ptr_eq(t, a)) && self.steps[..i].iter().any(|t| Arc::ptr_eq(t, b))
            }
        })
    }
}

fn proof_system(trail: &[Arc<RewriteStep>], cfg: &KboConfig) -> Result<Trs<Arc<RewriteStep>>, RewriteError> {
    let mut trs = Trs::new();
    for leaf in trail.iter().filter(|s| s.literal.positive) {
        let g = leaf.ground_literal();
        trs.add_equation(g.lhs, g.rhs, leaf.clone(), cfg)?;
    }
    Ok(trs)
}

fn normalize_step(
    trs: &Trs<Arc<RewriteStep>>,
    step: Arc<RewriteStep>,
    cfg: &KboConfig,
) -> Result<Arc<RewriteStep>, RewriteError> {
    let g = step.ground_literal();
    let (_, step) = trs.normalize_justified(&g.lhs, step, cfg)?;
    let (_, step) = trs.normalize_justified(&g.rhs, step, cfg)?;
    Ok(step)
}

/// Reduces both sides of `target` to their normal forms under the system
/// completed from the positive trail leaves.
pub fn reduction_chain_application(
    trail: &[Arc<RewriteStep>],
    target: RewriteStep,
    cfg: &KboConfig,
) -> Result<ReductionChain, RewriteError> {
    let trs = proof_system(trail, cfg)?;
    let last = normalize_step(&trs, Arc::new(target), cfg)?;
    Ok(ReductionChain::from_final(last))
}

/// Derives `s != s` from the trail leaves and a false target literal.
pub fn refutation(trail: &[Arc<RewriteStep>], target: RewriteStep, cfg: &KboConfig) -> Result<ReductionChain, RewriteError> {
    let target = Arc::new(target);
    let g = target.ground_literal();
    if g.is_trivially_false() {
        return Ok(ReductionChain::from_final(target));
    }
    let mut trs = proof_system(trail, cfg)?;
    if !g.positive {
        let last = normalize_step(&trs, target, cfg)?;
        if last.ground_literal().is_trivially_false() {
            return Ok(ReductionChain::from_final(last));
        }
        return Err(RewriteError::NotFalse);
    }
    trs.add_equation(g.lhs.clone(), g.rhs.clone(), target, cfg)?;
    for leaf in trail.iter().filter(|s| !s.literal.positive) {
        let gl = leaf.ground_literal();
        if trs.normal_form(&gl.lhs) == trs.normal_form(&gl.rhs) {
            let last = normalize_step(&trs, leaf.clone(), cfg)?;
            if last.ground_literal().is_trivially_false() {
                return Ok(ReductionChain::from_final(last));
            }
            return Err(RewriteError::Internal("joinable inequation did not normalize to s != s".into()));
        }
    }
    Err(RewriteError::NotFalse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::Signature;

    fn consts(names: &[&str]) -> (Signature, KboConfig) {
        let mut s = Signature::new();
        for n in names {
            let ar = if n.starts_with('f') || n.starts_with('g') || n.starts_with('h') { 1 } else { 0 };
            s.add(n, ar).unwrap();
        }
        let cfg = KboConfig::default_for(&s);
        (s, cfg)
    }

    #[test]
    fn conv_of_propagate_smaller_equation_trail() {
        // precedence d < c < b < a
        let (s, cfg) = consts(&["f", "a", "b", "c", "d"]);
        let t = |n: &str| s.t(n, vec![]);
        let trs = build_conv(
            [
                (t("c"), t("d"), Provenance::single(0)),
                (t("a"), t("b"), Provenance::single(1)),
                (t("b"), t("d"), Provenance::single(2)),
            ],
            &cfg,
        );
        let mut got: Vec<String> =
            trs.rules().iter().map(|r| format!("{}->{}", s.show(&r.lhs), s.show(&r.rhs))).collect();
        got.sort();
        assert_eq!(got, vec!["a->d", "b->d", "c->d"]);
        let fa = s.t("f", vec![t("a")]);
        let (nf, trace) = trs.normalize(&fa);
        assert_eq!(nf, s.t("f", vec![t("d")]));
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].1, Position(vec![1]));
        assert_eq!(trs.rules()[trace[0].0].lhs, t("a"));
    }

    #[test]
    fn trivial_systems() {
        let (s, cfg) = consts(&["f", "a", "b"]);
        let empty: Trs = build_conv(Vec::new(), &cfg);
        assert!(empty.is_empty());
        let fa = s.t("f", vec![s.t("a", vec![])]);
        assert_eq!(empty.normalize(&fa), (fa.clone(), vec![]));
        let one = build_conv([(s.t("a", vec![]), s.t("b", vec![]), Provenance::single(0))], &cfg);
        assert_eq!(one.rules().len(), 1);
        assert_eq!(one.rules()[0].lhs, s.t("a", vec![]));
        let (nf, trace) = one.normalize(&fa);
        assert_eq!(nf, s.t("f", vec![s.t("b", vec![])]));
        assert_eq!(trace, vec![(0, Position(vec![1]))]);
    }

    #[test]
    fn wrong_orientation_and_non_equation_rejected() {
        let (s, cfg) = consts(&["f", "a", "b"]);
        let a = s.t("a", vec![]);
        let b = s.t("b", vec![]);
        let fb = s.t("f", vec![b.clone()]);
        let neq = Arc::new(RewriteStep::leaf(Literal::neq(a.clone(), b.clone()), Clause::empty(), Subst::new(), LeafSource::Trail(0)));
        let target = Arc::new(RewriteStep::leaf(Literal::neq(fb.clone(), a.clone()), Clause::empty(), Subst::new(), LeafSource::Target));
        assert_eq!(rewrite_inference(&neq, &target, &Position(vec![1, 1]), &cfg), Err(RewriteError::NotAnEquation));
        // b is the smaller side of a = b, so it cannot be rewritten to a
        let eq = Arc::new(RewriteStep::leaf(Literal::eq(a.clone(), b.clone()), Clause::empty(), Subst::new(), LeafSource::Trail(0)));
        assert_eq!(rewrite_inference(&eq, &target, &Position(vec![1, 1]), &cfg), Err(RewriteError::WrongOrientation));
        assert!(matches!(rewrite_inference(&eq, &target, &Position(vec![1]), &cfg), Err(RewriteError::Mismatch(_))));
    }
}
