//! Knuth–Bendix ordering on terms and its multiset liftings to literals and clauses.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::terms::{Clause, Literal, Signature, Sym, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("the signature has no constant, so there are no ground terms")]
    NoConstant,
    #[error("precedence must list every symbol exactly once")]
    BadPrecedence,
    #[error("weights must be positive and at least the variable weight")]
    BadWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderResult {
    Lt,
    Gt,
    Eq,
    Incomparable,
}

impl OrderResult {
    pub fn reverse(self) -> OrderResult {
        match self {
            OrderResult::Lt => OrderResult::Gt,
            OrderResult::Gt => OrderResult::Lt,
            r => r,
        }
    }

    pub fn from_ordering(o: Ordering) -> OrderResult {
        match o {
            Ordering::Less => OrderResult::Lt,
            Ordering::Greater => OrderResult::Gt,
            Ordering::Equal => OrderResult::Eq,
        }
    }
}

/// Weights and precedence of a KBO instance.
///
/// Arbitrary user weights are accepted as long as every symbol weighs at
/// least the variable weight; whether only finitely many ground terms lie
/// below a given term is not checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KboConfig {
    weights: Vec<u32>,
    /// Higher rank means greater in the precedence.
    rank: Vec<u32>,
    pub variable_weight: u32,
}

impl KboConfig {
    /// Weight 1 everywhere; precedence is the reverse of declaration order, so
    /// the first declared symbol is the greatest.
    pub fn default_for(sig: &Signature) -> KboConfig {
        let n = sig.len() as u32;
        KboConfig {
            weights: vec![1; sig.len()],
            rank: (0..n).map(|i| n - 1 - i).collect(),
            variable_weight: 1,
        }
    }

    /// Sets the precedence from a list in ascending order.
    pub fn set_precedence(&mut self, ascending: &[Sym]) -> Result<(), OrderError> {
        let n = self.rank.len();
        let mut seen = vec![false; n];
        if ascending.len() != n {
            return Err(OrderError::BadPrecedence);
        }
        for (r, s) in ascending.iter().enumerate() {
            let i = s.0 as usize;
            if i >= n || seen[i] {
                return Err(OrderError::BadPrecedence);
            }
            seen[i] = true;
            self.rank[i] = r as u32;
        }
        Ok(())
    }

    pub fn set_weight(&mut self, s: Sym, w: u32) -> Result<(), OrderError> {
        if w == 0 || w < self.variable_weight {
            return Err(OrderError::BadWeight);
        }
        self.weights[s.0 as usize] = w;
        Ok(())
    }

    pub fn weight_of(&self, s: Sym) -> u32 {
        self.weights[s.0 as usize]
    }

    pub fn rank_of(&self, s: Sym) -> u32 {
        self.rank[s.0 as usize]
    }

    /// Symbols in ascending precedence.
    pub fn precedence(&self) -> Vec<Sym> {
        let mut v: Vec<Sym> = (0..self.rank.len() as u32).map(Sym).collect();
        v.sort_by_key(|s| self.rank_of(*s));
        v
    }

    /// Extends the configuration for a symbol appended to the signature.
    pub fn push_symbol(&mut self, weight: u32, lowest: bool) {
        self.weights.push(weight);
        if lowest {
            for r in &mut self.rank {
                *r += 1;
            }
            self.rank.push(0);
        } else {
            self.rank.push(self.rank.len() as u32);
        }
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }
}

pub fn weight(t: &Term, cfg: &KboConfig) -> u64 {
    match t {
        Term::Var(_) => cfg.variable_weight as u64,
        Term::App(f, a) => cfg.weight_of(*f) as u64 + a.iter().map(|u| weight(u, cfg)).sum::<u64>(),
    }
}

fn weight_vars(t: &Term, cfg: &KboConfig, vars: &mut BTreeMap<u32, i64>) -> u64 {
    match t {
        Term::Var(v) => {
            *vars.entry(*v).or_insert(0) += 1;
            cfg.variable_weight as u64
        }
        Term::App(f, a) => cfg.weight_of(*f) as u64 + a.iter().map(|u| weight_vars(u, cfg, vars)).sum::<u64>(),
    }
}

fn covers(big: &BTreeMap<u32, i64>, small: &BTreeMap<u32, i64>) -> bool {
    small.iter().all(|(v, n)| big.get(v).copied().unwrap_or(0) >= *n)
}

/// Total comparison of ground terms.
pub fn ground_cmp(s: &Term, t: &Term, cfg: &KboConfig) -> Ordering {
    if s == t {
        return Ordering::Equal;
    }
    let ws = weight(s, cfg);
    let wt = weight(t, cfg);
    if ws != wt {
        return ws.cmp(&wt);
    }
    match (s, t) {
        (Term::App(f, fa), Term::App(g, ga)) => {
            if f != g {
                return cfg.rank_of(*f).cmp(&cfg.rank_of(*g));
            }
            for (x, y) in fa.iter().zip(ga.iter()) {
                if x != y {
                    return ground_cmp(x, y, cfg);
                }
            }
            Ordering::Equal
        }
        // only reachable for non-ground input
        _ => s.cmp(t),
    }
}

/// Knuth–Bendix comparison of two terms.
pub fn kbo_compare(s: &Term, t: &Term, cfg: &KboConfig) -> OrderResult {
    if s == t {
        return OrderResult::Eq;
    }
    if s.is_ground() && t.is_ground() {
        return OrderResult::from_ordering(ground_cmp(s, t, cfg));
    }
    let mut vs = BTreeMap::new();
    let mut vt = BTreeMap::new();
    let ws = weight_vars(s, cfg, &mut vs);
    let wt = weight_vars(t, cfg, &mut vt);
    let s_ok = covers(&vs, &vt);
    let t_ok = covers(&vt, &vs);
    let decide = |s_bigger: bool| {
        if s_bigger {
            if s_ok {
                OrderResult::Gt
            } else {
                OrderResult::Incomparable
            }
        } else if t_ok {
            OrderResult::Lt
        } else {
            OrderResult::Incomparable
        }
    };
    if ws != wt {
        return decide(ws > wt);
    }
    match (s, t) {
        (Term::App(f, fa), Term::App(g, ga)) => {
            if f != g {
                return decide(cfg.rank_of(*f) > cfg.rank_of(*g));
            }
            for (x, y) in fa.iter().zip(ga.iter()) {
                if x != y {
                    return match kbo_compare(x, y, cfg) {
                        OrderResult::Gt => decide(true),
                        OrderResult::Lt => decide(false),
                        _ => OrderResult::Incomparable,
                    };
                }
            }
            OrderResult::Eq
        }
        _ => OrderResult::Incomparable,
    }
}

/// `{s, t}` for `s = t`, `{s, s, t, t}` for `s != t`.
pub fn literal_multiset(l: &Literal) -> Vec<Term> {
    if l.positive {
        vec![l.lhs.clone(), l.rhs.clone()]
    } else {
        vec![l.lhs.clone(), l.lhs.clone(), l.rhs.clone(), l.rhs.clone()]
    }
}

/// Dershowitz–Manna extension of an element comparison. Elements are
/// considered equal exactly when `cmp` returns `Eq`.
pub fn multiset_compare<T>(a: &[T], b: &[T], cmp: impl Fn(&T, &T) -> OrderResult) -> OrderResult {
    let mut rest_b: Vec<&T> = b.iter().collect();
    let mut rest_a: Vec<&T> = Vec::new();
    for x in a {
        if let Some(i) = rest_b.iter().position(|y| cmp(x, y) == OrderResult::Eq) {
            rest_b.swap_remove(i);
        } else {
            rest_a.push(x);
        }
    }
    if rest_a.is_empty() && rest_b.is_empty() {
        return OrderResult::Eq;
    }
    let dominates = |big: &[&T], small: &[&T]| {
        !big.is_empty() && small.iter().all(|y| big.iter().any(|x| cmp(x, y) == OrderResult::Gt))
    };
    if dominates(&rest_a, &rest_b) {
        OrderResult::Gt
    } else if dominates(&rest_b, &rest_a) {
        OrderResult::Lt
    } else {
        OrderResult::Incomparable
    }
}

pub fn compare_literals(l: &Literal, k: &Literal, cfg: &KboConfig) -> OrderResult {
    multiset_compare(&literal_multiset(l), &literal_multiset(k), |s, t| kbo_compare(s, t, cfg))
}

pub fn compare_clauses(c: &Clause, d: &Clause, cfg: &KboConfig) -> OrderResult {
    let cm: Vec<Vec<Term>> = c.lits.iter().map(literal_multiset).collect();
    let dm: Vec<Vec<Term>> = d.lits.iter().map(literal_multiset).collect();
    multiset_compare(&cm, &dm, |x, y| multiset_compare(x, y, |s, t| kbo_compare(s, t, cfg)))
}

/// Compares a literal with a term `t`, the term embedded as the multiset `{t}`.
pub fn compare_literal_term(l: &Literal, t: &Term, cfg: &KboConfig) -> OrderResult {
    multiset_compare(&literal_multiset(l), std::slice::from_ref(t), |s, u| kbo_compare(s, u, cfg))
}

/// Compares a clause with a term `t`, the term embedded as `{{t}}`.
pub fn compare_clause_term(c: &Clause, t: &Term, cfg: &KboConfig) -> OrderResult {
    let cm: Vec<Vec<Term>> = c.lits.iter().map(literal_multiset).collect();
    let tm = vec![vec![t.clone()]];
    multiset_compare(&cm, &tm, |x, y| multiset_compare(x, y, |s, u| kbo_compare(s, u, cfg)))
}

/// `l ≺ β`: both sides strictly below β.
pub fn literal_below(l: &Literal, beta: &Term, cfg: &KboConfig) -> bool {
    kbo_compare(&l.lhs, beta, cfg) == OrderResult::Lt && kbo_compare(&l.rhs, beta, cfg) == OrderResult::Lt
}

pub fn clause_below(c: &Clause, beta: &Term, cfg: &KboConfig) -> bool {
    c.lits.iter().all(|l| literal_below(l, beta, cfg))
}

/// Total comparison of ground literals by the multiset extension, with ties
/// between `s # t` and `t # s` broken by the left-hand side.
pub fn ground_literal_cmp(l: &Literal, k: &Literal, cfg: &KboConfig) -> Ordering {
    if l == k {
        return Ordering::Equal;
    }
    let sorted = |l: &Literal| {
        let mut v = literal_multiset(l);
        v.sort_by(|a, b| ground_cmp(b, a, cfg));
        v
    };
    let a = sorted(l);
    let b = sorted(k);
    for (x, y) in a.iter().zip(b.iter()) {
        match ground_cmp(x, y, cfg) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    match a.len().cmp(&b.len()) {
        Ordering::Equal => ground_cmp(&l.lhs, &k.lhs, cfg),
        o => o,
    }
}

/// All ground terms strictly below `beta`, ascending.
pub fn enumerate_ground_terms_below(beta: &Term, sig: &Signature, cfg: &KboConfig) -> Result<Vec<Term>, OrderError> {
    if sig.constants().next().is_none() {
        return Err(OrderError::NoConstant);
    }
    let max_w = weight(beta, cfg) as usize;
    // by_weight[w] = all ground terms of weight w
    let mut by_weight: Vec<Vec<Term>> = vec![Vec::new(); max_w + 1];
    for w in 1..=max_w {
        let mut here = Vec::new();
        for f in sig.symbols() {
            let wf = cfg.weight_of(f) as usize;
            if wf > w {
                continue;
            }
            let n = sig.arity(f);
            if n == 0 {
                if wf == w {
                    here.push(Term::constant(f));
                }
                continue;
            }
            let budget = w - wf;
            let mut args = Vec::with_capacity(n);
            fill_args(&by_weight, n, budget, &mut args, &mut |a| here.push(Term::app(f, a.to_vec())));
        }
        by_weight[w] = here;
    }
    let mut out: Vec<Term> = by_weight
        .into_iter()
        .flatten()
        .filter(|t| ground_cmp(t, beta, cfg) == Ordering::Less)
        .collect();
    out.sort_by(|a, b| ground_cmp(a, b, cfg));
    Ok(out)
}

fn fill_args(by_weight: &[Vec<Term>], n: usize, budget: usize, args: &mut Vec<Term>, emit: &mut dyn FnMut(&[Term])) {
    let left = n - args.len();
    if left == 0 {
        if budget == 0 {
            emit(args);
        }
        return;
    }
    // each remaining argument weighs at least 1
    if budget < left {
        return;
    }
    let max_here = budget - (left - 1);
    for w in 1..=max_here.min(by_weight.len() - 1) {
        for t in &by_weight[w] {
            args.push(t.clone());
            fill_args(by_weight, n, budget - w, args, emit);
            args.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn intro_sig() -> (Signature, KboConfig) {
        let mut s = Signature::new();
        for (n, a) in [("f", 1), ("h", 1), ("g", 1), ("a", 0), ("b", 0), ("c", 0), ("d", 0)] {
            s.add(n, a).unwrap();
        }
        let cfg = KboConfig::default_for(&s);
        (s, cfg)
    }

    #[test]
    fn default_precedence_is_reverse_declaration() {
        let (s, cfg) = intro_sig();
        let names: Vec<&str> = cfg.precedence().iter().map(|x| s.name(*x)).collect();
        assert_eq!(names, vec!["d", "c", "b", "a", "g", "h", "f"]);
    }

    #[test]
    fn kbo_examples() {
        let (s, cfg) = intro_sig();
        let a = s.t("a", vec![]);
        let b = s.t("b", vec![]);
        assert_eq!(kbo_compare(&s.t("f", vec![a.clone()]), &s.t("h", vec![a.clone()]), &cfg), OrderResult::Gt);
        assert_eq!(kbo_compare(&Term::var(0), &Term::var(0), &cfg), OrderResult::Eq);
        assert_eq!(
            kbo_compare(&s.t("f", vec![Term::var(0)]), &s.t("g", vec![Term::var(1)]), &cfg),
            OrderResult::Incomparable
        );
        assert_eq!(kbo_compare(&a, &b, &cfg), OrderResult::Gt);
        assert_eq!(kbo_compare(&s.t("f", vec![Term::var(0)]), &Term::var(0), &cfg), OrderResult::Gt);
    }

    #[test]
    fn literal_multisets() {
        let (s, cfg) = intro_sig();
        let a = s.t("a", vec![]);
        let b = s.t("b", vec![]);
        assert_eq!(literal_multiset(&Literal::eq(a.clone(), b.clone())), vec![a.clone(), b.clone()]);
        assert_eq!(
            literal_multiset(&Literal::neq(a.clone(), b.clone())),
            vec![a.clone(), a.clone(), b.clone(), b.clone()]
        );
        assert_eq!(
            compare_literals(&Literal::eq(a.clone(), b.clone()), &Literal::neq(a.clone(), b.clone()), &cfg),
            OrderResult::Lt
        );
        let c = Clause::new(vec![Literal::eq(a.clone(), b.clone())]);
        assert_eq!(compare_clauses(&c, &c, &cfg), OrderResult::Eq);
    }

    #[test]
    fn refutation_clause_below_conflict_literal() {
        // (g(a) != g(a) | f(a) != g(a) | f(a) != g(a) | h(a) != g(a)) vs (f(a) != h(a))
        let (s, cfg) = intro_sig();
        let a = s.t("a", vec![]);
        let fa = s.t("f", vec![a.clone()]);
        let ga = s.t("g", vec![a.clone()]);
        let ha = s.t("h", vec![a.clone()]);
        let c = Clause::new(vec![
            Literal::neq(ga.clone(), ga.clone()),
            Literal::neq(fa.clone(), ga.clone()),
            Literal::neq(fa.clone(), ga.clone()),
            Literal::neq(ha.clone(), ga.clone()),
        ]);
        let d = Clause::new(vec![Literal::neq(fa, ha)]);
        assert_eq!(compare_clauses(&c, &d, &cfg), OrderResult::Lt);
    }

    #[test]
    fn terms_below_ffa() {
        let mut s = Signature::new();
        let f = s.add("f", 1).unwrap();
        let a = s.add("a", 0).unwrap();
        let b = s.add("b", 0).unwrap();
        let mut cfg = KboConfig::default_for(&s);
        cfg.set_precedence(&[b, a, f]).unwrap();
        let beta = s.t("f", vec![s.t("f", vec![s.t("a", vec![])])]);
        let got = enumerate_ground_terms_below(&beta, &s, &cfg).unwrap();
        let shown: Vec<String> = got.iter().map(|t| s.show(t).to_string()).collect();
        assert_eq!(shown, vec!["b", "a", "f(b)", "f(a)", "f(f(b))"]);
        let a_min = s.t("b", vec![]);
        assert!(enumerate_ground_terms_below(&a_min, &s, &cfg).unwrap().is_empty());
    }

    #[test]
    fn no_constant_is_an_error() {
        let mut s = Signature::new();
        s.add("f", 1).unwrap();
        let cfg = KboConfig::default_for(&s);
        assert_eq!(enumerate_ground_terms_below(&Term::var(0), &s, &cfg), Err(OrderError::NoConstant));
    }
}
