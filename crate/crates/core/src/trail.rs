//! Annotated trails: truth values, defining literals, levels and the
//! trail-induced literal ordering.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::ordering::{ground_literal_cmp, literal_below, multiset_compare, KboConfig, OrderResult};
use crate::rewriting::{Provenance, Trs};
use crate::terms::{Clause, Closure, Literal, Pretty, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrailError {
    #[error("literal is already defined in the trail")]
    AlreadyDefined,
    #[error("literal is reducible by the trail's rewrite system")]
    Reducible,
    #[error("literal is not ground")]
    NotGround,
    #[error("level {got} breaks the level discipline (expected {expected})")]
    BadLevel { got: usize, expected: usize },
    #[error("justification does not carry the literal first")]
    BadJustification,
    #[error("literal is undefined in the trail")]
    Undefined,
    #[error("prefix length {0} exceeds the trail length")]
    BadPrefix(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruthValue {
    True,
    False,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Decision,
    Propagated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrailEntry {
    pub literal: Literal,
    pub level: usize,
    /// Justification closure; its first literal instantiates to `literal`.
    pub justification: Closure,
    pub kind: EntryKind,
}

impl TrailEntry {
    pub fn is_decision(&self) -> bool {
        self.kind == EntryKind::Decision
    }
}

impl Pretty for TrailEntry {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.literal.pretty(sig, f)?;
        let kind = match self.kind {
            EntryKind::Decision => "decision",
            EntryKind::Propagated => "propagated",
        };
        write!(f, " [lvl={}] [{}] [just=", self.level, kind)?;
        self.justification.clause.pretty(sig, f)?;
        write!(f, "·")?;
        self.justification.grounding.pretty(sig, f)?;
        write!(f, "]")
    }
}

/// Position of a literal in the trail-induced ordering, before the final
/// comparison by the term ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StarKey {
    /// 0: defined at level 0, 1: defined at a positive level, 2: undefined.
    pub class: u8,
    pub index: usize,
    /// 0: the trail literal itself, 1: its complement, 2: anything else.
    pub sub: u8,
}

#[derive(Debug, Clone, Copy)]
struct Info {
    value: TruthValue,
    /// Index of the defining entry, if any.
    defining: Option<usize>,
}

/// A sequence of annotated ground literals with the rewrite system of every prefix.
#[derive(Debug)]
pub struct Trail {
    cfg: KboConfig,
    entries: Vec<TrailEntry>,
    /// `convs[i]` is the rewrite system of the first `i` entries.
    convs: Vec<Trs<Provenance>>,
    cache: Mutex<HashMap<Literal, Info>>,
}

impl Clone for Trail {
    fn clone(&self) -> Self {
        Trail {
            cfg: self.cfg.clone(),
            entries: self.entries.clone(),
            convs: self.convs.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl PartialEq for Trail {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Trail {
    pub fn new(cfg: KboConfig) -> Trail {
        Trail { cfg, entries: Vec::new(), convs: vec![Trs::new()], cache: Mutex::new(HashMap::new()) }
    }

    pub fn cfg(&self) -> &KboConfig {
        &self.cfg
    }

    pub fn entries(&self) -> &[TrailEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&TrailEntry> {
        self.entries.last()
    }

    /// Level of the last entry, 0 for the empty trail.
    pub fn current_level(&self) -> usize {
        self.entries.last().map(|e| e.level).unwrap_or(0)
    }

    /// Rewrite system of the whole trail.
    pub fn conv(&self) -> &Trs<Provenance> {
        self.convs.last().unwrap()
    }

    /// Rewrite system of the first `n` entries.
    pub fn conv_at(&self, n: usize) -> &Trs<Provenance> {
        &self.convs[n]
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.entries.iter().map(|e| &e.literal)
    }

    /// Appends an entry after checking that its literal is ground, undefined,
    /// irreducible, and that the level follows the decision discipline.
    pub fn push(&mut self, entry: TrailEntry) -> Result<(), TrailError> {
        let l = &entry.literal;
        if !l.is_ground() {
            return Err(TrailError::NotGround);
        }
        let first = entry.justification.clause.lits.first().map(|k| k.apply(&entry.justification.grounding));
        if first.as_ref() != Some(l) {
            return Err(TrailError::BadJustification);
        }
        let expected = match entry.kind {
            EntryKind::Decision => self.current_level() + 1,
            EntryKind::Propagated => self.current_level(),
        };
        if entry.level != expected {
            return Err(TrailError::BadLevel { got: entry.level, expected });
        }
        let conv = self.conv();
        if !conv.is_irreducible(&l.lhs) || !conv.is_irreducible(&l.rhs) {
            return Err(TrailError::Reducible);
        }
        if self.value_of(l) != TruthValue::Undefined {
            return Err(TrailError::AlreadyDefined);
        }
        self.push_unchecked(entry);
        Ok(())
    }

    /// Appends without checks; used to build deliberately broken trails in tests.
    pub fn push_unchecked(&mut self, entry: TrailEntry) {
        let mut conv = self.conv().clone();
        if entry.literal.positive {
            let i = self.entries.len();
            conv.add_equation(entry.literal.lhs.clone(), entry.literal.rhs.clone(), Provenance::single(i), &self.cfg)
                .expect("provenance payloads cannot fail");
        }
        self.entries.push(entry);
        self.convs.push(conv);
        self.cache.lock().unwrap().clear();
    }

    /// Truncates to the first `n` entries.
    pub fn pop_to(&mut self, n: usize) -> Result<(), TrailError> {
        if n > self.entries.len() {
            return Err(TrailError::BadPrefix(n));
        }
        self.entries.truncate(n);
        self.convs.truncate(n + 1);
        self.cache.lock().unwrap().clear();
        Ok(())
    }

    pub fn clear(&mut self) {
        self.pop_to(0).unwrap();
    }

    /// Whether the first `n` entries entail `s != t`, for normal forms `s != t`.
    fn entails_neq_at(&self, n: usize, s: &Term, t: &Term) -> bool {
        let conv = &self.convs[n];
        let ineqs: Vec<(Term, Term)> = self.entries[..n]
            .iter()
            .filter(|e| !e.literal.positive)
            .map(|e| (conv.normal_form(&e.literal.lhs), conv.normal_form(&e.literal.rhs)))
            .collect();
        if ineqs.is_empty() {
            return false;
        }
        if ineqs.iter().any(|(u, v)| (u == s && v == t) || (u == t && v == s)) {
            return true;
        }
        let mut ext = conv.clone();
        ext.add_equation(s.clone(), t.clone(), Provenance::default(), &self.cfg).expect("provenance payloads cannot fail");
        ineqs.iter().any(|(u, v)| ext.normal_form(u) == ext.normal_form(v))
    }

    /// Truth value of a ground literal in the first `n` entries.
    pub fn value_at(&self, n: usize, l: &Literal) -> TruthValue {
        let conv = &self.convs[n];
        let s = conv.normal_form(&l.lhs);
        let t = conv.normal_form(&l.rhs);
        let joined = s == t;
        let neq = !joined && self.entails_neq_at(n, &s, &t);
        match (l.positive, joined, neq) {
            (true, true, _) | (false, false, true) => TruthValue::True,
            (false, true, _) | (true, false, true) => TruthValue::False,
            _ => TruthValue::Undefined,
        }
    }

    fn info(&self, l: &Literal) -> Info {
        if let Some(i) = self.cache.lock().unwrap().get(l) {
            return *i;
        }
        let n = self.entries.len();
        let value = self.value_at(n, l);
        let defining = if value == TruthValue::Undefined || self.value_at(0, l) != TruthValue::Undefined {
            None
        } else {
            // definedness is monotone in the prefix length
            let (mut lo, mut hi) = (0usize, n);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.value_at(mid, l) == TruthValue::Undefined {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(hi - 1)
        };
        let info = Info { value, defining };
        self.cache.lock().unwrap().insert(l.clone(), info);
        info
    }

    /// True iff the trail entails `l`, False iff it entails its complement.
    pub fn value_of(&self, l: &Literal) -> TruthValue {
        self.info(l).value
    }

    /// Like [`Trail::value_of`], but literals not below `beta` are undefined.
    pub fn beta_value_of(&self, l: &Literal, beta: &Term) -> TruthValue {
        if !literal_below(l, beta, &self.cfg) {
            return TruthValue::Undefined;
        }
        self.value_of(l)
    }

    /// Truth value of a ground clause: true if some literal is true, false if all are false.
    pub fn beta_clause_value(&self, c: &Clause, beta: &Term) -> TruthValue {
        let mut all_false = true;
        for l in &c.lits {
            match self.beta_value_of(l, beta) {
                TruthValue::True => return TruthValue::True,
                TruthValue::Undefined => all_false = false,
                TruthValue::False => {}
            }
        }
        if all_false {
            TruthValue::False
        } else {
            TruthValue::Undefined
        }
    }

    pub fn is_beta_false(&self, c: &Clause, beta: &Term) -> bool {
        c.lits.iter().all(|l| self.beta_value_of(l, beta) == TruthValue::False)
    }

    /// Index of the defining entry of a defined literal, `None` if it is
    /// trivially defined.
    pub fn defining_index(&self, l: &Literal) -> Result<Option<usize>, TrailError> {
        let info = self.info(l);
        if info.value == TruthValue::Undefined {
            return Err(TrailError::Undefined);
        }
        Ok(info.defining)
    }

    /// Defining entry and one defining core (entry indices, ascending).
    pub fn defining_literal(&self, l: &Literal) -> Result<Option<(usize, Vec<usize>)>, TrailError> {
        let Some(d) = self.defining_index(l)? else { return Ok(None) };
        let mut core: Vec<usize> = (0..=d).collect();
        let mut i = 0;
        while i + 1 < core.len() {
            let mut cand = core.clone();
            cand.remove(i);
            if self.value_in_subsequence(&cand, l) != TruthValue::Undefined {
                core = cand;
            } else {
                i += 1;
            }
        }
        Ok(Some((d, core)))
    }

    /// Truth value of `l` in the subsequence of entries at `idx`.
    pub fn value_in_subsequence(&self, idx: &[usize], l: &Literal) -> TruthValue {
        let mut sub = Trail::new(self.cfg.clone());
        for &i in idx {
            sub.push_unchecked(self.entries[i].clone());
        }
        sub.value_at(sub.len(), l)
    }

    /// Level of a defined literal: the level of its defining entry, 0 without one.
    pub fn level_of(&self, l: &Literal) -> Result<usize, TrailError> {
        Ok(self.defining_index(l)?.map(|i| self.entries[i].level).unwrap_or(0))
    }

    /// Maximum literal level of a defined clause, 0 for the empty clause.
    pub fn clause_level(&self, c: &Clause) -> Result<usize, TrailError> {
        let mut m = 0;
        for l in &c.lits {
            m = m.max(self.level_of(l)?);
        }
        Ok(m)
    }

    pub fn star_key(&self, l: &Literal, beta: &Term) -> StarKey {
        if self.beta_value_of(l, beta) == TruthValue::Undefined {
            return StarKey { class: 2, index: 0, sub: 0 };
        }
        match self.info(l).defining {
            Some(i) if self.entries[i].level > 0 => {
                let e = &self.entries[i].literal;
                let sub = if l.same_modulo_symmetry(e) {
                    0
                } else if l.same_modulo_symmetry(&e.complement()) {
                    1
                } else {
                    2
                };
                StarKey { class: 1, index: i, sub }
            }
            _ => StarKey { class: 0, index: 0, sub: 0 },
        }
    }

    /// Trail-induced comparison of two ground literals.
    pub fn gamma_star_cmp(&self, k: &Literal, h: &Literal, beta: &Term) -> Ordering {
        if k == h {
            return Ordering::Equal;
        }
        self.star_key(k, beta)
            .cmp(&self.star_key(h, beta))
            .then_with(|| ground_literal_cmp(k, h, &self.cfg))
    }

    pub fn gamma_star_compare(&self, k: &Literal, h: &Literal, beta: &Term) -> OrderResult {
        OrderResult::from_ordering(self.gamma_star_cmp(k, h, beta))
    }

    /// Multiset extension of [`Trail::gamma_star_compare`] to ground clauses.
    pub fn gamma_star_compare_clauses(&self, c: &Clause, d: &Clause, beta: &Term) -> OrderResult {
        let mut a = c.lits.clone();
        let mut b = d.lits.clone();
        let cmp = |x: &Literal, y: &Literal| self.gamma_star_cmp(x, y, beta);
        a.sort_by(|x, y| cmp(y, x));
        b.sort_by(|x, y| cmp(y, x));
        // sorted descending: the multiset extension of a total order is lexicographic
        for (x, y) in a.iter().zip(b.iter()) {
            match cmp(x, y) {
                Ordering::Equal => continue,
                o => return OrderResult::from_ordering(o),
            }
        }
        OrderResult::from_ordering(a.len().cmp(&b.len()))
    }

    /// Multiset extension computed by the generic remove-and-dominate definition.
    pub fn gamma_star_compare_clauses_generic(&self, c: &Clause, d: &Clause, beta: &Term) -> OrderResult {
        multiset_compare(&c.lits, &d.lits, |x, y| self.gamma_star_compare(x, y, beta))
    }

    /// The ≺Γ*-maximal literal index of a ground clause (first one on ties).
    pub fn max_literal(&self, c: &Clause, beta: &Term) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, l) in c.lits.iter().enumerate() {
            best = match best {
                Some(b) if self.gamma_star_cmp(l, &c.lits[b], beta) != Ordering::Greater => Some(b),
                _ => Some(i),
            };
        }
        best
    }

    /// One line per entry.
    pub fn dump(&self, sig: &Signature) -> String {
        let mut s = String::new();
        for e in &self.entries {
            s.push_str(&sig.show(e).to_string());
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{Subst, Term};

    fn entry(l: Literal, level: usize, kind: EntryKind) -> TrailEntry {
        let just = match kind {
            EntryKind::Decision => Clause::new(vec![l.clone(), l.complement()]),
            EntryKind::Propagated => Clause::new(vec![l.clone()]),
        };
        TrailEntry { literal: l, level, justification: Closure::new(just, Subst::new()), kind }
    }

    /// Signature where terms are ordered left to right in the level example.
    fn level_example() -> (Signature, Trail) {
        let mut s = Signature::new();
        for (n, a) in [("g", 1), ("f", 1), ("a", 0), ("b", 0), ("c", 0)] {
            s.add(n, a).unwrap();
        }
        let cfg = KboConfig::default_for(&s);
        let mut tr = Trail::new(cfg);
        let t = |n: &str| s.t(n, vec![]);
        let f = |x: Term| s.t("f", vec![x]);
        tr.push(entry(Literal::eq(f(t("a")), f(t("b"))), 1, EntryKind::Decision)).unwrap();
        tr.push(entry(Literal::eq(t("a"), t("b")), 2, EntryKind::Decision)).unwrap();
        tr.push(entry(Literal::eq(t("b"), t("c")), 3, EntryKind::Decision)).unwrap();
        (s, tr)
    }

    #[test]
    fn defining_literal_and_levels() {
        let (s, tr) = level_example();
        let t = |n: &str| s.t(n, vec![]);
        let gf = |x: Term| s.t("g", vec![s.t("f", vec![x])]);
        let l = Literal::eq(gf(t("a")), gf(t("c")));
        let (d, core) = tr.defining_literal(&l).unwrap().unwrap();
        assert_eq!(d, 2);
        assert!(core == vec![1, 2] || core == vec![0, 2]);
        assert_eq!(tr.level_of(&l).unwrap(), 3);
        assert_eq!(tr.level_of(&Literal::neq(t("a"), t("b"))).unwrap(), 2);
        let triv = Literal::eq(gf(t("a")), gf(t("a")));
        assert_eq!(tr.defining_literal(&triv).unwrap(), None);
        assert_eq!(tr.level_of(&triv).unwrap(), 0);
    }

    #[test]
    fn push_rejects_defined_and_reducible() {
        let mut s = Signature::new();
        for (n, a) in [("f", 1), ("a", 0), ("b", 0), ("c", 0)] {
            s.add(n, a).unwrap();
        }
        let cfg = KboConfig::default_for(&s);
        let t = |n: &str| s.t(n, vec![]);
        let f = |x: Term| s.t("f", vec![x]);
        let mut tr = Trail::new(cfg);
        tr.push(entry(Literal::eq(t("a"), t("b")), 1, EntryKind::Decision)).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(
            tr.push(entry(Literal::eq(f(t("a")), f(t("b"))), 1, EntryKind::Propagated)),
            Err(TrailError::Reducible)
        );
        assert_eq!(tr.push(entry(Literal::eq(f(t("a")), t("c")), 1, EntryKind::Propagated)), Err(TrailError::Reducible));
        assert_eq!(tr.push(entry(Literal::eq(t("b"), t("b")), 1, EntryKind::Propagated)), Err(TrailError::AlreadyDefined));
        assert!(matches!(
            tr.push(entry(Literal::eq(f(t("b")), t("c")), 3, EntryKind::Propagated)),
            Err(TrailError::BadLevel { .. })
        ));
    }
}
