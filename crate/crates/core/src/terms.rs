//! Terms, literals, clauses, substitutions and positions.
//!
//! Variables are plain `u32` indices. Renaming apart is done by shifting all
//! indices of one side past the largest index of the other.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ordering::{self, KboConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {0} is not a position of the term")]
    InvalidPosition(Position),
    #[error("symbol `{0}` already declared")]
    DuplicateSymbol(String),
}

/// Index of a function symbol in its [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, Sym>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, arity: usize) -> Result<Sym, TermError> {
        if self.by_name.contains_key(name) {
            return Err(TermError::DuplicateSymbol(name.to_string()));
        }
        let s = Sym(self.symbols.len() as u32);
        self.symbols.push(Symbol { name: name.to_string(), arity });
        self.by_name.insert(name.to_string(), s);
        Ok(s)
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.by_name.get(name).copied()
    }

    pub fn symbol(&self, s: Sym) -> &Symbol {
        &self.symbols[s.0 as usize]
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.symbols[s.0 as usize].name
    }

    pub fn arity(&self, s: Sym) -> usize {
        self.symbols[s.0 as usize].arity
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbols in declaration order.
    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.symbols.len() as u32).map(Sym)
    }

    pub fn constants(&self) -> impl Iterator<Item = Sym> + '_ {
        self.symbols().filter(|&s| self.arity(s) == 0)
    }

    pub fn functions(&self) -> impl Iterator<Item = Sym> + '_ {
        self.symbols().filter(|&s| self.arity(s) > 0)
    }

    /// Wraps any printable object for display with this signature.
    pub fn show<'a, T: Pretty + ?Sized>(&'a self, x: &'a T) -> Shown<'a, T> {
        Shown { sig: self, x }
    }

    /// Builds a term from a symbol name; panics on unknown names or wrong arity.
    /// Meant for tests and examples.
    pub fn t(&self, name: &str, args: Vec<Term>) -> Term {
        let s = self.lookup(name).unwrap_or_else(|| panic!("unknown symbol {name}"));
        assert_eq!(self.arity(s), args.len(), "arity of {name}");
        Term::app(s, args)
    }
}

/// Positions are sequences of 1-based argument indices; the empty one is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn prefixed(i: usize, rest: &Position) -> Position {
        let mut v = Vec::with_capacity(rest.0.len() + 1);
        v.push(i);
        v.extend_from_slice(&rest.0);
        Position(v)
    }

    pub fn parse(s: &str) -> Option<Position> {
        if s == "ε" || s == "e" || s.is_empty() {
            return Some(Position::root());
        }
        let mut v = Vec::new();
        for part in s.split('.') {
            let i: usize = part.parse().ok()?;
            if i == 0 {
                return None;
            }
            v.push(i);
        }
        Some(Position(v))
    }
}

impl From<&[usize]> for Position {
    fn from(v: &[usize]) -> Self {
        Position(v.to_vec())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    App(Sym, Arc<[Term]>),
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "X{v}"),
            Term::App(s, args) if args.is_empty() => write!(f, "#{}", s.0),
            Term::App(s, args) => {
                write!(f, "#{}(", s.0)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a:?}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Term {
    pub fn var(v: u32) -> Term {
        Term::Var(v)
    }

    pub fn app(s: Sym, args: Vec<Term>) -> Term {
        Term::App(s, args.into())
    }

    pub fn constant(s: Sym) -> Term {
        Term::App(s, Arc::from(Vec::new()))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, a) => a,
        }
    }

    pub fn head(&self) -> Option<Sym> {
        match self {
            Term::Var(_) => None,
            Term::App(s, _) => Some(*s),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, a) => a.iter().all(Term::is_ground),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, a) => a.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }

    /// Variables in order of first occurrence (left to right, depth first).
    pub fn vars_in_order(&self, out: &mut Vec<u32>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Term::App(_, a) => a.iter().for_each(|t| t.vars_in_order(out)),
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App(_, a) => a.iter().filter_map(Term::max_var).max(),
        }
    }

    pub fn occurs(&self, v: u32) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::App(_, a) => a.iter().any(|t| t.occurs(v)),
        }
    }

    pub fn contains(&self, sub: &Term) -> bool {
        self == sub || self.args().iter().any(|t| t.contains(sub))
    }

    pub fn subterm_at(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &p.0 {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// All positions in pre-order, root first.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go(t: &Term, cur: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(Position(cur.clone()));
            for (i, a) in t.args().iter().enumerate() {
                cur.push(i + 1);
                go(a, cur, out);
                cur.pop();
            }
        }
        go(self, &mut cur, &mut out);
        out
    }

    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, TermError> {
        fn go(t: &Term, p: &[usize], s: Term) -> Option<Term> {
            match p.split_first() {
                None => Some(s),
                Some((&i, rest)) => match t {
                    Term::Var(_) => None,
                    Term::App(f, args) => {
                        if i == 0 || i > args.len() {
                            return None;
                        }
                        let mut v = args.to_vec();
                        v[i - 1] = go(&args[i - 1], rest, s)?;
                        Some(Term::app(*f, v))
                    }
                },
            }
        }
        go(self, &p.0, s).ok_or_else(|| TermError::InvalidPosition(p.clone()))
    }

    pub fn apply(&self, s: &Subst) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => s.get(*v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, a) => {
                if a.is_empty() {
                    return self.clone();
                }
                Term::App(*f, a.iter().map(|t| t.apply(s)).collect())
            }
        }
    }

    pub fn shift_vars(&self, offset: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(v + offset),
            Term::App(f, a) => {
                if a.is_empty() {
                    return self.clone();
                }
                Term::App(*f, a.iter().map(|t| t.shift_vars(offset)).collect())
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.positive { "=" } else { "!=" };
        write!(f, "{:?} {op} {:?}", self.lhs, self.rhs)
    }
}

impl Literal {
    pub fn eq(lhs: Term, rhs: Term) -> Literal {
        Literal { positive: true, lhs, rhs }
    }

    pub fn neq(lhs: Term, rhs: Term) -> Literal {
        Literal { positive: false, lhs, rhs }
    }

    pub fn complement(&self) -> Literal {
        Literal { positive: !self.positive, lhs: self.lhs.clone(), rhs: self.rhs.clone() }
    }

    /// Same polarity, sides swapped.
    pub fn flipped(&self) -> Literal {
        Literal { positive: self.positive, lhs: self.rhs.clone(), rhs: self.lhs.clone() }
    }

    pub fn same_modulo_symmetry(&self, other: &Literal) -> bool {
        self.positive == other.positive
            && ((self.lhs == other.lhs && self.rhs == other.rhs)
                || (self.lhs == other.rhs && self.rhs == other.lhs))
    }

    /// `s != s`.
    pub fn is_trivially_false(&self) -> bool {
        !self.positive && self.lhs == self.rhs
    }

    /// `s = s`.
    pub fn is_trivially_true(&self) -> bool {
        self.positive && self.lhs == self.rhs
    }

    pub fn is_ground(&self) -> bool {
        self.lhs.is_ground() && self.rhs.is_ground()
    }

    pub fn side(&self, i: usize) -> Option<&Term> {
        match i {
            1 => Some(&self.lhs),
            2 => Some(&self.rhs),
            _ => None,
        }
    }

    pub fn apply(&self, s: &Subst) -> Literal {
        Literal { positive: self.positive, lhs: self.lhs.apply(s), rhs: self.rhs.apply(s) }
    }

    pub fn shift_vars(&self, offset: u32) -> Literal {
        Literal {
            positive: self.positive,
            lhs: self.lhs.shift_vars(offset),
            rhs: self.rhs.shift_vars(offset),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        self.lhs.collect_vars(out);
        self.rhs.collect_vars(out);
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }

    pub fn max_var(&self) -> Option<u32> {
        self.lhs.max_var().max(self.rhs.max_var())
    }

    /// Literal positions start with the side index: 1 for lhs, 2 for rhs.
    pub fn subterm_at(&self, p: &Position) -> Option<&Term> {
        let (&i, rest) = p.0.split_first()?;
        self.side(i)?.subterm_at(&Position(rest.to_vec()))
    }

    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        for (i, side) in [(1, &self.lhs), (2, &self.rhs)] {
            out.extend(side.positions().iter().map(|q| Position::prefixed(i, q)));
        }
        out
    }

    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Literal, TermError> {
        let bad = || TermError::InvalidPosition(p.clone());
        let (&i, rest) = p.0.split_first().ok_or_else(bad)?;
        let rest = Position(rest.to_vec());
        let mut out = self.clone();
        match i {
            1 => out.lhs = self.lhs.replace_at(&rest, s).map_err(|_| bad())?,
            2 => out.rhs = self.rhs.replace_at(&rest, s).map_err(|_| bad())?,
            _ => return Err(bad()),
        }
        Ok(out)
    }
}

/// A clause is a multiset of literals kept as a vector; the empty clause is ⊥.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub lits: Vec<Literal>,
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "⊥");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

impl Clause {
    pub fn new(lits: Vec<Literal>) -> Clause {
        Clause { lits }
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_ground(&self) -> bool {
        self.lits.iter().all(Literal::is_ground)
    }

    pub fn apply(&self, s: &Subst) -> Clause {
        Clause { lits: self.lits.iter().map(|l| l.apply(s)).collect() }
    }

    pub fn shift_vars(&self, offset: u32) -> Clause {
        Clause { lits: self.lits.iter().map(|l| l.shift_vars(offset)).collect() }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut s = BTreeSet::new();
        for l in &self.lits {
            l.collect_vars(&mut s);
        }
        s
    }

    pub fn vars_in_order(&self) -> Vec<u32> {
        let mut v = Vec::new();
        for l in &self.lits {
            l.lhs.vars_in_order(&mut v);
            l.rhs.vars_in_order(&mut v);
        }
        v
    }

    pub fn max_var(&self) -> Option<u32> {
        self.lits.iter().filter_map(Literal::max_var).max()
    }

    pub fn without(&self, i: usize) -> Clause {
        let mut lits = self.lits.clone();
        lits.remove(i);
        Clause { lits }
    }

    pub fn with_first(lit: Literal, rest: &Clause) -> Clause {
        let mut lits = Vec::with_capacity(rest.len() + 1);
        lits.push(lit);
        lits.extend(rest.lits.iter().cloned());
        Clause { lits }
    }

    pub fn concat(&self, other: &Clause) -> Clause {
        let mut lits = self.lits.clone();
        lits.extend(other.lits.iter().cloned());
        Clause { lits }
    }

    /// Multiset equality, literal orientation respected.
    pub fn same_multiset(&self, other: &Clause) -> bool {
        let mut a = self.lits.clone();
        let mut b = other.lits.clone();
        a.sort();
        b.sort();
        a == b
    }

    /// Multiset equality where `s = t` and `t = s` count as the same literal.
    pub fn same_multiset_modulo_symmetry(&self, other: &Clause) -> bool {
        let norm = |c: &Clause| {
            let mut v: Vec<Literal> = c.lits.iter().map(symmetric_normal).collect();
            v.sort();
            v
        };
        norm(self) == norm(other)
    }

    /// Renames variables to 0, 1, ... in order of first occurrence.
    pub fn normalize_vars(&self) -> Clause {
        let order = self.vars_in_order();
        if order.iter().enumerate().all(|(i, &v)| i as u32 == v) {
            return self.clone();
        }
        let mut s = Subst::new();
        for (i, v) in order.into_iter().enumerate() {
            s.bind(v, Term::Var(i as u32));
        }
        self.apply(&s)
    }
}

fn symmetric_normal(l: &Literal) -> Literal {
    if l.lhs <= l.rhs {
        l.clone()
    } else {
        l.flipped()
    }
}

/// Finite map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subst {
    map: BTreeMap<u32, Term>,
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "X{v}->{t:?}")?;
        }
        write!(f, "}}")
    }
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, Term)>) -> Subst {
        let mut s = Subst::new();
        for (v, t) in pairs {
            s.bind(v, t);
        }
        s
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, v: u32) -> Option<&Term> {
        self.map.get(&v)
    }

    /// Inserts a binding; identity bindings are dropped.
    pub fn bind(&mut self, v: u32, t: Term) {
        if t == Term::Var(v) {
            self.map.remove(&v);
        } else {
            self.map.insert(v, t);
        }
    }

    pub fn remove(&mut self, v: u32) {
        self.map.remove(&v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Term)> {
        self.map.iter().map(|(v, t)| (*v, t))
    }

    pub fn domain(&self) -> impl Iterator<Item = u32> + '_ {
        self.map.keys().copied()
    }

    /// `self` then `other`: x(σθ) = (xσ)θ.
    pub fn compose(&self, other: &Subst) -> Subst {
        let mut out = Subst::new();
        for (v, t) in &self.map {
            out.bind(*v, t.apply(other));
        }
        for (v, t) in &other.map {
            if !self.map.contains_key(v) {
                out.bind(*v, t.clone());
            }
        }
        out
    }

    /// Union of two substitutions with disjoint domains (later wins on overlap).
    pub fn union(&self, other: &Subst) -> Subst {
        let mut out = self.clone();
        for (v, t) in &other.map {
            out.bind(*v, t.clone());
        }
        out
    }

    pub fn restrict(&self, vars: &BTreeSet<u32>) -> Subst {
        Subst { map: self.map.iter().filter(|(v, _)| vars.contains(v)).map(|(v, t)| (*v, t.clone())).collect() }
    }

    pub fn shift_vars(&self, offset: u32) -> Subst {
        Subst { map: self.map.iter().map(|(v, t)| (v + offset, t.shift_vars(offset))).collect() }
    }

    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| self.map.keys().all(|v| !t.occurs(*v)))
    }

    pub fn is_ground(&self) -> bool {
        self.map.values().all(Term::is_ground)
    }
}

/// A clause together with a grounding substitution.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Closure {
    pub clause: Clause,
    pub grounding: Subst,
}

impl fmt::Debug for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})·{:?}", self.clause, self.grounding)
    }
}

impl Closure {
    pub fn new(clause: Clause, grounding: Subst) -> Closure {
        Closure { clause, grounding }
    }

    pub fn ground(&self) -> Clause {
        self.clause.apply(&self.grounding)
    }

    pub fn is_grounding(&self) -> bool {
        self.clause.vars().iter().all(|v| self.grounding.get(*v).is_some_and(Term::is_ground))
    }
}

// ---------------------------------------------------------------------------
// unification and matching

fn deref<'a>(t: &'a Term, s: &'a Subst) -> &'a Term {
    let mut t = t;
    while let Term::Var(v) = t {
        match s.get(*v) {
            Some(u) => t = u,
            None => break,
        }
    }
    t
}

fn occurs_deep(v: u32, t: &Term, s: &Subst) -> bool {
    match deref(t, s) {
        Term::Var(w) => *w == v,
        Term::App(_, a) => a.iter().any(|u| occurs_deep(v, u, s)),
    }
}

fn unify_into(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let x = deref(&x, s).clone();
        let y = deref(&y, s).clone();
        match (&x, &y) {
            (Term::Var(u), Term::Var(w)) if u == w => {}
            (Term::Var(u), Term::Var(w)) => {
                let (hi, lo) = if u > w { (*u, *w) } else { (*w, *u) };
                s.map.insert(hi, Term::Var(lo));
            }
            (Term::Var(u), t) | (t, Term::Var(u)) => {
                if occurs_deep(*u, t, s) {
                    return false;
                }
                s.map.insert(*u, t.clone());
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return false;
                }
                for (p, q) in fa.iter().zip(ga.iter()) {
                    stack.push((p.clone(), q.clone()));
                }
            }
        }
    }
    true
}

/// Turns a triangular substitution into an idempotent one.
fn solve(s: Subst) -> Subst {
    fn full(t: &Term, s: &Subst) -> Term {
        match deref(t, s) {
            Term::Var(v) => Term::Var(*v),
            Term::App(f, a) => Term::app(*f, a.iter().map(|u| full(u, s)).collect()),
        }
    }
    let mut out = Subst::new();
    for (v, t) in s.map.iter() {
        out.bind(*v, full(t, &s));
    }
    out
}

/// Most general unifier of a non-empty sequence of terms.
///
/// Two variables are unified by binding the higher index to the lower one.
pub fn mgu(items: &[Term]) -> Option<Subst> {
    let (first, rest) = items.split_first()?;
    let mut s = Subst::new();
    for t in rest {
        if !unify_into(first, t, &mut s) {
            return None;
        }
    }
    Some(solve(s))
}

pub fn mgu_pair(a: &Term, b: &Term) -> Option<Subst> {
    mgu(&[a.clone(), b.clone()])
}

/// Most general unifier of literals; all polarities must agree. Orientation
/// is respected: `s = t` and `t = s` unify only through their sides.
pub fn mgu_literals(items: &[Literal]) -> Option<Subst> {
    let (first, rest) = items.split_first()?;
    let mut s = Subst::new();
    for l in rest {
        if l.positive != first.positive {
            return None;
        }
        if !unify_into(&first.lhs, &l.lhs, &mut s) || !unify_into(&first.rhs, &l.rhs, &mut s) {
            return None;
        }
    }
    Some(solve(s))
}

/// One-way matching: returns σ with `pattern σ = target`.
pub fn match_term(pattern: &Term, target: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    if match_into(pattern, target, &mut s) {
        Some(s)
    } else {
        None
    }
}

/// Extends `s` so that `pattern s = target`; `s` may be partially updated on failure.
pub fn match_into(pattern: &Term, target: &Term, s: &mut Subst) -> bool {
    match pattern {
        Term::Var(v) => match s.get(*v) {
            Some(t) => t == target,
            None => {
                s.map.insert(*v, target.clone());
                true
            }
        },
        Term::App(f, fa) => match target {
            Term::App(g, ga) if f == g && fa.len() == ga.len() => {
                fa.iter().zip(ga.iter()).all(|(p, t)| match_into(p, t, s))
            }
            _ => false,
        },
    }
}

pub fn match_literal_into(pattern: &Literal, target: &Literal, s: &mut Subst) -> bool {
    pattern.positive == target.positive
        && match_into(&pattern.lhs, &target.lhs, s)
        && match_into(&pattern.rhs, &target.rhs, s)
}

pub fn complement(l: &Literal) -> Literal {
    l.complement()
}

/// All groundings of `c` over ground terms below `beta` whose instance has every
/// literal below `beta`, in lexicographic order of the enumerated term list.
pub fn ground_instances_below(
    c: &Clause,
    beta: &Term,
    sig: &Signature,
    cfg: &KboConfig,
) -> Result<Vec<Closure>, ordering::OrderError> {
    let universe = ordering::enumerate_ground_terms_below(beta, sig, cfg)?;
    Ok(ground_instances_over(c, beta, &universe, cfg))
}

/// Same as [`ground_instances_below`] with a precomputed term universe.
pub fn ground_instances_over(c: &Clause, beta: &Term, universe: &[Term], cfg: &KboConfig) -> Vec<Closure> {
    let vars: Vec<u32> = c.vars().into_iter().collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    if !vars.is_empty() && universe.is_empty() {
        return out;
    }
    loop {
        let s = Subst::from_pairs(vars.iter().zip(idx.iter()).map(|(v, i)| (*v, universe[*i].clone())));
        let g = c.apply(&s);
        if g.lits.iter().all(|l| ordering::literal_below(l, beta, cfg)) {
            out.push(Closure::new(c.clone(), s));
        }
        // odometer
        let mut k = vars.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < universe.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// printing

/// Objects that print relative to a signature.
pub trait Pretty {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

pub struct Shown<'a, T: ?Sized> {
    sig: &'a Signature,
    x: &'a T,
}

impl<T: Pretty + ?Sized> fmt::Display for Shown<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.x.pretty(self.sig, f)
    }
}

impl Pretty for Term {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "X{v}"),
            Term::App(s, a) => {
                write!(f, "{}", sig.name(*s))?;
                if !a.is_empty() {
                    write!(f, "(")?;
                    for (i, t) in a.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        t.pretty(sig, f)?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl Pretty for Literal {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.lhs.pretty(sig, f)?;
        write!(f, "{}", if self.positive { " = " } else { " != " })?;
        self.rhs.pretty(sig, f)
    }
}

impl Pretty for Clause {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "⊥");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            l.pretty(sig, f)?;
        }
        Ok(())
    }
}

impl Pretty for Subst {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "X{v}->")?;
            t.pretty(sig, f)?;
        }
        write!(f, "}}")
    }
}

impl Pretty for Closure {
    fn pretty(&self, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        self.clause.pretty(sig, f)?;
        write!(f, ")·")?;
        self.grounding.pretty(sig, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::new();
        for (n, a) in [("f", 2), ("g", 1), ("h", 1), ("a", 0), ("b", 0)] {
            s.add(n, a).unwrap();
        }
        s
    }

    fn x(i: u32) -> Term {
        Term::var(i)
    }

    #[test]
    fn positions_of_f_a_gx() {
        let s = sig();
        let a = s.t("a", vec![]);
        let t = s.t("f", vec![a, s.t("g", vec![x(0)])]);
        let ps: Vec<String> = t.positions().iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, vec!["ε", "1", "2", "2.1"]);
        assert_eq!(x(3).positions(), vec![Position::root()]);
        assert_eq!(s.t("a", vec![]).positions(), vec![Position::root()]);
    }

    #[test]
    fn replace_examples() {
        let s = sig();
        let a = s.t("a", vec![]);
        let b = s.t("b", vec![]);
        let t = s.t("f", vec![a.clone(), s.t("g", vec![x(0)])]);
        let r = t.replace_at(&Position(vec![2]), b.clone()).unwrap();
        assert_eq!(r, s.t("f", vec![a.clone(), b.clone()]));
        let r = t.replace_at(&Position(vec![2, 1]), b.clone()).unwrap();
        assert_eq!(r, s.t("f", vec![a.clone(), s.t("g", vec![b.clone()])]));
        assert_eq!(t.replace_at(&Position::root(), b.clone()).unwrap(), b);
        assert!(matches!(t.replace_at(&Position(vec![3]), a.clone()), Err(TermError::InvalidPosition(_))));
        assert!(t.replace_at(&Position(vec![1, 1]), a).is_err());
    }

    #[test]
    fn subst_application() {
        let s = sig();
        let a = s.t("a", vec![]);
        let gx = s.t("g", vec![x(0)]);
        let sigma = Subst::from_pairs([(0, a.clone())]);
        assert_eq!(gx.apply(&sigma), s.t("g", vec![a.clone()]));
        assert_eq!(gx.apply(&Subst::new()), gx);
    }

    #[test]
    fn mgu_examples() {
        let s = sig();
        let a = s.t("a", vec![]);
        let b = s.t("b", vec![]);
        assert_eq!(mgu(&[x(0), a.clone()]), Some(Subst::from_pairs([(0, a.clone())])));
        assert_eq!(mgu(&[s.t("g", vec![x(0)]), s.t("h", vec![x(1)])]), None);
        assert_eq!(mgu(&[x(0), s.t("g", vec![x(0)])]), None);
        let l = s.t("f", vec![x(0), b.clone()]);
        let r = s.t("f", vec![a.clone(), x(1)]);
        let u = mgu(&[l.clone(), r.clone()]).unwrap();
        assert_eq!(u, Subst::from_pairs([(0, a), (1, b)]));
        assert_eq!(l.apply(&u), r.apply(&u));
    }

    #[test]
    fn mgu_binds_higher_variable() {
        assert_eq!(mgu(&[x(3), x(1)]), Some(Subst::from_pairs([(3, x(1))])));
        assert_eq!(mgu(&[x(1), x(3)]), Some(Subst::from_pairs([(3, x(1))])));
    }

    #[test]
    fn matching() {
        let s = sig();
        let a = s.t("a", vec![]);
        let b = s.t("b", vec![]);
        let ga = s.t("g", vec![a.clone()]);
        assert_eq!(match_term(&x(0), &ga), Some(Subst::from_pairs([(0, ga.clone())])));
        assert_eq!(match_term(&s.t("h", vec![x(0)]), &ga), None);
        assert_eq!(match_term(&s.t("f", vec![x(0), x(0)]), &s.t("f", vec![a, b])), None);
    }

    #[test]
    fn complement_is_involution() {
        let s = sig();
        let l = Literal::eq(s.t("a", vec![]), s.t("b", vec![]));
        assert!(!complement(&l).positive);
        assert_eq!(complement(&complement(&l)), l);
    }

    #[test]
    fn literal_positions_carry_side() {
        let s = sig();
        let l = Literal::neq(s.t("g", vec![s.t("a", vec![])]), x(0));
        let ps: Vec<String> = l.positions().iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, vec!["1", "1.1", "2"]);
        assert_eq!(l.subterm_at(&Position(vec![1, 1])), Some(&s.t("a", vec![])));
    }

    #[test]
    fn normalize_vars_renumbers() {
        let s = sig();
        let c = Clause::new(vec![Literal::eq(s.t("g", vec![x(7)]), x(3))]);
        let n = c.normalize_vars();
        assert_eq!(n, Clause::new(vec![Literal::eq(s.t("g", vec![x(0)]), x(1))]));
    }
}
