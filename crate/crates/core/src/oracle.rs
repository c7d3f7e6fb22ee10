//! Independent ground reasoning: congruence closure, a small DPLL(T) loop
//! over ground clauses, and redundancy checking against the trail ordering.

use std::collections::HashMap;

use thiserror::Error;

use crate::ordering::{KboConfig, OrderResult};
use crate::terms::{ground_instances_over, Clause, Closure, Literal, Term};
use crate::trail::Trail;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("ground problem too large: {0} clauses (limit {1})")]
    TooLarge(usize, usize),
    #[error("oracle input is not ground")]
    NotGround,
}

/// Clause count above which [`ground_sat`] refuses to run.
pub const MAX_GROUND_CLAUSES: usize = 50_000;

/// Union-find congruence closure over interned ground terms.
#[derive(Debug, Clone, Default)]
pub struct CongruenceClosure {
    ids: HashMap<Term, usize>,
    /// (symbol, argument ids) of each node, `None` for unseen shapes.
    nodes: Vec<(u32, Vec<usize>)>,
    parent: Vec<usize>,
    uses: Vec<Vec<usize>>,
    sigs: HashMap<(u32, Vec<usize>), usize>,
    diseqs: Vec<(usize, usize)>,
}

impl CongruenceClosure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn canon_sig(&mut self, n: usize) -> (u32, Vec<usize>) {
        let (f, args) = self.nodes[n].clone();
        (f, args.into_iter().map(|a| self.find(a)).collect())
    }

    /// Interns a ground term and all its subterms.
    pub fn intern(&mut self, t: &Term) -> usize {
        if let Some(&i) = self.ids.get(t) {
            return i;
        }
        let (f, args) = match t {
            Term::App(f, a) => (f.0, a.iter().map(|u| self.intern(u)).collect::<Vec<_>>()),
            Term::Var(_) => panic!("congruence closure over a non-ground term"),
        };
        let i = self.nodes.len();
        self.nodes.push((f, args.clone()));
        self.parent.push(i);
        self.uses.push(Vec::new());
        self.ids.insert(t.clone(), i);
        for &a in &args {
            let r = self.find(a);
            self.uses[r].push(i);
        }
        let sig = self.canon_sig(i);
        if let Some(&j) = self.sigs.get(&sig) {
            self.union(i, j);
        } else {
            self.sigs.insert(sig, i);
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut pending = vec![(a, b)];
        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let (small, big) = if self.uses[ra].len() < self.uses[rb].len() { (ra, rb) } else { (rb, ra) };
            self.parent[small] = big;
            let moved = std::mem::take(&mut self.uses[small]);
            for &u in &moved {
                let sig = self.canon_sig(u);
                match self.sigs.get(&sig) {
                    Some(&v) if v != u => pending.push((u, v)),
                    Some(_) => {}
                    None => {
                        self.sigs.insert(sig, u);
                    }
                }
            }
            self.uses[big].extend(moved);
        }
    }

    pub fn merge(&mut self, s: &Term, t: &Term) {
        let (a, b) = (self.intern(s), self.intern(t));
        self.union(a, b);
    }

    pub fn add_diseq(&mut self, s: &Term, t: &Term) {
        let (a, b) = (self.intern(s), self.intern(t));
        self.diseqs.push((a, b));
    }

    pub fn assert_literal(&mut self, l: &Literal) {
        if l.positive {
            self.merge(&l.lhs, &l.rhs)
        } else {
            self.add_diseq(&l.lhs, &l.rhs)
        }
    }

    pub fn equal(&mut self, s: &Term, t: &Term) -> bool {
        let (a, b) = (self.intern(s), self.intern(t));
        self.find(a) == self.find(b)
    }

    /// Whether `s != t` follows from a stated disequation.
    pub fn distinct(&mut self, s: &Term, t: &Term) -> bool {
        let (a, b) = (self.intern(s), self.intern(t));
        let (ra, rb) = (self.find(a), self.find(b));
        for k in 0..self.diseqs.len() {
            let (u, v) = self.diseqs[k];
            let (ru, rv) = (self.find(u), self.find(v));
            if (ru == ra && rv == rb) || (ru == rb && rv == ra) {
                return true;
            }
        }
        false
    }

    pub fn is_consistent(&mut self) -> bool {
        for k in 0..self.diseqs.len() {
            let (u, v) = self.diseqs[k];
            if self.find(u) == self.find(v) {
                return false;
            }
        }
        true
    }

    /// Some(true) if `l` is entailed, Some(false) if its complement is, None otherwise.
    pub fn eval(&mut self, l: &Literal) -> Option<bool> {
        let eq = self.equal(&l.lhs, &l.rhs);
        let ne = !eq && self.distinct(&l.lhs, &l.rhs);
        match (eq, ne) {
            (true, _) => Some(l.positive),
            (false, true) => Some(!l.positive),
            _ => None,
        }
    }
}

/// Whether the ground literals `e` entail the ground literal `l`.
pub fn cc_entails(e: &[Literal], l: &Literal) -> bool {
    let mut cc = CongruenceClosure::new();
    for k in e {
        cc.assert_literal(k);
    }
    if !cc.is_consistent() {
        return true;
    }
    if l.positive {
        cc.equal(&l.lhs, &l.rhs)
    } else {
        if l.lhs == l.rhs {
            return false;
        }
        cc.merge(&l.lhs, &l.rhs);
        !cc.is_consistent()
    }
}

/// A finite set of ground clauses.
#[derive(Debug, Clone, Default)]
pub struct GroundProblem {
    pub clauses: Vec<Clause>,
    /// Terms the clauses are drawn from; informational only.
    pub universe: Vec<Term>,
}

/// A satisfying selection: the asserted literals (one or more per clause).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundModel {
    pub literals: Vec<Literal>,
}

impl GroundModel {
    pub fn satisfies(&self, c: &Clause) -> bool {
        let mut cc = CongruenceClosure::new();
        for l in &self.literals {
            cc.assert_literal(l);
        }
        c.lits.iter().any(|l| cc.eval(l) == Some(true))
    }
}

fn cc_of(assigned: &[Literal]) -> CongruenceClosure {
    let mut cc = CongruenceClosure::new();
    for l in assigned {
        cc.assert_literal(l);
    }
    cc
}

fn dpll(clauses: &[Clause], assigned: &mut Vec<Literal>) -> bool {
    let mark = assigned.len();
    loop {
        let mut cc = cc_of(assigned);
        if !cc.is_consistent() {
            assigned.truncate(mark);
            return false;
        }
        let mut unit: Option<Literal> = None;
        let mut branch: Option<(usize, Vec<Literal>)> = None;
        for c in clauses {
            let mut open = Vec::new();
            let mut sat = false;
            for l in &c.lits {
                match cc.eval(l) {
                    Some(true) => {
                        sat = true;
                        break;
                    }
                    Some(false) => {}
                    None => open.push(l.clone()),
                }
            }
            if sat {
                continue;
            }
            match open.len() {
                0 => {
                    assigned.truncate(mark);
                    return false;
                }
                1 => {
                    unit = Some(open.pop().unwrap());
                    break;
                }
                n => {
                    if branch.as_ref().map(|(m, _)| n < *m).unwrap_or(true) {
                        branch = Some((n, open));
                    }
                }
            }
        }
        if let Some(u) = unit {
            assigned.push(u);
            continue;
        }
        let Some((_, open)) = branch else { return true };
        for (i, l) in open.iter().enumerate() {
            let before = assigned.len();
            for k in &open[..i] {
                assigned.push(k.complement());
            }
            assigned.push(l.clone());
            if dpll(clauses, assigned) {
                return true;
            }
            assigned.truncate(before);
        }
        assigned.truncate(mark);
        return false;
    }
}

/// A model of the ground problem, or `None` if it is unsatisfiable.
pub fn ground_sat(p: &GroundProblem) -> Result<Option<GroundModel>, OracleError> {
    if p.clauses.len() > MAX_GROUND_CLAUSES {
        return Err(OracleError::TooLarge(p.clauses.len(), MAX_GROUND_CLAUSES));
    }
    if !p.clauses.iter().all(|c| c.is_ground()) {
        return Err(OracleError::NotGround);
    }
    let mut assigned = Vec::new();
    if dpll(&p.clauses, &mut assigned) {
        Ok(Some(GroundModel { literals: assigned }))
    } else {
        Ok(None)
    }
}

/// Whether the ground clauses entail the ground clause `c`.
pub fn ground_entails(clauses: &[Clause], c: &Clause) -> Result<bool, OracleError> {
    let mut all = clauses.to_vec();
    for l in &c.lits {
        all.push(Clause::new(vec![l.complement()]));
    }
    Ok(ground_sat(&GroundProblem { clauses: all, universe: Vec::new() })?.is_none())
}

/// Whether the ground instance `c` is entailed by the ground instances of
/// `pool` below `beta` that are no greater than it in the trail ordering.
pub fn is_redundant(
    c: &Closure,
    pool: &[Clause],
    trail: &Trail,
    beta: &Term,
    universe: &[Term],
    cfg: &KboConfig,
) -> Result<bool, OracleError> {
    let g = c.ground();
    if !g.is_ground() {
        return Err(OracleError::NotGround);
    }
    let mut smaller = Vec::new();
    for d in pool {
        for inst in ground_instances_over(d, beta, universe, cfg) {
            let gi = inst.ground();
            if trail.gamma_star_compare_clauses(&gi, &g, beta) != OrderResult::Gt {
                smaller.push(gi);
            }
        }
    }
    ground_entails(&smaller, &g)
}
