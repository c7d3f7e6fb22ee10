//! Problem input in a native format and a CNF subset of TPTP, problem
//! printing, and the textual proof trace.

use std::collections::HashMap;
use std::fmt::Write as _;

use logos::Logos;
use thiserror::Error;

use crate::calculus::{RuleApplication, RuleName};
use crate::ordering::{KboConfig, OrderError};
use crate::search::{RunResult, Verdict};
use crate::terms::{Clause, Literal, Signature, Subst, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: `{name}` has arity {expected}, used with {got} arguments")]
    Arity { line: usize, col: usize, name: String, expected: usize, got: usize },
    #[error("{line}:{col}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unsupported: {feature}")]
    Unsupported { line: usize, col: usize, feature: String },
    #[error("{line}:{col}: {msg}")]
    Invalid { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// A parsed problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub sig: Signature,
    pub cfg: KboConfig,
    pub clauses: Vec<Clause>,
    pub beta: Option<Term>,
    /// Scripted decisions, in order.
    pub decisions: Vec<Literal>,
}

#[derive(Logos, Debug, Clone, PartialEq, Eq)]
#[logos(skip r"[ \t\r\n\f]+")]
#[logos(skip r"%[^\n]*")]
#[logos(skip r"#[^\n]*")]
#[logos(skip r"/\*([^*]|\*+[^*/])*\*+/")]
enum Tok {
    #[regex(r"[a-z$][A-Za-z0-9_]*", |l| l.slice().to_string())]
    Name(String),
    #[regex(r"'[^']*'", |l| { let s = l.slice(); s[1..s.len() - 1].to_string() })]
    Quoted(String),
    #[regex(r"[A-Z_][A-Za-z0-9_]*", |l| l.slice().to_string())]
    Var(String),
    #[regex(r"[0-9]+", |l| l.slice().to_string())]
    Int(String),
    #[token("(")]
    LParen,
    #[token(")")]
    RParen,
    #[token(",")]
    Comma,
    #[token("!=")]
    Neq,
    #[token("=")]
    Eq,
    #[token("~")]
    Tilde,
    #[token("|")]
    Bar,
    #[token(".")]
    Dot,
    #[token(";")]
    Semi,
    #[token("/")]
    Slash,
    #[token("<")]
    Lt,
    #[token("{")]
    LBrace,
    #[token("}")]
    RBrace,
    #[token(":")]
    Colon,
    #[token("⊥")]
    Bottom,
    #[token("&")]
    Amp,
    #[token("=>")]
    Implies,
    #[token("!")]
    Bang,
    #[token("?")]
    Question,
    #[token("[")]
    LBracket,
    #[token("]")]
    RBracket,
}

/// How variable names map to indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarMode {
    /// Numbered by first occurrence within a clause.
    FirstOccurrence,
    /// `X<n>` is variable `n`.
    Indexed,
}

struct Parser<'s> {
    src: &'s str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: Signature,
    /// Symbols must be declared before use.
    declared_only: bool,
    vars: HashMap<String, u32>,
    var_mode: VarMode,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str, sig: Signature, declared_only: bool, var_mode: VarMode) -> Result<Parser<'s>, FrontendError> {
        let mut toks = Vec::new();
        let mut lex = Tok::lexer(src);
        while let Some(t) = lex.next() {
            let at = lex.span().start;
            match t {
                Ok(t) => toks.push((t, at)),
                Err(()) => {
                    let (line, col) = line_col(src, at);
                    return Err(FrontendError::Syntax { line, col, msg: format!("unexpected character {:?}", &src[lex.span()]) });
                }
            }
        }
        Ok(Parser { src, toks, pos: 0, sig, declared_only, vars: HashMap::new(), var_mode })
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.src.len())
    }

    fn here(&self) -> (usize, usize) {
        line_col(self.src, self.offset())
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FrontendError> {
        let (line, col) = self.here();
        Err(FrontendError::Syntax { line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), FrontendError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn terminator(&mut self) -> Result<(), FrontendError> {
        if self.eat(&Tok::Dot) || self.eat(&Tok::Semi) {
            Ok(())
        } else {
            self.err("expected `.` or `;`")
        }
    }

    fn name(&mut self) -> Result<String, FrontendError> {
        match self.peek().cloned() {
            Some(Tok::Name(n)) | Some(Tok::Quoted(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a symbol name"),
        }
    }

    fn int(&mut self) -> Result<usize, FrontendError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                n.parse().or_else(|_| self.err("integer out of range"))
            }
            _ => self.err("expected an integer"),
        }
    }

    fn var(&mut self, name: &str) -> Result<Term, FrontendError> {
        match self.var_mode {
            VarMode::FirstOccurrence => {
                let n = self.vars.len() as u32;
                Ok(Term::var(*self.vars.entry(name.to_string()).or_insert(n)))
            }
            VarMode::Indexed => match name.strip_prefix('X').and_then(|d| d.parse::<u32>().ok()) {
                Some(v) => Ok(Term::var(v)),
                None => self.err(format!("expected a variable X<n>, found {name}")),
            },
        }
    }

    fn term(&mut self) -> Result<Term, FrontendError> {
        let start = self.offset();
        match self.peek().cloned() {
            Some(Tok::Var(v)) => {
                self.pos += 1;
                self.var(&v)
            }
            Some(Tok::Name(n)) | Some(Tok::Quoted(n)) => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        args.push(self.term()?);
                        if self.eat(&Tok::Comma) {
                            continue;
                        }
                        self.expect(Tok::RParen, "`)` or `,`")?;
                        break;
                    }
                }
                let (line, col) = line_col(self.src, start);
                let s = match self.sig.lookup(&n) {
                    Some(s) => s,
                    None if self.declared_only => return Err(FrontendError::UnknownSymbol { line, col, name: n }),
                    None => self.sig.add(&n, args.len()).expect("fresh symbol"),
                };
                let expected = self.sig.arity(s);
                if expected != args.len() {
                    return Err(FrontendError::Arity { line, col, name: n, expected, got: args.len() });
                }
                Ok(Term::app(s, args))
            }
            _ => self.err("expected a term"),
        }
    }

    fn literal(&mut self) -> Result<Literal, FrontendError> {
        let lhs = self.term()?;
        if self.eat(&Tok::Eq) {
            Ok(Literal::eq(lhs, self.term()?))
        } else if self.eat(&Tok::Neq) {
            Ok(Literal::neq(lhs, self.term()?))
        } else {
            self.err("expected `=` or `!=`")
        }
    }

    /// Literals separated by `|` up to (not including) a terminator.
    fn clause_body(&mut self) -> Result<Clause, FrontendError> {
        self.vars.clear();
        let mut lits = Vec::new();
        if self.eat(&Tok::Bottom) {
            return Ok(Clause::empty());
        }
        if matches!(self.peek(), Some(Tok::Dot) | Some(Tok::Semi) | None) {
            return Ok(Clause::empty());
        }
        loop {
            lits.push(self.literal()?);
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        Ok(Clause::new(lits))
    }
}

fn line_col(src: &str, at: usize) -> (usize, usize) {
    let before = &src[..at.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

/// Parses the native format:
///
/// ```text
/// sig f/1 a/0 b/0;          % optional; otherwise inferred from use
/// order kbo;
/// weights {f: 1, a: 1};
/// precedence b < a < f;     % ascending
/// beta f(f(a));
/// clause f(X) != a | f(X) = b.
/// decide a = b;
/// ```
pub fn parse_native(text: &str) -> Result<Problem, FrontendError> {
    let mut p = Parser::new(text, Signature::new(), false, VarMode::FirstOccurrence)?;
    let mut clauses = Vec::new();
    let mut beta = None;
    let mut decisions = Vec::new();
    let mut weights: Vec<(String, usize, (usize, usize))> = Vec::new();
    let mut precedence: Option<(Vec<String>, (usize, usize))> = None;
    while !p.at_end() {
        let at = p.here();
        let kw = match p.bump() {
            Some(Tok::Name(k)) => k,
            _ => {
                p.pos -= 1;
                return p.err("expected a statement");
            }
        };
        match kw.as_str() {
            "sig" => {
                if !p.sig.is_empty() {
                    return p.err("`sig` must come first and only once");
                }
                while let Some(Tok::Name(_)) | Some(Tok::Quoted(_)) = p.peek() {
                    let here = p.here();
                    let n = p.name()?;
                    p.expect(Tok::Slash, "`/`")?;
                    let a = p.int()?;
                    if p.sig.add(&n, a).is_err() {
                        return Err(FrontendError::Invalid { line: here.0, col: here.1, msg: format!("symbol `{n}` declared twice") });
                    }
                }
                p.declared_only = true;
                p.terminator()?;
            }
            "order" => {
                let o = p.name()?;
                if o != "kbo" {
                    return Err(FrontendError::Unsupported { line: at.0, col: at.1, feature: format!("ordering `{o}`") });
                }
                p.terminator()?;
            }
            "weights" => {
                p.expect(Tok::LBrace, "`{`")?;
                while !p.eat(&Tok::RBrace) {
                    let here = p.here();
                    let n = p.name()?;
                    p.expect(Tok::Colon, "`:`")?;
                    let w = p.int()?;
                    weights.push((n, w, here));
                    p.eat(&Tok::Comma);
                }
                if matches!(p.peek(), Some(Tok::Dot) | Some(Tok::Semi)) {
                    p.pos += 1;
                }
            }
            "precedence" => {
                let mut names = vec![p.name()?];
                while p.eat(&Tok::Lt) {
                    names.push(p.name()?);
                }
                precedence = Some((names, at));
                p.terminator()?;
            }
            "beta" => {
                p.vars.clear();
                let t = p.term()?;
                if !t.is_ground() {
                    return Err(FrontendError::Invalid { line: at.0, col: at.1, msg: "beta must be ground".into() });
                }
                beta = Some(t);
                p.terminator()?;
            }
            "clause" => {
                clauses.push(p.clause_body()?);
                p.terminator()?;
            }
            "decide" => {
                p.vars.clear();
                let l = p.literal()?;
                if !l.is_ground() {
                    return Err(FrontendError::Invalid { line: at.0, col: at.1, msg: "decisions must be ground".into() });
                }
                decisions.push(l);
                p.terminator()?;
            }
            _ => {
                return Err(FrontendError::Syntax { line: at.0, col: at.1, msg: format!("unknown statement `{kw}`") });
            }
        }
    }
    let sig = p.sig;
    let mut cfg = KboConfig::default_for(&sig);
    for (n, w, (line, col)) in weights {
        let s = sig.lookup(&n).ok_or(FrontendError::UnknownSymbol { line, col, name: n.clone() })?;
        cfg.set_weight(s, w as u32)?;
    }
    if let Some((names, (line, col))) = precedence {
        let mut syms = Vec::new();
        for n in names {
            syms.push(sig.lookup(&n).ok_or(FrontendError::UnknownSymbol { line, col, name: n.clone() })?);
        }
        cfg.set_precedence(&syms)?;
    }
    Ok(Problem { sig, cfg, clauses, beta, decisions })
}

fn visible(sig: &Signature, s: crate::terms::Sym) -> bool {
    !sig.name(s).starts_with('$')
}

/// Prints a problem in the native format.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    let syms: Vec<_> = p.sig.symbols().filter(|&s| visible(&p.sig, s)).collect();
    let decl: Vec<String> = syms.iter().map(|&s| format!("{}/{}", p.sig.name(s), p.sig.arity(s))).collect();
    writeln!(out, "sig {};", decl.join(" ")).unwrap();
    writeln!(out, "order kbo;").unwrap();
    let w: Vec<String> = syms.iter().map(|&s| format!("{}: {}", p.sig.name(s), p.cfg.weight_of(s))).collect();
    writeln!(out, "weights {{{}}};", w.join(", ")).unwrap();
    let prec: Vec<&str> = p.cfg.precedence().into_iter().filter(|&s| visible(&p.sig, s)).map(|s| p.sig.name(s)).collect();
    writeln!(out, "precedence {};", prec.join(" < ")).unwrap();
    if let Some(b) = p.beta.as_ref().filter(|b| !p.sig.show(*b).to_string().contains('$')) {
        writeln!(out, "beta {};", p.sig.show(b)).unwrap();
    }
    for c in &p.clauses {
        if c.is_empty() {
            writeln!(out, "clause .").unwrap();
        } else {
            writeln!(out, "clause {}.", p.sig.show(c)).unwrap();
        }
    }
    for d in &p.decisions {
        writeln!(out, "decide {};", p.sig.show(d)).unwrap();
    }
    out
}

/// Parses `cnf(name, role, clause).` statements whose literals are equations.
pub fn parse_tptp_cnf(text: &str) -> Result<Problem, FrontendError> {
    let mut p = Parser::new(text, Signature::new(), false, VarMode::FirstOccurrence)?;
    let mut clauses = Vec::new();
    while !p.at_end() {
        let at = p.here();
        let kw = match p.bump() {
            Some(Tok::Name(k)) => k,
            _ => {
                p.pos -= 1;
                return p.err("expected `cnf(`");
            }
        };
        if kw != "cnf" {
            return Err(FrontendError::Unsupported { line: at.0, col: at.1, feature: format!("`{kw}` statements") });
        }
        p.expect(Tok::LParen, "`(`")?;
        match p.bump() {
            Some(Tok::Name(_)) | Some(Tok::Quoted(_)) | Some(Tok::Int(_)) => {}
            _ => {
                p.pos -= 1;
                return p.err("expected a formula name");
            }
        }
        p.expect(Tok::Comma, "`,`")?;
        p.name()?;
        p.expect(Tok::Comma, "`,`")?;
        p.vars.clear();
        let mut depth = 0;
        while p.eat(&Tok::LParen) {
            depth += 1;
        }
        let mut lits = Vec::new();
        loop {
            if let Some(l) = tptp_literal(&mut p)? {
                lits.push(l);
            }
            if !p.eat(&Tok::Bar) {
                break;
            }
        }
        for _ in 0..depth {
            p.expect(Tok::RParen, "`)`")?;
        }
        // optional annotations
        if p.eat(&Tok::Comma) {
            let mut nest = 0usize;
            loop {
                match p.peek() {
                    Some(Tok::LParen) => nest += 1,
                    Some(Tok::RParen) if nest == 0 => break,
                    Some(Tok::RParen) => nest -= 1,
                    None => return p.err("unterminated annotation"),
                    _ => {}
                }
                p.pos += 1;
            }
        }
        p.expect(Tok::RParen, "`)`")?;
        p.expect(Tok::Dot, "`.`")?;
        clauses.push(Clause::new(lits));
    }
    let cfg = KboConfig::default_for(&p.sig);
    Ok(Problem { sig: p.sig, cfg, clauses, beta: None, decisions: Vec::new() })
}

/// One TPTP literal; `None` for `$false`.
fn tptp_literal(p: &mut Parser<'_>) -> Result<Option<Literal>, FrontendError> {
    let neg = p.eat(&Tok::Tilde);
    let paren = neg && p.eat(&Tok::LParen);
    let at = p.here();
    match p.peek() {
        Some(Tok::Name(n)) if n == "$false" && !neg => {
            p.pos += 1;
            return Ok(None);
        }
        Some(Tok::Name(n)) if n.starts_with('$') => {
            return Err(FrontendError::Unsupported { line: at.0, col: at.1, feature: format!("`{n}`") });
        }
        _ => {}
    }
    if matches!(p.peek(), Some(Tok::Amp | Tok::Implies | Tok::Bang | Tok::Question)) {
        return Err(FrontendError::Unsupported { line: at.0, col: at.1, feature: "non-clausal formula".into() });
    }
    let start = p.pos;
    let lhs = p.term()?;
    let lit = if p.eat(&Tok::Eq) {
        Literal::eq(lhs, p.term()?)
    } else if p.eat(&Tok::Neq) {
        Literal::neq(lhs, p.term()?)
    } else {
        let name = match &p.toks[start].0 {
            Tok::Name(n) | Tok::Quoted(n) => n.clone(),
            _ => "?".into(),
        };
        return Err(FrontendError::Unsupported { line: at.0, col: at.1, feature: format!("predicate `{name}`; only equality literals are accepted") });
    };
    if paren {
        p.expect(Tok::RParen, "`)`")?;
    }
    Ok(Some(if neg { lit.complement() } else { lit }))
}

/// One trace line per application; a comment follows each Backtrack with the learned clause.
pub fn format_trace(result: &RunResult) -> String {
    let st = &result.state;
    let mut out = String::new();
    for a in &result.trace {
        writeln!(out, "{}", st.sig.show(a)).unwrap();
        if a.rule == RuleName::Backtrack {
            if let Some(id) = a.clause {
                writeln!(out, "# learned {}", st.sig.show(&st.clauses[id].clause)).unwrap();
            }
        }
    }
    out
}

fn trace_err<T>(line: usize, msg: impl Into<String>) -> Result<T, FrontendError> {
    Err(FrontendError::Syntax { line, col: 1, msg: msg.into() })
}

fn parse_with<T>(
    text: &str,
    sig: &Signature,
    line: usize,
    f: impl FnOnce(&mut Parser<'_>) -> Result<T, FrontendError>,
) -> Result<T, FrontendError> {
    let mut p = Parser::new(text, sig.clone(), true, VarMode::Indexed)?;
    let r = f(&mut p).map_err(|e| match e {
        FrontendError::Syntax { msg, .. } => FrontendError::Syntax { line, col: 1, msg },
        e => e,
    })?;
    if !p.at_end() {
        return trace_err(line, format!("trailing input in `{text}`"));
    }
    Ok(r)
}

/// Parses a trace produced by [`format_trace`]; comment lines are skipped.
pub fn parse_trace(text: &str, sig: &Signature) -> Result<Vec<RuleApplication>, FrontendError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let Some(rest) = l.strip_prefix("rule=") else { return trace_err(line, "expected `rule=`") };
        let (name, rest) = rest.split_once(' ').unwrap_or((rest, ""));
        let Some(rule) = RuleName::from_name(name) else { return trace_err(line, format!("unknown rule `{name}`")) };
        let mut app = RuleApplication::new(rule);
        let Some(rest) = rest.strip_prefix("clause=") else { return trace_err(line, "expected `clause=`") };
        let (c, rest) = rest.split_once(' ').unwrap_or((rest, ""));
        if c != "-" {
            app.clause = Some(c.parse().or_else(|_| trace_err(line, "bad clause id"))?);
        }
        let Some(rest) = rest.strip_prefix("subst={") else { return trace_err(line, "expected `subst=`") };
        let Some(close) = rest.find('}') else { return trace_err(line, "unterminated substitution") };
        let body = &rest[..close];
        let mut rest = rest[close + 1..].trim_start();
        if !body.trim().is_empty() {
            let pairs = parse_with(&body.replace("->", "="), sig, line, |p| {
                let mut pairs = Vec::new();
                loop {
                    let v = match p.term()? {
                        Term::Var(v) => v,
                        _ => return p.err("expected a variable"),
                    };
                    p.expect(Tok::Eq, "`->`")?;
                    pairs.push((v, p.term()?));
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
                Ok(pairs)
            })?;
            app.subst = Subst::from_pairs(pairs);
        }
        while !rest.is_empty() {
            if rest.starts_with('→') || rest.starts_with("level=") {
                break;
            }
            if let Some(r) = rest.strip_prefix("new=") {
                let body = r.split(" →").next().unwrap_or(r);
                app.replacement = Some(parse_with(body, sig, line, |p| p.clause_body())?);
                break;
            }
            let (kv, r) = rest.split_once(' ').unwrap_or((rest, ""));
            rest = r.trim_start();
            let Some((k, v)) = kv.split_once('=') else { return trace_err(line, format!("bad parameter `{kv}`")) };
            match k {
                "lit" => {
                    for x in v.split(',') {
                        app.lits.push(x.parse().or_else(|_| trace_err(line, "bad literal index"))?);
                    }
                }
                "step" => app.step = Some(v.parse().or_else(|_| trace_err(line, "bad step index"))?),
                "beta" => app.beta = Some(parse_with(v, sig, line, |p| p.term())?),
                _ => return trace_err(line, format!("unknown parameter `{k}`")),
            }
        }
        out.push(app);
    }
    Ok(out)
}

/// Parses a ground term over `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, FrontendError> {
    parse_with(text, sig, 1, |p| p.term())
}

/// Parses a literal over `sig`; variables `X<n>` are variable `n`.
pub fn parse_literal(text: &str, sig: &Signature) -> Result<Literal, FrontendError> {
    parse_with(text, sig, 1, |p| p.literal())
}

/// Parses a clause over `sig`; variables `X<n>` are variable `n`.
pub fn parse_clause(text: &str, sig: &Signature) -> Result<Clause, FrontendError> {
    parse_with(text, sig, 1, |p| p.clause_body())
}

/// Exit code of a verdict.
pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Unsatisfiable => 0,
        Verdict::BoundedModel => 1,
        Verdict::ResourceOut => 2,
    }
}

/// Report text: the status line, then the trace for a refutation or the
/// trail and bound for a bounded model. With `trace_elsewhere` the trace is
/// left out.
pub fn emit_result(result: &RunResult, trace_elsewhere: bool) -> String {
    let st = &result.state;
    let mut out = format!("status: {}\n", result.verdict.name());
    match result.verdict {
        Verdict::Unsatisfiable => {
            if !trace_elsewhere {
                out.push_str(&format_trace(result));
            }
        }
        Verdict::BoundedModel => {
            writeln!(out, "beta: {}", st.sig.show(&st.beta)).unwrap();
            writeln!(out, "trail:").unwrap();
            for e in st.trail.entries() {
                writeln!(out, "  {}", st.sig.show(e)).unwrap();
            }
        }
        Verdict::ResourceOut => {
            writeln!(out, "steps: {}", result.trace.len()).unwrap();
        }
    }
    for (i, v) in &result.violations {
        writeln!(out, "audit: step {i}: item {}: {}", v.item, v.message).unwrap();
    }
    out
}
