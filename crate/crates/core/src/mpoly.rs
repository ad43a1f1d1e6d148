//! Sparse multivariate polynomials over a pluggable exact coefficient
//! ring: the integers, or `A = F_q[t]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::finite::{Fq, FqPoly};
use crate::unipoly::{KPoly, ZPoly};
use crate::{Error, Result};

/// Identifies the coefficient ring `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingTag {
    Integers,
    /// `F_q[t]` for a prime power `q`.
    FqT(u64),
}

/// Exact coefficient ring, carried as a value so `F_q[t]` can hold its
/// field tables.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_unit(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    /// Image of the integer scalar `n` times `a` (derivative coefficients).
    fn int_mul(&self, n: u64, a: &Self::Elem) -> Self::Elem;
    /// Canonical residue of `a` modulo a ring element.
    fn rem(&self, a: &Self::Elem, modulus: &Self::Elem) -> Self::Elem;
    /// `d/dt` on coefficients, for rings with a distinguished parameter.
    fn coeff_derivative(&self, _a: &Self::Elem) -> Option<Self::Elem> {
        None
    }
    /// Name of the coefficient parameter, if any.
    fn coeff_param(&self) -> Option<&'static str> {
        None
    }
    /// The coefficient parameter as a ring element.
    fn coeff_generator(&self) -> Self::Elem {
        panic!("ring has no coefficient parameter")
    }
    fn render_elem(&self, a: &Self::Elem) -> String;
    fn tag(&self) -> RingTag;
}

/// The ring of integers.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntRing;

impl Ring for IntRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::from(1)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.magnitude().to_u64() == Some(1)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn int_mul(&self, n: u64, a: &BigInt) -> BigInt {
        a * BigInt::from(n)
    }
    fn rem(&self, a: &BigInt, modulus: &BigInt) -> BigInt {
        let m = modulus.abs();
        ((a % &m) + &m) % &m
    }
    fn render_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }
    fn tag(&self) -> RingTag {
        RingTag::Integers
    }
}

/// The ring `A = F_q[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqtRing {
    pub field: Fq,
}

impl FqtRing {
    pub fn new(field: Fq) -> FqtRing {
        FqtRing { field }
    }
}

impl Ring for FqtRing {
    type Elem = FqPoly;

    fn zero(&self) -> FqPoly {
        FqPoly::zero(&self.field)
    }
    fn one(&self) -> FqPoly {
        FqPoly::one(&self.field)
    }
    fn is_zero(&self, a: &FqPoly) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &FqPoly) -> bool {
        a.is_unit()
    }
    fn add(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        a.add(b)
    }
    fn sub(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        a.sub(b)
    }
    fn mul(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        a.mul(b)
    }
    fn neg(&self, a: &FqPoly) -> FqPoly {
        a.neg()
    }
    fn from_bigint(&self, n: &BigInt) -> FqPoly {
        let p = BigInt::from(self.field.characteristic());
        let r = ((n % &p) + &p) % &p;
        FqPoly::constant(&self.field, self.field.from_int(r.to_i64().unwrap()))
    }
    fn int_mul(&self, n: u64, a: &FqPoly) -> FqPoly {
        a.scale(self.field.from_int((n % self.field.characteristic()) as i64))
    }
    fn rem(&self, a: &FqPoly, modulus: &FqPoly) -> FqPoly {
        a.rem(modulus).expect("nonzero modulus")
    }
    fn coeff_derivative(&self, a: &FqPoly) -> Option<FqPoly> {
        Some(a.t_derivative())
    }
    fn coeff_param(&self) -> Option<&'static str> {
        Some("t")
    }
    fn coeff_generator(&self) -> FqPoly {
        FqPoly::gen(&self.field)
    }
    fn render_elem(&self, a: &FqPoly) -> String {
        a.render()
    }
    fn tag(&self) -> RingTag {
        RingTag::FqT(self.field.order())
    }
}

/// Exponent tuple ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial.  Terms are canonically ordered and
/// never store a zero coefficient, so equality is structural.
#[derive(Clone, PartialEq)]
pub struct MPoly<R: Ring> {
    ring: R,
    vars: Vec<String>,
    terms: BTreeMap<Monomial, R::Elem>,
}

impl<R: Ring> fmt::Debug for MPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

fn var_sort_key(name: &str) -> (String, Option<u64>) {
    let digits: String = name.chars().rev().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        (name.to_string(), None)
    } else {
        let prefix = &name[..name.len() - digits.len()];
        let num: String = digits.chars().rev().collect();
        (prefix.to_string(), num.parse().ok())
    }
}

impl<R: Ring> MPoly<R> {
    pub fn zero(ring: &R, vars: &[String]) -> MPoly<R> {
        MPoly { ring: ring.clone(), vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &R, vars: &[String], c: R::Elem) -> MPoly<R> {
        let mut p = MPoly::zero(ring, vars);
        if !ring.is_zero(&c) {
            p.terms.insert(Monomial(vec![0; vars.len()]), c);
        }
        p
    }

    pub fn var(ring: &R, vars: &[String], index: usize) -> MPoly<R> {
        let mut exps = vec![0; vars.len()];
        exps[index] = 1;
        let mut p = MPoly::zero(ring, vars);
        p.terms.insert(Monomial(exps), ring.one());
        p
    }

    pub fn from_terms(ring: &R, vars: &[String], terms: Vec<(Vec<u32>, R::Elem)>) -> MPoly<R> {
        let mut p = MPoly::zero(ring, vars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), vars.len());
            p.add_term(Monomial(exps), c);
        }
        p
    }

    fn add_term(&mut self, mono: Monomial, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.remove(&mono) {
            None => {
                self.terms.insert(mono, c);
            }
            Some(old) => {
                let s = self.ring.add(&old, &c);
                if !self.ring.is_zero(&s) {
                    self.terms.insert(mono, s);
                }
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn constant_value(&self) -> R::Elem {
        self.terms
            .get(&Monomial(vec![0; self.vars.len()]))
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn degree_in(&self, var_index: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var_index]).max().unwrap_or(0)
    }

    pub fn add(&self, other: &MPoly<R>) -> MPoly<R> {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly<R> {
        let mut out = MPoly::zero(&self.ring, &self.vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), self.ring.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &MPoly<R>) -> MPoly<R> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MPoly<R>) -> MPoly<R> {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = MPoly::zero(&self.ring, &self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(exps), self.ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &R::Elem) -> MPoly<R> {
        let mut out = MPoly::zero(&self.ring, &self.vars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), self.ring.mul(a, c));
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> MPoly<R> {
        let mut acc = MPoly::constant(&self.ring, &self.vars, self.ring.one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Exact evaluation at a point of the coefficient ring.
    pub fn evaluate(&self, point: &[R::Elem]) -> Result<R::Elem> {
        if point.len() != self.vars.len() {
            return Err(Error::Arity { expected: self.vars.len(), got: point.len() });
        }
        // power tables up to the max exponent per variable
        let mut pows: Vec<Vec<R::Elem>> = Vec::with_capacity(point.len());
        for (i, x) in point.iter().enumerate() {
            let maxe = self.degree_in(i) as usize;
            let mut tbl = Vec::with_capacity(maxe + 1);
            tbl.push(self.ring.one());
            for e in 1..=maxe {
                let prev = tbl[e - 1].clone();
                tbl.push(self.ring.mul(&prev, x));
            }
            pows.push(tbl);
        }
        let mut acc = self.ring.zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = self.ring.mul(&term, &pows[i][e as usize]);
                }
            }
            acc = self.ring.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Formal partial derivative.  `var` may be a polynomial variable or,
    /// over `F_q[t]`, the coefficient parameter `t` (applied
    /// coefficient-wise).  Multiples of the characteristic vanish.
    pub fn partial_derivative(&self, var: &str) -> Result<MPoly<R>> {
        if let Some(idx) = self.vars.iter().position(|v| v == var) {
            let mut out = MPoly::zero(&self.ring, &self.vars);
            for (m, c) in &self.terms {
                let e = m.0[idx];
                if e == 0 {
                    continue;
                }
                let mut exps = m.0.clone();
                exps[idx] -= 1;
                out.add_term(Monomial(exps), self.ring.int_mul(e as u64, c));
            }
            return Ok(out);
        }
        if Some(var) == self.ring.coeff_param() {
            let mut out = MPoly::zero(&self.ring, &self.vars);
            for (m, c) in &self.terms {
                let d = self.ring.coeff_derivative(c).expect("ring has coeff param");
                out.add_term(m.clone(), d);
            }
            return Ok(out);
        }
        Err(Error::Domain(format!("unknown variable {var:?}")))
    }

    /// Reduce every coefficient to its canonical residue mod `modulus`.
    pub fn reduce_mod(&self, modulus: &R::Elem) -> Result<MPoly<R>> {
        if self.ring.is_zero(modulus) {
            return Err(Error::Domain("zero modulus".into()));
        }
        if self.ring.is_unit(modulus) {
            return Err(Error::Domain("unit modulus".into()));
        }
        let mut out = MPoly::zero(&self.ring, &self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), self.ring.rem(c, modulus));
        }
        Ok(out)
    }

    /// Substitute `map[i]` for variable `i`.  All images must share one
    /// variable list, which becomes the output's.
    pub fn substitute_all(&self, map: &[MPoly<R>]) -> Result<MPoly<R>> {
        if map.len() != self.vars.len() {
            return Err(Error::Arity { expected: self.vars.len(), got: map.len() });
        }
        let new_vars = map
            .first()
            .map(|m| m.vars.to_vec())
            .unwrap_or_default();
        let mut acc = MPoly::zero(&self.ring, &new_vars);
        for (m, c) in &self.terms {
            let mut term = MPoly::constant(&self.ring, &new_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&map[i].pow(e));
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Rewrites both polynomials over the union of their variable sets.
    pub fn unify(a: &MPoly<R>, b: &MPoly<R>) -> (MPoly<R>, MPoly<R>) {
        let mut names: Vec<String> = a.vars.iter().chain(b.vars.iter()).cloned().collect();
        names.sort_by_key(|n| var_sort_key(n));
        names.dedup();
        (a.embed(&names), b.embed(&names))
    }

    fn embed(&self, new_vars: &[String]) -> MPoly<R> {
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| new_vars.iter().position(|n| n == v).expect("superset"))
            .collect();
        let mut out = MPoly::zero(&self.ring, new_vars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; new_vars.len()];
            for (i, &e) in m.0.iter().enumerate() {
                exps[idx[i]] = e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            let cs = self.ring.render_elem(c);
            let coeff_is_one = self.ring.is_unit(c) && cs == "1";
            if !coeff_is_one || m.total_degree() == 0 {
                let needs_parens = m.total_degree() > 0
                    && (cs.contains('+') || cs[1..].contains('-'));
                if needs_parens {
                    factors.push(format!("({cs})"));
                } else {
                    factors.push(cs);
                }
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join("+").replace("+-", "-")
    }
}

// ---------------------------------------------------------------------
// parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let (l, c) = (line, col);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            _ if ch.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '+' | '-' | '*' | '^' | '(' | ')' => {
                chars.next();
                col += 1;
                toks.push((
                    match ch {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    },
                    l,
                    c,
                ));
            }
            _ if ch.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Int(s.parse().unwrap()), l, c));
            }
            _ if ch.is_ascii_alphabetic() || ch == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(s), l, c));
            }
            _ => {
                return Err(Error::Parse { line, col, msg: format!("unexpected character {ch:?}") });
            }
        }
    }
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }
    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|&(_, l, c)| (l, c))
            .unwrap_or((1, 1))
    }
    fn err(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::Parse { line, col, msg: msg.into() }
    }
}

#[derive(Clone, Debug)]
enum Ast {
    Num(BigInt),
    Sym(String),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
    Neg(Box<Ast>),
}

fn parse_expr(lx: &mut Lexer) -> Result<Ast> {
    let mut acc = if lx.peek() == Some(&Tok::Minus) {
        lx.next();
        Ast::Neg(Box::new(parse_term(lx)?))
    } else {
        parse_term(lx)?
    };
    loop {
        match lx.peek() {
            Some(Tok::Plus) => {
                lx.next();
                acc = Ast::Add(Box::new(acc), Box::new(parse_term(lx)?));
            }
            Some(Tok::Minus) => {
                lx.next();
                acc = Ast::Sub(Box::new(acc), Box::new(parse_term(lx)?));
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_term(lx: &mut Lexer) -> Result<Ast> {
    let mut acc = parse_factor(lx)?;
    while lx.peek() == Some(&Tok::Star) {
        lx.next();
        acc = Ast::Mul(Box::new(acc), Box::new(parse_factor(lx)?));
    }
    Ok(acc)
}

fn parse_factor(lx: &mut Lexer) -> Result<Ast> {
    let at = lx.here();
    let atom = match lx.next() {
        Some(Tok::Int(n)) => Ast::Num(n),
        Some(Tok::Ident(s)) => Ast::Sym(s),
        Some(Tok::LParen) => {
            let inner = parse_expr(lx)?;
            let close = lx.here();
            if lx.next() != Some(Tok::RParen) {
                return Err(err_at(close, "expected ')'"));
            }
            inner
        }
        Some(Tok::Minus) => return Err(err_at(at, "unexpected '-'")),
        other => return Err(err_at(at, format!("expected a factor, found {other:?}"))),
    };
    if lx.peek() == Some(&Tok::Caret) {
        lx.next();
        let at = lx.here();
        match lx.next() {
            Some(Tok::Int(n)) => {
                let e = n.to_u32().ok_or_else(|| err_at(at, "exponent out of range"))?;
                return Ok(Ast::Pow(Box::new(atom), e));
            }
            _ => return Err(err_at(at, "expected an integer exponent")),
        }
    }
    Ok(atom)
}

fn err_at((line, col): (usize, usize), msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn collect_syms(ast: &Ast, out: &mut Vec<String>) {
    match ast {
        Ast::Num(_) => {}
        Ast::Sym(s) => {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
        Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) => {
            collect_syms(a, out);
            collect_syms(b, out);
        }
        Ast::Pow(a, _) | Ast::Neg(a) => collect_syms(a, out),
    }
}

fn build<R: Ring>(ast: &Ast, ring: &R, vars: &[String]) -> MPoly<R> {
    match ast {
        Ast::Num(n) => MPoly::constant(ring, vars, ring.from_bigint(n)),
        Ast::Sym(s) => {
            if let Some(i) = vars.iter().position(|v| v == s) {
                MPoly::var(ring, vars, i)
            } else {
                // the coefficient parameter t over F_q[t]
                debug_assert_eq!(Some(s.as_str()), ring.coeff_param());
                MPoly::constant(ring, vars, ring.coeff_generator())
            }
        }
        Ast::Add(a, b) => build(a, ring, vars).add(&build(b, ring, vars)),
        Ast::Sub(a, b) => build(a, ring, vars).sub(&build(b, ring, vars)),
        Ast::Mul(a, b) => build(a, ring, vars).mul(&build(b, ring, vars)),
        Ast::Pow(a, e) => build(a, ring, vars).pow(*e),
        Ast::Neg(a) => build(a, ring, vars).neg(),
    }
}

/// Parse per the grammar: `expr := term (('+'|'-') term)*`,
/// `term := factor ('*' factor)*`,
/// `factor := (coeff | var | '(' expr ')') ('^' uint)?`.
/// Over `F_q[t]` the symbol `t` denotes the coefficient parameter.
pub fn parse<R: Ring>(text: &str, ring: &R) -> Result<MPoly<R>> {
    let mut lx = lex(text)?;
    if lx.toks.is_empty() {
        return Err(Error::Parse { line: 1, col: 1, msg: "empty input".into() });
    }
    let ast = parse_expr(&mut lx)?;
    if lx.pos != lx.toks.len() {
        return Err(lx.err("trailing input"));
    }
    let mut syms = Vec::new();
    collect_syms(&ast, &mut syms);
    if let Some(t) = ring.coeff_param() {
        syms.retain(|s| s != t);
    }
    syms.sort_by_key(|n| var_sort_key(n));
    Ok(build(&ast, ring, &syms))
}

/// Parse with an explicit variable list (unknown variables are errors).
pub fn parse_with_vars<R: Ring>(text: &str, ring: &R, vars: &[String]) -> Result<MPoly<R>> {
    let p = parse(text, ring)?;
    for v in p.vars() {
        if !vars.contains(v) {
            return Err(Error::Domain(format!("unknown variable {v:?}")));
        }
    }
    Ok(p.embed(vars))
}

// ---------------------------------------------------------------------
// heuristic squarefreeness guard

/// Outcome of the randomized squarefreeness check.
#[derive(Clone, Debug, PartialEq)]
pub enum SquarefreeCheck {
    Pass,
    /// Constant input carries no squarefreeness content to check.
    VacuouslyConstantPass,
    /// A specialization witnessing a repeated factor, rendered.
    Fail { kept_var: String, assignment: Vec<(String, String)> },
}

impl SquarefreeCheck {
    pub fn passed(&self) -> bool {
        !matches!(self, SquarefreeCheck::Fail { .. })
    }
}

impl MPoly<IntRing> {
    /// Specialize every variable except `keep` at the given values and
    /// return the univariate polynomial in `keep`.
    pub fn specialize_except(&self, keep: usize, values: &[BigInt]) -> ZPoly {
        debug_assert_eq!(values.len(), self.vars.len());
        let mut coeffs = vec![BigInt::zero(); self.degree_in(keep) as usize + 1];
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if i == keep || e == 0 {
                    continue;
                }
                v *= values[i].pow(e);
            }
            coeffs[m.0[keep] as usize] += v;
        }
        ZPoly::new(coeffs)
    }

    /// One-sided randomized squarefreeness guard: specializes all
    /// variables but one at uniform integers in `[-range, range]` and
    /// checks the resulting univariate polynomial for a squarefree
    /// content together with a degree-zero gcd with its derivative.
    pub fn heuristic_squarefree_check(&self, trials: u32, seed: u64, range: i64) -> Result<SquarefreeCheck> {
        if self.is_zero() {
            return Err(Error::Domain("squarefreeness of the zero polynomial is undefined".into()));
        }
        if self.is_constant() {
            return Ok(SquarefreeCheck::VacuouslyConstantPass);
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let appearing: Vec<usize> =
            (0..self.vars.len()).filter(|&i| self.degree_in(i) > 0).collect();
        for trial in 0..trials {
            let keep = appearing[trial as usize % appearing.len()];
            let values: Vec<BigInt> = (0..self.vars.len())
                .map(|_| BigInt::from(rng.gen_range(-range..=range)))
                .collect();
            let uni = self.specialize_except(keep, &values);
            if uni.is_zero() {
                continue; // the specialization line lies in the zero set
            }
            let content_ok = crate::arith::is_squarefree(&uni.content());
            let gcd_ok = uni.degree() == Some(0) || uni.is_squarefree_q();
            if !(content_ok && gcd_ok) {
                let assignment = self
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != keep)
                    .map(|(i, v)| (v.clone(), values[i].to_string()))
                    .collect();
                return Ok(SquarefreeCheck::Fail { kept_var: self.vars[keep].clone(), assignment });
            }
        }
        Ok(SquarefreeCheck::Pass)
    }
}

impl MPoly<FqtRing> {
    pub fn specialize_except(&self, keep: usize, values: &[FqPoly]) -> KPoly {
        debug_assert_eq!(values.len(), self.vars.len());
        let field = &self.ring.field;
        let mut coeffs = vec![FqPoly::zero(field); self.degree_in(keep) as usize + 1];
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if i == keep || e == 0 {
                    continue;
                }
                v = v.mul(&values[i].pow(e));
            }
            coeffs[m.0[keep] as usize] = coeffs[m.0[keep] as usize].add(&v);
        }
        KPoly::new(field, coeffs)
    }

    /// Function-field analogue of the randomized guard; specializations
    /// are random elements of `A` of degree <= 2.  When the specialized
    /// polynomial lies in `K[x^p]`, the x-derivative vanishes and the
    /// check falls back to gcd with the coefficient-wise t-derivative.
    pub fn heuristic_squarefree_check(&self, trials: u32, seed: u64) -> Result<SquarefreeCheck> {
        if self.is_zero() {
            return Err(Error::Domain("squarefreeness of the zero polynomial is undefined".into()));
        }
        if self.is_constant() {
            return Ok(SquarefreeCheck::VacuouslyConstantPass);
        }
        let field = &self.ring.field;
        let q = field.order();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let appearing: Vec<usize> =
            (0..self.vars.len()).filter(|&i| self.degree_in(i) > 0).collect();
        for trial in 0..trials {
            let keep = appearing[trial as usize % appearing.len()];
            let values: Vec<FqPoly> = (0..self.vars.len())
                .map(|_| {
                    let coeffs: Vec<u8> = (0..3).map(|_| rng.gen_range(0..q) as u8).collect();
                    FqPoly::from_coeffs(field, coeffs)
                })
                .collect();
            let uni = self.specialize_except(keep, &values);
            if uni.is_zero() {
                continue;
            }
            let content_ok = {
                let c = uni.content();
                c.is_unit() || c.is_squarefree_a().unwrap_or(false)
            };
            let gcd_ok = if uni.degree() == Some(0) {
                true
            } else {
                let dx = uni.x_derivative();
                let g = if dx.is_zero() { uni.gcd(&uni.t_derivative()) } else { uni.gcd(&dx) };
                g.degree() == Some(0)
            };
            if !(content_ok && gcd_ok) {
                let assignment = self
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != keep)
                    .map(|(i, v)| (v.clone(), values[i].render()))
                    .collect();
                return Ok(SquarefreeCheck::Fail { kept_var: self.vars[keep].clone(), assignment });
            }
        }
        Ok(SquarefreeCheck::Pass)
    }
}
