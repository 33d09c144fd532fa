//! Expression trees and their canonical printed form.
//!
//! An [`Expr`] is only a view: all algebra happens on [`RatFunc`], and
//! [`Expr::normalize`] rebuilds a canonical tree from the normal form. Printing
//! a normalized tree and parsing it back yields the same tree.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::atom::{Atom, Var};
use crate::error::{ExprError, ExprResult};
use crate::poly::{Monomial, Poly};
use crate::ratfunc::{atom_value, canonical_monomial_cmp, canonical_rank, RatFunc};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expr {
    Const(BigRational),
    /// Plain symbol or algebraic generator.
    Symbol(Var),
    /// Function atom with an all-zero multi-index.
    Apply(Var),
    /// Function atom with at least one derivative.
    Derivative(Var),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, i32),
}

/// How atoms are rendered.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub enum Style {
    /// `v(r,t)` and `D(v,r,t)`; this is the input grammar.
    #[default]
    Grammar,
    /// `v` and `v_rt`, used in text reports. Falls back to the grammar form
    /// when an argument name is longer than one character.
    Compact,
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(BigRational::from_integer(n.into()))
    }

    pub fn atom(v: Var) -> Expr {
        match &*v.atom() {
            Atom::Function { index, .. } if index.iter().any(|&c| c > 0) => Expr::Derivative(v),
            Atom::Function { .. } => Expr::Apply(v),
            _ => Expr::Symbol(v),
        }
    }

    pub fn to_ratfunc(&self) -> ExprResult<RatFunc> {
        Ok(match self {
            Expr::Const(q) => RatFunc::from_rational(q),
            Expr::Symbol(v) | Expr::Apply(v) | Expr::Derivative(v) => RatFunc::var(*v),
            Expr::Sum(xs) => {
                let mut acc = RatFunc::zero();
                for x in xs {
                    acc = acc.add(&x.to_ratfunc()?);
                }
                acc
            }
            Expr::Product(xs) => {
                let mut acc = RatFunc::one();
                for x in xs {
                    acc = acc.mul(&x.to_ratfunc()?);
                }
                acc
            }
            Expr::Power(b, e) => b.to_ratfunc()?.pow(*e)?,
        })
    }

    pub fn normalize(&self) -> ExprResult<Expr> {
        Ok(Expr::from_ratfunc(&self.to_ratfunc()?))
    }

    pub fn is_zero(&self) -> ExprResult<bool> {
        Ok(self.to_ratfunc()?.is_zero())
    }

    pub fn diff(&self, s: Var) -> ExprResult<Expr> {
        Ok(Expr::from_ratfunc(&self.to_ratfunc()?.diff(s)?))
    }

    pub fn substitute(&self, bindings: &HashMap<Var, Expr>) -> ExprResult<Expr> {
        let mut map = HashMap::with_capacity(bindings.len());
        for (k, v) in bindings {
            map.insert(*k, v.to_ratfunc()?);
        }
        Ok(Expr::from_ratfunc(&self.to_ratfunc()?.substitute(&map)?))
    }

    /// Direct evaluation of the tree, without normalizing first.
    pub fn eval<T: Scalar>(&self, env: &HashMap<Var, T>) -> ExprResult<T> {
        Ok(match self {
            Expr::Const(q) => T::from_rational(q),
            Expr::Symbol(v) | Expr::Apply(v) | Expr::Derivative(v) => atom_value(*v, env)?,
            Expr::Sum(xs) => {
                let mut acc = T::zero();
                for x in xs {
                    acc = acc + x.eval(env)?;
                }
                acc
            }
            Expr::Product(xs) => {
                let mut acc = T::one();
                for x in xs {
                    acc = acc * x.eval(env)?;
                }
                acc
            }
            Expr::Power(b, e) => {
                let base = b.eval(env)?;
                let mut acc = T::one();
                for _ in 0..e.unsigned_abs() {
                    acc = acc * base.clone();
                }
                if *e < 0 {
                    if acc.is_zero() {
                        return Err(ExprError::DivisionByZero);
                    }
                    acc = T::one() / acc;
                }
                acc
            }
        })
    }

    /// Canonical tree of a normal form.
    pub fn from_ratfunc(r: &RatFunc) -> Expr {
        if r.is_zero() {
            return Expr::int(0);
        }
        if let Some(e) = generator_layout(r) {
            return e;
        }
        sum_tree(quotient_terms(r.num(), r.den(), None))
    }

    pub fn display(&self, style: Style) -> String {
        let mut s = String::new();
        write_expr(&mut s, self, style);
        s
    }

    pub fn atoms(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Symbol(v) | Expr::Apply(v) | Expr::Derivative(v) => out.push(*v),
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
            Expr::Power(b, _) => b.collect_atoms(out),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(Style::Grammar))
    }
}

impl From<&RatFunc> for Expr {
    fn from(r: &RatFunc) -> Self {
        Expr::from_ratfunc(r)
    }
}

/// Prints a normal form directly.
pub fn print(r: &RatFunc, style: Style) -> String {
    Expr::from_ratfunc(r).display(style)
}

/// Terms of `num · g^e / den`. A monomial `den` is spread over the terms as
/// negative powers; otherwise the result is a single product.
fn quotient_terms(num: &Poly, den: &Poly, extra: Option<(Var, i32)>) -> Vec<Expr> {
    if den.is_monomial() {
        let (dm, dc) = &den.terms()[0];
        let mut vars: Vec<u32> = num.vars().into_iter().chain(den.vars()).collect();
        if let Some((g, _)) = extra {
            vars.push(g.id());
        }
        let rank = canonical_rank(&vars);
        return ordered_terms(num, &rank)
            .into_iter()
            .map(|(m, c)| {
                let coeff = BigRational::new(c.clone(), dc.clone());
                let mut exps: Vec<(Var, i32)> = m.iter().map(|(v, e)| (Var::from_id(v), e as i32)).collect();
                let shifts = dm.iter().map(|(v, e)| (Var::from_id(v), -(e as i32))).chain(extra);
                for (v, e) in shifts {
                    match exps.iter_mut().find(|(w, _)| *w == v) {
                        Some(slot) => slot.1 += e,
                        None => exps.push((v, e)),
                    }
                }
                exps.retain(|&(_, e)| e != 0);
                term_tree(coeff, exps)
            })
            .collect();
    }
    let mut factors = vec![poly_tree(num)];
    if let Some((g, e)) = extra {
        factors.push(Expr::Power(Box::new(Expr::atom(g)), e));
    }
    factors.push(Expr::Power(Box::new(poly_tree(den)), -1));
    vec![Expr::Product(factors)]
}

/// For `g² = P` with `P` dividing the denominator, writes each `g`-degree
/// part of the numerator over a power of `g`, e.g. `v_r*x^2/r + v` rather
/// than the rationalized quotient by `x^2 + y^2 + z^2`.
fn generator_layout(r: &RatFunc) -> Option<Expr> {
    let num = r.num();
    let den = r.den();
    if den.is_constant() {
        return None;
    }
    let mut gens: Vec<Var> = num.vars().into_iter().map(Var::from_id).filter(|v| v.is_generator()).collect();
    gens.sort_by(|a, b| a.canonical_cmp(*b));
    for g in gens {
        let data = g.generator_data()?;
        if !data.b.is_zero() {
            continue;
        }
        let p = data.c.neg();
        let mut rest = den.clone();
        let mut k = 0i32;
        while let Some(q) = rest.div_exact(&p) {
            rest = q;
            k += 1;
        }
        if k == 0 {
            continue;
        }
        let mut terms = Vec::new();
        for (e, part) in num.coeffs_in(g.id()) {
            let mut part = part;
            let mut j = 0i32;
            while j < k {
                match part.div_exact(&p) {
                    Some(q) => {
                        part = q;
                        j += 1;
                    }
                    None => break,
                }
            }
            let exp = e as i32 + 2 * (j - k);
            terms.extend(quotient_terms(&part, &rest, (exp != 0).then_some((g, exp))));
        }
        return Some(sum_tree(terms));
    }
    None
}

fn ordered_terms<'a>(p: &'a Poly, rank: &HashMap<u32, usize>) -> Vec<(&'a Monomial, &'a BigInt)> {
    let mut ts: Vec<(&Monomial, &BigInt)> = p.terms().iter().map(|(m, c)| (m, c)).collect();
    ts.sort_by(|a, b| canonical_monomial_cmp(b.0, a.0, rank));
    ts
}

fn poly_tree(p: &Poly) -> Expr {
    let rank = canonical_rank(&p.vars());
    let terms = ordered_terms(p, &rank)
        .into_iter()
        .map(|(m, c)| {
            let exps = m.iter().map(|(v, e)| (Var::from_id(v), e as i32)).collect();
            term_tree(BigRational::from_integer(c.clone()), exps)
        })
        .collect();
    sum_tree(terms)
}

fn sum_tree(mut terms: Vec<Expr>) -> Expr {
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        Expr::Sum(terms)
    }
}

fn term_tree(coeff: BigRational, mut exps: Vec<(Var, i32)>) -> Expr {
    exps.sort_by(|a, b| a.0.canonical_cmp(b.0));
    let mut factors = Vec::with_capacity(exps.len() + 1);
    if !coeff.is_one() || exps.is_empty() {
        factors.push(Expr::Const(coeff));
    }
    for (v, e) in exps {
        let a = Expr::atom(v);
        factors.push(if e == 1 { a } else { Expr::Power(Box::new(a), e) });
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Product(factors)
    }
}

fn write_atom(out: &mut String, v: Var, style: Style) {
    if style == Style::Compact {
        if let Atom::Function { name, args, index } = &*v.atom() {
            let names: Vec<String> = args.iter().map(|a| a.name()).collect();
            if names.iter().all(|n| n.chars().count() == 1) {
                out.push_str(name);
                if index.iter().any(|&c| c > 0) {
                    out.push('_');
                    for (k, &c) in index.iter().enumerate() {
                        for _ in 0..c {
                            out.push_str(&names[k]);
                        }
                    }
                }
                return;
            }
        }
    }
    out.push_str(&v.to_string());
}

/// Sign and magnitude view of one additive term.
fn split_sign(e: &Expr) -> (bool, Expr) {
    match e {
        Expr::Const(q) if q.is_negative() => (true, Expr::Const(-q)),
        Expr::Product(fs) => match fs.first() {
            Some(Expr::Const(q)) if q.is_negative() => {
                let mut rest = fs.clone();
                if (-q).is_one() && rest.len() > 1 {
                    rest.remove(0);
                } else {
                    rest[0] = Expr::Const(-q);
                }
                (true, if rest.len() == 1 { rest.pop().unwrap() } else { Expr::Product(rest) })
            }
            _ => (false, e.clone()),
        },
        _ => (false, e.clone()),
    }
}

fn write_expr(out: &mut String, e: &Expr, style: Style) {
    match e {
        Expr::Sum(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (neg, body) = split_sign(t);
                if i == 0 {
                    if neg {
                        write_leading_negation(out, &body, style);
                    } else {
                        write_term(out, &body, style);
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                    write_term(out, &body, style);
                }
            }
        }
        _ => {
            let (neg, body) = split_sign(e);
            if neg {
                write_leading_negation(out, &body, style);
            } else {
                write_term(out, &body, style);
            }
        }
    }
}

/// Unary minus binds tighter than `^` in the grammar, so `-x^2` would read
/// back as `(-x)^2`.
fn write_leading_negation(out: &mut String, body: &Expr, style: Style) {
    let mut s = String::new();
    write_term(&mut s, body, style);
    let factors = match body {
        Expr::Product(fs) => &fs[..],
        _ => std::slice::from_ref(body),
    };
    // The first factor that lands in the numerator is the one the minus touches.
    let first_is_power = factors
        .iter()
        .find(|f| match f {
            Expr::Const(q) => !q.numer().is_one(),
            Expr::Power(_, k) => *k > 0,
            _ => true,
        })
        .is_some_and(|f| matches!(f, Expr::Power(_, k) if *k > 1));
    if first_is_power {
        out.push_str("-1*");
    } else {
        out.push('-');
    }
    out.push_str(&s);
}

fn write_term(out: &mut String, e: &Expr, style: Style) {
    let factors: Vec<&Expr> = match e {
        Expr::Product(fs) => fs.iter().collect(),
        _ => vec![e],
    };
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for f in factors {
        match f {
            Expr::Const(q) => {
                if !q.numer().is_one() {
                    num.push(q.numer().to_string());
                }
                if !q.denom().is_one() {
                    den.push(q.denom().to_string());
                }
            }
            Expr::Power(b, k) if *k < 0 => den.push(power_string(b, -k, style)),
            _ => num.push(factor_string(f, style)),
        }
    }
    if num.is_empty() {
        num.push("1".into());
    }
    out.push_str(&num.join("*"));
    match den.len() {
        0 => {}
        1 => {
            out.push('/');
            out.push_str(&den[0]);
        }
        _ => {
            out.push_str("/(");
            out.push_str(&den.join("*"));
            out.push(')');
        }
    }
}

fn factor_string(e: &Expr, style: Style) -> String {
    match e {
        Expr::Power(b, k) => {
            if *k < 0 {
                format!("{}^{}", base_string(b, style), k)
            } else {
                power_string(b, *k, style)
            }
        }
        _ => base_string(e, style),
    }
}

fn power_string(b: &Expr, k: i32, style: Style) -> String {
    if k == 1 {
        base_string(b, style)
    } else {
        format!("{}^{}", base_string(b, style), k)
    }
}

fn base_string(e: &Expr, style: Style) -> String {
    let mut s = String::new();
    match e {
        Expr::Symbol(v) | Expr::Apply(v) | Expr::Derivative(v) => write_atom(&mut s, *v, style),
        Expr::Const(q) if !q.is_negative() && q.denom().is_one() => s.push_str(&q.numer().to_string()),
        _ => {
            s.push('(');
            write_expr(&mut s, e, style);
            s.push(')');
        }
    }
    s
}

/// Compares two normal forms by printed size, then text; used to pick
/// simple pivots deterministically.
pub fn complexity_cmp(a: &RatFunc, b: &RatFunc) -> Ordering {
    a.size().cmp(&b.size()).then_with(|| print(a, Style::Grammar).cmp(&print(b, Style::Grammar)))
}

/// Rational constant as a bare expression string.
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
