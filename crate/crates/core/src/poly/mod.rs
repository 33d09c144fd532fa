//! Sparse multivariate polynomials over ℤ.
//!
//! Terms are kept sorted in descending internal lex order (see [`Monomial`]);
//! no zero coefficients are stored. Everything above this layer (rational
//! functions, algebraic generators, printing) is built on [`Poly`].

mod gcd;
mod modp;
mod monomial;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use gcd::{gcd, gcd_many};
pub use monomial::{Monomial, VarId};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: Vec<(Monomial, BigInt)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn var(v: VarId) -> Self {
        Poly { terms: vec![(Monomial::var(v, 1), BigInt::one())] }
    }

    pub fn term(m: Monomial, c: BigInt) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from terms in any order, merging duplicates.
    pub fn from_terms(mut terms: Vec<(Monomial, BigInt)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, BigInt)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 += c;
                    continue;
                }
            }
            out.push((m, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, BigInt)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Leading term in the internal order. Panics on zero.
    pub fn lead(&self) -> (&Monomial, &BigInt) {
        let (m, c) = &self.terms[0];
        (m, c)
    }

    /// Sorted list of variables that occur.
    pub fn vars(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.terms.iter().flat_map(|(m, _)| m.iter().map(|(v, _)| v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(v) > 0)
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<(Monomial, BigInt)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    /// Multiplication by a single term keeps the order, so no re-sort is needed.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, cc)| (m.clone(), cc * c)).collect() }
    }

    /// Divides every coefficient by `c`, which must divide them exactly.
    pub fn div_int(&self, c: &BigInt) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, cc)| {
                    debug_assert!((cc % c).is_zero());
                    (m.clone(), cc / c)
                })
                .collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return Poly::term(m.pow(k), num_traits::pow(c.clone(), k as usize));
        }
        let mut base = self.clone();
        let mut acc = Poly::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Positive gcd of the integer coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, d: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.div(d).expect("monomial does not divide term"), c.clone()))
                .collect(),
        }
    }

    /// Flips the sign so that the internal leading coefficient is positive.
    pub fn abs_lead(self) -> Poly {
        if !self.is_zero() && self.terms[0].1.is_negative() {
            self.neg()
        } else {
            self
        }
    }

    /// Coefficients with respect to `v`, as `(exponent, coefficient)` with descending exponents.
    pub fn coeffs_in(&self, v: VarId) -> Vec<(u32, Poly)> {
        let mut buckets: HashMap<u32, Vec<(Monomial, BigInt)>> = HashMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let rest = if e > 0 { m.with_exp(v, 0) } else { m.clone() };
            buckets.entry(e).or_default().push((rest, c.clone()));
        }
        let mut out: Vec<(u32, Poly)> = buckets.into_iter().map(|(e, ts)| (e, Poly::from_terms(ts))).collect();
        out.sort_by_key(|t| std::cmp::Reverse(t.0));
        out
    }

    /// Dense coefficient vector in `v` (index = exponent).
    pub fn dense_in(&self, v: VarId) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (e, c) in self.coeffs_in(v) {
            out[e as usize] = c;
        }
        out
    }

    pub fn from_dense(v: VarId, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (e, c) in coeffs.iter().enumerate() {
            let vm = Monomial::var(v, e as u32);
            for (m, cc) in c.terms() {
                terms.push((m.mul(&vm), cc.clone()));
            }
        }
        Poly::from_terms(terms)
    }

    /// Formal partial derivative.
    pub fn partial(&self, v: VarId) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exp(v);
                (e > 0).then(|| (m.with_exp(v, e - 1), c * BigInt::from(e)))
            })
            .collect();
        Poly::from_terms(terms)
    }

    /// Replaces `v` by the polynomial `value`.
    pub fn substitute_var(&self, v: VarId, value: &Poly) -> Poly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let dense = self.dense_in(v);
        let mut acc = Poly::zero();
        for c in dense.iter().rev() {
            acc = acc.mul(value).add(c);
        }
        acc
    }

    /// Simultaneous substitution of several variables by polynomials.
    pub fn substitute(&self, map: &HashMap<VarId, Poly>) -> Poly {
        let mut pow_cache: HashMap<(VarId, u32), Poly> = HashMap::new();
        let mut acc: Vec<(Monomial, BigInt)> = Vec::new();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut factor = Poly::constant(c.clone());
            for (v, e) in m.iter() {
                match map.get(&v) {
                    Some(val) => {
                        let p = pow_cache.entry((v, e)).or_insert_with(|| val.pow(e));
                        factor = factor.mul(p);
                    }
                    None => kept = kept.mul(&Monomial::var(v, e)),
                }
            }
            for (fm, fc) in factor.into_terms() {
                acc.push((fm.mul(&kept), fc));
            }
        }
        Poly::from_terms(acc)
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.constant_value() {
            if self.terms.iter().all(|(_, cc)| (cc % &c).is_zero()) {
                return Some(self.div_int(&c));
            }
            return None;
        }
        if d.terms.len() == 1 {
            let (dm, dc) = d.lead();
            let mut out = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.push((m.div(dm)?, q));
            }
            return Some(Poly { terms: out });
        }
        for v in d.vars() {
            if d.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let (dm, dc) = d.lead();
        let mut r = self.clone();
        let mut q = Vec::new();
        while !r.is_zero() {
            let (rm, rc) = r.lead();
            let qm = rm.div(dm)?;
            let (qc, rem) = rc.div_rem(dc);
            if !rem.is_zero() {
                return None;
            }
            r = r.sub(&d.mul_term(&qm, &qc));
            q.push((qm, qc));
        }
        Some(Poly { terms: q })
    }

    /// Evaluates `v` at an integer, leaving other variables.
    pub fn eval_var(&self, v: VarId, x: &BigInt) -> Poly {
        self.substitute_var(v, &Poly::constant(x.clone()))
    }

    /// Largest absolute coefficient.
    pub fn max_norm(&self) -> BigInt {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or_else(BigInt::zero)
    }
}
