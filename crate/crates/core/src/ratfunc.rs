//! Canonical rational functions over ℚ modulo algebraic generator relations.
//!
//! A [`RatFunc`] is `num / den` with integer-coefficient polynomials such that
//!
//! * every generator occurs in `num` with degree ≤ 1 and not at all in `den`
//!   (denominators are rationalized by multiplying with the conjugate);
//! * `gcd(num, den) = 1` over ℤ, integer content included;
//! * the leading coefficient of `den` in the canonical graded-lex order is positive.
//!
//! Together these make the representation unique, so structural equality is
//! equality of the underlying functions.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::atom::{Atom, GeneratorData, Var};
use crate::error::{ExprError, ExprResult};
use crate::poly::{gcd, Monomial, Poly};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc { num: Poly::constant(BigInt::from(n)), den: Poly::one() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RatFunc { num: Poly::constant(n), den: Poly::one() }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        // BigRational is already reduced with a positive denominator.
        RatFunc { num: Poly::constant(q.numer().clone()), den: Poly::constant(q.denom().clone()) }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&BigRational::new(n.into(), d.into()))
    }

    pub fn var(v: Var) -> Self {
        RatFunc { num: Poly::var(v.id()), den: Poly::one() }
    }

    pub fn symbol(name: &str) -> Self {
        Self::var(Var::symbol(name))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: reduce_generators(p), den: Poly::one() }
    }

    /// Normalizes `num / den`.
    pub fn from_parts(num: Poly, den: Poly) -> ExprResult<Self> {
        normalize(num, den)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(BigRational::new(n, d))
    }

    /// Number of stored terms; used as a pivot-size heuristic.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    /// All atoms that occur, ordered by id.
    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.num.vars().into_iter().chain(self.den.vars()).map(Var::from_id).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn contains(&self, v: Var) -> bool {
        self.num.contains_var(v.id()) || self.den.contains_var(v.id())
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let n = self.num.add(&other.num);
            if self.den.is_one() {
                return RatFunc { num: n, den: Poly::one() };
            }
            return cancel(n, self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        if g.is_one() {
            let n = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            let d = self.den.mul(&other.den);
            return fix_sign(n, d);
        }
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = other.den.div_exact(&g).expect("gcd divides");
        let t = self.num.mul(&d2).add(&other.num.mul(&d1));
        if t.is_zero() {
            return RatFunc::zero();
        }
        let g2 = gcd(&t, &g);
        let num = t.div_exact(&g2).expect("gcd divides");
        let den = d1.mul(&other.den.div_exact(&g2).expect("gcd divides"));
        fix_sign(num, den)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc { num: reduce_generators(self.num.mul(&other.num)), den: Poly::one() };
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let raw = n1.mul(&n2);
        let den = d1.mul(&d2);
        if needs_reduction(&raw) {
            cancel(reduce_generators(raw), den)
        } else {
            fix_sign(raw, den)
        }
    }

    pub fn inv(&self) -> ExprResult<Self> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if generator_vars(&self.num).is_empty() {
            return Ok(fix_sign(self.den.clone(), self.num.clone()));
        }
        normalize(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Self) -> ExprResult<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i32) -> ExprResult<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        if base.den.is_one() && generator_vars(&base.num).is_empty() {
            return Ok(RatFunc { num: base.num.pow(e), den: Poly::one() });
        }
        if generator_vars(&base.num).is_empty() {
            // Coprime num/den stay coprime under powers.
            return Ok(fix_sign(base.num.pow(e), base.den.pow(e)));
        }
        let mut acc = RatFunc::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// Total derivative with respect to the plain symbol `s`, applying the
    /// chain rule through generators and function arguments.
    pub fn diff(&self, s: Var) -> ExprResult<Self> {
        if !s.is_plain_symbol() {
            return Err(ExprError::NotASymbol(s.name()));
        }
        let mut cache = HashMap::new();
        let dn = poly_derivative(&self.num, s, &mut cache)?;
        if self.den.is_one() {
            return Ok(dn);
        }
        let dd = poly_derivative(&self.den, s, &mut cache)?;
        if dd.is_zero() {
            return dn.checked_div(&RatFunc { num: self.den.clone(), den: Poly::one() });
        }
        let den = RatFunc { num: self.den.clone(), den: Poly::one() };
        dn.sub(&self.mul(&dd)).checked_div(&den)
    }

    /// Simultaneous substitution followed by normalization.
    ///
    /// Generators left unbound keep their identity when the substitution
    /// leaves their relation unchanged, and are replaced by their positive
    /// root when the relation becomes numeric with a rational root.
    pub fn substitute(&self, bindings: &HashMap<Var, RatFunc>) -> ExprResult<Self> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut map = bindings.clone();
        for v in self.vars() {
            if map.contains_key(&v) {
                continue;
            }
            match &*v.atom() {
                Atom::Function { name, args, .. } => {
                    for a in args {
                        if let Some(val) = map.get(a) {
                            if *val != RatFunc::var(*a) {
                                return Err(ExprError::FunctionArgument { func: name.clone(), arg: a.name() });
                            }
                        }
                    }
                }
                Atom::Generator { .. } => {
                    let data = v.generator_data().expect("generator data");
                    if data.deps().iter().any(|d| map.contains_key(d)) {
                        if let Some(val) = rebind_generator(v, &data, &map)? {
                            map.insert(v, val);
                        }
                    }
                }
                Atom::Symbol(_) => {}
            }
        }
        if map.values().all(|r| r.den.is_one()) {
            let pm: HashMap<_, Poly> = map.iter().map(|(k, v)| (k.id(), v.num.clone())).collect();
            return normalize(self.num.substitute(&pm), self.den.substitute(&pm));
        }
        let n = eval_poly_rational(&self.num, &map)?;
        let d = eval_poly_rational(&self.den, &map)?;
        n.checked_div(&d)
    }

    /// Evaluation in any [`Scalar`]; unbound generators take their positive root.
    pub fn eval<T: Scalar>(&self, env: &HashMap<Var, T>) -> ExprResult<T> {
        let mut values: HashMap<Var, T> = HashMap::new();
        for v in self.vars() {
            values.insert(v, atom_value(v, env)?);
        }
        let n = eval_poly(&self.num, &values);
        let d = eval_poly(&self.den, &values);
        if d.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(n / d)
    }

    /// Leading coefficient sign of the canonical order on the numerator.
    pub fn canonical_sign(&self) -> Ordering {
        if self.num.is_zero() {
            Ordering::Equal
        } else if canonical_lead(&self.num).1.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

/// Value of one atom; unbound generators evaluate to their positive root.
pub fn atom_value<T: Scalar>(v: Var, env: &HashMap<Var, T>) -> ExprResult<T> {
    if let Some(x) = env.get(&v) {
        return Ok(x.clone());
    }
    let Some(data) = v.generator_data() else {
        return Err(ExprError::Unbound(v.to_string()));
    };
    let mut dep_vals = HashMap::new();
    for d in data.deps() {
        dep_vals.insert(d, atom_value(d, env)?);
    }
    let b = eval_poly(&data.b, &dep_vals);
    let c = eval_poly(&data.c, &dep_vals);
    let two = T::one() + T::one();
    let four = two.clone() * two.clone();
    let disc = b.clone() * b.clone() - four * c;
    let root = disc.sqrt_checked().ok_or_else(|| ExprError::NoRoot(v.name()))?;
    Ok((root - b) / two)
}

fn eval_poly<T: Scalar>(p: &Poly, values: &HashMap<Var, T>) -> T {
    let mut acc = T::zero();
    for (m, c) in p.terms() {
        let mut t = T::from_bigint(c);
        for (v, e) in m.iter() {
            let x = &values[&Var::from_id(v)];
            for _ in 0..e {
                t = t * x.clone();
            }
        }
        acc = acc + t;
    }
    acc
}

fn eval_poly_rational(p: &Poly, map: &HashMap<Var, RatFunc>) -> ExprResult<RatFunc> {
    let mut pow_cache: HashMap<(Var, u32), RatFunc> = HashMap::new();
    let mut acc = RatFunc::zero();
    for (m, c) in p.terms() {
        let mut kept = Monomial::one();
        let mut t = RatFunc::from_bigint(c.clone());
        for (vid, e) in m.iter() {
            let v = Var::from_id(vid);
            match map.get(&v) {
                Some(val) => {
                    let power = match pow_cache.entry((v, e)) {
                        Entry::Occupied(o) => o.into_mut(),
                        Entry::Vacant(slot) => slot.insert(val.pow(e as i32)?),
                    };
                    t = t.mul(power);
                }
                None => kept = kept.mul(&Monomial::var(vid, e)),
            }
        }
        acc = acc.add(&t.mul(&RatFunc::from_poly(Poly::term(kept, BigInt::one()))));
    }
    Ok(acc)
}

/// Value for a generator whose relation inputs are being substituted, or
/// `None` if it should stay as is.
fn rebind_generator(v: Var, data: &GeneratorData, map: &HashMap<Var, RatFunc>) -> ExprResult<Option<RatFunc>> {
    let b0 = RatFunc::from_poly(data.b.clone());
    let c0 = RatFunc::from_poly(data.c.clone());
    let b1 = b0.substitute(map)?;
    let c1 = c0.substitute(map)?;
    if b1 == b0 && c1 == c0 {
        return Ok(None);
    }
    match (b1.as_rational(), c1.as_rational()) {
        (Some(b), Some(c)) => {
            let disc = &b * &b - BigRational::from_integer(4.into()) * c;
            let root = disc.sqrt_checked().ok_or_else(|| ExprError::NoRoot(v.name()))?;
            let val = (root - b) / BigRational::from_integer(2.into());
            Ok(Some(RatFunc::from_rational(&val)))
        }
        _ => Err(ExprError::RelationChanged(v.name())),
    }
}

/// d/ds of every atom, memoized per derivative call.
fn atom_derivative(v: Var, s: Var, cache: &mut HashMap<Var, Option<RatFunc>>) -> ExprResult<Option<RatFunc>> {
    if let Some(hit) = cache.get(&v) {
        return Ok(hit.clone());
    }
    let out = match &*v.atom() {
        Atom::Symbol(_) => (v == s).then(RatFunc::one),
        Atom::Generator { name, .. } => {
            let data = v.generator_data().expect("generator data");
            let rule = data.rules().and_then(|rs| rs.iter().find(|(w, _)| *w == s).map(|(_, r)| r.clone()));
            match rule {
                Some(r) => Some(r),
                None if data.deps().contains(&s) => {
                    return Err(ExprError::MissingRule { generator: name.clone(), symbol: s.name() })
                }
                None => None,
            }
        }
        Atom::Function { args, .. } => {
            let mut acc: Option<RatFunc> = None;
            for (k, a) in args.clone().into_iter().enumerate() {
                if let Some(da) = atom_derivative(a, s, cache)? {
                    let term = RatFunc::var(v.derivative(k).expect("function atom")).mul(&da);
                    acc = Some(match acc {
                        Some(x) => x.add(&term),
                        None => term,
                    });
                }
            }
            acc
        }
    };
    cache.insert(v, out.clone());
    Ok(out)
}

fn poly_derivative(p: &Poly, s: Var, cache: &mut HashMap<Var, Option<RatFunc>>) -> ExprResult<RatFunc> {
    let mut poly_part = Poly::zero();
    let mut rat_part = RatFunc::zero();
    for vid in p.vars() {
        let v = Var::from_id(vid);
        if let Some(dv) = atom_derivative(v, s, cache)? {
            let dp = p.partial(vid);
            if dv.den.is_one() {
                poly_part = poly_part.add(&dp.mul(&dv.num));
            } else {
                rat_part = rat_part.add(&RatFunc { num: dp, den: Poly::one() }.mul(&dv));
            }
        }
    }
    Ok(RatFunc::from_poly(poly_part).add(&rat_part))
}

fn generator_vars(p: &Poly) -> Vec<(Var, Arc<GeneratorData>)> {
    p.vars()
        .into_iter()
        .filter_map(|id| {
            let v = Var::from_id(id);
            v.generator_data().map(|d| (v, d))
        })
        .collect()
}

fn needs_reduction(p: &Poly) -> bool {
    generator_vars(p).iter().any(|(g, _)| p.degree_in(g.id()) >= 2)
}

/// Rewrites every generator power ≥ 2 using its relation.
fn reduce_generators(p: Poly) -> Poly {
    let mut p = p;
    for (g, data) in generator_vars(&p) {
        let gid = g.id();
        let deg = p.degree_in(gid);
        if deg < 2 {
            continue;
        }
        // g^e ≡ alpha_e + beta_e·g
        let mut alpha = vec![Poly::one()];
        let mut beta = vec![Poly::zero()];
        for e in 1..=deg as usize {
            let (a, b) = (&alpha[e - 1], &beta[e - 1]);
            // g·(a + b g) = a g + b(−b_rel g − c_rel)
            let na = b.mul(&data.c).neg();
            let nb = a.sub(&b.mul(&data.b));
            alpha.push(na);
            beta.push(nb);
        }
        let mut const_part = Poly::zero();
        let mut lin_part = Poly::zero();
        for (e, coeff) in p.coeffs_in(gid) {
            const_part = const_part.add(&coeff.mul(&alpha[e as usize]));
            lin_part = lin_part.add(&coeff.mul(&beta[e as usize]));
        }
        p = const_part.add(&lin_part.mul(&Poly::var(gid)));
    }
    p
}

fn normalize(num: Poly, den: Poly) -> ExprResult<RatFunc> {
    if den.is_zero() {
        return Err(ExprError::DivisionByZero);
    }
    if num.is_zero() {
        return Ok(RatFunc::zero());
    }
    let mut num = reduce_generators(num);
    let mut den = reduce_generators(den);
    loop {
        let gens = generator_vars(&den);
        let Some((g, data)) = gens.into_iter().next() else { break };
        let gid = g.id();
        let dense = den.dense_in(gid);
        let d0 = dense[0].clone();
        let d1 = dense.get(1).cloned().unwrap_or_else(Poly::zero);
        let conj = d0.sub(&data.b.mul(&d1)).sub(&d1.mul(&Poly::var(gid)));
        let norm = d0.mul(&d0).sub(&data.b.mul(&d0).mul(&d1)).add(&data.c.mul(&d1).mul(&d1));
        if norm.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        num = reduce_generators(num.mul(&conj));
        den = reduce_generators(norm);
    }
    if num.is_zero() {
        return Ok(RatFunc::zero());
    }
    Ok(cancel(num, den))
}

/// Divides out gcd(num, den) and fixes the sign. `den` must be generator-free.
fn cancel(num: Poly, den: Poly) -> RatFunc {
    if num.is_zero() {
        return RatFunc::zero();
    }
    if den.is_one() {
        return RatFunc { num, den };
    }
    let g = gcd(&num, &den);
    if g.is_one() {
        return fix_sign(num, den);
    }
    let n = num.div_exact(&g).expect("gcd divides");
    let d = den.div_exact(&g).expect("gcd divides");
    fix_sign(n, d)
}

fn fix_sign(num: Poly, den: Poly) -> RatFunc {
    if num.is_zero() {
        return RatFunc::zero();
    }
    let negative =
        if let Some(c) = den.constant_value() { c.is_negative() } else { canonical_lead(&den).1.is_negative() };
    if negative {
        RatFunc { num: num.neg(), den: den.neg() }
    } else {
        RatFunc { num, den }
    }
}

/// Canonical graded-lex comparison of two monomials given a ranking of the
/// variables (lower rank = more significant).
pub(crate) fn canonical_monomial_cmp(a: &Monomial, b: &Monomial, rank: &HashMap<u32, usize>) -> Ordering {
    let da = a.degree();
    let db = b.degree();
    if da != db {
        return da.cmp(&db);
    }
    let key = |m: &Monomial| {
        let mut k: Vec<(usize, u32)> = m.iter().map(|(v, e)| (rank[&v], e)).collect();
        k.sort_unstable();
        k
    };
    let (ka, kb) = (key(a), key(b));
    for i in 0.. {
        match (ka.get(i), kb.get(i)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(&(ra, ea)), Some(&(rb, eb))) => {
                if ra != rb {
                    return if ra < rb { Ordering::Greater } else { Ordering::Less };
                }
                if ea != eb {
                    return ea.cmp(&eb);
                }
            }
        }
    }
    unreachable!()
}

/// Ranks the variables of `p` by canonical atom order.
pub(crate) fn canonical_rank(vars: &[u32]) -> HashMap<u32, usize> {
    let mut vs: Vec<Var> = vars.iter().map(|&v| Var::from_id(v)).collect();
    vs.sort_by(|a, b| a.canonical_cmp(*b));
    vs.into_iter().enumerate().map(|(i, v)| (v.id(), i)).collect()
}

fn canonical_lead(p: &Poly) -> (&Monomial, &BigInt) {
    let rank = canonical_rank(&p.vars());
    let mut best = &p.terms()[0];
    for t in &p.terms()[1..] {
        if canonical_monomial_cmp(&t.0, &best.0, &rank) == Ordering::Greater {
            best = t;
        }
    }
    (&best.0, &best.1)
}

/// Integer content of the numerator over the denominator, as an exact rational.
pub fn rational_content(r: &RatFunc) -> BigRational {
    let n = r.num.content();
    let d = r.den.content();
    if n.is_zero() {
        return BigRational::zero();
    }
    BigRational::new(n, d)
}

/// Scales a vector of rational functions by a common factor so that entries
/// are polynomials with coprime content and the first nonzero entry has a
/// positive canonical leading coefficient.
pub fn primitive_vector(v: &[RatFunc]) -> Vec<RatFunc> {
    let nonzero: Vec<&RatFunc> = v.iter().filter(|r| !r.is_zero()).collect();
    if nonzero.is_empty() {
        return v.to_vec();
    }
    // lcm of denominators
    let mut l = Poly::one();
    for r in &nonzero {
        let g = gcd(&l, &r.den);
        l = l.mul(&r.den.div_exact(&g).expect("gcd divides"));
    }
    let scaled: Vec<Poly> = v
        .iter()
        .map(|r| if r.is_zero() { Poly::zero() } else { r.num.mul(&l.div_exact(&r.den).expect("den divides lcm")) })
        .collect();
    let g = crate::poly::gcd_many(&scaled);
    let mut out: Vec<Poly> = scaled.into_iter().map(|p| p.div_exact(&g).expect("gcd divides")).collect();
    let first = out.iter().find(|p| !p.is_zero()).expect("nonzero entry");
    if canonical_lead(first).1.is_negative() {
        out = out.into_iter().map(|p| p.neg()).collect();
    }
    out.into_iter().map(RatFunc::from_poly).collect()
}

impl From<i64> for RatFunc {
    fn from(n: i64) -> Self {
        RatFunc::from_int(n)
    }
}

impl From<Var> for RatFunc {
    fn from(v: Var) -> Self {
        RatFunc::var(v)
    }
}

impl std::ops::Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::add(self, rhs)
    }
}

impl std::ops::Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::sub(self, rhs)
    }
}

impl std::ops::Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::mul(self, rhs)
    }
}

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc::neg(self)
    }
}

impl std::ops::Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        RatFunc::add(&self, &rhs)
    }
}

impl std::ops::Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        RatFunc::sub(&self, &rhs)
    }
}

impl std::ops::Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        RatFunc::mul(&self, &rhs)
    }
}

impl std::ops::Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: &str) -> RatFunc {
        RatFunc::symbol(n)
    }

    #[test]
    fn gcd_cancellation() {
        let x = sym("x");
        let y = sym("y");
        let n = x.pow(3).unwrap().add(&x.pow(2).unwrap().mul(&y));
        let d = x.pow(2).unwrap().add(&x.mul(&y));
        assert_eq!(n.checked_div(&d).unwrap(), x);
    }

    #[test]
    fn sign_convention_on_denominator() {
        let x = sym("x");
        let y = sym("y");
        let a = RatFunc::one().checked_div(&y.sub(&x)).unwrap();
        let b = RatFunc::from_int(-1).checked_div(&x.sub(&y)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.canonical_sign(), Ordering::Less);
    }

    #[test]
    fn rationals_reduce() {
        let h = RatFunc::ratio(6, 4);
        assert_eq!(h, RatFunc::ratio(3, 2));
        assert_eq!(h.add(&RatFunc::ratio(1, 2)), RatFunc::from_int(2));
    }
}
