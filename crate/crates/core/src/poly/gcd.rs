//! Multivariate gcd over ℤ.
//!
//! Strategy: strip integer and monomial content, peel off variables present
//! in only one argument (the gcd must then divide every coefficient in those
//! variables), bound the gcd degree in each remaining variable from univariate
//! images mod p, and only fall back to a primitive pseudo-remainder sequence
//! when the gcd is genuinely nontrivial in every variable that is left.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::modp::{self, SplitMix};
use super::{Monomial, Poly, VarId};

/// Greatest common divisor, normalized to a positive internal leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone().abs_lead();
    }
    if b.is_zero() {
        return a.clone().abs_lead();
    }
    let ca = a.content();
    let cb = b.content();
    let c = ca.gcd(&cb);
    if a.is_constant() || b.is_constant() {
        return Poly::constant(c);
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let m = ma.gcd(&mb);
    let a1 = a.div_monomial(&ma).div_int(&ca);
    let b1 = b.div_monomial(&mb).div_int(&cb);
    let g = gcd_primitive(&a1, &b1).abs_lead();
    g.mul_term(&m, &c)
}

pub fn gcd_many(polys: &[Poly]) -> Poly {
    let mut sorted: Vec<&Poly> = polys.iter().filter(|p| !p.is_zero()).collect();
    sorted.sort_by_key(|p| p.len());
    let mut g = Poly::zero();
    for p in sorted {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Both inputs have unit integer content and no monomial content.
fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() || a.len() == 1 || b.len() == 1 {
        return Poly::one();
    }
    if a == b || *a == b.neg() {
        return a.clone();
    }
    let va = a.vars();
    let vb = b.vars();
    let only_a: Vec<VarId> = va.iter().copied().filter(|v| vb.binary_search(v).is_err()).collect();
    if !only_a.is_empty() {
        return gcd_against_coeffs(b, a, &only_a);
    }
    let only_b: Vec<VarId> = vb.iter().copied().filter(|v| va.binary_search(v).is_err()).collect();
    if !only_b.is_empty() {
        return gcd_against_coeffs(a, b, &only_b);
    }

    let bounds = degree_bounds(a, b, &va);
    if bounds.iter().all(|&(_, d)| d == 0) {
        return Poly::one();
    }
    let free: Vec<VarId> = bounds.iter().filter(|&&(_, d)| d == 0).map(|&(v, _)| v).collect();
    if !free.is_empty() {
        let mut coeffs = coefficients_in(a, &free);
        coeffs.extend(coefficients_in(b, &free));
        return gcd_many(&coeffs).abs_lead();
    }

    // Cheap divisibility probes before running a PRS.
    if bounds.iter().all(|&(v, d)| d == b.degree_in(v)) && a.div_exact(b).is_some() {
        return b.clone();
    }
    if bounds.iter().all(|&(v, d)| d == a.degree_in(v)) && b.div_exact(a).is_some() {
        return a.clone();
    }

    let main = bounds.iter().min_by_key(|&&(v, d)| (d, a.degree_in(v) + b.degree_in(v))).map(|&(v, _)| v).unwrap();
    prs_gcd(a, b, main)
}

/// gcd(a, b) where `b` is free of `vars`: the gcd divides every coefficient of `a`
/// with respect to those variables.
fn gcd_against_coeffs(b: &Poly, a: &Poly, vars: &[VarId]) -> Poly {
    let mut coeffs = coefficients_in(a, vars);
    coeffs.sort_by_key(|p| p.len());
    let mut g = b.clone();
    for c in &coeffs {
        g = gcd(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g.abs_lead()
}

/// Coefficients of `p` viewed as a polynomial in `vars` over the remaining variables.
fn coefficients_in(p: &Poly, vars: &[VarId]) -> Vec<Poly> {
    let mut buckets: HashMap<Monomial, Vec<(Monomial, BigInt)>> = HashMap::new();
    for (m, c) in p.terms() {
        let mut key = Monomial::one();
        let mut rest = Monomial::one();
        for (v, e) in m.iter() {
            if vars.contains(&v) {
                key = key.mul(&Monomial::var(v, e));
            } else {
                rest = rest.mul(&Monomial::var(v, e));
            }
        }
        buckets.entry(key).or_default().push((rest, c.clone()));
    }
    buckets.into_values().map(Poly::from_terms).collect()
}

/// Upper bound on deg_v gcd(a, b) for every v, from images in F_p[v].
/// The bound is rigorous whenever the leading coefficients survive evaluation.
fn degree_bounds(a: &Poly, b: &Poly, vars: &[VarId]) -> Vec<(VarId, u32)> {
    let mut rng = SplitMix::new(0x5eed ^ (a.len() as u64) << 20 ^ b.len() as u64);
    let mut out = Vec::with_capacity(vars.len());
    for &v in vars {
        let da = a.degree_in(v);
        let db = b.degree_in(v);
        let lca = a.coeffs_in(v).into_iter().next().unwrap().1;
        let lcb = b.coeffs_in(v).into_iter().next().unwrap().1;
        let mut best = da.min(db);
        for _attempt in 0..4 {
            let point: HashMap<VarId, u64> = vars.iter().map(|&w| (w, rng.next())).collect();
            let la = modp::univariate_image(&lca, v, &point);
            let lb = modp::univariate_image(&lcb, v, &point);
            if la[0] == 0 || lb[0] == 0 {
                continue;
            }
            let ia = modp::univariate_image(a, v, &point);
            let ib = modp::univariate_image(b, v, &point);
            let d = modp::gcd_degree(ia, ib) as u32;
            best = best.min(d);
            break;
        }
        out.push((v, best));
    }
    out
}

/// Content of `p` as a polynomial in `x`.
fn content_in(p: &Poly, x: VarId) -> Poly {
    let coeffs: Vec<Poly> = p.coeffs_in(x).into_iter().map(|(_, c)| c).collect();
    gcd_many(&coeffs)
}

fn primitive_in(p: &Poly, x: VarId) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let c = content_in(p, x);
    p.div_exact(&c).expect("content divides")
}

/// Pseudo-remainder of `f` by `g` in `x`.
fn prem(f: &Poly, g: &Poly, x: VarId) -> Poly {
    let dg = g.degree_in(x);
    let lc_g = g.coeffs_in(x).into_iter().next().unwrap().1;
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(x) >= dg {
        let dr = r.degree_in(x);
        let lc_r = r.coeffs_in(x).into_iter().next().unwrap().1;
        let shift = Poly::term(Monomial::var(x, dr - dg), BigInt::one());
        r = r.mul(&lc_g).sub(&lc_r.mul(&shift).mul(g));
    }
    r
}

fn prs_gcd(a: &Poly, b: &Poly, x: VarId) -> Poly {
    let ca = content_in(a, x);
    let cb = content_in(b, x);
    let c = gcd(&ca, &cb);
    let mut f = a.div_exact(&ca).expect("content divides");
    let mut g = b.div_exact(&cb).expect("content divides");
    if f.degree_in(x) < g.degree_in(x) {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_zero() {
        if g.degree_in(x) == 0 {
            f = Poly::one();
            break;
        }
        let r = prem(&f, &g, x);
        f = g;
        g = primitive_in(&r, x);
    }
    let f = primitive_in(&f, x);
    let out = f.mul(&c);
    let ic = out.content();
    if ic.is_zero() || ic.is_one() {
        out.abs_lead()
    } else {
        out.div_int(&ic).abs_lead()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: VarId) -> Poly {
        Poly::var(i)
    }
    fn k(c: i64) -> Poly {
        Poly::constant(BigInt::from(c))
    }

    #[test]
    fn common_factor_recovered() {
        let x = v(0);
        let y = v(1);
        let z = v(2);
        let common = x.pow(2).add(&y.pow(2)).add(&z.pow(2));
        let a = common.mul(&x.add(&k(1))).mul(&y);
        let b = common.mul(&x.sub(&z)).scale(&BigInt::from(6));
        assert_eq!(gcd(&a, &b), common);
    }

    #[test]
    fn coprime_and_content() {
        let x = v(0);
        let y = v(1);
        let a = x.add(&y).scale(&BigInt::from(4));
        let b = x.sub(&y).scale(&BigInt::from(6));
        assert_eq!(gcd(&a, &b), k(2));
        let c = x.pow(3).mul(&y);
        let d = x.pow(2).mul(&y.pow(2)).scale(&BigInt::from(3));
        assert_eq!(gcd(&c, &d), x.pow(2).mul(&y));
    }

    #[test]
    fn cancellation_example() {
        // (x^3 + x^2 y) and (x^2 + x y) share x^2 + x y
        let x = v(0);
        let y = v(1);
        let a = x.pow(3).add(&x.pow(2).mul(&y));
        let b = x.pow(2).add(&x.mul(&y));
        assert_eq!(gcd(&a, &b), b);
    }

    #[test]
    fn nontrivial_in_every_variable() {
        let x = v(0);
        let y = v(1);
        let g = x.mul(&y).add(&k(1)).add(&x.pow(2));
        let a = g.mul(&x.add(&y.pow(2)));
        let b = g.mul(&x.sub(&y).add(&k(3)));
        assert_eq!(gcd(&a, &b), g.abs_lead());
    }
}
