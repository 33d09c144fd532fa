//! Arithmetic modulo the Mersenne prime 2^61 − 1, used only to bound gcd degrees.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{Poly, VarId};

pub(crate) const P: u64 = (1u64 << 61) - 1;

#[inline]
pub(crate) fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

#[inline]
fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn invmod(a: u64) -> u64 {
    powmod(a, P - 2)
}

pub(crate) fn reduce(c: &BigInt) -> u64 {
    c.mod_floor(&BigInt::from(P)).to_u64().expect("residue fits in u64")
}

/// Small deterministic generator (splitmix64) for evaluation points.
pub(crate) struct SplitMix(u64);

impl SplitMix {
    pub(crate) fn new(seed: u64) -> Self {
        SplitMix(seed)
    }

    pub(crate) fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) % P
    }
}

/// Image of `p` in `F_P[main]` after evaluating every other variable at `point`.
pub(crate) fn univariate_image(p: &Poly, main: VarId, point: &HashMap<VarId, u64>) -> Vec<u64> {
    let d = p.degree_in(main) as usize;
    let mut out = vec![0u64; d + 1];
    for (m, c) in p.terms() {
        let mut val = reduce(c);
        let mut e_main = 0;
        for (v, e) in m.iter() {
            if v == main {
                e_main = e as usize;
            } else {
                val = mulmod(val, powmod(point[&v], e as u64));
            }
        }
        out[e_main] = addmod(out[e_main], val);
    }
    out
}

fn trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

/// Degree of gcd(a, b) in `F_P[x]`; inputs are dense, lowest degree first.
pub(crate) fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 && b[0] == 0 {
            return a.len() - 1;
        }
        if b.len() == 1 {
            return 0;
        }
        // a <- a mod b
        let inv = invmod(*b.last().unwrap());
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let coef = mulmod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                a[i + shift] = submod(a[i + shift], mulmod(coef, bc));
            }
            a.pop();
            trim(&mut a);
            if a.is_empty() {
                a.push(0);
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}
