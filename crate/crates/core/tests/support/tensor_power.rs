//! Brute-force invariants in the full tensor power `(ℝⁿ)^{⊗k}`.
#![allow(dead_code)]

use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use symred_core::linalg::Matrix;

fn digits(mut idx: usize, n: usize, k: usize) -> Vec<usize> {
    let mut d = vec![0; k];
    for slot in d.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    d
}

fn index(d: &[usize], n: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * n + x)
}

/// Dimension of the symmetric tensors in `(ℝⁿ)^{⊗k}` killed by every
/// derivation and fixed by every group element.
pub fn brute_force(algebra: &[Matrix<Q>], group: &[Matrix<Q>], n: usize, k: usize) -> usize {
    let size = n.pow(k as u32);
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for x in algebra {
        let mut m = vec![vec![Q::zero(); size]; size];
        for col in 0..size {
            let d = digits(col, n, k);
            for slot in 0..k {
                for i in 0..n {
                    let c = &x[(i, d[slot])];
                    if c.is_zero() {
                        continue;
                    }
                    let mut e = d.clone();
                    e[slot] = i;
                    let row = index(&e, n);
                    m[row][col] = &m[row][col] + c;
                }
            }
        }
        rows.extend(m);
    }
    for s in group {
        let mut m = vec![vec![Q::zero(); size]; size];
        for col in 0..size {
            let d = digits(col, n, k);
            let mut acc: Vec<(Vec<usize>, Q)> = vec![(Vec::new(), Q::one())];
            for &j in &d {
                let mut next = Vec::new();
                for (pre, c) in &acc {
                    for i in 0..n {
                        if !s[(i, j)].is_zero() {
                            let mut p = pre.clone();
                            p.push(i);
                            next.push((p, c * &s[(i, j)]));
                        }
                    }
                }
                acc = next;
            }
            for (e, c) in acc {
                let row = index(&e, n);
                m[row][col] = &m[row][col] + c;
            }
            m[col][col] = &m[col][col] - Q::one();
        }
        rows.extend(m);
    }
    for slot in 0..k.saturating_sub(1) {
        let mut m = vec![vec![Q::zero(); size]; size];
        for col in 0..size {
            let mut e = digits(col, n, k);
            e.swap(slot, slot + 1);
            let swapped = index(&e, n);
            m[col][col] = &m[col][col] + Q::one();
            m[col][swapped] = &m[col][swapped] - Q::one();
        }
        rows.extend(m);
    }
    if rows.is_empty() {
        return size;
    }
    size - Matrix::from_rows(rows).rank()
}
