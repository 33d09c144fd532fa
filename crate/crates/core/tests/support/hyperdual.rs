//! Full four-dimensional Ricci tensor from hyper-dual numbers, which give
//! first and second partials to rounding error with no step size.
#![allow(dead_code)]

use std::ops::{Add, Div, Mul, Neg, Sub};

/// `a + b ε₁ + c ε₂ + d ε₁ε₂` with `ε₁² = ε₂² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperDual {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl HyperDual {
    pub fn constant(a: f64) -> Self {
        HyperDual { a, b: 0.0, c: 0.0, d: 0.0 }
    }

    /// Applies a scalar function given its value and first two derivatives.
    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        HyperDual { a: f, b: df * self.b, c: df * self.c, d: df * self.d + ddf * self.b * self.c }
    }

    fn sqrt(self) -> Self {
        let s = self.a.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.a))
    }

    fn recip(self) -> Self {
        let a = self.a;
        self.chain(1.0 / a, -1.0 / (a * a), 2.0 / (a * a * a))
    }

    fn powi(self, n: i32) -> Self {
        let a = self.a;
        let nf = n as f64;
        self.chain(a.powi(n), nf * a.powi(n - 1), nf * (nf - 1.0) * a.powi(n - 2))
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        HyperDual { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c, d: self.d + o.d }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        HyperDual { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        HyperDual {
            a: self.a * o.a,
            b: self.a * o.b + self.b * o.a,
            c: self.a * o.c + self.c * o.a,
            d: self.a * o.d + self.b * o.c + self.c * o.b + self.d * o.a,
        }
    }
}

impl Div for HyperDual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

pub fn diagonal(b: HyperDual, c: HyperDual) -> [[HyperDual; 4]; 4] {
    let zero = HyperDual::constant(0.0);
    let mut g = [[zero; 4]; 4];
    for i in 0..3 {
        g[i][i] = b;
    }
    g[3][3] = c;
    g
}

pub fn radius(x: [HyperDual; 4]) -> HyperDual {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Schwarzschild with `m = 1` in isotropic coordinates.
pub fn isotropic(x: [HyperDual; 4]) -> [[HyperDual; 4]; 4] {
    let one = HyperDual::constant(1.0);
    let half_m_over_r = HyperDual::constant(0.5) / radius(x);
    let b = (one + half_m_over_r).powi(4);
    let ratio = (one - half_m_over_r) / (one + half_m_over_r);
    diagonal(b, -(ratio * ratio))
}

pub fn conformally_bumped(x: [HyperDual; 4]) -> [[HyperDual; 4]; 4] {
    let r = radius(x);
    diagonal(HyperDual::constant(1.0) + r * r, HyperDual::constant(-1.0))
}

pub struct Jet {
    pub g: [[f64; 4]; 4],
    pub dg: [[[f64; 4]; 4]; 4],
    pub ddg: [[[[f64; 4]; 4]; 4]; 4],
}

pub fn metric_jet(metric: impl Fn([HyperDual; 4]) -> [[HyperDual; 4]; 4], p: [f64; 4]) -> Jet {
    let mut jet = Jet { g: [[0.0; 4]; 4], dg: [[[0.0; 4]; 4]; 4], ddg: [[[[0.0; 4]; 4]; 4]; 4] };
    for i in 0..4 {
        for j in 0..4 {
            let mut x = p.map(HyperDual::constant);
            x[i].b = 1.0;
            x[j].c = 1.0;
            let g = metric(x);
            for a in 0..4 {
                for b in 0..4 {
                    jet.g[a][b] = g[a][b].a;
                    jet.dg[i][a][b] = g[a][b].b;
                    jet.ddg[i][j][a][b] = g[a][b].d;
                }
            }
        }
    }
    jet
}

pub fn inverse(m: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut a = m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for k in 0..4 {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for row in 0..4 {
            if row != col {
                let f = a[row][col];
                for k in 0..4 {
                    a[row][k] -= f * a[col][k];
                    inv[row][k] -= f * inv[col][k];
                }
            }
        }
    }
    inv
}

/// `R_bc = ∂_a Γ^a_bc − ∂_c Γ^a_ba + Γ^a_ad Γ^d_bc − Γ^a_cd Γ^d_ba`.
pub fn ricci_oracle(jet: &Jet) -> [[f64; 4]; 4] {
    let gi = inverse(jet.g);
    let mut dgi = [[[0.0; 4]; 4]; 4];
    for e in 0..4 {
        for a in 0..4 {
            for d in 0..4 {
                let mut s = 0.0;
                for p in 0..4 {
                    for q in 0..4 {
                        s -= gi[a][p] * jet.dg[e][p][q] * gi[q][d];
                    }
                }
                dgi[e][a][d] = s;
            }
        }
    }
    let lower = |d: usize, b: usize, c: usize| 0.5 * (jet.dg[b][d][c] + jet.dg[c][d][b] - jet.dg[d][b][c]);
    let dlower = |e: usize, d: usize, b: usize, c: usize| {
        0.5 * (jet.ddg[e][b][d][c] + jet.ddg[e][c][d][b] - jet.ddg[e][d][b][c])
    };
    let mut gamma = [[[0.0; 4]; 4]; 4];
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                gamma[a][b][c] = (0..4).map(|d| gi[a][d] * lower(d, b, c)).sum();
                for e in 0..4 {
                    dgamma[e][a][b][c] =
                        (0..4).map(|d| dgi[e][a][d] * lower(d, b, c) + gi[a][d] * dlower(e, d, b, c)).sum();
                }
            }
        }
    }
    let mut r = [[0.0; 4]; 4];
    for b in 0..4 {
        for c in 0..4 {
            let mut s = 0.0;
            for a in 0..4 {
                s += dgamma[a][a][b][c] - dgamma[c][a][b][a];
                for d in 0..4 {
                    s += gamma[a][a][d] * gamma[d][b][c] - gamma[a][c][d] * gamma[d][b][a];
                }
            }
            r[b][c] = s;
        }
    }
    r
}
