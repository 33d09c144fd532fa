//! Built-in differential operators and the Ricci recipe.

use std::collections::HashMap;

use crate::atom::Var;
use crate::error::{Error, Result};
use crate::geometry::{block_diag, jacobian, sym2_pairs, FiberBlock, Tensor};
use crate::jets::{JetSpace, ProlongedGenerator};
use crate::linalg::{Field, Matrix};
use crate::ratfunc::RatFunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recipe {
    /// `R_ij` of the symmetric 2-tensor fiber.
    Ricci,
}

#[derive(Clone, Debug)]
pub enum OperatorKind {
    /// Components in jet coordinates.
    Explicit(Vec<RatFunc>),
    Procedural(Recipe),
}

/// A section of `D → J^k(E)` together with how the group acts on `D`.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    pub name: String,
    pub order: usize,
    pub kind: OperatorKind,
    pub target: Vec<FiberBlock>,
}

impl OperatorSpec {
    pub fn dim(&self) -> usize {
        self.target.iter().map(|b| b.dim()).sum()
    }

    pub fn explicit(name: &str, order: usize, components: Vec<RatFunc>, target: Vec<FiberBlock>) -> Result<Self> {
        let spec = OperatorSpec { name: name.into(), order, kind: OperatorKind::Explicit(components), target };
        if let OperatorKind::Explicit(c) = &spec.kind {
            if c.len() != spec.dim() {
                return Err(Error::Invalid(format!(
                    "operator has {} components but its target representation has dimension {}",
                    c.len(),
                    spec.dim()
                )));
            }
        }
        Ok(spec)
    }
}

/// `Δ^i = u^i_t + u^i_j u^j + p_i` and `Δ^{n+1} = u^j_j`.
/// The base is `(x_1..x_n, t)` and the fiber `(u_1..u_n, p)`.
pub fn euler_operator(base: &[Var], fiber: &[Var]) -> Result<OperatorSpec> {
    let n =
        base.len().checked_sub(1).filter(|&n| n >= 1 && fiber.len() == n + 1).ok_or_else(|| {
            Error::Invalid("the Euler operator needs base (x_1..x_n, t) and fiber (u_1..u_n, p)".into())
        })?;
    let jets = JetSpace::new(base.to_vec(), fiber.to_vec(), 1);
    let d = |a: usize, i: usize| RatFunc::var(jets.coordinate(a, &[i]));
    let mut comps = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut c = d(i, n).add(&d(n, i));
        for j in 0..n {
            c = c.add(&d(i, j).mul(&RatFunc::var(fiber[j])));
        }
        comps.push(c);
    }
    comps.push((0..n).fold(RatFunc::zero(), |acc, j| acc.add(&d(j, j))));
    let target = vec![FiberBlock::new(Tensor::Vector, (0..n).collect()), FiberBlock::new(Tensor::Scalar, Vec::new())];
    OperatorSpec::explicit("euler", 1, comps, target)
}

/// `Δu = Σ u_ii` over every base coordinate.
pub fn laplacian_operator(base: &[Var], fiber: &[Var]) -> Result<OperatorSpec> {
    if fiber.len() != 1 {
        return Err(Error::Invalid("the Laplacian needs a one-dimensional fiber".into()));
    }
    let jets = JetSpace::new(base.to_vec(), fiber.to_vec(), 2);
    let c = (0..base.len()).fold(RatFunc::zero(), |acc, i| acc.add(&RatFunc::var(jets.coordinate(0, &[i, i]))));
    OperatorSpec::explicit("laplacian", 2, vec![c], vec![FiberBlock::new(Tensor::Scalar, Vec::new())])
}

/// Ricci operator on a fiber of symmetric 2-tensors over the whole base.
pub fn ricci_operator(base: &[Var], fiber: &[Var]) -> Result<OperatorSpec> {
    let n = base.len();
    if fiber.len() != n * (n + 1) / 2 {
        return Err(Error::Invalid(format!("the Ricci operator needs {} metric components", n * (n + 1) / 2)));
    }
    Ok(OperatorSpec {
        name: "ricci".into(),
        order: 2,
        kind: OperatorKind::Procedural(Recipe::Ricci),
        target: vec![FiberBlock::new(Tensor::Sym2Covector, (0..n).collect())],
    })
}

/// Ricci tensor from a metric and its first and second partials
/// (`dg[k] = ∂_k g`, `ddg[k][l] = ∂_k ∂_l g`).
///
/// `R_ij = ∂_k Γ^k_ij − ∂_i Γ^k_kj + Γ^k_kl Γ^l_ij − Γ^k_il Γ^l_kj`.
pub fn ricci<F: Field>(g: &Matrix<F>, dg: &[Matrix<F>], ddg: &[Vec<Matrix<F>>]) -> Result<Matrix<F>> {
    let n = g.rows();
    let det = g.determinant();
    if det.is_zero() {
        return Err(Error::DegenerateMetric);
    }
    let ginv = g.adjugate().scale(&F::one().over(&det));
    let half = F::one().over(&F::from_i64(2));
    // Γ_{l,ij} and its partials
    let lower = |l: usize, i: usize, j: usize| dg[i][(j, l)].plus(&dg[j][(i, l)]).minus(&dg[l][(i, j)]).times(&half);
    let dlower = |k: usize, l: usize, i: usize, j: usize| {
        ddg[k][i][(j, l)].plus(&ddg[k][j][(i, l)]).minus(&ddg[k][l][(i, j)]).times(&half)
    };
    let low: Vec<Vec<Vec<F>>> =
        (0..n).map(|l| (0..n).map(|i| (0..n).map(|j| lower(l, i, j)).collect()).collect()).collect();
    let mut gamma = vec![vec![vec![F::zero(); n]; n]; n];
    for a in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = F::zero();
                for l in 0..n {
                    if !ginv[(a, l)].is_zero() && !low[l][i][j].is_zero() {
                        s = s.plus(&ginv[(a, l)].times(&low[l][i][j]));
                    }
                }
                gamma[a][j][i] = s.clone();
                gamma[a][i][j] = s;
            }
        }
    }
    // ∂_k g^{al} = −(g^{-1} ∂_k g g^{-1})^{al}
    let dginv: Vec<Matrix<F>> = dg.iter().map(|d| ginv.mul(d).mul(&ginv).scale(&F::one().negate())).collect();
    // ∂_k Γ^a_ij for the two contractions the formula needs
    let dgamma = |k: usize, a: usize, i: usize, j: usize| {
        let mut s = F::zero();
        for l in 0..n {
            if !dginv[k][(a, l)].is_zero() && !low[l][i][j].is_zero() {
                s = s.plus(&dginv[k][(a, l)].times(&low[l][i][j]));
            }
            if !ginv[(a, l)].is_zero() {
                let d = dlower(k, l, i, j);
                if !d.is_zero() {
                    s = s.plus(&ginv[(a, l)].times(&d));
                }
            }
        }
        s
    };
    let trace: Vec<F> = (0..n).map(|l| (0..n).fold(F::zero(), |acc, k| acc.plus(&gamma[k][k][l]))).collect();
    let mut r = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = F::zero();
            for k in 0..n {
                s = s.plus(&dgamma(k, k, i, j)).minus(&dgamma(i, k, k, j));
            }
            for l in 0..n {
                if !trace[l].is_zero() && !gamma[l][i][j].is_zero() {
                    s = s.plus(&trace[l].times(&gamma[l][i][j]));
                }
            }
            for k in 0..n {
                for l in 0..n {
                    if !gamma[k][i][l].is_zero() && !gamma[l][k][j].is_zero() {
                        s = s.minus(&gamma[k][i][l].times(&gamma[l][k][j]));
                    }
                }
            }
            r[(j, i)] = s.clone();
            r[(i, j)] = s;
        }
    }
    Ok(r)
}

/// Packs a symmetric matrix as its upper triangle.
pub fn pack<F: Field>(m: &Matrix<F>) -> Vec<F> {
    sym2_pairs(m.rows()).into_iter().map(|(i, j)| m[(i, j)].clone()).collect()
}

pub fn unpack<F: Field>(n: usize, packed: &[F]) -> Matrix<F> {
    let mut m = Matrix::zeros(n, n);
    for ((i, j), v) in sym2_pairs(n).into_iter().zip(packed) {
        m[(i, j)] = v.clone();
        m[(j, i)] = v.clone();
    }
    m
}

/// Infinitesimal action of a generator on the target fiber, as a matrix in
/// base coordinates.
pub fn target_matrix(op: &OperatorSpec, xi: &[RatFunc], base: &[Var]) -> Result<Matrix<RatFunc>> {
    let j = jacobian(xi, base)?;
    Ok(block_diag(op.target.iter().map(|b| b.infinitesimal(&j)).collect()))
}

/// `pr X(Δ) − L Δ` for an explicit operator; zero iff `Δ` is equivariant
/// under the generator.
pub fn equivariance_defects(op: &OperatorSpec, g: &ProlongedGenerator, jets: &JetSpace) -> Result<Vec<RatFunc>> {
    let OperatorKind::Explicit(comps) = &op.kind else {
        return Err(Error::Unsupported("equivariance check of a procedural operator".into()));
    };
    let l = target_matrix(op, &g.xi, &jets.base)?;
    let ld = l.mul_vec(comps);
    comps.iter().zip(&ld).map(|(c, lc)| Ok(g.apply(jets, c)?.sub(lc))).collect()
}

/// Evaluates an explicit operator on numeric jet values.
pub fn eval_explicit<T: crate::scalar::Scalar>(comps: &[RatFunc], env: &HashMap<Var, T>) -> Result<Vec<T>> {
    comps.iter().map(|c| Ok(c.eval(env)?)).collect()
}
