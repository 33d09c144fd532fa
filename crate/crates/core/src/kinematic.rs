//! Fixed-point spaces of isotropy representations: the kinematic bundle,
//! its jet-level analogue on symmetric powers, and fixed points on
//! constrained (nonlinear) fibers.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::atom::Var;
use crate::error::{Error, Result};
use crate::geometry::{
    block_diag, isotropy_subalgebra, linear_isotropy_rep, Action, Bundle, DiscreteFiber, FiberBlock, Point,
    QuotientChart,
};
use crate::linalg::Matrix;
use crate::ratfunc::{primitive_vector, RatFunc};
use crate::scalar::Scalar;

/// Isotropy representation on one fiber.
#[derive(Clone, Debug)]
pub struct FiberRep {
    pub dim: usize,
    /// One matrix per isotropy basis vector.
    pub infinitesimal: Vec<Matrix<RatFunc>>,
    /// One matrix per discrete generator fixing the point.
    pub discrete: Vec<Matrix<RatFunc>>,
    /// Isotropy coefficient vectors the infinitesimal matrices came from.
    pub isotropy: Vec<Vec<RatFunc>>,
}

impl FiberRep {
    /// Isotropy representation of `action` on the fiber of `bundle` at `point`.
    pub fn at_point(action: &Action, bundle: &Bundle, point: &Point, with_discrete: bool) -> Result<Self> {
        let isotropy = isotropy_subalgebra(&action.generators, &bundle.base, point)?;
        let mut per_gen = Vec::with_capacity(action.generators.len());
        for a in 0..action.generators.len() {
            let used = isotropy.iter().any(|c| !c[a].is_zero());
            per_gen.push(if used { Some(action.fiber_matrix(a, bundle, point)?) } else { None });
        }
        let m = bundle.fiber.len();
        let infinitesimal = isotropy
            .iter()
            .map(|c| {
                let mut l = Matrix::zeros(m, m);
                for (ca, la) in c.iter().zip(&per_gen) {
                    if let Some(la) = la {
                        if !ca.is_zero() {
                            l = l.add(&la.scale(ca));
                        }
                    }
                }
                l
            })
            .collect();
        let discrete = if with_discrete { action.discrete_at(bundle, point)? } else { Vec::new() };
        Ok(FiberRep { dim: m, infinitesimal, discrete, isotropy })
    }

    /// Isotropy representation on a tensor bundle given only by its blocks,
    /// e.g. the target of an operator.
    pub fn from_blocks(
        blocks: &[FiberBlock],
        action: &Action,
        base: &[Var],
        point: &Point,
        with_discrete: bool,
    ) -> Result<Self> {
        let isotropy = isotropy_subalgebra(&action.generators, base, point)?;
        let dim: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut infinitesimal = Vec::with_capacity(isotropy.len());
        for c in &isotropy {
            let j = linear_isotropy_rep(&action.generators, c, base, point)?;
            infinitesimal.push(block_diag(blocks.iter().map(|b| b.infinitesimal(&j)).collect()));
        }
        let discrete = if with_discrete {
            let fiber: Vec<Var> = (0..dim).map(|k| Var::symbol(&format!("_w{}", k + 1))).collect();
            let shadow = Bundle::new(base.to_vec(), fiber).with_blocks(blocks.to_vec())?;
            let tensor_action = Action {
                generators: Vec::new(),
                discrete: action
                    .discrete
                    .iter()
                    .map(|d| {
                        let mut d = d.clone();
                        d.fiber = DiscreteFiber::Tensor;
                        d
                    })
                    .collect(),
            };
            tensor_action.discrete_at(&shadow, point)?
        } else {
            Vec::new()
        };
        Ok(FiberRep { dim, infinitesimal, discrete, isotropy })
    }

    /// Stacked fixed-point conditions `[L_a; S_b − I]`.
    pub fn conditions(&self) -> Matrix<RatFunc> {
        let id = Matrix::identity(self.dim);
        let mut blocks: Vec<Matrix<RatFunc>> = self.infinitesimal.clone();
        blocks.extend(self.discrete.iter().map(|s| s.sub(&id)));
        if blocks.is_empty() {
            return Matrix::zeros(0, self.dim);
        }
        Matrix::vstack(&blocks)
    }

    pub fn fixes(&self, e: &[RatFunc]) -> bool {
        self.conditions().mul_vec(e).iter().all(|x| x.is_zero())
    }
}

/// Basis of `∩ ker L_a ∩ ∩ ker(S_b − I)`, each vector primitive.
pub fn fixed_space(rep: &FiberRep) -> Vec<Vec<RatFunc>> {
    let c = rep.conditions();
    if c.rows() == 0 {
        return (0..rep.dim)
            .map(|i| (0..rep.dim).map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() }).collect())
            .collect();
    }
    c.kernel().iter().map(|v| primitive_vector(v)).collect()
}

/// Accepts `candidate` as a basis of the fixed space if it is fixed,
/// independent, and of the right size.
pub fn check_basis(rep: &FiberRep, candidate: &[Vec<RatFunc>]) -> Result<()> {
    for (k, e) in candidate.iter().enumerate() {
        if e.len() != rep.dim {
            return Err(Error::Invalid(format!("basis vector {} has length {}, expected {}", k + 1, e.len(), rep.dim)));
        }
        if !rep.fixes(e) {
            return Err(Error::Invalid(format!("basis vector {} is not fixed by the isotropy", k + 1)));
        }
    }
    let dim = fixed_space(rep).len();
    let rank = if candidate.is_empty() { 0 } else { Matrix::from_rows(candidate.to_vec()).rank() };
    if rank != candidate.len() || rank != dim {
        return Err(Error::Invalid(format!(
            "supplied basis has {} vectors of rank {rank}, but the fixed space has dimension {dim}",
            candidate.len()
        )));
    }
    Ok(())
}

/// Basis sections of κ(E) with names for the new fiber coordinates.
#[derive(Clone, Debug)]
pub struct KinematicBasis {
    pub vectors: Vec<Vec<RatFunc>>,
    pub names: Vec<String>,
}

impl KinematicBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Builds the basis from the fixed space, using `hint` when given.
    pub fn new(rep: &FiberRep, names: Vec<String>, hint: Option<Vec<Vec<RatFunc>>>) -> Result<Self> {
        let vectors = match hint {
            Some(h) => {
                check_basis(rep, &h)?;
                h
            }
            None => fixed_space(rep),
        };
        if names.len() != vectors.len() {
            return Err(Error::Invalid(format!(
                "{} kinematic names given for a fixed space of dimension {}",
                names.len(),
                vectors.len()
            )));
        }
        Ok(KinematicBasis { vectors, names })
    }

    /// `u^α = Σ v_k e_k^α` for the given coefficients.
    pub fn combine(&self, coeffs: &[RatFunc]) -> Vec<RatFunc> {
        let m = self.vectors.first().map_or(0, |v| v.len());
        (0..m)
            .map(|a| {
                self.vectors.iter().zip(coeffs).fold(RatFunc::zero(), |acc, (e, c)| {
                    if e[a].is_zero() {
                        acc
                    } else {
                        acc.add(&e[a].mul(c))
                    }
                })
            })
            .collect()
    }
}

/// Coordinate description of the kinematic reduction diagram.
#[derive(Clone, Debug)]
pub struct KinematicDiagram {
    /// `(quotient coords, kinematic fiber names)`: the κ(E)/G corner.
    pub quotient_corner: (Vec<String>, Vec<String>),
    /// `(base coords, kinematic fiber names)`: the κ(E) corner.
    pub kinematic_corner: (Vec<String>, Vec<String>),
    /// `(base coords, fiber coords)`: the E corner.
    pub bundle_corner: (Vec<String>, Vec<String>),
    /// ι: fiber coordinate ↦ expression in base coords and kinematic names.
    pub inclusion: Vec<(String, RatFunc)>,
    /// q: quotient coordinate ↦ defining invariant.
    pub projection: Vec<(String, RatFunc)>,
    /// κ(E) = E, with ι the identity.
    pub full_fiber: bool,
}

pub fn assemble_kinematic_diagram(bundle: &Bundle, basis: &KinematicBasis, chart: &QuotientChart) -> KinematicDiagram {
    let base: Vec<String> = bundle.base.iter().map(|v| v.name()).collect();
    let fiber: Vec<String> = bundle.fiber.iter().map(|v| v.name()).collect();
    let coeffs: Vec<RatFunc> = basis.names.iter().map(|n| RatFunc::symbol(n)).collect();
    let image = basis.combine(&coeffs);
    let full_fiber = basis.dim() == bundle.fiber.len();
    KinematicDiagram {
        quotient_corner: (chart.names.clone(), basis.names.clone()),
        kinematic_corner: (base.clone(), basis.names.clone()),
        bundle_corner: (base, fiber.clone()),
        inclusion: fiber.into_iter().zip(image).collect(),
        projection: chart.names.iter().cloned().zip(chart.invariants.iter().cloned()).collect(),
        full_fiber,
    }
}

/// Fixed points of the isotropy on a fiber cut out by `constraints`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstrainedFixedPoints {
    Empty,
    /// Finitely many points, in fiber coordinates.
    Points(Vec<Vec<RatFunc>>),
    /// `u = Σ s_i e_i` subject to `equations` in the parameters `s_i`.
    Variety {
        basis: Vec<Vec<RatFunc>>,
        params: Vec<Var>,
        equations: Vec<RatFunc>,
    },
}

/// Intersects the linear fixed space with the constraint variety.
/// Handles a point, a line meeting quadrics in rational points, and leaves
/// higher-dimensional intersections as a parameterized description.
pub fn fixed_points_constrained(
    rep: &FiberRep,
    fiber: &[Var],
    constraints: &[RatFunc],
) -> Result<ConstrainedFixedPoints> {
    let basis = fixed_space(rep);
    let d = basis.len();
    let params: Vec<Var> = (0..d).map(|i| Var::symbol(&format!("_s{}", i + 1))).collect();
    let coeffs: Vec<RatFunc> = params.iter().map(|&p| RatFunc::var(p)).collect();
    let point: Vec<RatFunc> = (0..fiber.len())
        .map(|a| basis.iter().zip(&coeffs).fold(RatFunc::zero(), |acc, (e, c)| acc.add(&e[a].mul(c))))
        .collect();
    let on_space: HashMap<Var, RatFunc> = fiber.iter().copied().zip(point.iter().cloned()).collect();
    let equations: Vec<RatFunc> = constraints
        .iter()
        .map(|c| c.substitute(&on_space))
        .collect::<std::result::Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|e| !e.is_zero())
        .collect();
    match d {
        0 => Ok(if equations.is_empty() {
            ConstrainedFixedPoints::Points(vec![point])
        } else {
            ConstrainedFixedPoints::Empty
        }),
        1 if !equations.is_empty() => {
            let s = params[0];
            let mut roots: Option<Vec<BigRational>> = None;
            for eq in &equations {
                let r = rational_roots(eq, s)?;
                roots = Some(match roots {
                    None => r,
                    Some(prev) => prev.into_iter().filter(|x| r.contains(x)).collect(),
                });
            }
            let mut roots = roots.unwrap_or_default();
            roots.sort_by(|a, b| b.cmp(a));
            roots.dedup();
            if roots.is_empty() {
                return Ok(ConstrainedFixedPoints::Empty);
            }
            let pts =
                roots.iter().map(|t| basis[0].iter().map(|e| e.mul(&RatFunc::from_rational(t))).collect()).collect();
            Ok(ConstrainedFixedPoints::Points(pts))
        }
        _ => Ok(ConstrainedFixedPoints::Variety { basis, params, equations }),
    }
}

/// Rational roots of a univariate polynomial of degree ≤ 2 with rational coefficients.
fn rational_roots(eq: &RatFunc, s: Var) -> Result<Vec<BigRational>> {
    let unsupported = || Error::Unsupported("constraint is not a rational quadric along the fixed line".into());
    let den = eq.den().constant_value().ok_or_else(unsupported)?;
    let dense = eq.num().dense_in(s.id());
    let mut c = Vec::with_capacity(dense.len());
    for p in &dense {
        let v = p.constant_value().ok_or_else(unsupported)?;
        c.push(BigRational::new(v, den.clone()));
    }
    Ok(match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![-&c[0] / &c[1]],
        3 => {
            let disc = &c[1] * &c[1] - BigRational::from_integer(4.into()) * &c[2] * &c[0];
            if disc.is_negative() {
                return Ok(Vec::new());
            }
            let root = disc.sqrt_checked().ok_or_else(|| Error::Unsupported("irrational fixed points".into()))?;
            let two_a = BigRational::from_integer(2.into()) * &c[2];
            vec![(-&c[1] + &root) / &two_a, (-&c[1] - &root) / &two_a]
        }
        _ => return Err(unsupported()),
    })
}

/// Dimension cap for symmetric powers, from `SYMRED_DIM_CAP` (default 2000).
pub fn dim_cap() -> usize {
    std::env::var("SYMRED_DIM_CAP").ok().and_then(|s| s.parse().ok()).unwrap_or(2000)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(usize::MAX as u128) as usize
}

/// Exponent vectors of degree `k` in `n` variables, lexicographically
/// descending (`x^k` first).
pub fn monomials(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn go(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=k).rev() {
            prefix.push(e);
            go(n, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(n, k as u32, &mut Vec::new(), &mut out);
    out
}

type Q = BigRational;

/// Induced Leibniz derivation of `x` on `⊙^k`, in the monomial basis.
/// `x` acts on the standard basis by `e_i ↦ Σ_j x[j][i] e_j`.
pub fn symmetric_power_derivation(x: &Matrix<Q>, k: usize) -> Matrix<Q> {
    let n = x.rows();
    let basis = monomials(n, k);
    let index: HashMap<&[u32], usize> = basis.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let mut out = Matrix::zeros(basis.len(), basis.len());
    for (col, alpha) in basis.iter().enumerate() {
        for i in 0..n {
            if alpha[i] == 0 {
                continue;
            }
            for j in 0..n {
                let xji = &x[(j, i)];
                if xji.is_zero() {
                    continue;
                }
                let mut beta = alpha.clone();
                beta[i] -= 1;
                beta[j] += 1;
                let row = index[beta.as_slice()];
                let v = &out[(row, col)] + xji * Q::from_integer(alpha[i].into());
                out[(row, col)] = v;
            }
        }
    }
    out
}

/// Induced action of `s` on `⊙^k`: `e^α ↦ Π_i (s e_i)^{α_i}`.
pub fn symmetric_power_group(s: &Matrix<Q>, k: usize) -> Matrix<Q> {
    let n = s.rows();
    let basis = monomials(n, k);
    let index: HashMap<&[u32], usize> = basis.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let mut out = Matrix::zeros(basis.len(), basis.len());
    for (col, alpha) in basis.iter().enumerate() {
        let mut poly: HashMap<Vec<u32>, Q> = HashMap::from([(vec![0; n], Q::one())]);
        for i in 0..n {
            for _ in 0..alpha[i] {
                let mut next: HashMap<Vec<u32>, Q> = HashMap::new();
                for (m, c) in &poly {
                    for j in 0..n {
                        let sji = &s[(j, i)];
                        if sji.is_zero() {
                            continue;
                        }
                        let mut m2 = m.clone();
                        m2[j] += 1;
                        *next.entry(m2).or_insert_with(Q::zero) += c * sji;
                    }
                }
                poly = next;
            }
        }
        for (m, c) in poly {
            if !c.is_zero() {
                out[(index[m.as_slice()], col)] = c;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetKappa {
    pub order: usize,
    /// `C(n+k−1, k)`.
    pub ambient: usize,
    pub dim: usize,
    pub basis: Vec<Vec<Q>>,
}

/// `(⊙^k ℝⁿ)^G` for a Lie algebra given by `infinitesimal` matrices and
/// discrete elements `discrete`.
pub fn jet_kappa(
    infinitesimal: &[Matrix<Q>],
    discrete: &[Matrix<Q>],
    n: usize,
    k: usize,
    cap: usize,
) -> Result<JetKappa> {
    let ambient = binomial(n + k - 1 + usize::from(n == 0), k);
    if ambient > cap {
        return Err(Error::DimensionCap { dim: ambient, cap });
    }
    let mut blocks: Vec<Matrix<Q>> = infinitesimal.iter().map(|x| symmetric_power_derivation(x, k)).collect();
    let id = Matrix::identity(ambient);
    blocks.extend(discrete.iter().map(|s| symmetric_power_group(s, k).sub(&id)));
    let basis = if blocks.is_empty() {
        (0..ambient).map(|i| (0..ambient).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
    } else {
        Matrix::vstack(&blocks).kernel()
    };
    Ok(JetKappa { order: k, ambient, dim: basis.len(), basis })
}

/// Converts a matrix of constant normal forms to exact rationals.
pub fn constant_matrix(m: &Matrix<RatFunc>) -> Result<Matrix<Q>> {
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] = m[(i, j)]
                .as_rational()
                .ok_or_else(|| Error::Invalid("representation is not numeric at this point".into()))?;
        }
    }
    Ok(out)
}
