//! Bundles, projectable actions and quotient charts.

use std::collections::HashMap;

use crate::atom::Var;
use crate::error::{Error, ExprError, Result};
use crate::linalg::Matrix;
use crate::ratfunc::{primitive_vector, RatFunc};

/// How the isotropy acts on a run of fiber coordinates.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Tensor {
    Scalar,
    Vector,
    Covector,
    /// Symmetric covariant 2-tensor, packed as the upper triangle `(i ≤ j)`
    /// row by row; the coordinate for `(i, j)` is the matrix entry `γ_ij`.
    Sym2Covector,
}

/// A block of the fiber transforming as a tensor over a subset of the base.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiberBlock {
    pub tensor: Tensor,
    /// Indices into the base coordinates the tensor lives over.
    pub base: Vec<usize>,
}

impl FiberBlock {
    pub fn new(tensor: Tensor, base: Vec<usize>) -> Self {
        FiberBlock { tensor, base }
    }

    pub fn dim(&self) -> usize {
        let k = self.base.len();
        match self.tensor {
            Tensor::Scalar => 1,
            Tensor::Vector | Tensor::Covector => k,
            Tensor::Sym2Covector => k * (k + 1) / 2,
        }
    }

    /// Infinitesimal action on the block from the base Jacobian `j`.
    pub fn infinitesimal(&self, j: &Matrix<RatFunc>) -> Matrix<RatFunc> {
        let jb = restrict(j, &self.base);
        match self.tensor {
            Tensor::Scalar => Matrix::zeros(1, 1),
            Tensor::Vector => jb,
            Tensor::Covector => jb.transpose().scale(&RatFunc::from_int(-1)),
            Tensor::Sym2Covector => {
                let jt = jb.transpose();
                sym2_operator(jb.rows(), |g| jt.mul(g).add(&g.mul(&jb)).scale(&RatFunc::from_int(-1)))
            }
        }
    }

    /// Action of a diffeomorphism with Jacobian `dg` on the block.
    pub fn finite(&self, dg: &Matrix<RatFunc>) -> Result<Matrix<RatFunc>> {
        let a = restrict(dg, &self.base);
        Ok(match self.tensor {
            Tensor::Scalar => Matrix::identity(1),
            Tensor::Vector => a,
            Tensor::Covector => inverse(&a)?.transpose(),
            Tensor::Sym2Covector => {
                let ai = inverse(&a)?;
                let ait = ai.transpose();
                sym2_operator(a.rows(), |g| ait.mul(g).mul(&ai))
            }
        })
    }
}

fn inverse(a: &Matrix<RatFunc>) -> Result<Matrix<RatFunc>> {
    a.inverse().ok_or_else(|| Error::Invalid("discrete base map has a singular Jacobian".into()))
}

fn restrict(j: &Matrix<RatFunc>, idx: &[usize]) -> Matrix<RatFunc> {
    Matrix::from_fn(idx.len(), idx.len(), |a, b| j[(idx[a], idx[b])].clone())
}

/// Index pairs of the packed upper triangle.
pub fn sym2_pairs(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        for j in i..k {
            out.push((i, j));
        }
    }
    out
}

pub fn sym2_unpack(k: usize, packed: &[RatFunc]) -> Matrix<RatFunc> {
    let mut g = Matrix::zeros(k, k);
    for (p, &(i, j)) in sym2_pairs(k).iter().enumerate() {
        g[(i, j)] = packed[p].clone();
        g[(j, i)] = packed[p].clone();
    }
    g
}

pub fn sym2_pack(g: &Matrix<RatFunc>) -> Vec<RatFunc> {
    sym2_pairs(g.rows()).into_iter().map(|(i, j)| g[(i, j)].clone()).collect()
}

/// Matrix of a linear map on symmetric matrices in packed coordinates.
fn sym2_operator(k: usize, f: impl Fn(&Matrix<RatFunc>) -> Matrix<RatFunc>) -> Matrix<RatFunc> {
    let pairs = sym2_pairs(k);
    let mut out = Matrix::zeros(pairs.len(), pairs.len());
    for (col, &(a, b)) in pairs.iter().enumerate() {
        let mut e = Matrix::zeros(k, k);
        e[(a, b)] = RatFunc::one();
        e[(b, a)] = RatFunc::one();
        let img = sym2_pack(&f(&e));
        for (row, v) in img.into_iter().enumerate() {
            out[(row, col)] = v;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Bundle {
    pub base: Vec<Var>,
    pub fiber: Vec<Var>,
    pub constraints: Vec<RatFunc>,
    /// Tensor structure of the fiber, when it has one. Blocks cover the fiber in order.
    pub blocks: Vec<FiberBlock>,
}

impl Bundle {
    pub fn new(base: Vec<Var>, fiber: Vec<Var>) -> Self {
        Bundle { base, fiber, constraints: Vec::new(), blocks: Vec::new() }
    }

    pub fn with_blocks(mut self, blocks: Vec<FiberBlock>) -> Result<Self> {
        let total: usize = blocks.iter().map(|b| b.dim()).sum();
        if total != self.fiber.len() {
            return Err(Error::Invalid(format!(
                "fiber blocks cover {total} coordinates but the fiber has {}",
                self.fiber.len()
            )));
        }
        self.blocks = blocks;
        Ok(self)
    }

    pub fn with_constraints(mut self, constraints: Vec<RatFunc>) -> Result<Self> {
        for c in &constraints {
            if c.vars().iter().any(|v| self.base.contains(v)) {
                return Err(Error::Invalid("fiber constraints may only involve fiber coordinates".into()));
            }
        }
        self.constraints = constraints;
        Ok(self)
    }

    pub fn is_fiber_linear(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn fiber_values(&self) -> Vec<RatFunc> {
        self.fiber.iter().map(|&u| RatFunc::var(u)).collect()
    }
}

/// A base point: values for the base coordinates, possibly symbolic.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub values: Vec<RatFunc>,
}

impl Point {
    /// The generic point: every coordinate is its own symbol.
    pub fn generic(base: &[Var]) -> Self {
        Point { values: base.iter().map(|&v| RatFunc::var(v)).collect() }
    }

    pub fn is_generic(&self, base: &[Var]) -> bool {
        self.values.iter().zip(base).all(|(v, &b)| *v == RatFunc::var(b))
    }

    pub fn bindings(&self, base: &[Var]) -> HashMap<Var, RatFunc> {
        base.iter().copied().zip(self.values.iter().cloned()).collect()
    }

    /// Evaluates `f` at the point, mapping evaluation failures to a domain error.
    pub fn eval(&self, base: &[Var], f: &RatFunc) -> Result<RatFunc> {
        if self.is_generic(base) {
            return Ok(f.clone());
        }
        f.substitute(&self.bindings(base)).map_err(|e| match e {
            ExprError::DivisionByZero | ExprError::NoRoot(_) | ExprError::RelationChanged(_) => {
                Error::OutsideDomain(e.to_string())
            }
            other => Error::Expr(other),
        })
    }
}

#[derive(Clone, Debug)]
pub struct InfinitesimalGenerator {
    pub xi: Vec<RatFunc>,
    /// Explicit fiber components; `None` means "derive from the fiber blocks".
    pub phi: Option<Vec<RatFunc>>,
}

impl InfinitesimalGenerator {
    pub fn new(xi: Vec<RatFunc>, phi: Option<Vec<RatFunc>>) -> Self {
        InfinitesimalGenerator { xi, phi }
    }

    /// Base vector field applied to a function.
    pub fn apply(&self, base: &[Var], f: &RatFunc) -> Result<RatFunc> {
        let mut acc = RatFunc::zero();
        for (x, c) in base.iter().zip(&self.xi) {
            if !c.is_zero() {
                acc = acc.add(&c.mul(&f.diff(*x)?));
            }
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug)]
pub enum DiscreteFiber {
    /// Induced by the fiber blocks from the Jacobian of the base map.
    Tensor,
    Matrix(Matrix<RatFunc>),
    /// Fiber map in base and fiber coordinates.
    Map(Vec<RatFunc>),
}

#[derive(Clone, Debug)]
pub struct DiscreteGenerator {
    pub base_map: Vec<RatFunc>,
    pub fiber: DiscreteFiber,
    /// Symbols standing for the coordinates of the point the map is centred
    /// at (e.g. `t0` in `t -> 2*t0 - t`), with the base index they track.
    pub point_params: Vec<(Var, usize)>,
}

#[derive(Clone, Debug, Default)]
pub struct Action {
    pub generators: Vec<InfinitesimalGenerator>,
    pub discrete: Vec<DiscreteGenerator>,
}

/// Jacobian `∂f^i/∂x^j`.
pub fn jacobian(f: &[RatFunc], base: &[Var]) -> Result<Matrix<RatFunc>> {
    let mut m = Matrix::zeros(f.len(), base.len());
    for (i, fi) in f.iter().enumerate() {
        for (j, &x) in base.iter().enumerate() {
            m[(i, j)] = fi.diff(x)?;
        }
    }
    Ok(m)
}

impl Action {
    /// Fiber components of generator `a`, in base and fiber coordinates.
    pub fn phi(&self, a: usize, bundle: &Bundle) -> Result<Vec<RatFunc>> {
        let g = &self.generators[a];
        if let Some(p) = &g.phi {
            return Ok(p.clone());
        }
        let l = self.fiber_matrix(a, bundle, &Point::generic(&bundle.base))?;
        Ok(l.mul_vec(&bundle.fiber_values()))
    }

    /// The linear map `u ↦ φ_a(x, u)` at the point.
    pub fn fiber_matrix(&self, a: usize, bundle: &Bundle, point: &Point) -> Result<Matrix<RatFunc>> {
        let g = &self.generators[a];
        match &g.phi {
            Some(phi) => {
                let l = jacobian(phi, &bundle.fiber)?;
                let lin = l.mul_vec(&bundle.fiber_values());
                for (k, (p, q)) in phi.iter().zip(&lin).enumerate() {
                    if p != q {
                        return Err(Error::NonLinearFiber(format!("generator {} component {}", a + 1, k + 1)));
                    }
                }
                map_matrix(&l, |x| point.eval(&bundle.base, x))
            }
            None => {
                if bundle.blocks.is_empty() {
                    return Err(Error::Invalid(format!(
                        "generator {} has no fiber components and the fiber has no tensor structure",
                        a + 1
                    )));
                }
                let j = map_matrix(&jacobian(&g.xi, &bundle.base)?, |x| point.eval(&bundle.base, x))?;
                Ok(block_diag(bundle.blocks.iter().map(|b| b.infinitesimal(&j)).collect()))
            }
        }
    }

    /// Discrete generators that fix `point`, with their fiber matrices there.
    pub fn discrete_at(&self, bundle: &Bundle, point: &Point) -> Result<Vec<Matrix<RatFunc>>> {
        let base = &bundle.base;
        let mut out = Vec::new();
        for d in &self.discrete {
            let params: HashMap<Var, RatFunc> =
                d.point_params.iter().map(|&(s, i)| (s, point.values[i].clone())).collect();
            let bind = |f: &RatFunc| -> Result<RatFunc> {
                let f = if params.is_empty() { f.clone() } else { f.substitute(&params)? };
                point.eval(base, &f)
            };
            let image = d.base_map.iter().map(bind).collect::<Result<Vec<_>>>()?;
            if image != point.values {
                continue;
            }
            let m = match &d.fiber {
                DiscreteFiber::Matrix(m) => map_matrix(m, bind)?,
                DiscreteFiber::Map(f) => {
                    let l = jacobian(f, &bundle.fiber)?;
                    if l.mul_vec(&bundle.fiber_values()) != *f {
                        return Err(Error::NonLinearFiber("discrete fiber map".into()));
                    }
                    map_matrix(&l, bind)?
                }
                DiscreteFiber::Tensor => {
                    let dg = map_matrix(&jacobian(&d.base_map, base)?, bind)?;
                    let blocks = bundle.blocks.iter().map(|b| b.finite(&dg)).collect::<Result<Vec<_>>>()?;
                    block_diag(blocks)
                }
            };
            out.push(m);
        }
        Ok(out)
    }
}

pub fn map_matrix(m: &Matrix<RatFunc>, f: impl Fn(&RatFunc) -> Result<RatFunc>) -> Result<Matrix<RatFunc>> {
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] = f(&m[(i, j)])?;
        }
    }
    Ok(out)
}

pub fn block_diag(blocks: Vec<Matrix<RatFunc>>) -> Matrix<RatFunc> {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = Matrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(off + i, off + j)] = b[(i, j)].clone();
            }
        }
        off += b.rows();
    }
    out
}

/// Basis of `{c : Σ c^a ξ_a(x0) = 0}`, each vector made primitive.
pub fn isotropy_subalgebra(gens: &[InfinitesimalGenerator], base: &[Var], point: &Point) -> Result<Vec<Vec<RatFunc>>> {
    let mut m = Matrix::zeros(base.len(), gens.len());
    for (a, g) in gens.iter().enumerate() {
        for i in 0..base.len() {
            m[(i, a)] = point.eval(base, &g.xi[i])?;
        }
    }
    Ok(m.kernel().iter().map(|v| primitive_vector(v)).collect())
}

/// `Σ c^a ξ_a` with the coefficients held fixed.
pub fn combine(gens: &[InfinitesimalGenerator], c: &[RatFunc]) -> Vec<RatFunc> {
    let n = gens.first().map_or(0, |g| g.xi.len());
    (0..n)
        .map(|i| {
            gens.iter()
                .zip(c)
                .filter(|(_, ca)| !ca.is_zero())
                .fold(RatFunc::zero(), |acc, (g, ca)| acc.add(&ca.mul(&g.xi[i])))
        })
        .collect()
}

/// Jacobian of the vanishing vector field `Σ c^a ξ_a` at the point.
pub fn linear_isotropy_rep(
    gens: &[InfinitesimalGenerator],
    c: &[RatFunc],
    base: &[Var],
    point: &Point,
) -> Result<Matrix<RatFunc>> {
    let xi = combine(gens, c);
    for (i, x) in xi.iter().enumerate() {
        if !point.eval(base, x)?.is_zero() {
            return Err(Error::NotVanishing(i + 1));
        }
    }
    let mut j = Matrix::zeros(base.len(), base.len());
    for (a, g) in gens.iter().enumerate() {
        if c[a].is_zero() {
            continue;
        }
        let ja = map_matrix(&jacobian(&g.xi, base)?, |x| point.eval(base, x))?;
        j = j.add(&ja.scale(&c[a]));
    }
    Ok(j)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversality {
    pub rank_xi: usize,
    pub rank_full: usize,
}

impl Transversality {
    pub fn transverse(&self) -> bool {
        self.rank_xi == self.rank_full
    }
}

/// Compares `rank [ξ_a(x)]` with `rank [ξ_a(x), φ_a(x, u)]` at generic fiber values.
pub fn check_transverse(action: &Action, bundle: &Bundle, point: &Point) -> Result<Transversality> {
    let n = bundle.base.len();
    let m = bundle.fiber.len();
    let g = action.generators.len();
    let mut xi = Matrix::zeros(g, n);
    let mut full = Matrix::zeros(g, n + m);
    for a in 0..g {
        for i in 0..n {
            let v = point.eval(&bundle.base, &action.generators[a].xi[i])?;
            xi[(a, i)] = v.clone();
            full[(a, i)] = v;
        }
        let phi = action.phi(a, bundle)?;
        for (k, p) in phi.iter().enumerate() {
            full[(a, n + k)] = point.eval(&bundle.base, p)?;
        }
    }
    Ok(Transversality { rank_xi: xi.rank(), rank_full: full.rank() })
}

/// Quotient coordinates with their defining invariants on the base.
#[derive(Clone, Debug)]
pub struct QuotientChart {
    pub names: Vec<String>,
    pub invariants: Vec<RatFunc>,
}

/// True iff every generator annihilates every chart invariant.
pub fn verify_invariants(chart: &QuotientChart, action: &Action, base: &[Var]) -> Result<bool> {
    for f in &chart.invariants {
        for g in &action.generators {
            if !g.apply(base, f)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Infinitesimal and discrete invariance defects of a section `u = s(x)`.
/// The section is invariant iff every defect is zero.
pub fn invariance_defects(s: &[RatFunc], action: &Action, bundle: &Bundle) -> Result<Vec<RatFunc>> {
    let base = &bundle.base;
    let on_section: HashMap<Var, RatFunc> = bundle.fiber.iter().copied().zip(s.iter().cloned()).collect();
    let mut out = Vec::new();
    for (a, g) in action.generators.iter().enumerate() {
        let phi = action.phi(a, bundle)?;
        for (alpha, p) in phi.iter().enumerate() {
            let lhs = p.substitute(&on_section)?;
            out.push(lhs.sub(&g.apply(base, &s[alpha])?));
        }
    }
    for d in &action.discrete {
        let moved: HashMap<Var, RatFunc> = base.iter().copied().zip(d.base_map.iter().cloned()).collect();
        let s_moved = s.iter().map(|f| f.substitute(&moved)).collect::<std::result::Result<Vec<_>, _>>()?;
        let image = match &d.fiber {
            DiscreteFiber::Map(f) => {
                f.iter().map(|x| x.substitute(&on_section)).collect::<std::result::Result<Vec<_>, _>>()?
            }
            DiscreteFiber::Matrix(m) => m.mul_vec(s),
            DiscreteFiber::Tensor => {
                let dg = jacobian(&d.base_map, base)?;
                let blocks = bundle.blocks.iter().map(|b| b.finite(&dg)).collect::<Result<Vec<_>>>()?;
                block_diag(blocks).mul_vec(s)
            }
        };
        out.extend(image.iter().zip(&s_moved).map(|(a, b)| a.sub(b)));
    }
    Ok(out)
}

pub fn verify_invariant_section(s: &[RatFunc], action: &Action, bundle: &Bundle) -> Result<bool> {
    Ok(invariance_defects(s, action, bundle)?.iter().all(|d| d.is_zero()))
}
