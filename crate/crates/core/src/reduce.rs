//! Restriction of operators to invariant jets, κ(D), extraction of the
//! reduced operator, and solution checks.

use std::collections::HashMap;

use crate::atom::{Atom, Var};
use crate::error::{Error, Result};
use crate::expr::{print, Style};
use crate::geometry::{Action, Point, QuotientChart};
use crate::jets::{chart_atoms, multi_indices, Ansatz, ProlongedAnsatz};
use crate::kinematic::{FiberRep, KinematicBasis};
use crate::linalg::Matrix;
use crate::operators::{eval_explicit, ricci, unpack, OperatorKind, OperatorSpec, Recipe};
use crate::ratfunc::RatFunc;

/// `Δ` evaluated on the prolonged ansatz.
pub fn restrict(op: &OperatorSpec, pa: &ProlongedAnsatz) -> Result<Vec<RatFunc>> {
    if pa.order() < op.order {
        return Err(Error::Invalid(format!(
            "operator has order {} but the ansatz was prolonged to order {}",
            op.order,
            pa.order()
        )));
    }
    match &op.kind {
        OperatorKind::Explicit(comps) => {
            let b = pa.bindings();
            Ok(comps.iter().map(|c| c.substitute(&b)).collect::<std::result::Result<_, _>>()?)
        }
        OperatorKind::Procedural(Recipe::Ricci) => {
            let n = pa.jets.base.len();
            let m = pa.jets.fiber.len();
            let at = |idx: &[usize]| -> Matrix<RatFunc> {
                let packed: Vec<RatFunc> = (0..m).map(|a| pa.get(a, idx).clone()).collect();
                unpack(n, &packed)
            };
            let g = at(&[]);
            let dg: Vec<_> = (0..n).map(|k| at(&[k])).collect();
            let ddg: Vec<Vec<_>> = (0..n).map(|k| (0..n).map(|l| at(&[k, l])).collect()).collect();
            let r = ricci(&g, &dg, &ddg)?;
            Ok(crate::operators::pack(&r))
        }
    }
}

/// Names `Dt1..DtK` for reduced components.
pub fn component_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("Dt{i}")).collect()
}

/// Fixed space of the operator's target representation at `point`.
pub fn kappa_of_d(
    op: &OperatorSpec,
    action: &Action,
    base: &[Var],
    point: &Point,
    hint: Option<Vec<Vec<RatFunc>>>,
) -> Result<KinematicBasis> {
    let rep = FiberRep::from_blocks(&op.target, action, base, point, true)?;
    let dim = match &hint {
        Some(h) => h.len(),
        None => crate::kinematic::fixed_space(&rep).len(),
    };
    KinematicBasis::new(&rep, component_names(dim), hint)
}

/// How base objects are moved to the quotient and back.
///
/// `values` sends base coordinates (and chart generators) to expressions in
/// the quotient coordinates; it must pick one point on each orbit.
#[derive(Clone, Debug)]
pub struct CrossSection {
    /// Quotient coordinates, one plain symbol per chart entry.
    pub quotient: Vec<Var>,
    /// The chart atoms the unknowns depend on.
    pub arguments: Vec<Var>,
    pub values: HashMap<Var, RatFunc>,
}

impl CrossSection {
    /// Chooses a slice from the chart: a base coordinate used directly keeps
    /// its value, a generator's first dependency is set to the quotient
    /// coordinate and its other dependencies to zero, and every remaining
    /// base coordinate is set to zero.
    pub fn automatic(chart: &QuotientChart, base: &[Var]) -> Result<Self> {
        let arguments = chart_atoms(chart)?;
        let quotient: Vec<Var> = chart.names.iter().map(|n| Var::symbol(n)).collect();
        let mut values: HashMap<Var, RatFunc> = HashMap::new();
        for (&a, &q) in arguments.iter().zip(&quotient) {
            if a.is_plain_symbol() {
                if values.insert(a, RatFunc::var(q)).is_some() {
                    return Err(Self::ambiguous());
                }
            } else if let Some(data) = a.generator_data() {
                let deps = data.deps();
                let Some((first, rest)) = deps.split_first() else {
                    return Err(Self::ambiguous());
                };
                if values.insert(*first, RatFunc::var(q)).is_some() {
                    return Err(Self::ambiguous());
                }
                for d in rest {
                    if values.insert(*d, RatFunc::zero()).is_some() {
                        return Err(Self::ambiguous());
                    }
                }
            } else {
                return Err(Self::ambiguous());
            }
        }
        for b in base {
            values.entry(*b).or_insert_with(RatFunc::zero);
        }
        Self::with_values(quotient, arguments, values)
    }

    /// A user-supplied slice given by base-coordinate values.
    pub fn explicit(chart: &QuotientChart, base: &[Var], given: HashMap<Var, RatFunc>) -> Result<Self> {
        let arguments = chart_atoms(chart)?;
        let quotient: Vec<Var> = chart.names.iter().map(|n| Var::symbol(n)).collect();
        for b in base {
            if !given.contains_key(b) {
                return Err(Error::Invalid(format!("cross_section gives no value for `{}`", b.name())));
            }
        }
        Self::with_values(quotient, arguments, given)
    }

    fn ambiguous() -> Error {
        Error::Unsupported("cannot choose a cross-section from this chart; supply `cross_section`".into())
    }

    /// Binds chart generators to their quotient coordinate and checks that
    /// every chart invariant restricts to its coordinate.
    fn with_values(quotient: Vec<Var>, arguments: Vec<Var>, mut values: HashMap<Var, RatFunc>) -> Result<Self> {
        for (&a, &q) in arguments.iter().zip(&quotient) {
            if let Some(data) = a.generator_data() {
                let b = RatFunc::from_poly(data.b.clone());
                let c = RatFunc::from_poly(data.c.clone());
                let qv = RatFunc::var(q);
                let rel = qv.mul(&qv).add(&b.mul(&qv)).add(&c).substitute(&values)?;
                if !rel.is_zero() {
                    return Err(Self::ambiguous());
                }
                values.insert(a, qv);
            }
        }
        for (&a, &q) in arguments.iter().zip(&quotient) {
            if values.get(&a) != Some(&RatFunc::var(q)) {
                return Err(Error::Invalid(format!(
                    "cross_section does not restrict `{}` to the quotient coordinate `{}`",
                    a.name(),
                    q.name()
                )));
            }
        }
        values.retain(|k, v| *v != RatFunc::var(*k));
        Ok(CrossSection { quotient, arguments, values })
    }

    fn function_image(&self, v: Var, from: &[Var], to: &[Var]) -> Option<Var> {
        match &*v.atom() {
            Atom::Function { name, args, index } if args.as_slice() == from => Some(Var::function(name, to, index)),
            _ => None,
        }
    }

    /// Restricts an invariant expression in base coordinates to the slice.
    pub fn to_quotient(&self, f: &RatFunc) -> Result<RatFunc> {
        let mut map = self.values.clone();
        for v in f.vars() {
            if let Some(w) = self.function_image(v, &self.arguments, &self.quotient) {
                if w != v {
                    map.insert(v, RatFunc::var(w));
                }
            }
        }
        Ok(f.substitute(&map)?)
    }

    /// Reads an expression in quotient coordinates as an invariant on the base.
    pub fn lift(&self, f: &RatFunc) -> Result<RatFunc> {
        let mut map: HashMap<Var, RatFunc> = HashMap::new();
        for (&q, &a) in self.quotient.iter().zip(&self.arguments) {
            if q != a {
                map.insert(q, RatFunc::var(a));
            }
        }
        for v in f.vars() {
            if let Some(w) = self.function_image(v, &self.quotient, &self.arguments) {
                if w != v {
                    map.insert(v, RatFunc::var(w));
                }
            }
        }
        Ok(f.substitute(&map)?)
    }

    /// The unknown `name` as a function of the quotient coordinates.
    pub fn quotient_function(&self, name: &str) -> Var {
        Var::function(name, &self.quotient, &vec![0; self.quotient.len()])
    }
}

/// The reduced operator `Δ̃` on sections of `κ(E)/G → M/G`.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub quotient: Vec<Var>,
    /// Unknown functions of the quotient coordinates.
    pub unknowns: Vec<Var>,
    pub names: Vec<String>,
    /// `Δ̃_k` in quotient coordinates.
    pub components: Vec<RatFunc>,
    /// Basis sections `b_k` of `κ(D)`.
    pub basis: Vec<Vec<RatFunc>>,
}

/// Coefficients `c` with `Δ = Σ c_k b_k`, plus the residual `Δ − Σ c_k b_k`.
pub fn decompose(delta: &[RatFunc], basis: &[Vec<RatFunc>]) -> (Vec<RatFunc>, Vec<RatFunc>) {
    let d = delta.len();
    let k = basis.len();
    let aug = Matrix::from_fn(d, k + 1, |i, j| if j < k { basis[j][i].clone() } else { delta[i].clone() });
    let (r, pivots) = aug.rref();
    let mut coeffs = vec![RatFunc::zero(); k];
    for (row, &p) in pivots.iter().enumerate() {
        if p < k {
            coeffs[p] = r[(row, k)].clone();
        }
    }
    let residual = residual(delta, basis, &coeffs);
    (coeffs, residual)
}

fn residual(delta: &[RatFunc], basis: &[Vec<RatFunc>], coeffs: &[RatFunc]) -> Vec<RatFunc> {
    delta
        .iter()
        .enumerate()
        .map(|(i, d)| {
            basis.iter().zip(coeffs).fold(d.clone(), |acc, (b, c)| {
                if b[i].is_zero() || c.is_zero() {
                    acc
                } else {
                    acc.sub(&b[i].mul(c))
                }
            })
        })
        .collect()
}

fn residual_error(what: &str, res: &[RatFunc]) -> Error {
    let shown: Vec<String> = res
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(i, r)| format!("[{}] {}", i + 1, print(r, Style::Grammar)))
        .collect();
    Error::Residual(format!("{what}: {}", shown.join("; ")))
}

/// Solves `Δ_Inv = Σ Δ̃_k b_k`, moves the coefficients to the quotient,
/// and checks both the residual and the lifted decomposition.
/// `parameters` are symbols allowed to remain besides quotient objects.
pub fn extract(
    delta_inv: &[RatFunc],
    basis: &KinematicBasis,
    ansatz: &Ansatz,
    section: &CrossSection,
    parameters: &[Var],
) -> Result<ReducedSystem> {
    let (coeffs, res) = decompose(delta_inv, &basis.vectors);
    if res.iter().any(|r| !r.is_zero()) {
        return Err(residual_error("restricted operator is not in the span of κ(D)", &res));
    }
    let components = coeffs.iter().map(|c| section.to_quotient(c)).collect::<Result<Vec<_>>>()?;
    for (k, c) in components.iter().enumerate() {
        for v in c.vars() {
            let ok = section.quotient.contains(&v)
                || parameters.contains(&v)
                || matches!(&*v.atom(), Atom::Function { args, .. } if *args == section.quotient);
            if !ok {
                return Err(Error::Residual(format!(
                    "component {} still depends on `{}` after moving to the quotient",
                    basis.names[k],
                    v.name()
                )));
            }
        }
    }
    let lifted = components.iter().map(|c| section.lift(c)).collect::<Result<Vec<_>>>()?;
    let res = residual(delta_inv, &basis.vectors, &lifted);
    if res.iter().any(|r| !r.is_zero()) {
        return Err(residual_error("reduced components do not lift back to the restricted operator", &res));
    }
    let names: Vec<String> = ansatz.unknowns.iter().map(|u| u.name()).collect();
    Ok(ReducedSystem {
        quotient: section.quotient.clone(),
        unknowns: names.iter().map(|n| section.quotient_function(n)).collect(),
        names: basis.names.clone(),
        components,
        basis: basis.vectors.clone(),
    })
}

/// Bindings of every derivative atom of the unknowns occurring in `exprs`
/// to the matching derivative of the candidate.
fn derivative_bindings(
    exprs: &[RatFunc],
    args: &[Var],
    solution: &HashMap<String, RatFunc>,
) -> Result<HashMap<Var, RatFunc>> {
    let mut map = HashMap::new();
    for e in exprs {
        for v in e.vars() {
            if map.contains_key(&v) {
                continue;
            }
            let Atom::Function { name, args: a, index } = &*v.atom() else { continue };
            if a.as_slice() != args {
                continue;
            }
            let Some(s) = solution.get(name) else { continue };
            let mut d = s.clone();
            for (k, &times) in index.iter().enumerate() {
                for _ in 0..times {
                    d = d.diff(args[k])?;
                }
            }
            map.insert(v, d);
        }
    }
    Ok(map)
}

/// `Δ̃` evaluated on a candidate given as expressions in the quotient
/// coordinates; the candidate is a solution iff every entry is zero.
pub fn reduced_residuals(sys: &ReducedSystem, solution: &HashMap<String, RatFunc>) -> Result<Vec<RatFunc>> {
    for u in &sys.unknowns {
        if !solution.contains_key(&u.name()) {
            return Err(Error::Invalid(format!("candidate gives no value for `{}`", u.name())));
        }
    }
    let map = derivative_bindings(&sys.components, &sys.quotient, solution)?;
    Ok(sys.components.iter().map(|c| c.substitute(&map)).collect::<std::result::Result<_, _>>()?)
}

pub fn verify_reduced_solution(sys: &ReducedSystem, solution: &HashMap<String, RatFunc>) -> Result<bool> {
    Ok(reduced_residuals(sys, solution)?.iter().all(|r| r.is_zero()))
}

/// The full section `s(x)` obtained by lifting a candidate through the ansatz.
pub fn lift_solution(
    ansatz: &Ansatz,
    section: &CrossSection,
    solution: &HashMap<String, RatFunc>,
) -> Result<Vec<RatFunc>> {
    let mut map = HashMap::new();
    for u in &ansatz.unknowns {
        let s = solution
            .get(&u.name())
            .ok_or_else(|| Error::Invalid(format!("candidate gives no value for `{}`", u.name())))?;
        map.insert(*u, section.lift(s)?);
    }
    Ok(ansatz.section.iter().map(|s| s.substitute(&map)).collect::<std::result::Result<_, _>>()?)
}

/// Full operator on the lifted candidate, computed exactly.
pub fn lifted_residuals(op: &OperatorSpec, ansatz: &Ansatz, lifted: &[RatFunc]) -> Result<Vec<RatFunc>> {
    let fixed = Ansatz { section: lifted.to_vec(), ..ansatz.clone() };
    let pa = crate::jets::prolong(&fixed, op.order)?;
    restrict(op, &pa)
}

/// Central finite-difference jets of `f` at `x` up to order 2.
fn fd_jets(
    f: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    order: usize,
    h: f64,
) -> Result<HashMap<Vec<usize>, Vec<f64>>> {
    let n = x.len();
    let shifted = |moves: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, s) in moves {
            y[i] += s * h;
        }
        f(&y)
    };
    let mut out = HashMap::new();
    let f0 = f(x)?;
    out.insert(Vec::new(), f0.clone());
    if order >= 1 {
        for i in 0..n {
            let p = shifted(&[(i, 1.0)])?;
            let m = shifted(&[(i, -1.0)])?;
            out.insert(vec![i], p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect());
            if order >= 2 {
                out.insert(
                    vec![i, i],
                    p.iter().zip(&m).zip(&f0).map(|((a, b), c)| (a - 2.0 * c + b) / (h * h)).collect(),
                );
            }
        }
    }
    if order >= 2 {
        for idx in multi_indices(n, 2) {
            let (i, j) = (idx[0], idx[1]);
            if i == j {
                continue;
            }
            let pp = shifted(&[(i, 1.0), (j, 1.0)])?;
            let pm = shifted(&[(i, 1.0), (j, -1.0)])?;
            let mp = shifted(&[(i, -1.0), (j, 1.0)])?;
            let mm = shifted(&[(i, -1.0), (j, -1.0)])?;
            let d = (0..pp.len()).map(|a| (pp[a] - pm[a] - mp[a] + mm[a]) / (4.0 * h * h)).collect();
            out.insert(idx, d);
        }
    }
    Ok(out)
}

/// Largest operator component on the lifted section at each point, with
/// all derivatives taken by central differences of step `h`.
/// `env` fixes the parameters.
pub fn numeric_lift_check(
    op: &OperatorSpec,
    ansatz: &Ansatz,
    lifted: &[RatFunc],
    env: &HashMap<Var, f64>,
    points: &[Vec<f64>],
    h: f64,
) -> Result<Vec<f64>> {
    if op.order > 2 {
        return Err(Error::Unsupported("numeric check above order 2".into()));
    }
    let base = &ansatz.bundle.base;
    let eval = |y: &[f64]| -> Result<Vec<f64>> {
        let mut e = env.clone();
        for (b, v) in base.iter().zip(y) {
            e.insert(*b, *v);
        }
        lifted
            .iter()
            .map(|s| {
                let v = s.eval(&e).map_err(|_| Error::OutsideDomain(format!("{y:?}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::OutsideDomain(format!("{y:?}")))
                }
            })
            .collect()
    };
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        if x.len() != base.len() {
            return Err(Error::Invalid(format!("point {x:?} has the wrong dimension")));
        }
        let jets = fd_jets(&eval, x, op.order, h)?;
        let values: Vec<f64> = match &op.kind {
            OperatorKind::Explicit(comps) => {
                let mut e = env.clone();
                for (b, v) in base.iter().zip(x) {
                    e.insert(*b, *v);
                }
                let space = crate::jets::JetSpace::new(base.clone(), ansatz.bundle.fiber.clone(), op.order);
                for (alpha, idx) in space.coordinates() {
                    e.insert(space.coordinate(alpha, &idx), jets[&idx][alpha]);
                }
                eval_explicit(comps, &e)?
            }
            OperatorKind::Procedural(Recipe::Ricci) => {
                let n = base.len();
                let at = |idx: Vec<usize>| unpack(n, &jets[&idx]);
                let g = at(Vec::new());
                let dg: Vec<_> = (0..n).map(|k| at(vec![k])).collect();
                let ddg: Vec<Vec<_>> = (0..n)
                    .map(|k| (0..n).map(|l| at(if k <= l { vec![k, l] } else { vec![l, k] })).collect())
                    .collect();
                crate::operators::pack(&ricci::<f64>(&g, &dg, &ddg)?)
            }
        };
        out.push(values.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    }
    Ok(out)
}
