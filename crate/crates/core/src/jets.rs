//! Jet coordinates, invariant ansätze and their prolongations, and the
//! prolongation of infinitesimal generators.

use std::collections::{BTreeMap, HashMap};

use crate::atom::Var;
use crate::error::{Error, Result};
use crate::expr::{print, Style};
use crate::geometry::{invariance_defects, Action, Bundle, QuotientChart};
use crate::kinematic::KinematicBasis;
use crate::ratfunc::RatFunc;

/// Coordinates on `J^k(E)`: `u^α_J` for sorted multi-indices `J` with `|J| ≤ k`.
#[derive(Clone, Debug)]
pub struct JetSpace {
    pub base: Vec<Var>,
    pub fiber: Vec<Var>,
    pub order: usize,
}

/// Sorted index lists of length `k` over `0..n`.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for idx in &out {
            let from = idx.last().copied().unwrap_or(0);
            for i in from..n {
                let mut j = idx.clone();
                j.push(i);
                next.push(j);
            }
        }
        out = next;
    }
    out
}

fn sorted_with(idx: &[usize], i: usize) -> Vec<usize> {
    let mut j = idx.to_vec();
    let at = j.partition_point(|&x| x <= i);
    j.insert(at, i);
    j
}

impl JetSpace {
    pub fn new(base: Vec<Var>, fiber: Vec<Var>, order: usize) -> Self {
        JetSpace { base, fiber, order }
    }

    /// `u1_xy` style name; base names are joined with `_` when any has more
    /// than one character.
    pub fn name(&self, alpha: usize, idx: &[usize]) -> String {
        let u = self.fiber[alpha].name();
        if idx.is_empty() {
            return u;
        }
        let names: Vec<String> = idx.iter().map(|&i| self.base[i].name()).collect();
        let sep = if self.base.iter().any(|b| b.name().chars().count() != 1) { "_" } else { "" };
        format!("{u}_{}", names.join(sep))
    }

    pub fn coordinate(&self, alpha: usize, idx: &[usize]) -> Var {
        if idx.is_empty() {
            self.fiber[alpha]
        } else {
            Var::symbol(&self.name(alpha, idx))
        }
    }

    /// All `(α, J)` with `|J| ≤ order`, by order, then fiber index, then `J`.
    pub fn coordinates(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for k in 0..=self.order {
            for alpha in 0..self.fiber.len() {
                for idx in multi_indices(self.base.len(), k) {
                    out.push((alpha, idx));
                }
            }
        }
        out
    }

    /// Total derivative `D_i f = ∂_i f + Σ u^α_{J,i} ∂f/∂u^α_J` over `|J| < order`.
    pub fn total_derivative(&self, f: &RatFunc, i: usize) -> Result<RatFunc> {
        let mut acc = f.diff(self.base[i])?;
        for k in 0..self.order {
            for alpha in 0..self.fiber.len() {
                for idx in multi_indices(self.base.len(), k) {
                    let u = self.coordinate(alpha, &idx);
                    if !f.contains(u) {
                        continue;
                    }
                    let next = RatFunc::var(self.coordinate(alpha, &sorted_with(&idx, i)));
                    acc = acc.add(&next.mul(&f.diff(u)?));
                }
            }
        }
        Ok(acc)
    }
}

/// An invariant section `s^α = Σ f_k(q) e_k^α(x)` with unknown functions `f_k`
/// of the quotient coordinates.
#[derive(Clone, Debug)]
pub struct Ansatz {
    pub bundle: Bundle,
    /// Chart atoms the unknowns depend on.
    pub arguments: Vec<Var>,
    pub unknowns: Vec<Var>,
    pub section: Vec<RatFunc>,
}

/// Each quotient coordinate must be a single symbol or algebraic generator.
pub fn chart_atoms(chart: &QuotientChart) -> Result<Vec<Var>> {
    chart
        .invariants
        .iter()
        .zip(&chart.names)
        .map(|(f, n)| match f.vars().as_slice() {
            [v] if *f == RatFunc::var(*v) => Ok(*v),
            _ => Err(Error::Unsupported(format!(
                "quotient coordinate `{n}` must be defined by a single symbol or algebraic generator"
            ))),
        })
        .collect()
}

pub fn build_ansatz(bundle: &Bundle, action: &Action, basis: &KinematicBasis, chart: &QuotientChart) -> Result<Ansatz> {
    let arguments = chart_atoms(chart)?;
    let mut seen = std::collections::HashSet::new();
    for n in &basis.names {
        if !seen.insert(n) {
            return Err(Error::Invalid(format!("duplicate unknown `{n}`")));
        }
    }
    let unknowns: Vec<Var> =
        basis.names.iter().map(|n| Var::function(n, &arguments, &vec![0; arguments.len()])).collect();
    let coeffs: Vec<RatFunc> = unknowns.iter().map(|&f| RatFunc::var(f)).collect();
    let section = basis.combine(&coeffs);
    let defects = invariance_defects(&section, action, bundle)?;
    if let Some(d) = defects.iter().find(|d| !d.is_zero()) {
        return Err(Error::NotInvariant(print(d, Style::Grammar)));
    }
    Ok(Ansatz { bundle: bundle.clone(), arguments, unknowns, section })
}

/// Coordinate form of `Inv^k(E) → J^k(E)`.
#[derive(Clone, Debug)]
pub struct ProlongedAnsatz {
    pub jets: JetSpace,
    pub entries: BTreeMap<(usize, Vec<usize>), RatFunc>,
}

impl ProlongedAnsatz {
    pub fn order(&self) -> usize {
        self.jets.order
    }

    /// Entry for `u^α_J`; `J` need not be sorted.
    pub fn get(&self, alpha: usize, idx: &[usize]) -> &RatFunc {
        let mut j = idx.to_vec();
        j.sort_unstable();
        &self.entries[&(alpha, j)]
    }

    /// Jet coordinate ↦ entry, for substitution into explicit operators.
    pub fn bindings(&self) -> HashMap<Var, RatFunc> {
        self.entries.iter().map(|((a, idx), e)| (self.jets.coordinate(*a, idx), e.clone())).collect()
    }
}

pub fn prolong(a: &Ansatz, k: usize) -> Result<ProlongedAnsatz> {
    let jets = JetSpace::new(a.bundle.base.clone(), a.bundle.fiber.clone(), k);
    let mut entries = BTreeMap::new();
    for (alpha, s) in a.section.iter().enumerate() {
        entries.insert((alpha, Vec::new()), s.clone());
    }
    for order in 1..=k {
        for alpha in 0..jets.fiber.len() {
            for idx in multi_indices(jets.base.len(), order) {
                let (last, head) = idx.split_last().unwrap();
                let prev: &RatFunc = &entries[&(alpha, head.to_vec())];
                let d = prev.diff(jets.base[*last])?;
                entries.insert((alpha, idx), d);
            }
        }
    }
    Ok(ProlongedAnsatz { jets, entries })
}

/// Prolonged vector field `ξ^i ∂_i + Σ φ^α_J ∂_{u^α_J}`.
#[derive(Clone, Debug)]
pub struct ProlongedGenerator {
    pub xi: Vec<RatFunc>,
    pub phi: BTreeMap<(usize, Vec<usize>), RatFunc>,
}

impl ProlongedGenerator {
    /// Applies the vector field to a function of jet coordinates.
    pub fn apply(&self, jets: &JetSpace, f: &RatFunc) -> Result<RatFunc> {
        let mut acc = RatFunc::zero();
        for (x, c) in jets.base.iter().zip(&self.xi) {
            if !c.is_zero() {
                acc = acc.add(&c.mul(&f.diff(*x)?));
            }
        }
        for ((alpha, idx), c) in &self.phi {
            let u = jets.coordinate(*alpha, idx);
            if !c.is_zero() && f.contains(u) {
                acc = acc.add(&c.mul(&f.diff(u)?));
            }
        }
        Ok(acc)
    }
}

/// Prolongation to order `k ≤ 2` by `φ_{J,i} = D_i φ_J − Σ_j (D_i ξ^j) u_{J,j}`.
pub fn prolong_generator(action: &Action, a: usize, bundle: &Bundle, k: usize) -> Result<ProlongedGenerator> {
    if k > 2 {
        return Err(Error::Unsupported(format!("generator prolongation to order {k}")));
    }
    let xi = action.generators[a].xi.clone();
    let jets = JetSpace::new(bundle.base.clone(), bundle.fiber.clone(), k);
    let n = jets.base.len();
    let mut phi = BTreeMap::new();
    for (alpha, p) in action.phi(a, bundle)?.into_iter().enumerate() {
        phi.insert((alpha, Vec::new()), p);
    }
    let dxi: Vec<Vec<RatFunc>> = (0..n)
        .map(|i| xi.iter().map(|x| x.diff(jets.base[i])).collect::<std::result::Result<_, _>>())
        .collect::<std::result::Result<_, _>>()?;
    for order in 1..=k {
        for alpha in 0..jets.fiber.len() {
            for idx in multi_indices(n, order) {
                let (&i, head) = idx.split_last().unwrap();
                let mut c = jets.total_derivative(&phi[&(alpha, head.to_vec())], i)?;
                for (j, d) in dxi[i].iter().enumerate() {
                    if !d.is_zero() {
                        let u = RatFunc::var(jets.coordinate(alpha, &sorted_with(head, j)));
                        c = c.sub(&d.mul(&u));
                    }
                }
                phi.insert((alpha, idx), c);
            }
        }
    }
    Ok(ProlongedGenerator { xi, phi })
}

/// `φ_J(x, j^k s) − ξ^i ∂_i s_J` for every jet coordinate; all zero iff the
/// prolonged generator is tangent to the image of the prolonged ansatz.
pub fn tangency_defects(g: &ProlongedGenerator, pa: &ProlongedAnsatz) -> Result<Vec<RatFunc>> {
    let on_image = pa.bindings();
    let mut out = Vec::new();
    for ((alpha, idx), c) in &g.phi {
        if idx.len() > pa.order() {
            continue;
        }
        let lhs = c.substitute(&on_image)?;
        let s = pa.get(*alpha, idx);
        let mut rhs = RatFunc::zero();
        for (x, xi) in pa.jets.base.iter().zip(&g.xi) {
            if !xi.is_zero() {
                rhs = rhs.add(&xi.mul(&s.diff(*x)?));
            }
        }
        out.push(lhs.sub(&rhs));
    }
    Ok(out)
}
