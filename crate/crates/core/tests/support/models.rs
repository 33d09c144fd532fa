//! Shared problem setups: the Euler and Schwarzschild reductions.
#![allow(dead_code)]

use std::collections::HashMap;

use symred_core::atom::Var;
use symred_core::geometry::{
    Action, Bundle, DiscreteFiber, DiscreteGenerator, FiberBlock, InfinitesimalGenerator, Point, QuotientChart, Tensor,
};
use symred_core::jets::{build_ansatz, prolong, Ansatz};
use symred_core::kinematic::{FiberRep, KinematicBasis};
use symred_core::operators::{euler_operator, ricci_operator, OperatorSpec};
use symred_core::parse::Context;
use symred_core::ratfunc::RatFunc;
use symred_core::reduce::{extract, kappa_of_d, restrict, CrossSection, ReducedSystem};

pub fn radial(names: &[&str]) -> Context {
    let mut c = Context::new();
    for s in names {
        c.symbol(s).unwrap();
    }
    c.generator("r", "r^2 - x^2 - y^2 - z^2", &[("x", "x/r"), ("y", "y/r"), ("z", "z/r")]).unwrap();
    c
}

pub fn rotations(c: &Context, with_time: bool) -> Vec<InfinitesimalGenerator> {
    let p = |s: &str| c.parse_ratfunc(s).unwrap();
    let extra = usize::from(c.contains("t"));
    let mut out: Vec<InfinitesimalGenerator> = [["0", "z", "-y"], ["-z", "0", "x"], ["y", "-x", "0"]]
        .iter()
        .map(|xi| {
            let mut v: Vec<RatFunc> = xi.iter().map(|s| p(s)).collect();
            v.extend(std::iter::repeat_n(RatFunc::zero(), extra));
            InfinitesimalGenerator::new(v, None)
        })
        .collect();
    if with_time {
        out.push(InfinitesimalGenerator::new(vec![p("0"), p("0"), p("0"), p("1")], None));
    }
    out
}

pub struct Setup {
    pub base: Vec<Var>,
    pub action: Action,
    pub ansatz: Ansatz,
    pub op: OperatorSpec,
    pub hint: Option<Vec<Vec<RatFunc>>>,
    pub section: CrossSection,
}

impl Setup {
    pub fn reduce(&self, order: usize) -> ReducedSystem {
        let pa = prolong(&self.ansatz, order).unwrap();
        let delta = restrict(&self.op, &pa).unwrap();
        let kd =
            kappa_of_d(&self.op, &self.action, &self.base, &Point::generic(&self.base), self.hint.clone()).unwrap();
        extract(&delta, &kd, &self.ansatz, &self.section, &[]).unwrap()
    }
}

pub fn chart(c: &Context, names: &[&str]) -> QuotientChart {
    QuotientChart {
        names: names.iter().map(|s| s.to_string()).collect(),
        invariants: names.iter().map(|s| RatFunc::var(c.var(s).unwrap())).collect(),
    }
}

pub fn euler() -> Setup {
    let c = radial(&["x", "y", "z", "t", "u1", "u2", "u3", "p"]);
    let v = |n: &str| c.var(n).unwrap();
    let base = vec![v("x"), v("y"), v("z"), v("t")];
    let fiber = vec![v("u1"), v("u2"), v("u3"), v("p")];
    let bundle = Bundle::new(base.clone(), fiber.clone())
        .with_blocks(vec![FiberBlock::new(Tensor::Vector, vec![0, 1, 2]), FiberBlock::new(Tensor::Scalar, vec![])])
        .unwrap();
    let action = Action { generators: rotations(&c, false), discrete: vec![] };
    let rep = FiberRep::at_point(&action, &bundle, &Point::generic(&base), true).unwrap();
    let basis = KinematicBasis::new(&rep, vec!["v".into(), "p".into()], None).unwrap();
    let qc = chart(&c, &["r", "t"]);
    let ansatz = build_ansatz(&bundle, &action, &basis, &qc).unwrap();
    let op = euler_operator(&base, &fiber).unwrap();
    let section = CrossSection::automatic(&qc, &base).unwrap();
    Setup { base, action, ansatz, op, hint: None, section }
}

pub fn schwarzschild() -> Setup {
    let names = ["g11", "g12", "g13", "g14", "g22", "g23", "g24", "g33", "g34", "g44"];
    let mut all = vec!["x", "y", "z", "t", "t0"];
    all.extend(names);
    let c = radial(&all);
    let v = |n: &str| c.var(n).unwrap();
    let base = vec![v("x"), v("y"), v("z"), v("t")];
    let fiber: Vec<Var> = names.iter().map(|n| v(n)).collect();
    let bundle = Bundle::new(base.clone(), fiber.clone())
        .with_blocks(vec![FiberBlock::new(Tensor::Sym2Covector, vec![0, 1, 2, 3])])
        .unwrap();
    let p = |s: &str| c.parse_ratfunc(s).unwrap();
    let z2 = DiscreteGenerator {
        base_map: vec![p("x"), p("y"), p("z"), p("2*t0 - t")],
        fiber: DiscreteFiber::Tensor,
        point_params: vec![(v("t0"), 3)],
    };
    let action = Action { generators: rotations(&c, true), discrete: vec![z2] };
    let rep = FiberRep::at_point(&action, &bundle, &Point::generic(&base), true).unwrap();
    let pk = |rows: &[&str]| rows.iter().map(|s| p(s)).collect::<Vec<_>>();
    let hint = vec![
        pk(&["x^2", "x*y", "x*z", "0", "y^2", "y*z", "0", "z^2", "0", "0"]),
        pk(&["1", "0", "0", "0", "1", "0", "0", "1", "0", "0"]),
        pk(&["0", "0", "0", "0", "0", "0", "0", "0", "0", "1"]),
    ];
    let basis = KinematicBasis::new(&rep, vec!["A".into(), "B".into(), "C".into()], Some(hint.clone())).unwrap();
    let qc = chart(&c, &["r"]);
    let ansatz = build_ansatz(&bundle, &action, &basis, &qc).unwrap();
    let op = ricci_operator(&base, &fiber).unwrap();
    let section = CrossSection::automatic(&qc, &base).unwrap();
    Setup { base, action, ansatz, op, hint: Some(hint), section }
}

/// Quotient coordinates as symbols and the unknowns as functions of them.
pub fn quotient(coords: &[&str], unknowns: &[&str], params: &[&str]) -> Context {
    let mut q = Context::new();
    for s in coords.iter().chain(params) {
        q.symbol(s).unwrap();
    }
    for u in unknowns {
        q.function(u, coords).unwrap();
    }
    q
}

pub fn values(q: &Context, pairs: &[(&str, &str)]) -> HashMap<String, RatFunc> {
    pairs.iter().map(|(k, v)| (k.to_string(), q.parse_ratfunc(v).unwrap())).collect()
}
