//! Randomized structural properties of the geometry, kinematic, jet,
//! operator and reduction layers.

#[path = "support/hyperdual.rs"]
mod hyperdual;
#[path = "support/models.rs"]
mod models;

use std::collections::HashMap;

use hyperdual::HyperDual;
use models::{euler, quotient, radial, rotations, Setup};
use num_rational::BigRational as Q;
use proptest::prelude::*;
use symred_core::atom::{Atom, Var};
use symred_core::geometry::{
    check_transverse, combine, isotropy_subalgebra, linear_isotropy_rep, verify_invariant_section, Action, Bundle,
    DiscreteFiber, DiscreteGenerator, FiberBlock, InfinitesimalGenerator, Point, Tensor,
};
use symred_core::jets::{multi_indices, prolong, prolong_generator, tangency_defects};
use symred_core::kinematic::{binomial, fixed_space, jet_kappa, FiberRep};
use symred_core::linalg::Matrix;
use symred_core::operators::{equivariance_defects, ricci};
use symred_core::parse::Context;
use symred_core::ratfunc::RatFunc;
use symred_core::reduce::{lift_solution, lifted_residuals, numeric_lift_check, verify_reduced_solution};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn int(n: i64) -> RatFunc {
    RatFunc::from_int(n)
}

fn point(values: &[i64]) -> Point {
    Point { values: values.iter().map(|&v| int(v)).collect() }
}

fn nonzero_space() -> impl Strategy<Value = [i64; 3]> {
    prop::array::uniform3(-4i64..=4).prop_filter("off the axis of symmetry", |p| p.iter().any(|&c| c != 0))
}

/// Rational rotation `(I − K)⁻¹(I + K)` from a skew integer matrix.
fn cayley(k: [i64; 3]) -> Matrix<Q> {
    let q = |n: i64| Q::from_integer(n.into());
    let skew = Matrix::from_rows(vec![
        vec![q(0), q(-k[2]), q(k[1])],
        vec![q(k[2]), q(0), q(-k[0])],
        vec![q(-k[1]), q(k[0]), q(0)],
    ]);
    let id = Matrix::<Q>::identity(3);
    id.sub(&skew).inverse().unwrap().mul(&id.add(&skew))
}

fn rotation_and_time() -> (Context, Vec<Var>, Vec<InfinitesimalGenerator>) {
    let c = radial(&["x", "y", "z", "t"]);
    let base = ["x", "y", "z", "t"].iter().map(|n| c.var(n).unwrap()).collect();
    let gens = rotations(&c, true);
    (c, base, gens)
}

// Geometry

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn isotropy_vectors_annihilate_the_generators(p in prop::array::uniform3(-4i64..=4), t in -3i64..=3) {
        let (_, base, gens) = rotation_and_time();
        let x0 = point(&[p[0], p[1], p[2], t]);
        let iso = isotropy_subalgebra(&gens, &base, &x0).unwrap();
        let expected = if p == [0, 0, 0] { 3 } else { 1 };
        prop_assert_eq!(iso.len(), expected);
        for c in &iso {
            for xi in combine(&gens, c) {
                prop_assert!(x0.eval(&base, &xi).unwrap().is_zero());
            }
            prop_assert!(linear_isotropy_rep(&gens, c, &base, &x0).is_ok());
        }
    }

    #[test]
    fn transverse_actions_fix_the_whole_fiber(p in prop::array::uniform3(-4i64..=4), scalars in 1usize..=3) {
        let c = radial(&["x", "y", "z"]);
        let base: Vec<Var> = ["x", "y", "z"].iter().map(|n| c.var(n).unwrap()).collect();
        let fiber: Vec<Var> = (0..scalars).map(|k| Var::symbol(&format!("w{}", k + 1))).collect();
        let blocks = vec![FiberBlock::new(Tensor::Scalar, vec![]); scalars];
        let bundle = Bundle::new(base.clone(), fiber).with_blocks(blocks).unwrap();
        let action = Action { generators: rotations(&c, false), discrete: vec![] };
        for x0 in [Point::generic(&base), point(&p)] {
            prop_assert!(check_transverse(&action, &bundle, &x0).unwrap().transverse());
            let rep = FiberRep::at_point(&action, &bundle, &x0, true).unwrap();
            for l in &rep.infinitesimal {
                prop_assert!((0..scalars).all(|i| (0..scalars).all(|j| l[(i, j)].is_zero())));
            }
            prop_assert_eq!(fixed_space(&rep).len(), scalars);
        }
    }
}

/// Integrates `(ẋ, u̇) = (ξ(x), φ(x, u))` with classical RK4.
fn flow(
    gen: &InfinitesimalGenerator,
    phi: &[RatFunc],
    base: &[Var],
    fiber: &[Var],
    x: Vec<f64>,
    u: Vec<f64>,
    step: f64,
    steps: usize,
) -> (Vec<f64>, Vec<f64>) {
    let field = |state: &[f64]| -> Vec<f64> {
        let env: HashMap<Var, f64> = base.iter().chain(fiber).copied().zip(state.iter().copied()).collect();
        gen.xi.iter().chain(phi).map(|f| f.eval(&env).unwrap()).collect()
    };
    let n = x.len();
    let mut s: Vec<f64> = x.into_iter().chain(u).collect();
    let axpy = |a: &[f64], k: &[f64], h: f64| -> Vec<f64> { a.iter().zip(k).map(|(a, k)| a + h * k).collect() };
    for _ in 0..steps {
        let k1 = field(&s);
        let k2 = field(&axpy(&s, &k1, step / 2.0));
        let k3 = field(&axpy(&s, &k2, step / 2.0));
        let k4 = field(&axpy(&s, &k3, step));
        for i in 0..s.len() {
            s[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let u = s.split_off(n);
    (s, u)
}

fn flow_defect(bundle: &Bundle, gen: InfinitesimalGenerator, section: &[RatFunc], x0: [f64; 3]) -> f64 {
    let action = Action { generators: vec![gen], discrete: vec![] };
    let phi = action.phi(0, bundle).unwrap();
    let at = |x: &[f64]| -> Vec<f64> {
        let env: HashMap<Var, f64> = bundle.base.iter().copied().zip(x.iter().copied()).collect();
        section.iter().map(|s| s.eval(&env).unwrap()).collect()
    };
    let (x1, u1) = flow(&action.generators[0], &phi, &bundle.base, &bundle.fiber, x0.to_vec(), at(&x0), 1e-3, 10);
    at(&x1).iter().zip(&u1).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn invariant_sections_survive_numerical_flows(
        coeffs in prop::array::uniform3(-3i64..=3),
        a in 1i64..=4,
        b in -3i64..=3,
        p in prop::array::uniform3(1i64..=6),
    ) {
        let c = radial(&["x", "y", "z", "u1", "u2", "u3"]);
        let v = |n: &str| c.var(n).unwrap();
        let base = vec![v("x"), v("y"), v("z")];
        let bundle = Bundle::new(base.clone(), vec![v("u1"), v("u2"), v("u3")])
            .with_blocks(vec![FiberBlock::new(Tensor::Vector, vec![0, 1, 2])])
            .unwrap();
        let gens = rotations(&c, false);
        let radial_profile = c.parse_ratfunc(&format!("{a} + ({b})*r")).unwrap();
        let section: Vec<RatFunc> = base.iter().map(|&x| radial_profile.mul(&RatFunc::var(x))).collect();
        let action = Action { generators: gens.clone(), discrete: vec![] };
        prop_assert!(verify_invariant_section(&section, &action, &bundle).unwrap());

        let cs: Vec<RatFunc> = coeffs.iter().map(|&k| int(k)).collect();
        let combined = InfinitesimalGenerator::new(combine(&gens, &cs), None);
        let x0 = p.map(|k| k as f64 / 4.0);
        let step = 1e-3;
        prop_assert!(flow_defect(&bundle, combined.clone(), &section, x0) <= step * step);

        // A constant field is moved by any rotation whose axis is not along it.
        let constant = vec![int(1), int(0), int(0)];
        prop_assert!(!verify_invariant_section(&constant, &action, &bundle).unwrap());
        if coeffs[1] != 0 || coeffs[2] != 0 {
            prop_assert!(flow_defect(&bundle, combined, &constant, x0) > step * step);
        }
    }
}

// Kinematic

fn tensor() -> impl Strategy<Value = Tensor> {
    prop_oneof![Just(Tensor::Scalar), Just(Tensor::Vector), Just(Tensor::Covector), Just(Tensor::Sym2Covector)]
}

/// Invariants of the circle group in the standard representations of ℝ³,
/// and of the full rotation group at the origin.
fn expected_fixed_dim(t: Tensor, at_origin: bool) -> usize {
    match (t, at_origin) {
        (Tensor::Scalar, _) => 1,
        (Tensor::Vector | Tensor::Covector, false) => 1,
        (Tensor::Vector | Tensor::Covector, true) => 0,
        (Tensor::Sym2Covector, false) => 2,
        (Tensor::Sym2Covector, true) => 1,
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn fixed_spaces_are_fixed_and_satisfy_rank_nullity(
        tensors in prop::collection::vec(tensor(), 1..=3),
        p in prop::array::uniform3(-3i64..=3),
        generic in any::<bool>(),
    ) {
        let c = radial(&["x", "y", "z"]);
        let base: Vec<Var> = ["x", "y", "z"].iter().map(|n| c.var(n).unwrap()).collect();
        let action = Action { generators: rotations(&c, false), discrete: vec![] };
        let blocks: Vec<FiberBlock> = tensors
            .iter()
            .map(|&t| FiberBlock::new(t, if t == Tensor::Scalar { vec![] } else { vec![0, 1, 2] }))
            .collect();
        let x0 = if generic { Point::generic(&base) } else { point(&p) };
        let rep = FiberRep::from_blocks(&blocks, &action, &base, &x0, true).unwrap();
        let basis = fixed_space(&rep);
        for e in &basis {
            prop_assert!(rep.fixes(e));
        }
        let conditions = rep.conditions();
        let rank = if conditions.rows() == 0 { 0 } else { conditions.rank() };
        prop_assert_eq!(basis.len() + rank, rep.dim);
        let at_origin = !generic && p == [0, 0, 0];
        let want: usize = tensors.iter().map(|&t| expected_fixed_dim(t, at_origin)).sum();
        prop_assert_eq!(basis.len(), want);
    }

    #[test]
    fn rotations_carry_fixed_metrics_to_fixed_metrics(k in prop::array::uniform3(-2i64..=2), p in nonzero_space(), t in -2i64..=2) {
        let names = ["g11", "g12", "g13", "g14", "g22", "g23", "g24", "g33", "g34", "g44"];
        let mut all = vec!["x", "y", "z", "t", "t0"];
        all.extend(names);
        let c = radial(&all);
        let v = |n: &str| c.var(n).unwrap();
        let base: Vec<Var> = ["x", "y", "z", "t"].iter().map(|n| v(n)).collect();
        let fiber: Vec<Var> = names.iter().map(|n| v(n)).collect();
        let block = FiberBlock::new(Tensor::Sym2Covector, vec![0, 1, 2, 3]);
        let bundle = Bundle::new(base.clone(), fiber).with_blocks(vec![block.clone()]).unwrap();
        let z2 = DiscreteGenerator {
            base_map: ["x", "y", "z", "2*t0 - t"].iter().map(|s| c.parse_ratfunc(s).unwrap()).collect(),
            fiber: DiscreteFiber::Tensor,
            point_params: vec![(v("t0"), 3)],
        };
        let action = Action { generators: rotations(&c, true), discrete: vec![z2] };

        let r = cayley(k);
        let mut g = Matrix::<RatFunc>::identity(4);
        for i in 0..3 {
            for j in 0..3 {
                g[(i, j)] = RatFunc::from_rational(&r[(i, j)]);
            }
        }
        let x0 = point(&[p[0], p[1], p[2], t]);
        let gx0 = Point { values: g.mul_vec(&x0.values) };
        let rep0 = FiberRep::at_point(&action, &bundle, &x0, true).unwrap();
        let rep1 = FiberRep::at_point(&action, &bundle, &gx0, true).unwrap();
        let big = block.finite(&g).unwrap();
        let big_inv = big.inverse().unwrap();

        let basis0 = fixed_space(&rep0);
        prop_assert_eq!(basis0.len(), 3);
        prop_assert_eq!(fixed_space(&rep1).len(), 3);
        let moved: Vec<Vec<RatFunc>> = basis0.iter().map(|e| big.mul_vec(e)).collect();
        for e in &moved {
            prop_assert!(rep1.fixes(e));
        }
        prop_assert_eq!(Matrix::from_rows(moved).rank(), 3);

        // Isotropy at g·x is the conjugate of isotropy at x.
        prop_assert_eq!(rep0.infinitesimal.len(), 1);
        prop_assert_eq!(rep1.infinitesimal.len(), 1);
        let conj = big.mul(&rep0.infinitesimal[0]).mul(&big_inv);
        let flat = |m: &Matrix<RatFunc>| (0..10).flat_map(|i| (0..10).map(move |j| (i, j))).map(|ij| m[ij].clone()).collect::<Vec<_>>();
        prop_assert_eq!(Matrix::from_rows(vec![flat(&conj), flat(&rep1.infinitesimal[0])]).rank(), 1);
    }

    #[test]
    fn invariant_taylor_coefficients_ignore_a_change_of_basis(
        n in 2usize..=3,
        k in 0usize..=5,
        entries in prop::collection::vec(-2i64..=2, 9),
    ) {
        let q = |x: i64| Q::from_integer(x.into());
        let mut so: Vec<Matrix<Q>> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                so.push(Matrix::from_fn(n, n, |a, b| {
                    if (a, b) == (i, j) { q(-1) } else if (a, b) == (j, i) { q(1) } else { q(0) }
                }));
            }
        }
        let p = Matrix::from_fn(n, n, |a, b| q(entries[a * 3 + b] + if a == b { 5 } else { 0 }));
        let pi = p.inverse().unwrap();
        let conjugated: Vec<Matrix<Q>> = so.iter().map(|x| p.mul(x).mul(&pi)).collect();
        let plain = jet_kappa(&so, &[], n, k, 2000).unwrap().dim;
        prop_assert_eq!(jet_kappa(&conjugated, &[], n, k, 2000).unwrap().dim, plain);
        if k % 2 == 1 {
            prop_assert_eq!(plain, 0);
        }
    }
}

// Jets

fn euler_unknown_atoms(s: &Setup, k: usize) -> usize {
    let pa = prolong(&s.ansatz, k).unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for e in pa.entries.values() {
        for v in e.vars() {
            if matches!(&*v.atom(), Atom::Function { .. }) {
                seen.insert(v);
            }
        }
    }
    seen.len()
}

#[test]
fn prolongation_commutes_with_differentiation() {
    let s = euler();
    let pa = prolong(&s.ansatz, 2).unwrap();
    for alpha in 0..4 {
        for order in 0..2 {
            for idx in multi_indices(4, order) {
                for i in 0..4 {
                    let mut longer = idx.clone();
                    longer.push(i);
                    let direct = pa.get(alpha, &idx).diff(s.base[i]).unwrap();
                    assert_eq!(pa.get(alpha, &longer), &direct, "u{alpha} {idx:?} then {i}");
                }
            }
        }
    }
}

#[test]
fn jet_unknowns_match_the_quotient_jet_count() {
    let s = euler();
    for k in 0..=2 {
        // two unknowns over two quotient coordinates
        assert_eq!(euler_unknown_atoms(&s, k), 2 * binomial(2 + k, k), "order {k}");
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn combined_rotations_are_tangent_and_leave_euler_equivariant(coeffs in prop::array::uniform3(-3i64..=3)) {
        let s = euler();
        let cs: Vec<RatFunc> = coeffs.iter().map(|&k| int(k)).collect();
        let combined = Action {
            generators: vec![InfinitesimalGenerator::new(combine(&s.action.generators, &cs), None)],
            discrete: vec![],
        };
        let pa = prolong(&s.ansatz, 2).unwrap();
        let g = prolong_generator(&combined, 0, &s.ansatz.bundle, 2).unwrap();
        prop_assert!(tangency_defects(&g, &pa).unwrap().iter().all(|d| d.is_zero()));
        let g1 = prolong_generator(&combined, 0, &s.ansatz.bundle, 1).unwrap();
        prop_assert!(equivariance_defects(&s.op, &g1, &pa.jets).unwrap().iter().all(|d| d.is_zero()));
    }
}

// Operators

fn qm(n: usize, v: impl Fn(usize, usize) -> i64) -> Matrix<Q> {
    Matrix::from_fn(n, n, |i, j| Q::from_integer(v(i, j).into()))
}

/// Random symmetric jets: `g`, `∂_k g`, `∂_k ∂_l g` with `∂_k ∂_l = ∂_l ∂_k`.
fn metric_jets(n: usize, seed: &[i64]) -> (Matrix<Q>, Vec<Matrix<Q>>, Vec<Vec<Matrix<Q>>>) {
    let at = |k: usize| seed[k % seed.len()];
    let sym = |off: usize| qm(n, |i, j| at(off + i.min(j) * 7 + i.max(j)));
    let g = qm(n, |i, j| if i == j { 6 + at(i) } else { at(3 + i + j) });
    let dg: Vec<Matrix<Q>> = (0..n).map(|k| sym(11 * k + 1)).collect();
    let ddg: Vec<Vec<Matrix<Q>>> =
        (0..n).map(|k| (0..n).map(|l| sym(13 * (k.min(l) * n + k.max(l)) + 5)).collect()).collect();
    (g, dg, ddg)
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn ricci_is_symmetric_and_covariant(
        n in 2usize..=4,
        seed in prop::collection::vec(-2i64..=2, 23),
        a in prop::collection::vec(-1i64..=1, 16),
    ) {
        let (g, dg, ddg) = metric_jets(n, &seed);
        let ric = ricci(&g, &dg, &ddg).unwrap();
        prop_assert_eq!(&ric, &ric.transpose());

        // x = A y: g' = Aᵀ g A and partials pick up one A per derivative.
        let a = qm(n, |i, j| a[i * 4 + j] + if i == j { 3 } else { 0 });
        let at = a.transpose();
        let conj = |m: &Matrix<Q>| at.mul(m).mul(&a);
        let g2 = conj(&g);
        let dg2: Vec<Matrix<Q>> = (0..n)
            .map(|k| (0..n).fold(Matrix::zeros(n, n), |acc, l| acc.add(&conj(&dg[l]).scale(&a[(l, k)]))))
            .collect();
        let ddg2: Vec<Vec<Matrix<Q>>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|m| {
                        let mut acc = Matrix::zeros(n, n);
                        for l in 0..n {
                            for p in 0..n {
                                acc = acc.add(&conj(&ddg[l][p]).scale(&(&a[(l, k)] * &a[(p, m)])));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        prop_assert_eq!(ricci(&g2, &dg2, &ddg2).unwrap(), conj(&ric));
    }

    #[test]
    fn constant_metrics_are_flat(n in 2usize..=4, seed in prop::collection::vec(-2i64..=2, 23)) {
        let (g, _, _) = metric_jets(n, &seed);
        let zero = Matrix::<Q>::zeros(n, n);
        let ric = ricci(&g, &vec![zero.clone(); n], &vec![vec![zero.clone(); n]; n]).unwrap();
        prop_assert_eq!(ric, zero);
    }

    #[test]
    fn ricci_matches_finite_difference_jets(
        w in prop::collection::vec(-3i64..=3, 10),
        p in prop::array::uniform4(-4i64..=4),
    ) {
        let weights: Vec<f64> = w.iter().map(|&k| k as f64 / 8.0).collect();
        let metric = |x: [HyperDual; 4]| {
            let one = HyperDual::constant(1.0);
            let s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
            let bump = one / (one + s);
            let mut g = [[HyperDual::constant(0.0); 4]; 4];
            let mut k = 0;
            for i in 0..4 {
                for j in i..4 {
                    let base = if i == j { if i == 3 { -2.0 } else { 2.0 } } else { 0.0 };
                    let e = HyperDual::constant(base) + HyperDual::constant(weights[k]) * x[i] * x[j] * bump;
                    g[i][j] = e;
                    g[j][i] = e;
                    k += 1;
                }
            }
            g
        };
        let x0 = p.map(|k| k as f64 / 4.0);
        let exact = hyperdual::metric_jet(metric, x0);

        let h = 1e-3;
        let value = |dx: [f64; 4]| -> [[f64; 4]; 4] {
            let g = metric(std::array::from_fn(|i| HyperDual::constant(x0[i] + dx[i])));
            g.map(|row| row.map(|e| e.a))
        };
        let shift = |pairs: &[(usize, f64)]| {
            let mut d = [0.0; 4];
            for &(i, s) in pairs {
                d[i] += s * h;
            }
            value(d)
        };
        let m = |a: [[f64; 4]; 4]| Matrix::from_rows(a.iter().map(|r| r.to_vec()).collect());
        let combine = |terms: &[([[f64; 4]; 4], f64)]| {
            let mut out = [[0.0; 4]; 4];
            for (t, c) in terms {
                for i in 0..4 {
                    for j in 0..4 {
                        out[i][j] += c * t[i][j];
                    }
                }
            }
            m(out)
        };
        let dg: Vec<Matrix<f64>> =
            (0..4).map(|k| combine(&[(shift(&[(k, 1.0)]), 0.5 / h), (shift(&[(k, -1.0)]), -0.5 / h)])).collect();
        let ddg: Vec<Vec<Matrix<f64>>> = (0..4)
            .map(|k| {
                (0..4)
                    .map(|l| {
                        let q = 0.25 / (h * h);
                        combine(&[
                            (shift(&[(k, 1.0), (l, 1.0)]), q),
                            (shift(&[(k, 1.0), (l, -1.0)]), -q),
                            (shift(&[(k, -1.0), (l, 1.0)]), -q),
                            (shift(&[(k, -1.0), (l, -1.0)]), q),
                        ])
                    })
                    .collect()
            })
            .collect();
        let fd = ricci(&m(exact.g), &dg, &ddg).unwrap();
        let lib = ricci(&m(exact.g), &exact.dg.iter().map(|d| m(*d)).collect::<Vec<_>>(),
            &exact.ddg.iter().map(|row| row.iter().map(|d| m(*d)).collect()).collect::<Vec<_>>()).unwrap();
        let scale = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).fold(1.0f64, |s, ij| s.max(lib[ij].abs()));
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((fd[(i, j)] - lib[(i, j)]).abs() <= 1e-4 * scale, "R{i}{j}: fd {} exact {}", fd[(i, j)], lib[(i, j)]);
            }
        }
    }
}

// Reduction

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn reduced_and_lifted_verdicts_agree(
        exact in any::<bool>(),
        c in 1i64..=4,
        a in -3i64..=3,
        b in -3i64..=3,
        m in -4i32..=2,
        n in -4i32..=2,
    ) {
        let s = euler();
        let sys = s.reduce(1);
        let q = quotient(&["r", "t"], &[], &[]);
        let (v, p) = if exact {
            (format!("{c}/r^3"), format!("-({c}^2)/(2*r^4)"))
        } else {
            (format!("({a})*r^{m}"), format!("({b})*r^{n}"))
        };
        let sol: HashMap<String, RatFunc> =
            [("v".to_string(), q.parse_ratfunc(&v).unwrap()), ("p".to_string(), q.parse_ratfunc(&p).unwrap())].into();
        let reduced = verify_reduced_solution(&sys, &sol).unwrap();
        let lifted = lift_solution(&s.ansatz, &s.section, &sol).unwrap();
        let full = lifted_residuals(&s.op, &s.ansatz, &lifted).unwrap().iter().all(|r| r.is_zero());
        prop_assert_eq!(reduced, full);
        if exact {
            prop_assert!(reduced);
        }
    }

    #[test]
    fn lift_residual_is_second_order_in_the_step(
        c in 1i64..=4,
        pts in prop::collection::vec(prop::array::uniform4(8i64..=24), 3),
    ) {
        let s = euler();
        let q = quotient(&["r", "t"], &[], &[]);
        let sol: HashMap<String, RatFunc> = [
            ("v".to_string(), q.parse_ratfunc(&format!("{c}/r^3")).unwrap()),
            ("p".to_string(), q.parse_ratfunc(&format!("-({c}^2)/(2*r^4)")).unwrap()),
        ]
        .into();
        let lifted = lift_solution(&s.ansatz, &s.section, &sol).unwrap();
        let points: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|&k| k as f64 / 8.0).collect()).collect();
        let worst = |h: f64| {
            numeric_lift_check(&s.op, &s.ansatz, &lifted, &HashMap::new(), &points, h).unwrap().into_iter().fold(0.0, f64::max)
        };
        let (coarse, fine) = (worst(1e-3), worst(5e-4));
        prop_assert!(coarse <= 1e-5, "residual {coarse}");
        prop_assert!(coarse / fine >= 3.5, "ratio {}", coarse / fine);
    }
}

#[test]
fn reduced_euler_is_sound_and_lives_on_the_quotient() {
    let s = euler();
    let sys = s.reduce(1);
    assert_eq!(sys.components.len(), sys.basis.len());
    assert_eq!(sys.components.len(), 2);
    for comp in &sys.components {
        for v in comp.vars() {
            let on_quotient =
                sys.quotient.contains(&v) || matches!(&*v.atom(), Atom::Function { args, .. } if *args == sys.quotient);
            assert!(on_quotient, "`{}` survives in {comp:?}", v.name());
        }
    }
    // Δ_Inv − Σ Δ̃_k b_k, with Δ̃_k lifted back to the base.
    let pa = prolong(&s.ansatz, 1).unwrap();
    let delta = symred_core::reduce::restrict(&s.op, &pa).unwrap();
    for (i, d) in delta.iter().enumerate() {
        let mut acc = d.clone();
        for (comp, b) in sys.components.iter().zip(&sys.basis) {
            acc = acc.sub(&s.section.lift(comp).unwrap().mul(&b[i]));
        }
        assert!(acc.is_zero(), "row {i}");
    }
}
