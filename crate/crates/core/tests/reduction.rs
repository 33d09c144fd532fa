#[path = "support/models.rs"]
mod models;

use std::time::Instant;

use symred_core::expr::{print, Style};
use symred_core::geometry::{Action, Bundle, FiberBlock, Point, Tensor};
use symred_core::jets::{build_ansatz, prolong, prolong_generator, tangency_defects};
use symred_core::kinematic::{FiberRep, KinematicBasis};
use symred_core::operators::{equivariance_defects, laplacian_operator};
use symred_core::reduce::{kappa_of_d, lift_solution, lifted_residuals, verify_reduced_solution, CrossSection};

use models::{chart, euler, quotient, radial, rotations, schwarzschild, values, Setup};

#[test]
fn euler_reduces_to_two_equations() {
    let start = Instant::now();
    let s = euler();
    let sys = s.reduce(1);
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(sys.names, vec!["Dt1", "Dt2"]);
    let q = quotient(&["r", "t"], &["v", "p"], &[]);
    let expected = [
        q.parse_ratfunc("D(v,t) + v(r,t)^2 + r*v(r,t)*D(v,r) + D(p,r)/r").unwrap(),
        q.parse_ratfunc("3*v(r,t) + r*D(v,r)").unwrap(),
    ];
    assert_eq!(sys.components, expected);
    let printed: Vec<String> = sys.components.iter().map(|e| print(e, Style::Compact)).collect();
    assert_eq!(printed, ["r*v*v_r + v^2 + v_t + p_r/r", "r*v_r + 3*v"]);
}

#[test]
fn euler_first_jets_of_the_ansatz() {
    let s = euler();
    let pa = prolong(&s.ansatz, 1).unwrap();
    let mut c = radial(&["x", "y", "z", "t"]);
    c.function("v", &["r", "t"]).unwrap();
    c.function("p", &["r", "t"]).unwrap();
    let x = ["x", "y", "z"];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { " + v(r,t)" } else { "" };
            let want = c.parse_ratfunc(&format!("D(v,r)*{}*{}/r{delta}", x[i], x[j])).unwrap();
            assert_eq!(pa.get(i, &[j]).clone(), want, "u{}_{}", i + 1, x[j]);
        }
        let want = c.parse_ratfunc(&format!("D(p,r)*{}/r", x[i])).unwrap();
        assert_eq!(pa.get(3, &[i]).clone(), want);
    }
    assert_eq!(pa.get(0, &[3]).clone(), c.parse_ratfunc("D(v,t)*x").unwrap());
}

#[test]
fn rotations_are_tangent_to_the_invariant_jets() {
    let s = euler();
    let pa = prolong(&s.ansatz, 1).unwrap();
    for a in 0..3 {
        let g = prolong_generator(&s.action, a, &s.ansatz.bundle, 1).unwrap();
        assert!(tangency_defects(&g, &pa).unwrap().iter().all(|d| d.is_zero()));
        assert!(equivariance_defects(&s.op, &g, &pa.jets).unwrap().iter().all(|d| d.is_zero()));
    }
}

#[test]
fn target_ranks() {
    let e = euler();
    let point = Point::generic(&e.base);
    assert_eq!(kappa_of_d(&e.op, &e.action, &e.base, &point, None).unwrap().dim(), 2);
    let s = schwarzschild();
    let kd = kappa_of_d(&s.op, &s.action, &s.base, &point, s.hint.clone()).unwrap();
    assert_eq!(kd.dim(), 3);
    assert_eq!(kd.dim(), s.ansatz.unknowns.len());
    assert_eq!(kappa_of_d(&s.op, &s.action, &s.base, &point, None).unwrap().dim(), 3);
}

#[test]
fn steady_vortex_solves_euler() {
    let s = euler();
    let sys = s.reduce(1);
    let q = quotient(&["r", "t"], &[], &["c"]);
    let sol = values(&q, &[("v", "c/r^3"), ("p", "-(c^2)/(2*r^4)")]);
    assert!(verify_reduced_solution(&sys, &sol).unwrap());
    let lifted = lift_solution(&s.ansatz, &s.section, &sol).unwrap();
    assert!(lifted_residuals(&s.op, &s.ansatz, &lifted).unwrap().iter().all(|r| r.is_zero()));
    let wrong = values(&q, &[("v", "c/r^3"), ("p", "c^2/(2*r^4)")]);
    assert!(!verify_reduced_solution(&sys, &wrong).unwrap());
}

#[test]
fn schwarzschild_in_isotropic_coordinates() {
    let start = Instant::now();
    let s = schwarzschild();
    let sys = s.reduce(2);
    assert_eq!(sys.components.len(), 3);
    let q = quotient(&["r"], &[], &["m"]);
    let sol = values(&q, &[("A", "0"), ("B", "(1 + m/(2*r))^4"), ("C", "-((1 - m/(2*r))/(1 + m/(2*r)))^2")]);
    assert!(verify_reduced_solution(&sys, &sol).unwrap());
    let lifted = lift_solution(&s.ansatz, &s.section, &sol).unwrap();
    assert!(lifted_residuals(&s.op, &s.ansatz, &lifted).unwrap().iter().all(|r| r.is_zero()));
    let flat = values(&q, &[("A", "0"), ("B", "1"), ("C", "-1")]);
    let bumped = values(&q, &[("A", "0"), ("B", "1 + r^2"), ("C", "-1")]);
    for (candidate, vacuum) in [(flat, true), (bumped, false)] {
        assert_eq!(verify_reduced_solution(&sys, &candidate).unwrap(), vacuum);
        let lifted = lift_solution(&s.ansatz, &s.section, &candidate).unwrap();
        assert_eq!(lifted_residuals(&s.op, &s.ansatz, &lifted).unwrap().iter().all(|r| r.is_zero()), vacuum);
    }
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn radial_laplacian() {
    let c = radial(&["x", "y", "z", "u"]);
    let v = |n: &str| c.var(n).unwrap();
    let base = vec![v("x"), v("y"), v("z")];
    let fiber = vec![v("u")];
    let bundle =
        Bundle::new(base.clone(), fiber.clone()).with_blocks(vec![FiberBlock::new(Tensor::Scalar, vec![])]).unwrap();
    let action = Action { generators: rotations(&c, false), discrete: vec![] };
    let rep = FiberRep::at_point(&action, &bundle, &Point::generic(&base), true).unwrap();
    let basis = KinematicBasis::new(&rep, vec!["f".into()], None).unwrap();
    let qc = chart(&c, &["r"]);
    let ansatz = build_ansatz(&bundle, &action, &basis, &qc).unwrap();
    let op = laplacian_operator(&base, &fiber).unwrap();
    let section = CrossSection::automatic(&qc, &base).unwrap();
    let s = Setup { base, action, ansatz, op, hint: None, section };
    let sys = s.reduce(2);

    // Chain rule by hand: ∂_i f(r) = f' x_i / r, so
    // Σ ∂_i² f = f'' Σ x_i²/r² + f' Σ (1/r − x_i²/r³) = f'' + 2 f'/r.
    let q = quotient(&["r"], &["f"], &[]);
    assert_eq!(sys.components, vec![q.parse_ratfunc("D(f,r,r) + 2*D(f,r)/r").unwrap()]);
    assert_eq!(print(&sys.components[0], Style::Compact), "f_rr + 2*f_r/r");
}
