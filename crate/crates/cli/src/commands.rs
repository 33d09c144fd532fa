//! The four workflows: kappa, reduce, check and jet-kappa.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use symred_core::atom::Var;
use symred_core::error::Error;
use symred_core::geometry::{check_transverse, verify_invariants, FiberBlock, Point, Tensor, Transversality};
use symred_core::jets::{build_ansatz, prolong, Ansatz, ProlongedAnsatz};
use symred_core::kinematic::{
    assemble_kinematic_diagram, constant_matrix, dim_cap, fixed_points_constrained, fixed_space, jet_kappa, monomials,
    ConstrainedFixedPoints, FiberRep, KinematicBasis,
};
use symred_core::linalg::Matrix;
use symred_core::ratfunc::RatFunc;
use symred_core::reduce::{
    extract, kappa_of_d, lift_solution, lifted_residuals, numeric_lift_check, reduced_residuals, restrict,
    CrossSection, ReducedSystem,
};

use crate::problem::Problem;
use crate::report::{c, compact_tuple, g, grammar_list, named, Report};
use crate::CliError;

/// Step of the numeric lift check; the convergence ratio compares it with half of it.
pub const FD_STEP: f64 = 1e-3;
/// Number of sample points when no `--points` file is given.
pub const SAMPLE_POINTS: usize = 10;
const SAMPLE_SEED: u64 = 0x5eed;

/// Outputs of the kinematic stage.
pub struct Kinematics {
    pub transversality: Transversality,
    pub rep: FiberRep,
    pub basis: Option<KinematicBasis>,
    pub ansatz: Option<Ansatz>,
    /// Why no ansatz was built although a chart was given.
    pub ansatz_error: Option<Error>,
}

pub fn kinematics(p: &Problem, report: &mut Report) -> Result<Kinematics, CliError> {
    let base = &p.bundle.base;
    let generic = check_transverse(&p.action, &p.bundle, &Point::generic(base))?;
    let mut transversality = json!({
        "rank_xi": generic.rank_xi,
        "rank_full": generic.rank_full,
        "transverse": generic.transverse(),
    });
    let mut t = generic.clone();
    if !p.point.is_generic(base) {
        let at = check_transverse(&p.action, &p.bundle, &p.point)?;
        transversality["at_point"] =
            json!({ "rank_xi": at.rank_xi, "rank_full": at.rank_full, "transverse": at.transverse() });
        transversality["transverse"] = (generic.transverse() && at.transverse()).into();
        if !at.transverse() || generic.transverse() {
            t = at;
        }
    }
    report.set("transversality", transversality);
    report.set("regularity", "assumed, not checked".into());
    let rep = FiberRep::at_point(&p.action, &p.bundle, &p.point, true)?;
    report.set(
        "isotropy",
        json!({
            "dimension": rep.isotropy.len(),
            "basis": rep.isotropy.iter().map(|v| grammar_list(v)).collect::<Vec<_>>(),
            "discrete": rep.discrete.len(),
        }),
    );
    report.set("point", grammar_list(&p.point.values));
    if !p.point.is_generic(base) {
        report.line(format!("point: {}", compact_tuple(&p.point.values)));
    }
    if let Some(chart) = &p.chart {
        let ok = verify_invariants(chart, &p.action, base)?;
        report.set("chart_invariant", ok.into());
        if !ok {
            return Err(CliError::Field {
                path: "quotient_chart".into(),
                source: Error::NotInvariant("a chart expression is not annihilated by every generator".into()),
            });
        }
    }

    if !p.bundle.constraints.is_empty() {
        report.line(transverse_line(&t, false));
        report.line(isotropy_line(&rep));
        let fp = fixed_points_constrained(&rep, &p.bundle.fiber, &p.bundle.constraints)?;
        let (value, text) = match &fp {
            ConstrainedFixedPoints::Empty => (json!({ "kind": "empty" }), "fixed points: none".to_string()),
            ConstrainedFixedPoints::Points(pts) => (
                json!({ "kind": "points", "points": pts.iter().map(|q| grammar_list(q)).collect::<Vec<_>>() }),
                format!("fixed points: {}", pts.iter().map(|q| compact_tuple(q)).collect::<Vec<_>>().join(", ")),
            ),
            ConstrainedFixedPoints::Variety { basis, params, equations } => (
                json!({
                    "kind": "variety",
                    "basis": basis.iter().map(|v| grammar_list(v)).collect::<Vec<_>>(),
                    "parameters": params.iter().map(|v| v.name()).collect::<Vec<_>>(),
                    "equations": grammar_list(equations),
                }),
                format!(
                    "fixed points: span of {} subject to {} equation(s)",
                    basis.iter().map(|v| compact_tuple(v)).collect::<Vec<_>>().join(", "),
                    equations.len()
                ),
            ),
        };
        report.set("constrained_fixed_points", value);
        report.line(text);
        return Ok(Kinematics { transversality: t, rep, basis: None, ansatz: None, ansatz_error: None });
    }

    let dim = match &p.kinematic_basis {
        Some(h) => h.len(),
        None => fixed_space(&rep).len(),
    };
    let names = match &p.kinematic_names {
        Some(n) => n.clone(),
        None => (1..=dim).map(|i| format!("v{i}")).collect(),
    };
    let basis = KinematicBasis::new(&rep, names, p.kinematic_basis.clone())?;
    let full = basis.dim() == p.bundle.fiber.len();
    report.line(transverse_line(&t, full));
    report.line(isotropy_line(&rep));
    let mut kappa = json!({
        "dimension": basis.dim(),
        "names": basis.names,
        "basis": named_vectors(&basis.names, &basis.vectors),
        "full_fiber": full,
    });
    if !p.point.is_generic(base) {
        let generic = FiberRep::at_point(&p.action, &p.bundle, &Point::generic(base), true)?;
        let d = fixed_space(&generic).len();
        kappa["generic_dimension"] = d.into();
        if d != basis.dim() {
            report.line(format!("warning: fixed space has dimension {} here but {d} at a generic point", basis.dim()));
        }
    }
    report.set("kappa", kappa);
    report.line(format!("kappa(E): dimension {}", basis.dim()));
    for (n, v) in basis.names.iter().zip(&basis.vectors) {
        report.line(format!("  {n}: {}", compact_tuple(v)));
    }

    let Some(chart) = &p.chart else {
        return Ok(Kinematics { transversality: t, rep, basis: Some(basis), ansatz: None, ansatz_error: None });
    };
    let ansatz = match build_ansatz(&p.bundle, &p.action, &basis, chart) {
        Ok(a) => a,
        Err(e @ Error::NotInvariant(_)) => {
            report.set("ansatz_error", e.to_string().into());
            report.line(format!("ansatz: unavailable ({e}); supply an equivariant kinematic_basis"));
            return Ok(Kinematics { transversality: t, rep, basis: Some(basis), ansatz: None, ansatz_error: Some(e) });
        }
        Err(e) => return Err(e.into()),
    };
    let fiber_names: Vec<String> = p.bundle.fiber.iter().map(|v| v.name()).collect();
    report.set("ansatz", named(&fiber_names, &ansatz.section));
    report.line("ansatz:");
    for (n, s) in fiber_names.iter().zip(&ansatz.section) {
        report.line(format!("  {n} = {}", c(s)));
    }
    let d = assemble_kinematic_diagram(&p.bundle, &basis, chart);
    let corner = |(b, f): &(Vec<String>, Vec<String>)| json!({ "base": b, "fiber": f });
    let (inc_names, inc_exprs): (Vec<String>, Vec<RatFunc>) = d.inclusion.iter().cloned().unzip();
    let (proj_names, proj_exprs): (Vec<String>, Vec<RatFunc>) = d.projection.iter().cloned().unzip();
    report.set(
        "diagram",
        json!({
            "quotient": corner(&d.quotient_corner),
            "kinematic": corner(&d.kinematic_corner),
            "bundle": corner(&d.bundle_corner),
            "inclusion": named(&inc_names, &inc_exprs),
            "projection": named(&proj_names, &proj_exprs),
            "identity": d.full_fiber && p.action.generators.iter().all(|_| t.transverse()),
        }),
    );
    let tuple = |(b, f): &(Vec<String>, Vec<String>)| format!("({}; {})", b.join(", "), f.join(", "));
    report.line(format!(
        "diagram: {} <- {} -> {}",
        tuple(&d.quotient_corner),
        tuple(&d.kinematic_corner),
        tuple(&d.bundle_corner)
    ));
    Ok(Kinematics { transversality: t, rep, basis: Some(basis), ansatz: Some(ansatz), ansatz_error: None })
}

fn isotropy_line(rep: &FiberRep) -> String {
    match rep.discrete.len() {
        0 => format!("isotropy dimension: {}", rep.isotropy.len()),
        d => format!("isotropy dimension: {} (+{d} discrete)", rep.isotropy.len()),
    }
}

fn transverse_line(t: &Transversality, full: bool) -> String {
    if t.transverse() && full {
        "transverse: true; κ(E)=E".to_string()
    } else {
        format!("transverse: {} (rank xi = {}, rank [xi, phi] = {})", t.transverse(), t.rank_xi, t.rank_full)
    }
}

fn named_vectors(names: &[String], vectors: &[Vec<RatFunc>]) -> Value {
    Value::Array(names.iter().zip(vectors).map(|(n, v)| json!({ "name": n, "vector": grammar_list(v) })).collect())
}

pub fn cmd_kappa(p: &Problem) -> Result<Report, CliError> {
    let mut report = Report::new("kappa", &p.name);
    kinematics(p, &mut report)?;
    Ok(report)
}

/// Everything the reduce stage produces.
pub struct Reduction {
    pub kinematics: Kinematics,
    pub ansatz: Ansatz,
    pub prolonged: ProlongedAnsatz,
    pub restricted: Vec<RatFunc>,
    pub section: CrossSection,
    pub system: ReducedSystem,
}

pub fn reduction(p: &Problem, order: Option<usize>, report: &mut Report) -> Result<Reduction, CliError> {
    let kin = kinematics(p, report)?;
    let op = p.operator.as_ref().ok_or_else(|| CliError::Usage("the problem has no operator".into()))?;
    if let Some(e) = &kin.ansatz_error {
        return Err(e.clone().into());
    }
    let ansatz = kin
        .ansatz
        .clone()
        .ok_or_else(|| CliError::Usage("reduction needs a linear fiber and a quotient_chart".into()))?;
    let chart = p.chart.as_ref().expect("ansatz implies a chart");
    let k = order.or(p.order).unwrap_or(op.order);
    if k < op.order {
        return Err(CliError::Usage(format!("--order {k} is below the operator order {}", op.order)));
    }
    let pa = prolong(&ansatz, k)?;
    let mut jet_names = Vec::new();
    let mut jet_exprs = Vec::new();
    for ((alpha, idx), e) in &pa.entries {
        if !idx.is_empty() {
            jet_names.push(pa.jets.name(*alpha, idx));
            jet_exprs.push(e.clone());
        }
    }
    report.set("order", k.into());
    report.set("inclusion", named(&jet_names, &jet_exprs));
    report.line(format!("Inv^{k}(E) -> J^{k}(E): {} jet coordinates", jet_names.len()));
    if k <= 1 {
        for (n, e) in jet_names.iter().zip(&jet_exprs) {
            report.line(format!("  {n} = {}", c(e)));
        }
    }

    let restricted = restrict(op, &pa)?;
    let hint = p.target_basis.clone().or_else(|| {
        let same_tags = op.target == p.bundle.blocks && !op.target.is_empty();
        if same_tags {
            p.kinematic_basis.clone()
        } else {
            None
        }
    });
    let kd = kappa_of_d(op, &p.action, &p.bundle.base, &p.point, hint)?;
    report.set(
        "kappa_d",
        json!({ "dimension": kd.dim(), "names": kd.names, "basis": named_vectors(&kd.names, &kd.vectors) }),
    );
    report.line(format!("kappa(D): dimension {}", kd.dim()));
    for (n, v) in kd.names.iter().zip(&kd.vectors) {
        report.line(format!("  {n}: {}", compact_tuple(v)));
    }
    let section = match &p.cross_section {
        Some(values) => CrossSection::explicit(chart, &p.bundle.base, values.clone())?,
        None => CrossSection::automatic(chart, &p.bundle.base)?,
    };
    let mut cs: Vec<(String, String)> = section.values.iter().map(|(k, v)| (k.name(), g(v))).collect();
    cs.sort();
    report.set("cross_section", Value::Object(cs.into_iter().map(|(k, v)| (k, Value::String(v))).collect()));
    let system = extract(&restricted, &kd, &ansatz, &section, &p.parameters)?;
    report.set(
        "reduced",
        json!({
            "quotient": system.quotient.iter().map(|v| v.name()).collect::<Vec<_>>(),
            "unknowns": system.unknowns.iter().map(|v| v.name()).collect::<Vec<_>>(),
            "components": named(&system.names, &system.components),
        }),
    );
    report.set("residual", "0".into());
    report.line("reduced equations:");
    for (n, e) in system.names.iter().zip(&system.components) {
        report.line(format!("  {n} = {}", c(e)));
    }
    report.line("residual: 0");
    Ok(Reduction { kinematics: kin, ansatz, prolonged: pa, restricted, section, system })
}

pub fn cmd_reduce(p: &Problem, order: Option<usize>) -> Result<Report, CliError> {
    let mut report = Report::new("reduce", &p.name);
    reduction(p, order, &mut report)?;
    Ok(report)
}

/// Seeded sample points with coordinates `k/8`, `8 ≤ k ≤ 24`.
pub fn sample_points(n: usize, count: usize) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..count).map(|_| (0..n).map(|_| BigRational::new(rng.gen_range(8..=24).into(), 8.into())).collect()).collect()
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn cmd_check(p: &Problem, order: Option<usize>, points: Option<Vec<Vec<BigRational>>>) -> Result<Report, CliError> {
    let mut report = Report::new("check", &p.name);
    let red = reduction(p, order, &mut report)?;
    let op = p.operator.as_ref().expect("reduction checked the operator");
    let unknown_names: Vec<String> = red.ansatz.unknowns.iter().map(|u| u.name()).collect();
    let candidates = p.candidates(&unknown_names)?;
    let points = points.unwrap_or_else(|| sample_points(p.bundle.base.len(), SAMPLE_POINTS));
    for (i, pt) in points.iter().enumerate() {
        if pt.len() != p.bundle.base.len() {
            return Err(CliError::Usage(format!(
                "point {} has {} coordinates, expected {}",
                i + 1,
                pt.len(),
                p.bundle.base.len()
            )));
        }
    }
    let fpoints: Vec<Vec<f64>> = points.iter().map(|pt| pt.iter().map(to_f64).collect()).collect();
    let mut rows = Vec::new();
    report.line("candidates:");
    report.line(format!(
        "  {:<26} {:<9} {:<9} {:>12} {:>12} {:>8}",
        "name", "symbolic", "lifted", "max |D| h", "max |D| h/2", "ratio"
    ));
    for cand in &candidates {
        let res = reduced_residuals(&red.system, &cand.values)?;
        let symbolic = res.iter().all(|r| r.is_zero());
        let lifted = lift_solution(&red.ansatz, &red.section, &cand.values)?;
        let exact = lifted_residuals(op, &red.ansatz, &lifted)?;
        let lifted_ok = exact.iter().all(|r| r.is_zero());
        let mut row = json!({
            "name": cand.name,
            "symbolic": symbolic,
            "residuals": named(&red.system.names, &res),
            "lifted_exact": lifted_ok,
            "lifted_section": grammar_list(&lifted),
        });
        let missing: Vec<String> = p
            .parameters
            .iter()
            .filter(|v| !cand.parameters.contains_key(v) && lifted.iter().any(|e| e.contains(**v)))
            .map(|v| v.name())
            .collect();
        let mut cells = ("-".to_string(), "-".to_string(), "-".to_string());
        if missing.is_empty() {
            let env: HashMap<Var, f64> = cand.parameters.iter().map(|(k, v)| (*k, to_f64(v))).collect();
            let mut warnings = Vec::new();
            let mut max_h = 0.0_f64;
            let mut max_h2 = 0.0_f64;
            let mut used = 0;
            for (i, pt) in fpoints.iter().enumerate() {
                let one = std::slice::from_ref(pt);
                let a = numeric_lift_check(op, &red.ansatz, &lifted, &env, one, FD_STEP);
                let b = numeric_lift_check(op, &red.ansatz, &lifted, &env, one, FD_STEP / 2.0);
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        max_h = max_h.max(a[0]);
                        max_h2 = max_h2.max(b[0]);
                        used += 1;
                    }
                    (Err(Error::OutsideDomain(_)), _)
                    | (_, Err(Error::OutsideDomain(_)))
                    | (Err(Error::DegenerateMetric), _) => {
                        warnings.push(format!("point {} is singular for this candidate; skipped", i + 1));
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e.into()),
                }
            }
            let ratio = if max_h > 0.0 && max_h2 > 0.0 { max_h / max_h2 } else { f64::NAN };
            row["numeric"] = json!({
                "h": FD_STEP,
                "points": used,
                "max_residual": max_h,
                "max_residual_half_step": max_h2,
                "ratio": if ratio.is_finite() { json!(ratio) } else { Value::Null },
                "warnings": warnings,
            });
            cells = (
                format!("{max_h:.3e}"),
                format!("{max_h2:.3e}"),
                if ratio.is_finite() { format!("{ratio:.2}") } else { "-".into() },
            );
            for w in &warnings {
                report.line(format!("  warning: {w}"));
            }
        } else {
            row["numeric"] = Value::Null;
            row["numeric_skipped"] = format!("no value for parameter(s) {}", missing.join(", ")).into();
        }
        report.line(format!(
            "  {:<26} {:<9} {:<9} {:>12} {:>12} {:>8}",
            cand.name,
            if symbolic { "solution" } else { "no" },
            if lifted_ok { "zero" } else { "nonzero" },
            cells.0,
            cells.1,
            cells.2
        ));
        rows.push(row);
    }
    report.set("candidates", Value::Array(rows));
    report.set(
        "sample_points",
        Value::Array(points.iter().map(|pt| json!(pt.iter().map(|q| q.to_string()).collect::<Vec<_>>())).collect()),
    );
    Ok(report)
}

/// Representation matrices of the isotropy at `point` acting on Taylor
/// coefficients: the dual of the linear isotropy representation.
/// Continuous and discrete generators acting on the jet fiber.
pub type JetRep = (Vec<Matrix<BigRational>>, Vec<Matrix<BigRational>>);

pub fn jet_representation(p: &Problem, point: &Point) -> Result<JetRep, CliError> {
    let n = p.bundle.base.len();
    let block = FiberBlock::new(Tensor::Covector, (0..n).collect());
    let rep = FiberRep::from_blocks(&[block], &p.action, &p.bundle.base, point, true)?;
    let inf = rep.infinitesimal.iter().map(constant_matrix).collect::<Result<Vec<_>, _>>()?;
    let disc = rep.discrete.iter().map(constant_matrix).collect::<Result<Vec<_>, _>>()?;
    Ok((inf, disc))
}

pub fn cmd_jet_kappa(p: &Problem, max_order: Option<usize>) -> Result<Report, CliError> {
    let mut report = Report::new("jet-kappa", &p.name);
    let point = p
        .singular_point
        .as_ref()
        .ok_or_else(|| CliError::Usage("jet-kappa needs `singular_point` in the problem file".into()))?;
    let k_max = max_order.or(p.max_order).unwrap_or(4);
    let n = p.bundle.base.len();
    let fiber_rep = FiberRep::at_point(&p.action, &p.bundle, point, true)?;
    let trivial = fiber_rep.infinitesimal.iter().all(|m| m.is_zero())
        && fiber_rep.discrete.iter().all(|m| m == &Matrix::identity(m.rows()));
    if p.bundle.fiber.len() != 1 || !trivial {
        return Err(Error::Unsupported(
            "jet-kappa needs a one-dimensional fiber on which the isotropy acts trivially".into(),
        )
        .into());
    }
    let (inf, disc) = jet_representation(p, point)?;
    let cap = dim_cap();
    report.set("singular_point", grammar_list(&point.values));
    report.set("isotropy_dimension", inf.len().into());
    report.line(format!("singular point: {}", compact_tuple(&point.values)));
    report.line(format!("isotropy dimension: {} (+{} discrete)", inf.len(), disc.len()));
    report.line(format!("  {:>2} {:>8} {:>5}  note", "k", "ambient", "dim"));
    let mut rows = Vec::new();
    for k in 0..=k_max {
        let jk = jet_kappa(&inf, &disc, n, k, cap)?;
        let basis: Vec<RatFunc> = jk.basis.iter().map(|v| polynomial(&p.bundle.base, k, v)).collect();
        let note = if k % 2 == 1 && jk.dim == 0 { "odd order: vanishes" } else { "" };
        report.line(format!("  {:>2} {:>8} {:>5}  {note}", k, jk.ambient, jk.dim).trim_end());
        rows.push(json!({
            "k": k,
            "ambient": jk.ambient,
            "dimension": jk.dim,
            "basis": grammar_list(&basis),
            "odd_vanishes": k % 2 == 1 && jk.dim == 0,
        }));
    }
    report.set("rows", Value::Array(rows));
    report.set("dimensions", json!(report_dims(&report)));
    Ok(report)
}

fn report_dims(r: &Report) -> Vec<usize> {
    r.json["rows"].as_array().map_or(Vec::new(), |rows| {
        rows.iter().filter_map(|row| row["dimension"].as_u64().map(|d| d as usize)).collect()
    })
}

/// `Σ c_α x^α` over the degree-`k` monomials.
fn polynomial(base: &[Var], k: usize, coeffs: &[BigRational]) -> RatFunc {
    let mut acc = RatFunc::zero();
    for (alpha, q) in monomials(base.len(), k).iter().zip(coeffs) {
        if q == &BigRational::from_integer(0.into()) {
            continue;
        }
        let mut term = RatFunc::from_rational(q);
        for (x, &e) in base.iter().zip(alpha) {
            term = term.mul(&RatFunc::var(*x).pow(e as i32).expect("positive power"));
        }
        acc = acc.add(&term);
    }
    acc
}

/// Parses a `--points` file: a JSON array of points, each an array of
/// numbers or rational strings.
pub fn parse_points(text: &str) -> Result<Vec<Vec<BigRational>>, CliError> {
    let raw: Vec<Vec<Value>> =
        serde_json::from_str(text).map_err(|e| CliError::Json { path: "--points".into(), source: e })?;
    let ctx = symred_core::parse::Context::new();
    raw.iter()
        .map(|pt| {
            pt.iter()
                .map(|v| {
                    let s = match v {
                        Value::String(s) => s.clone(),
                        Value::Number(n) if n.is_i64() => n.to_string(),
                        Value::Number(n) => {
                            let f = n.as_f64().unwrap_or(f64::NAN);
                            return BigRational::from_float(f)
                                .ok_or_else(|| CliError::Usage(format!("point coordinate {n} is not finite")));
                        }
                        other => return Err(CliError::Usage(format!("point coordinate {other} is not a number"))),
                    };
                    ctx.parse_ratfunc(&s)
                        .map_err(|e| CliError::Field { path: "--points".into(), source: e.into() })?
                        .as_rational()
                        .ok_or_else(|| CliError::Usage(format!("point coordinate `{s}` is not a rational number")))
                })
                .collect()
        })
        .collect()
}
