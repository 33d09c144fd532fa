//! Problem files: JSON documents whose expressions are strings in the
//! expression grammar.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_rational::BigRational;
use serde::Deserialize;
use symred_core::atom::Var;
use symred_core::geometry::{
    Action, Bundle, DiscreteFiber, DiscreteGenerator, FiberBlock, InfinitesimalGenerator, Point, QuotientChart, Tensor,
};
use symred_core::jets::JetSpace;
use symred_core::linalg::Matrix;
use symred_core::operators::{euler_operator, laplacian_operator, ricci_operator, OperatorSpec};
use symred_core::parse::Context;
use symred_core::ratfunc::RatFunc;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: Option<String>,
    pub base_coords: Vec<String>,
    #[serde(default)]
    pub fiber_coords: Vec<String>,
    #[serde(default)]
    pub fiber_rep: Vec<BlockSpec>,
    #[serde(default)]
    pub fiber_constraints: Vec<String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default)]
    pub algebraic_generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub quotient_chart: Vec<ChartEntry>,
    #[serde(default)]
    pub generators: Vec<VectorFieldSpec>,
    #[serde(default)]
    pub discrete_generators: Vec<DiscreteSpec>,
    /// Base point for the κ computation; the generic point when absent.
    #[serde(default)]
    pub point: Option<Vec<String>>,
    #[serde(default)]
    pub kinematic_names: Option<Vec<String>>,
    #[serde(default)]
    pub kinematic_basis: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub target_basis: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub operator: Option<OperatorFile>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub candidate_solutions: Vec<CandidateSpec>,
    #[serde(default)]
    pub singular_point: Option<Vec<String>>,
    #[serde(default)]
    pub max_order: Option<usize>,
    /// Base coordinate ↦ expression in quotient coordinates.
    #[serde(default)]
    pub cross_section: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub tag: String,
    /// Base coordinates the tensor lives over; all of them when absent.
    #[serde(default)]
    pub base: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub relation: String,
    #[serde(default)]
    pub derivatives: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartEntry {
    pub name: String,
    pub expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFieldSpec {
    pub xi: Vec<String>,
    #[serde(default)]
    pub phi: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteSpec {
    pub base_map: Vec<String>,
    #[serde(default)]
    pub fiber_matrix: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub fiber_map: Option<Vec<String>>,
    /// Symbol ↦ base coordinate whose value at the point it takes.
    #[serde(default)]
    pub point_params: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    #[serde(default)]
    pub builtin: Option<String>,
    #[serde(default)]
    pub explicit: Option<ExplicitOperator>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitOperator {
    pub order: usize,
    pub components: Vec<String>,
    pub target_rep: Vec<BlockSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub name: String,
    pub values: BTreeMap<String, String>,
    /// Parameter values used by the numeric check.
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
}

/// A candidate solution in quotient coordinates.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub values: HashMap<String, RatFunc>,
    pub parameters: HashMap<Var, BigRational>,
}

/// A validated problem.
pub struct Problem {
    pub name: String,
    /// Base and fiber coordinates, parameters, generators and jet symbols.
    pub ctx: Context,
    pub bundle: Bundle,
    pub action: Action,
    pub chart: Option<QuotientChart>,
    pub point: Point,
    pub kinematic_names: Option<Vec<String>>,
    pub kinematic_basis: Option<Vec<Vec<RatFunc>>>,
    pub target_basis: Option<Vec<Vec<RatFunc>>>,
    pub operator: Option<OperatorSpec>,
    pub order: Option<usize>,
    pub parameters: Vec<Var>,
    pub candidates: Vec<CandidateSpec>,
    pub singular_point: Option<Point>,
    pub max_order: Option<usize>,
    pub cross_section: Option<HashMap<Var, RatFunc>>,
}

fn at<T>(path: impl Into<String>, r: Result<T, impl Into<symred_core::error::Error>>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Field { path: path.into(), source: e.into() })
}

fn invalid(path: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Field { path: path.into(), source: symred_core::error::Error::Invalid(msg.into()) }
}

fn parse_tag(path: &str, tag: &str) -> Result<Tensor, CliError> {
    Ok(match tag {
        "scalar" => Tensor::Scalar,
        "vector" => Tensor::Vector,
        "covector" => Tensor::Covector,
        "sym2_covector" => Tensor::Sym2Covector,
        other => return Err(invalid(path, format!("unknown tensor tag `{other}`"))),
    })
}

fn blocks(path: &str, specs: &[BlockSpec], base: &[String]) -> Result<Vec<FiberBlock>, CliError> {
    specs
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let p = format!("{path}[{i}]");
            let tensor = parse_tag(&format!("{p}.tag"), &b.tag)?;
            let idx = match (&b.base, tensor) {
                (_, Tensor::Scalar) => Vec::new(),
                (None, _) => (0..base.len()).collect(),
                (Some(names), _) => names
                    .iter()
                    .map(|n| {
                        base.iter()
                            .position(|b| b == n)
                            .ok_or_else(|| invalid(&p, format!("`{n}` is not a base coordinate")))
                    })
                    .collect::<Result<_, _>>()?,
            };
            Ok(FiberBlock::new(tensor, idx))
        })
        .collect()
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        let file: ProblemFile =
            serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.display().to_string(), source: e })?;
        Problem::from_file(file, path.file_stem().and_then(|s| s.to_str()).unwrap_or("problem"))
    }

    pub fn from_file(f: ProblemFile, default_name: &str) -> Result<Problem, CliError> {
        let mut ctx = Context::new();
        let n = f.base_coords.len();
        for (i, s) in f.base_coords.iter().enumerate() {
            at(format!("base_coords[{i}]"), ctx.symbol(s))?;
        }
        for (i, s) in f.fiber_coords.iter().enumerate() {
            at(format!("fiber_coords[{i}]"), ctx.symbol(s))?;
        }
        for (i, s) in f.parameters.iter().enumerate() {
            at(format!("parameters[{i}]"), ctx.symbol(s))?;
        }
        for (d, spec) in f.discrete_generators.iter().enumerate() {
            for s in spec.point_params.keys() {
                at(format!("discrete_generators[{d}].point_params"), ctx.symbol(s))?;
            }
        }
        for (i, g) in f.algebraic_generators.iter().enumerate() {
            let rules: Vec<(&str, &str)> = g.derivatives.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
            at(format!("algebraic_generators[{i}]"), ctx.generator(&g.name, &g.relation, &rules))?;
        }
        let var = |ctx: &Context, path: String, s: &str| at(path, ctx.var(s));
        let base: Vec<Var> = f
            .base_coords
            .iter()
            .enumerate()
            .map(|(i, s)| var(&ctx, format!("base_coords[{i}]"), s))
            .collect::<Result<_, _>>()?;
        let fiber: Vec<Var> = f
            .fiber_coords
            .iter()
            .enumerate()
            .map(|(i, s)| var(&ctx, format!("fiber_coords[{i}]"), s))
            .collect::<Result<_, _>>()?;
        let parameters: Vec<Var> = f
            .parameters
            .iter()
            .enumerate()
            .map(|(i, s)| var(&ctx, format!("parameters[{i}]"), s))
            .collect::<Result<_, _>>()?;
        let expr = |ctx: &Context, path: String, s: &str| at(path, ctx.parse_ratfunc(s));
        let exprs = |ctx: &Context, path: &str, xs: &[String], len: usize| -> Result<Vec<RatFunc>, CliError> {
            if xs.len() != len {
                return Err(invalid(path, format!("expected {len} entries, found {}", xs.len())));
            }
            xs.iter().enumerate().map(|(i, s)| expr(ctx, format!("{path}[{i}]"), s)).collect()
        };

        let fiber_blocks = blocks("fiber_rep", &f.fiber_rep, &f.base_coords)?;
        let mut bundle = Bundle::new(base.clone(), fiber.clone());
        if !fiber_blocks.is_empty() {
            bundle = at("fiber_rep", bundle.with_blocks(fiber_blocks))?;
        }
        let constraints = exprs(&ctx, "fiber_constraints", &f.fiber_constraints, f.fiber_constraints.len())?;
        if !constraints.is_empty() {
            bundle = at("fiber_constraints", bundle.with_constraints(constraints))?;
        }

        let mut generators = Vec::new();
        for (a, g) in f.generators.iter().enumerate() {
            let xi = exprs(&ctx, &format!("generators[{a}].xi"), &g.xi, n)?;
            for (i, c) in xi.iter().enumerate() {
                if fiber.iter().any(|u| c.contains(*u)) {
                    return Err(invalid(format!("generators[{a}].xi[{i}]"), "depends on fiber coordinates"));
                }
            }
            let phi = match &g.phi {
                Some(p) => Some(exprs(&ctx, &format!("generators[{a}].phi"), p, fiber.len())?),
                None => None,
            };
            generators.push(InfinitesimalGenerator::new(xi, phi));
        }
        let mut discrete = Vec::new();
        for (d, spec) in f.discrete_generators.iter().enumerate() {
            let p = format!("discrete_generators[{d}]");
            let base_map = exprs(&ctx, &format!("{p}.base_map"), &spec.base_map, n)?;
            let fiber_map = match (&spec.fiber_matrix, &spec.fiber_map) {
                (Some(_), Some(_)) => return Err(invalid(&p, "give either fiber_matrix or fiber_map")),
                (Some(rows), None) => {
                    if rows.len() != fiber.len() {
                        return Err(invalid(
                            format!("{p}.fiber_matrix"),
                            "matrix must be square in the fiber dimension",
                        ));
                    }
                    let rows = rows
                        .iter()
                        .enumerate()
                        .map(|(i, r)| exprs(&ctx, &format!("{p}.fiber_matrix[{i}]"), r, fiber.len()))
                        .collect::<Result<Vec<_>, _>>()?;
                    DiscreteFiber::Matrix(Matrix::from_rows(rows))
                }
                (None, Some(m)) => DiscreteFiber::Map(exprs(&ctx, &format!("{p}.fiber_map"), m, fiber.len())?),
                (None, None) => DiscreteFiber::Tensor,
            };
            let mut point_params = Vec::new();
            for (s, coord) in &spec.point_params {
                let i = f.base_coords.iter().position(|b| b == coord).ok_or_else(|| {
                    invalid(format!("{p}.point_params"), format!("`{coord}` is not a base coordinate"))
                })?;
                point_params.push((var(&ctx, format!("{p}.point_params"), s)?, i));
            }
            discrete.push(DiscreteGenerator { base_map, fiber: fiber_map, point_params });
        }
        let action = Action { generators, discrete };

        let chart = if f.quotient_chart.is_empty() {
            None
        } else {
            let mut names = Vec::new();
            let mut invariants = Vec::new();
            for (i, e) in f.quotient_chart.iter().enumerate() {
                names.push(e.name.clone());
                invariants.push(expr(&ctx, format!("quotient_chart[{i}].expr"), &e.expr)?);
            }
            Some(QuotientChart { names, invariants })
        };

        let point = match &f.point {
            None => Point::generic(&base),
            Some(p) => Point { values: exprs(&ctx, "point", p, n)? },
        };
        let singular_point = match &f.singular_point {
            None => None,
            Some(p) => Some(Point { values: exprs(&ctx, "singular_point", p, n)? }),
        };
        let vectors = |ctx: &Context,
                       path: &str,
                       rows: &Option<Vec<Vec<String>>>,
                       len: usize|
         -> Result<Option<Vec<Vec<RatFunc>>>, CliError> {
            rows.as_ref()
                .map(|rows| rows.iter().enumerate().map(|(i, r)| exprs(ctx, &format!("{path}[{i}]"), r, len)).collect())
                .transpose()
        };
        let kinematic_basis = vectors(&ctx, "kinematic_basis", &f.kinematic_basis, fiber.len())?;

        let operator = match &f.operator {
            None => None,
            Some(OperatorFile { builtin: Some(b), explicit: None }) => Some(at(
                "operator.builtin",
                match b.as_str() {
                    "euler" => euler_operator(&base, &fiber),
                    "laplacian" => laplacian_operator(&base, &fiber),
                    "ricci" => ricci_operator(&base, &fiber),
                    other => return Err(invalid("operator.builtin", format!("unknown operator `{other}`"))),
                },
            )?),
            Some(OperatorFile { builtin: None, explicit: Some(e) }) => {
                let jets = JetSpace::new(base.clone(), fiber.clone(), e.order);
                for (alpha, idx) in jets.coordinates() {
                    let name = jets.name(alpha, &idx);
                    if !ctx.contains(&name) {
                        at("operator.explicit", ctx.symbol(&name))?;
                    }
                }
                let comps = e
                    .components
                    .iter()
                    .enumerate()
                    .map(|(i, s)| expr(&ctx, format!("operator.explicit.components[{i}]"), s))
                    .collect::<Result<Vec<_>, _>>()?;
                let target = blocks("operator.explicit.target_rep", &e.target_rep, &f.base_coords)?;
                Some(at("operator.explicit", OperatorSpec::explicit("explicit", e.order, comps, target))?)
            }
            Some(_) => return Err(invalid("operator", "give exactly one of `builtin` or `explicit`")),
        };
        let target_dim = operator.as_ref().map_or(0, |o| o.dim());
        let target_basis = vectors(&ctx, "target_basis", &f.target_basis, target_dim)?;

        let cross_section = match &f.cross_section {
            None => None,
            Some(map) => {
                let chart = chart.as_ref().ok_or_else(|| invalid("cross_section", "needs a quotient_chart"))?;
                let q = quotient_context(chart, &parameters, &[])
                    .map_err(|e| CliError::Field { path: "quotient_chart".into(), source: e.into() })?;
                let mut out = HashMap::new();
                for (k, v) in map {
                    let b = var(&ctx, format!("cross_section.{k}"), k)?;
                    out.insert(b, at(format!("cross_section.{k}"), q.parse_ratfunc(v))?);
                }
                Some(out)
            }
        };

        Ok(Problem {
            name: f.name.unwrap_or_else(|| default_name.to_string()),
            ctx,
            bundle,
            action,
            chart,
            point,
            kinematic_names: f.kinematic_names,
            kinematic_basis,
            target_basis,
            operator,
            order: f.order,
            parameters,
            candidates: f.candidate_solutions,
            singular_point,
            max_order: f.max_order,
            cross_section,
        })
    }

    /// Parses the candidates in quotient coordinates.
    pub fn candidates(&self, unknowns: &[String]) -> Result<Vec<Candidate>, CliError> {
        let Some(chart) = &self.chart else {
            return Ok(Vec::new());
        };
        let q = quotient_context(chart, &self.parameters, &[])
            .map_err(|e| CliError::Field { path: "quotient_chart".into(), source: e.into() })?;
        let mut out = Vec::new();
        for (i, c) in self.candidates.iter().enumerate() {
            let p = format!("candidate_solutions[{i}]");
            let mut values = HashMap::new();
            for (k, v) in &c.values {
                if !unknowns.contains(k) {
                    return Err(invalid(format!("{p}.values"), format!("`{k}` is not an unknown function")));
                }
                values.insert(k.clone(), at(format!("{p}.values.{k}"), q.parse_ratfunc(v))?);
            }
            let mut parameters = HashMap::new();
            for (k, v) in &c.parameters {
                let var = at(format!("{p}.parameters"), self.ctx.var(k))?;
                if !self.parameters.contains(&var) {
                    return Err(invalid(format!("{p}.parameters"), format!("`{k}` is not a parameter")));
                }
                let value = at(format!("{p}.parameters.{k}"), q.parse_ratfunc(v))?.as_rational().ok_or_else(|| {
                    invalid(format!("{p}.parameters.{k}"), "parameter values must be rational numbers")
                })?;
                parameters.insert(var, value);
            }
            out.push(Candidate { name: c.name.clone(), values, parameters });
        }
        Ok(out)
    }
}

/// Quotient coordinates and parameters as symbols, unknowns as functions of
/// the quotient coordinates.
pub fn quotient_context(
    chart: &QuotientChart,
    parameters: &[Var],
    unknowns: &[String],
) -> Result<Context, symred_core::error::ExprError> {
    let mut q = Context::new();
    for n in &chart.names {
        q.symbol(n)?;
    }
    for p in parameters {
        q.symbol(&p.name())?;
    }
    let args: Vec<&str> = chart.names.iter().map(|s| s.as_str()).collect();
    for u in unknowns {
        q.function(u, &args)?;
    }
    Ok(q)
}

/// Base coordinates, generators and parameters, with the unknowns as
/// functions of the chart atoms: the context ansatz entries print in.
pub fn section_context(
    problem: &Problem,
    arguments: &[Var],
    unknowns: &[String],
) -> Result<Context, symred_core::error::ExprError> {
    let mut c = Context::new();
    for b in &problem.bundle.base {
        c.symbol(&b.name())?;
    }
    for p in &problem.parameters {
        c.symbol(&p.name())?;
    }
    for a in arguments {
        if a.is_generator() {
            c.bind(&a.name(), *a)?;
        }
    }
    for u in unknowns {
        c.function_over(u, arguments.to_vec());
    }
    Ok(c)
}
