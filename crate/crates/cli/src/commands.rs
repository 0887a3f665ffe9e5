//! Subcommand bodies. Each returns the JSON document to print and, for
//! verification, a failure summary.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use malle_core::counting::{self, CountOptions, CountOrdering};
use malle_core::dirichlet::{
    delange_predict, expand, g_at_pole, partial_sum_compare, tail_spread, zeta_factor_estimate, FrobenianFamily,
    ResidueClassifier,
};
use malle_core::invariants::{b_malle, b_twisted, burnside_b, turkelli_b, BaseField};
use malle_core::local::{cohomology_sizes, euler_factor, LocalClass, LocalOrdering};
use malle_core::perm::Permutation;
use malle_core::selmer::{
    cyclic_subgroups, mobius_nodes, wiles_rhs, LocalSizes, SyntheticLocalData, DEFAULT_GROUP_CAP,
};
use malle_core::verify::{self, Suite, VerifyOptions};
use malle_core::{poset, rational};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{self, to_value};
use crate::resolve;
use crate::{GroupArgs, Ordering};

pub struct Outcome {
    pub value: Value,
    pub failure: Option<String>,
}

impl From<Value> for Outcome {
    fn from(value: Value) -> Self {
        Outcome { value, failure: None }
    }
}

fn require<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::validation(format!("{flag} is required")))
}

/// Accepts `10000000`, `10_000_000` or `1e7`.
pub fn parse_bound(s: &str, flag: &str) -> Result<u64, CliError> {
    let t = s.trim().replace('_', "");
    if let Ok(n) = t.parse::<u64>() {
        return Ok(n);
    }
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 => Ok(x as u64),
        _ => Err(CliError::validation(format!("{flag}: expected a nonnegative integer, got {s:?}"))),
    }
}

fn cycles(perms: &[Permutation]) -> Vec<String> {
    perms.iter().map(|p| p.to_string()).collect()
}

fn local_ordering(o: Ordering) -> LocalOrdering {
    match o {
        Ordering::Disc => LocalOrdering::DiscPi,
        Ordering::Ram => LocalOrdering::RamPi,
    }
}

fn count_ordering(o: Ordering) -> CountOrdering {
    match o {
        Ordering::Disc => CountOrdering::Disc,
        Ordering::Ram => CountOrdering::Ram,
    }
}

fn ordering_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Disc => "disc",
        Ordering::Ram => "ram",
    }
}

pub fn invariants(args: &GroupArgs) -> Result<Outcome, CliError> {
    let g = resolve::group(require(&args.group, "--group")?)?;
    let (normal, t) = resolve::normal(&g, args.normal.as_deref())?;
    let (action, gamma) = resolve::action(args.action.as_deref(), &g.group, &t)?;
    let report = b_twisted(&t, &gamma)?;
    let burnside = burnside_b(&t, &gamma)?;
    let malle = b_malle(&g.group, &BaseField::Rationals)?;
    let turkelli = turkelli_b(&g.group, &t, &gamma)?;
    let orbits: Vec<Value> = report
        .orbit_detail
        .iter()
        .map(|o| json!({ "representative": o.representative.to_string(), "members": cycles(&o.members) }))
        .collect();
    Ok(json!({
        "group": g.name,
        "normal": normal,
        "action": action,
        "a": report.a,
        "b": report.b,
        "B": turkelli.value,
        "b_malle": malle,
        "burnside_b": rational::to_string(&burnside),
        "minimal_set": cycles(&report.minimal_set),
        "orbits": orbits,
        "turkelli": { "subgroup": cycles(&turkelli.subgroup), "twist_order": turkelli.twist_order },
    })
    .into())
}

#[derive(Args, Debug)]
pub struct LocalFactorArgs {
    #[command(flatten)]
    pub target: GroupArgs,

    /// Image of Frobenius in G, in cycle notation; without it every pair of the action is used.
    #[arg(long, env = "MALLE_CONJUGATOR")]
    pub conjugator: Option<String>,

    /// Norm of the place modulo the exponent of T.
    #[arg(long, env = "MALLE_UNIT", default_value_t = 1)]
    pub unit: u64,

    #[arg(long, value_enum, env = "MALLE_ORDERING", default_value = "disc")]
    pub ordering: Ordering,
}

pub fn local_factor(args: &LocalFactorArgs) -> Result<Outcome, CliError> {
    let g = resolve::group(require(&args.target.group, "--group")?)?;
    let (normal, t) = resolve::normal(&g, args.target.normal.as_deref())?;
    let (action, classes) = match &args.conjugator {
        Some(c) => {
            let conj = Permutation::parse_cycles(c, g.group.degree())?;
            (Value::Null, vec![LocalClass::regular(conj, args.unit)])
        }
        None => {
            let (name, gamma) = resolve::action(args.target.action.as_deref(), &g.group, &t)?;
            (Value::String(name), gamma.pairs().iter().map(LocalClass::from_pair).collect())
        }
    };
    let ordering = local_ordering(args.ordering);
    let rows = classes
        .iter()
        .map(|cls| {
            let factor = euler_factor(&t, cls, ordering)?;
            let sizes = cohomology_sizes(&t, cls)?;
            let mut row = to_value(&factor)?;
            row["class"] = json!({ "conjugator": cls.conjugator.to_string(), "unit": cls.unit });
            row["sizes"] = to_value(&sizes)?;
            row["mass"] = Value::String(rational::to_string(&factor.mass()));
            Ok(row)
        })
        .collect::<Result<Vec<Value>, CliError>>()?;
    Ok(json!({
        "group": g.name,
        "normal": normal,
        "action": action,
        "ordering": ordering_name(args.ordering),
        "classes": rows,
    })
    .into())
}

#[derive(Args, Debug)]
pub struct EulerArgs {
    /// Frobenian family JSON; replaces --group/--normal/--action.
    #[arg(long, env = "MALLE_FAMILY", conflicts_with = "group")]
    pub family: Option<PathBuf>,

    /// Residue classifier JSON `{modulus, classes}` for a family file.
    #[arg(long, env = "MALLE_CLASSIFIER", requires = "family")]
    pub classifier: Option<PathBuf>,

    #[command(flatten)]
    pub target: GroupArgs,

    #[arg(long, value_enum, env = "MALLE_ORDERING", default_value = "disc")]
    pub ordering: Ordering,

    /// Real point at which G(s) is estimated; must lie right of the pole 1/a.
    #[arg(long, env = "MALLE_S", default_value_t = 2.0)]
    pub s: f64,

    #[arg(long, env = "MALLE_PRIME_BOUND", default_value = "1e6")]
    pub prime_bound: String,

    /// Also expand the Dirichlet series to this bound and compare partial sums with the prediction.
    #[arg(long, env = "MALLE_EXPAND")]
    pub expand: Option<String>,
}

fn decade_bounds(top: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(100u64), |b| b.checked_mul(10))
        .take_while(|&b| b < top)
        .collect();
    out.push(top);
    out
}

pub fn euler(args: &EulerArgs) -> Result<Outcome, CliError> {
    let (source, family, classifier) = match &args.family {
        Some(path) => {
            let family: FrobenianFamily = resolve::read_json(path)?;
            family.validate()?;
            let classifier = match &args.classifier {
                Some(c) => resolve::read_json(c)?,
                None if family.classes.len() == 1 => ResidueClassifier::single_class(),
                None => {
                    return Err(CliError::validation(format!(
                        "family has {} classes; pass --classifier",
                        family.classes.len()
                    )))
                }
            };
            (json!({ "family": path.display().to_string() }), family, classifier)
        }
        None => {
            let g = resolve::group(require(&args.target.group, "--group or --family")?)?;
            let (normal, t) = resolve::normal(&g, args.target.normal.as_deref())?;
            let (action, gamma) = resolve::action(args.target.action.as_deref(), &g.group, &t)?;
            let family = FrobenianFamily::from_twist(&t, &gamma, local_ordering(args.ordering))?;
            let classifier = ResidueClassifier::for_trivial_pi(&gamma)?;
            let source = json!({
                "group": g.name,
                "normal": normal,
                "action": action,
                "ordering": ordering_name(args.ordering),
            });
            (source, family, classifier)
        }
    };
    let prime_bound = parse_bound(&args.prime_bound, "--prime-bound")?;
    if prime_bound < 2 {
        return Err(CliError::validation("--prime-bound must be at least 2"));
    }
    let ab = family.aq_bq();
    let g_s = zeta_factor_estimate(&family, &classifier, args.s, prime_bound)?;
    let mut value = json!({
        "source": source,
        "a": to_value(&ab.a)?,
        "b": rational::to_string(&ab.b),
        "G_estimate": { "s": args.s, "prime_bound": prime_bound, "value": g_s },
        "G_at_pole": Value::Null,
        "prediction": Value::Null,
    });
    if let Some(a) = ab.a.finite() {
        let estimates = g_at_pole(&family, &classifier, &decade_bounds(prime_bound))?;
        let g1 = estimates.last().expect("at least one bound").value;
        let prediction = delange_predict(a, ab.b, g1, 1.0);
        value["G_at_pole"] = json!({
            "estimates": to_value(&estimates)?,
            "tail_spread": tail_spread(&estimates),
        });
        if let Some(n) = &args.expand {
            let n = parse_bound(n, "--expand")? as usize;
            let coeffs = expand(&family, &classifier, n as u64, n)?;
            let grid: Vec<usize> = decade_bounds(n as u64).into_iter().map(|b| b as usize).collect();
            value["expansion"] = to_value(&partial_sum_compare(&coeffs, &prediction, &grid)?)?;
        }
        value["prediction"] = to_value(&prediction)?;
    }
    Ok(value.into())
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// Abelian target: C2, C3, C4, V4, C2xC6, or invariant factors like 2,2.
    #[arg(long, env = "MALLE_GROUP")]
    pub group: String,

    #[arg(long, value_enum, env = "MALLE_ORDERING", default_value = "disc")]
    pub ordering: Ordering,

    /// Largest bound; each count is of maps with ordering value at most the grid point.
    #[arg(long = "X", visible_alias = "x", env = "MALLE_X")]
    pub x: String,

    /// Smallest grid point of the logarithmic grid.
    #[arg(long, env = "MALLE_LO", default_value = "10")]
    pub lo: String,

    #[arg(long, env = "MALLE_PER_DECADE", default_value_t = 10)]
    pub per_decade: u32,

    /// Fit only the points within this many decades of X.
    #[arg(long, env = "MALLE_FIT_DECADES")]
    pub fit_decades: Option<u32>,

    /// Count surjections only.
    #[arg(long, env = "MALLE_SURJECTIVE")]
    pub surjective: bool,

    /// Count fields rather than surjections (divides by |Aut T|).
    #[arg(long, env = "MALLE_FIELDS")]
    pub fields: bool,

    /// Also write the JSON result here.
    #[arg(long, env = "MALLE_JSON")]
    pub json: Option<PathBuf>,

    /// Write a log-log plot of the series here.
    #[arg(long, env = "MALLE_SVG")]
    pub svg: Option<PathBuf>,
}

pub fn count(args: &CountArgs) -> Result<Outcome, CliError> {
    let t = resolve::abelian(&args.group)?;
    let x = parse_bound(&args.x, "--X")?;
    if x == 0 {
        return Err(CliError::validation("--X must be positive"));
    }
    let lo = parse_bound(&args.lo, "--lo")?;
    let grid = if x < 10 || lo >= x { vec![x] } else { counting::log_grid(lo.max(1), x, args.per_decade)? };
    let ordering = count_ordering(args.ordering);
    // The library counts values strictly below each point; the CLI reports `≤ X`.
    let shifted: Vec<u64> = grid.iter().map(|&g| g + 1).collect();
    let mut series = counting::count(
        &t,
        ordering,
        &shifted,
        CountOptions {
            surjective: args.surjective,
            fields: args.fields,
        },
    )?;
    series.grid = grid;
    let (fit_grid, fit_counts): (Vec<u64>, Vec<u128>) = match args.fit_decades {
        Some(d) => {
            let floor = x as f64 / 10f64.powi(d as i32);
            series
                .grid
                .iter()
                .zip(&series.counts)
                .filter(|(&g, _)| g as f64 >= floor * (1.0 - 1e-12))
                .map(|(&g, &n)| (g, n))
                .unzip()
        }
        None => (series.grid.clone(), series.counts.clone()),
    };
    let fit = counting::fit_exponents(&fit_grid, &fit_counts);
    let mut value = to_value(&series)?;
    value["target"] = json!(t.invariant_factors());
    match &fit {
        Ok(f) => value["fit"] = to_value(f)?,
        Err(e) => value["fit_error"] = Value::String(e.to_string()),
    }
    if let Some(path) = &args.json {
        output::write_file(path, &output::render(&value))?;
    }
    if let Some(path) = &args.svg {
        let kind = if args.surjective { "surjective" } else { "all" };
        let title = format!("{kind} {ordering} counts, target {:?}", t.invariant_factors());
        let curve = fit.as_ref().ok().map(|f| (f.alpha, f.beta, f.intercept));
        output::write_file(path, &output::svg_plot(&title, &series.grid, &series.counts, curve))?;
    }
    Ok(value.into())
}

#[derive(Args, Debug)]
pub struct MobiusArgs {
    /// Order of a cyclic group.
    #[arg(long, env = "MALLE_ORDER", conflicts_with = "group")]
    pub order: Option<u64>,

    /// Abelian group, as for `count --group`.
    #[arg(long)]
    pub group: Option<String>,

    /// Check against the recursive poset definition up to this group order.
    #[arg(long, env = "MALLE_ORACLE_MAX_ORDER", default_value_t = 60)]
    pub oracle_max_order: u64,
}

pub fn mobius(args: &MobiusArgs) -> Result<Outcome, CliError> {
    let g = match (&args.order, &args.group) {
        (Some(n), _) => {
            if *n == 0 {
                return Err(CliError::validation("--order must be positive"));
            }
            malle_core::selmer::FiniteAbelianGroup::cyclic(*n)?
        }
        (None, Some(r)) => resolve::abelian(r)?,
        (None, None) => return Err(CliError::validation("pass --order or --group")),
    };
    let nodes = cyclic_subgroups(&g, DEFAULT_GROUP_CAP)?;
    let subgroups: Vec<_> = nodes.iter().map(|n| n.subgroup(&g)).collect();
    let matrix: Vec<Vec<i64>> = nodes
        .iter()
        .map(|lower| nodes.iter().map(|upper| mobius_nodes(&g, lower, upper)).collect())
        .collect();
    let oracle = if g.invariant_factors().iter().product::<u64>() <= args.oracle_max_order {
        let le = |i: usize, j: usize| subgroups[i].is_subgroup_of(&subgroups[j]);
        let agrees = (0..nodes.len())
            .all(|i| (0..nodes.len()).all(|j| poset::mobius_recursive(nodes.len(), le, i, j) == matrix[i][j]));
        json!(agrees)
    } else {
        Value::Null
    };
    let nodes_json: Vec<Value> = nodes
        .iter()
        .map(|n| json!({ "generator": g.tuple(n.generator), "order": n.order }))
        .collect();
    Ok(json!({
        "group": g.invariant_factors(),
        "nodes": nodes_json,
        "mobius": matrix,
        "oracle_agrees": oracle,
    })
    .into())
}

#[derive(Args, Debug)]
pub struct WilesArgs {
    /// `{locals: [{l_size, h0_size}], h0_t, h0_tstar}`.
    #[arg(long, env = "MALLE_INPUT", conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,

    /// Synthetic local data: group, unramified generators, pairing, conditions.
    #[arg(long, env = "MALLE_SYNTHETIC")]
    pub synthetic: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WilesInput {
    locals: Vec<LocalSizes>,
    h0_t: u64,
    h0_tstar: u64,
}

pub fn wiles_eval(args: &WilesArgs) -> Result<Outcome, CliError> {
    if let Some(path) = &args.input {
        let input: WilesInput = resolve::read_json(path)?;
        let ratio = wiles_rhs(&input.locals, input.h0_t, input.h0_tstar)?;
        return Ok(json!({
            "places": input.locals.len(),
            "h0_t": input.h0_t,
            "h0_tstar": input.h0_tstar,
            "ratio": rational::to_string(&ratio),
        })
        .into());
    }
    let path = args.synthetic.as_ref().expect("clap requires one input");
    let data: SyntheticLocalData = resolve::read_json(path)?;
    Ok(to_value(&data.evaluate()?)?.into())
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// mblocal, mobius, burnside, sieve or all.
    #[arg(default_value = "all")]
    pub suite: String,

    /// Keep only cases whose name contains this text.
    #[arg(long, env = "MALLE_FILTER")]
    pub filter: Option<String>,

    /// Largest cyclic order for the Möbius suite.
    #[arg(long, env = "MALLE_MAX_ORDER", default_value_t = 60)]
    pub max_order: u64,

    /// Largest bound for the sieve suite.
    #[arg(long, env = "MALLE_SIEVE_BOUND", default_value = "1e4")]
    pub sieve_bound: String,
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::from_str(&args.suite).map_err(|e| CliError::resolution(e.to_string()))?]
    };
    let options = VerifyOptions {
        filter: args.filter.clone(),
        mobius_max_order: args.max_order,
        sieve_bound: parse_bound(&args.sieve_bound, "--sieve-bound")?,
    };
    let mut reports = Vec::new();
    let mut failed = 0usize;
    for suite in suites {
        let report = verify::run(suite, &options)?;
        for w in &report.warnings {
            eprintln!("warning: {suite}: {w}");
        }
        for f in report.failures() {
            eprintln!("FAIL {suite} {}: {}", f.case, f.detail);
            failed += 1;
        }
        reports.push(report);
    }
    let passed = failed == 0;
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "suite": r.suite.to_string(),
                "cases": r.cases.len(),
                "failures": r.failures().count(),
                "passed": r.passed(),
            })
        })
        .collect();
    Ok(Outcome {
        value: json!({ "passed": passed, "summary": summary, "reports": to_value(&reports)? }),
        failure: (!passed).then(|| format!("{failed} verification case(s) failed")),
    })
}
