//! Self-checks behind the `verify` subcommand: every fast-path result is
//! recomputed by an independent (usually brute-force) route and compared.
//! All checks run even after a failure; the caller reports the first
//! counterexample and exits nonzero.

use std::collections::BTreeSet;

use num::{BigInt, BigRational};

use transpoly::central::{
    central_counts, central_margins, central_mgf, central_vertices, enumerate_partitions,
    enumerate_trees,
};
use transpoly::ehrhart::ehrhart;
use transpoly::graph::Edge;
use transpoly::mgf::polytope_mgf;
use transpoly::oracle::{
    brute_lattice_points, brute_vertices, count_dilated_lattice_points, monomial_sum,
    seeded_points, MAX_CELLS,
};
use transpoly::perturb::{
    enumerate_perturbed_vertices, make_spec, matrix_from_limit_at, perturbed_trees_at,
};
use transpoly::polytope::{enumerate_vertices, is_nondegenerate, Margins};

enum Status {
    Ok,
    Failed,
    Skipped,
}

pub struct CheckOutcome {
    name: String,
    status: Status,
    detail: String,
}

impl CheckOutcome {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn detail(&self) -> &str {
        &self.detail
    }

    pub fn status_str(&self) -> &'static str {
        match self.status {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::Skipped => "skipped",
        }
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Failed)
    }

    /// What the failure report prints: the check's name and the first
    /// disagreement it found.
    pub fn counterexample(&self) -> String {
        format!("{}: {}", self.name, self.detail)
    }
}

/// `Ok(Pass(..))` and `Ok(Skip(..))` describe a completed check; `Err` is
/// a counterexample (or an unexpected library error, which also fails the
/// check rather than aborting the run).
enum CheckResult {
    Pass(String),
    Skip(String),
}

fn check(name: &str, body: impl FnOnce() -> Result<CheckResult, String>) -> CheckOutcome {
    let (status, detail) = match body() {
        Ok(CheckResult::Pass(detail)) => (Status::Ok, detail),
        Ok(CheckResult::Skip(detail)) => (Status::Skipped, detail),
        Err(detail) => (Status::Failed, detail),
    };
    CheckOutcome {
        name: name.to_string(),
        status,
        detail,
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn key_set(keys: impl IntoIterator<Item = String>) -> BTreeSet<String> {
    keys.into_iter().collect()
}

fn compare_key_sets(
    what: &str,
    fast: BTreeSet<String>,
    reference: BTreeSet<String>,
) -> Result<(), String> {
    if fast == reference {
        return Ok(());
    }
    if let Some(extra) = fast.difference(&reference).next() {
        return Err(format!("{what}: {extra} found by fast path only"));
    }
    let missing = reference
        .difference(&fast)
        .next()
        .expect("sets differ, so one side has an extra element");
    Err(format!("{what}: {missing} found by reference only"))
}

fn too_large(margins: &Margins) -> Option<CheckResult> {
    let cells = margins.m() * margins.n();
    if cells > MAX_CELLS {
        Some(CheckResult::Skip(format!(
            "{cells} cells exceed the brute-force bound of {MAX_CELLS}"
        )))
    } else {
        None
    }
}

fn vertex_enumeration(margins: &Margins) -> Result<CheckResult, String> {
    if let Some(skip) = too_large(margins) {
        return Ok(skip);
    }
    let fast = enumerate_vertices(margins).map_err(err)?;
    let reference = brute_vertices(margins).map_err(err)?;
    compare_key_sets(
        "vertex sets differ",
        key_set(fast.iter().map(|v| v.matrix().key())),
        key_set(reference.iter().map(|v| v.matrix().key())),
    )?;
    Ok(CheckResult::Pass(format!(
        "{} vertices match the support-set search",
        fast.len()
    )))
}

fn degeneracy_classifier(margins: &Margins) -> Result<CheckResult, String> {
    if let Some(skip) = too_large(margins) {
        return Ok(skip);
    }
    let classified = is_nondegenerate(margins);
    let definitional = brute_vertices(margins)
        .map_err(err)?
        .iter()
        .all(|v| !v.is_degenerate());
    if classified == definitional {
        Ok(CheckResult::Pass(format!(
            "subset-sum classifier and vertex supports agree: {}",
            if classified {
                "non-degenerate"
            } else {
                "degenerate"
            }
        )))
    } else {
        Err(format!(
            "classifier says non-degenerate = {classified}, vertex supports say {definitional}"
        ))
    }
}

fn perturbed_vertices(margins: &Margins) -> Result<CheckResult, String> {
    if let Some(skip) = too_large(margins) {
        return Ok(skip);
    }
    let spec = make_spec(margins);
    let fast = enumerate_perturbed_vertices(&spec).map_err(err)?;
    let perturbed_margins = spec.margins_at(spec.t0()).map_err(err)?;
    let reference = brute_vertices(&perturbed_margins).map_err(err)?;
    compare_key_sets(
        "perturbed vertex sets differ",
        key_set(fast.iter().map(|pv| pv.matrix_at_t0().key())),
        key_set(reference.iter().map(|v| v.matrix().key())),
    )?;
    Ok(CheckResult::Pass(format!(
        "{} perturbed vertices match the support-set search",
        fast.len()
    )))
}

fn parameter_independence(margins: &Margins) -> Result<CheckResult, String> {
    let spec = make_spec(margins);
    let third = spec.admissible_bound() / BigRational::from_integer(BigInt::from(3));
    let tree_set = |t: &BigRational| -> Result<BTreeSet<Vec<Edge>>, String> {
        Ok(perturbed_trees_at(&spec, t)
            .map_err(err)?
            .iter()
            .map(|tree| tree.edges().to_vec())
            .collect())
    };
    let at_t0 = tree_set(spec.t0())?;
    let at_third = tree_set(&third)?;
    if at_t0 == at_third {
        Ok(CheckResult::Pass(format!(
            "{} support trees identical at two parameters",
            at_t0.len()
        )))
    } else {
        Err(format!(
            "support trees depend on the parameter: {} at t0, {} at bound/3",
            at_t0.len(),
            at_third.len()
        ))
    }
}

fn limit_reconstruction(margins: &Margins) -> Result<CheckResult, String> {
    let spec = make_spec(margins);
    let perturbed = enumerate_perturbed_vertices(&spec).map_err(err)?;
    for (idx, pv) in perturbed.iter().enumerate() {
        let rebuilt = matrix_from_limit_at(&spec, pv.tree(), pv.limit(), spec.t0()).map_err(err)?;
        if rebuilt != *pv.matrix_at_t0() {
            return Err(format!(
                "perturbed vertex {idx}: reconstruction from the limit gives {} instead of {}",
                rebuilt.key(),
                pv.matrix_at_t0().key()
            ));
        }
    }
    Ok(CheckResult::Pass(format!(
        "all {} perturbed vertices reconstructed from their limits",
        perturbed.len()
    )))
}

/// First `wanted` seeded points where the expression has no pole, each paired
/// with its evaluation.
fn usable_evaluations(
    expr: &transpoly::mgf::MgfExpression,
    seed: u64,
    wanted: usize,
) -> Vec<(Vec<Vec<BigRational>>, BigRational)> {
    let mut found = Vec::new();
    for z in seeded_points(expr.shape(), seed, 5 * wanted) {
        if let Ok(value) = expr.evaluate(&z) {
            found.push((z, value));
            if found.len() == wanted {
                break;
            }
        }
    }
    found
}

fn mgf_evaluation(margins: &Margins, seed: u64) -> Result<CheckResult, String> {
    if !margins.is_integral() {
        return Ok(CheckResult::Skip(
            "margins are not integral, so there is no lattice-point sum to compare".into(),
        ));
    }
    if let Some(skip) = too_large(margins) {
        return Ok(skip);
    }
    let expr = polytope_mgf(margins).map_err(err)?;
    let points = brute_lattice_points(margins).map_err(err)?;
    let evals = usable_evaluations(&expr, seed, 5);
    if evals.is_empty() {
        return Err("no pole-free evaluation points among the seeded candidates".into());
    }
    for (idx, (z, value)) in evals.iter().enumerate() {
        let expected = monomial_sum(&points, z);
        if *value != expected {
            return Err(format!(
                "evaluation point {idx}: generating function gives {value}, lattice sum gives {expected}"
            ));
        }
    }
    Ok(CheckResult::Pass(format!(
        "{} evaluation points agree with the lattice-point sum ({} points)",
        evals.len(),
        points.len()
    )))
}

fn mgf_dilation(margins: &Margins, seed: u64) -> Result<CheckResult, String> {
    if !margins.is_integral() {
        return Ok(CheckResult::Skip(
            "margins are not integral, so there is no lattice-point sum to compare".into(),
        ));
    }
    if let Some(skip) = too_large(margins) {
        return Ok(skip);
    }
    let dilated = polytope_mgf(margins).map_err(err)?.dilate(2);
    let points = brute_lattice_points(&margins.dilated(2)).map_err(err)?;
    let evals = usable_evaluations(&dilated, seed, 5);
    if evals.is_empty() {
        return Err("no pole-free evaluation points among the seeded candidates".into());
    }
    for (idx, (z, value)) in evals.iter().enumerate() {
        let expected = monomial_sum(&points, z);
        if *value != expected {
            return Err(format!(
                "dilation 2, point {idx}: generating function gives {value}, lattice sum gives {expected}"
            ));
        }
    }
    Ok(CheckResult::Pass(format!(
        "dilation 2 agrees with the lattice-point sum at {} points",
        evals.len()
    )))
}

fn ehrhart_counts(margins: &Margins) -> Result<CheckResult, String> {
    if !margins.is_integral() {
        return Ok(CheckResult::Skip(
            "counting polynomial is defined for integral margins only".into(),
        ));
    }
    if let Some(skip) = too_large(margins) {
        return Ok(skip);
    }
    let report = ehrhart(margins).map_err(err)?;
    for t in 0..=3u64 {
        let predicted = report.polynomial().count_at(t);
        let counted = count_dilated_lattice_points(margins, t).map_err(err)?;
        if predicted != counted {
            return Err(format!(
                "dilation {t}: polynomial predicts {predicted}, enumeration finds {counted}"
            ));
        }
    }
    Ok(CheckResult::Pass(
        "polynomial matches lattice-point counts at dilations 0..3".into(),
    ))
}

fn central_count_check(k: usize, n: usize) -> Result<CheckResult, String> {
    let (vertex_count, max_count) = central_counts(k, n);
    let partitions = BigInt::from(enumerate_partitions(k, n).len());
    if vertex_count != partitions {
        return Err(format!(
            "closed form counts {vertex_count} vertices, enumeration finds {partitions}"
        ));
    }
    let trees = BigInt::from(enumerate_trees(k, n).map_err(err)?.len());
    if max_count != trees {
        return Err(format!(
            "closed form counts {max_count} perturbed vertices, enumeration finds {trees}"
        ));
    }
    Ok(CheckResult::Pass(format!(
        "closed forms match enumeration: {vertex_count} vertices, {max_count} perturbed"
    )))
}

fn central_vertex_check(k: usize, n: usize, a: u64) -> Result<CheckResult, String> {
    let fast = central_vertices(k, n, a).map_err(err)?;
    let margins = central_margins(k, n, a).map_err(err)?;
    let general = enumerate_vertices(&margins).map_err(err)?;
    compare_key_sets(
        "central vertex sets differ",
        key_set(fast.iter().map(|m| m.key())),
        key_set(general.iter().map(|v| v.matrix().key())),
    )?;
    Ok(CheckResult::Pass(format!(
        "{} vertices from the block-partition path match the general path",
        fast.len()
    )))
}

fn central_mgf_check(k: usize, n: usize, a: u64) -> Result<CheckResult, String> {
    let fast = central_mgf(k, n, a).map_err(err)?;
    let margins = central_margins(k, n, a).map_err(err)?;
    let general = polytope_mgf(&margins).map_err(err)?;
    let fast_value = serde_json::to_value(&fast).map_err(err)?;
    let general_value = serde_json::to_value(&general).map_err(err)?;
    if fast_value != general_value {
        return Err(format!(
            "term lists differ: {} terms from the block-partition path, {} from the general path",
            fast.terms().len(),
            general.terms().len()
        ));
    }
    Ok(CheckResult::Pass(format!(
        "{} terms structurally identical on both paths",
        fast.terms().len()
    )))
}

/// Run every applicable check. `central` carries `(k, n, a)` when the
/// polytope was given in block form, enabling the fast-path comparisons.
pub fn run_checks(
    margins: &Margins,
    central: Option<(usize, usize, u64)>,
    seed: u64,
) -> Vec<CheckOutcome> {
    let mut outcomes = vec![
        check("vertex-enumeration", || vertex_enumeration(margins)),
        check("degeneracy-classifier", || degeneracy_classifier(margins)),
        check("perturbed-vertices", || perturbed_vertices(margins)),
        check("parameter-independence", || parameter_independence(margins)),
        check("limit-reconstruction", || limit_reconstruction(margins)),
        check("mgf-evaluation", || mgf_evaluation(margins, seed)),
        check("mgf-dilation", || mgf_dilation(margins, seed)),
        check("ehrhart-counts", || ehrhart_counts(margins)),
    ];
    if let Some((k, n, a)) = central {
        outcomes.push(check("central-counts", || central_count_check(k, n)));
        outcomes.push(check("central-vertices", || central_vertex_check(k, n, a)));
        outcomes.push(check("central-mgf", || central_mgf_check(k, n, a)));
    }
    outcomes
}
