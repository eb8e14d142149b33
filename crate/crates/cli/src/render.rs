//! Report construction: JSON (default) and a text layout that prints
//! matrices as aligned rows for human diffing.

use num::{BigInt, BigRational};
use serde_json::{json, Map, Value};

use transpoly::ehrhart::EhrhartReport;
use transpoly::mgf::MgfExpression;
use transpoly::perturb::{
    matrix_from_limit_at, PerturbError, PerturbationGrouping, PerturbationSpec,
};
use transpoly::polytope::{feasible_cone_rays, is_nondegenerate, Margins, VertexRecord};
use transpoly::rat;

use crate::verify::CheckOutcome;

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

/// A matrix of rationals as aligned text rows.
fn matrix_text(entries: &[Vec<BigRational>], indent: &str) -> String {
    let cells: Vec<Vec<String>> = entries
        .iter()
        .map(|row| row.iter().map(rat::format).collect())
        .collect();
    aligned(&cells, indent)
}

/// A matrix of machine integers as aligned text rows.
fn int_matrix_text(entries: &[Vec<i64>], indent: &str) -> String {
    let cells: Vec<Vec<String>> = entries
        .iter()
        .map(|row| row.iter().map(i64::to_string).collect())
        .collect();
    aligned(&cells, indent)
}

fn aligned(cells: &[Vec<String>], indent: &str) -> String {
    let cols = cells.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|j| cells.iter().map(|row| row[j].len()).max().unwrap_or(0))
        .collect();
    cells
        .iter()
        .map(|row| {
            let line = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:>w$}"))
                .collect::<Vec<_>>()
                .join(" ");
            format!("{indent}{line}")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn edge_list_text(vertex: &VertexRecord) -> String {
    vertex
        .aux()
        .edges()
        .iter()
        .map(|e| {
            let (i, j) = (e.position().0 + 1, e.position().1 + 1);
            format!("({i},{j})")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn vertices(margins: &Margins, vertices: &[VertexRecord], text: bool) -> String {
    if !text {
        let items: Vec<Value> = vertices
            .iter()
            .map(|v| {
                json!({
                    "matrix": v.matrix(),
                    "support": v.aux().edges(),
                    "degenerate": v.is_degenerate(),
                })
            })
            .collect();
        return pretty(&json!({
            "margins": margins,
            "dimension": margins.dimension(),
            "nondegenerate": is_nondegenerate(margins),
            "vertex_count": vertices.len(),
            "vertices": items,
        }));
    }
    let mut out = vec![
        format!("polytope {margins}"),
        format!(
            "dimension {}, {} ({} vertices)",
            margins.dimension(),
            if is_nondegenerate(margins) {
                "non-degenerate"
            } else {
                "degenerate"
            },
            vertices.len()
        ),
    ];
    for (idx, v) in vertices.iter().enumerate() {
        out.push(format!(
            "vertex {idx}: support {}{}",
            edge_list_text(v),
            if v.is_degenerate() {
                "  [degenerate]"
            } else {
                ""
            }
        ));
        out.push(matrix_text(v.matrix().entries(), "  "));
    }
    out.join("\n")
}

pub fn cones(margins: &Margins, vertices: &[VertexRecord], text: bool) -> String {
    let rays_of: Vec<_> = vertices.iter().map(feasible_cone_rays).collect();
    if !text {
        let items: Vec<Value> = vertices
            .iter()
            .zip(&rays_of)
            .map(|(v, rays)| {
                json!({
                    "matrix": v.matrix(),
                    "degenerate": v.is_degenerate(),
                    "ray_count": rays.len(),
                    "rays": rays,
                })
            })
            .collect();
        return pretty(&json!({
            "margins": margins,
            "dimension": margins.dimension(),
            "vertices": items,
        }));
    }
    let mut out = vec![format!("feasible cones of {margins}")];
    for (idx, (v, rays)) in vertices.iter().zip(&rays_of).enumerate() {
        out.push(format!("vertex {idx} ({} rays):", rays.len()));
        out.push(matrix_text(v.matrix().entries(), "  "));
        for (r, ray) in rays.iter().enumerate() {
            out.push(format!("  ray {r}:"));
            out.push(int_matrix_text(ray.entries(), "    "));
        }
    }
    out.join("\n")
}

#[allow(clippy::result_large_err)] // diagnostic-rich error, cold path
pub fn perturbation(
    spec: &PerturbationSpec,
    grouping: &PerturbationGrouping,
    t: &BigRational,
    text: bool,
) -> Result<String, PerturbError> {
    // Matrices at the requested parameter (the stored ones are at t0).
    let mut matrices = Vec::with_capacity(grouping.perturbed().len());
    for pv in grouping.perturbed() {
        if t == spec.t0() {
            matrices.push(pv.matrix_at_t0().clone());
        } else {
            matrices.push(matrix_from_limit_at(spec, pv.tree(), pv.limit(), t)?);
        }
    }

    if !text {
        let items: Vec<Value> = grouping
            .perturbed()
            .iter()
            .zip(&matrices)
            .map(|(pv, matrix)| {
                json!({
                    "tree": pv.tree().edges(),
                    "matrix_at_t": matrix,
                    "limit": pv.limit(),
                })
            })
            .collect();
        let mut groups = Map::new();
        for group in grouping.groups() {
            groups.insert(group.limit().key(), json!(group.members()));
        }
        return Ok(pretty(&json!({
            "base": spec.base(),
            "k_lcm": spec.k_lcm().to_string(),
            "t0": rat::format(spec.t0()),
            "t": rat::format(t),
            "perturbed_vertices": items,
            "groups": Value::Object(groups),
        })));
    }

    let mut out = vec![
        format!("perturbation of {}", spec.base()),
        format!(
            "K = {}, t0 = {}, evaluated at t = {}",
            spec.k_lcm(),
            rat::format(spec.t0()),
            rat::format(t)
        ),
        format!(
            "{} perturbed vertices in {} groups",
            grouping.perturbed().len(),
            grouping.groups().len()
        ),
    ];
    for group in grouping.groups() {
        out.push(format!(
            "group {} <- perturbed {:?}",
            group.limit().key(),
            group.members()
        ));
        out.push(matrix_text(group.limit().entries(), "  "));
        for &idx in group.members() {
            let pv = &grouping.perturbed()[idx];
            let tree = pv
                .tree()
                .edges()
                .iter()
                .map(|e| {
                    let (i, j) = (e.position().0 + 1, e.position().1 + 1);
                    format!("({i},{j})")
                })
                .collect::<Vec<_>>()
                .join(" ");
            out.push(format!("  perturbed {idx}: tree {tree}"));
            out.push(matrix_text(matrices[idx].entries(), "    "));
        }
    }
    Ok(out.join("\n"))
}

pub fn mgf(expr: &MgfExpression, text: bool) -> String {
    if !text {
        let mut value = serde_json::to_value(expr).expect("expression serializes");
        value["term_count"] = json!(expr.terms().len());
        return pretty(&value);
    }
    let shape = expr.shape();
    let mut out = vec![format!(
        "generating function over {} x {} matrices, {} terms",
        shape.m,
        shape.n,
        expr.terms().len()
    )];
    for (idx, term) in expr.terms().iter().enumerate() {
        out.push(format!(
            "term {idx}: sign {}, apex:",
            if term.sign() > 0 { "+" } else { "-" }
        ));
        out.push(int_matrix_text(term.apex(), "  "));
        for (r, ray) in term.rays().iter().enumerate() {
            out.push(format!("  ray {r}:"));
            out.push(int_matrix_text(ray.entries(), "    "));
        }
    }
    out.join("\n")
}

fn polynomial_text(report: &EhrhartReport) -> String {
    let terms: Vec<String> = report
        .polynomial()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| match k {
            0 => rat::format(c),
            1 => format!("({}) t", rat::format(c)),
            _ => format!("({}) t^{k}", rat::format(c)),
        })
        .collect();
    terms.join(" + ")
}

pub fn ehrhart(report: &EhrhartReport, text: bool) -> String {
    if !text {
        return pretty(&serde_json::to_value(report).expect("report serializes"));
    }
    [
        format!("i(t) = {}", polynomial_text(report)),
        format!("dimension {}", report.dim()),
        format!(
            "leading coefficient {}",
            rat::format(report.volume().leading())
        ),
        format!(
            "normalized volume {}",
            rat::format(report.volume().normalized())
        ),
        format!("direction base {}", report.direction_base()),
    ]
    .join("\n")
}

pub fn volume(report: &EhrhartReport, text: bool) -> String {
    if !text {
        let mut value = serde_json::to_value(report.volume()).expect("volume serializes");
        value["direction_base"] = json!(report.direction_base());
        return pretty(&value);
    }
    [
        format!("dimension {}", report.dim()),
        format!(
            "leading coefficient {}",
            rat::format(report.volume().leading())
        ),
        format!(
            "normalized volume {}",
            rat::format(report.volume().normalized())
        ),
        format!("direction base {}", report.direction_base()),
    ]
    .join("\n")
}

/// Counts render as JSON numbers when they fit, decimal strings otherwise.
fn count_value(count: &BigInt) -> Value {
    match u64::try_from(count) {
        Ok(small) => json!(small),
        Err(_) => json!(count.to_string()),
    }
}

pub fn central_counts(vertices: &BigInt, max_vertices: &BigInt, text: bool) -> String {
    if !text {
        return pretty(&json!({
            "vertices": count_value(vertices),
            "max_vertices": count_value(max_vertices),
        }));
    }
    [
        format!("vertices: {vertices}"),
        format!("max perturbed vertices: {max_vertices}"),
    ]
    .join("\n")
}

pub fn verification(seed: u64, outcomes: &[CheckOutcome], text: bool) -> String {
    let ok = !outcomes.iter().any(CheckOutcome::failed);
    if !text {
        let checks: Vec<Value> = outcomes
            .iter()
            .map(|o| {
                json!({
                    "name": o.name(),
                    "status": o.status_str(),
                    "detail": o.detail(),
                })
            })
            .collect();
        return pretty(&json!({
            "seed": seed,
            "status": if ok { "ok" } else { "failed" },
            "checks": checks,
        }));
    }
    let mut out = vec![format!(
        "verification (seed {seed}): {}",
        if ok { "ok" } else { "FAILED" }
    )];
    for o in outcomes {
        out.push(format!("{:7} {}: {}", o.status_str(), o.name(), o.detail()));
    }
    out.join("\n")
}
