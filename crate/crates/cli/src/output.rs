//! Rendering of generator sets and run reports.
//!
//! Everything written to stdout is a pure function of the map and the
//! options, so repeated runs can be compared byte for byte; timings only go
//! to the report.

use std::fmt::Write as _;

use implicit_core::{GeneratorSet, GradingMatrix, KernelRun, LevelReport, RingMap};
use serde_json::{json, Value};

use crate::mapfile::terms_json;

/// Runs of consecutive generators sharing weighted degree and multidegree.
fn groups(set: &GeneratorSet) -> Vec<&[implicit_core::Generator]> {
    set.as_slice()
        .chunk_by(|a, b| a.multidegree == b.multidegree)
        .collect()
}

/// One line per generator under a `#` header per (degree, multidegree) group.
pub fn generators_text(map: &RingMap, set: &GeneratorSet) -> String {
    let mut out = String::new();
    for group in groups(set) {
        let md = &group[0].multidegree;
        let _ = writeln!(
            out,
            "# degree {} multidegree {} ({} generator{})",
            md.weighted_degree,
            md,
            group.len(),
            if group.len() == 1 { "" } else { "s" }
        );
        for g in group {
            let _ = writeln!(out, "{}", g.poly.display(map.domain_names()));
        }
    }
    out
}

pub fn generators_json(map: &RingMap, grading: &GradingMatrix, set: &GeneratorSet) -> String {
    let groups: Vec<Value> = groups(set)
        .into_iter()
        .map(|group| {
            let md = &group[0].multidegree;
            json!({
                "degree": md.weighted_degree,
                "multidegree": md.beta,
                "generators": group
                    .iter()
                    .map(|g| terms_json(&g.poly, map.domain_names()))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let value = json!({
        "domain_vars": map.domain_names(),
        "grading": {
            "rows": grading.rows(),
            "positive_weight": grading.positive_weight(),
        },
        "generator_count": set.len(),
        "groups": groups,
    });
    let mut out = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
    out.push('\n');
    out
}

/// Options echoed into reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptionsEcho {
    pub max_degree: i64,
    pub skip: bool,
    pub trim: bool,
    pub prescreen: bool,
    pub naive: bool,
    pub threads: usize,
    pub seed: u64,
    pub prime: u64,
}

/// Counts must reconcile on every level; a mismatch is an engine bug.
pub fn check_reconciliation(levels: &[LevelReport]) -> Result<(), String> {
    for l in levels {
        let accounted = l.skipped_matroid + l.skipped_prescreen + l.solved;
        if accounted != l.multidegrees {
            return Err(format!(
                "degree {}: {} multidegrees but {} skipped + {} screened + {} solved",
                l.degree, l.multidegrees, l.skipped_matroid, l.skipped_prescreen, l.solved
            ));
        }
    }
    Ok(())
}

pub fn report_table(run: &KernelRun, echo: &OptionsEcho) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "grading rank {}, seed {}, prime {}{}",
        run.grading.rank(),
        echo.seed,
        run.jacobian_prime.unwrap_or(echo.prime),
        if echo.naive { " (naive)" } else { "" }
    );
    let _ = writeln!(
        out,
        "{:>6} {:>10} {:>12} {:>10} {:>10} {:>8} {:>10} {:>9}",
        "degree",
        "monomials",
        "multidegrees",
        "skipped",
        "screened",
        "solved",
        "generators",
        "seconds"
    );
    for l in &run.levels {
        let _ = writeln!(
            out,
            "{:>6} {:>10} {:>12} {:>10} {:>10} {:>8} {:>10} {:>9.3}",
            l.degree,
            l.monomials,
            l.multidegrees,
            l.skipped_matroid,
            l.skipped_prescreen,
            l.solved,
            l.generators,
            l.elapsed.as_secs_f64()
        );
    }
    out
}

pub fn report_json(run: &KernelRun, echo: &OptionsEcho) -> String {
    let levels: Vec<Value> = run
        .levels
        .iter()
        .map(|l| {
            json!({
                "degree": l.degree,
                "monomials": l.monomials,
                "multidegrees": l.multidegrees,
                "skipped_matroid": l.skipped_matroid,
                "skipped_prescreen": l.skipped_prescreen,
                "solved": l.solved,
                "generators": l.generators,
                "seconds": l.elapsed.as_secs_f64(),
            })
        })
        .collect();
    let by_degree: serde_json::Map<String, Value> = run
        .generators
        .counts_by_total_degree()
        .into_iter()
        .map(|(d, c)| (d.to_string(), json!(c)))
        .collect();
    let value = json!({
        "grading_rank": run.grading.rank(),
        "seed": run.seed,
        "jacobian_prime": run.jacobian_prime,
        "generators_by_total_degree": by_degree,
        "total_seconds": run.levels.iter().map(|l| l.elapsed.as_secs_f64()).sum::<f64>(),
        "levels": levels,
        "options": {
            "max_degree": echo.max_degree,
            "skip": echo.skip,
            "trim": echo.trim,
            "prescreen": echo.prescreen,
            "naive": echo.naive,
            "threads": echo.threads,
            "seed": echo.seed,
            "prime": echo.prime,
        },
    });
    let mut out = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
    out.push('\n');
    out
}
