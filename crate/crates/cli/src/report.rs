//! Report types: structured JSON plus a text rendering. Field order and
//! row order are fixed, so identical inputs always serialize to identical
//! bytes.

use std::fmt::Write as _;

use gysin_core::gysin::{DegreeSegment, ExactnessCertificate};
use gysin_core::rational::Rational;
use gysin_core::scenarios::{DTableRow, ScenarioReport};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct DimRow {
    pub degree: i64,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepRow {
    pub degree: i64,
    pub classes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleBlock {
    pub dims: Vec<DimRow>,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomologyReport {
    pub dims: Vec<DimRow>,
    pub representatives: Vec<RepRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlotRow {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
    pub contaminated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PageDiffRow {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub rank: usize,
    pub matrix: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PageTable {
    pub r: i64,
    pub slots: Vec<SlotRow>,
    pub differentials: Vec<PageDiffRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PagesReport {
    pub pages: Vec<PageTable>,
    pub two_line_at_e2: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeRow {
    pub label: String,
    pub dim: usize,
    pub contaminated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapRow {
    pub from: String,
    pub to: String,
    pub rank: usize,
    pub matrix: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GysinSection {
    pub name: String,
    pub nodes: Vec<NodeRow>,
    pub maps: Vec<MapRow>,
    pub d_table: Vec<DTableRow>,
    pub degree_annotations: Vec<DegreeSegment>,
    pub exactness: ExactnessCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct GysinReport {
    pub sections: Vec<GysinSection>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusRow {
    pub file: String,
    pub status: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyAllReport {
    pub scenarios: Vec<ScenarioReport>,
    pub corpus: Vec<CorpusRow>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

fn matrix_text(m: &[Vec<Rational>]) -> String {
    if m.is_empty() || m[0].is_empty() {
        return "[]".into();
    }
    let rows: Vec<String> = m
        .iter()
        .map(|row| row.iter().map(Rational::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

pub fn validate_text(r: &ValidateReport) -> String {
    let mut out = String::new();
    if r.valid {
        out.push_str("valid\n");
    } else {
        let _ = writeln!(out, "INVALID: {} violation(s)", r.violations.len());
        for v in &r.violations {
            let _ = writeln!(out, "  {v}");
        }
    }
    out
}

pub fn homology_text(r: &HomologyReport) -> String {
    let mut out = String::from("degree  dim\n");
    for row in &r.dims {
        let _ = writeln!(out, "{:>6}  {}", row.degree, row.dim);
    }
    if !r.representatives.is_empty() {
        out.push_str("representatives:\n");
        for rep in &r.representatives {
            for class in &rep.classes {
                let _ = writeln!(out, "  deg {:>3}: {class}", rep.degree);
            }
        }
    }
    if let Some(oracle) = &r.oracle {
        let _ = writeln!(
            out,
            "oracle: {}",
            if oracle.matches { "matches" } else { "MISMATCH" }
        );
    }
    out
}

pub fn pages_text(r: &PagesReport) -> String {
    let mut out = String::new();
    for page in &r.pages {
        let _ = writeln!(out, "E^{}:", page.r);
        for slot in &page.slots {
            let _ = writeln!(
                out,
                "  ({:>3},{:>2}) dim {}{}",
                slot.p,
                slot.q,
                slot.dim,
                if slot.contaminated { "  [boundary-contaminated]" } else { "" }
            );
        }
        for d in &page.differentials {
            let _ = writeln!(
                out,
                "  d: ({},{}) -> ({},{}) rank {} {}",
                d.from.0,
                d.from.1,
                d.to.0,
                d.to.1,
                d.rank,
                matrix_text(&d.matrix)
            );
        }
    }
    let _ = writeln!(out, "two-line at E^2: {}", r.two_line_at_e2);
    out
}

pub fn gysin_text(r: &GysinReport) -> String {
    let mut out = String::new();
    for section in &r.sections {
        let _ = writeln!(out, "== {} ==", section.name);
        out.push_str("sequence: ");
        let chain: Vec<String> = section
            .nodes
            .iter()
            .map(|n| {
                format!(
                    "{}[{}]{}",
                    n.label,
                    n.dim,
                    if n.contaminated { "*" } else { "" }
                )
            })
            .collect();
        let _ = writeln!(out, "{}", chain.join(" -> "));
        if !section.d_table.is_empty() {
            out.push_str("connecting map D:\n");
            for row in &section.d_table {
                let _ = writeln!(
                    out,
                    "  HC_{} -> HC_{}: rank {}  d2={} D={}{}",
                    row.hc_from,
                    row.hc_to,
                    row.rank,
                    matrix_text(&row.d2),
                    matrix_text(&row.d),
                    if row.contaminated { "  [boundary-contaminated]" } else { "" }
                );
            }
        }
        if !section.degree_annotations.is_empty() {
            out.push_str("degree pattern (SH, HC, HC-2, SH-1): ");
            let segs: Vec<String> = section
                .degree_annotations
                .iter()
                .map(|s| format!("({}, {}, {}, {})", s.sh_upper, s.hc_upper, s.hc_lower, s.sh_lower))
                .collect();
            let _ = writeln!(out, "{}", segs.join(" "));
        }
        let _ = writeln!(out, "exactness:\n{}", section.exactness);
    }
    let _ = writeln!(out, "result: {}", if r.pass { "PASS" } else { "FAIL" });
    out
}

pub fn scenario_text(r: &ScenarioReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== {} : {} ==", r.name, if r.pass { "PASS" } else { "FAIL" });
    for check in &r.checks {
        let _ = writeln!(
            out,
            "  [{}] {} (expected {}, got {})",
            if check.pass { "ok" } else { "FAIL" },
            check.label,
            check.expected,
            check.got
        );
    }
    out
}

pub fn verify_all_text(r: &VerifyAllReport) -> String {
    let mut out = String::new();
    for warning in &r.warnings {
        let _ = writeln!(out, "warning: {warning}");
    }
    for scenario in &r.scenarios {
        out.push_str(&scenario_text(scenario));
    }
    for row in &r.corpus {
        let _ = writeln!(
            out,
            "corpus {}: {} [{}]",
            row.file,
            row.status,
            if row.pass { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(out, "result: {}", if r.pass { "PASS" } else { "FAIL" });
    out
}
