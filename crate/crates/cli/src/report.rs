//! Machine-readable report document and the human-readable table renderer.
//! The JSON layout is schema-stable (see `docs/report_schema.json`); only
//! `timing_ms` varies between runs on the same input.

use serde::Serialize;

use netctrl::analyzers::ControllabilityReport;
use netctrl::model::ToleranceConfig;
use netctrl::numerics::PbhWitness;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub file: String,
    pub tolerances: ToleranceDoc,
    pub criteria: Vec<CriterionDoc>,
    pub exit_code: i32,
    pub timing_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceDoc {
    pub rank_factor: f64,
    pub eig_dedup_radius: f64,
    pub zero_vec_tol: f64,
}

impl From<&ToleranceConfig> for ToleranceDoc {
    fn from(tol: &ToleranceConfig) -> Self {
        Self {
            rank_factor: tol.rank_factor,
            eig_dedup_radius: tol.eig_dedup_radius,
            zero_vec_tol: tol.zero_vec_tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionDoc {
    pub criterion: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessDoc {
    pub s0: ComplexDoc,
    pub left_vector: Vec<ComplexDoc>,
    pub deficiency: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

impl From<&PbhWitness> for WitnessDoc {
    fn from(witness: &PbhWitness) -> Self {
        // Normalize before emission; the library already returns unit
        // vectors, this pins the contract at the serialization boundary.
        let norm = witness
            .left_vector
            .iter()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        Self {
            s0: ComplexDoc { re: witness.s0.re, im: witness.s0.im },
            left_vector: witness
                .left_vector
                .iter()
                .map(|x| ComplexDoc { re: x.re * scale, im: x.im * scale })
                .collect(),
            deficiency: witness.deficiency,
        }
    }
}

impl From<&ControllabilityReport> for CriterionDoc {
    fn from(report: &ControllabilityReport) -> Self {
        Self {
            criterion: report.criterion.name().to_string(),
            verdict: report.verdict.as_str().to_string(),
            witness: report.witness.as_ref().map(WitnessDoc::from),
            notes: report.notes.clone(),
        }
    }
}

pub fn render_json(doc: &ReportDocument) -> String {
    serde_json::to_string_pretty(doc).expect("report serializes")
}

/// Plain table: one line per criterion, notes indented.
pub fn render_table(reports: &[ControllabilityReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.criterion.name().len())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for report in reports {
        out.push_str(&format!(
            "{:width$}  {}\n",
            report.criterion.name(),
            report.verdict,
            width = width
        ));
        for note in &report.notes {
            out.push_str(&format!("{:width$}    - {}\n", "", note, width = width));
        }
        if let Some(w) = &report.witness {
            out.push_str(&format!(
                "{:width$}    - witness: s0 = {:.6}{:+.6}i, deficiency {}\n",
                "",
                w.s0.re,
                w.s0.im,
                w.deficiency,
                width = width
            ));
        }
    }
    out
}
