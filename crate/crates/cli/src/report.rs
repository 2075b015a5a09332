//! Full analysis of one pure state.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use anyhow::Result;
use multischmidt::{
    factorize, generalized_eof, local_rank_vector, pure_schmidt_coefficients,
    pure_schmidt_number, Error, PureState, Settings,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtNumberField {
    pub lo: usize,
    pub hi: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CoefficientField {
    Ok {
        values: Vec<f64>,
        rule: String,
        party: Option<usize>,
        ties: Vec<usize>,
        exact: bool,
        notes: Vec<String>,
    },
    Unsupported {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingsEcho {
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub iterations: usize,
}

impl From<&Settings> for SettingsEcho {
    fn from(s: &Settings) -> Self {
        Self {
            tol: s.rank_tol,
            seed: s.budget.seed,
            restarts: s.budget.restarts,
            iterations: s.budget.iterations,
        }
    }
}

/// Everything `analyze` reports. Wall-clock time is kept out of this value
/// so that its JSON form is reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub name: Option<String>,
    pub dims: Vec<usize>,
    pub label: String,
    pub factors: String,
    pub local_ranks: Vec<usize>,
    pub schmidt_number: SchmidtNumberField,
    pub coefficients: CoefficientField,
    pub eof: Option<f64>,
    pub trace: Vec<String>,
    pub warnings: Vec<String>,
    pub settings: SettingsEcho,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// Runs every analysis and returns the report with the time it took.
pub fn analyze(
    state: &PureState,
    name: Option<String>,
    warnings: Vec<String>,
    settings: &Settings,
) -> Result<(AnalysisReport, Duration)> {
    let start = Instant::now();
    let structure = factorize(state, settings.rank_tol)?;
    let local_ranks = local_rank_vector(state, settings.rank_tol)?;
    let r = pure_schmidt_number(state, settings)?;
    let (coefficients, eof) = match pure_schmidt_coefficients(state, settings) {
        Ok(c) => {
            let eof = generalized_eof(&c);
            let p = c.provenance;
            (
                CoefficientField::Ok {
                    values: c.values,
                    rule: p.rule,
                    party: p.party,
                    ties: p.ties,
                    exact: p.exact,
                    notes: p.notes,
                },
                Some(eof),
            )
        }
        Err(Error::Unsupported(reason)) => (CoefficientField::Unsupported { reason }, None),
        Err(e) => return Err(e.into()),
    };
    let report = AnalysisReport {
        name,
        dims: state.profile().dims().to_vec(),
        label: structure.label.to_string(),
        factors: structure.pattern(),
        local_ranks,
        schmidt_number: SchmidtNumberField {
            lo: r.lo,
            hi: r.hi,
            exact: r.exact,
        },
        coefficients,
        eof,
        trace: r.trace,
        warnings,
        settings: settings.into(),
    };
    Ok((report, start.elapsed()))
}

fn list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Human-readable rendering.
pub fn render_table(report: &AnalysisReport, elapsed: Duration) -> String {
    let mut out = String::new();
    let mut row = |k: &str, v: String| {
        let _ = writeln!(out, "{k:<16} {v}");
    };
    if let Some(name) = &report.name {
        row("state", name.clone());
    }
    row("dims", list(&report.dims));
    row("class", format!("{} ({})", report.label, report.factors));
    row("local ranks", format!("({})", list(&report.local_ranks)));
    let sn = &report.schmidt_number;
    row(
        "Schmidt number",
        if sn.exact {
            format!("{} (exact)", sn.lo)
        } else {
            format!("[{}, {}] (bracketed)", sn.lo, sn.hi)
        },
    );
    match &report.coefficients {
        CoefficientField::Ok { values, party, ties, exact, .. } => {
            let vals: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
            row("coefficients", format!("{{{}}}", vals.join(", ")));
            if let Some(p) = party {
                row("branch", format!("party {p}, ties ({})", list(ties)));
            }
            if !exact {
                row("", "coefficients rest on bracketed values".into());
            }
        }
        CoefficientField::Unsupported { reason } => row("coefficients", format!("unsupported: {reason}")),
    }
    row(
        "generalized EoF",
        report.eof.map_or("n/a".into(), |e| format!("{e:.6} bits")),
    );
    for (i, t) in report.trace.iter().enumerate() {
        row(if i == 0 { "trace" } else { "" }, t.clone());
    }
    for w in &report.warnings {
        row("warning", w.clone());
    }
    let s = &report.settings;
    row(
        "settings",
        format!("tol {:e}, seed {}, restarts {}, iters {}", s.tol, s.seed, s.restarts, s.iterations),
    );
    row("time", format!("{elapsed:.2?}"));
    out
}
