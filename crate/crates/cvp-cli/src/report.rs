//! Deterministic result-file rendering. Rerunning a command on identical
//! input bytes produces byte-identical output: fixed field order, labels as
//! point identities, 17-significant-digit numbers.

use cvp_core::ivp::AdmissibilityReport;
use cvp_core::optimizer::OptimizationResult;
use cvp_core::{ElReport, ProblemInstance, SolutionRecord};

use crate::io::fmt17;

pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str, digest: &str) -> Self {
        let mut lines = Vec::new();
        lines.push(format!("cvp-result v{}", env!("CARGO_PKG_VERSION")));
        lines.push(format!("command: {command}"));
        lines.push(format!("instance: sha256:{digest}"));
        Self { lines }
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("{key}: {value}"));
        self
    }

    pub fn number(&mut self, key: &str, value: f64) -> &mut Self {
        self.lines.push(format!("{key}: {}", fmt17(value)));
        self
    }

    pub fn note(&mut self, note: &str) -> &mut Self {
        self.lines.push(format!("note: {note}"));
        self
    }

    pub fn labels(&mut self, key: &str, idx: &[usize], instance: &ProblemInstance) -> &mut Self {
        let labels: Vec<String> = idx
            .iter()
            .map(|&i| format!("{:?}", instance.space().labels()[i]))
            .collect();
        self.lines.push(format!("{key}: [{}]", labels.join(", ")));
        self
    }

    pub fn numbers(&mut self, key: &str, values: impl Iterator<Item = f64>) -> &mut Self {
        let parts: Vec<String> = values.map(fmt17).collect();
        self.lines.push(format!("{key}: [{}]", parts.join(", ")));
        self
    }

    pub fn solution(&mut self, index: usize, r: &SolutionRecord, instance: &ProblemInstance) {
        self.lines.push(format!("solution {index}:"));
        let support = r.rho.support();
        let labels: Vec<String> = support
            .iter()
            .map(|&i| format!("{:?}", instance.space().labels()[i]))
            .collect();
        self.lines.push(format!("  support: [{}]", labels.join(", ")));
        self.push_indented("weights", r.rho.weights().iter().copied());
        self.push_indented("potential", r.phi.values().iter().copied());
        self.lines.push(format!("  action: {}", fmt17(r.action)));
        self.lines
            .push(format!("  el-sup-residual: {}", fmt17(r.el_sup_residual)));
        let psd = if r.psd_min_eigenvalue.is_finite() {
            fmt17(r.psd_min_eigenvalue)
        } else {
            "inf".to_string()
        };
        self.lines.push(format!("  psd-min-eigenvalue: {psd}"));
        self.lines
            .push(format!("  degeneracy-dim: {}", r.degeneracy_dim));
        self.lines
            .push(format!("  certified-global: {}", r.certified_global));
    }

    fn push_indented(&mut self, key: &str, values: impl Iterator<Item = f64>) {
        let parts: Vec<String> = values.map(fmt17).collect();
        self.lines.push(format!("  {key}: [{}]", parts.join(", ")));
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

pub fn solutions_block(
    report: &mut Report,
    records: &[SolutionRecord],
    instance: &ProblemInstance,
) {
    report.field("solutions", records.len());
    for (i, r) in records.iter().enumerate() {
        report.solution(i + 1, r, instance);
    }
}

pub fn optimization_block(
    report: &mut Report,
    result: &OptimizationResult,
    instance: &ProblemInstance,
) {
    report.field("problem", result.problem);
    report.number("optimum", result.optimum);
    report.field("family-dim", result.family_dim);
    for (i, dir) in result.family_basis.iter().enumerate() {
        let n = instance.n();
        report.numbers(
            &format!("family-direction {} weights", i + 1),
            dir.rows(0, n).iter().copied(),
        );
        report.numbers(
            &format!("family-direction {} potential", i + 1),
            dir.rows(n, n).iter().copied(),
        );
    }
    report.field("unique", result.unique);
    for note in &result.notes {
        report.note(note);
    }
    solutions_block(report, &result.solutions, instance);
}

pub fn admissibility_block(report: &mut Report, a: &AdmissibilityReport) {
    report.field("admissible", a.admissible);
    if a.lrho0_max.is_finite() {
        report.number("lrho0-max", a.lrho0_max);
    } else {
        report.field("lrho0-max", "-inf");
    }
    if a.psd_min_eig.is_finite() {
        report.number("psd-min-eigenvalue", a.psd_min_eig);
    } else {
        report.field("psd-min-eigenvalue", "inf");
    }
    match a.violating_index {
        Some(i) => report.field("violating-index", i),
        None => report.field("violating-index", "none"),
    };
}

pub fn el_block(report: &mut Report, rep: &ElReport) {
    report.numbers("per-point-residuals", rep.per_point.iter().copied());
    report.number("sup-residual", rep.sup_residual);
    if rep.psd_min_eigenvalue.is_finite() {
        report.number("psd-min-eigenvalue", rep.psd_min_eigenvalue);
    } else {
        report.field("psd-min-eigenvalue", "inf");
    }
}
