//! Problem files, analysis and reports for the `lndtri` command.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use lnd_core::derivation::{jacobian_derivation, Derivation, KernelPair, LndBounds};
use lnd_core::slices::kernel_vars;
use lnd_core::triangulate::{
    triangulate, uvw_ring, verify_form, PrimeOutcome, TriangulateError, TriangulateOptions,
    TriangulationReport, Verdict,
};
use lnd_core::{parse, Polynomial, VarSet};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Contract(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemOptions {
    pub nilpotency_bound: usize,
    pub degree_cap: u32,
    pub format: Format,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        let b = LndBounds::default();
        ProblemOptions {
            nilpotency_bound: b.iterations,
            degree_cap: b.degree_cap,
            format: Format::Text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_generators: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation_images: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub options: ProblemOptions,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub vars: VarSet,
    pub derivation: Derivation,
    pub kernel: Option<KernelPair>,
}

fn parse_field(text: &str, vars: &VarSet, field: &str) -> Result<Polynomial, CliError> {
    parse(text, vars).map_err(|e| CliError::Parse(format!("{field}: {e}")))
}

pub fn parse_problem(text: &str) -> Result<Problem, CliError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    if file.variables.len() != 3 {
        return Err(CliError::Parse(format!(
            "variables: expected 3 names, got {}",
            file.variables.len()
        )));
    }
    let vars = VarSet::new(file.variables.iter().map(String::as_str))
        .map_err(|e| CliError::Parse(format!("variables: {e}")))?;
    let (derivation, kernel) = match (&file.kernel_generators, &file.derivation_images) {
        (Some([f, g]), None) => {
            let f = parse_field(f, &vars, "kernel_generators[0]")?;
            let g = parse_field(g, &vars, "kernel_generators[1]")?;
            let x = jacobian_derivation(&vars, &f, &g).map_err(|e| {
                CliError::Contract(format!("kernel_generators: {e} (f and g are dependent)"))
            })?;
            (x, Some(KernelPair { f, g }))
        }
        (None, Some(images)) => {
            if let Some(k) = images.keys().find(|k| !vars.contains(k)) {
                return Err(CliError::Parse(format!(
                    "derivation_images: undeclared variable `{k}`"
                )));
            }
            let mut out = Vec::new();
            for name in vars.names() {
                let text = images.get(name).ok_or_else(|| {
                    CliError::Parse(format!("derivation_images: missing image of `{name}`"))
                })?;
                out.push(parse_field(text, &vars, &format!("derivation_images.{name}"))?);
            }
            let x = Derivation::new(&vars, out)
                .map_err(|e| CliError::Contract(format!("derivation_images: {e}")))?;
            (x, None)
        }
        _ => {
            return Err(CliError::Parse(
                "exactly one of kernel_generators and derivation_images is required".into(),
            ))
        }
    };
    Ok(Problem {
        file,
        vars,
        derivation,
        kernel,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeReport {
    /// Over `(u)`.
    pub c_i: String,
    pub multiplicity: u32,
    pub status: String,
    /// Over `(u, p, s)`.
    pub h_i: Option<String>,
    /// Over `(u, p)`.
    pub ell_i: Option<String>,
    /// Over `(u)`.
    pub mu_i: Option<String>,
    /// Over `(u, v)`.
    #[serde(rename = "Q_i")]
    pub q_i: Option<String>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub modulus: String,
    /// Variables of `modulus`.
    pub ring: Vec<String>,
    /// Over `(u, p, s)`.
    pub h: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub nilpotency_bound: usize,
    pub degree_cap: u32,
    pub kernel_search_degree: Option<u32>,
    pub iteration_counts: Vec<usize>,
    pub tripped: Vec<String>,
}

/// Every polynomial is printed in the input grammar. Fields over the input
/// variables: `kernel_generators`, `prefactor`, `plinth_generator`,
/// `minimal_local_slice`, `u`, `v`, `w`, `mate`. Over `(F, G)`:
/// `plinth_generator_fg`. Over `(u)`: `c_of_u`. Over `(u, v)`: `Q_of_u_v`.
/// Over `(u, v, w)`: `triangular_images` and `inverse`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub verdict: String,
    pub variables: Vec<String>,
    pub kernel_generators: Option<[String; 2]>,
    pub prefactor: String,
    pub plinth_generator: Option<String>,
    pub plinth_generator_fg: Option<String>,
    pub minimal_local_slice: Option<String>,
    pub rank: Option<u8>,
    pub u: Option<String>,
    pub v: Option<String>,
    pub w: Option<String>,
    pub mate: Option<String>,
    pub c_of_u: Option<String>,
    #[serde(rename = "Q_of_u_v")]
    pub q_of_u_v: Option<String>,
    pub triangular_images: Option<[String; 3]>,
    pub inverse: Option<[String; 3]>,
    pub primes: Vec<PrimeReport>,
    pub witness: Option<WitnessReport>,
    pub bounds_used: BoundsReport,
    pub verified: Option<bool>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub bounds: LndBounds,
    /// Re-run the verification of positive verdicts.
    pub verify: bool,
}

impl AnalyzeOptions {
    pub fn from_problem(p: &Problem) -> Self {
        AnalyzeOptions {
            bounds: LndBounds {
                iterations: p.file.options.nilpotency_bound,
                degree_cap: p.file.options.degree_cap,
            },
            verify: true,
        }
    }
}

fn s(p: &Polynomial) -> String {
    p.to_string()
}

/// Runs the pipeline and the optional re-verification.
pub fn analyze_full(
    problem: &Problem,
    opts: AnalyzeOptions,
) -> Result<(TriangulationReport, ReportFile), CliError> {
    let topts = TriangulateOptions {
        bounds: opts.bounds,
        ..TriangulateOptions::default()
    };
    let report = triangulate(&problem.derivation, problem.kernel.as_ref(), &topts).map_err(|e| match e {
        TriangulateError::InvalidInput(m) => CliError::Contract(m),
        TriangulateError::Internal(m) => CliError::Internal(m),
    })?;
    let verified = match (&report.form, opts.verify) {
        (Some(form), true) => {
            let check = verify_form(&problem.derivation, form);
            if !check.ok {
                return Err(CliError::Internal(format!(
                    "verification failed: {}",
                    check.failures.join("; ")
                )));
            }
            Some(true)
        }
        _ => None,
    };
    let file = to_report_file(problem, &report, verified);
    Ok((report, file))
}

pub fn analyze(problem: &Problem, opts: AnalyzeOptions) -> Result<ReportFile, CliError> {
    analyze_full(problem, opts).map(|(_, f)| f)
}

fn to_report_file(problem: &Problem, r: &TriangulationReport, verified: Option<bool>) -> ReportFile {
    let uvw = uvw_ring();
    let form = r.form.as_ref();
    let images = form.map(|f| {
        let c = f.c.compose(&[Polynomial::var_at(&uvw, 0)], &uvw);
        let dq = f.q.derivative(1).compose(
            &[Polynomial::var_at(&uvw, 0), Polynomial::var_at(&uvw, 1)],
            &uvw,
        );
        [s(&Polynomial::zero(&uvw)), s(&c), s(&dq)]
    });
    let primes = r
        .primes
        .iter()
        .map(|p| match p {
            PrimeOutcome::Certified(c) => PrimeReport {
                c_i: s(&c.c_i),
                multiplicity: c.n_i,
                status: "certified".into(),
                h_i: Some(s(&c.h_i)),
                ell_i: Some(s(&c.ell_i)),
                mu_i: Some(s(&c.mu_i)),
                q_i: Some(s(&c.q_i)),
                reason: None,
            },
            PrimeOutcome::Failed {
                c_i,
                n_i,
                h_i,
                reason,
            } => PrimeReport {
                c_i: s(c_i),
                multiplicity: *n_i,
                status: "failed".into(),
                h_i: h_i.as_ref().map(s),
                ell_i: None,
                mu_i: None,
                q_i: None,
                reason: Some(reason.clone()),
            },
        })
        .collect();
    let mut notes = r.notes.clone();
    notes.push(format!(
        "local nilpotency accepted when the iterates of every variable vanish within {} steps",
        r.bounds_used.lnd.iterations
    ));
    if !r.prefactor.is_constant() {
        notes.push("the content of the derivation was required to be a polynomial in u".into());
    }
    if problem.kernel.is_none() && r.kernel.is_some() {
        notes.push("kernel generators found by search and certified by the Jacobian criterion".into());
    }
    ReportFile {
        verdict: r.verdict.as_str().into(),
        variables: problem.vars.names().to_vec(),
        kernel_generators: r.kernel.as_ref().map(|k| [s(&k.f), s(&k.g)]),
        prefactor: s(&r.prefactor),
        plinth_generator: r.plinth.as_ref().map(|c| s(&c.c_xyz)),
        plinth_generator_fg: r.plinth.as_ref().map(|c| s(&c.c_fg)),
        minimal_local_slice: r.plinth.as_ref().map(|c| s(&c.s)),
        rank: r.rank.as_ref().map(|v| v.rank.as_u8()),
        u: form.map(|f| s(&f.u)),
        v: form.map(|f| s(&f.v)),
        w: form.map(|f| s(&f.w)),
        mate: form.map(|f| s(&f.mate)),
        c_of_u: form.map(|f| s(&f.c)),
        q_of_u_v: form.map(|f| s(&f.q)),
        triangular_images: images,
        inverse: form
            .filter(|f| f.inverse.len() == 3)
            .map(|f| [s(&f.inverse[0]), s(&f.inverse[1]), s(&f.inverse[2])]),
        primes,
        witness: r.witness.as_ref().map(|w| WitnessReport {
            modulus: s(&w.modulus),
            ring: w.modulus.vars().names().to_vec(),
            h: w.h.as_ref().map(s),
            reason: w.reason.clone(),
        }),
        bounds_used: BoundsReport {
            nilpotency_bound: r.bounds_used.lnd.iterations,
            degree_cap: r.bounds_used.lnd.degree_cap,
            kernel_search_degree: r.bounds_used.kernel_search_degree,
            iteration_counts: r.nilpotency.iteration_counts.clone(),
            tripped: r.bounds_used.tripped.clone(),
        },
        verified,
        notes,
    }
}

impl ReportFile {
    /// Exit status for a completed analysis.
    pub fn exit_code(&self) -> i32 {
        if self.verdict == Verdict::InvalidInput.as_str() {
            3
        } else {
            0
        }
    }

    /// Every polynomial field with the variables it is written over.
    pub fn polynomials(&self) -> Vec<(String, VarSet, String)> {
        let input = VarSet::new(self.variables.iter().map(String::as_str)).expect("declared variables");
        let of = |names: &[&str]| VarSet::of(names);
        let mut out = Vec::new();
        let mut push = |name: &str, vars: &VarSet, text: &Option<String>| {
            if let Some(t) = text {
                out.push((name.to_string(), vars.clone(), t.clone()));
            }
        };
        if let Some([f, g]) = &self.kernel_generators {
            push("kernel_generators[0]", &input, &Some(f.clone()));
            push("kernel_generators[1]", &input, &Some(g.clone()));
        }
        push("prefactor", &input, &Some(self.prefactor.clone()));
        push("plinth_generator", &input, &self.plinth_generator);
        push("plinth_generator_fg", &kernel_vars(), &self.plinth_generator_fg);
        push("minimal_local_slice", &input, &self.minimal_local_slice);
        for (name, t) in [("u", &self.u), ("v", &self.v), ("w", &self.w), ("mate", &self.mate)] {
            push(name, &input, t);
        }
        push("c_of_u", &of(&["u"]), &self.c_of_u);
        push("Q_of_u_v", &of(&["u", "v"]), &self.q_of_u_v);
        let uvw = of(&["u", "v", "w"]);
        for (field, arr) in [("triangular_images", &self.triangular_images), ("inverse", &self.inverse)] {
            if let Some(a) = arr {
                for (i, t) in a.iter().enumerate() {
                    push(&format!("{field}[{i}]"), &uvw, &Some(t.clone()));
                }
            }
        }
        for (i, p) in self.primes.iter().enumerate() {
            push(&format!("primes[{i}].c_i"), &of(&["u"]), &Some(p.c_i.clone()));
            push(&format!("primes[{i}].h_i"), &of(&["u", "p", "s"]), &p.h_i);
            push(&format!("primes[{i}].ell_i"), &of(&["u", "p"]), &p.ell_i);
            push(&format!("primes[{i}].mu_i"), &of(&["u"]), &p.mu_i);
            push(&format!("primes[{i}].Q_i"), &of(&["u", "v"]), &p.q_i);
        }
        if let Some(w) = &self.witness {
            let ring = VarSet::new(w.ring.iter().map(String::as_str)).expect("witness ring");
            push("witness.modulus", &ring, &Some(w.modulus.clone()));
            push("witness.h", &of(&["u", "p", "s"]), &w.h);
        }
        out
    }

    /// Re-parses and re-prints every polynomial field.
    pub fn check_round_trip(&self) -> Result<(), String> {
        for (name, vars, text) in self.polynomials() {
            let p = parse(&text, &vars).map_err(|e| format!("{name}: {e}"))?;
            if p.to_string() != text {
                return Err(format!("{name}: `{text}` reprints as `{p}`"));
            }
        }
        Ok(())
    }
}

pub fn render_json(report: &ReportFile) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

pub fn render_text(r: &ReportFile) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: &str| {
        let _ = writeln!(out, "{k:<22}{v}");
    };
    line("verdict", &r.verdict);
    line("variables", &r.variables.join(", "));
    if let Some([f, g]) = &r.kernel_generators {
        line("kernel generators", &format!("{f} ; {g}"));
    }
    if r.prefactor != "1" {
        line("prefactor", &r.prefactor);
    }
    let opt = |o: &Option<String>| o.clone().unwrap_or_else(|| "-".into());
    line("plinth generator", &opt(&r.plinth_generator));
    line("  in (F, G)", &opt(&r.plinth_generator_fg));
    line("minimal local slice", &opt(&r.minimal_local_slice));
    line(
        "rank",
        &r.rank.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
    );
    if r.u.is_some() {
        line("u", &opt(&r.u));
        line("v", &opt(&r.v));
        line("w", &opt(&r.w));
        line("c(u)", &opt(&r.c_of_u));
        line("Q(u, v)", &opt(&r.q_of_u_v));
    }
    if let Some([a, b, c]) = &r.triangular_images {
        line("X(u), X(v), X(w)", &format!("{a} ; {b} ; {c}"));
    }
    if let Some([a, b, c]) = &r.inverse {
        line("x, y, z in (u, v, w)", &format!("{a} ; {b} ; {c}"));
    }
    for p in &r.primes {
        let mut desc = format!("{} (mult. {}) {}", p.c_i, p.multiplicity, p.status);
        if let Some(h) = &p.h_i {
            let _ = write!(desc, ", h = {h}");
        }
        if let Some(reason) = &p.reason {
            let _ = write!(desc, ", {reason}");
        }
        line("prime", &desc);
    }
    if let Some(w) = &r.witness {
        line("witness modulus", &w.modulus);
        if let Some(h) = &w.h {
            line("witness h", h);
        }
        line("witness reason", &w.reason);
    }
    if let Some(v) = r.verified {
        line("verified", &v.to_string());
    }
    let b = &r.bounds_used;
    line(
        "bounds",
        &format!(
            "nilpotency {} steps, degree cap {}",
            b.nilpotency_bound, b.degree_cap
        ),
    );
    for t in &b.tripped {
        line("bound tripped", t);
    }
    for n in &r.notes {
        line("note", n);
    }
    out
}
