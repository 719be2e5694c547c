//! Experiment configs, verification reports, presets and a content-addressed report cache.
//!
//! A config names a group, an orbital parameter, a polarization and a density suite; `run`
//! pairs both sides of the character identity against every density and issues a verdict.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::characters::{
    character_for_parameter, check_coherence, coherent_family_from, corrupted, pair_suite, CharacterError, GaussianDensity,
    PairingSpec, COHERENCE_TOL,
};
use crate::contour::{
    build_contour, build_contour_admissible, check_rossmann_admissibility, factored_contour, fourier_transform_suite, Contour,
    ContourError, ContourMethod, ContourQuadrature, ContourValue, SigmaCChoice,
};
use crate::orbits::{stabilizer_levi, OrbitError, OrbitalParameter};
use crate::polarize::{build_induction_scaffold, construct_maximally_real, enumerate_polarizations, polarization_by_index, Polarization, PolarizeError};
use crate::realforms::{catalog, GroupCatalogEntry, GroupLabel, RealFormError};
use crate::rootdata::{GaussQ, RootDataError, Weight};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Validation(String),
    #[error(transparent)]
    RootData(#[from] RootDataError),
    #[error(transparent)]
    RealForm(#[from] RealFormError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Polarize(#[from] PolarizeError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("csv export: {0}")]
    Csv(#[from] csv::Error),
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// F[C] against θ for one parameter.
    VerifyMainTheorem,
    /// Noncompact tempered orbit: direct contour, factored contour (when a real parabolic exists) and θ.
    RossmannTempered,
    /// Compact group, regular λ: the contour is the orbit.
    KirillovCompact,
    /// F[C_q] for every maximally real admissible q against the canonical one.
    PolarizationInvariance,
    /// F[C] with a conjugated compact form against the default one.
    SigmaCInvariance,
    /// Coherence of the catalog family through λ and rejection of a corrupted control.
    CoherenceSuite,
    /// F[C_q] against θ for every admissible q, maximally real or not.
    ConjectureAdmissible,
}

/// λ as exact Gaussian rationals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSpec {
    /// ⟨λ, α∨⟩ for each simple root α.
    SimplePairings(Vec<GaussQ>),
    /// Coordinates in the weight basis of the root datum.
    Coordinates(Vec<GaussQ>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationSelector {
    #[default]
    MaximallyReal,
    /// Position in the enumeration of polarizations with Levi Δ(l).
    Index(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DensitySuiteConfig {
    pub count: usize,
    pub seed: u64,
    /// Centers are drawn uniformly from the cube of this Euclidean half-diagonal.
    #[serde(default = "default_center_radius")]
    pub center_radius: f64,
    #[serde(default = "default_width_min")]
    pub width_min: f64,
    #[serde(default = "default_width_max")]
    pub width_max: f64,
}

fn default_center_radius() -> f64 {
    1.0
}
fn default_width_min() -> f64 {
    0.5
}
fn default_width_max() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Gauss–Legendre points per panel on the contour.
    #[serde(default = "default_contour_order")]
    pub contour_order: usize,
    /// Gauss points per dimension on the character side.
    #[serde(default = "default_pairing_order")]
    pub pairing_order: usize,
    #[serde(default)]
    pub truncation_radius: Option<f64>,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    /// Required whenever either side is integrated by Monte Carlo.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_contour_order() -> usize {
    32
}
fn default_pairing_order() -> usize {
    16
}
fn default_mc_samples() -> usize {
    1_000_000
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { contour_order: 32, pairing_order: 16, truncation_radius: None, mc_samples: 1_000_000, seed: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub group: GroupLabel,
    /// Cartan label; the fundamental Cartan when absent.
    #[serde(default)]
    pub cartan: Option<String>,
    pub lambda: LambdaSpec,
    #[serde(default)]
    pub polarization: PolarizationSelector,
    #[serde(default)]
    pub sigma_c: SigmaCChoice,
    pub densities: DensitySuiteConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    /// Relative tolerance per row.
    pub tolerance: f64,
}

/// Command-line overrides applied on top of a config before hashing.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub mc_samples: Option<usize>,
    pub truncation_radius: Option<f64>,
}

impl ExperimentConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.tolerance {
            self.tolerance = t;
        }
        if let Some(s) = o.seed {
            self.densities.seed = s;
            self.quadrature.seed = Some(s);
        }
        if let Some(n) = o.mc_samples {
            self.quadrature.mc_samples = n;
        }
        if let Some(r) = o.truncation_radius {
            self.quadrature.truncation_radius = Some(r);
        }
    }

    /// Structural checks that need no group data.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(invalid(format!("schema_version {} (expected {CONFIG_SCHEMA_VERSION})", self.schema_version)));
        }
        let d = &self.densities;
        let finite = [self.tolerance, d.center_radius, d.width_min, d.width_max].iter().all(|x| x.is_finite())
            && self.quadrature.truncation_radius.is_none_or(f64::is_finite);
        if !finite {
            return Err(invalid("numeric fields must be finite"));
        }
        if let SigmaCChoice::ConjugatedBy { element } = &self.sigma_c {
            if element.iter().any(|x| !x.is_finite()) {
                return Err(invalid("numeric fields must be finite"));
            }
        }
        if self.tolerance <= 0.0 {
            return Err(invalid("tolerance must be positive"));
        }
        if d.count == 0 {
            return Err(invalid("density suite is empty"));
        }
        if !(d.width_min > 0.0 && d.width_min <= d.width_max) {
            return Err(invalid("need 0 < width_min ≤ width_max"));
        }
        if d.center_radius < 0.0 {
            return Err(invalid("center_radius must be non-negative"));
        }
        if self.quadrature.truncation_radius.is_some_and(|r| r <= 0.0) {
            return Err(invalid("truncation_radius must be positive"));
        }
        if self.quadrature.contour_order == 0 || self.quadrature.pairing_order == 0 {
            return Err(invalid("quadrature orders must be positive"));
        }
        if self.kind == ExperimentKind::SigmaCInvariance && self.sigma_c == SigmaCChoice::Default {
            return Err(invalid("sigma_c_invariance needs sigma_c = conjugated_by"));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: Self = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::Fail => 2,
            Self::Inconclusive => 3,
        }
    }

    fn combine(items: impl IntoIterator<Item = Verdict>) -> Verdict {
        items.into_iter().fold(Verdict::Pass, |acc, v| match (acc, v) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// One density, two quantities that should agree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ReportRow {
    pub density: usize,
    pub lhs_label: String,
    pub rhs_label: String,
    pub lhs: ComplexValue,
    pub lhs_error: f64,
    pub rhs: ComplexValue,
    pub rhs_error: f64,
    pub abs_discrepancy: f64,
    pub rel_discrepancy: f64,
    pub verdict: Verdict,
}

impl ReportRow {
    /// Inconclusive if either error exceeds half the tolerance budget; otherwise pass iff
    /// the discrepancy is within tolerance plus both error estimates.
    pub fn new(density: usize, lhs_label: &str, lhs: (Complex64, f64), rhs_label: &str, rhs: (Complex64, f64), tolerance: f64) -> Self {
        let abs = (lhs.0 - rhs.0).norm();
        let scale = rhs.0.norm().max(1e-300);
        let verdict = if lhs.1 > tolerance / 2.0 * scale || rhs.1 > tolerance / 2.0 * scale {
            Verdict::Inconclusive
        } else if abs <= tolerance * scale + lhs.1 + rhs.1 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            density,
            lhs_label: lhs_label.into(),
            rhs_label: rhs_label.into(),
            lhs: lhs.0.into(),
            lhs_error: lhs.1,
            rhs: rhs.0.into(),
            rhs_error: rhs.1,
            abs_discrepancy: abs,
            rel_discrepancy: abs / scale,
            verdict,
        }
    }
}

/// A named structural check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ContourDiagnostics {
    pub label: String,
    pub real_dim: usize,
    #[schemars(with = "String")]
    pub method: String,
    pub re_bound: f64,
    pub max_real_part: f64,
    pub growth_exponent: Option<f64>,
    pub polynomial_growth: bool,
    pub truncation_radius: f64,
    pub tail_bound_max: f64,
    pub excluded_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Provenance {
    pub config_hash: String,
    pub density_seed: u64,
    pub quadrature_seed: Option<u64>,
    pub crate_version: String,
    pub runtime_seconds: f64,
    pub cached: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<Check>,
    pub contours: Vec<ContourDiagnostics>,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn max_rel_discrepancy(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_discrepancy).fold(0.0, f64::max)
    }

    pub fn max_abs_discrepancy(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_discrepancy).fold(0.0, f64::max)
    }

    /// Plain-text table for terminals.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "{:?} on {}  tolerance {:.1e}  verdict {:?}{}", c.kind, c.group, c.tolerance, self.verdict, if self.provenance.cached { " (cached)" } else { "" });
        if !self.rows.is_empty() {
            let _ = writeln!(s, "{:>3}  {:<14} {:>34}  {:<14} {:>34}  {:>9}  {:>9}  verdict", "#", "lhs", "", "rhs", "", "abs", "rel");
        }
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>3}  {:<14} {:>+15.9e}{:>+15.9e}i  {:<14} {:>+15.9e}{:>+15.9e}i  {:>9.2e}  {:>9.2e}  {:?}",
                r.density, r.lhs_label, r.lhs.re, r.lhs.im, r.rhs_label, r.rhs.re, r.rhs.im, r.abs_discrepancy, r.rel_discrepancy, r.verdict
            );
        }
        for k in &self.checks {
            let _ = writeln!(s, "check {:<40} {:>12.4e}  {}", k.name, k.value, if k.passed { "ok" } else { "FAILED" });
        }
        for d in &self.contours {
            let growth = d.growth_exponent.map_or("none".to_string(), |g| format!("{g:.3}"));
            let _ = writeln!(
                s,
                "contour {:<10} dim {} via {}  max|Re| {:.2e} (bound {:.2e})  growth {}  R {:.2}  tail ≤ {:.1e}  excluded {}",
                d.label, d.real_dim, d.method, d.max_real_part, d.re_bound, growth, d.truncation_radius, d.tail_bound_max, d.excluded_samples
            );
        }
        let _ = writeln!(s, "config {}  runtime {:.2}s", &self.provenance.config_hash[..16], self.provenance.runtime_seconds);
        s
    }
}

/// Group data, parameter and density suite shared by every experiment kind.
struct Setup {
    entry: GroupCatalogEntry,
    param: OrbitalParameter,
    pol: Polarization,
    mus: Vec<GaussianDensity>,
    quad: ContourQuadrature,
    pairing: PairingSpec,
}

fn needs_monte_carlo(entry: &GroupCatalogEntry) -> bool {
    entry.label == GroupLabel::Su3
}

fn setup(config: &ExperimentConfig) -> Result<Setup, CliError> {
    config.validate()?;
    let entry = catalog(config.group)?;
    let cartan = match &config.cartan {
        Some(label) => entry.cartan_index(label).ok_or_else(|| invalid(format!("{} has no Cartan `{label}`", config.group)))?,
        None => entry.fundamental_cartan(),
    };
    let lambda = match &config.lambda {
        LambdaSpec::SimplePairings(v) => entry.root_datum.weight_with_simple_pairings(v)?,
        LambdaSpec::Coordinates(v) => Weight::new(v.clone()),
    };
    let param = OrbitalParameter::new(&entry, cartan, lambda)?;
    let pol = match config.polarization {
        PolarizationSelector::MaximallyReal => construct_maximally_real(&entry, &param)?,
        PolarizationSelector::Index(i) => polarization_by_index(&entry, &param, i)?,
    };
    if needs_monte_carlo(&entry) && config.quadrature.seed.is_none() {
        return Err(invalid(format!("{} is integrated by Monte Carlo; quadrature.seed is required", config.group)));
    }
    let d = &config.densities;
    let mus = GaussianDensity::suite(entry.dim(), d.count, d.seed, d.center_radius, (d.width_min, d.width_max));
    let q = &config.quadrature;
    let seed = q.seed.unwrap_or(0);
    let quad = ContourQuadrature {
        order: q.contour_order,
        truncation_radius: q.truncation_radius,
        mc_samples: q.mc_samples,
        seed,
        tolerance: config.tolerance / 2.0,
        ..Default::default()
    };
    let pairing = PairingSpec { order: q.pairing_order, mc_samples: q.mc_samples, seed, tolerance: config.tolerance / 2.0, route: None };
    Ok(Setup { entry, param, pol, mus, quad, pairing })
}

fn diagnostics(s: &Setup, label: &str, contour: &Contour, values: &[ContourValue]) -> Result<ContourDiagnostics, CliError> {
    let rep = check_rossmann_admissibility(&s.entry, contour, &ContourQuadrature { order: 8, ..s.quad.clone() })?;
    Ok(ContourDiagnostics {
        label: label.into(),
        real_dim: contour.total_dim,
        method: match values.first().map(|v| v.method) {
            Some(ContourMethod::MonteCarlo) => "monte_carlo".into(),
            _ => "tensor".into(),
        },
        re_bound: rep.recorded_bound,
        max_real_part: rep.max_real_part,
        growth_exponent: rep.growth_exponent,
        polynomial_growth: rep.polynomial_growth,
        truncation_radius: rep.radius,
        tail_bound_max: values.iter().map(|v| v.tail_bound).fold(0.0, f64::max),
        excluded_samples: values.iter().map(|v| v.excluded).max().unwrap_or(0),
    })
}

fn contour_rows(lhs: &[ContourValue], rhs: &[ContourValue], labels: (&str, &str), tol: f64) -> Vec<ReportRow> {
    lhs.iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (a, b))| ReportRow::new(i, labels.0, (a.estimate.value, a.estimate.error), labels.1, (b.estimate.value, b.estimate.error), tol))
        .collect()
}

fn theta_rows(s: &Setup, lhs: &[ContourValue], label: &str, tol: f64) -> Result<Vec<ReportRow>, CliError> {
    let theta = character_for_parameter(&s.entry, &s.param, &s.pol)?;
    let rhs = pair_suite(&s.entry, &theta, &s.mus, &s.pairing)?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .enumerate()
        .map(|(i, (a, b))| ReportRow::new(i, label, (a.estimate.value, a.estimate.error), "<θ,μ>", (b.estimate.value, b.estimate.error), tol))
        .collect())
}

/// Rows, checks and diagnostics for one experiment.
type Outcome = (Vec<ReportRow>, Vec<Check>, Vec<ContourDiagnostics>);

fn main_theorem(s: &Setup, tol: f64) -> Result<Outcome, CliError> {
    let contour = build_contour(&s.entry, &s.param, &s.pol, &SigmaCChoice::Default)?;
    let lhs = fourier_transform_suite(&s.entry, &contour, &s.mus, &s.quad)?;
    let rows = theta_rows(s, &lhs, "<F[C],μ>", tol)?;
    Ok((rows, vec![], vec![diagnostics(s, "direct", &contour, &lhs)?]))
}

fn kirillov(s: &Setup, tol: f64) -> Result<Outcome, CliError> {
    if !matches!(s.entry.label, GroupLabel::Su2 | GroupLabel::U2 | GroupLabel::Su3 | GroupLabel::TorusU1) {
        return Err(invalid(format!("kirillov_compact needs a compact group, got {}", s.entry.label)));
    }
    if !stabilizer_levi(&s.entry.root_datum, &s.param.lambda).is_empty() {
        return Err(invalid("kirillov_compact needs regular λ"));
    }
    main_theorem(s, tol)
}

fn tempered(s: &Setup, tol: f64) -> Result<Outcome, CliError> {
    if s.entry.label != GroupLabel::Sl2R {
        return Err(invalid(format!("rossmann_tempered is available on sl2R, got {}", s.entry.label)));
    }
    let (mut rows, mut checks, mut diags) = main_theorem(s, tol)?;
    let sc = build_induction_scaffold(&s.entry, &s.param, &s.pol)?;
    if !sc.n_p_roots.is_empty() {
        let direct = build_contour(&s.entry, &s.param, &s.pol, &SigmaCChoice::Default)?;
        let fact = factored_contour(&s.entry, &s.param, &s.pol, &sc, &SigmaCChoice::Default)?;
        let d = fourier_transform_suite(&s.entry, &direct, &s.mus, &s.quad)?;
        let f = fourier_transform_suite(&s.entry, &fact, &s.mus, &s.quad)?;
        rows.extend(theta_rows(s, &f, "<F[C~],μ>", tol)?);
        rows.extend(contour_rows(&f, &d, ("<F[C~],μ>", "<F[C],μ>"), tol));
        diags.push(diagnostics(s, "factored", &fact, &f)?);
    }
    for d in &diags {
        checks.push(Check { name: format!("{}: |Re| within recorded bound", d.label), value: d.max_real_part, passed: d.max_real_part <= d.re_bound });
        checks.push(Check { name: format!("{}: polynomial volume growth", d.label), value: d.growth_exponent.unwrap_or(0.0), passed: d.polynomial_growth });
    }
    Ok((rows, checks, diags))
}

fn sigma_c(s: &Setup, config: &ExperimentConfig, tol: f64) -> Result<Outcome, CliError> {
    let base = build_contour(&s.entry, &s.param, &s.pol, &SigmaCChoice::Default)?;
    let conj = build_contour(&s.entry, &s.param, &s.pol, &config.sigma_c)?;
    let a = fourier_transform_suite(&s.entry, &conj, &s.mus, &s.quad)?;
    let b = fourier_transform_suite(&s.entry, &base, &s.mus, &s.quad)?;
    let rows = contour_rows(&a, &b, ("<F[C_g],μ>", "<F[C],μ>"), tol);
    Ok((rows, vec![], vec![diagnostics(s, "conjugated", &conj, &a)?, diagnostics(s, "default", &base, &b)?]))
}

fn polarization_invariance(s: &Setup, tol: f64, any_admissible: bool) -> Result<Outcome, CliError> {
    let all = enumerate_polarizations(&s.entry, &s.param);
    let theta = character_for_parameter(&s.entry, &s.param, &s.pol)?;
    let reference = if any_admissible {
        pair_suite(&s.entry, &theta, &s.mus, &s.pairing)?.into_iter().map(|p| (p.estimate.value, p.estimate.error)).collect::<Vec<_>>()
    } else {
        let c = build_contour(&s.entry, &s.param, &s.pol, &SigmaCChoice::Default)?;
        fourier_transform_suite(&s.entry, &c, &s.mus, &s.quad)?.into_iter().map(|v| (v.estimate.value, v.estimate.error)).collect()
    };
    let rhs_label = if any_admissible { "<θ,μ>" } else { "<F[C_q0],μ>" };
    let (mut rows, mut checks, mut diags) = (Vec::new(), Vec::new(), Vec::new());
    let mut compared = 0;
    for (i, q) in all.iter().enumerate() {
        let built = if any_admissible {
            build_contour_admissible(&s.entry, &s.param, q, &SigmaCChoice::Default)
        } else {
            build_contour(&s.entry, &s.param, q, &SigmaCChoice::Default)
        };
        let contour = match built {
            Ok(c) => c,
            Err(ContourError::NotMaximallyReal | ContourError::NotGoodRange(_) | ContourError::MissingGammaLift) => continue,
            Err(e) => return Err(e.into()),
        };
        compared += 1;
        let label = format!("<F[C_q{i}],μ>");
        let vals = fourier_transform_suite(&s.entry, &contour, &s.mus, &s.quad)?;
        rows.extend(vals.iter().zip(&reference).enumerate().map(|(k, (v, r))| ReportRow::new(k, &label, (v.estimate.value, v.estimate.error), rhs_label, *r, tol)));
        diags.push(diagnostics(s, &format!("q{i}"), &contour, &vals)?);
    }
    checks.push(Check { name: "polarizations compared".into(), value: compared as f64, passed: compared > 0 });
    Ok((rows, checks, diags))
}

fn coherence(s: &Setup) -> Result<Outcome, CliError> {
    let e = &s.entry;
    let theta = character_for_parameter(e, &s.param, &s.pol)?;
    let fam = coherent_family_from(&theta);
    let datum = &e.root_datum;
    let n = 2 * datum.weyl_group().len() + 2;
    let etas: Vec<Weight> = if datum.simple_roots.is_empty() {
        (1..=n as i64).map(|k| Weight::new(vec![GaussQ::int(k); datum.dim])).collect()
    } else {
        (1..=n as i64)
            .map(|k| datum.weight_with_simple_pairings(&vec![GaussQ::int(k); datum.simple_roots.len()]))
            .collect::<Result<_, _>>()?
    };
    let points: Vec<(usize, Vec<f64>)> = (0..e.cartans.len())
        .flat_map(|h| {
            let r = e.cartans[h].real_basis.len();
            [0.37, -0.81].map(|t| (h, (0..r).map(|j| t * (1.0 + 0.29 * j as f64)).collect()))
        })
        .collect();
    let good = check_coherence(e, &|eta| fam.evaluate(e, eta), &etas, &points)?;
    let bad = check_coherence(e, &|eta| corrupted(e, &fam.evaluate(e, eta)), &etas, &points)?;
    let checks = vec![
        Check { name: "catalog family is coherent".into(), value: good.residual.max(good.spread), passed: good.coherent },
        Check { name: "corrupted control is rejected".into(), value: bad.residual.max(bad.spread), passed: !bad.coherent },
        Check { name: "coherence tolerance".into(), value: COHERENCE_TOL, passed: true },
    ];
    Ok((vec![], checks, vec![]))
}

/// Runs one experiment. Deterministic given the config.
pub fn run(config: &ExperimentConfig) -> Result<VerificationReport, CliError> {
    let start = Instant::now();
    let s = setup(config)?;
    let tol = config.tolerance;
    let (rows, checks, contours) = match config.kind {
        ExperimentKind::VerifyMainTheorem => main_theorem(&s, tol)?,
        ExperimentKind::KirillovCompact => kirillov(&s, tol)?,
        ExperimentKind::RossmannTempered => tempered(&s, tol)?,
        ExperimentKind::SigmaCInvariance => sigma_c(&s, config, tol)?,
        ExperimentKind::PolarizationInvariance => polarization_invariance(&s, tol, false)?,
        ExperimentKind::ConjectureAdmissible => polarization_invariance(&s, tol, true)?,
        ExperimentKind::CoherenceSuite => coherence(&s)?,
    };
    let check_verdicts = checks.iter().map(|c| if c.passed { Verdict::Pass } else { Verdict::Fail });
    let verdict = Verdict::combine(rows.iter().map(|r| r.verdict).chain(check_verdicts));
    Ok(VerificationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        rows,
        checks,
        contours,
        verdict,
        provenance: Provenance {
            config_hash: config.hash(),
            density_seed: config.densities.seed,
            quadrature_seed: config.quadrature.seed,
            crate_version: env!("CARGO_PKG_VERSION").into(),
            runtime_seconds: start.elapsed().as_secs_f64(),
            cached: false,
        },
    })
}

/// Reports stored as `<dir>/<config hash>.json`.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    fn path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    /// A stored report for this config, or none if absent or unreadable.
    pub fn lookup(&self, config: &ExperimentConfig) -> Option<VerificationReport> {
        let hash = config.hash();
        let text = fs::read_to_string(self.path(&hash)).ok()?;
        let mut report: VerificationReport = serde_json::from_str(&text).ok()?;
        if report.provenance.config_hash != hash || report.config != *config {
            return None;
        }
        report.provenance.cached = true;
        Some(report)
    }

    pub fn store(&self, report: &VerificationReport) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::Io { path: self.dir.clone(), source: e })?;
        let path = self.path(&report.provenance.config_hash);
        let mut stored = report.clone();
        stored.provenance.cached = false;
        fs::write(&path, serde_json::to_string_pretty(&stored)?).map_err(|e| CliError::Io { path, source: e })
    }
}

/// `run` behind the cache: a hit replays the stored report marked as cached.
pub fn run_cached(config: &ExperimentConfig, cache: Option<&Cache>) -> Result<VerificationReport, CliError> {
    if let Some(hit) = cache.and_then(|c| c.lookup(config)) {
        return Ok(hit);
    }
    let report = run(config)?;
    if let Some(c) = cache {
        c.store(&report)?;
    }
    Ok(report)
}

pub const PRESETS: [(&str, &str); 14] = [
    ("torus-u1", "U(1), λ = 3i: point contour against e^λ"),
    ("torus-rx", "R_{>0}, λ = 2i: point contour against e^λ"),
    ("su2-kirillov", "su2, ⟨λ, α∨⟩ = 3: the orbit against the 3-dimensional character"),
    ("u2-central", "u2, central λ = (1, 1): fiber sphere through ρ"),
    ("sl2r-discrete-plus", "sl2R, ⟨λ, α∨⟩ = 1: holomorphic discrete series, k = 2"),
    ("sl2r-discrete-minus", "sl2R, ⟨λ, α∨⟩ = −1: antiholomorphic discrete series, k = 2"),
    ("sl2r-principal", "sl2R principal series ν = 1: direct and factored contours"),
    ("su2-sigma-c", "su2 contour rebuilt with a conjugated compact form"),
    ("sl2r-sigma-c", "sl2R contour rebuilt with a conjugated compact form"),
    ("su2-coherence", "coherent family through the su2 character, with corrupted control"),
    ("sl2r-coherence", "coherent family through the sl2R discrete series, with corrupted control"),
    ("su2-polarizations", "every maximally real admissible polarization of an su2 orbit"),
    ("sl2r-admissible", "sl2R principal series over every admissible polarization"),
    ("su3-levi", "su3, Levi u(2), λ + ρ_l regular: Monte Carlo on the 6-dimensional contour"),
];

fn q(s: &str) -> GaussQ {
    s.parse().expect("preset literal")
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let densities = |count| DensitySuiteConfig { count, seed: 1, center_radius: 1.0, width_min: 0.5, width_max: 1.0 };
    let base = |kind, group, cartan: Option<&str>, lambda, tolerance, count| ExperimentConfig {
        schema_version: CONFIG_SCHEMA_VERSION,
        kind,
        group,
        cartan: cartan.map(String::from),
        lambda,
        polarization: PolarizationSelector::MaximallyReal,
        sigma_c: SigmaCChoice::Default,
        densities: densities(count),
        quadrature: QuadratureConfig::default(),
        tolerance,
    };
    use ExperimentKind::*;
    use LambdaSpec::*;
    let fine_pairing = QuadratureConfig { pairing_order: 40, ..Default::default() };
    let conj = SigmaCChoice::ConjugatedBy { element: vec![0.2, 0.3, -0.1] };
    Some(match name {
        // one-dimensional pairings: a high Hermite order is cheap and keeps the error estimate tight
        "torus-u1" => ExperimentConfig { quadrature: fine_pairing, ..base(VerifyMainTheorem, GroupLabel::TorusU1, None, Coordinates(vec![q("3")]), 1e-10, 10) },
        "torus-rx" => ExperimentConfig { quadrature: fine_pairing, ..base(VerifyMainTheorem, GroupLabel::TorusRx, None, Coordinates(vec![q("2i")]), 1e-10, 10) },
        // θ oscillates faster as ⟨λ, α∨⟩ grows; order 24 keeps the estimate inside the budget up to 5
        "su2-kirillov" => ExperimentConfig {
            quadrature: QuadratureConfig { pairing_order: 24, ..Default::default() },
            ..base(KirillovCompact, GroupLabel::Su2, None, SimplePairings(vec![q("3")]), 1e-6, 10)
        },
        "u2-central" => base(VerifyMainTheorem, GroupLabel::U2, None, Coordinates(vec![q("1"), q("1")]), 1e-5, 10),
        "sl2r-discrete-plus" => base(RossmannTempered, GroupLabel::Sl2R, Some("compact"), SimplePairings(vec![q("1")]), 1e-3, 10),
        "sl2r-discrete-minus" => base(RossmannTempered, GroupLabel::Sl2R, Some("compact"), SimplePairings(vec![q("-1")]), 1e-3, 10),
        "sl2r-principal" => base(RossmannTempered, GroupLabel::Sl2R, Some("split"), SimplePairings(vec![q("1i")]), 1e-3, 10),
        "su2-sigma-c" => ExperimentConfig { sigma_c: conj, ..base(SigmaCInvariance, GroupLabel::Su2, None, SimplePairings(vec![q("3")]), 1e-6, 10) },
        "sl2r-sigma-c" => ExperimentConfig {
            sigma_c: conj,
            ..base(SigmaCInvariance, GroupLabel::Sl2R, Some("compact"), SimplePairings(vec![q("2")]), 1e-3, 10)
        },
        "su2-coherence" => base(CoherenceSuite, GroupLabel::Su2, None, SimplePairings(vec![q("3")]), 1e-8, 1),
        "sl2r-coherence" => base(CoherenceSuite, GroupLabel::Sl2R, Some("compact"), SimplePairings(vec![q("2")]), 1e-8, 1),
        "su2-polarizations" => base(PolarizationInvariance, GroupLabel::Su2, None, SimplePairings(vec![q("2")]), 1e-6, 5),
        "sl2r-admissible" => base(ConjectureAdmissible, GroupLabel::Sl2R, Some("split"), SimplePairings(vec![q("2i")]), 1e-3, 5),
        "su3-levi" => ExperimentConfig {
            quadrature: QuadratureConfig { mc_samples: 10_000_000, seed: Some(7), ..Default::default() },
            densities: DensitySuiteConfig { count: 3, seed: 1, center_radius: 0.5, width_min: 0.5, width_max: 1.0 },
            ..base(VerifyMainTheorem, GroupLabel::Su3, None, SimplePairings(vec![q("0"), q("5/2")]), 5e-2, 3)
        },
        _ => return None,
    })
}

/// JSON schemas of the config and report formats.
pub fn schemas() -> serde_json::Value {
    serde_json::json!({
        "config_schema_version": CONFIG_SCHEMA_VERSION,
        "report_schema_version": REPORT_SCHEMA_VERSION,
        "config": schemars::schema_for!(ExperimentConfig),
        "report": schemars::schema_for!(VerificationReport),
    })
}

/// Writes the contour's nodes for the first density of the suite as CSV.
pub fn export_contour(config: &ExperimentConfig, out: &Path) -> Result<usize, CliError> {
    let s = setup(config)?;
    let contour = build_contour(&s.entry, &s.param, &s.pol, &config.sigma_c)?;
    let file = fs::File::create(out).map_err(|e| CliError::Io { path: out.to_path_buf(), source: e })?;
    let mu = &s.mus[0];
    if contour.total_dim <= s.quad.max_deterministic_dim {
        let disc = crate::contour::discretize(&s.entry, &contour, &crate::contour::Resolution::of(&s.mus), &s.quad)?;
        crate::contour::write_nodes_csv(&s.entry, &disc, mu, file)?;
        Ok(disc.fine.len())
    } else {
        Ok(crate::contour::write_samples_csv(&s.entry, &contour, 4, mu, s.quad.imaginary_unit, file)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for (name, _) in PRESETS {
            let c = preset(name).unwrap();
            c.validate().unwrap();
            let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.hash(), c.hash());
        }
        assert!(preset("nope").is_none());
    }

    #[test]
    fn overrides_change_the_hash() {
        let mut c = preset("su2-kirillov").unwrap();
        let h = c.hash();
        c.apply(&Overrides { tolerance: Some(1e-4), ..Default::default() });
        assert_ne!(c.hash(), h);
    }

    #[test]
    fn validation_rejects_bad_numbers() {
        let mut c = preset("su2-kirillov").unwrap();
        c.tolerance = f64::NAN;
        assert!(matches!(c.validate(), Err(CliError::Validation(_))));
        let mut c = preset("su2-kirillov").unwrap();
        c.densities.width_min = 2.0;
        assert!(c.validate().is_err());
        let mut c = preset("su3-levi").unwrap();
        c.quadrature.seed = None;
        assert!(matches!(run(&c), Err(CliError::Validation(_))));
        let text = serde_json::to_string(&preset("su2-kirillov").unwrap()).unwrap().replace("\"tolerance\"", "\"tolerence\"");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn row_verdicts() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(ReportRow::new(0, "a", (one * 1.0000001, 1e-9), "b", (one, 1e-9), 1e-6).verdict, Verdict::Pass);
        assert_eq!(ReportRow::new(0, "a", (one * 1.1, 1e-9), "b", (one, 1e-9), 1e-6).verdict, Verdict::Fail);
        // an error above half the budget is inconclusive, never a failure
        assert_eq!(ReportRow::new(0, "a", (one * 1.1, 1e-6), "b", (one, 1e-9), 1e-6).verdict, Verdict::Inconclusive);
        assert_eq!(Verdict::combine([Verdict::Pass, Verdict::Inconclusive]), Verdict::Inconclusive);
        assert_eq!(Verdict::combine([Verdict::Inconclusive, Verdict::Fail]), Verdict::Fail);
    }

    #[test]
    fn outside_good_range_is_rejected_by_name() {
        let mut c = preset("sl2r-discrete-plus").unwrap();
        c.lambda = LambdaSpec::SimplePairings(vec![q("0")]);
        let err = run(&c).unwrap_err().to_string();
        assert!(err.contains("good range") || err.contains("unsupported"), "{err}");
        // singular su3 parameter: Re⟨λ + ρ_l, α₂∨⟩ = 1/2 − 1/2 vanishes
        let mut c = preset("su3-levi").unwrap();
        c.lambda = LambdaSpec::SimplePairings(vec![q("0"), q("1/2")]);
        assert!(run(&c).unwrap_err().to_string().contains("good range"));
    }

    #[test]
    fn torus_preset_passes() {
        let r = run(&preset("torus-u1").unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.max_abs_discrepancy() <= 1e-12);
        assert!(r.table().contains("Pass"));
    }
}
