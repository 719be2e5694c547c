//! Contours C(O, Γ, q, σc) ⊂ g*_C and their Fourier transforms.
//!
//! A contour is swept out by pairs (base chart, fiber chart): the base covers G_R·λ, the
//! fiber covers U_λ·ρ_l, and a point is Ad(g_b)(λ + Ad(u_f) ρ_l). Densities are
//! Pf(Ω)/(2π√−1)^m with Ω the pulled-back KKS form.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characters::{GaussianDensity, PairingStatus};
use crate::matrix::{bracket, c, char_poly, inverse, trace_form, CMat, I};
use crate::orbits::{good_range_check, integrality_check, stabilizer_levi, OrbitError, OrbitalParameter};
use crate::polarize::{InductionScaffold, Polarization, PolarizeError};
use crate::quadrature::{composite, monte_carlo_vec, periodic, tensor, Estimate, Rule1D};
use crate::realforms::{coadjoint_action as coadjoint, GroupCatalogEntry, GroupLabel, RealFormError};

#[derive(Debug, Error)]
pub enum ContourError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Polarize(#[from] PolarizeError),
    #[error(transparent)]
    RealForm(#[from] RealFormError),
    #[error("λ is outside the good range (Re⟨λ + ρ_l, α∨⟩ margins {0})")]
    NotGoodRange(String),
    #[error("λ + ρ(n) is not integral, so Γ has no genuine lift")]
    MissingGammaLift,
    #[error("polarization is not admissible and maximally real")]
    NotMaximallyReal,
    #[error("vector is not tangent to the orbit (least-squares residual {0:.2e})")]
    NotTangent(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Choice of compact real form: the default one, or its conjugate by exp(X) for X ∈ g_R.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum SigmaCChoice {
    #[default]
    Default,
    /// Orthonormal coordinates of X ∈ g_R.
    ConjugatedBy { element: Vec<f64> },
}

/// Which square root of −1 enters both the orientation and (2π√−1)^m.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum ImaginaryUnit {
    #[default]
    Plus,
    Minus,
}

impl ImaginaryUnit {
    pub fn sign(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// Bounded interval, composite Gauss–Legendre.
    Compact,
    /// Full period, trapezoid rule.
    Periodic,
    /// Noncompact direction cut where the functional norm reaches the truncation radius;
    /// `symmetric` cuts at ±U, otherwise the axis is [lo, U].
    Truncated { symmetric: bool },
}

#[derive(Clone, Debug, Serialize)]
pub struct Axis {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub kind: AxisKind,
}

impl Axis {
    fn compact(name: &'static str, lo: f64, hi: f64) -> Self {
        Self { name, lo, hi, kind: AxisKind::Compact }
    }

    fn periodic(name: &'static str) -> Self {
        Self { name, lo: 0.0, hi: TAU, kind: AxisKind::Periodic }
    }

    fn truncated(name: &'static str, symmetric: bool) -> Self {
        Self { name, lo: if symmetric { f64::NEG_INFINITY } else { 0.0 }, hi: f64::INFINITY, kind: AxisKind::Truncated { symmetric } }
    }

    /// An interior coordinate used as orientation reference and for axis sampling.
    fn reference(&self) -> f64 {
        match self.kind {
            AxisKind::Compact => self.lo + 0.43 * (self.hi - self.lo),
            AxisKind::Periodic => 0.3,
            AxisKind::Truncated { symmetric: true } => 0.4,
            AxisKind::Truncated { symmetric: false } => self.lo + 0.7,
        }
    }
}

pub type GroupMap = Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>;

#[derive(Clone)]
enum ChartMap {
    /// y ↦ g(y), acting by Ad on the chart's reference functional.
    Orbit(GroupMap),
    /// (s, φ) ↦ Ad(k(φ))(ξ₀ + s·direction).
    Slab { rotation: GroupMap, direction: CMat },
}

/// A rectangle of coordinates with a map into G_C (or a K-swept slab).
#[derive(Clone)]
pub struct Chart {
    pub label: &'static str,
    pub axes: Vec<Axis>,
    /// ±1, fixed at construction so that Pf/(√−1)^k is positive at the reference point.
    pub orientation: i8,
    /// An outermost K-rotation coordinate; Pf does not depend on it.
    pub rotation_axis: Option<usize>,
    map: ChartMap,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("label", &self.label)
            .field("axes", &self.axes)
            .field("orientation", &self.orientation)
            .field("rotation_axis", &self.rotation_axis)
            .finish()
    }
}

impl Chart {
    fn point_chart() -> Self {
        Self { label: "point", axes: vec![], orientation: 1, rotation_axis: None, map: ChartMap::Orbit(Arc::new(|_| CMat::zeros(0, 0))) }
    }

    fn is_point(&self) -> bool {
        self.axes.is_empty()
    }

    fn element(&self, y: &[f64], n: usize) -> CMat {
        match &self.map {
            ChartMap::Orbit(g) if !self.axes.is_empty() => g(y),
            _ => CMat::identity(n, n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Direct,
    Factored,
}

#[derive(Clone, Debug)]
pub struct Contour {
    pub group: GroupLabel,
    pub construction: Construction,
    /// λ as a matrix on its Cartan.
    pub lambda: CMat,
    pub rho_l: CMat,
    pub base_charts: Vec<Chart>,
    pub fiber_charts: Vec<Chart>,
    /// Real dimension 2m.
    pub total_dim: usize,
    /// Element g with σc replaced by Ad(g)σcAd(g)⁻¹; every point is conjugated by it.
    pub conjugator: CMat,
    pub sigma_c: SigmaCChoice,
    /// Recorded bound on |Re ξ| over the contour.
    pub re_bound: f64,
}

fn c1(x: f64) -> Complex64 {
    c(x, 0.0)
}

fn embed2(n: usize, i: usize, j: usize, m: [[Complex64; 2]; 2]) -> CMat {
    let mut g = CMat::identity(n, n);
    g[(i, i)] = m[0][0];
    g[(i, j)] = m[0][1];
    g[(j, i)] = m[1][0];
    g[(j, j)] = m[1][1];
    g
}

/// exp(φ·i(E_ii − E_jj)/2)·exp(β(E_ij − E_ji)/2).
fn sphere_element(n: usize, i: usize, j: usize, beta: f64, phi: f64) -> CMat {
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let z = Complex64::new(0.0, phi / 2.0).exp();
    embed2(n, i, j, [[z * cb, z * sb], [-z.conj() * sb, z.conj() * cb]])
}

/// The 2-sphere U(2)/T in the (i, j) block: coordinates (β, φ).
fn sphere_chart(n: usize, i: usize, j: usize) -> Chart {
    Chart {
        label: "sphere",
        axes: vec![Axis::compact("beta", 0.0, PI), Axis::periodic("phi")],
        orientation: 1,
        rotation_axis: Some(1),
        map: ChartMap::Orbit(Arc::new(move |y| sphere_element(n, i, j, y[0], y[1]))),
    }
}

/// exp(tX) with X = c e_dᵀ − e_d c*, c = (cos χ e^{iψ₁}, sin χ e^{iψ₂}) on the indices other than d.
/// X³ = −X, so exp(tX) = 1 + sin t X + (1 − cos t) X².
fn cp2_element(d: usize, y: &[f64]) -> CMat {
    let (t, chi, p1, p2) = (y[0], y[1], y[2], y[3]);
    let others: Vec<usize> = (0..3).filter(|&k| k != d).collect();
    let mut cvec = [Complex64::zero(); 3];
    cvec[others[0]] = Complex64::from_polar(chi.cos(), p1);
    cvec[others[1]] = Complex64::from_polar(chi.sin(), p2);
    let mut x = CMat::zeros(3, 3);
    for k in 0..3 {
        x[(k, d)] += cvec[k];
        x[(d, k)] -= cvec[k].conj();
    }
    let x2 = &x * &x;
    CMat::identity(3, 3) + x * c1(t.sin()) + x2 * c1(1.0 - t.cos())
}

fn cp2_axes() -> Vec<Axis> {
    vec![Axis::compact("t", 0.0, FRAC_PI_2), Axis::compact("chi", 0.0, FRAC_PI_2), Axis::periodic("psi1"), Axis::periodic("psi2")]
}

/// CP² = SU(3)/S(U(1)×U(2)), the lines through e_d moved by the geodesic exp(tX).
fn cp2_chart(d: usize) -> Chart {
    Chart { label: "cp2", axes: cp2_axes(), orientation: 1, rotation_axis: None, map: ChartMap::Orbit(Arc::new(move |y| cp2_element(d, y))) }
}

/// The full flag manifold SU(3)/T: a CP² line followed by a sphere in the complementary block.
fn flag_chart() -> Chart {
    let mut axes = cp2_axes();
    axes.extend([Axis::compact("beta", 0.0, PI), Axis::periodic("phi")]);
    Chart {
        label: "flag",
        axes,
        orientation: 1,
        rotation_axis: None,
        map: ChartMap::Orbit(Arc::new(|y| cp2_element(2, &y[..4]) * sphere_element(3, 0, 1, y[4], y[5]))),
    }
}

/// exp(θ(E12 − E21)) in SL(2, R).
fn rotation2(theta: f64) -> CMat {
    let (ct, st) = (theta.cos(), theta.sin());
    CMat::from_row_slice(2, 2, &[c1(ct), c1(st), c1(-st), c1(ct)])
}

/// One sheet of the two-sheeted hyperboloid through λ ∈ compact Cartan: exp(φJ/2)exp(uH/2).
fn sheet_chart() -> Chart {
    Chart {
        label: "elliptic_sheet",
        axes: vec![Axis::truncated("u", false), Axis::periodic("phi")],
        orientation: 1,
        rotation_axis: Some(1),
        map: ChartMap::Orbit(Arc::new(|y| {
            let a = CMat::from_diagonal(&DVector::from_vec(vec![c1((y[0] / 2.0).exp()), c1((-y[0] / 2.0).exp())]));
            rotation2(y[1] / 2.0) * a
        })),
    }
}

/// The one-sheeted hyperboloid through λ ∈ split Cartan: exp(φJ/2)exp(uS/2).
fn one_sheet_chart() -> Chart {
    Chart {
        label: "hyperbolic_sheet",
        axes: vec![Axis::truncated("u", true), Axis::periodic("phi")],
        orientation: 1,
        rotation_axis: Some(1),
        map: ChartMap::Orbit(Arc::new(|y| {
            let (ch, sh) = ((y[0] / 2.0).cosh(), (y[0] / 2.0).sinh());
            rotation2(y[1] / 2.0) * CMat::from_row_slice(2, 2, &[c1(ch), c1(sh), c1(sh), c1(ch)])
        })),
    }
}

/// Index pairs (i, j) of the matrix blocks spanned by the given roots of a diagonal Cartan.
fn root_pairs(entry: &GroupCatalogEntry, cartan: usize, roots: &[usize]) -> Vec<(usize, usize)> {
    let h = &entry.cartans[cartan];
    let mut out: Vec<(usize, usize)> = roots
        .iter()
        .map(|&a| {
            let e = &h.root_vectors[a];
            let (mut best, mut at) = (0.0, (0, 0));
            for i in 0..e.nrows() {
                for j in 0..e.ncols() {
                    if e[(i, j)].norm() > best {
                        best = e[(i, j)].norm();
                        at = (i.min(j), i.max(j));
                    }
                }
            }
            at
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Chart of U/U' where U' ⊃ T is the compact group with the given roots (matrix model, diagonal Cartan).
fn compact_quotient_chart(entry: &GroupCatalogEntry, cartan: usize, kept_roots: &[usize]) -> Result<Chart, ContourError> {
    let datum = &entry.root_datum;
    let moved: Vec<usize> = (0..datum.n_roots()).filter(|a| !kept_roots.contains(a)).collect();
    if moved.is_empty() {
        return Ok(Chart::point_chart());
    }
    let n = entry.matrix_dim;
    match (entry.label, n) {
        (GroupLabel::Su2 | GroupLabel::U2, 2) => Ok(sphere_chart(2, 0, 1)),
        (GroupLabel::Su3, 3) if kept_roots.is_empty() => Ok(flag_chart()),
        (GroupLabel::Su3, 3) => {
            let pairs = root_pairs(entry, cartan, kept_roots);
            let (i, j) = pairs[0];
            Ok(cp2_chart(3 - i - j))
        }
        _ => Err(ContourError::Unsupported(format!("compact charts on {}", entry.label))),
    }
}

fn conjugator(entry: &GroupCatalogEntry, sigma_c: &SigmaCChoice) -> Result<CMat, ContourError> {
    match sigma_c {
        SigmaCChoice::Default => Ok(CMat::identity(entry.matrix_dim, entry.matrix_dim)),
        SigmaCChoice::ConjugatedBy { element } => {
            if element.len() != entry.dim() || element.iter().any(|x| !x.is_finite()) {
                return Err(ContourError::Unsupported(format!("σc conjugator needs {} finite coordinates", entry.dim())));
            }
            let g = entry.exp_real(element);
            // Ad(g)σc Ad(g)⁻¹ must still commute with σ; g ∈ G_R guarantees it
            let sc = entry.sigma_c.conjugated_by(&g);
            let probe = entry.from_coords(&(0..entry.dim()).map(|k| 0.3 + 0.1 * k as f64).collect::<Vec<_>>());
            let lhs = sc.apply(&entry.sigma.apply(&probe));
            let rhs = entry.sigma.apply(&sc.apply(&probe));
            if crate::matrix::dist(&lhs, &rhs) > 1e-9 * crate::matrix::norm(&probe) {
                return Err(ContourError::Unsupported("conjugated σc does not commute with σ".into()));
            }
            Ok(g)
        }
    }
}

fn check_preconditions(entry: &GroupCatalogEntry, param: &OrbitalParameter, pol: &Polarization, require_maximally_real: bool) -> Result<(), ContourError> {
    if !pol.flags.admissible || (require_maximally_real && !pol.flags.maximally_real) {
        return Err(ContourError::NotMaximallyReal);
    }
    let gr = good_range_check(entry, param, pol);
    if !gr.verdict {
        let m: Vec<String> = gr.margins.iter().map(|(a, q)| format!("α{a}: {q}")).collect();
        return Err(ContourError::NotGoodRange(m.join(", ")));
    }
    if !integrality_check(entry, &mut param.clone(), pol) {
        return Err(ContourError::MissingGammaLift);
    }
    Ok(())
}

/// C(O, Γ, q, σc) = {Ad(g)(λ + Ad(u)ρ_l)}: base charts over G_R·λ, fiber charts over U_λ·ρ_l.
pub fn build_contour(
    entry: &GroupCatalogEntry,
    param: &OrbitalParameter,
    pol: &Polarization,
    sigma_c: &SigmaCChoice,
) -> Result<Contour, ContourError> {
    build_checked(entry, param, pol, sigma_c, true)
}

/// The same construction for any admissible polarization, maximally real or not.
pub fn build_contour_admissible(
    entry: &GroupCatalogEntry,
    param: &OrbitalParameter,
    pol: &Polarization,
    sigma_c: &SigmaCChoice,
) -> Result<Contour, ContourError> {
    build_checked(entry, param, pol, sigma_c, false)
}

fn build_checked(
    entry: &GroupCatalogEntry,
    param: &OrbitalParameter,
    pol: &Polarization,
    sigma_c: &SigmaCChoice,
    require_maximally_real: bool,
) -> Result<Contour, ContourError> {
    check_preconditions(entry, param, pol, require_maximally_real)?;
    let datum = &entry.root_datum;
    let h = param.cartan_data(entry);
    let lambda = h.weight_matrix(datum, &param.lambda);
    let rho_l = h.weight_matrix(datum, &pol.rho_l);
    let levi = stabilizer_levi(datum, &param.lambda);
    let (base, fiber) = match entry.label {
        GroupLabel::TorusU1 | GroupLabel::TorusRx => (Chart::point_chart(), Chart::point_chart()),
        GroupLabel::Su2 | GroupLabel::U2 | GroupLabel::Su3 => {
            let base = compact_quotient_chart(entry, param.cartan, &levi)?;
            let fiber = compact_quotient_chart(entry, param.cartan, &[])?;
            // U_λ·ρ_l is U_λ/T: the flag chart of the Levi alone
            let fiber = if levi.is_empty() {
                Chart::point_chart()
            } else if levi.len() == datum.n_roots() {
                fiber
            } else {
                let (i, j) = root_pairs(entry, param.cartan, &levi)[0];
                sphere_chart(entry.matrix_dim, i, j)
            };
            (base, fiber)
        }
        GroupLabel::Sl2R => {
            if !levi.is_empty() {
                return Err(ContourError::Unsupported("singular λ on sl2R".into()));
            }
            let chart = if h.label == "compact" { sheet_chart() } else { one_sheet_chart() };
            (chart, Chart::point_chart())
        }
        GroupLabel::Sl2CAsReal => return Err(ContourError::Unsupported("contours on sl2C_as_real".into())),
    };
    let total_dim = base.axes.len() + fiber.axes.len();
    let re_bound = entry.functional_norm(&entry.real_part(&lambda)) + entry.functional_norm(&rho_l) + 1e-9;
    let mut contour = Contour {
        group: entry.label,
        construction: Construction::Direct,
        lambda,
        rho_l,
        base_charts: vec![base],
        fiber_charts: vec![fiber],
        total_dim,
        conjugator: conjugator(entry, sigma_c)?,
        sigma_c: sigma_c.clone(),
        re_bound,
    };
    orient(entry, &mut contour)?;
    Ok(contour)
}

/// K_R·[C_M + λn + √−1(g_R/p_R)*], the form used to reduce to the Levi M.
pub fn factored_contour(
    entry: &GroupCatalogEntry,
    param: &OrbitalParameter,
    pol: &Polarization,
    scaffold: &InductionScaffold,
    sigma_c: &SigmaCChoice,
) -> Result<Contour, ContourError> {
    if scaffold.n_p_roots.is_empty() {
        let mut c = build_contour(entry, param, pol, sigma_c)?;
        c.construction = Construction::Factored;
        return Ok(c);
    }
    check_preconditions(entry, param, pol, true)?;
    if entry.label != GroupLabel::Sl2R || !scaffold.m_roots.is_empty() {
        return Err(ContourError::Unsupported(format!("factored contours on {}", entry.label)));
    }
    let datum = &entry.root_datum;
    let h = param.cartan_data(entry);
    // C_M is the point λc since M_R is finite
    let lambda = h.weight_matrix(datum, &(&scaffold.lambda_c + &scaffold.lambda_n));
    // (g_R/p_R)* ≅ n_p under the trace form; the real root vector fixes the slab direction
    let e = &h.root_vectors[scaffold.n_p_roots[0]];
    let big = e.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("nonzero root vector");
    let real_e = e * (big.norm() / big);
    let direction = &real_e * (I / c1(entry.functional_norm(&real_e)));
    let slab = Chart {
        label: "slab",
        axes: vec![Axis::truncated("s", true), Axis::periodic("phi")],
        orientation: 1,
        rotation_axis: Some(1),
        map: ChartMap::Slab { rotation: Arc::new(|y| rotation2(y[0] / 2.0)), direction },
    };
    let mut contour = Contour {
        group: entry.label,
        construction: Construction::Factored,
        re_bound: entry.functional_norm(&entry.real_part(&lambda)) + 1e-9,
        lambda,
        rho_l: CMat::zeros(2, 2),
        base_charts: vec![slab],
        fiber_charts: vec![Chart::point_chart()],
        total_dim: 2,
        conjugator: conjugator(entry, sigma_c)?,
        sigma_c: sigma_c.clone(),
    };
    orient(entry, &mut contour)?;
    Ok(contour)
}

/// A base chart paired with a fiber chart.
#[derive(Clone, Copy, Debug)]
pub struct PatchId {
    pub base: usize,
    pub fiber: usize,
}

impl Contour {
    pub fn patches(&self) -> Vec<PatchId> {
        (0..self.base_charts.len())
            .flat_map(|b| (0..self.fiber_charts.len()).map(move |f| PatchId { base: b, fiber: f }))
            .collect()
    }

    pub fn axes(&self, p: PatchId) -> Vec<Axis> {
        self.base_charts[p.base].axes.iter().chain(&self.fiber_charts[p.fiber].axes).cloned().collect()
    }

    /// λ + ρ_l, the reference point for orbit-type charts.
    pub fn reference_functional(&self) -> CMat {
        &self.lambda + &self.rho_l
    }

    pub fn point(&self, p: PatchId, y: &[f64]) -> CMat {
        let base = &self.base_charts[p.base];
        let fiber = &self.fiber_charts[p.fiber];
        let (yb, yf) = y.split_at(base.axes.len());
        match &base.map {
            ChartMap::Orbit(_) => {
                let inner = if fiber.is_point() { self.reference_functional() } else { &self.lambda + coadjoint(&fiber.element(yf, self.n()), &self.rho_l) };
                coadjoint(&(&self.conjugator * base.element(yb, self.n())), &inner)
            }
            ChartMap::Slab { rotation, direction } => {
                let inner = &self.lambda + direction * c1(yb[0]);
                coadjoint(&(&self.conjugator * rotation(&yb[1..])), &inner)
            }
        }
    }

    /// g(y) with point(y) = Ad(g(y))(λ + ρ_l), when the patch is of orbit type.
    pub fn group_element(&self, p: PatchId, y: &[f64]) -> Option<CMat> {
        let base = &self.base_charts[p.base];
        let fiber = &self.fiber_charts[p.fiber];
        let (yb, yf) = y.split_at(base.axes.len());
        match base.map {
            ChartMap::Orbit(_) => Some(&self.conjugator * base.element(yb, self.n()) * fiber.element(yf, self.n())),
            ChartMap::Slab { .. } => None,
        }
    }

    fn n(&self) -> usize {
        self.lambda.nrows()
    }

    fn orientation(&self, p: PatchId) -> f64 {
        f64::from(self.base_charts[p.base].orientation * self.fiber_charts[p.fiber].orientation)
    }

    pub fn is_compact(&self) -> bool {
        self.base_charts.iter().chain(&self.fiber_charts).all(|ch| ch.axes.iter().all(|a| !matches!(a.kind, AxisKind::Truncated { .. })))
    }
}

/// Least-squares solver for [Z, ξ] = v over the complexified real basis.
pub struct TangentSolver {
    basis: Vec<CMat>,
    svd: nalgebra::SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    cutoff: f64,
    xi: CMat,
}

/// Relative least-squares residual above which a vector is declared non-tangent.
pub const TANGENCY_THRESHOLD: f64 = 1e-7;

impl TangentSolver {
    pub fn new(entry: &GroupCatalogEntry, xi: &CMat) -> Self {
        let n2 = xi.len();
        let basis = entry.real_basis.clone();
        let cols: Vec<CMat> = basis.iter().map(|e| bracket(e, xi)).collect();
        let a = DMatrix::from_fn(n2, cols.len(), |r, k| cols[k][r]);
        let svd = a.svd(true, true);
        let cutoff = 1e-9 * svd.singular_values.max().max(1e-300);
        Self { basis, svd, cutoff, xi: xi.clone() }
    }

    /// Minimal-norm Z with [Z, ξ] = v; stabilizer directions are projected out.
    pub fn solve(&self, v: &CMat) -> Result<CMat, ContourError> {
        let b = DVector::from_iterator(v.len(), v.iter().copied());
        let z = self.svd.solve(&b, self.cutoff).map_err(|_| ContourError::NotTangent(f64::INFINITY))?;
        let zm = self.basis.iter().zip(z.iter()).fold(CMat::zeros(v.nrows(), v.ncols()), |acc, (e, &t)| acc + e * t);
        let residual = (bracket(&zm, &self.xi) - v).norm();
        let scale = v.norm().max(1e-12 * self.xi.norm()).max(1e-300);
        if residual > TANGENCY_THRESHOLD * scale {
            return Err(ContourError::NotTangent(residual / scale));
        }
        Ok(zm)
    }
}

/// ω_ξ(v₁, v₂) = ξ([Z₁, Z₂]) where [Z_i, ξ] = v_i.
pub fn kks_eval(entry: &GroupCatalogEntry, xi: &CMat, v1: &CMat, v2: &CMat) -> Result<Complex64, ContourError> {
    let s = TangentSolver::new(entry, xi);
    let (z1, z2) = (s.solve(v1)?, s.solve(v2)?);
    Ok(trace_form(xi, &bracket(&z1, &z2)))
}

/// Pfaffian of a skew-symmetric matrix by pivoted Parlett–Reid elimination.
pub fn pfaffian(a: &CMat) -> Complex64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return Complex64::zero();
    }
    let mut a = a.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let kp = (k + 1..n).max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm())).expect("nonempty");
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv.is_zero() {
            return Complex64::zero();
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
            let row: Vec<Complex64> = (k + 2..n).map(|j| a[(k + 1, j)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += -tau[ii] * row[jj] + tau[jj] * row[ii];
                }
            }
        }
        k += 2;
    }
    pf
}

const FD_STEP: f64 = 1e-3;

/// Point and ∂_i of a map by fourth-order central differences.
fn tangents(map: &dyn Fn(&[f64]) -> CMat, y: &[f64]) -> (CMat, Vec<CMat>) {
    let mut z = y.to_vec();
    let vs = (0..y.len())
        .map(|i| {
            let base = z[i];
            let mut at = |dz: f64| {
                z[i] = base + dz;
                map(&z)
            };
            let (p2, p1, m1, m2) = (at(2.0 * FD_STEP), at(FD_STEP), at(-FD_STEP), at(-2.0 * FD_STEP));
            z[i] = base;
            (m2 - p2 + (p1 - m1) * c1(8.0)) * c1(1.0 / (12.0 * FD_STEP))
        })
        .collect();
    (map(y), vs)
}

/// Ω_ij = ω(∂_i, ∂_j) for a map into a coadjoint orbit, via least-squares tangent solves.
pub fn pulled_back_form(entry: &GroupCatalogEntry, map: &dyn Fn(&[f64]) -> CMat, y: &[f64]) -> Result<(CMat, CMat), ContourError> {
    let (xi, vs) = tangents(map, y);
    let solver = TangentSolver::new(entry, &xi);
    let zs = vs.iter().map(|v| solver.solve(v)).collect::<Result<Vec<_>, _>>()?;
    let d = y.len();
    let omega = CMat::from_fn(d, d, |i, j| if i == j { Complex64::zero() } else { trace_form(&xi, &bracket(&zs[i], &zs[j])) });
    Ok((xi, omega))
}

/// Ω from generators Z_i = (∂_i g) g⁻¹ of a group-valued chart; no solve needed.
fn generator_form(g: &dyn Fn(&[f64]) -> CMat, xi0: &CMat, y: &[f64]) -> (CMat, CMat) {
    const H: f64 = 1e-6;
    let g0 = g(y);
    let g0_inv = inverse(&g0).expect("group element");
    let xi = &g0 * xi0 * &g0_inv;
    let mut z = y.to_vec();
    let zs: Vec<CMat> = (0..y.len())
        .map(|i| {
            let base = z[i];
            z[i] = base + H;
            let p = g(&z);
            z[i] = base - H;
            let m = g(&z);
            z[i] = base;
            (p - m) * c1(0.5 / H) * &g0_inv
        })
        .collect();
    let d = y.len();
    let omega = CMat::from_fn(d, d, |i, j| if i == j { Complex64::zero() } else { trace_form(&xi, &bracket(&zs[i], &zs[j])) });
    (xi, omega)
}

/// (2π·√−1)^m with √−1 = ±i.
fn two_pi_i_pow(m: usize, unit: ImaginaryUnit) -> Complex64 {
    Complex64::new(0.0, TAU * unit.sign()).powu(m as u32)
}

/// o·Pf/(2π√−1)^m with the orientation taken relative to the chosen √−1.
fn density_from_pf(pf: Complex64, orientation: f64, m: usize, unit: ImaginaryUnit) -> Complex64 {
    // reversing √−1 reverses the orientation by (−1)^m
    let flip = if m % 2 == 1 { unit.sign() } else { 1.0 };
    pf * (orientation * flip) / two_pi_i_pow(m, unit)
}

fn orientation_sign(pf: Complex64, k: usize) -> i8 {
    let p = pf / Complex64::new(0.0, 1.0).powu(k as u32);
    let s = if p.re.abs() >= 1e-12 * p.norm() { p.re } else { p.im };
    if s >= 0.0 { 1 } else { -1 }
}

/// Orients each base chart by ω^k/(√−1)^k on G_R·λ and each fiber chart likewise on U_λ·ρ_l.
fn orient(entry: &GroupCatalogEntry, contour: &mut Contour) -> Result<(), ContourError> {
    let n = contour.n();
    for b in 0..contour.base_charts.len() {
        let ch = &contour.base_charts[b];
        if ch.is_point() {
            continue;
        }
        let y: Vec<f64> = ch.axes.iter().map(Axis::reference).collect();
        let (lam, conj) = (contour.lambda.clone(), contour.conjugator.clone());
        let map: Box<dyn Fn(&[f64]) -> CMat> = match &ch.map {
            ChartMap::Orbit(g) => {
                let g = g.clone();
                Box::new(move |y| coadjoint(&(&conj * g(y)), &lam))
            }
            ChartMap::Slab { rotation, direction } => {
                let (r, d) = (rotation.clone(), direction.clone());
                Box::new(move |y| coadjoint(&(&conj * r(&y[1..])), &(&lam + &d * c1(y[0]))))
            }
        };
        let (_, omega) = pulled_back_form(entry, &*map, &y)?;
        contour.base_charts[b].orientation = orientation_sign(pfaffian(&omega), y.len() / 2);
    }
    for f in 0..contour.fiber_charts.len() {
        let ch = &contour.fiber_charts[f];
        if ch.is_point() {
            continue;
        }
        let y: Vec<f64> = ch.axes.iter().map(Axis::reference).collect();
        let rho = contour.rho_l.clone();
        let g = ch.clone();
        let map = move |y: &[f64]| coadjoint(&g.element(y, n), &rho);
        let (_, omega) = pulled_back_form(entry, &map, &y)?;
        contour.fiber_charts[f].orientation = orientation_sign(pfaffian(&omega), y.len() / 2);
    }
    Ok(())
}

/// Pf(Ω)/(2π√−1)^m with the chart orientations, at coordinates y of a patch.
pub fn symplectic_volume_density(
    entry: &GroupCatalogEntry,
    contour: &Contour,
    patch: PatchId,
    y: &[f64],
    unit: ImaginaryUnit,
) -> Result<Complex64, ContourError> {
    let (_, omega) = pulled_back_form(entry, &|z| contour.point(patch, z), y)?;
    Ok(density_from_pf(pfaffian(&omega), contour.orientation(patch), contour.total_dim / 2, unit))
}

/// Same density with Ω built from group generators (orbit-type patches only).
pub fn symplectic_volume_density_generators(contour: &Contour, patch: PatchId, y: &[f64], unit: ImaginaryUnit) -> Option<Complex64> {
    contour.group_element(patch, y)?;
    let (_, omega) = generator_form(&|z| contour.group_element(patch, z).expect("orbit patch"), &contour.reference_functional(), y);
    Some(density_from_pf(pfaffian(&omega), contour.orientation(patch), contour.total_dim / 2, unit))
}

#[derive(Clone, Debug, Serialize, Deserialize, schemars::JsonSchema)]
pub struct ContourQuadrature {
    /// Gauss–Legendre points per panel; the error estimate halves every panel.
    pub order: usize,
    /// Functional-norm radius where noncompact directions are cut; by default √80 over the narrowest width.
    pub truncation_radius: Option<f64>,
    pub mc_samples: usize,
    pub seed: u64,
    /// Relative error above which the value is flagged unconverged.
    pub tolerance: f64,
    pub imaginary_unit: ImaginaryUnit,
    /// Contours of higher real dimension are integrated by Monte Carlo.
    pub max_deterministic_dim: usize,
}

impl Default for ContourQuadrature {
    fn default() -> Self {
        Self { order: 32, truncation_radius: None, mc_samples: 1_000_000, seed: 0, tolerance: 1e-6, imaginary_unit: ImaginaryUnit::Plus, max_deterministic_dim: 4 }
    }
}

/// What a density suite asks of the grids.
#[derive(Clone, Copy, Debug)]
pub struct Resolution {
    pub center_max: f64,
    pub width_min: f64,
    pub width_max: f64,
}

impl Resolution {
    pub fn of(mus: &[GaussianDensity]) -> Self {
        let norm = |m: &GaussianDensity| m.center.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self {
            center_max: mus.iter().map(norm).fold(0.0, f64::max),
            width_min: mus.iter().map(|m| m.width).fold(f64::INFINITY, f64::min),
            width_max: mus.iter().map(|m| m.width).fold(0.0, f64::max),
        }
    }

    fn radius(&self, quad: &ContourQuadrature) -> f64 {
        quad.truncation_radius.unwrap_or(80f64.sqrt() / self.width_min)
    }

    /// Largest phase rate of F[μ] along the contour, per unit functional norm.
    fn rate(&self, radius: f64) -> f64 {
        self.center_max + self.width_max * self.width_max * radius + 1.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContourNode {
    pub coords: Vec<f64>,
    /// ξ(e_i) on the orthonormal basis.
    pub values: Vec<Complex64>,
    pub pfaffian: Complex64,
    /// Quadrature weight × density under the requested √−1.
    pub weight: Complex64,
    /// Same under the opposite √−1.
    pub weight_conjugate: Complex64,
    pub norm: f64,
    pub re_norm: f64,
}

/// Nodes on the boundary of one truncated end, with κ = d|ξ|/du there.
#[derive(Clone, Debug)]
struct BoundaryRing {
    nodes: Vec<(Vec<Complex64>, f64)>,
    kappa: f64,
    radius: f64,
}

#[derive(Clone, Debug)]
pub struct Discretization {
    pub fine: Vec<ContourNode>,
    pub coarse: Vec<ContourNode>,
    pub radius: f64,
    pub excluded: usize,
    boundary: Vec<BoundaryRing>,
}

impl Discretization {
    /// Estimated mass of |F[μ]|·|density| beyond the truncation.
    pub fn tail_bound(&self, mu: &GaussianDensity) -> f64 {
        let s2 = mu.width * mu.width;
        self.boundary
            .iter()
            .map(|r| {
                let edge: f64 = r.nodes.iter().map(|(v, w)| w * mu.fourier_values(v).norm()).sum();
                edge / (r.kappa.max(1e-12) * s2 * r.radius.max(1e-12))
            })
            .sum()
    }
}

/// Concrete axis bounds and panel counts for one patch.
struct PatchGrid {
    id: PatchId,
    bounds: Vec<(f64, f64)>,
    kinds: Vec<AxisKind>,
    panels: Vec<usize>,
    rotation: Option<usize>,
}

fn axis_samples(kind: AxisKind, lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match kind {
        AxisKind::Periodic => (0..k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect(),
        _ => (0..k).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / k as f64).collect(),
    }
}

fn plan_patch(entry: &GroupCatalogEntry, contour: &Contour, id: PatchId, res: &Resolution, radius: f64) -> PatchGrid {
    let axes = contour.axes(id);
    let reference: Vec<f64> = axes.iter().map(Axis::reference).collect();
    let norm_at = |y: &[f64]| entry.functional_norm(&contour.point(id, y));
    let mut bounds: Vec<(f64, f64)> = axes.iter().map(|a| (a.lo, a.hi)).collect();
    for (i, a) in axes.iter().enumerate() {
        if let AxisKind::Truncated { symmetric } = a.kind {
            // smallest U with every sampled boundary point at norm ≥ radius
            let min_norm = |u: f64| {
                let mut m = f64::INFINITY;
                for (j, b) in axes.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let samples = if b.kind == AxisKind::Periodic { axis_samples(b.kind, b.lo, b.hi, 16) } else { vec![reference[j]] };
                    for s in samples {
                        let mut y = reference.clone();
                        y[j] = s;
                        y[i] = u;
                        m = m.min(norm_at(&y));
                        if symmetric {
                            y[i] = -u;
                            m = m.min(norm_at(&y));
                        }
                    }
                }
                m
            };
            let mut u = a.lo.max(0.0) + 0.5;
            for _ in 0..200 {
                if min_norm(u) >= radius {
                    break;
                }
                u *= 1.1;
            }
            bounds[i] = if symmetric { (-u, u) } else { (a.lo, u) };
        }
    }
    let ell = 20.0 / res.rate(radius);
    let panels = axes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if a.kind == AxisKind::Periodic {
                // trapezoid nodes: linear phase ⟨X₀, ξ⟩ winds at most center·|ξ| times
                let extent = if contour.is_compact() { sample_extent(entry, contour, id, &bounds, &axes) } else { radius };
                let m = (2.0 * res.center_max * extent + 40.0).ceil() as usize;
                return m.max(32).next_multiple_of(2);
            }
            let (lo, hi) = bounds[i];
            let speed = axis_samples(AxisKind::Compact, lo, hi, 12)
                .into_iter()
                .map(|t| {
                    let mut p = reference.clone();
                    let mut m = reference.clone();
                    p[i] = t + 1e-4;
                    m[i] = t - 1e-4;
                    entry.functional_norm(&(contour.point(id, &p) - contour.point(id, &m))) / 2e-4
                })
                .fold(0.0, f64::max);
            ((speed * (hi - lo) / ell).ceil() as usize).max(2)
        })
        .collect();
    let rotation = if contour.fiber_charts[id.fiber].is_point() {
        contour.base_charts[id.base].rotation_axis
    } else if contour.base_charts[id.base].is_point() {
        contour.fiber_charts[id.fiber].rotation_axis
    } else {
        None
    };
    PatchGrid { id, bounds, kinds: axes.iter().map(|a| a.kind).collect(), panels, rotation }
}

fn sample_extent(entry: &GroupCatalogEntry, contour: &Contour, id: PatchId, bounds: &[(f64, f64)], axes: &[Axis]) -> f64 {
    let per_axis: Vec<Vec<f64>> = axes.iter().zip(bounds).map(|(a, &(lo, hi))| axis_samples(a.kind, lo, hi, 5)).collect();
    let rules: Vec<Rule1D> = per_axis.into_iter().map(|n| Rule1D { weights: vec![1.0; n.len()], nodes: n }).collect();
    tensor(&rules).iter().map(|(y, _)| entry.functional_norm(&contour.point(id, y))).fold(0.0, f64::max)
}

fn axis_rule(kind: AxisKind, lo: f64, hi: f64, order: usize, panels: usize) -> Rule1D {
    match kind {
        AxisKind::Periodic => periodic(panels, lo, hi),
        _ => composite(order, panels, lo, hi),
    }
}

fn make_node(
    entry: &GroupCatalogEntry,
    contour: &Contour,
    id: PatchId,
    y: Vec<f64>,
    pf: Complex64,
    w: f64,
    unit: ImaginaryUnit,
) -> ContourNode {
    let xi = contour.point(id, &y);
    let m = contour.total_dim / 2;
    let o = contour.orientation(id);
    ContourNode {
        values: entry.functional_values(&xi),
        weight: density_from_pf(pf, o, m, unit) * w,
        weight_conjugate: density_from_pf(pf, o, m, unit.other()) * w,
        pfaffian: pf,
        norm: entry.functional_norm(&xi),
        re_norm: entry.functional_norm(&entry.real_part(&xi)),
        coords: y,
    }
}

fn pf_at(entry: &GroupCatalogEntry, contour: &Contour, id: PatchId, y: &[f64]) -> Result<Complex64, ContourError> {
    if y.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let (_, omega) = pulled_back_form(entry, &|z| contour.point(id, z), y)?;
    Ok(pfaffian(&omega))
}

fn level_nodes(
    entry: &GroupCatalogEntry,
    contour: &Contour,
    grid: &PatchGrid,
    order: usize,
    refine: usize,
    unit: ImaginaryUnit,
    excluded: &mut usize,
) -> Vec<ContourNode> {
    let rules: Vec<Rule1D> = (0..grid.kinds.len())
        .map(|i| axis_rule(grid.kinds[i], grid.bounds[i].0, grid.bounds[i].1, order, grid.panels[i] * refine))
        .collect();
    let mut out = Vec::new();
    match grid.rotation {
        Some(r) => {
            let others: Vec<Rule1D> = rules.iter().enumerate().filter(|(i, _)| *i != r).map(|(_, x)| x.clone()).collect();
            for (q, w) in tensor(&others) {
                let mut y = q.clone();
                y.insert(r, rules[r].nodes[0]);
                let pf = match pf_at(entry, contour, grid.id, &y) {
                    Ok(p) => p,
                    Err(_) => {
                        *excluded += rules[r].len();
                        continue;
                    }
                };
                for (&phi, &wp) in rules[r].nodes.iter().zip(&rules[r].weights) {
                    let mut yy = q.clone();
                    yy.insert(r, phi);
                    out.push(make_node(entry, contour, grid.id, yy, pf, w * wp, unit));
                }
            }
        }
        None => {
            for (y, w) in tensor(&rules) {
                match pf_at(entry, contour, grid.id, &y) {
                    Ok(pf) => out.push(make_node(entry, contour, grid.id, y, pf, w, unit)),
                    Err(_) => *excluded += 1,
                }
            }
        }
    }
    out
}

fn boundary_rings(entry: &GroupCatalogEntry, contour: &Contour, grid: &PatchGrid, order: usize, unit: ImaginaryUnit) -> Vec<BoundaryRing> {
    let mut out = Vec::new();
    for (i, kind) in grid.kinds.iter().enumerate() {
        let AxisKind::Truncated { symmetric } = kind else { continue };
        let ends: Vec<f64> = if *symmetric { vec![grid.bounds[i].0, grid.bounds[i].1] } else { vec![grid.bounds[i].1] };
        let others: Vec<Rule1D> = (0..grid.kinds.len())
            .filter(|&j| j != i)
            .map(|j| axis_rule(grid.kinds[j], grid.bounds[j].0, grid.bounds[j].1, order, grid.panels[j]))
            .collect();
        for end in ends {
            let outward = end.signum();
            let mut nodes = Vec::new();
            let (mut kappa, mut radius) = (f64::INFINITY, f64::INFINITY);
            for (q, w) in tensor(&others) {
                let mut y = q.clone();
                y.insert(i, end);
                let Ok(pf) = pf_at(entry, contour, grid.id, &y) else { continue };
                let node = make_node(entry, contour, grid.id, y.clone(), pf, w, unit);
                let mut y2 = y.clone();
                y2[i] = end + 1e-4 * outward;
                let n2 = entry.functional_norm(&contour.point(grid.id, &y2));
                kappa = kappa.min((n2 - node.norm) / 1e-4);
                radius = radius.min(node.norm);
                nodes.push((node.values, node.weight.norm()));
            }
            out.push(BoundaryRing { nodes, kappa, radius });
        }
    }
    out
}

/// Nodes of every patch at base and refined resolution.
pub fn discretize(entry: &GroupCatalogEntry, contour: &Contour, res: &Resolution, quad: &ContourQuadrature) -> Result<Discretization, ContourError> {
    if contour.total_dim > quad.max_deterministic_dim {
        return Err(ContourError::Unsupported(format!("deterministic grid in dimension {}", contour.total_dim)));
    }
    let radius = res.radius(quad);
    let mut excluded = 0;
    let (mut fine, mut coarse, mut boundary) = (Vec::new(), Vec::new(), Vec::new());
    for id in contour.patches() {
        let grid = plan_patch(entry, contour, id, res, radius);
        coarse.extend(level_nodes(entry, contour, &grid, quad.order, 1, quad.imaginary_unit, &mut excluded));
        fine.extend(level_nodes(entry, contour, &grid, quad.order, 2, quad.imaginary_unit, &mut excluded));
        boundary.extend(boundary_rings(entry, contour, &grid, quad.order, quad.imaginary_unit));
    }
    Ok(Discretization { fine, coarse, radius, excluded, boundary })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourMethod {
    Tensor,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContourValue {
    /// Value with error = refinement difference (or standard error) + tail bound.
    pub estimate: Estimate,
    pub quadrature_error: f64,
    pub tail_bound: f64,
    pub method: ContourMethod,
    pub status: PairingStatus,
    /// |value − value with the opposite √−1|.
    pub convention_gap: f64,
    pub excluded: usize,
}

fn status(e: &Estimate, tol: f64) -> PairingStatus {
    if e.error <= tol * e.value.norm().max(1e-300) {
        PairingStatus::Converged
    } else {
        PairingStatus::Unconverged
    }
}

/// ∫_C F[μ](ξ) ω^m/((2π√−1)^m m!).
pub fn fourier_transform(entry: &GroupCatalogEntry, contour: &Contour, mu: &GaussianDensity, quad: &ContourQuadrature) -> Result<ContourValue, ContourError> {
    Ok(fourier_transform_suite(entry, contour, std::slice::from_ref(mu), quad)?.remove(0))
}

/// Fourier transforms for a density suite, sharing one discretization.
pub fn fourier_transform_suite(
    entry: &GroupCatalogEntry,
    contour: &Contour,
    mus: &[GaussianDensity],
    quad: &ContourQuadrature,
) -> Result<Vec<ContourValue>, ContourError> {
    if contour.total_dim > quad.max_deterministic_dim {
        return monte_carlo_suite(entry, contour, mus, quad);
    }
    let disc = discretize(entry, contour, &Resolution::of(mus), quad)?;
    Ok(mus.iter().map(|mu| evaluate(&disc, mu, quad)).collect())
}

/// Σ w·F[μ] over an existing discretization.
pub fn evaluate(disc: &Discretization, mu: &GaussianDensity, quad: &ContourQuadrature) -> ContourValue {
    let sum = |nodes: &[ContourNode], conj: bool| -> Complex64 {
        nodes.iter().map(|n| mu.fourier_values(&n.values) * if conj { n.weight_conjugate } else { n.weight }).sum()
    };
    let (fine, coarse) = (sum(&disc.fine, false), sum(&disc.coarse, false));
    let tail = disc.tail_bound(mu);
    let q = Estimate::from_pair(fine, coarse);
    let estimate = Estimate { value: fine, error: q.error + tail };
    ContourValue {
        estimate,
        quadrature_error: q.error,
        tail_bound: tail,
        method: ContourMethod::Tensor,
        status: status(&estimate, quad.tolerance),
        convention_gap: (fine - sum(&disc.fine, true)).norm(),
        excluded: disc.excluded,
    }
}

/// Uniform sampling of each (compact) patch box with generator-built Pfaffians.
fn monte_carlo_suite(entry: &GroupCatalogEntry, contour: &Contour, mus: &[GaussianDensity], quad: &ContourQuadrature) -> Result<Vec<ContourValue>, ContourError> {
    if !contour.is_compact() {
        return Err(ContourError::Unsupported("Monte Carlo on noncompact contours".into()));
    }
    let patches = contour.patches();
    let m = contour.total_dim / 2;
    let unit = quad.imaginary_unit;
    let boxes: Vec<(PatchId, Vec<Axis>, f64)> = patches
        .iter()
        .map(|&p| {
            let axes = contour.axes(p);
            let vol = axes.iter().map(|a| a.hi - a.lo).product::<f64>();
            (p, axes, vol)
        })
        .collect();
    if contour.base_charts.iter().any(|ch| matches!(ch.map, ChartMap::Slab { .. })) {
        return Err(ContourError::Unsupported("Monte Carlo needs orbit-type charts".into()));
    }
    let xi0 = contour.reference_functional();
    let width = 2 * mus.len();
    let basis = &entry.orthonormal_basis;
    let np = boxes.len() as f64;
    let ests = monte_carlo_vec(quad.seed, quad.mc_samples, width, |rng, out| {
        let (p, axes, vol) = &boxes[rng.random_range(0..boxes.len())];
        let y: Vec<f64> = axes.iter().map(|a| rng.random_range(a.lo..a.hi)).collect();
        let g = |z: &[f64]| contour.group_element(*p, z).expect("orbit patch");
        let (xi, omega) = generator_form(&g, &xi0, &y);
        let pf = pfaffian(&omega);
        let o = contour.orientation(*p);
        let w = density_from_pf(pf, o, m, unit) * (vol * np);
        let wc = density_from_pf(pf, o, m, unit.other()) * (vol * np);
        let v: Vec<Complex64> = basis.iter().map(|e| trace_form(&xi, e)).collect();
        for (k, mu) in mus.iter().enumerate() {
            let f = mu.fourier_values(&v);
            out[2 * k] = f * w;
            out[2 * k + 1] = f * wc;
        }
    });
    Ok((0..mus.len())
        .map(|k| {
            let e = ests[2 * k];
            ContourValue {
                estimate: e,
                quadrature_error: e.error,
                tail_bound: 0.0,
                method: ContourMethod::MonteCarlo,
                status: status(&e, quad.tolerance),
                convention_gap: (e.value - ests[2 * k + 1].value).norm(),
                excluded: 0,
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct RossmannReport {
    /// Largest |Re ξ| over the sampled nodes.
    pub max_real_part: f64,
    /// The bound recorded at construction.
    pub recorded_bound: f64,
    pub bounded_real_part: bool,
    /// Slope of log V(r) against log r, V(r) the |density| mass within radius r; none for compact contours.
    pub growth_exponent: Option<f64>,
    pub polynomial_growth: bool,
    pub radius: f64,
}

/// Checks |Re ξ| ≤ const and polynomial growth of the density mass on the fine grid.
pub fn check_rossmann_admissibility(entry: &GroupCatalogEntry, contour: &Contour, quad: &ContourQuadrature) -> Result<RossmannReport, ContourError> {
    let res = Resolution { center_max: 1.0, width_min: 1.0, width_max: 1.0 };
    let (nodes, radius): (Vec<(f64, f64, f64)>, f64) = if contour.total_dim > quad.max_deterministic_dim {
        let pts = contour_samples(contour, 5);
        (pts.iter().map(|(_, xi)| (entry.functional_norm(xi), entry.functional_norm(&entry.real_part(xi)), 0.0)).collect(), 0.0)
    } else {
        let d = discretize(entry, contour, &res, quad)?;
        (d.fine.iter().map(|n| (n.norm, n.re_norm, n.weight.norm())).collect(), d.radius)
    };
    let max_re = nodes.iter().map(|n| n.1).fold(0.0, f64::max);
    let growth = if contour.is_compact() {
        None
    } else {
        let pts: Vec<(f64, f64)> = (0..=8)
            .map(|k| radius * (0.25f64).powf(1.0 - k as f64 / 8.0))
            .map(|r| (r.ln(), nodes.iter().filter(|n| n.0 <= r).map(|n| n.2).sum::<f64>().max(1e-300).ln()))
            .collect();
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    };
    Ok(RossmannReport {
        max_real_part: max_re,
        recorded_bound: contour.re_bound,
        bounded_real_part: max_re <= contour.re_bound * (1.0 + 1e-6) + 1e-9,
        polynomial_growth: growth.is_none_or(|g| g.is_finite() && g <= entry.dim() as f64),
        growth_exponent: growth,
        radius,
    })
}

/// Points on a k-per-axis grid of every patch; truncated axes run to u = ±3.
pub fn contour_samples(contour: &Contour, k: usize) -> Vec<(Vec<f64>, CMat)> {
    contour.patches().into_iter().flat_map(|id| patch_samples(contour, id, k)).collect()
}

fn patch_samples(contour: &Contour, id: PatchId, k: usize) -> Vec<(Vec<f64>, CMat)> {
    let rules: Vec<Rule1D> = contour
        .axes(id)
        .iter()
        .map(|a| {
            let (lo, hi) = match a.kind {
                AxisKind::Truncated { symmetric: true } => (-3.0, 3.0),
                AxisKind::Truncated { symmetric: false } => (a.lo, 3.0),
                _ => (a.lo, a.hi),
            };
            let nodes = axis_samples(a.kind, lo, hi, k);
            Rule1D { weights: vec![1.0; nodes.len()], nodes }
        })
        .collect();
    tensor(&rules)
        .into_iter()
        .map(|(y, _)| {
            let xi = contour.point(id, &y);
            (y, xi)
        })
        .collect()
}

/// Distance of ξ from the set the contour sweeps: characteristic polynomial against λ + ρ_l,
/// failure of ξ ∈ √−1 g_R* when the contour is real, and the wrong sheet of an elliptic orbit.
pub fn orbit_residual(entry: &GroupCatalogEntry, contour: &Contour, xi: &CMat) -> f64 {
    let scale = entry.functional_norm(&contour.reference_functional()).max(1.0);
    let (p, q) = (char_poly(xi), char_poly(&contour.reference_functional()));
    let poly: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).norm()).sum::<f64>() / scale.powi(2);
    let reality = if contour.re_bound <= 1e-6 { entry.functional_norm(&entry.real_part(xi)) / entry.functional_norm(xi).max(scale) } else { 0.0 };
    let sheet = if contour.base_charts.iter().any(|ch| ch.label == "elliptic_sheet") {
        let k = &entry.cartans[entry.fundamental_cartan()].real_basis[0];
        let (a, b) = (trace_form(xi, k), trace_form(&contour.lambda, k));
        if (a * b.conj()).re > 0.0 { 0.0 } else { 1.0 }
    } else {
        0.0
    };
    poly + reality + sheet
}

/// Writes the fine nodes with the integrand F[μ]·weight, one row per node.
pub fn write_nodes_csv<W: Write>(entry: &GroupCatalogEntry, disc: &Discretization, mu: &GaussianDensity, out: W) -> Result<(), csv::Error> {
    let dim = disc.fine.iter().map(|n| n.coords.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..dim).map(|i| format!("y{i}")).collect();
    header.extend((0..entry.dim()).flat_map(|i| [format!("xi{i}_re"), format!("xi{i}_im")]));
    header.extend(["norm", "re_norm", "pf_re", "pf_im", "weight_re", "weight_im", "integrand_re", "integrand_im"].map(String::from));
    w.write_record(&header)?;
    for n in &disc.fine {
        let f = mu.fourier_values(&n.values) * n.weight;
        let mut row: Vec<String> = (0..dim).map(|i| n.coords.get(i).map_or(String::new(), |x| x.to_string())).collect();
        row.extend(n.values.iter().flat_map(|v| [v.re.to_string(), v.im.to_string()]));
        row.extend([n.norm, n.re_norm, n.pfaffian.re, n.pfaffian.im, n.weight.re, n.weight.im, f.re, f.im].map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Point-cloud export for contours integrated by Monte Carlo: a k-per-axis grid with
/// generator-built densities instead of quadrature weights.
pub fn write_samples_csv<W: Write>(
    entry: &GroupCatalogEntry,
    contour: &Contour,
    k: usize,
    mu: &GaussianDensity,
    unit: ImaginaryUnit,
    out: W,
) -> Result<usize, csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..contour.total_dim).map(|i| format!("y{i}")).collect();
    header.extend((0..entry.dim()).flat_map(|i| [format!("xi{i}_re"), format!("xi{i}_im")]));
    header.extend(["norm", "density_re", "density_im", "integrand_re", "integrand_im"].map(String::from));
    w.write_record(&header)?;
    let mut rows = 0;
    for id in contour.patches() {
        for (y, xi) in patch_samples(contour, id, k) {
            let Some(d) = symplectic_volume_density_generators(contour, id, &y, unit) else { continue };
            let v = entry.functional_values(&xi);
            let f = mu.fourier_values(&v) * d;
            let mut row: Vec<String> = y.iter().map(f64::to_string).collect();
            row.extend(v.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]));
            row.extend([entry.functional_norm(&xi), d.re, d.im, f.re, f.im].map(|x| x.to_string()));
            w.write_record(&row)?;
            rows += 1;
        }
    }
    w.flush()?;
    Ok(rows)
}
