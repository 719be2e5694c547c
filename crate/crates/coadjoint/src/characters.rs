//! Characters on g_R: Harish-Chandra tables Σ a_w e^{wη} · j^{1/2}/D per Cartan,
//! coherent families, Gaussian test densities, and the pairing ⟨θ, μ⟩.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{c, expm, sinhc, sinhc_sq, CMat, I};
use crate::realforms::coadjoint_action as coadjoint;
use crate::orbits::{OrbitError, OrbitalParameter};
use crate::polarize::{build_induction_scaffold, InductionScaffold, Polarization, PolarizeError};
use crate::quadrature::{composite, gauss_hermite, monte_carlo, periodic, tensor, Estimate, Rule1D};
use crate::realforms::{conjugacy_invariants, GroupCatalogEntry, GroupLabel, RealFormError, RootKind};
use crate::rootdata::{GaussQ, RootDataError, Weight};

#[derive(Debug, Error)]
pub enum CharacterError {
    #[error(transparent)]
    RootData(#[from] RootDataError),
    #[error(transparent)]
    RealForm(#[from] RealFormError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Polarize(#[from] PolarizeError),
    #[error("highest weight {0} is not dominant integral")]
    NotDominant(String),
    #[error("discrete series needs k ≥ 2, got {0}")]
    InvalidK(i64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("coherence samples do not determine the coefficients")]
    DegenerateSamples,
    #[error("density width must be positive and finite")]
    InvalidDensity,
}

/// Signs of the real and imaginary positive roots; labels a connected component of h_R'.
pub type ComponentKey = Vec<i8>;

#[derive(Clone, Debug, Serialize)]
pub struct Term {
    /// Index into the Weyl group of the root datum.
    pub weyl: usize,
    /// w·η.
    pub exponent: Weight,
    /// a_w on each component; components not listed carry 0.
    pub coefficients: Vec<(ComponentKey, Complex64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CartanTable {
    pub cartan: usize,
    pub label: String,
    pub terms: Vec<Term>,
}

/// θ(H) = j^{1/2}(H) / D(H) · Σ_w a_w(component of H) e^{(wη)(H)} on each listed Cartan; 0 on the others.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantEigendistribution {
    pub group: GroupLabel,
    pub eta: Weight,
    /// Positive roots entering D and j^{1/2}.
    pub positive_roots: Vec<usize>,
    pub tables: Vec<CartanTable>,
    /// For finite-dimensional characters: the highest weight, enabling the smooth Schur evaluation.
    pub highest_weight: Option<Weight>,
}

fn key_of(kinds: &[RootKind], values: &[Complex64]) -> ComponentKey {
    kinds
        .iter()
        .zip(values)
        .filter_map(|(k, v)| match k {
            RootKind::Real => Some(if v.re >= 0.0 { 1 } else { -1 }),
            RootKind::ImaginaryCompact | RootKind::ImaginaryNoncompact => Some(if v.im >= 0.0 { 1 } else { -1 }),
            RootKind::Complex => None,
        })
        .collect()
}

/// All sign vectors over the real and imaginary positive roots of a Cartan.
pub fn component_keys(entry: &GroupCatalogEntry, cartan: usize, positive: &[usize]) -> Vec<ComponentKey> {
    let h = &entry.cartans[cartan];
    let r = positive.iter().filter(|&&a| h.root_classification[a] != RootKind::Complex).count();
    (0..1u32 << r).map(|m| (0..r).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).collect()
}

fn uniform(entry: &GroupCatalogEntry, cartan: usize, positive: &[usize], value: Complex64) -> Vec<(ComponentKey, Complex64)> {
    component_keys(entry, cartan, positive).into_iter().map(|k| (k, value)).collect()
}

/// D(H) = Π_{α ∈ Δ⁺} (e^{α(H)/2} − e^{−α(H)/2}).
pub fn weyl_denominator(entry: &GroupCatalogEntry, cartan: usize, positive: &[usize], h: &CMat) -> Complex64 {
    let datum = &entry.root_datum;
    positive
        .iter()
        .map(|&a| {
            let v = entry.cartans[cartan].root_value(datum, a, h) / 2.0;
            v.exp() - (-v).exp()
        })
        .product()
}

/// Differences of eigenvalues over 2, squared, for each root of each simple block of X.
fn half_root_squares(entry: &GroupCatalogEntry, x: &CMat) -> Vec<Complex64> {
    let block = |i: usize| {
        let m = (x[(i, i)] + x[(i + 1, i + 1)]) / 2.0;
        let b = x[(i, i)] - m;
        b * b + x[(i, i + 1)] * x[(i + 1, i)]
    };
    match entry.label {
        GroupLabel::TorusU1 | GroupLabel::TorusRx => vec![],
        GroupLabel::Sl2CAsReal => vec![block(0), block(2)],
        GroupLabel::Su3 => {
            let mu = eigen_skew_hermitian(x);
            let mut out = Vec::new();
            for i in 0..3 {
                for j in i + 1..3 {
                    let d = Complex64::new(0.0, -(mu[i] - mu[j]) / 2.0);
                    out.push(d * d);
                }
            }
            out
        }
        _ => vec![block(0)],
    }
}

/// Eigenvalues of iX for X skew-Hermitian, so that X has eigenvalues −i·μ.
fn eigen_skew_hermitian(x: &CMat) -> Vec<f64> {
    let herm = x * I;
    let herm = (&herm + herm.adjoint()) * c(0.5, 0.0);
    nalgebra::SymmetricEigen::new(herm).eigenvalues.iter().copied().collect()
}

/// j^{1/2}(X) = Π_{α>0} sinh(α(X)/2)/(α(X)/2), normalized by j^{1/2}(0) = 1.
pub fn j_half(entry: &GroupCatalogEntry, x: &CMat) -> Complex64 {
    half_root_squares(entry, x).into_iter().map(sinhc_sq).product()
}

/// Schur polynomial s_λ(z) via Gelfand–Tsetlin patterns; parts may be negative.
pub fn schur(partition: &[i64], z: &[Complex64]) -> Complex64 {
    let n = partition.len();
    if n == 1 {
        return z[0].powi(partition[0] as i32);
    }
    let total: i64 = partition.iter().sum();
    let mut acc = Complex64::zero();
    let mut nu = vec![0i64; n - 1];
    fn rec(i: usize, lam: &[i64], nu: &mut Vec<i64>, z: &[Complex64], total: i64, acc: &mut Complex64) {
        if i == nu.len() {
            let s: i64 = nu.iter().sum();
            *acc += z[lam.len() - 1].powi((total - s) as i32) * schur(nu, &z[..lam.len() - 1]);
            return;
        }
        for v in lam[i + 1]..=lam[i] {
            nu[i] = v;
            rec(i + 1, lam, nu, z, total, acc);
        }
    }
    rec(0, partition, &mut nu, z, total, &mut acc);
    acc
}

fn integer_pairing(z: GaussQ) -> Option<i64> {
    (z.im.is_zero() && z.re.is_integer()).then(|| z.re.to_integer())
}

impl InvariantEigendistribution {
    /// Evaluates at an element of the given Cartan written in its real-basis coordinates.
    pub fn eval_cartan(&self, entry: &GroupCatalogEntry, cartan: usize, t: &[f64]) -> Complex64 {
        if self.highest_weight.is_some() {
            let h = entry.cartans[cartan].from_real_coords(t);
            return self.eval_smooth(entry, &h);
        }
        self.compile(entry).eval(cartan, t)
    }

    /// Evaluates at a regular element of g_R.
    pub fn evaluate(&self, entry: &GroupCatalogEntry, x: &CMat) -> Result<Complex64, CharacterError> {
        if self.highest_weight.is_some() {
            return Ok(self.eval_smooth(entry, x));
        }
        let cls = conjugacy_invariants(entry, x)?;
        Ok(self.compile(entry).eval(cls.cartan, &cls.coords))
    }

    fn partition(&self, entry: &GroupCatalogEntry) -> Vec<i64> {
        let hw = self.highest_weight.as_ref().expect("finite-dimensional character");
        let datum = &entry.root_datum;
        let p = |i: usize| integer_pairing(datum.pair_root(hw, datum.simple_roots[i])).expect("integral highest weight");
        match entry.label {
            GroupLabel::U2 => hw.coords.iter().map(|q| q.re.to_integer()).collect(),
            GroupLabel::Su2 => vec![p(0), 0],
            GroupLabel::Su3 => vec![p(0) + p(1), p(1), 0],
            _ => unreachable!("smooth evaluation is only set for su2, u2, su3"),
        }
    }

    /// χ(exp X) · j^{1/2}(X) with χ a Schur polynomial.
    fn eval_smooth(&self, entry: &GroupCatalogEntry, x: &CMat) -> Complex64 {
        let mu = eigen_skew_hermitian(x);
        let z: Vec<Complex64> = mu.iter().map(|&m| Complex64::new(0.0, -m).exp()).collect();
        schur(&self.partition(entry), &z) * j_half(entry, x)
    }

    /// Precomputes root and exponent values on each Cartan's real basis.
    pub fn compile(&self, entry: &GroupCatalogEntry) -> CompiledCharacter {
        let datum = &entry.root_datum;
        let tables = (0..entry.cartans.len())
            .map(|k| {
                let table = self.tables.iter().find(|t| t.cartan == k)?;
                let h = &entry.cartans[k];
                let on_basis = |w: &Weight| -> Vec<Complex64> {
                    (0..h.real_basis.len()).map(|b| h.weight_on_real_basis(datum, w, b).to_c64()).collect()
                };
                Some(CompiledTable {
                    roots: self
                        .positive_roots
                        .iter()
                        .map(|&a| (on_basis(&datum.root_weight(a)), h.root_classification[a]))
                        .collect(),
                    terms: table.terms.iter().map(|t| (on_basis(&t.exponent), t.coefficients.clone())).collect(),
                })
            })
            .collect();
        CompiledCharacter { tables }
    }

    /// JSON export of the tables.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("tables serialize")
    }
}

struct CompiledTable {
    roots: Vec<(Vec<Complex64>, RootKind)>,
    terms: Vec<(Vec<Complex64>, Vec<(ComponentKey, Complex64)>)>,
}

/// Table evaluation with exponents and roots pre-evaluated on the real bases.
pub struct CompiledCharacter {
    tables: Vec<Option<CompiledTable>>,
}

fn dot(v: &[Complex64], t: &[f64]) -> Complex64 {
    v.iter().zip(t).map(|(a, &b)| a * b).sum()
}

impl CompiledCharacter {
    pub fn eval(&self, cartan: usize, t: &[f64]) -> Complex64 {
        let Some(table) = &self.tables[cartan] else {
            return Complex64::zero();
        };
        let alphas: Vec<Complex64> = table.roots.iter().map(|(v, _)| dot(v, t)).collect();
        let kinds: Vec<RootKind> = table.roots.iter().map(|r| r.1).collect();
        let key = key_of(&kinds, &alphas);
        let numerator: Complex64 = table
            .terms
            .iter()
            .map(|(e, coeffs)| {
                let a = coeffs.iter().find(|(k, _)| *k == key).map_or(Complex64::zero(), |p| p.1);
                if a.is_zero() {
                    a
                } else {
                    a * dot(e, t).exp()
                }
            })
            .sum();
        // j^{1/2}/D = Π sinhc(α/2) / (2 sinh(α/2))
        let ratio: Complex64 = alphas.iter().map(|&a| sinhc(a / 2.0) / (2.0 * (a / 2.0).sinh())).product();
        numerator * ratio
    }
}

fn is_dominant_integral(entry: &GroupCatalogEntry, hw: &Weight) -> bool {
    let datum = &entry.root_datum;
    let simple_ok = datum
        .simple_roots
        .iter()
        .all(|&s| integer_pairing(datum.pair_root(hw, s)).is_some_and(|n| n >= 0));
    let h = &entry.cartans[entry.fundamental_cartan()];
    simple_ok && h.integral_coweights.iter().all(|v| datum.pairing(hw, v).is_integer())
}

/// Character of the irreducible representation with the given highest weight (su2, u2, su3).
pub fn compact_character(entry: &GroupCatalogEntry, hw: &Weight) -> Result<InvariantEigendistribution, CharacterError> {
    if !matches!(entry.label, GroupLabel::Su2 | GroupLabel::U2 | GroupLabel::Su3) {
        return Err(CharacterError::Unsupported(format!("compact character on {}", entry.label)));
    }
    let datum = &entry.root_datum;
    datum.check_dim(hw)?;
    if !is_dominant_integral(entry, hw) {
        return Err(CharacterError::NotDominant(format!("{:?}", hw.coords.iter().map(|q| q.to_string()).collect::<Vec<_>>())));
    }
    let positive = datum.positive_roots();
    let eta = hw + &datum.half_sum(&positive);
    let terms = datum
        .weyl_group()
        .iter()
        .enumerate()
        .map(|(i, w)| Term {
            weyl: i,
            exponent: w.act(&eta),
            coefficients: uniform(entry, 0, &positive, c(w.sign as f64, 0.0)),
        })
        .collect();
    Ok(InvariantEigendistribution {
        group: entry.label,
        eta,
        positive_roots: positive,
        tables: vec![CartanTable { cartan: 0, label: entry.cartans[0].label.clone(), terms }],
        highest_weight: Some(hw.clone()),
    })
}

/// e^{λ} on one Cartan, with no denominator.
pub fn exponential_character(entry: &GroupCatalogEntry, cartan: usize, lambda: &Weight) -> InvariantEigendistribution {
    InvariantEigendistribution {
        group: entry.label,
        eta: lambda.clone(),
        positive_roots: vec![],
        tables: vec![CartanTable {
            cartan,
            label: entry.cartans[cartan].label.clone(),
            terms: vec![Term { weyl: 0, exponent: lambda.clone(), coefficients: vec![(vec![], Complex64::one())] }],
        }],
        highest_weight: None,
    }
}

/// Discrete series of SL(2,R) with Harish-Chandra parameter ±(k−1) on the compact Cartan.
///
/// D_k^+ has K-types e^{i(k+2j)t} on exp(tJ), j ≥ 0.
pub fn sl2r_discrete_series(entry: &GroupCatalogEntry, k: i64, sign: i8) -> Result<InvariantEigendistribution, CharacterError> {
    if entry.label != GroupLabel::Sl2R {
        return Err(CharacterError::Unsupported(format!("discrete series on {}", entry.label)));
    }
    if k < 2 {
        return Err(CharacterError::InvalidK(k));
    }
    let datum = &entry.root_datum;
    let s = i64::from(sign.signum());
    let eta = datum.weight_with_simple_pairings(&[GaussQ::int(s * (k - 1))])?;
    discrete_series_tables(entry, eta, sign)
}

fn discrete_series_tables(entry: &GroupCatalogEntry, eta: Weight, sign: i8) -> Result<InvariantEigendistribution, CharacterError> {
    let datum = &entry.root_datum;
    let positive = datum.positive_roots();
    let compact = entry.cartan_index("compact").expect("sl2R has a compact Cartan");
    let split = entry.cartan_index("split").expect("sl2R has a split Cartan");
    let refl = 1;
    let one = Complex64::one();
    let compact_terms = vec![
        Term { weyl: 0, exponent: eta.clone(), coefficients: uniform(entry, compact, &positive, c(-(sign as f64), 0.0)) },
        Term { weyl: refl, exponent: -&eta, coefficients: uniform(entry, compact, &positive, Complex64::zero()) },
    ];
    // e^{−(k−1)|t|}/(2|t|): the decaying exponential on each side of the wall
    let (id_coeff, refl_coeff) = if sign > 0 {
        (vec![(vec![-1], -one)], vec![(vec![1], one)])
    } else {
        (vec![(vec![1], one)], vec![(vec![-1], -one)])
    };
    let split_terms = vec![
        Term { weyl: 0, exponent: eta.clone(), coefficients: id_coeff },
        Term { weyl: refl, exponent: -&eta, coefficients: refl_coeff },
    ];
    Ok(InvariantEigendistribution {
        group: entry.label,
        eta,
        positive_roots: positive,
        tables: vec![
            CartanTable { cartan: compact, label: "compact".into(), terms: compact_terms },
            CartanTable { cartan: split, label: "split".into(), terms: split_terms },
        ],
        highest_weight: None,
    })
}

/// Character of the representation induced from the parabolic of the scaffold.
///
/// With n_p empty this is the factor shifted by λn. For SL(2,R) with a real root in n_p it is
/// Σ_w e^{w(μ + λn)} · sign(D) / D · j^{1/2} on the split Cartan and 0 on the compact one.
pub fn induced_character(
    entry: &GroupCatalogEntry,
    cartan: usize,
    scaffold: &InductionScaffold,
    factor: &InvariantEigendistribution,
) -> Result<InvariantEigendistribution, CharacterError> {
    let datum = &entry.root_datum;
    let shift = |w: &Weight| w + &scaffold.lambda_n;
    if scaffold.n_p_roots.is_empty() {
        let mut out = factor.clone();
        for t in out.tables.iter_mut().flat_map(|t| t.terms.iter_mut()) {
            t.exponent = shift(&t.exponent);
        }
        out.eta = shift(&out.eta);
        if out.highest_weight.is_some() && !scaffold.lambda_n.is_zero() {
            out.highest_weight = None;
        }
        return Ok(out);
    }
    let real_rank_one = entry.label == GroupLabel::Sl2R && scaffold.m_roots.is_empty();
    if !real_rank_one {
        return Err(CharacterError::Unsupported(format!("induction on {}", entry.label)));
    }
    let positive = datum.positive_roots();
    let base = factor
        .tables
        .iter()
        .find(|t| t.cartan == cartan)
        .ok_or_else(|| CharacterError::Unsupported("factor has no table on the inducing Cartan".into()))?;
    let mut terms = Vec::new();
    for t in &base.terms {
        let a = t.coefficients.first().map_or(Complex64::zero(), |p| p.1);
        for (wi, w) in datum.weyl_group().iter().enumerate() {
            let coefficients = component_keys(entry, cartan, &positive)
                .into_iter()
                .map(|key| {
                    let s: i8 = key.iter().product();
                    (key, a * s as f64)
                })
                .collect();
            terms.push(Term { weyl: wi, exponent: w.act(&shift(&t.exponent)), coefficients });
        }
    }
    let mut tables = vec![CartanTable { cartan, label: entry.cartans[cartan].label.clone(), terms }];
    for (k, h) in entry.cartans.iter().enumerate() {
        if k != cartan {
            tables.push(CartanTable { cartan: k, label: h.label.clone(), terms: vec![] });
        }
    }
    Ok(InvariantEigendistribution {
        group: entry.label,
        eta: shift(&factor.eta),
        positive_roots: positive,
        tables,
        highest_weight: None,
    })
}

/// Principal series of SL(2,R) with λ(α∨) = iν on the split Cartan.
pub fn sl2r_principal_series(entry: &GroupCatalogEntry, nu: Rational64) -> Result<InvariantEigendistribution, CharacterError> {
    let split = entry.cartan_index("split").ok_or_else(|| CharacterError::Unsupported("no split Cartan".into()))?;
    let lam = entry.root_datum.weight_with_simple_pairings(&[GaussQ::imag(nu)])?;
    let param = OrbitalParameter::new(entry, split, lam)?;
    let pol = crate::polarize::construct_maximally_real(entry, &param)?;
    let sc = build_induction_scaffold(entry, &param, &pol)?;
    let factor = exponential_character(entry, split, &sc.lambda_c);
    induced_character(entry, split, &sc, &factor)
}

/// The character attached to an orbital parameter in the catalog.
pub fn character_for_parameter(
    entry: &GroupCatalogEntry,
    param: &OrbitalParameter,
    pol: &Polarization,
) -> Result<InvariantEigendistribution, CharacterError> {
    let datum = &entry.root_datum;
    match entry.label {
        GroupLabel::TorusU1 | GroupLabel::TorusRx => Ok(exponential_character(entry, param.cartan, &param.lambda)),
        GroupLabel::Su2 | GroupLabel::U2 | GroupLabel::Su3 => {
            let eta = &param.lambda + &pol.rho_l;
            let dominant = datum
                .weyl_group()
                .iter()
                .map(|w| w.act(&eta))
                .find(|v| datum.simple_roots.iter().all(|&s| datum.pair_root(v, s).is_real_positive()))
                .ok_or_else(|| CharacterError::NotDominant("λ + ρ_l is singular".into()))?;
            let hw = &dominant - &datum.half_sum(&datum.positive_roots());
            compact_character(entry, &hw)
        }
        GroupLabel::Sl2R => {
            let h = &entry.cartans[param.cartan];
            let z = datum.pair_root(&param.lambda, 0);
            if h.label == "compact" {
                let n = integer_pairing(z).filter(|n| *n != 0).ok_or_else(|| {
                    CharacterError::Unsupported("discrete series needs a nonzero integral parameter".into())
                })?;
                sl2r_discrete_series(entry, n.abs() + 1, n.signum() as i8)
            } else {
                let sc = build_induction_scaffold(entry, param, pol)?;
                let factor = exponential_character(entry, param.cartan, &sc.lambda_c);
                induced_character(entry, param.cartan, &sc, &factor)
            }
        }
        GroupLabel::Sl2CAsReal => Err(CharacterError::Unsupported("characters of sl2C_as_real".into())),
    }
}

/// A coherent family: the same a_w tables with η left free.
#[derive(Clone, Debug, Serialize)]
pub struct CoherentFamily {
    pub template: InvariantEigendistribution,
}

pub fn coherent_family_from(theta: &InvariantEigendistribution) -> CoherentFamily {
    CoherentFamily { template: theta.clone() }
}

impl CoherentFamily {
    pub fn evaluate(&self, entry: &GroupCatalogEntry, eta: &Weight) -> InvariantEigendistribution {
        let weyl = entry.root_datum.weyl_group();
        let mut out = self.template.clone();
        out.eta = eta.clone();
        for t in out.tables.iter_mut().flat_map(|t| t.terms.iter_mut()) {
            t.exponent = weyl[t.weyl].act(eta);
        }
        // the Schur route needs a dominant integral η − ρ
        if out.highest_weight.is_some() {
            let hw = eta - &entry.root_datum.half_sum(&entry.root_datum.positive_roots());
            out.highest_weight = is_dominant_integral(entry, &hw).then_some(hw);
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceReport {
    /// Coefficients a_w extracted at each sample point, from all η samples.
    pub extracted: Vec<Vec<Complex64>>,
    /// Largest relative residual of the exponential fit.
    pub residual: f64,
    /// Largest disagreement between fits on the two halves of the samples.
    pub spread: f64,
    pub coherent: bool,
}

pub const COHERENCE_TOL: f64 = 1e-8;

fn least_squares(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>, CharacterError> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() < 1e-10 * smax.max(1.0) {
        return Err(CharacterError::DegenerateSamples);
    }
    svd.solve(b, 1e-14).map_err(|_| CharacterError::DegenerateSamples)
}

/// Fits Σ_w a_w e^{(wη)(H)} to the numerators θ_η(H)·D(H)/j^{1/2}(H) over η samples, at each
/// sample point, and asserts that a_w does not depend on which η samples are used.
pub fn check_coherence(
    entry: &GroupCatalogEntry,
    family: &dyn Fn(&Weight) -> InvariantEigendistribution,
    etas: &[Weight],
    points: &[(usize, Vec<f64>)],
) -> Result<CoherenceReport, CharacterError> {
    let weyl = entry.root_datum.weyl_group();
    let nw = weyl.len();
    if etas.len() < 2 * nw {
        return Err(CharacterError::DegenerateSamples);
    }
    let datum = &entry.root_datum;
    let mut extracted = Vec::new();
    let (mut residual, mut spread) = (0.0f64, 0.0f64);
    for (cartan, t) in points {
        let h = &entry.cartans[*cartan];
        let hm = h.from_real_coords(t);
        let members: Vec<InvariantEigendistribution> = etas.iter().map(family).collect();
        let positive = &members[0].positive_roots;
        let d = weyl_denominator(entry, *cartan, positive, &hm);
        let j: Complex64 = positive.iter().map(|&a| sinhc(h.root_value(datum, a, &hm) / 2.0)).product();
        let rows: Vec<(Vec<Complex64>, Complex64)> = etas
            .iter()
            .zip(&members)
            .map(|(eta, m)| {
                let row = weyl.iter().map(|w| h.eval_weight(datum, &w.act(eta), &hm).exp()).collect();
                (row, m.eval_cartan(entry, *cartan, t) * d / j)
            })
            .collect();
        let fit = |rs: &[(Vec<Complex64>, Complex64)]| -> Result<(DVector<Complex64>, f64), CharacterError> {
            let a = DMatrix::from_fn(rs.len(), nw, |i, k| rs[i].0[k]);
            let b = DVector::from_iterator(rs.len(), rs.iter().map(|r| r.1));
            let x = least_squares(&a, &b)?;
            let res = (&a * &x - &b).norm() / b.norm().max(1e-300);
            Ok((x, res))
        };
        let (all, res) = fit(&rows)?;
        let half = rows.len() / 2;
        let (first, _) = fit(&rows[..half])?;
        let (second, _) = fit(&rows[half..])?;
        residual = residual.max(res);
        spread = spread.max((&first - &second).norm() / all.norm().max(1.0));
        extracted.push(all.iter().copied().collect());
    }
    Ok(CoherenceReport { extracted, residual, spread, coherent: residual <= COHERENCE_TOL && spread <= COHERENCE_TOL })
}

/// The negative control: a_w scaled by |⟨η, α∨⟩| for the first simple root.
pub fn corrupted(entry: &GroupCatalogEntry, theta: &InvariantEigendistribution) -> InvariantEigendistribution {
    let datum = &entry.root_datum;
    let scale = if datum.rank == 0 {
        theta.eta.coords.iter().map(|q| q.to_c64().norm()).sum::<f64>()
    } else {
        datum.pair_root(&theta.eta, datum.simple_roots[0]).to_c64().norm()
    };
    let mut out = theta.clone();
    out.highest_weight = None;
    for t in out.tables.iter_mut().flat_map(|t| t.terms.iter_mut()) {
        for (_, a) in t.coefficients.iter_mut() {
            *a *= scale;
        }
    }
    out
}

/// Normal density N(center, width²·1) in the orthonormal coordinates of g_R.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianDensity {
    pub center: Vec<f64>,
    pub width: f64,
}

impl GaussianDensity {
    pub fn new(center: Vec<f64>, width: f64) -> Result<Self, CharacterError> {
        if !(width.is_finite() && width > 0.0) || center.iter().any(|x| !x.is_finite()) {
            return Err(CharacterError::InvalidDensity);
        }
        Ok(Self { center, width })
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let d = self.center.len() as f64;
        let s2 = self.width * self.width;
        let r2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        (-r2 / (2.0 * s2)).exp() / (std::f64::consts::TAU * s2).powf(d / 2.0)
    }

    /// F[μ](ξ) = exp(ξ(X₀) + s²/2 · Σ ξ(e_i)²), from the values ξ(e_i).
    pub fn fourier_values(&self, v: &[Complex64]) -> Complex64 {
        let lin: Complex64 = v.iter().zip(&self.center).map(|(a, &x)| a * x).sum();
        let quad: Complex64 = v.iter().map(|a| a * a).sum();
        (lin + quad * (self.width * self.width / 2.0)).exp()
    }

    pub fn fourier(&self, entry: &GroupCatalogEntry, xi: &CMat) -> Complex64 {
        self.fourier_values(&entry.functional_values(xi))
    }

    /// Reproducible random suite: centers uniform in the cube [−r, r]^d scaled by 1/√d, widths uniform.
    pub fn suite(dim: usize, count: usize, seed: u64, center_radius: f64, widths: (f64, f64)) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = center_radius / (dim as f64).sqrt();
        (0..count)
            .map(|_| {
                let center = (0..dim).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
                let width = rng.random_range(widths.0..=widths.1);
                Self { center, width }
            })
            .collect()
    }

    fn reach(&self) -> f64 {
        self.center.iter().map(|x| x * x).sum::<f64>().sqrt() + TAIL_SIGMAS * self.width
    }
}

/// Gaussian mass beyond this many widths is below double precision relative to the total.
const TAIL_SIGMAS: f64 = 9.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum PairingRoute {
    /// Tensor Gauss–Hermite in the density's own coordinates; needs θ smooth.
    Direct,
    /// Cartan × orbit charts with numerical Jacobian.
    Polar,
    /// Sampling X ~ μ; for smooth θ in high dimension.
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairingSpec {
    /// Base Gauss order per dimension; the reported value uses the once-refined grid.
    pub order: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Error estimates above this (relative to the value) are flagged unconverged.
    pub tolerance: f64,
    pub route: Option<PairingRoute>,
}

impl Default for PairingSpec {
    fn default() -> Self {
        Self { order: 16, mc_samples: 1_000_000, seed: 0, tolerance: 1e-6, route: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingStatus {
    Converged,
    Unconverged,
}

#[derive(Clone, Debug, Serialize)]
pub struct Pairing {
    pub estimate: Estimate,
    pub route: PairingRoute,
    pub status: PairingStatus,
}

pub fn default_route(label: GroupLabel) -> Result<PairingRoute, CharacterError> {
    match label {
        GroupLabel::TorusU1 | GroupLabel::TorusRx | GroupLabel::Su2 | GroupLabel::U2 => Ok(PairingRoute::Direct),
        GroupLabel::Su3 => Ok(PairingRoute::MonteCarlo),
        GroupLabel::Sl2R => Ok(PairingRoute::Polar),
        GroupLabel::Sl2CAsReal => Err(CharacterError::Unsupported("pairing on sl2C_as_real".into())),
    }
}

/// ⟨θ, μ⟩ = ∫_{g_R} θ(X) μ(X) dX.
pub fn pair_with_density(
    entry: &GroupCatalogEntry,
    theta: &InvariantEigendistribution,
    mu: &GaussianDensity,
    spec: &PairingSpec,
) -> Result<Pairing, CharacterError> {
    Ok(pair_suite(entry, theta, std::slice::from_ref(mu), spec)?.remove(0))
}

/// ⟨θ, μ⟩ for a list of densities, sharing the polar grid.
pub fn pair_suite(
    entry: &GroupCatalogEntry,
    theta: &InvariantEigendistribution,
    mus: &[GaussianDensity],
    spec: &PairingSpec,
) -> Result<Vec<Pairing>, CharacterError> {
    let route = match spec.route {
        Some(r) => r,
        None => default_route(entry.label)?,
    };
    let finish = |estimate: Estimate| Pairing {
        estimate,
        route,
        status: if estimate.error <= spec.tolerance * estimate.value.norm().max(1e-300) {
            PairingStatus::Converged
        } else {
            PairingStatus::Unconverged
        },
    };
    match route {
        PairingRoute::Direct => mus.iter().map(|mu| direct(entry, theta, mu, spec.order).map(finish)).collect(),
        PairingRoute::MonteCarlo => mus
            .iter()
            .map(|mu| {
                let e = entry.dim();
                Ok(finish(monte_carlo(spec.seed, spec.mc_samples, |rng| {
                    let x: Vec<f64> = (0..e).map(|i| mu.center[i] + mu.width * rng.sample::<f64, _>(StandardNormal)).collect();
                    theta.evaluate(entry, &entry.from_coords(&x)).unwrap_or(Complex64::zero())
                })))
            })
            .collect(),
        PairingRoute::Polar => {
            let reach = mus.iter().map(GaussianDensity::reach).fold(0.0, f64::max);
            let width = mus.iter().map(|m| m.width).fold(f64::INFINITY, f64::min);
            let grid = PolarGrid::build(entry, reach, width, spec.order)?;
            Ok(mus.iter().map(|mu| finish(grid.pair(entry, theta, mu))).collect())
        }
    }
}

fn direct(entry: &GroupCatalogEntry, theta: &InvariantEigendistribution, mu: &GaussianDensity, order: usize) -> Result<Estimate, CharacterError> {
    let d = entry.dim();
    if theta.highest_weight.is_none() && entry.root_datum.rank > 0 {
        return Err(CharacterError::Unsupported("direct quadrature needs a smooth character".into()));
    }
    let run = |n: usize| -> Result<Complex64, CharacterError> {
        let rule = gauss_hermite(n);
        let grid = tensor(&vec![rule; d]);
        let scale = std::f64::consts::SQRT_2 * mu.width;
        let norm = std::f64::consts::PI.powf(-(d as f64) / 2.0);
        let mut acc = Complex64::zero();
        for (y, w) in &grid {
            let x: Vec<f64> = y.iter().zip(&mu.center).map(|(yi, ci)| ci + scale * yi).collect();
            acc += theta.evaluate(entry, &entry.from_coords(&x))? * (w * norm);
        }
        Ok(acc)
    };
    Ok(Estimate::from_pair(run(2 * order)?, run(order)?))
}

/// The K-orbit of one (Cartan, orbit) node: a base point in orthonormal coordinates whose
/// rotations by the chart's rotation table are the actual quadrature nodes.
#[derive(Clone, Debug)]
struct PolarRing {
    x: Vec<f64>,
    weight: f64,
    cartan: usize,
    t: Vec<f64>,
    table: usize,
}

/// Rotations Ad(exp(φK)) as real matrices on orthonormal coordinates, with trapezoid weights.
#[derive(Clone, Debug)]
struct RotationTable {
    mats: Vec<DMatrix<f64>>,
    weights: Vec<f64>,
}

impl RotationTable {
    fn new(entry: &GroupCatalogEntry, generator: &CMat, rule: &Rule1D) -> Self {
        let d = entry.dim();
        let mats = rule
            .nodes
            .iter()
            .map(|&phi| {
                let k = expm(&(generator * c(phi, 0.0)));
                let mut m = DMatrix::zeros(d, d);
                for (j, e) in entry.orthonormal_basis.iter().enumerate() {
                    let col = entry.real_coords(&coadjoint(&k, e));
                    for (i, v) in col.into_iter().enumerate() {
                        m[(i, j)] = v;
                    }
                }
                m
            })
            .collect();
        Self { mats, weights: rule.weights.clone() }
    }
}

/// One resolution level of a polar grid.
#[derive(Clone, Debug, Default)]
struct PolarLevel {
    rings: Vec<PolarRing>,
    tables: Vec<RotationTable>,
}

impl PolarLevel {
    /// Σ_rings w·f(ring)·Σ_φ w_φ μ(R_φ x), with the Gaussian expanded so each φ costs one dot product.
    fn sum(&self, mu: &GaussianDensity, f: impl Fn(&PolarRing) -> Complex64) -> Complex64 {
        let d = mu.center.len();
        let s2 = mu.width * mu.width;
        let norm = (std::f64::consts::TAU * s2).powf(-(d as f64) / 2.0);
        let c = DVector::from_column_slice(&mu.center);
        let rotated: Vec<Vec<DVector<f64>>> =
            self.tables.iter().map(|t| t.mats.iter().map(|m| m.transpose() * &c).collect()).collect();
        let c2 = c.norm_squared();
        let mut acc = Complex64::zero();
        for ring in &self.rings {
            let x = DVector::from_column_slice(&ring.x);
            let x2 = x.norm_squared();
            let table = &self.tables[ring.table];
            let inner: f64 = rotated[ring.table]
                .iter()
                .zip(&table.weights)
                .map(|(cr, w)| w * (-(x2 + c2 - 2.0 * x.dot(cr)) / (2.0 * s2)).exp())
                .sum();
            acc += f(ring) * (ring.weight * inner * norm);
        }
        acc
    }
}

/// Charts (Cartan coordinates t, orbit coordinates y) ↦ Ad(g(y)) H(t) covering the regular set of g_R
/// once, with the Jacobian computed by finite differences.
pub struct PolarGrid {
    fine: PolarLevel,
    coarse: PolarLevel,
}

/// A polar chart. `natural` maps quadrature coordinates q to (Cartan coordinates, orbit
/// coordinates, |∂natural/∂q|); the last orbit coordinate is a K-rotation angle, under which
/// the Jacobian is invariant since Ad(K) preserves the inner product.
struct PolarChart {
    cartan: usize,
    rules: fn(f64, f64, usize) -> Vec<Rule1D>,
    natural: fn(&[f64]) -> (Vec<f64>, Vec<f64>, f64),
    group_element: fn(&[f64]) -> CMat,
    rotation: CMat,
}

const FD_STEP: f64 = 1e-3;

impl PolarChart {
    fn point(&self, entry: &GroupCatalogEntry, t: &[f64], y: &[f64]) -> CMat {
        let h = entry.cartans[self.cartan].from_real_coords(t);
        coadjoint(&(self.group_element)(y), &h)
    }

    /// |det| of the differential in natural coordinates, by fourth-order central differences.
    fn jacobian(&self, entry: &GroupCatalogEntry, t: &[f64], y: &[f64]) -> f64 {
        let nt = t.len();
        let mut z: Vec<f64> = t.iter().chain(y).copied().collect();
        let d = z.len();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            let base = z[i];
            let mut eval = |dz: f64| {
                z[i] = base + dz;
                let p = self.point(entry, &z[..nt], &z[nt..]);
                entry.real_coords(&p)
            };
            let (p2, p1, m1, m2) = (eval(2.0 * FD_STEP), eval(FD_STEP), eval(-FD_STEP), eval(-2.0 * FD_STEP));
            z[i] = base;
            for r in 0..d {
                m[(r, i)] = (-p2[r] + 8.0 * p1[r] - 8.0 * m1[r] + m2[r]) / (12.0 * FD_STEP);
            }
        }
        m.determinant().abs()
    }
}

fn sl2r_group_element(y: &[f64], second: &CMat) -> CMat {
    let jm = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.0)]);
    expm(&(jm * c(y[1], 0.0))) * expm(&(second * c(y[0] / 2.0, 0.0)))
}

fn polar_charts(entry: &GroupCatalogEntry) -> Result<Vec<PolarChart>, CharacterError> {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};
    let r = |re: f64| c(re, 0.0);
    let hm = CMat::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), r(-1.0)]);
    let half_rot = CMat::from_row_slice(2, 2, &[r(0.0), r(0.5), r(-0.5), r(0.0)]);
    let compact_rot = &hm * c(0.0, 0.5);
    // radial/angular/rotation rules from (radius, min width, order)
    fn radial(reach: f64, width: f64, order: usize) -> Rule1D {
        let panels = (reach / (1.5 * width)).ceil().max(1.0) as usize;
        composite((order * 3 / 4).max(4), panels, 0.0, reach)
    }
    fn rotation(reach: f64, width: f64, order: usize) -> Rule1D {
        periodic((3 * order).max((TAU * reach / width).ceil() as usize), 0.0, TAU)
    }
    match entry.label {
        GroupLabel::Su2 => Ok(vec![PolarChart {
            cartan: 0,
            rules: |reach, width, order| {
                vec![radial(reach / std::f64::consts::SQRT_2, width, order), composite(order, 2, 0.0, PI), rotation(reach, width, order)]
            },
            natural: |q| (vec![q[0]], vec![q[1], q[2]], 1.0),
            group_element: |y| {
                let r = |re: f64| c(re, 0.0);
                let z = CMat::from_row_slice(2, 2, &[c(0.0, 0.5), r(0.0), r(0.0), c(0.0, -0.5)]);
                let jm = CMat::from_row_slice(2, 2, &[r(0.0), r(0.5), r(-0.5), r(0.0)]);
                expm(&(z * r(y[1]))) * expm(&(jm * r(y[0])))
            },
            rotation: compact_rot,
        }]),
        GroupLabel::U2 => Ok(vec![PolarChart {
            cartan: 0,
            rules: |reach, width, order| {
                let m = reach / std::f64::consts::SQRT_2;
                let panels = (2.0 * m / (1.5 * width)).ceil().max(1.0) as usize;
                vec![
                    composite((order * 3 / 4).max(4), panels, -m, m),
                    radial(m, width, order),
                    composite(order, 2, 0.0, PI),
                    rotation(reach, width, order),
                ]
            },
            natural: |q| (vec![q[0] + q[1], q[0] - q[1]], vec![q[2], q[3]], 2.0),
            group_element: |y| {
                let r = |re: f64| c(re, 0.0);
                let z = CMat::from_row_slice(2, 2, &[c(0.0, 0.5), r(0.0), r(0.0), c(0.0, -0.5)]);
                let jm = CMat::from_row_slice(2, 2, &[r(0.0), r(0.5), r(-0.5), r(0.0)]);
                expm(&(z * r(y[1]))) * expm(&(jm * r(y[0])))
            },
            rotation: compact_rot,
        }]),
        GroupLabel::Sl2R => {
            let compact = entry.cartan_index("compact").expect("compact Cartan");
            let split = entry.cartan_index("split").expect("split Cartan");
            // (s, ψ, φ) ↦ t = ±s cos ψ, u = asinh(tan ψ); the map (s, ψ) ↦ (t, u) has unit Jacobian
            let elliptic_rules: fn(f64, f64, usize) -> Vec<Rule1D> = |reach, width, order| {
                vec![radial(reach / std::f64::consts::SQRT_2, width, order), composite(order, 2, 0.0, FRAC_PI_2), rotation(reach, width, order)]
            };
            let elliptic_g: fn(&[f64]) -> CMat = |y| {
                let hm = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
                sl2r_group_element(y, &hm)
            };
            Ok(vec![
                PolarChart {
                    cartan: compact,
                    rules: elliptic_rules,
                    natural: |q| (vec![q[0] * q[1].cos()], vec![q[1].tan().asinh(), q[2]], 1.0),
                    group_element: elliptic_g,
                    rotation: half_rot.clone(),
                },
                PolarChart {
                    cartan: compact,
                    rules: elliptic_rules,
                    natural: |q| (vec![-q[0] * q[1].cos()], vec![q[1].tan().asinh(), q[2]], 1.0),
                    group_element: elliptic_g,
                    rotation: half_rot.clone(),
                },
                PolarChart {
                    cartan: split,
                    rules: |reach, width, order| {
                        vec![
                            radial(reach / std::f64::consts::SQRT_2, width, order),
                            composite(order, 4, -FRAC_PI_2, FRAC_PI_2),
                            rotation(reach, width, order),
                        ]
                    },
                    natural: |q| (vec![q[0] * q[1].cos()], vec![q[1].tan().asinh(), q[2]], 1.0),
                    group_element: |y| {
                        let sm = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
                        sl2r_group_element(y, &sm)
                    },
                    rotation: half_rot,
                },
            ])
        }
        other => Err(CharacterError::Unsupported(format!("polar charts on {other}"))),
    }
}

impl PolarGrid {
    /// Grids reaching radius `reach` at resolution tied to the narrowest density width.
    pub fn build(entry: &GroupCatalogEntry, reach: f64, width: f64, order: usize) -> Result<Self, CharacterError> {
        let charts = polar_charts(entry)?;
        let level = |order: usize| {
            let mut out = PolarLevel::default();
            for ch in &charts {
                let rules = (ch.rules)(reach, width, order);
                let (outer, rot) = rules.split_at(rules.len() - 1);
                out.tables.push(RotationTable::new(entry, &ch.rotation, &rot[0]));
                let table = out.tables.len() - 1;
                for (q, w) in tensor(outer) {
                    let mut qq = q.clone();
                    qq.push(0.0);
                    let (t, y, factor) = (ch.natural)(&qq);
                    // the Jacobian does not depend on the rotation angle
                    let jac = ch.jacobian(entry, &t, &y) * factor;
                    let x = entry.real_coords(&ch.point(entry, &t, &y));
                    out.rings.push(PolarRing { x, weight: w * jac, cartan: ch.cartan, t, table });
                }
            }
            out
        };
        Ok(Self { fine: level(2 * order), coarse: level(order) })
    }

    /// Number of quadrature nodes on the fine level.
    pub fn len(&self) -> usize {
        self.fine.rings.iter().map(|r| self.fine.tables[r.table].weights.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.fine.rings.is_empty()
    }

    pub fn pair(&self, entry: &GroupCatalogEntry, theta: &InvariantEigendistribution, mu: &GaussianDensity) -> Estimate {
        let compiled = theta.compile(entry);
        let value = |ring: &PolarRing| {
            if theta.highest_weight.is_some() {
                theta.eval_cartan(entry, ring.cartan, &ring.t)
            } else {
                compiled.eval(ring.cartan, &ring.t)
            }
        };
        Estimate::from_pair(self.fine.sum(mu, value), self.coarse.sum(mu, value))
    }

    /// ∫ μ over the grid; 1 up to quadrature error when the charts cover g_R once.
    pub fn total_mass(&self, mu: &GaussianDensity) -> f64 {
        self.fine.sum(mu, |_| Complex64::one()).re
    }
}
