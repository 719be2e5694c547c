//! Catalog of real reductive groups as explicit matrix models.
//!
//! Every entry carries an antiholomorphic involution `sigma` defining g_R, a
//! commuting compact involution `sigma_c`, and θ = σσc. The dual g* is
//! identified with g through B(X, Y) = tr(XY), so coadjoint points are matrices
//! and Ad* is conjugation. Imaginary functionals (√−1 g_R*) are the matrices M
//! with σ(M) = −M.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{block_diag, bracket, c, char_poly, conj, expm, inverse, mat, norm, to_rational, trace_form, unit, CMat, I};
use crate::rootdata::{solve_rational, GaussQ, Normalization, RatVec, RootDataError, RootDatum, RootType, Weight};

/// Relative discriminant threshold below which an element counts as non-regular.
pub const NON_REGULAR_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RealFormError {
    #[error("unsupported group label `{0}`")]
    UnsupportedLabel(String),
    #[error("non-regular element: |discriminant| = {disc:.3e} is below {threshold:.3e}")]
    NonRegular { disc: f64, threshold: f64 },
    #[error("{group}: {what}")]
    Invariant { group: String, what: String },
    #[error(transparent)]
    RootData(#[from] RootDataError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, schemars::JsonSchema)]
pub enum GroupLabel {
    #[serde(rename = "torus_U1")]
    TorusU1,
    #[serde(rename = "torus_Rx")]
    TorusRx,
    #[serde(rename = "su2")]
    Su2,
    #[serde(rename = "sl2R")]
    Sl2R,
    #[serde(rename = "u2")]
    U2,
    #[serde(rename = "su3")]
    Su3,
    #[serde(rename = "sl2C_as_real")]
    Sl2CAsReal,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 7] = [
        Self::TorusU1,
        Self::TorusRx,
        Self::Su2,
        Self::Sl2R,
        Self::U2,
        Self::Su3,
        Self::Sl2CAsReal,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::TorusU1 => "torus_U1",
            Self::TorusRx => "torus_Rx",
            Self::Su2 => "su2",
            Self::Sl2R => "sl2R",
            Self::U2 => "u2",
            Self::Su3 => "su3",
            Self::Sl2CAsReal => "sl2C_as_real",
        }
    }

    /// G_R compact, so that G_R = U.
    pub fn is_compact(&self) -> bool {
        matches!(self, Self::TorusU1 | Self::Su2 | Self::U2 | Self::Su3)
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupLabel {
    type Err = RealFormError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| RealFormError::UnsupportedLabel(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvolutionOp {
    Conj,
    ConjTranspose,
}

/// Antiholomorphic involution X ↦ sign · P · op(X) · P⁻¹.
#[derive(Clone, Debug)]
pub struct Involution {
    pub sign: f64,
    pub p: CMat,
    pub p_inv: CMat,
    pub op: InvolutionOp,
}

impl Involution {
    pub fn new(sign: f64, p: CMat, op: InvolutionOp) -> Self {
        let p_inv = inverse(&p).expect("involution matrix must be invertible");
        Self { sign, p, p_inv, op }
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        let ox = match self.op {
            InvolutionOp::Conj => conj(x),
            InvolutionOp::ConjTranspose => x.adjoint(),
        };
        (&self.p * ox * &self.p_inv) * c(self.sign, 0.0)
    }

    /// The involution Ad(g) ∘ self ∘ Ad(g)⁻¹.
    pub fn conjugated_by(&self, g: &CMat) -> Involution {
        let p = match self.op {
            InvolutionOp::Conj => g * &self.p * inverse(&conj(g)).expect("invertible"),
            InvolutionOp::ConjTranspose => g * &self.p * g.adjoint(),
        };
        Involution::new(self.sign, p, self.op)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    Real,
    ImaginaryCompact,
    ImaginaryNoncompact,
    Complex,
}

impl RootKind {
    pub fn is_imaginary(&self) -> bool {
        matches!(self, Self::ImaginaryCompact | Self::ImaginaryNoncompact)
    }
}

/// A θ-stable Cartan subalgebra h_R ⊂ g_R realized as a conjugate of the diagonal Cartan.
#[derive(Clone, Debug)]
pub struct CartanData {
    pub label: String,
    pub cayley: CMat,
    /// Matrices of the basis of h_C in which coroot coordinates are written.
    pub coweights: Vec<CMat>,
    /// Root vectors E_α, indexed like the root datum.
    pub root_vectors: Vec<CMat>,
    /// Basis of h_R.
    pub real_basis: Vec<CMat>,
    /// Indices into `real_basis` spanning h^θ and h^{−θ}.
    pub theta_plus: Vec<usize>,
    pub theta_minus: Vec<usize>,
    pub root_classification: Vec<RootKind>,
    /// θα and σα as root indices.
    pub theta_perm: Vec<usize>,
    pub sigma_perm: Vec<usize>,
    /// Matrices of θ and σ on h in coweight coordinates (column j is the image of coweight j).
    pub theta_on_h: Vec<RatVec>,
    pub sigma_on_h: Vec<RatVec>,
    /// Vectors in coweight coordinates on which λ must be integral for e^λ to exist on H.
    pub integral_coweights: Vec<RatVec>,
    pub is_fundamental: bool,
    /// Exact coordinates of `real_basis` in the coweight basis.
    pub real_basis_h: Vec<Vec<GaussQ>>,
    gram: DMatrix<Complex64>,
}

impl CartanData {
    fn h_coords(&self, y: &CMat) -> Vec<Complex64> {
        let rhs = DVector::from_iterator(self.coweights.len(), self.coweights.iter().map(|k| trace_form(y, k)));
        let sol = self.gram.clone().lu().solve(&rhs).expect("coweight Gram matrix is invertible");
        sol.iter().copied().collect()
    }

    /// The coadjoint point in h_C (under the trace form) representing the weight.
    pub fn weight_matrix(&self, datum: &RootDatum, w: &Weight) -> CMat {
        let p: Vec<Complex64> = (0..self.coweights.len())
            .map(|j| {
                let mut e = vec![Rational64::zero(); datum.dim];
                e[j] = Rational64::from_integer(1);
                datum.pairing(w, &e).to_c64()
            })
            .collect();
        let sol = self
            .gram
            .transpose()
            .lu()
            .solve(&DVector::from_vec(p))
            .expect("coweight Gram matrix is invertible");
        let n = self.coweights[0].nrows();
        self.coweights.iter().zip(sol.iter()).fold(CMat::zeros(n, n), |acc, (k, &a)| acc + k * a)
    }

    /// Value of the weight on an element of h_C.
    pub fn eval_weight(&self, datum: &RootDatum, w: &Weight, h: &CMat) -> Complex64 {
        trace_form(&self.weight_matrix(datum, w), h)
    }

    /// α(H) for root index `a`.
    pub fn root_value(&self, datum: &RootDatum, a: usize, h: &CMat) -> Complex64 {
        self.eval_weight(datum, &datum.root_weight(a), h)
    }

    /// λ(H_k) for the k-th element of `real_basis`, exactly.
    pub fn weight_on_real_basis(&self, datum: &RootDatum, w: &Weight, k: usize) -> GaussQ {
        let dim = datum.dim;
        (0..dim).fold(GaussQ::zero(), |acc, j| {
            let mut e = vec![Rational64::zero(); dim];
            e[j] = Rational64::from_integer(1);
            acc + datum.pairing(w, &e) * self.real_basis_h[k][j]
        })
    }

    /// Element of h_R with the given real coordinates.
    pub fn from_real_coords(&self, t: &[f64]) -> CMat {
        let n = self.real_basis[0].nrows();
        self.real_basis.iter().zip(t).fold(CMat::zeros(n, n), |acc, (b, &x)| acc + b * c(x, 0.0))
    }

    fn act_on_weight(datum: &RootDatum, m: &[RatVec], w: &Weight, antilinear: bool) -> Weight {
        let dim = datum.dim;
        let unit_vec = |j: usize| {
            let mut e = vec![Rational64::zero(); dim];
            e[j] = Rational64::from_integer(1);
            e
        };
        // values of the image on the coweight basis
        let values: Vec<GaussQ> = (0..dim)
            .map(|j| {
                let v = (0..dim).fold(GaussQ::zero(), |acc, k| acc + datum.pairing(w, &unit_vec(k)).scale(m[k][j]));
                if antilinear {
                    v.conj()
                } else {
                    v
                }
            })
            .collect();
        // solve Σ_i λ'_i M_ij = values_j
        let mt: Vec<RatVec> = (0..dim).map(|j| (0..dim).map(|i| datum.pairing_matrix[i][j]).collect()).collect();
        let re = solve_rational(&mt, &values.iter().map(|v| v.re).collect::<Vec<_>>()).expect("pairing matrix is invertible");
        let im = solve_rational(&mt, &values.iter().map(|v| v.im).collect::<Vec<_>>()).expect("pairing matrix is invertible");
        Weight::new(re.into_iter().zip(im).map(|(r, i)| GaussQ::new(r, i)).collect())
    }

    /// θλ, exactly.
    pub fn theta_weight(&self, datum: &RootDatum, w: &Weight) -> Weight {
        Self::act_on_weight(datum, &self.theta_on_h, w, false)
    }

    /// σλ, defined by (σλ)(H) = conj(λ(σH)), exactly.
    pub fn sigma_weight(&self, datum: &RootDatum, w: &Weight) -> Weight {
        Self::act_on_weight(datum, &self.sigma_on_h, w, true)
    }
}

struct CartanSpec<'a> {
    label: &'a str,
    cayley: CMat,
    real_basis: Vec<CMat>,
    integral_coweights: Vec<RatVec>,
    is_fundamental: bool,
}

#[derive(Clone, Debug)]
pub struct GroupCatalogEntry {
    pub label: GroupLabel,
    pub matrix_dim: usize,
    pub root_datum: RootDatum,
    pub sigma: Involution,
    pub sigma_c: Involution,
    pub cartans: Vec<CartanData>,
    pub real_basis: Vec<CMat>,
    /// Gram matrix of −B(X, θX) on `real_basis`.
    pub inner_product: DMatrix<f64>,
    /// Basis of g_R orthonormal for the inner product.
    pub orthonormal_basis: Vec<CMat>,
}

fn invariant(group: GroupLabel, what: impl Into<String>) -> RealFormError {
    RealFormError::Invariant { group: group.to_string(), what: what.into() }
}

fn root_space_of(roots: &[CMat], y: &CMat) -> Option<(usize, Complex64)> {
    let scale = norm(y).max(1e-300);
    for (j, e) in roots.iter().enumerate() {
        let nsq = e.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let coef = e.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() / nsq;
        if norm(&(y - e * coef)) < 1e-10 * scale && coef.norm() > 1e-12 {
            return Some((j, coef));
        }
    }
    None
}

impl GroupCatalogEntry {
    pub fn theta(&self, x: &CMat) -> CMat {
        self.sigma.apply(&self.sigma_c.apply(x))
    }

    pub fn dim(&self) -> usize {
        self.real_basis.len()
    }

    /// −B(X, θY), extended bilinearly.
    pub fn inner(&self, x: &CMat, y: &CMat) -> Complex64 {
        -trace_form(x, &self.theta(y))
    }

    /// Coordinates of X ∈ g_C in the orthonormal basis of g_R.
    pub fn coords(&self, x: &CMat) -> Vec<Complex64> {
        self.orthonormal_basis.iter().map(|e| self.inner(x, e)).collect()
    }

    /// Real coordinates of X ∈ g_R in the orthonormal basis.
    pub fn real_coords(&self, x: &CMat) -> Vec<f64> {
        self.coords(x).into_iter().map(|z| z.re).collect()
    }

    pub fn from_coords(&self, x: &[f64]) -> CMat {
        let n = self.matrix_dim;
        self.orthonormal_basis.iter().zip(x).fold(CMat::zeros(n, n), |acc, (e, &t)| acc + e * c(t, 0.0))
    }

    pub fn from_complex_coords(&self, x: &[Complex64]) -> CMat {
        let n = self.matrix_dim;
        self.orthonormal_basis.iter().zip(x).fold(CMat::zeros(n, n), |acc, (e, &t)| acc + e * t)
    }

    /// Values ξ(e_i) = tr(ξ e_i) on the orthonormal basis.
    pub fn functional_values(&self, xi: &CMat) -> Vec<Complex64> {
        self.orthonormal_basis.iter().map(|e| trace_form(xi, e)).collect()
    }

    /// q_B(ξ) = Σ ξ(e_i)².
    pub fn q_b(&self, xi: &CMat) -> Complex64 {
        self.functional_values(xi).into_iter().map(|v| v * v).sum()
    }

    /// Component of ξ in g_R* (real-valued on g_R).
    pub fn real_part(&self, xi: &CMat) -> CMat {
        (xi + self.sigma.apply(xi)) * c(0.5, 0.0)
    }

    /// Component of ξ in √−1 g_R*.
    pub fn imag_part(&self, xi: &CMat) -> CMat {
        (xi - self.sigma.apply(xi)) * c(0.5, 0.0)
    }

    /// Euclidean norm of the functional on the orthonormal basis.
    pub fn functional_norm(&self, xi: &CMat) -> f64 {
        self.functional_values(xi).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn exp_real(&self, x: &[f64]) -> CMat {
        expm(&self.from_coords(x))
    }

    pub fn fundamental_cartan(&self) -> usize {
        self.cartans.iter().position(|h| h.is_fundamental).expect("exactly one fundamental Cartan")
    }

    pub fn cartan_index(&self, label: &str) -> Option<usize> {
        self.cartans.iter().position(|h| h.label == label)
    }

    /// Checks the structural invariants of the entry.
    pub fn verify(&self) -> Result<(), RealFormError> {
        let g = self.label;
        let tol = 1e-13;
        for x in &self.real_basis {
            let s1 = self.sigma.apply(&self.sigma_c.apply(x));
            let s2 = self.sigma_c.apply(&self.sigma.apply(x));
            if norm(&(s1 - s2)) > tol {
                return Err(invariant(g, "sigma and sigma_c do not commute"));
            }
            if norm(&(self.theta(&self.theta(x)) - x)) > tol {
                return Err(invariant(g, "theta is not an involution"));
            }
            if norm(&(self.sigma.apply(x) - x)) > tol {
                return Err(invariant(g, "real basis element is not sigma-fixed"));
            }
        }
        let ip = &self.inner_product;
        if (ip - ip.transpose()).abs().max() > tol || ip.clone().cholesky().is_none() {
            return Err(invariant(g, "inner product is not symmetric positive definite"));
        }
        let n = self.real_basis.len();
        let bgram = DMatrix::from_fn(n, n, |i, j| trace_form(&self.real_basis[i], &self.real_basis[j]).re);
        if bgram.determinant().abs() < 1e-12 {
            return Err(invariant(g, "trace form is degenerate on g_R"));
        }
        if self.cartans.iter().filter(|h| h.is_fundamental).count() != 1 {
            return Err(invariant(g, "expected exactly one fundamental Cartan"));
        }
        for h in &self.cartans {
            for (k, b) in h.real_basis.iter().enumerate() {
                let tb = self.theta(b);
                let expect = if h.theta_plus.contains(&k) { b.clone() } else { -b.clone() };
                if norm(&(tb - expect)) > tol {
                    return Err(invariant(g, format!("theta does not preserve Cartan {}", h.label)));
                }
            }
            for (a, kind) in h.root_classification.iter().enumerate() {
                let ta = h.theta_perm[a];
                let ok = match kind {
                    RootKind::Real => ta == self.root_datum.neg_index(a),
                    RootKind::ImaginaryCompact | RootKind::ImaginaryNoncompact => ta == a,
                    RootKind::Complex => ta != a && ta != self.root_datum.neg_index(a),
                };
                if !ok {
                    return Err(invariant(g, format!("root classification inconsistent on {}", h.label)));
                }
            }
        }
        Ok(())
    }
}

fn build_cartan(
    group: GroupLabel,
    datum: &RootDatum,
    spec: CartanSpec<'_>,
    diag_coweights: &[CMat],
    diag_roots: &[CMat],
    sigma: &Involution,
    theta: &dyn Fn(&CMat) -> CMat,
) -> Result<CartanData, RealFormError> {
    let cinv = inverse(&spec.cayley).ok_or_else(|| invariant(group, "Cayley matrix is singular"))?;
    let conj_by = |m: &CMat| &spec.cayley * m * &cinv;
    let coweights: Vec<CMat> = diag_coweights.iter().map(conj_by).collect();
    let root_vectors: Vec<CMat> = diag_roots.iter().map(conj_by).collect();
    let dim = coweights.len();
    let gram = DMatrix::from_fn(dim, dim, |i, j| trace_form(&coweights[i], &coweights[j]));
    let mut h = CartanData {
        label: spec.label.to_string(),
        cayley: spec.cayley.clone(),
        coweights,
        root_vectors,
        real_basis: spec.real_basis,
        theta_plus: Vec::new(),
        theta_minus: Vec::new(),
        root_classification: Vec::new(),
        theta_perm: Vec::new(),
        sigma_perm: Vec::new(),
        theta_on_h: Vec::new(),
        sigma_on_h: Vec::new(),
        integral_coweights: spec.integral_coweights,
        is_fundamental: spec.is_fundamental,
        real_basis_h: Vec::new(),
        gram,
    };

    // [K_j, E_α] = α(K_j) E_α
    for (a, e) in h.root_vectors.iter().enumerate() {
        for (j, k) in h.coweights.iter().enumerate() {
            let mut ej = vec![Rational64::zero(); dim];
            ej[j] = Rational64::from_integer(1);
            let val = datum.pairing(&datum.root_weight(a), &ej).to_c64();
            if norm(&(bracket(k, e) - e * val)) > 1e-12 {
                return Err(invariant(group, format!("root vector {a} is not an eigenvector on {}", h.label)));
            }
        }
    }

    let to_rat_matrix = |img: &dyn Fn(&CMat) -> CMat, antilinear: bool| -> Result<Vec<RatVec>, RealFormError> {
        let mut m = vec![vec![Rational64::zero(); dim]; dim];
        for j in 0..dim {
            let coords = h.h_coords(&img(&h.coweights[j]));
            for k in 0..dim {
                let z = coords[k];
                // σ maps K_j to a real combination on every catalog Cartan
                if z.im.abs() > 1e-10 && antilinear {
                    return Err(invariant(group, "sigma acts non-rationally on coweights"));
                }
                m[k][j] = to_rational(z.re, 1e-10)
                    .filter(|_| z.im.abs() < 1e-10)
                    .ok_or_else(|| invariant(group, format!("involution is not rational on {}", h.label)))?;
            }
        }
        Ok(m)
    };
    let theta_on_h = to_rat_matrix(theta, false)?;
    let sigma_on_h = to_rat_matrix(&|x: &CMat| sigma.apply(x), true)?;
    h.theta_on_h = theta_on_h;
    h.sigma_on_h = sigma_on_h;

    for b in &h.real_basis {
        let coords = h.h_coords(b);
        let exact = coords
            .iter()
            .map(|z| match (to_rational(z.re, 1e-10), to_rational(z.im, 1e-10)) {
                (Some(re), Some(im)) => Ok(GaussQ::new(re, im)),
                _ => Err(invariant(group, format!("real basis of {} is not rational in coweights", h.label))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        h.real_basis_h.push(exact);
    }

    for (k, b) in h.real_basis.iter().enumerate() {
        let tb = theta(b);
        if norm(&(&tb - b)) < 1e-13 {
            h.theta_plus.push(k);
        } else if norm(&(&tb + b)) < 1e-13 {
            h.theta_minus.push(k);
        } else {
            return Err(invariant(group, format!("real basis of {} is not adapted to theta", h.label)));
        }
    }

    for (a, e) in h.root_vectors.iter().enumerate() {
        let (ta, coef) = root_space_of(&h.root_vectors, &theta(e))
            .ok_or_else(|| invariant(group, "theta does not permute root spaces"))?;
        let (sa, _) = root_space_of(&h.root_vectors, &sigma.apply(e))
            .ok_or_else(|| invariant(group, "sigma does not permute root spaces"))?;
        let kind = if ta == a {
            if (coef - c(1.0, 0.0)).norm() < 1e-10 {
                RootKind::ImaginaryCompact
            } else {
                RootKind::ImaginaryNoncompact
            }
        } else if ta == datum.neg_index(a) {
            RootKind::Real
        } else {
            RootKind::Complex
        };
        h.theta_perm.push(ta);
        h.sigma_perm.push(sa);
        h.root_classification.push(kind);
    }
    Ok(h)
}

fn gram_schmidt(basis: &[CMat], inner: &dyn Fn(&CMat, &CMat) -> f64) -> Vec<CMat> {
    let mut out: Vec<CMat> = Vec::new();
    for b in basis {
        let mut v = b.clone();
        for e in &out {
            let p = inner(&v, e);
            v -= e * c(p, 0.0);
        }
        let n = inner(&v, &v).sqrt();
        out.push(v * c(1.0 / n, 0.0));
    }
    out
}

fn rv(v: &[i64]) -> RatVec {
    v.iter().map(|&n| Rational64::from_integer(n)).collect()
}

/// Builds the catalog entry for a group label.
pub fn catalog(label: GroupLabel) -> Result<GroupCatalogEntry, RealFormError> {
    let one = c(1.0, 0.0);
    let id2 = CMat::identity(2, 2);
    let compact_form = |n: usize| Involution::new(-1.0, CMat::identity(n, n), InvolutionOp::ConjTranspose);
    let jm = mat(&[&[0.0, 1.0], &[-1.0, 0.0]], one);
    let hm = mat(&[&[1.0, 0.0], &[0.0, -1.0]], one);
    let sm = mat(&[&[0.0, 1.0], &[1.0, 0.0]], one);
    let su2_basis = || vec![hm.clone() * I, jm.clone(), sm.clone() * I];

    let (n, datum, sigma, sigma_c, real_basis, diag_coweights, diag_roots, specs): (
        usize,
        RootDatum,
        Involution,
        Involution,
        Vec<CMat>,
        Vec<CMat>,
        Vec<CMat>,
        Vec<CartanSpec<'static>>,
    ) = match label {
        GroupLabel::TorusU1 => {
            let e = mat(&[&[1.0]], I);
            (
                1,
                RootDatum::torus(1),
                compact_form(1),
                compact_form(1),
                vec![e.clone()],
                vec![mat(&[&[1.0]], one)],
                vec![],
                vec![CartanSpec {
                    label: "compact",
                    cayley: mat(&[&[1.0]], one),
                    real_basis: vec![e],
                    integral_coweights: vec![rv(&[1])],
                    is_fundamental: true,
                }],
            )
        }
        GroupLabel::TorusRx => {
            let e = mat(&[&[1.0]], one);
            (
                1,
                RootDatum::torus(1),
                Involution::new(1.0, mat(&[&[1.0]], one), InvolutionOp::Conj),
                compact_form(1),
                vec![e.clone()],
                vec![e.clone()],
                vec![],
                // the identity component R_{>0}: exp is injective, no integrality constraint
                vec![CartanSpec {
                    label: "split",
                    cayley: mat(&[&[1.0]], one),
                    real_basis: vec![e],
                    integral_coweights: vec![],
                    is_fundamental: true,
                }],
            )
        }
        GroupLabel::Su2 => (
            2,
            RootDatum::new(RootType::A1, Normalization::SimpleRoots),
            compact_form(2),
            compact_form(2),
            su2_basis(),
            vec![hm.clone()],
            vec![unit(2, 0, 1), unit(2, 1, 0)],
            vec![CartanSpec {
                label: "compact",
                cayley: id2.clone(),
                real_basis: vec![hm.clone() * I],
                integral_coweights: vec![rv(&[1])],
                is_fundamental: true,
            }],
        ),
        GroupLabel::Sl2R => (
            2,
            RootDatum::new(RootType::A1, Normalization::SimpleRoots),
            Involution::new(1.0, id2.clone(), InvolutionOp::Conj),
            compact_form(2),
            vec![jm.clone(), hm.clone(), sm.clone()],
            vec![hm.clone()],
            vec![unit(2, 0, 1), unit(2, 1, 0)],
            vec![
                // α∨ = −iJ on the compact Cartan
                CartanSpec {
                    label: "compact",
                    cayley: crate::matrix::cmat(&[&[(1.0, 0.0), (1.0, 0.0)], &[(0.0, 1.0), (0.0, -1.0)]]),
                    real_basis: vec![jm.clone()],
                    integral_coweights: vec![rv(&[1])],
                    is_fundamental: true,
                },
                // H = {±1}·A: the identity component is simply connected
                CartanSpec {
                    label: "split",
                    cayley: id2.clone(),
                    real_basis: vec![hm.clone()],
                    integral_coweights: vec![],
                    is_fundamental: false,
                },
            ],
        ),
        GroupLabel::U2 => {
            let b = vec![unit(2, 0, 0) * I, unit(2, 1, 1) * I, jm.clone(), sm.clone() * I];
            (
                2,
                RootDatum::new(RootType::A1, Normalization::Epsilon),
                compact_form(2),
                compact_form(2),
                b.clone(),
                vec![unit(2, 0, 0), unit(2, 1, 1)],
                vec![unit(2, 0, 1), unit(2, 1, 0)],
                vec![CartanSpec {
                    label: "compact",
                    cayley: id2.clone(),
                    real_basis: b[..2].to_vec(),
                    integral_coweights: vec![rv(&[1, 0]), rv(&[0, 1])],
                    is_fundamental: true,
                }],
            )
        }
        GroupLabel::Su3 => {
            let d1 = mat(&[&[1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 0.0]], one);
            let d2 = mat(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, -1.0]], one);
            let mut b = vec![&d1 * I, &d2 * I];
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                b.push(unit(3, i, j) - unit(3, j, i));
                b.push((unit(3, i, j) + unit(3, j, i)) * I);
            }
            let pos = [(0, 1), (1, 2), (0, 2)];
            let mut roots: Vec<CMat> = pos.iter().map(|&(i, j)| unit(3, i, j)).collect();
            roots.extend(pos.iter().map(|&(i, j)| unit(3, j, i)));
            (
                3,
                RootDatum::new(RootType::A2, Normalization::SimpleRoots),
                compact_form(3),
                compact_form(3),
                b.clone(),
                vec![d1, d2],
                roots,
                vec![CartanSpec {
                    label: "compact",
                    cayley: CMat::identity(3, 3),
                    real_basis: b[..2].to_vec(),
                    integral_coweights: vec![rv(&[1, 0]), rv(&[0, 1])],
                    is_fundamental: true,
                }],
            )
        }
        GroupLabel::Sl2CAsReal => {
            // g_C = sl2 ⊕ sl2, g_R = {(A, Ā)}
            let z = CMat::zeros(2, 2);
            let pair = |a: &CMat| block_diag(a, &conj(a));
            let swap = {
                let mut p = CMat::zeros(4, 4);
                p.view_mut((0, 2), (2, 2)).copy_from(&id2);
                p.view_mut((2, 0), (2, 2)).copy_from(&id2);
                p
            };
            let e12 = unit(2, 0, 1);
            let e21 = unit(2, 1, 0);
            let b: Vec<CMat> = [hm.clone(), e12.clone(), e21.clone()]
                .iter()
                .flat_map(|a| [pair(a), pair(&(a * I))])
                .collect();
            (
                4,
                RootDatum::new(RootType::A1xA1, Normalization::SimpleRoots),
                Involution::new(1.0, swap, InvolutionOp::Conj),
                compact_form(4),
                b,
                vec![block_diag(&hm, &z), block_diag(&z, &hm)],
                vec![block_diag(&e12, &z), block_diag(&z, &e12), block_diag(&e21, &z), block_diag(&z, &e21)],
                vec![CartanSpec {
                    label: "fundamental",
                    cayley: CMat::identity(4, 4),
                    real_basis: vec![pair(&hm), pair(&(&hm * I))],
                    // kernel of exp on C^× is 2πi Z, giving λ(α1∨) − λ(α2∨) ∈ Z
                    integral_coweights: vec![rv(&[1, -1])],
                    is_fundamental: true,
                }],
            )
        }
    };

    let theta = |x: &CMat| sigma.apply(&sigma_c.apply(x));
    let inner = |x: &CMat, y: &CMat| -trace_form(x, &theta(y)).re;
    let m = real_basis.len();
    let inner_product = DMatrix::from_fn(m, m, |i, j| inner(&real_basis[i], &real_basis[j]));
    let orthonormal_basis = gram_schmidt(&real_basis, &inner);
    let cartans = specs
        .into_iter()
        .map(|s| build_cartan(label, &datum, s, &diag_coweights, &diag_roots, &sigma, &theta))
        .collect::<Result<Vec<_>, _>>()?;
    let entry = GroupCatalogEntry {
        label,
        matrix_dim: n,
        root_datum: datum,
        sigma,
        sigma_c,
        cartans,
        real_basis,
        inner_product,
        orthonormal_basis,
    };
    entry.verify()?;
    Ok(entry)
}

/// Ad*(g)ξ = g ξ g⁻¹ under the trace-form identification.
pub fn coadjoint_action(g: &CMat, xi: &CMat) -> CMat {
    g * xi * inverse(g).expect("group element must be invertible")
}

/// Lie bracket XY − YX.
pub fn lie_bracket(x: &CMat, y: &CMat) -> CMat {
    bracket(x, y)
}

/// Conjugacy data of a regular semisimple element of g_R.
#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    /// Coefficients of the characteristic polynomial.
    pub invariants: Vec<Complex64>,
    pub cartan: usize,
    pub cartan_label: String,
    /// Coordinates of the representative in the Cartan's real basis.
    pub coords: Vec<f64>,
    pub representative: CMat,
}

/// Characteristic-polynomial invariants and a Cartan representative of X ∈ g_R.
pub fn conjugacy_invariants(entry: &GroupCatalogEntry, x: &CMat) -> Result<ConjugacyClass, RealFormError> {
    let inv = char_poly(x);
    let n = entry.matrix_dim;
    let scale = norm(x);
    let check_disc = |disc: f64, degree: i32| -> Result<(), RealFormError> {
        let threshold = NON_REGULAR_THRESHOLD * scale.powi(degree);
        if scale == 0.0 || disc.abs() < threshold {
            Err(RealFormError::NonRegular { disc: disc.abs(), threshold })
        } else {
            Ok(())
        }
    };
    let (cartan, coords) = match entry.label {
        GroupLabel::TorusU1 => (0, vec![x[(0, 0)].im]),
        GroupLabel::TorusRx => (0, vec![x[(0, 0)].re]),
        GroupLabel::Su2 => {
            let det = inv[1].re;
            check_disc(4.0 * det, 2)?;
            (0, vec![det.max(0.0).sqrt()])
        }
        GroupLabel::Sl2R => {
            let det = inv[1].re;
            check_disc(4.0 * det, 2)?;
            if det > 0.0 {
                // X = θJ has tr(XJ) = −2θ; the sign labels the sheet
                let jm = &entry.cartans[0].real_basis[0];
                let s = -trace_form(x, jm).re.signum();
                (0, vec![s * det.sqrt()])
            } else {
                (1, vec![(-det).sqrt()])
            }
        }
        GroupLabel::U2 | GroupLabel::Su3 => {
            let herm = x * I;
            let eig = nalgebra::SymmetricEigen::new(herm);
            let mut a: Vec<f64> = eig.eigenvalues.iter().map(|&mu| -mu).collect();
            a.sort_by(|p, q| q.partial_cmp(p).expect("finite eigenvalues"));
            let disc: f64 = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (a[i] - a[j]).powi(2)).product();
            check_disc(disc, (n * (n - 1)) as i32)?;
            if entry.label == GroupLabel::U2 {
                (0, vec![a[0], a[1]])
            } else {
                (0, vec![a[0], a[0] + a[1]])
            }
        }
        GroupLabel::Sl2CAsReal => {
            let a = x.view((0, 0), (2, 2)).into_owned();
            let det = a.determinant();
            check_disc(4.0 * det.norm(), 2)?;
            let mut z = (-det).sqrt();
            if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
                z = -z;
            }
            (0, vec![z.re, z.im])
        }
    };
    let h = &entry.cartans[cartan];
    Ok(ConjugacyClass {
        invariants: inv,
        cartan,
        cartan_label: h.label.clone(),
        representative: h.from_real_coords(&coords),
        coords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::dist;

    fn entry(l: GroupLabel) -> GroupCatalogEntry {
        catalog(l).unwrap()
    }

    #[test]
    fn every_entry_verifies() {
        for l in GroupLabel::ALL {
            let e = entry(l);
            assert_eq!(e.orthonormal_basis.len(), e.real_basis.len());
            assert!(e.verify().is_ok(), "{l}");
        }
    }

    #[test]
    fn label_round_trip() {
        for l in GroupLabel::ALL {
            assert_eq!(l.as_str().parse::<GroupLabel>().unwrap(), l);
        }
        assert!("so5".parse::<GroupLabel>().is_err());
    }

    #[test]
    fn su2_structure() {
        let e = entry(GroupLabel::Su2);
        assert_eq!(e.dim(), 3);
        assert_eq!(e.cartans.len(), 1);
        assert!(e.cartans[0].root_classification.iter().all(|k| *k == RootKind::ImaginaryCompact));
    }

    #[test]
    fn sl2r_structure() {
        let e = entry(GroupLabel::Sl2R);
        assert_eq!(e.cartans.len(), 2);
        let compact = &e.cartans[e.cartan_index("compact").unwrap()];
        let split = &e.cartans[e.cartan_index("split").unwrap()];
        assert!(compact.is_fundamental && !split.is_fundamental);
        assert!(compact.root_classification.iter().all(|k| *k == RootKind::ImaginaryNoncompact));
        assert!(split.root_classification.iter().all(|k| *k == RootKind::Real));
        // α∨ = −iJ on the compact Cartan
        let jm = &compact.real_basis[0];
        assert!(dist(&compact.coweights[0], &(jm * c(0.0, -1.0))) < 1e-14);
    }

    #[test]
    fn torus_has_no_roots() {
        let e = entry(GroupLabel::TorusU1);
        assert_eq!(e.root_datum.n_roots(), 0);
        assert_eq!(e.dim(), 1);
    }

    #[test]
    fn sl2c_roots_are_complex() {
        let e = entry(GroupLabel::Sl2CAsReal);
        let h = &e.cartans[0];
        assert!(h.root_classification.iter().all(|k| *k == RootKind::Complex));
        assert_eq!(h.sigma_perm[0], 1);
    }

    #[test]
    fn su2_bracket_fixture() {
        let e = entry(GroupLabel::Su2);
        let b = &e.real_basis;
        assert!(dist(&lie_bracket(&b[0], &b[1]), &(&b[2] * c(2.0, 0.0))) < 1e-15);
        assert!(norm(&lie_bracket(&b[0], &b[0])) == 0.0);
    }

    #[test]
    fn coadjoint_action_examples() {
        let e = entry(GroupLabel::Su2);
        let lam = &e.cartans[0].weight_matrix(&e.root_datum, &Weight::from_ints(&[1]));
        let id = CMat::identity(2, 2);
        assert!(dist(&coadjoint_action(&id, lam), lam) < 1e-15);
        // exp(tH) stabilizes λ on the Cartan
        let g = expm(&(&e.cartans[0].real_basis[0] * c(0.7, 0.0)));
        assert!(dist(&coadjoint_action(&g, lam), lam) < 1e-14);
        // rotation of an off-Cartan functional, against the explicit matrix product
        let xi = &e.real_basis[1] * I;
        let t = 0.3f64;
        let expected = mat(&[&[0.0, 1.0], &[-1.0, 0.0]], c(0.0, (2.0 * t).cos()))
            + mat(&[&[0.0, 1.0], &[1.0, 0.0]], c(0.0, 1.0) * c(0.0, (2.0 * t).sin()));
        let g = expm(&(&e.real_basis[0] * c(t, 0.0)));
        assert!(dist(&coadjoint_action(&g, &xi), &expected) < 1e-14);
    }

    #[test]
    fn conjugacy_examples() {
        let e = entry(GroupLabel::Su2);
        let x = mat(&[&[1.0, 0.0], &[0.0, -1.0]], c(0.0, 0.8));
        let cl = conjugacy_invariants(&e, &x).unwrap();
        assert!((cl.coords[0] - 0.8).abs() < 1e-14);
        assert!(matches!(conjugacy_invariants(&e, &CMat::zeros(2, 2)), Err(RealFormError::NonRegular { .. })));

        let s = entry(GroupLabel::Sl2R);
        let y = mat(&[&[0.3, 1.0], &[2.0, -0.3]], c(1.0, 0.0));
        let cl = conjugacy_invariants(&s, &y).unwrap();
        assert_eq!(cl.cartan_label, "split");
        // the representative is conjugate to y inside SL(2,R)
        let t = cl.coords[0];
        assert!((t * t - (0.09 + 2.0)).abs() < 1e-12);
        let v1 = nalgebra::Vector2::new(1.0, (t - 0.3) / 1.0);
        let v2 = nalgebra::Vector2::new(1.0, (-t - 0.3) / 1.0);
        let p = nalgebra::Matrix2::from_columns(&[v1, v2]);
        let ym = nalgebra::Matrix2::new(0.3, 1.0, 2.0, -0.3);
        let d = p.try_inverse().unwrap() * ym * p;
        assert!((d[(0, 0)] - t).abs() < 1e-12 && d[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn conjugacy_invariants_are_coadjoint_invariant() {
        let e = entry(GroupLabel::Sl2R);
        let x = e.from_coords(&[0.9, 0.2, -0.4]);
        let g = e.exp_real(&[0.3, -0.5, 0.8]);
        let a = conjugacy_invariants(&e, &x).unwrap();
        let b = conjugacy_invariants(&e, &coadjoint_action(&g, &x)).unwrap();
        assert_eq!(a.cartan, b.cartan);
        assert!((a.coords[0] - b.coords[0]).abs() < 1e-10);
    }

    #[test]
    fn conjugated_compact_form_commutes_with_sigma() {
        let e = entry(GroupLabel::Sl2R);
        let g = e.exp_real(&[0.2, 0.7, -0.3]);
        let sc = e.sigma_c.conjugated_by(&g);
        for x in &e.real_basis {
            let a = e.sigma.apply(&sc.apply(x));
            let b = sc.apply(&e.sigma.apply(x));
            assert!(dist(&a, &b) < 1e-12);
        }
        // the conjugated compact form fixes g k g⁻¹
        let k = &e.real_basis[0];
        let gk = &g * k * inverse(&g).unwrap();
        assert!(dist(&sc.apply(&gk), &gk) < 1e-12);
    }

    #[test]
    fn theta_split_of_sl2c() {
        let e = entry(GroupLabel::Sl2CAsReal);
        let h = &e.cartans[0];
        assert_eq!(h.theta_minus, vec![0]);
        assert_eq!(h.theta_plus, vec![1]);
    }

    use proptest::prelude::*;

    fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.5f64..1.5, n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_form_is_ad_invariant(l in prop::sample::select(GroupLabel::ALL.to_vec()), g in coords(8), x in coords(8), y in coords(8)) {
            let e = entry(l);
            let n = e.dim();
            let (g, x, y) = (e.exp_real(&g[..n]), e.from_coords(&x[..n]), e.from_coords(&y[..n]));
            let before = trace_form(&x, &y);
            let after = trace_form(&coadjoint_action(&g, &x), &coadjoint_action(&g, &y));
            prop_assert!((before - after).norm() <= 1e-9 * (1.0 + before.norm()));
        }

        #[test]
        fn real_form_involutions_fix_g_r(l in prop::sample::select(GroupLabel::ALL.to_vec()), x in coords(8), z in coords(8)) {
            let e = entry(l);
            let n = e.dim();
            let x = e.from_coords(&x[..n]);
            prop_assert!(dist(&e.sigma.apply(&x), &x) < 1e-12);
            prop_assert!(dist(&e.theta(&e.theta(&x)), &x) < 1e-12);
            let zc: Vec<Complex64> = x.iter().zip(&z).map(|(_, &t)| c(t, -t / 2.0)).take(n).collect();
            let w = e.from_complex_coords(&zc);
            prop_assert!(dist(&e.sigma.apply(&e.sigma.apply(&w)), &w) < 1e-12);
            prop_assert!(dist(&e.sigma_c.apply(&e.sigma_c.apply(&w)), &w) < 1e-12);
        }

        #[test]
        fn coordinates_round_trip(l in prop::sample::select(GroupLabel::ALL.to_vec()), x in coords(8)) {
            let e = entry(l);
            let n = e.dim();
            let back = e.real_coords(&e.from_coords(&x[..n]));
            for (a, b) in back.iter().zip(&x[..n]) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
