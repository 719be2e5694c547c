//! Exact root systems of rank at most two.
//!
//! Weights carry Gaussian-rational coordinates so that every sign and zero test
//! downstream (admissibility, good range, maximal reality) is decided exactly.
//! Coordinates of weights are taken in a basis of h* fixed by [`Normalization`];
//! coroots are coordinate vectors for the matching basis of h, and the pairing
//! between the two is the stored `pairing_matrix`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootDataError {
    #[error("unsupported root system label `{0}` (expected A1, A1xA1 or A2)")]
    UnsupportedLabel(String),
    #[error("cannot parse `{0}` as a Gaussian rational")]
    Parse(String),
    #[error("weight has {got} coordinates, root datum expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("linear system is singular")]
    Singular,
}

pub type RatVec = Vec<Rational64>;

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussQ {
    pub re: Rational64,
    pub im: Rational64,
}

impl GaussQ {
    pub fn new(re: Rational64, im: Rational64) -> Self {
        Self { re, im }
    }
    pub fn real(re: Rational64) -> Self {
        Self { re, im: Rational64::zero() }
    }
    pub fn int(n: i64) -> Self {
        Self::real(Rational64::from_integer(n))
    }
    pub fn frac(n: i64, d: i64) -> Self {
        Self::real(Rational64::new(n, d))
    }
    pub fn imag(im: Rational64) -> Self {
        Self { re: Rational64::zero(), im }
    }
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    /// True iff the value lies in R_{>0}.
    pub fn is_real_positive(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }
    pub fn conj(&self) -> Self {
        Self { re: self.re, im: -self.im }
    }
    pub fn scale(&self, q: Rational64) -> Self {
        Self { re: self.re * q, im: self.im * q }
    }
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(self.re), ratio_to_f64(self.im))
    }
}

pub fn ratio_to_f64(q: Rational64) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Add for GaussQ {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}
impl AddAssign for GaussQ {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
impl Sub for GaussQ {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}
impl Mul for GaussQ {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}
impl Neg for GaussQ {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im = |q: Rational64| -> String {
            if q == Rational64::one() {
                "i".into()
            } else if q == -Rational64::one() {
                "-i".into()
            } else {
                format!("{q}i")
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}", im(self.im)),
            (false, false) => {
                let s = im(self.im);
                if s.starts_with('-') {
                    write!(f, "{}{}", self.re, s)
                } else {
                    write!(f, "{}+{}", self.re, s)
                }
            }
        }
    }
}

impl FromStr for GaussQ {
    type Err = RootDataError;
    /// Accepts `p/q`, `p/qi`, `a+bi`, `a-bi`, `i`, `-i` (no spaces needed).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RootDataError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let rat = |x: &str| -> Result<Rational64, RootDataError> {
            match x {
                "" | "+" => Ok(Rational64::one()),
                "-" => Ok(-Rational64::one()),
                _ => Rational64::from_str(x).map_err(|_| err()),
            }
        };
        if let Some(body) = t.strip_suffix('i') {
            let split = body
                .char_indices()
                .filter(|&(k, c)| k > 0 && (c == '+' || c == '-') && !body[..k].ends_with('/'))
                .map(|(k, _)| k)
                .last();
            match split {
                Some(k) => Ok(GaussQ::new(
                    Rational64::from_str(&body[..k]).map_err(|_| err())?,
                    rat(&body[k..])?,
                )),
                None => Ok(GaussQ::imag(rat(body)?)),
            }
        } else {
            Ok(GaussQ::real(Rational64::from_str(&t).map_err(|_| err())?))
        }
    }
}

impl Serialize for GaussQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(n) => Ok(GaussQ::int(n)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl schemars::JsonSchema for GaussQ {
    fn schema_name() -> std::borrow::Cow<'static, str> {
        "GaussianRational".into()
    }
    fn json_schema(_: &mut schemars::SchemaGenerator) -> schemars::Schema {
        schemars::json_schema!({
            "description": "Exact Gaussian rational: an integer, or a string such as \"3/2\", \"2i\", \"1/2-3i\"",
            "type": ["string", "integer"]
        })
    }
}

/// Linear functional on h with exact Gaussian-rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(transparent)]
pub struct Weight {
    pub coords: Vec<GaussQ>,
}

impl Weight {
    pub fn new(coords: Vec<GaussQ>) -> Self {
        Self { coords }
    }
    pub fn zero(dim: usize) -> Self {
        Self { coords: vec![GaussQ::zero(); dim] }
    }
    pub fn from_rational(v: &[Rational64]) -> Self {
        Self { coords: v.iter().map(|&q| GaussQ::real(q)).collect() }
    }
    pub fn from_ints(v: &[i64]) -> Self {
        Self { coords: v.iter().map(|&n| GaussQ::int(n)).collect() }
    }
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(GaussQ::is_zero)
    }
    pub fn scale(&self, q: Rational64) -> Self {
        Self { coords: self.coords.iter().map(|c| c.scale(q)).collect() }
    }
    pub fn scale_gauss(&self, z: GaussQ) -> Self {
        Self { coords: self.coords.iter().map(|&c| c * z).collect() }
    }
    /// Real part, as a weight with zero imaginary coordinates.
    pub fn real_part(&self) -> Self {
        Self { coords: self.coords.iter().map(|c| GaussQ::real(c.re)).collect() }
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, o: &Weight) -> Weight {
        assert_eq!(self.dim(), o.dim(), "weight dimensions differ");
        Weight { coords: self.coords.iter().zip(&o.coords).map(|(&a, &b)| a + b).collect() }
    }
}
impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, o: &Weight) -> Weight {
        assert_eq!(self.dim(), o.dim(), "weight dimensions differ");
        Weight { coords: self.coords.iter().zip(&o.coords).map(|(&a, &b)| a - b).collect() }
    }
}
impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight { coords: self.coords.iter().map(|&a| -a).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootType {
    A1,
    A1xA1,
    A2,
}

impl FromStr for RootType {
    type Err = RootDataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A1" => Ok(Self::A1),
            "A1xA1" | "A1×A1" | "A1+A1" => Ok(Self::A1xA1),
            "A2" => Ok(Self::A2),
            _ => Err(RootDataError::UnsupportedLabel(s.into())),
        }
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A1 => "A1",
            Self::A1xA1 => "A1xA1",
            Self::A2 => "A2",
        })
    }
}

/// Basis of h* in which weight coordinates are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// Simple roots for h*, simple coroots for h.
    SimpleRoots,
    /// Standard basis e_1..e_n of the diagonal Cartan of gl(n) (and products), dual basis for h.
    Epsilon,
}

/// Element of the Weyl group acting on weight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WeylElement {
    pub matrix: Vec<Vec<i64>>,
    pub sign: i8,
}

impl WeylElement {
    pub fn identity(dim: usize) -> Self {
        let matrix = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
        Self { matrix, sign: 1 }
    }

    pub fn act(&self, w: &Weight) -> Weight {
        Weight {
            coords: self
                .matrix
                .iter()
                .map(|row| {
                    row.iter().zip(&w.coords).fold(GaussQ::zero(), |acc, (&m, &c)| {
                        acc + c.scale(Rational64::from_integer(m))
                    })
                })
                .collect(),
        }
    }

    pub fn act_rat(&self, v: &[Rational64]) -> RatVec {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(&m, &c)| c * m).sum())
            .collect()
    }

    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let n = self.matrix.len();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum())
                    .collect()
            })
            .collect();
        WeylElement { matrix, sign: self.sign * other.sign }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RootDatum {
    pub label: String,
    /// Semisimple rank (number of simple roots).
    pub rank: usize,
    /// Dimension of h, i.e. the number of weight coordinates.
    pub dim: usize,
    pub normalization: Normalization,
    #[serde(serialize_with = "ser_ratvecs")]
    pub roots: Vec<RatVec>,
    #[serde(serialize_with = "ser_ratvecs")]
    pub coroots: Vec<RatVec>,
    #[serde(serialize_with = "ser_ratvecs")]
    pub pairing_matrix: Vec<RatVec>,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub simple_roots: Vec<usize>,
    /// Roots `0..n_positive` form the standard positive system; root `i + n_positive` is `-root i`.
    pub n_positive: usize,
    #[serde(skip)]
    weyl: Vec<WeylElement>,
}

fn ser_ratvecs<S: Serializer>(v: &[RatVec], s: S) -> Result<S::Ok, S::Error> {
    let t: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect();
    t.serialize(s)
}

fn ints(v: &[i64]) -> RatVec {
    v.iter().map(|&n| Rational64::from_integer(n)).collect()
}

/// Builds the root datum of a supported type in the requested coordinates.
pub fn build_root_system(label: &str, normalization: Normalization) -> Result<RootDatum, RootDataError> {
    let ty: RootType = label.parse()?;
    Ok(RootDatum::new(ty, normalization))
}

impl RootDatum {
    pub fn new(ty: RootType, normalization: Normalization) -> Self {
        // positive roots as (simple-root coefficients, epsilon coordinates)
        let (simple_coeffs, eps, eps_dim, cartan): (Vec<Vec<i64>>, Vec<Vec<i64>>, usize, Vec<Vec<i64>>) = match ty {
            RootType::A1 => (vec![vec![1]], vec![vec![1, -1]], 2, vec![vec![2]]),
            RootType::A1xA1 => (
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![1, -1, 0, 0], vec![0, 0, 1, -1]],
                4,
                vec![vec![2, 0], vec![0, 2]],
            ),
            RootType::A2 => (
                vec![vec![1, 0], vec![0, 1], vec![1, 1]],
                vec![vec![1, -1, 0], vec![0, 1, -1], vec![1, 0, -1]],
                3,
                vec![vec![2, -1], vec![-1, 2]],
            ),
        };
        let rank = cartan.len();
        let (pos, dim, pairing_matrix) = match normalization {
            // all supported types are simply laced, so root and coroot coefficients coincide
            Normalization::SimpleRoots => (simple_coeffs, rank, cartan.iter().map(|r| ints(r)).collect()),
            Normalization::Epsilon => {
                let id = (0..eps_dim)
                    .map(|i| (0..eps_dim).map(|j| Rational64::from_integer(i64::from(i == j))).collect())
                    .collect();
                (eps, eps_dim, id)
            }
        };
        let mut roots: Vec<RatVec> = pos.iter().map(|r| ints(r)).collect();
        roots.extend(pos.iter().map(|r| ints(&r.iter().map(|x| -x).collect::<Vec<_>>())));
        let coroots = roots.clone();
        let mut d = RootDatum {
            label: ty.to_string(),
            rank,
            dim,
            normalization,
            roots,
            coroots,
            pairing_matrix,
            cartan_matrix: cartan,
            simple_roots: (0..rank).collect(),
            n_positive: pos.len(),
            weyl: Vec::new(),
        };
        d.weyl = d.generate_weyl_group();
        d
    }

    /// Abelian datum of the given dimension: no roots, trivial Weyl group.
    pub fn torus(dim: usize) -> Self {
        RootDatum {
            label: format!("T{dim}"),
            rank: 0,
            dim,
            normalization: Normalization::Epsilon,
            roots: Vec::new(),
            coroots: Vec::new(),
            pairing_matrix: (0..dim)
                .map(|i| (0..dim).map(|j| Rational64::from_integer(i64::from(i == j))).collect())
                .collect(),
            cartan_matrix: Vec::new(),
            simple_roots: Vec::new(),
            n_positive: 0,
            weyl: vec![WeylElement::identity(dim)],
        }
    }

    pub fn n_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.n_positive).collect()
    }

    pub fn neg_index(&self, i: usize) -> usize {
        if i < self.n_positive {
            i + self.n_positive
        } else {
            i - self.n_positive
        }
    }

    pub fn root_weight(&self, i: usize) -> Weight {
        Weight::from_rational(&self.roots[i])
    }

    pub fn root_index(&self, v: &[Rational64]) -> Option<usize> {
        self.roots.iter().position(|r| r.as_slice() == v)
    }

    /// Exact pairing of a weight with a vector in coroot coordinates.
    pub fn pairing(&self, w: &Weight, coroot: &[Rational64]) -> GaussQ {
        let mut acc = GaussQ::zero();
        for (i, &wi) in w.coords.iter().enumerate() {
            let s: Rational64 = self.pairing_matrix[i].iter().zip(coroot).map(|(&m, &c)| m * c).sum();
            acc += wi.scale(s);
        }
        acc
    }

    /// ⟨λ, α_i∨⟩ for root index `i`.
    pub fn pair_root(&self, w: &Weight, i: usize) -> GaussQ {
        self.pairing(w, &self.coroots[i])
    }

    fn rat_pairing(&self, v: &[Rational64], coroot: &[Rational64]) -> Rational64 {
        let mut acc = Rational64::zero();
        for (i, &vi) in v.iter().enumerate() {
            for (j, &cj) in coroot.iter().enumerate() {
                acc += vi * self.pairing_matrix[i][j] * cj;
            }
        }
        acc
    }

    fn simple_reflection(&self, s: usize) -> WeylElement {
        let a = &self.roots[self.simple_roots[s]];
        let c = &self.coroots[self.simple_roots[s]];
        let mc: RatVec = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.pairing_matrix[i][j] * c[j]).sum())
            .collect();
        let matrix = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let v = Rational64::from_integer(i64::from(i == j)) - a[i] * mc[j];
                        assert!(v.is_integer(), "Weyl reflection is not integral");
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        WeylElement { matrix, sign: -1 }
    }

    fn generate_weyl_group(&self) -> Vec<WeylElement> {
        let gens: Vec<WeylElement> = (0..self.rank).map(|s| self.simple_reflection(s)).collect();
        let id = WeylElement::identity(self.dim);
        let mut seen: HashSet<Vec<Vec<i64>>> = HashSet::from([id.matrix.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let x = g.compose(&w);
                if seen.insert(x.matrix.clone()) {
                    out.push(x.clone());
                    queue.push_back(x);
                }
            }
        }
        out
    }

    pub fn weyl_group(&self) -> &[WeylElement] {
        &self.weyl
    }

    /// Index of the root w·α_i.
    pub fn act_on_root(&self, w: &WeylElement, i: usize) -> usize {
        self.root_index(&w.act_rat(&self.roots[i])).expect("Weyl group permutes roots")
    }

    /// The images w(Δ⁺), each as a sorted list of root indices, without repetition.
    pub fn positive_systems(&self) -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        for w in &self.weyl {
            let mut s: Vec<usize> = (0..self.n_positive).map(|i| self.act_on_root(w, i)).collect();
            s.sort_unstable();
            seen.insert(s);
        }
        seen.into_iter().collect()
    }

    /// Half the sum of the given roots.
    pub fn half_sum(&self, subset: &[usize]) -> Weight {
        let mut acc = vec![Rational64::zero(); self.dim];
        for &i in subset {
            for (a, r) in acc.iter_mut().zip(&self.roots[i]) {
                *a += *r;
            }
        }
        Weight::from_rational(&acc.into_iter().map(|x| x / 2).collect::<Vec<_>>())
    }

    /// True iff α, β ∈ S with α+β a root forces α+β ∈ S.
    pub fn is_closed_root_subset(&self, subset: &[usize]) -> bool {
        let set: HashSet<usize> = subset.iter().copied().collect();
        for &a in subset {
            for &b in subset {
                let sum: RatVec = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x + y).collect();
                if let Some(k) = self.root_index(&sum) {
                    if !set.contains(&k) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The weight in the span of the simple roots whose pairings with the simple coroots are
    /// the given values. When the simple roots span h* this is the only such weight.
    pub fn weight_with_simple_pairings(&self, values: &[GaussQ]) -> Result<Weight, RootDataError> {
        if values.len() != self.rank {
            return Err(RootDataError::Dimension { expected: self.rank, got: values.len() });
        }
        // λ = Σ c_t α_t with ⟨λ, α_s∨⟩ = Σ c_t ⟨α_t, α_s∨⟩
        let a: Vec<RatVec> = self
            .simple_roots
            .iter()
            .map(|&s| self.simple_roots.iter().map(|&t| self.rat_pairing(&self.roots[t], &self.coroots[s])).collect())
            .collect();
        let re = solve_rational(&a, &values.iter().map(|v| v.re).collect::<Vec<_>>())?;
        let im = solve_rational(&a, &values.iter().map(|v| v.im).collect::<Vec<_>>())?;
        let coords = (0..self.dim)
            .map(|i| {
                self.simple_roots.iter().enumerate().fold(GaussQ::zero(), |acc, (k, &t)| {
                    let r = self.roots[t][i];
                    GaussQ::new(acc.re + re[k] * r, acc.im + im[k] * r)
                })
            })
            .collect();
        Ok(Weight { coords })
    }

    /// Returns an error unless `w` has the datum's dimension.
    pub fn check_dim(&self, w: &Weight) -> Result<(), RootDataError> {
        if w.dim() == self.dim {
            Ok(())
        } else {
            Err(RootDataError::Dimension { expected: self.dim, got: w.dim() })
        }
    }
}

/// Exact Gaussian elimination for a square rational system.
pub fn solve_rational(a: &[RatVec], b: &[Rational64]) -> Result<RatVec, RootDataError> {
    let n = b.len();
    let mut m: Vec<RatVec> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(RootDataError::Singular)?;
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn a1_pairing_is_two() {
        let d = build_root_system("A1", Normalization::SimpleRoots).unwrap();
        assert_eq!(d.n_roots(), 2);
        for i in 0..2 {
            assert_eq!(d.pair_root(&d.root_weight(i), i), GaussQ::int(2));
        }
    }

    #[test]
    fn sizes_of_supported_types() {
        let a2 = build_root_system("A2", Normalization::SimpleRoots).unwrap();
        assert_eq!((a2.n_roots(), a2.weyl_group().len()), (6, 6));
        let a11 = build_root_system("A1xA1", Normalization::SimpleRoots).unwrap();
        assert_eq!((a11.n_roots(), a11.weyl_group().len()), (4, 4));
        // (Z/2)^2: every element is an involution
        for w in a11.weyl_group() {
            assert_eq!(w.compose(w), WeylElement::identity(2));
        }
        assert!(matches!(
            build_root_system("B2", Normalization::SimpleRoots),
            Err(RootDataError::UnsupportedLabel(_))
        ));
    }

    #[test]
    fn pairing_examples() {
        let d = build_root_system("A1", Normalization::SimpleRoots).unwrap();
        let rho = d.half_sum(&d.positive_roots());
        assert_eq!(d.pair_root(&rho, 0), GaussQ::int(1));
        let lam = d.weight_with_simple_pairings(&[GaussQ::int(3)]).unwrap();
        assert_eq!(d.pair_root(&lam, 0), GaussQ::int(3));
        // i·2·ϖ pairs to 2i
        let fund = d.weight_with_simple_pairings(&[GaussQ::int(1)]).unwrap();
        let z = fund.scale_gauss(GaussQ::imag(q(2, 1)));
        assert_eq!(d.pair_root(&z, 0), GaussQ::imag(q(2, 1)));
    }

    #[test]
    fn half_sums() {
        let d = build_root_system("A1", Normalization::SimpleRoots).unwrap();
        assert_eq!(d.half_sum(&[]), Weight::zero(1));
        assert_eq!(d.half_sum(&[0]).coords, vec![GaussQ::frac(1, 2)]);
    }

    #[test]
    fn closure_examples() {
        let d = build_root_system("A2", Normalization::SimpleRoots).unwrap();
        assert!(d.is_closed_root_subset(&[0]));
        assert!(!d.is_closed_root_subset(&[0, 1]));
        assert!(d.is_closed_root_subset(&[0, 1, 2]));
    }

    #[test]
    fn epsilon_coordinates_agree_with_simple_roots() {
        let d = build_root_system("A2", Normalization::Epsilon).unwrap();
        let rho = d.half_sum(&d.positive_roots());
        assert_eq!(rho.coords, vec![GaussQ::int(1), GaussQ::int(0), GaussQ::int(-1)]);
        for &s in &d.simple_roots {
            assert_eq!(d.pair_root(&rho, s), GaussQ::int(1));
        }
    }

    #[test]
    fn gauss_rational_parse_and_print() {
        for s in ["3", "-3/2", "2i", "-i", "1/2+3/4i", "1/2-i", "-5/3-1/2i"] {
            let z: GaussQ = s.parse().unwrap();
            assert_eq!(z.to_string(), s);
        }
        assert_eq!("i".parse::<GaussQ>().unwrap(), GaussQ::imag(q(1, 1)));
        assert!("x".parse::<GaussQ>().is_err());
        let z: GaussQ = serde_json::from_str("4").unwrap();
        assert_eq!(z, GaussQ::int(4));
    }

    #[test]
    fn solve_rational_inverts_cartan_matrix() {
        let a = vec![vec![q(2, 1), q(-1, 1)], vec![q(-1, 1), q(2, 1)]];
        let x = solve_rational(&a, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(x, vec![q(2, 3), q(1, 3)]);
    }

    use proptest::prelude::*;

    fn gauss() -> impl Strategy<Value = GaussQ> {
        (-12i64..=12, 1i64..=6, -12i64..=12, 1i64..=6).prop_map(|(a, b, c, d)| GaussQ::new(q(a, b), q(c, d)))
    }

    proptest! {
        #[test]
        fn weyl_group_preserves_pairings(ty in prop::sample::select(vec!["A1", "A1xA1", "A2"]), eps in any::<bool>(), seed in prop::collection::vec(gauss(), 3)) {
            let d = build_root_system(ty, if eps { Normalization::Epsilon } else { Normalization::SimpleRoots }).unwrap();
            let lam = d.weight_with_simple_pairings(&seed[..d.rank]).unwrap();
            for w in d.weyl_group() {
                let wl = w.act(&lam);
                for a in 0..d.n_roots() {
                    prop_assert_eq!(d.pair_root(&wl, d.act_on_root(w, a)), d.pair_root(&lam, a));
                }
            }
        }

        #[test]
        fn simple_pairings_are_reproduced(values in prop::collection::vec(gauss(), 2)) {
            let d = build_root_system("A2", Normalization::Epsilon).unwrap();
            let lam = d.weight_with_simple_pairings(&values).unwrap();
            for (k, &s) in d.simple_roots.iter().enumerate() {
                prop_assert_eq!(d.pair_root(&lam, s), values[k]);
            }
        }

        #[test]
        fn gauss_rational_round_trips_through_text(z in gauss()) {
            prop_assert_eq!(z.to_string().parse::<GaussQ>().unwrap(), z);
        }
    }
}
