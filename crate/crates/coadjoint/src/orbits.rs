//! Semisimple orbital parameters.
//!
//! A parameter is a weight λ on one catalog Cartan, purely imaginary on h_R.
//! The Γ-datum is carried only by its differential λ plus a flag recording that
//! λ + ρ(n) integrates to a character of the Cartan subgroup; catalog stabilizers
//! are connected, so nothing else is needed.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::matrix::char_poly;
use crate::polarize::Polarization;
use crate::realforms::{CartanData, GroupCatalogEntry, GroupLabel};
use crate::rootdata::{GaussQ, RootDataError, RootDatum, Weight};

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error(transparent)]
    RootData(#[from] RootDataError),
    #[error("no Cartan `{0}` in this catalog entry")]
    UnknownCartan(String),
    #[error("λ is not purely imaginary on h_R: λ(H_{index}) = {value}")]
    NotImaginary { index: usize, value: GaussQ },
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitalParameter {
    pub group: GroupLabel,
    pub cartan: usize,
    pub lambda: Weight,
    /// Set once the integrality check has passed.
    pub gamma_lift: bool,
}

impl OrbitalParameter {
    /// Validates the reality constraint λ ∈ √−1 h_R* exactly.
    pub fn new(entry: &GroupCatalogEntry, cartan: usize, lambda: Weight) -> Result<Self, OrbitError> {
        let datum = &entry.root_datum;
        datum.check_dim(&lambda)?;
        let h = entry
            .cartans
            .get(cartan)
            .ok_or_else(|| OrbitError::UnknownCartan(cartan.to_string()))?;
        for k in 0..h.real_basis.len() {
            let v = h.weight_on_real_basis(datum, &lambda, k);
            if !v.re.is_zero() {
                return Err(OrbitError::NotImaginary { index: k, value: v });
            }
        }
        Ok(Self { group: entry.label, cartan, lambda, gamma_lift: false })
    }

    pub fn cartan_data<'a>(&self, entry: &'a GroupCatalogEntry) -> &'a CartanData {
        &entry.cartans[self.cartan]
    }
}

/// Δ(l, h) = {α : ⟨λ, α∨⟩ = 0}.
pub fn stabilizer_levi(datum: &RootDatum, lambda: &Weight) -> Vec<usize> {
    (0..datum.n_roots()).filter(|&a| datum.pair_root(lambda, a).is_zero()).collect()
}

/// Positive roots of a root subset with respect to the standard positive system.
pub fn positive_part(datum: &RootDatum, roots: &[usize]) -> Vec<usize> {
    roots.iter().copied().filter(|&a| a < datum.n_positive).collect()
}

/// ρ_l for the Levi of λ, using the standard positive system of Δ(l).
pub fn rho_levi(datum: &RootDatum, levi: &[usize]) -> Weight {
    datum.half_sum(&positive_part(datum, levi))
}

/// λ = λc + λn with λc ∈ (h^θ)*, λn ∈ (h^{−θ})*.
pub fn decompose_lambda(entry: &GroupCatalogEntry, param: &OrbitalParameter) -> (Weight, Weight) {
    let h = param.cartan_data(entry);
    let t = h.theta_weight(&entry.root_datum, &param.lambda);
    let half = Rational64::new(1, 2);
    let lc = (&param.lambda + &t).scale(half);
    let ln = (&param.lambda - &t).scale(half);
    (lc, ln)
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodRangeReport {
    /// (root index, Re⟨λ + ρ_l, α∨⟩) over the tested roots.
    #[serde(serialize_with = "ser_margins")]
    pub margins: Vec<(usize, Rational64)>,
    /// The test used the elliptic part on q_m.
    pub via_elliptic_part: bool,
    pub verdict: bool,
}

fn ser_margins<S: serde::Serializer>(m: &[(usize, Rational64)], s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize as _;
    m.iter().map(|(a, q)| (*a, q.to_string())).collect::<Vec<_>>().serialize(s)
}

/// Re⟨λ + ρ_l, α∨⟩ > 0 over Δ(n); for non-elliptic λ, Re⟨λc + ρ_{l∩m}, α∨⟩ > 0 over Δ(n_m).
pub fn good_range_check(entry: &GroupCatalogEntry, param: &OrbitalParameter, pol: &Polarization) -> GoodRangeReport {
    let datum = &entry.root_datum;
    let (lc, ln) = decompose_lambda(entry, param);
    let (base, tested, via) = if ln.is_zero() {
        (&param.lambda + &pol.rho_l, pol.nilradical_roots.clone(), false)
    } else {
        let m_roots = stabilizer_levi(datum, &ln);
        let l_cap_m: Vec<usize> = pol.levi_roots.iter().copied().filter(|a| m_roots.contains(a)).collect();
        let n_m = crate::polarize::n_m_roots(datum, &lc, &m_roots);
        (&lc + &rho_levi(datum, &l_cap_m), n_m, true)
    };
    let margins: Vec<(usize, Rational64)> = tested.iter().map(|&a| (a, datum.pair_root(&base, a).re)).collect();
    let verdict = margins.iter().all(|(_, m)| m.is_positive());
    GoodRangeReport { margins, via_elliptic_part: via, verdict }
}

/// True iff λ + ρ(n) pairs integrally with the Cartan's integral coweights.
/// Sets `gamma_lift` accordingly.
pub fn integrality_check(entry: &GroupCatalogEntry, param: &mut OrbitalParameter, pol: &Polarization) -> bool {
    let datum = &entry.root_datum;
    let mu = &param.lambda + &pol.rho_n;
    let ok = param
        .cartan_data(entry)
        .integral_coweights
        .iter()
        .all(|v| datum.pairing(&mu, v).is_integer());
    param.gamma_lift = ok;
    ok
}

#[derive(Clone, Debug, Serialize)]
pub struct InfinitesimalCharacter {
    /// λ + ρ_l, defined up to the Weyl group.
    pub weight: Weight,
    /// Characteristic-polynomial coefficients of the matrix realizing λ + ρ_l; W-invariant.
    #[serde(serialize_with = "ser_complex")]
    pub invariants: Vec<Complex64>,
    pub regular: bool,
}

fn ser_complex<S: serde::Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize as _;
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

pub fn infinitesimal_character(entry: &GroupCatalogEntry, param: &OrbitalParameter, pol: &Polarization) -> InfinitesimalCharacter {
    let datum = &entry.root_datum;
    let eta = &param.lambda + &pol.rho_l;
    let regular = (0..datum.n_roots()).all(|a| !datum.pair_root(&eta, a).is_zero());
    let m = param.cartan_data(entry).weight_matrix(datum, &eta);
    InfinitesimalCharacter { invariants: char_poly(&m), weight: eta, regular }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarize::construct_maximally_real;
    use crate::realforms::catalog;

    fn su2_param(n: i64, d: i64) -> (GroupCatalogEntry, OrbitalParameter) {
        let e = catalog(GroupLabel::Su2).unwrap();
        let lam = e.root_datum.weight_with_simple_pairings(&[GaussQ::frac(n, d)]).unwrap();
        let p = OrbitalParameter::new(&e, 0, lam).unwrap();
        (e, p)
    }

    #[test]
    fn stabilizer_examples() {
        let (e, p) = su2_param(3, 1);
        assert!(stabilizer_levi(&e.root_datum, &p.lambda).is_empty());
        let u2 = catalog(GroupLabel::U2).unwrap();
        let central = Weight::from_ints(&[2, 2]);
        assert_eq!(stabilizer_levi(&u2.root_datum, &central).len(), 2);
        let su3 = catalog(GroupLabel::Su3).unwrap();
        let lam = su3.root_datum.weight_with_simple_pairings(&[GaussQ::int(0), GaussQ::int(4)]).unwrap();
        assert_eq!(stabilizer_levi(&su3.root_datum, &lam), vec![0, 3]);
    }

    #[test]
    fn reality_constraint() {
        let e = catalog(GroupLabel::Sl2R).unwrap();
        let split = e.cartan_index("split").unwrap();
        let real = e.root_datum.weight_with_simple_pairings(&[GaussQ::int(2)]).unwrap();
        assert!(matches!(OrbitalParameter::new(&e, split, real.clone()), Err(OrbitError::NotImaginary { .. })));
        assert!(OrbitalParameter::new(&e, 0, real).is_ok());
        let imag = e.root_datum.weight_with_simple_pairings(&["2i".parse().unwrap()]).unwrap();
        assert!(OrbitalParameter::new(&e, split, imag).is_ok());
    }

    #[test]
    fn decomposition_examples() {
        let (e, p) = su2_param(3, 1);
        let (lc, ln) = decompose_lambda(&e, &p);
        assert_eq!(lc, p.lambda);
        assert!(ln.is_zero());

        let s = catalog(GroupLabel::Sl2R).unwrap();
        let split = s.cartan_index("split").unwrap();
        let lam = s.root_datum.weight_with_simple_pairings(&["2i".parse().unwrap()]).unwrap();
        let p = OrbitalParameter::new(&s, split, lam.clone()).unwrap();
        let (lc, ln) = decompose_lambda(&s, &p);
        assert!(lc.is_zero());
        assert_eq!(ln, lam);

        // sl2C as a real group: both parts survive, and they are recovered exactly
        let c = catalog(GroupLabel::Sl2CAsReal).unwrap();
        let lam = Weight::new(vec!["1+i".parse().unwrap(), "-1+i".parse().unwrap()]);
        let p = OrbitalParameter::new(&c, 0, lam.clone()).unwrap();
        let (lc, ln) = decompose_lambda(&c, &p);
        assert!(!lc.is_zero() && !ln.is_zero());
        // oracle: θ swaps the two factors with a sign, (a, b) ↦ (−b, −a)
        let oracle_c = Weight::new(vec!["1".parse().unwrap(), "-1".parse().unwrap()]);
        let oracle_n = Weight::new(vec!["i".parse().unwrap(), "i".parse().unwrap()]);
        assert_eq!((lc.clone(), ln), (oracle_c, oracle_n));
        let p2 = OrbitalParameter::new(&c, 0, lc.clone()).unwrap();
        let (lc2, ln2) = decompose_lambda(&c, &p2);
        assert_eq!(lc2, lc);
        assert!(ln2.is_zero());
    }

    #[test]
    fn good_range_examples() {
        let (e, p) = su2_param(3, 1);
        let pol = construct_maximally_real(&e, &p).unwrap();
        let r = good_range_check(&e, &p, &pol);
        assert!(r.verdict);
        assert_eq!(r.margins, vec![(0, Rational64::from_integer(3))]);

        // Δ(n) = {α} but λ(α∨) = −1
        let (e, p) = su2_param(-1, 1);
        let mut pol = construct_maximally_real(&e, &p).unwrap();
        pol.nilradical_roots = vec![0];
        assert!(!good_range_check(&e, &p, &pol).verdict);

        let u2 = catalog(GroupLabel::U2).unwrap();
        let p = OrbitalParameter::new(&u2, 0, Weight::from_ints(&[1, 1])).unwrap();
        let pol = construct_maximally_real(&u2, &p).unwrap();
        let r = good_range_check(&u2, &p, &pol);
        assert!(r.verdict && r.margins.is_empty());
    }

    #[test]
    fn integrality_examples() {
        let (e, mut p) = su2_param(3, 1);
        let pol = construct_maximally_real(&e, &p).unwrap();
        assert!(integrality_check(&e, &mut p, &pol));
        assert!(p.gamma_lift);
        let (e, mut p) = su2_param(5, 2);
        let pol = construct_maximally_real(&e, &p).unwrap();
        assert!(!integrality_check(&e, &mut p, &pol));
        assert!(!p.gamma_lift);

        let t = catalog(GroupLabel::TorusU1).unwrap();
        let mut p = OrbitalParameter::new(&t, 0, Weight::from_ints(&[4])).unwrap();
        let pol = construct_maximally_real(&t, &p).unwrap();
        assert!(integrality_check(&t, &mut p, &pol));
    }

    #[test]
    fn infinitesimal_character_examples() {
        let (e, p) = su2_param(3, 1);
        let pol = construct_maximally_real(&e, &p).unwrap();
        let ic = infinitesimal_character(&e, &p, &pol);
        assert_eq!(ic.weight, p.lambda);
        assert!(ic.regular);

        let u2 = catalog(GroupLabel::U2).unwrap();
        let p = OrbitalParameter::new(&u2, 0, Weight::from_ints(&[1, 1])).unwrap();
        let pol = construct_maximally_real(&u2, &p).unwrap();
        assert!(infinitesimal_character(&u2, &p, &pol).regular);

        let (e, p) = su2_param(0, 1);
        let pol = construct_maximally_real(&e, &p).unwrap();
        // λ = 0 on su2 gives q = g and ρ_l = ρ; force ρ_l = 0 to exhibit the singular case
        let mut pol0 = pol.clone();
        pol0.rho_l = Weight::zero(1);
        assert!(!infinitesimal_character(&e, &p, &pol0).regular);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn weyl_conjugates_share_good_range_and_integrality(a in -6i64..=6, b in -6i64..=6, da in 1i64..=2, db in 1i64..=2) {
            let e = catalog(GroupLabel::Su3).unwrap();
            let lam = e.root_datum.weight_with_simple_pairings(&[GaussQ::frac(a, da), GaussQ::frac(b, db)]).unwrap();
            let verdicts: Vec<(bool, bool, Vec<Rational64>)> = e
                .root_datum
                .weyl_group()
                .iter()
                .map(|w| {
                    let mut p = OrbitalParameter::new(&e, 0, w.act(&lam)).unwrap();
                    let pol = construct_maximally_real(&e, &p).unwrap();
                    let good = good_range_check(&e, &p, &pol);
                    let mut margins: Vec<Rational64> = good.margins.iter().map(|m| m.1).collect();
                    margins.sort();
                    (good.verdict, integrality_check(&e, &mut p, &pol), margins)
                })
                .collect();
            for v in &verdicts[1..] {
                prop_assert_eq!(v, &verdicts[0]);
            }
        }
    }
}
