//! Polarizations q_λ = l ⊕ n of a semisimple orbit, their classification, and
//! the parabolic-induction scaffold built from the maximally real one.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::matrix::{expm, dist, CMat, I};
use crate::orbits::{decompose_lambda, positive_part, rho_levi, stabilizer_levi, OrbitalParameter};
use crate::realforms::{GroupCatalogEntry, RootKind};
use crate::rootdata::{GaussQ, RootDatum, Weight};

const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PolarizeError {
    #[error("root {0} lies outside the Levi but pairs to zero with λ")]
    Tie(usize),
    #[error("constructed polarization fails {0}")]
    Internal(&'static str),
    #[error("the induction scaffold needs a maximally real admissible polarization")]
    NotMaximallyReal,
    #[error("polarization index {index} out of range ({count} available)")]
    Index { index: usize, count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolarizationFlags {
    pub admissible: bool,
    pub maximally_real: bool,
    pub theta_stable: bool,
    pub sigma_stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Polarization {
    pub levi_roots: Vec<usize>,
    pub nilradical_roots: Vec<usize>,
    pub flags: PolarizationFlags,
    pub rho_n: Weight,
    pub rho_l: Weight,
    /// dim(n ∩ k).
    pub s: usize,
    /// Complex dimension of the Levi flag variety, |Δ⁺(l)|.
    pub l: usize,
    /// dim_C(σ(q) ∩ q).
    pub sigma_intersection_dim: usize,
}

/// ⟨λ, α∨⟩ ∈ R_{>0}.
fn real_positive(datum: &RootDatum, lambda: &Weight, a: usize) -> bool {
    datum.pair_root(lambda, a).is_real_positive()
}

/// Im > 0, or Im = 0 and Re > 0.
fn canonical_positive(z: GaussQ) -> bool {
    z.im.is_positive() || (z.im.is_zero() && z.re.is_positive())
}

fn is_stable(perm: &[usize], set: &[usize]) -> bool {
    let s: BTreeSet<usize> = set.iter().copied().collect();
    set.iter().all(|a| s.contains(&perm[*a]))
}

/// dim h + #{α ∈ Δ(l) ∪ Δ(n) : σα ∈ Δ(l) ∪ Δ(n)}.
pub fn sigma_intersection_dim(entry: &GroupCatalogEntry, param: &OrbitalParameter, levi: &[usize], nil: &[usize]) -> usize {
    let h = param.cartan_data(entry);
    let q: BTreeSet<usize> = levi.iter().chain(nil).copied().collect();
    entry.root_datum.dim + q.iter().filter(|a| q.contains(&h.sigma_perm[**a])).count()
}

/// Admissibility: ⟨λ, α∨⟩ ∈ R_{>0} forces α ∈ Δ(n).
pub fn is_admissible(datum: &RootDatum, lambda: &Weight, nil: &[usize]) -> bool {
    (0..datum.n_roots()).all(|a| !real_positive(datum, lambda, a) || nil.contains(&a))
}

/// Maximal-reality criterion: α ∈ Δ(n) forces σα ∈ Δ(n) or ⟨λ, α∨⟩ ∈ R_{>0}.
pub fn criterion(entry: &GroupCatalogEntry, param: &OrbitalParameter, nil: &[usize]) -> bool {
    let h = param.cartan_data(entry);
    nil.iter()
        .all(|&a| nil.contains(&h.sigma_perm[a]) || real_positive(&entry.root_datum, &param.lambda, a))
}

fn numeric_rank(vectors: &[CMat]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let len = vectors[0].len();
    let m = DMatrix::<Complex64>::from_fn(len, vectors.len(), |i, j| vectors[j][i]);
    let sv = m.svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&x| x > RANK_TOL * top.max(1.0)).count()
}

/// dim(n ∩ k_C), from the matrix model.
fn n_cap_k(entry: &GroupCatalogEntry, param: &OrbitalParameter, nil: &[usize]) -> usize {
    let h = param.cartan_data(entry);
    let n: Vec<CMat> = nil.iter().map(|&a| h.root_vectors[a].clone()).collect();
    let k: Vec<CMat> = entry.real_basis.iter().map(|x| (x + entry.theta(x)) * Complex64::new(0.5, 0.0)).collect();
    let k_dim = numeric_rank(&k);
    let both: Vec<CMat> = n.iter().chain(&k).cloned().collect();
    n.len() + k_dim - numeric_rank(&both)
}

fn assemble(
    entry: &GroupCatalogEntry,
    param: &OrbitalParameter,
    levi: &[usize],
    nil: Vec<usize>,
    max_dim: Option<usize>,
) -> Polarization {
    let datum = &entry.root_datum;
    let h = param.cartan_data(entry);
    let q: Vec<usize> = levi.iter().chain(&nil).copied().collect();
    let admissible = is_admissible(datum, &param.lambda, &nil);
    let dim = sigma_intersection_dim(entry, param, levi, &nil);
    Polarization {
        levi_roots: levi.to_vec(),
        flags: PolarizationFlags {
            admissible,
            maximally_real: admissible && max_dim == Some(dim),
            theta_stable: is_stable(&h.theta_perm, &q),
            sigma_stable: is_stable(&h.sigma_perm, &q),
        },
        rho_n: datum.half_sum(&nil),
        rho_l: rho_levi(datum, levi),
        s: n_cap_k(entry, param, &nil),
        l: positive_part(datum, levi).len(),
        sigma_intersection_dim: dim,
        nilradical_roots: nil,
    }
}

/// Root sets Δ(n) with Δ(l) ⊔ Δ(n) ⊔ −Δ(n) = Δ and Δ(l) ∪ Δ(n) closed, by brute force over subsets.
fn nilradical_candidates(datum: &RootDatum, levi: &[usize]) -> Vec<Vec<usize>> {
    let outside: Vec<usize> = (0..datum.n_roots()).filter(|a| !levi.contains(a)).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << outside.len()) {
        let nil: Vec<usize> = outside.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a).collect();
        let partitions = outside.iter().all(|&a| nil.contains(&a) != nil.contains(&datum.neg_index(a)));
        if !partitions {
            continue;
        }
        let q: Vec<usize> = levi.iter().chain(&nil).copied().collect();
        if datum.is_closed_root_subset(&q) {
            out.push(nil);
        }
    }
    out
}

/// All polarizations with Levi g(λ), with flags. The maximally real flag compares
/// dim(σ(q) ∩ q) against the maximum over the admissible ones.
pub fn enumerate_polarizations(entry: &GroupCatalogEntry, param: &OrbitalParameter) -> Vec<Polarization> {
    let datum = &entry.root_datum;
    let levi = stabilizer_levi(datum, &param.lambda);
    let candidates = nilradical_candidates(datum, &levi);
    let max_dim = candidates
        .iter()
        .filter(|n| is_admissible(datum, &param.lambda, n))
        .map(|n| sigma_intersection_dim(entry, param, &levi, n))
        .max();
    candidates.into_iter().map(|n| assemble(entry, param, &levi, n, max_dim)).collect()
}

/// Δ(n) = {α : Im⟨λ, α∨⟩ > 0, or Im = 0 and Re > 0}.
pub fn construct_maximally_real(entry: &GroupCatalogEntry, param: &OrbitalParameter) -> Result<Polarization, PolarizeError> {
    let datum = &entry.root_datum;
    let levi = stabilizer_levi(datum, &param.lambda);
    let mut nil = Vec::new();
    for a in (0..datum.n_roots()).filter(|a| !levi.contains(a)) {
        let z = datum.pair_root(&param.lambda, a);
        if z.is_zero() {
            return Err(PolarizeError::Tie(a));
        }
        if canonical_positive(z) {
            nil.push(a);
        }
    }
    let max_dim = enumerate_polarizations(entry, param)
        .iter()
        .filter(|p| p.flags.admissible)
        .map(|p| p.sigma_intersection_dim)
        .max();
    let pol = assemble(entry, param, &levi, nil, max_dim);
    if !pol.flags.admissible {
        return Err(PolarizeError::Internal("admissibility"));
    }
    if !pol.flags.maximally_real {
        return Err(PolarizeError::Internal("maximality of dim(σq ∩ q)"));
    }
    if !criterion(entry, param, &pol.nilradical_roots) {
        return Err(PolarizeError::Internal("the maximal-reality criterion"));
    }
    Ok(pol)
}

/// Selects a polarization by index into `enumerate_polarizations`.
pub fn polarization_by_index(entry: &GroupCatalogEntry, param: &OrbitalParameter, index: usize) -> Result<Polarization, PolarizeError> {
    let all = enumerate_polarizations(entry, param);
    let count = all.len();
    all.into_iter().nth(index).ok_or(PolarizeError::Index { index, count })
}

/// Δ(n_m): roots of m positive for λc under the canonical rule.
pub fn n_m_roots(datum: &RootDatum, lambda_c: &Weight, m_roots: &[usize]) -> Vec<usize> {
    m_roots
        .iter()
        .copied()
        .filter(|&a| canonical_positive(datum.pair_root(lambda_c, a)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct InductionScaffold {
    pub lambda_c: Weight,
    pub lambda_n: Weight,
    pub n_p_roots: Vec<usize>,
    /// Δ(g(λn)) ∪ Δ(n_p).
    pub p_roots: Vec<usize>,
    /// Δ(m) = Δ(g(λn)).
    pub m_roots: Vec<usize>,
    /// Number of connected components of M_R.
    pub m_components: usize,
    pub a_dim: usize,
    pub l_cap_m_roots: Vec<usize>,
    pub n_m_roots: Vec<usize>,
    pub rho_n_m: Weight,
    pub rho_n_p: Weight,
    /// The elliptic parameter on M: λc on the same Cartan.
    pub transferred_lambda: Weight,
    /// Sign in front of the transferred character. The catalog characters already
    /// carry the component sign of M_R, so this is always +1.
    pub transfer_sign: i8,
}

/// Components of M_R generated by m_α = exp(πi α∨) over real roots α outside m.
fn m_component_count(entry: &GroupCatalogEntry, param: &OrbitalParameter, m_roots: &[usize]) -> usize {
    let datum = &entry.root_datum;
    let h = param.cartan_data(entry);
    let n = entry.matrix_dim;
    let mut elems = vec![CMat::identity(n, n)];
    for a in 0..datum.n_positive {
        if h.root_classification[a] != RootKind::Real || m_roots.contains(&a) {
            continue;
        }
        let w = h.weight_matrix(datum, &datum.root_weight(a));
        let coroot = &w * (Complex64::new(2.0, 0.0) / crate::matrix::trace_form(&w, &w));
        let g = expm(&(coroot * (I * std::f64::consts::PI)));
        // close up under multiplication; the generators commute and square to 1
        let products: Vec<CMat> = elems.iter().map(|e| e * &g).collect();
        for p in products {
            if elems.iter().all(|e| dist(e, &p) > 1e-8) {
                elems.push(p);
            }
        }
    }
    elems.len()
}

/// Dimension of the split center: vectors in h^{−θ} annihilated by Δ(m).
fn split_center_dim(entry: &GroupCatalogEntry, param: &OrbitalParameter, m_roots: &[usize]) -> usize {
    let datum = &entry.root_datum;
    let h = param.cartan_data(entry);
    let cols = h.theta_minus.len();
    if m_roots.is_empty() || cols == 0 {
        return cols;
    }
    let rows: Vec<CMat> = m_roots
        .iter()
        .map(|&a| {
            CMat::from_fn(1, cols, |_, k| h.weight_on_real_basis(datum, &datum.root_weight(a), h.theta_minus[k]).to_c64())
        })
        .collect();
    cols - numeric_rank(&rows)
}

pub fn build_induction_scaffold(
    entry: &GroupCatalogEntry,
    param: &OrbitalParameter,
    pol: &Polarization,
) -> Result<InductionScaffold, PolarizeError> {
    if !(pol.flags.admissible && pol.flags.maximally_real) {
        return Err(PolarizeError::NotMaximallyReal);
    }
    let datum = &entry.root_datum;
    let h = param.cartan_data(entry);
    let (lc, ln) = decompose_lambda(entry, param);
    let m_roots = stabilizer_levi(datum, &ln);
    let n_p: Vec<usize> = pol.nilradical_roots.iter().copied().filter(|a| !m_roots.contains(a)).collect();
    let n_m: Vec<usize> = pol.nilradical_roots.iter().copied().filter(|a| m_roots.contains(a)).collect();
    let mut p_roots: Vec<usize> = m_roots.iter().chain(&n_p).copied().collect();
    p_roots.sort_unstable();
    if !datum.is_closed_root_subset(&p_roots) {
        return Err(PolarizeError::Internal("closure of p"));
    }
    if !is_stable(&h.sigma_perm, &n_p) {
        return Err(PolarizeError::Internal("σ-stability of n_p"));
    }
    let mut rule = n_m_roots(datum, &lc, &m_roots);
    rule.retain(|a| !pol.levi_roots.contains(a));
    if rule.iter().collect::<BTreeSet<_>>() != n_m.iter().collect::<BTreeSet<_>>() {
        return Err(PolarizeError::Internal("agreement of Δ(n_m) with λc"));
    }
    let l_cap_m: Vec<usize> = pol.levi_roots.iter().copied().filter(|a| m_roots.contains(a)).collect();
    Ok(InductionScaffold {
        m_components: m_component_count(entry, param, &m_roots),
        a_dim: split_center_dim(entry, param, &m_roots),
        rho_n_m: datum.half_sum(&n_m),
        rho_n_p: datum.half_sum(&n_p),
        transferred_lambda: lc.clone(),
        transfer_sign: 1,
        lambda_c: lc,
        lambda_n: ln,
        n_p_roots: n_p,
        p_roots,
        m_roots,
        l_cap_m_roots: l_cap_m,
        n_m_roots: n_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realforms::{catalog, GroupLabel};
    use proptest::prelude::*;

    fn param(label: GroupLabel, cartan: &str, pairings: &[&str]) -> (GroupCatalogEntry, OrbitalParameter) {
        let e = catalog(label).unwrap();
        let vals: Vec<GaussQ> = pairings.iter().map(|s| s.parse().unwrap()).collect();
        let lam = e.root_datum.weight_with_simple_pairings(&vals).unwrap();
        let k = e.cartan_index(cartan).unwrap();
        let p = OrbitalParameter::new(&e, k, lam).unwrap();
        (e, p)
    }

    /// Numeric dim(σ(q) ∩ q) from the matrix model.
    fn numeric_sigma_dim(e: &GroupCatalogEntry, p: &OrbitalParameter, pol: &Polarization) -> usize {
        let h = p.cartan_data(e);
        let mut q: Vec<CMat> = h.coweights.clone();
        q.extend(pol.levi_roots.iter().chain(&pol.nilradical_roots).map(|&a| h.root_vectors[a].clone()));
        let sq: Vec<CMat> = q.iter().map(|x| e.sigma.apply(x)).collect();
        let both: Vec<CMat> = q.iter().chain(&sq).cloned().collect();
        2 * q.len() - numeric_rank(&both)
    }

    #[test]
    fn su2_regular_has_two() {
        let (e, p) = param(GroupLabel::Su2, "compact", &["3"]);
        let all = enumerate_polarizations(&e, &p);
        let nils: Vec<_> = all.iter().map(|q| q.nilradical_roots.clone()).collect();
        assert_eq!(nils, vec![vec![0], vec![1]]);
        assert!(all[0].flags.admissible && !all[1].flags.admissible);
        let pol = construct_maximally_real(&e, &p).unwrap();
        assert_eq!(pol.nilradical_roots, vec![0]);
        assert_eq!(pol.s, 1);
        assert!(pol.flags.theta_stable);
    }

    #[test]
    fn u2_central_has_one() {
        let e = catalog(GroupLabel::U2).unwrap();
        let p = OrbitalParameter::new(&e, 0, Weight::from_ints(&[2, 2])).unwrap();
        let all = enumerate_polarizations(&e, &p);
        assert_eq!(all.len(), 1);
        assert!(all[0].nilradical_roots.is_empty() && all[0].flags.admissible);
        assert_eq!(all[0].l, 1);
        assert_eq!(all[0].rho_l, e.root_datum.half_sum(&[0]));
    }

    /// Independent oracle: choose one root from each ± pair outside the Levi and
    /// keep the choices that make q closed under addition, checked on the matrix model.
    #[test]
    fn su3_parabolics_with_levi_a1() {
        let (e, p) = param(GroupLabel::Su3, "compact", &["0", "4"]);
        let all = enumerate_polarizations(&e, &p);
        let h = &e.cartans[0];
        let levi = [0usize, 3];
        let pairs = [(1usize, 4usize), (2, 5)];
        let mut oracle = Vec::new();
        for choice in 0..4 {
            let nil: Vec<usize> = pairs.iter().enumerate().map(|(i, &(a, b))| if choice >> i & 1 == 0 { a } else { b }).collect();
            let mut basis: Vec<CMat> = h.coweights.clone();
            basis.extend(levi.iter().chain(&nil).map(|&a| h.root_vectors[a].clone()));
            let r = numeric_rank(&basis);
            let closed = basis.iter().all(|x| {
                basis.iter().all(|y| {
                    let mut b = basis.clone();
                    b.push(crate::matrix::bracket(x, y));
                    numeric_rank(&b) == r
                })
            });
            if closed {
                let mut n = nil.clone();
                n.sort_unstable();
                oracle.push(n);
            }
        }
        let mut got: Vec<_> = all.iter().map(|q| q.nilradical_roots.clone()).collect();
        got.sort();
        oracle.sort();
        assert_eq!(got, oracle);
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn admissibility_examples() {
        let (e, p) = param(GroupLabel::Su2, "compact", &["3"]);
        assert!(is_admissible(&e.root_datum, &p.lambda, &[0]));
        assert!(!is_admissible(&e.root_datum, &p.lambda, &[1]));
        let (e, p) = param(GroupLabel::Sl2R, "split", &["2i"]);
        let all = enumerate_polarizations(&e, &p);
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|q| q.flags.admissible));
    }

    #[test]
    fn sl2r_split_maximally_real() {
        let (e, p) = param(GroupLabel::Sl2R, "split", &["2i"]);
        let pol = construct_maximally_real(&e, &p).unwrap();
        assert_eq!(pol.nilradical_roots, vec![0]);
        assert!(pol.flags.sigma_stable && criterion(&e, &p, &pol.nilradical_roots));
        assert_eq!(pol.sigma_intersection_dim, 2);
        let (e, p) = param(GroupLabel::Sl2R, "split", &["-2i"]);
        assert_eq!(construct_maximally_real(&e, &p).unwrap().nilradical_roots, vec![1]);
    }

    #[test]
    fn sl2r_scaffolds() {
        let (e, p) = param(GroupLabel::Sl2R, "split", &["2i"]);
        let pol = construct_maximally_real(&e, &p).unwrap();
        let sc = build_induction_scaffold(&e, &p, &pol).unwrap();
        assert_eq!(sc.n_p_roots, vec![0]);
        assert!(sc.m_roots.is_empty() && sc.n_m_roots.is_empty());
        assert_eq!(sc.a_dim, 1);
        assert_eq!(sc.m_components, 2);

        let (e, p) = param(GroupLabel::Sl2R, "compact", &["3"]);
        let pol = construct_maximally_real(&e, &p).unwrap();
        let sc = build_induction_scaffold(&e, &p, &pol).unwrap();
        assert!(sc.n_p_roots.is_empty());
        assert_eq!((sc.a_dim, sc.m_components), (0, 1));
        assert_eq!(sc.transferred_lambda, p.lambda);
    }

    #[test]
    fn scaffold_rejects_non_maximal() {
        let (e, p) = param(GroupLabel::Su2, "compact", &["3"]);
        let bad = enumerate_polarizations(&e, &p).remove(1);
        assert!(matches!(build_induction_scaffold(&e, &p, &bad), Err(PolarizeError::NotMaximallyReal)));
    }

    #[test]
    fn sl2c_scaffold() {
        let e = catalog(GroupLabel::Sl2CAsReal).unwrap();
        let lam = Weight::new(vec!["1+i".parse().unwrap(), "-1+i".parse().unwrap()]);
        let p = OrbitalParameter::new(&e, 0, lam).unwrap();
        let pol = construct_maximally_real(&e, &p).unwrap();
        let sc = build_induction_scaffold(&e, &p, &pol).unwrap();
        assert_eq!(sc.n_p_roots.len(), 2);
        assert_eq!((sc.a_dim, sc.m_components), (1, 1));
    }

    fn sample_params() -> Vec<(GroupCatalogEntry, OrbitalParameter)> {
        let mut v = vec![
            param(GroupLabel::Su2, "compact", &["3"]),
            param(GroupLabel::Su2, "compact", &["-1/2"]),
            param(GroupLabel::Sl2R, "compact", &["2"]),
            param(GroupLabel::Sl2R, "split", &["3i"]),
            param(GroupLabel::Su3, "compact", &["0", "4"]),
            param(GroupLabel::Su3, "compact", &["1", "-2"]),
            param(GroupLabel::Su3, "compact", &["0", "0"]),
        ];
        let e = catalog(GroupLabel::Sl2CAsReal).unwrap();
        for lam in [["1+i", "-1+i"], ["2", "-2"], ["i", "i"]] {
            let w = Weight::new(lam.iter().map(|s| s.parse().unwrap()).collect());
            v.push((e.clone(), OrbitalParameter::new(&e, 0, w).unwrap()));
        }
        v
    }

    #[test]
    fn flags_agree_with_criterion_and_matrix_model() {
        for (e, p) in sample_params() {
            let all = enumerate_polarizations(&e, &p);
            for pol in all.iter().filter(|q| q.flags.admissible) {
                assert_eq!(pol.flags.maximally_real, criterion(&e, &p, &pol.nilradical_roots), "{}", e.label);
            }
            for pol in &all {
                assert_eq!(pol.sigma_intersection_dim, numeric_sigma_dim(&e, &p, pol));
                let mut cover: Vec<usize> = pol.levi_roots.clone();
                cover.extend(&pol.nilradical_roots);
                cover.extend(pol.nilradical_roots.iter().map(|&a| e.root_datum.neg_index(a)));
                cover.sort_unstable();
                assert_eq!(cover, (0..e.root_datum.n_roots()).collect::<Vec<_>>());
            }
            let best = construct_maximally_real(&e, &p).unwrap();
            let max = all.iter().filter(|q| q.flags.admissible).map(|q| q.sigma_intersection_dim).max().unwrap();
            assert_eq!(best.sigma_intersection_dim, max);
            let (_, ln) = decompose_lambda(&e, &p);
            if ln.is_zero() {
                assert_eq!(all.iter().filter(|q| q.flags.admissible).count(), 1, "{}", e.label);
            }
            let sc = build_induction_scaffold(&e, &p, &best).unwrap();
            assert_eq!(sc.rho_n_m.clone().coords.len(), best.rho_n.dim());
            assert_eq!(&sc.rho_n_m + &sc.rho_n_p, best.rho_n);
        }
    }

    proptest! {
        #[test]
        fn su3_maximal_reality(a in -4i64..=4, b in -4i64..=4, da in 1i64..=2, db in 1i64..=2) {
            let (e, p) = param(GroupLabel::Su3, "compact", &[&format!("{a}/{da}"), &format!("{b}/{db}")]);
            let all = enumerate_polarizations(&e, &p);
            let admissible: Vec<_> = all.iter().filter(|q| q.flags.admissible).collect();
            prop_assert_eq!(admissible.len(), 1);
            for q in admissible {
                prop_assert_eq!(q.flags.maximally_real, criterion(&e, &p, &q.nilradical_roots));
            }
        }

        #[test]
        fn sl2c_maximal_reality(a in -3i64..=3, b in -3i64..=3) {
            prop_assume!((a, b) != (0, 0));
            let e = catalog(GroupLabel::Sl2CAsReal).unwrap();
            // imaginary on h_R forces the shape (a + ib, −a + ib)
            let w = Weight::new(vec![GaussQ::new(a.into(), b.into()), GaussQ::new((-a).into(), b.into())]);
            let p = OrbitalParameter::new(&e, 0, w).unwrap();
            let all = enumerate_polarizations(&e, &p);
            let best = construct_maximally_real(&e, &p);
            if let Ok(best) = best {
                let max = all.iter().filter(|q| q.flags.admissible).map(|q| q.sigma_intersection_dim).max().unwrap();
                prop_assert_eq!(best.sigma_intersection_dim, max);
            }
            for q in all.iter().filter(|q| q.flags.admissible) {
                prop_assert_eq!(q.flags.maximally_real, criterion(&e, &p, &q.nilradical_roots));
            }
        }
    }
}
