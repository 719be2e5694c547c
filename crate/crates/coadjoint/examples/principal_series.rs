//! sl2R principal series: the contour built directly and through parabolic induction.
//!
//! cargo run --example principal_series -- 2i

use coadjoint::characters::{character_for_parameter, pair_suite, GaussianDensity, PairingSpec};
use coadjoint::contour::{build_contour, factored_contour, fourier_transform_suite, ContourQuadrature, SigmaCChoice};
use coadjoint::orbits::OrbitalParameter;
use coadjoint::polarize::{build_induction_scaffold, construct_maximally_real};
use coadjoint::realforms::{catalog, GroupLabel};
use coadjoint::rootdata::GaussQ;

fn main() {
    let nu: GaussQ = std::env::args().nth(1).unwrap_or_else(|| "1i".into()).parse().expect("an imaginary pairing such as 2i");
    let e = catalog(GroupLabel::Sl2R).unwrap();
    let lambda = e.root_datum.weight_with_simple_pairings(&[nu]).unwrap();
    let p = OrbitalParameter::new(&e, e.cartan_index("split").unwrap(), lambda).unwrap();
    let pol = construct_maximally_real(&e, &p).unwrap();
    let scaffold = build_induction_scaffold(&e, &p, &pol).unwrap();
    println!("parabolic with Δ(n_p) = {:?}, M_R has {} components, dim a = {}", scaffold.n_p_roots, scaffold.m_components, scaffold.a_dim);

    let direct = build_contour(&e, &p, &pol, &SigmaCChoice::Default).unwrap();
    let factored = factored_contour(&e, &p, &pol, &scaffold, &SigmaCChoice::Default).unwrap();
    let theta = character_for_parameter(&e, &p, &pol).unwrap();
    let mus = GaussianDensity::suite(e.dim(), 3, 4, 1.0, (0.5, 1.0));
    let quad = ContourQuadrature::default();
    let d = fourier_transform_suite(&e, &direct, &mus, &quad).unwrap();
    let f = fourier_transform_suite(&e, &factored, &mus, &quad).unwrap();
    let t = pair_suite(&e, &theta, &mus, &PairingSpec::default()).unwrap();
    for k in 0..mus.len() {
        println!("μ{k}: direct {:.10}  factored {:.10}  induced character {:.10}", d[k].estimate.value, f[k].estimate.value, t[k].estimate.value);
    }
}
