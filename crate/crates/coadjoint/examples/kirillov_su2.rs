//! The su2 orbit through λ as a contour: its Fourier transform against the character, density by density.
//!
//! cargo run --example kirillov_su2 -- 3

use coadjoint::characters::{character_for_parameter, pair_suite, GaussianDensity, PairingSpec};
use coadjoint::contour::{build_contour, fourier_transform_suite, ContourQuadrature, SigmaCChoice};
use coadjoint::orbits::OrbitalParameter;
use coadjoint::polarize::construct_maximally_real;
use coadjoint::realforms::{catalog, GroupLabel};
use coadjoint::rootdata::GaussQ;

fn main() {
    let n: GaussQ = std::env::args().nth(1).unwrap_or_else(|| "3".into()).parse().expect("a pairing such as 3");
    let e = catalog(GroupLabel::Su2).unwrap();
    let lambda = e.root_datum.weight_with_simple_pairings(&[n]).unwrap();
    let p = OrbitalParameter::new(&e, e.fundamental_cartan(), lambda).unwrap();
    let pol = construct_maximally_real(&e, &p).unwrap();
    let contour = build_contour(&e, &p, &pol, &SigmaCChoice::Default).unwrap();
    let theta = character_for_parameter(&e, &p, &pol).unwrap();
    println!("contour of real dimension {}, compact: {}", contour.total_dim, contour.is_compact());

    let mus = GaussianDensity::suite(e.dim(), 5, 1, 1.0, (0.5, 1.0));
    let lhs = fourier_transform_suite(&e, &contour, &mus, &ContourQuadrature::default()).unwrap();
    let rhs = pair_suite(&e, &theta, &mus, &PairingSpec::default()).unwrap();
    for (k, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
        let rel = (l.estimate.value - r.estimate.value).norm() / r.estimate.value.norm();
        println!("μ{k}: ∫_C F[μ] = {:.12}   ⟨θ, μ⟩ = {:.12}   rel {rel:.1e}", l.estimate.value, r.estimate.value);
    }
}
