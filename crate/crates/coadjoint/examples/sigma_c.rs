//! Rebuilding a contour with a conjugated compact real form leaves its Fourier transform unchanged.
//!
//! cargo run --example sigma_c

use coadjoint::characters::GaussianDensity;
use coadjoint::contour::{build_contour, fourier_transform_suite, ContourQuadrature, SigmaCChoice};
use coadjoint::orbits::OrbitalParameter;
use coadjoint::polarize::construct_maximally_real;
use coadjoint::realforms::{catalog, GroupLabel};
use coadjoint::rootdata::GaussQ;

fn main() {
    let e = catalog(GroupLabel::Sl2R).unwrap();
    let lambda = e.root_datum.weight_with_simple_pairings(&[GaussQ::int(2)]).unwrap();
    let p = OrbitalParameter::new(&e, e.cartan_index("compact").unwrap(), lambda).unwrap();
    let pol = construct_maximally_real(&e, &p).unwrap();
    let mus = GaussianDensity::suite(e.dim(), 3, 1, 1.0, (0.5, 1.0));
    let quad = ContourQuadrature::default();
    let base = build_contour(&e, &p, &pol, &SigmaCChoice::Default).unwrap();
    let base = fourier_transform_suite(&e, &base, &mus, &quad).unwrap();
    // σc conjugated by exp of an element of g_R, given in orthonormal coordinates
    for element in [vec![0.2, 0.3, -0.1], vec![-0.5, 0.1, 0.4]] {
        let choice = SigmaCChoice::ConjugatedBy { element: element.clone() };
        let moved = build_contour(&e, &p, &pol, &choice).unwrap();
        let moved = fourier_transform_suite(&e, &moved, &mus, &quad).unwrap();
        let worst = base.iter().zip(&moved).map(|(a, b)| (a.estimate.value - b.estimate.value).norm()).fold(0.0, f64::max);
        println!("conjugator exp({element:?}): max |Δ| = {worst:.1e}");
    }
}
