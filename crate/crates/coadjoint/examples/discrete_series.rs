//! sl2R discrete series: the deformed elliptic orbit, its tempered growth, and the character identity.
//!
//! cargo run --example discrete_series -- -2

use coadjoint::characters::{character_for_parameter, pair_suite, GaussianDensity, PairingSpec};
use coadjoint::contour::{build_contour, check_rossmann_admissibility, fourier_transform_suite, ContourQuadrature, SigmaCChoice};
use coadjoint::orbits::OrbitalParameter;
use coadjoint::polarize::construct_maximally_real;
use coadjoint::realforms::{catalog, GroupLabel};
use coadjoint::rootdata::GaussQ;

fn main() {
    let n: GaussQ = std::env::args().nth(1).unwrap_or_else(|| "1".into()).parse().expect("a nonzero integer");
    let e = catalog(GroupLabel::Sl2R).unwrap();
    let lambda = e.root_datum.weight_with_simple_pairings(&[n]).unwrap();
    let p = OrbitalParameter::new(&e, e.cartan_index("compact").unwrap(), lambda).unwrap();
    let pol = construct_maximally_real(&e, &p).unwrap();
    let contour = build_contour(&e, &p, &pol, &SigmaCChoice::Default).unwrap();
    let quad = ContourQuadrature::default();

    let r = check_rossmann_admissibility(&e, &contour, &quad).unwrap();
    println!("max |Re ξ| = {:.1e} (recorded {:.1e}), volume growth exponent {:?}", r.max_real_part, r.recorded_bound, r.growth_exponent);

    let theta = character_for_parameter(&e, &p, &pol).unwrap();
    let mus = GaussianDensity::suite(e.dim(), 4, 2, 1.0, (0.5, 1.0));
    let lhs = fourier_transform_suite(&e, &contour, &mus, &quad).unwrap();
    let rhs = pair_suite(&e, &theta, &mus, &PairingSpec::default()).unwrap();
    for (k, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
        println!(
            "μ{k}: contour {:.10} ± {:.1e} (tail {:.1e})   character {:.10} ± {:.1e}",
            l.estimate.value, l.estimate.error, l.tail_bound, r.estimate.value, r.estimate.error
        );
    }
}
