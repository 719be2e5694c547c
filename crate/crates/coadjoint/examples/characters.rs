//! Invariant eigendistributions evaluated pointwise and paired with Gaussian densities.
//!
//! cargo run --example characters

use coadjoint::characters::{compact_character, pair_suite, sl2r_discrete_series, GaussianDensity, PairingSpec};
use coadjoint::matrix::c;
use coadjoint::realforms::{catalog, GroupLabel};
use coadjoint::rootdata::GaussQ;

fn main() {
    let su2 = catalog(GroupLabel::Su2).unwrap();
    // ⟨λ, α∨⟩ = 2: the 3-dimensional representation
    let hw = su2.root_datum.weight_with_simple_pairings(&[GaussQ::int(2)]).unwrap();
    let theta = compact_character(&su2, &hw).unwrap();
    for t in [0.0, 0.5, 1.0] {
        let x = su2.from_coords(&[0.0, 0.0, t]);
        println!("su2 θ(exp X) at |X| = {t}: {:.6}", theta.evaluate(&su2, &x).unwrap());
    }
    let mus = GaussianDensity::suite(su2.dim(), 3, 1, 1.0, (0.5, 1.0));
    for (k, p) in pair_suite(&su2, &theta, &mus, &PairingSpec::default()).unwrap().iter().enumerate() {
        println!("  ⟨θ, μ{k}⟩ = {:.10} ± {:.1e} via {:?}", p.estimate.value, p.estimate.error, p.route);
    }

    let sl2r = catalog(GroupLabel::Sl2R).unwrap();
    let ds = sl2r_discrete_series(&sl2r, 2, 1).unwrap();
    let elliptic = coadjoint::matrix::mat(&[&[0.0, 0.7], &[-0.7, 0.0]], c(1.0, 0.0));
    let hyperbolic = coadjoint::matrix::mat(&[&[0.7, 0.0], &[0.0, -0.7]], c(1.0, 0.0));
    println!("sl2R holomorphic discrete series, k = 2");
    println!("  elliptic   {:.6}", ds.evaluate(&sl2r, &elliptic).unwrap());
    println!("  hyperbolic {:.6}", ds.evaluate(&sl2r, &hyperbolic).unwrap());
    let mus = GaussianDensity::suite(sl2r.dim(), 2, 1, 1.0, (0.5, 1.0));
    for (k, p) in pair_suite(&sl2r, &ds, &mus, &PairingSpec::default()).unwrap().iter().enumerate() {
        println!("  ⟨θ, μ{k}⟩ = {:.10} ± {:.1e} via {:?}", p.estimate.value, p.estimate.error, p.route);
    }
}
