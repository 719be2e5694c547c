//! Every polarization of a few orbits, with the flags that single out the maximally real one.
//!
//! cargo run --example polarizations

use coadjoint::orbits::OrbitalParameter;
use coadjoint::polarize::{construct_maximally_real, enumerate_polarizations};
use coadjoint::realforms::{catalog, GroupLabel};
use coadjoint::rootdata::GaussQ;

fn main() {
    let cases = [
        (GroupLabel::Sl2R, "compact", vec!["2"]),
        (GroupLabel::Sl2R, "split", vec!["2i"]),
        (GroupLabel::Su3, "compact", vec!["0", "5/2"]),
        (GroupLabel::Sl2CAsReal, "fundamental", vec!["1+1i", "-1+1i"]),
        (GroupLabel::Sl2CAsReal, "fundamental", vec!["1", "-1"]),
    ];
    for (label, cartan, pairings) in cases {
        let e = catalog(label).unwrap();
        let v: Vec<GaussQ> = pairings.iter().map(|s| s.parse().unwrap()).collect();
        let lambda = e.root_datum.weight_with_simple_pairings(&v).unwrap();
        let Ok(p) = OrbitalParameter::new(&e, e.cartan_index(cartan).unwrap(), lambda) else {
            println!("{label} {cartan} {pairings:?}: not an imaginary parameter on this Cartan");
            continue;
        };
        println!("{label} on `{cartan}`, ⟨λ, α∨⟩ = {pairings:?}");
        for (i, pol) in enumerate_polarizations(&e, &p).iter().enumerate() {
            println!(
                "  #{i}: n = {:?}  admissible {}  maximally real {}  θ-stable {}  σ-stable {}  dim σ(q)∩q = {}",
                pol.nilradical_roots, pol.flags.admissible, pol.flags.maximally_real, pol.flags.theta_stable, pol.flags.sigma_stable, pol.sigma_intersection_dim
            );
        }
        match construct_maximally_real(&e, &p) {
            Ok(pol) => println!("  canonical choice: n = {:?}", pol.nilradical_roots),
            Err(err) => println!("  no canonical choice: {err}"),
        }
    }
}
