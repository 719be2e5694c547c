//! Orbital parameters on su3: good range, integrality and infinitesimal character.
//!
//! cargo run --example orbital_parameters

use coadjoint::orbits::{good_range_check, infinitesimal_character, integrality_check, OrbitalParameter};
use coadjoint::polarize::construct_maximally_real;
use coadjoint::realforms::{catalog, GroupLabel};
use coadjoint::rootdata::GaussQ;

fn main() {
    let e = catalog(GroupLabel::Su3).unwrap();
    let h = e.cartan_index("compact").unwrap();
    for pairings in [["1", "1"], ["0", "5/2"], ["0", "1/2"], ["0", "3"], ["2", "-1"]] {
        let v: Vec<GaussQ> = pairings.iter().map(|s| s.parse().unwrap()).collect();
        let lambda = e.root_datum.weight_with_simple_pairings(&v).unwrap();
        let mut p = OrbitalParameter::new(&e, h, lambda).unwrap();
        let pol = construct_maximally_real(&e, &p).unwrap();
        let good = good_range_check(&e, &p, &pol);
        let integral = integrality_check(&e, &mut p, &pol);
        let chi = infinitesimal_character(&e, &p, &pol);
        let margins: Vec<String> = good.margins.iter().map(|(a, m)| format!("α{a}:{m}")).collect();
        println!(
            "⟨λ, α∨⟩ = ({}, {}): Levi roots {:?}, good range {} [{}], Γ lifts {}, η regular {}",
            pairings[0],
            pairings[1],
            pol.levi_roots,
            good.verdict,
            margins.join(" "),
            integral,
            chi.regular
        );
    }
}
