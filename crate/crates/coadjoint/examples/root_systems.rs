//! Exact root data for the supported types, in both coordinate conventions.
//!
//! cargo run --example root_systems

use coadjoint::rootdata::{RootDatum, RootType, Normalization};

fn show(v: &[num_rational::Rational64]) -> String {
    let parts: Vec<String> = v.iter().map(|q| q.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn main() {
    for ty in [RootType::A1, RootType::A1xA1, RootType::A2] {
        for norm in [Normalization::SimpleRoots, Normalization::Epsilon] {
            let d = RootDatum::new(ty, norm);
            println!("{ty} in {norm:?} coordinates: rank {}, dim h = {}", d.rank, d.dim);
            println!("  Cartan matrix {:?}", d.cartan_matrix);
            for a in d.positive_roots() {
                println!("  α{a} = {}  α∨ = {}", show(&d.roots[a]), show(&d.coroots[a]));
            }
            let rho = d.half_sum(&d.positive_roots());
            let rho: Vec<String> = rho.coords.iter().map(|c| c.to_string()).collect();
            println!("  |W| = {}, ρ = ({})", d.weyl_group().len(), rho.join(", "));
        }
    }
}
