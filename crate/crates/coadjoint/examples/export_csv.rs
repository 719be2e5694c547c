//! Quadrature nodes of a contour, with KKS Pfaffians and integrand values, as CSV on stdout.
//!
//! cargo run --example export_csv > nodes.csv

use coadjoint::characters::GaussianDensity;
use coadjoint::contour::{build_contour, discretize, ContourQuadrature, Resolution, SigmaCChoice};
use coadjoint::orbits::OrbitalParameter;
use coadjoint::polarize::construct_maximally_real;
use coadjoint::realforms::{catalog, GroupLabel};
use coadjoint::rootdata::GaussQ;

fn main() {
    let e = catalog(GroupLabel::Sl2R).unwrap();
    let lambda = e.root_datum.weight_with_simple_pairings(&[GaussQ::int(1)]).unwrap();
    let p = OrbitalParameter::new(&e, e.cartan_index("compact").unwrap(), lambda).unwrap();
    let pol = construct_maximally_real(&e, &p).unwrap();
    let contour = build_contour(&e, &p, &pol, &SigmaCChoice::Default).unwrap();
    let mu = GaussianDensity::new(vec![0.2, -0.1, 0.3], 0.7).unwrap();
    let quad = ContourQuadrature { order: 8, ..Default::default() };
    let disc = discretize(&e, &contour, &Resolution::of(std::slice::from_ref(&mu)), &quad).unwrap();
    eprintln!("{} nodes within radius {:.2}", disc.fine.len(), disc.radius);
    coadjoint::contour::write_nodes_csv(&e, &disc, &mu, std::io::stdout().lock()).unwrap();
}
