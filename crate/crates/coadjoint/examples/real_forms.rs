//! The group catalog: matrix models, involutions, Cartan subalgebras and root kinds.
//!
//! cargo run --example real_forms

use coadjoint::realforms::{catalog, GroupLabel};

fn main() {
    for label in GroupLabel::ALL {
        let e = catalog(label).expect("catalog entry");
        e.verify().expect("structural invariants hold");
        println!("{label}: {}×{} matrices, dim g_R = {}, root type {}", e.matrix_dim, e.matrix_dim, e.dim(), e.root_datum.label);
        for h in &e.cartans {
            let kinds: Vec<String> = e.root_datum.positive_roots().iter().map(|&a| format!("{:?}", h.root_classification[a])).collect();
            println!(
                "  Cartan `{}`{}: dim h^θ = {}, dim h^-θ = {}, positive roots [{}]",
                h.label,
                if h.is_fundamental { " (fundamental)" } else { "" },
                h.theta_plus.len(),
                h.theta_minus.len(),
                kinds.join(", ")
            );
        }
    }
}
