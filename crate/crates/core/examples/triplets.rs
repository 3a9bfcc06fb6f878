//! Lévy triplets, tail masses and exact characteristic functions.

use exlevy::existence::h_x;
use exlevy::levy::{cf_exact, triplet_of, ProcessSpec};

fn main() {
    let specs = [
        ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.5 },
        ProcessSpec::Poisson { rate: 2.0 },
        ProcessSpec::SymmetricStable { alpha: 1.5, scale: 1.0 },
        ProcessSpec::GammaSubordinator { shape: 1.0, rate: 2.0 },
        ProcessSpec::PositiveStable { beta: 0.5, scale: 1.0 },
    ];
    for spec in &specs {
        let t = triplet_of(spec);
        println!("{}", spec.family_name());
        println!("  gauss_var {:.4}  drift {:.4}  tail(1) {:.4}", t.gauss_var, t.drift_gamma, t.levy_measure.tail_mass(1.0));
        println!("  h_X(e) {:.4}", h_x(spec, std::f64::consts::E).unwrap());
        for z in [0.5, 1.0, 2.0] {
            let phi = cf_exact(spec, z, 1.0);
            println!("  E e^(i{z} X_1) = {:.5} {:+.5}i", phi.re, phi.im);
        }
    }
}
