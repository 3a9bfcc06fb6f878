//! A generalized Ornstein-Uhlenbeck path and the L-transformation of a
//! pair with common jumps.

use exlevy::gou::{simulate_v, transform_l, CommonJump, Coupling, JointPairSpec};
use exlevy::levy::ProcessSpec;
use exlevy::rng::RngStream;

fn main() {
    let pair = JointPairSpec::independent(
        ProcessSpec::BrownianDrift { sigma: 1.0, mu: 1.0 },
        ProcessSpec::SymmetricStable { alpha: 1.5, scale: 1.0 },
    );
    let path = simulate_v(&pair, 1.0, 5.0, 0.01, &[], &mut RngStream::new(4, 0).rng()).unwrap();
    for t in [0.0, 1.0, 2.0, 3.0, 4.0, 5.0] {
        println!("V({t}) = {:.4}", path.value_at(t).unwrap());
    }
    let l = transform_l(&pair, &path.xi, &path.eta).unwrap();
    println!("independent pair: L == eta is {}", l == path.eta);

    let coupled = JointPairSpec {
        coupling: Coupling::CommonJumps { rate: 2.0, jumps: vec![CommonJump { d_xi: 0.5, d_eta: 1.0, prob: 1.0 }] },
        ..pair
    };
    let path = simulate_v(&coupled, 1.0, 5.0, 0.01, &[], &mut RngStream::new(4, 1).rng()).unwrap();
    let l = transform_l(&coupled, &path.xi, &path.eta).unwrap();
    let last = path.eta.times.len() - 1;
    println!("common jumps: eta(5) = {:.4}, L(5) = {:.4}", path.eta.value_after(last), l.value_after(last));
}
