//! Existence of the exponential functional for a few (X, Y) pairs.

use exlevy::existence::existence_verdict;
use exlevy::levy::ProcessSpec;

fn main() {
    let xs = [
        ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.5 },
        ProcessSpec::BrownianDrift { sigma: 1.0, mu: -0.5 },
        ProcessSpec::Poisson { rate: 1.0 },
        ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.0 },
    ];
    let ys = [ProcessSpec::SymmetricStable { alpha: 1.5, scale: 1.0 }, ProcessSpec::Poisson { rate: 1.0 }, ProcessSpec::zero()];
    for x in &xs {
        for y in &ys {
            let v = existence_verdict(x, y).unwrap();
            println!("X={:?}\n  Y={:?}\n  -> {:?} (drift {:?}, integral {:?})", x, y, v.verdict, v.drifts_to_infinity, v.log_integral_value);
        }
    }
}
