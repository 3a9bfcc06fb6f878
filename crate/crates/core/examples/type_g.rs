//! Three routes to the same type G law: normal variance mixture,
//! subordinated Brownian motion and the pathwise functional.

use exlevy::distcheck::ks_two_sample;
use exlevy::exfunc::{sample_set, SamplerConfig};
use exlevy::levy::ProcessSpec;
use exlevy::rng::RngStream;

fn main() {
    let (alpha, lambda, c) = (1.5, 1.0, 1.0);
    let n = 10_000;
    let mix = sample_set(&SamplerConfig::TypeGMixture { alpha, lambda, c }, n, RngStream::new(3, 0)).unwrap();
    let sub = sample_set(&SamplerConfig::TypeGSubordinated { alpha, lambda, c }, n, RngStream::new(3, 1)).unwrap();
    let eul = SamplerConfig::Euler {
        x: ProcessSpec::BrownianDrift { sigma: 1.0, mu: lambda },
        y: ProcessSpec::SymmetricStable { alpha, scale: c },
        euler: Default::default(),
    };
    let eul = sample_set(&eul, n, RngStream::new(3, 2)).unwrap();
    for (label, a, b) in [("mixture/subordinated", &mix, &sub), ("mixture/pathwise", &mix, &eul), ("subordinated/pathwise", &sub, &eul)] {
        let r = ks_two_sample(a, b, 0.01);
        println!("{label:>22}: D = {:.4} (threshold {:.4}) {:?}", r.statistic, r.threshold, r.verdict);
    }
}
