//! Pathwise draws of ∫e^{-(W_s + bs)}ds against the reciprocal-gamma law.

use exlevy::distcheck::ks_two_sample;
use exlevy::exfunc::{sample_set, SamplerConfig};
use exlevy::levy::ProcessSpec;
use exlevy::rng::RngStream;

fn main() {
    let n = 20_000;
    let pathwise = SamplerConfig::Euler {
        x: ProcessSpec::BrownianDrift { sigma: 1.0, mu: 1.5 },
        y: ProcessSpec::DeterministicDrift { b: 1.0 },
        euler: Default::default(),
    };
    let exact = SamplerConfig::Dufresne { a_coef: 1.0, b_coef: 1.5 };
    let a = sample_set(&pathwise, n, RngStream::new(1, 0)).unwrap();
    let b = sample_set(&exact, n, RngStream::new(1, 1)).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!("pathwise mean {:.4}, exact mean {:.4}, theory 1", mean(&a.values), mean(&b.values));
    println!("unconverged pathwise draws: {}", a.unconverged);
    let r = ks_two_sample(&a, &b, 0.01);
    println!("KS D = {:.4}, threshold {:.4}: {:?}", r.statistic, r.threshold, r.verdict);
}
