//! Series representation for X = Poisson against the pathwise sampler.

use exlevy::distcheck::ks_two_sample;
use exlevy::exfunc::{sample_set, SamplerConfig};
use exlevy::levy::ProcessSpec;
use exlevy::rng::RngStream;

fn main() {
    let n = 20_000;
    let y = ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.0 };
    let series = SamplerConfig::PoissonSeries { a: 1.0, y: y.clone(), n_terms: 40 };
    let pathwise = SamplerConfig::Euler { x: ProcessSpec::Poisson { rate: 1.0 }, y, euler: Default::default() };
    let s = sample_set(&series, n, RngStream::new(2, 0)).unwrap();
    let p = sample_set(&pathwise, n, RngStream::new(2, 1)).unwrap();
    let var = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    println!("variance series {:.4}, pathwise {:.4}, theory {:.4}", var(&s.values), var(&p.values), 1.0 / (1.0 - (-2.0f64).exp()));
    let r = ks_two_sample(&s, &p, 0.01);
    println!("KS D = {:.4}, threshold {:.4}: {:?}", r.statistic, r.threshold, r.verdict);
}
