//! Marginals of V at several times, started from the stationary law and
//! from zero.

use exlevy::gou::{stationarity_report, InitialLaw, JointPairSpec, StationarityConfig};
use exlevy::levy::ProcessSpec;
use exlevy::rng::RngStream;

fn main() {
    let pair = JointPairSpec::independent(
        ProcessSpec::BrownianDrift { sigma: 1.0, mu: 1.0 },
        ProcessSpec::SymmetricStable { alpha: 1.5, scale: 1.0 },
    );
    let cfg = StationarityConfig::new(vec![1.0, 5.0, 25.0], 4000);
    let r = stationarity_report(&pair, &cfg, RngStream::new(5, 0)).unwrap();
    println!("stationary start: max D {:.4}, threshold {:.4}, {:?}", r.statistic, r.threshold, r.verdict);
    let cfg = StationarityConfig { initial: InitialLaw::Constant { value: 0.0 }, ..cfg };
    let r = stationarity_report(&pair, &cfg, RngStream::new(5, 0)).unwrap();
    println!("zero start:       max D {:.4}, threshold {:.4}, {:?}", r.statistic, r.threshold, r.verdict);
}
