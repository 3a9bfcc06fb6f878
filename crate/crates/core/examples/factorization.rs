//! Empirical characteristic-function checks: the e^{-1} factorization of Z
//! for X = Poisson and the selfdecomposability screen.

use exlevy::distcheck::{default_z_grid, factorization_residual, selfdec_screen};
use exlevy::exfunc::{dufresne_sample, sample_y_at_exp_time, sample_z_poisson_series};
use exlevy::levy::ProcessSpec;
use exlevy::rng::{sample_batch, RngStream};

fn main() {
    let n = 50_000;
    let y = ProcessSpec::Poisson { rate: 1.0 };
    let z = sample_batch(n, RngStream::new(6, 0), |r| sample_z_poisson_series(1.0, &y, 40, r));
    let w0 = sample_batch(n, RngStream::new(6, 1), |r| sample_y_at_exp_time(&y, 1.0, r));
    for b in [(-1.0f64).exp(), 0.5] {
        let r = factorization_residual(&z, &w0, b, &default_z_grid());
        println!("b = {b:.4}: residual {:.4} vs {:.4} -> {:?}", r.statistic, r.threshold, r.verdict);
    }
    let d = sample_batch(n, RngStream::new(6, 2), |r| dufresne_sample(1.0, 1.5, r));
    let r = selfdec_screen(&d, &[0.3, 0.5, 0.8], &default_z_grid());
    println!("selfdec screen on the reciprocal-gamma law: {:?} (violation {:.2e}, tau {:.2e})", r.verdict, r.statistic, r.threshold);
}
