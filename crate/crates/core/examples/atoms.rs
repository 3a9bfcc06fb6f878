//! Atoms of the Lévy measure of Z when X is Poisson and Y is integer-valued.

use exlevy::distcheck::{density_report, levy_atoms};
use exlevy::levy::ProcessSpec;

fn main() {
    let y = ProcessSpec::Poisson { rate: 1.0 };
    let table = levy_atoms(1.0, &y, 8, 256).unwrap();
    println!("p = {:?}, domain {:?}", table.p, table.domain);
    for k in 1..=6 {
        println!("nu0({k}) = {:.10}  closed form {:.10}", table.nu0(k).unwrap(), 0.5f64.powi(k as i32) / k as f64);
    }
    let r = density_report(&table, (0.1, 10.0), 0.05);
    println!("density on [0.1, 10] at eps 0.05: {:?}, max gap {:.4}", r.verdict, r.statistic);

    let walk = ProcessSpec::CompoundPoissonInteger { rate: 1.0, jump_pmf: [(-1, 0.5), (1, 0.5)].into_iter().collect() };
    let table = levy_atoms(1.0, &walk, 3, 5).unwrap();
    println!("symmetric walk: domain {:?}", table.domain);
    for e in table.entries.iter().filter(|e| e.n == 0) {
        println!("  atom at {:+.4}: {:.6}", e.point, e.mass);
    }
}
