use super::report::{ks_critical_value, TestReport};
use crate::exfunc::SampleSet;

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_A - F_B|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs nonempty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < a.len() && a[i].total_cmp(&x).is_le() {
            i += 1;
        }
        while j < b.len() && b[j].total_cmp(&x).is_le() {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Rejects equality in law when `D > c(level) sqrt((n+m)/(nm))`.
pub fn ks_two_sample(a: &SampleSet, b: &SampleSet, level: f64) -> TestReport {
    let d = ks_statistic(&a.values, &b.values);
    let (n, m) = (a.values.len() as f64, b.values.len() as f64);
    let threshold = ks_critical_value(level) * ((n + m) / (n * m)).sqrt();
    let provenance = serde_json::json!({
        "a": a.provenance(),
        "b": b.provenance(),
        "level": level,
    });
    TestReport::compare("ks_two_sample", d, threshold, provenance)
}
