//! Kolmogorov–Smirnov machinery for the distribution-level cross-checks.

/// Asymptotic Kolmogorov critical coefficient at the 1% level.
const K_ALPHA_1PCT: f64 = 1.6276236115189502;
/// … and at the 5% level.
const K_ALPHA_5PCT: f64 = 1.3581015157406195;

/// One-sample KS statistic `sup_x |F_emp(x) − F(x)|`; sorts the samples.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut stat = 0.0f64;
    for (i, x) in samples.iter().enumerate() {
        let f = cdf(*x);
        stat = stat.max((f - i as f64 / n).abs());
        stat = stat.max(((i as f64 + 1.0) / n - f).abs());
    }
    stat
}

/// Two-sample KS statistic; sorts both sample sets.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut stat = 0.0f64;
    while i < na && j < nb {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        stat = stat.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    stat
}

pub fn ks_critical_1pct(n: usize) -> f64 {
    K_ALPHA_1PCT / (n as f64).sqrt()
}

pub fn ks_critical_5pct(n: usize) -> f64 {
    K_ALPHA_5PCT / (n as f64).sqrt()
}

pub fn ks_two_sample_critical_5pct(na: usize, nb: usize) -> f64 {
    K_ALPHA_5PCT * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}
