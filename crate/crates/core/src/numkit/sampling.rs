//! Deterministic low-discrepancy direction sets on the unit sphere `S^{k−1}`.

use std::f64::consts::PI;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % b) as f64;
        index /= b;
        f *= inv;
    }
    r
}

/// `count` Halton points in `[0,1)^dim`, starting at index 1 so no coordinate
/// is zero.
pub fn halton(count: usize, dim: usize) -> Vec<Vec<f64>> {
    assert!(dim <= PRIMES.len(), "halton dimension too large");
    (1..=count as u64)
        .map(|i| (0..dim).map(|d| radical_inverse(i, PRIMES[d])).collect())
        .collect()
}

/// `count` unit vectors in `ℝᵏ`. Circle points use the golden-angle spiral;
/// higher dimensions push Halton points through Box–Muller and normalize.
pub fn sphere_directions(count: usize, k: usize) -> Vec<Vec<f64>> {
    match k {
        0 => Vec::new(),
        1 => (0..count)
            .map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let a = golden * i as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        _ => {
            let pairs = k.div_ceil(2);
            halton(count, 2 * pairs)
                .into_iter()
                .map(|h| {
                    let mut v = Vec::with_capacity(2 * pairs);
                    for p in 0..pairs {
                        let r = (-2.0 * h[2 * p].ln()).sqrt();
                        let a = 2.0 * PI * h[2 * p + 1];
                        v.push(r * a.cos());
                        v.push(r * a.sin());
                    }
                    v.truncate(k);
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / n).collect()
                })
                .collect()
        }
    }
}
