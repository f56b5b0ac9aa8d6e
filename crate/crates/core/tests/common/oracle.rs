//! Slow, textbook-form reference implementations used as test oracles.
//!
//! Each one is written from a different formula than the library uses
//! (KL form for JSD, pairwise sums for alpha, counting ranks for H, etc.)
//! so a shared mistake is unlikely.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|v| **v > 0.0).map(|v| v * v.ln()).sum::<f64>() / std::f64::consts::LN_2
}

fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum::<f64>() / std::f64::consts::LN_2
}

pub fn jsd_bits(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a + b) / 2.0).collect();
    0.5 * kl_bits(p, &m) + 0.5 * kl_bits(q, &m)
}

pub fn cosine(p: &[f64], q: &[f64]) -> f64 {
    let unit = |v: &[f64]| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect::<Vec<_>>()
    };
    unit(p).iter().zip(unit(q)).map(|(a, b)| a * b).sum()
}

/// Cohen's kappa from a dense confusion table over labels 0..k.
pub fn kappa(a: &[usize], b: &[usize], k: usize) -> f64 {
    let mut table = vec![vec![0.0; k]; k];
    for (x, y) in a.iter().zip(b) {
        table[*x][*y] += 1.0;
    }
    let n = a.len() as f64;
    let po = (0..k).map(|i| table[i][i]).sum::<f64>() / n;
    let pe = (0..k)
        .map(|i| table[i].iter().sum::<f64>() * (0..k).map(|r| table[r][i]).sum::<f64>())
        .sum::<f64>()
        / (n * n);
    (po - pe) / (1.0 - pe)
}

/// Krippendorff's alpha from pairwise sums over units and over all pairable values.
pub fn alpha(rows: &[Vec<Option<u32>>], delta: impl Fn(u32, u32) -> f64) -> f64 {
    let units: Vec<Vec<u32>> =
        rows.iter().map(|r| r.iter().flatten().copied().collect::<Vec<u32>>()).filter(|u| u.len() > 1).collect();
    let pooled: Vec<u32> = units.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let mut d_o = 0.0;
    for u in &units {
        let mut s = 0.0;
        for i in 0..u.len() {
            for j in 0..u.len() {
                if i != j {
                    s += delta(u[i], u[j]);
                }
            }
        }
        d_o += s / (u.len() as f64 - 1.0);
    }
    d_o /= n;
    let mut d_e = 0.0;
    for i in 0..pooled.len() {
        for j in 0..pooled.len() {
            if i != j {
                d_e += delta(pooled[i], pooled[j]);
            }
        }
    }
    d_e /= n * (n - 1.0);
    1.0 - d_o / d_e
}

/// Kruskal-Wallis H written as a between-group variance of mean ranks.
pub fn kruskal_h(groups: &[Vec<f64>]) -> f64 {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let rank = |v: f64| {
        let less = pooled.iter().filter(|x| **x < v).count() as f64;
        let equal = pooled.iter().filter(|x| **x == v).count() as f64;
        less + (equal + 1.0) / 2.0
    };
    let grand = (n + 1.0) / 2.0;
    let between: f64 = groups
        .iter()
        .map(|g| {
            let mean = g.iter().map(|v| rank(*v)).sum::<f64>() / g.len() as f64;
            g.len() as f64 * (mean - grand).powi(2)
        })
        .sum();
    let total: f64 = pooled.iter().map(|v| (rank(*v) - grand).powi(2)).sum();
    // (N-1) * between / total is H with the tie correction already folded in
    (n - 1.0) * between / total
}

/// Composite Simpson rule on [a, b] with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn ln_gamma_halfint(x: f64) -> f64 {
    // half-integer and integer arguments only: exact via recursion
    let mut v = x;
    let mut acc = 0.0;
    while v > 1.0 + 1e-9 {
        v -= 1.0;
        acc += v.ln();
    }
    if (v - 0.5).abs() < 1e-12 {
        acc + 0.5 * std::f64::consts::PI.ln()
    } else {
        acc
    }
}

/// Upper chi-square tail by integrating the density from `x` outward.
pub fn chi2_tail_numeric(x: f64, df: u32) -> f64 {
    let k = f64::from(df) / 2.0;
    let norm = -(k * 2f64.ln() + ln_gamma_halfint(k));
    let pdf = |t: f64| if t <= 0.0 { 0.0 } else { ((k - 1.0) * t.ln() - t / 2.0 + norm).exp() };
    simpson(pdf, x, x + 400.0, 400_000)
}

/// Student t CDF by integrating the density from zero.
pub fn t_cdf_numeric(t: f64, df: u32) -> f64 {
    let v = f64::from(df);
    let norm = ln_gamma_halfint((v + 1.0) / 2.0) - ln_gamma_halfint(v / 2.0) - 0.5 * (v * std::f64::consts::PI).ln();
    let pdf = |s: f64| (norm - (v + 1.0) / 2.0 * (1.0 + s * s / v).ln()).exp();
    0.5 + simpson(pdf, 0.0, t, 200_000)
}

/// Random point on the 8-simplex with some exact zeros.
pub fn random_simplex(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..8).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
    if v.iter().all(|x| *x == 0.0) {
        v[rng.gen_range(0..8)] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}
