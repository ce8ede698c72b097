//! Test-only reference implementations. None of these share code with the
//! library routines they check.

#![allow(dead_code)]

use ecg_ident::svm::Kernel;

/// Pack sample pairs into 3-byte groups, inverse of the 212 decoder.
pub fn encode_212(pairs: &[(i16, i16)]) -> Vec<u8> {
    let mut out = Vec::with_capacity(pairs.len() * 3);
    for &(a, b) in pairs {
        let a = (a as u16) & 0x0FFF;
        let b = (b as u16) & 0x0FFF;
        out.push((a & 0xFF) as u8);
        out.push((((b >> 8) & 0x0F) << 4) as u8 | ((a >> 8) & 0x0F) as u8);
        out.push((b & 0xFF) as u8);
    }
    out
}

/// Encode an annotation word.
pub fn ann_word(code: u16, increment: u16) -> [u8; 2] {
    ((code << 10) | (increment & 0x3FF)).to_le_bytes()
}

/// Hermite polynomial from the explicit sum
/// `n! * sum_m (-1)^m (2x)^(n-2m) / (m! (n-2m)!)`.
pub fn hermite_explicit(n: usize, x: f64) -> f64 {
    let fact = |k: usize| (1..=k).fold(1.0_f64, |acc, i| acc * i as f64);
    let mut sum = 0.0;
    for m in 0..=n / 2 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (2.0 * x).powi((n - 2 * m) as i32) / (fact(m) * fact(n - 2 * m));
    }
    fact(n) * sum
}

/// Hermite function straight from its closed form.
pub fn phi_direct(n: usize, delta: f64, t: f64) -> f64 {
    let fact: f64 = (1..=n).fold(1.0, |acc, i| acc * i as f64);
    let norm = (delta * 2f64.powi(n as i32) * fact * std::f64::consts::PI.sqrt()).sqrt();
    (-t * t / (2.0 * delta * delta)).exp() * hermite_explicit(n, t / delta) / norm
}

/// Largest `|<phi_m, phi_n> - [m == n]|` with Riemann sums of step `step`
/// over `[-half, half]`.
pub fn orthonormality_error(order_count: usize, delta: f64, half: f64, step: f64) -> f64 {
    let k = (half / step).round() as i64;
    let ts: Vec<f64> = (-k..=k).map(|i| i as f64 * step).collect();
    let phi = ecg_ident::hermite::hermite_functions(order_count, delta, &ts);
    let gram = phi.transpose() * &phi * step;
    let mut worst = 0.0_f64;
    for m in 0..order_count {
        for n in 0..order_count {
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((gram[(m, n)] - target).abs());
        }
    }
    worst
}

pub fn gram(x: &[Vec<f64>], kernel: &Kernel) -> Vec<Vec<f64>> {
    x.iter()
        .map(|a| x.iter().map(|b| kernel.eval(a, b).unwrap()).collect())
        .collect()
}

/// Euclidean projection onto `{0 <= a <= c, y'a = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        v.iter().zip(y).map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c)).collect()
    };
    let balance = |a: &[f64]| a.iter().zip(y).map(|(ai, yi)| ai * yi).sum::<f64>();
    // balance is non-increasing in lambda
    let span = v.iter().fold(0.0_f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if balance(&at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Maximize the SVM dual with accelerated projected gradient. Returns
/// `(alpha, objective)`.
pub fn dual_oracle(x: &[Vec<f64>], y: &[f64], kernel: &Kernel, c: f64, iterations: usize) -> (Vec<f64>, f64) {
    let n = x.len();
    let k = gram(x, kernel);
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * k[i][j]).collect())
        .collect();
    // trace bounds the largest eigenvalue of a PSD matrix
    let lipschitz = (0..n).map(|i| q[i][i]).sum::<f64>().max(1e-12);
    let grad = |a: &[f64]| -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| q[i][j] * a[j]).sum::<f64>() - 1.0).collect()
    };
    let objective = |a: &[f64]| -> f64 {
        let quad: f64 = (0..n).map(|i| (0..n).map(|j| a[i] * q[i][j] * a[j]).sum::<f64>()).sum();
        a.iter().sum::<f64>() - 0.5 * quad
    };

    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0_f64;
    for _ in 0..iterations {
        let g = grad(&z);
        let step: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi - gi / lipschitz).collect();
        let next = project(&step, y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next
            .iter()
            .zip(&a)
            .map(|(n1, a0)| n1 + (t - 1.0) / t_next * (n1 - a0))
            .collect();
        a = next;
        t = t_next;
    }
    let obj = objective(&a);
    (a, obj)
}

/// Largest violation of the KKT conditions of the soft-margin dual, measured
/// on `y_i f(x_i)` against 1.
pub fn kkt_violation(x: &[Vec<f64>], y: &[f64], alpha: &[f64], bias: f64, kernel: &Kernel, c: f64) -> f64 {
    let k = gram(x, kernel);
    let n = x.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let f: f64 = (0..n).map(|j| alpha[j] * y[j] * k[i][j]).sum::<f64>() + bias;
        let m = y[i] * f;
        let v = if alpha[i] <= 0.0 {
            (1.0 - m).max(0.0)
        } else if alpha[i] >= c {
            (m - 1.0).max(0.0)
        } else {
            (m - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Random binary dataset with both classes present.
pub fn random_dataset(rng: &mut impl rand::Rng, n: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let mut y: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    y[0] = 1.0;
    y[n - 1] = -1.0;
    (x, y)
}
