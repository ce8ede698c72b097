//! Train a binary RBF SVM with the SMO solver on two noisy rings.

use ecg_ident::svm::{solve_dual, train_binary, Kernel, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring(rng: &mut ChaCha8Rng, radius: f64, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            let r = radius + rng.random_range(-0.3..0.3);
            vec![r * a.cos(), r * a.sin()]
        })
        .collect()
}

fn main() -> ecg_ident::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut x = ring(&mut rng, 1.0, 60);
    x.extend(ring(&mut rng, 2.0, 60));
    let y: Vec<f64> = (0..120).map(|i| if i < 60 { 1.0 } else { -1.0 }).collect();

    let kernel = Kernel::rbf(0.5);
    for c in [0.1, 10.0, 1000.0] {
        let config = TrainConfig::with_c(c);
        let sol = solve_dual(&x, &y, &kernel, &config)?;
        let model = train_binary(&x, &y, &kernel, &config)?;
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(xi, yi)| model.predict(xi).map(|p| p == **yi).unwrap_or(false))
            .count();
        let bound = sol.alpha.iter().filter(|&&a| a >= c).count();
        println!(
            "C = {c:>6}: {} SVs ({bound} at bound), bias {:+.4}, dual {:.4}, {} iterations, train acc {}/120",
            model.support_vectors.len(),
            sol.bias,
            sol.objective,
            sol.iterations,
            correct
        );
    }
    Ok(())
}
