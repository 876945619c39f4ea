//! Trains a linear soft-margin SVM on two noisy Gaussian blobs.

use lcqo::svm::{train, SvmDataset, DEFAULT_EPS_REG};
use lcqo::SolverConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lcqo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for i in 0..16 {
        let label = if i % 2 == 0 { 1.0 } else { -1.0 };
        let center = [label * 1.0, label * 0.5];
        points.push(center.iter().map(|c| c + rng.random_range(-1.2..1.2)).collect());
        labels.push(label);
    }
    let data = SvmDataset::new(points, labels)?;

    for c in [0.1, 1.0, 10.0] {
        let t = train(&data, c, DEFAULT_EPS_REG, &SolverConfig::default())?;
        println!(
            "C = {c:<5} w = [{:>8.4}, {:>8.4}]  t = {:>8.4}  objective {:>9.5}  accuracy {:.3}  ({} iterations)",
            t.model.w[0],
            t.model.w[1],
            t.model.t,
            t.model.objective,
            t.accuracy,
            t.result.iterations()
        );
    }
    Ok(())
}
