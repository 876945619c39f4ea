//! A feasible but off-center start is pulled into the neighborhood with
//! damped pure-centering steps before the main loop runs.

use lcqo::{center_to_neighborhood, run_ifqipm, InstanceSpec, SolverConfig};
use nalgebra::DVector;

fn main() -> lcqo::Result<()> {
    let n = 16;
    let x0 = DVector::from_fn(n, |i, _| 1.0 + 3.0 * (i % 4) as f64);
    let s0 = DVector::from_fn(n, |i, _| 0.5 + (i % 3) as f64);
    let (problem, start) = InstanceSpec::new(5, n, 0.5, 9).with_start(x0, s0).build()?;
    let config = SolverConfig::default();

    let centered = center_to_neighborhood(&problem, &start, &config)?;
    println!("theta = {:.4e}", centered.theta);
    for (k, d) in centered.distances.iter().enumerate() {
        println!("step {k:>3}  ||XSe - mu e|| = {d:.6e}");
    }
    let result = run_ifqipm(&problem, &centered.point, &config)?;
    println!("main loop: {:?} after {} iterations", result.status, result.iterations());
    Ok(())
}
