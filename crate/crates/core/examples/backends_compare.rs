//! Same instance, three OSS backends: dense LU, MINRES on the Hermitian
//! dilation, and the noisy emulation of a quantum solve plus tomography.

use std::time::Instant;

use lcqo::{run_ifqipm, synthesize_instance, BackendKind, SolverConfig};

fn main() -> lcqo::Result<()> {
    let (problem, start) = synthesize_instance(8, 30, 0.5, 3)?;
    println!(
        "{:<10} {:>6} {:>10} {:>14} {:>14} {:>10}",
        "backend", "iters", "inner", "max r/rc", "objective", "time"
    );
    for backend in [BackendKind::Exact, BackendKind::Iterative, BackendKind::Noisy] {
        let config = SolverConfig::default().with_backend(backend);
        let clock = Instant::now();
        let result = run_ifqipm(&problem, &start, &config)?;
        let inner: usize = result.trace.iter().map(|t| t.inner_iterations).sum();
        let worst = result.trace.iter().map(|t| t.r_norm / t.rc_norm).fold(0.0, f64::max);
        println!(
            "{:<10} {:>6} {:>10} {:>14.4e} {:>14.8} {:>10.2?}",
            backend.to_string(),
            result.iterations(),
            inner,
            worst,
            problem.objective(&result.point.x),
            clock.elapsed()
        );
    }
    println!("every backend keeps ||r|| <= delta ||r_c|| with delta = {}", SolverConfig::default().delta);
    Ok(())
}
