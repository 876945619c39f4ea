//! Replays a solve through the quantum cost model: condition numbers against
//! their bound, block-encoding subnormalization and unit costs per iteration.

use lcqo::cost::{block_encoding_factor, psi_spectrum};
use lcqo::{assemble_oss, build_null_basis, cost_report, run_ifqipm, synthesize_instance, SolverConfig};

fn main() -> lcqo::Result<()> {
    let (problem, start) = synthesize_instance(4, 12, 0.5, 5)?;
    let config = SolverConfig {
        trace_kappa: true,
        ..SolverConfig::default()
    };
    let result = run_ifqipm(&problem, &start, &config)?;

    let basis = build_null_basis(&problem)?;
    let oss = assemble_oss(&problem, &basis, &start, config.sigma(problem.n()))?;
    let be = block_encoding_factor(&problem, &basis, &start, &oss, 0.1)?;
    println!("block encoding at the start point:");
    for f in &be.factors {
        println!("  {:<30} alpha {:>10.4} error {:>10.3e}  gates {}", f.name, f.alpha, f.error, f.gates);
    }
    let pairs = psi_spectrum(&start)?;
    let lowest = pairs.iter().map(|p| p.minus).fold(f64::INFINITY, f64::min);
    println!("smallest Psi_1 eigenvalue at the start: {lowest:.4}\n");

    let mut report = cost_report(&problem, &result.trace, config.eps)?;
    let keep: Vec<_> = report.rows.iter().step_by(25).cloned().collect();
    let all_ok = report.violations().is_empty();
    report.rows = keep;
    print!("{}", report.render_table());
    println!("row invariants hold: {all_ok}");
    Ok(())
}
