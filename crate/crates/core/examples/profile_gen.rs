//! Throwaway probe: generation wall time by fidelity. Not shipped.

use std::time::Instant;

use dwellopt_core::moea::{Optimizer, OptimizerConfig};
use dwellopt_core::objective::{ConstraintConfig, ObjectiveMode};
use dwellopt_core::phantom::{generate_phantom, PhantomSpec};
use dwellopt_core::protocol::ProtocolConfig;
use dwellopt_core::evaluator::{Evaluator, EvaluatorConfig};

fn main() {
    let case = generate_phantom(&PhantomSpec::easy(), 11).unwrap();
    let protocol = ProtocolConfig::default_protocol();
    for n_dc in [250usize, 2500, 5000] {
        let eval = Evaluator::new(
            &case,
            &protocol,
            ObjectiveMode::EmbraceOnly,
            EvaluatorConfig {
                kernel: Default::default(),
                constraint: ConstraintConfig::default(),
                n_dc,
                dc_seed: 909,
            },
        )
        .unwrap();
        let config = OptimizerConfig {
            seed: 123,
            ..OptimizerConfig::default()
        };
        let mut opt = Optimizer::new(&case, eval, config).unwrap();
        let t0 = Instant::now();
        opt.run_generations(5).unwrap();
        let warm = t0.elapsed();
        let t1 = Instant::now();
        opt.run_generations(20).unwrap();
        let dt = t1.elapsed();
        println!(
            "n_dc {n_dc}: {:.3} s/gen (warmup {:.3} s for 5), archive {}",
            dt.as_secs_f64() / 20.0,
            warm.as_secs_f64(),
            opt.archive().members().len()
        );
    }
}
