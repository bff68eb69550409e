//! Times the 3mKP pipeline with local search on a 50-knapsack instance.

use std::time::Instant;

use gmkp::gen::{generate_instance, GeneratorParams};
use gmkp::model::rational;
use gmkp::{run_algorithm, SolveOptions, Variant};

pub fn params(seed: u64) -> GeneratorParams {
    GeneratorParams {
        m: 50,
        w_split: 50,
        w_min: 30,
        w_mode: 50,
        r_load: rational(5, 1),
        r_conc: rational(1, 2),
        capacity: 100,
        seed,
    }
}

pub fn run_example() -> gmkp::Result<()> {
    for seed in 0..3 {
        let inst = generate_instance(&params(seed))?;
        let start = Instant::now();
        let r = run_algorithm(&inst, &Variant::ThreeMkp, &SolveOptions::default().with_swap_opt(true))?;
        println!(
            "seed {seed}: n={} k={} reward={} max_exceeded={} swap moves={} time={:.2?}",
            inst.num_items(),
            inst.num_groups(),
            r.reward(),
            r.max_exceeded(),
            r.swap_moves,
            start.elapsed()
        );
    }
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
