//! Draws one instance from the Latin hypercube design and runs every study
//! algorithm on it, with and without local search.

use gmkp::gen::{generate_instance, latin_hypercube, materialize};
use gmkp::model::{exceeded_ratio, format_rational, rational};
use gmkp::pipeline::run_best;
use gmkp::{run_algorithm, SolveOptions, Variant};

pub fn run_example() -> gmkp::Result<()> {
    let point = latin_hypercube(8, 2024)[3];
    let mut params = materialize(point, 100, 17);
    // Keep the instance small enough for a quick run.
    params.m = params.m.min(6);
    params.r_load = params.r_load.min(rational(2, 1));
    let inst = generate_instance(&params)?;
    println!(
        "m={} n={} k={} total weight={} total capacity={}",
        inst.num_knapsacks(),
        inst.num_items(),
        inst.num_groups(),
        inst.item_weights.iter().sum::<u64>(),
        inst.total_capacity()
    );
    println!("{:>8} {:>8} {:>10} {:>10} {:>7}", "algo", "reward", "exceeded", "ratio", "swap");
    for swap in [false, true] {
        let options = SolveOptions::default().with_swap_opt(swap);
        for v in Variant::study_set() {
            let r = run_algorithm(&inst, &v, &options)?;
            println!(
                "{:>8} {:>8} {:>10} {:>10} {:>7}",
                r.algorithm,
                r.reward(),
                r.max_exceeded(),
                format_rational(&exceeded_ratio(&inst, r.max_exceeded())),
                r.swap_moves
            );
        }
    }
    let best = run_best(&inst, &Variant::study_set(), &SolveOptions::default().with_swap_opt(true))?;
    println!("{} wins with max exceeded {}", best.algorithm, best.max_exceeded());
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
