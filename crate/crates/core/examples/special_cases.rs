//! Instance classes on which an algorithm returns a capacity-feasible optimum:
//! heavy items with 2mKP, powers of two with KP and mKP'.

use gmkp::oracle::exact_gmkp;
use gmkp::pipeline::{beta_bound, common_power_base};
use gmkp::{run_algorithm, Instance, SolveOptions, Variant};

pub fn cases() -> Vec<(&'static str, Variant, Instance)> {
    vec![
        (
            "items above c/2, 2mKP",
            Variant::TwoMkp,
            Instance::with_weight_rewards(vec![10, 10, 10], vec![vec![6, 7], vec![8], vec![9, 6], vec![10]]),
        ),
        (
            "powers of two, equal capacities, KP",
            Variant::Kp,
            Instance::with_weight_rewards(vec![8, 8], vec![vec![4, 2, 2], vec![8], vec![1, 1, 2], vec![4, 4]]),
        ),
        (
            "powers of two, mixed capacities, mKP'",
            Variant::MkpPrime,
            Instance::with_weight_rewards(vec![16, 8, 4], vec![vec![8, 8], vec![4, 4, 2], vec![16], vec![2, 1, 1]]),
        ),
    ]
}

pub fn run_example() -> gmkp::Result<()> {
    for (name, v, inst) in cases() {
        let r = run_algorithm(&inst, &v, &SolveOptions::default())?;
        let v_star = exact_gmkp(&inst, None)?.value;
        println!(
            "{name}: reward {} (optimum {v_star}), max exceeded {}, beta {}, power base {:?}",
            r.reward(),
            r.max_exceeded(),
            beta_bound(&v, &inst),
            common_power_base(&inst)
        );
        assert!(r.is_feasible() && r.reward() == v_star);
    }
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
