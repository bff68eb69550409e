//! Binary search on the aggregate capacity until the assignment fits, compared
//! with the exact optimum.

use gmkp::heuristics::{binary_search_feasible, iteration_bound, FeasibleOptions};
use gmkp::oracle::exact_gmkp;
use gmkp::{Instance, Variant};

pub fn instance() -> Instance {
    Instance::from_groups(
        vec![12, 12, 10],
        vec![
            (14, vec![7, 6]),
            (9, vec![9]),
            (11, vec![5, 5, 2]),
            (6, vec![4, 3]),
            (10, vec![8, 3]),
            (4, vec![2, 2]),
        ],
    )
}

pub fn run_example() -> gmkp::Result<()> {
    let inst = instance();
    let v_star = exact_gmkp(&inst, None)?.value;
    for v in [Variant::Kp, Variant::TwoMkp, Variant::ThreeMkp] {
        let out = binary_search_feasible(&inst, &v, &FeasibleOptions::default())?;
        println!(
            "{:>5}: reward {} of optimum {v_star}, max exceeded {}, {} probes (at most {})",
            v.name(),
            out.result.reward(),
            out.result.max_exceeded(),
            out.probes.len(),
            iteration_bound(inst.total_capacity())
        );
        for p in &out.probes {
            println!("        T={:>3} reward={:>3} exceeded={:>3}", p.total_capacity, p.reward, p.max_exceeded);
        }
        assert!(out.result.is_feasible() && out.result.reward() <= v_star);
    }
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
