//! Exact optimum of a small instance and a packing witness, plus the
//! bin-packing check the oracle is built on.

use gmkp::oracle::{exact_gmkp, feasible_packing};
use gmkp::{Instance, Selection};

pub fn run_example() -> gmkp::Result<()> {
    // Seven items of weight 3 do not fit three knapsacks of size 7, even
    // though 21 = 7 + 7 + 7.
    let tight = Instance::with_weight_rewards(vec![7, 7, 7], vec![vec![3; 7]]);
    let packing = feasible_packing(&tight, &Selection::from_indices(1, [0]), None)?;
    println!("seven 3s into three 7s: {}", if packing.is_some() { "fits" } else { "does not fit" });

    let inst = Instance::from_groups(
        vec![10, 10, 8],
        vec![(12, vec![6, 6]), (9, vec![9]), (7, vec![4, 3]), (5, vec![5]), (8, vec![7, 1])],
    );
    let exact = exact_gmkp(&inst, None)?;
    println!("optimum {} with groups {:?} ({} nodes)", exact.value, exact.selection.indices(), exact.nodes);
    for (j, i) in exact.assignment.placed_items() {
        println!("  item {j} (weight {}) -> knapsack {i}", inst.item_weights[j]);
    }
    println!("loads {:?} of capacities {:?}", exact.assignment.loads(), inst.capacities);
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
