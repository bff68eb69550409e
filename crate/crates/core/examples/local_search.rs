//! Jump/swap local search repairing a lopsided assignment.

use gmkp::assign::{first_improving_move, greedy_assign, potential, swap_optimal};
use gmkp::{Assignment, Instance, Selection};

pub fn run_example() -> gmkp::Result<()> {
    let inst = Instance::with_weight_rewards(vec![10, 10, 10], vec![vec![5, 5, 4], vec![6, 3, 3], vec![2, 2]]);
    let all = Selection::from_indices(3, 0..3);
    let mut start = Assignment::empty(&inst);
    for j in all.items(&inst) {
        start.place(&inst, j, 0);
    }
    println!("everything on knapsack 0: loads {:?}, potential {}", start.loads(), potential(&inst, start.loads()));
    let out = swap_optimal(&inst, &start)?;
    println!(
        "after {} moves (guard {}): loads {:?}, potential {}, max exceeded {}",
        out.moves,
        out.guard,
        out.assignment.loads(),
        potential(&inst, out.assignment.loads()),
        out.assignment.max_exceeded(&inst)
    );
    assert!(first_improving_move(&inst, &out.assignment).is_none());

    let greedy = greedy_assign(&inst, &all);
    println!("greedy heaviest-first: loads {:?}", greedy.loads());
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
