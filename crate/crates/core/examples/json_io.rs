//! Instance files and result records.

use gmkp::io::{instance_from_json, instance_to_json, result_record, to_json_pretty};
use gmkp::{run_algorithm, Instance, SolveOptions, Variant};

pub fn run_example() -> gmkp::Result<()> {
    let mut inst = Instance::from_groups(vec![10, 10, 3], vec![(12, vec![6, 6]), (9, vec![9]), (40, vec![30])]);
    inst.meta.insert("source".into(), "example".into());
    let text = instance_to_json(&inst);
    println!("{text}");
    assert_eq!(instance_from_json(&text)?, inst);

    // The third knapsack holds no item and the third group outweighs every
    // knapsack; normalization drops both and the record says so.
    let (normal, report) = inst.normalize()?;
    let r = run_algorithm(&normal, &Variant::TwoMkp, &SolveOptions::default().with_swap_opt(true))?;
    print!("{}", to_json_pretty(&result_record(&normal, &r, &report)));
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
