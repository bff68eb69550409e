//! Capacity sweep from 0.75 to 1.25 times the real capacity, then the
//! reward/excess Pareto frontier of the eleven results.

use gmkp::gen::{generate_instance, GeneratorParams};
use gmkp::heuristics::{capacity_sweep, default_factors, pareto_indices};
use gmkp::model::{format_rational, rational};
use gmkp::{SolveOptions, Variant};

pub fn run_example() -> gmkp::Result<()> {
    let inst = generate_instance(&GeneratorParams {
        m: 5,
        w_split: 40,
        w_min: 10,
        w_mode: 25,
        r_load: rational(3, 2),
        r_conc: rational(1, 2),
        capacity: 100,
        seed: 9,
    })?;
    let points = capacity_sweep(&inst, &Variant::TwoMkp, &default_factors(), &SolveOptions::default().with_swap_opt(true))?;
    let mut coords = Vec::new();
    for p in &points {
        let r = p.outcome.as_ref().expect("a small instance solves without a budget");
        coords.push((r.reward(), r.max_exceeded()));
    }
    let frontier = pareto_indices(&coords);
    println!("{:>6} {:>6} {:>7} {:>9} frontier", "factor", "T", "reward", "exceeded");
    for (i, p) in points.iter().enumerate() {
        println!(
            "{:>6} {:>6} {:>7} {:>9} {}",
            format_rational(&p.factor),
            p.total_capacity,
            coords[i].0,
            coords[i].1,
            if frontier.contains(&i) { "*" } else { "" }
        );
    }
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
