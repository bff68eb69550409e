//! The 0/1 group-selection problems behind each relaxation: their rows, and
//! the exact solvers (dynamic program and branch and bound) agreeing.

use gmkp::model::format_rational;
use gmkp::subset_select::{build_problem, canonical_d, solve_dp, solve_exact, RowTag};
use gmkp::{Instance, Variant};

pub fn run_example() -> gmkp::Result<()> {
    let inst = Instance::from_groups(
        vec![10, 10, 10],
        vec![(10, vec![6, 4]), (9, vec![4, 4, 4]), (7, vec![7]), (8, vec![3, 3, 3]), (6, vec![6, 1])],
    );
    let d: Vec<String> = canonical_d(&inst).iter().map(format_rational).collect();
    println!("canonical thresholds: {}", d.join(", "));
    for v in [Variant::Kp, Variant::TwoMkp, Variant::ThreeMkp, Variant::MkpD(canonical_d(&inst)), Variant::MkpPrime] {
        let problem = build_problem(&inst, &v, inst.total_capacity())?;
        println!("{}:", v.name());
        for row in &problem.rows {
            let tag = match &row.tag {
                RowTag::Aggregate => "sum w".to_string(),
                RowTag::Threshold(d) => format!("f_{}", format_rational(d)),
                RowTag::Floor(c) => format!("floor /{c}"),
            };
            println!("  {tag:>10}: {:?} <= {}", row.coeffs, row.rhs);
        }
        let exact = solve_exact(&problem, None)?;
        print!("  branch and bound: {:?} value {}", exact.selection.indices(), exact.value);
        if problem.rows.len() <= 2 {
            let dp = solve_dp(&problem)?;
            print!(", dynamic program value {}", problem.value(&dp));
            assert_eq!(problem.value(&dp), exact.value);
        }
        println!();
    }
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
