//! The worst-case instances of each relaxation: the greedy assignment hits
//! the proven bound on the maximum exceeded capacity exactly.

use gmkp::model::{exceeded_ratio, format_rational, rational};
use gmkp::{run_algorithm, Instance, Rational, SolveOptions, Variant};

/// `(name, variant, instance, expected max_exceeded / c_max)`; rewards equal
/// group weights.
pub fn fixtures() -> Vec<(&'static str, Variant, Instance, Rational)> {
    let lp = Instance::with_weight_rewards(vec![4, 4, 4], vec![vec![4, 4, 3], vec![3, 3, 3, 3]]);
    let kp = Instance::with_weight_rewards(vec![4, 4, 4], vec![vec![3, 3, 3, 3]]);
    let two = Instance::with_weight_rewards(vec![7, 7, 7], vec![vec![3; 7]]);
    let three = Instance::with_weight_rewards(vec![9, 9, 9], vec![vec![8, 8, 8, 3]]);
    // m = 3 in every fixture.
    vec![
        ("LP", Variant::Lp, lp, rational(5, 4)),
        ("KP", Variant::Kp, kp, rational(1, 2)),
        ("2mKP", Variant::TwoMkp, two, rational(2, 7)),
        ("3mKP", Variant::ThreeMkp, three, rational(2, 9)),
    ]
}

pub fn run_example() -> gmkp::Result<()> {
    for (name, variant, inst, expected) in fixtures() {
        let r = run_algorithm(&inst, &variant, &SolveOptions::default())?;
        let ratio = exceeded_ratio(&inst, r.max_exceeded());
        println!(
            "{name:>5}: reward {} loads {:?} max_exceeded/c_max = {} (bound {})",
            r.reward(),
            r.assignment.loads(),
            format_rational(&ratio),
            format_rational(&expected)
        );
        assert_eq!(ratio, expected, "{name}");
    }
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
