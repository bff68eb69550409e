//! The four reward schemes applied to one generated instance, and how the
//! 3mKP selection reacts.

use gmkp::gen::{apply_reward_scheme, generate_instance, GeneratorParams, RewardScheme};
use gmkp::model::rational;
use gmkp::{run_algorithm, SolveOptions, Variant};

pub fn run_example() -> gmkp::Result<()> {
    let base = generate_instance(&GeneratorParams {
        m: 4,
        w_split: 30,
        w_min: 20,
        w_mode: 30,
        r_load: rational(2, 1),
        r_conc: rational(3, 5),
        capacity: 100,
        seed: 5,
    })?;
    println!("group weights {:?}", base.group_weights());
    for scheme in [RewardScheme::R0, RewardScheme::R1, RewardScheme::R2, RewardScheme::R3 { seed: 1 }] {
        let inst = apply_reward_scheme(&base, scheme);
        let r = run_algorithm(&inst, &Variant::ThreeMkp, &SolveOptions::default())?;
        println!("{scheme:>4}: rewards {:?} -> selected {:?}", inst.rewards, r.selection.indices());
    }
    Ok(())
}

fn main() -> gmkp::Result<()> {
    run_example()
}
