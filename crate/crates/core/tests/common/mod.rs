//! Seeded small instances shared by the integration and acceptance tests.

#![allow(dead_code)]

use gmkp::gen::{apply_reward_scheme, generate_instance, GeneratorParams, RewardScheme};
use gmkp::model::rational;
use gmkp::subset_select::{Row, RowTag, SelectionProblem};
use gmkp::assign::potential;
use gmkp::{Assignment, Instance, Selection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITE_SIZE: usize = 200;
pub const SUITE_SEED: u64 = 20_240_611;

/// One small instance: `m <= 4`, `k <= 8`, `n <= 16`. Odd indices get
/// unequal capacities; rewards cycle through R0..R3.
pub fn small_instance(rng: &mut ChaCha8Rng, index: usize) -> Instance {
    loop {
        let capacity = rng.random_range(8..=20u64);
        let w_split = rng.random_range(0..=capacity / 2);
        let w_min = rng.random_range(1..=(capacity / 2).min(capacity - w_split));
        let params = GeneratorParams {
            m: rng.random_range(2..=4),
            w_split,
            w_min,
            w_mode: rng.random_range(w_min..=w_min + w_split),
            r_load: rational(rng.random_range(100..=200), 100),
            r_conc: rational(rng.random_range(0..=80), 100),
            capacity,
            seed: rng.random(),
        };
        let mut inst = generate_instance(&params).expect("valid parameters");
        if index % 2 == 1 {
            for c in inst.capacities.iter_mut().skip(1) {
                *c -= rng.random_range(0..=capacity / 2);
            }
        }
        let Ok((inst, _)) = inst.normalize() else { continue };
        if inst.num_groups() == 0 || inst.num_groups() > 8 || inst.num_items() > 16 {
            continue;
        }
        let scheme = match index % 4 {
            0 => RewardScheme::R0,
            1 => RewardScheme::R1,
            2 => RewardScheme::R2,
            _ => RewardScheme::R3 { seed: rng.random() },
        };
        return apply_reward_scheme(&inst, scheme);
    }
}

pub fn suite() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    (0..SUITE_SIZE).map(|i| small_instance(&mut rng, i)).collect()
}

/// Random selection problem with `k` groups and `rows` rows.
pub fn random_problem(rng: &mut ChaCha8Rng, k: usize, rows: usize) -> SelectionProblem {
    SelectionProblem {
        rewards: (0..k).map(|_| rng.random_range(0..=30)).collect(),
        rows: (0..rows)
            .map(|r| {
                let coeffs: Vec<u64> = (0..k).map(|_| rng.random_range(0..=12)).collect();
                let sum: u64 = coeffs.iter().sum();
                Row {
                    rhs: rng.random_range(0..=sum),
                    coeffs,
                    tag: if r == 0 { RowTag::Aggregate } else { RowTag::Floor(r as u64) },
                }
            })
            .collect(),
    }
}

/// Best value over all `2^k` selections.
pub fn brute_force_value(problem: &SelectionProblem) -> u64 {
    let k = problem.num_groups();
    (0u32..1 << k)
        .map(|mask| Selection {
            chosen: (0..k).map(|l| mask >> l & 1 == 1).collect(),
        })
        .filter(|s| problem.is_feasible(s))
        .map(|s| problem.value(&s))
        .max()
        .unwrap_or(0)
}

/// Exact optimum by a different route than the library oracle: every group
/// subset is checked by a memoized DP over sorted residual-capacity vectors.
pub fn brute_force_gmkp(instance: &Instance) -> u64 {
    use std::collections::HashSet;

    fn packs(items: &[u64], residual: Vec<u64>, failed: &mut HashSet<(usize, Vec<u64>)>) -> bool {
        let Some((&w, rest)) = items.split_first() else { return true };
        let mut key = residual.clone();
        key.sort_unstable();
        if failed.contains(&(items.len(), key.clone())) {
            return false;
        }
        for i in 0..residual.len() {
            if residual[i] >= w {
                let mut next = residual.clone();
                next[i] -= w;
                if packs(rest, next, failed) {
                    return true;
                }
            }
        }
        failed.insert((items.len(), key));
        false
    }

    let k = instance.num_groups();
    let mut best = 0;
    for mask in 0u32..1 << k {
        let chosen: Vec<usize> = (0..k).filter(|&l| mask >> l & 1 == 1).collect();
        let reward: u64 = chosen.iter().map(|&l| instance.rewards[l]).sum();
        if reward <= best {
            continue;
        }
        let mut items: Vec<u64> = chosen
            .iter()
            .flat_map(|&l| instance.groups[l].iter().map(|&j| instance.item_weights[j]))
            .collect();
        items.sort_unstable_by(|a, b| b.cmp(a));
        if packs(&items, instance.capacities.clone(), &mut HashSet::new()) {
            best = reward;
        }
    }
    best
}

fn max_over(inst: &Instance, loads: &[u64]) -> i64 {
    loads
        .iter()
        .zip(&inst.capacities)
        .map(|(&l, &c)| l as i64 - c as i64)
        .max()
        .unwrap()
}

/// Some single jump or swap lowers the potential without raising the
/// maximum excess, checked by recomputing loads from scratch.
pub fn has_improving_move(inst: &Instance, a: &Assignment) -> bool {
    let phi = potential(inst, a.loads());
    let top = max_over(inst, a.loads());
    let improves = |b: &Assignment| potential(inst, b.loads()) < phi && max_over(inst, b.loads()) <= top;
    let placed: Vec<(usize, usize)> = a.placed_items().collect();
    for &(j, from) in &placed {
        for to in (0..inst.num_knapsacks()).filter(|&t| t != from) {
            let mut b = a.clone();
            b.place(inst, j, to);
            if improves(&b) {
                return true;
            }
        }
    }
    for (x, &(p, kp)) in placed.iter().enumerate() {
        for &(q, kq) in &placed[x + 1..] {
            if kp != kq {
                let mut b = a.clone();
                b.place(inst, p, kq);
                b.place(inst, q, kp);
                if improves(&b) {
                    return true;
                }
            }
        }
    }
    false
}
