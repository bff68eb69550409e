//! Capacity-feasible binary search and capacity sweeps with Pareto filtering.

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{rational, Instance, Rational};
use crate::pipeline::{run_algorithm, SolveOptions, SolveResult, Variant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleOptions {
    pub swap_opt: bool,
    /// Maximum number of probes; the incumbent is returned once exhausted.
    pub step_budget: Option<u32>,
    pub node_budget: Option<u64>,
}

impl Default for FeasibleOptions {
    fn default() -> Self {
        FeasibleOptions {
            swap_opt: true,
            step_budget: None,
            node_budget: None,
        }
    }
}

/// One probe of the binary search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Probe {
    pub total_capacity: u64,
    pub reward: u64,
    pub max_exceeded: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleOutcome {
    /// Best capacity-feasible solution found; the empty solution at worst.
    pub result: SolveResult,
    pub probes: Vec<Probe>,
    /// Set when the search stopped early (budget or a failed probe).
    pub warning: Option<String>,
}

/// `ceil(log2(total + 1)) + 1`, the most probes the search can make.
pub fn iteration_bound(total_capacity: u64) -> u32 {
    // ceil(log2(x)) for x = total + 1 >= 1 is the bit length of x - 1.
    let ceil_log = 64 - total_capacity.leading_zeros();
    ceil_log + 1
}

/// Binary search on the aggregate capacity until the solution fits the real
/// capacities. Keeps the feasible probe with the largest reward.
pub fn binary_search_feasible(
    instance: &Instance,
    variant: &Variant,
    options: &FeasibleOptions,
) -> Result<FeasibleOutcome> {
    instance.ensure_valid()?;
    let mut best = SolveResult::empty(instance, variant, variant.name());
    let mut probes = Vec::new();
    let mut warning = None;

    let (mut left, mut right) = (0i128, instance.total_capacity() as i128);
    while left <= right {
        if options.step_budget.is_some_and(|b| probes.len() as u32 >= b) {
            warning = Some(format!("step budget of {} probes exhausted", probes.len()));
            break;
        }
        let total = ((left + right) / 2) as u64;
        let solve = SolveOptions {
            swap_opt: options.swap_opt,
            total_capacity: Some(total),
            node_budget: options.node_budget,
        };
        let r = match run_algorithm(instance, variant, &solve) {
            Ok(r) => r,
            Err(e) => {
                warning = Some(format!("probe at total capacity {total} failed: {e}"));
                break;
            }
        };
        probes.push(Probe {
            total_capacity: total,
            reward: r.reward(),
            max_exceeded: r.max_exceeded(),
        });
        if r.is_feasible() {
            if r.reward() > best.reward() || best.selection.is_empty() {
                best = r;
            }
            left = total as i128 + 1;
        } else {
            right = total as i128 - 1;
        }
    }
    Ok(FeasibleOutcome {
        result: best,
        probes,
        warning,
    })
}

/// `3/4, 4/5, ..., 5/4`: eleven factors in steps of `1/20`.
pub fn default_factors() -> Vec<Rational> {
    (0..=10).map(|i| rational(15 + i, 20)).collect()
}

#[derive(Debug)]
pub struct SweepPoint {
    pub factor: Rational,
    pub total_capacity: u64,
    pub outcome: Result<SolveResult>,
}

/// Solves once per factor with aggregate capacity `floor(factor * sum c)`.
/// Factors run in parallel; a failing factor does not affect the others.
pub fn capacity_sweep(
    instance: &Instance,
    variant: &Variant,
    factors: &[Rational],
    options: &SolveOptions,
) -> Result<Vec<SweepPoint>> {
    instance.ensure_valid()?;
    if let Some(f) = factors.iter().find(|f| **f <= Rational::zero()) {
        return Err(Error::InvalidArgument(format!("sweep factor {f} is not positive")));
    }
    let sum = rational(instance.total_capacity() as i128, 1);
    Ok(factors
        .par_iter()
        .map(|&factor| {
            let total = (factor * sum).floor().to_integer().to_u64().unwrap_or(u64::MAX);
            let opts = SolveOptions {
                total_capacity: Some(total),
                ..options.clone()
            };
            SweepPoint {
                factor,
                total_capacity: total,
                outcome: run_algorithm(instance, variant, &opts),
            }
        })
        .collect())
}

/// `a` dominates `b`: no worse on both criteria, better on one.
pub fn dominates(a: (u64, i64), b: (u64, i64)) -> bool {
    a.0 >= b.0 && a.1 <= b.1 && a != b
}

/// Indices of the non-dominated `(reward, max_exceeded)` points, by
/// ascending `max_exceeded`, input order among ties.
pub fn pareto_indices(points: &[(u64, i64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    // Best reward first within one excess level, so a single sweep suffices.
    order.sort_by(|&a, &b| points[a].1.cmp(&points[b].1).then(points[b].0.cmp(&points[a].0)).then(a.cmp(&b)));
    let mut keep = Vec::new();
    let mut best: Option<(u64, i64)> = None;
    for i in order {
        let p = points[i];
        match best {
            Some(b) if dominates(b, p) => {}
            _ => {
                keep.push(i);
                if best.is_none_or(|b| p.0 > b.0) {
                    best = Some(p);
                }
            }
        }
    }
    keep.sort_by(|&a, &b| points[a].1.cmp(&points[b].1).then(a.cmp(&b)));
    keep
}

/// Results not dominated by any other result.
pub fn pareto_frontier(results: &[SolveResult]) -> Vec<SolveResult> {
    let points: Vec<(u64, i64)> = results.iter().map(|r| (r.reward(), r.max_exceeded())).collect();
    pareto_indices(&points).into_iter().map(|i| results[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_bound_values() {
        assert_eq!(iteration_bound(0), 1);
        assert_eq!(iteration_bound(1), 2);
        assert_eq!(iteration_bound(21), 6);
        assert_eq!(iteration_bound(31), 6);
        assert_eq!(iteration_bound(32), 7);
    }

    #[test]
    fn unpackable_single_group_ends_empty() {
        let inst = Instance::with_weight_rewards(vec![7, 7, 7], vec![vec![3; 7]]);
        let out = binary_search_feasible(&inst, &Variant::TwoMkp, &FeasibleOptions::default()).unwrap();
        assert_eq!(out.result.reward(), 0);
        assert_eq!(out.result.max_exceeded(), -7);
        assert!(out.probes.len() as u32 <= iteration_bound(21));
        assert!(out.warning.is_none());
    }

    #[test]
    fn feasible_search_stays_below_optimum() {
        let inst = Instance::from_groups(vec![10, 10], vec![(12, vec![6, 6]), (9, vec![9])]);
        let out = binary_search_feasible(&inst, &Variant::Kp, &FeasibleOptions::default()).unwrap();
        assert!(out.result.max_exceeded() <= 0);
        assert!(out.result.reward() <= 12);
    }

    #[test]
    fn step_budget_returns_incumbent() {
        let inst = Instance::from_groups(vec![10, 10], vec![(12, vec![6, 6]), (9, vec![9])]);
        let opts = FeasibleOptions {
            step_budget: Some(1),
            ..FeasibleOptions::default()
        };
        let out = binary_search_feasible(&inst, &Variant::Kp, &opts).unwrap();
        assert_eq!(out.probes.len(), 1);
        assert!(out.warning.is_some());
        assert!(out.result.max_exceeded() <= 0);
    }

    #[test]
    fn sweep_rejects_nonpositive_factor() {
        let inst = Instance::with_weight_rewards(vec![4, 4], vec![vec![3]]);
        let err = capacity_sweep(&inst, &Variant::Kp, &[rational(0, 1)], &SolveOptions::default());
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn factor_one_matches_default_run() {
        let inst = Instance::with_weight_rewards(vec![4, 4, 4], vec![vec![4, 4, 3], vec![3, 3, 3, 3]]);
        let opts = SolveOptions::default().with_swap_opt(true);
        let sweep = capacity_sweep(&inst, &Variant::ThreeMkp, &[rational(1, 1)], &opts).unwrap();
        let direct = run_algorithm(&inst, &Variant::ThreeMkp, &opts).unwrap();
        let r = sweep[0].outcome.as_ref().unwrap();
        assert_eq!(r.selection, direct.selection);
        assert_eq!(r.assignment, direct.assignment);
    }

    #[test]
    fn default_sweep_has_eleven_monotone_rows() {
        let inst = Instance::with_weight_rewards(vec![10, 10, 10], vec![vec![4, 4], vec![6, 5], vec![9], vec![3, 3, 2]]);
        let f = default_factors();
        assert_eq!(f.len(), 11);
        assert_eq!(f[0], rational(3, 4));
        assert_eq!(f[10], rational(5, 4));
        let sweep = capacity_sweep(&inst, &Variant::TwoMkp, &f, &SolveOptions::default().with_swap_opt(true)).unwrap();
        let rewards: Vec<u64> = sweep.iter().map(|p| p.outcome.as_ref().unwrap().reward()).collect();
        assert!(rewards.windows(2).all(|w| w[0] <= w[1]), "{rewards:?}");
    }

    #[test]
    fn frontier_examples() {
        assert_eq!(pareto_indices(&[(10, 0), (8, 0)]), vec![0]);
        assert_eq!(pareto_indices(&[(10, 0), (12, 3)]), vec![0, 1]);
        assert_eq!(pareto_indices(&[(12, 3), (10, 0)]), vec![1, 0]);
        assert_eq!(pareto_indices(&[(5, 1), (5, 1)]), vec![0, 1]);
        assert!(pareto_indices(&[]).is_empty());
    }
}
