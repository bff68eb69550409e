//! Two-stage algorithms: select groups with a relaxation, assign their items
//! greedily, optionally polish with jump/swap local search.

use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::assign::{greedy_assign, swap_optimal};
use crate::error::{Error, Result};
use crate::lp_greedy::greedy_lp;
use crate::model::{metrics, rational, Assignment, BiCriteriaMetrics, Instance, Rational, Selection};
use crate::subset_select::{build_problem, solve_exact};

pub use crate::subset_select::Variant;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolveOptions {
    /// Run jump/swap local search after the greedy assignment.
    pub swap_opt: bool,
    /// Right-hand side of the aggregate capacity row; defaults to the sum of
    /// the capacities.
    pub total_capacity: Option<u64>,
    /// Node budget for the exact selection search.
    pub node_budget: Option<u64>,
}

impl SolveOptions {
    pub fn with_swap_opt(mut self, on: bool) -> Self {
        self.swap_opt = on;
        self
    }

    pub fn with_total_capacity(mut self, total: u64) -> Self {
        self.total_capacity = Some(total);
        self
    }

    pub fn with_node_budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StageTimings {
    pub selection: Duration,
    pub assignment: Duration,
    pub swap_opt: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.selection + self.assignment + self.swap_opt
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    /// Algorithm tag, e.g. `3mkp` or `best(2mkp)`.
    pub algorithm: String,
    pub variant: Variant,
    /// Right-hand side used for the aggregate row.
    pub total_capacity: u64,
    pub selection: Selection,
    pub assignment: Assignment,
    pub metrics: BiCriteriaMetrics,
    pub timings: StageTimings,
    pub swap_opt_applied: bool,
    /// Local-search moves applied (0 without local search).
    pub swap_moves: u64,
}

impl SolveResult {
    /// The solution with nothing selected.
    pub fn empty(instance: &Instance, variant: &Variant, algorithm: impl Into<String>) -> Self {
        let selection = Selection::none(instance.num_groups());
        let assignment = Assignment::empty(instance);
        let metrics = metrics(instance, &selection, &assignment, None).expect("empty solution is consistent");
        SolveResult {
            algorithm: algorithm.into(),
            variant: variant.clone(),
            total_capacity: 0,
            selection,
            assignment,
            metrics,
            timings: StageTimings::default(),
            swap_opt_applied: false,
            swap_moves: 0,
        }
    }

    pub fn reward(&self) -> u64 {
        self.metrics.reward
    }

    pub fn max_exceeded(&self) -> i64 {
        self.metrics.max_exceeded
    }

    /// Capacity-feasible: no knapsack is over capacity.
    pub fn is_feasible(&self) -> bool {
        self.metrics.max_exceeded <= 0
    }
}

/// Group selection stage of `variant` with aggregate capacity `total_capacity`.
pub fn select_groups(
    instance: &Instance,
    variant: &Variant,
    total_capacity: u64,
    node_budget: Option<u64>,
) -> Result<Selection> {
    match variant {
        Variant::Lp => {
            let lp = greedy_lp(instance, total_capacity);
            Ok(Selection {
                chosen: lp.z.iter().map(|z| !z.is_zero()).collect(),
            })
        }
        _ => {
            let problem = build_problem(instance, variant, total_capacity)?;
            Ok(solve_exact(&problem, node_budget)?.selection)
        }
    }
}

/// Runs one algorithm end to end.
pub fn run_algorithm(instance: &Instance, variant: &Variant, options: &SolveOptions) -> Result<SolveResult> {
    instance.ensure_valid()?;
    let total_capacity = options.total_capacity.unwrap_or_else(|| instance.total_capacity());

    let t0 = Instant::now();
    let selection = select_groups(instance, variant, total_capacity, options.node_budget)?;
    let t1 = Instant::now();
    let mut assignment = greedy_assign(instance, &selection);
    let t2 = Instant::now();
    let mut swap_moves = 0;
    if options.swap_opt {
        let out = swap_optimal(instance, &assignment)?;
        assignment = out.assignment;
        swap_moves = out.moves;
    }
    let t3 = Instant::now();

    let metrics = metrics(instance, &selection, &assignment, None)?;
    Ok(SolveResult {
        algorithm: variant.name(),
        variant: variant.clone(),
        total_capacity,
        selection,
        assignment,
        metrics,
        timings: StageTimings {
            selection: t1 - t0,
            assignment: t2 - t1,
            swap_opt: t3 - t2,
        },
        swap_opt_applied: options.swap_opt,
        swap_moves,
    })
}

/// Runs every variant and keeps the one with the smallest maximum exceeded
/// capacity, then the largest reward; earlier variants win ties.
pub fn run_best(instance: &Instance, variants: &[Variant], options: &SolveOptions) -> Result<SolveResult> {
    if variants.is_empty() {
        return Err(Error::InvalidArgument("best needs at least one variant".into()));
    }
    let mut best: Option<SolveResult> = None;
    for v in variants {
        let r = run_algorithm(instance, v, options)?;
        let better = match &best {
            None => true,
            Some(b) => (r.max_exceeded(), std::cmp::Reverse(r.reward())) < (b.max_exceeded(), std::cmp::Reverse(b.reward())),
        };
        if better {
            best = Some(r);
        }
    }
    let mut best = best.expect("non-empty variant list");
    best.algorithm = format!("best({})", best.variant.name());
    Ok(best)
}

/// Checked guarantees of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeReport {
    /// Worst-case `max_exceeded / c_max` promised for this variant and
    /// instance; `None` when no guarantee applies (overridden capacity).
    pub beta: Option<Rational>,
    pub beta_holds: Option<bool>,
    /// `reward >= v*`, when an oracle value is given.
    pub alpha_holds: Option<bool>,
    pub violations: Vec<String>,
}

impl GuaranteeReport {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Promised bound on `max_exceeded / c_max` for `variant` run with the full
/// total capacity on `instance`.
pub fn beta_bound(variant: &Variant, instance: &Instance) -> Rational {
    let equal = instance.equal_capacities();
    let c_max = instance.c_max() as i128;
    let half = rational(c_max, 2);
    let third = rational(c_max, 3);
    let all_heavy = instance.item_weights.iter().all(|&w| 2 * w > instance.c_max());
    let powers = common_power_base(instance).is_some();
    match variant {
        Variant::Lp => rational(2, 1),
        Variant::MkpPrime => {
            if powers {
                Rational::zero()
            } else {
                rational(1, 1)
            }
        }
        Variant::Kp if equal && powers => Rational::zero(),
        _ => {
            let d = variant.thresholds(instance).unwrap_or_default();
            if d.contains(&half) {
                if equal && all_heavy {
                    Rational::zero()
                } else if equal && d.contains(&third) {
                    rational(1, 3)
                } else {
                    rational(1, 2)
                }
            } else {
                rational(1, 1)
            }
        }
    }
}

/// Checks `reward >= v*` and `max_exceeded <= beta * c_max`.
pub fn check_guarantees(result: &SolveResult, instance: &Instance, oracle_reward: Option<u64>) -> GuaranteeReport {
    let mut violations = Vec::new();
    let alpha_holds = oracle_reward.map(|v| {
        let ok = result.reward() >= v;
        if !ok {
            violations.push(format!(
                "{}: reward {} below optimum {v}",
                result.algorithm,
                result.reward()
            ));
        }
        ok
    });
    let applicable = result.total_capacity == instance.total_capacity() && !result.algorithm.starts_with("best");
    let beta = applicable.then(|| beta_bound(&result.variant, instance));
    let beta_holds = beta.map(|b| {
        let limit = b * rational(instance.c_max() as i128, 1);
        let ok = rational(result.max_exceeded() as i128, 1) <= limit;
        if !ok {
            violations.push(format!(
                "{}: max exceeded {} above {} x c_max",
                result.algorithm,
                result.max_exceeded(),
                crate::model::format_rational(&b)
            ));
        }
        ok
    });
    GuaranteeReport {
        beta,
        beta_holds,
        alpha_holds,
        violations,
    }
}

/// Smallest integer `a >= 2` such that every capacity and weight is a power
/// of `a` (`a^0 = 1` included). `Some(2)` when every value is 1.
pub fn common_power_base(instance: &Instance) -> Option<u64> {
    let values: Vec<u64> = instance
        .capacities
        .iter()
        .chain(&instance.item_weights)
        .copied()
        .collect();
    let Some(smallest) = values.iter().copied().filter(|&v| v > 1).min() else {
        return values.iter().all(|&v| v == 1).then_some(2);
    };
    // `a` must be an integer root of the smallest non-trivial value.
    let mut bases: Vec<u64> = (1..64u32)
        .filter_map(|t| integer_root(smallest, t))
        .filter(|&a| a >= 2)
        .collect();
    bases.sort_unstable();
    bases.dedup();
    bases
        .into_iter()
        .find(|&a| values.iter().all(|&v| is_power_of(v, a)))
}

fn integer_root(v: u64, t: u32) -> Option<u64> {
    let guess = (v as f64).powf(1.0 / t as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&a| a.checked_pow(t) == Some(v))
}

fn is_power_of(mut v: u64, a: u64) -> bool {
    if v == 0 {
        return false;
    }
    while v.is_multiple_of(a) {
        v /= a;
    }
    v == 1
}
