//! Item assignment: greedy heaviest-first placement onto the knapsack with the
//! most free capacity, and jump/swap local search.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, Selection};

/// Places every item of the chosen groups, heaviest first (ties by item
/// index), each on the knapsack minimizing `load - capacity` (ties by
/// knapsack index).
pub fn greedy_assign(instance: &Instance, selection: &Selection) -> Assignment {
    let mut items = selection.items(instance);
    items.sort_by(|&a, &b| {
        instance.item_weights[b]
            .cmp(&instance.item_weights[a])
            .then(a.cmp(&b))
    });
    let mut assignment = Assignment::empty(instance);
    let mut heap: BinaryHeap<Reverse<(i64, usize)>> = instance
        .capacities
        .iter()
        .enumerate()
        .map(|(i, &c)| Reverse((-(c as i64), i)))
        .collect();
    for j in items {
        let Reverse((over, i)) = heap.pop().expect("at least one knapsack");
        assignment.place(instance, j, i);
        heap.push(Reverse((over + instance.item_weights[j] as i64, i)));
    }
    assignment
}

/// A single local-search move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Move `item` to knapsack `to`.
    Jump { item: usize, to: usize },
    /// Exchange the knapsacks of two items.
    Swap { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapOutcome {
    pub assignment: Assignment,
    /// Improving moves applied.
    pub moves: u64,
    /// Maximum number of moves allowed before giving up.
    pub guard: u64,
}

/// `sum_i (load_i - c_i + c_max)^2`, the potential local search decreases.
pub fn potential(instance: &Instance, loads: &[u64]) -> u128 {
    let c_max = instance.c_max() as i128;
    loads
        .iter()
        .zip(&instance.capacities)
        .map(|(&l, &c)| {
            let v = l as i128 - c as i128 + c_max;
            (v * v) as u128
        })
        .sum()
}

/// Applies improving jumps and swaps until none is left.
///
/// A move improves iff it strictly decreases [`potential`] and does not raise
/// the maximum exceeded capacity. Moves are scanned in a fixed order (all
/// jumps by item then target, then all swaps by item pair) and the first
/// improving one is applied before rescanning.
pub fn swap_optimal(instance: &Instance, assignment: &Assignment) -> Result<SwapOutcome> {
    let n = instance.num_items() as u128;
    let m = instance.num_knapsacks() as u128;
    let phi0 = potential(instance, assignment.loads());
    let guard = (n * n).saturating_mul(m).saturating_mul(phi0.max(1));
    let guard = u64::try_from(guard).unwrap_or(u64::MAX);

    let mut current = assignment.clone();
    let mut moves = 0u64;
    while let Some(mv) = first_improving_move(instance, &current) {
        match mv {
            Move::Jump { item, to } => current.place(instance, item, to),
            Move::Swap { a, b } => current.swap(instance, a, b),
        }
        moves += 1;
        if moves > guard {
            return Err(Error::StepGuard { guard });
        }
    }
    Ok(SwapOutcome {
        assignment: current,
        moves,
        guard,
    })
}

/// First improving move in scan order, if any.
pub fn first_improving_move(instance: &Instance, assignment: &Assignment) -> Option<Move> {
    let loads = assignment.loads();
    let over: Vec<i64> = loads
        .iter()
        .zip(&instance.capacities)
        .map(|(&l, &c)| l as i64 - c as i64)
        .collect();
    let max_over = over.iter().copied().max().unwrap_or(0);
    let placed: Vec<(usize, usize)> = assignment.placed_items().collect();
    let w = |j: usize| instance.item_weights[j] as i64;

    for &(j, from) in &placed {
        for to in 0..instance.num_knapsacks() {
            if to == from {
                continue;
            }
            // Potential drops iff over[to] + w < over[from].
            if over[to] + w(j) < over[from] && over[to] + w(j) <= max_over {
                return Some(Move::Jump { item: j, to });
            }
        }
    }
    for (x, &(a, ka)) in placed.iter().enumerate() {
        for &(b, kb) in &placed[x + 1..] {
            if ka == kb {
                continue;
            }
            let delta = w(a) - w(b);
            if delta == 0 {
                continue;
            }
            // Knapsack ka loses delta, kb gains it.
            let improves = delta * (over[kb] - over[ka] + delta) < 0;
            let new_a = over[ka] - delta;
            let new_b = over[kb] + delta;
            if improves && new_a <= max_over && new_b <= max_over {
                return Some(Move::Swap { a, b });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kp_tight_fixture_loads() {
        let inst = Instance::with_weight_rewards(vec![4, 4, 4], vec![vec![3, 3, 3, 3]]);
        let a = greedy_assign(&inst, &Selection::from_indices(1, [0]));
        assert_eq!(a.loads(), &[6, 3, 3]);
        assert_eq!(a.max_exceeded(&inst), 2);
    }

    #[test]
    fn three_mkp_tight_fixture_loads() {
        let inst = Instance::with_weight_rewards(vec![9, 9, 9], vec![vec![8, 8, 8, 3]]);
        let a = greedy_assign(&inst, &Selection::from_indices(1, [0]));
        assert_eq!(a.loads(), &[11, 8, 8]);
        assert_eq!(a.max_exceeded(&inst), 2);
    }

    #[test]
    fn empty_selection_places_nothing() {
        let inst = Instance::with_weight_rewards(vec![4, 4], vec![vec![3, 3]]);
        let a = greedy_assign(&inst, &Selection::none(1));
        assert_eq!(a.loads(), &[0, 0]);
        assert!(a.placement().iter().all(Option::is_none));
    }

    #[test]
    fn heterogeneous_capacities_prefer_most_free_space() {
        let inst = Instance::with_weight_rewards(vec![3, 10], vec![vec![2, 2]]);
        let a = greedy_assign(&inst, &Selection::from_indices(1, [0]));
        assert_eq!(a.loads(), &[0, 4]);
    }

    #[test]
    fn swap_optimal_keeps_fixed_point() {
        let inst = Instance::with_weight_rewards(vec![4, 4, 4], vec![vec![3, 3, 3, 3]]);
        let a = greedy_assign(&inst, &Selection::from_indices(1, [0]));
        let out = swap_optimal(&inst, &a).unwrap();
        assert_eq!(out.moves, 0);
        assert_eq!(out.assignment, a);
    }

    #[test]
    fn swap_optimal_balances_two_knapsacks() {
        let inst = Instance::with_weight_rewards(vec![10, 10], vec![vec![7, 7, 2, 2]]);
        let a = Assignment::from_placement(&inst, vec![Some(0), Some(0), Some(1), Some(1)]).unwrap();
        assert_eq!(a.loads(), &[14, 4]);
        let out = swap_optimal(&inst, &a).unwrap();
        assert_eq!(out.assignment.loads(), &[9, 9]);
        assert!(first_improving_move(&inst, &out.assignment).is_none());
        assert!(out.moves <= out.guard);
    }
}
