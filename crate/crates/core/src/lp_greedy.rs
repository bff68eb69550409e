//! Greedy solver for the linear relaxation: groups in non-increasing
//! reward-to-weight order fill the knapsacks one after the other, the last
//! group that does not fit entirely is taken fractionally.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::model::{rational, Instance, Rational};

/// Solution of the linear relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalSolution {
    /// Fraction of every group that is selected.
    pub z: Vec<Rational>,
    /// Fraction of item `j` held by knapsack `i`, keyed by `(i, j)`.
    pub x: BTreeMap<(usize, usize), Rational>,
    /// Capacity multiplier applied to every knapsack while placing items.
    /// `1` unless the budget exceeds the real total capacity.
    pub capacity_scale: Rational,
    /// Number of fractional placements performed; bounded by `n + m`.
    pub placement_steps: usize,
}

impl FractionalSolution {
    pub fn objective(&self, instance: &Instance) -> Rational {
        self.z
            .iter()
            .zip(&instance.rewards)
            .map(|(z, &p)| z * rational(p as i128, 1))
            .sum()
    }

    /// Weight of the item fractions held by every knapsack.
    pub fn loads(&self, instance: &Instance) -> Vec<Rational> {
        let mut loads = vec![Rational::zero(); instance.num_knapsacks()];
        for (&(i, j), x) in &self.x {
            loads[i] += x * rational(instance.item_weights[j] as i128, 1);
        }
        loads
    }

    /// Groups with `0 < z < 1`.
    pub fn partial_groups(&self) -> Vec<usize> {
        (0..self.z.len())
            .filter(|&l| self.z[l] > Rational::zero() && self.z[l] < Rational::one())
            .collect()
    }
}

/// Group indices by non-increasing `reward / total weight`, ties by index.
pub fn sort_groups(instance: &Instance) -> Vec<usize> {
    let weights = instance.group_weights();
    let mut order: Vec<usize> = (0..instance.num_groups()).collect();
    order.sort_by(|&a, &b| compare_ratio(instance.rewards[b], weights[b], instance.rewards[a], weights[a]).then(a.cmp(&b)));
    order
}

/// Compares `pa / wa` with `pb / wb` without division.
pub(crate) fn compare_ratio(pa: u64, wa: u64, pb: u64, wb: u64) -> Ordering {
    (pa as u128 * wb as u128).cmp(&(pb as u128 * wa as u128))
}

/// Fills the knapsacks greedily with at most `total_capacity` weight.
pub fn greedy_lp(instance: &Instance, total_capacity: u64) -> FractionalSolution {
    let k = instance.num_groups();
    let m = instance.num_knapsacks();
    let real_total = instance.total_capacity();
    let budget = rational(total_capacity as i128, 1);
    let scale = if total_capacity > real_total && real_total > 0 {
        rational(total_capacity as i128, real_total as i128)
    } else {
        Rational::one()
    };

    let mut z = vec![Rational::zero(); k];
    let mut x = BTreeMap::new();
    let mut steps = 0;

    let mut knapsack = 0;
    let mut knapsack_weight = Rational::zero();
    let mut total_weight = Rational::zero();
    for l in sort_groups(instance) {
        if knapsack >= m {
            break;
        }
        let remaining = budget - total_weight;
        if remaining <= Rational::zero() {
            break;
        }
        let group_weight = rational(instance.group_weight(l) as i128, 1);
        let zl = (remaining / group_weight).min(Rational::one());
        z[l] = zl;
        for &j in &instance.groups[l] {
            let w = rational(instance.item_weights[j] as i128, 1);
            let mut item_weight = zl * w;
            while item_weight > Rational::zero() && knapsack < m {
                let cap = rational(instance.capacities[knapsack] as i128, 1) * scale;
                let amount = item_weight.min(cap - knapsack_weight);
                x.insert((knapsack, j), amount / w);
                item_weight -= amount;
                knapsack_weight += amount;
                total_weight += amount;
                steps += 1;
                if knapsack_weight == cap {
                    knapsack_weight = Rational::zero();
                    knapsack += 1;
                }
            }
        }
    }

    FractionalSolution {
        z,
        x,
        capacity_scale: scale,
        placement_steps: steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_ratios_keep_index_order() {
        let inst = Instance::from_groups(vec![5, 5], vec![(3, vec![3]), (3, vec![3])]);
        assert_eq!(sort_groups(&inst), vec![0, 1]);
    }

    #[test]
    fn higher_ratio_first() {
        let inst = Instance::from_groups(vec![5, 5], vec![(10, vec![5]), (9, vec![3])]);
        assert_eq!(sort_groups(&inst), vec![1, 0]);
    }

    #[test]
    fn group_that_fits_is_taken_whole() {
        let inst = Instance::from_groups(vec![4, 4, 4], vec![(1, vec![4, 4, 3])]);
        let sol = greedy_lp(&inst, inst.total_capacity());
        assert_eq!(sol.z, vec![Rational::one()]);
        assert_eq!(
            sol.loads(&inst),
            vec![rational(4, 1), rational(4, 1), rational(3, 1)]
        );
        assert_eq!(sol.x.len(), 3);
    }

    #[test]
    fn lp_tight_fixture() {
        let inst = Instance::with_weight_rewards(vec![4, 4, 4], vec![vec![4, 4, 3], vec![3, 3, 3, 3]]);
        assert_eq!(sort_groups(&inst), vec![0, 1]);
        let sol = greedy_lp(&inst, inst.total_capacity());
        assert_eq!(sol.z, vec![Rational::one(), rational(1, 12)]);
        assert_eq!(sol.partial_groups(), vec![1]);
        assert_eq!(sol.objective(&inst), rational(12, 1));
        // Item 2 (weight 3) fills knapsack 2 to 3; item 3 tops it up with 1/12 of itself.
        assert_eq!(sol.x[&(2, 3)], rational(1, 12));
    }

    #[test]
    fn zero_budget_selects_nothing() {
        let inst = Instance::with_weight_rewards(vec![4, 4], vec![vec![2, 2], vec![3]]);
        let sol = greedy_lp(&inst, 0);
        assert!(sol.z.iter().all(Zero::is_zero));
        assert!(sol.x.is_empty());
    }

    #[test]
    fn item_split_across_knapsacks() {
        let inst = Instance::with_weight_rewards(vec![4, 4], vec![vec![3, 3]]);
        let sol = greedy_lp(&inst, 8);
        assert_eq!(sol.x[&(0, 1)], rational(1, 3));
        assert_eq!(sol.x[&(1, 1)], rational(2, 3));
    }

    #[test]
    fn oversized_budget_scales_capacities() {
        let inst = Instance::with_weight_rewards(vec![4, 4], vec![vec![4, 4], vec![2]]);
        let sol = greedy_lp(&inst, 10);
        assert_eq!(sol.z, vec![Rational::one(), Rational::one()]);
        assert_eq!(sol.capacity_scale, rational(5, 4));
    }
}
