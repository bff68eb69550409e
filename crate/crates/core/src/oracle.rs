//! Exact solvers for small instances, used as ground truth.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, Selection};
use crate::subset_select::SelectionProblem;

/// Node budget used when the caller does not give one.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Largest group count accepted by [`enumerate_feasible_z`].
pub const MAX_ENUMERATION_GROUPS: usize = 20;

struct Packer<'a> {
    weights: Vec<u64>,
    items: Vec<usize>,
    residual: Vec<u64>,
    placement: Vec<Option<usize>>,
    suffix: Vec<u64>,
    nodes: u64,
    budget: u64,
    instance: &'a Instance,
}

impl Packer<'_> {
    fn dfs(&mut self, pos: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget {
                what: "feasible_packing",
                limit: self.budget,
            });
        }
        if pos == self.items.len() {
            return Ok(true);
        }
        // Residual smaller than the smallest remaining item can never be used.
        let smallest = *self.weights[pos..].last().expect("pos < len");
        let usable: u64 = self.residual.iter().filter(|&&r| r >= smallest).sum();
        if usable < self.suffix[pos] {
            return Ok(false);
        }
        let w = self.weights[pos];
        let j = self.items[pos];
        let mut tried: Vec<u64> = Vec::with_capacity(self.residual.len());
        for i in 0..self.residual.len() {
            let r = self.residual[i];
            if r < w || tried.contains(&r) {
                continue;
            }
            tried.push(r);
            self.residual[i] -= w;
            self.placement[j] = Some(i);
            if self.dfs(pos + 1)? {
                return Ok(true);
            }
            self.residual[i] += w;
            self.placement[j] = None;
        }
        Ok(false)
    }
}

/// Packs every item of the chosen groups without exceeding any capacity,
/// or reports that no such packing exists. Exhausting the budget is an error.
pub fn feasible_packing(
    instance: &Instance,
    selection: &Selection,
    budget: Option<u64>,
) -> Result<Option<Assignment>> {
    let mut items = selection.items(instance);
    items.sort_by(|&a, &b| instance.item_weights[b].cmp(&instance.item_weights[a]).then(a.cmp(&b)));
    let weights: Vec<u64> = items.iter().map(|&j| instance.item_weights[j]).collect();
    let mut suffix = vec![0; weights.len() + 1];
    for p in (0..weights.len()).rev() {
        suffix[p] = suffix[p + 1] + weights[p];
    }
    let mut packer = Packer {
        weights,
        items,
        residual: instance.capacities.clone(),
        placement: vec![None; instance.num_items()],
        suffix,
        nodes: 0,
        budget: budget.unwrap_or(DEFAULT_BUDGET),
        instance,
    };
    if packer.dfs(0)? {
        Ok(Some(Assignment::from_placement(packer.instance, packer.placement)?))
    } else {
        Ok(None)
    }
}

/// Optimal GMKP solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    /// The optimum `v*`.
    pub value: u64,
    pub selection: Selection,
    /// A capacity-feasible packing of `selection`.
    pub assignment: Assignment,
    /// Group-subset nodes visited.
    pub nodes: u64,
}

struct GroupSearch<'a> {
    instance: &'a Instance,
    order: Vec<usize>,
    reward_suffix: Vec<u64>,
    chosen: Vec<bool>,
    weight: u64,
    reward: u64,
    best: (u64, Selection, Assignment),
    nodes: u64,
    budget: u64,
}

impl GroupSearch<'_> {
    fn remaining_budget(&self) -> Result<u64> {
        self.budget.checked_sub(self.nodes).filter(|&b| b > 0).ok_or(Error::Budget {
            what: "exact_gmkp",
            limit: self.budget,
        })
    }

    fn dfs(&mut self, pos: usize) -> Result<()> {
        self.nodes += 1;
        self.remaining_budget()?;
        if self.reward + self.reward_suffix[pos] <= self.best.0 {
            return Ok(());
        }
        if pos == self.order.len() {
            return Ok(());
        }
        let l = self.order[pos];
        let gw = self.instance.group_weight(l);
        if self.weight + gw <= self.instance.total_capacity() {
            self.chosen[l] = true;
            let selection = Selection {
                chosen: self.chosen.clone(),
            };
            // Subsets of a packable set are packable, so an unpackable
            // partial selection prunes the whole branch.
            let budget = self.remaining_budget()?;
            if let Some(a) = feasible_packing(self.instance, &selection, Some(budget))? {
                self.weight += gw;
                self.reward += self.instance.rewards[l];
                if self.reward > self.best.0 {
                    self.best = (self.reward, selection, a);
                }
                self.dfs(pos + 1)?;
                self.weight -= gw;
                self.reward -= self.instance.rewards[l];
            }
            self.chosen[l] = false;
        }
        self.dfs(pos + 1)
    }
}

/// Maximum-reward selection that packs within the capacities.
pub fn exact_gmkp(instance: &Instance, budget: Option<u64>) -> Result<ExactSolution> {
    instance.ensure_valid()?;
    let k = instance.num_groups();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| instance.rewards[b].cmp(&instance.rewards[a]).then(a.cmp(&b)));
    let mut reward_suffix = vec![0; k + 1];
    for p in (0..k).rev() {
        reward_suffix[p] = reward_suffix[p + 1] + instance.rewards[order[p]];
    }
    let mut search = GroupSearch {
        instance,
        order,
        reward_suffix,
        chosen: vec![false; k],
        weight: 0,
        reward: 0,
        best: (0, Selection::none(k), Assignment::empty(instance)),
        nodes: 0,
        budget: budget.unwrap_or(DEFAULT_BUDGET),
    };
    search.dfs(0)?;
    let (value, selection, assignment) = search.best;
    Ok(ExactSolution {
        value,
        selection,
        assignment,
        nodes: search.nodes,
    })
}

/// Every 0/1 selection satisfying all rows of `problem`.
pub fn enumerate_feasible_z(problem: &SelectionProblem) -> Result<BTreeSet<Selection>> {
    let k = problem.num_groups();
    if k > MAX_ENUMERATION_GROUPS {
        return Err(Error::InvalidArgument(format!(
            "enumeration supports at most {MAX_ENUMERATION_GROUPS} groups, got {k}"
        )));
    }
    let mut out = BTreeSet::new();
    let mut lhs = vec![0u64; problem.rows.len()];
    let mut chosen = vec![false; k];
    enumerate(problem, 0, &mut lhs, &mut chosen, &mut out);
    Ok(out)
}

fn enumerate(
    problem: &SelectionProblem,
    l: usize,
    lhs: &mut [u64],
    chosen: &mut [bool],
    out: &mut BTreeSet<Selection>,
) {
    if l == chosen.len() {
        out.insert(Selection {
            chosen: chosen.to_vec(),
        });
        return;
    }
    enumerate(problem, l + 1, lhs, chosen, out);
    // Coefficients are non-negative, so a violated partial sum stays violated.
    let fits = problem.rows.iter().zip(lhs.iter()).all(|(r, &s)| s + r.coeffs[l] <= r.rhs);
    if fits {
        for (r, s) in problem.rows.iter().zip(lhs.iter_mut()) {
            *s += r.coeffs[l];
        }
        chosen[l] = true;
        enumerate(problem, l + 1, lhs, chosen, out);
        chosen[l] = false;
        for (r, s) in problem.rows.iter().zip(lhs.iter_mut()) {
            *s -= r.coeffs[l];
        }
    }
}
