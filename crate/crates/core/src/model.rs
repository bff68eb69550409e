//! Domain types shared by every solver: instances, selections, assignments
//! and the two-criteria score (reward, maximum exceeded capacity).
//!
//! Weights, capacities and rewards are exact integers. Thresholds and ratios
//! are exact rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = Ratio<i128>;

pub fn rational(num: i128, den: i128) -> Rational {
    Ratio::new(num, den)
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"1.05"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: i128 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10i128.pow(frac.len() as u32);
        let frac: i128 = frac.parse().map_err(|_| bad())?;
        let num = int.abs() * den + frac;
        return Ok(Ratio::new(if negative { -num } else { num }, den));
    }
    s.parse::<i128>().map(Ratio::from_integer).map_err(|_| bad())
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A GMKP instance. Items are indexed globally `0..n`; `groups[l]` lists the
/// item indices of group `l` and `rewards[l]` its reward.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Instance {
    pub capacities: Vec<u64>,
    pub item_weights: Vec<u64>,
    pub groups: Vec<Vec<usize>>,
    pub rewards: Vec<u64>,
    /// Opaque identification (id, seed, generator parameters).
    pub meta: BTreeMap<String, String>,
}

impl Instance {
    /// Builds an instance from `(reward, item weights)` pairs, numbering items
    /// group by group.
    pub fn from_groups(capacities: Vec<u64>, groups: Vec<(u64, Vec<u64>)>) -> Self {
        let mut item_weights = Vec::new();
        let mut index_sets = Vec::with_capacity(groups.len());
        let mut rewards = Vec::with_capacity(groups.len());
        for (reward, weights) in groups {
            let start = item_weights.len();
            item_weights.extend_from_slice(&weights);
            index_sets.push((start..item_weights.len()).collect());
            rewards.push(reward);
        }
        Instance {
            capacities,
            item_weights,
            groups: index_sets,
            rewards,
            meta: BTreeMap::new(),
        }
    }

    /// Same as [`Instance::from_groups`] with every reward equal to the
    /// group's total weight.
    pub fn with_weight_rewards(capacities: Vec<u64>, groups: Vec<Vec<u64>>) -> Self {
        let groups = groups
            .into_iter()
            .map(|g| (g.iter().sum(), g))
            .collect();
        Self::from_groups(capacities, groups)
    }

    pub fn num_knapsacks(&self) -> usize {
        self.capacities.len()
    }

    pub fn num_items(&self) -> usize {
        self.item_weights.len()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn c_max(&self) -> u64 {
        self.capacities.iter().copied().max().unwrap_or(0)
    }

    pub fn c_min(&self) -> u64 {
        self.capacities.iter().copied().min().unwrap_or(0)
    }

    pub fn w_max(&self) -> u64 {
        self.item_weights.iter().copied().max().unwrap_or(0)
    }

    pub fn w_min(&self) -> Option<u64> {
        self.item_weights.iter().copied().min()
    }

    pub fn total_capacity(&self) -> u64 {
        self.capacities.iter().sum()
    }

    pub fn group_weight(&self, group: usize) -> u64 {
        self.groups[group].iter().map(|&j| self.item_weights[j]).sum()
    }

    pub fn group_weights(&self) -> Vec<u64> {
        (0..self.num_groups()).map(|l| self.group_weight(l)).collect()
    }

    pub fn equal_capacities(&self) -> bool {
        self.capacities.windows(2).all(|w| w[0] == w[1])
    }

    /// Group index of every item. Items outside every group map to `usize::MAX`.
    pub fn item_groups(&self) -> Vec<usize> {
        let mut owner = vec![usize::MAX; self.num_items()];
        for (l, g) in self.groups.iter().enumerate() {
            for &j in g {
                if j < owner.len() {
                    owner[j] = l;
                }
            }
        }
        owner
    }

    /// Lists every broken invariant. Empty iff the instance is valid and
    /// normalized.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let m = self.num_knapsacks();
        let n = self.num_items();
        if m < 2 {
            out.push(Violation::TooFewKnapsacks { knapsacks: m });
        }
        for (i, &c) in self.capacities.iter().enumerate() {
            if c == 0 {
                out.push(Violation::NonPositiveCapacity { knapsack: i });
            }
        }
        for (j, &w) in self.item_weights.iter().enumerate() {
            if w == 0 {
                out.push(Violation::NonPositiveWeight { item: j });
            }
        }
        if self.rewards.len() != self.groups.len() {
            out.push(Violation::RewardCountMismatch {
                groups: self.groups.len(),
                rewards: self.rewards.len(),
            });
        }
        for (l, &p) in self.rewards.iter().enumerate() {
            if p == 0 {
                out.push(Violation::NonPositiveReward { group: l });
            }
        }

        let mut seen = vec![false; n];
        let mut structurally_sound = true;
        for (l, g) in self.groups.iter().enumerate() {
            if g.is_empty() {
                out.push(Violation::EmptyGroup { group: l });
            }
            for &j in g {
                if j >= n {
                    out.push(Violation::ItemOutOfRange { group: l, item: j });
                    structurally_sound = false;
                } else if seen[j] {
                    out.push(Violation::ItemInSeveralGroups { item: j });
                    structurally_sound = false;
                } else {
                    seen[j] = true;
                }
            }
        }
        for (j, s) in seen.iter().enumerate() {
            if !s {
                out.push(Violation::ItemWithoutGroup { item: j });
                structurally_sound = false;
            }
        }

        let limit = i64::MAX as u128;
        let sum_c: u128 = self.capacities.iter().map(|&c| c as u128).sum();
        let sum_w: u128 = self.item_weights.iter().map(|&w| w as u128).sum();
        let sum_p: u128 = self.rewards.iter().map(|&p| p as u128).sum();
        for (what, s) in [("capacities", sum_c), ("weights", sum_w), ("rewards", sum_p)] {
            if s > limit {
                out.push(Violation::Overflow { what });
            }
        }
        if !structurally_sound || sum_c > limit || sum_w > limit {
            return out;
        }

        let c_max = self.c_max();
        for (j, &w) in self.item_weights.iter().enumerate() {
            if w > c_max {
                out.push(Violation::WeightAboveMaxCapacity {
                    item: j,
                    weight: w,
                    c_max,
                });
            }
        }
        let total = self.total_capacity();
        for l in 0..self.num_groups() {
            let w = self.group_weight(l);
            if w > total {
                out.push(Violation::GroupHeavierThanTotalCapacity {
                    group: l,
                    weight: w,
                    total_capacity: total,
                });
            }
        }
        if let Some(w_min) = self.w_min() {
            for (i, &c) in self.capacities.iter().enumerate() {
                if c < w_min {
                    out.push(Violation::KnapsackBelowMinWeight {
                        knapsack: i,
                        capacity: c,
                        min_weight: w_min,
                    });
                }
            }
        }
        if !self.groups.is_empty() && self.groups.iter().all(|g| g.len() < 2) {
            out.push(Violation::PlainMultipleKnapsack);
        }
        out
    }

    /// Fails with the fatal violations, if any.
    pub fn ensure_valid(&self) -> Result<()> {
        let fatal: Vec<_> = self
            .validate()
            .into_iter()
            .filter(Violation::is_fatal)
            .collect();
        if fatal.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(fatal))
        }
    }

    /// Removes knapsacks no item fits into and groups that cannot be packed,
    /// repeating until nothing changes.
    pub fn normalize(&self) -> Result<(Instance, NormalizationReport)> {
        if self.capacities.contains(&0) || self.item_weights.contains(&0) {
            return Err(Error::InvalidArgument(
                "weights and capacities must be positive".into(),
            ));
        }
        let owner = self.item_groups();
        if owner.contains(&usize::MAX) || self.rewards.len() != self.groups.len() {
            return Err(Error::InvalidInstance(
                self.validate().into_iter().filter(Violation::is_fatal).collect(),
            ));
        }

        let mut knapsack_alive = vec![true; self.num_knapsacks()];
        let mut group_alive = vec![true; self.num_groups()];
        let group_weights = self.group_weights();
        loop {
            let mut changed = false;
            let min_w = self
                .groups
                .iter()
                .zip(&group_alive)
                .filter(|(_, &a)| a)
                .flat_map(|(g, _)| g.iter().map(|&j| self.item_weights[j]))
                .min();
            if let Some(min_w) = min_w {
                for (i, alive) in knapsack_alive.iter_mut().enumerate() {
                    if *alive && self.capacities[i] < min_w {
                        *alive = false;
                        changed = true;
                    }
                }
            }
            let alive_caps = || {
                self.capacities
                    .iter()
                    .zip(&knapsack_alive)
                    .filter(|(_, &a)| a)
                    .map(|(&c, _)| c)
            };
            let total: u64 = alive_caps().sum();
            let c_max = alive_caps().max().unwrap_or(0);
            for (l, alive) in group_alive.iter_mut().enumerate() {
                if !*alive {
                    continue;
                }
                let too_heavy = group_weights[l] > total
                    || self.groups[l].iter().any(|&j| self.item_weights[j] > c_max);
                if too_heavy {
                    *alive = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let report = NormalizationReport {
            removed_knapsacks: (0..self.num_knapsacks())
                .filter(|&i| !knapsack_alive[i])
                .collect(),
            removed_groups: (0..self.num_groups()).filter(|&l| !group_alive[l]).collect(),
        };
        let remaining = knapsack_alive.iter().filter(|&&a| a).count();
        if remaining < 2 {
            return Err(Error::Normalization(format!(
                "{remaining} knapsack(s) left after removing {:?}; at least 2 are required",
                report.removed_knapsacks
            )));
        }

        let mut new_index = vec![usize::MAX; self.num_items()];
        let mut item_weights = Vec::new();
        for j in 0..self.num_items() {
            if group_alive[owner[j]] {
                new_index[j] = item_weights.len();
                item_weights.push(self.item_weights[j]);
            }
        }
        let mut groups = Vec::new();
        let mut rewards = Vec::new();
        for (l, &alive) in group_alive.iter().enumerate() {
            if alive {
                groups.push(self.groups[l].iter().map(|&j| new_index[j]).collect());
                rewards.push(self.rewards[l]);
            }
        }
        let normalized = Instance {
            capacities: self
                .capacities
                .iter()
                .zip(&knapsack_alive)
                .filter(|(_, &a)| a)
                .map(|(&c, _)| c)
                .collect(),
            item_weights,
            groups,
            rewards,
            meta: self.meta.clone(),
        };
        Ok((normalized, report))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalizationReport {
    /// Original indices of removed knapsacks.
    pub removed_knapsacks: Vec<usize>,
    /// Original indices of removed groups.
    pub removed_groups: Vec<usize>,
}

impl NormalizationReport {
    pub fn is_identity(&self) -> bool {
        self.removed_knapsacks.is_empty() && self.removed_groups.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    TooFewKnapsacks { knapsacks: usize },
    NonPositiveCapacity { knapsack: usize },
    NonPositiveWeight { item: usize },
    NonPositiveReward { group: usize },
    RewardCountMismatch { groups: usize, rewards: usize },
    EmptyGroup { group: usize },
    ItemOutOfRange { group: usize, item: usize },
    ItemInSeveralGroups { item: usize },
    ItemWithoutGroup { item: usize },
    Overflow { what: &'static str },
    WeightAboveMaxCapacity { item: usize, weight: u64, c_max: u64 },
    GroupHeavierThanTotalCapacity { group: usize, weight: u64, total_capacity: u64 },
    KnapsackBelowMinWeight { knapsack: usize, capacity: u64, min_weight: u64 },
    /// Every group is a singleton: a plain multiple knapsack instance.
    PlainMultipleKnapsack,
}

impl Violation {
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Violation::PlainMultipleKnapsack)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            TooFewKnapsacks { knapsacks } => write!(f, "need at least 2 knapsacks, found {knapsacks}"),
            NonPositiveCapacity { knapsack } => write!(f, "knapsack {knapsack} has zero capacity"),
            NonPositiveWeight { item } => write!(f, "item {item} has zero weight"),
            NonPositiveReward { group } => write!(f, "group {group} has zero reward"),
            RewardCountMismatch { groups, rewards } => {
                write!(f, "{groups} groups but {rewards} rewards")
            }
            EmptyGroup { group } => write!(f, "group {group} is empty"),
            ItemOutOfRange { group, item } => write!(f, "group {group} lists unknown item {item}"),
            ItemInSeveralGroups { item } => write!(f, "item {item} belongs to several groups"),
            ItemWithoutGroup { item } => write!(f, "item {item} belongs to no group"),
            Overflow { what } => write!(f, "sum of {what} overflows"),
            WeightAboveMaxCapacity { item, weight, c_max } => {
                write!(f, "item {item} weighs {weight} > largest capacity {c_max}")
            }
            GroupHeavierThanTotalCapacity { group, weight, total_capacity } => write!(
                f,
                "group {group} weighs {weight} > total capacity {total_capacity}"
            ),
            KnapsackBelowMinWeight { knapsack, capacity, min_weight } => write!(
                f,
                "knapsack {knapsack} (capacity {capacity}) is smaller than every item (min {min_weight})"
            ),
            PlainMultipleKnapsack => write!(f, "every group has a single item"),
        }
    }
}

/// Which groups are selected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selection {
    pub chosen: Vec<bool>,
}

impl Selection {
    pub fn none(groups: usize) -> Self {
        Selection {
            chosen: vec![false; groups],
        }
    }

    pub fn from_indices(groups: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::none(groups);
        for l in indices {
            s.chosen[l] = true;
        }
        s
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.chosen.len()).filter(|&l| self.chosen[l]).collect()
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.iter().all(|c| !c)
    }

    pub fn reward(&self, instance: &Instance) -> u64 {
        self.indices().iter().map(|&l| instance.rewards[l]).sum()
    }

    pub fn weight(&self, instance: &Instance) -> u64 {
        self.indices().iter().map(|&l| instance.group_weight(l)).sum()
    }

    /// Items of the chosen groups, in ascending index order.
    pub fn items(&self, instance: &Instance) -> Vec<usize> {
        let mut items: Vec<usize> = self
            .indices()
            .iter()
            .flat_map(|&l| instance.groups[l].iter().copied())
            .collect();
        items.sort_unstable();
        items
    }
}

/// Item-to-knapsack map with per-knapsack loads kept in sync.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    placement: Vec<Option<usize>>,
    loads: Vec<u64>,
}

impl Assignment {
    pub fn empty(instance: &Instance) -> Self {
        Assignment {
            placement: vec![None; instance.num_items()],
            loads: vec![0; instance.num_knapsacks()],
        }
    }

    pub fn from_placement(instance: &Instance, placement: Vec<Option<usize>>) -> Result<Self> {
        if placement.len() != instance.num_items() {
            return Err(Error::Inconsistent(format!(
                "placement covers {} items, instance has {}",
                placement.len(),
                instance.num_items()
            )));
        }
        let mut loads = vec![0; instance.num_knapsacks()];
        for (j, p) in placement.iter().enumerate() {
            if let Some(i) = *p {
                if i >= loads.len() {
                    return Err(Error::Inconsistent(format!(
                        "item {j} placed on unknown knapsack {i}"
                    )));
                }
                loads[i] += instance.item_weights[j];
            }
        }
        Ok(Assignment { placement, loads })
    }

    pub fn placement(&self) -> &[Option<usize>] {
        &self.placement
    }

    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    pub fn knapsack_of(&self, item: usize) -> Option<usize> {
        self.placement[item]
    }

    pub fn place(&mut self, instance: &Instance, item: usize, knapsack: usize) {
        if let Some(old) = self.placement[item] {
            self.loads[old] -= instance.item_weights[item];
        }
        self.placement[item] = Some(knapsack);
        self.loads[knapsack] += instance.item_weights[item];
    }

    pub fn unplace(&mut self, instance: &Instance, item: usize) {
        if let Some(old) = self.placement[item].take() {
            self.loads[old] -= instance.item_weights[item];
        }
    }

    /// Exchanges the knapsacks of two placed items.
    pub fn swap(&mut self, instance: &Instance, a: usize, b: usize) {
        let (ka, kb) = (self.placement[a], self.placement[b]);
        if let (Some(ka), Some(kb)) = (ka, kb) {
            self.place(instance, a, kb);
            self.place(instance, b, ka);
        }
    }

    pub fn placed_items(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.placement
            .iter()
            .enumerate()
            .filter_map(|(j, p)| p.map(|i| (j, i)))
    }

    /// `max_i (load_i - c_i)`; negative means every knapsack has slack.
    pub fn max_exceeded(&self, instance: &Instance) -> i64 {
        max_exceeded_of(&self.loads, &instance.capacities)
    }

    /// Loads recomputed from scratch equal the stored loads.
    pub fn loads_consistent(&self, instance: &Instance) -> bool {
        Assignment::from_placement(instance, self.placement.clone())
            .map(|a| a.loads == self.loads)
            .unwrap_or(false)
    }

    /// Every item of a chosen group is placed; no other item is.
    pub fn check_against(&self, instance: &Instance, selection: &Selection) -> Result<()> {
        if selection.len() != instance.num_groups() {
            return Err(Error::Inconsistent(format!(
                "selection covers {} groups, instance has {}",
                selection.len(),
                instance.num_groups()
            )));
        }
        if self.placement.len() != instance.num_items()
            || self.loads.len() != instance.num_knapsacks()
        {
            return Err(Error::Inconsistent("assignment has the wrong shape".into()));
        }
        for (l, g) in instance.groups.iter().enumerate() {
            for &j in g {
                match (selection.chosen[l], self.placement[j]) {
                    (true, None) => {
                        return Err(Error::Inconsistent(format!(
                            "item {j} of chosen group {l} is not placed"
                        )))
                    }
                    (false, Some(_)) => {
                        return Err(Error::Inconsistent(format!(
                            "item {j} of unchosen group {l} is placed"
                        )))
                    }
                    _ => {}
                }
            }
        }
        if !self.loads_consistent(instance) {
            return Err(Error::Inconsistent("stored loads do not match placement".into()));
        }
        Ok(())
    }
}

pub(crate) fn max_exceeded_of(loads: &[u64], capacities: &[u64]) -> i64 {
    loads
        .iter()
        .zip(capacities)
        .map(|(&l, &c)| l as i64 - c as i64)
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiCriteriaMetrics {
    pub reward: u64,
    pub max_exceeded: i64,
    /// `reward / v*`; absent without an oracle value or when `v* = 0`.
    pub alpha_ratio: Option<Rational>,
    /// `max_exceeded / c_max`; present iff an oracle value was supplied.
    pub beta_ratio: Option<Rational>,
}

pub fn metrics(
    instance: &Instance,
    selection: &Selection,
    assignment: &Assignment,
    oracle_reward: Option<u64>,
) -> Result<BiCriteriaMetrics> {
    assignment.check_against(instance, selection)?;
    let reward = selection.reward(instance);
    let max_exceeded = assignment.max_exceeded(instance);
    let (alpha_ratio, beta_ratio) = match oracle_reward {
        Some(v) => {
            let alpha = (v > 0).then(|| rational(reward as i128, v as i128));
            let c_max = instance.c_max() as i128;
            let beta = (c_max > 0).then(|| rational(max_exceeded as i128, c_max));
            (alpha, beta)
        }
        None => (None, None),
    };
    Ok(BiCriteriaMetrics {
        reward,
        max_exceeded,
        alpha_ratio,
        beta_ratio,
    })
}

/// `max_exceeded / c_max` as an exact rational.
pub fn exceeded_ratio(instance: &Instance, max_exceeded: i64) -> Rational {
    rational(max_exceeded as i128, instance.c_max().max(1) as i128)
}
