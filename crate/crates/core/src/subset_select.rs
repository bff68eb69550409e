//! Group-selection subproblems and their exact solvers.
//!
//! Every relaxation is a 0/1 problem over group variables: maximize the
//! total reward subject to a list of rows `coeffs . z <= rhs`. Row 0 always
//! aggregates the item weights against the total capacity. The other rows
//! come from threshold functions of the weights (see [`f_d`]) or from plain
//! floor division ([`Variant::MkpPrime`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lp_greedy::compare_ratio;
use crate::model::{format_rational, parse_rational, rational, Instance, Rational, Selection};

/// Largest integer strictly below `y / d`: how many pieces slightly heavier
/// than `d` fit into `y`.
pub fn f_d(y: u64, d: &Rational) -> u64 {
    debug_assert!(*d > Rational::zero());
    let (a, b) = (*d.numer(), *d.denom());
    let v = Integer::div_floor(&(y as i128 * b - 1), &a);
    v.max(0) as u64
}

/// Selection rule used by an algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Greedy linear relaxation; every group with positive fraction is taken.
    Lp,
    /// Single aggregate capacity row.
    Kp,
    /// Aggregate row plus the `c_max / 2` threshold row.
    TwoMkp,
    /// Aggregate row plus the `c_max / 2` and `c_max / 3` threshold rows.
    ThreeMkp,
    /// Aggregate row plus one threshold row per listed value.
    MkpD(BTreeSet<Rational>),
    /// Threshold rows for `c_max / q`, `q = 2..=max_q` (the "100mKP"
    /// configuration is `max_q = 100`).
    MkpQ { max_q: u32 },
    /// Aggregate row plus floor rows for every weight above the smallest
    /// capacity.
    MkpPrime,
}

impl Variant {
    pub fn name(&self) -> String {
        match self {
            Variant::Lp => "lp".into(),
            Variant::Kp => "kp".into(),
            Variant::TwoMkp => "2mkp".into(),
            Variant::ThreeMkp => "3mkp".into(),
            Variant::MkpD(d) => format!(
                "mkpd[{}]",
                d.iter().map(format_rational).collect::<Vec<_>>().join(",")
            ),
            Variant::MkpQ { max_q } => format!("{max_q}mkp"),
            Variant::MkpPrime => "mkp-prime".into(),
        }
    }

    /// The variants compared in the computational study, in that order.
    pub fn study_set() -> Vec<Variant> {
        vec![
            Variant::Lp,
            Variant::Kp,
            Variant::TwoMkp,
            Variant::ThreeMkp,
            Variant::MkpQ { max_q: 100 },
        ]
    }

    /// Threshold set `D` this variant adds on top of the aggregate row, if it
    /// is a threshold variant.
    pub fn thresholds(&self, instance: &Instance) -> Option<BTreeSet<Rational>> {
        let c_max = instance.c_max() as i128;
        match self {
            Variant::Kp => Some(BTreeSet::new()),
            Variant::TwoMkp => Some([rational(c_max, 2)].into()),
            Variant::ThreeMkp => Some([rational(c_max, 2), rational(c_max, 3)].into()),
            Variant::MkpD(d) => Some(d.clone()),
            Variant::MkpQ { max_q } => {
                Some((2..=*max_q as i128).map(|q| rational(c_max, q)).collect())
            }
            Variant::Lp | Variant::MkpPrime => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts `lp`, `kp`, `2mkp`, `3mkp`, `<q>mkp`, `mkp-prime` and
    /// `mkpd:<d1>,<d2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let v = match lower.as_str() {
            "lp" => Variant::Lp,
            "kp" => Variant::Kp,
            "2mkp" => Variant::TwoMkp,
            "3mkp" => Variant::ThreeMkp,
            "mkp-prime" | "mkpprime" | "mkp'" => Variant::MkpPrime,
            other => {
                if let Some(list) = other.strip_prefix("mkpd:") {
                    Variant::MkpD(parse_d_set(list)?)
                } else if let Some(q) = other.strip_suffix("mkp") {
                    let max_q: u32 = q
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("unknown algorithm {s:?}")))?;
                    if max_q < 2 {
                        return Err(Error::InvalidArgument(format!("unknown algorithm {s:?}")));
                    }
                    Variant::MkpQ { max_q }
                } else {
                    return Err(Error::InvalidArgument(format!("unknown algorithm {s:?}")));
                }
            }
        };
        Ok(v)
    }
}

/// Parses a comma-separated list of positive rationals (`100/2,100/3,...`).
pub fn parse_d_set(list: &str) -> Result<BTreeSet<Rational>> {
    let mut out = BTreeSet::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let d = parse_rational(part)?;
        if d <= Rational::zero() {
            return Err(Error::InvalidArgument(format!("threshold {part:?} must be positive")));
        }
        out.insert(d);
    }
    Ok(out)
}

/// Origin of a constraint row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowTag {
    Aggregate,
    Threshold(Rational),
    Floor(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<u64>,
    pub rhs: u64,
    pub tag: RowTag,
}

impl Row {
    pub fn lhs(&self, selection: &Selection) -> u64 {
        self.coeffs
            .iter()
            .zip(&selection.chosen)
            .filter(|(_, &c)| c)
            .map(|(&a, _)| a)
            .sum()
    }
}

/// `max rewards . z` subject to every row, `z` binary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionProblem {
    pub rewards: Vec<u64>,
    pub rows: Vec<Row>,
}

impl SelectionProblem {
    pub fn num_groups(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_feasible(&self, selection: &Selection) -> bool {
        self.rows.iter().all(|r| r.lhs(selection) <= r.rhs)
    }

    pub fn value(&self, selection: &Selection) -> u64 {
        self.rewards
            .iter()
            .zip(&selection.chosen)
            .filter(|(_, &c)| c)
            .map(|(&p, _)| p)
            .sum()
    }
}

/// Threshold values `c_i / q` inside `[1, w_max)`.
///
/// Smaller thresholds add nothing. With `s = 1/d`, `f_d(y) = ceil(y s) - 1`
/// for integer `y >= 1`, so moving from `s` to `s + N` adds
/// `N (sum c - sum w)` to the slack of a row. Any selection passing the
/// aggregate row has `sum w <= sum c`, hence the row of `c_i / q` with
/// `q > c_i` is implied by the row of `c_i / (q - N c_i)` with
/// `1 <= q - N c_i <= c_i`.
pub fn canonical_d(instance: &Instance) -> BTreeSet<Rational> {
    if instance.num_items() == 0 {
        return BTreeSet::new();
    }
    let w_max = instance.w_max();
    let caps: BTreeSet<u64> = instance.capacities.iter().copied().collect();
    let mut out = BTreeSet::new();
    for c in caps {
        // c / q < w_max  <=>  q > c / w_max
        for q in c / w_max + 1..=c {
            out.insert(rational(c as i128, q as i128));
        }
    }
    out
}

/// Builds the constraint rows of a relaxation.
///
/// `total_capacity` replaces the right-hand side of the aggregate row only.
/// Rows with all-zero coefficients are dropped; rows with identical
/// coefficients are merged keeping the smallest right-hand side.
pub fn build_problem(
    instance: &Instance,
    variant: &Variant,
    total_capacity: u64,
) -> Result<SelectionProblem> {
    let k = instance.num_groups();
    let mut rows = vec![Row {
        coeffs: instance.group_weights(),
        rhs: total_capacity,
        tag: RowTag::Aggregate,
    }];

    if let Some(ds) = variant.thresholds(instance) {
        for d in ds {
            if d <= Rational::zero() {
                return Err(Error::InvalidArgument(format!(
                    "threshold {} must be positive",
                    format_rational(&d)
                )));
            }
            rows.push(Row {
                coeffs: group_sums(instance, |w| f_d(w, &d)),
                rhs: instance.capacities.iter().map(|&c| f_d(c, &d)).sum(),
                tag: RowTag::Threshold(d),
            });
        }
    } else if *variant == Variant::MkpPrime {
        let c_min = instance.c_min();
        let ds: BTreeSet<u64> = instance
            .item_weights
            .iter()
            .copied()
            .filter(|&w| w > c_min)
            .collect();
        for d in ds {
            rows.push(Row {
                coeffs: group_sums(instance, |w| w / d),
                rhs: instance.capacities.iter().map(|&c| c / d).sum(),
                tag: RowTag::Floor(d),
            });
        }
    } else {
        return Err(Error::InvalidArgument(format!(
            "{variant} has no selection problem"
        )));
    }

    let mut merged: Vec<Row> = Vec::with_capacity(rows.len());
    let mut by_coeffs: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for (idx, row) in rows.into_iter().enumerate() {
        if idx > 0 && row.coeffs.iter().all(|&a| a == 0) {
            continue;
        }
        match by_coeffs.get(&row.coeffs) {
            Some(&at) if idx > 0 => {
                if row.rhs < merged[at].rhs {
                    if at == 0 {
                        merged[at].rhs = row.rhs;
                    } else {
                        merged[at] = row;
                    }
                }
            }
            _ => {
                by_coeffs.insert(row.coeffs.clone(), merged.len());
                merged.push(row);
            }
        }
    }
    debug_assert_eq!(merged[0].coeffs.len(), k);
    Ok(SelectionProblem {
        rewards: instance.rewards.clone(),
        rows: merged,
    })
}

fn group_sums(instance: &Instance, f: impl Fn(u64) -> u64) -> Vec<u64> {
    instance
        .groups
        .iter()
        .map(|g| g.iter().map(|&j| f(instance.item_weights[j])).sum())
        .collect()
}

/// Pseudo-polynomial dynamic program for one-row problems.
pub fn solve_dp_single_row(problem: &SelectionProblem) -> Result<Selection> {
    if problem.rows.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "single-row dynamic program given {} rows",
            problem.rows.len()
        )));
    }
    solve_dp(problem)
}

/// Dynamic program over the right-hand sides of up to two rows.
pub fn solve_dp(problem: &SelectionProblem) -> Result<Selection> {
    let k = problem.num_groups();
    let (r0, r1, a1) = match problem.rows.as_slice() {
        [row] => (row.rhs as usize, 0usize, vec![0u64; k]),
        [row0, row1] => (row0.rhs as usize, row1.rhs as usize, row1.coeffs.clone()),
        rows => {
            return Err(Error::InvalidArgument(format!(
                "dynamic program supports at most 2 rows, got {}",
                rows.len()
            )))
        }
    };
    let a0 = &problem.rows[0].coeffs;
    let width = r1 + 1;
    let cells = (r0 + 1) * width;
    let mut best = vec![0u64; cells];
    let mut take = vec![false; k * cells];
    for l in 0..k {
        let (w0, w1) = (a0[l] as usize, a1[l] as usize);
        if w0 > r0 || w1 > r1 {
            continue;
        }
        let p = problem.rewards[l];
        for c0 in (w0..=r0).rev() {
            for c1 in (w1..=r1).rev() {
                let cand = best[(c0 - w0) * width + (c1 - w1)] + p;
                let cell = c0 * width + c1;
                if cand > best[cell] {
                    best[cell] = cand;
                    take[l * cells + cell] = true;
                }
            }
        }
    }
    let mut sel = Selection::none(k);
    let (mut c0, mut c1) = (r0, r1);
    for l in (0..k).rev() {
        if take[l * cells + c0 * width + c1] {
            sel.chosen[l] = true;
            c0 -= a0[l] as usize;
            c1 -= a1[l] as usize;
        }
    }
    Ok(sel)
}

/// Result of [`solve_exact`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSelection {
    pub selection: Selection,
    pub value: u64,
    /// Search nodes visited.
    pub nodes: u64,
}

/// Depth-first branch and bound over groups in non-increasing
/// reward-to-aggregate-weight order, include branch first.
///
/// The bound at a node is the smallest of: the continuous knapsack bound of
/// row 0 over the undecided groups, exact dynamic-programming tables over the
/// tightest rows, and a Lagrangian relaxation of rows `1..` with multipliers
/// fixed at the root. Each is a valid upper bound on its own. Groups with
/// identical data are branched on as a run, which removes symmetric subtrees.
pub fn solve_exact(problem: &SelectionProblem, node_budget: Option<u64>) -> Result<ExactSelection> {
    BranchAndBound::new(problem, node_budget).run()
}

/// Fixed-point scale of Lagrangian multipliers.
const MU_SCALE: i128 = 1 << 20;

struct LagrangianItem {
    group: usize,
    /// Reward minus multiplier-weighted row coefficients, times `MU_SCALE`.
    profit: i128,
    weight: u64,
}

struct BranchAndBound<'a> {
    problem: &'a SelectionProblem,
    /// Groups that fit every row on their own, in branching order.
    order: Vec<usize>,
    /// Position of each group in `order` (`usize::MAX` if excluded upfront).
    position: Vec<usize>,
    /// First position after `d` holding a group different from `order[d]`.
    /// Identical groups are only ever taken as a prefix of their run, so
    /// excluding one excludes the rest of the run.
    run_end: Vec<usize>,
    budget: Option<u64>,
    nodes: u64,
    best_value: u64,
    best: Vec<bool>,
    current: Vec<bool>,
    residual: Vec<i64>,
    /// Scaled multipliers for rows `1..`; empty when there are none.
    multipliers: Vec<i128>,
    /// Groups with positive Lagrangian profit by non-increasing density.
    lagrangian: Vec<LagrangianItem>,
    /// Exact knapsack bounds over subsets of the rows.
    suffix: Vec<SuffixTable>,
    /// `lagrangian_table[d * (rhs_0 + 1) + c]`: best scaled Lagrangian profit
    /// from `order[d..]` with aggregate capacity `c`, integer in that row.
    lagrangian_table: Vec<i64>,
}

/// Largest number of entries of one [`SuffixTable`].
const SUFFIX_TABLE_LIMIT: usize = 1 << 22;

/// `table[d][s]`: best reward from `order[d..]` when only the kept rows
/// count and their residuals are `s` (mixed radix, row `r` has radix
/// `rhs_r + 1`). Dropping rows relaxes the problem, so it is an upper bound.
struct SuffixTable {
    rows: Vec<usize>,
    strides: Vec<usize>,
    cells: usize,
    table: Vec<u64>,
}

impl SuffixTable {
    fn build(problem: &SelectionProblem, order: &[usize], rows: Vec<usize>) -> Self {
        let radix: Vec<usize> = rows.iter().map(|&r| problem.rows[r].rhs as usize + 1).collect();
        let mut strides = vec![1; rows.len()];
        for i in 1..rows.len() {
            strides[i] = strides[i - 1] * radix[i - 1];
        }
        let cells = strides.last().map_or(1, |s| s * radix[rows.len() - 1]);
        let len = order.len();
        let mut table = vec![0u64; (len + 1) * cells];
        let mut digits = vec![0usize; rows.len()];
        for d in (0..len).rev() {
            let l = order[d];
            let coef: Vec<usize> = rows.iter().map(|&r| problem.rows[r].coeffs[l] as usize).collect();
            let offset: usize = coef.iter().zip(&strides).map(|(c, s)| c * s).sum();
            let p = problem.rewards[l];
            let (head, tail) = table.split_at_mut((d + 1) * cells);
            let cur = &mut head[d * cells..];
            let next = &tail[..cells];
            digits.iter_mut().for_each(|x| *x = 0);
            for s in 0..cells {
                let mut best = next[s];
                if digits.iter().zip(&coef).all(|(x, c)| x >= c) {
                    best = best.max(next[s - offset] + p);
                }
                cur[s] = best;
                for (x, r) in digits.iter_mut().zip(&radix) {
                    *x += 1;
                    if *x < *r {
                        break;
                    }
                    *x = 0;
                }
            }
        }
        SuffixTable {
            rows,
            strides,
            cells,
            table,
        }
    }

    fn bound(&self, depth: usize, residual: &[i64]) -> u64 {
        let s: usize = self
            .rows
            .iter()
            .zip(&self.strides)
            .map(|(&r, &st)| residual[r] as usize * st)
            .sum();
        self.table[depth * self.cells + s]
    }
}

/// Row subsets for the suffix tables: the tightest rows that fit one table,
/// then the aggregate row alone if it was left out.
fn suffix_tables(problem: &SelectionProblem, order: &[usize]) -> Vec<SuffixTable> {
    let depth = order.len() + 1;
    let fits = |cells: usize| cells.checked_mul(depth).is_some_and(|n| n <= SUFFIX_TABLE_LIMIT);
    let mut by_rhs: Vec<usize> = (0..problem.rows.len()).collect();
    by_rhs.sort_by_key(|&r| (problem.rows[r].rhs, r));
    let mut chosen = Vec::new();
    let mut cells = 1usize;
    for r in by_rhs {
        let next = cells.saturating_mul(problem.rows[r].rhs as usize + 1);
        if fits(next) {
            chosen.push(r);
            cells = next;
        }
    }
    let mut out = Vec::new();
    let has_aggregate = chosen.contains(&0);
    if !chosen.is_empty() {
        out.push(SuffixTable::build(problem, order, chosen));
    }
    if !has_aggregate && fits(problem.rows[0].rhs as usize + 1) {
        out.push(SuffixTable::build(problem, order, vec![0]));
    }
    out
}

impl<'a> BranchAndBound<'a> {
    fn new(problem: &'a SelectionProblem, budget: Option<u64>) -> Self {
        let k = problem.num_groups();
        let row0 = &problem.rows[0].coeffs;
        let mut order: Vec<usize> = (0..k)
            .filter(|&l| problem.rows.iter().all(|r| r.coeffs[l] <= r.rhs))
            .collect();
        let key = |l: usize| (problem.rewards[l], problem.rows.iter().map(|r| r.coeffs[l]).collect::<Vec<_>>());
        // Identical groups end up adjacent.
        order.sort_by(|&a, &b| {
            compare_ratio(problem.rewards[b], row0[b], problem.rewards[a], row0[a])
                .then_with(|| key(a).cmp(&key(b)))
                .then(a.cmp(&b))
        });
        let mut position = vec![usize::MAX; k];
        for (p, &l) in order.iter().enumerate() {
            position[l] = p;
        }
        let mut run_end = vec![order.len(); order.len()];
        for d in (0..order.len().saturating_sub(1)).rev() {
            run_end[d] = if key(order[d]) == key(order[d + 1]) { run_end[d + 1] } else { d + 1 };
        }
        let mut bb = BranchAndBound {
            problem,
            order,
            position,
            run_end,
            budget,
            nodes: 0,
            best_value: 0,
            best: vec![false; k],
            current: vec![false; k],
            residual: problem.rows.iter().map(|r| r.rhs as i64).collect(),
            multipliers: Vec::new(),
            lagrangian: Vec::new(),
            suffix: Vec::new(),
            lagrangian_table: Vec::new(),
        };
        bb.suffix = suffix_tables(problem, &bb.order);
        bb.seed_incumbent();
        // Scaled Lagrangian profits must stay well inside 64 bits.
        let small = |v: &[u64]| v.iter().try_fold(0u64, |a, &x| a.checked_add(x)).is_some_and(|t| t < 1 << 40);
        if problem.rows.len() > 1 && !bb.order.is_empty() && small(&problem.rewards) && small(row0) {
            let mu = root_multipliers(problem, &bb.order, bb.best_value);
            if mu.iter().any(|&m| m > 0) {
                bb.lagrangian = lagrangian_items(problem, &bb.order, &mu);
                bb.lagrangian_table = lagrangian_table(problem, &bb.order, &mu);
                bb.multipliers = mu;
            }
        }
        bb
    }

    fn run(mut self) -> Result<ExactSelection> {
        self.search(0, 0)?;
        Ok(ExactSelection {
            selection: Selection { chosen: self.best },
            value: self.best_value,
            nodes: self.nodes,
        })
    }

    /// Greedy pass in branching order, taking every group that still fits.
    fn seed_incumbent(&mut self) {
        let mut residual = self.residual.clone();
        let mut chosen = vec![false; self.problem.num_groups()];
        let mut value = 0;
        for &l in &self.order {
            if self.fits(&residual, l) {
                for (r, row) in residual.iter_mut().zip(&self.problem.rows) {
                    *r -= row.coeffs[l] as i64;
                }
                chosen[l] = true;
                value += self.problem.rewards[l];
            }
        }
        self.best_value = value;
        self.best = chosen;
    }

    fn fits(&self, residual: &[i64], l: usize) -> bool {
        self.problem
            .rows
            .iter()
            .zip(residual)
            .all(|(row, &r)| row.coeffs[l] as i64 <= r)
    }

    fn search(&mut self, depth: usize, value: u64) -> Result<()> {
        self.nodes += 1;
        if let Some(limit) = self.budget {
            if self.nodes > limit {
                return Err(Error::Budget {
                    what: "selection branch and bound",
                    limit,
                });
            }
        }
        if value > self.best_value {
            self.best_value = value;
            self.best.clone_from(&self.current);
        }
        if depth == self.order.len() || value + self.bound(depth) <= self.best_value {
            return Ok(());
        }
        let l = self.order[depth];
        if self.fits(&self.residual, l) {
            for (r, row) in self.residual.iter_mut().zip(&self.problem.rows) {
                *r -= row.coeffs[l] as i64;
            }
            self.current[l] = true;
            let res = self.search(depth + 1, value + self.problem.rewards[l]);
            self.current[l] = false;
            for (r, row) in self.residual.iter_mut().zip(&self.problem.rows) {
                *r += row.coeffs[l] as i64;
            }
            res?;
        }
        self.search(self.run_end[depth], value)
    }

    /// Upper bound on the reward still obtainable from `order[depth..]`.
    fn bound(&self, depth: usize) -> u64 {
        let row0 = &self.problem.rows[0].coeffs;
        let plain = fractional_fill(
            self.order[depth..]
                .iter()
                .map(|&l| (self.problem.rewards[l] as i128, row0[l])),
            self.residual[0],
        );
        let plain = self
            .suffix
            .iter()
            .map(|t| t.bound(depth, &self.residual) as i128)
            .fold(plain, i128::min);
        if self.multipliers.is_empty() {
            return plain.max(0) as u64;
        }
        let constant: i128 = self
            .multipliers
            .iter()
            .zip(&self.residual[1..])
            .map(|(&m, &r)| m * r as i128)
            .sum();
        let free = self
            .lagrangian
            .iter()
            .filter(|it| self.position[it.group] >= depth)
            .map(|it| (it.profit, it.weight));
        let mut relaxed = fractional_fill(free, self.residual[0]);
        if !self.lagrangian_table.is_empty() {
            let width = self.problem.rows[0].rhs as usize + 1;
            relaxed = relaxed.min(self.lagrangian_table[depth * width + self.residual[0] as usize] as i128);
        }
        let lagr = Integer::div_floor(&(constant + relaxed), &MU_SCALE);
        plain.min(lagr).max(0) as u64
    }
}

fn lagrangian_table(problem: &SelectionProblem, order: &[usize], mu: &[i128]) -> Vec<i64> {
    let width = problem.rows[0].rhs as usize + 1;
    let len = order.len();
    if width.checked_mul(len + 1).is_none_or(|n| n > SUFFIX_TABLE_LIMIT) {
        return Vec::new();
    }
    let row0 = &problem.rows[0].coeffs;
    let mut table = vec![0i64; (len + 1) * width];
    for d in (0..len).rev() {
        let l = order[d];
        let penalty: i128 = problem.rows[1..].iter().zip(mu).map(|(row, &m)| m * row.coeffs[l] as i128).sum();
        let profit = problem.rewards[l] as i128 * MU_SCALE - penalty;
        let (head, tail) = table.split_at_mut((d + 1) * width);
        let cur = &mut head[d * width..];
        let next = &tail[..width];
        cur.copy_from_slice(next);
        if profit > 0 {
            let (w, profit) = (row0[l] as usize, profit as i64);
            for c in w..width {
                cur[c] = cur[c].max(next[c - w] + profit);
            }
        }
    }
    table
}

/// Floor of the continuous knapsack value of `(profit, weight)` pairs taken
/// in the given order with capacity `cap`.
fn fractional_fill(items: impl Iterator<Item = (i128, u64)>, cap: i64) -> i128 {
    let mut cap = cap.max(0) as i128;
    let mut total = 0i128;
    for (p, w) in items {
        let w = w as i128;
        if w <= cap {
            total += p;
            cap -= w;
        } else {
            total += Integer::div_floor(&(p * cap), &w);
            break;
        }
    }
    total
}

fn lagrangian_items(problem: &SelectionProblem, order: &[usize], mu: &[i128]) -> Vec<LagrangianItem> {
    let row0 = &problem.rows[0].coeffs;
    let mut items: Vec<LagrangianItem> = order
        .iter()
        .map(|&l| {
            let penalty: i128 = problem.rows[1..]
                .iter()
                .zip(mu)
                .map(|(row, &m)| m * row.coeffs[l] as i128)
                .sum();
            LagrangianItem {
                group: l,
                profit: problem.rewards[l] as i128 * MU_SCALE - penalty,
                weight: row0[l],
            }
        })
        .filter(|it| it.profit > 0)
        .collect();
    // Non-increasing profit / weight; zero weights first.
    items.sort_by(|a, b| {
        (b.profit * a.weight as i128)
            .cmp(&(a.profit * b.weight as i128))
            .then(a.group.cmp(&b.group))
    });
    items
}

/// Projected subgradient descent on the Lagrangian dual of rows `1..` at the
/// root. Returns scaled multipliers of the best bound seen (all zero if none
/// improves on the plain bound).
fn root_multipliers(problem: &SelectionProblem, order: &[usize], incumbent: u64) -> Vec<i128> {
    let extra = problem.rows.len() - 1;
    let row0 = &problem.rows[0];
    let eval = |mu: &[f64]| -> (f64, Vec<f64>) {
        let profit: Vec<f64> = order
            .iter()
            .map(|&l| {
                problem.rewards[l] as f64
                    - problem.rows[1..]
                        .iter()
                        .zip(mu)
                        .map(|(row, m)| m * row.coeffs[l] as f64)
                        .sum::<f64>()
            })
            .collect();
        let mut idx: Vec<usize> = (0..order.len()).filter(|&i| profit[i] > 0.0).collect();
        idx.sort_by(|&a, &b| {
            let da = profit[a] / (row0.coeffs[order[a]] as f64).max(1e-9);
            let db = profit[b] / (row0.coeffs[order[b]] as f64).max(1e-9);
            db.total_cmp(&da).then(a.cmp(&b))
        });
        let mut x = vec![0.0; order.len()];
        let mut cap = row0.rhs as f64;
        let mut value: f64 = problem.rows[1..]
            .iter()
            .zip(mu)
            .map(|(row, m)| m * row.rhs as f64)
            .sum();
        for i in idx {
            let w = row0.coeffs[order[i]] as f64;
            if w <= cap {
                x[i] = 1.0;
                cap -= w;
                value += profit[i];
            } else {
                x[i] = cap / w;
                value += profit[i] * x[i];
                break;
            }
        }
        (value, x)
    };

    let mut mu = vec![0.0f64; extra];
    let (mut best_value, _) = eval(&mu);
    let mut best_mu = mu.clone();
    let mut theta = 2.0;
    let mut stale = 0;
    for _ in 0..150 {
        let (value, x) = eval(&mu);
        if value < best_value - 1e-9 {
            best_value = value;
            best_mu.clone_from(&mu);
            stale = 0;
        } else {
            stale += 1;
            if stale >= 8 {
                theta *= 0.5;
                stale = 0;
            }
        }
        let g: Vec<f64> = problem.rows[1..]
            .iter()
            .map(|row| {
                row.rhs as f64
                    - order
                        .iter()
                        .zip(&x)
                        .map(|(&l, &xl)| row.coeffs[l] as f64 * xl)
                        .sum::<f64>()
            })
            .collect();
        let norm: f64 = g.iter().map(|v| v * v).sum();
        let gap = value - incumbent as f64;
        if norm < 1e-12 || gap < 1e-9 || theta < 1e-6 {
            break;
        }
        let t = theta * gap / norm;
        for (m, gi) in mu.iter_mut().zip(&g) {
            *m = (*m - t * gi).max(0.0);
        }
    }
    best_mu
        .iter()
        .map(|&m| (m * MU_SCALE as f64).floor().max(0.0) as i128)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_row(rewards: Vec<u64>, coeffs: Vec<u64>, rhs: u64) -> SelectionProblem {
        SelectionProblem {
            rewards,
            rows: vec![Row {
                coeffs,
                rhs,
                tag: RowTag::Aggregate,
            }],
        }
    }

    #[test]
    fn f_d_integer_quotient_is_one_less() {
        assert_eq!(f_d(3, &rational(1, 1)), 2);
    }

    #[test]
    fn f_d_cut_example() {
        let d = rational(5, 1);
        assert_eq!(f_d(6, &d), 1);
        assert_eq!(f_d(10, &d), 1);
    }

    #[test]
    fn f_d_below_threshold_is_zero() {
        assert_eq!(f_d(3, &rational(7, 2)), 0);
        assert_eq!(f_d(4, &rational(7, 2)), 1);
    }

    #[test]
    fn two_mkp_cut_blocks_group() {
        let inst = Instance::with_weight_rewards(vec![10, 10], vec![vec![6, 6, 6]]);
        let p = build_problem(&inst, &Variant::TwoMkp, inst.total_capacity()).unwrap();
        assert_eq!(p.rows.len(), 2);
        assert_eq!((p.rows[0].coeffs.clone(), p.rows[0].rhs), (vec![18], 20));
        assert_eq!((p.rows[1].coeffs.clone(), p.rows[1].rhs), (vec![3], 2));
        let s = solve_exact(&p, None).unwrap();
        assert_eq!(s.value, 0);
    }

    #[test]
    fn kp_has_one_row() {
        let inst = Instance::with_weight_rewards(vec![10, 10], vec![vec![6, 6, 6], vec![3]]);
        let p = build_problem(&inst, &Variant::Kp, 20).unwrap();
        assert_eq!(p.rows.len(), 1);
        assert_eq!(p.rows[0].tag, RowTag::Aggregate);
    }

    #[test]
    fn mkp_prime_rows_only_for_weights_above_min_capacity() {
        let inst = Instance::with_weight_rewards(vec![8, 4], vec![vec![8, 4], vec![2, 2]]);
        let p = build_problem(&inst, &Variant::MkpPrime, inst.total_capacity()).unwrap();
        let tags: Vec<_> = p.rows.iter().map(|r| r.tag.clone()).collect();
        assert_eq!(tags, vec![RowTag::Aggregate, RowTag::Floor(8)]);
        assert_eq!(p.rows[1].coeffs, vec![1, 0]);
        assert_eq!(p.rows[1].rhs, 1);
    }

    #[test]
    fn vacuous_threshold_row_is_dropped() {
        let inst = Instance::with_weight_rewards(vec![7, 7, 7], vec![vec![3; 7]]);
        let p = build_problem(&inst, &Variant::TwoMkp, 21).unwrap();
        assert_eq!(p.rows.len(), 1);
        let s = solve_exact(&p, None).unwrap();
        assert_eq!(s.selection.indices(), vec![0]);
    }

    #[test]
    fn identical_threshold_rows_are_merged() {
        let inst = Instance::with_weight_rewards(vec![100, 100], vec![vec![60, 30], vec![70]]);
        let p = build_problem(&inst, &Variant::MkpQ { max_q: 100 }, 200).unwrap();
        for (a, b) in p.rows.iter().zip(p.rows.iter().skip(1)) {
            assert_ne!(a.coeffs, b.coeffs);
        }
        let raw = Variant::MkpQ { max_q: 100 }.thresholds(&inst).unwrap();
        assert!(p.rows.len() < raw.len());
    }

    #[test]
    fn lp_has_no_selection_problem() {
        let inst = Instance::with_weight_rewards(vec![10, 10], vec![vec![6]]);
        assert!(build_problem(&inst, &Variant::Lp, 20).is_err());
    }

    #[test]
    fn dp_skips_item_that_does_not_fit() {
        let p = single_row(vec![5], vec![7], 6);
        let s = solve_dp_single_row(&p).unwrap();
        assert_eq!(p.value(&s), 0);
    }

    #[test]
    fn dp_takes_both() {
        let p = single_row(vec![5, 4], vec![3, 3], 6);
        let s = solve_dp_single_row(&p).unwrap();
        assert_eq!(s.indices(), vec![0, 1]);
        assert_eq!(p.value(&s), 9);
    }

    #[test]
    fn dp_rejects_multi_row() {
        let inst = Instance::with_weight_rewards(vec![10, 10], vec![vec![6, 6, 6]]);
        let p = build_problem(&inst, &Variant::TwoMkp, 20).unwrap();
        assert!(solve_dp_single_row(&p).is_err());
    }

    #[test]
    fn budget_is_reported() {
        // Greedy takes the densest group alone (52), the optimum is 100.
        let p = single_row(vec![52, 50, 50], vec![51, 50, 50], 100);
        assert!(matches!(solve_exact(&p, Some(2)), Err(Error::Budget { .. })));
        assert_eq!(solve_exact(&p, None).unwrap().value, 100);
    }

    #[test]
    fn thresholds_below_the_smallest_weight_still_cut() {
        // Items 13, 10, 12, 7 weigh exactly 3 x 14 but do not pack; only
        // d = 14/6 < 6 = w_min detects it.
        let inst = Instance::with_weight_rewards(vec![14, 14, 14], vec![vec![6, 11, 11], vec![13, 10, 12, 7], vec![9, 9]]);
        let d = canonical_d(&inst);
        assert!(d.contains(&rational(7, 3)));
        let p = build_problem(&inst, &Variant::MkpD(d), 42).unwrap();
        assert!(!p.is_feasible(&Selection::from_indices(3, [1])));
        let only_w_min = build_problem(&inst, &Variant::MkpD([rational(7, 1)].into()), 42).unwrap();
        assert!(only_w_min.is_feasible(&Selection::from_indices(3, [1])));
    }

    #[test]
    fn canonical_d_examples() {
        let inst = Instance::with_weight_rewards(vec![4, 4, 4], vec![vec![4, 1]]);
        let d = canonical_d(&inst);
        let expected: BTreeSet<Rational> = [rational(2, 1), rational(4, 3), rational(1, 1)].into();
        assert_eq!(d, expected);

        let inst = Instance::with_weight_rewards(vec![1, 1], vec![vec![1]]);
        assert!(canonical_d(&inst).is_empty());

        let inst = Instance::with_weight_rewards(vec![6, 6], vec![vec![4, 1]]);
        let d = canonical_d(&inst);
        let expected: BTreeSet<Rational> = [
            rational(3, 1),
            rational(2, 1),
            rational(3, 2),
            rational(6, 5),
            rational(1, 1),
        ]
        .into();
        assert_eq!(d, expected);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [
            Variant::Lp,
            Variant::Kp,
            Variant::TwoMkp,
            Variant::ThreeMkp,
            Variant::MkpQ { max_q: 100 },
            Variant::MkpPrime,
        ] {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        let v: Variant = "mkpd:100/2,100/3".parse().unwrap();
        assert_eq!(v, Variant::MkpD([rational(50, 1), rational(100, 3)].into()));
        assert!("mkpd:0".parse::<Variant>().is_err());
        assert!("bogus".parse::<Variant>().is_err());
    }
}
