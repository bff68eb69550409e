//! Random instance generation over a six-parameter design space, plus the
//! alternative reward schemes.
//!
//! Everything is driven by `ChaCha8Rng`, whose output stream is fixed across
//! platforms; the only floating point operations are the correctly rounded
//! `sqrt` of the triangular sampler and the Latin hypercube coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Roots;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{format_rational, rational, Instance, Rational};

pub const RNG_NAME: &str = "ChaCha8Rng";

/// Denominator used when turning a real-valued ratio into a rational.
const RATIO_RESOLUTION: i128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorParams {
    /// Number of knapsacks.
    pub m: usize,
    /// `w_max - w_min`.
    pub w_split: u64,
    pub w_min: u64,
    pub w_mode: u64,
    /// Target total weight over total capacity.
    pub r_load: Rational,
    /// `1 - k/n`.
    pub r_conc: Rational,
    /// Capacity of every knapsack.
    pub capacity: u64,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn w_max(&self) -> u64 {
        self.w_min + self.w_split
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.m < 2 {
            return bad(format!("need at least 2 knapsacks, got {}", self.m));
        }
        if self.capacity < 2 {
            return bad(format!("capacity {} is too small", self.capacity));
        }
        let w_min_cap = (self.capacity / 2).min(self.capacity.saturating_sub(self.w_split));
        if self.w_min < 1 || self.w_min > w_min_cap {
            return bad(format!("w_min {} outside [1, {w_min_cap}]", self.w_min));
        }
        if self.w_mode < self.w_min || self.w_mode > self.w_max() {
            return bad(format!("w_mode {} outside [{}, {}]", self.w_mode, self.w_min, self.w_max()));
        }
        if self.r_load < rational(1, 1) || self.r_load > rational(20, 1) {
            return bad(format!("r_load {} outside [1, 20]", format_rational(&self.r_load)));
        }
        if self.r_conc < rational(0, 1) || self.r_conc > rational(1, 1) {
            return bad(format!("r_conc {} outside [0, 1]", format_rational(&self.r_conc)));
        }
        Ok(())
    }

    /// Parameters as instance metadata.
    pub fn to_meta(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("generator".into(), "gmkp-gen/1".into()),
            ("rng".into(), RNG_NAME.into()),
            ("seed".into(), self.seed.to_string()),
            ("m".into(), self.m.to_string()),
            ("capacity".into(), self.capacity.to_string()),
            ("w_split".into(), self.w_split.to_string()),
            ("w_min".into(), self.w_min.to_string()),
            ("w_mode".into(), self.w_mode.to_string()),
            ("r_load".into(), format_rational(&self.r_load)),
            ("r_conc".into(), format_rational(&self.r_conc)),
        ])
    }
}

/// `count` points in `[0,1)^6`; in every coordinate each of the `count`
/// equal-width strata holds exactly one point.
pub fn latin_hypercube(count: usize, seed: u64) -> Vec<[f64; 6]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![[0.0; 6]; count];
    for d in 0..6 {
        let mut strata: Vec<usize> = (0..count).collect();
        strata.shuffle(&mut rng);
        for (p, s) in points.iter_mut().zip(strata) {
            let u = unit(&mut rng);
            // Guard against rounding up to the next stratum.
            p[d] = ((s as f64 + u) / count as f64).min((s as f64 + 1.0) / count as f64 - f64::EPSILON);
            p[d] = p[d].max(s as f64 / count as f64);
        }
    }
    points
}

/// Uniform in `[0, 1)` from the top 53 bits.
fn unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn to_ratio(x: f64) -> Rational {
    rational((x * RATIO_RESOLUTION as f64).round() as i128, RATIO_RESOLUTION)
}

/// Maps a design point to generator parameters.
pub fn materialize(point: [f64; 6], capacity: u64, seed: u64) -> GeneratorParams {
    let u: Vec<f64> = point.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let floor = |x: f64| x.floor() as u64;
    let m = (2 + floor(u[0] * 99.0)).clamp(2, 100) as usize;
    let w_split = (1 + floor(u[1] * (capacity - 1) as f64)).clamp(1, capacity - 1);
    let w_min_cap = (capacity / 2).min(capacity - w_split).max(1);
    let w_min = (1 + floor(u[2] * w_min_cap as f64)).clamp(1, w_min_cap);
    let w_mode = (w_min + floor(u[3] * (w_split + 1) as f64)).clamp(w_min, w_min + w_split);
    let r_load = to_ratio(1.0 + 19.0 * u[4]).clamp(rational(1, 1), rational(20, 1));
    let r_conc = to_ratio(u[5]).clamp(rational(0, 1), rational(1, 1));
    GeneratorParams {
        m,
        w_split,
        w_min,
        w_mode,
        r_load,
        r_conc,
        capacity,
        seed,
    }
}

/// Rounded, clamped sample of the triangular distribution on
/// `[low, high]` with mode `mode`, by inverse CDF.
pub fn sample_triangular(rng: &mut impl RngCore, low: u64, mode: u64, high: u64) -> u64 {
    if low == high {
        return low;
    }
    let (a, c, b) = (low as f64, mode as f64, high as f64);
    let u = unit(rng);
    let x = if u < (c - a) / (b - a) {
        a + (u * (b - a) * (c - a)).sqrt()
    } else {
        b - ((1.0 - u) * (b - a) * (b - c)).sqrt()
    };
    (x.round() as u64).clamp(low, high)
}

/// Draws the item weights: `w_min`, `w_max`, then triangular samples until
/// the load ratio reaches `r_load`.
fn draw_weights(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let total_capacity = rational((params.m as u64 * params.capacity) as i128, 1);
    let target = params.r_load * total_capacity;
    let mut weights = vec![params.w_min, params.w_max()];
    let mut sum: u64 = weights.iter().sum();
    while rational(sum as i128, 1) < target {
        let w = sample_triangular(rng, params.w_min, params.w_mode, params.w_max());
        weights.push(w);
        sum += w;
    }
    weights
}

/// `ceil(n * (1 - r_conc))`, at least 1.
pub fn group_count(n: usize, r_conc: &Rational) -> usize {
    let k = (rational(n as i128, 1) * (rational(1, 1) - r_conc)).ceil();
    k.to_integer().to_usize().unwrap_or(0).clamp(1, n.max(1))
}

/// Splits items into groups: the first `k` items seed one group each, every
/// other item joins a uniformly drawn group that stays within `group_limit`,
/// or opens a new group when none does.
fn assemble_groups(weights: &[u64], k: usize, group_limit: u64, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
    let mut groups: Vec<Vec<u64>> = weights[..k].iter().map(|&w| vec![w]).collect();
    let mut totals: Vec<u64> = weights[..k].to_vec();
    for &w in &weights[k..] {
        let eligible: Vec<usize> = (0..groups.len()).filter(|&g| totals[g] + w <= group_limit).collect();
        if eligible.is_empty() {
            groups.push(vec![w]);
            totals.push(w);
        } else {
            let g = eligible[rng.random_range(0..eligible.len())];
            groups[g].push(w);
            totals[g] += w;
        }
    }
    groups
}

/// Builds an instance with equal capacities and rewards equal to group
/// weights.
pub fn generate_instance(params: &GeneratorParams) -> Result<Instance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let weights = draw_weights(params, &mut rng);
    let k = group_count(weights.len(), &params.r_conc);
    let limit = params.capacity * params.m as u64;
    let groups = assemble_groups(&weights, k, limit, &mut rng);
    let mut inst = Instance::with_weight_rewards(vec![params.capacity; params.m], groups);
    inst.meta = params.to_meta();
    Ok(inst)
}

/// How group rewards are derived from group weights `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardScheme {
    /// `W`.
    R0,
    /// `round(100 * sqrt(W))`.
    R1,
    /// `round(W * sqrt(W))`.
    R2,
    /// `round(u * W)` with `u` uniform on `[1, 10)`, drawn per group.
    R3 { seed: u64 },
}

impl RewardScheme {
    pub fn tag(&self) -> &'static str {
        match self {
            RewardScheme::R0 => "R0",
            RewardScheme::R1 => "R1",
            RewardScheme::R2 => "R2",
            RewardScheme::R3 { .. } => "R3",
        }
    }
}

impl fmt::Display for RewardScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewardScheme::R3 { seed } => write!(f, "R3:{seed}"),
            other => f.write_str(other.tag()),
        }
    }
}

impl FromStr for RewardScheme {
    type Err = Error;

    /// `R0`, `R1`, `R2`, `R3` (seed 0) or `R3:<seed>`, case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "r0" => Ok(RewardScheme::R0),
            "r1" => Ok(RewardScheme::R1),
            "r2" => Ok(RewardScheme::R2),
            "r3" => Ok(RewardScheme::R3 { seed: 0 }),
            _ => match lower.strip_prefix("r3:").map(str::parse) {
                Some(Ok(seed)) => Ok(RewardScheme::R3 { seed }),
                _ => Err(Error::InvalidArgument(format!("unknown reward scheme {s:?}"))),
            },
        }
    }
}

/// `round(sqrt(x))`. Never a tie: `(2r+1)^2` is odd, `4x` is even.
pub fn round_sqrt(x: u128) -> u128 {
    let r = x.sqrt();
    if (2 * r + 1) * (2 * r + 1) < 4 * x {
        r + 1
    } else {
        r
    }
}

/// Replaces rewards according to `scheme`, using group weights as `W`.
pub fn apply_reward_scheme(instance: &Instance, scheme: RewardScheme) -> Instance {
    let mut out = instance.clone();
    let weights = instance.group_weights();
    let mut rng = match scheme {
        RewardScheme::R3 { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    for (l, &w) in weights.iter().enumerate() {
        let w = w as u128;
        out.rewards[l] = match scheme {
            RewardScheme::R0 => w,
            RewardScheme::R1 => round_sqrt(10_000 * w),
            RewardScheme::R2 => round_sqrt(w * w * w),
            RewardScheme::R3 { .. } => {
                let u = rng.as_mut().expect("seeded for R3").next_u64() as u128;
                // w * (1 + 9u / 2^64), rounded half up.
                (w * ((1u128 << 64) + 9 * u) + (1u128 << 63)) >> 64
            }
        } as u64;
    }
    out.meta.insert("reward_scheme".into(), scheme.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> GeneratorParams {
        GeneratorParams {
            m: 3,
            w_split: 40,
            w_min: 10,
            w_mode: 30,
            r_load: rational(2, 1),
            r_conc: rational(1, 2),
            capacity: 100,
            seed: 7,
        }
    }

    #[test]
    fn single_point_hypercube() {
        let p = latin_hypercube(1, 3);
        assert_eq!(p.len(), 1);
        assert!(p[0].iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn hypercube_one_point_per_decile() {
        let pts = latin_hypercube(10, 99);
        for d in 0..6 {
            let mut strata: Vec<usize> = pts.iter().map(|p| (p[d] * 10.0) as usize).collect();
            strata.sort_unstable();
            assert_eq!(strata, (0..10).collect::<Vec<_>>());
        }
    }

    #[test]
    fn materialize_lower_corner() {
        let p = materialize([0.0; 6], 100, 1);
        assert_eq!((p.m, p.w_split, p.w_min, p.w_mode), (2, 1, 1, 1));
        assert_eq!(p.r_load, rational(1, 1));
        assert_eq!(p.r_conc, rational(0, 1));
    }

    #[test]
    fn materialize_upper_corner() {
        let u = 1.0 - 1e-12;
        let p = materialize([u; 6], 100, 1);
        assert_eq!((p.m, p.w_split, p.w_min, p.w_mode), (100, 99, 1, 100));
        assert_eq!(p.r_load, rational(20, 1));
        assert_eq!(p.r_conc, rational(1, 1));
    }

    #[test]
    fn materialize_w_min_range_follows_split() {
        for i in 0..50 {
            let u3 = i as f64 / 50.0;
            let p = materialize([0.5, 59.5 / 99.0, u3, 0.5, 0.5, 0.5], 100, 1);
            assert_eq!(p.w_split, 60);
            assert!((1..=40).contains(&p.w_min));
            p.validate().unwrap();
        }
    }

    #[test]
    fn generated_instance_meets_load_and_group_limits() {
        let p = params();
        let inst = generate_instance(&p).unwrap();
        let total: u64 = inst.item_weights.iter().sum();
        let cap = inst.total_capacity();
        assert!(rational(total as i128, cap as i128) >= p.r_load);
        let overshoot = rational(total as i128, 1) - p.r_load * rational(cap as i128, 1);
        assert!(overshoot < rational(p.w_max() as i128, 1));
        assert!(inst.group_weights().iter().all(|&w| w <= 300));
        assert_eq!(inst.num_groups(), group_count(inst.num_items(), &p.r_conc));
        assert!(inst.groups.iter().all(|g| !g.is_empty()));
        assert_eq!(inst.meta["rng"], RNG_NAME);
        assert_eq!(inst.item_weights[inst.groups[0][0]], 10);
        assert_eq!(inst.item_weights[inst.groups[1][0]], 50);
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate_instance(&params()).unwrap(), generate_instance(&params()).unwrap());
    }

    #[test]
    fn seed_items_alone_when_loop_exits_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let groups = assemble_groups(&[10, 50], group_count(2, &rational(1, 4)), 200, &mut rng);
        assert_eq!(groups, vec![vec![10], vec![50]]);
    }

    #[test]
    fn triangular_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let sum: u64 = (0..n).map(|_| sample_triangular(&mut rng, 10, 20, 60)).sum();
        let mean = sum as f64 / n as f64;
        assert!((mean - 30.0).abs() < 0.6, "{mean}");
    }

    #[test]
    fn reward_schemes() {
        let inst = Instance::with_weight_rewards(vec![100, 100], vec![vec![60, 40], vec![7]]);
        assert_eq!(apply_reward_scheme(&inst, RewardScheme::R1).rewards[0], 1000);
        assert_eq!(apply_reward_scheme(&inst, RewardScheme::R2).rewards[0], 1000);
        assert_eq!(apply_reward_scheme(&inst, RewardScheme::R0).rewards[1], 7);
        // 100 * sqrt(7) = 264.575...
        assert_eq!(apply_reward_scheme(&inst, RewardScheme::R1).rewards[1], 265);
        // 7 * sqrt(7) = 18.520...
        assert_eq!(apply_reward_scheme(&inst, RewardScheme::R2).rewards[1], 19);
        let r3 = apply_reward_scheme(&inst, RewardScheme::R3 { seed: 4 });
        assert!((100..1000).contains(&r3.rewards[0]));
        assert!((7..=70).contains(&r3.rewards[1]));
        assert_eq!(r3.meta["reward_scheme"], "R3:4");
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("r2".parse::<RewardScheme>().unwrap(), RewardScheme::R2);
        assert_eq!("R3:9".parse::<RewardScheme>().unwrap(), RewardScheme::R3 { seed: 9 });
        assert!("R4".parse::<RewardScheme>().is_err());
    }
}
