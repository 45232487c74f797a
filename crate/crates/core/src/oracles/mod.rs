//! Brute-force ground truth: allocation enumeration, feasibility checks,
//! tiny non-additive valuations, and the Sylvester vector search.
//! Nothing here is clever on purpose.

mod fixtures;

pub use fixtures::{fixture, fixture_with, Fixture, Verdict, FIXTURE_NAMES};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{AdditiveValuation, Allocation, Instance, ItemSet, Kind};
use crate::rational::{self, Rational};
use crate::shares::sylvester;

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

fn check_count(what: &'static str, base: usize, m: usize, cap: u64) -> Result<()> {
    match (base as u128).checked_pow(m as u32) {
        Some(x) if x <= cap as u128 => Ok(()),
        x => Err(Error::Cap { what, needed: x.map_or_else(|| format!("{base}^{m}"), |x| x.to_string()), cap }),
    }
}

/// Every complete allocation, as an odometer over item owners with item 0
/// turning fastest.
pub struct Allocations {
    n: usize,
    owner: Vec<usize>,
    done: bool,
}

impl Iterator for Allocations {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.done {
            return None;
        }
        let out = Allocation::from_owners(self.n, &self.owner);
        self.done = true;
        for o in self.owner.iter_mut() {
            *o += 1;
            if *o < self.n {
                self.done = false;
                break;
            }
            *o = 0;
        }
        Some(out)
    }
}

pub fn enumerate_allocations(inst: &Instance, cap: u64) -> Result<Allocations> {
    check_count("allocation enumeration", inst.n(), inst.items, cap)?;
    Ok(Allocations { n: inst.n(), owner: vec![0; inst.items], done: inst.n() == 0 })
}

#[derive(Clone, Debug)]
pub struct Feasibility {
    pub feasible: bool,
    pub witness: Option<Allocation>,
    pub checked: u64,
}

impl Feasibility {
    pub fn to_json(&self) -> Value {
        json!({
            "feasible": self.feasible,
            "witness": self.witness.as_ref().map(Allocation::to_json),
            "allocations_checked": self.checked,
        })
    }
}

/// Looks for an allocation meeting every agent's share: at least the share
/// for goods, at most it for chores.
pub fn check_feasibility(inst: &Instance, shares: &[Rational], cap: u64) -> Result<Feasibility> {
    if shares.len() != inst.n() {
        return Err(Error::Invalid(format!("{} shares for {} agents", shares.len(), inst.n())));
    }
    let mut checked = 0;
    for alloc in enumerate_allocations(inst, cap)? {
        checked += 1;
        let ok = alloc.values(inst).iter().zip(shares).all(|(x, s)| match inst.kind {
            Kind::Goods => x >= s,
            Kind::Chores => x <= s,
        });
        if ok {
            return Ok(Feasibility { feasible: true, witness: Some(alloc), checked });
        }
    }
    Ok(Feasibility { feasible: false, witness: None, checked })
}

/// Calls `f` once per partition of m items into k labelled-up-to-order
/// bundles (some possibly empty).
pub fn for_each_partition(m: usize, k: usize, mut f: impl FnMut(&[ItemSet])) {
    fn go(j: usize, m: usize, used: usize, bundles: &mut Vec<ItemSet>, f: &mut dyn FnMut(&[ItemSet])) {
        if j == m {
            f(bundles);
            return;
        }
        for b in 0..(used + 1).min(bundles.len()) {
            bundles[b] = bundles[b].with(j);
            go(j + 1, m, used.max(b + 1), bundles, f);
            bundles[b] = bundles[b].without(j);
        }
    }
    assert!(k >= 1);
    let mut bundles = vec![ItemSet::EMPTY; k];
    go(0, m, 0, &mut bundles, &mut f);
}

/// Maximin (goods) or minimax (chores) share over k bundles by plain
/// enumeration of set partitions.
pub fn brute_mms(v: &AdditiveValuation, k: usize, kind: Kind) -> Rational {
    let mut best: Option<Rational> = None;
    for_each_partition(v.len(), k, |parts| {
        let vals = parts.iter().map(|&s| v.value(s));
        let x = match kind {
            Kind::Goods => vals.min().unwrap(),
            Kind::Chores => vals.max().unwrap(),
        };
        best = Some(match (best.take(), kind) {
            (None, _) => x,
            (Some(b), Kind::Goods) => rational::max(b, x),
            (Some(b), Kind::Chores) => rational::min(b, x),
        });
    });
    best.expect("at least one partition")
}

/// A set function over at most 8 items, stored as a full table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableValuation {
    m: usize,
    table: Vec<Rational>,
}

impl TableValuation {
    pub fn new(m: usize, f: impl Fn(ItemSet) -> Rational) -> Self {
        assert!(m <= 8, "table valuations are for tiny instances");
        TableValuation { m, table: (0..1u64 << m).map(|s| f(ItemSet(s))).collect() }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn value(&self, s: ItemSet) -> &Rational {
        &self.table[s.0 as usize]
    }

    /// The valuation after renaming item j to perm[j].
    pub fn renamed(&self, perm: &[usize]) -> Self {
        TableValuation::new(self.m, |s| {
            let back: ItemSet = (0..self.m).filter(|&j| s.contains(perm[j])).collect();
            self.value(back).clone()
        })
    }

    pub fn mms(&self, k: usize) -> Rational {
        let mut best = Rational::zero();
        for_each_partition(self.m, k, |parts| {
            let x = parts.iter().map(|&s| self.value(s).clone()).min().unwrap();
            best = rational::max(best.clone(), x);
        });
        best
    }

    /// Best average bundle value over k-partitions.
    pub fn mes(&self, k: usize) -> Rational {
        let mut best = Rational::zero();
        for_each_partition(self.m, k, |parts| {
            let x = parts.iter().fold(Rational::zero(), |acc, &s| acc + self.value(s));
            best = rational::max(best.clone(), x);
        });
        best / Rational::from_integer(BigInt::from(k))
    }
}

/// Four items A, B, C, D: every set of three or more is worth 1, and of the
/// pairs only AB and CD are. The partner swaps B and C, so its valuable
/// pairs are AC and BD.
pub fn zero_share_pair() -> (TableValuation, TableValuation) {
    let v = TableValuation::new(4, |s| {
        let pair = s == ItemSet(0b0011) || s == ItemSet(0b1100);
        if s.len() > 2 || pair { Rational::one() } else { Rational::zero() }
    });
    let w = v.renamed(&[0, 2, 1, 3]);
    (v, w)
}

#[derive(Clone, Debug)]
pub struct SylvesterReport {
    pub n: usize,
    pub max_k: u64,
    pub checked: u64,
    /// Largest sum of 1/(k_i - 1) seen, and a vector reaching it.
    pub worst_sum: Rational,
    pub worst: Vec<u64>,
    pub bound: Rational,
    pub holds: bool,
}

impl SylvesterReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "max_k": self.max_k,
            "vectors_checked": self.checked,
            "worst_sum": rational::to_json(&self.worst_sum),
            "worst": self.worst,
            "bound": rational::to_json(&self.bound),
            "holds": self.holds,
        })
    }
}

/// Every non-decreasing 2 <= k_1 <= ... <= k_n <= max_k with
/// sum 1/k_i < 1 must have sum 1/(k_i - 1) <= s_n.
pub fn sylvester_oracle(n: usize, max_k: u64) -> SylvesterReport {
    struct Walk {
        n: usize,
        max_k: u64,
        ks: Vec<u64>,
        checked: u64,
        worst_sum: Rational,
        worst: Vec<u64>,
    }
    impl Walk {
        fn go(&mut self, start: u64, recip: Rational, shifted: Rational) {
            if self.ks.len() == self.n {
                self.checked += 1;
                if shifted > self.worst_sum {
                    self.worst_sum = shifted;
                    self.worst = self.ks.clone();
                }
                return;
            }
            for k in start..=self.max_k {
                let r = &recip + Rational::new(BigInt::one(), BigInt::from(k));
                // Larger k only lowers the sum, but later slots may still fit.
                if r >= Rational::one() {
                    continue;
                }
                self.ks.push(k);
                self.go(k, r, &shifted + Rational::new(BigInt::one(), BigInt::from(k - 1)));
                self.ks.pop();
            }
        }
    }
    assert!(n >= 1 && max_k >= 2);
    let mut w = Walk { n, max_k, ks: Vec::new(), checked: 0, worst_sum: Rational::zero(), worst: Vec::new() };
    w.go(2, Rational::zero(), Rational::zero());
    let bound = sylvester(n).s[n - 1].clone();
    let holds = w.worst_sum <= bound;
    SylvesterReport { n, max_k, checked: w.checked, worst_sum: w.worst_sum, worst: w.worst, bound, holds }
}
