//! Personalized shares built around one anchor agent (v, b). They are
//! feasible by construction, and at the anchor itself they coincide with
//! the rounded shares, which is how the rounded shares are shown to be
//! best possible.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{AdditiveValuation, Allocation, Instance, ItemSet, Kind};
use crate::rational::{self, Rational};
use crate::shares::{mms_with_cap, unit_lower_k, unit_upper_k, DEFAULT_MMS_CAP};

/// Subset DPs run over 3^m states.
pub const MAX_PERSONALIZED_ITEMS: usize = 14;

#[derive(Clone, Debug)]
pub struct PersonalizedContext {
    pub kind: Kind,
    pub anchor_valuation: AdditiveValuation,
    pub anchor_entitlement: Rational,
    /// 1/(k+1) < b <= 1/k for goods, 1/(k+1) <= b < 1/k for chores.
    pub k: usize,
    /// MMS(v, 1/k) for goods, MMS(c, 1/(k+1)) for chores.
    pub threshold: Rational,
    /// A partition attaining `threshold`: k bundles for goods, k+1 for chores.
    pub partition: Vec<ItemSet>,
    pub acceptable: Vec<ItemSet>,
}

impl PersonalizedContext {
    pub fn new(kind: Kind, anchor: &AdditiveValuation, b: &Rational) -> Result<Self> {
        let m = anchor.len();
        if m > MAX_PERSONALIZED_ITEMS {
            return Err(Error::Cap { what: "personalized share families", needed: format!("3^{m}"), cap: 3u64.pow(MAX_PERSONALIZED_ITEMS as u32) });
        }
        let (k, bundles) = match kind {
            Kind::Goods => {
                let k = rational::to_usize(&unit_upper_k(b));
                (k, k)
            }
            Kind::Chores => {
                if b.is_one() {
                    return Err(Error::Precondition("chores anchor needs responsibility below 1".into()));
                }
                let k = rational::to_usize(&unit_lower_k(b));
                (k, k + 1)
            }
        };
        let witness = mms_with_cap(anchor, bundles, kind, DEFAULT_MMS_CAP)?;
        let threshold = witness.value;
        let acceptable = (0..1u64 << m)
            .map(ItemSet)
            .filter(|&s| match kind {
                Kind::Goods => anchor.value(s) >= threshold,
                Kind::Chores => anchor.value(s) <= threshold,
            })
            .collect();
        Ok(PersonalizedContext {
            kind,
            anchor_valuation: anchor.clone(),
            anchor_entitlement: b.clone(),
            k,
            threshold,
            partition: witness.partition,
            acceptable,
        })
    }

    pub fn representative_count(&self, b_j: &Rational) -> usize {
        representative_count(self.kind, self.k, b_j)
    }
}

/// Goods: f/(k+1) < b_j <= (f+1)/(k+1). Chores: (f-1)/k <= b_j < f/k.
pub fn representative_count(kind: Kind, k: usize, b_j: &Rational) -> usize {
    let k = BigInt::from(k);
    match kind {
        Kind::Goods => rational::to_usize(&(rational::ceil(&(b_j * Rational::from_integer(k + 1))) - 1)),
        Kind::Chores => rational::to_usize(&(rational::floor(&(b_j * Rational::from_integer(k))) + 1)),
    }
}

/// Min (goods) or max (chores) of v_j over disjoint unions of f_j
/// acceptable bundles.
pub fn personalized_mms(ctx: &PersonalizedContext, v_j: &AdditiveValuation, b_j: &Rational) -> Result<Rational> {
    let m = ctx.anchor_valuation.len();
    if v_j.len() != m {
        return Err(Error::Precondition(format!("valuation has {} items, anchor has {m}", v_j.len())));
    }
    let f = ctx.representative_count(b_j);
    if f == 0 {
        return Ok(Rational::zero());
    }
    let reach = unions(ctx, f);
    let values = (0..reach.len()).filter(|&s| reach[s]).map(|s| v_j.value(ItemSet(s as u64)));
    let best = match ctx.kind {
        Kind::Goods => values.min(),
        Kind::Chores => values.max(),
    };
    best.ok_or_else(|| Error::Precondition(format!("no union of {f} acceptable bundles exists")))
}

/// reach[s]: s is a disjoint union of exactly `count` acceptable bundles.
fn unions(ctx: &PersonalizedContext, count: usize) -> Vec<bool> {
    let size = 1usize << ctx.anchor_valuation.len();
    let mut acc = vec![false; size];
    for s in &ctx.acceptable {
        acc[s.0 as usize] = true;
    }
    let mut reach = acc.clone();
    for _ in 1..count {
        let mut next = vec![false; size];
        for (s, slot) in next.iter_mut().enumerate() {
            // Walk the submasks a of s, empty included.
            let mut a = s;
            loop {
                if acc[a] && reach[s ^ a] {
                    *slot = true;
                    break;
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & s;
            }
        }
        reach = next;
    }
    reach
}

/// f_j/k of v_j(M) for goods, f_j/(k+1) of c_j(M) for chores.
pub fn personalized_ps(kind: Kind, k: usize, v_j: &AdditiveValuation, b_j: &Rational) -> Rational {
    let f = representative_count(kind, k, b_j);
    let denom = match kind {
        Kind::Goods => k,
        Kind::Chores => k + 1,
    };
    v_j.total() * Rational::new(BigInt::from(f), BigInt::from(denom))
}

/// Values of coupons 1, 2, ...: coupon r is worth the r-th best item.
pub fn coupon_values(v: &AdditiveValuation) -> Vec<Rational> {
    v.sorted_desc()
}

/// Value of a set of 1-based coupon indices.
pub fn coupon_set_value(v: &AdditiveValuation, coupons: &[usize]) -> Rational {
    let values = coupon_values(v);
    coupons.iter().fold(Rational::zero(), |acc, &r| acc + &values[r - 1])
}

/// Hands out bundles of the anchor's MMS partition, f_j per agent, and
/// checks every agent against her personalized share.
pub fn verify_personalized_feasibility(ctx: &PersonalizedContext, inst: &Instance) -> Result<Allocation> {
    if inst.kind != ctx.kind {
        return Err(Error::Precondition("instance kind differs from the anchor's".into()));
    }
    let counts: Vec<usize> = inst.agents.iter().map(|a| ctx.representative_count(&a.entitlement)).collect();
    let total: usize = counts.iter().sum();
    let parts = ctx.partition.len();
    let mut bundles = vec![ItemSet::EMPTY; inst.n()];
    let mut next = 0;
    match ctx.kind {
        Kind::Goods => {
            if total > parts {
                return Err(Error::Precondition(format!("agents need {total} bundles, the partition has {parts}")));
            }
            for (i, &f) in counts.iter().enumerate() {
                for _ in 0..f {
                    bundles[i] = bundles[i].union(ctx.partition[next]);
                    next += 1;
                }
            }
            // Leftovers only add value; they go to agent 0.
            for &s in &ctx.partition[next..] {
                bundles[0] = bundles[0].union(s);
            }
        }
        Kind::Chores => {
            if total < parts {
                return Err(Error::Precondition(format!("agents absorb {total} bundles, the partition has {parts}")));
            }
            for (i, &f) in counts.iter().enumerate() {
                for _ in 0..f {
                    if next == parts {
                        break;
                    }
                    bundles[i] = bundles[i].union(ctx.partition[next]);
                    next += 1;
                }
            }
        }
    }
    let alloc = Allocation { bundles };
    alloc.check(inst.items)?;
    for (i, a) in inst.agents.iter().enumerate() {
        let got = a.valuation.value(alloc.bundles[i]);
        let share = personalized_mms(ctx, &a.valuation, &a.entitlement)?;
        let ok = match ctx.kind {
            Kind::Goods => got >= share,
            Kind::Chores => got <= share,
        };
        assert!(ok, "agent {i} gets {got} against personalized share {share}");
    }
    Ok(alloc)
}
