//! Ex-ante allocation of goods: the grand-bundle lottery against rounded
//! proportional shares, its tightness, and the impossibility of pairing an
//! ex-ante proportional guarantee with an ex-post MMS-hat guarantee.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::chores::{Outcome, RandomizedAssignment};
use crate::error::{Error, Result};
use crate::model::{AdditiveValuation, Allocation, Instance, ItemSet, Kind};
use crate::oracles::{enumerate_allocations, DEFAULT_ENUMERATION_CAP};
use crate::rational::{self, rat, Rational};
use crate::shares::{mms_hat, proportional_share, ps_hat, sylvester, sylvester_tight_entitlements, unit_upper_bound};

/// Number of Sylvester terms behind the default stand-in for gamma.
pub const DEFAULT_SYLVESTER_TERMS: usize = 8;

/// s_N with N = max(n_cap, n): a rational lower bound on gamma that still
/// bounds the rounded entitlements of n agents.
pub fn gamma_tilde(n: usize, n_cap: usize) -> Rational {
    let terms = n_cap.max(n).max(1);
    sylvester(terms).s[terms - 1].clone()
}

/// Gives agent i the grand bundle with probability b-hat_i / gamma-tilde;
/// the leftover probability goes to agent 0 as well.
pub fn exante_grand_bundle_lottery(inst: &Instance, n_cap: usize) -> Result<RandomizedAssignment> {
    if inst.kind != Kind::Goods {
        return Err(Error::Precondition("expected a goods instance".into()));
    }
    let n = inst.n();
    let gamma = gamma_tilde(n, n_cap);
    let hats: Vec<Rational> = inst.entitlements().iter().map(unit_upper_bound).collect();
    let hat_sum = rational::sum(&hats);
    let s_n = sylvester(n).s[n - 1].clone();
    assert!(hat_sum <= s_n, "rounded entitlements exceed s_n");
    assert!(s_n <= gamma, "s_n above the gamma stand-in");

    let mut probs: Vec<Rational> = hats.iter().map(|h| h / &gamma).collect();
    probs[0] += Rational::one() - hat_sum / &gamma;
    let full = ItemSet::full(inst.items);
    let outcomes = probs
        .into_iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(i, weight)| {
            let mut bundles = vec![ItemSet::EMPTY; n];
            bundles[i] = full;
            Outcome { weight, holders: Vec::new(), allocation: Allocation { bundles } }
        })
        .collect();
    Ok(RandomizedAssignment { outcomes, initial_edges: 0 })
}

#[derive(Clone, Debug)]
pub struct TightnessCertificate {
    pub instance: Instance,
    pub epsilon: Rational,
    /// Sum over agents of (1/s_n + epsilon) * PS-hat_i.
    pub demanded: Rational,
    pub total: Rational,
    pub infeasible: bool,
}

impl TightnessCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "epsilon": rational::to_json(&self.epsilon),
            "demanded": rational::to_json(&self.demanded),
            "total": rational::to_json(&self.total),
            "infeasible": self.infeasible,
        })
    }
}

/// On identical valuations the expected values of any lottery add up to at
/// most v(M), so demanding more than that in total is infeasible ex ante.
pub fn verify_exante_tightness(n: usize, epsilon: &Rational) -> Result<TightnessCertificate> {
    if !(1..=5).contains(&n) {
        return Err(Error::Precondition(format!("tightness check supports 1 to 5 agents, got {n}")));
    }
    let v = AdditiveValuation::from_ints(&[1]);
    let instance = Instance::identical(Kind::Goods, &v, &sylvester_tight_entitlements(n))?;
    let factor = sylvester(n).s[n - 1].recip() + epsilon;
    let demanded = instance.agents.iter().fold(Rational::zero(), |acc, a| acc + &factor * ps_hat(&a.valuation, &a.entitlement));
    let total = v.total();
    let infeasible = demanded > total;
    Ok(TightnessCertificate { instance, epsilon: epsilon.clone(), demanded, total, infeasible })
}

#[derive(Clone, Debug)]
pub struct ImpossibilityCertificate {
    pub instance: Instance,
    /// Agents whose MMS-hat is one unit item.
    pub favoured: Vec<usize>,
    pub allocations: u64,
    /// Allocations giving every favoured agent positive value.
    pub serving_favoured: u64,
    /// Among those, the largest value any other agent receives.
    pub best_other_value: Rational,
    pub proportional_shares: Vec<Rational>,
    pub holds: bool,
}

impl ImpossibilityCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "favoured": self.favoured,
            "allocations": self.allocations,
            "serving_favoured": self.serving_favoured,
            "best_other_value": rational::to_json(&self.best_other_value),
            "proportional_shares": self.proportional_shares.iter().map(rational::to_json).collect::<Vec<_>>(),
            "holds": self.holds,
        })
    }
}

/// n agents, m goods of which min(m, n - 1) have value 1 and the rest 0.
/// The first min(m, n - 1) agents sit strictly between 1/(m'+1) and 1/m'.
pub fn bobw_goods_impossibility_fixture(n: usize, m: usize) -> Result<ImpossibilityCertificate> {
    if n < 2 || m < 1 {
        return Err(Error::Precondition("needs n >= 2 and m >= 1".into()));
    }
    let k = m.min(n - 1);
    let values: Vec<i64> = (0..m).map(|j| i64::from(j < k)).collect();
    let v = AdditiveValuation::from_ints(&values);
    let kk = BigInt::from(k);
    let high = (Rational::new(BigInt::one(), &kk + 1) + Rational::new(BigInt::one(), kk.clone())) / rat(2, 1);
    let low = (Rational::one() - &high * Rational::from_integer(kk)) / Rational::from_integer(BigInt::from(n - k));
    let entitlements: Vec<Rational> = (0..n).map(|i| if i < k { high.clone() } else { low.clone() }).collect();
    let instance = Instance::identical(Kind::Goods, &v, &entitlements)?;

    let favoured: Vec<usize> = (0..k).collect();
    let mut holds = favoured.iter().all(|&i| mms_hat(&v, &entitlements[i]).map(|x| x == Rational::one()).unwrap_or(false));
    let proportional_shares: Vec<Rational> = entitlements.iter().map(|b| proportional_share(&v, b)).collect();
    holds &= proportional_shares.iter().all(|p| *p > Rational::zero());

    let (mut allocations, mut serving) = (0u64, 0u64);
    let mut best_other = Rational::zero();
    for alloc in enumerate_allocations(&instance, DEFAULT_ENUMERATION_CAP)? {
        allocations += 1;
        let values = alloc.values(&instance);
        if favoured.iter().all(|&i| values[i] > Rational::zero()) {
            serving += 1;
            for x in &values[k..] {
                best_other = rational::max(best_other, x.clone());
            }
        }
    }
    holds &= serving > 0 && best_other.is_zero();
    Ok(ImpossibilityCertificate {
        instance,
        favoured,
        allocations,
        serving_favoured: serving,
        best_other_value: best_other,
        proportional_shares,
        holds,
    })
}
