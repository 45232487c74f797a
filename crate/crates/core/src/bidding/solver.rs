//! Exact max-min solver for the two-player bidding game.
//!
//! P1 holds fraction f of the remaining total budget and the items are
//! consumed best first. Write T_r(x) for the least fraction above which P1
//! can secure a bundle at least as good as x from items r.. (strict order
//! of the perturbed valuation). With W the next round's game and
//!   y_a = least bundle of the rest with {e_r} + y_a >= x,
//!   y_b = least bundle of the rest with y_b >= x,
//! a bid of q (fraction of the total) secures x iff
//!   (f-q)/(1-q) > T(y_a)                     (P1 wins e_r, pays q)
//! and, when P2 can afford q <= 1-f, also f/(1-q) > T(y_b) (P2 takes e_r).
//! Solving these linear constraints in (f, q) gives
//!   T_r(x) = min( 1/(2 - t_a),  t_b/(1 - t_a + t_b) if t_b >= t_a else t_a )
//! with t_a = T(y_a) (0 for the empty bundle) and t_b = T(y_b), the second
//! term only when y_b exists. Each round is one pass over its bundles.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::step::StepFunction;
use crate::error::{Error, Result};
use crate::model::{order_items, AdditiveValuation, ItemSet, OrderedValuation};
use crate::rational::{self, Rational};

pub const DEFAULT_SOLVER_CAP: usize = 16;

/// Bundles of the whole game in increasing strict order, with the
/// threshold fraction of each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdVector {
    pub ranks: Vec<ItemSet>,
    pub t: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct TwoPlayerSolution {
    ordered: OrderedValuation,
    m: usize,
    /// Masks below use bit r for the item of rank r.
    sums: Vec<Rational>,
    rank_of: Vec<u32>,
    /// suffix_sorted[r]: masks over ranks r.. in increasing order.
    suffix_sorted: Vec<Vec<u64>>,
    /// thresholds[r][mask >> r].
    thresholds: Vec<Vec<Rational>>,
    monotone: Vec<bool>,
}

struct Parents {
    a: u64,
    t_a: Rational,
    b: Option<(u64, Rational)>,
}

pub fn solve_two_player(v: &OrderedValuation) -> Result<TwoPlayerSolution> {
    solve_with_cap(v, DEFAULT_SOLVER_CAP)
}

pub fn solve_with_cap(v: &OrderedValuation, cap: usize) -> Result<TwoPlayerSolution> {
    let m = v.len();
    if m > cap {
        return Err(Error::Cap { what: "two-player solver", needed: format!("2^{m} bundles"), cap: 1u64 << cap });
    }
    let values = v.ranked_values();
    let size = 1usize << m;
    let mut sums = vec![Rational::zero(); size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &values[low];
    }
    let mut all: Vec<u64> = (0..size as u64).collect();
    all.sort_by(|&a, &b| cmp_masks(&sums, a, b));
    let mut rank_of = vec![0u32; size];
    for (pos, &mask) in all.iter().enumerate() {
        rank_of[mask as usize] = pos as u32;
    }
    let mut suffix_sorted = vec![Vec::new(); m + 1];
    for (r, slot) in suffix_sorted.iter_mut().enumerate() {
        let low = (1u64 << r) - 1;
        *slot = all.iter().copied().filter(|&x| x & low == 0).collect();
    }
    suffix_sorted[0] = all;

    let mut sol = TwoPlayerSolution {
        ordered: v.clone(),
        m,
        sums,
        rank_of,
        suffix_sorted,
        thresholds: vec![Vec::new(); m + 1],
        monotone: vec![true; m + 1],
    };
    sol.thresholds[m] = vec![Rational::zero()];
    for r in (0..m).rev() {
        let count = 1usize << (m - r);
        let mut t = vec![Rational::zero(); count];
        for (local, slot) in t.iter_mut().enumerate().skip(1) {
            let p = sol.parents(r, (local as u64) << r);
            *slot = threshold_from(&p);
        }
        sol.thresholds[r] = t;
        let order = &sol.suffix_sorted[r];
        sol.monotone[r] = order.windows(2).all(|w| sol.thresholds[r][(w[0] >> r) as usize] < sol.thresholds[r][(w[1] >> r) as usize]);
    }
    Ok(sol)
}

fn cmp_masks(sums: &[Rational], a: u64, b: u64) -> Ordering {
    sums[a as usize].cmp(&sums[b as usize]).then_with(|| a.reverse_bits().cmp(&b.reverse_bits()))
}

fn threshold_from(p: &Parents) -> Rational {
    let one = Rational::one();
    let t_a = &p.t_a;
    let case_a = (&one + &one - t_a).recip();
    match &p.b {
        None => case_a,
        Some((_, t_b)) => {
            let case_b = if t_b >= t_a { t_b / (&one - t_a + t_b) } else { t_a.clone() };
            rational::min(case_a, case_b)
        }
    }
}

impl TwoPlayerSolution {
    /// Solves for a plain list of values, taken best first.
    pub fn from_values(values: &[Rational], cap: usize) -> Result<Self> {
        let v = AdditiveValuation::new(values.to_vec())?;
        solve_with_cap(&order_items(&v), cap)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ordered(&self) -> &OrderedValuation {
        &self.ordered
    }

    fn parents(&self, r: usize, x: u64) -> Parents {
        let rest = &self.suffix_sorted[r + 1];
        let bit = 1u64 << r;
        let rx = self.rank_of[x as usize];
        let ia = rest.partition_point(|&y| self.rank_of[(y | bit) as usize] < rx);
        let a = *rest.get(ia).expect("x minus e_r always qualifies");
        let next = &self.thresholds[r + 1];
        let t_a = if a == 0 { Rational::zero() } else { next[(a >> (r + 1)) as usize].clone() };
        let ib = rest.partition_point(|&y| self.rank_of[y as usize] < rx);
        let b = rest.get(ib).map(|&y| (y, next[(y >> (r + 1)) as usize].clone()));
        Parents { a, t_a, b }
    }

    fn to_items(&self, mask: u64) -> ItemSet {
        ItemSet(mask).iter().map(|r| self.ordered.order()[r]).collect()
    }

    fn from_items(&self, s: ItemSet) -> u64 {
        s.iter().fold(0u64, |acc, j| acc | 1u64 << self.ordered.rank(j))
    }

    pub fn threshold_vector(&self) -> ThresholdVector {
        let order = &self.suffix_sorted[0];
        ThresholdVector {
            ranks: order.iter().map(|&x| self.to_items(x)).collect(),
            t: order.iter().map(|&x| self.thresholds[0][x as usize].clone()).collect(),
        }
    }

    /// Threshold of a bundle drawn from items of rank `round`.. (0-based round).
    pub fn threshold(&self, round: usize, bundle: ItemSet) -> Rational {
        let x = self.from_items(bundle);
        assert_eq!(x & ((1u64 << round) - 1), 0, "bundle uses consumed items");
        self.thresholds[round][(x >> round) as usize].clone()
    }

    fn guaranteed_mask(&self, round: usize, f: &Rational) -> u64 {
        let order = &self.suffix_sorted[round];
        let t = &self.thresholds[round];
        let below = |x: &u64| t[(x >> round) as usize] < *f;
        if self.monotone[round] {
            let n = order.partition_point(below);
            order[n.saturating_sub(1)]
        } else {
            *order.iter().rev().find(|x| below(x)).unwrap_or(&0)
        }
    }

    /// Best bundle P1 can secure from round `round` on with fraction f.
    pub fn guaranteed(&self, round: usize, f: &Rational) -> ItemSet {
        self.to_items(self.guaranteed_mask(round, f))
    }

    pub fn value(&self, round: usize, f: &Rational) -> Rational {
        self.sums[self.guaranteed_mask(round, f) as usize].clone()
    }

    /// V_round as a step function of the fraction, in v-values.
    pub fn value_fn(&self, round: usize) -> StepFunction<Rational> {
        let order = &self.suffix_sorted[round];
        let t = &self.thresholds[round];
        // Keep bundles not undercut by a better bundle's threshold.
        let mut kept: Vec<u64> = Vec::new();
        let mut floor: Option<&Rational> = None;
        for &x in order.iter().rev() {
            let tx = &t[(x >> round) as usize];
            if x != 0 && floor.map_or(true, |fl| tx < fl) {
                kept.push(x);
                floor = Some(tx);
            }
        }
        kept.reverse();
        StepFunction::new(
            Rational::zero(),
            kept.iter().map(|&x| t[(x >> round) as usize].clone()).collect(),
            kept.iter().map(|&x| self.sums[x as usize].clone()).collect(),
        )
    }

    /// The smallest bid fraction securing V_round(f), or the midpoint of
    /// the securing interval when its lower end is open.
    pub fn bid_fraction(&self, round: usize, f: &Rational) -> Rational {
        let x = self.guaranteed_mask(round, f);
        if x == 0 || round >= self.m {
            return Rational::zero();
        }
        let one = Rational::one();
        let p = self.parents(round, x);
        let win_cap = if p.a == 0 { None } else { Some((f - &p.t_a) / (&one - &p.t_a)) };
        let two = &one + &one;
        if let Some((_, t_b)) = &p.b {
            let (mut lo, mut lo_open) = (Rational::zero(), false);
            let c = &one - f / t_b;
            if c >= lo {
                lo = c;
                lo_open = true;
            }
            let (mut hi, mut hi_open) = (rational::min(f.clone(), &one - f), false);
            if let Some(h) = &win_cap {
                if *h <= hi {
                    hi = h.clone();
                    hi_open = true;
                }
            }
            if lo < hi || (lo == hi && !lo_open && !hi_open) {
                return if lo_open { (lo + hi) / two } else { lo };
            }
        }
        let lo = &one - f;
        let hi = match win_cap {
            Some(h) if h <= *f => h,
            _ => f.clone(),
        };
        debug_assert!(lo < hi, "no securing bid at round {round}");
        (lo + hi) / two
    }

    pub fn to_json(&self) -> Value {
        let tv = self.threshold_vector();
        let thresholds: Vec<Value> = tv
            .ranks
            .iter()
            .zip(&tv.t)
            .enumerate()
            .map(|(j, (s, t))| {
                json!({
                    "rank": j + 1,
                    "bundle": s.to_json(),
                    "value": rational::to_json(&self.ordered.base().value(*s)),
                    "threshold": rational::to_json(t),
                })
            })
            .collect();
        let vf = self.value_fn(0);
        let mut pieces = vec![json!({"from": "0", "to": vf.breakpoints().first().map_or("1".to_string(), rational::fmt_rational), "closed_left": true, "value": rational::to_json(vf.base())})];
        for (j, (t, val)) in vf.breakpoints().iter().zip(vf.values()).enumerate() {
            let to = vf.breakpoints().get(j + 1).map_or("1".to_string(), rational::fmt_rational);
            pieces.push(json!({"from": rational::fmt_rational(t), "to": to, "closed_left": false, "value": rational::to_json(val)}));
        }
        json!({
            "items": self.m,
            "order": self.ordered.order(),
            "thresholds": thresholds,
            "value_function": pieces,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn solve(x: &[i64]) -> TwoPlayerSolution {
        solve_two_player(&order_items(&AdditiveValuation::from_ints(x))).unwrap()
    }

    #[test]
    fn one_item() {
        let s = solve(&[1]);
        assert_eq!(s.threshold_vector().t, vec![int(0), rat(1, 2)]);
        assert_eq!(s.value(0, &rat(1, 2)), int(0));
        assert_eq!(s.value(0, &rat(51, 100)), int(1));
    }

    #[test]
    fn two_items() {
        let s = solve(&[2, 1]);
        assert_eq!(s.threshold_vector().t, vec![int(0), rat(1, 3), rat(1, 2), rat(2, 3)]);
        let vf = s.value_fn(0);
        assert_eq!(*vf.eval(&rat(1, 3)), int(0));
        assert_eq!(*vf.eval(&rat(2, 5)), int(1));
        assert_eq!(*vf.eval(&rat(3, 5)), int(2));
        assert_eq!(*vf.eval(&int(1)), int(3));
    }

    #[test]
    fn bids_secure_the_value() {
        let s = solve(&[2, 1]);
        // f = 2/5 secures {e2}: bid in (1/4, 2/5].
        let q = s.bid_fraction(0, &rat(2, 5));
        assert!(q > rat(1, 4) && q <= rat(2, 5));
        assert_eq!(s.bid_fraction(0, &rat(1, 5)), int(0));
    }

    #[test]
    fn cap_is_enforced() {
        let v = order_items(&AdditiveValuation::from_ints(&[1; 5]));
        assert!(matches!(solve_with_cap(&v, 4), Err(Error::Cap { .. })));
    }
}
