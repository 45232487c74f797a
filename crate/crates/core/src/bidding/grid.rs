//! Brute-force analyses behind the monotonicity and myopia fixtures.
//!
//! The grid game restricts the agent to bids that are multiples of a unit
//! while the adversary answers exactly (take at the agent's bid, or
//! leave), so budgets stay on the grid and a dense table solves it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::solver::{TwoPlayerSolution, DEFAULT_SOLVER_CAP};
use crate::error::Result;
use crate::rational::{self, Rational};

/// Best value the agent secures on the grid. `values` are best first,
/// budgets are in grid units.
pub fn grid_value(values: &[i64], own: usize, adv: usize) -> i64 {
    let m = values.len();
    let (w, h) = (own + 1, adv + 1);
    let mut next = vec![0i64; w * h];
    for r in (0..m).rev() {
        let mut cur = vec![0i64; w * h];
        for o in 0..=own {
            for a in 0..=adv {
                cur[o * h + a] = (0..=o)
                    .map(|p| {
                        let leave = values[r] + next[(o - p) * h + a];
                        if a >= p { leave.min(next[o * h + a - p]) } else { leave }
                    })
                    .max()
                    .unwrap();
            }
        }
        next = cur;
    }
    next[own * h + adv]
}

/// As `grid_value`, but the agent's bids may never increase.
pub fn monotone_grid_value(values: &[i64], own: usize, adv: usize) -> i64 {
    let m = values.len();
    let (h, c) = (adv + 1, own + 1);
    let idx = |o: usize, a: usize, cap: usize| (o * h + a) * c + cap;
    let size = (own + 1) * h * c;
    let mut next = vec![0i64; size];
    for r in (0..m).rev() {
        let mut cur = vec![0i64; size];
        for o in 0..=own {
            for a in 0..=adv {
                // best over p <= cap, as a running max in cap.
                let mut best = i64::MIN;
                for cap in 0..=own {
                    if cap <= o {
                        let p = cap;
                        let leave = values[r] + next[idx(o - p, a, p)];
                        let g = if a >= p { leave.min(next[idx(o, a - p, p)]) } else { leave };
                        best = best.max(g);
                    }
                    cur[idx(o, a, cap)] = best;
                }
            }
        }
        next = cur;
    }
    next[idx(own, adv, own)]
}

/// Exact value of bidding `p` on the first item and playing optimally
/// afterwards, with the adversary answering optimally. `values` are best
/// first; the total budget is 1.
pub fn first_bid_value(values: &[Rational], b: &Rational, p: &Rational) -> Result<Rational> {
    assert!(!values.is_empty() && *p <= *b && *b < Rational::one());
    let rest = TwoPlayerSolution::from_values(&values[1..], DEFAULT_SOLVER_CAP)?;
    let left = Rational::one() - p;
    let leave = &values[0] + rest.value(0, &((b - p) / &left));
    let adversary = Rational::one() - b;
    if adversary >= *p {
        Ok(rational::min(leave, rest.value(0, &(b / &left))))
    } else {
        Ok(leave)
    }
}

/// A fixed adversary line for a first item followed by `count` equal
/// fillers: take the first item with `first_bid`, then bid `price` on each
/// filler until `wins` of them are taken, then stop.
#[derive(Clone, Debug)]
pub struct TailCertificate {
    pub first_bid: Rational,
    pub price: Rational,
    pub wins: usize,
}

impl TailCertificate {
    /// Upper bound on what an agent with budget `b` who bid `p` on the
    /// first item can still collect against this line, counted in fillers;
    /// None when the line does not apply or the adversary cannot pay.
    pub fn agent_fillers(&self, b: &Rational, p: &Rational, count: usize) -> Option<usize> {
        let adversary = Rational::one() - b;
        if *p >= self.first_bid {
            return None;
        }
        let cost = &self.first_bid + &self.price * Rational::from_integer(BigInt::from(self.wins));
        if cost > adversary {
            return None;
        }
        // Beating a price needs a strictly larger bid, so K wins need K * price < b.
        let ratio = b / &self.price;
        let ceil = rational::ceil(&ratio);
        let blocks = rational::to_usize(&(ceil - BigInt::one()));
        if count < blocks + self.wins {
            return None;
        }
        Some(count - self.wins)
    }
}

/// Least common multiple of the denominators, for putting budgets and
/// values on one integer grid.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales rationals sharing `unit` to integers.
pub fn to_units(xs: &[Rational], unit: &BigInt) -> Vec<i64> {
    xs.iter()
        .map(|x| {
            let y = x * Rational::from_integer(unit.clone());
            assert!(y.is_integer(), "{x} is not on the grid");
            i64::try_from(y.to_integer()).expect("grid value fits i64")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::rational::rat;

    #[test]
    fn grid_matches_hand_cases() {
        // One item: the agent wins iff it outbids the adversary's budget.
        assert_eq!(grid_value(&[1], 2, 1), 1);
        assert_eq!(grid_value(&[1], 1, 1), 0);
        // A broke adversary still matches a zero bid.
        assert_eq!(grid_value(&[1], 0, 0), 0);
        assert_eq!(monotone_grid_value(&[1], 2, 1), 1);
        assert!(monotone_grid_value(&[3, 2, 1], 4, 5) <= grid_value(&[3, 2, 1], 4, 5));
    }

    #[test]
    fn first_bid_on_one_item() {
        let v = [rat(1, 1), rat(0, 1)];
        // With b = 3/5 a first bid of 1/2 wins the item outright.
        assert_eq!(first_bid_value(&v, &rat(3, 5), &rat(1, 2)).unwrap(), rat(1, 1));
        assert_eq!(first_bid_value(&v, &rat(3, 5), &rat(2, 5)).unwrap(), Rational::zero());
    }
}
