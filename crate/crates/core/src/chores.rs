//! Chore assignment with arbitrary responsibilities: a reverse picking
//! sequence driven by debts (every agent within her RRR share), and the
//! coupon lottery that adds exact proportionality in expectation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, ItemSet, Kind};
use crate::rational::{self, Rational};

/// Who picks when several agents carry positive debt.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SelectionRule {
    /// Largest debt, lowest index on ties.
    #[default]
    MaxDebt,
    /// Lowest index among agents with positive debt.
    FirstPositive,
}

/// `pi[r - 1]` picks when r chores remain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PickingSequence {
    pub pi: Vec<usize>,
}

pub fn build_picking_sequence(responsibilities: &[Rational], m: usize) -> Result<PickingSequence> {
    build_picking_sequence_with(responsibilities, m, SelectionRule::MaxDebt)
}

pub fn build_picking_sequence_with(responsibilities: &[Rational], m: usize, rule: SelectionRule) -> Result<PickingSequence> {
    if responsibilities.is_empty() || rational::sum(responsibilities) != Rational::one() {
        return Err(Error::Invalid("responsibilities must sum to 1".into()));
    }
    let mut debt = responsibilities.to_vec();
    let mut pi = Vec::with_capacity(m);
    let minus_one = -Rational::one();
    for _ in 0..m {
        let eligible = (0..debt.len()).filter(|&i| debt[i].is_positive());
        let pick = match rule {
            SelectionRule::MaxDebt => eligible.fold(None, |best: Option<usize>, i| match best {
                Some(j) if debt[j] >= debt[i] => Some(j),
                _ => Some(i),
            }),
            SelectionRule::FirstPositive => eligible.min(),
        }
        .expect("debts sum to 1, so someone owes");
        for (i, d) in debt.iter_mut().enumerate() {
            *d += &responsibilities[i];
        }
        debt[pick] -= Rational::one();
        assert!(debt[pick] > minus_one, "debt fell to -1");
        pi.push(pick);
    }
    Ok(PickingSequence { pi })
}

impl PickingSequence {
    /// Agent i with b_i <= 1/k appears at most j times among the first j*k
    /// reverse rounds, for every such k and j.
    pub fn satisfies_spreading(&self, responsibilities: &[Rational]) -> bool {
        responsibilities.iter().enumerate().all(|(i, b)| {
            let kmax = rational::to_usize(&rational::floor(&b.recip()));
            (1..=kmax).all(|k| {
                let mut count = 0;
                self.pi.iter().enumerate().all(|(r, &a)| {
                    count += usize::from(a == i);
                    // after round r + 1, allowed ceil((r + 1) / k) picks
                    count <= (r + 1).div_ceil(k)
                })
            })
        })
    }
}

/// Runs a reverse picking sequence: with r chores left, `holder(r)` takes
/// her cheapest remaining chore (lowest id on ties).
fn execute_reverse(inst: &Instance, holder: impl Fn(usize) -> usize) -> Allocation {
    let m = inst.items;
    let mut remaining = ItemSet::full(m);
    let mut bundles = vec![ItemSet::EMPTY; inst.n()];
    for r in (1..=m).rev() {
        let i = holder(r);
        let c = &inst.agents[i].valuation;
        let j = remaining
            .iter()
            .min_by(|&a, &b| c.item(a).cmp(c.item(b)).then(a.cmp(&b)))
            .expect("r chores remain");
        remaining = remaining.without(j);
        bundles[i] = bundles[i].with(j);
    }
    Allocation { bundles }
}

fn require_chores(inst: &Instance) -> Result<()> {
    if inst.kind != Kind::Chores {
        return Err(Error::Precondition("expected a chores instance".into()));
    }
    Ok(())
}

pub fn assign_rrr(inst: &Instance) -> Result<Allocation> {
    assign_rrr_with(inst, SelectionRule::MaxDebt)
}

pub fn assign_rrr_with(inst: &Instance, rule: SelectionRule) -> Result<Allocation> {
    require_chores(inst)?;
    let seq = build_picking_sequence_with(&inst.entitlements(), inst.items, rule)?;
    Ok(execute_reverse(inst, |r| seq.pi[r - 1]))
}

/// Fractional assignment of coupons (columns, main ones first) to
/// subagents (rows).
#[derive(Clone, Debug)]
pub struct CouponMatching {
    pub main: usize,
    pub aux: usize,
    /// Owning agent of each subagent.
    pub owner: Vec<usize>,
    pub fractional: Vec<Vec<Rational>>,
}

impl CouponMatching {
    pub fn new(responsibilities: &[Rational], m: usize) -> Result<Self> {
        if responsibilities.is_empty() || rational::sum(responsibilities) != Rational::one() {
            return Err(Error::Invalid("responsibilities must sum to 1".into()));
        }
        let mr = Rational::from_integer(BigInt::from(m));
        let slack: Vec<Rational> = responsibilities.iter().map(|b| Rational::from_integer(rational::ceil(&(b * &mr))) - b * &mr).collect();
        let t = rational::to_usize(&rational::sum(&slack).to_integer());
        let cols = m + t;
        let mut owner = Vec::new();
        let mut fractional = Vec::new();
        for (i, b) in responsibilities.iter().enumerate() {
            let share = |c: usize| if c < m { b.clone() } else { &slack[i] / Rational::from_integer(BigInt::from(t)) };
            let subs = rational::to_usize(&rational::ceil(&(b * &mr)));
            let first = fractional.len();
            for _ in 0..subs {
                owner.push(i);
                fractional.push(vec![Rational::zero(); cols]);
            }
            // Fill subagents one after another, coupon by coupon.
            let (mut row, mut room) = (first, Rational::one());
            for c in 0..cols {
                let mut left = share(c);
                while left.is_positive() {
                    let take = rational::min(left.clone(), room.clone());
                    fractional[row][c] += &take;
                    left -= &take;
                    room -= &take;
                    if room.is_zero() && row + 1 < first + subs {
                        row += 1;
                        room = Rational::one();
                    }
                }
            }
        }
        Ok(CouponMatching { main: m, aux: t, owner, fractional })
    }

    pub fn edge_count(&self) -> usize {
        self.fractional.iter().flatten().filter(|x| x.is_positive()).count()
    }
}

/// Peels perfect matchings off a doubly stochastic matrix. Returns
/// (weight, column matched to each row).
pub fn bvn_decompose(matrix: &[Vec<Rational>]) -> Result<Vec<(Rational, Vec<usize>)>> {
    let n = matrix.len();
    let one = Rational::one();
    for (r, row) in matrix.iter().enumerate() {
        if row.len() != n || rational::sum(row) != one || row.iter().any(|x| x.is_negative()) {
            return Err(Error::Invalid(format!("row {r} is not stochastic")));
        }
    }
    for c in 0..n {
        if matrix.iter().fold(Rational::zero(), |acc, row| acc + &row[c]) != one {
            return Err(Error::Invalid(format!("column {c} is not stochastic")));
        }
    }
    let mut left = matrix.to_vec();
    let mut out = Vec::new();
    let mut mass = Rational::zero();
    while mass < one {
        let matched = perfect_matching(&left).ok_or_else(|| Error::Invalid("no perfect matching on the support".into()))?;
        let weight = (0..n).map(|r| left[r][matched[r]].clone()).min().expect("n > 0");
        for r in 0..n {
            left[r][matched[r]] -= &weight;
        }
        mass += &weight;
        out.push((weight, matched));
    }
    Ok(out)
}

/// Kuhn's augmenting paths on the positive entries.
fn perfect_matching(m: &[Vec<Rational>]) -> Option<Vec<usize>> {
    let n = m.len();
    let mut col_of = vec![usize::MAX; n];
    let mut row_of = vec![usize::MAX; n];
    fn augment(r: usize, m: &[Vec<Rational>], seen: &mut [bool], col_of: &mut [usize], row_of: &mut [usize]) -> bool {
        for c in 0..m.len() {
            if m[r][c].is_positive() && !seen[c] {
                seen[c] = true;
                if row_of[c] == usize::MAX || augment(row_of[c], m, seen, col_of, row_of) {
                    row_of[c] = r;
                    col_of[r] = c;
                    return true;
                }
            }
        }
        false
    }
    for r in 0..n {
        let mut seen = vec![false; n];
        if !augment(r, m, &mut seen, &mut col_of, &mut row_of) {
            return None;
        }
    }
    Some(col_of)
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub weight: Rational,
    /// Agent holding main coupon r at index r - 1.
    pub holders: Vec<usize>,
    pub allocation: Allocation,
}

#[derive(Clone, Debug)]
pub struct RandomizedAssignment {
    pub outcomes: Vec<Outcome>,
    /// Positive entries of the fractional matching that was decomposed.
    pub initial_edges: usize,
}

pub fn assign_bobw(inst: &Instance) -> Result<RandomizedAssignment> {
    require_chores(inst)?;
    let coupons = CouponMatching::new(&inst.entitlements(), inst.items)?;
    if coupons.fractional.is_empty() {
        let allocation = Allocation { bundles: vec![ItemSet::EMPTY; inst.n()] };
        return Ok(RandomizedAssignment {
            outcomes: vec![Outcome { weight: Rational::one(), holders: Vec::new(), allocation }],
            initial_edges: 0,
        });
    }
    let outcomes = bvn_decompose(&coupons.fractional)?
        .into_iter()
        .map(|(weight, matched)| {
            let mut holders = vec![usize::MAX; coupons.main];
            for (row, &c) in matched.iter().enumerate() {
                if c < coupons.main {
                    holders[c] = coupons.owner[row];
                }
            }
            let allocation = execute_reverse(inst, |r| holders[r - 1]);
            Outcome { weight, holders, allocation }
        })
        .collect();
    Ok(RandomizedAssignment { outcomes, initial_edges: coupons.edge_count() })
}

impl RandomizedAssignment {
    pub fn total_weight(&self) -> Rational {
        self.outcomes.iter().fold(Rational::zero(), |acc, o| acc + &o.weight)
    }

    pub fn expected_values(&self, inst: &Instance) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); inst.n()];
        for o in &self.outcomes {
            for (i, x) in o.allocation.values(inst).into_iter().enumerate() {
                out[i] += x * &o.weight;
            }
        }
        out
    }

    /// marginals[i][r - 1]: probability that agent i holds main coupon r.
    pub fn coupon_marginals(&self, n: usize) -> Vec<Vec<Rational>> {
        let m = self.outcomes.first().map_or(0, |o| o.holders.len());
        let mut out = vec![vec![Rational::zero(); m]; n];
        for o in &self.outcomes {
            for (r, &i) in o.holders.iter().enumerate() {
                out[i][r] += &o.weight;
            }
        }
        out
    }

    /// Draws one outcome: a uniform u = x / 2^64 from a ChaCha8 stream
    /// seeded with `seed`, matched against cumulative weights.
    pub fn sample(&self, seed: u64) -> &Outcome {
        let x = ChaCha8Rng::seed_from_u64(seed).next_u64();
        let u = Rational::new(BigInt::from(x), BigInt::one() << 64);
        let mut acc = Rational::zero();
        for o in &self.outcomes {
            acc += &o.weight;
            if u < acc {
                return o;
            }
        }
        self.outcomes.last().expect("weights sum to 1")
    }

    pub fn to_json(&self, inst: &Instance) -> Value {
        json!({
            "outcomes": self.outcomes.iter().map(|o| json!({
                "weight": rational::to_json(&o.weight),
                "coupon_holders": o.holders,
                "allocation": o.allocation.to_json(),
                "values": o.allocation.values(inst).iter().map(rational::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "expected": self.expected_values(inst).iter().map(rational::to_json).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn sequences() {
        assert_eq!(build_picking_sequence(&[int(1)], 3).unwrap().pi, vec![0, 0, 0]);
        let half = [rat(1, 2), rat(1, 2)];
        let s = build_picking_sequence(&half, 4).unwrap();
        assert_eq!(s.pi, vec![0, 1, 0, 1]);
        assert!(s.satisfies_spreading(&half));
        let b = [rat(2, 3), rat(1, 3)];
        let s = build_picking_sequence(&b, 6).unwrap();
        assert!(s.satisfies_spreading(&b));
        assert_eq!(s.pi.iter().filter(|&&a| a == 1).count(), 2);
        assert!(!PickingSequence { pi: vec![1, 1, 0] }.satisfies_spreading(&b));
    }

    #[test]
    fn bvn_small() {
        let h = rat(1, 2);
        let d = bvn_decompose(&[vec![h.clone(), h.clone()], vec![h.clone(), h.clone()]]).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|(w, _)| *w == h));
        let d = bvn_decompose(&[vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        assert_eq!(d, vec![(int(1), vec![0, 1])]);
        assert!(bvn_decompose(&[vec![int(1), int(1)], vec![int(0), int(0)]]).is_err());
    }

    #[test]
    fn coupons_with_aux() {
        let c = CouponMatching::new(&[rat(3, 5), rat(2, 5)], 3).unwrap();
        assert_eq!((c.main, c.aux), (3, 1));
        assert_eq!(c.owner, vec![0, 0, 1, 1]);
        for row in &c.fractional {
            assert_eq!(rational::sum(row), int(1));
        }
    }
}
