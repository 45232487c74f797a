//! Strategy library. Every strategy is a pure function of the game state;
//! anything "remembered" is recomputed from the history.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::game::{best_remaining, GameState, Opponents, Strategy};
use super::solver::{solve_with_cap, TwoPlayerSolution, DEFAULT_SOLVER_CAP};
use crate::error::{Error, Result};
use crate::model::{order_items, AdditiveValuation, ItemSet, OrderedValuation};
use crate::rational::{self, rat, Rational};
use crate::shares::{tps, unit_upper_k};

#[derive(Clone, Debug)]
struct Profile {
    v: AdditiveValuation,
    ordered: OrderedValuation,
    b: Rational,
}

impl Profile {
    fn new(v: &AdditiveValuation, b: &Rational) -> Result<Self> {
        if !b.is_positive() || *b > Rational::one() {
            return Err(Error::Precondition(format!("entitlement {b} outside (0, 1]")));
        }
        if v.len() > 64 {
            return Err(Error::Precondition("at most 64 items".into()));
        }
        Ok(Profile { v: v.clone(), ordered: order_items(v), b: b.clone() })
    }

    fn pick(&self, state: &GameState) -> usize {
        best_remaining(&self.ordered, state.remaining).expect("picking from an empty pool")
    }

    fn top_value(&self, remaining: ItemSet) -> Rational {
        best_remaining(&self.ordered, remaining).map_or_else(Rational::zero, |j| self.v.item(j).clone())
    }
}

fn clamp(bid: Rational, budget: &Rational) -> Rational {
    if bid > *budget {
        budget.clone()
    } else if bid.is_negative() {
        Rational::zero()
    } else {
        bid
    }
}

/// Bid the value of the best remaining item after rescaling budgets and
/// the remaining value to 1 at the start of `round`.
fn bid_value_from(p: &Profile, me: usize, state: &GameState, round: usize, model: Opponents) -> Rational {
    let entry = state.view_at(me, round, model);
    let now = state.view(me, model);
    let left = p.v.value(entry.remaining);
    if left.is_zero() {
        return Rational::zero();
    }
    let scale = (&entry.budget + &entry.others) / left;
    clamp(p.top_value(now.remaining) * scale, &now.budget)
}

/// Bids the whole remaining budget every round.
pub struct AllIn {
    p: Profile,
}

impl AllIn {
    pub fn new(v: &AdditiveValuation, b: &Rational) -> Result<Self> {
        Ok(AllIn { p: Profile::new(v, b)? })
    }
}

impl Strategy for AllIn {
    fn name(&self) -> String {
        "all-in".into()
    }
    fn bid(&self, me: usize, state: &GameState) -> Rational {
        state.budgets[me].clone()
    }
    fn pick(&self, _me: usize, state: &GameState) -> usize {
        self.p.pick(state)
    }
}

pub struct ZeroBid {
    p: Profile,
}

impl ZeroBid {
    pub fn new(v: &AdditiveValuation, b: &Rational) -> Result<Self> {
        Ok(ZeroBid { p: Profile::new(v, b)? })
    }
}

impl Strategy for ZeroBid {
    fn name(&self) -> String {
        "zero".into()
    }
    fn bid(&self, _me: usize, _state: &GameState) -> Rational {
        Rational::zero()
    }
    fn pick(&self, _me: usize, state: &GameState) -> usize {
        self.p.pick(state)
    }
}

/// Bids the best remaining item's share of v(M), capped by the budget.
pub struct BidYourValue {
    p: Profile,
}

impl BidYourValue {
    pub fn new(v: &AdditiveValuation, b: &Rational) -> Result<Self> {
        Ok(BidYourValue { p: Profile::new(v, b)? })
    }
}

impl Strategy for BidYourValue {
    fn name(&self) -> String {
        "bid-your-value".into()
    }
    fn bid(&self, me: usize, state: &GameState) -> Rational {
        bid_value_from(&self.p, me, state, 1, Opponents::Exact)
    }
    fn pick(&self, _me: usize, state: &GameState) -> usize {
        self.p.pick(state)
    }
}

/// Plays the exact two-player max-min strategy against everybody else
/// pooled into one adversary. Remaining sets that are not a suffix of the
/// agent's order get solved on demand.
pub struct Optimal {
    p: Profile,
    model: Opponents,
    cap: usize,
    solutions: Mutex<HashMap<u64, Arc<TwoPlayerSolution>>>,
}

impl Optimal {
    pub fn new(v: &AdditiveValuation, b: &Rational) -> Result<Self> {
        Self::with_cap(v, b, DEFAULT_SOLVER_CAP)
    }

    pub fn with_cap(v: &AdditiveValuation, b: &Rational, cap: usize) -> Result<Self> {
        let s = Self::unchecked(Profile::new(v, b)?, Opponents::Exact, cap);
        let full = solve_with_cap(&s.p.ordered, cap)?;
        s.solutions.lock().unwrap().insert(ItemSet::full(v.len()).0, Arc::new(full));
        Ok(s)
    }

    fn unchecked(p: Profile, model: Opponents, cap: usize) -> Self {
        Optimal { p, model, cap, solutions: Mutex::new(HashMap::new()) }
    }

    /// V_1(b): the value this strategy guarantees in the two-player game.
    pub fn guarantee(&self) -> Rational {
        let full = self.solution(ItemSet::full(self.p.v.len())).expect("solved at construction");
        full.0.value(0, &self.p.b)
    }

    /// The solution covering `remaining` and the round it starts at.
    fn solution(&self, remaining: ItemSet) -> Option<(Arc<TwoPlayerSolution>, usize)> {
        let m = self.p.v.len();
        let r = m - remaining.len();
        let suffix: ItemSet = self.p.ordered.order()[r..].iter().copied().collect();
        let mut cache = self.solutions.lock().unwrap();
        if suffix == remaining {
            if let Some(full) = cache.get(&ItemSet::full(m).0) {
                return Some((full.clone(), r));
            }
        }
        if let Some(s) = cache.get(&remaining.0) {
            return Some((s.clone(), 0));
        }
        let sub = self.solve_subset(remaining)?;
        cache.insert(remaining.0, sub.clone());
        Some((sub, 0))
    }

    fn solve_subset(&self, remaining: ItemSet) -> Option<Arc<TwoPlayerSolution>> {
        if remaining.len() > self.cap {
            return None;
        }
        let values: Vec<Rational> = self
            .p
            .ordered
            .order()
            .iter()
            .filter(|&&j| remaining.contains(j))
            .map(|&j| self.p.v.item(j).clone())
            .collect();
        Some(Arc::new(TwoPlayerSolution::from_values(&values, self.cap).ok()?))
    }
}

impl Strategy for Optimal {
    fn name(&self) -> String {
        "optimal".into()
    }
    fn bid(&self, me: usize, state: &GameState) -> Rational {
        let view = state.view(me, self.model);
        let total = &view.budget + &view.others;
        if total.is_zero() || view.remaining.is_empty() {
            return Rational::zero();
        }
        match self.solution(view.remaining) {
            Some((sol, round)) => {
                let f = &view.budget / &total;
                clamp(sol.bid_fraction(round, &f) * total, &view.budget)
            }
            // Too many items left to solve exactly.
            None => bid_value_from(&self.p, me, state, state.round, self.model),
        }
    }
    fn pick(&self, _me: usize, state: &GameState) -> usize {
        self.p.pick(state)
    }
}

/// Bid on an item worth x/72 of the target scale, for the k = 2 regime.
pub fn k2_table(x: &Rational) -> Rational {
    let n = |k: i64| Rational::from_integer(BigInt::from(k));
    if x.is_zero() {
        Rational::zero()
    } else if *x < n(8) {
        x.clone()
    } else if *x < n(9) {
        n(8)
    } else if *x < n(13) {
        x - n(1)
    } else if *x < n(14) {
        n(12)
    } else {
        x - n(2)
    }
}

/// The strategy aiming at half of TPS(v, 1/k) for 1/(k+1) < b <= 1/k.
///
/// Values are scaled so that TPS(v, 1/k) = 1/k, making the target 1/(2k)
/// directly comparable with budgets. Once the agent's budget exceeds the
/// bound on everybody else's, it plays the two-player optimum.
pub struct Safe {
    p: Profile,
    k: usize,
    lambda: Rational,
    lookahead: bool,
    optimal: Optimal,
    label: &'static str,
}

impl Safe {
    pub fn new(v: &AdditiveValuation, b: &Rational) -> Result<Self> {
        let p = Profile::new(v, b)?;
        let k = rational::to_usize(&unit_upper_k(b));
        let unit = Rational::new(BigInt::one(), BigInt::from(k));
        let t = tps(v, &unit);
        let lambda = if t.is_zero() { Rational::zero() } else { &unit / t };
        let optimal = Optimal::unchecked(p.clone(), Opponents::Bound, DEFAULT_SOLVER_CAP);
        Ok(Safe { p, k, lambda, lookahead: true, optimal, label: "safe" })
    }

    /// The table strategy on its own; requires 1/3 < b <= 1/2.
    pub fn k2_table(v: &AdditiveValuation, b: &Rational) -> Result<Self> {
        if *b <= rat(1, 3) || *b > rat(1, 2) {
            return Err(Error::Precondition(format!("the table strategy needs 1/3 < b <= 1/2, got {b}")));
        }
        Ok(Safe { label: "k2-table", ..Self::new(v, b)? })
    }

    /// Drops the eighth-item check that precedes the table.
    pub fn without_lookahead(self) -> Self {
        Safe { lookahead: false, ..self }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn latched(&self, me: usize, state: &GameState) -> bool {
        (1..=state.round).any(|r| {
            let view = state.view_at(me, r, Opponents::Bound);
            view.budget > view.others
        })
    }

    fn scaled(&self, x: &Rational) -> Rational {
        x * &self.lambda
    }

    fn table_bid(&self, me: usize, state: &GameState) -> Rational {
        let view = state.view(me, Opponents::Bound);
        let beta = view.budget;
        let need = rat(1, 4) - self.scaled(&self.p.v.value(view.won));
        if !need.is_positive() {
            return Rational::zero();
        }
        let m = self.p.v.len();
        if self.lookahead && m >= 8 && state.round <= 8 {
            let e8 = self.p.v.item(self.p.ordered.order()[7]);
            if self.scaled(e8) >= rat(1, 12) {
                return clamp(rat(1, 9), &beta);
            }
        }
        if state.round >= 3 {
            let (first, second) = (&state.history[0], &state.history[1]);
            if first.winner == me && second.winner != me {
                let third = self.p.top_value(state.view_at(me, 3, Opponents::Bound).remaining);
                if self.scaled(&(self.p.v.item(first.item) + third)) < rat(1, 4) {
                    return bid_value_from(&self.p, me, state, 3, Opponents::Bound);
                }
            }
        }
        let x = self.scaled(&self.p.top_value(view.remaining));
        if x >= need {
            return beta;
        }
        let bid = k2_table(&(x * rat(72, 1))) / rat(72, 1);
        if bid > beta {
            beta
        } else {
            bid
        }
    }

    fn large_k_bid(&self, me: usize, state: &GameState) -> Rational {
        let view = state.view(me, Opponents::Bound);
        let beta = view.budget;
        let k = self.k as i64;
        let need = rat(1, 2 * k) - self.scaled(&self.p.v.value(view.won));
        if !need.is_positive() {
            return Rational::zero();
        }
        let x = self.scaled(&self.p.top_value(view.remaining));
        if x >= need || x > beta {
            return beta;
        }
        if x >= rat(1, 4 * k) && x < rat(1, 2 * k) {
            return clamp(rat(1, 2 * (k + 1)), &beta);
        }
        x
    }
}

impl Strategy for Safe {
    fn name(&self) -> String {
        self.label.into()
    }
    fn bid(&self, me: usize, state: &GameState) -> Rational {
        if self.lambda.is_zero() {
            return Rational::zero();
        }
        if self.k == 1 || self.latched(me, state) {
            return self.optimal.bid(me, state);
        }
        if self.k == 2 {
            self.table_bid(me, state)
        } else {
            self.large_k_bid(me, state)
        }
    }
    fn pick(&self, _me: usize, state: &GameState) -> usize {
        self.p.pick(state)
    }
}

/// Optimal play on a coarsened valuation for the rounds of the big items,
/// then bid-your-value. Loses at most eps * v(M) against the exact optimum.
pub struct Approx {
    p: Profile,
    eps: Rational,
    /// Rounds played by the coarsened optimum.
    prefix: usize,
    coarse: Option<TwoPlayerSolution>,
}

impl Approx {
    pub fn new(v: &AdditiveValuation, b: &Rational, eps: &Rational) -> Result<Self> {
        Self::with_cap(v, b, eps, DEFAULT_SOLVER_CAP)
    }

    pub fn with_cap(v: &AdditiveValuation, b: &Rational, eps: &Rational, cap: usize) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::Precondition("epsilon must be positive".into()));
        }
        let p = Profile::new(v, b)?;
        let total = v.total();
        let delta = eps / rat(4, 1);
        let ranked = p.ordered.ranked_values();
        let cut = &delta * &total;
        let prefix = ranked.iter().take_while(|&x| *x > cut).count();
        if total.is_zero() || prefix == 0 {
            return Ok(Approx { p, eps: eps.clone(), prefix: 0, coarse: None });
        }
        let values = coarsen(&ranked, prefix, &cut);
        let coarse = TwoPlayerSolution::from_values(&values, cap)?;
        Ok(Approx { p, eps: eps.clone(), prefix, coarse: Some(coarse) })
    }

    pub fn epsilon(&self) -> &Rational {
        &self.eps
    }
}

/// Keeps the first `prefix` values and spreads the rest evenly over the
/// fewest items that each stay at most `cut`.
pub fn coarsen(ranked: &[Rational], prefix: usize, cut: &Rational) -> Vec<Rational> {
    let mut out = ranked[..prefix].to_vec();
    let rest = rational::sum(&ranked[prefix..]);
    if rest.is_positive() {
        let count = rational::to_usize(&rational::ceil(&(&rest / cut)));
        let each = rest / Rational::from_integer(BigInt::from(count));
        out.extend(std::iter::repeat(each).take(count));
    }
    out
}

impl Strategy for Approx {
    fn name(&self) -> String {
        format!("approx:{}", rational::fmt_rational(&self.eps))
    }
    fn bid(&self, me: usize, state: &GameState) -> Rational {
        let view = state.view(me, Opponents::Exact);
        let played = self.p.v.len() - view.remaining.len();
        match &self.coarse {
            Some(sol) if played < self.prefix => {
                let total = &view.budget + &view.others;
                if total.is_zero() {
                    return Rational::zero();
                }
                clamp(sol.bid_fraction(played, &(&view.budget / &total)) * total, &view.budget)
            }
            Some(_) => bid_value_from(&self.p, me, state, self.prefix + 1, Opponents::Exact),
            None => bid_value_from(&self.p, me, state, 1, Opponents::Exact),
        }
    }
    fn pick(&self, _me: usize, state: &GameState) -> usize {
        self.p.pick(state)
    }
}

pub const STRATEGY_NAMES: &[&str] = &["safe", "optimal", "bid-your-value", "k2-table", "approx", "all-in", "zero"];

/// Builds a strategy from its CLI name; `approx:EPS` sets epsilon
/// (default 1/10).
pub fn strategy_by_name(name: &str, v: &AdditiveValuation, b: &Rational) -> Result<Box<dyn Strategy>> {
    let (base, arg) = match name.split_once(':') {
        Some((x, y)) => (x, Some(y)),
        None => (name, None),
    };
    if arg.is_some() && base != "approx" {
        return Err(Error::Parse(format!("strategy {base} takes no parameter")));
    }
    Ok(match base {
        "safe" => Box::new(Safe::new(v, b)?),
        "optimal" => Box::new(Optimal::new(v, b)?),
        "bid-your-value" => Box::new(BidYourValue::new(v, b)?),
        "k2-table" => Box::new(Safe::k2_table(v, b)?),
        "approx" => {
            let eps = arg.map(rational::parse_rational).transpose()?.unwrap_or_else(|| rat(1, 10));
            Box::new(Approx::new(v, b, &eps)?)
        }
        "all-in" => Box::new(AllIn::new(v, b)?),
        "zero" => Box::new(ZeroBid::new(v, b)?),
        _ => return Err(Error::Parse(format!("unknown strategy {name:?}; expected one of {}", STRATEGY_NAMES.join(", ")))),
    })
}
