//! The n-player engine: each round every agent bids, the highest bid wins,
//! the winner pays its bid and picks one remaining item.

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, ItemSet, Kind, OrderedValuation};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    /// 1-based.
    pub round: usize,
    pub bids: Vec<Rational>,
    pub winner: usize,
    pub item: usize,
    pub payment: Rational,
}

impl RoundRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "round": self.round,
            "bids": self.bids.iter().map(rational::to_json).collect::<Vec<_>>(),
            "winner": self.winner,
            "item": self.item,
            "payment": rational::to_json(&self.payment),
        })
    }
}

#[derive(Clone, Debug)]
pub struct GameState {
    pub entitlements: Vec<Rational>,
    pub items: usize,
    pub remaining: ItemSet,
    pub budgets: Vec<Rational>,
    pub bundles: Vec<ItemSet>,
    /// 1-based index of the round about to be played.
    pub round: usize,
    pub history: Vec<RoundRecord>,
}

/// How a strategy accounts for the budget held by everybody else.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Opponents {
    /// Read the exact budgets off the state.
    Exact,
    /// Start from 1 - b and subtract the agent's own bid in every round it
    /// lost. Winners pay at least that much, so this never undercounts.
    Bound,
}

/// What one agent knows at the start of some round.
#[derive(Clone, Debug)]
pub struct AgentView {
    pub budget: Rational,
    pub others: Rational,
    pub remaining: ItemSet,
    pub won: ItemSet,
}

impl GameState {
    pub fn new(entitlements: Vec<Rational>, items: usize) -> Self {
        let n = entitlements.len();
        GameState {
            budgets: entitlements.clone(),
            entitlements,
            items,
            remaining: ItemSet::full(items),
            bundles: vec![ItemSet::EMPTY; n],
            round: 1,
            history: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.entitlements.len()
    }

    pub fn apply(&mut self, rec: RoundRecord) {
        debug_assert!(self.remaining.contains(rec.item));
        self.budgets[rec.winner] -= &rec.payment;
        self.bundles[rec.winner] = self.bundles[rec.winner].with(rec.item);
        self.remaining = self.remaining.without(rec.item);
        self.round += 1;
        self.history.push(rec);
    }

    pub fn undo(&mut self) {
        let rec = self.history.pop().expect("nothing to undo");
        self.budgets[rec.winner] += &rec.payment;
        self.bundles[rec.winner] = self.bundles[rec.winner].without(rec.item);
        self.remaining = self.remaining.with(rec.item);
        self.round -= 1;
    }

    /// The view of agent `me` at the start of 1-based round `round`.
    pub fn view_at(&self, me: usize, round: usize, model: Opponents) -> AgentView {
        let past = &self.history[..round - 1];
        let mut budget = self.entitlements[me].clone();
        let mut others = rational::sum(&self.entitlements) - &self.entitlements[me];
        let mut remaining = ItemSet::full(self.items);
        let mut won = ItemSet::EMPTY;
        for rec in past {
            remaining = remaining.without(rec.item);
            if rec.winner == me {
                budget -= &rec.payment;
                won = won.with(rec.item);
            } else {
                others -= match model {
                    Opponents::Exact => &rec.payment,
                    Opponents::Bound => &rec.bids[me],
                };
            }
        }
        AgentView { budget, others, remaining, won }
    }

    pub fn view(&self, me: usize, model: Opponents) -> AgentView {
        self.view_at(me, self.round, model)
    }
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> String;
    fn bid(&self, me: usize, state: &GameState) -> Rational;
    fn pick(&self, me: usize, state: &GameState) -> usize;
}

/// The agent's favourite remaining item under the strict order.
pub fn best_remaining(ordered: &OrderedValuation, remaining: ItemSet) -> Option<usize> {
    ordered.order().iter().copied().find(|&j| remaining.contains(j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    LowestIndex,
    /// One uniformly random priority order, drawn once per game.
    RandomOrder(u64),
}

impl TieBreak {
    pub fn priority(self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        if let TieBreak::RandomOrder(seed) = self {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        order
    }
}

#[derive(Clone, Debug)]
pub struct GameOutcome {
    pub allocation: Allocation,
    pub history: Vec<RoundRecord>,
    pub budgets: Vec<Rational>,
    pub priority: Vec<usize>,
}

impl GameOutcome {
    pub fn to_json(&self, inst: &Instance) -> Value {
        json!({
            "priority": self.priority,
            "rounds": self.history.iter().map(RoundRecord::to_json).collect::<Vec<_>>(),
            "allocation": self.allocation.to_json(),
            "values": self.allocation.values(inst).iter().map(rational::to_json).collect::<Vec<_>>(),
            "budgets_left": self.budgets.iter().map(rational::to_json).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn check_bid(agent: usize, round: usize, bid: &Rational, budget: &Rational) -> Result<()> {
    if bid.is_negative() || bid > budget {
        return Err(Error::IllegalMove {
            agent,
            round,
            reason: format!("bid {bid} outside [0, {budget}]"),
        });
    }
    Ok(())
}

pub(crate) fn check_pick(agent: usize, round: usize, item: usize, remaining: ItemSet) -> Result<()> {
    if item >= 64 || !remaining.contains(item) {
        return Err(Error::IllegalMove { agent, round, reason: format!("item {item} is not available") });
    }
    Ok(())
}

pub fn run_game(inst: &Instance, strategies: &[&dyn Strategy], tiebreak: TieBreak) -> Result<GameOutcome> {
    if inst.kind != Kind::Goods {
        return Err(Error::Precondition("the bidding game allocates goods".into()));
    }
    if strategies.len() != inst.n() {
        return Err(Error::Precondition(format!("{} strategies for {} agents", strategies.len(), inst.n())));
    }
    let priority = tiebreak.priority(inst.n());
    let mut state = GameState::new(inst.entitlements(), inst.items);
    while !state.remaining.is_empty() {
        let round = state.round;
        let mut bids = Vec::with_capacity(inst.n());
        for (i, s) in strategies.iter().enumerate() {
            let bid = s.bid(i, &state);
            check_bid(i, round, &bid, &state.budgets[i])?;
            bids.push(bid);
        }
        let top = bids.iter().max().expect("at least one agent").clone();
        let winner = *priority.iter().find(|&&i| bids[i] == top).expect("someone bid the max");
        let item = strategies[winner].pick(winner, &state);
        check_pick(winner, round, item, state.remaining)?;
        state.apply(RoundRecord { round, bids, winner, item, payment: top });
    }
    Ok(GameOutcome {
        allocation: Allocation { bundles: state.bundles },
        history: state.history,
        budgets: state.budgets,
        priority,
    })
}
