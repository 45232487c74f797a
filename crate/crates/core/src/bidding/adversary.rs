//! Worst case of a strategy in the two-player game. The adversary holds
//! 1 - b and in each round either leaves the item to the agent or takes
//! the agent's favourite remaining item at the agent's bid (ties go to the
//! adversary, and overpaying never helps it). That is one bit per round.

use num_traits::One;

use super::game::{best_remaining, check_bid, check_pick, GameState, RoundRecord, Strategy};
use crate::error::{Error, Result};
use crate::model::{order_items, AdditiveValuation, ItemSet, OrderedValuation};
use crate::rational::Rational;

/// Largest number of items searched; the tree has up to 2^m leaves.
pub const DEFAULT_ADVERSARY_CAP: usize = 20;

#[derive(Clone, Debug)]
pub struct AdversaryReport {
    pub value: Rational,
    pub bundle: ItemSet,
    /// The worst line found: true where the adversary took the item.
    pub takes: Vec<bool>,
    pub leaves: u64,
}

pub fn exhaustive_adversary_value(v: &AdditiveValuation, b: &Rational, strategy: &dyn Strategy) -> Result<Rational> {
    Ok(exhaustive_adversary(v, b, strategy, DEFAULT_ADVERSARY_CAP)?.value)
}

pub fn exhaustive_adversary(
    v: &AdditiveValuation,
    b: &Rational,
    strategy: &dyn Strategy,
    cap: usize,
) -> Result<AdversaryReport> {
    let m = v.len();
    if m > cap {
        return Err(Error::Cap { what: "exhaustive adversary", needed: format!("2^{m} lines"), cap: 1u64 << cap });
    }
    let mut search = Search {
        v,
        ordered: order_items(v),
        strategy,
        state: GameState::new(vec![b.clone(), Rational::one() - b], m),
        leaves: 0,
    };
    let (value, takes) = search.run()?;
    let mut state = GameState::new(vec![b.clone(), Rational::one() - b], m);
    // Replay the worst line to recover the bundle.
    for &take in &takes {
        let bid = strategy.bid(0, &state);
        let round = state.round;
        let rec = if take {
            let item = best_remaining(&search.ordered, state.remaining).expect("items left");
            RoundRecord { round, bids: vec![bid.clone(), bid.clone()], winner: 1, item, payment: bid }
        } else {
            let item = strategy.pick(0, &state);
            RoundRecord { round, bids: vec![bid.clone(), Rational::default()], winner: 0, item, payment: bid }
        };
        state.apply(rec);
    }
    Ok(AdversaryReport { value, bundle: state.bundles[0], takes, leaves: search.leaves })
}

struct Search<'a> {
    v: &'a AdditiveValuation,
    ordered: OrderedValuation,
    strategy: &'a dyn Strategy,
    state: GameState,
    leaves: u64,
}

impl Search<'_> {
    /// Returns the worst value and the adversary's bits along that line.
    fn run(&mut self) -> Result<(Rational, Vec<bool>)> {
        if self.state.remaining.is_empty() {
            self.leaves += 1;
            return Ok((self.v.value(self.state.bundles[0]), Vec::new()));
        }
        let round = self.state.round;
        let bid = self.strategy.bid(0, &self.state);
        check_bid(0, round, &bid, &self.state.budgets[0])?;

        let item = self.strategy.pick(0, &self.state);
        check_pick(0, round, item, self.state.remaining)?;
        self.state.apply(RoundRecord { round, bids: vec![bid.clone(), Rational::default()], winner: 0, item, payment: bid.clone() });
        let leave = self.run();
        self.state.undo();
        let (mut best, mut line) = leave?;
        line.insert(0, false);

        if self.state.budgets[1] >= bid {
            let item = best_remaining(&self.ordered, self.state.remaining).expect("items left");
            self.state.apply(RoundRecord { round, bids: vec![bid.clone(), bid.clone()], winner: 1, item, payment: bid });
            let take = self.run();
            self.state.undo();
            let (value, mut rest) = take?;
            if value < best {
                best = value;
                rest.insert(0, true);
                line = rest;
            }
        }
        Ok((best, line))
    }
}
