//! Fair division of indivisible goods and chores among agents with
//! arbitrary entitlements. Everything is exact rational arithmetic.

pub mod bidding;
pub mod chores;
pub mod error;
pub mod goods_exante;
pub mod model;
pub mod oracles;
pub mod personalized;
pub mod rational;
pub mod shares;

pub use error::{Error, Result};
pub use model::{
    compare_bundles, order_items, parse_instance, AdditiveValuation, Agent, Allocation, Instance, ItemSet, Kind,
    OrderedValuation,
};
pub use rational::Rational;
