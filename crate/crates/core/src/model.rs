use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Items are 0-based ids in a u64 bitmask, so instances hold at most 64.
pub const MAX_ITEMS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ItemSet(pub u64);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    pub fn full(m: usize) -> ItemSet {
        assert!(m <= MAX_ITEMS);
        if m == 64 { ItemSet(u64::MAX) } else { ItemSet((1u64 << m) - 1) }
    }

    pub fn single(i: usize) -> ItemSet {
        ItemSet(1u64 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> ItemSet {
        ItemSet(self.0 | 1u64 << i)
    }

    pub fn without(self, i: usize) -> ItemSet {
        ItemSet(self.0 & !(1u64 << i))
    }

    pub fn union(self, o: ItemSet) -> ItemSet {
        ItemSet(self.0 | o.0)
    }

    pub fn minus(self, o: ItemSet) -> ItemSet {
        ItemSet(self.0 & !o.0)
    }

    pub fn intersects(self, o: ItemSet) -> bool {
        self.0 & o.0 != 0
    }

    pub fn is_subset(self, o: ItemSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn to_json(self) -> Value {
        json!(self.to_vec())
    }
}

impl FromIterator<usize> for ItemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(ItemSet::EMPTY, ItemSet::with)
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Item values for goods, item costs for chores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveValuation {
    values: Vec<Rational>,
}

impl AdditiveValuation {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.len() > MAX_ITEMS {
            return Err(Error::Invalid(format!("{} items, at most {MAX_ITEMS} supported", values.len())));
        }
        if let Some((j, x)) = values.iter().enumerate().find(|(_, x)| x.is_negative()) {
            return Err(Error::Invalid(format!("negative value {x} for item {j}")));
        }
        Ok(AdditiveValuation { values })
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&x| rational::int(x)).collect()).expect("non-negative integers")
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn item(&self, j: usize) -> &Rational {
        &self.values[j]
    }

    pub fn value(&self, s: ItemSet) -> Rational {
        s.iter().fold(Rational::zero(), |acc, j| acc + &self.values[j])
    }

    pub fn total(&self) -> Rational {
        rational::sum(&self.values)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        assert!(!factor.is_negative());
        AdditiveValuation { values: self.values.iter().map(|x| x * factor).collect() }
    }

    pub fn sorted_desc(&self) -> Vec<Rational> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.cmp(a));
        v
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.values.iter().map(rational::to_json).collect())
    }
}

/// A valuation plus its item order: non-increasing value, ascending id on
/// ties. The order induces the strict bundle order of the perturbed
/// valuation in which the item of rank r gets an extra 2^-r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedValuation {
    base: AdditiveValuation,
    order: Vec<usize>,
    rank: Vec<usize>,
}

pub fn order_items(v: &AdditiveValuation) -> OrderedValuation {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v.item(b).cmp(v.item(a)).then(a.cmp(&b)));
    let mut rank = vec![0; v.len()];
    for (r, &j) in order.iter().enumerate() {
        rank[j] = r;
    }
    OrderedValuation { base: v.clone(), order, rank }
}

impl OrderedValuation {
    pub fn base(&self) -> &AdditiveValuation {
        &self.base
    }

    /// Item ids, best first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// 0-based rank of item `j`.
    pub fn rank(&self, j: usize) -> usize {
        self.rank[j]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Values in rank order.
    pub fn ranked_values(&self) -> Vec<Rational> {
        self.order.iter().map(|&j| self.base.item(j).clone()).collect()
    }

    /// Bit `m-1-r` set for each item of rank r in `s`; comparing keys as
    /// integers is comparing the perturbations.
    pub fn perturbation_key(&self, s: ItemSet) -> u64 {
        let m = self.len();
        s.iter().fold(0u64, |k, j| k | 1u64 << (m - 1 - self.rank[j]))
    }

    pub fn compare(&self, s: ItemSet, t: ItemSet) -> Ordering {
        if s == t {
            return Ordering::Equal;
        }
        self.base
            .value(s)
            .cmp(&self.base.value(t))
            .then_with(|| self.perturbation_key(s).cmp(&self.perturbation_key(t)))
    }
}

pub fn compare_bundles(v: &OrderedValuation, s: ItemSet, t: ItemSet) -> Ordering {
    v.compare(s, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Goods,
    Chores,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Goods => "goods",
            Kind::Chores => "chores",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub name: Option<String>,
    pub valuation: AdditiveValuation,
    pub entitlement: Rational,
}

impl Agent {
    pub fn new(valuation: AdditiveValuation, entitlement: Rational) -> Self {
        Agent { name: None, valuation, entitlement }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub kind: Kind,
    pub items: usize,
    pub agents: Vec<Agent>,
}

impl Instance {
    pub fn new(kind: Kind, items: usize, agents: Vec<Agent>) -> Result<Self> {
        let inst = Instance { kind, items, agents };
        inst.validate()?;
        Ok(inst)
    }

    /// Everyone shares the valuation; entitlements as given.
    pub fn identical(kind: Kind, valuation: &AdditiveValuation, entitlements: &[Rational]) -> Result<Self> {
        let agents = entitlements.iter().map(|b| Agent::new(valuation.clone(), b.clone())).collect();
        Instance::new(kind, valuation.len(), agents)
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn entitlements(&self) -> Vec<Rational> {
        self.agents.iter().map(|a| a.entitlement.clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents.is_empty() {
            return Err(Error::Invalid("no agents".into()));
        }
        if self.items > MAX_ITEMS {
            return Err(Error::Invalid(format!("{} items, at most {MAX_ITEMS} supported", self.items)));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if a.valuation.len() != self.items {
                return Err(Error::Invalid(format!(
                    "agent {i} has {} values for {} items",
                    a.valuation.len(),
                    self.items
                )));
            }
            if !a.entitlement.is_positive() || a.entitlement > Rational::one() {
                return Err(Error::Invalid(format!("agent {i} entitlement {} outside (0, 1]", a.entitlement)));
            }
        }
        let total = rational::sum(self.agents.iter().map(|a| &a.entitlement));
        if !total.is_one() {
            return Err(Error::Invalid(format!("entitlement sum {total} ≠ 1")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let agents: Vec<Value> = self
            .agents
            .iter()
            .map(|a| {
                let mut o = Map::new();
                if let Some(name) = &a.name {
                    o.insert("name".into(), json!(name));
                }
                o.insert("b".into(), rational::to_json(&a.entitlement));
                o.insert("v".into(), a.valuation.to_json());
                Value::Object(o)
            })
            .collect();
        json!({"kind": self.kind.as_str(), "items": self.items, "agents": agents})
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
    instance_from_json(&doc)
}

pub fn instance_from_json(doc: &Value) -> Result<Instance> {
    let obj = doc.as_object().ok_or_else(|| Error::Parse("instance must be a JSON object".into()))?;
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some("goods") => Kind::Goods,
        Some("chores") => Kind::Chores,
        Some(other) => return Err(Error::Parse(format!("unknown kind {other:?}"))),
        None => return Err(Error::Parse("missing \"kind\"".into())),
    };
    let items = obj
        .get("items")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("\"items\" must be a non-negative integer".into()))?;
    if items as usize > MAX_ITEMS || items > MAX_ITEMS as u64 {
        return Err(Error::Invalid(format!("{items} items, at most {MAX_ITEMS} supported")));
    }
    let items = items as usize;
    let list = obj
        .get("agents")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("\"agents\" must be an array".into()))?;
    let mut agents = Vec::with_capacity(list.len());
    for (i, a) in list.iter().enumerate() {
        let a = a.as_object().ok_or_else(|| Error::Parse(format!("agent {i} must be an object")))?;
        let name = match a.get("name") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::Parse(format!("agent {i} name must be a string"))),
        };
        let b = rational::from_json(a.get("b").ok_or_else(|| Error::Parse(format!("agent {i} lacks \"b\"")))?)?;
        let vs = a
            .get("v")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("agent {i} lacks a \"v\" array")))?;
        let values = vs.iter().map(rational::from_json).collect::<Result<Vec<_>>>()?;
        agents.push(Agent { name, valuation: AdditiveValuation::new(values)?, entitlement: b });
    }
    Instance::new(kind, items, agents)
}

/// Bundles indexed by agent; disjoint and covering all items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    pub bundles: Vec<ItemSet>,
}

impl Allocation {
    pub fn from_owners(n: usize, owner: &[usize]) -> Self {
        let mut bundles = vec![ItemSet::EMPTY; n];
        for (j, &i) in owner.iter().enumerate() {
            bundles[i] = bundles[i].with(j);
        }
        Allocation { bundles }
    }

    pub fn check(&self, m: usize) -> Result<()> {
        let mut seen = ItemSet::EMPTY;
        for (i, &s) in self.bundles.iter().enumerate() {
            if s.intersects(seen) {
                return Err(Error::Invalid(format!("bundle of agent {i} overlaps another bundle")));
            }
            seen = seen.union(s);
        }
        if seen != ItemSet::full(m) {
            return Err(Error::Invalid(format!("items {:?} unallocated", ItemSet::full(m).minus(seen))));
        }
        Ok(())
    }

    /// v_i(A_i) for every agent.
    pub fn values(&self, inst: &Instance) -> Vec<Rational> {
        self.bundles.iter().zip(&inst.agents).map(|(&s, a)| a.valuation.value(s)).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.bundles.iter().map(|s| s.to_json()).collect())
    }
}
