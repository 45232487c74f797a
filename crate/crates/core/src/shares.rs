//! Equal-entitlement shares, their rounded versions, and the Sylvester tables.

use std::fmt;
use std::ops::{AddAssign, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{AdditiveValuation, ItemSet, Kind};
use crate::rational::{self, Rational};

/// k^m above this refuses to run.
pub const DEFAULT_MMS_CAP: u64 = 10_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShareKind {
    Ps,
    Mms,
    Tps,
    Mes,
    Rrr,
    MmsHat,
    PsHat,
    TpsHat,
    MmsBar,
    PsBar,
    Personalized,
}

impl ShareKind {
    pub const ALL: [ShareKind; 11] = [
        ShareKind::Ps,
        ShareKind::Mms,
        ShareKind::Tps,
        ShareKind::Mes,
        ShareKind::Rrr,
        ShareKind::MmsHat,
        ShareKind::PsHat,
        ShareKind::TpsHat,
        ShareKind::MmsBar,
        ShareKind::PsBar,
        ShareKind::Personalized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShareKind::Ps => "ps",
            ShareKind::Mms => "mms",
            ShareKind::Tps => "tps",
            ShareKind::Mes => "mes",
            ShareKind::Rrr => "rrr",
            ShareKind::MmsHat => "mms-hat",
            ShareKind::PsHat => "ps-hat",
            ShareKind::TpsHat => "tps-hat",
            ShareKind::MmsBar => "mms-bar",
            ShareKind::PsBar => "ps-bar",
            ShareKind::Personalized => "personalized",
        }
    }
}

impl fmt::Display for ShareKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShareKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ShareKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown share {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareValue {
    pub value: Rational,
    pub kind: ShareKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmsResult {
    pub value: Rational,
    /// Exactly k bundles, some possibly empty.
    pub partition: Vec<ItemSet>,
}

pub fn proportional_share(v: &AdditiveValuation, b: &Rational) -> Rational {
    v.total() * b
}

/// Maximin share over k bundles (goods).
pub fn mms(v: &AdditiveValuation, k: usize) -> Result<MmsResult> {
    mms_with_cap(v, k, Kind::Goods, DEFAULT_MMS_CAP)
}

/// Minimax share over k bundles (chores).
pub fn mms_chores(c: &AdditiveValuation, k: usize) -> Result<MmsResult> {
    mms_with_cap(c, k, Kind::Chores, DEFAULT_MMS_CAP)
}

pub fn mms_with_cap(v: &AdditiveValuation, k: usize, kind: Kind, cap: u64) -> Result<MmsResult> {
    if k == 0 {
        return Err(Error::Precondition("mms needs at least one bundle".into()));
    }
    let m = v.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| v.item(b).cmp(v.item(a)).then(a.cmp(&b)));

    // Trivial shapes first, so the cap only guards real searches.
    if k == 1 || m == 0 || k >= m {
        let mut partition = vec![ItemSet::EMPTY; k];
        if k == 1 {
            partition[0] = ItemSet::full(m);
        } else {
            for (slot, &j) in order.iter().enumerate() {
                partition[slot] = ItemSet::single(j);
            }
        }
        let value = objective(v, &partition, kind);
        return Ok(MmsResult { value, partition });
    }
    let needed = (k as u128).checked_pow(m as u32);
    if needed.map_or(true, |x| x > cap as u128) {
        return Err(Error::Cap {
            what: "mms enumeration",
            needed: needed.map_or_else(|| format!("{k}^{m}"), |x| x.to_string()),
            cap,
        });
    }

    // Scale to a common denominator and search over integers.
    let lcm = order.iter().fold(BigInt::one(), |acc, &j| acc.lcm(v.item(j).denom()));
    let ints: Vec<BigInt> = order.iter().map(|&j| (v.item(j) * &lcm).to_integer()).collect();
    let total: BigInt = ints.iter().sum();
    let owners = match total.to_i64() {
        Some(_) => {
            let small: Vec<i128> = ints.iter().map(|x| x.to_i128().unwrap()).collect();
            search(&small, k, kind)
        }
        None => search(&ints, k, kind),
    };
    let mut partition = vec![ItemSet::EMPTY; k];
    for (pos, &bundle) in owners.iter().enumerate() {
        partition[bundle] = partition[bundle].with(order[pos]);
    }
    let value = objective(v, &partition, kind);
    Ok(MmsResult { value, partition })
}

fn objective(v: &AdditiveValuation, partition: &[ItemSet], kind: Kind) -> Rational {
    let values = partition.iter().map(|&s| v.value(s));
    match kind {
        Kind::Goods => values.min().unwrap(),
        Kind::Chores => values.max().unwrap(),
    }
}

trait Amount: Clone + Ord + Zero + One + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}
impl<T: Clone + Ord + Zero + One + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>> Amount for T {}

struct Search<'a, T> {
    items: &'a [T],
    kind: Kind,
    total: T,
    loads: Vec<T>,
    owner: Vec<usize>,
    best: T,
    best_owner: Vec<usize>,
    done: bool,
}

/// Branch and bound over item -> bundle assignments, items sorted
/// descending. Bundles with equal loads are interchangeable, so only the
/// first of each load is tried. Returns the bundle of each item.
fn search<T: Amount>(items: &[T], k: usize, kind: Kind) -> Vec<usize> {
    let mut total = T::zero();
    for x in items {
        total += x;
    }
    // Greedy start: each item to the lightest bundle.
    let mut loads = vec![T::zero(); k];
    let mut owner = vec![0; items.len()];
    for (pos, x) in items.iter().enumerate() {
        let b = (0..k).min_by(|&a, &b| loads[a].cmp(&loads[b])).unwrap();
        loads[b] += x;
        owner[pos] = b;
    }
    let best = score(&loads, kind);
    let mut s = Search {
        items,
        kind,
        total: total.clone(),
        loads: vec![T::zero(); k],
        owner: vec![0; items.len()],
        best,
        best_owner: owner,
        done: false,
    };
    s.done = s.unbeatable();
    let mut remaining = total;
    s.dfs(0, &mut remaining);
    s.best_owner
}

fn score<T: Amount>(loads: &[T], kind: Kind) -> T {
    match kind {
        Kind::Goods => loads.iter().min().unwrap().clone(),
        Kind::Chores => loads.iter().max().unwrap().clone(),
    }
}

impl<T: Amount> Search<'_, T> {
    /// Integer loads: the best min is at most floor(total/k) and the best
    /// max at least ceil(total/k).
    fn unbeatable(&self) -> bool {
        let k = self.loads.len();
        let mut step = self.best.clone();
        match self.kind {
            Kind::Goods => step += &T::one(),
            Kind::Chores => step -= &T::one(),
        }
        let mut kx = T::zero();
        for _ in 0..k {
            kx += &step;
        }
        match self.kind {
            Kind::Goods => kx > self.total,
            Kind::Chores => kx < self.total,
        }
    }

    fn dfs(&mut self, pos: usize, remaining: &mut T) {
        if self.done {
            return;
        }
        if pos == self.items.len() {
            let s = score(&self.loads, self.kind);
            let better = match self.kind {
                Kind::Goods => s > self.best,
                Kind::Chores => s < self.best,
            };
            if better {
                self.best = s;
                self.best_owner = self.owner.clone();
                self.done = self.unbeatable();
            }
            return;
        }
        let x = self.items[pos].clone();
        if self.kind == Kind::Goods {
            // The lightest bundle ends below its load plus everything left.
            let mut cap = self.loads.iter().min().unwrap().clone();
            cap += remaining;
            if cap <= self.best {
                return;
            }
        }
        *remaining -= &x;
        let k = self.loads.len();
        let mut slots: Vec<usize> = (0..k).collect();
        slots.sort_by(|&a, &b| self.loads[a].cmp(&self.loads[b]).then(a.cmp(&b)));
        let mut tried: Vec<T> = Vec::with_capacity(k);
        for b in slots {
            if tried.contains(&self.loads[b]) {
                continue;
            }
            tried.push(self.loads[b].clone());
            self.loads[b] += &x;
            if self.kind == Kind::Goods || self.loads[b] < self.best {
                self.owner[pos] = b;
                self.dfs(pos + 1, remaining);
            }
            self.loads[b] -= &x;
            if self.done {
                break;
            }
        }
        *remaining += &x;
    }
}

/// Largest z with b * sum_j min(v_j, z) = z.
pub fn tps(v: &AdditiveValuation, b: &Rational) -> Rational {
    assert!(b.is_positive() && *b <= Rational::one(), "entitlement outside (0, 1]");
    let sorted = v.sorted_desc();
    let m = sorted.len();
    let mut suffix = vec![Rational::zero(); m + 1];
    for p in (0..m).rev() {
        suffix[p] = &suffix[p + 1] + &sorted[p];
    }
    let mut best = Rational::zero();
    // p = number of items truncated to z.
    for p in 0..=m {
        let pb = b * Rational::from_integer(BigInt::from(p));
        let slack = Rational::one() - &pb;
        let candidate = if slack.is_positive() {
            b * &suffix[p] / slack
        } else if slack.is_zero() && suffix[p].is_zero() && p > 0 {
            // z(1 - pb) = 0 holds for every z; the truncation set caps it.
            sorted[p - 1].clone()
        } else {
            continue;
        };
        let fits_top = p == 0 || sorted[p - 1] >= candidate;
        let fits_rest = p == m || sorted[p] <= candidate;
        if fits_top && fits_rest && candidate > best {
            best = candidate;
        }
    }
    best
}

/// b-hat = 1/floor(1/b).
pub fn unit_upper_bound(b: &Rational) -> Rational {
    Rational::new(BigInt::one(), unit_upper_k(b))
}

/// The k with 1/(k+1) < b <= 1/k.
pub fn unit_upper_k(b: &Rational) -> BigInt {
    assert!(b.is_positive() && *b <= Rational::one(), "entitlement outside (0, 1]");
    rational::floor(&b.recip())
}

/// b-check = 1/(k+1) with 1/(k+1) <= b < 1/k. At b = 1 this returns 1
/// (k = 0), which keeps single-agent chores instances meaningful.
pub fn unit_lower_bound(b: &Rational) -> Rational {
    Rational::new(BigInt::one(), unit_lower_k(b) + 1)
}

/// The k with 1/(k+1) <= b < 1/k.
pub fn unit_lower_k(b: &Rational) -> BigInt {
    assert!(b.is_positive() && *b <= Rational::one(), "responsibility outside (0, 1]");
    rational::ceil(&b.recip()) - 1
}

fn bundles_for(unit: &Rational) -> usize {
    debug_assert!(unit.numer().is_one());
    rational::to_usize(unit.denom())
}

pub fn mms_hat(v: &AdditiveValuation, b: &Rational) -> Result<Rational> {
    Ok(mms(v, bundles_for(&unit_upper_bound(b)))?.value)
}

pub fn ps_hat(v: &AdditiveValuation, b: &Rational) -> Rational {
    proportional_share(v, &unit_upper_bound(b))
}

pub fn tps_hat(v: &AdditiveValuation, b: &Rational) -> Rational {
    tps(v, &unit_upper_bound(b))
}

pub fn mms_bar(c: &AdditiveValuation, b: &Rational) -> Result<Rational> {
    Ok(mms_chores(c, bundles_for(&unit_lower_bound(b)))?.value)
}

pub fn ps_bar(c: &AdditiveValuation, b: &Rational) -> Rational {
    proportional_share(c, &unit_lower_bound(b))
}

/// Costs sorted descending, summed at 1-based positions 1, 1+k, 1+2k, ...
/// with 1/(k+1) <= b < 1/k (k taken as 1 when b = 1).
pub fn rrr_share(c: &AdditiveValuation, b: &Rational) -> Rational {
    let k = rational::to_usize(&unit_lower_k(b)).max(1);
    c.sorted_desc().iter().step_by(k).fold(Rational::zero(), |acc, x| acc + x)
}

/// Evaluates the named share for one agent. Personalized shares need an
/// anchor and live in their own module.
pub fn share(kind: ShareKind, v: &AdditiveValuation, b: &Rational) -> Result<ShareValue> {
    let value = match kind {
        ShareKind::Ps | ShareKind::Mes => proportional_share(v, b),
        ShareKind::Mms | ShareKind::Tps => {
            if !is_unit_fraction(b) {
                return Err(Error::Precondition(format!(
                    "{kind} needs an entitlement of the form 1/k, got {b}; use the rounded share"
                )));
            }
            if kind == ShareKind::Mms {
                mms(v, bundles_for(b))?.value
            } else {
                tps(v, b)
            }
        }
        ShareKind::Rrr => rrr_share(v, b),
        ShareKind::MmsHat => mms_hat(v, b)?,
        ShareKind::PsHat => ps_hat(v, b),
        ShareKind::TpsHat => tps_hat(v, b),
        ShareKind::MmsBar => mms_bar(v, b)?,
        ShareKind::PsBar => ps_bar(v, b),
        ShareKind::Personalized => {
            return Err(Error::Precondition("personalized shares need an anchor agent".into()))
        }
    };
    Ok(ShareValue { value, kind })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SylvesterTables {
    /// q_1 = 2, q_k = 1 + q_1 ... q_{k-1}.
    pub q: Vec<BigInt>,
    /// a_i = q_i - 1, one entry further than q so the identity can be checked.
    pub a: Vec<BigInt>,
    /// s_n = sum_{i<=n} 1/a_i.
    pub s: Vec<Rational>,
    pub gamma_lower: Rational,
}

pub fn sylvester(n: usize) -> SylvesterTables {
    assert!(n >= 1);
    let mut q = Vec::with_capacity(n + 1);
    let mut product = BigInt::one();
    for _ in 0..=n {
        let next = &product + 1;
        product *= &next;
        q.push(next);
    }
    let a: Vec<BigInt> = q.iter().map(|x| x - 1).collect();
    let mut s = Vec::with_capacity(n);
    let mut acc = Rational::zero();
    for ai in &a[..n] {
        acc += Rational::new(BigInt::one(), ai.clone());
        s.push(acc.clone());
    }
    let recip_sum = q[..n].iter().fold(Rational::zero(), |acc, x| acc + Rational::new(BigInt::one(), x.clone()));
    assert_eq!(recip_sum, Rational::one() - Rational::new(BigInt::one(), a[n].clone()));
    q.truncate(n);
    let gamma_lower = s[n - 1].clone();
    SylvesterTables { q, a, s, gamma_lower }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatSum {
    pub sum: Rational,
    pub bound: Rational,
    pub ok: bool,
}

/// Sum of unit upper bounds against s_n.
pub fn hat_sum_bound(entitlements: &[Rational]) -> HatSum {
    let n = entitlements.len();
    assert!(n >= 1);
    let sum = rational::sum(&entitlements.iter().map(unit_upper_bound).collect::<Vec<_>>());
    let bound = sylvester(n).s[n - 1].clone();
    let ok = sum <= bound;
    HatSum { sum, bound, ok }
}

/// Sylvester-tight entitlements b_i = 1/q_i + 1/(n a_{n+1}).
pub fn sylvester_tight_entitlements(n: usize) -> Vec<Rational> {
    let t = sylvester(n);
    let extra = Rational::new(BigInt::one(), BigInt::from(n) * &t.a[n]);
    t.q.iter().map(|qi| Rational::new(BigInt::one(), qi.clone()) + &extra).collect()
}

fn is_unit_fraction(b: &Rational) -> bool {
    b.numer().is_one() && !b.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(x: &[i64]) -> AdditiveValuation {
        AdditiveValuation::from_ints(x)
    }

    #[test]
    fn ps_examples() {
        assert_eq!(proportional_share(&v(&[1, 1, 1, 1]), &rat(1, 2)), int(2));
        assert_eq!(proportional_share(&v(&[]), &rat(1, 3)), int(0));
        assert_eq!(proportional_share(&v(&[3, 5]), &rat(2, 7)), rat(16, 7));
    }

    #[test]
    fn mms_examples() {
        assert_eq!(mms(&v(&[1; 6]), 2).unwrap().value, int(3));
        assert_eq!(mms(&v(&[1]), 2).unwrap().value, int(0));
        let r = mms(&v(&[4, 3, 3, 2]), 2).unwrap();
        assert_eq!(r.value, int(6));
        assert_eq!(r.partition.len(), 2);
        assert!(r.partition.iter().all(|&s| v(&[4, 3, 3, 2]).value(s) >= int(6)));
        assert_eq!(mms_chores(&v(&[1; 6]), 2).unwrap().value, int(3));
        assert_eq!(mms_chores(&v(&[5, 1, 1]), 2).unwrap().value, int(5));
        assert_eq!(mms_chores(&v(&[4, 3, 3, 2]), 2).unwrap().value, int(6));
    }

    #[test]
    fn mms_cap() {
        let err = mms_with_cap(&v(&[1; 20]), 3, Kind::Goods, 1000).unwrap_err();
        assert!(matches!(err, Error::Cap { .. }));
    }

    #[test]
    fn tps_examples() {
        assert_eq!(tps(&v(&[1, 1, 1]), &rat(1, 3)), int(1));
        assert_eq!(tps(&v(&[1]), &rat(1, 2)), int(0));
        assert_eq!(tps(&v(&[10, 1, 1]), &rat(1, 2)), int(2));
        assert_eq!(tps(&v(&[5, 5]), &rat(1, 2)), int(5));
        assert_eq!(tps(&v(&[3, 1]), &int(1)), int(4));
    }

    #[test]
    fn unit_bounds() {
        assert_eq!(unit_upper_bound(&rat(3, 10)), rat(1, 3));
        assert_eq!(unit_upper_bound(&rat(1, 2)), rat(1, 2));
        assert_eq!(unit_upper_bound(&rat(2, 5)), rat(1, 2));
        assert_eq!(unit_lower_bound(&rat(2, 5)), rat(1, 3));
        // 1/(k+1) <= 1/2 < 1/k holds for k = 1.
        assert_eq!(unit_lower_bound(&rat(1, 2)), rat(1, 2));
        assert_eq!(unit_lower_bound(&rat(5, 6)), rat(1, 2));
        assert_eq!(unit_lower_bound(&rat(1, 6)), rat(1, 6));
        assert_eq!(unit_lower_bound(&int(1)), int(1));
    }

    #[test]
    fn rounded_share_examples() {
        let units = v(&[1, 1, 1, 1]);
        assert_eq!(mms_hat(&units, &rat(2, 7)).unwrap(), int(1));
        assert_eq!(mms_hat(&units, &rat(3, 7)).unwrap(), int(2));
        assert_eq!(mms_bar(&v(&[1; 6]), &rat(5, 6)).unwrap(), int(3));
        assert_eq!(ps_hat(&v(&[1, 1]), &rat(3, 5)), int(2));
        assert_eq!(ps_bar(&v(&[1; 6]), &rat(2, 5)), int(2));
    }

    #[test]
    fn rrr_examples() {
        assert_eq!(rrr_share(&v(&[5, 4, 3, 2, 1]), &rat(1, 3)), int(9));
        assert_eq!(rrr_share(&v(&[1, 1, 1, 1]), &rat(1, 2)), int(4));
        assert_eq!(rrr_share(&v(&[7]), &rat(1, 5)), int(7));
        assert_eq!(rrr_share(&v(&[2, 9]), &int(1)), int(11));
    }

    #[test]
    fn sylvester_tables() {
        let t = sylvester(6);
        let q: Vec<BigInt> = [2u64, 3, 7, 43, 1807, 3263443].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(t.q, q);
        assert_eq!(sylvester(4).s, vec![int(1), rat(3, 2), rat(5, 3), rat(71, 42)]);
        let one = sylvester(1);
        assert_eq!(one.a[1], BigInt::from(2));
        assert_eq!(Rational::new(BigInt::one(), one.q[0].clone()), rat(1, 2));
    }

    #[test]
    fn hat_sums() {
        let h = hat_sum_bound(&[rat(1, 2), rat(1, 2)]);
        assert_eq!((h.sum, h.bound, h.ok), (int(1), rat(3, 2), true));
        let h = hat_sum_bound(&[rat(51, 100), rat(49, 100)]);
        assert_eq!((h.sum, h.ok), (rat(3, 2), true));
        let tight = sylvester_tight_entitlements(3);
        assert_eq!(rational::sum(&tight), int(1));
        let h = hat_sum_bound(&tight);
        assert_eq!(h.sum, rat(5, 3));
        assert_eq!(h.sum, h.bound);
    }

    #[test]
    fn share_dispatch() {
        let x = v(&[4, 3, 3, 2]);
        assert_eq!(share(ShareKind::Mms, &x, &rat(1, 2)).unwrap().value, int(6));
        assert!(share(ShareKind::Mms, &x, &rat(2, 5)).is_err());
        assert_eq!(share(ShareKind::TpsHat, &x, &rat(2, 5)).unwrap().value, int(6));
        assert_eq!("mms-bar".parse::<ShareKind>().unwrap(), ShareKind::MmsBar);
        assert!(is_unit_fraction(&rat(1, 7)));
    }
}
