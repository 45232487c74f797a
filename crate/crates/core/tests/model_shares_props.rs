use std::cmp::Ordering;

use fairshare::bidding::{run_game, strategy_by_name, Strategy as BidStrategy, TieBreak};
use fairshare::personalized::{personalized_mms, verify_personalized_feasibility, PersonalizedContext};
use fairshare::rational::{int, rat};
use fairshare::shares::{mms, mms_bar, mms_chores, mms_hat, ps_hat, tps, tps_hat};
use fairshare::{
    compare_bundles, order_items, parse_instance, AdditiveValuation, Agent, Instance, ItemSet, Kind, Rational,
};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn normalize(weights: &[i64]) -> Vec<Rational> {
    let total: i64 = weights.iter().sum();
    weights.iter().map(|&w| rat(w, total)).collect()
}

fn build(kind: Kind, values: &[Vec<i64>], weights: &[i64]) -> Instance {
    let agents = values
        .iter()
        .zip(normalize(weights))
        .map(|(v, b)| Agent::new(AdditiveValuation::from_ints(v), b))
        .collect();
    Instance::new(kind, values[0].len(), agents).unwrap()
}

fn instances(max_n: usize, max_m: usize) -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>)> {
    (1..=max_n, 0..=max_m).prop_flat_map(|(n, m)| {
        (prop::collection::vec(prop::collection::vec(0i64..12, m), n), prop::collection::vec(1i64..20, n))
    })
}

fn sum_min(v: &AdditiveValuation, z: &Rational) -> Rational {
    v.values().iter().map(|x| if x < z { x.clone() } else { z.clone() }).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn instance_json_round_trip((values, weights) in instances(4, 6), chores in any::<bool>()) {
        let kind = if chores { Kind::Chores } else { Kind::Goods };
        let inst = build(kind, &values, &weights);
        let text = inst.to_json().to_string();
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(back.to_json(), inst.to_json());
        prop_assert_eq!(back.entitlements(), inst.entitlements());
    }

    #[test]
    fn bundle_order_refines_value(values in prop::collection::vec(0i64..4, 1..=4)) {
        let v = AdditiveValuation::from_ints(&values);
        let ord = order_items(&v);
        let sets: Vec<ItemSet> = (0..1u64 << values.len()).map(ItemSet).collect();
        for &s in &sets {
            prop_assert_eq!(compare_bundles(&ord, s, s), Ordering::Equal);
            for &t in &sets {
                let st = compare_bundles(&ord, s, t);
                prop_assert_eq!(st, compare_bundles(&ord, t, s).reverse());
                if s != t {
                    prop_assert_ne!(st, Ordering::Equal);
                }
                match v.value(s).cmp(&v.value(t)) {
                    Ordering::Equal => {}
                    strict => prop_assert_eq!(st, strict),
                }
                for &u in &sets {
                    if st == Ordering::Less && compare_bundles(&ord, t, u) == Ordering::Less {
                        prop_assert_eq!(compare_bundles(&ord, s, u), Ordering::Less);
                    }
                }
            }
        }
    }

    #[test]
    fn shares_monotone_in_entitlement(values in prop::collection::vec(0i64..10, 0..=6), a in 1i64..30, c in 1i64..30) {
        let v = AdditiveValuation::from_ints(&values);
        let (lo, hi) = if a <= c { (rat(a, 30), rat(c, 30)) } else { (rat(c, 30), rat(a, 30)) };
        prop_assert!(mms_hat(&v, &lo).unwrap() <= mms_hat(&v, &hi).unwrap());
        prop_assert!(ps_hat(&v, &lo) <= ps_hat(&v, &hi));
        prop_assert!(tps(&v, &lo) <= tps(&v, &hi));
        prop_assert!(tps_hat(&v, &lo) <= tps_hat(&v, &hi));
        // A larger responsibility never lowers the chore share either.
        prop_assert!(mms_bar(&v, &lo).unwrap() <= mms_bar(&v, &hi).unwrap());
    }

    #[test]
    fn tps_is_the_largest_fixed_point(values in prop::collection::vec(0i64..10, 0..=7), w in 1i64..40) {
        let v = AdditiveValuation::from_ints(&values);
        let b = rat(w, 40);
        let z = tps(&v, &b);
        prop_assert_eq!(&b * sum_min(&v, &z), z.clone());
        // Past z the map b * sum min(v_j, .) grows slower than the identity.
        for d in [rat(1, 1000), rat(1, 3), int(1), int(50)] {
            let z2 = &z + d;
            prop_assert!(&b * sum_min(&v, &z2) < z2);
        }
    }

    #[test]
    fn mms_scales_linearly(values in prop::collection::vec(0i64..10, 0..=6), k in 1usize..=3, num in 1i64..9, den in 1i64..5) {
        let v = AdditiveValuation::from_ints(&values);
        let f = rat(num, den);
        let scaled = v.scaled(&f);
        prop_assert_eq!(mms(&scaled, k).unwrap().value, mms(&v, k).unwrap().value * &f);
        prop_assert_eq!(mms_chores(&scaled, k).unwrap().value, mms_chores(&v, k).unwrap().value * &f);
    }

    #[test]
    fn personalized_witness_goods((values, weights) in instances(4, 6), anchor in 0usize..4) {
        let inst = build(Kind::Goods, &values, &weights);
        let a = &inst.agents[anchor % inst.n()];
        let ctx = PersonalizedContext::new(Kind::Goods, &a.valuation, &a.entitlement).unwrap();
        prop_assert_eq!(personalized_mms(&ctx, &a.valuation, &a.entitlement).unwrap(), mms_hat(&a.valuation, &a.entitlement).unwrap());
        // Each count is below b_j (k+1), so together they fit in k bundles.
        let alloc = verify_personalized_feasibility(&ctx, &inst).unwrap();
        alloc.check(inst.items).unwrap();
        for (i, ag) in inst.agents.iter().enumerate() {
            prop_assert!(ag.valuation.value(alloc.bundles[i]) >= personalized_mms(&ctx, &ag.valuation, &ag.entitlement).unwrap());
        }
    }

    #[test]
    fn personalized_witness_chores((values, weights) in instances(4, 6), anchor in 0usize..4) {
        let inst = build(Kind::Chores, &values, &weights);
        prop_assume!(inst.n() > 1);
        let a = &inst.agents[anchor % inst.n()];
        let ctx = PersonalizedContext::new(Kind::Chores, &a.valuation, &a.entitlement).unwrap();
        prop_assert_eq!(personalized_mms(&ctx, &a.valuation, &a.entitlement).unwrap(), mms_bar(&a.valuation, &a.entitlement).unwrap());
        let alloc = verify_personalized_feasibility(&ctx, &inst).unwrap();
        alloc.check(inst.items).unwrap();
        for (i, ag) in inst.agents.iter().enumerate() {
            prop_assert!(ag.valuation.value(alloc.bundles[i]) <= personalized_mms(&ctx, &ag.valuation, &ag.entitlement).unwrap());
        }
    }

    #[test]
    fn game_conserves_items_and_budgets(
        (values, weights) in instances(3, 5),
        picks in prop::collection::vec(0usize..6, 3),
        seed in any::<u64>(),
    ) {
        let inst = build(Kind::Goods, &values, &weights);
        let names = ["safe", "bid-your-value", "all-in", "zero", "approx", "k2-table"];
        let boxed: Vec<Box<dyn BidStrategy>> = inst
            .agents
            .iter()
            .zip(&picks)
            .map(|(a, &p)| {
                // The table strategy only accepts 1/3 < b <= 1/2.
                strategy_by_name(names[p], &a.valuation, &a.entitlement)
                    .or_else(|_| strategy_by_name("safe", &a.valuation, &a.entitlement))
                    .unwrap()
            })
            .collect();
        let refs: Vec<&dyn BidStrategy> = boxed.iter().map(|b| b.as_ref()).collect();
        let out = run_game(&inst, &refs, TieBreak::RandomOrder(seed)).unwrap();
        out.allocation.check(inst.items).unwrap();
        prop_assert_eq!(out.history.len(), inst.items);
        let mut paid = vec![Rational::zero(); inst.n()];
        for r in &out.history {
            prop_assert!(out.allocation.bundles[r.winner].contains(r.item));
            prop_assert!(r.bids.iter().all(|x| *x <= r.payment));
            paid[r.winner] += &r.payment;
        }
        for i in 0..inst.n() {
            prop_assert!(!out.budgets[i].is_negative());
            prop_assert_eq!(&paid[i] + &out.budgets[i], inst.agents[i].entitlement.clone());
        }
        let spent: Rational = paid.iter().sum();
        prop_assert!(spent <= Rational::one());
    }
}
