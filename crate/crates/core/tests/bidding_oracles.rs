//! Cross-checks between the exact solver, the exhaustive adversary and
//! the integer grid game.

use fairshare::bidding::{
    exhaustive_adversary, exhaustive_adversary_value, grid_value, solve_two_player, Optimal, Safe,
};
use fairshare::rational::{int, rat};
use fairshare::shares::{mms, tps, unit_upper_bound};
use fairshare::{order_items, AdditiveValuation, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_valuation(rng: &mut ChaCha8Rng, m: usize) -> AdditiveValuation {
    let values = (0..m).map(|_| rat(rng.gen_range(0..=30), rng.gen_range(1..=6))).collect();
    AdditiveValuation::new(values).unwrap()
}

#[test]
fn optimal_attains_the_solver_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bs = [rat(1, 3), rat(2, 5), rat(1, 2), rat(51, 100), rat(3, 5), rat(7, 10), rat(9, 10)];
    for case in 0..60 {
        let m = 1 + case % 7;
        let v = random_valuation(&mut rng, m);
        let b = &bs[case % bs.len()];
        let opt = Optimal::new(&v, b).unwrap();
        let worst = exhaustive_adversary_value(&v, b, &opt).unwrap();
        assert_eq!(worst, opt.guarantee(), "v = {:?}, b = {b}", v.values());
    }
}

#[test]
fn optimal_at_half_is_mms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..30 {
        let m = 1 + case % 8;
        let v = random_valuation(&mut rng, m);
        let opt = Optimal::new(&v, &rat(1, 2)).unwrap();
        let worst = exhaustive_adversary_value(&v, &rat(1, 2), &opt).unwrap();
        assert_eq!(worst, mms(&v, 2).unwrap().value, "v = {:?}", v.values());
    }
}

#[test]
fn grid_strategies_never_beat_the_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..40 {
        let m = 1 + case % 5;
        let ints: Vec<i64> = (0..m).map(|_| rng.gen_range(0..10)).collect();
        let mut sorted = ints.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let v = AdditiveValuation::from_ints(&ints);
        let sol = solve_two_player(&order_items(&v)).unwrap();
        let n = 24;
        for own in 1..n {
            let g = grid_value(&sorted, own, n - own);
            let exact = sol.value(0, &rat(own as i64, n as i64));
            assert!(int(g) <= exact, "grid {g} beats solver {exact} at {own}/{n} on {sorted:?}");
        }
    }
}

#[test]
fn safe_reaches_half_tps_hat() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bs = [rat(3, 10), rat(1, 3), rat(2, 5), rat(1, 2), rat(3, 5), rat(7, 10), rat(1, 4)];
    let mut failures = Vec::new();
    for b in &bs {
        for case in 0..200 {
            let m = 1 + case % 5;
            let v = random_valuation(&mut rng, m);
            let safe = Safe::new(&v, b).unwrap();
            let report = exhaustive_adversary(&v, b, &safe, 20).unwrap();
            let target: Rational = tps(&v, &unit_upper_bound(b)) / int(2);
            if report.value < target {
                failures.push(format!("b={b} v={:?} got {} < {target} line {:?}", v.values(), report.value, report.takes));
            }
        }
    }
    assert!(failures.is_empty(), "{} failures:\n{}", failures.len(), failures[..failures.len().min(10)].join("\n"));
}
