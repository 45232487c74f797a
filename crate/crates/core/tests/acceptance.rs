//! One line per acceptance criterion. Runs as a plain binary so the lines
//! always show; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use fairshare::bidding::{exhaustive_adversary_value, solve_two_player, Approx, Optimal, Safe};
use fairshare::chores::{assign_bobw, assign_rrr};
use fairshare::goods_exante::{exante_grand_bundle_lottery, verify_exante_tightness, DEFAULT_SYLVESTER_TERMS};
use fairshare::oracles::{brute_mms, fixture_with, sylvester_oracle};
use fairshare::rational::{int, rat};
use fairshare::shares::{rrr_share, sylvester, sylvester_tight_entitlements, tps, unit_lower_k, unit_upper_bound};
use fairshare::{order_items, AdditiveValuation, Agent, Instance, Kind, Rational};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn random_valuation(rng: &mut ChaCha8Rng, m: usize) -> AdditiveValuation {
    AdditiveValuation::new((0..m).map(|_| rat(rng.gen_range(0..=30), rng.gen_range(1..=6))).collect()).unwrap()
}

fn random_entitlements(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=20)).collect();
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| rat(x, total)).collect()
}

fn random_chores(rng: &mut ChaCha8Rng, max_m: usize) -> Instance {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(0..=max_m);
    let agents = random_entitlements(rng, n)
        .into_iter()
        .map(|b| Agent::new(AdditiveValuation::from_ints(&(0..m).map(|_| rng.gen_range(0..10)).collect::<Vec<_>>()), b))
        .collect();
    Instance::new(Kind::Chores, m, agents).unwrap()
}

fn mms_bar_brute(c: &AdditiveValuation, b: &Rational) -> Rational {
    let k = fairshare::rational::to_usize(&unit_lower_k(b)) + 1;
    brute_mms(c, k, Kind::Chores)
}

fn fail_if(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Err(msg)
    } else {
        Ok(())
    }
}

fn thresholds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..50 {
        let m = 2 + case % 5;
        let v = AdditiveValuation::from_ints(&(0..m).map(|_| rng.gen_range(0..50)).collect::<Vec<_>>());
        let t = solve_two_player(&order_items(&v)).map_err(|e| e.to_string())?.threshold_vector().t;
        let n = t.len();
        let mi = m as i64;
        let ok = t[0].is_zero()
            && t.windows(2).all(|w| w[0] < w[1])
            && (1..n).all(|j| &t[j] + &t[n - j] == int(1))
            && t[1] == rat(1, mi + 1)
            && t[n - 1] == rat(mi, mi + 1)
            && t[n / 2] == rat(1, 2);
        fail_if(!ok, format!("threshold vector off for {:?}", v.values()))?;
    }
    Ok("50 valuations, m in 2..=6".into())
}

fn mms_at_half() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for case in 0..30 {
        let v = random_valuation(&mut rng, 1 + case % 8);
        let opt = Optimal::new(&v, &rat(1, 2)).map_err(|e| e.to_string())?;
        let got = exhaustive_adversary_value(&v, &rat(1, 2), &opt).map_err(|e| e.to_string())?;
        let mms = brute_mms(&v, 2, Kind::Goods);
        fail_if(got != mms, format!("b=1/2 v={:?}: {got} vs mms {mms}", v.values()))?;
    }
    for b in [rat(51, 100), rat(3, 5), rat(9, 10)] {
        for case in 0..20 {
            let v = random_valuation(&mut rng, 1 + case % 8);
            let opt = Optimal::new(&v, &b).map_err(|e| e.to_string())?;
            let got = exhaustive_adversary_value(&v, &b, &opt).map_err(|e| e.to_string())?;
            fail_if(got < v.total() / int(2), format!("b={b} v={:?}: {got} below half", v.values()))?;
        }
    }
    Ok("30 at b=1/2 equal brute-force MMS; 60 above 1/2 reach v(M)/2".into())
}

fn safe_grid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut runs = 0;
    for b in [rat(3, 10), rat(1, 3), rat(2, 5), rat(1, 2), rat(3, 5), rat(7, 10)] {
        for case in 0..200 {
            let v = random_valuation(&mut rng, 1 + case % 5);
            let safe = Safe::new(&v, &b).map_err(|e| e.to_string())?;
            let got = exhaustive_adversary_value(&v, &b, &safe).map_err(|e| e.to_string())?;
            let target = tps(&v, &unit_upper_bound(&b)) / int(2);
            fail_if(got < target, format!("b={b} v={:?}: {got} < {target}", v.values()))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} instances, zero failures"))
}

fn verify_fixture(name: &str, param: Option<usize>) -> Result<(), String> {
    let v = fixture_with(name, param).and_then(|f| f.verify()).map_err(|e| e.to_string())?;
    fail_if(!v.holds, format!("{name} {param:?}: {}", v.certificate))
}

fn goods_tightness() -> Outcome {
    verify_fixture("goods-half-mms-hat-tight", Some(3))?;
    verify_fixture("goods-half-mms-hat-tight", Some(4))?;
    Ok("(1/2 + 1/10) MMS-hat refuted for n = 3, 4".into())
}

fn chores_feasibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..1000 {
        let inst = random_chores(&mut rng, 8);
        let costs = assign_rrr(&inst).map_err(|e| e.to_string())?.values(&inst);
        for (a, cost) in inst.agents.iter().zip(&costs) {
            let r = rrr_share(&a.valuation, &a.entitlement);
            fail_if(*cost > r, format!("cost {cost} above RRR {r}"))?;
            let bar = mms_bar_brute(&a.valuation, &a.entitlement);
            fail_if(r > &bar * int(2), format!("RRR {r} above 2 * {bar}"))?;
        }
    }
    Ok("1000 instances".into())
}

fn chores_lower_bounds() -> Outcome {
    verify_fixture("chores-2domination-lb", Some(3))?;
    verify_fixture("chores-three-halves-lb", Some(4))?;
    verify_fixture("chores-bobw-2-lb", None)?;
    Ok("t = 3, n = 4 and item-3 fixtures".into())
}

fn bobw_chores() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..300 {
        let inst = random_chores(&mut rng, 7);
        let lot = assign_bobw(&inst).map_err(|e| e.to_string())?;
        fail_if(lot.total_weight() != int(1), "weights do not sum to 1".into())?;
        if inst.items > 0 {
            fail_if(lot.outcomes.len() > lot.initial_edges, "decomposition longer than the edge count".into())?;
        }
        for (i, row) in lot.coupon_marginals(inst.n()).iter().enumerate() {
            fail_if(row.iter().any(|p| *p != inst.agents[i].entitlement), format!("marginal of agent {i} off"))?;
        }
        for (a, e) in inst.agents.iter().zip(lot.expected_values(&inst)) {
            fail_if(e > a.valuation.total() * &a.entitlement, "expected cost above PS".into())?;
        }
        for o in &lot.outcomes {
            for (a, c) in inst.agents.iter().zip(o.allocation.values(&inst)) {
                fail_if(c > rrr_share(&a.valuation, &a.entitlement), "outcome above RRR".into())?;
            }
        }
    }
    Ok("300 instances".into())
}

fn sylvester_checks() -> Outcome {
    for n in 1..=4 {
        let r = sylvester_oracle(n, 50);
        fail_if(!r.holds, format!("k-vector oracle fails at n = {n}: {:?}", r.worst))?;
    }
    let s = sylvester(4).s;
    fail_if(s != vec![int(1), rat(3, 2), rat(5, 3), rat(71, 42)], format!("s_1..s_4 = {s:?}"))?;
    for n in 1..=5 {
        let v = AdditiveValuation::from_ints(&[1]);
        let inst = Instance::identical(Kind::Goods, &v, &sylvester_tight_entitlements(n)).map_err(|e| e.to_string())?;
        let lot = exante_grand_bundle_lottery(&inst, DEFAULT_SYLVESTER_TERMS).map_err(|e| e.to_string())?;
        fail_if(lot.total_weight() != int(1), format!("lottery weights at n = {n}"))?;
        let cert = verify_exante_tightness(n, &rat(1, 100)).map_err(|e| e.to_string())?;
        fail_if(!cert.infeasible, format!("tightness at n = {n}"))?;
    }
    Ok("oracle n <= 4, K <= 50; lottery and tightness n <= 5".into())
}

fn structure_fixtures() -> Outcome {
    verify_fixture("nonmonotone", None)?;
    verify_fixture("nonmonotone-half", None)?;
    verify_fixture("myopic-pair", None)?;
    Ok("non-monotone pair and myopic pair".into())
}

fn ptas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let eps = rat(1, 10);
    let bs = [rat(1, 3), rat(2, 5), rat(1, 2), rat(3, 5), rat(4, 5)];
    let mut runs = 0;
    for b in &bs {
        for case in 0..24 {
            let v = random_valuation(&mut rng, 1 + case % 6);
            let strat = Approx::new(&v, b, &eps).map_err(|e| e.to_string())?;
            let got = exhaustive_adversary_value(&v, b, &strat).map_err(|e| e.to_string())?;
            let v1 = Optimal::new(&v, b).map_err(|e| e.to_string())?.guarantee();
            let floor = &v1 - &eps * v.total();
            fail_if(got < floor, format!("b={b} v={:?}: {got} < {floor}", v.values()))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} instances, m <= 6"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("threshold structure", thresholds),
        ("MMS at half", mms_at_half),
        ("safe strategy reaches half TPS-hat", safe_grid),
        ("MMS-hat tightness", goods_tightness),
        ("chores RRR feasibility", chores_feasibility),
        ("chores lower bounds", chores_lower_bounds),
        ("best-of-both-worlds chores", bobw_chores),
        ("Sylvester bounds", sylvester_checks),
        ("non-monotone and non-myopic fixtures", structure_fixtures),
        ("approximation scheme", ptas),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
