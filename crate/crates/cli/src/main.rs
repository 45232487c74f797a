//! `fairshare`: JSON in, JSON out. Exit codes: 0 ok, 1 usage or input
//! error, 2 a verification came out negative, 3 a resource cap was hit.

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairshare::bidding::{run_game, solve_with_cap, strategy_by_name, Strategy, TieBreak, DEFAULT_SOLVER_CAP};
use fairshare::chores::{assign_bobw, assign_rrr_with, SelectionRule};
use fairshare::goods_exante::{exante_grand_bundle_lottery, gamma_tilde, DEFAULT_SYLVESTER_TERMS};
use fairshare::oracles::{check_feasibility, fixture_with, DEFAULT_ENUMERATION_CAP, FIXTURE_NAMES};
use fairshare::personalized::{personalized_mms, personalized_ps, verify_personalized_feasibility, PersonalizedContext};
use fairshare::rational::{self, parse_rational};
use fairshare::shares::{
    mms_with_cap, share, tps_hat, unit_lower_k, unit_upper_k, ShareKind, DEFAULT_MMS_CAP,
};
use fairshare::{order_items, parse_instance, Error, Instance, Kind, Rational};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "fairshare", version, about = "Fair division with arbitrary entitlements, in exact rationals")]
struct Cli {
    /// Override the enumeration cap (steps), or for bid-solve the item cap.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value of one share for one agent.
    Share {
        #[arg(long)]
        kind: ShareKind,
        #[arg(long, default_value_t = 0)]
        agent: usize,
        /// Anchor agent for --kind personalized.
        #[arg(long)]
        anchor: Option<usize>,
        instance: String,
    },
    /// Personalized MMS and PS of every agent, anchored at one agent.
    Personalized {
        #[arg(long)]
        anchor: usize,
        instance: String,
    },
    /// Allocate goods by having every agent play the safe bidding strategy.
    AllocateGoods {
        #[command(flatten)]
        tie: TieArgs,
        instance: String,
    },
    /// Assign chores by the debt picking sequence, or as a lottery.
    AssignChores {
        #[arg(long)]
        bobw: bool,
        /// With --bobw, draw one outcome instead of printing the lottery.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Rule::MaxDebt)]
        rule: Rule,
        instance: String,
    },
    /// Grand-bundle lottery for goods.
    ExanteGoods {
        /// Sylvester terms behind the gamma stand-in.
        #[arg(long, default_value_t = DEFAULT_SYLVESTER_TERMS)]
        terms: usize,
        instance: String,
    },
    /// Thresholds and value function of the two-player game for one agent.
    BidSolve {
        #[arg(long, default_value_t = 0)]
        agent: usize,
        instance: String,
    },
    /// Play the bidding game and print the trace.
    BidPlay {
        /// Comma-separated, one per agent (or one for all).
        #[arg(long, default_value = "safe")]
        strategies: String,
        #[command(flatten)]
        tie: TieArgs,
        instance: String,
    },
    /// Check a fixture certificate, or the feasibility of a share.
    Verify {
        #[arg(long, conflicts_with = "share")]
        fixture: Option<String>,
        /// Size parameter of the fixture.
        #[arg(long, requires = "fixture")]
        param: Option<usize>,
        #[arg(long, requires = "instance")]
        share: Option<ShareKind>,
        /// Multiplier applied to every share.
        #[arg(long, default_value = "1")]
        factor: String,
        #[arg(long)]
        anchor: Option<usize>,
        instance: Option<String>,
    },
    /// List fixture names.
    Fixtures,
}

#[derive(Args)]
struct TieArgs {
    #[arg(long, value_enum, default_value_t = Tie::Index)]
    tiebreak: Tie,
    /// Seed for --tiebreak random.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Index,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    MaxDebt,
    FirstPositive,
}

enum Failure {
    Lib(Error),
    /// The command ran but the property checked does not hold.
    Negative(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<Value, Failure>;

fn read_instance(path: &str) -> Result<Instance, Error> {
    let text = if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?
    };
    parse_instance(&text)
}

fn agent_index(inst: &Instance, i: usize) -> Result<usize, Error> {
    if i < inst.n() {
        Ok(i)
    } else {
        Err(Error::Precondition(format!("agent {i} out of range, the instance has {}", inst.n())))
    }
}

fn rats(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(rational::to_json).collect())
}

fn tiebreak(t: &TieArgs) -> TieBreak {
    match t.tiebreak {
        Tie::Index => TieBreak::LowestIndex,
        Tie::Random => TieBreak::RandomOrder(t.seed),
    }
}

/// Share value plus, for the MMS family, the witness partition.
fn share_value(inst: &Instance, kind: ShareKind, agent: usize, anchor: Option<usize>, cap: u64) -> Result<Value, Error> {
    let a = &inst.agents[agent];
    let (v, b) = (&a.valuation, &a.entitlement);
    let mms_shape = match kind {
        ShareKind::Mms | ShareKind::MmsHat => Some((rational::to_usize(&unit_upper_k(b)), Kind::Goods)),
        ShareKind::MmsBar => Some((rational::to_usize(&unit_lower_k(b)) + 1, Kind::Chores)),
        _ => None,
    };
    if kind == ShareKind::Personalized {
        let anchor = agent_index(inst, anchor.ok_or_else(|| Error::Precondition("--kind personalized needs --anchor".into()))?)?;
        let x = &inst.agents[anchor];
        let ctx = PersonalizedContext::new(inst.kind, &x.valuation, &x.entitlement)?;
        return Ok(json!({"agent": agent, "kind": kind.name(), "anchor": anchor, "value": rational::to_json(&personalized_mms(&ctx, v, b)?)}));
    }
    // Plain MMS is only defined at 1/k; let share() report the error.
    let value = share(kind, v, b)?.value;
    match mms_shape {
        Some((k, k_kind)) => {
            let w = mms_with_cap(v, k, k_kind, cap)?;
            debug_assert_eq!(w.value, value);
            let partition: Vec<Value> = w.partition.iter().map(|s| s.to_json()).collect();
            Ok(json!({"agent": agent, "kind": kind.name(), "value": rational::to_json(&w.value), "partition": partition}))
        }
        None => Ok(json!({"agent": agent, "kind": kind.name(), "value": rational::to_json(&value)})),
    }
}

fn personalized(inst: &Instance, anchor: usize) -> Out {
    let anchor = agent_index(inst, anchor)?;
    let x = &inst.agents[anchor];
    let ctx = PersonalizedContext::new(inst.kind, &x.valuation, &x.entitlement)?;
    let shares = inst
        .agents
        .iter()
        .enumerate()
        .map(|(j, a)| {
            Ok(json!({
                "agent": j,
                "representatives": ctx.representative_count(&a.entitlement),
                "mms": rational::to_json(&personalized_mms(&ctx, &a.valuation, &a.entitlement)?),
                "ps": rational::to_json(&personalized_ps(inst.kind, ctx.k, &a.valuation, &a.entitlement)),
            }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let witness = verify_personalized_feasibility(&ctx, inst)?;
    Ok(json!({
        "anchor": anchor,
        "k": ctx.k,
        "threshold": rational::to_json(&ctx.threshold),
        "shares": shares,
        "witness": witness.to_json(),
    }))
}

fn strategies_for(inst: &Instance, spec: &str) -> Result<Vec<Box<dyn Strategy>>, Error> {
    let names: Vec<&str> = spec.split(',').map(str::trim).collect();
    let names = match names.len() {
        1 => vec![names[0]; inst.n()],
        n if n == inst.n() => names,
        n => return Err(Error::Precondition(format!("{n} strategies for {} agents", inst.n()))),
    };
    inst.agents.iter().zip(names).map(|(a, name)| strategy_by_name(name, &a.valuation, &a.entitlement)).collect()
}

fn play(inst: &Instance, spec: &str, tie: &TieArgs) -> Result<(Vec<Box<dyn Strategy>>, fairshare::bidding::GameOutcome), Error> {
    let strategies = strategies_for(inst, spec)?;
    let refs: Vec<&dyn Strategy> = strategies.iter().map(|s| s.as_ref()).collect();
    let outcome = run_game(inst, &refs, tiebreak(tie))?;
    Ok((strategies, outcome))
}

fn allocate_goods(inst: &Instance, tie: &TieArgs) -> Out {
    let (_, outcome) = play(inst, "safe", tie)?;
    let values = outcome.allocation.values(inst);
    let targets: Vec<Rational> = inst.agents.iter().map(|a| tps_hat(&a.valuation, &a.entitlement) / rational::int(2)).collect();
    let met = values.iter().zip(&targets).all(|(x, t)| x >= t);
    let out = json!({
        "allocation": outcome.allocation.to_json(),
        "values": rats(&values),
        "half_tps_hat": rats(&targets),
        "all_targets_met": met,
    });
    if met {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}

fn assign_chores(inst: &Instance, bobw: bool, seed: Option<u64>, rule: Rule) -> Out {
    if !bobw {
        if seed.is_some() {
            return Err(Error::Precondition("--seed only applies with --bobw".into()).into());
        }
        let rule = match rule {
            Rule::MaxDebt => SelectionRule::MaxDebt,
            Rule::FirstPositive => SelectionRule::FirstPositive,
        };
        let alloc = assign_rrr_with(inst, rule)?;
        return Ok(json!({"allocation": alloc.to_json(), "costs": rats(&alloc.values(inst))}));
    }
    let lottery = assign_bobw(inst)?;
    Ok(match seed {
        Some(seed) => {
            let o = lottery.sample(seed);
            json!({
                "seed": seed,
                "weight": rational::to_json(&o.weight),
                "coupon_holders": o.holders,
                "allocation": o.allocation.to_json(),
                "costs": rats(&o.allocation.values(inst)),
            })
        }
        None => lottery.to_json(inst),
    })
}

fn exante_goods(inst: &Instance, terms: usize) -> Out {
    let lottery = exante_grand_bundle_lottery(inst, terms)?;
    let mut out = lottery.to_json(inst);
    out["gamma_tilde"] = rational::to_json(&gamma_tilde(inst.n(), terms));
    Ok(out)
}

fn bid_solve(inst: &Instance, agent: usize, cap: Option<u64>) -> Out {
    let a = &inst.agents[agent_index(inst, agent)?];
    let cap = cap.map_or(DEFAULT_SOLVER_CAP, |c| c.min(64) as usize);
    let sol = solve_with_cap(&order_items(&a.valuation), cap)?;
    let mut out = sol.to_json();
    out["agent"] = json!(agent);
    out["guarantee"] = rational::to_json(&sol.value(0, &a.entitlement));
    Ok(out)
}

fn bid_play(inst: &Instance, spec: &str, tie: &TieArgs) -> Out {
    let (strategies, outcome) = play(inst, spec, tie)?;
    let mut out = outcome.to_json(inst);
    out["strategies"] = json!(strategies.iter().map(|s| s.name()).collect::<Vec<_>>());
    Ok(out)
}

fn verify_share(inst: &Instance, kind: ShareKind, factor: &Rational, anchor: Option<usize>, cap: u64) -> Out {
    let shares = match kind {
        ShareKind::Personalized => {
            let anchor = agent_index(inst, anchor.ok_or_else(|| Error::Precondition("--share personalized needs --anchor".into()))?)?;
            let x = &inst.agents[anchor];
            let ctx = PersonalizedContext::new(inst.kind, &x.valuation, &x.entitlement)?;
            inst.agents.iter().map(|a| personalized_mms(&ctx, &a.valuation, &a.entitlement)).collect::<Result<Vec<_>, _>>()?
        }
        _ => inst.agents.iter().map(|a| share(kind, &a.valuation, &a.entitlement).map(|s| s.value)).collect::<Result<Vec<_>, _>>()?,
    };
    let demanded: Vec<Rational> = shares.iter().map(|s| s * factor).collect();
    let f = check_feasibility(inst, &demanded, cap)?;
    let mut out = f.to_json();
    out["share"] = json!(kind.name());
    out["factor"] = rational::to_json(factor);
    out["demanded"] = rats(&demanded);
    if f.feasible {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}

fn verify_fixture(name: &str, param: Option<usize>) -> Out {
    let f = fixture_with(name, param)?;
    let verdict = f.verify()?;
    let out = json!({"fixture": f.name, "param": f.param, "holds": verdict.holds, "certificate": verdict.certificate});
    if verdict.holds {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}

fn run(cli: Cli) -> Out {
    let cap = cli.cap;
    match cli.command {
        Command::Share { kind, agent, anchor, instance } => {
            let inst = read_instance(&instance)?;
            let agent = agent_index(&inst, agent)?;
            Ok(share_value(&inst, kind, agent, anchor, cap.unwrap_or(DEFAULT_MMS_CAP))?)
        }
        Command::Personalized { anchor, instance } => personalized(&read_instance(&instance)?, anchor),
        Command::AllocateGoods { tie, instance } => allocate_goods(&read_instance(&instance)?, &tie),
        Command::AssignChores { bobw, seed, rule, instance } => assign_chores(&read_instance(&instance)?, bobw, seed, rule),
        Command::ExanteGoods { terms, instance } => exante_goods(&read_instance(&instance)?, terms),
        Command::BidSolve { agent, instance } => bid_solve(&read_instance(&instance)?, agent, cap),
        Command::BidPlay { strategies, tie, instance } => bid_play(&read_instance(&instance)?, &strategies, &tie),
        Command::Verify { fixture: Some(name), param, .. } => verify_fixture(&name, param),
        Command::Verify { share: Some(kind), factor, anchor, instance: Some(path), .. } => {
            let factor = parse_rational(&factor)?;
            verify_share(&read_instance(&path)?, kind, &factor, anchor, cap.unwrap_or(DEFAULT_ENUMERATION_CAP))
        }
        Command::Verify { .. } => Err(Error::Precondition("verify needs --fixture NAME or --share KIND INSTANCE".into()).into()),
        Command::Fixtures => Ok(json!(FIXTURE_NAMES)),
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Negative(v)) => {
            print(&v);
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Cap { .. }) { 3 } else { 1 })
        }
    }
}
