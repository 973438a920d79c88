//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons
//! only. Runs as a plain binary so the lines are always printed.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{
    coarser_seller, driver_sum_stock, enumerate_lp, polytope_vertices, random_claim,
    random_instance, random_lp, random_measure, random_rational, random_refinement, Instance,
    OracleOutcome, CALL_PRICE, UNIT_CLAIM_PRICE,
};
use superhedge::cli::{parse_market_document, run_command, MarketDocument};
use superhedge::fixtures::{hidden_information, hidden_information_call, hidden_x, hidden_xi};
use superhedge::lp::{
    fourier_motzkin_project, rat, solve_lp, verify_certificate, HPolytope, LinearProgram,
    LpOutcome, LpStatus, Rational, Relation, Sense, VarKind,
};
use superhedge::market::{
    arbitrage_search, strategy_audit, ArbitrageResult, Claim, Market, TradingStrategy,
};
use superhedge::pricing::{
    build_dual_lp, build_measure_polytope, check_membership, dual_from_measure, measure_from_dual,
    measure_lp, price, Method, PriceCertificate,
};
use superhedge::scenario::{
    conditional_expectation, filtration_from_processes, Measure, Partition, Process, ScenarioSpace,
};

type Outcome = Result<String, String>;
type Range = Option<(Rational, Rational)>;

const SEED: u64 = 0x5eed_2024;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn r(p: (i64, i64)) -> Rational {
    rat(p.0, p.1)
}

fn value(m: &Market, b: &Claim, method: Method) -> Result<Rational, String> {
    let res = price(m, b, method).map_err(|e| e.to_string())?;
    res.value()
        .cloned()
        .ok_or_else(|| format!("{} is {}", method.as_str(), res.outcome.status().as_str()))
}

fn instances(count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count).map(|_| random_instance(&mut rng)).collect()
}

fn ms(d: Duration) -> String {
    format!("{:.0} ms", d.as_secs_f64() * 1e3)
}

fn example_prices() -> Outcome {
    let m = hidden_information(&[0, 1]).map_err(|e| e.to_string())?;
    let claims = [
        (
            "B = 1",
            Claim::constant(5, Rational::one()).unwrap(),
            r(UNIT_CLAIM_PRICE),
        ),
        ("call", hidden_information_call(), r(CALL_PRICE)),
    ];
    let mut parts = Vec::new();
    for (name, b, expected) in claims {
        let start = Instant::now();
        let primal = value(&m, &b, Method::Primal)?;
        let dual = value(&m, &b, Method::DualLp)?;
        let took = start.elapsed();
        ensure!(primal == dual, "{name}: primal {primal} != dual {dual}");
        ensure!(primal == expected, "{name}: {primal} != oracle {expected}");
        ensure!(took < Duration::from_secs(1), "{name}: took {}", ms(took));
        parts.push(format!("{name} = {primal} in {}", ms(took)));
    }
    Ok(parts.join(", "))
}

fn arbitrage_dichotomy() -> Outcome {
    let open = hidden_information(&[]).map_err(|e| e.to_string())?;
    let zero = Claim::constant(5, Rational::zero()).unwrap();

    // Borrow 5 in bonds and buy one stock on the seller atom {w2} at t = 1.
    let mut h = TradingStrategy::zeros(&open);
    let g1 = open.seller_filtration().at(1);
    let k = g1.atom_of(1).unwrap();
    ensure!(
        g1.block(k) == [1],
        "atom of w2 at t = 1 is {:?}",
        g1.block(k)
    );
    h.set(0, 1, k, rat(-5, 1));
    h.set(1, 1, k, rat(1, 1));
    let gains = h.terminal_values(&open);
    ensure!(
        gains == common::ints(&[0, 4, 0, 0, 0]),
        "explicit witness gains {gains:?}"
    );
    let audit = strategy_audit(&open, &h, &zero, &Rational::zero()).map_err(|e| e.to_string())?;
    ensure!(
        audit.all_passed(),
        "explicit witness fails audit: {audit:?}"
    );

    let found = arbitrage_search(&open, true).map_err(|e| e.to_string())?;
    let ArbitrageResult::Found {
        strategy,
        terminal_gains,
        expected_gain,
    } = found
    else {
        return Err("no arbitrage found with I1 empty".into());
    };
    let audit =
        strategy_audit(&open, &strategy, &zero, &Rational::zero()).map_err(|e| e.to_string())?;
    ensure!(audit.all_passed(), "found witness fails audit: {audit:?}");
    ensure!(
        terminal_gains.iter().all(|g| !g.is_negative()) && expected_gain.is_positive(),
        "found witness is not an arbitrage"
    );

    let closed = hidden_information(&[0, 1]).map_err(|e| e.to_string())?;
    ensure!(
        arbitrage_search(&closed, true).map_err(|e| e.to_string())? == ArbitrageResult::None,
        "arbitrage reported with I1 = {{0,1}}"
    );
    let audit = strategy_audit(&closed, &h, &zero, &Rational::zero()).map_err(|e| e.to_string())?;
    ensure!(
        !audit.no_short_selling.passed,
        "explicit witness allowed with I1 = {{0,1}}"
    );
    Ok(format!(
        "I1 empty: witness gains {terminal_gains:?}; I1 = {{0,1}}: none"
    ))
}

fn is_empty(p: &HPolytope) -> Result<bool, String> {
    Ok(solve_lp(&p.feasibility_lp())
        .map_err(|e| e.to_string())?
        .status()
        == LpStatus::Infeasible)
}

/// Builds the polytope, projects it onto `q3` and checks the projection
/// against the vertex oracle and a direct LP. Returns the range of `q3`.
fn project_q3(m: &Market) -> Result<(Range, usize, Duration), String> {
    let start = Instant::now();
    let poly = build_measure_polytope(m).map_err(|e| e.to_string())?;
    let desc = &poly.description;
    let projected = fourier_motzkin_project(desc, &["q1", "q2", "q4", "q5"], false)
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();

    let verts = polytope_vertices(desc);
    for v in &verts {
        let q = Measure::new(v.clone()).map_err(|e| e.to_string())?;
        let rep = check_membership(m, &q).map_err(|e| e.to_string())?;
        ensure!(
            rep.member,
            "vertex {v:?} fails membership: {:?}",
            rep.violations
        );
    }
    ensure!(
        is_empty(desc)? == is_empty(&projected)?,
        "projection and polytope disagree on emptiness"
    );
    ensure!(
        verts.is_empty() == is_empty(desc)?,
        "vertex oracle disagrees on emptiness"
    );
    if verts.is_empty() {
        return Ok((None, 0, took));
    }
    let q3: Vec<&Rational> = verts.iter().map(|v| &v[2]).collect();
    let lo = (*q3.iter().min().unwrap()).clone();
    let hi = (*q3.iter().max().unwrap()).clone();
    for (target, sense) in [(&hi, Sense::Maximize), (&lo, Sense::Minimize)] {
        let mut lp = LinearProgram::new(sense);
        lp.add_variable("q3", VarKind::Free);
        lp.set_objective(0, Rational::one());
        lp.rows = projected.rows.clone();
        let got = solve_lp(&lp).map_err(|e| e.to_string())?;
        ensure!(
            got.value() == Some(target),
            "projected bound {:?} != vertex bound {target}",
            got.value()
        );
    }
    Ok((Some((lo, hi)), verts.len(), took))
}

fn polytope_recomputation() -> Outcome {
    let m = hidden_information(&[0, 1]).map_err(|e| e.to_string())?;
    let (range, verts, took) = project_q3(&m)?;
    ensure!(
        took < Duration::from_secs(1),
        "build and projection took {}",
        ms(took)
    );

    let alt_stock = driver_sum_stock();
    let alt_full = filtration_from_processes(&[&hidden_x(), &hidden_xi(), &alt_stock])
        .map_err(|e| e.to_string())?;
    let alt_seller = filtration_from_processes(&[&alt_stock]).map_err(|e| e.to_string())?;
    let alt = Market::new(
        ScenarioSpace::uniform(5).unwrap(),
        vec!["bond".into(), "stock".into()],
        vec![Process::constant(2, 5, Rational::one()), alt_stock],
        alt_full,
        alt_seller,
        [0, 1].into_iter().collect(),
    )
    .map_err(|e| e.to_string())?;
    let (alt_range, alt_verts, alt_took) = project_q3(&alt)?;
    ensure!(
        alt_took < Duration::from_secs(1),
        "alternative reading took {}",
        ms(alt_took)
    );

    let record = fixture_dir().join("hidden_information_polytope.json");
    let text =
        std::fs::read_to_string(&record).map_err(|e| format!("{}: {e}", record.display()))?;
    let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let show = |r: &Range| match r {
        None => serde_json::Value::Null,
        Some((lo, hi)) => serde_json::json!([lo.to_string(), hi.to_string()]),
    };
    ensure!(
        json["computed"]["q3_range"] == show(&range),
        "recorded q3 range differs from {}",
        show(&range)
    );
    ensure!(
        json["alternative_reading"]["q3_range"] == show(&alt_range),
        "recorded alternative range differs from {}",
        show(&alt_range)
    );
    let printed = json["printed_bound"]["q3_max"].as_str().unwrap_or("?");
    let describe = |r: &Range| match r {
        None => "empty".to_string(),
        Some((lo, hi)) => format!("q3 in [{lo}, {hi}]"),
    };
    Ok(format!(
        "{} ({verts} vertices, {}); alternative reading {} ({alt_verts} vertices); printed q3 <= {printed} not reproduced",
        describe(&range),
        ms(took),
        describe(&alt_range)
    ))
}

fn duality_suite(all: &[Instance]) -> Outcome {
    let start = Instant::now();
    let mut solved = 0;
    for (i, inst) in all.iter().enumerate() {
        let m = &inst.market;
        ensure!(
            !arbitrage_search(m, true)
                .map_err(|e| e.to_string())?
                .is_found(),
            "instance {i} admits an arbitrage"
        );
        for b in &inst.claims {
            let primal = value(m, b, Method::Primal)?;
            let dual = value(m, b, Method::DualLp)?;
            ensure!(
                primal == dual,
                "instance {i}: primal {primal} != dual {dual}"
            );
            solved += 1;
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "took {}", ms(took));
    Ok(format!(
        "{} instances, {solved} claims, {}",
        all.len(),
        ms(took)
    ))
}

fn measure_suite(all: &[Instance]) -> Outcome {
    let mut checked = 0;
    for (i, inst) in all.iter().enumerate() {
        let m = &inst.market;
        if m.is_short_restricted(0) {
            continue;
        }
        let poly = build_measure_polytope(m).map_err(|e| e.to_string())?;
        for b in &inst.claims {
            let dual_problem = build_dual_lp(m, b).map_err(|e| e.to_string())?;
            let dual = price(m, b, Method::DualLp).map_err(|e| e.to_string())?;
            let Some(PriceCertificate::Dual(d)) = &dual.certificate else {
                return Err(format!(
                    "instance {i}: dual LP is {}",
                    dual.outcome.status().as_str()
                ));
            };
            let meas =
                superhedge::pricing::price_with_polytope(&poly, b).map_err(|e| e.to_string())?;
            let Some(PriceCertificate::Measure(q)) = &meas.certificate else {
                return Err(format!(
                    "instance {i}: measure LP is {}",
                    meas.outcome.status().as_str()
                ));
            };
            let v = dual.value().unwrap();
            ensure!(
                meas.value() == Some(v),
                "instance {i}: dual {v} != measure {:?}",
                meas.value()
            );

            let q_from_d = measure_from_dual(m, d).map_err(|e| e.to_string())?;
            ensure!(
                check_membership(m, &q_from_d)
                    .map_err(|e| e.to_string())?
                    .member,
                "instance {i}: mapped dual is not a member"
            );
            ensure!(
                &q_from_d.expectation(b.payoff()) == v,
                "instance {i}: mapped dual changes the value"
            );

            let d_from_q = dual_from_measure(m, q).map_err(|e| e.to_string())?;
            ensure!(
                dual_problem
                    .is_feasible(&d_from_q)
                    .map_err(|e| e.to_string())?,
                "instance {i}: mapped measure is not dual-feasible"
            );
            ensure!(
                &d_from_q.objective(m, b) == v,
                "instance {i}: mapped measure changes the value"
            );
            let back = measure_from_dual(m, &d_from_q).map_err(|e| e.to_string())?;
            ensure!(&back == q, "instance {i}: round trip moves the measure");
            checked += 1;
        }
    }
    ensure!(checked > 0, "no instance with the bond unconstrained");
    Ok(format!("{checked} claims on bond-free instances"))
}

fn functional_properties(all: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    for (i, inst) in all.iter().take(100).enumerate() {
        let m = &inst.market;
        let n = m.num_scenarios();
        let v = |m: &Market, b: &Claim| value(m, b, Method::Primal);
        let (b1, b2) = (&inst.claims[0], &inst.claims[1]);
        let v1 = v(m, b1)?;
        let v2 = v(m, b2)?;

        let c = random_rational(&mut rng, 0, 9, 4);
        ensure!(
            v(m, &Claim::constant(n, c.clone()).unwrap())? == c,
            "instance {i}: v(c) != {c}"
        );

        for lambda in [rat(0, 1), rat(1, 2), rat(2, 1), rat(7, 3)] {
            let scaled = Claim::new(b1.payoff().iter().map(|x| x * &lambda).collect()).unwrap();
            ensure!(
                v(m, &scaled)? == &lambda * &v1,
                "instance {i}: v({lambda} B) != {lambda} v(B)"
            );
        }

        let sum = Claim::new(
            b1.payoff()
                .iter()
                .zip(b2.payoff())
                .map(|(x, y)| x + y)
                .collect(),
        )
        .unwrap();
        ensure!(
            v(m, &sum)? <= &v1 + &v2,
            "instance {i}: subadditivity fails"
        );

        let bump = random_claim(&mut rng, n);
        let larger = Claim::new(
            b1.payoff()
                .iter()
                .zip(bump.payoff())
                .map(|(x, y)| x + y)
                .collect(),
        )
        .unwrap();
        ensure!(
            v(m, &larger)? >= v1,
            "instance {i}: monotonicity in B fails"
        );

        let mut wider: BTreeSet<usize> = m.short_restricted().clone();
        wider.insert(rng.gen_range(0..m.num_assets()));
        let restricted = m.with_short_restricted(wider).map_err(|e| e.to_string())?;
        ensure!(
            v(&restricted, b1)? >= v1,
            "instance {i}: enlarging I1 lowers the price"
        );

        let coarse = m
            .with_seller_filtration(coarser_seller(&mut rng, m))
            .map_err(|e| e.to_string())?;
        ensure!(
            v(&coarse, b1)? >= v1,
            "instance {i}: coarsening G lowers the price"
        );
    }
    Ok("100 instances".into())
}

fn solver_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut tally = [0usize; 3];
    for i in 0..100 {
        let lp = random_lp(&mut rng);
        let out = solve_lp(&lp).map_err(|e| e.to_string())?;
        let cert = verify_certificate(&lp, &out);
        ensure!(cert.all_passed(), "lp {i}: certificate fails: {cert:?}");
        let oracle = enumerate_lp(&lp);
        match (&out, &oracle) {
            (LpOutcome::Optimal(opt), OracleOutcome::Optimal(v)) => {
                ensure!(&opt.value == v, "lp {i}: {} != oracle {v}", opt.value);
                tally[0] += 1;
            }
            (LpOutcome::Infeasible(_), OracleOutcome::Infeasible) => tally[1] += 1,
            (LpOutcome::Unbounded(_), OracleOutcome::Unbounded) => tally[2] += 1,
            _ => {
                return Err(format!(
                    "lp {i}: solver {:?} vs oracle {oracle:?}",
                    out.status()
                ))
            }
        }
    }

    // Beale's example cycles under the textbook largest-coefficient rule.
    let mut lp = LinearProgram::new(Sense::Minimize);
    for (j, c) in [rat(-3, 4), rat(20, 1), rat(-1, 2), rat(6, 1)]
        .into_iter()
        .enumerate()
    {
        lp.add_variable(format!("x{}", j + 4), VarKind::NonNegative);
        lp.set_objective(j, c);
    }
    lp.add_row(
        [
            (0, rat(1, 4)),
            (1, rat(-8, 1)),
            (2, rat(-1, 1)),
            (3, rat(9, 1)),
        ],
        Relation::Le,
        Rational::zero(),
    );
    lp.add_row(
        [
            (0, rat(1, 2)),
            (1, rat(-12, 1)),
            (2, rat(-1, 2)),
            (3, rat(3, 1)),
        ],
        Relation::Le,
        Rational::zero(),
    );
    lp.add_row([(2, rat(1, 1))], Relation::Le, Rational::one());
    let out = solve_lp(&lp).map_err(|e| e.to_string())?;
    ensure!(
        out.value() == Some(&rat(-5, 4)),
        "cycling fixture value {:?}",
        out.value()
    );
    ensure!(
        verify_certificate(&lp, &out).all_passed(),
        "cycling fixture certificate fails"
    );
    Ok(format!(
        "{} optimal, {} infeasible, {} unbounded; cycling fixture = -5/4",
        tally[0], tally[1], tally[2]
    ))
}

fn conditional_expectation_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let ce = |x: &[Rational], p: &Partition, q: &Measure| conditional_expectation(x, p, q).unwrap();
    for i in 0..100 {
        let n = rng.gen_range(1..=8);
        let q = Measure::new(random_measure(&mut rng, n, true)).unwrap();
        let coarse = random_refinement(&mut rng, &Partition::trivial(n));
        let fine = random_refinement(&mut rng, &coarse);
        let x: Vec<Rational> = (0..n)
            .map(|_| random_rational(&mut rng, -6, 6, 5))
            .collect();
        let y: Vec<Rational> = (0..n)
            .map(|_| random_rational(&mut rng, -6, 6, 5))
            .collect();
        let (a, b) = (
            random_rational(&mut rng, -3, 3, 4),
            random_rational(&mut rng, -3, 3, 4),
        );

        ensure!(
            ce(&ce(&x, &fine, &q), &coarse, &q) == ce(&x, &coarse, &q),
            "triple {i}: tower fails"
        );

        let ax_by: Vec<Rational> = x.iter().zip(&y).map(|(u, v)| &a * u + &b * v).collect();
        let lin: Vec<Rational> = ce(&x, &fine, &q)
            .iter()
            .zip(ce(&y, &fine, &q))
            .map(|(u, v)| &a * u + &b * &v)
            .collect();
        ensure!(ce(&ax_by, &fine, &q) == lin, "triple {i}: linearity fails");

        ensure!(
            q.expectation(&ce(&x, &fine, &q)) == q.expectation(&x),
            "triple {i}: total expectation fails"
        );

        let discrete = ce(&x, &Partition::discrete(n), &q);
        for w in 0..n {
            let expected = if q.weight(w).is_zero() {
                Rational::zero()
            } else {
                x[w].clone()
            };
            ensure!(
                discrete[w] == expected,
                "triple {i}: discrete identity fails at {w}"
            );
        }

        let on_fine = ce(&x, &fine, &q);
        for block in fine.blocks() {
            if q.mass(block).is_zero() {
                ensure!(
                    block.iter().all(|&w| on_fine[w].is_zero()),
                    "triple {i}: null block not 0"
                );
            }
        }
    }
    Ok("100 triples".into())
}

fn one_step_sufficiency(all: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let (mut points, mut exhaustive) = (0, 0);
    for (i, inst) in all.iter().enumerate() {
        let m = &inst.market;
        let poly = build_measure_polytope(m).map_err(|e| e.to_string())?;
        let n = m.num_scenarios();
        let mut candidates: Vec<Vec<Rational>> = Vec::new();
        if n <= 5 {
            candidates.extend(polytope_vertices(&poly.description));
            exhaustive += 1;
        }
        for _ in 0..4 {
            let objective =
                Claim::new((0..n).map(|_| random_rational(&mut rng, 0, 9, 1)).collect()).unwrap();
            let lp = measure_lp(&poly, &objective).map_err(|e| e.to_string())?;
            if let LpOutcome::Optimal(opt) = solve_lp(&lp).map_err(|e| e.to_string())? {
                candidates.push(opt.primal);
            }
        }
        if candidates.len() >= 2 {
            let k = candidates.len();
            let avg: Vec<Rational> = (0..n)
                .map(|w| {
                    candidates.iter().map(|c| &c[w]).sum::<Rational>()
                        / Rational::from_integer(k as i64)
                })
                .collect();
            candidates.push(avg);
        }
        for c in &candidates {
            ensure!(
                poly.description.contains(c),
                "instance {i}: candidate outside the one-step rows"
            );
            let rep = check_membership(m, &Measure::new(c.clone()).unwrap())
                .map_err(|e| e.to_string())?;
            ensure!(
                rep.member,
                "instance {i}: {c:?} fails membership: {:?}",
                rep.violations
            );
            points += 1;
        }
    }
    Ok(format!(
        "{points} measures, vertices enumerated on {exhaustive} instances"
    ))
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn cli(args: &[&str]) -> superhedge::cli::CommandOutput {
    let dir = fixture_dir();
    let argv: Vec<String> = std::iter::once("superhedge".to_string())
        .chain(args.iter().map(|a| {
            if a.ends_with(".json") {
                dir.join(a).display().to_string()
            } else {
                a.to_string()
            }
        }))
        .collect();
    run_command(argv)
}

fn cli_contract() -> Outcome {
    let cases: &[(&[&str], i32)] = &[
        (&["validate", "hidden_information.json"], 0),
        (&["validate", "binomial.json"], 0),
        (&["validate", "broken.json"], 1),
        (&["validate", "bad_probabilities.json"], 1),
        (&["validate", "zero_denominator.json"], 3),
        (&["validate", "syntax_error.json"], 3),
        (&["validate", "missing.json"], 3),
        (&["frobnicate"], 3),
        (&["price", "hidden_information.json", "--claim", "call"], 0),
        (&["price", "hidden_information.json", "--claim", "nope"], 3),
        (
            &[
                "price",
                "hidden_information_unconstrained.json",
                "--claim",
                "call",
            ],
            2,
        ),
        (&["report", "hidden_information_unconstrained.json"], 2),
        (&["report", "binomial.json"], 0),
        (
            &["polytope", "hidden_information.json", "--project", "q3"],
            0,
        ),
        (
            &["arbitrage", "hidden_information.json", "--unconstrained"],
            0,
        ),
    ];
    for (args, code) in cases {
        let out = cli(args);
        ensure!(
            out.code == *code,
            "{args:?} exited {} (expected {code}): {}",
            out.code,
            out.stderr
        );
    }
    let call = cli(&[
        "price",
        "hidden_information.json",
        "--claim",
        "call",
        "--format",
        "table",
    ]);
    ensure!(
        call.stdout.contains("41/24"),
        "call price missing from table"
    );

    for name in [
        "hidden_information.json",
        "hidden_information_unconstrained.json",
        "binomial.json",
    ] {
        let text = std::fs::read_to_string(fixture_dir().join(name)).map_err(|e| e.to_string())?;
        let loaded = parse_market_document(&text).map_err(|e| e.to_string())?;
        let written = MarketDocument::from_market(&loaded.market, &loaded.claims).to_json();
        let reloaded = parse_market_document(&written).map_err(|e| e.to_string())?;
        ensure!(reloaded == loaded, "{name}: round trip changes the market");
        let rewritten = MarketDocument::from_market(&reloaded.market, &reloaded.claims).to_json();
        ensure!(rewritten == written, "{name}: serialization is not stable");
    }

    for args in [
        &["report", "hidden_information.json"][..],
        &["polytope", "hidden_information.json"][..],
        &["arbitrage", "hidden_information_unconstrained.json"][..],
    ] {
        ensure!(
            cli(args) == cli(args),
            "{args:?}: output differs between runs"
        );
    }
    Ok(format!(
        "{} exit-code cases, 3 round trips, 3 byte-stable commands",
        cases.len()
    ))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let took = ms(start.elapsed());
    match outcome {
        Ok(detail) => {
            println!("PASS {name}: {detail} [{took}]");
            true
        }
        Err(detail) => {
            println!("FAIL {name}: {detail} [{took}]");
            false
        }
    }
}

fn main() {
    let all = instances(200);
    let results = [
        run("1 example prices", example_prices),
        run("2 arbitrage dichotomy", arbitrage_dichotomy),
        run("3 polytope recomputation", polytope_recomputation),
        run("4 primal = dual LP", || duality_suite(&all)),
        run("5 dual LP = measure LP", || measure_suite(&all)),
        run("6 pricing functional", || functional_properties(&all)),
        run("7 solver oracle", solver_oracle),
        run(
            "8 conditional expectation",
            conditional_expectation_properties,
        ),
        run("9 one-step sufficiency", || one_step_sufficiency(&all)),
        run("10 cli contract", cli_contract),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
