//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod support;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vcsp::algebra::{find_fracpol, rigid_core, verify_fracpol, FracOp, OpClass, Operation};
use vcsp::blp::{blp_value, solve_vcsp};
use vcsp::exactlp::{solve_lp, verify_outcome, LpOutcome};
use vcsp::exec::{Caps, Config};
use vcsp::feasibility::one_infty_minimize;
use vcsp::lifting::lift_instance;
use vcsp::model::{evaluate, int, rat, CostFn, ExtRat, Instance, Language};
use vcsp::opgraph::{
    build_graph, generators_from_symmetric, min_max_generators, verify_gen_fracpol,
    verify_generators_strong, GenFracOp,
};
use vcsp::oracle::{brute_opt, brute_opt_with};
use vcsp::random::{
    random_feasible_lp, random_function, random_instance, random_lp, submodular_binary,
    submodular_instance,
};
use vcsp::tuple;

use support::{farkas_ok, lp_oracle, Oracle};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn lang_of(k: usize, fs: impl IntoIterator<Item = CostFn>) -> Language {
    Language::from_functions(k, fs).expect("distinct names")
}

/// Optimum equals the relaxation of the minimal instance on submodular
/// instances, plus certified solving on the same instances.
fn criteria_1_and_6() -> (Outcome, Outcome) {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut infinite = 0;
    let mut c6: Outcome = Ok(String::new());
    for i in 0..200 {
        let (lang, inst) = submodular_instance(&mut rng, 8, 12);
        let run = || -> Result<(ExtRat, ExtRat, vcsp::blp::VcspSolution), String> {
            let opt = brute_opt(&lang, &inst).map_err(e)?.value;
            let min = one_infty_minimize(&lang, &inst).map_err(e)?;
            let blp = blp_value(&min.lang, &min.inst).map_err(e)?.value;
            Ok((opt, blp, solve_vcsp(&lang, &inst).map_err(e)?))
        };
        let (opt, blp, sol) = match run() {
            Ok(r) => r,
            Err(m) => return (Err(format!("instance {i}: {m}")), Err("not reached".into())),
        };
        if opt != blp {
            return (
                Err(format!(
                    "instance {i}: Opt = {opt} but BLP of the minimal instance = {blp}"
                )),
                c6,
            );
        }
        infinite += usize::from(opt.is_infinite());
        if c6.is_ok() {
            let checked = match &sol.assignment {
                Some(a) => evaluate(&lang, &inst, a)
                    .map(|v| v == sol.value)
                    .unwrap_or(false),
                None => sol.value.is_infinite(),
            };
            if !sol.certified || sol.value != opt || !checked {
                c6 = Err(format!(
                    "instance {i}: certified = {}, value = {}, Opt = {opt}, assignment re-check = {checked}",
                    sol.certified, sol.value
                ));
            }
        }
    }
    let c6 = c6.map(|_| {
        "200 instances certified, assignments re-evaluate to the reported value".to_string()
    });
    (
        Ok(format!("200 instances equal ({infinite} with value inf)")),
        c6,
    )
}

fn parity() -> (Language, Instance) {
    let eq = CostFn::crisp("xor0", 2, 2, [vec![0, 0], vec![1, 1]]).unwrap();
    let ne = CostFn::crisp("xor1", 2, 2, [vec![0, 1], vec![1, 0]]).unwrap();
    let inst = Instance::new(3)
        .with("xor0", vec![0, 1])
        .unwrap()
        .with("xor0", vec![1, 2])
        .unwrap()
        .with("xor1", vec![0, 2])
        .unwrap();
    (lang_of(2, [eq, ne]), inst)
}

fn criterion_2() -> Outcome {
    let (lang, inst) = parity();
    let raw = blp_value(&lang, &inst).map_err(e)?;
    let opt = brute_opt(&lang, &inst).map_err(e)?.value;
    let min = one_infty_minimize(&lang, &inst).map_err(e)?;
    let bar = blp_value(&min.lang, &min.inst).map_err(e)?.value;
    ensure!(raw.value == ExtRat::zero(), "BLP(I) = {}", raw.value);
    ensure!(
        verify_outcome(&raw.lp, &raw.outcome),
        "BLP(I) outcome does not verify"
    );
    ensure!(opt.is_infinite(), "Opt(I) = {opt}");
    ensure!(bar.is_infinite(), "BLP of the minimal instance = {bar}");
    Ok("BLP(I) = 0 < Opt(I) = inf = BLP(minimal)".into())
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let big = Config::with_caps(Caps {
        brute_evals: 1 << 34,
        ..Caps::default()
    });
    let mut feasible = 0;
    let mut attempts = 0;
    while feasible < 50 {
        attempts += 1;
        ensure!(
            attempts <= 5000,
            "only {feasible} feasible instances in 5000 draws"
        );
        let k = 1 + attempts % 3;
        let (lang, inst) = random_instance(&mut rng, k, 6, 8, 0.3);
        let min = one_infty_minimize(&lang, &inst).map_err(e)?;
        if min.supported.first_empty().is_some() {
            continue;
        }
        feasible += 1;
        let lifted = lift_instance(&lang, &inst, &min.supported).map_err(e)?;
        let blp_lift = blp_value(&lifted.lang, &lifted.inst).map_err(e)?.value;
        let blp_bar = blp_value(&min.lang, &min.inst).map_err(e)?.value;
        ensure!(
            blp_lift == blp_bar,
            "draw {attempts}: BLP(I') = {blp_lift}, BLP(minimal) = {blp_bar}"
        );
        let o_lift = brute_opt_with(&lifted.lang, &lifted.inst, &big)
            .map_err(e)?
            .value;
        let o_bar = brute_opt(&min.lang, &min.inst).map_err(e)?.value;
        let o = brute_opt(&lang, &inst).map_err(e)?.value;
        ensure!(
            o_lift == o_bar && o_bar == o,
            "draw {attempts}: Opt(I') = {o_lift}, Opt(minimal) = {o_bar}, Opt(I) = {o}"
        );
    }
    Ok(format!(
        "50 feasible instances ({attempts} draws), all three optima and both relaxations agree"
    ))
}

fn xor3() -> Operation {
    Operation::from_fn(2, 3, |x| (x[0] + x[1] + x[2]) % 2).unwrap()
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let (mut found, mut none) = (0, 0);
    for i in 0..30 {
        let nf = rng.gen_range(1..=2);
        let fs: Vec<CostFn> = (0..nf)
            .map(|j| {
                let arity = rng.gen_range(1..=2);
                random_function(&mut rng, &format!("f{j}"), arity, 2, 0.3)
            })
            .collect();
        let lang = lang_of(2, fs);
        for (m, class) in [
            (2, OpClass::All),
            (2, OpClass::Cyclic),
            (3, OpClass::Cyclic),
            (3, OpClass::Symmetric),
        ] {
            let rep = find_fracpol(&lang, m, class, None).map_err(e)?;
            ensure!(
                rep.outcome_verified(),
                "language {i}, m = {m}, {class}: LP outcome does not verify"
            );
            match &rep.fracop {
                Some(w) => {
                    ensure!(
                        verify_fracpol(w, &lang),
                        "language {i}, m = {m}, {class}: returned operation fails"
                    );
                    ensure!(
                        w.is_in_class(class),
                        "language {i}: returned operation outside {class}"
                    );
                    found += 1;
                }
                None => {
                    let cert = rep.certificate().ok_or("no operation and no certificate")?;
                    ensure!(
                        farkas_ok(&rep.lp, cert),
                        "language {i}, m = {m}, {class}: bad certificate"
                    );
                    none += 1;
                }
            }
        }
    }

    let neq = CostFn::crisp(
        "neq",
        2,
        3,
        tuple::all(3, 2).into_iter().filter(|t| t[0] != t[1]),
    )
    .unwrap();
    let mut lang = lang_of(3, [neq]);
    for d in 0..3 {
        lang.ensure_unary_subset(&[d]).map_err(e)?;
    }
    let rep = find_fracpol(&lang, 2, OpClass::Cyclic, None).map_err(e)?;
    ensure!(
        rep.fracop.is_none(),
        "disequality with constants admitted a cyclic binary operation"
    );
    let cert = rep.certificate().ok_or("disequality: no certificate")?;
    ensure!(
        farkas_ok(&rep.lp, cert),
        "disequality: certificate does not verify"
    );

    let (parity_lang, _) = parity();
    let even = CostFn::crisp(
        "even3",
        3,
        2,
        tuple::all(2, 3)
            .into_iter()
            .filter(|t| t.iter().sum::<usize>() % 2 == 0),
    )
    .unwrap();
    let mut parity_lang = parity_lang;
    parity_lang.insert(even).map_err(e)?;
    let x = xor3();
    let rep = find_fracpol(&parity_lang, 3, OpClass::Symmetric, Some(&x)).map_err(e)?;
    let w = rep.fracop.ok_or("parity: no symmetric arity-3 operation")?;
    ensure!(
        verify_fracpol(&w, &parity_lang),
        "parity: returned operation fails"
    );
    ensure!(w.contains(&x), "parity: support misses x+y+z mod 2");
    Ok(format!(
        "{found} operations verified, {none} certificates verified; disequality none; parity contains xor"
    ))
}

fn submodular_pairs(f: &CostFn) -> bool {
    let n = f.arity();
    let all = tuple::all(2, n);
    all.iter().all(|x| {
        all.iter().all(|y| {
            let lo: Vec<usize> = x.iter().zip(y).map(|(a, b)| *a.min(b)).collect();
            let hi: Vec<usize> = x.iter().zip(y).map(|(a, b)| *a.max(b)).collect();
            let v = |t: &[usize]| f.finite_value(t).cloned().expect("finite-valued");
            v(&lo) + v(&hi) <= v(x) + v(y)
        })
    })
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let half = FracOp::new([
        (Operation::min(2, 2).unwrap(), rat(1, 2)),
        (Operation::max(2, 2).unwrap(), rat(1, 2)),
    ])
    .map_err(e)?;
    let mut counts = [0usize; 2];
    for i in 0..100 {
        let vals: Vec<i64> = (0..4).map(|_| rng.gen_range(-6..=6)).collect();
        let f = CostFn::from_fn("f", 2, 2, |t| ExtRat::Finite(int(vals[t[0] * 2 + t[1]]))).unwrap();
        let expected = vals[1] + vals[2] >= vals[0] + vals[3];
        let got = verify_fracpol(&half, &lang_of(2, [f]));
        ensure!(
            got == expected,
            "binary table {i} {vals:?}: verify = {got}, inequality = {expected}"
        );
        counts[usize::from(expected)] += 1;
    }
    let mut ternary = [0usize; 2];
    for i in 0..60 {
        let f = if i % 2 == 0 {
            let vals: Vec<i64> = (0..8).map(|_| rng.gen_range(-6..=6)).collect();
            CostFn::from_fn("f", 3, 2, |t| ExtRat::Finite(int(vals[tuple::rank(t, 2)]))).unwrap()
        } else {
            // Sums of submodular binaries on coordinate pairs are submodular.
            let parts: Vec<(usize, usize, CostFn)> = [(0, 1), (1, 2), (0, 2)]
                .into_iter()
                .map(|(a, b)| (a, b, submodular_binary(&mut rng, "p", 1.0)))
                .collect();
            CostFn::from_fn("f", 3, 2, |t| {
                ExtRat::Finite(
                    parts
                        .iter()
                        .map(|(a, b, p)| p.finite_value(&[t[*a], t[*b]]).unwrap().clone())
                        .sum(),
                )
            })
            .unwrap()
        };
        let expected = submodular_pairs(&f);
        let got = verify_fracpol(&half, &lang_of(2, [f]));
        ensure!(
            got == expected,
            "ternary table {i}: verify = {got}, inequality = {expected}"
        );
        ternary[usize::from(expected)] += 1;
    }
    ensure!(
        counts[0] > 0 && counts[1] > 0,
        "binary sample is one-sided: {counts:?}"
    );
    ensure!(
        ternary[0] > 0 && ternary[1] > 0,
        "ternary sample is one-sided: {ternary:?}"
    );
    Ok(format!(
        "binary: {} submodular / {} not; ternary: {} / {}",
        counts[1], counts[0], ternary[1], ternary[0]
    ))
}

fn lp_kind(o: &LpOutcome) -> Oracle {
    match o {
        LpOutcome::Optimal { value, .. } => Oracle::Optimal(value.clone()),
        LpOutcome::Infeasible { .. } => Oracle::Infeasible,
        LpOutcome::Unbounded { .. } => Oracle::Unbounded,
    }
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let mut tally = [0usize; 3];
    for i in 0..500 {
        let lp = if i % 2 == 0 {
            random_lp(&mut rng, 6, 10, 0.25)
        } else {
            random_feasible_lp(&mut rng, 6, 10, 0.25)
        };
        let out = solve_lp(&lp).map_err(e)?;
        ensure!(verify_outcome(&lp, &out), "lp {i}: outcome does not verify");
        let expected = lp_oracle(&lp);
        let got = lp_kind(&out);
        ensure!(
            got == expected,
            "lp {i}: solver {got:?}, enumeration {expected:?}"
        );
        match &out {
            LpOutcome::Infeasible { farkas } => {
                ensure!(
                    farkas_ok(&lp, farkas),
                    "lp {i}: Farkas certificate fails the independent check"
                );
                tally[0] += 1;
            }
            LpOutcome::Unbounded { .. } => tally[1] += 1,
            LpOutcome::Optimal { .. } => tally[2] += 1,
        }
    }
    Ok(format!(
        "500 programs: {} infeasible, {} unbounded, {} optimal",
        tally[0], tally[1], tally[2]
    ))
}

fn sampled_functions(rng: &mut StdRng, gens: &GenFracOp, want: usize) -> Vec<CostFn> {
    let mut out = Vec::new();
    for attempt in 0..400 {
        if out.len() >= want {
            break;
        }
        let name = format!("s{attempt}");
        let f = match attempt % 3 {
            0 => submodular_binary(rng, &name, 0.5),
            1 => random_function(rng, &name, 1 + attempt % 2, 2, 0.2),
            _ => random_function(rng, &name, 3, 2, 0.4),
        };
        if verify_gen_fracpol(gens, &lang_of(2, [f.clone()])) {
            out.push(f);
        }
    }
    out
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let id = Operation::identity(2);
    let zero = Operation::constant(2, 1, 0).map_err(e)?;
    let lazy = FracOp::new([(id.clone(), rat(1, 2)), (zero, rat(1, 2))]).map_err(e)?;
    let sets = [
        ("min/max", min_max_generators(2).map_err(e)?),
        (
            "swap",
            generators_from_symmetric(&FracOp::point_mass(id)).map_err(e)?,
        ),
        (
            "half identity half zero",
            generators_from_symmetric(&lazy).map_err(e)?,
        ),
    ];
    let mut summary = Vec::new();
    for (label, gens) in sets {
        let graph = build_graph(&gens, Caps::default().graph_nodes).map_err(e)?;
        ensure!(graph.check_closure(), "{label}: closure fails");
        for n in 1..=3 {
            ensure!(
                graph.check_fixed_points(n).map_err(e)?,
                "{label}: fixed points fail for n = {n}"
            );
        }
        let st = graph.stationary_lambda().map_err(e)?;
        ensure!(
            verify_outcome(&st.lp, &st.outcome),
            "{label}: stationary LP outcome does not verify"
        );
        ensure!(
            graph
                .stationarity_residual(&st)
                .iter()
                .all(|r| *r == int(0)),
            "{label}: stationary residual is nonzero"
        );
        let fs = sampled_functions(&mut rng, &gens, 12);
        ensure!(
            fs.len() >= 6,
            "{label}: only {} sampled functions admit the generators",
            fs.len()
        );
        let mut balanced = 0;
        for f in &fs {
            ensure!(
                graph.check_plateau(f).map_err(e)?.is_some(),
                "{label}: plateau fails for {}",
                f.name()
            );
            if verify_generators_strong(&gens, &lang_of(2, [f.clone()])) {
                ensure!(
                    graph.check_lambda_balanced(&st, f).map_err(e)?.is_some(),
                    "{label}: weighted rows differ for {}",
                    f.name()
                );
                balanced += 1;
            }
        }
        let lang = lang_of(2, fs.iter().cloned());
        let all: BTreeSet<usize> = (0..graph.len()).collect();
        let sinks: BTreeSet<usize> = graph.sink_nodes().into_iter().collect();
        for (target, rounds) in [(all, 0), (sinks, 3)] {
            let ex = graph.expand_support(&target, rounds).map_err(e)?;
            for (step, rho) in ex.trace.iter().enumerate() {
                ensure!(
                    rho.total() == int(1),
                    "{label}: step {step} has mass {}",
                    rho.total()
                );
                ensure!(
                    verify_gen_fracpol(rho, &lang),
                    "{label}: step {step} fails the inequality"
                );
            }
        }
        summary.push(format!(
            "{label}: {} nodes, {} functions ({balanced} balanced)",
            graph.len(),
            fs.len()
        ));
    }
    Ok(summary.join("; "))
}

fn zero_fn(name: &str, arity: usize, k: usize) -> CostFn {
    CostFn::from_fn(name, arity, k, |_| ExtRat::Finite(int(0))).unwrap()
}

fn table(name: &str, arity: usize, k: usize, f: impl Fn(&[usize]) -> Option<i64>) -> CostFn {
    CostFn::from_fn(name, arity, k, |t| {
        f(t).map_or(ExtRat::Infinity, |v| ExtRat::Finite(int(v)))
    })
    .unwrap()
}

fn with_constants(mut lang: Language) -> Language {
    for d in 0..lang.domain_size() {
        lang.ensure_unary_subset(&[d]).unwrap();
    }
    lang
}

fn core_suite() -> Vec<(&'static str, Language)> {
    let neq = |k| table("neq", 2, k, |t| (t[0] != t[1]).then_some(0));
    let le = |k| table("le", 2, k, |t| (t[0] <= t[1]).then_some(0));
    let absdiff = |k| table("abs", 2, k, |t| Some((t[0] as i64 - t[1] as i64).abs()));
    vec![
        ("zero unary k2", lang_of(2, [zero_fn("z", 1, 2)])),
        ("zero unary k3", lang_of(3, [zero_fn("z", 1, 3)])),
        ("zero binary k3", lang_of(3, [zero_fn("z", 2, 3)])),
        (
            "soft unary k2",
            lang_of(2, [table("u", 1, 2, |t| Some(t[0] as i64))]),
        ),
        (
            "soft unary k3",
            lang_of(3, [table("u", 1, 3, |t| Some([2, 1, 3][t[0]]))]),
        ),
        (
            "tie unary k3",
            lang_of(3, [table("u", 1, 3, |t| Some([0, 0, 5][t[0]]))]),
        ),
        ("disequality k2", lang_of(2, [neq(2)])),
        ("disequality k3", lang_of(3, [neq(3)])),
        (
            "disequality k3 constants",
            with_constants(lang_of(3, [neq(3)])),
        ),
        ("order k3", lang_of(3, [le(3)])),
        ("order k3 constants", with_constants(lang_of(3, [le(3)]))),
        ("abs difference k3", lang_of(3, [absdiff(3)])),
        (
            "abs difference k3 soft",
            lang_of(3, [absdiff(3), table("u", 1, 3, |t| Some([3, 0, 1][t[0]]))]),
        ),
        (
            "equality k3",
            lang_of(3, [table("eq", 2, 3, |t| (t[0] == t[1]).then_some(0))]),
        ),
        ("parity k2", parity().0),
        ("parity k2 constants", with_constants(parity().0)),
        (
            "horn k2",
            lang_of(2, [table("h", 3, 2, |t| (t != [1, 1, 0]).then_some(0))]),
        ),
        (
            "submodular k2",
            lang_of(
                2,
                [table("f", 2, 2, |t| Some([0, 3, 1, 2][t[0] * 2 + t[1]]))],
            ),
        ),
        ("subset unary k3", {
            let mut l = lang_of(3, [zero_fn("z", 1, 3)]);
            l.ensure_unary_subset(&[1, 2]).unwrap();
            l
        }),
        ("restricted order k3", {
            let mut l = lang_of(3, [le(3)]);
            l.ensure_unary_subset(&[0, 2]).unwrap();
            l
        }),
        (
            "one-in-three k2",
            lang_of(
                2,
                [table("t", 3, 2, |t| {
                    (t.iter().sum::<usize>() == 1).then_some(0)
                })],
            ),
        ),
        (
            "soft cycle k3",
            lang_of(
                3,
                [table("c", 2, 3, |t| {
                    Some(i64::from((t[0] + 1) % 3 != t[1]))
                })],
            ),
        ),
        (
            "constant zero with pair k3",
            lang_of(
                3,
                [table("p", 2, 3, |t| (t[0] == 0 || t[1] == 0).then_some(0))],
            ),
        ),
    ]
}

fn criterion_9() -> Outcome {
    let suite = core_suite();
    ensure!(
        suite.len() >= 20,
        "suite has only {} languages",
        suite.len()
    );
    for (name, lang) in &suite {
        let once = rigid_core(lang).map_err(e)?;
        let twice = rigid_core(&once.lang).map_err(e)?;
        let k = once.lang.domain_size();
        ensure!(
            twice.subdomain == (0..k).collect::<Vec<_>>(),
            "{name}: second pass shrinks the domain again"
        );
        ensure!(
            twice.lang == once.lang,
            "{name}: second pass changes the language"
        );
    }
    let zero = rigid_core(&lang_of(2, [zero_fn("z", 1, 2)])).map_err(e)?;
    ensure!(
        zero.subdomain == vec![0],
        "constant-zero language core is {:?}",
        zero.subdomain
    );
    let mut preserved = 0;
    for (name, lang) in suite.iter().filter(|(n, _)| n.ends_with("constants")) {
        let core = rigid_core(lang).map_err(e)?;
        let k = lang.domain_size();
        ensure!(
            core.subdomain == (0..k).collect::<Vec<_>>(),
            "{name}: domain not preserved"
        );
        preserved += 1;
    }
    Ok(format!(
        "{} languages idempotent; constant-zero collapses to one label; {preserved} languages with constants keep their domain",
        suite.len()
    ))
}

fn report(id: u32, title: &str, budget: Duration, elapsed: Duration, outcome: &Outcome) -> bool {
    let secs = elapsed.as_secs_f64();
    let (ok, detail) = match outcome {
        Ok(d) if elapsed <= budget => (true, d.clone()),
        Ok(d) => (
            false,
            format!("{d}; took {secs:.2}s, budget {}s", budget.as_secs()),
        ),
        Err(d) => (false, d.clone()),
    };
    println!(
        "{} criterion {id} ({title}): {detail} [{secs:.2}s]",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() {
    let mut all = true;
    let ((c1, c6), t1) = timed(criteria_1_and_6);
    all &= report(
        1,
        "optimum equals relaxation of the minimal instance",
        Duration::from_secs(120),
        t1,
        &c1,
    );
    let (c2, t) = timed(criterion_2);
    all &= report(2, "parity gap witness", Duration::from_secs(1), t, &c2);
    let (c3, t) = timed(criterion_3);
    all &= report(
        3,
        "lifting correspondence",
        Duration::from_secs(120),
        t,
        &c3,
    );
    let (c4, t) = timed(criterion_4);
    all &= report(4, "analyzer soundness", Duration::from_secs(30), t, &c4);
    let (c5, t) = timed(criterion_5);
    all &= report(
        5,
        "submodular characterization",
        Duration::from_secs(10),
        t,
        &c5,
    );
    all &= report(6, "certified solving", Duration::from_secs(120), t1, &c6);
    let (c7, t) = timed(criterion_7);
    all &= report(7, "exact LP engine", Duration::from_secs(60), t, &c7);
    let (c8, t) = timed(criterion_8);
    all &= report(
        8,
        "operation-graph properties",
        Duration::from_secs(60),
        t,
        &c8,
    );
    let (c9, t) = timed(criterion_9);
    all &= report(9, "rigid core", Duration::from_secs(30), t, &c9);
    if !all {
        std::process::exit(1);
    }
}
