//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if a criterion outside `KNOWN_SHORTFALLS` fails.
//!
//! `cargo test --test acceptance -- 3 5` runs only the listed criteria.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use sp_covers::covers::{
    enumerate_covers_bruteforce, enumerate_covers_bruteforce_with_cap, enumerate_covers_sat, is_cover,
    CoverEnumeration, CoverKind, GeneralizedAssignment, Value,
};
use sp_covers::experiments::{
    run_decimation_bench, run_peeling, run_transition, BenchSpec, PeelingSpec, TransitionSpec,
};
use sp_covers::formula::{generate_random_3sat, generate_random_tree, sub_seed, FactorGraph, Formula};
use sp_covers::pipelines::{cover_marginals_of, exact_solution_marginals, sp_marginals};
use sp_covers::propagation::{
    cover_bp_update, plain_bp_marginals, plain_bp_run, sp_run, sp_update, CoverBpState, Init, RunConfig, SpState,
};
use sp_covers::solver::UNLIMITED;

/// Criteria expected to fail; see the decisions ledger.
const KNOWN_SHORTFALLS: &[usize] = &[3, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Cover test written straight from the definition, independent of the
/// library's checker.
fn naive_is_cover(f: &Formula, s: &GeneralizedAssignment) -> bool {
    let val = |l: sp_covers::formula::Lit| match s.get(l.var()) {
        Value::Star => None,
        v => Some((v == Value::One) == l.is_positive()),
    };
    let clauses_ok = f
        .clauses()
        .iter()
        .all(|c| c.iter().any(|&l| val(l) == Some(true)) || c.iter().filter(|&&l| val(l).is_none()).count() >= 2);
    let supported = (0..f.num_vars()).all(|x| {
        s.get(x) == Value::Star
            || f.clauses().iter().any(|c| {
                c.iter().any(|&l| l.var() == x && val(l) == Some(true))
                    && c.iter().all(|&l| l.var() == x || val(l) == Some(false))
            })
    });
    clauses_ok && supported
}

fn naive_covers(f: &Formula) -> Vec<String> {
    let n = f.num_vars();
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let vals = (0..n).map(|i| [Value::Zero, Value::One, Value::Star][code / 3usize.pow(i as u32) % 3]).collect();
        let s = GeneralizedAssignment::new(vals);
        if naive_is_cover(f, &s) {
            out.push(s.to_string());
        }
    }
    out.sort();
    out
}

fn listing(e: &CoverEnumeration) -> Vec<(String, CoverKind)> {
    let mut v: Vec<_> = e.covers.iter().map(|c| (c.assignment.to_string(), c.kind)).collect();
    v.sort();
    v
}

fn worked_example() -> Outcome {
    let t = Instant::now();
    let f = Formula::from_dimacs_clauses(3, &[&[1, -2, -3], &[-1, 2, -3], &[-1, -2, 3]]).unwrap();
    let brute = enumerate_covers_bruteforce(&f).unwrap();
    let sat = enumerate_covers_sat(&f, usize::MAX, UNLIMITED).unwrap();
    let want = vec!["***".to_string(), "111".to_string()];
    let names = |e: &CoverEnumeration| listing(e).into_iter().map(|(s, _)| s).collect::<Vec<_>>();
    let hundred = GeneralizedAssignment::parse("100").unwrap();
    let rejects = !is_cover(&f, &hundred) && !naive_is_cover(&f, &hundred);
    let secs = t.elapsed().as_secs_f64();
    let pass = names(&brute) == want && names(&sat) == want && naive_covers(&f) == want && rejects && secs < 1.0;
    outcome(
        pass,
        format!("brute={:?} sat={:?} 100_rejected={rejects} elapsed={secs:.3}s (limit 1s)", names(&brute), names(&sat)),
    )
}

fn tree_laws() -> Outcome {
    const SEED: u64 = 0x7ee5;
    let mut only_trivial = 0;
    let mut sp_zero = 0;
    let mut bp_close = 0;
    let mut worst_bp = 0.0f64;
    let mut worst_eta = 0.0f64;
    let total = 200;
    for i in 0..total {
        let n = 2 + i % 19;
        let f = generate_random_tree(n, sub_seed(SEED, i as u64)).unwrap();
        assert!(!f.has_unit_clause());
        let g = FactorGraph::new(&f);
        assert!(g.is_forest());

        let e = enumerate_covers_bruteforce_with_cap(&f, 20).unwrap();
        if e.covers.len() == 1 && e.covers[0].assignment.is_trivial() {
            only_trivial += 1;
        }

        let mut all_zero = true;
        for k in 0..10u64 {
            let cfg = RunConfig {
                init: Init::Random(sub_seed(SEED ^ 0x5b, (i * 10) as u64 + k)),
                epsilon: 1e-12,
                max_iters: 1000,
                damping: 0.0,
            };
            let run = sp_run(&g, &cfg).unwrap();
            let max_eta = run.state.eta.iter().fold(0.0f64, |a, &b| a.max(b));
            worst_eta = worst_eta.max(max_eta);
            all_zero &= run.converged() && max_eta <= 1e-12;
        }
        sp_zero += all_zero as usize;

        let cfg = RunConfig {
            init: Init::Random(sub_seed(SEED ^ 0xb9, i as u64)),
            epsilon: 1e-15,
            max_iters: 1000,
            damping: 0.0,
        };
        let run = plain_bp_run(&g, &cfg).unwrap();
        let bp = plain_bp_marginals(&g, &run.state).unwrap();
        let exact = exact_solution_marginals(&f).unwrap();
        let gap = bp.rows.iter().zip(&exact.rows).map(|(a, b)| (a.p_plus - b.p_plus).abs()).fold(0.0f64, f64::max);
        worst_bp = worst_bp.max(gap);
        bp_close += (gap <= 1e-9) as usize;
    }
    let pass = only_trivial == total && sp_zero == total && bp_close == total;
    outcome(
        pass,
        format!(
            "{total} trees n<=20: only-trivial {only_trivial}/{total}, SP->0 from 10 inits {sp_zero}/{total} \
             (max eta {worst_eta:.1e}), BP within 1e-9 {bp_close}/{total} (max gap {worst_bp:.1e})"
        ),
    )
}

fn sp_equals_cover_bp() -> Outcome {
    const SEED: u64 = 0x5bb9;
    let alphas = [2.0, 3.0, 4.2];
    let mut within = [0usize; 3];
    let mut drawn = [0usize; 3];
    let mut failures = Vec::new();
    for i in 0..100u64 {
        let k = (i % 3) as usize;
        let m = (alphas[k] * 30.0f64).round() as usize;
        let f = generate_random_3sat(30, m, sub_seed(SEED, i)).unwrap();
        let g = FactorGraph::new(&f);
        let eta0 = Init::Random(sub_seed(SEED ^ 1, i)).values(g.num_edges()).unwrap();
        let mut sp = SpState::new(eta0.clone());
        let mut bp = CoverBpState::matched(&eta0, sub_seed(SEED ^ 2, i));
        let mut first_bad = None;
        let mut max_gap = 0.0f64;
        let mut gap_at_1 = 0.0;
        for sweep in 1..=100 {
            sp = sp_update(&g, &sp, 0.0).unwrap();
            bp = cover_bp_update(&g, &bp).unwrap();
            let gap = sp.eta.iter().zip(bp.eta()).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
            if sweep == 1 {
                gap_at_1 = gap;
            }
            max_gap = max_gap.max(gap);
            if gap > 1e-12 && first_bad.is_none() {
                first_bad = Some(sweep);
            }
        }
        drawn[k] += 1;
        match first_bad {
            None => within[k] += 1,
            Some(s) => failures.push(format!(
                "a={} #{i}: first>1e-12 at sweep {s}, sweep-1 gap {gap_at_1:.1e}, max {max_gap:.1e}, final residual {:.1e}",
                alphas[k], sp.residual
            )),
        }
    }
    for line in &failures {
        println!("      {line}");
    }
    let ok: usize = within.iter().sum();
    outcome(
        ok == 100,
        format!(
            "edge-for-edge within 1e-12 for 100 sweeps: {ok}/100 (alpha 2: {}/{}, 3: {}/{}, 4.2: {}/{})",
            within[0], drawn[0], within[1], drawn[1], within[2], drawn[2]
        ),
    )
}

fn oracle_cross_check() -> Outcome {
    const SEED: u64 = 0x0c4c;
    let t = Instant::now();
    let mut agree = 0;
    let mut independent = 0;
    let mut total_covers = 0;
    for i in 0..200u64 {
        let n = 3 + (i % 10) as usize;
        let alpha = 1.0 + 5.0 * i as f64 / 199.0;
        let m = ((alpha * n as f64).round() as usize).max(1);
        let f = generate_random_3sat(n, m, sub_seed(SEED, i)).unwrap();
        let brute = enumerate_covers_bruteforce(&f).unwrap();
        let sat = enumerate_covers_sat(&f, usize::MAX, UNLIMITED).unwrap();
        if sat.complete && listing(&brute) == listing(&sat) {
            agree += 1;
        }
        if brute.covers.iter().all(|c| naive_is_cover(&f, &c.assignment)) {
            independent += 1;
        }
        total_covers += brute.covers.len();
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        agree == 200 && independent == 200 && secs < 600.0,
        format!(
            "sat == brute on {agree}/200 (n 3..12, alpha 1..6, {total_covers} covers), \
             definition check {independent}/200, elapsed {secs:.1}s (limit 600s)"
        ),
    )
}

fn phase_transition() -> Outcome {
    let t = Instant::now();
    let low = run_transition(&TransitionSpec {
        n: 50,
        alphas: vec![1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.25],
        formulas_per_point: 200,
        seed: 0xf162,
        ..Default::default()
    })
    .unwrap();
    for r in &low.rows {
        println!(
            "      n=50 alpha={:.2} p={:.3} [{:.3}, {:.3}] complete={} incomplete={} discarded={}",
            r.alpha, r.p_nontrivial, r.ci_low, r.ci_high, r.complete, r.incomplete, r.discarded_unsat
        );
    }
    let crossing = low.crossing();
    let cross_ok = crossing.is_some_and(|a| (2.0..=3.0).contains(&a));
    let full_points = low.rows.iter().all(|r| r.complete == 200);

    let peak = run_transition(&TransitionSpec {
        n: 90,
        alphas: vec![4.2],
        formulas_per_point: 30,
        seed: 0xf290,
        ..Default::default()
    })
    .unwrap();
    let r = &peak.rows[0];
    let count_ok = r.complete > 0 && (8.0 / 3.0..=24.0).contains(&r.mean_nontrivial);
    let false_ok = r.complete > 0 && r.mean_false <= 4.0;
    outcome(
        cross_ok && full_points && count_ok && false_ok,
        format!(
            "n=50 crossing at alpha={} (want [2, 3], all points 200 complete: {full_points}); \
             n=90 alpha=4.2 over {} formulas: mean non-trivial {:.2} (want [2.67, 24]), mean false {:.2} (want <= 4); \
             elapsed {:.0}s",
            crossing.map_or("none".into(), |a| format!("{a:.3}")),
            r.complete,
            r.mean_nontrivial,
            r.mean_false,
            t.elapsed().as_secs_f64()
        ),
    )
}

fn convergence_scale() -> Outcome {
    const SEED: u64 = 0xc0a5;
    let mut sp_ok = 0;
    let mut bp_stuck = 0;
    let mut sp_iters = Vec::new();
    let mut bp_iters = Vec::new();
    for i in 0..5u64 {
        let f = generate_random_3sat(5000, 21_000, sub_seed(SEED, i)).unwrap();
        let g = FactorGraph::new(&f);
        let sp = sp_run(&g, &RunConfig { max_iters: 300, ..RunConfig::sp().with_seed(sub_seed(SEED ^ 1, i)) }).unwrap();
        sp_ok += sp.converged() as usize;
        sp_iters.push(if sp.converged() { sp.state.iterations.to_string() } else { ">300".into() });
        let bp = plain_bp_run(&g, &RunConfig::bp().with_seed(sub_seed(SEED ^ 2, i))).unwrap();
        bp_stuck += !bp.converged() as usize;
        bp_iters.push(if bp.converged() { bp.state.iterations.to_string() } else { ">10000".into() });
    }
    outcome(
        sp_ok >= 4 && bp_stuck >= 3,
        format!(
            "SP converged within 300 on {sp_ok}/5 (iters {}); BP unconverged at 10000 on {bp_stuck}/5 (iters {})",
            sp_iters.join(","),
            bp_iters.join(",")
        ),
    )
}

fn decimation() -> Outcome {
    let bench = run_decimation_bench(&BenchSpec::default()).unwrap();
    let in_time =
        bench.rows.iter().filter(|r| r.verified && r.seconds <= Duration::from_secs(600).as_secs_f64()).count();
    let rows: Vec<String> =
        bench.rows.iter().map(|r| format!("{}:{}/{:.0}s", r.instance, r.status.label(), r.seconds)).collect();
    outcome(in_time >= 4, format!("verified within 10 min: {in_time}/{} ({})", bench.rows.len(), rows.join(" ")))
}

/// Random n = 50, alpha = 4.2 instances with a non-trivial cover, with
/// their exact solution, cover (non-trivial) and SP magnetizations.
struct Instance {
    solution: Vec<f64>,
    cover: Vec<f64>,
    /// Diagnostics: all covers including the trivial one, and true covers only.
    with_trivial: Vec<f64>,
    true_only: Option<Vec<f64>>,
    sp: Option<Vec<f64>>,
}

fn cover_instances(want: usize) -> (Vec<Instance>, usize) {
    const SEED: u64 = 0xc04e;
    let mut out = Vec::new();
    let mut draws = 0;
    while out.len() < want && draws < 20 * want {
        let f = generate_random_3sat(50, 210, sub_seed(SEED, draws as u64)).unwrap();
        draws += 1;
        let Ok(solution) = exact_solution_marginals(&f) else { continue };
        let e = enumerate_covers_sat(&f, usize::MAX, UNLIMITED).unwrap();
        assert!(e.complete);
        if e.num_non_trivial() == 0 {
            continue;
        }
        let cover = cover_marginals_of(50, &e, false);
        let mut truths = e.clone();
        truths.covers.retain(|c| c.kind == CoverKind::True);
        // a contradiction counts as no usable survey, like non-convergence
        let sp = sp_marginals(&f, &RunConfig::sp().with_seed(sub_seed(SEED ^ 1, draws as u64)))
            .ok()
            .filter(|(t, _)| t.complete)
            .map(|(t, _)| t.magnetization());
        out.push(Instance {
            solution: solution.magnetization(),
            cover: cover.magnetization(),
            with_trivial: cover_marginals_of(50, &e, true).magnetization(),
            true_only: (!truths.covers.is_empty()).then(|| cover_marginals_of(50, &truths, false).magnetization()),
            sp,
        });
    }
    (out, draws)
}

/// `(extreme, agreeing, opposite)` over variables with `|cover m| >= 0.99`.
fn sign_agreement<'a>(pairs: impl Iterator<Item = (&'a [f64], &'a [f64])>) -> (usize, usize, usize) {
    let (mut extreme, mut agree, mut opposite) = (0, 0, 0);
    for (cover, solution) in pairs {
        for (c, s) in cover.iter().zip(solution) {
            if c.abs() >= 0.99 {
                extreme += 1;
                agree += (c * s > 0.0) as usize;
                opposite += (c * s < 0.0) as usize;
            }
        }
    }
    (extreme, agree, opposite)
}

fn conservativeness(inst: &[Instance], draws: usize) -> Outcome {
    let (extreme, agree, opposite) = sign_agreement(inst.iter().map(|i| (&i.cover[..], &i.solution[..])));
    let (ext_all, agree_all, _) = sign_agreement(inst.iter().map(|i| (&i.with_trivial[..], &i.solution[..])));
    let (ext_true, agree_true, _) =
        sign_agreement(inst.iter().filter_map(|i| i.true_only.as_ref().map(|t| (&t[..], &i.solution[..]))));
    let frac = agree as f64 / extreme.max(1) as f64;
    println!(
        "      trivial cover included: {agree_all}/{ext_all} agree; true covers only: {agree_true}/{ext_true} agree"
    );
    outcome(
        inst.len() >= 100 && extreme > 0 && frac >= 0.95,
        format!(
            "{} instances with non-trivial covers ({draws} draws); |m_cover|>=0.99 (non-trivial covers) on {extreme} \
             variables, solution sign agrees on {agree} ({:.1}%, want >= 95%), opposite on {opposite}",
            inst.len(),
            100.0 * frac
        ),
    )
}

fn sp_extremes(inst: &[Instance]) -> Outcome {
    let mut extreme = 0;
    let mut agree = 0;
    let mut unconverged = 0;
    for i in inst {
        let Some(sp) = &i.sp else {
            unconverged += 1;
            continue;
        };
        for (s, c) in sp.iter().zip(&i.cover) {
            if s.abs() >= 0.9 {
                extreme += 1;
                agree += (s * c > 0.0) as usize;
            }
        }
    }
    let frac = agree as f64 / extreme.max(1) as f64;
    outcome(
        inst.len() >= 100 && extreme > 0 && frac >= 0.9,
        format!(
            "|m_SP|>=0.9 on {extreme} variables over {} converged SP runs ({unconverged} unconverged or contradictory skipped), \
             cover sign agrees on {agree} ({:.1}%, want >= 90%)",
            inst.len() - unconverged,
            100.0 * frac
        ),
    )
}

fn peeling() -> Outcome {
    let t = Instant::now();
    let p = run_peeling(&PeelingSpec {
        n: 1000,
        alpha: 4.2,
        samples: 200,
        formulas: 10,
        seed: 0x9ee1,
        ..Default::default()
    })
    .unwrap();
    let monotone = p.traces.iter().filter(|t| t.monotone()).count();
    let covers = p.traces.iter().filter(|t| t.cover_ok).count();
    let trivial = p.trivial();
    let total = p.traces.len();
    outcome(
        total == 2000 && monotone == total && covers == total,
        format!(
            "{total}/2000 traces: monotone {monotone}, terminal covers {covers}; split trivial {trivial} ({:.1}%) / \
             non-trivial {} ({:.1}%); sampler failures {}, discarded draws {}; elapsed {:.0}s",
            100.0 * trivial as f64 / total.max(1) as f64,
            total - trivial,
            100.0 * (total - trivial) as f64 / total.max(1) as f64,
            p.sampler_failures,
            p.discarded,
            t.elapsed().as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |c: usize| selected.is_empty() || selected.contains(&c);

    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut run = |c: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        if !wanted(c) {
            return;
        }
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        println!("{} criterion {c} ({name}): {} [{secs:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((c, name, o, secs));
    };

    run(1, "worked example", &mut worked_example);
    run(2, "tree laws", &mut tree_laws);
    run(3, "SP equals cover BP", &mut sp_equals_cover_bp);
    run(4, "SAT vs brute-force covers", &mut oracle_cross_check);
    run(5, "phase transition", &mut phase_transition);
    run(6, "convergence at n=5000", &mut convergence_scale);
    run(7, "decimation", &mut decimation);
    if wanted(8) || wanted(9) {
        let (inst, draws) = cover_instances(100);
        run(8, "conservativeness", &mut || conservativeness(&inst, draws));
        run(9, "SP extremes", &mut || sp_extremes(&inst));
    }
    run(10, "peeling", &mut peeling);

    let unexpected: Vec<usize> =
        results.iter().filter(|(c, _, o, _)| !o.pass && !KNOWN_SHORTFALLS.contains(c)).map(|r| r.0).collect();
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("acceptance: {passed}/{} passed; known shortfalls {KNOWN_SHORTFALLS:?}", results.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
