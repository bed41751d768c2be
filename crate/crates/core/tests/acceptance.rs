//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines reach stdout in order.
//! Exits nonzero when a criterion's outcome differs from the expected one.
//! Every criterion is expected to pass except those in `KNOWN_FAILURES`,
//! which are still computed in full and must still fail as recorded.

use std::f64::consts::LN_2;
use std::io::Write;
use std::time::{Duration, Instant};

use nlgap_core::certifier::encode::{binary_encode, BinaryField};
use nlgap_core::certifier::{certify_mode, CertInput, ParamMode};
use nlgap_core::constants::{eval_constant, identity_checks, poincare_gamma, ConstParams, ConstantId};
use nlgap_core::expansion::{
    partA_check_exact, partA_check_sampled, partA_fit_alpha, partB_check_exact, ExpanParams, Outcome, Witness,
};
use nlgap_core::graph::{ball, named, RegularGraph};
use nlgap_core::norms::{cotype_constant_exact, prop33_check, RestrictedFamily, UncondNorm};
use nlgap_core::poincare::{gamma_search, PoincareQuery, SearchOptions, VectorField};
use nlgap_core::random_graphs::{lemma52_bound, lemma52_montecarlo, sample_pairing, is_simple, collapse, sample_simple_regular};
use nlgap_core::rng::RngState;
use nlgap_core::spectral::{cheeger_sandwich_check, dense_summary, friedman_check, walk_sum_bound_check};
use nlgap_core::LogScalar;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

/// Criteria expected to fail, with the reason on record.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    10,
    "4/c′ = Π does not hold as an equality: with the stated c′, ĉ and L̃ one gets 4/c′ < Π (by 2^12 or more)",
)];

struct Verdict {
    pass: bool,
    /// For a known failure: whether everything besides the recorded defect holds.
    rest_holds: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, rest_holds: pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

/// Seeded simple d-regular graph that is connected.
fn connected_sample(n: usize, d: usize, seed: &RngState) -> RegularGraph {
    let mut rng = seed.rng();
    loop {
        let g = sample_simple_regular(n, d, &mut rng, None).unwrap().graph;
        if g.is_connected() {
            return g;
        }
    }
}

fn friedman_sample(n: usize, d: usize, seed: &RngState) -> (RegularGraph, f64) {
    let mut rng = seed.rng();
    loop {
        let g = sample_simple_regular(n, d, &mut rng, None).unwrap().graph;
        let f = friedman_check(&g, 0.0).unwrap();
        if f.passes_strong {
            return (g, f.lambda);
        }
    }
}

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let chunk = items.len().div_ceil(jobs).max(1);
    let f = &f;
    std::thread::scope(|s| {
        let hs: Vec<_> = items.chunks(chunk).map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<U>>())).collect();
        hs.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}

// 1. Annealed scalar gap against d/(d − λ2).
fn scalar_poincare_oracle() -> Verdict {
    let t = Instant::now();
    let base = RngState::new(1001);
    let mut graphs = vec![named::complete(4), named::petersen(), named::complete_bipartite(3)];
    for i in 0..20u64 {
        let mut rng = base.split(i).rng();
        let n = 2 * rng.gen_range(2..=7);
        graphs.push(connected_sample(n, 3, &base.split(100 + i)));
    }
    let opts = SearchOptions::with_budget(100_000);
    let errs = par_map(&graphs.iter().enumerate().collect::<Vec<_>>(), |(i, g)| {
        let s = dense_summary(g).unwrap();
        let exact = g.d() as f64 / (g.d() as f64 - s.lambda2);
        let found = gamma_search(g, &PoincareQuery::scalar_l2(), 1, &opts, base.split(500 + *i as u64)).unwrap();
        (found.ratio - exact).abs()
    });
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    let el = t.elapsed();
    verdict(
        worst <= 1e-4 && within(el, 60),
        format!("{} graphs, max |search − d/(d−λ2)| = {worst:.2e} (tol 1e-4), {:.1}s (limit 60s)", graphs.len(), el.as_secs_f64()),
    )
}

// 2. Configuration-model simplicity rate at d = 3, n = 100.
fn simplicity_rate() -> Verdict {
    let t = Instant::now();
    let mut rng = RngState::new(2002).rng();
    let trials = 10_000;
    let simple = (0..trials).filter(|_| is_simple(&collapse(&sample_pairing(100, 3, &mut rng).unwrap()))).count();
    let rate = simple as f64 / trials as f64;
    let el = t.elapsed();
    verdict(
        (0.105..=0.165).contains(&rate) && within(el, 30),
        format!("rate {rate:.4} over {trials} (window [0.105, 0.165], e^-2 = {:.4}), {:.1}s (limit 30s)", (-2f64).exp(), el.as_secs_f64()),
    )
}

// 3. λ(G) <= 2.1√5 on G(1000, 6).
fn friedman_desk_scale() -> Verdict {
    let t = Instant::now();
    let base = RngState::new(3003);
    let idx: Vec<u64> = (0..100).collect();
    let passes = par_map(&idx, |&i| {
        let g = sample_simple_regular(1000, 6, &mut base.split(i).rng(), None).unwrap().graph;
        friedman_check(&g, 0.0).unwrap().passes_strong
    });
    let count = passes.iter().filter(|&&p| p).count();
    let el = t.elapsed();
    verdict(
        count >= 95 && within(el, 300),
        format!("{count}/100 with λ(G) <= 2.1√5 = {:.4} (need 95), {:.1}s (limit 300s)", 2.1 * 5f64.sqrt(), el.as_secs_f64()),
    )
}

// 4. Cheeger sandwich with exact h.
fn cheeger_sandwich() -> Verdict {
    let base = RngState::new(4004);
    let mut violations = 0;
    let mut inexact = 0;
    for i in 0..100u64 {
        let mut rng = base.split(i).rng();
        let n = 2 * rng.gen_range(2..=7);
        let g = sample_simple_regular(n, 3, &mut rng, None).unwrap().graph;
        let c = cheeger_sandwich_check(&g).unwrap();
        if !c.h_exact {
            inexact += 1;
        }
        if !c.holds() || c.lower_holds != Some(true) {
            violations += 1;
        }
    }
    verdict(violations == 0 && inexact == 0, format!("100 graphs, {violations} violations, {inexact} without exact h"))
}

fn ball_witness_valid(g: &RegularGraph, w: &Option<Witness>) -> bool {
    match w {
        Some(Witness::BallTooSmall { set, radius, ball: b, threshold }) => {
            let direct = ball(g, set, *radius as i64).unwrap().len();
            direct == *b && !threshold.count_meets(direct)
        }
        _ => false,
    }
}

// 5. Sampled part A never contradicts exact part A; witnesses re-validate.
fn expansion_checkers_agree() -> Verdict {
    let base = RngState::new(5005);
    let mut graphs = vec![
        named::complete(4),
        named::complete(6),
        named::complete_bipartite(3),
        named::petersen(),
        named::disjoint_copies(&named::complete(4), 2),
        named::disjoint_copies(&named::complete_bipartite(3), 2),
        named::circulant(12, &[1, 2]),
    ];
    for i in 0..20u64 {
        let mut rng = base.split(i).rng();
        let d = rng.gen_range(3..=4);
        let n = loop {
            let n = rng.gen_range(d + 1..=12);
            if n * d % 2 == 0 {
                break n;
            }
        };
        graphs.push(sample_simple_regular(n, d, &mut rng, None).unwrap().graph);
    }
    let (mut runs, mut contradictions, mut exact_fails, mut bad_witness) = (0, 0, 0, 0);
    for (gi, g) in graphs.iter().enumerate() {
        let fit = partA_fit_alpha(g).unwrap();
        let alphas = [
            nlgap_core::constants::paper_alpha(g.d()),
            fit.min(LogScalar::ONE),
            (fit * LogScalar::from(2.0)).min(LogScalar::ONE),
            LogScalar::ONE,
        ];
        for (ai, &alpha) in alphas.iter().enumerate() {
            if !alpha.is_positive() {
                continue;
            }
            runs += 1;
            let exact = partA_check_exact(g, alpha).unwrap();
            let mut rng = base.split(1000 + (gi * 4 + ai) as u64).rng();
            let sampled = partA_check_sampled(g, alpha, 300, &mut rng).unwrap();
            if exact.outcome == Outcome::Pass && sampled.outcome == Outcome::Fail {
                contradictions += 1;
            }
            if exact.outcome == Outcome::Fail {
                exact_fails += 1;
                if !ball_witness_valid(g, &exact.witness) {
                    bad_witness += 1;
                }
            }
            if sampled.outcome == Outcome::Fail && !ball_witness_valid(g, &sampled.witness) {
                bad_witness += 1;
            }
        }
    }
    verdict(
        contradictions == 0 && bad_witness == 0 && exact_fails > 0,
        format!("{runs} (graph, α) runs on n <= 12, {contradictions} contradictions, {exact_fails} exact FAILs, {bad_witness} invalid witnesses"),
    )
}

// 6. Part B at the built-in parameters on small spectral expanders.
fn part_b_desk_instance() -> Verdict {
    let base = RngState::new(6006);
    let mut checked = 0;
    let mut failures = 0;
    let mut i = 0u64;
    while checked < 50 {
        let mut rng = base.split(i).rng();
        i += 1;
        // Dense small instances are rarely simple under rejection sampling.
        let d = 6;
        let n = rng.gen_range(14..=20);
        if n * d % 2 == 1 {
            continue;
        }
        let g = sample_simple_regular(n, d, &mut rng, None).unwrap().graph;
        if !friedman_check(&g, 0.0).unwrap().passes_strong {
            continue;
        }
        checked += 1;
        if !partB_check_exact(&g, &ExpanParams::paper(d)).unwrap().passed() {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("{checked} graphs with n <= 20, d >= 6, λ <= 2.1√(d−1): {failures} counterexamples"))
}

fn balanced_field(n: usize, k: usize, rng: &mut impl Rng) -> BinaryField {
    let mut values = vec![0i8; n * k];
    for j in 0..k {
        let pos = rng.gen_range(1..=n / 2);
        let neg = rng.gen_range(0..=n / 2);
        let mut col: Vec<i8> = (0..n).map(|v| if v < pos { 1 } else if v < pos + neg { -1 } else { 0 }).collect();
        col.shuffle(rng);
        (0..n).for_each(|v| values[v * k + j] = col[v]);
    }
    BinaryField::new(n, k, values).unwrap()
}

// 7. Certifier end to end in both parameter modes.
fn certifier_end_to_end() -> Verdict {
    let base = RngState::new(7007);
    let graphs: Vec<RegularGraph> = (0..10u64).map(|i| friedman_sample(200, 6, &base.split(i)).0).collect();
    let norms = [(UncondNorm::lq(1.0).unwrap(), 2.0), (UncondNorm::lq(2.0).unwrap(), 2.0), (UncondNorm::lq(4.0).unwrap(), 4.0)];
    let jobs: Vec<u64> = (0..50).collect();
    let results = par_map(&jobs, |&i| {
        let mut rng = base.split(100 + i).rng();
        let g = &graphs[i as usize % graphs.len()];
        let k = rng.gen_range(1..=4);
        let f = balanced_field(200, k, &mut rng);
        let (nm, q) = &norms[i as usize % norms.len()];
        let mut out = Vec::new();
        for mode in [ParamMode::Paper, ParamMode::Fitted] {
            let r = certify_mode(g, &CertInput::Binary(f.clone()), nm, *q, 1.0, mode, 1.0, 256, &mut rng);
            out.push(match r {
                Ok(r) => (r.all_hold(), r.bound_holds, r.p2_holds, r.failures.first().map(|f| format!("{}: {}", f.check, f.detail))),
                Err(e) => (false, false, false, Some(e.to_string())),
            });
        }
        out
    });
    let flat: Vec<_> = results.into_iter().flatten().collect();
    let all = flat.iter().filter(|r| r.0).count();
    let bound = flat.iter().filter(|r| r.1).count();
    let p2 = flat.iter().filter(|r| r.2).count();
    let first = flat.iter().find_map(|r| r.3.clone()).map(|s| format!("; first failure: {s}")).unwrap_or_default();
    verdict(
        all == flat.len() && bound == flat.len() && p2 == flat.len(),
        format!("{} runs (50 fields × paper/fitted): all checks {all}, ratio <= Π {bound}, P2 {p2}{first}", flat.len()),
    )
}

// 8. Encoding sandwich.
fn encoding_sandwich() -> Verdict {
    let base = RngState::new(8008);
    let g = sample_simple_regular(12, 3, &mut base.rng(), None).unwrap().graph;
    let norms = [
        UncondNorm::lq(1.0).unwrap(),
        UncondNorm::lq(2.0).unwrap(),
        UncondNorm::lq(4.0).unwrap(),
        UncondNorm::sup(),
        UncondNorm::weighted(2.0, vec![1.0, 0.5, 3.0]).unwrap(),
    ];
    let mut bad = 0;
    for i in 0..100u64 {
        let mut rng = base.split(i).rng();
        let nm = &norms[i as usize % norms.len()];
        let k = nm.dim().unwrap_or_else(|| rng.gen_range(1..=3));
        let f = loop {
            let values: Vec<f64> = (0..12 * k).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let f = VectorField::new(12, k, values).unwrap();
            if !f.is_constant() {
                break f;
            }
        };
        let e = binary_encode(&g, &f, nm).unwrap();
        if !(e.mass_holds && e.edges_hold) {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("100 fields over G(12,3), {bad} sandwich violations"))
}

// 9. Almost-disjoint support bound.
fn support_bound() -> Verdict {
    let base = RngState::new(9009);
    let norms = [(UncondNorm::lq(1.0).unwrap(), 2.0), (UncondNorm::lq(2.0).unwrap(), 2.0), (UncondNorm::lq(4.0).unwrap(), 4.0)];
    let (mut fails, mut max_delta, mut min_slack) = (0, 0.0f64, f64::INFINITY);
    for i in 0..100u64 {
        let mut rng = base.split(i).rng();
        let (nm, q) = &norms[i as usize % 3];
        // 16 sets of size <= 2 over 16 coordinates used at most twice each,
        // so every set finds an open coordinate.
        let (k, m) = (16, 16);
        let cap = m / 8;
        let mut load = vec![0usize; k];
        let mut sets = Vec::with_capacity(m);
        for _ in 0..m {
            let size = rng.gen_range(1..=2);
            let mut open: Vec<usize> = (0..k).filter(|&j| load[j] < cap).collect();
            open.shuffle(&mut rng);
            let mut set: Vec<usize> = open.into_iter().take(size).collect();
            set.sort_unstable();
            set.iter().for_each(|&j| load[j] += 1);
            sets.push(set);
        }
        let x: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..2.0)).collect();
        let mut fam = RestrictedFamily { x, sets, delta: 1.0 };
        let floor = fam.projections().iter().map(|p| nlgap_core::norms::eval_norm(nm, p).unwrap()).fold(f64::INFINITY, f64::min);
        fam.x.iter_mut().for_each(|v| *v /= floor);
        fam.delta = fam.max_overlap() as f64 / m as f64;
        max_delta = max_delta.max(fam.delta);
        // Coordinate atoms and the projections themselves, both by full sign enumeration.
        let atoms: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let mut a = vec![0.0; k];
                a[j] = fam.x[j];
                a
            })
            .collect();
        let c = cotype_constant_exact(nm, &atoms, *q)
            .unwrap()
            .certificate
            .max(cotype_constant_exact(nm, &fam.projections(), *q).unwrap().certificate);
        let r = prop33_check(nm, &fam, *q, c).unwrap();
        min_slack = min_slack.min(r.lhs / r.rhs);
        if !r.holds {
            fails += 1;
        }
    }
    verdict(
        fails == 0 && max_delta <= 0.125,
        format!("100 families (k=16, m=16), max δ = {max_delta}, {fails} violations, min lhs/rhs = {min_slack:.3}"),
    )
}

// 10. Identities between the constants.
fn constant_identities() -> Verdict {
    let r = identity_checks().unwrap();
    let worst = r.recombination.iter().map(|row| row.rel_diff.abs()).fold(0.0, f64::max);
    let p = ConstParams::paper(6);
    let g1 = poincare_gamma(&ConstParams { q: 3.0, ..p }).unwrap();
    let g2 = poincare_gamma(&ConstParams { q: 6.0, ..p }).unwrap();
    let homog = (g2.ln_abs() - g1.ln_abs() - 10.0 * LN_2).abs();
    let eps = eval_constant(ConstantId::EpsD, &p).unwrap().to_f64();
    let sum = nlgap_core::constants::scale_weight_partial_sum(1_000_000);
    let rest = [
        r.recombination_dominated,
        r.q_homogeneity_ok,
        homog <= 1e-9 * g2.ln_abs().abs(),
        r.free_point_growth_ok,
        eps == 0.2,
        (sum - 1.0).abs() <= 2e-6,
    ];
    let rest_holds = rest.iter().all(|&b| b);
    Verdict {
        pass: r.recombination_equal && rest_holds,
        rest_holds,
        detail: format!(
            "4/c′ = Π: {} (max rel diff {worst:.3e}, tol 1e-9); 4/c′ <= Π: {}; lnΓ(2q) − lnΓ(q) − 10 ln 2 = {homog:.2e}; \
             free-point growth: {}; eps_d = {eps}; |Σa_i − 1| = {:.2e} (tol 2e-6)",
            r.recombination_equal,
            r.recombination_dominated,
            r.free_point_growth_ok,
            (sum - 1.0).abs()
        ),
    }
}

// 11. Walk-sum bound.
fn walk_sum() -> Verdict {
    let base = RngState::new(11011);
    let (g, lambda) = friedman_sample(500, 6, &base);
    let mut rng = base.split(1).rng();
    let mut bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut y: Vec<f64> = (0..500).map(|_| rng.sample(StandardNormal)).collect();
        let mean = y.iter().sum::<f64>() / 500.0;
        y.iter_mut().for_each(|v| *v -= mean);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        for steps in 1..=6 {
            let r = walk_sum_bound_check(&g, &y, steps, Some(lambda)).unwrap();
            worst = worst.max(r.value / r.bound);
            if !r.holds {
                bad += 1;
            }
        }
    }
    verdict(bad == 0, format!("50 vectors × ℓ ∈ [1,6] on G(500,6) with λ = {lambda:.4}: {bad} violations, max value/bound = {worst:.3e}"))
}

// 12. Monte Carlo against the exploration bound.
fn exploration_bound() -> Verdict {
    let base = RngState::new(12012);
    let mut bad = 0;
    let mut nontrivial = 0;
    let mut worst = f64::INFINITY;
    for i in 0..20u64 {
        let mut rng = base.split(i).rng();
        let d = rng.gen_range(3..=6);
        let n = 2 * rng.gen_range(100..=200);
        let r_size = rng.gen_range(2..=8);
        let theta = rng.gen_range(0.1..0.6);
        let mut verts: Vec<usize> = (0..n).collect();
        verts.shuffle(&mut rng);
        let r_set: Vec<usize> = verts[..r_size].to_vec();
        assert!(4 * r_size < n);
        // Pair up a few points inside R before completing the matching.
        let mut points: Vec<usize> = r_set.iter().flat_map(|&v| (0..d).map(move |k| v * d + k)).collect();
        points.shuffle(&mut rng);
        let pairs = rng.gen_range(0..=points.len() / 4);
        let prefix: Vec<(usize, usize)> = (0..pairs).map(|p| (points[2 * p], points[2 * p + 1])).collect();
        let est = lemma52_montecarlo(n, d, &r_set, &prefix, theta, 1000, &mut rng).unwrap();
        debug_assert_eq!(est.bound, lemma52_bound(theta, est.a_size, n, r_size).unwrap());
        if est.bound > 0.0 {
            nontrivial += 1;
        }
        worst = worst.min((est.frequency - est.bound) / est.std_error.max(1e-12));
        if est.frequency < est.bound - 3.0 * est.std_error {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("20 configurations ({nontrivial} with a positive bound), {bad} below bound − 3SE, min (freq − bound)/SE = {worst:.2}"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 12] = [
        (1, "scalar Poincaré oracle", scalar_poincare_oracle),
        (2, "configuration-model simplicity rate", simplicity_rate),
        (3, "Friedman check at desk scale", friedman_desk_scale),
        (4, "Cheeger sandwich", cheeger_sandwich),
        (5, "expansion checkers agree", expansion_checkers_agree),
        (6, "part B on small spectral expanders", part_b_desk_instance),
        (7, "certifier end to end", certifier_end_to_end),
        (8, "binary encoding sandwich", encoding_sandwich),
        (9, "almost-disjoint support bound", support_bound),
        (10, "constant identities", constant_identities),
        (11, "walk-sum bound", walk_sum),
        (12, "exploration bound", exploration_bound),
    ];
    let filter: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut out = std::io::stdout().lock();
    let mut unexpected = Vec::new();
    let (mut passed, mut run) = (0, 0);
    writeln!(out, "acceptance suite").unwrap();
    for (id, name, f) in criteria {
        if filter.is_some_and(|only| only != id) {
            continue;
        }
        run += 1;
        let t = Instant::now();
        let v = f();
        let known = KNOWN_FAILURES.iter().find(|k| k.0 == id);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        writeln!(out, "[{tag}] {id:>2}. {name} ({:.1}s): {}", t.elapsed().as_secs_f64(), v.detail).unwrap();
        if let Some((_, why)) = known {
            writeln!(out, "        expected failure: {why}").unwrap();
        }
        out.flush().unwrap();
        if v.pass {
            passed += 1;
        }
        // A known failure must still fail, and only for its recorded reason.
        let expected = if known.is_some() { !v.pass && v.rest_holds } else { v.pass };
        if !expected {
            unexpected.push(id);
        }
    }
    writeln!(out, "acceptance: {passed}/{run} criteria pass; unexpected outcomes: {unexpected:?}").unwrap();
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
