//! End-to-end acceptance run. Prints one line per criterion and fails if any
//! criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use oapkit::coefficients::{a_closed_form, a_recurrence, check_distinct, Distinctness, MagnitudeOrder};
use oapkit::constraints::{build_full, build_reduced, ball_first_order, probe_basis_integrality, probe_ordering_integral};
use oapkit::enumeration::{
    act_on_point, check_bijection, enumerate_integer_points, full_group, orbit_count, reduced_group,
    DEFAULT_BUDGET,
};
use oapkit::lp::{check_interior_uniform, default_slack, verify_all_facets};
use oapkit::symmetry::{
    brute_force_automorphisms, system_group, verify_theorem10, verify_theorem9, wreath_generators, WreathGenerators,
    WreathKind,
};
use oapkit::OAParams;

fn p(k: usize, s: usize, t: usize, lambda: u64) -> OAParams {
    OAParams::new(k, s, t, lambda).unwrap()
}

fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: u32, name: &'static str, cap: Duration, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= cap;
    let detail = if in_time { detail } else { format!("{detail}; over the {cap:?} cap") };
    let line = Line { id, name, pass: ok && in_time, detail, elapsed };
    println!(
        "criterion {:>2} {:<28} {}  ({:.2?}) {}",
        line.id,
        line.name,
        if line.pass { "PASS" } else { "FAIL" },
        line.elapsed,
        line.detail
    );
    line
}

fn sweep(min_gap: usize) -> Vec<OAParams> {
    let mut out = Vec::new();
    for s in 2..=5 {
        for k in 1..=10 {
            for t in 0..k {
                if k - t < min_gap {
                    continue;
                }
                for lambda in 1..=3 {
                    out.push(p(k, s, t, lambda));
                }
            }
        }
    }
    out
}

fn criterion1() -> (bool, String) {
    let cases = sweep(0);
    let bad: Vec<String> = cases
        .iter()
        .filter(|params| {
            let seq = a_recurrence(params);
            (0..=params.t).any(|c| a_closed_form(params, c).unwrap() != seq.values[c])
        })
        .map(ToString::to_string)
        .collect();
    (bad.is_empty(), format!("{} parameter sets, {} disagree {:?}", cases.len(), bad.len(), bad.first()))
}

fn criterion2() -> (bool, String) {
    let cases = sweep(2);
    let mut zero_or_repeat = Vec::new();
    let mut not_increasing = Vec::new();
    for params in &cases {
        let check = check_distinct(&a_recurrence(params)).unwrap();
        if check.distinctness != Distinctness::DistinctNonzero {
            zero_or_repeat.push(*params);
        }
        if let MagnitudeOrder::NotIncreasing { c } = check.magnitudes {
            not_increasing.push((*params, c));
        }
    }
    let examples: Vec<String> = not_increasing.iter().take(3).map(|(q, c)| format!("{q} at c={c}")).collect();
    (
        zero_or_repeat.is_empty() && not_increasing.is_empty(),
        format!(
            "{} parameter sets; {} with a zero or repeated value; {} where |a_c| is not strictly increasing, e.g. {}",
            cases.len(),
            zero_or_repeat.len(),
            not_increasing.len(),
            examples.join(", ")
        ),
    )
}

fn criterion3() -> (bool, String) {
    let mut count = 0;
    let mut bad = Vec::new();
    for s in 2..=3 {
        for k in 1..=6 {
            for t in 0..k {
                for lambda in 1..=2 {
                    let params = p(k, s, t, lambda);
                    count += 1;
                    if !check_interior_uniform(&params).unwrap().interior {
                        bad.push(params.to_string());
                    }
                }
            }
        }
    }
    (bad.is_empty(), format!("{count} parameter sets, {} not interior {:?}", bad.len(), bad))
}

fn criterion4() -> (bool, String) {
    let grid = [p(4, 2, 2, 1), p(5, 2, 2, 1), p(5, 2, 3, 1), p(3, 3, 2, 1), p(4, 3, 2, 1), p(3, 4, 2, 1)];
    let mut ok = true;
    let mut parts = Vec::new();
    for params in grid {
        let report = verify_all_facets(&params, &default_slack()).unwrap();
        let expected = params.tuple_count();
        ok &= report.all_certified() && report.rows_total == expected;
        parts.push(format!("{params}: {}/{expected}", report.facets_certified));
    }
    (ok, parts.join(", "))
}

fn criterion5() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 3..=5 {
        let sys = build_reduced(&p(k, 2, k - 1, 1)).unwrap();
        let distinct = sys.distinct_rows();
        let mults: Vec<usize> = distinct.iter().map(|d| d.multiplicity).collect();
        ok &= distinct.len() == 2 && mults.iter().all(|&m| m == 1 << (k - 1));
        parts.push(format!("k={k}: multiplicities {mults:?}"));
    }
    (ok, parts.join(", "))
}

fn criterion6() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, s, t) in [(3, 2, 1), (4, 2, 2), (5, 2, 2), (3, 3, 1), (3, 3, 2), (4, 3, 2)] {
        let params = p(k, s, t, 1);
        let report = verify_theorem9(&params).unwrap();
        let formula = factorial(s - 1).pow(k as u32) * factorial(k);
        ok &= report.equal && report.order_pi == formula;
        let mut part = format!("({k},{s},{t}) |Π|={}", report.order_pi);
        if params.m() <= 6 {
            let brute = brute_force_automorphisms(&build_reduced(&params).unwrap()).unwrap().len();
            ok &= BigUint::from(brute) == report.order_pi;
            part += &format!(" brute={brute}");
        }
        parts.push(part);
    }
    for (k, s) in [(3, 2), (2, 3)] {
        let params = p(k, s, 0, 1);
        let m = params.tuple_count() - 1;
        let flag = matches!(wreath_generators(&params, WreathKind::ReducedH), WreathGenerators::SymmetricGroup(n) if n == m);
        let order = system_group(&build_reduced(&params).unwrap()).order();
        ok &= flag && order == factorial(m);
        parts.push(format!("t=0 ({k},{s}) flag={flag} |Π|={order}"));
    }
    for k in [3, 4] {
        let params = p(k, 2, k - 1, 1);
        let flag = matches!(wreath_generators(&params, WreathKind::ReducedH), WreathGenerators::Identity);
        let report = verify_theorem9(&params).unwrap();
        let brute = brute_force_automorphisms(&build_reduced(&params).unwrap()).unwrap().len();
        ok &= flag && report.equal && report.order_pi == BigUint::from(1u32) && brute == 1;
        parts.push(format!("degenerate k={k} |Π|={}", report.order_pi));
    }
    (ok, parts.join(", "))
}

fn criterion7() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, s, t) in [(3, 2, 1), (3, 2, 2), (4, 2, 2), (2, 3, 1)] {
        let params = p(k, s, t, 1);
        let report = verify_theorem10(&params).unwrap();
        let formula = factorial(s).pow(k as u32) * factorial(k);
        ok &= report.equal && report.order_g_full == formula;
        let mut part = format!("({k},{s},{t}) |G|={}", report.order_g_full);
        if params.tuple_count() <= 9 {
            let brute = brute_force_automorphisms(&build_full(&params)).unwrap().len();
            ok &= BigUint::from(brute) == report.order_g_full;
            part += &format!(" brute={brute}");
        }
        parts.push(part);
    }
    (ok, parts.join(", "))
}

/// Counts OA frequency vectors by direct search over `N_x ∈ 0..=λ` in
/// lexicographic cell order, checking each t-column margin once its last
/// cell is assigned.
fn oracle_count(k: usize, s: usize, t: usize, lambda: u64) -> usize {
    let cells: Vec<Vec<usize>> = (0..s.pow(k as u32))
        .map(|mut r| {
            let mut x = vec![0; k];
            for i in (0..k).rev() {
                x[i] = r % s;
                r /= s;
            }
            x
        })
        .collect();
    let mut subsets: Vec<Vec<usize>> = vec![vec![]];
    for i in 0..k {
        let mut more: Vec<Vec<usize>> = subsets.iter().map(|c| [c.clone(), vec![i]].concat()).collect();
        subsets.append(&mut more);
    }
    subsets.retain(|c| c.len() == t);
    // margin id for every (subset, cell), plus the last cell of each margin
    let margins_per = s.pow(t as u32);
    let margin_of: Vec<Vec<usize>> = cells
        .iter()
        .map(|x| {
            subsets
                .iter()
                .enumerate()
                .map(|(si, cols)| si * margins_per + cols.iter().fold(0, |acc, &c| acc * s + x[c]))
                .collect()
        })
        .collect();
    let mut last = vec![0; subsets.len() * margins_per];
    for (ci, ms) in margin_of.iter().enumerate() {
        for &m in ms {
            last[m] = ci;
        }
    }
    fn go(ci: usize, margin_of: &[Vec<usize>], last: &[usize], sums: &mut [u64], lambda: u64) -> usize {
        if ci == margin_of.len() {
            return 1;
        }
        let mut total = 0;
        for v in 0..=lambda {
            if margin_of[ci].iter().any(|&m| sums[m] + v > lambda) {
                break;
            }
            let closes = margin_of[ci].iter().all(|&m| last[m] != ci || sums[m] + v == lambda);
            if closes {
                for &m in &margin_of[ci] {
                    sums[m] += v;
                }
                total += go(ci + 1, margin_of, last, sums, lambda);
                for &m in &margin_of[ci] {
                    sums[m] -= v;
                }
            }
        }
        total
    }
    let mut sums = vec![0; last.len()];
    go(0, &margin_of, &last, &mut sums, lambda)
}

fn criterion8() -> (bool, String) {
    // (N, k, s, t) with the count expected from the oracle
    let cases: [((usize, usize, usize, usize), usize); 4] = [((4, 3, 2, 2), 2), ((6, 2, 3, 1), 21), ((8, 4, 2, 3), 2), ((12, 4, 2, 2), 16)];
    let mut ok = true;
    let mut parts = Vec::new();
    for ((n, k, s, t), expected) in cases {
        let lambda = (n / s.pow(t as u32)) as u64;
        let params = p(k, s, t, lambda);
        let oracle = oracle_count(k, s, t, lambda);
        let full = enumerate_integer_points(&build_full(&params), DEFAULT_BUDGET).unwrap();
        let reduced = enumerate_integer_points(&build_reduced(&params).unwrap(), DEFAULT_BUDGET).unwrap();
        let bijection = check_bijection(&full, &reduced).unwrap();
        ok &= oracle == expected
            && full.exhaustive
            && reduced.exhaustive
            && full.points.len() == oracle
            && reduced.points.len() == oracle
            && bijection;
        parts.push(format!(
            "OA({n},{k},{s},{t}): oracle {oracle}, full {}, reduced {}, round trip {bijection}",
            full.points.len(),
            reduced.points.len()
        ));
    }
    (ok, parts.join("; "))
}

fn criterion9() -> (bool, String) {
    let params = p(5, 2, 3, 3);
    let full = enumerate_integer_points(&build_full(&params), DEFAULT_BUDGET).unwrap();
    let g = full_group(&params).unwrap();
    if full.exhaustive {
        let orbits = orbit_count(&full, &g).unwrap();
        let reduced = enumerate_integer_points(&build_reduced(&params).unwrap(), DEFAULT_BUDGET).unwrap();
        let h_orbits = orbit_count(&reduced, &reduced_group(&params).unwrap()).unwrap();
        (
            orbits == 1,
            format!(
                "OA(24,5,2,3): {} solutions, {orbits} G-orbit(s); for reference {h_orbits} H-orbits on the reduced set",
                full.points.len()
            ),
        )
    } else {
        // the partial set must contain a solution whose orbit it closes
        let set: std::collections::BTreeSet<&Vec<i64>> = full.points.iter().collect();
        let closed = !full.points.is_empty()
            && g.generators().iter().all(|gen| set.contains(&act_on_point(gen, &full.points[0])));
        (closed, format!("budget exhausted after {} nodes; {} solutions found", full.nodes, full.points.len()))
    }
}

fn criterion10() -> (bool, String) {
    let params = p(8, 2, 3, 1);
    let ball_first = probe_ordering_integral(&params, &ball_first_order(&params)).unwrap();
    let smoke = probe_basis_integrality(&params, 100, 0).unwrap();
    let main = probe_basis_integrality(&params, 1000, 0).unwrap();
    (
        ball_first && main.proportion_value <= 0.02 && smoke.proportion_value <= 0.05,
        format!(
            "1000 trials: {} integral ({}); 100-trial smoke: {}; ball-first order integral: {ball_first}",
            main.integral_count, main.proportion, smoke.proportion
        ),
    )
}

/// JSON for a representative report from each deterministic component.
fn reports() -> Vec<String> {
    vec![
        serde_json::to_string(&check_distinct(&a_recurrence(&p(6, 3, 3, 2))).unwrap()).unwrap(),
        serde_json::to_string(&check_interior_uniform(&p(5, 3, 2, 2)).unwrap()).unwrap(),
        serde_json::to_string(&verify_all_facets(&p(4, 3, 2, 1), &default_slack()).unwrap()).unwrap(),
        serde_json::to_string(&oapkit::symmetry::analyze(&p(4, 3, 2, 1), oapkit::constraints::Form::Reduced, false).unwrap()).unwrap(),
        serde_json::to_string(&oapkit::symmetry::analyze(&p(3, 2, 1, 1), oapkit::constraints::Form::Full, true).unwrap()).unwrap(),
        serde_json::to_string(&oapkit::enumeration::solutions_report(&p(4, 2, 2, 3), DEFAULT_BUDGET).unwrap()).unwrap(),
        serde_json::to_string(&probe_basis_integrality(&p(8, 2, 3, 1), 100, 0).unwrap()).unwrap(),
        serde_json::to_string(&probe_basis_integrality(&p(5, 2, 2, 1), 200, 42).unwrap()).unwrap(),
    ]
}

fn criterion11() -> (bool, String) {
    let a = reports();
    let b = reports();
    let same = a.iter().zip(&b).filter(|(x, y)| x == y).count();
    (same == a.len(), format!("{same}/{} reports byte-identical across two runs", a.len()))
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    println!();
    let lines = [
        run(1, "recurrence = closed form", secs(1), criterion1),
        run(2, "a_c distinct and increasing", secs(1), criterion2),
        run(3, "uniform point interior", secs(1), criterion3),
        run(4, "facets certified", secs(300), criterion4),
        run(5, "degenerate multiplicities", secs(1), criterion5),
        run(6, "reduced symmetry orders", secs(120), criterion6),
        run(7, "full symmetry orders", secs(300), criterion7),
        run(8, "formulation bijection", secs(120), criterion8),
        run(9, "OA(24,5,2,3) orbits", secs(1800), criterion9),
        run(10, "basis integrality probe", secs(3600), criterion10),
        run(11, "determinism", secs(600), criterion11),
    ];
    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    println!("{} of {} criteria pass", lines.len() - failed.len(), lines.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
