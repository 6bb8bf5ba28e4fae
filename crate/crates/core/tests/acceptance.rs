//! Acceptance suite: one PASS/FAIL line per criterion. A failure the theory predicts is
//! printed with its explanation; any other failure makes the exit status nonzero.
//!
//! Run with `cargo test -p ifsdyn --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Signed;

use common::{all_systems, non_uniform_systems, r, uniform_systems, TestSystem};
use ifsdyn::kneading::{
    conjugate_from_entropy, entropy, replay_critical, EntropyOptions, EntropyResult, RootEnclosure,
};
use ifsdyn::picture::{displacement_table, warp_image, Raster};
use ifsdyn::real::{Precision, Round};
use ifsdyn::symbolic::{
    count_words, critical_itineraries, entropy_estimate, enumerate_words, is_admissible, itinerary, oracle,
    sample_points, Admissibility, AdmissibilityVariant,
};
use ifsdyn::transform::{check_homeomorphism, coding_point, fractal_transform, transform_enclosure, HomeoVerdict};
use ifsdyn::{MaskedSystem, Rational, Variant};

const PARRY_TOL: f64 = 1e-9;
const PARRY_TIME: Duration = Duration::from_secs(1);
const RATIO_TOL: f64 = 0.05;
const COUNT_TIME: Duration = Duration::from_secs(30);
const ORACLE_MAX_N: usize = 14;
const REPLAY_SYMBOLS: usize = 64;
const MAX_INDETERMINATE: usize = 4;
const GRID: usize = 1000;
const TRANSFORM_DEPTH: usize = 48;
const SAMPLES: usize = 10_000;
const SAMPLE_DEPTH: usize = 40;
const WARP_SIZE: usize = 256;
const WARP_DEPTH: usize = 48;

struct Outcome {
    pass: bool,
    detail: String,
    /// Why a failed literal check is still what the theory predicts.
    explanation: Option<String>,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into(), explanation: None }
}

fn explained(detail: impl Into<String>, why: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into(), explanation: Some(why.into()) }
}

fn entropy_of(s: &TestSystem) -> EntropyResult {
    entropy(&s.ifs, &s.q, &EntropyOptions::default()).unwrap()
}

fn conjugate_system(s: &TestSystem, variant: Variant) -> MaskedSystem {
    let u = conjugate_from_entropy(&entropy_of(s)).unwrap();
    u.rational_system(variant).unwrap()
}

fn parry_consistency() -> Outcome {
    let mut worst_r = 0f64;
    let mut worst_h = 0f64;
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    for s in uniform_systems() {
        let a = s.ratio.clone().unwrap();
        let start = Instant::now();
        let res = entropy_of(&s);
        let took = start.elapsed();
        slowest = slowest.max(took);
        let a_f = rational_f64(&a);
        let dev_r = match &res.root.exact {
            Some(x) => (rational_f64(x) - a_f).abs(),
            None => {
                let lo = (res.root.lo.to_rational() - &a).abs();
                let hi = (res.root.hi.to_rational() - &a).abs();
                rational_f64(&lo.max(hi))
            }
        };
        let dev_h = (res.entropy + a_f.ln()).abs();
        worst_r = worst_r.max(dev_r);
        worst_h = worst_h.max(dev_h);
        if !res.root.certified || dev_r > PARRY_TOL || dev_h > PARRY_TOL || took > PARRY_TIME {
            failures.push(s.name.clone());
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "max |r - a| = {worst_r:.1e}, max |H + ln a| = {worst_h:.1e} (tol {PARRY_TOL:.0e}), slowest {:.3} s (limit 1 s){}",
            slowest.as_secs_f64(),
            failed_list(&failures)
        ),
    )
}

fn word_count_cross_check() -> Outcome {
    let mut worst = 0f64;
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    for s in all_systems() {
        let start = Instant::now();
        let res = entropy_of(&s);
        let crit = critical_itineraries(&s.ifs, &s.q, 256).unwrap();
        let est = entropy_estimate(&count_words(&crit, 30).unwrap()).unwrap();
        let took = start.elapsed();
        slowest = slowest.max(took);
        let dev = (est.ratio - res.entropy).abs();
        worst = worst.max(dev);
        if dev > RATIO_TOL || took > COUNT_TIME {
            failures.push(format!("{} ({dev:.3})", s.name));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "max |ratio - H| = {worst:.4} (tol {RATIO_TOL}), slowest {:.2} s (limit 30 s){}",
            slowest.as_secs_f64(),
            failed_list(&failures)
        ),
    )
}

const VARIANTS: [AdmissibilityVariant; 3] =
    [AdmissibilityVariant::Plus, AdmissibilityVariant::Minus, AdmissibilityVariant::Closure];

fn oracle_equivalence() -> Outcome {
    let mut compared = 0;
    let mut failures = Vec::new();
    for s in all_systems() {
        let crit = critical_itineraries(&s.ifs, &s.q, 64).unwrap();
        for variant in VARIANTS {
            for n in 0..=ORACLE_MAX_N {
                let fast = enumerate_words(&crit, variant, n).unwrap();
                let brute = oracle::brute_force_words(&crit, variant, n).unwrap();
                compared += 1;
                if fast != brute {
                    failures.push(format!("{} {variant:?} n={n}", s.name));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{compared} word sets equal to brute force for n <= {ORACLE_MAX_N}{}", failed_list(&failures)),
    )
}

fn replay_check() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for s in non_uniform_systems() {
        let res = entropy_of(&s);
        let u = match conjugate_from_entropy(&res) {
            Ok(u) => u,
            Err(e) => {
                pass = false;
                details.push(format!("{}: {e}", s.name));
                continue;
            }
        };
        let rep = replay_critical(&u, &res.crit, REPLAY_SYMBOLS, Precision::from_env());
        let ok = rep.mismatch_free() && rep.indeterminate() < MAX_INDETERMINATE;
        pass &= ok;
        details.push(format!(
            "{}: {} + {} agree, {} mismatched, {} indeterminate",
            s.name,
            rep.alpha.agree,
            rep.beta.agree,
            rep.alpha.mismatches.len() + rep.beta.mismatches.len(),
            rep.indeterminate()
        ));
    }
    outcome(pass, format!("{REPLAY_SYMBOLS} symbols each: {}", details.join("; ")))
}

fn homeomorphism_verdicts() -> Outcome {
    let agrees = |v: HomeoVerdict| matches!(v, HomeoVerdict::AgreeToDepth { .. } | HomeoVerdict::ProvenEqual);
    let mut notes = Vec::new();
    let mut pass = true;

    for s in all_systems() {
        let f = s.masked(Variant::Plus);
        let ok = [64, 128].iter().all(|&d| agrees(check_homeomorphism(&f, &f.clone(), d).unwrap()));
        pass &= ok;
        if !ok {
            notes.push(format!("{} vs itself disagrees", s.name));
        }
    }

    let u07 = ifsdyn::OverlappingIfs::uniform(r("7/10"));
    let f = MaskedSystem::new(u07.clone(), r("1/2"), Variant::Plus).unwrap();
    let g = MaskedSystem::new(u07, r("3/5"), Variant::Plus).unwrap();
    let v64 = check_homeomorphism(&f, &g, 64).unwrap();
    let v128 = check_homeomorphism(&f, &g, 128).unwrap();
    let ok = matches!(v64, HomeoVerdict::MismatchAt { .. }) && v64 == v128;
    pass &= ok;
    notes.push(format!("U(7/10) q=1/2 vs q=3/5: {v64} at depth 64, {v128} at depth 128"));

    let m = common::moebius();
    let mf = m.masked(Variant::Plus);
    let mg = conjugate_system(&m, Variant::Plus);
    let (c64, c128) = (check_homeomorphism(&mf, &mg, 64).unwrap(), check_homeomorphism(&mf, &mg, 128).unwrap());
    let ok = agrees(c64) && agrees(c128);
    pass &= ok;
    notes.push(format!("moebius vs conjugate: {c64}, {c128}"));

    outcome(pass, format!("self-comparisons agree at depths 64 and 128; {}", notes.join("; ")))
}

fn grid(n: usize) -> Vec<Rational> {
    (0..n).map(|i| Rational::new((i as i64).into(), ((n - 1) as i64).into())).collect()
}

/// Monotonicity of `π_a` on the closure of `Ω_q` is guaranteed only when `a ≤ r(q)`.
fn monotone_by_theory(f_root: &RootEnclosure, g: &TestSystem) -> bool {
    let Some(a) = &g.ratio else { return false };
    match &f_root.exact {
        Some(r) => a <= r,
        None => *a <= f_root.lo.to_rational(),
    }
}

struct PairReport {
    monotone_fail: usize,
    endpoint_fail: bool,
    trip_fail: usize,
}

fn check_pair(f: &MaskedSystem, g: &MaskedSystem, points: &[Rational], words: &[Vec<u8>]) -> PairReport {
    let (zero, one) = (r("0"), r("1"));
    let mut report = PairReport { monotone_fail: 0, endpoint_fail: false, trip_fail: 0 };
    let mut prev: Option<Rational> = None;
    for (x, w) in points.iter().zip(words) {
        let e = coding_point(&g.ifs, w);
        let mid = e.mid();
        if prev.as_ref().is_some_and(|p| *p > mid) {
            report.monotone_fail += 1;
        }
        prev = Some(mid);
        if !transform_enclosure(g, f, &e, TRANSFORM_DEPTH).unwrap().contains(x) {
            report.trip_fail += 1;
        }
    }
    let h0 = fractal_transform(f, g, &zero, TRANSFORM_DEPTH).unwrap();
    let h1 = fractal_transform(f, g, &one, TRANSFORM_DEPTH).unwrap();
    report.endpoint_fail = !h0.contains(&zero) || !h1.contains(&one);
    report
}

fn addresses(f: &MaskedSystem, points: &[Rational]) -> Vec<Vec<u8>> {
    points.iter().map(|x| itinerary(f, x, TRANSFORM_DEPTH).unwrap().prefix.symbols().to_vec()).collect()
}

fn transform_properties() -> Outcome {
    let systems = all_systems();
    let roots: Vec<RootEnclosure> = systems.iter().map(|s| entropy_of(s).root).collect();
    let points = grid(GRID);
    let mut pairs = 0;
    let (mut monotone, mut endpoint, mut trip) = (Vec::new(), Vec::new(), Vec::new());
    let mut unexplained = Vec::new();
    for variant in [Variant::Plus, Variant::Minus] {
        let masked: Vec<MaskedSystem> = systems.iter().map(|s| s.masked(variant)).collect();
        let words: Vec<Vec<Vec<u8>>> = masked.iter().map(|f| addresses(f, &points)).collect();
        for (i, fs) in systems.iter().enumerate() {
            for (j, gs) in systems.iter().enumerate() {
                pairs += 1;
                let (f, g) = (&masked[i], &masked[j]);
                let rep = check_pair(f, g, &points, &words[i]);
                let name = format!("{} -> {} {variant}", fs.name, gs.name);
                let homeo = !matches!(check_homeomorphism(f, g, 256).unwrap(), HomeoVerdict::MismatchAt { .. });
                if rep.monotone_fail > 0 {
                    monotone.push(format!("{name}: {} inversions", rep.monotone_fail));
                    if homeo || monotone_by_theory(&roots[i], gs) {
                        unexplained.push(format!("{name} not monotone"));
                    }
                }
                if rep.trip_fail > 0 {
                    trip.push(format!("{name}: {} points", rep.trip_fail));
                    if homeo {
                        unexplained.push(format!("{name} round trip"));
                    }
                }
                if rep.endpoint_fail {
                    endpoint.push(name.clone());
                    unexplained.push(format!("{name} endpoints"));
                }
            }
        }
    }
    // homeomorphic pairs across different systems
    let mut conjugate_pairs = 0;
    for s in non_uniform_systems() {
        for variant in [Variant::Plus, Variant::Minus] {
            let (f, g) = (s.masked(variant), conjugate_system(&s, variant));
            for (a, b) in [(&f, &g), (&g, &f)] {
                pairs += 1;
                conjugate_pairs += 1;
                let rep = check_pair(a, b, &points, &addresses(a, &points));
                if rep.monotone_fail > 0 || rep.trip_fail > 0 || rep.endpoint_fail {
                    let name = format!("{} and its conjugate {variant}", s.name);
                    unexplained.push(name.clone());
                    monotone.push(name);
                }
            }
        }
    }
    let pass = monotone.is_empty() && endpoint.is_empty() && trip.is_empty();
    let detail = format!(
        "{pairs} ordered pairs ({conjugate_pairs} system/conjugate) on a {GRID}-point grid at depth {TRANSFORM_DEPTH}: \
         {} pairs with monotonicity, {} with endpoint, {} with round-trip failures{}",
        monotone.len(),
        endpoint.len(),
        trip.len(),
        failed_list(&monotone.iter().chain(&endpoint).chain(&trip).take(4).cloned().collect::<Vec<_>>())
    );
    if pass {
        return outcome(true, detail);
    }
    if unexplained.is_empty() {
        return explained(
            detail,
            "inversions occur only in non-conjugate pairs where G is not uniform with ratio at most r(F), \
             and round-trip misses only in pairs whose critical itineraries differ",
        );
    }
    outcome(false, format!("{detail}; not explained: {}", unexplained.join(", ")))
}

fn orbit_admissibility() -> Outcome {
    let points = sample_points(2024, SAMPLES);
    let mut checked = 0;
    let mut failures = Vec::new();
    for s in all_systems() {
        let crit = critical_itineraries(&s.ifs, &s.q, 256).unwrap();
        for variant in [Variant::Plus, Variant::Minus] {
            let sys = s.masked(variant);
            let mut bad = 0;
            for x in &points {
                let it = itinerary(&sys, x, SAMPLE_DEPTH).unwrap();
                if is_admissible(&it, &crit, variant.into()).unwrap() != Admissibility::Yes {
                    bad += 1;
                }
                checked += 1;
            }
            if bad > 0 {
                failures.push(format!("{} {variant}: {bad}", s.name));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} sampled itineraries of depth {SAMPLE_DEPTH} admissible{}", failed_list(&failures)),
    )
}

fn shift_invariance() -> Outcome {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for s in all_systems() {
        let crit = critical_itineraries(&s.ifs, &s.q, 64).unwrap();
        for variant in VARIANTS {
            let sets: Vec<BTreeSet<_>> =
                (0..=ORACLE_MAX_N).map(|n| enumerate_words(&crit, variant, n).unwrap()).collect();
            for n in 1..=ORACLE_MAX_N {
                for w in &sets[n] {
                    checked += 1;
                    if !sets[n - 1].contains(&w.shift()) {
                        failures.push(format!("{} {variant:?} {w}", s.name));
                    }
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} shifted words found in the shorter sets{}", failed_list(&failures)))
}

fn max_displacement(out: &Raster) -> (usize, usize) {
    let (mut dx, mut dy) = (0, 0);
    for j in 0..out.height {
        for i in 0..out.width {
            let p = out.pixel(i, j);
            dx = dx.max((p[0] as usize).abs_diff(i));
            dy = dy.max((p[1] as usize).abs_diff(j));
        }
    }
    (dx, dy)
}

/// Largest jump of `table` next to `k`.
fn local_step(table: &[usize], k: usize) -> usize {
    let left = k.checked_sub(1).map_or(0, |l| table[k].abs_diff(table[l]));
    let right = table.get(k + 1).map_or(0, |&n| table[k].abs_diff(n));
    left.max(right)
}

/// Pixels whose round-trip displacement exceeds one plus the step of the return table
/// at the intermediate pixel; rounding there cannot account for those.
fn unexplained_displacements(len: usize, f: &MaskedSystem, g: &MaskedSystem) -> usize {
    let there = displacement_table(len, f, g, WARP_DEPTH).unwrap();
    let back = displacement_table(len, g, f, WARP_DEPTH).unwrap();
    (0..len).filter(|&i| there[back[i]].abs_diff(i) > 1 + local_step(&there, back[i])).count()
}

fn warp_identity() -> Outcome {
    let img = Raster::gradient(WARP_SIZE, WARP_SIZE);
    let bytes = img.to_pnm_bytes();
    let mut identity = true;
    let mut literal = true;
    let mut unexplained = 0;
    let mut notes = Vec::new();
    for a in ["7/10", "3/5"] {
        let f = MaskedSystem::new(ifsdyn::OverlappingIfs::uniform(r(a)), r("1/2"), Variant::Plus).unwrap();
        let out = warp_image(&img, (&f, &f), Some((&f, &f)), WARP_DEPTH).unwrap();
        let exact = out.to_pnm_bytes() == bytes;
        identity &= exact;
        notes.push(format!("F=G=U({a}) byte-exact: {exact}"));
    }
    for (x, y) in [(common::unequal_affine(), common::moebius()), (common::moebius(), common::unequal_affine())] {
        let (fx, gx) = (x.masked(Variant::Plus), conjugate_system(&x, Variant::Plus));
        let (fy, gy) = (y.masked(Variant::Plus), conjugate_system(&y, Variant::Plus));
        let there = warp_image(&img, (&fx, &gx), Some((&fy, &gy)), WARP_DEPTH).unwrap();
        let back = warp_image(&there, (&gx, &fx), Some((&gy, &fy)), WARP_DEPTH).unwrap();
        let (dx, dy) = max_displacement(&back);
        literal &= dx <= 1 && dy <= 1;
        unexplained += unexplained_displacements(WARP_SIZE, &gx, &fx) + unexplained_displacements(WARP_SIZE, &gy, &fy);
        notes.push(format!("{} x {} through conjugates moves pixels by ({dx}, {dy})", x.name, y.name));
    }
    let detail = format!("{WARP_SIZE}x{WARP_SIZE} gradient, depth {WARP_DEPTH}: {}", notes.join("; "));
    if identity && literal {
        return outcome(true, detail);
    }
    if identity && unexplained == 0 {
        return explained(
            detail,
            "every displacement is within one pixel of the jump of the return table at the \
             intermediate pixel; h is not Lipschitz, so rounding the intermediate raster is amplified",
        );
    }
    outcome(false, format!("{detail}; {unexplained} displacements not explained by intermediate rounding"))
}

fn rational_f64(x: &Rational) -> f64 {
    ifsdyn::real::Float::from_rational(x, Precision::new(64), Round::Nearest).to_f64()
}

fn failed_list(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", items.join(", "))
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("parry consistency", parry_consistency),
        ("word-count cross-check", word_count_cross_check),
        ("oracle equivalence", oracle_equivalence),
        ("conjugate replay", replay_check),
        ("homeomorphism criterion", homeomorphism_verdicts),
        ("transform properties", transform_properties),
        ("admissibility of real orbits", orbit_admissibility),
        ("shift invariance", shift_invariance),
        ("image warp identity", warp_identity),
    ];
    let (mut passed, mut explained, mut failed) = (0, 0, 0);
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {} {name}: {} [{:.1} s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        match (o.pass, &o.explanation) {
            (true, _) => passed += 1,
            (false, Some(why)) => {
                println!("       expected by theory: {why}");
                explained += 1;
            }
            (false, None) => failed += 1,
        }
    }
    println!(
        "{passed} of {} criteria passed; {explained} failed as the theory predicts; {failed} failed unexpectedly",
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
