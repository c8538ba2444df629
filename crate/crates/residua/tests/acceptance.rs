//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on
//! any failure. Runs with `cargo test -p residua --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use residua::drivers::{baumslag_search, permrep_experiment, with_threads};
use residua_core::algebra::{scalar_element, AlgebraElement, Coefficient, Context, Limits};
use residua_core::baumslag::{exhaustive_n0, report_csv, SearchBounds, Variant};
use residua_core::normbracket::{bracket_report, lower_is_monotone, sandwich, NormBracket};
use residua_core::permrep::{experiment_csv, medians, random_free_rep, ExperimentOptions, ExperimentRow, StdOperator};
use residua_core::pipeline::{certificate_csv, certify, m_choice_holds, CertifyOptions, CsrfCertificate};
use residua_core::torus::{klein_norm, klein_relation_residual, zr_norm, KleinElement, KleinKey, ZrElement};
use residua_core::tower::{ball_images, degree, discriminating_hom, preset_genus2, DiscriminateOptions};
use residua_core::words::{Basis, Word};

const KESTEN_CSV_DOUBLINGS: u32 = 8;
const BAUMSLAG_SEED: u64 = 20_240_601;
const BAUMSLAG_TRIALS: u64 = 100_000;
const PERM_SIZES: [usize; 3] = [100, 400, 1600];
const PERM_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn peak_rss_mib() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

fn f2() -> Context {
    Context::free(Basis::new(["a", "b"]).unwrap())
}

fn kesten_element() -> AlgebraElement {
    scalar_element(f2(), &[(1.0, "a"), (1.0, "a^-1"), (1.0, "b"), (1.0, "b^-1")]).unwrap()
}

/// Closed walks of length `n` from the root of the `d`-regular tree.
fn tree_closed_walks(d: u128, n: usize) -> u128 {
    let mut v = vec![0u128; n + 2];
    v[0] = 1;
    for _ in 0..n {
        let mut w = vec![0u128; n + 2];
        for k in 0..=n {
            if v[k] == 0 {
                continue;
            }
            if k == 0 {
                w[1] += d * v[0];
            } else {
                w[k - 1] += v[k];
                w[k + 1] += (d - 1) * v[k];
            }
        }
        v = w;
    }
    v[0]
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * y.abs().max(f64::MIN_POSITIVE)
}

fn criterion_1(bracket: &NormBracket) -> Check {
    // a^{2m}(e) = ‖a^m‖₂² for the self-adjoint a.
    let a = kesten_element();
    let mut power = AlgebraElement::delta(f2(), &Word::identity());
    for m in 1..=8usize {
        power = power.convolve(&a, &Limits::default()).map_err(|e| e.to_string())?;
        let walks = tree_closed_walks(4, 2 * m) as f64;
        ensure(rel_close(power.l2_sq(), walks, 1e-6), || {
            format!("a^{}(e) = {} vs {walks}", 2 * m, power.l2_sq())
        })?;
    }
    for r in &bracket.schedule {
        let walks = tree_closed_walks(4, 4 * r.m as usize) as f64;
        ensure(rel_close(r.l2 * r.l2, walks, 1e-6), || {
            format!("row j={}: {} vs {walks}", r.j, r.l2 * r.l2)
        })?;
    }
    let lowers: Vec<f64> = bracket.schedule.iter().map(|r| r.lower).collect();
    ensure(
        lowers.windows(2).all(|w| w[1] > w[0]) && lower_is_monotone(bracket, 0.0),
        || format!("lower values not increasing: {lowers:?}"),
    )?;
    ensure(bracket.lower >= 3.0, || format!("lower {} < 3.0", bracket.lower))?;
    ensure(bracket.upper <= 4.1, || format!("upper {} > 4.1", bracket.upper))?;
    ensure(bracket.contains(3.4641), || {
        format!("[{}, {}] misses 3.4641", bracket.lower, bracket.upper)
    })?;
    Ok(format!(
        "bracket [{:.6}, {:.6}] over {} rows{}",
        bracket.lower,
        bracket.upper,
        bracket.schedule.len(),
        if bracket.truncated {
            ", last row measured without storing"
        } else {
            ""
        }
    ))
}

fn criterion_2() -> Check {
    let (tower, y) = preset_genus2();
    let d = discriminating_hom(&tower, &y, 3, &DiscriminateOptions::default()).map_err(|e| e.to_string())?;
    ensure(d.distinct_elements == d.ball_words, || {
        format!(
            "{} distinct images for {} ball words",
            d.distinct_elements, d.ball_words
        )
    })?;
    ensure(num_bigint::BigUint::from(d.stretch) <= d.formula_bound, || {
        format!("stretch {} above formula {}", d.stretch, d.formula_bound)
    })?;
    let group = tower.height_one_group().map_err(|e| e.to_string())?;
    let items = ball_images(&tower, &y, &d.hom, 3, u128::MAX).map_err(|e| e.to_string())?;
    let mut pairs = 0u64;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let same_image = items[i].2 == items[j].2;
            let same_element = group.equal(&items[i].1, &items[j].1);
            ensure(same_image == same_element, || {
                format!("pair ({i}, {j}): image equality {same_image}, group equality {same_element}")
            })?;
            pairs += 1;
        }
    }
    Ok(format!(
        "{} ball words, all images distinct, stretch {} <= {}, {} pairs cross-checked",
        d.ball_words, d.stretch, d.formula_bound, pairs
    ))
}

fn criterion_3() -> Check {
    for n in 0..=6u32 {
        let expected = (1u64 << (n + 2)) - (1u64 << n) - 2;
        ensure(degree(n) == num_bigint::BigUint::from(expected), || {
            format!("degree({n}) = {}", degree(n))
        })?;
    }
    for n in 0..=40u32 {
        ensure(degree(n + 1) == degree(n) * 2u32 + 2u32, || {
            format!("recursion fails at n = {n}")
        })?;
    }
    Ok("degree(n) = 2^(n+2) - 2^n - 2 for n <= 6, recursion exact for n <= 40".into())
}

fn criterion_4() -> Result<(String, String), String> {
    let bounds = SearchBounds::default();
    let report = baumslag_search(BAUMSLAG_SEED, &bounds, BAUMSLAG_TRIALS, Variant::B).map_err(|e| e.to_string())?;
    ensure(report.rows.len() as u64 == BAUMSLAG_TRIALS, || "missing trials".into())?;
    let active = report.rows.iter().filter(|r| r.hypothesis_holds).count();
    let sweep = exhaustive_n0(2, 3, 4, 60).map_err(|e| e.to_string())?;
    Ok((
        format!(
            "{} variant-B trials ({active} with the hypothesis active), sweep of {} n = 0 instances: 0 counterexamples",
            report.rows.len(),
            sweep.instances
        ),
        report_csv(&report),
    ))
}

fn genus2_sum() -> (
    AlgebraElement,
    residua_core::tower::TowerDescriptor,
    residua_core::tower::SubgroupDescriptor,
) {
    let (tower, y) = preset_genus2();
    let z = scalar_element(
        Context::free(y.basis().clone()),
        &[(1.0, "a1"), (1.0, "b1"), (1.0, "a2"), (1.0, "b2")],
    )
    .unwrap();
    (z, tower, y)
}

fn criterion_5() -> Result<(String, Vec<ExperimentRow>), String> {
    let (z, tower, y) = genus2_sum();
    let rows = permrep_experiment(&tower, &y, &z, &PERM_SIZES, &PERM_SEEDS, &ExperimentOptions::default())
        .map_err(|e| e.to_string())?;
    let med = medians(&rows);
    ensure(med.windows(2).all(|w| w[1].1 <= w[0].1), || {
        format!("medians not nonincreasing: {med:?}")
    })?;
    let last = *PERM_SIZES.last().unwrap();
    let good = rows
        .iter()
        .filter(|r| r.n == last && r.op_norm <= r.reference_upper + 0.3)
        .count();
    ensure(good >= 4, || {
        format!("only {good} of 5 seeds within reference + 0.3 at N = {last}")
    })?;
    let meds: Vec<String> = med.iter().map(|(n, m)| format!("{n}:{m:.4}")).collect();
    Ok((
        format!(
            "medians {} nonincreasing; {good}/5 seeds at N = {last} within {} + 0.3",
            meds.join(" "),
            rows[0].reference_upper
        ),
        rows,
    ))
}

/// Dense reference: largest singular value of `Σ c_w P_w` on the
/// mean-zero subspace, through an orthonormal basis of it.
fn dense_std_norm(terms: &[(Vec<u32>, Complex64)], n: usize) -> f64 {
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    for (sigma, c) in terms {
        for j in 0..n {
            b[(j, sigma[j] as usize)] += *c;
        }
    }
    // Helmert basis of the complement of the constants.
    let mut q = DMatrix::<Complex64>::zeros(n, n - 1);
    for k in 1..n {
        let s = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            q[(i, k - 1)] = Complex64::new(s, 0.0);
        }
        q[(k, k - 1)] = Complex64::new(-(k as f64) * s, 0.0);
    }
    let restricted = q.adjoint() * b * q;
    restricted.singular_values().max()
}

fn criterion_6() -> Check {
    let basis = Basis::new(["x", "y", "z"]).unwrap();
    let ctx = Context::free(basis.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for pair in 0..50u64 {
        let n = rng.random_range(3..=30usize);
        let rep = random_free_rep(&basis, n, 1000 + pair).map_err(|e| e.to_string())?;
        let k = rng.random_range(1..=5usize);
        let mut terms = Vec::new();
        for _ in 0..k {
            let len = rng.random_range(0..=4usize);
            let letters: Vec<_> = (0..len)
                .map(|_| residua_core::words::Letter::new(rng.random_range(0..3), rng.random_bool(0.5)))
                .collect();
            let w = Word::from_letters(letters);
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            terms.push((w, Coefficient::Scalar(c)));
        }
        let el = AlgebraElement::from_terms(ctx.clone(), terms).map_err(|e| e.to_string())?;
        if el.is_empty() {
            continue;
        }
        let op = StdOperator::new(&el, &rep).map_err(|e| e.to_string())?;
        let est = op.op_norm(1e-12, 200_000, pair);
        let dense_terms: Vec<(Vec<u32>, Complex64)> = el
            .terms()
            .map(|(w, c)| match c {
                Coefficient::Scalar(z) => (rep.evaluate(w), *z),
                Coefficient::Matrix(_) => unreachable!("scalar element"),
            })
            .collect();
        let reference = dense_std_norm(&dense_terms, n);
        let rel = (est.value - reference).abs() / reference.max(1e-300);
        ensure(rel <= 1e-6, || {
            format!(
                "pair {pair}: N = {n}, power iteration {} vs dense {reference} (converged {})",
                est.value, est.converged
            )
        })?;
        worst = worst.max(rel);
    }
    Ok(format!("50 pairs with N <= 30, worst relative deviation {worst:.2e}"))
}

fn random_zr(rng: &mut ChaCha8Rng, rank: usize) -> ZrElement {
    let k = rng.random_range(1..=4usize);
    let terms: Vec<(Vec<i64>, Complex64)> = (0..k)
        .map(|_| {
            let v = (0..rank).map(|_| rng.random_range(-2..=2i64)).collect();
            (
                v,
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    ZrElement::from_terms(rank, terms).unwrap()
}

fn random_klein(rng: &mut ChaCha8Rng, a_only: bool) -> KleinElement {
    let k = rng.random_range(1..=4usize);
    let terms: Vec<(KleinKey, Complex64)> = (0..k)
        .map(|_| {
            let key = (
                rng.random_range(-2..=2i64),
                if a_only { 0 } else { rng.random_range(-2..=2i64) },
            );
            (
                key,
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    KleinElement::from_terms(terms)
}

fn criterion_7() -> Check {
    let two = ZrElement::from_terms(
        1,
        [(vec![0], Complex64::new(1.0, 0.0)), (vec![1], Complex64::new(1.0, 0.0))],
    )
    .map_err(|e| e.to_string())?;
    for q in 1..=256 {
        let v = zr_norm(&two, q).map_err(|e| e.to_string())?;
        ensure(v == 2.0, || format!("zr_norm(δ0 + δ1, {q}) = {v}"))?;
    }
    let residual = klein_relation_residual(64);
    ensure(residual <= 1e-12, || {
        format!("Klein relation residual {residual:e} at q = 64")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let z = random_zr(&mut rng, 2);
        let d = (zr_norm(&z, 128).unwrap() - zr_norm(&z, 256).unwrap()).abs();
        worst = worst.max(d);
        let k = random_klein(&mut rng, false);
        let d = (klein_norm(&k, 128).unwrap() - klein_norm(&k, 256).unwrap()).abs();
        worst = worst.max(d);
    }
    ensure(worst <= 0.05, || format!("refinement change {worst} > 0.05"))?;
    let mut push_worst: f64 = 0.0;
    for _ in 0..20 {
        let k = random_klein(&mut rng, true);
        let z = k.pushdown().ok_or("pushdown failed")?;
        for q in [16, 64, 128] {
            let (x, y) = (klein_norm(&k, q).unwrap(), zr_norm(&z, q).unwrap());
            push_worst = push_worst.max((x - y).abs());
        }
    }
    ensure(push_worst <= 1e-9, || {
        format!("Klein vs pushdown deviation {push_worst:e}")
    })?;
    Ok(format!(
        "exact 2 for q <= 256, relation residual {residual:.1e}, refinement change <= {worst:.4}, pushdown deviation {push_worst:.1e}"
    ))
}

fn criterion_8() -> Result<(String, CsrfCertificate), String> {
    let (tower, y) = preset_genus2();
    let a = scalar_element(
        Context::free(y.basis().clone()),
        &[(0.25, "a1"), (0.25, "b1"), (0.25, "a2"), (0.25, "b2")],
    )
    .unwrap();
    let cert = certify(&tower, &y, 1, 0.5, &[a], &CertifyOptions::default()).map_err(|e| e.to_string())?;
    let (c, d) = (cert.c_meas, cert.degree);
    ensure(m_choice_holds(c, d, 1, 0.5, cert.m), || {
        format!("m = {} fails the m-choice inequality", cert.m)
    })?;
    ensure(cert.m == 1 || !m_choice_holds(c, d, 1, 0.5, cert.m - 1), || {
        format!("m - 1 = {} also passes", cert.m - 1)
    })?;
    let row = &cert.rows[0];
    ensure(row.chain_slack >= 0.0, || format!("chain slack {}", row.chain_slack))?;
    ensure(row.final_slack >= 0.0, || format!("final slack {}", row.final_slack))?;
    ensure(
        row.l2 <= row.proxy && row.proxy <= row.norm_upper_free && row.norm_upper_free <= row.l1,
        || {
            format!(
                "ordering l2 {} proxy {} upper {} l1 {}",
                row.l2, row.proxy, row.norm_upper_free, row.l1
            )
        },
    )?;
    Ok((
        format!(
            "m = {} (C = {c}, D = {d}), chain slack {:.4}, final slack {:.4}, proxy {:.4}",
            cert.m, row.chain_slack, row.final_slack, row.proxy
        ),
        cert,
    ))
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_residua"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn criterion_9(kesten: &str, baumslag: &str, perm: &str, cert: &str) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out_dir = dir.path().to_string_lossy().into_owned();
    let seeds = PERM_SEEDS.map(|s| s.to_string()).join(",");
    let sizes = PERM_SIZES.map(|s| s.to_string()).join(",");
    let reruns = [
        (
            "kesten",
            kesten,
            cli(&[
                "norm",
                "--basis",
                "a,b",
                "--element",
                &data("kesten.txt"),
                "--doublings",
                &KESTEN_CSV_DOUBLINGS.to_string(),
            ])?,
        ),
        (
            "baumslag",
            baumslag,
            cli(&[
                "--threads",
                "1",
                "baumslag",
                "--seed",
                &BAUMSLAG_SEED.to_string(),
                "--trials",
                &BAUMSLAG_TRIALS.to_string(),
            ])?,
        ),
        (
            "permrep",
            perm,
            cli(&[
                "--threads",
                "1",
                "permrep",
                "--tower",
                &data("genus2.tw"),
                "--seed",
                &seeds,
                "--sizes",
                &sizes,
            ])?,
        ),
        (
            "certify",
            cert,
            cli(&[
                "certify",
                "--tower",
                &data("genus2.tw"),
                "--radius",
                "1",
                "--epsilon",
                "0.5",
                "--elements",
                &data("genus2_avg.txt"),
                "--out-dir",
                &out_dir,
            ])?,
        ),
    ];
    for (name, first, second) in &reruns {
        ensure(first == second, || format!("{name} CSV differs between runs"))?;
    }
    let file = std::fs::read_to_string(dir.path().join("rows.csv")).map_err(|e| e.to_string())?;
    ensure(file == cert, || {
        "certificate rows.csv differs from the in-process CSV".into()
    })?;
    Ok(format!(
        "criteria 1, 4, 5, 8 rerun through the CLI: {} byte-identical CSVs",
        reruns.len()
    ))
}

fn report(n: usize, name: &str, elapsed: Duration, limit: Option<f64>, result: &Check) -> bool {
    let secs = elapsed.as_secs_f64();
    let in_time = limit.is_none_or(|l| secs < l);
    let ok = result.is_ok() && in_time;
    let budget = limit.map(|l| format!(" (limit {l:.0} s)")).unwrap_or_default();
    let detail = match result {
        Ok(s) if in_time => s.clone(),
        Ok(s) => format!("{s}; too slow"),
        Err(e) => e.clone(),
    };
    println!(
        "criterion {n} [{name}]: {} in {secs:.1} s{budget}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() {
    // Ignore libtest flags such as --nocapture or a name filter.
    let mut all = true;

    let (bracket, t1) = timed(|| sandwich(&kesten_element(), KESTEN_CSV_DOUBLINGS, 1.0));
    let peak = peak_rss_mib();
    let (r1, kesten_csv) = match bracket {
        Ok(b) => {
            let mut r = criterion_1(&b);
            if let (Ok(s), Some(p)) = (&r, peak) {
                r = if p < 4096.0 {
                    Ok(format!("{s}, peak memory {p:.0} MiB"))
                } else {
                    Err(format!("peak memory {p:.0} MiB"))
                };
            }
            (r, bracket_report(&b))
        }
        Err(e) => (Err(e.to_string()), String::new()),
    };
    all &= report(1, "Kesten bracket", t1, Some(120.0), &r1);

    let (r2, t2) = timed(criterion_2);
    all &= report(2, "discriminating homomorphism", t2, Some(60.0), &r2);

    let (r3, t3) = timed(criterion_3);
    all &= report(3, "distortion degree", t3, None, &r3);

    let (r4, t4) = timed(|| with_threads(None, criterion_4));
    let baumslag_csv = r4.as_ref().map(|(_, c)| c.clone()).unwrap_or_default();
    all &= report(4, "Baumslag suite", t4, Some(60.0), &r4.map(|(s, _)| s));

    let (r5, t5) = timed(|| with_threads(None, criterion_5));
    let perm_csv = r5.as_ref().map(|(_, rows)| experiment_csv(rows)).unwrap_or_default();
    all &= report(5, "strong-convergence trend", t5, None, &r5.map(|(s, _)| s));

    let (r6, t6) = timed(criterion_6);
    all &= report(6, "operator-norm oracle", t6, None, &r6);

    let (r7, t7) = timed(criterion_7);
    all &= report(7, "torus exactness and refinement", t7, None, &r7);

    let (r8, t8) = timed(criterion_8);
    let cert_csv = r8.as_ref().map(|(_, c)| certificate_csv(c)).unwrap_or_default();
    all &= report(8, "certificate end-to-end", t8, Some(120.0), &r8.map(|(s, _)| s));

    let (r9, t9) = timed(|| criterion_9(&kesten_csv, &baumslag_csv, &perm_csv, &cert_csv));
    all &= report(9, "determinism", t9, None, &r9);

    if all {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: FAILED");
        std::process::exit(1);
    }
}
