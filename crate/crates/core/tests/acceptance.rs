//! Acceptance checks 1-8, one PASS/FAIL line each. Runs without the libtest
//! harness; exits nonzero when any check fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{rngs::StdRng, Rng, SeedableRng};
use subword_sums::certify::{
    check_long_prefix, check_simple_family, check_two_runs, classify, find_certificate,
    AnalysisConfig, LongPrefixHypothesis, LongPrefixParams, OneRunVerdict, Verdict,
};
use subword_sums::counting::{check_doubling_recurrences, count_factor, count_subword};
use subword_sums::dynamics::{orbit, OrbitTable, WordMaps};
use subword_sums::linrep::LinearRepresentation;
use subword_sums::spectra::{detect_modulus_two, eigenvalue_moduli, eigenvalue_two_by_determinant, to_dense_f64};
use subword_sums::verify::{run_suite, Fixtures};
use subword_sums::word::all_words;
use subword_sums::BinaryWord;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn w(s: &str) -> BinaryWord {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn default_u(wd: &BinaryWord) -> BinaryWord {
    BinaryWord::last_unit(wd.len()).unwrap()
}

/// Scattered counts of every prefix of `w` in the binary expansion of `n`,
/// from the textbook dynamic program on the expansion string.
fn prefix_counts(w: &str, n: u64) -> Vec<u64> {
    let expansion = format!("{n:b}");
    let letters: Vec<char> = w.chars().collect();
    let mut ways = vec![0u64; letters.len() + 1];
    ways[0] = 1;
    for c in expansion.chars() {
        for i in (1..=letters.len()).rev() {
            if letters[i - 1] == c {
                ways[i] += ways[i - 1];
            }
        }
    }
    ways
}

/// `(-1)^{[w; u'](n)}` for each orbit element `u'`, from the definition.
fn oracle_state(w: &str, elements: &[String], n: u64) -> Vec<i64> {
    let counts = prefix_counts(w, n);
    elements
        .iter()
        .map(|u| {
            let total: u64 = u
                .chars()
                .enumerate()
                .filter(|(_, c)| *c == '1')
                .map(|(i, _)| counts[i + 1])
                .sum();
            if total % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Row-wise nonzeros of a dense integer matrix.
struct Sparse(Vec<Vec<(usize, i64)>>);

impl Sparse {
    fn of(m: &[Vec<i64>]) -> Self {
        Sparse(
            m.iter()
                .map(|row| row.iter().enumerate().filter(|(_, x)| **x != 0).map(|(j, x)| (j, *x)).collect())
                .collect(),
        )
    }

    fn mul(&self, v: &[i64]) -> Vec<i64> {
        self.0.iter().map(|row| row.iter().map(|&(j, x)| x * v[j]).sum()).collect()
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    ensure(count_subword(&w("10"), 26) == 5u32.into(), || "s_10(26) != 5".into())?;
    ensure(count_factor(&w("10"), 26).unwrap() == 2, || "e_10(26) != 2".into())?;
    let o = orbit(&w("011"), &w("001")).map_err(|e| e.to_string())?;
    let mut els: Vec<String> = o.elements().map(|e| e.to_string()).collect();
    els.sort();
    ensure(els == ["001", "011", "101", "111"], || format!("orbit {els:?}"))?;
    let rep = LinearRepresentation::new(o);
    let expect_m = vec![vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, -1, 1], vec![1, 0, 0, -1]];
    ensure(rep.dense_m() == expect_m, || format!("M = {:?}", rep.dense_m()))?;
    ensure(rep.constant_c().0 == vec![0, 2, 0, -2], || format!("c = {}", rep.constant_c()))?;
    let moduli = eigenvalue_moduli(&to_dense_f64(&rep.dense_m()));
    let r2 = 2f64.sqrt();
    ensure(
        moduli.iter().zip([0.0, 0.0, r2, r2]).all(|(a, b)| (a - b).abs() < 1e-6),
        || format!("moduli {moduli:?}"),
    )?;
    let failed: Vec<String> = run_suite(&Fixtures::reference())
        .into_iter()
        .filter(|r| !r.passed)
        .map(|r| r.line())
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!("fixtures exact, spectrum within 1e-6, {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for len in 0..=5 {
        for wd in all_words(len) {
            let ok = check_doubling_recurrences(&wd, 10_000).map_err(|e| e.to_string())?;
            ensure(ok, || format!("doubling identities fail for w = {wd:?}"))?;
        }
    }
    let mut pairs = 0;
    for len in 1..=6 {
        for wd in all_words(len) {
            let rep = LinearRepresentation::new(OrbitTable::build(&wd, &default_u(&wd)).unwrap());
            let elements: Vec<String> = rep.orbit().elements().map(|e| e.to_string()).collect();
            let ws = wd.to_string();
            let m0 = Sparse::of(&rep.matrix(0).to_dense());
            let m1 = Sparse::of(&rep.matrix(1).to_dense());
            let m = Sparse::of(&rep.dense_m());
            let states: Vec<Vec<i64>> = (0..=20_001u64).map(|n| oracle_state(&ws, &elements, n)).collect();
            let v0 = &states[0];
            let v1 = &states[1];
            let mv0 = m.mul(v0);
            let c: Vec<i64> = (0..v0.len()).map(|i| v0[i] - mv0[i] + v1[i]).collect();
            ensure(rep.constant_c().0 == c, || format!("c mismatch for {ws}"))?;
            for n in 1..=10_000usize {
                ensure(m0.mul(&states[n]) == states[2 * n], || format!("v(2n) for {ws}, n = {n}"))?;
                ensure(m1.mul(&states[n]) == states[2 * n + 1], || format!("v(2n+1) for {ws}, n = {n}"))?;
            }
            let mut sums = Vec::with_capacity(states.len());
            let mut acc = vec![0i64; v0.len()];
            for s in &states {
                for (a, x) in acc.iter_mut().zip(s) {
                    *a += x;
                }
                sums.push(acc.clone());
            }
            for big_n in 0..=10_000usize {
                let rhs: Vec<i64> = m.mul(&sums[big_n]).iter().zip(&c).map(|(a, b)| a + b).collect();
                ensure(sums[2 * big_n + 1] == rhs, || format!("V(2N+1) for {ws}, N = {big_n}"))?;
            }
            pairs += 1;
        }
    }
    Ok(format!("doubling for |w| <= 5, matrix recurrences for {pairs} words, {:.2?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    for s in ["01", "011", "10", "111", "0110", "1011"] {
        let wd = w(s);
        let rep = LinearRepresentation::new(OrbitTable::build(&wd, &default_u(&wd)).unwrap());
        let mut acc = vec![0i64; rep.size()];
        for n in 0..=100_000u64 {
            for (a, x) in acc.iter_mut().zip(rep.state_vector(n).entries()) {
                *a += x;
            }
            let fast = rep.partial_sum_fast(n).map_err(|e| e.to_string())?;
            ensure(fast.entries() == acc.as_slice(), || format!("{s}: fast and direct differ at N = {n}"))?;
            if n % 25_000 == 0 {
                let direct = rep.partial_sum_direct(n, u64::MAX).map_err(|e| e.to_string())?;
                ensure(direct.entries() == acc.as_slice(), || format!("{s}: direct sum differs at {n}"))?;
            }
        }
    }
    Ok(format!("6 words, N <= 10^5, {:.2?}", start.elapsed()))
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let top = 1u64 << 22;
    let mut summary = Vec::new();
    for s in ["01", "011"] {
        let wd = w(s);
        let rep = LinearRepresentation::new(OrbitTable::build(&wd, &default_u(&wd)).unwrap());
        // exact running sums of (-1)^{s_w(n)} and their running maximum
        let mut sum = 0i64;
        let mut best = 0i64;
        let mut running = Vec::with_capacity(top as usize + 1);
        for n in 0..=top {
            let parity = prefix_counts(s, n)[s.len()] % 2;
            sum += if parity == 0 { 1 } else { -1 };
            best = best.max(sum.abs());
            running.push((sum, best));
        }
        let samples: Vec<u64> = (0..=96).map(|k| 2f64.powf(10.0 + k as f64 / 8.0).round() as u64).collect();
        let mut ratio_max = 0f64;
        let mut points = Vec::new();
        for &n in &samples {
            let (exact, best) = running[n as usize];
            let fast = rep.partial_sum_fast(n).map_err(|e| e.to_string())?.head();
            ensure(fast == exact, || format!("{s}: fast sum {fast} != {exact} at {n}"))?;
            ratio_max = ratio_max.max(exact.unsigned_abs() as f64 / (n as f64).sqrt());
            points.push(((n as f64).ln(), (best as f64).ln()));
        }
        let slope = log_log_slope(&points);
        ensure(ratio_max <= 10.0, || format!("{s}: max |S_N|/sqrt(N) = {ratio_max}"))?;
        ensure((0.35..=0.60).contains(&slope), || format!("{s}: slope {slope}"))?;
        summary.push(format!("{s}: max ratio {ratio_max:.3}, slope {slope:.3}"));
    }
    Ok(format!("{}, {:.2?}", summary.join("; "), start.elapsed()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let cfg = AnalysisConfig::default();
    for l in 2..=12 {
        let r = classify(&BinaryWord::ones(l).unwrap(), None, &cfg).map_err(|e| e.to_string())?;
        let want = if l.is_power_of_two() { Verdict::ProvedP } else { Verdict::ProvedNotP };
        ensure(r.verdict == want, || format!("1^{l}: {} instead of {want}", r.verdict))?;
    }
    let verdict = subword_sums::certify::check_one_run(1, 3).map_err(|e| e.to_string())?;
    let OneRunVerdict::ProvedNotP { obstruction } = verdict else {
        return Err("1^3 not refuted".into());
    };
    let ratios: Vec<f64> = obstruction.ratios.iter().map(|r| r.1).collect();
    ensure(obstruction.ratios.first().map(|r| r.0) == Some(10), || "range must start at 10".into())?;
    ensure(obstruction.ratios.last().map(|r| r.0) == Some(22), || "range must end at 22".into())?;
    // independent evaluation of the same ratios
    let wd = w("111");
    let rep = LinearRepresentation::new(OrbitTable::build(&wd, &default_u(&wd)).unwrap());
    for &(n, ratio) in &obstruction.ratios {
        let s = rep.partial_sum_fast((1u64 << n) - 1).unwrap().head();
        ensure((s.unsigned_abs() as f64 / (1u64 << n) as f64 - ratio).abs() < 1e-12, || format!("ratio at {n}"))?;
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    ensure(lo > 0.0, || "a ratio vanishes".into())?;
    ensure(obstruction.empirical_ok, || format!("ratios drift below delta/2: {ratios:?}"))?;
    ensure(hi <= 2.0 * lo, || format!("ratios not stable within factor 2: {lo}..{hi}"))?;
    Ok(format!("l = 2..12 exact; 1^3 ratios in [{lo:.4}, {hi:.4}], {:.2?}", start.elapsed()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    for len in 1..=8 {
        for wd in all_words(len) {
            let maps = WordMaps::new(&wd);
            for a in 0..2u8 {
                let mut seen = vec![false; 1 << len];
                for start_u in 0..(1u64 << len) {
                    if seen[start_u as usize] {
                        continue;
                    }
                    let mut cur = start_u;
                    let mut length = 0usize;
                    loop {
                        seen[cur as usize] = true;
                        cur = maps.step_bits(a, cur).1;
                        length += 1;
                        if cur == start_u {
                            break;
                        }
                    }
                    ensure(length.is_power_of_two(), || format!("S_{a}({wd}) has a cycle of length {length}"))?;
                }
            }
        }
    }
    for a in 0..2u8 {
        for l in 1..=10 {
            let wd = BinaryWord::repeated(a, l).unwrap();
            let len = subword_sums::dynamics::cycle_length(&wd, a, &default_u(&wd)).unwrap();
            ensure(len == l.next_power_of_two(), || format!("cycle of {a}^{l} has length {len}"))?;
        }
    }
    for a in 0..2u8 {
        for j in 1..=32usize {
            let wd = BinaryWord::repeated(a, j + 1).unwrap();
            let maps = WordMaps::new(&wd);
            let bits: Vec<usize> = (0..usize::BITS as usize).filter(|b| j >> b & 1 == 1).collect();
            let mut acc = 0u64;
            for subset in 0..(1u32 << bits.len()) {
                let j_i: usize = bits.iter().enumerate().filter(|(i, _)| subset >> i & 1 == 1).map(|(_, b)| 1 << b).sum();
                let mut cur = 1u64;
                for _ in 0..j_i {
                    cur = maps.step_bits(a, cur).1;
                }
                acc ^= cur;
            }
            ensure(acc == 1 << j, || format!("xor identity fails for a = {a}, j = {j}"))?;
        }
    }
    Ok(format!("cycle lengths, single runs and xor identity, {:.2?}", start.elapsed()))
}

fn random_long_prefix(rng: &mut StdRng) -> LongPrefixParams {
    loop {
        let a = rng.gen_range(0..2u8);
        let k = [1usize, 2, 4, 8][rng.gen_range(0..4)];
        let len = rng.gen_range(1..=10usize);
        let wd = BinaryWord::from_bits(rng.gen_range(0..1u64 << len), len).unwrap();
        if wd.contains_factor(&BinaryWord::repeated(a, k).unwrap()) {
            continue;
        }
        let b = rng.gen_range(0..2u8);
        // positions carrying the opposite of b may hold a 1
        let allowed: Vec<usize> = (1..=len).filter(|&r| wd.letter(r).unwrap() != b).collect();
        if allowed.is_empty() {
            continue;
        }
        let mut u = 0u64;
        while u == 0 {
            for &r in &allowed {
                if rng.gen_bool(0.5) {
                    u |= 1 << (len - r);
                }
            }
        }
        let u = BinaryWord::from_bits(u, len).unwrap();
        return LongPrefixParams { a, k, w: wd, b, u };
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut simple = 0;
    for a in 0..2u8 {
        for k in [2usize, 4, 8] {
            for j in 2..=k {
                for len in 0..=3 {
                    for wd in all_words(len) {
                        let c = check_simple_family(a, &wd, k, j)
                            .map_err(|e| format!("simple a={a} w={wd:?} k={k} j={j}: {e}"))?;
                        c.replay().map_err(|e| e.to_string())?;
                        simple += 1;
                    }
                }
            }
        }
    }
    let mut two = 0;
    for a in 0..2u8 {
        for j in 1..=6 {
            for k in 1..=6 {
                for ub in 1..(1u64 << k) {
                    let u = BinaryWord::from_bits(ub, k).unwrap();
                    check_two_runs(a, j, k, &u).map_err(|e| format!("two-runs a={a} j={j} k={k} u={u}: {e}"))?;
                    two += 1;
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..100 {
        let p = random_long_prefix(&mut rng);
        ensure(p.validate().is_ok(), || format!("generator produced invalid {p:?}"))?;
        check_long_prefix(p.a, p.k, &p.w, p.b, &p.u).map_err(|e| format!("long-prefix {p:?}: {e}"))?;
    }
    let mut rejected = 0;
    for _ in 0..100 {
        let p = random_long_prefix(&mut rng);
        let mut cases = vec![
            (LongPrefixParams { k: 3, ..p }, LongPrefixHypothesis::KNotPowerOfTwo),
            (LongPrefixParams { u: BinaryWord::zeros(p.w.len()).unwrap(), ..p }, LongPrefixHypothesis::ZeroU),
            (
                LongPrefixParams { w: BinaryWord::repeated(p.a, p.k).unwrap().concat(&p.w).unwrap(), u: BinaryWord::zeros(p.k).unwrap().concat(&p.u).unwrap(), ..p },
                LongPrefixHypothesis::RunIsFactor,
            ),
        ];
        // a 1 of u placed on a letter equal to b
        if let Some(r) = (2..=p.w.len()).find(|&r| p.w.letter(r).unwrap() == p.b) {
            let u = BinaryWord::from_bits(p.u.bits() | 1 << (p.w.len() - r), p.w.len()).unwrap();
            cases.push((LongPrefixParams { u, ..p }, LongPrefixHypothesis::NotFixed));
        }
        if p.w.first() == Some(p.b) {
            let u = BinaryWord::from_bits(1 << (p.w.len() - 1), p.w.len()).unwrap();
            cases.push((LongPrefixParams { u, ..p }, LongPrefixHypothesis::NonzeroSign));
        }
        for (bad, hyp) in cases {
            ensure(bad.validate() == Err(hyp), || format!("{bad:?} validates as {:?}, expected {hyp:?}", bad.validate()))?;
            let err = check_long_prefix(bad.a, bad.k, &bad.w, bad.b, &bad.u)
                .err()
                .ok_or_else(|| format!("{bad:?} accepted"))?;
            ensure(err.to_string().contains(&hyp.to_string()), || format!("error {err} does not name {hyp}"))?;
            rejected += 1;
        }
    }
    Ok(format!(
        "{simple} simple, {two} two-runs, 100 long-prefix accepted, {rejected} rejections named, {:.2?}",
        start.elapsed()
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut words = 0;
    let mut certified = 0;
    for len in 1..=8 {
        for wd in all_words(len) {
            let u = default_u(&wd);
            let rep = LinearRepresentation::new(OrbitTable::build(&wd, &u).unwrap());
            let phases = detect_modulus_two(rep.matrix(0), rep.matrix(1)).map_err(|e| e.to_string())?;
            let (det, zero) = eigenvalue_two_by_determinant(&rep.dense_m(), usize::MAX).map_err(|e| e.to_string())?;
            if let Some(c) = find_certificate(&wd, &u).map_err(|e| e.to_string())? {
                c.replay().map_err(|e| e.to_string())?;
                ensure(!phases.present, || format!("{wd}: certificate but modulus-2 eigenvalue"))?;
                certified += 1;
            }
            ensure(zero == phases.has_eigenvalue_two(), || {
                format!("{wd}: det(2I - M) = {det} but phase decider says {:?}", phases.phases)
            })?;
            words += 1;
        }
    }
    Ok(format!("{words} words, {certified} certified, 0 violations, {:.2?}", start.elapsed()))
}

fn main() {
    let checks: [Check; 8] = [
        ("fixture regression", criterion_1),
        ("recurrence identities", criterion_2),
        ("fast vs direct partial sums", criterion_3),
        ("square-root growth of 01 and 011", criterion_4),
        ("one-run characterization", criterion_5),
        ("cycle structure", criterion_6),
        ("theorem families", criterion_7),
        ("decider cross-consistency", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", checks.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
