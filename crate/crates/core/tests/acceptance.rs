//! One pass/fail line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use alae::analysis::entry_bound;
use alae::dp::{align_matrix, global_score};
use alae::filters::dominated;
use alae::fm_index::{forward_bwt, forward_suffix_array};
use alae::scoring::q_value;
use alae::search::format_tsv;
use alae::sequence::concatenate;
use alae::{
    search, Alphabet, AlphabetKind, EncodedText, FmIndex, IndexError, Mode, Query, Record,
    ScoringScheme, SearchOptions, Toggles,
};
use common::{rng, trial, triples, Trial};
use rand::rngs::StdRng;
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dna(s: &str) -> Vec<u8> {
    Alphabet::dna().encode_str(s).unwrap()
}

fn dna_index(s: &str) -> FmIndex {
    FmIndex::build(&EncodedText::single("t", dna(s)), AlphabetKind::Dna).unwrap()
}

fn worked_examples() -> Check {
    let d = ScoringScheme::DEFAULT;
    let mx = align_matrix(&dna("GCTA"), &dna("GCTAG"), 4, &d);
    let expected = [
        [0, 0, 0, 0, 0, 0],
        [-7, 1, -3, -3, -3, 1],
        [-9, -6, 2, -5, -6, -6],
        [-11, -8, -5, 3, -4, -6],
        [-13, -10, -7, -4, 4, -3],
    ];
    for (i, row) in expected.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            ensure(mx.m(i, j) == v, || format!("M({i},{j}) = {} not {v}", mx.m(i, j)))?;
        }
    }
    ensure(mx.get(4, 3).ga == -4, || format!("Ga(4,3) = {}", mx.get(4, 3).ga))?;
    let sim = global_score(&dna("AAACG"), &dna("AACCG"), 4, &d);
    ensure(sim == 1, || format!("sim = {sim}"))?;

    let t = dna("GCTAGC");
    let sa = forward_suffix_array(&t);
    ensure(sa == [7, 4, 6, 2, 5, 1, 3], || format!("SA {sa:?}"))?;
    let bwt: String = forward_bwt(&t)
        .into_iter()
        .map(|c| c.map_or('$', |c| Alphabet::dna().decode(c) as char))
        .collect();
    ensure(bwt == "CTGGA$C", || format!("BWT {bwt}"))?;
    let idx = dna_index("GCTAGC");
    let r = idx.range_of(&dna("GC")).map_err(|e| e.to_string())?;
    let mut at = idx.locate(r, 2).map_err(|e| e.to_string())?;
    at.sort_unstable();
    ensure(at == [1, 5], || format!("GC at {at:?}"))?;
    Ok("matrix, Ga(4,3), sim, SA, BWT and locate exact".into())
}

/// The shared randomized fixtures: DNA trials, then protein trials.
fn fixtures() -> Vec<Trial> {
    let mut r = rng(2024);
    let mut v: Vec<Trial> = (0..500).map(|_| trial(&mut r, false, 2000)).collect();
    v.extend((0..50).map(|_| trial(&mut r, true, 2000)));
    v
}

struct Runs {
    alae: Vec<alae::SearchOutcome>,
    bwtsw: Vec<alae::SearchOutcome>,
}

fn oracle_equivalence(trials: &[Trial], runs: &mut Runs) -> Check {
    for (k, t) in trials.iter().enumerate() {
        let run = |mode| {
            search(&t.index, &t.query, &t.scheme, t.h, &SearchOptions::mode(mode))
                .map_err(|e| format!("trial {k} {mode}: {e}"))
        };
        let oracle = run(Mode::Oracle)?;
        let a = run(Mode::Alae)?;
        let b = run(Mode::Bwtsw)?;
        let want = triples(&oracle.hits);
        ensure(triples(&a.hits) == want, || {
            format!("trial {k}: alae differs (scheme {}, h {})", t.scheme, t.h)
        })?;
        ensure(triples(&b.hits) == want, || format!("trial {k}: bwtsw differs"))?;
        runs.alae.push(a);
        runs.bwtsw.push(b);
    }
    let hits: usize = runs.alae.iter().map(|o| o.hits.len()).sum();
    Ok(format!("{} trials, {hits} hits", trials.len()))
}

const FILTERS: usize = 5;

fn random_toggles(r: &mut StdRng) -> Toggles {
    Toggles {
        length_filter: r.gen(),
        score_filter: r.gen(),
        prefix_filter: r.gen(),
        domination: r.gen(),
        gmatrix: r.gen(),
        reuse: r.gen(),
        path_sharing: r.gen(),
    }
}

fn filter_set(t: &Toggles) -> [bool; FILTERS] {
    [
        t.length_filter,
        t.score_filter,
        t.prefix_filter,
        t.domination,
        t.gmatrix,
    ]
}

fn subset(a: &[bool; FILTERS], b: &[bool; FILTERS]) -> bool {
    a.iter().zip(b).all(|(x, y)| !x || *y)
}

fn toggle_soundness(trials: &[Trial]) -> Check {
    let mut r = rng(7);
    let mut compared = 0;
    for (k, t) in trials.iter().take(100).enumerate() {
        let want = triples(
            &search(&t.index, &t.query, &t.scheme, t.h, &SearchOptions::default())
                .map_err(|e| e.to_string())?
                .hits,
        );
        let mut runs = Vec::new();
        for _ in 0..8 {
            let tg = random_toggles(&mut r);
            let opts = SearchOptions {
                mode: Mode::Alae,
                toggles: tg,
                threads: 1,
            };
            let out = search(&t.index, &t.query, &t.scheme, t.h, &opts)
                .map_err(|e| format!("trial {k} {tg:?}: {e}"))?;
            ensure(triples(&out.hits) == want, || format!("trial {k}: hits differ under {tg:?}"))?;
            runs.push((tg, out.counters.calculated));
        }
        for (ta, ca) in &runs {
            for (tb, cb) in &runs {
                let same_engine = ta.reuse == tb.reuse && ta.path_sharing == tb.path_sharing;
                if same_engine && subset(&filter_set(ta), &filter_set(tb)) {
                    compared += 1;
                    ensure(cb <= ca, || {
                        format!("trial {k}: {cb} calculated with {tb:?} > {ca} with {ta:?}")
                    })?;
                }
            }
        }
    }
    Ok(format!("100 trials x 8 subsets, {compared} nested pairs monotone"))
}

fn dominance(runs: &Runs) -> Check {
    let (mut ca, mut cb, mut wa, mut wb) = (0u64, 0u64, 0u64, 0u64);
    for (k, (a, b)) in runs.alae.iter().zip(&runs.bwtsw).enumerate() {
        let (a, b) = (&a.counters, &b.counters);
        ensure(a.calculated <= b.calculated, || {
            format!("trial {k}: calculated {} > {}", a.calculated, b.calculated)
        })?;
        ensure(a.weighted_cost <= b.weighted_cost, || {
            format!("trial {k}: weighted {} > {}", a.weighted_cost, b.weighted_cost)
        })?;
        ca += a.calculated;
        cb += b.calculated;
        wa += a.weighted_cost;
        wb += b.weighted_cost;
    }
    Ok(format!(
        "{} trials, calculated {ca} vs {cb}, weighted {wa} vs {wb}",
        runs.alae.len()
    ))
}

fn analysis_table() -> Check {
    let cases = [
        ((1, -3, -5, -2), 4, 4.47, 0.6038),
        ((1, -1, -5, -2), 4, 9.05, 0.896),
        ((1, -4, -5, -2), 4, 4.50, 0.520),
        ((1, -4, -11, -1), 20, 8.28, 0.364),
        ((1, -1, -11, -1), 20, 7.49, 0.723),
    ];
    let mut shown = Vec::new();
    for ((a, b, g, e), sigma, c, x) in cases {
        let sc = ScoringScheme::new(a, b, g, e).map_err(|e| e.to_string())?;
        let (coef, exp) = entry_bound(&sc, sigma).map_err(|e| e.to_string())?;
        ensure((coef - c).abs() <= 0.01 && (exp - x).abs() <= 0.001, || {
            format!("{sc} sigma {sigma}: ({coef:.4}, {exp:.4}) vs ({c}, {x})")
        })?;
        shown.push(format!("({coef:.2}, {exp:.4})"));
    }
    Ok(shown.join(" "))
}

fn reuse_effectiveness() -> Check {
    let t0 = Instant::now();
    let mut r = rng(99);
    let mut random = |len: usize| -> Vec<u8> { (0..len).map(|_| r.gen_range(0..4u8)).collect() };
    let text = EncodedText::single("t", random(200_000));
    let index = FmIndex::build(&text, AlphabetKind::Dna).map_err(|e| e.to_string())?;
    // A stretch of the text inside the block gives both queries real hits.
    let planted = text.codes[120_000..120_300].to_vec();
    let mut block = random(1_700);
    block.extend_from_slice(&planted);
    let mut repeated = random(9_000);
    repeated.extend_from_slice(&block);
    repeated.extend(random(7_000));
    repeated.extend_from_slice(&block);
    let mut plain = random(10_000);
    plain.extend_from_slice(&planted);
    plain.extend(random(9_700));
    let scheme = ScoringScheme::DEFAULT;
    let h = 18;
    let run = |codes: &Vec<u8>, reuse: bool| {
        let mut opts = SearchOptions::default();
        opts.toggles.reuse = reuse;
        search(&index, &Query::new("q", codes.clone()), &scheme, h, &opts).map_err(|e| e.to_string())
    };
    let with = run(&repeated, true)?;
    let without = run(&repeated, false)?;
    let base = run(&plain, true)?;
    let (rr, rb) = (with.counters.reusing_ratio(), base.counters.reusing_ratio());
    ensure(rr > 0.0 && rr > rb, || format!("reusing ratio {rr} vs repeat-free {rb}"))?;
    ensure(!with.hits.is_empty(), || "planted stretch not found".into())?;
    ensure(triples(&with.hits) == triples(&without.hits), || "hits change with reuse off".into())?;
    let took = t0.elapsed();
    ensure(took <= Duration::from_secs(60), || format!("took {:.1}s", took.as_secs_f64()))?;
    Ok(format!(
        "reusing ratio {rr:.4} vs repeat-free {rb:.4}, {} hits",
        with.hits.len()
    ))
}

fn fm_index_layer() -> Check {
    let mut r = rng(5);
    let mut patterns = 0usize;
    for k in 0..50 {
        let n = r.gen_range(1..=1000);
        let codes: Vec<u8> = (0..n).map(|_| r.gen_range(0..4u8)).collect();
        let text = EncodedText::single("t", codes.clone());
        let idx = FmIndex::build(&text, AlphabetKind::Dna).map_err(|e| e.to_string())?;
        let copy = FmIndex::deserialize(&idx.serialize()).map_err(|e| e.to_string())?;
        let mut brute: HashMap<&[u8], Vec<usize>> = HashMap::new();
        for s in 0..n {
            for len in 1..=10.min(n - s) {
                brute.entry(&codes[s..s + len]).or_default().push(s + 1);
            }
        }
        for (pat, want) in &brute {
            for ix in [&idx, &copy] {
                let range = ix.range_of(pat).map_err(|e| e.to_string())?;
                ensure(range.width() == want.len(), || format!("text {k}: count of {pat:?}"))?;
                let mut got = ix.locate(range, pat.len()).map_err(|e| e.to_string())?;
                got.sort_unstable();
                ensure(&got == want, || format!("text {k}: locate of {pat:?}"))?;
            }
            patterns += 1;
        }
        for _ in 0..20 {
            let len = r.gen_range(1..=10);
            let pat: Vec<u8> = (0..len).map(|_| r.gen_range(0..4u8)).collect();
            let want = brute.get(&pat[..]).map_or(0, |v| v.len());
            ensure(idx.count(&pat).unwrap_or(0) == want, || format!("text {k}: absent {pat:?}"))?;
            ensure(copy.count(&pat).unwrap_or(0) == want, || format!("text {k}: absent copy"))?;
        }
        ensure(copy.text() == idx.text(), || format!("text {k}: roundtrip text"))?;

        let bytes = idx.serialize();
        let mut bad = bytes.clone();
        bad[0] ^= 0xff;
        ensure(FmIndex::deserialize(&bad) == Err(IndexError::BadMagic), || "magic".into())?;
        let mut bad = bytes.clone();
        bad[4] = bad[4].wrapping_add(1);
        ensure(
            matches!(FmIndex::deserialize(&bad), Err(IndexError::VersionMismatch { .. })),
            || "version".into(),
        )?;
        let cut = r.gen_range(0..bytes.len());
        ensure(
            FmIndex::deserialize(&bytes[..cut]) == Err(IndexError::Truncated),
            || format!("text {k}: truncation at {cut}"),
        )?;
        let at = r.gen_range(8..bytes.len());
        let mut bad = bytes.clone();
        bad[at] ^= 1 << r.gen_range(0..8);
        let res = FmIndex::deserialize(&bad);
        ensure(
            matches!(
                res,
                Err(IndexError::ChecksumMismatch { .. }
                    | IndexError::Truncated
                    | IndexError::Malformed(_))
            ),
            || format!("text {k}: flipped byte {at} gave {res:?}"),
        )?;
    }
    Ok(format!("50 texts, {patterns} patterns, roundtrip and corruption checks"))
}

/// Every occurrence of `P[j..j+q-1]` sits after `P[j-1]` inside one record.
fn brute_dominated(j: usize, p: &[u8], text: &EncodedText, q: usize) -> bool {
    if j < 2 || j + q - 1 > p.len() {
        return false;
    }
    let g = &p[j - 1..j - 1 + q];
    let t = &text.codes;
    let starts: Vec<usize> = text.record_starts().collect();
    let occ: Vec<usize> = (1..=t.len())
        .filter(|&x| x + q - 1 <= t.len() && &t[x - 1..x - 1 + q] == g)
        .collect();
    !occ.is_empty()
        && occ
            .iter()
            .all(|&x| x > 1 && !starts.contains(&x) && t[x - 2] == p[j - 2])
}

fn domination() -> Check {
    let mut r = rng(31);
    let mut columns = 0;
    let mut positive = 0;
    for k in 0..50 {
        let n = r.gen_range(20..=500);
        let codes: Vec<u8> = (0..n).map(|_| r.gen_range(0..4u8)).collect();
        let cut = r.gen_range(1..n);
        let text = concatenate(vec![
            Record {
                id: "a".into(),
                codes: codes[..cut].to_vec(),
            },
            Record {
                id: "b".into(),
                codes: codes[cut..].to_vec(),
            },
        ])
        .map_err(|e| e.to_string())?;
        let idx = FmIndex::build(&text, AlphabetKind::Dna).map_err(|e| e.to_string())?;
        // Half the queries are pieces of the text, so many columns are dominated.
        let m = r.gen_range(10..=60.min(n));
        let p: Vec<u8> = if k % 2 == 0 {
            let s = r.gen_range(0..=n - m);
            codes[s..s + m].to_vec()
        } else {
            (0..m).map(|_| r.gen_range(0..4u8)).collect()
        };
        let scheme = ScoringScheme::new(1, [-1, -2, -3, -4][k % 4], -5, -2).unwrap();
        let q = q_value(&scheme);
        for j in 1..=m {
            let got = dominated(j, &p, &idx, q);
            ensure(got == brute_dominated(j, &p, &text, q), || {
                format!("text {k}: column {j} gives {got}")
            })?;
            columns += 1;
            positive += got as usize;
        }
        let query = Query::new("q", p);
        let h = r.gen_range(q as i32..=2 * q as i32);
        let on = search(&idx, &query, &scheme, h, &SearchOptions::default()).map_err(|e| e.to_string())?;
        let mut opts = SearchOptions::default();
        opts.toggles.domination = false;
        let off = search(&idx, &query, &scheme, h, &opts).map_err(|e| e.to_string())?;
        ensure(triples(&on.hits) == triples(&off.hits), || format!("text {k}: hits differ"))?;
    }

    let idx = dna_index("GCTAGCTA");
    let p = dna("GCTAG");
    ensure(dominated(2, &p, &idx, 4) && !dominated(1, &p, &idx, 4), || {
        "worked instance: CTAG column 2 not dominated".into()
    })?;
    let q = Query::new("q", p);
    let d = ScoringScheme::DEFAULT;
    let on = search(&idx, &q, &d, 4, &SearchOptions::default()).map_err(|e| e.to_string())?;
    ensure(on.counters.dominated_forks == 1, || {
        format!("worked instance skipped {} forks", on.counters.dominated_forks)
    })?;
    Ok(format!("{columns} columns ({positive} dominated), worked fork skipped"))
}

fn determinism(trials: &[Trial]) -> Check {
    for (k, t) in trials.iter().enumerate() {
        for mode in [Mode::Alae, Mode::Bwtsw] {
            let run = |threads| {
                let opts = SearchOptions {
                    threads,
                    ..SearchOptions::mode(mode)
                };
                search(&t.index, &t.query, &t.scheme, t.h, &opts).map_err(|e| e.to_string())
            };
            let (one, eight) = (run(1)?, run(8)?);
            ensure(
                format_tsv(&t.index, "q", &one.hits) == format_tsv(&t.index, "q", &eight.hits),
                || format!("trial {k} {mode}: TSV differs"),
            )?;
            ensure(one.counters == eight.counters, || {
                format!("trial {k} {mode}: counters differ")
            })?;
        }
    }
    Ok(format!("{} trials, alae and bwtsw, 1 vs 8 threads", trials.len()))
}

fn main() -> ExitCode {
    let trials = fixtures();
    let mut runs = Runs {
        alae: Vec::new(),
        bwtsw: Vec::new(),
    };
    let mut failed = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut() -> Check| {
        let t0 = Instant::now();
        let res = f();
        let secs = t0.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {n} PASS {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL {name} ({secs:.1}s): {why}");
            }
        }
    };
    report(1, "worked examples", &mut worked_examples);
    report(2, "oracle equivalence", &mut || oracle_equivalence(&trials, &mut runs));
    report(3, "toggle soundness", &mut || toggle_soundness(&trials));
    report(4, "entry-count dominance", &mut || {
        if runs.alae.len() == trials.len() {
            dominance(&runs)
        } else {
            Err("criterion 2 did not complete".into())
        }
    });
    report(5, "analytical bound", &mut analysis_table);
    report(6, "reuse effectiveness", &mut reuse_effectiveness);
    report(7, "fm-index layer", &mut fm_index_layer);
    report(8, "domination", &mut domination);
    report(9, "thread determinism", &mut || determinism(&trials));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
