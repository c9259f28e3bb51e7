//! Search orchestration: the ALAE engine, the plain trie baseline and the
//! full-DP oracle behind one entry point, plus result aggregation and the
//! work counters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dp::{oracle_search, AlignmentHit, Score};
use crate::error::{FilterError, SearchError};
use crate::filters::{build_qgram_index, dominated, g_check, BitColumn, FloorRule, GMatrix};
use crate::fm_index::{FmIndex, SaRange};
use crate::reuse::{ClassJob, ForkRules, Row, RowKernel, Traversal};
use crate::scoring::{ScoringScheme, SearchParams};
use crate::sequence::Query;

/// Cells allowed in oracle mode.
pub const ORACLE_LIMIT: u64 = 100_000_000;

/// Classes whose occurrence count is at most this get an exact leftmost
/// start for the row floor; wider classes assume position 1.
const LOCATE_FOR_FLOOR: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Alae,
    Bwtsw,
    Oracle,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "alae" => Ok(Mode::Alae),
            "bwtsw" => Ok(Mode::Bwtsw),
            "oracle" => Ok(Mode::Oracle),
            other => Err(format!("unknown mode {other:?} (expected alae, bwtsw or oracle)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Alae => "alae",
            Mode::Bwtsw => "bwtsw",
            Mode::Oracle => "oracle",
        })
    }
}

/// Individual switches for the ALAE engine. Other modes ignore them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Toggles {
    pub length_filter: bool,
    pub score_filter: bool,
    pub prefix_filter: bool,
    pub domination: bool,
    /// Bitwise global filter; only for small `n * m`.
    pub gmatrix: bool,
    pub reuse: bool,
    pub path_sharing: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Toggles {
            length_filter: true,
            score_filter: true,
            prefix_filter: true,
            domination: true,
            gmatrix: false,
            reuse: true,
            path_sharing: true,
        }
    }
}

impl Toggles {
    /// Every filter, reuse and path sharing off.
    pub fn none() -> Self {
        Toggles {
            length_filter: false,
            score_filter: false,
            prefix_filter: false,
            domination: false,
            gmatrix: false,
            reuse: false,
            path_sharing: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub mode: Mode,
    pub toggles: Toggles,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            mode: Mode::Alae,
            toggles: Toggles::default(),
            threads: 1,
        }
    }
}

impl SearchOptions {
    pub fn mode(mode: Mode) -> Self {
        SearchOptions {
            mode,
            ..Default::default()
        }
    }
}

/// Work counters. `weighted_cost` charges every computed cell by the number
/// of neighbours it reads (1, 2 or 3).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub calculated: u64,
    pub reused: u64,
    pub accessed: u64,
    /// Exact-match entries filled in without computation.
    pub assigned: u64,
    pub weighted_cost: u64,
    pub pruned_forks: u64,
    pub dominated_forks: u64,
    pub baseline_calculated: Option<u64>,
    pub baseline_weighted_cost: Option<u64>,
}

impl Counters {
    pub fn add(&mut self, o: &Counters) {
        self.calculated += o.calculated;
        self.reused += o.reused;
        self.assigned += o.assigned;
        self.weighted_cost += o.weighted_cost;
        self.pruned_forks += o.pruned_forks;
        self.dominated_forks += o.dominated_forks;
        self.finish();
    }

    pub fn finish(&mut self) {
        self.accessed = self.calculated + self.reused;
    }

    pub fn with_baseline(mut self, base: &Counters) -> Self {
        self.baseline_calculated = Some(base.calculated);
        self.baseline_weighted_cost = Some(base.weighted_cost);
        self
    }

    pub fn reusing_ratio(&self) -> f64 {
        if self.accessed == 0 {
            0.0
        } else {
            self.reused as f64 / self.accessed as f64
        }
    }

    /// Key=value lines for reports.
    pub fn report(&self) -> String {
        let filtering = match ratios(self) {
            Ok((f, _)) => format!("{f:.6}"),
            Err(_) => "NA".into(),
        };
        let mut s = format!(
            "calculated={}\nreused={}\naccessed={}\nfiltering_ratio={}\nreusing_ratio={:.6}\n",
            self.calculated,
            self.reused,
            self.accessed,
            filtering,
            self.reusing_ratio()
        );
        s.push_str(&format!(
            "assigned={}\nweighted_cost={}\npruned_forks={}\ndominated_forks={}\n",
            self.assigned, self.weighted_cost, self.pruned_forks, self.dominated_forks
        ));
        s
    }
}

/// `(filtering_ratio, reusing_ratio)`.
pub fn ratios(c: &Counters) -> Result<(f64, f64), SearchError> {
    let base = match c.baseline_calculated {
        Some(b) if b > 0 => b,
        _ => return Err(SearchError::MissingBaseline),
    };
    let filtering = (base as f64 - c.calculated as f64) / base as f64;
    Ok((filtering.clamp(0.0, 1.0), c.reusing_ratio()))
}

/// Record boundaries of the indexed text.
#[derive(Clone, Debug)]
pub struct RecordMap {
    starts: Vec<usize>,
}

impl RecordMap {
    pub fn new(starts: Vec<usize>) -> Self {
        RecordMap { starts }
    }

    pub fn from_index(index: &FmIndex) -> Self {
        RecordMap::new(index.records().iter().map(|r| r.start).collect())
    }

    pub fn record_of(&self, pos: usize) -> usize {
        self.starts.partition_point(|&s| s <= pos).saturating_sub(1)
    }

    #[inline]
    pub fn same_record(&self, start: usize, end: usize) -> bool {
        self.starts.len() <= 1 || self.record_of(start) == self.record_of(end)
    }

    pub fn is_record_start(&self, pos: usize) -> bool {
        self.starts.binary_search(&pos).is_ok()
    }
}

/// Best `(score, start_t)` per end pair. Higher score wins; equal scores
/// keep the smaller start.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HitMap {
    best: BTreeMap<(usize, usize), (Score, usize)>,
}

impl HitMap {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn offer(&mut self, end_t: usize, end_p: usize, score: Score, start_t: usize) {
        self.best
            .entry((end_t, end_p))
            .and_modify(|e| {
                if score > e.0 || (score == e.0 && start_t < e.1) {
                    *e = (score, start_t);
                }
            })
            .or_insert((score, start_t));
    }

    pub fn merge(&mut self, other: HitMap) {
        for ((t, p), (s, st)) in other.best {
            self.offer(t, p, s, st);
        }
    }

    pub fn len(&self) -> usize {
        self.best.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best.is_empty()
    }

    /// Hits scoring at least `h`, sorted.
    pub fn into_hits(self, h: Score) -> Vec<AlignmentHit> {
        let mut v: Vec<AlignmentHit> = self
            .best
            .into_iter()
            .filter(|(_, (s, _))| *s >= h)
            .map(|((end_t, end_p), (score, start_t))| AlignmentHit {
                end_t,
                end_p,
                score,
                start_t,
            })
            .collect();
        v.sort();
        v
    }
}

/// Folds a stream of `(end_t, end_p, score, start_t)` candidates.
pub fn aggregate(candidates: impl IntoIterator<Item = (usize, usize, Score, usize)>) -> HitMap {
    let mut map = HitMap::new();
    for (t, p, s, st) in candidates {
        map.offer(t, p, s, st);
    }
    map
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub hits: Vec<AlignmentHit>,
    pub counters: Counters,
}

/// Runs one query against the index.
pub fn search(
    index: &FmIndex,
    query: &Query,
    scheme: &ScoringScheme,
    h: Score,
    opts: &SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    let unknown = index.sigma() as u8;
    if let Some(&c) = query.codes.iter().find(|&&c| c > unknown) {
        return Err(SearchError::AlphabetMismatch(c));
    }
    let m = query.len();
    let params = SearchParams::new(*scheme, h, m, index.len())?;
    if m < params.q {
        return Err(FilterError::QueryTooShort { m, q: params.q }.into());
    }
    let (hits, mut counters) = match opts.mode {
        Mode::Oracle => {
            let cells = (index.len() as u64).saturating_mul(m as u64);
            if cells > ORACLE_LIMIT {
                return Err(SearchError::OracleTooLarge {
                    cells,
                    limit: ORACLE_LIMIT,
                });
            }
            let text = index.text();
            (
                oracle_search(&text, query, scheme, h, unknown),
                Counters::default(),
            )
        }
        Mode::Bwtsw => with_pool(opts.threads, || bwtsw(index, query, &params))?,
        Mode::Alae => alae(index, query, &params, opts)?,
    };
    counters.finish();
    Ok(SearchOutcome { hits, counters })
}

fn with_pool<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, SearchError> {
    if threads == 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SearchError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Per-class results merged in class order.
fn fold(parts: Vec<(HitMap, Counters)>) -> (HitMap, Counters) {
    let mut hits = HitMap::new();
    let mut tally = Counters::default();
    for (h, c) in parts {
        hits.merge(h);
        tally.add(&c);
    }
    (hits, tally)
}

fn alae(
    index: &FmIndex,
    query: &Query,
    params: &SearchParams,
    opts: &SearchOptions,
) -> Result<(Vec<AlignmentHit>, Counters), SearchError> {
    let tg = opts.toggles;
    let p = &query.codes[..];
    let m = p.len();
    let n = index.len();
    let unknown = index.sigma() as u8;
    let seed_len = if tg.prefix_filter { params.seed_len } else { 1 };
    let qgrams = build_qgram_index(p, seed_len, unknown)?;
    let records = RecordMap::from_index(index);
    let depth_cap = if tg.length_filter { params.l_max } else { n };
    let mut gm = if tg.gmatrix {
        Some(GMatrix::new(n, m)?)
    } else {
        None
    };

    let mut tally = Counters::default();
    let mut jobs = Vec::new();
    for (gram, origins) in qgrams.iter() {
        let range = index.range_of(gram)?;
        if range.is_empty() {
            continue;
        }
        let mut live = Vec::with_capacity(origins.len());
        for &j in origins {
            if tg.domination && dominated(j, p, index, seed_len) {
                tally.dominated_forks += 1;
            } else {
                live.push(j);
            }
        }
        if !live.is_empty() {
            jobs.push(ClassJob {
                gram,
                range,
                origins: live,
            });
        }
    }
    log::debug!("{} prefix classes, seed length {}", jobs.len(), seed_len);

    let rules_for = |job: &ClassJob| {
        let pi_t_min = if job.range.width() <= LOCATE_FOR_FLOOR {
            index
                .locate(job.range, seed_len)
                .ok()
                .and_then(|v| v.first().copied())
                .unwrap_or(1)
        } else {
            1
        };
        let floor = FloorRule::new(params, pi_t_min, tg.length_filter, tg.score_filter);
        ForkRules::new(p, params.scheme, unknown, params.threshold, seed_len, floor, tg.reuse)
    };
    let traversal = |rules| Traversal {
        index,
        records: &records,
        rules,
        depth_cap,
        path_sharing: tg.path_sharing,
    };

    let (hits, part) = if let Some(g) = gm.as_mut() {
        // Bits written by one class feed the checks of later ones, so the
        // order is fixed and the run is sequential.
        let mut hits = HitMap::new();
        let mut part = Counters::default();
        for mut job in jobs {
            job.origins = gmatrix_origins(index, &records, &job, seed_len, g, &mut part)?;
            if job.origins.is_empty() {
                continue;
            }
            traversal(rules_for(&job)).traverse_prefix_class(&job, &mut hits, &mut part, Some(g));
        }
        (hits, part)
    } else {
        let run = |job: &ClassJob| {
            let mut hits = HitMap::new();
            let mut c = Counters::default();
            traversal(rules_for(job)).traverse_prefix_class(job, &mut hits, &mut c, None);
            (hits, c)
        };
        let parts: Vec<(HitMap, Counters)> = if opts.threads == 1 {
            jobs.iter().map(run).collect()
        } else {
            with_pool(opts.threads, || jobs.par_iter().map(run).collect())?
        };
        fold(parts)
    };
    tally.add(&part);
    Ok((hits.into_hits(params.threshold), tally))
}

/// Drops origins `j` whose every occurrence `t` of the class gram is
/// preceded by an alignment already known to end at `(t - 1, j - 1)`.
fn gmatrix_origins(
    index: &FmIndex,
    records: &RecordMap,
    job: &ClassJob,
    seed_len: usize,
    g: &GMatrix,
    tally: &mut Counters,
) -> Result<Vec<usize>, SearchError> {
    let occ = index.locate(job.range, seed_len)?;
    if occ.iter().any(|&t| t == 1 || records.is_record_start(t)) {
        return Ok(job.origins.clone());
    }
    let before: Vec<usize> = occ.iter().map(|&t| t - 1).collect();
    let z = BitColumn::from_positions(index.len(), &before);
    let mut kept = Vec::with_capacity(job.origins.len());
    for &j in &job.origins {
        if j > 1 && g_check(g, j - 1, &z)? {
            tally.pruned_forks += 1;
        } else {
            kept.push(j);
        }
    }
    Ok(kept)
}

struct BaseFrame {
    depth: usize,
    row: Row,
    children: Vec<(u8, SaRange)>,
    next: usize,
}

/// Plain suffix-trie descent: full rows, positivity pruning, depth cap.
fn bwtsw(
    index: &FmIndex,
    query: &Query,
    params: &SearchParams,
) -> (Vec<AlignmentHit>, Counters) {
    let records = RecordMap::from_index(index);
    let kernel = RowKernel {
        p: &query.codes,
        scheme: params.scheme,
        unknown: index.sigma() as u8,
        floor: FloorRule::positivity(),
        flat_cost: Some(3),
    };
    let h = params.threshold;
    let cap = params.l_max;
    let emit = |range: SaRange, depth: usize, row: &Row, hits: &mut HitMap| {
        if !row.iter().any(|(_, c)| c.m >= h) {
            return;
        }
        let Ok(occ) = index.locate(range, depth) else {
            return;
        };
        for t in occ {
            let end = t + depth - 1;
            if !records.same_record(t, end) {
                continue;
            }
            for &(j, c) in row {
                if c.m >= h {
                    hits.offer(end, j, c.m, t);
                }
            }
        }
    };
    let subtree = |&(c, r): &(u8, SaRange)| {
        let mut hits = HitMap::new();
        let mut tally = Counters::default();
        let row = kernel.first_row(c, &mut tally);
        if row.is_empty() {
            return (hits, tally);
        }
        emit(r, 1, &row, &mut hits);
        let children = if cap > 1 {
            index.enumerate_children(r)
        } else {
            Vec::new()
        };
        let mut stack = vec![BaseFrame {
            depth: 1,
            row,
            children,
            next: 0,
        }];
        while let Some(top) = stack.last_mut() {
            if top.next == top.children.len() {
                stack.pop();
                continue;
            }
            let (c, r) = top.children[top.next];
            top.next += 1;
            let i = top.depth + 1;
            let row = kernel.next_row(&top.row, c, i, 1, Row::new(), &mut tally);
            if row.is_empty() {
                continue;
            }
            emit(r, i, &row, &mut hits);
            let children = if i < cap {
                index.enumerate_children(r)
            } else {
                Vec::new()
            };
            stack.push(BaseFrame {
                depth: i,
                row,
                children,
                next: 0,
            });
        }
        (hits, tally)
    };
    let roots = index.enumerate_children(index.full_range());
    let parts: Vec<(HitMap, Counters)> = if rayon::current_num_threads() > 1 {
        roots.par_iter().map(subtree).collect()
    } else {
        roots.iter().map(subtree).collect()
    };
    let (hits, tally) = fold(parts);
    (hits.into_hits(h), tally)
}

/// One TSV line per hit, sorted by record, start, end and query column.
/// Positions are local to their record.
pub fn format_tsv(index: &FmIndex, query_id: &str, hits: &[AlignmentHit]) -> String {
    let recs = index.records();
    let records = RecordMap::from_index(index);
    let mut rows: Vec<(usize, usize, usize, usize, Score)> = hits
        .iter()
        .map(|hit| {
            let r = records.record_of(hit.end_t);
            let base = recs.get(r).map_or(1, |x| x.start);
            (
                r,
                hit.start_t + 1 - base,
                hit.end_t + 1 - base,
                hit.end_p,
                hit.score,
            )
        })
        .collect();
    rows.sort();
    let mut out = String::new();
    for (r, s, e, j, score) in rows {
        let id = recs.get(r).map_or("", |x| x.id.as_str());
        out.push_str(&format!("{query_id}\t{id}\t{s}\t{e}\t{j}\t{score}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{Alphabet, AlphabetKind, EncodedText};

    fn enc(s: &str) -> Vec<u8> {
        Alphabet::dna().encode_str(s).unwrap()
    }

    fn index(s: &str) -> FmIndex {
        FmIndex::build(&EncodedText::single("t", enc(s)), AlphabetKind::Dna).unwrap()
    }

    #[test]
    fn aggregate_keeps_max_then_smallest_start() {
        let a = aggregate([(4, 2, 5, 1), (4, 2, 7, 2)]);
        assert_eq!(a.into_hits(0)[0].score, 7);
        let b = aggregate([(4, 2, 5, 10), (4, 2, 5, 3)]);
        assert_eq!(b.into_hits(0)[0].start_t, 3);
        let mut fwd = vec![(1, 1, 3, 1), (1, 1, 3, 0), (2, 2, 4, 1), (1, 1, 2, 0)];
        let x = aggregate(fwd.clone());
        fwd.reverse();
        assert_eq!(aggregate(fwd), x);
    }

    #[test]
    fn ratio_arithmetic() {
        let c = Counters {
            calculated: 400,
            baseline_calculated: Some(1000),
            ..Default::default()
        };
        let mut c = c;
        c.finish();
        let (f, r) = ratios(&c).unwrap();
        assert!((f - 0.6).abs() < 1e-12);
        assert_eq!(r, 0.0);
        assert_eq!(ratios(&Counters::default()), Err(SearchError::MissingBaseline));
    }

    #[test]
    fn self_match_in_every_mode() {
        let idx = index("GCTAG");
        let q = Query::new("q", enc("GCTAG"));
        for mode in [Mode::Alae, Mode::Bwtsw, Mode::Oracle] {
            let out = search(&idx, &q, &ScoringScheme::DEFAULT, 5, &SearchOptions::mode(mode)).unwrap();
            assert_eq!(
                out.hits,
                vec![AlignmentHit {
                    end_t: 5,
                    end_p: 5,
                    score: 5,
                    start_t: 1
                }],
                "{mode}"
            );
        }
    }

    #[test]
    fn domination_skips_the_inner_fork() {
        let idx = index("GCTAGCTA");
        let q = Query::new("q", enc("GCTAG"));
        let on = search(&idx, &q, &ScoringScheme::DEFAULT, 4, &SearchOptions::default()).unwrap();
        let mut opts = SearchOptions::default();
        opts.toggles.domination = false;
        let off = search(&idx, &q, &ScoringScheme::DEFAULT, 4, &opts).unwrap();
        assert_eq!(on.hits, off.hits);
        assert!(on.counters.dominated_forks >= 1);
        assert!(on.counters.calculated <= off.counters.calculated);
    }

    #[test]
    fn short_query_is_rejected() {
        let idx = index("GCTAG");
        let q = Query::new("q", enc("GC"));
        assert!(matches!(
            search(&idx, &q, &ScoringScheme::DEFAULT, 2, &SearchOptions::default()),
            Err(SearchError::Filter(FilterError::QueryTooShort { m: 2, q: 4 }))
        ));
    }

    #[test]
    fn tsv_uses_local_positions() {
        let text = crate::sequence::concatenate(vec![
            crate::sequence::Record {
                id: "a".into(),
                codes: enc("TTTT"),
            },
            crate::sequence::Record {
                id: "b".into(),
                codes: enc("GCTAG"),
            },
        ])
        .unwrap();
        let idx = FmIndex::build(&text, AlphabetKind::Dna).unwrap();
        let q = Query::new("q", enc("GCTAG"));
        let out = search(&idx, &q, &ScoringScheme::DEFAULT, 5, &SearchOptions::default()).unwrap();
        assert_eq!(format_tsv(&idx, "q", &out.hits), "q\tb\t1\t5\t5\t5\n");
    }
}
