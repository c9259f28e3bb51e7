//! Meaningless-entry filters: q-gram seeding, the score floor, the first
//! gap-open test, q-prefix domination and the G-matrix cross-check.

use std::collections::BTreeMap;

use crate::dp::Score;
use crate::error::FilterError;
use crate::fm_index::FmIndex;
use crate::scoring::{ScoringScheme, SearchParams};

/// Inverted lists of the q-grams of the query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QGramIndex {
    q: usize,
    grams: BTreeMap<Vec<u8>, Vec<usize>>,
}

impl QGramIndex {
    pub fn q(&self) -> usize {
        self.q
    }

    /// Ascending 1-based start columns of `gram` in the query.
    pub fn positions(&self, gram: &[u8]) -> Option<&[usize]> {
        self.grams.get(gram).map(Vec::as_slice)
    }

    /// Distinct grams in lexicographic code order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u8], &[usize])> {
        self.grams.iter().map(|(g, p)| (g.as_slice(), p.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }
}

/// Slides a window of length `q` over `p`. Windows containing `unknown`
/// (the never-match code) are skipped: they cannot seed an exact match.
pub fn build_qgram_index(p: &[u8], q: usize, unknown: u8) -> Result<QGramIndex, FilterError> {
    if q == 0 || p.len() < q {
        return Err(FilterError::QueryTooShort { m: p.len(), q });
    }
    let mut grams: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    let mut last_unknown: Option<usize> = None;
    for (k, &c) in p.iter().enumerate() {
        if c == unknown {
            last_unknown = Some(k);
        }
        if k + 1 < q {
            continue;
        }
        let start = k + 1 - q;
        if last_unknown.is_some_and(|u| u >= start) {
            continue;
        }
        grams.entry(p[start..=k].to_vec()).or_default().push(start + 1);
    }
    Ok(QGramIndex { q, grams })
}

/// Score below which an entry can no longer reach `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloorRule {
    pub h: Score,
    pub m: usize,
    pub s_a: Score,
    /// Highest row an alignment may still reach, if bounded.
    pub row_limit: Option<usize>,
    /// When false only non-positive entries are dropped.
    pub enabled: bool,
}

impl FloorRule {
    pub fn new(params: &SearchParams, pi_t_min: usize, use_length: bool, enabled: bool) -> Self {
        let remaining = (params.n + 1).saturating_sub(pi_t_min);
        let row_limit = if use_length {
            params.l_max.min(remaining)
        } else {
            remaining
        };
        FloorRule {
            h: params.threshold,
            m: params.m,
            s_a: params.scheme.matched,
            row_limit: Some(row_limit),
            enabled,
        }
    }

    /// Only the positivity test.
    pub fn positivity() -> Self {
        FloorRule {
            h: 0,
            m: 0,
            s_a: 0,
            row_limit: None,
            enabled: false,
        }
    }

    /// The column part of the floor; no larger than `floor(i, j)` for any row.
    #[inline]
    pub fn column_term(&self, j: usize) -> i64 {
        if !self.enabled {
            return 0;
        }
        self.h as i64 - (self.m as i64 - j as i64) * self.s_a as i64 - 1
    }

    #[inline]
    pub fn row_term(&self, i: usize) -> i64 {
        match (self.enabled, self.row_limit) {
            (true, Some(limit)) => {
                self.h as i64 - (limit as i64 - i as i64) * self.s_a as i64 - 1
            }
            _ => 0,
        }
    }

    #[inline]
    pub fn floor(&self, i: usize, j: usize) -> Score {
        0i64.max(self.column_term(j)).max(self.row_term(i)) as Score
    }
}

/// `max{0, H - (m - j) s_a - 1, H - (min{L_max, n - pi_t_min + 1} - i) s_a - 1}`.
/// An entry whose score does not exceed this cannot contribute to a hit.
pub fn score_floor(i: usize, j: usize, params: &SearchParams, pi_t_min: usize) -> Score {
    FloorRule::new(params, pi_t_min, true, true).floor(i, j)
}

/// True once a diagonal score can pay for opening a gap.
#[inline]
pub fn fgoe_reached(m_value: Score, scheme: &ScoringScheme) -> bool {
    m_value > scheme.gap_open_barrier()
}

/// Whether every occurrence of `g = P[j, j + q - 1]` in the text is
/// immediately preceded by `P[j - 1]` inside the same record, which makes
/// every alignment seeded at column `j` extendable by one match to the left.
pub fn dominated(j: usize, p: &[u8], index: &FmIndex, q: usize) -> bool {
    if j < 2 || j + q - 1 > p.len() {
        return false;
    }
    let pred = p[j - 2];
    if pred as usize >= index.sigma() {
        return false;
    }
    let g = &p[j - 1..j - 1 + q];
    if index.pattern_at_record_start(g) {
        return false;
    }
    let Ok(plain) = index.count(g) else {
        return false;
    };
    if plain == 0 {
        return false;
    }
    let extended = index.count(&p[j - 2..j - 1 + q]).unwrap_or(0);
    extended == plain
}

/// One column of text positions as a bit set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitColumn {
    len: usize,
    words: Vec<u64>,
}

impl BitColumn {
    pub fn new(len: usize) -> Self {
        BitColumn {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Bits for 1-based positions.
    pub fn from_positions(len: usize, positions: &[usize]) -> Self {
        let mut c = Self::new(len);
        for &p in positions {
            c.set(p);
        }
        c
    }

    pub fn set(&mut self, pos: usize) {
        let k = pos - 1;
        self.words[k / 64] |= 1 << (k % 64);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Cells limit for the G-matrix (bits).
pub const GMATRIX_LIMIT: usize = 1 << 26;

/// `n x m` bit grid: bit `(t, j)` is set once some alignment ending at text
/// position `t` and query column `j` has scored at least `s_a`.
#[derive(Clone, Debug)]
pub struct GMatrix {
    n: usize,
    m: usize,
    words_per_col: usize,
    bits: Vec<u64>,
}

impl GMatrix {
    pub fn new(n: usize, m: usize) -> Result<Self, FilterError> {
        let cells = n.saturating_mul(m);
        if cells > GMATRIX_LIMIT {
            return Err(FilterError::GMatrixTooLarge {
                cells: cells as u64,
                limit: GMATRIX_LIMIT as u64,
            });
        }
        let words_per_col = n.div_ceil(64);
        Ok(GMatrix {
            n,
            m,
            words_per_col,
            bits: vec![0; words_per_col * m],
        })
    }

    fn column(&self, j: usize) -> &[u64] {
        &self.bits[(j - 1) * self.words_per_col..j * self.words_per_col]
    }

    fn check_dims(&self, j: usize, z: &BitColumn) -> Result<(), FilterError> {
        if z.len != self.n {
            return Err(FilterError::DimensionMismatch {
                expected: self.n,
                found: z.len,
            });
        }
        if j == 0 || j > self.m {
            return Err(FilterError::DimensionMismatch {
                expected: self.m,
                found: j,
            });
        }
        Ok(())
    }

    pub fn set(&mut self, t: usize, j: usize) {
        let k = t - 1;
        self.bits[(j - 1) * self.words_per_col + k / 64] |= 1 << (k % 64);
    }

    pub fn get(&self, t: usize, j: usize) -> bool {
        let k = t - 1;
        self.column(j)[k / 64] >> (k % 64) & 1 == 1
    }
}

/// ORs `z` into column `j`.
pub fn g_update(g: &mut GMatrix, j: usize, z: &BitColumn) -> Result<(), FilterError> {
    g.check_dims(j, z)?;
    let w = g.words_per_col;
    for (dst, src) in g.bits[(j - 1) * w..j * w].iter_mut().zip(&z.words) {
        *dst |= src;
    }
    Ok(())
}

/// True iff `(column j AND z) == z`.
pub fn g_check(g: &GMatrix, j: usize, z: &BitColumn) -> Result<bool, FilterError> {
    g.check_dims(j, z)?;
    Ok(g.column(j).iter().zip(&z.words).all(|(c, z)| c & z == *z))
}
