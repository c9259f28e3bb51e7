//! Affine-gap dynamic programming: the cell kernel, borders, a full-matrix
//! aligner and the brute-force oracle every search mode is checked against.
//!
//! Rows index the text side (`X` or `T`), columns the query `P`. `ga` is the
//! best score with the row symbol aligned to a gap (vertical move), `gb` the
//! best score with the query symbol aligned to a gap (horizontal move).

use std::collections::HashMap;

use crate::scoring::{delta, ScoringScheme};
use crate::sequence::{EncodedText, Query};

pub type Score = i32;

/// Stand-in for minus infinity. Far below any reachable score; adding to it
/// saturates back to it.
pub const NEG_INF: Score = i32::MIN / 4;

#[inline]
pub fn sat_add(a: Score, b: Score) -> Score {
    if a <= NEG_INF {
        NEG_INF
    } else {
        (a + b).max(NEG_INF)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatrixCell {
    pub m: Score,
    pub ga: Score,
    pub gb: Score,
}

impl MatrixCell {
    pub const DEAD: MatrixCell = MatrixCell {
        m: NEG_INF,
        ga: NEG_INF,
        gb: NEG_INF,
    };

    pub fn is_dead(&self) -> bool {
        self.m <= NEG_INF
    }
}

/// One alignment record: best score for the end pair and where it starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlignmentHit {
    /// 1-based end position in the text.
    pub end_t: usize,
    /// 1-based end position in the query.
    pub end_p: usize,
    pub score: Score,
    /// 1-based start position in the text.
    pub start_t: usize,
}

impl AlignmentHit {
    pub fn key(&self) -> (usize, usize, Score) {
        (self.end_t, self.end_p, self.score)
    }
}

/// Border values: `M(0, j) = 0`, `M(i, 0) = s_g + i s_s`, `G_a(0, j) = G_b(i, 0) = -inf`.
#[derive(Clone, Copy, Debug)]
pub struct Borders {
    scheme: ScoringScheme,
}

impl Borders {
    pub fn new(scheme: ScoringScheme) -> Self {
        Borders { scheme }
    }

    /// Cell at row 0 or column 0.
    pub fn cell(&self, i: usize, j: usize) -> MatrixCell {
        if i == 0 {
            MatrixCell {
                m: 0,
                ga: NEG_INF,
                gb: NEG_INF,
            }
        } else {
            debug_assert_eq!(j, 0);
            MatrixCell {
                m: self.scheme.gap_open + i as Score * self.scheme.gap_extend,
                ga: NEG_INF,
                gb: NEG_INF,
            }
        }
    }
}

pub fn init_borders(scheme: &ScoringScheme) -> Borders {
    Borders::new(*scheme)
}

/// The affine-gap recurrence for one cell.
#[inline]
pub fn dp_cell(
    diag_m: Score,
    up: MatrixCell,
    left: MatrixCell,
    delta: Score,
    scheme: &ScoringScheme,
) -> MatrixCell {
    let ga = sat_add(up.ga, scheme.gap_extend).max(sat_add(up.m, scheme.gap_first()));
    let gb = sat_add(left.gb, scheme.gap_extend).max(sat_add(left.m, scheme.gap_first()));
    let m = sat_add(diag_m, delta).max(ga).max(gb);
    MatrixCell { m, ga, gb }
}

/// A dense `(rows + 1) x (cols + 1)` matrix including borders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullMatrix {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<MatrixCell>,
}

impl FullMatrix {
    pub fn get(&self, i: usize, j: usize) -> MatrixCell {
        self.cells[i * (self.cols + 1) + j]
    }

    pub fn m(&self, i: usize, j: usize) -> Score {
        self.get(i, j).m
    }
}

/// Aligns every prefix of `x` against every substring of `p` ending at each
/// column, filling the whole matrix.
pub fn align_matrix(x: &[u8], p: &[u8], unknown: u8, scheme: &ScoringScheme) -> FullMatrix {
    let (rows, cols) = (x.len(), p.len());
    let borders = init_borders(scheme);
    let mut cells = vec![MatrixCell::DEAD; (rows + 1) * (cols + 1)];
    let w = cols + 1;
    for j in 0..=cols {
        cells[j] = borders.cell(0, j);
    }
    for i in 1..=rows {
        cells[i * w] = borders.cell(i, 0);
        for j in 1..=cols {
            let d = delta(x[i - 1], p[j - 1], unknown, scheme);
            cells[i * w + j] = dp_cell(
                cells[(i - 1) * w + j - 1].m,
                cells[(i - 1) * w + j],
                cells[i * w + j - 1],
                d,
                scheme,
            );
        }
    }
    FullMatrix { rows, cols, cells }
}

/// Sparse matrix keyed by `(row, column)`; absent entries were never
/// computed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    entries: HashMap<(usize, usize), MatrixCell>,
}

impl SparseMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&MatrixCell> {
        self.entries.get(&(i, j))
    }

    /// Stores a cell, keeping the larger `m` when the coordinate is already
    /// present (several forks may cover it).
    pub fn merge(&mut self, i: usize, j: usize, cell: MatrixCell) {
        self.entries
            .entry((i, j))
            .and_modify(|c| {
                if cell.m > c.m {
                    *c = cell;
                }
            })
            .or_insert(cell);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &MatrixCell)> {
        self.entries.iter()
    }
}

#[derive(Clone, Copy)]
struct Tracked {
    score: Score,
    start: usize,
}

impl Tracked {
    const NONE: Tracked = Tracked {
        score: NEG_INF,
        start: usize::MAX,
    };

    #[inline]
    fn plus(self, d: Score) -> Tracked {
        Tracked {
            score: sat_add(self.score, d),
            start: self.start,
        }
    }

    /// Higher score wins; on ties the smaller start.
    #[inline]
    fn best(self, o: Tracked) -> Tracked {
        if o.score > self.score || (o.score == self.score && o.start < self.start) {
            o
        } else {
            self
        }
    }
}

/// Brute-force search: for every end pair the best local-alignment score
/// over all starts, reported when `>= h`. Each record of `text` is searched
/// on its own, so no alignment spans a record boundary. Ties on the start
/// resolve to the smallest `start_t`. Output is sorted.
pub fn oracle_search(
    text: &EncodedText,
    query: &Query,
    scheme: &ScoringScheme,
    h: Score,
    unknown: u8,
) -> Vec<AlignmentHit> {
    let mut hits = Vec::new();
    let m = query.len();
    if m == 0 {
        return hits;
    }
    let p = &query.codes;
    let mut prev_m = vec![Tracked::NONE; m + 1];
    let mut prev_ga = vec![Tracked::NONE; m + 1];
    let mut cur_m = vec![Tracked::NONE; m + 1];
    let mut cur_ga = vec![Tracked::NONE; m + 1];

    for rec in 0..text.boundaries.len() {
        let (s, e) = text.record_span(rec);
        prev_m.fill(Tracked::NONE);
        prev_ga.fill(Tracked::NONE);
        for i in s..=e {
            let x = text.codes[i - 1];
            let mut gb = Tracked::NONE;
            cur_m[0] = Tracked::NONE;
            cur_ga[0] = Tracked::NONE;
            for j in 1..=m {
                let fresh = Tracked { score: 0, start: i };
                let diag = prev_m[j - 1].best(fresh);
                let d = delta(x, p[j - 1], unknown, scheme);
                let ga = prev_ga[j]
                    .plus(scheme.gap_extend)
                    .best(prev_m[j].plus(scheme.gap_first()));
                gb = gb
                    .plus(scheme.gap_extend)
                    .best(cur_m[j - 1].plus(scheme.gap_first()));
                let mm = diag.plus(d).best(ga).best(gb);
                cur_m[j] = mm;
                cur_ga[j] = ga;
                if mm.score >= h {
                    hits.push(AlignmentHit {
                        end_t: i,
                        end_p: j,
                        score: mm.score,
                        start_t: mm.start,
                    });
                }
            }
            std::mem::swap(&mut prev_m, &mut cur_m);
            std::mem::swap(&mut prev_ga, &mut cur_ga);
        }
    }
    hits.sort();
    hits
}

/// Global alignment score of two whole sequences (both consumed entirely).
pub fn global_score(a: &[u8], b: &[u8], unknown: u8, scheme: &ScoringScheme) -> Score {
    let (r, c) = (a.len(), b.len());
    let mut m = vec![vec![NEG_INF; c + 1]; r + 1];
    let mut ga = vec![vec![NEG_INF; c + 1]; r + 1];
    let mut gb = vec![vec![NEG_INF; c + 1]; r + 1];
    m[0][0] = 0;
    for i in 0..=r {
        for j in 0..=c {
            if i == 0 && j == 0 {
                continue;
            }
            if i > 0 {
                ga[i][j] = sat_add(ga[i - 1][j], scheme.gap_extend)
                    .max(sat_add(m[i - 1][j], scheme.gap_first()));
            }
            if j > 0 {
                gb[i][j] = sat_add(gb[i][j - 1], scheme.gap_extend)
                    .max(sat_add(m[i][j - 1], scheme.gap_first()));
            }
            let mut best = ga[i][j].max(gb[i][j]);
            if i > 0 && j > 0 {
                best = best.max(sat_add(m[i - 1][j - 1], delta(a[i - 1], b[j - 1], unknown, scheme)));
            }
            m[i][j] = best;
        }
    }
    m[r][c]
}
