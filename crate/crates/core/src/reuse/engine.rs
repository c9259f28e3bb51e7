//! Fork evaluation along trie paths.
//!
//! Every seed occurrence of a q-prefix in the query opens a fork. A fork
//! first runs along its diagonal (exact-match rows are assigned, later rows
//! use the one-neighbour recurrence) until its score can pay for a gap; from
//! that first gap-open entry on it keeps a sparse row of live cells anchored
//! at that entry. Rows advance one trie level at a time, so a row computed at
//! a node is shared by the whole subtree below it.
//!
//! Forks that open their gap region on the same row with the same score, and
//! whose query suffixes share a prefix, have identical regions over that
//! shared prefix; later forks copy those cells from the earliest one.

use crate::dp::{dp_cell, MatrixCell, Score, SparseMatrix, NEG_INF};
use crate::filters::{fgoe_reached, FloorRule, GMatrix, QGramIndex};
use crate::fm_index::{FmIndex, SaRange};
use crate::scoring::{delta, ScoringScheme, SearchParams};
use crate::search::{Counters, HitMap, RecordMap};

use super::cpt::Cpt;

/// Live cells of one matrix row as `(column, cell)`, ascending by column.
pub type Row = Vec<(usize, MatrixCell)>;

/// What a row computation needs besides its neighbours.
#[derive(Clone, Copy, Debug)]
pub struct RowKernel<'a> {
    pub p: &'a [u8],
    pub scheme: ScoringScheme,
    pub unknown: u8,
    pub floor: FloorRule,
    /// Fixed cost per cell; `None` weighs a cell by its live neighbours.
    pub flat_cost: Option<u64>,
}

impl RowKernel<'_> {
    #[inline]
    fn delta(&self, x: u8, j: usize) -> Score {
        delta(x, self.p[j - 1], self.unknown, &self.scheme)
    }

    /// Computes row `i` from `prev` (row `i - 1`) for columns `>= start`.
    /// `row` may hold cells left of `start` already; they act as left
    /// neighbours. Cells at or below the floor are dropped.
    pub fn next_row(
        &self,
        prev: &[(usize, MatrixCell)],
        x: u8,
        i: usize,
        start: usize,
        mut row: Row,
        tally: &mut Counters,
    ) -> Row {
        let m = self.p.len();
        let mut cands: Vec<usize> = Vec::with_capacity(prev.len() * 2);
        for &(c, _) in prev {
            for j in [c, c + 1] {
                if j >= start && j <= m && cands.last() != Some(&j) {
                    cands.push(j);
                }
            }
        }
        let mut chain = row.last().filter(|(c, _)| c + 1 == start).map(|_| start);
        let mut ci = 0;
        let mut pk = 0;
        loop {
            let j = match (cands.get(ci).copied(), chain) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => break,
            };
            if cands.get(ci) == Some(&j) {
                ci += 1;
            }
            chain = None;
            if j > m {
                break;
            }
            while pk < prev.len() && prev[pk].0 + 1 < j {
                pk += 1;
            }
            let mut diag = NEG_INF;
            let mut up = MatrixCell::DEAD;
            let mut live = 0u64;
            for &(c, cell) in &prev[pk..] {
                if c + 1 == j {
                    diag = cell.m;
                    live += 1;
                } else if c == j {
                    up = cell;
                    live += 1;
                } else {
                    break;
                }
            }
            let left = match row.last() {
                Some(&(c, cell)) if c + 1 == j => {
                    live += 1;
                    cell
                }
                _ => MatrixCell::DEAD,
            };
            if live == 0 {
                continue;
            }
            let cell = dp_cell(diag, up, left, self.delta(x, j), &self.scheme);
            tally.calculated += 1;
            tally.weighted_cost += self.flat_cost.unwrap_or(live);
            if cell.m > self.floor.floor(i, j) {
                row.push((j, cell));
                chain = Some(j + 1);
            }
        }
        row
    }

    /// First row below the empty prefix: every column starts fresh.
    pub fn first_row(&self, x: u8, tally: &mut Counters) -> Row {
        let m = self.p.len();
        let top = MatrixCell {
            m: 0,
            ga: NEG_INF,
            gb: NEG_INF,
        };
        let mut row = Row::new();
        for j in 1..=m {
            let left = match row.last() {
                Some(&(c, cell)) if c + 1 == j => cell,
                _ => MatrixCell::DEAD,
            };
            let cell = dp_cell(0, top, left, self.delta(x, j), &self.scheme);
            tally.calculated += 1;
            tally.weighted_cost += self.flat_cost.unwrap_or(3);
            if cell.m > self.floor.floor(1, j) {
                row.push((j, cell));
            }
        }
        row
    }
}

/// Per-class evaluation rules for forks.
#[derive(Clone, Copy, Debug)]
pub struct ForkRules<'a> {
    pub kernel: RowKernel<'a>,
    pub h: Score,
    pub seed_len: usize,
    pub reuse: bool,
}

impl<'a> ForkRules<'a> {
    pub fn new(
        p: &'a [u8],
        scheme: ScoringScheme,
        unknown: u8,
        h: Score,
        seed_len: usize,
        floor: FloorRule,
        reuse: bool,
    ) -> Self {
        ForkRules {
            kernel: RowKernel {
                p,
                scheme,
                unknown,
                floor,
                flat_cost: None,
            },
            h,
            seed_len,
            reuse,
        }
    }

    fn m(&self) -> usize {
        self.kernel.p.len()
    }

    /// Largest column whose floor does not depend on the column.
    fn copy_limit(&self) -> usize {
        let f = &self.kernel.floor;
        let m = self.m();
        if f.column_term(m) <= 0 {
            return m;
        }
        let need = (f.h as i64 - 1 + f.s_a as i64 - 1) / f.s_a as i64;
        m.saturating_sub(need as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Source {
    origin: usize,
    fgoe_col: usize,
    /// Columns `fgoe_col + s`, `s < span`, are copied.
    span: usize,
}

#[derive(Clone, Debug)]
enum ForkState {
    /// Score of the current diagonal entry.
    Diagonal(Score),
    Gap {
        fgoe_col: usize,
        row: Row,
        source: Option<Source>,
    },
    /// Forks whose regions met, evaluated as one region from then on.
    Pool(Row),
}

/// One seed occurrence in the query and its state at the current row. The
/// merged region of met forks is carried as a fork with origin 0.
#[derive(Clone, Debug)]
pub struct Fork {
    pub origin: usize,
    state: ForkState,
}

impl Fork {
    pub fn fgoe_col(&self) -> Option<usize> {
        match self.state {
            ForkState::Gap { fgoe_col, .. } => Some(fgoe_col),
            _ => None,
        }
    }

    pub fn is_pool(&self) -> bool {
        matches!(self.state, ForkState::Pool(_))
    }

    /// Live cells of the current row.
    pub fn cells(&self, i: usize) -> Vec<(usize, Score)> {
        match &self.state {
            ForkState::Diagonal(v) => vec![(self.origin + i - 1, *v)],
            ForkState::Gap { row, .. } | ForkState::Pool(row) => {
                row.iter().map(|&(c, cell)| (c, cell.m)).collect()
            }
        }
    }
}

/// Result of evaluating one row for all forks of a node.
#[derive(Clone, Debug, Default)]
pub struct RowOutput {
    pub forks: Vec<Fork>,
    /// Best score per column among cells reaching the threshold.
    pub hits: Vec<(usize, Score)>,
    /// Cells scoring at least `s_a`, when requested.
    pub strong: Vec<(usize, Score)>,
}

fn best_per_column(mut v: Vec<(usize, Score)>) -> Vec<(usize, Score)> {
    v.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    v.dedup_by_key(|e| e.0);
    v
}

const POOL: usize = 0;
const NO_SOURCE: usize = usize::MAX;

enum Kind {
    /// `assigned` marks seed-row entries whose value is known already.
    Diag { v: Score, assigned: bool },
    Gap {
        fgoe_col: usize,
        source: Option<Source>,
    },
    Pool,
}

/// Target columns `[lo, hi)` taken from the source's columns shifted left
/// by `shift`. `src == NO_SOURCE` means the source region has died.
#[derive(Clone, Copy)]
struct Zone {
    src: usize,
    shift: usize,
    lo: usize,
    hi: usize,
}

impl Zone {
    fn contains(&self, c: usize) -> bool {
        c >= self.lo && c < self.hi
    }
}

struct Unit {
    origin: usize,
    kind: Kind,
    prev: Row,
    cur: Row,
    live: bool,
    merged: bool,
    zone: Option<Zone>,
    targets: Vec<usize>,
}

impl Unit {
    fn new(origin: usize, kind: Kind, prev: Row) -> Self {
        Unit {
            origin,
            kind,
            prev,
            cur: Row::new(),
            live: true,
            merged: false,
            zone: None,
            targets: Vec::new(),
        }
    }

    fn in_zone(&self, c: usize) -> bool {
        self.zone.is_some_and(|z| z.contains(c))
    }
}

/// Pending work at a column: a computation, or a cell copied from a source.
struct Event {
    col: usize,
    unit: usize,
    copy: Option<MatrixCell>,
}

impl PartialEq for Event {
    fn eq(&self, o: &Self) -> bool {
        (self.col, self.unit) == (o.col, o.unit)
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Event {
    // Reversed so the max-heap pops the leftmost column first.
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (o.col, o.unit).cmp(&(self.col, self.unit))
    }
}

fn lookup(row: &[(usize, MatrixCell)], c: usize) -> Option<MatrixCell> {
    let k = row.partition_point(|e| e.0 < c);
    row.get(k).filter(|e| e.0 == c).map(|e| e.1)
}

fn max_cell(a: MatrixCell, b: MatrixCell) -> MatrixCell {
    MatrixCell {
        m: a.m.max(b.m),
        ga: a.ga.max(b.ga),
        gb: a.gb.max(b.gb),
    }
}

/// Column-wise union of two sorted rows.
fn merge_rows(a: Row, b: Row) -> Row {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let mut out = Row::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (a.into_iter().peekable(), b.into_iter().peekable());
    loop {
        match (x.peek(), y.peek()) {
            (Some(p), Some(q)) if p.0 == q.0 => {
                let (c, u) = x.next().unwrap();
                let (_, v) = y.next().unwrap();
                out.push((c, max_cell(u, v)));
            }
            (Some(p), Some(q)) => {
                if p.0 < q.0 {
                    out.push(x.next().unwrap());
                } else {
                    out.push(y.next().unwrap());
                }
            }
            (Some(_), None) => out.push(x.next().unwrap()),
            (None, Some(_)) => out.push(y.next().unwrap()),
            (None, None) => break,
        }
    }
    out
}

/// One row of a node: every fork's cells, swept left to right so that a
/// column several forks reach is computed once.
struct Sweep<'r, 'a> {
    rules: &'r ForkRules<'a>,
    i: usize,
    x: u8,
    units: Vec<Unit>,
    heap: std::collections::BinaryHeap<Event>,
    /// Units that opened their gap region on this row, by column.
    fgoe_at: std::collections::HashMap<usize, usize>,
    cpts: std::collections::HashMap<Score, Cpt<'a>>,
    limit: usize,
    /// Contributions of diagonal forks merged at the current column.
    extra_diag: Score,
    extra_cell: Option<MatrixCell>,
}

impl<'r, 'a> Sweep<'r, 'a> {
    fn new(rules: &'r ForkRules<'a>, i: usize, x: u8) -> Self {
        Sweep {
            rules,
            i,
            x,
            units: vec![Unit::new(0, Kind::Pool, Row::new())],
            heap: Default::default(),
            fgoe_at: Default::default(),
            cpts: Default::default(),
            limit: rules.copy_limit(),
            extra_diag: NEG_INF,
            extra_cell: None,
        }
    }

    fn m(&self) -> usize {
        self.rules.m()
    }

    fn push(&mut self, col: usize, unit: usize) {
        if col >= 1 && col <= self.m() {
            self.heap.push(Event {
                col,
                unit,
                copy: None,
            });
        }
    }

    /// Candidates from the previous row, restricted to `[from, to)` and
    /// outside the copy zone.
    fn seed_candidates(&mut self, u: usize, from: usize, to: usize) {
        let mut cols: Vec<usize> = Vec::new();
        let unit = &self.units[u];
        for &(c, _) in &unit.prev {
            for j in [c, c + 1] {
                if j >= from && j < to && !unit.in_zone(j) && cols.last() != Some(&j) {
                    cols.push(j);
                }
            }
        }
        for j in cols {
            self.push(j, u);
        }
    }

    fn add_diag(&mut self, origin: usize, v: Score, assigned: bool, tally: &mut Counters) {
        let col = origin + self.i - 1;
        if col > self.m() {
            tally.pruned_forks += 1;
            return;
        }
        let u = self.units.len();
        self.units.push(Unit::new(origin, Kind::Diag { v, assigned }, Row::new()));
        self.push(col, u);
    }

    fn load(&mut self, parent: &[Fork], tally: &mut Counters) {
        let mut gap_by_origin = std::collections::HashMap::new();
        for f in parent {
            match &f.state {
                ForkState::Diagonal(v) => self.add_diag(f.origin, *v, false, tally),
                ForkState::Pool(row) => self.units[POOL].prev = row.clone(),
                ForkState::Gap {
                    fgoe_col,
                    row,
                    source,
                } => {
                    gap_by_origin.insert(f.origin, self.units.len());
                    self.units.push(Unit::new(
                        f.origin,
                        Kind::Gap {
                            fgoe_col: *fgoe_col,
                            source: *source,
                        },
                        row.clone(),
                    ));
                }
            }
        }
        for u in 1..self.units.len() {
            let Kind::Gap {
                fgoe_col,
                source: Some(src),
            } = self.units[u].kind
            else {
                continue;
            };
            let s = gap_by_origin.get(&src.origin).copied().unwrap_or(NO_SOURCE);
            self.units[u].zone = Some(Zone {
                src: s,
                shift: fgoe_col - src.fgoe_col,
                lo: fgoe_col,
                hi: fgoe_col + src.span,
            });
            if s != NO_SOURCE {
                self.units[s].targets.push(u);
            }
        }
        for u in 0..self.units.len() {
            if !matches!(self.units[u].kind, Kind::Diag { .. }) {
                self.seed_candidates(u, 1, usize::MAX);
            }
        }
    }

    /// Adds a live cell to unit `u`, then schedules its right neighbour and
    /// any copies that depend on it.
    fn place(&mut self, u: usize, j: usize, cell: MatrixCell) {
        self.units[u].cur.push((j, cell));
        if !self.units[u].in_zone(j + 1) {
            self.push(j + 1, u);
        }
        for k in 0..self.units[u].targets.len() {
            let t = self.units[u].targets[k];
            let tu = &self.units[t];
            if !tu.live {
                continue;
            }
            if let Some(z) = tu.zone {
                if z.src == u && z.contains(j + z.shift) {
                    self.heap.push(Event {
                        col: j + z.shift,
                        unit: t,
                        copy: Some(cell),
                    });
                }
            }
        }
    }

    fn resolve(&self, u: usize) -> Option<usize> {
        let unit = &self.units[u];
        if unit.merged {
            Some(POOL)
        } else if unit.live {
            Some(u)
        } else {
            None
        }
    }

    /// Moves unit `u` into the pool while column `j` is being processed.
    fn merge(&mut self, u: usize, j: usize) {
        let unit = &mut self.units[u];
        unit.live = false;
        unit.merged = true;
        let prev = std::mem::take(&mut unit.prev);
        let cur = std::mem::take(&mut unit.cur);
        let targets = std::mem::take(&mut unit.targets);
        match unit.kind {
            Kind::Diag { v, assigned: true } => {
                let cell = MatrixCell {
                    m: v,
                    ga: NEG_INF,
                    gb: NEG_INF,
                };
                self.extra_cell = Some(self.extra_cell.map_or(cell, |c| max_cell(c, cell)));
            }
            Kind::Diag { v, .. } => self.extra_diag = self.extra_diag.max(v),
            Kind::Gap { .. } => {
                let mut cols: Vec<usize> = prev
                    .iter()
                    .flat_map(|&(c, _)| [c, c + 1])
                    .filter(|&c| c > j)
                    .collect();
                cols.dedup();
                let pool = &mut self.units[POOL];
                pool.prev = merge_rows(std::mem::take(&mut pool.prev), prev);
                pool.cur = merge_rows(std::mem::take(&mut pool.cur), cur);
                for c in cols {
                    self.push(c, POOL);
                }
            }
            Kind::Pool => unreachable!("the pool is never merged"),
        }
        // Copies of this unit's cells from column j on are no longer exact.
        for t in targets {
            let tu = &mut self.units[t];
            let Some(mut z) = tu.zone.filter(|z| tu.live && z.src == u) else {
                continue;
            };
            let old_hi = z.hi;
            z.hi = z.hi.min(j + z.shift);
            tu.zone = (z.hi > z.lo).then_some(z);
            if let Kind::Gap { source, .. } = &mut tu.kind {
                *source = None;
            }
            if z.hi < old_hi {
                self.seed_candidates(t, z.hi, old_hi);
                if self.units[t].cur.last().is_some_and(|e| e.0 + 1 == z.hi) {
                    self.push(z.hi, t);
                }
            }
        }
    }

    /// Full recurrence at `(i, j)` from the unit's own neighbours.
    fn compute(&mut self, u: usize, j: usize, tally: &mut Counters) {
        let unit = &self.units[u];
        let mut live = 0u64;
        let mut diag = NEG_INF;
        if let Some(c) = lookup(&unit.prev, j - 1) {
            diag = c.m;
        }
        diag = diag.max(self.extra_diag);
        if diag > NEG_INF {
            live += 1;
        }
        let up = lookup(&unit.prev, j).unwrap_or(MatrixCell::DEAD);
        if !up.is_dead() {
            live += 1;
        }
        let left = match unit.cur.last() {
            Some(&(c, cell)) if c + 1 == j => {
                live += 1;
                cell
            }
            _ => MatrixCell::DEAD,
        };
        let extra = self.extra_cell.take();
        self.extra_diag = NEG_INF;
        if live == 0 {
            if let Some(cell) = extra {
                self.place(u, j, cell);
            }
            return;
        }
        let mut cell = dp_cell(diag, up, left, self.rules.kernel.delta(self.x, j), &self.rules.kernel.scheme);
        if let Some(e) = extra {
            cell = max_cell(cell, e);
        }
        tally.calculated += 1;
        tally.weighted_cost += live;
        if cell.m > self.rules.kernel.floor.floor(self.i, j) {
            self.place(u, j, cell);
        }
    }

    fn diagonal(&mut self, u: usize, j: usize, tally: &mut Counters) {
        let Kind::Diag { v, assigned } = self.units[u].kind else {
            unreachable!()
        };
        let v = if assigned {
            v
        } else {
            tally.calculated += 1;
            tally.weighted_cost += 1;
            v + self.rules.kernel.delta(self.x, j)
        };
        let kernel = &self.rules.kernel;
        if v <= kernel.floor.floor(self.i, j) {
            tally.pruned_forks += 1;
            self.units[u].live = false;
            return;
        }
        if !fgoe_reached(v, &kernel.scheme) {
            self.units[u].kind = Kind::Diag { v, assigned: false };
            return;
        }
        self.units[u].kind = Kind::Gap {
            fgoe_col: j,
            source: None,
        };
        self.fgoe_at.insert(j, u);
        if self.rules.reuse {
            let p = kernel.p;
            let (depth, owner) = self.cpts.entry(v).or_insert_with(|| Cpt::new(p)).insert(j);
            let span = depth.min((self.limit + 1).saturating_sub(j));
            let src = self.fgoe_at.get(&owner).copied().filter(|&s| owner > 0 && self.units[s].live);
            if let (Some(s), true) = (src, span > 0) {
                let shift = j - owner;
                self.units[u].kind = Kind::Gap {
                    fgoe_col: j,
                    source: Some(Source {
                        origin: self.units[s].origin,
                        fgoe_col: owner,
                        span,
                    }),
                };
                self.units[u].zone = Some(Zone {
                    src: s,
                    shift,
                    lo: j + 1,
                    hi: j + span,
                });
                self.units[s].targets.push(u);
                let ready: Vec<(usize, MatrixCell)> = self.units[s]
                    .cur
                    .iter()
                    .filter(|e| e.0 > owner && e.0 < owner + span)
                    .copied()
                    .collect();
                for (c, cell) in ready {
                    self.heap.push(Event {
                        col: c + shift,
                        unit: u,
                        copy: Some(cell),
                    });
                }
            }
        }
        self.place(
            u,
            j,
            MatrixCell {
                m: v,
                ga: NEG_INF,
                gb: NEG_INF,
            },
        );
    }

    fn run(&mut self, tally: &mut Counters) {
        let mut batch: Vec<Event> = Vec::new();
        let mut members: Vec<usize> = Vec::new();
        while let Some(top) = self.heap.pop() {
            let j = top.col;
            batch.clear();
            batch.push(top);
            while self.heap.peek().is_some_and(|e| e.col == j) {
                batch.push(self.heap.pop().unwrap());
            }
            members.clear();
            let mut copy = None;
            for ev in &batch {
                let Some(u) = self.resolve(ev.unit) else {
                    continue;
                };
                match ev.copy {
                    Some(cell) => {
                        if u == ev.unit && self.units[u].in_zone(j) {
                            copy = Some((u, cell));
                            members.push(u);
                        }
                    }
                    None => {
                        if !self.units[u].in_zone(j) {
                            members.push(u);
                        }
                    }
                }
            }
            members.sort_unstable();
            members.dedup();
            match members[..] {
                [] => {}
                [u] if u != POOL => match (copy, &self.units[u].kind) {
                    (Some((_, cell)), _) => {
                        tally.reused += 1;
                        self.place(u, j, cell);
                    }
                    (None, Kind::Diag { .. }) => self.diagonal(u, j, tally),
                    (None, _) => self.compute(u, j, tally),
                },
                _ => {
                    for k in 0..members.len() {
                        if members[k] != POOL {
                            self.merge(members[k], j);
                        }
                    }
                    self.compute(POOL, j, tally);
                }
            }
        }
    }

    fn finish(self, want_strong: bool) -> RowOutput {
        let i = self.i;
        let h = self.rules.h;
        let s_a = self.rules.kernel.scheme.matched;
        let mut forks = Vec::with_capacity(self.units.len());
        for (k, unit) in self.units.into_iter().enumerate() {
            if k != POOL && !unit.live {
                continue;
            }
            let state = match unit.kind {
                Kind::Diag { v, .. } => ForkState::Diagonal(v),
                Kind::Gap { fgoe_col, source } if !unit.cur.is_empty() => ForkState::Gap {
                    fgoe_col,
                    row: unit.cur,
                    source,
                },
                Kind::Pool if !unit.cur.is_empty() => ForkState::Pool(unit.cur),
                _ => continue,
            };
            forks.push(Fork {
                origin: unit.origin,
                state,
            });
        }
        let mut hits = Vec::new();
        let mut strong = Vec::new();
        for f in &forks {
            for (c, v) in f.cells(i) {
                if v >= h {
                    hits.push((c, v));
                }
                if want_strong && v >= s_a {
                    strong.push((c, v));
                }
            }
        }
        RowOutput {
            forks,
            hits: best_per_column(hits),
            strong: best_per_column(strong),
        }
    }
}

/// Opens forks at `origins` on the seed row. The seed's exact-match entries
/// are assigned, not computed.
pub fn start_forks(
    rules: &ForkRules,
    origins: &[usize],
    x_last: u8,
    tally: &mut Counters,
    want_strong: bool,
) -> RowOutput {
    let i = rules.seed_len;
    let v = rules.kernel.scheme.matched * i as Score;
    let mut sweep = Sweep::new(rules, i, x_last);
    for &origin in origins {
        tally.assigned += i as u64;
        if v <= rules.kernel.floor.floor(i, origin + i - 1) {
            tally.pruned_forks += 1;
            continue;
        }
        sweep.add_diag(origin, v, true, tally);
    }
    sweep.run(tally);
    sweep.finish(want_strong)
}

/// Row `i` (symbol `x`) for every fork alive at row `i - 1`.
pub fn advance_forks(
    rules: &ForkRules,
    parent: &[Fork],
    i: usize,
    x: u8,
    tally: &mut Counters,
    want_strong: bool,
) -> RowOutput {
    let mut sweep = Sweep::new(rules, i, x);
    sweep.load(parent, tally);
    sweep.run(tally);
    sweep.finish(want_strong)
}

/// Evaluates every fork of `x` against `p` on a single path and returns
/// the resulting sparse matrix (assigned exact-match entries included).
/// `params.n` bounds the remaining text for the score floor; the path is
/// taken to start at text position 1.
pub fn hybrid(
    x: &[u8],
    p: &[u8],
    qgrams: &QGramIndex,
    params: &SearchParams,
    unknown: u8,
    reuse: bool,
) -> (SparseMatrix, Counters) {
    let mut tally = Counters::default();
    let mut mx = SparseMatrix::new();
    let q = qgrams.q();
    if x.len() < q {
        return (mx, tally);
    }
    let Some(origins) = qgrams.positions(&x[..q]) else {
        return (mx, tally);
    };
    let floor = FloorRule::new(params, 1, true, true);
    let rules = ForkRules::new(p, params.scheme, unknown, params.threshold, q, floor, reuse);
    let s_a = params.scheme.matched;
    for &o in origins {
        for k in 1..q {
            mx.merge(
                k,
                o + k - 1,
                MatrixCell {
                    m: s_a * k as Score,
                    ga: NEG_INF,
                    gb: NEG_INF,
                },
            );
        }
    }
    let mut out = start_forks(&rules, origins, x[q - 1], &mut tally, false);
    let depth = x.len().min(params.l_max);
    let mut i = q;
    loop {
        for f in &out.forks {
            match &f.state {
                ForkState::Diagonal(v) => mx.merge(
                    i,
                    f.origin + i - 1,
                    MatrixCell {
                        m: *v,
                        ga: NEG_INF,
                        gb: NEG_INF,
                    },
                ),
                ForkState::Gap { row, .. } | ForkState::Pool(row) => {
                    for &(c, cell) in row {
                        mx.merge(i, c, cell);
                    }
                }
            }
        }
        if out.forks.is_empty() || i == depth {
            break;
        }
        i += 1;
        out = advance_forks(&rules, &out.forks, i, x[i - 1], &mut tally, false);
    }
    (mx, tally)
}

/// One q-prefix class: its gram, SA range and the fork origins that
/// survived the global filters.
#[derive(Clone, Debug)]
pub struct ClassJob<'a> {
    pub gram: &'a [u8],
    pub range: SaRange,
    pub origins: Vec<usize>,
}

/// Everything a class traversal reads.
#[derive(Clone, Copy)]
pub struct Traversal<'a> {
    pub index: &'a FmIndex,
    pub records: &'a RecordMap,
    pub rules: ForkRules<'a>,
    pub depth_cap: usize,
    pub path_sharing: bool,
}

struct Frame {
    depth: usize,
    forks: Vec<Fork>,
    children: Vec<(u8, SaRange)>,
    next: usize,
    grew: bool,
}

impl Traversal<'_> {
    /// Expands a node's hits over its occurrences and feeds the G-matrix.
    fn emit(
        &self,
        range: SaRange,
        depth: usize,
        out: &RowOutput,
        hits: &mut HitMap,
        gm: &mut Option<&mut GMatrix>,
    ) {
        if out.hits.is_empty() && out.strong.is_empty() {
            return;
        }
        let Ok(occ) = self.index.locate(range, depth) else {
            return;
        };
        for t in occ {
            let end = t + depth - 1;
            if !self.records.same_record(t, end) {
                continue;
            }
            for &(j, s) in &out.hits {
                hits.offer(end, j, s, t);
            }
            if let Some(g) = gm.as_deref_mut() {
                for &(j, _) in &out.strong {
                    g.set(end, j);
                }
            }
        }
    }

    /// Recomputes the whole path below the class node, as if nothing were
    /// shared with sibling paths.
    fn replay(
        &self,
        job: &ClassJob,
        path: &[(u8, SaRange)],
        hits: &mut HitMap,
        tally: &mut Counters,
        gm: &mut Option<&mut GMatrix>,
    ) {
        let want = gm.is_some();
        let q = self.rules.seed_len;
        let mut out = start_forks(&self.rules, &job.origins, job.gram[q - 1], tally, want);
        self.emit(job.range, q, &out, hits, gm);
        for (k, &(c, r)) in path.iter().enumerate() {
            if out.forks.is_empty() {
                break;
            }
            let i = q + k + 1;
            out = advance_forks(&self.rules, &out.forks, i, c, tally, want);
            self.emit(r, i, &out, hits, gm);
        }
    }

    /// Depth-first traversal of the suffix-trie subtree below the class
    /// node, one matrix row per node.
    pub fn traverse_prefix_class(
        &self,
        job: &ClassJob,
        hits: &mut HitMap,
        tally: &mut Counters,
        mut gm: Option<&mut GMatrix>,
    ) {
        let want = gm.is_some();
        let q = self.rules.seed_len;
        let sharing = self.path_sharing;
        let mut scratch = Counters::default();
        let mut path: Vec<(u8, SaRange)> = Vec::new();

        let root = {
            let t = if sharing { &mut *tally } else { &mut scratch };
            start_forks(&self.rules, &job.origins, job.gram[q - 1], t, want)
        };
        if sharing {
            self.emit(job.range, q, &root, hits, &mut gm);
        }
        if root.forks.is_empty() {
            if !sharing {
                self.replay(job, &path, hits, tally, &mut gm);
            }
            return;
        }
        let children = if q < self.depth_cap {
            self.index.enumerate_children(job.range)
        } else {
            Vec::new()
        };
        let mut stack = vec![Frame {
            depth: q,
            forks: root.forks,
            children,
            next: 0,
            grew: false,
        }];
        while let Some(top) = stack.last_mut() {
            if top.next == top.children.len() {
                let f = stack.pop().expect("non-empty stack");
                if !sharing && !f.grew {
                    self.replay(job, &path, hits, tally, &mut gm);
                }
                path.truncate(stack.len().saturating_sub(1));
                continue;
            }
            let (c, r) = top.children[top.next];
            top.next += 1;
            let i = top.depth + 1;
            let out = {
                let t = if sharing { &mut *tally } else { &mut scratch };
                advance_forks(&self.rules, &top.forks, i, c, t, want)
            };
            if sharing {
                self.emit(r, i, &out, hits, &mut gm);
            }
            if out.forks.is_empty() {
                if !sharing {
                    path.push((c, r));
                    self.replay(job, &path, hits, tally, &mut gm);
                    path.pop();
                }
                continue;
            }
            top.grew = true;
            let children = if i < self.depth_cap {
                self.index.enumerate_children(r)
            } else {
                Vec::new()
            };
            path.push((c, r));
            stack.push(Frame {
                depth: i,
                forks: out.forks,
                children,
                next: 0,
                grew: false,
            });
        }
    }
}
