//! FM-index over the reversed, sentinel-terminated text.
//!
//! The indexed string is `R = T[n] T[n-1] .. T[1] $`. Backward search over
//! `R` prepends to a pattern of `R`, which appends a symbol behind the
//! corresponding substring of `T`. This is what a suffix-trie descent over
//! `T` needs: the node for `X` has the SA range of `X` reversed, and its
//! child `Xc` is one backward step away.
//!
//! Suffix-array values are kept as positions of `T`: the suffix of `R`
//! starting at `R[k]` is tagged with `n - k` (the `$` suffix with 0).

mod io;
pub(crate) mod sais;

use crate::error::IndexError;
use crate::sequence::{AlphabetKind, Boundary, EncodedText};

pub use io::{FORMAT_VERSION, MAGIC};

/// Symbols per occurrence checkpoint block.
pub const CHECKPOINT_BLOCK: usize = 128;
/// Suffix-array sampling rate (by SA index).
pub const SA_SAMPLE_RATE: usize = 32;

/// Text symbols stored from each record start (used for domination checks).
pub(crate) const RECORD_PREFIX_LEN: usize = 255;

/// Inclusive range of suffix-array indices. Empty iff `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SaRange {
    pub lo: usize,
    pub hi: usize,
}

impl SaRange {
    pub const EMPTY: SaRange = SaRange { lo: 1, hi: 0 };

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn width(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.hi - self.lo + 1
        }
    }
}

/// Per-record metadata carried with the index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordInfo {
    pub start: usize,
    pub id: String,
    /// Text symbols from the record start on (at most `RECORD_PREFIX_LEN`).
    pub prefix: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FmIndex {
    kind: AlphabetKind,
    sigma: usize,
    n: usize,
    block: usize,
    sample_rate: usize,
    /// `counts[s]` = number of BWT symbols smaller than internal symbol `s`;
    /// `counts[nsym]` = n + 1.
    counts: Vec<usize>,
    /// Internal symbols: 0 = `$`, `code + 1` otherwise.
    bwt: Vec<u8>,
    /// `occ[k * nsym + s]` = occurrences of `s` in `bwt[..k * block]`.
    occ: Vec<u32>,
    /// R-offsets of the suffixes at SA indices `0, rate, 2 * rate, ..`.
    samples: Vec<u32>,
    records: Vec<RecordInfo>,
}

impl FmIndex {
    /// Builds the index. `kind` fixes `sigma`; codes may include the
    /// never-match code `sigma`.
    pub fn build(text: &EncodedText, kind: AlphabetKind) -> Result<FmIndex, IndexError> {
        Self::build_with(text, kind, CHECKPOINT_BLOCK, SA_SAMPLE_RATE)
    }

    pub fn build_with(
        text: &EncodedText,
        kind: AlphabetKind,
        block: usize,
        sample_rate: usize,
    ) -> Result<FmIndex, IndexError> {
        let n = text.len();
        if n == 0 {
            return Err(IndexError::EmptyText);
        }
        if n >= u32::MAX as usize {
            return Err(IndexError::Malformed("text too long for 32-bit index"));
        }
        let sigma = crate::sequence::Alphabet::new(kind).sigma();
        if let Some(&bad) = text.codes.iter().find(|&&c| c as usize > sigma) {
            return Err(IndexError::InvalidSymbol(bad));
        }
        let nsym = sigma + 2;

        let mut reversed: Vec<u32> = text.codes.iter().rev().map(|&c| c as u32 + 1).collect();
        reversed.push(0);
        let sa = sais::suffix_array(&reversed, nsym);

        let bwt: Vec<u8> = sa
            .iter()
            .map(|&k| if k == 0 { 0 } else { reversed[k - 1] as u8 })
            .collect();
        let samples = sa
            .iter()
            .step_by(sample_rate)
            .map(|&k| k as u32)
            .collect();
        drop(sa);

        let records = text
            .boundaries
            .iter()
            .map(|b| {
                // Runs on into later records: an occurrence of a pattern at
                // a record start may extend past a short record.
                let take = (n - b.start + 1).min(RECORD_PREFIX_LEN);
                RecordInfo {
                    start: b.start,
                    id: b.id.clone(),
                    prefix: text.codes[b.start - 1..b.start - 1 + take].to_vec(),
                }
            })
            .collect();

        let mut index = FmIndex {
            kind,
            sigma,
            n,
            block,
            sample_rate,
            counts: Vec::new(),
            bwt,
            occ: Vec::new(),
            samples,
            records,
        };
        index.rebuild_rank();
        Ok(index)
    }

    /// Recomputes counts and occurrence checkpoints from the BWT.
    fn rebuild_rank(&mut self) {
        let nsym = self.nsym();
        let blocks = self.bwt.len() / self.block + 1;
        let mut occ = vec![0u32; blocks * nsym];
        let mut running = vec![0u32; nsym];
        for (i, &s) in self.bwt.iter().enumerate() {
            if i % self.block == 0 {
                let k = i / self.block;
                occ[k * nsym..(k + 1) * nsym].copy_from_slice(&running);
            }
            running[s as usize] += 1;
        }
        if self.bwt.len() % self.block == 0 {
            let k = self.bwt.len() / self.block;
            occ[k * nsym..(k + 1) * nsym].copy_from_slice(&running);
        }
        let mut counts = vec![0usize; nsym + 1];
        for s in 0..nsym {
            counts[s + 1] = counts[s] + running[s] as usize;
        }
        self.counts = counts;
        self.occ = occ;
    }

    fn nsym(&self) -> usize {
        self.sigma + 2
    }

    pub fn kind(&self) -> AlphabetKind {
        self.kind
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Text length n (without the sentinel).
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn records(&self) -> &[RecordInfo] {
        &self.records
    }

    pub fn checkpoint_block(&self) -> usize {
        self.block
    }

    pub fn sample_rate(&self) -> usize {
        self.sample_rate
    }

    /// BWT as external codes: `None` is the sentinel.
    pub fn bwt_codes(&self) -> Vec<Option<u8>> {
        self.bwt
            .iter()
            .map(|&s| if s == 0 { None } else { Some(s - 1) })
            .collect()
    }

    /// Occurrences of internal symbol `s` in `bwt[..pos]`.
    #[inline]
    fn occ(&self, s: usize, pos: usize) -> usize {
        let k = pos / self.block;
        let base = self.occ[k * self.nsym() + s] as usize;
        base + self.bwt[k * self.block..pos]
            .iter()
            .filter(|&&b| b as usize == s)
            .count()
    }

    /// Rank of external code `code` in `bwt[..pos]`, via checkpoints.
    pub fn rank(&self, code: u8, pos: usize) -> usize {
        self.occ(code as usize + 1, pos)
    }

    /// The range of the empty string.
    pub fn full_range(&self) -> SaRange {
        SaRange { lo: 0, hi: self.n }
    }

    /// SA range of `X c` given the range of `X`.
    pub fn backward_extend(&self, range: SaRange, code: u8) -> Result<SaRange, IndexError> {
        if code as usize > self.sigma {
            return Err(IndexError::InvalidSymbol(code));
        }
        Ok(self.extend_unchecked(range, code))
    }

    #[inline]
    pub(crate) fn extend_unchecked(&self, range: SaRange, code: u8) -> SaRange {
        if range.is_empty() {
            return SaRange::EMPTY;
        }
        let s = code as usize + 1;
        let lo = self.counts[s] + self.occ(s, range.lo);
        let hi_excl = self.counts[s] + self.occ(s, range.hi + 1);
        if hi_excl <= lo {
            SaRange::EMPTY
        } else {
            SaRange {
                lo,
                hi: hi_excl - 1,
            }
        }
    }

    /// SA range of a whole pattern of `T`, searched left to right.
    pub fn range_of(&self, pattern: &[u8]) -> Result<SaRange, IndexError> {
        let mut r = self.full_range();
        for &c in pattern {
            r = self.backward_extend(r, c)?;
            if r.is_empty() {
                break;
            }
        }
        Ok(r)
    }

    pub fn count(&self, pattern: &[u8]) -> Result<usize, IndexError> {
        Ok(self.range_of(pattern)?.width())
    }

    /// LF mapping: SA index of the suffix of `R` starting one symbol later.
    #[inline]
    fn lf(&self, h: usize) -> usize {
        let s = self.bwt[h] as usize;
        self.counts[s] + self.occ(s, h)
    }

    /// Offset into `R` of the suffix at SA index `h`.
    fn r_offset(&self, mut h: usize) -> usize {
        let mut steps = 0;
        loop {
            if h % self.sample_rate == 0 {
                return self.samples[h / self.sample_rate] as usize + steps;
            }
            if self.bwt[h] == 0 {
                return steps;
            }
            h = self.lf(h);
            steps += 1;
        }
    }

    /// Position in `T` tagged to SA index `h` (0 for the sentinel suffix).
    pub fn sa_value(&self, h: usize) -> usize {
        self.n - self.r_offset(h)
    }

    /// Ascending 1-based start positions in `T` of the string whose range
    /// is `range` and whose length is `pattern_len`.
    pub fn locate(&self, range: SaRange, pattern_len: usize) -> Result<Vec<usize>, IndexError> {
        if range.is_empty() {
            return Err(IndexError::EmptyRange);
        }
        let mut out: Vec<usize> = (range.lo..=range.hi)
            .map(|h| self.sa_value(h) + 1 - pattern_len)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Children of a suffix-trie node in ascending code order, including the
    /// never-match code when it occurs in the text.
    pub fn enumerate_children(&self, range: SaRange) -> Vec<(u8, SaRange)> {
        if range.is_empty() {
            return Vec::new();
        }
        (0..=self.sigma as u8)
            .filter_map(|c| {
                let r = self.extend_unchecked(range, c);
                (!r.is_empty()).then_some((c, r))
            })
            .collect()
    }

    /// Reconstructs the text by inverting the BWT.
    pub fn text(&self) -> EncodedText {
        let mut codes = vec![0u8; self.n];
        // SA index 0 holds the sentinel suffix "$"; bwt[0] is R[n-1] = T[1].
        let mut h = 0;
        for slot in codes.iter_mut() {
            let s = self.bwt[h];
            *slot = s - 1;
            h = self.lf(h);
        }
        EncodedText {
            codes,
            boundaries: self
                .records
                .iter()
                .map(|r| Boundary {
                    start: r.start,
                    id: r.id.clone(),
                })
                .collect(),
        }
    }

    /// True when a record other than the first starts with `pattern`, or the
    /// stored prefix is too short to rule it out.
    pub(crate) fn pattern_at_record_start(&self, pattern: &[u8]) -> bool {
        self.records.iter().skip(1).any(|r| {
            if r.prefix.len() >= pattern.len() {
                r.prefix[..pattern.len()] == *pattern
            } else if r.prefix.len() < RECORD_PREFIX_LEN {
                // The text ends before the pattern would.
                false
            } else {
                pattern.starts_with(&r.prefix)
            }
        })
    }

    pub fn serialize(&self) -> Vec<u8> {
        io::serialize(self)
    }

    pub fn deserialize(bytes: &[u8]) -> Result<FmIndex, IndexError> {
        io::deserialize(bytes)
    }
}

/// Suffix array of `T$` in 1-based text positions; the `$` suffix is `n + 1`.
/// A plain forward construction, independent of the reversed index.
pub fn forward_suffix_array(codes: &[u8]) -> Vec<usize> {
    let mut t: Vec<u32> = codes.iter().map(|&c| c as u32 + 1).collect();
    t.push(0);
    let alphabet = t.iter().max().map_or(1, |&m| m as usize + 1);
    sais::suffix_array(&t, alphabet)
        .into_iter()
        .map(|k| k + 1)
        .collect()
}

/// Burrows-Wheeler transform of `T$`, with `None` for the sentinel.
pub fn forward_bwt(codes: &[u8]) -> Vec<Option<u8>> {
    forward_suffix_array(codes)
        .into_iter()
        .map(|pos| if pos == 1 { None } else { Some(codes[pos - 2]) })
        .collect()
}
