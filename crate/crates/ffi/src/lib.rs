//! C interface to the alae search engine.
//!
//! Indexes and hit lists are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an [`AlaeStatus`];
//! the message of the last failure on the calling thread is available from
//! [`alae_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use alae::analysis::entry_bound;
use alae::search::RecordMap;
use alae::sequence::{concatenate, parse_fasta};
use alae::{
    search, Alphabet, AlphabetKind, FmIndex, Mode, Query, ScoringScheme, SearchError,
    SearchOptions,
};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlaeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Sequence = 4,
    Index = 5,
    Scoring = 6,
    Filter = 7,
    Analysis = 8,
    Search = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlaeAlphabet {
    Dna = 0,
    Protein = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlaeMode {
    Alae = 0,
    Bwtsw = 1,
    Oracle = 2,
}

/// Match reward, mismatch penalty, gap open and gap extension.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct AlaeScheme {
    pub matched: i32,
    pub mismatch: i32,
    pub gap_open: i32,
    pub gap_extend: i32,
}

/// One reported end pair. Text positions are 1-based and local to `record`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AlaeHit {
    pub record: usize,
    pub start_t: usize,
    pub end_t: usize,
    pub end_p: usize,
    pub score: i32,
}

/// Opaque index handle.
pub struct AlaeIndex {
    inner: FmIndex,
}

/// Opaque hit list handle.
pub struct AlaeHits {
    hits: Vec<AlaeHit>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: AlaeStatus, msg: impl ToString) -> AlaeStatus {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
    status
}

fn guard(f: impl FnOnce() -> AlaeStatus) -> AlaeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(AlaeStatus::Panic, "internal panic"),
    }
}

fn search_status(e: &SearchError) -> AlaeStatus {
    match e {
        SearchError::Scoring(_) => AlaeStatus::Scoring,
        SearchError::Filter(_) => AlaeStatus::Filter,
        SearchError::Index(_) => AlaeStatus::Index,
        _ => AlaeStatus::Search,
    }
}

fn scheme(s: &AlaeScheme) -> Result<ScoringScheme, AlaeStatus> {
    ScoringScheme::new(s.matched, s.mismatch, s.gap_open, s.gap_extend)
        .map_err(|e| fail(AlaeStatus::Scoring, e))
}

unsafe fn bytes<'a>(data: *const u8, len: usize) -> Result<&'a [u8], AlaeStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(fail(AlaeStatus::NullPointer, "null data pointer"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn path<'a>(p: *const c_char) -> Result<&'a str, AlaeStatus> {
    if p.is_null() {
        return Err(fail(AlaeStatus::NullPointer, "null path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(AlaeStatus::InvalidArgument, "path is not UTF-8"))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn alae_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds an index from FASTA bytes.
///
/// # Safety
/// `fasta` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alae_index_build_fasta(
    fasta: *const u8,
    len: usize,
    alphabet: AlaeAlphabet,
    lenient: bool,
    out: *mut *mut AlaeIndex,
) -> AlaeStatus {
    guard(|| {
        if out.is_null() {
            return fail(AlaeStatus::NullPointer, "null output handle");
        }
        let data = tri!(bytes(fasta, len));
        let kind = match alphabet {
            AlaeAlphabet::Dna => AlphabetKind::Dna,
            AlaeAlphabet::Protein => AlphabetKind::Protein,
        };
        let records = tri!(parse_fasta(data, Alphabet::new(kind), lenient)
            .map_err(|e| fail(AlaeStatus::Sequence, e)));
        let text = tri!(concatenate(records).map_err(|e| fail(AlaeStatus::Sequence, e)));
        let inner = tri!(FmIndex::build(&text, kind).map_err(|e| fail(AlaeStatus::Index, e)));
        *out = Box::into_raw(Box::new(AlaeIndex { inner }));
        AlaeStatus::Ok
    })
}

/// Loads a serialized index file.
///
/// # Safety
/// `file` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alae_index_load(file: *const c_char, out: *mut *mut AlaeIndex) -> AlaeStatus {
    guard(|| {
        if out.is_null() {
            return fail(AlaeStatus::NullPointer, "null output handle");
        }
        let p = tri!(path(file));
        let data = tri!(std::fs::read(p).map_err(|e| fail(AlaeStatus::Io, format!("{p}: {e}"))));
        let inner = tri!(FmIndex::deserialize(&data).map_err(|e| fail(AlaeStatus::Index, e)));
        *out = Box::into_raw(Box::new(AlaeIndex { inner }));
        AlaeStatus::Ok
    })
}

/// Writes an index to a file.
///
/// # Safety
/// `index` must come from this library and `file` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn alae_index_save(index: *const AlaeIndex, file: *const c_char) -> AlaeStatus {
    guard(|| {
        let Some(ix) = index.as_ref() else {
            return fail(AlaeStatus::NullPointer, "null index");
        };
        let p = tri!(path(file));
        match std::fs::write(p, ix.inner.serialize()) {
            Ok(()) => AlaeStatus::Ok,
            Err(e) => fail(AlaeStatus::Io, format!("{p}: {e}")),
        }
    })
}

/// Text length `n`, or 0 for a null handle.
///
/// # Safety
/// `index` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn alae_index_len(index: *const AlaeIndex) -> usize {
    index.as_ref().map_or(0, |ix| ix.inner.len())
}

/// Number of records, or 0 for a null handle.
///
/// # Safety
/// `index` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn alae_index_record_count(index: *const AlaeIndex) -> usize {
    index.as_ref().map_or(0, |ix| ix.inner.records().len())
}

/// # Safety
/// `index` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn alae_index_free(index: *mut AlaeIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}

/// Searches one query given as residue letters (for example `"GCTAG"`).
///
/// # Safety
/// `index` must come from this library, `query` must point to `len`
/// readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alae_search(
    index: *const AlaeIndex,
    query: *const u8,
    len: usize,
    scoring: AlaeScheme,
    threshold: i32,
    mode: AlaeMode,
    threads: usize,
    out: *mut *mut AlaeHits,
) -> AlaeStatus {
    guard(|| {
        let Some(ix) = index.as_ref() else {
            return fail(AlaeStatus::NullPointer, "null index");
        };
        if out.is_null() {
            return fail(AlaeStatus::NullPointer, "null output handle");
        }
        if threads == 0 {
            return fail(AlaeStatus::InvalidArgument, "threads must be at least 1");
        }
        let letters = tri!(bytes(query, len));
        let alphabet = Alphabet::new(ix.inner.kind());
        let mut codes = Vec::with_capacity(letters.len());
        for (k, &ch) in letters.iter().enumerate() {
            match alphabet.encode(ch) {
                Some(c) => codes.push(c),
                None => {
                    return fail(
                        AlaeStatus::Sequence,
                        format!("unknown symbol {:?} at position {}", ch as char, k + 1),
                    )
                }
            }
        }
        let sc = tri!(scheme(&scoring));
        let opts = SearchOptions {
            threads,
            ..SearchOptions::mode(match mode {
                AlaeMode::Alae => Mode::Alae,
                AlaeMode::Bwtsw => Mode::Bwtsw,
                AlaeMode::Oracle => Mode::Oracle,
            })
        };
        let outcome = match search(&ix.inner, &Query::new("q", codes), &sc, threshold, &opts) {
            Ok(o) => o,
            Err(e) => return fail(search_status(&e), e),
        };
        let records = RecordMap::from_index(&ix.inner);
        let starts = ix.inner.records();
        let hits = outcome
            .hits
            .iter()
            .map(|h| {
                let r = records.record_of(h.end_t);
                let base = starts[r].start;
                AlaeHit {
                    record: r,
                    start_t: h.start_t + 1 - base,
                    end_t: h.end_t + 1 - base,
                    end_p: h.end_p,
                    score: h.score,
                }
            })
            .collect();
        *out = Box::into_raw(Box::new(AlaeHits { hits }));
        AlaeStatus::Ok
    })
}

/// Number of hits, or 0 for a null handle.
///
/// # Safety
/// `hits` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn alae_hits_len(hits: *const AlaeHits) -> usize {
    hits.as_ref().map_or(0, |h| h.hits.len())
}

/// Copies hit `i` (in end-position order) into `out`.
///
/// # Safety
/// `hits` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alae_hits_get(hits: *const AlaeHits, i: usize, out: *mut AlaeHit) -> AlaeStatus {
    let Some(h) = hits.as_ref() else {
        return fail(AlaeStatus::NullPointer, "null hits");
    };
    if out.is_null() {
        return fail(AlaeStatus::NullPointer, "null output");
    }
    match h.hits.get(i) {
        Some(hit) => {
            *out = *hit;
            AlaeStatus::Ok
        }
        None => fail(AlaeStatus::InvalidArgument, format!("hit {i} out of {}", h.hits.len())),
    }
}

/// # Safety
/// `hits` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn alae_hits_free(hits: *mut AlaeHits) {
    if !hits.is_null() {
        drop(Box::from_raw(hits));
    }
}

/// Expected calculated entries bound `coefficient * m * n^exponent`.
///
/// # Safety
/// `coefficient` and `exponent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alae_entry_bound(
    scoring: AlaeScheme,
    sigma: usize,
    coefficient: *mut f64,
    exponent: *mut f64,
) -> AlaeStatus {
    guard(|| {
        if coefficient.is_null() || exponent.is_null() {
            return fail(AlaeStatus::NullPointer, "null output");
        }
        let sc = tri!(scheme(&scoring));
        match entry_bound(&sc, sigma) {
            Ok((c, e)) => {
                *coefficient = c;
                *exponent = e;
                AlaeStatus::Ok
            }
            Err(e) => fail(AlaeStatus::Analysis, e),
        }
    })
}
