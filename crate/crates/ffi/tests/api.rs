use std::ffi::{CStr, CString};
use std::ptr;

use alae_ffi::*;

const DEFAULT: AlaeScheme = AlaeScheme {
    matched: 1,
    mismatch: -3,
    gap_open: -5,
    gap_extend: -2,
};

fn build(fasta: &str) -> *mut AlaeIndex {
    let mut ix = ptr::null_mut();
    let st = unsafe {
        alae_index_build_fasta(fasta.as_ptr(), fasta.len(), AlaeAlphabet::Dna, false, &mut ix)
    };
    assert_eq!(st, AlaeStatus::Ok);
    ix
}

fn hits(ix: *const AlaeIndex, q: &str, h: i32, mode: AlaeMode, threads: usize) -> Vec<AlaeHit> {
    let mut out = ptr::null_mut();
    let st = unsafe { alae_search(ix, q.as_ptr(), q.len(), DEFAULT, h, mode, threads, &mut out) };
    assert_eq!(st, AlaeStatus::Ok, "{:?}", last_error());
    let n = unsafe { alae_hits_len(out) };
    let v = (0..n)
        .map(|i| {
            let mut hit = AlaeHit::default();
            assert_eq!(unsafe { alae_hits_get(out, i, &mut hit) }, AlaeStatus::Ok);
            hit
        })
        .collect();
    unsafe { alae_hits_free(out) };
    v
}

fn last_error() -> Option<String> {
    let p = alae_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn self_search_through_the_c_interface() {
    let ix = build(">a\nACGTACGT\n>b\nGCTAG\n");
    assert_eq!(unsafe { alae_index_len(ix) }, 13);
    assert_eq!(unsafe { alae_index_record_count(ix) }, 2);
    let found = hits(ix, "GCTAG", 5, AlaeMode::Alae, 1);
    assert_eq!(
        found,
        vec![AlaeHit {
            record: 1,
            start_t: 1,
            end_t: 5,
            end_p: 5,
            score: 5
        }]
    );
    unsafe { alae_index_free(ix) };
}

#[test]
fn modes_and_threads_agree() {
    let ix = build(">r\nACGTTGCATGCTAGCTAGGATCCGATCGATTGCAGCTAGCTAACGT\n");
    let q = "GCATGCTAGCTAGGATCGATCG";
    let a = hits(ix, q, 6, AlaeMode::Alae, 1);
    assert!(!a.is_empty());
    assert_eq!(a, hits(ix, q, 6, AlaeMode::Bwtsw, 1));
    assert_eq!(a, hits(ix, q, 6, AlaeMode::Oracle, 1));
    assert_eq!(a, hits(ix, q, 6, AlaeMode::Alae, 4));
    unsafe { alae_index_free(ix) };
}

#[test]
fn save_and_load_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let file = CString::new(dir.path().join("x.idx").to_str().unwrap()).unwrap();
    let ix = build(">t\nGCTAGCTAGGA\n");
    assert_eq!(unsafe { alae_index_save(ix, file.as_ptr()) }, AlaeStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { alae_index_load(file.as_ptr(), &mut back) }, AlaeStatus::Ok);
    assert_eq!(hits(ix, "GCTAG", 4, AlaeMode::Alae, 1), hits(back, "GCTAG", 4, AlaeMode::Alae, 1));
    unsafe {
        alae_index_free(ix);
        alae_index_free(back);
    }
}

#[test]
fn errors_are_reported_with_codes() {
    let mut ix = ptr::null_mut();
    let bad = ">t\nACNGT\n";
    let st = unsafe { alae_index_build_fasta(bad.as_ptr(), bad.len(), AlaeAlphabet::Dna, false, &mut ix) };
    assert_eq!(st, AlaeStatus::Sequence);
    assert!(last_error().unwrap().contains('N'));
    assert!(ix.is_null());

    let missing = CString::new("/nonexistent/alae.idx").unwrap();
    assert_eq!(unsafe { alae_index_load(missing.as_ptr(), &mut ix) }, AlaeStatus::Io);

    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.idx");
    std::fs::write(&junk, b"not an index").unwrap();
    let junk = CString::new(junk.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { alae_index_load(junk.as_ptr(), &mut ix) }, AlaeStatus::Index);

    let ix = build(">t\nGCTAGCTA\n");
    let mut out = ptr::null_mut();
    let q = "GC";
    let st = unsafe { alae_search(ix, q.as_ptr(), q.len(), DEFAULT, 2, AlaeMode::Alae, 1, &mut out) };
    assert_eq!(st, AlaeStatus::Filter);
    let q = "GCTXG";
    let st = unsafe { alae_search(ix, q.as_ptr(), q.len(), DEFAULT, 2, AlaeMode::Alae, 1, &mut out) };
    assert_eq!(st, AlaeStatus::Sequence);
    let wrong = AlaeScheme { mismatch: 3, ..DEFAULT };
    let q = "GCTAG";
    let st = unsafe { alae_search(ix, q.as_ptr(), q.len(), wrong, 2, AlaeMode::Alae, 1, &mut out) };
    assert_eq!(st, AlaeStatus::Scoring);
    let st = unsafe { alae_search(ptr::null(), q.as_ptr(), q.len(), DEFAULT, 2, AlaeMode::Alae, 1, &mut out) };
    assert_eq!(st, AlaeStatus::NullPointer);
    let st = unsafe { alae_search(ix, q.as_ptr(), q.len(), DEFAULT, 2, AlaeMode::Alae, 0, &mut out) };
    assert_eq!(st, AlaeStatus::InvalidArgument);
    let mut hit = AlaeHit::default();
    assert_eq!(unsafe { alae_hits_get(ptr::null(), 0, &mut hit) }, AlaeStatus::NullPointer);
    unsafe {
        alae_index_free(ix);
        alae_index_free(ptr::null_mut());
        alae_hits_free(ptr::null_mut());
    }
}

#[test]
fn entry_bound_matches_the_table() {
    let (mut c, mut e) = (0.0, 0.0);
    assert_eq!(unsafe { alae_entry_bound(DEFAULT, 4, &mut c, &mut e) }, AlaeStatus::Ok);
    assert!((c - 4.47).abs() < 0.01 && (e - 0.6038).abs() < 0.001);
    let s = AlaeScheme { matched: 2, mismatch: -1, ..DEFAULT };
    assert_eq!(unsafe { alae_entry_bound(s, 3, &mut c, &mut e) }, AlaeStatus::Analysis);
}
