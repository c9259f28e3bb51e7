//! Suffix array construction by induced sorting (SA-IS).
//!
//! The input must end with a unique sentinel `0` that is smaller than every
//! other symbol. Symbols are in `0..alphabet`.

const EMPTY: usize = usize::MAX;

pub fn suffix_array(text: &[u32], alphabet: usize) -> Vec<usize> {
    let n = text.len();
    let mut sa = vec![EMPTY; n];
    if n == 0 {
        return sa;
    }
    debug_assert_eq!(text[n - 1], 0);
    sais(text, &mut sa, alphabet);
    sa
}

fn bucket_bounds(text: &[u32], alphabet: usize, ends: bool) -> Vec<usize> {
    let mut counts = vec![0usize; alphabet];
    for &c in text {
        counts[c as usize] += 1;
    }
    let mut sum = 0;
    let mut out = vec![0usize; alphabet];
    for (c, &k) in counts.iter().enumerate() {
        sum += k;
        out[c] = if ends { sum } else { sum - k };
    }
    out
}

fn classify(text: &[u32]) -> Vec<bool> {
    // true = S-type
    let n = text.len();
    let mut stype = vec![false; n];
    stype[n - 1] = true;
    for i in (0..n - 1).rev() {
        stype[i] = text[i] < text[i + 1] || (text[i] == text[i + 1] && stype[i + 1]);
    }
    stype
}

#[inline]
fn is_lms(stype: &[bool], i: usize) -> bool {
    i > 0 && stype[i] && !stype[i - 1]
}

fn induce(text: &[u32], sa: &mut [usize], stype: &[bool], alphabet: usize) {
    let n = text.len();
    let mut heads = bucket_bounds(text, alphabet, false);
    for k in 0..n {
        let j = sa[k];
        if j != EMPTY && j > 0 && !stype[j - 1] {
            let c = text[j - 1] as usize;
            sa[heads[c]] = j - 1;
            heads[c] += 1;
        }
    }
    let mut tails = bucket_bounds(text, alphabet, true);
    for k in (0..n).rev() {
        let j = sa[k];
        if j != EMPTY && j > 0 && stype[j - 1] {
            let c = text[j - 1] as usize;
            tails[c] -= 1;
            sa[tails[c]] = j - 1;
        }
    }
}

fn lms_equal(text: &[u32], stype: &[bool], a: usize, b: usize) -> bool {
    let n = text.len();
    if a == n - 1 || b == n - 1 {
        return a == b;
    }
    let mut k = 0;
    loop {
        let (x, y) = (a + k, b + k);
        if text[x] != text[y] || stype[x] != stype[y] {
            return false;
        }
        if k > 0 && (is_lms(stype, x) || is_lms(stype, y)) {
            return is_lms(stype, x) && is_lms(stype, y);
        }
        k += 1;
    }
}

fn sais(text: &[u32], sa: &mut [usize], alphabet: usize) {
    let n = text.len();
    if n == 1 {
        sa[0] = 0;
        return;
    }
    let stype = classify(text);

    // Stage 1: place LMS suffixes at bucket ends and induce.
    sa.fill(EMPTY);
    let mut tails = bucket_bounds(text, alphabet, true);
    for i in (1..n).rev() {
        if is_lms(&stype, i) {
            let c = text[i] as usize;
            tails[c] -= 1;
            sa[tails[c]] = i;
        }
    }
    induce(text, sa, &stype, alphabet);

    // Name the sorted LMS substrings.
    let lms_sorted: Vec<usize> = sa
        .iter()
        .copied()
        .filter(|&j| j != EMPTY && is_lms(&stype, j))
        .collect();
    let mut names = vec![EMPTY; n];
    let mut name = 0u32;
    let mut prev: Option<usize> = None;
    for &j in &lms_sorted {
        if let Some(p) = prev {
            if !lms_equal(text, &stype, p, j) {
                name += 1;
            }
        }
        names[j] = name as usize;
        prev = Some(j);
    }
    let lms_positions: Vec<usize> = (1..n).filter(|&i| is_lms(&stype, i)).collect();
    let reduced: Vec<u32> = lms_positions.iter().map(|&i| names[i] as u32).collect();
    let distinct = name as usize + 1;

    // Stage 2: sort the LMS suffixes, recursing if names are not unique.
    let mut reduced_sa = vec![EMPTY; reduced.len()];
    if distinct < reduced.len() {
        sais(&reduced, &mut reduced_sa, distinct);
    } else {
        for (i, &c) in reduced.iter().enumerate() {
            reduced_sa[c as usize] = i;
        }
    }

    // Stage 3: place sorted LMS suffixes and induce the full order.
    sa.fill(EMPTY);
    let mut tails = bucket_bounds(text, alphabet, true);
    for &r in reduced_sa.iter().rev() {
        let j = lms_positions[r];
        let c = text[j] as usize;
        tails[c] -= 1;
        sa[tails[c]] = j;
    }
    induce(text, sa, &stype, alphabet);
}
