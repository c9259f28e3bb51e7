#![allow(dead_code)]

use alae::dp::AlignmentHit;
use alae::scoring::q_value;
use alae::{AlphabetKind, EncodedText, FmIndex, Query, ScoringScheme};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Match/mismatch pairs with their usual gap costs.
pub const DNA_SCHEMES: [(i32, i32, i32, i32); 7] = [
    (1, -2, -5, -2),
    (1, -3, -5, -2),
    (1, -4, -5, -2),
    (2, -3, -5, -2),
    (4, -5, -12, -8),
    (1, -1, -5, -2),
    (1, -3, -2, -2),
];

pub const PROTEIN_SCHEMES: [(i32, i32, i32, i32); 2] = [(1, -4, -11, -1), (1, -1, -11, -1)];

pub struct Trial {
    pub index: FmIndex,
    pub text: EncodedText,
    pub query: Query,
    pub scheme: ScoringScheme,
    pub h: i32,
}

fn scheme(t: (i32, i32, i32, i32)) -> ScoringScheme {
    ScoringScheme::new(t.0, t.1, t.2, t.3).unwrap()
}

/// A random text and either a random query or a mutated piece of the text.
pub fn trial(rng: &mut StdRng, protein: bool, n_max: usize) -> Trial {
    let sigma = if protein { 20u8 } else { 4 };
    let n = rng.gen_range(50..=n_max);
    let codes: Vec<u8> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
    let sc = if protein {
        scheme(PROTEIN_SCHEMES[rng.gen_range(0..PROTEIN_SCHEMES.len())])
    } else {
        scheme(DNA_SCHEMES[rng.gen_range(0..DNA_SCHEMES.len())])
    };
    let q = q_value(&sc);
    let m = rng.gen_range(10..=200usize.min(n));
    let p: Vec<u8> = if rng.gen_bool(0.5) {
        (0..m).map(|_| rng.gen_range(0..sigma)).collect()
    } else {
        let s = rng.gen_range(0..=n - m);
        let mut v = Vec::with_capacity(m + 8);
        for &c in &codes[s..s + m] {
            match rng.gen_range(0..20) {
                0 => v.push(rng.gen_range(0..sigma)),
                1 => {}
                2 => {
                    v.push(c);
                    v.push(rng.gen_range(0..sigma));
                }
                _ => v.push(c),
            }
        }
        while v.len() < 10 {
            v.push(rng.gen_range(0..sigma));
        }
        v
    };
    let sa = sc.matched;
    let h = rng.gen_range(q as i32 * sa..=2 * q as i32 * sa);
    let kind = if protein {
        AlphabetKind::Protein
    } else {
        AlphabetKind::Dna
    };
    let text = EncodedText::single("t", codes);
    let index = FmIndex::build(&text, kind).unwrap();
    Trial {
        index,
        text,
        query: Query::new("q", p),
        scheme: sc,
        h,
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `(end_t, end_p, score)` triples.
pub fn triples(hits: &[AlignmentHit]) -> Vec<(usize, usize, i32)> {
    hits.iter().map(|h| (h.end_t, h.end_p, h.score)).collect()
}
