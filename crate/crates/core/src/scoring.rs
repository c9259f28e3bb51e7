//! Scoring schemes and the constants derived from them.

use std::fmt;
use std::str::FromStr;

use crate::error::ScoringError;

/// Match / mismatch / gap-open / gap-extend scores `<s_a, s_b, s_g, s_s>`.
///
/// A gap of `r` symbols costs `s_g + r * s_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScoringScheme {
    pub matched: i32,
    pub mismatch: i32,
    pub gap_open: i32,
    pub gap_extend: i32,
}

impl ScoringScheme {
    /// The DNA default `<1, -3, -5, -2>`.
    pub const DEFAULT: ScoringScheme = ScoringScheme {
        matched: 1,
        mismatch: -3,
        gap_open: -5,
        gap_extend: -2,
    };

    pub fn new(
        matched: i32,
        mismatch: i32,
        gap_open: i32,
        gap_extend: i32,
    ) -> Result<Self, ScoringError> {
        let s = ScoringScheme {
            matched,
            mismatch,
            gap_open,
            gap_extend,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ScoringError> {
        if self.matched <= 0 {
            return Err(ScoringError::InvalidScheme("s_a must be positive".into()));
        }
        if self.mismatch >= 0 || self.gap_open >= 0 || self.gap_extend >= 0 {
            return Err(ScoringError::InvalidScheme(
                "s_b, s_g and s_s must be negative".into(),
            ));
        }
        // Keeps every reachable score far from the DP sentinel.
        let limit = 1 << 20;
        if [self.matched, self.mismatch, self.gap_open, self.gap_extend]
            .iter()
            .any(|v| v.abs() > limit)
        {
            return Err(ScoringError::InvalidScheme("score magnitude too large".into()));
        }
        Ok(())
    }

    /// Cost of opening a gap of one symbol, `s_g + s_s`.
    #[inline]
    pub fn gap_first(&self) -> i32 {
        self.gap_open + self.gap_extend
    }

    /// `|s_g + s_s|`, the score a diagonal must exceed before a gap can
    /// open without going non-positive.
    #[inline]
    pub fn gap_open_barrier(&self) -> i32 {
        -self.gap_first()
    }
}

impl Default for ScoringScheme {
    fn default() -> Self {
        ScoringScheme::DEFAULT
    }
}

impl fmt::Display for ScoringScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.matched, self.mismatch, self.gap_open, self.gap_extend
        )
    }
}

impl FromStr for ScoringScheme {
    type Err = ScoringError;

    /// Parses `"s_a,s_b,s_g,s_s"`, e.g. `"1,-3,-5,-2"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<i32> = s
            .split(',')
            .map(|p| p.trim().parse::<i32>())
            .collect::<Result<_, _>>()
            .map_err(|e| ScoringError::InvalidScheme(format!("{s:?}: {e}")))?;
        match parts[..] {
            [a, b, g, e] => ScoringScheme::new(a, b, g, e),
            _ => Err(ScoringError::InvalidScheme(format!(
                "{s:?}: expected four comma-separated integers"
            ))),
        }
    }
}

/// Substitution score. `unknown` is the never-match code.
#[inline]
pub fn delta(x: u8, y: u8, unknown: u8, scheme: &ScoringScheme) -> i32 {
    if x == y && x != unknown {
        scheme.matched
    } else {
        scheme.mismatch
    }
}

/// Length of the exact-match seed every positive-scoring alignment starts
/// with: `floor(min(|s_b|, |s_g + s_s|) / s_a) + 1`.
pub fn q_value(scheme: &ScoringScheme) -> usize {
    let worst = (-scheme.mismatch).min(scheme.gap_open_barrier());
    (worst / scheme.matched) as usize + 1
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// Text-side length window for alignments reaching `h`:
/// `min_len = ceil(H / s_a)`, `L_max = max(m, m + floor((H - (s_a m + s_g)) / s_s))`.
pub fn length_bounds(
    scheme: &ScoringScheme,
    m: usize,
    h: i32,
) -> Result<(usize, usize), ScoringError> {
    if h < 1 {
        return Err(ScoringError::NonPositiveThreshold);
    }
    let sa = scheme.matched as i64;
    let min_len = (h as i64 + sa - 1) / sa;
    let m_i = m as i64;
    let extra = div_floor(
        h as i64 - (sa * m_i + scheme.gap_open as i64),
        scheme.gap_extend as i64,
    );
    let l_max = m_i.max(m_i + extra);
    if min_len > l_max {
        return Err(ScoringError::InfeasibleThreshold {
            h,
            min_len: min_len as usize,
            l_max: l_max.max(0) as usize,
        });
    }
    Ok((min_len as usize, l_max as usize))
}

/// Score threshold for an expectation value:
/// `H = ceil((ln(K m n) - ln E) / lambda)`.
pub fn threshold_from_evalue(
    e: f64,
    k: f64,
    lambda: f64,
    m: usize,
    n: usize,
) -> Result<i32, ScoringError> {
    if !(e > 0.0) {
        return Err(ScoringError::NonPositiveParameter("E"));
    }
    if !(k > 0.0) {
        return Err(ScoringError::NonPositiveParameter("K"));
    }
    if !(lambda > 0.0) {
        return Err(ScoringError::NonPositiveParameter("lambda"));
    }
    if m == 0 || n == 0 {
        return Err(ScoringError::NonPositiveParameter("m*n"));
    }
    let raw = ((k * m as f64 * n as f64).ln() - e.ln()) / lambda;
    // Absorb float noise around integers so exact cases stay exact.
    let rounded = raw.round();
    let h = if (raw - rounded).abs() < 1e-9 {
        rounded
    } else {
        raw.ceil()
    };
    Ok(h as i32)
}

/// Everything a search needs that derives from scheme, threshold and sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchParams {
    pub scheme: ScoringScheme,
    pub threshold: i32,
    /// Seed length from the scheme alone.
    pub q: usize,
    /// Seed length actually used: `min(q, min_len)`.
    pub seed_len: usize,
    pub min_len: usize,
    pub l_max: usize,
    pub m: usize,
    pub n: usize,
}

impl SearchParams {
    pub fn new(scheme: ScoringScheme, h: i32, m: usize, n: usize) -> Result<Self, ScoringError> {
        scheme.validate()?;
        let (min_len, l_max) = length_bounds(&scheme, m, h)?;
        let q = q_value(&scheme);
        Ok(SearchParams {
            scheme,
            threshold: h,
            q,
            seed_len: q.min(min_len),
            min_len,
            l_max,
            m,
            n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(a: i32, b: i32, g: i32, e: i32) -> ScoringScheme {
        ScoringScheme::new(a, b, g, e).unwrap()
    }

    #[test]
    fn delta_values() {
        let d = ScoringScheme::DEFAULT;
        assert_eq!(delta(2, 2, 4, &d), 1);
        assert_eq!(delta(2, 1, 4, &d), -3);
        assert_eq!(delta(4, 4, 4, &d), -3);
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_value(&ScoringScheme::DEFAULT), 4);
        assert_eq!(q_value(&s(1, -1, -5, -2)), 2);
        assert_eq!(q_value(&s(2, -3, -5, -2)), 2);
    }

    #[test]
    fn length_bound_examples() {
        let d = ScoringScheme::DEFAULT;
        assert_eq!(length_bounds(&d, 5, 3).unwrap(), (3, 5));
        assert_eq!(length_bounds(&d, 100, 30).unwrap(), (30, 132));
        assert_eq!(length_bounds(&d, 7, 7).unwrap().0, 7);
        assert_eq!(length_bounds(&s(2, -3, -5, -2), 9, 18).unwrap().0, 9);
        assert!(matches!(
            length_bounds(&d, 3, 10),
            Err(ScoringError::InfeasibleThreshold { .. })
        ));
    }

    #[test]
    fn parse_scheme() {
        assert_eq!("1,-3,-5,-2".parse::<ScoringScheme>().unwrap(), ScoringScheme::DEFAULT);
        assert!("1,-3,-5".parse::<ScoringScheme>().is_err());
        assert!("1,3,-5,-2".parse::<ScoringScheme>().is_err());
        assert!("0,-3,-5,-2".parse::<ScoringScheme>().is_err());
    }

    #[test]
    fn evalue_examples() {
        let mn = 10f64.exp();
        // m * n = e^10 with m = 1 cannot be expressed in integers exactly,
        // so spread it over K.
        assert_eq!(threshold_from_evalue(1.0, mn, 1.0, 1, 1).unwrap(), 10);
        assert_eq!(
            threshold_from_evalue(10.0, 0.5, 0.25, 100, 1_000_000).unwrap(),
            62
        );
        assert!(threshold_from_evalue(0.0, 1.0, 1.0, 1, 1).is_err());
        assert!(threshold_from_evalue(1.0, -1.0, 1.0, 1, 1).is_err());
        assert!(threshold_from_evalue(1.0, 1.0, 0.0, 1, 1).is_err());
    }

    #[test]
    fn doubling_n_shifts_by_ln2_over_lambda() {
        let lambda = 0.3;
        let base = ((0.2f64 * 50.0 * 1000.0).ln() - 2f64.ln()) / lambda;
        let a = threshold_from_evalue(2.0, 0.2, lambda, 50, 1000).unwrap();
        let b = threshold_from_evalue(2.0, 0.2, lambda, 50, 2000).unwrap();
        assert_eq!(a, base.ceil() as i32);
        assert_eq!(b, (base + 2f64.ln() / lambda).ceil() as i32);
    }

    proptest! {
        #[test]
        fn q_at_least_two_when_penalties_dominate(a in 1i32..5, b in 1i32..20, g in 1i32..20, e in 1i32..10) {
            let sc = s(a, -b, -g, -e);
            if b.min(g + e) >= a {
                prop_assert!(q_value(&sc) >= 2);
            }
        }

        #[test]
        fn evalue_monotonicity(e1 in 0.001f64..100.0, e2 in 0.001f64..100.0, m in 1usize..1000, n in 1usize..100000) {
            let h1 = threshold_from_evalue(e1, 0.3, 0.5, m, n).unwrap();
            let h2 = threshold_from_evalue(e2, 0.3, 0.5, m, n).unwrap();
            if e1 <= e2 { prop_assert!(h1 >= h2); }
            let h3 = threshold_from_evalue(e1, 0.3, 0.5, m + 1, n * 2).unwrap();
            prop_assert!(h3 >= h1);
        }
    }
}
