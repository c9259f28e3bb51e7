//! Alphabets, FASTA ingestion and the concatenated database text.

use std::fmt;

use crate::error::SequenceError;

/// Symbol set of a database.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlphabetKind {
    Dna,
    Protein,
}

const DNA_SYMBOLS: &[u8] = b"ACGT";
const PROTEIN_SYMBOLS: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";

/// A fixed alphabet mapping ASCII letters to small integer codes.
///
/// Codes `0..sigma` are the declared symbols. Code `sigma` is reserved for
/// symbols accepted in lenient mode; it never matches anything, itself
/// included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    kind: AlphabetKind,
}

impl Alphabet {
    pub const fn new(kind: AlphabetKind) -> Self {
        Alphabet { kind }
    }

    pub const fn dna() -> Self {
        Alphabet::new(AlphabetKind::Dna)
    }

    pub const fn protein() -> Self {
        Alphabet::new(AlphabetKind::Protein)
    }

    pub fn kind(&self) -> AlphabetKind {
        self.kind
    }

    fn symbols(&self) -> &'static [u8] {
        match self.kind {
            AlphabetKind::Dna => DNA_SYMBOLS,
            AlphabetKind::Protein => PROTEIN_SYMBOLS,
        }
    }

    /// Number of declared symbols (4 or 20).
    pub fn sigma(&self) -> usize {
        self.symbols().len()
    }

    /// The reserved never-match code.
    pub fn unknown_code(&self) -> u8 {
        self.sigma() as u8
    }

    pub fn encode(&self, ch: u8) -> Option<u8> {
        let up = ch.to_ascii_uppercase();
        self.symbols().iter().position(|&s| s == up).map(|p| p as u8)
    }

    /// Decodes a code; the never-match code decodes to `N` for DNA and `X`
    /// for protein.
    pub fn decode(&self, code: u8) -> u8 {
        match self.symbols().get(code as usize) {
            Some(&s) => s,
            None => match self.kind {
                AlphabetKind::Dna => b'N',
                AlphabetKind::Protein => b'X',
            },
        }
    }

    pub fn encode_str(&self, s: &str) -> Result<Vec<u8>, SequenceError> {
        s.bytes()
            .enumerate()
            .map(|(i, b)| {
                self.encode(b).ok_or(SequenceError::UnknownSymbol {
                    position: i + 1,
                    symbol: b as char,
                })
            })
            .collect()
    }

    /// Like `encode_str`, but maps unknown characters to the never-match code.
    pub fn encode_str_lenient(&self, s: &str) -> Vec<u8> {
        s.bytes()
            .map(|b| self.encode(b).unwrap_or(self.unknown_code()))
            .collect()
    }

    pub fn decode_all(&self, codes: &[u8]) -> String {
        codes.iter().map(|&c| self.decode(c) as char).collect()
    }
}

/// A named, encoded sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub codes: Vec<u8>,
}

/// A query sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub codes: Vec<u8>,
}

impl Query {
    pub fn new(id: impl Into<String>, codes: Vec<u8>) -> Self {
        Query {
            id: id.into(),
            codes,
        }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Parses FASTA text into records.
///
/// In strict mode any character outside the alphabet is an error, reported
/// with its 1-based position inside the record's sequence. In lenient mode
/// it is encoded as the never-match code. Whitespace inside sequence lines
/// is ignored.
pub fn parse_fasta(
    input: &[u8],
    alphabet: Alphabet,
    lenient: bool,
) -> Result<Vec<Record>, SequenceError> {
    let mut records: Vec<Record> = Vec::new();
    let mut current: Option<Record> = None;

    for (line_no, raw) in input.split(|&b| b == b'\n').enumerate() {
        let line = raw.strip_suffix(b"\r").unwrap_or(raw);
        if let Some(header) = line.strip_prefix(b">") {
            if let Some(rec) = current.take() {
                finish_record(rec, &mut records)?;
            }
            let header = String::from_utf8_lossy(header);
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            current = Some(Record {
                id,
                codes: Vec::new(),
            });
            continue;
        }
        let rec = match current.as_mut() {
            Some(rec) => rec,
            None if line.iter().all(u8::is_ascii_whitespace) => continue,
            None => return Err(SequenceError::MissingHeader { line: line_no + 1 }),
        };
        for &b in line {
            if b.is_ascii_whitespace() {
                continue;
            }
            match alphabet.encode(b) {
                Some(c) => rec.codes.push(c),
                None if lenient && b.is_ascii_graphic() => rec.codes.push(alphabet.unknown_code()),
                None => {
                    return Err(SequenceError::UnknownSymbol {
                        position: rec.codes.len() + 1,
                        symbol: b as char,
                    })
                }
            }
        }
    }
    if let Some(rec) = current.take() {
        finish_record(rec, &mut records)?;
    }
    Ok(records)
}

fn finish_record(rec: Record, out: &mut Vec<Record>) -> Result<(), SequenceError> {
    if rec.codes.is_empty() {
        return Err(SequenceError::EmptyRecord { id: rec.id });
    }
    out.push(rec);
    Ok(())
}

/// Start of one record in the concatenated text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    /// 1-based global offset of the record's first symbol.
    pub start: usize,
    pub id: String,
}

/// All database records joined into one text, with a boundary map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedText {
    pub codes: Vec<u8>,
    pub boundaries: Vec<Boundary>,
}

impl EncodedText {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Single-record text.
    pub fn single(id: impl Into<String>, codes: Vec<u8>) -> Self {
        EncodedText {
            codes,
            boundaries: vec![Boundary {
                start: 1,
                id: id.into(),
            }],
        }
    }

    /// Index into `boundaries` of the record owning `global_pos` (1-based).
    pub fn record_index(&self, global_pos: usize) -> Option<usize> {
        if global_pos == 0 || global_pos > self.codes.len() {
            return None;
        }
        Some(
            self.boundaries
                .partition_point(|b| b.start <= global_pos)
                .saturating_sub(1),
        )
    }

    /// Maps a global 1-based position to (record id, local 1-based offset).
    pub fn resolve_position(&self, global_pos: usize) -> Result<(&str, usize), SequenceError> {
        let idx = self
            .record_index(global_pos)
            .ok_or(SequenceError::OutOfRange {
                position: global_pos,
                len: self.codes.len(),
            })?;
        let b = &self.boundaries[idx];
        Ok((b.id.as_str(), global_pos - b.start + 1))
    }

    /// 1-based inclusive global span of record `idx`.
    pub fn record_span(&self, idx: usize) -> (usize, usize) {
        let start = self.boundaries[idx].start;
        let end = self
            .boundaries
            .get(idx + 1)
            .map_or(self.codes.len(), |b| b.start - 1);
        (start, end)
    }

    /// True when the 1-based span `[start, end]` lies within one record.
    pub fn same_record(&self, start: usize, end: usize) -> bool {
        if self.boundaries.len() == 1 {
            return true;
        }
        self.record_index(start) == self.record_index(end)
    }

    pub fn record_starts(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundaries.iter().map(|b| b.start)
    }
}

/// Joins records into one text.
pub fn concatenate(records: Vec<Record>) -> Result<EncodedText, SequenceError> {
    if records.is_empty() {
        return Err(SequenceError::EmptyDatabase);
    }
    let total = records.iter().map(|r| r.codes.len()).sum();
    let mut codes = Vec::with_capacity(total);
    let mut boundaries = Vec::with_capacity(records.len());
    for rec in records {
        if rec.codes.is_empty() {
            return Err(SequenceError::EmptyRecord { id: rec.id });
        }
        boundaries.push(Boundary {
            start: codes.len() + 1,
            id: rec.id,
        });
        codes.extend_from_slice(&rec.codes);
    }
    Ok(EncodedText { codes, boundaries })
}

impl fmt::Display for AlphabetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetKind::Dna => f.write_str("dna"),
            AlphabetKind::Protein => f.write_str("protein"),
        }
    }
}

impl std::str::FromStr for AlphabetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dna" => Ok(AlphabetKind::Dna),
            "protein" => Ok(AlphabetKind::Protein),
            other => Err(format!("unknown alphabet `{other}` (expected dna or protein)")),
        }
    }
}
