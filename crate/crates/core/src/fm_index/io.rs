//! Binary index file format.
//!
//! ```text
//! "ALAE" | version u32 | alphabet u8 | n u64 | block u32 | sample_rate u32
//! counts (nsym + 1) x u64 | bwt (n + 1) bytes
//! occ: len u64, len x u32 | samples: len u64, len x u32
//! records: len u64, then per record start u64, id (u32 len + bytes),
//!          prefix (u32 len + bytes)
//! crc32 of everything above, u32
//! ```
//! All integers little-endian.

use super::{FmIndex, RecordInfo};
use crate::error::IndexError;
use crate::sequence::{Alphabet, AlphabetKind};

pub const MAGIC: &[u8; 4] = b"ALAE";
pub const FORMAT_VERSION: u32 = 1;

pub(super) fn serialize(index: &FmIndex) -> Vec<u8> {
    let mut out = Vec::with_capacity(index.bwt.len() * 2 + 64);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(match index.kind {
        AlphabetKind::Dna => 0,
        AlphabetKind::Protein => 1,
    });
    out.extend_from_slice(&(index.n as u64).to_le_bytes());
    out.extend_from_slice(&(index.block as u32).to_le_bytes());
    out.extend_from_slice(&(index.sample_rate as u32).to_le_bytes());
    for &c in &index.counts {
        out.extend_from_slice(&(c as u64).to_le_bytes());
    }
    out.extend_from_slice(&index.bwt);
    out.extend_from_slice(&(index.occ.len() as u64).to_le_bytes());
    for &v in &index.occ {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(index.samples.len() as u64).to_le_bytes());
    for &v in &index.samples {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(index.records.len() as u64).to_le_bytes());
    for r in &index.records {
        out.extend_from_slice(&(r.start as u64).to_le_bytes());
        out.extend_from_slice(&(r.id.len() as u32).to_le_bytes());
        out.extend_from_slice(r.id.as_bytes());
        out.extend_from_slice(&(r.prefix.len() as u32).to_le_bytes());
        out.extend_from_slice(&r.prefix);
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], IndexError> {
        let end = self.pos.checked_add(k).ok_or(IndexError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(IndexError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, IndexError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize, IndexError> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| IndexError::Malformed("length overflow"))
    }
}

pub(super) fn deserialize(bytes: &[u8]) -> Result<FmIndex, IndexError> {
    if bytes.len() < MAGIC.len() {
        return Err(IndexError::Truncated);
    }
    if &bytes[..4] != MAGIC {
        return Err(IndexError::BadMagic);
    }
    let mut rd = Reader { buf: bytes, pos: 4 };
    let version = rd.u32()?;
    if version != FORMAT_VERSION {
        return Err(IndexError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let kind = match rd.u8()? {
        0 => AlphabetKind::Dna,
        1 => AlphabetKind::Protein,
        _ => return Err(IndexError::Malformed("alphabet kind")),
    };
    let n = rd.len()?;
    let block = rd.u32()? as usize;
    let sample_rate = rd.u32()? as usize;
    if block == 0 || sample_rate == 0 {
        return Err(IndexError::Malformed("zero block or sample rate"));
    }
    let sigma = Alphabet::new(kind).sigma();
    let nsym = sigma + 2;
    let mut counts = Vec::with_capacity(nsym + 1);
    for _ in 0..=nsym {
        counts.push(rd.len()?);
    }
    let bwt = rd.take(n.checked_add(1).ok_or(IndexError::Truncated)?)?.to_vec();
    let occ_len = rd.len()?;
    let occ_bytes = rd.take(occ_len.checked_mul(4).ok_or(IndexError::Truncated)?)?;
    let occ = occ_bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let samples_len = rd.len()?;
    let sample_bytes = rd.take(samples_len.checked_mul(4).ok_or(IndexError::Truncated)?)?;
    let samples = sample_bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let nrec = rd.len()?;
    let mut records = Vec::new();
    for _ in 0..nrec {
        let start = rd.len()?;
        let id_len = rd.u32()? as usize;
        let id = String::from_utf8(rd.take(id_len)?.to_vec())
            .map_err(|_| IndexError::Malformed("record id is not UTF-8"))?;
        let pre_len = rd.u32()? as usize;
        let prefix = rd.take(pre_len)?.to_vec();
        records.push(RecordInfo { start, id, prefix });
    }
    let body_end = rd.pos;
    let stored = rd.u32()?;
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(IndexError::ChecksumMismatch { stored, computed });
    }
    if rd.pos != bytes.len() {
        return Err(IndexError::Malformed("trailing bytes"));
    }

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
    if index.bwt.iter().any(|&s| s as usize >= nsym)
        || index.bwt.iter().filter(|&&s| s == 0).count() != 1
    {
        return Err(IndexError::Malformed("bwt symbols"));
    }
    if index.samples.len() != (n + 1).div_ceil(sample_rate) {
        return Err(IndexError::Malformed("sample count"));
    }
    let stored_occ: Vec<u32> = occ;
    index.rebuild_rank();
    if index.counts != counts || index.occ != stored_occ {
        return Err(IndexError::Malformed("rank structures disagree with bwt"));
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::EncodedText;

    fn fixture() -> FmIndex {
        let t = EncodedText::single("t", Alphabet::dna().encode_str("GCTAGC").unwrap());
        FmIndex::build(&t, AlphabetKind::Dna).unwrap()
    }

    #[test]
    fn roundtrip_preserves_queries() {
        let idx = fixture();
        let back = FmIndex::deserialize(&idx.serialize()).unwrap();
        assert_eq!(back, idx);
        for p in [&[2u8, 1][..], &[3], &[2, 1, 3, 0, 2, 1]] {
            let r = idx.range_of(p).unwrap();
            assert_eq!(back.range_of(p).unwrap(), r);
            assert_eq!(back.locate(r, p.len()).unwrap(), idx.locate(r, p.len()).unwrap());
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let mut bytes = fixture().serialize();
        bytes[0] = b'X';
        assert_eq!(FmIndex::deserialize(&bytes), Err(IndexError::BadMagic));
    }

    #[test]
    fn rejects_version() {
        let mut bytes = fixture().serialize();
        bytes[4] = 9;
        assert!(matches!(
            FmIndex::deserialize(&bytes),
            Err(IndexError::VersionMismatch { found: 9, .. })
        ));
    }

    #[test]
    fn rejects_truncation() {
        let bytes = fixture().serialize();
        for cut in [2, 10, 40, bytes.len() - 1] {
            assert_eq!(FmIndex::deserialize(&bytes[..cut]), Err(IndexError::Truncated));
        }
    }

    #[test]
    fn rejects_flipped_payload_byte() {
        let mut bytes = fixture().serialize();
        let k = 4 + 4 + 1 + 8 + 4 + 4 + 7 * 8 + 2;
        bytes[k] ^= 0x01;
        assert!(matches!(
            FmIndex::deserialize(&bytes),
            Err(IndexError::ChecksumMismatch { .. })
        ));
    }
}
