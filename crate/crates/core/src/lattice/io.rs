//! Binary export of representation tables.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic  "REPT"           4 bytes
//! version u32             currently 1
//! r       u32             fold count
//! N       u32             grid range bound
//! dim     u8              key width (5 for S, 6 for S')
//! records, sorted lexicographically by key:
//!   key    dim x i64
//!   count  u64            when the count fits and is below the marker
//!        | u64::MAX marker, then u32 length + little-endian magnitude bytes
//! ```
//!
//! Sorted records make the byte stream canonical: two equal tables always
//! serialize identically, whatever thread count built them.

use std::io::{Read, Write};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::table::RepTable;
use crate::{Error, Result};

pub const REPT_MAGIC: [u8; 4] = *b"REPT";
pub const REPT_VERSION: u32 = 1;
const BIG_COUNT_MARKER: u64 = u64::MAX;

/// Writes the canonical binary form of a table.
pub fn write_rept<const D: usize, W: Write>(table: &RepTable<D>, w: &mut W) -> Result<()> {
    w.write_all(&REPT_MAGIC)?;
    w.write_all(&REPT_VERSION.to_le_bytes())?;
    w.write_all(&table.r().to_le_bytes())?;
    w.write_all(&table.n().to_le_bytes())?;
    w.write_all(&[D as u8])?;
    for (key, count) in table.sorted_entries() {
        for c in key {
            w.write_all(&c.to_le_bytes())?;
        }
        match count.to_u64() {
            Some(v) if v != BIG_COUNT_MARKER => w.write_all(&v.to_le_bytes())?,
            _ => {
                w.write_all(&BIG_COUNT_MARKER.to_le_bytes())?;
                let bytes = count.to_bytes_le();
                let len = u32::try_from(bytes.len())
                    .map_err(|_| Error::Invalid("count magnitude too large to encode".into()))?;
                w.write_all(&len.to_le_bytes())?;
                w.write_all(&bytes)?;
            }
        }
    }
    Ok(())
}

/// The canonical byte form of a table.
pub fn rept_bytes<const D: usize>(table: &RepTable<D>) -> Vec<u8> {
    let mut out = Vec::new();
    write_rept(table, &mut out).expect("writing to a Vec cannot fail");
    out
}

/// A parsed table file. Keys keep the width declared in the header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReptFile {
    pub r: u32,
    pub n: u32,
    pub dim: u8,
    pub entries: Vec<(Vec<i64>, BigUint)>,
}

/// Reads a table file back. Verifies magic, version, and record framing.
pub fn read_rept<R: Read>(r: &mut R) -> Result<ReptFile> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::BadTableFile("truncated header".into()))?;
    if magic != REPT_MAGIC {
        return Err(Error::BadTableFile("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != REPT_VERSION {
        return Err(Error::BadTableFile(format!(
            "unsupported version {version}"
        )));
    }
    let fold = read_u32(r)?;
    let n = read_u32(r)?;
    let mut dim = [0u8; 1];
    r.read_exact(&mut dim)
        .map_err(|_| Error::BadTableFile("truncated header".into()))?;
    let dim = dim[0];
    if !(1..=16).contains(&dim) {
        return Err(Error::BadTableFile(format!("implausible dim {dim}")));
    }

    let mut entries = Vec::new();
    loop {
        let mut key = Vec::with_capacity(dim as usize);
        let mut first = [0u8; 8];
        match r.read(&mut first)? {
            0 => break,
            8 => key.push(i64::from_le_bytes(first)),
            _ => return Err(Error::BadTableFile("truncated record".into())),
        }
        for _ in 1..dim {
            key.push(read_i64(r)?);
        }
        let raw = read_u64(r)?;
        let count = if raw == BIG_COUNT_MARKER {
            let len = read_u32(r)? as usize;
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes)
                .map_err(|_| Error::BadTableFile("truncated big count".into()))?;
            BigUint::from_bytes_le(&bytes)
        } else {
            BigUint::from(raw)
        };
        entries.push((key, count));
    }
    Ok(ReptFile {
        r: fold,
        n,
        dim,
        entries,
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)
        .map_err(|_| Error::BadTableFile("truncated field".into()))?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|_| Error::BadTableFile("truncated field".into()))?;
    Ok(u64::from_le_bytes(b))
}

fn read_i64<R: Read>(r: &mut R) -> Result<i64> {
    read_u64(r).map(|v| v as i64)
}
