//! Little-endian binary database format.
//!
//! ```text
//! magic "DPPLACE\0" | u32 version | u64 vocab fingerprint | u32 direct level
//! u8 gate_store | u64 place threshold | u8 index stored | u32 entries
//! entries: u32 id, u32 len + frame id, f64 coverage,
//!          u32 n + n x (u32 word, f64 weight),
//!          u32 n + n x 48-byte feature,
//!          u32 n + n x (u32 node, u32 m + m x u32 feature index)
//! [index stored: u32 words + per word (u32 word, u32 n + n x (u32 id, f64 w))]
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use super::{DbConfig, DbError, PlaceDatabase, PlaceEntry};
use crate::dynfilter::ValidityConfig;
use crate::features::{BinaryDescriptor, Feature, Keypoint};
use crate::vocabulary::{BagOfWords, DirectEntries, VocabularyTree};

const MAGIC: &[u8; 8] = b"DPPLACE\0";
const VERSION: u32 = 1;

/// Serialized size of one stored feature.
pub const FEATURE_BYTES: usize = 48;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f32(&mut self, v: f32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, n: usize) {
        self.u32(n as u32);
    }
}

pub fn encode(db: &PlaceDatabase, store_index: bool) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(VERSION);
    w.u64(db.vocab.fingerprint());
    w.len(db.config.direct_level);
    w.u8(db.config.gate_store as u8);
    w.u64(db.config.validity.place_threshold as u64);
    w.u8(store_index as u8);
    w.len(db.entries.len());
    for e in &db.entries {
        w.u32(e.place_id);
        w.len(e.frame_id.len());
        w.0.extend_from_slice(e.frame_id.as_bytes());
        w.f64(e.dynamic_coverage);
        w.len(e.bag.len());
        for &(word, weight) in e.bag.entries() {
            w.u32(word);
            w.f64(weight);
        }
        w.len(e.features.len());
        for f in &e.features {
            w.f32(f.keypoint.x);
            w.f32(f.keypoint.y);
            w.f32(f.keypoint.score);
            w.f32(f.keypoint.angle);
            w.0.extend_from_slice(&f.descriptor.to_bytes());
        }
        w.len(e.direct.nodes.len());
        for (&node, idx) in &e.direct.nodes {
            w.u32(node);
            w.len(idx.len());
            for &i in idx {
                w.u32(i);
            }
        }
    }
    if store_index {
        let used: Vec<(usize, &Vec<(u32, f64)>)> =
            db.inverted.iter().enumerate().filter(|(_, l)| !l.is_empty()).collect();
        w.len(used.len());
        for (word, list) in used {
            w.len(word);
            w.len(list.len());
            for &(id, weight) in list {
                w.u32(id);
                w.f64(weight);
            }
        }
    }
    w.0
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DbError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(DbError::Corrupt("truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, DbError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, DbError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, DbError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f32(&mut self) -> Result<f32, DbError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, DbError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    /// A length prefix, sanity-checked against the bytes left.
    fn len(&mut self, min_item_bytes: usize) -> Result<usize, DbError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_item_bytes) > self.buf.len() - self.pos {
            return Err(DbError::Corrupt("length exceeds file"));
        }
        Ok(n)
    }
}

pub fn decode(bytes: &[u8], vocab: Arc<VocabularyTree>) -> Result<PlaceDatabase, DbError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(DbError::Corrupt("bad magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(DbError::Version(version));
    }
    let fingerprint = r.u64()?;
    if fingerprint != vocab.fingerprint() {
        return Err(DbError::VocabMismatch {
            database: fingerprint,
            vocabulary: vocab.fingerprint(),
        });
    }
    let config = DbConfig {
        direct_level: r.u32()? as usize,
        gate_store: r.u8()? != 0,
        validity: ValidityConfig {
            place_threshold: r.u64()? as usize,
        },
    };
    let index_stored = r.u8()? != 0;
    let mut db = PlaceDatabase::new(vocab, config)?;
    let n = r.len(28)?;
    for _ in 0..n {
        let place_id = r.u32()?;
        let len = r.len(1)?;
        let frame_id = String::from_utf8(r.take(len)?.to_vec()).map_err(|_| DbError::Corrupt("frame id"))?;
        let dynamic_coverage = r.f64()?;
        let words = r.len(12)?;
        let mut pairs = Vec::with_capacity(words);
        for _ in 0..words {
            pairs.push((r.u32()?, r.f64()?));
        }
        let bag = BagOfWords::from_pairs(pairs.iter().copied());
        if bag.entries() != pairs.as_slice() {
            return Err(DbError::Corrupt("bag not sorted or has non-positive weights"));
        }
        if pairs.iter().any(|p| p.0 as usize >= db.vocab.word_count()) {
            return Err(DbError::Corrupt("word id out of range"));
        }
        let nf = r.len(FEATURE_BYTES)?;
        let mut features = Vec::with_capacity(nf);
        for _ in 0..nf {
            let keypoint = Keypoint {
                x: r.f32()?,
                y: r.f32()?,
                score: r.f32()?,
                angle: r.f32()?,
            };
            let descriptor = BinaryDescriptor::from_bytes(r.take(32)?.try_into().unwrap());
            features.push(Feature { keypoint, descriptor });
        }
        let nodes = r.len(8)?;
        let mut direct = DirectEntries {
            level: db.config.direct_level,
            nodes: BTreeMap::new(),
        };
        for _ in 0..nodes {
            let node = r.u32()?;
            let m = r.len(4)?;
            let idx = (0..m).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
            if idx.iter().any(|&i| i as usize >= nf) {
                return Err(DbError::Corrupt("direct index out of range"));
            }
            direct.nodes.insert(node, idx);
        }
        if place_id as usize != db.entries.len() {
            return Err(DbError::Corrupt("place ids not sequential"));
        }
        db.insert_entry(PlaceEntry {
            place_id,
            frame_id,
            dynamic_coverage,
            bag,
            direct,
            features,
        })?;
    }
    if index_stored {
        let words = r.len(8)?;
        let mut stored = vec![Vec::new(); db.vocab.word_count()];
        for _ in 0..words {
            let word = r.u32()? as usize;
            let m = r.len(12)?;
            let list = (0..m)
                .map(|_| Ok((r.u32()?, r.f64()?)))
                .collect::<Result<Vec<_>, DbError>>()?;
            *stored.get_mut(word).ok_or(DbError::Corrupt("word id out of range"))? = list;
        }
        if stored != db.inverted {
            return Err(DbError::Corrupt("stored inverted index disagrees with entries"));
        }
    }
    if r.pos != bytes.len() {
        return Err(DbError::Corrupt("trailing bytes"));
    }
    Ok(db)
}

pub fn save(db: &PlaceDatabase, path: impl AsRef<Path>) -> Result<u64, DbError> {
    let bytes = encode(db, false);
    fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}

pub fn load(path: impl AsRef<Path>, vocab: Arc<VocabularyTree>) -> Result<PlaceDatabase, DbError> {
    decode(&fs::read(path)?, vocab)
}
