//! Little-endian binary vocabulary format.
//!
//! ```text
//! magic "DPVOCAB\0" | u32 version | u32 k | u32 levels | u32 words | u32 nodes
//! nodes x (32-byte center, u32 child count)   breadth-first
//! words x f64 idf
//! ```

use std::fs;
use std::path::Path;

use super::{VocabError, VocabularyTree};
use crate::features::BinaryDescriptor;

const MAGIC: &[u8; 8] = b"DPVOCAB\0";
const VERSION: u32 = 1;

pub fn encode(tree: &VocabularyTree) -> Vec<u8> {
    let nodes = tree.nodes();
    let mut out = Vec::with_capacity(28 + nodes.len() * 36 + tree.word_count() * 8);
    out.extend_from_slice(MAGIC);
    for v in [
        VERSION,
        tree.branching() as u32,
        tree.levels() as u32,
        tree.word_count() as u32,
        nodes.len() as u32,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for n in nodes {
        out.extend_from_slice(&n.center.to_bytes());
        out.extend_from_slice(&n.child_count.to_le_bytes());
    }
    for w in tree.words() {
        out.extend_from_slice(&w.idf.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], VocabError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or(VocabError::Corrupt("truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, VocabError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<VocabularyTree, VocabError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(VocabError::Corrupt("bad magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(VocabError::Version(version));
    }
    let k = r.u32()? as usize;
    let levels = r.u32()? as usize;
    let word_count = r.u32()? as usize;
    let node_count = r.u32()? as usize;
    if k < 2 || levels < 1 {
        return Err(VocabError::Corrupt("bad tree parameters"));
    }
    if node_count.saturating_mul(36).saturating_add(word_count.saturating_mul(8)) != bytes.len() - r.pos {
        return Err(VocabError::Corrupt("size does not match header"));
    }
    let mut records = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        let center = BinaryDescriptor::from_bytes(r.take(32)?.try_into().unwrap());
        records.push((center, r.u32()?));
    }
    let idf = (0..word_count)
        .map(|_| Ok(f64::from_le_bytes(r.take(8)?.try_into().unwrap())))
        .collect::<Result<Vec<_>, VocabError>>()?;
    VocabularyTree::from_bfs(k, levels, records, idf)
}

pub fn save(tree: &VocabularyTree, path: impl AsRef<Path>) -> Result<(), VocabError> {
    fs::write(path, encode(tree))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<VocabularyTree, VocabError> {
    decode(&fs::read(path)?)
}
