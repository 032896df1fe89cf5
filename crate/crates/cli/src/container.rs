//! On-disk index container.
//!
//! Layout: the magic `HIALCS1`, a `u32` format version, a `u32` section
//! count, then sections of `[u8; 4]` tag, `u64` length and payload, and a
//! trailing CRC-32 of everything before it. All integers little-endian.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Cursor, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

use hialcs::hia::{SampleRate, SampledEngine, SkylineEngine, TreePair};
use hialcs::lcs::{Engine, EngineChoice};
use hialcs::lz::{BoundaryTrie, Lz77Parse, LzError, LzIndex, Phrase, TrieKind};
use hialcs::tree::{NodeId, TreeError, WeightedTree};

pub const MAGIC: &[u8; 7] = b"HIALCS1";
pub const VERSION: u32 = 1;

const NONE: u64 = u64::MAX;
const NO_LITERAL: u16 = 0x100;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not an index container")]
    BadMagic,
    #[error("container version {found} is not supported (expected {VERSION})")]
    Version { found: u32 },
    #[error("checksum mismatch")]
    Checksum,
    #[error("corrupt container: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Lz(#[from] LzError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

fn corrupt<T>(why: impl Into<String>) -> Result<T, ContainerError> {
    Err(ContainerError::Corrupt(why.into()))
}

/// An index plus the engine tables that were materialized for it. The
/// baseline engine needs no table and is always available.
#[derive(Debug, Clone)]
pub struct IndexContainer {
    index: LzIndex,
    engines: Vec<Engine>,
}

impl IndexContainer {
    pub fn build(text: Vec<u8>, choices: &[EngineChoice]) -> Result<Self, LzError> {
        let mut c = IndexContainer { index: LzIndex::build(text)?, engines: Vec::new() };
        for &choice in choices {
            c.add_engine(choice);
        }
        Ok(c)
    }

    /// Materializes an engine table unless it is already stored.
    pub fn add_engine(&mut self, choice: EngineChoice) {
        if choice != EngineChoice::Baseline && !self.engines.iter().any(|e| e.choice() == choice) {
            self.engines.push(Engine::build(self.index.pair(), choice));
        }
    }

    pub fn index(&self) -> &LzIndex {
        &self.index
    }

    pub fn stored_engines(&self) -> &[Engine] {
        &self.engines
    }

    pub fn alphabet_size(&self) -> usize {
        self.index.text().iter().collect::<BTreeSet<_>>().len()
    }

    /// The stored engine of this kind, or a freshly built one. A sampled
    /// request without a rate takes whichever sampled table is stored, else
    /// rate `⌈log₂ n⌉`.
    pub fn engine(&self, kind: &str, rate: Option<SampleRate>) -> Option<Engine> {
        let pair = self.index.pair();
        let choice = match kind {
            "baseline" => EngineChoice::Baseline,
            "skyline" => EngineChoice::Skyline,
            "sampled" => {
                let stored = self.engines.iter().find(|e| {
                    matches!(e.choice(), EngineChoice::Sampled(b) if rate.is_none_or(|r| r == b))
                });
                if let Some(e) = stored {
                    return Some(e.clone());
                }
                EngineChoice::Sampled(rate.unwrap_or_else(|| SampleRate::log(pair.leaf_count())))
            }
            _ => return None,
        };
        Some(
            self.engines
                .iter()
                .find(|e| e.choice() == choice)
                .cloned()
                .unwrap_or_else(|| Engine::build(pair, choice)),
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut sections: Vec<([u8; 4], Vec<u8>)> = Vec::new();
        let mut meta = Vec::new();
        meta.write_u32::<LE>(self.alphabet_size() as u32).unwrap();
        sections.push((*b"META", meta));
        sections.push((*b"TEXT", self.index.text().to_vec()));
        sections.push((*b"PRSE", write_parse(self.index.parse())));
        sections.push((*b"TREV", write_trie(self.index.reversed_trie())));
        sections.push((*b"TSUF", write_trie(self.index.suffix_trie())));
        let mut perm = Vec::new();
        let pi = self.index.pair().grid().permutation();
        perm.write_u64::<LE>(pi.len() as u64).unwrap();
        for x in 0..pi.len() {
            perm.write_u64::<LE>(pi.get(x) as u64).unwrap();
        }
        sections.push((*b"PERM", perm));
        for e in &self.engines {
            if let Some(s) = e.as_skyline() {
                sections.push((*b"SKYL", write_skyline(s)));
            }
            if let Some(s) = e.as_sampled() {
                sections.push((*b"SMPL", write_sampled(s)));
            }
        }

        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.write_u32::<LE>(VERSION).unwrap();
        out.write_u32::<LE>(sections.len() as u32).unwrap();
        for (tag, body) in sections {
            out.extend_from_slice(&tag);
            out.write_u64::<LE>(body.len() as u64).unwrap();
            out.extend_from_slice(&body);
        }
        let crc = crc32fast::hash(&out);
        out.write_u32::<LE>(crc).unwrap();
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ContainerError> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(ContainerError::BadMagic);
        }
        let mut r = Cursor::new(&bytes[MAGIC.len()..]);
        let found = r.read_u32::<LE>()?;
        if found != VERSION {
            return Err(ContainerError::Version { found });
        }
        let (body, tail) = bytes.split_at(bytes.len().saturating_sub(4).max(MAGIC.len()));
        if tail.len() != 4 || crc32fast::hash(body) != u32::from_le_bytes(tail.try_into().unwrap()) {
            return Err(ContainerError::Checksum);
        }
        let mut r = Cursor::new(&body[MAGIC.len() + 4..]);
        let count = r.read_u32::<LE>()?;
        let mut sections = Vec::new();
        for _ in 0..count {
            let mut tag = [0u8; 4];
            r.read_exact(&mut tag)?;
            let len = r.read_u64::<LE>()? as usize;
            let at = r.position() as usize;
            let data = r.get_ref().get(at..at + len).ok_or_else(|| {
                ContainerError::Corrupt(format!("section {} overruns the file", tag_name(&tag)))
            })?;
            sections.push((tag, data));
            r.set_position((at + len) as u64);
        }
        let one = |tag: &[u8; 4]| -> Result<&[u8], ContainerError> {
            let mut it = sections.iter().filter(|s| &s.0 == tag);
            match (it.next(), it.next()) {
                (Some(s), None) => Ok(s.1),
                (None, _) => corrupt(format!("missing section {}", tag_name(tag))),
                _ => corrupt(format!("repeated section {}", tag_name(tag))),
            }
        };

        let text = one(b"TEXT")?.to_vec();
        let parse = read_parse(one(b"PRSE")?, text.len())?;
        let rev = read_trie(one(b"TREV")?, TrieKind::Reversed, &parse)?;
        let suf = read_trie(one(b"TSUF")?, TrieKind::Suffixes, &parse)?;
        let index = LzIndex::from_parts(text, parse, rev, suf)?;

        let mut r = Cursor::new(one(b"PERM")?);
        let pi = index.pair().grid().permutation();
        if r.read_u64::<LE>()? as usize != pi.len() {
            return corrupt("leaf permutation has the wrong length");
        }
        for x in 0..pi.len() {
            if r.read_u64::<LE>()? as usize != pi.get(x) {
                return corrupt("leaf permutation disagrees with the tries");
            }
        }
        let mut meta = Cursor::new(one(b"META")?);
        let sigma = meta.read_u32::<LE>()? as usize;

        let mut engines = Vec::new();
        for (tag, data) in &sections {
            match tag {
                b"SKYL" => engines.push(Engine::from_skyline(index.pair(), read_skyline(data, index.pair())?)),
                b"SMPL" => engines.push(Engine::from_sampled(index.pair(), read_sampled(data, index.pair())?)),
                b"META" | b"TEXT" | b"PRSE" | b"TREV" | b"TSUF" | b"PERM" => {}
                _ => return corrupt(format!("unknown section {}", tag_name(tag))),
            }
        }
        let c = IndexContainer { index, engines };
        if c.alphabet_size() != sigma {
            return corrupt("alphabet size does not match the text");
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<(), ContainerError> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ContainerError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

fn tag_name(tag: &[u8; 4]) -> String {
    String::from_utf8_lossy(tag).into_owned()
}

fn opt(v: Option<usize>) -> u64 {
    v.map_or(NONE, |x| x as u64)
}

fn unopt(v: u64) -> Option<usize> {
    (v != NONE).then_some(v as usize)
}

fn write_parse(p: &Lz77Parse) -> Vec<u8> {
    let mut w = Vec::new();
    w.write_u64::<LE>(p.len() as u64).unwrap();
    for ph in p.phrases() {
        w.write_u64::<LE>(ph.start as u64).unwrap();
        w.write_u64::<LE>(ph.copy_len as u64).unwrap();
        w.write_u64::<LE>(opt(ph.copy_src)).unwrap();
        w.write_u16::<LE>(ph.literal.map_or(NO_LITERAL, u16::from)).unwrap();
    }
    w
}

fn read_parse(data: &[u8], text_len: usize) -> Result<Lz77Parse, ContainerError> {
    let mut r = Cursor::new(data);
    let n = r.read_u64::<LE>()? as usize;
    if n > data.len() {
        return corrupt("phrase count too large");
    }
    let mut phrases = Vec::with_capacity(n);
    for _ in 0..n {
        let start = r.read_u64::<LE>()? as usize;
        let copy_len = r.read_u64::<LE>()? as usize;
        let copy_src = unopt(r.read_u64::<LE>()?);
        let literal = match r.read_u16::<LE>()? {
            NO_LITERAL => None,
            b if b < 0x100 => Some(b as u8),
            _ => return corrupt("bad literal"),
        };
        phrases.push(Phrase { start, copy_len, copy_src, literal });
    }
    Ok(Lz77Parse::new(phrases, text_len)?)
}

fn write_trie(t: &BoundaryTrie) -> Vec<u8> {
    let tree = t.tree();
    let mut w = Vec::new();
    w.write_u64::<LE>(tree.node_count() as u64).unwrap();
    for v in 0..tree.node_count() {
        w.write_u64::<LE>(opt(tree.parent(v))).unwrap();
        w.write_u64::<LE>(tree.weight(v)).unwrap();
        w.write_u64::<LE>(opt(tree.leaf_label(v))).unwrap();
        w.write_u64::<LE>(t.reps()[v] as u64).unwrap();
    }
    w
}

fn read_trie(data: &[u8], kind: TrieKind, parse: &Lz77Parse) -> Result<BoundaryTrie, ContainerError> {
    let mut r = Cursor::new(data);
    let n = r.read_u64::<LE>()? as usize;
    if n > data.len() {
        return corrupt("node count too large");
    }
    let (mut parent, mut weight, mut label, mut rep) = (vec![], vec![], vec![], vec![]);
    for _ in 0..n {
        parent.push(unopt(r.read_u64::<LE>()?));
        weight.push(r.read_u64::<LE>()?);
        label.push(unopt(r.read_u64::<LE>()?));
        rep.push(r.read_u64::<LE>()? as usize);
    }
    let tree = WeightedTree::from_parents(parent, weight, label)?;
    Ok(BoundaryTrie::from_parts(kind, tree, rep, parse)?)
}

fn write_skyline(e: &SkylineEngine) -> Vec<u8> {
    let mut lists: Vec<_> = e.lists().collect();
    lists.sort_by_key(|(k, _)| **k);
    let mut w = Vec::new();
    w.write_u64::<LE>(lists.len() as u64).unwrap();
    for (&(p1, p2), list) in lists {
        w.write_u32::<LE>(p1 as u32).unwrap();
        w.write_u32::<LE>(p2 as u32).unwrap();
        w.write_u32::<LE>(list.len() as u32).unwrap();
        for p in list.pairs() {
            w.write_u32::<LE>(p.a).unwrap();
            w.write_u32::<LE>(p.b).unwrap();
        }
    }
    w
}

struct Bounds {
    paths: (usize, usize),
    nodes: (usize, usize),
}

impl Bounds {
    fn of(pair: &TreePair) -> Self {
        Bounds {
            paths: (pair.d1().path_count(), pair.d2().path_count()),
            nodes: (pair.t1().node_count(), pair.t2().node_count()),
        }
    }

    fn path_pair(&self, r: &mut Cursor<&[u8]>) -> Result<(usize, usize), ContainerError> {
        let (p1, p2) = (r.read_u32::<LE>()? as usize, r.read_u32::<LE>()? as usize);
        if p1 >= self.paths.0 || p2 >= self.paths.1 {
            return corrupt("path id out of range");
        }
        Ok((p1, p2))
    }

    fn node_pair(&self, r: &mut Cursor<&[u8]>) -> Result<(NodeId, NodeId), ContainerError> {
        let (a, b) = (r.read_u32::<LE>()? as usize, r.read_u32::<LE>()? as usize);
        if a >= self.nodes.0 || b >= self.nodes.1 {
            return corrupt("node id out of range");
        }
        Ok((a, b))
    }
}

fn read_len(r: &mut Cursor<&[u8]>, unit: usize) -> Result<usize, ContainerError> {
    let n = r.read_u32::<LE>()? as usize;
    let left = r.get_ref().len() - r.position() as usize;
    if n.saturating_mul(unit) > left {
        return corrupt("list length overruns its section");
    }
    Ok(n)
}

fn read_skyline(data: &[u8], pair: &TreePair) -> Result<SkylineEngine, ContainerError> {
    let bounds = Bounds::of(pair);
    let mut r = Cursor::new(data);
    let count = r.read_u64::<LE>()?;
    let mut lists = Vec::new();
    for _ in 0..count {
        let key = bounds.path_pair(&mut r)?;
        let len = read_len(&mut r, 8)?;
        let pairs = (0..len).map(|_| bounds.node_pair(&mut r)).collect::<Result<_, _>>()?;
        lists.push((key, pairs));
    }
    Ok(SkylineEngine::from_lists(pair, lists))
}

fn write_sampled(e: &SampledEngine) -> Vec<u8> {
    let mut w = Vec::new();
    w.write_u64::<LE>(e.rate() as u64).unwrap();
    let lists = e.export();
    w.write_u64::<LE>(lists.len() as u64).unwrap();
    for ((p1, p2), samples, kept, skyline_len) in lists {
        w.write_u32::<LE>(p1 as u32).unwrap();
        w.write_u32::<LE>(p2 as u32).unwrap();
        w.write_u32::<LE>(skyline_len as u32).unwrap();
        w.write_u32::<LE>(samples.len() as u32).unwrap();
        for (a, b) in samples {
            w.write_u32::<LE>(a as u32).unwrap();
            w.write_u32::<LE>(b as u32).unwrap();
        }
        w.write_u32::<LE>(kept.len() as u32).unwrap();
        for k in kept {
            for x in k {
                w.write_u32::<LE>(x as u32).unwrap();
            }
        }
    }
    w
}

fn read_sampled(data: &[u8], pair: &TreePair) -> Result<SampledEngine, ContainerError> {
    let bounds = Bounds::of(pair);
    let mut r = Cursor::new(data);
    let rate = SampleRate::new(r.read_u64::<LE>()? as usize)
        .ok_or_else(|| ContainerError::Corrupt("sample rate 0".into()))?;
    let count = r.read_u64::<LE>()?;
    let mut lists = Vec::new();
    for _ in 0..count {
        let key = bounds.path_pair(&mut r)?;
        let skyline_len = r.read_u32::<LE>()? as usize;
        let n = read_len(&mut r, 8)?;
        let samples = (0..n).map(|_| bounds.node_pair(&mut r)).collect::<Result<Vec<_>, _>>()?;
        let n = read_len(&mut r, 16)?;
        let mut kept = Vec::with_capacity(n);
        for _ in 0..n {
            let (a, b) = bounds.node_pair(&mut r)?;
            let (rank, pos) = (r.read_u32::<LE>()? as usize, r.read_u32::<LE>()? as usize);
            if rank >= skyline_len {
                return corrupt("skyline rank out of range");
            }
            kept.push([a, b, rank, pos]);
        }
        if kept.is_empty() || samples.is_empty() {
            return corrupt("empty sampled list");
        }
        lists.push((key, samples, kept, skyline_len));
    }
    Ok(SampledEngine::import(pair, rate, lists))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hialcs::hia::HiaEngine;

    fn sample() -> IndexContainer {
        let choices = [EngineChoice::Skyline, EngineChoice::Sampled(SampleRate::new(2).unwrap())];
        IndexContainer::build(b"abracadabra abracadabra".to_vec(), &choices).unwrap()
    }

    #[test]
    fn round_trip_bytes() {
        let c = sample();
        let bytes = c.to_bytes();
        let back = IndexContainer::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.stored_engines().len(), 2);
        assert_eq!(back.alphabet_size(), 6);
    }

    #[test]
    fn damage_is_detected() {
        let bytes = sample().to_bytes();
        assert!(matches!(IndexContainer::from_bytes(b"nope"), Err(ContainerError::BadMagic)));
        let mut v = bytes.clone();
        v[7] = 9;
        assert!(matches!(IndexContainer::from_bytes(&v), Err(ContainerError::Version { found: 9 })));
        let mut v = bytes.clone();
        let mid = v.len() / 2;
        v[mid] ^= 0x55;
        assert!(matches!(IndexContainer::from_bytes(&v), Err(ContainerError::Checksum)));
        assert!(IndexContainer::from_bytes(&bytes[..bytes.len() - 9]).is_err());
    }

    #[test]
    fn engines_fall_back_to_building() {
        let c = IndexContainer::build(b"mississippi".to_vec(), &[]).unwrap();
        assert!(c.stored_engines().is_empty());
        for kind in ["baseline", "skyline", "sampled"] {
            assert_eq!(c.engine(kind, None).unwrap().name(), kind);
        }
        assert!(c.engine("other", None).is_none());
    }
}
