//! Single-file model bundle:
//!
//! ```text
//! b"SNLU" | version: u32 LE | header_len: u64 LE | header JSON
//! | blocks: u32 LE | per block: count: u64 LE, count × f64 LE
//! | crc32 of everything above: u32 LE
//! ```
//!
//! The blocks hold the category model's parameters followed by the
//! subcategory model's, in the order listed in the header.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::engine::{BundleMeta, Engine};
use super::stages::Tagger;
use super::Ablation;
use crate::classifier::{ModelConfig, TrainedModel};
use crate::error::{Error, Result};
use crate::gazetteer::{CategoryGroups, Gazetteer, GroupSpec, Tiers};
use crate::rules::{RuleRecord, RuleSet};
use crate::tensor::Tensor;
use crate::text::{Taxonomy, Vocab};

pub const MAGIC: &[u8; 4] = b"SNLU";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamHeader {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelHeader {
    config: ModelConfig,
    vocab: Vocab,
    params: Vec<ParamHeader>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    meta: BundleMeta,
    taxonomy: Taxonomy,
    gazetteer: String,
    gazetteer_sha256: String,
    rules: Vec<RuleRecord>,
    groups: Vec<GroupSpec>,
    tiers: Tiers,
    ablation: Ablation,
    category_model: ModelHeader,
    subcategory_model: ModelHeader,
}

fn model_header(m: &TrainedModel) -> ModelHeader {
    ModelHeader {
        config: m.config,
        vocab: m.vocab.clone(),
        params: m
            .params()
            .names()
            .iter()
            .zip(m.params().values())
            .map(|(name, t)| ParamHeader {
                name: name.clone(),
                shape: t.shape().to_vec(),
            })
            .collect(),
    }
}

/// Serialises an engine to bytes.
pub fn to_bytes(engine: &Engine) -> Result<Vec<u8>> {
    let tax = &engine.taxonomy;
    let header = Header {
        meta: engine.meta.clone(),
        taxonomy: (**tax).clone(),
        gazetteer: engine.tagger.gazetteer.to_tsv(),
        gazetteer_sha256: engine.tagger.gazetteer.digest(),
        rules: engine.rules.to_records(tax),
        groups: engine.tagger.groups.to_specs(tax),
        tiers: engine.tagger.tiers,
        ablation: engine.tagger.ablation,
        category_model: model_header(&engine.category_model),
        subcategory_model: model_header(&engine.subcategory_model),
    };
    let json = serde_json::to_vec(&header)?;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    let blocks: Vec<&Tensor> = engine
        .category_model
        .params()
        .values()
        .iter()
        .chain(engine.subcategory_model.params().values())
        .collect();
    out.extend_from_slice(&(blocks.len() as u32).to_le_bytes());
    for t in blocks {
        out.extend_from_slice(&(t.len() as u64).to_le_bytes());
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::CorruptFile("unexpected end of bundle".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn len(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::CorruptFile("length does not fit in memory".into()))
    }
}

fn rebuild_model(h: ModelHeader, blocks: &mut impl Iterator<Item = Tensor>) -> Result<TrainedModel> {
    let names: Vec<String> = h.params.iter().map(|p| p.name.clone()).collect();
    let mut tensors = Vec::with_capacity(h.params.len());
    for p in &h.params {
        let block = blocks
            .next()
            .ok_or_else(|| Error::CorruptFile("fewer parameter blocks than listed".into()))?;
        tensors.push(
            Tensor::from_vec(&p.shape, block.into_data())
                .map_err(|_| Error::CorruptFile(format!("block for {} has the wrong size", p.name)))?,
        );
    }
    TrainedModel::from_parts(h.config, h.vocab, &names, tensors)
}

pub fn from_bytes(bytes: &[u8]) -> Result<Engine> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(Error::CorruptFile("not a bundle (bad magic bytes)".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    if bytes.len() < 12 {
        return Err(Error::CorruptFile("bundle is truncated".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
    if crc32fast::hash(body) != stored {
        return Err(Error::CorruptFile("checksum mismatch".into()));
    }
    let mut r = Reader { bytes: body, pos: 8 };
    let header_len = r.len()?;
    let header: Header = serde_json::from_slice(r.take(header_len)?)
        .map_err(|e| Error::CorruptFile(format!("bad header: {e}")))?;
    let count = r.u32()? as usize;
    let mut blocks = Vec::with_capacity(count);
    for _ in 0..count {
        let n = r.len()?;
        let raw = r.take(n.checked_mul(8).ok_or_else(|| Error::CorruptFile("block too large".into()))?)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        blocks.push(Tensor::from_vec(&[n], data)?);
    }
    if r.pos != body.len() {
        return Err(Error::CorruptFile("trailing bytes after parameter blocks".into()));
    }

    let taxonomy = Arc::new(header.taxonomy);
    let gazetteer = Gazetteer::parse_tsv(&header.gazetteer, taxonomy.entity_types())?;
    if gazetteer.digest() != header.gazetteer_sha256 {
        return Err(Error::CorruptFile("gazetteer digest mismatch".into()));
    }
    let rules = RuleSet::from_records(&header.rules, &taxonomy)?;
    let groups = CategoryGroups::from_specs(&header.groups, &taxonomy)?;
    let mut blocks = blocks.into_iter();
    let category_model = rebuild_model(header.category_model, &mut blocks)?;
    let subcategory_model = rebuild_model(header.subcategory_model, &mut blocks)?;
    if blocks.next().is_some() {
        return Err(Error::CorruptFile("more parameter blocks than listed".into()));
    }
    Ok(Engine::new(
        taxonomy,
        Tagger::new(gazetteer, groups, header.tiers, header.ablation),
        rules,
        category_model,
        subcategory_model,
        header.meta,
    ))
}

pub fn save_bundle(engine: &Engine, path: &Path) -> Result<()> {
    std::fs::write(path, to_bytes(engine)?).map_err(|e| Error::io(path, e))
}

pub fn load_bundle(path: &Path) -> Result<Engine> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
