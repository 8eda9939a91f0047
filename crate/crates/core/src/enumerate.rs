//! Layer-by-length enumeration of a finite Coxeter group.
//!
//! Layer `t` is the set `Z_t` of elements of length `t`. It is produced from
//! `Z_{t−1}` by left multiplying each element by every generator that is not
//! a left descent, then sorting and deduplicating the canonical element keys.
//! Only two layers are held at once. Layers are sorted by key, so counts and
//! words do not depend on the number of worker threads.
//!
//! On disk a group occupies `<out>/<GROUP>/`, with one file `<l>.txt` per
//! length and a `manifest.json`. Each line of a layer file is the canonical
//! reduced word of one element, as 1-based generator indices separated by
//! single spaces. Lines are ordered by word, compared letter by letter.
//! `0.txt` holds a single empty line for the identity.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coxeter::{MaxW0Table, TypeLabel};
use crate::element::Engine;
use crate::error::{Error, Result};
use crate::perm::{visit_elements, Family};

/// Groups above this many elements need `allow_huge`.
pub const HUGE_ORDER: u64 = 100_000_000;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Per-length statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerStats {
    pub length: usize,
    pub elements: u64,
    pub proper: u64,
    /// `d ↦ #{w in the layer : |J(w)| = d}`.
    pub descent_histogram: BTreeMap<usize, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub group: String,
    pub rank: usize,
    pub layers: Vec<LayerStats>,
}

impl EnumerationSummary {
    /// Length of the longest element, `T`.
    pub fn top_length(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn total_elements(&self) -> u64 {
        self.layers.iter().map(|l| l.elements).sum()
    }

    pub fn total_proper(&self) -> u64 {
        self.layers.iter().map(|l| l.proper).sum()
    }

    pub fn layer_sizes(&self) -> Vec<u64> {
        self.layers.iter().map(|l| l.elements).collect()
    }
}

/// Receives each finished layer.
pub trait LayerSink {
    /// Whether words should be computed at all.
    fn wants_words(&self) -> bool;

    /// Called once per layer in increasing length. `words` holds 0-based
    /// canonical words in sorted order, or is empty if words are not wanted.
    fn layer(&mut self, stats: &LayerStats, words: &[Vec<u8>]) -> Result<()>;

    /// Called after the last layer, or with `complete = false` when the run
    /// stops early.
    fn finish(&mut self, _summary: &EnumerationSummary, _complete: bool) -> Result<()> {
        Ok(())
    }
}

/// Discards everything; the count-only pipeline.
pub struct NullSink;

impl LayerSink for NullSink {
    fn wants_words(&self) -> bool {
        false
    }

    fn layer(&mut self, _: &LayerStats, _: &[Vec<u8>]) -> Result<()> {
        Ok(())
    }
}

/// Keeps all words in memory.
#[derive(Default)]
pub struct CollectSink {
    pub layers: Vec<Vec<Vec<u8>>>,
}

impl LayerSink for CollectSink {
    fn wants_words(&self) -> bool {
        true
    }

    fn layer(&mut self, _: &LayerStats, words: &[Vec<u8>]) -> Result<()> {
        self.layers.push(words.to_vec());
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct EnumerateOptions {
    /// Worker threads; 0 means available parallelism.
    pub threads: usize,
    /// Stop with a resource error when a layer would exceed this many elements.
    pub max_layer_elements: Option<usize>,
    pub allow_huge: bool,
}

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))
}

struct Expanded {
    descents: u32,
    children: Vec<Vec<u8>>,
    word: Vec<u8>,
}

/// Runs the layered enumeration and feeds every layer to `sink`.
pub fn generate_layers(
    engine: &Engine,
    table: &MaxW0Table,
    sink: &mut dyn LayerSink,
    options: &EnumerateOptions,
) -> Result<EnumerationSummary> {
    let rank = engine.rank();
    if table.rank() != rank {
        return Err(Error::param(format!("maxw0 table has rank {} but the group has rank {rank}", table.rank())));
    }
    let group = engine.matrix().name();
    if let Some(label) = engine.matrix().label() {
        if label.group_order() > BigUint::from(HUGE_ORDER) && !options.allow_huge {
            return Err(Error::Resource(format!(
                "{group} has {} elements; pass --allow-huge to enumerate it",
                label.group_order()
            )));
        }
    }
    let pool = thread_pool(options.threads)?;
    let words = sink.wants_words();
    let mut summary = EnumerationSummary { group, rank, layers: Vec::new() };

    let mut current: Vec<Vec<u8>> = vec![engine.key(&engine.identity())];
    let mut prev_keys: Vec<Vec<u8>> = Vec::new();
    let mut prev_words: Vec<Vec<u8>> = Vec::new();
    let mut length = 0usize;
    while !current.is_empty() {
        let expanded: Vec<Expanded> = pool.install(|| {
            current
                .par_iter()
                .map(|key| {
                    let g = engine.from_key(key, length)?;
                    let mask = engine.descent_mask(&g)?;
                    let children = (0..rank)
                        .filter(|i| mask >> i & 1 == 0)
                        .map(|i| engine.key(&engine.left_multiply(i, &g)))
                        .collect();
                    let word = if words && length > 0 {
                        let first = mask.trailing_zeros() as usize;
                        let parent = engine.key(&engine.left_multiply(first, &g));
                        let idx = prev_keys
                            .binary_search(&parent)
                            .map_err(|_| Error::Internal("parent element missing from previous layer".into()))?;
                        let mut w = Vec::with_capacity(length);
                        w.push(first as u8);
                        w.extend_from_slice(&prev_words[idx]);
                        w
                    } else {
                        Vec::new()
                    };
                    Ok(Expanded { descents: mask.count_ones(), children, word })
                })
                .collect::<Result<Vec<_>>>()
        })?;

        let mut histogram = vec![0u64; rank + 1];
        let mut proper = 0u64;
        let bound = |d: usize| rank as u64 + table.get(d).unwrap_or(0);
        for e in &expanded {
            histogram[e.descents as usize] += 1;
            if length as u64 <= bound(e.descents as usize) {
                proper += 1;
            }
        }
        let stats = LayerStats {
            length,
            elements: current.len() as u64,
            proper,
            descent_histogram: histogram.iter().enumerate().filter(|(_, &c)| c > 0).map(|(d, &c)| (d, c)).collect(),
        };

        let mut children = Vec::new();
        let mut layer_words = Vec::new();
        for e in expanded {
            children.extend(e.children);
            if words {
                layer_words.push(e.word);
            }
        }
        drop(prev_keys);
        prev_keys = std::mem::take(&mut current);
        if words {
            // Words stay aligned with `prev_keys` for the parent lookup.
            let mut sorted = layer_words.clone();
            sorted.par_sort_unstable();
            sink.layer(&stats, &sorted)?;
            prev_words = layer_words;
        } else {
            sink.layer(&stats, &[])?;
        }
        summary.layers.push(stats);

        pool.install(|| children.par_sort_unstable());
        children.dedup();
        if let Some(cap) = options.max_layer_elements {
            if children.len() > cap {
                sink.finish(&summary, false)?;
                return Err(Error::Resource(format!(
                    "layer {} has {} elements, above the limit of {cap}; layers 0..={length} are complete",
                    length + 1,
                    children.len()
                )));
            }
        }
        current = children;
        length += 1;
    }
    sink.finish(&summary, true)?;
    Ok(summary)
}

/// Live proper count of a standard group without writing words.
pub fn count_proper(label: TypeLabel, threads: usize) -> Result<EnumerationSummary> {
    let engine = Engine::standard(label)?;
    let table = MaxW0Table::closed(label)?;
    generate_layers(&engine, &table, &mut NullSink, &EnumerateOptions { threads, ..Default::default() })
}

/// Writes words (0-based) to `path` in layer-file format and returns the
/// SHA-256 of the written bytes.
pub fn write_layer(path: &Path, words: &[Vec<u8>]) -> Result<String> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    let mut hasher = Sha256::new();
    let mut line = String::new();
    for w in words {
        line.clear();
        for (k, &letter) in w.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            line.push_str(&(letter as usize + 1).to_string());
        }
        line.push('\n');
        hasher.update(line.as_bytes());
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(hex::encode(hasher.finalize()))
}

/// Reads a layer file of words of length `length` over `rank` generators.
/// A missing file reads as an empty layer.
pub fn read_layer(path: &Path, rank: usize, length: usize) -> Result<Vec<Vec<u8>>> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut words = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let format = |message: String| Error::Format { path: path.to_path_buf(), line: idx + 1, message };
        let mut word = Vec::with_capacity(length);
        for token in line.split(' ').filter(|t| !(length == 0 && t.is_empty())) {
            let v: usize = token.parse().map_err(|_| format(format!("bad generator index {token:?}")))?;
            if v == 0 || v > rank {
                return Err(format(format!("generator index {v} outside 1..={rank}")));
            }
            word.push((v - 1) as u8);
        }
        if word.len() != length {
            return Err(format(format!("expected {length} letters, found {}", word.len())));
        }
        words.push(word);
    }
    Ok(words)
}

/// Per-layer record in a group manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub stats: LayerStats,
    pub file: String,
    pub sha256: String,
}

/// `manifest.json` of an enumerated group directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupManifest {
    pub group: String,
    pub rank: usize,
    pub complete: bool,
    pub top_length: Option<usize>,
    pub total_elements: u64,
    pub total_proper: u64,
    pub library_version: String,
    pub layers: Vec<LayerRecord>,
}

impl GroupManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::Integrity(format!("{} is missing", path.display())))
            }
            Err(e) => return Err(e.into()),
        };
        serde_json::from_str(&text).map_err(|e| Error::Format { path, line: e.line(), message: e.to_string() })
    }
}

/// Writes layer files and the manifest under `<root>/<GROUP>/`.
pub struct DirectorySink {
    dir: PathBuf,
    records: Vec<LayerRecord>,
}

impl DirectorySink {
    /// Prepares the group directory. An existing enumeration there is only
    /// replaced when `overwrite` is set, and then only its layer files and
    /// manifest are removed.
    pub fn new(root: &Path, group: &str, overwrite: bool) -> Result<Self> {
        let dir = root.join(group);
        if dir.join(MANIFEST_FILE).exists() {
            if !overwrite {
                return Err(Error::param(format!("{} already holds an enumeration; use --force to replace it", dir.display())));
            }
            for entry in fs::read_dir(&dir)? {
                let path = entry?.path();
                if is_layer_file(&path) || path.file_name().is_some_and(|n| n == MANIFEST_FILE) {
                    fs::remove_file(&path)?;
                }
            }
        }
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, records: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

fn is_layer_file(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "txt")
        && path.file_stem().and_then(|s| s.to_str()).is_some_and(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
}

impl LayerSink for DirectorySink {
    fn wants_words(&self) -> bool {
        true
    }

    fn layer(&mut self, stats: &LayerStats, words: &[Vec<u8>]) -> Result<()> {
        let file = format!("{}.txt", stats.length);
        let sha256 = write_layer(&self.dir.join(&file), words)?;
        self.records.push(LayerRecord { stats: stats.clone(), file, sha256 });
        Ok(())
    }

    fn finish(&mut self, summary: &EnumerationSummary, complete: bool) -> Result<()> {
        let manifest = GroupManifest {
            group: summary.group.clone(),
            rank: summary.rank,
            complete,
            top_length: complete.then(|| summary.top_length()),
            total_elements: summary.total_elements(),
            total_proper: summary.total_proper(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            layers: self.records.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Internal(e.to_string()))?;
        fs::write(self.dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    let mut file = fs::File::open(path)?;
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = std::io::Read::read(&mut file, &mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Recounts proper elements from a written group directory.
///
/// Every layer file up to `T` must exist and match its manifest checksum and
/// count. Each word is replayed through the engine, which rejects words that
/// are not reduced, and properness is decided from the replayed element.
pub fn count_proper_dir(dir: &Path, threads: usize) -> Result<EnumerationSummary> {
    let manifest = GroupManifest::read(dir)?;
    if !manifest.complete {
        return Err(Error::Integrity(format!("{} holds a partial enumeration", dir.display())));
    }
    let label: TypeLabel = manifest.group.parse().map_err(|_| {
        Error::Integrity(format!("manifest group {:?} is not a standard type", manifest.group))
    })?;
    let engine = Engine::standard(label)?;
    let table = MaxW0Table::closed(label)?;
    let rank = engine.rank();
    if manifest.rank != rank {
        return Err(Error::Integrity(format!("manifest rank {} does not match {label}", manifest.rank)));
    }
    let top = manifest.top_length.unwrap_or(0);
    if manifest.layers.len() != top + 1 {
        return Err(Error::Integrity(format!("manifest lists {} layers for T = {top}", manifest.layers.len())));
    }
    let pool = thread_pool(threads)?;
    let mut summary = EnumerationSummary { group: manifest.group.clone(), rank, layers: Vec::new() };
    for (length, record) in manifest.layers.iter().enumerate() {
        let path = dir.join(format!("{length}.txt"));
        if record.file != format!("{length}.txt") || !path.exists() {
            return Err(Error::Integrity(format!("layer file {} is missing", path.display())));
        }
        if sha256_file(&path)? != record.sha256 {
            return Err(Error::Integrity(format!("checksum mismatch for {}", path.display())));
        }
        let words = read_layer(&path, rank, length)?;
        if words.len() as u64 != record.stats.elements {
            return Err(Error::Integrity(format!(
                "{} has {} lines, manifest says {}",
                path.display(),
                words.len(),
                record.stats.elements
            )));
        }
        let descents: Vec<u32> = pool.install(|| {
            words
                .par_iter()
                .map(|w| {
                    let letters: Vec<usize> = w.iter().map(|&l| l as usize).collect();
                    let g = engine.from_word(&letters)?;
                    if g.length() != length {
                        return Err(Error::Integrity(format!("{}: a word is not reduced", path.display())));
                    }
                    Ok(engine.descent_mask(&g)?.count_ones())
                })
                .collect::<Result<_>>()
        })?;
        let mut histogram = BTreeMap::new();
        let mut proper = 0;
        for d in descents {
            *histogram.entry(d as usize).or_insert(0u64) += 1;
            if length as u64 <= rank as u64 + table.get(d as usize).unwrap_or(0) {
                proper += 1;
            }
        }
        summary.layers.push(LayerStats { length, elements: words.len() as u64, proper, descent_histogram: histogram });
    }
    if dir.join(format!("{}.txt", top + 1)).exists() {
        return Err(Error::Integrity(format!("layer file beyond T = {top} present in {}", dir.display())));
    }
    Ok(summary)
}

/// Packs `<root>/<GROUP>/` into `<root>/<GROUP>.tar.gz`. Archive members are
/// the group directory's files, byte for byte.
pub fn compress_group(root: &Path, group: &str) -> Result<PathBuf> {
    let archive_path = root.join(format!("{group}.tar.gz"));
    let file = fs::File::create(&archive_path)?;
    let encoder = flate2::write::GzEncoder::new(file, flate2::Compression::default());
    let mut builder = tar::Builder::new(encoder);
    let mut entries: Vec<PathBuf> = fs::read_dir(root.join(group))?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    entries.sort();
    for path in entries {
        let name = Path::new(group).join(path.file_name().unwrap());
        builder.append_path_with_name(&path, name)?;
    }
    builder.into_inner()?.finish()?;
    Ok(archive_path)
}

/// Size estimates for a full enumeration with words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Preflight {
    pub group: String,
    pub elements: u64,
    pub top_length: usize,
    pub widest_layer: u64,
    pub disk_bytes: u64,
    pub memory_bytes: u64,
    pub free_disk_bytes: Option<u64>,
    pub available_memory_bytes: Option<u64>,
}

impl Preflight {
    pub fn fits(&self) -> bool {
        self.free_disk_bytes.is_none_or(|f| f >= self.disk_bytes)
            && self.available_memory_bytes.is_none_or(|m| m >= self.memory_bytes)
    }
}

/// Estimates disk and memory needs from the Poincaré polynomial and checks
/// them against the file system holding `out` and available memory.
pub fn preflight(label: TypeLabel, out: Option<&Path>) -> Result<Preflight> {
    let sizes = label.poincare_coefficients();
    let rank = label.rank() as u64;
    let digits = if rank >= 10 { 3 } else { 2 };
    let mut disk = 0u64;
    let mut widest = 0u64;
    let mut memory = 0u64;
    for (l, c) in sizes.iter().enumerate() {
        let c = c.to_u64().ok_or_else(|| Error::Resource("layer size beyond 64 bits".into()))?;
        disk += c * (digits * l as u64).max(1);
        widest = widest.max(c);
        // Two layers of keys plus words, and the unsorted child list.
        let key = (rank * rank * 2) + 24;
        let word = l as u64 + 24;
        memory = memory.max(c * (key + word) * 2 + c * rank * key);
    }
    let free_disk_bytes = match out {
        Some(dir) => free_space(dir),
        None => None,
    };
    Ok(Preflight {
        group: label.to_string(),
        elements: sizes.iter().map(|c| c.to_u64().unwrap_or(u64::MAX)).sum(),
        top_length: sizes.len() - 1,
        widest_layer: widest,
        disk_bytes: disk,
        memory_bytes: memory,
        free_disk_bytes,
        available_memory_bytes: available_memory(),
    })
}

fn free_space(path: &Path) -> Option<u64> {
    use std::ffi::CString;
    use std::os::unix::ffi::OsStrExt;
    let mut probe = path.to_path_buf();
    while !probe.exists() {
        probe = probe.parent()?.to_path_buf();
        if probe.as_os_str().is_empty() {
            probe = PathBuf::from(".");
        }
    }
    let c = CString::new(probe.as_os_str().as_bytes()).ok()?;
    let mut stat: libc::statvfs = unsafe { std::mem::zeroed() };
    // SAFETY: `c` is a valid NUL-terminated path and `stat` is writable.
    let rc = unsafe { libc::statvfs(c.as_ptr(), &mut stat) };
    (rc == 0).then(|| stat.f_bavail as u64 * stat.f_frsize as u64)
}

fn available_memory() -> Option<u64> {
    // SAFETY: sysconf has no preconditions.
    let (pages, size) = unsafe { (libc::sysconf(libc::_SC_AVPHYS_PAGES), libc::sysconf(libc::_SC_PAGESIZE)) };
    (pages > 0 && size > 0).then(|| pages as u64 * size as u64)
}

/// Multisets of `(ℓ(w), |J(w)|)` from the engine and from the matching
/// permutation model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub label: TypeLabel,
    pub engine: BTreeMap<(u64, u64), u64>,
    pub model: BTreeMap<(u64, u64), u64>,
}

impl CrossCheck {
    pub fn passed(&self) -> bool {
        self.engine == self.model
    }

    pub fn elements(&self) -> u64 {
        self.engine.values().sum()
    }
}

/// The permutation model of a type `A`, `B` or `D` label, as `(family, n)`.
pub fn model_of(label: TypeLabel) -> Option<(Family, usize)> {
    match label {
        TypeLabel::A(k) => Some((Family::A, k + 1)),
        TypeLabel::B(k) => Some((Family::B, k)),
        TypeLabel::D(k) => Some((Family::D, k)),
        _ => None,
    }
}

/// Compares engine enumeration against exhaustive iteration of the model.
pub fn cross_check_model(label: TypeLabel, threads: usize) -> Result<CrossCheck> {
    let (family, n) =
        model_of(label).ok_or_else(|| Error::param(format!("{label} has no permutation model")))?;
    let summary = count_proper(label, threads)?;
    let mut engine = BTreeMap::new();
    for layer in &summary.layers {
        for (&d, &c) in &layer.descent_histogram {
            engine.insert((layer.length as u64, d as u64), c);
        }
    }
    let mut model = BTreeMap::new();
    let mut failure = None;
    visit_elements(family, n, |w| match w.length_and_descents(family) {
        Ok(key) => *model.entry(key).or_insert(0u64) += 1,
        Err(e) => failure = Some(e),
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(CrossCheck { label, engine, model })
}
