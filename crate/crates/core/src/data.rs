//! Signature records, datasets, writer splits and the feature CSV format.
//!
//! A feature file is UTF-8 CSV with LF line endings:
//!
//! ```text
//! writer_id,label,sample_index,f0,f1,...,f{D-1}
//! 1,G,0,0.25,-1.5,...
//! 1,S,0,0.31,-1.2,...
//! ```
//!
//! `label` is `G` (genuine) or `S` (skilled forgery). Files whose name ends
//! in `.gz` are read and written gzip-compressed. Values are written with the
//! shortest decimal representation that round-trips to the same `f64`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, tag};

/// Opaque external writer identifier (ids need not be contiguous).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WriterId(pub u32);

impl fmt::Display for WriterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Stored authenticity label. Random forgeries are a pairing role (a genuine
/// signature of another writer) and are never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Genuine,
    SkilledForgery,
}

impl Label {
    pub fn code(self) -> char {
        match self {
            Label::Genuine => 'G',
            Label::SkilledForgery => 'S',
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        match s {
            "G" => Some(Label::Genuine),
            "S" => Some(Label::SkilledForgery),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Genuine => f.write_str("genuine"),
            Label::SkilledForgery => f.write_str("skilled-forgery"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureRecord {
    pub writer: WriterId,
    pub label: Label,
    pub sample_index: u32,
    pub features: Vec<f64>,
}

/// An immutable collection of signature records sharing one feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<SignatureRecord>,
    dim: usize,
    writer_ids: Vec<WriterId>,
    // (writer, label) -> record indices, in file order
    index: BTreeMap<(WriterId, Label), Vec<usize>>,
}

impl Dataset {
    pub fn new(records: Vec<SignatureRecord>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Schema("feature dimension must be at least 1".into()));
        }
        let mut index: BTreeMap<(WriterId, Label), Vec<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if r.features.len() != dim {
                return Err(Error::Dimension { expected: dim, actual: r.features.len() });
            }
            if r.writer.0 == 0 {
                return Err(Error::Data(format!("record {i}: writer ids start at 1")));
            }
            if let Some(j) = r.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!("record {i}: feature f{j} is not finite")));
            }
            index.entry((r.writer, r.label)).or_default().push(i);
        }
        let writer_ids: BTreeSet<WriterId> = records.iter().map(|r| r.writer).collect();
        Ok(Dataset { records, dim, writer_ids: writer_ids.into_iter().collect(), index })
    }

    pub fn records(&self) -> &[SignatureRecord] {
        &self.records
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct writer ids, ascending.
    pub fn writer_ids(&self) -> &[WriterId] {
        &self.writer_ids
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records of one writer with the given label, in file order.
    pub fn samples_of(&self, writer: WriterId, label: Label) -> impl Iterator<Item = &SignatureRecord> {
        self.index.get(&(writer, label)).map(Vec::as_slice).unwrap_or(&[]).iter().map(move |&i| &self.records[i])
    }

    pub fn count_of(&self, writer: WriterId, label: Label) -> usize {
        self.index.get(&(writer, label)).map_or(0, Vec::len)
    }
}

/// Loads a feature CSV. When `expected_dim` is given the header must declare
/// exactly that many feature columns.
pub fn load_feature_file(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader: Box<dyn Read> =
        if is_gzip(path) { Box::new(flate2::read::GzDecoder::new(file)) } else { Box::new(file) };
    parse_feature_csv(BufReader::new(reader), path, expected_dim)
}

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

pub(crate) fn parse_feature_csv(reader: impl BufRead, path: &Path, expected_dim: Option<usize>) -> Result<Dataset> {
    let parse_err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| Error::io(path, e))?,
        None => return Err(parse_err(1, "empty file, header expected".into())),
    };
    let columns: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    if columns.len() < 4 || columns[..3] != ["writer_id", "label", "sample_index"] {
        return Err(parse_err(
            1,
            "header must start with writer_id,label,sample_index followed by feature columns".into(),
        ));
    }
    let dim = columns.len() - 3;
    for (j, name) in columns[3..].iter().enumerate() {
        if *name != format!("f{j}") {
            return Err(parse_err(1, format!("feature column {j} is named {name:?}, expected \"f{j}\"")));
        }
    }
    if let Some(expected) = expected_dim {
        if expected != dim {
            return Err(Error::Schema(format!(
                "{}: header declares {dim} features, expected {expected}",
                path.display()
            )));
        }
    }

    let mut records = Vec::new();
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 3 {
            return Err(parse_err(lineno, format!("expected {} columns, found {}", dim + 3, fields.len())));
        }
        let writer: u32 =
            fields[0].parse().map_err(|_| parse_err(lineno, format!("invalid writer_id {:?}", fields[0])))?;
        if writer == 0 {
            return Err(parse_err(lineno, "writer_id must be at least 1".into()));
        }
        let label = Label::from_code(fields[1])
            .ok_or_else(|| parse_err(lineno, format!("invalid label {:?}, expected G or S", fields[1])))?;
        let sample_index: u32 =
            fields[2].parse().map_err(|_| parse_err(lineno, format!("invalid sample_index {:?}", fields[2])))?;
        let mut features = Vec::with_capacity(dim);
        for (j, raw) in fields[3..].iter().enumerate() {
            let v: f64 = raw.parse().map_err(|_| parse_err(lineno, format!("f{j}: invalid number {raw:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(lineno, format!("f{j}: non-finite value {raw:?}")));
            }
            features.push(v);
        }
        records.push(SignatureRecord { writer: WriterId(writer), label, sample_index, features });
    }
    Dataset::new(records, dim)
}

/// Writes a dataset in the feature CSV format (gzip when the name ends in `.gz`).
pub fn write_feature_file(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let result = if is_gzip(path) {
        let mut gz = flate2::write::GzEncoder::new(BufWriter::new(file), flate2::Compression::default());
        write_feature_csv(dataset, &mut gz).and_then(|_| gz.finish().map(drop))
    } else {
        let mut w = BufWriter::new(file);
        write_feature_csv(dataset, &mut w).and_then(|_| w.flush())
    };
    result.map_err(|e| Error::io(path, e))
}

pub(crate) fn write_feature_csv(dataset: &Dataset, w: &mut impl Write) -> std::io::Result<()> {
    write!(w, "writer_id,label,sample_index")?;
    for j in 0..dataset.dim() {
        write!(w, ",f{j}")?;
    }
    writeln!(w)?;
    for r in dataset.records() {
        write!(w, "{},{},{}", r.writer, r.label.code(), r.sample_index)?;
        for v in &r.features {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Number of development writers assigned to each role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub validation: usize,
    pub opt: usize,
    pub sel: usize,
}

impl SplitCounts {
    pub fn total(&self) -> usize {
        self.train + self.validation + self.opt + self.sel
    }
}

/// Disjoint writer roles. The validation set is reserved but not consumed by
/// the selection pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WriterSplit {
    pub train: BTreeSet<WriterId>,
    pub validation: BTreeSet<WriterId>,
    pub opt: BTreeSet<WriterId>,
    pub sel: BTreeSet<WriterId>,
    pub exploitation: BTreeSet<WriterId>,
}

impl WriterSplit {
    pub fn development(&self) -> BTreeSet<WriterId> {
        self.train.iter().chain(&self.validation).chain(&self.opt).chain(&self.sel).copied().collect()
    }

    pub fn is_disjoint(&self) -> bool {
        let sets = [&self.train, &self.validation, &self.opt, &self.sel, &self.exploitation];
        let total: usize = sets.iter().map(|s| s.len()).sum();
        let union: BTreeSet<_> = sets.iter().flat_map(|s| s.iter()).collect();
        union.len() == total
    }
}

/// Randomly partitions the development writers (all writers not in
/// `exploitation`) into train/validation/Opt/Sel sets of the requested sizes.
pub fn split_writers(
    dataset: &Dataset,
    exploitation: &BTreeSet<WriterId>,
    counts: SplitCounts,
    seed: u64,
) -> Result<WriterSplit> {
    if let Some(w) = exploitation.iter().find(|w| dataset.writer_ids().binary_search(w).is_err()) {
        return Err(Error::Config(format!("exploitation writer {w} is not in the dataset")));
    }
    let mut dev: Vec<WriterId> = dataset.writer_ids().iter().filter(|w| !exploitation.contains(w)).copied().collect();
    if counts.total() > dev.len() {
        return Err(Error::Config(format!(
            "split requests {} development writers but only {} are available",
            counts.total(),
            dev.len()
        )));
    }
    dev.shuffle(&mut rng::stream(seed, &[tag::SPLIT]));
    let mut rest = dev.into_iter();
    let mut take = |n: usize| rest.by_ref().take(n).collect::<BTreeSet<_>>();
    Ok(WriterSplit {
        train: take(counts.train),
        validation: take(counts.validation),
        opt: take(counts.opt),
        sel: take(counts.sel),
        exploitation: exploitation.clone(),
    })
}

/// Draws `k` distinct records of `writer` with `label`, deterministically in `seed`.
pub fn select_samples(
    dataset: &Dataset,
    writer: WriterId,
    label: Label,
    k: usize,
    seed: u64,
) -> Result<Vec<&SignatureRecord>> {
    let mut pool: Vec<&SignatureRecord> = dataset.samples_of(writer, label).collect();
    if pool.len() < k {
        return Err(Error::InsufficientSamples { writer, label, needed: k, available: pool.len() });
    }
    let mut rng = rng::stream(seed, &[tag::SAMPLES, u64::from(writer.0), label as u64]);
    let (chosen, _) = pool.partial_shuffle(&mut rng, k);
    Ok(chosen.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(writers: &[u32], per_writer: u32, dim: usize) -> Dataset {
        let mut records = Vec::new();
        for &w in writers {
            for s in 0..per_writer {
                records.push(SignatureRecord {
                    writer: WriterId(w),
                    label: Label::Genuine,
                    sample_index: s,
                    features: (0..dim).map(|j| f64::from(w) + f64::from(s) * 0.1 + j as f64).collect(),
                });
            }
        }
        Dataset::new(records, dim).unwrap()
    }

    fn parse(text: &str, expected: Option<usize>) -> Result<Dataset> {
        parse_feature_csv(text.as_bytes(), Path::new("mem.csv"), expected)
    }

    #[test]
    fn parses_small_file() {
        let text = "writer_id,label,sample_index,f0,f1,f2\n\
                    1,G,0,0.5,1,2\n1,S,0,1,1,1\n7,G,0,3,2,1\n7,G,1,-1e-3,0,4\n";
        let ds = parse(text, None).unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.dim(), 3);
        assert_eq!(ds.writer_ids(), &[WriterId(1), WriterId(7)]);
        assert_eq!(ds.count_of(WriterId(7), Label::Genuine), 2);
        assert_eq!(ds.records()[3].features, vec![-1e-3, 0.0, 4.0]);
    }

    #[test]
    fn nan_is_rejected_with_line() {
        let text = "writer_id,label,sample_index,f0,f1\n1,G,0,1,2\n1,G,1,NaN,2\n";
        match parse(text, None) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("non-finite"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_column_count_is_rejected() {
        let text = "writer_id,label,sample_index,f0,f1\n1,G,0,1\n";
        assert!(matches!(parse(text, None), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn bad_label_is_rejected() {
        let text = "writer_id,label,sample_index,f0\n1,R,0,1\n";
        assert!(matches!(parse(text, None), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn dim_mismatch_is_schema_error() {
        let text = "writer_id,label,sample_index,f0,f1\n1,G,0,1,2\n";
        assert!(matches!(parse(text, Some(3)), Err(Error::Schema(_))));
        assert_eq!(parse(text, Some(2)).unwrap().dim(), 2);
    }

    #[test]
    fn full_width_signet_rows() {
        let dim = 2048;
        let mut text = String::from("writer_id,label,sample_index");
        for j in 0..dim {
            text.push_str(&format!(",f{j}"));
        }
        text.push('\n');
        for s in 0..2 {
            text.push_str(&format!("3,G,{s}"));
            for j in 0..dim {
                text.push_str(&format!(",{}", j as f64 * 0.001));
            }
            text.push('\n');
        }
        let ds = parse(&text, Some(2048)).unwrap();
        assert_eq!(ds.dim(), 2048);
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn split_full_scale_sizes() {
        let ds = toy(&(1..=581).collect::<Vec<_>>(), 1, 1);
        let counts = SplitCounts { train: 146, validation: 145, opt: 145, sel: 145 };
        let split = split_writers(&ds, &BTreeSet::new(), counts, 11).unwrap();
        assert_eq!(split.train.len(), 146);
        assert_eq!(split.validation.len(), 145);
        assert_eq!(split.opt.len(), 145);
        assert_eq!(split.sel.len(), 145);
        assert!(split.is_disjoint());
        assert_eq!(split.development().len(), 581);
    }

    #[test]
    fn split_one_each() {
        let ds = toy(&[4, 9, 10, 22], 1, 1);
        let counts = SplitCounts { train: 1, validation: 1, opt: 1, sel: 1 };
        let split = split_writers(&ds, &BTreeSet::new(), counts, 0).unwrap();
        assert!(split.is_disjoint());
        let dev: Vec<_> = split.development().into_iter().collect();
        assert_eq!(dev, ds.writer_ids());
    }

    #[test]
    fn split_is_deterministic_and_respects_exploitation() {
        let ds = toy(&(1..=30).collect::<Vec<_>>(), 1, 1);
        let expl: BTreeSet<_> = (1..=5).map(WriterId).collect();
        let counts = SplitCounts { train: 10, validation: 5, opt: 5, sel: 5 };
        let a = split_writers(&ds, &expl, counts, 3).unwrap();
        let b = split_writers(&ds, &expl, counts, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.is_disjoint());
        assert!(a.development().is_disjoint(&expl));
        let c = split_writers(&ds, &expl, counts, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn split_too_large_is_config_error() {
        let ds = toy(&[1, 2, 3], 1, 1);
        let counts = SplitCounts { train: 2, validation: 1, opt: 1, sel: 0 };
        assert!(matches!(split_writers(&ds, &BTreeSet::new(), counts, 0), Err(Error::Config(_))));
    }

    #[test]
    fn select_twelve_of_twenty_four() {
        let ds = toy(&[5], 24, 2);
        let chosen = select_samples(&ds, WriterId(5), Label::Genuine, 12, 9).unwrap();
        assert_eq!(chosen.len(), 12);
        let distinct: BTreeSet<u32> = chosen.iter().map(|r| r.sample_index).collect();
        assert_eq!(distinct.len(), 12);
        let again = select_samples(&ds, WriterId(5), Label::Genuine, 12, 9).unwrap();
        assert_eq!(chosen, again);
    }

    #[test]
    fn select_zero_and_insufficient() {
        let ds = toy(&[5], 5, 2);
        assert!(select_samples(&ds, WriterId(5), Label::Genuine, 0, 1).unwrap().is_empty());
        match select_samples(&ds, WriterId(5), Label::Genuine, 10, 1) {
            Err(Error::InsufficientSamples { writer, label, needed, available }) => {
                assert_eq!((writer, label, needed, available), (WriterId(5), Label::Genuine, 10, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
