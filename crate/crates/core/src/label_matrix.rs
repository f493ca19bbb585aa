//! Weak-label table: one verdict per (sample, labeling function).
//!
//! Verdict `0` is an abstain; classes are `1..=K`. Classes are never renumbered.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A single verdict. `ABSTAIN` or a class in `1..=K`.
pub type Verdict = u32;

pub const ABSTAIN: Verdict = 0;

/// Dense, immutable matrix of labeling-function verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    lf_names: Vec<String>,
    num_classes: u32,
    num_samples: usize,
    /// Row-major, `num_samples * num_lfs`.
    entries: Vec<Verdict>,
}

impl LabelMatrix {
    /// Builds a matrix from rows. `num_classes = None` infers K from the data.
    pub fn new(lf_names: Vec<String>, num_classes: Option<u32>, rows: Vec<Vec<Verdict>>) -> Result<Self> {
        let num_lfs = lf_names.len();
        if num_lfs == 0 {
            return Err(Error::InvalidMatrix("at least one labeling function is required".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidMatrix("at least one sample is required".into()));
        }
        let mut entries = Vec::with_capacity(rows.len() * num_lfs);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != num_lfs {
                return Err(Error::Parse {
                    row: r + 1,
                    column: row.len().min(num_lfs) + 1,
                    message: format!("expected {num_lfs} verdicts, found {}", row.len()),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_flat(lf_names, num_classes, rows.len(), entries)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_flat(
        lf_names: Vec<String>,
        num_classes: Option<u32>,
        num_samples: usize,
        entries: Vec<Verdict>,
    ) -> Result<Self> {
        let num_lfs = lf_names.len();
        if num_lfs == 0 || num_samples == 0 {
            return Err(Error::InvalidMatrix("matrix must have at least one sample and one labeling function".into()));
        }
        if entries.len() != num_samples * num_lfs {
            return Err(Error::LengthMismatch {
                left: entries.len(),
                right: num_samples * num_lfs,
            });
        }
        let mut seen = HashSet::with_capacity(num_lfs);
        for (j, name) in lf_names.iter().enumerate() {
            if !seen.insert(name.as_str()) {
                return Err(Error::Parse {
                    row: 0,
                    column: j + 1,
                    message: format!("duplicate labeling function name {name:?}"),
                });
            }
        }
        let k = match num_classes {
            Some(k) => {
                if k < 2 {
                    return Err(Error::InvalidMatrix(format!("num_classes must be at least 2, got {k}")));
                }
                k
            }
            None => entries.iter().copied().max().unwrap_or(0).max(2),
        };
        if let Some(pos) = entries.iter().position(|&e| e > k) {
            return Err(Error::Parse {
                row: pos / num_lfs + 1,
                column: pos % num_lfs + 1,
                message: format!("entry out of range: {} exceeds num_classes {k}", entries[pos]),
            });
        }
        Ok(Self {
            lf_names,
            num_classes: k,
            num_samples,
            entries,
        })
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn num_lfs(&self) -> usize {
        self.lf_names.len()
    }

    /// K, the number of classes.
    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }

    pub fn lf_names(&self) -> &[String] {
        &self.lf_names
    }

    pub fn entries(&self) -> &[Verdict] {
        &self.entries
    }

    pub fn get(&self, sample: usize, lf: usize) -> Verdict {
        self.entries[sample * self.num_lfs() + lf]
    }

    pub fn row(&self, sample: usize) -> &[Verdict] {
        let w = self.num_lfs();
        &self.entries[sample * w..(sample + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Verdict]> {
        self.entries.chunks_exact(self.num_lfs())
    }

    pub fn column(&self, lf: usize) -> impl Iterator<Item = Verdict> + '_ {
        self.entries.iter().skip(lf).step_by(self.num_lfs()).copied()
    }

    pub fn check_sample(&self, sample: usize) -> Result<()> {
        if sample >= self.num_samples {
            return Err(Error::IndexOutOfRange {
                index: sample,
                len: self.num_samples,
            });
        }
        Ok(())
    }

    /// Fraction of samples on which labeling function `lf` does not abstain.
    pub fn coverage<T: Scalar>(&self, lf: usize) -> Result<T> {
        if lf >= self.num_lfs() {
            return Err(Error::IndexOutOfRange {
                index: lf,
                len: self.num_lfs(),
            });
        }
        let votes = self.column(lf).filter(|&v| v != ABSTAIN).count();
        Ok(T::from_count(votes) / T::from_count(self.num_samples))
    }

    /// Coverage of every labeling function, in column order.
    pub fn coverages<T: Scalar>(&self) -> Vec<T> {
        let mut counts = vec![0usize; self.num_lfs()];
        for row in self.rows() {
            for (c, &v) in counts.iter_mut().zip(row) {
                if v != ABSTAIN {
                    *c += 1;
                }
            }
        }
        let n = T::from_count(self.num_samples);
        counts.into_iter().map(|c| T::from_count(c) / n).collect()
    }

    /// Keeps only the listed columns, in the given order. K is preserved.
    pub fn restrict(&self, lfs: &[usize]) -> Result<Self> {
        if let Some(&bad) = lfs.iter().find(|&&j| j >= self.num_lfs()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.num_lfs(),
            });
        }
        let names = lfs.iter().map(|&j| self.lf_names[j].clone()).collect();
        let entries = self
            .rows()
            .flat_map(|row| lfs.iter().map(move |&j| row[j]))
            .collect();
        Self::from_flat(names, Some(self.num_classes), self.num_samples, entries)
    }

    /// Number of non-abstaining labeling functions on `sample`.
    pub fn vote_count(&self, sample: usize) -> Result<usize> {
        self.check_sample(sample)?;
        Ok(self.row(sample).iter().filter(|&&v| v != ABSTAIN).count())
    }
}

/// True labels, known only in evaluation runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    labels: Vec<Verdict>,
}

impl GroundTruth {
    pub fn new(labels: Vec<Verdict>, num_classes: u32) -> Result<Self> {
        if let Some(pos) = labels.iter().position(|&y| y == 0 || y > num_classes) {
            return Err(Error::Parse {
                row: pos + 1,
                column: 1,
                message: format!("true label {} outside 1..={num_classes}", labels[pos]),
            });
        }
        Ok(Self { labels })
    }

    /// Validates length and range against `m`.
    pub fn for_matrix(labels: Vec<Verdict>, m: &LabelMatrix) -> Result<Self> {
        if labels.len() != m.num_samples() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: m.num_samples(),
            });
        }
        Self::new(labels, m.num_classes())
    }

    pub fn labels(&self) -> &[Verdict] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses the format from a file extension; anything but `.json` is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// A matrix together with the truth column, if the source carried one.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub matrix: LabelMatrix,
    pub truth: Option<GroundTruth>,
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    lf_names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    num_classes: Option<u32>,
    entries: Vec<Vec<Verdict>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    true_labels: Option<Vec<Verdict>>,
}

/// Reads a label matrix, ignoring any truth column.
pub fn load_label_matrix<R: Read>(source: R, format: Format) -> Result<LabelMatrix> {
    Ok(load_corpus(source, format)?.matrix)
}

pub fn load_corpus<R: Read>(mut source: R, format: Format) -> Result<Corpus> {
    match format {
        Format::Json => {
            let raw: JsonMatrix = serde_json::from_reader(source)?;
            let matrix = LabelMatrix::new(raw.lf_names, raw.num_classes, raw.entries)?;
            let truth = raw
                .true_labels
                .map(|t| GroundTruth::for_matrix(t, &matrix))
                .transpose()?;
            Ok(Corpus { matrix, truth })
        }
        Format::Csv => {
            let mut text = String::new();
            source.read_to_string(&mut text)?;
            Ok(Corpus {
                matrix: parse_csv(&text)?,
                truth: None,
            })
        }
    }
}

fn parse_csv(text: &str) -> Result<LabelMatrix> {
    let mut declared = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(meta) = line.strip_prefix('#') {
            if let Some(v) = meta.trim().strip_prefix("classes=") {
                let k = v.trim().parse::<u32>().map_err(|_| Error::Parse {
                    row: i + 1,
                    column: 1,
                    message: format!("invalid classes metadata {v:?}"),
                })?;
                declared = Some(k);
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let lf_names: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if lf_names.iter().all(String::is_empty) {
        return Err(Error::Parse {
            row: 1,
            column: 1,
            message: "missing header row of labeling function names".into(),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != lf_names.len() {
            return Err(Error::Parse {
                row: line,
                column: record.len().min(lf_names.len()) + 1,
                message: format!("expected {} verdicts, found {}", lf_names.len(), record.len()),
            });
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field.parse::<Verdict>().map_err(|_| Error::Parse {
                    row: line,
                    column: c + 1,
                    message: format!("non-integer entry {field:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    LabelMatrix::new(lf_names, declared, rows)
}

/// Writes `#classes=K`, the header, then one row per sample.
pub fn write_csv<W: Write>(m: &LabelMatrix, mut out: W) -> Result<()> {
    writeln!(out, "#classes={}", m.num_classes())?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(m.lf_names())?;
    for row in m.rows() {
        writer.write_record(row.iter().map(|v| v.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(m: &LabelMatrix, truth: Option<&GroundTruth>, out: W) -> Result<()> {
    let raw = JsonMatrix {
        lf_names: m.lf_names().to_vec(),
        num_classes: Some(m.num_classes()),
        entries: m.rows().map(<[Verdict]>::to_vec).collect(),
        true_labels: truth.map(|t| t.labels().to_vec()),
    };
    serde_json::to_writer(out, &raw)?;
    Ok(())
}

/// Reads a truth file: a JSON object with `true_labels`, or one label per line
/// (an optional non-numeric header line is skipped).
pub fn load_truth<R: Read>(mut source: R, format: Format, m: &LabelMatrix) -> Result<GroundTruth> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let labels = match format {
        Format::Json => {
            #[derive(Deserialize)]
            struct TruthOnly {
                true_labels: Vec<Verdict>,
            }
            serde_json::from_str::<TruthOnly>(&text)?.true_labels
        }
        Format::Csv => {
            let mut labels = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                match line.parse::<Verdict>() {
                    Ok(v) => labels.push(v),
                    Err(_) if labels.is_empty() && !line.starts_with(|c: char| c.is_ascii_digit()) => {}
                    Err(_) => {
                        return Err(Error::Parse {
                            row: i + 1,
                            column: 1,
                            message: format!("non-integer true label {line:?}"),
                        })
                    }
                }
            }
            labels
        }
    };
    GroundTruth::for_matrix(labels, m)
}

pub fn write_truth_csv<W: Write>(truth: &GroundTruth, mut out: W) -> Result<()> {
    writeln!(out, "label")?;
    for y in truth.labels() {
        writeln!(out, "{y}")?;
    }
    Ok(())
}
