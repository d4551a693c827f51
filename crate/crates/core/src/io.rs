//! File formats and dataset ingestion.
//!
//! Matrix files are plain text: a `rows cols` header line, then one line per
//! row of whitespace-separated values serialized at full precision (the
//! shortest decimal that round-trips), so write→read is bitwise exact. A
//! headerless comma-separated variant is available behind a format flag.
//!
//! Observation files carry a `rows cols n` header followed by `row col value`
//! triples with 0-based indices.
//!
//! Rating datasets come in two shapes: tab-separated
//! `user item rating timestamp` lines with 1-based ids (MovieLens layout),
//! and dense space-separated integer matrices with 0 marking unobserved
//! cells (Coat layout). Parsers fail loudly on malformed content — nothing
//! is dropped silently — and report accepted/skipped line counts.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::observations::ObservationSet;

/// On-disk layout for matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    /// `rows cols` header, whitespace-separated values.
    Text,
    /// Headerless comma-separated rows.
    Csv,
}

impl std::str::FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "txt" | "text" => Ok(MatrixFormat::Text),
            "csv" => Ok(MatrixFormat::Csv),
            other => Err(Error::InvalidInput(format!(
                "unknown matrix format '{other}' (expected txt or csv)"
            ))),
        }
    }
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path_str(path),
        line,
        message: message.into(),
    }
}

/// Writes a matrix in the requested format.
pub fn write_matrix(path: &Path, m: &DenseMatrix, format: MatrixFormat) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        MatrixFormat::Text => {
            writeln!(w, "{} {}", m.rows(), m.cols())?;
            for i in 0..m.rows() {
                let row: Vec<String> =
                    (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
                writeln!(w, "{}", row.join(" "))?;
            }
        }
        MatrixFormat::Csv => {
            for i in 0..m.rows() {
                let row: Vec<String> =
                    (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
                writeln!(w, "{}", row.join(","))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix in the requested format.
pub fn read_matrix(path: &Path, format: MatrixFormat) -> Result<DenseMatrix> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        MatrixFormat::Text => read_matrix_text(path, reader),
        MatrixFormat::Csv => read_matrix_csv(path, reader),
    }
}

fn read_matrix_text(path: &Path, reader: impl BufRead) -> Result<DenseMatrix> {
    let mut lines = reader.lines().enumerate();
    let (rows, cols) = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let mut it = line.split_whitespace();
                let rows: usize = it
                    .next()
                    .ok_or_else(|| parse_err(path, idx + 1, "missing row count"))?
                    .parse()
                    .map_err(|e| parse_err(path, idx + 1, format!("bad row count: {e}")))?;
                let cols: usize = it
                    .next()
                    .ok_or_else(|| parse_err(path, idx + 1, "missing column count"))?
                    .parse()
                    .map_err(|e| parse_err(path, idx + 1, format!("bad column count: {e}")))?;
                if it.next().is_some() {
                    return Err(parse_err(path, idx + 1, "header has trailing tokens"));
                }
                break (rows, cols);
            }
            None => return Err(parse_err(path, 1, "empty matrix file")),
        }
    };
    let mut entries = Vec::with_capacity(rows * cols);
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|e| parse_err(path, idx + 1, format!("bad value '{tok}': {e}")))?;
            entries.push(v);
        }
    }
    if entries.len() != rows * cols {
        return Err(parse_err(
            path,
            0,
            format!(
                "expected {} values for a {rows}x{cols} matrix, found {}",
                rows * cols,
                entries.len()
            ),
        ));
    }
    DenseMatrix::new(rows, cols, entries)
}

fn read_matrix_csv(path: &Path, reader: impl BufRead) -> Result<DenseMatrix> {
    let mut entries = Vec::new();
    let mut rows = 0usize;
    let mut cols = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(parse_err(
                    path,
                    idx + 1,
                    format!("row has {} fields, expected {c}", fields.len()),
                ));
            }
            _ => {}
        }
        for tok in fields {
            let v: f64 = tok.trim().parse().map_err(|e| {
                parse_err(path, idx + 1, format!("bad value '{}': {e}", tok.trim()))
            })?;
            entries.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err(path, 1, "empty matrix file"))?;
    DenseMatrix::new(rows, cols, entries)
}

/// Writes an observation set: `rows cols n` header, then `row col value`
/// triples.
pub fn write_observations(path: &Path, obs: &ObservationSet) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{} {} {}", obs.rows(), obs.cols(), obs.len())?;
    for &(r, c, v) in obs.samples() {
        writeln!(w, "{r} {c} {v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an observation set written by [`write_observations`].
pub fn read_observations(path: &Path) -> Result<ObservationSet> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let (rows, cols, n) = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(parse_err(
                        path,
                        idx + 1,
                        "header must be 'rows cols n'",
                    ));
                }
                let parse_usize = |f: &str| -> Result<usize> {
                    f.parse()
                        .map_err(|e| parse_err(path, idx + 1, format!("bad header field: {e}")))
                };
                break (
                    parse_usize(fields[0])?,
                    parse_usize(fields[1])?,
                    parse_usize(fields[2])?,
                );
            }
            None => return Err(parse_err(path, 1, "empty observation file")),
        }
    };
    let mut samples = Vec::with_capacity(n);
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(
                path,
                idx + 1,
                format!("expected 'row col value', got {} fields", fields.len()),
            ));
        }
        let r: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(path, idx + 1, format!("bad row index: {e}")))?;
        let c: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(path, idx + 1, format!("bad column index: {e}")))?;
        let v: f64 = fields[2]
            .parse()
            .map_err(|e| parse_err(path, idx + 1, format!("bad value: {e}")))?;
        samples.push((r, c, v));
    }
    if samples.len() != n {
        return Err(parse_err(
            path,
            0,
            format!("header promised {n} samples, found {}", samples.len()),
        ));
    }
    ObservationSet::new(rows, cols, samples)
}

/// A user × item rating dataset with separate train and test entry lists.
#[derive(Debug, Clone)]
pub struct RatingDataset {
    pub n_users: usize,
    pub n_items: usize,
    pub train: Vec<(usize, usize, f64)>,
    pub test: Vec<(usize, usize, f64)>,
    pub scale_max: f64,
}

/// Line accounting from a parser run; nothing is dropped silently.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub train_accepted: usize,
    pub test_accepted: usize,
    pub blank_skipped: usize,
}

impl RatingDataset {
    fn validated(self) -> Result<Self> {
        for (name, entries) in [("train", &self.train), ("test", &self.test)] {
            let mut seen = std::collections::HashSet::with_capacity(entries.len());
            for &(u, i, r) in entries {
                if u >= self.n_users || i >= self.n_items {
                    return Err(Error::IndexOutOfBounds {
                        row: u,
                        col: i,
                        rows: self.n_users,
                        cols: self.n_items,
                    });
                }
                if !(0.0..=self.scale_max).contains(&r) {
                    return Err(Error::InvalidInput(format!(
                        "{name} rating {r} outside [0, {}]",
                        self.scale_max
                    )));
                }
                if !seen.insert((u, i)) {
                    return Err(Error::DuplicateIndex { row: u, col: i });
                }
            }
        }
        Ok(self)
    }

    /// Train entries as an observation set on the `n_users × n_items` grid.
    pub fn train_observations(&self) -> Result<ObservationSet> {
        ObservationSet::new(self.n_users, self.n_items, self.train.clone())
    }
}

const RATING_SCALE_MAX: f64 = 5.0;

fn parse_rating_lines(
    path: &Path,
    stats_accepted: &mut usize,
    blank: &mut usize,
) -> Result<Vec<(usize, usize, f64)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            *blank += 1;
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(
                path,
                idx + 1,
                format!(
                    "expected 'user item rating timestamp', got {} fields",
                    fields.len()
                ),
            ));
        }
        let user: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(path, idx + 1, format!("bad user id: {e}")))?;
        let item: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(path, idx + 1, format!("bad item id: {e}")))?;
        let rating: f64 = fields[2]
            .parse()
            .map_err(|e| parse_err(path, idx + 1, format!("bad rating: {e}")))?;
        if user == 0 || item == 0 {
            return Err(parse_err(path, idx + 1, "ids are 1-based; found 0"));
        }
        if !(1.0..=RATING_SCALE_MAX).contains(&rating) {
            return Err(parse_err(
                path,
                idx + 1,
                format!("rating {rating} outside [1, {RATING_SCALE_MAX}]"),
            ));
        }
        out.push((user - 1, item - 1, rating));
        *stats_accepted += 1;
    }
    Ok(out)
}

/// Parses a MovieLens-layout train/test pair (tab-separated
/// `user item rating timestamp`, 1-based ids).
pub fn parse_movielens(train_path: &Path, test_path: &Path) -> Result<(RatingDataset, ParseStats)> {
    let mut stats = ParseStats::default();
    let train = parse_rating_lines(train_path, &mut stats.train_accepted, &mut stats.blank_skipped)?;
    let test = parse_rating_lines(test_path, &mut stats.test_accepted, &mut stats.blank_skipped)?;
    let n_users = train
        .iter()
        .chain(test.iter())
        .map(|&(u, _, _)| u + 1)
        .max()
        .unwrap_or(0);
    let n_items = train
        .iter()
        .chain(test.iter())
        .map(|&(_, i, _)| i + 1)
        .max()
        .unwrap_or(0);
    if n_users == 0 || n_items == 0 {
        // Empty inputs produce an empty dataset; callers are expected to warn.
        return Ok((
            RatingDataset {
                n_users: 0,
                n_items: 0,
                train,
                test,
                scale_max: RATING_SCALE_MAX,
            },
            stats,
        ));
    }
    let dataset = RatingDataset {
        n_users,
        n_items,
        train,
        test,
        scale_max: RATING_SCALE_MAX,
    }
    .validated()?;
    Ok((dataset, stats))
}

fn parse_dense_rating_matrix(
    path: &Path,
    accepted: &mut usize,
    blank: &mut usize,
) -> Result<(usize, usize, Vec<(usize, usize, f64)>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut entries = Vec::new();
    let mut rows = 0usize;
    let mut cols: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            *blank += 1;
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(parse_err(
                    path,
                    idx + 1,
                    format!("row {rows} has {} columns, expected {c}", fields.len()),
                ));
            }
            _ => {}
        }
        for (j, tok) in fields.iter().enumerate() {
            let v: f64 = tok
                .parse()
                .map_err(|e| parse_err(path, idx + 1, format!("bad rating '{tok}': {e}")))?;
            if v != 0.0 {
                if !(1.0..=RATING_SCALE_MAX).contains(&v) {
                    return Err(parse_err(
                        path,
                        idx + 1,
                        format!("rating {v} outside [1, {RATING_SCALE_MAX}]"),
                    ));
                }
                entries.push((rows, j, v));
                *accepted += 1;
            }
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    Ok((rows, cols, entries))
}

/// Parses a Coat-layout train/test pair: dense space-separated rating
/// matrices with 0 marking unobserved cells. Both files must share a shape.
pub fn parse_coat(train_path: &Path, test_path: &Path) -> Result<(RatingDataset, ParseStats)> {
    let mut stats = ParseStats::default();
    let (r1, c1, train) =
        parse_dense_rating_matrix(train_path, &mut stats.train_accepted, &mut stats.blank_skipped)?;
    let (r2, c2, test) =
        parse_dense_rating_matrix(test_path, &mut stats.test_accepted, &mut stats.blank_skipped)?;
    if (r1, c1) != (r2, c2) {
        return Err(Error::DimensionMismatch(format!(
            "train matrix is {r1}x{c1} but test matrix is {r2}x{c2}"
        )));
    }
    let dataset = RatingDataset {
        n_users: r1,
        n_items: c1,
        train,
        test,
        scale_max: RATING_SCALE_MAX,
    };
    if dataset.n_users == 0 || dataset.train.is_empty() && dataset.test.is_empty() {
        return Ok((dataset, stats));
    }
    Ok((dataset.validated()?, stats))
}

/// Randomly partitions the test entries into a validation subset of size
/// `round(fraction · |test|)` and an evaluation subset with the rest.
/// Deterministic for a fixed seed.
pub fn split_test(
    dataset: &RatingDataset,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>)> {
    if dataset.test.is_empty() {
        return Err(Error::InvalidInput("test set is empty".into()));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "split fraction {fraction} outside (0, 1)"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..dataset.test.len()).collect();
    order.shuffle(&mut rng);
    let cut = (fraction * dataset.test.len() as f64).round() as usize;
    let validation = order[..cut].iter().map(|&i| dataset.test[i]).collect();
    let evaluation = order[cut..].iter().map(|&i| dataset.test[i]).collect();
    Ok((validation, evaluation))
}
