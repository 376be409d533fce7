//! Dataset representation, delimited-file ingestion and standardization.

use std::fs::File;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{mean, sample_sd};

/// Scores for `n` subjects on `p` variables plus the continuous gold standard.
///
/// Columns are stored separately; every statistic in the crate works on whole
/// columns or on projections `l^T x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    z: Vec<f64>,
    names: Vec<String>,
    z_name: String,
}

impl Dataset {
    pub fn new(columns: Vec<Vec<f64>>, z: Vec<f64>, names: Vec<String>, z_name: impl Into<String>) -> Result<Self> {
        let n = z.len();
        if n < 2 {
            return Err(Error::TooFewRows { needed: 2, found: n });
        }
        if columns.is_empty() {
            return Err(Error::NoScoreColumns);
        }
        if names.len() != columns.len() {
            return Err(Error::LengthMismatch { left: names.len(), right: columns.len() });
        }
        let z_name = z_name.into();
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(z_name));
        }
        for (col, name) in columns.iter().zip(&names) {
            if col.len() != n {
                return Err(Error::LengthMismatch { left: col.len(), right: n });
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(name.clone()));
            }
        }
        Ok(Self { columns, z, names, z_name })
    }

    /// Convenience constructor with generated names `x1..xp` and gold `z`.
    pub fn from_columns(columns: Vec<Vec<f64>>, z: Vec<f64>) -> Result<Self> {
        let names = (1..=columns.len()).map(|j| format!("x{j}")).collect();
        Self::new(columns, z, names, "z")
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn z_name(&self) -> &str {
        &self.z_name
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    /// Scores of the linear combination `l^T x_i` for every subject.
    pub fn project(&self, l: &[f64]) -> Result<Vec<f64>> {
        if l.len() != self.p() {
            return Err(Error::LengthMismatch { left: l.len(), right: self.p() });
        }
        let mut y = vec![0.0; self.n()];
        for (col, &c) in self.columns.iter().zip(l) {
            if c == 0.0 {
                continue;
            }
            for (yi, &x) in y.iter_mut().zip(col) {
                *yi += c * x;
            }
        }
        Ok(y)
    }

    /// Rows picked by index, repeats allowed (bootstrap resampling).
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect(),
            z: rows.iter().map(|&i| self.z[i]).collect(),
            names: self.names.clone(),
            z_name: self.z_name.clone(),
        }
    }

    /// Subset of variables, keeping the gold standard.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Dataset> {
        Dataset::new(
            cols.iter().map(|&j| self.columns[j].clone()).collect(),
            self.z.clone(),
            cols.iter().map(|&j| self.names[j].clone()).collect(),
            self.z_name.clone(),
        )
    }

    /// The same dataset with every variable and the gold standard mean-centered.
    pub fn centered(&self) -> Dataset {
        let shift = |v: &[f64]| {
            let m = mean(v);
            v.iter().map(|x| x - m).collect::<Vec<_>>()
        };
        Dataset {
            columns: self.columns.iter().map(|c| shift(c)).collect(),
            z: shift(&self.z),
            names: self.names.clone(),
            z_name: self.z_name.clone(),
        }
    }
}

/// Per-column centering and scaling applied by [`standardize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub z_mean: f64,
    pub z_sd: f64,
    pub applied: bool,
}

impl Standardization {
    pub fn identity(p: usize) -> Self {
        Self { means: vec![0.0; p], sds: vec![1.0; p], z_mean: 0.0, z_sd: 1.0, applied: false }
    }

    /// Maps a coefficient vector fitted on standardized columns back to raw units.
    pub fn unscale_coefficients(&self, l: &[f64]) -> Vec<f64> {
        l.iter().zip(&self.sds).map(|(c, s)| c / s).collect()
    }
}

/// Centers and scales every variable and the gold standard to mean 0, sd 1.
pub fn standardize(d: &Dataset) -> Result<(Dataset, Standardization)> {
    let scale = |v: &[f64], name: &str| -> Result<(Vec<f64>, f64, f64)> {
        let m = mean(v);
        let s = sample_sd(v);
        if !(s > 0.0) {
            return Err(Error::ZeroVariance(name.to_string()));
        }
        Ok((v.iter().map(|x| (x - m) / s).collect(), m, s))
    };
    let mut columns = Vec::with_capacity(d.p());
    let mut means = Vec::with_capacity(d.p());
    let mut sds = Vec::with_capacity(d.p());
    for (col, name) in d.columns.iter().zip(&d.names) {
        let (c, m, s) = scale(col, name)?;
        columns.push(c);
        means.push(m);
        sds.push(s);
    }
    let (z, z_mean, z_sd) = scale(&d.z, &d.z_name)?;
    let out = Dataset { columns, z, names: d.names.clone(), z_name: d.z_name.clone() };
    Ok((out, Standardization { means, sds, z_mean, z_sd, applied: true }))
}

/// Centered design matrix `H` and centered gold vector `z~`.
pub fn center(d: &Dataset) -> (DMatrix<f64>, DVector<f64>) {
    let c = d.centered();
    let h = DMatrix::from_fn(c.n(), c.p(), |i, j| c.columns[j][i]);
    (h, DVector::from_vec(c.z))
}

/// How the gold-standard column is identified in a delimited file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GoldColumn {
    Name(String),
    Index(usize),
}

impl std::str::FromStr for GoldColumn {
    type Err = std::convert::Infallible;

    /// A bare integer is read as a zero-based index, anything else as a name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => GoldColumn::Index(i),
            Err(_) => GoldColumn::Name(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    /// `None` sniffs the first line: tab if it contains one, otherwise comma.
    pub delimiter: Option<u8>,
    pub no_header: bool,
    /// Restrict to these score columns; `None` takes every numeric column.
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub dataset: Dataset,
    /// Rows removed because a used cell was missing or unparseable.
    pub dropped_rows: usize,
    pub total_rows: usize,
    /// Columns left out because no cell parsed as a number.
    pub skipped_columns: Vec<String>,
}

const MISSING: &[&str] = &["", "na", "nan", "null", ".", "?"];

fn parse_cell(s: &str) -> Option<f64> {
    let t = s.trim();
    if MISSING.contains(&t.to_ascii_lowercase().as_str()) {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads a comma- or tab-delimited file, dropping incomplete rows.
pub fn load_delimited(path: &Path, gold: &GoldColumn, opts: &LoadOptions) -> Result<Loaded> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let delimiter = match opts.delimiter {
        Some(d) => d,
        None => {
            let text = std::fs::read_to_string(path).map_err(io_err)?;
            let first = text.lines().next().unwrap_or("");
            if first.contains('\t') {
                b'\t'
            } else {
                b','
            }
        }
    };
    let file = File::open(path).map_err(io_err)?;
    let mut reader =
        csv::ReaderBuilder::new().delimiter(delimiter).has_headers(false).trim(csv::Trim::All).from_reader(file);

    let parse_err = |line: u64, msg: String| Error::Parse { path: PathBuf::from(path), line, msg };
    let mut rows: Vec<(u64, csv::StringRecord)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        rows.push((line, rec));
    }
    let header: Vec<String> = if opts.no_header {
        let width = rows.first().map(|r| r.1.len()).unwrap_or(0);
        (1..=width).map(|j| format!("V{j}")).collect()
    } else {
        if rows.is_empty() {
            return Err(Error::TooFewRows { needed: 2, found: 0 });
        }
        rows.remove(0).1.iter().map(str::to_string).collect()
    };
    let width = header.len();

    let gold_idx = match gold {
        GoldColumn::Index(i) if *i < width => *i,
        GoldColumn::Index(i) => return Err(Error::MissingGold(i.to_string())),
        GoldColumn::Name(name) => {
            header.iter().position(|h| h == name).ok_or_else(|| Error::MissingGold(name.clone()))?
        }
    };

    let numeric: Vec<bool> =
        (0..width).map(|j| rows.iter().any(|(_, r)| r.get(j).and_then(parse_cell).is_some())).collect();
    if !numeric[gold_idx] {
        return Err(Error::NonNumericColumn(header[gold_idx].clone()));
    }

    let mut skipped_columns = Vec::new();
    let score_idx: Vec<usize> = match &opts.columns {
        Some(wanted) => {
            let mut idx = Vec::with_capacity(wanted.len());
            for name in wanted {
                let j = header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::InvalidArgument(format!("column {name} not found")))?;
                if !numeric[j] {
                    return Err(Error::NonNumericColumn(name.clone()));
                }
                if j != gold_idx {
                    idx.push(j);
                }
            }
            idx
        }
        None => (0..width)
            .filter(|&j| j != gold_idx)
            .filter(|&j| {
                if !numeric[j] {
                    skipped_columns.push(header[j].clone());
                }
                numeric[j]
            })
            .collect(),
    };
    if score_idx.is_empty() {
        return Err(Error::NoScoreColumns);
    }

    let total_rows = rows.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(total_rows); score_idx.len()];
    let mut z = Vec::with_capacity(total_rows);
    let mut dropped_rows = 0;
    for (line, rec) in &rows {
        if rec.len() != width {
            return Err(parse_err(*line, format!("expected {width} fields, found {}", rec.len())));
        }
        let zv = parse_cell(&rec[gold_idx]);
        let xs: Option<Vec<f64>> = score_idx.iter().map(|&j| parse_cell(&rec[j])).collect();
        match (zv, xs) {
            (Some(zv), Some(xs)) => {
                z.push(zv);
                for (col, v) in columns.iter_mut().zip(xs) {
                    col.push(v);
                }
            }
            _ => dropped_rows += 1,
        }
    }
    if z.len() < 2 {
        return Err(Error::TooFewRows { needed: 2, found: z.len() });
    }
    let names = score_idx.iter().map(|&j| header[j].clone()).collect();
    let dataset = Dataset::new(columns, z, names, header[gold_idx].clone())?;
    Ok(Loaded { dataset, dropped_rows, total_rows, skipped_columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn minimal_file_two_rows_one_variable() {
        let f = write_tmp("x,z\n1,2\n3,4\n");
        let l = load_delimited(f.path(), &GoldColumn::Name("z".into()), &LoadOptions::default()).unwrap();
        assert_eq!(l.dataset.n(), 2);
        assert_eq!(l.dataset.p(), 1);
        assert_eq!(l.dropped_rows, 0);
    }

    #[test]
    fn blank_cells_drop_rows() {
        let mut s = String::from("a\tb\tgold\n");
        for i in 0..10 {
            let b = if i % 3 == 0 && i > 0 { String::new() } else { format!("{}", i * 2) };
            s.push_str(&format!("{i}\t{b}\t{}\n", i as f64 * 0.5));
        }
        let f = write_tmp(&s);
        let l = load_delimited(f.path(), &GoldColumn::Name("gold".into()), &LoadOptions::default()).unwrap();
        assert_eq!(l.dataset.n(), 7);
        assert_eq!(l.dropped_rows, 3);
        assert_eq!(l.dataset.names(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn na_tokens_count_as_missing() {
        let f = write_tmp("x,y,z\n1,NA,1\n2,3,2\n3,4,?\n4,5,4\n");
        let l = load_delimited(f.path(), &GoldColumn::Index(2), &LoadOptions::default()).unwrap();
        assert_eq!(l.dataset.n(), 2);
        assert_eq!(l.dropped_rows, 2);
    }

    #[test]
    fn text_column_skipped_unless_requested() {
        let f = write_tmp("sex,x,z\nm,1,1\nf,2,3\nm,3,2\n");
        let gold = GoldColumn::Name("z".into());
        let l = load_delimited(f.path(), &gold, &LoadOptions::default()).unwrap();
        assert_eq!(l.dataset.p(), 1);
        assert_eq!(l.skipped_columns, vec!["sex".to_string()]);
        let opts = LoadOptions { columns: Some(vec!["sex".into()]), ..Default::default() };
        assert!(matches!(load_delimited(f.path(), &gold, &opts), Err(Error::NonNumericColumn(_))));
    }

    #[test]
    fn no_header_uses_generated_names() {
        let f = write_tmp("1,2,3\n4,5,6\n7,8,10\n");
        let opts = LoadOptions { no_header: true, ..Default::default() };
        let l = load_delimited(f.path(), &GoldColumn::Index(0), &opts).unwrap();
        assert_eq!(l.dataset.z(), &[1.0, 4.0, 7.0]);
        assert_eq!(l.dataset.names(), &["V2".to_string(), "V3".to_string()]);
    }

    #[test]
    fn load_errors() {
        let gold = GoldColumn::Name("z".into());
        let missing = load_delimited(Path::new("/nonexistent/file.csv"), &gold, &LoadOptions::default());
        assert!(matches!(missing, Err(Error::Io { .. })));

        let f = write_tmp("x,y\n1,2\n3,4\n");
        assert!(matches!(load_delimited(f.path(), &gold, &LoadOptions::default()), Err(Error::MissingGold(_))));

        let f = write_tmp("x,z\n1,2\n3,\n");
        assert!(matches!(
            load_delimited(f.path(), &gold, &LoadOptions::default()),
            Err(Error::TooFewRows { found: 1, .. })
        ));

        let f = write_tmp("x,z\n1,2\n3,4,5\n");
        let err = load_delimited(f.path(), &gold, &LoadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn standardize_unit_column() {
        let d = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0]], vec![2.0, 4.0, 9.0]).unwrap();
        let (s, params) = standardize(&d).unwrap();
        assert!(mean(s.column(0)).abs() < 1e-15);
        assert!((sample_sd(s.column(0)) - 1.0).abs() < 1e-15);
        assert!(mean(s.z()).abs() < 1e-15);
        assert!((sample_sd(s.z()) - 1.0).abs() < 1e-15);
        assert_eq!(params.means[0], 2.0);
        assert_eq!(params.sds[0], 1.0);
    }

    #[test]
    fn standardize_rejects_constant_column() {
        let d = Dataset::from_columns(vec![vec![5.0, 5.0, 5.0]], vec![1.0, 2.0, 3.0]).unwrap();
        let err = standardize(&d).unwrap_err();
        assert!(matches!(err, Error::ZeroVariance(ref c) if c == "x1"));
        assert!(err.to_string().contains("zero variance"));
    }

    #[test]
    fn standardize_is_idempotent() {
        let d = Dataset::from_columns(vec![vec![0.3, -1.2, 4.0, 2.2]], vec![1.0, 0.0, 2.0, 7.0]).unwrap();
        let (once, _) = standardize(&d).unwrap();
        let (twice, params) = standardize(&once).unwrap();
        for (a, b) in once.column(0).iter().zip(twice.column(0)) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(params.means[0].abs() < 1e-12);
        assert!((params.sds[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn center_examples() {
        let d = Dataset::from_columns(vec![vec![1.0, 3.0]], vec![2.0, 4.0]).unwrap();
        let (h, z) = center(&d);
        assert_eq!(h.column(0).as_slice(), &[-1.0, 1.0]);
        assert_eq!(z.as_slice(), &[-1.0, 1.0]);

        let d = Dataset::from_columns(vec![vec![0.0, 1.0, 2.0], vec![10.0, 20.0, 30.0]], vec![0.0, 1.0, 5.0]).unwrap();
        let (h, _) = center(&d);
        assert_eq!(h.column(0).as_slice(), &[-1.0, 0.0, 1.0]);
        assert_eq!(h.column(1).as_slice(), &[-10.0, 0.0, 10.0]);
    }

    #[test]
    fn centering_is_idempotent() {
        let d = Dataset::from_columns(vec![vec![0.1, 0.7, -0.4, 0.9]], vec![0.2, -0.5, 0.8, 0.3]).unwrap();
        let once = d.centered();
        let twice = once.centered();
        for (a, b) in once.column(0).iter().zip(twice.column(0)) {
            assert!((a - b).abs() <= 1e-12);
        }
        for (a, b) in once.z().iter().zip(twice.z()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(Dataset::from_columns(vec![vec![1.0]], vec![1.0]).is_err());
        assert!(Dataset::from_columns(vec![], vec![1.0, 2.0]).is_err());
        assert!(Dataset::from_columns(vec![vec![1.0, f64::NAN]], vec![1.0, 2.0]).is_err());
        assert!(Dataset::from_columns(vec![vec![1.0, 2.0, 3.0]], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn gold_column_parsing() {
        assert_eq!("3".parse::<GoldColumn>().unwrap(), GoldColumn::Index(3));
        assert_eq!("glyhb".parse::<GoldColumn>().unwrap(), GoldColumn::Name("glyhb".into()));
    }
}
