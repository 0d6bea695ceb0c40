//! Price-relative matrices: loading, validation, windowing and dataset manifests.
//!
//! A [`RelativesMatrix`] holds `n` periods by `m` assets of gross returns
//! `x_t = p_t / p_{t-1}`. Strategies never see the matrix directly; they get a
//! [`History`] that only contains the periods already observed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk layout of a CSV input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    CsvRelatives,
    CsvPrices,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv_relatives" | "relatives" => Ok(InputFormat::CsvRelatives),
            "csv_prices" | "prices" => Ok(InputFormat::CsvPrices),
            other => Err(Error::Config(format!(
                "unknown data format {other:?} (expected csv_relatives or csv_prices)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelativesMatrix {
    values: Vec<f64>,
    periods: usize,
    assets: usize,
    asset_names: Vec<String>,
    period_labels: Option<Vec<String>>,
}

impl RelativesMatrix {
    /// Builds a matrix from row vectors, validating positivity and shape.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let assets = rows.first().map(Vec::len).unwrap_or(0);
        let names = default_names(assets);
        Self::from_parts(rows, names, None)
    }

    pub fn from_parts(
        rows: Vec<Vec<f64>>,
        asset_names: Vec<String>,
        period_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::data(None, None, "no periods"));
        }
        let assets = rows[0].len();
        if assets < 2 {
            return Err(Error::data(
                Some(0),
                None,
                format!("need at least 2 assets, found {assets}"),
            ));
        }
        if asset_names.len() != assets {
            return Err(Error::data(
                None,
                None,
                format!("{} asset names for {assets} columns", asset_names.len()),
            ));
        }
        if let Some(labels) = &period_labels {
            if labels.len() != rows.len() {
                return Err(Error::data(
                    None,
                    Some(0),
                    format!("{} period labels for {} rows", labels.len(), rows.len()),
                ));
            }
        }
        let mut values = Vec::with_capacity(rows.len() * assets);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != assets {
                return Err(Error::data(
                    Some(r),
                    None,
                    format!("ragged row: expected {assets} entries, found {}", row.len()),
                ));
            }
            for (c, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::data(
                        Some(r),
                        Some(c),
                        format!("price relative must be positive and finite, found {v}"),
                    ));
                }
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            values,
            periods: rows.len(),
            assets,
            asset_names,
            period_labels,
        })
    }

    /// Converts a price table (one row per period) into relatives. The output
    /// has one row fewer than the input.
    pub fn from_prices(prices: &[Vec<f64>]) -> Result<Self> {
        let assets = prices.first().map(Vec::len).unwrap_or(0);
        Self::from_prices_labeled(prices, default_names(assets), None)
    }

    fn from_prices_labeled(
        prices: &[Vec<f64>],
        asset_names: Vec<String>,
        period_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if prices.len() < 2 {
            return Err(Error::data(
                None,
                None,
                format!("need at least 2 price rows, found {}", prices.len()),
            ));
        }
        let assets = prices[0].len();
        for (r, row) in prices.iter().enumerate() {
            if row.len() != assets {
                return Err(Error::data(
                    Some(r),
                    None,
                    format!("ragged row: expected {assets} entries, found {}", row.len()),
                ));
            }
            for (c, &p) in row.iter().enumerate() {
                if !(p.is_finite() && p > 0.0) {
                    return Err(Error::data(
                        Some(r),
                        Some(c),
                        format!("price must be positive and finite, found {p}"),
                    ));
                }
            }
        }
        let rows: Vec<Vec<f64>> = prices
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(p, q)| p / q).collect())
            .collect();
        let labels = period_labels.map(|l| l.into_iter().skip(1).collect());
        Self::from_parts(rows, asset_names, labels)
    }

    /// Number of periods `n`.
    pub fn periods(&self) -> usize {
        self.periods
    }

    /// Number of assets `m`.
    pub fn assets(&self) -> usize {
        self.assets
    }

    pub fn asset_names(&self) -> &[String] {
        &self.asset_names
    }

    pub fn period_labels(&self) -> Option<&[String]> {
        self.period_labels.as_deref()
    }

    /// Row for period `t`, zero-based.
    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.assets..(t + 1) * self.assets]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.assets)
    }

    /// The first `observed` periods. Panics if `observed > periods()`.
    pub fn history(&self, observed: usize) -> History<'_> {
        assert!(observed <= self.periods, "history past end of data");
        History {
            data: &self.values[..observed * self.assets],
            assets: self.assets,
        }
    }

    /// Rows `end_t - width + 1 ..= end_t` using one-based period indices.
    pub fn slice_window(&self, end_t: usize, width: usize) -> Result<RelativesMatrix> {
        if width == 0 || width > end_t || end_t > self.periods {
            return Err(Error::Index(format!(
                "window of width {width} ending at period {end_t} in a {}-period matrix",
                self.periods
            )));
        }
        let start = end_t - width;
        let values = self.values[start * self.assets..end_t * self.assets].to_vec();
        let period_labels = self
            .period_labels
            .as_ref()
            .map(|l| l[start..end_t].to_vec());
        Ok(Self {
            values,
            periods: width,
            assets: self.assets,
            asset_names: self.asset_names.clone(),
            period_labels,
        })
    }

    /// Writes the matrix in the `csv_relatives` layout. Values use the shortest
    /// round-trip decimal representation, so reloading is lossless.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write_csv_to(&mut out).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_csv_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let labels = self.period_labels.as_ref();
        if labels.is_some() {
            write!(out, "date,")?;
        }
        writeln!(out, "{}", self.asset_names.join(","))?;
        for (t, row) in self.rows().enumerate() {
            if let Some(l) = labels {
                write!(out, "{},", l[t])?;
            }
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Seeded synthetic market with mildly mean-reverting log returns. Used by
    /// the examples and tests; not meant to resemble any real dataset.
    pub fn synthetic(periods: usize, assets: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vol = Uniform::new(0.008, 0.03).expect("valid range");
        let drift = Uniform::new(-0.0004, 0.0008).expect("valid range");
        let params: Vec<(f64, f64)> = (0..assets)
            .map(|_| (drift.sample(&mut rng), vol.sample(&mut rng)))
            .collect();
        let noise = Normal::new(0.0, 1.0).expect("valid normal");
        let mut level = vec![0.0f64; assets];
        let mut rows = Vec::with_capacity(periods);
        for _ in 0..periods {
            let row: Vec<f64> = params
                .iter()
                .zip(level.iter_mut())
                .map(|(&(mu, sd), lvl)| {
                    let r = mu - 0.15 * *lvl + sd * noise.sample(&mut rng);
                    *lvl += r - mu;
                    r.exp()
                })
                .collect();
            rows.push(row);
        }
        Self::from_rows(rows)
    }
}

fn default_names(assets: usize) -> Vec<String> {
    (0..assets).map(|i| format!("asset_{i}")).collect()
}

/// A read-only view of the first `len()` periods of a relatives matrix.
#[derive(Debug, Clone, Copy)]
pub struct History<'a> {
    data: &'a [f64],
    assets: usize,
}

impl<'a> History<'a> {
    /// Wraps a row-major buffer. Panics if the buffer is not a whole number of rows.
    pub fn from_slice(data: &'a [f64], assets: usize) -> Self {
        assert!(assets > 0 && data.len().is_multiple_of(assets), "ragged history buffer");
        Self { data, assets }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.assets
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn assets(&self) -> usize {
        self.assets
    }

    /// Zero-based row access.
    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.assets..(i + 1) * self.assets]
    }

    pub fn last(&self) -> Option<&'a [f64]> {
        (!self.is_empty()).then(|| self.row(self.len() - 1))
    }

    /// The most recent `k` rows (or fewer if not available).
    pub fn tail(&self, k: usize) -> History<'a> {
        let k = k.min(self.len());
        History {
            data: &self.data[(self.len() - k) * self.assets..],
            assets: self.assets,
        }
    }

    pub fn rows(&self) -> impl DoubleEndedIterator<Item = &'a [f64]> + 'a {
        self.data.chunks_exact(self.assets)
    }
}

/// Loads a matrix from CSV, auto-detecting an optional header row and an
/// optional leading column of period labels.
pub fn load_relatives(path: impl AsRef<Path>, format: InputFormat) -> Result<RelativesMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_relatives(file, format)
}

pub fn parse_relatives<R: std::io::Read>(reader: R, format: InputFormat) -> Result<RelativesMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    if records.is_empty() {
        return Err(Error::data(None, None, "empty file"));
    }

    let numeric = |s: &str| s.parse::<f64>().is_ok();
    let has_header = records[0].iter().skip(1).any(|c| !numeric(c))
        || (records[0].len() == 1 && !numeric(&records[0][0]));
    let data_start = usize::from(has_header);
    if records.len() <= data_start {
        return Err(Error::data(None, None, "file has a header but no data rows"));
    }
    let has_labels = !numeric(&records[data_start][0]);
    let skip = usize::from(has_labels);
    let width = records[data_start].len();

    let mut rows = Vec::with_capacity(records.len() - data_start);
    let mut labels = Vec::new();
    for (r, rec) in records.iter().enumerate().skip(data_start) {
        if rec.len() != width {
            return Err(Error::data(
                Some(r),
                None,
                format!("ragged row: expected {width} cells, found {}", rec.len()),
            ));
        }
        if has_labels {
            labels.push(rec[0].clone());
        }
        let mut row = Vec::with_capacity(width - skip);
        for (c, cell) in rec.iter().enumerate().skip(skip) {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::data(Some(r), Some(c), format!("not a number: {cell:?}")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::data(
                    Some(r),
                    Some(c),
                    format!("entries must be positive and finite, found {v}"),
                ));
            }
            row.push(v);
        }
        rows.push(row);
    }

    let assets = width - skip;
    let names = if has_header {
        let header = &records[0];
        if header.len() != width {
            return Err(Error::data(
                Some(0),
                None,
                format!("header has {} cells, data rows have {width}", header.len()),
            ));
        }
        header[skip..].to_vec()
    } else {
        default_names(assets)
    };
    let labels = has_labels.then_some(labels);
    match format {
        InputFormat::CsvRelatives => RelativesMatrix::from_parts(rows, names, labels),
        InputFormat::CsvPrices => RelativesMatrix::from_prices_labeled(&rows, names, labels),
    }
}

/// Metadata describing a dataset on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub region: String,
    pub rows: usize,
    pub assets: usize,
    pub source_path: PathBuf,
}

impl DatasetManifest {
    pub fn describe(
        name: impl Into<String>,
        region: impl Into<String>,
        matrix: &RelativesMatrix,
        source_path: impl Into<PathBuf>,
    ) -> Self {
        Self {
            name: name.into(),
            region: region.into(),
            rows: matrix.periods(),
            assets: matrix.assets(),
            source_path: source_path.into(),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(file)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn validate(&self, matrix: &RelativesMatrix) -> Result<()> {
        if self.rows != matrix.periods() || self.assets != matrix.assets() {
            return Err(Error::data(
                None,
                None,
                format!(
                    "manifest {} declares {}x{}, file holds {}x{}",
                    self.name,
                    self.rows,
                    self.assets,
                    matrix.periods(),
                    matrix.assets()
                ),
            ));
        }
        Ok(())
    }

    /// Loads the manifest at `path` and the relatives file it points to.
    /// Relative `source_path`s resolve against the manifest's directory.
    pub fn load_dataset(path: impl AsRef<Path>) -> Result<(Self, RelativesMatrix)> {
        let path = path.as_ref();
        let manifest = Self::read(path)?;
        let source = if manifest.source_path.is_absolute() {
            manifest.source_path.clone()
        } else {
            path.parent()
                .unwrap_or_else(|| Path::new("."))
                .join(&manifest.source_path)
        };
        let matrix = load_relatives(source, InputFormat::CsvRelatives)?;
        manifest.validate(&matrix)?;
        Ok((manifest, matrix))
    }
}
