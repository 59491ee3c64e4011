//! Pixel-concentration reports and chi-square diagnostics for shares.

use std::io::{Read, Write};
use std::path::Path;

use crate::bitmap::BinaryImage;
use crate::error::{Error, Result};
use crate::hvc::HierarchyBundle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelStats {
    pub entity: String,
    pub black: u64,
    pub white: u64,
    pub total: u64,
}

impl PixelStats {
    pub fn black_fraction(&self) -> f64 {
        self.black as f64 / self.total as f64
    }

    pub fn white_fraction(&self) -> f64 {
        self.white as f64 / self.total as f64
    }

    pub fn is_consistent(&self) -> bool {
        self.black + self.white == self.total
    }
}

pub fn pixel_stats(img: &BinaryImage, name: &str) -> PixelStats {
    let black = img.count_black() as u64;
    let total = img.dims().area() as u64;
    PixelStats {
        entity: name.to_owned(),
        black,
        white: total - black,
        total,
    }
}

/// Report row names, in report order.
pub const REPORT_ENTITIES: [&str; 10] = [
    "Secret",
    "Resized secret",
    "Share1",
    "Share2",
    "Share11",
    "Share12",
    "Share21",
    "Share22",
    "Key share",
    "Revealed secret",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StatsReport {
    pub rows: Vec<PixelStats>,
}

impl StatsReport {
    pub fn row(&self, entity: &str) -> Option<&PixelStats> {
        self.rows.iter().find(|r| r.entity == entity)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(buf)
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        wtr.write_record(["entity", "black", "white", "total"])?;
        for r in &self.rows {
            wtr.write_record([r.entity.as_str(), &r.black.to_string(), &r.white.to_string(), &r.total.to_string()])?;
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<StatsReport> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["entity", "black", "white", "total"] {
            return Err(Error::MalformedReport(format!("unexpected header {headers:?}")));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<u64> {
                rec[i]
                    .parse()
                    .map_err(|_| Error::MalformedReport(format!("non-numeric field {:?}", &rec[i])))
            };
            rows.push(PixelStats {
                entity: rec[0].to_owned(),
                black: num(1)?,
                white: num(2)?,
                total: num(3)?,
            });
        }
        Ok(StatsReport { rows })
    }

    /// Per-entity black and white fractions, one row per entity.
    pub fn concentration_csv(&self) -> Result<Vec<u8>> {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        wtr.write_record(["entity", "black_fraction", "white_fraction"])?;
        for r in &self.rows {
            wtr.write_record([
                r.entity.as_str(),
                &format!("{:.6}", r.black_fraction()),
                &format!("{:.6}", r.white_fraction()),
            ])?;
        }
        wtr.into_inner().map_err(|e| Error::MalformedReport(e.to_string()))
    }
}

pub fn report(bundle: &HierarchyBundle, secret: &BinaryImage, revealed: &BinaryImage) -> StatsReport {
    let images = [
        secret,
        &bundle.resized,
        &bundle.s1,
        &bundle.s2,
        &bundle.s11,
        &bundle.s12,
        &bundle.s21,
        &bundle.s22,
        &bundle.key_share,
        revealed,
    ];
    StatsReport {
        rows: REPORT_ENTITIES
            .iter()
            .zip(images)
            .map(|(name, img)| pixel_stats(img, name))
            .collect(),
    }
}

pub fn write_csv(rep: &StatsReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = rep.to_csv()?;
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<StatsReport> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    StatsReport::read_from(file)
}

/// Significance levels with tabulated critical values.
pub const ALPHAS: [f64; 4] = [0.10, 0.05, 0.01, 0.001];

/// Upper-tail chi-square critical values, rows df = 1..=8, columns `ALPHAS`.
const CRITICAL: [[f64; 4]; 8] = [
    [2.706, 3.841, 6.635, 10.828],
    [4.605, 5.991, 9.210, 13.816],
    [6.251, 7.815, 11.345, 16.266],
    [7.779, 9.488, 13.277, 18.467],
    [9.236, 11.070, 15.086, 20.515],
    [10.645, 12.592, 16.812, 22.458],
    [12.017, 14.067, 18.475, 24.322],
    [13.362, 15.507, 20.090, 26.124],
];

/// Tabulated critical value, if `df` and `alpha` are in the table.
pub fn critical_value(df: usize, alpha: f64) -> Option<f64> {
    let col = ALPHAS.iter().position(|&a| a == alpha)?;
    CRITICAL.get(df.checked_sub(1)?).map(|row| row[col])
}

/// Bracket around the p-value: `lower < p <= upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PBounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p: PBounds,
}

impl ChiSquare {
    fn new(statistic: f64, df: usize) -> Result<Self> {
        let row = CRITICAL
            .get(df.wrapping_sub(1))
            .ok_or(Error::UnsupportedDegreesOfFreedom(df))?;
        let mut upper = 1.0;
        for (crit, alpha) in row.iter().zip(ALPHAS) {
            if statistic >= *crit {
                upper = alpha;
            }
        }
        let lower = ALPHAS.iter().copied().filter(|&a| a < upper).fold(0.0, f64::max);
        Ok(ChiSquare {
            statistic,
            df,
            p: PBounds { lower, upper },
        })
    }

    /// True when the statistic reaches the critical value at `alpha`.
    pub fn rejects_at(&self, alpha: f64) -> bool {
        critical_value(self.df, alpha).is_some_and(|c| self.statistic >= c)
    }
}

/// Pearson goodness-of-fit against equal expected counts.
pub fn chi_square_uniformity(counts: &[u64]) -> Result<ChiSquare> {
    if counts.len() < 2 {
        return Err(Error::TooFewBins);
    }
    let n: u64 = counts.iter().sum();
    let expected = n as f64 / counts.len() as f64;
    if expected < 5.0 {
        return Err(Error::UnderpopulatedBin { bin: 0, expected });
    }
    let stat = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    ChiSquare::new(stat, counts.len() - 1)
}

/// Pearson test of independence on an r×c contingency table.
pub fn chi_square_independence(table: &[Vec<u64>]) -> Result<ChiSquare> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 {
        return Err(Error::TooFewBins);
    }
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::MalformedReport("ragged contingency table".into()));
    }
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let n: f64 = row_sums.iter().sum();
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &obs) in r.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / n;
            if expected < 5.0 {
                return Err(Error::UnderpopulatedBin { bin: i * cols + j, expected });
            }
            let d = obs as f64 - expected;
            stat += d * d / expected;
        }
    }
    ChiSquare::new(stat, (rows - 1) * (cols - 1))
}
