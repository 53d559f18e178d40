//! Validated time series and the CSV interchange format.
//!
//! A [`TimeSeries`] is an ordered list of `(t, value)` observations on the
//! real time axis (years CE; BCE years are negative). Time must be strictly
//! increasing and values finite. Operations that feed the fitting pipeline
//! additionally require at least [`MIN_FIT_POINTS`] points and, for log-space
//! work, strictly positive values.

use std::fmt::Write as _;
use std::io::Read;

use thiserror::Error;

/// Minimum number of points for any fitting use.
pub const MIN_FIT_POINTS: usize = 3;

/// Errors produced by series construction, parsing and transforms.
#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("malformed row at line {line}: {content:?}")]
    MalformedRow { line: usize, content: String },
    #[error("time not strictly increasing at line {line}")]
    NonMonotonicTime { line: usize },
    #[error("too few points: found {found}, need at least {required}")]
    TooFewPoints { found: usize, required: usize },
    #[error("non-positive value {value} at index {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
    #[error("invalid window: t_min {t_min} must be < t_max {t_max}")]
    InvalidWindow { t_min: f64, t_max: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A single observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub v: f64,
}

impl Point {
    pub fn new(t: f64, v: f64) -> Self {
        Self { t, v }
    }
}

/// A named, validated time series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    unit: String,
    points: Vec<Point>,
}

impl TimeSeries {
    /// Builds a series after validating ordering and finiteness.
    pub fn new(
        name: impl Into<String>,
        unit: impl Into<String>,
        points: Vec<Point>,
    ) -> Result<Self, SeriesError> {
        for (i, p) in points.iter().enumerate() {
            if !p.t.is_finite() || !p.v.is_finite() {
                return Err(SeriesError::NonFiniteValue { index: i });
            }
            if i > 0 && points[i - 1].t >= p.t {
                return Err(SeriesError::NonMonotonicTime { line: i + 1 });
            }
        }
        Ok(Self {
            name: name.into(),
            unit: unit.into(),
            points,
        })
    }

    /// Internal constructor for derived series that may carry the `+inf`
    /// zero-growth sentinel (see [`TimeSeries::doubling_time_profile`]).
    fn from_parts_unchecked(name: String, unit: String, points: Vec<Point>) -> Self {
        Self { name, unit, points }
    }

    /// Parses the two-column CSV format: header `t,value`, one numeric pair
    /// per line, `\n` separators, dot decimal separator.
    ///
    /// The parsed series must be fit-ready (at least [`MIN_FIT_POINTS`] rows).
    pub fn from_csv(name: impl Into<String>, unit: impl Into<String>, csv: &str) -> Result<Self, SeriesError> {
        let mut lines = csv.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "t,value" => {}
            Some((_, header)) => {
                return Err(SeriesError::MalformedRow {
                    line: 1,
                    content: header.to_string(),
                })
            }
            None => {
                return Err(SeriesError::MalformedRow {
                    line: 1,
                    content: String::new(),
                })
            }
        }
        let mut points = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut cells = line.split(',');
            let (t_cell, v_cell) = match (cells.next(), cells.next(), cells.next()) {
                (Some(t), Some(v), None) => (t, v),
                _ => {
                    return Err(SeriesError::MalformedRow {
                        line: idx + 1,
                        content: line.to_string(),
                    })
                }
            };
            let parse = |cell: &str| -> Result<f64, SeriesError> {
                cell.trim().parse::<f64>().map_err(|_| SeriesError::MalformedRow {
                    line: idx + 1,
                    content: line.to_string(),
                })
            };
            let (t, v) = (parse(t_cell)?, parse(v_cell)?);
            if !t.is_finite() || !v.is_finite() {
                return Err(SeriesError::NonFiniteValue { index: points.len() });
            }
            if let Some(last) = points.last() {
                let last: &Point = last;
                if last.t >= t {
                    return Err(SeriesError::NonMonotonicTime { line: idx + 1 });
                }
            }
            points.push(Point::new(t, v));
        }
        if points.len() < MIN_FIT_POINTS {
            return Err(SeriesError::TooFewPoints {
                found: points.len(),
                required: MIN_FIT_POINTS,
            });
        }
        TimeSeries::new(name, unit, points)
    }

    /// Reads the CSV format from any byte stream (must be UTF-8).
    pub fn from_csv_reader(
        name: impl Into<String>,
        unit: impl Into<String>,
        mut reader: impl Read,
    ) -> Result<Self, SeriesError> {
        let mut buf = String::new();
        reader.read_to_string(&mut buf)?;
        Self::from_csv(name, unit, &buf)
    }

    /// Serializes back to the `t,value` CSV format. Round-trips exactly:
    /// `from_csv(to_csv(s))` equals `s` point for point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.t, p.v);
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.v)
    }

    /// Errors unless the series has at least `MIN_FIT_POINTS` points.
    pub fn ensure_fit_ready(&self) -> Result<(), SeriesError> {
        if self.points.len() < MIN_FIT_POINTS {
            return Err(SeriesError::TooFewPoints {
                found: self.points.len(),
                required: MIN_FIT_POINTS,
            });
        }
        Ok(())
    }

    /// Errors at the first non-positive value (log transforms need v > 0).
    pub fn ensure_positive(&self) -> Result<(), SeriesError> {
        for (i, p) in self.points.iter().enumerate() {
            if p.v <= 0.0 {
                return Err(SeriesError::NonPositiveValue {
                    index: i,
                    value: p.v,
                });
            }
        }
        Ok(())
    }

    /// Returns the sub-series with `t_min <= t <= t_max`, order preserved.
    /// The result may hold fewer than `MIN_FIT_POINTS` points (or none);
    /// use [`TimeSeries::slice_fit_ready`] when the result feeds a fit.
    pub fn slice(&self, t_min: f64, t_max: f64) -> Result<TimeSeries, SeriesError> {
        if t_min.partial_cmp(&t_max) != Some(std::cmp::Ordering::Less) {
            return Err(SeriesError::InvalidWindow { t_min, t_max });
        }
        let points: Vec<Point> = self
            .points
            .iter()
            .copied()
            .filter(|p| p.t >= t_min && p.t <= t_max)
            .collect();
        Ok(TimeSeries::from_parts_unchecked(
            self.name.clone(),
            self.unit.clone(),
            points,
        ))
    }

    /// Like [`TimeSeries::slice`] but errors with `TooFewPoints` when the
    /// window leaves fewer than `MIN_FIT_POINTS` points.
    pub fn slice_fit_ready(&self, t_min: f64, t_max: f64) -> Result<TimeSeries, SeriesError> {
        let sliced = self.slice(t_min, t_max)?;
        sliced.ensure_fit_ready()?;
        Ok(sliced)
    }

    /// Local doubling time per adjacent pair, reported at midpoint times:
    ///
    /// ```text
    /// tau_d = (t2 - t1) * ln 2 / ln(v2 / v1)
    /// ```
    ///
    /// A pair with `v2 == v1` has no finite doubling time and is reported as
    /// the `+inf` sentinel; callers doing monotonicity checks should skip it.
    /// Values must all be positive; at least two points are required.
    pub fn doubling_time_profile(&self) -> Result<TimeSeries, SeriesError> {
        self.ensure_positive()?;
        if self.points.len() < 2 {
            return Err(SeriesError::TooFewPoints {
                found: self.points.len(),
                required: 2,
            });
        }
        let ln2 = std::f64::consts::LN_2;
        let points = self
            .points
            .windows(2)
            .map(|w| {
                let (p1, p2) = (w[0], w[1]);
                let mid = 0.5 * (p1.t + p2.t);
                let tau = if p2.v == p1.v {
                    f64::INFINITY
                } else {
                    (p2.t - p1.t) * ln2 / (p2.v / p1.v).ln()
                };
                Point::new(mid, tau)
            })
            .collect();
        Ok(TimeSeries::from_parts_unchecked(
            format!("{} doubling time", self.name),
            "years".to_string(),
            points,
        ))
    }

    /// Orders of magnitude spanned by the values (log10 of max/min ratio).
    /// Used to pick the default fit space. Requires positive values.
    pub fn decades_spanned(&self) -> Result<f64, SeriesError> {
        self.ensure_positive()?;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for p in &self.points {
            min = min.min(p.v);
            max = max.max(p.v);
        }
        if self.points.is_empty() {
            return Ok(0.0);
        }
        Ok((max / min).log10())
    }
}

/// A bundled series together with its source citation.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub id: String,
    pub series: TimeSeries,
    pub provenance: String,
}
