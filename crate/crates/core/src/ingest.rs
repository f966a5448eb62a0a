//! Dataset ingestion and preprocessing.
//!
//! * UCR-archive TSV files: one series per row, integer label first, then the
//!   samples, tab separated. Train and test files are merged.
//! * Synthetic labelled datasets built from shape templates plus Gaussian noise.
//! * Savitzky-Golay smoothing and decile-proportion series from tense tags.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Dataset, TimeSeries};

struct ParsedFile {
    series: Vec<TimeSeries>,
    labels: Vec<i64>,
}

fn parse_label(field: &str) -> Option<i64> {
    if let Ok(v) = field.parse::<i64>() {
        return Some(v);
    }
    // some archive files spell integer labels as floats ("1.0")
    let v = field.parse::<f64>().ok()?;
    (v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15).then_some(v as i64)
}

fn parse_ucr_file(path: &Path, name: &str) -> Result<ParsedFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut series = Vec::new();
    let mut labels = Vec::new();
    let mut columns = None;
    let parse_err = |row: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        message,
    };

    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        match columns {
            None => columns = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(parse_err(
                    row,
                    format!("expected {c} columns, found {}", fields.len()),
                ))
            }
            Some(_) => {}
        }
        if fields.len() < 2 {
            return Err(parse_err(row, "row has a label but no samples".into()));
        }
        let label = parse_label(fields[0])
            .ok_or_else(|| parse_err(row, format!("label {:?} is not an integer", fields[0])))?;
        let mut values = Vec::with_capacity(fields.len() - 1);
        let mut padded = false;
        for (col, field) in fields[1..].iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                parse_err(row, format!("sample {} ({field:?}) is not a number", col + 1))
            })?;
            if v.is_nan() {
                padded = true;
            } else if !v.is_finite() {
                return Err(parse_err(row, format!("sample {} is not finite", col + 1)));
            }
            values.push(v);
        }
        if padded {
            return Err(Error::UnsupportedDataset {
                name: name.to_string(),
                reason: format!(
                    "row {row} of {} is NaN-padded (variable-length series)",
                    path.display()
                ),
            });
        }
        series.push(TimeSeries::new(values)?);
        labels.push(label);
    }
    Ok(ParsedFile { series, labels })
}

fn dataset_name(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    stem.strip_suffix("_TRAIN")
        .or_else(|| stem.strip_suffix("_TEST"))
        .unwrap_or(&stem)
        .to_string()
}

/// Loads a UCR-format train file and optional test file into one dataset.
pub fn load_ucr(train: &Path, test: Option<&Path>) -> Result<Dataset> {
    let name = dataset_name(train);
    let mut parsed = parse_ucr_file(train, &name)?;
    if let Some(test) = test {
        let more = parse_ucr_file(test, &name)?;
        if let (Some(a), Some(b)) = (parsed.series.first(), more.series.first()) {
            if a.len() != b.len() {
                return Err(Error::UnsupportedDataset {
                    name,
                    reason: format!("train length {} differs from test length {}", a.len(), b.len()),
                });
            }
        }
        parsed.series.extend(more.series);
        parsed.labels.extend(more.labels);
    }
    if parsed.series.is_empty() {
        return Err(Error::UnsupportedDataset {
            name,
            reason: "no series found".into(),
        });
    }
    Dataset::new(name, parsed.series, Some(parsed.labels))
}

/// Train/test files for a dataset given as a UCR directory, a `_TRAIN.tsv`
/// file (its `_TEST.tsv` sibling is picked up when present) or any TSV file.
pub fn resolve_ucr_files(path: &Path) -> Result<(PathBuf, Option<PathBuf>)> {
    if path.is_dir() {
        let mut train = None;
        let mut test = None;
        let entries = fs::read_dir(path).map_err(|e| Error::io(path, e))?;
        let mut files: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        for file in files {
            let name = file.file_name().unwrap_or_default().to_string_lossy().into_owned();
            if name.ends_with("_TRAIN.tsv") && train.is_none() {
                train = Some(file);
            } else if name.ends_with("_TEST.tsv") && test.is_none() {
                test = Some(file);
            }
        }
        return match (train, test) {
            (Some(train), test) => Ok((train, test)),
            (None, Some(test)) => Ok((test, None)),
            (None, None) => Err(Error::UnsupportedDataset {
                name: path.display().to_string(),
                reason: "directory has no *_TRAIN.tsv or *_TEST.tsv file".into(),
            }),
        };
    }
    let file_name = path.file_name().unwrap_or_default().to_string_lossy();
    if let Some(prefix) = file_name.strip_suffix("_TRAIN.tsv") {
        let sibling = path.with_file_name(format!("{prefix}_TEST.tsv"));
        if sibling.is_file() {
            return Ok((path.to_path_buf(), Some(sibling)));
        }
    }
    Ok((path.to_path_buf(), None))
}

/// [`load_ucr`] on whatever [`resolve_ucr_files`] finds at `path`.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let (train, test) = resolve_ucr_files(path)?;
    load_ucr(&train, test.as_deref())
}

/// Writes a dataset in UCR TSV format. Unlabelled datasets get label 0.
pub fn write_tsv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (i, s) in dataset.series().iter().enumerate() {
        let label = dataset.labels().map_or(0, |l| l[i]);
        write!(out, "{label}").expect("writing to a String cannot fail");
        for v in s.iter() {
            write!(out, "\t{v}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Rescales a series to zero mean and unit (population) variance; a constant
/// series becomes all zeros.
pub fn z_normalize(s: &TimeSeries) -> TimeSeries {
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    let values = if std > 0.0 {
        s.iter().map(|v| (v - mean) / std).collect()
    } else {
        vec![0.0; s.len()]
    };
    TimeSeries::new(values).expect("normalized samples stay finite")
}

/// Template shapes for synthetic data, defined on `t` in `[0, 1]` with values in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Sine,
    Ramp,
    Square,
    GaussianBump,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Sine, Shape::Ramp, Shape::Square, Shape::GaussianBump];

    fn value(self, t: f64) -> f64 {
        match self {
            Shape::Sine => (2.0 * std::f64::consts::PI * t).sin(),
            Shape::Ramp => 2.0 * t - 1.0,
            Shape::Square => {
                if t < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            Shape::GaussianBump => 2.0 * (-(t - 0.5).powi(2) / (2.0 * 0.1 * 0.1)).exp() - 1.0,
        }
    }

    /// The noiseless template sampled at `m` evenly spaced points.
    pub fn template(self, m: usize) -> Vec<f64> {
        let denom = m.saturating_sub(1).max(1) as f64;
        (0..m).map(|i| self.value(i as f64 / denom)).collect()
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "sine" => Ok(Shape::Sine),
            "ramp" => Ok(Shape::Ramp),
            "square" => Ok(Shape::Square),
            "gaussian_bump" | "bump" => Ok(Shape::GaussianBump),
            other => Err(Error::InvalidConfig(format!("unknown shape {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_per_cluster: usize,
    pub length: usize,
    pub shapes: Vec<Shape>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Smallest root-mean-square distance between two distinct templates;
    /// `None` with fewer than two shapes.
    pub fn template_separation(&self) -> Option<f64> {
        let templates: Vec<Vec<f64>> = self.shapes.iter().map(|s| s.template(self.length)).collect();
        let mut best: Option<f64> = None;
        for (i, a) in templates.iter().enumerate() {
            for b in &templates[i + 1..] {
                let rms = (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
                    / self.length as f64)
                    .sqrt();
                best = Some(best.map_or(rms, |v: f64| v.min(rms)));
            }
        }
        best
    }
}

/// `n_per_cluster` noisy copies of each template, labelled by shape position.
///
/// Series are interleaved round-robin over the shapes (label sequence
/// `0, 1, .., k-1, 0, 1, ..`) so that no cluster occupies one contiguous block.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.shapes.is_empty() {
        return Err(Error::InvalidConfig("at least one shape is required".into()));
    }
    if spec.length == 0 {
        return Err(Error::EmptySeries);
    }
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|_| {
        Error::InvalidConfig(format!(
            "noise sigma {} must be finite and non-negative",
            spec.noise_sigma
        ))
    })?;
    let templates: Vec<Vec<f64>> = spec.shapes.iter().map(|s| s.template(spec.length)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut series = Vec::with_capacity(spec.n_per_cluster * templates.len());
    let mut labels = Vec::with_capacity(series.capacity());
    for _ in 0..spec.n_per_cluster {
        for (label, template) in templates.iter().enumerate() {
            let values = template
                .iter()
                .map(|&v| {
                    if spec.noise_sigma > 0.0 {
                        v + noise.sample(&mut rng)
                    } else {
                        v
                    }
                })
                .collect();
            series.push(TimeSeries::new(values)?);
            labels.push(label as i64);
        }
    }
    let names: Vec<String> = spec
        .shapes
        .iter()
        .map(|s| format!("{s:?}").to_lowercase())
        .collect();
    Dataset::new(
        format!("synthetic-{}", names.join("-")),
        series,
        Some(labels),
    )
}

/// Smooths by replacing each sample with the value of a least-squares
/// polynomial of degree `order` fitted over the centred `window`. The first
/// and last `window / 2` samples are evaluated on the polynomial fitted to
/// the first and last full window.
pub fn savitzky_golay(s: &TimeSeries, window: usize, order: usize) -> Result<TimeSeries> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::Filter(format!("window {window} must be odd and positive")));
    }
    if order >= window {
        return Err(Error::Filter(format!(
            "polynomial order {order} must be below the window {window}"
        )));
    }
    let m = s.len();
    if m < window {
        return Err(Error::Filter(format!(
            "series of length {m} is shorter than the window {window}"
        )));
    }
    let hat = projection_matrix(window, order)?;
    let half = window / 2;
    let values = (0..m)
        .map(|i| {
            let (start, row) = if i < half {
                (0, i)
            } else if i + half >= m {
                (m - window, i - (m - window))
            } else {
                (i - half, half)
            };
            (0..window).map(|k| hat[(row, k)] * s[start + k]).sum()
        })
        .collect();
    TimeSeries::new(values)
}

/// `V (V^T V)^-1 V^T` for the Vandermonde matrix of a centred window; row `j`
/// holds the weights that evaluate the fitted polynomial at window position `j`.
fn projection_matrix(window: usize, order: usize) -> Result<DMatrix<f64>> {
    let half = (window / 2).max(1) as f64;
    let vandermonde = DMatrix::from_fn(window, order + 1, |r, c| {
        ((r as f64 - (window / 2) as f64) / half).powi(c as i32)
    });
    let normal = vandermonde.transpose() * &vandermonde;
    let inverse = normal
        .try_inverse()
        .ok_or_else(|| Error::Filter("singular least-squares system".into()))?;
    Ok(&vandermonde * inverse * vandermonde.transpose())
}

/// Temporal reference of a tagged token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tense {
    Past,
    Present,
    Future,
}

impl FromStr for Tense {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "past" => Ok(Tense::Past),
            "present" => Ok(Tense::Present),
            "future" => Ok(Tense::Future),
            other => Err(format!("unknown tense tag {other:?}")),
        }
    }
}

/// Value of a decile without past or future tags.
pub const NEUTRAL_DECILE: f64 = 0.5;

/// Share of future tags among past and future tags in each tenth of the sequence.
///
/// Deciles are contiguous; when the length is not a multiple of ten the
/// leading deciles hold one extra tag each.
pub fn decile_series(tags: &[Tense]) -> Result<TimeSeries> {
    if tags.is_empty() {
        return Err(Error::EmptySeries);
    }
    let base = tags.len() / 10;
    let extra = tags.len() % 10;
    let mut start = 0;
    let values = (0..10)
        .map(|d| {
            let size = base + usize::from(d < extra);
            let chunk = &tags[start..start + size];
            start += size;
            let future = chunk.iter().filter(|&&t| t == Tense::Future).count();
            let past = chunk.iter().filter(|&&t| t == Tense::Past).count();
            if future + past == 0 {
                NEUTRAL_DECILE
            } else {
                future as f64 / (future + past) as f64
            }
        })
        .collect();
    TimeSeries::new(values)
}

/// Reads a tag file: one `past`/`present`/`future` token per line, any case.
pub fn read_tags(path: &Path) -> Result<Vec<Tense>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            line.parse().map_err(|message| Error::Parse {
                path: path.to_path_buf(),
                row: i + 1,
                message,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{dtw, WindowSpec};

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn loads_minimal_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "Tiny_TRAIN.tsv", "1\t0.0\t1.0\n2\t1.0\t0.0\n");
        let d = load_ucr(&p, None).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.labels().unwrap(), &[1, 2]);
        assert_eq!(d.series()[1].values(), &[1.0, 0.0]);
        assert_eq!(d.name(), "Tiny");
    }

    #[test]
    fn short_row_is_reported_with_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "Bad_TRAIN.tsv", "1\t0.0\t1.0\n2\t1.0\n3\t0.5\t0.5\n");
        match load_ucr(&p, None).unwrap_err() {
            Error::Parse { row, .. } => assert_eq!(row, 2),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn non_numeric_sample_and_label_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "X_TRAIN.tsv", "1\t0.0\tabc\n");
        assert!(matches!(load_ucr(&p, None), Err(Error::Parse { row: 1, .. })));
        let p = write(dir.path(), "Y_TRAIN.tsv", "1\t0.0\n1.5\t2.0\n");
        assert!(matches!(load_ucr(&p, None), Err(Error::Parse { row: 2, .. })));
        let p = write(dir.path(), "Z_TRAIN.tsv", "-1.0\t0.0\n");
        assert_eq!(load_ucr(&p, None).unwrap().labels().unwrap(), &[-1]);
    }

    #[test]
    fn variable_length_files_are_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "V_TRAIN.tsv", "1\t0.0\t1.0\t2.0\n2\t1.0\t0.5\tNaN\n");
        assert!(matches!(load_ucr(&p, None), Err(Error::UnsupportedDataset { .. })));

        let train = write(dir.path(), "W_TRAIN.tsv", "1\t0.0\t1.0\n");
        let test = write(dir.path(), "W_TEST.tsv", "1\t0.0\t1.0\t3.0\n");
        assert!(matches!(
            load_ucr(&train, Some(&test)),
            Err(Error::UnsupportedDataset { .. })
        ));
    }

    #[test]
    fn merges_train_and_test_from_directory() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("Pair");
        fs::create_dir(&sub).unwrap();
        write(&sub, "Pair_TRAIN.tsv", "1\t0\t1\n");
        write(&sub, "Pair_TEST.tsv", "2\t1\t0\n3\t2\t2\n");
        let d = load_dataset(&sub).unwrap();
        assert_eq!(d.labels().unwrap(), &[1, 2, 3]);
        let via_file = load_dataset(&sub.join("Pair_TRAIN.tsv")).unwrap();
        assert_eq!(d, via_file);
    }

    #[test]
    fn write_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let d = generate_synthetic(&SyntheticSpec {
            n_per_cluster: 4,
            length: 17,
            shapes: vec![Shape::Sine, Shape::Square],
            noise_sigma: 0.37,
            seed: 3,
        })
        .unwrap();
        let p = dir.path().join("synthetic-sine-square_TRAIN.tsv");
        write_tsv(&d, &p).unwrap();
        assert_eq!(load_ucr(&p, None).unwrap(), d);
    }

    #[test]
    fn noiseless_synthetic_series_equal_their_template() {
        let spec = SyntheticSpec {
            n_per_cluster: 3,
            length: 20,
            shapes: Shape::ALL.to_vec(),
            noise_sigma: 0.0,
            seed: 1,
        };
        let d = generate_synthetic(&spec).unwrap();
        for (s, &label) in d.series().iter().zip(d.labels().unwrap()) {
            assert_eq!(s.values(), Shape::ALL[label as usize].template(20).as_slice());
        }
    }

    #[test]
    fn synthetic_counts_and_balance() {
        let spec = SyntheticSpec {
            n_per_cluster: 20,
            length: 32,
            shapes: vec![Shape::Sine, Shape::Ramp, Shape::GaussianBump],
            noise_sigma: 0.1,
            seed: 9,
        };
        let d = generate_synthetic(&spec).unwrap();
        assert_eq!(d.len(), 60);
        for label in 0..3 {
            assert_eq!(d.labels().unwrap().iter().filter(|&&l| l == label).count(), 20);
        }
        assert_eq!(d, generate_synthetic(&spec).unwrap());
        assert_ne!(d, generate_synthetic(&SyntheticSpec { seed: 10, ..spec }).unwrap());
    }

    #[test]
    fn dtw_one_nearest_neighbour_recovers_labels() {
        let spec = SyntheticSpec {
            n_per_cluster: 10,
            length: 48,
            shapes: Shape::ALL.to_vec(),
            noise_sigma: 0.05,
            seed: 21,
        };
        let sep = spec.template_separation().unwrap();
        assert!(spec.noise_sigma < 0.2 * sep);
        let d = generate_synthetic(&spec).unwrap();
        let labels = d.labels().unwrap();
        let w = WindowSpec::Fraction(0.1);
        for (i, q) in d.series().iter().enumerate() {
            let nearest = (0..d.len())
                .filter(|&j| j != i)
                .min_by(|&a, &b| {
                    let da = dtw(q, &d.series()[a], &w).unwrap();
                    let db = dtw(q, &d.series()[b], &w).unwrap();
                    da.total_cmp(&db)
                })
                .unwrap();
            assert_eq!(labels[nearest], labels[i], "series {i}");
        }
    }

    #[test]
    fn savitzky_golay_reproduces_quadratics_and_constants() {
        let quad: Vec<f64> = (0..30).map(|i| 0.5 - 0.3 * i as f64 + 0.02 * (i * i) as f64).collect();
        let s = TimeSeries::new(quad.clone()).unwrap();
        let out = savitzky_golay(&s, 9, 2).unwrap();
        assert_eq!(out.len(), s.len());
        for (a, b) in out.iter().zip(&quad) {
            assert!((a - b).abs() < 1e-9);
        }
        let flat = TimeSeries::new(vec![4.2; 12]).unwrap();
        for (a, b) in savitzky_golay(&flat, 9, 2).unwrap().iter().zip(flat.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn savitzky_golay_reduces_noise() {
        let m = 200;
        let clean: Vec<f64> = (0..m).map(|i| (i as f64 * 0.08).sin()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let noisy: Vec<f64> = clean.iter().map(|v| v + noise.sample(&mut rng)).collect();
        let smooth = savitzky_golay(&TimeSeries::new(noisy.clone()).unwrap(), 9, 2).unwrap();
        let mse = |x: &[f64]| x.iter().zip(&clean).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / m as f64;
        assert!(mse(&smooth) < mse(&noisy));
    }

    #[test]
    fn savitzky_golay_argument_errors() {
        let s = TimeSeries::new(vec![0.0; 8]).unwrap();
        assert!(savitzky_golay(&s, 9, 2).is_err());
        assert!(savitzky_golay(&s, 4, 2).is_err());
        assert!(savitzky_golay(&s, 3, 3).is_err());
        assert!(savitzky_golay(&s, 0, 0).is_err());
    }

    #[test]
    fn decile_examples() {
        use Tense::*;
        assert_eq!(decile_series(&[Future; 23]).unwrap().values(), &[1.0; 10]);
        // fewer than ten tags leaves trailing deciles empty
        assert_eq!(
            decile_series(&[Future; 7]).unwrap().values(),
            &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5]
        );
        assert_eq!(decile_series(&[Present; 30]).unwrap().values(), &[0.5; 10]);
        let mut tags = vec![Past; 10];
        tags.extend([Future; 10]);
        assert_eq!(
            decile_series(&tags).unwrap().values(),
            &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0]
        );
        // 13 tags: three leading deciles of two, seven of one
        let tags = [Future, Past, Past, Past, Future, Future, Past, Future, Present, Future, Past, Past, Future];
        assert_eq!(
            decile_series(&tags).unwrap().values(),
            &[0.5, 0.0, 1.0, 0.0, 1.0, 0.5, 1.0, 0.0, 0.0, 1.0]
        );
        assert!(decile_series(&[]).is_err());
    }

    #[test]
    fn tag_files_parse_case_insensitively() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "tags.txt", "PAST\nfuture\n\n Present \n");
        assert_eq!(read_tags(&p).unwrap(), vec![Tense::Past, Tense::Future, Tense::Present]);
        let bad = write(dir.path(), "bad.txt", "past\nsoon\n");
        assert!(matches!(read_tags(&bad), Err(Error::Parse { row: 2, .. })));
    }

    #[test]
    fn z_normalize_moments() {
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let z = z_normalize(&s);
        assert!(z.iter().sum::<f64>().abs() < 1e-12);
        assert!((z.iter().map(|v| v * v).sum::<f64>() / 4.0 - 1.0).abs() < 1e-12);
        assert_eq!(z_normalize(&TimeSeries::new(vec![3.0; 5]).unwrap()).values(), &[0.0; 5]);
    }
}
