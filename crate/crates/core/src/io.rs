//! On-disk formats.
//!
//! Grids are raw little-endian binary64, row-major, in `<base>.bin` with a
//! JSON sidecar `<base>.json`. Fan sinograms have `tau` rows and `alpha`
//! columns, parallel sinograms `sigma` rows and `eta` columns, images run
//! top row first. Images also get a 16-bit PGM `<base>.pgm` whose window is
//! recorded in the sidecar. Each command writes `<base>.manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::forward::{FanSinogram, ParallelSinogram};
use crate::geometry::FanGeometry;
use crate::image::Image;

/// Sidecar describing a `.bin` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Sidecar {
    Fan {
        rows: usize,
        cols: usize,
        geometry: FanGeometry,
    },
    Parallel {
        rows: usize,
        cols: usize,
        #[serde(rename = "R")]
        radius: f64,
    },
    Image {
        rows: usize,
        cols: usize,
        #[serde(rename = "R")]
        radius: f64,
        window: [f64; 2],
    },
}

impl Sidecar {
    fn shape(&self) -> (usize, usize) {
        match *self {
            Sidecar::Fan { rows, cols, .. }
            | Sidecar::Parallel { rows, cols, .. }
            | Sidecar::Image { rows, cols, .. } => (rows, cols),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Sidecar::Fan { .. } => "fan",
            Sidecar::Parallel { .. } => "parallel",
            Sidecar::Image { .. } => "image",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Sinogram {
    Fan(FanSinogram),
    Parallel(ParallelSinogram),
}

impl Sinogram {
    pub fn kind(&self) -> &'static str {
        match self {
            Sinogram::Fan(_) => "fan",
            Sinogram::Parallel(_) => "parallel",
        }
    }
}

/// Per-run record written next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub config: Value,
    pub duration_seconds: f64,
    pub warnings: Vec<String>,
}

/// Strips a `.bin`, `.json`, `.pgm` or `.manifest.json` suffix, so any of
/// the files of a set names the set.
pub fn base_path(path: &Path) -> PathBuf {
    let s = path.to_string_lossy();
    for suffix in [".manifest.json", ".bin", ".json", ".pgm"] {
        if let Some(stem) = s.strip_suffix(suffix) {
            if !stem.is_empty() {
                return PathBuf::from(stem);
            }
        }
    }
    path.to_path_buf()
}

pub fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
        }
        _ => Ok(()),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn write_f64_le(path: &Path, values: &[f64]) -> Result<()> {
    ensure_parent(path)?;
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

pub fn read_f64_le(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    if bytes.len() != expected * 8 {
        return Err(Error::Data(format!(
            "{}: {} bytes, sidecar promises {expected} values ({} bytes)",
            path.display(),
            bytes.len(),
            expected * 8
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

fn write_grid(base: &Path, sidecar: &Sidecar, values: &[f64]) -> Result<Vec<PathBuf>> {
    let bin = with_suffix(base, ".bin");
    let json = with_suffix(base, ".json");
    write_f64_le(&bin, values)?;
    write_json(&json, sidecar)?;
    Ok(vec![bin, json])
}

fn read_grid(path: &Path) -> Result<(Sidecar, Vec<f64>)> {
    let base = base_path(path);
    let sidecar: Sidecar = read_json(&with_suffix(&base, ".json"))?;
    let (rows, cols) = sidecar.shape();
    let values = read_f64_le(&with_suffix(&base, ".bin"), rows * cols)?;
    Ok((sidecar, values))
}

/// Writes `<base>.bin` and `<base>.json`; returns the paths written.
pub fn write_fan_sinogram(base: &Path, sino: &FanSinogram) -> Result<Vec<PathBuf>> {
    let g = *sino.geometry();
    let sidecar = Sidecar::Fan {
        rows: g.n_tau(),
        cols: g.n_alpha(),
        geometry: g,
    };
    write_grid(base, &sidecar, sino.values())
}

pub fn write_parallel_sinogram(base: &Path, sino: &ParallelSinogram) -> Result<Vec<PathBuf>> {
    let sidecar = Sidecar::Parallel {
        rows: sino.n_sigma(),
        cols: sino.n_eta(),
        radius: sino.radius(),
    };
    write_grid(base, &sidecar, sino.values())
}

pub fn write_sinogram(base: &Path, sino: &Sinogram) -> Result<Vec<PathBuf>> {
    match sino {
        Sinogram::Fan(s) => write_fan_sinogram(base, s),
        Sinogram::Parallel(s) => write_parallel_sinogram(base, s),
    }
}

pub fn read_sinogram(path: &Path) -> Result<Sinogram> {
    match read_grid(path)? {
        (
            Sidecar::Fan {
                rows,
                cols,
                geometry,
            },
            values,
        ) => {
            if (rows, cols) != (geometry.n_tau(), geometry.n_alpha()) {
                return Err(Error::Data(format!(
                    "fan sidecar shape {rows}x{cols} disagrees with geometry counts n_tau = {}, n_alpha = {}",
                    geometry.n_tau(),
                    geometry.n_alpha()
                )));
            }
            Ok(Sinogram::Fan(FanSinogram::from_values(geometry, values)?))
        }
        (Sidecar::Parallel { rows, cols, radius }, values) => Ok(Sinogram::Parallel(
            ParallelSinogram::from_values(radius, cols, rows, values)?,
        )),
        (other, _) => Err(Error::Usage(format!(
            "expected a sinogram, found kind \"{}\"",
            other.kind()
        ))),
    }
}

/// Default display window: `[0, max]`, or `[0, 1]` for an image without
/// positive values.
pub fn default_window(img: &Image) -> [f64; 2] {
    let max = img.max_value();
    [0.0, if max > 0.0 { max } else { 1.0 }]
}

/// Writes `<base>.bin`, `<base>.json` and `<base>.pgm`.
pub fn write_image(base: &Path, img: &Image, window: Option<[f64; 2]>) -> Result<Vec<PathBuf>> {
    let window = window.unwrap_or_else(|| default_window(img));
    let sidecar = Sidecar::Image {
        rows: img.n(),
        cols: img.n(),
        radius: img.radius(),
        window,
    };
    let mut paths = write_grid(base, &sidecar, img.values())?;
    let pgm = with_suffix(base, ".pgm");
    write_pgm16(&pgm, img, window)?;
    paths.push(pgm);
    Ok(paths)
}

pub fn read_image(path: &Path) -> Result<(Image, [f64; 2])> {
    match read_grid(path)? {
        (
            Sidecar::Image {
                rows,
                cols,
                radius,
                window,
            },
            values,
        ) => {
            if rows != cols {
                return Err(Error::Data(format!(
                    "image must be square, sidecar says {rows}x{cols}"
                )));
            }
            Ok((Image::from_values(rows, radius, values)?, window))
        }
        (other, _) => Err(Error::Usage(format!(
            "expected an image, found kind \"{}\"",
            other.kind()
        ))),
    }
}

/// Maps `[lo, hi]` linearly onto `0..=65535`, clamping outside values.
pub fn pgm_level(v: f64, window: [f64; 2]) -> u16 {
    let [lo, hi] = window;
    let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    if t.is_nan() {
        0
    } else {
        (t * 65535.0).round() as u16
    }
}

/// Binary PGM (P5), maxval 65535, big-endian samples.
pub fn write_pgm16(path: &Path, img: &Image, window: [f64; 2]) -> Result<()> {
    if !(window[1] > window[0]) || !window.iter().all(|w| w.is_finite()) {
        return Err(Error::Usage(format!(
            "window [{}, {}] must be finite with lo < hi",
            window[0], window[1]
        )));
    }
    ensure_parent(path)?;
    let n = img.n();
    let mut bytes = format!("P5\n{n} {n}\n65535\n").into_bytes();
    for &v in img.values() {
        bytes.extend_from_slice(&pgm_level(v, window).to_be_bytes());
    }
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

pub fn write_manifest(base: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let path = with_suffix(base, ".manifest.json");
    write_json(&path, manifest)?;
    Ok(path)
}
