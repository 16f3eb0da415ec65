//! On-disk grid of ζ(σ + it) samples for signal sampling.
//!
//! ```text
//! # zeta-cache v1 sigma=0.5 t0=0 dt=0.05 n=7601
//! 0.0000000000000000e0,-1.4603545088095868e0,0.0000000000000000e0
//! ...
//! ```

use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::zeta::{self, ZetaError};

const MAGIC: &str = "# zeta-cache v1";

/// Points in the Lagrange interpolation stencil.
pub const STENCIL: usize = 8;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache file {path}: {detail}")]
    IncompatibleCache { path: String, detail: String },
    #[error("malformed cache file {path} line {line}: {detail}")]
    Malformed { path: String, line: usize, detail: String },
    #[error("invalid cache request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheGrid {
    pub sigma: f64,
    pub t_start: f64,
    pub dt: f64,
    pub count: usize,
    pub samples: Vec<Complex64>,
}

/// Whether [`cache_warm`] read the file or computed the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOrigin {
    Loaded,
    Computed,
}

impl CacheGrid {
    /// Evaluates ζ on the grid.
    pub fn compute(sigma: f64, t_start: f64, dt: f64, count: usize) -> Result<Self, CacheError> {
        check_request(dt, count)?;
        let samples = (0..count)
            .into_par_iter()
            .map(|i| zeta::zeta(Complex64::new(sigma, t_start + dt * i as f64)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            sigma,
            t_start,
            dt,
            count,
            samples,
        })
    }

    pub fn t_at(&self, i: usize) -> f64 {
        self.t_start + self.dt * i as f64
    }

    pub fn t_end(&self) -> f64 {
        self.t_at(self.count - 1)
    }

    pub fn covers(&self, t: f64) -> bool {
        self.count >= STENCIL && t >= self.t_start && t <= self.t_end()
    }

    /// 8-point Lagrange interpolation of ζ(σ + it); `None` outside the grid.
    pub fn interpolate(&self, t: f64) -> Option<Complex64> {
        if !self.covers(t) {
            return None;
        }
        let x = (t - self.t_start) / self.dt;
        let base = (x.floor() as isize - (STENCIL as isize / 2 - 1)).clamp(0, (self.count - STENCIL) as isize) as usize;
        let u = x - base as f64;
        if let Some(j) = (0..STENCIL).find(|&j| u == j as f64) {
            return Some(self.samples[base + j]);
        }
        // equispaced barycentric weights: (−1)^j C(n−1, j)
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        let mut binom = 1.0;
        for j in 0..STENCIL {
            let w = if j % 2 == 0 { binom } else { -binom } / (u - j as f64);
            num += self.samples[base + j] * w;
            den += w;
            binom = binom * (STENCIL - 1 - j) as f64 / (j + 1) as f64;
        }
        Some(num / den)
    }

    fn header(&self) -> String {
        format!(
            "{MAGIC} sigma={} t0={} dt={} n={}",
            self.sigma, self.t_start, self.dt, self.count
        )
    }

    /// Writes the grid to `path` through a temporary file and a rename.
    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
        {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            writeln!(w, "{}", self.header())?;
            for (i, z) in self.samples.iter().enumerate() {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", self.t_at(i), z.re, z.im)?;
            }
            w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CacheError> {
        let shown = path.display().to_string();
        let malformed = |line: usize, detail: String| CacheError::Malformed {
            path: shown.clone(),
            line,
            detail,
        };
        let mut lines = io::BufReader::new(fs::File::open(path)?).lines();
        let header = lines.next().ok_or_else(|| malformed(1, "empty file".into()))??;
        let (sigma, t_start, dt, count) = parse_header(&header).map_err(|d| malformed(1, d))?;
        let mut samples = Vec::with_capacity(count);
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(malformed(k + 2, format!("expected 3 columns, got {}", cols.len())));
            }
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| malformed(k + 2, e.to_string()));
            samples.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
        }
        if samples.len() != count {
            return Err(malformed(count + 1, format!("header promises {count} rows, found {}", samples.len())));
        }
        Ok(Self {
            sigma,
            t_start,
            dt,
            count,
            samples,
        })
    }
}

fn check_request(dt: f64, count: usize) -> Result<(), CacheError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(CacheError::InvalidRequest(format!("dt must be positive, got {dt}")));
    }
    if count == 0 {
        return Err(CacheError::InvalidRequest("count must be at least 1".into()));
    }
    Ok(())
}

fn parse_header(line: &str) -> Result<(f64, f64, f64, usize), String> {
    let rest = line
        .strip_prefix(MAGIC)
        .ok_or_else(|| format!("missing `{MAGIC}` header"))?;
    let (mut sigma, mut t0, mut dt, mut n) = (None, None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| format!("bad header field `{field}`"))?;
        let real = || value.parse::<f64>().map_err(|e| format!("{key}: {e}"));
        match key {
            "sigma" => sigma = Some(real()?),
            "t0" => t0 = Some(real()?),
            "dt" => dt = Some(real()?),
            "n" => n = Some(value.parse::<usize>().map_err(|e| format!("n: {e}"))?),
            other => return Err(format!("unknown header key `{other}`")),
        }
    }
    match (sigma, t0, dt, n) {
        (Some(s), Some(t), Some(d), Some(c)) => Ok((s, t, d, c)),
        _ => Err("header needs sigma, t0, dt and n".into()),
    }
}

/// Loads the grid at `path` if its header matches the request, otherwise
/// computes and persists it. A header that disagrees with the request is an
/// error rather than a silent overwrite.
pub fn cache_warm(
    sigma: f64,
    t_start: f64,
    dt: f64,
    count: usize,
    path: &Path,
) -> Result<(CacheGrid, CacheOrigin), CacheError> {
    check_request(dt, count)?;
    if path.exists() {
        let grid = CacheGrid::load(path)?;
        let mut diffs = Vec::new();
        if grid.sigma != sigma {
            diffs.push(format!("sigma {} != {sigma}", grid.sigma));
        }
        if grid.t_start != t_start {
            diffs.push(format!("t0 {} != {t_start}", grid.t_start));
        }
        if grid.dt != dt {
            diffs.push(format!("dt {} != {dt}", grid.dt));
        }
        if grid.count != count {
            diffs.push(format!("n {} != {count}", grid.count));
        }
        if !diffs.is_empty() {
            return Err(CacheError::IncompatibleCache {
                path: path.display().to_string(),
                detail: diffs.join(", "),
            });
        }
        return Ok((grid, CacheOrigin::Loaded));
    }
    let grid = CacheGrid::compute(sigma, t_start, dt, count)?;
    grid.save(path)?;
    Ok((grid, CacheOrigin::Computed))
}
