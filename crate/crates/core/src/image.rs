use crate::error::{Error, Result};

/// Square raster over `[-R, R]^2`, sampled at pixel centres.
///
/// Row-major, row 0 at the top: column `c` maps to `x = -R + (c + 1/2) h`
/// and row `r` to `y = R - (r + 1/2) h`, with `h = 2R / n`. With odd `n`
/// the central pixel sits exactly on the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    radius: f64,
    n: usize,
    values: Vec<f64>,
}

impl Image {
    pub fn zeros(n: usize, radius: f64) -> Result<Self> {
        Image::from_values(n, radius, vec![0.0; n * n])
    }

    pub fn from_values(n: usize, radius: f64, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(
                "image",
                format!("size n = {n} must be >= 2"),
            ));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(
                "image",
                format!("extent R = {radius} must be > 0"),
            ));
        }
        if values.len() != n * n {
            return Err(Error::invalid(
                "image",
                format!("{} values for a {n}x{n} grid", values.len()),
            ));
        }
        Ok(Image { radius, n, values })
    }

    /// Fills each pixel from its centre coordinates.
    pub fn from_fn(n: usize, radius: f64, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        let mut img = Image::zeros(n, radius)?;
        let h = img.pixel_size();
        let fill = |(idx, v): (usize, &mut f64)| {
            let (row, col) = (idx / n, idx % n);
            let x = -radius + (col as f64 + 0.5) * h;
            let y = radius - (row as f64 + 0.5) * h;
            *v = f(x, y);
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            img.values.par_iter_mut().enumerate().for_each(fill);
        }
        #[cfg(not(feature = "parallel"))]
        img.values.iter_mut().enumerate().for_each(fill);
        Ok(img)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn pixel_size(&self) -> f64 {
        2.0 * self.radius / self.n as f64
    }

    pub fn x(&self, col: usize) -> f64 {
        -self.radius + (col as f64 + 0.5) * self.pixel_size()
    }

    pub fn y(&self, row: usize) -> f64 {
        self.radius - (row as f64 + 0.5) * self.pixel_size()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Iterates `(x, y, value)` over all pixels in storage order.
    pub fn pixels(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(idx, &v)| {
            let (row, col) = (idx / self.n, idx % self.n);
            (self.x(col), self.y(row), v)
        })
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
