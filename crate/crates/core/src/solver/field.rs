use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform x-grid, output times and the time step used for source integrals and
/// the reference solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub times: Vec<f64>,
    pub dt: f64,
}

impl SpaceTimeGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, times: Vec<f64>, dt: f64) -> Result<Self> {
        let grid = Self {
            x_min,
            x_max,
            nx,
            times,
            dt,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 8 {
            return Err(Error::InvalidParameter(format!("nx = {} must be at least 8", self.nx)));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(Error::InvalidParameter(format!(
                "x-range [{}, {}] must be finite and increasing",
                self.x_min, self.x_max
            )));
        }
        if self.times.is_empty() {
            return Err(Error::InvalidParameter("no output times".into()));
        }
        if !(self.times[0] > 0.0)
            || self.times.windows(2).any(|w| !(w[1] > w[0]))
            || !self.times.iter().all(|t| t.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "times must be positive, finite and strictly increasing (got {:?})",
                self.times
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }
}

/// Samples of N(x, t), one row per output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: SpaceTimeGrid,
    pub values: Vec<Vec<Complex64>>,
}

impl Field {
    pub fn zeros(grid: &SpaceTimeGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![vec![Complex64::new(0.0, 0.0); grid.nx]; grid.times.len()],
        }
    }

    /// Rows `t,x,re,im` in scientific notation with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,x,re,im")?;
        let xs = self.grid.xs();
        for (t, row) in self.grid.times.iter().zip(&self.values) {
            for (x, v) in xs.iter().zip(row) {
                writeln!(out, "{t:.16e},{x:.16e},{:.16e},{:.16e}", v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Reads what [`Field::write_csv`] writes. The time step is not stored and
    /// comes back as NaN.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))??;
        if header.trim() != "t,x,re,im" {
            return Err(Error::Parse(format!(
                "unexpected header '{header}' (expected t,x,re,im)"
            )));
        }
        let mut times: Vec<f64> = Vec::new();
        let mut xs: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<Complex64>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let nums: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
            if nums.len() != 4 {
                return Err(Error::Parse(format!(
                    "line {}: expected 4 columns, got {}",
                    lineno + 2,
                    nums.len()
                )));
            }
            let (t, x, v) = (nums[0], nums[1], Complex64::new(nums[2], nums[3]));
            if times.last() != Some(&t) {
                times.push(t);
                values.push(Vec::new());
            }
            let row = values.last_mut().expect("row pushed above");
            if times.len() == 1 {
                xs.push(x);
            } else if xs.get(row.len()) != Some(&x) {
                return Err(Error::Parse(format!(
                    "line {}: x = {x} breaks the grid of the first time",
                    lineno + 2
                )));
            }
            row.push(v);
        }
        if values.iter().any(|r| r.len() != xs.len()) {
            return Err(Error::Parse("time slices have different lengths".into()));
        }
        if xs.len() < 2 {
            return Err(Error::Parse("field needs at least two x-nodes".into()));
        }
        let grid = SpaceTimeGrid {
            x_min: xs[0],
            x_max: *xs.last().expect("checked length"),
            nx: xs.len(),
            times,
            dt: f64::NAN,
        };
        Ok(Self { grid, values })
    }
}

/// Residual norms of `a` against the reference `b` over all samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub l2: f64,
    pub relative_l2: f64,
    pub max_abs: f64,
}

pub fn compare_fields(a: &Field, b: &Field) -> Result<Residual> {
    if a.values.len() != b.values.len() {
        return Err(Error::LengthMismatch {
            left: a.values.len(),
            right: b.values.len(),
        });
    }
    if a.grid.nx != b.grid.nx {
        return Err(Error::LengthMismatch {
            left: a.grid.nx,
            right: b.grid.nx,
        });
    }
    let mut diff2 = 0.0;
    let mut ref2 = 0.0;
    let mut max_abs: f64 = 0.0;
    for (ra, rb) in a.values.iter().zip(&b.values) {
        for (va, vb) in ra.iter().zip(rb) {
            let d = (va - vb).norm();
            diff2 += d * d;
            ref2 += vb.norm_sqr();
            max_abs = max_abs.max(d);
        }
    }
    let l2 = diff2.sqrt();
    let relative_l2 = if ref2 > 0.0 {
        l2 / ref2.sqrt()
    } else if l2 == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(Residual {
        l2,
        relative_l2,
        max_abs,
    })
}
