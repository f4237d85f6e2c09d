//! Tensor grids over a half-plane and complex fields sampled on them.

use std::fmt;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::SampledFunction;

/// Default y-window and level count.
pub const DEFAULT_Y_MIN: f64 = 1e-3;
pub const DEFAULT_Y_MAX: f64 = 1e2;
pub const DEFAULT_LEVELS: usize = 64;

/// x-nodes times y-levels. The y-levels are strictly positive and increasing;
/// on the lower half-plane a level `y` stands for the points `(x, -y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    x: Vec<f64>,
    y: Vec<f64>,
}

/// `n` geometrically spaced levels from `y_min` to `y_max` inclusive.
pub fn geometric_levels(y_min: f64, y_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(y_min > 0.0 && y_min.is_finite()) {
        return Err(Error::NonPositiveHeight(y_min));
    }
    if n == 0 || !(y_max >= y_min && y_max.is_finite()) || (n > 1 && y_max == y_min) {
        return Err(Error::InvalidGrid(format!("cannot place {n} levels in [{y_min}, {y_max}]")));
    }
    if n == 1 {
        return Ok(vec![y_min]);
    }
    let ratio = (y_max / y_min).ln();
    Ok((0..n)
        .map(|j| {
            if j + 1 == n {
                y_max
            } else {
                y_min * (ratio * j as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

impl Grid {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one x-node and one level".into()));
        }
        if x.iter().any(|v| !v.is_finite()) || x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("x-nodes must be finite and strictly increasing".into()));
        }
        if let Some(&bad) = y.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveHeight(bad));
        }
        if y.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("y-levels must be strictly increasing".into()));
        }
        Ok(Grid { x, y })
    }

    /// `nx` uniform x-nodes on `[x_min, x_max]` and `ny` geometric levels.
    pub fn uniform(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        let x = match nx {
            0 => Vec::new(),
            1 => vec![x_min],
            _ => {
                let h = (x_max - x_min) / (nx - 1) as f64;
                (0..nx).map(|i| if i + 1 == nx { x_max } else { x_min + i as f64 * h }).collect()
            }
        };
        Grid::new(x, geometric_levels(y_min, y_max, ny)?)
    }

    /// Every `stride`-th sample node of `u` as x-nodes.
    pub fn on_samples(u: &SampledFunction, stride: usize, levels: Vec<f64>) -> Result<Self> {
        let stride = stride.max(1);
        let x = (0..u.len()).step_by(stride).map(|i| u.node(i)).collect();
        Grid::new(x, levels)
    }

    /// Sample nodes of `u` lying in `[a, b]`, every `stride`-th one.
    pub fn on_samples_within(u: &SampledFunction, a: f64, b: f64, stride: usize, levels: Vec<f64>) -> Result<Self> {
        let tol = 1e-9 * u.step();
        let x = (0..u.len())
            .map(|i| u.node(i))
            .filter(|&t| t >= a - tol && t <= b + tol)
            .step_by(stride.max(1))
            .collect();
        Grid::new(x, levels)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same x-nodes, levels replaced.
    pub fn with_levels(&self, y: Vec<f64>) -> Result<Self> {
        Grid::new(self.x.clone(), y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    pub fn name(self) -> &'static str {
        match self {
            HalfPlane::Upper => "upper",
            HalfPlane::Lower => "lower",
        }
    }

    /// `+1` or `-1`, the sign of the imaginary coordinate.
    pub fn sign(self) -> f64 {
        match self {
            HalfPlane::Upper => 1.0,
            HalfPlane::Lower => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Partial {
    Ux,
    Uy,
    Vx,
    Vy,
    Fz,
    Fzbar,
}

/// What a field holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Content {
    /// The extension `F`.
    F,
    /// The complex dilatation.
    Mu,
    Derivative(Partial),
    /// A bare convolution `w * K_y`.
    Convolution,
}

impl Content {
    pub fn tag(self) -> &'static str {
        match self {
            Content::F => "F",
            Content::Mu => "mu",
            Content::Derivative(Partial::Ux) => "U_x",
            Content::Derivative(Partial::Uy) => "U_y",
            Content::Derivative(Partial::Vx) => "V_x",
            Content::Derivative(Partial::Vy) => "V_y",
            Content::Derivative(Partial::Fz) => "F_z",
            Content::Derivative(Partial::Fzbar) => "F_zbar",
            Content::Convolution => "convolution",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "F" => Content::F,
            "mu" => Content::Mu,
            "U_x" => Content::Derivative(Partial::Ux),
            "U_y" => Content::Derivative(Partial::Uy),
            "V_x" => Content::Derivative(Partial::Vx),
            "V_y" => Content::Derivative(Partial::Vy),
            "F_z" => Content::Derivative(Partial::Fz),
            "F_zbar" => Content::Derivative(Partial::Fzbar),
            "convolution" => Content::Convolution,
            _ => return None,
        })
    }
}

impl fmt::Display for Content {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Complex values on a [`Grid`], stored level by level (`values[j * nx + i]`
/// is the value at `(x_i, ±y_j)`).
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPlaneField {
    grid: Grid,
    values: Vec<Complex64>,
    half_plane: HalfPlane,
    content: Content,
}

impl HalfPlaneField {
    pub fn new(grid: Grid, values: Vec<Complex64>, half_plane: HalfPlane, content: Content) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(HalfPlaneField { grid, values, half_plane, content })
    }

    /// Field of a closure of `(x, y)` with `y > 0` the distance to the axis.
    pub fn from_fn<F>(grid: Grid, half_plane: HalfPlane, content: Content, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let values = grid.y().iter().flat_map(|&y| grid.x().iter().map(move |&x| (x, y))).map(|(x, y)| f(x, y)).collect();
        HalfPlaneField { grid, values, half_plane, content }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn x(&self) -> &[f64] {
        self.grid.x()
    }

    pub fn y(&self) -> &[f64] {
        self.grid.y()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.grid.nx() + i]
    }

    pub fn level(&self, j: usize) -> &[Complex64] {
        let nx = self.grid.nx();
        &self.values[j * nx..(j + 1) * nx]
    }

    pub fn half_plane(&self) -> HalfPlane {
        self.half_plane
    }

    pub fn content(&self) -> Content {
        self.content
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn require(&self, expected: Content) -> Result<()> {
        if self.content == expected {
            Ok(())
        } else {
            Err(Error::WrongContent { expected: expected.tag(), found: self.content.tag() })
        }
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> HalfPlaneField {
        HalfPlaneField { values: self.values.iter().map(|&z| f(z)).collect(), ..self.clone() }
    }

    /// Header comment, column names, then `x, y, re, im` rows; `y` is the
    /// signed imaginary coordinate.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: Option<&str>) -> Result<()> {
        writeln!(out, "# content={} half_plane={}", self.content.tag(), self.half_plane.name())?;
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "x,y,re,im")?;
        let sign = self.half_plane.sign();
        for (j, &y) in self.grid.y().iter().enumerate() {
            for (i, &x) in self.grid.x().iter().enumerate() {
                let v = self.value(i, j);
                writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e}", x, sign * y, v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Inverse of [`HalfPlaneField::write_csv`].
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut content = None;
        let mut half_plane = None;
        let mut rows = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for token in rest.split_whitespace() {
                    if let Some(tag) = token.strip_prefix("content=") {
                        content = Content::from_tag(tag);
                    } else if let Some(hp) = token.strip_prefix("half_plane=") {
                        half_plane = match hp {
                            "upper" => Some(HalfPlane::Upper),
                            "lower" => Some(HalfPlane::Lower),
                            _ => None,
                        };
                    }
                }
                continue;
            }
            if line.starts_with('x') {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{line}: {e}"))))
                .collect::<Result<_>>()?;
            if cols.len() != 4 {
                return Err(Error::Parse(format!("expected 4 columns in `{line}`")));
            }
            rows.push(cols);
        }
        let content = content.ok_or_else(|| Error::Parse("missing content tag".into()))?;
        let half_plane = half_plane.ok_or_else(|| Error::Parse("missing half_plane tag".into()))?;
        let first_y = rows.first().ok_or(Error::EmptyField)?[1];
        let nx = rows.iter().take_while(|r| r[1] == first_y).count();
        if rows.len() % nx != 0 {
            return Err(Error::Parse("rows do not form a tensor grid".into()));
        }
        let x = rows[..nx].iter().map(|r| r[0]).collect();
        let y = rows.iter().step_by(nx).map(|r| r[1].abs()).collect();
        let values = rows.iter().map(|r| Complex64::new(r[2], r[3])).collect();
        HalfPlaneField::new(Grid::new(x, y)?, values, half_plane, content)
    }
}
