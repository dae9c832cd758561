//! Periodic plaquette lattice, magnetic Gauss-law bookkeeping, field grids
//! and the weaved operator basis.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::walsh::DiagonalValues;

/// Orthogonality tolerance for weave matrices.
pub const WEAVE_TOL: f64 = 1e-10;

/// Entries of M below this are treated as structural zeros.
pub const M_ZERO_TOL: f64 = 1e-12;

/// Periodic `N_x × N_y` lattice. Plaquette `p = x + N_x·y`; the last one is
/// eliminated by the constraint Σ_p B_p = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    nx: usize,
    ny: usize,
}

impl LatticeSpec {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(domain(format!("lattice {nx}x{ny}: both extents must be at least 2")));
        }
        Ok(Self { nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Independent plaquettes, N_x·N_y − 1.
    pub fn n_p(&self) -> usize {
        self.nx * self.ny - 1
    }

    /// Each link as the pair of plaquettes it separates. Every plaquette
    /// contributes its right and upper link, so there are 2·N_x·N_y links.
    pub fn links(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.nx * self.ny);
        for y in 0..self.ny {
            for x in 0..self.nx {
                let p = x + self.nx * y;
                out.push((p, (x + 1) % self.nx + self.nx * y));
                out.push((p, x + self.nx * ((y + 1) % self.ny)));
            }
        }
        out
    }

    /// Q_E with H_E = (g²/2) Rᵀ Q_E R: link fields are R_p − R_p' and the
    /// constrained plaquette carries R = 0.
    pub fn electric_form(&self) -> DMatrix<f64> {
        let n = self.n_p();
        let mut q = DMatrix::zeros(n, n);
        for (a, b) in self.links() {
            for (i, si) in [(a, 1.0), (b, -1.0)] {
                for (j, sj) in [(a, 1.0), (b, -1.0)] {
                    if i < n && j < n {
                        q[(i, j)] += si * sj;
                    }
                }
            }
        }
        q
    }

    /// Q_B = 1 + 11ᵀ from Σ_p B_p² + (Σ_p B_p)².
    pub fn magnetic_form(&self) -> DMatrix<f64> {
        let n = self.n_p();
        DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 1.0 })
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.nx, self.ny)
    }
}

impl FromStr for LatticeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| domain(format!("lattice `{s}` is not of the form NxM")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| domain(format!("lattice `{s}` is not of the form NxM")))
        };
        Self::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    Compact,
    NonCompact,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Compact => "compact",
            Formulation::NonCompact => "non-compact",
        })
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compact" => Ok(Formulation::Compact),
            "non-compact" | "noncompact" => Ok(Formulation::NonCompact),
            _ => Err(domain(format!("unknown formulation `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Original,
    Weaved,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Original => "original",
            Basis::Weaved => "weaved",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Basis::Original),
            "weaved" => Ok(Basis::Weaved),
            _ => Err(domain(format!("unknown basis `{s}`"))),
        }
    }
}

/// Orthogonal change of plaquette basis, B_p → Σ_p' W_pp' B_p'.
///
/// `m` holds the cosine arguments: row c < N_p is row c of W, the final row
/// is minus the column sums (the constrained plaquette).
#[derive(Debug, Clone, PartialEq)]
pub struct WeaveMatrix {
    w: DMatrix<f64>,
    m: DMatrix<f64>,
}

impl WeaveMatrix {
    pub fn identity(n_p: usize) -> Self {
        Self::build(DMatrix::identity(n_p, n_p))
    }

    /// Validate orthogonality to [`WEAVE_TOL`] and attach M.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(domain("weave matrix has no rows"));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(domain(format!(
                "weave matrix is not square: row of length {} in {n} rows",
                r.len()
            )));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(domain("weave matrix has non-finite entries"));
        }
        let w = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let dev = (w.transpose() * &w - DMatrix::<f64>::identity(n, n)).amax();
        if dev > WEAVE_TOL {
            return Err(Error::Validation {
                message: format!("{n}x{n} weave matrix is not orthogonal"),
                deviation: dev,
                tolerance: WEAVE_TOL,
            });
        }
        Ok(Self::build(w))
    }

    fn build(w: DMatrix<f64>) -> Self {
        let n = w.nrows();
        let m = DMatrix::from_fn(n + 1, n, |c, i| if c < n { w[(c, i)] } else { -w.column(i).sum() });
        Self { w, m }
    }

    pub fn n_p(&self) -> usize {
        self.w.nrows()
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn m(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn is_identity(&self) -> bool {
        self.w == DMatrix::identity(self.n_p(), self.n_p())
    }

    /// Smallest nonzero |M_ci| over cosines c.
    pub fn column_min(&self, i: usize) -> Result<f64> {
        if i >= self.n_p() {
            return Err(domain(format!("plaquette {i} out of range for N_p = {}", self.n_p())));
        }
        self.m
            .column(i)
            .iter()
            .map(|x| x.abs())
            .filter(|x| *x > M_ZERO_TOL)
            .reduce(f64::min)
            .ok_or_else(|| domain(format!("column {i} of the cosine-argument matrix is zero")))
    }

    /// Nonzero entries of cosine row `c` as (plaquette, coefficient).
    pub fn cosine_support(&self, c: usize) -> Vec<(usize, f64)> {
        self.m
            .row(c)
            .iter()
            .enumerate()
            .filter(|(_, x)| x.abs() > M_ZERO_TOL)
            .map(|(i, x)| (i, *x))
            .collect()
    }
}

/// The published three-plaquette weave.
pub fn builtin_weave(n_p: usize) -> Result<WeaveMatrix> {
    if n_p != 3 {
        return Err(Error::NotAvailable(format!(
            "no built-in weave for N_p = {n_p}; load one with --weave"
        )));
    }
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let rows = vec![
        vec![s2 / s6, -2.0 / s6, 0.0],
        vec![s2 / s6, 1.0 / s6, -s3 / s6],
        vec![s2 / s6, 1.0 / s6, s3 / s6],
    ];
    WeaveMatrix::from_rows(&rows)
}

#[derive(Debug, Serialize, Deserialize)]
struct WeaveFile {
    n_p: usize,
    rows: Vec<Vec<f64>>,
}

/// Read `{"n_p": N, "rows": [[...], ...]}`.
pub fn load_weave(path: &Path) -> Result<WeaveMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: WeaveFile = serde_json::from_str(&text).map_err(|e| Error::WeaveFormat {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.rows.len() != file.n_p {
        return Err(Error::WeaveFormat {
            path: path.to_path_buf(),
            message: format!("n_p = {} but {} rows given", file.n_p, file.rows.len()),
        });
    }
    WeaveMatrix::from_rows(&file.rows)
}

/// Write a weave in the format read by [`load_weave`].
pub fn weave_to_json(w: &WeaveMatrix) -> String {
    let n = w.n_p();
    let file = WeaveFile {
        n_p: n,
        rows: (0..n).map(|i| w.w().row(i).iter().copied().collect()).collect(),
    };
    serde_json::to_string_pretty(&file).expect("weave serializes")
}

/// Harmonic-matching constants per plaquette.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Betas {
    pub r: Vec<f64>,
    pub b: Vec<f64>,
}

impl Betas {
    pub fn unit(n_p: usize) -> Self {
        Self {
            r: vec![1.0; n_p],
            b: vec![1.0; n_p],
        }
    }
}

/// g·(N/2)·sqrt(β_R/β_B)·sqrt(√8·π/N) with N = 2^n_q.
pub fn b_max_noncompact(g: f64, n_q: u32, beta_r: f64, beta_b: f64) -> Result<f64> {
    if !(g > 0.0 && beta_r > 0.0 && beta_b > 0.0) {
        return Err(domain(format!(
            "b_max needs positive g, β_R, β_B (got {g}, {beta_r}, {beta_b})"
        )));
    }
    let n = (1u64 << n_q) as f64;
    Ok(g * (n / 2.0) * (beta_r / beta_b).sqrt() * (8f64.sqrt() * PI / n).sqrt())
}

/// min(noncompact value, π / min_c |M_ci|); the identity weave gives the
/// plain π clamp.
pub fn b_max_compact(i: usize, noncompact: f64, weave: &WeaveMatrix) -> Result<f64> {
    Ok(noncompact.min(PI / weave.column_min(i)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Digitization {
    pub n_q: u32,
    pub g: f64,
    pub b_max: Vec<f64>,
    pub formulation: Formulation,
    pub basis: Basis,
}

impl Digitization {
    pub fn new(n_q: u32, g: f64, b_max: Vec<f64>, formulation: Formulation, basis: Basis) -> Result<Self> {
        if n_q == 0 || n_q > 20 {
            return Err(domain(format!("n_q = {n_q} outside 1..=20")));
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(domain(format!("coupling g must be positive, got {g}")));
        }
        if b_max.is_empty() {
            return Err(domain("no plaquettes"));
        }
        for (i, &b) in b_max.iter().enumerate() {
            if !(b > 0.0 && b.is_finite()) {
                return Err(domain(format!("b_max[{i}] = {b} must be positive")));
            }
            if formulation == Formulation::Compact && basis == Basis::Original && b > PI * (1.0 + 1e-12) {
                return Err(domain(format!(
                    "b_max[{i}] = {b} exceeds π in the original compact basis"
                )));
            }
        }
        Ok(Self {
            n_q,
            g,
            b_max,
            formulation,
            basis,
        })
    }

    /// Grids from the b_max prescriptions. `weave = None` is the original basis.
    pub fn prescribed(
        n_p: usize,
        n_q: u32,
        g: f64,
        formulation: Formulation,
        weave: Option<&WeaveMatrix>,
        betas: Option<&Betas>,
    ) -> Result<Self> {
        let unit = Betas::unit(n_p);
        let betas = betas.unwrap_or(&unit);
        if betas.r.len() != n_p || betas.b.len() != n_p {
            return Err(domain(format!("β vectors must have {n_p} entries")));
        }
        let identity;
        let (w, basis) = match weave {
            Some(w) => {
                if w.n_p() != n_p {
                    return Err(domain(format!(
                        "weave is {}x{}, lattice has N_p = {n_p}",
                        w.n_p(),
                        w.n_p()
                    )));
                }
                (w, Basis::Weaved)
            }
            None => {
                identity = WeaveMatrix::identity(n_p);
                (&identity, Basis::Original)
            }
        };
        let b_max = (0..n_p)
            .map(|i| {
                let nc = b_max_noncompact(g, n_q, betas.r[i], betas.b[i])?;
                match formulation {
                    Formulation::NonCompact => Ok(nc),
                    Formulation::Compact => b_max_compact(i, nc, w),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_q, g, b_max, formulation, basis)
    }

    pub fn n_p(&self) -> usize {
        self.b_max.len()
    }

    /// Grid points per plaquette, 2^n_q.
    pub fn levels(&self) -> usize {
        1 << self.n_q
    }

    pub fn delta_b(&self, i: usize) -> f64 {
        2.0 * self.b_max[i] / self.levels() as f64
    }

    pub fn r_max(&self, i: usize) -> f64 {
        PI * self.levels() as f64 / (2.0 * self.b_max[i])
    }

    pub fn delta_r(&self, i: usize) -> f64 {
        PI / self.b_max[i]
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.n_p() {
            return Err(domain(format!("plaquette {i} out of range for N_p = {}", self.n_p())));
        }
        Ok(())
    }

    pub(crate) fn b_values(&self, i: usize) -> Vec<f64> {
        let db = self.delta_b(i);
        (0..self.levels()).map(|l| -self.b_max[i] + l as f64 * db).collect()
    }

    pub(crate) fn r_values(&self, i: usize) -> Vec<f64> {
        let dr = self.delta_r(i);
        let r_max = self.r_max(i);
        (0..self.levels()).map(|l| -r_max + l as f64 * dr).collect()
    }
}

/// −b_max + l·δb, l = 0..2^n_q.
pub fn b_grid(i: usize, d: &Digitization) -> Result<DiagonalValues> {
    d.check(i)?;
    DiagonalValues::new(d.b_values(i))
}

/// −r_max + l·δr, l = 0..2^n_q.
pub fn r_grid(i: usize, d: &Digitization) -> Result<DiagonalValues> {
    d.check(i)?;
    DiagonalValues::new(d.r_values(i))
}
