//! Parameter scans behind the command-line tables. Every study returns its
//! rows in sweep order; independent points go through [`Exec::map`].

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::{gate_count, truncated_circuit, GateCounts};
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::hamiltonian::{
    diagonal_of_term, noncompact_spectrum_oracle, plaquette_expectation, CosineTerm, DenseLimits, HamiltonianModel,
    ModelConfig, Term,
};
use crate::lattice::{Basis, Digitization, Formulation, LatticeSpec, WeaveMatrix};
use crate::sim::{exact_loschmidt, loschmidt};
use crate::trotter::{synthesize_step, ThetaPolicy, TrotterOrder, TrotterPlan};
use crate::walsh::{l1_norm, tensor, threshold_truncate, WalshSeries};

/// Everything about a model except n_q and g.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub lattice: LatticeSpec,
    pub formulation: Formulation,
    pub weave: Option<WeaveMatrix>,
    pub limits: DenseLimits,
}

impl ModelSpec {
    pub fn new(lattice: LatticeSpec, formulation: Formulation) -> Self {
        Self {
            lattice,
            formulation,
            weave: None,
            limits: DenseLimits::default(),
        }
    }

    pub fn weaved(mut self, weave: WeaveMatrix) -> Self {
        self.weave = Some(weave);
        self
    }

    pub fn with_limits(mut self, limits: DenseLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn basis(&self) -> Basis {
        if self.weave.is_some() {
            Basis::Weaved
        } else {
            Basis::Original
        }
    }

    pub fn config(&self, n_q: u32, g: f64) -> ModelConfig {
        let mut cfg = ModelConfig::new(n_q, g, self.formulation).with_limits(self.limits);
        cfg.weave = self.weave.clone();
        cfg
    }

    pub fn build(&self, n_q: u32, g: f64) -> Result<HamiltonianModel> {
        HamiltonianModel::new(self.lattice, &self.config(n_q, g))
    }
}

fn relative_error(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumReference {
    /// Normal-mode energies of the non-compact theory.
    Oracle,
    /// The digitized spectrum at this n_q.
    SelfReference(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub n_q: u32,
    pub level: usize,
    pub energy: f64,
    pub reference: f64,
    pub rel_error: f64,
}

pub fn spectrum_study(
    spec: &ModelSpec,
    g: f64,
    n_qs: &[u32],
    levels: usize,
    reference: SpectrumReference,
    exec: Exec,
) -> Result<Vec<SpectrumRow>> {
    let reference_values = match reference {
        SpectrumReference::Oracle => {
            if spec.formulation != Formulation::NonCompact {
                return Err(domain(
                    "the spectrum oracle exists for the non-compact formulation only",
                ));
            }
            noncompact_spectrum_oracle(&spec.lattice, levels)?
        }
        SpectrumReference::SelfReference(n_q) => spec.build(n_q, g)?.spectrum(levels)?,
    };
    let spectra = exec.map(n_qs, |&n_q| spec.build(n_q, g)?.spectrum(levels));
    let mut rows = Vec::new();
    for (&n_q, spectrum) in n_qs.iter().zip(spectra) {
        for (level, (&energy, &r)) in spectrum?.iter().zip(&reference_values).enumerate() {
            rows.push(SpectrumRow {
                n_q,
                level,
                energy,
                reference: r,
                rel_error: relative_error(energy, r),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaquetteRow {
    pub g: f64,
    pub original: f64,
    pub weaved: Option<f64>,
    pub ratio: Option<f64>,
}

/// ⟨□⟩ against g in the compact theory, original and (with a weave) weaved.
pub fn plaquette_study(
    lattice: LatticeSpec,
    n_q: u32,
    gs: &[f64],
    weave: Option<&WeaveMatrix>,
    limits: DenseLimits,
    exec: Exec,
) -> Result<Vec<PlaquetteRow>> {
    let original = ModelSpec::new(lattice, Formulation::Compact).with_limits(limits);
    let weaved = weave.map(|w| original.clone().weaved(w.clone()));
    exec.map(gs, |&g| {
        let o = plaquette_expectation(&original.build(n_q, g)?)?;
        let w = match &weaved {
            Some(spec) => Some(plaquette_expectation(&spec.build(n_q, g)?)?),
            None => None,
        };
        Ok(PlaquetteRow {
            g,
            original: o,
            weaved: w,
            ratio: w.map(|w| w / o),
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BMaxScanRow {
    pub g: f64,
    pub scale: f64,
    pub original: f64,
    pub weaved: f64,
    pub abs_diff: f64,
}

/// Weaved ⟨□⟩ with every prescribed b_max multiplied by each of `scales`.
pub fn b_max_scan(
    lattice: LatticeSpec,
    n_q: u32,
    g: f64,
    weave: &WeaveMatrix,
    scales: &[f64],
    limits: DenseLimits,
    exec: Exec,
) -> Result<Vec<BMaxScanRow>> {
    let original = plaquette_expectation(
        &ModelSpec::new(lattice, Formulation::Compact)
            .with_limits(limits)
            .build(n_q, g)?,
    )?;
    let spec = ModelSpec::new(lattice, Formulation::Compact)
        .weaved(weave.clone())
        .with_limits(limits);
    let base = Digitization::prescribed(lattice.n_p(), n_q, g, Formulation::Compact, Some(weave), None)?.b_max;
    exec.map(scales, |&scale| {
        let cfg = spec.config(n_q, g).with_b_max(base.iter().map(|b| b * scale).collect());
        let w = plaquette_expectation(&HamiltonianModel::new(lattice, &cfg)?)?;
        Ok(BMaxScanRow {
            g,
            scale,
            original,
            weaved: w,
            abs_diff: (w - original).abs(),
        })
    })
    .into_iter()
    .collect()
}

/// The operator whose exponential is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateTarget {
    /// −(1/g²) cos(B̂₁ + … + B̂_{N_p}) on N_p original-basis plaquettes.
    #[serde(rename = "maximal-cos")]
    MaximalCosine,
    /// cos(B̂) on one plaquette, compact b_max prescription.
    #[serde(rename = "single-cos")]
    SingleCosine,
    /// The full magnetic Hamiltonian of the lattice.
    Magnetic,
    /// The electric Hamiltonian in the electric basis.
    Electric,
    /// One Trotter step, QFTs included.
    Step,
}

impl fmt::Display for GateTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateTarget::MaximalCosine => "maximal-cos",
            GateTarget::SingleCosine => "single-cos",
            GateTarget::Magnetic => "magnetic",
            GateTarget::Electric => "electric",
            GateTarget::Step => "step",
        })
    }
}

impl FromStr for GateTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "maximal-cos" => GateTarget::MaximalCosine,
            "single-cos" => GateTarget::SingleCosine,
            "magnetic" => GateTarget::Magnetic,
            "electric" => GateTarget::Electric,
            "step" => GateTarget::Step,
            _ => {
                return Err(domain(format!(
                    "unknown gate-count target {s:?} (maximal-cos, single-cos, magnetic, electric, step)"
                )))
            }
        })
    }
}

/// One sweep point. `n_p` only matters for the abstract cosine targets;
/// the lattice targets take N_p from the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GatePoint {
    pub n_p: usize,
    pub n_q: u32,
    pub g: f64,
    pub theta: ThetaPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateCountRow {
    pub target: GateTarget,
    pub n_p: usize,
    pub n_q: u32,
    pub g: f64,
    pub dt: f64,
    pub theta_min: f64,
    pub kept: usize,
    pub n_drop: usize,
    pub rz: usize,
    pub cnot: usize,
    pub h: usize,
    pub cphase: usize,
    pub swap: usize,
}

/// Series of the cosine of the sum of `n_p` plaquette fields.
pub fn cosine_sum_series(n_p: usize, n_q: u32, b_max: f64, prefactor: f64, limit_qubits: usize) -> Result<WalshSeries> {
    let d = Digitization::new(n_q, 1.0, vec![b_max; n_p], Formulation::Compact, Basis::Original)?;
    let term = Term::Cosine(CosineTerm {
        support: (0..n_p).map(|i| (i, 1.0)).collect(),
        prefactor,
    });
    diagonal_of_term(&term, &d, limit_qubits)?.series(n_q, n_p as u32 * n_q)
}

fn original_compact_b_max(n_q: u32, g: f64) -> Result<f64> {
    Ok(Digitization::prescribed(1, n_q, g, Formulation::Compact, None, None)?.b_max[0])
}

fn series_row(target: GateTarget, n_p: usize, p: &GatePoint, dt: f64, series: &WalshSeries) -> Result<GateCountRow> {
    let theta = p.theta.theta(dt);
    let scaled = series.scaled(-dt);
    let cut = threshold_truncate(&scaled.without_constant(), theta)?;
    let c = gate_count(&truncated_circuit(&scaled, theta)?);
    Ok(row(target, n_p, p, dt, theta, cut.kept.len(), cut.n_drop, c))
}

#[allow(clippy::too_many_arguments)]
fn row(
    target: GateTarget,
    n_p: usize,
    p: &GatePoint,
    dt: f64,
    theta: f64,
    kept: usize,
    n_drop: usize,
    c: GateCounts,
) -> GateCountRow {
    GateCountRow {
        target,
        n_p,
        n_q: p.n_q,
        g: p.g,
        dt,
        theta_min: theta,
        kept,
        n_drop,
        rz: c.rz,
        cnot: c.cnot,
        h: c.h,
        cphase: c.cphase,
        swap: c.swap,
    }
}

pub fn gate_count_point(
    target: GateTarget,
    spec: &ModelSpec,
    p: &GatePoint,
    dt: f64,
    order: TrotterOrder,
) -> Result<GateCountRow> {
    if !(dt > 0.0) {
        return Err(domain(format!("δt must be positive, got {dt}")));
    }
    let limit = spec.limits.term;
    match target {
        GateTarget::MaximalCosine => {
            if p.n_p == 0 {
                return Err(domain("N_p must be at least 1"));
            }
            let b = original_compact_b_max(p.n_q, p.g)?;
            let s = cosine_sum_series(p.n_p, p.n_q, b, -1.0 / (p.g * p.g), limit)?;
            series_row(target, p.n_p, p, dt, &s)
        }
        GateTarget::SingleCosine => {
            let b = original_compact_b_max(p.n_q, p.g)?;
            series_row(target, 1, p, dt, &cosine_sum_series(1, p.n_q, b, 1.0, limit)?)
        }
        GateTarget::Magnetic | GateTarget::Electric => {
            let m = spec.build(p.n_q, p.g)?;
            let s = if target == GateTarget::Magnetic {
                m.magnetic_series()?
            } else {
                m.electric_series()?
            };
            series_row(target, m.n_p(), p, dt, &s)
        }
        GateTarget::Step => {
            let m = spec.build(p.n_q, p.g)?;
            let theta = p.theta.theta(dt);
            let plan = TrotterPlan::new(order, dt, 1, theta, theta)?;
            let step = synthesize_step(&m, &plan)?;
            let kept = step.kept_e * order.electric_factors() + step.kept_b;
            let n_drop = step.n_drop_e * order.electric_factors() + step.n_drop_b;
            Ok(row(
                target,
                m.n_p(),
                p,
                dt,
                theta,
                kept,
                n_drop,
                gate_count(&step.circuit),
            ))
        }
    }
}

pub fn gate_count_study(
    target: GateTarget,
    spec: &ModelSpec,
    points: &[GatePoint],
    dt: f64,
    order: TrotterOrder,
    exec: Exec,
) -> Result<Vec<GateCountRow>> {
    exec.map(points, |p| gate_count_point(target, spec, p, dt, order))
        .into_iter()
        .collect()
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(domain("a slope fit needs at least two paired points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(domain("log-log fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Row {
    pub n_p: usize,
    pub n_q: u32,
    pub qubits: u32,
    pub l1: f64,
    /// 2^{(N_p n_q − 5)/4}
    pub lower_bound: f64,
}

/// ‖a‖₁ of cos(ΣB̂) for each (N_p, n_q) at a fixed b_max.
pub fn l1_study(points: &[(usize, u32)], b_max: f64, limit_qubits: usize, exec: Exec) -> Result<Vec<L1Row>> {
    exec.map(points, |&(n_p, n_q)| {
        let s = cosine_sum_series(n_p, n_q, b_max, 1.0, limit_qubits)?;
        let qubits = n_p as u32 * n_q;
        Ok(L1Row {
            n_p,
            n_q,
            qubits,
            l1: l1_norm(&s),
            lower_bound: 2f64.powf((qubits as f64 - 5.0) / 4.0),
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductCountRow {
    pub theta_min: f64,
    pub n_p: usize,
    pub rz: usize,
    pub cnot: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductFit {
    pub theta_min: f64,
    /// Highest power with a nonzero exact finite difference.
    pub degree: usize,
    /// b_0 … b_{n−1} of the interpolating polynomial in N_p.
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transition {
    pub r: usize,
    /// 2·A₂^r
    pub predicted: f64,
    /// Geometric mean of the θ_min bracket where the degree first reaches r.
    pub fitted: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductScaling {
    pub n_q: u32,
    pub g: f64,
    pub b_max: f64,
    /// Largest single-cosine coefficient magnitude.
    pub a1: f64,
    /// Second largest.
    pub a2: f64,
    pub counts: Vec<ProductCountRow>,
    pub fits: Vec<ProductFit>,
    pub transitions: Vec<Transition>,
}

/// Exact polynomial degree of integer samples at consecutive abscissae.
pub fn difference_degree(samples: &[i64]) -> usize {
    let mut d = samples.to_vec();
    let mut degree = 0;
    for k in 0..samples.len() {
        if d.iter().all(|&v| v == 0) {
            break;
        }
        degree = k;
        d = d.windows(2).map(|w| w[1] - w[0]).collect();
    }
    degree
}

/// Coefficients of the polynomial through (x_i, y_i), lowest power first.
pub fn interpolating_polynomial(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 || y.len() != n {
        return Err(domain("interpolation needs paired, non-empty samples"));
    }
    let v = DMatrix::from_fn(n, n, |i, k| x[i].powi(k as i32));
    v.lu()
        .solve(&DVector::from_column_slice(y))
        .map(|c| c.iter().copied().collect())
        .ok_or_else(|| domain("singular Vandermonde system"))
}

/// CNOT counts of the truncated product Π_{i ≤ N_p} cos(B̂_i) for
/// N_p = 1..=n_p_max over `thetas` (descending), with the polynomial fits
/// and the θ_min where the scaling degree first reaches each r ≤ max_r.
pub fn product_scaling(
    n_q: u32,
    g: f64,
    n_p_max: usize,
    thetas: &[f64],
    max_r: usize,
    exec: Exec,
) -> Result<ProductScaling> {
    if n_p_max == 0 || n_p_max as u32 * n_q > 24 {
        return Err(domain(format!(
            "N_p max {n_p_max} with n_q = {n_q} is outside the supported range"
        )));
    }
    if thetas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("θ_min grid must be strictly decreasing"));
    }
    let b_max = original_compact_b_max(n_q, g)?;
    let single = cosine_sum_series(1, n_q, b_max, 1.0, 22)?;
    let mut mags: Vec<f64> = single.iter().map(|e| e.1.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let (a1, a2) = (mags[0], mags.get(1).copied().unwrap_or(0.0));

    let mut powers = vec![single.clone()];
    for _ in 1..n_p_max {
        let next = tensor(powers.last().expect("non-empty"), &single)?;
        powers.push(next);
    }
    let grid: Vec<(usize, f64)> = thetas.iter().flat_map(|&t| (0..n_p_max).map(move |k| (k, t))).collect();
    let counts: Vec<ProductCountRow> = exec
        .map(&grid, |&(k, theta)| -> Result<ProductCountRow> {
            let c = gate_count(&truncated_circuit(&powers[k], theta)?);
            Ok(ProductCountRow {
                theta_min: theta,
                n_p: k + 1,
                rz: c.rz,
                cnot: c.cnot,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let xs: Vec<f64> = (1..=n_p_max).map(|n| n as f64).collect();
    let mut fits = Vec::with_capacity(thetas.len());
    for (i, &theta) in thetas.iter().enumerate() {
        let block = &counts[i * n_p_max..(i + 1) * n_p_max];
        let ys: Vec<i64> = block.iter().map(|r| r.cnot as i64).collect();
        let yf: Vec<f64> = ys.iter().map(|&v| v as f64).collect();
        fits.push(ProductFit {
            theta_min: theta,
            degree: difference_degree(&ys),
            coefficients: interpolating_polynomial(&xs, &yf)?,
        });
    }
    let transitions = (1..=max_r)
        .map(|r| {
            let predicted = 2.0 * a2.powi(r as i32);
            let first = fits.iter().position(|f| f.degree >= r);
            let fitted = match first {
                Some(i) if i > 0 => Some((thetas[i - 1] * thetas[i]).sqrt()),
                _ => None,
            };
            Transition {
                r,
                predicted,
                fitted,
                ratio: fitted.map(|f| f / predicted),
            }
        })
        .collect();
    Ok(ProductScaling {
        n_q,
        g,
        b_max,
        a1,
        a2,
        counts,
        fits,
        transitions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveRow {
    pub g: f64,
    pub method: String,
    pub dt: Option<f64>,
    pub theta_min: Option<f64>,
    pub t: f64,
    pub loschmidt: f64,
}

/// |⟨Ψ₀^E|U(t)|Ψ₀^E⟩|² against g for each (δt, θ_min policy) combination,
/// plus the exact value when `exact` is set.
#[allow(clippy::too_many_arguments)]
pub fn evolve_study(
    spec: &ModelSpec,
    n_q: u32,
    gs: &[f64],
    t: f64,
    order: TrotterOrder,
    combos: &[(f64, ThetaPolicy)],
    exact: bool,
    exec: Exec,
) -> Result<Vec<EvolveRow>> {
    let rows = exec.map(gs, |&g| -> Result<Vec<EvolveRow>> {
        let m = spec.build(n_q, g)?;
        let mut out = Vec::with_capacity(combos.len() + 1);
        for &(dt, policy) in combos {
            let theta = policy.theta(dt);
            let plan = TrotterPlan::for_duration(order, dt, t, theta, theta)?;
            out.push(EvolveRow {
                g,
                method: "trotter".into(),
                dt: Some(dt),
                theta_min: Some(theta),
                t,
                loschmidt: loschmidt(&m, &plan)?,
            });
        }
        if exact {
            out.push(EvolveRow {
                g,
                method: "exact".into(),
                dt: None,
                theta_min: None,
                t,
                loschmidt: exact_loschmidt(&m, t)?,
            });
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for r in rows {
        all.extend(r?);
    }
    Ok(all)
}

/// `count` points from `lo` to `hi` evenly spaced in log.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) || count == 0 {
        return Err(domain(format!("bad log grid [{lo}, {hi}] × {count}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    // exp(ln x) is not always x; keep the requested endpoints exact.
    g[0] = lo;
    g[count - 1] = hi;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differences_find_degree() {
        assert_eq!(difference_degree(&[0, 0, 0]), 0);
        assert_eq!(difference_degree(&[5, 5, 5]), 0);
        assert_eq!(difference_degree(&[2, 4, 6, 8]), 1);
        assert_eq!(difference_degree(&[1, 4, 9, 16, 25]), 2);
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let x: Vec<f64> = (1..=6).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - v + 0.5 * v * v * v).collect();
        let c = interpolating_polynomial(&x, &y).unwrap();
        let expect = [3.0, -1.0, 0.0, 0.5, 0.0, 0.0];
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).abs() < 1e-8, "{c:?}");
        }
    }

    #[test]
    fn slope_of_power_law() {
        let x = [2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 7.0 * v.powf(2.5)).collect();
        assert!((log_log_slope(&x, &y).unwrap() - 2.5).abs() < 1e-12);
        assert!(log_log_slope(&x, &[1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.01, 10.0, 20).unwrap();
        assert_eq!(g.len(), 20);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[19] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn single_cosine_l1_is_sum_of_magnitudes() {
        let b = original_compact_b_max(2, 0.1).unwrap();
        let s = cosine_sum_series(1, 2, b, 1.0, 22).unwrap();
        let sum: f64 = s.iter().map(|e| e.1.abs()).sum();
        assert!((l1_norm(&s) - sum).abs() < 1e-15);
        assert!((sum - 1.01098).abs() < 1e-4);
    }

    #[test]
    fn zero_threshold_counts_are_exact_counts() {
        let spec = ModelSpec::new(LatticeSpec::new(2, 2).unwrap(), Formulation::Compact);
        let p = GatePoint {
            n_p: 3,
            n_q: 2,
            g: 0.5,
            theta: ThetaPolicy::Absolute(0.0),
        };
        let r = gate_count_point(GateTarget::MaximalCosine, &spec, &p, 0.1, TrotterOrder::First).unwrap();
        let b = original_compact_b_max(2, 0.5).unwrap();
        let s = cosine_sum_series(3, 2, b, -4.0, 22).unwrap();
        let exact = gate_count(&crate::circuit::exact_circuit(&s.scaled(-0.1)));
        assert_eq!((r.rz, r.cnot, r.n_drop), (exact.rz, exact.cnot, 0));
    }
}
