//! Product-formula time steps built from truncated diagonal circuits, and the
//! a-priori bound on the combined Trotter and truncation error.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{plaquette_qft, truncated_circuit, Circuit};
use crate::error::{domain, Error, Result};
use crate::hamiltonian::HamiltonianModel;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::walsh::{threshold_truncate, WalshSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrotterOrder {
    /// U_B(δt) U_E(δt).
    First,
    /// U_E(δt/2) U_B(δt) U_E(δt/2).
    Second,
}

impl TrotterOrder {
    /// Truncated electric factors per step.
    pub fn electric_factors(self) -> usize {
        match self {
            TrotterOrder::First => 1,
            TrotterOrder::Second => 2,
        }
    }
}

impl fmt::Display for TrotterOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrotterOrder::First => "1",
            TrotterOrder::Second => "2",
        })
    }
}

impl FromStr for TrotterOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "first" => Ok(TrotterOrder::First),
            "2" | "second" => Ok(TrotterOrder::Second),
            _ => Err(domain(format!("unknown Trotter order {s:?}, expected 1 or 2"))),
        }
    }
}

/// How θ_min follows the step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy", content = "value")]
pub enum ThetaPolicy {
    Absolute(f64),
    /// θ_min = κ δt
    PerDt(f64),
    /// θ_min = κ δt²
    PerDt2(f64),
}

impl ThetaPolicy {
    pub fn theta(self, dt: f64) -> f64 {
        match self {
            ThetaPolicy::Absolute(t) => t,
            ThetaPolicy::PerDt(k) => k * dt,
            ThetaPolicy::PerDt2(k) => k * dt * dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub order: TrotterOrder,
    pub dt: f64,
    pub steps: usize,
    pub theta_e: f64,
    pub theta_b: f64,
}

impl TrotterPlan {
    pub fn new(order: TrotterOrder, dt: f64, steps: usize, theta_e: f64, theta_b: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(domain(format!("δt must be positive, got {dt}")));
        }
        for th in [theta_e, theta_b] {
            if !(th >= 0.0) || !th.is_finite() {
                return Err(domain(format!("θ_min must be non-negative, got {th}")));
            }
        }
        Ok(Self {
            order,
            dt,
            steps,
            theta_e,
            theta_b,
        })
    }

    /// ⌈t/δt⌉ steps, tolerant of t being a float multiple of δt.
    pub fn for_duration(order: TrotterOrder, dt: f64, t: f64, theta_e: f64, theta_b: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain(format!("evolution time must be non-negative, got {t}")));
        }
        let plan = Self::new(order, dt, 0, theta_e, theta_b)?;
        let steps = (t / dt - 1e-9).ceil().max(0.0) as usize;
        Ok(Self { steps, ..plan })
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

#[derive(Debug, Clone)]
pub struct StepSynthesis {
    pub circuit: Circuit,
    /// Dropped electric coefficients in one electric factor.
    pub n_drop_e: usize,
    pub n_drop_b: usize,
    pub kept_e: usize,
    pub kept_b: usize,
}

fn factor(series: &WalshSeries, dt: f64, theta: f64) -> Result<(Circuit, usize, usize)> {
    let scaled = series.scaled(-dt);
    let cut = threshold_truncate(&scaled.without_constant(), theta)?;
    let circuit = truncated_circuit(&scaled, theta)?;
    Ok((circuit, cut.n_drop, cut.kept.len()))
}

/// One step in time order. First order: QFT, D_E, QFT†, D_B. Second
/// order wraps D_B between two half-step electric factors.
pub fn synthesize_step(model: &HamiltonianModel, plan: &TrotterPlan) -> Result<StepSynthesis> {
    let e_series = model.electric_series()?;
    let b_series = model.magnetic_series()?;
    let (n_p, n_q) = (model.n_p(), model.n_q());
    let qft = plaquette_qft(n_p, n_q, false);
    let iqft = plaquette_qft(n_p, n_q, true);
    let e_dt = match plan.order {
        TrotterOrder::First => plan.dt,
        TrotterOrder::Second => plan.dt / 2.0,
    };
    let (d_e, n_drop_e, kept_e) = factor(&e_series, e_dt, plan.theta_e)?;
    let (d_b, n_drop_b, kept_b) = factor(&b_series, plan.dt, plan.theta_b)?;
    let mut u_e = qft;
    u_e.append(&d_e)?;
    u_e.append(&iqft)?;
    let mut circuit = Circuit::new(model.width());
    match plan.order {
        TrotterOrder::First => {
            circuit.append(&u_e)?;
            circuit.append(&d_b)?;
        }
        TrotterOrder::Second => {
            circuit.append(&u_e)?;
            circuit.append(&d_b)?;
            circuit.append(&u_e)?;
        }
    }
    Ok(StepSynthesis {
        circuit,
        n_drop_e,
        n_drop_b,
        kept_e,
        kept_b,
    })
}

pub fn step_circuit(model: &HamiltonianModel, plan: &TrotterPlan) -> Result<Circuit> {
    Ok(synthesize_step(model, plan)?.circuit)
}

/// ‖[H_E^(m), H_B^(m)]‖ from the dense electric matrix and the magnetic
/// diagonal.
pub fn commutator_norm(model: &HamiltonianModel) -> Result<f64> {
    let a = model.electric_matrix()?;
    let d = model.magnetic_diagonal()?;
    let dim = d.len();
    // [A, D]_{ss'} = A_{ss'}(d_{s'} − d_s) is anti-Hermitian; i[A, D] is Hermitian.
    let ic = CMatrix::from_fn(dim, dim, |s, t| a[(s, t)] * Complex64::new(0.0, d[t] - d[s]));
    let e = hermitian_eigenvalues(&ic);
    Ok(e.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub alpha: f64,
    /// k_E N_drop^E / δt
    pub c_e: f64,
    /// N_drop^B / δt
    pub c_b: f64,
    pub theta_e: f64,
    pub theta_b: f64,
    pub t: f64,
    pub dt: f64,
    pub bound: f64,
}

/// ε ≤ α t δt + (c_E θ_E + c_B θ_B) t with t = steps·δt.
pub fn error_bound(model: &HamiltonianModel, plan: &TrotterPlan) -> Result<ErrorBudget> {
    let alpha = commutator_norm(model)?;
    let step = synthesize_step(model, plan)?;
    Ok(budget(alpha, &step, plan))
}

pub(crate) fn budget(alpha: f64, step: &StepSynthesis, plan: &TrotterPlan) -> ErrorBudget {
    let t = plan.time();
    let c_e = (plan.order.electric_factors() * step.n_drop_e) as f64 / plan.dt;
    let c_b = step.n_drop_b as f64 / plan.dt;
    ErrorBudget {
        alpha,
        c_e,
        c_b,
        theta_e: plan.theta_e,
        theta_b: plan.theta_b,
        t,
        dt: plan.dt,
        bound: alpha * t * plan.dt + (c_e * plan.theta_e + c_b * plan.theta_b) * t,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NDropReport {
    pub dt: Vec<f64>,
    pub theta: Vec<f64>,
    pub n_drop: Vec<usize>,
    /// N_drop is non-increasing as δt decreases.
    pub monotone: bool,
}

/// N_drop of `series` scaled by δt for each step size in `dts` (given in
/// decreasing order), with θ_min set by `policy`.
pub fn n_drop_report(series: &WalshSeries, dts: &[f64], policy: ThetaPolicy) -> Result<NDropReport> {
    if dts.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("step sizes must be strictly decreasing"));
    }
    let base = series.without_constant();
    let mut theta = Vec::with_capacity(dts.len());
    let mut n_drop = Vec::with_capacity(dts.len());
    for &dt in dts {
        let th = policy.theta(dt);
        theta.push(th);
        n_drop.push(threshold_truncate(&base.scaled(dt), th)?.n_drop);
    }
    let monotone = n_drop.windows(2).all(|w| w[1] <= w[0]);
    Ok(NDropReport {
        dt: dts.to_vec(),
        theta,
        n_drop,
        monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelNDrop {
    pub electric: NDropReport,
    pub magnetic: NDropReport,
}

impl ModelNDrop {
    pub fn monotone(&self) -> bool {
        self.electric.monotone && self.magnetic.monotone
    }
}

/// [`n_drop_report`] for both diagonal factors of `model`.
pub fn n_drop_monotonicity_check(model: &HamiltonianModel, dts: &[f64], policy: ThetaPolicy) -> Result<ModelNDrop> {
    Ok(ModelNDrop {
        electric: n_drop_report(&model.electric_series()?, dts, policy)?,
        magnetic: n_drop_report(&model.magnetic_series()?, dts, policy)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ModelConfig;
    use crate::lattice::{Formulation, LatticeSpec};
    use crate::linalg::{evolution_operator, max_abs_diff};
    use crate::sim::circuit_unitary;

    fn model(n_q: u32, g: f64) -> HamiltonianModel {
        HamiltonianModel::new(
            LatticeSpec::new(2, 2).unwrap(),
            &ModelConfig::new(n_q, g, Formulation::NonCompact),
        )
        .unwrap()
    }

    #[test]
    fn plan_steps() {
        let p = TrotterPlan::for_duration(TrotterOrder::First, 0.1, 0.3, 0.0, 0.0).unwrap();
        assert_eq!(p.steps, 3);
        assert_eq!(
            TrotterPlan::for_duration(TrotterOrder::First, 0.1, 0.0, 0.0, 0.0)
                .unwrap()
                .steps,
            0
        );
        assert!(TrotterPlan::new(TrotterOrder::First, 0.0, 1, 0.0, 0.0).is_err());
        assert!(TrotterPlan::new(TrotterOrder::First, 0.1, 1, -1.0, 0.0).is_err());
        assert_eq!("2".parse::<TrotterOrder>().unwrap(), TrotterOrder::Second);
    }

    #[test]
    fn untruncated_step_is_split_product() {
        let m = model(2, 0.8);
        let dt = 0.07;
        let plan = TrotterPlan::new(TrotterOrder::First, dt, 1, 0.0, 0.0).unwrap();
        let u = circuit_unitary(&step_circuit(&m, &plan).unwrap()).unwrap();
        let h_e = m.electric_matrix().unwrap();
        let d = m.magnetic_diagonal().unwrap();
        let h_b = CMatrix::from_fn(d.len(), d.len(), |i, j| {
            Complex64::new(if i == j { d[i] } else { 0.0 }, 0.0)
        });
        let expect = evolution_operator(&h_b, dt) * evolution_operator(&h_e, dt);
        assert!(max_abs_diff(&u, &expect) < 1e-10);

        let plan2 = TrotterPlan::new(TrotterOrder::Second, dt, 1, 0.0, 0.0).unwrap();
        let u2 = circuit_unitary(&step_circuit(&m, &plan2).unwrap()).unwrap();
        let half = evolution_operator(&h_e, dt / 2.0);
        assert!(max_abs_diff(&u2, &(&half * evolution_operator(&h_b, dt) * &half)) < 1e-10);
    }

    #[test]
    fn commutator_matches_dense_product() {
        let m = model(2, 1.3);
        let a = m.electric_matrix().unwrap();
        let d = m.magnetic_diagonal().unwrap();
        let b = CMatrix::from_fn(d.len(), d.len(), |i, j| {
            Complex64::new(if i == j { d[i] } else { 0.0 }, 0.0)
        });
        let c = &a * &b - &b * &a;
        let dense = crate::linalg::spectral_norm(&c);
        assert!((commutator_norm(&m).unwrap() - dense).abs() < 1e-9 * dense.max(1.0));
    }

    #[test]
    fn n_drop_policies() {
        let s = WalshSeries::from_entries(3, (1..8).map(|j| (j, 0.01 * j as f64))).unwrap();
        let dts = [0.4, 0.2, 0.1, 0.05];
        let r = n_drop_report(&s, &dts, ThetaPolicy::PerDt2(1.0)).unwrap();
        assert!(r.monotone);
        assert_eq!(r.n_drop, vec![7, 7, 4, 2]);
        let r = n_drop_report(&s, &dts, ThetaPolicy::Absolute(0.01)).unwrap();
        assert!(r.n_drop.windows(2).all(|w| w[1] >= w[0]));
        assert!(n_drop_report(&s, &[0.1, 0.2], ThetaPolicy::PerDt(1.0)).is_err());
    }
}
