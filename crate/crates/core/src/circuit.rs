//! Gate circuits: Walsh-series synthesis, CNOT cancellation and the QFT.
//!
//! `Rz(θ) = diag(e^{-iθ/2}, e^{iθ/2})`, so `Rz(-2a)` on a qubit holding the
//! parity of mask `j` implements `e^{i a w_j}`. The identity coefficient of a
//! series is carried as `global_phase` (the circuit implements
//! `e^{i·global_phase}·U_gates`) and never becomes a gate.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::walsh::{gray_rank, msb, threshold_truncate, WalshIndex, WalshSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Gate {
    Rz { theta: f64, q: u32 },
    Cnot { control: u32, target: u32 },
    H { q: u32 },
    CPhase { lambda: f64, control: u32, target: u32 },
    Swap { a: u32, b: u32 },
}

impl Gate {
    fn qubits(&self) -> (u32, Option<u32>) {
        match *self {
            Gate::Rz { q, .. } | Gate::H { q } => (q, None),
            Gate::Cnot { control, target } | Gate::CPhase { control, target, .. } => (control, Some(target)),
            Gate::Swap { a, b } => (a, Some(b)),
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rz { theta, q } => Gate::Rz { theta: -theta, q },
            Gate::CPhase {
                lambda,
                control,
                target,
            } => Gate::CPhase {
                lambda: -lambda,
                control,
                target,
            },
            g => g,
        }
    }

    fn relabeled(&self, map: impl Fn(u32) -> u32) -> Gate {
        match *self {
            Gate::Rz { theta, q } => Gate::Rz { theta, q: map(q) },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: map(control),
                target: map(target),
            },
            Gate::H { q } => Gate::H { q: map(q) },
            Gate::CPhase {
                lambda,
                control,
                target,
            } => Gate::CPhase {
                lambda,
                control: map(control),
                target: map(target),
            },
            Gate::Swap { a, b } => Gate::Swap { a: map(a), b: map(b) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Circuit {
    width: u32,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(width: u32) -> Self {
        Self {
            width,
            gates: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phi: f64) {
        self.global_phase += phi;
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let (a, b) = gate.qubits();
        if a >= self.width || b.is_some_and(|b| b >= self.width) {
            return Err(domain(format!("{gate:?} outside a {}-qubit circuit", self.width)));
        }
        if b == Some(a) {
            return Err(domain(format!("{gate:?} acts twice on qubit {a}")));
        }
        if let Gate::Rz { theta, .. } | Gate::CPhase { lambda: theta, .. } = gate {
            if !theta.is_finite() {
                return Err(domain(format!("{gate:?} has a non-finite angle")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Push gates known to be in range.
    fn emit(&mut self, gate: Gate) {
        debug_assert!({
            let (a, b) = gate.qubits();
            a < self.width && b.is_none_or(|b| b < self.width && b != a)
        });
        self.gates.push(gate);
    }

    /// Run `other` after `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.width != self.width {
            return Err(domain(format!(
                "cannot append {}-qubit circuit to {}-qubit circuit",
                other.width, self.width
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        self.global_phase += other.global_phase;
        Ok(())
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            global_phase: -self.global_phase,
        }
    }

    /// Place qubit `i` on `positions[i]` of a `width`-qubit circuit.
    pub fn embed(&self, positions: &[u32], width: u32) -> Result<Circuit> {
        if positions.len() != self.width as usize {
            return Err(domain(format!(
                "{} positions for a {}-qubit circuit",
                positions.len(),
                self.width
            )));
        }
        let mut out = Circuit::new(width);
        out.global_phase = self.global_phase;
        for g in &self.gates {
            out.push(g.relabeled(|q| positions[q as usize]))?;
        }
        Ok(out)
    }

    pub fn counts(&self) -> GateCounts {
        gate_count(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub rz: usize,
    pub cnot: usize,
    pub h: usize,
    pub cphase: usize,
    pub swap: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.rz + self.cnot + self.h + self.cphase + self.swap
    }
}

impl std::ops::Add for GateCounts {
    type Output = GateCounts;

    fn add(self, o: GateCounts) -> GateCounts {
        GateCounts {
            rz: self.rz + o.rz,
            cnot: self.cnot + o.cnot,
            h: self.h + o.h,
            cphase: self.cphase + o.cphase,
            swap: self.swap + o.swap,
        }
    }
}

pub fn gate_count(c: &Circuit) -> GateCounts {
    let mut n = GateCounts::default();
    for g in &c.gates {
        match g {
            Gate::Rz { .. } => n.rz += 1,
            Gate::Cnot { .. } => n.cnot += 1,
            Gate::H { .. } => n.h += 1,
            Gate::CPhase { .. } => n.cphase += 1,
            Gate::Swap { .. } => n.swap += 1,
        }
    }
    n
}

/// Fault-tolerant T-count estimate for `rz` rotations at precision `eps`
/// (1.15·log2(1/ε) each). Reported only, never synthesized.
pub fn t_count_estimate(rz: usize, eps: f64) -> f64 {
    rz as f64 * 1.15 * (1.0 / eps).log2()
}

fn bits(mut x: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        (x != 0).then(|| {
            let b = x.trailing_zeros();
            x &= x - 1;
            b
        })
    })
}

/// e^{i a w_j}: CNOT ladder onto the most significant qubit, Rz(−2a), and
/// the mirrored ladder.
pub fn exp_walsh(j: WalshIndex, a: f64) -> Result<Circuit> {
    let t = j
        .msb()
        .ok_or_else(|| domain("the identity Walsh operator is a global phase, not a circuit"))?;
    let controls: Vec<u32> = bits(j.mask() & !(1u64 << t)).collect();
    let mut c = Circuit::new(j.n());
    for &q in &controls {
        c.emit(Gate::Cnot { control: q, target: t });
    }
    c.emit(Gate::Rz { theta: -2.0 * a, q: t });
    for &q in controls.iter().rev() {
        c.emit(Gate::Cnot { control: q, target: t });
    }
    Ok(c)
}

/// Sequency-ordered synthesis: within each most-significant-qubit group the
/// target qubit tracks the parity of the current mask, and the CNOTs between
/// neighbours are the set bits of their XOR.
fn synthesize(series: &WalshSeries) -> Circuit {
    let mut c = Circuit::new(series.n());
    c.global_phase = series.constant();
    let mut ops: Vec<(u64, f64)> = series.iter().filter(|e| e.0 != 0).collect();
    ops.sort_by_key(|e| gray_rank(e.0));
    let mut i = 0;
    while i < ops.len() {
        let t = msb(ops[i].0).expect("nonzero mask");
        let home = 1u64 << t;
        let mut cur = home;
        while i < ops.len() && msb(ops[i].0) == Some(t) {
            let (m, a) = ops[i];
            for q in bits(cur ^ m) {
                c.emit(Gate::Cnot { control: q, target: t });
            }
            cur = m;
            c.emit(Gate::Rz { theta: -2.0 * a, q: t });
            i += 1;
        }
        for q in bits(cur ^ home) {
            c.emit(Gate::Cnot { control: q, target: t });
        }
    }
    c
}

/// Circuit for e^{i Σ a_j w_j}; a full series on n qubits costs 2^n − 1 Rz
/// and 2^n − 2 CNOT.
pub fn exact_circuit(series: &WalshSeries) -> Circuit {
    simplify_cnots(&synthesize(series)).expect("synthesis emits only Rz and CNOT")
}

/// Drop j ≠ 0 entries with |a_j| < θ_min/2, then synthesize. The identity
/// coefficient costs no gates and is always kept as global phase.
pub fn truncated_circuit(series: &WalshSeries, theta_min: f64) -> Result<Circuit> {
    let kept = threshold_truncate(&series.without_constant(), theta_min)?.kept;
    let phase = series.constant();
    let with_phase = if phase != 0.0 {
        let entries = kept.iter().chain(std::iter::once((0, phase)));
        WalshSeries::from_entries(series.n(), entries)?
    } else {
        kept
    };
    Ok(exact_circuit(&with_phase))
}

/// Whether `g` can be moved past CNOT(c → t).
fn commutes_with_cnot(g: &Gate, c: u32, t: u32) -> bool {
    match *g {
        Gate::Rz { q, .. } => q != t,
        Gate::Cnot { control, target } => control != t && target != c,
        _ => false,
    }
}

/// Cancel CNOT pairs, moving each new CNOT backwards past gates it commutes
/// with (Rz off its target, CNOTs sharing its control or target or disjoint
/// from it). Repeats until nothing changes.
pub fn simplify_cnots(circuit: &Circuit) -> Result<Circuit> {
    if let Some(g) = circuit
        .gates
        .iter()
        .find(|g| !matches!(g, Gate::Rz { .. } | Gate::Cnot { .. }))
    {
        return Err(domain(format!("simplify_cnots handles Rz and CNOT only, found {g:?}")));
    }
    let mut gates = circuit.gates.clone();
    loop {
        let before = gates.len();
        let mut out: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
        for g in gates {
            let mut cancelled = false;
            if let Gate::Cnot { control, target } = g {
                for slot in out.iter_mut().rev() {
                    let Some(h) = slot else { continue };
                    if *h == g {
                        *slot = None;
                        cancelled = true;
                        break;
                    }
                    if !commutes_with_cnot(h, control, target) {
                        break;
                    }
                }
            }
            if !cancelled {
                out.push(Some(g));
            }
        }
        gates = out.into_iter().flatten().collect();
        if gates.len() == before {
            break;
        }
    }
    Ok(Circuit {
        width: circuit.width,
        gates,
        global_phase: circuit.global_phase,
    })
}

/// |x⟩ → N^{-1/2} Σ_k e^{2πi xk/N} |k⟩ on a little-endian register, i.e. the
/// matrix of [`crate::linalg::dft_matrix`].
pub fn qft_circuit(n_q: u32) -> Circuit {
    let mut c = Circuit::new(n_q);
    for j in (0..n_q).rev() {
        c.emit(Gate::H { q: j });
        for k in (0..j).rev() {
            c.emit(Gate::CPhase {
                lambda: PI / (1u64 << (j - k)) as f64,
                control: k,
                target: j,
            });
        }
    }
    for i in 0..n_q / 2 {
        c.emit(Gate::Swap { a: i, b: n_q - 1 - i });
    }
    c
}

/// The QFT (or its inverse) on every plaquette block of an `n_p·n_q` register.
pub fn plaquette_qft(n_p: usize, n_q: u32, inverse: bool) -> Circuit {
    let block = if inverse {
        qft_circuit(n_q).inverse()
    } else {
        qft_circuit(n_q)
    };
    let width = n_p as u32 * n_q;
    let mut c = Circuit::new(width);
    for p in 0..n_p as u32 {
        let pos: Vec<u32> = (0..n_q).map(|b| p * n_q + b).collect();
        let placed = block.embed(&pos, width).expect("block fits the register");
        c.append(&placed).expect("same width");
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(n: u32, entries: &[(u64, f64)]) -> WalshSeries {
        WalshSeries::from_entries(n, entries.iter().copied()).unwrap()
    }

    #[test]
    fn exp_walsh_single_qubit() {
        let c = exp_walsh(WalshIndex::new(1, 1).unwrap(), 0.3).unwrap();
        assert_eq!(c.gates(), &[Gate::Rz { theta: -0.6, q: 0 }]);
        assert!(exp_walsh(WalshIndex::new(0, 2).unwrap(), 0.3).is_err());
    }

    #[test]
    fn exp_walsh_worked_example() {
        let c = exp_walsh(WalshIndex::new(13, 4).unwrap(), 0.25).unwrap();
        assert_eq!(
            c.gates(),
            &[
                Gate::Cnot { control: 0, target: 3 },
                Gate::Cnot { control: 2, target: 3 },
                Gate::Rz { theta: -0.5, q: 3 },
                Gate::Cnot { control: 2, target: 3 },
                Gate::Cnot { control: 0, target: 3 },
            ]
        );
    }

    #[test]
    fn full_three_qubit_series() {
        let entries: Vec<(u64, f64)> = (1..8).map(|j| (j, j as f64 * 0.1)).collect();
        let c = exact_circuit(&series(3, &entries));
        let rz: Vec<u64> = c
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::Rz { theta, .. } => Some((-theta / 0.2).round() as u64),
                _ => None,
            })
            .collect();
        assert_eq!(rz, vec![1, 3, 2, 6, 7, 5, 4]);
        assert_eq!(
            c.counts(),
            GateCounts {
                rz: 7,
                cnot: 6,
                ..Default::default()
            }
        );
    }

    #[test]
    fn truncated_worked_example() {
        let entries: Vec<(u64, f64)> = (1..8)
            .map(|j| (j, if j % 2 == 1 && j > 1 { 0.001 } else { 0.1 }))
            .collect();
        let c = truncated_circuit(&series(3, &entries), 0.01).unwrap();
        assert_eq!(
            c.counts(),
            GateCounts {
                rz: 4,
                cnot: 2,
                ..Default::default()
            }
        );
        assert_eq!(
            c.gates(),
            &[
                Gate::Rz { theta: -0.2, q: 0 },
                Gate::Rz { theta: -0.2, q: 1 },
                Gate::Cnot { control: 1, target: 2 },
                Gate::Rz { theta: -0.2, q: 2 },
                Gate::Cnot { control: 1, target: 2 },
                Gate::Rz { theta: -0.2, q: 2 },
            ]
        );
    }

    #[test]
    fn simplify_worked_middle_circuit() {
        // The exact 3-qubit circuit with the θ3, θ5, θ7 rotations removed.
        let mut c = Circuit::new(3);
        for g in [
            Gate::Rz { theta: 0.1, q: 0 },
            Gate::Cnot { control: 0, target: 1 },
            Gate::Cnot { control: 0, target: 1 },
            Gate::Rz { theta: 0.2, q: 1 },
            Gate::Cnot { control: 1, target: 2 },
            Gate::Rz { theta: 0.6, q: 2 },
            Gate::Cnot { control: 0, target: 2 },
            Gate::Cnot { control: 1, target: 2 },
            Gate::Cnot { control: 0, target: 2 },
            Gate::Rz { theta: 0.4, q: 2 },
        ] {
            c.push(g).unwrap();
        }
        assert_eq!(c.counts().cnot, 6);
        let s = simplify_cnots(&c).unwrap();
        assert_eq!(
            s.counts(),
            GateCounts {
                rz: 4,
                cnot: 2,
                ..Default::default()
            }
        );
    }

    #[test]
    fn simplify_basics() {
        let mut c = Circuit::new(2);
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert!(simplify_cnots(&c).unwrap().is_empty());
        c.push(Gate::H { q: 0 }).unwrap();
        assert!(simplify_cnots(&c).is_err());
        // Rz on the target blocks cancellation.
        let mut c = Circuit::new(2);
        for g in [
            Gate::Cnot { control: 0, target: 1 },
            Gate::Rz { theta: 0.3, q: 1 },
            Gate::Cnot { control: 0, target: 1 },
        ] {
            c.push(g).unwrap();
        }
        assert_eq!(simplify_cnots(&c).unwrap().counts().cnot, 2);
    }

    #[test]
    fn qft_counts() {
        assert_eq!(qft_circuit(1).gates(), &[Gate::H { q: 0 }]);
        assert_eq!(
            qft_circuit(3).counts(),
            GateCounts {
                h: 3,
                cphase: 3,
                swap: 1,
                ..Default::default()
            }
        );
        let c = plaquette_qft(3, 2, true);
        assert_eq!(c.width(), 6);
        assert_eq!(
            c.counts(),
            GateCounts {
                h: 6,
                cphase: 3,
                swap: 3,
                ..Default::default()
            }
        );
    }

    #[test]
    fn push_validates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::Cnot { control: 1, target: 1 }).is_err());
        assert!(c.push(Gate::H { q: 2 }).is_err());
        assert!(c.push(Gate::Rz { theta: f64::NAN, q: 0 }).is_err());
        assert!(c.append(&Circuit::new(3)).is_err());
        assert_eq!(gate_count(&Circuit::new(4)), GateCounts::default());
    }

    #[test]
    fn global_phase_recorded() {
        let c = exact_circuit(&series(2, &[(0, 0.7), (1, 0.1)]));
        assert_eq!(c.global_phase(), 0.7);
        assert_eq!(c.counts().rz, 1);
        let t = truncated_circuit(&series(2, &[(0, 1e-9), (1, 0.1)]), 0.1).unwrap();
        assert_eq!(t.global_phase(), 1e-9);
        assert_eq!(t.counts().rz, 1);
    }
}
