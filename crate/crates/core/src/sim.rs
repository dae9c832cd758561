//! Dense statevector simulation, exact reference evolution and the
//! return-probability observable |⟨Ψ₀^E|U(t)|Ψ₀^E⟩|².

use num_complex::Complex64;

use crate::circuit::{plaquette_qft, Circuit, Gate};
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::hamiltonian::HamiltonianModel;
use crate::linalg::{evolution_operator, hermitian_eigen, spectral_norm, CMatrix};
use crate::trotter::{step_circuit, TrotterPlan};

/// Widest register the simulator will allocate.
pub const MAX_SIM_QUBITS: u32 = 26;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    width: u32,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn basis(width: u32, index: usize) -> Result<Self> {
        if width > MAX_SIM_QUBITS {
            return Err(Error::Resource {
                what: "statevector",
                needed: width as usize,
                limit: MAX_SIM_QUBITS as usize,
            });
        }
        let len = 1usize << width;
        if index >= len {
            return Err(domain(format!("basis index {index} out of range for {width} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { width, amps })
    }

    pub fn zero(width: u32) -> Result<Self> {
        Self::basis(width, 0)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(domain(format!("{} amplitudes is not a power of two", amps.len())));
        }
        Ok(Self {
            width: amps.len().trailing_zeros(),
            amps,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

fn bit(i: usize, q: u32) -> bool {
    (i >> q) & 1 == 1
}

/// `offset` is the global index of `chunk[0]`; pair gates only ever see
/// chunks aligned above their highest qubit.
fn gate_kernel(chunk: &mut [Complex64], offset: usize, g: &Gate) {
    match *g {
        Gate::Rz { theta, q } => {
            let p0 = Complex64::from_polar(1.0, -theta / 2.0);
            let p1 = Complex64::from_polar(1.0, theta / 2.0);
            for (i, a) in chunk.iter_mut().enumerate() {
                *a *= if bit(i + offset, q) { p1 } else { p0 };
            }
        }
        Gate::CPhase {
            lambda,
            control,
            target,
        } => {
            let p = Complex64::from_polar(1.0, lambda);
            for (i, a) in chunk.iter_mut().enumerate() {
                if bit(i + offset, control) && bit(i + offset, target) {
                    *a *= p;
                }
            }
        }
        Gate::H { q } => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let m = 1usize << q;
            for i in 0..chunk.len() {
                if i & m == 0 {
                    let (a, b) = (chunk[i], chunk[i | m]);
                    chunk[i] = (a + b) * s;
                    chunk[i | m] = (a - b) * s;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let m = 1usize << target;
            for i in 0..chunk.len() {
                if bit(i, control) && i & m == 0 {
                    chunk.swap(i, i | m);
                }
            }
        }
        Gate::Swap { a, b } => {
            let (ma, mb) = (1usize << a, 1usize << b);
            for i in 0..chunk.len() {
                if i & ma != 0 && i & mb == 0 {
                    chunk.swap(i, i ^ ma ^ mb);
                }
            }
        }
    }
}

/// Chunk length for independent parallel work on `g`.
fn block_len(g: &Gate) -> usize {
    match *g {
        Gate::Rz { .. } | Gate::CPhase { .. } => DIAGONAL_BLOCK,
        Gate::H { q } => 2 << q,
        Gate::Cnot { control, target } => 2 << control.max(target),
        Gate::Swap { a, b } => 2 << a.max(b),
    }
}

const DIAGONAL_BLOCK: usize = 1 << 12;

/// Apply `circuit` in place, including its global phase.
pub fn apply(circuit: &Circuit, state: &mut Statevector) -> Result<()> {
    apply_with(circuit, state, Exec::default())
}

pub fn apply_with(circuit: &Circuit, state: &mut Statevector, exec: Exec) -> Result<()> {
    if circuit.width() != state.width {
        return Err(domain(format!(
            "{}-qubit circuit applied to a {}-qubit state",
            circuit.width(),
            state.width
        )));
    }
    for g in circuit.gates() {
        let block = block_len(g);
        exec.for_chunks(&mut state.amps, block, |i, c| gate_kernel(c, i * block, g));
    }
    if circuit.global_phase() != 0.0 {
        let p = Complex64::from_polar(1.0, circuit.global_phase());
        for a in state.amps.iter_mut() {
            *a *= p;
        }
    }
    Ok(())
}

/// Apply to a copy.
pub fn run(circuit: &Circuit, state: &Statevector) -> Result<Statevector> {
    let mut s = state.clone();
    apply(circuit, &mut s)?;
    Ok(s)
}

/// Dense unitary, one simulated column per basis state.
pub fn circuit_unitary(circuit: &Circuit) -> Result<CMatrix> {
    circuit_unitary_with(circuit, Exec::default())
}

pub fn circuit_unitary_with(circuit: &Circuit, exec: Exec) -> Result<CMatrix> {
    let width = circuit.width();
    if width > 14 {
        return Err(Error::Resource {
            what: "circuit unitary",
            needed: width as usize,
            limit: 14,
        });
    }
    let dim = 1usize << width;
    let cols: Vec<usize> = (0..dim).collect();
    let columns = exec.map(&cols, |&k| -> Result<Vec<Complex64>> {
        let mut s = Statevector::basis(width, k)?;
        apply_with(circuit, &mut s, Exec::Sequential)?;
        Ok(s.amps)
    });
    let mut u = CMatrix::zeros(dim, dim);
    for (k, col) in columns.into_iter().enumerate() {
        for (r, v) in col?.into_iter().enumerate() {
            u[(r, k)] = v;
        }
    }
    Ok(u)
}

/// Every rotor at r = 0 (grid index N/2), mapped to the magnetic basis by
/// the inverse per-plaquette transform.
pub fn electric_ground_state(model: &HamiltonianModel) -> Result<Statevector> {
    let n_q = model.n_q();
    let levels = 1usize << n_q;
    if !levels.is_multiple_of(2) {
        return Err(domain("the rotor grid has no zero for an odd number of levels"));
    }
    let index = (0..model.n_p()).fold(0usize, |s, p| s | (levels / 2) << (p * n_q as usize));
    let mut psi = Statevector::basis(model.width(), index)?;
    apply(&plaquette_qft(model.n_p(), n_q, true), &mut psi)?;
    Ok(psi)
}

/// e^{-iHt} from the dense Hamiltonian.
pub fn exact_evolution(model: &HamiltonianModel, t: f64) -> Result<CMatrix> {
    Ok(evolution_operator(&model.dense_matrix()?, t))
}

/// |⟨Ψ₀^E|U|Ψ₀^E⟩|² with U = (step circuit)^steps.
pub fn loschmidt(model: &HamiltonianModel, plan: &TrotterPlan) -> Result<f64> {
    let psi0 = electric_ground_state(model)?;
    let mut psi = psi0.clone();
    if plan.steps > 0 {
        let step = step_circuit(model, plan)?;
        for _ in 0..plan.steps {
            apply(&step, &mut psi)?;
        }
    }
    Ok(psi0.inner(&psi).norm_sqr())
}

/// Dense unitary of `plan.steps` repetitions of the step circuit.
pub fn trotter_unitary(model: &HamiltonianModel, plan: &TrotterPlan) -> Result<CMatrix> {
    let dim = 1usize << model.width();
    let mut u = CMatrix::identity(dim, dim);
    if plan.steps == 0 {
        return Ok(u);
    }
    let step = circuit_unitary(&step_circuit(model, plan)?)?;
    for _ in 0..plan.steps {
        u = &step * u;
    }
    Ok(u)
}

/// ‖U_circuit(t) − e^{−iHt}‖ in the spectral norm, t = steps·δt.
pub fn trotter_error(model: &HamiltonianModel, plan: &TrotterPlan) -> Result<f64> {
    let u = trotter_unitary(model, plan)?;
    Ok(spectral_norm(&(u - exact_evolution(model, plan.time())?)))
}

/// The same observable under exact evolution for time `t`.
pub fn exact_loschmidt(model: &HamiltonianModel, t: f64) -> Result<f64> {
    let psi0 = electric_ground_state(model)?;
    let (values, vectors) = hermitian_eigen(&model.dense_matrix()?);
    let mut amp = Complex64::new(0.0, 0.0);
    for (k, e) in values.iter().enumerate() {
        let c: Complex64 = vectors
            .column(k)
            .iter()
            .zip(psi0.amplitudes())
            .map(|(v, a)| v.conj() * a)
            .sum();
        amp += Complex64::from_polar(c.norm_sqr(), -e * t);
    }
    Ok(amp.norm_sqr())
}
