//! Electric and magnetic Hamiltonian terms, their diagonals and Walsh
//! series, dense matrices for small systems, spectra and the plaquette
//! expectation value.
//!
//! Register layout: plaquette `p` owns qubits `p·n_q .. (p+1)·n_q`, and
//! qubit `p·n_q + b` holds bit `b` of the grid index `l_p`. The full
//! Hamiltonian is `H = F† diag(H_E^(e)) F + diag(H_B^(m))` with `F` the
//! per-plaquette transform of [`crate::linalg::dft_matrix`].

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{Basis, Betas, Digitization, Formulation, LatticeSpec, WeaveMatrix};
use crate::linalg::{dft_matrix, hermitian_eigen, hermitian_eigenvalues, CMatrix, CVector};
use crate::walsh::{embed, fwt, merge, DiagonalValues, WalshSeries};

pub const DEFAULT_FULL_DIAG_QUBITS: usize = 14;
pub const DEFAULT_TERM_QUBITS: usize = 22;

/// Largest register handled by direct evaluation of full diagonals.
const MAX_DIAGONAL_QUBITS: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseLimits {
    /// Register width allowed for dense matrices and diagonalization.
    pub full_diag: usize,
    /// Register width allowed for a single term's diagonal.
    pub term: usize,
}

impl Default for DenseLimits {
    fn default() -> Self {
        Self {
            full_diag: DEFAULT_FULL_DIAG_QUBITS,
            term: DEFAULT_TERM_QUBITS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// R̂_i R̂_j, diagonal in the electric basis.
    Rotor,
    /// B̂_i B̂_j, diagonal in the magnetic basis.
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearTerm {
    pub i: usize,
    pub j: usize,
    pub coefficient: f64,
    pub kind: FieldKind,
}

/// prefactor · cos(Σ c_p B̂_p).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineTerm {
    pub support: Vec<(usize, f64)>,
    pub prefactor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Term {
    Bilinear(BilinearTerm),
    Cosine(CosineTerm),
}

impl Term {
    /// Plaquettes in the order used for the term's local register.
    pub fn plaquettes(&self) -> Vec<usize> {
        match self {
            Term::Bilinear(b) if b.i == b.j => vec![b.i],
            Term::Bilinear(b) => vec![b.i, b.j],
            Term::Cosine(c) => c.support.iter().map(|s| s.0).collect(),
        }
    }

    fn uses_rotor_grid(&self) -> bool {
        matches!(
            self,
            Term::Bilinear(BilinearTerm {
                kind: FieldKind::Rotor,
                ..
            })
        )
    }

    /// Value at the given grid values, one per support plaquette.
    fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Term::Bilinear(b) if b.i == b.j => b.coefficient * v[0] * v[0],
            Term::Bilinear(b) => b.coefficient * v[0] * v[1],
            Term::Cosine(c) => {
                let arg: f64 = c.support.iter().zip(v).map(|(s, x)| s.1 * x).sum();
                c.prefactor * arg.cos()
            }
        }
    }

    fn grids(&self, d: &Digitization) -> Vec<Vec<f64>> {
        self.plaquettes()
            .into_iter()
            .map(|p| {
                if self.uses_rotor_grid() {
                    d.r_values(p)
                } else {
                    d.b_values(p)
                }
            })
            .collect()
    }
}

/// x^T Q x · scale as bilinears; near-zero entries of Q (rounding residue
/// of a basis rotation) are skipped.
fn quadratic_terms(q: &DMatrix<f64>, scale: f64, kind: FieldKind) -> Vec<BilinearTerm> {
    let tol = 1e-12 * q.amax();
    let n = q.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (v, mult) = if i == j {
                (q[(i, i)], 1.0)
            } else {
                (0.5 * (q[(i, j)] + q[(j, i)]), 2.0)
            };
            if v.abs() > tol {
                out.push(BilinearTerm {
                    i,
                    j,
                    coefficient: scale * mult * v,
                    kind,
                });
            }
        }
    }
    out
}

fn check_weave(lattice: &LatticeSpec, weave: &WeaveMatrix) -> Result<()> {
    if weave.n_p() != lattice.n_p() {
        return Err(domain(format!(
            "weave is for N_p = {}, lattice {lattice} has N_p = {}",
            weave.n_p(),
            lattice.n_p()
        )));
    }
    Ok(())
}

/// (g²/2) Rᵀ Wᵀ Q_E W R expanded into bilinears.
pub fn electric_terms(lattice: &LatticeSpec, weave: &WeaveMatrix, g: f64) -> Result<Vec<BilinearTerm>> {
    check_weave(lattice, weave)?;
    let w = weave.w();
    let q = w.transpose() * lattice.electric_form() * w;
    Ok(quadratic_terms(&q, g * g / 2.0, FieldKind::Rotor))
}

/// Compact: one cosine per row of M with prefactor −1/g². Non-compact:
/// (1/2g²) Bᵀ Wᵀ Q_B W B expanded into bilinears.
pub fn magnetic_terms(lattice: &LatticeSpec, d: &Digitization, weave: &WeaveMatrix) -> Result<Vec<Term>> {
    check_weave(lattice, weave)?;
    match d.formulation {
        Formulation::Compact => Ok((0..=weave.n_p())
            .map(|c| {
                Term::Cosine(CosineTerm {
                    support: weave.cosine_support(c),
                    prefactor: -1.0 / (d.g * d.g),
                })
            })
            .collect()),
        Formulation::NonCompact => {
            let w = weave.w();
            let q = w.transpose() * lattice.magnetic_form() * w;
            Ok(quadratic_terms(&q, 0.5 / (d.g * d.g), FieldKind::Field)
                .into_iter()
                .map(Term::Bilinear)
                .collect())
        }
    }
}

/// A term's diagonal on its own register: support plaquette `a` holds
/// digits `a·n_q..(a+1)·n_q`, first plaquette most significant, so for a
/// single plaquette the values come out in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDiagonal {
    pub plaquettes: Vec<usize>,
    pub values: DiagonalValues,
}

impl TermDiagonal {
    /// Global register qubit for each local qubit of `values`.
    pub fn positions(&self, n_q: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.plaquettes.len() * n_q as usize);
        for &p in &self.plaquettes {
            for b in 0..n_q {
                out.push(p as u32 * n_q + (n_q - 1 - b));
            }
        }
        out
    }

    /// Walsh series of the term on the full `width`-qubit register.
    pub fn series(&self, n_q: u32, width: u32) -> Result<WalshSeries> {
        embed(&fwt(&self.values), &self.positions(n_q), width)
    }
}

pub fn diagonal_of_term(term: &Term, d: &Digitization, limit_qubits: usize) -> Result<TermDiagonal> {
    let plaquettes = term.plaquettes();
    if plaquettes.is_empty() {
        return Err(domain("term with empty support"));
    }
    if let Some(&p) = plaquettes.iter().find(|&&p| p >= d.n_p()) {
        return Err(domain(format!("term touches plaquette {p}, N_p = {}", d.n_p())));
    }
    let s = plaquettes.len();
    let nq = d.n_q as usize;
    let width = s * nq;
    if width > limit_qubits {
        return Err(Error::Resource {
            what: "term diagonal",
            needed: width,
            limit: limit_qubits,
        });
    }
    let grids = term.grids(d);
    let mask = (1usize << nq) - 1;
    let mut v = vec![0.0; s];
    let values = (0..1usize << width)
        .map(|k| {
            for (a, slot) in v.iter_mut().enumerate() {
                *slot = grids[a][(k >> ((s - 1 - a) * nq)) & mask];
            }
            term.eval(&v)
        })
        .collect();
    Ok(TermDiagonal {
        plaquettes,
        values: DiagonalValues::new(values)?,
    })
}

/// Model parameters; `b_max` overrides the prescriptions when set.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub n_q: u32,
    pub g: f64,
    pub formulation: Formulation,
    pub weave: Option<WeaveMatrix>,
    pub betas: Option<Betas>,
    pub b_max: Option<Vec<f64>>,
    pub limits: DenseLimits,
}

impl ModelConfig {
    pub fn new(n_q: u32, g: f64, formulation: Formulation) -> Self {
        Self {
            n_q,
            g,
            formulation,
            weave: None,
            betas: None,
            b_max: None,
            limits: DenseLimits::default(),
        }
    }

    pub fn weaved(mut self, weave: WeaveMatrix) -> Self {
        self.weave = Some(weave);
        self
    }

    pub fn with_betas(mut self, betas: Betas) -> Self {
        self.betas = Some(betas);
        self
    }

    pub fn with_b_max(mut self, b_max: Vec<f64>) -> Self {
        self.b_max = Some(b_max);
        self
    }

    pub fn with_limits(mut self, limits: DenseLimits) -> Self {
        self.limits = limits;
        self
    }
}

#[derive(Debug, Clone)]
pub struct HamiltonianModel {
    lattice: LatticeSpec,
    digitization: Digitization,
    weave: WeaveMatrix,
    electric: Vec<BilinearTerm>,
    magnetic: Vec<Term>,
    limits: DenseLimits,
}

impl HamiltonianModel {
    pub fn new(lattice: LatticeSpec, cfg: &ModelConfig) -> Result<Self> {
        let n_p = lattice.n_p();
        let digitization = match &cfg.b_max {
            Some(b) => {
                if b.len() != n_p {
                    return Err(domain(format!("{} b_max values for N_p = {n_p}", b.len())));
                }
                let basis = if cfg.weave.is_some() {
                    Basis::Weaved
                } else {
                    Basis::Original
                };
                Digitization::new(cfg.n_q, cfg.g, b.clone(), cfg.formulation, basis)?
            }
            None => Digitization::prescribed(
                n_p,
                cfg.n_q,
                cfg.g,
                cfg.formulation,
                cfg.weave.as_ref(),
                cfg.betas.as_ref(),
            )?,
        };
        let weave = cfg.weave.clone().unwrap_or_else(|| WeaveMatrix::identity(n_p));
        let width = n_p * cfg.n_q as usize;
        if width > 63 {
            return Err(Error::Resource {
                what: "register",
                needed: width,
                limit: 63,
            });
        }
        let electric = electric_terms(&lattice, &weave, cfg.g)?;
        let magnetic = magnetic_terms(&lattice, &digitization, &weave)?;
        Ok(Self {
            lattice,
            digitization,
            weave,
            electric,
            magnetic,
            limits: cfg.limits,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn digitization(&self) -> &Digitization {
        &self.digitization
    }

    pub fn weave(&self) -> &WeaveMatrix {
        &self.weave
    }

    pub fn electric(&self) -> &[BilinearTerm] {
        &self.electric
    }

    pub fn magnetic(&self) -> &[Term] {
        &self.magnetic
    }

    pub fn limits(&self) -> DenseLimits {
        self.limits
    }

    pub fn n_q(&self) -> u32 {
        self.digitization.n_q
    }

    pub fn n_p(&self) -> usize {
        self.lattice.n_p()
    }

    pub fn g(&self) -> f64 {
        self.digitization.g
    }

    /// Total register width N_p·n_q.
    pub fn width(&self) -> u32 {
        (self.n_p() * self.n_q() as usize) as u32
    }

    fn electric_as_terms(&self) -> Vec<Term> {
        self.electric.iter().cloned().map(Term::Bilinear).collect()
    }

    fn series_of(&self, terms: &[Term]) -> Result<WalshSeries> {
        let parts = terms
            .iter()
            .map(|t| diagonal_of_term(t, &self.digitization, self.limits.term)?.series(self.n_q(), self.width()))
            .collect::<Result<Vec<_>>>()?;
        if parts.is_empty() {
            return Ok(WalshSeries::empty(self.width()));
        }
        merge(&parts)
    }

    /// H_E^(e) on the full register, per-term series merged.
    pub fn electric_series(&self) -> Result<WalshSeries> {
        self.series_of(&self.electric_as_terms())
    }

    /// H_B^(m) on the full register, per-term series merged.
    pub fn magnetic_series(&self) -> Result<WalshSeries> {
        self.series_of(&self.magnetic)
    }

    fn direct_diagonal(&self, terms: &[Term]) -> Result<Vec<f64>> {
        let width = self.width() as usize;
        if width > MAX_DIAGONAL_QUBITS {
            return Err(Error::Resource {
                what: "register diagonal",
                needed: width,
                limit: MAX_DIAGONAL_QUBITS,
            });
        }
        let nq = self.n_q() as usize;
        let mask = (1usize << nq) - 1;
        let mut diag = vec![0.0; 1 << width];
        let mut v = Vec::new();
        for t in terms {
            let plaq = t.plaquettes();
            let grids = t.grids(&self.digitization);
            for (s, slot) in diag.iter_mut().enumerate() {
                v.clear();
                v.extend(plaq.iter().zip(&grids).map(|(&p, gr)| gr[(s >> (p * nq)) & mask]));
                *slot += t.eval(&v);
            }
        }
        Ok(diag)
    }

    /// H_E^(e) evaluated directly on every register basis state.
    pub fn electric_diagonal(&self) -> Result<Vec<f64>> {
        self.direct_diagonal(&self.electric_as_terms())
    }

    /// H_B^(m) evaluated directly on every register basis state.
    pub fn magnetic_diagonal(&self) -> Result<Vec<f64>> {
        self.direct_diagonal(&self.magnetic)
    }

    fn check_dense(&self) -> Result<()> {
        let width = self.width() as usize;
        if width > self.limits.full_diag {
            return Err(Error::Resource {
                what: "dense Hamiltonian",
                needed: width,
                limit: self.limits.full_diag,
            });
        }
        Ok(())
    }

    /// F† diag(H_E^(e)) F as a dense matrix in the magnetic basis.
    pub fn electric_matrix(&self) -> Result<CMatrix> {
        self.check_dense()?;
        let d = &self.digitization;
        let nq = self.n_q() as usize;
        let levels = d.levels();
        let mask = levels - 1;
        let dim = 1usize << self.width();
        let f = dft_matrix(levels);
        let conj = |r: Vec<f64>| -> CMatrix {
            let diag = CMatrix::from_diagonal(&CVector::from_iterator(
                levels,
                r.into_iter().map(|x| Complex64::new(x, 0.0)),
            ));
            f.adjoint() * diag * &f
        };
        let rot: Vec<CMatrix> = (0..self.n_p()).map(|p| conj(d.r_values(p))).collect();
        let rot2: Vec<CMatrix> = (0..self.n_p())
            .map(|p| conj(d.r_values(p).into_iter().map(|x| x * x).collect()))
            .collect();
        let mut h = CMatrix::zeros(dim, dim);
        for t in &self.electric {
            let c = t.coefficient;
            if t.i == t.j {
                let (sh, m) = (t.i * nq, &rot2[t.i]);
                for s in 0..dim {
                    let li = (s >> sh) & mask;
                    let base = s & !(mask << sh);
                    for a in 0..levels {
                        h[(s, base | (a << sh))] += m[(li, a)] * c;
                    }
                }
            } else {
                let (si, sj) = (t.i * nq, t.j * nq);
                let (mi, mj) = (&rot[t.i], &rot[t.j]);
                for s in 0..dim {
                    let (li, lj) = ((s >> si) & mask, (s >> sj) & mask);
                    let base = s & !(mask << si) & !(mask << sj);
                    for a in 0..levels {
                        let x = mi[(li, a)] * c;
                        for b in 0..levels {
                            h[(s, base | (a << si) | (b << sj))] += x * mj[(lj, b)];
                        }
                    }
                }
            }
        }
        Ok(h)
    }

    /// Full Hamiltonian in the magnetic basis.
    pub fn dense_matrix(&self) -> Result<CMatrix> {
        let mut h = self.electric_matrix()?;
        for (s, v) in self.magnetic_diagonal()?.into_iter().enumerate() {
            h[(s, s)] += v;
        }
        Ok(h)
    }

    /// Lowest `count` eigenvalues of the dense Hamiltonian.
    pub fn spectrum(&self, count: usize) -> Result<Vec<f64>> {
        let mut e = hermitian_eigenvalues(&self.dense_matrix()?);
        e.truncate(count);
        Ok(e)
    }

    /// Ground energy and normalized ground state.
    pub fn ground_state(&self) -> Result<(f64, CVector)> {
        let (values, vectors) = hermitian_eigen(&self.dense_matrix()?);
        let v = vectors.column(0).into_owned();
        let norm = v.norm();
        Ok((values[0], v / Complex64::new(norm, 0.0)))
    }
}

/// 1 + g²/(N_p+1)·⟨Ψ₀|H_B|Ψ₀⟩ in the compact theory.
pub fn plaquette_expectation(model: &HamiltonianModel) -> Result<f64> {
    if model.digitization().formulation != Formulation::Compact {
        return Err(domain(
            "the plaquette expectation is defined for the compact formulation",
        ));
    }
    let (_, psi) = model.ground_state()?;
    let hb: f64 = model
        .magnetic_diagonal()?
        .iter()
        .zip(psi.iter())
        .map(|(d, a)| d * a.norm_sqr())
        .sum();
    Ok(plaquette_from_magnetic_energy(hb, model.g(), model.n_p()))
}

pub fn plaquette_from_magnetic_energy(hb: f64, g: f64, n_p: usize) -> f64 {
    1.0 + g * g / (n_p as f64 + 1.0) * hb
}

fn positive_definite_sqrt(q: &DMatrix<f64>, name: &str) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(q.clone());
    let scale = eig.eigenvalues.amax().max(1.0);
    if eig.eigenvalues.iter().any(|&l| l <= 1e-12 * scale) {
        return Err(domain(format!("{name} quadratic form is not positive definite")));
    }
    let root = eig.eigenvalues.map(f64::sqrt);
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose())
}

/// Normal-mode frequencies of (1/2)(g² Rᵀ Q_E R + g⁻² Bᵀ Q_B B): the square
/// roots of the eigenvalues of Q_E Q_B, ascending.
pub fn normal_mode_frequencies(q_e: &DMatrix<f64>, q_b: &DMatrix<f64>) -> Result<Vec<f64>> {
    if q_e.shape() != q_b.shape() || !q_e.is_square() {
        return Err(domain("quadratic forms must be square and of equal size"));
    }
    positive_definite_sqrt(q_e, "electric")?;
    let sb = positive_definite_sqrt(q_b, "magnetic")?;
    let s = &sb * q_e * &sb;
    let s = (&s + s.transpose()) * 0.5;
    let mut w: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().map(|l| l.sqrt()).collect();
    w.sort_by(f64::total_cmp);
    Ok(w)
}

#[derive(PartialEq)]
struct Level(f64, Vec<u32>);

impl Eq for Level {}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Lowest `count` values of Σ_k ω_k (m_k + 1/2), with multiplicity.
pub fn oscillator_levels(omegas: &[f64], count: usize) -> Vec<f64> {
    let energy = |m: &[u32]| -> f64 { omegas.iter().zip(m).map(|(w, &n)| w * (n as f64 + 0.5)).sum() };
    let start = vec![0u32; omegas.len()];
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    heap.push(Level(energy(&start), start.clone()));
    seen.insert(start);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let Some(Level(e, m)) = heap.pop() else { break };
        out.push(e);
        for k in 0..m.len() {
            let mut next = m.clone();
            next[k] += 1;
            if seen.insert(next.clone()) {
                heap.push(Level(energy(&next), next));
            }
        }
    }
    out
}

/// Exact lowest levels of the non-compact theory. Independent of g and of
/// the (orthogonal) operator basis.
pub fn noncompact_spectrum_oracle(lattice: &LatticeSpec, count: usize) -> Result<Vec<f64>> {
    let w = normal_mode_frequencies(&lattice.electric_form(), &lattice.magnetic_form())?;
    Ok(oscillator_levels(&w, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_residual;

    fn two_by_two() -> LatticeSpec {
        LatticeSpec::new(2, 2).unwrap()
    }

    #[test]
    fn electric_terms_original_two_by_two() {
        let terms = electric_terms(&two_by_two(), &WeaveMatrix::identity(3), 1.0).unwrap();
        assert!(terms.len() <= 9);
        assert!(terms.iter().all(|t| t.kind == FieldKind::Rotor));
        // (1/2)(4R0² + 4R1² + 4R2² − 4R0R1 − 4R0R2)
        let find = |i, j| terms.iter().find(|t| t.i == i && t.j == j).map(|t| t.coefficient);
        assert_eq!(find(0, 0), Some(2.0));
        assert_eq!(find(0, 1), Some(-2.0));
        assert_eq!(find(1, 2), None);
    }

    #[test]
    fn weaved_quadratic_form_is_a_rotation() {
        let l = two_by_two();
        let w = crate::lattice::builtin_weave(3).unwrap();
        let terms = electric_terms(&l, &w, 0.7).unwrap();
        let mut q = DMatrix::zeros(3, 3);
        for t in &terms {
            if t.i == t.j {
                q[(t.i, t.i)] += t.coefficient;
            } else {
                q[(t.i, t.j)] += t.coefficient / 2.0;
                q[(t.j, t.i)] += t.coefficient / 2.0;
            }
        }
        let back = w.w() * q * w.w().transpose() * (2.0 / 0.49);
        assert!((back - l.electric_form()).amax() < 1e-12);
    }

    #[test]
    fn magnetic_terms_shapes() {
        let l = two_by_two();
        let d = Digitization::prescribed(3, 2, 0.5, Formulation::NonCompact, None, None).unwrap();
        let terms = magnetic_terms(&l, &d, &WeaveMatrix::identity(3)).unwrap();
        assert_eq!(terms.len(), 6);
        for t in &terms {
            let Term::Bilinear(b) = t else { panic!() };
            assert!((b.coefficient - 4.0).abs() < 1e-12);
        }
        let w = crate::lattice::builtin_weave(3).unwrap();
        let d = Digitization::prescribed(3, 2, 0.5, Formulation::Compact, Some(&w), None).unwrap();
        let terms = magnetic_terms(&l, &d, &w).unwrap();
        assert_eq!(terms.len(), 4);
        let Term::Cosine(last) = &terms[3] else { panic!() };
        assert_eq!(last.support.len(), 1);
        assert!((last.support[0].1 + 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cosine_diagonal_single_plaquette() {
        let d = Digitization::new(2, 0.1, vec![0.298090], Formulation::Compact, Basis::Original).unwrap();
        let t = Term::Cosine(CosineTerm {
            support: vec![(0, 1.0)],
            prefactor: 2.0,
        });
        let diag = diagonal_of_term(&t, &d, 22).unwrap();
        let expect = [0.298090f64.cos(), 0.149045f64.cos(), 1.0, 0.149045f64.cos()];
        for (v, e) in diag.values.values().iter().zip(expect) {
            assert!((v - 2.0 * e).abs() < 1e-14);
        }
        assert_eq!(diag.values.values()[2], 2.0);
        assert!(matches!(diagonal_of_term(&t, &d, 1), Err(Error::Resource { .. })));
    }

    #[test]
    fn rotor_product_is_outer_product() {
        let d = Digitization::new(2, 1.0, vec![1.0, 0.6], Formulation::NonCompact, Basis::Original).unwrap();
        let t = Term::Bilinear(BilinearTerm {
            i: 0,
            j: 1,
            coefficient: 1.0,
            kind: FieldKind::Rotor,
        });
        let diag = diagonal_of_term(&t, &d, 22).unwrap();
        let (r0, r1) = (d.r_values(0), d.r_values(1));
        for (l0, x0) in r0.iter().enumerate() {
            for (l1, x1) in r1.iter().enumerate() {
                assert_eq!(diag.values.values()[l0 * 4 + l1], x0 * x1);
            }
        }
    }

    #[test]
    fn series_and_direct_diagonals_agree() {
        let w = crate::lattice::builtin_weave(3).unwrap();
        for cfg in [
            ModelConfig::new(2, 0.4, Formulation::Compact),
            ModelConfig::new(2, 0.4, Formulation::Compact).weaved(w.clone()),
            ModelConfig::new(2, 1.3, Formulation::NonCompact).weaved(w),
        ] {
            let m = HamiltonianModel::new(two_by_two(), &cfg).unwrap();
            for (series, direct) in [
                (m.magnetic_series().unwrap(), m.magnetic_diagonal().unwrap()),
                (m.electric_series().unwrap(), m.electric_diagonal().unwrap()),
            ] {
                let back = crate::walsh::register_diagonal(&series).unwrap();
                for (a, b) in back.iter().zip(&direct) {
                    assert!((a - b).abs() < 1e-10, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn dense_matrix_is_hermitian_with_nonnegative_electric_part() {
        let m = HamiltonianModel::new(two_by_two(), &ModelConfig::new(2, 0.3, Formulation::Compact)).unwrap();
        let h = m.dense_matrix().unwrap();
        assert!(hermiticity_residual(&h) < 1e-10);
        let he = m.electric_matrix().unwrap();
        assert!(hermitian_eigenvalues(&he)[0] > -1e-9);
    }

    #[test]
    fn oracle_basics() {
        let levels = oscillator_levels(&[1.0], 4);
        assert_eq!(levels, vec![0.5, 1.5, 2.5, 3.5]);
        let e = noncompact_spectrum_oracle(&two_by_two(), 10).unwrap();
        let s2 = 2f64.sqrt();
        assert!((e[0] - (2.0 + s2)).abs() < 1e-12);
        assert!((e[1] - (4.0 + s2)).abs() < 1e-12 && (e[2] - e[1]).abs() < 1e-12);
        assert!((e[3] - (2.0 + 3.0 * s2)).abs() < 1e-12);
        let singular = DMatrix::from_element(2, 2, 1.0);
        assert!(normal_mode_frequencies(&singular, &DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn plaquette_formula_zero_point() {
        assert_eq!(plaquette_from_magnetic_energy(-4.0 / 0.25, 0.5, 3), 0.0);
    }
}
