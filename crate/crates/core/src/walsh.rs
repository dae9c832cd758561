//! Walsh functions on a qubit register.
//!
//! A Walsh index is a bitmask `j` over the register: bit `q` set means a
//! σ^z factor on qubit `q`. Function samples ([`DiagonalValues`]) are indexed
//! by the grid point `k`, and qubit `q` carries the dyadic digit `k_{q+1}`,
//! i.e. bit `n-1-q` of `k`. Hence
//!
//! ```text
//! w_j(x_k) = (-1)^popcount(j & bitrev_n(k)).
//! ```
//!
//! Everything that lives on the simulator register (little-endian basis
//! index `s`, qubit `q` = bit `q` of `s`) goes through the `*_register`
//! functions instead, which use the natural Hadamard ordering.

use std::cmp::Ordering;

use crate::error::{domain, Result};
use crate::exec::Exec;

/// Widest register a dense transform will accept.
pub const MAX_DENSE_QUBITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WalshIndex {
    mask: u64,
    n: u32,
}

impl WalshIndex {
    pub fn new(mask: u64, n: u32) -> Result<Self> {
        if n > 63 {
            return Err(domain(format!("register width {n} exceeds 63 qubits")));
        }
        if mask >> n != 0 {
            return Err(domain(format!("mask {mask:#b} does not fit in {n} qubits")));
        }
        Ok(Self { mask, n })
    }

    pub fn mask(self) -> u64 {
        self.mask
    }

    pub fn n(self) -> u32 {
        self.n
    }

    /// Most significant set qubit, `None` for the identity.
    pub fn msb(self) -> Option<u32> {
        msb(self.mask)
    }
}

pub(crate) fn msb(mask: u64) -> Option<u32> {
    (mask != 0).then(|| 63 - mask.leading_zeros())
}

/// Reverse the lowest `n` bits of `k`.
pub fn bit_reverse(k: u64, n: u32) -> u64 {
    if n == 0 {
        0
    } else {
        k.reverse_bits() >> (64 - n)
    }
}

/// Samples f(x_k), k = 0..2^n, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalValues {
    n: u32,
    values: Vec<f64>,
}

impl DiagonalValues {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = width_of(values.len())?;
        Ok(Self { n, values })
    }

    /// Build from values indexed by register basis state `s`.
    pub fn from_register_order(values: &[f64]) -> Result<Self> {
        let n = width_of(values.len())?;
        let mut out = vec![0.0; values.len()];
        for (s, v) in values.iter().enumerate() {
            out[bit_reverse(s as u64, n) as usize] = *v;
        }
        Ok(Self { n, values: out })
    }

    /// Values re-indexed by register basis state.
    pub fn to_register_order(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.values.len()];
        for (k, v) in self.values.iter().enumerate() {
            out[bit_reverse(k as u64, self.n) as usize] = *v;
        }
        out
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn width_of(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(domain(format!("length {len} is not a power of two")));
    }
    let n = len.trailing_zeros();
    if n > MAX_DENSE_QUBITS {
        return Err(domain(format!("{n} qubits exceeds the dense limit {MAX_DENSE_QUBITS}")));
    }
    Ok(n)
}

/// Sparse Walsh expansion `Σ a_j w_j`, entries sorted by mask.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WalshSeries {
    n: u32,
    entries: Vec<(u64, f64)>,
}

impl WalshSeries {
    pub fn empty(n: u32) -> Self {
        Self { n, entries: Vec::new() }
    }

    /// Collect `(mask, coefficient)` pairs; duplicate masks are summed and
    /// exact zeros dropped.
    pub fn from_entries(n: u32, entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        if n > 63 {
            return Err(domain(format!("register width {n} exceeds 63 qubits")));
        }
        let mut v: Vec<(u64, f64)> = entries.into_iter().collect();
        for &(m, a) in &v {
            if m >> n != 0 {
                return Err(domain(format!("mask {m:#b} does not fit in {n} qubits")));
            }
            if !a.is_finite() {
                return Err(domain(format!("coefficient for mask {m} is not finite")));
            }
        }
        v.sort_by_key(|e| e.0);
        let mut out: Vec<(u64, f64)> = Vec::with_capacity(v.len());
        for (m, a) in v {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += a,
                _ => out.push((m, a)),
            }
        }
        out.retain(|e| e.1 != 0.0);
        Ok(Self { n, entries: out })
    }

    pub fn single(j: WalshIndex, a: f64) -> Self {
        let entries = if a == 0.0 { vec![] } else { vec![(j.mask, a)] };
        Self { n: j.n, entries }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Coefficient of `mask`, zero when absent.
    pub fn get(&self, mask: u64) -> f64 {
        self.entries
            .binary_search_by_key(&mask, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    /// The identity coefficient a_0.
    pub fn constant(&self) -> f64 {
        self.get(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.1.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        if factor == 0.0 {
            return Self::empty(self.n);
        }
        let entries = self
            .entries
            .iter()
            .map(|&(m, a)| (m, a * factor))
            .filter(|e| e.1 != 0.0)
            .collect();
        Self { n: self.n, entries }
    }

    /// Copy without the identity entry.
    pub fn without_constant(&self) -> Self {
        let entries = self.entries.iter().copied().filter(|e| e.0 != 0).collect();
        Self { n: self.n, entries }
    }
}

/// `(-1)^(Σ j_i k_i)` with `k` read in the dyadic convention.
pub fn walsh_value(j: WalshIndex, k: u64) -> Result<i8> {
    if k >> j.n != 0 {
        return Err(domain(format!("grid index {k} out of range for {} qubits", j.n)));
    }
    Ok(parity_sign(j.mask & bit_reverse(k, j.n)))
}

fn parity_sign(x: u64) -> i8 {
    if x.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Unnormalized in-place Walsh-Hadamard butterfly in natural order.
pub fn wht_in_place(x: &mut [f64], exec: Exec) {
    let len = x.len();
    debug_assert!(len.is_power_of_two());
    let block = crate::exec::PAR_MIN_LEN.min(len);
    exec.for_chunks(x, block, |_, c| wht_serial(c));
    let mut h = block;
    while h < len {
        exec.for_chunks(x, 2 * h, |_, b| {
            let (lo, hi) = b.split_at_mut(h);
            butterfly(lo, hi, exec);
        });
        h *= 2;
    }
}

fn wht_serial(x: &mut [f64]) {
    let mut h = 1;
    while h < x.len() {
        for b in x.chunks_mut(2 * h) {
            let (lo, hi) = b.split_at_mut(h);
            for (a, c) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *c);
                *a = u + v;
                *c = u - v;
            }
        }
        h *= 2;
    }
}

fn butterfly(lo: &mut [f64], hi: &mut [f64], exec: Exec) {
    #[cfg(feature = "parallel")]
    if exec.wide(lo.len()) {
        use rayon::prelude::*;
        lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(a, c)| {
            let (u, v) = (*a, *c);
            *a = u + v;
            *c = u - v;
        });
        return;
    }
    let _ = exec;
    for (a, c) in lo.iter_mut().zip(hi.iter_mut()) {
        let (u, v) = (*a, *c);
        *a = u + v;
        *c = u - v;
    }
}

/// Pruning level for transform output: rounding noise of an `n`-stage
/// butterfly on inputs bounded by `max_abs`.
fn prune_tol(n: u32, max_abs: f64) -> f64 {
    (4.0 * n.max(1) as f64 * f64::EPSILON * max_abs).max(1e-15)
}

fn series_from_dense(n: u32, coeffs: Vec<f64>, max_input: f64) -> WalshSeries {
    let tol = prune_tol(n, max_input);
    let entries = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, a)| a.abs() > tol)
        .map(|(m, a)| (m as u64, a))
        .collect();
    WalshSeries { n, entries }
}

/// a_j = 2^-n Σ_k f(x_k) w_j(x_k).
pub fn fwt(values: &DiagonalValues) -> WalshSeries {
    fwt_with(values, Exec::default())
}

pub fn fwt_with(values: &DiagonalValues, exec: Exec) -> WalshSeries {
    let mut buf = values.to_register_order();
    transform_register(values.n, &mut buf, exec)
}

/// Transform of values indexed by register basis state `s`:
/// a_j = 2^-n Σ_s D(s) (-1)^popcount(j & s).
pub fn fwt_register(values: &[f64]) -> Result<WalshSeries> {
    fwt_register_with(values, Exec::default())
}

pub fn fwt_register_with(values: &[f64], exec: Exec) -> Result<WalshSeries> {
    let n = width_of(values.len())?;
    let mut buf = values.to_vec();
    Ok(transform_register(n, &mut buf, exec))
}

fn transform_register(n: u32, buf: &mut [f64], exec: Exec) -> WalshSeries {
    let max_input = buf.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    wht_in_place(buf, exec);
    let scale = 1.0 / buf.len() as f64;
    let coeffs = buf.iter().map(|v| v * scale).collect();
    series_from_dense(n, coeffs, max_input)
}

/// f(x_k) = Σ_j a_j w_j(x_k).
pub fn inverse_fwt(series: &WalshSeries) -> Result<DiagonalValues> {
    let reg = register_diagonal(series)?;
    DiagonalValues::from_register_order(&reg)
}

/// Dense diagonal over the register, indexed by basis state.
pub fn register_diagonal(series: &WalshSeries) -> Result<Vec<f64>> {
    register_diagonal_with(series, Exec::default())
}

pub fn register_diagonal_with(series: &WalshSeries, exec: Exec) -> Result<Vec<f64>> {
    if series.n > MAX_DENSE_QUBITS {
        return Err(domain(format!(
            "{} qubits exceeds the dense limit {MAX_DENSE_QUBITS}",
            series.n
        )));
    }
    let mut buf = vec![0.0; 1usize << series.n];
    for &(m, a) in &series.entries {
        buf[m as usize] = a;
    }
    wht_in_place(&mut buf, exec);
    Ok(buf)
}

pub fn binary_to_gray(j: u64) -> u64 {
    j ^ (j >> 1)
}

/// Inverse Gray code: position of `g` in the reflected Gray sequence.
pub fn gray_rank(g: u64) -> u64 {
    let mut b = g;
    let mut shift = 1;
    while shift < 64 {
        b ^= b >> shift;
        shift <<= 1;
    }
    b
}

/// Sequency order within most-significant-bit groups. The inverse Gray code
/// keeps the leading bit, so sorting by it keeps each group contiguous.
pub fn sequency_cmp(a: u64, b: u64) -> Ordering {
    gray_rank(a).cmp(&gray_rank(b))
}

/// Relocate qubit `i` of `series` onto `positions[i]` of an `n_target` register.
pub fn embed(series: &WalshSeries, positions: &[u32], n_target: u32) -> Result<WalshSeries> {
    if positions.len() != series.n as usize {
        return Err(domain(format!(
            "{} positions given for a {}-qubit series",
            positions.len(),
            series.n
        )));
    }
    if n_target > 63 {
        return Err(domain(format!("register width {n_target} exceeds 63 qubits")));
    }
    let mut seen = 0u64;
    for &p in positions {
        if p >= n_target {
            return Err(domain(format!("position {p} outside {n_target}-qubit register")));
        }
        if seen >> p & 1 == 1 {
            return Err(domain(format!("position {p} used twice")));
        }
        seen |= 1 << p;
    }
    let relabel = |m: u64| {
        let mut out = 0;
        let mut rest = m;
        while rest != 0 {
            let b = rest.trailing_zeros();
            out |= 1u64 << positions[b as usize];
            rest &= rest - 1;
        }
        out
    };
    let mut entries: Vec<(u64, f64)> = series.entries.iter().map(|&(m, a)| (relabel(m), a)).collect();
    entries.sort_by_key(|e| e.0);
    Ok(WalshSeries { n: n_target, entries })
}

/// Sum series over one register; equal masks are added before anything is
/// dropped, and sums that cancel to rounding level are removed.
pub fn merge(series: &[WalshSeries]) -> Result<WalshSeries> {
    let Some(first) = series.first() else {
        return Err(domain("merge of an empty list"));
    };
    let n = first.n;
    if let Some(bad) = series.iter().find(|s| s.n != n) {
        return Err(domain(format!("width mismatch in merge: {} vs {}", bad.n, n)));
    }
    let mut all: Vec<(u64, f64)> = series.iter().flat_map(|s| s.entries.iter().copied()).collect();
    all.sort_by_key(|e| e.0);
    let mut entries = Vec::with_capacity(all.len());
    let mut i = 0;
    while i < all.len() {
        let m = all[i].0;
        let (mut sum, mut mag) = (0.0, 0.0);
        while i < all.len() && all[i].0 == m {
            sum += all[i].1;
            mag += all[i].1.abs();
            i += 1;
        }
        if sum.abs() > 4.0 * f64::EPSILON * mag {
            entries.push((m, sum));
        }
    }
    Ok(WalshSeries { n, entries })
}

/// Kronecker product: `low` on the first `low.n` qubits, `high` above it.
pub fn tensor(low: &WalshSeries, high: &WalshSeries) -> Result<WalshSeries> {
    let n = low.n + high.n;
    if n > 63 {
        return Err(domain(format!("tensor product width {n} exceeds 63 qubits")));
    }
    let mut entries = Vec::with_capacity(low.len() * high.len());
    for &(mh, ah) in &high.entries {
        for &(ml, al) in &low.entries {
            let a = al * ah;
            if a != 0.0 {
                entries.push((ml | (mh << low.n), a));
            }
        }
    }
    entries.sort_by_key(|e| e.0);
    Ok(WalshSeries { n, entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub kept: WalshSeries,
    pub n_drop: usize,
}

/// Keep exactly the entries with |a_j| ≥ θ_min/2.
pub fn threshold_truncate(series: &WalshSeries, theta_min: f64) -> Result<Truncation> {
    if !(theta_min >= 0.0) || !theta_min.is_finite() {
        return Err(domain(format!("θ_min must be a non-negative number, got {theta_min}")));
    }
    let cut = theta_min / 2.0;
    let entries: Vec<(u64, f64)> = series.entries.iter().copied().filter(|e| e.1.abs() >= cut).collect();
    let n_drop = series.len() - entries.len();
    Ok(Truncation {
        kept: WalshSeries { n: series.n, entries },
        n_drop,
    })
}

pub fn l1_norm(series: &WalshSeries) -> f64 {
    series.entries.iter().map(|e| e.1.abs()).sum()
}
