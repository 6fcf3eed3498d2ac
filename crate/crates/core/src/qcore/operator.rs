//! Hermitian operators, lowest eigenpairs and unitary time evolution.
//!
//! Operators of dimension below [`DENSE_LIMIT`] are diagonalized densely;
//! larger ones go through Lanczos (ground states) or a Lanczos-based Krylov
//! propagator (evolution). Both paths share the same contracts and can be
//! forced with [`SolverPath`] for cross-checks.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::hermiticity_error;
use super::StateVector;
use crate::error::{invalid, mismatch, Error, Result};
use crate::C64;

/// Dimension at which the automatic path switches from dense to Krylov.
pub const DENSE_LIMIT: usize = 4096;

const HERMITIAN_TOL: f64 = 1e-12;
const LANCZOS_BLOCK: usize = 120;
const LANCZOS_RESTARTS: usize = 200;
const KRYLOV_DIM: usize = 40;
const KRYLOV_STEP_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolverPath {
    #[default]
    Auto,
    Dense,
    Krylov,
}

/// Row-compressed Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseHermitian {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    /// Both `(i, j)` and `(j, i)` must be present for off-diagonal entries.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for &(i, j, v) in triplets {
            if i >= dim || j >= dim {
                return Err(invalid(format!("triplet ({i},{j}) outside dim {dim}")));
            }
            rows[i].push((j, v));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(row.len());
            for &(j, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            merged.retain(|e| e.1 != C64::from(0.0));
            *row = merged;
        }
        let op = Self { dim, rows };
        let err = op.hermiticity_error();
        if err > HERMITIAN_TOL * op.norm_bound().max(1.0) {
            return Err(invalid(format!("sparse operator not Hermitian ({err:e})")));
        }
        Ok(op)
    }

    fn get(&self, i: usize, j: usize) -> C64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(p) => self.rows[i][p].1,
            Err(_) => C64::from(0.0),
        }
    }

    fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn norm_bound(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|e| e.1.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(
            self.dim,
            self.rows
                .iter()
                .map(|row| row.iter().map(|&(j, a)| a * v[j]).sum::<C64>()),
        )
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HermitianOperator {
    Dense(DMatrix<C64>),
    Sparse(SparseHermitian),
}

impl HermitianOperator {
    pub fn dense(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(invalid("operator must be square and nonempty"));
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let err = hermiticity_error(&m);
        if err > HERMITIAN_TOL * scale {
            return Err(invalid(format!("operator not Hermitian ({err:e})")));
        }
        Ok(Self::Dense(m))
    }

    pub fn sparse(dim: usize, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("operator must be nonempty"));
        }
        Ok(Self::Sparse(SparseHermitian::from_triplets(dim, triplets)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.nrows(),
            Self::Sparse(s) => s.dim,
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        match self {
            Self::Dense(m) => m * v,
            Self::Sparse(s) => s.apply(v),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Sparse(s) => s.to_dense(),
        }
    }

    pub fn element(&self, i: usize, j: usize) -> C64 {
        match self {
            Self::Dense(m) => m[(i, j)],
            Self::Sparse(s) => s.get(i, j),
        }
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        match self {
            Self::Dense(m) => m
                .row_iter()
                .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
                .fold(0.0, f64::max),
            Self::Sparse(s) => s.norm_bound(),
        }
    }

    /// `H + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        match self {
            Self::Dense(m) => {
                Self::Dense(m + DMatrix::<C64>::identity(m.nrows(), m.nrows()) * C64::from(c))
            }
            Self::Sparse(s) => {
                let mut rows = s.rows.clone();
                for (i, row) in rows.iter_mut().enumerate() {
                    match row.binary_search_by_key(&i, |e| e.0) {
                        Ok(p) => row[p].1 += C64::from(c),
                        Err(p) => row.insert(p, (i, C64::from(c))),
                    }
                }
                Self::Sparse(SparseHermitian { dim: s.dim, rows })
            }
        }
    }

    fn resolve(&self, path: SolverPath) -> SolverPath {
        match path {
            SolverPath::Auto if self.dim() < DENSE_LIMIT => SolverPath::Dense,
            SolverPath::Auto => SolverPath::Krylov,
            p => p,
        }
    }
}

/// Lowest eigenpair of `h`. For a degenerate ground space the returned
/// vector is whichever one the eigensolver produces.
pub fn ground_state(h: &HermitianOperator) -> Result<(f64, StateVector)> {
    ground_state_with(h, SolverPath::Auto)
}

pub fn ground_state_with(h: &HermitianOperator, path: SolverPath) -> Result<(f64, StateVector)> {
    match h.resolve(path) {
        SolverPath::Krylov => lanczos_ground_state(h),
        _ => dense_ground_state(&h.to_dense()),
    }
}

fn dense_ground_state(m: &DMatrix<C64>) -> Result<(f64, StateVector)> {
    let eig = SymmetricEigen::new(m.clone());
    let (k, e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, e)| (k, *e))
        .ok_or_else(|| Error::Internal("empty spectrum".into()))?;
    let v = eig.eigenvectors.column(k).into_owned();
    Ok((e, StateVector::normalized(fix_phase(v))?))
}

/// Rotates a vector so its largest component is real positive. This makes
/// eigenvectors reproducible across solver paths for nondegenerate levels.
fn fix_phase(mut v: DVector<C64>) -> DVector<C64> {
    if let Some(big) = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        if big.norm() > 0.0 {
            let phase = big.conj() / big.norm();
            v *= phase;
        }
    }
    v
}

fn start_vector(dim: usize) -> DVector<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c61_6e63_7a6f_7321);
    let v = DVector::from_fn(dim, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let n = v.norm();
    v / C64::from(n)
}

/// Lanczos basis with full reorthogonalization. Returns the basis vectors,
/// the tridiagonal coefficients and the final residual norm `β_m`.
fn lanczos_basis(
    h: &HermitianOperator,
    v0: &DVector<C64>,
    max_dim: usize,
) -> (Vec<DVector<C64>>, Vec<f64>, Vec<f64>, f64) {
    let mut basis: Vec<DVector<C64>> = vec![v0.clone()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut last_beta = 0.0;
    for j in 0..max_dim {
        let mut w = h.apply(&basis[j]);
        let a = basis[j].dotc(&w).re;
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let b = w.norm();
        last_beta = b;
        if j + 1 == max_dim || b < 1e-12 * (1.0 + a.abs()) {
            break;
        }
        beta.push(b);
        basis.push(w / C64::from(b));
    }
    (basis, alpha, beta, last_beta)
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}

fn lanczos_ground_state(h: &HermitianOperator) -> Result<(f64, StateVector)> {
    let dim = h.dim();
    let tol = 1e-10 * h.norm_bound().max(1e-300);
    let block = LANCZOS_BLOCK.min(dim);
    let mut v = start_vector(dim);
    for _ in 0..LANCZOS_RESTARTS {
        let (basis, alpha, beta, _) = lanczos_basis(h, &v, block);
        let t = tridiagonal(&alpha, &beta);
        let eig = SymmetricEigen::new(t);
        let (k, theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, e)| (k, *e))
            .ok_or_else(|| Error::Internal("empty Lanczos spectrum".into()))?;
        let s = eig.eigenvectors.column(k);
        let mut y = DVector::zeros(dim);
        for (q, &c) in basis.iter().zip(s.iter()) {
            y += q * C64::from(c);
        }
        let y = &y / C64::from(y.norm());
        let r = h.apply(&y) - &y * C64::from(theta);
        if r.norm() <= tol {
            return Ok((theta, StateVector::normalized(fix_phase(y))?));
        }
        v = y;
    }
    Err(Error::NotConverged(format!(
        "Lanczos ground state in dim {dim} after {LANCZOS_RESTARTS} restarts"
    )))
}

/// `exp(−iHt)|ψ⟩`.
pub fn evolve(h: &HermitianOperator, psi: &StateVector, t: f64) -> Result<StateVector> {
    evolve_with(h, psi, t, SolverPath::Auto)
}

pub fn evolve_with(
    h: &HermitianOperator,
    psi: &StateVector,
    t: f64,
    path: SolverPath,
) -> Result<StateVector> {
    if h.dim() != psi.dim() {
        return Err(mismatch(format!(
            "operator dim {} vs state dim {}",
            h.dim(),
            psi.dim()
        )));
    }
    if !t.is_finite() {
        return Err(invalid("evolution time must be finite"));
    }
    let out = if t == 0.0 {
        psi.amplitudes().clone()
    } else {
        match h.resolve(path) {
            SolverPath::Krylov => krylov_evolve(h, psi.amplitudes(), t)?,
            _ => dense_evolve(&h.to_dense(), psi.amplitudes(), t),
        }
    };
    let st = StateVector::normalized(out)?;
    Ok(match psi.indexer() {
        Some(ix) => st.with_indexer(ix)?,
        None => st,
    })
}

fn dense_evolve(m: &DMatrix<C64>, v: &DVector<C64>, t: f64) -> DVector<C64> {
    let eig = SymmetricEigen::new(m.clone());
    let vecs = &eig.eigenvectors;
    let mut coeffs = vecs.adjoint() * v;
    for (c, &e) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= C64::from_polar(1.0, -e * t);
    }
    vecs * coeffs
}

fn krylov_evolve(h: &HermitianOperator, v: &DVector<C64>, t: f64) -> Result<DVector<C64>> {
    let dim = h.dim();
    let m = KRYLOV_DIM.min(dim);
    let mut w = v.clone();
    let mut done = 0.0;
    let mut step = t;
    let mut guard = 0usize;
    while (t - done).abs() > 0.0 {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::NotConverged("Krylov propagation step control".into()));
        }
        let last = (t - done).abs() <= step.abs();
        let dt = if last { t - done } else { step };
        let norm = w.norm();
        let (basis, alpha, beta, last_beta) = lanczos_basis(h, &(&w / C64::from(norm)), m);
        let k = alpha.len();
        let eig = SymmetricEigen::new(tridiagonal(&alpha, &beta));
        // y = exp(−iT dt) e1
        let y: Vec<C64> = (0..k)
            .map(|row| {
                (0..k)
                    .map(|col| {
                        let s = eig.eigenvectors[(row, col)] * eig.eigenvectors[(0, col)];
                        C64::from_polar(s, -eig.eigenvalues[col] * dt)
                    })
                    .sum()
            })
            .collect();
        let exhausted = k < m || k == dim;
        let err = if exhausted { 0.0 } else { last_beta * y[k - 1].norm() };
        if err > KRYLOV_STEP_TOL && !exhausted {
            step *= 0.5;
            continue;
        }
        let mut next = DVector::zeros(dim);
        for (q, c) in basis.iter().zip(y.iter()) {
            next += q * *c;
        }
        w = next * C64::from(norm);
        done = if last { t } else { done + dt };
        if err < 1e-3 * KRYLOV_STEP_TOL {
            step *= 1.5;
        }
    }
    Ok(w)
}
