//! Measurement bases, joint outcome distributions, classical conditional
//! entropies and basis-overlap matrices.

use nalgebra::DMatrix;

use crate::error::{invalid, mismatch, Result};
use crate::qcore::{shannon_entropy, BipartiteIndexer, DensityMatrix, StateVector};
use crate::C64;

const ORTHONORMAL_TOL: f64 = 1e-10;
const NORMALIZATION_TOL: f64 = 1e-9;
const NEGATIVE_TOL: f64 = 1e-12;

/// Default threshold below which probabilities are set to zero.
pub const PROBABILITY_CLIP: f64 = 1e-14;

/// Conditionals `P(·|x')` are only formed for `P(x') > MARGINAL_FLOOR`.
pub const MARGINAL_FLOOR: f64 = 1e-12;

/// Orthonormal measurement basis on one subsystem. Column `x` of the unitary
/// is the basis vector `|x⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    columns: DMatrix<C64>,
    labels: Vec<String>,
}

impl MeasurementBasis {
    pub fn new(columns: DMatrix<C64>, labels: Vec<String>) -> Result<Self> {
        if !columns.is_square() || columns.nrows() == 0 {
            return Err(invalid("basis matrix must be square and nonempty"));
        }
        if labels.len() != columns.ncols() {
            return Err(invalid(format!(
                "{} labels for {} basis vectors",
                labels.len(),
                columns.ncols()
            )));
        }
        let gram = columns.adjoint() * &columns;
        let d = gram.nrows();
        let dev = (gram - DMatrix::<C64>::identity(d, d)).camax();
        if dev > ORTHONORMAL_TOL {
            return Err(invalid(format!("basis columns not orthonormal (deviation {dev:e})")));
        }
        Ok(Self { columns, labels })
    }

    /// Skips the orthonormality check; for bases built from exact unitaries.
    pub(crate) fn from_unitary_unchecked(columns: DMatrix<C64>, labels: Vec<String>) -> Self {
        debug_assert_eq!(columns.ncols(), labels.len());
        Self { columns, labels }
    }

    pub fn computational(d: usize) -> Result<Self> {
        Self::new(
            DMatrix::identity(d, d),
            (0..d).map(|x| x.to_string()).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn columns(&self) -> &DMatrix<C64> {
        &self.columns
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Reorders outcomes: new outcome `i` is old outcome `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
            return Err(invalid("not a permutation of the outcomes"));
        }
        Ok(Self {
            columns: DMatrix::from_fn(d, d, |r, c| self.columns[(r, perm[c])]),
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
        })
    }
}

/// `|z⟩ = Σ_x exp(2πi xz/d)|x⟩ / √d`, with labels `f0, f1, ...`.
pub fn fourier_basis(d: usize) -> Result<MeasurementBasis> {
    if d < 2 {
        return Err(invalid(format!("Fourier basis needs d >= 2, got {d}")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let cols = DMatrix::from_fn(d, d, |x, z| {
        let phase = 2.0 * std::f64::consts::PI * ((x * z) % d) as f64 / d as f64;
        C64::from_polar(norm, phase)
    });
    MeasurementBasis::new(cols, (0..d).map(|z| format!("f{z}")).collect())
}

/// Borrowed bipartite state, pure or mixed.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    pub fn dim(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.dim(),
            StateRef::Mixed(r) => r.dim(),
        }
    }
}

/// Joint outcome table `P(x, x')`, stored row-major with `x` (subsystem A)
/// indexing rows.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
    labels_a: Vec<String>,
    labels_b: Vec<String>,
}

impl JointDistribution {
    pub fn new(
        rows: usize,
        cols: usize,
        table: Vec<f64>,
        labels_a: Vec<String>,
        labels_b: Vec<String>,
    ) -> Result<Self> {
        Self::with_clip(rows, cols, table, labels_a, labels_b, PROBABILITY_CLIP)
    }

    /// Like [`JointDistribution::new`] with an explicit clip threshold.
    pub fn with_clip(
        rows: usize,
        cols: usize,
        mut table: Vec<f64>,
        labels_a: Vec<String>,
        labels_b: Vec<String>,
        clip: f64,
    ) -> Result<Self> {
        if table.len() != rows * cols {
            return Err(mismatch(format!(
                "table has {} entries, expected {rows}x{cols}",
                table.len()
            )));
        }
        if labels_a.len() != rows || labels_b.len() != cols {
            return Err(invalid("label counts do not match table shape"));
        }
        if let Some(p) = table.iter().find(|p| !p.is_finite() || **p < -NEGATIVE_TOL) {
            return Err(invalid(format!("invalid probability {p}")));
        }
        let total: f64 = table.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid(format!("probabilities sum to {total}")));
        }
        for p in table.iter_mut().filter(|p| **p < clip) {
            *p = 0.0;
        }
        Ok(Self {
            rows,
            cols,
            table,
            labels_a,
            labels_b,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, x: usize, xp: usize) -> f64 {
        self.table[x * self.cols + xp]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn labels_a(&self) -> &[String] {
        &self.labels_a
    }

    pub fn labels_b(&self) -> &[String] {
        &self.labels_b
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        self.table.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.cols];
        for row in self.table.chunks(self.cols) {
            for (acc, p) in m.iter_mut().zip(row) {
                *acc += p;
            }
        }
        m
    }

    /// `P(x | x')`, columns with negligible marginal left empty.
    pub fn conditional_on_b(&self) -> ConditionalTable {
        let marg = self.marginal_b();
        let valid: Vec<bool> = marg.iter().map(|&m| m > MARGINAL_FLOOR).collect();
        let mut table = vec![0.0; self.table.len()];
        for x in 0..self.rows {
            for xp in 0..self.cols {
                if valid[xp] {
                    table[x * self.cols + xp] = self.get(x, xp) / marg[xp];
                }
            }
        }
        ConditionalTable {
            rows: self.rows,
            cols: self.cols,
            table,
            valid,
            labels_a: self.labels_a.clone(),
            labels_b: self.labels_b.clone(),
        }
    }
}

/// Conditional table `P(a | b)` with rows indexed by the A outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalTable {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
    valid: Vec<bool>,
    labels_a: Vec<String>,
    labels_b: Vec<String>,
}

impl ConditionalTable {
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.table[a * self.cols + b]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whether column `b` had enough weight to condition on.
    pub fn is_valid(&self, b: usize) -> bool {
        self.valid[b]
    }

    pub fn labels_a(&self) -> &[String] {
        &self.labels_a
    }

    pub fn labels_b(&self) -> &[String] {
        &self.labels_b
    }
}

pub fn joint_distribution(
    state: StateRef<'_>,
    indexer: &BipartiteIndexer,
    basis_a: &MeasurementBasis,
    basis_b: &MeasurementBasis,
) -> Result<JointDistribution> {
    if state.dim() != indexer.dim() {
        return Err(mismatch(format!(
            "state dim {} but indexer covers {}",
            state.dim(),
            indexer.dim()
        )));
    }
    if basis_a.dim() != indexer.dim_a() || basis_b.dim() != indexer.dim_b() {
        return Err(mismatch(format!(
            "bases of dims {}x{} for a {}x{} split",
            basis_a.dim(),
            basis_b.dim(),
            indexer.dim_a(),
            indexer.dim_b()
        )));
    }
    let (da, db) = (indexer.dim_a(), indexer.dim_b());
    let table: Vec<f64> = match state {
        StateRef::Pure(psi) => {
            let m = psi.amplitude_matrix(indexer)?;
            let amp = basis_a.columns().adjoint() * m * basis_b.columns().map(|z| z.conj());
            (0..da)
                .flat_map(|x| (0..db).map(move |xp| (x, xp)))
                .map(|(x, xp)| amp[(x, xp)].norm_sqr())
                .collect()
        }
        StateRef::Mixed(rho) => {
            let w = basis_a.columns().kronecker(basis_b.columns());
            let rotated = w.adjoint() * rho.entries() * &w;
            (0..da * db).map(|k| rotated[(k, k)].re).collect()
        }
    };
    JointDistribution::new(
        da,
        db,
        table,
        basis_a.labels().to_vec(),
        basis_b.labels().to_vec(),
    )
}

/// `H(X_A | X'_B)` in bits.
pub fn conditional_entropy(p: &JointDistribution) -> f64 {
    let marg = p.marginal_b();
    let mut h = 0.0;
    let mut column = vec![0.0; p.rows()];
    for (xp, &m) in marg.iter().enumerate() {
        if m <= MARGINAL_FLOOR {
            continue;
        }
        for (x, c) in column.iter_mut().enumerate() {
            *c = p.get(x, xp) / m;
        }
        h += m * shannon_entropy(&column);
    }
    h.max(0.0)
}

/// Squared basis overlaps `c[x][z] = |⟨z|x⟩|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix {
    dim: usize,
    c: Vec<f64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    support: Vec<Vec<usize>>,
}

impl OverlapMatrix {
    /// Validates that the table is doubly stochastic.
    pub fn from_table(
        dim: usize,
        c: Vec<f64>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        if c.len() != dim * dim {
            return Err(mismatch("overlap table is not square"));
        }
        if row_labels.len() != dim || col_labels.len() != dim {
            return Err(invalid("overlap label counts do not match"));
        }
        if c.iter().any(|&v| !(-NEGATIVE_TOL..=1.0 + NORMALIZATION_TOL).contains(&v)) {
            return Err(invalid("overlap entries must lie in [0, 1]"));
        }
        for i in 0..dim {
            let row: f64 = c[i * dim..(i + 1) * dim].iter().sum();
            let col: f64 = (0..dim).map(|r| c[r * dim + i]).sum();
            if (row - 1.0).abs() > NORMALIZATION_TOL || (col - 1.0).abs() > NORMALIZATION_TOL {
                return Err(invalid(format!(
                    "overlap matrix not doubly stochastic at {i} (row {row}, col {col})"
                )));
            }
        }
        let support = (0..dim)
            .map(|x| (0..dim).filter(|&z| c[x * dim + z] > 0.0).collect())
            .collect();
        Ok(Self {
            dim,
            c,
            row_labels,
            col_labels,
            support,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, x: usize, z: usize) -> f64 {
        self.c[x * self.dim + z]
    }

    /// Indices `z` with nonzero `c[x][z]`.
    pub fn row_support(&self, x: usize) -> &[usize] {
        &self.support[x]
    }

    pub fn row_max(&self, x: usize) -> f64 {
        self.c[x * self.dim..(x + 1) * self.dim]
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.c.iter().copied().fold(0.0, f64::max)
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }
}

pub fn overlap_matrix(x: &MeasurementBasis, z: &MeasurementBasis) -> Result<OverlapMatrix> {
    if x.dim() != z.dim() {
        return Err(mismatch(format!("basis dims {} and {}", x.dim(), z.dim())));
    }
    let d = x.dim();
    let inner = z.columns().adjoint() * x.columns();
    let c = (0..d)
        .flat_map(|xi| (0..d).map(move |zi| (xi, zi)))
        .map(|(xi, zi)| inner[(zi, xi)].norm_sqr())
        .collect();
    OverlapMatrix::from_table(d, c, x.labels().to_vec(), z.labels().to_vec())
}
