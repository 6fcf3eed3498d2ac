//! Complementarity factors and entanglement bounds.
//!
//! Every bound has the form `q − H(X_A|X'_B) − H(Z_A|Z'_B)` and lower-bounds
//! the coherent information `−H(A|B)`:
//!
//! - `q_mu`: Maassen–Uffink factor, `−log max_{x,z} c(x,z)`; state independent.
//! - `q_pn`: sector-weighted Maassen–Uffink factor for number-conserving
//!   measurements, `Σ_n p(n) q_mu^(n)`.
//! - `q_c`: `−Σ_x P_X(x) log max_z c(x,z)`, weighting rows by the measured
//!   X distribution on A.
//! - `q_fsd`: the fully state-dependent factor
//!   `−Σ_{x,x'} P_XX'(x,x') log Σ_z c(x,z) P_ZX'(z|x')`.
//!
//! `q_pn` and `q_c` are reconstructions of factors whose exact published
//! definitions are not reproduced here; they satisfy
//! `q_mu ≤ q_pn ≤ q_c ≤ q_fsd` by construction.

use crate::error::{invalid, mismatch, Result};
use crate::measure::{
    conditional_entropy, joint_distribution, overlap_matrix, ConditionalTable, JointDistribution,
    MeasurementBasis, OverlapMatrix, StateRef,
};
use crate::qcore::{coherent_information, pure_coherent_information, BipartiteIndexer, LogBase};

/// `−log₂ max c(x,z)`.
pub fn q_mu(c: &OverlapMatrix) -> f64 {
    let m = c.max();
    if m >= 1.0 {
        0.0
    } else {
        -m.log2()
    }
}

/// `−Σ_x P(x) log₂ max_z c(x,z)`.
pub fn q_c(p_x: &[f64], c: &OverlapMatrix) -> Result<f64> {
    if p_x.len() != c.dim() {
        return Err(mismatch(format!(
            "marginal over {} outcomes for a {}-dim overlap",
            p_x.len(),
            c.dim()
        )));
    }
    let total: f64 = p_x.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("marginal sums to {total}")));
    }
    let mut q = 0.0;
    for (x, &p) in p_x.iter().enumerate() {
        if p > 0.0 {
            let m = c.row_max(x);
            if m < 1.0 {
                q -= p * m.log2();
            }
        }
    }
    Ok(q)
}

/// `−Σ_{x,x'} P_XX'(x,x') log₂ Σ_z c(x,z) P_ZX'(z|x')`.
pub fn q_fsd(
    p_xx: &JointDistribution,
    p_z_given_xp: &ConditionalTable,
    c: &OverlapMatrix,
) -> Result<f64> {
    if p_xx.labels_a() != c.row_labels() {
        return Err(invalid("X outcomes of P_XX' and overlap rows differ"));
    }
    if p_z_given_xp.labels_a() != c.col_labels() {
        return Err(invalid("Z outcomes of P_ZX' and overlap columns differ"));
    }
    if p_xx.labels_b() != p_z_given_xp.labels_b() {
        return Err(invalid("X' outcomes of P_XX' and P_ZX' differ"));
    }
    let mut q = 0.0;
    for x in 0..p_xx.rows() {
        let support = c.row_support(x);
        for xp in 0..p_xx.cols() {
            let p = p_xx.get(x, xp);
            if p <= 0.0 || !p_z_given_xp.is_valid(xp) {
                continue;
            }
            let inner: f64 = support
                .iter()
                .map(|&z| c.get(x, z) * p_z_given_xp.get(z, xp))
                .sum();
            if inner > 0.0 && inner < 1.0 {
                q -= p * inner.log2();
            }
        }
    }
    Ok(q)
}

/// Assignment of each local outcome to a particle-number sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorPartition {
    sector_of: Vec<usize>,
    sectors: usize,
}

impl SectorPartition {
    pub fn new(sector_of: Vec<usize>) -> Self {
        let sectors = sector_of.iter().copied().max().map_or(0, |m| m + 1);
        Self { sector_of, sectors }
    }

    pub fn len(&self) -> usize {
        self.sector_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sector_of.is_empty()
    }

    pub fn sectors(&self) -> usize {
        self.sectors
    }

    pub fn sector(&self, outcome: usize) -> usize {
        self.sector_of[outcome]
    }
}

/// `Σ_n p(n) q_mu^(n)` where `q_mu^(n)` is the Maassen–Uffink factor of the
/// bases restricted to sector `n` and `p(n)` the measured sector weight.
pub fn q_pn(p_x: &[f64], c: &OverlapMatrix, partition: &SectorPartition) -> Result<f64> {
    if p_x.len() != c.dim() || partition.len() != c.dim() {
        return Err(mismatch("sector partition, marginal and overlap sizes differ"));
    }
    let mut weight = vec![0.0; partition.sectors()];
    let mut max_c = vec![0.0f64; partition.sectors()];
    for x in 0..c.dim() {
        let sx = partition.sector(x);
        weight[sx] += p_x[x];
        for z in 0..c.dim() {
            let v = c.get(x, z);
            if v == 0.0 {
                continue;
            }
            if partition.sector(z) != sx {
                return Err(invalid(format!(
                    "bases are not number conserving: outcomes {} and {} overlap across sectors",
                    c.row_labels()[x],
                    c.col_labels()[z]
                )));
            }
            max_c[sx] = max_c[sx].max(v);
        }
    }
    Ok(weight
        .iter()
        .zip(&max_c)
        .filter(|(&w, &m)| w > 0.0 && m < 1.0)
        .map(|(w, m)| -w * m.log2())
        .sum())
}

/// The four local bases: `X`, `Z` on A and `X'`, `Z'` on B.
#[derive(Clone, Debug)]
pub struct BasisSet<'a> {
    pub x: &'a MeasurementBasis,
    pub x_prime: &'a MeasurementBasis,
    pub z: &'a MeasurementBasis,
    pub z_prime: &'a MeasurementBasis,
}

/// Measured tables feeding a report; `p_zx` is the cross table of `Z` on A
/// and `X'` on B.
#[derive(Clone, Debug)]
pub struct MeasuredTables {
    pub p_xx: JointDistribution,
    pub p_zz: JointDistribution,
    pub p_zx: JointDistribution,
}

/// Complementarity factors, conditional entropies and the resulting bounds
/// for one state and basis choice. All values in bits unless converted.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub params: Vec<(String, String)>,
    pub hxx: f64,
    pub hzz: f64,
    pub q_mu: f64,
    pub q_pn: Option<f64>,
    pub q_c: f64,
    pub q_fsd: f64,
    pub bound_mu: f64,
    pub bound_pn: Option<f64>,
    pub bound_c: f64,
    pub bound_fsd: f64,
    pub true_neg_hab: Option<f64>,
}

/// Value columns of a report, in CSV order after the parameter columns.
pub const REPORT_COLUMNS: [&str; 11] = [
    "hxx",
    "hzz",
    "q_mu",
    "q_pn",
    "q_c",
    "q_fsd",
    "bound_mu",
    "bound_pn",
    "bound_c",
    "bound_fsd",
    "true_neg_hab",
];

impl BoundReport {
    fn from_factors(
        hxx: f64,
        hzz: f64,
        q_mu: f64,
        q_pn: Option<f64>,
        q_c: f64,
        q_fsd: f64,
        true_neg_hab: Option<f64>,
    ) -> Self {
        let bound = |q: f64| q - hxx - hzz;
        Self {
            params: Vec::new(),
            hxx,
            hzz,
            q_mu,
            q_pn,
            q_c,
            q_fsd,
            bound_mu: bound(q_mu),
            bound_pn: q_pn.map(bound),
            bound_c: bound(q_c),
            bound_fsd: bound(q_fsd),
            true_neg_hab,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Copy with every information-valued field expressed in `base`.
    pub fn in_base(&self, base: LogBase) -> Self {
        let s = base.scale();
        Self {
            params: self.params.clone(),
            hxx: self.hxx * s,
            hzz: self.hzz * s,
            q_mu: self.q_mu * s,
            q_pn: self.q_pn.map(|v| v * s),
            q_c: self.q_c * s,
            q_fsd: self.q_fsd * s,
            bound_mu: self.bound_mu * s,
            bound_pn: self.bound_pn.map(|v| v * s),
            bound_c: self.bound_c * s,
            bound_fsd: self.bound_fsd * s,
            true_neg_hab: self.true_neg_hab.map(|v| v * s),
        }
    }

    pub fn csv_header(&self) -> Vec<String> {
        self.params
            .iter()
            .map(|(k, _)| k.clone())
            .chain(REPORT_COLUMNS.iter().map(|c| c.to_string()))
            .collect()
    }

    /// One CSV record; missing optional values are empty cells.
    pub fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        self.params
            .iter()
            .map(|(_, v)| v.clone())
            .chain([
                self.hxx.to_string(),
                self.hzz.to_string(),
                self.q_mu.to_string(),
                opt(self.q_pn),
                self.q_c.to_string(),
                self.q_fsd.to_string(),
                self.bound_mu.to_string(),
                opt(self.bound_pn),
                self.bound_c.to_string(),
                self.bound_fsd.to_string(),
                opt(self.true_neg_hab),
            ])
            .collect()
    }
}

/// Builds a report from measured tables. Suitable for externally supplied
/// empirical distributions as well as simulated ones.
pub fn assemble_from_tables(
    tables: &MeasuredTables,
    c: &OverlapMatrix,
    partition: Option<&SectorPartition>,
    true_neg_hab: Option<f64>,
) -> Result<BoundReport> {
    let MeasuredTables { p_xx, p_zz, p_zx } = tables;
    if p_zx.labels_b() != p_xx.labels_b() || p_zx.labels_a() != p_zz.labels_a() {
        return Err(invalid("cross table P_ZX' labels inconsistent with P_XX'/P_ZZ'"));
    }
    let hxx = conditional_entropy(p_xx);
    let hzz = conditional_entropy(p_zz);
    let p_x = p_xx.marginal_a();
    let qmu = q_mu(c);
    let qc = q_c(&p_x, c)?;
    let qfsd = q_fsd(p_xx, &p_zx.conditional_on_b(), c)?;
    let qpn = partition.map(|part| q_pn(&p_x, c, part)).transpose()?;
    Ok(BoundReport::from_factors(hxx, hzz, qmu, qpn, qc, qfsd, true_neg_hab))
}

/// Computes every distribution from the state, all factors and bounds, and
/// the true coherent information.
pub fn assemble_report(
    state: StateRef<'_>,
    indexer: &BipartiteIndexer,
    bases: &BasisSet<'_>,
    partition: Option<&SectorPartition>,
) -> Result<BoundReport> {
    let tables = MeasuredTables {
        p_xx: joint_distribution(state, indexer, bases.x, bases.x_prime)?,
        p_zz: joint_distribution(state, indexer, bases.z, bases.z_prime)?,
        p_zx: joint_distribution(state, indexer, bases.z, bases.x_prime)?,
    };
    let c = overlap_matrix(bases.x, bases.z)?;
    let truth = match state {
        StateRef::Pure(psi) => pure_coherent_information(psi, indexer)?,
        StateRef::Mixed(rho) => coherent_information(rho, indexer)?,
    };
    assemble_from_tables(&tables, &c, partition, Some(truth))
}
