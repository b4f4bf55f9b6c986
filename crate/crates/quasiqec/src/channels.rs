//! Completely positive maps, instruments, Choi representations, and
//! distance measures.
//!
//! Conventions: the maximally entangled reference state ω is trace-1,
//! |ω⟩ = (1/√d)Σᵢ|ii⟩, and Choi matrices use the pair index
//! `(out, in) → out·dim_in + in`.

use crate::linalg::{
    c, cr, herm_eigen, identity, is_projector, kron, max_abs, trace,
    trace_distance, zeros, CMat, CVec,
};
use crate::{fidelity, Error, Result};
use rand::Rng;
use serde::Serialize;

/// Tolerance for trace-preservation and projector checks.
pub const TP_TOL: f64 = 1e-10;

/// Relative eigenvalue cutoff when extracting Kraus operators from a Choi matrix.
pub const KRAUS_TRUNCATION_TOL: f64 = 1e-12;

/// A completely positive map given by its Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausMap {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<CMat>,
}

impl KrausMap {
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKrausList)?;
        let (dim_out, dim_in) = (first.nrows(), first.ncols());
        if kraus.iter().any(|k| k.nrows() != dim_out || k.ncols() != dim_in) {
            return Err(Error::DimensionMismatch(
                "Kraus operators must share one shape".into(),
            ));
        }
        Ok(KrausMap {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub fn identity(dim: usize) -> Self {
        KrausMap {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![identity(dim)],
        }
    }

    pub fn from_unitary(u: &CMat) -> Self {
        KrausMap {
            dim_in: u.ncols(),
            dim_out: u.nrows(),
            kraus: vec![u.clone()],
        }
    }

    /// Σᵢ Kᵢ†Kᵢ − 𝟙 on the input space.
    pub fn tp_defect(&self) -> CMat {
        let mut s = zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        s - identity(self.dim_in)
    }

    pub fn is_tp(&self, tol: f64) -> bool {
        max_abs(&self.tp_defect()) <= tol
    }

    /// Φ(ρ) = Σᵢ Kᵢ ρ Kᵢ†.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let mut out = zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    /// Adjoint map Φ†(X) = Σᵢ Kᵢ† X Kᵢ.
    pub fn apply_adjoint(&self, x: &CMat) -> CMat {
        let mut out = zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += k.adjoint() * x * k;
        }
        out
    }
}

/// A labeled set of CP maps whose branch sum is trace preserving.
#[derive(Debug, Clone)]
pub struct Instrument {
    pub branches: Vec<(String, KrausMap)>,
}

impl Instrument {
    pub fn new(branches: Vec<(String, KrausMap)>) -> Result<Self> {
        let (d_in, d_out) = {
            let first = branches.first().ok_or(Error::EmptyKrausList)?;
            (first.1.dim_in, first.1.dim_out)
        };
        if branches
            .iter()
            .any(|(_, m)| m.dim_in != d_in || m.dim_out != d_out)
        {
            return Err(Error::DimensionMismatch("instrument branch dims".into()));
        }
        let inst = Instrument { branches };
        if !inst.branch_sum().is_tp(TP_TOL) {
            return Err(Error::NotTracePreserving);
        }
        Ok(inst)
    }

    /// The channel obtained by forgetting branch labels.
    pub fn branch_sum(&self) -> KrausMap {
        let kraus: Vec<CMat> = self
            .branches
            .iter()
            .flat_map(|(_, m)| m.kraus.iter().cloned())
            .collect();
        KrausMap::new(kraus).expect("nonempty by construction")
    }
}

/// Choi operator of a CP map, normalized to trace 1 for channels.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub dim_in: usize,
    pub dim_out: usize,
    pub matrix: CMat,
}

impl ChoiMatrix {
    /// Partial trace over the output factor; equals 𝟙/dim_in for a TP map.
    pub fn input_marginal(&self) -> CMat {
        // pair index (out, in): trace out the left factor
        crate::linalg::partial_trace_left(&self.matrix, self.dim_out, self.dim_in)
    }
}

/// The trace-1 maximally entangled state ω on `dim²`.
pub fn omega(dim: usize) -> CMat {
    let v = omega_vec(dim);
    &v * v.adjoint()
}

/// |ω⟩ = (1/√d) Σᵢ |ii⟩.
pub fn omega_vec(dim: usize) -> CVec {
    let mut v = CVec::zeros(dim * dim);
    for i in 0..dim {
        v[i * dim + i] = cr(1.0 / (dim as f64).sqrt());
    }
    v
}

/// ω_Φ = (Φ ⊗ 𝟙)(ω).
pub fn choi_of(map: &KrausMap) -> ChoiMatrix {
    let d_in = map.dim_in;
    let d_out = map.dim_out;
    let dim = d_out * d_in;
    let mut m = zeros(dim, dim);
    let scale = 1.0 / d_in as f64;
    for k in &map.kraus {
        // |w⟩ with w[(a,i)] = K[a,i]/√d_in
        let mut w = CVec::zeros(dim);
        for a in 0..d_out {
            for i in 0..d_in {
                w[a * d_in + i] = k[(a, i)];
            }
        }
        m += &w * w.adjoint() * cr(scale);
    }
    ChoiMatrix {
        dim_in: d_in,
        dim_out: d_out,
        matrix: m,
    }
}

/// Kraus operators from the eigendecomposition of a Choi matrix.
///
/// Eigenvalues below `rel_tol`·λ_max are discarded; eigenvalues below
/// −`rel_tol`·λ_max signal an invalid (non-PSD) Choi matrix.
pub fn kraus_from_choi(choi: &ChoiMatrix, rel_tol: f64) -> Result<KrausMap> {
    let (vals, vecs) = herm_eigen(&choi.matrix);
    let lambda_max = vals[0].max(0.0);
    let cut = rel_tol * lambda_max.max(1e-300);
    if vals.iter().any(|&x| x < -cut.max(1e-10 * lambda_max)) {
        return Err(Error::NotPositive(format!(
            "Choi matrix has eigenvalue {:.3e}",
            vals[vals.len() - 1]
        )));
    }
    let d_in = choi.dim_in;
    let d_out = choi.dim_out;
    let mut kraus = Vec::new();
    for (j, &lam) in vals.iter().enumerate() {
        if lam <= cut {
            continue;
        }
        let col = vecs.column(j);
        let scale = cr((lam * d_in as f64).sqrt());
        let k = CMat::from_fn(d_out, d_in, |a, i| col[a * d_in + i] * scale);
        kraus.push(k);
    }
    if kraus.is_empty() {
        return Err(Error::NotPositive("Choi matrix is numerically zero".into()));
    }
    KrausMap::new(kraus)
}

/// Distances and fidelities between two CP maps of matching dimensions.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    /// Trace distance between the Choi matrices.
    pub d_t_choi: f64,
    /// Entanglement fidelity (fidelity of Choi matrices).
    pub f_e: f64,
    /// Average gate fidelity (F_E d₁ + 1)/(d₁ + 1).
    pub f_g: f64,
    /// Diamond-norm sandwich: 2·D_t ≤ D_⋄ ≤ 2·d₁·D_t.
    pub diamond_lower: f64,
    pub diamond_upper: f64,
}

pub fn distance_suite(phi: &KrausMap, psi: &KrausMap) -> Result<DistanceReport> {
    if phi.dim_in != psi.dim_in || phi.dim_out != psi.dim_out {
        return Err(Error::DimensionMismatch("distance_suite".into()));
    }
    let a = choi_of(phi);
    let b = choi_of(psi);
    let d1 = phi.dim_in as f64;
    let d_t = trace_distance(&a.matrix, &b.matrix);
    let f_e = fidelity(&a.matrix, &b.matrix);
    Ok(DistanceReport {
        d_t_choi: d_t,
        f_e,
        f_g: (f_e * d1 + 1.0) / (d1 + 1.0),
        diamond_lower: 2.0 * d_t,
        diamond_upper: 2.0 * d1 * d_t,
    })
}

/// Diagnostics for the subspace trace-preservation test.
#[derive(Debug, Clone, Serialize)]
pub struct ScptpReport {
    pub is_scptp: bool,
    /// ‖Φ†(P) − P‖ (max-norm).
    pub adjoint_defect: f64,
    /// max over spanning code inputs of ‖Φ(σ) − PΦ(σ)P‖.
    pub subspace_defect: f64,
    /// Largest in-leakage block norm max‖P Kᵢ (𝟙−P)‖.
    pub in_leak: f64,
    /// Largest out-leakage block norm max‖(𝟙−P) Kᵢ P‖.
    pub out_leak: f64,
    /// ‖Σᵢ Aᵢ†Aᵢ − 𝟙‖ on the code block.
    pub block_tp_defect: f64,
    /// Whether the two predicate routes reach the same verdict.
    pub predicates_agree: bool,
}

/// Tests whether `map` is CPTP when restricted to the range of `projector`.
///
/// Two equivalent predicates are evaluated: the adjoint-fixed-point plus
/// subspace condition, and simultaneous block-diagonality of the Kraus
/// operators in the P/(𝟙−P) split.
pub fn is_scptp(map: &KrausMap, projector: &CMat, tol: f64) -> Result<ScptpReport> {
    if map.dim_in != map.dim_out || projector.nrows() != map.dim_in {
        return Err(Error::DimensionMismatch("is_scptp".into()));
    }
    if !is_projector(projector, tol.max(1e-12)) {
        return Err(Error::NotProjector);
    }
    let dim = map.dim_in;
    let p = projector;
    let adjoint_defect = max_abs(&(map.apply_adjoint(p) - p));

    // code basis: eigenvectors of P with eigenvalue ~1
    let (vals, vecs) = herm_eigen(p);
    let code_cols: Vec<usize> = (0..dim).filter(|&j| vals[j] > 0.5).collect();
    let comp_cols: Vec<usize> = (0..dim).filter(|&j| vals[j] <= 0.5).collect();

    let mut subspace_defect: f64 = 0.0;
    for &i in &code_cols {
        for &j in &code_cols {
            let vi = vecs.column(i);
            let vj = vecs.column(j);
            let sigma = vi * vj.adjoint();
            let out = map.apply(&sigma);
            subspace_defect = subspace_defect.max(max_abs(&(&out - p * &out * p)));
        }
    }

    let mut in_leak: f64 = 0.0;
    let mut out_leak: f64 = 0.0;
    let mut block_tp = zeros(code_cols.len(), code_cols.len());
    for k in &map.kraus {
        let kp = k * p;
        let pk = p * k;
        out_leak = out_leak.max(max_abs(&(&kp - p * &kp)));
        in_leak = in_leak.max(max_abs(&(&pk - &pk * p)));
        // A block in the code basis
        let a = CMat::from_fn(code_cols.len(), code_cols.len(), |r, s| {
            (vecs.column(code_cols[r]).adjoint() * k * vecs.column(code_cols[s]))[(0, 0)]
        });
        block_tp += a.adjoint() * a;
    }
    let _ = comp_cols;
    let block_tp_defect = max_abs(&(block_tp - identity(code_cols.len())));

    let pred1 = adjoint_defect <= tol && subspace_defect <= tol;
    let pred2 = in_leak <= tol && out_leak <= tol && block_tp_defect <= tol;
    Ok(ScptpReport {
        is_scptp: pred1,
        adjoint_defect,
        subspace_defect,
        in_leak,
        out_leak,
        block_tp_defect,
        predicates_agree: pred1 == pred2,
    })
}

/// Deviation from trace preservation, as the Choi-state trace distance
/// (1/(2√d₁))·√tr(Δ²) for Δ = ΣKᵢ†Kᵢ − 𝟙, plus ‖Δ‖ in max-norm.
#[derive(Debug, Clone, Serialize)]
pub struct AtpReport {
    pub choi_deviation: f64,
    pub defect_max_norm: f64,
}

pub fn atp_deviation(map: &KrausMap) -> AtpReport {
    let delta = map.tp_defect();
    let tr2 = trace(&(&delta * &delta)).re;
    AtpReport {
        choi_deviation: tr2.max(0.0).sqrt() / (2.0 * (map.dim_in as f64).sqrt()),
        defect_max_norm: max_abs(&delta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineKind {
    /// Apply maps left to right: `combine(Compose, [f, g], _)` is g∘f.
    Compose,
    Tensor,
    Mix,
}

pub fn combine(kind: CombineKind, maps: &[KrausMap], weights: Option<&[f64]>) -> Result<KrausMap> {
    if maps.is_empty() {
        return Err(Error::EmptyKrausList);
    }
    match kind {
        CombineKind::Compose => {
            let mut acc = maps[0].clone();
            for next in &maps[1..] {
                if next.dim_in != acc.dim_out {
                    return Err(Error::DimensionMismatch("compose chain".into()));
                }
                let kraus: Vec<CMat> = next
                    .kraus
                    .iter()
                    .flat_map(|g| acc.kraus.iter().map(move |f| g * f))
                    .collect();
                acc = KrausMap::new(kraus)?;
            }
            Ok(acc)
        }
        CombineKind::Tensor => {
            let mut acc = maps[0].clone();
            for next in &maps[1..] {
                let kraus: Vec<CMat> = acc
                    .kraus
                    .iter()
                    .flat_map(|a| next.kraus.iter().map(move |b| kron(a, b)))
                    .collect();
                acc = KrausMap::new(kraus)?;
            }
            Ok(acc)
        }
        CombineKind::Mix => {
            let w = weights.ok_or_else(|| Error::InvalidWeights("missing weights".into()))?;
            if w.len() != maps.len() {
                return Err(Error::InvalidWeights("weight count".into()));
            }
            if (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 || w.iter().any(|&x| x < 0.0) {
                return Err(Error::InvalidWeights("weights must sum to 1".into()));
            }
            let (d_in, d_out) = (maps[0].dim_in, maps[0].dim_out);
            if maps.iter().any(|m| m.dim_in != d_in || m.dim_out != d_out) {
                return Err(Error::DimensionMismatch("mix".into()));
            }
            let kraus: Vec<CMat> = maps
                .iter()
                .zip(w)
                .flat_map(|(m, &p)| m.kraus.iter().map(move |k| k * cr(p.sqrt())))
                .collect();
            KrausMap::new(kraus)
        }
    }
}

/// Single-qubit amplitude damping with decay probability γ.
pub fn amplitude_damping(gamma: f64) -> KrausMap {
    let k0 = CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr((1.0 - gamma).sqrt())]);
    let k1 = CMat::from_row_slice(2, 2, &[cr(0.0), cr(gamma.sqrt()), cr(0.0), cr(0.0)]);
    KrausMap::new(vec![k0, k1]).expect("fixed shapes")
}

/// Qubit depolarizing channel: ρ ↦ (1−p)ρ + (p/3)(XρX + YρY + ZρZ).
pub fn qubit_depolarizing(p: f64) -> KrausMap {
    let ks = vec![
        identity(2) * cr((1.0 - p).sqrt()),
        pauli_x() * cr((p / 3.0).sqrt()),
        pauli_y() * cr((p / 3.0).sqrt()),
        pauli_z() * cr((p / 3.0).sqrt()),
    ];
    KrausMap::new(ks).expect("fixed shapes")
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}

pub fn hadamard() -> CMat {
    let s = cr(std::f64::consts::FRAC_1_SQRT_2);
    CMat::from_row_slice(2, 2, &[s, s, s, -s])
}

/// Random CP map with the given Kraus rank (not trace preserving).
pub fn random_cp_map<R: Rng>(dim_in: usize, dim_out: usize, rank: usize, rng: &mut R) -> KrausMap {
    let kraus: Vec<CMat> = (0..rank.max(1))
        .map(|_| random_gaussian(dim_out, dim_in, rng))
        .collect();
    KrausMap::new(kraus).expect("nonempty")
}

/// Random channel: Gaussian Kraus operators renormalized to trace preservation.
pub fn random_channel<R: Rng>(dim_in: usize, dim_out: usize, rank: usize, rng: &mut R) -> KrausMap {
    let raw = random_cp_map(dim_in, dim_out, rank, rng);
    let s = raw.tp_defect() + identity(dim_in);
    let s_inv_sqrt = crate::linalg::inv_sqrtm_pd(&s);
    let kraus: Vec<CMat> = raw.kraus.iter().map(|k| k * &s_inv_sqrt).collect();
    KrausMap::new(kraus).expect("nonempty")
}

pub fn random_gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    use rand::distributions::Distribution;
    let normal = rand::distributions::Uniform::new(0.0f64, 1.0f64);
    // Box-Muller from uniforms keeps the dependency list short.
    CMat::from_fn(rows, cols, |_, _| {
        let u1: f64 = normal.sample(rng).max(1e-12);
        let u2: f64 = normal.sample(rng);
        let r = (-2.0 * u1.ln()).sqrt();
        c(
            r * (2.0 * std::f64::consts::PI * u2).cos(),
            r * (2.0 * std::f64::consts::PI * u2).sin(),
        ) * cr(0.5)
    })
}

/// Haar-random unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let g = random_gaussian(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix phases so the distribution is Haar
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / cr(d.norm()) } else { cr(1.0) };
        for i in 0..dim {
            q[(i, j)] /= phase;
        }
    }
    q
}
