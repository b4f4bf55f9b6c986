//! Generalized Gell-Mann matrices, structure constants, adjoint
//! generators, and parity signs for su(d).
//!
//! Basis ordering: for each column j = 1..d−1, the symmetric and
//! antisymmetric pair operators (i, j) for i < j, then the diagonal
//! operator for that column. This reduces to the Pauli order (x, y, z)
//! at d = 2 and the historical λ₁..λ₈ numbering at d = 3.

use crate::linalg::{c, cr, max_abs, trace, zeros, CMat};
use crate::{Error, Result};

/// The su(d) operator basis with tr(tᵃtᵇ) = δ_ab/2.
#[derive(Debug, Clone)]
pub struct SuBasis {
    pub d: usize,
    /// D = d² − 1.
    pub dim_adjoint: usize,
    /// Gell-Mann matrices tᵃ, each d×d Hermitian.
    pub t: Vec<CMat>,
    /// Antisymmetric structure constants, index a·D² + b·D + c.
    pub f: Vec<f64>,
    /// Symmetric structure constants, same layout.
    pub d_sym: Vec<f64>,
    /// Adjoint generators Tᵃ = −i Σ f_amn |m⟩⟨n|, each D×D Hermitian.
    pub adjoint: Vec<CMat>,
    /// Signs of the outer automorphism t ↦ −tᵀ: −1 for real
    /// (symmetric and diagonal) generators, +1 for imaginary ones.
    pub eta: Vec<f64>,
}

/// Builds the su(d) basis for 2 ≤ d ≤ 6.
pub fn su_basis(d: usize) -> Result<SuBasis> {
    if !(2..=6).contains(&d) {
        return Err(Error::Unsupported(format!("su_basis: d = {d}")));
    }
    let dim = d * d - 1;
    let mut t: Vec<CMat> = Vec::with_capacity(dim);
    let mut eta = Vec::with_capacity(dim);
    for j in 1..d {
        for i in 0..j {
            let mut sym = zeros(d, d);
            sym[(i, j)] = cr(0.5);
            sym[(j, i)] = cr(0.5);
            t.push(sym);
            eta.push(-1.0);
            let mut asym = zeros(d, d);
            asym[(i, j)] = c(0.0, -0.5);
            asym[(j, i)] = c(0.0, 0.5);
            t.push(asym);
            eta.push(1.0);
        }
        let norm = 1.0 / (2.0 * j as f64 * (j as f64 + 1.0)).sqrt();
        let mut diag = zeros(d, d);
        for k in 0..j {
            diag[(k, k)] = cr(norm);
        }
        diag[(j, j)] = cr(-(j as f64) * norm);
        t.push(diag);
        eta.push(-1.0);
    }

    let idx = |a: usize, b: usize, cc: usize| a * dim * dim + b * dim + cc;
    let mut f = vec![0.0; dim * dim * dim];
    let mut d_sym = vec![0.0; dim * dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let comm = &t[a] * &t[b] - &t[b] * &t[a];
            let anti = &t[a] * &t[b] + &t[b] * &t[a];
            for cc in 0..dim {
                // f_abc = −2i tr([tᵃ,tᵇ]tᶜ), d_abc = 2 tr({tᵃ,tᵇ}tᶜ)
                let fv = trace(&(&comm * &t[cc])) * c(0.0, -2.0);
                let dv = trace(&(&anti * &t[cc])) * cr(2.0);
                debug_assert!(fv.im.abs() < 1e-12 && dv.im.abs() < 1e-12);
                f[idx(a, b, cc)] = fv.re;
                d_sym[idx(a, b, cc)] = dv.re;
            }
        }
    }

    let adjoint = (0..dim)
        .map(|a| CMat::from_fn(dim, dim, |m, n| c(0.0, -f[idx(a, m, n)])))
        .collect();

    Ok(SuBasis {
        d,
        dim_adjoint: dim,
        t,
        f,
        d_sym,
        adjoint,
        eta,
    })
}

impl SuBasis {
    #[inline]
    pub fn f_at(&self, a: usize, b: usize, c: usize) -> f64 {
        self.f[a * self.dim_adjoint * self.dim_adjoint + b * self.dim_adjoint + c]
    }

    #[inline]
    pub fn d_at(&self, a: usize, b: usize, c: usize) -> f64 {
        self.d_sym[a * self.dim_adjoint * self.dim_adjoint + b * self.dim_adjoint + c]
    }

    /// Σ_a tᵃtᵃ = (D/2d)·𝟙.
    pub fn casimir(&self) -> CMat {
        let mut acc = zeros(self.d, self.d);
        for ta in &self.t {
            acc += ta * ta;
        }
        acc
    }

    /// The on-site parity operator: the diagonal sign matrix realizing
    /// t ↦ −tᵀ in the adjoint index basis.
    pub fn parity_matrix(&self) -> CMat {
        CMat::from_fn(self.dim_adjoint, self.dim_adjoint, |m, n| {
            if m == n {
                cr(self.eta[m])
            } else {
                cr(0.0)
            }
        })
    }

    /// Two-site interaction h = Σ_a Tᵃ ⊗ Tᵃ on adjacent adjoint sites.
    pub fn coupling_term(&self) -> CMat {
        let dim = self.dim_adjoint;
        let mut h = zeros(dim * dim, dim * dim);
        for ta in &self.adjoint {
            h += crate::linalg::kron(ta, ta);
        }
        h
    }

    /// Local Hamiltonian term H = h + (2/3d)·h².
    pub fn local_term(&self) -> CMat {
        let h = self.coupling_term();
        &h + &h * &h * cr(2.0 / (3.0 * self.d as f64))
    }
}

/// The primary transfer matrix M = (2/d) Σ_m tᵐ ⊗ tᵐ* and its spectrum.
#[derive(Debug, Clone)]
pub struct TransferSpectrum {
    pub matrix: CMat,
    /// All d² eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Leading eigenvalue (d²−1)/d².
    pub mu0: f64,
    /// Subleading eigenvalue −1/d², (d²−1)-fold.
    pub mu1: f64,
}

pub fn transfer_spectrum(d: usize) -> Result<TransferSpectrum> {
    let su = su_basis(d)?;
    let mut m = zeros(d * d, d * d);
    for ta in &su.t {
        m += crate::linalg::kron(ta, &ta.map(|z| z.conj())) * cr(2.0 / d as f64);
    }
    debug_assert!(max_abs(&(&m - m.adjoint())) < 1e-14);
    let (eigenvalues, _) = crate::linalg::herm_eigen(&m);
    Ok(TransferSpectrum {
        matrix: m,
        eigenvalues,
        mu0: (d * d - 1) as f64 / (d * d) as f64,
        mu1: -1.0 / (d * d) as f64,
    })
}

/// Ground-state energies of the local coupling and its square:
/// E(h) = −d³/(2(d²−1)) and E(h²) = d²(d²+2)/(4(d²−1)).
pub fn ground_energy(d: usize) -> (f64, f64) {
    let dd = d as f64;
    let den = dd * dd - 1.0;
    (
        -dd.powi(3) / (2.0 * den),
        dd * dd * (dd * dd + 2.0) / (4.0 * den),
    )
}

/// The contraction ratio χ = −1/(d²−1) of the transfer channel.
pub fn chi(d: usize) -> f64 {
    -1.0 / (d * d - 1) as f64
}
