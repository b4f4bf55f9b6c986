//! Matrix-product codewords and their contraction engine.
//!
//! Site tensors are Aⁱ = √(2d/D)·tⁱ with bond dimension d. Contractions
//! walk the chain once, evolving a d×d bond-pair operator X (ket index
//! left, bra index right): one site step maps X ↦ Σ_ij O_ij Aʲ X Aⁱ†,
//! and a bond operator Y inserted on the ket side maps X ↦ Y·X.
//!
//! Site numbering is 1-based. `Bond(n)` is the link between sites n and
//! n+1; `Bond(0)` sits at the logical input of a holographic chain, and
//! for periodic chains `Bond(N)` is the wrap-around link. The
//! holographic chain has a physical edge site numbered N+1.

use super::su::{chi, su_basis, SuBasis};
use crate::linalg::{cr, identity, inv_sqrtm_pd, kron, max_abs, trace, zeros, CMat, CVec};
use crate::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Periodic chain; codewords are the two symmetry-broken ground
    /// states (tensors Aⁱ and their conjugates).
    Bulk,
    /// Open chain with boundary |l⟩⟨r|, |r⟩ pinned to the first basis
    /// state; the d boundary vectors |l⟩ label the codewords.
    Edge,
    /// Half-open chain: the logical state enters at bond 0 and the last
    /// virtual index becomes a physical edge site.
    Holographic,
}

/// Where an operator is inserted in the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loc {
    /// Physical site, 1..=N (plus N+1 for the holographic edge site).
    Site(usize),
    /// Virtual bond n+, between sites n and n+1.
    Bond(usize),
}

#[derive(Debug, Clone)]
pub struct Insertion {
    pub loc: Loc,
    pub op: CMat,
}

impl Insertion {
    pub fn site(n: usize, op: CMat) -> Self {
        Insertion {
            loc: Loc::Site(n),
            op,
        }
    }

    pub fn bond(n: usize, op: CMat) -> Self {
        Insertion {
            loc: Loc::Bond(n),
            op,
        }
    }
}

/// One of the three VBS code families at fixed (d, N).
#[derive(Debug, Clone)]
pub struct MpsCode {
    pub d: usize,
    pub n_sites: usize,
    pub kind: BoundaryKind,
    pub su: SuBasis,
    /// Aⁱ = √(2d/D) tⁱ.
    pub tensors: Vec<CMat>,
    tensors_conj: Vec<CMat>,
    norms: Vec<f64>,
    gram: CMat,
    gram_inv_sqrt: CMat,
}

/// Builds one of the three code families.
pub fn build_code(d: usize, n: usize, kind: BoundaryKind) -> Result<MpsCode> {
    if kind == BoundaryKind::Bulk && d < 3 {
        return Err(Error::Unsupported(
            "bulk code needs d ≥ 3 (unique ground state at d = 2)".into(),
        ));
    }
    let min_sites = if kind == BoundaryKind::Bulk { 2 } else { 1 };
    if n < min_sites {
        return Err(Error::Unsupported(format!("chain too short: N = {n}")));
    }
    let su = su_basis(d)?;
    let scale = cr((2.0 * d as f64 / su.dim_adjoint as f64).sqrt());
    let tensors: Vec<CMat> = su.t.iter().map(|t| t * scale).collect();
    let tensors_conj: Vec<CMat> = tensors.iter().map(|a| a.map(|z| z.conj())).collect();
    let mut code = MpsCode {
        d,
        n_sites: n,
        kind,
        su,
        tensors,
        tensors_conj,
        norms: Vec::new(),
        gram: identity(1),
        gram_inv_sqrt: identity(1),
    };
    let m = code.num_codewords();
    let mut raw = zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            raw[(a, b)] = code.raw_melem(a, b, &[])?;
        }
    }
    code.norms = (0..m).map(|a| raw[(a, a)].re.sqrt()).collect();
    code.gram = CMat::from_fn(m, m, |a, b| raw[(a, b)] / cr(code.norms[a] * code.norms[b]));
    code.gram_inv_sqrt = inv_sqrtm_pd(&code.gram);
    Ok(code)
}

impl MpsCode {
    pub fn num_codewords(&self) -> usize {
        match self.kind {
            BoundaryKind::Bulk => 2,
            _ => self.d,
        }
    }

    /// Subleading-to-leading transfer eigenvalue ratio χ = −1/(d²−1).
    pub fn chi(&self) -> f64 {
        chi(self.d)
    }

    /// Gram matrix of the normalized codewords.
    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    /// E(ρ) = Σᵢ Aⁱ ρ Aⁱ†, the transfer channel on the bond space.
    pub fn transfer_channel(&self, x: &CMat) -> CMat {
        let mut out = zeros(self.d, self.d);
        for a in &self.tensors {
            out += a * x * a.adjoint();
        }
        out
    }

    fn ket_tensors(&self, label: usize) -> &[CMat] {
        if self.kind == BoundaryKind::Bulk && label == 1 {
            &self.tensors_conj
        } else {
            &self.tensors
        }
    }

    fn boundary_vector(&self, label: usize) -> CVec {
        let mut v = CVec::zeros(self.d);
        v[label] = cr(1.0);
        v
    }

    fn max_bond(&self) -> usize {
        self.n_sites
    }

    fn max_site(&self) -> usize {
        match self.kind {
            BoundaryKind::Holographic => self.n_sites + 1,
            _ => self.n_sites,
        }
    }

    /// Groups insertions by location, composing multiple operators at
    /// one location in application order (later operators act later,
    /// i.e. multiply from the left).
    fn group_insertions(
        &self,
        ins: &[Insertion],
    ) -> Result<(Vec<Option<CMat>>, Vec<Option<CMat>>, Option<CMat>)> {
        let n = self.n_sites;
        let dim_site = self.su.dim_adjoint;
        let mut site_ops: Vec<Option<CMat>> = vec![None; n + 1]; // 1..=N
        let mut bond_ops: Vec<Option<CMat>> = vec![None; n + 1]; // 0..=N
        let mut edge_op: Option<CMat> = None;
        for item in ins {
            match item.loc {
                Loc::Site(k) => {
                    if k == n + 1 && self.kind == BoundaryKind::Holographic {
                        if item.op.nrows() != self.d || item.op.ncols() != self.d {
                            return Err(Error::DimensionMismatch("edge-site operator".into()));
                        }
                        edge_op = Some(match edge_op {
                            Some(prev) => &item.op * prev,
                            None => item.op.clone(),
                        });
                    } else {
                        if k == 0 || k > self.max_site().min(n) {
                            return Err(Error::OutOfRange(format!("site {k}")));
                        }
                        if item.op.nrows() != dim_site || item.op.ncols() != dim_site {
                            return Err(Error::DimensionMismatch("site operator".into()));
                        }
                        site_ops[k] = Some(match &site_ops[k] {
                            Some(prev) => &item.op * prev,
                            None => item.op.clone(),
                        });
                    }
                }
                Loc::Bond(k) => {
                    let k = if self.kind == BoundaryKind::Bulk && k == 0 {
                        self.n_sites
                    } else {
                        k
                    };
                    if k > self.max_bond() {
                        return Err(Error::OutOfRange(format!("bond {k}")));
                    }
                    if self.kind == BoundaryKind::Bulk && k == 0 {
                        return Err(Error::OutOfRange("bond 0 on a periodic chain".into()));
                    }
                    if item.op.nrows() != self.d || item.op.ncols() != self.d {
                        return Err(Error::DimensionMismatch("bond operator".into()));
                    }
                    bond_ops[k] = Some(match &bond_ops[k] {
                        Some(prev) => &item.op * prev,
                        None => item.op.clone(),
                    });
                }
            }
        }
        Ok((site_ops, bond_ops, edge_op))
    }

    /// Unnormalized matrix element ⟨ψ_bra| (insertions) |ψ_ket⟩.
    pub fn raw_melem(&self, bra: usize, ket: usize, ins: &[Insertion]) -> Result<Complex64> {
        let m = self.num_codewords();
        if bra >= m || ket >= m {
            return Err(Error::OutOfRange("codeword label".into()));
        }
        let (site_ops, bond_ops, edge_op) = self.group_insertions(ins)?;
        match self.kind {
            BoundaryKind::Bulk => {
                self.pbc_trace(bra, ket, &site_ops, &bond_ops, edge_op.is_some())
            }
            BoundaryKind::Edge => {
                let r = self.boundary_vector(0);
                let lb = self.boundary_vector(bra);
                let lk = self.boundary_vector(ket);
                if edge_op.is_some() {
                    return Err(Error::OutOfRange("edge site on an open chain".into()));
                }
                Ok(self.obc_value(&lb, &lk, &r, &r, &site_ops, &bond_ops))
            }
            BoundaryKind::Holographic => {
                let b = self.boundary_vector(bra);
                let k = self.boundary_vector(ket);
                Ok(self.hbc_value(&b, &k, &site_ops, &bond_ops, edge_op.as_ref()))
            }
        }
    }

    /// Matrix element between normalized codewords.
    pub fn melem(&self, bra: usize, ket: usize, ins: &[Insertion]) -> Result<Complex64> {
        Ok(self.raw_melem(bra, ket, ins)? / cr(self.norms[bra] * self.norms[ket]))
    }

    /// Gram-corrected logical operator of an insertion list:
    /// G^{−1/2} M G^{−1/2} with M the normalized matrix-element table.
    pub fn logical_matrix(&self, ins: &[Insertion]) -> Result<CMat> {
        let m = self.num_codewords();
        let mut raw = zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                raw[(a, b)] = self.melem(a, b, ins)?;
            }
        }
        Ok(&self.gram_inv_sqrt * raw * &self.gram_inv_sqrt)
    }

    /// Normalized expectation value of a product of single-site
    /// operators on the codeword `label`.
    pub fn expectation(&self, label: usize, placements: &[(usize, CMat)]) -> Result<Complex64> {
        let mut seen = std::collections::HashSet::new();
        for (site, op) in placements {
            if !seen.insert(*site) {
                return Err(Error::Malformed(format!("site {site} placed twice")));
            }
            let want = if *site == self.n_sites + 1 {
                self.d
            } else {
                self.su.dim_adjoint
            };
            if op.nrows() != want || op.ncols() != want {
                return Err(Error::DimensionMismatch("expectation operator".into()));
            }
        }
        let ins: Vec<Insertion> = placements
            .iter()
            .map(|(site, op)| Insertion::site(*site, op.clone()))
            .collect();
        let num = self.raw_melem(label, label, &ins)?;
        let den = self.norms[label] * self.norms[label];
        Ok(num / cr(den))
    }

    /// ⟨ψ_α| tᵃ inserted at link n (side + or −) |ψ_β⟩, normalized.
    pub fn bond_matrix_element(
        &self,
        a: usize,
        link: usize,
        plus: bool,
        alpha: usize,
        beta: usize,
    ) -> Result<Complex64> {
        let bond = if plus {
            link
        } else {
            link.checked_sub(1)
                .ok_or_else(|| Error::OutOfRange("link 0 has no − side".into()))?
        };
        if a >= self.su.dim_adjoint {
            return Err(Error::OutOfRange(format!("generator {a}")));
        }
        self.melem(alpha, beta, &[Insertion::bond(bond, self.su.t[a].clone())])
    }

    /// Two-operator variant ⟨ψ_α| tᵃ_{m+} tᵇ_{n+} |ψ_β⟩ for m < n.
    pub fn bond_matrix_element2(
        &self,
        a: usize,
        m: usize,
        b: usize,
        n: usize,
        alpha: usize,
        beta: usize,
    ) -> Result<Complex64> {
        if m >= n {
            return Err(Error::Malformed("need m < n".into()));
        }
        self.melem(
            alpha,
            beta,
            &[
                Insertion::bond(m, self.su.t[a].clone()),
                Insertion::bond(n, self.su.t[b].clone()),
            ],
        )
    }

    // ----------------------------------------------------------------
    // chain walks
    // ----------------------------------------------------------------

    fn site_step(
        &self,
        x: &CMat,
        op: Option<&CMat>,
        ket_family: &[CMat],
        bra_family: &[CMat],
    ) -> CMat {
        let mut out = zeros(self.d, self.d);
        match op {
            None => {
                for (k, b) in ket_family.iter().zip(bra_family) {
                    out += k * x * b.adjoint();
                }
            }
            Some(o) => {
                let dim = ket_family.len();
                for i in 0..dim {
                    let bi = bra_family[i].adjoint();
                    for j in 0..dim {
                        let w = o[(i, j)];
                        if w.norm_sqr() > 0.0 {
                            out += &ket_family[j] * x * &bi * w;
                        }
                    }
                }
            }
        }
        out
    }

    /// Half-boundary walk: X₀ = |ket_b⟩⟨bra_b|, value = tr(O_edge X_N).
    pub fn hbc_value(
        &self,
        bra_boundary: &CVec,
        ket_boundary: &CVec,
        site_ops: &[Option<CMat>],
        bond_ops: &[Option<CMat>],
        edge_op: Option<&CMat>,
    ) -> Complex64 {
        let mut x: CMat = ket_boundary * bra_boundary.adjoint();
        if let Some(y) = &bond_ops[0] {
            x = y * x;
        }
        for k in 1..=self.n_sites {
            x = self.site_step(&x, site_ops[k].as_ref(), &self.tensors, &self.tensors);
            if let Some(y) = &bond_ops[k] {
                x = y * x;
            }
        }
        match edge_op {
            Some(o) => trace(&(o * x)),
            None => trace(&x),
        }
    }

    /// Open-boundary walk with arbitrary boundary vectors:
    /// value = ⟨r_bra| X_N |r_ket⟩ for X₀ = |l_ket⟩⟨l_bra|.
    pub fn obc_value(
        &self,
        l_bra: &CVec,
        l_ket: &CVec,
        r_bra: &CVec,
        r_ket: &CVec,
        site_ops: &[Option<CMat>],
        bond_ops: &[Option<CMat>],
    ) -> Complex64 {
        let mut x: CMat = l_ket * l_bra.adjoint();
        if let Some(y) = &bond_ops[0] {
            x = y * x;
        }
        for k in 1..=self.n_sites {
            x = self.site_step(&x, site_ops[k].as_ref(), &self.tensors, &self.tensors);
            if let Some(y) = &bond_ops[k] {
                x = y * x;
            }
        }
        (r_ket.adjoint() * x * r_bra)[(0, 0)]
    }

    /// Periodic trace walk with per-label tensor families. Bond
    /// operators are given in the A-frame; on the conjugate family they
    /// act transposed.
    fn pbc_trace(
        &self,
        bra: usize,
        ket: usize,
        site_ops: &[Option<CMat>],
        bond_ops: &[Option<CMat>],
        has_edge_op: bool,
    ) -> Result<Complex64> {
        if has_edge_op {
            return Err(Error::OutOfRange("edge site on a periodic chain".into()));
        }
        let d = self.d;
        let ket_fam = self.ket_tensors(ket).to_vec();
        let bra_fam = self.ket_tensors(bra).to_vec();
        let ket_conj = ket == 1;
        let adapt = |y: &CMat| -> CMat {
            if ket_conj {
                y.transpose()
            } else {
                y.clone()
            }
        };
        // pair matrix per site: Σ_ij O_ij ketʲ ⊗ conj(braⁱ)
        let pair_site = |op: Option<&CMat>| -> CMat {
            let dim = ket_fam.len();
            let mut acc = zeros(d * d, d * d);
            match op {
                None => {
                    for i in 0..dim {
                        acc += kron(&ket_fam[i], &bra_fam[i].map(|z| z.conj()));
                    }
                }
                Some(o) => {
                    for i in 0..dim {
                        let bc = bra_fam[i].map(|z| z.conj());
                        for j in 0..dim {
                            let w = o[(i, j)];
                            if w.norm_sqr() > 0.0 {
                                acc += kron(&ket_fam[j], &bc) * w;
                            }
                        }
                    }
                }
            }
            acc
        };
        let mut m = identity(d * d);
        if let Some(y) = &bond_ops[self.n_sites] {
            m = kron(&adapt(y), &identity(d)) * m;
        }
        for k in 1..=self.n_sites {
            m = pair_site(site_ops[k].as_ref()) * m;
            if k < self.n_sites {
                if let Some(y) = &bond_ops[k] {
                    m = kron(&adapt(y), &identity(d)) * m;
                }
            }
        }
        Ok(trace(&m))
    }

    // ----------------------------------------------------------------
    // closed-form fast path for bond-only insertions
    // ----------------------------------------------------------------

    /// Applies k steps of the transfer channel in closed form:
    /// Eᵏ(X) = tr(X)(1−χᵏ)/d·𝟙 + χᵏ·X.
    pub fn transfer_pow(&self, x: &CMat, k: usize) -> CMat {
        if k == 0 {
            return x.clone();
        }
        let ck = self.chi().powi(k as i32);
        let t = trace(x) * cr((1.0 - ck) / self.d as f64);
        identity(self.d) * t + x * cr(ck)
    }

    fn mixed_pow(&self, x: &CMat, k: usize) -> CMat {
        if k == 0 {
            return x.clone();
        }
        let dd = self.d as f64;
        let sym = (x + x.transpose()) * cr(0.5);
        let asym = (x - x.transpose()) * cr(0.5);
        let es = (1.0 / (dd + 1.0)).powi(k as i32);
        let ea = (-1.0 / (dd - 1.0)).powi(k as i32);
        sym * cr(es) + asym * cr(ea)
    }

    fn segment_pow(&self, x: &CMat, k: usize, bra: usize, ket: usize) -> CMat {
        if self.kind != BoundaryKind::Bulk || bra == ket {
            self.transfer_pow(x, k)
        } else {
            self.mixed_pow(x, k)
        }
    }

    /// Unnormalized matrix element for bond-only insertions, using the
    /// spectral form of the transfer segments. Agrees with
    /// [`Self::raw_melem`] to machine precision.
    pub fn raw_melem_bonds_fast(
        &self,
        bra: usize,
        ket: usize,
        bonds: &[(usize, CMat)],
    ) -> Result<Complex64> {
        let mut per_bond: Vec<Option<CMat>> = vec![None; self.n_sites + 1];
        for (k, op) in bonds {
            let k = if self.kind == BoundaryKind::Bulk && *k == 0 {
                self.n_sites
            } else {
                *k
            };
            if k > self.n_sites {
                return Err(Error::OutOfRange(format!("bond {k}")));
            }
            let eff = if self.kind == BoundaryKind::Bulk && ket == 1 {
                op.transpose()
            } else {
                op.clone()
            };
            per_bond[k] = Some(match &per_bond[k] {
                Some(prev) => &eff * prev,
                None => eff,
            });
        }
        match self.kind {
            BoundaryKind::Holographic | BoundaryKind::Edge => {
                let mut x: CMat = {
                    let b = self.boundary_vector(bra);
                    let k = self.boundary_vector(ket);
                    k * b.adjoint()
                };
                let mut pos = 0usize;
                for k in 0..=self.n_sites {
                    if let Some(y) = &per_bond[k] {
                        x = self.transfer_pow(&x, k - pos);
                        x = y * x;
                        pos = k;
                    }
                }
                x = self.transfer_pow(&x, self.n_sites - pos);
                match self.kind {
                    BoundaryKind::Holographic => Ok(trace(&x)),
                    _ => {
                        let r = self.boundary_vector(0);
                        Ok((r.adjoint() * x * r)[(0, 0)])
                    }
                }
            }
            BoundaryKind::Bulk => {
                let d = self.d;
                let mut total = Complex64::new(0.0, 0.0);
                for u in 0..d {
                    for v in 0..d {
                        let mut x = zeros(d, d);
                        x[(u, v)] = cr(1.0);
                        if let Some(y) = &per_bond[self.n_sites] {
                            x = y * x;
                        }
                        let mut pos = 0usize;
                        for k in 1..self.n_sites {
                            if let Some(y) = &per_bond[k] {
                                x = self.segment_pow(&x, k - pos, bra, ket);
                                x = y * x;
                                pos = k;
                            }
                        }
                        x = self.segment_pow(&x, self.n_sites - pos, bra, ket);
                        total += x[(u, v)];
                    }
                }
                Ok(total)
            }
        }
    }

    /// Gram-corrected logical matrix from bond-only insertions via the
    /// fast walk.
    pub fn logical_matrix_bonds_fast(&self, bonds: &[(usize, CMat)]) -> Result<CMat> {
        let m = self.num_codewords();
        let mut raw = zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                raw[(a, b)] =
                    self.raw_melem_bonds_fast(a, b, bonds)? / cr(self.norms[a] * self.norms[b]);
            }
        }
        Ok(&self.gram_inv_sqrt * raw * &self.gram_inv_sqrt)
    }

    // ----------------------------------------------------------------
    // reduced states
    // ----------------------------------------------------------------

    /// Logical edge state σ_n = E^{n−1}(|α⟩⟨α|) of a holographic chain
    /// and, for n ≤ N, the reduced state of bulk site n.
    pub fn edge_state(&self, alpha: usize, n: usize) -> Result<EdgeStateReport> {
        if self.kind != BoundaryKind::Holographic {
            return Err(Error::Unsupported("edge_state needs a holographic code".into()));
        }
        if n == 0 || n > self.n_sites + 1 {
            return Err(Error::OutOfRange(format!("site {n}")));
        }
        let v = self.boundary_vector(alpha);
        let mut sigma: CMat = &v * v.adjoint();
        for _ in 1..n {
            sigma = self.transfer_channel(&sigma);
        }
        let site_reduced = (n <= self.n_sites).then(|| {
            let dim = self.su.dim_adjoint;
            CMat::from_fn(dim, dim, |i, j| {
                trace(&(&sigma * &self.tensors[j] * &self.tensors[i]))
            })
        });
        Ok(EdgeStateReport {
            sigma,
            site_reduced,
        })
    }

    /// Reduced density operator of `len` contiguous sites starting at
    /// `start` (1-based) for the codeword `label`, normalized to trace 1.
    pub fn reduced_window(&self, label: usize, start: usize, len: usize) -> Result<CMat> {
        let dim_site = self.su.dim_adjoint;
        let out_dim = dim_site.pow(len as u32);
        if out_dim > 1 << 14 {
            return Err(Error::SizeLimit(format!("window dimension {out_dim}")));
        }
        if start == 0 || start + len - 1 > self.n_sites || len == 0 {
            return Err(Error::OutOfRange("window out of range".into()));
        }
        let d = self.d;
        let fam = self.ket_tensors(label).to_vec();
        let fam_conj: Vec<CMat> = fam.iter().map(|a| a.map(|z| z.conj())).collect();
        let tail = self.n_sites - (start + len - 1);

        // multi-index helper over the window
        let decode = |mut idx: usize| -> Vec<usize> {
            let mut out = vec![0; len];
            for slot in (0..len).rev() {
                out[slot] = idx % dim_site;
                idx /= dim_site;
            }
            out
        };

        let rho = match self.kind {
            BoundaryKind::Bulk => {
                // caps are transfer-matrix powers in pair space
                let mut t_pair = zeros(d * d, d * d);
                for i in 0..dim_site {
                    t_pair += kron(&fam[i], &fam_conj[i]);
                }
                let pow = |k: usize| -> CMat {
                    let mut acc = identity(d * d);
                    for _ in 0..k {
                        acc = &t_pair * &acc;
                    }
                    acc
                };
                let cap = pow(self.n_sites - len);
                CMat::from_fn(out_dim, out_dim, |row, col| {
                    let is = decode(row);
                    let js = decode(col);
                    let mut m = cap.clone();
                    for s in 0..len {
                        m = kron(&fam[js[s]], &fam_conj[is[s]]) * m;
                    }
                    trace(&m)
                })
            }
            BoundaryKind::Edge | BoundaryKind::Holographic => {
                let b = self.boundary_vector(label);
                let mut x_left: CMat = &b * b.adjoint();
                x_left = self.transfer_pow(&x_left, start - 1);
                let close = |y: &CMat| -> Complex64 {
                    match self.kind {
                        BoundaryKind::Holographic => trace(y),
                        _ => {
                            let r = self.boundary_vector(0);
                            let z = self.transfer_pow(y, tail);
                            (r.adjoint() * z * r)[(0, 0)]
                        }
                    }
                };
                CMat::from_fn(out_dim, out_dim, |row, col| {
                    let is = decode(row);
                    let js = decode(col);
                    let mut y = x_left.clone();
                    for s in 0..len {
                        y = &fam[js[s]] * y * fam[is[s]].adjoint();
                    }
                    close(&y)
                })
            }
        };
        let tr = trace(&rho);
        if tr.norm() < 1e-300 {
            return Err(Error::Malformed("window has zero weight".into()));
        }
        let rho = &rho / tr;
        debug_assert!(max_abs(&(&rho - rho.adjoint())) < 1e-10);
        Ok(rho)
    }
}

#[derive(Debug, Clone)]
pub struct EdgeStateReport {
    /// σ_n, the d×d state of the propagating edge before site n.
    pub sigma: CMat,
    /// ρ⁽¹⁾_n = Σ_ij tr(σ_n AʲAⁱ)|i⟩⟨j|, the bulk-site reduced state.
    pub site_reduced: Option<CMat>,
}

/// Normalized expectation of a product of single-site operators on the
/// periodic ground state built from the Aⁱ tensors, for any d ≥ 2 (the
/// ring state exists whether or not it carries a code).
pub fn ring_expectation(
    d: usize,
    n: usize,
    placements: &[(usize, CMat)],
) -> Result<num_complex::Complex64> {
    let su = super::su::su_basis(d)?;
    let dim_site = su.dim_adjoint;
    if n < 2 {
        return Err(Error::Unsupported("ring needs at least two sites".into()));
    }
    let scale = cr((2.0 * d as f64 / dim_site as f64).sqrt());
    let tensors: Vec<CMat> = su.t.iter().map(|t| t * scale).collect();
    let conj: Vec<CMat> = tensors.iter().map(|a| a.map(|z| z.conj())).collect();
    let mut site_ops: Vec<Option<CMat>> = vec![None; n + 1];
    let mut seen = std::collections::HashSet::new();
    for (site, op) in placements {
        if *site == 0 || *site > n {
            return Err(Error::OutOfRange(format!("site {site}")));
        }
        if !seen.insert(*site) {
            return Err(Error::Malformed(format!("site {site} placed twice")));
        }
        if op.nrows() != dim_site || op.ncols() != dim_site {
            return Err(Error::DimensionMismatch("ring operator".into()));
        }
        site_ops[*site] = Some(op.clone());
    }
    let pair = |op: Option<&CMat>| -> CMat {
        let mut acc = zeros(d * d, d * d);
        match op {
            None => {
                for i in 0..dim_site {
                    acc += kron(&tensors[i], &conj[i]);
                }
            }
            Some(o) => {
                for i in 0..dim_site {
                    for j in 0..dim_site {
                        let w = o[(i, j)];
                        if w.norm_sqr() > 0.0 {
                            acc += kron(&tensors[j], &conj[i]) * w;
                        }
                    }
                }
            }
        }
        acc
    };
    let plain = pair(None);
    let mut num = identity(d * d);
    let mut den = identity(d * d);
    for k in 1..=n {
        num = pair(site_ops[k].as_ref()) * num;
        den = &plain * den;
    }
    Ok(trace(&num) / trace(&den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn holographic_codewords_are_orthonormal() {
        for d in [2usize, 3] {
            let code = build_code(d, 8, BoundaryKind::Holographic).unwrap();
            assert!(max_abs(&(code.gram() - identity(d))) < 1e-12);
        }
    }

    #[test]
    fn transfer_channel_is_trace_preserving_and_contracts() {
        let code = build_code(2, 4, BoundaryKind::Holographic).unwrap();
        let mut rho = zeros(2, 2);
        rho[(0, 0)] = cr(1.0);
        let mut x = rho.clone();
        for k in 1..=8 {
            x = code.transfer_channel(&x);
            assert_abs_diff_eq!(trace(&x).re, 1.0, epsilon = 1e-13);
            // distance to 𝟙/d decays by |χ| each step
            let dev = &x - identity(2) * cr(0.5);
            let expect = code.chi().powi(k as i32).abs() * 0.5;
            assert_abs_diff_eq!(max_abs(&dev), expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn transfer_pow_matches_iterated_channel() {
        let code = build_code(3, 6, BoundaryKind::Holographic).unwrap();
        let mut x = zeros(3, 3);
        x[(0, 0)] = cr(0.7);
        x[(1, 2)] = cr(0.3);
        x[(0, 2)] = crate::linalg::c(0.1, 0.2);
        let mut iter = x.clone();
        for k in 0..=5 {
            let fast = code.transfer_pow(&x, k);
            assert!(max_abs(&(&fast - &iter)) < 1e-13, "k = {k}");
            iter = code.transfer_channel(&iter);
        }
    }

    #[test]
    fn edge_code_gram_off_diagonals_decay() {
        let code = build_code(2, 12, BoundaryKind::Edge).unwrap();
        let g = code.gram();
        let off = g[(0, 1)].norm();
        // χ^N-scale: 3^{-12} up to O(d) factors (exactly zero for basis
        // boundary labels against |r⟩ = |0⟩)
        assert!(off < 3.0_f64.powi(-10), "off-diagonal {off:.3e}");
        // the χ^N boundary correction shows in the codeword norms instead
        let n0 = code.raw_melem(0, 0, &[]).unwrap().re;
        let n1 = code.raw_melem(1, 1, &[]).unwrap().re;
        let chi_n = code.chi().powi(12);
        assert_abs_diff_eq!(n0 - n1, chi_n, epsilon = 1e-14);
    }

    #[test]
    fn bulk_overlap_scales_with_inverse_d_minus_one() {
        let code = build_code(3, 6, BoundaryKind::Bulk).unwrap();
        let g = code.gram();
        // |<G_L|G_R>| ≈ (d(d-1)/2) (d-1)^{-N} = 3·2^{-6}
        let expect = 3.0 * 0.5_f64.powi(6);
        assert_abs_diff_eq!(g[(0, 1)].norm(), expect, epsilon = 3e-3);
    }

    #[test]
    fn fast_and_generic_walks_agree() {
        let code = build_code(2, 7, BoundaryKind::Holographic).unwrap();
        let t1 = code.su.t[0].clone();
        let t3 = code.su.t[2].clone();
        let bonds = vec![(2usize, t1.clone()), (5usize, t3.clone())];
        let ins = vec![Insertion::bond(2, t1), Insertion::bond(5, t3)];
        for a in 0..2 {
            for b in 0..2 {
                let fast = code.raw_melem_bonds_fast(a, b, &bonds).unwrap();
                let slow = code.raw_melem(a, b, &ins).unwrap();
                assert!((fast - slow).norm() < 1e-13);
            }
        }
        // and on the bulk code with mixed families
        let code = build_code(3, 6, BoundaryKind::Bulk).unwrap();
        let t2 = code.su.t[1].clone();
        let bonds = vec![(3usize, t2.clone())];
        let ins = vec![Insertion::bond(3, t2)];
        for a in 0..2 {
            for b in 0..2 {
                let fast = code.raw_melem_bonds_fast(a, b, &bonds).unwrap();
                let slow = code.raw_melem(a, b, &ins).unwrap();
                assert!((fast - slow).norm() < 1e-12, "({a},{b})");
            }
        }
    }

    #[test]
    fn bond_matrix_element_reproduces_decay_law() {
        // ⟨ψ_α| tᵃ_{n+} |ψ_β⟩ = χⁿ tᵃ_αβ, exact on the holographic code
        let code = build_code(2, 12, BoundaryKind::Holographic).unwrap();
        let chi = code.chi();
        // a = 3 is t³ = σ_z/2 with ⟨0|t³|0⟩ = 1/2
        let v = code.bond_matrix_element(2, 1, true, 0, 0).unwrap();
        assert_abs_diff_eq!(v.re, chi * 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(v.re, -1.0 / 6.0, epsilon = 1e-14);
        // vanishing logical matrix element stays zero
        let z = code.bond_matrix_element(2, 3, true, 0, 1).unwrap();
        assert!(z.norm() < 1e-14);
        // side − uses the previous link
        let vm = code.bond_matrix_element(2, 2, false, 0, 0).unwrap();
        assert_abs_diff_eq!(vm.re, v.re, epsilon = 1e-14);
    }

    #[test]
    fn bond_element_log_slope_matches_the_transfer_ratio() {
        // log|⟨ψ_0|t³_{n+}|ψ_0⟩| falls linearly in n with slope log|χ|,
        // and the sign alternates because χ < 0
        let code = build_code(2, 14, BoundaryKind::Holographic).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut last_sign = 1.0_f64;
        for n in 1..=8usize {
            let v = code.bond_matrix_element(2, n, true, 0, 0).unwrap();
            assert!(v.re.signum() * last_sign < 0.0, "sign must alternate at n={n}");
            last_sign = v.re.signum();
            xs.push(n as f64);
            ys.push(v.norm());
        }
        let fit = crate::quasi::fit_decay(&xs, &ys).unwrap();
        assert!(fit.prefers_exponential);
        let rel = (fit.parameter.ln() - 3.0_f64.ln()).abs() / 3.0_f64.ln();
        assert!(rel < 0.01, "slope base {} (rel {rel:.4})", fit.parameter);
    }

    #[test]
    fn edge_state_starts_at_the_logical_input() {
        let code = build_code(2, 6, BoundaryKind::Holographic).unwrap();
        let rep = code.edge_state(1, 1).unwrap();
        let mut want = zeros(2, 2);
        want[(1, 1)] = cr(1.0);
        assert!(max_abs(&(&rep.sigma - want)) < 1e-15);
    }

    #[test]
    fn expectation_rejects_site_collisions() {
        let code = build_code(2, 6, BoundaryKind::Holographic).unwrap();
        let op = code.su.adjoint[0].clone();
        let err = code.expectation(0, &[(2, op.clone()), (2, op)]);
        assert!(err.is_err());
    }

    #[test]
    fn edge_state_converges_to_maximally_mixed() {
        let n = 10usize;
        let code = build_code(2, n, BoundaryKind::Holographic).unwrap();
        let rep = code.edge_state(0, n + 1).unwrap();
        assert_abs_diff_eq!(trace(&rep.sigma).re, 1.0, epsilon = 1e-13);
        let dev = &rep.sigma - identity(2) * cr(0.5);
        // σ_{N+1} = 𝟙/d + 2χᴺ Σ_a tᵃ tᵃ_αα
        let chi_n = code.chi().powi(n as i32);
        let mut expect = zeros(2, 2);
        for (a, t) in code.su.t.iter().enumerate() {
            expect += t * cr(2.0 * chi_n * code.su.t[a][(0, 0)].re);
        }
        assert!(max_abs(&(&dev - expect)) < 1e-13);
        // bulk-site reduced states have unit trace
        for site in 1..=n {
            let r = code.edge_state(0, site).unwrap();
            let rho1 = r.site_reduced.unwrap();
            assert_abs_diff_eq!(trace(&rho1).re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reduced_window_is_a_state() {
        for kind in [BoundaryKind::Edge, BoundaryKind::Holographic] {
            let code = build_code(2, 8, kind).unwrap();
            let rho = code.reduced_window(0, 2, 2).unwrap();
            assert_abs_diff_eq!(trace(&rho).re, 1.0, epsilon = 1e-12);
            let (vals, _) = crate::linalg::herm_eigen(&rho);
            assert!(vals.iter().all(|&x| x > -1e-12));
        }
        let code = build_code(3, 6, BoundaryKind::Bulk).unwrap();
        let rho = code.reduced_window(0, 3, 1).unwrap();
        assert_abs_diff_eq!(trace(&rho).re, 1.0, epsilon = 1e-12);
    }
}
