//! Local error models on VBS codes and their recovery.
//!
//! A weight-t error configuration is a product of depolarizing
//! instruments on t virtual links. The fixed recovery that corrects the
//! idealized uncorrelated limit is applied branchwise through window
//! matrices computed by matrix-product contraction, and the recovered
//! logical channel is compared against the closed-form decay laws. The
//! window tables also feed the generic analysis of [`crate::qec`] for
//! cross-checks.

use super::mps::{BoundaryKind, MpsCode};
use crate::channels::{choi_of, omega, KrausMap};
use crate::linalg::{cr, identity, trace, trace_distance, zeros, CMat};
use crate::{Error, Result};
use rayon::prelude::*;

/// One local error insertion, parsed from the compact CLI syntax.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorKind {
    /// Gell-Mann generator `a` acting on the virtual link `n±`.
    Bond { a: usize, link: usize, plus: bool },
    /// Adjoint generator Tᵃ acting on a physical site.
    Site { a: usize, site: usize },
    /// The parity sign operator on a physical site.
    Parity { site: usize },
    /// On-site symmetry unitary exp(i Σ_a v_a tᵃ) acting by conjugation
    /// on the adjacent bonds.
    Unitary { site: usize, coeffs: Vec<f64> },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorSpec {
    pub items: Vec<ErrorKind>,
}

impl ErrorSpec {
    pub fn bond_weight(links: &[usize]) -> Self {
        ErrorSpec {
            items: links
                .iter()
                .map(|&n| ErrorKind::Bond {
                    a: 0,
                    link: n,
                    plus: true,
                })
                .collect(),
        }
    }

    /// Parses one compact item, e.g. `bond:a=3,n=5,+` or `site:a=1,n=2`
    /// or `parity:n=4` or `unitary:n=2,v=0.1;0.2;0.3`.
    pub fn parse_item(s: &str) -> Result<ErrorKind> {
        let bad = || Error::Malformed(format!("error spec item `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let mut a = None;
        let mut n = None;
        let mut plus = true;
        let mut v = Vec::new();
        for field in rest.split(',') {
            match field.trim() {
                "+" => plus = true,
                "-" => plus = false,
                f => {
                    let (key, val) = f.split_once('=').ok_or_else(bad)?;
                    match key.trim() {
                        "a" => a = Some(val.trim().parse::<usize>().map_err(|_| bad())?),
                        "n" => n = Some(val.trim().parse::<usize>().map_err(|_| bad())?),
                        "v" => {
                            for piece in val.split(';') {
                                v.push(piece.trim().parse::<f64>().map_err(|_| bad())?);
                            }
                        }
                        _ => return Err(bad()),
                    }
                }
            }
        }
        match kind.trim() {
            "bond" => Ok(ErrorKind::Bond {
                a: a.ok_or_else(bad)?.checked_sub(1).ok_or_else(bad)?,
                link: n.ok_or_else(bad)?,
                plus,
            }),
            "site" => Ok(ErrorKind::Site {
                a: a.ok_or_else(bad)?.checked_sub(1).ok_or_else(bad)?,
                site: n.ok_or_else(bad)?,
            }),
            "parity" => Ok(ErrorKind::Parity {
                site: n.ok_or_else(bad)?,
            }),
            "unitary" => Ok(ErrorKind::Unitary {
                site: n.ok_or_else(bad)?,
                coeffs: v,
            }),
            _ => Err(bad()),
        }
    }

    pub fn parse(items: &[String]) -> Result<Self> {
        Ok(ErrorSpec {
            items: items
                .iter()
                .map(|s| Self::parse_item(s))
                .collect::<Result<_>>()?,
        })
    }

    /// The distinct links touched by bond-type items, for recovery.
    pub fn bond_links(&self) -> Result<Vec<usize>> {
        let mut links = Vec::new();
        for item in &self.items {
            match item {
                ErrorKind::Bond { link, plus, .. } => {
                    let bond = if *plus {
                        *link
                    } else {
                        link.checked_sub(1)
                            .ok_or_else(|| Error::OutOfRange("link 0 has no − side".into()))?
                    };
                    if !links.contains(&bond) {
                        links.push(bond);
                    }
                }
                _ => {
                    return Err(Error::Unsupported(
                        "recovery handles bond-type errors; site errors are \
                         diagnosed through matrix elements"
                            .into(),
                    ))
                }
            }
        }
        links.sort_unstable();
        Ok(links)
    }
}

/// The error instrument on one link: amplitude-weighted bond operators
/// plus the code-matrix weights d_b of the ideal (uncorrelated) limit,
/// which normalize the fixed recovery.
#[derive(Debug, Clone)]
pub struct LinkNoise {
    pub bond: usize,
    pub kraus: Vec<CMat>,
    pub weights: Vec<f64>,
}

/// Depolarizing link instrument {√(1−p)·𝟙, √(2dp/D)·tᵃ} with weights
/// d₀ = 1−p, d_a = p/D.
pub fn depolarizing_link(code: &MpsCode, bond: usize, p: f64) -> LinkNoise {
    let d = code.d;
    let dim = code.su.dim_adjoint;
    let mut kraus = vec![identity(d) * cr((1.0 - p).sqrt())];
    let mut weights = vec![1.0 - p];
    let w = (2.0 * d as f64 * p / dim as f64).sqrt();
    for t in &code.su.t {
        kraus.push(t * cr(w));
        weights.push(p / dim as f64);
    }
    LinkNoise {
        bond,
        kraus,
        weights,
    }
}

/// Remixes a link instrument inside its Kraus span with an isometric
/// coefficient matrix, deterministic in `seed`. Trace preservation on
/// the bond space is retained exactly. The weights are not meaningful
/// for a remixed set; recovery keeps using the base instrument.
pub fn remixed_link(base: &LinkNoise, seed: u64) -> LinkNoise {
    use rand::{Rng, SeedableRng};
    let k = base.kraus.len();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let rows = k + rng.gen_range(0..2usize);
    let g = crate::channels::random_gaussian(rows, k, &mut rng);
    let q = g.qr().q();
    let kraus: Vec<CMat> = (0..rows)
        .map(|j| {
            let mut acc = zeros(base.kraus[0].nrows(), base.kraus[0].ncols());
            for (i, e) in base.kraus.iter().enumerate() {
                acc += e * q[(j, i)];
            }
            acc
        })
        .collect();
    let weights = vec![1.0 / rows as f64; rows];
    LinkNoise {
        bond: base.bond,
        kraus,
        weights,
    }
}

fn mixed_radix_decode(mut idx: usize, counts: &[usize]) -> Vec<usize> {
    let mut out = vec![0; counts.len()];
    for slot in (0..counts.len()).rev() {
        out[slot] = idx % counts[slot];
        idx /= counts[slot];
    }
    out
}

/// Window matrices between two branch sets on the same links:
/// W_ββ' = logical(Π_links (rec-op_β)†(noise-op_β') inserted at its bond).
pub fn link_noise_windows2(
    code: &MpsCode,
    rec: &[LinkNoise],
    noise: &[LinkNoise],
) -> Result<Vec<Vec<CMat>>> {
    if rec.len() != noise.len() || rec.iter().zip(noise).any(|(a, b)| a.bond != b.bond) {
        return Err(Error::DimensionMismatch(
            "recovery and noise must cover the same links".into(),
        ));
    }
    let rec_counts: Vec<usize> = rec.iter().map(|l| l.kraus.len()).collect();
    let noise_counts: Vec<usize> = noise.iter().map(|l| l.kraus.len()).collect();
    let rec_total: usize = rec_counts.iter().product();
    let noise_total: usize = noise_counts.iter().product();
    let d_l = code.num_codewords();
    let mut windows = vec![vec![zeros(d_l, d_l); noise_total]; rec_total];
    for b in 0..rec_total {
        let ib = mixed_radix_decode(b, &rec_counts);
        for b2 in 0..noise_total {
            let ib2 = mixed_radix_decode(b2, &noise_counts);
            let bonds: Vec<(usize, CMat)> = rec
                .iter()
                .enumerate()
                .map(|(s, l)| (l.bond, l.kraus[ib[s]].adjoint() * &noise[s].kraus[ib2[s]]))
                .collect();
            windows[b][b2] = code.logical_matrix_bonds_fast(&bonds)?;
        }
    }
    Ok(windows)
}

pub fn link_noise_windows(code: &MpsCode, links: &[LinkNoise]) -> Result<Vec<Vec<CMat>>> {
    link_noise_windows2(code, links, links)
}

/// Product weights d_β of a branch tuple.
fn tuple_weights(links: &[LinkNoise]) -> Vec<f64> {
    let counts: Vec<usize> = links.iter().map(|l| l.kraus.len()).collect();
    let total: usize = counts.iter().product();
    (0..total)
        .map(|b| {
            mixed_radix_decode(b, &counts)
                .iter()
                .enumerate()
                .map(|(s, &i)| links[s].weights[i])
                .product()
        })
        .collect()
}

/// Logical Kraus operators M_ββ' = W_ββ'/√d_β of the fixed recovery
/// R_β = P E_β†/√d_β composed with the noise branches.
pub fn fixed_roundtrip_kraus(
    code: &MpsCode,
    rec: &[LinkNoise],
    noise: &[LinkNoise],
) -> Result<Vec<CMat>> {
    let windows = link_noise_windows2(code, rec, noise)?;
    let dk = tuple_weights(rec);
    let mut out = Vec::with_capacity(windows.len() * windows[0].len());
    for (b, row) in windows.iter().enumerate() {
        if dk[b] <= 0.0 {
            continue;
        }
        let scale = cr(1.0 / dk[b].sqrt());
        for w in row {
            out.push(w * scale);
        }
    }
    Ok(out)
}

/// Outcome of one recovery round on a logical input.
#[derive(Debug, Clone)]
pub struct RecoveredState {
    /// The recovered (unnormalized) logical operator σ̂_f.
    pub sigma_f: CMat,
    /// tr σ̂_f; deviates from 1 because the round is only
    /// approximately trace preserving.
    pub trace: f64,
    /// Choi trace distance of the recovered logical channel to the
    /// identity.
    pub d_t: f64,
    /// Closed-form value from the residual sum, equal to `d_t` up to
    /// truncation effects.
    pub d_t_analytic: f64,
}

/// Applies the fixed recovery for the composite link noise and returns
/// the recovered logical state.
pub fn recover_logical(code: &MpsCode, links: &[LinkNoise], sigma: &CMat) -> Result<RecoveredState> {
    let d_l = code.num_codewords();
    if sigma.nrows() != d_l || sigma.ncols() != d_l {
        return Err(Error::DimensionMismatch("logical input".into()));
    }
    for l in links {
        if l.bond == 0 || l.bond > code.n_sites {
            return Err(Error::OutOfRange(format!("link {}", l.bond)));
        }
    }
    let kraus = fixed_roundtrip_kraus(code, links, links)?;
    let mut sigma_f = zeros(d_l, d_l);
    for m in &kraus {
        sigma_f += m * sigma * m.adjoint();
    }
    // the closed-form distance from the normalized residuals
    let windows = link_noise_windows(code, links)?;
    let dk = tuple_weights(links);
    let mut analytic = 0.0;
    let eye = identity(d_l);
    for (b, row) in windows.iter().enumerate() {
        for (b2, w) in row.iter().enumerate() {
            let bhat = w * cr(1.0 / (dk[b] * dk[b2]).sqrt())
                - &eye * cr(if b == b2 { 1.0 } else { 0.0 });
            analytic += dk[b] * trace(&(bhat.adjoint() * &bhat)).re;
        }
    }
    analytic /= 2.0 * d_l as f64;
    let logical = KrausMap::new(kraus)?;
    let d_t = trace_distance(&choi_of(&logical).matrix, &omega(d_l));
    Ok(RecoveredState {
        trace: trace(&sigma_f).re,
        sigma_f,
        d_t,
        d_t_analytic: analytic,
    })
}

/// Recovery driven by an [`ErrorSpec`]: a depolarizing instrument is
/// placed on every link the spec touches.
pub fn recover_spec(
    code: &MpsCode,
    spec: &ErrorSpec,
    p: f64,
    sigma: &CMat,
) -> Result<RecoveredState> {
    if code.kind == BoundaryKind::Edge
        && spec
            .items
            .iter()
            .any(|i| matches!(i, ErrorKind::Parity { .. }))
    {
        return Err(Error::Unsupported("parity errors on an edge code".into()));
    }
    let links: Vec<LinkNoise> = spec
        .bond_links()?
        .into_iter()
        .map(|bond| depolarizing_link(code, bond, p))
        .collect();
    recover_logical(code, &links, sigma)
}

/// Location-averaged recovery error for weight-t depolarizing noise.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AverageRecoveryReport {
    pub d: usize,
    pub n_sites: usize,
    pub weight: usize,
    /// Choi trace distance of the location-averaged recovered channel.
    pub exact_average: f64,
    /// The closed-form decay law for this family.
    pub law_value: f64,
    pub rel_discrepancy: f64,
    pub n_configurations: usize,
}

/// The closed-form average recovery error: D/(2N(D²−1)) at weight 1,
/// t²/(2D(N−t)) for holographic and edge chains, t(t−1)/(2D(N−t)) for
/// the bulk code.
pub fn closed_form_average_distance(kind: BoundaryKind, d: usize, n: usize, t: usize) -> f64 {
    let dd = (d * d - 1) as f64;
    let nn = n as f64;
    let tt = t as f64;
    match kind {
        BoundaryKind::Bulk => tt * (tt - 1.0) / (2.0 * dd * (nn - tt)),
        _ => {
            if t == 1 {
                dd / (2.0 * nn * (dd * dd - 1.0))
            } else {
                tt * tt / (2.0 * dd * (nn - tt))
            }
        }
    }
}

fn combinations(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..t).collect();
    if t == 0 || t > n {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| i + 1).collect());
        // advance
        let mut pos = t;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] + 1 <= n - 1 - (t - 1 - pos) {
                idx[pos] += 1;
                for q in pos + 1..t {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Uniform average of the recovered logical channel over all weight-t
/// link configurations, compared with the closed-form law.
pub fn average_recovery_distance(code: &MpsCode, t: usize, p: f64) -> Result<AverageRecoveryReport> {
    if t == 0 || t >= code.n_sites {
        return Err(Error::OutOfRange(format!("weight {t}")));
    }
    let d_l = code.num_codewords();
    let configs = combinations(code.n_sites, t);
    let n_configurations = configs.len();
    let chois: Vec<CMat> = configs
        .par_iter()
        .map(|links| {
            let noise: Vec<LinkNoise> = links
                .iter()
                .map(|&bond| depolarizing_link(code, bond, p))
                .collect();
            let kraus = fixed_roundtrip_kraus(code, &noise, &noise)?;
            Ok(choi_of(&KrausMap::new(kraus)?).matrix)
        })
        .collect::<Result<_>>()?;
    let mut avg = zeros(d_l * d_l, d_l * d_l);
    for c in &chois {
        avg += c;
    }
    avg /= cr(n_configurations as f64);
    let exact_average = trace_distance(&avg, &omega(d_l));
    let law_value = closed_form_average_distance(code.kind, code.d, code.n_sites, t);
    let rel = if law_value.abs() > 0.0 {
        (exact_average - law_value).abs() / law_value
    } else {
        exact_average.abs()
    };
    Ok(AverageRecoveryReport {
        d: code.d,
        n_sites: code.n_sites,
        weight: t,
        exact_average,
        law_value,
        rel_discrepancy: rel,
        n_configurations,
    })
}

/// Decomposes σ_f = α σ + β Σ_a tᵃ σ tᵃ for a pure logical input σ,
/// used to compare against the closed-form recovery expressions.
pub fn fit_alpha_beta(code: &MpsCode, sigma: &CMat, sigma_f: &CMat) -> (f64, f64) {
    let d = code.num_codewords() as f64;
    // T(σ) = (1/2)tr(σ)·1 − σ/(2d) for the logical Gell-Mann set
    // σ_f = ασ + β[(1/2)·1 − σ/(2d)] with tr σ = 1
    // take inner products with σ and 1
    let s2 = trace(&(sigma * sigma)).re; // = 1 for pure σ
    let f_sigma = trace(&(sigma_f * sigma)).re;
    let f_tr = trace(sigma_f).re;
    // f_sigma = α s2 + β(1/2 − s2/(2d)), f_tr = α + β(d/2 − 1/(2d))
    let a11 = s2;
    let a12 = 0.5 - s2 / (2.0 * d);
    let a21 = 1.0;
    let a22 = d / 2.0 - 1.0 / (2.0 * d);
    let det = a11 * a22 - a12 * a21;
    let alpha = (f_sigma * a22 - a12 * f_tr) / det;
    let beta = (a11 * f_tr - f_sigma * a21) / det;
    (alpha, beta)
}

impl MpsCode {
    /// Σ_a tᵃ σ tᵃ with the su(d) basis; meaningful for the families
    /// whose logical dimension equals d (holographic and edge).
    pub fn gell_mann_twirl(&self, sigma: &CMat) -> CMat {
        assert_eq!(
            sigma.nrows(),
            self.d,
            "twirl needs a d-dimensional logical operator"
        );
        let mut out = zeros(sigma.nrows(), sigma.ncols());
        for t in &self.su.t {
            out += t * sigma * t;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::vbs::mps::build_code;
    use approx::assert_abs_diff_eq;

    fn logical_zero(d: usize) -> CMat {
        let mut s = zeros(d, d);
        s[(0, 0)] = cr(1.0);
        s
    }

    #[test]
    fn weight_one_recovery_matches_closed_form() {
        let code = build_code(2, 12, BoundaryKind::Holographic).unwrap();
        let sigma = logical_zero(2);
        for n in [1usize, 3, 6] {
            for p in [0.05, 0.3, 0.7] {
                let links = vec![depolarizing_link(&code, n, p)];
                let rec = recover_logical(&code, &links, &sigma).unwrap();
                let chi2n = code.chi().powi(2 * n as i32);
                let expect = &sigma + code.gell_mann_twirl(&sigma) * cr(4.0 * chi2n);
                assert!(
                    max_abs(&(&rec.sigma_f - &expect)) < 1e-8,
                    "n={n} p={p}: dev {:.3e}",
                    max_abs(&(&rec.sigma_f - &expect))
                );
                // trace 1 + D χ^{2n}
                assert_abs_diff_eq!(rec.trace, 1.0 + 3.0 * chi2n, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn weight_two_recovery_matches_closed_form() {
        // σ̂_f = (1 + Dχ^{2r})σ̂ + 2d(χ^{2m} − χ^{2n})E(σ̂) for errors at
        // links m < n with separation r = n − m: the near-link twirl
        // enters with the weight-1 sign, the far link subtracts.
        let code = build_code(2, 12, BoundaryKind::Holographic).unwrap();
        let sigma = logical_zero(2);
        let chi = code.chi();
        for (m, n) in [(5usize, 9usize), (6, 10), (4, 10)] {
            let links = vec![
                depolarizing_link(&code, m, 0.3),
                depolarizing_link(&code, n, 0.3),
            ];
            let rec = recover_logical(&code, &links, &sigma).unwrap();
            let r = n - m;
            let alpha = 1.0 + 3.0 * chi.powi(2 * r as i32);
            let beta = 4.0 * (chi.powi(2 * m as i32) - chi.powi(2 * n as i32));
            let expect = &sigma * cr(alpha) + code.gell_mann_twirl(&sigma) * cr(beta);
            let dev = max_abs(&(&rec.sigma_f - &expect));
            assert!(dev < 1e-7, "m={m} n={n}: deviation {dev:.3e}");
        }
    }

    #[test]
    fn weight_two_recovery_is_p_independent() {
        let code = build_code(2, 10, BoundaryKind::Holographic).unwrap();
        let sigma = logical_zero(2);
        let mk = |p: f64| {
            let links = vec![
                depolarizing_link(&code, 3, p),
                depolarizing_link(&code, 7, p),
            ];
            recover_logical(&code, &links, &sigma).unwrap().sigma_f
        };
        let a = mk(0.1);
        let b = mk(0.6);
        assert!(max_abs(&(&a - &b)) < 1e-12);
    }

    #[test]
    fn spectral_recovery_removes_the_pair_term() {
        // Re-diagonalizing the code matrix of the two-link noise absorbs
        // the aligned-pair correlation: the recovered state has no
        // Dχ^{2r} amplification and the smaller twirl coefficient.
        use crate::qec::QecAnalysis;
        let code = build_code(2, 12, BoundaryKind::Holographic).unwrap();
        let sigma = logical_zero(2);
        let (m, n) = (2usize, 9usize);
        let links = vec![
            depolarizing_link(&code, m, 0.3),
            depolarizing_link(&code, n, 0.3),
        ];
        let windows = link_noise_windows(&code, &links).unwrap();
        let analysis = QecAnalysis::from_windows(windows, 2);
        let mut sigma_f = zeros(2, 2);
        for k in analysis.roundtrip_kraus() {
            sigma_f += &k * &sigma * k.adjoint();
        }
        let (alpha, beta) = fit_alpha_beta(&code, &sigma, &sigma_f);
        let chi = code.chi();
        assert_abs_diff_eq!(alpha, 1.0, epsilon = 1e-9);
        let want_beta = 4.0 * (chi.powi(2 * m as i32) - chi.powi(2 * n as i32));
        assert_abs_diff_eq!(beta, want_beta, epsilon = 1e-6);
    }
}
