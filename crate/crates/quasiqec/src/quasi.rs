//! Scaling-parameter machinery for approximate code families: metric
//! sweeps over (d, N, t, p) grids, strong/weak classification with
//! decay-type fitting, the cutoff-induced code distance, and threshold
//! reports with exact binomial success curves.

use crate::linalg::{trace_distance, zeros, CMat};
use crate::vbs::mps::{build_code, BoundaryKind, MpsCode};
use crate::vbs::recover::average_recovery_distance;
use crate::vbs::su::chi;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One grid point in scaling-parameter space.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub d: usize,
    pub n: usize,
    #[serde(default)]
    pub t: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
}

impl ScalingPoint {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 || self.n < 2 {
            return Err(Error::OutOfRange(format!(
                "point d={} N={}",
                self.d, self.n
            )));
        }
        if let Some(p) = self.p {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::OutOfRange(format!("p = {p}")));
            }
        }
        if let Some(t) = self.t {
            if t > self.n {
                return Err(Error::OutOfRange(format!("t = {t} > N")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    VbsHolographic,
    VbsEdge,
    VbsBulk,
}

impl Family {
    pub fn boundary(self) -> BoundaryKind {
        match self {
            Family::VbsHolographic => BoundaryKind::Holographic,
            Family::VbsEdge => BoundaryKind::Edge,
            Family::VbsBulk => BoundaryKind::Bulk,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "holographic" | "vbs-holographic" => Ok(Family::VbsHolographic),
            "edge" | "vbs-edge" => Ok(Family::VbsEdge),
            "bulk" | "vbs-bulk" => Ok(Family::VbsBulk),
            _ => Err(Error::Unsupported(format!("family `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    RecoveryDt,
    EncodingError,
    GramOffdiag,
    Correlation,
}

impl Metric {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "recovery_Dt" | "recovery_dt" => Ok(Metric::RecoveryDt),
            "encoding_error" => Ok(Metric::EncodingError),
            "gram_offdiag" => Ok(Metric::GramOffdiag),
            "correlation" => Ok(Metric::Correlation),
            _ => Err(Error::Unsupported(format!("metric `{s}`"))),
        }
    }
}

/// One evaluated grid point; `analytic` carries the closed-form
/// reference where one exists.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub n: usize,
    pub t: Option<usize>,
    pub p: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub analytic: Option<f64>,
    pub rel_err: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub family: Family,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// CSV with the header `d,N,t,p,quantity,value,analytic,rel_err,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,N,t,p,quantity,value,analytic,rel_err,seed\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{:e},{},{},{}\n",
                r.d,
                r.n,
                r.t.map(|t| t.to_string()).unwrap_or_default(),
                r.p.map(|p| format!("{p:e}")).unwrap_or_default(),
                r.quantity,
                r.value,
                r.analytic.map(|a| format!("{a:e}")).unwrap_or_default(),
                r.rel_err.map(|e| format!("{e:e}")).unwrap_or_default(),
                r.seed,
            ));
        }
        out
    }
}

/// Encoding inaccuracy of an MPS code from its Gram matrix,
/// (1/(2√d_L))·√(Σ_{i≠j}|⟨ψᵢ|ψⱼ⟩|²).
pub fn code_encoding_error(code: &MpsCode) -> f64 {
    let g = code.gram();
    let d_l = g.nrows();
    let mut s = 0.0;
    for i in 0..d_l {
        for j in 0..d_l {
            if i != j {
                s += g[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt() / (2.0 * (d_l as f64).sqrt())
}

fn evaluate_metric(family: Family, metric: Metric, point: &ScalingPoint) -> Result<SweepRow> {
    point.validate()?;
    let (quantity, value, analytic) = match metric {
        Metric::RecoveryDt => {
            let code = build_code(point.d, point.n, family.boundary())?;
            let t = point.t.unwrap_or(1);
            let rep = average_recovery_distance(&code, t, point.p.unwrap_or(0.3))?;
            (
                "recovery_Dt".to_string(),
                rep.exact_average,
                Some(rep.law_value),
            )
        }
        Metric::EncodingError => {
            let code = build_code(point.d, point.n, family.boundary())?;
            let value = code_encoding_error(&code);
            let analytic = match family {
                // bulk overlap ≈ (d(d−1)/2)·(d−1)^{−N}; two codewords
                Family::VbsBulk => {
                    let dd = point.d as f64;
                    let overlap = dd * (dd - 1.0) / 2.0 * (dd - 1.0).powi(-(point.n as i32));
                    Some(overlap / 2.0_f64.sqrt() * 2.0_f64.sqrt() / 2.0)
                }
                _ => None,
            };
            ("encoding_error".to_string(), value, analytic)
        }
        Metric::GramOffdiag => {
            let code = build_code(point.d, point.n, family.boundary())?;
            let g = code.gram();
            let mut worst = 0.0_f64;
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    if i != j {
                        worst = worst.max(g[(i, j)].norm());
                    }
                }
            }
            let analytic = match family {
                Family::VbsBulk => {
                    let dd = point.d as f64;
                    Some(dd * (dd - 1.0) / 2.0 * (dd - 1.0).powi(-(point.n as i32)))
                }
                _ => Some(0.0),
            };
            ("gram_offdiag".to_string(), worst, analytic)
        }
        Metric::Correlation => {
            let r = point.t.unwrap_or(1).max(1);
            if r + 2 > point.n {
                return Err(Error::OutOfRange("separation exceeds chain".into()));
            }
            let su = crate::vbs::su::su_basis(point.d)?;
            let op = su.adjoint[0].clone();
            let value =
                crate::vbs::mps::ring_expectation(point.d, point.n, &[(1, op.clone()), (1 + r, op)])?
                    .re;
            let dd = point.d as f64;
            let big_d = dd * dd - 1.0;
            let analytic = dd.powi(3) / (2.0 * big_d) * chi(point.d).powi(r as i32);
            ("correlation".to_string(), value, Some(analytic))
        }
    };
    let rel_err = analytic.and_then(|a| (a.abs() > 0.0).then(|| (value - a).abs() / a.abs()));
    Ok(SweepRow {
        d: point.d,
        n: point.n,
        t: point.t,
        p: point.p,
        quantity,
        value,
        analytic,
        rel_err,
        seed: 0,
    })
}

/// Evaluates `metric` at every grid point (in parallel, deterministic
/// output order).
pub fn sweep(family: Family, grid: &[ScalingPoint], metric: Metric) -> Result<SweepReport> {
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|pt| evaluate_metric(family, metric, pt))
        .collect::<Result<_>>()?;
    Ok(SweepReport {
        schema: 1,
        family,
        rows,
    })
}

// ---------------------------------------------------------------------
// decay fitting and classification
// ---------------------------------------------------------------------

/// The four asymptotic decay types: exponential or power law, in the
/// error location n or in the system size N. Location dependence makes
/// a family weak, size dependence makes it strong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayType {
    ExpInN,
    ExpInSystem,
    PowerInN,
    PowerInSystem,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    /// x for exponential models y ∝ x^{−v}, α for power laws y ∝ v^{−α}.
    pub parameter: f64,
    pub exp_residual: f64,
    pub power_residual: f64,
    pub prefers_exponential: bool,
    /// Residual sums within 5% of each other.
    pub ambiguous: bool,
}

/// Least-squares fit of log y against x (exponential model) and log x
/// (power model), picking the smaller residual.
pub fn fit_decay(xs: &[f64], ys: &[f64]) -> Result<DecayFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Malformed("need at least three samples".into()));
    }
    if ys.iter().any(|&y| y <= 0.0) || xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::Malformed("decay samples must be positive".into()));
    }
    let logy: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let linfit = |xv: &[f64]| -> (f64, f64) {
        let m = xv.len() as f64;
        let sx: f64 = xv.iter().sum();
        let sy: f64 = logy.iter().sum();
        let sxx: f64 = xv.iter().map(|x| x * x).sum();
        let sxy: f64 = xv.iter().zip(&logy).map(|(x, y)| x * y).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        let intercept = (sy - slope * sx) / m;
        let sse: f64 = xv
            .iter()
            .zip(&logy)
            .map(|(x, y)| (y - slope * x - intercept).powi(2))
            .sum();
        (slope, sse)
    };
    let (slope_exp, sse_exp) = linfit(xs);
    let logx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let (slope_pow, sse_pow) = linfit(&logx);
    let prefers_exponential = sse_exp <= sse_pow;
    let worst = sse_exp.max(sse_pow).max(1e-300);
    let ambiguous = (sse_exp - sse_pow).abs() <= 0.05 * worst;
    Ok(DecayFit {
        parameter: if prefers_exponential {
            (-slope_exp).exp()
        } else {
            -slope_pow
        },
        exp_residual: sse_exp,
        power_residual: sse_pow,
        prefers_exponential,
        ambiguous,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationRow {
    pub n_sites: usize,
    pub window: usize,
    /// Worst-case codeword-pair distance over window locations.
    pub strong_metric: f64,
    /// Distance between location-averaged window states.
    pub weak_metric: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub family: Family,
    pub rows: Vec<ClassificationRow>,
    /// Per-location codeword distance at the largest N.
    pub location_profile: Vec<(usize, f64)>,
    /// Fit of the location profile (weak families).
    pub location_fit: Option<DecayFit>,
    /// Fit of the strong metric against N (strong families).
    pub size_fit: Option<DecayFit>,
    pub weak: bool,
    pub decay: DecayType,
}

/// Worst-case and location-averaged distances between codeword reduced
/// states over all length-`window` segments, plus the per-location
/// profile.
pub fn window_metrics(code: &MpsCode, window: usize) -> Result<(f64, f64, Vec<f64>)> {
    let m = code.num_codewords();
    let positions = code.n_sites - window + 1;
    let mut strong: f64 = 0.0;
    let mut profile = vec![0.0_f64; positions];
    let dim = code.su.dim_adjoint.pow(window as u32);
    let mut averages = vec![zeros(dim, dim); m];
    for pos in 0..positions {
        let states: Vec<CMat> = (0..m)
            .map(|label| code.reduced_window(label, pos + 1, window))
            .collect::<Result<_>>()?;
        for (label, s) in states.iter().enumerate() {
            averages[label] += s;
        }
        let mut worst_here: f64 = 0.0;
        for a in 0..m {
            for b in 0..a {
                worst_here = worst_here.max(trace_distance(&states[a], &states[b]));
            }
        }
        profile[pos] = worst_here;
        strong = strong.max(worst_here);
    }
    let mut weak: f64 = 0.0;
    let scale = crate::linalg::cr(1.0 / positions as f64);
    for a in 0..m {
        for b in 0..a {
            weak = weak.max(trace_distance(
                &(&averages[a] * scale),
                &(&averages[b] * scale),
            ));
        }
    }
    Ok((strong, weak, profile))
}

/// Classifies a family as weak or strong with its decay type, from
/// reduced-window distances across the size grid.
pub fn classify(family: Family, n_grid: &[usize], window: usize) -> Result<ClassificationReport> {
    if n_grid.len() < 3 {
        return Err(Error::Malformed("need at least three sizes".into()));
    }
    let d = match family {
        Family::VbsBulk => 3,
        _ => 2,
    };
    if n_grid.iter().any(|&n| window > n / 2) {
        return Err(Error::OutOfRange(
            "window larger than half the chain".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut last_profile = Vec::new();
    for &n in n_grid {
        let code = build_code(d, n, family.boundary())?;
        let (strong, weak, profile) = window_metrics(&code, window)?;
        rows.push(ClassificationRow {
            n_sites: n,
            window,
            strong_metric: strong,
            weak_metric: weak,
        });
        last_profile = profile;
    }
    let first = rows.first().expect("nonempty grid");
    let last = rows.last().expect("nonempty grid");
    let strong_decays = last.strong_metric < 0.5 * first.strong_metric;
    let location_profile: Vec<(usize, f64)> = last_profile
        .iter()
        .enumerate()
        .map(|(k, &v)| (k + 1, v))
        .collect();
    let (weak, decay, location_fit, size_fit) = if strong_decays {
        let xs: Vec<f64> = rows.iter().map(|r| r.n_sites as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.strong_metric.max(1e-300)).collect();
        let fit = fit_decay(&xs, &ys)?;
        let decay = if fit.prefers_exponential {
            DecayType::ExpInSystem
        } else {
            DecayType::PowerInSystem
        };
        (false, decay, None, Some(fit))
    } else {
        // fit the location profile, dropping the two positions next to
        // the far boundary where its own correction interferes
        let keep = location_profile.len().saturating_sub(2).max(3);
        let usable = &location_profile[..keep.min(location_profile.len())];
        let xs: Vec<f64> = usable.iter().map(|&(k, _)| k as f64).collect();
        let ys: Vec<f64> = usable.iter().map(|&(_, v)| v.max(1e-300)).collect();
        let fit = fit_decay(&xs, &ys)?;
        let decay = if fit.prefers_exponential {
            DecayType::ExpInN
        } else {
            DecayType::PowerInN
        };
        (true, decay, Some(fit), None)
    };
    Ok(ClassificationReport {
        family,
        rows,
        location_profile,
        location_fit,
        size_fit,
        weak,
        decay,
    })
}

// ---------------------------------------------------------------------
// quasi code distance
// ---------------------------------------------------------------------

/// A logical-error curve ε_l(t), nondecreasing in the weight t.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceCurve {
    pub weights: Vec<usize>,
    pub eps: Vec<f64>,
}

impl DistanceCurve {
    /// The closed-form VBS law ε_l(t) = t²/(2D(N−t)).
    pub fn from_vbs_law(d: usize, n: usize, t_max: usize) -> Self {
        let big_d = (d * d - 1) as f64;
        let weights: Vec<usize> = (0..=t_max.min(n - 1)).collect();
        let eps = weights
            .iter()
            .map(|&t| (t * t) as f64 / (2.0 * big_d * (n - t) as f64))
            .collect();
        DistanceCurve { weights, eps }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiDistanceReport {
    /// Largest weight with ε_l(t) ≤ cutoff.
    pub t_hat: usize,
    /// d_c = 2·t̂ + 1.
    pub d_c: usize,
    /// The cutoff exceeded the whole curve; d_c is the 2·t_max+1 cap.
    pub capped: bool,
    /// The input was not monotone and was repaired by a running max.
    pub monotone_violation: bool,
}

/// The cutoff-induced code distance d_c = 2t̂+1 with t̂ the largest
/// weight whose logical error stays below the cutoff.
pub fn quasi_distance(curve: &DistanceCurve, cutoff: f64) -> Result<QuasiDistanceReport> {
    if curve.weights.is_empty() || curve.weights.len() != curve.eps.len() {
        return Err(Error::Malformed("empty or ragged curve".into()));
    }
    let mut eps = curve.eps.clone();
    let mut monotone_violation = false;
    for k in 1..eps.len() {
        if eps[k] < eps[k - 1] - 1e-12 {
            monotone_violation = true;
        }
        eps[k] = eps[k].max(eps[k - 1]);
    }
    if cutoff < eps[0] {
        return Err(Error::OutOfRange(format!(
            "cutoff {cutoff:e} below the weight-{} error {:e}",
            curve.weights[0], eps[0]
        )));
    }
    let mut t_hat = curve.weights[0];
    let mut capped = true;
    for (k, &t) in curve.weights.iter().enumerate() {
        if eps[k] <= cutoff {
            t_hat = t;
        } else {
            capped = false;
            break;
        }
    }
    Ok(QuasiDistanceReport {
        t_hat,
        d_c: 2 * t_hat + 1,
        capped,
        monotone_violation,
    })
}

// ---------------------------------------------------------------------
// thresholds
// ---------------------------------------------------------------------

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// P[X ≤ t] for X ~ Binomial(n, p), summed in log space.
pub fn binomial_success(n: usize, t: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if t >= n { 1.0 } else { 0.0 };
    }
    let ln_n = ln_factorial(n);
    let terms: Vec<f64> = (0..=t.min(n))
        .map(|x| {
            ln_n - ln_factorial(x) - ln_factorial(n - x)
                + x as f64 * p.ln()
                + (n - x) as f64 * (1.0 - p).ln()
        })
        .collect();
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    terms.iter().map(|&l| (l - m).exp()).sum::<f64>() * m.exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub p: f64,
    /// Exact binomial success probability p(t).
    pub success: f64,
    pub mc_estimate: Option<f64>,
    pub mc_std_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub schema: u32,
    pub n_sites: usize,
    pub d: usize,
    pub weight: usize,
    /// ε*_p = t/N.
    pub eps_p_star: f64,
    /// ε*_l = t²/(2D(N−t)).
    pub eps_l_star: f64,
    pub rows: Vec<ThresholdRow>,
    pub mc_samples: Option<u64>,
    pub seed: Option<u64>,
}

/// Exact success curve with the quasithreshold pair, optionally
/// validated by Monte Carlo sampling of error configurations.
pub fn threshold_report(
    n: usize,
    d: usize,
    t: usize,
    p_grid: &[f64],
    mc: Option<(u64, u64)>,
) -> Result<ThresholdReport> {
    if t >= n {
        return Err(Error::OutOfRange(format!("t = {t} must be below N = {n}")));
    }
    let big_d = (d * d - 1) as f64;
    let rows: Vec<ThresholdRow> = p_grid
        .iter()
        .map(|&p| {
            let success = binomial_success(n, t, p);
            let (mc_estimate, mc_std_error) = match mc {
                None => (None, None),
                Some((samples, seed)) => {
                    let hits: u64 = (0..samples)
                        .into_par_iter()
                        .map(|idx| {
                            let mut rng = ChaCha12Rng::seed_from_u64(
                                seed ^ idx.wrapping_mul(0x2545_f491_4f6c_dd1d)
                                    ^ p.to_bits().rotate_left(17),
                            );
                            let mut count = 0usize;
                            for _ in 0..n {
                                if rng.gen::<f64>() < p {
                                    count += 1;
                                }
                            }
                            u64::from(count <= t)
                        })
                        .sum();
                    let est = hits as f64 / samples as f64;
                    (
                        Some(est),
                        Some((est * (1.0 - est) / samples as f64).sqrt()),
                    )
                }
            };
            ThresholdRow {
                p,
                success,
                mc_estimate,
                mc_std_error,
            }
        })
        .collect();
    Ok(ThresholdReport {
        schema: 1,
        n_sites: n,
        d,
        weight: t,
        eps_p_star: t as f64 / n as f64,
        eps_l_star: (t * t) as f64 / (2.0 * big_d * (n - t) as f64),
        rows,
        mc_samples: mc.map(|(s, _)| s),
        seed: mc.map(|(_, s)| s),
    })
}
