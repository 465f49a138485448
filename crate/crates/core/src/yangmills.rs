//! SU(2) Yang-Mills: index symbols, field strength and equations of motion by
//! finite differences, the Smilga ansatz `A_μ^a = η_μ^a φ₀`, an exact audit of
//! the `g²` contact terms of the linearized equation, and the tensor
//! propagator.
//!
//! Color indices run over `0..3` (for `a = 1, 2, 3`), Lorentz indices over
//! `0..4` with signature `(+,−,−,−)`. Gauge fields are stored covariantly,
//! `A[a][μ] = A_μ^a`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::elliptic::k_i;
use crate::error::{Error, Result};
use crate::scalar::{propagator_momentum, FourVector, PoleSeries, WaveBackground};

/// `A_μ^a` at one point.
pub type ColorVector = [[f64; 4]; 3];
/// `F^a_{μν}` at one point.
pub type ColorTensor = [[[f64; 4]; 4]; 3];
/// `D^{ab}_{μν}`.
pub type TensorPropagator = [[[[Complex64; 4]; 4]; 3]; 3];
/// Integer coefficient tensor indexed `[a][f][ν][ρ]`.
pub type IndexTensor = [[[[i64; 4]; 4]; 3]; 3];

/// Diagonal of the Minkowski metric; it is its own inverse.
pub const METRIC: [i64; 4] = [1, -1, -1, -1];

fn metric(mu: usize, nu: usize) -> i64 {
    if mu == nu {
        METRIC[mu]
    } else {
        0
    }
}

/// The constant intertwiners `η_μ^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixedSymbols {
    eta: [[i64; 4]; 3],
}

impl Default for MixedSymbols {
    fn default() -> Self {
        Self { eta: [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]] }
    }
}

impl MixedSymbols {
    pub fn new() -> Self {
        Self::default()
    }

    /// `η_μ^a`.
    pub fn lower(&self, a: usize, mu: usize) -> i64 {
        self.eta[a][mu]
    }

    /// `η^{aμ}`.
    pub fn upper(&self, a: usize, mu: usize) -> i64 {
        METRIC[mu] * self.eta[a][mu]
    }

    /// `η_μ^a η^{bμ}`.
    pub fn contract(&self, a: usize, b: usize) -> i64 {
        (0..4).map(|mu| self.lower(a, mu) * self.upper(b, mu)).sum()
    }
}

/// Levi-Civita symbol on three colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Epsilon3;

impl Epsilon3 {
    pub fn get(&self, a: usize, b: usize, c: usize) -> i64 {
        if a == b || b == c || a == c {
            return 0;
        }
        // sign of the permutation (a, b, c) of (0, 1, 2)
        let inversions = (a > b) as i64 + (a > c) as i64 + (b > c) as i64;
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `ε^{abc} ε^{abd}` summed over `a, b`.
    pub fn casimir(&self, c: usize, d: usize) -> i64 {
        let mut s = 0;
        for a in 0..3 {
            for b in 0..3 {
                s += self.get(a, b, c) * self.get(a, b, d);
            }
        }
        s
    }
}

/// Exhaustive checks of the symbol algebra.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolAlgebra {
    /// `ε^{abc} ε^{abd} = 2 δ^{cd}` for every `c, d`.
    pub casimir_two: bool,
    /// `η_μ^a η^{bμ} = −δ^{ab}` for every `a, b`.
    pub eta_orthonormal: bool,
    /// `η_0^a = 0`.
    pub eta_no_time_row: bool,
    /// `ε` totally antisymmetric with `ε^{123} = 1`.
    pub epsilon_antisymmetric: bool,
}

impl SymbolAlgebra {
    pub fn holds(&self) -> bool {
        self.casimir_two && self.eta_orthonormal && self.eta_no_time_row && self.epsilon_antisymmetric
    }
}

pub fn symbol_algebra() -> SymbolAlgebra {
    let e = Epsilon3;
    let eta = MixedSymbols::new();
    let delta = |a: usize, b: usize| (a == b) as i64;
    let casimir_two = (0..3).all(|c| (0..3).all(|d| e.casimir(c, d) == 2 * delta(c, d)));
    let eta_orthonormal = (0..3).all(|a| (0..3).all(|b| eta.contract(a, b) == -delta(a, b)));
    let eta_no_time_row = (0..3).all(|a| eta.lower(a, 0) == 0);
    let mut epsilon_antisymmetric = e.get(0, 1, 2) == 1;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let v = e.get(a, b, c);
                epsilon_antisymmetric &= v == -e.get(b, a, c) && v == -e.get(a, c, b) && v == -e.get(c, b, a);
            }
        }
    }
    SymbolAlgebra { casimir_two, eta_orthonormal, eta_no_time_row, epsilon_antisymmetric }
}

/// Gauge field `x ↦ A_μ^a(x)` with coupling `g`.
#[derive(Clone)]
pub struct ColorGaugeField {
    field: Arc<dyn Fn(&FourVector) -> ColorVector + Send + Sync>,
    g: f64,
}

impl fmt::Debug for ColorGaugeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ColorGaugeField").field("g", &self.g).finish_non_exhaustive()
    }
}

impl ColorGaugeField {
    pub fn new<F>(g: f64, field: F) -> Self
    where
        F: Fn(&FourVector) -> ColorVector + Send + Sync + 'static,
    {
        Self { field: Arc::new(field), g }
    }

    pub fn zero(g: f64) -> Self {
        Self::new(g, |_| [[0.0; 4]; 3])
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn at(&self, x: &FourVector) -> ColorVector {
        (self.field)(x)
    }
}

/// No external current.
pub fn no_current(_: &FourVector) -> ColorVector {
    [[0.0; 4]; 3]
}

fn shifted(x: &FourVector, mu: usize, h: f64) -> FourVector {
    let mut a = x.to_array();
    a[mu] += h;
    FourVector::from_array(a)
}

fn field_strength_from(a: &ColorVector, da: &[ColorVector; 4], g: f64) -> ColorTensor {
    let e = Epsilon3;
    let mut f = [[[0.0; 4]; 4]; 3];
    for c in 0..3 {
        for mu in 0..4 {
            for nu in 0..4 {
                let mut v = da[mu][c][nu] - da[nu][c][mu];
                for b in 0..3 {
                    for d in 0..3 {
                        let s = e.get(c, b, d);
                        if s != 0 {
                            v += g * s as f64 * a[b][mu] * a[d][nu];
                        }
                    }
                }
                f[c][mu][nu] = v;
            }
        }
    }
    f
}

/// `F^a_{μν} = ∂_μA_ν^a − ∂_νA_μ^a + g ε^{abc} A_μ^b A_ν^c` with centred
/// differences of step `h`.
pub fn field_strength(field: &ColorGaugeField, x: &FourVector, h: f64) -> ColorTensor {
    let mut da = [[[0.0; 4]; 3]; 4];
    for (mu, d) in da.iter_mut().enumerate() {
        let plus = field.at(&shifted(x, mu, h));
        let minus = field.at(&shifted(x, mu, -h));
        for c in 0..3 {
            for nu in 0..4 {
                d[c][nu] = (plus[c][nu] - minus[c][nu]) / (2.0 * h);
            }
        }
    }
    field_strength_from(&field.at(x), &da, field.g)
}

/// `∂^μ F^a_{μν} + g ε^{abc} A^{bμ} F^c_{μν} − j^a_ν`.
pub fn ym_residual<J>(field: &ColorGaugeField, j: &J, x: &FourVector, h: f64) -> ColorVector
where
    J: Fn(&FourVector) -> ColorVector,
{
    let e = Epsilon3;
    let g = field.g;
    let a = field.at(x);
    let f = field_strength(field, x, h);
    let mut r = [[0.0; 4]; 3];
    for mu in 0..4 {
        let fp = field_strength(field, &shifted(x, mu, h), h);
        let fm = field_strength(field, &shifted(x, mu, -h), h);
        for c in 0..3 {
            for nu in 0..4 {
                r[c][nu] += METRIC[mu] as f64 * (fp[c][mu][nu] - fm[c][mu][nu]) / (2.0 * h);
            }
        }
    }
    for c in 0..3 {
        for b in 0..3 {
            for d in 0..3 {
                let s = e.get(c, b, d);
                if s == 0 {
                    continue;
                }
                for mu in 0..4 {
                    let a_up = METRIC[mu] as f64 * a[b][mu];
                    for nu in 0..4 {
                        r[c][nu] += g * s as f64 * a_up * f[d][mu][nu];
                    }
                }
            }
        }
    }
    let jx = j(x);
    for c in 0..3 {
        for nu in 0..4 {
            r[c][nu] -= jx[c][nu];
        }
    }
    r
}

/// One Richardson level on [`ym_residual`]: `(4R(h/2) − R(h)) / 3`.
pub fn ym_residual_richardson<J>(field: &ColorGaugeField, j: &J, x: &FourVector, h: f64) -> ColorVector
where
    J: Fn(&FourVector) -> ColorVector,
{
    let coarse = ym_residual(field, j, x, h);
    let fine = ym_residual(field, j, x, 0.5 * h);
    let mut r = [[0.0; 4]; 3];
    for c in 0..3 {
        for nu in 0..4 {
            r[c][nu] = (4.0 * fine[c][nu] - coarse[c][nu]) / 3.0;
        }
    }
    r
}

pub fn max_abs_color(v: &ColorVector) -> f64 {
    v.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `∂^μ A_μ^a` by centred differences.
pub fn lorenz_divergence(field: &ColorGaugeField, x: &FourVector, h: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for mu in 0..4 {
        let plus = field.at(&shifted(x, mu, h));
        let minus = field.at(&shifted(x, mu, -h));
        for (a, o) in out.iter_mut().enumerate() {
            *o += METRIC[mu] as f64 * (plus[a][mu] - minus[a][mu]) / (2.0 * h);
        }
    }
    out
}

/// Default derivative step `10⁻⁴ · 2K(i)/m`.
pub fn default_step(bg: &WaveBackground) -> f64 {
    1e-4 * 2.0 * k_i() / bg.mass()
}

/// `A_μ^a = η_μ^a φ₀`, requiring the background coupling to be `λ = 2g²`.
pub fn smilga_ansatz(bg: &WaveBackground, g: f64) -> Result<ColorGaugeField> {
    let target = 2.0 * g * g;
    if (bg.lambda() - target).abs() > 1e-12 * target.max(1.0) {
        return Err(Error::Consistency(format!(
            "ansatz needs lambda = 2 g^2 = {target}, background has {}",
            bg.lambda()
        )));
    }
    Ok(smilga_ansatz_unchecked(bg, g))
}

/// Same field for any background, e.g. to exhibit the coupling mismatch.
pub fn smilga_ansatz_unchecked(bg: &WaveBackground, g: f64) -> ColorGaugeField {
    let bg = *bg;
    let eta = MixedSymbols::new();
    ColorGaugeField::new(g, move |x| {
        let phi = bg.phi0(x);
        let mut a = [[0.0; 4]; 3];
        for (c, row) in a.iter_mut().enumerate() {
            for (mu, v) in row.iter_mut().enumerate() {
                *v = eta.lower(c, mu) as f64 * phi;
            }
        }
        a
    })
}

/// Closed form of `F` on the ansatz:
/// `(p_μ η_ν^a − p_ν η_μ^a) φ₀' + g ε^{abc} η_μ^b η_ν^c φ₀²`.
pub fn smilga_field_strength_exact(bg: &WaveBackground, g: f64, x: &FourVector) -> ColorTensor {
    let eta = MixedSymbols::new();
    let e = Epsilon3;
    let p = bg.momentum().lower();
    let phi = bg.phi0(x);
    let dphi = bg.phi_h(x);
    let mut f = [[[0.0; 4]; 4]; 3];
    for a in 0..3 {
        for mu in 0..4 {
            for nu in 0..4 {
                let mut v = (p[mu] * eta.lower(a, nu) as f64 - p[nu] * eta.lower(a, mu) as f64) * dphi;
                for b in 0..3 {
                    for c in 0..3 {
                        v += g * (e.get(a, b, c) * eta.lower(b, mu) * eta.lower(c, nu)) as f64 * phi * phi;
                    }
                }
                f[a][mu][nu] = v;
            }
        }
    }
    f
}

/// How the first-order kernel `C^{bf}_{μρ}` is written in terms of the scalar `C₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSubstitution {
    /// `C^{bf}_{μρ} = δ^{bf} η_{μρ} C₁` with `η_{μρ}` the Minkowski metric.
    Metric,
    /// `C^{bf}_{μρ} = η_μ^b η_ρ^f C₁`, the structure of the ansatz itself.
    Aligned,
}

impl KernelSubstitution {
    fn structure(self, b: usize, f: usize, mu: usize, rho: usize) -> i64 {
        let eta = MixedSymbols::new();
        match self {
            KernelSubstitution::Metric => (b == f) as i64 * metric(mu, rho),
            KernelSubstitution::Aligned => eta.lower(b, mu) * eta.lower(f, rho),
        }
    }
}

/// Basis tensors, indexed `[a][f][ν][ρ]`, used to decompose the contact terms.
pub const BASIS_LABELS: [&str; 4] = [
    "delta_af metric_nu_rho",
    "delta_af u_nu u_rho",
    "eta_nu^a eta_rho^f",
    "eta_rho^a eta_nu^f",
];

fn basis_tensor(k: usize) -> IndexTensor {
    let eta = MixedSymbols::new();
    let u = [1i64, 0, 0, 0];
    let mut t = [[[[0; 4]; 4]; 3]; 3];
    for (a, ta) in t.iter_mut().enumerate() {
        for (f, tf) in ta.iter_mut().enumerate() {
            for (nu, tn) in tf.iter_mut().enumerate() {
                for (rho, v) in tn.iter_mut().enumerate() {
                    let d = (a == f) as i64;
                    *v = match k {
                        0 => d * metric(nu, rho),
                        1 => d * u[nu] * u[rho],
                        2 => eta.lower(a, nu) * eta.lower(f, rho),
                        _ => eta.lower(a, rho) * eta.lower(f, nu),
                    };
                }
            }
        }
    }
    t
}

fn flatten(t: &IndexTensor) -> Vec<i64> {
    t.iter().flatten().flatten().flatten().copied().collect()
}

/// Contact-term tensors in units of `g² φ₀² C₁`:
///
/// ```text
/// T1 = ε^{abc} ε^{cde} C^{bfμ}_ρ η_μ^d η_ν^e
/// T2 = ε^{abc} ε^{cde} η^{bμ} C^{df}_{μρ} η_ν^e
/// T3 = ε^{abc} ε^{cde} η^{bμ} η_μ^d C^{ef}_{νρ}
/// ```
pub fn contact_terms(sub: KernelSubstitution) -> [IndexTensor; 3] {
    let e = Epsilon3;
    let eta = MixedSymbols::new();
    let mut t = [[[[[0i64; 4]; 4]; 3]; 3]; 3];
    for a in 0..3 {
        for f in 0..3 {
            for nu in 0..4 {
                for rho in 0..4 {
                    let mut s = [0i64; 3];
                    for b in 0..3 {
                        for c in 0..3 {
                            for d in 0..3 {
                                for ee in 0..3 {
                                    let ep = e.get(a, b, c) * e.get(c, d, ee);
                                    if ep == 0 {
                                        continue;
                                    }
                                    for mu in 0..4 {
                                        let c_up = METRIC[mu] * sub.structure(b, f, mu, rho);
                                        s[0] += ep * c_up * eta.lower(d, mu) * eta.lower(ee, nu);
                                        s[1] += ep * eta.upper(b, mu) * sub.structure(d, f, mu, rho) * eta.lower(ee, nu);
                                        s[2] += ep * eta.upper(b, mu) * eta.lower(d, mu) * sub.structure(ee, f, nu, rho);
                                    }
                                }
                            }
                        }
                    }
                    for k in 0..3 {
                        t[k][a][f][nu][rho] = s[k];
                    }
                }
            }
        }
    }
    t
}

/// Exact least-squares coefficients of `t` on [`BASIS_LABELS`] and the
/// squared norm of the remainder.
pub fn decompose(t: &IndexTensor) -> ([Rational64; 4], Rational64) {
    let basis: Vec<Vec<i64>> = (0..4).map(|k| flatten(&basis_tensor(k))).collect();
    let target = flatten(t);
    let dot = |x: &[i64], y: &[i64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<i64>();
    let mut m = [[Rational64::from_integer(0); 5]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = Rational64::from_integer(dot(&basis[i], &basis[j]));
        }
        m[i][4] = Rational64::from_integer(dot(&basis[i], &target));
    }
    // Gauss-Jordan on the (nonsingular) Gram matrix
    for col in 0..4 {
        let pivot = (col..4).find(|&r| m[r][col] != Rational64::from_integer(0)).expect("basis is independent");
        m.swap(col, pivot);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..4 {
            if r != col {
                let factor = m[r][col];
                for k in 0..5 {
                    let sub = factor * m[col][k];
                    m[r][k] -= sub;
                }
            }
        }
    }
    let coeffs = [m[0][4], m[1][4], m[2][4], m[3][4]];
    let mut rem = Rational64::from_integer(0);
    for (idx, &tv) in target.iter().enumerate() {
        let mut r = Rational64::from_integer(tv);
        for k in 0..4 {
            r -= coeffs[k] * Rational64::from_integer(basis[k][idx]);
        }
        rem += r * r;
    }
    (coeffs, rem)
}

/// Single-derivative mixing terms of the linearized equation, rest frame,
/// as integer tensors `[a][f][ν][ρ][σ]`.
///
/// `D1 = ε^{abc} C^{bf}_{μρ} ∂^μ A_ν^c` and `D3 = ε^{abc} C^{bfμ}_ρ ∂_μ A_ν^c`
/// in units of `g φ₀' C₁` (only `σ = 0` is populated). `D2 = ε^{abc} A_μ^b ∂^μ
/// C^{cf}_{νρ}` and `D4 = −ε^{abc} A^{bμ} ∂_ν C^{cf}_{μρ}` in units of
/// `g φ₀ ∂_σ C₁`.
pub fn derivative_terms(sub: KernelSubstitution) -> [Vec<i64>; 4] {
    let e = Epsilon3;
    let eta = MixedSymbols::new();
    let mut out: [Vec<i64>; 4] = Default::default();
    for o in out.iter_mut() {
        o.resize(3 * 3 * 4 * 4 * 4, 0);
    }
    let idx = |a: usize, f: usize, nu: usize, rho: usize, s: usize| (((a * 3 + f) * 4 + nu) * 4 + rho) * 4 + s;
    for a in 0..3 {
        for f in 0..3 {
            for nu in 0..4 {
                for rho in 0..4 {
                    for b in 0..3 {
                        for c in 0..3 {
                            let ep = e.get(a, b, c);
                            if ep == 0 {
                                continue;
                            }
                            // rest frame: ∂_μ φ₀ = u_μ φ₀'
                            let d1 = ep * METRIC[0] * sub.structure(b, f, 0, rho) * eta.lower(c, nu);
                            out[0][idx(a, f, nu, rho, 0)] += d1;
                            out[2][idx(a, f, nu, rho, 0)] += d1;
                            for s in 0..4 {
                                out[1][idx(a, f, nu, rho, s)] +=
                                    ep * eta.lower(b, s) * METRIC[s] * sub.structure(c, f, nu, rho);
                            }
                            for mu in 0..4 {
                                out[3][idx(a, f, nu, rho, nu)] -=
                                    ep * eta.upper(b, mu) * sub.structure(c, f, mu, rho);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// One contact term in a [`CasimirAudit`].
#[derive(Debug, Clone, Serialize)]
pub struct AuditTerm {
    pub label: String,
    /// Flattened `[a][f][ν][ρ]` coefficients times `g²`.
    pub coefficients: Vec<f64>,
    /// Exact basis coefficients in units of `g²`, as `"p/q"` strings.
    pub basis_coefficients: Vec<String>,
    pub remainder_norm_sq: String,
}

/// Term-by-term report of the `g²` contact terms.
#[derive(Debug, Clone, Serialize)]
pub struct CasimirAudit {
    pub g: f64,
    pub substitution: KernelSubstitution,
    pub index_order: String,
    pub basis: Vec<String>,
    pub terms: Vec<AuditTerm>,
    pub sum: AuditTerm,
    /// Coefficient of `δ^{af} η_{νρ}` in the sum, in units of `g²` (exact).
    pub delta_metric_coefficient: String,
    /// The same in units of `φ₀² C₁` for the given `g`.
    pub delta_metric_value: f64,
    pub expected_value: f64,
    pub delta_metric_matches: bool,
    /// Frobenius norms of the single-derivative mixing terms, times `g`.
    pub derivative_term_norms: Vec<f64>,
    #[serde(skip)]
    pub exact_delta_metric: Rational64,
    #[serde(skip)]
    pub exact_sum: IndexTensor,
}

fn fmt_rational(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn audit_term(label: &str, t: &IndexTensor, g2: f64) -> AuditTerm {
    let (c, rem) = decompose(t);
    AuditTerm {
        label: label.to_string(),
        coefficients: flatten(t).iter().map(|&v| v as f64 * g2).collect(),
        basis_coefficients: c.iter().map(|&r| fmt_rational(r)).collect(),
        remainder_norm_sq: fmt_rational(rem),
    }
}

/// Exhaustive index enumeration of the three `g²` contact terms under the
/// given substitution, with `A^{(0)} = η φ₀`. The collapsed equation needs the
/// `δ^{af} η_{νρ}` part of the sum to be `6 g² φ₀² C₁`.
pub fn casimir_contraction_audit_with(g: f64, sub: KernelSubstitution) -> CasimirAudit {
    let g2 = g * g;
    let terms = contact_terms(sub);
    let mut sum = [[[[0i64; 4]; 4]; 3]; 3];
    for t in &terms {
        for a in 0..3 {
            for f in 0..3 {
                for nu in 0..4 {
                    for rho in 0..4 {
                        sum[a][f][nu][rho] += t[a][f][nu][rho];
                    }
                }
            }
        }
    }
    let (coeffs, _) = decompose(&sum);
    let exact = coeffs[0];
    let value = *exact.numer() as f64 / *exact.denom() as f64 * g2;
    let expected = 6.0 * g2;
    let labels = ["eps eps C^{bf mu}_rho A_mu^d A_nu^e", "eps eps A^{b mu} C^{df}_{mu rho} A_nu^e", "eps eps A^{b mu} A_mu^d C^{ef}_{nu rho}"];
    let derivative_term_norms = derivative_terms(sub)
        .iter()
        .map(|d| (d.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt() * g.abs())
        .collect();
    CasimirAudit {
        g,
        substitution: sub,
        index_order: "a,f,nu,rho".into(),
        basis: BASIS_LABELS.iter().map(|s| s.to_string()).collect(),
        terms: terms.iter().zip(labels).map(|(t, l)| audit_term(l, t, g2)).collect(),
        sum: audit_term("sum", &sum, g2),
        delta_metric_coefficient: fmt_rational(exact),
        delta_metric_value: value,
        expected_value: expected,
        delta_metric_matches: exact == Rational64::from_integer(6) || g == 0.0,
        derivative_term_norms,
        exact_delta_metric: exact,
        exact_sum: sum,
    }
}

/// [`casimir_contraction_audit_with`] under the metric substitution
/// `C^{bf}_{μρ} = δ^{bf} η_{μρ} C₁`.
pub fn casimir_contraction_audit(g: f64) -> CasimirAudit {
    casimir_contraction_audit_with(g, KernelSubstitution::Metric)
}

/// `D^{ab}_{μν}(k) = δ^{ab} (η_{μν} − k_μ k_ν / k²) C₁(k)`.
pub fn tensor_propagator(k: &FourVector, series: &PoleSeries) -> Result<TensorPropagator> {
    let k2 = k.square();
    let scale = k.to_array().iter().map(|c| c * c).sum::<f64>();
    if k2.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) || k2 == 0.0 {
        return Err(Error::Lightlike(k2));
    }
    let kmag = k.spatial().iter().map(|c| c * c).sum::<f64>().sqrt();
    let c1 = propagator_momentum(k.t, kmag, series);
    let kl = k.lower();
    let zero = Complex64::new(0.0, 0.0);
    let mut d = [[[[zero; 4]; 4]; 3]; 3];
    for a in 0..3 {
        for mu in 0..4 {
            for nu in 0..4 {
                let proj = metric(mu, nu) as f64 - kl[mu] * kl[nu] / k2;
                d[a][a][mu][nu] = c1 * proj;
            }
        }
    }
    Ok(d)
}
