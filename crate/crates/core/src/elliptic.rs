//! Complete elliptic integral of the first kind and the Jacobi elliptic
//! functions at imaginary unit modulus (parameter `m = -1`).
//!
//! Everything stays in real arithmetic. The imaginary-modulus transformation
//! maps parameter `m < 0` onto the real parameter `mu = -m / (1 - m)`:
//!
//! ```text
//! sn(u | m) = sd(u √(1-m) | mu) / √(1-m)
//! cn(u | m) = cd(u √(1-m) | mu)
//! dn(u | m) = nd(u √(1-m) | mu)
//! ```
//!
//! so `m = -1` is evaluated through `mu = 1/2` with the descending
//! Landen (AGM) scheme.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

const AGM_REL_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 64;

/// Default truncation of the sine series for `sn(u, i)`.
pub const DEFAULT_SERIES_TERMS: usize = 12;

/// `(sn, cn, dn)` at a real argument and modulus `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticValue {
    pub u: f64,
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

impl EllipticValue {
    /// `max(|sn² + cn² − 1|, |dn² − 1 − sn²|)`.
    pub fn identity_defect(&self) -> f64 {
        let a = (self.sn * self.sn + self.cn * self.cn - 1.0).abs();
        let b = (self.dn * self.dn - 1.0 - self.sn * self.sn).abs();
        a.max(b)
    }
}

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm(a: f64, b: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    for _ in 0..AGM_MAX_ITER {
        let next_a = 0.5 * (a + b);
        let next_b = (a * b).sqrt();
        a = next_a;
        b = next_b;
        if (a - b).abs() <= AGM_REL_TOL * a {
            break;
        }
    }
    0.5 * (a + b)
}

/// `K(m) = π / (2 AGM(1, √(1−m)))`, valid for every real `m < 1`.
pub fn complete_elliptic_k(m: f64) -> Result<f64> {
    if !m.is_finite() || m >= 1.0 {
        return Err(Error::Domain(m));
    }
    Ok(PI / (2.0 * agm(1.0, (1.0 - m).sqrt())))
}

/// `K(i)`, i.e. `K(m = -1)`, computed once.
pub fn k_i() -> f64 {
    static K_I: OnceLock<f64> = OnceLock::new();
    *K_I.get_or_init(|| PI / (2.0 * agm(1.0, 2f64.sqrt())))
}

/// Real period `4K(i)` of `sn(·, i)` and `cn(·, i)`.
pub fn period_i() -> f64 {
    4.0 * k_i()
}

/// Reduces `u` into `[-2K(i), 2K(i)]` modulo `4K(i)`.
pub fn reduce_argument(u: f64) -> f64 {
    let p = period_i();
    u - p * (u / p).round()
}

/// `(sn, cn, dn)` for a real parameter `0 <= m < 1` by descending Landen/AGM.
///
/// `dn` is recovered as `√(1 − m sn²)`, which is well conditioned for `m <= 1/2`.
fn sncndn_real(u: f64, m: f64) -> (f64, f64, f64) {
    if m == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    let mut a = [0.0f64; AGM_MAX_ITER + 1];
    let mut c = [0.0f64; AGM_MAX_ITER + 1];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while n < AGM_MAX_ITER {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
        if c[n].abs() <= AGM_REL_TOL * a[n] {
            break;
        }
    }
    let mut phi = f64::from(1u32 << n) * a[n] * u;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (1.0 - m * sn * sn).sqrt();
    (sn, cn, dn)
}

/// Jacobi functions at modulus `i` without input validation.
pub(crate) fn sncndn_i(u: f64) -> EllipticValue {
    let r = reduce_argument(u);
    let (s, c, d) = sncndn_real(r * std::f64::consts::SQRT_2, 0.5);
    EllipticValue {
        u,
        sn: s / (d * std::f64::consts::SQRT_2),
        cn: c / d,
        dn: 1.0 / d,
    }
}

/// `(sn, cn, dn)(u, i)`.
pub fn jacobi_i(u: f64) -> Result<EllipticValue> {
    if !u.is_finite() {
        return Err(Error::Argument(u));
    }
    Ok(sncndn_i(u))
}

/// `d/du sn(u, i) = cn(u, i) dn(u, i)`.
pub fn dsn_du(u: f64) -> f64 {
    let v = sncndn_i(u);
    v.cn * v.dn
}

/// Truncation of the `q`-type sine series for `sn(·, i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSeriesSpec {
    n_terms: usize,
    k_i: f64,
}

impl QSeriesSpec {
    pub fn new(n_terms: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::Parameter("series needs at least one term".into()));
        }
        Ok(Self { n_terms, k_i: k_i() })
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn k_i(&self) -> f64 {
        self.k_i
    }
}

impl Default for QSeriesSpec {
    fn default() -> Self {
        Self { n_terms: DEFAULT_SERIES_TERMS, k_i: k_i() }
    }
}

/// Weight `e^{-(n+1/2)π} / (1 + e^{-(2n+1)π})` shared by the sine series of
/// `sn` and the cosine series of `cn·dn`.
pub fn series_weight(n: usize) -> f64 {
    let nf = n as f64;
    (-(nf + 0.5) * PI).exp() / (1.0 + (-(2.0 * nf + 1.0) * PI).exp())
}

/// Partial sum of
/// `sn(u, i) = (2π/K) Σ (−1)ⁿ w_n sin((2n+1) π u / 2K)`.
pub fn sn_fourier(u: f64, spec: &QSeriesSpec) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::Argument(u));
    }
    let k = spec.k_i;
    let r = reduce_argument(u);
    let base = PI * r / (2.0 * k);
    let sum: f64 = (0..spec.n_terms)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * series_weight(n) * ((2 * n + 1) as f64 * base).sin()
        })
        .sum();
    Ok(2.0 * PI / k * sum)
}

/// `K(0) = π/2`.
pub const K_ZERO: f64 = FRAC_PI_2;
