//! Closed-form objects of the massless quartic scalar: the elliptic
//! travelling wave `φ₀`, its fluctuation mode `φ_h`, the Fourier weights
//! `A_n`, and the propagator in frequency and momentum space.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::elliptic::{jacobi_i, k_i, reduce_argument, series_weight, sncndn_i};
use crate::error::{Error, Result};

/// Number of pole terms kept by default in every propagator sum.
pub const DEFAULT_POLE_TERMS: usize = 8;

/// Contravariant four-vector `(t, x, y, z)` with signature `(+,−,−,−)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    /// Minkowski product `a·b = a_t b_t − a⃗·b⃗`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Covariant components `x_μ = η_μν x^ν`.
    pub fn lower(&self) -> [f64; 4] {
        [self.t, -self.x, -self.y, -self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

impl Add for FourVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

/// `μ²√(λ/2)`, the invariant mass squared of the wave.
pub fn dispersion_mass_squared(mu: f64, lambda: f64) -> f64 {
    mu * mu * (lambda / 2.0).sqrt()
}

/// Parameters `(μ, λ, p, θ)` of `φ₀ = μ(2/λ)^{1/4} sn(p·x + θ, i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveBackground {
    mu: f64,
    lambda: f64,
    p: FourVector,
    theta: f64,
}

impl WaveBackground {
    /// Validates positivity and the dispersion constraint `p·p = μ²√(λ/2)`.
    pub fn new(mu: f64, lambda: f64, p: FourVector, theta: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Parameter(format!("mu must be positive, got {mu}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
        }
        if !p.is_finite() || !theta.is_finite() {
            return Err(Error::Parameter("momentum and phase must be finite".into()));
        }
        let target = dispersion_mass_squared(mu, lambda);
        let defect = (p.square() - target).abs();
        if defect >= 1e-12 * target.max(1.0) {
            return Err(Error::Parameter(format!(
                "dispersion violated: p·p = {}, expected {target}",
                p.square()
            )));
        }
        Ok(Self { mu, lambda, p, theta })
    }

    /// Rest-frame background `p = (m, 0, 0, 0)` with `θ = K(i)`.
    pub fn rest(mu: f64, lambda: f64) -> Result<Self> {
        make_background(mu, lambda, [1.0, 0.0, 0.0], 0.0)
    }

    /// Same wave with phase `θ = (4m + 1) K(i)`.
    pub fn with_phase_index(self, m: i64) -> Self {
        Self { theta: (4 * m + 1) as f64 * k_i(), ..self }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn momentum(&self) -> FourVector {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `m = √(p·p)`.
    pub fn mass(&self) -> f64 {
        dispersion_mass_squared(self.mu, self.lambda).sqrt()
    }

    /// `a = μ (2/λ)^{1/4}`.
    pub fn amplitude(&self) -> f64 {
        self.mu * (2.0 / self.lambda).powf(0.25)
    }

    /// Time period `4K(i) / p_t` of the wave at fixed position.
    pub fn time_period(&self) -> f64 {
        4.0 * k_i() / self.p.t
    }

    /// `p·x`, without the phase offset.
    pub fn xi(&self, x: &FourVector) -> f64 {
        self.p.dot(x)
    }

    /// `a sn(ξ + θ, i)` as a function of `ξ = p·x`.
    pub fn phi0_at_xi(&self, xi: f64) -> f64 {
        self.amplitude() * sncndn_i(xi + self.theta).sn
    }

    /// `a cn(ξ + θ, i) dn(ξ + θ, i)`.
    pub fn phi_h_at_xi(&self, xi: f64) -> f64 {
        let v = sncndn_i(xi + self.theta);
        self.amplitude() * v.cn * v.dn
    }

    pub fn phi0(&self, x: &FourVector) -> f64 {
        self.phi0_at_xi(self.xi(x))
    }

    pub fn phi_h(&self, x: &FourVector) -> f64 {
        self.phi_h_at_xi(self.xi(x))
    }

    /// `∂_μ φ₀ = p_μ a cn dn`, covariant components.
    pub fn phi0_gradient(&self, x: &FourVector) -> [f64; 4] {
        let d = self.phi_h(x);
        let pl = self.p.lower();
        [pl[0] * d, pl[1] * d, pl[2] * d, pl[3] * d]
    }
}

/// Builds a background whose momentum has speed `boost` along `direction`.
///
/// `p_t = m / √(1 − boost²)`, `p⃗ = p_t · boost · direction`, `θ = K(i)`.
pub fn make_background(mu: f64, lambda: f64, direction: [f64; 3], boost: f64) -> Result<WaveBackground> {
    if !(mu > 0.0) || !(lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "mu and lambda must be positive, got mu = {mu}, lambda = {lambda}"
        )));
    }
    if !(0.0..1.0).contains(&boost) {
        return Err(Error::Parameter(format!("boost must lie in [0, 1), got {boost}")));
    }
    let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!("direction must be a unit vector, |n| = {norm}")));
    }
    let m = dispersion_mass_squared(mu, lambda).sqrt();
    let pt = m / (1.0 - boost * boost).sqrt();
    let s = pt * boost;
    let p = FourVector::new(pt, s * direction[0], s * direction[1], s * direction[2]);
    WaveBackground::new(mu, lambda, p, k_i())
}

/// `p² φ₀''(ξ) + λ φ₀³(ξ)` with a centred second difference of step `h`.
pub fn phi0_ode_residual(bg: &WaveBackground, xi: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("step must be positive, got {h}")));
    }
    let f = |s: f64| bg.phi0_at_xi(s);
    let second = (f(xi + h) - 2.0 * f(xi) + f(xi - h)) / (h * h);
    let phi = f(xi);
    Ok(bg.p.square() * second + bg.lambda * phi * phi * phi)
}

/// Same residual with `φ₀''` from the derivative identities
/// `sn' = cn dn`, `cn' = −sn dn`, `dn' = sn cn` (parameter −1):
/// `sn'' = sn (cn² − dn²)`.
pub fn phi0_ode_residual_analytic(bg: &WaveBackground, xi: f64) -> f64 {
    let v = sncndn_i(xi + bg.theta);
    let a = bg.amplitude();
    let second = a * v.sn * (v.cn * v.cn - v.dn * v.dn);
    let phi = a * v.sn;
    bg.p.square() * second + bg.lambda * phi * phi * phi
}

/// `p² φ_h''(ξ) + 3λ φ₀²(ξ) φ_h(ξ)` with a centred second difference.
pub fn phi_h_linearized_residual(bg: &WaveBackground, xi: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("step must be positive, got {h}")));
    }
    let f = |s: f64| bg.phi_h_at_xi(s);
    let second = (f(xi + h) - 2.0 * f(xi) + f(xi - h)) / (h * h);
    let phi = bg.phi0_at_xi(xi);
    Ok(bg.p.square() * second + 3.0 * bg.lambda * phi * phi * f(xi))
}

/// `k_n = (2n+1) π / (2K(i))`, the wavenumber of the n-th odd harmonic.
pub fn harmonic(n: usize) -> f64 {
    (2 * n + 1) as f64 * PI / (2.0 * k_i())
}

/// `A_n = (π²/K²(i)) (2n+1) e^{−(n+1/2)π} / (1 + e^{−(2n+1)π})`.
pub fn coefficient_a(n: usize) -> f64 {
    let k = k_i();
    PI * PI / (k * k) * (2 * n + 1) as f64 * series_weight(n)
}

/// `cn(u, i) dn(u, i) = Σ (−1)ⁿ A_n cos(k_n u)`, truncated.
pub fn cn_dn_series(u: f64, n_terms: usize) -> f64 {
    let r = reduce_argument(u);
    (0..n_terms)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * coefficient_a(n) * (harmonic(n) * r).cos()
        })
        .sum()
}

/// `ω_n = (2n+1) π/(2K(i)) · m`.
pub fn mass_spectrum(n: usize, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Parameter(format!("mass must be positive, got {m}")));
    }
    Ok(harmonic(n) * m)
}

/// Pole representation of the scalar propagator: mass `m`, Feynman regulator
/// `ε`, and the retained `(A_n, n)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSeries {
    mass: f64,
    eps: f64,
    terms: Vec<(f64, usize)>,
}

impl PoleSeries {
    pub fn new(mass: f64, eps: f64, n_terms: usize) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Parameter(format!("mass must be positive, got {mass}")));
        }
        if !(eps > 0.0) {
            return Err(Error::Regulator(eps));
        }
        if n_terms == 0 {
            return Err(Error::Parameter("pole series needs at least one term".into()));
        }
        let terms = (0..n_terms).map(|n| (coefficient_a(n), n)).collect();
        Ok(Self { mass, eps, terms })
    }

    /// Series for a background, with `m² = μ²√(λ/2)`.
    pub fn for_background(bg: &WaveBackground, eps: f64) -> Result<Self> {
        Self::new(bg.mass(), eps, DEFAULT_POLE_TERMS)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn terms(&self) -> &[(f64, usize)] {
        &self.terms
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Regulator(eps));
        }
        Ok(Self { eps, ..self.clone() })
    }
}

fn check_canonical_phase(bg: &WaveBackground) -> Result<()> {
    if reduce_argument(bg.theta - k_i()).abs() > 1e-9 {
        return Err(Error::Parameter(format!(
            "pole sum assumes θ ≡ K(i) mod 4K(i), got θ = {}",
            bg.theta
        )));
    }
    Ok(())
}

/// Laplace-Fourier transform of the unit-amplitude mode `cn·dn(p·x + θ)` at
/// frequency `ω`, as the truncated pole sum
///
/// ```text
/// ½ Σ A_n [ e^{i k_n p⃗·x⃗} / (ω − k_n p_t + iε) − e^{−i k_n p⃗·x⃗} / (ω + k_n p_t + iε) ]
/// ```
///
/// The transform kernel is `e^{+i(ω + iε)t}`, which converges for `ε > 0`.
pub fn c1_frequency(
    omega: f64,
    x3: [f64; 3],
    bg: &WaveBackground,
    eps: f64,
    n_terms: usize,
) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::Regulator(eps));
    }
    check_canonical_phase(bg)?;
    let p = bg.p;
    let px = p.x * x3[0] + p.y * x3[1] + p.z * x3[2];
    let sum = (0..n_terms).fold(Complex64::new(0.0, 0.0), |acc, n| {
        let k = harmonic(n);
        let phase = Complex64::from_polar(1.0, k * px);
        let plus = phase / Complex64::new(omega - k * p.t, eps);
        let minus = phase.conj() / Complex64::new(omega + k * p.t, eps);
        acc + (plus - minus) * coefficient_a(n)
    });
    Ok(sum * 0.5)
}

/// Direct numerical transform `∫₀^T e^{i(ω+iε)t} cn·dn(p·x + θ) dt` by
/// composite Simpson quadrature with step `dt`. The truncation error is
/// `O(e^{−εT})`.
pub fn numerical_laplace_mode(
    omega: f64,
    x3: [f64; 3],
    bg: &WaveBackground,
    eps: f64,
    t_max: f64,
    dt: f64,
) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::Regulator(eps));
    }
    let mut steps = (t_max / dt).ceil() as usize;
    steps += steps % 2;
    let h = t_max / steps as f64;
    let f = |t: f64| {
        let x = FourVector::new(t, x3[0], x3[1], x3[2]);
        let v = sncndn_i(bg.xi(&x) + bg.theta);
        Complex64::from_polar((-eps * t).exp(), omega * t) * (v.cn * v.dn)
    };
    let mut acc = f(0.0) + f(t_max);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(i as f64 * h) * w;
    }
    Ok(acc * (h / 3.0))
}

/// Momentum-space propagator after integrating out the wave momentum:
///
/// ```text
/// Σ_n A_n / (4 E_n) [ 1/(ω − k_n E_n + iε) − 1/(ω + k_n E_n + iε) ],
/// E_n = √(|k|²/k_n² + m²)
/// ```
pub fn propagator_momentum(omega: f64, kmag: f64, series: &PoleSeries) -> Complex64 {
    let m2 = series.mass * series.mass;
    series.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, &(a, n)| {
        let kn = harmonic(n);
        let e = (kmag * kmag / (kn * kn) + m2).sqrt();
        let pole = kn * e;
        let bracket = Complex64::new(omega - pole, series.eps).inv()
            - Complex64::new(omega + pole, series.eps).inv();
        acc + bracket * (a / (4.0 * e))
    })
}

/// Locates the peaks of `|Im C₁(ω, k = 0)|` on `(0, omega_max]` by a scan at
/// resolution `ε/4` followed by golden-section refinement.
pub fn spectral_peaks(series: &PoleSeries, omega_max: f64) -> Vec<f64> {
    let eps = series.eps;
    let f = |w: f64| propagator_momentum(w, 0.0, series).im.abs();
    let step = eps / 4.0;
    let n = (omega_max / step).ceil() as usize;
    let samples = crate::par::map_range(n + 1, |i| f(i as f64 * step));
    let mut peaks = Vec::new();
    for i in 1..n {
        if samples[i] > samples[i - 1] && samples[i] >= samples[i + 1] {
            peaks.push(golden_max(&f, (i - 1) as f64 * step, (i + 1) as f64 * step, 1e-12));
        }
    }
    peaks
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Full width at half maximum of the `n`-th peak at `k = 0`, measured on the
/// curve itself.
pub fn peak_width(series: &PoleSeries, n: usize) -> f64 {
    let center = harmonic(n) * series.mass;
    let f = |w: f64| propagator_momentum(w, 0.0, series).im.abs();
    let half = 0.5 * f(center);
    let bisect = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if f(mid) > half {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    let right = bisect(center, center + 50.0 * series.eps);
    let left = bisect(center, center - 50.0 * series.eps);
    right - left
}

/// Phase check used for the light-cone condition: `sn(θ, i)`.
pub fn sn_at_phase(bg: &WaveBackground) -> f64 {
    jacobi_i(bg.theta).map(|v| v.sn).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rest() -> WaveBackground {
        WaveBackground::rest(1.0, 2.0).unwrap()
    }

    #[test]
    fn rest_frame_momentum() {
        let bg = rest();
        assert_eq!(bg.momentum(), FourVector::new(1.0, 0.0, 0.0, 0.0));
        assert!((bg.momentum().square() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boosted_background_keeps_dispersion() {
        let bg = make_background(1.0, 2.0, [1.0, 0.0, 0.0], 0.6).unwrap();
        let p = bg.momentum();
        assert!((p.square() - 1.0).abs() < 1e-12);
        assert!((p.t - 1.25).abs() < 1e-12);
        assert!((p.x - 0.75).abs() < 1e-12);
    }

    #[test]
    fn dispersion_scales_with_mu_and_lambda() {
        let bg = make_background(2.0, 8.0, [0.0, 0.0, 1.0], 0.3).unwrap();
        assert!((bg.momentum().square() - 8.0).abs() < 1e-11);
    }

    #[test]
    fn parameter_errors() {
        assert!(make_background(1.0, 0.0, [1.0, 0.0, 0.0], 0.0).is_err());
        assert!(make_background(-1.0, 1.0, [1.0, 0.0, 0.0], 0.0).is_err());
        assert!(make_background(1.0, 1.0, [1.0, 1.0, 0.0], 0.0).is_err());
        assert!(make_background(1.0, 1.0, [1.0, 0.0, 0.0], 1.0).is_err());
        let bad = FourVector::new(2.0, 0.0, 0.0, 0.0);
        assert!(WaveBackground::new(1.0, 2.0, bad, 0.0).is_err());
    }

    #[test]
    fn phi0_special_points() {
        let bg = rest();
        assert!((bg.phi0(&FourVector::default()) - 1.0).abs() < 1e-14);
        let t = -bg.theta();
        assert!(bg.phi0(&FourVector::new(t, 0.0, 0.0, 0.0)).abs() < 1e-14);
        let xi = 1.3 - bg.theta();
        assert!((bg.phi0_at_xi(xi) - jacobi_i(1.3).unwrap().sn).abs() < 1e-14);
    }

    #[test]
    fn phi_h_special_points() {
        let bg = rest();
        assert!((bg.phi_h_at_xi(-bg.theta()) - bg.amplitude()).abs() < 1e-14);
        assert!(bg.phi_h_at_xi(k_i() - bg.theta()).abs() < 1e-14);
    }

    #[test]
    fn analytic_residual_vanishes() {
        let bg = make_background(1.3, 0.7, [0.0, 1.0, 0.0], 0.4).unwrap();
        for i in 0..100 {
            let xi = -6.0 + 0.12 * i as f64;
            assert!(phi0_ode_residual_analytic(&bg, xi).abs() < 1e-10);
        }
    }

    #[test]
    fn residual_rejects_bad_step() {
        assert!(phi0_ode_residual(&rest(), 0.1, 0.0).is_err());
        assert!(phi_h_linearized_residual(&rest(), 0.1, -1.0).is_err());
    }

    #[test]
    fn lame_coefficient_is_six() {
        let bg = make_background(1.7, 3.1, [1.0, 0.0, 0.0], 0.2).unwrap();
        let c = 3.0 * bg.lambda() * bg.amplitude().powi(2) / bg.momentum().square();
        assert!((c - 6.0).abs() < 1e-12);
    }

    #[test]
    fn a_ratio_formula() {
        let e = (-PI).exp();
        let expected = 3.0 * e * (1.0 + e) / (1.0 + e * e * e);
        assert!((coefficient_a(1) / coefficient_a(0) - expected).abs() < 1e-15);
    }

    #[test]
    fn spectrum_is_odd_tower() {
        let w0 = mass_spectrum(0, 1.0).unwrap();
        assert!((w0 - PI / (2.0 * k_i())).abs() < 1e-15);
        assert!((mass_spectrum(1, 1.0).unwrap() / w0 - 3.0).abs() < 1e-14);
        assert!((w0 - 1.198_140_234_735_592).abs() < 1e-12);
        assert!(mass_spectrum(0, 0.0).is_err());
    }

    #[test]
    fn regulator_errors() {
        let bg = rest();
        assert!(matches!(c1_frequency(1.0, [0.0; 3], &bg, 0.0, 8), Err(Error::Regulator(_))));
        assert!(matches!(PoleSeries::new(1.0, -1.0, 8), Err(Error::Regulator(_))));
    }

    #[test]
    fn pole_sum_requires_canonical_phase() {
        let bg = rest().with_theta(0.3);
        assert!(c1_frequency(1.0, [0.0; 3], &bg, 0.1, 8).is_err());
        let shifted = rest().with_phase_index(3);
        assert!(c1_frequency(1.0, [0.0; 3], &shifted, 0.1, 8).is_ok());
    }

    #[test]
    fn light_cone_phase_family() {
        for m in -3..=3 {
            let bg = rest().with_phase_index(m);
            assert!((sn_at_phase(&bg).abs() - 1.0).abs() < 1e-12);
            let phi = bg.phi0_at_xi(0.0);
            assert!((phi * phi - bg.amplitude().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn propagator_decays_at_large_frequency() {
        let s = PoleSeries::new(1.0, 1e-3, 8).unwrap();
        let a = propagator_momentum(1e3, 0.0, &s).norm();
        let b = propagator_momentum(2e3, 0.0, &s).norm();
        assert!(b < a);
    }

    #[test]
    fn c1_frequency_decays_like_inverse_omega() {
        let bg = make_background(1.0, 2.0, [1.0, 0.0, 0.0], 0.5).unwrap();
        let x3 = [0.37, 0.0, 0.0];
        let a = c1_frequency(1e4, x3, &bg, 0.1, 8).unwrap().norm();
        let b = c1_frequency(2e4, x3, &bg, 0.1, 8).unwrap().norm();
        assert!((a / b - 2.0).abs() < 1e-2);
    }
}
