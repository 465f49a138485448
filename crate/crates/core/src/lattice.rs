//! 1+1D lattice ground truth for the sourced quartic equation
//! `∂²_t φ − ∂²_x φ + λφ³ = j` and its linearization about the wave
//! background.
//!
//! Fields are stored as `Array2<f64>` indexed `[time sheet, site]`. Site
//! `(n, i)` sits at `t = n·dt`, `x = i·dx`. Sources are forces: the value at
//! sheet `n` enters the update that produces sheet `n + 1`, so only sheets
//! `1..=nt-2` and sites `1..=nx-2` can carry a source.

use ndarray::{Array1, Array2, Zip};

use crate::error::{Error, Result};
use crate::par;
use crate::scalar::{FourVector, WaveBackground};

/// Space-time field on a lattice, `[n, i]`.
pub type Field = Array2<f64>;

/// Default Richardson amplitudes for functional differences.
pub const DEFAULT_EPS_LIST: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Uniform 1+1D lattice geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice1p1 {
    pub nt: usize,
    pub nx: usize,
    pub dt: f64,
    pub dx: f64,
}

impl Lattice1p1 {
    pub fn new(nt: usize, nx: usize, dt: f64, dx: f64) -> Result<Self> {
        if nt < 8 || nx < 8 {
            return Err(Error::Configuration(format!("need nt, nx >= 8, got nt = {nt}, nx = {nx}")));
        }
        if !(dt > 0.0 && dx > 0.0) || !dt.is_finite() || !dx.is_finite() {
            return Err(Error::Configuration(format!("spacings must be positive, got dt = {dt}, dx = {dx}")));
        }
        if dt > dx {
            return Err(Error::Configuration(format!(
                "stability bound dt/dx <= 1 violated: dt = {dt}, dx = {dx}"
            )));
        }
        Ok(Self { nt, nx, dt, dx })
    }

    /// `nx = 256`, `dx = period/128`, `dt = dx/2`, and `nt` covering one
    /// temporal period of the background.
    pub fn default_for(bg: &WaveBackground) -> Self {
        let dx = bg.time_period() / 128.0;
        Self { nt: 257, nx: 256, dt: 0.5 * dx, dx }
    }

    /// Halves both spacings over the same physical extent; coarse site
    /// `(n, i)` coincides with fine site `(2n, 2i)`.
    pub fn refined(&self) -> Self {
        Self {
            nt: 2 * self.nt - 1,
            nx: 2 * self.nx - 1,
            dt: 0.5 * self.dt,
            dx: 0.5 * self.dx,
        }
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn point(&self, n: usize, i: usize) -> FourVector {
        FourVector::new(self.t(n), self.x(i), 0.0, 0.0)
    }

    pub fn cell_volume(&self) -> f64 {
        self.dt * self.dx
    }

    pub fn sites(&self) -> usize {
        self.nt * self.nx
    }

    pub fn site_index(&self, n: usize, i: usize) -> usize {
        n * self.nx + i
    }

    pub fn site(&self, index: usize) -> (usize, usize) {
        (index / self.nx, index % self.nx)
    }

    pub fn zeros(&self) -> Field {
        Array2::zeros((self.nt, self.nx))
    }

    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> Field {
        Array2::from_shape_fn((self.nt, self.nx), |(n, i)| f(self.t(n), self.x(i)))
    }

    /// Whether a source may be placed at `(n, i)`.
    pub fn accepts_source(&self, n: usize, i: usize) -> bool {
        (1..self.nt - 1).contains(&n) && (1..self.nx - 1).contains(&i)
    }

    pub fn check_field(&self, f: &Field) -> Result<()> {
        if f.dim() != (self.nt, self.nx) {
            return Err(Error::Shape(format!(
                "field is {:?}, lattice is ({}, {})",
                f.dim(),
                self.nt,
                self.nx
            )));
        }
        Ok(())
    }

    /// Coarse-lattice samples of a field living on `self.refined()`.
    pub fn restrict(&self, fine: &Field) -> Field {
        Array2::from_shape_fn((self.nt, self.nx), |(n, i)| fine[[2 * n, 2 * i]])
    }

    /// Unit lattice delta at `(n, i)`: `1 / (dt dx)` so that it integrates to one.
    pub fn delta(&self, n: usize, i: usize) -> Field {
        let mut f = self.zeros();
        f[[n, i]] = 1.0 / self.cell_volume();
        f
    }
}

fn check_background_fits(bg: &WaveBackground) -> Result<()> {
    let p = bg.momentum();
    if p.y != 0.0 || p.z != 0.0 {
        return Err(Error::Configuration(
            "1+1D lattice needs the wave momentum along x".into(),
        ));
    }
    Ok(())
}

/// Finite-difference stencil for the d'Alembertian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// Three-point centred differences, identical to the time stepper.
    #[default]
    Leapfrog,
    /// Five-point fourth-order centred differences.
    FourthOrder,
}

impl Stencil {
    pub fn margin(self) -> usize {
        match self {
            Stencil::Leapfrog => 1,
            Stencil::FourthOrder => 2,
        }
    }
}

/// `∂²_t f − ∂²_x f` at interior sites (zero within `stencil.margin()` of the edge).
pub fn dalembertian(f: &Field, lat: &Lattice1p1, stencil: Stencil) -> Field {
    let m = stencil.margin();
    let (it2, ix2) = (1.0 / (lat.dt * lat.dt), 1.0 / (lat.dx * lat.dx));
    let mut out = lat.zeros();
    for n in m..lat.nt - m {
        for i in m..lat.nx - m {
            out[[n, i]] = match stencil {
                Stencil::Leapfrog => {
                    (f[[n + 1, i]] - 2.0 * f[[n, i]] + f[[n - 1, i]]) * it2
                        - (f[[n, i + 1]] - 2.0 * f[[n, i]] + f[[n, i - 1]]) * ix2
                }
                Stencil::FourthOrder => {
                    let d = |a: f64, b: f64, c: f64, d: f64, e: f64| {
                        (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / 12.0
                    };
                    d(f[[n - 2, i]], f[[n - 1, i]], f[[n, i]], f[[n + 1, i]], f[[n + 2, i]]) * it2
                        - d(f[[n, i - 2]], f[[n, i - 1]], f[[n, i]], f[[n, i + 1]], f[[n, i + 2]]) * ix2
                }
            };
        }
    }
    out
}

/// Max of `|f|` over sites at least `margin` away from every lattice edge.
pub fn max_abs_interior(f: &Field, margin: usize) -> f64 {
    let (nt, nx) = f.dim();
    let mut best = 0.0f64;
    for n in margin..nt.saturating_sub(margin) {
        for i in margin..nx.saturating_sub(margin) {
            let v = f[[n, i]].abs();
            if v.is_nan() {
                return f64::NAN;
            }
            best = best.max(v);
        }
    }
    best
}

/// Source `j = amplitude · profile`, supported on source-capable sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceField {
    profile: Field,
    amplitude: f64,
}

impl SourceField {
    pub fn new(profile: Field, amplitude: f64, lat: &Lattice1p1) -> Result<Self> {
        lat.check_field(&profile)?;
        for ((n, i), v) in profile.indexed_iter() {
            if *v != 0.0 && !lat.accepts_source(n, i) {
                return Err(Error::Configuration(format!(
                    "source must vanish on boundary sheets, found {v} at ({n}, {i})"
                )));
            }
        }
        Ok(Self { profile, amplitude })
    }

    pub fn zero(lat: &Lattice1p1) -> Self {
        Self { profile: lat.zeros(), amplitude: 0.0 }
    }

    /// Compactly supported smooth bump `exp(1 − 1/(1 − r²))`, `r` the
    /// Euclidean distance to `(t0, x0)` in units of `radius`.
    pub fn bump(lat: &Lattice1p1, t0: f64, x0: f64, radius: f64, amplitude: f64) -> Result<Self> {
        let profile = Array2::from_shape_fn((lat.nt, lat.nx), |(n, i)| {
            if !lat.accepts_source(n, i) {
                return 0.0;
            }
            let r2 = ((lat.t(n) - t0).powi(2) + (lat.x(i) - x0).powi(2)) / (radius * radius);
            if r2 < 1.0 {
                (1.0 - 1.0 / (1.0 - r2)).exp()
            } else {
                0.0
            }
        });
        Self::new(profile, amplitude, lat)
    }

    /// Unit lattice delta at a site.
    pub fn point(lat: &Lattice1p1, n: usize, i: usize) -> Result<Self> {
        if !lat.accepts_source(n, i) {
            return Err(Error::Configuration(format!("({n}, {i}) cannot carry a source")));
        }
        Ok(Self { profile: lat.delta(n, i), amplitude: 1.0 })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn profile(&self) -> &Field {
        &self.profile
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self { profile: self.profile.clone(), amplitude }
    }

    /// `amplitude · profile`.
    pub fn values(&self) -> Field {
        &self.profile * self.amplitude
    }
}

/// Output of a lattice evolution.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub field: Field,
    /// Max interior residual of the discrete equation that was stepped.
    pub max_residual: f64,
    /// `max_n |E_n − E_0| / |E_0|` of the discrete energy; zero for linear solves.
    pub energy_drift: f64,
}

/// Leapfrog over sheets `2..nt`. Sheets 0, 1 and the boundary columns of
/// `field` must already hold their data. `force(n, i, φ)` returns `−V'(φ) + j`.
fn leapfrog<F>(lat: &Lattice1p1, field: &mut Field, force: F) -> Result<()>
where
    F: Fn(usize, usize, f64) -> f64,
{
    let dt2 = lat.dt * lat.dt;
    let r = dt2 / (lat.dx * lat.dx);
    for n in 1..lat.nt - 1 {
        for i in 1..lat.nx - 1 {
            let c = field[[n, i]];
            let lap = field[[n, i + 1]] - 2.0 * c + field[[n, i - 1]];
            let next = 2.0 * c - field[[n - 1, i]] + r * lap + dt2 * force(n, i, c);
            if !next.is_finite() {
                return Err(Error::Divergence { step: n + 1 });
            }
            field[[n + 1, i]] = next;
        }
    }
    Ok(())
}

/// Backward leapfrog from zero data on the last two sheets.
fn leapfrog_backward<F>(lat: &Lattice1p1, field: &mut Field, force: F) -> Result<()>
where
    F: Fn(usize, usize, f64) -> f64,
{
    let dt2 = lat.dt * lat.dt;
    let r = dt2 / (lat.dx * lat.dx);
    for n in (1..lat.nt - 1).rev() {
        for i in 1..lat.nx - 1 {
            let c = field[[n, i]];
            let lap = field[[n, i + 1]] - 2.0 * c + field[[n, i - 1]];
            let prev = 2.0 * c - field[[n + 1, i]] + r * lap + dt2 * force(n, i, c);
            if !prev.is_finite() {
                return Err(Error::Divergence { step: n - 1 });
            }
            field[[n - 1, i]] = prev;
        }
    }
    Ok(())
}

fn quartic_energy(lat: &Lattice1p1, lambda: f64, a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let mut e = 0.0;
    for i in 0..lat.nx {
        let v = (b[i] - a[i]) / lat.dt;
        e += 0.5 * v * v + 0.125 * lambda * (a[i].powi(4) + b[i].powi(4));
    }
    for i in 0..lat.nx - 1 {
        e += 0.5 * (a[i + 1] - a[i]) * (b[i + 1] - b[i]) / (lat.dx * lat.dx);
    }
    e * lat.dx
}

fn fill_initial_and_boundary<F: Fn(f64, f64) -> f64>(lat: &Lattice1p1, field: &mut Field, data: F) {
    for n in 0..lat.nt {
        for i in [0, lat.nx - 1] {
            field[[n, i]] = data(lat.t(n), lat.x(i));
        }
    }
    for n in 0..2 {
        for i in 0..lat.nx {
            field[[n, i]] = data(lat.t(n), lat.x(i));
        }
    }
}

/// Explicit leapfrog for `∂²φ + λφ³ = j` starting from the exact wave on the
/// first two sheets, with the exact wave as Dirichlet data.
pub fn solve_nonlinear(bg: &WaveBackground, j: &SourceField, lat: &Lattice1p1) -> Result<SolveReport> {
    check_background_fits(bg)?;
    lat.check_field(j.profile())?;
    let lambda = bg.lambda();
    let src = j.values();
    let mut field = lat.zeros();
    fill_initial_and_boundary(lat, &mut field, |t, x| bg.phi0(&FourVector::new(t, x, 0.0, 0.0)));
    leapfrog(lat, &mut field, |n, i, phi| -lambda * phi * phi * phi + src[[n, i]])?;

    let mut box_phi = dalembertian(&field, lat, Stencil::Leapfrog);
    Zip::from(&mut box_phi).and(&field).and(&src).for_each(|r, &phi, &s| {
        *r += lambda * phi * phi * phi - s;
    });
    let max_residual = max_abs_interior(&box_phi, 1);

    let e0 = quartic_energy(lat, lambda, &field.row(0).to_owned(), &field.row(1).to_owned());
    let mut drift = 0.0f64;
    for n in 1..lat.nt - 1 {
        let e = quartic_energy(lat, lambda, &field.row(n).to_owned(), &field.row(n + 1).to_owned());
        drift = drift.max((e - e0).abs());
    }
    Ok(SolveReport { field, max_residual, energy_drift: drift / e0.abs() })
}

/// Provenance of a lattice background.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackgroundKind {
    /// Exact `φ₀` sampled at the sites.
    Sampled,
    /// The lattice's own `j = 0` nonlinear trajectory.
    Evolved,
}

/// Background field on a lattice together with the coupling.
#[derive(Debug, Clone)]
pub struct LatticeBackground {
    lat: Lattice1p1,
    lambda: f64,
    field: Field,
    kind: BackgroundKind,
}

impl LatticeBackground {
    pub fn sampled(bg: &WaveBackground, lat: &Lattice1p1) -> Result<Self> {
        check_background_fits(bg)?;
        let field = lat.sample(|t, x| bg.phi0(&FourVector::new(t, x, 0.0, 0.0)));
        Ok(Self { lat: *lat, lambda: bg.lambda(), field, kind: BackgroundKind::Sampled })
    }

    pub fn evolved(bg: &WaveBackground, lat: &Lattice1p1) -> Result<Self> {
        let report = solve_nonlinear(bg, &SourceField::zero(lat), lat)?;
        Ok(Self { lat: *lat, lambda: bg.lambda(), field: report.field, kind: BackgroundKind::Evolved })
    }

    /// Arbitrary background values, e.g. for expression-level checks.
    pub fn from_field(lat: &Lattice1p1, lambda: f64, field: Field) -> Result<Self> {
        lat.check_field(&field)?;
        Ok(Self { lat: *lat, lambda, field, kind: BackgroundKind::Sampled })
    }

    pub fn lattice(&self) -> &Lattice1p1 {
        &self.lat
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn kind(&self) -> BackgroundKind {
        self.kind
    }

    /// `3λφ₀²`, the potential of the linearized operator.
    pub fn potential(&self) -> Field {
        self.field.mapv(|p| 3.0 * self.lambda * p * p)
    }
}

/// Retarded Green operator of `∂² + 3λφ₀²` with zero initial and Dirichlet data.
#[derive(Debug, Clone)]
pub struct RetardedGreen {
    lat: Lattice1p1,
    potential: Field,
}

impl RetardedGreen {
    pub fn new(background: &LatticeBackground) -> Self {
        Self { lat: background.lat, potential: background.potential() }
    }

    pub fn lattice(&self) -> &Lattice1p1 {
        &self.lat
    }

    /// Response `∫ C₁(x, w) s(w) d²w`; entries of `s` outside the source-capable
    /// sites are ignored.
    pub fn respond(&self, source: &Field) -> Result<Field> {
        self.lat.check_field(source)?;
        let mut field = self.lat.zeros();
        leapfrog(&self.lat, &mut field, |n, i, psi| -self.potential[[n, i]] * psi + source[[n, i]])?;
        Ok(field)
    }

    /// Evolution of the linear equation from prescribed data on sheets 0, 1 and
    /// on the boundary columns.
    pub fn evolve_from<F: Fn(f64, f64) -> f64>(&self, source: &Field, data: F) -> Result<Field> {
        self.lat.check_field(source)?;
        let mut field = self.lat.zeros();
        fill_initial_and_boundary(&self.lat, &mut field, data);
        leapfrog(&self.lat, &mut field, |n, i, psi| -self.potential[[n, i]] * psi + source[[n, i]])?;
        Ok(field)
    }
}

/// Advanced counterpart of [`RetardedGreen`]: zero data on the last two sheets,
/// evolved backwards.
#[derive(Debug, Clone)]
pub struct AdvancedGreen {
    lat: Lattice1p1,
    potential: Field,
}

impl AdvancedGreen {
    pub fn new(background: &LatticeBackground) -> Self {
        Self { lat: background.lat, potential: background.potential() }
    }

    pub fn lattice(&self) -> &Lattice1p1 {
        &self.lat
    }

    pub fn respond(&self, source: &Field) -> Result<Field> {
        self.lat.check_field(source)?;
        let mut field = self.lat.zeros();
        leapfrog_backward(&self.lat, &mut field, |n, i, psi| -self.potential[[n, i]] * psi + source[[n, i]])?;
        Ok(field)
    }
}

fn linear_report(lat: &Lattice1p1, field: Field, potential: &Field, source: &Field) -> SolveReport {
    let mut r = dalembertian(&field, lat, Stencil::Leapfrog);
    Zip::from(&mut r).and(&field).and(potential).and(source).for_each(|r, &f, &v, &s| {
        *r += v * f - s;
    });
    SolveReport { field, max_residual: max_abs_interior(&r, 1), energy_drift: 0.0 }
}

/// Retarded response of `∂² + 3λφ₀²` to `j`, linearized about the lattice's
/// own `j = 0` trajectory. With `j` a unit lattice delta this is a column of
/// the retarded `C₁`.
pub fn solve_linearized(bg: &WaveBackground, j: &SourceField, lat: &Lattice1p1) -> Result<SolveReport> {
    let background = LatticeBackground::evolved(bg, lat)?;
    solve_linearized_about(&background, j)
}

pub fn solve_linearized_about(background: &LatticeBackground, j: &SourceField) -> Result<SolveReport> {
    let green = RetardedGreen::new(background);
    let src = j.values();
    let field = green.respond(&src)?;
    Ok(linear_report(&background.lat, field, &green.potential, &src))
}

/// Result of a Richardson-extrapolated functional difference.
#[derive(Debug, Clone)]
pub struct FunctionalDerivative {
    pub field: Field,
    /// `max |T_k − T_{k−1}|` along the diagonal of the Richardson table.
    pub table_steps: Vec<f64>,
    /// Set when the table is not monotone (round-off dominates).
    pub warning: Option<String>,
}

fn difference_stencil(order: usize) -> Result<&'static [(f64, f64)]> {
    // (multiple of ε, weight) pairs; the result is divided by ε^order
    const D1: [(f64, f64); 2] = [(1.0, 0.5), (-1.0, -0.5)];
    const D2: [(f64, f64); 3] = [(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)];
    const D3: [(f64, f64); 4] = [(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)];
    match order {
        1 => Ok(&D1),
        2 => Ok(&D2),
        3 => Ok(&D3),
        _ => Err(Error::Parameter(format!("functional derivative order must be 1..=3, got {order}"))),
    }
}

/// Directional functional derivative `δᵏφ/δjᵏ · j⊗…⊗j` by centred differences
/// of [`solve_nonlinear`] in the amplitude of `j`, extrapolated in `ε²`.
pub fn functional_derivative(
    order: usize,
    j: &SourceField,
    bg: &WaveBackground,
    lat: &Lattice1p1,
    eps_list: &[f64],
) -> Result<FunctionalDerivative> {
    let stencil = difference_stencil(order)?;
    if eps_list.len() < 2 {
        return Err(Error::Parameter("Richardson extrapolation needs at least two amplitudes".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Parameter("amplitudes must be positive".into()));
    }
    let base = j.amplitude();
    let jobs: Vec<(usize, f64, f64)> = eps_list
        .iter()
        .enumerate()
        .flat_map(|(k, &e)| stencil.iter().map(move |&(mult, w)| (k, mult * e, w)))
        .collect();
    let solved = par::map_slice(&jobs, |&(_, s, _)| {
        let scaled = j.with_amplitude(base * s);
        solve_nonlinear(bg, &scaled, lat).map(|r| r.field)
    });
    let mut estimates: Vec<Field> = eps_list.iter().map(|_| lat.zeros()).collect();
    for ((k, _, w), field) in jobs.iter().zip(solved) {
        estimates[*k].scaled_add(*w, &field?);
    }
    for (est, &e) in estimates.iter_mut().zip(eps_list) {
        *est /= e.powi(order as i32);
    }
    Ok(richardson(estimates, eps_list))
}

/// Neville extrapolation to `ε → 0` of estimates with error series in `ε²`.
pub fn richardson(estimates: Vec<Field>, eps_list: &[f64]) -> FunctionalDerivative {
    let n = estimates.len();
    let mut table: Vec<Vec<Field>> = vec![estimates];
    for k in 1..n {
        let prev = &table[k - 1];
        let next: Vec<Field> = (k..n)
            .map(|i| {
                let ratio = (eps_list[i - k] / eps_list[i]).powi(2);
                let hi = &prev[i - (k - 1)];
                let lo = &prev[i - k];
                hi + &((hi - lo) / (ratio - 1.0))
            })
            .collect();
        table.push(next);
    }
    let diagonal: Vec<&Field> = (0..n).map(|k| &table[k][0]).collect();
    let steps: Vec<f64> = diagonal
        .windows(2)
        .map(|w| (w[1] - w[0]).iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .collect();
    let monotone = steps.windows(2).all(|w| w[1] <= w[0]);
    let warning = (!monotone).then(|| {
        format!("Richardson table is not monotone (steps {steps:?}); amplitudes may be too small")
    });
    let field = table[n - 1][0].clone();
    FunctionalDerivative { field, table_steps: steps, warning }
}
