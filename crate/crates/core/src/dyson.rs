//! The first four Dyson-Schwinger equations of the massless quartic theory as
//! residual functionals on a lattice, and their classical limit.
//!
//! A connected function with `m` copies of the field point `x` and a subset
//! `S` of the external points is stored as a field over `x`, keyed by
//! `(m, S)`; `S` is a bit mask over the externals `y, z, w`. So `(1, ∅)` is
//! `G₁(x)`, `(1, {y})` is `G₂(x, y)`, `(2, ∅)` is `G₂(x, x)` and `(2, {y})`
//! is `G₃(x, x, y)`. Absent entries are the zero kernel.

use std::collections::BTreeMap;

use ndarray::Zip;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::{hierarchy_residual_field, ExternalKernels};
use crate::lattice::{dalembertian, max_abs_interior, Field, Lattice1p1, Stencil};

const Y: u8 = 1;
const Z: u8 = 2;
const W: u8 = 4;

/// `coefficient · Π G(m_i, S_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsTerm {
    pub coefficient: i64,
    pub factors: Vec<(u8, u8)>,
}

impl DsTerm {
    fn new(coefficient: i64, factors: &[(u8, u8)]) -> Self {
        let mut factors = factors.to_vec();
        factors.sort_unstable();
        Self { coefficient, factors }
    }

    /// Whether any factor has two or more coincident field points.
    pub fn is_coincident(&self) -> bool {
        self.factors.iter().any(|&(m, _)| m >= 2)
    }
}

/// Which version of the fourth equation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DsForm {
    #[default]
    Complete,
    /// Without the three `G₃(x,x,·) G₃(x,·,·)` products.
    WithoutG3Products,
}

/// Terms inside `λ[…]` of equation `eq` (1..=4).
pub fn ds_terms(eq: usize, form: DsForm) -> Result<Vec<DsTerm>> {
    let t = DsTerm::new;
    let terms = match eq {
        1 => vec![t(1, &[(1, 0), (1, 0), (1, 0)]), t(3, &[(2, 0), (1, 0)]), t(1, &[(3, 0)])],
        2 => vec![
            t(3, &[(1, 0), (1, 0), (1, Y)]),
            t(3, &[(2, 0), (1, Y)]),
            t(3, &[(2, Y), (1, 0)]),
            t(1, &[(3, Y)]),
        ],
        3 => vec![
            t(6, &[(1, 0), (1, Y), (1, Z)]),
            t(3, &[(1, 0), (1, 0), (1, Y | Z)]),
            t(3, &[(1, Z), (2, Y)]),
            t(3, &[(1, Y), (2, Z)]),
            t(3, &[(2, 0), (1, Y | Z)]),
            t(3, &[(1, 0), (2, Y | Z)]),
            t(1, &[(3, Y | Z)]),
        ],
        4 => {
            let mut v = vec![
                t(6, &[(1, Y), (1, Z), (1, W)]),
                t(6, &[(1, 0), (1, Y), (1, Z | W)]),
                t(6, &[(1, 0), (1, Z), (1, Y | W)]),
                t(6, &[(1, 0), (1, W), (1, Y | Z)]),
                t(3, &[(1, 0), (1, 0), (1, Y | Z | W)]),
                t(3, &[(1, Y), (2, Z | W)]),
                t(3, &[(1, Z), (2, Y | W)]),
                t(3, &[(1, W), (2, Y | Z)]),
                t(3, &[(2, 0), (1, Y | Z | W)]),
                t(3, &[(1, 0), (2, Y | Z | W)]),
                t(1, &[(3, Y | Z | W)]),
            ];
            if form == DsForm::Complete {
                v.push(t(3, &[(2, Y), (1, Z | W)]));
                v.push(t(3, &[(2, Z), (1, Y | W)]));
                v.push(t(3, &[(2, W), (1, Y | Z)]));
            }
            v
        }
        _ => return Err(Error::Parameter(format!("equations 1..=4 are available, got {eq}"))),
    };
    Ok(terms)
}

/// Connected functions as lattice fields over `x`, keyed by `(m, S)`.
#[derive(Debug, Clone)]
pub struct DsKernels {
    lat: Lattice1p1,
    fields: BTreeMap<(u8, u8), Field>,
    sources: BTreeMap<usize, Field>,
}

impl DsKernels {
    pub fn new(lat: &Lattice1p1) -> Self {
        Self { lat: *lat, fields: BTreeMap::new(), sources: BTreeMap::new() }
    }

    pub fn lattice(&self) -> &Lattice1p1 {
        &self.lat
    }

    pub fn insert(&mut self, copies: u8, externals: u8, field: Field) -> Result<()> {
        if !(1..=3).contains(&copies) || externals > 0b111 {
            return Err(Error::Parameter(format!("bad key ({copies}, {externals})")));
        }
        self.lat.check_field(&field)?;
        self.fields.insert((copies, externals), field);
        Ok(())
    }

    /// Inhomogeneity `δ(x − y)` (or its contraction) of the second equation.
    pub fn set_source(&mut self, source: Field) -> Result<()> {
        self.lat.check_field(&source)?;
        self.sources.insert(0, source);
        Ok(())
    }

    pub fn get(&self, copies: u8, externals: u8) -> Option<&Field> {
        self.fields.get(&(copies, externals))
    }

    /// `G_{1+|S|}(x, S) = K_S` from classical kernels, with no coincident entries.
    pub fn from_classical(kernels: &ExternalKernels, externals: usize) -> Result<Self> {
        let mut ds = Self::new(kernels.lattice());
        let full = ((1u16 << externals) - 1) as u8;
        for mask in 0..=full {
            if mask & !full == 0 {
                if let Ok(k) = kernels.kernel(mask) {
                    ds.insert(1, mask, k.clone())?;
                }
            }
        }
        if let Some(s) = kernels.source(0) {
            ds.set_source(s.clone())?;
        }
        Ok(ds)
    }

    /// Classical kernels `K_S = G(1, S)`; `G₁` must be present.
    pub fn to_classical(&self, lambda: f64) -> Result<ExternalKernels> {
        let phi0 = self
            .get(1, 0)
            .ok_or_else(|| Error::Capability("G1 is required".into()))?
            .clone();
        let mut ek = ExternalKernels::new(&self.lat, lambda, phi0)?;
        for (&(m, s), f) in &self.fields {
            if m == 1 && s != 0 {
                ek.insert(s, f.clone())?;
            }
        }
        if let Some(s) = self.sources.get(&0) {
            ek.set_source(0, s.clone())?;
        }
        Ok(ek)
    }
}

/// Pointwise residual of equation `eq`. With `drop_coincident`, every term
/// containing a function with two or more copies of `x` is removed, which
/// also removes the `G₂(x, x)` correction.
pub fn ds_residual_field(
    eq: usize,
    kernels: &DsKernels,
    lambda: f64,
    drop_coincident: bool,
    form: DsForm,
) -> Result<Field> {
    let terms = ds_terms(eq, form)?;
    let lat = kernels.lat;
    let lead_mask = ((1u16 << (eq - 1)) - 1) as u8;
    let lead = kernels.get(1, lead_mask).cloned().unwrap_or_else(|| lat.zeros());
    let stencil = Stencil::Leapfrog;
    let mut r = dalembertian(&lead, &lat, stencil);
    let mut bracket = lat.zeros();
    for term in terms.iter().filter(|t| !(drop_coincident && t.is_coincident())) {
        let mut prod = lat.zeros();
        prod.fill(term.coefficient as f64);
        let mut zero = false;
        for &(m, s) in &term.factors {
            match kernels.get(m, s) {
                Some(f) => prod *= f,
                None => {
                    zero = true;
                    break;
                }
            }
        }
        if !zero {
            bracket += &prod;
        }
    }
    r.scaled_add(lambda, &bracket);
    if eq == 2 {
        if let Some(s) = kernels.sources.get(&0) {
            r -= s;
        }
    }
    let (nt, nx) = r.dim();
    for ((n, i), v) in r.indexed_iter_mut() {
        if n == 0 || i == 0 || n + 1 >= nt || i + 1 >= nx {
            *v = 0.0;
        }
    }
    Ok(r)
}

/// Max interior value of [`ds_residual_field`] for the complete equations.
pub fn ds_residual(eq: usize, kernels: &DsKernels, lambda: f64, drop_coincident: bool) -> Result<f64> {
    let r = ds_residual_field(eq, kernels, lambda, drop_coincident, DsForm::Complete)?;
    Ok(max_abs_interior(&r, 1))
}

/// Per-equation comparison of the classical-limit DS residual against the
/// hierarchy residual of one order lower.
#[derive(Debug, Clone, Serialize)]
pub struct MappingReport {
    pub max_deviation: Vec<f64>,
    pub scale: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// For each `eq` in `1..=equations`, `max_x |DS_eq(x) − H_{eq−1}(x)|` with
/// coincident terms dropped. This is an identity of expressions, so it holds
/// for arbitrary kernels.
pub fn classical_mapping_check(kernels: &DsKernels, lambda: f64, equations: usize, tol: f64) -> Result<MappingReport> {
    if !(1..=4).contains(&equations) {
        return Err(Error::Parameter(format!("equations must be 1..=4, got {equations}")));
    }
    let ek = kernels.to_classical(lambda)?;
    let mut max_deviation = Vec::new();
    let mut scale = Vec::new();
    for eq in 1..=equations {
        let ds = ds_residual_field(eq, kernels, lambda, true, DsForm::Complete)?;
        let h = hierarchy_residual_field(eq - 1, &ek, Stencil::Leapfrog)?;
        let dev = Zip::from(&ds).and(&h).fold(0.0f64, |m, a, b| m.max((a - b).abs()));
        max_deviation.push(dev);
        scale.push(max_abs_interior(&h, 1));
    }
    let passed = max_deviation.iter().all(|d| *d <= tol);
    Ok(MappingReport { max_deviation, scale, tolerance: tol, passed })
}
