//! Moments and cumulants on a finite point set, the Gaussian-closure test, and
//! a Monte-Carlo Gaussian sampler used as an oracle for both.
//!
//! Functions of `n` points are keyed by the sorted tuple of point indices, so
//! permutation symmetry holds by construction and coincident points are
//! repeated indices.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;

/// Largest order handled by the combinatorics.
pub const MAX_ORDER: usize = 6;

/// All set partitions of `{0, …, n−1}`, each block sorted, blocks ordered by
/// their smallest element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn grow(k: usize, n: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if k == n {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].push(k);
            grow(k + 1, n, current, out);
            current[b].pop();
        }
        current.push(vec![k]);
        grow(k + 1, n, current, out);
        current.pop();
    }
    let mut out = Vec::new();
    grow(0, n, &mut Vec::new(), &mut out);
    out
}

/// Bell numbers by the Bell triangle.
pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().expect("nonempty")];
        for &v in &row {
            let last = *next.last().expect("nonempty");
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// All sorted index tuples of length `len` over `0..points`.
pub fn multisets(points: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, points: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..points {
            cur.push(i);
            rec(i, points, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, points, len, &mut Vec::new(), &mut out);
    out
}

fn sorted(idx: &[usize]) -> Vec<usize> {
    let mut k = idx.to_vec();
    k.sort_unstable();
    k
}

/// Labels of the sample points `x₁ … x_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointSet {
    labels: Vec<String>,
}

impl PointSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_ORDER {
            return Err(Error::Parameter(format!("point set needs 1..={MAX_ORDER} points, got {}", labels.len())));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::Parameter(format!("duplicate point label {a}")));
            }
        }
        Ok(Self { labels })
    }

    /// Points labelled `x1 … xn`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("x{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

macro_rules! symmetric_table {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, Serialize)]
        pub struct $name {
            points: usize,
            max_order: usize,
            values: BTreeMap<Vec<usize>, f64>,
        }

        impl $name {
            /// Empty table; absent entries read as zero.
            pub fn new(points: usize, max_order: usize) -> Result<Self> {
                if points == 0 || max_order == 0 || max_order > MAX_ORDER {
                    return Err(Error::Parameter(format!(
                        "need points >= 1 and 1 <= order <= {MAX_ORDER}, got {points} points, order {max_order}"
                    )));
                }
                Ok(Self { points, max_order, values: BTreeMap::new() })
            }

            pub fn points(&self) -> usize {
                self.points
            }

            pub fn max_order(&self) -> usize {
                self.max_order
            }

            pub fn set(&mut self, idx: &[usize], value: f64) -> Result<()> {
                if idx.is_empty() || idx.len() > self.max_order {
                    return Err(Error::Capability(format!(
                        "order {} outside 1..={}",
                        idx.len(),
                        self.max_order
                    )));
                }
                if let Some(&bad) = idx.iter().find(|&&i| i >= self.points) {
                    return Err(Error::Parameter(format!("point index {bad} out of range")));
                }
                self.values.insert(sorted(idx), value);
                Ok(())
            }

            pub fn get(&self, idx: &[usize]) -> f64 {
                self.values.get(&sorted(idx)).copied().unwrap_or(0.0)
            }

            pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &f64)> {
                self.values.iter()
            }

            /// Every sorted tuple of the given order with its value.
            pub fn order(&self, n: usize) -> Vec<(Vec<usize>, f64)> {
                multisets(self.points, n).into_iter().map(|k| { let v = self.get(&k); (k, v) }).collect()
            }

            /// JSON object keyed by comma-joined sorted index tuples.
            pub fn to_json(&self) -> serde_json::Value {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .values
                    .iter()
                    .map(|(k, v)| {
                        let key = k.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
                        (key, serde_json::json!(v))
                    })
                    .collect();
                serde_json::Value::Object(map)
            }
        }
    };
}

symmetric_table!(CumulantSet, "Connected functions `G_n(x_{i₁}, …)`.");
symmetric_table!(MomentSet, "Schwinger functions `S_n(x_{i₁}, …)`.");

fn partition_sum<F: Fn(&[usize]) -> f64>(idx: &[usize], f: F) -> f64 {
    set_partitions(idx.len())
        .iter()
        .map(|p| {
            p.iter()
                .map(|block| f(&block.iter().map(|&k| idx[k]).collect::<Vec<_>>()))
                .product::<f64>()
        })
        .sum()
}

/// `S(x_I) = Σ_π Π_{B∈π} G(x_B)` for every tuple of the point set up to `order`.
pub fn moments_from_cumulants(g: &CumulantSet, pts: &PointSet, order: usize) -> Result<MomentSet> {
    if order > g.max_order {
        return Err(Error::Capability(format!(
            "moments of order {order} need cumulants up to {order}, have {}",
            g.max_order
        )));
    }
    if pts.len() != g.points {
        return Err(Error::Shape(format!("{} points given, cumulants cover {}", pts.len(), g.points)));
    }
    let mut s = MomentSet::new(g.points, order)?;
    for n in 1..=order {
        for idx in multisets(g.points, n) {
            let v = partition_sum(&idx, |b| g.get(b));
            s.set(&idx, v)?;
        }
    }
    Ok(s)
}

/// Möbius inversion `G(x_I) = Σ_π (−1)^{|π|−1} (|π|−1)! Π_{B∈π} S(x_B)`.
pub fn cumulants_from_moments(s: &MomentSet, pts: &PointSet, order: usize) -> Result<CumulantSet> {
    if order > s.max_order {
        return Err(Error::Capability(format!(
            "cumulants of order {order} need moments up to {order}, have {}",
            s.max_order
        )));
    }
    if pts.len() != s.points {
        return Err(Error::Shape(format!("{} points given, moments cover {}", pts.len(), s.points)));
    }
    let factorial = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    let mut g = CumulantSet::new(s.points, order)?;
    for n in 1..=order {
        for idx in multisets(s.points, n) {
            let v: f64 = set_partitions(n)
                .iter()
                .map(|p| {
                    let k = p.len();
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    let prod: f64 = p
                        .iter()
                        .map(|block| s.get(&block.iter().map(|&j| idx[j]).collect::<Vec<_>>()))
                        .product();
                    sign * factorial(k - 1) * prod
                })
                .sum();
            g.set(&idx, v)?;
        }
    }
    Ok(g)
}

/// Outcome of [`gaussian_closure_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub gaussian: bool,
    /// Stored entries of order `> 2` exceeding the tolerance.
    pub violations: Vec<(Vec<usize>, f64)>,
}

/// Gaussian iff every stored cumulant of order above two vanishes within `tol`.
pub fn gaussian_closure_check(g: &CumulantSet, tol: f64) -> ClosureReport {
    let violations: Vec<(Vec<usize>, f64)> = g
        .entries()
        .filter(|(k, v)| k.len() > 2 && v.abs() > tol)
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    ClosureReport { gaussian: violations.is_empty(), violations }
}

/// Multivariate normal sampler `x = μ + L z` with `Σ = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
}

impl GaussianSampler {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::Shape(format!("mean has {n} entries, covariance is {:?}", cov.shape())));
        }
        if n == 0 || n > MAX_ORDER {
            return Err(Error::Parameter(format!("dimension must be 1..={MAX_ORDER}, got {n}")));
        }
        let chol = nalgebra::Cholesky::new(cov.clone())
            .ok_or_else(|| Error::Parameter("covariance is not positive definite".into()))?
            .l();
        Ok(Self { mean, cov, chol })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Exact cumulants: `G₁ = μ`, `G₂ = Σ`, nothing above.
    pub fn cumulants(&self) -> CumulantSet {
        let n = self.dim();
        let mut g = CumulantSet::new(n, 2).expect("valid dimension");
        for i in 0..n {
            g.set(&[i], self.mean[i]).expect("in range");
            for j in i..n {
                g.set(&[i, j], self.cov[(i, j)]).expect("in range");
            }
        }
        g
    }

    /// Raw power sums `Σ x_{i₁}…x_{i_k}` over all sorted tuples up to order 4,
    /// split over `shards` independent ChaCha streams of one seed.
    pub fn sample(&self, draws: usize, seed: u64, shards: usize) -> Result<ShardedMoments> {
        const ORDER: usize = 4;
        if shards < 2 || draws < shards {
            return Err(Error::Parameter(format!("need shards >= 2 and draws >= shards, got {draws} / {shards}")));
        }
        let n = self.dim();
        let keys: Vec<Vec<usize>> = (1..=ORDER).flat_map(|k| multisets(n, k)).collect();
        let per_shard = |s: usize| draws / shards + usize::from(s < draws % shards);
        let sums = par::map_range(shards, |s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let mut acc = vec![0.0f64; keys.len()];
            let mut z = DVector::<f64>::zeros(n);
            for _ in 0..per_shard(s) {
                for v in z.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                let x = &self.mean + &self.chol * &z;
                for (a, key) in acc.iter_mut().zip(&keys) {
                    *a += key.iter().map(|&i| x[i]).product::<f64>();
                }
            }
            acc
        });
        let counts = (0..shards).map(per_shard).collect();
        Ok(ShardedMoments { dim: n, order: ORDER, keys, sums, counts })
    }
}

/// Per-shard power sums from [`GaussianSampler::sample`].
#[derive(Debug, Clone)]
pub struct ShardedMoments {
    dim: usize,
    order: usize,
    keys: Vec<Vec<usize>>,
    sums: Vec<Vec<f64>>,
    counts: Vec<usize>,
}

/// Estimate with a batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `|value − expected| / stderr`.
    pub fn z_score(&self, expected: f64) -> f64 {
        (self.value - expected).abs() / self.stderr
    }
}

impl ShardedMoments {
    pub fn total_draws(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn shards(&self) -> usize {
        self.counts.len()
    }

    fn moments_of(&self, sums: &[f64], count: usize) -> MomentSet {
        let mut s = MomentSet::new(self.dim, self.order).expect("valid");
        for (k, v) in self.keys.iter().zip(sums) {
            s.set(k, v / count as f64).expect("in range");
        }
        s
    }

    /// Moments of all draws, merged in shard order.
    pub fn pooled(&self) -> MomentSet {
        let mut total = vec![0.0; self.keys.len()];
        for sh in &self.sums {
            for (t, v) in total.iter_mut().zip(sh) {
                *t += v;
            }
        }
        self.moments_of(&total, self.total_draws())
    }

    fn batch<F: Fn(&MomentSet) -> BTreeMap<Vec<usize>, f64>>(&self, pooled: BTreeMap<Vec<usize>, f64>, f: F) -> BTreeMap<Vec<usize>, Estimate> {
        let per: Vec<BTreeMap<Vec<usize>, f64>> =
            self.sums.iter().zip(&self.counts).map(|(s, &c)| f(&self.moments_of(s, c))).collect();
        let b = per.len() as f64;
        pooled
            .into_iter()
            .map(|(k, value)| {
                let mean = per.iter().map(|m| m[&k]).sum::<f64>() / b;
                let var = per.iter().map(|m| (m[&k] - mean).powi(2)).sum::<f64>() / (b - 1.0);
                (k, Estimate { value, stderr: (var / b).sqrt() })
            })
            .collect()
    }

    /// Pooled moments with standard errors from the spread across shards.
    pub fn moment_estimates(&self) -> BTreeMap<Vec<usize>, Estimate> {
        let pooled = self.pooled().values.clone();
        self.batch(pooled, |m| m.values.clone())
    }

    /// Empirical cumulants with batch standard errors.
    pub fn cumulant_estimates(&self) -> BTreeMap<Vec<usize>, Estimate> {
        let pts = PointSet::numbered(self.dim).expect("valid");
        let to_g = |m: &MomentSet| cumulants_from_moments(m, &pts, self.order).expect("consistent").values;
        let pooled = to_g(&self.pooled());
        self.batch(pooled, to_g)
    }
}

/// Summary of the Monte-Carlo Gaussian oracle.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianSamplingReport {
    pub draws: usize,
    pub seed: u64,
    pub max_z_g3: f64,
    pub max_z_g4: f64,
    /// `|S₄ − Wick| / σ` maximized over all fourth-order tuples.
    pub max_z_s4: f64,
    pub max_z_s3: f64,
}

impl GaussianSamplingReport {
    pub fn within(&self, sigmas: f64) -> bool {
        [self.max_z_g3, self.max_z_g4, self.max_z_s3, self.max_z_s4].iter().all(|z| *z < sigmas)
    }
}

/// Samples the Gaussian and compares empirical `G₃`, `G₄` against zero and
/// empirical `S₃`, `S₄` against the prediction of [`moments_from_cumulants`]
/// with `G_{>2} = 0`.
pub fn gaussian_sampling_check(sampler: &GaussianSampler, draws: usize, seed: u64, shards: usize) -> Result<GaussianSamplingReport> {
    let sample = sampler.sample(draws, seed, shards)?;
    let pts = PointSet::numbered(sampler.dim())?;
    let mut exact = CumulantSet::new(sampler.dim(), 4)?;
    for (k, v) in sampler.cumulants().entries() {
        exact.set(k, *v)?;
    }
    let wick = moments_from_cumulants(&exact, &pts, 4)?;
    let g = sample.cumulant_estimates();
    let s = sample.moment_estimates();
    let max_z = |map: &BTreeMap<Vec<usize>, Estimate>, order: usize, expected: &dyn Fn(&[usize]) -> f64| {
        map.iter()
            .filter(|(k, _)| k.len() == order)
            .map(|(k, e)| e.z_score(expected(k)))
            .fold(0.0f64, f64::max)
    };
    Ok(GaussianSamplingReport {
        draws: sample.total_draws(),
        seed,
        max_z_g3: max_z(&g, 3, &|_| 0.0),
        max_z_g4: max_z(&g, 4, &|_| 0.0),
        max_z_s3: max_z(&s, 3, &|k| wick.get(k)),
        max_z_s4: max_z(&s, 4, &|k| wick.get(k)),
    })
}
