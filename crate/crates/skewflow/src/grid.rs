//! Sample grids: the finite sets of (t, s, t0, x, v) tuples on which the
//! universally quantified definitions are checked.

use nalgebra::DVector;

use crate::error::{Result, SkewflowError};
use crate::rng::SplitMix64;

/// Times t >= s >= t0 >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeTriple {
    t: f64,
    s: f64,
    t0: f64,
}

impl TimeTriple {
    pub fn new(t: f64, s: f64, t0: f64) -> Result<Self> {
        let ok = t.is_finite() && s.is_finite() && t0.is_finite() && t >= s && s >= t0 && t0 >= 0.0;
        if !ok {
            return Err(SkewflowError::InvalidGrid(format!(
                "time triple must satisfy t >= s >= t0 >= 0, got ({t}, {s}, {t0})"
            )));
        }
        Ok(Self { t, s, t0 })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// t - s.
    pub fn span(&self) -> f64 {
        self.t - self.s
    }

    /// s - t0.
    pub fn offset(&self) -> f64 {
        self.s - self.t0
    }
}

/// Axis lists from which a structured grid is built as a cross product.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub t0: Vec<f64>,
    pub dt: Vec<f64>,
    pub s_offsets: Vec<f64>,
    pub shifts: Vec<f64>,
    pub n_random_vectors: usize,
}

impl Default for GridSpec {
    /// Mixes short and long horizons; exponential-vs-polynomial distinctions
    /// appear at the long end.
    fn default() -> Self {
        Self {
            t0: vec![0.0, 1.0],
            dt: vec![0.0, 0.25, 1.0, 5.0, 20.0],
            s_offsets: vec![0.0, 1.0, 5.0],
            shifts: vec![0.0, 1.0, 10.0],
            n_random_vectors: 16,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        let nonneg = |vals: &[f64], name: &str| -> Result<()> {
            if vals.is_empty() {
                return Err(SkewflowError::InvalidGrid(format!("{name} axis is empty")));
            }
            for &v in vals {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(SkewflowError::InvalidGrid(format!(
                        "{name} value {v} must be finite and >= 0"
                    )));
                }
            }
            Ok(())
        };
        nonneg(&self.t0, "t0")?;
        nonneg(&self.dt, "dt")?;
        nonneg(&self.s_offsets, "s_offsets")?;
        nonneg(&self.shifts, "shifts")
    }

    /// A copy with midpoints inserted between consecutive distinct axis
    /// values and the random vector count doubled.
    fn refined(&self) -> GridSpec {
        GridSpec {
            t0: self.t0.clone(),
            dt: with_midpoints(&self.dt),
            s_offsets: with_midpoints(&self.s_offsets),
            shifts: with_midpoints(&self.shifts),
            n_random_vectors: self.n_random_vectors * 2,
        }
    }
}

fn with_midpoints(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let mut out = Vec::with_capacity(sorted.len() * 2);
    for w in sorted.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    if let Some(&last) = sorted.last() {
        out.push(last);
    }
    out
}

/// How a grid was produced; refinement needs to know.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GridOrigin {
    Spec(GridSpec),
    Random { samples: usize },
    Manual,
}

/// A finite set of sample tuples: time triples crossed with initial-state
/// shifts and test vectors.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    triples: Vec<TimeTriple>,
    shifts: Vec<f64>,
    vectors: Vec<DVector<f64>>,
    seed: u64,
    dim: usize,
    origin: GridOrigin,
}

impl SampleGrid {
    /// Structured grid: for each (t0, s_offset, dt) the triple
    /// (t0 + s_offset + dt, t0 + s_offset, t0); vectors are the coordinate
    /// basis plus seeded random vectors.
    pub fn from_spec(spec: &GridSpec, dim: usize, seed: u64) -> Result<Self> {
        spec.validate()?;
        if dim == 0 {
            return Err(SkewflowError::InvalidGrid("dimension must be >= 1".into()));
        }
        let mut triples = Vec::with_capacity(spec.t0.len() * spec.s_offsets.len() * spec.dt.len());
        for &t0 in &spec.t0 {
            for &off in &spec.s_offsets {
                for &dt in &spec.dt {
                    let s = t0 + off;
                    triples.push(TimeTriple::new(s + dt, s, t0)?);
                }
            }
        }
        let mut rng = SplitMix64::new(seed);
        let vectors = test_vectors(dim, spec.n_random_vectors, &mut rng);
        Ok(Self {
            triples,
            shifts: spec.shifts.clone(),
            vectors,
            seed,
            dim,
            origin: GridOrigin::Spec(spec.clone()),
        })
    }

    /// Randomized grid with roughly `n_samples` (triple, shift) tuples drawn
    /// from the dyadic time lattice, so shift arithmetic stays exact.
    ///
    /// Ranges: t0 in [0, 5], s - t0 in [0, 10], t - s in [0, 15],
    /// shifts in [0, 10].
    pub fn random(n_samples: usize, dim: usize, seed: u64) -> Self {
        let n_shifts = 4usize;
        let n_triples = n_samples.div_ceil(n_shifts).max(1);
        let mut rng = SplitMix64::new(seed);
        let mut triples = Vec::with_capacity(n_triples);
        for _ in 0..n_triples {
            let t0 = rng.dyadic(5.0);
            let s = t0 + rng.dyadic(10.0);
            let t = s + rng.dyadic(15.0);
            triples.push(TimeTriple { t, s, t0 });
        }
        let shifts: Vec<f64> = (0..n_shifts).map(|_| rng.dyadic(10.0)).collect();
        let vectors = test_vectors(dim, 16, &mut rng);
        Self {
            triples,
            shifts,
            vectors,
            seed,
            dim,
            origin: GridOrigin::Random { samples: n_samples },
        }
    }

    /// Grid from explicit parts; not refinable.
    pub fn manual(
        triples: Vec<TimeTriple>,
        shifts: Vec<f64>,
        vectors: Vec<DVector<f64>>,
        seed: u64,
    ) -> Self {
        let dim = vectors.first().map_or(1, DVector::len);
        Self {
            triples,
            shifts,
            vectors,
            seed,
            dim,
            origin: GridOrigin::Manual,
        }
    }

    pub fn triples(&self) -> &[TimeTriple] {
        &self.triples
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> &GridOrigin {
        &self.origin
    }

    pub fn max_span(&self) -> f64 {
        self.triples
            .iter()
            .fold(0.0f64, |acc, tr| acc.max(tr.span()))
    }

    /// Number of (triple, shift) samples.
    pub fn sample_count(&self) -> usize {
        self.triples.len() * self.shifts.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.triples.is_empty() {
            return Err(SkewflowError::EmptyGrid("no time triples"));
        }
        if self.shifts.is_empty() {
            return Err(SkewflowError::EmptyGrid("no initial-state shifts"));
        }
        Ok(())
    }

    /// Has at least one pair with t > s.
    pub fn has_positive_span(&self) -> bool {
        self.triples.iter().any(|tr| tr.span() > 0.0)
    }

    /// Same time tuples and vectors, one initial state.
    pub fn restricted_to_shift(&self, shift: f64) -> SampleGrid {
        SampleGrid {
            triples: self.triples.clone(),
            shifts: vec![shift],
            vectors: self.vectors.clone(),
            seed: self.seed,
            dim: self.dim,
            origin: GridOrigin::Manual,
        }
    }

    /// Keep only triples with t - s >= min_span.
    pub fn with_min_span(&self, min_span: f64) -> SampleGrid {
        SampleGrid {
            triples: self
                .triples
                .iter()
                .copied()
                .filter(|tr| tr.span() >= min_span)
                .collect(),
            shifts: self.shifts.clone(),
            vectors: self.vectors.clone(),
            seed: self.seed,
            dim: self.dim,
            origin: GridOrigin::Manual,
        }
    }

    /// The same time range at doubled density: midpoints on every axis for
    /// structured grids, doubled sample count for random grids.
    pub fn refined_double(&self) -> Result<SampleGrid> {
        match &self.origin {
            GridOrigin::Spec(spec) => SampleGrid::from_spec(&spec.refined(), self.dim, self.seed),
            GridOrigin::Random { samples } => {
                Ok(SampleGrid::random(samples * 2, self.dim, self.seed))
            }
            GridOrigin::Manual => Err(SkewflowError::InvalidGrid(
                "manual grids cannot be refined; build from a GridSpec".into(),
            )),
        }
    }

    /// Compact, serializable description.
    pub fn summary(&self) -> GridSummary {
        GridSummary {
            origin: self.origin.clone(),
            triples: self.triples.len(),
            shifts: self.shifts.len(),
            vectors: self.vectors.len(),
            max_span: self.max_span(),
            seed: self.seed,
        }
    }
}

fn test_vectors(dim: usize, n_random: usize, rng: &mut SplitMix64) -> Vec<DVector<f64>> {
    let mut vectors = Vec::with_capacity(dim + n_random);
    for i in 0..dim {
        let mut e = DVector::zeros(dim);
        e[i] = 1.0;
        vectors.push(e);
    }
    for _ in 0..n_random {
        loop {
            let v = DVector::from_iterator(dim, (0..dim).map(|_| rng.uniform(-1.0, 1.0)));
            if v.iter().map(|a| a.abs()).sum::<f64>() > 1e-3 {
                vectors.push(v);
                break;
            }
        }
    }
    vectors
}

/// Serializable echo of the grid a certificate was checked on.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSummary {
    pub origin: GridOrigin,
    pub triples: usize,
    pub shifts: usize,
    pub vectors: usize,
    pub max_span: f64,
    pub seed: u64,
}
