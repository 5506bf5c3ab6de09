//! Projector families on the fibers {x} x V and their compatibility with a
//! skew-evolution system: partition of identity, mutual annihilation, and
//! intertwining with the cocycle.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::dynamics::{AxiomReport, NamedResidual, SamplePoint, SkewEvolutionSystem};
use crate::error::{Result, SkewflowError};
use crate::exec::sweep_map;
use crate::grid::SampleGrid;
use crate::operator::{idempotence_residual, l1_norm, max_abs, rank, Operator, RANK_SVD_TOL};
use crate::profile::StateProfile;

type StateMap = dyn Fn(&StateProfile) -> Operator + Send + Sync;

/// How the projector at a state is produced.
#[derive(Clone)]
pub enum ProjectorKind {
    /// Diagonal 0/1 matrix with ones at the given coordinates.
    Coordinate(Vec<usize>),
    /// A constant matrix, independent of the state.
    Matrix(Operator),
    /// Arbitrary state-dependent projector, sampled like everything else.
    StateDependent(Arc<StateMap>),
}

impl fmt::Debug for ProjectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectorKind::Coordinate(ix) => write!(f, "Coordinate({ix:?})"),
            ProjectorKind::Matrix(m) => write!(f, "Matrix({} x {})", m.nrows(), m.ncols()),
            ProjectorKind::StateDependent(_) => write!(f, "StateDependent(..)"),
        }
    }
}

/// One projector family P_k.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    label: usize,
    dim: usize,
    kind: ProjectorKind,
}

impl ProjectorFamily {
    pub fn coordinate(label: usize, dim: usize, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= dim {
                return Err(SkewflowError::InvalidFamilySet(format!(
                    "coordinate index {i} out of range for dimension {dim}"
                )));
            }
        }
        Ok(Self {
            label,
            dim,
            kind: ProjectorKind::Coordinate(indices.to_vec()),
        })
    }

    pub fn constant(label: usize, matrix: Operator) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(SkewflowError::InvalidFamilySet(format!(
                "projector matrix must be square and nonempty, got {} x {}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            label,
            dim: matrix.nrows(),
            kind: ProjectorKind::Matrix(matrix),
        })
    }

    /// The zero family; P_3 = 0 turns a trichotomy reading into a dichotomy.
    pub fn zero(label: usize, dim: usize) -> Self {
        Self {
            label,
            dim,
            kind: ProjectorKind::Matrix(Operator::zeros(dim, dim)),
        }
    }

    pub fn state_dependent<F>(label: usize, dim: usize, eval: F) -> Self
    where
        F: Fn(&StateProfile) -> Operator + Send + Sync + 'static,
    {
        Self {
            label,
            dim,
            kind: ProjectorKind::StateDependent(Arc::new(eval)),
        }
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// P_k(x).
    pub fn at(&self, x: &StateProfile) -> Operator {
        match &self.kind {
            ProjectorKind::Coordinate(indices) => {
                let mut m = Operator::zeros(self.dim, self.dim);
                for &i in indices {
                    m[(i, i)] = 1.0;
                }
                m
            }
            ProjectorKind::Matrix(m) => m.clone(),
            ProjectorKind::StateDependent(f) => f(x),
        }
    }
}

/// A set of two or three projector families tied to a system.
#[derive(Debug, Clone)]
pub struct CompatibleFamilySet {
    system: SkewEvolutionSystem,
    families: Vec<ProjectorFamily>,
}

impl CompatibleFamilySet {
    pub fn new(system: SkewEvolutionSystem, families: Vec<ProjectorFamily>) -> Result<Self> {
        if !(2..=3).contains(&families.len()) {
            return Err(SkewflowError::InvalidFamilySet(format!(
                "expected 2 or 3 projector families, got {}",
                families.len()
            )));
        }
        for fam in &families {
            if fam.dim() != system.dim() {
                return Err(SkewflowError::DimensionMismatch {
                    expected: system.dim(),
                    got: fam.dim(),
                });
            }
        }
        Ok(Self { system, families })
    }

    pub fn system(&self) -> &SkewEvolutionSystem {
        &self.system
    }

    pub fn families(&self) -> &[ProjectorFamily] {
        &self.families
    }

    pub fn family_count(&self) -> usize {
        self.families.len()
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }
}

/// Check idempotence, partition of identity and mutual annihilation over the
/// sampled states.
pub fn check_family_algebra(
    set: &CompatibleFamilySet,
    grid: &SampleGrid,
    tol: f64,
) -> Result<AxiomReport> {
    grid.validate()?;
    let shifts: Vec<f64> = grid.shifts().to_vec();
    let dim = set.dim();
    let eye = Operator::identity(dim, dim);

    let results = sweep_map(&shifts, |&shift| -> Result<(SamplePoint, f64, f64, f64)> {
        let x = set.system().state(shift)?;
        let point = SamplePoint {
            t: 0.0,
            s: 0.0,
            t0: 0.0,
            shift,
        };
        let projectors: Vec<Operator> = set.families().iter().map(|f| f.at(&x)).collect();

        let idem = projectors
            .iter()
            .fold(0.0f64, |acc, p| acc.max(idempotence_residual(p)));

        let sum = projectors
            .iter()
            .fold(Operator::zeros(dim, dim), |acc, p| acc + p);
        let partition = max_abs(&(sum - &eye));

        let mut annihilation = 0.0f64;
        for (i, pi) in projectors.iter().enumerate() {
            for (j, pj) in projectors.iter().enumerate() {
                if i != j {
                    annihilation = annihilation.max(max_abs(&(pi * pj)));
                }
            }
        }
        Ok((point, idem, partition, annihilation))
    });

    let mut idem = Vec::new();
    let mut partition = Vec::new();
    let mut annihilation = Vec::new();
    for r in results {
        let (point, a, b, c) = r?;
        idem.push((point, a));
        partition.push((point, b));
        annihilation.push((point, c));
    }

    let fold = |name: &str, samples: &[(SamplePoint, f64)]| {
        let mut max = 0.0f64;
        let mut worst = None;
        for &(p, v) in samples {
            if v > max {
                max = v;
                worst = Some(p);
            }
        }
        NamedResidual {
            name: name.to_string(),
            max,
            worst,
        }
    };

    Ok(AxiomReport::from_residuals(
        "family-algebra",
        shifts.len(),
        tol,
        vec![
            fold("idempotence", &idem),
            fold("partition-of-identity", &partition),
            fold("mutual-annihilation", &annihilation),
        ],
    ))
}

/// Check the intertwining law P_k(phi(t, s, x)) Phi(t, s, x) v =
/// Phi(t, s, x) P_k(x) v over sampled (t, s, x, v).
///
/// Residuals are normalized by max(1, ||Phi v||) so long-horizon exponential
/// growth does not drown the comparison.
pub fn check_intertwining(
    set: &CompatibleFamilySet,
    grid: &SampleGrid,
    tol: f64,
) -> Result<AxiomReport> {
    grid.validate()?;
    if grid.vectors().is_empty() {
        return Err(SkewflowError::EmptyGrid("no test vectors"));
    }
    let mut items = Vec::with_capacity(grid.triples().len() * grid.shifts().len());
    for triple in grid.triples() {
        for &shift in grid.shifts() {
            items.push((*triple, shift));
        }
    }

    let vectors: Vec<DVector<f64>> = grid.vectors().to_vec();
    let results = sweep_map(&items, |(triple, shift)| -> Result<(SamplePoint, f64)> {
        let sys = set.system();
        let x = sys.state(*shift)?;
        let point = SamplePoint {
            t: triple.t(),
            s: triple.s(),
            t0: triple.t0(),
            shift: *shift,
        };
        let op = sys.operator(triple.t(), triple.s(), &x)?;
        let evolved = sys.evolve_state(triple.t(), triple.s(), &x)?;
        let mut residual = 0.0f64;
        for fam in set.families() {
            let p_here = fam.at(&x);
            let p_there = fam.at(&evolved);
            for v in &vectors {
                let transported = &op * v;
                let left = &p_there * &transported;
                let right = &op * (&p_here * v);
                let scale = 1.0f64.max(l1_norm(&transported));
                residual = residual.max(l1_norm(&(left - right)) / scale);
            }
        }
        Ok((point, residual))
    });

    let mut max = 0.0f64;
    let mut worst = None;
    let mut n = 0usize;
    for r in results {
        let (point, value) = r?;
        n += 1;
        if value > max {
            max = value;
            worst = Some(point);
        }
    }

    Ok(AxiomReport::from_residuals(
        "intertwining",
        n,
        tol,
        vec![NamedResidual {
            name: "intertwining".to_string(),
            max,
            worst,
        }],
    ))
}

/// Rank invariant: the ranks of the family projectors sum to the dimension at
/// every sampled state.
pub fn check_rank_partition(set: &CompatibleFamilySet, grid: &SampleGrid) -> Result<bool> {
    grid.validate()?;
    for &shift in grid.shifts() {
        let x = set.system().state(shift)?;
        let total: usize = set
            .families()
            .iter()
            .map(|f| rank(&f.at(&x), RANK_SVD_TOL))
            .sum();
        if total != set.dim() {
            return Ok(false);
        }
    }
    Ok(true)
}



#[cfg(test)]
mod state_transport_tests {
    use super::*;
    use crate::dynamics::{DiagonalCocycle, DiagonalExponent, TranslationSemiflow};
    use crate::grid::GridSpec;
    use crate::profile::{BaseProfile, IntegrationMode};

    /// The graph pair of `state_dependent_tests` satisfies the algebra at
    /// every state but is not transported by a generic diagonal cocycle, so
    /// the intertwining check must reject it.
    #[test]
    fn state_dependent_family_fails_intertwining_with_diagonal_cocycle() {
        let sys = SkewEvolutionSystem::new(
            Arc::new(TranslationSemiflow),
            Arc::new(
                DiagonalCocycle::new(
                    vec![
                        DiagonalExponent::Integral { coeff: -2.0 },
                        DiagonalExponent::Integral { coeff: 3.0 },
                    ],
                    IntegrationMode::ClosedForm,
                )
                .unwrap(),
            ),
            Arc::new(BaseProfile::unit_exp()),
        )
        .unwrap();
        let graph = ProjectorFamily::state_dependent(1, 2, |x: &StateProfile| {
            let mut m = Operator::zeros(2, 2);
            m[(0, 0)] = 1.0;
            m[(0, 1)] = x.value(0.0);
            m
        });
        let complement = ProjectorFamily::state_dependent(2, 2, |x: &StateProfile| {
            let mut m = Operator::zeros(2, 2);
            m[(0, 1)] = -x.value(0.0);
            m[(1, 1)] = 1.0;
            m
        });
        let set = CompatibleFamilySet::new(sys, vec![graph, complement]).unwrap();
        let grid = SampleGrid::from_spec(&GridSpec::default(), 2, 42).unwrap();
        assert!(check_family_algebra(&set, &grid, 1e-12).unwrap().passed);
        let report = check_intertwining(&set, &grid, 1e-9).unwrap();
        assert!(!report.passed);
    }
}
