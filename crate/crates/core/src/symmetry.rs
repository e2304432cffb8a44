//! Permutation-symmetric multi-qubit channels and decoherence-free subspaces.
//!
//! Basis index `n ∈ 0..2^q` is read as a big-endian bit string: qubit 0 is the
//! most significant bit.

use serde::Serialize;
use thiserror::Error;

use crate::channel::{gram, ChannelError, ChannelMatrix, DynamicalVectorSet, DEFAULT_NORM_TOL};
use crate::diagnostics::Warning;
use crate::linalg::{CMatrix, CVector};

/// Default tolerance for `|D[m][n] − 1|` inside a block.
pub const DEFAULT_DFS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("symmetry spec: {0}")]
    InvalidSpec(String),
    #[error("dimension {dimension} is not 2^{qubits}")]
    DimensionNotPowerOfTwo { dimension: usize, qubits: usize },
    #[error("{0:?} is not a permutation of the qubits")]
    InvalidPermutation(Vec<usize>),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// One dynamical vector per excitation number `k = 0 … q`, shared by all
/// `binomial(q, k)` basis states of Hamming weight `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrySpec {
    qubits: usize,
    vectors: Vec<CVector>,
}

impl SymmetrySpec {
    pub fn new(qubits: usize, vectors: Vec<CVector>) -> Result<Self, SymmetryError> {
        if qubits == 0 || qubits >= usize::BITS as usize / 2 {
            return Err(SymmetryError::InvalidSpec(format!("unsupported qubit count {qubits}")));
        }
        if vectors.len() != qubits + 1 {
            return Err(SymmetryError::InvalidSpec(format!(
                "{} qubits need {} vectors, found {}",
                qubits,
                qubits + 1,
                vectors.len()
            )));
        }
        // validates finiteness, common length and normalization
        DynamicalVectorSet::from_vectors(&vectors, DEFAULT_NORM_TOL)?;
        Ok(Self { qubits, vectors })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dimension(&self) -> usize {
        1 << self.qubits
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    /// `binomial(q, k)`.
    pub fn degeneracy(&self, k: usize) -> usize {
        binomial(self.qubits, k)
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `D[m][n] = ⟨b_{k(n)}|b_{k(m)}⟩` with `k(n)` the Hamming weight of `n`.
pub fn symmetric_channel(spec: &SymmetrySpec) -> Result<ChannelMatrix, SymmetryError> {
    // class overlaps have an exact unit diagonal, so same-weight entries are exactly one
    let classes = gram(&DynamicalVectorSet::from_vectors(&spec.vectors, DEFAULT_NORM_TOL)?);
    let k = |n: usize| n.count_ones() as usize;
    let n = spec.dimension();
    Ok(ChannelMatrix::from_trusted(CMatrix::from_fn(n, n, |i, j| classes.entry(k(i), k(j)))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    /// A single basis state.
    Trivial,
    /// `D = 1` on the block: the channel acts as the identity there.
    Dfs,
    /// `|D| = 1` on the block: coherence is kept up to a block-local
    /// diagonal unitary.
    PhaseDfs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DfsBlock {
    pub indices: Vec<usize>,
    pub dimension: usize,
    pub kind: BlockKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DfsReport {
    /// Partition of `0..N`, blocks ordered by their smallest index.
    pub blocks: Vec<DfsBlock>,
    pub tol: f64,
    pub phase_tolerant: bool,
    pub warnings: Vec<Warning>,
}

impl DfsReport {
    /// Blocks of dimension at least two.
    pub fn nontrivial(&self) -> impl Iterator<Item = &DfsBlock> {
        self.blocks.iter().filter(|b| b.dimension > 1)
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Partitions the basis into maximal blocks on which `D` is one (strict) or
/// of modulus one (`phase_tolerant`).
///
/// Blocks are the connected components of the near-one relation. Positivity
/// of `D` makes that relation transitive up to `O(√tol)`; every pair inside a
/// block is re-checked and a [`Warning::NonTransitiveBlock`] is raised when
/// some pair misses the tolerance.
pub fn detect_dfs(d: &ChannelMatrix, tol: f64, phase_tolerant: bool) -> DfsReport {
    let n = d.dimension();
    let m = d.matrix();
    let strict = |i: usize, j: usize| (m[(i, j)] - 1.0).norm();
    let modulus = |i: usize, j: usize| (m[(i, j)].norm() - 1.0).abs();
    let defect = |i: usize, j: usize| if phase_tolerant { modulus(i, j) } else { strict(i, j) };

    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if defect(i, j) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(i);
    }

    let mut warnings = Vec::new();
    let blocks = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|indices| {
            let pairs = || indices.iter().enumerate().flat_map(|(a, &i)| indices[a + 1..].iter().map(move |&j| (i, j)));
            let worst = pairs().map(|(i, j)| defect(i, j)).fold(0.0, f64::max);
            if worst > tol {
                warnings.push(Warning::NonTransitiveBlock { block: indices.clone(), worst });
            }
            let kind = if indices.len() == 1 {
                BlockKind::Trivial
            } else if pairs().all(|(i, j)| strict(i, j) <= tol) {
                BlockKind::Dfs
            } else {
                BlockKind::PhaseDfs
            };
            DfsBlock { dimension: indices.len(), indices, kind }
        })
        .collect();
    DfsReport { blocks, tol, phase_tolerant, warnings }
}

fn check_qubit_dimension(d: &ChannelMatrix, qubits: usize) -> Result<(), SymmetryError> {
    if qubits >= usize::BITS as usize / 2 || d.dimension() != 1 << qubits {
        return Err(SymmetryError::DimensionNotPowerOfTwo { dimension: d.dimension(), qubits });
    }
    Ok(())
}

/// Basis index after moving the bit of qubit `i` to qubit `perm[i]`.
pub fn permute_index(n: usize, qubits: usize, perm: &[usize]) -> usize {
    let bit = |q: usize| qubits - 1 - q;
    perm.iter().enumerate().fold(0, |acc, (i, &p)| acc | (((n >> bit(i)) & 1) << bit(p)))
}

/// Whether `D[π(m)][π(n)] = D[m][n]` for every `π` in the group generated by
/// `generators` (each a permutation of `0..q`).
pub fn invariant_under(
    d: &ChannelMatrix,
    qubits: usize,
    generators: &[Vec<usize>],
    tol: f64,
) -> Result<bool, SymmetryError> {
    check_qubit_dimension(d, qubits)?;
    for g in generators {
        let mut seen = vec![false; qubits];
        if g.len() != qubits || g.iter().any(|&p| p >= qubits || std::mem::replace(&mut seen[p], true)) {
            return Err(SymmetryError::InvalidPermutation(g.clone()));
        }
    }
    let n = d.dimension();
    let m = d.matrix();
    for g in generators {
        let image: Vec<usize> = (0..n).map(|i| permute_index(i, qubits, g)).collect();
        for i in 0..n {
            for j in 0..n {
                if (m[(image[i], image[j])] - m[(i, j)]).norm() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Invariance under the full symmetric group, checked on the adjacent
/// transpositions that generate it.
pub fn permutation_invariance_check(d: &ChannelMatrix, qubits: usize, tol: f64) -> Result<bool, SymmetryError> {
    let generators: Vec<Vec<usize>> = (0..qubits.saturating_sub(1))
        .map(|i| {
            let mut p: Vec<usize> = (0..qubits).collect();
            p.swap(i, i + 1);
            p
        })
        .collect();
    invariant_under(d, qubits, &generators, tol)
}
