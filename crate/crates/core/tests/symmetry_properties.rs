mod common;

use common::*;
use num_complex::Complex64;
use phasedamp::symmetry::{
    detect_dfs, invariant_under, permutation_invariance_check, permute_index, symmetric_channel, BlockKind,
    SymmetrySpec, DEFAULT_DFS_TOL,
};
use phasedamp::{apply_channel, gram, random_channel, CVector, ChannelMatrix, DynamicalVectorSet};
use phasedamp::channel::DensityMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn random_spec(seed: u64, qubits: usize, r: usize) -> SymmetrySpec {
    let mut g = rng(seed);
    SymmetrySpec::new(qubits, (0..=qubits).map(|_| unit(&mut g, r)).collect()).unwrap()
}

fn weight_classes(qubits: usize) -> Vec<Vec<usize>> {
    let mut classes = vec![Vec::new(); qubits + 1];
    for n in 0..1usize << qubits {
        classes[n.count_ones() as usize].push(n);
    }
    classes
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Permutes the Hamming-weight bits by moving the bit of qubit `i` to `perm[i]`, written out directly.
fn oracle_permute(n: usize, qubits: usize, perm: &[usize]) -> usize {
    let bits: Vec<usize> = (0..qubits).map(|q| (n >> (qubits - 1 - q)) & 1).collect();
    let mut out = vec![0; qubits];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = bits[i];
    }
    out.iter().fold(0, |acc, &b| (acc << 1) | b)
}

proptest! {
    #![proptest_config(proptest_config(48))]

    #[test]
    fn symmetric_channels_are_permutation_invariant(seed in any::<u64>(), qubits in 1usize..=5, r in 2usize..=4) {
        let d = symmetric_channel(&random_spec(seed, qubits, r)).unwrap();
        prop_assert!(permutation_invariance_check(&d, qubits, 1e-12).unwrap());
        let mut perm: Vec<usize> = (0..qubits).collect();
        perm.shuffle(&mut rng(seed ^ 3));
        prop_assert!(invariant_under(&d, qubits, &[perm], 1e-12).unwrap());
    }

    #[test]
    fn distinct_class_vectors_give_weight_class_blocks(seed in any::<u64>(), qubits in 1usize..=5, r in 2usize..=4) {
        let d = symmetric_channel(&random_spec(seed, qubits, r)).unwrap();
        let report = detect_dfs(&d, DEFAULT_DFS_TOL, false);
        let mut blocks: Vec<Vec<usize>> = report.blocks.iter().map(|b| b.indices.clone()).collect();
        blocks.sort();
        let mut expect = weight_classes(qubits);
        expect.sort();
        prop_assert_eq!(&blocks, &expect);
        for b in &report.blocks {
            let k = b.indices[0].count_ones() as usize;
            prop_assert_eq!(b.dimension, binomial(qubits, k));
            prop_assert_eq!(b.kind, if b.dimension == 1 { BlockKind::Trivial } else { BlockKind::Dfs });
        }
        prop_assert!(report.warnings.is_empty());
    }

    #[test]
    fn states_supported_on_a_block_are_fixed(seed in any::<u64>(), qubits in 2usize..=5) {
        let d = symmetric_channel(&random_spec(seed, qubits, 3)).unwrap();
        let report = detect_dfs(&d, DEFAULT_DFS_TOL, false);
        let block = report.nontrivial().max_by_key(|b| b.dimension).unwrap();
        let mut g = rng(seed ^ 9);
        let amps = unit(&mut g, block.dimension);
        let mut psi = CVector::zeros(d.dimension());
        for (a, &i) in amps.iter().zip(&block.indices) {
            psi[i] = *a;
        }
        let rho = DensityMatrix::pure(&psi, 1e-9).unwrap();
        let out = apply_channel(&d, &rho).unwrap();
        let n = d.dimension() as f64;
        prop_assert!(max_diff(out.matrix(), rho.matrix()) <= DEFAULT_DFS_TOL * n);
    }

    #[test]
    fn partition_is_covariant_under_relabelling(seed in any::<u64>(), qubits in 2usize..=4) {
        let d = symmetric_channel(&random_spec(seed, qubits, 2)).unwrap();
        let n = d.dimension();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng(seed ^ 5));
        let dp = d.permuted(&perm);
        let canon = |blocks: Vec<Vec<usize>>| {
            let mut b: Vec<Vec<usize>> = blocks.into_iter().map(|mut x| { x.sort(); x }).collect();
            b.sort();
            b
        };
        let orig = canon(detect_dfs(&d, DEFAULT_DFS_TOL, false).blocks.into_iter().map(|b| b.indices).collect());
        // index i of the relabelled channel is index perm[i] of the original
        let back = canon(
            detect_dfs(&dp, DEFAULT_DFS_TOL, false)
                .blocks
                .into_iter()
                .map(|b| b.indices.into_iter().map(|i| perm[i]).collect())
                .collect(),
        );
        prop_assert_eq!(orig, back);
    }

    #[test]
    fn index_permutation_matches_bit_oracle(n in 0usize..64, seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..6).collect();
        perm.shuffle(&mut rng(seed));
        prop_assert_eq!(permute_index(n, 6, &perm), oracle_permute(n, 6, &perm));
    }
}

#[test]
fn generic_channels_have_only_trivial_blocks() {
    for seed in 0..100u64 {
        let n = 2 + (seed % 7) as usize;
        let d = random_channel(n, (2 + (seed % 2) as usize).min(n), seed).unwrap();
        let report = detect_dfs(&d, DEFAULT_DFS_TOL, true);
        assert_eq!(report.blocks.len(), n, "seed {seed}");
        assert!(report.blocks.iter().all(|b| b.kind == BlockKind::Trivial));
    }
}

#[test]
fn identical_class_vectors_give_the_identity() {
    let v = unit(&mut rng(1), 3);
    let spec = SymmetrySpec::new(3, vec![v.clone(); 4]).unwrap();
    let d = symmetric_channel(&spec).unwrap();
    assert!(max_diff(d.matrix(), ChannelMatrix::identity(8).matrix()) < 1e-14);
    let report = detect_dfs(&d, DEFAULT_DFS_TOL, false);
    assert_eq!(report.blocks.len(), 1);
    assert_eq!(report.blocks[0].dimension, 8);
    assert_eq!(report.blocks[0].kind, BlockKind::Dfs);
}

#[test]
fn phase_blocks_need_phase_tolerance() {
    // a diagonal unitary keeps |D| = 1 everywhere but D ≠ 1 off the diagonal
    let phases = [0.0, 0.4, -1.1, 2.0];
    let d = unitary_mixture(&[phases.to_vec()], &[1.0]);
    let strict = detect_dfs(&d, DEFAULT_DFS_TOL, false);
    assert_eq!(strict.blocks.len(), 4);
    let tolerant = detect_dfs(&d, DEFAULT_DFS_TOL, true);
    assert_eq!(tolerant.blocks.len(), 1);
    assert_eq!(tolerant.blocks[0].kind, BlockKind::PhaseDfs);
}

#[test]
fn swap_symmetry_alone_is_not_full_symmetry() {
    // per-qubit vectors where qubits 0 and 1 share a factor but qubit 2 differs
    let mut g = rng(12);
    let (a0, a1, c0, c1) = (unit(&mut g, 2), unit(&mut g, 2), unit(&mut g, 2), unit(&mut g, 2));
    let vectors: Vec<CVector> = (0..8usize)
        .map(|n| {
            let bit = |q: usize| (n >> (2 - q)) & 1;
            let pick = |q: usize| match (q, bit(q)) {
                (2, 0) => &c0,
                (2, _) => &c1,
                (_, 0) => &a0,
                _ => &a1,
            };
            pick(0).kronecker(pick(1)).kronecker(pick(2))
        })
        .collect();
    let d = gram(&DynamicalVectorSet::from_vectors(&vectors, 1e-12).unwrap());
    assert!(!permutation_invariance_check(&d, 3, 1e-10).unwrap());
    assert!(invariant_under(&d, 3, &[vec![1, 0, 2]], 1e-10).unwrap());
    assert!(!invariant_under(&d, 3, &[vec![0, 2, 1]], 1e-10).unwrap());
}

#[test]
fn invalid_inputs_are_rejected() {
    let d = random_channel(4, 2, 0).unwrap();
    assert!(permutation_invariance_check(&d, 3, 1e-10).is_err());
    assert!(invariant_under(&d, 2, &[vec![0, 0]], 1e-10).is_err());
    assert!(SymmetrySpec::new(2, vec![unit(&mut rng(0), 2); 2]).is_err());
    let bad = CVector::from_vec(vec![Complex64::from(1.0), Complex64::from(1.0)]);
    assert!(SymmetrySpec::new(1, vec![bad.clone(), bad]).is_err());
}
