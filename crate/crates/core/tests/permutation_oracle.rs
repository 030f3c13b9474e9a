mod common;

use common::{all_permutations, crc32, dense_matrix, mat_vec, paper_pseudocode, XorShift};
use permwhite_core::entropy::{CounterEntropy, EntropySource};
use permwhite_core::permutation::{generate, IndexPermutation, ShuffleMode};
use permwhite_core::{bits, Error, MatrixPool, Result};
use proptest::prelude::*;

fn chunk_bits(value: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| (value >> (n - 1 - i)) & 1 == 1).collect()
}

#[test]
fn worked_example_matches_dense_product() {
    let map = vec![0, 2, 3, 1];
    let p = IndexPermutation::new(map.clone()).unwrap();
    let out = p.apply(&bits::parse("0001").unwrap()).unwrap();
    assert_eq!(bits::render(&out), "0010");
    let dense = mat_vec(&dense_matrix(&map), &[0, 0, 0, 1]);
    assert_eq!(dense, vec![0, 0, 1, 0]);
}

#[test]
fn exhaustive_n4_matches_dense_oracle() {
    let perms = all_permutations(4);
    assert_eq!(perms.len(), 24);
    let mut cases = 0;
    for map in &perms {
        let p = IndexPermutation::new(map.clone()).unwrap();
        let m = dense_matrix(map);
        for c in 0..16u32 {
            let chunk = chunk_bits(c, 4);
            let v: Vec<u8> = chunk.iter().map(|&b| u8::from(b)).collect();
            let expect: Vec<bool> = mat_vec(&m, &v).into_iter().map(|x| x == 1).collect();
            assert_eq!(p.apply(&chunk).unwrap(), expect, "map {map:?} chunk {c:04b}");
            cases += 1;
        }
    }
    assert_eq!(cases, 384);
}

#[test]
fn exhaustive_n4_inverse_and_compose() {
    let id = IndexPermutation::identity(4);
    for map in all_permutations(4) {
        let p = IndexPermutation::new(map).unwrap();
        let inv = p.invert();
        assert_eq!(p.compose(&inv).unwrap(), id);
        assert_eq!(inv.compose(&p).unwrap(), id);
        assert_eq!(id.compose(&p).unwrap(), p);
        for c in 0..16 {
            let chunk = chunk_bits(c, 4);
            assert_eq!(inv.apply(&p.apply(&chunk).unwrap()).unwrap(), chunk);
        }
    }
}

#[test]
fn compose_matches_sequential_application_exhaustively() {
    let perms: Vec<_> = all_permutations(4)
        .into_iter()
        .map(|m| IndexPermutation::new(m).unwrap())
        .collect();
    for a in &perms {
        for b in &perms {
            let ab = a.compose(b).unwrap();
            for c in 0..16 {
                let chunk = chunk_bits(c, 4);
                assert_eq!(
                    ab.apply(&chunk).unwrap(),
                    a.apply(&b.apply(&chunk).unwrap()).unwrap()
                );
            }
        }
    }
}

#[test]
fn associativity_at_n8() {
    let mut rng = CounterEntropy::new(77, 0);
    for _ in 0..200 {
        let [a, b, c] = [(); 3].map(|_| generate(ShuffleMode::Unbiased, 3, 16, &mut rng).unwrap());
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        assert_eq!(left, right);
        // And against direct evaluation.
        for v in 0..256u32 {
            let chunk = chunk_bits(v, 8);
            let direct = a
                .apply(&b.apply(&c.apply(&chunk).unwrap()).unwrap())
                .unwrap();
            assert_eq!(left.apply(&chunk).unwrap(), direct);
        }
    }
}

#[test]
fn compose_size_mismatch() {
    let a = IndexPermutation::identity(4);
    let b = IndexPermutation::identity(8);
    assert!(matches!(a.compose(&b), Err(Error::LengthMismatch { .. })));
}

/// Integer draws from a fixed list; byte-level access is never needed.
struct Scripted(std::vec::IntoIter<u64>);

impl EntropySource for Scripted {
    fn fill_bytes(&mut self, _: &mut [u8]) -> Result<()> {
        unreachable!("generator must use random_int")
    }
    fn random_int(&mut self, lo: u64, hi: u64) -> Result<u64> {
        let v = self.0.next().unwrap();
        assert!(lo <= v && v <= hi);
        Ok(v)
    }
}

#[test]
fn paper_mode_matches_literal_pseudocode() {
    // K = [2, 1, 4, 3] from the example list, then every K in {1..4}^4.
    let check = |k: Vec<usize>| {
        let n = k.len();
        let n_qubits = n.trailing_zeros();
        let script = k.iter().map(|&x| x as u64).collect::<Vec<_>>().into_iter();
        let p = generate(ShuffleMode::Paper, n_qubits, 16, &mut Scripted(script)).unwrap();
        assert_eq!(dense_matrix(p.map()), paper_pseudocode(n, &k), "K = {k:?}");
    };
    check(vec![2, 1, 4, 3]);
    for code in 0..256usize {
        check((0..4).map(|i| (code >> (2 * i)) % 4 + 1).collect());
    }
    let mut x = XorShift(0x9E37_79B9);
    for n_qubits in [3u32, 5, 8] {
        let n = 1usize << n_qubits;
        check((0..n).map(|_| x.below(n as u64) as usize + 1).collect());
    }
}

#[test]
fn paper_mode_identity_draws() {
    for n_qubits in 1..=8u32 {
        let n = 1u64 << n_qubits;
        let script = (1..=n).collect::<Vec<_>>().into_iter();
        let p = generate(ShuffleMode::Paper, n_qubits, 16, &mut Scripted(script)).unwrap();
        assert!(p.is_identity());
    }
}

#[test]
fn unbiased_mode_n2_trace() {
    // The single draw happens at i = 2; a 2 swaps the two positions.
    let p = generate(ShuffleMode::Unbiased, 1, 16, &mut Scripted(vec![2].into_iter())).unwrap();
    assert_eq!(p.map(), &[1, 0]);
}

#[test]
fn generated_permutations_are_bijections_for_all_sizes() {
    let mut rng = CounterEntropy::new(2024, 0);
    for mode in [ShuffleMode::Paper, ShuffleMode::Unbiased] {
        for n_qubits in 1..=13 {
            let p = generate(mode, n_qubits, 16, &mut rng).unwrap();
            assert_eq!(p.size(), 1 << n_qubits);
            let mut seen = vec![false; p.size()];
            for &v in p.map() {
                assert!(!std::mem::replace(&mut seen[v as usize], true));
            }
        }
    }
}

#[test]
fn exhaustive_small_sizes_reach_only_valid_permutations() {
    // N = 2 and N = 4, every possible paper-mode draw vector.
    for code in 0..4usize {
        let k = vec![(code & 1) as u64 + 1, (code >> 1) as u64 + 1];
        let p = generate(ShuffleMode::Paper, 1, 16, &mut Scripted(k.into_iter())).unwrap();
        IndexPermutation::new(p.map().to_vec()).unwrap();
    }
    // Unbiased N = 8: draws r_i in [1, i] for i = 8..2, 8! vectors in all.
    let mut count = std::collections::HashSet::new();
    let mut draws = vec![1u64; 7];
    loop {
        let p = generate(ShuffleMode::Unbiased, 3, 16, &mut Scripted(draws.clone().into_iter()))
            .unwrap();
        count.insert(p.map().to_vec());
        // Odometer over ranges 8, 7, ..., 2.
        let mut i = 0;
        loop {
            if i == 7 {
                assert_eq!(count.len(), 40320, "each draw vector gives a distinct permutation");
                return;
            }
            draws[i] += 1;
            if draws[i] <= 8 - i as u64 {
                break;
            }
            draws[i] = 1;
            i += 1;
        }
    }
}

#[test]
fn hand_assembled_pool_file() {
    let mut file = Vec::new();
    file.extend_from_slice(b"PWPL");
    file.extend_from_slice(&[1, 0]); // version
    file.push(2); // n_qubits
    file.push(0); // reserved
    file.extend_from_slice(&[1, 0, 0, 0]); // count
    file.extend_from_slice(&[0, 0]); // empty tag
    let record: Vec<u8> = [0u32, 1, 2, 3].iter().flat_map(|v| v.to_le_bytes()).collect();
    file.extend_from_slice(&record);
    file.extend_from_slice(&crc32(&record).to_le_bytes());

    let pool = MatrixPool::load(&file[..]).unwrap();
    assert_eq!(pool.n_qubits(), 2);
    assert_eq!(pool.count(), 1);
    assert!(pool.permutations()[0].is_identity());
    assert_eq!(pool.generator_tag(), "");

    let mut saved = Vec::new();
    pool.save(&mut saved).unwrap();
    assert_eq!(saved, file);

    // Repeated index with a correct CRC is still rejected.
    let mut bad = file.clone();
    let record: Vec<u8> = [0u32, 1, 1, 3].iter().flat_map(|v| v.to_le_bytes()).collect();
    bad[14..30].copy_from_slice(&record);
    bad[30..34].copy_from_slice(&crc32(&record).to_le_bytes());
    assert!(matches!(MatrixPool::load(&bad[..]), Err(Error::Corrupt(_))));
}

#[test]
fn pool_save_load_two_permutations() {
    let pool = MatrixPool::new(
        2,
        vec![
            IndexPermutation::new(vec![0, 2, 3, 1]).unwrap(),
            IndexPermutation::new(vec![2, 0, 1, 3]).unwrap(),
        ],
        "hand",
    )
    .unwrap();
    let mut bytes = Vec::new();
    pool.save(&mut bytes).unwrap();
    let back = MatrixPool::load(&bytes[..]).unwrap();
    assert_eq!(back, pool);
    assert_eq!(back.permutations()[1].map(), &[2, 0, 1, 3]);
}

proptest! {
    #[test]
    fn apply_preserves_weight_and_length(
        n_qubits in 1u32..=10,
        key in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let mut rng = CounterEntropy::new(key, 0);
        let p = generate(ShuffleMode::Unbiased, n_qubits, 16, &mut rng).unwrap();
        let mut x = XorShift(seed | 1);
        let chunk: Vec<bool> = (0..p.size()).map(|_| x.next_u64() & 1 == 1).collect();
        let out = p.apply(&chunk).unwrap();
        prop_assert_eq!(out.len(), chunk.len());
        prop_assert_eq!(
            out.iter().filter(|&&b| b).count(),
            chunk.iter().filter(|&&b| b).count()
        );
        prop_assert_eq!(p.invert().apply(&out).unwrap(), chunk);
    }
}
