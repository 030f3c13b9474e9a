#![allow(dead_code)]

//! Independent reference implementations used as test oracles. None of these
//! call into the crate's transform or statistics code.

/// Dense 0/1 matrix with `m[i][map[i]] = 1`.
pub fn dense_matrix(map: &[u32]) -> Vec<Vec<u8>> {
    let n = map.len();
    let mut m = vec![vec![0u8; n]; n];
    for (i, &j) in map.iter().enumerate() {
        m[i][j as usize] = 1;
    }
    m
}

/// Integer matrix-vector product.
pub fn mat_vec(m: &[Vec<u8>], v: &[u8]) -> Vec<u8> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| u32::from(*a) * u32::from(*b)).sum::<u32>() as u8)
        .collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v as u32);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Literal 1-based transcription of the three-loop matrix generator: draw K,
/// set S to the identity, swap downward, then place the ones of P. Returns the
/// dense matrix.
pub fn paper_pseudocode(n: usize, k: &[usize]) -> Vec<Vec<u8>> {
    let mut kk = vec![0usize; n + 1];
    let mut s = vec![0usize; n + 1];
    let mut p = vec![vec![0u8; n + 1]; n + 1];
    let mut i = 1;
    while i <= n {
        kk[i] = k[i - 1];
        s[i] = i;
        let mut j = 1;
        while j <= n {
            p[i][j] = 0;
            j += 1;
        }
        i += 1;
    }
    let mut i = n;
    while i > 0 {
        let pp = kk[i];
        s.swap(pp, i);
        i -= 1;
    }
    let mut i = 1;
    while i <= n {
        p[i][s[i]] = 1;
        i += 1;
    }
    p.into_iter().skip(1).map(|row| row[1..].to_vec()).collect()
}

/// Bitwise CRC-32 (IEEE, reflected, poly 0xEDB88320).
pub fn crc32(data: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &b in data {
        crc ^= u32::from(b);
        for _ in 0..8 {
            crc = if crc & 1 == 1 { (crc >> 1) ^ 0xEDB8_8320 } else { crc >> 1 };
        }
    }
    !crc
}

#[derive(Debug, Clone, Copy)]
pub struct NaiveEnt {
    pub entropy: f64,
    pub chi_square: f64,
    pub mean: f64,
    pub pi: f64,
    pub scc: Option<f64>,
}

/// Two passes over an in-memory buffer: histogram and sums first, then
/// centred moments for the circular lag-1 correlation.
pub fn naive_ent(data: &[u8]) -> NaiveEnt {
    let n = data.len() as f64;
    let mut hist = [0f64; 256];
    for &b in data {
        hist[b as usize] += 1.0;
    }
    let expected = n / 256.0;
    let chi_square = hist.iter().map(|&c| (c - expected).powi(2) / expected).sum();
    let entropy = hist
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| -(c / n) * (c / n).log2())
        .sum::<f64>()
        .abs();
    let mean = data.iter().map(|&b| f64::from(b)).sum::<f64>() / n;

    let mut inside = 0u64;
    let mut points = 0u64;
    let r = f64::from((1u32 << 24) - 1);
    for g in data.chunks_exact(6) {
        let x = f64::from(u32::from_be_bytes([0, g[0], g[1], g[2]]));
        let y = f64::from(u32::from_be_bytes([0, g[3], g[4], g[5]]));
        // Exact in f64: both squares are below 2^48.
        if x * x + y * y <= r * r {
            inside += 1;
        }
        points += 1;
    }
    let pi = 4.0 * inside as f64 / points as f64;

    // Centred moments scaled by n^2 stay integral: (n x_i - S)(n x_j - S).
    let n_i = data.len() as i128;
    let total: i128 = data.iter().map(|&b| i128::from(b)).sum();
    let mut cov = 0i128;
    let mut var = 0i128;
    for i in 0..data.len() {
        let a = n_i * i128::from(data[i]) - total;
        let b = n_i * i128::from(data[(i + 1) % data.len()]) - total;
        cov += a * b;
        var += a * a;
    }
    let scc = if var == 0 { None } else { Some(cov as f64 / var as f64) };
    NaiveEnt {
        entropy,
        chi_square,
        mean,
        pi,
        scc,
    }
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Small xorshift generator for building test corpora without touching the
/// crate's entropy sources.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn bytes(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| (self.next_u64() >> 56) as u8).collect()
    }

    pub fn below(&mut self, m: u64) -> u64 {
        self.next_u64() % m
    }
}
