//! Toeplitz two-universal hashing of bit strings.

use rand::Rng;

use crate::error::{Error, Result};

/// A Toeplitz matrix from `input_len` to `output_len` bits, given by its
/// `input_len + output_len - 1` diagonal bits. Entry `(i, j)` is
/// `seed[i - j + input_len - 1]`, constant along each diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashSpec {
    pub input_len: usize,
    pub output_len: usize,
    pub seed: Vec<u8>,
}

impl HashSpec {
    pub fn new(input_len: usize, output_len: usize, seed: Vec<u8>) -> Result<HashSpec> {
        if output_len == 0 {
            return Err(Error::InvalidParameter("hash output length must be positive".into()));
        }
        if seed.len() != input_len + output_len - 1 || seed.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "Toeplitz seed needs {} bits",
                input_len + output_len - 1
            )));
        }
        Ok(HashSpec { input_len, output_len, seed })
    }

    pub fn random(input_len: usize, output_len: usize, rng: &mut impl Rng) -> Result<HashSpec> {
        let seed = (0..(input_len + output_len).saturating_sub(1)).map(|_| rng.random_range(0..2u8)).collect();
        HashSpec::new(input_len, output_len, seed)
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.seed[i + self.input_len - 1 - j]
    }
}

fn pack(bits: impl Iterator<Item = u8>) -> Vec<u64> {
    let mut out = Vec::new();
    for (i, b) in bits.enumerate() {
        if i % 64 == 0 {
            out.push(0);
        }
        if b == 1 {
            *out.last_mut().unwrap() |= 1 << (i % 64);
        }
    }
    out
}

/// `T x` over GF(2). An empty input hashes to the zero string.
pub fn hash_extract(spec: &HashSpec, x: &[u8]) -> Result<Vec<u8>> {
    if x.len() != spec.input_len {
        return Err(Error::LengthMismatch { expected: spec.input_len, got: x.len() });
    }
    if x.iter().any(|&b| b > 1) {
        return Err(Error::InvalidParameter("hash input must be bits".into()));
    }
    let n = spec.input_len;
    let k = spec.output_len;
    // Row i of T, read left to right, is rs[k-1-i .. k-1-i+n] where rs is
    // the seed reversed.
    let rs = pack(spec.seed.iter().rev().copied());
    let xw = pack(x.iter().copied());
    let window = |off: usize, w: usize| -> u64 {
        let bit = off + 64 * w;
        let (q, r) = (bit / 64, bit % 64);
        let lo = rs.get(q).copied().unwrap_or(0) >> r;
        let hi = if r == 0 { 0 } else { rs.get(q + 1).copied().unwrap_or(0) << (64 - r) };
        lo | hi
    };
    let tail = if n % 64 == 0 { u64::MAX } else { (1u64 << (n % 64)) - 1 };
    let out = (0..k)
        .map(|i| {
            let off = k - 1 - i;
            let mut acc = 0u32;
            for (w, xv) in xw.iter().enumerate() {
                let mut row = window(off, w);
                if w == xw.len() - 1 {
                    row &= tail;
                }
                acc ^= (row & xv).count_ones();
            }
            (acc & 1) as u8
        })
        .collect();
    Ok(out)
}
