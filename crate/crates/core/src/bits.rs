//! Bit addressing over packed byte buffers.
//!
//! Bit 0 of a buffer is the most significant bit of its first byte, so the
//! string `0001` packed into a byte reads `0b0001_0000`.

#[inline]
pub fn get(buf: &[u8], bit: usize) -> bool {
    (buf[bit >> 3] >> (7 - (bit & 7))) & 1 == 1
}

#[inline]
pub fn set(buf: &mut [u8], bit: usize, value: bool) {
    let mask = 0x80u8 >> (bit & 7);
    if value {
        buf[bit >> 3] |= mask;
    } else {
        buf[bit >> 3] &= !mask;
    }
}

/// Packs a slice of bits MSB-first; the final byte is zero-padded on the right.
pub fn pack(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i >> 3] |= 0x80 >> (i & 7);
        }
    }
    out
}

pub fn unpack(bytes: &[u8], bit_len: usize) -> Vec<bool> {
    (0..bit_len).map(|i| get(bytes, i)).collect()
}

/// Parses a string of `0`/`1` characters, ignoring whitespace and `_`.
pub fn parse(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn render(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn popcount(bytes: &[u8]) -> u64 {
    bytes.iter().map(|b| u64::from(b.count_ones())).sum()
}
