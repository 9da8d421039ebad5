//! Two-dimensional Sobol points in Gray-code order.

const BITS: usize = 32;

/// Direction numbers for dimension 2 (primitive polynomial `x + 1`,
/// initial `m₁ = 1`), scaled to 32-bit fixed point.
const fn directions_dim2() -> [u32; BITS] {
    let mut v = [0u32; BITS];
    let mut m: u64 = 1;
    let mut k = 0;
    while k < BITS {
        v[k] = (m << (BITS - 1 - k)) as u32;
        m = (m << 1) ^ m;
        k += 1;
    }
    v
}

const DIM2: [u32; BITS] = directions_dim2();

/// Point `index + 1` of the 2-d Sobol sequence (the origin is skipped).
/// Both coordinates lie strictly inside (0, 1).
///
/// # Panics
/// If `index + 1` does not fit in 32 bits.
pub fn sobol_pair(index: u64) -> (f64, f64) {
    let n = index + 1;
    assert!(n < 1 << BITS, "Sobol index {index} out of range");
    let gray = n ^ (n >> 1);
    let (mut x, mut y) = (0u32, 0u32);
    for bit in 0..BITS {
        if gray >> bit & 1 == 1 {
            x ^= 1 << (BITS - 1 - bit);
            y ^= DIM2[bit];
        }
    }
    let scale = 1.0 / (1u64 << BITS) as f64;
    (x as f64 * scale, y as f64 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_points_match_reference() {
        // Reference generator output (unscrambled, first point skipped).
        let expect = [
            (0.5, 0.5),
            (0.75, 0.25),
            (0.25, 0.75),
            (0.375, 0.375),
            (0.875, 0.875),
            (0.625, 0.125),
            (0.125, 0.625),
            (0.1875, 0.3125),
            (0.6875, 0.8125),
            (0.9375, 0.0625),
            (0.4375, 0.5625),
            (0.3125, 0.1875),
            (0.8125, 0.6875),
            (0.5625, 0.4375),
            (0.0625, 0.9375),
        ];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(sobol_pair(i as u64), *e, "index {i}");
        }
    }

    #[test]
    fn direction_numbers() {
        let m: Vec<u32> = (0..6).map(|k| DIM2[k] >> (BITS - 1 - k)).collect();
        assert_eq!(m, [1, 3, 5, 15, 17, 51]);
    }

    #[test]
    fn coordinates_are_interior() {
        for i in 0..100_000u64 {
            let (x, y) = sobol_pair(i);
            assert!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0, "index {i}");
        }
        let (x, y) = sobol_pair((1u64 << 32) - 2);
        assert!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0);
    }

    #[test]
    fn each_dyadic_block_is_stratified() {
        // The first 2^k points (with the origin) hit every 2^-k cell once
        // per coordinate.
        for k in 1..=10u32 {
            let n = 1usize << k;
            let mut xs = vec![false; n];
            let mut ys = vec![false; n];
            xs[0] = true;
            ys[0] = true;
            for i in 0..(n as u64 - 1) {
                let (x, y) = sobol_pair(i);
                xs[(x * n as f64) as usize] = true;
                ys[(y * n as f64) as usize] = true;
            }
            assert!(xs.iter().all(|&b| b) && ys.iter().all(|&b| b), "k={k}");
        }
    }
}
