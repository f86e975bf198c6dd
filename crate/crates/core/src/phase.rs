//! Oscillatory factors `e^{i n t}` for integer `n`.
//!
//! The product `n t` is formed without rounding error and reduced modulo
//! 2pi in double-double arithmetic, so the phase stays accurate when
//! `|n t|` is large (for example `k^3 t` with `k` in the hundreds).

use num_complex::Complex64;
use std::collections::HashMap;

const TWO_PI_HI: f64 = 6.283_185_307_179_586;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `n t` reduced to `[-pi, pi]`. Requires `|n| < 2^53`.
pub fn reduced_angle(n: i64, t: f64) -> f64 {
    debug_assert!(n.unsigned_abs() < (1u64 << 53));
    let nf = n as f64;
    let p = nf * t;
    let e = nf.mul_add(t, -p);
    let k = (p / TWO_PI_HI).round();
    let r = (-k).mul_add(TWO_PI_HI, p);
    r + (e - k * TWO_PI_LO)
}

/// `e^{i n t}`.
pub fn cis_int(n: i64, t: f64) -> Complex64 {
    if n == 0 || t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let (s, c) = reduced_angle(n, t).sin_cos();
    Complex64::new(c, s)
}

/// `e^{i k^3 t}`.
pub fn cis_cube(k: i64, t: f64) -> Complex64 {
    cis_int(k * k * k, t)
}

/// Memo of `e^{i n t}` at a fixed time.
#[derive(Debug, Clone)]
pub struct PhaseCache {
    t: f64,
    memo: HashMap<i64, Complex64>,
}

impl PhaseCache {
    pub fn new(t: f64) -> Self {
        PhaseCache { t, memo: HashMap::new() }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn get(&mut self, n: i64) -> Complex64 {
        let t = self.t;
        *self.memo.entry(n).or_insert_with(|| cis_int(n, t))
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arguments_match_libm() {
        for n in [-7i64, -1, 1, 2, 30] {
            for t in [0.1, -0.37, 1.0e-3] {
                let z = cis_int(n, t);
                let x = n as f64 * t;
                assert!((z.re - x.cos()).abs() < 1e-15);
                assert!((z.im - x.sin()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn large_products_are_reduced_accurately() {
        // 10^6 * pi is an exact multiple of 2 pi up to the representation of t.
        let t = std::f64::consts::PI;
        let z = cis_int(1_000_000, t);
        // exact value: cos(1e6 * fl(pi)); fl(pi) = pi - 1.2246e-16
        let expect = (-(1_000_000.0) * 1.224_646_799_147_353_2e-16f64).cos();
        assert!((z.re - expect).abs() < 1e-15, "{z}");
        assert!((z.im + 1.0e6 * 1.224_646_799_147_353_2e-16).abs() < 1e-15, "{z}");
    }

    #[test]
    fn matches_high_precision_reference() {
        // reference values computed with 50-digit arithmetic on the exact binary t
        let cases = [
            (1_234_567i64, 0.731, -0.420_651_071_905_259_25, 0.907_222_506_171_973_5),
            (-98_765_432, 0.0037, -0.453_009_414_193_280_98, -0.891_505_732_259_899_9),
            (27_000_000, 0.5, -0.114_475_760_808_042_84, -0.993_426_041_629_380_6),
            (25_165_824, 0.123_456_789, 0.360_081_667_219_839_25, 0.932_920_785_989_990_1),
        ];
        for (n, t, c, s) in cases {
            let z = cis_int(n, t);
            assert!((z.re - c).abs() < 4e-16 && (z.im - s).abs() < 4e-16, "{n} {t} {z}");
        }
    }

    #[test]
    fn cache_matches_fresh() {
        let mut c = PhaseCache::new(0.731);
        for n in -50..50 {
            assert_eq!(c.get(n), cis_int(n, 0.731));
            assert_eq!(c.get(n), cis_int(n, 0.731));
        }
        assert_eq!(c.len(), 100);
    }
}
