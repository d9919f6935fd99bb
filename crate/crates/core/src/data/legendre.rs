use crate::error::{Error, Result};

/// Legendre polynomial `P_n(x)` by the three-term recurrence
/// `n P_n = (2n - 1) x P_{n-1} - (n - 1) P_{n-2}`.
pub fn legendre_eval(n: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::NegativeIndex(n));
    }
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return Ok(prev);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * cur - (kf - 1.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Fills `out` with `P_1(x), ..., P_p(x)` where `p = out.len()`. The constant
/// term is never produced.
pub fn legendre_terms(x: f64, out: &mut [f64]) {
    let (mut prev, mut cur) = (1.0, x);
    for (i, slot) in out.iter_mut().enumerate() {
        let k = i + 1;
        if k >= 2 {
            let kf = k as f64;
            let next = ((2.0 * kf - 1.0) * x * cur - (kf - 1.0) * prev) / kf;
            prev = cur;
            cur = next;
        }
        *slot = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_cases() {
        assert_eq!(legendre_eval(0, 0.7).unwrap(), 1.0);
        assert_eq!(legendre_eval(1, 0.7).unwrap(), 0.7);
        assert!(matches!(legendre_eval(-1, 0.0), Err(Error::NegativeIndex(-1))));
    }

    #[test]
    fn cubic_matches_closed_form() {
        for &y in &[-1.0, -0.3, 0.0, 0.45, 1.0] {
            let want = 0.5 * (5.0 * y * y * y - 3.0 * y);
            assert!((legendre_eval(3, y).unwrap() - want).abs() < 1e-15);
        }
        assert_eq!(legendre_eval(3, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn terms_agree_with_single_evaluation() {
        let mut buf = [0.0; 8];
        for &x in &[-0.9, -0.1, 0.33, 0.8] {
            legendre_terms(x, &mut buf);
            for (i, &v) in buf.iter().enumerate() {
                assert_eq!(v, legendre_eval(i as i64 + 1, x).unwrap());
            }
        }
    }
}
