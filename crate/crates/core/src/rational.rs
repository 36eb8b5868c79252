//! Exact rational bookkeeping for instance metadata.
//!
//! Generators that are handed a float `eps` which is (within float noise) a
//! small rational can re-derive their parameters exactly and emit them as
//! `p/q` strings for audit. Recovery uses a continued-fraction scan with a
//! denominator cap; anything that does not round-trip to the input within
//! `1e-12` relative is treated as irrational and skipped.

use num::rational::Ratio;

pub(crate) type Rat = Ratio<i128>;

const MAX_DENOMINATOR: i128 = 100_000;

/// Best small-denominator rational for `x`, if one reproduces it closely.
pub(crate) fn rational_from_f64(x: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let target = x.abs();
    // continued-fraction convergents h_k / k_k
    let (mut h0, mut k0, mut h1, mut k1): (i128, i128, i128, i128) = (1, 0, 0, 1);
    let mut frac = target;
    for _ in 0..64 {
        let a = frac.floor();
        if a > (i64::MAX as f64) {
            return None;
        }
        let a_int = a as i128;
        let h2 = a_int.checked_mul(h0)?.checked_add(h1)?;
        let k2 = a_int.checked_mul(k0)?.checked_add(k1)?;
        if k2 > MAX_DENOMINATOR {
            break;
        }
        h1 = h0;
        k1 = k0;
        h0 = h2;
        k0 = k2;
        let approx = h0 as f64 / k0 as f64;
        if (approx - target).abs() <= 1e-12 * target.max(1.0) {
            let r = Rat::new(if negative { -h0 } else { h0 }, k0);
            return Some(r);
        }
        let rem = frac - a;
        if rem.abs() < f64::EPSILON {
            break;
        }
        frac = 1.0 / rem;
    }
    None
}

pub(crate) fn rat_to_string(r: &Rat) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::ToPrimitive;

    fn rat_f64(r: &Rat) -> f64 {
        r.to_f64().unwrap_or(f64::NAN)
    }

    #[test]
    fn recovers_simple_fractions() {
        assert_eq!(rational_from_f64(0.5), Some(Rat::new(1, 2)));
        assert_eq!(rational_from_f64(1.0 / 3.0), Some(Rat::new(1, 3)));
        assert_eq!(rational_from_f64(2.2), Some(Rat::new(11, 5)));
        assert_eq!(rational_from_f64(0.0), Some(Rat::new(0, 1)));
        assert_eq!(rational_from_f64(-0.25), Some(Rat::new(-1, 4)));
    }

    #[test]
    fn rejects_irrationals() {
        assert_eq!(rational_from_f64(std::f64::consts::SQRT_2), None);
        assert_eq!(rational_from_f64(f64::NAN), None);
    }

    #[test]
    fn formats_integers_bare() {
        assert_eq!(rat_to_string(&Rat::new(4, 2)), "2");
        assert_eq!(rat_to_string(&Rat::new(1, 3)), "1/3");
    }

    #[test]
    fn round_trips_through_f64() {
        let r = rational_from_f64(0.3).unwrap();
        assert_eq!(r, Rat::new(3, 10));
        assert!((rat_f64(&r) - 0.3).abs() < 1e-15);
    }
}
