//! Unit conversions between the engineering units used in configuration files
//! and the SI units used everywhere inside the engine.

use crate::error::{QotError, Result};

pub const THZ: f64 = 1e12;
pub const GHZ: f64 = 1e9;
pub const KM: f64 = 1e3;
/// Planck constant, J·s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watt(p_dbm: f64) -> f64 {
    1e-3 * db_to_linear(p_dbm)
}

pub fn watt_to_dbm(p_w: f64) -> f64 {
    linear_to_db(p_w / 1e-3)
}

/// Power attenuation in 1/m for `P(z) = P(0)·exp(-alpha·z)` from a dB/km figure.
pub fn attenuation_from_db_per_km(a_db_per_km: f64) -> Result<f64> {
    if !(a_db_per_km >= 0.0) || !a_db_per_km.is_finite() {
        return Err(QotError::invalid(
            "attenuation",
            format!("{a_db_per_km} dB/km must be finite and non-negative"),
        ));
    }
    Ok(a_db_per_km * std::f64::consts::LN_10 / (10.0 * KM))
}

pub fn attenuation_to_db_per_km(alpha: f64) -> f64 {
    alpha * 10.0 * KM / std::f64::consts::LN_10
}

/// ps²/km to s²/m.
pub fn ps2_per_km(v: f64) -> f64 {
    v * 1e-24 / KM
}

/// ps³/km to s³/m.
pub fn ps3_per_km(v: f64) -> f64 {
    v * 1e-36 / KM
}

/// 1/(W·km) to 1/(W·m).
pub fn per_w_km(v: f64) -> f64 {
    v / KM
}

/// 1/(W·km·THz) to 1/(W·m·Hz).
pub fn per_w_km_thz(v: f64) -> f64 {
    v / KM / THZ
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        // 10^2.05 from a 30-digit evaluation
        assert!((db_to_linear(20.5) - 112.201_845_430_196_34).abs() < 1e-10);
        assert!((db_to_linear(-3.0103) - 0.5).abs() < 1e-4);
        assert!((watt_to_dbm(dbm_to_watt(-7.25)) + 7.25).abs() < 1e-12);
    }

    #[test]
    fn attenuation_examples() {
        assert_eq!(attenuation_from_db_per_km(0.0).unwrap(), 0.0);
        let a = attenuation_from_db_per_km(0.2).unwrap();
        assert!((a - 4.605_170_185_988_091e-5).abs() < 1e-18);
        let a10 = attenuation_from_db_per_km(10.0).unwrap();
        assert!((a10 - 2.302_585_092_994_046e-3).abs() < 1e-15);
        assert!(attenuation_from_db_per_km(-0.1).is_err());
        assert!(attenuation_from_db_per_km(f64::NAN).is_err());
    }

    #[test]
    fn engineering_scales() {
        assert!((ps2_per_km(-21.7) + 21.7e-27).abs() < 1e-40);
        assert!((ps3_per_km(0.14) - 0.14e-39).abs() < 1e-52);
        assert!((per_w_km(1.3) - 1.3e-3).abs() < 1e-18);
        assert!((per_w_km_thz(0.028) - 2.8e-17).abs() < 1e-30);
    }

    proptest::proptest! {
        #[test]
        fn attenuation_round_trip(a in 0.0f64..50.0) {
            let back = attenuation_to_db_per_km(attenuation_from_db_per_km(a).unwrap());
            proptest::prop_assert!((back - a).abs() <= 1e-12 * a.max(1e-300));
        }
    }
}
