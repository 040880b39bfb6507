//! First-order radio energy model.
//!
//! Transmission pays electronics energy per bit plus an amplifier term that
//! grows with `d²` below the crossover distance and with `d⁴` at or above it.
//! Reception pays electronics energy only, and cluster heads pay a fixed
//! per-bit cost for every signal they fuse.
//!
//! All functions are pure; depletion bookkeeping lives in [`crate::engine`]
//! and [`crate::routing`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Energy constants of the radio, in joules and meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// TX/RX electronics energy, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier coefficient, J/bit/m².
    pub eps_fs: f64,
    /// Multipath amplifier coefficient, J/bit/m⁴.
    pub eps_mp: f64,
    /// Data aggregation energy, J/bit/signal.
    pub e_agg: f64,
    /// Crossover distance between the `d²` and `d⁴` regimes, m.
    pub d_o: f64,
}

impl Default for RadioParams {
    /// 50 nJ/bit electronics, 10 pJ/bit/m² free space, 0.0013 pJ/bit/m⁴
    /// multipath, 5 nJ/bit/signal aggregation, continuous crossover.
    fn default() -> Self {
        Self::with_crossover(50e-9, 10e-12, 0.0013e-12, 5e-9)
    }
}

impl RadioParams {
    /// Builds parameters with `d_o = sqrt(eps_fs / eps_mp)`, the distance at
    /// which both amplifier terms coincide.
    pub fn with_crossover(e_elec: f64, eps_fs: f64, eps_mp: f64, e_agg: f64) -> Self {
        Self {
            e_elec,
            eps_fs,
            eps_mp,
            e_agg,
            d_o: (eps_fs / eps_mp).sqrt(),
        }
    }

    /// Electronics-only radio: amplifier and aggregation terms are zero, so
    /// every packet movement costs exactly `k·e_elec`.
    pub fn electronics_only(e_elec: f64) -> Self {
        Self {
            e_elec,
            eps_fs: 0.0,
            eps_mp: 0.0,
            e_agg: 0.0,
            d_o: f64::INFINITY,
        }
    }

    /// `e_elec` and `d_o` must be strictly positive; the amplifier and
    /// aggregation terms may be zero (electronics-only radio) but not negative.
    pub fn validate(&self) -> Result<()> {
        let positive = [("e_elec", self.e_elec), ("d_o", self.d_o)];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::invalid(format!("radio {name} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("eps_fs", self.eps_fs),
            ("eps_mp", self.eps_mp),
            ("e_agg", self.e_agg),
        ];
        for (name, v) in non_negative {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("radio {name} must be finite and >= 0, got {v}")));
            }
        }
        if !self.e_elec.is_finite() {
            return Err(Error::invalid("radio e_elec must be finite"));
        }
        Ok(())
    }

    pub fn tx_energy(&self, bits: u64, distance: f64) -> Result<f64> {
        tx_energy(self, bits, distance)
    }

    pub fn rx_energy(&self, bits: u64) -> Result<f64> {
        rx_energy(self, bits)
    }

    pub fn agg_energy(&self, bits: u64, signals: u64) -> Result<f64> {
        agg_energy(self, bits, signals)
    }
}

fn check_bits(bits: u64) -> Result<f64> {
    if bits == 0 {
        return Err(Error::invalid("packet size must be at least one bit"));
    }
    Ok(bits as f64)
}

/// Energy to transmit `bits` over `distance` meters.
pub fn tx_energy(params: &RadioParams, bits: u64, distance: f64) -> Result<f64> {
    let k = check_bits(bits)?;
    if !distance.is_finite() || distance < 0.0 {
        return Err(Error::invalid(format!("distance must be finite and >= 0, got {distance}")));
    }
    let amp = if distance < params.d_o {
        params.eps_fs * distance * distance
    } else {
        let d2 = distance * distance;
        params.eps_mp * d2 * d2
    };
    Ok(k * (params.e_elec + amp))
}

/// Energy to receive `bits`.
pub fn rx_energy(params: &RadioParams, bits: u64) -> Result<f64> {
    let k = check_bits(bits)?;
    Ok(k * params.e_elec)
}

/// Energy to fuse `signals` packets of `bits` each into one.
pub fn agg_energy(params: &RadioParams, bits: u64, signals: u64) -> Result<f64> {
    let k = check_bits(bits)?;
    if signals == 0 {
        return Err(Error::invalid("aggregation needs at least one signal"));
    }
    Ok(params.e_agg * k * signals as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }

    #[test]
    fn default_crossover_distance() {
        let p = RadioParams::default();
        assert!((p.d_o - 87.705_801_930_702_9).abs() < 1e-9, "d_o = {}", p.d_o);
        p.validate().unwrap();
    }

    #[test]
    fn tx_examples() {
        let p = RadioParams::default();
        // amplifier term vanishes at d = 0
        assert!(rel_close(p.tx_energy(4000, 0.0).unwrap(), 2.0e-4, 1e-12));
        // 4000 * (50e-9 + 10e-12 * 2500)
        assert!(rel_close(p.tx_energy(4000, 50.0).unwrap(), 3.0e-4, 1e-12));
        // 4000 * (50e-9 + 0.0013e-12 * 1e8), multipath branch
        assert!(rel_close(p.tx_energy(4000, 100.0).unwrap(), 7.2e-4, 1e-12));
    }

    #[test]
    fn rx_examples() {
        let p = RadioParams::default();
        assert!(rel_close(p.rx_energy(4000).unwrap(), 2.0e-4, 1e-12));
        assert!(rel_close(p.rx_energy(1).unwrap(), 5.0e-8, 1e-12));
        assert_eq!(p.rx_energy(4000).unwrap(), p.tx_energy(4000, 0.0).unwrap());
    }

    #[test]
    fn agg_examples() {
        let p = RadioParams::default();
        assert!(rel_close(p.agg_energy(4000, 1).unwrap(), 2.0e-5, 1e-12));
        assert!(rel_close(p.agg_energy(4000, 5).unwrap(), 1.0e-4, 1e-12));
        assert!(rel_close(p.agg_energy(1, 1).unwrap(), 5.0e-9, 1e-12));
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = RadioParams::default();
        assert!(p.tx_energy(0, 1.0).is_err());
        assert!(p.tx_energy(10, -1.0).is_err());
        assert!(p.tx_energy(10, f64::NAN).is_err());
        assert!(p.tx_energy(10, f64::INFINITY).is_err());
        assert!(p.rx_energy(0).is_err());
        assert!(p.agg_energy(10, 0).is_err());
        assert!(p.agg_energy(0, 1).is_err());
    }

    #[test]
    fn validate_rejects_non_positive_fields() {
        let mut p = RadioParams::default();
        p.e_elec = 0.0;
        assert!(p.validate().is_err());
        let mut p = RadioParams::default();
        p.eps_mp = -1.0;
        assert!(p.validate().is_err());
        let mut p = RadioParams::default();
        p.d_o = f64::NAN;
        assert!(p.validate().is_err());
        RadioParams::electronics_only(50e-9).validate().unwrap();
    }

    #[test]
    fn continuous_at_crossover() {
        let p = RadioParams::default();
        let below = p.tx_energy(4000, p.d_o * (1.0 - 1e-15)).unwrap();
        let at = p.tx_energy(4000, p.d_o).unwrap();
        let fs_term = p.eps_fs * p.d_o * p.d_o;
        let mp_term = p.eps_mp * p.d_o.powi(4);
        assert!(rel_close(fs_term, mp_term, 1e-12));
        assert!(rel_close(below, at, 1e-12), "{below} vs {at}");
    }

    proptest! {
        #[test]
        fn tx_monotone_in_distance(a in 0.0f64..400.0, b in 0.0f64..400.0, k in 1u64..100_000) {
            let p = RadioParams::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let e_lo = p.tx_energy(k, lo).unwrap();
            let e_hi = p.tx_energy(k, hi).unwrap();
            // the d² → d⁴ switch is continuous only up to rounding
            prop_assert!(e_lo <= e_hi * (1.0 + 1e-12));
        }

        #[test]
        fn linear_in_bits(d in 0.0f64..400.0, k in 1u64..1_000_000, s in 1u64..50) {
            let p = RadioParams::default();
            prop_assert!(rel_close(p.tx_energy(2 * k, d).unwrap(), 2.0 * p.tx_energy(k, d).unwrap(), 1e-14));
            prop_assert!(rel_close(p.rx_energy(2 * k).unwrap(), 2.0 * p.rx_energy(k).unwrap(), 1e-14));
            prop_assert!(rel_close(p.agg_energy(2 * k, s).unwrap(), 2.0 * p.agg_energy(k, s).unwrap(), 1e-14));
        }
    }
}
