//! Physical model parameters and the two-tone drive clock.
//!
//! The model is a harmonically driven Aubry-Andre-Harper chain with an
//! on-site superlattice potential `V cos(λj − β) cos(Ωt)`, a Hubbard
//! interaction `U/2 n(n−1)` and a linear tilt `ω_F j`. The tilt is specified
//! through the reduced rational ratio `ω_F/Ω = a/b`, so the rotated-frame
//! Hamiltonian is periodic with the common period `T = a·T₂ = b·T₁`.

use crate::error::{Error, Result};

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// A reduced non-negative rational, serialized as "a/b".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    /// Reduce on construction; `0/b` normalizes to `0/1`.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("ratio denominator is zero".into()));
        }
        if num == 0 {
            return Ok(Ratio { num: 0, den: 1 });
        }
        let g = gcd(num, den);
        Ok(Ratio {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Parse "a/b" (or a bare integer "a").
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: u64 = n
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad ratio numerator in {s:?}")))?;
        let den: u64 = d
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad ratio denominator in {s:?}")))?;
        Ratio::new(num, den)
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// All physical constants of one experiment, plus the derived clock.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    /// Hopping amplitude J.
    pub hopping: f64,
    /// Drive amplitude V of the superlattice modulation.
    pub drive_amplitude: f64,
    /// Drive period T₁ = 2π/Ω.
    pub drive_period: f64,
    /// Tilt ratio ω_F/Ω = a/b (a = 0 encodes no tilt).
    pub tilt_ratio: Ratio,
    /// On-site interaction U.
    pub interaction: f64,
    /// Superlattice wavenumber λ = 2π·p/q as the reduced rational p/q.
    pub superlattice: Ratio,
    /// Phase shift β of the superlattice, in [0, 2π).
    pub beta: f64,
}

impl ModelParams {
    /// The paper-wide defaults: J = V = 2.5, λ = 2π/3, no interaction, no tilt.
    pub fn new(drive_period: f64) -> Result<Self> {
        if !(drive_period > 0.0) {
            return Err(Error::InvalidParameter("drive_period must be positive".into()));
        }
        Ok(ModelParams {
            hopping: 2.5,
            drive_amplitude: 2.5,
            drive_period,
            tilt_ratio: Ratio::new(0, 1)?,
            interaction: 0.0,
            superlattice: Ratio::new(1, 3)?,
            beta: 0.0,
        })
    }

    pub fn with_tilt_ratio(mut self, a: u64, b: u64) -> Result<Self> {
        self.tilt_ratio = Ratio::new(a, b)?;
        Ok(self)
    }

    pub fn with_interaction(mut self, u: f64) -> Self {
        self.interaction = u;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    /// Drive angular frequency Ω = 2π/T₁.
    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.drive_period
    }

    /// Tilt strength ω_F = (a/b)·Ω.
    pub fn omega_f(&self) -> f64 {
        self.tilt_ratio.value() * self.omega()
    }

    /// Bloch period T₂ = 2π/ω_F; `None` when the tilt is off.
    pub fn bloch_period(&self) -> Option<f64> {
        if self.tilt_ratio.is_zero() {
            None
        } else {
            Some(2.0 * std::f64::consts::PI / self.omega_f())
        }
    }

    /// Common period T = a·T₂ = b·T₁ of the two drive tones (T = T₁ untilted).
    pub fn common_period(&self) -> f64 {
        self.tilt_ratio.denominator() as f64 * self.drive_period
    }

    /// λ = 2π·p/q.
    pub fn lambda(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.superlattice.value()
    }

    /// Number of sublattice sites per unit cell (q of λ = 2πp/q).
    pub fn sublattices(&self) -> usize {
        self.superlattice.denominator() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_reduces() {
        let r = Ratio::new(6, 4).unwrap();
        assert_eq!((r.numerator(), r.denominator()), (3, 2));
        let z = Ratio::new(0, 7).unwrap();
        assert_eq!((z.numerator(), z.denominator()), (0, 1));
        assert!(Ratio::new(1, 0).is_err());
    }

    #[test]
    fn ratio_parses() {
        assert_eq!(Ratio::parse("3/1").unwrap(), Ratio::new(3, 1).unwrap());
        assert_eq!(Ratio::parse("10/4").unwrap(), Ratio::new(5, 2).unwrap());
        assert_eq!(Ratio::parse("2").unwrap(), Ratio::new(2, 1).unwrap());
        assert!(Ratio::parse("x/3").is_err());
    }

    #[test]
    fn clock_commensurability() {
        // T1 = 2, a/b = 3/1: omega_F = 3*Omega, T = T1 = a*T2.
        let p = ModelParams::new(2.0).unwrap().with_tilt_ratio(3, 1).unwrap();
        let t = p.common_period();
        assert!((t - 2.0).abs() < 1e-15);
        let t2 = p.bloch_period().unwrap();
        assert!((3.0 * t2 - t).abs() < 1e-12);

        // T1 = 4, a/b = 2/5: T = 5*T1 = 2*T2.
        let p = ModelParams::new(4.0).unwrap().with_tilt_ratio(2, 5).unwrap();
        let t = p.common_period();
        assert!((t - 20.0).abs() < 1e-12);
        assert!((2.0 * p.bloch_period().unwrap() - t).abs() < 1e-12);
    }

    #[test]
    fn zero_tilt_clock() {
        let p = ModelParams::new(4.0).unwrap();
        assert!(p.bloch_period().is_none());
        assert!((p.common_period() - 4.0).abs() < 1e-15);
        assert_eq!(p.omega_f(), 0.0);
    }
}
