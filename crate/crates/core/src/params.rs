use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the stick and of gravity, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StickParams {
    /// Mass `m` (kg).
    pub mass: f64,
    /// Length `ℓ` (m).
    pub length: f64,
    /// Transverse moment of inertia `J` about the center of mass (kg·m²).
    pub inertia: f64,
    /// Gravitational acceleration `g` (m/s²).
    pub gravity: f64,
}

impl Default for StickParams {
    /// A 100 g, 0.5 m stick with `J` rounded to 0.0021 kg·m².
    fn default() -> Self {
        Self {
            mass: 0.1,
            length: 0.5,
            inertia: 0.0021,
            gravity: 9.81,
        }
    }
}

impl StickParams {
    pub fn new(mass: f64, length: f64, inertia: f64, gravity: f64) -> Result<Self> {
        let p = Self {
            mass,
            length,
            inertia,
            gravity,
        };
        p.validate()?;
        Ok(p)
    }

    /// Uniform slender rod: `J = m ℓ² / 12`.
    pub fn uniform_rod(mass: f64, length: f64, gravity: f64) -> Result<Self> {
        Self::new(mass, length, mass * length * length / 12.0, gravity)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.mass, self.length, self.inertia, self.gravity]
            .iter()
            .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::InvalidParams("non-finite value"));
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidParams("mass must be positive"));
        }
        if self.length <= 0.0 {
            return Err(Error::InvalidParams("length must be positive"));
        }
        if self.gravity <= 0.0 {
            return Err(Error::InvalidParams("gravity must be positive"));
        }
        // The largest transverse inertia of any mass distribution on a
        // segment of length ℓ is m ℓ² / 4 (two point masses at the ends).
        if self.inertia <= 0.0 || self.inertia > self.mass * self.length * self.length / 4.0 {
            return Err(Error::InvalidParams("inertia must lie in (0, m l^2 / 4]"));
        }
        Ok(())
    }

    #[inline]
    pub fn half_length(&self) -> f64 {
        0.5 * self.length
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        StickParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(StickParams::new(0.0, 0.5, 0.002, 9.81).is_err());
        assert!(StickParams::new(0.1, -0.5, 0.002, 9.81).is_err());
        assert!(StickParams::new(0.1, 0.5, 0.0, 9.81).is_err());
        assert!(StickParams::new(0.1, 0.5, 0.1, 9.81).is_err());
        assert!(StickParams::new(0.1, 0.5, 0.002, 0.0).is_err());
        assert!(StickParams::new(f64::NAN, 0.5, 0.002, 9.81).is_err());
    }

    #[test]
    fn uniform_rod_inertia() {
        let p = StickParams::uniform_rod(0.1, 0.5, 9.81).unwrap();
        assert!((p.inertia - 0.1 * 0.25 / 12.0).abs() < 1e-15);
    }
}
