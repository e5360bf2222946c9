//! Physical constants and angle units.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::{lit, Scalar};

/// Arcseconds per radian, 648000/π, correctly rounded for `f64`.
pub const ARCSEC_PER_RAD_F64: f64 = 206_264.806_247_096_36;

/// Arcseconds per radian in the working precision.
#[inline]
pub fn arcsec_per_rad<T: Scalar>() -> T {
    lit(ARCSEC_PER_RAD_F64)
}

/// Physical constants of the scenario, SI units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants<T> {
    /// Gravitational parameter GM of the Sun (m³/s²).
    pub mu_sun: T,
    /// Speed of light (m/s).
    pub c: T,
    /// Solar radius (m).
    pub r_sun: T,
    /// Conversion factor (arcsec/rad), 648000/π.
    pub arcsec_per_rad: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    /// IAU nominal values: μ☉ = 1.32712440018e20 m³/s², c = 299792458 m/s,
    /// R☉ = 6.957e8 m. These reproduce the published deflection table to
    /// its printed precision.
    pub fn iau_nominal() -> Self {
        Self {
            mu_sun: lit(1.327_124_400_18e20),
            c: lit(299_792_458.0),
            r_sun: lit(6.957e8),
            arcsec_per_rad: arcsec_per_rad(),
        }
    }

    /// IAU nominal values with individual overrides.
    pub fn with_overrides(
        mu_sun: Option<T>,
        c: Option<T>,
        r_sun: Option<T>,
    ) -> Result<Self, Error> {
        let nominal = Self::iau_nominal();
        let constants = Self {
            mu_sun: mu_sun.unwrap_or(nominal.mu_sun),
            c: c.unwrap_or(nominal.c),
            r_sun: r_sun.unwrap_or(nominal.r_sun),
            arcsec_per_rad: nominal.arcsec_per_rad,
        };
        constants.validate()?;
        Ok(constants)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fields = [
            ("mu_sun", self.mu_sun),
            ("c", self.c),
            ("r_sun", self.r_sun),
            ("arcsec_per_rad", self.arcsec_per_rad),
        ];
        for (name, v) in fields {
            if v <= T::zero() || !v.is_finite() {
                return Err(Error::domain(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::iau_nominal()
    }
}

/// Unit an [`Angle`] is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleUnit {
    Radian,
    Arcsecond,
}

/// An angle tagged with its unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Angle<T> {
    pub value: T,
    pub unit: AngleUnit,
}

impl<T: Scalar> Angle<T> {
    pub fn radians(value: T) -> Self {
        Self {
            value,
            unit: AngleUnit::Radian,
        }
    }

    pub fn arcseconds(value: T) -> Self {
        Self {
            value,
            unit: AngleUnit::Arcsecond,
        }
    }

    pub fn to_radians(self) -> Self {
        match self.unit {
            AngleUnit::Radian => self,
            AngleUnit::Arcsecond => Self::radians(self.value / arcsec_per_rad()),
        }
    }

    pub fn to_arcseconds(self) -> Self {
        match self.unit {
            AngleUnit::Radian => Self::arcseconds(self.value * arcsec_per_rad()),
            AngleUnit::Arcsecond => self,
        }
    }
}
