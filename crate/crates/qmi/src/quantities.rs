//! Dimension-checked physical scalars, unit conversions, and constants.
//!
//! Everything inside the library is strict SI; human-facing units (amu, μm,
//! mbar, mK, ...) exist only at I/O boundaries. A [`Quantity`] carries an
//! exponent vector over the four base dimensions (kg, m, s, K) that is
//! composed by multiplication/division and checked on addition, subtraction
//! and conversion, so mixed-unit formula bugs surface as errors instead of
//! silently wrong numbers.

use crate::error::{Error, Result};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Integer exponent vector over the SI base dimensions (kg, m, s, K).
///
/// No ampere or mole: nothing in this problem domain needs them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension {
    pub mass: i8,
    pub length: i8,
    pub time: i8,
    pub temperature: i8,
}

impl Dimension {
    pub const fn new(mass: i8, length: i8, time: i8, temperature: i8) -> Self {
        Self { mass, length, time, temperature }
    }

    pub const DIMENSIONLESS: Dimension = Dimension::new(0, 0, 0, 0);
    pub const MASS: Dimension = Dimension::new(1, 0, 0, 0);
    pub const LENGTH: Dimension = Dimension::new(0, 1, 0, 0);
    pub const TIME: Dimension = Dimension::new(0, 0, 1, 0);
    pub const TEMPERATURE: Dimension = Dimension::new(0, 0, 0, 1);
    /// s⁻¹ (also used for decoherence rates).
    pub const FREQUENCY: Dimension = Dimension::new(0, 0, -1, 0);
    /// kg m⁻¹ s⁻² (pressure).
    pub const PRESSURE: Dimension = Dimension::new(1, -1, -2, 0);
    /// J s = kg m² s⁻¹ (action, ħ).
    pub const ACTION: Dimension = Dimension::new(1, 2, -1, 0);
    /// Hz m⁻² = m⁻² s⁻¹ (localization parameter Λ).
    pub const LOCALIZATION: Dimension = Dimension::new(0, -2, -1, 0);
    /// m² Hz⁻¹ = m² s (displacement power spectral density).
    pub const PSD: Dimension = Dimension::new(0, 2, 1, 0);

    pub const fn compose(self, other: Dimension) -> Dimension {
        Dimension::new(
            self.mass + other.mass,
            self.length + other.length,
            self.time + other.time,
            self.temperature + other.temperature,
        )
    }

    pub const fn inverse(self) -> Dimension {
        Dimension::new(-self.mass, -self.length, -self.time, -self.temperature)
    }

    pub fn powi(self, n: i8) -> Dimension {
        Dimension::new(self.mass * n, self.length * n, self.time * n, self.temperature * n)
    }

    pub fn is_dimensionless(self) -> bool {
        self == Dimension::DIMENSIONLESS
    }

    /// True when every exponent is even, i.e. a square root stays integral.
    fn has_even_exponents(self) -> bool {
        self.mass % 2 == 0 && self.length % 2 == 0 && self.time % 2 == 0 && self.temperature % 2 == 0
    }

    fn halved(self) -> Dimension {
        Dimension::new(self.mass / 2, self.length / 2, self.time / 2, self.temperature / 2)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (sym, e) in [("kg", self.mass), ("m", self.length), ("s", self.time), ("K", self.temperature)] {
            match e {
                0 => {}
                1 => parts.push(sym.to_string()),
                _ => parts.push(format!("{sym}^{e}")),
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// A dimensioned scalar stored in SI base units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    dim: Dimension,
}

impl Quantity {
    pub const fn new(value_si: f64, dim: Dimension) -> Self {
        Self { value: value_si, dim }
    }

    pub const fn dimensionless(value: f64) -> Self {
        Self::new(value, Dimension::DIMENSIONLESS)
    }

    pub const fn mass_kg(value: f64) -> Self {
        Self::new(value, Dimension::MASS)
    }

    pub const fn length_m(value: f64) -> Self {
        Self::new(value, Dimension::LENGTH)
    }

    pub const fn time_s(value: f64) -> Self {
        Self::new(value, Dimension::TIME)
    }

    pub const fn temperature_k(value: f64) -> Self {
        Self::new(value, Dimension::TEMPERATURE)
    }

    pub const fn frequency_hz(value: f64) -> Self {
        Self::new(value, Dimension::FREQUENCY)
    }

    /// Construct from a value expressed in a named unit (see [`UNITS`]).
    pub fn from_unit(value: f64, unit: &str) -> Result<Self> {
        let u = lookup_unit(unit)?;
        Ok(Self::new(value * u.si_factor, u.dim))
    }

    /// Raw SI value.
    pub fn value_si(&self) -> f64 {
        self.value
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Numeric value in a named unit; the unit dimension must match.
    pub fn in_unit(&self, unit: &str) -> Result<f64> {
        let u = lookup_unit(unit)?;
        if u.dim != self.dim {
            return Err(Error::Unit(format!(
                "cannot express quantity of dimension [{}] in unit '{unit}' of dimension [{}]",
                self.dim, u.dim
            )));
        }
        Ok(self.value / u.si_factor)
    }

    pub fn checked_add(self, other: Quantity) -> Result<Quantity> {
        if self.dim != other.dim {
            return Err(Error::Unit(format!(
                "cannot add [{}] to [{}]",
                other.dim, self.dim
            )));
        }
        Ok(Quantity::new(self.value + other.value, self.dim))
    }

    pub fn checked_sub(self, other: Quantity) -> Result<Quantity> {
        if self.dim != other.dim {
            return Err(Error::Unit(format!(
                "cannot subtract [{}] from [{}]",
                other.dim, self.dim
            )));
        }
        Ok(Quantity::new(self.value - other.value, self.dim))
    }

    pub fn powi(self, n: i8) -> Quantity {
        Quantity::new(self.value.powi(n as i32), self.dim.powi(n))
    }

    /// Square root; fails when an exponent would become fractional.
    pub fn sqrt(self) -> Result<Quantity> {
        if !self.dim.has_even_exponents() {
            return Err(Error::Unit(format!(
                "square root of dimension [{}] is not integral",
                self.dim
            )));
        }
        if self.value < 0.0 {
            return Err(Error::Domain("square root of a negative quantity".into()));
        }
        Ok(Quantity::new(self.value.sqrt(), self.dim.halved()))
    }
}

impl Mul for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: Quantity) -> Quantity {
        Quantity::new(self.value * rhs.value, self.dim.compose(rhs.dim))
    }
}

impl Div for Quantity {
    type Output = Quantity;
    fn div(self, rhs: Quantity) -> Quantity {
        Quantity::new(self.value / rhs.value, self.dim.compose(rhs.dim.inverse()))
    }
}

impl Mul<f64> for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: f64) -> Quantity {
        Quantity::new(self.value * rhs, self.dim)
    }
}

impl Div<f64> for Quantity {
    type Output = Quantity;
    fn div(self, rhs: f64) -> Quantity {
        Quantity::new(self.value / rhs, self.dim)
    }
}

impl Neg for Quantity {
    type Output = Quantity;
    fn neg(self) -> Quantity {
        Quantity::new(-self.value, self.dim)
    }
}

/// Panicking addition; use [`Quantity::checked_add`] for a fallible path.
impl Add for Quantity {
    type Output = Quantity;
    fn add(self, rhs: Quantity) -> Quantity {
        self.checked_add(rhs).expect("dimension mismatch in +")
    }
}

/// Panicking subtraction; use [`Quantity::checked_sub`] for a fallible path.
impl Sub for Quantity {
    type Output = Quantity;
    fn sub(self, rhs: Quantity) -> Quantity {
        self.checked_sub(rhs).expect("dimension mismatch in -")
    }
}

struct UnitDef {
    name: &'static str,
    dim: Dimension,
    si_factor: f64,
}

/// Unit names accepted in config files and on the CLI.
const UNITS: &[UnitDef] = &[
    UnitDef { name: "kg", dim: Dimension::MASS, si_factor: 1.0 },
    UnitDef { name: "amu", dim: Dimension::MASS, si_factor: si::AMU_KG },
    UnitDef { name: "m", dim: Dimension::LENGTH, si_factor: 1.0 },
    UnitDef { name: "um", dim: Dimension::LENGTH, si_factor: 1e-6 },
    UnitDef { name: "nm", dim: Dimension::LENGTH, si_factor: 1e-9 },
    UnitDef { name: "s", dim: Dimension::TIME, si_factor: 1.0 },
    UnitDef { name: "Hz", dim: Dimension::FREQUENCY, si_factor: 1.0 },
    UnitDef { name: "K", dim: Dimension::TEMPERATURE, si_factor: 1.0 },
    UnitDef { name: "mK", dim: Dimension::TEMPERATURE, si_factor: 1e-3 },
    UnitDef { name: "Pa", dim: Dimension::PRESSURE, si_factor: 1.0 },
    UnitDef { name: "mbar", dim: Dimension::PRESSURE, si_factor: 100.0 },
    UnitDef { name: "m2_per_Hz", dim: Dimension::PSD, si_factor: 1.0 },
];

fn lookup_unit(name: &str) -> Result<&'static UnitDef> {
    UNITS
        .iter()
        .find(|u| u.name == name)
        .ok_or_else(|| Error::Unit(format!("unknown unit '{name}'")))
}

/// Numeric value of `q` in the named target unit.
pub fn convert(q: Quantity, target_unit: &str) -> Result<f64> {
    q.in_unit(target_unit)
}

/// Raw SI constants for formula-level code.
///
/// CODATA 2018 values at full published precision; h, k_B and c are exact
/// by definition in the 2019 SI.
pub mod si {
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant, J/K (exact).
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    /// Speed of light, m/s (exact).
    pub const LIGHT_SPEED: f64 = 299_792_458.0;
    /// Newtonian gravitational constant, m³ kg⁻¹ s⁻².
    pub const GRAVITATIONAL_CONSTANT: f64 = 6.674_30e-11;
    /// Atomic mass unit, kg.
    pub const AMU_KG: f64 = 1.660_539_066_60e-27;
}

/// The physical constants as dimensioned quantities.
///
/// Immutable single source of truth; the raw `f64` twins live in [`si`].
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub hbar: Quantity,
    pub boltzmann: Quantity,
    pub light_speed: Quantity,
    pub gravitational_constant: Quantity,
    pub amu_in_kg: Quantity,
}

pub const CONSTANTS: Constants = Constants {
    hbar: Quantity::new(si::HBAR, Dimension::ACTION),
    // J/K = kg m² s⁻² K⁻¹
    boltzmann: Quantity::new(si::BOLTZMANN, Dimension::new(1, 2, -2, -1)),
    light_speed: Quantity::new(si::LIGHT_SPEED, Dimension::new(0, 1, -1, 0)),
    // m³ kg⁻¹ s⁻²
    gravitational_constant: Quantity::new(si::GRAVITATIONAL_CONSTANT, Dimension::new(-1, 3, -2, 0)),
    amu_in_kg: Quantity::new(si::AMU_KG, Dimension::MASS),
};

/// Mass of a homogeneous sphere, (4π/3) ρ R³.
pub fn sphere_mass(radius: Quantity, density: Quantity) -> Result<Quantity> {
    if radius.dim() != Dimension::LENGTH {
        return Err(Error::Unit(format!("radius has dimension [{}], expected length", radius.dim())));
    }
    if density.dim() != Dimension::new(1, -3, 0, 0) {
        return Err(Error::Unit(format!(
            "density has dimension [{}], expected mass/volume",
            density.dim()
        )));
    }
    if !(radius.value_si() > 0.0) {
        return Err(Error::Domain("sphere radius must be positive".into()));
    }
    if !(density.value_si() > 0.0) {
        return Err(Error::Domain("sphere density must be positive".into()));
    }
    Ok(density * radius.powi(3) * (4.0 * std::f64::consts::PI / 3.0))
}

/// Raw-SI helper for the same formula, for internal callers.
pub fn sphere_mass_kg(radius_m: f64, density_kg_m3: f64) -> Result<f64> {
    Ok(sphere_mass(Quantity::length_m(radius_m), Quantity::new(density_kg_m3, Dimension::new(1, -3, 0, 0)))?
        .value_si())
}

/// A homogeneous sphere: the mechanical object all modules share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    radius_m: f64,
    density_kg_m3: f64,
    mass_kg: f64,
}

impl Sphere {
    pub fn new(radius_m: f64, density_kg_m3: f64) -> Result<Self> {
        let mass_kg = sphere_mass_kg(radius_m, density_kg_m3)?;
        Ok(Self { radius_m, density_kg_m3, mass_kg })
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    pub fn density_kg_m3(&self) -> f64 {
        self.density_kg_m3
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass_kg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn conversion_round_trips_are_exact() {
        for unit in ["kg", "amu", "m", "um", "nm", "s", "Hz", "K", "mK", "Pa", "mbar", "m2_per_Hz"] {
            let q = Quantity::from_unit(3.7, unit).unwrap();
            let back = q.in_unit(unit).unwrap();
            assert!(rel(back, 3.7) < 1e-12, "{unit}: {back}");
        }
    }

    #[test]
    fn convert_codata_definitions() {
        let amu = Quantity::from_unit(1.0, "amu").unwrap();
        assert!(rel(convert(amu, "kg").unwrap(), 1.660_539_066_60e-27) < 1e-12);
        let mbar = Quantity::from_unit(1.0, "mbar").unwrap();
        assert_eq!(convert(mbar, "Pa").unwrap(), 100.0);
    }

    #[test]
    fn convert_rejects_dimension_mismatch() {
        let um = Quantity::from_unit(1.0, "um").unwrap();
        assert!(matches!(convert(um, "kg"), Err(Error::Unit(_))));
    }

    #[test]
    fn add_sub_reject_mismatched_dimensions() {
        let m = Quantity::length_m(1.0);
        let s = Quantity::time_s(1.0);
        assert!(m.checked_add(s).is_err());
        assert!(m.checked_sub(s).is_err());
        assert!(m.checked_add(Quantity::length_m(2.0)).is_ok());
    }

    #[test]
    fn mul_div_compose_exponents() {
        let v = Quantity::length_m(3.0) / Quantity::time_s(2.0);
        assert_eq!(v.dim(), Dimension::new(0, 1, -1, 0));
        let a = v / Quantity::time_s(1.0);
        assert_eq!(a.dim(), Dimension::new(0, 1, -2, 0));
        let e = Quantity::mass_kg(1.0) * v * v;
        assert_eq!(e.dim(), Dimension::new(1, 2, -2, 0));
    }

    #[test]
    fn localization_times_length_squared_over_rate_is_dimensionless() {
        // Λ x² / γ with Λ in Hz/m², x in m, γ in Hz.
        let lambda = Quantity::new(1.0, Dimension::LOCALIZATION);
        let x = Quantity::length_m(2.0);
        let gamma = Quantity::frequency_hz(3.0);
        let ratio = lambda * x * x / gamma;
        assert!(ratio.dim().is_dimensionless());
    }

    #[test]
    fn sphere_mass_matches_reference_coefficient() {
        // R = 1 μm, ρ = 8570 kg/m³ → about 2×10¹³ amu (one-significant-figure
        // reference value; the exact number is 2.16×10¹³).
        let m = sphere_mass(
            Quantity::from_unit(1.0, "um").unwrap(),
            Quantity::new(8570.0, Dimension::new(1, -3, 0, 0)),
        )
        .unwrap();
        let amu = m.in_unit("amu").unwrap();
        assert!(rel(amu, 2e13) < 0.3, "amu = {amu:e}");
    }

    #[test]
    fn sphere_mass_cubic_scaling() {
        let m1 = sphere_mass_kg(1e-6, 8570.0).unwrap();
        let m2 = sphere_mass_kg(2e-6, 8570.0).unwrap();
        assert!(rel(m2, 8.0 * m1) < 1e-12);
    }

    #[test]
    fn sphere_mass_rejects_degenerate_inputs() {
        assert!(matches!(sphere_mass_kg(0.0, 8570.0), Err(Error::Domain(_))));
        assert!(matches!(sphere_mass_kg(1e-6, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn sqrt_requires_even_exponents() {
        let area = Quantity::length_m(4.0) * Quantity::length_m(4.0);
        assert_eq!(area.sqrt().unwrap().value_si(), 4.0);
        assert!(Quantity::length_m(4.0).sqrt().is_err());
    }
}
