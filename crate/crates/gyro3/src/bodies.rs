//! Physical body catalog and unit handling: converts (mass, equatorial
//! radius, polar radius or J2) into the nondimensional moment differences
//! the equilibrium machinery consumes.
//!
//! Bodies are treated as homogeneous ellipsoids, `J2 = (2/5) eps` with
//! `eps = (e - p)/e`; an observed J2 can be carried instead. The catalog
//! ships modern constants (the source tables never state theirs), so
//! reproduction reports quote deltas per row rather than exact digits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Gravitational constant, km^3 kg^-1 s^-2.
pub const G_KM3_KG_S2: f64 = 6.674_30e-20;

/// One physical body: mass plus shape (polar radius and/or observed J2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyRecord {
    pub name: String,
    pub mass_kg: f64,
    pub equatorial_radius_km: f64,
    #[serde(default)]
    pub polar_radius_km: Option<f64>,
    #[serde(default)]
    pub j2: Option<f64>,
    /// When true, `j2` is an observed value not tied to the homogeneous
    /// ellipsoid shape relation.
    #[serde(default)]
    pub observed_j2: bool,
}

impl BodyRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass_kg > 0.0) || !(self.equatorial_radius_km > 0.0) {
            return Err(Error::Catalog(format!(
                "body '{}': mass and equatorial radius must be positive",
                self.name
            )));
        }
        if let Some(p) = self.polar_radius_km {
            if !(p >= 0.0) || p > self.equatorial_radius_km {
                return Err(Error::Catalog(format!(
                    "body '{}': need e >= p >= 0",
                    self.name
                )));
            }
            if let (Some(j2), false) = (self.j2, self.observed_j2) {
                let from_shape = 0.4 * self.flattening().unwrap();
                if (j2 - from_shape).abs() > 1e-6 {
                    return Err(Error::Catalog(format!(
                        "body '{}': J2 = {} inconsistent with (2/5) eps = {} \
                         (set observed_j2 for measured values)",
                        self.name, j2, from_shape
                    )));
                }
            }
        }
        Ok(())
    }

    /// Flattening eps = (e - p)/e; needs the polar radius.
    pub fn flattening(&self) -> Option<f64> {
        self.polar_radius_km
            .map(|p| (self.equatorial_radius_km - p) / self.equatorial_radius_km)
    }

    /// J2 from the record: observed if present, else (2/5) eps.
    pub fn j2_effective(&self) -> Result<f64> {
        if let Some(j2) = self.j2 {
            return Ok(j2);
        }
        self.flattening()
            .map(|eps| 0.4 * eps)
            .ok_or_else(|| Error::MissingShape(self.name.clone()))
    }
}

/// Nondimensional moment difference `C - A` of one body, in units of
/// (total pair mass) x (separation)^2:
/// `C - A = weight (e/Z)^2 J2` with `weight` the body's own mass fraction
/// `m_i / (m1 + m2)`.
pub fn cma_from_shape(record: &BodyRecord, z_km: f64, mass_fraction: f64) -> Result<f64> {
    if !(z_km > 0.0) {
        return Err(Error::InvalidParams("Z must be positive".into()));
    }
    let j2 = record.j2_effective()?;
    Ok(mass_fraction * (record.equatorial_radius_km / z_km).powi(2) * j2)
}

/// Which oblateness terms a scenario activates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Oblateness {
    None,
    S2Only,
    Both,
}

/// A three-body scenario: the massive primary S2, the secondary S1, an
/// optional gyrostat S0 (absent = restricted limit), and their separation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub s2: BodyRecord,
    pub s1: BodyRecord,
    #[serde(default)]
    pub s0: Option<BodyRecord>,
    pub separation_km: f64,
    pub oblateness: Oblateness,
}

/// The scale factors of a nondimensionalization, enough to invert it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Scales {
    /// One nondimensional length in km.
    pub length_km: f64,
    /// One nondimensional mass in kg.
    pub mass_kg: f64,
    /// One nondimensional time in seconds.
    pub time_s: f64,
}

impl Scales {
    pub fn to_km(&self, x: f64) -> f64 {
        x * self.length_km
    }

    pub fn from_km(&self, km: f64) -> f64 {
        km / self.length_km
    }
}

/// Cast a scenario into nondimensional system parameters: unit pair mass
/// (m1 + m2 = 1), unit separation, G = 1. The gyrostat inertia moments
/// are placeholders (tiny sphere) unless the caller overrides them; the
/// rigid body moments carry the scenario's oblateness selection.
pub fn nondimensionalize(config: &ScenarioConfig) -> Result<(SystemParams, Scales)> {
    config.s1.validate()?;
    config.s2.validate()?;
    if !(config.separation_km > 0.0) {
        return Err(Error::InvalidParams("zero separation".into()));
    }
    let m_pair = config.s1.mass_kg + config.s2.mass_kg;
    let m1 = config.s1.mass_kg / m_pair;
    let m2 = config.s2.mass_kg / m_pair;
    let m0 = config.s0.as_ref().map_or(0.0, |b| b.mass_kg / m_pair);
    let z = config.separation_km;
    let scales = Scales {
        length_km: z,
        mass_kg: m_pair,
        time_s: (z.powi(3) / (G_KM3_KG_S2 * m_pair)).sqrt(),
    };
    let cma1 = match config.oblateness {
        Oblateness::Both => cma_from_shape(&config.s1, z, m1)?,
        _ => 0.0,
    };
    let cma2 = match config.oblateness {
        Oblateness::None => 0.0,
        _ => cma_from_shape(&config.s2, z, m2)?,
    };
    // Sphere-like reference moments; only the difference C - A enters the
    // potential corrections.
    let a1 = 0.4 * m1 * (config.s1.equatorial_radius_km / z).powi(2);
    let a2 = 0.4 * m2 * (config.s2.equatorial_radius_km / z).powi(2);
    let (a0, c0) = match &config.s0 {
        Some(b) => {
            let i = 0.4 * (b.mass_kg / m_pair) * (b.equatorial_radius_km / z).powi(2);
            (i, i)
        }
        None => (1e-12, 1e-12),
    };
    let params = SystemParams {
        m0,
        m1,
        m2,
        g: 1.0,
        a0,
        c0,
        a1,
        c1: a1 + cma1,
        a2,
        c2: a2 + cma2,
        l: 0.0,
        collision_eps: 1e-9,
    };
    params.validate()?;
    Ok((params, scales))
}

/// A named collection of body records, loadable from JSON or TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Catalog {
    pub bodies: Vec<BodyRecord>,
}

impl Catalog {
    pub fn get(&self, name: &str) -> Result<&BodyRecord> {
        self.bodies
            .iter()
            .find(|b| b.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Catalog(format!("no body named '{}'", name)))
    }

    pub fn from_str_auto(text: &str) -> Result<Self> {
        let catalog: Catalog = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Catalog(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Catalog(e.to_string()))?
        };
        for b in &catalog.bodies {
            b.validate()?;
        }
        Ok(catalog)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Catalog(format!("{}: {}", path.display(), e)))?;
        Self::from_str_auto(&text)
    }

    /// Built-in catalog with modern constants for the Earth-Moon and
    /// Mars-Phobos systems.
    pub fn builtin() -> Self {
        let body = |name: &str, mass_kg: f64, e: f64, p: f64| BodyRecord {
            name: name.into(),
            mass_kg,
            equatorial_radius_km: e,
            polar_radius_km: Some(p),
            j2: None,
            observed_j2: false,
        };
        Catalog {
            bodies: vec![
                body("Earth", 5.9722e24, 6378.137, 6356.752),
                body("Moon", 7.342e22, 1738.1, 1736.0),
                body("Mars", 6.4171e23, 3396.2, 3376.2),
                body("Phobos", 1.0659e16, 13.0, 9.1),
            ],
        }
    }

    /// Standard separations (km) for the built-in systems.
    pub fn builtin_separation(system: &str) -> Option<f64> {
        match system {
            "earth-moon" => Some(384_400.0),
            "mars-phobos" => Some(9_377.0),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_flattening_gives_zero_cma() {
        let b = BodyRecord {
            name: "ball".into(),
            mass_kg: 1e22,
            equatorial_radius_km: 1000.0,
            polar_radius_km: Some(1000.0),
            j2: None,
            observed_j2: false,
        };
        assert_eq!(cma_from_shape(&b, 1e5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn moon_cma_matches_hand_evaluation() {
        let cat = Catalog::builtin();
        let moon = cat.get("moon").unwrap();
        let z = 384_400.0;
        let mu = 7.342e22 / (5.9722e24 + 7.342e22);
        let got = cma_from_shape(moon, z, mu).unwrap();
        // Direct product: mu (e/Z)^2 (2/5)(e-p)/e.
        let eps = (1738.1 - 1736.0) / 1738.1;
        let by_hand = mu * (1738.1f64 / z).powi(2) * 0.4 * eps;
        assert!(got > 0.0);
        assert!((got - by_hand).abs() <= 1e-15);
    }

    #[test]
    fn doubling_z_quarters_cma() {
        let cat = Catalog::builtin();
        let earth = cat.get("Earth").unwrap();
        let a = cma_from_shape(earth, 1e5, 0.9).unwrap();
        let b = cma_from_shape(earth, 2e5, 0.9).unwrap();
        assert!((a / b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn shape_and_j2_routes_agree() {
        let cat = Catalog::builtin();
        let mars = cat.get("Mars").unwrap();
        let mut via_j2 = mars.clone();
        via_j2.j2 = Some(via_j2.flattening().unwrap() * 0.4);
        via_j2.polar_radius_km = None;
        let a = cma_from_shape(mars, 9377.0, 0.99).unwrap();
        let b = cma_from_shape(&via_j2, 9377.0, 0.99).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn inconsistent_j2_rejected_unless_observed() {
        let mut b = Catalog::builtin().get("Earth").unwrap().clone();
        b.j2 = Some(0.0010826); // measured value, not (2/5) eps
        assert!(b.validate().is_err());
        b.observed_j2 = true;
        assert!(b.validate().is_ok());
        assert_eq!(b.j2_effective().unwrap(), 0.0010826);
    }

    #[test]
    fn earth_moon_mass_ratio() {
        let cat = Catalog::builtin();
        let (earth, moon) = (cat.get("Earth").unwrap(), cat.get("Moon").unwrap());
        let mu = moon.mass_kg / (earth.mass_kg + moon.mass_kg);
        assert!((mu - 0.012150).abs() < 1e-5, "mu = {}", mu);
    }

    #[test]
    fn nondimensionalization_round_trips() {
        let cat = Catalog::builtin();
        let config = ScenarioConfig {
            s2: cat.get("Earth").unwrap().clone(),
            s1: cat.get("Moon").unwrap().clone(),
            s0: None,
            separation_km: 384_400.0,
            oblateness: Oblateness::Both,
        };
        let (params, scales) = nondimensionalize(&config).unwrap();
        assert!((params.m1 + params.m2 - 1.0).abs() < 1e-14);
        assert_eq!(params.m0, 0.0);
        assert_eq!(params.g2(), 0.0);
        let km = 123_456.789;
        assert!((scales.to_km(scales.from_km(km)) - km).abs() <= 1e-14 * km);
        // Oblateness columns landed in the moment differences.
        assert!(params.c2 - params.a2 > 0.0);
        assert!(params.c1 - params.a1 > 0.0);
    }

    #[test]
    fn catalog_parses_json_and_toml() {
        let json = r#"{"bodies":[{"name":"X","mass_kg":1e20,"equatorial_radius_km":100.0,"polar_radius_km":99.0}]}"#;
        let c1 = Catalog::from_str_auto(json).unwrap();
        assert_eq!(c1.bodies.len(), 1);
        let toml_text = "
[[bodies]]
name = \"X\"
mass_kg = 1e20
equatorial_radius_km = 100.0
polar_radius_km = 99.0
";
        let c2 = Catalog::from_str_auto(toml_text).unwrap();
        assert_eq!(c1.bodies[0], c2.bodies[0]);
    }
}
