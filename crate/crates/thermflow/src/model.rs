//! Domain model: thermal entities, heat-transfer interactions, heat
//! sources, and the identifier-keyed configurations they live in.

use crate::numeric::Rat;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Identifier of an object within a configuration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(String);

impl ObjectId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> ObjectId {
        ObjectId(s.to_owned())
    }
}

impl From<String> for ObjectId {
    fn from(s: String) -> ObjectId {
        ObjectId(s)
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Matter phase of a water entity: three main phases plus the four
/// transitional phases the entity passes through while latent heat is
/// being exchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Solid,
    Melting,
    Liquid,
    Evaporating,
    Gas,
    Condensing,
    Freezing,
}

impl Phase {
    /// Transitional phases hold the temperature constant and accumulate
    /// latent heat in `heat_trans`; main phases integrate temperature.
    pub fn is_transitional(self) -> bool {
        matches!(
            self,
            Phase::Melting | Phase::Evaporating | Phase::Condensing | Phase::Freezing
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Solid => "solid",
            Phase::Melting => "melting",
            Phase::Liquid => "liquid",
            Phase::Evaporating => "evaporating",
            Phase::Gas => "gas",
            Phase::Condensing => "condensing",
            Phase::Freezing => "freezing",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        Some(match s {
            "solid" => Phase::Solid,
            "melting" => Phase::Melting,
            "liquid" => Phase::Liquid,
            "evaporating" => Phase::Evaporating,
            "gas" => Phase::Gas,
            "condensing" => Phase::Condensing,
            "freezing" => Phase::Freezing,
            _ => return None,
        })
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How an entity integrates: `Default` updates the temperature,
/// `PhaseChange` freezes the temperature and accumulates heat instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompMode {
    Default,
    PhaseChange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeaterStatus {
    On,
    Off,
}

impl HeaterStatus {
    pub fn name(self) -> &'static str {
        match self {
            HeaterStatus::On => "on",
            HeaterStatus::Off => "off",
        }
    }

    pub fn parse(s: &str) -> Option<HeaterStatus> {
        match s {
            "on" => Some(HeaterStatus::On),
            "off" => Some(HeaterStatus::Off),
            _ => None,
        }
    }
}

impl fmt::Display for HeaterStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Entity flavour: plain bodies just hold heat; water entities additionally
/// carry a phase and a latent-heat accumulator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EntityKind {
    Basic,
    Water { phase: Phase, heat_trans: Rat },
}

/// A body with uniform temperature.
///
/// `heat_cap` is the specific heat capacity in kJ/(kg·°C), `mass` in kg,
/// `temp` in °C. `heat_trans` (water only) is in kJ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThermalEntity {
    pub id: ObjectId,
    pub heat_cap: Rat,
    pub mass: Rat,
    pub temp: Rat,
    pub mode: CompMode,
    pub kind: EntityKind,
}

impl ThermalEntity {
    /// A plain entity in the default computation mode.
    pub fn basic(id: impl Into<ObjectId>, heat_cap: Rat, mass: Rat, temp: Rat) -> ThermalEntity {
        ThermalEntity {
            id: id.into(),
            heat_cap,
            mass,
            temp,
            mode: CompMode::Default,
            kind: EntityKind::Basic,
        }
    }

    /// A water entity; the computation mode follows the phase.
    pub fn water(
        id: impl Into<ObjectId>,
        heat_cap: Rat,
        mass: Rat,
        temp: Rat,
        phase: Phase,
        heat_trans: Rat,
    ) -> ThermalEntity {
        ThermalEntity {
            id: id.into(),
            heat_cap,
            mass,
            temp,
            mode: if phase.is_transitional() {
                CompMode::PhaseChange
            } else {
                CompMode::Default
            },
            kind: EntityKind::Water { phase, heat_trans },
        }
    }

    pub fn phase(&self) -> Option<Phase> {
        match &self.kind {
            EntityKind::Basic => None,
            EntityKind::Water { phase, .. } => Some(*phase),
        }
    }

    pub fn heat_trans(&self) -> Option<&Rat> {
        match &self.kind {
            EntityKind::Basic => None,
            EntityKind::Water { heat_trans, .. } => Some(heat_trans),
        }
    }

    /// Heat capacity of the whole body, `mass * heat_cap`, in kJ/°C.
    pub fn thermal_mass(&self) -> Rat {
        &self.mass * &self.heat_cap
    }
}

/// Transfer law of an interaction, with the law-specific coefficients.
///
/// `therm_cond` is thermal conductivity in kW/(m·°C), `thickness` in m,
/// `conv_coeff` in kW/(m²·°C), `emissiv` dimensionless in (0, 1].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InteractionKind {
    Conduction { therm_cond: Rat, thickness: Rat },
    Convection { conv_coeff: Rat },
    Radiation { emissiv: Rat },
}

impl InteractionKind {
    pub fn name(&self) -> &'static str {
        match self {
            InteractionKind::Conduction { .. } => "conduction",
            InteractionKind::Convection { .. } => "convection",
            InteractionKind::Radiation { .. } => "radiation",
        }
    }
}

/// A directed heat-transfer coupling between two entities.
///
/// `qdot` is the most recently computed flow rate in kW, positive when heat
/// moves from `entity1` to `entity2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThermalInteraction {
    pub id: ObjectId,
    pub kind: InteractionKind,
    pub entity1: ObjectId,
    pub entity2: ObjectId,
    pub area: Rat,
    pub qdot: Rat,
}

/// Thermostat half of a smart heater: switches on at or below `low_temp`,
/// off at or above `high_temp`, and emits `capacity` kW while on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmartHeater {
    pub status: HeaterStatus,
    pub low_temp: Rat,
    pub high_temp: Rat,
    pub capacity: Rat,
}

/// A heat source feeding one entity at `qdot` kW (never negative).
/// Plain sources hold their rate constant; smart ones switch it with the
/// thermostat.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeatGenerator {
    pub id: ObjectId,
    pub entity: ObjectId,
    pub qdot: Rat,
    pub smart: Option<SmartHeater>,
}

impl HeatGenerator {
    pub fn plain(id: impl Into<ObjectId>, entity: impl Into<ObjectId>, qdot: Rat) -> HeatGenerator {
        HeatGenerator {
            id: id.into(),
            entity: entity.into(),
            qdot,
            smart: None,
        }
    }

    /// A thermostat-controlled source; `qdot` is derived from the status.
    pub fn smart(
        id: impl Into<ObjectId>,
        entity: impl Into<ObjectId>,
        status: HeaterStatus,
        low_temp: Rat,
        high_temp: Rat,
        capacity: Rat,
    ) -> HeatGenerator {
        let qdot = match status {
            HeaterStatus::On => capacity.clone(),
            HeaterStatus::Off => Rat::zero(),
        };
        HeatGenerator {
            id: id.into(),
            entity: entity.into(),
            qdot,
            smart: Some(SmartHeater {
                status,
                low_temp,
                high_temp,
                capacity,
            }),
        }
    }
}

/// Any object a configuration can hold.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Object {
    Entity(ThermalEntity),
    Interaction(ThermalInteraction),
    Heater(HeatGenerator),
}

impl Object {
    pub fn id(&self) -> &ObjectId {
        match self {
            Object::Entity(e) => &e.id,
            Object::Interaction(i) => &i.id,
            Object::Heater(h) => &h.id,
        }
    }

    pub fn role(&self) -> &'static str {
        match self {
            Object::Entity(_) => "entity",
            Object::Interaction(_) => "interaction",
            Object::Heater(_) => "heater",
        }
    }
}

/// Lookup and construction errors on configurations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate object id {0}")]
    DuplicateId(ObjectId),
    #[error("{id} is a {actual}, not a {expected}")]
    RoleMismatch {
        id: ObjectId,
        expected: &'static str,
        actual: &'static str,
    },
}

/// An identifier-keyed collection of objects.
///
/// Two configurations are equal exactly when they hold structurally equal
/// objects under the same identifiers; insertion order never matters, and
/// all iteration is in lexicographic identifier order, which is what makes
/// every downstream computation deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Configuration {
    objects: BTreeMap<ObjectId, Object>,
}

impl Configuration {
    pub fn new() -> Configuration {
        Configuration::default()
    }

    /// Adds an object, rejecting identifier reuse.
    pub fn insert(&mut self, object: Object) -> Result<(), ModelError> {
        let id = object.id().clone();
        if self.objects.contains_key(&id) {
            return Err(ModelError::DuplicateId(id));
        }
        self.objects.insert(id, object);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn get(&self, id: &ObjectId) -> Option<&Object> {
        self.objects.get(id)
    }

    /// The entity named `id`: `Ok(None)` when absent, an error when the
    /// identifier names an object of a different role.
    pub fn entity(&self, id: &ObjectId) -> Result<Option<&ThermalEntity>, ModelError> {
        match self.objects.get(id) {
            None => Ok(None),
            Some(Object::Entity(e)) => Ok(Some(e)),
            Some(other) => Err(ModelError::RoleMismatch {
                id: id.clone(),
                expected: "entity",
                actual: other.role(),
            }),
        }
    }

    pub fn interaction(&self, id: &ObjectId) -> Result<Option<&ThermalInteraction>, ModelError> {
        match self.objects.get(id) {
            None => Ok(None),
            Some(Object::Interaction(i)) => Ok(Some(i)),
            Some(other) => Err(ModelError::RoleMismatch {
                id: id.clone(),
                expected: "interaction",
                actual: other.role(),
            }),
        }
    }

    pub fn heater(&self, id: &ObjectId) -> Result<Option<&HeatGenerator>, ModelError> {
        match self.objects.get(id) {
            None => Ok(None),
            Some(Object::Heater(h)) => Ok(Some(h)),
            Some(other) => Err(ModelError::RoleMismatch {
                id: id.clone(),
                expected: "heater",
                actual: other.role(),
            }),
        }
    }

    /// All entities in lexicographic id order.
    pub fn entities(&self) -> impl Iterator<Item = &ThermalEntity> {
        self.objects.values().filter_map(|o| match o {
            Object::Entity(e) => Some(e),
            _ => None,
        })
    }

    /// All interactions in lexicographic id order.
    pub fn interactions(&self) -> impl Iterator<Item = &ThermalInteraction> {
        self.objects.values().filter_map(|o| match o {
            Object::Interaction(i) => Some(i),
            _ => None,
        })
    }

    /// All heaters in lexicographic id order.
    pub fn heaters(&self) -> impl Iterator<Item = &HeatGenerator> {
        self.objects.values().filter_map(|o| match o {
            Object::Heater(h) => Some(h),
            _ => None,
        })
    }

    pub(crate) fn entity_mut(&mut self, id: &ObjectId) -> Option<&mut ThermalEntity> {
        match self.objects.get_mut(id) {
            Some(Object::Entity(e)) => Some(e),
            _ => None,
        }
    }

    pub(crate) fn interaction_mut(&mut self, id: &ObjectId) -> Option<&mut ThermalInteraction> {
        match self.objects.get_mut(id) {
            Some(Object::Interaction(i)) => Some(i),
            _ => None,
        }
    }

    pub(crate) fn heater_mut(&mut self, id: &ObjectId) -> Option<&mut HeatGenerator> {
        match self.objects.get_mut(id) {
            Some(Object::Heater(h)) => Some(h),
            _ => None,
        }
    }

    /// Checks every structural invariant, collecting all violations rather
    /// than stopping at the first.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut v = Violations::default();
        for entity in self.entities() {
            let id = &entity.id;
            v.require(entity.mass.is_positive(), id, "mass", "must be positive");
            v.require(
                entity.heat_cap.is_positive(),
                id,
                "heatCap",
                "must be positive",
            );
            match &entity.kind {
                EntityKind::Basic => {
                    v.require(
                        entity.mode == CompMode::Default,
                        id,
                        "mode",
                        "plain entities integrate in the default mode",
                    );
                }
                EntityKind::Water { phase, .. } => {
                    let coherent = phase.is_transitional() == (entity.mode == CompMode::PhaseChange);
                    v.require(
                        coherent,
                        id,
                        "mode",
                        "must be phaseChange exactly in transitional phases",
                    );
                }
            }
        }
        for interaction in self.interactions() {
            let id = &interaction.id;
            v.require(interaction.area.is_positive(), id, "area", "must be positive");
            v.require(
                interaction.entity1 != interaction.entity2,
                id,
                "entity2",
                "must differ from entity1",
            );
            for (field, end) in [
                ("entity1", &interaction.entity1),
                ("entity2", &interaction.entity2),
            ] {
                match self.get(end) {
                    Some(Object::Entity(_)) => {}
                    Some(other) => v.push(id, field, format!("{end} is a {}", other.role())),
                    None => v.push(id, field, format!("{end} does not exist")),
                }
            }
            match &interaction.kind {
                InteractionKind::Conduction {
                    therm_cond,
                    thickness,
                } => {
                    v.require(therm_cond.is_positive(), id, "thermCond", "must be positive");
                    v.require(thickness.is_positive(), id, "thickness", "must be positive");
                }
                InteractionKind::Convection { conv_coeff } => {
                    v.require(conv_coeff.is_positive(), id, "convCoeff", "must be positive");
                }
                InteractionKind::Radiation { emissiv } => {
                    v.require(
                        emissiv.is_positive() && *emissiv <= Rat::one(),
                        id,
                        "emissiv",
                        "must lie in (0, 1]",
                    );
                }
            }
        }
        for heater in self.heaters() {
            let id = &heater.id;
            match self.get(&heater.entity) {
                Some(Object::Entity(_)) => {}
                Some(other) => v.push(
                    id,
                    "entity",
                    format!("{} is a {}", heater.entity, other.role()),
                ),
                None => v.push(id, "entity", format!("{} does not exist", heater.entity)),
            }
            v.require(
                !heater.qdot.is_negative(),
                id,
                "qdot",
                "must not be negative",
            );
            if let Some(smart) = &heater.smart {
                v.require(
                    smart.low_temp < smart.high_temp,
                    id,
                    "lowTemp",
                    "must lie strictly below highTemp",
                );
                v.require(smart.capacity.is_positive(), id, "capacity", "must be positive");
                let expected = match smart.status {
                    HeaterStatus::On => smart.capacity.clone(),
                    HeaterStatus::Off => Rat::zero(),
                };
                v.require(
                    heater.qdot == expected,
                    id,
                    "qdot",
                    "must be the capacity while on and zero while off",
                );
            }
        }
        v.finish()
    }
}

/// One broken invariant: the offending object, field, and what went wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub id: ObjectId,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}: {}", self.id, self.field, self.message)
    }
}

/// Every invariant violation found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for violation in &self.violations {
            write!(f, " [{violation}]")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Violations(Vec<Violation>);

impl Violations {
    fn push(&mut self, id: &ObjectId, field: &str, message: String) {
        self.0.push(Violation {
            id: id.clone(),
            field: field.to_owned(),
            message,
        });
    }

    fn require(&mut self, ok: bool, id: &ObjectId, field: &str, message: &str) {
        if !ok {
            self.push(id, field, message.to_owned());
        }
    }

    fn finish(self) -> Result<(), ValidationReport> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { violations: self.0 })
        }
    }
}

/// A configuration together with the elapsed model time in seconds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemState {
    pub config: Configuration,
    pub clock: Rat,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene;

    fn cs1() -> Configuration {
        scene::builtin("cs1").unwrap().objects
    }

    #[test]
    fn builtin_configurations_validate() {
        for name in ["cs1", "cs2", "cs3"] {
            scene::builtin(name).unwrap().objects.validate().unwrap();
        }
    }

    #[test]
    fn getters_distinguish_absent_from_role_mismatch() {
        let config = cs1();
        assert!(config.entity(&"nosuch".into()).unwrap().is_none());
        assert_eq!(
            config.entity(&"crConduct".into()),
            Err(ModelError::RoleMismatch {
                id: "crConduct".into(),
                expected: "entity",
                actual: "interaction",
            })
        );
        assert_eq!(
            config.interaction(&"coffee".into()),
            Err(ModelError::RoleMismatch {
                id: "coffee".into(),
                expected: "interaction",
                actual: "entity",
            })
        );
        assert!(config
            .entity(&"coffee".into())
            .unwrap()
            .is_some_and(|e| e.temp == Rat::from(70i64)));
    }

    #[test]
    fn insert_rejects_duplicate_ids() {
        let mut config = cs1();
        let err = config
            .insert(Object::Entity(ThermalEntity::basic(
                "coffee",
                Rat::one(),
                Rat::one(),
                Rat::zero(),
            )))
            .unwrap_err();
        assert_eq!(err, ModelError::DuplicateId("coffee".into()));
    }

    #[test]
    fn validate_reports_every_violation() {
        let mut config = Configuration::new();
        config
            .insert(Object::Entity(ThermalEntity::basic(
                "block",
                Rat::zero(),             // bad heat capacity
                Rat::from(-1i64),        // bad mass
                Rat::zero(),
            )))
            .unwrap();
        config
            .insert(Object::Interaction(ThermalInteraction {
                id: "link".into(),
                kind: InteractionKind::Convection {
                    conv_coeff: Rat::one(),
                },
                entity1: "block".into(),
                entity2: "ghost".into(), // dangling
                area: Rat::one(),
                qdot: Rat::zero(),
            }))
            .unwrap();
        let report = config.validate().unwrap_err();
        let fields: Vec<(String, String)> = report
            .violations
            .iter()
            .map(|v| (v.id.to_string(), v.field.clone()))
            .collect();
        assert!(fields.contains(&("block".into(), "mass".into())));
        assert!(fields.contains(&("block".into(), "heatCap".into())));
        assert!(fields.contains(&("link".into(), "entity2".into())));
        assert_eq!(report.violations.len(), 3);
    }

    #[test]
    fn validate_checks_phase_mode_coherence() {
        let mut entity = ThermalEntity::water(
            "w",
            Rat::one(),
            Rat::one(),
            Rat::zero(),
            Phase::Melting,
            Rat::zero(),
        );
        entity.mode = CompMode::Default; // incoherent on purpose
        let mut config = Configuration::new();
        config.insert(Object::Entity(entity)).unwrap();
        let report = config.validate().unwrap_err();
        assert_eq!(report.violations[0].field, "mode");
    }

    #[test]
    fn validate_checks_smart_heater_coherence() {
        let mut config = Configuration::new();
        config
            .insert(Object::Entity(ThermalEntity::basic(
                "tank",
                Rat::one(),
                Rat::one(),
                Rat::zero(),
            )))
            .unwrap();
        let mut heater = HeatGenerator::smart(
            "boost",
            "tank",
            HeaterStatus::Off,
            Rat::from(80i64), // low above high
            Rat::from(70i64),
            Rat::new(15, 10),
        );
        heater.qdot = Rat::one(); // incoherent with off
        config.insert(Object::Heater(heater)).unwrap();
        let report = config.validate().unwrap_err();
        let fields: Vec<&str> = report.violations.iter().map(|v| v.field.as_str()).collect();
        assert!(fields.contains(&"lowTemp"));
        assert!(fields.contains(&"qdot"));
    }

    #[test]
    fn equality_ignores_insertion_order() {
        let scene = scene::builtin("cs1").unwrap();
        let mut reversed = Configuration::new();
        let objects: Vec<Object> = scene
            .objects
            .entities()
            .map(|e| Object::Entity(e.clone()))
            .chain(
                scene
                    .objects
                    .interactions()
                    .map(|i| Object::Interaction(i.clone())),
            )
            .collect();
        for object in objects.into_iter().rev() {
            reversed.insert(object).unwrap();
        }
        assert_eq!(reversed, scene.objects);
    }
}
