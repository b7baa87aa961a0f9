//! Scene definitions: an object configuration plus run parameters and named
//! predicates, loadable from a small sectioned text format.
//!
//! A scene is the unit the command line and the analyses consume. Three
//! builtin scenes ship with the crate: `cs1` (hot coffee cooling in a
//! room), `cs2` (frozen coffee on a constant boiler, driven through
//! melting), and `cs3` (supercooled coffee under a thermostat-controlled
//! heater, which pins itself in a freezing transition — useful for
//! exercising vacuous temporal properties).

pub mod parse;
pub mod predicate;

pub use parse::{parse_scene, ParseError};
pub use predicate::{
    parse_predicate, ArithExpr, Attr, CmpOp, EvalError, PredParseError, Predicate,
};

use crate::model::{
    Configuration, HeatGenerator, HeaterStatus, InteractionKind, Object, Phase, SystemState,
    ThermalEntity, ThermalInteraction, ValidationReport, Violation,
};
use crate::numeric::Rat;
use crate::physics::PhysConstants;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Run parameters: integration step, display precision, and the physical
/// constants the laws and phase rules read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneParams {
    /// Integration step in s; must be positive.
    pub time_step: Rat,
    /// Fraction digits used whenever a value is printed.
    pub precision: u32,
    pub constants: PhysConstants,
}

impl Default for SceneParams {
    fn default() -> SceneParams {
        SceneParams {
            time_step: Rat::one(),
            precision: 10,
            constants: PhysConstants::default(),
        }
    }
}

/// A complete scene: parameters, the initial objects, and named predicates
/// that temporal formulas can refer to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneDef {
    pub params: SceneParams,
    pub objects: Configuration,
    pub props: BTreeMap<String, Predicate>,
}

impl SceneDef {
    pub fn new(params: SceneParams, objects: Configuration) -> SceneDef {
        SceneDef {
            params,
            objects,
            props: BTreeMap::new(),
        }
    }

    /// The state every run starts from: the scene's objects at clock 0.
    pub fn initial_state(&self) -> SystemState {
        SystemState {
            config: self.objects.clone(),
            clock: Rat::zero(),
        }
    }

    pub fn prop(&self, name: &str) -> Option<&Predicate> {
        self.props.get(name)
    }

    /// Checks parameters, objects, and props, collecting all violations.
    /// Parameter problems are reported under the pseudo-id `params`, prop
    /// problems under `prop <name>`.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut violations = Vec::new();
        let mut param = |ok: bool, field: &str, message: &str| {
            if !ok {
                violations.push(Violation {
                    id: "params".into(),
                    field: field.to_owned(),
                    message: message.to_owned(),
                });
            }
        };
        param(
            self.params.time_step.is_positive(),
            "timeStep",
            "must be positive",
        );
        param(self.params.precision >= 1, "precision", "must be at least 1");
        let c = &self.params.constants;
        param(c.stef_bolz.is_positive(), "stefBolz", "must be positive");
        param(
            c.latent_fusion.is_positive(),
            "latentFusion",
            "must be positive",
        );
        param(
            c.latent_vapor.is_positive(),
            "latentVapor",
            "must be positive",
        );
        param(
            c.melt_point < c.boil_point,
            "meltPoint",
            "must lie below boilPoint",
        );
        if let Err(report) = self.objects.validate() {
            violations.extend(report.violations);
        }
        for (name, pred) in &self.props {
            // a prop must at least be evaluable on the initial objects
            if let Err(EvalError::MissingAttribute { attr, id }) = pred.eval(&self.objects) {
                violations.push(Violation {
                    id: format!("prop {name}").into(),
                    field: attr.to_owned(),
                    message: format!("references {id}, which the scene lacks"),
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { violations })
        }
    }

    /// Serializes the scene in the same text format `parse_scene` reads;
    /// the round trip yields a structurally equal scene.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.params.constants;
        out.push_str("[params]\n");
        let _ = writeln!(out, "timeStep = {}", self.params.time_step);
        let _ = writeln!(out, "precision = {}", self.params.precision);
        let _ = writeln!(out, "stefBolz = {}", c.stef_bolz);
        let _ = writeln!(out, "latentFusion = {}", c.latent_fusion);
        let _ = writeln!(out, "latentVapor = {}", c.latent_vapor);
        let _ = writeln!(out, "meltPoint = {}", c.melt_point);
        let _ = writeln!(out, "boilPoint = {}", c.boil_point);
        for e in self.objects.entities() {
            let _ = writeln!(out, "\n[entity {}]", e.id);
            let _ = writeln!(out, "mass = {}", e.mass);
            let _ = writeln!(out, "heatCap = {}", e.heat_cap);
            let _ = writeln!(out, "temp = {}", e.temp);
            if let Some(phase) = e.phase() {
                let _ = writeln!(out, "kind = water");
                let _ = writeln!(out, "phase = {phase}");
                let _ = writeln!(out, "heatTrans = {}", e.heat_trans().unwrap());
            } else {
                let _ = writeln!(out, "kind = basic");
            }
        }
        for i in self.objects.interactions() {
            let _ = writeln!(out, "\n[interaction {}]", i.id);
            let _ = writeln!(out, "kind = {}", i.kind.name());
            let _ = writeln!(out, "entity1 = {}", i.entity1);
            let _ = writeln!(out, "entity2 = {}", i.entity2);
            let _ = writeln!(out, "area = {}", i.area);
            match &i.kind {
                InteractionKind::Conduction {
                    therm_cond,
                    thickness,
                } => {
                    let _ = writeln!(out, "thermCond = {therm_cond}");
                    let _ = writeln!(out, "thickness = {thickness}");
                }
                InteractionKind::Convection { conv_coeff } => {
                    let _ = writeln!(out, "convCoeff = {conv_coeff}");
                }
                InteractionKind::Radiation { emissiv } => {
                    let _ = writeln!(out, "emissiv = {emissiv}");
                }
            }
            let _ = writeln!(out, "qdot = {}", i.qdot);
        }
        for h in self.objects.heaters() {
            let _ = writeln!(out, "\n[heater {}]", h.id);
            let _ = writeln!(out, "entity = {}", h.entity);
            match &h.smart {
                None => {
                    let _ = writeln!(out, "qdot = {}", h.qdot);
                }
                Some(s) => {
                    let _ = writeln!(out, "status = {}", s.status);
                    let _ = writeln!(out, "lowTemp = {}", s.low_temp);
                    let _ = writeln!(out, "highTemp = {}", s.high_temp);
                    let _ = writeln!(out, "capacity = {}", s.capacity);
                }
            }
        }
        for (name, pred) in &self.props {
            let _ = writeln!(out, "\n[prop {name}]");
            let _ = writeln!(out, "expr = {pred}");
        }
        out
    }
}

/// Exact constants behind the builtin coffee scenes, with their
/// derivations. π is taken as 22/7 so every derived figure stays rational;
/// all units are SI with energy in kJ and power in kW.
pub mod constants {
    use crate::numeric::Rat;

    /// π as the classical rational approximation 22/7.
    pub fn pi() -> Rat {
        Rat::new(22, 7)
    }

    /// Cup inner radius, m.
    pub fn cup_radius() -> Rat {
        Rat::new(4, 100)
    }

    /// Height of the coffee column, m.
    pub fn cup_height() -> Rat {
        Rat::new(9, 100)
    }

    /// Cup wall thickness, m.
    pub fn cup_thickness() -> Rat {
        Rat::new(1, 200)
    }

    /// Cup base disc π·r² = 22/4375 m².
    pub fn cup_base_area() -> Rat {
        pi() * cup_radius().pow(2)
    }

    /// Cup side wall 2π·r·h = 99/4375 m².
    pub fn cup_side_area() -> Rat {
        Rat::from(2i64) * pi() * cup_radius() * cup_height()
    }

    /// Conduction happens through base and side: 121/4375 m².
    pub fn conduction_area() -> Rat {
        cup_base_area() + cup_side_area()
    }

    /// Convection happens at the open top: 22/4375 m².
    pub fn convection_area() -> Rat {
        cup_base_area()
    }

    /// Density of coffee (water), kg/m³.
    pub fn coffee_density() -> Rat {
        Rat::from(1000i64)
    }

    /// Coffee mass: density × base × height = 396/875 kg ≈ 0.4526 kg.
    pub fn coffee_mass() -> Rat {
        coffee_density() * cup_base_area() * cup_height()
    }

    /// Specific heat of coffee, 4.2 kJ/(kg·°C).
    pub fn coffee_heat_cap() -> Rat {
        Rat::new(42, 10)
    }

    /// Density of room air, 1.2 kg/m³.
    pub fn air_density() -> Rat {
        Rat::new(12, 10)
    }

    /// Room air volume, 4 m × 4 m × 4 m = 64 m³.
    pub fn room_volume() -> Rat {
        Rat::from(64i64)
    }

    /// Room air mass: density × volume = 384/5 kg = 76.8 kg.
    pub fn room_mass() -> Rat {
        air_density() * room_volume()
    }

    /// Specific heat of room air, 1.05 kJ/(kg·°C).
    pub fn room_heat_cap() -> Rat {
        Rat::new(21, 20)
    }

    /// Thermal conductivity of the ceramic cup wall, 0.0015 kW/(m·°C).
    pub fn cup_conductivity() -> Rat {
        Rat::new(15, 10_000)
    }

    /// Convective transfer coefficient at the coffee surface,
    /// 0.02 kW/(m²·°C).
    pub fn surface_conv_coeff() -> Rat {
        Rat::new(20, 1_000)
    }

    /// Heater power, 1.5 kW, used by both the boiler and the thermostat.
    pub fn heater_power() -> Rat {
        Rat::new(15, 10)
    }
}

/// The builtin scenes by name (`cs1`, `cs2`, `cs3`); `None` otherwise.
///
/// All three share the same cup of coffee in the same room, coupled by one
/// conductive and one convective interaction. They differ in the coffee's
/// starting state and in what drives it.
pub fn builtin(name: &str) -> Option<SceneDef> {
    use constants as k;
    let coffee = match name {
        // hot coffee, simply cooling
        "cs1" => ThermalEntity::basic("coffee", k::coffee_heat_cap(), k::coffee_mass(), 70.into()),
        // frozen coffee that a boiler will push through melting
        "cs2" => ThermalEntity::water(
            "coffee",
            k::coffee_heat_cap(),
            k::coffee_mass(),
            (-10).into(),
            Phase::Solid,
            Rat::zero(),
        ),
        // supercooled liquid: the freezing transition captures it at once
        "cs3" => ThermalEntity::water(
            "coffee",
            k::coffee_heat_cap(),
            k::coffee_mass(),
            (-20).into(),
            Phase::Liquid,
            Rat::zero(),
        ),
        _ => return None,
    };
    let mut objects = Configuration::new();
    let mut add = |object: Object| objects.insert(object).expect("builtin ids are distinct");
    add(Object::Entity(coffee));
    add(Object::Entity(ThermalEntity::basic(
        "room",
        k::room_heat_cap(),
        k::room_mass(),
        20.into(),
    )));
    add(Object::Interaction(ThermalInteraction {
        id: "crConduct".into(),
        kind: InteractionKind::Conduction {
            therm_cond: k::cup_conductivity(),
            thickness: k::cup_thickness(),
        },
        entity1: "coffee".into(),
        entity2: "room".into(),
        area: k::conduction_area(),
        qdot: Rat::zero(),
    }));
    add(Object::Interaction(ThermalInteraction {
        id: "crConvect".into(),
        kind: InteractionKind::Convection {
            conv_coeff: k::surface_conv_coeff(),
        },
        entity1: "coffee".into(),
        entity2: "room".into(),
        area: k::convection_area(),
        qdot: Rat::zero(),
    }));
    match name {
        "cs2" => add(Object::Heater(HeatGenerator::plain(
            "boiler",
            "coffee",
            k::heater_power(),
        ))),
        "cs3" => add(Object::Heater(HeatGenerator::smart(
            "coffeeHeater",
            "coffee",
            HeaterStatus::Off,
            70.into(),
            80.into(),
            k::heater_power(),
        ))),
        _ => {}
    }
    let mut def = SceneDef::new(SceneParams::default(), objects);
    if name == "cs3" {
        let temp_ok = parse_predicate(
            "temp(coffee) >= 139/2 and temp(coffee) <= 161/2",
            &def.objects,
        )
        .expect("builtin prop parses");
        def.props.insert("temp-ok".to_owned(), temp_ok);
    }
    debug_assert!(def.validate().is_ok());
    Some(def)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["cs1", "cs2", "cs3"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_geometry_reduces_to_expected_fractions() {
        assert_eq!(constants::cup_base_area(), Rat::new(22, 4375));
        assert_eq!(constants::cup_side_area(), Rat::new(99, 4375));
        assert_eq!(constants::conduction_area(), Rat::new(121, 4375));
        assert_eq!(constants::convection_area(), Rat::new(22, 4375));
        assert_eq!(constants::coffee_mass(), Rat::new(396, 875));
        assert_eq!(constants::room_mass(), Rat::new(384, 5));
    }

    #[test]
    fn builtins_exist_and_validate() {
        for name in BUILTIN_NAMES {
            let def = builtin(name).unwrap();
            assert_eq!(def.validate(), Ok(()), "{name}");
            assert_eq!(def.initial_state().clock, Rat::zero());
        }
        assert!(builtin("cs4").is_none());
    }

    #[test]
    fn builtin_shapes() {
        let cs1 = builtin("cs1").unwrap();
        assert_eq!(cs1.objects.len(), 4);
        assert!(cs1.props.is_empty());
        let cs2 = builtin("cs2").unwrap();
        let coffee = cs2.objects.entity(&"coffee".into()).unwrap().unwrap();
        assert_eq!(coffee.phase(), Some(Phase::Solid));
        assert_eq!(coffee.temp, Rat::from(-10i64));
        let cs3 = builtin("cs3").unwrap();
        let heater = cs3.objects.heater(&"coffeeHeater".into()).unwrap().unwrap();
        assert_eq!(heater.qdot, Rat::zero()); // off until the thermostat acts
        assert!(cs3.props.contains_key("temp-ok"));
    }

    #[test]
    fn validate_collects_parameter_violations() {
        let mut def = builtin("cs1").unwrap();
        def.params.time_step = Rat::zero();
        def.params.precision = 0;
        def.params.constants.melt_point = Rat::from(200i64);
        let report = def.validate().unwrap_err();
        let fields: Vec<&str> = report
            .violations
            .iter()
            .map(|v| v.field.as_str())
            .collect();
        assert_eq!(fields, ["timeStep", "precision", "meltPoint"]);
        assert!(report.violations.iter().all(|v| v.id == "params".into()));
    }

    #[test]
    fn validate_rejects_prop_referencing_missing_object() {
        let cs3 = builtin("cs3").unwrap();
        let mut cs1 = builtin("cs1").unwrap();
        // steal cs3's thermostat prop… which cs1 cannot evaluate
        cs1.props = cs3.props.clone();
        cs1.props.insert(
            "heater-on".to_owned(),
            parse_predicate("statusIs(coffeeHeater, on)", &cs3.objects).unwrap(),
        );
        let report = cs1.validate().unwrap_err();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].id, "prop heater-on".into());
    }

    #[test]
    fn serialized_text_parses_back_to_an_equal_scene() {
        for name in BUILTIN_NAMES {
            let def = builtin(name).unwrap();
            let text = def.to_text();
            let reparsed = parse_scene(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(def, reparsed, "{name}");
        }
    }
}
