//! Urgent discrete rules and the combined discrete/continuous step.
//!
//! Between integration ticks the configuration must be discretely quiescent:
//! water entities that have reached a phase boundary switch phase, and
//! thermostat-controlled heaters whose entity has crossed a threshold
//! switch status. These rules are *urgent* — time may not advance while any
//! of them is enabled — and they commute (distinct subjects write disjoint
//! state, and at most one rule per subject is ever enabled), so repeatedly
//! applying the first enabled rule reaches the unique normal form.

use crate::model::{
    CompMode, Configuration, EntityKind, HeaterStatus, ObjectId, Phase, SystemState,
};
use crate::numeric::Rat;
use crate::physics::{compute_qdots, compute_temps, PhysConstants};
use std::fmt;
use thiserror::Error;

/// The discrete rules: eight phase transitions walking the water cycle,
/// plus the two thermostat switches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleName {
    SolidToMelting,
    MeltingToLiquid,
    LiquidToEvaporating,
    EvaporatingToGas,
    GasToCondensing,
    CondensingToLiquid,
    LiquidToFreezing,
    FreezingToSolid,
    TurnOn,
    TurnOff,
}

impl RuleName {
    pub fn name(self) -> &'static str {
        match self {
            RuleName::SolidToMelting => "solid-to-melting",
            RuleName::MeltingToLiquid => "melting-to-liquid",
            RuleName::LiquidToEvaporating => "liquid-to-evaporating",
            RuleName::EvaporatingToGas => "evaporating-to-gas",
            RuleName::GasToCondensing => "gas-to-condensing",
            RuleName::CondensingToLiquid => "condensing-to-liquid",
            RuleName::LiquidToFreezing => "liquid-to-freezing",
            RuleName::FreezingToSolid => "freezing-to-solid",
            RuleName::TurnOn => "turnOn",
            RuleName::TurnOff => "turnOff",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rule together with the object it fires on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: RuleName,
    pub subject: ObjectId,
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.rule, self.subject)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("rule {rule} is not enabled on {subject}")]
    RuleNotEnabled { rule: RuleName, subject: ObjectId },
    #[error("time cannot advance: urgent rule {rule} is pending on {subject}")]
    UrgencyViolation { rule: RuleName, subject: ObjectId },
    #[error(
        "discrete rules did not quiesce within {limit} applications \
         (likely livelock; last fired {last})"
    )]
    Livelock { limit: usize, last: RuleInstance },
}

/// All currently enabled rule instances, in canonical order: phase rules
/// over entities in lexicographic id order, then thermostat rules over
/// heaters in lexicographic id order. At most one rule is enabled per
/// subject.
pub fn enabled_rules(config: &Configuration, consts: &PhysConstants) -> Vec<RuleInstance> {
    let mut rules = Vec::new();
    for entity in config.entities() {
        let EntityKind::Water { phase, heat_trans } = &entity.kind else {
            continue;
        };
        let per_mass = |qt: &Rat| qt / &entity.mass;
        let rule = match phase {
            Phase::Solid if entity.temp >= consts.melt_point => RuleName::SolidToMelting,
            Phase::Melting if per_mass(heat_trans) >= consts.latent_fusion => {
                RuleName::MeltingToLiquid
            }
            Phase::Liquid if entity.temp >= consts.boil_point => RuleName::LiquidToEvaporating,
            Phase::Liquid if entity.temp < consts.melt_point => RuleName::LiquidToFreezing,
            Phase::Evaporating if per_mass(heat_trans) >= consts.latent_vapor => {
                RuleName::EvaporatingToGas
            }
            Phase::Gas if entity.temp < consts.boil_point => RuleName::GasToCondensing,
            Phase::Condensing if per_mass(heat_trans) <= -&consts.latent_vapor => {
                RuleName::CondensingToLiquid
            }
            Phase::Freezing if per_mass(heat_trans) <= -&consts.latent_fusion => {
                RuleName::FreezingToSolid
            }
            _ => continue,
        };
        rules.push(RuleInstance {
            rule,
            subject: entity.id.clone(),
        });
    }
    for heater in config.heaters() {
        let Some(smart) = &heater.smart else { continue };
        let temp = &config
            .entity(&heater.entity)
            .expect("validated configuration")
            .expect("validated configuration")
            .temp;
        let rule = match smart.status {
            HeaterStatus::Off if *temp <= smart.low_temp => RuleName::TurnOn,
            HeaterStatus::On if *temp >= smart.high_temp => RuleName::TurnOff,
            _ => continue,
        };
        rules.push(RuleInstance {
            rule,
            subject: heater.id.clone(),
        });
    }
    rules
}

/// True when no urgent rule is enabled, i.e. time may advance.
pub fn time_can_advance(config: &Configuration, consts: &PhysConstants) -> bool {
    enabled_rules(config, consts).is_empty()
}

/// Applies one rule instance, failing if its guard does not hold.
///
/// Entering a transitional phase zeroes the latent-heat accumulator and
/// switches the entity to the phase-change mode; leaving one restores the
/// default mode (the accumulator keeps its final value but goes inert).
pub fn apply_rule(
    config: &Configuration,
    instance: &RuleInstance,
    consts: &PhysConstants,
) -> Result<Configuration, EngineError> {
    if !enabled_rules(config, consts).contains(instance) {
        return Err(EngineError::RuleNotEnabled {
            rule: instance.rule,
            subject: instance.subject.clone(),
        });
    }
    let mut next = config.clone();
    match instance.rule {
        RuleName::TurnOn => {
            let heater = next.heater_mut(&instance.subject).expect("guard checked");
            let smart = heater.smart.as_mut().expect("guard checked");
            smart.status = HeaterStatus::On;
            heater.qdot = smart.capacity.clone();
        }
        RuleName::TurnOff => {
            let heater = next.heater_mut(&instance.subject).expect("guard checked");
            let smart = heater.smart.as_mut().expect("guard checked");
            smart.status = HeaterStatus::Off;
            heater.qdot = Rat::zero();
        }
        rule => {
            let (target, entering_transition) = match rule {
                RuleName::SolidToMelting => (Phase::Melting, true),
                RuleName::LiquidToEvaporating => (Phase::Evaporating, true),
                RuleName::GasToCondensing => (Phase::Condensing, true),
                RuleName::LiquidToFreezing => (Phase::Freezing, true),
                RuleName::MeltingToLiquid => (Phase::Liquid, false),
                RuleName::EvaporatingToGas => (Phase::Gas, false),
                RuleName::CondensingToLiquid => (Phase::Liquid, false),
                RuleName::FreezingToSolid => (Phase::Solid, false),
                RuleName::TurnOn | RuleName::TurnOff => unreachable!(),
            };
            let entity = next.entity_mut(&instance.subject).expect("guard checked");
            let EntityKind::Water { phase, heat_trans } = &mut entity.kind else {
                unreachable!("guard checked");
            };
            *phase = target;
            if entering_transition {
                *heat_trans = Rat::zero();
                entity.mode = CompMode::PhaseChange;
            } else {
                entity.mode = CompMode::Default;
            }
        }
    }
    Ok(next)
}

/// Applies enabled rules in canonical order until none remains, returning
/// the unique normal form.
///
/// The rules cannot cycle on a valid configuration (each transitional phase
/// must accumulate latent heat before it can be left again, and thermostat
/// thresholds are strictly ordered), so the iteration cap of four
/// applications per object is a diagnostic backstop, not a tuning knob.
pub fn normalize_discrete(
    config: &Configuration,
    consts: &PhysConstants,
) -> Result<Configuration, EngineError> {
    let limit = 4 * config.len();
    let mut current = config.clone();
    for _ in 0..limit {
        let Some(instance) = enabled_rules(&current, consts).into_iter().next() else {
            return Ok(current);
        };
        current = apply_rule(&current, &instance, consts)?;
    }
    match enabled_rules(&current, consts).into_iter().next() {
        None => Ok(current),
        Some(last) => Err(EngineError::Livelock { limit, last }),
    }
}

/// Advances time by `h`: recomputes flow rates from current temperatures,
/// then integrates every entity one Euler step. Fails if an urgent rule is
/// still pending.
pub fn tick(
    state: &SystemState,
    h: &Rat,
    consts: &PhysConstants,
) -> Result<SystemState, EngineError> {
    if let Some(pending) = enabled_rules(&state.config, consts).into_iter().next() {
        return Err(EngineError::UrgencyViolation {
            rule: pending.rule,
            subject: pending.subject,
        });
    }
    Ok(SystemState {
        config: compute_temps(&compute_qdots(&state.config, consts), h),
        clock: &state.clock + h,
    })
}

/// One full step: normalize the discrete rules, then tick.
pub fn step(
    state: &SystemState,
    h: &Rat,
    consts: &PhysConstants,
) -> Result<SystemState, EngineError> {
    let normalized = SystemState {
        config: normalize_discrete(&state.config, consts)?,
        clock: state.clock.clone(),
    };
    tick(&normalized, h, consts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{HeatGenerator, Object, SmartHeater, ThermalEntity};
    use crate::scene;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn consts() -> PhysConstants {
        PhysConstants::default()
    }

    fn initial(name: &str) -> SystemState {
        SystemState {
            config: scene::builtin(name).unwrap().objects,
            clock: Rat::zero(),
        }
    }

    fn water_at(temp: Rat, phase: Phase, heat_trans: Rat) -> Configuration {
        let mut config = Configuration::new();
        config
            .insert(Object::Entity(ThermalEntity::water(
                "w",
                r(42, 10),
                Rat::from(2i64),
                temp,
                phase,
                heat_trans,
            )))
            .unwrap();
        config
    }

    #[test]
    fn no_rule_fires_below_the_melting_point() {
        assert_eq!(enabled_rules(&initial("cs2").config, &consts()), vec![]);
        assert!(time_can_advance(&initial("cs2").config, &consts()));
    }

    #[test]
    fn solid_reaching_melt_point_enables_melting() {
        for temp in [Rat::zero(), r(1, 2)] {
            let config = water_at(temp, Phase::Solid, Rat::zero());
            assert_eq!(
                enabled_rules(&config, &consts()),
                vec![RuleInstance {
                    rule: RuleName::SolidToMelting,
                    subject: "w".into(),
                }]
            );
        }
    }

    #[test]
    fn transitional_guards_compare_accumulated_heat_per_mass() {
        // mass 2, latent fusion 334: needs heat_trans >= 668
        let not_yet = water_at(Rat::zero(), Phase::Melting, r(667, 1));
        assert!(enabled_rules(&not_yet, &consts()).is_empty());
        let ready = water_at(Rat::zero(), Phase::Melting, r(668, 1));
        assert_eq!(
            enabled_rules(&ready, &consts())[0].rule,
            RuleName::MeltingToLiquid
        );
        // exothermic direction: freezing completes at heat_trans <= -668
        let freezing = water_at(-Rat::one(), Phase::Freezing, r(-668, 1));
        assert_eq!(
            enabled_rules(&freezing, &consts())[0].rule,
            RuleName::FreezingToSolid
        );
    }

    #[test]
    fn cooling_entry_guards_are_strict() {
        // gas exactly at the boiling point stays gas
        let gas = water_at(Rat::from(100i64), Phase::Gas, Rat::zero());
        assert!(enabled_rules(&gas, &consts()).is_empty());
        let cooler = water_at(r(199, 2), Phase::Gas, Rat::zero());
        assert_eq!(
            enabled_rules(&cooler, &consts())[0].rule,
            RuleName::GasToCondensing
        );
        // liquid exactly at the melting point stays liquid
        let liquid = water_at(Rat::zero(), Phase::Liquid, Rat::zero());
        assert!(enabled_rules(&liquid, &consts()).is_empty());
    }

    #[test]
    fn cs3_enables_freezing_then_thermostat_in_canonical_order()    {
        let config = initial("cs3").config;
        let rules = enabled_rules(&config, &consts());
        assert_eq!(
            rules,
            vec![
                RuleInstance {
                    rule: RuleName::LiquidToFreezing,
                    subject: "coffee".into(),
                },
                RuleInstance {
                    rule: RuleName::TurnOn,
                    subject: "coffeeHeater".into(),
                },
            ]
        );
        assert!(!time_can_advance(&config, &consts()));
    }

    #[test]
    fn apply_rule_rejects_disabled_instances() {
        let config = initial("cs2").config;
        let err = apply_rule(
            &config,
            &RuleInstance {
                rule: RuleName::SolidToMelting,
                subject: "coffee".into(),
            },
            &consts(),
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::RuleNotEnabled { .. }));
    }

    #[test]
    fn entering_a_transition_zeroes_the_accumulator() {
        let config = water_at(r(5, 1), Phase::Solid, r(99, 1));
        let melted = apply_rule(
            &config,
            &RuleInstance {
                rule: RuleName::SolidToMelting,
                subject: "w".into(),
            },
            &consts(),
        )
        .unwrap();
        let w = melted.entity(&"w".into()).unwrap().unwrap();
        assert_eq!(w.phase(), Some(Phase::Melting));
        assert_eq!(w.mode, CompMode::PhaseChange);
        assert_eq!(w.heat_trans(), Some(&Rat::zero()));
        assert_eq!(w.temp, r(5, 1)); // temperature untouched
    }

    #[test]
    fn leaving_a_transition_keeps_the_accumulator_inert() {
        let config = water_at(Rat::zero(), Phase::Melting, r(700, 1));
        let liquid = apply_rule(
            &config,
            &RuleInstance {
                rule: RuleName::MeltingToLiquid,
                subject: "w".into(),
            },
            &consts(),
        )
        .unwrap();
        let w = liquid.entity(&"w".into()).unwrap().unwrap();
        assert_eq!(w.phase(), Some(Phase::Liquid));
        assert_eq!(w.mode, CompMode::Default);
        assert_eq!(w.heat_trans(), Some(&r(700, 1)));
    }

    #[test]
    fn normalization_reaches_the_same_form_in_either_order() {
        let config = initial("cs3").config;
        let consts = consts();
        let rules = enabled_rules(&config, &consts);
        assert_eq!(rules.len(), 2);
        let ab = apply_rule(&apply_rule(&config, &rules[0], &consts).unwrap(), &rules[1], &consts)
            .unwrap();
        let ba = apply_rule(&apply_rule(&config, &rules[1], &consts).unwrap(), &rules[0], &consts)
            .unwrap();
        assert_eq!(ab, ba);
        assert_eq!(normalize_discrete(&config, &consts).unwrap(), ab);
        let heater = ab.heater(&"coffeeHeater".into()).unwrap().unwrap();
        assert_eq!(heater.smart.as_ref().unwrap().status, HeaterStatus::On);
        assert_eq!(heater.qdot, r(15, 10));
        assert_eq!(
            ab.entity(&"coffee".into()).unwrap().unwrap().phase(),
            Some(Phase::Freezing)
        );
    }

    #[test]
    fn normalization_is_identity_on_quiescent_configurations() {
        let config = initial("cs1").config;
        assert_eq!(normalize_discrete(&config, &consts()).unwrap(), config);
    }

    #[test]
    fn chained_transitions_normalize_in_one_pass() {
        // melting at the boiling point with enough accumulated heat first
        // completes the melt, then immediately starts to evaporate
        let config = water_at(Rat::from(100i64), Phase::Melting, r(668, 1));
        let normal = normalize_discrete(&config, &consts()).unwrap();
        let w = normal.entity(&"w".into()).unwrap().unwrap();
        assert_eq!(w.phase(), Some(Phase::Evaporating));
        assert_eq!(w.heat_trans(), Some(&Rat::zero()));
        assert_eq!(w.mode, CompMode::PhaseChange);
    }

    #[test]
    fn inverted_thermostat_thresholds_livelock_and_are_diagnosed() {
        // invalid on purpose (validate would reject low >= high): the
        // thermostat then flips forever and the cap must catch it
        let mut config = Configuration::new();
        config
            .insert(Object::Entity(ThermalEntity::basic(
                "tank",
                Rat::one(),
                Rat::one(),
                Rat::from(75i64),
            )))
            .unwrap();
        config
            .insert(Object::Heater(HeatGenerator {
                id: "flappy".into(),
                entity: "tank".into(),
                qdot: Rat::zero(),
                smart: Some(SmartHeater {
                    status: HeaterStatus::Off,
                    low_temp: Rat::from(80i64),
                    high_temp: Rat::from(70i64),
                    capacity: Rat::one(),
                }),
            }))
            .unwrap();
        let err = normalize_discrete(&config, &consts()).unwrap_err();
        assert!(matches!(err, EngineError::Livelock { limit: 8, .. }));
    }

    #[test]
    fn tick_refuses_to_advance_past_pending_rules() {
        let err = tick(&initial("cs3"), &Rat::one(), &consts()).unwrap_err();
        assert_eq!(
            err,
            EngineError::UrgencyViolation {
                rule: RuleName::LiquidToFreezing,
                subject: "coffee".into(),
            }
        );
    }

    #[test]
    fn tick_advances_clock_and_temperatures_together() {
        let next = tick(&initial("cs1"), &Rat::one(), &consts()).unwrap();
        assert_eq!(next.clock, Rat::one());
        assert_eq!(
            next.config.entity(&"coffee".into()).unwrap().unwrap().temp,
            r(580283, 8316)
        );
        assert_eq!(
            next.config.interaction(&"crConduct".into()).unwrap().unwrap().qdot,
            r(363, 875)
        );
        assert_eq!(
            next.config.interaction(&"crConvect".into()).unwrap().unwrap().qdot,
            r(22, 4375)
        );
    }

    #[test]
    fn step_normalizes_before_ticking() {
        let after = step(&initial("cs3"), &Rat::one(), &consts()).unwrap();
        assert_eq!(after.clock, Rat::one());
        let coffee = after.config.entity(&"coffee".into()).unwrap().unwrap();
        assert_eq!(coffee.phase(), Some(Phase::Freezing));
        assert_eq!(coffee.temp, Rat::from(-20i64)); // held during the change
        assert!(coffee.heat_trans().unwrap().is_positive()); // net inflow
    }

    #[test]
    fn melting_run_accumulates_frozen_heat_value() {
        // drive the solid coffee scene until the melt begins, then one more
        // step: the accumulator takes exactly one tick's net inflow
        let consts = consts();
        let h = Rat::one();
        let mut state = initial("cs2");
        while state
            .config
            .entity(&"coffee".into())
            .unwrap()
            .unwrap()
            .phase()
            == Some(Phase::Solid)
        {
            state = step(&state, &h, &consts).unwrap();
            assert!(state.clock <= Rat::from(20i64), "melt must begin quickly");
        }
        assert_eq!(state.clock, Rat::from(13i64)); // melt began during step 13
        let coffee = state.config.entity(&"coffee".into()).unwrap().unwrap();
        assert_eq!(coffee.phase(), Some(Phase::Melting));
        assert_eq!(coffee.heat_trans().unwrap().display(10), "1.6610197574");
    }
}
