//! Heat-transfer laws and the explicit Euler update.
//!
//! A tick is two passes over the configuration: first every interaction's
//! flow rate is recomputed from the *current* temperatures, then every
//! entity integrates against those fresh rates. Because all entities read
//! the same pre-step temperatures, the update is independent of iteration
//! order, and a closed two-body system conserves energy exactly.

use crate::model::{Configuration, EntityKind, InteractionKind, ObjectId, ThermalInteraction};
use crate::model::CompMode;
use crate::numeric::Rat;

/// Physical constants, overridable per scene.
///
/// `stef_bolz` is in kW/(m²·K⁴); latent heats in kJ/kg; melting and boiling
/// points in °C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhysConstants {
    pub stef_bolz: Rat,
    pub latent_fusion: Rat,
    pub latent_vapor: Rat,
    pub melt_point: Rat,
    pub boil_point: Rat,
}

impl Default for PhysConstants {
    fn default() -> PhysConstants {
        PhysConstants {
            stef_bolz: Rat::new(567, 10_000_000_000_000),
            latent_fusion: Rat::from(334i64),
            latent_vapor: Rat::from(2257i64),
            melt_point: Rat::zero(),
            boil_point: Rat::from(100i64),
        }
    }
}

/// The instantaneous flow rate through `interaction` in kW, positive from
/// its first endpoint toward its second, given the endpoint temperatures.
///
/// Conduction: k·A·(T1−T2)/L. Convection: h·A·(T1−T2).
/// Radiation: ε·σ·A·(T1⁴−T2⁴), evaluated on the temperatures exactly as
/// stored (the model keeps a single temperature scale throughout).
pub fn flow_rate(
    interaction: &ThermalInteraction,
    t1: &Rat,
    t2: &Rat,
    consts: &PhysConstants,
) -> Rat {
    match &interaction.kind {
        InteractionKind::Conduction {
            therm_cond,
            thickness,
        } => therm_cond * &interaction.area * (t1 - t2) / thickness,
        InteractionKind::Convection { conv_coeff } => {
            conv_coeff * &interaction.area * (t1 - t2)
        }
        InteractionKind::Radiation { emissiv } => {
            emissiv * &consts.stef_bolz * &interaction.area * (t1.pow(4) - t2.pow(4))
        }
    }
}

/// Recomputes every interaction's stored flow rate from the current entity
/// temperatures, leaving everything else untouched.
///
/// Expects a validated configuration (every endpoint names an entity).
pub fn compute_qdots(config: &Configuration, consts: &PhysConstants) -> Configuration {
    let mut next = config.clone();
    for interaction in config.interactions() {
        let temp = |id: &ObjectId| {
            config
                .entity(id)
                .expect("validated configuration")
                .expect("validated configuration")
                .temp
                .clone()
        };
        let qdot = flow_rate(
            interaction,
            &temp(&interaction.entity1),
            &temp(&interaction.entity2),
            consts,
        );
        next.interaction_mut(&interaction.id)
            .expect("interaction present")
            .qdot = qdot;
    }
    next
}

/// Net heat rate into entity `id` in kW: each interaction's stored rate
/// counts negatively where the entity is the first endpoint and positively
/// where it is the second, and every heat source feeding the entity adds
/// its rate.
pub fn sum_qdots(config: &Configuration, id: &ObjectId) -> Rat {
    let mut sum = Rat::zero();
    for interaction in config.interactions() {
        if interaction.entity1 == *id {
            sum = sum - &interaction.qdot;
        }
        if interaction.entity2 == *id {
            sum = sum + &interaction.qdot;
        }
    }
    for heater in config.heaters() {
        if heater.entity == *id {
            sum = sum + &heater.qdot;
        }
    }
    sum
}

/// One explicit Euler step: `yn + h·f(yn)`.
pub fn euler_step(yn: &Rat, h: &Rat, fyn: &Rat) -> Rat {
    yn + &(h * fyn)
}

/// Advances every entity by one Euler step of size `h` against the flow
/// rates currently stored in the configuration.
///
/// Entities in the default mode integrate their temperature at rate
/// `sum_qdots / (mass·heat_cap)`; entities mid phase change hold their
/// temperature and accumulate raw heat in `heat_trans` instead. All sums
/// are taken against the incoming configuration, so the result does not
/// depend on entity order.
pub fn compute_temps(config: &Configuration, h: &Rat) -> Configuration {
    let updates: Vec<(ObjectId, Rat)> = config
        .entities()
        .map(|e| (e.id.clone(), sum_qdots(config, &e.id)))
        .collect();
    let mut next = config.clone();
    for (id, sum) in updates {
        let entity = next.entity_mut(&id).expect("entity present");
        match entity.mode {
            CompMode::Default => {
                let rate = &sum / &entity.thermal_mass();
                entity.temp = euler_step(&entity.temp, h, &rate);
            }
            CompMode::PhaseChange => {
                let EntityKind::Water { heat_trans, .. } = &mut entity.kind else {
                    unreachable!("only water entities enter phase changes");
                };
                *heat_trans = euler_step(heat_trans, h, &sum);
            }
        }
    }
    next
}
