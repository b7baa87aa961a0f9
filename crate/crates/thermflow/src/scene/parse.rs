//! Parser for the sectioned scene text format.
//!
//! A scene file is a sequence of sections, each opened by a bracketed
//! header and followed by `key = value` lines:
//!
//! ```text
//! [params]
//! timeStep = 1            # seconds per tick
//! precision = 10
//!
//! [entity coffee]
//! mass = 396/875          # kg, exact
//! heatCap = 42/10
//! temp = 70
//!
//! [interaction crConduct]
//! kind = conduction
//! entity1 = coffee
//! entity2 = room
//! area = 121/4375
//! thermCond = 15/10000
//! thickness = 1/200
//!
//! [heater boiler]
//! entity = coffee
//! qdot = 15/10
//!
//! [prop warm]
//! expr = temp(coffee) >= 30
//! ```
//!
//! `#` starts a comment anywhere on a line; blank lines separate nothing.
//! Numbers are exact rationals (`7`, `15/10`, `1.5`). Every `[params]` key
//! is optional and defaults to the standard value; `[prop]` expressions may
//! refer to objects declared later in the file. Errors carry the 1-based
//! line and column they were detected at, and the parsed scene is fully
//! validated before it is returned.

use super::predicate::{parse_predicate, Predicate};
use super::{SceneDef, SceneParams};
use crate::model::{
    Configuration, HeatGenerator, HeaterStatus, InteractionKind, Object, ObjectId, Phase,
    ThermalEntity, ThermalInteraction,
};
use crate::numeric::Rat;
use std::collections::BTreeMap;
use thiserror::Error;

/// Scene syntax or validation error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// What kind of section a header opened.
#[derive(Clone, Debug, PartialEq, Eq)]
enum SectionKind {
    Params,
    Entity(ObjectId),
    Interaction(ObjectId),
    Heater(ObjectId),
    Prop(String),
}

/// One `key = value` line, with positions for error reporting.
struct Entry {
    key: String,
    value: String,
    line: usize,
    value_col: usize,
}

/// A section being accumulated, finalized at the next header or EOF.
struct Section {
    kind: SectionKind,
    header_line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn describe(&self) -> String {
        match &self.kind {
            SectionKind::Params => "[params]".to_owned(),
            SectionKind::Entity(id) => format!("[entity {id}]"),
            SectionKind::Interaction(id) => format!("[interaction {id}]"),
            SectionKind::Heater(id) => format!("[heater {id}]"),
            SectionKind::Prop(name) => format!("[prop {name}]"),
        }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        let at = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(at))
    }

    fn take_rat(&mut self, key: &str) -> Result<Option<Rat>, ParseError> {
        self.take(key).map(|e| rat_value(&e)).transpose()
    }

    /// A key this section cannot do without; reported at the header line.
    fn require(&mut self, key: &str) -> Result<Entry, ParseError> {
        self.take(key).ok_or_else(|| ParseError {
            line: self.header_line,
            col: 1,
            message: format!("{} is missing required key `{key}`", self.describe()),
        })
    }

    fn require_rat(&mut self, key: &str) -> Result<Rat, ParseError> {
        rat_value(&self.require(key)?)
    }

    /// Rejects whatever entries finalization did not consume.
    fn finish(self) -> Result<(), ParseError> {
        match self.entries.first() {
            None => Ok(()),
            Some(e) => err(
                e.line,
                1,
                format!("unknown key `{}` in {}", e.key, self.describe()),
            ),
        }
    }
}

fn rat_value(entry: &Entry) -> Result<Rat, ParseError> {
    entry.value.parse::<Rat>().map_err(|e| ParseError {
        line: entry.line,
        col: entry.value_col,
        message: e.to_string(),
    })
}

/// Parses and validates a scene from its textual form.
pub fn parse_scene(text: &str) -> Result<SceneDef, ParseError> {
    let mut params: Option<SceneParams> = None;
    let mut params_line = 1;
    let mut objects = Configuration::new();
    let mut object_lines: BTreeMap<ObjectId, usize> = BTreeMap::new();
    // props resolve after all objects exist, so collect them raw first
    let mut raw_props: Vec<(String, Entry, usize)> = Vec::new();
    let mut current: Option<Section> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(at) => &raw_line[..at],
            None => raw_line,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('[') {
            if let Some(done) = current.take() {
                finalize(
                    done,
                    &mut params,
                    &mut params_line,
                    &mut objects,
                    &mut object_lines,
                    &mut raw_props,
                )?;
            }
            current = Some(parse_header(line, line_no)?);
            if matches!(current.as_ref().unwrap().kind, SectionKind::Params) && params.is_some() {
                return err(line_no, 1, "duplicate [params] section");
            }
        } else {
            let Some(section) = current.as_mut() else {
                return err(
                    line_no,
                    col_of(line, trimmed),
                    "expected a section header like [entity name] before any keys",
                );
            };
            let entry = parse_entry(line, line_no)?;
            if section.entries.iter().any(|e| e.key == entry.key) {
                return err(
                    line_no,
                    col_of(line, trimmed),
                    format!("duplicate key `{}` in {}", entry.key, section.describe()),
                );
            }
            section.entries.push(entry);
        }
    }
    if let Some(done) = current.take() {
        finalize(
            done,
            &mut params,
            &mut params_line,
            &mut objects,
            &mut object_lines,
            &mut raw_props,
        )?;
    }

    let mut def = SceneDef::new(params.unwrap_or_default(), objects);
    let mut prop_lines: BTreeMap<String, usize> = BTreeMap::new();
    for (name, expr, header_line) in raw_props {
        let pred = resolve_prop(&expr, &def.objects)?;
        prop_lines.insert(name.clone(), header_line);
        def.props.insert(name, pred);
    }

    if let Err(report) = def.validate() {
        // surface the first violation at the section that declared it
        let v = &report.violations[0];
        let line = if v.id == "params".into() {
            params_line
        } else if let Some(name) = v.id.as_str().strip_prefix("prop ") {
            prop_lines.get(name).copied().unwrap_or(1)
        } else {
            object_lines.get(&v.id).copied().unwrap_or(1)
        };
        return err(line, 1, v.to_string());
    }
    Ok(def)
}

fn col_of(line: &str, token: &str) -> usize {
    match line.find(token) {
        Some(at) => at + 1,
        None => 1,
    }
}

fn parse_header(line: &str, line_no: usize) -> Result<Section, ParseError> {
    let open = line.find('[').expect("caller saw [") + 1;
    let trimmed = line.trim();
    let Some(inner) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
        return err(line_no, open, "section header must end with `]`");
    };
    let mut words = inner.split_whitespace();
    let role = words.next().unwrap_or("");
    let name = words.next();
    if words.next().is_some() {
        return err(line_no, open, "section header takes at most one name");
    }
    let kind = match (role, name) {
        ("params", None) => SectionKind::Params,
        ("params", Some(_)) => return err(line_no, open, "[params] takes no name"),
        ("entity" | "interaction" | "heater" | "prop", None) => {
            return err(line_no, open, format!("[{role} …] needs a name"));
        }
        (role @ ("entity" | "interaction" | "heater" | "prop"), Some(name)) => {
            if !is_ident(name) {
                return err(line_no, col_of(line, name), format!("invalid name {name:?}"));
            }
            match role {
                "entity" => SectionKind::Entity(name.into()),
                "interaction" => SectionKind::Interaction(name.into()),
                "heater" => SectionKind::Heater(name.into()),
                _ => SectionKind::Prop(name.to_owned()),
            }
        }
        _ => {
            return err(
                line_no,
                open,
                format!("unknown section `{role}` (expected params, entity, interaction, heater, or prop)"),
            );
        }
    };
    Ok(Section {
        kind,
        header_line: line_no,
        entries: Vec::new(),
    })
}

fn parse_entry(line: &str, line_no: usize) -> Result<Entry, ParseError> {
    let Some(eq) = line.find('=') else {
        return err(
            line_no,
            col_of(line, line.trim()),
            "expected `key = value`",
        );
    };
    let key = line[..eq].trim();
    if !is_ident(key) {
        return err(line_no, col_of(line, key), format!("invalid key {key:?}"));
    }
    let value_raw = &line[eq + 1..];
    let value = value_raw.trim();
    if value.is_empty() {
        return err(line_no, eq + 2, format!("key `{key}` has no value"));
    }
    Ok(Entry {
        key: key.to_owned(),
        value: value.to_owned(),
        line: line_no,
        value_col: eq + 1 + col_of(value_raw, value),
    })
}

fn finalize(
    mut section: Section,
    params: &mut Option<SceneParams>,
    params_line: &mut usize,
    objects: &mut Configuration,
    object_lines: &mut BTreeMap<ObjectId, usize>,
    raw_props: &mut Vec<(String, Entry, usize)>,
) -> Result<(), ParseError> {
    let header_line = section.header_line;
    let object = match section.kind.clone() {
        SectionKind::Params => {
            let mut p = SceneParams::default();
            if let Some(x) = section.take_rat("timeStep")? {
                p.time_step = x;
            }
            if let Some(e) = section.take("precision") {
                p.precision = e.value.parse::<u32>().map_err(|_| ParseError {
                    line: e.line,
                    col: e.value_col,
                    message: format!("precision must be a whole number, found {:?}", e.value),
                })?;
            }
            let c = &mut p.constants;
            for (key, slot) in [
                ("stefBolz", &mut c.stef_bolz),
                ("latentFusion", &mut c.latent_fusion),
                ("latentVapor", &mut c.latent_vapor),
                ("meltPoint", &mut c.melt_point),
                ("boilPoint", &mut c.boil_point),
            ] {
                if let Some(x) = section.take_rat(key)? {
                    *slot = x;
                }
            }
            section.finish()?;
            *params = Some(p);
            *params_line = header_line;
            return Ok(());
        }
        SectionKind::Prop(name) => {
            let expr = section.require("expr")?;
            section.finish()?;
            if raw_props.iter().any(|(n, _, _)| *n == name) {
                return err(header_line, 1, format!("duplicate prop `{name}`"));
            }
            raw_props.push((name, expr, header_line));
            return Ok(());
        }
        SectionKind::Entity(id) => {
            let mass = section.require_rat("mass")?;
            let heat_cap = section.require_rat("heatCap")?;
            let temp = section.require_rat("temp")?;
            let kind = section.take("kind");
            let phase = section.take("phase");
            let heat_trans_entry = section.take("heatTrans");
            let is_water = match kind {
                Some(e) => match e.value.as_str() {
                    "water" => true,
                    "basic" => false,
                    other => {
                        return err(
                            e.line,
                            e.value_col,
                            format!("kind must be `basic` or `water`, found {other:?}"),
                        );
                    }
                },
                // phase or heatTrans present implies water
                None => phase.is_some() || heat_trans_entry.is_some(),
            };
            let entity = if is_water {
                let Some(phase_entry) = phase else {
                    return err(
                        header_line,
                        1,
                        format!("water entity `{id}` needs a `phase` key"),
                    );
                };
                let Some(phase) = Phase::parse(&phase_entry.value) else {
                    return err(
                        phase_entry.line,
                        phase_entry.value_col,
                        format!("unknown phase {:?}", phase_entry.value),
                    );
                };
                let heat_trans = match &heat_trans_entry {
                    Some(e) => rat_value(e)?,
                    None => Rat::zero(),
                };
                ThermalEntity::water(id, heat_cap, mass, temp, phase, heat_trans)
            } else {
                if let Some(e) = phase {
                    return err(e.line, 1, "`phase` applies only to water entities");
                }
                if let Some(e) = heat_trans_entry {
                    return err(e.line, 1, "`heatTrans` applies only to water entities");
                }
                ThermalEntity::basic(id, heat_cap, mass, temp)
            };
            section.finish()?;
            Object::Entity(entity)
        }
        SectionKind::Interaction(id) => {
            let kind_entry = section.require("kind")?;
            let entity1: ObjectId = section.require("entity1")?.value.as_str().into();
            let entity2: ObjectId = section.require("entity2")?.value.as_str().into();
            let area = section.require_rat("area")?;
            let qdot = section.take_rat("qdot")?.unwrap_or_else(Rat::zero);
            let kind = match kind_entry.value.as_str() {
                "conduction" => InteractionKind::Conduction {
                    therm_cond: section.require_rat("thermCond")?,
                    thickness: section.require_rat("thickness")?,
                },
                "convection" => InteractionKind::Convection {
                    conv_coeff: section.require_rat("convCoeff")?,
                },
                "radiation" => InteractionKind::Radiation {
                    emissiv: section.require_rat("emissiv")?,
                },
                other => {
                    return err(
                        kind_entry.line,
                        kind_entry.value_col,
                        format!(
                            "kind must be conduction, convection, or radiation, found {other:?}"
                        ),
                    );
                }
            };
            // a leftover coefficient from another law deserves a pointed message
            for key in ["thermCond", "thickness", "convCoeff", "emissiv"] {
                if let Some(e) = section.take(key) {
                    return err(
                        e.line,
                        1,
                        format!("`{key}` does not apply to a {} interaction", kind.name()),
                    );
                }
            }
            section.finish()?;
            Object::Interaction(ThermalInteraction {
                id,
                kind,
                entity1,
                entity2,
                area,
                qdot,
            })
        }
        SectionKind::Heater(id) => {
            let entity: ObjectId = section.require("entity")?.value.as_str().into();
            let qdot = section.take_rat("qdot")?;
            let status = section.take("status");
            let heater = match (qdot, status) {
                (Some(qdot), None) => HeatGenerator::plain(id, entity, qdot),
                (None, Some(status_entry)) => {
                    let Some(status) = HeaterStatus::parse(&status_entry.value) else {
                        return err(
                            status_entry.line,
                            status_entry.value_col,
                            format!("status must be `on` or `off`, found {:?}", status_entry.value),
                        );
                    };
                    let low = section.require_rat("lowTemp")?;
                    let high = section.require_rat("highTemp")?;
                    let capacity = section.require_rat("capacity")?;
                    HeatGenerator::smart(id, entity, status, low, high, capacity)
                }
                (Some(_), Some(_)) => {
                    return err(
                        header_line,
                        1,
                        format!(
                            "heater `{id}` declares both qdot and a thermostat; a plain heater \
                             takes qdot, a thermostat-controlled one takes status/lowTemp/highTemp/capacity"
                        ),
                    );
                }
                (None, None) => {
                    return err(
                        header_line,
                        1,
                        format!("heater `{id}` needs either qdot or status/lowTemp/highTemp/capacity"),
                    );
                }
            };
            section.finish()?;
            Object::Heater(heater)
        }
    };
    let id = object.id().clone();
    objects.insert(object).map_err(|e| ParseError {
        line: header_line,
        col: 1,
        message: e.to_string(),
    })?;
    object_lines.insert(id, header_line);
    Ok(())
}

fn resolve_prop(expr: &Entry, objects: &Configuration) -> Result<Predicate, ParseError> {
    parse_predicate(&expr.value, objects).map_err(|e| ParseError {
        line: expr.line,
        // the predicate's column is relative to the expression text
        col: expr.value_col + e.col - 1,
        message: e.message,
    })
}
