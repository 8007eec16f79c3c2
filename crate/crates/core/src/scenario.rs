//! Scenario files: a degeneration (or a cone) plus label knowledge and the
//! commands to run on it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::birational::{Label, LabelStore, LabelStoreBuilder, RationalityStatus};
use crate::equivariant::{EquivModelSpec, SncModelWithCovers};
use crate::error::{Error, Result};
use crate::ring::{AtomFlags, AtomTable, GradedClass};
use crate::strata::{build_complex, from_snc_nerve, SncNerve, StrataComplex, Stratum, Tag};
use crate::toric::{cone_from_rays, Cone, ConeSpec};

pub const SCHEMA_VERSION: u32 = 1;

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub name: String,
    pub dim: u32,
    #[serde(default = "yes")]
    pub irreducible: bool,
    #[serde(default = "yes")]
    pub geom_irreducible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelSpec {
    pub name: String,
    pub dim: u32,
    #[serde(default)]
    pub status: RationalityStatus,
}

/// The generic fiber's birational type, used by the specialization check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericFiber {
    #[serde(default)]
    pub label: Option<String>,
    pub dim: u32,
    #[serde(default)]
    pub tag: Tag,
}

impl GenericFiber {
    pub fn to_label(&self) -> Result<Label> {
        match (self.tag, &self.label) {
            (Tag::Rational, _) => Ok(Label::rational(self.dim)),
            (_, Some(name)) => Ok(Label::named(name.clone(), self.dim)),
            (_, None) => Err(Error::Schema("generic_fiber needs a label unless it is rational".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub codim: u32,
    #[serde(default)]
    pub tag: Tag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// A declared atom to use as the interior class instead of a fresh one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub fiber_dim: u32,
    pub strata: Vec<StratumSpec>,
    /// `[sub, super]` pairs.
    #[serde(default)]
    pub contains: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivPayload {
    pub model: EquivModelSpec,
    /// The model after base change to the lcm of the multiplicities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_changed: Option<SncNerve>,
    /// Cover atom name to stratum id in `base_changed`.
    #[serde(default)]
    pub identify: BTreeMap<String, String>,
}

/// A verdict the corpus runner checks in addition to the golden output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub rule: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub labels: Vec<LabelSpec>,
    #[serde(default)]
    pub equivalences: Vec<[String; 2]>,
    #[serde(default)]
    pub distinctions: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic_fiber: Option<GenericFiber>,
    #[serde(default)]
    pub commands: Vec<String>,
    #[serde(default)]
    pub expect: Vec<Expectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snc_nerve: Option<SncNerve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivariant: Option<EquivPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
}

#[derive(Debug, Clone)]
pub enum Payload {
    Strata(StrataComplex),
    Equivariant {
        model: SncModelWithCovers,
        base_changed: Option<StrataComplex>,
        identify: BTreeMap<String, String>,
    },
    Cone(Cone),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Strata(_) => "strata",
            Payload::Equivariant { .. } => "equivariant",
            Payload::Cone(_) => "cone",
        }
    }
}

/// A parsed and validated scenario.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub atoms: AtomTable,
    pub payload: Payload,
    pub store: LabelStore,
}

impl Loaded {
    pub fn complex(&self) -> Result<&StrataComplex> {
        match &self.payload {
            Payload::Strata(x) => Ok(x),
            other => Err(Error::Usage(format!(
                "this command needs a strata payload, scenario `{}` has a {} payload",
                self.scenario.name,
                other.kind()
            ))),
        }
    }
}

pub fn parse(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if scenario.schema != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            scenario.schema
        )));
    }
    let payloads = [
        scenario.complex.is_some(),
        scenario.snc_nerve.is_some(),
        scenario.equivariant.is_some(),
        scenario.cone.is_some(),
    ];
    let count = payloads.iter().filter(|&&p| p).count();
    if count != 1 {
        return Err(Error::Schema(format!(
            "exactly one of complex, snc_nerve, equivariant, cone is required, found {count}"
        )));
    }
    Ok(scenario)
}

pub fn load_str(text: &str) -> Result<Loaded> {
    load(parse(text)?)
}

pub fn load(scenario: Scenario) -> Result<Loaded> {
    let mut atoms = AtomTable::new();
    for a in &scenario.atoms {
        atoms.define(
            a.name.clone(),
            a.dim,
            AtomFlags {
                irreducible: a.irreducible,
                geom_irreducible: a.geom_irreducible,
            },
        )?;
    }

    let payload = if let Some(spec) = &scenario.complex {
        Payload::Strata(complex_from_spec(spec, &atoms)?)
    } else if let Some(nerve) = &scenario.snc_nerve {
        Payload::Strata(from_snc_nerve(nerve)?)
    } else if let Some(eq) = &scenario.equivariant {
        let model = SncModelWithCovers::from_spec(&eq.model)?;
        let base_changed = eq.base_changed.as_ref().map(from_snc_nerve).transpose()?;
        if base_changed.is_none() && !eq.identify.is_empty() {
            return Err(Error::Schema("identify given without base_changed".into()));
        }
        Payload::Equivariant {
            model,
            base_changed,
            identify: eq.identify.clone(),
        }
    } else {
        let c = scenario.cone.as_ref().expect("one payload is present");
        Payload::Cone(cone_from_rays(c.rank, &c.rays)?)
    };

    let mut b = LabelStoreBuilder::new();
    for l in &scenario.labels {
        b.declare(l.name.clone(), l.dim, l.status)?;
    }
    match &payload {
        Payload::Strata(x) => x.declare_labels(&mut b)?,
        Payload::Equivariant {
            base_changed: Some(x),
            ..
        } => x.declare_labels(&mut b)?,
        _ => {}
    }
    if let Some(g) = &scenario.generic_fiber {
        if let Label::Named(n) = g.to_label()? {
            b.declare(n.name, n.dim, g.tag.status())?;
        }
    }
    for [x, y] in &scenario.equivalences {
        b.equivalent(x.clone(), y.clone());
    }
    for [x, y] in &scenario.distinctions {
        b.distinct(x.clone(), y.clone());
    }
    let store = b.build()?;
    Ok(Loaded {
        scenario,
        atoms,
        payload,
        store,
    })
}

fn complex_from_spec(spec: &ComplexSpec, atoms: &AtomTable) -> Result<StrataComplex> {
    let mut strata = Vec::new();
    for s in &spec.strata {
        let name = s.name.clone().unwrap_or_else(|| s.id.clone());
        let mut stratum = Stratum::new(spec.fiber_dim, s.id.clone(), name, s.codim, s.tag, s.label.clone())?;
        if let Some(a) = &s.interior {
            let atom = atoms
                .get(a)
                .ok_or_else(|| Error::Schema(format!("stratum `{}` uses undeclared atom `{a}`", s.id)))?;
            stratum.interior = GradedClass::generator(atom.clone());
        }
        strata.push(stratum);
    }
    let pairs: Vec<(String, String)> = spec.contains.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
    build_complex(spec.fiber_dim, strata, &pairs).map_err(Error::Validation)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = r#"{
        "schema": 1,
        "name": "pair",
        "snc_nerve": {
            "fiber_dim": 2,
            "components": [{"name": "A", "tag": "rational"}, {"name": "B"}],
            "intersections": [{"of": ["A", "B"]}]
        }
    }"#;

    #[test]
    fn loads_a_nerve() {
        let l = load_str(PAIR).unwrap();
        assert_eq!(l.complex().unwrap().len(), 3);
        assert_eq!(l.store.status("A"), RationalityStatus::StablyRational);
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let bad = PAIR.replace("\"name\": \"pair\",", "\"name\": \"pair\", \"colour\": 3,");
        assert!(matches!(parse(&bad), Err(Error::Schema(_))));
        let v2 = PAIR.replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(parse(&v2), Err(Error::Schema(_))));
        let none = r#"{"schema": 1, "name": "x"}"#;
        assert!(matches!(parse(none), Err(Error::Schema(_))));
    }

    #[test]
    fn complex_payload_is_validated() {
        let text = r#"{
            "schema": 1, "name": "chain",
            "complex": {"fiber_dim": 2, "strata": [
                {"id": "E0", "codim": 0}, {"id": "E1", "codim": 1}, {"id": "E2", "codim": 2}],
                "contains": [["E2", "E1"], ["E1", "E0"]]}
        }"#;
        let err = load_str(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn declared_interiors() {
        let text = r#"{
            "schema": 1, "name": "smooth",
            "atoms": [{"name": "X", "dim": 2}],
            "complex": {"fiber_dim": 2, "strata": [{"id": "X", "codim": 0, "interior": "X"}]}
        }"#;
        let l = load_str(text).unwrap();
        assert_eq!(l.complex().unwrap().strata()[0].interior.to_string(), "X");
        let wrong = text.replace("\"dim\": 2}", "\"dim\": 1}");
        assert!(matches!(load_str(&wrong), Err(Error::Validation(_))));
    }
}
