//! The motivic volume of a stratum complex, its birational and stable
//! birational images, and the obstruction verdicts built on them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::birational::{
    bir_collapse, bir_of_with, can_equal, can_equal_bir, default_atom_label, render_witness, sb_of,
    BirClass, BirError, Label, LabelStore, MergeOutcome, RationalityStatus, SbClass,
};
use crate::ring::{mod_tau, Atom, GradedClass};
use crate::strata::{closed_sum, interior_atom, open_sum, StrataComplex, StrataError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VolumeError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Bir(#[from] BirError),
    #[error("open and closed sums differ at grade {grade}: {open} versus {closed}")]
    InvariantViolation {
        grade: u32,
        open: String,
        closed: String,
    },
    #[error("stratum `{0}` has no birational label")]
    UnlabeledStratum(String),
    #[error("specialization needs a single-stratum complex, got {0} strata")]
    NotSmooth(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Obstructed,
    NotObstructed,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Obstructed => "OBSTRUCTED",
            Status::NotObstructed => "NOT_OBSTRUCTED",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Stable birational volume against the point.
    Stable,
    /// Birational volume against `P^n`.
    Rational,
    /// Birational volume against the point itself.
    RationalLiteralPoint,
    /// Parity of codimensions of the non stably rational strata.
    Parity,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Stable => "stable",
            Rule::Rational => "rational",
            Rule::RationalLiteralPoint => "rational_literal_point",
            Rule::Parity => "parity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub rule: Rule,
    /// The class that was compared, rendered canonically.
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// Label merges under which the class reaches the target.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] class {}", self.status, self.rule, self.class)?;
        if let Some(t) = &self.target {
            write!(f, " target {t}")?;
        }
        if let Some(w) = &self.witness {
            let blocks: Vec<String> = w.iter().map(|b| format!("{{{}}}", b.join(" = "))).collect();
            write!(f, " witness {}", if blocks.is_empty() { "none".into() } else { blocks.join(", ") })?;
        }
        if let Some(r) = &self.reason {
            write!(f, " ({r})")?;
        }
        Ok(())
    }
}

/// `Vol([X_K])` at grade `e`, cross-checked between the open and closed forms.
pub fn vol(x: &StrataComplex, e: u32) -> Result<GradedClass, VolumeError> {
    let open = open_sum(x, e)?;
    let closed = closed_sum(x, e)?;
    if open != closed {
        return Err(VolumeError::InvariantViolation {
            grade: e,
            open: open.to_string(),
            closed: closed.to_string(),
        });
    }
    Ok(open)
}

/// `sum (-1)^codim E {E x P^codim E}` in `Z[Bir]`.
pub fn vol_bir(x: &StrataComplex) -> Result<BirClass, VolumeError> {
    let mut out = BirClass::zero();
    for s in x.strata() {
        let label = s
            .label
            .as_ref()
            .ok_or_else(|| VolumeError::UnlabeledStratum(s.id.clone()))?;
        let c = if s.codim % 2 == 0 { 1 } else { -1 };
        out.add_term(label.times_projective(s.codim), BigInt::from(c));
    }
    Ok(out)
}

/// The volume at the fiber dimension pushed through `mod t` into `Z[Bir]`,
/// reading each interior atom as the label of its closed stratum.
pub fn bir_of_volume(x: &StrataComplex) -> Result<BirClass, VolumeError> {
    let v = vol(x, x.fiber_dim())?;
    let labels: BTreeMap<Atom, Label> = x
        .strata()
        .iter()
        .filter_map(|s| Some((interior_atom(s)?, s.label.clone()?)))
        .collect();
    Ok(bir_of_with(&mod_tau(&v), x.fiber_dim(), |a| {
        labels.get(a).cloned().unwrap_or_else(|| default_atom_label(a))
    })?)
}

/// `sum (-1)^codim E {E}` in `Z[SB]`.
pub fn vol_sb(x: &StrataComplex, store: &LabelStore) -> Result<SbClass, VolumeError> {
    Ok(sb_of(&vol_bir(x)?, store))
}

fn from_outcome(outcome: MergeOutcome, rule: Rule, class: String, target: String) -> Verdict {
    let (status, witness, reason) = match outcome {
        MergeOutcome::No => (
            Status::Obstructed,
            None,
            Some("no admissible identification of labels reaches the target".to_string()),
        ),
        MergeOutcome::Yes(w) if w.is_empty() => (
            Status::NotObstructed,
            Some(Vec::new()),
            Some("the class equals the target with the declared knowledge".to_string()),
        ),
        MergeOutcome::Yes(w) => (
            Status::Inconclusive,
            Some(render_witness(&w)),
            Some("the target is reached only if labels of unknown type coincide".to_string()),
        ),
    };
    Verdict {
        status,
        rule,
        class,
        target: Some(target),
        witness,
        reason,
    }
}

/// Is the stable birational volume different from the point in every
/// identification of unknown labels the store allows?
pub fn obstruct_stable(
    x: &StrataComplex,
    store: &LabelStore,
    budget: usize,
) -> Result<Verdict, VolumeError> {
    let sb = vol_sb(x, store)?;
    let target = SbClass::term(Label::Point, 1);
    let outcome = can_equal(&target, &sb, store, budget)?;
    Ok(from_outcome(outcome, Rule::Stable, sb.to_string(), target.to_string()))
}

/// The birational test. The target is `{P^n}` for fiber dimension `n`, or
/// the point itself when `literal_point` is set.
pub fn obstruct_rational(
    x: &StrataComplex,
    store: &LabelStore,
    budget: usize,
    literal_point: bool,
) -> Result<Verdict, VolumeError> {
    let b = bir_collapse(&vol_bir(x)?, store);
    let (target, rule) = if literal_point {
        (BirClass::term(Label::Point, 1), Rule::RationalLiteralPoint)
    } else {
        (BirClass::term(Label::rational(x.fiber_dim()), 1), Rule::Rational)
    };
    let outcome = can_equal_bir(&target, &b, store, budget)?;
    Ok(from_outcome(outcome, rule, b.to_string(), target.to_string()))
}

fn label_status(store: &LabelStore, label: &Label) -> RationalityStatus {
    match store.sb_label(label) {
        Label::Point => RationalityStatus::StablyRational,
        l if store.not_stably_rational(&l) => RationalityStatus::NotStablyRational,
        _ => RationalityStatus::Unknown,
    }
}

/// All strata of one codimension parity stably rational, and some stratum of
/// the other parity not stably rational.
pub fn parity_rule(x: &StrataComplex, store: &LabelStore) -> Result<Verdict, VolumeError> {
    let mut all_sr = [true, true];
    let mut some_nsr: [Option<String>; 2] = [None, None];
    for s in x.strata() {
        let label = s
            .label
            .as_ref()
            .ok_or_else(|| VolumeError::UnlabeledStratum(s.id.clone()))?;
        let p = (s.codim % 2) as usize;
        match label_status(store, label) {
            RationalityStatus::StablyRational => {}
            RationalityStatus::NotStablyRational => {
                all_sr[p] = false;
                some_nsr[p].get_or_insert_with(|| s.id.clone());
            }
            RationalityStatus::Unknown => all_sr[p] = false,
        }
    }
    let class = vol_sb(x, store)?.to_string();
    let parity = |p: usize| if p == 0 { "even" } else { "odd" };
    for p in 0..2 {
        if all_sr[p] {
            if let Some(id) = &some_nsr[1 - p] {
                return Ok(Verdict {
                    status: Status::Obstructed,
                    rule: Rule::Parity,
                    class,
                    target: None,
                    witness: None,
                    reason: Some(format!(
                        "all {} codimension strata are stably rational and `{id}` of {} codimension is not",
                        parity(p),
                        parity(1 - p)
                    )),
                });
            }
        }
    }
    Ok(Verdict {
        status: Status::Inconclusive,
        rule: Rule::Parity,
        class,
        target: None,
        witness: None,
        reason: Some("not applicable".to_string()),
    })
}

/// For a smooth model: checks that the birational volume is the special
/// fiber's own label, then reports whether identifying it with the generic
/// fiber's label is consistent with the store.
pub fn specialization_check(
    x: &StrataComplex,
    store: &LabelStore,
    generic: &Label,
) -> Result<bool, VolumeError> {
    if x.len() != 1 {
        return Err(VolumeError::NotSmooth(x.len()));
    }
    let special = x.strata()[0]
        .label
        .clone()
        .ok_or_else(|| VolumeError::UnlabeledStratum(x.strata()[0].id.clone()))?;
    let b = vol_bir(x)?;
    if b != BirClass::term(special.clone(), 1) {
        return Err(VolumeError::InvariantViolation {
            grade: x.fiber_dim(),
            open: b.to_string(),
            closed: special.to_string(),
        });
    }
    if generic.dim() != special.dim() || store.are_distinct(generic, &special) {
        return Ok(false);
    }
    let (a, b) = (label_status(store, generic), label_status(store, &special));
    Ok(!matches!(
        (a, b),
        (RationalityStatus::StablyRational, RationalityStatus::NotStablyRational)
            | (RationalityStatus::NotStablyRational, RationalityStatus::StablyRational)
    ))
}
