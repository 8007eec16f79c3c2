//! Stratum posets of strictly toroidal special fibers.
//!
//! A complex stores the class of every open stratum `E°` together with the
//! containment order of the closed strata. Closed classes, `P(E)` and the two
//! alternating sums are derived from that data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::birational::{BirError, Label, LabelStoreBuilder, RationalityStatus};
use crate::ring::{Atom, AtomFlags, GradedClass, RingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Rational,
    StablyRational,
    Irrational,
    #[default]
    Unknown,
}

impl Tag {
    pub fn status(self) -> RationalityStatus {
        match self {
            Tag::Rational | Tag::StablyRational => RationalityStatus::StablyRational,
            Tag::Irrational => RationalityStatus::NotStablyRational,
            Tag::Unknown => RationalityStatus::Unknown,
        }
    }

    fn product(self, other: Tag) -> Tag {
        use Tag::*;
        match (self, other) {
            (Rational, Rational) => Rational,
            (Rational | StablyRational, Rational | StablyRational) => StablyRational,
            (Irrational, Rational | StablyRational) | (Rational | StablyRational, Irrational) => Irrational,
            _ => Unknown,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Rational => "rational",
            Tag::StablyRational => "stably_rational",
            Tag::Irrational => "irrational",
            Tag::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub id: String,
    pub name: String,
    pub codim: u32,
    /// Class of the interior `E°`, homogeneous of grade `fiber_dim - codim`.
    pub interior: GradedClass,
    /// Birational type of the closed stratum.
    pub label: Option<Label>,
    pub tag: Tag,
    /// Components whose intersection this stratum is a piece of, when known.
    pub support: Vec<String>,
}

impl Stratum {
    /// A stratum whose interior is a fresh atom `name°` and whose label is
    /// derived from the tag: rational strata and points get the rational
    /// label, all others a named label (`label_name`, defaulting to the
    /// stratum name).
    pub fn new(
        fiber_dim: u32,
        id: impl Into<String>,
        name: impl Into<String>,
        codim: u32,
        tag: Tag,
        label_name: Option<String>,
    ) -> Result<Stratum, StrataError> {
        let id = id.into();
        let name = name.into();
        if codim > fiber_dim {
            return Err(StrataError::Invalid(ValidationReport {
                issues: vec![Issue::DimensionMismatch {
                    id,
                    reason: format!("codimension {codim} exceeds fiber dimension {fiber_dim}"),
                }],
            }));
        }
        let dim = fiber_dim - codim;
        let interior = open_interior(&name, dim);
        let label = match tag {
            Tag::Rational => Label::rational(dim),
            _ if dim == 0 => Label::Point,
            _ => Label::named(label_name.unwrap_or_else(|| name.clone()), dim),
        };
        Ok(Stratum {
            id,
            name,
            codim,
            interior,
            label: Some(label),
            tag,
            support: Vec::new(),
        })
    }

    pub fn dim(&self, fiber_dim: u32) -> u32 {
        fiber_dim - self.codim
    }
}

/// Interior class of a connected stratum of the given dimension: a point
/// when the dimension is zero, an atom `name°` otherwise.
pub fn open_interior(name: &str, dim: u32) -> GradedClass {
    if dim == 0 {
        GradedClass::one()
    } else {
        GradedClass::generator(Atom::new(format!("{name}°"), dim, AtomFlags::default()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    NoComponents,
    DuplicateId { id: String },
    UnknownId { id: String },
    PosetCycle { ids: Vec<String> },
    CodimNotMonotone { sub: String, sup: String },
    ComponentStructure { id: String, reason: String },
    DimensionMismatch { id: String, reason: String },
    /// `upper` absent means the formal top element above every component.
    IntervalConditionFailed {
        lower: String,
        upper: Option<String>,
        sum: i64,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NoComponents => f.write_str("no strata given"),
            Issue::DuplicateId { id } => write!(f, "duplicate stratum id `{id}`"),
            Issue::UnknownId { id } => write!(f, "containment refers to unknown stratum `{id}`"),
            Issue::PosetCycle { ids } => write!(f, "containment has a cycle through {}", ids.join(", ")),
            Issue::CodimNotMonotone { sub, sup } => {
                write!(f, "`{sub}` lies in `{sup}` but its codimension is not larger")
            }
            Issue::ComponentStructure { id, reason } => write!(f, "`{id}`: {reason}"),
            Issue::DimensionMismatch { id, reason } => write!(f, "`{id}`: {reason}"),
            Issue::IntervalConditionFailed { lower, upper, sum } => match upper {
                Some(u) => write!(f, "interval condition fails on [{lower}, {u}] (sum {sum})"),
                None => write!(f, "strata above `{lower}` have signed count {sum}, expected 1"),
            },
        }
    }
}

/// Every violated invariant found while building a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.issues.iter().map(ToString::to_string).collect();
        f.write_str(&lines.join("; "))
    }
}

impl std::error::Error for ValidationReport {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("invalid complex: {0}")]
    Invalid(ValidationReport),
    #[error("inconsistent nerve: {0}")]
    NerveInconsistent(String),
    #[error("no stratum `{0}`")]
    NotFound(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Bir(#[from] BirError),
}

/// A validated stratum poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataComplex {
    fiber_dim: u32,
    strata: Vec<Stratum>,
    /// `le[i][j]` iff stratum `i` is contained in stratum `j` (reflexive).
    le: Vec<Vec<bool>>,
}

/// Checks every invariant and returns the complex, or all violations found.
pub fn build_complex(
    fiber_dim: u32,
    strata: Vec<Stratum>,
    containment: &[(String, String)],
) -> Result<StrataComplex, ValidationReport> {
    let mut issues = Vec::new();
    if strata.is_empty() {
        return Err(ValidationReport {
            issues: vec![Issue::NoComponents],
        });
    }
    let mut index = BTreeMap::new();
    for (i, s) in strata.iter().enumerate() {
        if index.insert(s.id.clone(), i).is_some() {
            issues.push(Issue::DuplicateId { id: s.id.clone() });
        }
    }
    for s in &strata {
        if s.codim > fiber_dim {
            issues.push(Issue::DimensionMismatch {
                id: s.id.clone(),
                reason: format!("codimension {} exceeds fiber dimension {fiber_dim}", s.codim),
            });
            continue;
        }
        let dim = fiber_dim - s.codim;
        if !s.interior.is_homogeneous_of(dim) || s.interior.is_zero() {
            issues.push(Issue::DimensionMismatch {
                id: s.id.clone(),
                reason: format!("interior class is not a nonzero class of grade {dim}"),
            });
        }
        if let Some(l) = &s.label {
            if l.dim() != dim {
                issues.push(Issue::DimensionMismatch {
                    id: s.id.clone(),
                    reason: format!("label `{l}` has dimension {}, stratum has {dim}", l.dim()),
                });
            }
        }
    }

    let n = strata.len();
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in containment {
        let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) else {
            for id in [a, b] {
                if !index.contains_key(id) {
                    issues.push(Issue::UnknownId { id: id.clone() });
                }
            }
            continue;
        };
        if i == j {
            issues.push(Issue::PosetCycle { ids: vec![a.clone()] });
        }
        le[i][j] = true;
    }
    if !issues.is_empty() {
        return Err(ValidationReport { issues });
    }
    for k in 0..n {
        for i in 0..n {
            if le[i][k] {
                for j in 0..n {
                    if le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
    }
    let mut cyclic = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if le[i][j] && le[j][i] {
                cyclic.insert(i);
                cyclic.insert(j);
            }
        }
    }
    if !cyclic.is_empty() {
        issues.push(Issue::PosetCycle {
            ids: cyclic.into_iter().map(|i| strata[i].id.clone()).collect(),
        });
        return Err(ValidationReport { issues });
    }

    for i in 0..n {
        for j in 0..n {
            if i != j && le[i][j] && strata[i].codim <= strata[j].codim {
                issues.push(Issue::CodimNotMonotone {
                    sub: strata[i].id.clone(),
                    sup: strata[j].id.clone(),
                });
            }
        }
    }
    for (i, s) in strata.iter().enumerate() {
        let maximal = (0..n).all(|j| j == i || !le[i][j]);
        if maximal && s.codim != 0 {
            issues.push(Issue::ComponentStructure {
                id: s.id.clone(),
                reason: format!("maximal stratum has codimension {}", s.codim),
            });
        }
        if !maximal && s.codim == 0 {
            issues.push(Issue::ComponentStructure {
                id: s.id.clone(),
                reason: "codimension 0 stratum lies in another stratum".into(),
            });
        }
    }
    if !issues.is_empty() {
        return Err(ValidationReport { issues });
    }

    let sign = |i: usize| -> i64 { if strata[i].codim % 2 == 0 { 1 } else { -1 } };
    for i in 0..n {
        for j in 0..n {
            if !le[i][j] {
                continue;
            }
            let sum: i64 = (0..n).filter(|&k| le[i][k] && le[k][j]).map(sign).sum();
            let expected = if i == j { sign(i) } else { 0 };
            if sum != expected {
                issues.push(Issue::IntervalConditionFailed {
                    lower: strata[i].id.clone(),
                    upper: Some(strata[j].id.clone()),
                    sum,
                });
            }
        }
        // The same identity with a formal top element adjoined.
        let above: i64 = (0..n).filter(|&k| le[i][k]).map(sign).sum();
        if above != 1 {
            issues.push(Issue::IntervalConditionFailed {
                lower: strata[i].id.clone(),
                upper: None,
                sum: above,
            });
        }
    }
    if !issues.is_empty() {
        return Err(ValidationReport { issues });
    }
    Ok(StrataComplex { fiber_dim, strata, le })
}

impl StrataComplex {
    pub fn fiber_dim(&self) -> u32 {
        self.fiber_dim
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    /// `E_i` is contained in `E_j`.
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i][j]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, StrataError> {
        self.strata
            .iter()
            .position(|s| s.id == id)
            .ok_or_else(|| StrataError::NotFound(id.to_string()))
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.le[j][i]))
            .collect()
    }

    /// Strict containments as `(sub, super)` index pairs.
    pub fn containments(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.le[i][j])
            .collect()
    }

    /// Removes one stratum and re-validates the remainder.
    pub fn without(&self, i: usize) -> Result<StrataComplex, ValidationReport> {
        let strata: Vec<Stratum> = self
            .strata
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, s)| s.clone())
            .collect();
        let pairs: Vec<(String, String)> = self
            .containments()
            .into_iter()
            .filter(|&(a, b)| a != i && b != i)
            .map(|(a, b)| (self.strata[a].id.clone(), self.strata[b].id.clone()))
            .collect();
        build_complex(self.fiber_dim, strata, &pairs)
    }

    /// Declares every named label with the rationality status of its tag,
    /// and every rational stratum's name as stably rational.
    pub fn declare_labels(&self, b: &mut LabelStoreBuilder) -> Result<(), BirError> {
        for s in &self.strata {
            let dim = s.dim(self.fiber_dim);
            match &s.label {
                Some(Label::Named(n)) => {
                    b.declare(n.name.clone(), n.dim, s.tag.status())?;
                }
                Some(Label::Point | Label::Rational(_)) => {
                    b.declare(s.name.clone(), dim, RationalityStatus::StablyRational)?;
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strata: Vec<serde_json::Value> = self
            .strata
            .iter()
            .map(|s| {
                serde_json::json!({
                    "id": s.id,
                    "name": s.name,
                    "codim": s.codim,
                    "tag": s.tag,
                    "label": s.label.as_ref().map(ToString::to_string),
                    "interior": s.interior.to_terms_json(),
                })
            })
            .collect();
        let contains: Vec<[&str; 2]> = self
            .containments()
            .into_iter()
            .map(|(a, b)| [self.strata[a].id.as_str(), self.strata[b].id.as_str()])
            .collect();
        serde_json::json!({ "fiber_dim": self.fiber_dim, "strata": strata, "contains": contains })
    }
}

/// `[E]_grade` as the sum of the open strata it contains.
pub fn closed_class(x: &StrataComplex, e: usize, grade: u32) -> Result<GradedClass, StrataError> {
    let dim = x.strata[e].dim(x.fiber_dim);
    if grade < dim {
        return Err(RingError::GradeBelowDimension { grade, dim }.into());
    }
    let mut out = GradedClass::zero();
    for (i, s) in x.strata.iter().enumerate() {
        if x.le[i][e] {
            out += s.interior.shift(grade - s.dim(x.fiber_dim));
        }
    }
    Ok(out)
}

/// `P(E) = sum over E' containing E of [G_m^codim E']_(codim E)`, at `grade`.
pub fn p_class(x: &StrataComplex, e: usize, grade: u32) -> Result<GradedClass, StrataError> {
    let c = x.strata[e].codim;
    if grade < c {
        return Err(RingError::GradeBelowDimension { grade, dim: c }.into());
    }
    let mut out = GradedClass::zero();
    for (j, s) in x.strata.iter().enumerate() {
        if x.le[e][j] {
            out += GradedClass::torus(s.codim, c)?;
        }
    }
    Ok(out.shift(grade - c))
}

fn sign(c: u32) -> BigInt {
    BigInt::from(if c % 2 == 0 { 1 } else { -1 })
}

fn check_grade(x: &StrataComplex, e: u32) -> Result<(), StrataError> {
    if e < x.fiber_dim {
        return Err(RingError::GradeBelowDimension {
            grade: e,
            dim: x.fiber_dim,
        }
        .into());
    }
    Ok(())
}

/// `sum (-1)^codim E [E° x G_m^codim E]_e`.
pub fn open_sum(x: &StrataComplex, e: u32) -> Result<GradedClass, StrataError> {
    check_grade(x, e)?;
    let mut out = GradedClass::zero();
    for s in &x.strata {
        let torus = GradedClass::torus(s.codim, s.codim)?;
        let term = (&s.interior * &torus).shift(e - x.fiber_dim);
        out += term.scale(&sign(s.codim));
    }
    Ok(out)
}

/// `sum (-1)^codim E [E]_(e - codim E) P(E)`.
pub fn closed_sum(x: &StrataComplex, e: u32) -> Result<GradedClass, StrataError> {
    check_grade(x, e)?;
    let mut out = GradedClass::zero();
    for (i, s) in x.strata.iter().enumerate() {
        let closed = closed_class(x, i, e - s.codim)?;
        let p = p_class(x, i, s.codim)?;
        out += (&closed * &p).scale(&sign(s.codim));
    }
    Ok(out)
}

/// Product of two complexes: pairs of strata, codimensions and interiors
/// multiplied, containment componentwise.
pub fn product(x: &StrataComplex, y: &StrataComplex) -> StrataComplex {
    let mut strata = Vec::new();
    let mut pos = Vec::new();
    for (i, a) in x.strata.iter().enumerate() {
        for (j, b) in y.strata.iter().enumerate() {
            pos.push((i, j));
            let label = match (&a.label, &b.label) {
                (Some(l), Some(m)) => Some(l.mul(m)),
                _ => None,
            };
            strata.push(Stratum {
                id: format!("{}×{}", a.id, b.id),
                name: format!("{}×{}", a.name, b.name),
                codim: a.codim + b.codim,
                interior: &a.interior * &b.interior,
                label,
                tag: a.tag.product(b.tag),
                support: Vec::new(),
            });
        }
    }
    let le = pos
        .iter()
        .map(|&(i, j)| pos.iter().map(|&(k, l)| x.le[i][k] && y.le[j][l]).collect())
        .collect();
    StrataComplex {
        fiber_dim: x.fiber_dim + y.fiber_dim,
        strata,
        le,
    }
}

fn one_piece() -> Vec<PieceSpec> {
    vec![PieceSpec::default()]
}

/// A connected piece of an intersection `E_J`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub tag: Tag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Names of the pieces of the intersections with one component fewer
    /// that contain this piece; needed only where those are disconnected.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inside: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub name: String,
    #[serde(default)]
    pub tag: Tag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionSpec {
    /// Component names, at least two.
    pub of: Vec<String>,
    /// Connected pieces; one unnamed piece when omitted, none means empty.
    #[serde(default = "one_piece")]
    pub pieces: Vec<PieceSpec>,
}

/// Components of an SNC special fiber and the connected pieces of their
/// intersections. Intersections not listed are empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SncNerve {
    pub fiber_dim: u32,
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub intersections: Vec<IntersectionSpec>,
}

/// A nerve with every piece resolved: per non-empty subset (a bitmask over
/// components) its pieces, and for each piece the pieces it lies in.
#[derive(Debug, Clone)]
pub struct ResolvedNerve {
    pub fiber_dim: u32,
    pub components: Vec<String>,
    /// `(subset mask, piece names)`, sorted by subset size then mask.
    pub subsets: Vec<(u64, Vec<String>)>,
    complex: StrataComplex,
}

impl ResolvedNerve {
    pub fn complex(&self) -> &StrataComplex {
        &self.complex
    }

    pub fn into_complex(self) -> StrataComplex {
        self.complex
    }

    pub fn subset_names(&self, mask: u64) -> Vec<&str> {
        self.components
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, n)| n.as_str())
            .collect()
    }
}

/// Default name of `E_J`: component names joined by `∩`.
pub fn intersection_name(names: &[&str]) -> String {
    names.join("∩")
}

pub fn from_snc_nerve(nerve: &SncNerve) -> Result<StrataComplex, StrataError> {
    Ok(resolve_nerve(nerve)?.complex)
}

pub fn resolve_nerve(nerve: &SncNerve) -> Result<ResolvedNerve, StrataError> {
    let bad = |m: String| StrataError::NerveInconsistent(m);
    let k = nerve.components.len();
    if k == 0 {
        return Err(StrataError::Invalid(ValidationReport {
            issues: vec![Issue::NoComponents],
        }));
    }
    if k > 63 {
        return Err(bad("too many components".into()));
    }
    let mut comp_index = BTreeMap::new();
    for (i, c) in nerve.components.iter().enumerate() {
        if comp_index.insert(c.name.clone(), i).is_some() {
            return Err(bad(format!("component `{}` listed twice", c.name)));
        }
    }

    struct Piece {
        name: String,
        tag: Tag,
        label: Option<String>,
        inside: Vec<String>,
    }
    let mut pieces: BTreeMap<u64, Vec<Piece>> = BTreeMap::new();
    for (i, c) in nerve.components.iter().enumerate() {
        pieces.insert(
            1 << i,
            vec![Piece {
                name: c.name.clone(),
                tag: c.tag,
                label: c.label.clone(),
                inside: Vec::new(),
            }],
        );
    }
    for int in &nerve.intersections {
        if int.of.len() < 2 {
            return Err(bad(format!("intersection {:?} needs at least two components", int.of)));
        }
        let mut mask = 0u64;
        for n in &int.of {
            let i = *comp_index
                .get(n)
                .ok_or_else(|| bad(format!("unknown component `{n}`")))?;
            if mask & (1 << i) != 0 {
                return Err(bad(format!("component `{n}` repeated in {:?}", int.of)));
            }
            mask |= 1 << i;
        }
        if pieces.contains_key(&mask) {
            return Err(bad(format!("intersection {:?} listed twice", int.of)));
        }
        let mut ordered: Vec<&str> = Vec::new();
        for (i, c) in nerve.components.iter().enumerate() {
            if mask & (1 << i) != 0 {
                ordered.push(&c.name);
            }
        }
        let base = intersection_name(&ordered);
        let many = int.pieces.len() > 1;
        let list = int
            .pieces
            .iter()
            .enumerate()
            .map(|(p, spec)| Piece {
                name: spec.name.clone().unwrap_or_else(|| {
                    if many {
                        format!("{base}#{}", p + 1)
                    } else {
                        base.clone()
                    }
                }),
                tag: spec.tag,
                label: spec.label.clone(),
                inside: spec.inside.clone(),
            })
            .collect();
        pieces.insert(mask, list);
    }
    pieces.retain(|_, v| !v.is_empty());

    // Downward closure.
    for &mask in pieces.keys() {
        for i in 0..k {
            let sub = mask & !(1 << i);
            if sub != mask && sub != 0 && !pieces.contains_key(&sub) {
                return Err(bad(format!(
                    "{} is non-empty but {} is empty",
                    intersection_name(&names_of(nerve, mask)),
                    intersection_name(&names_of(nerve, sub))
                )));
            }
        }
    }

    // Global piece ids and immediate parents.
    let mut order: Vec<u64> = pieces.keys().copied().collect();
    order.sort_by_key(|m| (m.count_ones(), *m));
    let mut ids: Vec<(u64, usize)> = Vec::new();
    let mut id_of: BTreeMap<(u64, usize), usize> = BTreeMap::new();
    let mut by_name: BTreeMap<String, usize> = BTreeMap::new();
    for &m in &order {
        for (p, piece) in pieces[&m].iter().enumerate() {
            let id = ids.len();
            if by_name.insert(piece.name.clone(), id).is_some() {
                return Err(bad(format!("piece name `{}` used twice", piece.name)));
            }
            id_of.insert((m, p), id);
            ids.push((m, p));
        }
    }
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for (id, &(m, p)) in ids.iter().enumerate() {
        let piece = &pieces[&m][p];
        let mut used = BTreeSet::new();
        for i in 0..k {
            let sub = m & !(1 << i);
            if sub == m || sub == 0 {
                continue;
            }
            let candidates = &pieces[&sub];
            let chosen = if candidates.len() == 1 {
                0
            } else {
                let hits: Vec<usize> = candidates
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| piece.inside.contains(&c.name))
                    .map(|(q, _)| q)
                    .collect();
                match hits.as_slice() {
                    [q] => *q,
                    [] => {
                        return Err(bad(format!(
                            "`{}` needs a hint naming its piece of {}",
                            piece.name,
                            intersection_name(&names_of(nerve, sub))
                        )))
                    }
                    _ => {
                        return Err(bad(format!(
                            "`{}` is placed in several pieces of {}",
                            piece.name,
                            intersection_name(&names_of(nerve, sub))
                        )))
                    }
                }
            };
            used.insert(candidates[chosen].name.clone());
            parents[id].push(id_of[&(sub, chosen)]);
        }
        for hint in &piece.inside {
            if !used.contains(hint) {
                return Err(bad(format!(
                    "hint `{hint}` on `{}` is not a piece one level up",
                    piece.name
                )));
            }
        }
    }

    // Ancestors; each piece must lie in exactly one piece of every subset.
    let mut above: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ids.len()];
    for id in 0..ids.len() {
        let mut set = BTreeSet::new();
        for &p in &parents[id] {
            set.insert(p);
            set.extend(above[p].iter().copied());
        }
        let mut per_subset: BTreeMap<u64, usize> = BTreeMap::new();
        for &a in &set {
            *per_subset.entry(ids[a].0).or_default() += 1;
        }
        if let Some((&m, _)) = per_subset.iter().find(|(_, &c)| c > 1) {
            return Err(bad(format!(
                "`{}` would lie in several pieces of {}",
                pieces[&ids[id].0][ids[id].1].name,
                intersection_name(&names_of(nerve, m))
            )));
        }
        above[id] = set;
    }

    let mut strata = Vec::new();
    for &(m, p) in &ids {
        let piece = &pieces[&m][p];
        let codim = m.count_ones() - 1;
        let mut s = Stratum::new(
            nerve.fiber_dim,
            piece.name.clone(),
            piece.name.clone(),
            codim,
            piece.tag,
            piece.label.clone(),
        )?;
        s.support = names_of(nerve, m).into_iter().map(String::from).collect();
        strata.push(s);
    }
    let mut containment = Vec::new();
    for (id, set) in above.iter().enumerate() {
        for &a in set {
            containment.push((strata[id].id.clone(), strata[a].id.clone()));
        }
    }
    let complex = build_complex(nerve.fiber_dim, strata, &containment).map_err(StrataError::Invalid)?;
    Ok(ResolvedNerve {
        fiber_dim: nerve.fiber_dim,
        components: nerve.components.iter().map(|c| c.name.clone()).collect(),
        subsets: order
            .iter()
            .map(|m| (*m, pieces[m].iter().map(|p| p.name.clone()).collect()))
            .collect(),
        complex,
    })
}

fn names_of(nerve: &SncNerve, mask: u64) -> Vec<&str> {
    nerve
        .components
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, c)| c.name.as_str())
        .collect()
}

/// Atom behind a stratum interior, if it is one.
pub fn interior_atom(s: &Stratum) -> Option<Atom> {
    let mut terms = s.interior.terms();
    match (terms.next(), terms.next()) {
        (Some((m, _)), None) if m.atoms().len() == 1 && m.tau_exp() == 0 && m.lef_exp() == 0 => {
            Some(m.atoms()[0].clone())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> GradedClass {
        GradedClass::tau()
    }
    fn l() -> GradedClass {
        GradedClass::lef()
    }
    fn open(name: &str, dim: u32) -> GradedClass {
        open_interior(name, dim)
    }

    fn nerve(n: u32, comps: &[&str], ints: &[&[&str]]) -> SncNerve {
        SncNerve {
            fiber_dim: n,
            components: comps
                .iter()
                .map(|c| ComponentSpec {
                    name: c.to_string(),
                    tag: Tag::Unknown,
                    label: None,
                })
                .collect(),
            intersections: ints
                .iter()
                .map(|j| IntersectionSpec {
                    of: j.iter().map(|s| s.to_string()).collect(),
                    pieces: one_piece(),
                })
                .collect(),
        }
    }

    fn pair() -> StrataComplex {
        from_snc_nerve(&nerve(3, &["E1", "E2"], &[&["E1", "E2"]])).unwrap()
    }

    #[test]
    fn pair_is_valid() {
        let x = pair();
        assert_eq!(x.len(), 3);
        let d = x.index_of("E1∩E2").unwrap();
        assert_eq!(x.strata()[d].codim, 1);
        assert_eq!(x.minimal(), vec![d]);
    }

    #[test]
    fn empty_is_rejected() {
        let err = build_complex(2, vec![], &[]).unwrap_err();
        assert_eq!(err.issues, vec![Issue::NoComponents]);
    }

    #[test]
    fn chain_fails_interval_condition() {
        let s = |id: &str, c| Stratum::new(2, id, id, c, Tag::Unknown, None).unwrap();
        let strata = vec![s("E0", 0), s("E1", 1), s("E2", 2)];
        let pairs = vec![("E2".to_string(), "E1".to_string()), ("E1".to_string(), "E0".to_string())];
        let err = build_complex(2, strata, &pairs).unwrap_err();
        assert!(err
            .issues
            .iter()
            .any(|i| matches!(i, Issue::IntervalConditionFailed { lower, .. } if lower == "E2")));
    }

    #[test]
    fn cycles_and_codims() {
        let s = |id: &str, c| Stratum::new(2, id, id, c, Tag::Unknown, None).unwrap();
        let pairs = vec![("A".to_string(), "B".to_string()), ("B".to_string(), "A".to_string())];
        let err = build_complex(2, vec![s("A", 0), s("B", 0)], &pairs).unwrap_err();
        assert!(matches!(err.issues[0], Issue::PosetCycle { .. }));

        let pairs = vec![("A".to_string(), "B".to_string())];
        let err = build_complex(2, vec![s("A", 0), s("B", 0)], &pairs).unwrap_err();
        assert!(err.issues.iter().any(|i| matches!(i, Issue::CodimNotMonotone { .. })));
    }

    #[test]
    fn three_components() {
        let x = from_snc_nerve(&nerve(
            4,
            &["E1", "E2", "E3"],
            &[&["E1", "E2"], &["E1", "E3"], &["E2", "E3"], &["E1", "E2", "E3"]],
        ))
        .unwrap();
        let codims: Vec<u32> = x.strata().iter().map(|s| s.codim).collect();
        assert_eq!(codims, vec![0, 0, 0, 1, 1, 1, 2]);
        let triple = x.index_of("E1∩E2∩E3").unwrap();
        assert_eq!(p_class(&x, triple, 2).unwrap(), GradedClass::projective(2, 2).unwrap());
        for e in 4..7 {
            assert_eq!(open_sum(&x, e).unwrap(), closed_sum(&x, e).unwrap());
        }
    }

    #[test]
    fn single_component() {
        let x = from_snc_nerve(&nerve(2, &["X"], &[])).unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(closed_class(&x, 0, 2).unwrap(), open("X", 2));
        assert_eq!(open_sum(&x, 2).unwrap(), open("X", 2));
        assert_eq!(p_class(&x, 0, 3).unwrap(), GradedClass::tau_pow(3));
    }

    #[test]
    fn disconnected_intersection() {
        let mut nv = nerve(3, &["E1", "E2"], &[&["E1", "E2"]]);
        nv.intersections[0].pieces = vec![PieceSpec::default(), PieceSpec::default()];
        let x = from_snc_nerve(&nv).unwrap();
        assert_eq!(x.len(), 4);
        assert_eq!(x.strata().iter().filter(|s| s.codim == 1).count(), 2);
        assert!(x.index_of("E1∩E2#2").is_ok());
        assert_eq!(open_sum(&x, 3).unwrap(), closed_sum(&x, 3).unwrap());
    }

    #[test]
    fn hints_required_for_disconnected_parents() {
        let mut nv = nerve(3, &["A", "B", "C"], &[&["A", "B"], &["A", "C"], &["B", "C"], &["A", "B", "C"]]);
        nv.intersections[0].pieces = vec![
            PieceSpec {
                name: Some("P".into()),
                ..Default::default()
            },
            PieceSpec {
                name: Some("Q".into()),
                ..Default::default()
            },
        ];
        assert!(matches!(from_snc_nerve(&nv), Err(StrataError::NerveInconsistent(_))));
        nv.intersections[3].pieces[0].inside = vec!["P".into()];
        let x = from_snc_nerve(&nv).unwrap();
        let triple = x.index_of("A∩B∩C").unwrap();
        assert!(x.le(triple, x.index_of("P").unwrap()));
        assert!(!x.le(triple, x.index_of("Q").unwrap()));
    }

    #[test]
    fn nerve_must_be_downward_closed() {
        let nv = nerve(3, &["A", "B", "C"], &[&["A", "B"], &["A", "B", "C"]]);
        assert!(matches!(from_snc_nerve(&nv), Err(StrataError::NerveInconsistent(_))));
    }

    #[test]
    fn pair_sums() {
        let x = pair();
        let (e1, e2, d) = (open("E1", 3), open("E2", 3), open("E1∩E2", 2));
        let e1i = x.index_of("E1").unwrap();
        assert_eq!(closed_class(&x, e1i, 3).unwrap(), &e1 + &(&t() * &d));
        let di = x.index_of("E1∩E2").unwrap();
        assert_eq!(p_class(&x, di, 1).unwrap(), &t() + &l());
        let expected = &(&e1 + &e2) - &(&(&l() - &t()) * &d);
        assert_eq!(open_sum(&x, 3).unwrap(), expected);
        assert_eq!(closed_sum(&x, 3).unwrap(), expected);
        assert!(open_sum(&x, 2).is_err());
    }

    #[test]
    fn deleting_a_component_is_caught() {
        let x = pair();
        let e1 = x.index_of("E1").unwrap();
        assert!(x.without(e1).is_err());
        // Removing the minimal stratum leaves two disjoint components.
        let d = x.index_of("E1∩E2").unwrap();
        assert!(x.without(d).is_ok());
    }

    #[test]
    fn product_is_multiplicative() {
        let x = pair();
        let y = from_snc_nerve(&nerve(1, &["C1", "C2"], &[&["C1", "C2"]])).unwrap();
        let xy = product(&x, &y);
        assert_eq!(xy.fiber_dim(), 4);
        let pairs: Vec<(String, String)> = xy
            .containments()
            .into_iter()
            .map(|(a, b)| (xy.strata()[a].id.clone(), xy.strata()[b].id.clone()))
            .collect();
        let rebuilt = build_complex(4, xy.strata().to_vec(), &pairs).unwrap();
        assert_eq!(open_sum(&rebuilt, 4).unwrap(), closed_sum(&rebuilt, 4).unwrap());
        assert_eq!(open_sum(&xy, 5).unwrap(), &open_sum(&x, 3).unwrap() * &open_sum(&y, 2).unwrap());
    }
}
