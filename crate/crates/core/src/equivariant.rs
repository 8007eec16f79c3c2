//! Bookkeeping for the monodromic volume of an SNC model with
//! multiplicities: user-declared cyclic covers of the strata, the alternating
//! sum over the nerve, and the maps forgetting or restricting the action.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{Atom, AtomFlags, Class, Generator, GradedClass, Monomial, RingError};
use crate::strata::{resolve_nerve, SncNerve, StrataComplex, StrataError};
use crate::volume::{vol, VolumeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("model has no components")]
    NoComponents,
    #[error("no cover declared for {0}")]
    MissingCover(String),
    #[error("action order mismatch: {0}")]
    ActionOrderMismatch(String),
    #[error("inconsistent nerve: {0}")]
    NerveInconsistent(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("open and closed equivariant sums differ at grade {grade}: {open} versus {closed}")]
    InvariantViolation {
        grade: u32,
        open: String,
        closed: String,
    },
    #[error("identification refers to unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// The action of the profinite roots of unity through `mu_order`. Only the
/// order is meaningful; the name is an opaque descriptor, cleared on the
/// trivial action.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionLabel {
    order: u32,
    name: String,
}

impl ActionLabel {
    pub fn new(order: u32, name: impl Into<String>) -> Self {
        assert!(order >= 1, "action order must be positive");
        let name = if order == 1 { String::new() } else { name.into() };
        ActionLabel { order, name }
    }

    pub fn trivial() -> Self {
        ActionLabel::new(1, "")
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Image of the kernel of `mu -> mu_m` in `mu_order`.
    pub fn restrict(&self, m: u32) -> ActionLabel {
        ActionLabel::new(self.order / self.order.gcd(&m), self.name.clone())
    }
}

/// A variety atom together with its action.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EquivAtom {
    pub atom: Atom,
    pub action: ActionLabel,
}

impl Generator for EquivAtom {
    fn dim(&self) -> u32 {
        self.atom.dim()
    }
}

impl fmt::Display for EquivAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.action.is_trivial() {
            return write!(f, "{}", self.atom);
        }
        write!(f, "{}[mu{}", self.atom, self.action.order)?;
        if !self.action.name.is_empty() {
            write!(f, ":{}", self.action.name)?;
        }
        f.write_str("]")
    }
}

/// Element of the free model of the equivariant graded ring; `t` and `L`
/// always carry the trivial action.
pub type EquivClass = Class<EquivAtom>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultComponent {
    pub name: String,
    pub mult: u32,
}

fn one() -> u32 {
    1
}

fn one_i64() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverPieceSpec {
    /// Atom name; absent for a single point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<String>,
    #[serde(default = "one")]
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(default = "one_i64")]
    pub coeff: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    pub of: Vec<String>,
    pub pieces: Vec<CoverPieceSpec>,
}

/// Serialized model: components with multiplicities, the non-empty
/// intersections of two or more components, and the open cover pieces over
/// every non-empty intersection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivModelSpec {
    pub fiber_dim: u32,
    pub components: Vec<MultComponent>,
    #[serde(default)]
    pub intersections: Vec<Vec<String>>,
    pub covers: Vec<CoverSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SncModelWithCovers {
    fiber_dim: u32,
    components: Vec<(String, u32)>,
    /// Open cover class over each non-empty `E_J°`, keyed by subset mask.
    covers: BTreeMap<u64, EquivClass>,
}

fn mask_name(components: &[(String, u32)], mask: u64) -> String {
    let names: Vec<&str> = components
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, (n, _))| n.as_str())
        .collect();
    names.join("∩")
}

impl SncModelWithCovers {
    pub fn from_spec(spec: &EquivModelSpec) -> Result<Self, EquivError> {
        let bad = |m: String| EquivError::NerveInconsistent(m);
        if spec.components.is_empty() {
            return Err(EquivError::NoComponents);
        }
        if spec.components.len() > 63 {
            return Err(bad("too many components".into()));
        }
        let mut index = BTreeMap::new();
        for (i, c) in spec.components.iter().enumerate() {
            if c.mult == 0 {
                return Err(bad(format!("component `{}` has multiplicity 0", c.name)));
            }
            if index.insert(c.name.as_str(), i).is_some() {
                return Err(bad(format!("component `{}` listed twice", c.name)));
            }
        }
        let mask_of = |names: &[String]| -> Result<u64, EquivError> {
            let mut m = 0u64;
            for n in names {
                let i = index.get(n.as_str()).ok_or_else(|| bad(format!("unknown component `{n}`")))?;
                if m & (1 << i) != 0 {
                    return Err(bad(format!("component `{n}` repeated")));
                }
                m |= 1 << i;
            }
            Ok(m)
        };
        let components: Vec<(String, u32)> =
            spec.components.iter().map(|c| (c.name.clone(), c.mult)).collect();

        let mut nerve: BTreeSet<u64> = (0..components.len()).map(|i| 1u64 << i).collect();
        for int in &spec.intersections {
            if int.len() < 2 {
                return Err(bad(format!("intersection {int:?} needs two components")));
            }
            nerve.insert(mask_of(int)?);
        }
        for &m in &nerve {
            for i in 0..components.len() {
                let sub = m & !(1 << i);
                if sub != m && sub != 0 && !nerve.contains(&sub) {
                    return Err(bad(format!(
                        "{} is non-empty but {} is empty",
                        mask_name(&components, m),
                        mask_name(&components, sub)
                    )));
                }
            }
        }

        let n_lcm = components.iter().fold(1u32, |acc, (_, m)| acc.lcm(m));
        let mut covers = BTreeMap::new();
        for cover in &spec.covers {
            let m = mask_of(&cover.of)?;
            if !nerve.contains(&m) {
                return Err(bad(format!("cover over empty {}", mask_name(&components, m))));
            }
            let dim = spec
                .fiber_dim
                .checked_sub(m.count_ones() - 1)
                .ok_or_else(|| EquivError::DimensionMismatch(format!("{} is too deep", mask_name(&components, m))))?;
            let mut class = EquivClass::zero();
            for p in &cover.pieces {
                if p.order == 0 || n_lcm % p.order != 0 {
                    return Err(EquivError::ActionOrderMismatch(format!(
                        "order {} over {} does not divide the multiplicity lcm {n_lcm}",
                        p.order,
                        mask_name(&components, m)
                    )));
                }
                let term = match &p.atom {
                    Some(name) => EquivClass::generator(EquivAtom {
                        atom: Atom::new(name.clone(), dim, AtomFlags::default()),
                        action: ActionLabel::new(p.order, p.action.clone().unwrap_or_default()),
                    }),
                    None if dim == 0 => EquivClass::one(),
                    None => {
                        return Err(EquivError::DimensionMismatch(format!(
                            "point cover piece over {} of dimension {dim}",
                            mask_name(&components, m)
                        )))
                    }
                };
                class += term.scale(&BigInt::from(p.coeff));
            }
            if covers.insert(m, class).is_some() {
                return Err(bad(format!("cover over {} given twice", mask_name(&components, m))));
            }
        }
        let model = SncModelWithCovers {
            fiber_dim: spec.fiber_dim,
            components,
            covers,
        };
        for &m in &nerve {
            if !model.covers.contains_key(&m) {
                return Err(EquivError::MissingCover(mask_name(&model.components, m)));
            }
        }
        model.check_reduced_isolated()?;
        Ok(model)
    }

    /// A model of multiplicity one whose covers are the open strata of the
    /// nerve, with trivial action.
    pub fn reduced(nerve: &SncNerve) -> Result<Self, EquivError> {
        let resolved = resolve_nerve(nerve)?;
        let complex = resolved.complex();
        let mut covers = BTreeMap::new();
        for (mask, pieces) in &resolved.subsets {
            let mut class = EquivClass::zero();
            for p in pieces {
                let s = &complex.strata()[complex.index_of(p)?];
                class += lift_trivial(&s.interior);
            }
            covers.insert(*mask, class);
        }
        Ok(SncModelWithCovers {
            fiber_dim: nerve.fiber_dim,
            components: resolved.components.iter().map(|c| (c.clone(), 1)).collect(),
            covers,
        })
    }

    fn check_reduced_isolated(&self) -> Result<(), EquivError> {
        for (i, (name, mult)) in self.components.iter().enumerate() {
            let isolated = self.covers.keys().all(|&m| m == 1 << i || m & (1 << i) == 0);
            if *mult == 1 && isolated {
                let cover = &self.covers[&(1 << i)];
                if cover.terms().any(|(m, _)| m.atoms().iter().any(|a| !a.action.is_trivial())) {
                    return Err(EquivError::ActionOrderMismatch(format!(
                        "reduced isolated component `{name}` must have a trivial cover"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn fiber_dim(&self) -> u32 {
        self.fiber_dim
    }

    pub fn components(&self) -> &[(String, u32)] {
        &self.components
    }

    pub fn covers(&self) -> impl Iterator<Item = (String, &EquivClass)> {
        self.covers.iter().map(|(m, c)| (mask_name(&self.components, *m), c))
    }

    /// Closed cover over `E_J`: the open covers over all `E_J'` with `J'`
    /// containing `J`, at `grade`.
    fn closed_cover(&self, mask: u64, grade: u32) -> EquivClass {
        let mut out = EquivClass::zero();
        for (&m, class) in &self.covers {
            if m & mask == mask {
                let dim = self.fiber_dim + 1 - m.count_ones();
                out += class.shift(grade - dim);
            }
        }
        out
    }
}

fn lift_trivial(x: &GradedClass) -> EquivClass {
    x.map_generators(|a| {
        EquivClass::generator(EquivAtom {
            atom: a.clone(),
            action: ActionLabel::trivial(),
        })
    })
}

/// Least common multiple of the multiplicities.
pub fn lcm_mult(model: &SncModelWithCovers) -> Result<u32, EquivError> {
    if model.components.is_empty() {
        return Err(EquivError::NoComponents);
    }
    Ok(model.components.iter().fold(1u32, |acc, (_, m)| acc.lcm(m)))
}

fn sign(k: u32) -> BigInt {
    BigInt::from(if k % 2 == 0 { 1 } else { -1 })
}

/// `sum over J of (-1)^(|J|-1) [cover(E_J°) x G_m^(|J|-1)]_e`, checked against
/// the closed form with `P^(|J|-1)`.
pub fn vol_equivariant(model: &SncModelWithCovers, e: u32) -> Result<EquivClass, EquivError> {
    let n = model.fiber_dim;
    if e < n {
        return Err(RingError::GradeBelowDimension { grade: e, dim: n }.into());
    }
    let mut open = EquivClass::zero();
    let mut closed = EquivClass::zero();
    for (&m, cover) in &model.covers {
        let c = m.count_ones() - 1;
        let torus = EquivClass::torus(c, c)?;
        open += (cover * &torus).shift(e - n).scale(&sign(c));
        let proj = EquivClass::projective(c, c)?;
        closed += (&model.closed_cover(m, e - c) * &proj).scale(&sign(c));
    }
    if open != closed {
        return Err(EquivError::InvariantViolation {
            grade: e,
            open: open.to_string(),
            closed: closed.to_string(),
        });
    }
    Ok(open)
}

/// Drops every action. Atoms named in `identify` are replaced by the given
/// classes.
pub fn forget_action(x: &EquivClass, identify: &BTreeMap<String, GradedClass>) -> GradedClass {
    x.map_generators(|g| match identify.get(g.atom.name()) {
        Some(c) => c.clone(),
        None => GradedClass::generator(g.atom.clone()),
    })
}

/// Restricts every action to the kernel of `mu -> mu_m`.
pub fn restrict_action(x: &EquivClass, m: u32) -> EquivClass {
    assert!(m >= 1, "restriction index must be positive");
    x.map_generators(|g| {
        EquivClass::generator(EquivAtom {
            atom: g.atom.clone(),
            action: g.action.restrict(m),
        })
    })
}

/// User-declared rewrite of an atom carrying a linear action on affine
/// `m`-space to the trivial class `L^m`.
pub fn trivialize_linear(x: &EquivClass, atom: &str, m: u32) -> Result<EquivClass, EquivError> {
    for (mono, _) in x.terms() {
        if let Some(g) = mono.atoms().iter().find(|g| g.atom.name() == atom && g.dim() != m) {
            return Err(EquivError::DimensionMismatch(format!(
                "`{atom}` has dimension {}, not {m}",
                g.dim()
            )));
        }
    }
    Ok(x.map_generators(|g| {
        if g.atom.name() == atom {
            EquivClass::lef_pow(m)
        } else {
            EquivClass::generator(g.clone())
        }
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommuteReport {
    pub holds: bool,
    pub forgotten: String,
    pub volume: String,
    /// First monomial (in canonical order) where the two sides differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<String>,
}

/// Compares the forgetful image of the monodromic volume with the volume of
/// the base-changed complex, both at the fiber dimension. `identification`
/// sends cover atom names to stratum ids of the base-changed complex.
pub fn check_commute(
    model: &SncModelWithCovers,
    base_changed: &StrataComplex,
    identification: &BTreeMap<String, String>,
) -> Result<CommuteReport, EquivError> {
    let e = model.fiber_dim;
    let mut classes = BTreeMap::new();
    for (atom, id) in identification {
        let idx = base_changed
            .index_of(id)
            .map_err(|_| EquivError::UnknownStratum(id.clone()))?;
        classes.insert(atom.clone(), base_changed.strata()[idx].interior.clone());
    }
    let lhs = forget_action(&vol_equivariant(model, e)?, &classes);
    let rhs = vol(base_changed, e)?;
    let diff = &lhs - &rhs;
    let first_difference = diff.terms().next().map(|(m, _): (&Monomial<Atom>, _)| {
        format!(
            "{m}: {} versus {}",
            lhs.coeff(m),
            rhs.coeff(m)
        )
    });
    Ok(CommuteReport {
        holds: first_difference.is_none(),
        forgotten: lhs.to_string(),
        volume: rhs.to_string(),
        first_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::{from_snc_nerve, ComponentSpec, IntersectionSpec, Tag};

    fn piece(atom: &str, order: u32) -> CoverPieceSpec {
        CoverPieceSpec {
            atom: Some(atom.into()),
            order,
            action: None,
            coeff: 1,
        }
    }

    fn single(mult: u32, order: u32) -> EquivModelSpec {
        EquivModelSpec {
            fiber_dim: 2,
            components: vec![MultComponent {
                name: "E".into(),
                mult,
            }],
            intersections: vec![],
            covers: vec![CoverSpec {
                of: vec!["E".into()],
                pieces: vec![piece("F", order)],
            }],
        }
    }

    fn model_with_mults(mults: &[u32]) -> SncModelWithCovers {
        SncModelWithCovers::from_spec(&EquivModelSpec {
            fiber_dim: 1,
            components: mults
                .iter()
                .enumerate()
                .map(|(i, &m)| MultComponent {
                    name: format!("E{i}"),
                    mult: m,
                })
                .collect(),
            intersections: vec![],
            covers: (0..mults.len())
                .map(|i| CoverSpec {
                    of: vec![format!("E{i}")],
                    pieces: vec![piece(&format!("F{i}"), 1)],
                })
                .collect(),
        })
        .unwrap()
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_mult(&model_with_mults(&[1, 1])).unwrap(), 1);
        assert_eq!(lcm_mult(&model_with_mults(&[2, 3])).unwrap(), 6);
        assert_eq!(lcm_mult(&model_with_mults(&[4, 6])).unwrap(), 12);
        let empty = EquivModelSpec {
            fiber_dim: 1,
            components: vec![],
            intersections: vec![],
            covers: vec![],
        };
        assert_eq!(SncModelWithCovers::from_spec(&empty), Err(EquivError::NoComponents));
    }

    #[test]
    fn double_cover_of_a_double_component() {
        let m = SncModelWithCovers::from_spec(&single(2, 2)).unwrap();
        let v = vol_equivariant(&m, 3).unwrap();
        assert_eq!(v.to_string(), "t*F[mu2]");
        assert_eq!(restrict_action(&v, 2).to_string(), "t*F");
        let forgotten = forget_action(&v, &BTreeMap::new());
        assert_eq!(forgotten.to_string(), "t*F");
    }

    #[test]
    fn order_must_divide_lcm() {
        assert!(matches!(
            SncModelWithCovers::from_spec(&single(2, 3)),
            Err(EquivError::ActionOrderMismatch(_))
        ));
        assert!(matches!(
            SncModelWithCovers::from_spec(&single(1, 2)),
            Err(EquivError::ActionOrderMismatch(_))
        ));
    }

    #[test]
    fn missing_cover() {
        let mut spec = single(1, 1);
        spec.components.push(MultComponent {
            name: "G".into(),
            mult: 1,
        });
        spec.intersections.push(vec!["E".into(), "G".into()]);
        spec.covers.push(CoverSpec {
            of: vec!["G".into()],
            pieces: vec![piece("H", 1)],
        });
        assert_eq!(
            SncModelWithCovers::from_spec(&spec),
            Err(EquivError::MissingCover("E∩G".into()))
        );
    }

    #[test]
    fn restriction_orders() {
        let l = ActionLabel::new(6, "g");
        assert_eq!(l.restrict(4).order(), 3);
        assert_eq!(l.restrict(1), l);
        assert_eq!(ActionLabel::new(2, "s").restrict(2), ActionLabel::trivial());
    }

    #[test]
    fn reduced_model_commutes() {
        let nerve = SncNerve {
            fiber_dim: 3,
            components: ["A", "B", "C"]
                .iter()
                .map(|n| ComponentSpec {
                    name: n.to_string(),
                    tag: Tag::Unknown,
                    label: None,
                })
                .collect(),
            intersections: vec![
                IntersectionSpec {
                    of: vec!["A".into(), "B".into()],
                    pieces: vec![Default::default(), Default::default()],
                },
                IntersectionSpec {
                    of: vec!["B".into(), "C".into()],
                    pieces: vec![Default::default()],
                },
            ],
        };
        let model = SncModelWithCovers::reduced(&nerve).unwrap();
        let complex = from_snc_nerve(&nerve).unwrap();
        for e in 3..6 {
            let v = vol_equivariant(&model, e).unwrap();
            assert_eq!(forget_action(&v, &BTreeMap::new()), vol(&complex, e).unwrap());
        }
        let report = check_commute(&model, &complex, &BTreeMap::new()).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn wrong_identification_is_reported() {
        let m = SncModelWithCovers::from_spec(&single(2, 2)).unwrap();
        let nerve = SncNerve {
            fiber_dim: 2,
            components: vec![ComponentSpec {
                name: "Y".into(),
                tag: Tag::Unknown,
                label: None,
            }],
            intersections: vec![],
        };
        let complex = from_snc_nerve(&nerve).unwrap();
        let good: BTreeMap<String, String> = [("F".to_string(), "Y".to_string())].into();
        assert!(check_commute(&m, &complex, &good).unwrap().holds);
        let report = check_commute(&m, &complex, &BTreeMap::new()).unwrap();
        assert!(!report.holds);
        assert!(report.first_difference.is_some());
        let bad: BTreeMap<String, String> = [("F".to_string(), "Z".to_string())].into();
        assert_eq!(
            check_commute(&m, &complex, &bad),
            Err(EquivError::UnknownStratum("Z".into()))
        );
    }

    #[test]
    fn linear_actions_trivialize() {
        let v = EquivClass::generator(EquivAtom {
            atom: Atom::new("V", 2, AtomFlags::default()),
            action: ActionLabel::new(3, "lin"),
        });
        assert_eq!(trivialize_linear(&v, "V", 2).unwrap(), EquivClass::lef_pow(2));
        assert!(trivialize_linear(&v, "V", 1).is_err());
    }
}
