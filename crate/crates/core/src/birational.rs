//! The free groups `Z[Bir]` and `Z[SB]`, the reduction maps into them, and the
//! label-merge search used to decide whether a class can equal a target given
//! only partial knowledge of which labels coincide.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{coeff_json, Atom, GradedClass, Generator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BirError {
    #[error("class is not homogeneous of grade {0}")]
    NotHomogeneous(u32),
    #[error("atom `{0}` is not flagged geometrically irreducible")]
    AmbiguousComponents(String),
    #[error("merge search over {labels} labels exceeds the budget of {budget}")]
    SearchBudget { labels: usize, budget: usize },
    #[error("label `{0}` is not declared")]
    UnknownLabel(String),
    #[error("conflicting declarations for label `{0}`")]
    LabelConflict(String),
    #[error("inconsistent label store: {0}")]
    InconsistentStore(String),
}

/// Default cap on the number of distinct labels the merge search will handle.
pub const DEFAULT_BUDGET: usize = 12;

/// A named birational type whose status is recorded in a [`LabelStore`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NamedLabel {
    pub name: String,
    pub dim: u32,
}

/// A birational type. Constructors keep labels normalized: `Rational(0)` is
/// `Point`, products absorb rational factors into the projective power, and a
/// product with a single factor and no projective power is that factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Point,
    Rational(u32),
    Named(NamedLabel),
    /// `factors[0] x factors[1] x ... x P^proj`, factors sorted.
    Product { factors: Vec<NamedLabel>, proj: u32 },
}

impl Label {
    pub fn rational(dim: u32) -> Label {
        if dim == 0 {
            Label::Point
        } else {
            Label::Rational(dim)
        }
    }

    pub fn named(name: impl Into<String>, dim: u32) -> Label {
        Label::Named(NamedLabel {
            name: name.into(),
            dim,
        })
    }

    fn from_parts(mut factors: Vec<NamedLabel>, proj: u32) -> Label {
        factors.sort();
        match factors.len() {
            0 => Label::rational(proj),
            1 if proj == 0 => Label::Named(factors.pop().unwrap()),
            _ => Label::Product { factors, proj },
        }
    }

    fn parts(&self) -> (Vec<NamedLabel>, u32) {
        match self {
            Label::Point => (Vec::new(), 0),
            Label::Rational(m) => (Vec::new(), *m),
            Label::Named(n) => (vec![n.clone()], 0),
            Label::Product { factors, proj } => (factors.clone(), *proj),
        }
    }

    /// `{self x P^c}`.
    pub fn times_projective(&self, c: u32) -> Label {
        let (factors, proj) = self.parts();
        Label::from_parts(factors, proj + c)
    }

    /// Product of birational types, assuming geometric irreducibility.
    pub fn mul(&self, other: &Label) -> Label {
        let (mut factors, p1) = self.parts();
        let (f2, p2) = other.parts();
        factors.extend(f2);
        Label::from_parts(factors, p1 + p2)
    }

    pub fn dim(&self) -> u32 {
        match self {
            Label::Point => 0,
            Label::Rational(m) => *m,
            Label::Named(n) => n.dim,
            Label::Product { factors, proj } => factors.iter().map(|f| f.dim).sum::<u32>() + proj,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Label::Point | Label::Rational(_))
    }

    /// The single named variety underlying `X` or `X x P^c`.
    fn core_name(&self) -> Option<&str> {
        match self {
            Label::Named(n) => Some(&n.name),
            Label::Product { factors, .. } if factors.len() == 1 => Some(&factors[0].name),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Point => f.write_str("pt"),
            Label::Rational(m) => write!(f, "P^{m}"),
            Label::Named(n) => f.write_str(&n.name),
            Label::Product { factors, proj } => {
                let mut parts: Vec<String> = factors.iter().map(|n| n.name.clone()).collect();
                if *proj > 0 {
                    parts.push(format!("P^{proj}"));
                }
                f.write_str(&parts.join("×"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RationalityStatus {
    #[default]
    Unknown,
    StablyRational,
    NotStablyRational,
}

impl RationalityStatus {
    fn merge(self, other: Self) -> Option<Self> {
        use RationalityStatus::*;
        match (self, other) {
            (Unknown, s) | (s, Unknown) => Some(s),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }
}

/// Collects label declarations before they are closed into a [`LabelStore`].
#[derive(Debug, Clone, Default)]
pub struct LabelStoreBuilder {
    labels: BTreeMap<String, (u32, RationalityStatus)>,
    equivalences: Vec<(String, String)>,
    distinctions: Vec<(String, String)>,
}

impl LabelStoreBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares (or re-declares compatibly) a named label.
    pub fn declare(
        &mut self,
        name: impl Into<String>,
        dim: u32,
        status: RationalityStatus,
    ) -> Result<&mut Self, BirError> {
        let name = name.into();
        match self.labels.get_mut(&name) {
            Some((d, s)) => {
                if *d != dim {
                    return Err(BirError::LabelConflict(name));
                }
                *s = s.merge(status).ok_or(BirError::LabelConflict(name))?;
            }
            None => {
                self.labels.insert(name, (dim, status));
            }
        }
        Ok(self)
    }

    /// Declares two labels equivalent: birational when their dimensions
    /// agree, stably birational otherwise.
    pub fn equivalent(&mut self, a: impl Into<String>, b: impl Into<String>) -> &mut Self {
        self.equivalences.push((a.into(), b.into()));
        self
    }

    /// Declares two labels not stably birational (hence not birational).
    pub fn distinct(&mut self, a: impl Into<String>, b: impl Into<String>) -> &mut Self {
        self.distinctions.push((a.into(), b.into()));
        self
    }

    pub fn build(&self) -> Result<LabelStore, BirError> {
        for (a, b) in self.equivalences.iter().chain(&self.distinctions) {
            for n in [a, b] {
                if !self.labels.contains_key(n) {
                    return Err(BirError::UnknownLabel(n.clone()));
                }
            }
        }
        let dims: BTreeMap<String, u32> =
            self.labels.iter().map(|(n, (d, _))| (n.clone(), *d)).collect();

        let sb_rep = union_find(dims.keys(), self.equivalences.iter());
        let bir_rep = union_find(
            dims.keys(),
            self.equivalences.iter().filter(|(a, b)| dims[a] == dims[b]),
        );

        let mut sb_status: BTreeMap<String, RationalityStatus> = BTreeMap::new();
        for (name, (_, status)) in &self.labels {
            let rep = &sb_rep[name];
            let cur = sb_status.entry(rep.clone()).or_default();
            *cur = cur.merge(*status).ok_or_else(|| {
                BirError::InconsistentStore(format!(
                    "`{name}` is both stably rational and not stably rational after closure"
                ))
            })?;
        }

        let mut distinct = BTreeSet::new();
        for (a, b) in &self.distinctions {
            let (ra, rb) = (&sb_rep[a], &sb_rep[b]);
            if ra == rb {
                return Err(BirError::InconsistentStore(format!(
                    "`{a}` and `{b}` are declared both equivalent and distinct"
                )));
            }
            if sb_status[ra] == RationalityStatus::StablyRational
                && sb_status[rb] == RationalityStatus::StablyRational
            {
                return Err(BirError::InconsistentStore(format!(
                    "`{a}` and `{b}` are declared distinct but both stably rational"
                )));
            }
            distinct.insert(ordered(ra.clone(), rb.clone()));
        }

        Ok(LabelStore {
            dims,
            sb_rep,
            bir_rep,
            sb_status,
            distinct,
        })
    }
}

fn ordered(a: String, b: String) -> (String, String) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Representative = lexicographically smallest name in each class.
fn union_find<'a>(
    names: impl Iterator<Item = &'a String>,
    pairs: impl Iterator<Item = &'a (String, String)>,
) -> BTreeMap<String, String> {
    let mut parent: BTreeMap<String, String> = names.map(|n| (n.clone(), n.clone())).collect();
    fn find(parent: &mut BTreeMap<String, String>, x: &str) -> String {
        let p = parent[x].clone();
        if p == x {
            return p;
        }
        let root = find(parent, &p);
        parent.insert(x.to_string(), root.clone());
        root
    }
    for (a, b) in pairs {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent.insert(drop, keep);
        }
    }
    let keys: Vec<String> = parent.keys().cloned().collect();
    keys.into_iter()
        .map(|k| {
            let r = find(&mut parent, &k);
            (k, r)
        })
        .collect()
}

/// Frozen label knowledge: rationality statuses, declared equivalences
/// (closed transitively) and declared distinctions.
#[derive(Debug, Clone, Default)]
pub struct LabelStore {
    dims: BTreeMap<String, u32>,
    sb_rep: BTreeMap<String, String>,
    bir_rep: BTreeMap<String, String>,
    sb_status: BTreeMap<String, RationalityStatus>,
    distinct: BTreeSet<(String, String)>,
}

impl LabelStore {
    pub fn empty() -> Self {
        Self::default()
    }

    fn sb_rep<'a>(&'a self, name: &'a str) -> &'a str {
        self.sb_rep.get(name).map(String::as_str).unwrap_or(name)
    }

    /// Status of a named label after closure; undeclared names are unknown.
    pub fn status(&self, name: &str) -> RationalityStatus {
        self.sb_status
            .get(self.sb_rep(name))
            .copied()
            .unwrap_or_default()
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.dims.contains_key(name)
    }

    pub fn declared_dim(&self, name: &str) -> Option<u32> {
        self.dims.get(name).copied()
    }

    /// True for a named label known not to be stably rational.
    pub fn not_stably_rational(&self, label: &Label) -> bool {
        matches!(label, Label::Named(n) if self.status(&n.name) == RationalityStatus::NotStablyRational)
    }

    /// True when the store knows the label to be stably rational.
    pub fn stably_rational(&self, label: &Label) -> bool {
        self.sb_label(label) == Label::Point
    }

    /// Declared distinction between the underlying varieties of two labels.
    pub fn are_distinct(&self, a: &Label, b: &Label) -> bool {
        match (a.core_name(), b.core_name()) {
            (Some(x), Some(y)) => self
                .distinct
                .contains(&ordered(self.sb_rep(x).to_string(), self.sb_rep(y).to_string())),
            _ => false,
        }
    }

    fn sb_named(&self, n: &NamedLabel) -> Option<NamedLabel> {
        let rep = self.sb_rep(&n.name);
        if self.status(rep) == RationalityStatus::StablyRational {
            return None;
        }
        Some(NamedLabel {
            name: rep.to_string(),
            dim: self.declared_dim(rep).unwrap_or(n.dim),
        })
    }

    /// Stable birational class of a label: projective factors and stably
    /// rational factors are dropped, equivalences collapse to representatives.
    pub fn sb_label(&self, label: &Label) -> Label {
        let (factors, _) = label.parts();
        let kept: Vec<NamedLabel> = factors.iter().filter_map(|n| self.sb_named(n)).collect();
        Label::from_parts(kept, 0)
    }

    /// Birational class of a label under the declared same-dimension
    /// equivalences.
    pub fn bir_label(&self, label: &Label) -> Label {
        let (factors, proj) = label.parts();
        let mapped = factors
            .into_iter()
            .map(|n| NamedLabel {
                name: self.bir_rep.get(&n.name).cloned().unwrap_or(n.name),
                dim: n.dim,
            })
            .collect();
        Label::from_parts(mapped, proj)
    }
}

macro_rules! label_class {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
        pub struct $name {
            terms: BTreeMap<Label, BigInt>,
        }

        impl $name {
            pub fn zero() -> Self {
                Self::default()
            }

            pub fn term(label: Label, c: impl Into<BigInt>) -> Self {
                let mut out = Self::zero();
                out.add_term(label, c.into());
                out
            }

            pub fn add_term(&mut self, label: Label, c: BigInt) {
                if c.is_zero() {
                    return;
                }
                let entry = self.terms.entry(label.clone()).or_default();
                *entry += c;
                if entry.is_zero() {
                    self.terms.remove(&label);
                }
            }

            pub fn terms(&self) -> impl Iterator<Item = (&Label, &BigInt)> {
                self.terms.iter()
            }

            pub fn coeff(&self, label: &Label) -> BigInt {
                self.terms.get(label).cloned().unwrap_or_default()
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn len(&self) -> usize {
                self.terms.len()
            }

            pub fn map_labels(&self, f: impl Fn(&Label) -> Label) -> Self {
                let mut out = Self::zero();
                for (l, c) in &self.terms {
                    out.add_term(f(l), c.clone());
                }
                out
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.terms.is_empty() {
                    return f.write_str("0");
                }
                for (i, (l, c)) in self.terms.iter().enumerate() {
                    match (i, c.is_negative()) {
                        (0, true) => f.write_str("-")?,
                        (0, false) => {}
                        (_, true) => f.write_str(" - ")?,
                        (_, false) => f.write_str(" + ")?,
                    }
                    let abs = c.abs();
                    if !abs.is_one() {
                        write!(f, "{abs}")?;
                    }
                    write!(f, "{{{l}}}")?;
                }
                Ok(())
            }
        }

        impl AddAssign<&$name> for $name {
            fn add_assign(&mut self, rhs: &$name) {
                for (l, c) in &rhs.terms {
                    self.add_term(l.clone(), c.clone());
                }
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                let mut out = self.clone();
                out += rhs;
                out
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                let mut out = self.clone();
                out += &(-rhs);
                out
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                &self + &rhs
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                &self - &rhs
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name {
                    terms: self.terms.iter().map(|(l, c)| (l.clone(), -c)).collect(),
                }
            }
        }
    };
}

label_class!(BirClass);
label_class!(SbClass);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirTermJson {
    pub label: String,
    pub dim: u32,
    pub coeff: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbTermJson {
    pub label: String,
    pub coeff: serde_json::Value,
}

impl BirClass {
    pub fn to_json(&self) -> Vec<BirTermJson> {
        self.terms
            .iter()
            .map(|(l, c)| BirTermJson {
                label: l.to_string(),
                dim: l.dim(),
                coeff: coeff_json(c),
            })
            .collect()
    }
}

impl SbClass {
    pub fn to_json(&self) -> Vec<SbTermJson> {
        self.terms
            .iter()
            .map(|(l, c)| SbTermJson {
                label: l.to_string(),
                coeff: coeff_json(c),
            })
            .collect()
    }
}

impl Mul for &BirClass {
    type Output = BirClass;
    fn mul(self, rhs: &BirClass) -> BirClass {
        let mut out = BirClass::zero();
        for (l1, c1) in &self.terms {
            for (l2, c2) in &rhs.terms {
                out.add_term(l1.mul(l2), c1 * c2);
            }
        }
        out
    }
}

/// Birational label of an atom when nothing else is known: its own name.
pub fn default_atom_label(a: &Atom) -> Label {
    Label::named(a.name(), a.dim())
}

/// Image of a homogeneous class of grade `d` in `Z[Bir]`, with atoms read as
/// their own named labels.
pub fn bir_of(x: &GradedClass, d: u32) -> Result<BirClass, BirError> {
    bir_of_with(x, d, default_atom_label)
}

/// As [`bir_of`], with an explicit birational label for every atom.
pub fn bir_of_with(
    x: &GradedClass,
    d: u32,
    atom_label: impl Fn(&Atom) -> Label,
) -> Result<BirClass, BirError> {
    if !x.is_homogeneous_of(d) {
        return Err(BirError::NotHomogeneous(d));
    }
    let mut out = BirClass::zero();
    for (m, c) in x.terms() {
        for a in m.atoms() {
            if !a.flags().geom_irreducible {
                return Err(BirError::AmbiguousComponents(a.name().to_string()));
            }
        }
        if m.tau_exp() > 0 {
            continue;
        }
        let label = m
            .atoms()
            .iter()
            .fold(Label::rational(m.lef_exp()), |acc, a| {
                let l = atom_label(a);
                debug_assert_eq!(l.dim(), a.dim());
                acc.mul(&l)
            });
        out.add_term(label, c.clone());
    }
    Ok(out)
}

/// Forget to stable birational types under the store's knowledge.
pub fn sb_of(b: &BirClass, store: &LabelStore) -> SbClass {
    let mut out = SbClass::zero();
    for (l, c) in b.terms() {
        out.add_term(store.sb_label(l), c.clone());
    }
    out
}

/// Apply the store's declared birational equivalences.
pub fn bir_collapse(b: &BirClass, store: &LabelStore) -> BirClass {
    b.map_labels(|l| store.bir_label(l))
}

/// A set partition of labels, listing only the blocks that merge two or
/// more labels.
pub type MergeWitness = Vec<Vec<Label>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeOutcome {
    /// Some admissible identification of labels makes the classes equal.
    Yes(MergeWitness),
    No,
}

impl MergeOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, MergeOutcome::Yes(_))
    }
}

pub fn render_witness(w: &MergeWitness) -> Vec<Vec<String>> {
    w.iter()
        .map(|block| block.iter().map(ToString::to_string).collect())
        .collect()
}

struct Element {
    label: Label,
    anchor: bool,
    avoids_anchor: bool,
    dim: Option<u32>,
}

/// Can `x` equal `target` in `Z[SB]` under some identification of labels
/// compatible with the store? `Point` is the only fixed class; a label known
/// not to be stably rational never joins it, and declared-distinct labels
/// never share a block.
pub fn can_equal(
    target: &SbClass,
    x: &SbClass,
    store: &LabelStore,
    budget: usize,
) -> Result<MergeOutcome, BirError> {
    let target = target.map_labels(|l| store.sb_label(l));
    let x = x.map_labels(|l| store.sb_label(l));
    let labels: BTreeSet<Label> = target.terms().chain(x.terms()).map(|(l, _)| l.clone()).collect();
    let elements = labels
        .into_iter()
        .map(|l| Element {
            anchor: l == Label::Point,
            avoids_anchor: store.not_stably_rational(&l),
            dim: None,
            label: l,
        })
        .collect();
    search(elements, &x.terms, &target.terms, store, budget)
}

/// Dimension-respecting variant over `Z[Bir]`: rational classes are fixed,
/// labels of different dimensions never merge, and `X` or `X x P^c` with `X`
/// known not stably rational never joins a rational class.
pub fn can_equal_bir(
    target: &BirClass,
    x: &BirClass,
    store: &LabelStore,
    budget: usize,
) -> Result<MergeOutcome, BirError> {
    let target = bir_collapse(target, store);
    let x = bir_collapse(x, store);
    let labels: BTreeSet<Label> = target.terms().chain(x.terms()).map(|(l, _)| l.clone()).collect();
    let elements = labels
        .into_iter()
        .map(|l| {
            let avoids = match &l {
                Label::Named(_) => store.not_stably_rational(&l),
                Label::Product { factors, .. } if factors.len() == 1 => {
                    store.not_stably_rational(&Label::Named(factors[0].clone()))
                }
                _ => false,
            };
            Element {
                anchor: l.is_rational(),
                avoids_anchor: avoids,
                dim: Some(l.dim()),
                label: l,
            }
        })
        .collect();
    search(elements, &x.terms, &target.terms, store, budget)
}

fn search(
    elements: Vec<Element>,
    x: &BTreeMap<Label, BigInt>,
    target: &BTreeMap<Label, BigInt>,
    store: &LabelStore,
    budget: usize,
) -> Result<MergeOutcome, BirError> {
    if elements.len() > budget {
        return Err(BirError::SearchBudget {
            labels: elements.len(),
            budget,
        });
    }
    let index: BTreeMap<&Label, usize> = elements.iter().enumerate().map(|(i, e)| (&e.label, i)).collect();
    let x: Vec<(usize, &BigInt)> = x.iter().map(|(l, c)| (index[l], c)).collect();
    let target: Vec<(usize, &BigInt)> = target.iter().map(|(l, c)| (index[l], c)).collect();

    let mut s = Search {
        elements: &elements,
        store,
        x,
        target,
        block_of: Vec::with_capacity(elements.len()),
        blocks: Vec::new(),
    };
    Ok(match s.run() {
        Some(blocks) => MergeOutcome::Yes(
            blocks
                .into_iter()
                .filter(|b| b.len() > 1)
                .map(|b| b.into_iter().map(|i| elements[i].label.clone()).collect())
                .collect(),
        ),
        None => MergeOutcome::No,
    })
}

struct Search<'a> {
    elements: &'a [Element],
    store: &'a LabelStore,
    x: Vec<(usize, &'a BigInt)>,
    target: Vec<(usize, &'a BigInt)>,
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self) -> Option<Vec<Vec<usize>>> {
        let i = self.block_of.len();
        if i == self.elements.len() {
            return self.balanced().then(|| self.blocks.clone());
        }
        // Opening a fresh block first makes the trivial partition the first leaf.
        self.blocks.push(vec![i]);
        self.block_of.push(self.blocks.len() - 1);
        if let Some(found) = self.run() {
            return Some(found);
        }
        self.block_of.pop();
        self.blocks.pop();

        for b in 0..self.blocks.len() {
            if !self.admissible(i, b) {
                continue;
            }
            self.blocks[b].push(i);
            self.block_of.push(b);
            if let Some(found) = self.run() {
                return Some(found);
            }
            self.block_of.pop();
            self.blocks[b].pop();
        }
        None
    }

    fn admissible(&self, i: usize, b: usize) -> bool {
        let e = &self.elements[i];
        self.blocks[b].iter().all(|&j| {
            let o = &self.elements[j];
            !(e.anchor && o.anchor)
                && !(e.anchor && o.avoids_anchor)
                && !(o.anchor && e.avoids_anchor)
                && e.dim == o.dim
                && !self.store.are_distinct(&e.label, &o.label)
        })
    }

    fn balanced(&self) -> bool {
        let mut sums: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (i, c) in &self.x {
            *sums.entry(self.block_of[*i]).or_default() += *c;
        }
        for (i, c) in &self.target {
            *sums.entry(self.block_of[*i]).or_default() -= *c;
        }
        sums.values().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{atom_class, AtomFlags};

    fn point() -> SbClass {
        SbClass::term(Label::Point, 1)
    }

    #[test]
    fn label_normalization() {
        assert_eq!(Label::rational(0), Label::Point);
        let am = Label::named("AM", 3);
        assert_eq!(am.times_projective(0), am);
        assert_eq!(Label::rational(2).times_projective(3), Label::Rational(5));
        assert_eq!(Label::Point.times_projective(2), Label::Rational(2));
        let p = am.times_projective(3);
        assert_eq!(p.dim(), 6);
        assert_eq!(p.to_string(), "AM×P^3");
        assert_eq!(p.times_projective(1), am.times_projective(4));
    }

    #[test]
    fn bir_of_examples() {
        let t = GradedClass::tau();
        let l = GradedClass::lef();
        let x = t.pow(2) + &t * &l + l.pow(2);
        assert_eq!(bir_of(&x, 2).unwrap(), BirClass::term(Label::Rational(2), 1));

        let e1 = Atom::new("E1", 4, AtomFlags::default());
        let c = atom_class(&e1, 4).unwrap();
        assert_eq!(bir_of(&c, 4).unwrap(), BirClass::term(Label::named("E1", 4), 1));
        assert!(bir_of(&c.shift(1), 5).unwrap().is_zero());

        assert_eq!(bir_of(&(&c + &t), 4), Err(BirError::NotHomogeneous(4)));
        let bad = Atom::new(
            "C",
            1,
            AtomFlags {
                irreducible: true,
                geom_irreducible: false,
            },
        );
        assert_eq!(
            bir_of(&GradedClass::generator(bad), 1),
            Err(BirError::AmbiguousComponents("C".into()))
        );
    }

    #[test]
    fn sb_of_examples() {
        let store = LabelStore::empty();
        assert_eq!(sb_of(&BirClass::term(Label::Rational(2), 1), &store), point());
        let am = Label::named("AM", 3);
        assert_eq!(
            sb_of(&BirClass::term(am.times_projective(3), 1), &store),
            SbClass::term(am.clone(), 1)
        );

        let mut b = LabelStoreBuilder::new();
        b.declare("E1", 4, RationalityStatus::Unknown).unwrap();
        b.declare("E2", 4, RationalityStatus::Unknown).unwrap();
        b.equivalent("E1", "E2");
        let store = b.build().unwrap();
        let x = &BirClass::term(Label::named("E1", 4), 1) + &BirClass::term(Label::named("E2", 4), 1);
        assert_eq!(sb_of(&x, &store), SbClass::term(Label::named("E1", 4), 2));
        assert_eq!(sb_of(&x, &store).to_string(), "2{E1}");
    }

    #[test]
    fn store_consistency() {
        let mut b = LabelStoreBuilder::new();
        b.declare("A", 2, RationalityStatus::StablyRational).unwrap();
        b.declare("B", 2, RationalityStatus::NotStablyRational).unwrap();
        b.equivalent("A", "B");
        assert!(matches!(b.build(), Err(BirError::InconsistentStore(_))));

        let mut b = LabelStoreBuilder::new();
        b.declare("A", 2, RationalityStatus::Unknown).unwrap();
        b.declare("B", 2, RationalityStatus::Unknown).unwrap();
        b.declare("C", 2, RationalityStatus::Unknown).unwrap();
        b.equivalent("A", "B").equivalent("B", "C").distinct("A", "C");
        assert!(matches!(b.build(), Err(BirError::InconsistentStore(_))));

        let mut b = LabelStoreBuilder::new();
        b.declare("A", 2, RationalityStatus::Unknown).unwrap();
        assert!(b.declare("A", 3, RationalityStatus::Unknown).is_err());
        b.equivalent("A", "Z");
        assert_eq!(b.build().unwrap_err(), BirError::UnknownLabel("Z".into()));
    }

    #[test]
    fn stably_rational_tag_collapses_to_point() {
        let mut b = LabelStoreBuilder::new();
        b.declare("Q", 3, RationalityStatus::StablyRational).unwrap();
        b.declare("V", 2, RationalityStatus::Unknown).unwrap();
        let store = b.build().unwrap();
        let x = BirClass::term(Label::named("Q", 3), 1);
        assert_eq!(sb_of(&x, &store), point());
        let prod = Label::named("Q", 3).mul(&Label::named("V", 2));
        assert_eq!(store.sb_label(&prod), Label::named("V", 2));
    }

    #[test]
    fn can_equal_examples() {
        let mut b = LabelStoreBuilder::new();
        b.declare("U", 3, RationalityStatus::Unknown).unwrap();
        b.declare("V", 3, RationalityStatus::Unknown).unwrap();
        b.declare("AM", 3, RationalityStatus::NotStablyRational).unwrap();
        let store = b.build().unwrap();
        let u = Label::named("U", 3);
        let v = Label::named("V", 3);
        let am = Label::named("AM", 3);

        let x = &SbClass::term(u.clone(), 2) - &SbClass::term(am, 1);
        assert_eq!(can_equal(&point(), &x, &store, DEFAULT_BUDGET).unwrap(), MergeOutcome::No);

        assert_eq!(
            can_equal(&point(), &point(), &store, DEFAULT_BUDGET).unwrap(),
            MergeOutcome::Yes(vec![])
        );

        let x = &(&SbClass::term(u.clone(), 1) - &SbClass::term(v.clone(), 1)) + &point();
        match can_equal(&point(), &x, &store, DEFAULT_BUDGET).unwrap() {
            MergeOutcome::Yes(w) => {
                // either U=V or a merge that cancels the pair
                assert_eq!(w.len(), 1);
                assert!(w[0].contains(&u) && w[0].contains(&v));
            }
            MergeOutcome::No => panic!("expected a witness"),
        }
    }

    #[test]
    fn distinctions_block_merges() {
        let mut b = LabelStoreBuilder::new();
        b.declare("U", 3, RationalityStatus::Unknown).unwrap();
        b.declare("V", 3, RationalityStatus::Unknown).unwrap();
        b.distinct("U", "V");
        let store = b.build().unwrap();
        let x = &(&SbClass::term(Label::named("U", 3), 1) - &SbClass::term(Label::named("V", 3), 1)) + &point();
        // Sending both to the point would identify them.
        assert_eq!(can_equal(&point(), &x, &store, DEFAULT_BUDGET).unwrap(), MergeOutcome::No);

        let y = SbClass::term(Label::named("U", 3), 1);
        match can_equal(&point(), &y, &store, DEFAULT_BUDGET).unwrap() {
            MergeOutcome::Yes(w) => assert_eq!(w.len(), 1),
            MergeOutcome::No => panic!("U alone may still be stably rational"),
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mut x = SbClass::zero();
        for i in 0..13 {
            x.add_term(Label::named(format!("U{i:02}"), 1), BigInt::one());
        }
        assert_eq!(
            can_equal(&point(), &x, &LabelStore::empty(), DEFAULT_BUDGET),
            Err(BirError::SearchBudget { labels: 14, budget: 12 })
        );
    }

    #[test]
    fn bir_search_respects_dimensions() {
        let store = LabelStore::empty();
        let target = BirClass::term(Label::Rational(4), 1);
        let u3 = BirClass::term(Label::named("U", 3).times_projective(1), 1);
        assert!(can_equal_bir(&target, &u3, &store, DEFAULT_BUDGET).unwrap().is_yes());
        let u2 = BirClass::term(Label::named("U", 2), 1);
        assert_eq!(can_equal_bir(&target, &u2, &store, DEFAULT_BUDGET).unwrap(), MergeOutcome::No);
        let literal = BirClass::term(Label::Point, 1);
        assert_eq!(can_equal_bir(&literal, &u3, &store, DEFAULT_BUDGET).unwrap(), MergeOutcome::No);
    }
}
