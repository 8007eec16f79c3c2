//! Exact arithmetic in a free model of the dimension-graded Grothendieck ring.
//!
//! Elements are finite integer combinations of monomials `t^a * L^b * X1 * X2 ...`
//! where `t` is the point class placed in degree one, `L` is the affine line in
//! degree one and the `Xi` are user-declared variety atoms sitting in their own
//! dimension. The degree of a monomial is `a + b + sum(dim Xi)`; a class
//! `[X]_d` is stored as `t^(d - dim X) * X`.
//!
//! The generator type is abstract so that the same arithmetic serves the
//! equivariant ring, where atoms additionally carry an action label.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("atom name `{0}` is already defined")]
    NameClash(String),
    #[error("grade {grade} is below dimension {dim}")]
    GradeBelowDimension { grade: u32, dim: u32 },
    #[error("invalid blow-up: {0}")]
    InvalidBlowup(String),
}

/// A symbol that can appear in a monomial next to `t` and `L`.
pub trait Generator: Clone + Ord + Hash + fmt::Debug + fmt::Display {
    fn dim(&self) -> u32;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtomFlags {
    pub irreducible: bool,
    pub geom_irreducible: bool,
}

impl Default for AtomFlags {
    fn default() -> Self {
        AtomFlags {
            irreducible: true,
            geom_irreducible: true,
        }
    }
}

#[derive(Debug)]
struct AtomData {
    name: String,
    dim: u32,
    flags: AtomFlags,
}

/// Handle to a declared variety. Cheap to clone; compared by name and dimension.
#[derive(Clone)]
pub struct Atom(Arc<AtomData>);

impl Atom {
    /// Creates a free-standing atom. Prefer [`AtomTable::define`] when names
    /// must be unique.
    pub fn new(name: impl Into<String>, dim: u32, flags: AtomFlags) -> Self {
        Atom(Arc::new(AtomData {
            name: name.into(),
            dim,
            flags,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn flags(&self) -> AtomFlags {
        self.0.flags
    }
}

impl Generator for Atom {
    fn dim(&self) -> u32 {
        self.0.dim
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.0.name == other.0.name && self.0.dim == other.0.dim
    }
}

impl Eq for Atom {}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .name
            .cmp(&other.0.name)
            .then(self.0.dim.cmp(&other.0.dim))
    }
}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
        self.0.dim.hash(state);
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0.name, self.0.dim)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// Append-only registry of atoms with unique names.
#[derive(Debug, Clone, Default)]
pub struct AtomTable {
    atoms: Vec<Atom>,
    by_name: HashMap<String, usize>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn define(
        &mut self,
        name: impl Into<String>,
        dim: u32,
        flags: AtomFlags,
    ) -> Result<Atom, RingError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(RingError::NameClash(name));
        }
        let atom = Atom::new(name.clone(), dim, flags);
        self.by_name.insert(name, self.atoms.len());
        self.atoms.push(atom.clone());
        Ok(atom)
    }

    pub fn get(&self, name: &str) -> Option<&Atom> {
        self.by_name.get(name).map(|&i| &self.atoms[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// `t^tau * L^lef * (atoms)`, atoms kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial<A> {
    tau: u32,
    lef: u32,
    atoms: Vec<A>,
}

impl<A: Generator> Monomial<A> {
    pub fn new(tau: u32, lef: u32, mut atoms: Vec<A>) -> Self {
        atoms.sort();
        Monomial { tau, lef, atoms }
    }

    pub fn one() -> Self {
        Monomial {
            tau: 0,
            lef: 0,
            atoms: Vec::new(),
        }
    }

    pub fn tau_exp(&self) -> u32 {
        self.tau
    }

    pub fn lef_exp(&self) -> u32 {
        self.lef
    }

    pub fn atoms(&self) -> &[A] {
        &self.atoms
    }

    pub fn atom_dim(&self) -> u32 {
        self.atoms.iter().map(Generator::dim).sum()
    }

    pub fn grade(&self) -> u32 {
        self.tau + self.lef + self.atom_dim()
    }

    pub fn is_one(&self) -> bool {
        self.tau == 0 && self.lef == 0 && self.atoms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut atoms = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() && j < other.atoms.len() {
            if self.atoms[i] <= other.atoms[j] {
                atoms.push(self.atoms[i].clone());
                i += 1;
            } else {
                atoms.push(other.atoms[j].clone());
                j += 1;
            }
        }
        atoms.extend_from_slice(&self.atoms[i..]);
        atoms.extend_from_slice(&other.atoms[j..]);
        Monomial {
            tau: self.tau + other.tau,
            lef: self.lef + other.lef,
            atoms,
        }
    }

    /// Exact quotient `self / divisor`, if the divisor divides.
    pub fn divide(&self, divisor: &Self) -> Option<Self> {
        if divisor.tau > self.tau || divisor.lef > self.lef {
            return None;
        }
        let mut atoms = Vec::with_capacity(self.atoms.len());
        let mut rest = divisor.atoms.iter().peekable();
        for a in &self.atoms {
            if rest.peek() == Some(&a) {
                rest.next();
            } else {
                atoms.push(a.clone());
            }
        }
        if rest.next().is_some() {
            return None;
        }
        Some(Monomial {
            tau: self.tau - divisor.tau,
            lef: self.lef - divisor.lef,
            atoms,
        })
    }

    fn write_factors(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let power = |base: &str, e: u32| {
            if e == 1 {
                base.to_string()
            } else {
                format!("{base}^{e}")
            }
        };
        if self.tau > 0 {
            parts.push(power("t", self.tau));
        }
        if self.lef > 0 {
            parts.push(power("L", self.lef));
        }
        let mut i = 0;
        while i < self.atoms.len() {
            let mut j = i;
            while j < self.atoms.len() && self.atoms[j] == self.atoms[i] {
                j += 1;
            }
            parts.push(power(&self.atoms[i].to_string(), (j - i) as u32));
            i = j;
        }
        f.write_str(&parts.join("*"))
    }
}

// Canonical order: descending grade, then descending t-exponent, then
// descending L-exponent, then lexicographic atoms.
impl<A: Generator> Ord for Monomial<A> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .grade()
            .cmp(&self.grade())
            .then(other.tau.cmp(&self.tau))
            .then(other.lef.cmp(&self.lef))
            .then_with(|| self.atoms.cmp(&other.atoms))
    }
}

impl<A: Generator> PartialOrd for Monomial<A> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<A: Generator> fmt::Display for Monomial<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            f.write_str("1")
        } else {
            self.write_factors(f)
        }
    }
}

/// One entry of the JSON term-list rendering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermJson {
    pub coeff: serde_json::Value,
    pub tau: u32,
    pub lef: u32,
    pub atoms: Vec<String>,
}

/// Integers that fit in 64 bits are emitted as JSON numbers, larger ones as
/// decimal strings.
pub fn coeff_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

/// Finite integer combination of monomials, with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Class<A: Generator> {
    terms: BTreeMap<Monomial<A>, BigInt>,
}

/// An element of the free model of the graded Grothendieck ring.
pub type GradedClass = Class<Atom>;

impl<A: Generator> Default for Class<A> {
    fn default() -> Self {
        Class {
            terms: BTreeMap::new(),
        }
    }
}

impl<A: Generator> Class<A> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::one(), BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(Monomial::one(), c.into())
    }

    pub fn tau() -> Self {
        Self::monomial(Monomial::new(1, 0, Vec::new()), BigInt::one())
    }

    pub fn lef() -> Self {
        Self::monomial(Monomial::new(0, 1, Vec::new()), BigInt::one())
    }

    pub fn tau_pow(k: u32) -> Self {
        Self::monomial(Monomial::new(k, 0, Vec::new()), BigInt::one())
    }

    pub fn lef_pow(k: u32) -> Self {
        Self::monomial(Monomial::new(0, k, Vec::new()), BigInt::one())
    }

    /// The generator in its own dimension.
    pub fn generator(a: A) -> Self {
        Self::monomial(Monomial::new(0, 0, vec![a]), BigInt::one())
    }

    pub fn monomial(m: Monomial<A>, c: BigInt) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    /// `[P^n]_d = sum_{i<=n} t^(d-i) L^i`.
    pub fn projective(n: u32, d: u32) -> Result<Self, RingError> {
        if d < n {
            return Err(RingError::GradeBelowDimension { grade: d, dim: n });
        }
        let mut out = Self::zero();
        for i in 0..=n {
            out.add_term(Monomial::new(d - i, i, Vec::new()), BigInt::one());
        }
        Ok(out)
    }

    /// `[G_m^k]_d = t^(d-k) (L - t)^k`, fully expanded.
    pub fn torus(k: u32, d: u32) -> Result<Self, RingError> {
        if d < k {
            return Err(RingError::GradeBelowDimension { grade: d, dim: k });
        }
        let mut out = Self::zero();
        let mut binom = BigInt::one();
        for j in 0..=k {
            // term L^(k-j) (-t)^j with coefficient C(k, j)
            let c = if j % 2 == 0 {
                binom.clone()
            } else {
                -binom.clone()
            };
            out.add_term(Monomial::new(d - k + j, k - j, Vec::new()), c);
            binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
        }
        Ok(out)
    }

    pub fn add_term(&mut self, m: Monomial<A>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<A>, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial<A>) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Multiplication by `t^k`, i.e. re-grading up by `k`.
    pub fn shift(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        Class {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        Monomial {
                            tau: m.tau + k,
                            lef: m.lef,
                            atoms: m.atoms.clone(),
                        },
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Class {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// The common grade of all monomials; `None` for zero or mixed classes.
    pub fn homogeneous_grade(&self) -> Option<u32> {
        let mut grades = self.terms.keys().map(Monomial::grade);
        let first = grades.next()?;
        grades.all(|g| g == first).then_some(first)
    }

    /// Zero counts as homogeneous of every grade.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.grade() == d)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial<A>) -> bool) -> Self {
        Class {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Ring substitution of every generator, keeping `t` and `L`.
    pub fn map_generators<B: Generator>(&self, f: impl Fn(&A) -> Class<B>) -> Class<B> {
        let mut out = Class::<B>::zero();
        for (m, c) in &self.terms {
            let mut term = Class::<B>::monomial(Monomial::new(m.tau, m.lef, Vec::new()), c.clone());
            for a in &m.atoms {
                term = &term * &f(a);
            }
            out += term;
        }
        out
    }

    /// Every monomial divided by `divisor`, if all of them are divisible.
    pub fn divide_monomial(&self, divisor: &Monomial<A>) -> Option<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.divide(divisor)?, c.clone());
        }
        Some(out)
    }

    pub fn to_terms_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                coeff: coeff_json(c),
                tau: m.tau,
                lef: m.lef,
                atoms: m.atoms.iter().map(ToString::to_string).collect(),
            })
            .collect()
    }
}

impl<A: Generator> fmt::Display for Class<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                m.write_factors(f)?;
            } else {
                write!(f, "{abs}*")?;
                m.write_factors(f)?;
            }
        }
        Ok(())
    }
}

impl<A: Generator> AddAssign<&Class<A>> for Class<A> {
    fn add_assign(&mut self, rhs: &Class<A>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<A: Generator> AddAssign for Class<A> {
    fn add_assign(&mut self, rhs: Class<A>) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl<A: Generator> SubAssign<&Class<A>> for Class<A> {
    fn sub_assign(&mut self, rhs: &Class<A>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<A: Generator> SubAssign for Class<A> {
    fn sub_assign(&mut self, rhs: Class<A>) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl<A: Generator> Add for &Class<A> {
    type Output = Class<A>;
    fn add(self, rhs: &Class<A>) -> Class<A> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<A: Generator> Add for Class<A> {
    type Output = Class<A>;
    fn add(mut self, rhs: Class<A>) -> Class<A> {
        self += rhs;
        self
    }
}

impl<A: Generator> Sub for &Class<A> {
    type Output = Class<A>;
    fn sub(self, rhs: &Class<A>) -> Class<A> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<A: Generator> Sub for Class<A> {
    type Output = Class<A>;
    fn sub(mut self, rhs: Class<A>) -> Class<A> {
        self -= rhs;
        self
    }
}

impl<A: Generator> Neg for &Class<A> {
    type Output = Class<A>;
    fn neg(self) -> Class<A> {
        Class {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<A: Generator> Neg for Class<A> {
    type Output = Class<A>;
    fn neg(self) -> Class<A> {
        -&self
    }
}

impl<A: Generator> Mul for &Class<A> {
    type Output = Class<A>;
    fn mul(self, rhs: &Class<A>) -> Class<A> {
        let mut out = Class::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl<A: Generator> Mul for Class<A> {
    type Output = Class<A>;
    fn mul(self, rhs: Class<A>) -> Class<A> {
        &self * &rhs
    }
}

impl<A: Generator> Sum for Class<A> {
    fn sum<I: Iterator<Item = Class<A>>>(iter: I) -> Self {
        iter.fold(Class::zero(), |acc, x| acc + x)
    }
}

/// Image of a graded class under `t := 1`; no monomial carries a `t`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ClassicalClass(GradedClass);

impl ClassicalClass {
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<Atom>, &BigInt)> {
        self.0.terms()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Coefficient of `L^lef * atoms`.
    pub fn coeff(&self, lef: u32, atoms: Vec<Atom>) -> BigInt {
        self.0.coeff(&Monomial::new(0, lef, atoms))
    }

    /// The same element read back as a graded class with every `t` erased.
    pub fn as_graded(&self) -> &GradedClass {
        &self.0
    }

    pub fn to_terms_json(&self) -> Vec<TermJson> {
        self.0.to_terms_json()
    }
}

impl fmt::Display for ClassicalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Add for &ClassicalClass {
    type Output = ClassicalClass;
    fn add(self, rhs: &ClassicalClass) -> ClassicalClass {
        ClassicalClass(&self.0 + &rhs.0)
    }
}

impl Mul for &ClassicalClass {
    type Output = ClassicalClass;
    fn mul(self, rhs: &ClassicalClass) -> ClassicalClass {
        ClassicalClass(&self.0 * &rhs.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reduction {
    /// `t := 1`, landing in the classical ring.
    TauToOne,
    /// Quotient by the ideal `(t)`.
    ModTau,
    /// Quotient by the ideal `(t*L)`.
    ModTauLef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduced {
    Classical(ClassicalClass),
    Graded(GradedClass),
}

impl fmt::Display for Reduced {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reduced::Classical(c) => c.fmt(f),
            Reduced::Graded(g) => g.fmt(f),
        }
    }
}

impl Reduced {
    pub fn to_terms_json(&self) -> Vec<TermJson> {
        match self {
            Reduced::Classical(c) => c.to_terms_json(),
            Reduced::Graded(g) => g.to_terms_json(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdealGenerator {
    Tau,
    TauLef,
}

impl IdealGenerator {
    pub fn monomial<A: Generator>(self) -> Monomial<A> {
        match self {
            IdealGenerator::Tau => Monomial::new(1, 0, Vec::new()),
            IdealGenerator::TauLef => Monomial::new(1, 1, Vec::new()),
        }
    }
}

/// `[X]_d = t^(d - dim X) * X`.
pub fn atom_class(a: &Atom, d: u32) -> Result<GradedClass, RingError> {
    if d < a.dim() {
        return Err(RingError::GradeBelowDimension {
            grade: d,
            dim: a.dim(),
        });
    }
    Ok(GradedClass::generator(a.clone()).shift(d - a.dim()))
}

pub fn projective_class(n: u32, d: u32) -> Result<GradedClass, RingError> {
    GradedClass::projective(n, d)
}

pub fn torus_class(k: u32, d: u32) -> Result<GradedClass, RingError> {
    GradedClass::torus(k, d)
}

pub fn tau_to_one(x: &GradedClass) -> ClassicalClass {
    let mut out = GradedClass::zero();
    for (m, c) in x.terms() {
        out.add_term(Monomial::new(0, m.lef_exp(), m.atoms().to_vec()), c.clone());
    }
    ClassicalClass(out)
}

pub fn mod_tau<A: Generator>(x: &Class<A>) -> Class<A> {
    x.filter(|m| m.tau_exp() == 0)
}

pub fn mod_tau_lef<A: Generator>(x: &Class<A>) -> Class<A> {
    x.filter(|m| m.tau_exp() == 0 || m.lef_exp() == 0)
}

pub fn reduce(x: &GradedClass, mode: Reduction) -> Reduced {
    match mode {
        Reduction::TauToOne => Reduced::Classical(tau_to_one(x)),
        Reduction::ModTau => Reduced::Graded(mod_tau(x)),
        Reduction::ModTauLef => Reduced::Graded(mod_tau_lef(x)),
    }
}

/// Membership in the monomial ideal `(t)` or `(t*L)`, returning the exact
/// quotient as witness.
pub fn in_ideal<A: Generator>(x: &Class<A>, gen: IdealGenerator) -> Option<Class<A>> {
    x.divide_monomial(&gen.monomial())
}

/// `[E]_e - [Z]_e` for the exceptional divisor `E` of the blow-up of `Y`
/// along `Z`, which equals `[Bl_Z Y]_e - [Y]_e` by the blow-up relation.
pub fn blowup_delta(
    z_class: &GradedClass,
    dim_y: u32,
    dim_z: u32,
    e: u32,
) -> Result<GradedClass, RingError> {
    if dim_z >= dim_y || dim_y > e {
        return Err(RingError::InvalidBlowup(format!(
            "need dim Z < dim Y <= e, got dim Z = {dim_z}, dim Y = {dim_y}, e = {e}"
        )));
    }
    if !z_class.is_homogeneous_of(dim_z) {
        return Err(RingError::InvalidBlowup(format!(
            "center class is not homogeneous of grade {dim_z}"
        )));
    }
    let c = dim_y - dim_z;
    let fibre = GradedClass::projective(c - 1, c - 1)?.shift(e - dim_y + 1);
    let delta = fibre - GradedClass::tau_pow(e - dim_z);
    Ok(z_class * &delta)
}
