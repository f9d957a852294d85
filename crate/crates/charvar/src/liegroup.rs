//! Reductive group descriptors: a compact or complex reductive group encoded
//! as (T^k x prod G~_i)/Z with each G~_i simple and simply connected and Z a
//! finite central subgroup given by independent cyclic generators.
//!
//! All homotopy data (pi1, pi1 of the derived subgroup, torsion-freeness,
//! universal cover decomposition) is computed from this encoding.

use crate::zmodule::{cokernel, FgAbelianGroup, IntMatrix};
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieGroupError {
    #[error("invalid descriptor: {0}")]
    DescriptorInvalid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("descriptor parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E6,
    E7,
    E8,
    F4,
    G2,
}

/// A simple, simply connected compact (or complex) Lie group, named by its
/// root-system type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SimpleType {
    pub family: Family,
    pub rank: u32,
}

impl SimpleType {
    pub fn new(family: Family, rank: u32) -> Result<Self, LieGroupError> {
        let ok = match family {
            Family::A | Family::B | Family::C => rank >= 1,
            Family::D => rank >= 3,
            Family::E6 => rank == 6,
            Family::E7 => rank == 7,
            Family::E8 => rank == 8,
            Family::F4 => rank == 4,
            Family::G2 => rank == 2,
        };
        if ok {
            Ok(SimpleType { family, rank })
        } else {
            Err(LieGroupError::InvalidParameter(format!(
                "invalid rank {rank} for family {family:?}"
            )))
        }
    }

    /// Center as a list of cyclic orders. For D_n with n even the center is
    /// (Z/2)^2; the two generator labels are an arbitrary but fixed choice
    /// (index 0 and index 1), which affects descriptor authoring only.
    pub fn center_orders(&self) -> Vec<u64> {
        match self.family {
            Family::A => vec![self.rank as u64 + 1],
            Family::B | Family::C | Family::E7 => vec![2],
            Family::D => {
                if self.rank % 2 == 1 {
                    vec![4]
                } else {
                    vec![2, 2]
                }
            }
            Family::E6 => vec![3],
            Family::E8 | Family::F4 | Family::G2 => vec![],
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::A => write!(f, "A {}", self.rank),
            Family::B => write!(f, "B {}", self.rank),
            Family::C => write!(f, "C {}", self.rank),
            Family::D => write!(f, "D {}", self.rank),
            Family::E6 => write!(f, "E6"),
            Family::E7 => write!(f, "E7"),
            Family::E8 => write!(f, "E8"),
            Family::F4 => write!(f, "F4"),
            Family::G2 => write!(f, "G2"),
        }
    }
}

pub type Rational = Ratio<i64>;

/// An element of (S^1)^k x prod Z(G~_i): torus coordinates as rationals
/// mod 1 and one residue vector per simple factor (matching that factor's
/// center cyclic structure).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CentralElement {
    pub torus_part: Vec<Rational>,
    pub factor_parts: Vec<Vec<u64>>,
}

fn reduce_mod_one(r: Rational) -> Rational {
    let r = r - r.floor();
    if r < Ratio::from_integer(0) {
        r + Ratio::from_integer(1)
    } else {
        r
    }
}

impl CentralElement {
    pub fn identity(torus_rank: usize, factors: &[SimpleType]) -> Self {
        CentralElement {
            torus_part: vec![Ratio::from_integer(0); torus_rank],
            factor_parts: factors.iter().map(|f| vec![0; f.center_orders().len()]).collect(),
        }
    }

    fn normalized(&self, factors: &[SimpleType]) -> Self {
        CentralElement {
            torus_part: self.torus_part.iter().map(|&r| reduce_mod_one(r)).collect(),
            factor_parts: self
                .factor_parts
                .iter()
                .zip(factors)
                .map(|(p, f)| {
                    p.iter().zip(f.center_orders()).map(|(&r, m)| r % m).collect()
                })
                .collect(),
        }
    }

    fn add(&self, other: &Self, factors: &[SimpleType]) -> Self {
        CentralElement {
            torus_part: self
                .torus_part
                .iter()
                .zip(&other.torus_part)
                .map(|(&a, &b)| reduce_mod_one(a + b))
                .collect(),
            factor_parts: self
                .factor_parts
                .iter()
                .zip(&other.factor_parts)
                .zip(factors)
                .map(|((a, b), f)| {
                    a.iter()
                        .zip(b)
                        .zip(f.center_orders())
                        .map(|((&x, &y), m)| (x + y) % m)
                        .collect()
                })
                .collect(),
        }
    }

    /// Order as an element of (Q/Z)^k x prod Z(G~_i).
    pub fn order(&self, factors: &[SimpleType]) -> u64 {
        let mut ord: u64 = 1;
        for r in &self.torus_part {
            let r = reduce_mod_one(*r);
            ord = ord.lcm(&(*r.denom() as u64));
        }
        for (p, f) in self.factor_parts.iter().zip(factors) {
            for (&r, m) in p.iter().zip(f.center_orders()) {
                ord = ord.lcm(&(m / r.gcd(&m)));
            }
        }
        ord
    }

    pub fn is_identity(&self) -> bool {
        self.torus_part.iter().all(|r| reduce_mod_one(*r) == Ratio::from_integer(0))
            && self.factor_parts.iter().flatten().all(|&r| r == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Compact,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Compact => write!(f, "compact"),
            Field::Complex => write!(f, "complex"),
        }
    }
}

/// G = (T^k x prod G~_i)/Z, with Z described by independent cyclic
/// generators. Compact and complex descriptors share all computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductiveDescriptor {
    field: Field,
    torus_rank: usize,
    factors: Vec<SimpleType>,
    central_generators: Vec<(CentralElement, u64)>,
}

impl ReductiveDescriptor {
    pub fn new(
        field: Field,
        torus_rank: usize,
        factors: Vec<SimpleType>,
        central_generators: Vec<(CentralElement, u64)>,
    ) -> Result<Self, LieGroupError> {
        let desc = ReductiveDescriptor { field, torus_rank, factors, central_generators };
        desc.validate()?;
        Ok(desc)
    }

    fn validate(&self) -> Result<(), LieGroupError> {
        for (gen, order) in &self.central_generators {
            if gen.torus_part.len() != self.torus_rank {
                return Err(LieGroupError::DescriptorInvalid(format!(
                    "central generator has {} torus coordinates, expected {}",
                    gen.torus_part.len(),
                    self.torus_rank
                )));
            }
            for r in &gen.torus_part {
                if *r < Ratio::from_integer(0) || *r >= Ratio::from_integer(1) {
                    return Err(LieGroupError::DescriptorInvalid(format!(
                        "torus coordinate {r} not in [0, 1)"
                    )));
                }
            }
            if gen.factor_parts.len() != self.factors.len() {
                return Err(LieGroupError::DescriptorInvalid(format!(
                    "central generator has {} factor parts, expected {}",
                    gen.factor_parts.len(),
                    self.factors.len()
                )));
            }
            for (p, f) in gen.factor_parts.iter().zip(&self.factors) {
                let orders = f.center_orders();
                if p.len() != orders.len() {
                    return Err(LieGroupError::DescriptorInvalid(format!(
                        "factor part for {f} has {} residues, expected {}",
                        p.len(),
                        orders.len()
                    )));
                }
                for (&r, m) in p.iter().zip(orders) {
                    if r >= m {
                        return Err(LieGroupError::DescriptorInvalid(format!(
                            "residue {r} out of range for Z/{m}"
                        )));
                    }
                }
            }
            let actual = gen.order(&self.factors);
            if actual != *order {
                return Err(LieGroupError::DescriptorInvalid(format!(
                    "stated order {order} does not match actual order {actual}"
                )));
            }
        }
        // Independence: the subgroup generated must have cardinality equal to
        // the product of the stated orders.
        let expected: u64 = self.central_generators.iter().map(|(_, o)| o).product();
        let actual = self.enumerate_central_subgroup().len() as u64;
        if actual != expected {
            return Err(LieGroupError::DescriptorInvalid(format!(
                "central generators not independent: subgroup has {actual} elements, \
                 product of orders is {expected}"
            )));
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn factors(&self) -> &[SimpleType] {
        &self.factors
    }

    pub fn central_generators(&self) -> &[(CentralElement, u64)] {
        &self.central_generators
    }

    pub fn with_field(&self, field: Field) -> Self {
        let mut d = self.clone();
        d.field = field;
        d
    }

    /// All elements of Z, by closing the generators under addition.
    fn enumerate_central_subgroup(&self) -> Vec<CentralElement> {
        let id = CentralElement::identity(self.torus_rank, &self.factors);
        let mut seen: HashSet<CentralElement> = HashSet::new();
        seen.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(e) = frontier.pop() {
            for (gen, _) in &self.central_generators {
                let next = e.add(&gen.normalized(&self.factors), &self.factors);
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// pi1(G) as the cokernel of the relation lattice: generators are the
    /// torus lattice e_1..e_k together with lifts z~_1..z~_m of the Z
    /// generators, one relation n_j z~_j = sum_i (n_j v_j)_i e_i per
    /// generator. The free rank always equals the torus rank.
    pub fn pi1(&self) -> FgAbelianGroup {
        let k = self.torus_rank;
        let m = self.central_generators.len();
        let mut rel = IntMatrix::zeros(m, k + m);
        for (j, (gen, order)) in self.central_generators.iter().enumerate() {
            for (i, v) in gen.torus_part.iter().enumerate() {
                let scaled = v * Ratio::from_integer(*order as i64);
                debug_assert!(scaled.is_integer(), "order must clear torus denominators");
                rel[(j, i)] = (-scaled.to_integer()).into();
            }
            rel[(j, k + j)] = (*order).into();
        }
        let pi1 = cokernel(&rel);
        debug_assert_eq!(pi1.free_rank(), k);
        pi1
    }

    /// pi1(DG): the subgroup of Z with trivial torus part, as an abstract
    /// finite abelian group. Always finite; equals the torsion subgroup of
    /// pi1(G).
    pub fn pi1_derived(&self) -> FgAbelianGroup {
        let elements: Vec<CentralElement> = self
            .enumerate_central_subgroup()
            .into_iter()
            .filter(|e| e.torus_part.iter().all(|r| *r == Ratio::from_integer(0)))
            .collect();
        finite_abelian_structure(&elements, |a, b| a.add(b, &self.factors))
    }

    /// True iff pi1(G) is torsion-free, equivalently DG simply connected.
    pub fn pi1_is_torsion_free(&self) -> bool {
        self.pi1_derived().is_trivial()
    }

    /// True iff DG is a direct product of simply connected factors of type A
    /// or C: every simple factor has family A or C and pi1(DG) is trivial.
    pub fn is_orthogonal_free(&self) -> bool {
        self.factors
            .iter()
            .all(|f| matches!(f.family, Family::A | Family::C))
            && self.pi1_derived().is_trivial()
    }

    /// Universal cover decomposition: (k, simple factors, kernel = pi1(G)).
    pub fn universal_cover(&self) -> (usize, Vec<SimpleType>, FgAbelianGroup) {
        (self.torus_rank, self.factors.clone(), self.pi1())
    }

    /// Product of groups: torus ranks add, factor lists concatenate, central
    /// generators embed coordinatewise.
    pub fn product(&self, other: &Self) -> Result<Self, LieGroupError> {
        if self.field != other.field {
            return Err(LieGroupError::InvalidParameter(
                "cannot form a product of compact and complex descriptors".into(),
            ));
        }
        let torus_rank = self.torus_rank + other.torus_rank;
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        let mut gens = Vec::new();
        for (g, o) in &self.central_generators {
            let mut torus = g.torus_part.clone();
            torus.extend(vec![Ratio::from_integer(0); other.torus_rank]);
            let mut parts = g.factor_parts.clone();
            parts.extend(other.factors.iter().map(|f| vec![0; f.center_orders().len()]));
            gens.push((CentralElement { torus_part: torus, factor_parts: parts }, *o));
        }
        for (g, o) in &other.central_generators {
            let mut torus = vec![Ratio::from_integer(0); self.torus_rank];
            torus.extend(g.torus_part.iter().cloned());
            let mut parts: Vec<Vec<u64>> =
                self.factors.iter().map(|f| vec![0; f.center_orders().len()]).collect();
            parts.extend(g.factor_parts.iter().cloned());
            gens.push((CentralElement { torus_part: torus, factor_parts: parts }, *o));
        }
        ReductiveDescriptor::new(self.field, torus_rank, factors, gens)
    }

    /// Structural match against the U(n) construction (compact or its
    /// complexification GL(n, C)).
    pub fn unitary_rank(&self) -> Option<u32> {
        if self.torus_rank == 1 && self.factors.is_empty() && self.central_generators.is_empty() {
            return Some(1); // U(1)
        }
        if self.torus_rank != 1 || self.factors.len() != 1 {
            return None;
        }
        let f = self.factors[0];
        if f.family != Family::A {
            return None;
        }
        let n = f.rank as u64 + 1;
        let expected = u_n_generator(n);
        match self.central_generators.as_slice() {
            [(gen, order)] if *order == n && *gen == expected => Some(n as u32),
            _ => None,
        }
    }

    /// Structural match against the SU(n) construction (or SL(n, C)).
    pub fn special_unitary_rank(&self) -> Option<u32> {
        if self.torus_rank != 0 || !self.central_generators.is_empty() {
            return None;
        }
        match self.factors.as_slice() {
            [] => Some(1), // trivial group, SU(1)
            [f] if f.family == Family::A => Some(f.rank + 1),
            _ => None,
        }
    }
}

fn u_n_generator(n: u64) -> CentralElement {
    CentralElement {
        torus_part: vec![Ratio::new(1, n as i64)],
        factor_parts: vec![vec![n - 1]],
    }
}

/// Invariant-factor structure of a finite abelian group given by an element
/// list closed under the operation, determined by counting solutions of
/// p^i * x = 0 for each prime.
fn finite_abelian_structure<T: Clone + Eq + std::hash::Hash>(
    elements: &[T],
    add: impl Fn(&T, &T) -> T,
) -> FgAbelianGroup {
    let n = elements.len() as u64;
    if n <= 1 {
        return FgAbelianGroup::trivial();
    }
    let scal = |k: u64, x: &T| {
        // repeated doubling
        let mut acc: Option<T> = None;
        let mut base = x.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match &acc {
                    None => base.clone(),
                    Some(a) => add(a, &base),
                });
            }
            base = add(&base, &base);
            k >>= 1;
        }
        acc.expect("k > 0")
    };
    let identity = {
        // n * x = 0 for any x, so n*x of the first element is the identity
        scal(n, &elements[0])
    };
    let mut torsion: Vec<BigUint> = Vec::new();
    let mut rem = n;
    let mut p = 2u64;
    while rem > 1 {
        if p * p > rem {
            p = rem;
        }
        if rem % p == 0 {
            while rem % p == 0 {
                rem /= p;
            }
            // count_i = #{x : p^i x = 0}; log_p ratios give the number of
            // cyclic p-factors of exponent >= i.
            let mut prev_count = 1u64;
            let mut prev_rank: Option<u32> = None;
            let mut i = 1u32;
            loop {
                let pi = p.pow(i);
                let count = elements.iter().filter(|x| scal(pi, x) == identity).count() as u64;
                let ratio = count / prev_count;
                let rank = ratio_log(ratio, p);
                if let Some(prev) = prev_rank {
                    let finished = prev - rank;
                    for _ in 0..finished {
                        torsion.push(BigUint::from(p.pow(i - 1)));
                    }
                }
                if rank == 0 {
                    break;
                }
                prev_rank = Some(rank);
                prev_count = count;
                i += 1;
            }
        }
        p += 1;
    }
    FgAbelianGroup::new(0, torsion)
}

fn ratio_log(mut ratio: u64, p: u64) -> u32 {
    let mut l = 0;
    while ratio > 1 {
        debug_assert_eq!(ratio % p, 0);
        ratio /= p;
        l += 1;
    }
    l
}

// --- named groups ---------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedGroup {
    U(u32),
    SU(u32),
    PSU(u32),
    PU(u32),
    GL(u32),
    SL(u32),
    PGL(u32),
    SO3,
    Torus(u32),
    Product(Vec<NamedGroup>),
}

impl NamedGroup {
    /// The documented descriptor. This is the only place the
    /// center-embedding data for the classical chains is hard-coded.
    pub fn descriptor(&self) -> Result<ReductiveDescriptor, LieGroupError> {
        match self {
            NamedGroup::Torus(k) => {
                ReductiveDescriptor::new(Field::Compact, *k as usize, vec![], vec![])
            }
            NamedGroup::U(n) => {
                let n = check_positive(*n)?;
                if n == 1 {
                    return NamedGroup::Torus(1).descriptor();
                }
                let a = SimpleType::new(Family::A, n - 1)?;
                ReductiveDescriptor::new(
                    Field::Compact,
                    1,
                    vec![a],
                    vec![(u_n_generator(n as u64), n as u64)],
                )
            }
            NamedGroup::SU(n) => {
                let n = check_positive(*n)?;
                if n == 1 {
                    return ReductiveDescriptor::new(Field::Compact, 0, vec![], vec![]);
                }
                let a = SimpleType::new(Family::A, n - 1)?;
                ReductiveDescriptor::new(Field::Compact, 0, vec![a], vec![])
            }
            NamedGroup::PSU(n) | NamedGroup::PU(n) => {
                let n = check_positive(*n)?;
                if n == 1 {
                    return ReductiveDescriptor::new(Field::Compact, 0, vec![], vec![]);
                }
                let a = SimpleType::new(Family::A, n - 1)?;
                let gen = CentralElement { torus_part: vec![], factor_parts: vec![vec![1]] };
                ReductiveDescriptor::new(Field::Compact, 0, vec![a], vec![(gen, n as u64)])
            }
            NamedGroup::GL(n) => Ok(NamedGroup::U(*n).descriptor()?.with_field(Field::Complex)),
            NamedGroup::SL(n) => Ok(NamedGroup::SU(*n).descriptor()?.with_field(Field::Complex)),
            NamedGroup::PGL(n) => Ok(NamedGroup::PSU(*n).descriptor()?.with_field(Field::Complex)),
            NamedGroup::SO3 => NamedGroup::PSU(2).descriptor(),
            NamedGroup::Product(parts) => {
                let mut iter = parts.iter();
                let first = iter.next().ok_or_else(|| {
                    LieGroupError::InvalidParameter("empty product".into())
                })?;
                let mut acc = first.descriptor()?;
                for p in iter {
                    acc = acc.product(&p.descriptor()?)?;
                }
                Ok(acc)
            }
        }
    }

    /// Parse specs like "U 2", "SO3", "torus 3", "PGL 3", and products
    /// joined with "x": "U 2 x SU 3".
    pub fn parse(spec: &str) -> Result<NamedGroup, LieGroupError> {
        let parts: Vec<&str> = spec.split('x').map(str::trim).collect();
        if parts.len() > 1 {
            let groups = parts
                .iter()
                .map(|p| Self::parse_single(p))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(NamedGroup::Product(groups));
        }
        Self::parse_single(parts[0])
    }

    fn parse_single(spec: &str) -> Result<NamedGroup, LieGroupError> {
        let toks: Vec<&str> = spec.split_whitespace().collect();
        let bad = || LieGroupError::InvalidParameter(format!("unrecognized group spec `{spec}`"));
        match toks.as_slice() {
            ["SO3"] | ["SO", "3"] => Ok(NamedGroup::SO3),
            [name, arg] => {
                let n: u32 = arg.parse().map_err(|_| bad())?;
                match *name {
                    "U" => Ok(NamedGroup::U(n)),
                    "SU" => Ok(NamedGroup::SU(n)),
                    "PSU" => Ok(NamedGroup::PSU(n)),
                    "PU" => Ok(NamedGroup::PU(n)),
                    "GL" => Ok(NamedGroup::GL(n)),
                    "SL" => Ok(NamedGroup::SL(n)),
                    "PGL" => Ok(NamedGroup::PGL(n)),
                    "torus" => Ok(NamedGroup::Torus(n)),
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }
}

fn check_positive(n: u32) -> Result<u32, LieGroupError> {
    if n == 0 {
        Err(LieGroupError::InvalidParameter("n must be >= 1".into()))
    } else {
        Ok(n)
    }
}

// --- descriptor text format ----------------------------------------------

impl fmt::Display for ReductiveDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {}", self.field)?;
        writeln!(f, "torus_rank {}", self.torus_rank)?;
        for fac in &self.factors {
            writeln!(f, "factor {fac}")?;
        }
        for (gen, order) in &self.central_generators {
            write!(f, "central order {order} torus")?;
            for r in &gen.torus_part {
                write!(f, " {}/{}", r.numer(), r.denom())?;
            }
            write!(f, " factors")?;
            for part in &gen.factor_parts {
                let s: Vec<String> = part.iter().map(|r| r.to_string()).collect();
                write!(f, " {}", s.join(","))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Parse the descriptor text format: `field`, `torus_rank`, repeated
/// `factor`, and `central order <n> torus <q>... factors <r[,r]>...` lines.
pub fn parse_descriptor(text: &str) -> Result<ReductiveDescriptor, LieGroupError> {
    let mut field = None;
    let mut torus_rank = None;
    let mut factors: Vec<SimpleType> = Vec::new();
    let mut gens: Vec<(CentralElement, u64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| LieGroupError::Parse(format!("line {}: {msg}", lineno + 1));
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "field" => {
                field = Some(match toks.get(1) {
                    Some(&"compact") => Field::Compact,
                    Some(&"complex") => Field::Complex,
                    other => return Err(err(format!("bad field {other:?}"))),
                });
            }
            "torus_rank" => {
                let k = toks
                    .get(1)
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| err("bad torus_rank".into()))?;
                torus_rank = Some(k);
            }
            "factor" => {
                let fam = match toks.get(1) {
                    Some(&"A") => Family::A,
                    Some(&"B") => Family::B,
                    Some(&"C") => Family::C,
                    Some(&"D") => Family::D,
                    Some(&"E6") => Family::E6,
                    Some(&"E7") => Family::E7,
                    Some(&"E8") => Family::E8,
                    Some(&"F4") => Family::F4,
                    Some(&"G2") => Family::G2,
                    other => return Err(err(format!("bad family {other:?}"))),
                };
                let rank = match fam {
                    Family::E6 => 6,
                    Family::E7 => 7,
                    Family::E8 => 8,
                    Family::F4 => 4,
                    Family::G2 => 2,
                    _ => toks
                        .get(2)
                        .and_then(|s| s.parse::<u32>().ok())
                        .ok_or_else(|| err("missing factor rank".into()))?,
                };
                factors.push(SimpleType::new(fam, rank).map_err(|e| err(e.to_string()))?);
            }
            "central" => {
                let k = torus_rank.ok_or_else(|| err("torus_rank must precede central".into()))?;
                if toks.get(1) != Some(&"order") {
                    return Err(err("expected `central order <n> ...`".into()));
                }
                let order: u64 = toks
                    .get(2)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad order".into()))?;
                let torus_kw = toks
                    .iter()
                    .position(|&t| t == "torus")
                    .ok_or_else(|| err("missing `torus` section".into()))?;
                let factors_kw = toks
                    .iter()
                    .position(|&t| t == "factors")
                    .ok_or_else(|| err("missing `factors` section".into()))?;
                let torus_part: Vec<Rational> = toks[torus_kw + 1..factors_kw]
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<_, _>>()
                    .map_err(|e| err(e))?;
                if torus_part.len() != k {
                    return Err(err(format!(
                        "expected {k} torus coordinates, got {}",
                        torus_part.len()
                    )));
                }
                let factor_parts: Vec<Vec<u64>> = toks[factors_kw + 1..]
                    .iter()
                    .map(|s| {
                        s.split(',')
                            .map(|r| r.parse::<u64>().map_err(|_| format!("bad residue `{r}`")))
                            .collect()
                    })
                    .collect::<Result<_, _>>()
                    .map_err(|e| err(e))?;
                if factor_parts.len() != factors.len() {
                    return Err(err(format!(
                        "expected {} factor parts, got {}",
                        factors.len(),
                        factor_parts.len()
                    )));
                }
                gens.push((CentralElement { torus_part, factor_parts }, order));
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }

    ReductiveDescriptor::new(
        field.ok_or_else(|| LieGroupError::Parse("missing `field` line".into()))?,
        torus_rank.ok_or_else(|| LieGroupError::Parse("missing `torus_rank` line".into()))?,
        factors,
        gens,
    )
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let parts: Vec<&str> = s.split('/').collect();
    match parts.as_slice() {
        [a] => a.parse::<i64>().map(Ratio::from_integer).map_err(|_| format!("bad rational `{s}`")),
        [a, b] => {
            let num = a.parse::<i64>().map_err(|_| format!("bad rational `{s}`"))?;
            let den = b.parse::<i64>().map_err(|_| format!("bad rational `{s}`"))?;
            if den == 0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(Ratio::new(num, den))
        }
        _ => Err(format!("bad rational `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi1_su_trivial() {
        for n in 2..=6 {
            let g = NamedGroup::SU(n).descriptor().unwrap();
            assert!(g.pi1().is_trivial(), "pi1(SU({n})) should be trivial");
        }
    }

    #[test]
    fn pi1_psu_cyclic() {
        for n in 2..=6u32 {
            let g = NamedGroup::PSU(n).descriptor().unwrap();
            assert_eq!(g.pi1(), FgAbelianGroup::cyclic(n as u64));
        }
    }

    #[test]
    fn pi1_u_n_is_z() {
        for n in 1..=6 {
            let g = NamedGroup::U(n).descriptor().unwrap();
            assert_eq!(g.pi1(), FgAbelianGroup::free(1), "pi1(U({n}))");
        }
    }

    #[test]
    fn pi1_derived_examples() {
        for n in 1..=5 {
            assert!(NamedGroup::U(n).descriptor().unwrap().pi1_derived().is_trivial());
        }
        for n in 2..=5u32 {
            assert_eq!(
                NamedGroup::PU(n).descriptor().unwrap().pi1_derived(),
                FgAbelianGroup::cyclic(n as u64)
            );
            assert_eq!(
                NamedGroup::PGL(n).descriptor().unwrap().pi1_derived(),
                FgAbelianGroup::cyclic(n as u64)
            );
        }
        assert!(NamedGroup::Torus(3).descriptor().unwrap().pi1_derived().is_trivial());
    }

    #[test]
    fn torsion_free_examples() {
        assert!(NamedGroup::U(3).descriptor().unwrap().pi1_is_torsion_free());
        assert!(!NamedGroup::PSU(2).descriptor().unwrap().pi1_is_torsion_free());
        let su2_t2 = NamedGroup::Product(vec![NamedGroup::SU(2), NamedGroup::Torus(2)])
            .descriptor()
            .unwrap();
        assert!(su2_t2.pi1_is_torsion_free());
        assert_eq!(su2_t2.pi1(), FgAbelianGroup::free(2));
    }

    #[test]
    fn orthogonal_free_examples() {
        let g = ReductiveDescriptor::new(
            Field::Compact,
            0,
            vec![
                SimpleType::new(Family::A, 2).unwrap(),
                SimpleType::new(Family::C, 3).unwrap(),
            ],
            vec![],
        )
        .unwrap();
        assert!(g.is_orthogonal_free());
        let b3 = ReductiveDescriptor::new(
            Field::Compact,
            0,
            vec![SimpleType::new(Family::B, 3).unwrap()],
            vec![],
        )
        .unwrap();
        assert!(!b3.is_orthogonal_free());
        assert!(NamedGroup::Torus(2).descriptor().unwrap().is_orthogonal_free());
    }

    #[test]
    fn universal_cover_u_n() {
        let g = NamedGroup::U(4).descriptor().unwrap();
        let (k, factors, kernel) = g.universal_cover();
        assert_eq!(k, 1);
        assert_eq!(factors, vec![SimpleType::new(Family::A, 3).unwrap()]);
        assert_eq!(kernel, FgAbelianGroup::free(1));
        // complexification shares all pi1 data
        let gl = NamedGroup::GL(4).descriptor().unwrap();
        assert_eq!(gl.universal_cover().2, FgAbelianGroup::free(1));
    }

    #[test]
    fn so3_is_psu2() {
        assert_eq!(
            NamedGroup::SO3.descriptor().unwrap(),
            NamedGroup::PSU(2).descriptor().unwrap()
        );
    }

    #[test]
    fn descriptor_order_mismatch_rejected() {
        let gen = CentralElement { torus_part: vec![], factor_parts: vec![vec![1]] };
        let err = ReductiveDescriptor::new(
            Field::Compact,
            0,
            vec![SimpleType::new(Family::A, 1).unwrap()],
            vec![(gen, 3)],
        )
        .unwrap_err();
        assert!(matches!(err, LieGroupError::DescriptorInvalid(_)));
    }

    #[test]
    fn descriptor_dependence_rejected() {
        // Two copies of the same Z/2 generator are not independent.
        let gen = CentralElement { torus_part: vec![], factor_parts: vec![vec![2]] };
        let err = ReductiveDescriptor::new(
            Field::Compact,
            0,
            vec![SimpleType::new(Family::A, 3).unwrap()],
            vec![(gen.clone(), 2), (gen, 2)],
        )
        .unwrap_err();
        assert!(matches!(err, LieGroupError::DescriptorInvalid(_)));
    }

    #[test]
    fn product_pi1_is_direct_sum() {
        let a = NamedGroup::U(2).descriptor().unwrap();
        let b = NamedGroup::PSU(3).descriptor().unwrap();
        let p = a.product(&b).unwrap();
        assert_eq!(p.pi1(), a.pi1().direct_sum(&b.pi1()));
        assert_eq!(p.pi1_derived(), FgAbelianGroup::cyclic(3));
    }

    #[test]
    fn recognizers() {
        for n in 1..=4 {
            assert_eq!(NamedGroup::U(n).descriptor().unwrap().unitary_rank(), Some(n));
            assert_eq!(
                NamedGroup::SU(n).descriptor().unwrap().special_unitary_rank(),
                Some(n)
            );
        }
        assert_eq!(NamedGroup::PSU(2).descriptor().unwrap().unitary_rank(), None);
        assert_eq!(NamedGroup::U(2).descriptor().unwrap().special_unitary_rank(), None);
    }

    #[test]
    fn descriptor_round_trip() {
        for g in [
            NamedGroup::U(3),
            NamedGroup::PSU(4),
            NamedGroup::Product(vec![NamedGroup::U(2), NamedGroup::SU(3)]),
            NamedGroup::Torus(2),
        ] {
            let d = g.descriptor().unwrap();
            let text = d.to_string();
            assert_eq!(parse_descriptor(&text).unwrap(), d, "round trip failed for:\n{text}");
        }
    }

    #[test]
    fn named_group_parsing() {
        assert_eq!(NamedGroup::parse("U 2").unwrap(), NamedGroup::U(2));
        assert_eq!(NamedGroup::parse("SO3").unwrap(), NamedGroup::SO3);
        assert_eq!(
            NamedGroup::parse("U 2 x SU 3").unwrap(),
            NamedGroup::Product(vec![NamedGroup::U(2), NamedGroup::SU(3)])
        );
        assert!(NamedGroup::parse("E8").is_err());
        assert!(NamedGroup::parse("U 0").unwrap().descriptor().is_err());
    }
}
