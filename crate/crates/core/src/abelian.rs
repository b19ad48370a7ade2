//! Abelian groups the algebraic objects live on.
//!
//! A [`ModuleDesc`] is a formal direct sum of rational lines, free integer
//! lines and cyclic groups. A [`Carrier`] is what an object actually uses:
//! either a finite-dimensional vector space over a field or a formal sum over
//! Z. Submodules of either kind are handled uniformly through [`Submodule`];
//! the Z case goes through [`Presentation`] (lattices in Hermite form and Smith
//! normal form).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::snf::{self, IntMatrix};
use crate::kernel::{vec_ops, Domain, Matrix, Scalar, Subspace, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Summand {
    RationalLine,
    FreeIntLine,
    Cyclic(u64),
}

impl Summand {
    /// Domain of this summand's coordinate.
    pub fn coordinate_domain(&self) -> Domain {
        match self {
            Summand::RationalLine => Domain::Rationals,
            Summand::FreeIntLine => Domain::Integers,
            Summand::Cyclic(m) => Domain::Residues(*m),
        }
    }

    /// Order of the generator as a Z-module relation (0 for lines).
    pub fn relation(&self) -> u64 {
        match self {
            Summand::Cyclic(m) => *m,
            _ => 0,
        }
    }

    pub fn parse(text: &str) -> Result<Summand> {
        let t = text.trim();
        match t {
            "Q" => Ok(Summand::RationalLine),
            "Z" => Ok(Summand::FreeIntLine),
            _ => {
                let m = t
                    .strip_prefix("Z/")
                    .and_then(|m| m.trim().parse::<u64>().ok())
                    .ok_or_else(|| Error::Validation(format!("unknown summand {t:?}; expected Q, Z or Z/m")))?;
                if !(2..crate::kernel::domain::MODULUS_LIMIT).contains(&m) {
                    return Err(Error::Validation(format!("cyclic summand Z/{m} needs 2 ≤ m < 2^32")));
                }
                Ok(Summand::Cyclic(m))
            }
        }
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::RationalLine => write!(f, "Q"),
            Summand::FreeIntLine => write!(f, "Z"),
            Summand::Cyclic(m) => write!(f, "Z/{m}"),
        }
    }
}

/// A formal finite direct sum of primitive summands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ModuleDesc {
    summands: Vec<Summand>,
}

impl ModuleDesc {
    pub fn new(summands: Vec<Summand>) -> ModuleDesc {
        ModuleDesc { summands }
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    fn indices(&self, pred: impl Fn(&Summand) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&i| pred(&self.summands[i])).collect()
    }

    pub fn divisible_part(&self) -> Vec<usize> {
        self.indices(|s| *s == Summand::RationalLine)
    }

    pub fn bounded_part(&self) -> Vec<usize> {
        self.indices(|s| matches!(s, Summand::Cyclic(_)))
    }

    pub fn free_part(&self) -> Vec<usize> {
        self.indices(|s| *s == Summand::FreeIntLine)
    }

    pub fn is_divisible(&self) -> bool {
        self.summands.iter().all(|s| *s == Summand::RationalLine)
    }

    pub fn is_bounded(&self) -> bool {
        self.exponent().is_some()
    }

    /// Least common multiple of the cyclic orders when every summand is cyclic.
    pub fn exponent(&self) -> Option<BigInt> {
        self.summands.iter().try_fold(BigInt::one(), |acc, s| match s {
            Summand::Cyclic(m) => Some(acc.lcm(&BigInt::from(*m))),
            _ => None,
        })
    }

    pub fn torsion_part(&self) -> ModuleDesc {
        self.select(&self.bounded_part())
    }

    pub fn select(&self, idx: &[usize]) -> ModuleDesc {
        ModuleDesc::new(idx.iter().map(|&i| self.summands[i]).collect())
    }

    pub fn direct_sum(&self, other: &ModuleDesc) -> ModuleDesc {
        let mut s = self.summands.clone();
        s.extend(other.summands.iter().copied());
        ModuleDesc::new(s)
    }

    /// Checks that a coordinate vector is a valid element, reducing cyclic coordinates.
    pub fn element(&self, coords: Vec<Scalar>) -> Result<Vector> {
        if coords.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "element has {} coordinates, module has {}",
                coords.len(),
                self.len()
            )));
        }
        coords
            .into_iter()
            .zip(&self.summands)
            .map(|(c, s)| match (s, c) {
                (Summand::RationalLine, c @ Scalar::Rat(_)) => Ok(c),
                (Summand::RationalLine, Scalar::Int(n)) => Ok(Domain::Rationals.from_bigint(&n)),
                (Summand::FreeIntLine, c @ Scalar::Int(_)) => Ok(c),
                (Summand::FreeIntLine, Scalar::Rat(q)) if q.is_integer() => Ok(Scalar::Int(q.to_integer())),
                (Summand::Cyclic(m), Scalar::Mod(v)) => Ok(Scalar::Mod(v % m)),
                (Summand::Cyclic(m), Scalar::Int(n)) => Ok(Domain::Residues(*m).from_bigint(&n)),
                (s, c) => Err(Error::ElementNotInModule(format!("coordinate {c:?} does not belong to summand {s}"))),
            })
            .collect()
    }
}

impl fmt::Display for ModuleDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.summands.len() {
            let s = self.summands[i];
            let mut j = i;
            while j < self.summands.len() && self.summands[j] == s {
                j += 1;
            }
            parts.push(if j - i > 1 { format!("{s}^{}", j - i) } else { s.to_string() });
            i = j;
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// `M = M_D ⊕ M_B` with the summand indices of each part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibleBoundedSplit {
    pub divisible: ModuleDesc,
    pub bounded: ModuleDesc,
    pub divisible_indices: Vec<usize>,
    pub bounded_indices: Vec<usize>,
}

impl DivisibleBoundedSplit {
    pub fn project_divisible(&self, v: &[Scalar]) -> Vector {
        self.divisible_indices.iter().map(|&i| v[i].clone()).collect()
    }

    pub fn project_bounded(&self, v: &[Scalar]) -> Vector {
        self.bounded_indices.iter().map(|&i| v[i].clone()).collect()
    }

    /// Inverse of the two projections.
    pub fn reassemble(&self, divisible: &[Scalar], bounded: &[Scalar]) -> Vector {
        let n = self.divisible_indices.len() + self.bounded_indices.len();
        let mut out: Vec<Option<Scalar>> = vec![None; n];
        for (k, &i) in self.divisible_indices.iter().enumerate() {
            out[i] = Some(divisible[k].clone());
        }
        for (k, &i) in self.bounded_indices.iter().enumerate() {
            out[i] = Some(bounded[k].clone());
        }
        out.into_iter().map(|x| x.expect("indices partition the summands")).collect()
    }
}

pub fn divisible_bounded_split(m: &ModuleDesc) -> Result<DivisibleBoundedSplit> {
    if let Some(i) = m.free_part().first() {
        return Err(Error::NotOmegaStableShape(format!(
            "summand {i} of {m} is a free Z line, which is neither divisible nor bounded"
        )));
    }
    let d = m.divisible_part();
    let b = m.bounded_part();
    Ok(DivisibleBoundedSplit {
        divisible: m.select(&d),
        bounded: m.select(&b),
        divisible_indices: d,
        bounded_indices: b,
    })
}

// ---------------------------------------------------------------------------
// finitely generated Z-modules

/// A finitely generated Z-module `Z^n / Λ`, with `Λ` stored in Hermite form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    rank: usize,
    relations: IntMatrix,
}

impl Presentation {
    pub fn new(rank: usize, relations: &[Vec<BigInt>]) -> Presentation {
        Presentation { rank, relations: snf::hnf(relations, rank) }
    }

    /// The presentation of a formal sum without rational lines.
    pub fn of_desc(desc: &ModuleDesc) -> Result<Presentation> {
        if let Some(i) = desc.divisible_part().first() {
            return Err(Error::UnsupportedDomain {
                op: "finitely generated Z-module",
                domain: format!("{desc} (rational line at summand {i})"),
            });
        }
        let n = desc.len();
        let rels: Vec<Vec<BigInt>> = desc
            .summands()
            .iter()
            .enumerate()
            .filter(|(_, s)| s.relation() != 0)
            .map(|(i, s)| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = BigInt::from(s.relation());
                r
            })
            .collect();
        Ok(Presentation::new(n, &rels))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Hermite basis of `span(gens) + Λ`.
    pub fn lattice(&self, gens: &[Vec<BigInt>]) -> IntMatrix {
        let mut all = gens.to_vec();
        all.extend(self.relations.iter().cloned());
        snf::hnf(&all, self.rank)
    }

    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        snf::in_lattice(&self.relations, v)
    }

    /// Canonical representative of `v` modulo `Λ`.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut r = v.to_vec();
        for row in &self.relations {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero Hermite row");
            let q = r[p].div_floor(&row[p]);
            if !q.is_zero() {
                for (x, y) in r.iter_mut().zip(row) {
                    *x -= &q * y;
                }
            }
        }
        r
    }

    /// Torsion invariants (> 1, dividing chain) and free rank.
    pub fn invariants(&self) -> (Vec<BigInt>, usize) {
        if self.relations.is_empty() {
            return (Vec::new(), self.rank);
        }
        let s = snf::smith(&self.relations, self.relations.len(), self.rank);
        let torsion: Vec<BigInt> = s.diag.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
        (torsion, self.rank - s.rank)
    }

    /// The quotient by the submodule generated by `gens`.
    pub fn quotient(&self, gens: &[Vec<BigInt>]) -> Presentation {
        Presentation { rank: self.rank, relations: self.lattice(gens) }
    }

    /// The submodule generated by `gens`, presented on those generators.
    pub fn restrict(&self, gens: &[Vec<BigInt>]) -> Presentation {
        let k = gens.len();
        if k == 0 {
            return Presentation::new(0, &[]);
        }
        let kernel = self.combination_kernel(gens);
        Presentation::new(k, &kernel)
    }

    /// `{a ∈ Z^k : Σ aᵢ gensᵢ ∈ Λ}`.
    fn combination_kernel(&self, gens: &[Vec<BigInt>]) -> IntMatrix {
        let k = gens.len();
        let r = self.relations.len();
        let mut a: IntMatrix = vec![vec![BigInt::zero(); k + r]; self.rank];
        for j in 0..self.rank {
            for (i, g) in gens.iter().enumerate() {
                a[j][i] = g[j].clone();
            }
            for (l, rel) in self.relations.iter().enumerate() {
                a[j][k + l] = -rel[j].clone();
            }
        }
        let ker = snf::int_kernel(&a, self.rank, k + r);
        let proj: Vec<Vec<BigInt>> = ker.into_iter().map(|row| row[..k].to_vec()).collect();
        snf::hnf(&proj, k)
    }

    /// Some `a` with `Σ aᵢ gensᵢ ≡ v (mod Λ)`.
    pub fn express(&self, gens: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
        let k = gens.len();
        let r = self.relations.len();
        let mut a: IntMatrix = vec![vec![BigInt::zero(); k + r]; self.rank];
        for j in 0..self.rank {
            for (i, g) in gens.iter().enumerate() {
                a[j][i] = g[j].clone();
            }
            for (l, rel) in self.relations.iter().enumerate() {
                a[j][k + l] = rel[j].clone();
            }
        }
        snf::int_solve(&a, self.rank, k + r, v).map(|x| x[..k].to_vec())
    }

    /// A complement of the submodule generated by `gens`, if one exists.
    ///
    /// With `U·L·V = D` for the Hermite basis `L` of `span(gens) + Λ`, the rows
    /// `e'ᵢ` of `V⁻¹` generate the quotient with orders `dᵢ`. A complement
    /// exists iff every `e'ᵢ` has a lift `e'ᵢ − s` (s in the submodule) killed
    /// by `dᵢ`, which is one integer linear system per torsion generator.
    pub fn split_complement(&self, gens: &[Vec<BigInt>]) -> Option<IntMatrix> {
        let n = self.rank;
        let lat = self.lattice(gens);
        let s = snf::smith(&lat, lat.len(), n);
        let mut out = Vec::new();
        for i in 0..n {
            let d = s.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_one() {
                continue;
            }
            let e = s.v_inv[i].clone();
            if d.is_zero() {
                out.push(self.reduce(&e));
                continue;
            }
            // d·a·L + b·Λ = d·e
            let k = lat.len();
            let r = self.relations.len();
            let mut a: IntMatrix = vec![vec![BigInt::zero(); k + r]; n];
            for j in 0..n {
                for (l, row) in lat.iter().enumerate() {
                    a[j][l] = &d * &row[j];
                }
                for (l, rel) in self.relations.iter().enumerate() {
                    a[j][k + l] = rel[j].clone();
                }
            }
            let rhs: Vec<BigInt> = e.iter().map(|x| &d * x).collect();
            let sol = snf::int_solve(&a, n, k + r, &rhs)?;
            let shift = snf::int_row_apply(&sol[..k], &lat, n);
            let c: Vec<BigInt> = e.iter().zip(&shift).map(|(x, y)| x - y).collect();
            out.push(self.reduce(&c));
        }
        Some(out)
    }
}

/// Complement of `⟨generators⟩` in a finitely generated ambient module, or `None` if no
/// direct complement exists.
pub fn split_complement(generators: &[Vector], ambient: &ModuleDesc) -> Result<Option<Vec<Vector>>> {
    let carrier = Carrier::Abelian(ambient.clone());
    let p = Presentation::of_desc(ambient)?;
    let lifted: Vec<Vec<BigInt>> =
        generators.iter().map(|g| ambient.element(g.clone()).map(|g| carrier.lift(&g))).collect::<Result<_>>()?;
    Ok(p.split_complement(&lifted).map(|c| c.iter().map(|v| carrier.unlift(v)).collect()))
}

// ---------------------------------------------------------------------------
// carriers and submodules

/// The additive group an object lives on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Carrier {
    /// `K^dim` over a field.
    Vector { field: Domain, dim: usize },
    /// A formal direct sum over Z.
    Abelian(ModuleDesc),
}

impl Carrier {
    pub fn vector(field: Domain, dim: usize) -> Carrier {
        Carrier::Vector { field, dim }
    }

    /// Builds the carrier for an object over `domain`; summands are only meaningful over Z.
    pub fn over(domain: &Domain, dim: usize, summands: Option<Vec<Summand>>) -> Result<Carrier> {
        match domain {
            d if d.is_field() => {
                if let Some(s) = &summands {
                    let expected = match d {
                        Domain::Rationals => Some(Summand::RationalLine),
                        Domain::PrimeField(p) => Some(Summand::Cyclic(*p)),
                        _ => None,
                    };
                    if s.len() != dim || s.iter().any(|x| Some(*x) != expected) {
                        return Err(Error::Validation(format!(
                            "summands {s:?} do not describe a vector space over {d}"
                        )));
                    }
                }
                Ok(Carrier::vector(d.clone(), dim))
            }
            Domain::Integers => {
                let s = summands.unwrap_or_else(|| vec![Summand::FreeIntLine; dim]);
                if s.len() != dim {
                    return Err(Error::DimensionMismatch(format!("{} summands for {dim} basis elements", s.len())));
                }
                if s.iter().all(|x| *x == Summand::RationalLine) {
                    return Ok(Carrier::vector(Domain::Rationals, dim));
                }
                Ok(Carrier::Abelian(ModuleDesc::new(s)))
            }
            Domain::Residues(m) => {
                if summands.as_ref().is_some_and(|s| s.iter().any(|x| *x != Summand::Cyclic(*m))) {
                    return Err(Error::Validation(format!("summands over Z/{m} must all be Z/{m}")));
                }
                Ok(Carrier::Abelian(ModuleDesc::new(vec![Summand::Cyclic(*m); dim])))
            }
            _ => unreachable!("domains are fields, Z or Z/m"),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Carrier::Vector { dim, .. } => *dim,
            Carrier::Abelian(d) => d.len(),
        }
    }

    /// The coefficient domain of the whole object (the field, or Z).
    pub fn domain(&self) -> Domain {
        match self {
            Carrier::Vector { field, .. } => field.clone(),
            Carrier::Abelian(_) => Domain::Integers,
        }
    }

    pub fn field(&self) -> Option<&Domain> {
        match self {
            Carrier::Vector { field, .. } => Some(field),
            Carrier::Abelian(_) => None,
        }
    }

    pub fn require_field(&self, op: &'static str) -> Result<&Domain> {
        self.field().ok_or_else(|| Error::NonFieldDomain(format!("{op} needs a field carrier, got {self}")))
    }

    /// The summand description (vector spaces over Q or GF(p) become lines).
    pub fn desc(&self) -> ModuleDesc {
        match self {
            Carrier::Abelian(d) => d.clone(),
            Carrier::Vector { field, dim } => {
                let s = match field {
                    Domain::PrimeField(p) => Summand::Cyclic(*p),
                    _ => Summand::RationalLine,
                };
                ModuleDesc::new(vec![s; *dim])
            }
        }
    }

    /// Validates an element, normalizing integer literals into the right coordinate type.
    pub fn check(&self, v: Vec<Scalar>) -> Result<Vector> {
        match self {
            Carrier::Abelian(d) => d.element(v),
            Carrier::Vector { field, dim } => {
                if v.len() != *dim {
                    return Err(Error::DimensionMismatch(format!(
                        "element has {} coordinates, expected {dim}",
                        v.len()
                    )));
                }
                for x in &v {
                    let ok = match (field, x) {
                        (Domain::Rationals, Scalar::Rat(_)) => true,
                        (Domain::PrimeField(p), Scalar::Mod(m)) => m < p,
                        (Domain::Extension(e), Scalar::Ext(c)) => c.len() == e.degree(),
                        _ => false,
                    };
                    if !ok {
                        return Err(Error::ElementNotInModule(format!("{x:?} is not an element of {field}")));
                    }
                }
                Ok(v)
            }
        }
    }

    pub fn coordinate_domain(&self, i: usize) -> Domain {
        match self {
            Carrier::Vector { field, .. } => field.clone(),
            Carrier::Abelian(d) => d.summands()[i].coordinate_domain(),
        }
    }

    pub fn zero(&self) -> Vector {
        (0..self.dim()).map(|i| self.coordinate_domain(i).zero()).collect()
    }

    pub fn unit(&self, i: usize) -> Vector {
        let mut v = self.zero();
        v[i] = self.coordinate_domain(i).one();
        v
    }

    pub fn add(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        (0..self.dim()).map(|i| self.coordinate_domain(i).add(&a[i], &b[i])).collect()
    }

    pub fn sub(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        (0..self.dim()).map(|i| self.coordinate_domain(i).sub(&a[i], &b[i])).collect()
    }

    pub fn neg(&self, a: &[Scalar]) -> Vector {
        (0..self.dim()).map(|i| self.coordinate_domain(i).neg(&a[i])).collect()
    }

    /// `c · a` for a scalar of the object's domain (Z acts on every summand).
    pub fn scale(&self, c: &Scalar, a: &[Scalar]) -> Vector {
        match self {
            Carrier::Vector { field, .. } => vec_ops::scale(field, c, a),
            Carrier::Abelian(_) => {
                let n = match c {
                    Scalar::Int(n) => n.clone(),
                    other => panic!("Z-module scaled by {other:?}"),
                };
                (0..self.dim())
                    .map(|i| {
                        let d = self.coordinate_domain(i);
                        d.mul(&d.from_bigint(&n), &a[i])
                    })
                    .collect()
            }
        }
    }

    pub fn is_zero(&self, a: &[Scalar]) -> bool {
        (0..self.dim()).all(|i| self.coordinate_domain(i).is_zero(&a[i]))
    }

    pub fn format(&self, a: &[Scalar]) -> Vec<String> {
        (0..self.dim()).map(|i| self.coordinate_domain(i).format(&a[i])).collect()
    }

    /// Integer lift of an element of a finitely generated Z-carrier.
    pub fn lift(&self, v: &[Scalar]) -> Vec<BigInt> {
        v.iter()
            .map(|x| match x {
                Scalar::Int(n) => n.clone(),
                Scalar::Mod(m) => BigInt::from(*m),
                other => panic!("no integer lift for {other:?}"),
            })
            .collect()
    }

    /// Image of an integer vector in a Z-carrier.
    pub fn unlift(&self, v: &[BigInt]) -> Vector {
        (0..self.dim()).map(|i| self.coordinate_domain(i).from_bigint(&v[i])).collect()
    }

    /// Presentation of a Z-carrier (errors for vector spaces and rational lines).
    pub fn presentation(&self) -> Result<Presentation> {
        match self {
            Carrier::Abelian(d) => Presentation::of_desc(d),
            Carrier::Vector { field, .. } => {
                Err(Error::UnsupportedDomain { op: "Z-presentation", domain: field.to_string() })
            }
        }
    }

    pub fn span(&self, gens: &[Vector]) -> Result<Submodule> {
        match self {
            Carrier::Vector { field, dim } => Ok(Submodule::Field(Subspace::span(field.clone(), *dim, gens)?)),
            Carrier::Abelian(d) => {
                let p = Presentation::of_desc(d)?;
                let lifted: Vec<Vec<BigInt>> = gens.iter().map(|g| self.lift(g)).collect();
                Ok(Submodule::Lattice { carrier: d.clone(), lattice: p.lattice(&lifted) })
            }
        }
    }

    pub fn whole(&self) -> Result<Submodule> {
        let gens: Vec<Vector> = (0..self.dim()).map(|i| self.unit(i)).collect();
        self.span(&gens)
    }

    pub fn zero_submodule(&self) -> Result<Submodule> {
        self.span(&[])
    }

    /// Kernel of the homomorphism sending basis element `i` to `images[i] ∈ target`.
    pub fn kernel(&self, images: &[Vector], target: &Carrier) -> Result<Submodule> {
        if images.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for a carrier of dimension {}",
                images.len(),
                self.dim()
            )));
        }
        match (self, target) {
            (Carrier::Vector { field, dim }, Carrier::Vector { field: tf, dim: td }) => {
                if field != tf {
                    return Err(Error::DimensionMismatch(format!("map between vector spaces over {field} and {tf}")));
                }
                let m = Matrix::from_columns(field.clone(), *td, images);
                let ker = if *td == 0 { (0..*dim).map(|i| self.unit(i)).collect() } else { m.kernel()? };
                Ok(Submodule::Field(Subspace::span(field.clone(), *dim, &ker)?))
            }
            (Carrier::Abelian(src), Carrier::Abelian(_)) => {
                let p = Presentation::of_desc(src)?;
                let q = target.presentation()?;
                let lifted: Vec<Vec<BigInt>> = images.iter().map(|g| target.lift(g)).collect();
                let ker = q.combination_kernel(&lifted);
                Ok(Submodule::Lattice { carrier: src.clone(), lattice: p.lattice(&ker) })
            }
            _ => Err(Error::UnsupportedDomain { op: "kernel", domain: format!("{self} → {target}") }),
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Vector { field, dim } => write!(f, "{field}^{dim}"),
            Carrier::Abelian(d) => write!(f, "{d}"),
        }
    }
}

/// A submodule of a carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Submodule {
    Field(Subspace),
    /// Hermite basis of the preimage lattice in `Z^n` (relations included).
    Lattice {
        carrier: ModuleDesc,
        lattice: IntMatrix,
    },
}

impl Submodule {
    pub fn carrier(&self) -> Carrier {
        match self {
            Submodule::Field(s) => Carrier::vector(s.domain().clone(), s.ambient()),
            Submodule::Lattice { carrier, .. } => Carrier::Abelian(carrier.clone()),
        }
    }

    fn presentation(&self) -> Presentation {
        match self {
            Submodule::Lattice { carrier, .. } => {
                Presentation::of_desc(carrier).expect("lattice submodules have Z carriers")
            }
            Submodule::Field(_) => unreachable!("field submodule"),
        }
    }

    /// Canonical generators: the echelon basis, or the nonzero Hermite rows.
    pub fn generators(&self) -> Vec<Vector> {
        match self {
            Submodule::Field(s) => s.basis().to_vec(),
            Submodule::Lattice { lattice, .. } => {
                let c = self.carrier();
                let p = self.presentation();
                lattice.iter().filter(|row| !p.is_zero_element(row)).map(|row| c.unlift(&p.reduce(row))).collect()
            }
        }
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        match self {
            Submodule::Field(s) => s.contains(v),
            Submodule::Lattice { lattice, .. } => snf::in_lattice(lattice, &self.carrier().lift(v)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.generators().is_empty()
    }

    pub fn contains_submodule(&self, other: &Submodule) -> bool {
        other.generators().iter().all(|g| self.contains(g))
    }

    pub fn sum(&self, other: &Submodule) -> Result<Submodule> {
        let mut gens = self.generators();
        gens.extend(other.generators());
        self.carrier().span(&gens)
    }

    pub fn intersection(&self, other: &Submodule) -> Result<Submodule> {
        match (self, other) {
            (Submodule::Field(a), Submodule::Field(b)) => Ok(Submodule::Field(a.intersection(b)?)),
            (Submodule::Lattice { carrier, lattice: a }, Submodule::Lattice { lattice: b, .. }) => {
                let n = carrier.len();
                let (ka, kb) = (a.len(), b.len());
                let mut m: IntMatrix = vec![vec![BigInt::zero(); ka + kb]; n];
                for j in 0..n {
                    for (i, row) in a.iter().enumerate() {
                        m[j][i] = row[j].clone();
                    }
                    for (i, row) in b.iter().enumerate() {
                        m[j][ka + i] = -row[j].clone();
                    }
                }
                let ker = snf::int_kernel(&m, n, ka + kb);
                let gens: Vec<Vec<BigInt>> = ker.iter().map(|x| snf::int_row_apply(&x[..ka], a, n)).collect();
                let p = Presentation::of_desc(carrier)?;
                Ok(Submodule::Lattice { carrier: carrier.clone(), lattice: p.lattice(&gens) })
            }
            _ => Err(Error::AlgebraMismatch),
        }
    }

    /// Dimension over the field, or the number of canonical generators over Z.
    pub fn dim(&self) -> usize {
        match self {
            Submodule::Field(s) => s.dim(),
            Submodule::Lattice { .. } => self.generators().len(),
        }
    }

    /// Abstract structure of a Z-submodule: torsion invariants and free rank.
    pub fn structure(&self) -> (Vec<BigInt>, usize) {
        match self {
            Submodule::Field(s) => (Vec::new(), s.dim()),
            Submodule::Lattice { .. } => {
                let gens: Vec<Vec<BigInt>> = self.generators().iter().map(|g| self.carrier().lift(g)).collect();
                self.presentation().restrict(&gens).invariants()
            }
        }
    }

    /// A complement of `inner` inside `self`, if one exists (always over a field).
    pub fn complement_of(&self, inner: &Submodule) -> Result<Option<Vec<Vector>>> {
        match (self, inner) {
            (Submodule::Field(outer), Submodule::Field(inner)) => {
                let base = outer.intersection(inner)?;
                let mut current = base.clone();
                let mut out = Vec::new();
                for b in outer.basis() {
                    if !current.contains(b) {
                        out.push(b.clone());
                        current = current.sum(&Subspace::span(
                            outer.domain().clone(),
                            outer.ambient(),
                            std::slice::from_ref(b),
                        )?)?;
                    }
                }
                Ok(Some(out))
            }
            (Submodule::Lattice { .. }, Submodule::Lattice { .. }) => {
                if !self.contains_submodule(inner) {
                    return Err(Error::ElementNotInModule("inner submodule is not contained in the outer one".into()));
                }
                let c = self.carrier();
                let p = self.presentation();
                let outer_gens: Vec<Vec<BigInt>> = self.generators().iter().map(|g| c.lift(g)).collect();
                let sub = p.restrict(&outer_gens);
                let inner_coords: Vec<Vec<BigInt>> =
                    inner.generators().iter().map(|g| p.express(&outer_gens, &c.lift(g)).expect("contained")).collect();
                Ok(sub.split_complement(&inner_coords).map(|comp| {
                    comp.iter()
                        .map(|a| c.unlift(&p.reduce(&snf::int_row_apply(a, &outer_gens, c.dim()))))
                        .filter(|v| !c.is_zero(v))
                        .collect()
                }))
            }
            _ => Err(Error::AlgebraMismatch),
        }
    }

    /// Coordinates of `v` in the canonical generators (one choice over Z).
    pub fn express(&self, v: &[Scalar]) -> Option<Vector> {
        match self {
            Submodule::Field(s) => s.coordinates(v),
            Submodule::Lattice { .. } => {
                let c = self.carrier();
                let gens: Vec<Vec<BigInt>> = self.generators().iter().map(|g| c.lift(g)).collect();
                let a = self.presentation().express(&gens, &c.lift(v))?;
                Some(a.into_iter().map(Scalar::Int).collect())
            }
        }
    }

    pub fn format(&self) -> Vec<Vec<String>> {
        let c = self.carrier();
        self.generators().iter().map(|g| c.format(g)).collect()
    }

    /// A basis adapted to the abstract structure of the submodule.
    pub fn adapted(&self) -> Result<AdaptedBasis> {
        match self {
            Submodule::Field(s) => Ok(AdaptedBasis {
                carrier: Carrier::vector(s.domain().clone(), s.dim()),
                vectors: s.basis().to_vec(),
                ambient: self.carrier(),
                solver: AdaptedSolver::Field(s.clone()),
            }),
            Submodule::Lattice { .. } => {
                let c = self.carrier();
                let p = self.presentation();
                let gens: Vec<Vec<BigInt>> = self.generators().iter().map(|g| c.lift(g)).collect();
                let k = gens.len();
                let rel = p.restrict(&gens);
                let s = snf::smith(rel.relations(), rel.relations().len(), k);
                let mut summands = Vec::new();
                let mut keep = Vec::new();
                let mut orders = Vec::new();
                let mut vectors = Vec::new();
                for i in 0..k {
                    let d = s.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
                    if d.is_one() {
                        continue;
                    }
                    let summand = if d.is_zero() {
                        Summand::FreeIntLine
                    } else {
                        let m = num_traits::ToPrimitive::to_u64(&d)
                            .filter(|&m| m < crate::kernel::domain::MODULUS_LIMIT)
                            .ok_or_else(|| Error::UnsupportedDomain {
                                op: "adapted basis",
                                domain: format!("cyclic order {d}"),
                            })?;
                        Summand::Cyclic(m)
                    };
                    let v = snf::int_row_apply(&s.v_inv[i], &gens, c.dim());
                    summands.push(summand);
                    keep.push(i);
                    orders.push(d);
                    vectors.push(c.unlift(&p.reduce(&v)));
                }
                Ok(AdaptedBasis {
                    carrier: Carrier::Abelian(ModuleDesc::new(summands)),
                    vectors,
                    ambient: c,
                    solver: AdaptedSolver::Lattice { presentation: p, gens, v: s.v, keep },
                })
            }
        }
    }
}

#[derive(Clone, Debug)]
enum AdaptedSolver {
    Field(Subspace),
    Lattice { presentation: Presentation, gens: Vec<Vec<BigInt>>, v: IntMatrix, keep: Vec<usize> },
}

/// Generators of a submodule forming a formal direct sum, with coordinates.
#[derive(Clone, Debug)]
pub struct AdaptedBasis {
    /// The submodule as an abstract carrier.
    pub carrier: Carrier,
    /// The generators, as elements of the ambient carrier.
    pub vectors: Vec<Vector>,
    ambient: Carrier,
    solver: AdaptedSolver,
}

impl AdaptedBasis {
    pub fn ambient(&self) -> &Carrier {
        &self.ambient
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Coordinates of an ambient element in this basis, if it lies in the submodule.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        match &self.solver {
            AdaptedSolver::Field(s) => s.coordinates(v),
            AdaptedSolver::Lattice { presentation, gens, v: vmat, keep } => {
                let a = presentation.express(gens, &self.ambient.lift(v))?;
                let k = gens.len();
                let full = snf::int_row_apply(&a, vmat, k);
                let coords: Vec<BigInt> = keep.iter().map(|&i| full[i].clone()).collect();
                Some(self.carrier.unlift(&coords))
            }
        }
    }

    /// The ambient element with the given coordinates.
    pub fn combine(&self, coords: &[Scalar]) -> Vector {
        let mut acc = self.ambient.zero();
        for (c, v) in coords.iter().zip(&self.vectors) {
            let term = match c {
                Scalar::Mod(m) => self.ambient.scale(&Scalar::Int(BigInt::from(*m)), v),
                other => self.ambient.scale(other, v),
            };
            acc = self.ambient.add(&acc, &term);
        }
        acc
    }
}

/// Renders invariants as `Z/2 ⊕ Z/6 ⊕ Z^2`.
pub fn describe_structure(torsion: &[BigInt], free_rank: usize) -> String {
    let mut parts: Vec<String> = torsion.iter().map(|d| format!("Z/{d}")).collect();
    if free_rank > 0 {
        parts.push(if free_rank == 1 { "Z".to_string() } else { format!("Z^{free_rank}") });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ⊕ ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(s: &[Summand]) -> ModuleDesc {
        ModuleDesc::new(s.to_vec())
    }

    fn ints(d: &ModuleDesc, xs: &[i64]) -> Vector {
        d.element(xs.iter().map(|&x| Scalar::Int(x.into())).collect()).unwrap()
    }

    #[test]
    fn split_of_mixed_sum() {
        use Summand::*;
        let m = desc(&[RationalLine, Cyclic(4), RationalLine]);
        let s = divisible_bounded_split(&m).unwrap();
        assert_eq!(s.divisible.to_string(), "Q^2");
        assert_eq!(s.bounded.to_string(), "Z/4");
        assert!(matches!(divisible_bounded_split(&desc(&[FreeIntLine])), Err(Error::NotOmegaStableShape(_))));
    }

    #[test]
    fn exponent_is_lcm() {
        let m = desc(&[Summand::Cyclic(6), Summand::Cyclic(4)]);
        assert!(m.is_bounded());
        assert_eq!(m.exponent(), Some(BigInt::from(12)));
        assert!(!desc(&[Summand::RationalLine, Summand::Cyclic(2)]).is_bounded());
    }

    #[test]
    fn complements_in_small_modules() {
        use Summand::*;
        let z = desc(&[FreeIntLine]);
        assert_eq!(split_complement(&[ints(&z, &[2])], &z).unwrap(), None);
        let z2 = desc(&[FreeIntLine, FreeIntLine]);
        assert_eq!(split_complement(&[ints(&z2, &[1, 0])], &z2).unwrap(), Some(vec![ints(&z2, &[0, 1])]));
        let zt = desc(&[FreeIntLine, Cyclic(2)]);
        let c = split_complement(&[ints(&zt, &[0, 1])], &zt).unwrap().unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0][0], Scalar::Int(BigInt::from(1)));
    }

    #[test]
    fn torsion_submodule_splits_off_z4() {
        // ⟨2⟩ ≤ Z/4 does not split; ⟨(1,0)⟩ ≤ Z/2 ⊕ Z/4 does
        let z4 = desc(&[Summand::Cyclic(4)]);
        assert_eq!(split_complement(&[ints(&z4, &[2])], &z4).unwrap(), None);
        let m = desc(&[Summand::Cyclic(2), Summand::Cyclic(4)]);
        let c = split_complement(&[ints(&m, &[1, 0])], &m).unwrap().unwrap();
        let carrier = Carrier::Abelian(m.clone());
        let mut all = c.clone();
        all.push(ints(&m, &[1, 0]));
        assert_eq!(carrier.span(&all).unwrap(), carrier.whole().unwrap());
    }

    #[test]
    fn kernel_of_doubling_on_z_plus_z2() {
        use Summand::*;
        let m = desc(&[FreeIntLine, Cyclic(2)]);
        let c = Carrier::Abelian(m.clone());
        // x ↦ 2x
        let images = vec![ints(&m, &[2, 0]), ints(&m, &[0, 0])];
        let k = c.kernel(&images, &c).unwrap();
        assert_eq!(k.generators(), vec![ints(&m, &[0, 1])]);
    }

    #[test]
    fn adapted_basis_of_image_with_torsion() {
        // ⟨(2, 1)⟩ ≤ Z ⊕ Z/2 is free of rank 1; ⟨(0, 1)⟩ is Z/2
        let m = desc(&[Summand::FreeIntLine, Summand::Cyclic(2)]);
        let c = Carrier::Abelian(m.clone());
        let a = c.span(&[ints(&m, &[2, 1])]).unwrap().adapted().unwrap();
        assert_eq!(a.carrier, Carrier::Abelian(desc(&[Summand::FreeIntLine])));
        let v = ints(&m, &[6, 1]);
        let coords = a.coordinates(&v).unwrap();
        assert_eq!(a.combine(&coords), v);
        let t = c.span(&[ints(&m, &[0, 1])]).unwrap().adapted().unwrap();
        assert_eq!(t.carrier, Carrier::Abelian(desc(&[Summand::Cyclic(2)])));
    }

    #[test]
    fn submodule_structure_and_complement_inside() {
        let m = desc(&[Summand::FreeIntLine, Summand::FreeIntLine]);
        let c = Carrier::Abelian(m.clone());
        let outer = c.span(&[ints(&m, &[1, 0])]).unwrap();
        let inner = c.span(&[ints(&m, &[2, 0])]).unwrap();
        assert_eq!(outer.structure(), (vec![], 1));
        assert_eq!(outer.complement_of(&inner).unwrap(), None);
        let whole = c.whole().unwrap();
        let comp = whole.complement_of(&outer).unwrap().unwrap();
        assert_eq!(comp.len(), 1);
    }
}
