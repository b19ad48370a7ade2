//! Bilinear maps `f : M × M → N` given by structure tensors.

use std::collections::HashSet;

use num_bigint::BigInt;

use crate::abelian::{divisible_bounded_split, AdaptedBasis, Carrier, DivisibleBoundedSplit, Submodule, Summand};
use crate::error::{Error, Result};
use crate::finite;
use crate::kernel::{Domain, Rational, Scalar, Vector};

/// Carriers with at most this many elements get an exact width by enumeration.
pub const EXACT_WIDTH_LIMIT: u128 = 729;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearMap {
    source: Carrier,
    target: Carrier,
    /// `tensor[i][j] = f(bᵢ, bⱼ)` in target coordinates.
    tensor: Vec<Vec<Vector>>,
}

impl BilinearMap {
    pub fn new(source: Carrier, target: Carrier, tensor: Vec<Vec<Vector>>) -> Result<BilinearMap> {
        match (&source, &target) {
            (Carrier::Vector { field: a, .. }, Carrier::Vector { field: b, .. }) if a == b => {}
            (Carrier::Abelian(_), Carrier::Abelian(_)) => {}
            _ => {
                return Err(Error::Validation(format!(
                    "source {source} and target {target} are not over the same ring"
                )));
            }
        }
        let n = source.dim();
        if tensor.len() != n || tensor.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!("tensor must be {n}×{n}")));
        }
        let tensor: Vec<Vec<Vector>> = tensor
            .into_iter()
            .map(|row| row.into_iter().map(|e| target.check(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let f = BilinearMap { source, target, tensor };
        f.check_mixed_constraints()?;
        Ok(f)
    }

    /// Entries touching a rational line must be rational; entries touching `Z/m` must be m-torsion.
    fn check_mixed_constraints(&self) -> Result<()> {
        let (Carrier::Abelian(src), Carrier::Abelian(tgt)) = (&self.source, &self.target) else { return Ok(()) };
        let n = src.len();
        for i in 0..n {
            for j in 0..n {
                for (a, b) in [(i, j), (j, i)] {
                    let e = &self.tensor[a][b];
                    match src.summands()[i] {
                        Summand::RationalLine => {
                            if let Some(k) = (0..tgt.len()).find(|&k| {
                                tgt.summands()[k] != Summand::RationalLine
                                    && !self.target.coordinate_domain(k).is_zero(&e[k])
                            }) {
                                return Err(Error::Validation(format!(
                                    "f(b{a}, b{b}) has a nonzero coordinate {k} outside the divisible part of the target although b{i} is a rational line"
                                )));
                            }
                            if let Summand::Cyclic(_) = src.summands()[j] {
                                if !self.target.is_zero(e) {
                                    return Err(Error::Validation(format!(
                                        "cross pair (divisible b{i}, bounded b{j}) must map to 0"
                                    )));
                                }
                            }
                        }
                        Summand::Cyclic(m) => {
                            let killed = self.target.scale(&Scalar::Int(BigInt::from(m)), e);
                            if !self.target.is_zero(&killed) {
                                return Err(Error::Validation(format!(
                                    "f(b{a}, b{b}) is not {m}-torsion although b{i} has order {m}"
                                )));
                            }
                        }
                        Summand::FreeIntLine => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero(source: Carrier, target: Carrier) -> BilinearMap {
        let n = source.dim();
        let z = target.zero();
        BilinearMap { source, target, tensor: vec![vec![z; n]; n] }
    }

    pub fn source(&self) -> &Carrier {
        &self.source
    }

    pub fn target(&self) -> &Carrier {
        &self.target
    }

    pub fn tensor(&self) -> &[Vec<Vector>] {
        &self.tensor
    }

    pub fn entry(&self, i: usize, j: usize) -> &Vector {
        &self.tensor[i][j]
    }

    /// `x_i y_j · entry`, respecting the coordinate types of a Z-carrier.
    fn term(&self, xi: &Scalar, yj: &Scalar, entry: &[Scalar]) -> Option<Vector> {
        match &self.source {
            Carrier::Vector { field, .. } => {
                if field.is_zero(xi) || field.is_zero(yj) {
                    return None;
                }
                Some(self.target.scale(&field.mul(xi, yj), entry))
            }
            Carrier::Abelian(_) => {
                if self.target.is_zero(entry) {
                    return None;
                }
                let as_int = |s: &Scalar| match s {
                    Scalar::Int(n) => Some(n.clone()),
                    Scalar::Mod(m) => Some(BigInt::from(*m)),
                    Scalar::Rat(_) => None,
                    Scalar::Ext(_) => unreachable!("extension scalar on a Z-carrier"),
                };
                match (as_int(xi), as_int(yj)) {
                    (Some(a), Some(b)) => Some(self.target.scale(&Scalar::Int(a * b), entry)),
                    _ => {
                        let rat = |s: &Scalar| -> Rational {
                            match s {
                                Scalar::Rat(q) => q.clone(),
                                Scalar::Int(n) => Rational::from_integer(n.clone()),
                                other => panic!(
                                    "torsion coordinate {other:?} paired with a rational line on a nonzero entry"
                                ),
                            }
                        };
                        let q = rat(xi) * rat(yj);
                        Some(
                            entry
                                .iter()
                                .map(|c| match c {
                                    Scalar::Rat(r) => Scalar::Rat(r * &q),
                                    other => other.clone(),
                                })
                                .collect(),
                        )
                    }
                }
            }
        }
    }

    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut acc = self.target.zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                if let Some(t) = self.term(xi, yj, &self.tensor[i][j]) {
                    acc = self.target.add(&acc, &t);
                }
            }
        }
        acc
    }

    /// `C(f) = {x : f(x, M) = f(M, x) = 0}`.
    pub fn two_sided_kernel(&self) -> Result<Submodule> {
        let n = self.source.dim();
        let stacked = match &self.target {
            Carrier::Vector { field, dim } => Carrier::vector(field.clone(), 2 * n * dim),
            Carrier::Abelian(d) => {
                let mut s = Vec::with_capacity(2 * n * d.len());
                for _ in 0..2 * n {
                    s.extend(d.summands().iter().copied());
                }
                Carrier::Abelian(crate::abelian::ModuleDesc::new(s))
            }
        };
        let images: Vec<Vector> = (0..n)
            .map(|i| {
                let mut v = Vec::new();
                for j in 0..n {
                    v.extend(self.tensor[i][j].iter().cloned());
                }
                for j in 0..n {
                    v.extend(self.tensor[j][i].iter().cloned());
                }
                v
            })
            .collect();
        self.source.kernel(&images, &stacked)
    }

    /// The submodule of `N` generated by all values.
    pub fn image(&self) -> Result<Submodule> {
        let gens: Vec<Vector> = self.tensor.iter().flatten().cloned().collect();
        self.target.span(&gens)
    }

    pub fn is_full(&self) -> Result<bool> {
        Ok(self.image()? == self.target.whole()?)
    }

    pub fn is_nondegenerate(&self) -> Result<bool> {
        Ok(self.two_sided_kernel()?.is_zero())
    }

    /// The map induced on adapted generators of a submodule of `M`, into a submodule of `N`
    /// containing the relevant values.
    pub fn restrict(&self, source: &AdaptedBasis, target: &AdaptedBasis) -> Result<BilinearMap> {
        let k = source.len();
        let mut tensor = Vec::with_capacity(k);
        for a in 0..k {
            let mut row = Vec::with_capacity(k);
            for b in 0..k {
                let v = self.eval(&source.vectors[a], &source.vectors[b]);
                let c = target.coordinates(&v).ok_or_else(|| {
                    Error::ElementNotInModule(format!("f(g{a}, g{b}) lies outside the chosen codomain"))
                })?;
                row.push(c);
            }
            tensor.push(row);
        }
        BilinearMap::new(source.carrier.clone(), target.carrier.clone(), tensor)
    }

    /// Block-diagonal sum on `M ⊕ M'` into `N ⊕ N'`.
    pub fn direct_sum(&self, other: &BilinearMap) -> Result<BilinearMap> {
        let source = direct_sum_carrier(&self.source, &other.source)?;
        let target = direct_sum_carrier(&self.target, &other.target)?;
        let (n1, n2) = (self.source.dim(), other.source.dim());
        let mut tensor = vec![vec![target.zero(); n1 + n2]; n1 + n2];
        for i in 0..n1 {
            for j in 0..n1 {
                let mut v = self.tensor[i][j].clone();
                v.extend(other.target.zero());
                tensor[i][j] = v;
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                let mut v = self.target.zero();
                v.extend(other.tensor[i][j].iter().cloned());
                tensor[n1 + i][n1 + j] = v;
            }
        }
        BilinearMap::new(source, target, tensor)
    }

    /// `f = f^F ⊕ f^0` over complements of `C(f)` in `M` and of `im(f)` in `N`.
    pub fn foundation_addition_split(&self) -> Result<BilinearSplit> {
        let kernel = self.two_sided_kernel()?;
        let image = self.image()?;
        let complement = self
            .source
            .whole()?
            .complement_of(&kernel)?
            .ok_or_else(|| Error::NoSplit("the two-sided kernel C(f) in M".into()))?;
        let image_complement =
            self.target.whole()?.complement_of(&image)?.ok_or_else(|| Error::NoSplit("the image of f in N".into()))?;
        let foundation_source = self.source.span(&complement)?.adapted()?;
        let kernel = kernel.adapted()?;
        let image = image.adapted()?;
        let image_complement = self.target.span(&image_complement)?.adapted()?;
        let foundation = self.restrict(&foundation_source, &image)?;
        let addition = BilinearMap::zero(kernel.carrier.clone(), image_complement.carrier.clone());
        Ok(BilinearSplit { foundation, addition, foundation_source, kernel, image, image_complement })
    }

    /// `f = f_D + f_C` along the divisible and bounded parts.
    pub fn torsion_split(&self) -> Result<TorsionSplit> {
        if let Carrier::Vector { field, .. } = &self.source {
            let empty = BilinearMap::zero(Carrier::vector(field.clone(), 0), Carrier::vector(field.clone(), 0));
            let (divisible, bounded) =
                if field.characteristic() == 0 { (self.clone(), empty) } else { (empty, self.clone()) };
            return Ok(TorsionSplit { divisible, bounded, source_split: None, target_split: None });
        }
        let ms = divisible_bounded_split(&self.source.desc())?;
        let ns = divisible_bounded_split(&self.target.desc())?;
        for &i in &ms.divisible_indices {
            for &j in &ms.bounded_indices {
                if !self.target.is_zero(&self.tensor[i][j]) || !self.target.is_zero(&self.tensor[j][i]) {
                    return Err(Error::Validation(format!(
                        "cross pair (b{i}, b{j}) between divisible and bounded parts is nonzero"
                    )));
                }
            }
        }
        let block = |idx: &[usize], tidx: &[usize], src: Carrier, tgt: Carrier| -> Result<BilinearMap> {
            let tensor = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| tidx.iter().map(|&k| self.tensor[i][j][k].clone()).collect()).collect())
                .collect();
            BilinearMap::new(src, tgt, tensor)
        };
        let q = |n: usize| Carrier::over(&Domain::Integers, n, Some(vec![Summand::RationalLine; n]));
        let divisible =
            block(&ms.divisible_indices, &ns.divisible_indices, q(ms.divisible.len())?, q(ns.divisible.len())?)?;
        let bounded = block(
            &ms.bounded_indices,
            &ns.bounded_indices,
            Carrier::Abelian(ms.bounded.clone()),
            Carrier::Abelian(ns.bounded.clone()),
        )?;
        // values of bounded pairs must be torsion, values of divisible pairs divisible
        for &i in &ms.bounded_indices {
            for &j in &ms.bounded_indices {
                if ns
                    .divisible_indices
                    .iter()
                    .any(|&k| !self.target.coordinate_domain(k).is_zero(&self.tensor[i][j][k]))
                {
                    return Err(Error::Validation(format!(
                        "f(b{i}, b{j}) of bounded elements has a divisible component"
                    )));
                }
            }
        }
        Ok(TorsionSplit { divisible, bounded, source_split: Some(ms), target_split: Some(ns) })
    }

    /// Least `s` such that every element of `im(f)` is a sum of `s` values, or a certified
    /// upper bound when the carrier is too large or infinite.
    pub fn width(&self, search_bound: usize) -> Result<Width> {
        let image = self.image()?;
        if image.is_zero() {
            return Ok(Width::Exact(0));
        }
        if finite::carrier_size(&self.source).is_some_and(|s| s <= EXACT_WIDTH_LIMIT) {
            let elements = finite::elements(&self.source, EXACT_WIDTH_LIMIT)?;
            let mut values = HashSet::new();
            for x in &elements {
                for y in &elements {
                    values.insert(self.eval(x, y));
                }
            }
            let target_size = finite::submodule_size(&image).expect("finite image");
            return Ok(Width::Exact(finite::sumset_width(&values, &self.target, target_size, search_bound)?));
        }
        let n = self.source.dim();
        // a single value generating the image makes every element one product
        for i in 0..n {
            for j in 0..n {
                if self.target.span(&[self.tensor[i][j].clone()])? == image {
                    return Ok(Width::Exact(1));
                }
            }
        }
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        let mut gens: Vec<Vector> = Vec::new();
        'outer: for i in 0..n {
            for j in 0..n {
                let mut candidate = gens.clone();
                candidate.push(self.tensor[i][j].clone());
                let before = self.target.span(&gens)?;
                if !before.contains(&self.tensor[i][j]) {
                    gens = candidate;
                    chosen.push((i, j));
                    if self.target.span(&gens)? == image {
                        break 'outer;
                    }
                }
            }
        }
        if n < chosen.len() {
            Ok(Width::UpperBound { bound: n, certificate: WidthCertificate::ColumnSums })
        } else {
            Ok(Width::UpperBound { bound: chosen.len(), certificate: WidthCertificate::ProductGenerators(chosen) })
        }
    }
}

pub(crate) fn direct_sum_carrier(a: &Carrier, b: &Carrier) -> Result<Carrier> {
    match (a, b) {
        (Carrier::Vector { field: f1, dim: d1 }, Carrier::Vector { field: f2, dim: d2 }) if f1 == f2 => {
            Ok(Carrier::vector(f1.clone(), d1 + d2))
        }
        (Carrier::Abelian(x), Carrier::Abelian(y)) => Ok(Carrier::Abelian(x.direct_sum(y))),
        _ => Err(Error::Validation(format!("cannot form a direct sum of {a} and {b}"))),
    }
}

/// `f = f^F ⊕ f^0` with the generators used for each part.
#[derive(Clone, Debug)]
pub struct BilinearSplit {
    /// Full and nondegenerate on a complement of `C(f)`, into `im(f)`.
    pub foundation: BilinearMap,
    /// Identically zero on `C(f)`, into a complement of `im(f)`.
    pub addition: BilinearMap,
    pub foundation_source: AdaptedBasis,
    pub kernel: AdaptedBasis,
    pub image: AdaptedBasis,
    pub image_complement: AdaptedBasis,
}

impl BilinearSplit {
    /// Checks `f(x, y) = f^F(x₁, y₁) + f^0(x₂, y₂)` on all pairs of the new generators.
    pub fn reassembles(&self, f: &BilinearMap) -> bool {
        let k = self.foundation_source.len();
        let mut gens = self.foundation_source.vectors.clone();
        gens.extend(self.kernel.vectors.iter().cloned());
        for a in 0..gens.len() {
            for b in 0..gens.len() {
                let expected = f.eval(&gens[a], &gens[b]);
                let got = if a < k && b < k {
                    self.image.combine(self.foundation.entry(a, b))
                } else if a >= k && b >= k {
                    self.image_complement.combine(self.addition.entry(a - k, b - k))
                } else {
                    f.target().zero()
                };
                if expected != got {
                    return false;
                }
            }
        }
        true
    }
}

/// Restrictions of a map to the divisible and the bounded parts.
#[derive(Clone, Debug)]
pub struct TorsionSplit {
    pub divisible: BilinearMap,
    pub bounded: BilinearMap,
    pub source_split: Option<DivisibleBoundedSplit>,
    pub target_split: Option<DivisibleBoundedSplit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Width {
    Exact(usize),
    UpperBound { bound: usize, certificate: WidthCertificate },
}

impl Width {
    pub fn value(&self) -> usize {
        match self {
            Width::Exact(s) => *s,
            Width::UpperBound { bound, .. } => *bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WidthCertificate {
    /// Basis pairs whose values generate the image; a combination `Σ nₖ f(xₖ, yₖ)`
    /// equals `Σ f(nₖ xₖ, yₖ)`.
    ProductGenerators(Vec<(usize, usize)>),
    /// `Σᵢⱼ cᵢⱼ f(bᵢ, bⱼ) = Σⱼ f(Σᵢ cᵢⱼ bᵢ, bⱼ)`: at most `dim M` products.
    ColumnSums,
    /// Every value is closed under scaling through a variable occurring once, so a
    /// basis of values gives each element as a sum of at most `dim` values.
    ScaledValues { variable: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Domain::Rationals.from_i64(n)
    }

    fn alternating() -> BilinearMap {
        let m = Carrier::vector(Domain::Rationals, 2);
        let n = Carrier::vector(Domain::Rationals, 1);
        BilinearMap::new(m, n, vec![vec![vec![q(0)], vec![q(1)]], vec![vec![q(-1)], vec![q(0)]]]).unwrap()
    }

    #[test]
    fn alternating_form_is_full_and_nondegenerate() {
        let f = alternating();
        assert!(f.is_full().unwrap());
        assert!(f.is_nondegenerate().unwrap());
        assert_eq!(f.width(8).unwrap(), Width::Exact(1));
    }

    #[test]
    fn heisenberg_bracket_kernel_and_split() {
        // f(e1, e2) = 1 = -f(e2, e1) on Q^3 into Q, e3 inert
        let m = Carrier::vector(Domain::Rationals, 3);
        let n = Carrier::vector(Domain::Rationals, 1);
        let mut t = vec![vec![vec![q(0)]; 3]; 3];
        t[0][1] = vec![q(1)];
        t[1][0] = vec![q(-1)];
        let f = BilinearMap::new(m, n, t).unwrap();
        let c = f.two_sided_kernel().unwrap();
        assert_eq!(c.generators(), vec![vec![q(0), q(0), q(1)]]);
        let s = f.foundation_addition_split().unwrap();
        assert_eq!(s.foundation.source().dim(), 2);
        assert!(s.foundation.is_nondegenerate().unwrap());
        assert_eq!(s.addition.source().dim(), 1);
        assert!(s.reassembles(&f));
    }

    #[test]
    fn mixed_cross_pair_rejected() {
        let m = Carrier::Abelian(crate::abelian::ModuleDesc::new(vec![Summand::RationalLine, Summand::Cyclic(2)]));
        let z = m.zero();
        let mut t = vec![vec![z.clone(); 2]; 2];
        t[0][1] = vec![Scalar::Rat(Rational::from_integer(1.into())), Scalar::Mod(0)];
        assert!(BilinearMap::new(m.clone(), m.clone(), t).is_err());
    }

    #[test]
    fn gf2_multiplication_width() {
        let c = Carrier::vector(Domain::PrimeField(2), 1);
        let f = BilinearMap::new(c.clone(), c, vec![vec![vec![Scalar::Mod(1)]]]).unwrap();
        assert_eq!(f.width(4).unwrap(), Width::Exact(1));
    }
}
