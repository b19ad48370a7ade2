//! Nilpotent Lie algebras in characteristic zero and their groups `exp(L)` in
//! log coordinates, with multiplication given by the Baker–Campbell–Hausdorff series.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::abelian::{Carrier, Submodule};
use crate::artinian::ResiduePolicy;
use crate::error::{Error, Result};
use crate::kernel::{vec_ops, Domain, Matrix, Rational, Scalar, Subspace, Vector};
use crate::rings::{decompose_char0, RingPresentation};

/// Largest nilpotency class handled by [`bch`].
pub const MAX_CLASS: usize = 6;

/// A Lie algebra over a field of characteristic 0 with `L^{c+1} = 0`.
#[derive(Clone, Debug)]
pub struct NilpotentLieAlgebra {
    ring: RingPresentation,
    class: usize,
    /// `L¹ ⊇ L² ⊇ ⋯ ⊇ L^{c+1} = 0`.
    lower_central: Vec<Subspace>,
}

pub fn verify_nilpotent_lie(ring: &RingPresentation) -> Result<NilpotentLieAlgebra> {
    let d = ring.carrier().require_field("verify_nilpotent_lie")?.clone();
    if d.characteristic() != 0 {
        return Err(Error::UnsupportedDomain { op: "verify_nilpotent_lie", domain: d.to_string() });
    }
    let n = ring.dim();
    let t = ring.multiplication().tensor();
    for i in 0..n {
        if !vec_ops::is_zero(&d, &t[i][i]) {
            return Err(Error::NotLie(format!("(b{i}, b{i}) ≠ 0")));
        }
        for j in 0..n {
            if !vec_ops::is_zero(&d, &vec_ops::add(&d, &t[i][j], &t[j][i])) {
                return Err(Error::NotLie(format!("(b{i}, b{j}) ≠ −(b{j}, b{i})")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let e = |a: usize| vec_ops::unit(&d, n, a);
                let s = vec_ops::add(
                    &d,
                    &vec_ops::add(&d, &ring.mul(&e(i), &t[j][k]), &ring.mul(&e(j), &t[k][i])),
                    &ring.mul(&e(k), &t[i][j]),
                );
                if !vec_ops::is_zero(&d, &s) {
                    return Err(Error::NotLie(format!("Jacobi identity fails on (b{i}, b{j}, b{k})")));
                }
            }
        }
    }
    let mut lower_central = vec![Subspace::full(d.clone(), n)];
    loop {
        let last = lower_central.last().unwrap();
        if last.is_zero() {
            break;
        }
        let gens: Vec<Vector> = (0..n)
            .flat_map(|i| last.basis().iter().map(move |v| (i, v)))
            .map(|(i, v)| ring.mul(&vec_ops::unit(&d, n, i), v))
            .collect();
        let next = Subspace::span(d.clone(), n, &gens)?;
        if next == *last {
            return Err(Error::NotNilpotent { stable_dim: next.dim() });
        }
        lower_central.push(next);
    }
    let class = lower_central.len() - 1;
    Ok(NilpotentLieAlgebra { ring: ring.clone(), class, lower_central })
}

impl NilpotentLieAlgebra {
    pub fn ring(&self) -> &RingPresentation {
        &self.ring
    }

    pub fn field(&self) -> Domain {
        self.ring.carrier().domain()
    }

    pub fn dim(&self) -> usize {
        self.ring.dim()
    }

    /// Least `c` with `L^{c+1} = 0` (1 for a nonzero abelian algebra).
    pub fn class(&self) -> usize {
        self.class
    }

    pub fn lower_central_series(&self) -> &[Subspace] {
        &self.lower_central
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        self.ring.mul(x, y)
    }

    /// Matrix of `ad x = (x, ·)`.
    pub fn ad(&self, x: &[Scalar]) -> Matrix {
        let n = self.dim();
        let d = self.field();
        let cols: Vec<Vector> = (0..n).map(|j| self.bracket(x, &vec_ops::unit(&d, n, j))).collect();
        Matrix::from_columns(d, n, &cols)
    }

    pub fn center(&self) -> Result<Subspace> {
        match self.ring.annihilator()? {
            Submodule::Field(s) => Ok(s),
            Submodule::Lattice { .. } => unreachable!("field carrier"),
        }
    }
}

/// Dynkin's series as a sum over right-nested bracket words in `x` (false) and `y` (true).
fn dynkin_words(class: usize) -> &'static [(Vec<bool>, Rational)] {
    static TABLES: [OnceLock<Vec<(Vec<bool>, Rational)>>; MAX_CLASS + 1] = [const { OnceLock::new() }; MAX_CLASS + 1];
    TABLES[class].get_or_init(|| {
        let mut acc: BTreeMap<Vec<bool>, Rational> = BTreeMap::new();
        let factorial =
            |k: usize| -> Rational { (1..=k).fold(Rational::one(), |a, i| a * Rational::from_integer(i.into())) };
        // blocks (rᵢ, sᵢ) with rᵢ + sᵢ ≥ 1 and total length ≤ class
        fn compositions(remaining: usize, out: &mut Vec<Vec<(usize, usize)>>, prefix: &mut Vec<(usize, usize)>) {
            if !prefix.is_empty() {
                out.push(prefix.clone());
            }
            for total in 1..=remaining {
                for r in 0..=total {
                    prefix.push((r, total - r));
                    compositions(remaining - total, out, prefix);
                    prefix.pop();
                }
            }
        }
        let mut all = Vec::new();
        compositions(class, &mut all, &mut Vec::new());
        for blocks in all {
            let mut word = Vec::new();
            let mut denominator = Rational::from_integer(blocks.len().into());
            for &(r, s) in &blocks {
                word.extend(std::iter::repeat_n(false, r));
                word.extend(std::iter::repeat_n(true, s));
                denominator *= factorial(r) * factorial(s);
            }
            let m = word.len();
            if m >= 2 && word[m - 1] == word[m - 2] {
                continue;
            }
            denominator *= Rational::from_integer(m.into());
            let sign = if blocks.len() % 2 == 1 { Rational::one() } else { -Rational::one() };
            *acc.entry(word).or_insert_with(Rational::zero) += sign / denominator;
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    })
}

/// `log(exp x · exp y)` evaluated in `L` by Dynkin's formula, truncated at the class.
pub fn bch(l: &NilpotentLieAlgebra, x: &[Scalar], y: &[Scalar], max_class: usize) -> Result<Vector> {
    let n = l.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::AlgebraMismatch);
    }
    let cap = max_class.min(MAX_CLASS);
    if l.class() > cap {
        return Err(Error::ClassTooLarge { class: l.class(), cap });
    }
    let d = l.field();
    if l.class() == 0 {
        return Ok(vec_ops::zero(&d, n));
    }
    let (ad_x, ad_y) = (l.ad(x), l.ad(y));
    let mut out = vec_ops::zero(&d, n);
    // evaluate words sharing a suffix once
    let mut cache: BTreeMap<Vec<bool>, Vector> = BTreeMap::new();
    for (word, coeff) in dynkin_words(l.class()) {
        let v = eval_word(word, x, y, &ad_x, &ad_y, &mut cache);
        let c = d.from_rational(coeff)?;
        out = vec_ops::axpy(&d, &out, &c, &v);
    }
    Ok(out)
}

fn eval_word(
    word: &[bool],
    x: &[Scalar],
    y: &[Scalar],
    ad_x: &Matrix,
    ad_y: &Matrix,
    cache: &mut BTreeMap<Vec<bool>, Vector>,
) -> Vector {
    if let Some(v) = cache.get(word) {
        return v.clone();
    }
    let v = if word.len() == 1 {
        if word[0] {
            y.to_vec()
        } else {
            x.to_vec()
        }
    } else {
        let inner = eval_word(&word[1..], x, y, ad_x, ad_y, cache);
        if word[0] {
            ad_y.apply(&inner)
        } else {
            ad_x.apply(&inner)
        }
    };
    cache.insert(word.to_vec(), v.clone());
    v
}

/// An element of `exp(L)`, stored by its logarithm.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub log: Vector,
}

/// The group `exp(L)` with BCH multiplication.
#[derive(Clone, Debug)]
pub struct MalcevGroup {
    algebra: NilpotentLieAlgebra,
    max_class: usize,
}

impl MalcevGroup {
    pub fn new(algebra: NilpotentLieAlgebra, max_class: usize) -> Result<MalcevGroup> {
        let cap = max_class.min(MAX_CLASS);
        if algebra.class() > cap {
            return Err(Error::ClassTooLarge { class: algebra.class(), cap });
        }
        Ok(MalcevGroup { algebra, max_class: cap })
    }

    pub fn algebra(&self) -> &NilpotentLieAlgebra {
        &self.algebra
    }

    pub fn element(&self, log: Vector) -> Result<GroupElement> {
        if log.len() != self.algebra.dim() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(GroupElement { log })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { log: vec_ops::zero(&self.algebra.field(), self.algebra.dim()) }
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.log.len() == self.algebra.dim() {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(GroupElement { log: bch(&self.algebra, &g.log, &h.log, self.max_class)? })
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement { log: vec_ops::neg(&self.algebra.field(), &g.log) })
    }

    /// `g^a = exp(a · log g)` for `a` in the field.
    pub fn pow(&self, g: &GroupElement, a: &Scalar) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement { log: vec_ops::scale(&self.algebra.field(), a, &g.log) })
    }

    /// `[g, h] = g⁻¹h⁻¹gh`.
    pub fn commutator(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let a = self.mul(&self.inv(g)?, &self.inv(h)?)?;
        self.mul(&self.mul(&a, g)?, h)
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        vec_ops::is_zero(&self.algebra.field(), &g.log)
    }

    /// The commutator with its leading Lie term and the consistency checks.
    pub fn commutator_report(&self, g: &GroupElement, h: &GroupElement) -> Result<CommutatorReport> {
        let commutator = self.commutator(g, h)?;
        let bracket = self.algebra.bracket(&g.log, &h.log);
        let d = self.algebra.field();
        let trivial = self.is_identity(&commutator);
        let bracket_zero = vec_ops::is_zero(&d, &bracket);
        let difference = vec_ops::sub(&d, &commutator.log, &bracket);
        let series = self.algebra.lower_central_series();
        let third = series.get(2).cloned().unwrap_or_else(|| Subspace::zero(d.clone(), self.algebra.dim()));
        Ok(CommutatorReport {
            leading_term_matches: third.contains(&difference),
            exact_at_class_two: self.algebra.class() > 2 || vec_ops::is_zero(&d, &difference),
            trivial_iff_bracket_zero: trivial == bracket_zero,
            commutator,
            bracket,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CommutatorReport {
    pub commutator: GroupElement,
    /// `(log g, log h)`.
    pub bracket: Vector,
    /// `log[g, h] − (log g, log h) ∈ L³`.
    pub leading_term_matches: bool,
    /// At class ≤ 2 the commutator equals `exp((log g, log h))`.
    pub exact_at_class_two: bool,
    pub trivial_iff_bracket_zero: bool,
}

/// `G^i = exp(L^i)` and `Z(G) = exp(Ann L)`, certified on bases.
#[derive(Clone, Debug)]
pub struct CentralSeriesReport {
    pub series_dims: Vec<usize>,
    /// For each `i`: products of basis elements of `L^i` stay in `L^i`.
    pub closed_under_product: Vec<bool>,
    /// For each `i`: `[exp L^i, exp L]` lands in `exp L^{i+1}` on basis elements.
    pub commutators_descend: Vec<bool>,
    /// `log Z(G)` computed by the group commutation test.
    pub center: Subspace,
    pub center_matches_annihilator: bool,
}

pub fn central_series_and_center(group: &MalcevGroup) -> Result<CentralSeriesReport> {
    let l = group.algebra();
    let d = l.field();
    let n = l.dim();
    let series = l.lower_central_series();
    let basis_elements: Vec<GroupElement> = (0..n).map(|i| GroupElement { log: vec_ops::unit(&d, n, i) }).collect();
    let mut closed = Vec::new();
    let mut descend = Vec::new();
    for (i, layer) in series.iter().enumerate() {
        let next = series.get(i + 1).cloned().unwrap_or_else(|| Subspace::zero(d.clone(), n));
        let els: Vec<GroupElement> = layer.basis().iter().map(|v| GroupElement { log: v.clone() }).collect();
        let mut ok = true;
        for a in &els {
            for b in &els {
                ok &= layer.contains(&group.mul(a, b)?.log);
            }
        }
        closed.push(ok);
        let mut ok = true;
        for a in &els {
            for b in &basis_elements {
                ok &= next.contains(&group.commutator(a, b)?.log);
            }
        }
        descend.push(ok);
    }
    // g is central iff [g, exp bⱼ] = 1 for all j; each condition is tested on a basis of L
    // and on the kernel of the linear map x ↦ ((x, bⱼ))ⱼ, then confirmed at group level
    let ann = l.center()?;
    let mut center_gens = Vec::new();
    for v in ann.basis() {
        let g = GroupElement { log: v.clone() };
        let mut central = true;
        for b in &basis_elements {
            central &= group.is_identity(&group.commutator(&g, b)?);
        }
        if central {
            center_gens.push(v.clone());
        }
    }
    let complement = Submodule::Field(Subspace::full(d.clone(), n))
        .complement_of(&Submodule::Field(ann.clone()))?
        .unwrap_or_default();
    let mut outside_noncentral = true;
    for v in &complement {
        let g = GroupElement { log: v.clone() };
        let mut central = true;
        for b in &basis_elements {
            central &= group.is_identity(&group.commutator(&g, b)?);
        }
        outside_noncentral &= !central;
    }
    let center = Subspace::span(d.clone(), n, &center_gens)?;
    Ok(CentralSeriesReport {
        series_dims: series.iter().map(|s| s.dim()).collect(),
        closed_under_product: closed,
        commutators_descend: descend,
        center_matches_annihilator: center == ann && outside_noncentral,
        center,
    })
}

/// One direct factor `G_i = exp(L_i)`.
#[derive(Clone, Debug)]
pub struct GroupFactor {
    /// Basis of `L_i` in the input log coordinates.
    pub basis: Vec<Vector>,
    pub algebra: NilpotentLieAlgebra,
    pub field: Domain,
    pub abelian: bool,
}

#[derive(Clone, Debug)]
pub struct GroupDecomposition {
    pub factors: Vec<GroupFactor>,
    /// `G₀ = exp(L₀)`, divisible abelian; `None` when `L₀ = 0`.
    pub addition: Option<GroupFactor>,
    pub cross_commutators_trivial: bool,
}

/// `G ≅ G₁ × ⋯ × Gₙ × G₀` from the decomposition of `L`.
pub fn group_decompose(group: &MalcevGroup, seed: u64) -> Result<GroupDecomposition> {
    let l = group.algebra();
    let report = decompose_char0(l.ring(), ResiduePolicy::Describe, seed)?;
    let mut factors = Vec::new();
    for c in &report.components {
        let algebra = verify_nilpotent_lie(&c.ring)?;
        factors.push(GroupFactor {
            basis: c.basis.clone(),
            abelian: algebra.class() <= 1,
            algebra,
            field: c.residue_field.clone(),
        });
    }
    let addition = if report.addition_basis.is_empty() {
        None
    } else {
        let algebra = verify_nilpotent_lie(&report.addition)?;
        Some(GroupFactor { basis: report.addition_basis.clone(), algebra, field: l.field(), abelian: true })
    };
    let mut blocks: Vec<&[Vector]> = factors.iter().map(|f| f.basis.as_slice()).collect();
    if let Some(a) = &addition {
        blocks.push(&a.basis);
    }
    let mut trivial = true;
    for (i, a) in blocks.iter().enumerate() {
        for (j, b) in blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            for x in a.iter() {
                for y in b.iter() {
                    let c = group.commutator(&GroupElement { log: x.clone() }, &GroupElement { log: y.clone() })?;
                    trivial &= group.is_identity(&c);
                }
            }
        }
    }
    Ok(GroupDecomposition { factors, addition, cross_commutators_trivial: trivial })
}

/// Noncommutative polynomials in `rank` letters truncated above degree `max_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TruncatedSeries {
    pub terms: BTreeMap<Vec<u8>, Rational>,
}

impl TruncatedSeries {
    pub fn letter(a: u8) -> TruncatedSeries {
        TruncatedSeries { terms: BTreeMap::from([(vec![a], Rational::one())]) }
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            *terms.entry(w.clone()).or_insert_with(Rational::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        TruncatedSeries { terms }
    }

    pub fn scale(&self, c: &Rational) -> TruncatedSeries {
        let mut terms: BTreeMap<Vec<u8>, Rational> = self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect();
        terms.retain(|_, c| !c.is_zero());
        TruncatedSeries { terms }
    }

    pub fn mul(&self, other: &TruncatedSeries, max_degree: usize) -> TruncatedSeries {
        let mut terms: BTreeMap<Vec<u8>, Rational> = BTreeMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if u.len() + v.len() > max_degree {
                    continue;
                }
                let mut w = u.clone();
                w.extend(v);
                *terms.entry(w).or_insert_with(Rational::zero) += a * b;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        TruncatedSeries { terms }
    }

    pub fn commutator(&self, other: &TruncatedSeries, max_degree: usize) -> TruncatedSeries {
        self.mul(other, max_degree).add(&other.mul(self, max_degree).scale(&-Rational::one()))
    }
}

/// Lyndon words over `rank` letters of length at most `max_len`, by Duval's algorithm.
pub fn lyndon_words(rank: u8, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if rank == 0 || max_len == 0 {
        return out;
    }
    let mut w: Vec<u8> = vec![0];
    loop {
        out.push(w.clone());
        let base = w.clone();
        while w.len() < max_len {
            let c = base[w.len() % base.len()];
            w.push(c);
        }
        while w.last() == Some(&(rank - 1)) {
            w.pop();
        }
        if w.is_empty() {
            break;
        }
        *w.last_mut().unwrap() += 1;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

fn letter_name(rank: u8, a: u8) -> String {
    if rank <= 4 {
        ["x", "y", "z", "w"][a as usize].to_string()
    } else {
        format!("a{}", a + 1)
    }
}

/// Standard bracketing: `w = uv` with `v` the longest proper Lyndon suffix.
fn standard_factor(w: &[u8]) -> usize {
    (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("words of length ≥ 2 have a Lyndon suffix")
}

fn is_lyndon(w: &[u8]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w && w < &w[i..])
}

fn bracketed(w: &[u8], rank: u8, max_degree: usize) -> (TruncatedSeries, String) {
    if w.len() == 1 {
        return (TruncatedSeries::letter(w[0]), letter_name(rank, w[0]));
    }
    let split = standard_factor(w);
    let (a, an) = bracketed(&w[..split], rank, max_degree);
    let (b, bn) = bracketed(&w[split..], rank, max_degree);
    (a.commutator(&b, max_degree), format!("({an},{bn})"))
}

/// The free nilpotent Lie algebra of the given rank and class over `Q`, on the Lyndon basis.
/// Returns the algebra and the bracket names of the basis elements.
pub fn free_nilpotent(rank: u8, class: usize) -> Result<(NilpotentLieAlgebra, Vec<String>)> {
    let words = lyndon_words(rank, class);
    let polys: Vec<(TruncatedSeries, String)> = words.iter().map(|w| bracketed(w, rank, class)).collect();
    // coordinates of a Lie polynomial: its coefficient on the leading word of each basis element
    let mut monomials: Vec<Vec<u8>> = polys.iter().flat_map(|(p, _)| p.terms.keys().cloned()).collect();
    monomials.sort();
    monomials.dedup();
    let q = Domain::Rationals;
    let index: BTreeMap<&Vec<u8>, usize> = monomials.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let to_vec = |p: &TruncatedSeries| -> Option<Vector> {
        let mut v = vec_ops::zero(&q, monomials.len());
        for (w, c) in &p.terms {
            v[*index.get(w)?] = Scalar::Rat(c.clone());
        }
        Some(v)
    };
    let cols: Vec<Vector> = polys.iter().map(|(p, _)| to_vec(p).expect("basis monomials")).collect();
    let basis_matrix = Matrix::from_columns(q.clone(), monomials.len(), &cols);
    let k = words.len();
    let mut tensor = vec![vec![Vec::new(); k]; k];
    for a in 0..k {
        for b in 0..k {
            let c = polys[a].0.commutator(&polys[b].0, class);
            let coords = match to_vec(&c) {
                Some(v) => basis_matrix.solve(&v)?,
                None => None,
            };
            tensor[a][b] = coords.ok_or_else(|| Error::Precondition("bracket outside the Lyndon span".into()))?;
        }
    }
    let ring = RingPresentation::new(Carrier::vector(q, k), tensor)?;
    Ok((verify_nilpotent_lie(&ring)?, polys.into_iter().map(|(_, n)| n).collect()))
}

/// Coefficients of `log(eˣeʸ)` on the Lyndon basis of the free nilpotent algebra on `x, y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BchTable {
    pub class: usize,
    pub entries: Vec<(String, Rational)>,
}

pub fn bch_table(class: usize) -> Result<&'static BchTable> {
    static TABLES: [OnceLock<BchTable>; MAX_CLASS + 1] = [const { OnceLock::new() }; MAX_CLASS + 1];
    if class == 0 || class > MAX_CLASS {
        return Err(Error::ClassTooLarge { class, cap: MAX_CLASS });
    }
    if let Some(t) = TABLES[class].get() {
        return Ok(t);
    }
    let (l, names) = free_nilpotent(2, class)?;
    let q = Domain::Rationals;
    let k = l.dim();
    let z = bch(&l, &vec_ops::unit(&q, k, 0), &vec_ops::unit(&q, k, 1), class)?;
    let entries = names
        .into_iter()
        .zip(z)
        .filter_map(|(n, c)| match c {
            Scalar::Rat(r) if !r.is_zero() => Some((n, r)),
            _ => None,
        })
        .collect();
    Ok(TABLES[class].get_or_init(|| BchTable { class, entries }))
}

impl BchTable {
    pub fn coefficient(&self, bracket: &str) -> Rational {
        self.entries.iter().find(|(n, _)| n == bracket).map_or_else(Rational::zero, |(_, c)| c.clone())
    }
}
