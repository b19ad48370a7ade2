//! Rings given by structure constants on a carrier, not necessarily associative or unital.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::abelian::{divisible_bounded_split, AdaptedBasis, Carrier, Submodule};
use crate::artinian::{
    field_of_representatives, j_series, local_decomposition, JSeriesReport, LocalFactor, ResiduePolicy,
};
use crate::bilinear::{BilinearMap, Width, WidthCertificate};
use crate::error::{Error, Result};
use crate::finite;
use crate::kernel::{poly_factor, vec_ops, Domain, Matrix, Poly, Scalar, Subspace, Vector};
use crate::scalars::{a_of_r, ScalarRingReport};

/// Largest number of argument tuples enumerated for an exact verbal width.
pub const VERBAL_ENUMERATION_LIMIT: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RingFlags {
    pub associative: bool,
    pub commutative: bool,
    pub lie: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    mult: BilinearMap,
    flags: RingFlags,
}

impl RingPresentation {
    pub fn new(carrier: Carrier, tensor: Vec<Vec<Vector>>) -> Result<RingPresentation> {
        RingPresentation::from_map(BilinearMap::new(carrier.clone(), carrier, tensor)?)
    }

    pub fn from_map(mult: BilinearMap) -> Result<RingPresentation> {
        if mult.source() != mult.target() {
            return Err(Error::Validation("a ring multiplication maps R × R into R".into()));
        }
        let flags = compute_flags(&mult);
        Ok(RingPresentation { mult, flags })
    }

    pub fn zero(carrier: Carrier) -> RingPresentation {
        RingPresentation::from_map(BilinearMap::zero(carrier.clone(), carrier)).expect("zero multiplication")
    }

    pub fn carrier(&self) -> &Carrier {
        self.mult.source()
    }

    pub fn multiplication(&self) -> &BilinearMap {
        &self.mult
    }

    pub fn flags(&self) -> RingFlags {
        self.flags
    }

    pub fn dim(&self) -> usize {
        self.carrier().dim()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        self.mult.eval(x, y)
    }

    pub fn is_zero_multiplication(&self) -> bool {
        let c = self.carrier();
        self.mult.tensor().iter().flatten().all(|v| c.is_zero(v))
    }

    pub fn direct_sum(&self, other: &RingPresentation) -> Result<RingPresentation> {
        RingPresentation::from_map(self.mult.direct_sum(&other.mult)?)
    }

    /// The subring on a submodule closed under multiplication, in adapted coordinates.
    pub fn restrict(&self, sub: &Submodule) -> Result<(RingPresentation, AdaptedBasis)> {
        let basis = sub.adapted()?;
        let ring = RingPresentation::from_map(self.mult.restrict(&basis, &basis)?)?;
        Ok((ring, basis))
    }

    pub fn annihilator(&self) -> Result<Submodule> {
        self.mult.two_sided_kernel()
    }

    /// `R²`: the span of all products; it is already an ideal.
    pub fn square_ideal(&self) -> Result<Submodule> {
        self.ideal_closure(self.mult.tensor().iter().flatten().cloned().collect())
    }

    /// The ideal generated by `gens`.
    pub fn ideal_closure(&self, gens: Vec<Vector>) -> Result<Submodule> {
        let c = self.carrier();
        let mut current = c.span(&gens)?;
        loop {
            let mut more = current.generators();
            for g in current.generators() {
                for i in 0..self.dim() {
                    let b = c.unit(i);
                    more.push(self.mul(&g, &b));
                    more.push(self.mul(&b, &g));
                }
            }
            let next = c.span(&more)?;
            if next == current {
                return Ok(current);
            }
            current = next;
        }
    }

    pub fn is_regular(&self) -> Result<bool> {
        Ok(self.square_ideal()?.contains_submodule(&self.annihilator()?))
    }
}

fn compute_flags(mult: &BilinearMap) -> RingFlags {
    let c = mult.source();
    let n = c.dim();
    let t = mult.tensor();
    let eq = |a: &[Scalar], b: &[Scalar]| c.is_zero(&c.sub(a, b));
    let mut associative = true;
    let mut commutative = true;
    let mut lie = true;
    for i in 0..n {
        if !c.is_zero(&t[i][i]) {
            lie = false;
        }
        for j in 0..n {
            if !eq(&t[i][j], &t[j][i]) {
                commutative = false;
            }
            if !c.is_zero(&c.add(&t[i][j], &t[j][i])) {
                lie = false;
            }
            for k in 0..n {
                let bk = c.unit(k);
                let bi = c.unit(i);
                let left = mult.eval(&t[i][j], &bk);
                let right = mult.eval(&bi, &t[j][k]);
                if !eq(&left, &right) {
                    associative = false;
                }
                if lie {
                    // (bᵢ, (bⱼ, bₖ)) + (bⱼ, (bₖ, bᵢ)) + (bₖ, (bᵢ, bⱼ))
                    let bj = c.unit(j);
                    let s = c.add(&c.add(&right, &mult.eval(&bj, &t[k][i])), &mult.eval(&bk, &t[i][j]));
                    if !c.is_zero(&s) {
                        lie = false;
                    }
                }
            }
        }
    }
    RingFlags { associative, commutative, lie }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ring on {}", self.carrier())
    }
}

/// A multiplication-only word, such as `(x*y)*z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Var(usize),
    Mul(Box<Word>, Box<Word>),
}

impl Word {
    /// Parses `*`-products of identifiers and parentheses; `*` associates to the left.
    /// Variables are numbered by first appearance.
    pub fn parse(text: &str) -> Result<(Word, Vec<String>)> {
        let tokens = tokenize(text)?;
        let mut names = Vec::new();
        let mut pos = 0;
        let w = parse_product(&tokens, &mut pos, &mut names)?;
        if pos != tokens.len() {
            return Err(Error::Validation(format!("unexpected token {:?} in word {text:?}", tokens[pos])));
        }
        Ok((w, names))
    }

    pub fn arity(&self) -> usize {
        match self {
            Word::Var(i) => i + 1,
            Word::Mul(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn occurrences(&self, var: usize) -> usize {
        match self {
            Word::Var(i) => usize::from(*i == var),
            Word::Mul(a, b) => a.occurrences(var) + b.occurrences(var),
        }
    }

    pub fn is_multilinear(&self) -> bool {
        (0..self.arity()).all(|v| self.occurrences(v) == 1)
    }

    pub fn eval(&self, ring: &RingPresentation, args: &[Vector]) -> Vector {
        match self {
            Word::Var(i) => args[*i].clone(),
            Word::Mul(a, b) => ring.mul(&a.eval(ring, args), &b.eval(ring, args)),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Var(i) => write!(f, "x{}", i + 1),
            Word::Mul(a, b) => {
                let wrap = |w: &Word| match w {
                    Word::Var(_) => w.to_string(),
                    _ => format!("({w})"),
                };
                write!(f, "{}*{}", wrap(a), wrap(b))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Star,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            ' ' | '\t' => {
                chars.next();
            }
            '*' | '·' => {
                chars.next();
                out.push(Token::Star);
            }
            '(' => {
                chars.next();
                out.push(Token::Open);
            }
            ')' => {
                chars.next();
                out.push(Token::Close);
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(name));
            }
            other => return Err(Error::Validation(format!("unexpected character {other:?} in word {text:?}"))),
        }
    }
    Ok(out)
}

fn parse_product(tokens: &[Token], pos: &mut usize, names: &mut Vec<String>) -> Result<Word> {
    let mut left = parse_atom(tokens, pos, names)?;
    while tokens.get(*pos) == Some(&Token::Star) {
        *pos += 1;
        let right = parse_atom(tokens, pos, names)?;
        left = Word::Mul(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_atom(tokens: &[Token], pos: &mut usize, names: &mut Vec<String>) -> Result<Word> {
    match tokens.get(*pos) {
        Some(Token::Ident(name)) => {
            *pos += 1;
            let idx = names.iter().position(|n| n == name).unwrap_or_else(|| {
                names.push(name.clone());
                names.len() - 1
            });
            Ok(Word::Var(idx))
        }
        Some(Token::Open) => {
            *pos += 1;
            let w = parse_product(tokens, pos, names)?;
            if tokens.get(*pos) != Some(&Token::Close) {
                return Err(Error::Validation("unbalanced parentheses in word".into()));
            }
            *pos += 1;
            Ok(w)
        }
        other => Err(Error::Validation(format!("expected a variable or '(' but found {other:?}"))),
    }
}

/// The verbal ideal of a word, the additive span of its values, and the width of that span.
#[derive(Clone, Debug)]
pub struct VerbalIdeal {
    pub ideal: Submodule,
    pub values: Submodule,
    /// `None` when no bound is available (infinite field, every variable repeated).
    pub width: Option<Width>,
}

pub fn verbal_ideal(ring: &RingPresentation, word: &Word, search_bound: usize) -> Result<VerbalIdeal> {
    let c = ring.carrier().clone();
    let n = ring.dim();
    let m = word.arity();
    let value_gens: Vec<Vector> = match &c {
        Carrier::Vector { field, .. } if !word.is_multilinear() => expanded_coefficients(ring, word, field)?,
        Carrier::Abelian(_) if !word.is_multilinear() => {
            return Err(Error::UnsupportedDomain { op: "verbal_ideal with repeated variables", domain: c.to_string() })
        }
        _ => {
            // multilinear: values on basis tuples span all values
            let mut gens = Vec::new();
            let mut idx = vec![0usize; m];
            loop {
                let args: Vec<Vector> = idx.iter().map(|&i| c.unit(i)).collect();
                gens.push(word.eval(ring, &args));
                let mut k = 0;
                while k < m {
                    idx[k] += 1;
                    if idx[k] < n {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == m || n == 0 {
                    break;
                }
            }
            gens
        }
    };
    let values = c.span(&value_gens)?;
    let ideal = ring.ideal_closure(values.generators())?;
    let width = verbal_width(ring, word, &values, search_bound)?;
    Ok(VerbalIdeal { ideal, values, width })
}

type Monomial = Vec<(usize, u64)>;

/// Substitutes `xᵢ = Σₖ tᵢₖ bₖ` and collects the vector coefficient of every monomial in `t`.
/// Over a finite field with `q` elements, exponents are reduced using `t^q = t`.
fn expanded_coefficients(ring: &RingPresentation, word: &Word, field: &Domain) -> Result<Vec<Vector>> {
    let n = ring.dim();
    let q = field.size();
    fn expand(ring: &RingPresentation, w: &Word, n: usize, q: Option<u64>) -> BTreeMap<Monomial, Vector> {
        match w {
            Word::Var(i) => (0..n).map(|k| (vec![(i * n + k, 1u64)], ring.carrier().unit(k))).collect(),
            Word::Mul(a, b) => {
                let (ea, eb) = (expand(ring, a, n, q), expand(ring, b, n, q));
                let c = ring.carrier();
                let mut out: BTreeMap<Monomial, Vector> = BTreeMap::new();
                for (ma, va) in &ea {
                    for (mb, vb) in &eb {
                        let v = ring.mul(va, vb);
                        if c.is_zero(&v) {
                            continue;
                        }
                        let mut exps: BTreeMap<usize, u64> = ma.iter().copied().collect();
                        for &(var, e) in mb {
                            *exps.entry(var).or_default() += e;
                        }
                        let mono: Monomial =
                            exps.into_iter().map(|(var, e)| (var, q.map_or(e, |q| (e - 1) % (q - 1) + 1))).collect();
                        let slot = out.entry(mono).or_insert_with(|| c.zero());
                        *slot = c.add(slot, &v);
                    }
                }
                out
            }
        }
    }
    Ok(expand(ring, word, n, q).into_values().collect())
}

fn verbal_width(
    ring: &RingPresentation,
    word: &Word,
    values: &Submodule,
    search_bound: usize,
) -> Result<Option<Width>> {
    let c = ring.carrier();
    if values.is_zero() {
        return Ok(Some(Width::Exact(0)));
    }
    let m = word.arity() as u32;
    if let Some(size) = finite::carrier_size(c) {
        if size.checked_pow(m).is_some_and(|t| t <= VERBAL_ENUMERATION_LIMIT) {
            let elements = finite::elements(c, size)?;
            let mut set: HashSet<Vector> = HashSet::new();
            let mut idx = vec![0usize; m as usize];
            loop {
                let args: Vec<Vector> = idx.iter().map(|&i| elements[i].clone()).collect();
                set.insert(word.eval(ring, &args));
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < elements.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
            set.insert(c.zero());
            let target = finite::submodule_size(values).expect("finite carrier");
            return Ok(Some(Width::Exact(finite::sumset_width(&set, c, target, search_bound)?)));
        }
    }
    // a variable occurring once makes the values closed under scaling
    let Some(linear) = (0..word.arity()).find(|&v| word.occurrences(v) == 1) else { return Ok(None) };
    if c.field().is_some() && values.dim() == 1 {
        return Ok(Some(Width::Exact(1)));
    }
    Ok(Some(Width::UpperBound {
        bound: values.dim(),
        certificate: WidthCertificate::ScaledValues { variable: linear },
    }))
}

/// `R = R_F × R₀` with `R₀ ≤ Ann(R)` complementing `Δ(R) = Ann(R) ∩ R²`.
#[derive(Clone, Debug)]
pub struct FoundationAddition {
    pub annihilator: Submodule,
    pub square: Submodule,
    pub delta: Submodule,
    pub foundation: Submodule,
    pub addition: Submodule,
    pub foundation_ring: RingPresentation,
    pub foundation_basis: AdaptedBasis,
    pub addition_ring: RingPresentation,
    pub addition_basis: AdaptedBasis,
}

pub fn foundation_addition(ring: &RingPresentation) -> Result<FoundationAddition> {
    let c = ring.carrier().clone();
    let annihilator = ring.annihilator()?;
    let square = ring.square_ideal()?;
    let delta = annihilator.intersection(&square)?;
    let addition_gens = annihilator
        .complement_of(&delta)?
        .ok_or_else(|| Error::NoSplit("Δ(R) = Ann(R) ∩ R² has no complement in Ann(R)".into()))?;
    let addition = c.span(&addition_gens)?;
    let rest = square.sum(&annihilator)?;
    let mut foundation_gens =
        c.whole()?.complement_of(&rest)?.ok_or_else(|| Error::NoSplit("Ann(R) + R² has no complement in R".into()))?;
    foundation_gens.extend(square.generators());
    let foundation = c.span(&foundation_gens)?;
    let (foundation_ring, foundation_basis) = ring.restrict(&foundation)?;
    let (addition_ring, addition_basis) = ring.restrict(&addition)?;
    Ok(FoundationAddition {
        annihilator,
        square,
        delta,
        foundation,
        addition,
        foundation_ring,
        foundation_basis,
        addition_ring,
        addition_basis,
    })
}

fn field_subspace(s: Submodule) -> Subspace {
    match s {
        Submodule::Field(s) => s,
        Submodule::Lattice { .. } => unreachable!("field carrier"),
    }
}

/// The action of a field of representatives on a component, for residue degree above one.
#[derive(Clone, Debug)]
pub struct Enrichment {
    /// Minimal polynomial of the generator over the base.
    pub minpoly: Poly,
    /// The generator acting on the component basis.
    pub action: Matrix,
    /// `s(xy) = (sx)y = x(sy)` on all basis pairs.
    pub compatible: bool,
    /// `minpoly(s) = 0` as an operator.
    pub satisfies_minpoly: bool,
}

/// An indecomposable factor `R_i` of the foundation.
#[derive(Clone, Debug)]
pub struct RingComponent {
    pub ring: RingPresentation,
    /// Basis of `R_i` in the input coordinates.
    pub basis: Vec<Vector>,
    /// The local factor `A_i` of `A(R)` cutting out this component.
    pub scalar_factor: LocalFactor,
    pub residue_field: Domain,
    pub residue_degree: usize,
    pub j_series: JSeriesReport,
    pub dim_over_residue: usize,
    pub enrichment: Option<Enrichment>,
}

impl RingComponent {
    /// The component as an algebra over its residue field `k`, with `k` acting through the
    /// enrichment. Returns the ring and its `k`-basis in component coordinates.
    pub fn over_residue_field(&self) -> Result<(RingPresentation, Vec<Vector>)> {
        let d = self.ring.carrier().require_field("over_residue_field")?.clone();
        let k = self.residue_field.clone();
        let n = self.ring.dim();
        let Some(enr) = &self.enrichment else {
            let tensor = self
                .ring
                .multiplication()
                .tensor()
                .iter()
                .map(|row| row.iter().map(|v| v.iter().map(|c| prime_into(&k, c)).collect()).collect())
                .collect();
            let basis = (0..n).map(|i| vec_ops::unit(&d, n, i)).collect();
            return Ok((RingPresentation::new(Carrier::vector(k, n), tensor)?, basis));
        };
        if !enr.compatible || !enr.satisfies_minpoly {
            return Err(Error::Precondition("the residue field action is not an enrichment of the component".into()));
        }
        let deg = self.residue_degree;
        let mut cyclic: Vec<Vector> = Vec::new();
        let mut rational_basis: Vec<Vector> = Vec::new();
        for i in 0..n {
            let e = vec_ops::unit(&d, n, i);
            if Subspace::span(d.clone(), n, &rational_basis)?.contains(&e) {
                continue;
            }
            let mut v = e.clone();
            for _ in 0..deg {
                rational_basis.push(v.clone());
                v = enr.action.apply(&v);
            }
            cyclic.push(e);
        }
        let change = Matrix::from_columns(d.clone(), n, &rational_basis).inverse()?.ok_or_else(|| {
            Error::Precondition("the cyclic vectors are not independent over the residue field".into())
        })?;
        let m = cyclic.len();
        let mut tensor = vec![vec![Vec::new(); m]; m];
        for a in 0..m {
            for b in 0..m {
                let c = change.apply(&self.ring.mul(&cyclic[a], &cyclic[b]));
                tensor[a][b] =
                    (0..m).map(|i| k.ext_element(c[i * deg..(i + 1) * deg].to_vec())).collect::<Result<Vec<_>>>()?;
            }
        }
        Ok((RingPresentation::new(Carrier::vector(k, m), tensor)?, cyclic))
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub components: Vec<RingComponent>,
    pub addition: RingPresentation,
    /// Basis of `R₀` in the input coordinates.
    pub addition_basis: Vec<Vector>,
    /// `A(R)`; absent for zero multiplication.
    pub scalars: Option<ScalarRingReport>,
    pub annihilator: Subspace,
    pub square: Subspace,
    pub delta: Subspace,
}

/// `R ≅ R₁ × ⋯ × Rₙ × R₀` over a field of characteristic zero.
pub fn decompose_char0(ring: &RingPresentation, policy: ResiduePolicy, seed: u64) -> Result<DecompositionReport> {
    let d = ring.carrier().require_field("decompose_char0")?.clone();
    if d.characteristic() != 0 {
        return Err(Error::UnsupportedDomain { op: "decompose_char0", domain: d.to_string() });
    }
    split_by_scalars(ring, policy, seed)
}

fn split_by_scalars(ring: &RingPresentation, policy: ResiduePolicy, seed: u64) -> Result<DecompositionReport> {
    let d = ring.carrier().require_field("ring decomposition")?.clone();
    let n = ring.dim();
    let annihilator = field_subspace(ring.annihilator()?);
    let square = field_subspace(ring.square_ideal()?);
    let delta = annihilator.intersection(&square)?;
    let addition_basis = Submodule::Field(annihilator.clone())
        .complement_of(&Submodule::Field(delta.clone()))?
        .expect("complements exist over a field");
    let addition = RingPresentation::zero(Carrier::vector(d.clone(), addition_basis.len()));
    if square.is_zero() {
        return Ok(DecompositionReport {
            components: Vec::new(),
            addition,
            addition_basis,
            scalars: None,
            annihilator,
            square,
            delta,
        });
    }
    let scalars = a_of_r(ring)?;
    let algebra = scalars.algebra()?;
    let factors = local_decomposition(&algebra, policy, seed)?;
    let eta = annihilator.quotient_map();
    let free = annihilator.free_columns();
    let k = free.len();
    let lift = |x: &[Scalar]| -> Vector {
        let mut v = vec_ops::zero(&d, n);
        for (a, &col) in free.iter().enumerate() {
            v[col] = x[a].clone();
        }
        v
    };
    let image = &scalars.image_basis;
    let mut components = Vec::with_capacity(factors.len());
    for factor in factors {
        let e = scalars.p_basis.combination(&factor.idempotent);
        let rho = combine_actions(&d, &scalars.action_on_image, &factor.idempotent, image.len());
        let block = e.image()?;
        let square_part: Vec<Vector> =
            (0..image.len()).map(|t| vec_ops::combination(&d, n, &rho.column(t), image)).collect();
        let square_part = Subspace::span(d.clone(), n, &square_part)?;
        let eta_square: Vec<Vector> = square_part.basis().iter().map(|z| eta.apply(z)).collect();
        let top = Submodule::Field(block.clone())
            .complement_of(&Submodule::Field(Subspace::span(d.clone(), k, &eta_square)?))?
            .expect("complements exist over a field");
        let mut gens: Vec<Vector> = top.iter().map(|c| lift(c)).collect();
        gens.extend(square_part.basis().iter().cloned());
        let span = Subspace::span(d.clone(), n, &gens)?;
        let basis = span.basis().to_vec();
        let component_ring = restrict_to_basis(ring, &span)?;
        let rep = field_of_representatives(&factor)?;
        let residue_degree = factor.residue.degree();
        let enrichment = if residue_degree > 1 {
            let s_ambient = vec_ops::combination(&d, algebra.dim(), &rep.generator, &factor.embedding);
            let s = scalars.p_basis.combination(&s_ambient);
            let rho_s = combine_actions(&d, &scalars.action_on_image, &s_ambient, image.len());
            Some(enrich(
                ring,
                &component_ring,
                &span,
                &top,
                &square_part,
                &s,
                &rho_s,
                &scalars,
                &lift,
                &eta,
                &factor.residue.minpoly,
            )?)
        } else {
            None
        };
        components.push(RingComponent {
            dim_over_residue: basis.len() / residue_degree,
            j_series: j_series(&factor)?,
            residue_field: factor.residue.field.clone(),
            residue_degree,
            ring: component_ring,
            basis,
            scalar_factor: factor,
            enrichment,
        });
    }
    Ok(DecompositionReport { components, addition, addition_basis, scalars: Some(scalars), annihilator, square, delta })
}

fn combine_actions(d: &Domain, actions: &[Matrix], coeffs: &[Scalar], size: usize) -> Matrix {
    coeffs.iter().zip(actions).fold(Matrix::zeros(d.clone(), size, size), |acc, (c, r)| acc.add(&r.scale(c)))
}

/// Structure constants of the subring spanned by the echelon basis of `span`.
fn restrict_to_basis(ring: &RingPresentation, span: &Subspace) -> Result<RingPresentation> {
    let d = span.domain().clone();
    let basis = span.basis();
    let k = basis.len();
    let mut tensor = vec![vec![Vec::new(); k]; k];
    for a in 0..k {
        for b in 0..k {
            tensor[a][b] = span
                .coordinates(&ring.mul(&basis[a], &basis[b]))
                .ok_or_else(|| Error::Precondition("component is not closed under multiplication".into()))?;
        }
    }
    RingPresentation::new(Carrier::vector(d, k), tensor)
}

#[allow(clippy::too_many_arguments)]
fn enrich(
    ring: &RingPresentation,
    component: &RingPresentation,
    span: &Subspace,
    top: &[Vector],
    square_part: &Subspace,
    s: &Matrix,
    rho_s: &Matrix,
    scalars: &ScalarRingReport,
    lift: &dyn Fn(&[Scalar]) -> Vector,
    eta: &Matrix,
    minpoly: &Poly,
) -> Result<Enrichment> {
    let d = span.domain().clone();
    let n = ring.dim();
    let image_space = Subspace::span(d.clone(), n, &scalars.image_basis)?;
    // s·lift(c) = lift(c') + z where s(c) = c' + η(z), z ∈ e·R²
    let eta_cols: Vec<Vector> = square_part.basis().iter().map(|z| eta.apply(z)).collect();
    let mut columns: Vec<Vector> = top.to_vec();
    columns.extend(eta_cols);
    let solver = Matrix::from_columns(d.clone(), eta.rows(), &columns);
    let act = |v: &[Scalar]| -> Result<Vector> {
        // v = lift(x) + z with x in the top part and z in e·R²
        let x = eta.apply(v);
        let c = solver.solve(&x)?.ok_or_else(|| Error::Precondition("element outside the component".into()))?;
        let top_part = vec_ops::combination(&d, eta.rows(), &c[..top.len()], top);
        let z = vec_ops::sub(&d, v, &lift(&top_part));
        let acted_top = solver
            .solve(&s.apply(&top_part))?
            .ok_or_else(|| Error::Precondition("scalar action leaves the block".into()))?;
        let new_top = lift(&vec_ops::combination(&d, eta.rows(), &acted_top[..top.len()], top));
        let new_square = vec_ops::combination(&d, n, &acted_top[top.len()..], square_part.basis());
        let z_coords = image_space.coordinates(&z).ok_or_else(|| Error::Precondition("remainder outside R²".into()))?;
        let z_acted = vec_ops::combination(&d, n, &rho_s.apply(&z_coords), &scalars.image_basis);
        Ok(vec_ops::add(&d, &vec_ops::add(&d, &new_top, &new_square), &z_acted))
    };
    let basis = span.basis();
    let cols: Vec<Vector> = basis
        .iter()
        .map(|b| act(b).map(|v| span.coordinates(&v).expect("action stays in the component")))
        .collect::<Result<_>>()?;
    let action = Matrix::from_columns(d.clone(), basis.len(), &cols);
    let k = basis.len();
    let mut compatible = true;
    for a in 0..k {
        for b in 0..k {
            let xy = component.multiplication().entry(a, b).clone();
            let lhs = action.apply(&xy);
            let ea = vec_ops::unit(&d, k, a);
            let eb = vec_ops::unit(&d, k, b);
            let mid = component.mul(&action.apply(&ea), &eb);
            let rhs = component.mul(&ea, &action.apply(&eb));
            if lhs != mid || mid != rhs {
                compatible = false;
            }
        }
    }
    let mut acc = Matrix::zeros(d.clone(), k, k);
    for c in minpoly.coeffs().iter().rev() {
        acc = acc.mul(&action).add(&Matrix::identity(d.clone(), k).scale(c));
    }
    Ok(Enrichment { minpoly: minpoly.clone(), action, compatible, satisfies_minpoly: acc.is_zero() })
}

impl DecompositionReport {
    /// The product tensor of `R₁ × ⋯ × Rₙ × R₀` carried back through the recorded bases.
    pub fn reassemble(&self, carrier: &Carrier) -> Result<Vec<Vec<Vector>>> {
        let mut blocks: Vec<(&[Vector], &RingPresentation)> =
            self.components.iter().map(|c| (c.basis.as_slice(), &c.ring)).collect();
        blocks.push((self.addition_basis.as_slice(), &self.addition));
        reassemble_blocks(carrier, &blocks)
    }

    pub fn reassembles(&self, ring: &RingPresentation) -> Result<bool> {
        Ok(self.reassemble(ring.carrier())? == ring.multiplication().tensor())
    }

    /// All products between distinct components (and with `R₀`) vanish.
    pub fn cross_products_vanish(&self, ring: &RingPresentation) -> bool {
        let mut blocks: Vec<&[Vector]> = self.components.iter().map(|c| c.basis.as_slice()).collect();
        blocks.push(&self.addition_basis);
        let c = ring.carrier();
        for (i, a) in blocks.iter().enumerate() {
            for (j, b) in blocks.iter().enumerate() {
                if i != j && a.iter().any(|x| b.iter().any(|y| !c.is_zero(&ring.mul(x, y)))) {
                    return false;
                }
            }
        }
        true
    }
}

fn reassemble_blocks(carrier: &Carrier, blocks: &[(&[Vector], &RingPresentation)]) -> Result<Vec<Vec<Vector>>> {
    let d = carrier.require_field("reassemble")?.clone();
    let n = carrier.dim();
    let all: Vec<Vector> = blocks.iter().flat_map(|(b, _)| b.iter().cloned()).collect();
    let change = Matrix::from_columns(d.clone(), n, &all)
        .inverse()?
        .ok_or_else(|| Error::Precondition("recorded bases do not form a basis of R".into()))?;
    let mut out = vec![vec![vec_ops::zero(&d, n); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        let ci = change.apply(&vec_ops::unit(&d, n, i));
        for (j, slot) in row.iter_mut().enumerate() {
            let cj = change.apply(&vec_ops::unit(&d, n, j));
            let mut offset = 0;
            let mut acc = vec_ops::zero(&d, n);
            for (basis, ring) in blocks {
                let k = basis.len();
                let value = ring.mul(&ci[offset..offset + k], &cj[offset..offset + k]);
                acc = vec_ops::add(&d, &acc, &vec_ops::combination(&d, n, &value, basis));
                offset += k;
            }
            *slot = acc;
        }
    }
    Ok(out)
}

/// `R = R_D ∗ R_C` for a ring on a divisible ⊕ bounded carrier.
#[derive(Clone, Debug)]
pub struct CentralSplit {
    pub divisible: RingPresentation,
    pub bounded: RingPresentation,
    pub divisible_indices: Vec<usize>,
    pub bounded_indices: Vec<usize>,
    /// Every product between the two blocks is zero.
    pub mutually_annihilating: bool,
    /// `|R_D ∩ R_C|`; the blocks are formal summands, so this is 1.
    pub intersection_order: u64,
}

pub fn central_split_mixed(ring: &RingPresentation) -> Result<CentralSplit> {
    let c = ring.carrier();
    let (div, bnd): (Vec<usize>, Vec<usize>) = match c {
        Carrier::Vector { field, dim } => {
            if field.characteristic() == 0 {
                ((0..*dim).collect(), Vec::new())
            } else {
                (Vec::new(), (0..*dim).collect())
            }
        }
        Carrier::Abelian(desc) => {
            let s = divisible_bounded_split(desc)?;
            (s.divisible_indices, s.bounded_indices)
        }
    };
    let t = ring.multiplication().tensor();
    let mutually_annihilating = div.iter().all(|&i| bnd.iter().all(|&j| c.is_zero(&t[i][j]) && c.is_zero(&t[j][i])));
    let block = |idx: &[usize]| -> Result<RingPresentation> {
        let carrier = match c {
            Carrier::Vector { field, .. } => Carrier::vector(field.clone(), idx.len()),
            Carrier::Abelian(desc) => {
                Carrier::over(&Domain::Integers, idx.len(), Some(desc.select(idx).summands().to_vec()))?
            }
        };
        let tensor = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| idx.iter().map(|&k| t[i][j][k].clone()).collect()).collect())
            .collect();
        RingPresentation::new(carrier, tensor)
    };
    Ok(CentralSplit {
        divisible: block(&div)?,
        bounded: block(&bnd)?,
        divisible_indices: div,
        bounded_indices: bnd,
        mutually_annihilating,
        intersection_order: 1,
    })
}

/// One central factor `R_i` of a ring over a finite field.
#[derive(Clone, Debug)]
pub struct QuasiAlgebraFactor {
    /// Basis of `R_i` (which contains `Ann(R)`) in input coordinates.
    pub basis: Vec<Vector>,
    pub ring: RingPresentation,
    pub scalar_factor: LocalFactor,
    pub residue_field: Domain,
}

#[derive(Clone, Debug)]
pub struct BoundedDecomposition {
    pub factors: Vec<QuasiAlgebraFactor>,
    pub annihilator: Subspace,
    pub scalars: ScalarRingReport,
    /// `R_i R_j = 0` for `i ≠ j`.
    pub mutually_annihilating: bool,
}

/// `R = R₁ ∗ ⋯ ∗ Rₙ` as a central product of quasi-algebras over a finite field.
pub fn decompose_bounded(ring: &RingPresentation, policy: ResiduePolicy, seed: u64) -> Result<BoundedDecomposition> {
    let d = ring.carrier().require_field("decompose_bounded")?.clone();
    if d.size().is_none() {
        return Err(Error::UnsupportedDomain { op: "decompose_bounded", domain: d.to_string() });
    }
    if ring.is_zero_multiplication() {
        return Err(Error::DegenerateInput("R² = 0; nothing to decompose".into()));
    }
    let n = ring.dim();
    let annihilator = field_subspace(ring.annihilator()?);
    let scalars = a_of_r(ring)?;
    let algebra = scalars.algebra()?;
    let free = annihilator.free_columns();
    let mut factors = Vec::new();
    for factor in local_decomposition(&algebra, policy, seed)? {
        let e = scalars.p_basis.combination(&factor.idempotent);
        let mut gens: Vec<Vector> = e
            .image()?
            .basis()
            .iter()
            .map(|x| {
                let mut v = vec_ops::zero(&d, n);
                for (a, &col) in free.iter().enumerate() {
                    v[col] = x[a].clone();
                }
                v
            })
            .collect();
        gens.extend(annihilator.basis().iter().cloned());
        let span = Subspace::span(d.clone(), n, &gens)?;
        let sub_ring = restrict_to_basis(ring, &span)?;
        factors.push(QuasiAlgebraFactor {
            basis: span.basis().to_vec(),
            ring: sub_ring,
            residue_field: factor.residue.field.clone(),
            scalar_factor: factor,
        });
    }
    let c = ring.carrier();
    let mutually_annihilating = factors.iter().enumerate().all(|(i, a)| {
        factors
            .iter()
            .enumerate()
            .all(|(j, b)| i == j || a.basis.iter().all(|x| b.basis.iter().all(|y| c.is_zero(&ring.mul(x, y)))))
    });
    Ok(BoundedDecomposition { factors, annihilator, scalars, mutually_annihilating })
}

/// `U₀ ⊗_{k₀} K` for a component with structure constants in `k₀`.
#[derive(Clone, Debug)]
pub struct ModelConstruction {
    /// Basis adapted to `R ⊇ R² ⊇ R³ ⊇ ⋯` (deepest layer first), in input coordinates.
    pub special_basis: Vec<Vector>,
    /// The field generated by the structure constants in the special basis.
    pub k0: Domain,
    pub k0_degree: usize,
    pub model: RingPresentation,
}

pub fn model_construct(component: &RingPresentation, target: &Domain) -> Result<ModelConstruction> {
    let k = component.carrier().require_field("model_construct")?.clone();
    target.require_field()?;
    if k.characteristic() != target.characteristic() {
        return Err(Error::ExtensionNotOverK0(format!("{target} has a different characteristic from {k}")));
    }
    let n = component.dim();
    let special_basis = power_filtration_basis(component)?;
    let change = Matrix::from_columns(k.clone(), n, &special_basis).inverse()?.expect("special basis spans R");
    let constants: Vec<Vec<Vector>> = (0..n)
        .map(|a| (0..n).map(|b| change.apply(&component.mul(&special_basis[a], &special_basis[b]))).collect())
        .collect();
    let flat: Vec<Scalar> = constants.iter().flatten().flatten().cloned().collect();
    let (k0, k0_degree) = generated_subfield(&k, &flat)?;
    let map = scalar_map(&k, k0_degree, target)?;
    let tensor: Vec<Vec<Vector>> =
        constants.iter().map(|row| row.iter().map(|v| v.iter().map(&map).collect()).collect()).collect();
    let model = RingPresentation::new(Carrier::vector(target.clone(), n), tensor)?;
    Ok(ModelConstruction { special_basis, k0, k0_degree, model })
}

/// Basis of `R` extending bases of `Rᶜ ⊆ ⋯ ⊆ R² ⊆ R`, deepest layer first.
fn power_filtration_basis(ring: &RingPresentation) -> Result<Vec<Vector>> {
    let k = ring.carrier().require_field("special basis")?.clone();
    let n = ring.dim();
    let mut powers = vec![Subspace::full(k.clone(), n)];
    loop {
        let last = powers.last().unwrap();
        let mut gens = Vec::new();
        for x in last.basis() {
            for i in 0..n {
                let b = vec_ops::unit(&k, n, i);
                gens.push(ring.mul(x, &b));
                gens.push(ring.mul(&b, x));
            }
        }
        let next = Subspace::span(k.clone(), n, &gens)?;
        if next == *last {
            break;
        }
        let stop = next.is_zero();
        powers.push(next);
        if stop {
            break;
        }
    }
    let mut basis: Vec<Vector> = Vec::new();
    for layer in powers.iter().rev() {
        basis = layer.extend_basis(&basis)?;
    }
    Ok(basis)
}

/// The subfield of `k` generated by `values` over the prime field, and its degree.
fn generated_subfield(k: &Domain, values: &[Scalar]) -> Result<(Domain, usize)> {
    let Some(ext) = k.as_extension() else { return Ok((k.clone(), 1)) };
    let base = ext.base().clone();
    let deg = ext.degree();
    let coords = |x: &Scalar| -> Vector {
        match x {
            Scalar::Ext(c) => c.clone(),
            other => {
                let mut v = vec![base.zero(); deg];
                v[0] = other.clone();
                v
            }
        }
    };
    let mut elems = vec![k.one()];
    let mut space = Subspace::span(base.clone(), deg, &[coords(&k.one())])?;
    let mut frontier: Vec<Scalar> = values.to_vec();
    while let Some(v) = frontier.pop() {
        let products: Vec<Scalar> = elems.iter().map(|e| k.mul(e, &v)).chain([v.clone()]).collect();
        for p in products {
            if !space.contains(&coords(&p)) {
                space = space.sum(&Subspace::span(base.clone(), deg, &[coords(&p)])?)?;
                elems.push(p.clone());
                frontier.push(p);
            }
        }
    }
    let dim = space.dim();
    Ok((if dim == 1 { base } else { k.clone() }, dim))
}

/// A prime-field scalar read in another field of the same characteristic.
fn prime_into(target: &Domain, c: &Scalar) -> Scalar {
    match c {
        Scalar::Rat(q) => target.from_rational(q).expect("characteristic 0 target"),
        Scalar::Mod(m) => target.from_i64(*m as i64),
        other => target.embed(other.clone()),
    }
}

fn scalar_map(k: &Domain, k0_degree: usize, target: &Domain) -> Result<Box<dyn Fn(&Scalar) -> Scalar>> {
    let target = target.clone();
    if k0_degree == 1 {
        // constants lie in the prime field
        return Ok(Box::new(move |x: &Scalar| match x {
            Scalar::Ext(c) => prime_into(&target, &c[0]),
            other => prime_into(&target, other),
        }));
    }
    if &target == k {
        return Ok(Box::new(|x: &Scalar| x.clone()));
    }
    let ext = k.as_extension().expect("proper subfield needs an extension");
    if k0_degree < ext.degree() {
        return Err(Error::ExtensionNotOverK0(format!(
            "the constants generate a proper subfield of {k}; only {k} itself is accepted as K"
        )));
    }
    // embed k = base[a]/(g) by a root of g in K
    let g = Poly::new(target.clone(), ext.modulus().iter().map(|c| prime_into(&target, c)).collect());
    let root = poly_factor(&g)?
        .into_iter()
        .find(|(f, _)| f.degree() == Some(1))
        .map(|(f, _)| target.neg(&target.div(&f.coeffs()[0], &f.coeffs()[1]).expect("monic linear")))
        .ok_or_else(|| {
            Error::ExtensionNotOverK0(format!("{target} contains no root of the defining polynomial of {k}"))
        })?;
    let powers: Vec<Scalar> = (0..ext.degree()).map(|i| target.pow(&root, &num_bigint::BigUint::from(i))).collect();
    Ok(Box::new(move |x: &Scalar| {
        let coeffs = match x {
            Scalar::Ext(c) => c.clone(),
            other => vec![other.clone()],
        };
        coeffs
            .iter()
            .zip(&powers)
            .fold(target.zero(), |acc, (c, p)| target.add(&acc, &target.mul(&prime_into(&target, c), p)))
    }))
}

/// Structural part of the categoricity criterion: one component and no addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoricityVerdict {
    pub satisfied: bool,
    pub components: usize,
    pub addition_dim: usize,
    /// Hypotheses that are not computed.
    pub assumptions: Vec<String>,
}

pub fn categoricity_check(ring: &RingPresentation, seed: u64) -> Result<CategoricityVerdict> {
    let report = decompose_char0(ring, ResiduePolicy::Describe, seed)?;
    let components = report.components.len();
    let addition_dim = report.addition_basis.len();
    Ok(CategoricityVerdict {
        satisfied: components == 1 && addition_dim == 0,
        components,
        addition_dim,
        assumptions: vec![
            "the base field is uncountable and algebraically closed (model-theoretic, not checked)".into()
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::Summand;

    fn q(n: i64) -> Scalar {
        Domain::Rationals.from_i64(n)
    }

    pub(crate) fn h3() -> RingPresentation {
        let z = vec![q(0), q(0), q(0)];
        let zz = vec![q(0), q(0), q(1)];
        let mz = vec![q(0), q(0), q(-1)];
        RingPresentation::new(
            Carrier::vector(Domain::Rationals, 3),
            vec![vec![z.clone(), zz, z.clone()], vec![mz, z.clone(), z.clone()], vec![z.clone(), z.clone(), z]],
        )
        .unwrap()
    }

    #[test]
    fn heisenberg_ideals() {
        let r = h3();
        assert!(r.flags().lie);
        assert!(!r.flags().commutative);
        let ann = r.annihilator().unwrap();
        assert_eq!(ann.generators(), vec![vec![q(0), q(0), q(1)]]);
        assert_eq!(r.square_ideal().unwrap(), ann);
        assert!(r.is_regular().unwrap());
        let (w, _) = Word::parse("x*y").unwrap();
        let v = verbal_ideal(&r, &w, 10).unwrap();
        assert_eq!(v.ideal, ann);
        assert_eq!(v.width, Some(Width::Exact(1)));
    }

    #[test]
    fn integer_example_does_not_split() {
        let d = Domain::Integers;
        let c = Carrier::over(&d, 3, Some(vec![Summand::FreeIntLine; 3])).unwrap();
        let i = |n: i64| Scalar::Int(n.into());
        let z = vec![i(0), i(0), i(0)];
        let r = RingPresentation::new(
            c,
            vec![
                vec![z.clone(), vec![i(0), i(0), i(2)], z.clone()],
                vec![vec![i(0), i(0), i(-2)], z.clone(), z.clone()],
                vec![z.clone(), z.clone(), z],
            ],
        )
        .unwrap();
        assert_eq!(r.annihilator().unwrap().generators(), vec![vec![i(0), i(0), i(1)]]);
        assert_eq!(r.square_ideal().unwrap().generators(), vec![vec![i(0), i(0), i(2)]]);
        assert!(matches!(foundation_addition(&r), Err(Error::NoSplit(_))));
    }

    #[test]
    fn h3_plus_line() {
        let r = h3().direct_sum(&RingPresentation::zero(Carrier::vector(Domain::Rationals, 1))).unwrap();
        let fa = foundation_addition(&r).unwrap();
        assert_eq!(fa.addition.dim(), 1);
        assert_eq!(fa.foundation.dim(), 3);
        let rep = decompose_char0(&r, ResiduePolicy::Describe, 1).unwrap();
        assert_eq!(rep.components.len(), 1);
        assert!(rep.reassembles(&r).unwrap());
        assert!(!categoricity_check(&r, 1).unwrap().satisfied);
        assert!(categoricity_check(&h3(), 1).unwrap().satisfied);
    }

    #[test]
    fn words() {
        let (w, names) = Word::parse("(a * b) * a").unwrap();
        assert_eq!(names, vec!["a", "b"]);
        assert_eq!(w.occurrences(0), 2);
        assert!(!w.is_multilinear());
        assert!(Word::parse("a * (b").is_err());
    }
}
