//! Finite-dimensional commutative unital algebras over a field: radical, splitting into
//! local factors, J-series, and fields of representatives.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::{poly_factor, vec_ops, Domain, Matrix, Poly, Scalar, Subspace, Vector};

/// Default seed for probing elements.
pub const DEFAULT_SEED: u64 = 0x1d3e_7a11;
const MAX_PROBES: usize = 64;

/// `A` with basis `b₀ … b_{n-1}`, `table[i][j] = bᵢ bⱼ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutativeAlgebra {
    field: Domain,
    dim: usize,
    table: Vec<Vec<Vector>>,
    unit: Vector,
}

impl CommutativeAlgebra {
    /// Checks commutativity, associativity and the unit laws on all basis triples.
    pub fn new(field: Domain, table: Vec<Vec<Vector>>, unit: Vector) -> Result<CommutativeAlgebra> {
        let a = CommutativeAlgebra::unchecked(field, table, unit)?;
        let n = a.dim;
        for i in 0..n {
            let ui = a.mul(&a.unit, &a.basis(i));
            if ui != a.basis(i) {
                return Err(Error::Validation(format!("the unit does not act as identity on b{i}")));
            }
            for j in 0..n {
                if a.table[i][j] != a.table[j][i] {
                    return Err(Error::Validation(format!("b{i}·b{j} ≠ b{j}·b{i}")));
                }
                for k in 0..n {
                    let left = a.mul(&a.table[i][j], &a.basis(k));
                    let right = a.mul(&a.basis(i), &a.table[j][k]);
                    if left != right {
                        return Err(Error::Validation(format!("(b{i}·b{j})·b{k} ≠ b{i}·(b{j}·b{k})")));
                    }
                }
            }
        }
        Ok(a)
    }

    pub(crate) fn unchecked(field: Domain, table: Vec<Vec<Vector>>, unit: Vector) -> Result<CommutativeAlgebra> {
        match &field {
            Domain::Residues(m) => {
                return Err(Error::NotEquicharacteristic(format!(
                    "an algebra over Z/{m} has residue characteristic different from {m} or is not over a field"
                )))
            }
            Domain::Integers => return Err(Error::NonFieldDomain(field.to_string())),
            _ => {}
        }
        let dim = unit.len();
        if table.len() != dim || table.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return Err(Error::DimensionMismatch(format!(
                "structure table must be {dim}×{dim} with entries of length {dim}"
            )));
        }
        Ok(CommutativeAlgebra { field, dim, table, unit })
    }

    /// The subalgebra of `n×n` matrices spanned by `basis`; products must stay in the span.
    pub fn from_matrices(field: Domain, basis: &[Matrix]) -> Result<(CommutativeAlgebra, Subspace)> {
        let flat = |m: &Matrix| -> Vector { m.to_rows().into_iter().flatten().collect() };
        let n = basis.first().map_or(0, |m| m.rows());
        let span_vectors: Vec<Vector> = basis.iter().map(flat).collect();
        let space = Subspace::span(field.clone(), n * n, &span_vectors)?;
        let k = space.dim();
        let coords = |m: &Matrix| -> Result<Vector> {
            space
                .coordinates(&flat(m))
                .ok_or_else(|| Error::Validation("matrix span is not closed under products".into()))
        };
        let echelon: Vec<Matrix> = space
            .basis()
            .iter()
            .map(|v| Matrix::from_rows(field.clone(), n, v.chunks(n).map(|c| c.to_vec()).collect()))
            .collect();
        let mut table = vec![vec![Vec::new(); k]; k];
        for i in 0..k {
            for j in 0..k {
                table[i][j] = coords(&echelon[i].mul(&echelon[j]))?;
            }
        }
        let unit = coords(&Matrix::identity(field.clone(), n))?;
        Ok((CommutativeAlgebra::new(field, table, unit)?, space))
    }

    pub fn field(&self) -> &Domain {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn table(&self) -> &[Vec<Vector>] {
        &self.table
    }

    pub fn basis(&self, i: usize) -> Vector {
        vec_ops::unit(&self.field, self.dim, i)
    }

    pub fn zero(&self) -> Vector {
        vec_ops::zero(&self.field, self.dim)
    }

    pub fn add(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        vec_ops::add(&self.field, a, b)
    }

    pub fn sub(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        vec_ops::sub(&self.field, a, b)
    }

    pub fn scale(&self, c: &Scalar, a: &[Scalar]) -> Vector {
        vec_ops::scale(&self.field, c, a)
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        let d = &self.field;
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if d.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if d.is_zero(y) {
                    continue;
                }
                out = vec_ops::axpy(d, &out, &d.mul(x, y), &self.table[i][j]);
            }
        }
        out
    }

    pub fn pow(&self, a: &[Scalar], e: &BigUint) -> Vector {
        let mut result = self.unit.clone();
        for i in (0..e.bits()).rev() {
            result = self.mul(&result, &result);
            if e.bit(i) {
                result = self.mul(&result, a);
            }
        }
        result
    }

    /// Matrix of `y ↦ a·y`.
    pub fn multiplication_matrix(&self, a: &[Scalar]) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim).map(|j| self.mul(a, &self.basis(j))).collect();
        Matrix::from_columns(self.field.clone(), self.dim, &cols)
    }

    pub fn inverse(&self, a: &[Scalar]) -> Result<Option<Vector>> {
        self.multiplication_matrix(a).solve(&self.unit)
    }

    /// `p(a)` with the constant term read as a multiple of `one`.
    pub fn eval_poly(&self, p: &Poly, a: &[Scalar], one: &[Scalar]) -> Vector {
        let mut acc = self.zero();
        for c in p.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, a), &self.scale(c, one));
        }
        acc
    }

    /// Minimal polynomial of `a` inside the unital subalgebra with identity `one`.
    pub fn minimal_polynomial_in(&self, a: &[Scalar], one: &[Scalar]) -> Result<Poly> {
        let d = &self.field;
        let mut powers: Vec<Vector> = vec![one.to_vec()];
        loop {
            let next = self.mul(powers.last().unwrap(), a);
            let m = Matrix::from_columns(d.clone(), self.dim, &powers);
            if let Some(c) = m.solve(&next)? {
                let mut coeffs: Vec<Scalar> = c.iter().map(|x| d.neg(x)).collect();
                coeffs.push(d.one());
                return Ok(Poly::new(d.clone(), coeffs));
            }
            powers.push(next);
        }
    }

    pub fn minimal_polynomial(&self, a: &[Scalar]) -> Result<Poly> {
        self.minimal_polynomial_in(a, &self.unit.clone())
    }

    pub fn is_nilpotent(&self, a: &[Scalar]) -> bool {
        let mut p = a.to_vec();
        for _ in 0..=self.dim {
            if vec_ops::is_zero(&self.field, &p) {
                return true;
            }
            p = self.mul(&p, a);
        }
        vec_ops::is_zero(&self.field, &p)
    }

    /// Span of all products `x·y` with `x ∈ I`, `y ∈ J`.
    pub fn product_span(&self, i: &[Vector], j: &[Vector]) -> Result<Subspace> {
        let gens: Vec<Vector> = i.iter().flat_map(|x| j.iter().map(move |y| self.mul(x, y))).collect();
        Subspace::span(self.field.clone(), self.dim, &gens)
    }

    /// `I, I², I³, …` down to zero (the list stops at the first zero power, excluded).
    pub fn ideal_powers(&self, ideal: &Subspace) -> Result<Vec<Subspace>> {
        let mut out = Vec::new();
        let mut current = ideal.clone();
        while !current.is_zero() {
            out.push(current.clone());
            let next = self.product_span(current.basis(), ideal.basis())?;
            if next == current {
                // a nonzero idempotent ideal: not nilpotent
                return Err(Error::Precondition("ideal is not nilpotent".into()));
            }
            current = next;
        }
        Ok(out)
    }

    /// Structure constants of `A/I` on the free columns of `I`.
    pub fn quotient(&self, ideal: &Subspace) -> Result<CommutativeAlgebra> {
        let free = ideal.free_columns();
        let k = free.len();
        let mut table = vec![vec![Vec::new(); k]; k];
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                table[a][b] = ideal.quotient_coords(&self.table[i][j]);
            }
        }
        CommutativeAlgebra::unchecked(self.field.clone(), table, ideal.quotient_coords(&self.unit))
    }

    /// The subalgebra `e·A` for an idempotent `e`, in its echelon basis.
    pub fn corner(&self, e: &[Scalar]) -> Result<(CommutativeAlgebra, Vec<Vector>)> {
        let gens: Vec<Vector> = (0..self.dim).map(|j| self.mul(e, &self.basis(j))).collect();
        let space = Subspace::span(self.field.clone(), self.dim, &gens)?;
        let basis = space.basis().to_vec();
        let k = basis.len();
        let mut table = vec![vec![Vec::new(); k]; k];
        for a in 0..k {
            for b in 0..k {
                table[a][b] = space.coordinates(&self.mul(&basis[a], &basis[b])).expect("corner is a subalgebra");
            }
        }
        let unit = space.coordinates(e).expect("e ∈ eA");
        Ok((CommutativeAlgebra::unchecked(self.field.clone(), table, unit)?, basis))
    }
}

/// The nilradical.
///
/// In characteristic 0 it is the kernel of the trace form `(x, y) ↦ tr(L_{xy})`. Over a
/// finite field with `q` elements, `x ↦ x^q` is linear and the radical is the kernel of
/// its `N`-th iterate once `q^N ≥ dim`.
pub fn radical(a: &CommutativeAlgebra) -> Result<Subspace> {
    let d = a.field().clone();
    let n = a.dim();
    if d.characteristic() == 0 {
        let traces: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let m = a.multiplication_matrix(&a.table[i][j]);
                        (0..n).fold(d.zero(), |acc, k| d.add(&acc, m.get(k, k)))
                    })
                    .collect()
            })
            .collect();
        let gram = Matrix::from_rows(d.clone(), n, traces);
        let ker = if n == 0 { Vec::new() } else { gram.kernel()? };
        return Subspace::span(d, n, &ker);
    }
    let q = d.size().ok_or_else(|| Error::UnsupportedDomain { op: "radical", domain: d.to_string() })?;
    let mut exponent = BigUint::from(q);
    while exponent < BigUint::from(n.max(1)) {
        exponent *= q;
    }
    let images: Vec<Vector> = (0..n).map(|i| a.pow(&a.basis(i), &exponent)).collect();
    let m = Matrix::from_columns(d.clone(), n, &images);
    let ker = if n == 0 { Vec::new() } else { m.kernel()? };
    Subspace::span(d, n, &ker)
}

/// How residue fields larger than the base are handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ResiduePolicy {
    /// Report them as explicit extensions of the base.
    #[default]
    Describe,
    /// Fail with `NeedsExtension` so the caller can re-run over the extension.
    RequireBase,
}

/// The residue field `A/J` of a local algebra, presented by a primitive element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    /// The base field, or `base[a]/(minpoly)`.
    pub field: Domain,
    /// Minimal polynomial of the primitive element over the base.
    pub minpoly: Poly,
    /// A lift of the primitive element, in factor coordinates.
    pub primitive: Vector,
    /// `A → residue`, in coordinates of the power basis of the primitive element.
    pub projection: Matrix,
}

impl ResidueField {
    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(1)
    }

    pub fn is_finite(&self) -> bool {
        self.field.size().is_some()
    }

    /// The residue class of a factor element as a scalar of [`ResidueField::field`].
    pub fn project(&self, a: &[Scalar]) -> Scalar {
        let coords = self.projection.apply(a);
        match &self.field {
            Domain::Extension(_) if self.degree() > 1 => Scalar::Ext(coords),
            _ => coords.into_iter().next().expect("degree-one projection"),
        }
    }
}

/// A local factor `eA` of a commutative algebra.
#[derive(Clone, Debug)]
pub struct LocalFactor {
    /// The primitive idempotent, in coordinates of the ambient algebra.
    pub idempotent: Vector,
    /// Basis of `eA` in ambient coordinates.
    pub embedding: Vec<Vector>,
    /// `eA` in its own basis; its unit is the idempotent.
    pub algebra: CommutativeAlgebra,
    /// The maximal ideal, in factor coordinates.
    pub radical: Subspace,
    /// Least `n` with `Jⁿ = 0`.
    pub nilpotency_index: usize,
    pub residue: ResidueField,
}

/// Splits a commutative algebra into local factors with orthogonal idempotents summing to 1.
pub fn local_decomposition(a: &CommutativeAlgebra, policy: ResiduePolicy, seed: u64) -> Result<Vec<LocalFactor>> {
    let d = a.field().clone();
    d.require_field()?;
    if a.dim() == 0 {
        return Ok(Vec::new());
    }
    let j = radical(a)?;
    let semisimple = a.quotient(&j)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut primitive = split_semisimple(&semisimple, &mut rng)?;
    primitive.sort();
    primitive.reverse();
    // lift sequentially: e ← 3e² − 2e³ on (1 − Σ previous)·lift
    let free = j.free_columns();
    let lift = |e: &Vector| -> Vector {
        let mut v = a.zero();
        for (k, &c) in free.iter().enumerate() {
            v[c] = e[k].clone();
        }
        v
    };
    let mut idempotents: Vec<Vector> = Vec::new();
    let mut used = a.zero();
    for (k, e_bar) in primitive.iter().enumerate() {
        let rest = a.sub(a.unit(), &used);
        let e = if k + 1 == primitive.len() {
            rest
        } else {
            let mut e = a.mul(&rest, &lift(e_bar));
            loop {
                let e2 = a.mul(&e, &e);
                if e2 == e {
                    break;
                }
                let e3 = a.mul(&e2, &e);
                e = a.sub(&a.scale(&d.from_i64(3), &e2), &a.scale(&d.from_i64(2), &e3));
            }
            e
        };
        used = a.add(&used, &e);
        idempotents.push(e);
    }
    idempotents
        .into_iter()
        .map(|e| {
            let (algebra, embedding) = a.corner(&e)?;
            let (radical, nilpotency_index, residue) = local_data(&algebra, policy, &mut rng)?;
            Ok(LocalFactor { idempotent: e, embedding, algebra, radical, nilpotency_index, residue })
        })
        .collect()
}

/// Primitive idempotents of a reduced (semisimple) algebra.
fn split_semisimple(s: &CommutativeAlgebra, rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
    let mut pending = vec![s.unit().clone()];
    let mut done = Vec::new();
    while let Some(e) = pending.pop() {
        let block_dim = s.multiplication_matrix(&e).rank()?;
        let mut resolved = false;
        for probe in probes(s, rng) {
            let x = s.mul(&e, &probe);
            let g = s.minimal_polynomial_in(&x, &e)?;
            let factors = poly_factor(&g)?;
            if factors.len() >= 2 {
                for (p, _) in &factors {
                    let q = g.exact_div(p)?;
                    // q · (q⁻¹ mod p) is 1 mod p and 0 mod the other factors
                    let (_, inv, _) = q.rem(p)?.xgcd(p)?;
                    let u = q.mul(&inv).rem(&g)?;
                    pending.push(s.eval_poly(&u, &x, &e));
                }
                resolved = true;
                break;
            }
            if g.degree() == Some(block_dim) {
                done.push(e.clone());
                resolved = true;
                break;
            }
        }
        if !resolved {
            return Err(Error::SplittingFailed(MAX_PROBES));
        }
    }
    Ok(done)
}

/// Basis elements first, then seeded random combinations.
fn probes<'a>(s: &'a CommutativeAlgebra, rng: &'a mut ChaCha8Rng) -> impl Iterator<Item = Vector> + 'a {
    let n = s.dim();
    let d = s.field().clone();
    (0..MAX_PROBES).map(move |k| if k < n { s.basis(k) } else { (0..n).map(|_| d.random(rng)).collect() })
}

fn local_data(
    f: &CommutativeAlgebra,
    policy: ResiduePolicy,
    rng: &mut ChaCha8Rng,
) -> Result<(Subspace, usize, ResidueField)> {
    let d = f.field().clone();
    let j = radical(f)?;
    let index = f.ideal_powers(&j)?.len() + 1;
    let q = j.quotient_map();
    let residue_dim = q.rows();
    let one = f.unit().clone();
    let reduced = f.quotient(&j)?;
    let mut chosen: Option<(Vector, Poly)> = None;
    for probe in probes(f, rng) {
        let gbar = reduced.minimal_polynomial(&q.apply(&probe))?;
        if gbar.degree() == Some(residue_dim) {
            chosen = Some((probe, gbar));
            break;
        }
    }
    let (primitive, minpoly) = chosen.ok_or(Error::SplittingFailed(MAX_PROBES))?;
    let field = if residue_dim == 1 {
        d.clone()
    } else {
        if policy == ResiduePolicy::RequireBase {
            return Err(Error::NeedsExtension {
                poly: minpoly.to_string(),
                coefficients: minpoly.coefficient_strings(),
            });
        }
        Domain::extension(d.clone(), minpoly.coeffs().to_vec())?
    };
    // columns: classes of 1, x, …, x^{deg-1}
    let mut powers = vec![one.clone()];
    for _ in 1..residue_dim {
        powers.push(f.mul(powers.last().unwrap(), &primitive));
    }
    let cols: Vec<Vector> = powers.iter().map(|p| q.apply(p)).collect();
    let change = Matrix::from_columns(d.clone(), residue_dim, &cols)
        .inverse()?
        .ok_or_else(|| Error::Precondition("powers of the primitive element are dependent modulo J".into()))?;
    let projection = change.mul(&q);
    Ok((j, index, ResidueField { field, minpoly, primitive, projection }))
}

/// Layer dimensions `dim_k(Jⁱ/Jⁱ⁺¹)` over the residue field `k`, starting at `i = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JSeriesReport {
    pub layers: Vec<usize>,
    pub r_k: usize,
}

pub fn j_series(lf: &LocalFactor) -> Result<JSeriesReport> {
    let deg = lf.residue.degree();
    let mut dims = vec![lf.algebra.dim()];
    for p in lf.algebra.ideal_powers(&lf.radical)? {
        dims.push(p.dim());
    }
    dims.push(0);
    let layers: Vec<usize> = dims.windows(2).map(|w| (w[0] - w[1]) / deg).collect();
    let r_k = layers.iter().sum();
    Ok(JSeriesReport { layers, r_k })
}

/// `Σ dim_k(Jⁱ⁻¹M / JⁱM)` for a module given by one action matrix per factor basis element.
pub fn r_k_module(lf: &LocalFactor, action: &[Matrix]) -> Result<usize> {
    let alg = &lf.algebra;
    let d = alg.field().clone();
    if action.len() != alg.dim() {
        return Err(Error::ActionNotWellFormed(format!(
            "{} action matrices for a factor of dimension {}",
            action.len(),
            alg.dim()
        )));
    }
    let m = action.first().map_or(0, |a| a.rows());
    if action.iter().any(|a| a.rows() != m || a.cols() != m || a.domain() != &d) {
        return Err(Error::ActionNotWellFormed(
            "action matrices must be square of equal size over the base field".into(),
        ));
    }
    let act = |x: &[Scalar]| -> Matrix {
        x.iter().zip(action).fold(Matrix::zeros(d.clone(), m, m), |acc, (c, a)| acc.add(&a.scale(c)))
    };
    if act(alg.unit()) != Matrix::identity(d.clone(), m) {
        return Err(Error::ActionNotWellFormed("the unit does not act as the identity".into()));
    }
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            if action[i].mul(&action[j]) != act(&alg.table()[i][j]) {
                return Err(Error::ActionNotWellFormed(format!("ρ(b{i})ρ(b{j}) ≠ ρ(b{i}·b{j})")));
            }
        }
    }
    let deg = lf.residue.degree();
    let radical_ops: Vec<Matrix> = lf.radical.basis().iter().map(|x| act(x)).collect();
    let mut current = Subspace::full(d.clone(), m);
    let mut total = 0;
    while !current.is_zero() {
        let gens: Vec<Vector> =
            radical_ops.iter().flat_map(|r| current.basis().iter().map(move |v| r.apply(v))).collect();
        let next = Subspace::span(d.clone(), m, &gens)?;
        if next.dim() == current.dim() {
            return Err(Error::ActionNotWellFormed("the radical does not act nilpotently".into()));
        }
        total += (current.dim() - next.dim()) / deg;
        current = next;
    }
    Ok(total)
}

/// A subfield `L = K[s]` of a local factor mapping isomorphically onto the residue field.
#[derive(Clone, Debug)]
pub struct FieldOfRepresentatives {
    /// Lifted root of the residue minimal polynomial, in factor coordinates.
    pub generator: Vector,
    /// `1, s, …, s^{d-1}`.
    pub basis: Vec<Vector>,
}

/// Hensel/Newton lifting `s ← s − g(s)/g'(s)` of the residue primitive element.
pub fn field_of_representatives(lf: &LocalFactor) -> Result<FieldOfRepresentatives> {
    let f = &lf.algebra;
    let g = &lf.residue.minpoly;
    let s = lift_root(f, g, &lf.residue.primitive, lf.nilpotency_index)?;
    let mut basis = vec![f.unit().clone()];
    for _ in 1..lf.residue.degree() {
        basis.push(f.mul(basis.last().unwrap(), &s));
    }
    Ok(FieldOfRepresentatives { generator: s, basis })
}

/// Newton iteration for a root of `g` starting from `approx` (a root modulo the radical).
pub fn lift_root(f: &CommutativeAlgebra, g: &Poly, approx: &[Scalar], nilpotency_index: usize) -> Result<Vector> {
    let one = f.unit().clone();
    let dg = g.derivative();
    let mut s = approx.to_vec();
    // the error squares each step; the index bounds the number of useful steps
    for _ in 0..=nilpotency_index {
        let value = f.eval_poly(g, &s, &one);
        if vec_ops::is_zero(f.field(), &value) {
            return Ok(s);
        }
        let slope = f.eval_poly(&dg, &s, &one);
        let inv = f.inverse(&slope)?.ok_or_else(|| {
            Error::NotEquicharacteristic(format!(
                "g'(s) is not a unit for g = {g}; the residue extension is inseparable"
            ))
        })?;
        s = f.sub(&s, &f.mul(&value, &inv));
    }
    Err(Error::Precondition(format!("Newton iteration for {g} did not converge")))
}

impl FieldOfRepresentatives {
    /// The projection restricted to `L` is bijective and multiplicative.
    pub fn is_isomorphic_to_residue(&self, lf: &LocalFactor) -> Result<bool> {
        let res = &lf.residue;
        let k = &res.field;
        let d = lf.algebra.field().clone();
        let deg = res.degree();
        let cols: Vec<Vector> = self.basis.iter().map(|b| res.projection.apply(b)).collect();
        if Matrix::from_columns(d.clone(), deg, &cols).rank()? != deg {
            return Ok(false);
        }
        for x in &self.basis {
            for y in &self.basis {
                let lhs = res.project(&lf.algebra.mul(x, y));
                let rhs = k.mul(&res.project(x), &res.project(y));
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The polynomial algebra `K[x]/(p)` in the basis `1, x, …, x^{deg-1}`.
pub fn polynomial_quotient(p: &Poly) -> Result<CommutativeAlgebra> {
    let d = p.domain().clone();
    let p = p.monic()?;
    let n = p.degree().ok_or_else(|| Error::Precondition("quotient by the zero polynomial".into()))?;
    let mut table = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut c = vec![d.zero(); i + j + 1];
            c[i + j] = d.one();
            let r = Poly::new(d.clone(), c).rem(&p)?;
            let mut v = r.into_coeffs();
            v.resize(n, d.zero());
            table[i][j] = v;
        }
    }
    CommutativeAlgebra::new(d.clone(), table, vec_ops::unit(&d, n, 0))
}
