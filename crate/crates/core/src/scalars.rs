//! Scalar rings of a bilinear map: symmetric endomorphisms, their center, the largest
//! scalar ring `P(f)` and the ring of scalars `A(R)` of a ring.

use std::collections::HashMap;

use crate::abelian::{Carrier, Submodule};
use crate::artinian::{local_decomposition, CommutativeAlgebra, LocalFactor, ResiduePolicy};
use crate::bilinear::BilinearMap;
use crate::error::{Error, Result};
use crate::finite;
use crate::kernel::{vec_ops, Domain, Matrix, Scalar, Subspace, Vector};
use crate::rings::RingPresentation;

/// Largest `|M|` accepted by [`z_n_diagnostic`].
pub const DIAGNOSTIC_LIMIT: u128 = 81;
/// Largest number of image values tracked by the diagnostic sumsets.
const DIAGNOSTIC_VALUE_LIMIT: usize = 6561;

/// A subspace of `End(M)` given by an echelonized basis of matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoAlgebra {
    field: Domain,
    ambient: usize,
    basis: Vec<Matrix>,
    closed: bool,
    unital: bool,
}

fn flatten(m: &Matrix) -> Vector {
    m.to_rows().into_iter().flatten().collect()
}

fn unflatten(field: &Domain, n: usize, v: &[Scalar]) -> Matrix {
    Matrix::from_rows(field.clone(), n, v.chunks(n.max(1)).map(|c| c.to_vec()).collect())
}

impl EndoAlgebra {
    pub fn span(field: Domain, ambient: usize, gens: &[Matrix]) -> Result<EndoAlgebra> {
        let flat: Vec<Vector> = gens.iter().map(flatten).collect();
        let space = Subspace::span(field.clone(), ambient * ambient, &flat)?;
        let basis: Vec<Matrix> = space.basis().iter().map(|v| unflatten(&field, ambient, v)).collect();
        let closed = basis.iter().all(|a| basis.iter().all(|b| space.contains(&flatten(&a.mul(b)))));
        let unital = space.contains(&flatten(&Matrix::identity(field.clone(), ambient)));
        Ok(EndoAlgebra { field, ambient, basis, closed, unital })
    }

    pub fn field(&self) -> &Domain {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn is_commutative(&self) -> bool {
        self.basis.iter().all(|a| self.basis.iter().all(|b| a.mul(b) == b.mul(a)))
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.subspace().contains(&flatten(m))
    }

    pub fn subspace(&self) -> Subspace {
        let flat: Vec<Vector> = self.basis.iter().map(flatten).collect();
        Subspace::span(self.field.clone(), self.ambient * self.ambient, &flat)
            .expect("basis vectors have ambient length")
    }

    pub fn combination(&self, coeffs: &[Scalar]) -> Matrix {
        coeffs
            .iter()
            .zip(&self.basis)
            .fold(Matrix::zeros(self.field.clone(), self.ambient, self.ambient), |acc, (c, b)| acc.add(&b.scale(c)))
    }

    /// Structure constants in the echelon basis; requires a commutative unital subalgebra.
    pub fn to_algebra(&self) -> Result<CommutativeAlgebra> {
        if !self.closed || !self.unital {
            return Err(Error::Precondition("endomorphism span is not a unital subalgebra".into()));
        }
        Ok(CommutativeAlgebra::from_matrices(self.field.clone(), &self.basis)?.0)
    }

    fn sub_by_coefficients(&self, kernel: &[Vector]) -> Result<EndoAlgebra> {
        let gens: Vec<Matrix> = kernel.iter().map(|c| self.combination(c)).collect();
        EndoAlgebra::span(self.field.clone(), self.ambient, &gens)
    }
}

/// `P(f)` together with its action on the image of `f`.
#[derive(Clone, Debug)]
pub struct ScalarRingReport {
    pub p_basis: EndoAlgebra,
    /// Echelon basis of `im(f)` in target coordinates.
    pub image_basis: Vec<Vector>,
    /// For each `p_basis` element, its matrix on `image_basis`.
    pub action_on_image: Vec<Matrix>,
    /// Basis of `ker(M ⊗ M → N)`, index `i·n + j` for `bᵢ ⊗ bⱼ`.
    pub relation_kernel: Vec<Vector>,
}

struct FieldMap<'a> {
    field: Domain,
    n: usize,
    m: usize,
    tensor: &'a [Vec<Vector>],
}

impl<'a> FieldMap<'a> {
    fn of(f: &'a BilinearMap, op: &'static str) -> Result<FieldMap<'a>> {
        let field = f.source().require_field(op)?.clone();
        Ok(FieldMap { field, n: f.source().dim(), m: f.target().dim(), tensor: f.tensor() })
    }

    /// `f̄ : M ⊗ M → N` as an `m × n²` matrix.
    fn tensor_map(&self) -> Matrix {
        let cols: Vec<Vector> = (0..self.n * self.n).map(|c| self.tensor[c / self.n][c % self.n].clone()).collect();
        Matrix::from_columns(self.field.clone(), self.m, &cols)
    }

    /// `(A ⊗ id)τ`.
    fn left_act(&self, a: &Matrix, tau: &[Scalar]) -> Vector {
        let d = &self.field;
        let n = self.n;
        let mut out = vec_ops::zero(d, n * n);
        for i in 0..n {
            for j in 0..n {
                let t = &tau[i * n + j];
                if d.is_zero(t) {
                    continue;
                }
                for k in 0..n {
                    let idx = k * n + j;
                    out[idx] = d.add(&out[idx], &d.mul(a.get(k, i), t));
                }
            }
        }
        out
    }

    fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let d = &self.field;
        let mut acc = vec_ops::zero(d, self.m);
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc = vec_ops::axpy(d, &acc, &d.mul(xi, yj), &self.tensor[i][j]);
            }
        }
        acc
    }
}

/// `Sym_f(M) = {A : f(Ax, y) = f(x, Ay)}`.
pub fn symmetric_endos(f: &BilinearMap) -> Result<EndoAlgebra> {
    let fm = FieldMap::of(f, "symmetric_endos")?;
    let (d, n, m) = (&fm.field, fm.n, fm.m);
    // unknown A[k][l] sits at k·n + l
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for t in 0..m {
                let mut row = vec_ops::zero(d, n * n);
                for k in 0..n {
                    row[k * n + i] = d.add(&row[k * n + i], &fm.tensor[k][j][t]);
                    row[k * n + j] = d.sub(&row[k * n + j], &fm.tensor[i][k][t]);
                }
                rows.push(row);
            }
        }
    }
    let solutions = solve_homogeneous(d, n * n, rows)?;
    let gens: Vec<Matrix> = solutions.iter().map(|v| unflatten(d, n, v)).collect();
    EndoAlgebra::span(d.clone(), n, &gens)
}

fn solve_homogeneous(d: &Domain, unknowns: usize, rows: Vec<Vector>) -> Result<Vec<Vector>> {
    if unknowns == 0 {
        return Ok(Vec::new());
    }
    if rows.is_empty() {
        return Ok((0..unknowns).map(|i| vec_ops::unit(d, unknowns, i)).collect());
    }
    Matrix::from_rows(d.clone(), unknowns, rows).kernel()
}

/// `Z(f)`: elements of `Sym_f(M)` commuting with all of `Sym_f(M)`.
pub fn z_center(f: &BilinearMap) -> Result<EndoAlgebra> {
    center_of(&symmetric_endos(f)?)
}

fn center_of(sym: &EndoAlgebra) -> Result<EndoAlgebra> {
    let d = sym.field().clone();
    let k = sym.dim();
    let mut rows = Vec::new();
    for r in sym.basis() {
        let commutators: Vec<Vector> = sym.basis().iter().map(|s| flatten(&s.mul(r).sub(&r.mul(s)))).collect();
        for e in 0..sym.ambient() * sym.ambient() {
            rows.push(commutators.iter().map(|c| c[e].clone()).collect());
        }
    }
    let kernel = solve_homogeneous(&d, k, rows)?;
    sym.sub_by_coefficients(&kernel)
}

/// `P(f)`: the stabilizer of `ker f̄` inside `Z(f)`, with its action on `im(f)`.
pub fn p_of_f(f: &BilinearMap) -> Result<ScalarRingReport> {
    let fm = FieldMap::of(f, "p_of_f")?;
    if !f.is_nondegenerate()? {
        return Err(Error::DegenerateInput(
            "C(f) ≠ 0; pass the foundation of f (split off the two-sided kernel first)".into(),
        ));
    }
    let z = z_center(f)?;
    let d = fm.field.clone();
    let fbar = fm.tensor_map();
    let relation_kernel = if fm.n == 0 { Vec::new() } else { fbar.kernel()? };
    let mut rows: Vec<Vector> = Vec::new();
    for kappa in &relation_kernel {
        let images: Vec<Vector> = z.basis().iter().map(|a| fbar.apply(&fm.left_act(a, kappa))).collect();
        for t in 0..fm.m {
            rows.push(images.iter().map(|v| v[t].clone()).collect());
        }
    }
    let kernel = solve_homogeneous(&d, z.dim(), rows)?;
    let p = z.sub_by_coefficients(&kernel)?;
    let image = Subspace::span(d.clone(), fm.m, &fm.tensor.iter().flatten().cloned().collect::<Vec<_>>())?;
    let action = image_action(&fm, &fbar, &image, p.basis())?;
    Ok(ScalarRingReport { p_basis: p, image_basis: image.basis().to_vec(), action_on_image: action, relation_kernel })
}

/// `A·w = f̄((A ⊗ id)τ)` for a preimage `τ` of each image basis vector `w`.
fn image_action(fm: &FieldMap, fbar: &Matrix, image: &Subspace, endos: &[Matrix]) -> Result<Vec<Matrix>> {
    let preimages: Vec<Vector> = image
        .basis()
        .iter()
        .map(|w| fbar.solve(w).map(|s| s.expect("image vectors have preimages")))
        .collect::<Result<_>>()?;
    Ok(endos
        .iter()
        .map(|a| {
            let cols: Vec<Vector> = preimages
                .iter()
                .map(|tau| image.coordinates(&fbar.apply(&fm.left_act(a, tau))).expect("stable image"))
                .collect();
            Matrix::from_columns(fm.field.clone(), image.dim(), &cols)
        })
        .collect())
}

impl ScalarRingReport {
    /// `f(Ax, y) = f(x, Ay) = A·f(x, y)` on all basis pairs.
    pub fn certifies_bilinearity(&self, f: &BilinearMap) -> Result<bool> {
        let fm = FieldMap::of(f, "certifies_bilinearity")?;
        let d = &fm.field;
        let image = Subspace::span(d.clone(), fm.m, &self.image_basis)?;
        for (a, rho) in self.p_basis.basis().iter().zip(&self.action_on_image) {
            for i in 0..fm.n {
                let ai = a.column(i);
                for j in 0..fm.n {
                    let aj = a.column(j);
                    let left = fm.eval(&ai, &vec_ops::unit(d, fm.n, j));
                    let right = fm.eval(&vec_ops::unit(d, fm.n, i), &aj);
                    let Some(c) = image.coordinates(&fm.tensor[i][j]) else { return Ok(false) };
                    let scaled = vec_ops::combination(d, fm.m, &rho.apply(&c), &self.image_basis);
                    if left != right || left != scaled {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `P(f)` as an abstract commutative algebra.
    pub fn algebra(&self) -> Result<CommutativeAlgebra> {
        self.p_basis.to_algebra()
    }
}

/// `Z_n(f)` computed by enumeration over a finite prime field.
///
/// `A ∈ Z(f)` is kept when `Σ f(xᵢ, yᵢ) ↦ Σ f(Axᵢ, yᵢ)` is well defined on sums of `n`
/// values, i.e. the `n`-fold sumset of `{(f(x, y), f(Ax, y))}` is the graph of a function.
pub fn z_n_diagnostic(f: &BilinearMap, n: usize) -> Result<EndoAlgebra> {
    let ctx = DiagnosticContext::new(f)?;
    let mut kept = Vec::new();
    for a in &ctx.z_elements {
        if ctx.satisfies(a, n)? {
            kept.push(a.clone());
        }
    }
    EndoAlgebra::span(ctx.field.clone(), ctx.dim, &kept)
}

/// `Z_1 ⊇ Z_2 ⊇ …` up to the first `n₀` with `Z_{n₀} = Z_{n₀+1}`.
#[derive(Clone, Debug)]
pub struct ZnChain {
    pub terms: Vec<EndoAlgebra>,
    pub stabilized_at: usize,
}

impl ZnChain {
    pub fn limit(&self) -> &EndoAlgebra {
        &self.terms[self.stabilized_at - 1]
    }
}

pub fn z_n_chain(f: &BilinearMap, max_n: usize) -> Result<ZnChain> {
    let ctx = DiagnosticContext::new(f)?;
    let mut terms: Vec<EndoAlgebra> = Vec::new();
    for n in 1..=max_n + 1 {
        let mut kept = Vec::new();
        for a in &ctx.z_elements {
            if ctx.satisfies(a, n)? {
                kept.push(a.clone());
            }
        }
        let term = EndoAlgebra::span(ctx.field.clone(), ctx.dim, &kept)?;
        if terms.last() == Some(&term) {
            return Ok(ZnChain { terms, stabilized_at: n - 1 });
        }
        terms.push(term);
    }
    Err(Error::SearchBoundExceeded { bound: max_n })
}

struct DiagnosticContext {
    field: Domain,
    p: u64,
    dim: usize,
    /// `(code f(x, y), x, y)` over all pairs.
    pairs: Vec<(usize, Vector, Vector)>,
    f: BilinearMap,
    z_elements: Vec<Matrix>,
}

impl DiagnosticContext {
    fn new(f: &BilinearMap) -> Result<DiagnosticContext> {
        let p = finite::prime_of(f.source()).ok_or_else(|| Error::UnsupportedDomain {
            op: "z_n_diagnostic",
            domain: f.source().domain().to_string(),
        })?;
        let elements = finite::elements(f.source(), DIAGNOSTIC_LIMIT)?;
        let z = z_center(f)?;
        let coefficient_tuples = finite::elements(&Carrier::vector(z.field().clone(), z.dim()), u128::MAX)?;
        let z_elements: Vec<Matrix> = coefficient_tuples.iter().map(|c| z.combination(c)).collect();
        let mut pairs = Vec::with_capacity(elements.len() * elements.len());
        for x in &elements {
            for y in &elements {
                pairs.push((finite::encode(p, &f.eval(x, y)), x.clone(), y.clone()));
            }
        }
        Ok(DiagnosticContext { field: z.field().clone(), p, dim: f.source().dim(), pairs, f: f.clone(), z_elements })
    }

    fn satisfies(&self, a: &Matrix, n: usize) -> Result<bool> {
        let mut single: HashMap<(usize, usize), ()> = HashMap::new();
        for (code, x, y) in &self.pairs {
            single.insert((*code, finite::encode(self.p, &self.f.eval(&a.apply(x), y))), ());
        }
        let single: Vec<(usize, usize)> = single.into_keys().collect();
        let m = self.f.target().dim();
        let add = |u: usize, v: usize| -> usize {
            let (a, b) = (finite::decode(self.p, m, u), finite::decode(self.p, m, v));
            finite::encode(self.p, &self.f.target().add(&a, &b))
        };
        let zero = finite::encode(self.p, &self.f.target().zero());
        let mut graph: HashMap<usize, usize> = HashMap::from([(zero, zero)]);
        for _ in 0..n {
            let mut next: HashMap<usize, usize> = HashMap::new();
            for (&u, &v) in &graph {
                for &(s, t) in &single {
                    let key = add(u, s);
                    let value = add(v, t);
                    match next.get(&key) {
                        Some(&w) if w != value => return Ok(false),
                        _ => {
                            next.insert(key, value);
                        }
                    }
                }
            }
            if next.len() > DIAGNOSTIC_VALUE_LIMIT {
                return Err(Error::EnumerationTooLarge(format!("more than {DIAGNOSTIC_VALUE_LIMIT} values")));
            }
            graph = next;
        }
        Ok(true)
    }
}

/// One block `e·M → e·N` of a decomposition along idempotents of `P(f)`.
#[derive(Clone, Debug)]
pub struct ScalarComponent {
    /// Basis of `eM` in source coordinates.
    pub source_basis: Vec<Vector>,
    /// Basis of `e·im(f)` in target coordinates.
    pub target_basis: Vec<Vector>,
    pub map: BilinearMap,
    pub idempotent: Matrix,
    pub factor: LocalFactor,
}

#[derive(Clone, Debug)]
pub struct ScalarDecomposition {
    pub scalars: ScalarRingReport,
    pub components: Vec<ScalarComponent>,
}

/// Splits `f` along the primitive idempotents of `P(f)`.
pub fn decompose_via_scalars(f: &BilinearMap, policy: ResiduePolicy, seed: u64) -> Result<ScalarDecomposition> {
    let scalars = p_of_f(f)?;
    let algebra = scalars.algebra()?;
    let d = algebra.field().clone();
    let m = f.target().dim();
    let image = Subspace::span(d.clone(), m, &scalars.image_basis)?;
    let factors = local_decomposition(&algebra, policy, seed)?;
    let mut components = Vec::with_capacity(factors.len());
    for factor in factors {
        let e = scalars.p_basis.combination(&factor.idempotent);
        let rho = factor
            .idempotent
            .iter()
            .zip(&scalars.action_on_image)
            .fold(Matrix::zeros(d.clone(), image.dim(), image.dim()), |acc, (c, r)| acc.add(&r.scale(c)));
        let source = e.image()?;
        let target_gens: Vec<Vector> =
            (0..image.dim()).map(|k| vec_ops::combination(&d, m, &rho.column(k), &scalars.image_basis)).collect();
        let target = Subspace::span(d.clone(), m, &target_gens)?;
        let k = source.dim();
        let mut tensor = vec![vec![Vec::new(); k]; k];
        for a in 0..k {
            for b in 0..k {
                let v = f.eval(&source.basis()[a], &source.basis()[b]);
                tensor[a][b] = target
                    .coordinates(&v)
                    .ok_or_else(|| Error::Precondition("idempotent block values leave the block image".into()))?;
            }
        }
        let map = BilinearMap::new(Carrier::vector(d.clone(), k), Carrier::vector(d.clone(), target.dim()), tensor)?;
        components.push(ScalarComponent {
            source_basis: source.basis().to_vec(),
            target_basis: target.basis().to_vec(),
            map,
            idempotent: e,
            factor,
        });
    }
    Ok(ScalarDecomposition { scalars, components })
}

impl ScalarDecomposition {
    /// The tensor of `⊕ fᵢ` carried back to the original bases.
    pub fn reassemble(&self, source: &Carrier, target: &Carrier) -> Result<Vec<Vec<Vector>>> {
        let d = source.require_field("reassemble")?.clone();
        let n = source.dim();
        let m = target.dim();
        let basis: Vec<Vector> = self.components.iter().flat_map(|c| c.source_basis.iter().cloned()).collect();
        let change = Matrix::from_columns(d.clone(), n, &basis)
            .inverse()?
            .ok_or_else(|| Error::Precondition("component sources do not span M".into()))?;
        let mut out = vec![vec![vec_ops::zero(&d, m); n]; n];
        for i in 0..n {
            let ci = change.apply(&vec_ops::unit(&d, n, i));
            for j in 0..n {
                let cj = change.apply(&vec_ops::unit(&d, n, j));
                let mut offset = 0;
                let mut acc = vec_ops::zero(&d, m);
                for comp in &self.components {
                    let k = comp.source_basis.len();
                    let value = comp.map.eval(&ci[offset..offset + k], &cj[offset..offset + k]);
                    acc = vec_ops::add(&d, &acc, &vec_ops::combination(&d, m, &value, &comp.target_basis));
                    offset += k;
                }
                out[i][j] = acc;
            }
        }
        Ok(out)
    }
}

/// `A(R)`: elements of `P(f′)` for `f′ : R/Ann(R) × R/Ann(R) → R` whose action on `R²`
/// commutes with `η : R² → R/Ann(R)`.
pub fn a_of_r(ring: &RingPresentation) -> Result<ScalarRingReport> {
    let mult = ring.multiplication();
    let d = mult.source().require_field("a_of_r")?.clone();
    let n = mult.source().dim();
    let ann = match ring.annihilator()? {
        Submodule::Field(s) => s,
        Submodule::Lattice { .. } => unreachable!("field carrier"),
    };
    if ann.dim() == n {
        return Err(Error::DegenerateInput("R/Ann(R) = 0; A(R) is undefined for zero multiplication".into()));
    }
    let free = ann.free_columns();
    let k = free.len();
    let tensor: Vec<Vec<Vector>> =
        free.iter().map(|&i| free.iter().map(|&j| mult.entry(i, j).clone()).collect()).collect();
    let induced = BilinearMap::new(Carrier::vector(d.clone(), k), Carrier::vector(d.clone(), n), tensor)?;
    let report = p_of_f(&induced)?;
    // α(η z) − η(α·z) for every image basis vector z
    let eta = ann.quotient_map();
    let mut rows: Vec<Vector> = Vec::new();
    let contributions: Vec<Vec<Vector>> = report
        .p_basis
        .basis()
        .iter()
        .zip(&report.action_on_image)
        .map(|(alpha, rho)| {
            (0..report.image_basis.len())
                .map(|t| {
                    let z = &report.image_basis[t];
                    let acted = vec_ops::combination(&d, n, &rho.column(t), &report.image_basis);
                    vec_ops::sub(&d, &alpha.apply(&eta.apply(z)), &eta.apply(&acted))
                })
                .collect()
        })
        .collect();
    for t in 0..report.image_basis.len() {
        for e in 0..k {
            rows.push(contributions.iter().map(|c| c[t][e].clone()).collect());
        }
    }
    let kernel = solve_homogeneous(&d, report.p_basis.dim(), rows)?;
    let p_basis = report.p_basis.sub_by_coefficients(&kernel)?;
    let fm = FieldMap::of(&induced, "a_of_r")?;
    let image = Subspace::span(d.clone(), n, &report.image_basis)?;
    let action = image_action(&fm, &fm.tensor_map(), &image, p_basis.basis())?;
    Ok(ScalarRingReport {
        p_basis,
        image_basis: report.image_basis,
        action_on_image: action,
        relation_kernel: report.relation_kernel,
    })
}
