//! Acceptance criteria, one line each. Runs without the libtest harness so the lines always print.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lrs_cli::input::{load_file, ParsedInput, Structure};
use lrs_cli::oracle::{self, FiniteBilinear};
use lrs_cli::selftest::{cmd_selftest, default_fixture_dir, Level};
use lrs_core::artinian::{
    field_of_representatives, j_series, local_decomposition, CommutativeAlgebra, ResiduePolicy, DEFAULT_SEED,
};
use lrs_core::bilinear::BilinearMap;
use lrs_core::kernel::{vec_ops, Domain, Rational, Scalar, Subspace, Vector};
use lrs_core::malcev::{
    central_series_and_center, free_nilpotent, group_decompose, verify_nilpotent_lie, MalcevGroup, MAX_CLASS,
};
use lrs_core::rings::{decompose_char0, foundation_addition, RingPresentation};
use lrs_core::scalars::p_of_f;
use lrs_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn lib<T>(r: lrs_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn fixture(name: &str) -> ParsedInput {
    load_file(&default_fixture_dir().join(name), None).unwrap_or_else(|e| panic!("{e}"))
}

fn ring_fixture(name: &str) -> RingPresentation {
    match fixture(name).structure {
        Structure::Ring(r) => r,
        _ => panic!("{name} is not a ring document"),
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, format!("took {spent:?}, limit {limit:?}"))
}

/// `f(Ax, y) = f(x, Ay) = A·f(x, y)` on basis pairs, for each basis element `A` of `P(f)`.
fn certify(f: &BilinearMap) -> Result<usize, String> {
    let p = lib(p_of_f(f))?;
    let d = f.source().field().expect("field carrier").clone();
    let n = f.source().dim();
    let m = f.target().dim();
    let image = lib(Subspace::span(d.clone(), m, &p.image_basis))?;
    for (a, rho) in p.p_basis.basis().iter().zip(&p.action_on_image) {
        for i in 0..n {
            for j in 0..n {
                let (ei, ej) = (vec_ops::unit(&d, n, i), vec_ops::unit(&d, n, j));
                let left = f.eval(&a.apply(&ei), &ej);
                let right = f.eval(&ei, &a.apply(&ej));
                let c = image.coordinates(&f.eval(&ei, &ej)).ok_or("a product outside the computed image")?;
                let scaled = vec_ops::combination(&d, m, &rho.apply(&c), &p.image_basis);
                ensure(left == right && right == scaled, format!("basis pair ({i},{j}) breaks bilinearity"))?;
            }
        }
    }
    ensure(lib(p.certifies_bilinearity(f))?, "library certificate disagrees")?;
    Ok(p.p_basis.dim())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let alternating = match fixture("alternating-q2.json").structure {
        Structure::Bilinear(f) => f,
        _ => unreachable!(),
    };
    let mut maps = vec![("alternating Q^2".to_string(), alternating.clone())];
    maps.push(("alternating Q^2 + Q^2".into(), lib(alternating.direct_sum(&alternating))?));
    for (k, b) in oracle::structured_instances(&[2, 3]).into_iter().enumerate() {
        maps.push((format!("GF({}) algebra #{k} of dim {}", b.p, b.n), b.to_map()));
    }
    let mut dims = Vec::new();
    for (name, f) in &maps {
        dims.push(certify(f).map_err(|e| format!("{name}: {e}"))?);
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{} maps, dim P(f) = {dims:?}", maps.len()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut instances: Vec<FiniteBilinear> = oracle::structured_instances(&[2, 3]);
    instances.extend(oracle::nondegenerate_instances(&mut rng, &[2, 3], 16));
    ensure(instances.len() >= 20, "fewer than 20 instances")?;
    for b in &instances {
        let c = lib(oracle::compare_scalars(b))?;
        ensure(c.passed(), format!("GF({}) tensor {:?}: {c:?}", b.p, b.t))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{}/{} instances agree", instances.len(), instances.len()))
}

/// `K[x]/(g)` on `1, x, …, x^{d-1}`; `g` monic, coefficients constant term first.
fn quotient_algebra(d: &Domain, g: &[i64]) -> CommutativeAlgebra {
    let n = g.len() - 1;
    let mut powers: Vec<Vector> = (0..n).map(|i| vec_ops::unit(d, n, i)).collect();
    while powers.len() < 2 * n - 1 {
        let prev = powers.last().unwrap();
        let mut next = vec![d.zero(); n];
        next[1..n].clone_from_slice(&prev[..n - 1]);
        let top = prev[n - 1].clone();
        for (k, c) in g[..n].iter().enumerate() {
            next[k] = d.sub(&next[k], &d.mul(&top, &d.from_i64(*c)));
        }
        powers.push(next);
    }
    let table = (0..n).map(|i| (0..n).map(|j| powers[i + j].clone()).collect()).collect();
    CommutativeAlgebra::new(d.clone(), table, vec_ops::unit(d, n, 0)).expect("quotient algebra")
}

/// Least `k` with `J^k = 0`, by multiplying spans.
fn nilpotency(a: &CommutativeAlgebra, j: &Subspace) -> Result<usize, String> {
    let mut power = j.clone();
    let mut k = 1;
    while !power.is_zero() {
        let products: Vec<Vector> =
            power.basis().iter().flat_map(|x| j.basis().iter().map(move |y| a.mul(x, y))).collect();
        power = lib(Subspace::span(a.field().clone(), a.dim(), &products))?;
        k += 1;
    }
    Ok(k)
}

fn criterion_3() -> Outcome {
    let q = Domain::Rationals;
    let gf2 = lib(Domain::prime_field(2))?;
    let cases: [(&str, &Domain, &[i64], &[usize], &[usize]); 4] = [
        ("Q[x]/(x^2-x)", &q, &[0, -1, 1], &[1, 1], &[1, 1]),
        ("Q[x]/(x^2-1)", &q, &[-1, 0, 1], &[1, 1], &[1, 1]),
        ("Q[x]/(x^3)", &q, &[0, 0, 0, 1], &[3], &[3]),
        ("GF(2)[x]/(x^2+1)", &gf2, &[1, 0, 1], &[2], &[2]),
    ];
    let mut summary = Vec::new();
    for (name, d, g, indices, rks) in cases {
        let a = quotient_algebra(d, g);
        let factors = lib(local_decomposition(&a, ResiduePolicy::Describe, DEFAULT_SEED))?;
        let es: Vec<&Vector> = factors.iter().map(|f| &f.idempotent).collect();
        let sum = es.iter().fold(vec_ops::zero(d, a.dim()), |acc, e| a.add(&acc, e));
        ensure(&sum == a.unit(), format!("{name}: idempotents do not sum to 1"))?;
        for (i, e) in es.iter().enumerate() {
            for (j, f) in es.iter().enumerate() {
                let want = if i == j { (*e).clone() } else { vec_ops::zero(d, a.dim()) };
                ensure(a.mul(e, f) == want, format!("{name}: e{i}*e{j} is wrong"))?;
            }
        }
        let mut got_idx = Vec::new();
        let mut got_rk = Vec::new();
        for lf in &factors {
            let idx = nilpotency(&lf.algebra, &lf.radical)?;
            ensure(
                idx == lf.nilpotency_index,
                format!("{name}: index {} reported, {idx} computed", lf.nilpotency_index),
            )?;
            got_idx.push(idx);
            got_rk.push(lib(j_series(lf))?.r_k);
        }
        ensure(got_idx == indices, format!("{name}: indices {got_idx:?}"))?;
        ensure(got_rk == rks, format!("{name}: r_k {got_rk:?}"))?;
        summary.push(format!("{name} {}", got_rk.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("+")));
    }
    Ok(summary.join(", "))
}

fn criterion_4() -> Outcome {
    let input = fixture("q-x2-2-squared.json");
    let Structure::Algebra(a) = &input.structure else { unreachable!() };
    let factors = lib(local_decomposition(a, ResiduePolicy::Describe, DEFAULT_SEED))?;
    ensure(factors.len() == 1, "the algebra is local")?;
    let lf = &factors[0];
    ensure(lf.residue.degree() == 2, "residue field of degree 2")?;
    let rep = lib(field_of_representatives(lf))?;
    let f = &lf.algebra;
    let s = &rep.generator;
    let two = f.scale(&Domain::Rationals.from_i64(2), f.unit());
    ensure(f.mul(s, s) == two, "s^2 != 2")?;
    // K[s] is a field: s^2 = 2 and s is not a rational multiple of 1
    let span = lib(Subspace::span(Domain::Rationals, f.dim(), &[f.unit().clone(), s.clone()]))?;
    ensure(span.dim() == 2, "1 and s are dependent")?;
    ensure(lib(rep.is_isomorphic_to_residue(lf))?, "projection is not an isomorphism")?;
    Ok(format!("s = {:?} in factor coordinates", vec_ops::format(&Domain::Rationals, s)))
}

fn criterion_5() -> Outcome {
    let input = fixture("two-heisenbergs-and-a-line.json");
    let Structure::Ring(ring) = &input.structure else { unreachable!() };
    let rep = lib(decompose_char0(ring, ResiduePolicy::Describe, DEFAULT_SEED))?;
    ensure(rep.components.len() == 2, format!("{} components", rep.components.len()))?;
    let d = Domain::Rationals;
    for (k, c) in rep.components.iter().enumerate() {
        ensure(c.scalar_factor.algebra.dim() == 1 && c.residue_field == d, format!("component {k}: A(R_i) is not Q"))?;
        ensure(c.scalar_factor.radical.is_zero(), format!("component {k}: A(R_i) not a field"))?;
        // the recorded basis carries the component's table into the input's
        let t = c.ring.multiplication().tensor();
        for (i, x) in c.basis.iter().enumerate() {
            for (j, y) in c.basis.iter().enumerate() {
                let image = vec_ops::combination(&d, ring.dim(), &t[i][j], &c.basis);
                ensure(ring.mul(x, y) == image, format!("component {k}: witness mismatch at ({i},{j})"))?;
            }
        }
    }
    ensure(rep.addition.dim() == 1 && rep.addition.is_zero_multiplication(), "addition is not a zero line")?;
    ensure(rep.cross_products_vanish(ring), "cross products")?;
    let table: Vec<Vec<Vec<String>>> = lib(rep.reassemble(ring.carrier()))?
        .iter()
        .map(|row| row.iter().map(|v| vec_ops::format(&d, v)).collect())
        .collect();
    ensure(table == input.document.table, "reassembled table differs from the input")?;
    Ok("2 components with A(R_i) = Q, 1-dim zero addition, table reproduced".into())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let ring = ring_fixture("z-lattice-ring.json");
    let c = ring.carrier();
    let z = Domain::Integers;
    let u = vec![z.zero(), z.zero(), z.one()];
    let two_u = vec![z.zero(), z.zero(), z.from_i64(2)];
    let ann = lib(ring.annihilator())?;
    ensure(ann == lib(c.span(&[u]))?, "Ann(R) != <u>")?;
    let delta = lib(ann.intersection(&lib(ring.square_ideal())?))?;
    ensure(delta == lib(c.span(&[two_u]))?, "R^2 ∩ Ann(R) != <2u>")?;
    match foundation_addition(&ring) {
        Err(Error::NoSplit(_)) => {}
        Err(e) => return Err(format!("unexpected error {e}")),
        Ok(_) => return Err("foundation_addition split".into()),
    }
    within(start, Duration::from_secs(1))?;
    Ok("Ann = <u>, R^2 ∩ Ann = <2u>, NoSplit".into())
}

fn rat_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    oracle::random_rationals(rng, n).into_iter().map(Scalar::Rat).collect()
}

fn rat_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::Rat(oracle::random_rational(rng))
}

fn group_axioms(group: &MalcevGroup, rng: &mut ChaCha8Rng, triples: usize) -> Result<(), String> {
    let q = Domain::Rationals;
    let n = group.algebra().dim();
    for t in 0..triples {
        let g = lib(group.element(rat_vector(rng, n)))?;
        let h = lib(group.element(rat_vector(rng, n)))?;
        let k = lib(group.element(rat_vector(rng, n)))?;
        let left = lib(group.mul(&lib(group.mul(&g, &h))?, &k))?;
        let right = lib(group.mul(&g, &lib(group.mul(&h, &k))?))?;
        ensure(left == right, format!("triple {t}: associativity"))?;
        ensure(group.is_identity(&lib(group.mul(&g, &lib(group.inv(&g))?))?), format!("triple {t}: inverse"))?;
        let (a, b) = (rat_scalar(rng), rat_scalar(rng));
        let ga = lib(group.pow(&g, &a))?;
        let gb = lib(group.pow(&g, &b))?;
        ensure(lib(group.mul(&ga, &gb))? == lib(group.pow(&g, &q.add(&a, &b)))?, format!("triple {t}: g^a g^b"))?;
        ensure(lib(group.pow(&ga, &b))? == lib(group.pow(&g, &q.mul(&a, &b)))?, format!("triple {t}: (g^a)^b"))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h3 = oracle::heisenberg();
    let q = Domain::Rationals;
    for _ in 0..200 {
        let (x, y) = (oracle::random_rationals(&mut rng, 3), oracle::random_rationals(&mut rng, 3));
        let xs: Vector = x.iter().cloned().map(Scalar::Rat).collect();
        let ys: Vector = y.iter().cloned().map(Scalar::Rat).collect();
        let z = lib(lrs_core::malcev::bch(&h3, &xs, &ys, MAX_CLASS))?;
        let got: Vec<Rational> = z.iter().map(|s| q.to_rational(s).expect("rational")).collect();
        ensure(got == oracle::heisenberg_product(&x, &y), format!("bch({x:?}, {y:?})"))?;
    }
    let class2 = lib(MalcevGroup::new(h3.clone(), MAX_CLASS))?;
    let (free3, _) = lib(free_nilpotent(2, 3))?;
    let class3 = lib(MalcevGroup::new(free3, MAX_CLASS))?;
    ensure(class2.algebra().class() == 2 && class3.algebra().class() == 3, "classes")?;
    group_axioms(&class2, &mut rng, 100)?;
    group_axioms(&class3, &mut rng, 100)?;
    for _ in 0..100 {
        let (x, y) = (rat_vector(&mut rng, 3), rat_vector(&mut rng, 3));
        let c = lib(class2.commutator(&lib(class2.element(x.clone()))?, &lib(class2.element(y.clone()))?))?;
        ensure(c.log == h3.bracket(&x, &y), "[exp x, exp y] != exp((x,y))")?;
    }
    Ok("200 BCH pairs, 2x100 axiom triples, 100 commutators".into())
}

fn criterion_8() -> Outcome {
    let mut checked = Vec::new();
    for name in ["h3.json", "free-class3-rank2.json"] {
        let ring = ring_fixture(name);
        let group = lib(MalcevGroup::new(lib(verify_nilpotent_lie(&ring))?, MAX_CLASS))?;
        let rep = lib(central_series_and_center(&group))?;
        ensure(rep.closed_under_product.iter().all(|b| *b), format!("{name}: G^i not closed"))?;
        ensure(rep.commutators_descend.iter().all(|b| *b), format!("{name}: [G^i, G] not in G^(i+1)"))?;
        ensure(rep.center_matches_annihilator, format!("{name}: Z(G) != exp(Ann L)"))?;
        let ann = lib(ring.annihilator())?.generators();
        let ann = lib(Subspace::span(Domain::Rationals, ring.dim(), &ann))?;
        ensure(ann == rep.center, format!("{name}: center differs from Ann L"))?;
        // central elements commute with every basis element of the group
        for z in rep.center.basis() {
            let gz = lib(group.element(z.clone()))?;
            for i in 0..ring.dim() {
                let gi = lib(group.element(vec_ops::unit(&Domain::Rationals, ring.dim(), i)))?;
                ensure(
                    group.is_identity(&lib(group.commutator(&gz, &gi))?),
                    format!("{name}: center element does not commute"),
                )?;
            }
        }
        checked.push(format!("{name} center dim {}", rep.center.dim()));
    }
    Ok(checked.join(", "))
}

fn criterion_9() -> Outcome {
    let ring = ring_fixture("h3-plus-abelian.json");
    let group = lib(MalcevGroup::new(lib(verify_nilpotent_lie(&ring))?, MAX_CLASS))?;
    let dec = lib(group_decompose(&group, DEFAULT_SEED))?;
    ensure(dec.factors.len() == 1, format!("{} factors", dec.factors.len()))?;
    let f = &dec.factors[0];
    ensure(
        !f.abelian && f.field == Domain::Rationals && f.basis.len() == 3,
        "factor is not a non-abelian Q-group of dim 3",
    )?;
    let add = dec.addition.as_ref().ok_or("no divisible abelian factor")?;
    ensure(add.abelian && add.basis.len() == 1, "addition is not a divisible line")?;
    ensure(dec.cross_commutators_trivial, "library reports nontrivial cross commutators")?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q = Domain::Rationals;
    for _ in 0..50 {
        let coeffs: Vec<Scalar> = (0..3).map(|_| rat_scalar(&mut rng)).collect();
        let x = vec_ops::combination(&q, ring.dim(), &coeffs, &f.basis);
        let y = vec_ops::scale(&q, &q.from_i64(rng.gen_range(-5..=5)), &add.basis[0]);
        let c = lib(group.commutator(&lib(group.element(x))?, &lib(group.element(y))?))?;
        ensure(group.is_identity(&c), "a cross commutator is not the identity")?;
    }
    Ok("one non-abelian Q-group factor of dim 3, divisible line, cross commutators trivial".into())
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let dir = default_fixture_dir();
    let (first, ok1) = cmd_selftest(Level::Quick, &dir);
    let (second, ok2) = cmd_selftest(Level::Quick, &dir);
    ensure(ok1 && ok2, "selftest quick reported failures")?;
    ensure(first.to_text() == second.to_text() && first.to_json() == second.to_json(), "reports differ")?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("two runs, {} identical bytes", first.to_text().len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("P(f)-bilinearity certificate", criterion_1),
        ("P(f) equals the stable enumerated chain", criterion_2),
        ("local decompositions and r_k", criterion_3),
        ("field of representatives in Q[t]/((t^2-2)^2)", criterion_4),
        ("decomposition of h3 + h3 + Q", criterion_5),
        ("integer example without a split", criterion_6),
        ("BCH and group axioms", criterion_7),
        ("central series and center", criterion_8),
        ("group decomposition of h3 + Q", criterion_9),
        ("deterministic selftest", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} [PASS] {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [FAIL] {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
