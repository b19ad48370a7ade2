//! `analyze`: the canonical pipeline for each document kind.

use std::path::Path;

use lrs_core::abelian::{describe_structure, divisible_bounded_split, Carrier, ModuleDesc, Submodule};
use lrs_core::artinian::{
    field_of_representatives, j_series, local_decomposition, radical, CommutativeAlgebra, ResiduePolicy, DEFAULT_SEED,
};
use lrs_core::bilinear::{BilinearMap, Width, WidthCertificate};
use lrs_core::kernel::Vector;
use lrs_core::malcev::{central_series_and_center, group_decompose, verify_nilpotent_lie, MalcevGroup, MAX_CLASS};
use lrs_core::rings::{
    categoricity_check, central_split_mixed, decompose_bounded, decompose_char0, foundation_addition, RingPresentation,
};
use lrs_core::scalars::{a_of_r, decompose_via_scalars, p_of_f, ScalarRingReport};
use lrs_core::Error;
use num_bigint::BigInt;

use crate::error::{CliError, CliResult, StageExt};
use crate::input::{load_file, Kind, ParsedInput, Structure};
use crate::report::{span_of, Report, Section, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub witnesses: bool,
    pub max_class: usize,
    pub width_bound: usize,
    pub seed: u64,
    /// Minimal polynomial, constant term first, of a field extension to work over.
    pub extension: Option<Vec<String>>,
    /// Fail with `NeedsExtension` instead of describing larger residue fields.
    pub require_base: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            witnesses: false,
            max_class: MAX_CLASS,
            width_bound: 16,
            seed: DEFAULT_SEED,
            extension: None,
            require_base: false,
        }
    }
}

impl Options {
    fn policy(&self) -> ResiduePolicy {
        if self.require_base {
            ResiduePolicy::RequireBase
        } else {
            ResiduePolicy::Describe
        }
    }
}

pub fn cmd_analyze(kind: Kind, path: &Path, opts: &Options) -> CliResult<Report> {
    let input = load_file(path, opts.extension.as_deref())?;
    let interchangeable = |k: Kind| matches!(k, Kind::Ring | Kind::Lie);
    if input.document.kind != kind && !(interchangeable(kind) && interchangeable(input.document.kind)) {
        return Err(CliError::Argument {
            argument: "kind".into(),
            message: format!("{} declares kind {}, not {}", path.display(), input.document.kind.name(), kind.name()),
        });
    }
    let body = analyze_input(&input, kind, opts)?;
    Ok(Report::new(format!("analyze {} {}", kind.name(), file_label(path)), body))
}

pub(crate) fn file_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Runs the pipeline for `kind`; ring and Lie documents may be analyzed as either.
pub fn analyze_input(input: &ParsedInput, kind: Kind, opts: &Options) -> CliResult<Section> {
    let names = &input.document.basis;
    let mut out = Section::new();
    out.text("domain", input.domain.to_string());
    match &input.structure {
        Structure::Bilinear(f) => bilinear(&mut out, f, names, opts)?,
        Structure::Ring(r) => {
            ring(&mut out, r, names, opts)?;
            if kind == Kind::Lie {
                out.group("lie", lie(r, names, opts)?);
            }
        }
        Structure::Algebra(a) => algebra(&mut out, a, opts)?,
        Structure::Module(m) => module(&mut out, m)?,
    }
    out.push("model-theoretic hypotheses", hypotheses());
    Ok(out)
}

fn hypotheses() -> Value {
    Value::List(
        [
            "omega-stability of the structure is assumed, not checked",
            "Morley rank is witnessed only through the finite-dimensional invariants above",
            "Prüfer summands are outside the input format",
        ]
        .iter()
        .map(|s| Value::Text(s.to_string()))
        .collect(),
    )
}

fn generators(s: &Submodule) -> Vec<Vector> {
    s.generators()
}

fn width_text(w: &Width) -> String {
    match w {
        Width::Exact(s) => format!("{s} (exact)"),
        Width::UpperBound { bound, certificate } => {
            let why = match certificate {
                WidthCertificate::ProductGenerators(pairs) => {
                    format!("{} basis products generate the image", pairs.len())
                }
                WidthCertificate::ColumnSums => "column sums of basis products".to_string(),
                WidthCertificate::ScaledValues { variable } => format!("values scale through variable {variable}"),
            };
            format!("at most {bound} ({why})")
        }
    }
}

fn scalars_section(report: &ScalarRingReport, opts: &Options) -> Section {
    let mut s = Section::new();
    s.count("dimension", report.p_basis.dim());
    s.flag("commutative", report.p_basis.is_commutative());
    s.flag("unital", report.p_basis.is_unital());
    if opts.witnesses {
        let mats = report
            .p_basis
            .basis()
            .iter()
            .map(|m| {
                let mut g = Section::new();
                g.matrix("matrix", m);
                Value::Group(g)
            })
            .collect();
        s.push("basis", Value::List(mats));
    }
    s
}

fn bilinear(out: &mut Section, f: &BilinearMap, names: &[String], opts: &Options) -> CliResult<()> {
    let source = f.source();
    let d = source.domain();
    out.text("source", source.to_string());
    out.text("target", f.target().to_string());
    let c = f.two_sided_kernel().stage("two_sided_kernel")?;
    out.text("C(f)", span_of(&d, names, &generators(&c)));
    out.flag("C(f) = M", c == source.whole().stage("two_sided_kernel")?);
    let image = f.image().stage("image")?;
    out.vectors("image", &f.target().domain(), &generators(&image));
    out.flag("full", f.is_full().stage("image")?);
    out.flag("nondegenerate", f.is_nondegenerate().stage("two_sided_kernel")?);
    out.text("width", width_text(&f.width(opts.width_bound).stage("width")?));
    match source {
        Carrier::Vector { .. } => {
            let split = f.foundation_addition_split().stage("foundation_addition_split")?;
            let mut fa = Section::new();
            fa.count("foundation dimension", split.foundation.source().dim());
            fa.count("addition dimension", split.addition.source().dim());
            fa.flag("reassembles", split.reassembles(f));
            if opts.witnesses {
                fa.vectors("foundation basis", &d, &split.foundation_source.vectors);
                fa.vectors("kernel basis", &d, &split.kernel.vectors);
            }
            out.group("foundation/addition", fa);
            if split.foundation.source().dim() == 0 {
                out.text("P(f)", "skipped: the foundation is zero");
                return Ok(());
            }
            let scalars = p_of_f(&split.foundation).stage("p_of_f")?;
            let mut ps = scalars_section(&scalars, opts);
            ps.flag("f is P(f)-bilinear", scalars.certifies_bilinearity(&split.foundation).stage("p_of_f")?);
            out.group("P(f) on the foundation", ps);
            let dec =
                decompose_via_scalars(&split.foundation, opts.policy(), opts.seed).stage("decompose_via_scalars")?;
            let mut comps = Vec::new();
            for comp in &dec.components {
                let mut s = Section::new();
                s.count("source dimension", comp.map.source().dim());
                s.count("target dimension", comp.map.target().dim());
                s.text("residue field", comp.factor.residue.field.to_string());
                s.count("nilpotency index", comp.factor.nilpotency_index);
                s.count("r_k", j_series(&comp.factor).stage("j_series")?.r_k);
                if opts.witnesses {
                    s.vectors("source basis", &d, &comp.source_basis);
                    s.matrix("idempotent", &comp.idempotent);
                }
                comps.push(Value::Group(s));
            }
            out.push("components", Value::List(comps));
        }
        Carrier::Abelian(_) => {
            let split = f.torsion_split().stage("torsion_split")?;
            let mut ts = Section::new();
            ts.text("divisible source", split.divisible.source().to_string());
            ts.text("bounded source", split.bounded.source().to_string());
            out.group("torsion split", ts);
        }
    }
    Ok(())
}

fn ring(out: &mut Section, r: &RingPresentation, names: &[String], opts: &Options) -> CliResult<()> {
    let c = r.carrier();
    let d = c.domain();
    out.text("carrier", c.to_string());
    let flags = r.flags();
    let mut fl = Section::new();
    fl.flag("associative", flags.associative).flag("commutative", flags.commutative).flag("lie", flags.lie);
    out.group("identities", fl);
    let ann = r.annihilator().stage("annihilator")?;
    let square = r.square_ideal().stage("square_ideal")?;
    let delta = ann.intersection(&square).stage("annihilator")?;
    out.text("Ann(R)", span_of(&d, names, &generators(&ann)));
    out.text("R^2", span_of(&d, names, &generators(&square)));
    out.text("R^2 ∩ Ann(R)", span_of(&d, names, &generators(&delta)));
    out.flag("regular", r.is_regular().stage("is_regular")?);
    match foundation_addition(r) {
        Ok(fa) => {
            let mut s = Section::new();
            s.count("foundation dimension", fa.foundation_basis.len());
            s.count("addition dimension", fa.addition_basis.len());
            if opts.witnesses {
                s.vectors("foundation basis", &d, &fa.foundation_basis.vectors);
                s.vectors("addition basis", &d, &fa.addition_basis.vectors);
            }
            out.group("foundation/addition", s);
        }
        Err(Error::NoSplit(why)) => {
            out.text("foundation/addition", format!("no split: {why}"));
        }
        Err(e) => return Err(CliError::Pipeline { stage: "foundation_addition", source: e }),
    }
    let field = match c {
        Carrier::Vector { field, .. } => field.clone(),
        Carrier::Abelian(desc) => {
            if !desc.free_part().is_empty() {
                out.text("scalar stages", "skipped: free Z summands carry no field of scalars");
                return Ok(());
            }
            let split = central_split_mixed(r).stage("central_split_mixed")?;
            let mut s = Section::new();
            s.count("divisible dimension", split.divisible.dim());
            s.count("bounded dimension", split.bounded.dim());
            s.flag("mutually annihilating", split.mutually_annihilating);
            out.group("central split", s);
            return Ok(());
        }
    };
    if r.is_zero_multiplication() {
        out.text("scalar stages", "skipped: R^2 = 0, the ring is its own addition");
        return Ok(());
    }
    let scalars = a_of_r(r).stage("a_of_r")?;
    out.group("A(R)", scalars_section(&scalars, opts));
    if field.characteristic() == 0 {
        let rep = decompose_char0(r, opts.policy(), opts.seed).stage("decompose_char0")?;
        let mut comps = Vec::new();
        for comp in &rep.components {
            let mut s = Section::new();
            s.count("dimension", comp.ring.dim());
            s.count("A(R_i) dimension", comp.scalar_factor.algebra.dim());
            s.text("residue field", comp.residue_field.to_string());
            s.count("residue degree", comp.residue_degree);
            s.count("dimension over residue field", comp.dim_over_residue);
            s.push("J-series layers", Value::Vector(comp.j_series.layers.iter().map(|x| x.to_string()).collect()));
            s.count("r_k", comp.j_series.r_k);
            if opts.witnesses {
                s.vectors("basis", &d, &comp.basis);
            }
            comps.push(Value::Group(s));
        }
        out.push("components", Value::List(comps));
        let mut add = Section::new();
        add.count("dimension", rep.addition_basis.len());
        add.flag("zero multiplication", rep.addition.is_zero_multiplication());
        if opts.witnesses {
            add.vectors("basis", &d, &rep.addition_basis);
        }
        out.group("addition", add);
        out.flag("reassembles", rep.reassembles(r).stage("decompose_char0")?);
        out.flag("cross products vanish", rep.cross_products_vanish(r));
        let verdict = categoricity_check(r, opts.seed).stage("categoricity_check")?;
        let mut s = Section::new();
        s.text("verdict", if verdict.satisfied { "structurally satisfied" } else { "not satisfied" });
        s.count("components", verdict.components);
        s.count("addition dimension", verdict.addition_dim);
        s.push("assumptions", Value::List(verdict.assumptions.iter().map(|a| Value::Text(a.clone())).collect()));
        out.group("categoricity", s);
    } else {
        let rep = decompose_bounded(r, opts.policy(), opts.seed).stage("decompose_bounded")?;
        let mut comps = Vec::new();
        for factor in &rep.factors {
            let mut s = Section::new();
            s.count("dimension", factor.ring.dim());
            s.text("residue field", factor.residue_field.to_string());
            s.count("nilpotency index", factor.scalar_factor.nilpotency_index);
            s.count("r_k", j_series(&factor.scalar_factor).stage("j_series")?.r_k);
            if opts.witnesses {
                s.vectors("basis", &d, &factor.basis);
            }
            comps.push(Value::Group(s));
        }
        out.push("central factors", Value::List(comps));
        out.flag("mutually annihilating", rep.mutually_annihilating);
    }
    Ok(())
}

fn lie(r: &RingPresentation, names: &[String], opts: &Options) -> CliResult<Section> {
    let l = verify_nilpotent_lie(r).stage("verify_nilpotent_lie")?;
    let d = l.field();
    let mut s = Section::new();
    s.count("class", l.class());
    s.push(
        "lower central series",
        Value::Vector(l.lower_central_series().iter().map(|x| x.dim().to_string()).collect()),
    );
    s.text("center", span_of(&d, names, l.center().stage("verify_nilpotent_lie")?.basis()));
    let group = MalcevGroup::new(l, opts.max_class).stage("malcev_group")?;
    let cs = central_series_and_center(&group).stage("central_series_and_center")?;
    s.flag("G^i = exp(L^i)", cs.closed_under_product.iter().all(|&b| b) && cs.commutators_descend.iter().all(|&b| b));
    s.flag("Z(G) = exp(Ann L)", cs.center_matches_annihilator);
    let dec = group_decompose(&group, opts.seed).stage("group_decompose")?;
    let mut factors = Vec::new();
    for f in &dec.factors {
        let mut g = Section::new();
        g.count("dimension", f.basis.len());
        g.text("field", f.field.to_string());
        g.flag("abelian", f.abelian);
        if opts.witnesses {
            g.vectors("basis", &d, &f.basis);
        }
        factors.push(Value::Group(g));
    }
    s.push("group factors", Value::List(factors));
    s.count("divisible abelian factor dimension", dec.addition.as_ref().map_or(0, |a| a.basis.len()));
    s.flag("cross commutators trivial", dec.cross_commutators_trivial);
    Ok(s)
}

fn algebra(out: &mut Section, a: &CommutativeAlgebra, opts: &Options) -> CliResult<()> {
    let d = a.field().clone();
    out.count("dimension", a.dim());
    out.vector("unit", &d, a.unit());
    let j = radical(a).stage("radical")?;
    out.count("radical dimension", j.dim());
    if opts.witnesses {
        out.vectors("radical basis", &d, j.basis());
    }
    let factors = local_decomposition(a, opts.policy(), opts.seed).stage("local_decomposition")?;
    let mut items = Vec::new();
    for lf in &factors {
        let mut s = Section::new();
        s.vector("idempotent", &d, &lf.idempotent);
        s.count("dimension", lf.algebra.dim());
        s.count("nilpotency index", lf.nilpotency_index);
        s.text("residue field", lf.residue.field.to_string());
        s.count("residue degree", lf.residue.degree());
        let js = j_series(lf).stage("j_series")?;
        s.push("J-series layers", Value::Vector(js.layers.iter().map(|x| x.to_string()).collect()));
        s.count("r_k", js.r_k);
        let rep = field_of_representatives(lf).stage("field_of_representatives")?;
        let mut f = Section::new();
        f.vector("generator", &d, &rep.generator);
        f.flag("isomorphic to residue field", rep.is_isomorphic_to_residue(lf).stage("field_of_representatives")?);
        s.group("field of representatives", f);
        items.push(Value::Group(s));
    }
    out.push("local factors", Value::List(items));
    Ok(())
}

fn module(out: &mut Section, m: &ModuleDesc) -> CliResult<()> {
    out.text("module", m.to_string());
    let split = divisible_bounded_split(m).stage("divisible_bounded_split")?;
    let mut s = Section::new();
    s.text("divisible part", split.divisible.to_string());
    s.text("bounded part", split.bounded.to_string());
    s.text("exponent of bounded part", split.bounded.exponent().map_or("1".into(), |e| e.to_string()));
    out.group("divisible/bounded split", s);
    let torsion: Vec<BigInt> =
        m.summands().iter().filter(|s| s.relation() > 0).map(|s| BigInt::from(s.relation())).collect();
    out.text("torsion structure", describe_structure(&torsion, 0));
    Ok(())
}
