//! `malcev`: group operations in log coordinates of a nilpotent Lie algebra.

use std::path::Path;

use lrs_core::kernel::{Domain, Scalar, Vector};
use lrs_core::malcev::{group_decompose, verify_nilpotent_lie, GroupElement, MalcevGroup};

use crate::analyze::{file_label, Options};
use crate::error::{CliError, CliResult, StageExt};
use crate::input::{load_file, Structure};
use crate::report::{span_of, tuple, Report, Section, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MalcevOp {
    Mul { left: String, right: String },
    Pow { element: String, exponent: String },
    Comm { left: String, right: String },
    Decompose,
}

impl MalcevOp {
    fn name(&self) -> &'static str {
        match self {
            MalcevOp::Mul { .. } => "mul",
            MalcevOp::Pow { .. } => "pow",
            MalcevOp::Comm { .. } => "comm",
            MalcevOp::Decompose => "decompose",
        }
    }
}

/// Reads `(a,b,c)` or a basis name.
pub fn parse_element(text: &str, domain: &Domain, names: &[String]) -> CliResult<Vector> {
    let bad = |message: String| CliError::Argument { argument: text.to_string(), message };
    let t = text.trim();
    if let Some(i) = names.iter().position(|n| n == t) {
        return Ok((0..names.len()).map(|j| if i == j { domain.one() } else { domain.zero() }).collect());
    }
    let inner = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(|| {
        bad(format!("expected a basis name ({}) or a coordinate tuple like (1,0,1/2)", names.join(", ")))
    })?;
    let v: Vector =
        inner.split(',').map(|c| domain.parse(c).map_err(|e| bad(e.to_string()))).collect::<CliResult<_>>()?;
    if v.len() != names.len() {
        return Err(bad(format!("{} coordinates given, the algebra has dimension {}", v.len(), names.len())));
    }
    Ok(v)
}

pub fn cmd_malcev(op: &MalcevOp, path: &Path, opts: &Options) -> CliResult<Report> {
    let input = load_file(path, opts.extension.as_deref())?;
    let Structure::Ring(ring) = &input.structure else {
        return Err(CliError::Argument {
            argument: "file".into(),
            message: format!(
                "{} is a {} document; malcev needs a lie or ring table",
                path.display(),
                input.document.kind.name()
            ),
        });
    };
    let names = &input.document.basis;
    let algebra = verify_nilpotent_lie(ring).stage("verify_nilpotent_lie")?;
    let d = algebra.field();
    let group = MalcevGroup::new(algebra, opts.max_class).stage("malcev_group")?;
    let element = |text: &str| -> CliResult<GroupElement> {
        let log = parse_element(text, &d, names)?;
        group.element(log).stage("malcev_group")
    };
    let mut out = Section::new();
    out.count("class", group.algebra().class());
    match op {
        MalcevOp::Mul { left, right } => {
            let (g, h) = (element(left)?, element(right)?);
            out.vector("g", &d, &g.log).vector("h", &d, &h.log);
            out.vector("g*h", &d, &group.mul(&g, &h).stage("bch")?.log);
        }
        MalcevOp::Pow { element: text, exponent } => {
            let g = element(text)?;
            let a: Scalar = d
                .parse(exponent)
                .map_err(|e| CliError::Argument { argument: exponent.clone(), message: e.to_string() })?;
            out.vector("g", &d, &g.log).text("exponent", d.format(&a));
            out.vector("g^a", &d, &group.pow(&g, &a).stage("pow")?.log);
        }
        MalcevOp::Comm { left, right } => {
            let (g, h) = (element(left)?, element(right)?);
            let rep = group.commutator_report(&g, &h).stage("commutator")?;
            out.vector("g", &d, &g.log).vector("h", &d, &h.log);
            out.vector("[g,h]", &d, &rep.commutator.log);
            out.vector("(log g, log h)", &d, &rep.bracket);
            out.flag("leading term matches bracket", rep.leading_term_matches);
            out.flag("exact at class two", rep.exact_at_class_two);
        }
        MalcevOp::Decompose => {
            let dec = group_decompose(&group, opts.seed).stage("group_decompose")?;
            let mut factors = Vec::new();
            for f in &dec.factors {
                let mut s = Section::new();
                s.text("log span", span_of(&d, names, &f.basis));
                s.count("dimension", f.basis.len());
                s.count("class", f.algebra.class());
                s.text("field", f.field.to_string());
                s.flag("abelian", f.abelian);
                factors.push(Value::Group(s));
            }
            out.push("factors", Value::List(factors));
            match &dec.addition {
                Some(a) => {
                    let mut s = Section::new();
                    s.text("log span", span_of(&d, names, &a.basis));
                    s.count("dimension", a.basis.len());
                    out.group("divisible abelian factor", s);
                }
                None => {
                    out.text("divisible abelian factor", "trivial");
                }
            }
            out.flag("cross commutators trivial", dec.cross_commutators_trivial);
        }
    }
    let args = match op {
        MalcevOp::Mul { left, right } | MalcevOp::Comm { left, right } => format!(" {left} {right}"),
        MalcevOp::Pow { element, exponent } => format!(" {element} {exponent}"),
        MalcevOp::Decompose => String::new(),
    };
    Ok(Report::new(format!("malcev {} {}{args}", op.name(), file_label(path)), out))
}

/// The result coordinates of a report, as printed.
pub fn result_tuple(report: &Report) -> Option<String> {
    ["g*h", "g^a", "[g,h]"].iter().find_map(|k| match report.body.get(k) {
        Some(Value::Vector(c)) => Some(tuple(c)),
        _ => None,
    })
}
