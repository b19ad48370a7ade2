//! Structure-constant documents: spanned JSON parsing, validation and serialization.

use std::collections::BTreeMap;

use json_spanned_value::spanned;
use lrs_core::abelian::{Carrier, ModuleDesc, Summand};
use lrs_core::artinian::CommutativeAlgebra;
use lrs_core::bilinear::BilinearMap;
use lrs_core::kernel::{vec_ops, Domain, Matrix, Scalar, Vector};
use lrs_core::rings::RingPresentation;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult, Location};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Kind {
    Bilinear,
    Ring,
    Lie,
    CommutativeAlgebra,
    Module,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Bilinear, Kind::Ring, Kind::Lie, Kind::CommutativeAlgebra, Kind::Module];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Bilinear => "bilinear",
            Kind::Ring => "ring",
            Kind::Lie => "lie",
            Kind::CommutativeAlgebra => "commutative-algebra",
            Kind::Module => "module",
        }
    }

    pub fn from_name(name: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// The `"domain"` field of a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainSpec {
    Rationals,
    Integers,
    PrimeField(u64),
    Residues(u64),
    /// `base[a]/(minpoly)`, coefficients constant term first.
    Extension {
        base: Box<DomainSpec>,
        minpoly: Vec<String>,
    },
}

impl DomainSpec {
    pub fn resolve(&self) -> lrs_core::Result<Domain> {
        match self {
            DomainSpec::Rationals => Ok(Domain::Rationals),
            DomainSpec::Integers => Ok(Domain::Integers),
            DomainSpec::PrimeField(p) => Domain::prime_field(*p),
            DomainSpec::Residues(m) => Domain::residues(*m),
            DomainSpec::Extension { base, minpoly } => {
                let base = base.resolve()?;
                let coeffs = minpoly.iter().map(|c| base.parse(c)).collect::<lrs_core::Result<Vec<_>>>()?;
                Domain::extension(base, coeffs)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            DomainSpec::Rationals => json!("Q"),
            DomainSpec::Integers => json!("Z"),
            DomainSpec::PrimeField(p) => json!({ "gf": p }),
            DomainSpec::Residues(m) => json!({ "zmod": m }),
            DomainSpec::Extension { base, minpoly } => json!({ "ext": { "base": base.to_json(), "minpoly": minpoly } }),
        }
    }
}

/// The document model: everything is kept as written so that serialization round-trips.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDocument {
    pub kind: Kind,
    pub domain: DomainSpec,
    pub summands: Option<Vec<String>>,
    /// Summands of the target of a bilinear map over Z; defaults to free lines.
    pub target_summands: Option<Vec<String>>,
    pub basis: Vec<String>,
    /// `table[i][j]` is the coordinate sequence of `bᵢ·bⱼ`.
    pub table: Vec<Vec<Vec<String>>>,
}

impl InputDocument {
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("kind".into(), json!(self.kind.name()));
        obj.insert("domain".into(), self.domain.to_json());
        if let Some(s) = &self.summands {
            obj.insert("summands".into(), json!(s));
        }
        if let Some(s) = &self.target_summands {
            obj.insert("target_summands".into(), json!(s));
        }
        obj.insert("basis".into(), json!(self.basis));
        obj.insert("table".into(), json!(self.table));
        Value::Object(obj)
    }

    pub fn serialize(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json()).expect("documents serialize");
        out.push('\n');
        out
    }
}

/// A validated input, built into the object its kind describes.
#[derive(Clone, Debug)]
pub enum Structure {
    Bilinear(BilinearMap),
    /// Rings and Lie rings; Lie axioms are checked by the pipelines.
    Ring(RingPresentation),
    Algebra(CommutativeAlgebra),
    Module(ModuleDesc),
}

#[derive(Clone, Debug)]
pub struct ParsedInput {
    pub document: InputDocument,
    pub structure: Structure,
    /// The coefficient domain after any `--extension`.
    pub domain: Domain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Site {
    Root,
    Kind,
    Domain,
    Summands,
    TargetSummands,
    Basis,
    Table,
    Entry(usize, usize, usize),
}

struct Invalid {
    site: Site,
    invariant: &'static str,
    message: String,
}

fn invalid(site: Site, invariant: &'static str, message: impl Into<String>) -> Invalid {
    Invalid { site, invariant, message: message.into() }
}

const KEYS: [&str; 6] = ["kind", "domain", "summands", "target_summands", "basis", "table"];

struct Walker {
    spans: BTreeMap<Site, usize>,
}

type Node = spanned::Value;

impl Walker {
    fn mark(&mut self, site: Site, node: &Node) {
        self.spans.insert(site, node.start());
    }

    fn string(&self, node: &Node, site: Site, what: &str) -> Result<String, Invalid> {
        node.as_string()
            .map(str::to_string)
            .ok_or_else(|| invalid(site, "type", format!("{what} must be a string, got {}", node.type_str())))
    }

    fn strings(&mut self, node: &Node, site: Site, what: &str) -> Result<Vec<String>, Invalid> {
        let items =
            node.as_array().ok_or_else(|| invalid(site, "type", format!("{what} must be an array of strings")))?;
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            self.mark(site, item);
            out.push(self.string(item, site, what)?);
        }
        self.mark(site, node);
        Ok(out)
    }

    fn domain(&mut self, node: &Node) -> Result<DomainSpec, Invalid> {
        let bad = |msg: String| invalid(Site::Domain, "domain descriptor", msg);
        if let Some(s) = node.as_string() {
            return match s {
                "Q" => Ok(DomainSpec::Rationals),
                "Z" => Ok(DomainSpec::Integers),
                other => Err(bad(format!(
                    "unknown domain {other:?}; expected \"Q\", \"Z\", {{\"gf\": p}}, {{\"zmod\": m}} or {{\"ext\": …}}"
                ))),
            };
        }
        let obj =
            node.as_object().ok_or_else(|| bad(format!("expected a string or an object, got {}", node.type_str())))?;
        if obj.len() != 1 {
            return Err(bad("a domain object has exactly one key".into()));
        }
        let (key, value) = obj.iter().next().expect("one entry");
        self.spans.insert(Site::Domain, value.start());
        let modulus = |v: &Node| {
            v.as_number().and_then(|n| n.as_u64()).ok_or_else(|| bad("modulus must be a non-negative integer".into()))
        };
        match key.get_ref().as_str() {
            "gf" => Ok(DomainSpec::PrimeField(modulus(value)?)),
            "zmod" => Ok(DomainSpec::Residues(modulus(value)?)),
            "ext" => {
                let inner =
                    value.as_object().ok_or_else(|| bad("\"ext\" takes {\"base\": …, \"minpoly\": […]}".into()))?;
                for (k, _) in inner.iter() {
                    if k.get_ref() != "base" && k.get_ref() != "minpoly" {
                        self.spans.insert(Site::Domain, k.start());
                        return Err(bad(format!("unknown key {:?} in \"ext\"", k.get_ref())));
                    }
                }
                let base_node = inner.get("base").ok_or_else(|| bad("\"ext\" needs a \"base\"".into()))?;
                let base = self.domain(base_node)?;
                if !matches!(base, DomainSpec::Rationals | DomainSpec::PrimeField(_)) {
                    self.spans.insert(Site::Domain, base_node.start());
                    return Err(bad("an extension base must be \"Q\" or {\"gf\": p}".into()));
                }
                let poly_node = inner.get("minpoly").ok_or_else(|| bad("\"ext\" needs a \"minpoly\"".into()))?;
                self.spans.insert(Site::Domain, poly_node.start());
                let minpoly = self.strings(poly_node, Site::Domain, "minpoly")?;
                self.spans.insert(Site::Domain, node.start());
                Ok(DomainSpec::Extension { base: Box::new(base), minpoly })
            }
            other => {
                self.spans.insert(Site::Domain, key.start());
                Err(bad(format!("unknown domain key {other:?}")))
            }
        }
    }

    fn table(&mut self, node: &Node) -> Result<Vec<Vec<Vec<String>>>, Invalid> {
        let shape = |site| invalid(site, "table shape", "table is an array of rows of coordinate arrays");
        let rows = node.as_array().ok_or_else(|| shape(Site::Table))?;
        let mut table = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let cells = row.as_array().ok_or_else(|| {
                self.spans.insert(Site::Table, row.start());
                shape(Site::Table)
            })?;
            let mut out_row = Vec::with_capacity(cells.len());
            for (j, cell) in cells.iter().enumerate() {
                let entries = cell.as_array().ok_or_else(|| {
                    self.spans.insert(Site::Table, cell.start());
                    shape(Site::Table)
                })?;
                let mut coords = Vec::with_capacity(entries.len());
                for (k, e) in entries.iter().enumerate() {
                    let site = Site::Entry(i, j, k);
                    self.mark(site, e);
                    coords.push(self.string(e, site, "a table entry")?);
                }
                self.spans.insert(Site::Entry(i, j, usize::MAX), cell.start());
                out_row.push(coords);
            }
            self.spans.insert(Site::Entry(i, usize::MAX, usize::MAX), row.start());
            table.push(out_row);
        }
        Ok(table)
    }

    fn document(&mut self, root: &Node) -> Result<InputDocument, Invalid> {
        self.mark(Site::Root, root);
        let obj = root.as_object().ok_or_else(|| invalid(Site::Root, "type", "the document must be a JSON object"))?;
        for (key, _) in obj.iter() {
            if !KEYS.contains(&key.get_ref().as_str()) {
                self.spans.insert(Site::Root, key.start());
                return Err(invalid(
                    Site::Root,
                    "known keys",
                    format!("unknown key {:?}; expected one of {KEYS:?}", key.get_ref()),
                ));
            }
        }
        let required = |name: &str, site| {
            obj.get(name).ok_or_else(|| invalid(site, "required keys", format!("missing key {name:?}")))
        };
        let kind_node = required("kind", Site::Root)?;
        self.mark(Site::Kind, kind_node);
        let kind_name = self.string(kind_node, Site::Kind, "kind")?;
        let kind = Kind::from_name(&kind_name).ok_or_else(|| {
            invalid(
                Site::Kind,
                "kind",
                format!("unknown kind {kind_name:?}; expected bilinear, ring, lie, commutative-algebra or module"),
            )
        })?;
        let domain_node = required("domain", Site::Root)?;
        self.mark(Site::Domain, domain_node);
        let domain = self.domain(domain_node)?;
        self.mark(Site::Domain, domain_node);
        let summands = match obj.get("summands") {
            Some(n) => Some(self.strings(n, Site::Summands, "summands")?),
            None => None,
        };
        let target_summands = match obj.get("target_summands") {
            Some(n) => Some(self.strings(n, Site::TargetSummands, "target_summands")?),
            None => None,
        };
        let basis_node = required("basis", Site::Root)?;
        let basis = self.strings(basis_node, Site::Basis, "basis")?;
        let table = match obj.get("table") {
            Some(n) => {
                self.mark(Site::Table, n);
                self.table(n)?
            }
            None if kind == Kind::Module => Vec::new(),
            None => return Err(invalid(Site::Root, "required keys", "missing key \"table\"")),
        };
        Ok(InputDocument { kind, domain, summands, target_summands, basis, table })
    }

    fn locate(&self, text: &str, site: Site) -> Location {
        let offset = match site {
            Site::Entry(i, j, _) => self
                .spans
                .get(&site)
                .or_else(|| self.spans.get(&Site::Entry(i, j, usize::MAX)))
                .or_else(|| self.spans.get(&Site::Entry(i, usize::MAX, usize::MAX)))
                .or_else(|| self.spans.get(&Site::Table))
                .copied(),
            other => self.spans.get(&other).or_else(|| self.spans.get(&Site::Root)).copied(),
        };
        Location::of_offset(text, offset.unwrap_or(0))
    }
}

/// Parses, validates and builds a document. `extension` (coefficients of a minimal
/// polynomial, constant term first) re-reads the document over an extension of its field.
pub fn load(text: &str, path: &str, extension: Option<&[String]>) -> CliResult<ParsedInput> {
    let root: Node = json_spanned_value::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_string(),
        location: Location { line: e.line(), column: e.column() },
        message: e.to_string(),
    })?;
    let mut walker = Walker { spans: BTreeMap::new() };
    let located = |walker: &Walker, e: Invalid| CliError::Validation {
        path: path.to_string(),
        location: walker.locate(text, e.site),
        invariant: e.invariant,
        message: e.message,
    };
    let document = match walker.document(&root) {
        Ok(d) => d,
        Err(e) => return Err(located(&walker, e)),
    };
    let domain = match document.domain.resolve() {
        Ok(d) => d,
        Err(e) => return Err(located(&walker, invalid(Site::Domain, "domain descriptor", e.to_string()))),
    };
    let domain = match extension {
        Some(coeffs) => extend(&domain, coeffs)?,
        None => domain,
    };
    match build(&document, &domain) {
        Ok(structure) => Ok(ParsedInput { document, structure, domain }),
        Err(e) => Err(located(&walker, e)),
    }
}

/// Reads and loads a file.
pub fn load_file(path: &std::path::Path, extension: Option<&[String]>) -> CliResult<ParsedInput> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: label.clone(), source })?;
    load(&text, &label, extension)
}

fn extend(base: &Domain, coeffs: &[String]) -> CliResult<Domain> {
    let arg = |message: String| CliError::Argument { argument: "--extension".into(), message };
    if !matches!(base, Domain::Rationals | Domain::PrimeField(_)) {
        return Err(arg(format!("only Q and GF(p) documents can be extended, this one is over {base}")));
    }
    let parsed =
        coeffs.iter().map(|c| base.parse(c)).collect::<lrs_core::Result<Vec<_>>>().map_err(|e| arg(e.to_string()))?;
    Domain::extension(base.clone(), parsed).map_err(|e| arg(e.to_string()))
}

fn summands(names: &Option<Vec<String>>, site: Site) -> Result<Option<Vec<Summand>>, Invalid> {
    names
        .as_ref()
        .map(|s| s.iter().map(|x| Summand::parse(x).map_err(|e| invalid(site, "summand", e.to_string()))).collect())
        .transpose()
}

fn build(doc: &InputDocument, domain: &Domain) -> Result<Structure, Invalid> {
    let n = doc.basis.len();
    for (i, name) in doc.basis.iter().enumerate() {
        if name.is_empty() || doc.basis[..i].contains(name) {
            return Err(invalid(
                Site::Basis,
                "basis names",
                format!("basis names must be distinct and non-empty, {name:?} is not"),
            ));
        }
    }
    let source = Carrier::over(domain, n, summands(&doc.summands, Site::Summands)?)
        .map_err(|e| invalid(Site::Summands, "summands", e.to_string()))?;
    if doc.kind == Kind::Module {
        if !doc.table.is_empty() {
            return Err(invalid(Site::Table, "table shape", "a module document has no multiplication table"));
        }
        return Ok(Structure::Module(source.desc()));
    }
    if doc.target_summands.is_some() && doc.kind != Kind::Bilinear {
        return Err(invalid(Site::TargetSummands, "target summands", "only bilinear maps have a separate target"));
    }
    if doc.table.len() != n || doc.table.iter().any(|row| row.len() != n) {
        return Err(invalid(Site::Table, "table shape", format!("the table must be {n} × {n} for {n} basis elements")));
    }
    let m = match doc.kind {
        Kind::Bilinear => doc.table.first().and_then(|r| r.first()).map_or(0, |c| c.len()),
        _ => n,
    };
    let target = match doc.kind {
        Kind::Bilinear => Carrier::over(domain, m, summands(&doc.target_summands, Site::TargetSummands)?)
            .map_err(|e| invalid(Site::TargetSummands, "summands", e.to_string()))?,
        _ => source.clone(),
    };
    let mut tensor: Vec<Vec<Vector>> = Vec::with_capacity(n);
    for (i, row) in doc.table.iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (j, cell) in row.iter().enumerate() {
            if cell.len() != m {
                return Err(invalid(
                    Site::Entry(i, j, usize::MAX),
                    "table shape",
                    format!("entry ({i}, {j}) has {} coordinates, expected {m}", cell.len()),
                ));
            }
            let v = cell
                .iter()
                .enumerate()
                .map(|(k, lit)| {
                    target
                        .coordinate_domain(k)
                        .parse(lit)
                        .map_err(|e| invalid(Site::Entry(i, j, k), "exact literal", e.to_string()))
                })
                .collect::<Result<Vec<Scalar>, _>>()?;
            out.push(v);
        }
        tensor.push(out);
    }
    let structure_error = |e: lrs_core::Error| invalid(Site::Table, "structure constants", e.to_string());
    match doc.kind {
        Kind::Bilinear => Ok(Structure::Bilinear(BilinearMap::new(source, target, tensor).map_err(structure_error)?)),
        Kind::Ring | Kind::Lie => Ok(Structure::Ring(RingPresentation::new(source, tensor).map_err(structure_error)?)),
        Kind::CommutativeAlgebra => {
            let field = source
                .field()
                .cloned()
                .ok_or_else(|| invalid(Site::Domain, "field coefficients", "a commutative algebra needs a field"))?;
            let unit = find_unit(&field, &tensor)
                .ok_or_else(|| invalid(Site::Table, "unital", "the table has no identity element"))?;
            Ok(Structure::Algebra(CommutativeAlgebra::new(field, tensor, unit).map_err(structure_error)?))
        }
        Kind::Module => unreachable!("handled above"),
    }
}

/// `u` with `u·bⱼ = bⱼ` for every basis element, if the table has one.
fn find_unit(field: &Domain, tensor: &[Vec<Vector>]) -> Option<Vector> {
    let n = tensor.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            rows.push((0..n).map(|i| tensor[i][j][k].clone()).collect());
            rhs.push(if j == k { field.one() } else { field.zero() });
        }
    }
    let u = Matrix::from_rows(field.clone(), n, rows).solve(&rhs).ok()??;
    let acts = (0..n).all(|j| {
        let prod = (0..n).fold(vec_ops::zero(field, n), |acc, i| vec_ops::axpy(field, &acc, &u[i], &tensor[j][i]));
        prod == vec_ops::unit(field, n, j)
    });
    acts.then_some(u)
}

/// Parses `text` as a document only, without building it.
pub fn parse_model(text: &str, path: &str) -> CliResult<InputDocument> {
    load(text, path, None).map(|p| p.document)
}

#[cfg(test)]
mod tests {
    use super::*;

    const H3: &str = r#"{
  "kind": "ring",
  "domain": "Q",
  "basis": ["x", "y", "z"],
  "table": [
    [["0","0","0"], ["0","0","1"], ["0","0","0"]],
    [["0","0","-1"], ["0","0","0"], ["0","0","0"]],
    [["0","0","0"], ["0","0","0"], ["0","0","0"]]
  ]
}"#;

    #[test]
    fn round_trip() {
        let doc = parse_model(H3, "h3").unwrap();
        let again = parse_model(&doc.serialize(), "again").unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn bad_literal_is_located() {
        let text = H3.replace("[\"0\",\"0\",\"-1\"]", "[\"0\",\"0\",\"1/0\"]");
        match load(&text, "f", None) {
            Err(CliError::Validation { location, invariant, .. }) => {
                assert_eq!(invariant, "exact literal");
                assert_eq!(location.line, 7);
                assert_eq!(location.column, 15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        match load("{\n  \"kind\": ,\n}", "f", None) {
            Err(CliError::Parse { location, .. }) => assert_eq!(location.line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_and_kinds() {
        let text = H3.replace("\"basis\"", "\"bases\"");
        assert!(matches!(load(&text, "f", None), Err(CliError::Validation { invariant: "known keys", .. })));
        let text = H3.replace("\"ring\"", "\"group\"");
        match load(&text, "f", None) {
            Err(CliError::Validation { invariant: "kind", location, .. }) => assert_eq!(location.line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn units_are_found() {
        let q = Domain::Rationals;
        let i = |n| q.from_i64(n);
        // Q[t]/(t²) on the basis t, 1
        let t = vec![vec![vec![i(0), i(0)], vec![i(1), i(0)]], vec![vec![i(1), i(0)], vec![i(0), i(1)]]];
        assert_eq!(find_unit(&q, &t), Some(vec![i(0), i(1)]));
        let zero = vec![vec![vec![i(0)]]];
        assert_eq!(find_unit(&q, &zero), None);
    }
}
