//! JSON file formats and report structures shared with the command-line
//! front end.
//!
//! Every scalar in the formats is a rational written as a string, `"p"` or
//! `"p/q"` with `q > 0`; there is no floating point anywhere. Matrices are
//! dense row grids and act on coordinate columns (the image of basis
//! vector `j` is column `j`); brackets and pair actions are sparse.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cochain::CochainPair;
use crate::error::Error;
use crate::extension::{induced_fiber_differential, AbelianExtension, ExtensionCocycle};
use crate::deformation::TruncatedDeformation;
use crate::linalg::{Matrix, Rational};
use crate::lts::{Mdlts, ModifiedDifferential, Representation, TripleSystem};
use crate::tensor::TensorMap;

/// Errors attributable to the input files rather than the mathematics.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Parse `"p"` or `"p/q"` with `q > 0` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, IoError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        None => (s, "1"),
        Some((n, d)) => (n.trim(), d.trim()),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| IoError::Parse(format!("invalid integer {num:?} in rational {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| IoError::Parse(format!("invalid integer {den:?} in rational {s:?}")))?;
    if d <= BigInt::zero() {
        return Err(IoError::Parse(format!(
            "denominator must be positive in rational {s:?}"
        )));
    }
    Ok(Rational::new(n, d))
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn matrix_from_strings(rows: &[Vec<String>], nrows: usize, ncols: usize, what: &str) -> Result<Matrix, IoError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(IoError::Parse(format!(
            "{what} must be a {nrows} x {ncols} grid of rationals"
        )));
    }
    let mut data = Vec::with_capacity(nrows * ncols);
    for row in rows {
        for cell in row {
            data.push(parse_rational(cell)?);
        }
    }
    Ok(Matrix::new(nrows, ncols, data))
}

pub fn matrix_to_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(format_rational).collect())
        .collect()
}

/// One sparse multilinear entry: the bracket of `args` has the listed
/// output coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub args: Vec<usize>,
    pub out: BTreeMap<String, String>,
}

fn entries_from_tensor(t: &TensorMap) -> Vec<BracketEntry> {
    let mut grouped: BTreeMap<Vec<usize>, BTreeMap<String, String>> = BTreeMap::new();
    for (args, o, v) in t.iter_nonzero() {
        grouped
            .entry(args)
            .or_default()
            .insert(o.to_string(), format_rational(v));
    }
    grouped
        .into_iter()
        .map(|(args, out)| BracketEntry { args, out })
        .collect()
}

fn tensor_from_entries(
    entries: &[BracketEntry],
    arity: usize,
    dim: usize,
    out_dim: usize,
    what: &str,
) -> Result<TensorMap, IoError> {
    let mut t = TensorMap::zero(arity, dim, out_dim);
    for e in entries {
        if e.args.len() != arity {
            return Err(IoError::Parse(format!(
                "{what}: entry must have {arity} argument indices, got {:?}",
                e.args
            )));
        }
        if e.args.iter().any(|&a| a >= dim) {
            return Err(IoError::Parse(format!(
                "{what}: argument index out of range in {:?}",
                e.args
            )));
        }
        for (key, val) in &e.out {
            let l: usize = key
                .parse()
                .map_err(|_| IoError::Parse(format!("{what}: invalid output index {key:?}")))?;
            if l >= out_dim {
                return Err(IoError::Parse(format!(
                    "{what}: output index {l} out of range"
                )));
            }
            t.add_at(&e.args, l, &parse_rational(val)?);
        }
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaEntry {
    pub pair: [usize; 2],
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationFile {
    pub vdim: usize,
    #[serde(default)]
    pub theta: Vec<ThetaEntry>,
    #[serde(rename = "dV")]
    pub dv: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsFile {
    #[serde(default = "default_complete_skew")]
    pub complete_skew: bool,
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
}

fn default_complete_skew() -> bool {
    true
}

fn default_max_degree() -> usize {
    7
}

impl Default for OptionsFile {
    fn default() -> Self {
        OptionsFile {
            complete_skew: true,
            max_degree: 7,
        }
    }
}

/// Top-level description of a system, optionally with a representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    pub lambda: String,
    pub d: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationFile>,
    #[serde(default)]
    pub options: OptionsFile,
}

impl SystemFile {
    pub fn parse_str(s: &str) -> Result<SystemFile, IoError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }

    /// Convert into core types, running the strict shape checks.
    pub fn to_parts(&self) -> Result<(Mdlts, Option<Representation>), IoError> {
        let dim = self.dim;
        if dim == 0 {
            return Err(IoError::Parse("dimension must be positive".into()));
        }
        if let Some(basis) = &self.basis {
            if basis.len() != dim {
                return Err(IoError::Parse(format!(
                    "basis names: expected {dim} entries, got {}",
                    basis.len()
                )));
            }
        }
        let mut entries = Vec::new();
        for e in &self.brackets {
            if e.args.len() != 3 {
                return Err(IoError::Parse(format!(
                    "bracket entry needs exactly 3 argument indices, got {:?}",
                    e.args
                )));
            }
            let args = [e.args[0], e.args[1], e.args[2]];
            if args.iter().any(|&a| a >= dim) {
                return Err(IoError::Parse(format!(
                    "bracket argument index out of range in {args:?}"
                )));
            }
            for (key, val) in &e.out {
                let l: usize = key
                    .parse()
                    .map_err(|_| IoError::Parse(format!("invalid output index {key:?}")))?;
                if l >= dim {
                    return Err(IoError::Parse(format!("output index {l} out of range")));
                }
                entries.push((args, l, parse_rational(val)?));
            }
        }
        let lts = TripleSystem::new(dim, entries, self.options.complete_skew)
            .map_err(|e| IoError::Parse(e.to_string()))?;
        let d = matrix_from_strings(&self.d, dim, dim, "operator d")?;
        let lambda = parse_rational(&self.lambda)?;
        let mdlts = Mdlts::new(lts, ModifiedDifferential::new(d, lambda))
            .map_err(|e| IoError::Parse(e.to_string()))?;

        let rep = match &self.representation {
            None => None,
            Some(rf) => {
                let v = rf.vdim;
                if v == 0 {
                    return Err(IoError::Parse("vdim must be positive".into()));
                }
                let mut theta = vec![Matrix::zero(v, v); dim * dim];
                for entry in &rf.theta {
                    let [i, j] = entry.pair;
                    if i >= dim || j >= dim {
                        return Err(IoError::Parse(format!(
                            "theta pair ({i},{j}) out of range"
                        )));
                    }
                    theta[i * dim + j] = matrix_from_strings(&entry.matrix, v, v, "theta matrix")?;
                }
                let dv = matrix_from_strings(&rf.dv, v, v, "dV")?;
                Some(
                    Representation::new(dim, v, theta, dv)
                        .map_err(|e| IoError::Parse(e.to_string()))?,
                )
            }
        };
        Ok((mdlts, rep))
    }

    /// Emit a file describing the given system and optional representation.
    pub fn from_parts(sys: &Mdlts, rep: Option<&Representation>) -> SystemFile {
        let dim = sys.dim();
        let representation = rep.map(|r| {
            let mut theta = Vec::new();
            for i in 0..dim {
                for j in 0..dim {
                    if !r.theta(i, j).is_zero() {
                        theta.push(ThetaEntry {
                            pair: [i, j],
                            matrix: matrix_to_strings(r.theta(i, j)),
                        });
                    }
                }
            }
            RepresentationFile {
                vdim: r.vdim(),
                theta,
                dv: matrix_to_strings(r.dv()),
            }
        });
        SystemFile {
            dim,
            basis: None,
            brackets: entries_from_tensor(sys.lts.bracket()),
            lambda: format_rational(&sys.mdo.lambda),
            d: matrix_to_strings(&sys.mdo.d),
            representation,
            options: OptionsFile::default(),
        }
    }
}

/// Deformation coefficients per order (`nu[n-1]`, `d[n-1]` are order `n`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationFile {
    pub order: usize,
    pub nu: Vec<Vec<BracketEntry>>,
    pub d: Vec<Vec<Vec<String>>>,
}

impl DeformationFile {
    pub fn parse_str(s: &str) -> Result<DeformationFile, IoError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_deformation(&self, base: &Mdlts) -> Result<TruncatedDeformation, IoError> {
        if self.nu.len() != self.order || self.d.len() != self.order || self.order == 0 {
            return Err(IoError::Parse(format!(
                "deformation must list exactly `order` = {} coefficient entries",
                self.order
            )));
        }
        let dim = base.dim();
        let nu = self
            .nu
            .iter()
            .map(|entries| tensor_from_entries(entries, 3, dim, dim, "deformation bracket"))
            .collect::<Result<Vec<_>, _>>()?;
        let d = self
            .d
            .iter()
            .map(|rows| matrix_from_strings(rows, dim, dim, "deformation operator"))
            .collect::<Result<Vec<_>, _>>()?;
        TruncatedDeformation::from_terms(base, nu, d).map_err(|e| IoError::Parse(e.to_string()))
    }
}

/// A degree-3 cocycle candidate for building extensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleFile {
    #[serde(default)]
    pub varsigma: Vec<BracketEntry>,
    pub varpi: Vec<Vec<String>>,
}

impl CocycleFile {
    pub fn parse_str(s: &str) -> Result<CocycleFile, IoError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_cocycle(&self, dim: usize, vdim: usize) -> Result<ExtensionCocycle, IoError> {
        let varsigma = tensor_from_entries(&self.varsigma, 3, dim, vdim, "varsigma")?;
        let varpi = matrix_from_strings(&self.varpi, vdim, dim, "varpi")?;
        ExtensionCocycle::new(varsigma, varpi).map_err(|e| IoError::Parse(e.to_string()))
    }

    pub fn from_cocycle(c: &ExtensionCocycle) -> CocycleFile {
        CocycleFile {
            varsigma: entries_from_tensor(&c.varsigma),
            varpi: matrix_to_strings(&c.varpi),
        }
    }
}

/// An extension presented by its total system and structure maps; maps
/// default to the canonical block layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionFile {
    pub dim: usize,
    pub vdim: usize,
    #[serde(default)]
    pub total_brackets: Vec<BracketEntry>,
    pub total_d: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<Vec<Vec<String>>>,
}

impl ExtensionFile {
    pub fn parse_str(s: &str) -> Result<ExtensionFile, IoError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_extension(&self, base: &Mdlts) -> Result<AbelianExtension, IoError> {
        let dim = self.dim;
        let v = self.vdim;
        if dim != base.dim() {
            return Err(IoError::Parse(format!(
                "extension base dimension {dim} does not match the system file ({})",
                base.dim()
            )));
        }
        let n = dim + v;
        let bracket = tensor_from_entries(&self.total_brackets, 3, n, n, "total bracket")?;
        let total_d = matrix_from_strings(&self.total_d, n, n, "total_d")?;
        let inject = match &self.inject {
            Some(rows) => matrix_from_strings(rows, n, v, "inject")?,
            None => {
                let mut m = Matrix::zero(n, v);
                m.set_block(dim, 0, &Matrix::identity(v));
                m
            }
        };
        let project = match &self.project {
            Some(rows) => matrix_from_strings(rows, dim, n, "project")?,
            None => {
                let mut m = Matrix::zero(dim, n);
                m.set_block(0, 0, &Matrix::identity(dim));
                m
            }
        };
        let section = match &self.section {
            Some(rows) => matrix_from_strings(rows, n, dim, "section")?,
            None => {
                let mut m = Matrix::zero(n, dim);
                m.set_block(0, 0, &Matrix::identity(dim));
                m
            }
        };
        let fiber_d =
            induced_fiber_differential(&total_d, &inject).map_err(|e| IoError::Parse(e.to_string()))?;
        let total = Mdlts::new(
            TripleSystem::from_tensor(bracket).map_err(|e| IoError::Parse(e.to_string()))?,
            ModifiedDifferential::new(total_d, base.mdo.lambda.clone()),
        )
        .map_err(|e| IoError::Parse(e.to_string()))?;
        Ok(AbelianExtension {
            base: base.clone(),
            fiber_d,
            total,
            inject,
            project,
            section,
        })
    }

    pub fn from_extension(e: &AbelianExtension) -> ExtensionFile {
        let canonical_inject = {
            let mut m = Matrix::zero(e.total.dim(), e.fiber_dim());
            m.set_block(e.base.dim(), 0, &Matrix::identity(e.fiber_dim()));
            m
        };
        ExtensionFile {
            dim: e.base.dim(),
            vdim: e.fiber_dim(),
            total_brackets: entries_from_tensor(e.total.lts.bracket()),
            total_d: matrix_to_strings(&e.total.mdo.d),
            inject: (e.inject != canonical_inject).then(|| matrix_to_strings(&e.inject)),
            project: None,
            section: None,
        }
    }
}

/// Sparse serialization of a pair cochain for reports.
pub fn pair_to_json(pair: &CochainPair) -> serde_json::Value {
    let f_entries = entries_from_tensor(&pair.f);
    let g_entries = pair.g.as_ref().map(entries_from_tensor);
    serde_json::json!({
        "level": pair.level,
        "f": f_entries,
        "g": g_entries,
    })
}

/// Machine-readable outcome status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Command report: echoed command, status, and a structured payload.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub payload: serde_json::Value,
}

impl Report {
    pub fn new(command: impl Into<String>, status: Status, payload: serde_json::Value) -> Report {
        Report {
            command: command.into(),
            status,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Aligned plain-text rendering of the same data.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("status:  {:?}\n", self.status).to_lowercase());
        render_value(&self.payload, 0, &mut out);
        out
    }
}

fn render_value(v: &serde_json::Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        serde_json::Value::Object(map) => {
            for (k, val) in map {
                match val {
                    serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {val}\n")),
                }
            }
        }
        serde_json::Value::Array(items) => {
            for item in items {
                match item {
                    serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_value(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {item}\n")),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{v}\n")),
    }
}

/// Map an engine error to the CLI exit code.
pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit { .. } | Error::DegreeLimit { .. } => 3,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::rat;
    use proptest::prelude::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("-14").unwrap(), rat(-14, 1));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("a").is_err());
        assert_eq!(format_rational(&rat(3, 2)), "3/2");
        assert_eq!(format_rational(&rat(-4, 1)), "-4");
    }

    #[test]
    fn two_dim_file_round_trip() {
        let json = r#"{
            "dim": 2,
            "basis": ["u1", "u2"],
            "brackets": [{"args": [0, 1, 1], "out": {"0": "1"}}],
            "lambda": "-14",
            "d": [["3", "5"], ["0", "7"]]
        }"#;
        let file = SystemFile::parse_str(json).unwrap();
        let (sys, rep) = file.to_parts().unwrap();
        assert!(rep.is_none());
        assert_eq!(sys, fixtures::two_dim(3, 5, 7));
        assert!(sys.validate().is_pass());

        let emitted = SystemFile::from_parts(&sys, None);
        let reparsed = SystemFile::parse_str(&emitted.to_json()).unwrap();
        assert_eq!(emitted, reparsed);
        assert_eq!(reparsed.to_parts().unwrap().0, sys);
    }

    #[test]
    fn representation_round_trips() {
        let sys = fixtures::two_dim(3, 5, 7);
        let rep = crate::lts::adjoint_rep(&sys.lts, &sys.mdo);
        let file = SystemFile::from_parts(&sys, Some(&rep));
        let reparsed = SystemFile::parse_str(&file.to_json()).unwrap();
        let (sys2, rep2) = reparsed.to_parts().unwrap();
        assert_eq!(sys2, sys);
        assert_eq!(rep2.unwrap(), rep);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let json = r#"{"dim": 1, "lambda": "0", "d": [["0"]], "mystery": 1}"#;
        assert!(SystemFile::parse_str(json).is_err());
    }

    #[test]
    fn invalid_rational_is_rejected() {
        let json = r#"{"dim": 1, "lambda": "1/0", "d": [["0"]]}"#;
        let file = SystemFile::parse_str(json).unwrap();
        assert!(file.to_parts().is_err());
    }

    #[test]
    fn empty_brackets_make_an_abelian_system() {
        let json = r#"{"dim": 3, "lambda": "0", "d": [["0","0","0"],["0","0","0"],["0","0","0"]]}"#;
        let (sys, _) = SystemFile::parse_str(json).unwrap().to_parts().unwrap();
        assert!(sys.lts.bracket().is_zero());
        assert!(sys.validate().is_pass());
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let json = r#"{"dim": 2, "brackets": [{"args": [0, 1, 2], "out": {"0": "1"}}],
                        "lambda": "0", "d": [["0","0"],["0","0"]]}"#;
        assert!(SystemFile::parse_str(json).unwrap().to_parts().is_err());
    }

    fn arb_rational_string() -> impl Strategy<Value = String> {
        (-9i64..=9, 1i64..=9).prop_map(|(n, d)| format_rational(&rat(n, d)))
    }

    proptest! {
        #[test]
        fn system_file_round_trips(entries in proptest::collection::vec(
            (0usize..2, 0usize..2, 0usize..2, 0usize..2, arb_rational_string()), 0..4))
        {
            // Build a (possibly invalid) sparse system with skew completion
            // off; parse(emit(file)) must reproduce the file exactly.
            let mut brackets: BTreeMap<Vec<usize>, BTreeMap<String, String>> = BTreeMap::new();
            for (i, j, k, l, v) in entries {
                brackets.entry(vec![i, j, k]).or_default().insert(l.to_string(), v);
            }
            let file = SystemFile {
                dim: 2,
                basis: None,
                brackets: into_entries(brackets),
                lambda: "1/2".into(),
                d: vec![vec!["1".into(), "0".into()], vec!["0".into(), "1".into()]],
                representation: None,
                options: OptionsFile { complete_skew: false, max_degree: 7 },
            };
            let reparsed = SystemFile::parse_str(&file.to_json()).unwrap();
            prop_assert_eq!(file, reparsed);
        }
    }

    fn into_entries(map: BTreeMap<Vec<usize>, BTreeMap<String, String>>) -> Vec<BracketEntry> {
        map.into_iter()
            .map(|(args, out)| BracketEntry { args, out })
            .collect()
    }
}
