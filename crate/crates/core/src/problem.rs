//! Design problems: the attributes, methods and method-to-attribute "uses"
//! extracted from a system's use cases.
//!
//! A problem is loaded from (and saved to) a small JSON document:
//!
//! ```json
//! {"name": "CBS", "attributes": ["title"], "methods": ["book"], "uses": [["book", "title"]]}
//! ```
//!
//! Each use pair is `[method, attribute]`. Array order is the canonical
//! element order used everywhere else in the crate.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("malformed problem file at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error reading problem: {0}")]
    Io(#[from] std::io::Error),
    #[error("problem has no {0}")]
    Empty(&'static str),
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("duplicate method `{0}`")]
    DuplicateMethod(String),
    #[error("`{0}` is declared both as an attribute and as a method")]
    AmbiguousIdentifier(String),
    #[error("use [`{method}`, `{attribute}`] references unknown method `{method}`")]
    UnknownMethod { method: String, attribute: String },
    #[error("use [`{method}`, `{attribute}`] references unknown attribute `{attribute}`")]
    UnknownAttribute { method: String, attribute: String },
    #[error("duplicate use [`{method}`, `{attribute}`]")]
    DuplicateUse { method: String, attribute: String },
    #[error("invalid fixture arguments: {0}")]
    InvalidArguments(String),
}

/// A method reading or writing an attribute. Both fields are indices into
/// the owning problem's `methods` and `attributes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Use {
    pub method: usize,
    pub attribute: usize,
}

/// An immutable, validated design problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignProblem {
    name: String,
    attributes: Vec<String>,
    methods: Vec<String>,
    uses: Vec<Use>,
}

/// On-disk form of a problem.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub attributes: Vec<String>,
    pub methods: Vec<String>,
    pub uses: Vec<(String, String)>,
}

impl DesignProblem {
    /// Validates the raw sets and builds a problem. Order is preserved.
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<String>,
        methods: Vec<String>,
        uses: Vec<(String, String)>,
    ) -> Result<Self, ProblemError> {
        if attributes.is_empty() {
            return Err(ProblemError::Empty("attributes"));
        }
        if methods.is_empty() {
            return Err(ProblemError::Empty("methods"));
        }
        if uses.is_empty() {
            return Err(ProblemError::Empty("uses"));
        }

        let mut attr_index = HashMap::with_capacity(attributes.len());
        for (i, a) in attributes.iter().enumerate() {
            if attr_index.insert(a.as_str(), i).is_some() {
                return Err(ProblemError::DuplicateAttribute(a.clone()));
            }
        }
        let mut method_index = HashMap::with_capacity(methods.len());
        for (i, m) in methods.iter().enumerate() {
            if attr_index.contains_key(m.as_str()) {
                return Err(ProblemError::AmbiguousIdentifier(m.clone()));
            }
            if method_index.insert(m.as_str(), i).is_some() {
                return Err(ProblemError::DuplicateMethod(m.clone()));
            }
        }

        let mut seen = HashSet::with_capacity(uses.len());
        let mut resolved = Vec::with_capacity(uses.len());
        for (m, a) in &uses {
            let Some(&method) = method_index.get(m.as_str()) else {
                return Err(ProblemError::UnknownMethod {
                    method: m.clone(),
                    attribute: a.clone(),
                });
            };
            let Some(&attribute) = attr_index.get(a.as_str()) else {
                return Err(ProblemError::UnknownAttribute {
                    method: m.clone(),
                    attribute: a.clone(),
                });
            };
            let u = Use { method, attribute };
            if !seen.insert(u) {
                return Err(ProblemError::DuplicateUse {
                    method: m.clone(),
                    attribute: a.clone(),
                });
            }
            resolved.push(u);
        }

        Ok(Self {
            name: name.into(),
            attributes,
            methods,
            uses: resolved,
        })
    }

    pub fn from_file(file: ProblemFile) -> Result<Self, ProblemError> {
        Self::new(file.name, file.attributes, file.methods, file.uses)
    }

    pub fn to_file(&self) -> ProblemFile {
        ProblemFile {
            name: self.name.clone(),
            attributes: self.attributes.clone(),
            methods: self.methods.clone(),
            uses: self
                .uses
                .iter()
                .map(|u| (self.methods[u.method].clone(), self.attributes[u.attribute].clone()))
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn uses(&self) -> &[Use] {
        &self.uses
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn method_count(&self) -> usize {
        self.methods.len()
    }

    /// Attributes plus methods.
    pub fn element_count(&self) -> usize {
        self.attributes.len() + self.methods.len()
    }

    /// Genome position of an attribute. Attributes occupy `0..attribute_count`.
    pub fn attribute_element(&self, attribute: usize) -> usize {
        attribute
    }

    /// Genome position of a method. Methods follow the attributes.
    pub fn method_element(&self, method: usize) -> usize {
        self.attributes.len() + method
    }

    pub fn is_attribute_element(&self, element: usize) -> bool {
        element < self.attributes.len()
    }
}

/// Parses and validates a problem from a JSON byte stream.
pub fn load_problem<R: Read>(source: R) -> Result<DesignProblem, ProblemError> {
    let file: ProblemFile = serde_json::from_reader(source).map_err(|e| {
        if e.is_io() {
            ProblemError::Io(e.into())
        } else {
            ProblemError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        }
    })?;
    DesignProblem::from_file(file)
}

/// Writes the canonical form: two-space pretty JSON followed by a newline.
pub fn save_problem<W: Write>(problem: &DesignProblem, mut sink: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut sink, &problem.to_file())?;
    sink.write_all(b"\n")
}

pub fn to_canonical_string(problem: &DesignProblem) -> String {
    let mut buf = Vec::new();
    save_problem(problem, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Builds a synthetic problem with exactly the requested counts.
///
/// Identifiers are `a00`, `a01`, ... and `m00`, `m01`, ...; the use pairs are
/// sampled without replacement from the full method x attribute grid and
/// listed in method-major order. Equal arguments always give equal problems.
pub fn generate_fixture(
    n_attributes: usize,
    n_methods: usize,
    n_uses: usize,
    seed: u64,
) -> Result<DesignProblem, ProblemError> {
    if n_attributes == 0 || n_methods == 0 || n_uses == 0 {
        return Err(ProblemError::InvalidArguments(
            "attribute, method and use counts must all be positive".into(),
        ));
    }
    let grid = n_attributes
        .checked_mul(n_methods)
        .ok_or_else(|| ProblemError::InvalidArguments("grid size overflows".into()))?;
    if n_uses > grid {
        return Err(ProblemError::InvalidArguments(format!(
            "{n_uses} uses requested but only {grid} method/attribute pairs exist"
        )));
    }

    let width = |n: usize| n.saturating_sub(1).to_string().len().max(2);
    let (aw, mw) = (width(n_attributes), width(n_methods));
    let attributes: Vec<String> = (0..n_attributes).map(|i| format!("a{i:0aw$}")).collect();
    let methods: Vec<String> = (0..n_methods).map(|i| format!("m{i:0mw$}")).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = index::sample(&mut rng, grid, n_uses).into_vec();
    cells.sort_unstable();
    let uses = cells
        .into_iter()
        .map(|c| {
            let (m, a) = (c / n_attributes, c % n_attributes);
            (methods[m].clone(), attributes[a].clone())
        })
        .collect();

    DesignProblem::new(
        format!("fixture-{n_attributes}x{n_methods}x{n_uses}-s{seed}"),
        attributes,
        methods,
        uses,
    )
}

/// Problem scales of the three reference systems: cinema booking, graduate
/// development programme and cruise sales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceScale {
    Cbs,
    Gdp,
    Sc,
}

impl ReferenceScale {
    pub const ALL: [ReferenceScale; 3] = [Self::Cbs, Self::Gdp, Self::Sc];

    /// (attributes, methods, uses)
    pub fn counts(self) -> (usize, usize, usize) {
        match self {
            Self::Cbs => (16, 15, 39),
            Self::Gdp => (43, 12, 121),
            Self::Sc => (52, 30, 126),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Cbs => "CBS",
            Self::Gdp => "GDP",
            Self::Sc => "SC",
        }
    }

    /// Seeded synthetic problem at this scale, named after the label.
    pub fn fixture(self, seed: u64) -> DesignProblem {
        let (a, m, u) = self.counts();
        let p = generate_fixture(a, m, u, seed).expect("reference counts are valid");
        DesignProblem {
            name: self.label().to_string(),
            ..p
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(s: &str) -> Result<DesignProblem, ProblemError> {
        load_problem(s.as_bytes())
    }

    #[test]
    fn minimal_problem_loads() {
        let p = load_str(r#"{"name":"min","attributes":["a"],"methods":["m"],"uses":[["m","a"]]}"#).unwrap();
        assert_eq!(p.attribute_count(), 1);
        assert_eq!(p.method_count(), 1);
        assert_eq!(
            p.uses(),
            &[Use {
                method: 0,
                attribute: 0
            }]
        );
    }

    #[test]
    fn unknown_attribute_is_named() {
        let err = load_str(r#"{"name":"x","attributes":["a"],"methods":["m"],"uses":[["m","ghost"]]}"#).unwrap_err();
        assert!(matches!(err, ProblemError::UnknownAttribute { ref attribute, .. } if attribute == "ghost"));
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn unknown_method_is_named() {
        let err = load_str(r#"{"name":"x","attributes":["a"],"methods":["m"],"uses":[["run","a"]]}"#).unwrap_err();
        assert!(err.to_string().contains("run"));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = load_str("{\"name\": \"x\",\n  \"attributes\": [\"a\",]\n}").unwrap_err();
        match err {
            ProblemError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn structural_violations() {
        let cases = [
            (
                r#"{"name":"x","attributes":[],"methods":["m"],"uses":[["m","a"]]}"#,
                "no attributes",
            ),
            (
                r#"{"name":"x","attributes":["a"],"methods":[],"uses":[["m","a"]]}"#,
                "no methods",
            ),
            (
                r#"{"name":"x","attributes":["a"],"methods":["m"],"uses":[]}"#,
                "no uses",
            ),
            (
                r#"{"name":"x","attributes":["a","a"],"methods":["m"],"uses":[["m","a"]]}"#,
                "duplicate attribute",
            ),
            (
                r#"{"name":"x","attributes":["a"],"methods":["m","m"],"uses":[["m","a"]]}"#,
                "duplicate method",
            ),
            (
                r#"{"name":"x","attributes":["a"],"methods":["a"],"uses":[["a","a"]]}"#,
                "both",
            ),
            (
                r#"{"name":"x","attributes":["a"],"methods":["m"],"uses":[["m","a"],["m","a"]]}"#,
                "duplicate use",
            ),
        ];
        for (src, needle) in cases {
            let err = load_str(src).unwrap_err().to_string();
            assert!(err.contains(needle), "{src}: {err}");
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(matches!(
            load_str(r#"{"name":"x","attributes":["a"],"methods":["m"],"uses":[["m","a"]],"extra":1}"#),
            Err(ProblemError::Parse { .. })
        ));
    }

    #[test]
    fn reference_scales_have_published_counts() {
        let cbs = ReferenceScale::Cbs.fixture(1);
        assert_eq!(
            (cbs.attribute_count(), cbs.method_count(), cbs.uses().len()),
            (16, 15, 39)
        );
        assert_eq!(cbs.name(), "CBS");
        let sc = generate_fixture(52, 30, 126, 1).unwrap();
        assert_eq!(
            (sc.attribute_count(), sc.method_count(), sc.uses().len()),
            (52, 30, 126)
        );
        let gdp = ReferenceScale::Gdp.fixture(1);
        assert_eq!(gdp.uses().len(), 121);
    }

    #[test]
    fn saturated_fixture_is_complete_bipartite() {
        for seed in [7, 8, 9] {
            let p = generate_fixture(2, 2, 4, seed).unwrap();
            let mut got: Vec<_> = p.uses().to_vec();
            got.sort();
            let all: Vec<_> = (0..2)
                .flat_map(|m| {
                    (0..2).map(move |a| Use {
                        method: m,
                        attribute: a,
                    })
                })
                .collect();
            assert_eq!(got, all);
        }
    }

    #[test]
    fn too_many_uses_rejected() {
        assert!(matches!(
            generate_fixture(2, 2, 5, 1),
            Err(ProblemError::InvalidArguments(_))
        ));
    }

    #[test]
    fn fixture_is_pure_and_seed_sensitive() {
        assert_eq!(
            generate_fixture(16, 15, 39, 3).unwrap(),
            generate_fixture(16, 15, 39, 3).unwrap()
        );
        assert_ne!(
            generate_fixture(16, 15, 39, 3).unwrap().uses(),
            generate_fixture(16, 15, 39, 4).unwrap().uses()
        );
    }

    #[test]
    fn canonical_round_trip() {
        let p = ReferenceScale::Cbs.fixture(1);
        let text = to_canonical_string(&p);
        let back = load_str(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(to_canonical_string(&back), text);
    }

    #[test]
    fn element_positions() {
        let p = generate_fixture(3, 2, 2, 1).unwrap();
        assert_eq!(p.element_count(), 5);
        assert_eq!(p.method_element(1), 4);
        assert!(p.is_attribute_element(2));
        assert!(!p.is_attribute_element(3));
    }
}
