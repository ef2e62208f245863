//! Domain–Category–Criterion hierarchy and the structure/texture lexicons.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("unknown domain '{0}' (expected IAA, IQA or ISTA)")]
    UnknownDomain(String),
    #[error("lexicon set '{set}' contains an empty term")]
    EmptyTerm { set: String },
    #[error("texture term '{term}' appears in both '{first}' and '{second}'")]
    OverlappingTexture {
        term: String,
        first: &'static str,
        second: &'static str,
    },
    #[error("failed to read lexicon file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse lexicon file {path}: {message}")]
    Parse { path: String, message: String },
}

/// The three perceptual assessment domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Domain {
    Iaa,
    Iqa,
    Ista,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Iaa, Domain::Iqa, Domain::Ista];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Iaa => "IAA",
            Domain::Iqa => "IQA",
            Domain::Ista => "ISTA",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "IAA" => Ok(Domain::Iaa),
            "IQA" => Ok(Domain::Iqa),
            "ISTA" => Ok(Domain::Ista),
            _ => Err(TaxonomyError::UnknownDomain(s.to_string())),
        }
    }
}

impl TryFrom<String> for Domain {
    type Error = TaxonomyError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Domain> for String {
    fn from(d: Domain) -> Self {
        d.as_str().to_string()
    }
}

/// A category within a domain together with its fine-grained criteria.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Category {
    pub domain: Domain,
    pub name: &'static str,
    pub abbreviation: &'static str,
    pub criteria: &'static [&'static str],
}

macro_rules! category {
    ($domain:expr, $name:expr, $abbr:expr, [$($crit:expr),+ $(,)?]) => {
        Category {
            domain: $domain,
            name: $name,
            abbreviation: $abbr,
            criteria: &[$($crit),+],
        }
    };
}

static IAA_CATEGORIES: [Category; 8] = [
    category!(
        Domain::Iaa,
        "Composition & Design",
        "Comp.",
        [
            "Visual Balance",
            "Hierarchical Emphasis",
            "Structural Organization",
            "Compositional Rhythm",
            "Harmonic Unity",
            "Composition & Design Level",
        ]
    ),
    category!(
        Domain::Iaa,
        "Visual Elements & Structure",
        "VisStr.",
        [
            "Line Dynamics",
            "Shape Clarity",
            "Form Realization",
            "Spatial Illusion",
            "Light Modeling",
            "Visual Elements & Structure Level",
        ]
    ),
    category!(
        Domain::Iaa,
        "Technical Execution",
        "Tech.",
        [
            "Material Proficiency",
            "Rendering Precision",
            "Focus Control",
            "Tonal and Exposure Control",
            "Technical Execution Level",
        ]
    ),
    category!(
        Domain::Iaa,
        "Originality & Creativity",
        "Creat.",
        [
            "Concept Innovation",
            "Creative Problem-Solving",
            "Originality & Creativity Level",
        ]
    ),
    category!(
        Domain::Iaa,
        "Theme & Communication",
        "Theme.",
        [
            "Subject Clarity",
            "Narrative Depth",
            "Cultural Insight",
            "Theme & Communication Level",
        ]
    ),
    category!(
        Domain::Iaa,
        "Emotion & Viewer Response",
        "Emo.",
        [
            "Emotional Resonance",
            "Viewer Engagement",
            "Interpretive Openness",
            "Emotion & Viewer Response Level",
        ]
    ),
    category!(
        Domain::Iaa,
        "Overall Gestalt",
        "Gest.",
        ["Holistic Cohesion", "Overall Gestalt Level"]
    ),
    category!(
        Domain::Iaa,
        "Comprehensive Evaluation",
        "CompEv.",
        ["Comprehensive Evaluation Level"]
    ),
];

static IQA_CATEGORIES: [Category; 3] = [
    category!(
        Domain::Iqa,
        "Distortion Location",
        "Loc.",
        ["Location Description", "Object Association"]
    ),
    category!(Domain::Iqa, "Distortion Severity", "Sev.", ["Severity Level"]),
    category!(Domain::Iqa, "Distortion Type", "Type.", ["Distortion Types Present"]),
];

static ISTA_CATEGORIES: [Category; 5] = [
    category!(
        Domain::Ista,
        "Scene Decomposition Principles",
        "Scene.",
        ["Scene Classification"]
    ),
    category!(
        Domain::Ista,
        "Physical Structure",
        "Phys.",
        ["Base Morphology", "Spatial Arrangement"]
    ),
    category!(
        Domain::Ista,
        "Material Representation",
        "Mat.",
        ["Material Identification", "Surface Behavior"]
    ),
    category!(
        Domain::Ista,
        "Geometric Composition",
        "Geo.",
        ["2D Contour", "3D Volume"]
    ),
    category!(
        Domain::Ista,
        "Semantic Perception",
        "Sem.",
        ["Functional Suggestion", "Stylistic Classification"]
    ),
];

pub fn categories(domain: Domain) -> &'static [Category] {
    match domain {
        Domain::Iaa => &IAA_CATEGORIES,
        Domain::Iqa => &IQA_CATEGORIES,
        Domain::Ista => &ISTA_CATEGORIES,
    }
}

/// Looks up a category by full name or abbreviation (case-insensitive).
pub fn find_category(domain: Domain, key: &str) -> Option<&'static Category> {
    let key = normalize_term(key);
    categories(domain).iter().find(|c| {
        normalize_term(c.name) == key || normalize_term(c.abbreviation) == key
    })
}

/// Canonical matching key for lexicon terms: trimmed and lower-cased.
pub fn normalize_term(term: &str) -> String {
    term.trim().to_lowercase()
}

/// A set of lexicon terms. Display forms are kept in insertion order; lookups
/// go through normalized keys. Entries written as "A / B" also match "A" and
/// "B" on their own.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermSet {
    terms: Vec<String>,
    keys: HashSet<String>,
}

impl TermSet {
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = TermSet::default();
        for t in terms {
            set.insert(t.into());
        }
        set
    }

    fn insert(&mut self, term: String) {
        let key = normalize_term(&term);
        if term.contains('/') {
            for alt in term.split('/') {
                let alt = normalize_term(alt);
                if !alt.is_empty() {
                    self.keys.insert(alt);
                }
            }
        }
        self.keys.insert(key);
        if !self.terms.contains(&term) {
            self.terms.push(term);
        }
    }

    pub fn contains(&self, term: &str) -> bool {
        self.keys.contains(&normalize_term(term))
    }

    /// Number of listed entries (slash alternatives count once).
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialGroup {
    Natural,
    ManMade,
    Environmental,
}

/// Which lexicon a term is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Texture,
    Material,
    Shape2d,
    Shape3d,
    Style,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Texture => "texture",
            FieldKind::Material => "material",
            FieldKind::Shape2d => "2d shape",
            FieldKind::Shape3d => "3d shape",
            FieldKind::Style => "style",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    Strict,
    #[default]
    Lenient,
}

impl FromStr for ValidationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(ValidationMode::Strict),
            "lenient" => Ok(ValidationMode::Lenient),
            other => Err(format!("unknown validation mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationResult {
    pub ok: bool,
    pub note: String,
}

/// The vocabulary used to annotate and score structure and texture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub texture_weak: TermSet,
    pub texture_medium: TermSet,
    pub texture_strong: TermSet,
    /// Base-morphology terms offered to annotators. Overlaps the weighted
    /// texture sets but is not identical to their union.
    pub morphology_terms: TermSet,
    pub material_natural: TermSet,
    pub material_man_made: TermSet,
    pub material_environmental: TermSet,
    pub shape2d_terms: TermSet,
    pub shape3d_terms: TermSet,
    pub style_terms: TermSet,
}

const TEXTURE_WEAK: [&str; 9] = [
    "smooth", "plain", "uniform", "lined", "grid", "striped", "chequered", "dotted", "freckled",
];

const TEXTURE_MEDIUM: [&str; 9] = [
    "braided",
    "woven",
    "crosshatched",
    "meshed",
    "cobwebbed",
    "lacelike",
    "knitted",
    "spiralled",
    "swirly",
];

const TEXTURE_STRONG: [&str; 24] = [
    "bumpy",
    "blotchy",
    "bubbly",
    "cracked",
    "crystalline",
    "flecked",
    "frilly",
    "grooved",
    "honeycombed",
    "marbled",
    "matted",
    "paisley",
    "perforated",
    "pitted",
    "pleated",
    "porous",
    "scaly",
    "smeared",
    "sprinkled",
    "stratified",
    "studded",
    "veined",
    "wrinkled",
    "zigzagged",
];

const MORPHOLOGY: [&str; 42] = [
    "blotchy",
    "braided",
    "bubbly",
    "bumpy",
    "chequered",
    "cobwebbed",
    "cracked",
    "crosshatched",
    "crystalline",
    "dotted",
    "fibrous",
    "flecked",
    "freckled",
    "frilly",
    "grid",
    "grooved",
    "honeycombed",
    "interlaced",
    "knitted",
    "lacelike",
    "lined",
    "marbled",
    "matted",
    "meshed",
    "paisley",
    "perforated",
    "pitted",
    "pleated",
    "porous",
    "scaly",
    "smeared",
    "spiralled",
    "sprinkled",
    "stratified",
    "striped",
    "studded",
    "swirly",
    "veined",
    "woven",
    "wrinkled",
    "zigzagged",
    "smooth",
];

const MATERIAL_NATURAL: [&str; 7] = ["Foliage", "Grass", "Skin", "Stone", "Wood", "Water", "Hair"];

const MATERIAL_MAN_MADE: [&str; 16] = [
    "Brick",
    "Carpet",
    "Ceramic",
    "Fabric",
    "Glass",
    "Leather",
    "Metal",
    "Mirror",
    "Painted Surface",
    "Paper",
    "Plastic",
    "Polished Stone",
    "Tile",
    "Wallpaper",
    "Concrete",
    "Food Surface",
];

const MATERIAL_ENVIRONMENTAL: [&str; 3] = ["Sky", "Clouds", "Fog / Mist"];

const SHAPE_2D: [&str; 33] = [
    "Rectangle",
    "Square",
    "Circle",
    "Ellipse / Oval",
    "Triangle",
    "Equilateral Triangle",
    "Isosceles Triangle",
    "Scalene Triangle",
    "Right Triangle",
    "Trapezoid / Trapezium",
    "Parallelogram",
    "Rhombus",
    "Pentagon",
    "Hexagon",
    "Heptagon",
    "Octagon",
    "Nonagon",
    "Decagon",
    "Star",
    "Pentagram",
    "Hexagram",
    "Cross",
    "Arrow",
    "Semicircle",
    "Sector",
    "Crescent",
    "Annulus / Ring",
    "Heart",
    "Lemniscate",
    "Lune / Bow Shape",
    "Spiral",
    "Waveform",
    "Teardrop",
];

const SHAPE_3D: [&str; 32] = [
    "Sphere",
    "Ellipsoid",
    "Cube",
    "Cuboid",
    "Cylinder",
    "Cone",
    "Pyramid",
    "Tetrahedron",
    "Octahedron",
    "Dodecahedron",
    "Icosahedron",
    "Prism",
    "Triangular Prism",
    "Rectangular Prism",
    "Pentagonal Prism",
    "Hexagonal Prism",
    "Torus",
    "Annular Torus",
    "Paraboloid",
    "Hyperboloid",
    "Elliptic Cylinder",
    "Hyperbolic Cylinder",
    "Truncated Cone",
    "Truncated Pyramid",
    "Capsule",
    "Dome",
    "Lens",
    "Bipyramid",
    "Frustum",
    "Möbius Strip",
    "Knot",
    "Klein Bottle",
];

const STYLE: [&str; 15] = [
    "Embossed",
    "Engraved",
    "Rough",
    "Smooth",
    "Matte",
    "Glossy",
    "Brushed",
    "Honeycomb",
    "Geometric",
    "Fractal",
    "Tile Mosaic",
    "Chinese Cloud Pattern",
    "Dragon Scale",
    "Cyberpunk Holographic",
    "Steampunk Mechanical",
];

/// The built-in vocabulary.
pub fn default_lexicon() -> Lexicon {
    Lexicon {
        texture_weak: TermSet::new(TEXTURE_WEAK),
        texture_medium: TermSet::new(TEXTURE_MEDIUM),
        texture_strong: TermSet::new(TEXTURE_STRONG),
        morphology_terms: TermSet::new(MORPHOLOGY),
        material_natural: TermSet::new(MATERIAL_NATURAL),
        material_man_made: TermSet::new(MATERIAL_MAN_MADE),
        material_environmental: TermSet::new(MATERIAL_ENVIRONMENTAL),
        shape2d_terms: TermSet::new(SHAPE_2D),
        shape3d_terms: TermSet::new(SHAPE_3D),
        style_terms: TermSet::new(STYLE),
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        default_lexicon()
    }
}

impl Lexicon {
    pub fn material_group(&self, group: MaterialGroup) -> &TermSet {
        match group {
            MaterialGroup::Natural => &self.material_natural,
            MaterialGroup::ManMade => &self.material_man_made,
            MaterialGroup::Environmental => &self.material_environmental,
        }
    }

    pub fn contains(&self, kind: FieldKind, term: &str) -> bool {
        match kind {
            FieldKind::Texture => {
                self.morphology_terms.contains(term) || texture_weight(term, self) > 0
            }
            FieldKind::Material => {
                self.material_natural.contains(term)
                    || self.material_man_made.contains(term)
                    || self.material_environmental.contains(term)
            }
            FieldKind::Shape2d => self.shape2d_terms.contains(term),
            FieldKind::Shape3d => self.shape3d_terms.contains(term),
            FieldKind::Style => self.style_terms.contains(term),
        }
    }

    /// Checks the structural invariants: no empty terms and pairwise disjoint
    /// texture weight sets.
    pub fn check(&self) -> Result<(), TaxonomyError> {
        let named: [(&'static str, &TermSet); 10] = [
            ("texture_weak", &self.texture_weak),
            ("texture_medium", &self.texture_medium),
            ("texture_strong", &self.texture_strong),
            ("morphology", &self.morphology_terms),
            ("materials.natural", &self.material_natural),
            ("materials.man_made", &self.material_man_made),
            ("materials.environmental", &self.material_environmental),
            ("shape2d", &self.shape2d_terms),
            ("shape3d", &self.shape3d_terms),
            ("style", &self.style_terms),
        ];
        for (name, set) in named {
            if set.iter().any(|t| t.trim().is_empty()) {
                return Err(TaxonomyError::EmptyTerm {
                    set: name.to_string(),
                });
            }
        }
        let textures = &named[..3];
        for (i, (a_name, a)) in textures.iter().enumerate() {
            for (b_name, b) in &textures[i + 1..] {
                if let Some(term) = a.iter().find(|t| b.contains(t)) {
                    return Err(TaxonomyError::OverlappingTexture {
                        term: term.to_string(),
                        first: a_name,
                        second: b_name,
                    });
                }
            }
        }
        Ok(())
    }

    /// Loads a lexicon override. `.toml` files are parsed as TOML, anything
    /// else as JSON. Keys left out keep their built-in terms.
    pub fn from_file(path: &Path) -> Result<Lexicon, TaxonomyError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| TaxonomyError::Io {
            path: display.clone(),
            source,
        })?;
        let is_toml = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        let file: LexiconFile = if is_toml {
            toml::from_str(&text).map_err(|e| TaxonomyError::Parse {
                path: display.clone(),
                message: e.to_string(),
            })?
        } else {
            serde_json::from_str(&text).map_err(|e| TaxonomyError::Parse {
                path: display.clone(),
                message: e.to_string(),
            })?
        };
        file.into_lexicon()
    }
}

/// On-disk lexicon override schema.
///
/// ```json
/// {
///   "texture_weak": ["smooth", "..."],
///   "texture_medium": ["woven"],
///   "texture_strong": ["cracked"],
///   "morphology": ["fibrous"],
///   "materials": { "natural": ["Wood"], "man_made": ["Glass"], "environmental": ["Sky"] },
///   "shape2d": ["Circle"],
///   "shape3d": ["Sphere"],
///   "style": ["Gothic"]
/// }
/// ```
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconFile {
    pub texture_weak: Option<Vec<String>>,
    pub texture_medium: Option<Vec<String>>,
    pub texture_strong: Option<Vec<String>>,
    pub morphology: Option<Vec<String>>,
    pub materials: Option<MaterialsFile>,
    pub shape2d: Option<Vec<String>>,
    pub shape3d: Option<Vec<String>>,
    pub style: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsFile {
    pub natural: Option<Vec<String>>,
    pub man_made: Option<Vec<String>>,
    pub environmental: Option<Vec<String>>,
}

impl LexiconFile {
    pub fn into_lexicon(self) -> Result<Lexicon, TaxonomyError> {
        fn apply(target: &mut TermSet, terms: Option<Vec<String>>) {
            if let Some(terms) = terms {
                *target = TermSet::new(terms);
            }
        }
        let mut lex = default_lexicon();
        apply(&mut lex.texture_weak, self.texture_weak);
        apply(&mut lex.texture_medium, self.texture_medium);
        apply(&mut lex.texture_strong, self.texture_strong);
        apply(&mut lex.morphology_terms, self.morphology);
        if let Some(m) = self.materials {
            apply(&mut lex.material_natural, m.natural);
            apply(&mut lex.material_man_made, m.man_made);
            apply(&mut lex.material_environmental, m.environmental);
        }
        apply(&mut lex.shape2d_terms, self.shape2d);
        apply(&mut lex.shape3d_terms, self.shape3d);
        apply(&mut lex.style_terms, self.style);
        lex.check()?;
        Ok(lex)
    }
}

/// Discrete texture intensity: 1 weak, 2 medium, 3 strong, 0 for anything else.
pub fn texture_weight(term: &str, lexicon: &Lexicon) -> u32 {
    if lexicon.texture_weak.contains(term) {
        1
    } else if lexicon.texture_medium.contains(term) {
        2
    } else if lexicon.texture_strong.contains(term) {
        3
    } else {
        0
    }
}

pub fn validate_term(
    kind: FieldKind,
    term: &str,
    lexicon: &Lexicon,
    mode: ValidationMode,
) -> ValidationResult {
    if term.trim().is_empty() {
        return ValidationResult {
            ok: false,
            note: format!("empty {kind} term"),
        };
    }
    if lexicon.contains(kind, term) {
        return ValidationResult {
            ok: true,
            note: String::new(),
        };
    }
    match mode {
        ValidationMode::Strict => ValidationResult {
            ok: false,
            note: format!("'{}' is not a {kind} lexicon term", term.trim()),
        },
        ValidationMode::Lenient => ValidationResult {
            ok: true,
            note: format!("'{}' accepted as a free-form {kind} term", term.trim()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_follow_the_texture_table() {
        let lex = default_lexicon();
        assert_eq!(texture_weight("grid", &lex), 1);
        assert_eq!(texture_weight("woven", &lex), 2);
        assert_eq!(texture_weight("crystalline", &lex), 3);
        assert_eq!(texture_weight("Glass", &lex), 0);
        assert_eq!(texture_weight("  Crystalline ", &lex), 3);
        // listed for annotators but carries no weight
        assert_eq!(texture_weight("fibrous", &lex), 0);
    }

    #[test]
    fn default_lexicon_sizes() {
        let lex = default_lexicon();
        assert_eq!(lex.texture_weak.len(), 9);
        assert_eq!(lex.texture_medium.len(), 9);
        assert_eq!(lex.texture_strong.len(), 24);
        assert!(lex.texture_weak.contains("smooth"));
        assert!(lex.shape3d_terms.contains("Sphere"));
        lex.check().unwrap();
    }

    #[test]
    fn slash_terms_match_alternatives() {
        let lex = default_lexicon();
        assert!(lex.contains(FieldKind::Material, "Fog / Mist"));
        assert!(lex.contains(FieldKind::Material, "mist"));
        assert!(lex.contains(FieldKind::Shape2d, "Oval"));
        assert!(!lex.contains(FieldKind::Shape2d, "Fog"));
    }

    #[test]
    fn multiword_terms_match_whole() {
        let lex = default_lexicon();
        assert!(lex.contains(FieldKind::Material, "painted surface"));
        assert!(!lex.contains(FieldKind::Material, "Painted"));
    }

    #[test]
    fn validate_modes() {
        let lex = default_lexicon();
        let v = validate_term(FieldKind::Texture, "grid", &lex, ValidationMode::Strict);
        assert!(v.ok);
        let v = validate_term(
            FieldKind::Texture,
            "holographic-shimmer",
            &lex,
            ValidationMode::Strict,
        );
        assert!(!v.ok);
        let v = validate_term(
            FieldKind::Texture,
            "holographic-shimmer",
            &lex,
            ValidationMode::Lenient,
        );
        assert!(v.ok);
        assert!(!v.note.is_empty());
    }

    #[test]
    fn domain_round_trip() {
        for d in Domain::ALL {
            assert_eq!(d.as_str().parse::<Domain>().unwrap(), d);
            assert_eq!(d.to_string().to_lowercase().parse::<Domain>().unwrap(), d);
        }
        assert!("IVA".parse::<Domain>().is_err());
    }

    #[test]
    fn abbreviations_unique_per_domain() {
        for d in Domain::ALL {
            let cats = categories(d);
            let abbrs: HashSet<_> = cats.iter().map(|c| c.abbreviation).collect();
            assert_eq!(abbrs.len(), cats.len());
            assert!(cats.iter().all(|c| c.domain == d && !c.criteria.is_empty()));
        }
        assert_eq!(
            find_category(Domain::Iqa, "sev.").unwrap().name,
            "Distortion Severity"
        );
    }

    #[test]
    fn override_rejects_overlap() {
        let file = LexiconFile {
            texture_weak: Some(vec!["grid".into()]),
            texture_medium: Some(vec!["Grid".into()]),
            ..Default::default()
        };
        assert!(matches!(
            file.into_lexicon(),
            Err(TaxonomyError::OverlappingTexture { .. })
        ));
        let file = LexiconFile {
            style: Some(vec!["  ".into()]),
            ..Default::default()
        };
        assert!(matches!(file.into_lexicon(), Err(TaxonomyError::EmptyTerm { .. })));
    }
}
