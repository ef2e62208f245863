//! Structural scene annotations: parsing, serialization and lexicon checks.
//!
//! The interchange format is JSON using the template key names
//! (`SceneType`, `SceneName`, `Components`, `ComponentName`,
//! `DescriptionContent` and the four facet groups). Facet values are lists
//! of strings and are kept verbatim, including `"N/A"` placeholders.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::taxonomy::{validate_term, FieldKind, Lexicon, ValidationMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    MalformedDocument {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
}

impl AnnotationError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        AnnotationError::SchemaViolation {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneType {
    Single,
    Composite,
}

impl SceneType {
    pub fn as_str(self) -> &'static str {
        match self {
            SceneType::Single => "Single Scene",
            SceneType::Composite => "Composite Scene",
        }
    }

    fn parse(s: &str) -> Option<SceneType> {
        match s.trim().to_lowercase().as_str() {
            "single scene" | "single" | "single-object scene" => Some(SceneType::Single),
            "composite scene" | "composite" => Some(SceneType::Composite),
            _ => None,
        }
    }
}

const NA: &str = "n/a";

pub fn is_na(entry: &str) -> bool {
    entry.trim().eq_ignore_ascii_case(NA)
}

/// Number of entries that are not the `N/A` placeholder.
pub fn effective_count<S: AsRef<str>>(values: &[S]) -> usize {
    values.iter().filter(|v| !is_na(v.as_ref())).count()
}

/// Iterates the entries that are not `N/A`.
pub fn effective<S: AsRef<str>>(values: &[S]) -> impl Iterator<Item = &str> {
    values.iter().map(AsRef::as_ref).filter(|v| !is_na(v))
}

/// The nine facet lists of one description, grouped as in the template.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Facets {
    pub base_morphology: Vec<String>,
    pub arrangement: Vec<String>,
    pub dynamics: Vec<String>,
    pub material_class: Vec<String>,
    pub surface_properties: Vec<String>,
    pub planar_contour: Vec<String>,
    pub volumetric_form: Vec<String>,
    pub functional_inference: Vec<String>,
    pub style_type: Vec<String>,
    /// Unrecognised keys, by group name (or "" for the description level).
    pub extra: Vec<(String, Map<String, Value>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetKey {
    BaseMorphology,
    Arrangement,
    Dynamics,
    MaterialClass,
    SurfaceProperties,
    PlanarContour,
    VolumetricForm,
    FunctionalInference,
    StyleType,
}

impl FacetKey {
    pub const ALL: [FacetKey; 9] = [
        FacetKey::BaseMorphology,
        FacetKey::Arrangement,
        FacetKey::Dynamics,
        FacetKey::MaterialClass,
        FacetKey::SurfaceProperties,
        FacetKey::PlanarContour,
        FacetKey::VolumetricForm,
        FacetKey::FunctionalInference,
        FacetKey::StyleType,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FacetKey::BaseMorphology => "BaseMorphology",
            FacetKey::Arrangement => "Arrangement",
            FacetKey::Dynamics => "Dynamics",
            FacetKey::MaterialClass => "MaterialClass",
            FacetKey::SurfaceProperties => "SurfaceProperties",
            FacetKey::PlanarContour => "PlanarContour",
            FacetKey::VolumetricForm => "VolumetricForm",
            FacetKey::FunctionalInference => "FunctionalInference",
            FacetKey::StyleType => "StyleType",
        }
    }

    pub fn group(self) -> &'static str {
        match self {
            FacetKey::BaseMorphology | FacetKey::Arrangement | FacetKey::Dynamics => {
                "PhysicalStructure"
            }
            FacetKey::MaterialClass | FacetKey::SurfaceProperties => "MaterialRepresentation",
            FacetKey::PlanarContour | FacetKey::VolumetricForm => "GeometricComposition",
            FacetKey::FunctionalInference | FacetKey::StyleType => "SemanticPerception",
        }
    }

    /// Lexicon the facet draws from, if any.
    pub fn field_kind(self) -> Option<FieldKind> {
        match self {
            FacetKey::BaseMorphology => Some(FieldKind::Texture),
            FacetKey::MaterialClass => Some(FieldKind::Material),
            FacetKey::PlanarContour => Some(FieldKind::Shape2d),
            FacetKey::VolumetricForm => Some(FieldKind::Shape3d),
            FacetKey::StyleType => Some(FieldKind::Style),
            _ => None,
        }
    }

    /// Fields marked as requiring exact lexicon matches.
    pub fn requires_exact_terms(self) -> bool {
        matches!(self, FacetKey::BaseMorphology | FacetKey::MaterialClass)
    }
}

const GROUPS: [&str; 4] = [
    "PhysicalStructure",
    "MaterialRepresentation",
    "GeometricComposition",
    "SemanticPerception",
];

impl Facets {
    pub fn get(&self, key: FacetKey) -> &Vec<String> {
        match key {
            FacetKey::BaseMorphology => &self.base_morphology,
            FacetKey::Arrangement => &self.arrangement,
            FacetKey::Dynamics => &self.dynamics,
            FacetKey::MaterialClass => &self.material_class,
            FacetKey::SurfaceProperties => &self.surface_properties,
            FacetKey::PlanarContour => &self.planar_contour,
            FacetKey::VolumetricForm => &self.volumetric_form,
            FacetKey::FunctionalInference => &self.functional_inference,
            FacetKey::StyleType => &self.style_type,
        }
    }

    pub fn get_mut(&mut self, key: FacetKey) -> &mut Vec<String> {
        match key {
            FacetKey::BaseMorphology => &mut self.base_morphology,
            FacetKey::Arrangement => &mut self.arrangement,
            FacetKey::Dynamics => &mut self.dynamics,
            FacetKey::MaterialClass => &mut self.material_class,
            FacetKey::SurfaceProperties => &mut self.surface_properties,
            FacetKey::PlanarContour => &mut self.planar_contour,
            FacetKey::VolumetricForm => &mut self.volumetric_form,
            FacetKey::FunctionalInference => &mut self.functional_inference,
            FacetKey::StyleType => &mut self.style_type,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub name: String,
    pub facets: Facets,
    pub extra: Map<String, Value>,
}

impl Component {
    pub fn new(name: impl Into<String>) -> Self {
        Component {
            name: name.into(),
            facets: Facets::default(),
            extra: Map::new(),
        }
    }

    pub fn with(mut self, key: FacetKey, values: &[&str]) -> Self {
        *self.facets.get_mut(key) = values.iter().map(|s| s.to_string()).collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneAnnotation {
    pub scene_type: SceneType,
    pub scene_name: String,
    pub components: Vec<Component>,
    /// Facets given directly on the scene (whole-image description).
    pub scene_facets: Option<Facets>,
    pub extra: Map<String, Value>,
}

impl SceneAnnotation {
    pub fn new(scene_type: SceneType, scene_name: impl Into<String>) -> Self {
        SceneAnnotation {
            scene_type,
            scene_name: scene_name.into(),
            components: Vec::new(),
            scene_facets: None,
            extra: Map::new(),
        }
    }

    /// An optional `id` string carried at the top level of the document.
    pub fn id(&self) -> Option<&str> {
        self.extra.get("id").and_then(Value::as_str)
    }
}

/// Parses one annotation document.
pub fn parse_annotation(document: &[u8]) -> Result<SceneAnnotation, AnnotationError> {
    let text = std::str::from_utf8(document).map_err(|e| {
        let valid = &document[..e.valid_up_to()];
        let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = valid.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        AnnotationError::MalformedDocument {
            line,
            column,
            message: "invalid UTF-8".to_string(),
        }
    })?;
    let value: Value =
        serde_json::from_str(text).map_err(|e| AnnotationError::MalformedDocument {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    annotation_from_value(&value)
}

pub fn annotation_from_value(value: &Value) -> Result<SceneAnnotation, AnnotationError> {
    let obj = value
        .as_object()
        .ok_or_else(|| AnnotationError::schema("$", "document must be a JSON object"))?;

    let scene_type_raw = require_str(obj, "SceneType", "$")?;
    let scene_type = SceneType::parse(scene_type_raw).ok_or_else(|| {
        AnnotationError::schema(
            "$.SceneType",
            format!("expected \"Single Scene\" or \"Composite Scene\", got \"{scene_type_raw}\""),
        )
    })?;
    let scene_name = require_str(obj, "SceneName", "$")?.to_string();
    let components_value = obj
        .get("Components")
        .ok_or_else(|| AnnotationError::schema("$.Components", "missing required key"))?;
    let components_list = components_value
        .as_array()
        .ok_or_else(|| AnnotationError::schema("$.Components", "expected a list"))?;

    let components = components_list
        .iter()
        .enumerate()
        .map(|(i, c)| parse_component(c, &format!("$.Components[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;

    let scene_facets = match obj.get("DescriptionContent") {
        Some(v) => Some(parse_facets(v, "$.DescriptionContent")?),
        None => None,
    };

    let extra = obj
        .iter()
        .filter(|(k, _)| {
            !matches!(
                k.as_str(),
                "SceneType" | "SceneName" | "Components" | "DescriptionContent"
            )
        })
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();

    Ok(SceneAnnotation {
        scene_type,
        scene_name,
        components,
        scene_facets,
        extra,
    })
}

fn require_str<'a>(
    obj: &'a Map<String, Value>,
    key: &str,
    parent: &str,
) -> Result<&'a str, AnnotationError> {
    match obj.get(key) {
        None => Err(AnnotationError::schema(
            format!("{parent}.{key}"),
            "missing required key",
        )),
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(AnnotationError::schema(
            format!("{parent}.{key}"),
            "expected a string",
        )),
    }
}

fn parse_component(value: &Value, path: &str) -> Result<Component, AnnotationError> {
    let obj = value
        .as_object()
        .ok_or_else(|| AnnotationError::schema(path, "component must be an object"))?;
    let name = require_str(obj, "ComponentName", path)?.to_string();
    let facets = match obj.get("DescriptionContent") {
        Some(v) => parse_facets(v, &format!("{path}.DescriptionContent"))?,
        None => Facets::default(),
    };
    let extra = obj
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "ComponentName" | "DescriptionContent"))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(Component {
        name,
        facets,
        extra,
    })
}

fn parse_facets(value: &Value, path: &str) -> Result<Facets, AnnotationError> {
    let obj = value
        .as_object()
        .ok_or_else(|| AnnotationError::schema(path, "expected an object"))?;
    let mut facets = Facets::default();

    let mut top_extra = Map::new();
    for (k, v) in obj {
        if !GROUPS.contains(&k.as_str()) {
            top_extra.insert(k.clone(), v.clone());
        }
    }
    if !top_extra.is_empty() {
        facets.extra.push((String::new(), top_extra));
    }

    for group in GROUPS {
        let Some(group_value) = obj.get(group) else {
            continue;
        };
        let group_path = format!("{path}.{group}");
        let group_obj = group_value
            .as_object()
            .ok_or_else(|| AnnotationError::schema(&group_path, "expected an object"))?;
        let mut group_extra = Map::new();
        for (k, v) in group_obj {
            let key = FacetKey::ALL
                .into_iter()
                .find(|f| f.group() == group && f.name() == k);
            match key {
                Some(key) => {
                    *facets.get_mut(key) = parse_term_list(v, &format!("{group_path}.{k}"))?
                }
                None => {
                    group_extra.insert(k.clone(), v.clone());
                }
            }
        }
        if !group_extra.is_empty() {
            facets.extra.push((group.to_string(), group_extra));
        }
    }
    Ok(facets)
}

fn parse_term_list(value: &Value, path: &str) -> Result<Vec<String>, AnnotationError> {
    let items = value
        .as_array()
        .ok_or_else(|| AnnotationError::schema(path, "facet value must be a list"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            item.as_str().map(str::to_string).ok_or_else(|| {
                AnnotationError::schema(format!("{path}[{i}]"), "facet entries must be strings")
            })
        })
        .collect()
}

fn facets_to_value(facets: &Facets) -> Value {
    let mut out = Map::new();
    let extra_for = |group: &str| facets.extra.iter().find(|(g, _)| g == group).map(|(_, m)| m);
    for group in GROUPS {
        let mut g = Map::new();
        for key in FacetKey::ALL.into_iter().filter(|k| k.group() == group) {
            g.insert(
                key.name().to_string(),
                Value::from(facets.get(key).clone()),
            );
        }
        if let Some(extra) = extra_for(group) {
            for (k, v) in extra {
                g.insert(k.clone(), v.clone());
            }
        }
        out.insert(group.to_string(), Value::Object(g));
    }
    if let Some(extra) = extra_for("") {
        for (k, v) in extra {
            out.insert(k.clone(), v.clone());
        }
    }
    Value::Object(out)
}

pub fn annotation_to_value(ann: &SceneAnnotation) -> Value {
    let mut out = Map::new();
    out.insert("SceneType".into(), Value::from(ann.scene_type.as_str()));
    out.insert("SceneName".into(), Value::from(ann.scene_name.clone()));
    let components = ann
        .components
        .iter()
        .map(|c| {
            let mut obj = Map::new();
            obj.insert("ComponentName".into(), Value::from(c.name.clone()));
            obj.insert("DescriptionContent".into(), facets_to_value(&c.facets));
            for (k, v) in &c.extra {
                obj.insert(k.clone(), v.clone());
            }
            Value::Object(obj)
        })
        .collect::<Vec<_>>();
    out.insert("Components".into(), Value::Array(components));
    if let Some(f) = &ann.scene_facets {
        out.insert("DescriptionContent".into(), facets_to_value(f));
    }
    for (k, v) in &ann.extra {
        out.insert(k.clone(), v.clone());
    }
    Value::Object(out)
}

/// Serializes to pretty-printed JSON in template key order.
pub fn serialize_annotation(ann: &SceneAnnotation) -> String {
    serde_json::to_string_pretty(&annotation_to_value(ann)).expect("JSON values always serialize")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    /// Free-form terms accepted in lenient mode.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }
}

pub fn validate_annotation(
    ann: &SceneAnnotation,
    lexicon: &Lexicon,
    mode: ValidationMode,
) -> ValidationReport {
    let mut report = ValidationReport::default();

    let n = ann.components.len();
    match ann.scene_type {
        SceneType::Composite if n < 2 => report.warnings.push(format!(
            "$.SceneType: composite scene has {n} component(s), expected at least 2"
        )),
        SceneType::Single if n > 1 => report.warnings.push(format!(
            "$.SceneType: single scene has {n} components, expected at most 1"
        )),
        _ => {}
    }

    let mut seen = std::collections::HashSet::new();
    for (i, c) in ann.components.iter().enumerate() {
        let path = format!("$.Components[{i}]");
        if c.name.trim().is_empty() {
            report.errors.push(format!("{path}.ComponentName: empty name"));
        } else if !seen.insert(c.name.trim().to_lowercase()) {
            report
                .errors
                .push(format!("{path}.ComponentName: duplicate name '{}'", c.name));
        }
        check_facets(&c.facets, &format!("{path}.DescriptionContent"), lexicon, mode, &mut report);
    }
    if let Some(f) = &ann.scene_facets {
        check_facets(f, "$.DescriptionContent", lexicon, mode, &mut report);
    }
    report
}

fn check_facets(
    facets: &Facets,
    path: &str,
    lexicon: &Lexicon,
    mode: ValidationMode,
    report: &mut ValidationReport,
) {
    let morph = &facets.base_morphology;
    let effective_morph = effective_count(morph);
    let morph_path = format!("{path}.PhysicalStructure.BaseMorphology");
    if effective_morph > 3 {
        report.warnings.push(format!(
            "{morph_path}: {effective_morph} terms, expected 1-3"
        ));
    } else if morph.is_empty() {
        report
            .warnings
            .push(format!("{morph_path}: no terms, expected 1-3"));
    }

    for key in FacetKey::ALL {
        let Some(kind) = key.field_kind() else {
            continue;
        };
        for (i, term) in facets.get(key).iter().enumerate() {
            if is_na(term) {
                continue;
            }
            let result = validate_term(kind, term, lexicon, mode);
            if result.note.is_empty() {
                continue;
            }
            let msg = format!("{path}.{}.{}[{i}]: {}", key.group(), key.name(), result.note);
            if result.ok {
                report.notes.push(msg);
            } else if key.requires_exact_terms() || term.trim().is_empty() {
                report.errors.push(msg);
            } else {
                report.warnings.push(msg);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::default_lexicon;

    pub(crate) const SKYSCRAPER: &str = include_str!("../fixtures/skyscraper.json");

    #[test]
    fn parses_skyscraper_example() {
        let ann = parse_annotation(SKYSCRAPER.as_bytes()).unwrap();
        assert_eq!(ann.scene_type, SceneType::Composite);
        assert_eq!(ann.components.len(), 2);
        assert_eq!(ann.components[0].name, "Buildings");
        assert_eq!(ann.components[0].facets.material_class, vec!["Glass", "Metal"]);
        assert_eq!(ann.components[1].facets.arrangement, vec!["N/A"]);
    }

    #[test]
    fn minimal_document() {
        let ann =
            parse_annotation(br#"{"SceneType":"Single Scene","SceneName":"x","Components":[]}"#)
                .unwrap();
        assert_eq!(ann.scene_type, SceneType::Single);
        assert!(ann.components.is_empty());
        assert!(ann.scene_facets.is_none());
    }

    #[test]
    fn schema_violations_name_the_path() {
        let err = parse_annotation(
            br#"{"SceneType":"Single Scene","SceneName":"x","Components":{}}"#,
        )
        .unwrap_err();
        assert_eq!(
            err,
            AnnotationError::SchemaViolation {
                path: "$.Components".into(),
                message: "expected a list".into()
            }
        );

        let err = parse_annotation(br#"{"SceneName":"x","Components":[]}"#).unwrap_err();
        assert!(matches!(err, AnnotationError::SchemaViolation { ref path, .. } if path == "$.SceneType"));

        let err = parse_annotation(
            br#"{"SceneType":"Single Scene","SceneName":"x","Components":[
                {"ComponentName":"a","DescriptionContent":{"PhysicalStructure":{"BaseMorphology":"grid"}}}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, AnnotationError::SchemaViolation { ref path, .. }
            if path == "$.Components[0].DescriptionContent.PhysicalStructure.BaseMorphology"));
    }

    #[test]
    fn malformed_documents_report_position() {
        let err = parse_annotation(b"{\n  \"SceneType\": ,\n}").unwrap_err();
        assert!(matches!(err, AnnotationError::MalformedDocument { line: 2, .. }));
        let err = parse_annotation(b"{\"a\":\xff}").unwrap_err();
        assert!(matches!(err, AnnotationError::MalformedDocument { column: 6, .. }));
    }

    #[test]
    fn missing_optional_facets_are_empty() {
        let ann = parse_annotation(
            br#"{"SceneType":"Single Scene","SceneName":"x","Components":[
                {"ComponentName":"a","DescriptionContent":{"PhysicalStructure":{"BaseMorphology":["grid"]}}}]}"#,
        )
        .unwrap();
        let f = &ann.components[0].facets;
        assert_eq!(f.base_morphology, vec!["grid"]);
        assert!(f.arrangement.is_empty() && f.dynamics.is_empty() && f.style_type.is_empty());
    }

    #[test]
    fn effective_count_skips_placeholders() {
        assert_eq!(effective_count(&["Glass", "Metal"]), 2);
        assert_eq!(effective_count(&["N/A"]), 0);
        assert_eq!(effective_count(&["n/a", "N/A "]), 0);
        assert_eq!(effective_count::<&str>(&[]), 0);
    }

    #[test]
    fn extra_keys_survive_round_trip() {
        let doc = br#"{"SceneType":"Single Scene","SceneName":"x","id":"img-1","Components":[
            {"ComponentName":"a","Note":"kept","DescriptionContent":{
               "PhysicalStructure":{"BaseMorphology":["grid"],"Density":"high"},
               "Lighting":"soft"}}]}"#;
        let ann = parse_annotation(doc).unwrap();
        assert_eq!(ann.id(), Some("img-1"));
        let again = parse_annotation(serialize_annotation(&ann).as_bytes()).unwrap();
        assert_eq!(ann, again);
        assert_eq!(again.components[0].extra["Note"], "kept");
    }

    #[test]
    fn skyscraper_validation() {
        let lex = default_lexicon();
        let ann = parse_annotation(SKYSCRAPER.as_bytes()).unwrap();
        let lenient = validate_annotation(&ann, &lex, ValidationMode::Lenient);
        assert!(lenient.errors.is_empty(), "{lenient:?}");
        assert!(lenient.warnings.is_empty(), "{lenient:?}");
        assert_eq!(lenient.notes.len(), 1);

        let strict = validate_annotation(&ann, &lex, ValidationMode::Strict);
        assert!(strict.errors.is_empty());
        assert_eq!(strict.warnings.len(), 1);
        assert!(strict.warnings[0].contains("Modern Architecture"));
    }

    #[test]
    fn cardinality_and_consistency_warnings() {
        let lex = default_lexicon();
        let mut ann = SceneAnnotation::new(SceneType::Single, "s");
        ann.components.push(
            Component::new("a").with(FacetKey::BaseMorphology, &["grid", "woven", "cracked", "smooth"]),
        );
        ann.components.push(Component::new("a").with(FacetKey::BaseMorphology, &["N/A"]));
        let report = validate_annotation(&ann, &lex, ValidationMode::Lenient);
        assert_eq!(report.errors.len(), 1, "duplicate name: {report:?}");
        assert_eq!(report.warnings.len(), 2, "{report:?}");
    }

    #[test]
    fn strict_material_outside_lexicon_is_error() {
        let lex = default_lexicon();
        let mut ann = SceneAnnotation::new(SceneType::Single, "s");
        ann.components.push(
            Component::new("a")
                .with(FacetKey::BaseMorphology, &["grid"])
                .with(FacetKey::MaterialClass, &["Unobtainium"]),
        );
        let report = validate_annotation(&ann, &lex, ValidationMode::Strict);
        assert_eq!(report.errors.len(), 1);
    }
}
