//! Deterministic structure–texture richness score.
//!
//! Each component contributes four integer sub-scores (physical structure,
//! material, geometry, semantics). The image score is the number of
//! components plus the sum of component totals, capped at 100. `N/A`
//! entries never count.

use serde::Serialize;
use thiserror::Error;

use crate::annotation::{effective, effective_count, Component, Facets, SceneAnnotation};
use crate::taxonomy::{texture_weight, Lexicon};

pub const MAX_SCORE: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("annotation '{scene}' has neither components nor scene-level facets")]
    EmptyAnnotation { scene: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ComponentScore {
    pub s_ps: u64,
    pub s_mr: u64,
    pub s_gc: u64,
    pub s_sp: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedScore {
    pub name: String,
    #[serde(flatten)]
    pub score: ComponentScore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IstaScore {
    pub raw: u64,
    pub clipped: u64,
    pub per_component: Vec<NamedScore>,
}

/// Weighted base morphology plus arrangement count. Dynamics is not scored.
pub fn score_physical_structure(facets: &Facets, lexicon: &Lexicon) -> u64 {
    let morphology: u64 = effective(&facets.base_morphology)
        .map(|t| u64::from(texture_weight(t, lexicon)))
        .sum();
    morphology + effective_count(&facets.arrangement) as u64
}

pub fn score_material(facets: &Facets) -> u64 {
    (effective_count(&facets.material_class) + effective_count(&facets.surface_properties)) as u64
}

pub fn score_geometry(facets: &Facets) -> u64 {
    (effective_count(&facets.planar_contour) + effective_count(&facets.volumetric_form)) as u64
}

pub fn score_semantic(facets: &Facets) -> u64 {
    (effective_count(&facets.functional_inference) + effective_count(&facets.style_type)) as u64
}

pub fn score_facets(facets: &Facets, lexicon: &Lexicon) -> ComponentScore {
    let s_ps = score_physical_structure(facets, lexicon);
    let s_mr = score_material(facets);
    let s_gc = score_geometry(facets);
    let s_sp = score_semantic(facets);
    ComponentScore {
        s_ps,
        s_mr,
        s_gc,
        s_sp,
        total: s_ps + s_mr + s_gc + s_sp,
    }
}

pub fn score_component(component: &Component, lexicon: &Lexicon) -> ComponentScore {
    score_facets(&component.facets, lexicon)
}

/// Scores a whole annotation.
///
/// Explicit components always take precedence; scene-level facets are only
/// used when the component list is empty, in which case the image counts as
/// one component.
pub fn score_image(ann: &SceneAnnotation, lexicon: &Lexicon) -> Result<IstaScore, ScoreError> {
    let per_component: Vec<NamedScore> = if !ann.components.is_empty() {
        ann.components
            .iter()
            .map(|c| NamedScore {
                name: c.name.clone(),
                score: score_component(c, lexicon),
            })
            .collect()
    } else if let Some(facets) = &ann.scene_facets {
        vec![NamedScore {
            name: ann.scene_name.clone(),
            score: score_facets(facets, lexicon),
        }]
    } else {
        return Err(ScoreError::EmptyAnnotation {
            scene: ann.scene_name.clone(),
        });
    };

    let raw = per_component.len() as u64 + per_component.iter().map(|c| c.score.total).sum::<u64>();
    Ok(IstaScore {
        raw,
        clipped: raw.min(MAX_SCORE),
        per_component,
    })
}
