//! Browser demo: place labeled points, train a model, and inspect the class
//! regions and per-point scores.
//!
//! The page talks to one [`Demo`] value. Everything it returns is either SVG
//! markup or a JSON string, so the JavaScript side stays a thin shell.

use serde::Serialize;
use tsvm_core::classifier::decide;
use tsvm_core::render::{class_color, render_svg, Overlay};
use tsvm_core::validation::pinned::triangle_edges;
use tsvm_core::{
    export_regions_2d, train, Bounds, ClassRegion, Label, LabeledDataset, ModelKind,
    MulticlassModel, TrainConfig,
};
use wasm_bindgen::prelude::*;

/// The world window shown by the page.
pub const WORLD: [f64; 4] = [0.0, 10.0, 0.0, 10.0];

const MAX_CLASSES: usize = 6;

#[derive(Serialize)]
struct TrainSummary {
    kind: ModelKind,
    lambda: f64,
    lifted_margin: f64,
    supports: Vec<Vec<usize>>,
    /// "halfspace", "universe" or "empty" per class.
    regions: Vec<&'static str>,
    /// Class slot of each trained class.
    slots: Vec<usize>,
    violations: Option<usize>,
}

#[derive(Serialize)]
struct Classified {
    label: Option<usize>,
    scores: Vec<f64>,
    confident: bool,
    delta: bool,
}

#[wasm_bindgen]
pub struct Demo {
    classes: Vec<Vec<Vec<f64>>>,
    model: Option<MulticlassModel>,
}

impl Default for Demo {
    fn default() -> Self {
        Demo::new()
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Demo {
        Demo {
            classes: vec![Vec::new(); 3],
            model: None,
        }
    }

    /// Number of class slots the page offers.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn color(class: usize) -> String {
        class_color(class).to_string()
    }

    /// Add a point to `class`; the model is dropped since it no longer fits.
    pub fn add_point(&mut self, class: usize, x: f64, y: f64) -> Result<(), String> {
        if class >= MAX_CLASSES {
            return Err(format!("at most {MAX_CLASSES} classes"));
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err("coordinates must be finite".into());
        }
        if class >= self.classes.len() {
            self.classes.resize(class + 1, Vec::new());
        }
        self.classes[class].push(vec![x, y]);
        self.model = None;
        Ok(())
    }

    pub fn clear(&mut self) {
        self.classes = vec![Vec::new(); 3];
        self.model = None;
    }

    /// Replace the points by a preset: `triangle` or `clusters`.
    pub fn load_preset(&mut self, name: &str) -> Result<(), String> {
        self.classes = match name {
            // Edges of a triangle, scaled into the window.
            "triangle" => triangle_edges()
                .classes()
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|p| vec![2.0 + 1.5 * p[0], 2.0 + 1.5 * p[1]])
                        .collect()
                })
                .collect(),
            "clusters" => vec![
                vec![
                    vec![2.0, 2.0],
                    vec![2.8, 1.5],
                    vec![1.6, 3.0],
                    vec![3.0, 2.6],
                ],
                vec![vec![7.5, 2.0], vec![8.2, 3.1], vec![6.9, 2.8]],
                vec![
                    vec![5.0, 7.5],
                    vec![4.2, 8.3],
                    vec![5.9, 8.0],
                    vec![5.2, 6.8],
                ],
            ],
            other => return Err(format!("unknown preset {other:?}")),
        };
        self.model = None;
        Ok(())
    }

    /// Train on the non-empty classes. `kind` is `simple` or `tsvm`; a
    /// positive `soft_margin` selects the soft variant. Returns a JSON summary.
    pub fn train(&mut self, kind: &str, soft_margin: Option<f64>) -> Result<String, String> {
        let kind = match kind {
            "simple" => ModelKind::Simple,
            "tsvm" => ModelKind::Tsvm,
            other => return Err(format!("unknown model kind {other:?}")),
        };
        let ds = self.dataset()?;
        let config = TrainConfig {
            kind,
            soft_margin: soft_margin.filter(|c| *c > 0.0),
            ..TrainConfig::default()
        };
        let model = train(&ds, &config).map_err(|e| e.to_string())?;
        let summary = TrainSummary {
            kind,
            lambda: model.lambda(),
            lifted_margin: model.lifted_margin,
            supports: model.supports.clone(),
            regions: model
                .halfspaces
                .iter()
                .map(|r| match r {
                    ClassRegion::HalfSpace(_) => "halfspace",
                    ClassRegion::Universe => "universe",
                    ClassRegion::Empty => "empty",
                })
                .collect(),
            violations: model.info.soft.as_ref().map(|s| s.violations),
            slots: self.used_classes(),
        };
        self.model = Some(model);
        Ok(serde_json::to_string(&summary).expect("summary serializes"))
    }

    /// Scores and decision at a point, as JSON. The label is a class slot;
    /// scores follow the trained classes in slot order.
    pub fn classify(&self, x: f64, y: f64) -> Result<String, String> {
        let model = self.model.as_ref().ok_or("train a model first")?;
        let p = decide(&model.score_values(&[x, y]), model.lambda());
        let out = Classified {
            label: match p.label {
                Label::Class(i) => Some(self.used_classes()[i]),
                Label::Ambiguous => None,
            },
            scores: p.scores,
            confident: p.in_confident_region,
            delta: p.in_delta,
        };
        Ok(serde_json::to_string(&out).expect("prediction serializes"))
    }

    /// SVG of the window: regions when a model exists, then the points.
    pub fn render(&self, resolution: usize) -> String {
        let [x0, x1, y0, y1] = WORLD;
        let bounds = Bounds {
            x_min: x0,
            x_max: x1,
            y_min: y0,
            y_max: y1,
        };
        let used = self.used_classes();
        let pts: Vec<Vec<Vec<f64>>> = used.iter().map(|&i| self.classes[i].clone()).collect();
        match &self.model {
            Some(m) => {
                let export =
                    export_regions_2d(m, bounds, resolution.clamp(1, 400)).expect("planar model");
                render_svg(
                    &export,
                    Overlay {
                        classes: &pts,
                        supports: &m.supports,
                        colors: &used,
                    },
                )
            }
            None => {
                // No regions yet: a zero-resolution export is not allowed, so
                // draw the points on an empty canvas directly.
                let mut s = String::from(
                    r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600"><rect width="600" height="600" fill="white"/>"#,
                );
                for (i, class) in self.classes.iter().enumerate() {
                    for p in class {
                        let cx = (p[0] - x0) / (x1 - x0) * 600.0;
                        let cy = 600.0 - (p[1] - y0) / (y1 - y0) * 600.0;
                        s.push_str(&format!(
                            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="{}" stroke="black" stroke-width="0.5"/>"#,
                            class_color(i)
                        ));
                    }
                }
                s.push_str("</svg>\n");
                s
            }
        }
    }
}

impl Demo {
    fn used_classes(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| !self.classes[i].is_empty())
            .collect()
    }

    fn dataset(&self) -> Result<LabeledDataset, String> {
        let used = self.used_classes();
        if used.len() < 2 {
            return Err("place points of at least two classes".into());
        }
        LabeledDataset::new(used.iter().map(|&i| self.classes[i].clone()).collect())
            .map_err(|e| e.to_string())
    }
}
