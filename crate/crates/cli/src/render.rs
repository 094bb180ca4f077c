use std::fmt::Write;

use legendrian::deformation::ModuleBasis;
use legendrian::germ::{AnyGerm, PositionClass};
use legendrian::jet::{MPoly, TruncSeries};
use serde_json::{json, Value};

use crate::document::{self, Document};
use crate::Report;

fn series_text(kind_names: &[&str], branches: &[Vec<TruncSeries>], params: &[String]) -> String {
    let mut out = String::new();
    for (i, b) in branches.iter().enumerate() {
        if branches.len() > 1 {
            writeln!(out, "branch {i}:").unwrap();
        }
        for (name, s) in kind_names.iter().zip(b) {
            writeln!(out, "  {name} = {}", s.display_with("t", params)).unwrap();
        }
    }
    out
}

pub(crate) fn document_text(d: &Document) -> String {
    match d {
        Document::Germ(g) => {
            let (kind, branches) = document::germ_series(g);
            format!(
                "{kind} germ, {} branch(es)\n{}",
                branches.len(),
                series_text(kind.coordinate_names(), &branches, &[])
            )
        }
        Document::Family { family, params } => format!(
            "{} family in {}\n{}",
            family.kind(),
            if params.is_empty() {
                "no parameters".to_string()
            } else {
                params.join(", ")
            },
            series_text(family.kind().coordinate_names(), family.branches(), params)
        ),
    }
}

pub(crate) fn classify(classes: &[PositionClass]) -> Report {
    let mut text = String::new();
    let mut rows = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        writeln!(
            text,
            "branch {i}: {} (tangent cone y = 0: {}, generic position: {}, conormal keeps multiplicity: {})",
            c.case, c.tangent_cone_is_y0, c.generic_position, c.mult_equal
        )
        .unwrap();
        rows.push(json!({
            "branch": i,
            "case": c.case.to_string(),
            "tangent_cone_is_y0": c.tangent_cone_is_y0,
            "generic_position": c.generic_position,
            "mult_equal": c.mult_equal,
        }));
    }
    Report {
        text,
        json: json!({ "branches": rows }),
    }
}

pub(crate) fn transform(image: &AnyGerm, factor: &MPoly) -> Report {
    let names: Vec<String> = ["x", "y", "p"].map(String::from).to_vec();
    let doc = Document::Germ(image.clone());
    Report {
        text: format!(
            "{}contact factor: {}\n",
            document_text(&doc),
            factor.display_with(&names)
        ),
        json: json!({
            "image": document::document_to_json(&doc),
            "contact_factor": document::poly_json(factor),
        }),
    }
}

pub(crate) fn module(b: &ModuleBasis) -> Report {
    let slots = b.preset.slot_names();
    let several = b.floors.len() > 1;
    let mut text = format!(
        "{} module: dimension {}, working order {}, saturated from t^{}\n",
        b.preset.name(),
        b.dimension,
        b.trunc_order,
        b.saturation_order
    );
    let mut basis = Vec::new();
    for c in &b.monomials {
        let slot = slots[c.slot.index()];
        if several {
            writeln!(text, "  {slot}: t{}^{}", c.branch, c.degree).unwrap();
            basis.push(json!([slot, c.branch, c.degree]));
        } else {
            writeln!(text, "  {slot}: t^{}", c.degree).unwrap();
            basis.push(json!([slot, c.degree]));
        }
    }
    let json: Value = json!({
        "preset": b.preset.name(),
        "dimension": b.dimension,
        "basis": basis,
        "trunc_order": b.trunc_order,
        "saturation_order": b.saturation_order,
    });
    Report { text, json }
}
