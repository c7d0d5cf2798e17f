//! Browser bindings. Each operation takes plain strings and returns a JSON
//! document; the `*_json` functions are the same operations without the
//! wasm-bindgen layer so they can be tested natively.

use finecurve::obstructions::{annulus_core_obstruction, generate_family, FamilySpec, ObstructionError};
use finecurve::realizer::{realize_annulus, realize_fine_torus, RealizeError, Semantics};
use finecurve::shell::{emit_graph6, parse_graph6, render_svg, CertificateFile};
use finecurve::verifier::check_certificate;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Realizes `graph6` on `"torus"` or `"annulus"` and returns the certificate,
/// an independent verdict and an SVG drawing.
pub fn realize_json(graph6: &str, surface: &str, semantics: &str) -> Result<String, String> {
    let g = parse_graph6(graph6.trim()).map_err(|e| e.to_string())?;
    let sem: Semantics = semantics.parse()?;
    let cert = match surface {
        "torus" if sem == Semantics::Fine => realize_fine_torus(&g),
        "torus" => Err(RealizeError::UnsupportedSemantics(sem)),
        "annulus" => realize_annulus(&g, sem),
        other => return Err(format!("unknown surface {other:?}; expected torus or annulus")),
    }
    .map_err(|e| e.to_string())?;
    let verdict = check_certificate(&cert);
    let out = json!({
        "graph6": emit_graph6(&g),
        "curves": cert.system.curves.len(),
        "verdict": verdict,
        "svg": render_svg(&cert.system),
        "certificate": CertificateFile::new(&cert),
    });
    Ok(out.to_string())
}

/// Sidedness check for annulus core curves.
pub fn check_annulus_json(graph6: &str) -> Result<String, String> {
    let g = parse_graph6(graph6.trim()).map_err(|e| e.to_string())?;
    let verdict = annulus_core_obstruction(&g).map_err(|e| e.to_string())?;
    Ok(json!({ "graph6": emit_graph6(&g), "verdict": verdict }).to_string())
}

/// Generates a named family member: `oddcycle:<m>`, `wheel:<n>`, `fig4` or `join:<g>,<b>`.
pub fn family_json(spec: &str) -> Result<String, String> {
    let fam: FamilySpec = spec.trim().parse().map_err(|e: ObstructionError| e.to_string())?;
    let g = generate_family(&fam).map_err(|e| e.to_string())?;
    Ok(json!({
        "family": fam.to_string(),
        "graph6": emit_graph6(&g),
        "vertices": g.n(),
        "edges": g.edge_count(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn realize(graph6: &str, surface: &str, semantics: &str) -> Result<String, JsValue> {
    realize_json(graph6, surface, semantics).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn check_annulus(graph6: &str) -> Result<String, JsValue> {
    check_annulus_json(graph6).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn family(spec: &str) -> Result<String, JsValue> {
    family_json(spec).map_err(|e| JsValue::from_str(&e))
}
