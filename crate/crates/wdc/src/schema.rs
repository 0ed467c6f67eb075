//! Versioned text schema for functions, models, and reports.
//!
//! Everything serializes to JSON with a `schema` tag. Doubles round-trip
//! bit-exactly through the shortest-round-trip decimal encoding.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::dc::{DCFunction, MaxAffine};
use crate::error::{Error, Result};
use crate::planar::{PlanarLocalModel, RawGerm};

pub const DCF_SCHEMA: &str = "wdc.dcf/1";
pub const MODEL_SCHEMA: &str = "wdc.model/1";
pub const GERM_SCHEMA: &str = "wdc.germ/1";
pub const REPORT_SCHEMA: &str = "wdc.report/1";

#[derive(Debug, Serialize, Deserialize)]
struct DcFile {
    schema: String,
    dim: usize,
    g: MaxAffine,
    h: MaxAffine,
}

pub fn dc_to_json(f: &DCFunction) -> String {
    let file = DcFile {
        schema: DCF_SCHEMA.to_string(),
        dim: f.dim(),
        g: f.g.clone(),
        h: f.h.clone(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn dc_from_json(text: &str) -> Result<DCFunction> {
    let file: DcFile = parse(text)?;
    expect_schema(&file.schema, DCF_SCHEMA)?;
    if file.g.dim() != file.dim || file.h.dim() != file.dim {
        return Err(Error::Invalid("piece dimension disagrees with the dim field".into()));
    }
    for piece in file.g.pieces.iter().chain(&file.h.pieces) {
        if !piece.b.is_finite() || piece.a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
    }
    Ok(DCFunction::new(file.g, file.h))
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    schema: String,
    model: PlanarLocalModel,
}

pub fn model_to_json(m: &PlanarLocalModel) -> String {
    let file = ModelFile { schema: MODEL_SCHEMA.to_string(), model: m.clone() };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn model_from_json(text: &str) -> Result<PlanarLocalModel> {
    let file: ModelFile = parse(text)?;
    expect_schema(&file.schema, MODEL_SCHEMA)?;
    Ok(file.model)
}

#[derive(Debug, Serialize, Deserialize)]
struct GermFile {
    schema: String,
    germ: RawGerm,
}

pub fn germ_to_json(g: &RawGerm) -> String {
    let file = GermFile { schema: GERM_SCHEMA.to_string(), germ: g.clone() };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn germ_from_json(text: &str) -> Result<RawGerm> {
    let file: GermFile = parse(text)?;
    expect_schema(&file.schema, GERM_SCHEMA)?;
    Ok(file.germ)
}

/// Envelope for report payloads: aura reports, touch reports, Euler
/// results, covers, fractal checks.
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile<T> {
    pub schema: String,
    pub kind: String,
    pub payload: T,
}

pub fn report_to_json<T: Serialize>(kind: &str, payload: &T) -> String {
    let file = ReportFile {
        schema: REPORT_SCHEMA.to_string(),
        kind: kind.to_string(),
        payload,
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn report_from_json<T: DeserializeOwned>(text: &str, kind: &str) -> Result<T> {
    let file: ReportFile<T> = parse(text)?;
    expect_schema(&file.schema, REPORT_SCHEMA)?;
    if file.kind != kind {
        return Err(Error::Invalid(format!(
            "report kind mismatch: expected {kind}, got {}",
            file.kind
        )));
    }
    Ok(file.payload)
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed input: {e}")))
}

fn expect_schema(got: &str, want: &str) -> Result<()> {
    if got != want {
        return Err(Error::Invalid(format!("schema mismatch: expected {want}, got {got}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dc_roundtrip_exact() {
        let f = crate::dc::sup_norm(2)
            .max(&crate::dc::l1_norm(2).scale(0.1234567890123))
            .unwrap();
        let text = dc_to_json(&f);
        let back = dc_from_json(&text).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn wrong_schema_rejected() {
        let f = crate::dc::abs_1d();
        let text = dc_to_json(&f).replace("wdc.dcf/1", "wdc.dcf/9");
        assert!(dc_from_json(&text).is_err());
    }

    #[test]
    fn model_roundtrip() {
        let m = crate::planar::PlanarLocalModel::IsolatedPoint { base: vec![0.25, -1.5] };
        let text = model_to_json(&m);
        let back = model_from_json(&text).unwrap();
        assert!(matches!(back, crate::planar::PlanarLocalModel::IsolatedPoint { .. }));
    }

    proptest! {
        #[test]
        fn prop_doubles_roundtrip_bit_exact(a in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, b in -1e300f64..1e300) {
            let f = crate::dc::DCFunction::affine(crate::dc::AffineMap::new(vec![a, b], a * 0.5 - b));
            let back = dc_from_json(&dc_to_json(&f)).unwrap();
            prop_assert_eq!(f.g.pieces[0].a[0].to_bits(), back.g.pieces[0].a[0].to_bits());
            prop_assert_eq!(f.g.pieces[0].a[1].to_bits(), back.g.pieces[0].a[1].to_bits());
            prop_assert_eq!(f.g.pieces[0].b.to_bits(), back.g.pieces[0].b.to_bits());
        }
    }
}
