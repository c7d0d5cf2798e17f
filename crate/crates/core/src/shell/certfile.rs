//! Certificate files: a realization plus the verdict computed when it was written.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::realizer::{RealizationCertificate, Semantics, TraceStep};
use crate::surfaces::{Curve, CurveSystem, Surface, SurfaceError};
use crate::verifier::{check_certificate, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub graph: Graph,
    #[serde(with = "semantics_text")]
    pub semantics: Semantics,
    pub surface: Surface,
    pub curves: Vec<Curve>,
    pub trace: Vec<TraceStep>,
    pub verdict: Verdict,
}

mod semantics_text {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use crate::realizer::Semantics;

    pub fn serialize<S: Serializer>(sem: &Semantics, s: S) -> Result<S::Ok, S::Error> {
        sem.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Semantics, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl CertificateFile {
    /// Packs a certificate with a freshly computed verdict.
    pub fn new(cert: &RealizationCertificate) -> Self {
        CertificateFile {
            graph: cert.graph.clone(),
            semantics: cert.semantics,
            surface: cert.system.surface.clone(),
            curves: cert.system.curves.clone(),
            trace: cert.construction.clone(),
            verdict: check_certificate(cert),
        }
    }

    /// Rebuilds the certificate, re-checking the surface and curve placement.
    pub fn certificate(&self) -> Result<RealizationCertificate, SurfaceError> {
        Ok(RealizationCertificate {
            graph: self.graph.clone(),
            semantics: self.semantics,
            system: CurveSystem::new(self.surface.clone(), self.curves.clone())?,
            construction: self.trace.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
