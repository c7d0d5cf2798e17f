//! Subcommands. Every command prints one JSON document to stdout and returns
//! 0 on success, 1 on a verified mismatch or obstruction, 2 on errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::{emit_graph6, parse_graph6, write_svg, CertificateFile};
use crate::graph::Graph;
use crate::obstructions::{annulus_core_obstruction, cone_reduce_check, generate_family, FamilySpec};
use crate::realizer::{catalog_small_torus, realize_annulus, realize_fine_torus, RealizeError, Semantics};
use crate::surfaces::CurveSystem;
use crate::surgeries::{distance2_witness, surgery_path};

#[derive(Debug, Parser)]
#[command(name = "finecurve", version, about = "Certified curve systems realizing graphs on the torus and annulus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SurfaceArg {
    Torus,
    Annulus,
}

fn parse_semantics(s: &str) -> Result<Semantics, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Realize a graph6 graph and print its certificate.
    Realize {
        graph6: String,
        #[arg(long, value_enum)]
        surface: SurfaceArg,
        #[arg(long, default_value = "fine", value_parser = parse_semantics)]
        semantics: Semantics,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Re-check a certificate file from scratch.
    Verify { cert: PathBuf },
    /// Sidedness obstruction for core curves of the annulus.
    CheckAnnulus { graph6: String },
    /// Sidedness obstruction after removing a dominating vertex.
    CheckTorus { graph6: String },
    /// Torus certificates for every graph on `n <= 5` vertices up to isomorphism.
    Catalog {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dir: PathBuf,
    },
    /// Generate a named graph: oddcycle:<m>, wheel:<n>, fig4 or join:<g>,<b>.
    Family { spec: String },
    /// Short path between two curves of a certificate meeting in k + 1 points.
    SurgeryPath {
        cert: PathBuf,
        u: usize,
        v: usize,
        #[arg(long)]
        k: usize,
    },
    /// Curve disjoint from `a` meeting `b` finitely and transversally.
    Witness { cert: PathBuf, a: usize, b: usize },
}

type Outcome = Result<(String, i32), String>;

fn doc(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn graph_arg(text: &str) -> Result<Graph, String> {
    parse_graph6(text).map_err(|e| e.to_string())
}

fn load_system(path: &Path) -> Result<(CertificateFile, CurveSystem), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = CertificateFile::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let cert = file.certificate().map_err(|e| e.to_string())?;
    Ok((file, cert.system))
}

fn realize(g: &Graph, surface: SurfaceArg, sem: Semantics) -> Result<CertificateFile, RealizeError> {
    let cert = match surface {
        SurfaceArg::Torus if sem == Semantics::Fine => realize_fine_torus(g)?,
        SurfaceArg::Torus => return Err(RealizeError::UnsupportedSemantics(sem)),
        SurfaceArg::Annulus => realize_annulus(g, sem)?,
    };
    Ok(CertificateFile::new(&cert))
}

fn execute(cmd: Command) -> Outcome {
    match cmd {
        Command::Realize { graph6, surface, semantics, out, svg } => {
            let g = graph_arg(&graph6)?;
            let file = realize(&g, surface, semantics).map_err(|e| e.to_string())?;
            let text = file.to_json();
            if let Some(p) = out {
                std::fs::write(&p, &text).map_err(|e| format!("{}: {e}", p.display()))?;
            }
            if let Some(p) = svg {
                let sys = file.certificate().map_err(|e| e.to_string())?.system;
                write_svg(&sys, &p).map_err(|e| format!("{}: {e}", p.display()))?;
            }
            let code = if file.verdict.ok { 0 } else { 1 };
            Ok((text, code))
        }
        Command::Verify { cert } => {
            let text = std::fs::read_to_string(&cert).map_err(|e| format!("{}: {e}", cert.display()))?;
            let file = CertificateFile::from_json(&text).map_err(|e| format!("{}: {e}", cert.display()))?;
            let verdict = match file.certificate() {
                Ok(c) => crate::verifier::check_certificate(&c),
                Err(e) => return Err(e.to_string()),
            };
            let code = if verdict.ok { 0 } else { 1 };
            Ok((doc(json!({ "command": "verify", "verdict": verdict })), code))
        }
        Command::CheckAnnulus { graph6 } => {
            let g = graph_arg(&graph6)?;
            let verdict = annulus_core_obstruction(&g).map_err(|e| e.to_string())?;
            let code = verdict.is_obstruction() as i32;
            Ok((doc(json!({ "command": "check-annulus", "graph6": emit_graph6(&g), "verdict": verdict })), code))
        }
        Command::CheckTorus { graph6 } => {
            let g = graph_arg(&graph6)?;
            let verdict = cone_reduce_check(&g).map_err(|e| e.to_string())?;
            let code = verdict.is_obstruction() as i32;
            Ok((doc(json!({ "command": "check-torus", "graph6": emit_graph6(&g), "verdict": verdict })), code))
        }
        Command::Catalog { n, dir } => {
            let certs = catalog_small_torus(n).map_err(|e| e.to_string())?;
            std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            let mut files = Vec::new();
            let mut all_ok = true;
            for (i, cert) in certs.iter().enumerate() {
                let file = CertificateFile::new(cert);
                all_ok &= file.verdict.ok;
                let name = format!("class_{i:02}.json");
                let p = dir.join(&name);
                std::fs::write(&p, file.to_json()).map_err(|e| format!("{}: {e}", p.display()))?;
                files.push(json!({ "file": name, "graph6": emit_graph6(&cert.graph), "ok": file.verdict.ok }));
            }
            let out = json!({ "command": "catalog", "n": n, "classes": certs.len(), "all_ok": all_ok, "files": files });
            Ok((doc(out), if all_ok { 0 } else { 1 }))
        }
        Command::Family { spec } => {
            let fam: FamilySpec = spec.parse().map_err(|e: crate::obstructions::ObstructionError| e.to_string())?;
            let g = generate_family(&fam).map_err(|e| e.to_string())?;
            let out = json!({
                "command": "family",
                "family": fam.to_string(),
                "graph6": emit_graph6(&g),
                "graph": g,
            });
            Ok((doc(out), 0))
        }
        Command::SurgeryPath { cert, u, v, k } => {
            let (_, sys) = load_system(&cert)?;
            let path = surgery_path(&sys, u, v, k).map_err(|e| e.to_string())?;
            let counts: Vec<Option<usize>> = path
                .curves
                .windows(2)
                .map(|w| sys.surface.report_curves(&w[0], &w[1]).ok().and_then(|r| r.cardinality.finite()))
                .collect();
            let out = json!({
                "command": "surgery-path",
                "case": path.case,
                "curves": path.curves,
                "counts": counts,
                "trace": path.trace,
            });
            Ok((doc(out), 0))
        }
        Command::Witness { cert, a, b } => {
            let (_, sys) = load_system(&cert)?;
            let c = distance2_witness(&sys, a, b).map_err(|e| e.to_string())?;
            let report = |l| {
                sys.curve(l).map_err(|e| e.to_string()).and_then(|d| sys.surface.report_curves(&c, d).map_err(|e| e.to_string()))
            };
            let out = json!({ "command": "witness", "curve": c, "against_a": report(a)?, "against_b": report(b)? });
            Ok((doc(out), 0))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
