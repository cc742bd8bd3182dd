//! JSON structure-definition files.
//!
//! ```json
//! {
//!   "label": "heisenberg",
//!   "eta": ["-0.5*y", "0", "0.5"],
//!   "xi": ["0", "0", "2"],
//!   "g": [["0.25 + 0.25*y^2", "0", "-0.25*y"],
//!         ["0", "0.25", "0"],
//!         ["-0.25*y", "0", "0.25"]],
//!   "domain": {"bounds": [[-1, 1], [-1, 1], [-1, 1]], "periods": [null, null, null]}
//! }
//! ```
//!
//! `xi` and `phi` are optional. A missing ξ is the Reeb field of η; a
//! supplied one must agree with it. A missing φ is solved from
//! dη = 2g(·, φ·).

use std::path::Path;

use serde::Deserialize;

use super::{reeb_field, ContactStructure, PhiSource};
use crate::jetcalc::{parse_expression, Point, ScalarField};
use crate::sampling::{sample_points, SampleDomain, Strategy};
use crate::tensorlab::{norm, sub, EndoField, MetricField, OneFormField, VectorField};
use crate::{Error, Result};

/// Largest allowed difference between a supplied ξ and the Reeb field.
pub const XI_MISMATCH_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    #[serde(default)]
    pub label: Option<String>,
    pub eta: [String; 3],
    #[serde(default)]
    pub xi: Option<[String; 3]>,
    #[serde(default)]
    pub phi: Option<[[String; 3]; 3]>,
    pub g: [[String; 3]; 3],
    pub domain: SampleDomain,
}

fn parse_field(text: &str, what: &str, periods: [Option<f64>; 3]) -> Result<ScalarField> {
    parse_expression(text)
        .map(|f| f.with_periods(periods))
        .map_err(|e| Error::StructureFile(format!("{what}: {e} in '{text}'")))
}

fn parse3(c: &[String; 3], what: &str, periods: [Option<f64>; 3]) -> Result<[ScalarField; 3]> {
    Ok([
        parse_field(&c[0], &format!("{what}[0]"), periods)?,
        parse_field(&c[1], &format!("{what}[1]"), periods)?,
        parse_field(&c[2], &format!("{what}[2]"), periods)?,
    ])
}

fn parse33(c: &[[String; 3]; 3], what: &str, periods: [Option<f64>; 3]) -> Result<[[ScalarField; 3]; 3]> {
    Ok([
        parse3(&c[0], &format!("{what}[0]"), periods)?,
        parse3(&c[1], &format!("{what}[1]"), periods)?,
        parse3(&c[2], &format!("{what}[2]"), periods)?,
    ])
}

fn check_periodic(fields: &[&ScalarField], points: &[Point], what: &str) -> Result<()> {
    for f in fields {
        let r = f.periodicity_residual(points)?;
        if r > 1e-12 {
            return Err(Error::StructureFile(format!(
                "{what} component {f} is not periodic with the declared periods (deviation {r:e})"
            )));
        }
    }
    Ok(())
}

/// Builds a structure from the JSON text of a structure file.
pub fn parse_structure(text: &str) -> Result<ContactStructure> {
    let file: StructureFile =
        serde_json::from_str(text).map_err(|e| Error::StructureFile(e.to_string()))?;
    let domain = file.domain;
    domain.validate()?;
    let periods = domain.periods;
    let probe = sample_points(&domain, Strategy::Grid([4, 4, 4]), 0)?;

    let eta = OneFormField::new(parse3(&file.eta, "eta", periods)?);
    let g_full = parse33(&file.g, "g", periods)?;
    for p in &probe {
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (a, b) = (g_full[i][j].eval(p)?, g_full[j][i].eval(p)?);
                if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return Err(Error::StructureFile(format!("g is not symmetric at {p:?}")));
                }
            }
        }
    }
    let g = MetricField::symmetric_from(g_full);
    let derived = reeb_field(&eta, &g);
    let xi = match &file.xi {
        None => derived,
        Some(text) => {
            let supplied = VectorField::new(parse3(text, "xi", periods)?);
            for p in &probe {
                let gap = norm(sub(supplied.eval(p)?, derived.eval(p)?));
                if gap > XI_MISMATCH_LIMIT {
                    return Err(Error::StructureFile(format!(
                        "supplied xi differs from the Reeb field of eta by {gap:e} at {p:?}"
                    )));
                }
            }
            supplied
        }
    };
    let phi = match &file.phi {
        None => PhiSource::Solved,
        Some(text) => PhiSource::Explicit(EndoField::new(parse33(text, "phi", periods)?)),
    };

    let mut components: Vec<&ScalarField> = eta.0.iter().chain(xi.0.iter()).collect();
    components.extend(g.components().iter().flatten());
    if let PhiSource::Explicit(phi) = &phi {
        components.extend(phi.0.iter().flatten());
    }
    check_periodic(&components, &probe, "structure")?;

    let label = file.label.unwrap_or_else(|| "structure-file".to_string());
    Ok(ContactStructure::new(&label, eta, xi, phi, g, domain)
        .with_provenance("structure_source", "file"))
}

pub fn load_structure(path: &Path) -> Result<ContactStructure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::StructureFile(format!("{}: {e}", path.display())))?;
    parse_structure(&text)
}
