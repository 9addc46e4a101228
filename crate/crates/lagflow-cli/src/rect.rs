//! Rectangle-domain subcommands: the eigenmode table (`modes`), the Cauchy
//! solve (`cauchy`), interior-line control design (`design`), and the
//! amplification/compatibility diagnostics (`diagnose`).

use std::path::{Path, PathBuf};

use lagflow::cauchy::{
    amplification_factor, compatibility, design_control, solve_cauchy, BoundaryData, Segment,
    SeriesField,
};
use lagflow::steklov::{
    eigenvalue, LateralCondition, RectangleDomain, Side, TransverseBasis,
};
use serde::{Deserialize, Serialize};

use crate::io::{
    expect_header, fmt17, parse_f64, parse_json, parse_usize, read_csv, read_to_string, usage,
    write_atomic, RunResult,
};

/// Lateral condition named on the command line or in configs.
pub fn lateral_from_name(variant: &str, alpha: Option<f64>) -> RunResult<LateralCondition> {
    match variant {
        "neumann" => {
            if alpha.is_some() {
                return Err(usage("--alpha applies to the robin variant only"));
            }
            Ok(LateralCondition::neumann())
        }
        "dirichlet" => {
            if alpha.is_some() {
                return Err(usage("--alpha applies to the robin variant only"));
            }
            Ok(LateralCondition::dirichlet())
        }
        "robin" => {
            let alpha = alpha.ok_or_else(|| usage("the robin variant needs --alpha"))?;
            Ok(LateralCondition::robin(alpha)?)
        }
        other => Err(usage(format!(
            "unknown variant {other:?}; expected neumann, dirichlet, or robin"
        ))),
    }
}

/// Rectangle (and optional interior line) as it appears in JSON configs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DomainSpec {
    pub l1: f64,
    pub l2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lstar: Option<f64>,
}

impl DomainSpec {
    pub fn build(&self) -> RunResult<RectangleDomain> {
        let domain = RectangleDomain::new(self.l1, self.l2)?;
        match self.lstar {
            Some(level) => Ok(domain.with_interior_level(level)?),
            None => Ok(domain),
        }
    }
}

// ------------------------------------------------------------------ modes

pub fn run_modes(
    l1: f64,
    l2: f64,
    variant: &str,
    alpha: Option<f64>,
    kmax: usize,
    out: &Path,
) -> RunResult<()> {
    let lateral = lateral_from_name(variant, alpha)?;
    let domain = RectangleDomain::new(l1, l2)?;
    let basis = TransverseBasis::build(l1, lateral, kmax + 1)?;
    let mut csv = String::from("j,k,eigenvalue,transverse_frequency\n");
    for (j, side) in [(0, Side::Bottom), (1, Side::Top)] {
        for k in 0..=kmax {
            let mu = eigenvalue(&domain, &lateral, side, k)?;
            let freq = basis.frequency(k);
            csv.push_str(&format!("{j},{k},{},{}\n", fmt17(mu), fmt17(freq)));
        }
    }
    write_atomic(out, &csv)
}

// ----------------------------------------------------------------- cauchy

#[derive(Debug, Deserialize)]
pub struct CauchyConfig {
    pub domain: DomainSpec,
    pub variant: String,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    pub f0: Vec<f64>,
    pub g0: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FieldFile {
    pub coeffs0: Vec<f64>,
    pub coeffs1: Vec<f64>,
    pub domain: DomainSpec,
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl FieldFile {
    pub fn load(path: &Path, json: &serde_json::Value) -> RunResult<SeriesField> {
        let file: FieldFile = serde_json::from_value(json.clone())
            .map_err(|e| usage(format!("{}: bad field file: {e}", path.display())))?;
        let lateral = lateral_from_name(&file.variant, file.alpha)?;
        let domain = file.domain.build()?;
        Ok(SeriesField::from_coefficients(
            domain,
            lateral,
            file.coeffs0,
            file.coeffs1,
        )?)
    }
}

pub fn run_cauchy(config_path: &Path, out: &Path) -> RunResult<()> {
    let text = read_to_string(config_path)?;
    let config: CauchyConfig = parse_json(config_path, &text)?;
    let lateral = lateral_from_name(&config.variant, config.alpha)?;
    let domain = config.domain.build()?;
    let f0 = BoundaryData::new(Segment::Bottom, lateral, config.f0);
    let g0 = BoundaryData::new(Segment::Bottom, lateral, config.g0);
    let field = solve_cauchy(&f0, &g0, &domain, &lateral, config.n)?;
    let out_file = FieldFile {
        coeffs0: field.coeffs_bottom().to_vec(),
        coeffs1: field.coeffs_top().to_vec(),
        domain: config.domain,
        variant: config.variant,
        alpha: config.alpha,
    };
    let json = serde_json::to_string_pretty(&out_file)
        .map_err(|e| usage(format!("serializing field failed: {e}")))?;
    write_atomic(out, &(json + "\n"))
}

// ----------------------------------------------------------------- design

/// Reads a `k,a_k` table into a dense coefficient vector.
fn read_target_coeffs(path: &Path) -> RunResult<Vec<f64>> {
    let (header, rows) = read_csv(path)?;
    expect_header(path, &header, &["k", "a_k"])?;
    let mut entries = Vec::new();
    let mut max_k = 0usize;
    for row in &rows {
        if row.len() != 2 {
            return Err(usage(format!("{}: each row needs two fields", path.display())));
        }
        let k = parse_usize(path, "k", &row[0])?;
        let a = parse_f64(path, "a_k", &row[1])?;
        max_k = max_k.max(k);
        entries.push((k, a));
    }
    if entries.is_empty() {
        return Err(usage(format!("{}: no target rows", path.display())));
    }
    let mut coeffs = vec![0.0; max_k + 1];
    for (k, a) in entries {
        coeffs[k] += a;
    }
    Ok(coeffs)
}

pub fn run_design(
    target: &Path,
    lstar: f64,
    l1: f64,
    l2: f64,
    out: &Path,
) -> RunResult<()> {
    let coeffs = read_target_coeffs(target)?;
    let n = coeffs.len();
    let domain = RectangleDomain::new(l1, l2)?.with_interior_level(lstar)?;
    let data = BoundaryData::new(Segment::InteriorLine, LateralCondition::neumann(), coeffs);
    let control = design_control(&data, &domain, n)?;
    let json = serde_json::json!({
        "domain": { "l1": l1, "l2": l2, "lstar": lstar },
        "variant": "neumann",
        "f0": control.trace.coeffs,
        "g0": control.flux.coeffs,
        "dropped": control.dropped,
        "gains": control.gains,
        "star_norm_sq": control.report.star_norm_sq,
        "verdict": control.report.verdict,
    });
    let text = serde_json::to_string_pretty(&json)
        .map_err(|e| usage(format!("serializing control failed: {e}")))?;
    write_atomic(out, &(text + "\n"))
}

// --------------------------------------------------------------- diagnose

pub fn run_diagnose(config_path: &Path, out: &Path) -> RunResult<()> {
    let text = read_to_string(config_path)?;
    let config: CauchyConfig = parse_json(config_path, &text)?;
    if config.domain.lstar.is_none() {
        return Err(usage("diagnose needs domain.lstar in the config"));
    }
    let lateral = lateral_from_name(&config.variant, config.alpha)?;
    let domain = config.domain.build()?;
    let f0 = BoundaryData::new(Segment::Bottom, lateral, config.f0);
    let g0 = BoundaryData::new(Segment::Bottom, lateral, config.g0);
    let report = compatibility(&f0, &g0, &domain, &lateral, config.n)?;
    let mut csv = String::from("k,amplification,clcns_partial_sum\n");
    for k in 1..config.n {
        let amp = amplification_factor(&domain, k)?;
        let partial = report.partial_sums[k];
        csv.push_str(&format!("{k},{},{}\n", fmt17(amp), fmt17(partial)));
    }
    write_atomic(out, &csv)
}

/// Output path helper shared with other command families.
pub fn sibling(path: &Path, name: &str) -> PathBuf {
    path.with_file_name(name)
}
