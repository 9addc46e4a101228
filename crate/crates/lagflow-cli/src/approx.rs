//! `runge` and `blend`: rational approximation with prescribed poles on a
//! disk region, and sampled smooth partitions of unity.

use std::path::Path;

use lagflow::runge::partition::Partition;
use lagflow::runge::{runge_approximate, PoleTerm, RationalFunction, Region, C64};
use serde::{Deserialize, Serialize};

use crate::io::{fmt17, read_to_string, usage, write_atomic, RunResult};

// ------------------------------------------------------------- rational IO

/// `rational.json` schema: complex numbers as `[re, im]` pairs; `coeffs` is
/// the concatenation of each pole's coefficient stack (orders `1..=order`)
/// in pole order.
#[derive(Debug, Serialize, Deserialize)]
pub struct RationalFile {
    pub poles: Vec<PoleSpec>,
    pub coeffs: Vec<[f64; 2]>,
    pub poly: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validated_error: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PoleSpec {
    pub re: f64,
    pub im: f64,
    pub order: usize,
}

impl RationalFile {
    pub fn from_rational(r: &RationalFunction) -> Self {
        let poles = r
            .poles()
            .iter()
            .map(|p| PoleSpec {
                re: p.location.re,
                im: p.location.im,
                order: p.coefficients.len(),
            })
            .collect();
        let coeffs = r
            .poles()
            .iter()
            .flat_map(|p| p.coefficients.iter().map(|c| [c.re, c.im]))
            .collect();
        let poly = r.poly().iter().map(|c| [c.re, c.im]).collect();
        Self {
            poles,
            coeffs,
            poly,
            degree: None,
            fit_error: None,
            validated_error: None,
        }
    }

    pub fn into_rational(self) -> RunResult<RationalFunction> {
        let total: usize = self.poles.iter().map(|p| p.order).sum();
        if total != self.coeffs.len() {
            return Err(usage(format!(
                "rational file: pole orders sum to {total} but {} coefficients given",
                self.coeffs.len()
            )));
        }
        let mut taken = self.coeffs.iter();
        let mut poles = Vec::with_capacity(self.poles.len());
        for spec in &self.poles {
            let coefficients = (0..spec.order)
                .map(|_| {
                    let c = taken.next().expect("length checked above");
                    C64::new(c[0], c[1])
                })
                .collect();
            poles.push(PoleTerm {
                location: C64::new(spec.re, spec.im),
                coefficients,
            });
        }
        let poly = self.poly.iter().map(|c| C64::new(c[0], c[1])).collect();
        Ok(RationalFunction::new(poly, poles)?)
    }
}

pub fn load_rational(path: &Path, json: &serde_json::Value) -> RunResult<RationalFunction> {
    let file: RationalFile = serde_json::from_value(json.clone())
        .map_err(|e| usage(format!("{}: bad rational file: {e}", path.display())))?;
    file.into_rational()
}

// ------------------------------------------------------------------ runge

/// Target function named on the command line.
enum Target {
    Exp,
    SimplePole(C64),
    FromFile(RationalFunction),
}

impl Target {
    fn parse(spec: &str) -> RunResult<Self> {
        if spec == "exp" {
            return Ok(Target::Exp);
        }
        if let Some(rest) = spec.strip_prefix("rational:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(usage(format!(
                    "--function rational:RE,IM takes a complex pole location, got {rest:?}"
                )));
            }
            let re = parts[0]
                .parse::<f64>()
                .map_err(|_| usage(format!("--function rational: {:?} is not a number", parts[0])))?;
            let im = parts[1]
                .parse::<f64>()
                .map_err(|_| usage(format!("--function rational: {:?} is not a number", parts[1])))?;
            return Ok(Target::SimplePole(C64::new(re, im)));
        }
        if let Some(rest) = spec.strip_prefix("file:") {
            let path = Path::new(rest);
            let text = read_to_string(path)?;
            let json: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| usage(format!("{}: bad JSON: {e}", path.display())))?;
            return Ok(Target::FromFile(load_rational(path, &json)?));
        }
        Err(usage(format!(
            "unknown --function {spec:?}; expected exp, rational:RE,IM, or file:PATH"
        )))
    }

    fn evaluate(&self, z: C64) -> C64 {
        match self {
            Target::Exp => z.exp(),
            Target::SimplePole(s) => C64::new(1.0, 0.0) / (z - s),
            Target::FromFile(r) => r.evaluate(z),
        }
    }
}

pub fn parse_complex(flag: &str, raw: &str) -> RunResult<C64> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(usage(format!("--{flag} expects RE,IM, got {raw:?}")));
    }
    let re = parts[0]
        .parse::<f64>()
        .map_err(|_| usage(format!("--{flag}: {:?} is not a number", parts[0])))?;
    let im = parts[1]
        .parse::<f64>()
        .map_err(|_| usage(format!("--{flag}: {:?} is not a number", parts[1])))?;
    Ok(C64::new(re, im))
}

pub fn run_runge(
    function: &str,
    region: &str,
    poles: &[String],
    eps: f64,
    degree_budget: usize,
    out: &Path,
) -> RunResult<()> {
    let target = Target::parse(function)?;
    let parts: Vec<&str> = region.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!("--region expects CENTER_RE,CENTER_IM,RADIUS, got {region:?}")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| usage(format!("--region: {p:?} is not a number")))
        })
        .collect::<RunResult<_>>()?;
    let region = Region::disk(C64::new(nums[0], nums[1]), nums[2])?;
    let pole_locations: Vec<C64> = poles
        .iter()
        .map(|p| parse_complex("poles", p))
        .collect::<RunResult<_>>()?;

    // Enough samples that the widest basis stays overdetermined about 2x;
    // the validation circle is phase-shifted so the grids never coincide.
    let cols_max = (degree_budget + 1) * (1 + pole_locations.len());
    let n_fit = (2 * cols_max).max(96);
    let fit_samples = region.boundary_samples(n_fit, 0.0);
    let validation_samples = region.boundary_samples(n_fit + 13, 0.37);
    let fit = runge_approximate(
        &|z| target.evaluate(z),
        &fit_samples,
        &validation_samples,
        &pole_locations,
        degree_budget,
        eps,
    )?;

    let mut file = RationalFile::from_rational(&fit.rational);
    file.degree = Some(fit.degree);
    file.fit_error = Some(fit.fit_error);
    file.validated_error = Some(fit.validated_error);
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| usage(format!("serializing rational failed: {e}")))?;
    write_atomic(out, &(text + "\n"))
}

// ------------------------------------------------------------------ blend

pub fn run_blend(
    nodes: usize,
    kappa: Option<f64>,
    samples: usize,
    out: &Path,
) -> RunResult<()> {
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let partition = match kappa {
        None => Partition::equispaced(nodes)?,
        Some(kappa) => {
            if nodes == 0 {
                return Err(usage("--nodes must be at least 1"));
            }
            let centers = (0..nodes)
                .map(|j| (2 * j + 1) as f64 / (2 * nodes) as f64)
                .collect();
            Partition::new(centers, kappa)?
        }
    };
    let mut csv = String::from("t");
    for j in 1..=nodes {
        csv.push_str(&format!(",phi_{j}"));
    }
    csv.push('\n');
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let weights = partition.weights(t)?;
        csv.push_str(&fmt17(t));
        for w in weights {
            csv.push(',');
            csv.push_str(&fmt17(w));
        }
        csv.push('\n');
    }
    write_atomic(out, &csv)
}
