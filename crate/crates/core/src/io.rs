//! Document formats: system files, design reports and simulation traces.
//!
//! Systems, reports and configuration are JSON. Floats are always written
//! as `{:.16e}` (17 significant digits), which makes reports byte-identical
//! across runs and lets them be parsed back without loss.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::SystemRealization;
use crate::design::{DesignConfig, PiObserver, VerificationReport};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, RealMatrix};
use crate::sim::{fitted_decay_rate, SimulationTrace};
use crate::tolerances::Tolerances;

/// `a`, `a+bi` or `a-bi` with the shortest round-tripping decimals.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Inverse of [`format_complex`]; also accepts `bi`, `a+i` and `j` for the
/// imaginary unit.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("invalid complex number {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let num = |x: &str| x.parse::<f64>().ok().filter(|v| v.is_finite());
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return num(&t).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |x: &str| match x {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        x => num(x),
    };
    match split {
        Some(i) => {
            let re = num(&body[..i]).ok_or_else(bad)?;
            let im = imag(&body[i..]).ok_or_else(bad)?;
            Ok(Complex64::new(re, im))
        }
        None => Ok(Complex64::new(0.0, imag(body).ok_or_else(bad)?)),
    }
}

/// Pretty JSON with fixed-precision floats.
struct FixedFloat<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as indented JSON with 17-digit floats and a trailing
/// newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let fmt = FixedFloat(serde_json::ser::PrettyFormatter::with_indent(b"  "));
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_value(text: &str, origin: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))
}

/// Reads a JSON array of equal-length numeric rows. Errors name the field,
/// row and entry.
pub fn matrix_from_value(v: &Value, field: &str) -> Result<RealMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("field {field:?}: expected an array of rows")))?;
    let mut parsed: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("field {field:?}, row {}: expected an array of numbers", i + 1)))?;
        let mut r = Vec::with_capacity(entries.len());
        for (j, x) in entries.iter().enumerate() {
            let x = x.as_f64().ok_or_else(|| {
                Error::Parse(format!("field {field:?}, row {}, entry {}: expected a number, found {x}", i + 1, j + 1))
            })?;
            r.push(x);
        }
        if let Some(first) = parsed.first() {
            if first.len() != r.len() {
                return Err(Error::Parse(format!(
                    "field {field:?}, row {}: has {} entries, expected {} (ragged rows)",
                    i + 1,
                    r.len(),
                    first.len()
                )));
            }
        }
        parsed.push(r);
    }
    RealMatrix::from_rows(&parsed).map_err(|e| Error::Parse(format!("field {field:?}: {e}")))
}

/// Parses a system document `{"name"?, "A", "B", "C"}`.
pub fn parse_system(text: &str, origin: &str, tol_rank: f64) -> Result<SystemRealization> {
    let v = parse_value(text, origin)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{origin}: expected a JSON object with keys \"A\", \"B\", \"C\"")))?;
    let field = |k: &str| {
        obj.get(k)
            .ok_or_else(|| Error::Parse(format!("{origin}: missing field {k:?}")))
            .and_then(|v| matrix_from_value(v, k).map_err(|e| Error::Parse(format!("{origin}: {e}"))))
    };
    let (a, b, c) = (field("A")?, field("B")?, field("C")?);
    let n = a.rows();
    // An input matrix written as `[]` means no inputs.
    let b = if b.rows() == 0 && n > 0 { RealMatrix::zeros(n, 0) } else { b };
    let mut sys = SystemRealization::new(a, b, c, tol_rank)?;
    match obj.get("name") {
        None | Some(Value::Null) => {}
        Some(Value::String(s)) => sys = sys.with_name(s.clone()),
        Some(other) => return Err(Error::Parse(format!("{origin}: field \"name\" must be a string, found {other}"))),
    }
    Ok(sys)
}

pub fn load_system(path: &Path, tol_rank: f64) -> Result<SystemRealization> {
    parse_system(&read_text(path)?, &path.display().to_string(), tol_rank)
}

/// Writes a system document for `sys`.
pub fn system_to_json(sys: &SystemRealization) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        #[serde(skip_serializing_if = "Option::is_none")]
        name: Option<&'a str>,
        #[serde(rename = "A")]
        a: &'a RealMatrix,
        #[serde(rename = "B")]
        b: &'a RealMatrix,
        #[serde(rename = "C")]
        c: &'a RealMatrix,
    }
    to_json(&Doc {
        name: sys.name(),
        a: sys.a(),
        b: sys.b(),
        c: sys.c(),
    })
}

/// Reads a bare JSON matrix document such as `[[0.5, 0], [0, 0.4]]`.
pub fn load_matrix(path: &Path) -> Result<RealMatrix> {
    let origin = path.display().to_string();
    let v = parse_value(&read_text(path)?, &origin)?;
    matrix_from_value(&v, &origin)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    #[serde(rename = "L")]
    pub l: RealMatrix,
    #[serde(rename = "F")]
    pub f: RealMatrix,
    #[serde(rename = "K")]
    pub k: RealMatrix,
    #[serde(rename = "T")]
    pub t: RealMatrix,
    #[serde(rename = "X")]
    pub x: RealMatrix,
    #[serde(rename = "Phi")]
    pub phi: RealMatrix,
    #[serde(rename = "Lambda")]
    pub lambda: RealMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectra {
    #[serde(rename = "A")]
    pub a: Vec<Complex64>,
    pub closed_loop: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    pub augmented: Vec<Complex64>,
    pub assigned: Vec<Complex64>,
    pub inherited: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub integral_identity: f64,
    pub similarity: f64,
    pub similarity_scale: f64,
    pub pairing_distance: f64,
    pub spectral_radius: f64,
    pub schur_stable: bool,
    pub checks: Vec<CheckRecord>,
}

/// Configuration as actually used, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub target_poles: Vec<Complex64>,
    pub margin: f64,
    pub seed: u64,
    /// Which of `target_poles`, `Phi`, `Lambda` came from defaults.
    pub defaulted: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_name: Option<String>,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    /// Unstable unobservable eigenvalues when infeasible.
    pub witness: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<Gains>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectra: Option<Spectra>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Residuals>,
    pub tolerances: Tolerances,
    pub config: ConfigEcho,
}

fn defaulted(config: &DesignConfig) -> Vec<String> {
    let mut d = Vec::new();
    if config.target_poles.is_none() {
        d.push("target_poles".to_string());
    }
    if config.phi.is_none() {
        d.push("Phi".to_string());
    }
    if config.lambda.is_none() {
        d.push("Lambda".to_string());
    }
    d
}

impl DesignReport {
    pub fn feasible(observer: &PiObserver, config: &DesignConfig, verification: &VerificationReport) -> Result<Self> {
        let sys = &observer.system;
        Ok(DesignReport {
            verdict: Verdict::Feasible,
            system_name: sys.name().map(str::to_string),
            n: sys.n(),
            m: sys.m(),
            p: sys.p(),
            witness: Vec::new(),
            gains: Some(Gains {
                l: observer.l.clone(),
                f: observer.f.clone(),
                k: observer.k.clone(),
                t: observer.t.clone(),
                x: observer.x.clone(),
                phi: observer.phi.clone(),
                lambda: observer.lambda.clone(),
            }),
            spectra: Some(Spectra {
                a: eigenvalues(sys.a())?.sorted(),
                closed_loop: verification.closed_loop_spectrum.clone(),
                phi: verification.phi_spectrum.clone(),
                augmented: verification.augmented_spectrum.clone(),
                assigned: observer.assigned_poles.clone(),
                inherited: observer.inherited_poles.clone(),
            }),
            residuals: Some(residuals_of(verification)),
            tolerances: config.tolerances,
            config: ConfigEcho {
                target_poles: observer.assigned_poles.clone(),
                margin: config.margin,
                seed: config.seed,
                defaulted: defaulted(config),
            },
        })
    }

    pub fn infeasible(system: &SystemRealization, config: &DesignConfig, witness: Vec<Complex64>) -> Self {
        DesignReport {
            verdict: Verdict::Infeasible,
            system_name: system.name().map(str::to_string),
            n: system.n(),
            m: system.m(),
            p: system.p(),
            witness,
            gains: None,
            spectra: None,
            residuals: None,
            tolerances: config.tolerances,
            config: ConfigEcho {
                target_poles: config.target_poles.clone().unwrap_or_default(),
                margin: config.margin,
                seed: config.seed,
                defaulted: defaulted(config),
            },
        }
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, &path.display().to_string())
    }

    /// Rebuilds the observer described by this report on top of `system`.
    pub fn observer(&self, system: &SystemRealization) -> Result<PiObserver> {
        let gains = match (&self.verdict, &self.gains) {
            (Verdict::Feasible, Some(g)) => g,
            _ => return Err(Error::InvalidConfig("report does not contain a feasible design".into())),
        };
        let (n, p) = (system.n(), system.p());
        if (self.n, self.m, self.p) != (n, system.m(), p) {
            return Err(Error::dim(
                "report vs system",
                format!("n={n}, m={}, p={p}", system.m()),
                format!("n={}, m={}, p={}", self.n, self.m, self.p),
            ));
        }
        for (name, mat, shape) in [
            ("L", &gains.l, (n, p)),
            ("F", &gains.f, (n, p)),
            ("K", &gains.k, (n, p)),
            ("T", &gains.t, (n, n)),
            ("X", &gains.x, (n, p)),
            ("Phi", &gains.phi, (p, p)),
        ] {
            if mat.shape() != shape {
                return Err(Error::dim(
                    format!("report gain {name}"),
                    format!("{}x{}", shape.0, shape.1),
                    format!("{}x{}", mat.rows(), mat.cols()),
                ));
            }
        }
        let lambda = if gains.lambda.rows() == 0 {
            RealMatrix::zeros(0, p)
        } else {
            gains.lambda.clone()
        };
        let spectra = self.spectra.as_ref();
        Ok(PiObserver {
            system: system.clone(),
            l: gains.l.clone(),
            f: gains.f.clone(),
            k: gains.k.clone(),
            t: gains.t.clone(),
            x: gains.x.clone(),
            phi: gains.phi.clone(),
            lambda,
            assigned_poles: spectra.map(|s| s.assigned.clone()).unwrap_or_default(),
            inherited_poles: spectra.map(|s| s.inherited.clone()).unwrap_or_default(),
        })
    }
}

pub fn residuals_of(v: &VerificationReport) -> Residuals {
    Residuals {
        integral_identity: v.integral_identity_residual,
        similarity: v.similarity_residual,
        similarity_scale: v.similarity_scale,
        pairing_distance: v.pairing_distance,
        spectral_radius: v.spectral_radius,
        schur_stable: v.schur_stable,
        checks: v
            .checks
            .iter()
            .map(|c| CheckRecord {
                name: c.name.to_string(),
                passed: c.passed,
                value: c.value,
                threshold: c.threshold,
            })
            .collect(),
    }
}

/// CSV trace with columns `k, x1.., xhat1.., v1.., err_inf, v_inf` and a
/// trailing `#` summary line.
pub fn trace_to_csv(trace: &SimulationTrace) -> Result<String> {
    let csv_err = |e: csv::Error| Error::Parse(format!("trace encoding failed: {e}"));
    let (n, p) = trace.steps.first().map_or((0, 0), |s| (s.x.len(), s.v.len()));
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["k".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("xhat{i}")));
    header.extend((1..=p).map(|i| format!("v{i}")));
    header.extend(["err_inf".to_string(), "v_inf".to_string()]);
    w.write_record(&header).map_err(csv_err)?;
    for s in &trace.steps {
        let mut rec = vec![s.k.to_string()];
        rec.extend(
            s.x.iter()
                .chain(&s.xhat)
                .chain(&s.v)
                .chain([&s.err_inf, &s.v_inf])
                .map(|x| format!("{x:.16e}")),
        );
        w.write_record(&rec).map_err(csv_err)?;
    }
    let mut out = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
        .expect("csv output is UTF-8");
    let conv = trace.converged_at.map_or("none".to_string(), |k| k.to_string());
    let rate = fitted_decay_rate(trace, 1e-13).map_or("none".to_string(), |r| format!("{r:.16e}"));
    out.push_str(&format!(
        "# converged_at={conv} stays_converged={} convergence_tol={:.16e} fitted_decay_rate={rate}\n",
        trace.stays_converged, trace.convergence_tol
    ));
    Ok(out)
}

/// Reads one named numeric column of a CSV trace.
pub fn trace_column(text: &str, name: &str) -> Result<Vec<f64>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let col = r
        .headers()
        .map_err(|e| Error::Parse(format!("trace header: {e}")))?
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Parse(format!("trace has no {name} column")))?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            rec.ok()
                .and_then(|rec| rec.get(col).and_then(|x| x.parse().ok()))
                .ok_or_else(|| Error::Parse(format!("trace record {}: bad {name} entry", i + 1)))
        })
        .collect()
}
