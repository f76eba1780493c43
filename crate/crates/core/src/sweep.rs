//! Parameter sweeps over `(t, zeta, omega, |q|)` grids with CSV/JSON output.

use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dispersion::POLE_GUARD;
use crate::error::{Error, Result};
use crate::response::ElectronGas;
use crate::scalar::{select_regime, Regime, RegimeChoice};
use crate::state::{Kinematics, ThermoState, DEFAULT_TOL, E2_DEFAULT};

/// Environment variable that replaces the default tolerance.
pub const TOL_ENV: &str = "RELPLASMA_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::domain(format!("unknown output format '{other}'"))),
        }
    }
}

/// Parse `0.5`, `0.1,0.2,0.4` or `lo:hi:n` (inclusive, `n` points).
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let num = |v: &str| -> Result<f64> {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::domain(format!("not a number: '{v}'")))
    };
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::domain(format!("range must be lo:hi:n, got '{s}'")));
        }
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("bad point count in '{s}'")))?;
        match n {
            0 => return Err(Error::domain(format!("empty range '{s}'"))),
            1 => vec![lo],
            _ => (0..n)
                .map(|i| {
                    if i + 1 == n {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!(
            "grid '{s}' must be nonempty and finite"
        )));
    }
    Ok(values)
}

/// A grid as written in a config file: a number, a list, or a grid string.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridInput {
    Scalar(f64),
    List(Vec<f64>),
    Text(String),
}

impl GridInput {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridInput::Scalar(v) => parse_grid(&v.to_string()),
            GridInput::List(v) if !v.is_empty() => Ok(v.clone()),
            GridInput::List(_) => Err(Error::domain("empty grid list")),
            GridInput::Text(s) => parse_grid(s),
        }
    }
}

/// Sweep settings from one source; unset fields fall through to the next.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOverrides {
    pub t: Option<GridInput>,
    pub zeta: Option<GridInput>,
    pub omega: Option<GridInput>,
    #[serde(alias = "qmag")]
    pub q: Option<GridInput>,
    pub regime: Option<String>,
    pub tol: Option<f64>,
    pub e2: Option<f64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

impl SweepOverrides {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::domain(format!("config: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub t: Vec<f64>,
    pub zeta: Vec<f64>,
    pub omega: Vec<f64>,
    pub qmag: Vec<f64>,
    pub regime: RegimeChoice,
    pub tol: f64,
    pub e2: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            t: vec![0.0],
            zeta: vec![2.0],
            omega: vec![0.1],
            qmag: vec![0.05],
            regime: RegimeChoice::Auto,
            tol: DEFAULT_TOL,
            e2: E2_DEFAULT,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

impl SweepSpec {
    /// Merge sources with precedence `cli > config > $RELPLASMA_TOL > defaults`.
    pub fn resolve(
        cli: &SweepOverrides,
        config: Option<&SweepOverrides>,
        env_tol: Option<&str>,
    ) -> Result<Self> {
        let mut spec = SweepSpec::default();
        if let Some(v) = env_tol {
            spec.tol = v
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("{TOL_ENV}='{v}' is not a number")))?;
        }
        for layer in config.into_iter().chain(std::iter::once(cli)) {
            if let Some(g) = &layer.t {
                spec.t = g.values()?;
            }
            if let Some(g) = &layer.zeta {
                spec.zeta = g.values()?;
            }
            if let Some(g) = &layer.omega {
                spec.omega = g.values()?;
            }
            if let Some(g) = &layer.q {
                spec.qmag = g.values()?;
            }
            if let Some(r) = &layer.regime {
                spec.regime = r.parse()?;
            }
            if let Some(v) = layer.tol {
                spec.tol = v;
            }
            if let Some(v) = layer.e2 {
                spec.e2 = v;
            }
            if let Some(f) = &layer.format {
                spec.format = f.parse()?;
            }
            if let Some(p) = &layer.out {
                spec.out = Some(p.clone());
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::domain(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        for (name, g) in [
            ("t", &self.t),
            ("zeta", &self.zeta),
            ("omega", &self.omega),
            ("q", &self.qmag),
        ] {
            if g.is_empty() {
                return Err(Error::domain(format!("grid {name} is empty")));
            }
            if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::domain(format!(
                    "grid {name} must hold finite values >= 0"
                )));
            }
        }
        for &t in &self.t {
            for &z in &self.zeta {
                ThermoState::with_coupling(t, z, self.e2)?;
            }
        }
        for &w in &self.omega {
            for &q in &self.qmag {
                if w * w - q * q >= 4.0 {
                    return Err(Error::domain(format!(
                        "(omega, q) = ({w}, {q}) is above the pair threshold q_M^2 = 4"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.t.len() * self.zeta.len() * self.omega.len() * self.qmag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in output order: `t` outermost, `|q|` innermost.
    pub fn points(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &t in &self.t {
            for &z in &self.zeta {
                for &w in &self.omega {
                    for &q in &self.qmag {
                        out.push((t, z, w, q));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flag {
    LightConeSkipped,
    PoleNearby,
    NonConverged,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::LightConeSkipped => "LightConeSkipped",
            Flag::PoleNearby => "PoleNearby",
            Flag::NonConverged => "NonConverged",
        })
    }
}

impl FromStr for Flag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "LightConeSkipped" => Ok(Flag::LightConeSkipped),
            "PoleNearby" => Ok(Flag::PoleNearby),
            "NonConverged" => Ok(Flag::NonConverged),
            other => Err(Error::domain(format!("unknown flag '{other}'"))),
        }
    }
}

fn join_flags<S: Serializer>(flags: &[Flag], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(
        &flags
            .iter()
            .map(Flag::to_string)
            .collect::<Vec<_>>()
            .join(";"),
    )
}

fn split_flags<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Flag>, D::Error> {
    let text = String::deserialize(d)?;
    parse_flags(&text).map_err(serde::de::Error::custom)
}

fn parse_flags(text: &str) -> Result<Vec<Flag>> {
    text.split(';')
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// One evaluated grid point. Value fields are `None` when the point could
/// not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRecord {
    pub t: f64,
    pub zeta: f64,
    pub omega: f64,
    pub qmag: f64,
    pub a_star: Option<f64>,
    pub b_star: Option<f64>,
    pub c_star: Option<f64>,
    pub eps: Option<f64>,
    pub mu_inv: Option<f64>,
    pub eps_prime: Option<f64>,
    pub tau: Option<f64>,
    pub chi_e: Option<f64>,
    pub chi_m: Option<f64>,
    pub regime: Regime,
    pub err_est: Option<f64>,
    #[serde(serialize_with = "join_flags", deserialize_with = "split_flags")]
    pub flags: Vec<Flag>,
}

pub const CSV_HEADER: [&str; 16] = [
    "t", "zeta", "omega", "qmag", "aStar", "bStar", "cStar", "eps", "muInv", "epsPrime", "tau",
    "chiE", "chiM", "regime", "errEst", "flags",
];

impl SweepRecord {
    fn blank(t: f64, zeta: f64, omega: f64, qmag: f64, regime: Regime, flag: Flag) -> Self {
        Self {
            t,
            zeta,
            omega,
            qmag,
            a_star: None,
            b_star: None,
            c_star: None,
            eps: None,
            mu_inv: None,
            eps_prime: None,
            tau: None,
            chi_e: None,
            chi_m: None,
            regime,
            err_est: None,
            flags: vec![flag],
        }
    }

    fn values(&self) -> [Option<f64>; 9] {
        [
            self.a_star,
            self.b_star,
            self.c_star,
            self.eps,
            self.mu_inv,
            self.eps_prime,
            self.tau,
            self.chi_e,
            self.chi_m,
        ]
    }
}

/// Evaluate one grid point.
pub fn evaluate_point(
    t: f64,
    zeta: f64,
    omega: f64,
    qmag: f64,
    spec: &SweepSpec,
) -> Result<SweepRecord> {
    let state = ThermoState::with_coupling(t, zeta, spec.e2)?;
    let kin = Kinematics::new(omega, qmag)?;
    let regime = match spec.regime {
        RegimeChoice::Auto => select_regime(&kin, &state),
        RegimeChoice::Fixed(r) => r,
    };
    if omega == 0.0 && qmag == 0.0 {
        return Ok(SweepRecord::blank(
            t,
            zeta,
            omega,
            qmag,
            regime,
            Flag::LightConeSkipped,
        ));
    }
    let gas = ElectronGas {
        state,
        regime: spec.regime,
        tol: spec.tol,
    };
    let ev = match gas.evaluate(&kin) {
        Ok(ev) => ev,
        Err(Error::LightConeSingular { .. }) => {
            return Ok(SweepRecord::blank(
                t,
                zeta,
                omega,
                qmag,
                regime,
                Flag::LightConeSkipped,
            ));
        }
        Err(Error::NonConvergence { .. }) => {
            return Ok(SweepRecord::blank(
                t,
                zeta,
                omega,
                qmag,
                regime,
                Flag::NonConverged,
            ));
        }
        Err(e) => return Err(e),
    };
    let r = ev.responses;
    let mut rec = SweepRecord {
        t,
        zeta,
        omega,
        qmag,
        a_star: Some(ev.scalars.a_star),
        b_star: Some(ev.scalars.b_star),
        c_star: Some(ev.scalars.c_star),
        eps: Some(r.eps),
        mu_inv: Some(r.mu_inv),
        eps_prime: Some(r.eps_prime),
        tau: Some(r.tau),
        chi_e: Some(ev.chi.chi_e),
        chi_m: Some(ev.chi.chi_m),
        regime,
        err_est: Some(ev.scalars.err_est),
        flags: Vec::new(),
    };
    if rec.values().iter().any(|v| !v.is_some_and(f64::is_finite)) {
        return Ok(SweepRecord::blank(
            t,
            zeta,
            omega,
            qmag,
            regime,
            Flag::NonConverged,
        ));
    }
    if r.mu_inv.abs() < POLE_GUARD {
        rec.flags.push(Flag::PoleNearby);
    }
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
}

impl SweepOutcome {
    pub fn any_nonconverged(&self) -> bool {
        self.records
            .iter()
            .any(|r| r.flags.contains(&Flag::NonConverged))
    }
}

/// Evaluate every grid point; points run in parallel, output keeps grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let records = spec
        .points()
        .par_iter()
        .map(|&(t, z, w, q)| evaluate_point(t, z, w, q, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepOutcome { records })
}

/// 17 significant digits, enough to reproduce every `f64` exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        let mut row = vec![
            format_float(r.t),
            format_float(r.zeta),
            format_float(r.omega),
            format_float(r.qmag),
        ];
        row.extend(r.values().iter().map(|v| opt(*v)));
        row.push(r.regime.to_string());
        row.push(opt(r.err_est));
        row.push(
            r.flags
                .iter()
                .map(Flag::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        );
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let io = |e: csv::Error| Error::Io(e.to_string());
    let header = rd.headers().map_err(io)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::domain("unexpected CSV header"));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::domain(format!("bad number '{s}'")))
    };
    let opt_num = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            num(s).map(Some)
        }
    };
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(io)?;
        let f = |i: usize| row.get(i).unwrap_or("");
        let regime = match f(13) {
            "full" => Regime::FullKinematics,
            "longwave" => Regime::LongWavelength,
            "stationary" => Regime::Stationary,
            "vacuum" => Regime::Vacuum,
            other => return Err(Error::domain(format!("unknown regime '{other}'"))),
        };
        out.push(SweepRecord {
            t: num(f(0))?,
            zeta: num(f(1))?,
            omega: num(f(2))?,
            qmag: num(f(3))?,
            a_star: opt_num(f(4))?,
            b_star: opt_num(f(5))?,
            c_star: opt_num(f(6))?,
            eps: opt_num(f(7))?,
            mu_inv: opt_num(f(8))?,
            eps_prime: opt_num(f(9))?,
            tau: opt_num(f(10))?,
            chi_e: opt_num(f(11))?,
            chi_m: opt_num(f(12))?,
            regime,
            err_est: opt_num(f(14))?,
            flags: parse_flags(f(15))?,
        });
    }
    Ok(out)
}

pub fn write_json<W: Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Records rendered in the requested format.
pub fn render(records: &[SweepRecord], format: OutputFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => write_csv(records, &mut buf)?,
        OutputFormat::Json => write_json(records, &mut buf)?,
    }
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_grid("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(
            parse_grid("0:1:5").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_grid("2:3:1").unwrap(), vec![2.0]);
        for bad in ["", "a", "0:1", "0:1:0", "1,,2", "nan"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn precedence() {
        let cli = SweepOverrides {
            tol: Some(1e-7),
            ..Default::default()
        };
        let cfg = SweepOverrides::from_json(r#"{"tol": 1e-5, "zeta": "1.5,2", "q": [0.1, 0.2]}"#)
            .unwrap();
        let s = SweepSpec::resolve(&cli, Some(&cfg), Some("1e-3")).unwrap();
        assert_eq!(s.tol, 1e-7);
        assert_eq!(s.zeta, vec![1.5, 2.0]);
        assert_eq!(s.qmag, vec![0.1, 0.2]);
        let s = SweepSpec::resolve(&SweepOverrides::default(), Some(&cfg), Some("1e-3")).unwrap();
        assert_eq!(s.tol, 1e-5);
        let s = SweepSpec::resolve(&SweepOverrides::default(), None, Some("1e-3")).unwrap();
        assert_eq!(s.tol, 1e-3);
        let s = SweepSpec::resolve(&SweepOverrides::default(), None, None).unwrap();
        assert_eq!(s.tol, DEFAULT_TOL);
    }

    #[test]
    fn rejects_bad_specs() {
        let over =
            |json: &str| SweepSpec::resolve(&SweepOverrides::from_json(json).unwrap(), None, None);
        assert!(over(r#"{"tol": 0}"#).is_err());
        assert!(over(r#"{"omega": 2.5, "q": 0}"#).is_err());
        assert!(over(r#"{"zeta": -1}"#).is_err());
        assert!(over(r#"{"regime": "sideways"}"#).is_err());
        assert!(SweepOverrides::from_json(r#"{"colour": 1}"#).is_err());
        assert!(SweepSpec::resolve(&SweepOverrides::default(), None, Some("fast")).is_err());
    }

    #[test]
    fn vacuum_point() {
        let spec = SweepSpec {
            zeta: vec![1.0],
            omega: vec![0.3],
            qmag: vec![0.1],
            ..Default::default()
        };
        let out = run_sweep(&spec).unwrap();
        let r = &out.records[0];
        assert_eq!(r.regime, Regime::Vacuum);
        assert_eq!(r.chi_e, Some(0.0));
        let c = crate::scalar::vacuum_c(0.08, E2_DEFAULT).unwrap();
        let expected = 1.0 + 2.0 * c - 0.09 * c / 0.08;
        assert!((r.eps.unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn stationary_grid_has_constant_chi_m() {
        let spec = SweepSpec {
            omega: vec![0.0],
            qmag: parse_grid("1e-4:1e-3:4").unwrap(),
            ..Default::default()
        };
        let out = run_sweep(&spec).unwrap();
        let expected = E2_DEFAULT / (6.0 * std::f64::consts::PI.powi(2)) * 2.0f64.acosh();
        for r in &out.records {
            assert!((r.chi_m.unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn light_cone_point_is_flagged() {
        let spec = SweepSpec {
            omega: vec![0.5],
            qmag: vec![0.5, 0.4],
            ..Default::default()
        };
        let out = run_sweep(&spec).unwrap();
        assert_eq!(out.records[0].flags, vec![Flag::LightConeSkipped]);
        assert!(out.records[0].eps.is_none());
        assert!(out.records[1].flags.is_empty());
        assert!(!out.any_nonconverged());
        let text = String::from_utf8(render(&out.records, OutputFormat::Csv).unwrap()).unwrap();
        let first = text.lines().nth(1).unwrap();
        assert!(first.ends_with(",full,,LightConeSkipped"), "{first}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let spec = SweepSpec {
            t: vec![0.0, 0.05],
            omega: vec![0.0, 0.1, 0.5],
            qmag: vec![1e-4, 0.5],
            ..Default::default()
        };
        let out = run_sweep(&spec).unwrap();
        let bytes = render(&out.records, OutputFormat::Csv).unwrap();
        let back = read_csv(bytes.as_slice()).unwrap();
        assert_eq!(back.len(), out.records.len());
        for (a, b) in back.iter().zip(&out.records) {
            assert_eq!(a, b);
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(x.map(f64::to_bits), y.map(f64::to_bits));
            }
        }
    }

    #[test]
    fn json_is_flat_array() {
        let out = run_sweep(&SweepSpec {
            omega: vec![0.5],
            qmag: vec![0.5],
            ..Default::default()
        })
        .unwrap();
        let text = String::from_utf8(render(&out.records, OutputFormat::Json).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let row = &v[0];
        assert_eq!(row["flags"], "LightConeSkipped");
        assert!(row["eps"].is_null());
        assert_eq!(row["regime"], "full");
        assert!(row
            .as_object()
            .unwrap()
            .values()
            .all(|x| !x.is_object() && !x.is_array()));
    }
}
