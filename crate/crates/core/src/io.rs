//! Text formats for profiles, radial graphs and disk graphs.
//!
//! Each file starts with a `# pmc <kind> key=value ...` metadata line whose
//! last field is `prescription=<json>`. Numbers are written in scientific
//! notation with 17 significant digits unless trimmed with [`NumberFormat`],
//! so that reading a file back reproduces the samples bit for bit.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graphs::{DiskGraph, RadialGraph};
use crate::prescribed::PrescribedFunction;
use crate::rotational::{Closure, ProfileCurve, ProfileState};
use crate::spaceform::Kappa;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NumberFormat {
    pub digits: usize,
}

impl Default for NumberFormat {
    fn default() -> Self {
        Self { digits: 17 }
    }
}

impl NumberFormat {
    pub fn new(digits: usize) -> Result<Self> {
        if !(1..=17).contains(&digits) {
            return Err(Error::Usage(format!("digits must be in 1..=17, got {digits}")));
        }
        Ok(Self { digits })
    }

    pub fn fmt(&self, v: f64) -> String {
        format!("{:.*e}", self.digits - 1, v)
    }
}

/// Kind of file, recognised from its metadata line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Profile,
    Radial,
    Disk,
}

pub fn detect_kind(text: &str) -> Result<FileKind> {
    let first = text.lines().next().unwrap_or_default();
    match first.split_whitespace().nth(2) {
        Some("profile") if first.starts_with("# pmc ") => Ok(FileKind::Profile),
        Some("radial") if first.starts_with("# pmc ") => Ok(FileKind::Radial),
        Some("disk") if first.starts_with("# pmc ") => Ok(FileKind::Disk),
        _ => Err(Error::Parse("unrecognised file: expected a '# pmc <kind>' header".into())),
    }
}

struct Meta {
    fields: HashMap<String, String>,
    prescription: PrescribedFunction,
}

impl Meta {
    fn get(&self, key: &str) -> Result<&str> {
        self.fields.get(key).map(String::as_str).ok_or_else(|| Error::Parse(format!("missing metadata '{key}'")))
    }

    fn number(&self, key: &str) -> Result<f64> {
        parse_f64(self.get(key)?)
    }

    fn kappa(&self) -> Result<Kappa> {
        self.get("kappa")?.parse()
    }
}

fn meta_line(kind: &str, fields: &[(&str, String)], h: &PrescribedFunction) -> String {
    let mut line = format!("# pmc {kind}");
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    line.push_str(&format!(" prescription={}\n", h.to_json()));
    line
}

fn parse_meta(line: &str, kind: &str) -> Result<Meta> {
    let prefix = format!("# pmc {kind}");
    let rest = line
        .strip_prefix(&prefix)
        .ok_or_else(|| Error::Parse(format!("expected '{prefix}' header")))?;
    let (head, json) = rest
        .split_once(" prescription=")
        .ok_or_else(|| Error::Parse("header lacks prescription".into()))?;
    let mut fields = HashMap::new();
    for tok in head.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field '{tok}'")))?;
        fields.insert(k.to_string(), v.to_string());
    }
    Ok(Meta { fields, prescription: PrescribedFunction::parse(json.trim())? })
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")))
}

fn parse_rows<const N: usize>(lines: std::str::Lines<'_>, header: &str) -> Result<Vec<[f64; N]>> {
    let mut lines = lines;
    match lines.next() {
        Some(h) if h.trim() == header => {}
        _ => return Err(Error::Parse(format!("expected column header '{header}'"))),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            if cells.len() != N {
                return Err(Error::Parse(format!("expected {N} columns in '{l}'")));
            }
            let mut row = [0.0; N];
            for (slot, cell) in row.iter_mut().zip(cells) {
                *slot = parse_f64(cell)?;
            }
            Ok(row)
        })
        .collect()
}

pub fn write_profile_csv(curve: &ProfileCurve, fmt: NumberFormat) -> String {
    let mut fields = vec![
        ("kappa", curve.kappa.to_string()),
        ("step", fmt.fmt(curve.step)),
        ("closure", curve.closure.as_str().to_string()),
    ];
    if let Some(d) = curve.closure_defect {
        fields.push(("defect", fmt.fmt(d)));
    }
    let mut out = meta_line("profile", &fields, &curve.prescription);
    out.push_str("s,x,z,sigma,nu\n");
    for p in &curve.samples {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt.fmt(p.s),
            fmt.fmt(p.x),
            fmt.fmt(p.z),
            fmt.fmt(p.sigma),
            fmt.fmt(p.nu())
        ));
    }
    out
}

pub fn read_profile_csv(text: &str) -> Result<ProfileCurve> {
    let mut lines = text.lines();
    let meta = parse_meta(lines.next().unwrap_or_default(), "profile")?;
    let rows = parse_rows::<5>(lines, "s,x,z,sigma,nu")?;
    let samples = rows.iter().map(|r| ProfileState::new(r[0], r[1], r[2], r[3])).collect();
    Ok(ProfileCurve {
        samples,
        kappa: meta.kappa()?,
        closure: meta.get("closure")?.parse::<Closure>()?,
        step: meta.number("step")?,
        closure_defect: meta.fields.get("defect").map(|v| parse_f64(v)).transpose()?,
        prescription: meta.prescription,
    })
}

pub fn write_radial_csv(graph: &RadialGraph, kappa: Kappa, h: &PrescribedFunction, fmt: NumberFormat) -> String {
    let fields = [("kappa", kappa.to_string()), ("R", fmt.fmt(graph.radius))];
    let mut out = meta_line("radial", &fields, h);
    out.push_str("r,u,phi,nu\n");
    for i in 0..graph.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt.fmt(graph.r[i]),
            fmt.fmt(graph.u[i]),
            fmt.fmt(graph.phi[i]),
            fmt.fmt(graph.nu[i])
        ));
    }
    out
}

/// Reads a radial graph CSV; returns the graph with its curvature sign and prescription.
pub fn read_radial_csv(text: &str) -> Result<(RadialGraph, Kappa, PrescribedFunction)> {
    let mut lines = text.lines();
    let meta = parse_meta(lines.next().unwrap_or_default(), "radial")?;
    let kappa = meta.kappa()?;
    let rows = parse_rows::<4>(lines, "r,u,phi,nu")?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    let graph = RadialGraph::from_parts(kappa, col(0), col(1), col(2), col(3))?;
    Ok((graph, kappa, meta.prescription))
}

pub fn write_disk_text(graph: &DiskGraph, h: &PrescribedFunction, fmt: NumberFormat) -> String {
    let fields = [
        ("kappa", graph.kappa.to_string()),
        ("R", fmt.fmt(graph.radius)),
        ("nr", graph.nr.to_string()),
        ("ntheta", graph.ntheta.to_string()),
        ("iterations", graph.iterations.to_string()),
        ("residual", fmt.fmt(graph.residual)),
    ];
    let mut out = meta_line("disk", &fields, h);
    let pairs: Vec<String> = graph
        .boundary
        .iter()
        .enumerate()
        .map(|(j, v)| format!("[{},{}]", fmt.fmt(j as f64 * graph.dtheta()), fmt.fmt(*v)))
        .collect();
    out.push_str(&format!("boundary [{}]\n", pairs.join(",")));
    for i in 0..=graph.nr {
        let row: Vec<String> = (0..graph.ntheta).map(|j| fmt.fmt(graph.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_disk_text(text: &str) -> Result<(DiskGraph, PrescribedFunction)> {
    let mut lines = text.lines();
    let meta = parse_meta(lines.next().unwrap_or_default(), "disk")?;
    let nr: usize = meta.get("nr")?.parse().map_err(|_| Error::Parse("bad nr".into()))?;
    let ntheta: usize = meta.get("ntheta")?.parse().map_err(|_| Error::Parse("bad ntheta".into()))?;
    let iterations: usize = meta.get("iterations")?.parse().map_err(|_| Error::Parse("bad iterations".into()))?;
    let boundary_line = lines.next().unwrap_or_default();
    let json = boundary_line
        .strip_prefix("boundary ")
        .ok_or_else(|| Error::Parse("expected boundary line".into()))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(json).map_err(|e| Error::Parse(format!("boundary: {e}")))?;
    let mut u = Vec::with_capacity((nr + 1) * ntheta);
    for line in lines.filter(|l| !l.trim().is_empty()) {
        for tok in line.split_whitespace() {
            u.push(parse_f64(tok)?);
        }
    }
    if u.len() != (nr + 1) * ntheta || pairs.len() != ntheta {
        return Err(Error::Parse("disk graph size does not match header".into()));
    }
    let graph = DiskGraph {
        kappa: meta.kappa()?,
        radius: meta.number("R")?,
        nr,
        ntheta,
        u,
        boundary: pairs.iter().map(|p| p[1]).collect(),
        iterations,
        residual: meta.number("residual")?,
        residual_history: Vec::new(),
        vertical_warning: false,
    };
    Ok((graph, meta.prescription))
}
