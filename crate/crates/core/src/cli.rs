//! The `pmc` command line.
//!
//! Every command prints a JSON summary on stdout and writes data files only
//! when asked to. Failures print one line `error: <kind>: <detail>` on stderr
//! and exit with the code of their [`ErrorClass`](crate::ErrorClass).

use std::ffi::OsString;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimates::{confinement_quantities, probe_vertical_heights_with_step, DEFAULT_PROBE_STEP};
use crate::graphs::{boundary_from_pairs, residual_disk, residual_radial, solve_radial, DiskSolver, ResidualReport};
use crate::io::{self, FileKind, NumberFormat};
use crate::mesh::{self, TriMesh, DEFAULT_MAX_RINGS};
use crate::prescribed::PrescribedFunction;
use crate::rotational::{build_sphere, cmc_sphere_diameter_with_step, cylinder_radius, phase_plane, PhaseWindow};
use crate::spaceform::{Chart, Kappa};

const COMMANDS: [&str; 8] =
    ["sphere", "cylinder", "phase-plane", "solve-radial", "solve-disk", "verify", "heights", "diameter"];

#[derive(Debug, Parser)]
#[command(name = "pmc", version, about = "Prescribed mean curvature surfaces in M2(kappa) x R", args_override_self = true)]
struct Cli {
    /// Significant digits in written numbers (1 to 17).
    #[arg(long, global = true, default_value_t = 17)]
    digits: usize,

    /// JSON object whose keys mirror the flags; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Problem {
    /// Sign of the base curvature, -1 or +1.
    #[arg(long, allow_hyphen_values = true)]
    kappa: Kappa,

    /// Prescription as a JSON descriptor.
    #[arg(long = "H", value_name = "JSON")]
    h: String,
}

#[derive(Debug, Args)]
struct MeshArgs {
    /// Write a triangle mesh (OBJ) to this path.
    #[arg(long)]
    mesh: Option<PathBuf>,

    #[arg(long, default_value = "quadric")]
    chart: Chart,

    /// Angular segments of the mesh or polar grid.
    #[arg(long, default_value_t = 64)]
    ntheta: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shoot the rotational H-sphere from the pole.
    Sphere {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        /// Profile CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Radius of the vertical H-cylinder.
    Cylinder {
        #[command(flatten)]
        problem: Problem,
    },
    /// Equilibria and orbits of the profile system on a window.
    PhasePlane {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, allow_hyphen_values = true)]
        x_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x_max: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        sigma_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = PI)]
        sigma_max: f64,
        #[arg(long, default_value_t = 16)]
        seeds: usize,
        /// Report JSON output (stdout gets the summary only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radial Dirichlet problem with zero boundary values.
    SolveRadial {
        #[command(flatten)]
        problem: Problem,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Dirichlet problem on a geodesic disk with boundary data g(theta).
    SolveDisk {
        #[command(flatten)]
        problem: Problem,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long, default_value_t = 64)]
        nr: usize,
        /// Boundary data as JSON [[theta, value], ...]; zero when absent.
        #[arg(long)]
        boundary: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = crate::graphs::DEFAULT_DAMPING)]
        damping: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Residual of a profile, radial graph or disk graph file.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Overrides the curvature sign recorded in the file.
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<Kappa>,
        /// Overrides the prescription recorded in the file.
        #[arg(long = "H", value_name = "JSON")]
        h: Option<String>,
        #[arg(long, default_value_t = 1e-5)]
        threshold: f64,
    },
    /// Depths of zero-boundary radial caps over a range of radii.
    Heights {
        #[command(flatten)]
        problem: Problem,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_PROBE_STEP)]
        step: f64,
        /// Radius/height CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diameter of the constant-H0 sphere, and confinement quantities given H.
    Diameter {
        #[arg(long, allow_hyphen_values = true)]
        kappa: Kappa,
        #[arg(long = "H0", allow_hyphen_values = true)]
        h0: f64,
        #[arg(long = "H", value_name = "JSON")]
        h: Option<String>,
        /// Radii of a vertical height probe for the cylinder bound.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        #[arg(long, default_value_t = crate::rotational::DIAMETER_STEP)]
        step: f64,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let outcome = expand_config(args).and_then(|args| match Cli::try_parse_from(args) {
        Ok(cli) => Ok(Some(cli)),
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            Ok(None)
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            Err(Error::Usage(line.to_string()))
        }
    });
    let result = outcome.and_then(|cli| match cli {
        Some(cli) => execute(cli, stdout),
        None => Ok(()),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.class().exit_code()
        }
    }
}

/// Splices `--config` keys into the argument list right after the
/// subcommand, ahead of explicit flags so those win.
fn expand_config(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut k = 1;
    while k < args.len() {
        let a = args[k].to_string_lossy().into_owned();
        if a == "--config" && k + 1 < args.len() {
            path = Some(PathBuf::from(args[k + 1].clone()));
            args.drain(k..k + 2);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
            args.remove(k);
        } else {
            k += 1;
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path)?;
    let Value::Object(map) = serde_json::from_str::<Value>(&text).map_err(|e| Error::Parse(format!("config: {e}")))?
    else {
        return Err(Error::Parse("config must be a JSON object".into()));
    };
    let mut extra: Vec<OsString> = Vec::new();
    let mut command = None;
    for (key, value) in map {
        if key == "command" {
            command = value.as_str().map(str::to_string);
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => extra.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => extra.extend([flag.into(), s.into()]),
            Value::Number(n) => extra.push(format!("{flag}={n}").into()),
            Value::Array(items) if key == "radii" => {
                let list: Vec<String> = items.iter().map(|v| v.to_string()).collect();
                extra.push(format!("{flag}={}", list.join(",")).into());
            }
            other => extra.extend([flag.into(), other.to_string().into()]),
        }
    }
    let position = args.iter().position(|a| COMMANDS.contains(&a.to_string_lossy().as_ref()));
    let at = match (position, command) {
        (Some(p), _) => p + 1,
        (None, Some(cmd)) => {
            args.insert(1, cmd.into());
            2
        }
        (None, None) => return Err(Error::Usage("config gives no command and none was named".into())),
    };
    args.splice(at..at, extra);
    Ok(args)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn count(name: &str, v: usize) -> Result<usize> {
    if v > 0 {
        Ok(v)
    } else {
        Err(Error::Usage(format!("--{name} must be positive")))
    }
}

/// Rounds every number in a JSON value to `digits` significant digits.
fn round_json(v: &mut Value, fmt: NumberFormat) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            if let Some(r) = fmt.fmt(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_json(x, fmt)),
        Value::Object(map) => map.values_mut().for_each(|x| round_json(x, fmt)),
        _ => {}
    }
}

fn print_json(stdout: &mut dyn Write, value: impl Serialize, fmt: NumberFormat) -> Result<()> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Usage(format!("serialize: {e}")))?;
    round_json(&mut v, fmt);
    writeln!(stdout, "{}", serde_json::to_string_pretty(&v).unwrap_or_default())?;
    Ok(())
}

fn write_mesh(m: &TriMesh, kappa: Kappa, args: &MeshArgs, fmt: NumberFormat) -> Result<Vec<PathBuf>> {
    let Some(path) = &args.mesh else { return Ok(Vec::new()) };
    let mut written = Vec::new();
    for (suffix, text) in m.to_obj(kappa, args.chart, fmt)? {
        let p = with_suffix(path, suffix);
        std::fs::write(&p, text)?;
        written.push(p);
    }
    Ok(written)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "obj".into());
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn parse_h(text: &str) -> Result<PrescribedFunction> {
    PrescribedFunction::parse(text)
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let fmt = NumberFormat::new(cli.digits)?;
    match cli.command {
        Command::Sphere { problem, step, out, mesh } => {
            let h = parse_h(&problem.h)?;
            let curve = build_sphere(&h, problem.kappa, positive("step", step)?)?;
            if let Some(path) = &out {
                std::fs::write(path, io::write_profile_csv(&curve, fmt))?;
            }
            let meshes = write_mesh(
                &mesh::revolve_profile(&curve, count("ntheta", mesh.ntheta)?, DEFAULT_MAX_RINGS),
                problem.kappa,
                &mesh,
                fmt,
            )?;
            print_json(
                stdout,
                json!({
                    "closure": curve.closure.as_str(),
                    "closure_defect": curve.closure_defect,
                    "equator_radius": curve.equator_radius(),
                    "height": curve.height(),
                    "samples": curve.samples.len(),
                    "step": curve.step,
                    "meshes": meshes,
                }),
                fmt,
            )
        }
        Command::Cylinder { problem } => {
            let h = parse_h(&problem.h)?;
            let rho = cylinder_radius(&h, problem.kappa)?;
            print_json(stdout, json!({ "kappa": problem.kappa, "H0": h.eval(0.0), "radius": rho }), fmt)
        }
        Command::PhasePlane { problem, x_min, x_max, sigma_min, sigma_max, seeds, out } => {
            let h = parse_h(&problem.h)?;
            let bound = problem.kappa.chart_bound();
            let window = PhaseWindow {
                x: (x_min.unwrap_or(0.05), x_max.unwrap_or(if bound.is_finite() { bound - 0.05 } else { 3.0 })),
                sigma: (sigma_min, sigma_max),
            };
            let report = phase_plane(&h, problem.kappa, window, seeds)?;
            if let Some(path) = &out {
                let mut v = serde_json::to_value(&report).map_err(|e| Error::Usage(e.to_string()))?;
                round_json(&mut v, fmt);
                std::fs::write(path, serde_json::to_string(&v).unwrap_or_default())?;
            }
            print_json(
                stdout,
                json!({
                    "window": report.window,
                    "equilibria": report.equilibria,
                    "cylinder_radius": report.cylinder_radius,
                    "orbits": report.orbits.len(),
                }),
                fmt,
            )
        }
        Command::SolveRadial { problem, radius, step, out, mesh } => {
            let h = parse_h(&problem.h)?;
            let kappa = problem.kappa;
            let graph = solve_radial(&h, kappa, positive("R", radius)?, positive("step", step)?)?;
            if let Some(path) = &out {
                std::fs::write(path, io::write_radial_csv(&graph, kappa, &h, fmt))?;
            }
            let meshes = write_mesh(
                &mesh::revolve_radial(&graph, count("ntheta", mesh.ntheta)?, DEFAULT_MAX_RINGS),
                kappa,
                &mesh,
                fmt,
            )?;
            let res = residual_radial(&graph, &h, kappa);
            print_json(
                stdout,
                json!({
                    "R": graph.radius,
                    "depth": graph.depth(),
                    "samples": graph.len(),
                    "max_residual": res.max_residual,
                    "meshes": meshes,
                }),
                fmt,
            )
        }
        Command::SolveDisk { problem, radius, nr, boundary, tol, max_iter, damping, out, mesh } => {
            let h = parse_h(&problem.h)?;
            let kappa = problem.kappa;
            let nt = count("ntheta", mesh.ntheta)?;
            let g = match boundary {
                Some(text) => {
                    let pairs: Vec<[f64; 2]> =
                        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("boundary: {e}")))?;
                    boundary_from_pairs(&pairs, nt)?
                }
                None => vec![0.0; nt],
            };
            let solver = DiskSolver {
                tol: positive("tol", tol)?,
                max_iter,
                damping: positive("damping", damping)?,
                ..DiskSolver::new(count("nr", nr)?, nt)
            };
            let graph = solver.solve(&h, kappa, positive("R", radius)?, &g)?;
            if let Some(path) = &out {
                std::fs::write(path, io::write_disk_text(&graph, &h, fmt))?;
            }
            let meshes = write_mesh(&mesh::disk_mesh(&graph), kappa, &mesh, fmt)?;
            print_json(
                stdout,
                json!({
                    "R": graph.radius,
                    "nr": graph.nr,
                    "ntheta": graph.ntheta,
                    "iterations": graph.iterations,
                    "residual": graph.residual,
                    "vertical_warning": graph.vertical_warning,
                    "meshes": meshes,
                }),
                fmt,
            )
        }
        Command::Verify { input, kappa, h, threshold } => {
            let threshold = positive("threshold", threshold)?;
            let text = std::fs::read_to_string(&input)?;
            let over = h.as_deref().map(parse_h).transpose()?;
            let (kind, report): (&str, ResidualReport) = match io::detect_kind(&text)? {
                FileKind::Profile => {
                    let curve = io::read_profile_csv(&text)?;
                    let k = kappa.unwrap_or(curve.kappa);
                    let h = over.unwrap_or_else(|| curve.prescription.clone());
                    let cap = crate::rotational::ProfileCurve { kappa: k, ..curve }.lower_cap()?;
                    ("profile", residual_radial(&cap, &h, k))
                }
                FileKind::Radial => {
                    let (graph, k, h) = io::read_radial_csv(&text)?;
                    ("radial", residual_radial(&graph, &over.unwrap_or(h), kappa.unwrap_or(k)))
                }
                FileKind::Disk => {
                    let (graph, h) = io::read_disk_text(&text)?;
                    let k = kappa.unwrap_or(graph.kappa);
                    ("disk", residual_disk(&graph, &over.unwrap_or(h), k))
                }
            };
            print_json(stdout, json!({ "kind": kind, "threshold": threshold, "report": report }), fmt)?;
            if !(report.max_residual <= threshold) {
                return Err(Error::ResidualExceeded { max: report.max_residual, threshold });
            }
            Ok(())
        }
        Command::Heights { problem, radii, step, out } => {
            let h = parse_h(&problem.h)?;
            if radii.is_empty() {
                return Err(Error::Usage("--radii needs at least one radius".into()));
            }
            for r in &radii {
                positive("radii", *r)?;
            }
            let report = probe_vertical_heights_with_step(&h, problem.kappa, &radii, positive("step", step)?)?;
            if let Some(path) = &out {
                let mut csv = String::from("R,height\n");
                for (r, v) in report.radii.iter().zip(&report.heights) {
                    csv.push_str(&format!("{},{}\n", fmt.fmt(*r), fmt.fmt(*v)));
                }
                std::fs::write(path, csv)?;
            }
            print_json(stdout, &report, fmt)
        }
        Command::Diameter { kappa, h0, h, radii, step } => {
            let step = positive("step", step)?;
            match h {
                None => {
                    let d = cmc_sphere_diameter_with_step(h0, kappa, step)?;
                    print_json(stdout, json!({ "kappa": kappa, "H0": h0, "d": d }), fmt)
                }
                Some(text) => {
                    let h = parse_h(&text)?;
                    let probe = if radii.is_empty() {
                        None
                    } else {
                        Some(probe_vertical_heights_with_step(&h, kappa, &radii, DEFAULT_PROBE_STEP)?)
                    };
                    let report = confinement_quantities(&h, kappa, h0, probe.as_ref())?;
                    print_json(stdout, &report, fmt)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("pmc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cylinder_reports_radius() {
        let (code, out, _) = run_args(&["cylinder", "--kappa", "-1", "--H", r#"{"type":"constant","value":1.0}"#]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["radius"].as_f64().unwrap() - 0.5f64.atanh()).abs() < 1e-12);
    }

    #[test]
    fn cylinder_without_solution() {
        let (code, _, err) = run_args(&["cylinder", "--kappa", "-1", "--H", r#"{"type":"constant","value":0.5}"#]);
        assert_eq!(code, 2);
        assert_eq!(err, "error: no-solution: coth > 1\n");
    }

    #[test]
    fn clap_errors_are_one_line_usage() {
        let (code, _, err) = run_args(&["sphere", "--kappa", "-1"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error: usage: "));
        assert_eq!(err.lines().count(), 1);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sphere"));
    }

    #[test]
    fn digits_round_json() {
        let mut v = json!({ "a": [0.123456789, 1], "b": { "c": 2.5e-7 } });
        round_json(&mut v, NumberFormat::new(3).unwrap());
        assert_eq!(v, json!({ "a": [0.123, 1], "b": { "c": 2.5e-7 } }));
    }

    #[test]
    fn config_flags_are_spliced_after_command() {
        let dir = std::env::temp_dir().join(format!("pmc-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"command":"cylinder","kappa":-1,"H":{"type":"constant","value":1.0}}"#).unwrap();
        let args: Vec<OsString> = ["pmc", "--config", path.to_str().unwrap(), "--kappa=+1"].iter().map(Into::into).collect();
        let expanded = expand_config(args).unwrap();
        let text: Vec<String> = expanded.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(text[1], "cylinder");
        assert_eq!(text.last().unwrap(), "--kappa=+1");
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn suffix_paths() {
        assert_eq!(with_suffix(Path::new("a/s.obj"), ".height"), PathBuf::from("a/s.height.obj"));
        assert_eq!(with_suffix(Path::new("s"), ".height"), PathBuf::from("s.height.obj"));
    }
}
