//! Command-line front end. Data goes to stdout or `--output`; every CSV starts
//! with a `#` header block and run metadata goes to `<output>.meta`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::apes::{apes_surface, fg_from_observables, square_grid, ApesObservables, JahnTellerParams};
use crate::basis::{Spin, VibronicBasis};
use crate::config::RunConfig;
use crate::dataset::{Dataset, Defect, Manifold, ManifoldRecord, Quantity};
use crate::djt::{self, SocParams, DEFAULT_CUTOFF, MIN_CUTOFF};
use crate::fitting::{fit_finite_size, ScalingSeries};
use crate::photophysics::{
    charge_transition_level, dipole_for_lifetime, hr_lineshape, radiative_lifetime_ns, LifetimeInputs,
    LineshapeSpec, TemperatureMode, DIAMOND_REFRACTIVE_INDEX,
};
use crate::spin::{zeeman_scan, FieldSpec};
use crate::units::{mev_to_ghz, thz_to_mev, EnergyUnit};
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "xvspin", version, about = "Spin-orbit and dynamic Jahn-Teller modeling of group-IV vacancy centers")]
pub struct Cli {
    /// Flat key = value configuration file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Parameter table to use instead of the bundled one.
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    /// Total phonon-quanta cutoff N.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Energy unit of tabular output: meV or GHz.
    #[arg(long, global = true)]
    pub units: Option<String>,
    /// Write data here (plus a .meta sidecar) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Show the table tag behind every bundled number used.
    #[arg(long, global = true)]
    pub provenance: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct Lambda0Args {
    /// Intrinsic spin-orbit coupling in meV.
    #[arg(long, conflicts_with = "lambda0_thz")]
    pub lambda0_mev: Option<f64>,
    /// Spin-orbit coupling in THz (the scaled values of the effective-Hamiltonian table).
    #[arg(long)]
    pub lambda0_thz: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduction factors and zero-field splitting of one manifold.
    Solve {
        /// SiV, GeV, SnV, PbV, or "custom" with all overrides given.
        defect: String,
        /// g (ground) or u (excited).
        manifold: String,
        #[command(flatten)]
        lambda0: Lambda0Args,
        #[arg(long)]
        e_jt: Option<f64>,
        #[arg(long)]
        delta_jt: Option<f64>,
        #[arg(long)]
        hbar_omega: Option<f64>,
    },
    /// Zeeman-split levels and ZPL fine-structure lines versus field.
    Zeeman {
        defect: String,
        /// Lattice direction of the field, e.g. 100, 111, 1,-1,0.
        #[arg(long)]
        dir: Option<String>,
        #[arg(long)]
        bmax: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Lowest vibronic doublets as (2<LzSz>, E - E0).
    Spectrum {
        defect: String,
        manifold: String,
        #[command(flatten)]
        lambda0: Lambda0Args,
        #[arg(long)]
        doublets: Option<usize>,
    },
    /// Classical adiabatic potential energy sheets on a square grid.
    Apes {
        defect: String,
        manifold: String,
        #[arg(long)]
        grid: Option<usize>,
        /// Half-width of the grid in dimensionless coordinates.
        #[arg(long)]
        extent: Option<f64>,
    },
    /// Zero-temperature Huang-Rhys emission lineshape, single effective mode.
    Lineshape {
        defect: String,
        #[arg(long)]
        broadening_mev: Option<f64>,
        #[arg(long)]
        resolution_mev: Option<f64>,
        #[arg(long)]
        hbar_omega_mev: Option<f64>,
    },
    /// Fit lambda0(L) = lambda0 + A exp(-L B) to a two-column file.
    Fit { file: PathBuf },
    /// Radiative lifetime from a transition dipole, or the dipole from a lifetime.
    Lifetime {
        defect: Option<String>,
        #[arg(long)]
        photon_ev: Option<f64>,
        #[arg(long)]
        dipole_debye: Option<f64>,
        #[arg(long)]
        tau_ns: Option<f64>,
        #[arg(long)]
        refractive_index: Option<f64>,
    },
    /// Charge transition level from total energies and charge corrections (eV).
    Ctl {
        defect: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        e_q: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        e_q1: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        corr_q: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        corr_q1: f64,
    },
    /// Print the parameter table.
    Dataset,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::Zeeman { .. } => "zeeman",
            Command::Spectrum { .. } => "spectrum",
            Command::Apes { .. } => "apes",
            Command::Lineshape { .. } => "lineshape",
            Command::Fit { .. } => "fit",
            Command::Lifetime { .. } => "lifetime",
            Command::Ctl { .. } => "ctl",
            Command::Dataset => "dataset",
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}

struct Context {
    cfg: RunConfig,
    data: Dataset,
    output: Option<PathBuf>,
    provenance: bool,
    command: &'static str,
}

impl Context {
    fn cutoff(&self) -> Result<usize> {
        let n = self.cfg.get_or("cutoff", DEFAULT_CUTOFF)?;
        if n < MIN_CUTOFF {
            return Err(Error::Config(format!("cutoff {n} refused: the minimum is {MIN_CUTOFF}")));
        }
        Ok(n)
    }

    fn units(&self) -> Result<EnergyUnit> {
        self.cfg.get_str("units").unwrap_or("meV").parse()
    }

    fn header(&self, params: &[(&str, String)]) -> String {
        let mut h = format!("# xvspin {VERSION}\n# command: {}\n", self.command);
        for (k, v) in params {
            h.push_str(&format!("# {k}: {v}\n"));
        }
        h
    }

    /// Write `header + body` to `--output` (with sidecar) or to `out`.
    fn emit(&self, out: &mut dyn Write, header: &str, body: &str) -> Result<()> {
        match &self.output {
            Some(path) => {
                std::fs::write(path, format!("{header}{body}"))?;
                write_sidecar(path, self.command)?;
                writeln!(out, "wrote {}", path.display())?;
            }
            None => write!(out, "{header}{body}")?,
        }
        Ok(())
    }

    fn show(&self, out: &mut dyn Write, label: &str, q: Quantity) -> Result<()> {
        if self.provenance {
            writeln!(out, "# {label} = {} [{}: {}]", q.value, q.provenance.tag(), q.provenance.citation())?;
        }
        Ok(())
    }
}

fn write_sidecar(path: &Path, command: &str) -> Result<()> {
    let mut meta = path.as_os_str().to_owned();
    meta.push(".meta");
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let args: Vec<String> = std::env::args().collect();
    std::fs::write(
        PathBuf::from(meta),
        format!("program = xvspin\nversion = {VERSION}\ncommand = {command}\nargv = {}\ncreated_unix = {created}\n", args.join(" ")),
    )?;
    Ok(())
}

fn parse_direction(s: &str) -> Result<[i32; 3]> {
    let bad = || Error::Config(format!("cannot read direction '{s}' (examples: 100, 111, 1,-1,0)"));
    let parts: Vec<i32> = if s.contains(',') {
        s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    } else {
        let mut v = Vec::new();
        let mut neg = false;
        for ch in s.chars() {
            match ch {
                '-' => neg = true,
                d if d.is_ascii_digit() => {
                    let x = d.to_digit(10).unwrap() as i32;
                    v.push(if neg { -x } else { x });
                    neg = false;
                }
                _ => return Err(bad()),
            }
        }
        v
    };
    match parts.as_slice() {
        [a, b, c] if (*a, *b, *c) != (0, 0, 0) => Ok([*a, *b, *c]),
        _ => Err(bad()),
    }
}

fn fmt_row(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.override_with("cutoff", cli.cutoff)?;
    cfg.override_with("units", cli.units.clone())?;
    cfg.override_with("output", cli.output.as_ref().map(|p| p.display().to_string()))?;
    cfg.override_with("dataset", cli.dataset.as_ref().map(|p| p.display().to_string()))?;

    let data = match cfg.get_str("dataset") {
        Some(p) => Dataset::load(Path::new(p)).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("cannot read dataset {p}: {io}")),
            other => other,
        })?,
        None => Dataset::bundled(),
    };
    let ctx = Context {
        output: cfg.get_str("output").map(PathBuf::from),
        cfg,
        data,
        provenance: cli.provenance,
        command: cli.command.name(),
    };

    match cli.command {
        Command::Solve { defect, manifold, lambda0, e_jt, delta_jt, hbar_omega } => {
            cmd_solve(&ctx, out, &defect, &manifold, lambda0, [e_jt, delta_jt, hbar_omega])
        }
        Command::Zeeman { defect, dir, bmax, steps } => cmd_zeeman(ctx, out, &defect, dir, bmax, steps),
        Command::Spectrum { defect, manifold, lambda0, doublets } => {
            cmd_spectrum(ctx, out, &defect, &manifold, lambda0, doublets)
        }
        Command::Apes { defect, manifold, grid, extent } => cmd_apes(ctx, out, &defect, &manifold, grid, extent),
        Command::Lineshape { defect, broadening_mev, resolution_mev, hbar_omega_mev } => {
            cmd_lineshape(ctx, out, &defect, broadening_mev, resolution_mev, hbar_omega_mev)
        }
        Command::Fit { file } => cmd_fit(&ctx, out, &file),
        Command::Lifetime { defect, photon_ev, dipole_debye, tau_ns, refractive_index } => {
            cmd_lifetime(ctx, out, defect, photon_ev, dipole_debye, tau_ns, refractive_index)
        }
        Command::Ctl { defect, e_q, e_q1, corr_q, corr_q1 } => cmd_ctl(&ctx, out, defect, e_q, e_q1, corr_q, corr_q1),
        Command::Dataset => cmd_dataset(&ctx, out),
    }
}

fn record(ctx: &Context, defect: &str, manifold: &str) -> Result<(Defect, Manifold, ManifoldRecord)> {
    let d: Defect = defect.parse()?;
    let m: Manifold = manifold.parse()?;
    let rec = ctx.data.defect(d)?.manifold(m)?.clone();
    Ok((d, m, rec))
}

/// λ₀ in meV from flags/config, else the intrinsic tabulated value.
fn lambda0_mev(ctx: &mut Context, flags: Lambda0Args, fallback: Option<f64>) -> Result<(f64, String)> {
    ctx.cfg.override_with("lambda0_mev", flags.lambda0_mev)?;
    ctx.cfg.override_with("lambda0_thz", flags.lambda0_thz)?;
    let mev: Option<f64> = ctx.cfg.get("lambda0_mev")?;
    let thz: Option<f64> = ctx.cfg.get("lambda0_thz")?;
    match (mev, thz, fallback) {
        (Some(_), Some(_), _) => Err(Error::Config("give lambda0 in meV or THz, not both".into())),
        (Some(v), None, _) => Ok((v, format!("{v} meV"))),
        (None, Some(t), _) => Ok((thz_to_mev(t), format!("{t} THz"))),
        (None, None, Some(v)) => Ok((v, format!("{v} meV (intrinsic, tabulated)"))),
        (None, None, None) => Err(Error::Config("missing parameter: lambda0 (--lambda0-mev or --lambda0-thz)".into())),
    }
}

fn cmd_solve(
    ctx: &Context,
    out: &mut dyn Write,
    defect: &str,
    manifold: &str,
    lambda0: Lambda0Args,
    overrides: [Option<f64>; 3],
) -> Result<()> {
    let mut ctx = Context {
        cfg: ctx.cfg.clone(),
        data: ctx.data.clone(),
        output: ctx.output.clone(),
        provenance: ctx.provenance,
        command: ctx.command,
    };
    let names = ["--e-jt", "--delta-jt", "--hbar-omega"];
    let (label, obs, fallback) = if defect.eq_ignore_ascii_case("custom") {
        let missing: Vec<&str> = names.iter().zip(&overrides).filter(|(_, v)| v.is_none()).map(|(n, _)| *n).collect();
        let missing_l = lambda0.lambda0_mev.is_none() && lambda0.lambda0_thz.is_none() && ctx.cfg.get::<f64>("lambda0_mev")?.is_none() && ctx.cfg.get::<f64>("lambda0_thz")?.is_none();
        if !missing.is_empty() || missing_l {
            let mut all: Vec<&str> = missing;
            if missing_l {
                all.push("--lambda0-mev|--lambda0-thz");
            }
            return Err(Error::Config(format!("missing parameters: {}", all.join(", "))));
        }
        let [e, d, w] = overrides.map(Option::unwrap);
        (format!("custom {manifold}"), ApesObservables::new(e, d, w), None)
    } else {
        let (d, m, rec) = record(&ctx, defect, manifold)?;
        ctx.show(out, "e_jt_mev", rec.e_jt_mev)?;
        ctx.show(out, "delta_jt_mev", rec.delta_jt_mev)?;
        ctx.show(out, "hbar_omega_mev", rec.hbar_omega_mev)?;
        ctx.show(out, "lambda0_mev", rec.lambda0_mev)?;
        let base = rec.observables();
        let obs = ApesObservables::new(
            overrides[0].unwrap_or(base.e_jt),
            overrides[1].unwrap_or(base.delta_jt),
            overrides[2].unwrap_or(base.hbar_omega),
        );
        (format!("{d} {}", m.tag()), obs, Some(rec.lambda0_mev.value))
    };
    let (l0, l0_label) = lambda0_mev(&mut ctx, lambda0, fallback)?;
    let cutoff = ctx.cutoff()?;
    let params = fg_from_observables(&obs)?;
    let rf = djt::exact_factors(&params, &SocParams::new(l0)?, &VibronicBasis::new(cutoff, true))?;

    let e = |mev: f64| format!("{mev:.6} meV = {:.4} GHz", mev_to_ghz(mev));
    let lines = [
        format!("system = {label}"),
        format!("cutoff = {cutoff}"),
        format!("lambda0 = {l0_label}"),
        format!("F = {:.6} meV", params.f),
        format!("G = {:.6} meV", params.g),
        format!("hbar_omega = {:.6} meV", params.hbar_omega),
        format!("p_perturbative = {:.6}", rf.p_perturbative),
        format!("p32 = {:.6}", rf.p32),
        format!("p12 = {:.6}", rf.p12),
        format!("p = {:.6}", rf.p),
        format!("delta_p = {:.6}", rf.delta_p),
        format!("K_JT = {}", e(rf.k_jt)),
        format!("lambda = {}", e(rf.lambda_zfs)),
        format!("lambda_Ham = {}", e(rf.lambda_ham)),
        format!("offset = {}", e(rf.offset)),
    ];
    for l in &lines {
        writeln!(out, "{l}")?;
    }
    if let Some(path) = &ctx.output {
        let header = ctx.header(&[("system", label.clone()), ("cutoff", cutoff.to_string()), ("lambda0", l0_label)]);
        let mut body = String::from("quantity,value_meV,value_GHz\n");
        for (k, v) in [("F", params.f), ("G", params.g), ("hbar_omega", params.hbar_omega), ("K_JT", rf.k_jt), ("lambda", rf.lambda_zfs), ("lambda_Ham", rf.lambda_ham), ("offset", rf.offset)] {
            body.push_str(&format!("{k},{v},{}\n", mev_to_ghz(v)));
        }
        for (k, v) in [("p_perturbative", rf.p_perturbative), ("p32", rf.p32), ("p12", rf.p12), ("p", rf.p), ("delta_p", rf.delta_p)] {
            body.push_str(&format!("{k},{v},\n"));
        }
        std::fs::write(path, format!("{header}{body}"))?;
        write_sidecar(path, ctx.command)?;
    }
    Ok(())
}

fn cmd_zeeman(ctx: Context, out: &mut dyn Write, defect: &str, dir: Option<String>, bmax: Option<f64>, steps: Option<usize>) -> Result<()> {
    let mut ctx = ctx;
    ctx.cfg.override_with("dir", dir)?;
    ctx.cfg.override_with("bmax", bmax)?;
    ctx.cfg.override_with("steps", steps)?;
    let d: Defect = defect.parse()?;
    let rec = ctx.data.defect(d)?;
    let dir_s = ctx.cfg.get_str("dir").unwrap_or("100").to_string();
    let hkl = parse_direction(&dir_s)?;
    let bmax: f64 = ctx.cfg.get_or("bmax", 7.0)?;
    let steps: usize = ctx.cfg.get_or("steps", 140)?;
    if bmax.is_nan() || bmax <= 0.0 || steps == 0 {
        return Err(Error::Config("zeeman needs bmax > 0 and steps > 0".into()));
    }
    for (label, q) in [("lambda_g", rec.ground.lambda_scaled_ghz), ("f_g", rec.ground.f), ("delta_f_g", rec.ground.delta_f), ("lambda_u", rec.excited.lambda_scaled_ghz), ("f_u", rec.excited.f), ("delta_f_u", rec.excited.delta_f)] {
        ctx.show(out, label, q)?;
    }
    let g = rec.ground.effective_spin()?;
    let u = rec.excited.effective_spin()?;
    let zpl = rec.best_zpl_ev();
    let set = zeeman_scan(&g, &u, zpl, &FieldSpec::along_miller(1.0, hkl)?, bmax, steps)?;
    let header = ctx.header(&[
        ("defect", d.to_string()),
        ("field_direction", format!("[{} {} {}]", hkl[0], hkl[1], hkl[2])),
        ("defect_axis", "[1 1 1]".into()),
        ("units", "B in T; levels and line offsets in GHz relative to the ZPL".into()),
        ("zpl_ev", zpl.to_string()),
        ("ground", format!("lambda={} GHz f={} delta_f={}", g.lambda, g.f, g.delta_f)),
        ("excited", format!("lambda={} GHz f={} delta_f={}", u.lambda, u.f, u.delta_f)),
        ("lines", "t_ij = u_i - g_j".into()),
    ]);
    let mut body = Vec::new();
    set.write_csv(&mut body)?;
    ctx.emit(out, &header, &String::from_utf8(body).expect("utf8 csv"))
}

fn cmd_spectrum(ctx: Context, out: &mut dyn Write, defect: &str, manifold: &str, lambda0: Lambda0Args, doublets: Option<usize>) -> Result<()> {
    let mut ctx = ctx;
    ctx.cfg.override_with("doublets", doublets)?;
    let (d, m, rec) = record(&ctx, defect, manifold)?;
    let (l0, l0_label) = lambda0_mev(&mut ctx, lambda0, Some(rec.lambda0_mev.value))?;
    let k: usize = ctx.cfg.get_or("doublets", 10)?;
    let cutoff = ctx.cutoff()?;
    let unit = ctx.units()?;
    let params = fg_from_observables(&rec.observables())?;
    let rows = djt::lzsz_spectrum(&params, &SocParams::new(l0)?, &VibronicBasis::new(cutoff, true), k)?;
    let header = ctx.header(&[
        ("system", format!("{d} {}", m.tag())),
        ("cutoff", cutoff.to_string()),
        ("lambda0", l0_label),
        ("units", format!("energy in {} relative to the ground level", unit.label())),
    ]);
    let mut body = format!("doublet_index,two_lzsz,energy_{},spin_block\n", unit.label());
    for r in rows {
        let spin = if r.spin == Spin::Up { "up" } else { "down" };
        body.push_str(&format!("{},{},{},{spin}\n", r.doublet, r.two_lzsz, unit.from_mev(r.energy)));
    }
    ctx.emit(out, &header, &body)
}

fn cmd_apes(ctx: Context, out: &mut dyn Write, defect: &str, manifold: &str, grid: Option<usize>, extent: Option<f64>) -> Result<()> {
    let mut ctx = ctx;
    ctx.cfg.override_with("grid", grid)?;
    ctx.cfg.override_with("extent", extent)?;
    let (d, m, rec) = record(&ctx, defect, manifold)?;
    let params: JahnTellerParams = fg_from_observables(&rec.observables())?;
    let n: usize = ctx.cfg.get_or("grid", 101)?;
    if n < 2 {
        return Err(Error::Config("grid needs at least 2 points per side".into()));
    }
    let extent: f64 = ctx.cfg.get_or("extent", 1.5 * params.minimum_radius().max(0.5))?;
    let unit = ctx.units()?;
    let points = apes_surface(&params, &square_grid(extent, n));
    let vmin = points.iter().map(|p| p.v_minus).fold(f64::INFINITY, f64::min);
    let header = ctx.header(&[
        ("system", format!("{d} {}", m.tag())),
        ("F_meV", params.f.to_string()),
        ("G_meV", params.g.to_string()),
        ("hbar_omega_meV", params.hbar_omega.to_string()),
        ("orientation", "first minimum of V_minus on the +x axis, then 120 and 240 degrees".into()),
        ("min_V_minus", format!("{} {}", unit.from_mev(vmin), unit.label())),
        ("units", format!("x, y dimensionless; V in {}", unit.label())),
    ]);
    let mut body = String::from("x,y,V_minus,V_plus\n");
    for p in points {
        body.push_str(&fmt_row(&[p.x, p.y, unit.from_mev(p.v_minus), unit.from_mev(p.v_plus)]));
        body.push('\n');
    }
    ctx.emit(out, &header, &body)
}

fn cmd_lineshape(ctx: Context, out: &mut dyn Write, defect: &str, broadening: Option<f64>, resolution: Option<f64>, hbar_omega: Option<f64>) -> Result<()> {
    let mut ctx = ctx;
    ctx.cfg.override_with("broadening_mev", broadening)?;
    ctx.cfg.override_with("resolution_mev", resolution)?;
    ctx.cfg.override_with("hbar_omega_mev", hbar_omega)?;
    let d: Defect = defect.parse()?;
    let rec = ctx.data.defect(d)?;
    ctx.show(out, "s", rec.s)?;
    let spec = LineshapeSpec::single_mode(
        rec.best_zpl_ev(),
        rec.s.value,
        ctx.cfg.get_or("hbar_omega_mev", rec.ground.hbar_omega_mev.value)?,
        ctx.cfg.get_or("broadening_mev", 5.0)?,
        ctx.cfg.get_or("resolution_mev", 0.5)?,
    );
    let ls = hr_lineshape(&spec, TemperatureMode::ZeroK)?;
    let header = ctx.header(&[
        ("defect", d.to_string()),
        ("zpl_ev", spec.zpl_ev.to_string()),
        ("huang_rhys_s", spec.total_s().to_string()),
        ("mode_hbar_omega_meV", spec.modes[0].hbar_omega_mev.to_string()),
        ("broadening_meV", spec.broadening_mev.to_string()),
        ("zpl_weight", format!("{:.6}", ls.zpl_weight)),
        ("units", "energy in eV, intensity per eV normalized to unit area".into()),
    ]);
    let mut body = String::from("energy_ev,intensity\n");
    for (e, i) in ls.energies_ev.iter().zip(&ls.intensities) {
        body.push_str(&format!("{e},{i}\n"));
    }
    ctx.emit(out, &header, &body)
}

fn cmd_fit(ctx: &Context, out: &mut dyn Write, file: &Path) -> Result<()> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Config(format!("cannot read {}: {e}", file.display())))?;
    let series = ScalingSeries::parse(&text)?;
    let fit = fit_finite_size(&series)?;
    let u = fit.unit.label();
    let mut report = format!(
        "lambda0_inf = {} {u}\nA = {} {u}\nB = {}{}\nrss = {:e}\niterations = {}\n",
        fit.lambda0_inf,
        fit.a,
        fit.b,
        if fit.b_indeterminate { " (indeterminate)" } else { "" },
        fit.rss,
        fit.iterations
    );
    if let Some(se) = fit.stderr {
        report.push_str(&format!("stderr_lambda0_inf = {:e} {u}\nstderr_A = {:e} {u}\nstderr_B = {:e}\n", se[0], se[1], se[2]));
    }
    for (k, r) in fit.residuals.iter().enumerate() {
        report.push_str(&format!("residual_{} = {r:e}\n", k + 1));
    }
    ctx.emit(out, &ctx.header(&[("file", file.display().to_string())]), &report)
}

fn cmd_lifetime(ctx: Context, out: &mut dyn Write, defect: Option<String>, photon: Option<f64>, dipole: Option<f64>, tau: Option<f64>, n: Option<f64>) -> Result<()> {
    let mut ctx = ctx;
    ctx.cfg.override_with("photon_ev", photon)?;
    ctx.cfg.override_with("dipole_debye", dipole)?;
    ctx.cfg.override_with("tau_ns", tau)?;
    ctx.cfg.override_with("refractive_index", n)?;
    let rec = defect.map(|d| d.parse::<Defect>().and_then(|d| ctx.data.defect(d))).transpose()?;
    let photon = match (ctx.cfg.get::<f64>("photon_ev")?, &rec) {
        (Some(p), _) => p,
        (None, Some(r)) => r.best_zpl_ev(),
        (None, None) => return Err(Error::Config("missing parameter: --photon-ev (or a defect)".into())),
    };
    let n = ctx.cfg.get_or("refractive_index", DIAMOND_REFRACTIVE_INDEX)?;
    let (mu, tau) = match (ctx.cfg.get::<f64>("dipole_debye")?, ctx.cfg.get::<f64>("tau_ns")?, &rec) {
        (Some(mu), _, _) => (mu, radiative_lifetime_ns(&LifetimeInputs { refractive_index: n, photon_energy_ev: photon, dipole_debye: mu })?),
        (None, Some(t), _) => (dipole_for_lifetime(n, photon, t)?, t),
        (None, None, Some(r)) => {
            ctx.show(out, "tau_rad_ns", r.tau_rad_ns)?;
            (dipole_for_lifetime(n, photon, r.tau_rad_ns.value)?, r.tau_rad_ns.value)
        }
        _ => return Err(Error::Config("missing parameters: --dipole-debye or --tau-ns".into())),
    };
    let report = format!("photon_ev = {photon}\nrefractive_index = {n}\ndipole_debye = {mu}\ntau_ns = {tau}\n");
    ctx.emit(out, &ctx.header(&[]), &report)
}

fn cmd_ctl(ctx: &Context, out: &mut dyn Write, defect: Option<String>, e_q: Option<f64>, e_q1: Option<f64>, corr_q: f64, corr_q1: f64) -> Result<()> {
    let report = match (e_q, e_q1, defect) {
        (Some(a), Some(b), _) => format!("level_ev = {}\n", charge_transition_level(a, b, corr_q, corr_q1)),
        (None, None, Some(d)) => {
            let d: Defect = d.parse()?;
            let q = ctx
                .data
                .get(d, Manifold::Defect, "ctl_2minus_minus_ev")
                .ok_or_else(|| Error::Config(format!("no tabulated charge transition level for {d}; give --e-q and --e-q1")))?;
            ctx.show(out, "ctl_2minus_minus_ev", q)?;
            format!("transition = (2-|-)\nlevel_ev = {}\nreference = valence band maximum\n", q.value)
        }
        _ => return Err(Error::Config("missing parameters: --e-q and --e-q1 (or a defect)".into())),
    };
    ctx.emit(out, &ctx.header(&[]), &report)
}

fn cmd_dataset(ctx: &Context, out: &mut dyn Write) -> Result<()> {
    if ctx.provenance {
        for r in &ctx.data.rows {
            writeln!(
                out,
                "{} {} {} = {} [{}: {}]",
                r.defect,
                r.manifold.tag(),
                r.field,
                r.quantity.value,
                r.quantity.provenance.tag(),
                r.quantity.provenance.citation()
            )?;
        }
        return Ok(());
    }
    ctx.emit(out, "", &ctx.data.serialize())
}
