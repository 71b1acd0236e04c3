use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orlicz_core::config::{RunConfig, CONFIG_ENV};
use orlicz_core::measure::Region;
use orlicz_core::orlicz::{orlicz_norm_indicator, NormReport, SimpleFunction};
use orlicz_core::polytope::Polytope;
use orlicz_core::suites::{counterexample, run_suite, to_json, SuiteReport, SUITES};
use orlicz_core::valuation::{psi, XiFunction};
use orlicz_core::young::YoungFunction;
use orlicz_core::{Error, Result};

#[derive(Parser)]
#[command(name = "orlicz", version, about = "Young functions, Orlicz norms over |x|dx and moment valuations")]
struct Cli {
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Args)]
struct RunFlags {
    /// Flat TOML config file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[arg(long, global = true)]
    tol_quadrature_abs: Option<f64>,
    #[arg(long, global = true)]
    tol_residual_max: Option<f64>,
    #[arg(long, global = true)]
    tol_root_rel: Option<f64>,
    #[arg(long, global = true)]
    tol_indicator_rel: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate, conjugate or probe a Young function.
    Young {
        #[arg(value_enum)]
        action: YoungAction,
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 1e6)]
        t_max: f64,
        #[arg(long, default_value_t = 241)]
        grid_size: usize,
        #[arg(long, default_value_t = 1e3)]
        cap: f64,
    },
    /// Modular, Luxemburg and Orlicz norms of a simple function.
    Norm {
        #[command(flatten)]
        phi: PhiArgs,
        #[command(flatten)]
        h: FunctionArgs,
    },
    /// Moment vector of a polytope or region.
    Moment {
        /// Vertices as a JSON array of points.
        #[arg(long, conflicts_with_all = ["region", "indicator"])]
        poly: Option<String>,
        /// Region JSON (inline or a file path).
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        indicator: Option<String>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Ψ_ξ(h) = m(ξ∘h).
    Psi {
        #[arg(long, default_value = "identity")]
        xi: String,
        #[command(flatten)]
        h: FunctionArgs,
    },
    /// Build the divergent truncations for a ξ that is not dominated by φ.
    Counterexample {
        #[arg(long, default_value = "power:2")]
        phi: String,
        #[arg(long, default_value = "pow:4")]
        xi: String,
        #[arg(long = "J")]
        truncation: Option<usize>,
    },
    /// Run a verification battery; exit 0 iff every assertion passes.
    Verify {
        #[arg(value_parser = SUITES)]
        suite: String,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        maps: Option<usize>,
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long = "J")]
        truncation: Option<usize>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        probe_steps: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum YoungAction {
    Eval,
    Conjugate,
    Delta2,
    Limits,
}

#[derive(Args)]
struct PhiArgs {
    /// Shorthand (`power:2`, `exp`, `exp_conjugate:0.5`) or JSON.
    #[arg(long, conflicts_with = "family")]
    phi: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
}

impl PhiArgs {
    fn build(&self) -> Result<YoungFunction> {
        if let Some(s) = &self.phi {
            return read_inline_or_file(s)?.parse();
        }
        let family = self.family.as_deref().unwrap_or("power");
        let mut params = std::collections::BTreeMap::new();
        if let Some(p) = self.p {
            params.insert("p".to_string(), p);
        }
        if let Some(s) = self.scale {
            params.insert("scale".to_string(), s);
        }
        YoungFunction::from_family(family, &params)
    }
}

#[derive(Args)]
struct FunctionArgs {
    /// Simple function JSON (inline or a file path).
    #[arg(long, conflicts_with = "indicator")]
    simple: Option<String>,
    /// `ball:R`, `annulus:r:R`, `box:a1,a2:b1,b2`, `shifted_ball:r:c` or `poly:[[x,y],…]`.
    #[arg(long)]
    indicator: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    value: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

impl FunctionArgs {
    fn build(&self) -> Result<SimpleFunction> {
        match (&self.simple, &self.indicator) {
            (Some(s), _) => Ok(serde_json::from_str(&read_inline_or_file(s)?)?),
            (None, Some(r)) => SimpleFunction::indicator(self.value, region_shorthand(r, self.dim)?),
            (None, None) => Err(Error::Parse("give --simple or --indicator".into())),
        }
    }
}

fn read_inline_or_file(s: &str) -> Result<String> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') || !Path::new(s).is_file() {
        return Ok(s.to_string());
    }
    std::fs::read_to_string(s).map_err(|e| Error::Parse(format!("{s}: {e}")))
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number `{x}`: {e}"))))
        .collect()
}

fn polytope_json(s: &str) -> Result<Polytope> {
    let pts: Vec<Vec<f64>> = serde_json::from_str(s)?;
    let dim = pts.first().map_or(0, Vec::len);
    Polytope::new(dim, pts)
}

fn region_shorthand(s: &str, dim: usize) -> Result<Region> {
    let s = s.trim();
    if s.starts_with('{') {
        return Ok(serde_json::from_str(s)?);
    }
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let args: Vec<&str> = rest.split(':').collect();
    let one = |i: usize| -> Result<f64> {
        args.get(i)
            .ok_or_else(|| Error::Parse(format!("`{s}` is missing an argument")))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
    };
    match kind {
        "ball" => Region::ball(dim, one(0)?),
        "annulus" => Region::annulus(dim, one(0)?, one(1)?),
        "box" if args.len() == 2 => Region::cuboid(numbers(args[0])?, numbers(args[1])?),
        "shifted_ball" => Region::shifted_ball(dim, one(0)?, one(1)?),
        "poly" => Region::polytope(polytope_json(rest)?),
        _ => Err(Error::Parse(format!("unknown region `{s}`"))),
    }
}

fn config(flags: &RunFlags) -> Result<RunConfig> {
    let mut c = match &flags.config {
        Some(p) if !p.as_os_str().is_empty() => RunConfig::from_file(p)?,
        _ => RunConfig::default(),
    };
    if let Some(s) = flags.seed {
        c.seed = s;
    }
    if let Some(o) = &flags.out {
        c.out = Some(o.clone());
    }
    if let Some(f) = &flags.format {
        c.format = f.parse()?;
    }
    for (dst, src) in [
        (&mut c.tol.quadrature_abs, flags.tol_quadrature_abs),
        (&mut c.tol.residual_max, flags.tol_residual_max),
        (&mut c.tol.root_rel, flags.tol_root_rel),
        (&mut c.tol.indicator_rel, flags.tol_indicator_rel),
    ] {
        if let Some(v) = src {
            *dst = v;
        }
    }
    c.validate()?;
    Ok(c)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_value(v: &Value, out: Option<&Path>) -> Result<()> {
    emit(&(to_json(v)? + "\n"), out)
}

fn young(action: YoungAction, phi: YoungFunction, t: Option<f64>, t_max: f64, grid_size: usize, cap: f64) -> Result<Value> {
    Ok(match action {
        YoungAction::Eval => {
            let t = t.ok_or_else(|| Error::Parse("eval needs --t".into()))?;
            json!({"family": phi.family_name(), "t": t, "value": phi.eval(t)?})
        }
        YoungAction::Conjugate => {
            let pair = phi.conjugate()?;
            let mut v = json!({"family": phi.family_name(), "provenance": pair.provenance, "phi_star": pair.phi_star});
            if let YoungFunction::Power { p, .. } = pair.phi_star {
                v["q"] = p.into();
            }
            v
        }
        YoungAction::Delta2 => serde_json::to_value(phi.check_delta2(t_max, grid_size, cap)?)?,
        YoungAction::Limits => {
            let grid: Vec<f64> = (-24..=80).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
            let r = phi.verify_limits(&grid)?;
            json!({
                "family": phi.family_name(),
                "phi_ratio_nondecreasing": r.phi_ratio_nondecreasing,
                "inverse_ratio_nonincreasing": r.inverse_ratio_nonincreasing,
                "phi_over_t_max": r.phi_over_t.last(),
                "inverse_over_t_min": r.inverse_over_t.last(),
                "phi_ratio_exceeds_1e6": r.phi_ratio_exceeds(1e6),
                "inverse_ratio_below_1e-6": r.inverse_ratio_below(1e-6),
            })
        }
    })
}

/// Prints the table, and on failure the first counterexample to stderr.
fn finish(rep: &SuiteReport, cfg: &RunConfig) -> Result<ExitCode> {
    let table = rep.render(cfg.format)?;
    match &cfg.out {
        Some(p) => {
            emit(&table, Some(p))?;
            emit_value(&rep.summary_json(), None)?;
        }
        None => emit(&table, None)?,
    }
    eprintln!("{}", rep.verdict_line());
    if rep.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        let first = rep.first_failure.clone().unwrap_or(Value::Null);
        eprintln!("first counterexample: {}", to_json(&first)?);
        Ok(ExitCode::from(1))
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = config(&cli.run)?;
    let out = cfg.out.clone();
    match cli.cmd {
        Cmd::Young {
            action,
            phi,
            t,
            t_max,
            grid_size,
            cap,
        } => emit_value(&young(action, phi.build()?, t, t_max, grid_size, cap)?, out.as_deref())?,
        Cmd::Norm { phi, h } => {
            let phi = phi.build()?;
            let f = h.build()?;
            let mut v = serde_json::to_value(NormReport::compute(&phi, &f)?)?;
            if let [term] = f.terms() {
                v["indicator_closed_form"] = (term.value.abs() * orlicz_norm_indicator(&phi, &term.region)?).into();
            }
            emit_value(&v, out.as_deref())?;
        }
        Cmd::Moment {
            poly,
            region,
            indicator,
            dim,
        } => {
            let m = match (poly, region, indicator) {
                (Some(p), _, _) => polytope_json(&read_inline_or_file(&p)?)?.moment(),
                (_, Some(r), _) => serde_json::from_str::<Region>(&read_inline_or_file(&r)?)?.moment(),
                (_, _, Some(s)) => region_shorthand(&s, dim)?.moment(),
                _ => return Err(Error::Parse("give --poly, --region or --indicator".into())),
            };
            emit_value(&serde_json::to_value(m)?, out.as_deref())?;
        }
        Cmd::Psi { xi, h } => {
            let xi: XiFunction = read_inline_or_file(&xi)?.parse()?;
            emit_value(&serde_json::to_value(psi(&xi, &h.build()?))?, out.as_deref())?;
        }
        Cmd::Counterexample { phi, xi, truncation } => {
            if let Some(j) = truncation {
                cfg.truncation = j;
            }
            let phi: YoungFunction = read_inline_or_file(&phi)?.parse()?;
            let xi: XiFunction = read_inline_or_file(&xi)?.parse()?;
            return finish(&counterexample(&phi, &xi, cfg.truncation, cfg.seed)?, &cfg);
        }
        Cmd::Verify {
            suite,
            pairs,
            maps,
            cases,
            truncation,
            depth,
            probe_steps,
        } => {
            cfg.pairs = pairs.unwrap_or(cfg.pairs);
            cfg.maps = maps.unwrap_or(cfg.maps);
            cfg.cases = cases.unwrap_or(cfg.cases);
            cfg.truncation = truncation.unwrap_or(cfg.truncation);
            cfg.depth = depth.unwrap_or(cfg.depth);
            cfg.probe_steps = probe_steps.unwrap_or(cfg.probe_steps);
            return finish(&run_suite(&suite, &cfg)?, &cfg);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
