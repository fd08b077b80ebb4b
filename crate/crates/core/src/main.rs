use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polar_dsc::experiments::{
    build_coding, ccdf_grid, ccdf_rows, region_rows, render_ccdf, render_region, render_trials,
    run_experiment, write_text, ConfigFile, ExperimentConfig, ExperimentMode, RegionRow,
};
use polar_dsc::pipeline::{estimate_wrap_stats, Mode};
use polar_dsc::polar::BitRole;
use polar_dsc::region::{analytic_bounds, bt_rate_bounds, corner_params};
use polar_dsc::{Error, Result};

#[derive(Parser)]
#[command(name = "polar-dsc", version, about = "Distributed Gaussian source coding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distortion-region frontier and achieved markers as CSV.
    Region {
        #[command(flatten)]
        common: Common,
        /// Achieved pair to mark, as LABEL=D1,D2.
        #[arg(long, value_parser = parse_marker)]
        marker: Vec<RegionRow>,
    },
    /// Monte Carlo run of one case; writes the trial CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Also write the CCDF of both sources here.
        #[arg(long)]
        ccdf: Option<PathBuf>,
    },
    /// Corner-point parameters and rate bounds.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Role assignment of both polar codes.
    Design {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    blocks: Option<u64>,
    #[arg(long = "case", value_enum)]
    case: Option<Case>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "ideal")]
    Ideal,
}

fn parse_marker(s: &str) -> std::result::Result<RegionRow, String> {
    let (label, pair) = s.split_once('=').ok_or("expected LABEL=D1,D2")?;
    let (a, b) = pair.split_once(',').ok_or("expected LABEL=D1,D2")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    Ok(RegionRow {
        mode: label.to_string(),
        d1: num(a)?,
        d2: num(b)?,
    })
}

impl Common {
    fn load(&self, default_mode: Option<ExperimentMode>) -> Result<ExperimentConfig> {
        let mut f = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(c) = self.case {
            f.mode = Some(match c {
                Case::One => ExperimentMode::Case1,
                Case::Two => ExperimentMode::Case2,
                Case::Ideal => ExperimentMode::Ideal,
            });
        } else if f.mode.is_none() {
            f.mode = default_mode;
        }
        if self.seed.is_some() {
            f.seed = self.seed;
        }
        if self.blocks.is_some() {
            f.blocks = self.blocks;
        }
        if self.out.is_some() {
            f.out.clone_from(&self.out);
        }
        if self.workers.is_some() {
            f.workers = self.workers;
        }
        ExperimentConfig::resolve(f)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            }),
    }
}

fn region(common: &Common, markers: Vec<RegionRow>) -> Result<()> {
    let cfg = common.load(Some(ExperimentMode::Region))?;
    let p = &cfg.params;
    let rows = region_rows(&p.src, p.r1, p.r2, cfg.grid_size, &markers)
        .map_err(|e| Error::config(e.to_string()))?;
    emit(cfg.out.as_ref(), &render_region(&rows))
}

fn simulate(common: &Common, ccdf: Option<PathBuf>) -> Result<()> {
    let mut cfg = common.load(None)?;
    if cfg.mode == ExperimentMode::Region {
        cfg.mode = ExperimentMode::Case1;
    }
    let out = run_experiment(&cfg)?;
    emit(cfg.out.as_ref(), &render_trials(&out.records))?;
    if let Some(path) = ccdf.or(cfg.ccdf_out.clone()) {
        let grid = ccdf_grid(&out.records, cfg.ccdf_points);
        write_text(&path, &render_ccdf(&ccdf_rows(&out.records, &grid)?))?;
    }
    let s = out.summary;
    eprintln!(
        "{} seed={} blocks={} E[D1]={:.6} (se {:.6}) E[D2]={:.6} (se {:.6}) total={:.6}",
        cfg.mode.name(),
        cfg.params.seed,
        s.blocks,
        s.mean1,
        s.se1,
        s.mean2,
        s.se2,
        s.total()
    );
    Ok(())
}

fn rates(common: &Common) -> Result<()> {
    let cfg = common.load(None)?;
    let p = &cfg.params;
    let cp = corner_params(&p.src, p.r1, p.r2).map_err(|e| Error::config(e.to_string()))?;
    let rb = bt_rate_bounds(&p.src, &cp.noise_vars());
    let m = cp.lmmse;
    let mut text = String::new();
    let mut line = |k: &str, v: f64| text.push_str(&format!("{k} = {v:.9}\n"));
    line("sigma_z2_2", cp.var_z2);
    line("sigma_z1_2", cp.var_z1);
    line("D1", cp.d1);
    line("D2", cp.d2);
    line("sigma_d2_2", cp.sigma_d2_2);
    line("alpha2", cp.alpha2);
    line("alpha1", cp.alpha1);
    line("gamma1", cp.gamma1);
    line("sigma_x1_given_u2_2", cp.sigma_x1_given_u2_2);
    line("lmmse_11", m.get(0, 0));
    line("lmmse_12", m.get(0, 1));
    line("lmmse_21", m.get(1, 0));
    line("lmmse_22", m.get(1, 1));
    line("r1_min", rb.r1_min);
    line("r2_min", rb.r2_min);
    line("sum_min", rb.sum_min);
    if let Some(dmin) = cfg.d_min {
        let mut c = cfg.clone();
        if c.mode != ExperimentMode::Ideal {
            c.mode = ExperimentMode::Case1;
            c.params.mode = Mode::Case1;
        }
        let mut ideal = c.params.clone();
        ideal.mode = Mode::Ideal;
        c.params = ideal;
        let coding = build_coding(&c)?;
        let wrap = estimate_wrap_stats(&coding, cfg.blocks.min(200))?;
        let b = analytic_bounds(
            &coding.corner,
            &p.src,
            &coding.encoder(0).shaping,
            &coding.encoder(1).shaping,
            Some(dmin),
            &wrap,
        )?;
        line("bound_z2_second_moment", b.z2_second_moment);
        line("bound_sigma_z1_2", b.sigma_z1_2);
        line("bound_z1_second_moment", b.z1_second_moment);
        line("bound_distortion1", b.distortion1);
    }
    emit(cfg.out.as_ref(), &text)
}

fn design(common: &Common) -> Result<()> {
    let mut cfg = common.load(None)?;
    if matches!(cfg.mode, ExperimentMode::Region | ExperimentMode::Ideal) {
        return Err(Error::config("design needs --case 1 or --case 2"));
    }
    cfg.params.mode = cfg.mode.pipeline_mode().unwrap_or(Mode::Case1);
    let coding = build_coding(&cfg)?;
    let mut text = String::from("encoder,level,frozen,info,shaped,roles\n");
    for (l, e) in coding.encoders.iter().enumerate() {
        let Some(spec) = &e.polar else { continue };
        for (j, lev) in spec.levels().iter().enumerate() {
            let c = lev.counts();
            let roles: String = lev
                .roles()
                .iter()
                .map(|r| match r {
                    BitRole::Frozen => 'F',
                    BitRole::Info => 'I',
                    BitRole::Shaped => 'S',
                })
                .collect();
            text.push_str(&format!("{},{j},{},{},{},{roles}\n", l + 1, c.frozen, c.info, c.shaped));
        }
    }
    emit(cfg.out.as_ref(), &text)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } => 2,
        Error::Io { .. } | Error::Csv(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Region { common, marker } => region(&common, marker),
        Command::Simulate { common, ccdf } => simulate(&common, ccdf),
        Command::Rates { common } => rates(&common),
        Command::Design { common } => design(&common),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
