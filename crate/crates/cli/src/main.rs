mod config;
mod output;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use u1walsh::circuit::gate_count;
use u1walsh::hamiltonian::DenseLimits;
use u1walsh::qasm::to_qasm;
use u1walsh::studies::{
    b_max_scan, evolve_study, gate_count_study, l1_study, plaquette_study, product_scaling, spectrum_study, GatePoint,
    GateTarget, ProductScaling, SpectrumReference,
};
use u1walsh::trotter::step_circuit;
use u1walsh::{Formulation, TrotterPlan};

use config::{RunArgs, RunConfig};
use output::{emit, json as json_doc, render, Provenance};

#[derive(Parser)]
#[command(
    name = "u1walsh",
    version,
    about = "Walsh-series circuit studies for 2+1D U(1) rotor lattice gauge theory"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest energies per n_q against the normal-mode oracle or a large-n_q run
    Spectrum {
        #[arg(long, default_value_t = 10)]
        levels: usize,
        /// oracle (non-compact only) or self; defaults to oracle for non-compact
        #[arg(long, value_parser = ["oracle", "self"])]
        reference: Option<String>,
        /// n_q of the self-reference run; defaults to the largest --nq
        #[arg(long)]
        reference_nq: Option<u32>,
    },
    /// Compact ⟨□⟩ against g, original and weaved
    Plaquette {
        /// Instead of the g sweep, scale every weaved b_max by each factor
        #[arg(long, value_delimiter = ',')]
        scan: Option<Vec<f64>>,
    },
    /// Rz and CNOT counts over the cartesian product of --np, --nq, --g, --theta-min and --dt
    Gatecount {
        /// maximal-cos, single-cos, magnetic, electric or step
        #[arg(long, default_value = "step", value_parser = |s: &str| s.parse::<GateTarget>().map_err(|e| e.to_string()))]
        target: GateTarget,
        /// Plaquette counts for the abstract cosine targets; defaults to the lattice's N_p
        #[arg(long, value_delimiter = ',')]
        np: Option<Vec<usize>>,
    },
    /// L1 norm of the Walsh coefficients of cos(B_1 + ... + B_Np)
    L1 {
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        b_max: f64,
        #[arg(long, default_value_t = 1)]
        min_qubits: u32,
        #[arg(long, default_value_t = 16)]
        max_qubits: u32,
    },
    /// Truncated CNOT counts of the repeated product of single-plaquette cosines, with fits
    ProductScaling {
        #[arg(long, default_value_t = 8)]
        np_max: usize,
        /// θ_min runs over 2^-k for k = 0..=K
        #[arg(long, default_value_t = 36)]
        theta_exp_max: u32,
        #[arg(long, default_value_t = 2)]
        max_r: usize,
        /// Which table to write in CSV mode; JSON carries all of them
        #[arg(long, default_value = "transitions", value_parser = ["counts", "fits", "transitions"])]
        table: String,
    },
    /// Return probability of the electric vacuum after time t, per (δt, θ_min) combination
    Evolve {
        /// Skip the exact-evolution column
        #[arg(long)]
        no_exact: bool,
    },
    /// One Trotter step as OpenQASM 2.0
    Export,
}

#[derive(Serialize)]
struct FitRow {
    theta_min: f64,
    degree: usize,
    coefficients: String,
}

fn fit_rows(p: &ProductScaling) -> Vec<FitRow> {
    p.fits
        .iter()
        .map(|f| FitRow {
            theta_min: f.theta_min,
            degree: f.degree,
            coefficients: f
                .coefficients
                .iter()
                .map(|c| format!("{c:e}"))
                .collect::<Vec<_>>()
                .join(";"),
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::resolve(&cli.run)?;
    let exec = cfg.exec();
    let bytes = match cli.command {
        Command::Spectrum {
            levels,
            reference,
            reference_nq,
        } => {
            let g = cfg.one_g("spectrum")?;
            let reference = match reference.as_deref() {
                Some("oracle") => SpectrumReference::Oracle,
                Some(_) => {
                    SpectrumReference::SelfReference(reference_nq.unwrap_or(*cfg.n_q.iter().max().expect("non-empty")))
                }
                None if cfg.formulation == Formulation::NonCompact => SpectrumReference::Oracle,
                None => {
                    SpectrumReference::SelfReference(reference_nq.unwrap_or(*cfg.n_q.iter().max().expect("non-empty")))
                }
            };
            let rows = spectrum_study(&cfg.model_spec(), g, &cfg.n_q, levels, reference, exec)?;
            render(
                &Provenance::new("spectrum", &cfg, json!({"levels": levels, "reference": reference})),
                &rows,
            )?
        }
        Command::Plaquette { scan } => {
            let n_q = cfg.one_nq("plaquette")?;
            if cfg.formulation != Formulation::Compact {
                bail!("plaquette is defined for the compact formulation");
            }
            let prov = Provenance::new("plaquette", &cfg, json!({"scan": scan}));
            match scan {
                Some(scales) => {
                    let Some(w) = &cfg.weave_matrix else {
                        bail!("--scan needs a weave (--basis weaved or --weave FILE)");
                    };
                    let g = cfg.one_g("plaquette --scan")?;
                    let rows = b_max_scan(cfg.lattice_spec, n_q, g, w, &scales, DenseLimits::default(), exec)?;
                    render(&prov, &rows)?
                }
                None => {
                    let rows = plaquette_study(
                        cfg.lattice_spec,
                        n_q,
                        &cfg.g,
                        cfg.weave_matrix.as_ref(),
                        DenseLimits::default(),
                        exec,
                    )?;
                    render(&prov, &rows)?
                }
            }
        }
        Command::Gatecount { target, np } => {
            let lattice_target = matches!(target, GateTarget::Magnetic | GateTarget::Electric | GateTarget::Step);
            let nps = match np {
                Some(_) if lattice_target => bail!("--np applies to the maximal-cos and single-cos targets only"),
                Some(v) => v,
                None => vec![cfg.lattice_spec.n_p()],
            };
            let mut points = Vec::new();
            for &n_p in &nps {
                for &n_q in &cfg.n_q {
                    for &g in &cfg.g {
                        for theta in cfg.policies() {
                            points.push(GatePoint { n_p, n_q, g, theta });
                        }
                    }
                }
            }
            let spec = cfg.model_spec();
            let mut rows = Vec::new();
            for &dt in &cfg.dt {
                rows.extend(gate_count_study(target, &spec, &points, dt, cfg.order, exec)?);
            }
            render(
                &Provenance::new("gatecount", &cfg, json!({"target": target, "np": nps})),
                &rows,
            )?
        }
        Command::L1 {
            b_max,
            min_qubits,
            max_qubits,
        } => {
            let mut points = Vec::new();
            for &n_q in &cfg.n_q {
                let mut n_p = 1usize;
                while n_p as u32 * n_q <= max_qubits {
                    if n_p as u32 * n_q >= min_qubits {
                        points.push((n_p, n_q));
                    }
                    n_p += 1;
                }
            }
            let rows = l1_study(&points, b_max, 24, exec)?;
            let opts = json!({"b_max": b_max, "min_qubits": min_qubits, "max_qubits": max_qubits});
            render(&Provenance::new("l1", &cfg, opts), &rows)?
        }
        Command::ProductScaling {
            np_max,
            theta_exp_max,
            max_r,
            table,
        } => {
            let n_q = cfg.one_nq("product-scaling")?;
            let g = cfg.one_g("product-scaling")?;
            let thetas: Vec<f64> = (0..=theta_exp_max as i32).map(|k| 2f64.powi(-k)).collect();
            let p = product_scaling(n_q, g, np_max, &thetas, max_r, exec)?;
            let opts = json!({"np_max": np_max, "theta_exp_max": theta_exp_max, "max_r": max_r, "table": table});
            let prov = Provenance::new("product-scaling", &cfg, opts);
            match (cfg.format, table.as_str()) {
                (config::Format::Json, _) => json_doc(&prov, &p)?,
                (_, "counts") => render(&prov, &p.counts)?,
                (_, "fits") => render(&prov, &fit_rows(&p))?,
                _ => render(&prov, &p.transitions)?,
            }
        }
        Command::Evolve { no_exact } => {
            let n_q = cfg.one_nq("evolve")?;
            let combos: Vec<_> = cfg
                .dt
                .iter()
                .flat_map(|&dt| cfg.policies().into_iter().map(move |p| (dt, p)))
                .collect();
            let rows = evolve_study(
                &cfg.model_spec(),
                n_q,
                &cfg.g,
                cfg.t,
                cfg.order,
                &combos,
                !no_exact,
                exec,
            )?;
            render(&Provenance::new("evolve", &cfg, json!({"exact": !no_exact})), &rows)?
        }
        Command::Export => {
            let n_q = cfg.one_nq("export")?;
            let g = cfg.one_g("export")?;
            let dt = cfg.one_dt("export")?;
            let theta = cfg.one_policy("export")?.theta(dt);
            let model = cfg.model_spec().build(n_q, g)?;
            let circuit = step_circuit(&model, &TrotterPlan::new(cfg.order, dt, 1, theta, theta)?)?;
            let c = gate_count(&circuit);
            eprintln!(
                "{} qubits: {} Rz, {} CNOT, {} H, {} CPhase, {} SWAP",
                circuit.width(),
                c.rz,
                c.cnot,
                c.h,
                c.cphase,
                c.swap
            );
            let text = to_qasm(&circuit);
            let (header, body) = text.split_at(text.find("qreg").expect("header precedes qreg"));
            let prov = Provenance::new("export", &cfg, json!({"theta_min": theta}));
            format!("{header}{}{body}", prov.lines("//")?).into_bytes()
        }
    };
    emit(&bytes, &cfg)
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
