use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use lattice_ortho::core1d::*;
use lattice_ortho::examples1d::*;
use lattice_ortho::fock::{stability_gap, verify, DEFAULT_DIM, STABILITY_STEP};
use lattice_ortho::lattice2d::*;
use lattice_ortho::zak::{zak_psi, zak_verify, KqBox, DEFAULT_ZAK_GRID};
use lattice_ortho::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{render_json, Checks, Outcome};

const BOUND_TABLE: [f64; 3] = [1.01497, 0.180341, 0.036256];
const PERTURBATIVE_NORMS: [f64; 3] = [0.99440, 0.99976, 0.99999];
const PERTURBATIVE_RESIDUALS: [f64; 2] = [0.00747, 0.00032];

/// Lattice parameters given as `2`, `2,3,4`, `2..4` or `2..=4` (ranges are inclusive).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LatticeList(pub Vec<u32>);

pub fn parse_l_list(s: &str) -> std::result::Result<LatticeList, String> {
    let bad = |_| format!("cannot read lattice list `{s}`");
    let out: Vec<u32> = if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(bad)?;
        let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(bad)?;
        (lo..=hi).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(bad)).collect::<std::result::Result<_, _>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(format!("lattice list `{s}` must be nonempty with every L >= 1"));
    }
    Ok(LatticeList(out))
}

fn config<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("plain arguments serialize")
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    Box,
    Dyadic,
}

#[derive(Args, Debug, Serialize)]
pub struct Ortho1dArgs {
    #[arg(long, value_enum, default_value = "box")]
    pub example: Example,
    /// Box width.
    #[arg(long, default_value_t = 1.5)]
    pub a: f64,
    /// Dyadic truncation half-width.
    #[arg(long = "J", default_value_t = DEFAULT_DILATION_HALF_WIDTH)]
    #[serde(rename = "J")]
    pub j: usize,
    /// Overlap sequence as JSON `{"J", "re", "im"}`; replaces --example.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Divide the overlaps by a_0 first.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long = "M", default_value_t = DEFAULT_GRID)]
    #[serde(rename = "M")]
    pub grid: usize,
    #[arg(long = "K", default_value_t = DEFAULT_HALF_WIDTH)]
    #[serde(rename = "K")]
    pub half_width: usize,
    #[arg(long, default_value_t = DEFAULT_GRAM_RADIUS)]
    pub n_max: usize,
}

fn density_at(a: &OverlapSequence1D, p: f64) -> f64 {
    let h = a.half_width() as i64;
    (-h..=h).map(|j| (a.get(j) * Complex64::from_polar(1.0, p * j as f64)).re).sum()
}

/// `mean(1/α)` for the box when the support radius is at most one.
fn box_sum_sq_closed_form(a: f64) -> Option<f64> {
    if a <= 1.0 {
        Some(1.0 / a)
    } else if a < 2.0 {
        Some(1.0 / (a * a - 4.0 * (a - 1.0) * (a - 1.0)).sqrt())
    } else {
        None
    }
}

pub fn ortho1d(args: &Ortho1dArgs, scale: f64) -> Result<Outcome> {
    let seq = match (&args.input, args.example) {
        (Some(path), _) => OverlapSequence1D::from_json_str(&std::fs::read_to_string(path)?)?,
        (None, Example::Box) => box_overlaps(BoxSeed::new(args.a)?),
        (None, Example::Dyadic) => dilation_overlaps(DilationSeed::new(args.j)?),
    };
    let opts = PipelineOptions {
        grid_size: args.grid,
        half_width: args.half_width,
        n_max: args.n_max,
        normalize: args.normalize,
    };
    let rep = run_pipeline(&seq, opts)?;
    let used = if args.normalize { seq.normalized() } else { seq.clone() };
    let mut checks = Checks::new(scale);
    checks.close("gram_center", rep.gram.center().re, 1.0, 1e-8);
    checks.at_most("gram_max_off_center", rep.gram.max_off_center(), 1e-8);
    checks.close("sum_rule", (rep.sum_rule - 1.0).norm(), 0.0, 1e-8);
    let mut extra = serde_json::Map::new();
    extra.insert("alpha_at_0".into(), json!(density_at(&used, 0.0)));
    extra.insert("alpha_at_pi".into(), json!(density_at(&used, PI)));
    if args.input.is_none() {
        match args.example {
            Example::Box => {
                if let Some(raw) = box_sum_sq_closed_form(args.a) {
                    let want = if args.normalize { raw * args.a } else { raw };
                    extra.insert("sum_sq_c_closed_form".into(), json!(want));
                    checks.close("sum_sq_c", rep.sum_sq_c, want, 1e-6);
                }
                if args.a == 1.5 && !args.normalize {
                    let c5 = rep.coefficients.c.get(5).norm();
                    let d5 = rep.coefficients.d.get(5).norm();
                    checks.within("abs_c5", c5, 5e-4, 2e-3);
                    checks.within("abs_d5", d5, 1e-4, 4e-4);
                }
            }
            Example::Dyadic => {
                checks.close("alpha_at_0", density_at(&used, 0.0), 5.82843, 5e-5);
                checks.close("alpha_at_pi", density_at(&used, PI), 0.17157, 5e-5);
                checks.close("sum_sq_c", rep.sum_sq_c, 3.0, 1e-6);
            }
        }
    }
    let mut report = config(&rep);
    if let Value::Object(m) = &mut report {
        m.extend(extra);
    }
    Ok(Outcome {
        command: "ortho1d",
        config: config(args),
        report,
        checks,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct Diverge1dArgs {
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    /// Offset grid sizes for the partial sums.
    #[arg(long = "M", value_delimiter = ',', default_values_t = [256usize, 1024, 4096])]
    #[serde(rename = "M")]
    pub grids: Vec<usize>,
}

pub fn diverge1d(args: &Diverge1dArgs, scale: f64) -> Result<Outcome> {
    let seq = box_overlaps(BoxSeed::new(args.a)?);
    let rows = divergence_probe(&seq, &args.grids)?;
    let finest = *args.grids.iter().max().unwrap_or(&DEFAULT_GRID);
    let positivity = check_positivity(&spectral_density(&seq, finest.max(4 * (2 * seq.half_width() + 1)), false)?)?;
    let mut checks = Checks::new(scale);
    checks.flag(
        "partial_sums_increase",
        rows.windows(2).all(|w| w[1].sum_sq > w[0].sum_sq),
        "Σ|c|² grows with M",
    );
    let last = rows.last().map_or(0.0, |r| r.sum_sq);
    checks.within("partial_sum_exceeds_10", last, 10.0, f64::INFINITY);
    checks.flag(
        "density_has_zero",
        positivity.status == PositivityStatus::HasZero,
        format!("status {:?}", positivity.status),
    );
    checks.close("zero_location", positivity.argmin, PI, 1e-3);
    Ok(Outcome {
        command: "diverge1d",
        config: config(args),
        report: json!({ "rows": rows, "positivity": positivity }),
        checks,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct Coherent2dArgs {
    #[arg(long = "L", default_value_t = 2)]
    #[serde(rename = "L")]
    pub l: u32,
    #[arg(long = "K", default_value_t = DEFAULT_COEFF_RADIUS)]
    #[serde(rename = "K")]
    pub radius: usize,
    #[arg(long = "M", default_value_t = DEFAULT_COEFF_GRID)]
    #[serde(rename = "M")]
    pub grid: usize,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Grid for the F deviation bound.
    #[arg(long, default_value_t = DEFAULT_BOUND_GRID)]
    pub bound_grid: usize,
    /// Proceed on the critical lattice L = 1.
    #[arg(long)]
    pub allow_critical: bool,
}

fn critical_refusal(command: &'static str, cfg: Value, scale: f64) -> Result<Outcome> {
    let mut checks = Checks::new(scale);
    checks.flag(
        "critical_lattice",
        false,
        "F has zero at (π,π); pass --allow-critical to proceed",
    );
    Ok(Outcome {
        command,
        config: cfg,
        report: json!({
            "L": 1,
            "F_at_pi_pi": f_theta(PI, PI, 1)?,
            "F_direct_at_pi_pi": f_direct(PI, PI, 1, DEFAULT_SUM_RADIUS),
        }),
        checks,
    })
}

pub fn coherent2d(args: &Coherent2dArgs, scale: f64) -> Result<Outcome> {
    if args.l == 1 && !args.allow_critical {
        return critical_refusal("coherent2d", config(args), scale);
    }
    let opts = ExtractionOptions {
        grid_size: args.grid,
        radius: args.radius,
        allow_critical: args.allow_critical,
    };
    let (set, rep) = run_exact_2d(args.l, opts, args.n_max)?;
    let bound = f_bound_report(args.l, args.bound_grid)?;
    let mut checks = Checks::new(scale);
    checks.flag("convergent", !set.non_convergent, "coefficients converge on this lattice");
    checks.at_most("gram_max_off_center", rep.max_off_center, 1e-8);
    checks.close("norm_sq", rep.norm_sq, 1.0, 1e-8);
    checks.close("sum_rule", (rep.sum_rule - 1.0).norm(), 0.0, 1e-8);
    checks.close("dual_parseval", rep.dual_parseval, 1.0, 1e-8);
    checks.flag("f_bound_certified", bound.certified, "grid sup of |F - 1| within the theta bound");
    if let Some(&want) = BOUND_TABLE.get(args.l as usize - 1) {
        checks.close("f_bound", bound.bound, want, 1e-5);
    }
    Ok(Outcome {
        command: "coherent2d",
        config: config(args),
        report: json!({ "coefficients": set, "diagnostics": rep, "f_bound": bound }),
        checks,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct FcheckArgs {
    /// Lattices to check, e.g. `1..3`.
    #[arg(long = "L", default_value = "1..3", value_parser = parse_l_list)]
    #[serde(rename = "L")]
    pub ls: LatticeList,
    #[arg(long = "M", default_value_t = DEFAULT_BOUND_GRID)]
    #[serde(rename = "M")]
    pub grid: usize,
}

pub fn fcheck(args: &FcheckArgs, scale: f64) -> Result<Outcome> {
    let mut checks = Checks::new(scale);
    let mut rows = Vec::new();
    for &l in &args.ls.0 {
        let bound = f_bound_report(l, args.grid)?;
        let routes = three_route_report(l, args.grid)?;
        if let Some(&want) = BOUND_TABLE.get(l as usize - 1) {
            checks.close(format!("L{l}.f_bound"), bound.bound, want, 1e-5);
        }
        checks.flag(format!("L{l}.f_bound_certified"), bound.certified, "grid sup of |F - 1| within the theta bound");
        checks.at_most(format!("L{l}.theta_route"), routes.max_theta_diff, 1e-10);
        checks.at_most(format!("L{l}.phase_product_route"), routes.max_phase_product_diff, 1e-10);
        rows.push(json!({ "L": l, "f_bound": bound, "routes": routes }));
    }
    let f1 = f_direct(PI, PI, 1, DEFAULT_SUM_RADIUS);
    checks.close("F1_at_pi_pi", f1, 0.0, 1e-10);
    let refused = matches!(
        direct_coefficients_2d(1, ExtractionOptions::default()),
        Err(Error::CriticalLattice)
    );
    checks.flag("critical_lattice_refused", refused, "L = 1 needs an explicit override");
    Ok(Outcome {
        command: "fcheck",
        config: config(args),
        report: json!({ "lattices": rows, "F1_at_pi_pi": f1 }),
        checks,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct Perturb2dArgs {
    #[arg(long = "L", default_value = "2..4", value_parser = parse_l_list)]
    #[serde(rename = "L")]
    pub ls: LatticeList,
    #[arg(long = "M", default_value_t = DEFAULT_BOUND_GRID)]
    #[serde(rename = "M")]
    pub grid: usize,
}

pub fn perturb2d(args: &Perturb2dArgs, scale: f64) -> Result<Outcome> {
    let mut checks = Checks::new(scale);
    let mut rows = Vec::new();
    for &l in &args.ls.0 {
        let d = perturbative_diagnostics_on(l, args.grid)?;
        let eps = (-PI * l as f64 / 2.0).exp();
        let leading = if l % 2 == 0 { 0.25 } else { 4.25 } * eps.powi(3);
        checks.flag(format!("L{l}.conclusive"), !d.inconclusive, "expansion parameter small enough");
        if let Some(&want) = (l as usize).checked_sub(2).and_then(|i| PERTURBATIVE_NORMS.get(i)) {
            checks.close(format!("L{l}.norm_sq"), d.norm_sq, want, 5e-5);
        }
        checks.at_most(format!("L{l}.inverse_residual_bound"), d.inverse_residual, d.inverse_residual_bound / scale + 1e-15);
        if let Some(&want) = (l as usize).checked_sub(2).and_then(|i| PERTURBATIVE_RESIDUALS.get(i)) {
            checks.close(format!("L{l}.inverse_residual"), d.inverse_residual, want, 5e-5);
        }
        match l {
            2 => checks.close("L2.neighbor_overlap", d.neighbor_overlap, 0.00016, 5e-5),
            3 => checks.at_most("L3.neighbor_overlap", d.neighbor_overlap, 2e-6),
            _ => {}
        }
        let mut row = config(&d);
        if let Value::Object(m) = &mut row {
            m.insert("neighbor_overlap_leading_order".into(), json!(leading));
        }
        rows.push(row);
    }
    Ok(Outcome {
        command: "perturb2d",
        config: config(args),
        report: json!({ "rows": rows }),
        checks,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct BreakdownArgs {
    #[arg(long = "L", default_value_t = 1)]
    #[serde(rename = "L")]
    pub l: u32,
    #[arg(long = "M", value_delimiter = ',', default_values_t = [32usize, 64, 128, 256])]
    #[serde(rename = "M")]
    pub grids: Vec<usize>,
}

pub fn breakdown(args: &BreakdownArgs, scale: f64) -> Result<Outcome> {
    let rows = l1_breakdown_report(args.l, &args.grids)?;
    let mut checks = Checks::new(scale);
    if args.l == 1 {
        checks.flag(
            "sum_sq_grows",
            rows.windows(2).all(|w| w[1].sum_sq > w[0].sum_sq),
            "Σ|c|² grows with M",
        );
        checks.flag(
            "l1_norm_grows",
            rows.windows(2).all(|w| w[1].l1_norm > w[0].l1_norm),
            "Σ|c| grows with M",
        );
        checks.flag(
            "min_density_falls",
            rows.windows(2).all(|w| w[1].min_density < w[0].min_density),
            "sampled minimum of F approaches zero",
        );
    } else {
        let spread = rows.windows(2).map(|w| (w[1].sum_sq - w[0].sum_sq).abs()).fold(0.0, f64::max);
        checks.at_most("sum_sq_stable", spread, 1e-8);
    }
    Ok(Outcome {
        command: "breakdown",
        config: config(args),
        report: json!({ "L": args.l, "rows": rows }),
        checks,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct FockVerifyArgs {
    #[arg(long = "L", default_value_t = 2)]
    #[serde(rename = "L")]
    pub l: u32,
    #[arg(long = "N", default_value_t = DEFAULT_DIM)]
    #[serde(rename = "N")]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub n_max: usize,
    /// Extra dimension for the truncation stability check; 0 skips it.
    #[arg(long, default_value_t = STABILITY_STEP)]
    pub stability_step: usize,
}

pub fn fock_verify(args: &FockVerifyArgs, scale: f64) -> Result<Outcome> {
    if args.l == 1 {
        return critical_refusal("fock-verify", config(args), scale);
    }
    let set = CoefficientSet2D::extract(args.l, ExtractionOptions::default())?;
    let rep = verify(&set, args.dim, args.n_max)?;
    let mut checks = Checks::new(scale);
    checks.at_most("eigen_residual", rep.max_eigen_residual, 1e-5);
    checks.at_most("uncertainty_gap", rep.max_uncertainty_gap, 1e-5);
    checks.at_most("gram_diff", rep.max_gram_diff, 1e-6);
    let mut stability = Value::Null;
    if args.stability_step > 0 {
        let wider = verify(&set, args.dim + args.stability_step, args.n_max)?;
        let gap = stability_gap(&rep, &wider)?;
        checks.at_most("stability_gap", gap, 1e-8);
        stability = json!({ "N": args.dim + args.stability_step, "gap": gap });
    }
    Ok(Outcome {
        command: "fock-verify",
        config: config(args),
        report: json!({ "verify": rep, "stability": stability }),
        checks,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct ZakVerifyArgs {
    #[arg(long = "L", default_value_t = 2)]
    #[serde(rename = "L")]
    pub l: u32,
    #[arg(long, default_value_t = DEFAULT_ZAK_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = 2)]
    pub n_max: usize,
    /// Lattices for the incompleteness witness.
    #[arg(long, default_value = "2..4", value_parser = parse_l_list)]
    pub witness_l: LatticeList,
    /// Also write the transformed generator here (CSV rows or a JSON grid, per --format).
    #[arg(long)]
    pub sample_out: Option<PathBuf>,
}

pub fn zak_verify_cmd(args: &ZakVerifyArgs, scale: f64, csv: bool) -> Result<Outcome> {
    if args.l == 1 {
        return critical_refusal("zak-verify", config(args), scale);
    }
    let rep = zak_verify(args.l, args.grid, args.n_max, &args.witness_l.0)?;
    let mut checks = Checks::new(scale);
    checks.close("vacuum_resolution", rep.vacuum_resolution, 1.0, 1e-6);
    checks.close("psi_resolution", rep.psi_resolution, 1.0, 1e-6);
    checks.at_most("orthogonality", rep.max_orthogonality_error, 1e-4);
    checks.close(
        "vacuum_neighbor_integral",
        rep.vacuum_neighbor_integral.re,
        rep.vacuum_neighbor_overlap,
        1e-10,
    );
    for w in &rep.witnesses {
        if w.l > 1 {
            checks.at_most(format!("L{}.witness", w.l), w.max_modulus, 1e-10);
        }
    }
    for p in &rep.profiles {
        checks.close(format!("profile_j{}.integral", p.j), p.integral, 1.0, 1e-10);
    }
    if let Some(path) = &args.sample_out {
        let kq_box = KqBox::for_lattice(args.l, args.grid)?;
        let c = CoefficientSet2D::extract(args.l, ExtractionOptions::default())?.c;
        let psi = zak_psi(&c, &kq_box, kq_box.required_tail())?;
        if csv {
            psi.write_csv(std::fs::File::create(path)?)?;
        } else {
            std::fs::write(path, render_json(&psi.to_json_grid()))?;
        }
    }
    Ok(Outcome {
        command: "zak-verify",
        config: config(args),
        report: config(&rep),
        checks,
    })
}
