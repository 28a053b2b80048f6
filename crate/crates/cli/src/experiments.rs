//! One runner per experiment kind. Each returns summary results and CSV tables;
//! nothing in a table depends on wall time or thread count.

use fiolab::applicator::{apply_decomposed, apply_fio, FioOperator};
use fiolab::decompose::{littlewood_paley, sss_frame};
use fiolab::hyperbolic::{cauchy_second_order, energy, half_wave, sobolev_loss_sweep, CauchyData};
use fiolab::normest::{
    ce2_profile, gaussian_amplitude, kernel_decay_profile, low_frequency_kernel, opnorm_lpw, stationary_decay,
    substitution_check, threshold_sweep, Commutator, TestFamily, Verdict,
};
use fiolab::weights::{ap_constant, ap_constant_a1, bmo_norm, power_weight_class, truncated_log, BallFamily, Weight};
use fiolab::{Diffeo, Grid, OrderParams, PhaseSpec, SampledField, Side, SymbolSpec};
use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::RunError;

pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }
}

#[derive(Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub tables: Vec<Table>,
}

impl Outcome {
    fn put<V: Into<Value>>(&mut self, key: &str, v: V) {
        self.results.insert(key.into(), v.into());
    }
}

pub fn run(cfg: &Config) -> Result<Outcome, RunError> {
    match cfg.kind.as_str() {
        "apply" => apply(cfg),
        "kernel" => kernel(cfg),
        "sweep" => sweep(cfg),
        "ce2" => ce2(cfg),
        "weights" => weights(cfg),
        "bmo" => bmo(cfg),
        "stationary" => stationary(cfg),
        "wave" => wave(cfg),
        "commutator" => commutator(cfg),
        "substitution" => substitution(cfg),
        other => Err(RunError::Validation(format!("no runner for kind {other:?}"))),
    }
}

fn grid(cfg: &Config) -> Result<Grid, RunError> {
    Ok(Grid::new(cfg.get("n")?, cfg.get("N")?, cfg.get("L")?)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, RunError> {
    serde_json::to_value(v).map_err(|e| RunError::Other(e.to_string()))
}

fn f(v: f64) -> String {
    v.to_string()
}

fn phase(cfg: &Config) -> Result<PhaseSpec, RunError> {
    let t: f64 = cfg.get("t")?;
    Ok(match cfg.choice("phase", &["linear", "wave", "shifted", "diffeo_scale", "diffeo_sine"])? {
        "linear" => PhaseSpec::linear(),
        "wave" => PhaseSpec::wave(t),
        "shifted" => PhaseSpec::shifted(t),
        "diffeo_scale" => PhaseSpec::diffeo(Diffeo::Scale(cfg.get("kappa")?)),
        _ => PhaseSpec::diffeo(Diffeo::SinePerturbed(cfg.get("kappa")?)),
    })
}

fn gaussian(g: Grid, center: f64, width: f64) -> SampledField {
    SampledField::from_physical_real(g, move |x| {
        (-x.iter().map(|v| (v - center) * (v - center)).sum::<f64>() / (2.0 * width * width)).exp()
    })
}

fn apply(cfg: &Config) -> Result<Outcome, RunError> {
    let g = grid(cfg)?;
    let m: f64 = cfg.get("m")?;
    let order = OrderParams::new(m, cfg.get("rho")?, cfg.get("delta")?)?;
    let amp = match cfg.choice("amplitude", &["one", "bessel", "cutoff_power"])? {
        "one" => SymbolSpec::one(),
        "bessel" => SymbolSpec::bessel_power(m).declared_as(order),
        _ => SymbolSpec::cutoff_times_power(m)?,
    };
    let identity = cfg.choice("amplitude", &["one"]).is_ok() && cfg.choice("phase", &["linear"]).is_ok();
    let op = FioOperator::new(amp, phase(cfg)?, g);
    let u = gaussian(g, cfg.get("center")?, cfg.get("width")?);
    let v = apply_fio(&op, &u)?;
    let mut out = Outcome::default();
    out.put("input_norm", u.norm_l2());
    out.put("output_norm", v.norm_l2());
    out.put("norm_ratio", v.norm_l2() / u.norm_l2());
    if identity {
        let max_error = v.sub(&u)?.max_abs();
        out.put("identity_check", json!({ "max_error": max_error, "pass": max_error <= 1e-10 }));
    }
    if cfg.get::<bool>("decomposed")? {
        let j_max: usize = cfg.get("j_max")?;
        let dp = littlewood_paley(&g, j_max)?;
        let frames = (1..=j_max).map(|j| sss_frame(2f64.powi(-(j as i32)), g.dim())).collect::<Result<Vec<_>, _>>()?;
        let (w, diag) = apply_decomposed(&op, &u, &dp, &frames)?;
        out.put("decomposed_relative_error", w.relative_l2_error(&v)?);
        out.put("decay_slope", diag.decay_slope.map_or(Value::Null, Value::from));
        let mut t = Table::new("pieces", &["j", "nu", "norm"]);
        for p in &diag.pieces {
            let idx = |o: Option<usize>| o.map_or(String::new(), |v| v.to_string());
            t.push([p.j.map_or("tail".into(), |j| j.to_string()), idx(p.nu), f(p.norm)]);
        }
        out.tables.push(t);
    }
    let mut t = Table::new("output", &["index", "x", "re", "im"]);
    for (k, val) in v.values().iter().enumerate() {
        let x: Vec<String> = g.point(k).iter().map(|c| f(*c)).collect();
        t.push([k.to_string(), x.join(" "), f(val.re), f(val.im)]);
    }
    out.tables.push(t);
    Ok(out)
}

fn kernel(cfg: &Config) -> Result<Outcome, RunError> {
    let b = SymbolSpec::cutoff_times_power(cfg.get("power")?)?;
    let (big, half, mu, y_max): (usize, f64, f64, f64) = (cfg.get("N")?, cfg.get("L")?, cfg.get("mu")?, cfg.get("y_max")?);
    let mut grids = vec![Grid::new(1, big, half)?];
    if cfg.get::<bool>("refine")? {
        grids.push(Grid::new(1, 2 * big, 2.0 * half)?);
    }
    let mut out = Outcome::default();
    let mut sups = Vec::new();
    let mut t = Table::new("kernel", &["N", "y", "re", "im", "weighted"]);
    for g in &grids {
        let rep = kernel_decay_profile(&b, &[0.0], mu, g, y_max)?;
        let k = low_frequency_kernel(&b, &[0.0], g)?;
        for (i, v) in k.iter().enumerate() {
            let y = g.point(i)[0];
            if y.abs() <= y_max {
                let wt = (1.0 + y * y).sqrt().powf(1.0 + mu) * v.norm();
                t.push([g.points_per_axis().to_string(), f(y), f(v.re), f(v.im), f(wt)]);
            }
        }
        sups.push(rep);
    }
    out.put("mu", mu);
    if let [a, b] = sups.as_slice() {
        let (a, b) = (a.weighted_sup, b.weighted_sup);
        out.put("relative_change", (a - b).abs() / a.max(b));
    }
    out.put("profiles", to_value(&sups)?);
    out.tables.push(t);
    Ok(out)
}

fn sweep(cfg: &Config) -> Result<Outcome, RunError> {
    let sizes: Vec<usize> = cfg.list("sizes")?;
    let base = Grid::new(cfg.get("n")?, sizes[0], cfg.get("L")?)?;
    let fam = TestFamily::standard(cfg.get("seed")?, cfg.get("count")?);
    let p: f64 = cfg.get("p")?;
    let table = threshold_sweep(&phase(cfg)?, p, &cfg.list("m")?, &sizes, &base, &fam)?;
    let mut out = Outcome::default();
    out.put("m_p", (base.dim() as f64 - 1.0) * (1.0 / p - 0.5).abs());
    out.put("summaries", to_value(&table.summaries)?);
    let mut t = Table::new("growth", &["m", "N", "norm", "maximizer", "exponent", "verdict"]);
    for r in &table.rows {
        let s = table.summary(r.m).expect("every row has a summary");
        t.push([f(r.m), r.points_per_axis.to_string(), f(r.norm), r.maximizer.clone(), f(s.exponent), s.verdict.as_str().into()]);
    }
    out.tables.push(t);
    Ok(out)
}

fn ce2(cfg: &Config) -> Result<Outcome, RunError> {
    let g = Grid::new(1, cfg.get("N")?, cfg.get("L")?)?;
    let r = ce2_profile(cfg.get("m")?, cfg.get("mu")?, cfg.get("b")?, cfg.get("p")?, &g)?;
    let mut out = Outcome::default();
    out.put("claim_slope", r.claim_slope);
    out.put("slope", r.slope);
    out.put("raw_slope", r.raw_slope);
    out.put("f_mu_finite", r.f_mu_finite);
    out.put("tf_finite", r.tf_finite);
    let mut t = Table::new("ce2", &["m", "mu", "claim_slope", "slope", "raw_slope", "window_lo", "window_hi"]);
    t.push([f(r.m), f(r.mu), f(r.claim_slope), f(r.slope), f(r.raw_slope), f(r.window.0), f(r.window.1)]);
    out.tables.push(t);
    let mut s = Table::new("ce2_samples", &["r", "value"]);
    for (x, v) in &r.samples {
        s.push([f(*x), f(*v)]);
    }
    out.tables.push(s);
    Ok(out)
}

fn weights(cfg: &Config) -> Result<Outcome, RunError> {
    let g = grid(cfg)?;
    let alpha: f64 = cfg.get("alpha")?;
    let w = match cfg.choice("weight", &["power", "truncated_power", "log", "unit"])? {
        "power" => Weight::power(alpha),
        "truncated_power" => Weight::truncated_power(alpha),
        "log" => Weight::log(),
        _ => Weight::unit(),
    };
    let p: f64 = cfg.get("p")?;
    let balls = BallFamily::dyadic(&g, cfg.get("r_max")?, cfg.get("levels")?, 1.0)?;
    let rep = if p == 1.0 { ap_constant_a1(&w, &balls, &g)? } else { ap_constant(&w, p, &balls, &g)? };
    let mut out = Outcome::default();
    out.put("weight", w.name());
    out.put("value", rep.value);
    out.put("trend", format!("{:?}", rep.trend).to_lowercase());
    if cfg.choice("weight", &["power"]).is_ok() {
        out.put("analytic_class", power_weight_class(alpha, p, g.dim()));
    }
    let mut t = Table::new("ap_origin", &["radius", "value"]);
    for (r, v) in &rep.origin {
        t.push([f(*r), f(*v)]);
    }
    out.tables.push(t);
    Ok(out)
}

fn bmo(cfg: &Config) -> Result<Outcome, RunError> {
    let balls = BallFamily::dyadic_at_origin(1, cfg.get("r_max")?, cfg.get("levels")?)?;
    let rep = match cfg.choice("function", &["truncated_log", "log", "sign"])? {
        "truncated_log" => bmo_norm(truncated_log, &balls)?,
        "log" => bmo_norm(|x: &[f64]| x[0].abs().ln(), &balls)?,
        _ => bmo_norm(|x: &[f64]| x[0].signum(), &balls)?,
    };
    let mut out = Outcome::default();
    out.put("value", rep.value);
    out.put("trend", format!("{:?}", rep.trend).to_lowercase());
    let mut t = Table::new("bmo", &["radius", "oscillation"]);
    for (r, v) in &rep.by_radius {
        t.push([f(*r), f(*v)]);
    }
    out.tables.push(t);
    Ok(out)
}

fn stationary(cfg: &Config) -> Result<Outcome, RunError> {
    let n: usize = cfg.get("n")?;
    let lo: f64 = cfg.get("lambda_min")?;
    let count: usize = cfg.get("lambda_count")?;
    let lambdas: Vec<f64> = (0..count).map(|k| lo * 2f64.powi(k as i32)).collect();
    let xs: Vec<Vec<f64>> = [0.0, 0.5, -1.0].iter().map(|&v| vec![v; n]).collect();
    let rep = stationary_decay(&PhaseSpec::quadratic(), &gaussian_amplitude(), &lambdas, &xs, cfg.get("support")?, cfg.get("mu")?)?;
    let mut out = Outcome::default();
    out.put("slope", rep.slope);
    out.put("expected", rep.expected);
    let mut t = Table::new("stationary", &["lambda", "max_abs"]);
    for (l, m) in rep.lambdas.iter().zip(&rep.maxima) {
        t.push([f(*l), f(*m)]);
    }
    out.tables.push(t);
    Ok(out)
}

fn wave(cfg: &Config) -> Result<Outcome, RunError> {
    let g = grid(cfg)?;
    let t: f64 = cfg.get("t")?;
    let f0 = gaussian(g, 0.0, cfg.get("width")?);
    let f1 = SampledField::zeros(g, Side::Physical);
    let data = CauchyData::new(f0.clone(), f1.clone(), t, fiolab::hyperbolic::T_MAX_DEFAULT)?;
    let u = cauchy_second_order(&data)?;
    let e0 = energy(&CauchyData::new(f0.clone(), f1, 0.0, fiolab::hyperbolic::T_MAX_DEFAULT)?)?;
    let e1 = energy(&data)?;
    let hw = half_wave(&f0, t)?;
    let mut out = Outcome::default();
    out.put("unitarity_error", (hw.norm_l2() - f0.norm_l2()).abs() / f0.norm_l2());
    out.put("energy_drift", (e1 / e0 - 1.0).abs());
    let sizes: Vec<usize> = cfg.list("sizes")?;
    let grids = sizes.iter().map(|&s| Grid::new(g.dim(), s, g.half_width())).collect::<Result<Vec<_>, _>>()?;
    let fam = TestFamily::gaussian(cfg.get("seed")?, cfg.get("count")?);
    let sw = sobolev_loss_sweep(cfg.get("p")?, cfg.get("s")?, t, &fam, &grids)?;
    out.put("m_p", sw.m_p);
    out.put("eps", sw.eps);
    out.put("shifted_verdict", sw.shifted_verdict.as_str());
    out.put("unshifted_verdict", sw.unshifted_verdict.as_str());
    let mut s = Table::new("sobolev", &["N", "shifted", "unshifted"]);
    for r in &sw.rows {
        s.push([r.points_per_axis.to_string(), f(r.shifted), f(r.unshifted)]);
    }
    out.tables.push(s);
    let mut tab = Table::new("solution", &["index", "x", "re", "im"]);
    for (k, v) in u.values().iter().enumerate() {
        let x: Vec<String> = g.point(k).iter().map(|c| f(*c)).collect();
        tab.push([k.to_string(), x.join(" "), f(v.re), f(v.im)]);
    }
    out.tables.push(tab);
    Ok(out)
}

fn commutator(cfg: &Config) -> Result<Outcome, RunError> {
    let m: f64 = cfg.get("m")?;
    let t: f64 = cfg.get("t")?;
    let p: f64 = cfg.get("p")?;
    let half: f64 = cfg.get("L")?;
    let sizes: Vec<usize> = cfg.list("sizes")?;
    let fam = TestFamily::gaussian(cfg.get("seed")?, cfg.get("count")?);
    let which = cfg.choice("b", &["truncated_log", "sin", "constant"])?;
    let b = move |x: &[f64]| match which {
        "truncated_log" => truncated_log(x),
        "sin" => x[0].sin(),
        _ => 1.0,
    };
    let mut norms = Vec::new();
    let mut tab = Table::new("commutator", &["N", "norm", "maximizer"]);
    for &big in &sizes {
        let g = Grid::new(1, big, half)?;
        let op = FioOperator::new(SymbolSpec::bessel_power(m), PhaseSpec::wave(t), g);
        let rep = opnorm_lpw(&Commutator::new(b, &op), p, &Weight::unit(), &fam)?;
        tab.push([big.to_string(), f(rep.value), rep.maximizer.clone()]);
        norms.push(rep.value);
    }
    let mut out = Outcome::default();
    out.put("norms", norms.clone());
    out.put("ratios", norms.windows(2).map(|w| w[1] / w[0]).collect::<Vec<f64>>());
    out.put("verdict", Verdict::from_values(&norms).as_str());
    out.tables.push(tab);
    Ok(out)
}

fn substitution(cfg: &Config) -> Result<Outcome, RunError> {
    let g = grid(cfg)?;
    let c: f64 = cfg.get("c")?;
    let map: fn(&[f64]) -> Vec<f64> = match cfg.choice("map", &["scale", "sine", "identity"])? {
        "scale" => |x| x.iter().map(|v| 2.0 * v).collect(),
        "sine" => |x| x.iter().map(|v| v + 0.25 * v.sin()).collect(),
        _ => |x| x.to_vec(),
    };
    let rep = substitution_check(&map, c, &g)?;
    let mut out = Outcome::default();
    out.put("max_density", rep.max_density);
    out.put("bound", rep.bound);
    out.put("pairs_checked", rep.pairs_checked);
    out.put("within_bound", rep.max_density <= rep.bound);
    let mut t = Table::new("substitution", &["test", "relative_error"]);
    for (i, e) in rep.formula_errors.iter().enumerate() {
        t.push([i.to_string(), f(*e)]);
    }
    out.tables.push(t);
    Ok(out)
}
