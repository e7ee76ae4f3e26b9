//! Parameter sweep over the coupling ratio `R` and scaled coupling `K`.
//!
//! For every grid point the time maximizing `P(−)` is located (uniform
//! coarse scan, then golden-section refinement of the best few local
//! maxima) and the concurrence of the normalized minus branch is evaluated
//! at that time. Records come back in row-major `(R, K)` order whatever the
//! worker count.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::matquant::{DensityMatrix, Ket};
use crate::protocol::{run_protocol, BranchEvaluator, ProtocolParams};
use crate::switch::Sign;
use crate::tolerance;

/// Header of the sweep CSV file.
pub const CSV_HEADER: &str = "r,k,t_star,p_star,concurrence";

/// Number of coarse local maxima handed to golden-section refinement.
const REFINED_CANDIDATES: usize = 8;

/// Upper end of the time search interval `(0, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Horizon {
    /// `scale · 8π / min(|ω_z|, Θ)`, evaluated per grid point.
    Auto { scale: f64 },
    Fixed(f64),
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon::Auto { scale: 1.0 }
    }
}

/// `8π / min(|ω_z|, Θ)`: several periods of the slowest oscillation in `P(−)`.
pub fn default_horizon(params: &ProtocolParams) -> f64 {
    8.0 * PI / params.omega_z.abs().min(params.theta())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub omega_z: f64,
    pub r_range: (f64, f64),
    pub k_range: (f64, f64),
    /// Points per axis.
    pub grid_n: usize,
    pub horizon: Horizon,
    /// Coarse time-grid resolution over the whole horizon.
    pub coarse_n: usize,
    /// Worker threads; `None` uses the global rayon pool. Never affects output.
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            omega_z: 0.5,
            r_range: (0.5, 5.0),
            k_range: (0.5, 5.0),
            grid_n: 64,
            horizon: Horizon::default(),
            coarse_n: 8192,
            workers: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.omega_z.is_finite() && self.omega_z != 0.0) {
            return bad("omega_z must be finite and nonzero");
        }
        for (name, (lo, hi)) in [("r_range", self.r_range), ("k_range", self.k_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidConfig(format!("{name} must be a nonempty interval")));
            }
        }
        if self.grid_n < 2 {
            return bad("grid_n must be at least 2");
        }
        if self.coarse_n < 2 {
            return bad("coarse_n must be at least 2");
        }
        match self.horizon {
            Horizon::Auto { scale } if !(scale.is_finite() && scale > 0.0) => {
                return bad("horizon scale must be positive")
            }
            Horizon::Fixed(t) if !(t.is_finite() && t > 0.0) => return bad("t_max must be positive"),
            _ => {}
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1");
        }
        Ok(())
    }

    fn axis(&self, (lo, hi): (f64, f64), i: usize) -> f64 {
        lo + (hi - lo) * i as f64 / (self.grid_n - 1) as f64
    }

    pub fn r_values(&self) -> Vec<f64> {
        (0..self.grid_n).map(|i| self.axis(self.r_range, i)).collect()
    }

    pub fn k_values(&self) -> Vec<f64> {
        (0..self.grid_n).map(|i| self.axis(self.k_range, i)).collect()
    }

    pub fn horizon_for(&self, params: &ProtocolParams) -> f64 {
        match self.horizon {
            Horizon::Auto { scale } => scale * default_horizon(params),
            Horizon::Fixed(t) => t,
        }
    }
}

/// One grid point of the sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRecord {
    pub r: f64,
    pub k: f64,
    /// `None` marks a degenerate point where `P(−)` vanishes on the whole grid.
    pub t_star: Option<f64>,
    pub p_star: f64,
    pub concurrence_at_t_star: f64,
}

/// Result of maximizing a probability over time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub t_star: f64,
    pub p_star: f64,
    /// Best value seen on the coarse grid.
    pub coarse_best: f64,
}

/// Maximizes a unimodal `f` on `[a, b]` until the bracket is narrower than `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes `f` over `(0, horizon]`: scan `t_i = horizon·i/coarse_n`, then
/// refine the best coarse local maxima by golden-section search. Ties go to
/// the smallest `t`.
pub fn maximize_over(f: impl Fn(f64) -> f64, horizon: f64, coarse_n: usize) -> Result<Maximum> {
    let step = horizon / coarse_n as f64;
    let t_at = |i: usize| horizon * i as f64 / coarse_n as f64;
    let values: Vec<f64> = (1..=coarse_n).map(|i| f(t_at(i))).collect();
    let coarse_best = values.iter().copied().fold(f64::MIN, f64::max);
    if coarse_best < tolerance::EMPTY_BRANCH {
        return Err(Error::DegeneratePoint {
            threshold: tolerance::EMPTY_BRANCH,
        });
    }

    let mut peaks: Vec<usize> = (0..values.len())
        .filter(|&j| {
            let left = j == 0 || values[j] >= values[j - 1];
            let right = j + 1 == values.len() || values[j] >= values[j + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(REFINED_CANDIDATES);

    let mut refined: Vec<(f64, f64)> = peaks
        .iter()
        .map(|&j| {
            let t0 = t_at(j + 1);
            let lo = (t0 - step).max(0.0);
            let hi = (t0 + step).min(horizon);
            let (t, p) = golden_section_max(&f, lo, hi, tolerance::TIME_REFINEMENT);
            if p >= values[j] {
                (t, p)
            } else {
                (t0, values[j])
            }
        })
        .collect();
    refined.sort_by(|a, b| a.0.total_cmp(&b.0));
    let top = refined.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let (t_star, p_star) = refined
        .iter()
        .copied()
        .find(|&(_, p)| p >= top - 1e-12)
        .expect("at least one coarse peak");
    Ok(Maximum {
        t_star,
        p_star,
        coarse_best,
    })
}

/// Maximizes `P(−)` over time for the couplings in `params` (its `t` is
/// ignored), starting from `|00⟩`.
pub fn maximize_p_minus(params: &ProtocolParams, config: &SweepConfig) -> Result<Maximum> {
    let eval = BranchEvaluator::new(params, &Ket::from_bits("00")?)?;
    maximize_over(|t| eval.p_minus(t), config.horizon_for(params), config.coarse_n)
}

/// Evaluates one `(R, K)` grid point.
pub fn evaluate_point(config: &SweepConfig, r: f64, k: f64) -> Result<SweepRecord> {
    let params = ProtocolParams::from_ratio(config.omega_z, r, k, 0.0);
    let degenerate = SweepRecord {
        r,
        k,
        t_star: None,
        p_star: 0.0,
        concurrence_at_t_star: 0.0,
    };
    let max = match maximize_p_minus(&params, config) {
        Ok(m) => m,
        Err(Error::DegeneratePoint { .. }) => return Ok(degenerate),
        Err(e) => return Err(e),
    };
    let outcome = match run_protocol(
        &params.with_t(max.t_star),
        &DensityMatrix::from_bits("00")?,
        Sign::Minus,
    ) {
        Ok(o) => o,
        Err(Error::EmptyBranch { .. }) => return Ok(degenerate),
        Err(e) => return Err(e),
    };
    Ok(SweepRecord {
        r,
        k,
        t_star: Some(max.t_star),
        p_star: max.p_star,
        concurrence_at_t_star: concurrence(&outcome.reduced_state)?.value,
    })
}

/// Runs the whole grid; records are row-major in `(R, K)`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let rs = config.r_values();
    let ks = config.k_values();
    let points: Vec<(f64, f64)> = rs
        .iter()
        .flat_map(|&r| ks.iter().map(move |&k| (r, k)))
        .collect();
    let work = || {
        points
            .par_iter()
            .map(|&(r, k)| evaluate_point(config, r, k))
            .collect::<Result<Vec<_>>>()
    };
    match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Decimal rendering with 17 significant digits in the style of C's `%.17g`;
/// parses back to the identical `f64`.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

/// Writes records as CSV: [`CSV_HEADER`], one newline-terminated row per
/// record, degenerate `t_star` as an empty field.
pub fn write_csv(records: &[SweepRecord], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for rec in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_sig17(rec.r),
            format_sig17(rec.k),
            rec.t_star.map(format_sig17).unwrap_or_default(),
            format_sig17(rec.p_star),
            format_sig17(rec.concurrence_at_t_star)
        )?;
    }
    out.flush()
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (average ranks for ties). `NaN` if either
/// sample is constant or the lengths differ.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() != ys.len() || xs.len() < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}
