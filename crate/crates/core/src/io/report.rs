//! Human-readable summaries.

use std::fmt::Write as _;

use crate::closed_form::ValidationReport;
use crate::io::csv::fmt_num;
use crate::model::SystemParams;
use crate::sweep::{Interval, RefinedExtremum};

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), fmt_num)
}

pub fn params_summary(p: &SystemParams) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kappa        = {}", fmt_num(p.kappa()));
    let _ = writeln!(s, "gamma        = {}", fmt_num(p.gamma()));
    let _ = writeln!(s, "delta_eff    = {}", fmt_num(p.delta_eff()));
    let _ = writeln!(s, "g_eff        = {}", fmt_num(p.g_eff()));
    let _ = writeln!(s, "v_hop        = {}", fmt_num(p.v_hop()));
    let _ = writeln!(s, "phi          = {}", fmt_num(p.phi()));
    let _ = writeln!(s, "theta        = {}", fmt_num(p.theta()));
    let _ = writeln!(s, "n_bar        = {}", fmt_num(p.n_bar()));
    let _ = writeln!(s, "temperature  = {}", opt(p.temperature()));
    let _ = writeln!(s, "omega_m_phys = {}", opt(p.omega_m_phys()));
    s
}

pub fn validation_summary(r: &ValidationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "closed-form vs numeric output coefficients");
    let _ = writeln!(
        s,
        "grid: {} points in [{}, {}]",
        r.grid.len(),
        opt(r.grid.first().copied()),
        opt(r.grid.last().copied())
    );
    let _ = writeln!(
        s,
        "phi = {}, theta = {}",
        fmt_num(r.params.phi()),
        fmt_num(r.params.theta())
    );
    let _ = writeln!(s, "tolerance (relative): {}", fmt_num(r.tolerance));
    let _ = writeln!(s, "alpha read as: phi");
    for v in &r.variants {
        let _ = writeln!(
            s,
            "variant {}: max {} (a1 {}, a2 {}, a3 {}, a4 {}) worst at omega {} on a{}{}",
            v.variant,
            fmt_num(v.max_deviation),
            fmt_num(v.per_coefficient_max[0]),
            fmt_num(v.per_coefficient_max[1]),
            fmt_num(v.per_coefficient_max[2]),
            fmt_num(v.per_coefficient_max[3]),
            opt(v.worst_omega),
            v.worst_coefficient
                .map_or_else(|| "-".into(), |i| (i + 1).to_string()),
            if v.singular.is_empty() {
                String::new()
            } else {
                format!(", {} singular points", v.singular.len())
            }
        );
    }
    let _ = writeln!(
        s,
        "best variant: {} ({})",
        r.best_variant.map_or_else(|| "-".into(), |v| v.to_string()),
        fmt_num(r.best_deviation)
    );
    let ex = &r.exchange_identity;
    let _ = writeln!(
        s,
        "exchange identity a3 = a4 on numeric path: {} (max asymmetry {} at omega {})",
        if ex.consistent { "holds" } else { "violated" },
        fmt_num(ex.max_numeric_asymmetry),
        opt(ex.worst_omega)
    );
    if !r.numeric_singular.is_empty() {
        let _ = writeln!(
            s,
            "numeric solve singular at {} points",
            r.numeric_singular.len()
        );
    }
    let _ = writeln!(s, "result: {}", if r.pass { "PASS" } else { "FAIL" });
    s
}

pub fn extrema_summary(extrema: &[RefinedExtremum]) -> String {
    let mut s = String::new();
    for e in extrema {
        let _ = writeln!(
            s,
            "{} at omega {} value {} (refinement {})",
            e.kind,
            fmt_num(e.omega_eff),
            fmt_num(e.value),
            fmt_num(e.refinement)
        );
    }
    s
}

/// Sub-threshold-interval construction: total width of the intervals where
/// the added noise stays below the threshold.
pub fn bandwidth_summary(threshold: f64, intervals: &[Interval]) -> String {
    let total: f64 = intervals.iter().map(Interval::width).sum();
    let mut s = format!(
        "sub-threshold intervals of n_add < {}: {} interval(s), total width {}\n",
        fmt_num(threshold),
        intervals.len(),
        fmt_num(total)
    );
    for i in intervals {
        let _ = writeln!(s, "  [{}, {}]", fmt_num(i.start), fmt_num(i.stop));
    }
    s
}
