//! Deterministic rendering: CSV float format and the human-readable
//! analyze table.

use exclusion_core::analysis::{EquilibriumKind, EquilibriumReport, Stability, Threshold};
use exclusion_core::model::ModelParams;

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Short human-readable float for tables and summaries.
pub fn fmt_short(v: f64) -> String {
    format!("{v:.7}")
}

pub fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::Marginal => "marginal",
    }
}

pub fn kind_name(k: EquilibriumKind) -> &'static str {
    match k {
        EquilibriumKind::IdeologyFree => "ideology-free",
        EquilibriumKind::BareEndemic => "endemic",
        EquilibriumKind::Dominance1 => "dominance-1",
        EquilibriumKind::Dominance2 => "dominance-2",
        EquilibriumKind::Coexistence => "coexistence",
    }
}

pub fn threshold_line(t: &Threshold) -> String {
    match t {
        Threshold::Undefined => "undefined (prerequisite equilibrium absent)".into(),
        Threshold::Indeterminate => "indeterminate (denominator vanishes)".into(),
        Threshold::NonPositive(v) => format!("{} (non-positive: no crossing)", fmt_short(*v)),
        Threshold::NotACrossing(v) => {
            format!("{} (not a spectral-radius crossing)", fmt_short(*v))
        }
        Threshold::Crossing(v) => fmt_short(*v),
    }
}

pub fn equilibrium_table(p: &ModelParams, eqs: &[EquilibriumReport]) -> String {
    let mut out = String::new();
    let headers = if p.is_two_ideology() {
        "  kind           stability   S            E1           R1           E2           R2           residual    max Re(eig)\n"
    } else {
        "  kind           stability   S            E            R            residual    max Re(eig)\n"
    };
    out.push_str(headers);
    for eq in eqs {
        let mut line = format!(
            "  {:<14} {:<11}",
            kind_name(eq.kind),
            stability_name(eq.stability)
        );
        for c in eq.state.components() {
            line.push_str(&format!(" {:<12.7}", c));
        }
        line.push_str(&format!(
            " {:<11.2e} {:<+.4e}",
            eq.residual,
            eq.eigenvalues.max_real_part()
        ));
        out.push_str(&line);
        out.push('\n');
    }
    out
}
