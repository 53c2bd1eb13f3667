use ccr_core::fock::BasisConvention;
use ccr_core::interval::{interval_vs_line_report, ContrastTable, IntervalRepSpec};
use ccr_core::weyl::{default_guard, weyl_residual};
use ccr_core::FockState;

/// Weyl sweep columns; `status` is `ok` or `failed: <reason>`.
pub const SWEEP_HEADER: &str = "t,s,dim,guard,support,residual,status";

/// Samples per unit length for interval sweeps, so that `t = 0.5` lands on
/// the grid for integer lengths.
pub const SAMPLES_PER_UNIT: f64 = 64.0;

fn weyl_row(t: f64, s: f64, dim: usize) -> String {
    let guard = default_guard(dim);
    let record = FockState::basis(0, dim.max(1), BasisConvention::Normalized)
        .and_then(|xi| weyl_residual(t, s, dim, guard, &xi));
    match record {
        Ok(rec) => format!("{},ok", rec.csv_row()),
        Err(e) => format!("{t},{s},{dim},{guard},,,failed: {}", e.to_string().replace(',', ";")),
    }
}

/// One row per `(t, s, dim)`, ordered by `t`, then `s`, then `dim`, with
/// `xi = e_0` and the default guard band. A failing point yields a
/// `failed` row and the sweep continues.
pub fn weyl_sweep_csv(ts: &[f64], ss: &[f64], dims: &[usize]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for &t in ts {
        for &s in ss {
            for &dim in dims {
                out.push_str(&weyl_row(t, s, dim));
                out.push('\n');
            }
        }
    }
    out
}

/// Contrast table for intervals `(-L/2, L/2)`, one row per length.
pub fn interval_sweep_csv(lengths: &[f64], t: f64, s: f64) -> ccr_core::Result<String> {
    if lengths.is_empty() {
        return Ok(format!("{}\n", ContrastTable::CSV_HEADER));
    }
    let specs = lengths
        .iter()
        .map(|&l| IntervalRepSpec::new(-0.5 * l, 0.5 * l, (l * SAMPLES_PER_UNIT).round() as usize))
        .collect::<ccr_core::Result<Vec<_>>>()?;
    Ok(interval_vs_line_report(&specs, t, s)?.to_csv())
}
