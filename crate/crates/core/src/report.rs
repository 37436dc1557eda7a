//! CSV export. Every file has a header row; reals are written with six
//! decimals and angles in radians.

use std::io::Write;

use crate::bounds::BoundCurves;
use crate::probability::CaptureProbabilityField;
use crate::sim::{MatchupCurve, MonteCarloSummary, SweepRow};

pub type Result<T> = std::result::Result<T, csv::Error>;

fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

/// One row per game: `trial, game, theta_a0, outcome, capture_x, capture_y, cum_capture_pct`.
/// Capture coordinates are empty for games that did not end in capture.
pub fn write_trials<W: Write>(out: W, summary: &MonteCarloSummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "game", "theta_a0", "outcome", "capture_x", "capture_y", "cum_capture_pct"])?;
    for record in &summary.trials {
        for (game, (outcome, pct)) in record.outcomes.iter().zip(record.capture_percentages()).enumerate() {
            let (cx, cy) = match outcome.capture_point {
                Some(p) => (fixed(p.x), fixed(p.y)),
                None => (String::new(), String::new()),
            };
            w.write_record([
                record.trial.to_string(),
                (game + 1).to_string(),
                fixed(outcome.attacker_entry_angle),
                outcome.kind.name().to_string(),
                cx,
                cy,
                fixed(pct),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `game, mean_pct, lower_bound_pct, upper_bound_pct`.
pub fn write_summary<W: Write>(out: W, mean_pct: &[f64], bounds: &BoundCurves) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["game", "mean_pct", "lower_bound_pct", "upper_bound_pct"])?;
    for (i, m) in mean_pct.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            fixed(*m),
            bounds.lower.get(i).map_or_else(String::new, |v| fixed(*v)),
            bounds.upper.get(i).map_or_else(String::new, |v| fixed(*v)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `n, lower_pct, upper_pct`.
pub fn write_bounds<W: Write>(out: W, bounds: &BoundCurves) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "lower_pct", "upper_pct"])?;
    for (i, (lo, hi)) in bounds.lower.iter().zip(&bounds.upper).enumerate() {
        w.write_record([(i + 1).to_string(), fixed(*lo), fixed(*hi)])?;
    }
    w.flush()?;
    Ok(())
}

/// `r, theta, p`.
pub fn write_field<W: Write>(out: W, field: &CaptureProbabilityField) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "theta", "p"])?;
    for (r, theta, p) in field.cells() {
        w.write_record([fixed(r), fixed(theta), fixed(p)])?;
    }
    w.flush()?;
    Ok(())
}

/// `param, value, mean_pct`.
pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["param", "value", "mean_pct"])?;
    for row in rows {
        w.write_record([row.param.name().to_string(), fixed(row.value), fixed(row.mean_pct)])?;
    }
    w.flush()?;
    Ok(())
}

/// Long format, one row per pairing and game: `defender, attacker, game, mean_pct`.
pub fn write_matchup<W: Write>(out: W, curves: &[MatchupCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["defender", "attacker", "game", "mean_pct"])?;
    for curve in curves {
        for (i, m) in curve.mean_pct.iter().enumerate() {
            w.write_record([
                curve.strategies.defender.name().to_string(),
                curve.strategies.attacker.name().to_string(),
                (i + 1).to_string(),
                fixed(*m),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
