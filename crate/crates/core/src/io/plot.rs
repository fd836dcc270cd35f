//! Standalone matplotlib scripts that redraw figures from written CSV tables.

use std::fmt::Write as _;

use thiserror::Error;

use crate::spectra::SQL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
    #[error("curve `{0}` has no samples")]
    EmptyCurve(String),
}

/// Spectrum column to draw against `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotQuantity {
    NAdd,
    Rm,
    STh,
    STotal,
}

impl PlotQuantity {
    pub fn column(self) -> &'static str {
        match self {
            PlotQuantity::NAdd => "n_add",
            PlotQuantity::Rm => "r_m",
            PlotQuantity::STh => "s_th",
            PlotQuantity::STotal => "s_total",
        }
    }

    fn axis_label(self) -> &'static str {
        match self {
            PlotQuantity::NAdd => "added noise N_add",
            PlotQuantity::Rm => "mechanical response R_m",
            PlotQuantity::STh => "thermal noise S_th",
            PlotQuantity::STotal => "total spectrum S",
        }
    }
}

/// One curve: a legend label, the CSV it reads and how many rows it holds.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotCurve {
    pub label: String,
    pub csv_path: String,
    pub samples: usize,
}

fn py_str(s: &str) -> String {
    format!("{s:?}")
}

/// Script overlaying `curves` of `quantity` over `omega / omega_m`. Added
/// noise plots get a dashed standard-quantum-limit line.
pub fn spectrum_plot_script(
    curves: &[PlotCurve],
    quantity: PlotQuantity,
    image_path: &str,
) -> Result<String, PlotError> {
    if curves.is_empty() {
        return Err(PlotError::Empty);
    }
    if let Some(c) = curves.iter().find(|c| c.samples == 0) {
        return Err(PlotError::EmptyCurve(c.label.clone()));
    }
    let mut s = String::from(HEADER);
    s.push_str("fig, ax = plt.subplots(figsize=(6, 4))\n");
    for c in curves {
        let _ = writeln!(
            s,
            "x, y = column({}, \"omega\", {})\nax.plot(x, y, label={})",
            py_str(&c.csv_path),
            py_str(quantity.column()),
            py_str(&c.label)
        );
    }
    if quantity == PlotQuantity::NAdd {
        let _ = writeln!(
            s,
            "ax.axhline({SQL}, color=\"k\", linestyle=\"--\", label=\"SQL\")"
        );
    }
    if quantity == PlotQuantity::Rm {
        s.push_str("ax.set_yscale(\"log\")\n");
    }
    let _ = writeln!(
        s,
        "ax.set_xlabel(\"omega / omega_m\")\nax.set_ylabel({})\nax.legend()\nfig.tight_layout()\nfig.savefig({})",
        py_str(quantity.axis_label()),
        py_str(image_path)
    );
    Ok(s)
}

/// Script drawing added noise at the effective frequency versus the swept
/// parameter, from a table written by [`crate::io::csv::sweep_csv`].
pub fn sweep_plot_script(
    curve: &PlotCurve,
    parameter: &str,
    image_path: &str,
) -> Result<String, PlotError> {
    if curve.samples == 0 {
        return Err(PlotError::EmptyCurve(curve.label.clone()));
    }
    let mut s = String::from(HEADER);
    let _ = writeln!(
        s,
        "fig, ax = plt.subplots(figsize=(6, 4))\nx, y = column({}, {}, \"n_add\")\nax.plot(x, y, \"o-\", label={})",
        py_str(&curve.csv_path),
        py_str(parameter),
        py_str(&curve.label)
    );
    let _ = writeln!(
        s,
        "ax.axhline({SQL}, color=\"k\", linestyle=\"--\", label=\"SQL\")\nax.set_xlabel({})\nax.set_ylabel(\"N_add at omega_eff\")\nax.legend()\nfig.tight_layout()\nfig.savefig({})",
        py_str(&format!("{parameter} / omega_m")),
        py_str(image_path)
    );
    Ok(s)
}

const HEADER: &str = r##"import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def column(path, xname, yname):
    xs, ys = [], []
    with open(path, newline="") as fh:
        rows = (line for line in fh if not line.startswith("#"))
        for row in csv.DictReader(rows):
            xs.append(float(row[xname]))
            ys.append(float(row[yname]))
    return xs, ys


"##;

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(label: &str, samples: usize) -> PlotCurve {
        PlotCurve {
            label: label.into(),
            csv_path: format!("{label}.csv"),
            samples,
        }
    }

    #[test]
    fn n_add_script_has_sql_line_and_labels() {
        let s =
            spectrum_plot_script(&[curve("phi=0", 10)], PlotQuantity::NAdd, "n_add.png").unwrap();
        assert!(s.contains("ax.axhline(0.5"));
        assert!(s.contains("omega / omega_m"));
        assert!(s.contains("\"phi=0.csv\""));
        assert!(s.contains("savefig(\"n_add.png\")"));
        assert_eq!(s.matches("ax.plot(").count(), 1);
    }

    #[test]
    fn overlay_and_errors() {
        let s = spectrum_plot_script(&[curve("a", 3), curve("b", 3)], PlotQuantity::Rm, "r.png")
            .unwrap();
        assert_eq!(s.matches("ax.plot(").count(), 2);
        assert!(s.contains("ax.legend()"));
        assert!(!s.contains("axhline"));
        assert_eq!(
            spectrum_plot_script(&[], PlotQuantity::NAdd, "x.png"),
            Err(PlotError::Empty)
        );
        assert_eq!(
            spectrum_plot_script(&[curve("e", 0)], PlotQuantity::NAdd, "x.png"),
            Err(PlotError::EmptyCurve("e".into()))
        );
        assert!(sweep_plot_script(&curve("e", 0), "g_eff", "x.png").is_err());
        let s = sweep_plot_script(&curve("g", 5), "g_eff", "g.png").unwrap();
        assert!(s.contains("\"g_eff\", \"n_add\""));
        assert!(s.contains("axhline(0.5"));
    }

    #[test]
    fn paths_are_quoted() {
        let mut c = curve("x", 1);
        c.csv_path = "dir with \"quote\".csv".into();
        let s = spectrum_plot_script(&[c], PlotQuantity::STotal, "o.png").unwrap();
        assert!(s.contains(r#""dir with \"quote\".csv""#));
    }
}
