//! Configuration parsing and text serialization.

pub mod config;
pub mod csv;
pub mod plot;
pub mod report;

pub use config::{parse_config, parse_config_with_overrides, ConfigError, RunConfig, Source};
pub use csv::{parse_spectrum_csv, spectrum_csv, CsvError, SPECTRUM_HEADER};
pub use plot::{spectrum_plot_script, sweep_plot_script, PlotCurve, PlotError, PlotQuantity};
