// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};

use nop_explorer_core::{load_workload, resource_budget, run_model, sweep, LayerSpec, StrategyChoice, SystemConfig};

use crate::config::RunConfig;
use crate::report::{self, ClassRow, CompareRow, Format, ReportRow, SweepRecord, TOTAL};
use crate::{Cli, CliError, Command};

struct Session<'a> {
    cli: &'a Cli,
    cfg: RunConfig,
    format: Format,
    out_path: Option<PathBuf>,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

pub(crate) fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let mut s = Session {
        cli,
        format: cli.format.or(cfg.output_format).unwrap_or_default(),
        out_path: cli.out.clone().or_else(|| cfg.output_path.clone()),
        cfg,
        out,
        err,
    };
    match &cli.command {
        Command::Run { strategy } => s.run(*strategy),
        Command::Sweep {
            axis,
            values,
            strategies,
        } => {
            let workload = s.workload()?;
            s.warn(&s.cfg.system.clone())?;
            let report = sweep(&workload, &s.cfg.system, *axis, values, strategies)?;
            let rows: Vec<SweepRecord> = report.rows.iter().map(|r| SweepRecord::new(*axis, r)).collect();
            s.emit(&report::render(&rows, s.format)?)?;
            let line = format!(
                "{} rows over {} {} values x {} strategies",
                rows.len(),
                values.len(),
                report::axis_name(*axis),
                strategies.len()
            );
            s.summary(&line)
        }
        Command::Compare { a, b, strategy } => s.compare(a, b, *strategy),
        Command::Resources { trx_profile } => {
            let sys = s.cfg.system.clone();
            s.warn(&sys)?;
            let budget = resource_budget(&sys, *trx_profile, &s.cfg.trx_anchors, &s.cfg.resources)?;
            let text = match s.format {
                Format::Csv => report::to_csv(&report::resource_rows(&budget))?,
                Format::Json => report::to_json(&budget),
            };
            s.emit(&text)?;
            let line = format!(
                "total {} mm2, {} mW ({} transceivers at {} Gb/s)",
                report::round6(budget.total_area_mm2),
                report::round6(budget.total_power_mw),
                budget.profile,
                report::round6(budget.datarate_gbps)
            );
            s.summary(&line)
        }
        Command::Classify => {
            let rows: Vec<ClassRow> = s.workload()?.iter().map(ClassRow::new).collect();
            s.emit(&report::render(&rows, s.format)?)
        }
    }
}

impl Session<'_> {
    fn workload(&self) -> Result<Vec<LayerSpec>, CliError> {
        let path = self
            .cli
            .workload
            .as_ref()
            .or(self.cfg.workload_path.as_ref())
            .ok_or_else(|| CliError::Usage("no workload given; pass --workload or set workload_path".into()))?;
        let layers = load_workload(path)?;
        if layers.is_empty() {
            return Err(CliError::Usage(format!("workload {} has no layers", path.display())));
        }
        Ok(layers)
    }

    fn stderr_failed(e: std::io::Error) -> CliError {
        CliError::Write {
            path: PathBuf::from("<stderr>"),
            source: e,
        }
    }

    fn warn(&mut self, sys: &SystemConfig) -> Result<(), CliError> {
        if self.cli.quiet {
            return Ok(());
        }
        for w in sys.warnings() {
            writeln!(self.err, "warning: {w}").map_err(Self::stderr_failed)?;
        }
        Ok(())
    }

    /// The report goes to `--out` when given, otherwise to standard output.
    fn emit(&mut self, text: &str) -> Result<(), CliError> {
        match &self.out_path {
            Some(path) => write_file(path, text),
            None => self.out.write_all(text.as_bytes()).map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            }),
        }
    }

    /// Summary lines share standard output only when the report does not.
    fn summary(&mut self, line: &str) -> Result<(), CliError> {
        if self.cli.quiet {
            return Ok(());
        }
        if self.out_path.is_some() {
            writeln!(self.out, "{line}").map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            })
        } else {
            writeln!(self.err, "{line}").map_err(Self::stderr_failed)
        }
    }

    fn run(&mut self, strategy: Option<StrategyChoice>) -> Result<(), CliError> {
        let workload = self.workload()?;
        let sys = self.cfg.system.clone();
        self.warn(&sys)?;
        let choice = strategy.or(self.cfg.strategy).unwrap_or(StrategyChoice::Adaptive);
        let model = run_model(&workload, choice, &sys)?;
        let mut rows: Vec<ReportRow> = model.layers.iter().map(ReportRow::from_cost).collect();
        rows.push(ReportRow::from_summary(
            TOTAL,
            TOTAL,
            &choice.to_string(),
            sys.chiplets,
            sys.pes_per_chiplet,
            sys.distribution_nop.injection_bandwidth(),
            &model.summary,
        ));
        self.emit(&report::render(&rows, self.format)?)?;
        let line = format!(
            "{} layers, {choice}: {} cycles, {} MACs/cycle, distribution energy {} pJ",
            workload.len(),
            model.total_cycles(),
            report::round6(model.avg_macs_per_cycle()),
            report::round6(model.total_distribution_energy_pj())
        );
        self.summary(&line)
    }

    fn compare(&mut self, a: &str, b: &str, strategy: StrategyChoice) -> Result<(), CliError> {
        let workload = self.workload()?;
        let sys_a = self.cfg.system_with(a)?;
        let sys_b = self.cfg.system_with(b)?;
        self.warn(&sys_a)?;
        let ra = run_model(&workload, strategy, &sys_a)?;
        let rb = run_model(&workload, strategy, &sys_b)?;

        let row = |layer: &str, class: &str, sa: String, sb: String, ca: (u64, u64, f64), cb: (u64, u64, f64)| {
            let mpc = |(macs, cycles, _): (u64, u64, f64)| macs as f64 / cycles as f64;
            CompareRow {
                layer: layer.to_owned(),
                layer_class: class.to_owned(),
                a: sys_a.distribution_nop.label.clone(),
                b: sys_b.distribution_nop.label.clone(),
                a_strategy: sa,
                b_strategy: sb,
                a_total_cycles: ca.1,
                b_total_cycles: cb.1,
                a_macs_per_cycle: report::round6(mpc(ca)),
                b_macs_per_cycle: report::round6(mpc(cb)),
                speedup: report::round6(report::ratio(ca.1 as f64, cb.1 as f64)),
                a_distribution_energy_pj: report::round6(ca.2),
                b_distribution_energy_pj: report::round6(cb.2),
                energy_ratio: report::round6(report::ratio(ca.2, cb.2)),
            }
        };
        let mut rows: Vec<CompareRow> = ra
            .layers
            .iter()
            .zip(&rb.layers)
            .map(|(x, y)| {
                row(
                    &x.layer,
                    x.layer_class.as_str(),
                    x.strategy.to_string(),
                    y.strategy.to_string(),
                    (x.macs, x.total_cycles, x.distribution_energy_pj),
                    (y.macs, y.total_cycles, y.distribution_energy_pj),
                )
            })
            .collect();
        let total = row(
            TOTAL,
            TOTAL,
            strategy.to_string(),
            strategy.to_string(),
            (ra.total_macs(), ra.total_cycles(), ra.total_distribution_energy_pj()),
            (rb.total_macs(), rb.total_cycles(), rb.total_distribution_energy_pj()),
        );
        let line = format!(
            "{} vs {}: {}x throughput, distribution energy {}%",
            total.b,
            total.a,
            total.speedup,
            report::round6(100.0 * (rb.total_distribution_energy_pj() / ra.total_distribution_energy_pj() - 1.0))
        );
        rows.push(total);
        self.emit(&report::render(&rows, self.format)?)?;
        self.summary(&line)
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}
