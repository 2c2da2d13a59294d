//! End-to-end execution of a model file.

use std::path::{Path, PathBuf};

use crate::analysis::{check_supported, run_analysis, AnalysisResult, Model, Options, Output, VarianceMethod};
use crate::lang::ast::AnalysisKind;
use crate::lang::{parse_model, validate};
use crate::moments::{generate_lna_odes, generate_moment_odes, required_order};
use crate::output::{write_series_csv, write_switchpoints};
use crate::semantics::dump_classes;
use crate::Result;

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub options: Options,
    pub dump_classes: bool,
    pub dump_odes: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    /// Requested debug dumps, in order.
    pub dumps: String,
}

pub fn load_model(source: &str) -> Result<Model> {
    let file = parse_model(source)?;
    Ok(Model::new(validate(&file)?))
}

/// Parse, validate and run every analysis of `cfg.input`, writing one
/// output per command. Relative redirect targets resolve against the output
/// directory.
pub fn run_file(cfg: &RunConfig) -> Result<RunReport> {
    let source = std::fs::read_to_string(&cfg.input)?;
    let model = load_model(&source)?;
    run_model(&model, cfg)
}

pub fn run_model(model: &Model, cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::default();
    if cfg.dump_classes {
        report.dumps.push_str(&dump_classes(&model.classes, &model.idx));
    }
    if cfg.dump_odes {
        report.dumps.push_str(&dump_system(model, &cfg.options)?);
    }
    for a in &model.vm.analyses {
        check_supported(a, &cfg.options)?;
    }
    if !model.vm.analyses.is_empty() {
        std::fs::create_dir_all(&cfg.out_dir)?;
    }
    for (i, a) in model.vm.analyses.iter().enumerate() {
        let result = run_analysis(model, a, &cfg.options)?;
        let n = i + 1;
        write_result(&result, &cfg.out_dir, &n.to_string(), &mut report.written)?;
        if let Some(nested) = &result.nested {
            write_result(&nested.0, &cfg.out_dir, &format!("{n}_odes"), &mut report.written)?;
            write_result(&nested.1, &cfg.out_dir, &format!("{n}_simulation"), &mut report.written)?;
        }
    }
    Ok(report)
}

fn dump_system(model: &Model, opts: &Options) -> Result<String> {
    let sys = match opts.variance_method {
        VarianceMethod::Lna => generate_lna_odes(&model.classes, &model.idx)?,
        VarianceMethod::Closure => {
            let mut order = 1;
            for a in &model.vm.analyses {
                let mut visit = |a: &crate::lang::ast::Analysis| {
                    order = order.max(required_order(a.commands.iter().map(|c| &c.kind)));
                };
                visit(a);
                if let AnalysisKind::Comparison { odes, simulation } = &a.kind {
                    visit(odes);
                    visit(simulation);
                }
            }
            generate_moment_odes(&model.classes, &model.idx, order)?
        }
    };
    Ok(sys.dump())
}

fn write_result(result: &AnalysisResult, dir: &Path, prefix: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    for (c, out) in result.outputs.iter().enumerate() {
        let path = match &out.command.redirect {
            Some(target) => dir.join(target),
            None => dir.join(format!("{prefix}_{}.csv", c + 1)),
        };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        match &out.output {
            Output::Series(series) => {
                write_series_csv(std::fs::File::create(&path)?, &result.times, series)?;
                written.push(path);
            }
            Output::Switchpoints(report) => {
                written.extend(write_switchpoints(&path, &result.times, report)?);
            }
        }
    }
    Ok(())
}
