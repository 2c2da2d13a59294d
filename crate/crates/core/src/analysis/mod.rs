//! Execution of `odes`, `simulation` and `comparison` analysis blocks.

mod evaluate;
mod switchpoints;
mod table;

use std::collections::BTreeSet;

pub use evaluate::{evaluate_expression, evaluate_values, needed_moments, Scope};
pub use switchpoints::{crossings, switch_points, SwitchPointReport, SwitchSeries};
pub use table::MomentTable;

use crate::lang::ast::{Analysis, AnalysisKind, Command, CommandKind, MomentExpr, OdesParams, SimulationParams};
use crate::lang::ValidatedModel;
use crate::moments::{generate_lna_odes, generate_moment_odes, required_order, MomentIndex, MomentSystem, Unknown};
use crate::numerics::{integrate_rk4, Series, SourceKind};
use crate::semantics::{build_state_index, enumerate_transition_classes, StateIndex, TransitionClass};
use crate::ssa::{run_simulation, SimulationConfig};
use crate::{GpaError, Result};

/// A validated model together with its counting semantics.
#[derive(Debug, Clone)]
pub struct Model {
    pub vm: ValidatedModel,
    pub idx: StateIndex,
    pub classes: Vec<TransitionClass>,
}

impl Model {
    pub fn new(vm: ValidatedModel) -> Self {
        let idx = build_state_index(&vm);
        let classes = enumerate_transition_classes(&vm, &idx);
        Model { vm, idx, classes }
    }

    pub fn scope(&self) -> Scope<'_> {
        Scope {
            idx: &self.idx,
            parameters: &self.vm.parameters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceMethod {
    #[default]
    Closure,
    Lna,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub seed: u64,
    pub threads: Option<usize>,
    pub variance_method: VarianceMethod,
    /// Allow `plotSwitchpoints` in simulation blocks, evaluated on the
    /// sample moments.
    pub simulation_switchpoints: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Series(Vec<Series>),
    Switchpoints(SwitchPointReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub command: Command,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub kind: SourceKind,
    pub times: Vec<f64>,
    pub outputs: Vec<CommandOutput>,
    /// The nested odes and simulation results of a comparison.
    pub nested: Option<Box<(AnalysisResult, AnalysisResult)>>,
}

/// Reject features that are disabled by `opts` before any work is done.
pub fn check_supported(analysis: &Analysis, opts: &Options) -> Result<()> {
    match &analysis.kind {
        AnalysisKind::Simulation(_) => {
            let has_switch = analysis
                .commands
                .iter()
                .any(|c| matches!(c.kind, CommandKind::PlotSwitchpoints(_)));
            if has_switch && !opts.simulation_switchpoints {
                return Err(GpaError::Unsupported(format!(
                    "{}: plotSwitchpoints in a simulation analysis needs --simulation-switchpoints",
                    analysis.pos
                )));
            }
            Ok(())
        }
        AnalysisKind::Odes(_) => Ok(()),
        AnalysisKind::Comparison { odes, simulation } => {
            check_supported(odes, opts)?;
            check_supported(simulation, opts)
        }
    }
}

pub fn run_analysis(model: &Model, analysis: &Analysis, opts: &Options) -> Result<AnalysisResult> {
    check_supported(analysis, opts)?;
    Ok(match &analysis.kind {
        AnalysisKind::Odes(p) => run_odes_analysis(model, p, &analysis.commands, 1, opts)?.0,
        AnalysisKind::Simulation(p) => run_simulation_analysis(model, p, &analysis.commands, &[], opts)?.0,
        AnalysisKind::Comparison { odes, simulation } => run_comparison(model, odes, simulation, &analysis.commands, opts)?,
    })
}

fn plot_expressions(commands: &[Command]) -> Vec<MomentExpr> {
    commands
        .iter()
        .filter_map(|c| match &c.kind {
            CommandKind::Plot(es) => Some(es.clone()),
            CommandKind::PlotSwitchpoints(_) => None,
        })
        .flatten()
        .collect()
}

fn switch_order(k: u64) -> u32 {
    u32::try_from(k).unwrap_or(u32::MAX)
}

fn evaluate_commands(
    model: &Model,
    commands: &[Command],
    table: &mut MomentTable,
) -> Result<Vec<CommandOutput>> {
    commands
        .iter()
        .map(|c| {
            let output = match &c.kind {
                CommandKind::Plot(es) => Output::Series(
                    es.iter()
                        .map(|e| evaluate_expression(e, table, model.scope()))
                        .collect::<Result<_>>()?,
                ),
                CommandKind::PlotSwitchpoints(k) => {
                    let inventory = generate_moment_odes(&model.classes, &model.idx, switch_order(*k))?;
                    Output::Switchpoints(switch_points(&inventory, switch_order(*k), table)?)
                }
            };
            Ok(CommandOutput {
                command: c.clone(),
                output,
            })
        })
        .collect()
}

/// The integrated moment system for an odes block; `order` applies to
/// closure only.
pub fn odes_table(model: &Model, p: &OdesParams, order: u32, opts: &Options) -> Result<(MomentSystem, MomentTable)> {
    let sys = match opts.variance_method {
        VarianceMethod::Closure => generate_moment_odes(&model.classes, &model.idx, order)?,
        VarianceMethod::Lna => generate_lna_odes(&model.classes, &model.idx)?,
    };
    let data = integrate_rk4(&sys, &sys.initial_state(&model.idx), p.stop_time, p.step_size, p.density)?;
    let table = MomentTable::from_system(&sys, &data, model.idx.names());
    Ok((sys, table))
}

pub fn run_odes_analysis(
    model: &Model,
    p: &OdesParams,
    commands: &[Command],
    min_order: u32,
    opts: &Options,
) -> Result<(AnalysisResult, MomentTable)> {
    let order = required_order(commands.iter().map(|c| &c.kind)).max(min_order);
    let (_, mut table) = odes_table(model, p, order, opts)?;
    let outputs = evaluate_commands(model, commands, &mut table)?;
    Ok((
        AnalysisResult {
            kind: SourceKind::Odes,
            times: table.times.clone(),
            outputs,
            nested: None,
        },
        table,
    ))
}

/// Raw moments a simulation must accumulate for `commands` and `extra`.
fn simulation_moments(model: &Model, commands: &[Command], extra: &[MomentExpr]) -> Result<Vec<MomentIndex>> {
    let mut set = BTreeSet::new();
    for e in plot_expressions(commands).iter().chain(extra) {
        needed_moments(e, model.scope(), &mut set)?;
    }
    for c in commands {
        if let CommandKind::PlotSwitchpoints(k) = c.kind {
            let inventory = generate_moment_odes(&model.classes, &model.idx, switch_order(k))?;
            for t in crate::moments::collect_min_terms(&inventory, switch_order(k)) {
                for v in t.left.vars().into_iter().chain(t.right.vars()) {
                    if let Unknown::Moment(m) = &inventory.unknowns[v] {
                        set.insert(m.clone());
                    }
                }
            }
        }
    }
    let mut moments: Vec<MomentIndex> = set.into_iter().filter(|m| !m.is_one()).collect();
    moments.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
    Ok(moments)
}

pub fn run_simulation_analysis(
    model: &Model,
    p: &SimulationParams,
    commands: &[Command],
    extra: &[MomentExpr],
    opts: &Options,
) -> Result<(AnalysisResult, MomentTable)> {
    let moments = simulation_moments(model, commands, extra)?;
    let cfg = SimulationConfig {
        stop_time: p.stop_time,
        step_size: p.step_size,
        replications: p.replications,
        seed: opts.seed,
        threads: opts.threads,
    };
    let data = run_simulation(&model.classes, &model.idx, &cfg, &moments)?;
    let mut table = MomentTable::from_moments(&moments, &data, model.idx.names());
    let outputs = evaluate_commands(model, commands, &mut table)?;
    Ok((
        AnalysisResult {
            kind: SourceKind::Simulation,
            times: table.times.clone(),
            outputs,
            nested: None,
        },
        table,
    ))
}

/// Runs both nested blocks and reports `odes - simulation` for each of the
/// comparison's own plot commands. Switch points are taken from the odes
/// side.
pub fn run_comparison(
    model: &Model,
    odes: &Analysis,
    simulation: &Analysis,
    commands: &[Command],
    opts: &Options,
) -> Result<AnalysisResult> {
    let (AnalysisKind::Odes(op), AnalysisKind::Simulation(sp)) = (&odes.kind, &simulation.kind) else {
        return Err(GpaError::Unsupported(
            "a comparison needs one odes and one simulation block".into(),
        ));
    };
    let order = required_order(commands.iter().map(|c| &c.kind));
    let (odes_result, mut odes_table) = run_odes_analysis(model, op, &odes.commands, order, opts)?;
    let exprs = plot_expressions(commands);
    let (sim_result, mut sim_table) = run_simulation_analysis(model, sp, &simulation.commands, &exprs, opts)?;

    let mut outputs = Vec::with_capacity(commands.len());
    for c in commands {
        let output = match &c.kind {
            CommandKind::Plot(es) => {
                let mut series = Vec::with_capacity(es.len());
                for e in es {
                    let a = evaluate_expression(e, &mut odes_table, model.scope())?;
                    let b = evaluate_values(e, &mut sim_table, model.scope())?;
                    series.push(Series {
                        label: a.label,
                        values: a.values.iter().zip(&b).map(|(x, y)| x - y).collect(),
                    });
                }
                Output::Series(series)
            }
            CommandKind::PlotSwitchpoints(k) => {
                let inventory = generate_moment_odes(&model.classes, &model.idx, switch_order(*k))?;
                Output::Switchpoints(switch_points(&inventory, switch_order(*k), &mut odes_table)?)
            }
        };
        outputs.push(CommandOutput {
            command: c.clone(),
            output,
        });
    }
    Ok(AnalysisResult {
        kind: SourceKind::Comparison,
        times: odes_table.times.clone(),
        outputs,
        nested: Some(Box::new((odes_result, sim_result))),
    })
}
