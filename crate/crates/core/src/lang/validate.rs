//! Name resolution and static checks, producing an immutable
//! [`ValidatedModel`].

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::ValidationError;
use crate::lang::ast::*;
use crate::lang::printer;
use crate::semantics::derivatives::explore_derivatives;

/// Integrality tolerance for multiplicities written as reals (`m=50.0`).
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-9;

/// A prefix with its rate resolved to a number.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPrefix {
    pub action: String,
    pub rate: f64,
    /// Rate as written, used when naming anonymous derivatives.
    pub rate_text: String,
    pub next: Target,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Named(String),
    Stop,
    /// An unnamed choice reached through a nested continuation.
    Anonymous(Vec<ResolvedPrefix>),
}

/// Resolved system equation.
#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Coop {
        left: Box<System>,
        actions: Vec<String>,
        right: Box<System>,
    },
    Group {
        label: String,
        /// Initial members and their counts, in declaration order.
        members: Vec<(String, u64)>,
    },
}

impl System {
    /// Groups in left-to-right declaration order.
    pub fn groups(&self) -> Vec<(&str, &[(String, u64)])> {
        let mut out = Vec::new();
        fn walk<'a>(s: &'a System, out: &mut Vec<(&'a str, &'a [(String, u64)])>) {
            match s {
                System::Coop { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
                System::Group { label, members } => out.push((label, members)),
            }
        }
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone)]
pub struct ValidatedModel {
    pub parameters: BTreeMap<String, f64>,
    /// Behaviour of every named component, with aliases followed.
    pub definitions: HashMap<String, Vec<ResolvedPrefix>>,
    pub system: System,
    pub analyses: Vec<Analysis>,
    pub source: ModelFile,
}

impl ValidatedModel {
    /// Behaviour of a derivative target.
    pub fn behaviour<'a>(&'a self, target: &'a Target) -> &'a [ResolvedPrefix] {
        match target {
            Target::Named(n) => &self.definitions[n],
            Target::Stop => &[],
            Target::Anonymous(ps) => ps,
        }
    }

    /// The same model with different parameter values; analyses are kept.
    pub fn with_parameters(&self, overrides: &[(&str, f64)]) -> Result<Self, ValidationError> {
        let mut src = self.source.clone();
        for (name, value) in overrides {
            let p = src
                .parameters
                .iter_mut()
                .find(|p| p.name == *name)
                .ok_or_else(|| ValidationError::new(format!("unknown parameter {name}")))?;
            p.value = *value;
        }
        validate(&src)
    }
}

/// Display name of a derivative target.
pub fn target_name(t: &Target) -> String {
    match t {
        Target::Named(n) => n.clone(),
        Target::Stop => "stop".to_string(),
        Target::Anonymous(ps) => ps
            .iter()
            .map(|p| format!("({}, {}).{}", p.action, p.rate_text, continuation_text(&p.next)))
            .collect::<Vec<_>>()
            .join(" + "),
    }
}

fn continuation_text(t: &Target) -> String {
    match t {
        Target::Anonymous(_) => format!("({})", target_name(t)),
        other => target_name(other),
    }
}

pub fn validate(m: &ModelFile) -> Result<ValidatedModel, ValidationError> {
    let mut parameters = BTreeMap::new();
    for p in &m.parameters {
        if parameters.insert(p.name.clone(), p.value).is_some() {
            return Err(ValidationError::at(
                p.pos,
                format!("duplicate parameter {}", p.name),
            ));
        }
    }

    let mut bodies: HashMap<&str, (&Component, Pos)> = HashMap::new();
    for c in &m.components {
        if c.name == "stop" {
            return Err(ValidationError::at(c.pos, "`stop` cannot be redefined"));
        }
        if bodies.insert(&c.name, (&c.body, c.pos)).is_some() {
            return Err(ValidationError::at(
                c.pos,
                format!("duplicate component {}", c.name),
            ));
        }
    }

    let ctx = Resolver {
        parameters: &parameters,
        bodies: &bodies,
    };
    let mut definitions = HashMap::new();
    for c in &m.components {
        definitions.insert(c.name.clone(), ctx.resolve_definition(&c.name, c.pos)?);
    }

    let mut labels = HashSet::new();
    let system = ctx.resolve_system(&m.system, &mut labels)?;

    let vm = ValidatedModel {
        parameters,
        definitions,
        system,
        analyses: m.analyses.clone(),
        source: m.clone(),
    };
    check_analyses(&vm)?;
    Ok(vm)
}

struct Resolver<'a> {
    parameters: &'a BTreeMap<String, f64>,
    bodies: &'a HashMap<&'a str, (&'a Component, Pos)>,
}

impl Resolver<'_> {
    fn value(&self, v: &Value, pos: Pos) -> Result<f64, ValidationError> {
        match v {
            Value::Literal(x) => Ok(*x),
            Value::Param(p) => self
                .parameters
                .get(p)
                .copied()
                .ok_or_else(|| ValidationError::at(pos, format!("undefined parameter {p}"))),
        }
    }

    fn resolve_definition(&self, name: &str, pos: Pos) -> Result<Vec<ResolvedPrefix>, ValidationError> {
        let mut seen = vec![name.to_string()];
        let mut body = self.bodies[name].0;
        loop {
            match body {
                Component::Sum(ps) => return self.prefixes(ps),
                Component::Ref(other) => {
                    if seen.contains(other) {
                        return Err(ValidationError::at(
                            pos,
                            format!("component {name} is defined by a cycle of references"),
                        ));
                    }
                    let Some((b, _)) = self.bodies.get(other.as_str()) else {
                        return Err(ValidationError::at(pos, format!("undefined component {other}")));
                    };
                    seen.push(other.clone());
                    body = b;
                }
                Component::Coop { .. } => {
                    return Err(ValidationError::at(
                        pos,
                        format!(
                            "component {name} uses cooperation; cooperation is only supported between groups"
                        ),
                    ))
                }
            }
        }
    }

    fn prefixes(&self, ps: &[Prefix]) -> Result<Vec<ResolvedPrefix>, ValidationError> {
        ps.iter()
            .map(|p| {
                let rate = self.value(&p.rate, p.pos)?;
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(ValidationError::at(
                        p.pos,
                        format!("rate of action {} must be positive, got {rate}", p.action),
                    ));
                }
                let next = match &p.next {
                    Continuation::Stop => Target::Stop,
                    Continuation::Named(n) => {
                        if !self.bodies.contains_key(n.as_str()) {
                            return Err(ValidationError::at(p.pos, format!("undefined component {n}")));
                        }
                        Target::Named(n.clone())
                    }
                    Continuation::Sum(inner) => Target::Anonymous(self.prefixes(inner)?),
                };
                let rate_text = match &p.rate {
                    Value::Param(name) => name.clone(),
                    Value::Literal(x) => printer::number(*x),
                };
                Ok(ResolvedPrefix {
                    action: p.action.clone(),
                    rate,
                    rate_text,
                    next,
                })
            })
            .collect()
    }

    fn resolve_system(
        &self,
        g: &GroupedModel,
        labels: &mut HashSet<String>,
    ) -> Result<System, ValidationError> {
        match g {
            GroupedModel::Coop {
                left,
                actions,
                right,
            } => Ok(System::Coop {
                left: Box::new(self.resolve_system(left, labels)?),
                actions: actions.clone(),
                right: Box::new(self.resolve_system(right, labels)?),
            }),
            GroupedModel::Group {
                label,
                members,
                pos,
            } => {
                if !labels.insert(label.clone()) {
                    return Err(ValidationError::at(*pos, format!("duplicate group label {label}")));
                }
                let mut resolved: Vec<(String, u64)> = Vec::new();
                for m in members {
                    if !self.bodies.contains_key(m.component.as_str()) {
                        return Err(ValidationError::at(
                            m.pos,
                            format!("undefined component {}", m.component),
                        ));
                    }
                    let count = match &m.multiplicity {
                        None => 1,
                        Some(v) => {
                            let x = self.value(v, m.pos)?;
                            let rounded = x.round();
                            if !x.is_finite() || (x - rounded).abs() > MULTIPLICITY_TOLERANCE {
                                return Err(ValidationError::at(
                                    m.pos,
                                    format!("multiplicity of {} must be an integer, got {x}", m.component),
                                ));
                            }
                            if rounded < 0.0 {
                                return Err(ValidationError::at(
                                    m.pos,
                                    format!("multiplicity of {} must be non-negative, got {x}", m.component),
                                ));
                            }
                            rounded as u64
                        }
                    };
                    match resolved.iter_mut().find(|(c, _)| *c == m.component) {
                        Some(entry) => entry.1 += count,
                        None => resolved.push((m.component.clone(), count)),
                    }
                }
                Ok(System::Group {
                    label: label.clone(),
                    members: resolved,
                })
            }
        }
    }
}

fn check_analyses(vm: &ValidatedModel) -> Result<(), ValidationError> {
    // Derivatives reachable in each group, for checking `group:component`.
    let mut reachable: HashMap<&str, HashSet<String>> = HashMap::new();
    for (label, members) in vm.system.groups() {
        let starts: Vec<String> = members.iter().map(|(c, _)| c.clone()).collect();
        let graph = explore_derivatives(vm, &starts);
        reachable.insert(label, graph.derivatives.iter().map(|d| d.name.clone()).collect());
    }
    let check_pair = |p: &GcPair, pos: Pos| -> Result<(), ValidationError> {
        match reachable.get(p.group.as_str()) {
            None => Err(ValidationError::at(pos, format!("undefined group {}", p.group))),
            Some(ds) if !ds.contains(&p.component) => Err(ValidationError::at(
                pos,
                format!("component {} is not reachable in group {}", p.component, p.group),
            )),
            Some(_) => Ok(()),
        }
    };

    fn grid(stop: f64, step: f64, pos: Pos) -> Result<(), ValidationError> {
        if !(stop > 0.0 && stop.is_finite()) {
            return Err(ValidationError::at(pos, format!("stopTime must be positive, got {stop}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(ValidationError::at(pos, format!("stepSize must be positive, got {step}")));
        }
        if step > stop {
            return Err(ValidationError::at(
                pos,
                format!("stepSize {step} exceeds stopTime {stop}"),
            ));
        }
        Ok(())
    }

    fn check_block(
        a: &Analysis,
        vm: &ValidatedModel,
        check_pair: &dyn Fn(&GcPair, Pos) -> Result<(), ValidationError>,
    ) -> Result<(), ValidationError> {
        match &a.kind {
            AnalysisKind::Odes(p) => {
                grid(p.stop_time, p.step_size, a.pos)?;
                if p.density < 1 {
                    return Err(ValidationError::at(a.pos, "density must be at least 1"));
                }
            }
            AnalysisKind::Simulation(p) => {
                grid(p.stop_time, p.step_size, a.pos)?;
                if p.replications < 1 {
                    return Err(ValidationError::at(a.pos, "replications must be at least 1"));
                }
            }
            AnalysisKind::Comparison { odes, simulation } => {
                check_block(odes, vm, check_pair)?;
                check_block(simulation, vm, check_pair)?;
                let (AnalysisKind::Odes(o), AnalysisKind::Simulation(s)) = (&odes.kind, &simulation.kind)
                else {
                    return Err(ValidationError::at(a.pos, "comparison needs an odes and a simulation analysis"));
                };
                if !same(o.stop_time, s.stop_time) {
                    return Err(ValidationError::at(
                        a.pos,
                        format!("stop time mismatch: {} vs {}", o.stop_time, s.stop_time),
                    ));
                }
                if !same(o.step_size, s.step_size) {
                    return Err(ValidationError::at(
                        a.pos,
                        format!("step size mismatch: {} vs {}", o.step_size, s.step_size),
                    ));
                }
            }
        }
        for c in &a.commands {
            match &c.kind {
                CommandKind::PlotSwitchpoints(k) => {
                    if *k < 1 {
                        return Err(ValidationError::at(c.pos, "plotSwitchpoints order must be at least 1"));
                    }
                }
                CommandKind::Plot(es) => {
                    for e in es {
                        check_expression(e, vm, c.pos, check_pair)?;
                    }
                }
            }
        }
        Ok(())
    }

    for a in &vm.analyses {
        check_block(a, vm, &check_pair)?;
    }
    Ok(())
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn check_expression(
    e: &MomentExpr,
    vm: &ValidatedModel,
    pos: Pos,
    check_pair: &dyn Fn(&GcPair, Pos) -> Result<(), ValidationError>,
) -> Result<(), ValidationError> {
    let mut err = None;
    e.for_each_pair(&mut |p| {
        if err.is_none() {
            err = check_pair(p, pos).err();
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    match e {
        MomentExpr::Param(p) if !vm.parameters.contains_key(p) => {
            Err(ValidationError::at(pos, format!("undefined parameter {p}")))
        }
        MomentExpr::Expectation(ms) => {
            if ms.iter().flat_map(|m| &m.factors).any(|(_, k)| *k == 0) {
                return Err(ValidationError::at(pos, "moment exponents must be positive"));
            }
            Ok(())
        }
        MomentExpr::Central { order, .. } if *order == 0 => {
            Err(ValidationError::at(pos, "central moment order must be at least 1"))
        }
        MomentExpr::Binary { left, right, .. } => {
            check_expression(left, vm, pos, check_pair)?;
            check_expression(right, vm, pos, check_pair)
        }
        _ => Ok(()),
    }
}
