//! Canonical text form of a [`ModelFile`]. Re-parsing the output yields a
//! tree equal to the input.

use std::fmt::Write;

use crate::lang::ast::*;

pub fn print_model(m: &ModelFile) -> String {
    let mut out = String::new();
    for p in &m.parameters {
        let _ = writeln!(out, "{} = {};", p.name, number(p.value));
    }
    if !m.parameters.is_empty() {
        out.push('\n');
    }
    for c in &m.components {
        let _ = writeln!(out, "{} = {};", c.name, component(&c.body));
    }
    if !m.components.is_empty() {
        out.push('\n');
    }
    out.push_str(&grouped_model(&m.system, true));
    out.push('\n');
    for a in &m.analyses {
        out.push('\n');
        analysis(&mut out, a);
        out.push('\n');
    }
    out
}

/// Real literal text that re-lexes to the same `f64`.
pub fn number(v: f64) -> String {
    let s = format!("{v}");
    if s.contains(['.', 'e', 'E']) || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

fn value(v: &Value) -> String {
    match v {
        Value::Param(p) => p.clone(),
        Value::Literal(x) => number(*x),
    }
}

fn action_set(actions: &[String]) -> String {
    format!("<{}>", actions.join(", "))
}

pub fn component(c: &Component) -> String {
    match c {
        Component::Sum(ps) => summation(ps),
        Component::Ref(name) => name.clone(),
        Component::Coop {
            left,
            actions,
            right,
        } => format!("({} {} {})", component(left), action_set(actions), component(right)),
    }
}

pub fn summation(ps: &[Prefix]) -> String {
    ps.iter().map(prefix).collect::<Vec<_>>().join(" + ")
}

fn prefix(p: &Prefix) -> String {
    let next = match &p.next {
        Continuation::Named(n) => n.clone(),
        Continuation::Stop => "stop".to_string(),
        Continuation::Sum(ps) => format!("({})", summation(ps)),
    };
    format!("({}, {}).{}", p.action, value(&p.rate), next)
}

fn grouped_model(m: &GroupedModel, top: bool) -> String {
    match m {
        GroupedModel::Group { label, members, .. } => {
            let ms: Vec<String> = members
                .iter()
                .map(|g| match &g.multiplicity {
                    Some(v) => format!("{}[{}]", g.component, value(v)),
                    None => g.component.clone(),
                })
                .collect();
            format!("{label}{{{}}}", ms.join(" | "))
        }
        GroupedModel::Coop {
            left,
            actions,
            right,
        } => {
            let inner = format!(
                "{} {} {}",
                grouped_model(left, false),
                action_set(actions),
                grouped_model(right, false)
            );
            if top {
                inner
            } else {
                format!("({inner})")
            }
        }
    }
}

fn analysis_header(a: &Analysis) -> String {
    match &a.kind {
        AnalysisKind::Odes(p) => format!(
            "odes(stopTime = {}, stepSize = {}, density = {})",
            number(p.stop_time),
            number(p.step_size),
            p.density
        ),
        AnalysisKind::Simulation(p) => format!(
            "simulation(stopTime = {}, stepSize = {}, replications = {})",
            number(p.stop_time),
            number(p.step_size),
            p.replications
        ),
        AnalysisKind::Comparison { odes, simulation } => {
            let mut s = String::from("comparison(\n    ");
            analysis_inline(&mut s, odes, "    ");
            s.push_str(",\n    ");
            analysis_inline(&mut s, simulation, "    ");
            s.push(')');
            s
        }
    }
}

fn analysis_inline(out: &mut String, a: &Analysis, indent: &str) {
    out.push_str(&analysis_header(a));
    commands(out, &a.commands, indent);
}

fn analysis(out: &mut String, a: &Analysis) {
    analysis_inline(out, a, "");
}

fn commands(out: &mut String, cmds: &[Command], indent: &str) {
    if cmds.is_empty() {
        out.push_str(" {}");
        return;
    }
    out.push_str(" {\n");
    for c in cmds {
        let _ = writeln!(out, "{indent}    {};", command(c));
    }
    out.push_str(indent);
    out.push('}');
}

pub fn command(c: &Command) -> String {
    let mut s = match &c.kind {
        CommandKind::Plot(es) => format!(
            "plot({})",
            es.iter().map(expression).collect::<Vec<_>>().join(", ")
        ),
        CommandKind::PlotSwitchpoints(k) => format!("plotSwitchpoints({k})"),
    };
    if let Some(f) = &c.redirect {
        let _ = write!(s, " -> \"{f}\"");
    }
    s
}

pub fn moment(m: &Moment) -> String {
    m.factors
        .iter()
        .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Expression text with the minimum parentheses needed to preserve the
/// tree; used both for round-tripping and as series labels.
pub fn expression(e: &MomentExpr) -> String {
    match e {
        MomentExpr::Number(v) => number(*v),
        MomentExpr::Param(p) => p.clone(),
        MomentExpr::Expectation(ms) => format!(
            "E[{}]",
            ms.iter().map(moment).collect::<Vec<_>>().join(" + ")
        ),
        MomentExpr::Variance(ps) => format!(
            "Var[{}]",
            ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" + ")
        ),
        MomentExpr::Covariance(a, b) => format!("Cov[{a},{b}]"),
        MomentExpr::Central {
            pair,
            order,
            standardised,
        } => format!(
            "{}Central[{pair},{order}]",
            if *standardised { "Standardised" } else { "" }
        ),
        MomentExpr::Binary { op, left, right } => {
            let prec = op.precedence();
            let right_assoc = *op == BinOp::Pow;
            let wrap_left = match left.as_ref() {
                MomentExpr::Binary { op: l, .. } => {
                    l.precedence() < prec || (right_assoc && l.precedence() == prec)
                }
                _ => false,
            };
            let wrap_right = match right.as_ref() {
                MomentExpr::Binary { op: r, .. } => {
                    r.precedence() < prec || (!right_assoc && r.precedence() == prec)
                }
                _ => false,
            };
            let l = expression(left);
            let r = expression(right);
            format!(
                "{}{}{}",
                if wrap_left { format!("({l})") } else { l },
                op.symbol(),
                if wrap_right { format!("({r})") } else { r }
            )
        }
    }
}
