//! Syntax tree for GPA input files.
//!
//! The tree mirrors the surface grammar closely; names are kept as written
//! and resolved later by [`crate::lang::validate`].

/// A 1-based source position.
///
/// Positions never take part in equality, so two trees that differ only in
/// layout compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Whole input file: parameters, component definitions, the grouped system
/// equation and any number of analyses.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub parameters: Vec<ParameterDef>,
    pub components: Vec<ComponentDef>,
    pub system: GroupedModel,
    pub analyses: Vec<Analysis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterDef {
    pub name: String,
    pub value: f64,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentDef {
    pub name: String,
    pub body: Component,
    pub pos: Pos,
}

/// A rate or multiplicity: either a parameter reference or a literal.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Param(String),
    Literal(f64),
}

/// Right-hand side of a component definition.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// Choice between one or more prefixes.
    Sum(Vec<Prefix>),
    /// Reference to another named component.
    Ref(String),
    /// Cooperation between components. Parsed for completeness of the
    /// grammar but rejected during validation.
    Coop {
        left: Box<Component>,
        actions: Vec<String>,
        right: Box<Component>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prefix {
    pub action: String,
    pub rate: Value,
    pub next: Continuation,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Continuation {
    Named(String),
    Stop,
    Sum(Vec<Prefix>),
}

/// The grouped system equation.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupedModel {
    Coop {
        left: Box<GroupedModel>,
        actions: Vec<String>,
        right: Box<GroupedModel>,
    },
    Group {
        label: String,
        members: Vec<GroupMember>,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupMember {
    pub component: String,
    /// `None` means a single copy.
    pub multiplicity: Option<Value>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdesParams {
    pub stop_time: f64,
    pub step_size: f64,
    pub density: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationParams {
    pub stop_time: f64,
    pub step_size: f64,
    pub replications: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisKind {
    Odes(OdesParams),
    Simulation(SimulationParams),
    Comparison {
        odes: Box<Analysis>,
        simulation: Box<Analysis>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub kind: AnalysisKind,
    pub commands: Vec<Command>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandKind {
    Plot(Vec<MomentExpr>),
    PlotSwitchpoints(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub kind: CommandKind,
    pub redirect: Option<String>,
    pub pos: Pos,
}

/// `group:component` reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GcPair {
    pub group: String,
    pub component: String,
}

impl std::fmt::Display for GcPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.group, self.component)
    }
}

/// Product of powers of component counts, e.g. `G1:C1^2 G2:C2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Moment {
    pub factors: Vec<(GcPair, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MomentExpr {
    Number(f64),
    Param(String),
    /// `E[m1 + m2 + ...]`
    Expectation(Vec<Moment>),
    /// `Var[p1 + p2 + ...]`
    Variance(Vec<GcPair>),
    Covariance(GcPair, GcPair),
    Central {
        pair: GcPair,
        order: u32,
        standardised: bool,
    },
    Binary {
        op: BinOp,
        left: Box<MomentExpr>,
        right: Box<MomentExpr>,
    },
}

impl MomentExpr {
    pub fn binary(op: BinOp, left: MomentExpr, right: MomentExpr) -> Self {
        MomentExpr::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Visit every group/component reference in the expression.
    pub fn for_each_pair(&self, f: &mut impl FnMut(&GcPair)) {
        match self {
            MomentExpr::Number(_) | MomentExpr::Param(_) => {}
            MomentExpr::Expectation(ms) => {
                for m in ms {
                    for (p, _) in &m.factors {
                        f(p);
                    }
                }
            }
            MomentExpr::Variance(ps) => ps.iter().for_each(f),
            MomentExpr::Covariance(a, b) => {
                f(a);
                f(b);
            }
            MomentExpr::Central { pair, .. } => f(pair),
            MomentExpr::Binary { left, right, .. } => {
                left.for_each_pair(f);
                right.for_each_pair(f);
            }
        }
    }
}
