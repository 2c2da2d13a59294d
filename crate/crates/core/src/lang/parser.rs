//! Recursive-descent parser for GPA files.
//!
//! Beyond the strict grammar the parser accepts numeric literals for rates
//! and multiplicities, an unparenthesised system equation
//! (`A{..}<l>B{..}`), chained prefixes (`(a,r).(b,s).P`), parameter and
//! component definitions in any interleaving, and `comparsion` as a
//! spelling of `comparison`.

use crate::error::ParseError;
use crate::lang::ast::*;
use crate::lang::lexer::{tokenize, Tok, Token};

pub fn parse_model(source: &str) -> Result<ModelFile, ParseError> {
    let tokens = tokenize(source)?;
    Parser { tokens, at: 0 }.file()
}

/// Parse a single moment expression, e.g. `Var[G:C] / E[G:C]`.
pub fn parse_expression(source: &str) -> Result<MomentExpr, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, at: 0 };
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let found = self.peek().describe();
        Err(ParseError {
            pos: self.pos(),
            message: format!("unexpected {found}"),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.advance().pos)
        } else {
            self.error(&[tok.symbol()])
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.advance().pos;
                Ok((s, pos))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.advance();
                Ok(())
            }
            _ => self.error(&[kw]),
        }
    }

    fn is_ident(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn number(&mut self) -> PResult<f64> {
        let negative = self.eat(&Tok::Minus);
        match *self.peek() {
            Tok::Number { value, .. } => {
                self.advance();
                Ok(if negative { -value } else { value })
            }
            _ => self.error(&["number"]),
        }
    }

    fn integer(&mut self) -> PResult<u64> {
        match *self.peek() {
            Tok::Number { value, integral: true } if value <= u64::MAX as f64 => {
                self.advance();
                Ok(value as u64)
            }
            _ => self.error(&["integer"]),
        }
    }

    fn value(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(Value::Param(s))
            }
            Tok::Number { value, .. } => {
                self.advance();
                Ok(Value::Literal(value))
            }
            _ => self.error(&["parameter", "number"]),
        }
    }

    fn file(&mut self) -> PResult<ModelFile> {
        let mut parameters = Vec::new();
        let mut components = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Eq {
            let (name, pos) = self.ident()?;
            self.advance();
            if matches!(self.peek(), Tok::Number { .. } | Tok::Minus) {
                let value = self.number()?;
                self.expect(Tok::Semi)?;
                parameters.push(ParameterDef { name, value, pos });
            } else {
                let body = self.component()?;
                self.expect(Tok::Semi)?;
                components.push(ComponentDef { name, body, pos });
            }
        }
        let system = self.model()?;
        let mut analyses = Vec::new();
        while *self.peek() != Tok::Eof {
            analyses.push(self.analysis()?);
        }
        Ok(ModelFile {
            parameters,
            components,
            system,
            analyses,
        })
    }

    // ---- components -------------------------------------------------------

    fn component(&mut self) -> PResult<Component> {
        let mut left = self.component_primary()?;
        while *self.peek() == Tok::Lt {
            let actions = self.action_set()?;
            let right = self.component_primary()?;
            left = Component::Coop {
                left: Box::new(left),
                actions,
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn starts_prefix(&self) -> bool {
        *self.peek() == Tok::LParen
            && matches!(self.peek_at(1), Tok::Ident(_))
            && *self.peek_at(2) == Tok::Comma
    }

    fn component_primary(&mut self) -> PResult<Component> {
        if self.starts_prefix() {
            return Ok(Component::Sum(self.summation()?));
        }
        match self.peek() {
            Tok::LParen => {
                self.advance();
                let c = self.component()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            Tok::Ident(_) => Ok(Component::Ref(self.ident()?.0)),
            _ => self.error(&["(", "component name"]),
        }
    }

    fn summation(&mut self) -> PResult<Vec<Prefix>> {
        let mut prefixes = vec![self.prefix()?];
        while self.eat(&Tok::Plus) {
            prefixes.push(self.prefix()?);
        }
        Ok(prefixes)
    }

    fn prefix(&mut self) -> PResult<Prefix> {
        let pos = self.expect(Tok::LParen)?;
        let (action, _) = self.ident()?;
        self.expect(Tok::Comma)?;
        let rate = self.value()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        let next = if self.starts_prefix() {
            Continuation::Sum(vec![self.prefix()?])
        } else {
            match self.peek() {
                Tok::LParen => {
                    self.advance();
                    let s = self.summation()?;
                    self.expect(Tok::RParen)?;
                    Continuation::Sum(s)
                }
                Tok::Ident(s) if s == "stop" => {
                    self.advance();
                    Continuation::Stop
                }
                Tok::Ident(_) => Continuation::Named(self.ident()?.0),
                _ => return self.error(&["(", "stop", "component name"]),
            }
        };
        Ok(Prefix {
            action,
            rate,
            next,
            pos,
        })
    }

    fn action_set(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::Lt)?;
        let mut actions: Vec<String> = Vec::new();
        if *self.peek() != Tok::Gt {
            loop {
                let (a, _) = self.ident()?;
                if !actions.contains(&a) {
                    actions.push(a);
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Gt)?;
        Ok(actions)
    }

    // ---- system equation ---------------------------------------------------

    fn model(&mut self) -> PResult<GroupedModel> {
        let mut left = self.model_primary()?;
        while *self.peek() == Tok::Lt {
            let actions = self.action_set()?;
            let right = self.model_primary()?;
            left = GroupedModel::Coop {
                left: Box::new(left),
                actions,
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn model_primary(&mut self) -> PResult<GroupedModel> {
        if self.eat(&Tok::LParen) {
            let m = self.model()?;
            self.expect(Tok::RParen)?;
            return Ok(m);
        }
        let (label, pos) = match self.peek() {
            Tok::Ident(_) => self.ident()?,
            _ => return self.error(&["(", "group label"]),
        };
        self.expect(Tok::LBrace)?;
        let mut members = vec![self.member()?];
        while self.eat(&Tok::Bar) {
            members.push(self.member()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(GroupedModel::Group {
            label,
            members,
            pos,
        })
    }

    fn member(&mut self) -> PResult<GroupMember> {
        let (component, pos) = self.ident()?;
        let multiplicity = if self.eat(&Tok::LBracket) {
            let v = self.value()?;
            self.expect(Tok::RBracket)?;
            Some(v)
        } else {
            None
        };
        Ok(GroupMember {
            component,
            multiplicity,
            pos,
        })
    }

    // ---- analyses ------------------------------------------------------------

    fn analysis(&mut self) -> PResult<Analysis> {
        let pos = self.pos();
        let kind = match self.peek() {
            Tok::Ident(s) if s == "odes" => self.odes_header()?,
            Tok::Ident(s) if s == "simulation" => self.simulation_header()?,
            Tok::Ident(s) if s == "comparison" || s == "comparsion" => {
                self.advance();
                self.expect(Tok::LParen)?;
                let odes = self.nested(&["odes"])?;
                self.expect(Tok::Comma)?;
                let simulation = self.nested(&["simulation"])?;
                self.expect(Tok::RParen)?;
                AnalysisKind::Comparison {
                    odes: Box::new(odes),
                    simulation: Box::new(simulation),
                }
            }
            _ => return self.error(&["odes", "simulation", "comparison"]),
        };
        let commands = self.command_block()?;
        Ok(Analysis {
            kind,
            commands,
            pos,
        })
    }

    fn nested(&mut self, expected: &[&str]) -> PResult<Analysis> {
        let pos = self.pos();
        let kind = if self.is_ident(expected[0]) {
            if expected[0] == "odes" {
                self.odes_header()?
            } else {
                self.simulation_header()?
            }
        } else {
            return self.error(expected);
        };
        let commands = self.command_block()?;
        Ok(Analysis {
            kind,
            commands,
            pos,
        })
    }

    /// Parses `(k1 = v1, k2 = v2, ...)` with the given keys in any order.
    fn named_args(&mut self, keys: &[&str]) -> PResult<Vec<(f64, bool)>> {
        self.expect(Tok::LParen)?;
        let mut values: Vec<Option<(f64, bool)>> = vec![None; keys.len()];
        for n in 0..keys.len() {
            if n > 0 {
                self.expect(Tok::Comma)?;
            }
            let key_pos = self.pos();
            let (key, _) = match self.peek() {
                Tok::Ident(_) => self.ident()?,
                _ => return self.error(keys),
            };
            let Some(slot) = keys.iter().position(|k| *k == key) else {
                return Err(ParseError {
                    pos: key_pos,
                    message: format!("unknown analysis parameter `{key}`"),
                    expected: keys.iter().map(|s| s.to_string()).collect(),
                });
            };
            if values[slot].is_some() {
                return Err(ParseError {
                    pos: key_pos,
                    message: format!("duplicate analysis parameter `{key}`"),
                    expected: Vec::new(),
                });
            }
            self.expect(Tok::Eq)?;
            values[slot] = Some(match *self.peek() {
                Tok::Number { value, integral } => {
                    self.advance();
                    (value, integral)
                }
                _ => return self.error(&["number"]),
            });
        }
        self.expect(Tok::RParen)?;
        Ok(values.into_iter().map(|v| v.expect("all keys filled")).collect())
    }

    fn integer_arg(&self, (value, integral): (f64, bool), name: &str, pos: Pos) -> PResult<u64> {
        if integral {
            Ok(value as u64)
        } else {
            Err(ParseError {
                pos,
                message: format!("`{name}` must be an integer"),
                expected: vec!["integer".into()],
            })
        }
    }

    fn odes_header(&mut self) -> PResult<AnalysisKind> {
        let pos = self.pos();
        self.keyword("odes")?;
        let v = self.named_args(&["stopTime", "stepSize", "density"])?;
        Ok(AnalysisKind::Odes(OdesParams {
            stop_time: v[0].0,
            step_size: v[1].0,
            density: self.integer_arg(v[2], "density", pos)?,
        }))
    }

    fn simulation_header(&mut self) -> PResult<AnalysisKind> {
        let pos = self.pos();
        self.keyword("simulation")?;
        let v = self.named_args(&["stopTime", "stepSize", "replications"])?;
        Ok(AnalysisKind::Simulation(SimulationParams {
            stop_time: v[0].0,
            step_size: v[1].0,
            replications: self.integer_arg(v[2], "replications", pos)?,
        }))
    }

    fn command_block(&mut self) -> PResult<Vec<Command>> {
        self.expect(Tok::LBrace)?;
        let mut commands = Vec::new();
        while !self.eat(&Tok::RBrace) {
            commands.push(self.command()?);
        }
        Ok(commands)
    }

    fn command(&mut self) -> PResult<Command> {
        let pos = self.pos();
        let kind = match self.peek() {
            Tok::Ident(s) if s == "plot" => {
                self.advance();
                self.expect(Tok::LParen)?;
                let mut exprs = vec![self.expr()?];
                while self.eat(&Tok::Comma) {
                    exprs.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                CommandKind::Plot(exprs)
            }
            Tok::Ident(s) if s == "plotSwitchpoints" => {
                self.advance();
                self.expect(Tok::LParen)?;
                let order = self.integer()?;
                self.expect(Tok::RParen)?;
                CommandKind::PlotSwitchpoints(order)
            }
            _ => return self.error(&["plot", "plotSwitchpoints", "}"]),
        };
        let redirect = if self.eat(&Tok::Arrow) {
            match self.peek().clone() {
                Tok::Str(s) => {
                    self.advance();
                    Some(s)
                }
                _ => return self.error(&["string"]),
            }
        } else {
            None
        };
        self.expect(Tok::Semi)?;
        Ok(Command {
            kind,
            redirect,
            pos,
        })
    }

    // ---- moment expressions ----------------------------------------------------

    fn expr(&mut self) -> PResult<MomentExpr> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(left),
            };
            self.advance();
            let right = self.term()?;
            left = MomentExpr::binary(op, left, right);
        }
    }

    fn term(&mut self) -> PResult<MomentExpr> {
        let mut left = self.power()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(left),
            };
            self.advance();
            let right = self.power()?;
            left = MomentExpr::binary(op, left, right);
        }
    }

    fn power(&mut self) -> PResult<MomentExpr> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let exponent = self.power()?;
            return Ok(MomentExpr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<MomentExpr> {
        match self.peek().clone() {
            Tok::Number { value, .. } => {
                self.advance();
                Ok(MomentExpr::Number(value))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::LBracket => {
                self.advance();
                self.advance();
                let e = match name.as_str() {
                    "E" => {
                        let mut moments = vec![self.moment()?];
                        while self.eat(&Tok::Plus) {
                            moments.push(self.moment()?);
                        }
                        MomentExpr::Expectation(moments)
                    }
                    "Var" => {
                        let mut pairs = vec![self.gc_pair()?];
                        while self.eat(&Tok::Plus) {
                            pairs.push(self.gc_pair()?);
                        }
                        MomentExpr::Variance(pairs)
                    }
                    "Cov" => {
                        let a = self.gc_pair()?;
                        self.expect(Tok::Comma)?;
                        let b = self.gc_pair()?;
                        MomentExpr::Covariance(a, b)
                    }
                    "Central" | "StandardisedCentral" => {
                        let pair = self.gc_pair()?;
                        self.expect(Tok::Comma)?;
                        let order = self.small_integer()?;
                        MomentExpr::Central {
                            pair,
                            order,
                            standardised: name == "StandardisedCentral",
                        }
                    }
                    _ => {
                        self.at -= 2;
                        return self.error(&["E", "Var", "Cov", "Central", "StandardisedCentral"]);
                    }
                };
                self.expect(Tok::RBracket)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(MomentExpr::Param(name))
            }
            _ => self.error(&["number", "parameter", "E[", "Var[", "Cov[", "Central[", "("]),
        }
    }

    fn small_integer(&mut self) -> PResult<u32> {
        let pos = self.pos();
        let n = self.integer()?;
        u32::try_from(n).map_err(|_| ParseError {
            pos,
            message: format!("integer {n} is too large"),
            expected: Vec::new(),
        })
    }

    fn moment(&mut self) -> PResult<Moment> {
        let mut factors = Vec::new();
        loop {
            let pair = self.gc_pair()?;
            let exp = if self.eat(&Tok::Caret) {
                self.small_integer()?
            } else {
                1
            };
            factors.push((pair, exp));
            if !matches!(self.peek(), Tok::Ident(_)) {
                return Ok(Moment { factors });
            }
        }
    }

    fn gc_pair(&mut self) -> PResult<GcPair> {
        let (group, _) = self.ident()?;
        self.expect(Tok::Colon)?;
        let (component, _) = self.ident()?;
        Ok(GcPair { group, component })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROC_RES: &str = "r1=2.0; q=14.0;  m=50.0;                r2=14.0; s=2.0;  n=20.0;

Processor0 = (acquire,r1).Processor1;   Resource0 = (acquire,r2).Resource1;
Processor1 = (task,q).Processor0;       Resource1 = (reset,s).Resource0;

      Processors{Processor0[m]}<acquire>Resources{Resource0[n]}
";

    #[test]
    fn processor_resource_listing() {
        let f = parse_model(PROC_RES).unwrap();
        assert_eq!(f.parameters.len(), 6);
        assert_eq!(f.components.len(), 4);
        match &f.system {
            GroupedModel::Coop { actions, .. } => assert_eq!(actions, &["acquire"]),
            other => panic!("expected cooperation, got {other:?}"),
        }
        assert!(f.analyses.is_empty());
    }

    #[test]
    fn minimal_single_group() {
        let f = parse_model("A = (a,r).A;\nG{A[n]}").unwrap();
        assert!(matches!(f.system, GroupedModel::Group { ref label, .. } if label == "G"));
        assert!(f.analyses.is_empty());
    }

    #[test]
    fn empty_cooperation_set() {
        let f = parse_model("A = (a,1).A; (G{A} <> H{A})").unwrap();
        assert!(matches!(f.system, GroupedModel::Coop { ref actions, .. } if actions.is_empty()));
    }

    #[test]
    fn duplicate_actions_collapse() {
        let f = parse_model("A = (a,1).A; G{A} <a, a> H{A}").unwrap();
        assert!(matches!(f.system, GroupedModel::Coop { ref actions, .. } if actions == &["a"]));
    }

    #[test]
    fn analyses_and_commands() {
        let src = format!(
            "{PROC_RES}
odes(stopTime = 3.0,stepSize = 0.001,density=10){{
     plot(E[Processors:Processor0],E[Resources:Resource0]);
     plotSwitchpoints(1) -> \"sw.csv\";
}}
comparsion(odes(stopTime=3.0,stepSize=0.001,density=1000){{}},
    simulation(stopTime=3.0,stepSize=0.001,replications=1000){{}}){{
        plot(Central[Processors:Processor1,4] / Var[Processors:Processor1]^2);
}}"
        );
        let f = parse_model(&src).unwrap();
        assert_eq!(f.analyses.len(), 2);
        assert_eq!(f.analyses[0].commands.len(), 2);
        assert_eq!(f.analyses[0].commands[1].redirect.as_deref(), Some("sw.csv"));
        assert!(matches!(f.analyses[1].kind, AnalysisKind::Comparison { .. }));
    }

    #[test]
    fn expression_precedence() {
        let e = parse_expression("1 + 2 * 3 ^ 2 ^ 1").unwrap();
        let expected = MomentExpr::binary(
            BinOp::Add,
            MomentExpr::Number(1.0),
            MomentExpr::binary(
                BinOp::Mul,
                MomentExpr::Number(2.0),
                MomentExpr::binary(
                    BinOp::Pow,
                    MomentExpr::Number(3.0),
                    MomentExpr::binary(BinOp::Pow, MomentExpr::Number(2.0), MomentExpr::Number(1.0)),
                ),
            ),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn joint_moment() {
        let e = parse_expression("E[G1:C1^2 G2:C2 + G1:C1]").unwrap();
        let MomentExpr::Expectation(ms) = e else { panic!() };
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].factors.len(), 2);
        assert_eq!(ms[0].factors[0].1, 2);
    }

    #[test]
    fn chained_prefix_equals_parenthesised() {
        let a = parse_model("P = (a,1).(b,2).P; G{P}").unwrap();
        let b = parse_model("P = (a,1).((b,2).P); G{P}").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_continuation_is_an_error() {
        let err = parse_model("P = (a,1).; G{P}").unwrap_err();
        assert_eq!((err.pos.line, err.pos.column), (1, 11));
        assert!(err.expected.contains(&"stop".to_string()));
    }

    #[test]
    fn undefined_component_parses() {
        // Resolution happens during validation.
        assert!(parse_model("P = (a,r).Q; G{P}").is_ok());
    }
}
