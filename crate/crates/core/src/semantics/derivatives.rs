use std::collections::{HashMap, VecDeque};

use crate::lang::validate::{target_name, Target, ValidatedModel};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalTransition {
    pub action: String,
    pub rate: f64,
    /// Index of the target derivative within the owning graph.
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub name: String,
    pub transitions: Vec<LocalTransition>,
}

/// Derivatives reachable from a set of start components, in breadth-first
/// discovery order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DerivativeGraph {
    pub derivatives: Vec<Derivative>,
}

impl DerivativeGraph {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.derivatives.iter().position(|d| d.name == name)
    }
}

/// Transitive closure of the named start components under prefix and
/// choice. `stop` is a derivative without transitions.
pub fn explore_derivatives(vm: &ValidatedModel, starts: &[String]) -> DerivativeGraph {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut targets: Vec<Target> = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |t: &Target, targets: &mut Vec<Target>, queue: &mut VecDeque<usize>| -> usize {
        let name = target_name(t);
        *index.entry(name).or_insert_with(|| {
            targets.push(t.clone());
            queue.push_back(targets.len() - 1);
            targets.len() - 1
        })
    };

    for s in starts {
        intern(&Target::Named(s.clone()), &mut targets, &mut queue);
    }

    let mut transitions: Vec<Vec<LocalTransition>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let t = targets[i].clone();
        let mut local = Vec::new();
        for p in vm.behaviour(&t) {
            let target = intern(&p.next, &mut targets, &mut queue);
            local.push(LocalTransition {
                action: p.action.clone(),
                rate: p.rate,
                target,
            });
        }
        if transitions.len() <= i {
            transitions.resize(i + 1, Vec::new());
        }
        transitions[i] = local;
    }
    transitions.resize(targets.len(), Vec::new());

    DerivativeGraph {
        derivatives: targets
            .iter()
            .zip(transitions)
            .map(|(t, transitions)| Derivative {
                name: target_name(t),
                transitions,
            })
            .collect(),
    }
}
