use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::rule::{Literal, NonGroundProgram, Predicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyEdge {
    pub head: Predicate,
    pub body: Predicate,
    pub polarity: Polarity,
}

/// Predicate dependency graph with its strongly connected components in
/// evaluation order: every component depends only on itself and on
/// components listed before it.
#[derive(Debug, Clone)]
pub struct PredicateDependencyGraph {
    pub predicates: Vec<Predicate>,
    pub edges: Vec<DependencyEdge>,
    pub components: Vec<Vec<Predicate>>,
    component_of: HashMap<Predicate, usize>,
    recursive: Vec<bool>,
}

impl PredicateDependencyGraph {
    pub fn build(program: &NonGroundProgram) -> Self {
        let mut graph: DiGraph<Predicate, Polarity> = DiGraph::new();
        let mut nodes: HashMap<Predicate, NodeIndex> = HashMap::new();
        let mut node = |graph: &mut DiGraph<Predicate, Polarity>, p: Predicate| {
            *nodes.entry(p.clone()).or_insert_with(|| graph.add_node(p))
        };

        let mut edges = Vec::new();
        for rule in &program.rules {
            let head = rule.head.as_ref().map(|h| h.signature());
            let head_node = head.clone().map(|h| node(&mut graph, h));
            for lit in &rule.body {
                let (atom, polarity) = match lit {
                    Literal::Pos(a) => (a, Polarity::Positive),
                    Literal::Neg(a) => (a, Polarity::Negative),
                    Literal::Cmp(..) => continue,
                };
                let body = atom.signature();
                let body_node = node(&mut graph, body.clone());
                if let (Some(h), Some(hn)) = (&head, head_node) {
                    let edge = DependencyEdge { head: h.clone(), body, polarity };
                    if !edges.contains(&edge) {
                        graph.add_edge(hn, body_node, polarity);
                        edges.push(edge);
                    }
                }
            }
        }

        // tarjan_scc yields components in reverse topological order of the
        // edge direction head -> body, i.e. bodies before heads.
        let mut components: Vec<Vec<Predicate>> = tarjan_scc(&graph)
            .into_iter()
            .map(|scc| {
                let mut preds: Vec<Predicate> = scc.into_iter().map(|n| graph[n].clone()).collect();
                preds.sort();
                preds
            })
            .collect();
        components.retain(|c| !c.is_empty());

        let mut component_of = HashMap::new();
        for (i, comp) in components.iter().enumerate() {
            for p in comp {
                component_of.insert(p.clone(), i);
            }
        }
        let recursive = components
            .iter()
            .enumerate()
            .map(|(i, comp)| {
                comp.len() > 1 || edges.iter().any(|e| e.head == e.body && component_of.get(&e.head) == Some(&i))
            })
            .collect();

        let predicates = graph.node_weights().cloned().collect();
        PredicateDependencyGraph { predicates, edges, components, component_of, recursive }
    }

    pub fn component_of(&self, p: &Predicate) -> Option<usize> {
        self.component_of.get(p).copied()
    }

    pub fn is_recursive(&self, component: usize) -> bool {
        self.recursive[component]
    }

    /// True if some edge inside the component is negative.
    pub fn has_internal_negation(&self, component: usize) -> bool {
        self.edges.iter().any(|e| {
            e.polarity == Polarity::Negative
                && self.component_of(&e.head) == Some(component)
                && self.component_of(&e.body) == Some(component)
        })
    }
}
