//! Seeded synthetic workloads for comparing incremental and scratch grounding.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{FactSet, GroundAtom, Value};

pub const REACH_PROGRAM: &str = "\
reach(X,Y) :- edge(X,Y).
reach(X,Z) :- reach(X,Y), edge(Y,Z).
";

pub const GRID_PROGRAM: &str = "\
free(C) :- cell(C), not blocked(C).
reach(C) :- at(C), free(C).
reach(D) :- reach(C), adj(C,D), free(D).
done :- goal(C), reach(C).
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Transitive closure over a growing random edge set. Each shot keeps at
    /// least 80% of the previous shot's edges and adds `edges_per_shot` new ones.
    ReachStream { nodes: u32, shots: usize, edges_per_shot: usize },
    /// Reachability for an agent taking one random step per shot on a
    /// `side`×`side` grid whose obstacles shift slightly between shots.
    GridAgent { side: u32, steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchSpec {
    pub generator: Generator,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workload {
    pub program: String,
    pub shots: Vec<FactSet>,
}

impl Workload {
    /// Writes `program.lp` and `shot-NNN.facts` into `dir`.
    pub fn emit(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("program.lp"), &self.program)?;
        for (i, shot) in self.shots.iter().enumerate() {
            std::fs::write(dir.join(format!("shot-{:03}.facts", i + 1)), shot.render())?;
        }
        Ok(())
    }
}

fn int_atom(pred: &str, args: &[u32]) -> GroundAtom {
    GroundAtom::new(pred, args.iter().map(|&n| Value::Int(n.into())).collect())
}

pub fn generate(spec: &BenchSpec) -> Result<Workload, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.generator {
        Generator::ReachStream { nodes, shots, edges_per_shot } => reach_stream(&mut rng, nodes, shots, edges_per_shot),
        Generator::GridAgent { side, steps } => grid_agent(&mut rng, side, steps),
    }
}

fn reach_stream(rng: &mut ChaCha8Rng, nodes: u32, shots: usize, per_shot: usize) -> Result<Workload, String> {
    if nodes < 2 {
        return Err("reach-stream needs at least 2 nodes".into());
    }
    let capacity = u64::from(nodes) * u64::from(nodes - 1);
    if (shots as u64).saturating_mul(per_shot as u64) > capacity {
        return Err(format!("{nodes} nodes cannot hold {shots}×{per_shot} distinct edges"));
    }
    let drop = per_shot / 5;
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut out = Vec::with_capacity(shots);
    for i in 0..shots {
        if i > 0 {
            let current: Vec<_> = edges.iter().copied().collect();
            for e in current.choose_multiple(rng, drop) {
                edges.remove(e);
            }
        }
        let target = edges.len() + per_shot;
        while edges.len() < target {
            let (a, b) = (rng.gen_range(1..=nodes), rng.gen_range(1..=nodes));
            if a != b {
                edges.insert((a, b));
            }
        }
        out.push(edges.iter().map(|&(a, b)| int_atom("edge", &[a, b])).collect());
    }
    Ok(Workload { program: REACH_PROGRAM.to_string(), shots: out })
}

fn grid_agent(rng: &mut ChaCha8Rng, side: u32, steps: usize) -> Result<Workload, String> {
    if side < 2 {
        return Err("grid-agent needs side >= 2".into());
    }
    let cells = side * side;
    let id = |x: u32, y: u32| y * side + x + 1;
    let neighbours = |c: u32| {
        let (x, y) = ((c - 1) % side, (c - 1) / side);
        let mut n = Vec::with_capacity(4);
        if x > 0 {
            n.push(id(x - 1, y));
        }
        if x + 1 < side {
            n.push(id(x + 1, y));
        }
        if y > 0 {
            n.push(id(x, y - 1));
        }
        if y + 1 < side {
            n.push(id(x, y + 1));
        }
        n
    };

    let goal = cells;
    let mut at = 1;
    let mut blocked: BTreeSet<u32> = (1..=cells).filter(|_| rng.gen_bool(0.15)).collect();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        blocked.remove(&at);
        blocked.remove(&goal);
        let mut facts = FactSet::new();
        for c in 1..=cells {
            facts.insert(int_atom("cell", &[c]));
            for d in neighbours(c) {
                facts.insert(int_atom("adj", &[c, d]));
            }
        }
        facts.insert(int_atom("goal", &[goal]));
        facts.insert(int_atom("at", &[at]));
        for &b in &blocked {
            facts.insert(int_atom("blocked", &[b]));
        }
        out.push(facts);

        let moves: Vec<u32> = neighbours(at).into_iter().filter(|d| !blocked.contains(d)).collect();
        if let Some(&next) = moves.choose(rng) {
            at = next;
        }
        // Shift one obstacle.
        if let Some(&gone) = blocked.iter().copied().collect::<Vec<_>>().choose(rng) {
            blocked.remove(&gone);
        }
        blocked.insert(rng.gen_range(1..=cells));
    }
    Ok(Workload { program: GRID_PROGRAM.to_string(), shots: out })
}
