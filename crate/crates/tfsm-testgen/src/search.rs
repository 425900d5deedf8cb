//! Distinguishing-sequence search over the synchronous product of a
//! reference machine and a mutant.
//!
//! Both machines read the same timed input stream; a distinguishing sequence
//! is one whose output streams differ. The search walks the product
//! breadth-first over a discretized action grid:
//!
//! * a *wait* action advances both machines to the earliest pending timeout
//!   deadline;
//! * an *input* action sends one symbol at `now + delta`, where delta is 1ms
//!   or derived from a machine's pending deadline `B` ms away: `B/2` rounded
//!   up, `B-1`, and `B` itself (an input stamped exactly at a deadline lands
//!   just after the firing);
//! * integer parameters come from the models' integer literals, each taken
//!   with its neighbors, plus {0, 1}; string parameters from the models'
//!   string literals plus a fresh `"a"`.
//!
//! Nodes deduplicate on both configurations minus absolute time, so cyclic
//! behavior terminates. Breadth-first order with a fixed expansion order —
//! wait first, then deltas ascending, inputs in declaration order, params in
//! pool order — makes the returned test shortest in actions taken (waits
//! plus inputs), with deterministic tie-breaking.

use std::collections::{BTreeSet, HashSet, VecDeque};

use tfsm_core::{
    Configuration, Env, Expr, Guard, Millis, TestCase, TestStep, TimedInput, TimedStateMachine,
    Update, Value, VarKind,
};

pub use tfsm_core::StepError;

/// Tunables for the product search.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Maximum actions (waits plus inputs) in a distinguishing sequence.
    pub max_steps: usize,
    /// Maximum product nodes dequeued before a mutant is declared not
    /// distinguishable within budget.
    pub node_budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_steps: 12,
            node_budget: 250_000,
        }
    }
}

/// Parameter value pools used for input actions, derived from the machines
/// under comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPools {
    pub ints: Vec<i64>,
    pub strings: Vec<String>,
}

fn walk_expr(e: &Expr, ints: &mut BTreeSet<i64>, strings: &mut Vec<String>) {
    match e {
        Expr::Lit(Value::Int(i)) => {
            ints.insert(i.saturating_sub(1));
            ints.insert(*i);
            ints.insert(i.saturating_add(1));
        }
        Expr::Lit(Value::Str(s)) => {
            if !strings.contains(s) {
                strings.push(s.clone());
            }
        }
        Expr::Var(_) | Expr::Param => {}
        Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            walk_expr(a, ints, strings);
            walk_expr(b, ints, strings);
        }
    }
}

fn walk_guard(g: &Guard, ints: &mut BTreeSet<i64>, strings: &mut Vec<String>) {
    for c in &g.clauses {
        walk_expr(&c.lhs, ints, strings);
        walk_expr(&c.rhs, ints, strings);
    }
}

fn walk_update(u: &Update, ints: &mut BTreeSet<i64>, strings: &mut Vec<String>) {
    for (_, e) in &u.assignments {
        walk_expr(e, ints, strings);
    }
}

/// Derive the parameter pools from every machine in play.
pub fn param_pools(machines: &[&TimedStateMachine]) -> ParamPools {
    let mut ints: BTreeSet<i64> = BTreeSet::from([0, 1]);
    let mut strings: Vec<String> = Vec::new();
    for m in machines {
        for v in &m.variables {
            match &v.init {
                Value::Int(i) => {
                    ints.insert(i.saturating_sub(1));
                    ints.insert(*i);
                    ints.insert(i.saturating_add(1));
                }
                Value::Str(s) => {
                    if !strings.contains(s) {
                        strings.push(s.clone());
                    }
                }
            }
        }
        for t in &m.transitions {
            if let Some(g) = &t.guard {
                walk_guard(g, &mut ints, &mut strings);
            }
            if let Some(u) = &t.update {
                walk_update(u, &mut ints, &mut strings);
            }
        }
    }
    if !strings.iter().any(|s| s == "a") {
        strings.push("a".to_string());
    }
    ParamPools {
        ints: ints.into_iter().collect(),
        strings,
    }
}

type Key = (String, Env, Millis, String, Env, Millis);

fn node_key(spec: &Configuration, mutant: &Configuration) -> Key {
    (
        spec.state.clone(),
        spec.env.clone(),
        spec.clock,
        mutant.state.clone(),
        mutant.env.clone(),
        mutant.clock,
    )
}

fn next_deadline(m: &TimedStateMachine, c: &Configuration) -> Option<Millis> {
    m.timeout(&c.state)
        .and_then(|t| t.rule.after())
        .map(|after| c.now - c.clock + after)
}

/// The delta grid for input actions from a product node.
pub fn candidate_deltas(
    spec: &TimedStateMachine,
    s_cfg: &Configuration,
    mutant: &TimedStateMachine,
    m_cfg: &Configuration,
) -> Vec<Millis> {
    let mut ds: BTreeSet<Millis> = BTreeSet::from([1]);
    for (m, c) in [(spec, s_cfg), (mutant, m_cfg)] {
        if let Some(deadline) = next_deadline(m, c) {
            let remaining = deadline - c.now;
            ds.insert(remaining);
            if remaining > 1 {
                ds.insert(remaining - 1);
            }
            ds.insert(remaining.div_ceil(2).max(1));
        }
    }
    ds.into_iter().collect()
}

struct Entry {
    spec: Configuration,
    mutant: Configuration,
    /// Parent arena index plus the input taken on that edge; wait edges
    /// carry no input.
    parent: Option<(usize, Option<TestStep>)>,
    depth: usize,
}

fn path_steps(arena: &[Entry], mut ix: usize) -> Vec<TestStep> {
    let mut steps = Vec::new();
    while let Some((parent, step)) = &arena[ix].parent {
        if let Some(s) = step {
            steps.push(s.clone());
        }
        ix = *parent;
    }
    steps.reverse();
    steps
}

/// Search for a shortest timed input sequence whose outputs separate `spec`
/// from `mutant`. `Ok(None)` means no divergence was found within the step
/// and node budget — the mutant survives as potentially equivalent.
pub fn distinguish(
    spec: &TimedStateMachine,
    mutant: &TimedStateMachine,
    test_id: &str,
    config: &SearchConfig,
) -> Result<Option<TestCase>, StepError> {
    let pools = param_pools(&[spec, mutant]);
    let mut arena = vec![Entry {
        spec: spec.initial_config(),
        mutant: mutant.initial_config(),
        parent: None,
        depth: 0,
    }];
    let mut seen: HashSet<Key> = HashSet::new();
    seen.insert(node_key(&arena[0].spec, &arena[0].mutant));
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    let mut dequeued = 0usize;

    while let Some(ix) = queue.pop_front() {
        dequeued += 1;
        if dequeued > config.node_budget {
            return Ok(None);
        }
        let (s_cfg, m_cfg, depth) = {
            let e = &arena[ix];
            (e.spec.clone(), e.mutant.clone(), e.depth)
        };
        if depth >= config.max_steps {
            continue;
        }

        let push_child = |arena: &mut Vec<Entry>,
                          queue: &mut VecDeque<usize>,
                          seen: &mut HashSet<Key>,
                          s2: Configuration,
                          m2: Configuration,
                          step: Option<TestStep>| {
            let key = node_key(&s2, &m2);
            if seen.insert(key) {
                arena.push(Entry {
                    spec: s2,
                    mutant: m2,
                    parent: Some((ix, step)),
                    depth: depth + 1,
                });
                queue.push_back(arena.len() - 1);
            }
        };

        // Wait through the earliest pending deadline. Timeout firings are
        // silent on both sides, so waiting can never itself distinguish —
        // it only opens up new input territory.
        let wait_to = [
            next_deadline(spec, &s_cfg),
            next_deadline(mutant, &m_cfg),
        ]
        .into_iter()
        .flatten()
        .min();
        if let Some(at) = wait_to {
            let (s2, _) = spec.advance(&s_cfg, at)?;
            let (m2, _) = mutant.advance(&m_cfg, at)?;
            push_child(&mut arena, &mut queue, &mut seen, s2, m2, None);
        }

        for delta in candidate_deltas(spec, &s_cfg, mutant, &m_cfg) {
            let at = s_cfg.now + delta;
            for input in &spec.inputs {
                let params: Vec<Option<Value>> = match input.param {
                    None => vec![None],
                    Some(VarKind::Int) => {
                        pools.ints.iter().map(|i| Some(Value::Int(*i))).collect()
                    }
                    Some(VarKind::Str) => pools
                        .strings
                        .iter()
                        .map(|s| Some(Value::Str(s.clone())))
                        .collect(),
                };
                for param in params {
                    let timed = TimedInput {
                        symbol: input.name.clone(),
                        param,
                        at,
                    };
                    let (s2, s_out, _) = spec.step_input(&s_cfg, &timed)?;
                    let (m2, m_out, _) = mutant.step_input(&m_cfg, &timed)?;
                    let step = TestStep {
                        input: timed,
                        expect: s_out.clone(),
                    };
                    if s_out != m_out {
                        let mut steps = path_steps(&arena, ix);
                        steps.push(step);
                        return Ok(Some(TestCase::new(test_id, steps)));
                    }
                    push_child(&mut arena, &mut queue, &mut seen, s2, m2, Some(step));
                }
            }
        }
    }
    Ok(None)
}
