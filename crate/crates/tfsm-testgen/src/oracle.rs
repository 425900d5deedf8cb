//! An independent divergence oracle used to cross-check the product search.
//!
//! Where [`crate::search::distinguish`] runs a breadth-first search with an
//! arena of paths, this oracle answers only the yes/no question — "can any
//! action sequence of at most `max_steps` actions over the same grid make
//! the outputs differ?" — by depth-first traversal with memoization on
//! (product state, remaining depth). Depth-bounded reachability does not
//! depend on traversal order, so on the same grid the two must agree; any
//! disagreement is a bug in one of them.

use std::collections::HashMap;

use tfsm_core::{Configuration, Env, Millis, StepError, TimedInput, TimedStateMachine, Value, VarKind};

use crate::search::{candidate_deltas, param_pools, ParamPools, SearchConfig};

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

struct Oracle<'a> {
    spec: &'a TimedStateMachine,
    mutant: &'a TimedStateMachine,
    pools: ParamPools,
    /// Product states known to hold no divergence within the stored number
    /// of remaining actions.
    settled: HashMap<Key, usize>,
    visits: usize,
    budget: usize,
}

enum Verdict {
    Diverges,
    Silent,
    BudgetExhausted,
}

impl Oracle<'_> {
    fn explore(
        &mut self,
        s_cfg: &Configuration,
        m_cfg: &Configuration,
        remaining: usize,
    ) -> Result<Verdict, StepError> {
        if remaining == 0 {
            return Ok(Verdict::Silent);
        }
        self.visits += 1;
        if self.visits > self.budget {
            return Ok(Verdict::BudgetExhausted);
        }
        let key = node_key(s_cfg, m_cfg);
        if let Some(&settled) = self.settled.get(&key) {
            if settled >= remaining {
                return Ok(Verdict::Silent);
            }
        }

        let wait_to = [
            self.next_deadline(self.spec, s_cfg),
            self.next_deadline(self.mutant, m_cfg),
        ]
        .into_iter()
        .flatten()
        .min();
        if let Some(at) = wait_to {
            let (s2, _) = self.spec.advance(s_cfg, at)?;
            let (m2, _) = self.mutant.advance(m_cfg, at)?;
            match self.explore(&s2, &m2, remaining - 1)? {
                Verdict::Silent => {}
                other => return Ok(other),
            }
        }

        for delta in candidate_deltas(self.spec, s_cfg, self.mutant, m_cfg) {
            let at = s_cfg.now + delta;
            for input in &self.spec.inputs {
                let params: Vec<Option<Value>> = match input.param {
                    None => vec![None],
                    Some(VarKind::Int) => {
                        self.pools.ints.iter().map(|i| Some(Value::Int(*i))).collect()
                    }
                    Some(VarKind::Str) => self
                        .pools
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
                    let (s2, s_out, _) = self.spec.step_input(s_cfg, &timed)?;
                    let (m2, m_out, _) = self.mutant.step_input(m_cfg, &timed)?;
                    if s_out != m_out {
                        return Ok(Verdict::Diverges);
                    }
                    match self.explore(&s2, &m2, remaining - 1)? {
                        Verdict::Silent => {}
                        other => return Ok(other),
                    }
                }
            }
        }

        // Only completed, divergence-free explorations are memoized; a
        // deeper later visit may still find something.
        let slot = self.settled.entry(key).or_insert(0);
        if *slot < remaining {
            *slot = remaining;
        }
        Ok(Verdict::Silent)
    }

    fn next_deadline(&self, m: &TimedStateMachine, c: &Configuration) -> Option<Millis> {
        m.timeout(&c.state)
            .and_then(|t| t.rule.after())
            .map(|after| c.now - c.clock + after)
    }
}

/// `Some(true)` — divergence reachable within the budgeted depth;
/// `Some(false)` — exhaustively silent; `None` — the visit budget ran out
/// before the question was settled.
pub fn oracle_distinguish(
    spec: &TimedStateMachine,
    mutant: &TimedStateMachine,
    config: &SearchConfig,
) -> Result<Option<bool>, StepError> {
    let mut oracle = Oracle {
        spec,
        mutant,
        pools: param_pools(&[spec, mutant]),
        settled: HashMap::new(),
        visits: 0,
        budget: 1_000_000,
    };
    let s0 = spec.initial_config();
    let m0 = mutant.initial_config();
    Ok(match oracle.explore(&s0, &m0, config.max_steps)? {
        Verdict::Diverges => Some(true),
        Verdict::Silent => Some(false),
        Verdict::BudgetExhausted => None,
    })
}
