use serde::Serialize;

use super::policy::cur_evaluation;
use crate::goalsys::{Goal, GoalKey, TacticCode};

pub type NodeId = usize;

/// A tactic applied to a goal and the node holding its output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppliedTactic {
    pub code: TacticCode,
    pub child: NodeId,
}

/// One goal of a node with the tactics tried on it so far.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoalSlot {
    pub goal: Goal,
    /// Productive applications in creation order; the position is the
    /// child's rank for the prior policy.
    pub applied: Vec<AppliedTactic>,
    pub solved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchNode {
    pub id: NodeId,
    /// Parent node and the index of the goal this node was produced from.
    pub parent: Option<(NodeId, usize)>,
    pub goals: Vec<GoalSlot>,
    pub prior_eval: f64,
    pub prior_policy: f64,
    pub visit: u64,
    /// Failed extensions of this node or any descendant.
    pub failure: u64,
    /// Failed extensions of this node itself.
    pub own_failures: u64,
    /// Sum of `prior_eval` over the descendants, this node included.
    pub eval_sum: f64,
    /// Number of descendants, this node included.
    pub descendants: usize,
    pub solved: bool,
    pub depth: usize,
    /// Whether the open goal may still have untried tactics. Fresh open
    /// goals count as untried until their candidate list is exhausted.
    pub untried: bool,
    /// False once some ancestor goal is solved through another child: the
    /// node can then never be selected again.
    pub live: bool,
}

impl SearchNode {
    /// First unsolved goal; `None` exactly when the node is solved.
    pub fn open_goal(&self) -> Option<usize> {
        self.goals.iter().position(|s| !s.solved)
    }

    pub fn cur_evaluation(&self) -> f64 {
        cur_evaluation(self.eval_sum, self.descendants, self.failure)
    }

    /// Children of every goal, goal by goal in creation order.
    pub fn children(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.goals.iter().flat_map(|s| s.applied.iter().map(|a| a.child))
    }

    pub fn goal_list(&self) -> Vec<Goal> {
        self.goals.iter().map(|s| s.goal.clone()).collect()
    }
}

/// Nodes of a search in creation order; the root is node 0.
#[derive(Clone, Debug, Serialize)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
    /// Live unsolved nodes whose open goal may have untried tactics.
    extendable: usize,
}

impl SearchTree {
    /// Tree holding only the conjecture.
    pub fn new(conjecture: Goal, root_eval: f64) -> SearchTree {
        let mut tree = SearchTree {
            nodes: Vec::new(),
            extendable: 0,
        };
        tree.push(None, vec![conjecture], root_eval, 1.0);
        tree
    }

    pub const ROOT: NodeId = 0;

    pub fn root(&self) -> &SearchNode {
        &self.nodes[Self::ROOT]
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[SearchNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_proved(&self) -> bool {
        self.root().solved
    }

    /// No live open goal has a tactic left to try.
    pub fn is_saturated(&self) -> bool {
        self.extendable == 0
    }

    /// Whether the node counts towards `extendable`.
    fn counts(n: &SearchNode) -> bool {
        n.live && !n.solved && n.untried
    }

    fn update(&mut self, id: NodeId, f: impl FnOnce(&mut SearchNode)) {
        let before = Self::counts(&self.nodes[id]);
        f(&mut self.nodes[id]);
        let after = Self::counts(&self.nodes[id]);
        match (before, after) {
            (false, true) => self.extendable += 1,
            (true, false) => self.extendable -= 1,
            _ => {}
        }
    }

    fn push(&mut self, parent: Option<(NodeId, usize)>, goals: Vec<Goal>, prior_eval: f64, prior_policy: f64) -> NodeId {
        let id = self.nodes.len();
        let depth = parent.map_or(0, |(p, _)| self.nodes[p].depth + 1);
        let solved = goals.is_empty();
        let node = SearchNode {
            id,
            parent,
            goals: goals
                .into_iter()
                .map(|goal| GoalSlot {
                    goal,
                    applied: Vec::new(),
                    solved: false,
                })
                .collect(),
            prior_eval,
            prior_policy,
            visit: 0,
            failure: 0,
            own_failures: 0,
            eval_sum: prior_eval,
            descendants: 1,
            solved,
            depth,
            untried: true,
            live: true,
        };
        if Self::counts(&node) {
            self.extendable += 1;
        }
        self.nodes.push(node);
        id
    }

    /// Node ids from the root down to `id`.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some((p, _)) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Canonical keys of every goal in `id` and its ancestors.
    pub fn ancestor_goal_keys(&self, id: NodeId) -> Vec<GoalKey> {
        self.path_to(id)
            .into_iter()
            .flat_map(|n| self.nodes[n].goals.iter().map(|s| s.goal.key()))
            .collect()
    }

    /// True when `id` or one of its ancestors is solved.
    pub fn under_solved(&self, id: NodeId) -> bool {
        self.path_to(id).iter().any(|&n| self.nodes[n].solved)
    }

    /// The open goal of `id` has no tactic left.
    pub fn mark_exhausted(&mut self, id: NodeId) {
        self.update(id, |n| n.untried = false);
    }

    /// Attaches the output of `code` on goal `goal` of `parent`. Statistics
    /// are untouched until [`SearchTree::backpropagate`].
    pub fn add_child(
        &mut self,
        parent: NodeId,
        goal: usize,
        code: TacticCode,
        output: Vec<Goal>,
        prior_eval: f64,
        prior_policy: f64,
    ) -> NodeId {
        let id = self.push(Some((parent, goal)), output, prior_eval, prior_policy);
        self.nodes[parent].goals[goal].applied.push(AppliedTactic { code, child: id });
        id
    }

    /// Updates the statistics of the traversed `path` after one step.
    /// `created` is the node added by a successful extension; `None`
    /// records a failure.
    pub fn backpropagate(&mut self, path: &[NodeId], created: Option<NodeId>) {
        for &id in path {
            self.nodes[id].visit += 1;
        }
        match created {
            Some(child) => {
                let eval = self.nodes[child].prior_eval;
                self.nodes[child].visit += 1;
                for &id in path {
                    let n = &mut self.nodes[id];
                    n.eval_sum += eval;
                    n.descendants += 1;
                }
                if self.nodes[child].solved {
                    self.propagate_solved(child);
                }
            }
            None => {
                for &id in path {
                    self.nodes[id].failure += 1;
                }
                if let Some(&last) = path.last() {
                    self.nodes[last].own_failures += 1;
                }
            }
        }
    }

    /// `id` has just become solved: mark its goal in the parent solved and
    /// continue upwards while whole nodes become solved.
    fn propagate_solved(&mut self, id: NodeId) {
        let mut cur = id;
        while let Some((p, gi)) = self.nodes[cur].parent {
            if self.nodes[p].goals[gi].solved {
                return;
            }
            self.nodes[p].goals[gi].solved = true;
            let siblings: Vec<NodeId> = self.nodes[p].goals[gi].applied.iter().map(|a| a.child).collect();
            for s in siblings {
                if s != cur {
                    self.kill(s);
                }
            }
            let all = self.nodes[p].goals.iter().all(|s| s.solved);
            // the next goal becomes open with its tactics still unknown
            self.update(p, |n| {
                n.solved = all;
                n.untried = true;
            });
            if !all {
                return;
            }
            cur = p;
        }
    }

    fn kill(&mut self, id: NodeId) {
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if !self.nodes[n].live {
                continue;
            }
            self.update(n, |x| x.live = false);
            stack.extend(self.nodes[n].children());
        }
    }
}
