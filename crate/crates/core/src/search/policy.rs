//! The scalar formulas steering selection.

/// Prior policy of the child with rank `i` among the productive children
/// of a goal: `(1 - c)^i * c`.
pub fn prior_policy(c: f64, i: usize) -> f64 {
    (1.0 - c).powi(i as i32) * c
}

/// Weight of trying one more tactic on a goal that already has `n`
/// children. It equals the prior the next child would get.
pub fn widening_policy(c: f64, n: usize) -> f64 {
    prior_policy(c, n)
}

/// `(1 + visit(child)) / sqrt(visit(parent))`.
pub fn cur_policy(child_visit: u64, parent_visit: u64) -> f64 {
    assert!(parent_visit > 0, "a selectable child implies a visited parent");
    (1.0 + child_visit as f64) / (parent_visit as f64).sqrt()
}

/// Average prior evaluation over the descendants, failures included in
/// the denominator. Zero for an empty denominator.
pub fn cur_evaluation(eval_sum: f64, descendants: usize, failure: u64) -> f64 {
    let d = descendants as f64 + failure as f64;
    if d == 0.0 {
        0.0
    } else {
        eval_sum / d
    }
}

/// Selection value of a child: current evaluation plus weighted
/// exploration `prior / cur_policy`.
pub fn node_value(cur_eval: f64, prior: f64, child_visit: u64, parent_visit: u64, c_exploration: f64) -> f64 {
    cur_eval + c_exploration * prior / cur_policy(child_visit, parent_visit)
}

/// Fraction of positives among the `k` nearest lists. A short
/// neighbourhood still divides by `k`.
pub fn evaluation_ratio(positives: usize, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        positives as f64 / k as f64
    }
}
