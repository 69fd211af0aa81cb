use crate::graph::ComparisonGraph;

/// Per-node sums of winning ratios (`w`) and losing ratios (`l`).
pub fn ratio_sums(graph: &ComparisonGraph) -> (Vec<f64>, Vec<f64>) {
    let n = graph.node_count();
    let mut w = vec![0.0; n];
    let mut l = vec![0.0; n];
    for i in 0..n {
        for (_, c) in graph.neighbors(i) {
            w[i] += c.win_ratio();
            l[i] += c.loss_ratio();
        }
    }
    (w, l)
}

/// David's Score: `DS_i = w_i + w2_i - l_i - l2_i`, where `w2_i` sums the
/// win totals of the opponents `i` beat, weighted by `i`'s winning ratio
/// against them, and `l2_i` likewise for losses.
///
/// Uncompared nodes score 0. The graph may be disconnected.
pub fn davids_score(graph: &ComparisonGraph) -> Vec<f64> {
    let n = graph.node_count();
    let (w, l) = ratio_sums(graph);
    (0..n)
        .map(|i| {
            let (mut w2, mut l2) = (0.0, 0.0);
            for (j, c) in graph.neighbors(i) {
                w2 += c.win_ratio() * w[j];
                l2 += c.loss_ratio() * l[j];
            }
            w[i] + w2 - l[i] - l2
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_scores_zero() {
        assert_eq!(davids_score(&ComparisonGraph::new(3)), vec![0.0; 3]);
    }

    #[test]
    fn three_chain() {
        let mut g = ComparisonGraph::new(3);
        g.record(0, 1).unwrap();
        g.record(0, 2).unwrap();
        g.record(1, 2).unwrap();
        let (w, l) = ratio_sums(&g);
        assert_eq!(w, vec![2.0, 1.0, 0.0]);
        assert_eq!(l, vec![0.0, 1.0, 2.0]);
        assert_eq!(davids_score(&g), vec![3.0, 0.0, -3.0]);
    }

    #[test]
    fn disjoint_cliques_tie_globally() {
        let mut g = ComparisonGraph::new(4);
        g.record(0, 1).unwrap();
        g.record(2, 3).unwrap();
        assert_eq!(davids_score(&g), vec![1.0, -1.0, 1.0, -1.0]);
    }
}
