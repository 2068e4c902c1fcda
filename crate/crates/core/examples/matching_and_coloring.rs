//! Matchings and edge coloring on a small bipartite multigraph.

use switchsched::matching::{edge_color_bipartite, expand_to_unit_graph, is_matching, max_cardinality_matching, max_weight_matching, BipartiteMultigraph};

pub fn run_example() {
    let mut g = BipartiteMultigraph::new(3, 3);
    for (k, (l, r)) in [(0, 0), (0, 1), (1, 1), (1, 1), (2, 2), (2, 0), (0, 2)].into_iter().enumerate() {
        g.add_edge(l, r, k);
    }

    let m = max_cardinality_matching(&g);
    println!("max cardinality {:?} (matching: {})", m, is_matching(&g, &m));

    let weights = [1.0, 5.0, 2.0, 2.5, 1.0, 4.0, 0.5];
    println!("max weight {:?}", max_weight_matching(&g, &weights));

    // Max degree equals the number of colors.
    let colors = edge_color_bipartite(&g);
    println!("degree {} colors {}", g.max_degree(), colors.len());
    for (c, class) in colors.iter().enumerate() {
        println!("  color {c}: {class:?}");
    }

    // Port capacity 2 on the left halves the colors needed there.
    let unit = expand_to_unit_graph(&g, &[2, 2, 2], &[1, 2, 1]);
    println!("expanded to {}x{}, {} colors", unit.graph.left_count(), unit.graph.right_count(), edge_color_bipartite(&unit.graph).len());
}

fn main() {
    run_example();
}
