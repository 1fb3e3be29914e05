mod common;

use common::id;
use netmap_core::clustering::Grouping;
use netmap_core::graph::{EdgeKind, GraphBuilder};
use netmap_core::layout::{aggregate_group_graph, fr_layout, render_svg, LayoutConfig, LayoutGraph, SvgStyle};
use netmap_core::metrics::{heterophily, TieCounts};
use proptest::prelude::*;

const GROUPS: [(&str, usize); 8] = [
    ("Conservative Politics", 1637),
    ("Euro-Right", 398),
    ("Government and Public Policy", 1168),
    ("International Conspiracy Theory", 1364),
    ("Liberal Politics", 840),
    ("Other", 3355),
    ("Russia Focused", 1545),
    ("Veterans & Military", 2106),
];

// upper triangle of the Twitter heterophily table, row by row
#[rustfmt::skip]
const TRIANGLE: [[u32; 8]; 8] = [
    [5, 4, 3, 2, 2, 3, 2, 3],
    [0, 5, 1, 4, 3, 3, 3, 1],
    [0, 0, 4, 1, 3, 3, 0, 4],
    [0, 0, 0, 4, 4, 3, 4, 0],
    [0, 0, 0, 0, 5, 3, 3, 2],
    [0, 0, 0, 0, 0, 3, 3, 3],
    [0, 0, 0, 0, 0, 0, 5, 0],
    [0, 0, 0, 0, 0, 0, 0, 5],
];

fn table_grouping() -> Grouping {
    let mut next = 0;
    Grouping::from_groups(
        GROUPS
            .iter()
            .map(|(l, n)| {
                let members = (0..*n)
                    .map(|_| {
                        next += 1;
                        id(&format!("u{next:05}"))
                    })
                    .collect();
                (l.to_string(), members)
            })
            .collect(),
    )
    .unwrap()
}

/// Tie counts that are silent exactly where the table shows 0 and busy elsewhere.
fn table_counts() -> TieCounts {
    let mut ties = vec![0usize; 64];
    for a in 0..8 {
        for b in a..8 {
            let t = TRIANGLE[a][b] as usize * 250;
            ties[a * 8 + b] = t;
            ties[b * 8 + a] = t;
        }
    }
    TieCounts::new(GROUPS.iter().map(|g| g.0.to_string()).collect(), GROUPS.iter().map(|g| g.1).collect(), ties)
        .unwrap()
}

#[test]
fn table_shaped_group_graph() {
    let grouping = table_grouping();
    let h = heterophily::<f64>(&table_counts()).unwrap();
    let gg = aggregate_group_graph(&grouping, &h).unwrap();
    assert_eq!(gg.labels.len(), 8);
    assert_eq!(gg.member_counts, GROUPS.iter().map(|g| g.1).collect::<Vec<_>>());
    let got: Vec<(usize, usize)> = gg.edges.iter().map(|e| (e.0, e.1)).collect();
    let want: Vec<(usize, usize)> =
        (0..8).flat_map(|a| (a + 1..8).map(move |b| (a, b))).filter(|&(a, b)| TRIANGLE[a][b] > 0).collect();
    assert_eq!(got, want);
    assert_eq!(want.len(), 25);

    let l = fr_layout(&gg, &LayoutConfig::default()).unwrap();
    let svg = render_svg(&l, &gg, &SvgStyle::default()).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 8);
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("line")).count(), 25);
}

fn two_cliques() -> netmap_core::graph::InteractionGraph {
    let mut b = GraphBuilder::new();
    for side in ["a", "b"] {
        for i in 0..10 {
            for j in 0..10 {
                if i != j {
                    b.add_edge(id(&format!("{side}{i}")), id(&format!("{side}{j}")), EdgeKind::Follow);
                }
            }
        }
    }
    b.add_edge(id("a0"), id("b0"), EdgeKind::Follow);
    b.build()
}

#[test]
fn two_cliques_separate() {
    let g = two_cliques();
    let mut wins = 0;
    for seed in 0..20 {
        let l = fr_layout(&g, &LayoutConfig { seed, ..LayoutConfig::<f64>::default() }).unwrap();
        let side = |i: usize| l.nodes[i].starts_with('a');
        let (mut intra, mut ni, mut inter, mut nx) = (0.0, 0, 0.0, 0);
        for i in 0..20 {
            for j in i + 1..20 {
                if side(i) == side(j) {
                    intra += l.distance(i, j);
                    ni += 1;
                } else {
                    inter += l.distance(i, j);
                    nx += 1;
                }
            }
        }
        if intra / (ni as f64) < inter / (nx as f64) {
            wins += 1;
        }
    }
    assert!(wins >= 18, "{wins}/20");
}

#[test]
fn renaming_nodes_keeps_positions() {
    let base = LayoutGraph {
        nodes: (0..6).map(|i| format!("n{i}")).collect(),
        sizes: vec![1.0; 6],
        edges: vec![(0, 1, 1.0), (1, 2, 2.0), (3, 4, 1.0), (4, 5, 1.0), (5, 0, 0.5)],
        classes: vec![0; 6],
    };
    let renamed = LayoutGraph { nodes: (0..6).map(|i| format!("zz{}", 9 - i)).collect(), ..base.clone() };
    let cfg = LayoutConfig { seed: 11, iterations: 200, ..LayoutConfig::default() };
    assert_eq!(fr_layout(&base, &cfg).unwrap().positions, fr_layout(&renamed, &cfg).unwrap().positions);
}

fn arb_layout_graph() -> impl Strategy<Value = LayoutGraph<f64>> {
    (1usize..25).prop_flat_map(|n| {
        (prop::collection::vec((0..n, 0..n, 0.0f64..10.0), 0..3 * n), prop::collection::vec(0.5f64..50.0, n)).prop_map(
            move |(edges, sizes)| LayoutGraph {
                nodes: (0..n).map(|i| format!("v{i}")).collect(),
                sizes,
                edges,
                classes: vec![0; n],
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn positions_finite_and_on_canvas(
        g in arb_layout_graph(),
        seed in any::<u64>(),
        w in 1.0f64..2000.0,
        h in 1.0f64..2000.0,
        iterations in 1usize..80,
        t in 0.1f64..1000.0,
    ) {
        let cfg = LayoutConfig { width: w, height: h, iterations, initial_temperature: t, seed };
        let l = fr_layout(&g, &cfg).unwrap();
        for &(x, y) in &l.positions {
            prop_assert!(x.is_finite() && y.is_finite());
            prop_assert!((0.0..=w).contains(&x) && (0.0..=h).contains(&y));
        }
        let again = fr_layout(&g, &cfg).unwrap();
        prop_assert!(l.positions.iter().zip(&again.positions).all(|(a, b)| a.0.to_bits() == b.0.to_bits() && a.1.to_bits() == b.1.to_bits()));
    }
}

#[test]
fn accounts_sized_by_in_map_followers() {
    let g = two_cliques();
    let l = fr_layout(&g, &LayoutConfig { iterations: 1, ..LayoutConfig::<f64>::default() }).unwrap();
    let b0 = l.nodes.iter().position(|n| n == "b0").unwrap();
    let b1 = l.nodes.iter().position(|n| n == "b1").unwrap();
    assert!(l.display_size[b0] > l.display_size[b1]);
}
