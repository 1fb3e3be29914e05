use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LayoutError, LayoutSource};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutConfig<T> {
    pub width: T,
    pub height: T,
    pub iterations: usize,
    pub initial_temperature: T,
    pub seed: u64,
}

impl<T: Scalar> Default for LayoutConfig<T> {
    fn default() -> Self {
        Self {
            width: T::lit(1000.0),
            height: T::lit(1000.0),
            iterations: 500,
            initial_temperature: T::lit(100.0),
            seed: 0,
        }
    }
}

impl<T: Scalar> LayoutConfig<T> {
    pub fn validate(&self) -> Result<(), LayoutError> {
        let bad = |m: &str| Err(LayoutError::InvalidConfig(m.to_string()));
        if !(self.width.is_finite() && self.width > T::zero() && self.height.is_finite() && self.height > T::zero()) {
            return bad("canvas width and height must be positive");
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1");
        }
        if !(self.initial_temperature.is_finite() && self.initial_temperature > T::zero()) {
            return bad("initial temperature must be positive");
        }
        Ok(())
    }
}

/// Final node placement.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout<T> {
    pub nodes: Vec<String>,
    pub positions: Vec<(T, T)>,
    pub display_size: Vec<T>,
    pub width: T,
    pub height: T,
}

impl<T: Scalar> NodeLayout<T> {
    pub fn position(&self, node: &str) -> Option<(T, T)> {
        self.nodes.iter().position(|n| n == node).map(|i| self.positions[i])
    }

    pub fn distance(&self, a: usize, b: usize) -> T {
        let (pa, pb) = (self.positions[a], self.positions[b]);
        (pa.0 - pb.0).hypot(pa.1 - pb.1)
    }

    /// `node,x,y,size` rows, coordinates to 3 dp.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "x", "y", "size"])?;
        let f = |x: T| format!("{:.3}", x.to_f64().unwrap_or(f64::NAN));
        for (i, n) in self.nodes.iter().enumerate() {
            let (x, y) = self.positions[i];
            w.write_record([n.clone(), f(x), f(y), f(self.display_size[i])])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fruchterman-Reingold placement.
///
/// Every pair of nodes repels with `k²/d` and every edge attracts with
/// `w·d²/k`, where `k = sqrt(area / n)` and `w` is the edge weight scaled so
/// the heaviest edge has weight 1. Displacements are capped by a temperature
/// that falls linearly from `initial_temperature` to 0, and positions are
/// clamped to the canvas after every step. Initial positions are drawn
/// uniformly from the canvas in node order with a ChaCha8 stream seeded by
/// `config.seed`. A lone node sits at the canvas centre.
pub fn fr_layout<T: Scalar, G: LayoutSource<T> + ?Sized>(
    graph: &G,
    config: &LayoutConfig<T>,
) -> Result<NodeLayout<T>, LayoutError> {
    config.validate()?;
    let graph = graph.to_layout_graph();
    let n = graph.len();
    if n == 0 {
        return Err(LayoutError::EmptyGraph);
    }
    let (w, h) = (config.width, config.height);
    let two = T::lit(2.0);
    let mut pos: Vec<(T, T)> = if n == 1 {
        vec![(w / two, h / two)]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        (0..n)
            .map(|_| {
                let x: f64 = rng.random();
                let y: f64 = rng.random();
                (T::lit(x) * w, T::lit(y) * h)
            })
            .collect()
    };

    let k = (w * h / T::from_count(n)).sqrt();
    let k2 = k * k;
    let min_dist = k * T::lit(1e-6);
    let max_weight = graph.edges.iter().map(|e| e.2).fold(T::zero(), T::max);
    let edges: Vec<(usize, usize, T)> = graph
        .edges
        .iter()
        .filter(|e| e.0 != e.1 && e.2 > T::zero())
        .map(|&(a, b, wt)| (a, b, wt / max_weight))
        .collect();

    let mut disp = vec![(T::zero(), T::zero()); n];
    let iters = T::from_count(config.iterations);
    for step in 0..config.iterations {
        if n == 1 {
            break;
        }
        let temperature = config.initial_temperature * (T::one() - T::from_count(step) / iters);
        disp.iter_mut().for_each(|d| *d = (T::zero(), T::zero()));

        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy, d) = separation(pos[i], pos[j], i, j, min_dist);
                let f = k2 / d;
                let (fx, fy) = (dx / d * f, dy / d * f);
                disp[i].0 = disp[i].0 + fx;
                disp[i].1 = disp[i].1 + fy;
                disp[j].0 = disp[j].0 - fx;
                disp[j].1 = disp[j].1 - fy;
            }
        }
        for &(a, b, wt) in &edges {
            let (dx, dy, d) = separation(pos[a], pos[b], a, b, min_dist);
            let f = wt * d * d / k;
            let (fx, fy) = (dx / d * f, dy / d * f);
            disp[a].0 = disp[a].0 - fx;
            disp[a].1 = disp[a].1 - fy;
            disp[b].0 = disp[b].0 + fx;
            disp[b].1 = disp[b].1 + fy;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = d.0.hypot(d.1);
            if len > T::zero() {
                let step_len = len.min(temperature);
                p.0 = p.0 + d.0 / len * step_len;
                p.1 = p.1 + d.1 / len * step_len;
            }
            p.0 = p.0.max(T::zero()).min(w);
            p.1 = p.1.max(T::zero()).min(h);
        }
    }

    Ok(NodeLayout { nodes: graph.nodes, positions: pos, display_size: graph.sizes, width: w, height: h })
}

/// Vector from `b` to `a` and its length; coincident nodes are pushed apart
/// along a direction fixed by their indices.
fn separation<T: Scalar>(a: (T, T), b: (T, T), ia: usize, ib: usize, min_dist: T) -> (T, T, T) {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    let d = dx.hypot(dy);
    if d >= min_dist {
        return (dx, dy, d);
    }
    let angle = T::lit(((ia * 7919 + ib * 104_729) % 360) as f64).to_radians();
    (angle.cos() * min_dist, angle.sin() * min_dist, min_dist)
}
