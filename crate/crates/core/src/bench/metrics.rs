//! Accuracy and speed metrics.

use serde::{Deserialize, Serialize};

use crate::encoding::{BitState, EncodingKind, EncodingLayout};
use crate::error::{Error, Result};
use crate::problem::{ColoringInstance, TspInstance};

/// Wrongly colored edges and their fraction of all edges. An edge is wrong
/// when its endpoints share a color or either endpoint decodes to no valid
/// color.
pub fn coloring_error(
    state: &BitState,
    instance: &ColoringInstance,
    layout: &EncodingLayout,
) -> Result<(usize, f64)> {
    let colors = layout.decode_all(state)?;
    Ok(count_wrong(instance, &colors))
}

/// Same as [`coloring_error`] on already decoded colors.
pub fn count_wrong(instance: &ColoringInstance, colors: &[Option<usize>]) -> (usize, f64) {
    let edges = instance.graph.edges();
    let wrong = edges
        .iter()
        .filter(|&&(u, v)| match (colors[u], colors[v]) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        })
        .count();
    let rate = if edges.is_empty() {
        0.0
    } else {
        wrong as f64 / edges.len() as f64
    };
    (wrong, rate)
}

/// Fraction of runs whose error is strictly below `threshold`.
pub fn success_probability(errors: &[f64], threshold: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::InvalidParameter("no runs to score".into()));
    }
    let hits = errors.iter().filter(|&&e| e < threshold).count();
    Ok(hits as f64 / errors.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Tts {
    Seconds(f64),
    /// No run succeeded.
    Unreachable,
}

impl Tts {
    pub fn seconds(self) -> Option<f64> {
        match self {
            Tts::Seconds(s) => Some(s),
            Tts::Unreachable => None,
        }
    }
}

impl std::fmt::Display for Tts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tts::Seconds(s) => write!(f, "{s}"),
            Tts::Unreachable => f.write_str("unreachable"),
        }
    }
}

/// Time to reach a success with 99% confidence:
/// `t_comp * ln(0.01) / ln(1 - p_s)`, or `t_comp` once `p_s >= 0.99`.
pub fn tts(t_comp: f64, p_s: f64) -> Result<Tts> {
    if !(t_comp > 0.0 && t_comp.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_comp must be positive, got {t_comp}")));
    }
    if !(0.0..=1.0).contains(&p_s) {
        return Err(Error::InvalidParameter(format!("p_s must lie in [0, 1], got {p_s}")));
    }
    Ok(if p_s == 0.0 {
        Tts::Unreachable
    } else if p_s >= 0.99 {
        Tts::Seconds(t_comp)
    } else {
        Tts::Seconds(t_comp * 0.01f64.ln() / (1.0 - p_s).ln())
    })
}

/// `alg / opt - 1`; zero at the optimum, larger is worse.
pub fn optimality_gap(alg_cost: f64, opt_cost: f64) -> Result<f64> {
    if !(opt_cost > 0.0) {
        return Err(Error::InvalidParameter(format!("optimum must be positive, got {opt_cost}")));
    }
    Ok(alg_cost / opt_cost - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedTour {
    pub tour: Vec<usize>,
    /// Closed-tour cost in normalised units.
    pub cost: f64,
    /// False when some city has no readable position (a malformed one-hot
    /// row). Such tours still get a cost but should not count as solutions.
    pub readable: bool,
}

/// Orders cities by decoded position, ties by city index. Binary positions
/// are used as decoded even when out of range; an unreadable one-hot row
/// sorts last.
pub fn decode_tour(state: &BitState, instance: &TspInstance, layout: &EncodingLayout) -> Result<DecodedTour> {
    let n = instance.num_cities();
    if layout.num_nodes != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: layout.num_nodes,
        });
    }
    let mut readable = true;
    let mut keyed = Vec::with_capacity(n);
    for city in 0..n {
        let pos = match layout.kind {
            EncodingKind::BinaryVector => {
                layout.decode(state, city)?;
                layout.raw_value(state, city)
            }
            EncodingKind::OneHot => layout.decode(state, city)?.unwrap_or_else(|| {
                readable = false;
                usize::MAX
            }),
        };
        keyed.push((pos, city));
    }
    keyed.sort_unstable();
    let tour: Vec<usize> = keyed.into_iter().map(|(_, c)| c).collect();
    let cost = instance.tour_cost(&tour);
    Ok(DecodedTour { tour, cost, readable })
}
