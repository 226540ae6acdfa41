use std::f64::consts::PI;

use super::grid::RadialGrid;

/// Far-field model used to extend a quadrature beyond the last cell.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Tail {
    /// Integrand is negligible past the grid.
    #[default]
    None,
    /// `c·r^{−m}` fitted through the last two nodes.
    PowerFit,
    /// Explicit expansion `Σ c_k r^{−m_k}`.
    Series(Vec<(f64, f64)>),
}

/// Binomial coefficient `C(a, j)` for real `a`.
fn binom(a: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (a - i as f64) / (i as f64 + 1.0))
}

impl Tail {
    /// Expansion of `W^k = (1 + r²/3)^{−k/2}` for large `r`.
    pub fn w_power(k: f64) -> Tail {
        let terms = (0..12).map(|j| (binom(-k / 2.0, j) * 3f64.powf(k / 2.0 + j as f64), k + 2.0 * j as f64)).collect();
        Tail::Series(terms)
    }

    pub fn scaled(self, c: f64) -> Tail {
        match self {
            Tail::Series(t) => Tail::Series(t.into_iter().map(|(a, m)| (c * a, m)).collect()),
            other => other,
        }
    }

    /// Sum of two series; any other combination falls back to a power fit.
    pub fn plus(self, other: Tail) -> Tail {
        match (self, other) {
            (Tail::Series(mut a), Tail::Series(b)) => {
                a.extend(b);
                Tail::Series(a)
            }
            (Tail::None, x) | (x, Tail::None) => x,
            _ => Tail::PowerFit,
        }
    }

    /// Integral of `4πr²g` past the last cell plus the midpoint end
    /// correction `(h²/24)·dG/ds` at the cell edge, `G = 4πr²r_s g`.
    /// Returns `+∞` (with the sign of the tail) when the tail diverges.
    pub fn contribution(&self, grid: &RadialGrid, values: &[f64]) -> f64 {
        let terms: Vec<(f64, f64)> = match self {
            Tail::None => return 0.0,
            Tail::Series(t) => t.clone(),
            Tail::PowerFit => match power_fit(grid, values) {
                Some(t) => vec![t],
                None => return 0.0,
            },
        };
        let st = grid.stretch();
        let re = grid.r_end();
        let se = grid.s_end();
        let (rs, rss) = (st.dr(se), st.d2r(se));
        let h = grid.h();
        let mut total = 0.0;
        for (c, m) in terms {
            if c == 0.0 {
                continue;
            }
            if m <= 3.0 {
                return c.signum() * f64::INFINITY;
            }
            total += 4.0 * PI * c * re.powf(3.0 - m) / (m - 3.0);
            let dg = 4.0 * PI * c * ((2.0 - m) * re.powf(1.0 - m) * rs * rs + re.powf(2.0 - m) * rss);
            total += h * h / 24.0 * dg;
        }
        total
    }
}

/// `(c, m)` with `g ≈ c·r^{−m}` from the last two nodes, if the data allow it.
pub fn power_fit(grid: &RadialGrid, values: &[f64]) -> Option<(f64, f64)> {
    let n = values.len();
    let (g1, g2) = (values[n - 2], values[n - 1]);
    if g1 == 0.0 || g2 == 0.0 || g1.signum() != g2.signum() {
        return None;
    }
    let (r1, r2) = (grid.nodes()[n - 2], grid.nodes()[n - 1]);
    let m = -(g2 / g1).ln() / (r2 / r1).ln();
    Some((g2 * r2.powf(m), m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_power_series_matches_closed_form() {
        if let Tail::Series(t) = Tail::w_power(5.0) {
            for &r in &[40.0, 200.0, 1e4] {
                let s: f64 = t.iter().map(|(c, m)| c * f64::powf(r, -m)).sum();
                let exact = (1.0 + r * r / 3.0f64).powf(-2.5);
                assert!((s / exact - 1.0).abs() < 1e-14, "{r}");
            }
        } else {
            unreachable!()
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(3.0, 2), 3.0);
        assert!((binom(-0.5, 2) - 0.375).abs() < 1e-15);
    }
}
