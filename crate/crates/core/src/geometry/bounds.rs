use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bounds on RDM eigenvalues for states with `N` and `N +- 2`
/// electrons, as used by the eigenspace inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub d_n: f64,
    pub d_n_plus_2: f64,
    pub q_n: f64,
    pub q_n_minus_2: f64,
    pub g_n: f64,
    pub g_n_minus_2: f64,
    pub g_n_plus_2: f64,
}

/// Optional replacements for individual bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundOverrides {
    pub d_n: Option<f64>,
    pub d_n_plus_2: Option<f64>,
    pub q_n: Option<f64>,
    pub q_n_minus_2: Option<f64>,
    pub g_n: Option<f64>,
    pub g_n_minus_2: Option<f64>,
    pub g_n_plus_2: Option<f64>,
}

impl BoundSet {
    pub fn with_overrides(mut self, o: &BoundOverrides) -> Result<Self> {
        let slots = [
            (&mut self.d_n, o.d_n),
            (&mut self.d_n_plus_2, o.d_n_plus_2),
            (&mut self.q_n, o.q_n),
            (&mut self.q_n_minus_2, o.q_n_minus_2),
            (&mut self.g_n, o.g_n),
            (&mut self.g_n_minus_2, o.g_n_minus_2),
            (&mut self.g_n_plus_2, o.g_n_plus_2),
        ];
        for (slot, value) in slots {
            if let Some(v) = value {
                *slot = v;
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.d_n, self.d_n_plus_2, self.q_n, self.q_n_minus_2, self.g_n, self.g_n_minus_2, self.g_n_plus_2];
        match all.iter().find(|b| **b <= 0.0 || !b.is_finite()) {
            Some(b) => Err(Error::InvalidBound(format!("eigenvalue bounds must be positive and finite, got {b}"))),
            None => Ok(()),
        }
    }
}

/// Universal bounds: `M/2` for D and `(L-M)/2` for Q on `M`-electron states,
/// and `M` for G (a Frobenius-normalized one-body operator cannot exceed the
/// particle number in `<g^+ g>`).
pub fn default_bounds(l: usize, n: usize) -> Result<BoundSet> {
    if n < 2 || n + 2 > l {
        return Err(Error::InvalidBound(format!("default bounds need 2 <= N <= L-2, got N={n}, L={l}")));
    }
    let (l, n) = (l as f64, n as f64);
    let set = BoundSet {
        d_n: n / 2.0,
        d_n_plus_2: (n + 2.0) / 2.0,
        q_n: (l - n) / 2.0,
        q_n_minus_2: (l - n + 2.0) / 2.0,
        g_n: n,
        g_n_minus_2: n - 2.0,
        g_n_plus_2: n + 2.0,
    };
    // g_n_minus_2 is zero when N = 2; the (N-2)-electron state is then the
    // vacuum, on which any g has zero action, so a tiny positive floor keeps
    // the set valid without loosening anything.
    let set = BoundSet { g_n_minus_2: set.g_n_minus_2.max(f64::MIN_POSITIVE), ..set };
    set.validate()?;
    Ok(set)
}
