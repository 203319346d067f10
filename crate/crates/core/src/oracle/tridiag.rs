//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

/// Symmetric tridiagonal matrix: `diag[i]` on the diagonal, `off[i]` at
/// `(i, i+1)` and `(i+1, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(
            off.len() + 1 == diag.len() || (diag.is_empty() && off.is_empty()),
            "off-diagonal must be one shorter than the diagonal"
        );
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`: the count of negative
    /// pivots in the `LDLᵀ` factorization of `T − xI`.
    pub fn count_below(&self, x: f64) -> usize {
        let scale = self.gershgorin().1.abs().max(1.0);
        let tiny = f64::EPSILON * f64::EPSILON * scale;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            let coupling = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1] / q
            };
            q = d - x - coupling;
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds on the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to a few ulps.
    pub fn eigenvalue(&self, k: usize) -> Option<f64> {
        if k >= self.len() {
            return None;
        }
        let (mut lo, g_hi) = self.gershgorin();
        // grow a modest upper bracket before falling back to Gershgorin
        let mut hi = lo + 1.0;
        while self.count_below(hi) <= k {
            let width = 2.0 * (hi - lo);
            hi = lo + width;
            if hi >= g_hi {
                hi = g_hi + f64::EPSILON * g_hi.abs() + f64::MIN_POSITIVE;
                break;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * mid.abs().max(1e-300) {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Eigenvector for an (accurate) eigenvalue by inverse iteration,
    /// normalized to unit Euclidean length.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.len();
        let shift = eigenvalue + 64.0 * f64::EPSILON * eigenvalue.abs().max(1.0);
        let mut x = vec![1.0; n];
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            for v in &mut x {
                *v /= norm;
            }
        }
        x
    }

    /// Solve `(T − sI)·x = rhs` by Gaussian elimination with partial
    /// pivoting (the `gtsv` scheme); zero pivots are nudged to a tiny value.
    fn solve_shifted(&self, s: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - s).collect();
        let mut du: Vec<f64> = self.off.clone();
        // sub-diagonal on entry, second super-diagonal after elimination
        let mut dl: Vec<f64> = self.off.clone();
        let mut b = rhs.to_vec();
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);

        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
                dl[i] = 0.0;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    dl[i] = du[i + 1];
                    du[i + 1] = -fact * dl[i];
                } else {
                    dl[i] = 0.0;
                }
                du[i] = temp;
                let tb = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tb - fact * b[i + 1];
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= du[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= dl[i] * b[i + 2];
            }
            b[i] = acc / d[i];
        }
        b
    }
}

/// Interior sign changes of a sampled function, ignoring entries below
/// `rel_floor · max|v|`.
pub fn sign_changes(v: &[f64], rel_floor: f64) -> usize {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let floor = rel_floor * peak;
    let mut last = 0.0_f64;
    let mut changes = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            changes += 1;
        }
        last = x;
    }
    changes
}
