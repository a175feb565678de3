//! Compensator of the tip displacement.
//!
//! Seen from the leftmost particle, the tip moves left by `m` at rate
//! `min(1, r_m)` with `r_m = Σ_k ξ(k) (m + k)^{-2α}`, so the displacement
//! `X_t` splits as `Q_t + M_t` with `Q_t = ∫ Σ_m m min(1, r_m) ds` and `M_t` a
//! martingale.

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, Error, Result};
use crate::kernel::power_sum_from;

/// Occupation seen from the left tip at time `t`: `(offset, count)` pairs with
/// increasing offsets, plus the displacement `X_t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiSnapshot {
    pub t: f64,
    pub displacement: f64,
    pub xi: Vec<(u64, u64)>,
}

impl XiSnapshot {
    /// Builds the tip view from sorted `(site, count)` pairs.
    pub fn from_sites(t: f64, occupied: &[(i64, u32)]) -> XiSnapshot {
        let tip = occupied.first().map_or(0, |&(x, _)| x);
        XiSnapshot {
            t,
            displacement: -(tip as f64),
            xi: occupied.iter().map(|&(x, c)| ((x - tip) as u64, c as u64)).collect(),
        }
    }
}

/// `Σ_{m≥1} m min(1, r_m)` for the tip view `xi`.
///
/// Jumps `m` above `M = max(max offset, n^{1/(2α)}) + 1` have `r_m < 1`, so
/// their contribution `Σ_k ξ(k) Σ_{m>M} m (m + k)^{-2α}` is summed in closed
/// form through power-sum tails. Finite only for `α > 1`.
pub fn compensator_rate(xi: &[(u64, u64)], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha <= 1.0 {
        return Err(Error::Domain(format!("the compensator diverges for alpha = {alpha} <= 1")));
    }
    if xi.is_empty() {
        return Ok(0.0);
    }
    let p = 2.0 * alpha;
    let n: u64 = xi.iter().map(|&(_, c)| c).sum();
    let max_off = xi.iter().map(|&(k, _)| k).max().unwrap_or(0);
    let m_head = max_off.max((n as f64).powf(1.0 / p).ceil() as u64) + 1;
    let table: Vec<f64> = (0..=(m_head + max_off + 1))
        .map(|j| if j == 0 { f64::INFINITY } else { (j as f64).powf(-p) })
        .collect();
    let mut head = 0.0;
    for m in 1..=m_head {
        let mut r = 0.0;
        for &(k, c) in xi {
            r += c as f64 * table[(m + k) as usize];
            if r >= 1.0 {
                break;
            }
        }
        head += m as f64 * r.min(1.0);
    }
    // Σ_{m>M} m (m+k)^{-p} = Σ_{j>M+k} (j - k) j^{-p}.
    let mut tail = 0.0;
    for &(k, c) in xi {
        let j0 = m_head + k + 1;
        tail += c as f64 * (power_sum_from(p - 1.0, j0) - k as f64 * power_sum_from(p, j0));
    }
    Ok(head + tail)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QmPoint {
    pub t: f64,
    pub q: f64,
    pub m: f64,
}

/// `(t, Q_t, M_t)` with `Q` integrated by the trapezoid rule over the
/// snapshot times and `M = X - Q`.
pub fn q_m_decomposition(snapshots: &[XiSnapshot], alpha: f64) -> Result<Vec<QmPoint>> {
    let mut out = Vec::with_capacity(snapshots.len());
    let mut q = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for s in snapshots {
        let rate = compensator_rate(&s.xi, alpha)?;
        if let Some((t0, r0)) = prev {
            if s.t <= t0 {
                return Err(Error::Domain("snapshot times must increase".into()));
            }
            q += 0.5 * (s.t - t0) * (r0 + rate);
        }
        prev = Some((s.t, rate));
        out.push(QmPoint {
            t: s.t,
            q,
            m: s.displacement - q,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(xi: &[(u64, u64)], alpha: f64) -> f64 {
        let p = 2.0 * alpha;
        let mut s = 0.0;
        for m in 1..200_000u64 {
            let r: f64 = xi.iter().map(|&(k, c)| c as f64 * ((m + k) as f64).powf(-p)).sum();
            s += m as f64 * r.min(1.0);
        }
        s
    }

    #[test]
    fn single_site_gives_zeta_five() {
        // Σ m · m^{-6} = ζ(5).
        let v = compensator_rate(&[(0, 1)], 3.0).unwrap();
        assert!((v - 1.036_927_755_143_37).abs() < 1e-10, "{v}");
    }

    #[test]
    fn matches_brute_force_on_small_profiles() {
        let profiles: Vec<Vec<(u64, u64)>> = vec![
            vec![(0, 1), (1, 3), (4, 2)],
            vec![(0, 2), (2, 1), (3, 5), (10, 7)],
            vec![(0, 1), (30, 40)],
        ];
        for xi in profiles {
            for &alpha in &[2.0, 3.0] {
                let fast = compensator_rate(&xi, alpha).unwrap();
                let slow = brute(&xi, alpha);
                assert!((fast - slow).abs() < 1e-6 * slow, "{xi:?} alpha {alpha}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn diverges_at_or_below_one() {
        assert!(compensator_rate(&[(0, 1)], 1.0).is_err());
        assert!(compensator_rate(&[(0, 1)], 0.8).is_err());
    }

    #[test]
    fn trapezoid_on_constant_profile() {
        let snaps: Vec<XiSnapshot> = (0..5)
            .map(|i| XiSnapshot {
                t: i as f64 * 0.5,
                displacement: i as f64,
                xi: vec![(0, 1)],
            })
            .collect();
        let qm = q_m_decomposition(&snaps, 3.0).unwrap();
        let z5 = 1.036_927_755_143_37;
        assert!((qm[4].q - 2.0 * z5).abs() < 1e-9);
        assert!((qm[4].m - (4.0 - 2.0 * z5)).abs() < 1e-9);
        assert_eq!(qm[0].q, 0.0);
    }
}
