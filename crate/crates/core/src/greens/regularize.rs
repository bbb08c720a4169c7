//! Adjusting pole weights so that `G` cancels the bath poles of `G0^-1`.
//!
//! At every coupled bath energy `eps_i` the weights must satisfy
//! `sum_k lambda_k / (eps_i - w_k) = 0` and
//! `sum_k lambda_k / (eps_i - w_k)^2 = 1 / V_i^2`, together with the
//! normalization `sum_k lambda_k = 1`. Pole energies stay fixed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::ImpurityModel;
use crate::spectral::SpectralData;

/// Poles closer than this are merged before solving.
pub const MERGE_TOL: f64 = 1e-9;

/// Poles within [`MERGE_TOL`] of each other, in ascending energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub omega: f64,
    /// Indices into the hole-then-particle pole list.
    pub members: Vec<usize>,
    pub weight: f64,
    /// Fraction of the cluster weight each member receives back.
    pub shares: Vec<f64>,
}

pub fn merge_degenerate(poles: &[(f64, f64)]) -> Vec<Cluster> {
    let mut order: Vec<usize> = (0..poles.len()).collect();
    order.sort_by(|&a, &b| poles[a].0.total_cmp(&poles[b].0));
    let mut out: Vec<Cluster> = Vec::new();
    for i in order {
        let (w, l) = poles[i];
        match out.last_mut() {
            Some(c) if (w - poles[*c.members.last().unwrap()].0).abs() < MERGE_TOL => {
                c.members.push(i);
                c.weight += l;
            }
            _ => out.push(Cluster { omega: w, members: vec![i], weight: l, shares: vec![] }),
        }
    }
    for c in &mut out {
        c.omega = c.members.iter().map(|&i| poles[i].0).sum::<f64>() / c.members.len() as f64;
        // proportional to the old weights, equal when those are not positive
        let tot: f64 = c.members.iter().map(|&i| poles[i].1.max(0.0)).sum();
        let k = c.members.len() as f64;
        c.shares = c.members.iter().map(|&i| if tot > 0.0 { poles[i].1.max(0.0) / tot } else { 1.0 / k }).collect();
    }
    out
}

/// Writes cluster weights back to their members.
fn spread(data: &SpectralData, slot: usize, clusters: &[Cluster], weights: &[f64]) -> SpectralData {
    let mut out = data.clone();
    let nh = data.hole.len();
    for (c, &w) in clusters.iter().zip(weights) {
        for (&i, &share) in c.members.iter().zip(&c.shares) {
            let pole = if i < nh { &mut out.hole[i] } else { &mut out.particle[i - nh] };
            pole.lambda[slot] = w * share;
        }
    }
    out
}

/// Constraint rows `A lambda = b` for one orbital over the clusters.
fn constraints(clusters: &[Cluster], poles: &[(f64, f64)], model: &ImpurityModel, alpha: usize) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let bath = model.coupled_bath(alpha);
    let n = clusters.len();
    let m = 2 * bath.len() + 1;
    let mut a = DMatrix::zeros(m, n);
    let mut b = DVector::zeros(m);
    for (r, &(e, v)) in bath.iter().enumerate() {
        for (k, c) in clusters.iter().enumerate() {
            // members keep their own energies: the rules must hold for the
            // poles as written back, not for the cluster mean
            for (&i, &share) in c.members.iter().zip(&c.shares) {
                let d = e - poles[i].0;
                if d.abs() < MERGE_TOL {
                    return Err(Error::Regularization(format!("pole at bath energy {e}: sum rules cannot be satisfied")));
                }
                a[(2 * r, k)] += share / d;
                a[(2 * r + 1, k)] += share / (d * d);
            }
        }
        b[2 * r + 1] = 1.0 / (v * v);
    }
    a.row_mut(m - 1).fill(1.0);
    b[m - 1] = 1.0;
    // row scaling only improves conditioning
    for r in 0..m {
        let s = a.row(r).amax();
        if s > 0.0 {
            a.row_mut(r).scale_mut(1.0 / s);
            b[r] /= s;
        }
    }
    Ok((a, b))
}

/// First maximal set of independent rows, scanned in order.
fn leading_rows(a: &DMatrix<f64>) -> Vec<usize> {
    let rank_of = |rows: &[usize]| {
        let sv = a.select_rows(rows.iter()).svd(false, false).singular_values;
        let smax = sv.max();
        sv.iter().filter(|&&s| s > 1e-10 * smax).count()
    };
    let mut keep: Vec<usize> = Vec::new();
    for r in 0..a.nrows() {
        keep.push(r);
        if rank_of(&keep) < keep.len() {
            keep.pop();
        }
    }
    keep
}

/// Drops dependent sum rules, keeping them in order so the bath rules win
/// over the normalization. A rank-deficient system is kept only when it is
/// consistent, i.e. `b` lies in the column space of `A`.
fn independent_rows(a: DMatrix<f64>, b: DVector<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let keep = leading_rows(&a);
    if keep.len() == a.nrows() {
        return Ok((a, b));
    }
    let svd = a.clone().svd(true, false);
    let smax = svd.singular_values.max();
    let cols: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > 1e-10 * smax).collect();
    let u = svd.u.expect("requested").select_columns(cols.iter());
    let outside = &b - &u * (u.transpose() * &b);
    if outside.norm() > 1e-9 * b.norm().max(1.0) {
        return Err(Error::Regularization(format!("{} sum rules are inconsistent for {} free weights", a.nrows(), a.ncols())));
    }
    Ok((a.select_rows(keep.iter()), b.select_rows(keep.iter())))
}

/// `min |x - target|^2` subject to `A x = b`, by the KKT system with one
/// step of iterative refinement.
fn equality_ls(a: &DMatrix<f64>, b: &DVector<f64>, target: &DVector<f64>) -> Result<DVector<f64>> {
    let (m, n) = a.shape();
    if m > n {
        return Err(Error::Regularization(format!("{m} sum rules for {n} free weights")));
    }
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-12 * smax.max(1e-300) {
        return Err(Error::Regularization("degenerate pole configuration: sum rules are not independent".into()));
    }
    let mut k = DMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).fill_with_identity();
    k.view_mut((0, n), (n, m)).copy_from(&a.transpose());
    k.view_mut((n, 0), (m, n)).copy_from(a);
    let mut rhs = DVector::zeros(n + m);
    rhs.rows_mut(0, n).copy_from(target);
    rhs.rows_mut(n, m).copy_from(b);
    let lu = k.clone().lu();
    let mut sol = lu.solve(&rhs).ok_or_else(|| Error::Regularization("singular KKT system".into()))?;
    let resid = &rhs - &k * &sol;
    if let Some(fix) = lu.solve(&resid) {
        sol += fix;
    }
    Ok(sol.rows(0, n).into_owned())
}

/// Lawson-Hanson non-negative least squares `min |E u - f|, u >= 0`.
fn nnls(e: &DMatrix<f64>, f: &DVector<f64>) -> Result<DVector<f64>> {
    let k = e.ncols();
    let tol = 10.0 * f64::EPSILON * e.norm().max(1.0) * (e.nrows().max(k) as f64);
    let mut u = DVector::zeros(k);
    let mut passive = vec![false; k];
    let solve_passive = |passive: &[bool]| -> Result<DVector<f64>> {
        let cols: Vec<usize> = (0..k).filter(|&j| passive[j]).collect();
        let sub = e.select_columns(cols.iter());
        let sol = sub.svd(true, true).solve(f, 1e-14).map_err(|m| Error::Numerical(m.to_string()))?;
        let mut full = DVector::zeros(k);
        for (n, &j) in cols.iter().enumerate() {
            full[j] = sol[n];
        }
        Ok(full)
    };
    for _ in 0..3 * k + 10 {
        let w = e.transpose() * (f - e * &u);
        let next = (0..k).filter(|&j| !passive[j] && w[j] > tol).max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(t) = next else { return Ok(u) };
        passive[t] = true;
        for _ in 0..3 * k + 10 {
            let s = solve_passive(&passive)?;
            if (0..k).filter(|&j| passive[j]).all(|j| s[j] > tol) {
                u = s;
                break;
            }
            let mut step = 1.0f64;
            for j in (0..k).filter(|&j| passive[j] && s[j] <= tol) {
                step = step.min(u[j] / (u[j] - s[j]));
            }
            u += (s - &u) * step;
            for j in 0..k {
                if passive[j] && u[j] <= tol {
                    passive[j] = false;
                    u[j] = 0.0;
                }
            }
        }
    }
    Err(Error::Numerical("non-negative least squares did not terminate".into()))
}

/// Closest point to `target` on the sum-rule plane inside the unit box.
/// The equalities are eliminated through a null-space basis; what remains
/// is a least-distance problem under bounds, solved as its non-negative
/// least-squares dual. Bound-active weights are then held fixed and the
/// rest re-solved exactly.
fn box_constrained(a: &DMatrix<f64>, b: &DVector<f64>, target: &DVector<f64>) -> Result<DVector<f64>> {
    let (m, n) = a.shape();
    let mut square = DMatrix::zeros(n.max(m), n);
    square.view_mut((0, 0), (m, n)).copy_from(a);
    let svd = square.svd(true, true);
    let v_t = svd.v_t.as_ref().expect("requested");
    let smax = svd.singular_values.max();
    let null: Vec<usize> = (0..n).filter(|&k| svd.singular_values[k] <= 1e-10 * smax).collect();
    let x_p = svd.solve(&{
        let mut bb = DVector::zeros(n.max(m));
        bb.rows_mut(0, m).copy_from(b);
        bb
    }, 1e-10 * smax).map_err(|e| Error::Numerical(e.to_string()))?;
    let infeasible = || Error::Regularization("no weights in [0, 1] satisfy the sum rules".into());

    let x = if null.is_empty() {
        x_p
    } else {
        let basis = DMatrix::from_fn(n, null.len(), |i, j| v_t[(null[j], i)]);
        // unconstrained optimum, then the smallest move z keeping 0 <= c + N z <= 1
        let c = &x_p + &basis * (basis.transpose() * target);
        let p = null.len();
        let mut g = DMatrix::zeros(2 * n, p);
        g.view_mut((0, 0), (n, p)).copy_from(&basis);
        g.view_mut((n, 0), (n, p)).copy_from(&(-&basis));
        let mut h = DVector::zeros(2 * n);
        for i in 0..n {
            h[i] = -c[i];
            h[n + i] = c[i] - 1.0;
        }
        let mut e = DMatrix::zeros(p + 1, 2 * n);
        e.view_mut((0, 0), (p, 2 * n)).copy_from(&g.transpose());
        e.row_mut(p).copy_from(&h.transpose());
        let mut f = DVector::zeros(p + 1);
        f[p] = 1.0;
        let u = nnls(&e, &f)?;
        let r = &e * u - f;
        if r.norm() < 1e-12 || r[p].abs() < 1e-300 {
            return Err(infeasible());
        }
        let z = DVector::from_fn(p, |j, _| -r[j] / r[p]);
        c + basis * z
    };
    if x.iter().any(|v| !(-1e-8..=1.0 + 1e-8).contains(v)) || (a * &x - b).amax() > 1e-8 {
        return Err(infeasible());
    }

    let fixed: Vec<Option<f64>> = x.iter().map(|&v| if v <= 1e-9 { Some(0.0) } else if v >= 1.0 - 1e-9 { Some(1.0) } else { None }).collect();
    let free: Vec<usize> = (0..n).filter(|&k| fixed[k].is_none()).collect();
    let mut rhs = b.clone();
    for (k, v) in fixed.iter().enumerate() {
        if let Some(v) = v {
            rhs -= a.column(k) * *v;
        }
    }
    let mut out = DVector::from_iterator(n, fixed.iter().map(|v| v.unwrap_or(0.0)));
    if !free.is_empty() {
        let af = a.select_columns(free.iter());
        let tf = DVector::from_iterator(free.len(), free.iter().map(|&k| target[k]));
        let (af, rhs) = independent_rows(af, rhs).unwrap_or_else(|_| (a.select_columns(free.iter()), b.clone()));
        if let Ok(xf) = equality_ls(&af, &rhs, &tf) {
            for (j, &k) in free.iter().enumerate() {
                out[k] = xf[j];
            }
            if out.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)) {
                return Ok(out);
            }
        }
    }
    Ok(x)
}

/// `sum_k a_k x_k` with Neumaier compensation.
fn dot_compensated(a: impl Iterator<Item = f64>, x: &DVector<f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (ak, xk) in a.zip(x.iter()) {
        let t = s + ak * xk;
        c += if s.abs() >= (ak * xk).abs() { (s - t) + ak * xk } else { (ak * xk - t) + s };
        s = t;
    }
    s + c
}

/// Minimum-norm corrections of the weights strictly inside the box until
/// the sum-rule residual stops shrinking.
fn refine(a: &DMatrix<f64>, b: &DVector<f64>, mut x: DVector<f64>) -> DVector<f64> {
    let free: Vec<usize> = (0..x.len()).filter(|&k| x[k] > 0.0 && x[k] < 1.0).collect();
    if free.is_empty() {
        return x;
    }
    // with more rules than free weights the bath rules take precedence
    let rows = leading_rows(&a.select_columns(free.iter()));
    let af = a.select_columns(free.iter()).select_rows(rows.iter());
    let svd = af.svd(true, true);
    let tol = 1e-12 * svd.singular_values.max();
    let residual = |x: &DVector<f64>| DVector::from_fn(rows.len(), |i, _| b[rows[i]] - dot_compensated(a.row(rows[i]).iter().copied(), x));
    for _ in 0..3 {
        let r = residual(&x);
        let Ok(dx) = svd.solve(&r, tol) else { break };
        let mut y = x.clone();
        for (j, &k) in free.iter().enumerate() {
            y[k] = (y[k] + dx[j]).clamp(0.0, 1.0);
        }
        if residual(&y).amax() >= r.amax() {
            break;
        }
        x = y;
    }
    x
}

/// Least-squares change of the weights of one orbital (`slot` in the
/// weight vectors, `alpha` in the model) that satisfies the sum rules, with
/// weights kept in `[0, 1]`.
pub fn regularize_orbital(data: &SpectralData, model: &ImpurityModel, slot: usize, alpha: usize) -> Result<SpectralData> {
    let poles = data.weights(slot);
    let clusters = merge_degenerate(&poles);
    let (a, b) = constraints(&clusters, &poles, model, alpha)?;
    let (a, b) = independent_rows(a, b)?;
    let n = clusters.len();
    let target = DVector::from_iterator(n, clusters.iter().map(|c| c.weight));
    let mut x = equality_ls(&a, &b, &target)?;
    if x.iter().any(|v| !(-1e-13..=1.0 + 1e-13).contains(v)) {
        x = box_constrained(&a, &b, &target)?;
    }
    let x = refine(&a, &b, x.map(|v| v.clamp(0.0, 1.0)));
    Ok(spread(data, slot, &clusters, x.as_slice()))
}

/// Regularizes every orbital; weight slot `k` belongs to impurity orbital `k`.
pub fn regularize(data: &SpectralData, model: &ImpurityModel) -> Result<SpectralData> {
    let n = data.n_orbitals();
    if n > model.n_imp() {
        return Err(Error::Dimension(format!("{n} weight slots for {} impurity orbitals", model.n_imp())));
    }
    let mut out = data.clone();
    for k in 0..n {
        out = regularize_orbital(&out, model, k, k)?;
    }
    Ok(out)
}

/// Residuals of the sum rules for one orbital: per coupled bath energy the
/// value and slope conditions, then the normalization.
pub fn sum_rule_residuals(data: &SpectralData, model: &ImpurityModel, slot: usize, alpha: usize) -> Vec<f64> {
    let poles = data.weights(slot);
    let mut out = Vec::new();
    for (e, v) in model.coupled_bath(alpha) {
        out.push(poles.iter().map(|&(w, l)| l / (e - w)).sum::<f64>());
        out.push(poles.iter().map(|&(w, l)| l / ((e - w) * (e - w))).sum::<f64>() - 1.0 / (v * v));
    }
    out.push(poles.iter().map(|p| p.1).sum::<f64>() - 1.0);
    out
}

/// Weight of the lowest particle pole of the half-filled two-site model
/// from the two particle excitation energies.
pub fn two_site_lambda(omega_p0: f64, omega_p2: f64, v: f64) -> Result<f64> {
    let (a, c) = (omega_p0 * omega_p0, omega_p2 * omega_p2);
    if v == 0.0 || (a - c).abs() < MERGE_TOL {
        return Err(Error::Regularization(format!("closed form undefined for V={v}, w0={omega_p0}, w2={omega_p2}")));
    }
    Ok(a * (v * v - c) / (2.0 * v * v * (a - c)))
}

/// Half-filled two-site closed form: the lower particle pole pair gets
/// `lambda`, the upper `1/2 - lambda`, mirrored on the hole side. `lambda`
/// is clipped into `[0, 1/2]`; the unclipped value is returned alongside.
pub fn regularize_two_site_ph(data: &SpectralData, v: f64, slot: usize) -> Result<(SpectralData, f64)> {
    let poles = data.weights(slot);
    let nh = data.hole.len();
    let hole: Vec<(f64, f64)> = poles[..nh].to_vec();
    let particle: Vec<(f64, f64)> = poles[nh..].to_vec();
    let hc = merge_degenerate(&hole);
    let pc = merge_degenerate(&particle);
    if hc.len() != 2 || pc.len() != 2 {
        return Err(Error::Regularization(format!("closed form needs two hole and two particle energies, got {} and {}", hc.len(), pc.len())));
    }
    let raw = two_site_lambda(pc[0].omega, pc[1].omega, v)?;
    let lam = raw.clamp(0.0, 0.5);
    // hole clusters ascend in energy, so the mirror of pc[0] is hc[1]
    let mut clusters = hc.clone();
    clusters.extend(pc.iter().map(|c| Cluster { members: c.members.iter().map(|i| i + nh).collect(), ..c.clone() }));
    let w = [0.5 - lam, lam, lam, 0.5 - lam];
    Ok((spread(data, slot, &clusters, &w), raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::GreensEvaluator;
    use crate::hamiltonian::{build_two_site_hamiltonian, two_site_spin_z};
    use crate::model::TwoSiteParams;
    use crate::oracle::exact_spectral_data;
    use approx::assert_abs_diff_eq;

    const V: f64 = 0.745356;

    fn exact(p: &TwoSiteParams) -> SpectralData {
        exact_spectral_data(&build_two_site_hamiltonian(p).unwrap(), &two_site_spin_z(), &[0]).unwrap()
    }

    fn perturbed(d: &SpectralData, noise: f64) -> SpectralData {
        let mut d = d.clone();
        for p in d.particle.iter_mut().chain(d.hole.iter_mut()) {
            if p.lambda[0] > 0.0 {
                p.lambda[0] += noise;
            }
        }
        d
    }

    #[test]
    fn exact_weights_are_a_fixed_point() {
        for p in [TwoSiteParams::half_filled(4.0, V), TwoSiteParams::new(4.0, -0.16016, -0.29764, 0.93709), TwoSiteParams::new(2.0, 0.3, 0.5, 0.6)] {
            let d = exact(&p);
            let r = regularize(&d, &p.to_model()).unwrap();
            for (a, b) in d.poles().zip(r.poles()) {
                assert_abs_diff_eq!(a.lambda[0], b.lambda[0], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_value() {
        let l = two_site_lambda(0.5478358, 3.0422741, V).unwrap();
        assert_abs_diff_eq!(l, 0.262, epsilon = 5e-4);
        assert!(two_site_lambda(1.0, 1.0, V).is_err());
        assert!(two_site_lambda(0.5, 3.0, 0.0).is_err());
    }

    #[test]
    fn perturbed_weights_restore_cancellation() {
        let p = TwoSiteParams::half_filled(4.0, V);
        let m = p.to_model();
        let d = perturbed(&exact(&p), 0.05);
        let r = regularize(&d, &m).unwrap();
        for res in sum_rule_residuals(&r, &m, 0, 0) {
            assert!(res.abs() < 1e-12, "{res}");
        }
        let g = GreensEvaluator::new(r.clone(), m.clone(), 0.05).unwrap();
        g.check_regular().unwrap();
        assert!(g.sigma_real(0.0).is_finite());
        let (c, _) = regularize_two_site_ph(&d, V, 0).unwrap();
        for (a, b) in r.poles().zip(c.poles()) {
            assert_abs_diff_eq!(a.lambda[0], b.lambda[0], epsilon = 1e-10);
        }
    }

    #[test]
    fn non_symmetric_noise() {
        let p = TwoSiteParams::new(4.0, -0.16016, -0.29764, 0.93709);
        let m = p.to_model();
        let mut d = exact(&p);
        for (k, q) in d.particle.iter_mut().chain(d.hole.iter_mut()).enumerate() {
            if q.lambda[0] > 0.0 {
                q.lambda[0] += 0.03 * if k % 2 == 0 { 1.0 } else { -0.5 };
            }
        }
        let r = regularize(&d, &m).unwrap();
        for res in sum_rule_residuals(&r, &m, 0, 0) {
            assert!(res.abs() < 1e-12, "{res}");
        }
        assert!(r.poles().all(|q| (0.0..=1.0).contains(&q.lambda[0])));
    }

    #[test]
    fn clipping_keeps_constraints() {
        let p = TwoSiteParams::new(4.0, -0.16016, -0.29764, 0.93709);
        let m = p.to_model();
        let mut d = exact(&p);
        // push the largest weight far up so the least-squares step would
        // drive a small one negative
        let k = (0..d.particle.len()).max_by(|&a, &b| d.particle[a].lambda[0].total_cmp(&d.particle[b].lambda[0])).unwrap();
        d.particle[k].lambda[0] += 0.8;
        match regularize(&d, &m) {
            Ok(r) => {
                assert!(r.poles().all(|q| (0.0..=1.0).contains(&q.lambda[0])));
                for res in sum_rule_residuals(&r, &m, 0, 0) {
                    assert!(res.abs() < 1e-10, "{res}");
                }
            }
            Err(e) => assert!(matches!(e, Error::Regularization(_))),
        }
    }

    #[test]
    fn merging() {
        let c = merge_degenerate(&[(1.0, 0.1), (-1.0, 0.2), (1.0 + 1e-12, 0.3)]);
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].members, vec![0, 2]);
        assert_abs_diff_eq!(c[1].weight, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn too_few_poles_is_infeasible() {
        let p = TwoSiteParams::half_filled(4.0, V);
        let mut d = exact(&p);
        d.particle.truncate(1);
        d.hole.clear();
        assert!(matches!(regularize(&d, &p.to_model()), Err(Error::Regularization(_))));
    }

    #[test]
    fn empty_impurity_ground_state() {
        // two clusters against three rules: dependent but consistent
        let p = TwoSiteParams::new(4.43, -1.62, 0.45, 0.156);
        let d = exact(&p);
        assert_eq!(d.n0, 0);
        let r = regularize(&perturbed(&d, 0.01), &p.to_model()).unwrap();
        for (a, b) in d.poles().zip(r.poles()) {
            assert_abs_diff_eq!(a.lambda[0], b.lambda[0], epsilon = 1e-10);
        }
    }

    #[test]
    fn pole_next_to_bath_level() {
        // a pole 0.008 from eps2 makes the slope rule stiff; the bounds and
        // the normalization compete with it
        let p = TwoSiteParams::new(5.766123907611526, 3.819925279357669, 0.6953273780187246, 0.18766192623690317);
        let m = p.to_model();
        let r = regularize(&perturbed(&exact(&p), 0.015), &m).unwrap();
        for x in sum_rule_residuals(&r, &m, 0, 0) {
            assert!(x.abs() < 1e-12, "{x}");
        }
        assert!(r.poles().all(|q| (0.0..=1.0).contains(&q.lambda[0])));
    }

    #[test]
    fn nnls_matches_known_solution() {
        let e = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let f = DVector::from_vec(vec![2.0, -1.0, 1.0]);
        let u = nnls(&e, &f).unwrap();
        assert_abs_diff_eq!(u[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(u[1], 0.0, epsilon = 1e-12);
    }
}
