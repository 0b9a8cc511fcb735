use super::EvalError;

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(EvalError::DegenerateVariance);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 || !(sxx * syy).is_finite() {
        return Err(EvalError::DegenerateVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn ln_factorials(n: usize) -> Vec<f64> {
    // Neumaier-compensated running sum of ln(i)
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in 1..=n {
        let v = (i as f64).ln();
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    out
}

/// Upper-tail hypergeometric probability `P(X >= hits_in_set)` for a draw
/// of `hits_total` from a universe of `universe` items, `set_size` of which
/// are in the annotated set.
pub fn hypergeom_enrichment(
    hits_in_set: u64,
    set_size: u64,
    hits_total: u64,
    universe: u64,
) -> Result<f64, EvalError> {
    let (k, big_k, n, big_n) = (hits_in_set, set_size, hits_total, universe);
    if big_k > big_n || n > big_n || k > big_k.min(n) {
        return Err(EvalError::InvalidCounts(format!("k={k} K={big_k} n={n} N={big_n}")));
    }
    let lo = n.saturating_sub(big_n - big_k);
    let hi = big_k.min(n);
    if k <= lo {
        return Ok(1.0);
    }
    let lf = ln_factorials(big_n as usize);
    let ln_choose = |a: u64, b: u64| lf[a as usize] - lf[b as usize] - lf[(a - b) as usize];
    let ln_denom = ln_choose(big_n, n);
    let mut p = 0.0;
    // summed from the far tail inward so p(k) >= p(k+1) holds bit-for-bit
    for x in (k..=hi).rev() {
        p += (ln_choose(big_k, x) + ln_choose(big_n - big_k, n - x) - ln_denom).exp();
    }
    Ok(p.min(1.0))
}
