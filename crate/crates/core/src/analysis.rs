//! Measurements on sampled wave fields: wavelength from zero crossings,
//! envelope peaks, and log-linear attenuation fits.

/// Interpolated zero-crossing positions of `values[range]`, in index units.
pub fn zero_crossings(values: &[f64], range: std::ops::Range<usize>) -> Vec<f64> {
    let mut out = Vec::new();
    for i in range.start..range.end.saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            out.push(i as f64);
        } else if a * b < 0.0 {
            out.push(i as f64 + a / (a - b));
        }
    }
    out
}

/// Twice the mean spacing of consecutive zero crossings. `None` when fewer
/// than two crossings are found.
pub fn wavelength_from_crossings(values: &[f64], range: std::ops::Range<usize>) -> Option<f64> {
    let z = zero_crossings(values, range);
    if z.len() < 2 {
        return None;
    }
    Some(2.0 * (z[z.len() - 1] - z[0]) / (z.len() - 1) as f64)
}

/// Least-squares line `y = intercept + slope x`. Returns `(slope, intercept)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Decay constant (per index) of a positive envelope over `range`, from a
/// log-linear fit. Positive for a decaying envelope.
pub fn attenuation_per_index(envelope: &[f64], range: std::ops::Range<usize>) -> Option<f64> {
    let xs: Vec<f64> = range.clone().map(|i| i as f64).collect();
    let ys: Vec<f64> = range.map(|i| envelope[i].ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return None;
    }
    linear_fit(&xs, &ys).map(|(slope, _)| -slope)
}

/// Running element-wise max of `|values|`.
pub fn accumulate_envelope(envelope: &mut [f64], values: &[f64]) {
    for (e, v) in envelope.iter_mut().zip(values) {
        *e = e.max(v.abs());
    }
}

/// Analytic attenuation constant (Np/m) of a plane wave in a lossy dielectric.
pub fn lossy_attenuation(omega: f64, mu: f64, eps: f64, sigma: f64) -> f64 {
    let loss_tangent = sigma / (omega * eps);
    omega * (mu * eps / 2.0).sqrt() * ((1.0 + loss_tangent * loss_tangent).sqrt() - 1.0).sqrt()
}
