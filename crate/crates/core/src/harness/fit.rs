//! Regret growth-exponent estimation.

use serde::Serialize;

use super::HarnessError;

/// Least-squares fit of `log(mean regret)` against `log(T)`.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_used: usize,
    pub n_dropped: usize,
}

/// Fits the growth exponent from `(rounds, mean_regret)` points. Points with
/// non-positive regret are dropped with a warning; at least four surviving
/// points are required.
pub fn fit_regret_exponent(points: &[(f64, f64)]) -> Result<ExponentFit, HarnessError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = 0usize;
    for &(rounds, regret) in points {
        if regret > 0.0 && rounds > 0.0 {
            xs.push(rounds.ln());
            ys.push(regret.ln());
        } else {
            log::warn!("dropping non-positive fit point (T = {rounds}, regret = {regret})");
            dropped += 1;
        }
    }
    if xs.len() < 4 {
        return Err(HarnessError::NotEnoughPoints {
            needed: 4,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let pred = intercept + slope * x;
            (y - pred) * (y - pred)
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
        n_used: xs.len(),
        n_dropped: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_two_thirds_power_law() {
        let points: Vec<(f64, f64)> = [2000.0, 4000.0, 8000.0, 16000.0, 32000.0]
            .iter()
            .map(|&t: &f64| (t, 7.0 * t.powf(2.0 / 3.0)))
            .collect();
        let fit = fit_regret_exponent(&points).unwrap();
        assert!((fit.slope - 2.0 / 3.0).abs() < 1e-9);
        assert!((fit.intercept - 7.0f64.ln()).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_linear_growth() {
        let points: Vec<(f64, f64)> = [100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&t| (t, 3.0 * t))
            .collect();
        let fit = fit_regret_exponent(&points).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-9);
    }

    #[test]
    fn drops_nonpositive_points_and_errors_below_four() {
        let points = vec![
            (100.0, 10.0),
            (200.0, -1.0),
            (400.0, 20.0),
            (800.0, 0.0),
            (1600.0, 40.0),
        ];
        let err = fit_regret_exponent(&points).unwrap_err();
        match err {
            HarnessError::NotEnoughPoints { needed: 4, got: 3 } => {}
            other => panic!("unexpected {other:?}"),
        }
        let points = vec![
            (100.0, 10.0),
            (200.0, -1.0),
            (400.0, 20.0),
            (800.0, 28.0),
            (1600.0, 40.0),
        ];
        let fit = fit_regret_exponent(&points).unwrap();
        assert_eq!(fit.n_used, 4);
        assert_eq!(fit.n_dropped, 1);
    }
}
