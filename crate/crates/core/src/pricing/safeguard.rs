/// Screens turbocharged prices of one maturity, ordered by ascending strike.
///
/// A price is suspicious when it is negative, when it exceeds the spot, or
/// when it sits at or after the first strike where the sequence stops
/// descending. Suspicious prices are taken from `fallback`, clamped to
/// `[0, spot]`. Returns the screened prices and the replacement flags.
pub fn screen_prices(turbo: &[f64], fallback: &[f64], spot: f64) -> (Vec<f64>, Vec<bool>) {
    assert_eq!(turbo.len(), fallback.len());
    let first_ascent = turbo
        .windows(2)
        .position(|w| w[1] > w[0])
        .map(|i| i + 1)
        .unwrap_or(turbo.len());
    turbo
        .iter()
        .zip(fallback)
        .enumerate()
        .map(|(i, (&t, &f))| {
            let suspicious = !(t >= 0.0 && t <= spot) || i >= first_ascent;
            if suspicious {
                (f.clamp(0.0, spot), true)
            } else {
                (t, false)
            }
        })
        .unzip()
}
