//! Minimal static SVG scree plot: log10 volume against rank.

/// Volumes of zero are floored here so the log axis stays finite.
const LOG_FLOOR: f64 = -16.0;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;

pub fn scree_plot(ranks: &[usize], volumes: &[f64]) -> String {
    assert_eq!(ranks.len(), volumes.len());
    assert!(!ranks.is_empty());

    let logs: Vec<f64> = volumes
        .iter()
        .map(|v| if *v > 0.0 { v.log10().max(LOG_FLOOR) } else { LOG_FLOOR })
        .collect();

    let y_min = logs.iter().copied().fold(0.0f64, f64::min).floor().min(-1.0);
    let y_max = 0.0;
    let x_min = *ranks.first().unwrap() as f64;
    let x_max = *ranks.last().unwrap() as f64;
    let x_span = (x_max - x_min).max(1.0);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |rank: f64| MARGIN_LEFT + (rank - x_min) / x_span * plot_w;
    let y_of = |log: f64| MARGIN_TOP + (y_max - log) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    svg.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{MARGIN_TOP}\" x2=\"{x0}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{:.1}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        WIDTH - MARGIN_RIGHT
    ));

    // Rank ticks.
    for &rank in ranks {
        let x = x_of(rank as f64);
        svg.push_str(&format!(
            "  <line x1=\"{x:.1}\" y1=\"{y0}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{rank}</text>\n",
            y0 + 20.0
        ));
    }

    // Log-volume ticks at integer decades.
    let mut tick = y_min as i64;
    while tick <= y_max as i64 {
        let y = y_of(tick as f64);
        svg.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{x0}\" y2=\"{y:.1}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{tick}</text>\n",
            x0 - 9.0,
            y + 4.0
        ));
        tick += 1;
    }

    // Axis titles.
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">rank</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">log10 volume</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    // The scree itself.
    let points: Vec<String> = ranks
        .iter()
        .zip(&logs)
        .map(|(r, l)| format!("{:.1},{:.1}", x_of(*r as f64), y_of(*l)))
        .collect();
    svg.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n",
        points.join(" ")
    ));
    for point in &points {
        let (x, y) = point.split_once(',').unwrap();
        svg.push_str(&format!(
            "  <circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"steelblue\"/>\n"
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_deterministic_and_well_formed() {
        let a = scree_plot(&[1, 2, 3], &[1.0, 0.5, 1e-3]);
        let b = scree_plot(&[1, 2, 3], &[1.0, 0.5, 1e-3]);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert!(a.contains("polyline"));
    }

    #[test]
    fn zero_volume_is_floored_not_infinite() {
        let svg = scree_plot(&[1, 2], &[1.0, 0.0]);
        assert!(!svg.contains("inf"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn single_rank_plot_renders() {
        let svg = scree_plot(&[1], &[1.0]);
        assert!(svg.contains("circle"));
    }
}
