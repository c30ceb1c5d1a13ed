//! Self-contained static SVG line plots for sweep summaries.
//!
//! Output is deterministic: fixed canvas geometry, fixed per-series colors,
//! and fixed-precision coordinate formatting, so re-rendering the same data
//! reproduces the file byte for byte.

/// One curve with an optional shaded band around it.
#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub color: String,
    pub mean: Vec<f64>,
    /// Lower and upper band edges, same length as `mean`.
    pub band: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Clone, Debug)]
pub struct PlotConfig {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Pin the y range instead of auto-scaling.
    pub y_range: Option<(f64, f64)>,
}

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 40.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if !(0.001..1000.0).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Render the series onto one SVG canvas.
pub fn render_line_plot(series: &[Series], config: &PlotConfig) -> String {
    let n_points = series.iter().map(|s| s.mean.len()).max().unwrap_or(0);
    let x_max = (n_points.saturating_sub(1)).max(1) as f64;

    let (y_min, y_max) = match config.y_range {
        Some(range) => range,
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for s in series {
                for &v in &s.mean {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                if let Some((lower, upper)) = &s.band {
                    for &v in lower {
                        lo = lo.min(v);
                    }
                    for &v in upper {
                        hi = hi.max(v);
                    }
                }
            }
            if !lo.is_finite() || !hi.is_finite() {
                (0.0, 1.0)
            } else if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        }
    };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |i: f64| MARGIN_LEFT + plot_w * i / x_max;
    let to_y = |v: f64| MARGIN_TOP + plot_h * (1.0 - (v - y_min) / (y_max - y_min));

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        config.title
    ));

    // Axes with five ticks each.
    for t in 0..=4 {
        let frac = t as f64 / 4.0;
        let y_val = y_min + (y_max - y_min) * (1.0 - frac);
        let y = MARGIN_TOP + plot_h * frac;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            fmt(MARGIN_LEFT),
            fmt(y),
            fmt(WIDTH - MARGIN_RIGHT),
            fmt(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            fmt(MARGIN_LEFT - 8.0),
            fmt(y + 4.0),
            fmt_tick(y_val)
        ));
        let x_val = x_max * frac;
        let x = MARGIN_LEFT + plot_w * frac;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            fmt(x),
            fmt(HEIGHT - MARGIN_BOTTOM + 20.0),
            fmt_tick(x_val)
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(MARGIN_LEFT),
        fmt(HEIGHT - MARGIN_BOTTOM)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(HEIGHT - MARGIN_BOTTOM),
        fmt(WIDTH - MARGIN_RIGHT),
        fmt(HEIGHT - MARGIN_BOTTOM)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(HEIGHT - 14.0),
        config.x_label
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
        fmt(MARGIN_TOP + plot_h / 2.0),
        fmt(MARGIN_TOP + plot_h / 2.0),
        config.y_label
    ));

    // Bands first so curves draw on top of them.
    for s in series {
        if let Some((lower, upper)) = &s.band {
            let mut path = String::from("M");
            for (i, &v) in upper.iter().enumerate() {
                path.push_str(&format!(" {},{}", fmt(to_x(i as f64)), fmt(to_y(v))));
            }
            for (i, &v) in lower.iter().enumerate().rev() {
                path.push_str(&format!(" {},{}", fmt(to_x(i as f64)), fmt(to_y(v))));
            }
            path.push_str(" Z");
            svg.push_str(&format!(
                "<path d=\"{path}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
                s.color
            ));
        }
    }
    for s in series {
        let points: Vec<String> = s
            .mean
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{},{}", fmt(to_x(i as f64)), fmt(to_y(v))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            points.join(" "),
            s.color
        ));
    }

    // Legend in the top-right corner.
    for (idx, s) in series.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 * idx as f64 + 6.0;
        let x = WIDTH - MARGIN_RIGHT - 150.0;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
            fmt(x),
            fmt(y - 10.0),
            s.color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            fmt(x + 18.0),
            fmt(y),
            s.name
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_deterministic_and_well_formed() {
        let series = vec![
            Series {
                name: "a".to_string(),
                color: "#d62728".to_string(),
                mean: vec![1.0, 0.5, 0.25],
                band: Some((vec![0.9, 0.4, 0.2], vec![1.1, 0.6, 0.3])),
            },
            Series {
                name: "b".to_string(),
                color: "#1f77b4".to_string(),
                mean: vec![0.8, 0.7, 0.6],
                band: None,
            },
        ];
        let cfg = PlotConfig {
            title: "losses".to_string(),
            x_label: "iteration".to_string(),
            y_label: "loss".to_string(),
            y_range: None,
        };
        let a = render_line_plot(&series, &cfg);
        let b = render_line_plot(&series, &cfg);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 2);
        assert_eq!(a.matches("<path").count(), 1);
    }

    #[test]
    fn constant_data_gets_padded_range() {
        let series = vec![Series {
            name: "flat".to_string(),
            color: "#2ca02c".to_string(),
            mean: vec![1.0, 1.0],
            band: None,
        }];
        let cfg = PlotConfig {
            title: "t".to_string(),
            x_label: "x".to_string(),
            y_label: "y".to_string(),
            y_range: None,
        };
        let svg = render_line_plot(&series, &cfg);
        assert!(svg.contains("polyline"));
    }
}
