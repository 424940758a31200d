use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            _ => Err(Error::InvalidOverride {
                key: "format".into(),
                reason: format!("`{s}` is not one of csv, json, svg"),
            }),
        }
    }
}

/// `printf("%.{digits}g")`-style formatting: `digits` significant digits,
/// trailing zeros dropped, scientific notation outside `[1e-4, 10^digits)`.
pub fn format_significant(value: f64, digits: usize) -> String {
    format_sig(value, digits, true)
}

/// Like [`format_significant`] but keeps trailing zeros, so every value
/// shows exactly `digits` significant digits (`%#.{digits}g`).
pub fn format_table_value(value: f64, digits: usize) -> String {
    format_sig(value, digits, false)
}

fn format_sig(value: f64, digits: usize, trim: bool) -> String {
    let digits = digits.max(1);
    let trim_zeros = |s: &str| if trim { trim_zeros(s).to_owned() } else { s.to_owned() };
    if value == 0.0 {
        return "0".into();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{value:.decimals$}"))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn render_csv(dataset: &Dataset) -> String {
    let mut out = String::from("series,x,y\n");
    for s in dataset.series() {
        let label = csv_field(&s.label);
        for &(x, y) in &s.points {
            let _ = writeln!(out, "{label},{},{}", format_significant(x, 17), format_significant(y, 17));
        }
    }
    out
}

pub fn render_json(dataset: &Dataset) -> Result<String> {
    let mut text = serde_json::to_string_pretty(dataset).map_err(|source| Error::Json {
        context: "serializing dataset".into(),
        source,
    })?;
    text.push('\n');
    Ok(text)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Line chart with one polyline per series and a legend on the right.
pub fn render_svg(dataset: &Dataset) -> String {
    const WIDTH: f64 = 760.0;
    const HEIGHT: f64 = 480.0;
    const LEFT: f64 = 90.0;
    const RIGHT: f64 = 190.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 60.0;
    const TICKS: usize = 5;

    let points = dataset.series().iter().flat_map(|s| s.points.iter());
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::MAX, f64::MIN, 0.0f64, f64::MIN);
    for &(x, y) in points {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    if y_max <= y_min {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    if y_min < 0.0 {
        y_min -= pad;
    }
    y_max += pad;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        xml_escape(dataset.label())
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{LEFT:.1},{TOP:.1} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );
    for i in 0..=TICKS {
        let t = i as f64 / TICKS as f64;
        let xv = x_min + t * (x_max - x_min);
        let yv = y_min + t * (y_max - y_min);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            format_significant(xv, 4)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            format_significant(yv, 4)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        xml_escape(&dataset.axes().x.caption())
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        xml_escape(&dataset.axes().y.caption())
    );

    for (i, s) in dataset.series().iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
        for c in &coords {
            let (cx, cy) = c.split_once(',').expect("coordinate pair");
            let _ = writeln!(svg, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{colour}"/>"#);
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 20.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn render(dataset: &Dataset, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Csv => render_csv(dataset),
        OutputFormat::Json => render_json(dataset)?,
        OutputFormat::Svg => render_svg(dataset),
    })
}

pub fn emit(dataset: &Dataset, format: OutputFormat, destination: &Path) -> Result<()> {
    let text = render(dataset, format)?;
    std::fs::write(destination, text).map_err(|source| Error::Io {
        path: destination.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::figures::{reproduce_figure, FigureId};

    fn fig1() -> Dataset {
        reproduce_figure(FigureId::Fig1, &Default::default()).unwrap()
    }

    #[test]
    fn significant_formatting() {
        assert_eq!(format_significant(0.23004972, 6), "0.23005");
        assert_eq!(format_significant(0.230050, 6), "0.23005");
        assert_eq!(format_significant(130.49542, 6), "130.495");
        assert_eq!(format_significant(1.0, 17), "1");
        assert_eq!(format_significant(10.0, 6), "10");
        assert_eq!(format_significant(-2.5e-7, 3), "-2.5e-7");
        assert_eq!(format_significant(1234567.0, 6), "1.23457e6");
        assert_eq!(format_significant(0.0, 6), "0");
        assert_eq!(format_table_value(0.23004972, 6), "0.230050");
        assert_eq!(format_table_value(1.0, 6), "1.00000");
        let v = 0.1 + 0.2;
        assert_eq!(format_significant(v, 17).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn csv_layout() {
        let d = fig1();
        let csv = render_csv(&d);
        assert!(csv.starts_with("series,x,y\n"));
        assert!(!csv.contains('\r'));
        assert_eq!(csv.lines().count(), d.point_count() + 1);
        let row = csv.lines().nth(11).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "delta_i=4");
        assert_eq!(fields[1], "1");
        let y: f64 = fields[2].parse().unwrap();
        assert_eq!(y, d.series()[1].points[0].1);
    }

    #[test]
    fn csv_quotes_labels() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(csv_field("plain"), "plain");
    }

    #[test]
    fn json_roundtrip() {
        let d = fig1();
        let text = render_json(&d).unwrap();
        let back: Dataset = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let label = text.find("\"label\"").unwrap();
        let axes = text.find("\"axes\"").unwrap();
        let series = text.find("\"series\"").unwrap();
        let provenance = text.find("\"provenance\"").unwrap();
        assert!(label < axes && axes < series && series < provenance);
    }

    #[test]
    fn svg_is_deterministic_and_labelled() {
        let a = render_svg(&fig1());
        let b = render_svg(&fig1());
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("information gain G_n [nats]"));
        assert!(a.contains("exposure n"));
        assert_eq!(a.matches("<polyline").count(), 5);
        for label in ["delta_i=2", "delta_i=10"] {
            assert!(a.contains(label));
        }
    }

    #[test]
    fn emit_reports_path_on_failure() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("no/such/dir/out.csv");
        match emit(&fig1(), OutputFormat::Csv, &missing) {
            Err(Error::Io { path, .. }) => assert_eq!(path, missing),
            other => panic!("expected io error, got {other:?}"),
        }
        let ok = dir.path().join("out.svg");
        emit(&fig1(), OutputFormat::Svg, &ok).unwrap();
        assert_eq!(std::fs::read_to_string(ok).unwrap(), render_svg(&fig1()));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert!("png".parse::<OutputFormat>().is_err());
        assert_eq!(OutputFormat::from_path(Path::new("a/b.svg")), Some(OutputFormat::Svg));
        assert_eq!(OutputFormat::from_path(Path::new("a/b")), None);
    }
}
