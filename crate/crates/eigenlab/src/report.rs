//! CSV and SVG output with deterministic formatting.

use std::fmt::Write as _;
use std::io::Write;

use eigenlab_core::analysis::{Ledger, MassProfile, MassRow};
use serde::Serialize;

#[derive(Serialize)]
struct ProfileRecord<'a> {
    mode_index: usize,
    lambda: f64,
    h: f64,
    p0x: f64,
    p0y: f64,
    class: &'a str,
    theta0: f64,
    d: f64,
    alpha: f64,
    disc_mass: f64,
    bound: f64,
    slack: f64,
}

impl<'a> From<&'a MassRow> for ProfileRecord<'a> {
    fn from(r: &'a MassRow) -> Self {
        Self {
            mode_index: r.mode_index,
            lambda: r.lambda,
            h: r.h,
            p0x: r.p0.x,
            p0y: r.p0.y,
            class: r.class.label(),
            theta0: r.class.theta0(),
            d: r.d,
            alpha: r.alpha,
            disc_mass: r.disc_mass,
            bound: r.bound,
            slack: r.slack,
        }
    }
}

/// Profile rows of several points, in the given order, as CSV.
pub fn profile_csv<'a>(profiles: impl IntoIterator<Item = &'a MassProfile>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in profiles {
        for r in &p.rows {
            w.serialize(ProfileRecord::from(r)).expect("in-memory csv");
        }
    }
    w.into_inner().expect("in-memory csv")
}

/// One ledger row per entry, tagged with a label.
pub fn ledger_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a Ledger)>) -> Vec<u8> {
    #[derive(Serialize)]
    struct Rec<'a> {
        label: &'a str,
        alpha: f64,
        epsilon: f64,
        d: f64,
        lambda: f64,
        h: f64,
        disc_mass: f64,
        lower_chain: f64,
        pairing: f64,
        identity_residual: f64,
        radial_energy: f64,
        gradient_energy: f64,
        mass_outside: f64,
        laplace_pairing: f64,
        cross_term: f64,
        remainder: f64,
        radial_remainder: f64,
        measured_constant: f64,
        slope_constant: f64,
        wide_slope_constant: f64,
        upper_cap: f64,
        cap_slack: f64,
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for (label, l) in rows {
        w.serialize(Rec {
            label,
            alpha: l.alpha,
            epsilon: l.epsilon,
            d: l.d,
            lambda: l.lambda,
            h: l.h,
            disc_mass: l.disc_mass,
            lower_chain: l.lower_chain,
            pairing: l.pairing,
            identity_residual: l.identity_residual,
            radial_energy: l.radial_energy,
            gradient_energy: l.gradient_energy,
            mass_outside: l.mass_outside,
            laplace_pairing: l.laplace_pairing,
            cross_term: l.cross_term,
            remainder: l.remainder,
            radial_remainder: l.radial_remainder,
            measured_constant: l.measured_constant,
            slope_constant: l.slope_constant,
            wide_slope_constant: l.wide_slope_constant,
            upper_cap: l.upper_cap,
            cap_slack: l.cap_slack,
        })
        .expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

const PALETTE: [&str; 6] = ["#1b6ca8", "#d1495b", "#2e8b57", "#8e6c8a", "#e08e0b", "#444444"];

/// Scatter of disc mass against `λ`, one color per `α`, with the bound as a dashed line.
pub fn profile_svg(profile: &MassProfile, title: &str) -> String {
    let (w, h, m) = (720.0, 440.0, 56.0);
    let mut alphas: Vec<f64> = profile.rows.iter().map(|r| r.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let lmax = profile.rows.iter().map(|r| r.lambda).fold(1.0, f64::max);
    let ymax = profile
        .rows
        .iter()
        .map(|r| r.disc_mass.max(r.bound))
        .fold(1.0, f64::max)
        * 1.05;
    let x = |l: f64| m + (w - 2.0 * m) * l / lmax;
    let y = |v: f64| h - m - (h - 2.0 * m) * v / ymax;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = h - m,
        r = w - m
    );
    for k in 0..=4 {
        let v = ymax * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{:.2}</text>"#,
            m - 6.0,
            y(v) + 4.0,
            v
        );
        let l = lmax * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{:.1}</text>"#,
            x(l),
            h - m + 16.0,
            l
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">λ</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">disc mass</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (k, &a) in alphas.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let bound = 1.0 / (2.0 - a);
        let _ = writeln!(
            s,
            r#"<line x1="{m}" y1="{y0:.2}" x2="{r}" y2="{y0:.2}" stroke="{color}" stroke-dasharray="6 4"/>"#,
            y0 = y(bound),
            r = w - m
        );
        for r in profile.rows.iter().filter(|r| r.alpha == a) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#,
                x(r.lambda),
                y(r.disc_mass)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">α = {a}</text>"#,
            w - m - 70.0,
            m + 16.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Top-window summary of one point's profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowCheck {
    pub p0: [f64; 2],
    pub class: String,
    pub alpha: f64,
    pub bound: f64,
    /// Mode index range `[start, end)` of the checked window.
    pub window: [usize; 2],
    pub window_max: f64,
    pub argmax_mode: usize,
    pub passed: bool,
    /// Modes below the window whose disc mass exceeds the bound.
    pub low_mode_flags: Vec<usize>,
}

/// Checks the upper half of the computed spectrum against the bound for every `α`.
pub fn top_half_checks(profile: &MassProfile, n_modes: usize) -> Vec<WindowCheck> {
    let window = n_modes / 2..n_modes;
    let mut alphas: Vec<f64> = profile.rows.iter().map(|r| r.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    alphas
        .into_iter()
        .filter_map(|a| {
            let top = profile.window_max(a, window.clone())?;
            let low_mode_flags = profile
                .rows
                .iter()
                .filter(|r| r.alpha == a && r.mode_index < window.start && r.slack < 0.0)
                .map(|r| r.mode_index)
                .collect();
            Some(WindowCheck {
                p0: [top.p0.x, top.p0.y],
                class: top.class.label().into(),
                alpha: a,
                bound: top.bound,
                window: [window.start, window.end],
                window_max: top.disc_mass,
                argmax_mode: top.mode_index,
                passed: top.disc_mass <= top.bound,
                low_mode_flags,
            })
        })
        .collect()
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    f.sync_all()
}

#[cfg(test)]
mod tests {
    use super::*;
    use eigenlab_core::analysis::mass_profile;
    use eigenlab_core::{AnalyticMode, Bc, Point, PolygonDomain};

    fn profile() -> MassProfile {
        let dom = PolygonDomain::rectangle(1.0, 1.0, Bc::Dirichlet).unwrap();
        let modes: Vec<AnalyticMode> = [(1, 1), (1, 2), (2, 1), (2, 2)]
            .iter()
            .map(|&(m, n)| AnalyticMode::rectangle(1.0, 1.0, m, n, Bc::Dirichlet).unwrap())
            .collect();
        mass_profile(&modes, Point::new(0.5, 0.5), &[0.25, 0.5, 0.75], &dom).unwrap()
    }

    #[test]
    fn csv_has_header_and_one_row_per_entry() {
        let p = profile();
        let text = String::from_utf8(profile_csv([&p])).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "mode_index,lambda,h,p0x,p0y,class,theta0,d,alpha,disc_mass,bound,slack"
        );
        assert_eq!(lines.count(), 12);
        assert!(text.contains(",interior,"));
        assert_eq!(profile_csv([&p]), profile_csv([&p]));
    }

    #[test]
    fn svg_draws_every_point_and_bound() {
        let p = profile();
        let svg = profile_svg(&p, "square <center>");
        assert_eq!(svg.matches("<circle").count(), 12);
        assert_eq!(svg.matches("stroke-dasharray").count(), 3);
        assert!(svg.contains("&lt;center&gt;"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn window_checks_split_the_spectrum() {
        let p = profile();
        let checks = top_half_checks(&p, 4);
        assert_eq!(checks.len(), 3);
        for c in &checks {
            assert_eq!(c.window, [2, 4]);
            assert!(c.argmax_mode >= 2);
            assert_eq!(c.passed, c.window_max <= c.bound);
            assert!(c.low_mode_flags.iter().all(|&i| i < 2));
        }
    }
}
