//! Static SVG plots. Data-bearing elements carry a `class` and `data-*`
//! attributes so tests can inspect them without rendering.

use std::fmt::Write;

use sentitrend_core::cluster::{ClusterAssignment, Dendrogram};
use sentitrend_core::ingest::CountrySeries;

pub const BAR_CAPTION: &str = "Frequency of positive and negative tweets";

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const POSITIVE: &str = "#2b8cbe";
const NEGATIVE: &str = "#e34a33";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"##
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="white"/>"##);
}

/// Dendrogram with leaves coloured by cluster.
pub fn dendrogram(d: &Dendrogram, assignment: &ClusterAssignment) -> String {
    let n = d.leaves();
    let root = n + d.merges.len() - 1;
    let children = |id: usize| (d.merges[id - n].a, d.merges[id - n].b);

    // leaf order from a depth-first walk, left child first
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if id < n {
            order.push(id);
        } else {
            let (a, b) = children(id);
            stack.push(b);
            stack.push(a);
        }
    }

    let (left, top, step, plot_h) = (60.0, 40.0, 22.0, 320.0);
    let width = left * 2.0 + step * (n.max(2) - 1) as f64;
    let height = top + plot_h + 70.0;
    // drawn heights never go below a child's, whatever the linkage does
    let mut heights = vec![0.0f64; n + d.merges.len()];
    let mut xs = vec![0.0f64; n + d.merges.len()];
    for (pos, &leaf) in order.iter().enumerate() {
        xs[leaf] = left + step * pos as f64;
    }
    for (k, m) in d.merges.iter().enumerate() {
        heights[n + k] = m.distance.max(heights[m.a]).max(heights[m.b]);
        xs[n + k] = 0.5 * (xs[m.a] + xs[m.b]);
    }
    let max_h = heights[root].max(f64::MIN_POSITIVE);
    let y = |h: f64| top + plot_h * (1.0 - h / max_h);

    let mut out = String::new();
    open(&mut out, width, height);
    let _ = writeln!(
        out,
        r##"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">{} linkage, {} clusters</text>"##,
        width / 2.0,
        d.linkage.name(),
        assignment.k
    );
    let _ = writeln!(out, r##"<line x1="{:.1}" y1="{top:.1}" x2="{:.1}" y2="{:.1}" stroke="#888"/>"##, left - 20.0, left - 20.0, y(0.0));
    for frac in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            out,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"##,
            left - 24.0,
            y(frac * max_h) + 4.0,
            frac * max_h
        );
    }
    for (k, m) in d.merges.iter().enumerate() {
        let h = y(heights[n + k]);
        let _ = writeln!(
            out,
            r##"<path class="merge" data-a="{}" data-b="{}" data-distance="{}" d="M{:.1},{:.1} V{h:.1} H{:.1} V{:.1}" fill="none" stroke="#333"/>"##,
            m.a,
            m.b,
            m.distance,
            xs[m.a],
            y(heights[m.a]),
            xs[m.b],
            y(heights[m.b]),
        );
    }
    for &leaf in &order {
        let label = &d.leaf_labels[leaf];
        let cluster = assignment.cluster_of(label).unwrap_or(0);
        let colour = PALETTE[(cluster.max(1) - 1) % PALETTE.len()];
        let (x, ly) = (xs[leaf], y(0.0) + 10.0);
        let _ = writeln!(
            out,
            r##"<text class="leaf" data-cluster="{cluster}" x="{x:.1}" y="{ly:.1}" fill="{colour}" transform="rotate(60 {x:.1} {ly:.1})">{}</text>"##,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Weekly positive/negative counts as grouped bars.
pub fn weekly_bars(series: &CountrySeries) -> String {
    let weeks = series.week_count();
    let (left, top, plot_w, plot_h) = (50.0, 40.0, 80.0 * weeks.max(1) as f64, 220.0);
    let (width, height) = (left + plot_w + 30.0, top + plot_h + 70.0);
    let max = series.pos_counts.iter().chain(&series.neg_counts).copied().max().unwrap_or(0).max(1) as f64;
    let bar_h = |c: u64| plot_h * c as f64 / max;
    let base = top + plot_h;

    let mut out = String::new();
    open(&mut out, width, height);
    let _ = writeln!(
        out,
        r##"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">{}: {}</text>"##,
        width / 2.0,
        escape(&series.country),
        BAR_CAPTION
    );
    let _ = writeln!(out, r##"<line x1="{left:.1}" y1="{base:.1}" x2="{:.1}" y2="{base:.1}" stroke="#888"/>"##, left + plot_w);
    let _ = writeln!(out, r##"<text x="{:.1}" y="{:.1}" text-anchor="end">{max}</text>"##, left - 4.0, top + 4.0);
    let _ = writeln!(out, r##"<text x="{:.1}" y="{:.1}" text-anchor="end">0</text>"##, left - 4.0, base + 4.0);
    for w in 0..weeks {
        let x = left + 80.0 * w as f64 + 12.0;
        for (class, colour, count, dx) in
            [("pos", POSITIVE, series.pos_counts[w], 0.0), ("neg", NEGATIVE, series.neg_counts[w], 28.0)]
        {
            let h = bar_h(count);
            let _ = writeln!(
                out,
                r##"<rect class="bar {class}" data-week="{}" data-count="{count}" x="{:.1}" y="{:.1}" width="26" height="{h:.1}" fill="{colour}"/>"##,
                w + 1,
                x + dx,
                base - h
            );
        }
        let _ = writeln!(out, r##"<text x="{:.1}" y="{:.1}" text-anchor="middle">Week {}</text>"##, x + 27.0, base + 16.0, w + 1);
    }
    let legend_y = base + 40.0;
    let _ = writeln!(out, r##"<rect x="{left:.1}" y="{:.1}" width="10" height="10" fill="{POSITIVE}"/>"##, legend_y - 9.0);
    let _ = writeln!(out, r##"<text x="{:.1}" y="{legend_y:.1}">positive</text>"##, left + 14.0);
    let _ = writeln!(out, r##"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{NEGATIVE}"/>"##, left + 80.0, legend_y - 9.0);
    let _ = writeln!(out, r##"<text x="{:.1}" y="{legend_y:.1}">negative</text>"##, left + 94.0);
    out.push_str("</svg>\n");
    out
}
