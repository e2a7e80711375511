//! Machine-readable output formats.
//!
//! Every emitter builds the complete file as a string: callers write files
//! atomically once all computation has succeeded. Formats are fixed so reruns
//! are byte-identical: JSON is serde pretty-printed with struct-ordered keys,
//! CSV is comma/LF/UTF-8 with pinned float precision (percentages one
//! decimal, coordinates six), and the SVG uses two-decimal positions with
//! deterministic label placement.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::embedding::{ClusterSweepReport, Embedding2D};
use crate::lexicon::{Lexicon, Role};
use crate::matrix::ClassMatrix;
use crate::occurrence::{DependencePair, OccurrenceMatrix};

fn pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report structs serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ClassDoc<'a> {
    id: &'a str,
    frame: Vec<&'a str>,
    members: usize,
}

#[derive(Serialize)]
struct StatsDoc {
    raw_root_classes: usize,
    raw_subclasses: usize,
    merged_subclasses: usize,
    retained_subclasses: usize,
    effective_classes: usize,
    total_members: usize,
}

#[derive(Serialize)]
struct LexiconDoc<'a> {
    classes: Vec<ClassDoc<'a>>,
    stats: StatsDoc,
}

/// `lexicon.json`: effective classes in document order plus source counts.
pub fn lexicon_json(lexicon: &Lexicon) -> String {
    pretty(&LexiconDoc {
        classes: lexicon
            .classes
            .iter()
            .map(|c| ClassDoc {
                id: &c.id,
                frame: c.frame.iter().map(|r| r.name()).collect(),
                members: c.member_count,
            })
            .collect(),
        stats: StatsDoc {
            raw_root_classes: lexicon.stats.raw_root_classes,
            raw_subclasses: lexicon.stats.raw_subclasses,
            merged_subclasses: lexicon.stats.merged_subclasses,
            retained_subclasses: lexicon.stats.retained_subclasses,
            effective_classes: lexicon.classes.len(),
            total_members: lexicon.total_members,
        },
    })
}

/// `matrix.csv`: one row per effective class, binary role incidence.
pub fn matrix_csv(cm: &ClassMatrix) -> String {
    let mut out = String::from("class_id,members");
    for role in &cm.role_order {
        out.push(',');
        out.push_str(role.name());
    }
    out.push('\n');
    for ((id, &members), row) in cm.class_ids.iter().zip(&cm.member_counts).zip(&cm.bits) {
        out.push_str(id);
        out.push(',');
        out.push_str(&members.to_string());
        for &bit in row {
            out.push(',');
            out.push(if bit == 1 { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct FramesDoc {
    vocabulary_size: usize,
    max_frame_size: usize,
    unique_frames: usize,
    possible_frames: u64,
    frames: Vec<Vec<String>>,
}

/// `frames.json`: observed role combinations against the combinatorial space.
pub fn frames_json(
    vocabulary_size: usize,
    max_frame_size: usize,
    possible_frames: u64,
    frames: &BTreeSet<BTreeSet<Role>>,
) -> String {
    pretty(&FramesDoc {
        vocabulary_size,
        max_frame_size,
        unique_frames: frames.len(),
        possible_frames,
        frames: frames
            .iter()
            .map(|f| f.iter().map(|r| r.name().to_string()).collect())
            .collect(),
    })
}

/// `occurrence.csv`: row role against column role, percentages with one
/// decimal. Row labels sit under a leading `role` header column.
pub fn occurrence_csv(om: &OccurrenceMatrix) -> String {
    percent_table_csv(&om.role_order, &om.percent)
}

/// Square percentage table in the `occurrence.csv` format; also used to dump
/// the brute-force oracle so the two files are directly comparable.
pub fn percent_table_csv(roles: &[Role], percent: &[Vec<f64>]) -> String {
    let mut out = String::from("role");
    for role in roles {
        out.push(',');
        out.push_str(role.name());
    }
    out.push('\n');
    for (role, row) in roles.iter().zip(percent) {
        out.push_str(role.name());
        for &p in row {
            out.push(',');
            out.push_str(&format!("{p:.1}"));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct PairDoc<'a> {
    dependent: &'a str,
    context: &'a str,
    percent: f64,
}

#[derive(Serialize)]
struct DependenceDoc<'a> {
    threshold: f64,
    pairs: Vec<PairDoc<'a>>,
}

/// `dependence.json`: pairs at or above the threshold, percent rounded to one
/// decimal to match the CSV display convention.
pub fn dependence_json(pairs: &[DependencePair], threshold: f64) -> String {
    pretty(&DependenceDoc {
        threshold,
        pairs: pairs
            .iter()
            .map(|p| PairDoc {
                dependent: p.dependent.name(),
                context: p.context.name(),
                percent: (p.percent * 10.0).round() / 10.0,
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct SweepEntryDoc {
    k: usize,
    inertia: f64,
    clusters: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct MergeEventDoc {
    k: usize,
    roles: Vec<String>,
}

#[derive(Serialize)]
struct ClustersDoc {
    roles: Vec<String>,
    sweep: Vec<SweepEntryDoc>,
    merge_events: Vec<MergeEventDoc>,
}

/// `clusters.json`: every clustering of the sweep (k descending) with role
/// groups, plus merge events in first-seen order.
pub fn clusters_json(report: &ClusterSweepReport) -> String {
    let sweep = report
        .clusterings
        .iter()
        .map(|c| {
            let mut groups: Vec<Vec<String>> = vec![Vec::new(); c.k];
            for (i, &a) in c.assignment.iter().enumerate() {
                groups[a].push(report.role_order[i].name().to_string());
            }
            for g in &mut groups {
                g.sort();
            }
            groups.sort();
            SweepEntryDoc {
                k: c.k,
                inertia: c.inertia,
                clusters: groups,
            }
        })
        .collect();
    pretty(&ClustersDoc {
        roles: report.role_order.iter().map(|r| r.name().to_string()).collect(),
        sweep,
        merge_events: report
            .merge_events
            .iter()
            .map(|e| MergeEventDoc {
                k: e.k,
                roles: e.roles.iter().map(|r| r.name().to_string()).collect(),
            })
            .collect(),
    })
}

/// `tsne.csv`: role label and 2-D coordinates, six decimals.
pub fn tsne_csv(emb: &Embedding2D) -> String {
    let mut out = String::from("role,x,y\n");
    for (role, xy) in emb.role_order.iter().zip(&emb.coords) {
        out.push_str(&format!("{},{:.6},{:.6}\n", role.name(), xy[0], xy[1]));
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `tsne.svg`: 800x600 labeled scatter plot of the embedding.
///
/// Labels that would overlap an earlier label are stacked downward in role
/// order, so the layout is a pure function of the coordinates.
pub fn tsne_svg(emb: &Embedding2D) -> String {
    const WIDTH: f64 = 800.0;
    const HEIGHT: f64 = 600.0;
    const MARGIN_L: f64 = 60.0;
    const MARGIN_R: f64 = 40.0;
    const MARGIN_T: f64 = 46.0;
    const MARGIN_B: f64 = 52.0;
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for xy in &emb.coords {
        x_min = x_min.min(xy[0]);
        x_max = x_max.max(xy[0]);
        y_min = y_min.min(xy[1]);
        y_max = y_max.max(xy[1]);
    }
    if emb.coords.is_empty() {
        x_min = -1.0;
        x_max = 1.0;
        y_min = -1.0;
        y_max = 1.0;
    }
    let pad = |lo: &mut f64, hi: &mut f64| {
        let range = *hi - *lo;
        let p = if range > 0.0 { range * 0.08 } else { 1.0 };
        *lo -= p;
        *hi += p;
    };
    pad(&mut x_min, &mut x_max);
    pad(&mut y_min, &mut y_max);

    let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| MARGIN_T + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#b0b0b0\" stroke-width=\"1\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">Thematic role map (t-SNE, perplexity {}, seed {})</text>\n",
        WIDTH / 2.0,
        emb.perplexity,
        emb.seed
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">dimension 1</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 16.0
    ));
    svg.push_str(&format!(
        "  <text x=\"20\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">dimension 2</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    ));

    // Approximate 12px sans-serif glyph width for collision boxes.
    const CHAR_W: f64 = 6.8;
    const LABEL_H: f64 = 12.0;
    let mut placed: Vec<(f64, f64, f64, f64)> = Vec::new(); // x, y-top, w, h
    for (role, xy) in emb.role_order.iter().zip(&emb.coords) {
        let px = sx(xy[0]);
        let py = sy(xy[1]);
        svg.push_str(&format!(
            "  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"#3b6ea5\" \
             stroke=\"#ffffff\" stroke-width=\"1\"/>\n"
        ));
        let label = xml_escape(role.name());
        let w = CHAR_W * role.name().chars().count() as f64;
        let lx = px + 7.0;
        let mut top = py - LABEL_H / 2.0;
        let overlaps = |top: f64, placed: &[(f64, f64, f64, f64)]| {
            placed.iter().any(|&(ox, otop, ow, oh)| {
                lx < ox + ow && ox < lx + w && top < otop + oh && otop < top + LABEL_H
            })
        };
        while overlaps(top, &placed) {
            top += LABEL_H + 2.0;
        }
        placed.push((lx, top, w, LABEL_H));
        svg.push_str(&format!(
            "  <text x=\"{lx:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" \
             font-size=\"12\" fill=\"#202020\">{label}</text>\n",
            top + LABEL_H - 2.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
