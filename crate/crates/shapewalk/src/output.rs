//! Artifact emission: CSV and JSON with byte-stable formatting.
//!
//! Every artifact starts with a header recording the crate version, the
//! argv that produced it and the seed, and every float is printed with 17
//! significant digits so replays are byte-identical on the same platform.
//! Schemas are versioned; see `docs/formats.md`.

use crate::walk::WalkReport;
use serde::Serialize;

pub const CRATE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Bump when any emitted schema changes shape.
pub const SCHEMA_REVISION: u32 = 1;

/// Round-trip-safe float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalise -0.0
    format!("{x:.16e}")
}

/// Provenance stamped into every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunStamp {
    pub version: String,
    pub schema: String,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
}

impl RunStamp {
    pub fn new(schema: &str, argv: &[String], seed: Option<u64>) -> Self {
        RunStamp {
            version: CRATE_VERSION.to_string(),
            schema: format!("{schema}/{SCHEMA_REVISION}"),
            argv: argv.to_vec(),
            seed,
        }
    }

    pub fn csv_header(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# shapewalk {} schema={}\n",
            self.version, self.schema
        ));
        out.push_str(&format!("# argv: {}\n", self.argv.join(" ")));
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed: {seed}\n"));
        }
        out
    }
}

/// JSON artifact wrapper; serde keeps the field order fixed.
#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    #[serde(flatten)]
    pub stamp: RunStamp,
    pub data: T,
}

pub fn to_json<T: Serialize>(stamp: RunStamp, data: T) -> String {
    let env = Envelope { stamp, data };
    let mut s = serde_json::to_string_pretty(&env).expect("serializable");
    s.push('\n');
    s
}

/// Walk trajectory CSV: step, re_z, im_z, height.
pub fn walk_csv(report: &WalkReport, stamp: &RunStamp) -> String {
    let mut out = stamp.csv_header();
    out.push_str("step,re_z,im_z,height\n");
    for s in &report.samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.step,
            fmt_f64(s.re_z),
            fmt_f64(s.im_z),
            fmt_f64(s.height)
        ));
    }
    out
}

/// Section curve CSV: t (the string "inf" allowed), re_z, im_z.
pub fn curve_csv(
    points: &[(crate::groups::ProjLine, crate::lattice2::ShapePoint)],
    stamp: &RunStamp,
) -> String {
    let mut out = stamp.csv_header();
    out.push_str("t,re_z,im_z\n");
    for (t, sp) in points {
        out.push_str(&format!("{},{},{}\n", t, fmt_f64(sp.re()), fmt_f64(sp.im())));
    }
    out
}

/// Orthogonal-shape CSV: word_index, word_len, re_z, im_z, v1, v2, v3.
pub fn ortho_csv(samples: &[crate::ortho::OrthoSample], stamp: &RunStamp) -> String {
    let mut out = stamp.csv_header();
    out.push_str("word_index,word_len,re_z,im_z,v1,v2,v3\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.word_index,
            s.word_len,
            fmt_f64(s.shape.re()),
            fmt_f64(s.shape.im()),
            s.v[0],
            s.v[1],
            s.v[2]
        ));
    }
    out
}

/// Height field CSV: t1, t2, height.
pub fn height_field_csv(field: &crate::dioph::HeightField, stamp: &RunStamp) -> String {
    let mut out = stamp.csv_header();
    out.push_str(&format!(
        "# max_height: {} at t1={} t2={}\n",
        fmt_f64(field.max_height),
        fmt_f64(field.argmax.0),
        fmt_f64(field.argmax.1)
    ));
    out.push_str("t1,t2,height\n");
    for &(t1, t2, h) in &field.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(t1),
            fmt_f64(t2),
            fmt_f64(h)
        ));
    }
    out
}

/// Conditioned-shape CSV: m, n, re_z, im_z, height, route_gap.
pub fn conditioned_csv(
    report: &crate::dioph::cubic::ConditionedReport,
    stamp: &RunStamp,
) -> String {
    let mut out = stamp.csv_header();
    if report.truncated {
        out.push_str("# truncated: overflow at large exponents\n");
    }
    out.push_str("m,n,re_z,im_z,height,route_gap\n");
    for s in &report.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.exponents.0,
            s.exponents.1,
            fmt_f64(s.shape.re()),
            fmt_f64(s.shape.im()),
            fmt_f64(s.height),
            fmt_f64(s.route_gap)
        ));
    }
    out
}
