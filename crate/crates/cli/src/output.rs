//! Byte-stable CSV and JSON writers: every float is printed with 17
//! significant digits in lowercase scientific notation.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use nlwitness_core::response::Spectrum2d;
use nlwitness_core::scan::ScanRow;

pub const SCHEMA_VERSION: &str = "1";

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with scientific floats.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float(value).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// A report body with the schema version in front.
#[derive(Serialize)]
pub struct Versioned<'a, T: Serialize> {
    pub schema_version: &'static str,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn versioned<T: Serialize>(body: &T) -> String {
    to_json(&Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    })
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("t1,t2,t3,re_p,im_p,abs2_p,order\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            float(r.t1),
            float(r.t2),
            float(r.t3),
            float(r.value.re),
            float(r.value.im),
            float(r.value.norm_sqr()),
            r.order
        ));
    }
    out
}

pub fn spectrum_csv(s: &Spectrum2d) -> String {
    let mut out = String::from("omega1,omega3,re,im,abs\n");
    for (i, w1) in s.omega1.iter().enumerate() {
        for (j, w3) in s.omega3.iter().enumerate() {
            let v = s.values[[i, j]];
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                float(*w1),
                float(*w3),
                float(v.re),
                float(v.im),
                float(v.norm())
            ));
        }
    }
    out
}
