//! JSON output with every float written to 17 significant digits.
//!
//! Seventeen digits pin an `f64` exactly, so emitted documents are
//! bit-stable and parse back to the same values.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

struct Exact<F>(F);

fn write_exact<W: ?Sized + io::Write>(w: &mut W, v: f64) -> io::Result<()> {
    if v.is_finite() {
        write!(w, "{v:.16e}")
    } else {
        // JSON has no infinities; serde_json writes null for them as well
        w.write_all(b"null")
    }
}

macro_rules! delegate {
    ($($name:ident),*) => {
        $(
            #[inline]
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.$name(w)
            }
        )*
    };
}

impl<F: Formatter> Formatter for Exact<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write_exact(w, v)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write_exact(w, v as f64)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    delegate!(begin_array, end_array, end_array_value, begin_object, end_object, end_object_key, begin_object_value, end_object_value);
}

fn render<T: Serialize + ?Sized, F: Formatter>(value: &T, f: F) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Exact(f));
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    render(value, CompactFormatter)
}

pub fn to_string_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    render(value, PrettyFormatter::new())
}
