//! JSON serialization with every double printed at 17 significant digits,
//! matching the CSV outputs and round-tripping f64 exactly.

use std::io;

use serde::Serialize;

struct G17;

impl serde_json::ser::Formatter for G17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17);
    value
        .serialize(&mut ser)
        .expect("serialization of plain structs cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON output is UTF-8")
}
