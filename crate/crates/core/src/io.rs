//! Versioned CSV / JSON output helpers.

use std::io::Write;

use serde::Serialize;

/// Schema tag written as the first CSV line and as a JSON field.
pub const SCHEMA: &str = "newtonflow-v1";

/// Shortest representation that round-trips through `f64` parsing.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // fold -0.0 into 0 so equal runs give equal bytes
        "0".to_string()
    } else {
        format!("{x}")
    }
}

/// Writes `# newtonflow-v1`, a header line and the rows.
pub fn write_csv<W: Write>(
    mut out: W,
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    writeln!(out, "# {SCHEMA}")?;
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        writeln!(out, "{}", r.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    schema: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with a `"schema"` field added at the top level. `body` must
/// serialize to an object.
pub fn to_tagged_json<T: Serialize>(body: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&Tagged {
        schema: SCHEMA,
        body,
    })
}
