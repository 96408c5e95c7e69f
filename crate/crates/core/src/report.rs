//! Small formatting helpers shared by the table emitters.

/// Render a real with 12 significant digits.
pub fn real12(x: f64) -> String {
    format!("{x:.11e}")
}

/// RFC-4180-style field quoting; only applied when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

/// Assemble a full CSV document from a header and records.
pub fn csv_table(header: &[&str], records: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&csv_line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
    out.push('\n');
    for rec in records {
        out.push_str(&csv_line(rec));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(real12(1.0), "1.00000000000e0");
        assert_eq!(real12(1.3203236), "1.32032360000e0");
    }

    #[test]
    fn quoting_only_when_needed() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("{0,2,6}"), "\"{0,2,6}\"");
        assert_eq!(csv_line(&["a".into(), "{0,2}".into()]), "a,\"{0,2}\"");
    }
}
