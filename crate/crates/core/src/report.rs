//! Report assembly and rendering.
//!
//! Reports are built from typed entries and rendered to either a text or a
//! fixed-column CSV layout. All floating-point values go through one
//! formatter, so identical inputs render byte-identically; no timestamps or
//! environment data ever enter a report.

/// One reported quantity with its bounds and provenance.
#[derive(Debug, Clone)]
pub struct ReportEntry {
    /// What was computed, e.g. `domination-constant`.
    pub quantity: String,
    pub value: f64,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub gap: Option<f64>,
    pub seed: Option<u64>,
    /// Which characterization produced the number, e.g.
    /// `two-measure-domination`.
    pub anchor: String,
}

impl ReportEntry {
    pub fn new(quantity: impl Into<String>, value: f64, anchor: impl Into<String>) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            lower_bound: None,
            upper_bound: None,
            gap: None,
            seed: None,
            anchor: anchor.into(),
        }
    }

    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Self {
        self.lower_bound = Some(lower);
        self.upper_bound = Some(upper);
        self.gap = Some((upper - lower).max(0.0));
        self
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = Some(gap);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// A full report: entries plus free-form certificate notes (measures,
/// witness families, splitting sequences).
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
    pub notes: Vec<String>,
}

/// Fixed CSV header.
pub const CSV_HEADER: &str = "quantity,value,lower_bound,upper_bound,gap,seed,anchor";

/// One deterministic float rendering used everywhere.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.12e}")
}

/// Renders a weight vector for certificate notes.
pub fn fmt_vector(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|&v| fmt_value(v)).collect();
    format!("[{}]", parts.join(", "))
}

impl Report {
    pub fn push(&mut self, entry: ReportEntry) {
        self.entries.push(entry);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{} = {}", e.quantity, fmt_value(e.value)));
            if let (Some(lo), Some(hi)) = (e.lower_bound, e.upper_bound) {
                out.push_str(&format!("  [{} , {}]", fmt_value(lo), fmt_value(hi)));
            }
            if let Some(gap) = e.gap {
                out.push_str(&format!("  gap {}", fmt_value(gap)));
            }
            if let Some(seed) = e.seed {
                out.push_str(&format!("  seed {seed}"));
            }
            out.push_str(&format!("  ({})", e.anchor));
            out.push('\n');
        }
        for note in &self.notes {
            out.push_str(note);
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for e in &self.entries {
            let opt = |v: Option<f64>| v.map(fmt_value).unwrap_or_default();
            let seed = e.seed.map(|s| s.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.quantity,
                fmt_value(e.value),
                opt(e.lower_bound),
                opt(e.upper_bound),
                opt(e.gap),
                seed,
                e.anchor
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_is_fixed() {
        let mut report = Report::default();
        report.push(
            ReportEntry::new("domination-constant", 0.5, "domination-lp")
                .with_bounds(0.49, 0.5)
                .with_seed(7),
        );
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert!(row.starts_with("domination-constant,5.000000000000e-1,"));
        assert!(row.ends_with(",7,domination-lp"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let build = || {
            let mut r = Report::default();
            r.push(ReportEntry::new("x", 1.0 / 3.0, "a").with_gap(1e-12));
            r.note(format!("measure {}", fmt_vector(&[0.25, 0.75])));
            r
        };
        assert_eq!(build().to_text(), build().to_text());
        assert_eq!(build().to_csv(), build().to_csv());
    }
}
