//! Structured verification reports shared by the CLI commands.

use serde::Serialize;

/// Outcome of one verified identity.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub locus: String,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
    pub recognized_ratio: Option<String>,
    pub pass: bool,
    pub runtime_ms: u128,
    pub precision: u32,
}

impl VerificationReport {
    pub fn md_header() -> String {
        "| identity | locus | lhs | rhs | residual | ratio | pass |\n|---|---|---|---|---|---|---|".to_string()
    }

    pub fn to_md(&self) -> String {
        format!(
            "| {} | {} | {} | {} | {} | {} | {} |",
            self.identity,
            self.locus,
            self.lhs,
            self.rhs,
            self.residual,
            self.recognized_ratio.as_deref().unwrap_or("-"),
            if self.pass { "pass" } else { "FAIL" }
        )
    }

    pub fn csv_header() -> String {
        "identity,locus,lhs,rhs,residual,ratio,pass,runtime_ms,precision".to_string()
    }

    pub fn to_csv(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
        format!(
            "{},{},{},{},{},{},{},{},{}",
            quote(&self.identity),
            quote(&self.locus),
            quote(&self.lhs),
            quote(&self.rhs),
            quote(&self.residual),
            quote(self.recognized_ratio.as_deref().unwrap_or("")),
            self.pass,
            self.runtime_ms,
            self.precision
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Md,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "md" => Ok(OutputFormat::Md),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other}")),
        }
    }
}

/// Render a report batch; JSON output is a versioned envelope so the schema
/// can evolve without breaking consumers.
pub fn render(reports: &[VerificationReport], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Envelope<'a> {
                schema: &'static str,
                reports: &'a [VerificationReport],
            }
            serde_json::to_string_pretty(&Envelope {
                schema: "hgreg-report/1",
                reports,
            })
            .expect("reports serialize")
        }
        OutputFormat::Md => {
            let mut out = VerificationReport::md_header();
            for r in reports {
                out.push('\n');
                out.push_str(&r.to_md());
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = VerificationReport::csv_header();
            for r in reports {
                out.push('\n');
                out.push_str(&r.to_csv());
            }
            out
        }
    }
}
