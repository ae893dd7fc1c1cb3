//! File formats: unitaries, click records and result reports.

mod clicks;
mod report;
mod unitary_file;

pub use clicks::{
    format_record, ingest_clicks, parse_clicks, parse_record, render_clicks, write_clicks, ClickBatch, ClickData,
    ClickHeader, CLICK_FORMAT, UNITARY_DIR,
};
pub use report::{export_results, import_report, to_canonical_json, Provenance, Report, ReportBody, REPORT_SCHEMA};
pub use unitary_file::{read_unitary, unitary_hash, write_unitary, UnitaryFile};
