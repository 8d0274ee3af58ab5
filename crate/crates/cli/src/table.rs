//! Minimal aligned text-table renderer for human-readable reports.

pub fn render(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<String>| {
        let mut s = String::new();
        for (i, cell) in cells.iter().enumerate().take(cols) {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(cell);
            for _ in cell.len()..widths[i] {
                s.push(' ');
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(headers.iter().map(|h| h.to_string()).collect());
    line(widths.iter().map(|w| "-".repeat(*w)).collect());
    for row in rows {
        line(row.clone());
    }
    out
}

/// Confusion matrix with rank headers; rows are true ranks, columns are
/// predictions.
pub fn render_confusion(confusion: &[Vec<usize>]) -> String {
    let p = confusion.len();
    let headers: Vec<String> = std::iter::once("true\\pred".to_string())
        .chain((1..=p).map(|k| k.to_string()))
        .collect();
    let header_refs: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
    let rows: Vec<Vec<String>> = confusion
        .iter()
        .enumerate()
        .map(|(i, row)| {
            std::iter::once((i + 1).to_string())
                .chain(row.iter().map(|c| c.to_string()))
                .collect()
        })
        .collect();
    render(&header_refs, &rows)
}
