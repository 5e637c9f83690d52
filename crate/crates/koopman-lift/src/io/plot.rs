//! Self-contained gnuplot script pointing at exported trajectory CSVs.

/// A script plotting every coordinate of each CSV against time.
/// `files` pairs a CSV basename with its per-coordinate column names
/// (excluding `t`).
pub fn plot_script(title: &str, files: &[(&str, Vec<String>)]) -> String {
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str("set key autotitle columnhead outside\n");
    out.push_str("set xlabel 't'\n");
    out.push_str(&format!("set title '{title}'\n"));
    out.push_str("set grid\n");
    let mut pieces = Vec::new();
    for (file, names) in files {
        for (idx, name) in names.iter().enumerate() {
            pieces.push(format!(
                "'{file}' using 1:{} with lines title '{name}'",
                idx + 2
            ));
        }
    }
    out.push_str("plot ");
    out.push_str(&pieces.join(", \\\n     "));
    out.push('\n');
    out.push_str("pause -1 'press enter to close'\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_references_all_files_and_columns() {
        let script = plot_script(
            "overlap",
            &[
                ("nonlinear.csv", vec!["x1".into(), "x2".into()]),
                ("lifted.csv", vec!["z1".into()]),
            ],
        );
        assert!(script.contains("set title 'overlap'"));
        assert!(script.contains("'nonlinear.csv' using 1:2 with lines title 'x1'"));
        assert!(script.contains("'nonlinear.csv' using 1:3 with lines title 'x2'"));
        assert!(script.contains("'lifted.csv' using 1:2 with lines title 'z1'"));
    }
}
