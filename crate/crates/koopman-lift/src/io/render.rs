//! Human-readable text for the symbolic matrices and the observable list.

use crate::model::KoopmanModel;
use crate::poly::Monomial;

/// Align a grid of cells into columns padded to their widest entry.
fn align(cells: &[Vec<String>]) -> String {
    let n_cols = cells.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..n_cols)
        .map(|c| {
            cells
                .iter()
                .map(|row| row[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in cells {
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                out.push_str("  ");
            }
            out.push_str(cell);
            if c + 1 < n_cols {
                for _ in cell.chars().count()..widths[c] {
                    out.push(' ');
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Entries of the symbolic system matrix as strings, zeros as "0".
pub fn a_cells(model: &KoopmanModel) -> Vec<Vec<String>> {
    let names = model.spec().names();
    let n = model.dim();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| match model.a_entry(r, c) {
                    Some(form) => form.render(names),
                    None => "0".to_string(),
                })
                .collect()
        })
        .collect()
}

/// One Jacobian entry, e.g. "10x1^9", "x2*x3", "2", or "0".
pub fn jacobian_cell(entry: Option<(u32, &Monomial)>) -> String {
    match entry {
        None => "0".to_string(),
        Some((scale, mono)) => {
            if mono.is_constant() {
                scale.to_string()
            } else if scale == 1 {
                mono.to_string()
            } else {
                format!("{scale}{mono}")
            }
        }
    }
}

pub fn jacobian_cells(model: &KoopmanModel) -> Vec<Vec<String>> {
    (0..model.dim())
        .map(|r| {
            let row = model.jacobian_row(r);
            (0..model.n_x())
                .map(|i| {
                    jacobian_cell(
                        row.iter()
                            .find(|(state, _, _)| *state == i)
                            .map(|(_, scale, mono)| (*scale, mono)),
                    )
                })
                .collect()
        })
        .collect()
}

/// The full symbolic report: observables, A, C, the observable Jacobian,
/// and B when the system has an input map.
pub fn render_symbolic(model: &KoopmanModel) -> String {
    let mut out = String::new();
    let n = model.dim();

    out.push_str(&format!("observables ({n}):\n"));
    for (idx, obs) in model.lifting().observables().iter().enumerate() {
        out.push_str(&format!("  z{} = {obs}\n", idx + 1));
    }

    out.push_str(&format!("\nA ({n}x{n}):\n"));
    out.push_str(&align(&a_cells(model)));

    out.push_str(&format!("\nC ({}x{n}): [I 0]\n", model.n_x()));

    out.push_str(&format!("\ndPhi/dx ({n}x{}):\n", model.n_x()));
    out.push_str(&align(&jacobian_cells(model)));

    if let Some(b) = model.b_sym() {
        out.push_str(&format!("\nB ({n}x{}):\n", model.n_u()));
        let cells: Vec<Vec<String>> = b
            .iter()
            .map(|row| row.iter().map(|e| e.to_string()).collect())
            .collect();
        out.push_str(&align(&cells));
    }
    out
}

/// The lifting and its per-state decomposition, for the `lift` command.
pub fn render_lifting(model: &KoopmanModel) -> String {
    let lifting = model.lifting();
    let mut out = String::new();
    out.push_str(&format!(
        "{} observables over {} states\n",
        lifting.len(),
        lifting.n_x()
    ));
    for (idx, obs) in lifting.observables().iter().enumerate() {
        out.push_str(&format!("  z{} = {obs}\n", idx + 1));
    }
    out.push('\n');
    for (state, set) in lifting.decompose_per_state().iter().enumerate() {
        let list: Vec<String> = set.iter().map(Monomial::to_string).collect();
        out.push_str(&format!("W{}: {}\n", state + 1, list.join(", ")));
    }
    out
}
