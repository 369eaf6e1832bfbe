//! Companion gnuplot scripts for the data files of a run.

use crate::config::Experiment;
use crate::output::FileEntry;

const PREAMBLE: &str = "set datafile separator ','\nset key autotitle columnhead\nset grid\n";

fn has(files: &[FileEntry], path: &str) -> bool {
    files.iter().any(|f| f.path == path)
}

/// Script plotting the main outputs of `exp`, or `None` when there is nothing to draw.
pub fn script(exp: &Experiment, files: &[FileEntry]) -> Option<String> {
    let body = match exp {
        Experiment::IsolatedMd(_) | Experiment::ControlledMd(_) if has(files, "trajectory.csv") => {
            let mut s = String::from("set xlabel 'time t'\n");
            if has(files, "energy.csv") {
                s += "set ylabel 'energy'\nplot 'energy.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\npause -1\n";
            }
            s += "set ylabel 'temperature'\nplot 'trajectory.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\npause -1\n";
            s += "set ylabel 'Tr - Tl'\nplot 'trajectory.csv' using 1:($4-$2) with lines title 'Tr - Tl'\npause -1\n";
            s
        }
        Experiment::ControlledPatchPde(_) => "set xlabel 'x'\nplot 'final_field.csv' using 1:2 with lines, 'equilibrium.csv' using 1:2 with points pt 7 ps 0.3\npause -1\nset xlabel 't'\nplot 'core.csv' using 1:2 with lines\npause -1\n".to_string(),
        Experiment::MultipatchPde(p) => {
            let cols: Vec<String> = (0..p.patches)
                .map(|j| format!("'amplitudes.csv' using 1:{} with lines, 'macro_amplitudes.csv' using 1:{} with lines dt 2", j + 2, j + 2))
                .collect();
            format!("set xlabel 't'\nplot {}\npause -1\n", cols.join(", "))
        }
        Experiment::Modes(_) => "set xlabel 'root index'\nset ylabel 'kh'\nplot 'modes.csv' using 0:4 with points pt 7\npause -1\n".to_string(),
        Experiment::SlowManifold(_) if has(files, "fields.csv") => {
            "set xlabel 'xi'\nplot 'fields.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\npause -1\n".to_string()
        }
        Experiment::EstimateK(_) if has(files, "gap_acf.csv") => {
            "set xlabel 'lag'\nset logscale y\nplot 'gap_acf.csv' using 1:2 with lines\npause -1\n".to_string()
        }
        Experiment::HeatReference(_) => "set xlabel 'x'\nplot for [f in system('ls fields/*.csv')] f using 1:2 with lines notitle\npause -1\n".to_string(),
        _ => return None,
    };
    Some(format!("{PREAMBLE}{body}"))
}
