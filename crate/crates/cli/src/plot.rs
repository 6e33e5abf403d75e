//! Gnuplot scripts written next to the data they plot.
//!
//! Each script is run from inside the output directory (`gnuplot plot_x.gp`)
//! and writes a PNG of the same stem.

use std::fmt::Write;

const HEADER: &str = "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n";

fn header(out: &str) -> String {
    format!("{HEADER}set output '{out}.png'\n")
}

pub fn profile(labels: &[String]) -> String {
    let mut s = header("profile");
    s.push_str("set multiplot layout 2,1\nset logscale x\nset xlabel 'r (um)'\nset ylabel 'U/2pi (kHz)'\n");
    let curves: Vec<String> = labels.iter().map(|l| format!("'profile_{l}.csv' using 1:3 with lines title '{l}'")).collect();
    let _ = writeln!(s, "plot {}", curves.join(", "));
    s.push_str("set ylabel 'Gamma (1/s)'\n");
    let curves: Vec<String> = labels.iter().map(|l| format!("'profile_{l}.csv' using 1:5 with lines title '{l}'")).collect();
    let _ = writeln!(s, "plot {}", curves.join(", "));
    s.push_str("unset multiplot\n");
    s
}

pub fn sweep(labels: &[String], axis: &str, log: bool) -> String {
    let mut s = header("sweep");
    if log {
        s.push_str("set logscale x\n");
    }
    let _ = writeln!(s, "set xlabel '{axis}'\nset multiplot layout 2,1");
    s.push_str("set ylabel 'U_c/2pi (kHz)'\n");
    let curves: Vec<String> = labels.iter().map(|l| format!("'sweep_{l}.csv' using 1:4 with linespoints title '{l}'")).collect();
    let _ = writeln!(s, "plot {}", curves.join(", "));
    s.push_str("set ylabel 'radius (um)'\n");
    let curves: Vec<String> = labels
        .iter()
        .flat_map(|l| {
            [
                format!("'sweep_{l}.csv' using 1:5 with linespoints title '{l} r_c'"),
                format!("'sweep_{l}.csv' using 1:7 with linespoints title '{l} r_ip'"),
            ]
        })
        .collect();
    let _ = writeln!(s, "plot {}", curves.join(", "));
    s.push_str("unset multiplot\n");
    s
}

/// Binary snapshot arrays are plotted as a space-time map in 1D and as the
/// last frame in 2D.
pub fn evolve(points: &[usize], snapshots: usize) -> String {
    let mut s = header("evolve");
    s.push_str("set multiplot layout 2,1\nset xlabel 't (us)'\nset ylabel 'E'\n");
    s.push_str("plot 'observables.csv' using 2:8 with lines title 'total'\n");
    let left = if points.len() == 2 { 11 } else { 10 };
    let _ = writeln!(
        s,
        "set ylabel 'norm'\nplot 'observables.csv' using 2:{left} with lines title 'left', '' using 2:{} with lines title 'right'",
        left + 1
    );
    s.push_str("unset multiplot\n");
    if snapshots > 0 {
        s.push_str("set output 'evolve_density.png'\nunset key\n");
        let nx = points[0];
        if points.len() == 1 {
            let _ = writeln!(
                s,
                "set xlabel 'x index'\nset ylabel 'snapshot'\nplot 'density.bin' binary format='%float64' array=({nx},{snapshots}) endian=little with image"
            );
        } else {
            let ny = points[1];
            let skip = (snapshots - 1) * nx * ny * 8;
            let _ = writeln!(
                s,
                "set size ratio -1\nplot 'density.bin' binary format='%float64' skip={skip} array=({nx},{ny}) endian=little with image"
            );
        }
    }
    s
}

pub fn ground(points: &[usize]) -> String {
    let mut s = header("ground");
    s.push_str("set multiplot layout 1,2\nset xlabel 'k (1/um)'\nset ylabel 'S(k)'\n");
    s.push_str("plot 'structure_factor.csv' using 1:2 with lines\n");
    s.push_str("set xlabel 'renormalization'\nset ylabel 'E'\nplot 'energies.csv' using 1:2 with lines\nunset multiplot\n");
    s.push_str("set output 'ground_density.png'\nunset key\n");
    let nx = points[0];
    match points.get(1) {
        None => {
            let _ = writeln!(s, "plot 'density.bin' binary format='%float64' array={nx} endian=little with lines");
        }
        Some(ny) => {
            let _ = writeln!(s, "set size ratio -1\nplot 'density.bin' binary format='%float64' array=({nx},{ny}) endian=little with image");
        }
    }
    s
}

pub const SPECTRUM: &str = "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n\
set output 'spectrum.png'\nset xlabel 'k (1/um)'\nset ylabel 'omega'\n\
plot 'spectrum.csv' using 1:4 with lines title 'Re', '' using 1:5 with lines title 'Im'\n";

pub fn stability(labels: &[String]) -> String {
    let mut s = header("stability");
    s.push_str("set multiplot layout 1,2\nset xlabel 'sigma (um)'\nset ylabel 'E (rad/us)'\nset logscale x\n");
    let curves: Vec<String> = labels.iter().map(|l| format!("'single_{l}.csv' using 1:6 with lines title '{l}'")).collect();
    let _ = writeln!(s, "plot {}", curves.join(", "));
    s.push_str("unset logscale x\nset xlabel 'D (um)'\nset ylabel 'E - E(inf) (rad/us)'\n");
    let curves: Vec<String> = labels
        .iter()
        .map(|l| format!("'molecule_{l}.csv' using 1:7:5 with yerrorlines title '{l}'"))
        .collect();
    let _ = writeln!(s, "plot {}", curves.join(", "));
    s.push_str("unset multiplot\n");
    s
}
