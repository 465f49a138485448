//! Plain-text exports: the mass spectrum, kernel tables and field slabs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hierarchy::KernelGrid;
use crate::lattice::{Field, Lattice1p1};
use crate::scalar::{coefficient_a, mass_spectrum};

/// CSV with columns `n,omega_n,A_n` for `n = 0..=n_max`.
pub fn spectrum_csv(n_max: usize, mass: f64) -> Result<String> {
    let mut s = String::from("n,omega_n,A_n\n");
    for n in 0..=n_max {
        writeln!(s, "{n},{:.14e},{:.14e}", mass_spectrum(n, mass)?, coefficient_a(n)).expect("string write");
    }
    Ok(s)
}

pub fn emit_spectrum(n_max: usize, mass: f64, path: &Path) -> Result<()> {
    std::fs::write(path, spectrum_csv(n_max, mass)?)?;
    Ok(())
}

/// Reads back a spectrum CSV as `(n, ω_n, A_n)` rows.
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<(usize, f64, f64)>> {
    let mut lines = text.lines();
    if lines.next() != Some("n,omega_n,A_n") {
        return Err(Error::Shape("missing spectrum header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let bad = || Error::Shape(format!("bad spectrum row {l:?}"));
            if f.len() != 3 {
                return Err(bad());
            }
            Ok((
                f[0].parse().map_err(|_| bad())?,
                f[1].parse().map_err(|_| bad())?,
                f[2].parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

/// Sparse `i1,i2,value` triplets of a kernel, skipping zeros.
pub fn kernel_triplets_csv(grid: &KernelGrid) -> String {
    let mut s = String::from("i1,i2,value\n");
    for ((a, b), v) in grid.values().indexed_iter() {
        if *v != 0.0 {
            writeln!(s, "{a},{b},{v:.14e}").expect("string write");
        }
    }
    s
}

/// `t,x,value` rows of a field.
pub fn field_slab_csv(field: &Field, lat: &Lattice1p1) -> Result<String> {
    lat.check_field(field)?;
    let mut s = String::from("t,x,value\n");
    for ((n, i), v) in field.indexed_iter() {
        writeln!(s, "{:.14e},{:.14e},{v:.14e}", lat.t(n), lat.x(i)).expect("string write");
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_round_trip() {
        let text = spectrum_csv(5, 1.3).unwrap();
        let rows = parse_spectrum_csv(&text).unwrap();
        assert_eq!(rows.len(), 6);
        for (n, w, a) in rows {
            assert!((w / mass_spectrum(n, 1.3).unwrap() - 1.0).abs() < 1e-14);
            assert!((a / coefficient_a(n) - 1.0).abs() < 1e-14);
        }
        assert!(parse_spectrum_csv("x\n").is_err());
    }
}
