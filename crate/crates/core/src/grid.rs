//! Sampled densities and their CSV form.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// Which set the samples of a [`DensityGrid`] live on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Slice {
    /// The segment τ = `tau`, ξ = `xi_scale`·t with t ∈ [−1, 1].
    Segment { tau: f64, xi_scale: f64 },
    /// Points (u, v) of a rectangle.
    Rectangle { u: (f64, f64), v: (f64, f64) },
    /// The row v = `v` of a rectangle, sampled in u.
    Row { v: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub coords: Vec<f64>,
    pub value: f64,
}

/// Samples of the density of a k-fold convolution measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub fold_count: u8,
    pub slice: Slice,
    pub coordinate_names: Vec<String>,
    pub samples: Vec<Sample>,
}

impl DensityGrid {
    pub fn new(fold_count: u8, slice: Slice, coordinate_names: &[&str]) -> Self {
        Self {
            fold_count,
            slice,
            coordinate_names: coordinate_names.iter().map(|s| s.to_string()).collect(),
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, coords: Vec<f64>, value: f64) {
        debug_assert_eq!(coords.len(), self.coordinate_names.len());
        self.samples.push(Sample { coords, value });
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.value)
    }

    /// Header row plus one line per sample, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = self.coordinate_names.join(",");
        header.push_str(",value");
        writeln!(out, "{header}")?;
        for s in &self.samples {
            let mut line = String::new();
            for c in &s.coords {
                line.push_str(&format_f64(*c));
                line.push(',');
            }
            line.push_str(&format_f64(s.value));
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Scientific notation with 17 significant digits, which round-trips any f64.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}
