//! Plot-ready CSV: header row, fixed column order, 12 significant digits.

use std::io::Write;

use hpd_core::karcher::GeodesicTriangle;
use hpd_core::matrix::HpdMatrix;
use hpd_core::trajectory::{hermitian_coordinate_labels, hermitian_coordinates, Trajectory};

use crate::error::CliError;
use crate::format::fmt_sig;

/// Columns `k, <coords>, <cost>, grad_norm[, dist_to_target]`. Runs without
/// chart coordinates use the Hermitian coordinates of the iterate.
pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> Result<(), CliError> {
    let has_coords = traj.steps().iter().all(|s| s.coords.is_some());
    let has_distance = traj.steps().iter().any(|s| s.distance.is_some());
    let coord_labels = if has_coords {
        traj.coord_labels().to_vec()
    } else {
        hermitian_coordinate_labels(traj.last().map_or(0, |s| s.point.dim()))
    };

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k".to_owned()];
    header.extend(coord_labels);
    header.push(traj.cost_label().to_owned());
    header.push("grad_norm".to_owned());
    if has_distance {
        header.push("dist_to_target".to_owned());
    }
    w.write_record(&header)?;

    for step in traj.steps() {
        let mut row = vec![step.k.to_string()];
        let coords = match &step.coords {
            Some(c) if has_coords => c.clone(),
            _ => hermitian_coordinates(step.point.as_hermitian()),
        };
        row.extend(coords.into_iter().map(fmt_sig));
        row.push(fmt_sig(step.cost));
        row.push(fmt_sig(step.grad_norm));
        if has_distance {
            row.push(step.distance.map(fmt_sig).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Cost curves of several runs side by side: `k, cost_<algorithm>, ...`.
/// A run that stopped earlier leaves its later cells empty.
pub fn write_comparison<W: Write>(out: W, runs: &[&Trajectory]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k".to_owned()];
    header.extend(
        runs.iter()
            .map(|t| format!("{}_{}", t.cost_label(), t.algorithm())),
    );
    w.write_record(&header)?;

    let rows = runs.iter().map(|t| t.iterations() + 1).max().unwrap_or(0);
    for k in 0..rows {
        let mut row = vec![k.to_string()];
        for t in runs {
            let cell = t.steps().iter().find(|s| s.k == k).map(|s| fmt_sig(s.cost));
            row.push(cell.unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Points along a curve: `t, <Hermitian coordinates>`.
pub fn write_samples<W: Write>(out: W, samples: &[(f64, HpdMatrix)]) -> Result<(), CliError> {
    let n = samples.first().map_or(0, |(_, m)| m.dim());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_owned()];
    header.extend(hermitian_coordinate_labels(n));
    w.write_record(&header)?;
    for (t, m) in samples {
        let mut row = vec![fmt_sig(*t)];
        row.extend(
            hermitian_coordinates(m.as_hermitian())
                .into_iter()
                .map(fmt_sig),
        );
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Evenly spaced parameters for `count` samples on `[0, 1]`.
pub fn sample_parameters(count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
    }
}

/// Sides and medians of a triangle: `curve, index, t, <coordinates>`, with
/// curves named `side_1..3` and `median_1..3` after the opposite vertex.
pub fn write_triangle<W: Write>(out: W, tri: &GeodesicTriangle) -> Result<(), CliError> {
    let n = tri.vertices[0].dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["curve".to_owned(), "index".to_owned(), "t".to_owned()];
    header.extend(hermitian_coordinate_labels(n));
    w.write_record(&header)?;

    let curves = tri
        .sides
        .iter()
        .enumerate()
        .map(|(i, c)| (format!("side_{}", i + 1), c))
        .chain(
            tri.medians
                .iter()
                .enumerate()
                .map(|(i, c)| (format!("median_{}", i + 1), c)),
        );
    for (name, points) in curves {
        for (index, (t, m)) in sample_parameters(points.len())
            .into_iter()
            .zip(points)
            .enumerate()
        {
            let mut row = vec![name.clone(), index.to_string(), fmt_sig(t)];
            row.extend(
                hermitian_coordinates(m.as_hermitian())
                    .into_iter()
                    .map(fmt_sig),
            );
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
