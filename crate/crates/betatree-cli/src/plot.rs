//! Plot-ready data emission: rectangles (optionally restricted to a slice
//! plane and filtered by a density floor) plus the observations inside the
//! slab around the plane. Rendering is left to external tools.

use serde::Serialize;

use betatree::PointMatrix;

use crate::document::HistogramDocument;
use crate::error::CliError;

#[derive(Debug, Clone, Copy)]
pub struct SliceSpec {
    /// 0-based coordinate of the slicing plane.
    pub axis: usize,
    pub value: f64,
    /// Observations within `value` +/- `slab` are emitted.
    pub slab: f64,
}

#[derive(Debug, Serialize)]
pub struct PlotData {
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_floor: Option<f64>,
    pub rects: Vec<PlotRect>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct SliceRecord {
    pub axis: usize,
    pub value: f64,
    pub slab: f64,
}

#[derive(Debug, Serialize)]
pub struct PlotRect {
    pub bounds: Vec<[f64; 2]>,
    pub density: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn emit_plot_data(
    doc: &HistogramDocument,
    slice: Option<SliceSpec>,
    density_floor: Option<f64>,
    data: Option<&PointMatrix>,
) -> Result<PlotData, CliError> {
    if let Some(s) = slice {
        if doc.d < 3 {
            return Err(CliError::InvalidAxis(format!(
                "slicing needs at least 3 dimensions, document has {}",
                doc.d
            )));
        }
        if s.axis >= doc.d {
            return Err(CliError::InvalidAxis(format!(
                "axis {} out of range for d={}",
                s.axis, doc.d
            )));
        }
        if s.slab < 0.0 {
            return Err(CliError::InvalidArgument("slab must be nonnegative".into()));
        }
    }

    let floor = density_floor.unwrap_or(f64::NEG_INFINITY);
    let rects: Vec<PlotRect> = doc
        .bins
        .iter()
        .filter(|b| b.density >= floor)
        .filter(|b| match slice {
            Some(s) => b.bounds[s.axis][0] <= s.value && s.value <= b.bounds[s.axis][1],
            None => true,
        })
        .map(|b| PlotRect {
            bounds: b.bounds.clone(),
            density: b.density,
            lower: b.lower,
            upper: b.upper,
        })
        .collect();

    let points: Vec<Vec<f64>> = match data {
        None => Vec::new(),
        Some(matrix) => {
            if matrix.dim() != doc.d {
                return Err(CliError::InvalidArgument(format!(
                    "data has {} coordinates but the document has {}",
                    matrix.dim(),
                    doc.d
                )));
            }
            matrix
                .rows()
                .filter(|row| match slice {
                    Some(s) => (row[s.axis] - s.value).abs() <= s.slab,
                    None => true,
                })
                .map(|row| row.to_vec())
                .collect()
        }
    };

    Ok(PlotData {
        d: doc.d,
        slice: slice.map(|s| SliceRecord { axis: s.axis, value: s.value, slab: s.slab }),
        density_floor,
        rects,
        points,
    })
}
