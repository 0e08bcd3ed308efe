//! Set-quality indicators over objective vectors (minimisation).

use crate::error::{Error, Result};

/// Default hypervolume reference coordinate in normalised space.
pub const DEFAULT_REFERENCE: f64 = 1.1;
/// Per-coordinate tolerance for "equal" points in coverage and GD checks.
pub const POINT_TOLERANCE: f64 = 1e-12;

/// Per-objective min/max used to map objectives onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationFrame {
    pub fmin: Vec<f64>,
    pub fmax: Vec<f64>,
}

impl NormalizationFrame {
    pub fn new(fmin: Vec<f64>, fmax: Vec<f64>) -> Result<Self> {
        if fmin.len() != fmax.len() {
            return Err(Error::Shape("frame bounds differ in length".into()));
        }
        if fmin.iter().zip(&fmax).any(|(a, b)| !(a <= b)) {
            return Err(Error::Argument("frame requires fmin <= fmax".into()));
        }
        Ok(Self { fmin, fmax })
    }

    /// Tight frame around `points`. Returns `None` for an empty set.
    pub fn from_points<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut fmin = first.to_vec();
        let mut fmax = first.to_vec();
        for p in it {
            for (i, &v) in p.iter().enumerate() {
                fmin[i] = fmin[i].min(v);
                fmax[i] = fmax[i].max(v);
            }
        }
        Some(Self { fmin, fmax })
    }

    pub fn dim(&self) -> usize {
        self.fmin.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .enumerate()
            .map(|(i, &x)| {
                let span = self.fmax[i] - self.fmin[i];
                if span > 0.0 {
                    (x - self.fmin[i]) / span
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Coordinatewise `(v - fmin) / (fmax - fmin)`, with degenerate coordinates mapped to 0.
pub fn normalize(points: &[Vec<f64>], frame: &NormalizationFrame) -> Vec<Vec<f64>> {
    points.iter().map(|p| frame.apply(p)).collect()
}

/// Exact hypervolume of the region dominated by `front` and bounded by `reference`.
///
/// Points that do not strictly dominate the reference point contribute nothing.
pub fn hypervolume(front: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    let m = reference.len();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    if let Some(p) = front.iter().find(|p| p.len() != m) {
        return Err(Error::Shape(format!("point of length {} vs reference of length {m}", p.len())));
    }
    let pts: Vec<&[f64]> = front
        .iter()
        .map(Vec::as_slice)
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .collect();
    if pts.is_empty() {
        return Ok(0.0);
    }
    Ok(match m {
        2 => {
            let mut pts: Vec<(f64, f64)> = pts.iter().map(|p| (p[0], p[1])).collect();
            area_2d(&mut pts, reference[0], reference[1])
        }
        _ => volume_3d(pts, reference),
    })
}

/// Sweep over x; `pts` is sorted in place.
fn area_2d(pts: &mut [(f64, f64)], rx: f64, ry: f64) -> f64 {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    let mut floor = ry;
    for &(x, y) in pts.iter() {
        if y < floor {
            area += (rx - x) * (floor - y);
            floor = y;
        }
    }
    area
}

/// Slices along z; each slab's cross-section is the 2-D area of the points below it.
fn volume_3d(mut pts: Vec<&[f64]>, r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut volume = 0.0;
    let mut slice: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        slice.push((p[0], p[1]));
        let top = pts.get(i + 1).map_or(r[2], |q| q[2]);
        let height = top - p[2];
        if height > 0.0 {
            volume += area_2d(&mut slice, r[0], r[1]) * height;
        }
    }
    volume
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Generational distance `sqrt(sum_a min_b |a - b|^2) / |A|`.
pub fn generational_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Undefined("generational distance of an empty set"));
    }
    let total: f64 = a
        .iter()
        .map(|p| b.iter().map(|q| squared_distance(p, q)).fold(f64::INFINITY, f64::min))
        .sum();
    Ok(total.sqrt() / a.len() as f64)
}

/// `a` weakly dominates `b`: no coordinate worse beyond [`POINT_TOLERANCE`].
pub fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= *y + POINT_TOLERANCE)
}

/// Fraction of `b` weakly dominated by at least one point of `a`.
pub fn coverage(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if b.is_empty() {
        return Err(Error::Undefined("coverage of an empty set"));
    }
    let covered = b
        .iter()
        .filter(|q| a.iter().any(|p| weakly_dominates(p, q)))
        .count();
    Ok(covered as f64 / b.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let frame = NormalizationFrame::new(vec![0.0, 2.0, -1.0], vec![2.0, 2.0, 1.0]).unwrap();
        let out = normalize(&[vec![0.0, 2.0, -1.0], vec![2.0, 2.0, 1.0], vec![1.0, 2.0, 0.0]], &frame);
        assert_eq!(out[0], vec![0.0, 0.0, 0.0]);
        assert_eq!(out[1], vec![1.0, 0.0, 1.0]);
        assert_eq!(out[2], vec![0.5, 0.0, 0.5]);
        assert!(NormalizationFrame::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn hypervolume_examples() {
        let r = [1.1, 1.1];
        assert!((hypervolume(&[vec![0.0, 0.0]], &r).unwrap() - 1.21).abs() < 1e-12);
        // 0.66 + 0.66 - 0.36 by inclusion-exclusion
        let hv = hypervolume(&[vec![0.0, 0.5], vec![0.5, 0.0]], &r).unwrap();
        assert!((hv - 0.96).abs() < 1e-12, "{hv}");
        assert_eq!(hypervolume(&[], &r).unwrap(), 0.0);
    }

    #[test]
    fn hypervolume_ignores_points_beyond_reference() {
        let r = [1.0, 1.0];
        assert_eq!(hypervolume(&[vec![1.0, 0.0], vec![2.0, -1.0]], &r).unwrap(), 0.0);
        let hv = hypervolume(&[vec![0.5, 0.5], vec![1.5, 0.0]], &r).unwrap();
        assert!((hv - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hypervolume_3d_boxes() {
        let r = [1.0, 1.0, 1.0];
        assert!((hypervolume(&[vec![0.0, 0.0, 0.0]], &r).unwrap() - 1.0).abs() < 1e-15);
        // two unit-ish boxes: 0.5*1*1 + 1*0.5*1 - 0.5*0.5*1
        let hv = hypervolume(&[vec![0.5, 0.0, 0.0], vec![0.0, 0.5, 0.0]], &r).unwrap();
        assert!((hv - 0.75).abs() < 1e-15);
        let hv = hypervolume(&[vec![0.0, 0.0, 0.5], vec![0.5, 0.5, 0.0]], &r).unwrap();
        assert!((hv - (0.5 + 0.25 - 0.125)).abs() < 1e-15);
    }

    #[test]
    fn hypervolume_rejects_many_objectives() {
        assert!(matches!(
            hypervolume(&[vec![0.0; 4]], &[1.1; 4]),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn gd_examples() {
        let a = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert_eq!(generational_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(generational_distance(&[vec![0.0, 0.0]], &[vec![3.0, 4.0]]).unwrap(), 5.0);
        assert_eq!(generational_distance(&a, &[vec![0.0, 0.0]]).unwrap(), 0.5);
        assert!(matches!(generational_distance(&[], &a), Err(Error::Undefined(_))));
    }

    #[test]
    fn coverage_examples() {
        let a = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(coverage(&a, &a).unwrap(), 1.0);
        assert_eq!(coverage(&[vec![0.0, 0.0]], &[vec![1.0, 1.0], vec![2.0, 0.0]]).unwrap(), 1.0);
        assert_eq!(coverage(&[vec![2.0, 2.0]], &[vec![0.0, 0.0]]).unwrap(), 0.0);
        assert!(coverage(&a, &[]).is_err());
    }
}
