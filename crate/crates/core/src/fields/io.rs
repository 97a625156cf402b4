//! Flat binary field storage.
//!
//! A field is written as two files sharing a stem: `<stem>.bin` holds every
//! array back to back as little-endian `f64` in row-major order (`x` fastest,
//! then `y`, then time), and `<stem>.json` is a sidecar naming the arrays,
//! their offsets (in values) and lengths, the grid and, for space-time
//! fields, the sample times.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::{Grid, ScalarField, SpaceTimeField, VelocityField, Wall};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Velocity,
    Scalar,
    SpaceTime,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub kind: FieldKind,
    pub grid: Grid,
    pub arrays: Vec<ArraySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StoredField {
    Velocity(VelocityField),
    Scalar(ScalarField),
    SpaceTime(SpaceTimeField),
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("bin"), stem.with_extension("json"))
}

pub fn write_field(stem: &Path, field: &StoredField) -> Result<()> {
    let (grid, kind, arrays, times): (Grid, FieldKind, Vec<(&str, &[f64])>, Option<Vec<f64>>) = match field {
        StoredField::Velocity(u) => (
            *u.grid(),
            FieldKind::Velocity,
            vec![
                ("u1", u.u1()),
                ("u2", u.u2()),
                ("wall_bottom_u1", u.wall_tangential(Wall::Bottom)),
                ("wall_top_u1", u.wall_tangential(Wall::Top)),
            ],
            None,
        ),
        StoredField::Scalar(s) => (*s.grid(), FieldKind::Scalar, vec![("values", s.data())], None),
        StoredField::SpaceTime(f) => (
            *f.grid(),
            FieldKind::SpaceTime,
            vec![("values", f.data())],
            Some(f.times().to_vec()),
        ),
    };
    let mut bytes = Vec::new();
    let mut specs = Vec::new();
    let mut offset = 0;
    for (name, data) in arrays {
        specs.push(ArraySpec {
            name: name.to_string(),
            offset,
            len: data.len(),
        });
        offset += data.len();
        bytes.reserve(8 * data.len());
        for v in data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let meta = FieldMeta {
        kind,
        grid,
        arrays: specs,
        times,
    };
    let (bin, json) = paths(stem);
    if let Some(dir) = bin.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(&bin, bytes)?;
    fs::write(&json, serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn read_field(stem: &Path) -> Result<StoredField> {
    let (bin, json) = paths(stem);
    let meta: FieldMeta = serde_json::from_str(&fs::read_to_string(&json)?)?;
    let bytes = fs::read(&bin)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Shape(format!("{} is not a whole number of f64 values", bin.display())));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let array = |name: &str| -> Result<Vec<f64>> {
        let spec = meta
            .arrays
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| Error::Shape(format!("sidecar lacks array `{name}`")))?;
        values
            .get(spec.offset..spec.offset + spec.len)
            .map(|s| s.to_vec())
            .ok_or_else(|| Error::Shape(format!("array `{name}` runs past the end of the data")))
    };
    let grid = Grid::new(meta.grid.geometry, meta.grid.nx, meta.grid.ny)?;
    Ok(match meta.kind {
        FieldKind::Velocity => {
            let mut u = VelocityField::from_parts(grid, array("u1")?, array("u2")?)?;
            u.set_wall_tangential(Wall::Bottom, array("wall_bottom_u1")?)?;
            u.set_wall_tangential(Wall::Top, array("wall_top_u1")?)?;
            StoredField::Velocity(u)
        }
        FieldKind::Scalar => StoredField::Scalar(ScalarField::from_vec(grid, array("values")?)?),
        FieldKind::SpaceTime => {
            let times = meta
                .times
                .clone()
                .ok_or_else(|| Error::Shape("space-time sidecar lacks times".into()))?;
            StoredField::SpaceTime(SpaceTimeField::new(grid, times, array("values")?)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ChannelGeometry;

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(ChannelGeometry::new(2.0, 1.0).unwrap(), 6, 4).unwrap();
        let u = VelocityField::from_fn(g, |x, y| x * y + 0.1, |x, y| x - y);
        let s = ScalarField::from_fn(g, |x, y| x.sin() * y);
        let st = SpaceTimeField::from_fn(g, vec![0.0, 0.25, 1.0], |t, x, y| t + x * y).unwrap();
        for (name, f) in [
            ("u", StoredField::Velocity(u)),
            ("s", StoredField::Scalar(s)),
            ("st", StoredField::SpaceTime(st)),
        ] {
            let stem = dir.path().join("nested").join(name);
            write_field(&stem, &f).unwrap();
            assert_eq!(read_field(&stem).unwrap(), f);
        }
    }

    #[test]
    fn layout_is_little_endian_row_major() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::unit(4).unwrap();
        let s = ScalarField::from_vec(g, (0..16).map(|v| v as f64).collect()).unwrap();
        let stem = dir.path().join("s");
        write_field(&stem, &StoredField::Scalar(s)).unwrap();
        let bytes = fs::read(stem.with_extension("bin")).unwrap();
        assert_eq!(bytes.len(), 128);
        assert_eq!(&bytes[8..16], &1.0f64.to_le_bytes());
    }

    #[test]
    fn truncated_data_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("s");
        write_field(&stem, &StoredField::Scalar(ScalarField::zeros(Grid::unit(4).unwrap()))).unwrap();
        fs::write(stem.with_extension("bin"), [0u8; 64]).unwrap();
        assert!(matches!(read_field(&stem), Err(Error::Shape(_))));
    }
}
