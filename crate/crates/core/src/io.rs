//! CSV formats: point clouds (`kind,x,y,h,gen,parent1,parent2`), slices
//! (`s,h`) and sampled functions (`x1[,x2,...],value`). Numbers are written
//! with 17 significant digits so files round-trip exactly.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::fmt::fmt_num;
use crate::geom_h2::HPoint;
use crate::hull::{PointCloud, PointMeta};
use crate::separator::SampledFunction;
use crate::spaces::GeodesicSpace;
use crate::vertical_ext::EPoint;

pub const CLOUD_HEADER: &str = "kind,x,y,h,gen,parent1,parent2";
pub const SLICE_HEADER: &str = "s,h";

/// A point type with a flat coordinate representation.
pub trait CsvPoint: Sized + Copy {
    /// Value of the `kind` column.
    const KIND: &'static str;
    /// Number of coordinates.
    const DIM: usize;
    /// Whether the last coordinate is a vertical-extension height.
    const HEIGHT: bool;

    fn coords(&self) -> Vec<f64>;

    fn from_coords(c: &[f64]) -> Result<Self>;

    /// `x, y, h` columns. Extension heights go to `h`; a third plain
    /// coordinate (as in `e3`) also goes to `h`.
    fn cloud_fields(&self) -> [Option<f64>; 3] {
        let c = self.coords();
        let mut out = [None; 3];
        let base = if Self::HEIGHT { Self::DIM - 1 } else { Self::DIM };
        for (slot, v) in out.iter_mut().zip(&c[..base]) {
            *slot = Some(*v);
        }
        if Self::HEIGHT {
            out[2] = Some(c[Self::DIM - 1]);
        }
        out
    }

    fn from_cloud_fields(fields: [Option<f64>; 3]) -> Result<Self> {
        let base = if Self::HEIGHT { Self::DIM - 1 } else { Self::DIM };
        let mut c = Vec::with_capacity(Self::DIM);
        for (k, f) in fields.iter().enumerate().take(base) {
            c.push(f.ok_or_else(|| Error::Parse(format!("missing coordinate {} for kind {}", k + 1, Self::KIND)))?);
        }
        if Self::HEIGHT {
            c.push(fields[2].ok_or_else(|| Error::Parse(format!("missing height for kind {}", Self::KIND)))?);
        }
        Self::from_coords(&c)
    }
}

fn expect_len(c: &[f64], n: usize, kind: &str) -> Result<()> {
    if c.len() != n {
        return Err(Error::Parse(format!("kind {kind} needs {n} coordinates, got {}", c.len())));
    }
    Ok(())
}

impl CsvPoint for HPoint {
    const KIND: &'static str = "h2";
    const DIM: usize = 2;
    const HEIGHT: bool = false;

    fn coords(&self) -> Vec<f64> {
        vec![self.x, self.y]
    }

    fn from_coords(c: &[f64]) -> Result<Self> {
        expect_len(c, 2, Self::KIND)?;
        HPoint::new(c[0], c[1])
    }
}

macro_rules! euclidean_csv {
    ($n:literal, $kind:literal) => {
        impl CsvPoint for [f64; $n] {
            const KIND: &'static str = $kind;
            const DIM: usize = $n;
            const HEIGHT: bool = false;

            fn coords(&self) -> Vec<f64> {
                self.to_vec()
            }

            fn from_coords(c: &[f64]) -> Result<Self> {
                expect_len(c, $n, Self::KIND)?;
                let mut p = [0.0; $n];
                p.copy_from_slice(c);
                if p.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Parse(format!("non-finite coordinate in {c:?}")));
                }
                Ok(p)
            }
        }
    };
}

euclidean_csv!(1, "e1");
euclidean_csv!(2, "e2");
euclidean_csv!(3, "e3");

macro_rules! extension_csv {
    ($base:ty, $kind:literal) => {
        impl CsvPoint for EPoint<$base> {
            const KIND: &'static str = $kind;
            const DIM: usize = <$base as CsvPoint>::DIM + 1;
            const HEIGHT: bool = true;

            fn coords(&self) -> Vec<f64> {
                let mut c = self.base.coords();
                c.push(self.height);
                c
            }

            fn from_coords(c: &[f64]) -> Result<Self> {
                expect_len(c, Self::DIM, Self::KIND)?;
                let (base, h) = c.split_at(Self::DIM - 1);
                if !h[0].is_finite() {
                    return Err(Error::Parse(format!("non-finite height {}", h[0])));
                }
                Ok(EPoint::new(<$base as CsvPoint>::from_coords(base)?, h[0]))
            }
        }
    };
}

extension_csv!(HPoint, "h2xr");
extension_csv!([f64; 1], "e1xr");
extension_csv!([f64; 2], "e2xr");

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("line {line}: cannot parse number {:?}", s.trim())))
}

fn opt_field(s: &str, line: usize) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(s, line).map(Some)
    }
}

/// Parses inline point lists: `;` between points, `,` between coordinates.
pub fn parse_inline<P: CsvPoint>(text: &str) -> Result<Vec<P>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(k, item)| {
            let c = item.split(',').map(|v| parse_f64(v, k + 1)).collect::<Result<Vec<_>>>()?;
            P::from_coords(&c).map_err(|e| Error::Parse(format!("point {}: {e}", k + 1)))
        })
        .collect()
}

fn join(fields: impl IntoIterator<Item = String>) -> String {
    fields.into_iter().collect::<Vec<_>>().join(",")
}

pub fn write_cloud<P: CsvPoint, W: Write + ?Sized>(out: &mut W, cloud: &PointCloud<P>) -> std::io::Result<()> {
    writeln!(out, "{CLOUD_HEADER}")?;
    for (p, m) in cloud.points().iter().zip(cloud.meta()) {
        let f = p.cloud_fields();
        let num = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        let (p1, p2) = match m.parents {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{}",
            join([P::KIND.to_string(), num(f[0]), num(f[1]), num(f[2]), m.generation.to_string(), p1, p2])
        )?;
    }
    Ok(())
}

/// Reads a cloud written by [`write_cloud`]. Rows must all have kind `P::KIND`.
pub fn read_cloud<P: CsvPoint, R: BufRead>(input: R) -> Result<PointCloud<P>> {
    let mut points = Vec::new();
    let mut meta = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let lineno = n + 1;
        if n == 0 {
            if line.trim() != CLOUD_HEADER {
                return Err(Error::Parse(format!("expected header {CLOUD_HEADER:?}, got {:?}", line.trim())));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(Error::Parse(format!("line {lineno}: expected 7 columns, got {}", cols.len())));
        }
        if cols[0].trim() != P::KIND {
            return Err(Error::Parse(format!("line {lineno}: kind {:?}, expected {}", cols[0].trim(), P::KIND)));
        }
        let fields = [opt_field(cols[1], lineno)?, opt_field(cols[2], lineno)?, opt_field(cols[3], lineno)?];
        points.push(P::from_cloud_fields(fields).map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?);
        let generation = cols[4]
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad generation {:?}", cols[4])))?;
        let parent = |s: &str| -> Result<Option<u32>> {
            if s.trim().is_empty() {
                Ok(None)
            } else {
                s.trim().parse::<u32>().map(Some).map_err(|_| Error::Parse(format!("line {lineno}: bad parent {s:?}")))
            }
        };
        let parents = match (parent(cols[5])?, parent(cols[6])?) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => return Err(Error::Parse(format!("line {lineno}: only one parent given"))),
        };
        meta.push(PointMeta { generation, parents });
    }
    PointCloud::from_parts(points, meta)
}

/// Kind column of the first data row, if any.
pub fn peek_kind(text: &str) -> Option<&str> {
    text.lines().nth(1).and_then(|l| l.split(',').next()).map(str::trim)
}

pub fn write_slice<W: Write + ?Sized>(out: &mut W, rows: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(out, "{SLICE_HEADER}")?;
    for (s, h) in rows {
        writeln!(out, "{},{}", fmt_num(*s), fmt_num(*h))?;
    }
    Ok(())
}

pub fn read_slice<R: BufRead>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if n == 0 {
            if line.trim() != SLICE_HEADER {
                return Err(Error::Parse(format!("expected header {SLICE_HEADER:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected 2 columns", n + 1)));
        }
        rows.push((parse_f64(cols[0], n + 1)?, parse_f64(cols[1], n + 1)?));
    }
    Ok(rows)
}

pub fn write_function<P: CsvPoint, W: Write + ?Sized>(out: &mut W, f: &SampledFunction<P>) -> std::io::Result<()> {
    let header: Vec<String> = (1..=P::DIM).map(|k| format!("x{k}")).chain(["value".to_string()]).collect();
    writeln!(out, "{}", header.join(","))?;
    for (p, v) in f.domain().iter().zip(f.values()) {
        writeln!(out, "{}", join(p.coords().into_iter().chain([*v]).map(fmt_num)))?;
    }
    Ok(())
}

pub fn read_function<S, R>(space: &S, input: R) -> Result<SampledFunction<S::Point>>
where
    S: GeodesicSpace,
    S::Point: CsvPoint,
    R: BufRead,
{
    let dim = <S::Point as CsvPoint>::DIM;
    let mut domain = Vec::new();
    let mut values = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if n == 0 {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let ok = cols.len() == dim + 1
                && cols.last() == Some(&"value")
                && cols[..dim].iter().enumerate().all(|(k, c)| *c == format!("x{}", k + 1));
            if !ok {
                return Err(Error::Parse(format!("expected header x1..x{dim},value, got {:?}", line.trim())));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let nums = line.split(',').map(|v| parse_f64(v, n + 1)).collect::<Result<Vec<_>>>()?;
        if nums.len() != dim + 1 {
            return Err(Error::Parse(format!("line {}: expected {} columns", n + 1, dim + 1)));
        }
        domain.push(<S::Point as CsvPoint>::from_coords(&nums[..dim])?);
        values.push(nums[dim]);
    }
    SampledFunction::new(space, domain, values)
}
