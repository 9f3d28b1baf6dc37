//! Time series of every tracked norm, cross term and functional, with a CSV
//! form that round-trips exactly (17 significant digits).
//!
//! All values are per-mode integrals `∫ … r dr` of the complex profile; for a
//! real band `±ℓ` every column is the same number times `4π`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::error::{Error, Result};

/// Column order of the ledger CSV.
pub const LEDGER_COLUMNS: [&str; 15] = [
    "t",
    "l2_sq",
    "grad_sq",
    "wtheta_sq",
    "cross",
    "lap_sq",
    "wgrad_sq",
    "wm2_sq",
    "mix_rd",
    "mix_lap",
    "wr_sq",
    "x_sq",
    "sup_abs",
    "phi",
    "w",
];

/// One ledger sample.
///
/// `phi` is NaN for `ℓ = 0`, where the functional is not defined.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LedgerRow {
    pub t: f64,
    /// `‖f‖²`
    pub l2_sq: f64,
    /// `‖∇f‖²` (summation-by-parts form)
    pub grad_sq: f64,
    /// `‖r^{p−1}∂_θ f‖²`
    pub wtheta_sq: f64,
    /// `⟨r^{p−1}∂_θ f, ∂_r f⟩`
    pub cross: f64,
    /// `‖Δf‖²`
    pub lap_sq: f64,
    /// `‖r^{p−1}∂_θ∇f‖²`
    pub wgrad_sq: f64,
    /// `‖r^{p−2}∂_θ f‖²`
    pub wm2_sq: f64,
    /// `⟨r^{p−1}∂_r∂_θ f, Δf⟩`
    pub mix_rd: f64,
    /// `⟨r^{p−2}∂_θ f, Δf⟩`
    pub mix_lap: f64,
    /// `‖r^{p−1}f‖²`
    pub wr_sq: f64,
    /// `‖f‖_X²`
    pub x_sq: f64,
    /// `max_r |f|`
    pub sup_abs: f64,
    pub phi: f64,
    pub w: f64,
}

impl LedgerRow {
    pub fn with_time(t: f64) -> Self {
        Self {
            t,
            ..Self::default()
        }
    }

    pub fn values(&self) -> [f64; 15] {
        [
            self.t,
            self.l2_sq,
            self.grad_sq,
            self.wtheta_sq,
            self.cross,
            self.lap_sq,
            self.wgrad_sq,
            self.wm2_sq,
            self.mix_rd,
            self.mix_lap,
            self.wr_sq,
            self.x_sq,
            self.sup_abs,
            self.phi,
            self.w,
        ]
    }

    fn from_values(v: [f64; 15]) -> Self {
        Self {
            t: v[0],
            l2_sq: v[1],
            grad_sq: v[2],
            wtheta_sq: v[3],
            cross: v[4],
            lap_sq: v[5],
            wgrad_sq: v[6],
            wm2_sq: v[7],
            mix_rd: v[8],
            mix_lap: v[9],
            wr_sq: v[10],
            x_sq: v[11],
            sup_abs: v[12],
            phi: v[13],
            w: v[14],
        }
    }

    fn squared_columns(&self) -> [(&'static str, f64); 8] {
        [
            ("l2_sq", self.l2_sq),
            ("grad_sq", self.grad_sq),
            ("wtheta_sq", self.wtheta_sq),
            ("lap_sq", self.lap_sq),
            ("wgrad_sq", self.wgrad_sq),
            ("wm2_sq", self.wm2_sq),
            ("wr_sq", self.wr_sq),
            ("x_sq", self.x_sq),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    rows: Vec<LedgerRow>,
}

impl EnergyLedger {
    pub fn from_rows(rows: Vec<LedgerRow>) -> Result<Self> {
        let mut ledger = Self::default();
        for row in rows {
            ledger.push(row)?;
        }
        Ok(ledger)
    }

    /// Append a row; time must strictly increase and squared norms be nonnegative.
    pub fn push(&mut self, row: LedgerRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if !(row.t > last.t) {
                return Err(Error::param(
                    "ledger",
                    format!("time {} does not follow {}", row.t, last.t),
                ));
            }
        }
        for (name, value) in row.squared_columns() {
            if value < 0.0 {
                return Err(Error::param(
                    "ledger",
                    format!("{name} negative ({value}) at t = {}", row.t),
                ));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn first(&self) -> Option<&LedgerRow> {
        self.rows.first()
    }

    pub fn column(&self, f: impl Fn(&LedgerRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = LEDGER_COLUMNS.join(",");
        out.push('\n');
        for row in &self.rows {
            write_record(&mut out, &row.values());
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InsufficientData("empty ledger csv".into()))?;
        if header.trim() != LEDGER_COLUMNS.join(",") {
            return Err(Error::param("ledger", format!("unexpected header `{header}`")));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let mut v = [0.0; 15];
            let mut fields = line.split(',');
            for slot in v.iter_mut() {
                let field = fields
                    .next()
                    .ok_or_else(|| Error::param("ledger", format!("short row {}", i + 2)))?;
                *slot = field.trim().parse().map_err(|_| {
                    Error::param("ledger", format!("bad number `{field}` on row {}", i + 2))
                })?;
            }
            if fields.next().is_some() {
                return Err(Error::param("ledger", format!("long row {}", i + 2)));
            }
            rows.push(LedgerRow::from_values(v));
        }
        Self::from_rows(rows)
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn write_record(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

/// Write via a temporary sibling file and rename, so readers never observe a
/// partially written file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = match dir {
        Some(d) => d.join(tmp_name),
        None => Path::new(&tmp_name).to_path_buf(),
    };
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_increasing_time() {
        let mut l = EnergyLedger::default();
        l.push(LedgerRow::with_time(0.0)).unwrap();
        assert!(l.push(LedgerRow::with_time(0.0)).is_err());
        assert!(l.push(LedgerRow::with_time(-1.0)).is_err());
        l.push(LedgerRow::with_time(0.5)).unwrap();
    }

    #[test]
    fn rejects_negative_squared_norm() {
        let mut l = EnergyLedger::default();
        let row = LedgerRow {
            grad_sq: -1e-3,
            ..LedgerRow::with_time(0.0)
        };
        assert!(l.push(row).is_err());
        // the cross term may be negative
        let row = LedgerRow {
            cross: -1e-3,
            ..LedgerRow::with_time(0.0)
        };
        assert!(l.push(row).is_ok());
    }

    #[test]
    fn header_names_every_column() {
        let l = EnergyLedger::default();
        assert_eq!(l.to_csv().trim(), LEDGER_COLUMNS.join(","));
        assert!(EnergyLedger::from_csv("t,foo\n").is_err());
    }

    #[test]
    fn nan_phi_survives_roundtrip() {
        let row = LedgerRow {
            phi: f64::NAN,
            l2_sq: 0.25,
            ..LedgerRow::with_time(1.0)
        };
        let l = EnergyLedger::from_rows(vec![row]).unwrap();
        let back = EnergyLedger::from_csv(&l.to_csv()).unwrap();
        assert!(back.rows()[0].phi.is_nan());
        assert_eq!(back.rows()[0].l2_sq, 0.25);
    }

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("ledger.csv");
        write_atomic(&path, "a,b\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,b\n");
        let names: Vec<_> = fs::read_dir(path.parent().unwrap())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(names.len(), 1);
    }

    proptest! {
        #[test]
        fn csv_roundtrip_is_exact(
            vals in prop::collection::vec((0.0f64..1e3, -1e300f64..1e300, 1e-300f64..1e300), 1..20)
        ) {
            let rows: Vec<_> = vals
                .iter()
                .enumerate()
                .map(|(i, &(a, b, c))| LedgerRow {
                    t: i as f64 * 0.1 + a * 1e-6,
                    l2_sq: c,
                    cross: b,
                    x_sq: a,
                    phi: c / 3.0,
                    ..LedgerRow::default()
                })
                .collect();
            let ledger = EnergyLedger::from_rows(rows).unwrap();
            let back = EnergyLedger::from_csv(&ledger.to_csv()).unwrap();
            prop_assert_eq!(back, ledger);
        }
    }
}
