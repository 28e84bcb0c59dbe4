use std::io::{Read, Write};

use super::{AnalyticsError, EraBucket, FloorClaimRecord};

pub const ERA_HEADER: &str = "x,point,lo,hi,n_movies";
pub const FLOOR_HEADER: &str = "x,point,lo,hi,n_titles,pct_started,pct_lines";

/// Shortest representation that parses back to the same float.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn io(e: std::io::Error) -> AnalyticsError {
    AnalyticsError::Csv(e.to_string())
}

/// Plot-ready rows for the era analysis, one per bucket.
pub fn write_era_csv<W: Write>(mut w: W, buckets: &[EraBucket]) -> Result<(), AnalyticsError> {
    writeln!(w, "{ERA_HEADER}").map_err(io)?;
    for b in buckets {
        writeln!(w, "{},{},{},{},{}", b.start_year, num(b.mean_thread_length), num(b.lo), num(b.hi), b.n_movies)
            .map_err(io)?;
    }
    Ok(())
}

/// Plot-ready rows for the floor-claiming analysis; `point` is the delta.
pub fn write_floor_csv<W: Write>(mut w: W, records: &[FloorClaimRecord]) -> Result<(), AnalyticsError> {
    writeln!(w, "{FLOOR_HEADER}").map_err(io)?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.year,
            num(r.delta),
            num(r.lo),
            num(r.hi),
            r.n_titles,
            num(r.pct_threads_started_by_women),
            num(r.pct_lines_by_women)
        )
        .map_err(io)?;
    }
    Ok(())
}

fn rows<R: Read>(reader: R, header: &str) -> Result<Vec<csv::StringRecord>, AnalyticsError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    let h = rdr.headers().map_err(|e| AnalyticsError::Csv(e.to_string()))?;
    if h.iter().collect::<Vec<_>>().join(",") != header {
        return Err(AnalyticsError::Csv(format!("expected header {header:?}")));
    }
    rdr.records().map(|r| r.map_err(|e| AnalyticsError::Csv(e.to_string()))).collect()
}

fn field<T: std::str::FromStr>(r: &csv::StringRecord, i: usize) -> Result<T, AnalyticsError> {
    r.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| AnalyticsError::Csv(format!("bad field {i} in {:?}", r.iter().collect::<Vec<_>>())))
}

pub fn read_era_csv<R: Read>(reader: R) -> Result<Vec<EraBucket>, AnalyticsError> {
    rows(reader, ERA_HEADER)?
        .iter()
        .map(|r| {
            Ok(EraBucket {
                start_year: field(r, 0)?,
                mean_thread_length: field(r, 1)?,
                lo: field(r, 2)?,
                hi: field(r, 3)?,
                n_movies: field(r, 4)?,
            })
        })
        .collect()
}

/// Reads floor-claiming rows back. Thread and line counts are not part of
/// the plot format and come back as zero.
pub fn read_floor_csv<R: Read>(reader: R) -> Result<Vec<FloorClaimRecord>, AnalyticsError> {
    rows(reader, FLOOR_HEADER)?
        .iter()
        .map(|r| {
            Ok(FloorClaimRecord {
                year: field(r, 0)?,
                delta: field(r, 1)?,
                lo: field(r, 2)?,
                hi: field(r, 3)?,
                n_titles: field(r, 4)?,
                pct_threads_started_by_women: field(r, 5)?,
                pct_lines_by_women: field(r, 6)?,
                counts: Default::default(),
            })
        })
        .collect()
}
