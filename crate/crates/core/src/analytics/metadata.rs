use std::fmt;
use std::io::Read;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::screenplay::normalize_speaker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Woman,
    Man,
    Unknown,
}

impl Gender {
    /// Accepts TMDb codes (1 woman, 2 man, 0 unknown) or the names.
    pub fn parse(raw: &str) -> Option<Self> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "1" | "woman" => Some(Gender::Woman),
            "2" | "man" => Some(Gender::Man),
            "0" | "unknown" | "" => Some(Gender::Unknown),
            _ => None,
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Woman => "woman",
            Gender::Man => "man",
            Gender::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitleMetadata {
    pub title_slug: String,
    pub release_year: i32,
    /// Keys are normalized speaker names.
    pub character_gender: IndexMap<String, Gender>,
}

impl TitleMetadata {
    /// Characters absent from the map count as unknown.
    pub fn gender_of(&self, speaker: &str) -> Gender {
        let name = normalize_speaker(speaker).name;
        self.character_gender.get(&name).copied().unwrap_or(Gender::Unknown)
    }
}

#[derive(Debug, Deserialize)]
struct MetadataRow {
    title_slug: String,
    year: String,
    #[serde(default)]
    character: String,
    #[serde(default)]
    gender: String,
}

/// Reads `title_slug,year,character,gender` rows into one record per title.
/// A row with an empty character only registers the title and year.
pub fn ingest_metadata<R: Read>(reader: R) -> Result<IndexMap<String, TitleMetadata>, AnalyticsError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| AnalyticsError::Csv(e.to_string()))?.clone();
    for col in ["title_slug", "year", "character", "gender"] {
        if !headers.iter().any(|h| h == col) {
            return Err(AnalyticsError::ColumnMissing(col.to_string()));
        }
    }
    let mut out: IndexMap<String, TitleMetadata> = IndexMap::new();
    for (k, row) in rdr.deserialize::<MetadataRow>().enumerate() {
        let row_no = k + 2;
        let row = row.map_err(|e| AnalyticsError::Csv(e.to_string()))?;
        let year: i32 = row
            .year
            .parse()
            .ok()
            .filter(|y| (1900..=2100).contains(y))
            .ok_or_else(|| AnalyticsError::BadYear { row: row_no, value: row.year.clone() })?;
        let entry = out.entry(row.title_slug.clone()).or_insert_with(|| TitleMetadata {
            title_slug: row.title_slug.clone(),
            release_year: year,
            character_gender: IndexMap::new(),
        });
        if entry.release_year != year {
            return Err(AnalyticsError::InconsistentYear { title: row.title_slug });
        }
        if row.character.is_empty() {
            continue;
        }
        let gender = Gender::parse(&row.gender)
            .ok_or_else(|| AnalyticsError::BadGenderCode { row: row_no, value: row.gender.clone() })?;
        let name = normalize_speaker(&row.character).name;
        if entry.character_gender.insert(name.clone(), gender).is_some() {
            return Err(AnalyticsError::DuplicateCharacter { title: row.title_slug, character: name });
        }
    }
    Ok(out)
}
