use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{DistTable, Provenance};
use crate::{Error, Result};

/// Environment variable that overrides the default cache directory.
pub const CACHE_ENV_VAR: &str = "ALTSEQ_CACHE_DIR";

/// On-disk store of exact rows, one CSV file per `n`.
#[derive(Debug, Clone)]
pub struct DistCache {
    dir: PathBuf,
}

impl DistCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, n: usize) -> PathBuf {
        self.dir.join(format!("dist_n{n:04}.csv"))
    }

    pub fn load(&self, n: usize) -> Result<Option<DistTable>> {
        let path = self.path_for(n);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let table = DistTable::from_csv(&text, Provenance::GeneratingFunction)
            .map_err(|e| Error::Cache { path: path.clone(), reason: e.to_string() })?;
        if table.n() != n {
            return Err(Error::Cache { path, reason: format!("holds row n={}", table.n()) });
        }
        Ok(Some(table))
    }

    /// Write through a temporary file so a crash never leaves a partial row.
    pub fn store(&self, table: &DistTable) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(table.n());
        let tmp = path.with_extension("csv.tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(table.to_csv().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn get_or_compute(&self, n: usize, compute: impl FnOnce() -> Result<DistTable>) -> Result<DistTable> {
        if let Some(t) = self.load(n)? {
            return Ok(t);
        }
        let t = compute()?;
        self.store(&t)?;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgf::exact_row;

    #[test]
    fn miss_then_hit() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DistCache::new(dir.path().join("rows"));
        assert!(cache.load(5).unwrap().is_none());
        let fresh = cache.get_or_compute(5, || exact_row(5)).unwrap();
        let hit = cache.get_or_compute(5, || panic!("should be cached")).unwrap();
        assert_eq!(fresh, hit);
        assert_eq!(fs::read_to_string(cache.path_for(5)).unwrap(), fresh.to_csv());
    }

    #[test]
    fn corrupt_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DistCache::new(dir.path());
        fs::write(cache.path_for(3), "n,k,p_num,p_den\n3,0,1,1\n").unwrap();
        assert!(matches!(cache.load(3), Err(Error::Cache { .. })));
    }
}
