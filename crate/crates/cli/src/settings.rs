//! Flag values merged over an optional INI-style configuration file.
//!
//! Keys are the long flag names without dashes (`n-perm`, `features`, ...).
//! A key is looked up in the section named after the subcommand first, then
//! in the section-less part of the file. Flags always win.

use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::CliError;

pub struct Settings {
    file: Option<Ini>,
    section: &'static str,
}

impl Settings {
    pub fn load(path: Option<&Path>, section: &'static str) -> Result<Self, CliError> {
        let file = match path {
            None => None,
            Some(p) => Some(
                Ini::load_from_file(p).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?,
            ),
        };
        Ok(Settings { file, section })
    }

    fn lookup(&self, key: &str) -> Option<&str> {
        let ini = self.file.as_ref()?;
        ini.section(Some(self.section))
            .and_then(|s| s.get(key))
            .or_else(|| ini.general_section().get(key))
    }

    /// The flag value, else the file value parsed as `T`.
    pub fn get<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(raw) => raw
                .trim()
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key} = {raw:?}: {e}"))),
        }
    }

    pub fn or<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key, flag)?.unwrap_or(default))
    }

    pub fn require<T>(&self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("--{key} is required (flag or config key)")))
    }
}
