//! `key = value` config files. Each key is a long flag name; entries are
//! spliced in ahead of the command-line flags, which then override them.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses a config file into flag arguments.
pub fn read(path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut args = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected `key = value`", path.display(), n + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.starts_with('-') {
            bail!("{}:{}: invalid key `{key}`", path.display(), n + 1);
        }
        match value {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => args.push(format!("--{key}={value}").into()),
        }
    }
    Ok(args)
}

/// `argv` with the config flags inserted right after the subcommand name.
pub fn splice(argv: &[OsString], config: Vec<OsString>) -> Vec<OsString> {
    let at = argv.len().min(2);
    let mut out = argv[..at].to_vec();
    out.extend(config);
    out.extend_from_slice(&argv[at..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn reads_pairs_flags_and_comments() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            file,
            "# preset\nk = 5\nstratified = true\nexclude-self=false\n\nmeasure=cosine"
        )
        .unwrap();
        let args = read(file.path()).unwrap();
        assert_eq!(args, ["--k=5", "--stratified", "--measure=cosine"]);
        let argv: Vec<OsString> = ["docsim", "classify", "--k", "3"].map(Into::into).to_vec();
        assert_eq!(
            splice(&argv, args),
            [
                "docsim",
                "classify",
                "--k=5",
                "--stratified",
                "--measure=cosine",
                "--k",
                "3"
            ]
        );
    }

    #[test]
    fn rejects_malformed_lines() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "k 5").unwrap();
        assert!(read(file.path()).is_err());
    }
}
