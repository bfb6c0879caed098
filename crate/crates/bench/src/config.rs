//! TOML study configuration.

use std::path::Path;

use crate::study::StudySpec;
use crate::{Result, StudyError};

pub fn parse_study(text: &str) -> Result<StudySpec> {
    let spec: StudySpec = toml::from_str(text).map_err(|e| StudyError::Config(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

pub fn load_study(path: &Path) -> Result<StudySpec> {
    let text = std::fs::read_to_string(path)?;
    parse_study(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::{Metric, StudyKind};
    use tailfit_core::{SimModel, TailFamily};

    const SMALL: &str = r#"
name = "ihr_k"
kind = "bias_rmse_vs_k"
family = "inverted_husler_reiss"
weights = "g1"
thresholds = [100, 200]
replications = 4
seed = 7
metrics = ["bias", "rmse"]

[generator]
model = "m1"
theta = 0.7
n = 2000
seed = 0
"#;

    #[test]
    fn parses_minimal_study() {
        let s = parse_study(SMALL).unwrap();
        assert_eq!(s.kind, StudyKind::BiasRmseVsK);
        assert_eq!(s.family, TailFamily::InvertedHuslerReiss);
        assert_eq!(s.generator.model, SimModel::M1 { theta: 0.7 });
        assert_eq!(s.metrics, vec![Metric::Bias, Metric::Rmse]);
    }

    #[test]
    fn rejects_bad_studies() {
        let one_rep = SMALL.replace("replications = 4", "replications = 1");
        assert!(matches!(parse_study(&one_rep), Err(StudyError::InvalidSpec(_))));
        let mismatch = SMALL.replace("inverted_husler_reiss", "random_scale");
        assert!(matches!(parse_study(&mismatch), Err(StudyError::InvalidSpec(_))));
        let unknown = SMALL.replace("seed = 7", "seed = 7\nbogus = 1");
        assert!(matches!(parse_study(&unknown), Err(StudyError::Config(_))));
        let big_k = SMALL.replace("[100, 200]", "[100, 5000]");
        assert!(matches!(parse_study(&big_k), Err(StudyError::InvalidSpec(_))));
    }

    #[test]
    fn shipped_configs_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
        let mut n = 0;
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "toml") {
                load_study(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
                n += 1;
            }
        }
        assert!(n > 0);
    }
}
