use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ForestModel;
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, Lexicons, NgramModel};

pub const BUNDLE_FORMAT: &str = "preattr-model";

/// Everything needed to classify a new sentence: the forest and the n-gram
/// models its features were computed with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format: String,
    pub crate_version: String,
    pub lexicon_version: String,
    pub forest: ForestModel,
    pub bigram: NgramModel,
    pub trigram: NgramModel,
}

impl ModelBundle {
    pub fn new(forest: ForestModel, extractor: &FeatureExtractor) -> Self {
        ModelBundle {
            format: BUNDLE_FORMAT.into(),
            crate_version: crate::VERSION.into(),
            lexicon_version: extractor.lexicons.version().to_string(),
            forest,
            bigram: extractor.bigram.clone(),
            trigram: extractor.trigram.clone(),
        }
    }

    /// Extractor over the bundled lexicons.
    pub fn extractor(&self) -> FeatureExtractor {
        self.extractor_with(Lexicons::bundled())
    }

    pub fn extractor_with(&self, lexicons: Arc<Lexicons>) -> FeatureExtractor {
        if lexicons.version() != self.lexicon_version {
            log::warn!(
                "model was trained with lexicons `{}` but `{}` are loaded",
                self.lexicon_version,
                lexicons.version()
            );
        }
        FeatureExtractor {
            bigram: self.bigram.clone(),
            trigram: self.trigram.clone(),
            lexicons,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let b: ModelBundle = serde_json::from_str(text)?;
        if b.format != BUNDLE_FORMAT {
            return Err(Error::ModelFormat(format!(
                "expected a `{BUNDLE_FORMAT}` file, found `{}`",
                b.format
            )));
        }
        if !b.forest.expects_feature_vectors() {
            return Err(Error::ModelFormat(
                "forest does not take sentence feature vectors".into(),
            ));
        }
        b.forest.validate()?;
        Ok(b)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
