"""Classification toolkit and model-lifecycle service for detecting the OCD
class (HI / GAI / OAI) from five oxidative-stress biomarkers."""

from .core_data import (
    BiomarkerVector,
    DataError,
    Dataset,
    FoldPlan,
    LabeledSample,
    NormalizationParams,
    OcdClass,
    make_folds,
    normalize_apply,
    normalize_dataset,
    normalize_fit,
    parse_dataset_csv,
    serialize_dataset_csv,
)

__all__ = [
    "BiomarkerVector",
    "DataError",
    "Dataset",
    "FoldPlan",
    "LabeledSample",
    "NormalizationParams",
    "OcdClass",
    "make_folds",
    "normalize_apply",
    "normalize_dataset",
    "normalize_fit",
    "parse_dataset_csv",
    "serialize_dataset_csv",
]
