"""Sensitivity testing: robustness, security, template generation, fairness."""

from .behavioral import CaseVerdict, TestResult, run_dir, run_inv, run_mft, run_suite_entry
from .fairness import (
    ClassificationFairness,
    GroupStats,
    RegressionFairness,
    RegressionGroupStats,
    fairness_classification,
    fairness_regression,
)
from .fuzz import FUZZ_CORPUS_VERSION, FuzzResult, FuzzVerdict, fuzz_corpus, security_fuzz
from .perturb import (
    SURFACE_KINDS,
    ExposeError,
    Perturber,
    perturb_surface,
    perturb_typo,
)
from .templates import BUILTIN_PROVIDERS, Template, expand_template

__all__ = [
    "BUILTIN_PROVIDERS",
    "CaseVerdict",
    "ClassificationFairness",
    "ExposeError",
    "FUZZ_CORPUS_VERSION",
    "FuzzResult",
    "FuzzVerdict",
    "GroupStats",
    "Perturber",
    "RegressionFairness",
    "RegressionGroupStats",
    "SURFACE_KINDS",
    "Template",
    "TestResult",
    "expand_template",
    "fairness_classification",
    "fairness_regression",
    "fuzz_corpus",
    "perturb_surface",
    "perturb_typo",
    "run_dir",
    "run_inv",
    "run_mft",
    "run_suite_entry",
    "security_fuzz",
]
