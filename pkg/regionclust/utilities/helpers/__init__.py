from .document_codec import DocumentEncoder, DocumentValidationError
from .factor_cache import FactorCache
from .metrics import LabelLengthError, normalized_mutual_information

__all__ = [
    "DocumentEncoder",
    "DocumentValidationError",
    "FactorCache",
    "LabelLengthError",
    "normalized_mutual_information",
]
