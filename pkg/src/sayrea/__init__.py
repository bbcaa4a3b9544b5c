"""Context-aware rule extraction and recommendation engine."""

from .catalog import Catalog, PageLabel, ServiceId, ServiceLabel, open_app_service
from .engine import Engine, compute_metrics
from .identify import build_prompt, identify, mock_identify, overlap_accuracy
from .recognition import Recognition, ServiceRecognizer, UiEvent, match_page, window_distance
from .recommend import RecencyLog, Recommendation, recommend
from .registry import ContextAttribute, ContextSnapshot, Registry, snapshot_diff
from .rules import ContextualRule, RuleStore, RuleTree

__version__ = "0.1.0"

__all__ = [
    "Catalog", "ContextAttribute", "ContextSnapshot", "ContextualRule", "Engine",
    "PageLabel", "RecencyLog", "Recognition", "Recommendation", "Registry",
    "RuleStore", "RuleTree", "ServiceId", "ServiceLabel", "ServiceRecognizer",
    "UiEvent", "build_prompt", "compute_metrics", "identify", "match_page",
    "mock_identify", "open_app_service", "overlap_accuracy", "recommend",
    "snapshot_diff", "window_distance",
]
