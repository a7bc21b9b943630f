"""
Short-term memory for AttractorKit.
This module keeps the intermediate results of one pipeline run.
"""

import logging
from typing import Any, Dict, List, Optional


class ShortTermMemory:
    """
    Result store for a single run.

    Each pipeline stage stores its result under the stage name; later stages
    read earlier results from here instead of recomputing them.
    """

    def __init__(self):
        """Initialize the short-term memory."""
        self.logger = logging.getLogger("attractorkit.memory")
        self.results: Dict[str, Any] = {}
        self.order: List[str] = []
        self.current_context: Dict[str, Any] = {}
        self.logger.debug("Short-term memory initialized")

    def store(self, stage: str, result: Any):
        """
        Store the result of a stage, replacing an earlier one.

        Args:
            stage: Stage name
            result: Stage result
        """
        if stage not in self.results:
            self.order.append(stage)
        self.results[stage] = result
        self.logger.debug(f"Stored result of stage {stage}")

    def get(self, stage: str, default: Any = None) -> Any:
        return self.results.get(stage, default)

    def has(self, stage: str) -> bool:
        return stage in self.results

    def stages(self) -> List[str]:
        """Stage names in the order they were first stored."""
        return list(self.order)

    def update_context(self, key: str, value: Any):
        """Record run metadata such as the model path; it is not a stage result."""
        self.current_context[key] = value
        self.logger.debug(f"Run context {key} = {value!r}")

    def get_context(self, key: Optional[str] = None) -> Any:
        """One context entry, or a copy of the whole context when ``key`` is None."""
        if key is None:
            return dict(self.current_context)
        return self.current_context.get(key)

    def clear(self):
        """Forget every stage result and the run context, e.g. before loading another model."""
        self.results.clear()
        self.order.clear()
        self.current_context.clear()
        self.logger.debug("Dropped all stage results")
