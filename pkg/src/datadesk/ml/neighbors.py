"""k-nearest-neighbor classifier with fully pinned tie-breaking.

Distance ties break toward the lower training-row index; vote ties break
toward the earlier class in the declared label order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

K_NEIGHBORS = 5


@dataclass
class KnnModel:
    points: np.ndarray          # training rows
    classes: list[str]          # training class per row
    label_order: list[str]      # declared L1..Lp order
    k: int = K_NEIGHBORS

    def predict_one(self, point: np.ndarray) -> str:
        d2 = ((self.points - point) ** 2).sum(axis=1)
        order = np.lexsort((np.arange(len(d2)), d2))  # distance, then row index
        k_eff = min(self.k, len(order))
        votes: dict[str, int] = {}
        for idx in order[:k_eff]:
            cls = self.classes[int(idx)]
            votes[cls] = votes.get(cls, 0) + 1
        best = max(votes.values())
        for cls in self.label_order:
            if votes.get(cls, 0) == best:
                return cls
        return max(votes, key=lambda c: votes[c])  # unreachable: votes ⊆ label_order

    def predict(self, points: np.ndarray) -> list[str]:
        return [self.predict_one(p) for p in points]
