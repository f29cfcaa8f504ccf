"""Ordered parameter-space curve branches shared by the analysis modules."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CurveBranch:
    """Ordered list of parameter-space points with branch metadata.

    ``columns`` names the coordinates of each point tuple; ``meta`` carries
    branch-level information (heteroclinic direction, Hopf criticality,
    C-curve half, truncation reason, ...).
    """

    columns: tuple[str, ...]
    points: list[tuple] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [pt[i] for pt in self.points]
