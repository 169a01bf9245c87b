"""The six target species and their fixed label-column order."""

from __future__ import annotations

import enum


class Species(enum.Enum):
    """Target mosquito species. Enum order fixes the label vector columns."""

    AE_AEGYPTI = 0
    AE_ALBOPICTUS = 1
    AN_ARABIENSIS = 2
    AN_GAMBIAE = 3
    CX_QUINQUEFASCIATUS = 4
    CX_PIPIENS = 5

    @property
    def index(self) -> int:
        return self.value

    @property
    def code(self) -> str:
        return self.name

    @classmethod
    def from_code(cls, code: str) -> "Species":
        try:
            return cls[code.upper()]
        except KeyError:
            raise ValueError(f"unknown species code: {code!r}") from None


N_SPECIES = len(Species)

# Short column suffixes used in the predictions CSV header.
CSV_COLUMNS = [
    "p_ae_aegypti",
    "p_ae_albopictus",
    "p_an_arabiensis",
    "p_an_gambiae",
    "p_cx_quinque",
    "p_cx_pipiens",
]
