from enum import Enum


class CartanType(Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    G = "G"

    UNKNOWN = "?"

    @property
    def display_name(self) -> str:
        return CARTAN_TYPE_DISPLAY_NAME[self]

    @property
    def is_classical(self) -> bool:
        return self in (CartanType.A, CartanType.B, CartanType.C, CartanType.D)

    def valid_rank(self, rank: int) -> bool:
        lo, hi = CARTAN_TYPE_RANKS.get(self, (1, 0))
        return lo <= rank <= hi

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str) and value.upper() != value:
            return cls(value.upper())
        return cls.UNKNOWN


CARTAN_TYPE_DISPLAY_NAME = {
    CartanType.A: "special linear",
    CartanType.B: "odd orthogonal",
    CartanType.C: "symplectic",
    CartanType.D: "even orthogonal",
    CartanType.E: "exceptional E",
    CartanType.F: "exceptional F",
    CartanType.G: "exceptional G",
    CartanType.UNKNOWN: "unknown",
}

# (min rank, max rank); B starts at 2, C at 3, D at 4 so that families do not overlap
CARTAN_TYPE_RANKS = {
    CartanType.A: (1, 64),
    CartanType.B: (2, 64),
    CartanType.C: (3, 64),
    CartanType.D: (4, 64),
    CartanType.E: (6, 8),
    CartanType.F: (4, 4),
    CartanType.G: (2, 2),
}
