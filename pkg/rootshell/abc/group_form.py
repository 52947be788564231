from enum import Enum


class GroupForm(Enum):
    SPLIT = "split"
    COMPLEX = "complex"

    @property
    def multiplicity(self) -> int:
        return 2 if self is GroupForm.COMPLEX else 1


class RankOneGroup(Enum):
    SL2R = "sl2r"
    SL2C = "sl2c"

    @property
    def multiplicity(self) -> int:
        return 2 if self is RankOneGroup.SL2C else 1

    @property
    def rho(self) -> float:
        # rho(H) = (m/2) t for the single root of SL2
        return self.multiplicity / 2
