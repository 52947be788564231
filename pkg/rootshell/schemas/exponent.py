from pydantic import BaseModel


class ExponentCsvRow(BaseModel):
    sigma: str
    i_or_l: int
    w_index: int | None = None
    n: int | None
    s: int | None
    S: int
    e: int

    class Config:
        from_attributes = True


class Violation(BaseModel):
    sigma: list[int]
    w_index: int | None = None
    i: int
    detail: str

    class Config:
        from_attributes = True


class PowerKRow(BaseModel):
    sigma: list[int]
    l: int
    w_index: int | None = None
    S: int
    e: int
    ratios: list[float]
    spread: float

    class Config:
        from_attributes = True
