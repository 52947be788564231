from pydantic import BaseModel


class IntersectionEstimate(BaseModel):
    n: int
    t: float
    H: list[float]
    ratio: float
    stderr: float
    hits: int
    samples: int
    k: int | None
    semidense: bool
    bound_quotient: float
    polytopal_norm: float

    class Config:
        from_attributes = True


class TriangleReport(BaseModel):
    n: int
    trials: int
    violations: int
    max_defect: float

    class Config:
        from_attributes = True


class BrionRow(BaseModel):
    tau: float
    value: float
    ratio: float

    class Config:
        from_attributes = True
