from pydantic import BaseModel, Field


class GridReport(BaseModel):
    name: str
    grid: dict[str, list[float]]
    sup_ratio: float
    argmax_point: dict[str, float]
    inf_ratio: float | None = None
    argmin_point: dict[str, float] | None = None
    threshold: float | None = None
    passed: bool
    settings: dict[str, float] = {}
    # one row per grid point (axis values and ratio); CSV only
    values: list[dict[str, float]] = Field(default_factory=list, exclude=True)

    class Config:
        from_attributes = True


class TimeAverageRow(BaseModel):
    lam: float
    tau: float
    time_average: float
    diagonal: float
    off_diagonal: float
    off_diagonal_times_tau: float

    class Config:
        from_attributes = True
