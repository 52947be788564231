from pydantic import BaseModel


class SemidenseWitness(BaseModel):
    psi_nodes: list[int]
    psi_size: int
    psi_rank: int
    intersection: int
    lhs: int
    rhs: str
    word: list[int] | None = None
    normal: list[str] | None = None

    class Config:
        from_attributes = True


class SemidenseVerdict(BaseModel):
    holds: bool
    phi0_size: int
    phi0_type: str
    orbit_size: int
    standard_count: int
    witness: SemidenseWitness | None = None

    class Config:
        from_attributes = True


class ScanRow(BaseModel):
    type: str
    rank: int
    node: int
    phi0_type: str
    holds: bool
    base_case_lhs: int
    base_case_rhs: int

    class Config:
        from_attributes = True


class WeylTableRow(BaseModel):
    type: str
    rank: int
    node: int
    levi_type: str
    weyl_order: int
    levi_weyl_order: int
    coset_count: int
    roots: int
    levi_roots: int
    unipotent_roots: int
    coset_identity: bool

    class Config:
        from_attributes = True


class ExceptionalCase(BaseModel):
    type: str
    phi0_type: str
    description: str
    intersection: int
    psi_rank: int
    psi_size: int
    fails: bool

    class Config:
        from_attributes = True
