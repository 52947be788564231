from enum import IntEnum


class ErrorCode(IntEnum):
    INVALID_INVOCATION = 100
    INVALID_CONFIG = 101

    INVALID_CARTAN_TYPE = 200
    ORBIT_CAP_EXCEEDED = 201
    ENUMERATION_CAP_EXCEEDED = 202
    NOT_DOMINANT = 203

    NOT_SEMISTANDARD = 300
    REDUCIBLE_SYSTEM = 301
    NOT_FINITE_TYPE = 302

    NOT_SEMIDENSE = 400
    NON_CONVERGENT = 401

    POLE_PROXIMITY = 500
    QUADRATURE_FAILED = 501
    NO_EMPTY_INTERVAL = 502

    SINGULAR_MATRIX = 600
    REJECTION_RATE = 601
    SHELL_OUTSIDE_CHAMBER = 602

    def of(self, detail: str) -> "RootshellError":
        return RootshellError(self, detail)


class RootshellError(Exception):
    def __init__(self, code: ErrorCode, detail: str):
        super().__init__(f"[{code.name}] {detail}")
        self.code = code
        self.detail = detail

    @property
    def exit_status(self) -> int:
        # invocation problems and unknown Cartan types are usage errors
        return 2 if self.code < 200 or self.code is ErrorCode.INVALID_CARTAN_TYPE else 1
