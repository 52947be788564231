import datetime
from typing import Any

from pydantic import BaseModel, Field

from rootshell.utils import dumps_stable, normalize_payload


class RunReport(BaseModel):
    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None
    timestamp: datetime.datetime | None = None
    results: dict[str, Any] = Field(default_factory=dict)
    verdicts: dict[str, bool] = Field(default_factory=dict)
    # CSV rows; not part of the JSON payload
    table: list[dict[str, Any]] = Field(default_factory=list, exclude=True)

    class Config:
        from_attributes = True

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def payload(self, include_timestamp: bool = False) -> dict[str, Any]:
        data = {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "results": self.results,
            "verdicts": self.verdicts,
            "pass": self.passed,
        }
        if include_timestamp and self.timestamp is not None:
            data["timestamp"] = self.timestamp.isoformat()
        return normalize_payload(data)

    def dumps(self, include_timestamp: bool = False) -> str:
        return dumps_stable(self.payload(include_timestamp))
