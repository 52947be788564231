import json
import math
import os
from pathlib import Path
from typing import Any

import yaml

from rootshell.abc import ErrorCode

DEFAULT_SETTINGS: dict[str, Any] = {
    "ORBIT_CAP": 1_000_000,
    "ENUMERATION_CAP": 1_000_000,
    "EXPONENT_MAX_RANK": 5,
    "SCAN_MAX_RANK": 7,
    "THREADS": 1,
    "SEED": 0,
    "quadrature": {
        "epsabs_low": 1e-8,
        "epsabs_high": 1e-6,
        "sph_tol": 1e-11,
    },
    "majorant": {
        "a": 1.0,
        "kappa": 0.2,
        "C": 10.0,
    },
    "shell": {
        "eps0": 0.1,
        "samples": 100_000,
        "guard": 1e-9,
    },
}


def _merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_setting_data(path: Path | str = "settings.yml") -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        path = Path(__file__).resolve().parent.parent / "settings.yml"
    data: dict[str, Any] = {}
    if path.exists():
        with path.open(encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    settings_ = _merge(DEFAULT_SETTINGS, data)

    threads = os.environ.get("ROOTSHELL_THREADS")
    if threads:
        try:
            settings_["THREADS"] = max(1, int(threads))
        except ValueError:
            raise ErrorCode.INVALID_CONFIG.of(f"ROOTSHELL_THREADS must be an integer, got {threads!r}")
    return settings_


def load_key_value_file(path: Path | str) -> dict[str, str]:
    """key=value の設定ファイルを読む。空行と # で始まる行は無視"""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ErrorCode.INVALID_CONFIG.of(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def stable_float(value: float) -> float | str:
    """17 significant digits; non-finite values become strings so the JSON stays valid"""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(f"{value:.17g}")


def normalize_payload(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return stable_float(value)
    if isinstance(value, complex):
        return {"re": stable_float(value.real), "im": stable_float(value.imag)}
    if isinstance(value, dict):
        return {str(k): normalize_payload(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize_payload(v) for v in value]
    if hasattr(value, "item"):  # numpy scalars
        return normalize_payload(value.item())
    if hasattr(value, "tolist"):
        return normalize_payload(value.tolist())
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return str(value)
    return str(value)


def dumps_stable(payload: Any) -> str:
    return json.dumps(normalize_payload(payload), sort_keys=True, ensure_ascii=False)


settings = load_setting_data()
