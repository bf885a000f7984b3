"""
JSON scenario documents.

A scenario names either "gram" (H_s^H H_s) or "channel" (H_s). Matrices are
nested lists of numbers or {"real": [[...]], "imag": [[...]]}.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple, Union

import jax
import jax.numpy as jnp

from isac_drt.comm.rate_eval import CommChannel
from isac_drt.io.exceptions import ConfigFieldError
from isac_drt.radar.scenario import RadarScenario

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()

PathLike = Union[str, Path]


def load_document(path: PathLike) -> Mapping[str, Any]:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigFieldError("<document>", f"not valid JSON ({err})") from err
    if not isinstance(document, dict):
        raise ConfigFieldError("<document>", "expected a JSON object")
    return document


def parse_matrix(value: Any, field: str) -> jax.Array:
    """
    Complex matrix from nested lists or a real/imag pair of nested lists
    """
    if isinstance(value, dict):
        if "real" not in value:
            raise ConfigFieldError(field, "matrix object needs a 'real' part")
        real = parse_matrix(value["real"], field)
        imag = (
            parse_matrix(value["imag"], field)
            if "imag" in value
            else jnp.zeros_like(real)
        )
        if real.shape != imag.shape:
            raise ConfigFieldError(field, "real and imaginary parts differ in shape")
        return jnp.real(real) + 1j * jnp.real(imag)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return jnp.array([[value]], dtype=jnp.complex128)
    if not isinstance(value, list) or not value:
        raise ConfigFieldError(field, "expected a nonempty list of rows")
    rows = value if all(isinstance(row, list) for row in value) else [value]
    width = len(rows[0])
    for row in rows:
        if len(row) != width:
            raise ConfigFieldError(field, "rows have different lengths")
        for entry in row:
            if isinstance(entry, bool) or not isinstance(entry, (int, float)):
                raise ConfigFieldError(field, f"entry {entry!r} is not a number")
            if not math.isfinite(entry):
                raise ConfigFieldError(field, "entries have to be finite")
    return jnp.array(rows, dtype=jnp.complex128)


def _number(
    document: Mapping[str, Any],
    field: str,
    default: Optional[float],
    lower: float,
    strict: bool,
) -> float:
    if field not in document:
        if default is None:
            raise ConfigFieldError(field, "missing")
        return default
    value = document[field]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigFieldError(field, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigFieldError(field, "has to be finite")
    if value < lower or (strict and value == lower):
        relation = ">" if strict else ">="
        raise ConfigFieldError(field, f"has to be {relation} {lower}")
    return float(value)


def _allocation(document: Mapping[str, Any]) -> Optional[Tuple[float, ...]]:
    value = document.get("allocation")
    if value is None:
        return None
    if not isinstance(value, list) or not value:
        raise ConfigFieldError("allocation", "expected a nonempty list of fractions")
    if any(isinstance(a, bool) or not isinstance(a, (int, float)) for a in value):
        raise ConfigFieldError("allocation", "fractions have to be numbers")
    if any(a < 0 for a in value) or sum(value) <= 0:
        raise ConfigFieldError("allocation", "fractions have to be nonnegative")
    return tuple(float(a) for a in value)


def scenario_from_dict(document: Mapping[str, Any]) -> RadarScenario:
    """
    Builds a radar scenario from a parsed document

    Raises
    ------
    ConfigFieldError
        Naming the first missing or malformed field
    """
    if "gram" not in document and "channel" not in document:
        raise ConfigFieldError("gram", "missing (give 'gram' or 'channel')")
    pfa = _number(document, "pfa", 1e-5, 0.0, True)
    if pfa >= 1.0:
        raise ConfigFieldError("pfa", "has to be < 1")
    snapshots = document.get("snapshots", 1)
    if isinstance(snapshots, bool) or not isinstance(snapshots, int) or snapshots < 1:
        raise ConfigFieldError("snapshots", "expected a positive integer")
    kwargs = dict(
        mean_square_amp=_number(document, "mean_square_amp", 1.0, 0.0, False),
        snapshots=snapshots,
        noise_psd=_number(document, "noise_psd", 1.0, 0.0, True),
        pfa=pfa,
        power_budget=_number(document, "power_budget", 0.0, 0.0, False),
        allocation=_allocation(document),
    )
    try:
        if "channel" in document:
            channel = parse_matrix(document["channel"], "channel")
            return RadarScenario.from_channel(channel, **kwargs)
        gram = parse_matrix(document["gram"], "gram")
        return RadarScenario(gram=gram, **kwargs)  # type: ignore[arg-type]
    except ConfigFieldError:
        raise
    except ValueError as err:
        field = "channel" if "channel" in document else "gram"
        raise ConfigFieldError(field, str(err)) from err


def load_scenario(path: PathLike) -> RadarScenario:
    scenario = scenario_from_dict(load_document(path))
    logger.info("Loaded scenario with %s transmit antennas", scenario.n_antennas)
    return scenario


def load_comm_channel(
    source: Union[PathLike, Mapping[str, Any]], field: str = "comm_channel"
) -> CommChannel:
    """
    Communication channel from a document holding `field` (or "h_c") and an
    optional "comm_noise_psd"
    """
    document = source if isinstance(source, Mapping) else load_document(source)
    key = field if field in document else "h_c"
    if key not in document:
        raise ConfigFieldError(field, "missing")
    h_c = parse_matrix(document[key], key)
    noise = _number(document, "comm_noise_psd", 1.0, 0.0, True)
    return CommChannel(h_c, noise)
