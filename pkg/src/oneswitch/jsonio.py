"""JSON forms of models, sequences and lotteries.

    model     {"utility": {"power": gamma}, "discount": {<family>: {...}}}
    sequence  {"outcomes": [...], "times": [...]}
    lotteries {"lotteries": [{"support": [{"x": .., "p": ..}, ...]}, ...], "times": [...]}
"""

from __future__ import annotations

from oneswitch.core import DatedSequence, Lottery, PowerUtility, PreferenceModel, make_sequence
from oneswitch.discount import to_json as discount_to_json
from oneswitch.discount import validate


class SchemaError(ValueError):
    """Structurally malformed JSON input (wrong or missing fields)."""


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    return obj[key]


def utility_from_json(obj) -> PowerUtility:
    if not isinstance(obj, dict) or set(obj) - {"power", "scale"} or "power" not in obj:
        raise SchemaError('utility must look like {"power": gamma}')
    return PowerUtility(float(obj["power"]), float(obj.get("scale", 1.0)))


def model_from_json(obj) -> PreferenceModel:
    """Parse a model; a bare discount object gets linear utility."""
    if isinstance(obj, dict) and "discount" in obj:
        u = utility_from_json(obj["utility"]) if "utility" in obj else PowerUtility()
        return PreferenceModel(u, validate(obj["discount"]))
    return PreferenceModel(PowerUtility(), validate(obj))


def model_to_json(model: PreferenceModel) -> dict:
    u = {"power": model.utility.gamma}
    if model.utility.scale != 1.0:
        u["scale"] = model.utility.scale
    return {"utility": u, "discount": discount_to_json(model.discount)}


def lottery_from_json(obj) -> Lottery:
    support = _require(obj, "support", "lottery")
    if not isinstance(support, list):
        raise SchemaError("lottery support must be a list")
    pairs = [(_require(a, "x", "lottery atom"), _require(a, "p", "lottery atom")) for a in support]
    return Lottery.of(pairs)


def lottery_to_json(L: Lottery) -> dict:
    return {"support": [{"x": x, "p": p} for x, p in L.support]}


def sequence_from_json(obj) -> DatedSequence:
    times = _require(obj, "times", "sequence")
    if "lotteries" in obj:
        return make_sequence([lottery_from_json(L) for L in obj["lotteries"]], times)
    return make_sequence(_require(obj, "outcomes", "sequence"), times)


def sequence_to_json(seq: DatedSequence) -> dict:
    if seq.is_lottery_sequence:
        return {"lotteries": [lottery_to_json(L) for L in seq.outcomes], "times": list(seq.times)}
    return {"outcomes": list(seq.outcomes), "times": list(seq.times)}
