"""Exact rendezvous values on the line, with and without gifts.

Numbers may be given as int, str ("p/q" or a plain decimal) or Fraction;
results come back with Fractions in place of "p/q" strings where noted.
"""

import csv
import io
import json
from fractions import Fraction

from . import _core
from ._core import ConfigError, ConsistencyError, HorizonError, ModelError, RendezvousError

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "HorizonError",
    "ModelError",
    "RendezvousError",
    "bracket",
    "check_consistency",
    "evaluate",
    "mesh",
    "reference_bundle",
    "repro",
    "solve",
    "to_fraction",
]


def _num(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a str, int or Fraction")
    return str(x)


def to_fraction(text):
    """Parse a "p/q" string (or int) into a Fraction."""
    return Fraction(text)


def solve(game, distance=16, drop1=None, drop2=None, horizon=None, mode="all",
          symmetry=False, prune_senseless=True, max_bundles=10000):
    """Optimal value (Fraction) and bundles for fixed drop times."""
    out = json.loads(_core.solve(game, _num(distance), _num(drop1), _num(drop2),
                                 _num(horizon), mode, symmetry, prune_senseless,
                                 max_bundles))
    out["value"] = Fraction(out["value"])
    return out


def _bundle_text(bundle):
    return bundle if isinstance(bundle, str) else json.dumps(bundle)


def evaluate(game, bundle, distance=16, drop1=None, drop2=None, horizon=None):
    out = json.loads(_core.evaluate(game, _num(distance), _bundle_text(bundle),
                                    _num(drop1), _num(drop2), _num(horizon)))
    out["end_times"] = [None if t is None else Fraction(t) for t in out["end_times"]]
    out["value"] = None if out["value"] is None else Fraction(out["value"])
    return out


def check_consistency(game, bundle, distance=16, drop1=None, drop2=None):
    return json.loads(_core.check_consistency(game, _num(distance), _bundle_text(bundle),
                                              _num(drop1), _num(drop2)))


def mesh(game, lo, hi, step, distance=16, workers=0):
    """Grid values as a list of dict rows with Fraction entries."""
    text = _core.mesh(game, _num(distance), _num(lo), _num(hi), _num(step), workers)
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rec = {k: Fraction(v) for k, v in row.items() if k.startswith("tau")}
        rec["value"] = Fraction(int(row["value_num"]), int(row["value_den"]))
        rows.append(rec)
    return rows


def bracket(game, lo, hi, step, distance=16, guard=False, workers=0):
    return json.loads(_core.bracket(game, _num(distance), _num(lo), _num(hi), _num(step),
                                    guard, workers))


def reference_bundle(name, distance=16):
    return json.loads(_core.reference_bundle(name, _num(distance)))


def repro(which="all", workers=0):
    return _core.repro(which, workers)
