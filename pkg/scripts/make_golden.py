"""Regenerate the reference instances in ``src/histkit/golden/``.

Usage: python scripts/make_golden.py [--check]

With ``--check`` nothing is written; the script exits non-zero if any
freshly generated file differs from the one on disk.
"""
import argparse
import math
import sys
from pathlib import Path

import numpy as np

from histkit import io
from histkit.bell import optimize_chsh_axes
from histkit.histories import History, HistoryFamily, conditional_ambiguity, frequency
from histkit.models import DoubleSlitModel, gaussian_slit_amplitudes, model_to_json
from histkit.operators import State, ket_projector
from histkit.sampling import random_projection, random_pure_state, rng_from

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "histkit" / "golden"

AMBIGUITY_SEED = 2024
WITNESS_SEED = 11


def chsh_axes():
    opt = optimize_chsh_axes(grid=24)
    if abs(opt.value - 2.0 * math.sqrt(2.0)) > 1e-9:
        raise SystemExit(f"optimizer reached {opt.value!r}, not 2√2")
    return {
        "generator": "optimize_chsh_axes(grid=24)",
        "seed": None,
        "plane": "x-z",
        "angles_deg": {k: math.degrees(a) for k, a in zip("tuvw", opt.angles)},
        "axes": {k: [float(x) for x in ax] for k, ax in zip("tuvw", opt.axes)},
        "value": opt.value,
    }


def double_slit():
    model = DoubleSlitModel(gaussian_slit_amplitudes(bins=32, width=1.5, wavenumber=1.0), 0.0)
    data = model_to_json(model)
    data.update({
        "generator": "gaussian_slit_amplitudes(bins=32, width=1.5, wavenumber=1.0)",
        "seed": None,
        "central_bin": 16,
    })
    return data


def fourier_family(d):
    omega = np.exp(2j * np.pi / d)
    vecs = [np.array([omega ** (j * k) for j in range(d)]) / math.sqrt(d) for k in range(d)]
    return [ket_projector(v) for v in vecs]


def ambiguity():
    """Computational-basis slot followed by a Fourier-basis slot on C^3.

    Pure states are drawn until the spread exceeds 0.01 and the
    no-slot normalization pushes candidate c above 1.
    """
    rng = rng_from(AMBIGUITY_SEED)
    basis = [np.diag(np.eye(3)[k]) for k in range(3)]
    family = HistoryFamily([basis, fourier_family(3)], selected=(1, 1))
    for attempt in range(10000):
        psi = random_pure_state(rng, 3)
        amb = conditional_ambiguity(psi, family, 1)
        if amb.max_spread > 0.01 and amb.candidate_c is not None and amb.candidate_c > 1.0:
            return {
                "generator": "random_pure_state(default_rng(seed), 3), first draw with spread > 0.01 and c > 1",
                "seed": AMBIGUITY_SEED,
                "draw": attempt,
                "state": io.state_to_json(psi),
                "family": io.family_to_json(family),
                "slot": 1,
                "candidates": {"a": amb.candidate_a, "b": amb.candidate_b, "c": amb.candidate_c},
                "max_spread": amb.max_spread,
            }
    raise SystemExit("no ambiguity witness found")


def zero_one_witness():
    rng = rng_from(WITNESS_SEED)
    for attempt in range(10000):
        psi = random_pure_state(rng, 4)
        events = [random_projection(rng, 4, rank=2) for _ in range(2)]
        f = frequency(psi, events)
        if 0.1 < f < 0.9:
            return {
                "generator": "random_pure_state(rng, 4) then two random_projection(rng, 4, rank=2)",
                "seed": WITNESS_SEED,
                "draw": attempt,
                "state": io.state_to_json(psi),
                "history": io.history_to_json(History(events)),
                "frequency": f,
            }
    raise SystemExit("no witness found")


BUILDERS = {
    "chsh_optimal_axes": chsh_axes,
    "double_slit": double_slit,
    "ambiguity": ambiguity,
    "zero_one_witness": zero_one_witness,
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare against files on disk instead of writing")
    args = ap.parse_args(argv)
    GOLDEN.mkdir(parents=True, exist_ok=True)
    stale = []
    for name, build in BUILDERS.items():
        text = io.dumps(build())
        path = GOLDEN / f"{name}.json"
        if args.check:
            if not path.exists() or path.read_text(encoding="utf-8") != text:
                stale.append(name)
        else:
            path.write_text(text, encoding="utf-8")
            print(f"wrote {path}")
    if stale:
        print("stale golden files: " + ", ".join(stale))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
