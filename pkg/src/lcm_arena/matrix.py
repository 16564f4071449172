"""The sixteen model-separation relations as machine-checked witness runs.

Each cell pairs positive witnesses (a run that meets its problem's monitor
on the stronger side) with negative witnesses (the matching adversary or
visibility gap defeating the same rule on the weaker side). The table
reports witnesses, not proofs: a red cell means an outcome diverged from
the expected one, a green cell means the recorded separations reproduce.

All instance parameters are pinned so the table is identical on every run:
angle equalization with 30/60 degrees, arm 2, base 6, gap 0.5; oscillation
with d=3; rendezvous with d0=4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import BuiltRun, RunConfig, build
from .engine import run
from .problems import Verdict, VerdictKind

_AE_PARAMS = {
    "theta1": math.pi / 6,
    "theta2": math.pi / 3,
    "ab": 2.0,
    "bc": 6.0,
    "cd": 2.0,
    "side": "same",
}
_AE_GAP_PARAMS = {**_AE_PARAMS, "vis": "limited", "epsilon": 0.5}

MODELS = ("oblot", "fsta", "fcom", "lumi")
_EQOSC_ALGO = {"fsta": "eo-sta", "fcom": "eo-com", "lumi": "eo-sta"}


@dataclass(frozen=True)
class WitnessRun:
    label: str
    config: RunConfig
    expected: VerdictKind
    observed: Verdict | None = None

    @property
    def ok(self) -> bool:
        return self.observed is not None and self.observed.kind is self.expected


@dataclass(frozen=True)
class MatrixCell:
    result_id: int
    relation: str
    witnesses: tuple[WitnessRun, ...]

    @property
    def ok(self) -> bool:
        return all(w.ok for w in self.witnesses)


def _ae_solved(model: str, sched: str) -> WitnessRun:
    return WitnessRun(
        f"ae full-vis {sched} solves",
        RunConfig("ae", "ae-fv", model, sched, params=dict(_AE_PARAMS), horizon=20),
        VerdictKind.SOLVED,
    )


def _ae_blind(model: str, sched: str) -> WitnessRun:
    return WitnessRun(
        f"ae visibility gap starves {sched}",
        RunConfig("ae", "ae-fv", model, sched, params=dict(_AE_GAP_PARAMS), horizon=20),
        VerdictKind.INSUFFICIENT_INFO,
    )


def _eqosc_clean(model: str) -> WitnessRun:
    return WitnessRun(
        "eqosc fsynch limited-vis oscillates",
        RunConfig("eqosc", _EQOSC_ALGO[model], model, "fsynch", params={"d": 3.0}, horizon=100),
        VerdictKind.RUNNING,
    )


def _eqosc_broken(model: str, vis: str) -> WitnessRun:
    expected = (
        VerdictKind.SAFETY_VIOLATION if vis == "limited" else VerdictKind.LIVENESS_STALL
    )
    return WitnessRun(
        f"eqosc alternating terminals break {vis} vis",
        RunConfig(
            "eqosc",
            _EQOSC_ALGO[model],
            model,
            "alt-terminals",
            params={"d": 3.0, "vis": vis},
            horizon=30,
        ),
        expected,
    )


def _rendezvous_solved() -> WitnessRun:
    return WitnessRun(
        "rendezvous fsynch meets",
        RunConfig("rendezvous", "rv-mid", "oblot", "fsynch", params={"d0": 4.0}, horizon=50),
        VerdictKind.SOLVED,
    )


def _rendezvous_stalled() -> WitnessRun:
    return WitnessRun(
        "rendezvous singleton scheduler halves forever",
        RunConfig("rendezvous", "rv-mid", "oblot", "round-robin", params={"d0": 4.0}, horizon=50),
        VerdictKind.LIVENESS_STALL,
    )


def build_matrix() -> list[MatrixCell]:
    cells = []

    # 1-8: full visibility beats limited visibility, per model and scheduler
    for result_id, (model, sched_label, sched) in enumerate(
        [(m, "F", "fsynch") for m in MODELS] + [(m, "S", "round-robin") for m in MODELS],
        start=1,
    ):
        cells.append(
            MatrixCell(
                result_id,
                f"{model.upper()}[{sched_label},FV] > {model.upper()}[{sched_label},LV]",
                (_ae_solved(model, sched), _ae_blind(model, sched)),
            )
        )

    # 9-12: under limited visibility, full synchrony beats semi-synchrony
    cells.append(
        MatrixCell(9, "OBLOT[F,LV] > OBLOT[S,LV]", (_rendezvous_solved(), _rendezvous_stalled()))
    )
    for result_id, model in ((10, "fsta"), (11, "fcom"), (12, "lumi")):
        cells.append(
            MatrixCell(
                result_id,
                f"{model.upper()}[F,LV] > {model.upper()}[S,LV]",
                (_eqosc_clean(model), _eqosc_broken(model, "limited")),
            )
        )

    # 13-16: limited-vis fsynch and full-vis ssynch are incomparable
    cells.append(
        MatrixCell(
            13,
            "OBLOT[F,LV] ⊥ OBLOT[S,FV]",
            (
                _rendezvous_solved(),
                _rendezvous_stalled(),
                _ae_solved("oblot", "round-robin"),
                _ae_blind("oblot", "fsynch"),
            ),
        )
    )
    for result_id, model in ((14, "fsta"), (15, "fcom"), (16, "lumi")):
        cells.append(
            MatrixCell(
                result_id,
                f"{model.upper()}[F,LV] ⊥ {model.upper()}[S,FV]",
                (
                    _eqosc_clean(model),
                    _eqosc_broken(model, "full"),
                    _ae_solved(model, "round-robin"),
                    _ae_blind(model, "fsynch"),
                ),
            )
        )
    return cells


def run_matrix() -> list[MatrixCell]:
    out = []
    for cell in build_matrix():
        witnesses = []
        for w in cell.witnesses:
            built: BuiltRun = build(w.config)
            result = run(
                built.instance,
                built.algorithm,
                built.scheduler,
                built.run_model,
                built.frames,
            )
            witnesses.append(
                WitnessRun(w.label, w.config, w.expected, observed=result.verdict)
            )
        out.append(MatrixCell(cell.result_id, cell.relation, tuple(witnesses)))
    return out


def render_table(cells: list[MatrixCell]) -> str:
    lines = [
        "model-separation witness matrix (witnesses, not proofs)",
        "",
        f"{'id':>3}  {'relation':<28} {'status':<6} witnesses",
    ]
    for cell in cells:
        status = "pass" if cell.ok else "FAIL"
        detail = "; ".join(
            f"{w.label}: {'ok' if w.ok else f'expected {w.expected.value}, got {w.observed.encode() if w.observed else 'nothing'}'}"
            for w in cell.witnesses
        )
        lines.append(f"{cell.result_id:>3}  {cell.relation:<28} {status:<6} {detail}")
    passed = sum(1 for c in cells if c.ok)
    lines.append("")
    lines.append(f"{passed}/{len(cells)} relations witnessed")
    return "\n".join(lines)
