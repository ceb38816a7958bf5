"""Scenario evaluation behind the service and the CLI.

Loads the trained classifiers and parameters once, then evaluates
ScenarioRequests deterministically: payoff table, Nash solution, per-attacker
breakdowns, and the block-probability curve for plotting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..block_theory import (
    DEFAULT_PARAMS,
    TheoryParams,
    block_curve,
    shot_block_probability,
)
from ..game import build_payoff_table, solve
from ..ingest import FreezeFrame, PlayerSnapshot
from ..metrics import Scenario, block_feature_frame, xosot, xsot
from ..nnet import MlpModel
from ..pitch_control import ControlParams
from .schemas import (
    AttackerRow,
    MixedModel,
    NashModel,
    OptionsModel,
    PayoffModel,
    ScenarioRequest,
    ScenarioResponse,
)

ROUND_DIGITS = 6


def _r(x: float) -> float:
    return round(float(x), ROUND_DIGITS)


def bundled_path(*parts: str) -> Path:
    node = resources.files("shotgame.resources")
    for part in parts:
        node = node.joinpath(part)
    return Path(str(node))


@dataclass
class ScenarioFixture:
    id: str
    title: str
    description: str
    request: ScenarioRequest


def load_bundled_fixtures() -> list[ScenarioFixture]:
    index = json.loads(bundled_path("scenarios", "index.json").read_text())
    fixtures = []
    for entry in index["fixtures"]:
        doc = json.loads(bundled_path("scenarios", entry["file"]).read_text())
        fixtures.append(ScenarioFixture(
            id=entry["id"], title=entry["title"],
            description=entry["description"],
            request=ScenarioRequest.model_validate(doc)))
    return fixtures


class ScenarioEngine:
    """Read-only model state shared by every evaluation."""

    def __init__(self, off_model: MlpModel, block_model: MlpModel,
                 theory: TheoryParams, control: ControlParams):
        self.off_model = off_model
        self.block_model = block_model
        self.theory = theory
        self.control = control

    @classmethod
    def load(cls, models_dir: str | Path | None = None,
             theory_path: str | Path | None = None,
             control: ControlParams | None = None) -> "ScenarioEngine":
        models_dir = Path(models_dir) if models_dir else bundled_path("models")
        theory_path = Path(theory_path) if theory_path else bundled_path("theory_params.json")
        return cls(
            off_model=MlpModel.from_json(models_dir / "dnn_off.json"),
            block_model=MlpModel.from_json(models_dir / "dnn_block.json"),
            theory=TheoryParams.from_json(theory_path),
            control=control or ControlParams(),
        )

    def _scenario(self, req: ScenarioRequest, theory: TheoryParams) -> Scenario:
        players = [PlayerSnapshot(x=req.shooter.x, y=req.shooter.y,
                                  teammate=True, actor=True, keeper=False)]
        players += [PlayerSnapshot(x=p.x, y=p.y, teammate=p.teammate,
                                   actor=False, keeper=p.keeper)
                    for p in req.players]
        frame = FreezeFrame(event_id="request", players=tuple(players))
        return Scenario(
            shooter_xy=(req.shooter.x, req.shooter.y),
            shooter_role=req.shooter.role,
            frame=frame,
            off_model=self.off_model,
            block_model=self.block_model,
            theory=theory,
            control=self.control,
        )

    def evaluate(self, req: ScenarioRequest) -> ScenarioResponse:
        theory = self.theory
        if req.options.theory_params_override is not None:
            theory = TheoryParams(**req.options.theory_params_override.model_dump())
            theory.validate()
        s = self._scenario(req, theory)
        remove = req.options.remove_closest

        payoff = build_payoff_table(s)
        nash = solve(payoff)

        # Breakdown rows reflect the requested counterfactual; the payoff
        # table always carries both columns.
        _, shooter_row = xsot(s, remove_closest=remove)
        _, best_idx, attacker_rows = xosot(s, remove_closest=remove)

        effective = block_feature_frame(s, remove)
        grid, curve = block_curve(s.shooter_xy, effective, theory)
        theory_feature = shot_block_probability(s.shooter_xy, effective, theory)

        # Frame index 0 is the injected shooter snapshot; report request indices.
        def req_index(frame_idx: int) -> int:
            return frame_idx - 1

        labels = {i: p.label for i, p in enumerate(req.players)}
        rows = [AttackerRow(
            attacker_id=-1, label=None, x=_r(shooter_row.x), y=_r(shooter_row.y),
            p_on=_r(shooter_row.p_on), p_off=_r(shooter_row.p_off),
            p_block=_r(shooter_row.p_block), p_control=None)]
        for b in attacker_rows:
            idx = req_index(b.attacker_id)
            rows.append(AttackerRow(
                attacker_id=idx, label=labels.get(idx), x=_r(b.x), y=_r(b.y),
                p_on=_r(b.p_on), p_off=_r(b.p_off), p_block=_r(b.p_block),
                p_control=_r(b.p_control)))
        rows.sort(key=lambda r: (-r.p_on, r.attacker_id))

        return ScenarioResponse(
            xsot=_r(payoff.shoot_blocking),
            xosot=_r(payoff.pass_blocking),
            best_pass_target=None if best_idx is None else req_index(best_idx),
            attackers=rows,
            payoff_table=PayoffModel(
                shoot_blocking=_r(payoff.shoot_blocking),
                shoot_not_blocking=_r(payoff.shoot_not_blocking),
                pass_blocking=_r(payoff.pass_blocking),
                pass_not_blocking=_r(payoff.pass_not_blocking)),
            nash=NashModel(
                pure=[[row, col] for row, col in nash.pure],
                mixed=None if nash.mixed is None else MixedModel(
                    p_shoot=_r(nash.mixed.p_shoot),
                    q_block=_r(nash.mixed.q_block),
                    value=_r(nash.mixed.value))),
            theory_block_feature=_r(theory_feature),
            theory_block_curve=[(_r(t), _r(v)) for t, v in zip(grid, curve)],
            options_applied=OptionsModel(
                remove_closest=remove,
                theory_params_override=req.options.theory_params_override),
        )
