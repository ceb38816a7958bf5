"""Request/response models for the scenario evaluation service."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

SCHEMA_VERSION = 1


class ShooterModel(BaseModel):
    role: str | None = None
    x: float = Field(ge=0.0, le=120.0)
    y: float = Field(ge=0.0, le=80.0)


class PlayerModel(BaseModel):
    x: float = Field(ge=0.0, le=120.0)
    y: float = Field(ge=0.0, le=80.0)
    teammate: bool
    keeper: bool = False
    label: str | None = None


class TheoryParamsModel(BaseModel):
    c1: float = Field(gt=0)
    c2: float = Field(ge=0)
    c3: float = Field(gt=0, le=1)
    c4: float = Field(gt=0)
    a: float = Field(lt=0)


class OptionsModel(BaseModel):
    remove_closest: bool = False
    theory_params_override: TheoryParamsModel | None = None


class ScenarioRequest(BaseModel):
    shooter: ShooterModel
    players: list[PlayerModel] = Field(default_factory=list)
    options: OptionsModel = Field(default_factory=OptionsModel)

    @model_validator(mode="after")
    def _one_keeper_per_team(self) -> "ScenarioRequest":
        for side in (True, False):
            keepers = sum(1 for p in self.players if p.keeper and p.teammate == side)
            if keepers > 1:
                raise ValueError(f"more than one keeper on the "
                                 f"{'attacking' if side else 'defending'} side")
        return self


class AttackerRow(BaseModel):
    attacker_id: int  # index into the request players list; -1 is the shooter
    label: str | None = None
    x: float
    y: float
    p_on: float
    p_off: float
    p_block: float
    p_control: float | None = None  # absent for the shooter


class PayoffModel(BaseModel):
    shoot_blocking: float
    shoot_not_blocking: float
    pass_blocking: float
    pass_not_blocking: float


class MixedModel(BaseModel):
    p_shoot: float
    q_block: float
    value: float


class NashModel(BaseModel):
    pure: list[list[str]]
    mixed: MixedModel | None = None


class ScenarioResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    xsot: float
    xosot: float
    best_pass_target: int | None
    attackers: list[AttackerRow]
    payoff_table: PayoffModel
    nash: NashModel
    theory_block_feature: float
    theory_block_curve: list[tuple[float, float]]
    options_applied: OptionsModel


class FixtureSummary(BaseModel):
    id: str
    title: str
    description: str


class PitchMeta(BaseModel):
    length: float = 120.0
    width: float = 80.0
    left_post: tuple[float, float] = (120.0, 36.0)
    right_post: tuple[float, float] = (120.0, 44.0)
    penalty_corner_low: tuple[float, float] = (120.0, 18.0)
    penalty_corner_high: tuple[float, float] = (120.0, 62.0)


class FixtureListResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    pitch: PitchMeta = Field(default_factory=PitchMeta)
    fixtures: list[FixtureSummary]


class FixtureResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    id: str
    title: str
    description: str
    request: ScenarioRequest


class HealthResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    status: str
    version: str
