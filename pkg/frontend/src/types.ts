/**
 * Wire types mirroring the scenario service schemas. The board never
 * recomputes any of these numbers; it renders exactly what the service sent.
 */

export interface ShooterSpec {
  role?: string | null;
  x: number;
  y: number;
}

export interface PlayerSpec {
  x: number;
  y: number;
  teammate: boolean;
  keeper: boolean;
  label?: string | null;
}

export interface ScenarioOptions {
  remove_closest?: boolean;
  theory_params_override?: Record<string, number> | null;
}

export interface ScenarioRequest {
  shooter: ShooterSpec;
  players: PlayerSpec[];
  options?: ScenarioOptions;
}

export interface AttackerRow {
  attacker_id: number; // -1 is the shooter, otherwise index into players
  label?: string | null;
  x: number;
  y: number;
  p_on: number;
  p_off: number;
  p_block: number;
  p_control: number | null;
}

export interface PayoffTable {
  shoot_blocking: number;
  shoot_not_blocking: number;
  pass_blocking: number;
  pass_not_blocking: number;
}

export interface MixedStrategy {
  p_shoot: number;
  q_block: number;
  value: number;
}

export interface NashSolution {
  pure: [string, string][];
  mixed: MixedStrategy | null;
}

export interface ScenarioResponse {
  schema_version: number;
  xsot: number;
  xosot: number;
  best_pass_target: number | null;
  attackers: AttackerRow[];
  payoff_table: PayoffTable;
  nash: NashSolution;
  theory_block_feature: number;
  theory_block_curve: [number, number][];
  options_applied: ScenarioOptions;
}

export interface PitchMeta {
  length: number;
  width: number;
  left_post: [number, number];
  right_post: [number, number];
  penalty_corner_low: [number, number];
  penalty_corner_high: [number, number];
}

export interface FixtureSummary {
  id: string;
  title: string;
  description: string;
}

export interface FixtureListResponse {
  schema_version: number;
  pitch: PitchMeta;
  fixtures: FixtureSummary[];
}

export interface FixtureResponse {
  schema_version: number;
  id: string;
  title: string;
  description: string;
  request: ScenarioRequest;
}
