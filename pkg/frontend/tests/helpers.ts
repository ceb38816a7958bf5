import type {
  ScenarioRequest,
  ScenarioResponse,
} from "../src/types.js";

export function sampleRequest(): ScenarioRequest {
  return {
    shooter: { role: "Center Forward", x: 104, y: 42 },
    players: [
      { x: 115, y: 33, teammate: true, keeper: false, label: "9" },
      { x: 94.5, y: 31, teammate: true, keeper: false, label: "20" },
      { x: 107.5, y: 41.5, teammate: false, keeper: false, label: "d1" },
      { x: 118.9, y: 40.3, teammate: false, keeper: true, label: "gk" },
    ],
    options: { remove_closest: false },
  };
}

export function sampleResponse(): ScenarioResponse {
  return {
    schema_version: 1,
    xsot: 0.066423,
    xosot: 0.076891,
    best_pass_target: 0,
    attackers: [
      { attacker_id: 0, label: "9", x: 115, y: 33, p_on: 0.0769,
        p_off: 0.449, p_block: 0.432, p_control: 0.608 },
      { attacker_id: -1, label: null, x: 104, y: 42, p_on: 0.0664,
        p_off: 0.451, p_block: 0.483, p_control: null },
      { attacker_id: 1, label: "20", x: 94.5, y: 31, p_on: 0.0,
        p_off: 0.536, p_block: 0.572, p_control: 0.626 },
    ],
    payoff_table: {
      shoot_blocking: 0.066423,
      shoot_not_blocking: 0.187442,
      pass_blocking: 0.076891,
      pass_not_blocking: 0.076891,
    },
    nash: { pure: [["pass", "blocking"]], mixed: null },
    theory_block_feature: 0.193204,
    theory_block_curve: [[0, 0.1], [1, 0.2], [2, 0.25], [2.5, 0.22]],
    options_applied: { remove_closest: false, theory_params_override: null },
  };
}
