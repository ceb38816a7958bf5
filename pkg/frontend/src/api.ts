/** Thin HTTP client for the scenario service. */

import type {
  FixtureListResponse,
  FixtureResponse,
  ScenarioRequest,
  ScenarioResponse,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly fieldPath: string | null = null,
  ) {
    super(message);
  }

  /** 4xx responses mean the request was bad; everything else is the service. */
  get isClientError(): boolean {
    return this.status >= 400 && this.status < 500;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) {
      throw new ServiceError(`GET ${path} failed`, resp.status);
    }
    return (await resp.json()) as T;
  }

  listFixtures(): Promise<FixtureListResponse> {
    return this.getJson<FixtureListResponse>("/fixtures");
  }

  getFixture(id: string): Promise<FixtureResponse> {
    return this.getJson<FixtureResponse>(`/fixtures/${id}`);
  }

  async evaluate(
    request: ScenarioRequest,
    signal?: AbortSignal,
  ): Promise<ScenarioResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/scenario/evaluate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
      signal,
    });
    if (!resp.ok) {
      let fieldPath: string | null = null;
      let message = `evaluate failed with status ${resp.status}`;
      try {
        const body = await resp.json();
        const detail = Array.isArray(body.detail) ? body.detail[0] : null;
        if (detail?.loc) {
          fieldPath = detail.loc.join(".");
          message = `${fieldPath}: ${detail.msg}`;
        }
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ServiceError(message, resp.status, fieldPath);
    }
    return (await resp.json()) as ScenarioResponse;
  }
}
