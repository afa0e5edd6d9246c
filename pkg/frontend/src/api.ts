import type {
  BarriersJson,
  RegionsJson,
  ScenarioJson,
  SessionCreated,
  StepResponse,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

// Thin typed client; fetch is injectable so tests can replay canned traffic.
export class Client {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body.code ?? "error", body.message ?? "request failed");
    }
    return body as T;
  }

  scenario(): Promise<ScenarioJson> {
    return this.request("/api/scenario");
  }

  classification(): Promise<{ case: string }> {
    return this.request("/api/classification");
  }

  regions(): Promise<RegionsJson> {
    return this.request("/api/regions");
  }

  barriers(): Promise<BarriersJson> {
    return this.request("/api/barriers");
  }

  createSession(x0: [number, number]): Promise<SessionCreated> {
    return this.request("/api/session", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ x0 }),
    });
  }

  step(id: string, u: number, dt: number): Promise<StepResponse> {
    return this.request(`/api/session/${id}/step`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ u, dt }),
    });
  }

  reset(id: string, x0: [number, number]): Promise<SessionCreated> {
    return this.request(`/api/session/${id}/reset`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ x0 }),
    });
  }
}
