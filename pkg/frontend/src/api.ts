import type {
  BoardPayload,
  DietPayload,
  EventAck,
  EventPayload,
  RecommendationsPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
    public readonly code: string = "error",
    public readonly field: string | null = null
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the session/recommendation endpoints. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init)
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const err = body?.error ?? {};
      throw new ApiError(
        err.message ?? `request failed with status ${response.status}`,
        response.status,
        err.code,
        err.field ?? null
      );
    }
    return body as T;
  }

  createSession(query: string): Promise<RecommendationsPayload> {
    return this.request("/api/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ query }),
    });
  }

  getRecommendations(sessionId: string, k = 20): Promise<RecommendationsPayload> {
    return this.request(`/api/sessions/${sessionId}/recommendations?k=${k}`);
  }

  postEvent(sessionId: string, event: EventPayload): Promise<EventAck> {
    return this.request(`/api/sessions/${sessionId}/events`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(event),
    });
  }

  getDiet(sessionId: string): Promise<DietPayload> {
    return this.request(`/api/sessions/${sessionId}/diet`);
  }

  getBoard(name: string): Promise<BoardPayload> {
    return this.request(`/api/boards/${encodeURIComponent(name)}`);
  }

  imageUrl(imageId: string): string {
    return `${this.baseUrl}/api/images/${imageId}/raw`;
  }
}
