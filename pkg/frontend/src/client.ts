import type {
  Direction,
  LevelDoc,
  PeekResponse,
  PreviewResponse,
  SessionView,
  StoryView,
  TombsView,
} from "./types";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public revision?: number,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

/** Thin typed wrapper over the session service. One method per route. */
export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let data: any = null;
    try {
      data = await res.json();
    } catch {
      data = {};
    }
    if (!res.ok) {
      throw new ServiceError(
        res.status,
        typeof data?.code === "string" ? data.code : "unknown",
        typeof data?.message === "string" ? data.message : `HTTP ${res.status}`,
        typeof data?.revision === "number" ? data.revision : undefined,
      );
    }
    return data as T;
  }

  createLevel(body: unknown): Promise<LevelDoc> {
    return this.request("POST", "/levels", body);
  }

  getLevel(levelId: string): Promise<LevelDoc> {
    return this.request("GET", `/levels/${levelId}`);
  }

  createTombsSession(levelId: string): Promise<TombsView> {
    return this.request("POST", "/sessions", { mode: "TOMBS", levelId });
  }

  createStorySession(params: {
    seed: number;
    branching: number;
    depth: number;
    sessionSeed?: number;
  }): Promise<StoryView> {
    return this.request("POST", "/sessions", { mode: "STORY", storyParams: params });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  move(sessionId: string, dir: Direction, revision?: number): Promise<TombsView> {
    const body = revision === undefined ? { dir } : { dir, revision };
    return this.request("POST", `/sessions/${sessionId}/move`, body);
  }

  flip(sessionId: string, lever: number, revision?: number): Promise<TombsView> {
    const body = revision === undefined ? { lever } : { lever, revision };
    return this.request("POST", `/sessions/${sessionId}/flip`, body);
  }

  preview(sessionId: string, lever: number): Promise<PreviewResponse> {
    return this.request("GET", `/sessions/${sessionId}/preview/${lever}`);
  }

  peek(sessionId: string, choice: number, d: number, revision?: number): Promise<PeekResponse> {
    const body = revision === undefined ? { choice, d } : { choice, d, revision };
    return this.request("POST", `/sessions/${sessionId}/peek`, body);
  }

  choose(sessionId: string, choice: number, revision?: number): Promise<StoryView> {
    const body = revision === undefined ? { choice } : { choice, revision };
    return this.request("POST", `/sessions/${sessionId}/choose`, body);
  }
}
