/**
 * Typed client for the annotation service.
 *
 * Wire shapes mirror the server exactly; every non-2xx response carries a
 * `{code, message}` body that is surfaced as an ApiError.  Network-level
 * failures (fetch rejections) propagate unchanged so callers can tell
 * "server said no" apart from "server unreachable".
 */

export type Stage = "TopLevel" | "Structure" | "SimpleFine" | "ComplexFine";

export interface Rule {
  id: string;
  stage: Stage;
  verdict: string;
  prompt: string;
  example: string;
  mto_based: boolean;
}

export interface Catalog {
  version: string;
  rules: Rule[];
}

export interface CommentRef {
  id: string;
  text: string;
  position: number;
}

export interface SessionResource {
  session_id: string;
  annotator: string;
  total: number;
  decided: number;
  progress: number;
  catalog_version: string;
  next?: CommentRef;
}

export interface CreatedSession extends SessionResource {
  token: string;
}

export interface LabelPath {
  top: string;
  structure: string | null;
  fine: string | null;
  rules: string[];
}

export interface LabelResult extends SessionResource {
  path: LabelPath;
  amended: boolean;
}

export interface Disagreement {
  id: string;
  a: string;
  b: string;
}

export interface AgreementReport {
  level: string;
  partial: boolean;
  table: { a: number; b: number; c: number; d: number; n: number };
  po: number;
  pe: number;
  kappa: number;
  se: number;
  ci_low: number;
  ci_high: number;
  disagreements: Disagreement[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) return;
  let code = "unknown_error";
  let message = `HTTP ${res.status}`;
  try {
    const body = (await res.json()) as { code?: string; message?: string };
    if (body && typeof body.code === "string") code = body.code;
    if (body && typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body: keep the fallback message
  }
  throw new ApiError(res.status, code, message);
}

export interface ClientOptions {
  baseUrl?: string;
  fetchImpl?: typeof fetch;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: typeof fetch;
  private catalogEtag: string | null = null;
  private catalogCache: Catalog | null = null;

  constructor(opts: ClientOptions = {}) {
    this.baseUrl = (opts.baseUrl ?? "").replace(/\/$/, "");
    this.fetchImpl = opts.fetchImpl ?? fetch;
  }

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    await raiseForStatus(res);
    return res;
  }

  /** Catalog fetch with ETag revalidation: 304 responses reuse the cache. */
  async getCatalog(): Promise<Catalog> {
    const headers: Record<string, string> = {};
    if (this.catalogEtag && this.catalogCache) {
      headers["If-None-Match"] = this.catalogEtag;
    }
    const res = await this.fetchImpl(`${this.baseUrl}/api/catalog`, { headers });
    if (res.status === 304 && this.catalogCache) {
      return this.catalogCache;
    }
    await raiseForStatus(res);
    this.catalogEtag = res.headers.get("ETag");
    this.catalogCache = (await res.json()) as Catalog;
    return this.catalogCache;
  }

  async listSessions(): Promise<{ sessions: SessionResource[] }> {
    const res = await this.request("/api/sessions");
    return (await res.json()) as { sessions: SessionResource[] };
  }

  async createSession(
    annotator: string,
    comments: { id: string; text: string }[],
    sessionId?: string,
  ): Promise<CreatedSession> {
    const body: Record<string, unknown> = { annotator, comments };
    if (sessionId !== undefined) body.session_id = sessionId;
    const res = await this.request("/api/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await res.json()) as CreatedSession;
  }

  async getSession(sessionId: string): Promise<SessionResource> {
    const res = await this.request(`/api/session/${encodeURIComponent(sessionId)}`);
    return (await res.json()) as SessionResource;
  }

  async getNext(
    sessionId: string,
  ): Promise<{ comment: CommentRef | null; complete: boolean }> {
    const res = await this.request(
      `/api/session/${encodeURIComponent(sessionId)}/next`,
    );
    return (await res.json()) as { comment: CommentRef | null; complete: boolean };
  }

  async label(
    sessionId: string,
    token: string,
    commentId: string,
    rules: string[],
    opts: { amend?: boolean; path?: { top: string; structure?: string | null; fine?: string | null } } = {},
  ): Promise<LabelResult> {
    const query = opts.amend ? "?amend=true" : "";
    const body: Record<string, unknown> = { comment_id: commentId, rules };
    if (opts.path) body.path = opts.path;
    const res = await this.request(
      `/api/session/${encodeURIComponent(sessionId)}/label${query}`,
      {
        method: "POST",
        headers: {
          "Content-Type": "application/json",
          "X-Session-Token": token,
        },
        body: JSON.stringify(body),
      },
    );
    return (await res.json()) as LabelResult;
  }

  async getAgreement(
    a: string,
    b: string,
    level: "top" | "fine" = "top",
  ): Promise<AgreementReport> {
    const params = new URLSearchParams({ a, b, level });
    const res = await this.request(`/api/agreement?${params}`);
    return (await res.json()) as AgreementReport;
  }
}
