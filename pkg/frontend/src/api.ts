// Typed client for the personabot HTTP API. Every UI behaviour goes through
// these calls; the client renders only what the server hands back.

export interface PersonaView {
  robot_id: string;
  motto: string;
  extraversion: number;
  agreeableness: number;
  neuroticism: number;
  conscientiousness: number;
  openness: number;
}

export interface ActView {
  kind: string;
  slots: Record<string, string>;
}

export interface SessionView {
  session_id: string;
  user_id: string;
  robot: string;
  session_index: number;
  created_at: string;
  phase: string;
  acts: ActView[];
  text: string;
}

export interface MessageReply {
  text: string;
  acts: ActView[];
  phase: string;
}

export interface RecordView {
  family: string;
  param: string | null;
  value: string;
  probability: number;
  status: string;
  observed_valence: string | null;
  session_observed: number;
}

export interface ModelView {
  user_id: string;
  robot: string;
  records: RecordView[];
}

export interface TurnView {
  turn: number;
  speaker: string;
  text: string;
  acts: ActView[];
  side_channel: Record<string, unknown> | null;
}

export interface TranscriptView {
  session_id: string;
  user_id: string;
  robot: string;
  turns: TurnView[];
}

export interface SidePayload {
  emotion_valence?: "positive" | "neutral" | "negative";
  attire?: Record<string, string>;
}

export class ApiError extends Error {
  code: string;
  status: number;
  sessionId?: string;

  constructor(status: number, code: string, message: string, sessionId?: string) {
    super(message);
    this.status = status;
    this.code = code;
    this.sessionId = sessionId;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  let sessionId: string | undefined;
  try {
    const body = await response.json();
    if (body && typeof body === "object") {
      code = body.code ?? code;
      message = body.message ?? message;
      sessionId = body.session_id;
    }
  } catch {
    // non-JSON error body; keep the HTTP status message
  }
  return new ApiError(response.status, code, message, sessionId);
}

export class Client {
  constructor(private baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  personas(): Promise<PersonaView[]> {
    return this.request("GET", "/personas");
  }

  createUser(displayName: string): Promise<{ user_id: string; display_name: string }> {
    return this.request("POST", "/users", { display_name: displayName });
  }

  openSession(userId: string, robot: string): Promise<SessionView> {
    return this.request("POST", "/sessions", { user_id: userId, robot });
  }

  sendMessage(sessionId: string, text: string, side: SidePayload): Promise<MessageReply> {
    return this.request("POST", `/sessions/${sessionId}/messages`, { text, ...side });
  }

  model(userId: string, robot: string): Promise<ModelView> {
    return this.request("GET", `/users/${userId}/models/${robot}`);
  }

  transcript(sessionId: string): Promise<TranscriptView> {
    return this.request("GET", `/sessions/${sessionId}/transcript`);
  }
}
