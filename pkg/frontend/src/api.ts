/**
 * Typed client for the geosocial HTTP API.
 *
 * Every method maps to exactly one endpoint; failures throw ApiError
 * carrying the server's {code, message} payload and the HTTP status.
 */

export interface SignupFields {
  first_name: string;
  last_name: string;
  password: string;
  email: string;
  country: string;
  gender: string;
  date_of_birth: string;
}

export interface ProfileView {
  user_id: string;
  first_name: string;
  last_name: string;
  email: string;
  country: string;
  gender: string;
  date_of_birth: string;
  created_at: string;
}

export interface SearchMatch {
  user_id: string;
  display_name: string;
  country: string;
}

export interface PostView {
  post_id: string;
  author_id: string;
  body: string;
  media_ref: string | null;
  created_at: string;
}

export interface MessageView {
  message_id: string;
  sender_id: string;
  recipient_id: string;
  body: string;
  sent_at: string;
  seq: number;
}

export interface LocationView {
  lat: number;
  lon: number;
  city: string;
  country: string;
  recorded_at: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GeosocialApi {
  token: string | null = null;

  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const err = (payload ?? {}) as { code?: string; message?: string };
      throw new ApiError(response.status, err.code ?? "error", err.message ?? response.statusText);
    }
    return payload as T;
  }

  /** Connectivity probe; resolves false instead of throwing. */
  async health(): Promise<boolean> {
    try {
      const response = await this.fetchFn(this.baseUrl + "/health", { method: "GET" });
      return response.ok;
    } catch {
      return false;
    }
  }

  signup(fields: SignupFields): Promise<{ user_id: string; message: string }> {
    return this.request("POST", "/signup", fields);
  }

  login(email: string, password: string): Promise<{ token: string; expires_at: string }> {
    return this.request("POST", "/login", { email, password });
  }

  searchProfiles(q: string, limit = 20): Promise<{ matches: SearchMatch[] }> {
    const params = new URLSearchParams({ q, limit: String(limit) });
    return this.request("GET", `/profiles?${params}`);
  }

  getUser(userId: string): Promise<ProfileView> {
    return this.request("GET", `/users/${encodeURIComponent(userId)}`);
  }

  requestFriend(userId: string): Promise<{ state: string }> {
    return this.request("POST", `/friends/${encodeURIComponent(userId)}/request`);
  }

  respondFriend(userId: string, accept: boolean): Promise<{ state: string }> {
    return this.request("POST", `/friends/${encodeURIComponent(userId)}/respond`, { accept });
  }

  createPost(body: string, mediaRef?: string): Promise<{ post_id: string; message: string }> {
    return this.request("POST", "/posts", { body, media_ref: mediaRef ?? null });
  }

  listPosts(userId: string): Promise<{ posts: PostView[] }> {
    return this.request("GET", `/users/${encodeURIComponent(userId)}/posts`);
  }

  sendMessage(to: string, body: string): Promise<MessageView> {
    return this.request("POST", "/messages", { to, body });
  }

  fetchMessages(other: string, sinceSeq = 0): Promise<{ participants: string[]; messages: MessageView[] }> {
    return this.request("GET", `/messages/${encodeURIComponent(other)}?since_seq=${sinceSeq}`);
  }

  recordFix(lat: number, lon: number): Promise<{ fix_id: string }> {
    return this.request("POST", "/location/fixes", { lat, lon });
  }

  getLocation(userId: string): Promise<LocationView> {
    return this.request("GET", `/users/${encodeURIComponent(userId)}/location`);
  }
}
