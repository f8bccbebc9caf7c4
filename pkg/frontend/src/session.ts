/**
 * Session token storage shared by all views. localStorage keeps one
 * login per browser; logout clears it everywhere.
 */

const TOKEN_KEY = "geosocial_token";
const USER_KEY = "geosocial_user_id";

export function getToken(): string | null {
  return localStorage.getItem(TOKEN_KEY);
}

export function setSession(token: string, userId: string): void {
  localStorage.setItem(TOKEN_KEY, token);
  localStorage.setItem(USER_KEY, userId);
}

export function getUserId(): string | null {
  return localStorage.getItem(USER_KEY);
}

export function clearSession(): void {
  localStorage.removeItem(TOKEN_KEY);
  localStorage.removeItem(USER_KEY);
}
