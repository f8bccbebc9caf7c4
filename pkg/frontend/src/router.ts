/**
 * Hash router with an authentication guard: any route other than
 * signup/login redirects to login while no session token is stored.
 */

import { GeosocialApi } from "./api.js";
import { clear } from "./dom.js";
import { getToken } from "./session.js";
import { chatView } from "./views/chat.js";
import { homeView } from "./views/home.js";
import { loginView } from "./views/login.js";
import { mapView } from "./views/map.js";
import { profileView } from "./views/profile.js";
import { signupView } from "./views/signup.js";

export const PUBLIC_ROUTES = new Set(["signup", "login"]);

export interface Router {
  navigate(route: string): void;
  current(): string;
  destroy(): void;
}

export function resolveRoute(hash: string, authenticated: boolean): string {
  const route = hash.replace(/^#\//, "") || (authenticated ? "home" : "login");
  const base = route.split("/")[0];
  if (!PUBLIC_ROUTES.has(base) && !authenticated) return "login";
  return route;
}

export function createRouter(
  api: GeosocialApi,
  root: HTMLElement,
  friendsForMap: () => string[] = () => [],
): Router {
  let cleanup: (() => void) | null = null;
  let currentRoute = "";

  function render() {
    cleanup?.();
    cleanup = null;
    api.token = getToken();
    currentRoute = resolveRoute(window.location.hash, api.token !== null);
    const [base, arg] = currentRoute.split("/");
    clear(root);
    if (base === "signup") {
      root.append(signupView(api, navigate));
    } else if (base === "login") {
      root.append(loginView(api, navigate));
    } else if (base === "home") {
      root.append(homeView(api, navigate));
    } else if (base === "profile" && arg) {
      root.append(profileView(api, arg));
    } else if (base === "chat" && arg) {
      const view = chatView(api, arg);
      cleanup = view.destroy;
      root.append(view.element);
    } else if (base === "map") {
      const view = mapView(api, friendsForMap());
      cleanup = view.destroy;
      root.append(view.element);
    } else {
      root.append(homeView(api, navigate));
    }
  }

  function navigate(route: string) {
    if (window.location.hash === `#/${route}`) {
      render();
    } else {
      window.location.hash = `#/${route}`;
    }
  }

  window.addEventListener("hashchange", render);
  render();

  return {
    navigate,
    current: () => currentRoute,
    destroy: () => {
      cleanup?.();
      window.removeEventListener("hashchange", render);
    },
  };
}
