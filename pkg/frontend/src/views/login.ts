/** Login form; on success stores the session and enters the home view. */

import { ApiError, GeosocialApi } from "../api.js";
import { el } from "../dom.js";
import { setSession } from "../session.js";

export function loginView(api: GeosocialApi, navigate: (route: string) => void): HTMLElement {
  const status = el("p", { class: "status", "data-role": "status" });
  const email = el("input", { name: "email", type: "email" });
  const password = el("input", { name: "password", type: "password" });

  const form = el("form", { id: "login-form" }, [
    el("label", { class: "form-row" }, ["Email address", email]),
    el("label", { class: "form-row" }, ["Password", password]),
    el("button", { type: "submit" }, ["Log in"]),
  ]);

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      const session = await api.login(email.value, password.value);
      api.token = session.token;
      const me = await api.searchProfiles(email.value, 1);
      setSession(session.token, me.matches[0]?.user_id ?? "");
      navigate("home");
    } catch (error) {
      // the server answers unknown email and wrong password identically
      status.textContent = error instanceof ApiError ? error.message : "login failed";
    }
  });

  return el("section", { class: "view view-login" }, [
    el("h1", {}, ["Log in"]),
    form,
    status,
    el("p", {}, [
      "No account yet? ",
      el("a", { href: "#/signup" }, ["Sign up"]),
    ]),
  ]);
}
