/**
 * Signup form: exactly the seven registration fields. Client-side
 * checks mirror the server rules (password of at least nine
 * characters, dotted email domain); the server's welcome text is shown
 * verbatim before redirecting to the login view.
 */

import { ApiError, GeosocialApi, SignupFields } from "../api.js";
import { el } from "../dom.js";

export const SIGNUP_FIELDS: { name: keyof SignupFields; label: string; type: string }[] = [
  { name: "first_name", label: "First name", type: "text" },
  { name: "last_name", label: "Last name", type: "text" },
  { name: "password", label: "Password", type: "password" },
  { name: "email", label: "Email address", type: "email" },
  { name: "country", label: "Country", type: "text" },
  { name: "gender", label: "Gender", type: "text" },
  { name: "date_of_birth", label: "Date of birth", type: "date" },
];

export const PASSWORD_MIN_LENGTH = 9;

export function passwordTooShort(value: string): boolean {
  return value.length < PASSWORD_MIN_LENGTH;
}

export function emailLooksValid(value: string): boolean {
  return /^[^\s@]+@[^\s@]+\.[^\s@]+$/.test(value);
}

export function signupView(api: GeosocialApi, navigate: (route: string) => void): HTMLElement {
  const status = el("p", { class: "status", "data-role": "status" });
  const inputs = new Map<string, HTMLInputElement>();

  const rows = SIGNUP_FIELDS.map(({ name, label, type }) => {
    const input = el("input", { name, type, "data-field": name });
    inputs.set(name, input);
    const error = el("span", { class: "field-error", "data-error-for": name });
    if (name === "password") {
      input.addEventListener("input", () => {
        error.textContent = passwordTooShort(input.value)
          ? `too short: at least ${PASSWORD_MIN_LENGTH} characters`
          : "";
      });
    }
    if (name === "email") {
      input.addEventListener("input", () => {
        error.textContent =
          input.value && !emailLooksValid(input.value) ? "not a valid email address" : "";
      });
    }
    return el("label", { class: "form-row" }, [label, input, error]);
  });

  const form = el("form", { id: "signup-form" }, [
    ...rows,
    el("button", { type: "submit" }, ["Sign up"]),
  ]);

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const fields = Object.fromEntries(
      [...inputs.entries()].map(([name, input]) => [name, input.value]),
    ) as unknown as SignupFields;
    if (passwordTooShort(fields.password)) {
      status.textContent = `too short: at least ${PASSWORD_MIN_LENGTH} characters`;
      return;
    }
    try {
      const result = await api.signup(fields);
      status.textContent = result.message; // exact server text
      setTimeout(() => navigate("login"), 600);
    } catch (error) {
      status.textContent = error instanceof ApiError ? error.message : "signup failed";
    }
  });

  return el("section", { class: "view view-signup" }, [
    el("h1", {}, ["Create your account"]),
    form,
    status,
  ]);
}
