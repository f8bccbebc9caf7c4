import { beforeEach, describe, expect, it } from "vitest";

import { GeosocialApi } from "../src/api.js";
import { CONNECTIVITY_ERROR_TEXT, composer } from "../src/views/home.js";
import { deadFetch, fakeFetch, flush, Route } from "./helpers.js";

function healthyRoutes(posted: string[]): Route[] {
  return [
    { method: "GET", pattern: /\/health$/, handler: () => ({ status: 200, json: { status: "ok" } }) },
    {
      method: "POST",
      pattern: /\/posts$/,
      handler: (_match, body) => {
        posted.push((body as { body: string }).body);
        return { status: 201, json: { post_id: "p1", message: "post has been sent" } };
      },
    },
  ];
}

describe("post composer", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("shows an error banner and sends nothing when the service is down", async () => {
    const form = composer(new GeosocialApi("", deadFetch()), () => {});
    document.body.append(form);
    form.querySelector("textarea")!.value = "hello";
    form.querySelector("textarea")!.dispatchEvent(new Event("input"));
    form.dispatchEvent(new Event("submit"));
    await flush();
    const banner = form.querySelector('[data-role="composer-banner"]')!;
    expect(banner.textContent).toBe(CONNECTIVITY_ERROR_TEXT);
    expect(banner.classList.contains("banner-error")).toBe(true);
  });

  it("posts and confirms when the probe succeeds", async () => {
    const posted: string[] = [];
    let refreshed = 0;
    const form = composer(new GeosocialApi("", fakeFetch(healthyRoutes(posted))), () => {
      refreshed += 1;
    });
    document.body.append(form);
    form.querySelector("textarea")!.value = "first post";
    form.querySelector("textarea")!.dispatchEvent(new Event("input"));
    form.dispatchEvent(new Event("submit"));
    await flush();
    expect(posted).toEqual(["first post"]);
    expect(form.querySelector('[data-role="composer-banner"]')!.textContent).toBe(
      "post has been sent",
    );
    expect(refreshed).toBe(1);
  });

  it("disables submit while both body and media are empty", () => {
    const form = composer(new GeosocialApi("", fakeFetch([])), () => {});
    document.body.append(form);
    const button = form.querySelector("button")!;
    expect(button.disabled).toBe(true);
    const textarea = form.querySelector("textarea")!;
    textarea.value = "text";
    textarea.dispatchEvent(new Event("input"));
    expect(button.disabled).toBe(false);
    textarea.value = "";
    textarea.dispatchEvent(new Event("input"));
    expect(button.disabled).toBe(true);
  });
});
