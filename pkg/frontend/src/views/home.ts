/**
 * Home view: post composer plus the user's own feed.
 *
 * Submitting first probes the health endpoint; if the service is
 * unreachable an error banner is shown and nothing is sent, otherwise
 * the post goes up and the server's confirmation is displayed.
 */

import { ApiError, GeosocialApi } from "../api.js";
import { clear, el } from "../dom.js";
import { getUserId } from "../session.js";

export const CONNECTIVITY_ERROR_TEXT = "network connectivity is poor; post not sent";

export function composer(api: GeosocialApi, onPosted: () => void): HTMLElement {
  const body = el("textarea", { name: "body", rows: "3", placeholder: "What is happening?" });
  const media = el("input", { name: "media_ref", type: "text", placeholder: "media reference (optional)" });
  const banner = el("p", { class: "banner", "data-role": "composer-banner" });
  const submit = el("button", { type: "submit" }, ["Post"]) as HTMLButtonElement;

  const refreshDisabled = () => {
    submit.disabled = body.value.trim() === "" && media.value.trim() === "";
  };
  refreshDisabled();
  body.addEventListener("input", refreshDisabled);
  media.addEventListener("input", refreshDisabled);

  const form = el("form", { id: "composer" }, [body, media, submit, banner]);
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    banner.textContent = "";
    banner.classList.remove("banner-error");
    if (!(await api.health())) {
      banner.textContent = CONNECTIVITY_ERROR_TEXT;
      banner.classList.add("banner-error");
      return;
    }
    try {
      const result = await api.createPost(body.value, media.value.trim() || undefined);
      banner.textContent = result.message; // "post has been sent"
      body.value = "";
      media.value = "";
      refreshDisabled();
      onPosted();
    } catch (error) {
      banner.classList.add("banner-error");
      banner.textContent = error instanceof ApiError ? error.message : "post failed";
    }
  });
  return form;
}

export function homeView(api: GeosocialApi, navigate: (route: string) => void): HTMLElement {
  const feed = el("ul", { class: "feed", "data-role": "feed" });

  async function refreshFeed() {
    const me = getUserId();
    if (!me) return;
    try {
      const result = await api.listPosts(me);
      clear(feed);
      for (const post of [...result.posts].reverse()) {
        feed.append(el("li", { class: "post" }, [post.body || `[media] ${post.media_ref}`]));
      }
    } catch {
      // feed refresh is best effort; the composer banner reports errors
    }
  }

  void refreshFeed();

  return el("section", { class: "view view-home" }, [
    el("h1", {}, ["Home"]),
    el("nav", {}, [
      el("a", { href: "#/map" }, ["Friends map"]),
      " | ",
      el("a", { href: `#/profile/${getUserId() ?? ""}` }, ["My profile"]),
    ]),
    composer(api, refreshFeed),
    feed,
  ]);
}
