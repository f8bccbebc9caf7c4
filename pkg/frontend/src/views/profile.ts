/**
 * Profile view: personal details, the user's posts, and the
 * "click to check current location" button that reveals the friend's
 * current city/country with a single map marker.
 */

import { ApiError, GeosocialApi } from "../api.js";
import { el } from "../dom.js";
import { createMapPanel } from "../map/tiles.js";

export const LOCATION_BUTTON_TEXT = "click to check current location";
export const NO_FIX_TEXT = "no location yet";

export function profileView(api: GeosocialApi, userId: string): HTMLElement {
  const details = el("dl", { class: "profile-details", "data-role": "profile-details" });
  const posts = el("ul", { class: "feed", "data-role": "profile-posts" });
  const locationText = el("p", { class: "location-caption", "data-role": "location-caption" });
  const mapSlot = el("div", { "data-role": "location-map" });

  void (async () => {
    try {
      const profile = await api.getUser(userId);
      details.append(
        el("dt", {}, ["Name"]),
        el("dd", {}, [`${profile.first_name} ${profile.last_name}`]),
        el("dt", {}, ["Country"]),
        el("dd", {}, [profile.country]),
      );
      const feed = await api.listPosts(userId);
      for (const post of [...feed.posts].reverse()) {
        posts.append(el("li", { class: "post" }, [post.body || `[media] ${post.media_ref}`]));
      }
    } catch (error) {
      details.textContent = error instanceof ApiError ? error.message : "profile unavailable";
    }
  })();

  const button = el("button", { type: "button", "data-role": "location-button" }, [
    LOCATION_BUTTON_TEXT,
  ]);
  button.addEventListener("click", async () => {
    locationText.textContent = "";
    mapSlot.replaceChildren();
    try {
      const location = await api.getLocation(userId);
      locationText.textContent = `${location.city}, ${location.country}`;
      const panel = createMapPanel(480, 320);
      panel.setMarkers([
        { lat: location.lat, lon: location.lon, label: `${location.city}, ${location.country}` },
      ]);
      mapSlot.append(panel.element);
    } catch (error) {
      if (error instanceof ApiError && error.code === "no_fix_yet") {
        locationText.textContent = NO_FIX_TEXT;
      } else {
        locationText.textContent = error instanceof ApiError ? error.message : "location unavailable";
      }
    }
  });

  return el("section", { class: "view view-profile" }, [
    el("h1", {}, ["Profile"]),
    details,
    button,
    locationText,
    mapSlot,
    el("h2", {}, ["Posts"]),
    posts,
  ]);
}
