/**
 * Friends map: every selected friend's current city shown as a marker
 * at the same time, refreshed by polling. A search box adds friends to
 * the selection; friends whose location the server refuses (or who
 * have no fix yet) are listed as unavailable, never guessed.
 */

import { GeosocialApi } from "../api.js";
import { clear, el } from "../dom.js";
import { createMapPanel, Marker } from "../map/tiles.js";
import { getUserId } from "../session.js";

export const POLL_INTERVAL_MS = 5000;

export interface MapView {
  element: HTMLElement;
  refresh(): Promise<void>;
  addTarget(userId: string): void;
  destroy(): void;
}

export function mapView(api: GeosocialApi, friendIds: string[] = []): MapView {
  const panel = createMapPanel();
  const unavailable = el("ul", { class: "map-unavailable", "data-role": "map-unavailable" });
  const targets = new Set<string>([getUserId() ?? "", ...friendIds]);
  targets.delete("");

  let inFlight: Promise<void> | null = null;

  async function doRefresh(): Promise<void> {
    const markers: Marker[] = [];
    const missing: string[] = [];
    await Promise.all(
      [...targets].map(async (userId) => {
        try {
          const location = await api.getLocation(userId);
          markers.push({
            lat: location.lat,
            lon: location.lon,
            label: `${location.city}, ${location.country}`,
          });
        } catch {
          missing.push(userId);
        }
      }),
    );
    panel.setMarkers(markers);
    clear(unavailable);
    for (const userId of missing) {
      unavailable.append(el("li", { "data-user": userId }, [`${userId}: location unavailable`]));
    }
  }

  function refresh(): Promise<void> {
    // per-view deduplication: concurrent callers share one request cycle
    if (!inFlight) {
      inFlight = doRefresh().finally(() => {
        inFlight = null;
      });
    }
    return inFlight;
  }

  // search-and-add selector
  const search = el("input", { name: "q", type: "search", placeholder: "Find a friend" });
  const results = el("ul", { class: "map-search-results", "data-role": "map-search-results" });
  const searchForm = el("form", { id: "map-search" }, [search, el("button", { type: "submit" }, ["Search"])]);
  searchForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    clear(results);
    if (!search.value.trim()) return;
    const found = await api.searchProfiles(search.value, 8);
    for (const match of found.matches) {
      const add = el("button", { type: "button" }, ["show on map"]);
      add.addEventListener("click", () => {
        targets.add(match.user_id);
        void refresh();
      });
      results.append(el("li", {}, [`${match.display_name} (${match.country}) `, add]));
    }
  });

  void refresh();
  const timer = setInterval(() => void refresh(), POLL_INTERVAL_MS);

  return {
    element: el("section", { class: "view view-map" }, [
      el("h1", {}, ["Friends map"]),
      searchForm,
      results,
      panel.element,
      unavailable,
    ]),
    refresh,
    addTarget: (userId: string) => {
      targets.add(userId);
    },
    destroy: () => clearInterval(timer),
  };
}
