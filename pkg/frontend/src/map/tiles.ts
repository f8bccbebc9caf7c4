/**
 * Minimal slippy-map panel: a grid of OpenStreetMap raster tiles with
 * absolutely positioned lat/lon markers. No map library, no API key.
 */

import { el } from "../dom.js";

export const TILE_URL = "https://tile.openstreetmap.org/{z}/{x}/{y}.png";
export const TILE_SIZE = 256;

export interface Marker {
  lat: number;
  lon: number;
  label: string;
}

interface PixelPoint {
  x: number;
  y: number;
}

/** Web-Mercator world pixel coordinates at a zoom level. */
export function project(lat: number, lon: number, zoom: number): PixelPoint {
  const scale = TILE_SIZE * 2 ** zoom;
  const clamped = Math.max(-85.05112878, Math.min(85.05112878, lat));
  const sinLat = Math.sin((clamped * Math.PI) / 180);
  return {
    x: ((lon + 180) / 360) * scale,
    y: (0.5 - Math.log((1 + sinLat) / (1 - sinLat)) / (4 * Math.PI)) * scale,
  };
}

/** Zoom that fits every marker into a width x height viewport. */
export function fitZoom(markers: Marker[], width: number, height: number): number {
  for (let zoom = 18; zoom >= 1; zoom--) {
    const points = markers.map((m) => project(m.lat, m.lon, zoom));
    const spanX = Math.max(...points.map((p) => p.x)) - Math.min(...points.map((p) => p.x));
    const spanY = Math.max(...points.map((p) => p.y)) - Math.min(...points.map((p) => p.y));
    if (spanX <= width * 0.8 && spanY <= height * 0.8) return zoom;
  }
  return 1;
}

export interface MapPanel {
  element: HTMLElement;
  setMarkers(markers: Marker[]): void;
}

export function createMapPanel(width = 640, height = 400): MapPanel {
  const element = el("div", {
    class: "map-panel",
    "data-role": "map-panel",
    style: `position:relative;overflow:hidden;width:${width}px;height:${height}px;background:#dce8dc;`,
  });

  function render(markers: Marker[]) {
    element.replaceChildren();
    if (markers.length === 0) return;

    const zoom = markers.length === 1 ? 11 : fitZoom(markers, width, height);
    const points = markers.map((m) => project(m.lat, m.lon, zoom));
    const center = {
      x: points.reduce((s, p) => s + p.x, 0) / points.length,
      y: points.reduce((s, p) => s + p.y, 0) / points.length,
    };
    const originX = center.x - width / 2;
    const originY = center.y - height / 2;

    const firstTileX = Math.floor(originX / TILE_SIZE);
    const firstTileY = Math.floor(originY / TILE_SIZE);
    const lastTileX = Math.floor((originX + width) / TILE_SIZE);
    const lastTileY = Math.floor((originY + height) / TILE_SIZE);
    const tiles = 2 ** zoom;
    for (let tx = firstTileX; tx <= lastTileX; tx++) {
      for (let ty = firstTileY; ty <= lastTileY; ty++) {
        if (ty < 0 || ty >= tiles) continue;
        const wrappedX = ((tx % tiles) + tiles) % tiles;
        const url = TILE_URL.replace("{z}", String(zoom))
          .replace("{x}", String(wrappedX))
          .replace("{y}", String(ty));
        element.append(
          el("img", {
            class: "map-tile",
            src: url,
            alt: "",
            loading: "lazy",
            style:
              `position:absolute;width:${TILE_SIZE}px;height:${TILE_SIZE}px;` +
              `left:${tx * TILE_SIZE - originX}px;top:${ty * TILE_SIZE - originY}px;`,
          }),
        );
      }
    }

    markers.forEach((marker, i) => {
      const p = points[i];
      element.append(
        el(
          "div",
          {
            class: "map-marker",
            "data-role": "marker",
            "data-label": marker.label,
            style:
              `position:absolute;transform:translate(-50%,-100%);` +
              `left:${p.x - originX}px;top:${p.y - originY}px;`,
          },
          [el("span", { class: "map-pin" }, ["▼"]), el("span", { class: "map-caption" }, [marker.label])],
        ),
      );
    });
  }

  return { element, setMarkers: render };
}
