/** Application entry point: wire the API client and mount the router. */

import { GeosocialApi } from "./api.js";
import { createRouter } from "./router.js";

const API_BASE = (window as { GEOSOCIAL_API_URL?: string }).GEOSOCIAL_API_URL ?? "";

const api = new GeosocialApi(API_BASE);
const root = document.getElementById("app");
if (root) {
  createRouter(api, root);
}
