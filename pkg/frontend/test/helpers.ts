/** Shared fakes: an in-memory fetch that mimics the service contract. */

import { FetchLike } from "../src/api.js";

export interface Route {
  method: string;
  pattern: RegExp;
  handler: (match: RegExpMatchArray, body: unknown) => { status: number; json: unknown };
}

export function fakeFetch(routes: Route[], log: string[] = []): FetchLike {
  return async (input, init) => {
    const method = init?.method ?? "GET";
    const url = String(input);
    log.push(`${method} ${url}`);
    for (const route of routes) {
      const match = url.match(route.pattern);
      if (match && route.method === method) {
        const body = init?.body ? JSON.parse(String(init.body)) : undefined;
        const { status, json } = route.handler(match, body);
        return new Response(JSON.stringify(json), {
          status,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ code: "not_found", message: "no route" }), {
      status: 404,
    });
  };
}

export function deadFetch(): FetchLike {
  return async () => {
    throw new TypeError("fetch failed");
  };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
