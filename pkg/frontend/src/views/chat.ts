/**
 * Chat panel for one conversation: sends messages and polls for new
 * ones with a since_seq cursor so each poll only transfers the tail.
 */

import { ApiError, GeosocialApi, MessageView } from "../api.js";
import { el } from "../dom.js";
import { getUserId } from "../session.js";

export const POLL_INTERVAL_MS = 5000;

export interface ChatView {
  element: HTMLElement;
  poll(): Promise<void>;
  destroy(): void;
}

export function chatView(api: GeosocialApi, otherId: string): ChatView {
  const log = el("ul", { class: "chat-log", "data-role": "chat-log" });
  const status = el("p", { class: "status", "data-role": "chat-status" });
  let lastSeq = 0;

  function append(message: MessageView) {
    const mine = message.sender_id === getUserId();
    log.append(
      el("li", { class: mine ? "chat-mine" : "chat-theirs", "data-seq": String(message.seq) }, [
        message.body,
      ]),
    );
    lastSeq = Math.max(lastSeq, message.seq);
  }

  async function poll(): Promise<void> {
    try {
      const result = await api.fetchMessages(otherId, lastSeq);
      for (const message of result.messages) append(message);
      status.textContent = "";
    } catch (error) {
      status.textContent = error instanceof ApiError ? error.message : "chat unavailable";
    }
  }

  const input = el("input", { name: "body", type: "text", placeholder: "Write a message" });
  const form = el("form", { id: "chat-form" }, [input, el("button", { type: "submit" }, ["Send"])]);
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    if (!input.value.trim()) return;
    try {
      append(await api.sendMessage(otherId, input.value));
      input.value = "";
      status.textContent = "";
    } catch (error) {
      status.textContent = error instanceof ApiError ? error.message : "send failed";
    }
  });

  void poll();
  const timer = setInterval(() => void poll(), POLL_INTERVAL_MS);

  return {
    element: el("section", { class: "view view-chat" }, [
      el("h1", {}, ["Chat"]),
      log,
      form,
      status,
    ]),
    poll,
    destroy: () => clearInterval(timer),
  };
}
