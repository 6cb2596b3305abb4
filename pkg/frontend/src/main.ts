import { ApiClient, ApiError } from "./api.js";
import { SessionController } from "./controller.js";
import { renderView, type RenderTargets } from "./render.js";

function must<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

function wire(): void {
  const client = new ApiClient("");
  const controller = new SessionController(client);
  const targets: RenderTargets = {
    grid: must("grid"),
    preferences: must("preferences"),
    diet: must("diet"),
    banner: must("banner"),
  };
  const status = must<HTMLElement>("status");

  controller.onChange((state) => {
    renderView(
      targets,
      state,
      client,
      (gesture) => void controller.sendGesture(gesture),
      () => void controller.retryPending()
    );
  });

  const searchForm = must<HTMLFormElement>("search-form");
  const searchInput = must<HTMLInputElement>("search-input");
  searchForm.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    status.textContent = "";
    try {
      await controller.startSession(searchInput.value);
    } catch (error) {
      status.textContent = error instanceof ApiError ? error.message : "search failed";
    }
  });

  const boardForm = must<HTMLFormElement>("board-form");
  const boardInput = must<HTMLInputElement>("board-input");
  boardForm.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    status.textContent = "";
    try {
      const board = await client.getBoard(boardInput.value.trim());
      status.textContent = `board "${board.board}": ${board.images.length} images`;
      await controller.startSession(board.board);
    } catch (error) {
      status.textContent = error instanceof ApiError ? error.message : "board lookup failed";
    }
  });
}

document.addEventListener("DOMContentLoaded", wire);
