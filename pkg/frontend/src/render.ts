import { ApiClient } from "./api.js";
import { scaleRect } from "./geometry.js";
import type { Gesture, ViewState } from "./state.js";
import type { ItemPayload } from "./types.js";

export interface RenderTargets {
  grid: HTMLElement;
  preferences: HTMLElement;
  diet: HTMLElement;
  banner: HTMLElement;
}

type GestureHandler = (gesture: Gesture) => void;

function overlayCues(card: HTMLElement, img: HTMLImageElement, item: ItemPayload, onGesture: GestureHandler): void {
  for (const cue of item.cues) {
    if (cue.bbox === null) continue;
    const rect = scaleRect(cue.bbox, item.width, item.height, img.clientWidth, img.clientHeight);
    const el = document.createElement("div");
    el.className = "cue-rect";
    el.style.left = `${rect.left}px`;
    el.style.top = `${rect.top}px`;
    el.style.width = `${rect.width}px`;
    el.style.height = `${rect.height}px`;
    el.title = cue.terms.join(", ");
    el.addEventListener("click", (ev) => {
      ev.stopPropagation();
      onGesture({ kind: "cue", cueId: cue.id, imageId: item.image_id });
    });
    card.querySelector(".thumb")!.appendChild(el);
  }
}

function renderCard(item: ItemPayload, client: ApiClient, onGesture: GestureHandler): HTMLElement {
  const card = document.createElement("article");
  card.className = "card";

  const thumb = document.createElement("div");
  thumb.className = "thumb";
  const img = document.createElement("img");
  img.src = client.imageUrl(item.image_id);
  img.alt = item.title;
  img.addEventListener("load", () => overlayCues(card, img, item, onGesture));
  img.addEventListener("error", () => {
    thumb.replaceChildren();
    const placeholder = document.createElement("div");
    placeholder.className = "placeholder";
    placeholder.textContent = item.image_id;
    thumb.appendChild(placeholder);
  });
  img.addEventListener("click", () => onGesture({ kind: "view", imageId: item.image_id }));
  thumb.appendChild(img);

  if (item.scent !== undefined) {
    const badge = document.createElement("span");
    badge.className = "scent-badge";
    badge.textContent = item.scent.discounted.toFixed(2);
    badge.title = `text ${item.scent.text.toFixed(2)} · visual ${item.scent.visual.toFixed(2)} · raw ${item.scent.raw.toFixed(2)}`;
    thumb.appendChild(badge);
  }
  card.appendChild(thumb);

  const title = document.createElement("h3");
  title.textContent = item.title || item.image_id;
  card.appendChild(title);

  const chips = document.createElement("div");
  chips.className = "term-chips";
  const seen = new Set<string>();
  for (const cue of item.cues) {
    for (const term of cue.terms) {
      if (seen.has(term)) continue;
      seen.add(term);
      const chip = document.createElement("span");
      chip.className = "term-chip";
      chip.textContent = term;
      chips.appendChild(chip);
    }
  }
  card.appendChild(chips);

  const actions = document.createElement("div");
  actions.className = "actions";
  const like = document.createElement("button");
  like.textContent = "interested";
  like.addEventListener("click", () => onGesture({ kind: "interested", imageId: item.image_id }));
  const pass = document.createElement("button");
  pass.textContent = "uninterested";
  pass.className = "secondary";
  pass.addEventListener("click", () => onGesture({ kind: "uninterested", imageId: item.image_id }));
  actions.append(like, pass);
  card.appendChild(actions);
  return card;
}

export function renderView(
  targets: RenderTargets,
  state: ViewState,
  client: ApiClient,
  onGesture: GestureHandler,
  onRetry: () => void
): void {
  targets.grid.replaceChildren();
  if (state.items.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = state.sessionId === null ? "Search or open a board to begin." : "No results.";
    targets.grid.appendChild(empty);
  } else {
    for (const item of state.items) {
      targets.grid.appendChild(renderCard(item, client, onGesture));
    }
  }

  targets.preferences.replaceChildren();
  for (const term of state.preferences) {
    const chip = document.createElement("button");
    chip.className = "pref-chip";
    chip.textContent = term;
    chip.addEventListener("click", () => onGesture({ kind: "chip", term }));
    targets.preferences.appendChild(chip);
  }

  if (state.diet === null) {
    targets.diet.textContent = "";
  } else {
    targets.diet.textContent =
      `diet ${state.diet.diet_total.toFixed(3)} · iteration ${state.diet.iteration}` +
      ` · consumed ${state.diet.consumed.length}`;
  }

  targets.banner.replaceChildren();
  targets.banner.hidden = state.banner === null;
  if (state.banner !== null) {
    const text = document.createElement("span");
    text.textContent = state.banner;
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.addEventListener("click", onRetry);
    targets.banner.append(text, retry);
  }
}
