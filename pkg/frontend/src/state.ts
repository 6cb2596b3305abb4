import type {
  DietPayload,
  EventPayload,
  ItemPayload,
  RecommendationsPayload,
} from "./types.js";

/** Everything the page renders; populated only from service responses. */
export interface ViewState {
  sessionId: string | null;
  query: string;
  items: ItemPayload[];
  preferences: string[];
  diet: DietPayload | null;
  banner: string | null;
  pendingGesture: Gesture | null;
}

export type Gesture =
  | { kind: "cue"; cueId: string; imageId: string }
  | { kind: "chip"; term: string }
  | { kind: "interested"; imageId: string }
  | { kind: "uninterested"; imageId: string }
  | { kind: "view"; imageId: string };

export function initialState(): ViewState {
  return {
    sessionId: null,
    query: "",
    items: [],
    preferences: [],
    diet: null,
    banner: null,
    pendingGesture: null,
  };
}

/** Every user gesture maps to exactly one service event kind. */
export function gestureToEvent(gesture: Gesture): EventPayload {
  switch (gesture.kind) {
    case "cue":
      return { kind: "cue_click", cue_id: gesture.cueId, image_id: gesture.imageId };
    case "chip":
      return { kind: "preference_select", term: gesture.term };
    case "interested":
      return { kind: "image_select", image_id: gesture.imageId };
    case "uninterested":
      return { kind: "skip", image_id: gesture.imageId };
    case "view":
      return { kind: "examine", image_id: gesture.imageId };
  }
}

export function applyRecommendations(
  state: ViewState,
  payload: RecommendationsPayload,
  query?: string
): ViewState {
  return {
    ...state,
    sessionId: payload.session_id,
    query: query ?? state.query,
    items: payload.items,
    preferences: payload.preferences,
    diet: payload.diet,
    banner: null,
    pendingGesture: null,
  };
}

export function applyDiet(state: ViewState, diet: DietPayload): ViewState {
  return { ...state, diet };
}

/** Network failure: keep everything, surface a retry banner. */
export function applyFailure(state: ViewState, gesture: Gesture, message: string): ViewState {
  return { ...state, banner: message, pendingGesture: gesture };
}
