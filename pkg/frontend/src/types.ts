/** Payload shapes returned by the recommendation service (rendered verbatim). */

export interface CuePayload {
  id: string;
  kind: "visual" | "text" | "bookmark";
  bbox: [number, number, number, number] | null;
  terms: string[];
}

export interface ScentPayload {
  raw: number;
  discounted: number;
  text: number;
  visual: number;
}

export interface ItemPayload {
  image_id: string;
  score: number;
  matched_cues: string[];
  cues: CuePayload[];
  title: string;
  category: string | null;
  width: number;
  height: number;
  scent?: ScentPayload;
}

export interface DietPayload {
  session_id: string;
  diet_total: number;
  iteration: number;
  consumed: { image_id: string; scent: number }[];
}

export interface RecommendationsPayload {
  session_id: string;
  items: ItemPayload[];
  preferences: string[];
  diet: DietPayload;
}

export interface BoardPayload {
  board: string;
  images: { id: string; title: string; category: string | null }[];
}

export type EventKind =
  | "cue_click"
  | "preference_select"
  | "image_select"
  | "skip"
  | "examine";

export interface EventPayload {
  kind: EventKind;
  image_id?: string;
  cue_id?: string;
  term?: string;
}

export interface EventAck {
  ok: boolean;
  iteration: number;
  diet_total: number;
}
