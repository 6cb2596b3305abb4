import type { DietPayload, EventPayload, ItemPayload } from "../src/types.js";

/** Canned items mirroring the service's payload shape. */
export function fixtureItems(): ItemPayload[] {
  return [
    {
      image_id: "z001",
      score: 0.74,
      matched_cues: ["z001-v0"],
      cues: [
        { id: "z001-v0", kind: "visual", bbox: [10, 10, 50, 50], terms: ["zoodles"] },
        { id: "z001-t0", kind: "text", bbox: null, terms: ["recipe"] },
      ],
      title: "zoodles bowl",
      category: "zoodles",
      width: 100,
      height: 80,
      scent: { raw: 0.74, discounted: 0.74, text: 0.9, visual: 0.58 },
    },
    {
      image_id: "b004",
      score: 0.31,
      matched_cues: [],
      cues: [{ id: "b004-v0", kind: "visual", bbox: [0, 20, 40, 30], terms: ["pasta"] }],
      title: "pasta sauce",
      category: "bolognese",
      width: 160,
      height: 120,
      scent: { raw: 0.31, discounted: 0.31, text: 0.4, visual: 0.22 },
    },
  ];
}

export interface FixtureService {
  fetchFn: (input: string, init?: RequestInit) => Promise<Response>;
  events: EventPayload[];
  diet: DietPayload;
}

/**
 * In-memory stand-in for the recommendation service: records posted events
 * and grows the diet by the selected item's discounted scent, exactly as the
 * real service does.
 */
export function makeFixtureService(): FixtureService {
  const items = fixtureItems();
  const diet: DietPayload = { session_id: "s1", diet_total: 0, iteration: 0, consumed: [] };
  const events: EventPayload[] = [];

  const json = (body: unknown, status = 200) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });

  const recommendations = () => ({
    session_id: "s1",
    items,
    preferences: ["green", "fresh"],
    diet,
  });

  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    if (method === "POST" && input.endsWith("/api/sessions")) {
      return json(recommendations(), 201);
    }
    if (method === "POST" && input.includes("/events")) {
      const event = JSON.parse(String(init?.body)) as EventPayload;
      events.push(event);
      if (event.kind === "preference_select") diet.iteration += 1;
      if (event.kind === "image_select") {
        const item = items.find((it) => it.image_id === event.image_id);
        const scent = item?.scent?.discounted ?? 0;
        diet.diet_total += scent;
        diet.consumed.push({ image_id: event.image_id ?? "", scent });
      }
      return json({ ok: true, iteration: diet.iteration, diet_total: diet.diet_total });
    }
    if (input.includes("/recommendations")) return json(recommendations());
    if (input.endsWith("/diet")) return json(diet);
    if (input.includes("/api/boards/")) {
      const name = decodeURIComponent(input.split("/api/boards/")[1]);
      if (name !== "zoodles") {
        return json({ error: { code: "not_found", message: `no board/category named '${name}'`, field: null } }, 404);
      }
      return json({ board: name, images: [{ id: "z001", title: "zoodles bowl", category: "zoodles" }] });
    }
    return json({ error: { code: "not_found", message: `no route ${input}`, field: null } }, 404);
  };

  return { fetchFn, events, diet };
}
