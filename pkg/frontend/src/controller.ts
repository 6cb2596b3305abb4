import { ApiClient } from "./api.js";
import {
  applyFailure,
  applyRecommendations,
  gestureToEvent,
  initialState,
  type Gesture,
  type ViewState,
} from "./state.js";

/**
 * Orchestrates the session loop: gestures become events, every event is
 * followed by a recommendations refetch, and failures preserve state for a
 * retry. Rendering subscribes to state changes; scent is never computed here.
 */
export class SessionController {
  state: ViewState = initialState();
  private listeners: ((state: ViewState) => void)[] = [];

  constructor(private readonly client: ApiClient, private readonly k = 20) {}

  onChange(listener: (state: ViewState) => void): void {
    this.listeners.push(listener);
  }

  private set(state: ViewState): void {
    this.state = state;
    for (const listener of this.listeners) listener(state);
  }

  async startSession(query: string): Promise<void> {
    const payload = await this.client.createSession(query);
    this.set(applyRecommendations(this.state, payload, query));
  }

  async sendGesture(gesture: Gesture): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null) return;
    try {
      await this.client.postEvent(sessionId, gestureToEvent(gesture));
      const payload = await this.client.getRecommendations(sessionId, this.k);
      this.set(applyRecommendations(this.state, payload));
    } catch (error) {
      this.set(
        applyFailure(this.state, gesture, error instanceof Error ? error.message : "request failed")
      );
    }
  }

  async retryPending(): Promise<void> {
    const pending = this.state.pendingGesture;
    if (pending !== null) await this.sendGesture(pending);
  }
}
