import { ApiError, Client } from "./api";
import type { AdviceJson, StepResponse } from "./types";

export interface SteerEvents {
  onState(state: [number, number], trail: [number, number][]): void;
  onAdvice(advice: AdviceJson, violation: StepResponse["violation"]): void;
  onError(message: string): void;
}

export interface SteerOptions {
  dt: number; // days per step
  cadenceMs: number; // auto-play period
  uMin: number;
  uMax: number;
}

// Drives the session: one in-flight step at a time with a queue of length
// one where the latest requested slider value wins; a stale session (the
// server evicted it) is recreated transparently at the current state.
export class Steering {
  u: number;
  playing = false;
  trail: [number, number][] = [];

  private sessionId: string | null = null;
  private state: [number, number];
  private inFlight = false;
  private pending: number | null = null; // latest slider value queued
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private client: Client,
    private events: SteerEvents,
    private opts: SteerOptions,
    x0: [number, number],
  ) {
    this.u = opts.uMin;
    this.state = x0;
  }

  get currentState(): [number, number] {
    return this.state;
  }

  setSlider(u: number): void {
    this.u = Math.min(Math.max(u, this.opts.uMin), this.opts.uMax);
  }

  async start(): Promise<void> {
    const created = await this.client.createSession(this.state);
    this.sessionId = created.id;
    this.trail = [this.state];
    this.events.onState(this.state, this.trail);
    this.events.onAdvice(created.advice, null);
  }

  async resetTo(x0: [number, number]): Promise<void> {
    this.state = x0;
    this.trail = [x0];
    try {
      if (this.sessionId === null) {
        await this.start();
        return;
      }
      const r = await this.client.reset(this.sessionId, x0);
      this.events.onState(this.state, this.trail);
      this.events.onAdvice(r.advice, null);
    } catch (e) {
      if (e instanceof ApiError && e.status === 404) {
        this.sessionId = null;
        await this.start();
        return;
      }
      this.events.onError(e instanceof Error ? e.message : String(e));
    }
  }

  // Request one step at the current slider value.  If a step is already in
  // flight the request is queued; only the latest queued value survives.
  step(): void {
    if (this.inFlight) {
      this.pending = this.u;
      return;
    }
    void this.runStep(this.u);
  }

  private async runStep(u: number): Promise<void> {
    if (this.sessionId === null) return;
    this.inFlight = true;
    try {
      const r = await this.client.step(this.sessionId, u, this.opts.dt);
      this.state = r.state;
      this.trail.push(r.state);
      this.events.onState(r.state, this.trail);
      this.events.onAdvice(r.advice, r.violation);
      if (r.violation) this.pause();
    } catch (e) {
      if (e instanceof ApiError && e.status === 404) {
        // evicted session: recreate at the current state and carry on
        this.sessionId = null;
        this.pending = null;
        await this.start();
      } else if (e instanceof ApiError && e.status === 409) {
        this.pause();
        this.events.onError("session has violated a cap; click the plane to reset");
      } else {
        this.events.onError(e instanceof Error ? e.message : String(e));
      }
    } finally {
      this.inFlight = false;
      if (this.pending !== null) {
        const next = this.pending;
        this.pending = null;
        void this.runStep(next);
      }
    }
  }

  play(): void {
    if (this.playing) return;
    this.playing = true;
    this.timer = setInterval(() => this.step(), this.opts.cadenceMs);
  }

  pause(): void {
    this.playing = false;
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  toggle(): void {
    if (this.playing) this.pause();
    else this.play();
  }
}
