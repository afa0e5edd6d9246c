// Play-loop options, overridable from the page URL:
//   ?dt=<days per step>&rate=<steps per second>

export interface PlayOptions {
  dt: number;
  cadenceMs: number;
}

export const DEFAULT_PLAY: PlayOptions = { dt: 1.0, cadenceMs: 200 };

export function parsePlayOptions(search: string): PlayOptions {
  const params = new URLSearchParams(search);
  let dt = Number(params.get("dt") ?? DEFAULT_PLAY.dt);
  if (!Number.isFinite(dt) || dt <= 0 || dt > 10) dt = DEFAULT_PLAY.dt;
  let rate = Number(params.get("rate") ?? 1000 / DEFAULT_PLAY.cadenceMs);
  if (!Number.isFinite(rate) || rate <= 0 || rate > 60) {
    rate = 1000 / DEFAULT_PLAY.cadenceMs;
  }
  return { dt, cadenceMs: 1000 / rate };
}
