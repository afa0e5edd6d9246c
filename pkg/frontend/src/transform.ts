// World <-> screen mapping for the phase plane [0, xbar1] x [0, xbar2].
// The only numerics the UI performs is this linear interpolation; every
// state transition comes from the service.

export interface Viewport {
  width: number;
  height: number;
  pad: number;
}

export class Transform {
  constructor(
    public xbar1: number,
    public xbar2: number,
    public view: Viewport,
  ) {}

  private get plotW(): number {
    return this.view.width - 2 * this.view.pad;
  }

  private get plotH(): number {
    return this.view.height - 2 * this.view.pad;
  }

  toScreen(x1: number, x2: number): [number, number] {
    const sx = this.view.pad + (x1 / this.xbar1) * this.plotW;
    const sy = this.view.height - this.view.pad - (x2 / this.xbar2) * this.plotH;
    return [sx, sy];
  }

  toWorld(sx: number, sy: number): [number, number] {
    const x1 = ((sx - this.view.pad) / this.plotW) * this.xbar1;
    const x2 = ((this.view.height - this.view.pad - sy) / this.plotH) * this.xbar2;
    return [x1, x2];
  }

  clampToBox(x1: number, x2: number): [number, number] {
    return [
      Math.min(Math.max(x1, 0), this.xbar1),
      Math.min(Math.max(x2, 0), this.xbar2),
    ];
  }
}
