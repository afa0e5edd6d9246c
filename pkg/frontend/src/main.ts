import { Client } from "./api";
import { bannerForAdvice, bannerForStep, type Banner } from "./banner";
import { parsePlayOptions } from "./options";
import { renderScene, type Ctx, type Scene } from "./render";
import { Steering } from "./steer";
import { Transform } from "./transform";
import type { AdviceJson, StepResponse } from "./types";

const WIDTH = 720;
const HEIGHT = 520;
const PAD = 48;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showBanner(banner: Banner): void {
  const node = el<HTMLDivElement>("banner");
  node.textContent = banner.text;
  node.dataset.tone = banner.tone;
}

function toast(message: string): void {
  const node = el<HTMLDivElement>("toast");
  node.textContent = message;
  node.classList.add("visible");
  setTimeout(() => node.classList.remove("visible"), 4000);
}

async function boot(): Promise<void> {
  const client = new Client("");
  const canvas = el<HTMLCanvasElement>("plane");
  canvas.width = WIDTH;
  canvas.height = HEIGHT;
  const ctx = canvas.getContext("2d") as unknown as Ctx;

  const [scenario, classification, regions, barriers] = await Promise.all([
    client.scenario(),
    client.classification(),
    client.regions(),
    client.barriers(),
  ]);

  el<HTMLSpanElement>("case-label").textContent = classification.case;
  el<HTMLSpanElement>("ratio-label").textContent =
    regions.efficiency_ratio === null
      ? "undefined (desperate)"
      : regions.efficiency_ratio.toFixed(4);

  const tr = new Transform(scenario.caps.xbar1, scenario.caps.xbar2, {
    width: WIDTH,
    height: HEIGHT,
    pad: PAD,
  });

  const scene: Scene = {
    regions: { admissible: regions.admissible, mrpi: regions.mrpi },
    barriers,
    trail: [],
  };

  const redraw = () => renderScene(ctx, tr, scene, { width: WIDTH, height: HEIGHT });

  const slider = el<HTMLInputElement>("u-slider");
  slider.min = String(scenario.model.u_min);
  slider.max = String(scenario.model.u_max);
  slider.step = String((scenario.model.u_max - scenario.model.u_min) / 200);
  slider.value = String(scenario.model.u_min);
  const sliderLabel = el<HTMLSpanElement>("u-value");
  sliderLabel.textContent = Number(slider.value).toFixed(4);

  const x0: [number, number] = [scenario.caps.xbar1 / 5, scenario.caps.xbar2 / 5];
  const steering = new Steering(
    client,
    {
      onState: (_state, trail) => {
        scene.trail = trail;
        redraw();
      },
      onAdvice: (advice: AdviceJson, violation: StepResponse["violation"]) => {
        if (violation) {
          showBanner(bannerForStep({ violation } as StepResponse));
        } else {
          showBanner(bannerForAdvice(advice));
        }
      },
      onError: toast,
    },
    {
      ...parsePlayOptions(window.location.search),
      uMin: scenario.model.u_min,
      uMax: scenario.model.u_max,
    },
    x0,
  );

  slider.addEventListener("input", () => {
    steering.setSlider(Number(slider.value));
    sliderLabel.textContent = steering.u.toFixed(4);
  });

  el<HTMLButtonElement>("step-btn").addEventListener("click", () => steering.step());

  const playBtn = el<HTMLButtonElement>("play-btn");
  playBtn.addEventListener("click", () => {
    steering.toggle();
    playBtn.textContent = steering.playing ? "Pause" : "Play";
  });

  canvas.addEventListener("click", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const world = tr.toWorld(ev.clientX - rect.left, ev.clientY - rect.top);
    void steering.resetTo(tr.clampToBox(world[0], world[1]));
  });

  await steering.start();
  redraw();
}

boot().catch((e) => {
  document.body.insertAdjacentHTML(
    "beforeend",
    `<p style="color:#b22222">failed to reach the service: ${String(e)}</p>`,
  );
});
