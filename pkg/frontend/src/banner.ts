import type { AdviceAction, AdviceJson, StepResponse } from "./types";

export type BannerTone = "ok" | "warn" | "danger";

export interface Banner {
  text: string;
  tone: BannerTone;
}

const TEXT: Record<AdviceAction, [string, BannerTone]> = {
  use_min: ["Minimal fumigation suffices", "ok"],
  use_max: ["Apply maximal fumigation to stay safe", "warn"],
  relax_caps_or_increase_fumigation: [
    "Caps unattainable: relax the infection caps or raise the fumigation ceiling",
    "danger",
  ],
};

export function bannerForAdvice(advice: AdviceJson): Banner {
  const [text, tone] = TEXT[advice.action];
  return { text, tone };
}

export function bannerForStep(step: StepResponse): Banner {
  if (step.violation) {
    return {
      text: `Cap violated (${step.violation.face}) at t = ${step.violation.t.toFixed(1)} - reset to continue`,
      tone: "danger",
    };
  }
  return bannerForAdvice(step.advice);
}
