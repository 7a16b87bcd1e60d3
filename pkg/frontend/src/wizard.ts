/**
 * Pure state machine for the staged labeling procedure.
 *
 * No DOM, no network: callers feed catalog rules and key presses in, and
 * read selections, the computed path preview, and the rule ids to submit
 * back out.  State objects are immutable; every transition returns a new
 * state.
 *
 * Flow: the top stage asks Neutral vs Hostile (one rule), Hostile advances
 * to the structure stage (one rule), which routes to the matching fine
 * stage where any non-empty set of rules may be toggled on.  A Hateful
 * fine rule outranks Offensive ones in the preview, exactly as the server
 * decides.
 */

import type { Rule, Stage } from "./api.js";

const STAGE_ORDER: Record<Stage, number> = {
  TopLevel: 0,
  Structure: 1,
  SimpleFine: 2,
  ComplexFine: 2,
};

export interface PathPreview {
  top: string;
  structure: string | null;
  fine: string | null;
}

/** Selection rejected for the same reason the server would reject it. */
export class InvalidSelection extends Error {
  constructor(
    message: string,
    public readonly stage: Stage | null,
  ) {
    super(message);
    this.name = "InvalidSelection";
  }
}

export interface WizardState {
  commentId: string | null;
  /** Stage currently being asked. */
  stage: Stage;
  topRule: string | null;
  structureRule: string | null;
  /** Fine-stage picks in toggle order. */
  fineRules: string[];
  /** Which verdict block of the current stage has keyboard focus. */
  focus: 0 | 1;
  /** True once the selections form a complete label path. */
  complete: boolean;
}

export function newWizard(commentId: string | null = null): WizardState {
  return {
    commentId,
    stage: "TopLevel",
    topRule: null,
    structureRule: null,
    fineRules: [],
    focus: 0,
    complete: false,
  };
}

/** Catalog rules of one stage, in catalog order. */
export function stageRules(catalog: Rule[], stage: Stage): Rule[] {
  return catalog.filter((r) => r.stage === stage);
}

/** The two verdict blocks of a stage, each in catalog order. */
export function stageBlocks(catalog: Rule[], stage: Stage): Rule[][] {
  const rules = stageRules(catalog, stage);
  const order: string[] = [];
  const byVerdict = new Map<string, Rule[]>();
  for (const rule of rules) {
    if (!byVerdict.has(rule.verdict)) {
      byVerdict.set(rule.verdict, []);
      order.push(rule.verdict);
    }
    byVerdict.get(rule.verdict)!.push(rule);
  }
  return order.map((v) => byVerdict.get(v)!);
}

/** Exactly the catalog rules of the current stage (wizard invariant). */
export function visibleRules(catalog: Rule[], state: WizardState): Rule[] {
  return stageRules(catalog, state.stage);
}

/** The rule a 1-based hotkey addresses in the focused block, if any. */
export function hotkeyRule(
  catalog: Rule[],
  state: WizardState,
  key: 1 | 2 | 3,
): Rule | null {
  const blocks = stageBlocks(catalog, state.stage);
  const block = blocks[state.focus] ?? blocks[0];
  return block?.[key - 1] ?? null;
}

export function setFocus(state: WizardState, focus: 0 | 1): WizardState {
  return { ...state, focus };
}

/** Select a rule of the current stage by id. */
export function choose(
  catalog: Rule[],
  state: WizardState,
  ruleId: string,
): WizardState {
  const rule = catalog.find((r) => r.id === ruleId);
  if (!rule) throw new InvalidSelection(`unknown rule id ${ruleId}`, null);
  if (rule.stage !== state.stage) {
    throw new InvalidSelection(
      `${rule.id} belongs to ${rule.stage}, not the current ${state.stage} stage`,
      state.stage,
    );
  }
  if (state.stage === "TopLevel") {
    if (rule.verdict === "Neutral") {
      return { ...state, topRule: rule.id, complete: true };
    }
    return { ...state, topRule: rule.id, stage: "Structure", focus: 0, complete: false };
  }
  if (state.stage === "Structure") {
    const fineStage: Stage = rule.verdict === "Simple" ? "SimpleFine" : "ComplexFine";
    return { ...state, structureRule: rule.id, stage: fineStage, focus: 0, complete: false };
  }
  // fine stages toggle; several rules may apply to one comment
  const fineRules = state.fineRules.includes(rule.id)
    ? state.fineRules.filter((id) => id !== rule.id)
    : [...state.fineRules, rule.id];
  return { ...state, fineRules, complete: fineRules.length > 0 };
}

/** Apply a 1-3 hotkey against the focused block of the current stage. */
export function press(
  catalog: Rule[],
  state: WizardState,
  key: 1 | 2 | 3,
): WizardState {
  const rule = hotkeyRule(catalog, state, key);
  return rule ? choose(catalog, state, rule.id) : state;
}

/** Undo the last committed choice, clearing everything downstream of it. */
export function back(state: WizardState): WizardState {
  if (state.stage === "SimpleFine" || state.stage === "ComplexFine") {
    return {
      ...state,
      stage: "Structure",
      structureRule: null,
      fineRules: [],
      focus: 0,
      complete: false,
    };
  }
  if (state.stage === "Structure") {
    return { ...state, stage: "TopLevel", topRule: null, focus: 0, complete: false };
  }
  return { ...state, topRule: null, complete: false };
}

/** Rule ids in submission (stage) order. */
export function answers(state: WizardState): string[] {
  const out: string[] = [];
  if (state.topRule) out.push(state.topRule);
  if (state.structureRule) out.push(state.structureRule);
  out.push(...state.fineRules);
  return out;
}

/**
 * Client-side twin of the server's decision procedure.  Accepts exactly
 * the rule lists the server accepts and derives the same path, so the
 * preview can be trusted and submissions never bounce.
 */
export function decidePreview(catalog: Rule[], ruleIds: string[]): PathPreview {
  if (ruleIds.length === 0) throw new InvalidSelection("no answers given", null);
  const byId = new Map(catalog.map((r) => [r.id, r]));
  const rules = ruleIds.map((id) => {
    const rule = byId.get(id);
    if (!rule) throw new InvalidSelection(`unknown rule id ${id}`, null);
    return rule;
  });
  if (new Set(ruleIds).size !== ruleIds.length) {
    throw new InvalidSelection("duplicate rule ids", null);
  }
  const first = rules[0]!;
  if (first.stage !== "TopLevel") {
    throw new InvalidSelection(
      `first rule must be top-level, got ${first.id}`,
      "TopLevel",
    );
  }
  let last = 0;
  for (const rule of rules.slice(1)) {
    const order = STAGE_ORDER[rule.stage];
    if (order < last) {
      throw new InvalidSelection(`${rule.id} (${rule.stage}) out of stage order`, rule.stage);
    }
    last = Math.max(last, order);
  }

  const tops = rules.filter((r) => r.stage === "TopLevel");
  const structures = rules.filter((r) => r.stage === "Structure");
  const fines = rules.filter(
    (r) => r.stage === "SimpleFine" || r.stage === "ComplexFine",
  );

  const topVerdicts = new Set(tops.map((r) => r.verdict));
  if (topVerdicts.size > 1) {
    throw new InvalidSelection("top-level rules mix Neutral and Hostile verdicts", "TopLevel");
  }
  const top = tops[0]!.verdict;

  if (top === "Neutral") {
    if (structures.length > 0 || fines.length > 0) {
      throw new InvalidSelection(
        "structure and fine rules do not apply to a Neutral comment",
        "Structure",
      );
    }
    return { top, structure: null, fine: null };
  }

  if (structures.length === 0) {
    throw new InvalidSelection("Hostile comments need a Structure verdict", "Structure");
  }
  const structureVerdicts = new Set(structures.map((r) => r.verdict));
  if (structureVerdicts.size > 1) {
    throw new InvalidSelection("structure rules mix Simple and Complex verdicts", "Structure");
  }
  const structure = structures[0]!.verdict;

  const wanted: Stage = structure === "Simple" ? "SimpleFine" : "ComplexFine";
  const misplaced = fines.filter((r) => r.stage !== wanted);
  if (misplaced.length > 0) {
    throw new InvalidSelection(
      `${misplaced.map((r) => r.id).join(", ")} do not apply to a ${structure} comment`,
      wanted,
    );
  }
  if (fines.length === 0) {
    throw new InvalidSelection("Hostile comments need at least one fine-stage rule", wanted);
  }
  // superior class: one Hateful-stage rule makes the whole comment Hateful
  const fine = fines.some((r) => r.verdict === "Hateful") ? "Hateful" : "Offensive";
  return { top, structure, fine };
}

/** Preview for the wizard's current selections, or null while incomplete. */
export function preview(catalog: Rule[], state: WizardState): PathPreview | null {
  if (!state.complete) return null;
  return decidePreview(catalog, answers(state));
}

/** Verbatim render model for one rule card; no copy beyond the catalog's. */
export function ruleCard(rule: Rule): {
  id: string;
  verdict: string;
  prompt: string;
  example: string;
  mtoBased: boolean;
} {
  return {
    id: rule.id,
    verdict: rule.verdict,
    prompt: rule.prompt,
    example: rule.example,
    mtoBased: rule.mto_based,
  };
}

// --------------------------------------------------------------------------
// submission retry queue
// --------------------------------------------------------------------------

export interface PendingSubmission {
  commentId: string;
  rules: string[];
  amend: boolean;
}

export interface FlushOutcome {
  sent: PendingSubmission[];
  /** Server-side rejections (ApiError) surfaced to the caller, in order. */
  rejected: { submission: PendingSubmission; error: unknown }[];
  /** True when a network failure stopped the flush early. */
  stalled: boolean;
}

/**
 * FIFO queue for submissions that could not reach the server.  Flushing
 * preserves order; a network failure keeps the remaining entries queued,
 * while a server rejection drops the entry and reports it.
 */
export class SubmissionQueue {
  private items: PendingSubmission[] = [];

  get length(): number {
    return this.items.length;
  }

  get pending(): readonly PendingSubmission[] {
    return this.items;
  }

  push(item: PendingSubmission): void {
    this.items.push(item);
  }

  async flush(
    send: (item: PendingSubmission) => Promise<void>,
    isNetworkFailure: (error: unknown) => boolean,
  ): Promise<FlushOutcome> {
    const outcome: FlushOutcome = { sent: [], rejected: [], stalled: false };
    while (this.items.length > 0) {
      const item = this.items[0]!;
      try {
        await send(item);
        outcome.sent.push(item);
      } catch (error) {
        if (isNetworkFailure(error)) {
          outcome.stalled = true;
          return outcome;
        }
        outcome.rejected.push({ submission: item, error });
      }
      this.items.shift();
    }
    return outcome;
  }
}
