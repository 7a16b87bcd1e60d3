/**
 * DOM wiring.  All labeling logic lives in wizard.ts and all wire logic
 * in api.ts; this file only moves values between them and the page.
 */

import {
  ApiClient,
  ApiError,
  type CommentRef,
  type Rule,
  type Stage,
} from "./api.js";
import { agreementView, type AgreementView } from "./agreement.js";
import {
  InvalidSelection,
  SubmissionQueue,
  answers,
  back,
  choose,
  newWizard,
  preview,
  press,
  ruleCard,
  setFocus,
  stageBlocks,
  type WizardState,
} from "./wizard.js";

const client = new ApiClient();
const queue = new SubmissionQueue();

let catalog: Rule[] = [];
let sessionId = "";
let token = "";
let total = 0;
let decided = 0;
let current: CommentRef | null = null;
let wizard: WizardState = newWizard();

const $ = <T extends HTMLElement = HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

const STAGE_TITLES: Record<Stage, string> = {
  TopLevel: "Step A: is the comment Neutral or Hostile?",
  Structure: "Step B: is the hostile comment Simple or Complex?",
  SimpleFine: "Step C: Hateful or Offensive? (toggle every rule that applies)",
  ComplexFine: "Step D: Hateful or Offensive? (toggle every rule that applies)",
};

function isNetworkFailure(error: unknown): boolean {
  return !(error instanceof ApiError);
}

function showError(message: string | null): void {
  const el = $("error");
  el.hidden = message === null;
  el.textContent = message ?? "";
}

function renderWizard(): void {
  $("annotate").hidden = current === null && decided < total;
  $("progress").textContent = `${decided} / ${total} labeled`;
  $("queue-status").textContent =
    queue.length > 0 ? `${queue.length} submission(s) queued offline` : "";
  if (current === null) {
    $("comment-text").textContent =
      total > 0 && decided >= total ? "Session complete." : "";
    $("stage-title").textContent = "";
    $("blocks").replaceChildren();
    $("preview").textContent = "";
    return;
  }
  $("annotate").hidden = false;
  $("comment-text").textContent = current.text;
  $("stage-title").textContent = STAGE_TITLES[wizard.stage];

  const blocksEl = $("blocks");
  blocksEl.replaceChildren();
  stageBlocks(catalog, wizard.stage).forEach((block, b) => {
    const div = document.createElement("div");
    div.className = "block" + (wizard.focus === b ? " focused" : "");
    const head = document.createElement("h4");
    head.textContent = block[0]?.verdict ?? "";
    div.appendChild(head);
    block.forEach((rule, i) => {
      const card = ruleCard(rule);
      const selected =
        wizard.topRule === card.id ||
        wizard.structureRule === card.id ||
        wizard.fineRules.includes(card.id);
      const el = document.createElement("div");
      el.className = "rule" + (selected ? " selected" : "");
      const hotkey = document.createElement("span");
      hotkey.className = "hotkey";
      hotkey.textContent = wizard.focus === b ? String(i + 1) : "";
      const rid = document.createElement("span");
      rid.className = "rid";
      rid.textContent = card.id;
      el.append(hotkey, rid, document.createTextNode(card.prompt));
      if (card.mtoBased) {
        const mto = document.createElement("span");
        mto.className = "mto";
        mto.textContent = " [MTO-based]";
        el.appendChild(mto);
      }
      if (card.example) {
        const ex = document.createElement("span");
        ex.className = "example";
        ex.textContent = card.example;
        el.appendChild(ex);
      }
      el.addEventListener("click", () => {
        applyChoice(card.id, b as 0 | 1);
      });
      div.appendChild(el);
    });
    blocksEl.appendChild(div);
  });

  let text = "";
  try {
    const p = preview(catalog, wizard);
    if (p) text = [p.top, p.structure, p.fine].filter(Boolean).join(" / ");
  } catch (error) {
    text = error instanceof InvalidSelection ? error.message : String(error);
  }
  $("preview").textContent = text;
}

function applyChoice(ruleId: string, focus: 0 | 1): void {
  try {
    wizard = choose(catalog, setFocus(wizard, focus), ruleId);
    showError(null);
  } catch (error) {
    showError(error instanceof Error ? error.message : String(error));
  }
  renderWizard();
}

function applyResource(res: {
  total: number;
  decided: number;
  next?: CommentRef;
}): void {
  total = res.total;
  decided = res.decided;
  current = res.next ?? null;
  wizard = newWizard(current?.id ?? null);
}

async function refreshNext(): Promise<void> {
  const res = await client.getSession(sessionId);
  applyResource(res);
  renderWizard();
}

async function submitCurrent(): Promise<void> {
  if (!current || !wizard.complete) return;
  const ruleIds = answers(wizard);
  const amend = $<HTMLInputElement>("amend").checked;
  let claimed;
  try {
    claimed = preview(catalog, wizard) ?? undefined;
  } catch {
    claimed = undefined;
  }
  try {
    const res = await client.label(sessionId, token, current.id, ruleIds, {
      amend,
      path: claimed ?? undefined,
    });
    showError(null);
    $<HTMLInputElement>("amend").checked = false;
    applyResource(res);
    renderWizard();
    void refreshAgreement();
  } catch (error) {
    if (isNetworkFailure(error)) {
      queue.push({ commentId: current.id, rules: ruleIds, amend });
      showError("offline: submission queued, will retry");
      renderWizard();
    } else {
      // server rejection: keep all selections so the annotator can adjust
      const apiError = error as ApiError;
      showError(`${apiError.code}: ${apiError.message}`);
    }
  }
}

async function flushQueue(): Promise<void> {
  if (queue.length === 0) return;
  const outcome = await queue.flush(
    async (item) =>
      void (await client.label(sessionId, token, item.commentId, item.rules, {
        amend: item.amend,
      })),
    isNetworkFailure,
  );
  if (outcome.rejected.length > 0) {
    const first = outcome.rejected[0]!.error as ApiError;
    showError(`queued submission rejected: ${first.code}: ${first.message}`);
  }
  if (outcome.sent.length > 0) {
    await refreshNext();
    void refreshAgreement();
  } else {
    renderWizard();
  }
}

function renderAgreement(view: AgreementView): void {
  const body = $("agreement-body");
  body.replaceChildren();
  if (view.state !== "report") {
    const p = document.createElement("p");
    p.className = "notice";
    p.textContent = view.message;
    body.appendChild(p);
    return;
  }
  const kappa = document.createElement("p");
  kappa.className = "big";
  kappa.textContent = `κ = ${view.kappa}`;
  if (view.partial) {
    const badge = document.createElement("span");
    badge.className = "badge";
    badge.textContent = "partial";
    kappa.appendChild(badge);
  }
  const stats = document.createElement("p");
  stats.textContent =
    `po ${view.po}, pe ${view.pe}, se ${view.se}, 95% CI ${view.ci}`;

  const table = document.createElement("table");
  table.innerHTML =
    "<tr><th></th><th>B: yes</th><th>B: no</th></tr>" +
    `<tr><th>A: yes</th><td>${view.table.a}</td><td>${view.table.b}</td></tr>` +
    `<tr><th>A: no</th><td>${view.table.c}</td><td>${view.table.d}</td></tr>`;

  body.append(kappa, stats, table);
  if (view.disagreements.length > 0) {
    const head = document.createElement("p");
    head.textContent = `Disagreements (${view.disagreements.length}):`;
    const list = document.createElement("ul");
    for (const d of view.disagreements) {
      const li = document.createElement("li");
      li.textContent = `${d.id}: A=${d.a}, B=${d.b}`;
      list.appendChild(li);
    }
    body.append(head, list);
  }
}

async function refreshAgreement(): Promise<void> {
  const a = $<HTMLInputElement>("agree-a").value.trim();
  const b = $<HTMLInputElement>("agree-b").value.trim();
  if (!a || !b) return;
  const level = $<HTMLSelectElement>("agree-level").value as "top" | "fine";
  try {
    renderAgreement(agreementView(await client.getAgreement(a, b, level)));
  } catch (error) {
    renderAgreement(agreementView(error));
  }
}

function parseComments(raw: string): { id: string; text: string }[] {
  const out: { id: string; text: string }[] = [];
  const lines = raw.split("\n").map((l) => l.trim()).filter((l) => l.length > 0);
  lines.forEach((line, i) => {
    const tab = line.indexOf("\t");
    if (tab > 0) {
      out.push({ id: line.slice(0, tab).trim(), text: line.slice(tab + 1).trim() });
    } else {
      out.push({ id: `c${i + 1}`, text: line });
    }
  });
  return out;
}

async function createSession(): Promise<void> {
  const annotator = $<HTMLInputElement>("annotator").value.trim();
  const comments = parseComments($<HTMLTextAreaElement>("comments").value);
  const explicit = $<HTMLInputElement>("session-id").value.trim();
  const status = $("setup-status");
  if (!annotator || comments.length === 0) {
    status.textContent = "need an annotator name and at least one comment";
    return;
  }
  try {
    const res = await client.createSession(
      annotator,
      comments,
      explicit || undefined,
    );
    sessionId = res.session_id;
    token = res.token;
    status.textContent =
      `session ${res.session_id} created; token ${res.token} (keep it to resume)`;
    $<HTMLInputElement>("agree-a").value ||= res.session_id;
    applyResource(res);
    renderWizard();
  } catch (error) {
    status.textContent =
      error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
  }
}

async function resumeSession(): Promise<void> {
  sessionId = $<HTMLInputElement>("resume-id").value.trim();
  token = $<HTMLInputElement>("resume-token").value.trim();
  const status = $("setup-status");
  if (!sessionId) {
    status.textContent = "need a session id to resume";
    return;
  }
  try {
    await refreshNext();
    status.textContent = `resumed session ${sessionId}`;
  } catch (error) {
    status.textContent =
      error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
  }
}

function onKey(event: KeyboardEvent): void {
  if (
    event.target instanceof HTMLInputElement ||
    event.target instanceof HTMLTextAreaElement ||
    event.target instanceof HTMLSelectElement
  ) {
    return;
  }
  if (!current) return;
  if (event.key === "1" || event.key === "2" || event.key === "3") {
    wizard = press(catalog, wizard, Number(event.key) as 1 | 2 | 3);
    showError(null);
    renderWizard();
  } else if (event.key === "ArrowLeft") {
    wizard = setFocus(wizard, 0);
    renderWizard();
  } else if (event.key === "ArrowRight") {
    wizard = setFocus(wizard, 1);
    renderWizard();
  } else if (event.key === "Backspace") {
    wizard = back(wizard);
    showError(null);
    renderWizard();
    event.preventDefault();
  } else if (event.key === "Enter") {
    void submitCurrent();
  }
}

async function init(): Promise<void> {
  try {
    catalog = (await client.getCatalog()).rules;
  } catch {
    $("setup-status").textContent =
      "cannot reach the annotation service; is `ruhate serve` running?";
    return;
  }
  $("create-session").addEventListener("click", () => void createSession());
  $("resume-session").addEventListener("click", () => void resumeSession());
  $("agree-refresh").addEventListener("click", () => void refreshAgreement());
  $("back").addEventListener("click", () => {
    wizard = back(wizard);
    showError(null);
    renderWizard();
  });
  $("submit").addEventListener("click", () => void submitCurrent());
  document.addEventListener("keydown", onKey);
  window.setInterval(() => void flushQueue(), 5000);
  window.setInterval(() => void refreshAgreement(), 5000);
}

void init();
