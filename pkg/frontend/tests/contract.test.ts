/**
 * Contract tests against a live annotation service (spawned by global
 * setup, address in WORKBENCH_API_URL).  These pin the one property the
 * wizard depends on for correctness: a selection the client-side preview
 * accepts is accepted by the server with the same decided path, and a
 * selection the preview rejects is rejected by the server.
 */

import { beforeAll, describe, expect, it } from "vitest";

import { agreementView, errorView, reportView } from "../src/agreement.js";
import { ApiClient, ApiError, type Catalog, type Rule } from "../src/api.js";
import {
  InvalidSelection,
  answers,
  choose,
  decidePreview,
  newWizard,
  preview,
  ruleCard,
  visibleRules,
  type WizardState,
} from "../src/wizard.js";
import { mulberry32, pick } from "./fixtures.js";

const BASE = process.env.WORKBENCH_API_URL ?? "";

function client(): ApiClient {
  return new ApiClient({ baseUrl: BASE });
}

function comments(prefix: string, n: number): { id: string; text: string }[] {
  return Array.from({ length: n }, (_, i) => ({
    id: `${prefix}${String(i + 1).padStart(3, "0")}`,
    text: `sample comment ${prefix}${i + 1}`,
  }));
}

/** Drive the wizard to completion with distinct random picks per stage. */
function randomWalk(rules: Rule[], rng: () => number, commentId: string): WizardState {
  let state = newWizard(commentId);
  state = choose(rules, state, pick(rng, visibleRules(rules, state)).id);
  if (state.complete) return state;
  state = choose(rules, state, pick(rng, visibleRules(rules, state)).id);
  const fine = visibleRules(rules, state).map((r) => r.id);
  const count = 1 + Math.floor(rng() * 3);
  for (let i = fine.length - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    [fine[i], fine[j]] = [fine[j]!, fine[i]!];
  }
  for (const id of fine.slice(0, count)) {
    state = choose(rules, state, id);
  }
  return state;
}

describe.skipIf(!BASE)("live annotation service", () => {
  let catalog: Catalog;

  beforeAll(async () => {
    catalog = await client().getCatalog();
  });

  describe("catalog", () => {
    it("ships four stages of rules with verbatim text", () => {
      expect(catalog.rules.length).toBe(24);
      const byStage = new Map<string, number>();
      for (const rule of catalog.rules) {
        byStage.set(rule.stage, (byStage.get(rule.stage) ?? 0) + 1);
        expect(rule.prompt.length).toBeGreaterThan(0);
        expect(rule.example.length).toBeGreaterThan(0);
        // the card shown in the UI carries the API text untouched
        const card = ruleCard(rule);
        expect(card.prompt).toBe(rule.prompt);
        expect(card.example).toBe(rule.example);
        expect(card.id).toBe(rule.id);
        expect(card.verdict).toBe(rule.verdict);
      }
      expect(byStage.get("TopLevel")).toBe(6);
      expect(byStage.get("Structure")).toBe(6);
      expect(byStage.get("SimpleFine")).toBe(6);
      expect(byStage.get("ComplexFine")).toBe(6);
      for (const id of ["N1", "H1", "S1", "C1", "SO1", "SH1", "CO1", "CH1"]) {
        expect(catalog.rules.some((r) => r.id === id), id).toBe(true);
      }
    });

    it("revalidates with ETag and reuses the cached catalog on 304", async () => {
      const c = client();
      const first = await c.getCatalog();
      const second = await c.getCatalog();
      expect(second).toBe(first);
      expect(second.version).toBe(catalog.version);
    });
  });

  describe("wizard submissions", () => {
    it("every wizard-generated path is accepted with the previewed labels", async () => {
      const api = client();
      const created = await api.createSession("walker", comments("w", 50));
      const rng = mulberry32(7);
      let hostile = 0;
      let neutral = 0;

      for (let i = 0; i < 50; i++) {
        const next = await api.getNext(created.session_id);
        expect(next.complete).toBe(false);
        const commentId = next.comment!.id;

        const state = randomWalk(catalog.rules, rng, commentId);
        expect(state.complete).toBe(true);
        const claimed = preview(catalog.rules, state)!;
        if (claimed.top === "Hostile") hostile += 1;
        else neutral += 1;

        const result = await api.label(
          created.session_id,
          created.token,
          commentId,
          answers(state),
          { path: claimed },
        );
        expect(result.path.top).toBe(claimed.top);
        expect(result.path.structure).toBe(claimed.structure);
        expect(result.path.fine).toBe(claimed.fine);
        expect(result.path.rules).toEqual(answers(state));
        expect(result.decided).toBe(i + 1);
      }

      const done = await api.getNext(created.session_id);
      expect(done).toEqual({ comment: null, complete: true });
      expect(hostile).toBeGreaterThan(0);
      expect(neutral).toBeGreaterThan(0);
    });

    it("the preview rejects a selection exactly when the server does", async () => {
      const api = client();
      const created = await api.createSession("fuzzer", comments("p", 200));
      const rng = mulberry32(99);
      const pool = [...catalog.rules.map((r) => r.id), "XX1", "QQ2"];
      let accepted = 0;
      let rejected = 0;

      for (let trial = 0; trial < 120; trial++) {
        let ids: string[];
        if (rng() < 0.45) {
          ids = answers(randomWalk(catalog.rules, rng, "probe"));
          if (rng() < 0.25) ids = ids.slice(0, ids.length - 1);
          if (rng() < 0.25) ids = [...ids, pick(rng, pool)];
        } else {
          const len = Math.floor(rng() * 6);
          ids = Array.from({ length: len }, () => pick(rng, pool));
        }

        let previewOk = true;
        try {
          decidePreview(catalog.rules, ids);
        } catch (error) {
          expect(error).toBeInstanceOf(InvalidSelection);
          previewOk = false;
        }

        const next = await api.getNext(created.session_id);
        const commentId = next.comment!.id;
        const outcome = await api
          .label(created.session_id, created.token, commentId, ids)
          .catch((e: unknown) => e);

        if (previewOk) {
          expect(outcome, ids.join("+")).not.toBeInstanceOf(Error);
          const p = decidePreview(catalog.rules, ids);
          const result = outcome as Awaited<ReturnType<typeof api.label>>;
          expect([result.path.top, result.path.structure, result.path.fine]).toEqual([
            p.top,
            p.structure,
            p.fine,
          ]);
          accepted += 1;
        } else {
          expect(outcome, ids.join("+")).toBeInstanceOf(ApiError);
          expect((outcome as ApiError).status).toBe(422);
          expect((outcome as ApiError).code).toBe("invalid_path");
          rejected += 1;
        }
      }

      expect(accepted).toBeGreaterThan(20);
      expect(rejected).toBeGreaterThan(20);
    });
  });

  describe("agreement panel", () => {
    const HOSTILE = ["H1", "S1", "SO1"];
    const NEUTRAL = ["N1"];

    async function fillSession(
      api: ApiClient,
      annotator: string,
      prefix: string,
      rules: (index: number) => string[],
      n: number,
    ): Promise<string> {
      const created = await api.createSession(annotator, comments(prefix, n));
      for (let i = 0; i < n; i++) {
        await api.label(
          created.session_id,
          created.token,
          `${prefix}${String(i + 1).padStart(3, "0")}`,
          rules(i),
        );
      }
      return created.session_id;
    }

    it("renders the published reliability fixture as 0.872", async () => {
      const api = client();
      // 393 both hostile, 7 a-only hostile, 13 b-only hostile, 87 both neutral
      const a = await fillSession(api, "rater-a", "k", (i) => (i < 400 ? HOSTILE : NEUTRAL), 500);
      const b = await fillSession(
        api,
        "rater-b",
        "k",
        (i) => (i < 393 || (i >= 400 && i < 413) ? HOSTILE : NEUTRAL),
        500,
      );

      const report = await api.getAgreement(a, b, "top");
      expect(report.table).toEqual({ a: 393, b: 7, c: 13, d: 87, n: 500 });
      expect(report.partial).toBe(false);
      expect(report.disagreements).toHaveLength(20);

      const view = reportView(report);
      expect(view.kappa).toBe("0.872");
      expect(view.po).toBe("0.960");
      expect(view.pe).toBe("0.687");
      expect(view.se).toBe("0.028");
      expect(view.ci).toBe("0.817 to 0.927");
    }, 120_000);

    it("renders identical sessions as 1.000", async () => {
      const api = client();
      const rules = (i: number) => (i % 2 === 0 ? HOSTILE : NEUTRAL);
      const a = await fillSession(api, "twin-a", "t", rules, 6);
      const b = await fillSession(api, "twin-b", "t", rules, 6);
      const view = reportView(await api.getAgreement(a, b, "top"));
      expect(view.kappa).toBe("1.000");
      expect(view.disagreements).toEqual([]);
    });

    it("flags partial coverage when one session is further along", async () => {
      const api = client();
      const a = await fillSession(api, "part-a", "q", (i) => (i < 2 ? HOSTILE : NEUTRAL), 4);
      const created = await api.createSession("part-b", comments("q", 4));
      await api.label(created.session_id, created.token, "q001", HOSTILE);
      await api.label(created.session_id, created.token, "q002", HOSTILE);
      await api.label(created.session_id, created.token, "q003", NEUTRAL);
      const view = reportView(await api.getAgreement(a, created.session_id, "top"));
      expect(view.partial).toBe(true);
    });

    it("shows the insufficient-overlap notice for incomparable sessions", async () => {
      const api = client();
      const a = await fillSession(api, "lone-a", "da", () => NEUTRAL, 2);
      const b = await fillSession(api, "lone-b", "db", () => NEUTRAL, 2);
      const outcome = await api.getAgreement(a, b, "top").catch((e: unknown) => e);
      expect(outcome).toBeInstanceOf(ApiError);
      const view = errorView(outcome);
      expect(view.state).toBe("insufficient-overlap");
      expect(agreementView(outcome).state).toBe("insufficient-overlap");
    });
  });
});
